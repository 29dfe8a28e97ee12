//! Closed disks in the complex plane.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

/// The closed disk `D(center, radius)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Complex64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Complex64, radius: f64) -> Self {
        Disk { center, radius }
    }

    pub fn contains_point(&self, z: Complex64, slack: f64) -> bool {
        (z - self.center).norm() <= self.radius + slack
    }

    /// `self ⊂ other`, with `slack` tolerance.
    pub fn inside(&self, other: &Disk, slack: f64) -> bool {
        (self.center - other.center).norm() + self.radius <= other.radius + slack
    }

    /// Signed gap between the two disks; negative when they overlap.
    pub fn gap(&self, other: &Disk) -> f64 {
        (self.center - other.center).norm() - self.radius - other.radius
    }

    /// Touching disks count as intersecting.
    pub fn intersects(&self, other: &Disk, slack: f64) -> bool {
        self.gap(other) <= slack
    }

    pub fn translate(&self, t: Complex64) -> Disk {
        Disk::new(self.center + t, self.radius)
    }

    /// Overlap depth `r1 + r2 - d` divided by the smaller diameter, clamped to `[0, 1]`.
    pub fn relative_overlap(&self, other: &Disk) -> f64 {
        let d = (self.center - other.center).norm();
        let m = self.radius.min(other.radius);
        if m <= 0.0 {
            return if d <= self.radius.max(other.radius) { 1.0 } else { 0.0 };
        }
        ((self.radius + other.radius - d) / (2.0 * m)).clamp(0.0, 1.0)
    }

    /// A point in the middle of the overlap along the line of centers.
    pub fn overlap_midpoint(&self, other: &Disk) -> Complex64 {
        let delta = other.center - self.center;
        let d = delta.norm();
        if d == 0.0 {
            return self.center;
        }
        let lo = (d - other.radius).max(-self.radius);
        let hi = self.radius.min(d + other.radius);
        self.center + delta / d * (0.5 * (lo + hi))
    }

    /// Smallest disk enclosing `self ∩ other`, or `None` if they are disjoint.
    pub fn intersection_hull(&self, other: &Disk) -> Option<Disk> {
        let d = (self.center - other.center).norm();
        if d > self.radius + other.radius {
            return None;
        }
        if d + self.radius <= other.radius {
            return Some(*self);
        }
        if d + other.radius <= self.radius {
            return Some(*other);
        }
        // lens: distance from self.center to the chord along the line of centers
        let a = (d * d + self.radius * self.radius - other.radius * other.radius) / (2.0 * d);
        let h = (self.radius * self.radius - a * a).max(0.0).sqrt();
        let dir = (other.center - self.center) / d;
        let chord_mid = self.center + dir * a;
        // chord circle covers the lens iff each center lies on the far side of the chord
        if a >= 0.0 && d - a >= 0.0 {
            Some(Disk::new(chord_mid, h))
        } else if a < 0.0 {
            Some(*self)
        } else {
            Some(*other)
        }
    }

    /// Points of a `side x side` grid on the bounding square that fall inside the disk.
    pub fn grid(&self, side: usize) -> Vec<Complex64> {
        let mut pts = Vec::with_capacity(side * side);
        let step = if side > 1 { 2.0 * self.radius / (side - 1) as f64 } else { 0.0 };
        for i in 0..side {
            for j in 0..side {
                let z = if side > 1 {
                    self.center
                        + Complex64::new(-self.radius + step * i as f64, -self.radius + step * j as f64)
                } else {
                    self.center
                };
                if (z - self.center).norm() <= self.radius * (1.0 + 1e-12) {
                    pts.push(z);
                }
            }
        }
        pts
    }

    /// `n` equally spaced points on the boundary circle.
    pub fn boundary(&self, n: usize) -> impl Iterator<Item = Complex64> + '_ {
        (0..n).map(move |k| {
            let t = std::f64::consts::TAU * k as f64 / n as f64;
            self.center + Complex64::from_polar(self.radius, t)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hull_of_lens_contains_sampled_intersection() {
        let a = Disk::new(c(0.0, 0.0), 1.0);
        let b = Disk::new(c(1.5, 0.3), 0.8);
        let hull = a.intersection_hull(&b).unwrap();
        for p in a.grid(101) {
            if b.contains_point(p, 0.0) {
                assert!(hull.contains_point(p, 1e-12), "{p}");
            }
        }
        assert!(hull.radius < b.radius);
    }

    #[test]
    fn hull_cases() {
        let a = Disk::new(c(0.0, 0.0), 1.0);
        assert!(a.intersection_hull(&Disk::new(c(3.0, 0.0), 1.0)).is_none());
        let small = Disk::new(c(0.2, 0.0), 0.1);
        assert_eq!(a.intersection_hull(&small), Some(small));
        // one center inside the other disk's chord side
        let big = Disk::new(c(1.2, 0.0), 2.0);
        let hull = a.intersection_hull(&big).unwrap();
        for p in a.grid(81) {
            if big.contains_point(p, 0.0) {
                assert!(hull.contains_point(p, 1e-12));
            }
        }
    }

    #[test]
    fn overlap_measures() {
        let a = Disk::new(c(0.0, 0.0), 1.0);
        let b = Disk::new(c(1.0, 0.0), 1.0);
        assert!((a.relative_overlap(&b) - 0.5).abs() < 1e-15);
        assert!((a.overlap_midpoint(&b) - c(0.5, 0.0)).norm() < 1e-15);
        assert_eq!(a.relative_overlap(&Disk::new(c(5.0, 0.0), 1.0)), 0.0);
        assert!(a.intersects(&Disk::new(c(2.0, 0.0), 1.0), 0.0));
    }
}
