//! Plain-text PPM (P3) images of covers and scan masks.

use std::fmt::Write as _;

use num_complex::Complex64;

use crate::disk::Disk;
use crate::unfolding::scan::{CELL_EMPTY, CELL_TANGENT, CELL_UNKNOWN};

pub type Rgb = [u8; 3];

pub const BACKGROUND: Rgb = [255, 255, 255];
pub const FIRST: Rgb = [200, 30, 30];
pub const SECOND: Rgb = [30, 60, 200];
pub const OVERLAP: Rgb = [20, 20, 20];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ppm {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first.
    pub pixels: Vec<Rgb>,
}

impl Ppm {
    pub fn new(width: usize, height: usize) -> Ppm {
        Ppm { width, height, pixels: vec![BACKGROUND; width * height] }
    }

    pub fn set(&mut self, x: usize, y: usize, c: Rgb) {
        self.pixels[y * self.width + x] = c;
    }

    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    /// P3 text, one pixel row per line.
    pub fn to_p3(&self) -> String {
        let mut out = format!("P3\n{} {}\n255\n", self.width, self.height);
        for row in self.pixels.chunks(self.width) {
            let line: Vec<String> = row.iter().map(|p| format!("{} {} {}", p[0], p[1], p[2])).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

/// Square view onto the plane.
#[derive(Debug, Clone, Copy)]
struct View {
    center: Complex64,
    half: f64,
    size: usize,
}

impl View {
    fn around(disks: &[&[Disk]], size: usize) -> View {
        let mut lo = Complex64::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Complex64::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for d in disks.iter().flat_map(|s| s.iter()) {
            lo.re = lo.re.min(d.center.re - d.radius);
            lo.im = lo.im.min(d.center.im - d.radius);
            hi.re = hi.re.max(d.center.re + d.radius);
            hi.im = hi.im.max(d.center.im + d.radius);
        }
        if !lo.re.is_finite() {
            return View { center: Complex64::new(0.0, 0.0), half: 1.0, size };
        }
        let half = 0.5 * (hi.re - lo.re).max(hi.im - lo.im) * 1.05;
        View { center: (lo + hi) * 0.5, half: half.max(1e-300), size }
    }

    /// Plane point at the center of pixel `(x, y)`; `y` grows downwards.
    fn point(&self, x: usize, y: usize) -> Complex64 {
        let t = |k: usize| -1.0 + (2 * k + 1) as f64 / self.size as f64;
        self.center + self.half * Complex64::new(t(x), -t(y))
    }

    /// Pixel rectangle covering a disk.
    fn pixel_range(&self, d: &Disk) -> (usize, usize, usize, usize) {
        let scale = self.size as f64 / (2.0 * self.half);
        let px = |v: f64| ((v * scale).floor().max(0.0) as usize).min(self.size - 1);
        let x0 = px(d.center.re - d.radius - self.center.re + self.half);
        let x1 = px(d.center.re + d.radius - self.center.re + self.half);
        let y0 = px(self.center.im + self.half - d.center.im - d.radius);
        let y1 = px(self.center.im + self.half - d.center.im + d.radius);
        (x0, x1, y0, y1)
    }
}

fn paint(mask: &mut [u8], view: &View, disks: &[Disk], bit: u8) {
    for d in disks {
        let (x0, x1, y0, y1) = view.pixel_range(d);
        for y in y0..=y1 {
            for x in x0..=x1 {
                if (view.point(x, y) - d.center).norm() <= d.radius {
                    mask[y * view.size + x] |= bit;
                }
            }
        }
    }
}

/// Two covers on a common square view: first set red, second blue, overlap dark.
pub fn render_covers(first: &[Disk], second: &[Disk], size: usize) -> Ppm {
    let view = View::around(&[first, second], size);
    let mut mask = vec![0u8; size * size];
    paint(&mut mask, &view, first, 1);
    paint(&mut mask, &view, second, 2);
    let mut img = Ppm::new(size, size);
    for (p, m) in img.pixels.iter_mut().zip(&mask) {
        *p = match m {
            1 => FIRST,
            2 => SECOND,
            3 => OVERLAP,
            _ => BACKGROUND,
        };
    }
    img
}

/// A single cover in the first color.
pub fn render_cover(disks: &[Disk], size: usize) -> Ppm {
    render_covers(disks, &[], size)
}

/// Scan mask with `Im μ` increasing upwards: tangent black, unknown gray, empty light.
pub fn render_mask(mask: &[u8], res: usize) -> Ppm {
    let mut img = Ppm::new(res, res);
    for j in 0..res {
        for i in 0..res {
            let c = match mask[j * res + i] {
                CELL_TANGENT => [0, 0, 0],
                CELL_UNKNOWN => [140, 140, 140],
                CELL_EMPTY => [225, 225, 240],
                _ => BACKGROUND,
            };
            img.set(i, res - 1 - j, c);
        }
    }
    img
}
