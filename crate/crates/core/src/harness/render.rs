use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use crate::circle::Angle;
use crate::error::{Error, Result};
use crate::quadmap::QuadraticMap;
use crate::raytrace::{equipotential, trace_ray, TraceConfig};

const INTERIOR: [u8; 3] = [0, 0, 0];
const BOUNDARY: [u8; 3] = [48, 48, 48];
const BAND_LIGHT: [u8; 3] = [215, 215, 215];
const BAND_DARK: [u8; 3] = [175, 175, 175];
const RAY: [u8; 3] = [220, 40, 40];
const EQUIPOTENTIAL: [u8; 3] = [40, 160, 60];
const ORBIT: [u8; 3] = [40, 90, 230];

const BAILOUT: f64 = 1e3;
const EQUIPOTENTIAL_POINTS: usize = 256;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Window {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Window {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let w = Window { re_min, re_max, im_min, im_max };
        let finite = [re_min, re_max, im_min, im_max].iter().all(|x| x.is_finite());
        if !finite || re_min >= re_max || im_min >= im_max {
            return Err(Error::InvalidInput(format!("window {w:?} is not a finite rectangle")));
        }
        Ok(w)
    }

    /// Square window of half-width `r` around `center`.
    pub fn centered(center: Complex64, r: f64) -> Result<Self> {
        Window::new(center.re - r, center.re + r, center.im - r, center.im + r)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RenderSpec {
    pub width: usize,
    pub height: usize,
    pub window: Window,
    pub rays: Vec<Angle>,
    pub equipotentials: Vec<f64>,
    /// Number of critical-orbit points `f^k(0)`, `k = 1..=n`, to mark.
    pub critical_orbit: usize,
    pub trace: TraceConfig,
    pub max_iter: usize,
}

impl RenderSpec {
    pub fn new(width: usize, height: usize, window: Window) -> Self {
        RenderSpec {
            width,
            height,
            window,
            rays: Vec::new(),
            equipotentials: Vec::new(),
            critical_orbit: 0,
            trace: TraceConfig::default(),
            max_iter: 500,
        }
    }

    fn pixel_size(&self) -> f64 {
        let w = self.window;
        ((w.re_max - w.re_min) / self.width as f64).max((w.im_max - w.im_min) / self.height as f64)
    }

    /// Center of pixel `(x, y)`; row 0 is the top edge.
    pub fn pixel_center(&self, x: usize, y: usize) -> Complex64 {
        let w = self.window;
        Complex64::new(
            w.re_min + (x as f64 + 0.5) * (w.re_max - w.re_min) / self.width as f64,
            w.im_max - (y as f64 + 0.5) * (w.im_max - w.im_min) / self.height as f64,
        )
    }

    /// Continuous pixel coordinates of `z`.
    pub fn to_pixel(&self, z: Complex64) -> (f64, f64) {
        let w = self.window;
        (
            (z.re - w.re_min) / (w.re_max - w.re_min) * self.width as f64,
            (w.im_max - z.im) / (w.im_max - w.im_min) * self.height as f64,
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Image {
    pub width: usize,
    pub height: usize,
    pub rgb: Vec<u8>,
}

impl Image {
    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.rgb[i], self.rgb[i + 1], self.rgb[i + 2]]
    }

    fn put(&mut self, x: i64, y: i64, color: [u8; 3]) {
        if x >= 0 && y >= 0 && (x as usize) < self.width && (y as usize) < self.height {
            let i = 3 * (y as usize * self.width + x as usize);
            self.rgb[i..i + 3].copy_from_slice(&color);
        }
    }

    /// Binary PPM with header `P6\n<w> <h>\n255\n`.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.rgb);
        out
    }

    pub fn to_rgba(&self) -> Vec<u8> {
        self.rgb.chunks_exact(3).flat_map(|p| [p[0], p[1], p[2], 255]).collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RenderOutput {
    pub image: Image,
    pub rays: Vec<Vec<Complex64>>,
    pub equipotentials: Vec<Vec<Complex64>>,
    pub orbit: Vec<Complex64>,
}

fn shade(map: &QuadraticMap, z0: Complex64, pixel: f64, max_iter: usize) -> [u8; 3] {
    let mut z = z0;
    let mut dz = Complex64::new(1.0, 0.0);
    for n in 0..max_iter {
        if z.norm_sqr() > BAILOUT * BAILOUT {
            let r = z.norm();
            let distance = 0.5 * r * r.ln() / dz.norm();
            if distance < 0.5 * pixel {
                return BOUNDARY;
            }
            let green = r.ln() / (n as f64).exp2();
            return if (2.0 * green.log2()).floor() as i64 % 2 == 0 { BAND_LIGHT } else { BAND_DARK };
        }
        dz = 2.0 * z * dz;
        z = map.apply(z);
    }
    INTERIOR
}

/// Liang–Barsky clip of a segment to `[0, w] × [0, h]`.
fn clip(a: (f64, f64), b: (f64, f64), w: f64, h: f64) -> Option<((f64, f64), (f64, f64))> {
    let (dx, dy) = (b.0 - a.0, b.1 - a.1);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for (p, q) in [(-dx, a.0), (dx, w - a.0), (-dy, a.1), (dy, h - a.1)] {
        if p == 0.0 {
            if q < 0.0 {
                return None;
            }
        } else {
            let r = q / p;
            if p < 0.0 {
                lo = lo.max(r);
            } else {
                hi = hi.min(r);
            }
        }
    }
    (lo <= hi).then_some(((a.0 + lo * dx, a.1 + lo * dy), (a.0 + hi * dx, a.1 + hi * dy)))
}

fn draw_polyline(img: &mut Image, spec: &RenderSpec, points: &[Complex64], closed: bool, color: [u8; 3]) {
    let (w, h) = (img.width as f64, img.height as f64);
    let n = points.len();
    let edges = if closed { n } else { n.saturating_sub(1) };
    for k in 0..edges {
        let a = spec.to_pixel(points[k]);
        let b = spec.to_pixel(points[(k + 1) % n]);
        let Some((a, b)) = clip(a, b, w, h) else { continue };
        let steps = ((b.0 - a.0).abs().max((b.1 - a.1).abs()).ceil() as usize).max(1);
        for s in 0..=steps {
            let u = s as f64 / steps as f64;
            img.put((a.0 + u * (b.0 - a.0)).floor() as i64, (a.1 + u * (b.1 - a.1)).floor() as i64, color);
        }
    }
}

/// Escape-time picture of the filled Julia set with ray, equipotential and
/// critical-orbit overlays.
pub fn render(map: &QuadraticMap, spec: &RenderSpec) -> Result<RenderOutput> {
    if spec.width < 16 || spec.height < 16 {
        return Err(Error::InvalidInput("images must be at least 16×16".into()));
    }
    Window::new(spec.window.re_min, spec.window.re_max, spec.window.im_min, spec.window.im_max)?;
    let pixel = spec.pixel_size();
    let rows: Vec<usize> = (0..spec.height).collect();
    let rgb = crate::par::map_collect(&rows, |&y| {
        (0..spec.width)
            .flat_map(|x| shade(map, spec.pixel_center(x, y), pixel, spec.max_iter))
            .collect::<Vec<u8>>()
    })
    .concat();
    let mut image = Image { width: spec.width, height: spec.height, rgb };

    let equipotentials = spec
        .equipotentials
        .iter()
        .map(|&g| equipotential(map, g, EQUIPOTENTIAL_POINTS, &spec.trace))
        .collect::<Result<Vec<_>>>()?;
    for curve in &equipotentials {
        draw_polyline(&mut image, spec, curve, true, EQUIPOTENTIAL);
    }
    let rays = crate::par::map_collect(&spec.rays, |t| trace_ray(map, t, &spec.trace))
        .into_iter()
        .map(|trail| trail.map(|t| t.points().collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()?;
    for ray in &rays {
        draw_polyline(&mut image, spec, ray, false, RAY);
    }
    let mut orbit = Vec::with_capacity(spec.critical_orbit);
    let mut z = Complex64::new(0.0, 0.0);
    for _ in 0..spec.critical_orbit {
        z = map.apply(z);
        if !z.norm().is_finite() {
            break;
        }
        orbit.push(z);
        let (px, py) = spec.to_pixel(z);
        for dy in -1..=1 {
            for dx in -1..=1 {
                image.put(px.floor() as i64 + dx, py.floor() as i64 + dy, ORBIT);
            }
        }
    }
    Ok(RenderOutput { image, rays, equipotentials, orbit })
}

/// Vector overlay of the rays, equipotentials and orbit in pixel coordinates.
pub fn to_svg(spec: &RenderSpec, out: &RenderOutput) -> String {
    let mut svg = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n",
        w = spec.width,
        h = spec.height
    );
    let path = |points: &[Complex64]| {
        points
            .iter()
            .map(|&z| {
                let (x, y) = spec.to_pixel(z);
                format!("{x:.3},{y:.3}")
            })
            .collect::<Vec<_>>()
            .join(" ")
    };
    for curve in &out.equipotentials {
        let _ = writeln!(svg, "<polygon fill=\"none\" stroke=\"rgb(40,160,60)\" points=\"{}\"/>", path(curve));
    }
    for ray in &out.rays {
        let _ = writeln!(svg, "<polyline fill=\"none\" stroke=\"rgb(220,40,40)\" points=\"{}\"/>", path(ray));
    }
    for &z in &out.orbit {
        let (x, y) = spec.to_pixel(z);
        let _ = writeln!(svg, "<circle cx=\"{x:.3}\" cy=\"{y:.3}\" r=\"1.5\" fill=\"rgb(40,90,230)\"/>");
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dark(p: [u8; 3]) -> bool {
        p == INTERIOR || p == BOUNDARY
    }

    fn plain(c: Complex64, size: usize) -> RenderOutput {
        let spec = RenderSpec::new(size, size, Window::centered(Complex64::new(0.0, 0.0), 2.5).unwrap());
        render(&QuadraticMap::from_c(c).unwrap(), &spec).unwrap()
    }

    #[test]
    fn unit_disk_silhouette() {
        let out = plain(Complex64::new(0.0, 0.0), 64);
        let spec = RenderSpec::new(64, 64, Window::centered(Complex64::new(0.0, 0.0), 2.5).unwrap());
        assert_eq!(out.image.pixel(32, 32), INTERIOR);
        for y in 0..64 {
            for x in 0..64 {
                let r = spec.pixel_center(x, y).norm();
                if r < 0.9 {
                    assert_eq!(out.image.pixel(x, y), INTERIOR);
                }
                if r > 1.1 {
                    assert!(!dark(out.image.pixel(x, y)), "({x}, {y}) at radius {r}");
                }
            }
        }
    }

    #[test]
    fn chebyshev_segment_silhouette() {
        let size = 80;
        let out = plain(Complex64::new(-2.0, 0.0), size);
        let spec = RenderSpec::new(size, size, Window::centered(Complex64::new(0.0, 0.0), 2.5).unwrap());
        let px = spec.pixel_size();
        let mut on_segment = 0;
        for y in 0..size {
            for x in 0..size {
                let z = spec.pixel_center(x, y);
                let to_segment = Complex64::new(z.re - z.re.clamp(-2.0, 2.0), z.im).norm();
                if dark(out.image.pixel(x, y)) {
                    assert!(to_segment <= 2.0 * px, "({x}, {y}) is {} px away", to_segment / px);
                }
                if to_segment <= 0.5 * px && z.re.abs() < 1.9 {
                    assert!(dark(out.image.pixel(x, y)), "({x}, {y}) on the segment is light");
                    on_segment += 1;
                }
            }
        }
        assert!(on_segment > 0);
    }

    #[test]
    fn deterministic_ppm() {
        let a = plain(Complex64::new(-0.12, 0.75), 32).image.to_ppm();
        let b = plain(Complex64::new(-0.12, 0.75), 32).image.to_ppm();
        assert_eq!(a, b);
        assert!(a.starts_with(b"P6\n32 32\n255\n"));
        assert_eq!(a.len(), "P6\n32 32\n255\n".len() + 32 * 32 * 3);
    }

    #[test]
    fn overlays_are_drawn() {
        let mut spec = RenderSpec::new(64, 64, Window::centered(Complex64::new(0.0, 0.0), 2.0).unwrap());
        spec.rays = vec![Angle::new(1, 8).unwrap()];
        spec.equipotentials = vec![0.5];
        spec.critical_orbit = 3;
        let out = render(&QuadraticMap::from_c(Complex64::new(0.0, 0.0)).unwrap(), &spec).unwrap();
        let count = |color| out.image.rgb.chunks_exact(3).filter(|p| *p == color).count();
        assert!(count(RAY) > 10);
        assert!(count(EQUIPOTENTIAL) > 50);
        assert!(count(ORBIT) >= 9);
        let svg = to_svg(&spec, &out);
        assert!(svg.contains("<polyline") && svg.contains("<polygon") && svg.contains("<circle"));
    }

    #[test]
    fn golden_rays_end_at_critical_point() {
        let map = super::super::golden_siegel_map();
        let t = super::super::golden_critical_angle(1024).unwrap();
        let mut spec = RenderSpec::new(32, 32, Window::centered(Complex64::new(0.0, 0.0), 1.5).unwrap());
        spec.rays = vec![t.value.clone(), t.value.tau()];
        spec.trace = TraceConfig { tol_conj: 1e-6, ..TraceConfig::with_depth(256, 4) };
        spec.max_iter = 50;
        let out = render(&map, &spec).unwrap();
        for ray in &out.rays {
            assert!(ray.last().unwrap().norm() <= 5e-2);
        }
    }

    #[test]
    fn clipping() {
        assert!(clip((-10.0, 5.0), (-1.0, 5.0), 8.0, 8.0).is_none());
        let (a, b) = clip((-8.0, 4.0), (16.0, 4.0), 8.0, 8.0).unwrap();
        assert_eq!((a, b), ((0.0, 4.0), (8.0, 4.0)));
        assert!(render(&QuadraticMap::from_c(Complex64::new(0.0, 0.0)).unwrap(), &RenderSpec::new(8, 8, Window::centered(Complex64::new(0.0, 0.0), 1.0).unwrap())).is_err());
    }
}
