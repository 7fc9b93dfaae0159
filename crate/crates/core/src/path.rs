//! Polyline paths inside a domain and adaptive contour integration along them.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::domain::Domain;
use crate::error::{KernelError, Result};

/// Samples per segment when checking that a polyline stays in the domain.
pub const PATH_CHECK_SAMPLES: usize = 256;
pub const DEFAULT_PATH_TOL: f64 = 1e-10;
pub const DEFAULT_MAX_DEPTH: u32 = 20;

/// Upper bound on arc vertices tried when routing around an annulus hole.
const MAX_ARC_VERTICES: usize = 64;

/// A polyline from `start()` to `end()`, validated against a domain at
/// construction.
#[derive(Debug, Clone, PartialEq)]
pub struct Path {
    vertices: Vec<Complex64>,
}

impl Path {
    pub fn new(domain: &Domain, vertices: Vec<Complex64>) -> Result<Self> {
        if vertices.is_empty() {
            return Err(KernelError::NoPath("a path needs at least one vertex".into()));
        }
        if let Some(bad) = first_escape(domain, &vertices) {
            return Err(KernelError::NoPath(format!("polyline leaves the domain near {bad}")));
        }
        Ok(Path { vertices })
    }

    pub fn vertices(&self) -> &[Complex64] {
        &self.vertices
    }

    pub fn start(&self) -> Complex64 {
        self.vertices[0]
    }

    pub fn end(&self) -> Complex64 {
        *self.vertices.last().expect("path has vertices")
    }

    pub fn length(&self) -> f64 {
        self.vertices.windows(2).map(|s| (s[1] - s[0]).norm()).sum()
    }

    /// The same polyline traversed backwards.
    pub fn reversed(&self) -> Path {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Path { vertices }
    }
}

fn first_escape(domain: &Domain, vertices: &[Complex64]) -> Option<Complex64> {
    if let Some(v) = vertices.iter().find(|v| !domain.contains(**v)) {
        return Some(*v);
    }
    for seg in vertices.windows(2) {
        for k in 1..PATH_CHECK_SAMPLES {
            let t = k as f64 / PATH_CHECK_SAMPLES as f64;
            let p = seg[0] + (seg[1] - seg[0]) * t;
            if !domain.contains(p) {
                return Some(p);
            }
        }
    }
    None
}

/// Builds a path from `from` to `to`.
///
/// The straight segment is used when it stays inside the domain. Otherwise
/// the caller's waypoints are tried, and for an annulus a route through
/// vertices on the middle circle is generated on the shorter angular side
/// (counter-clockwise on ties), starting from two arc vertices and adding
/// more until the polyline clears the hole.
pub fn path_build(
    domain: &Domain,
    from: Complex64,
    to: Complex64,
    waypoints: Option<&[Complex64]>,
) -> Result<Path> {
    for (name, p) in [("start", from), ("end", to)] {
        if !domain.contains(p) {
            return Err(KernelError::NoPath(format!("{name} point {p} is not in the domain")));
        }
    }
    let straight = vec![from, to];
    if first_escape(domain, &straight).is_none() {
        return Ok(Path { vertices: straight });
    }
    if let Some(points) = waypoints {
        let mut vertices = Vec::with_capacity(points.len() + 2);
        vertices.push(from);
        vertices.extend_from_slice(points);
        vertices.push(to);
        if first_escape(domain, &vertices).is_none() {
            return Ok(Path { vertices });
        }
    }
    if let Domain::Annulus { center, inner, outer } = domain {
        let mid = 0.5 * (inner + outer);
        let a0 = (from - center).arg();
        let a1 = (to - center).arg();
        let mut sweep = (a1 - a0).rem_euclid(2.0 * PI);
        if sweep > PI {
            sweep -= 2.0 * PI;
        }
        // tie: counter-clockwise
        if (sweep.abs() - PI).abs() < 1e-12 {
            sweep = PI;
        }
        for count in 2..=MAX_ARC_VERTICES {
            let mut vertices = Vec::with_capacity(count + 2);
            vertices.push(from);
            for k in 1..=count {
                let t = a0 + sweep * k as f64 / (count + 1) as f64;
                vertices.push(center + Complex64::from_polar(mid, t));
            }
            vertices.push(to);
            if first_escape(domain, &vertices).is_none() {
                return Ok(Path { vertices });
            }
        }
    }
    Err(KernelError::NoPath(format!("could not route from {from} to {to}")))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PathIntegral {
    pub value: Complex64,
    /// Sum of the accepted Gauss–Kronrod error estimates.
    pub error_estimate: f64,
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// 15-point Kronrod estimate of `∫_a^b f(ξ) dξ` along the straight segment,
/// with `|K15 − G7|` as the error estimate.
fn gk15<F>(f: &F, a: Complex64, b: Complex64) -> Result<(Complex64, f64)>
where
    F: Fn(Complex64) -> Complex64,
{
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let eval = |z: Complex64| {
        let v = f(z);
        if v.re.is_finite() && v.im.is_finite() {
            Ok(v)
        } else {
            Err(KernelError::NanIntegrand(format!("{z}")))
        }
    };
    let fc = eval(mid)?;
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let f1 = eval(mid - half * XGK[j])?;
        let f2 = eval(mid + half * XGK[j])?;
        let s = f1 + f2;
        kronrod += s * WGK[j];
        if j % 2 == 1 {
            gauss += s * WG[j / 2];
        }
    }
    Ok((kronrod * half, ((kronrod - gauss) * half).norm()))
}

fn adaptive<F>(f: &F, a: Complex64, b: Complex64, tol: f64, depth: u32, max_depth: u32) -> Result<PathIntegral>
where
    F: Fn(Complex64) -> Complex64,
{
    let (value, err) = gk15(f, a, b)?;
    // the estimate cannot resolve below rounding of the value itself
    let floor = 64.0 * f64::EPSILON * value.norm();
    if err <= tol || err <= floor {
        return Ok(PathIntegral { value, error_estimate: err });
    }
    if depth >= max_depth {
        return Err(KernelError::TolNotMet { tol, estimate: err });
    }
    let m = 0.5 * (a + b);
    let left = adaptive(f, a, m, 0.5 * tol, depth + 1, max_depth)?;
    let right = adaptive(f, m, b, 0.5 * tol, depth + 1, max_depth)?;
    Ok(PathIntegral {
        value: left.value + right.value,
        error_estimate: left.error_estimate + right.error_estimate,
    })
}

/// `∫_path f(ξ) dξ` by adaptive Gauss–Kronrod on each segment. The tolerance
/// is shared between segments in proportion to their length.
pub fn integrate_path<F>(path: &Path, f: F, tol: f64) -> Result<PathIntegral>
where
    F: Fn(Complex64) -> Complex64,
{
    integrate_path_with_depth(path, f, tol, DEFAULT_MAX_DEPTH)
}

pub fn integrate_path_with_depth<F>(path: &Path, f: F, tol: f64, max_depth: u32) -> Result<PathIntegral>
where
    F: Fn(Complex64) -> Complex64,
{
    let total = path.length();
    let mut out = PathIntegral { value: Complex64::new(0.0, 0.0), error_estimate: 0.0 };
    if total == 0.0 {
        return Ok(out);
    }
    for seg in path.vertices.windows(2) {
        let len = (seg[1] - seg[0]).norm();
        if len == 0.0 {
            continue;
        }
        let part = adaptive(&f, seg[0], seg[1], tol * len / total, 0, max_depth)?;
        out.value += part.value;
        out.error_estimate += part.error_estimate;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn straight_path_in_disc() {
        let p = path_build(&Domain::unit_disc(), c(0.0, 0.0), c(0.5, 0.0), None).unwrap();
        assert_eq!(p.vertices(), &[c(0.0, 0.0), c(0.5, 0.0)]);
    }

    #[test]
    fn endpoint_outside_is_no_path() {
        let err = path_build(&Domain::unit_disc(), c(0.0, 0.0), c(1.5, 0.0), None).unwrap_err();
        assert_eq!(err.code(), "NO_PATH");
    }

    #[test]
    fn annulus_route_avoids_hole() {
        let d = Domain::annulus(c(0.0, 0.0), 0.3, 1.0).unwrap();
        let p = path_build(&d, c(-0.6, 0.0), c(0.6, 0.0), None).unwrap();
        assert!(p.vertices().len() >= 4);
        for seg in p.vertices().windows(2) {
            for k in 0..=1000 {
                let z = seg[0] + (seg[1] - seg[0]) * (k as f64 / 1000.0);
                assert!(z.norm() > 0.3 && z.norm() < 1.0, "{z}");
            }
        }
        // arc vertices sit on the middle circle near the imaginary axis side
        let mid = &p.vertices()[1..p.vertices().len() - 1];
        assert!(mid.iter().all(|v| (v.norm() - 0.65).abs() < 1e-12));
        assert!(mid.iter().all(|v| v.im.abs() > 0.3));
    }

    #[test]
    fn annulus_uses_waypoints_when_given() {
        let d = Domain::annulus(c(0.0, 0.0), 0.3, 1.0).unwrap();
        let wp = [c(-0.5, 0.5), c(0.5, 0.5)];
        let p = path_build(&d, c(-0.6, 0.0), c(0.6, 0.0), Some(&wp)).unwrap();
        assert_eq!(p.vertices().len(), 4);
        assert_eq!(p.vertices()[1], wp[0]);
    }

    #[test]
    fn sampled_region_without_waypoints_fails() {
        // U-shaped region
        let grid = vec![
            vec![true, true, true],
            vec![true, false, true],
            vec![true, false, true],
        ];
        let d = Domain::sampled(c(0.0, 0.0), 1.0, &grid).unwrap();
        let err = path_build(&d, c(0.5, 2.5), c(2.5, 2.5), None).unwrap_err();
        assert_eq!(err.code(), "NO_PATH");
        let wp = [c(0.5, 0.5), c(2.5, 0.5)];
        assert!(path_build(&d, c(0.5, 2.5), c(2.5, 2.5), Some(&wp)).is_ok());
    }

    #[test]
    fn integrate_constant_and_linear() {
        let d = Domain::unit_disc();
        let z0 = c(0.3, -0.4);
        let p = path_build(&d, c(0.0, 0.0), z0, None).unwrap();
        let v = integrate_path(&p, |_| c(1.0, 0.0), 1e-10).unwrap();
        assert!((v.value - z0).norm() < 1e-15);
        let p = path_build(&d, c(0.0, 0.0), c(0.5, 0.0), None).unwrap();
        let v = integrate_path(&p, |x| x, 1e-10).unwrap();
        assert!((v.value - c(0.125, 0.0)).norm() < 1e-15);
        let v = integrate_path(&p, |_| c(1.0 / PI, 0.0), 1e-10).unwrap();
        assert!((v.value.re - 0.5 / PI).abs() < 1e-15);
    }

    #[test]
    fn closed_loop_of_holomorphic_function_vanishes() {
        let d = Domain::annulus(c(0.0, 0.0), 0.3, 1.0).unwrap();
        let loop_path = Path::new(&d, vec![c(0.6, 0.0), c(0.0, 0.6), c(-0.6, 0.0), c(0.0, -0.6), c(0.6, 0.0)]).unwrap();
        let v = integrate_path(&loop_path, |z| z.powi(-2) + z * z, 1e-12).unwrap();
        assert!(v.value.norm() < 1e-12);
        // 1/z has no primitive: winding once gives 2πi
        let v = integrate_path(&loop_path, |z| z.inv(), 1e-12).unwrap();
        assert!((v.value - c(0.0, 2.0 * PI)).norm() < 1e-10);
    }

    #[test]
    fn exhausted_depth_is_reported() {
        let d = Domain::unit_disc();
        let p = path_build(&d, c(-0.9, 0.0), c(0.9, 0.0), None).unwrap();
        // sharply peaked integrand with a tiny depth budget
        let err = integrate_path_with_depth(&p, |z| (z * z + 1e-6).inv(), 1e-12, 2).unwrap_err();
        assert_eq!(err.code(), "TOL_NOT_MET");
    }

    #[test]
    fn reversal_negates() {
        let d = Domain::unit_disc();
        let p = path_build(&d, c(0.1, 0.2), c(-0.4, 0.5), None).unwrap();
        let f = |z: Complex64| (z * 3.0).exp();
        let a = integrate_path(&p, f, 1e-12).unwrap().value;
        let b = integrate_path(&p.reversed(), f, 1e-12).unwrap().value;
        assert!((a + b).norm() < 1e-13);
    }
}
