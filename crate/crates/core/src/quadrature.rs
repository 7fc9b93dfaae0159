//! Deterministic area quadrature.
//!
//! Circular domains use a tensor rule: Gauss–Legendre in the radius times the
//! equispaced trapezoid rule in the angle. Sampled regions use the midpoint
//! rule on dyadically subdivided cells, with extra levels on boundary cells.
//! Every reduction runs in the fixed node order with compensated summation,
//! so results are bit-for-bit reproducible regardless of thread count.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::domain::Domain;
use crate::error::{KernelError, Result};

/// Neumaier's variant of Kahan summation.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    compensation: f64,
}

impl CompensatedSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> f64 {
        self.sum + self.compensation
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl ComplexSum {
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    pub fn total(&self) -> Complex64 {
        Complex64::new(self.re.total(), self.im.total())
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes ascending.
///
/// Newton iteration on the three-term recurrence from the Tricomi initial
/// guess; converges to machine precision for every `n` used here.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n > 0, "Gauss-Legendre rule needs at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let nf = n as f64;
    let d = nf * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    (
        x.iter().map(|t| mid + half * t).collect(),
        w.iter().map(|wi| half * wi).collect(),
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResolutionSpec {
    /// Gauss–Legendre nodes in the radius.
    #[serde(default = "default_radial")]
    pub radial: usize,
    /// Trapezoid nodes in the angle.
    #[serde(default = "default_angular")]
    pub angular: usize,
    /// Dyadic subdivision depth for every cell of a sampled region.
    #[serde(default = "default_subdivision")]
    pub subdivision: u32,
    /// Extra subdivision depth for sampled cells on the region boundary.
    #[serde(default = "default_boundary_refine")]
    pub boundary_refine: u32,
}

fn default_radial() -> usize {
    80
}
fn default_angular() -> usize {
    160
}
fn default_subdivision() -> u32 {
    2
}
fn default_boundary_refine() -> u32 {
    1
}

impl Default for ResolutionSpec {
    fn default() -> Self {
        ResolutionSpec {
            radial: default_radial(),
            angular: default_angular(),
            subdivision: default_subdivision(),
            boundary_refine: default_boundary_refine(),
        }
    }
}

impl ResolutionSpec {
    pub fn doubled(&self) -> Self {
        ResolutionSpec {
            radial: 2 * self.radial,
            angular: 2 * self.angular,
            subdivision: self.subdivision + 1,
            boundary_refine: self.boundary_refine,
        }
    }
}

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub nodes: Vec<Complex64>,
    pub weights: Vec<f64>,
    pub resolution: ResolutionSpec,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn total_weight(&self) -> f64 {
        let mut s = CompensatedSum::default();
        for w in &self.weights {
            s.add(*w);
        }
        s.total()
    }
}

pub fn area_quadrature(domain: &Domain, resolution: &ResolutionSpec) -> QuadratureRule {
    assert!(resolution.radial > 0 && resolution.angular > 0, "resolution must be positive");
    match domain {
        Domain::Disc { center, radius } => polar_rule(*center, 0.0, *radius, resolution),
        Domain::Annulus { center, inner, outer } => polar_rule(*center, *inner, *outer, resolution),
        Domain::Sampled(region) => {
            let mut nodes = Vec::new();
            let mut weights = Vec::new();
            for row in 0..region.rows() {
                for col in 0..region.cols() {
                    if !region.is_set(row, col) {
                        continue;
                    }
                    let depth = resolution.subdivision
                        + if region.is_boundary_cell(row, col) { resolution.boundary_refine } else { 0 };
                    let k = 1usize << depth;
                    let h = region.cell_size() / k as f64;
                    let corner = region.cell_corner(row, col);
                    for a in 0..k {
                        for b in 0..k {
                            nodes.push(corner + Complex64::new((b as f64 + 0.5) * h, (a as f64 + 0.5) * h));
                            weights.push(h * h);
                        }
                    }
                }
            }
            QuadratureRule { nodes, weights, resolution: *resolution }
        }
    }
}

fn polar_rule(center: Complex64, r0: f64, r1: f64, resolution: &ResolutionSpec) -> QuadratureRule {
    let (radii, rw) = gauss_legendre_on(resolution.radial, r0, r1);
    let m = resolution.angular;
    let dtheta = 2.0 * PI / m as f64;
    let mut nodes = Vec::with_capacity(radii.len() * m);
    let mut weights = Vec::with_capacity(radii.len() * m);
    for (r, w) in radii.iter().zip(&rw) {
        for k in 0..m {
            nodes.push(center + Complex64::from_polar(*r, k as f64 * dtheta));
            weights.push(w * r * dtheta);
        }
    }
    QuadratureRule { nodes, weights, resolution: *resolution }
}

/// `Σ w_i f(x_i)`. Integrand values are computed in parallel; the sum is
/// always taken sequentially in node order.
pub fn integrate_area<F>(rule: &QuadratureRule, f: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Complex64 + Sync,
{
    let values: Vec<Complex64> = rule.nodes.par_iter().map(|&z| f(z)).collect();
    let mut sum = ComplexSum::default();
    for ((v, w), z) in values.iter().zip(&rule.weights).zip(&rule.nodes) {
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(KernelError::NanIntegrand(format!("{z}")));
        }
        sum.add(v * *w);
    }
    Ok(sum.total())
}

/// Fallible variant of [`integrate_area`]; the first error in node order wins.
pub fn try_integrate_area<F>(rule: &QuadratureRule, f: F) -> Result<Complex64>
where
    F: Fn(Complex64) -> Result<Complex64> + Sync,
{
    let values: Vec<Result<Complex64>> = rule.nodes.par_iter().map(|&z| f(z)).collect();
    let mut sum = ComplexSum::default();
    for ((v, w), z) in values.into_iter().zip(&rule.weights).zip(&rule.nodes) {
        let v = v?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(KernelError::NanIntegrand(format!("{z}")));
        }
        sum.add(v * *w);
    }
    Ok(sum.total())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 80, 301] {
            let (x, w) = gauss_legendre(n);
            let total: f64 = w.iter().sum();
            assert!((total - 2.0).abs() < 1e-13, "n={n} weight sum {total}");
            // ∫ x^(2n-2) = 2/(2n-1)
            let deg = 2 * n - 2;
            let s: f64 = x.iter().zip(&w).map(|(xi, wi)| wi * xi.powi(deg as i32)).sum();
            assert!((s - 2.0 / (deg as f64 + 1.0)).abs() < 1e-13, "n={n}");
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn unit_disc_area() {
        let rule = area_quadrature(&Domain::unit_disc(), &ResolutionSpec::default());
        assert!((rule.total_weight() - PI).abs() < 1e-12);
    }

    #[test]
    fn unit_disc_moments() {
        let rule = area_quadrature(&Domain::unit_disc(), &ResolutionSpec::default());
        let one = integrate_area(&rule, |_| Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re - PI).abs() < 1e-12 && one.im.abs() < 1e-15);
        let odd = integrate_area(&rule, |z| z).unwrap();
        assert!(odd.norm() < 1e-14);
        let r2 = integrate_area(&rule, |z| z * z.conj()).unwrap();
        assert!((r2.re - PI / 2.0).abs() < 1e-10);
    }

    #[test]
    fn annulus_area() {
        let d = Domain::annulus(Complex64::new(0.0, 0.0), 0.5, 1.0).unwrap();
        let rule = area_quadrature(&d, &ResolutionSpec::default());
        assert!((rule.total_weight() - 0.75 * PI).abs() < 1e-10);
        assert!(rule.nodes.iter().all(|z| d.contains(*z)));
    }

    #[test]
    fn sampled_region_area_and_nodes_inside() {
        let grid = vec![vec![true, true, false], vec![false, true, true]];
        let d = Domain::sampled(Complex64::new(-1.0, -1.0), 0.5, &grid).unwrap();
        let rule = area_quadrature(&d, &ResolutionSpec::default());
        assert!((rule.total_weight() - d.area()).abs() < 1e-14);
        assert!(rule.nodes.iter().all(|z| d.contains(*z)));
    }

    #[test]
    fn nan_integrand_is_reported() {
        let rule = area_quadrature(&Domain::unit_disc(), &ResolutionSpec { radial: 4, angular: 8, ..Default::default() });
        let err = integrate_area(&rule, |_| Complex64::new(f64::NAN, 0.0)).unwrap_err();
        assert_eq!(err.code(), "NAN_INTEGRAND");
    }

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut s = CompensatedSum::default();
        s.add(1e16);
        for _ in 0..10 {
            s.add(1.0);
        }
        s.add(-1e16);
        assert_eq!(s.total(), 10.0);
    }
}
