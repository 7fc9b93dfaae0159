//! Primitive-admitting holomorphic bases, weighted Gram matrices and
//! Cholesky whitening.
//!
//! Basis elements are scaled powers `g_e(z) = ((z - c) / s)^e`, with `s` the
//! outer radius for `e >= 0` and the inner radius for `e < 0`, so every
//! element is bounded by one on its domain. The exponent `-1` is excluded
//! from the reduced families: it is the only power without a primitive on an
//! annulus.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::domain::Domain;
use crate::error::{KernelError, Result};
use crate::quadrature::{gauss_legendre_on, ComplexSum, CompensatedSum, QuadratureRule, ResolutionSpec};
use crate::weight::Weight;

/// Reciprocal condition below which a Gram matrix is rejected.
pub const RCOND_FLOOR: f64 = 1e-13;
/// Largest diagonal jitter, relative to the trace of the equilibrated Gram.
pub const MAX_JITTER: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisKind {
    /// `1, z, …, z^max_degree`
    Monomials { max_degree: usize },
    /// `z^-m, …, z^-2, 1, z, …, z^max_degree`
    LaurentNoInverse { min_degree: i32, max_degree: usize },
    /// Includes `z^-1`; spans the full Bergman space of an annulus rather than
    /// the reduced one and has no primitives.
    Laurent { min_degree: i32, max_degree: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BasisSet {
    kind: BasisKind,
    center: Complex64,
    outer_scale: f64,
    inner_scale: f64,
    /// Ascending.
    exponents: Vec<i32>,
}

impl BasisSet {
    pub fn monomials(center: Complex64, scale: f64, max_degree: usize) -> Self {
        BasisSet {
            kind: BasisKind::Monomials { max_degree },
            center,
            outer_scale: scale,
            inner_scale: scale,
            exponents: (0..=max_degree as i32).collect(),
        }
    }

    pub fn laurent_no_inverse(center: Complex64, inner: f64, outer: f64, order: usize) -> Self {
        let m = order as i32;
        BasisSet {
            kind: BasisKind::LaurentNoInverse { min_degree: -m, max_degree: order },
            center,
            outer_scale: outer,
            inner_scale: inner,
            exponents: (-m..=m).filter(|&e| e != -1).collect(),
        }
    }

    pub fn laurent(center: Complex64, inner: f64, outer: f64, order: usize) -> Self {
        let m = order as i32;
        BasisSet {
            kind: BasisKind::Laurent { min_degree: -m, max_degree: order },
            center,
            outer_scale: outer,
            inner_scale: inner,
            exponents: (-m..=m).collect(),
        }
    }

    pub fn kind(&self) -> BasisKind {
        self.kind
    }

    pub fn center(&self) -> Complex64 {
        self.center
    }

    pub fn exponents(&self) -> &[i32] {
        &self.exponents
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn admits_primitives(&self) -> bool {
        !self.exponents.contains(&-1)
    }

    pub fn max_abs_exponent(&self) -> usize {
        self.exponents.iter().map(|e| e.unsigned_abs() as usize).max().unwrap_or(0)
    }

    fn scale_of(&self, e: i32) -> f64 {
        if e >= 0 {
            self.outer_scale
        } else {
            self.inner_scale
        }
    }

    /// Calls `visit(j, g_j^{(d)}(z))` for every element.
    pub fn for_each_value(&self, z: Complex64, d: usize, mut visit: impl FnMut(usize, Complex64)) {
        let shifted = z - self.center;
        let first_nonneg = self.exponents.iter().position(|&e| e >= 0).unwrap_or(self.len());

        // non-negative exponents are contiguous 0..=max
        let w = shifted / self.outer_scale;
        let inv_scale_d = self.outer_scale.powi(-(d as i32));
        let mut power = Complex64::new(1.0, 0.0);
        for (idx, &e) in self.exponents.iter().enumerate().skip(first_nonneg) {
            let e = e as usize;
            if e < d {
                visit(idx, Complex64::new(0.0, 0.0));
            } else {
                visit(idx, power * (falling(e as f64, d) * inv_scale_d));
                power *= w;
            }
        }

        // negative exponents, walked from the top downwards
        if first_nonneg > 0 {
            let v = self.inner_scale / shifted;
            let inv_scale_d = self.inner_scale.powi(-(d as i32));
            let top = self.exponents[first_nonneg - 1];
            // u^{e-d} = v^{d-e}
            let mut power = v.powi((d as i32) - top);
            for idx in (0..first_nonneg).rev() {
                let e = self.exponents[idx];
                visit(idx, power * (falling(e as f64, d) * inv_scale_d));
                power *= v;
            }
        }
    }

    /// `g_j^{(d)}(z)` for every element, written into `out`.
    pub fn eval_into(&self, z: Complex64, d: usize, out: &mut [Complex64]) {
        assert_eq!(out.len(), self.len());
        self.for_each_value(z, d, |j, v| out[j] = v);
    }

    /// `Σ_j γ_j g_j(z)`.
    pub fn eval_combination(&self, gamma: &[Complex64], z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        self.for_each_value(z, 0, |j, v| acc += gamma[j] * v);
        acc
    }

    pub fn eval(&self, z: Complex64, d: usize) -> Vec<Complex64> {
        let mut out = vec![Complex64::new(0.0, 0.0); self.len()];
        self.eval_into(z, d, &mut out);
        out
    }

    /// Closed-form primitives `P_j` with `P_j' = g_j`.
    ///
    /// # Panics
    /// If the family contains the exponent `-1`.
    pub fn eval_primitives(&self, z: Complex64) -> Vec<Complex64> {
        assert!(self.admits_primitives(), "z^-1 has no primitive on a multiply connected domain");
        let shifted = z - self.center;
        self.exponents
            .iter()
            .map(|&e| {
                let s = self.scale_of(e);
                (shifted / s).powi(e + 1) * (s / (e as f64 + 1.0))
            })
            .collect()
    }
}

/// `x (x-1) … (x-d+1)`
fn falling(x: f64, d: usize) -> f64 {
    (0..d).fold(1.0, |acc, k| acc * (x - k as f64))
}

/// Default family for a domain: monomials for discs and sampled regions,
/// Laurent powers without `z^-1` for annuli.
pub fn generate_basis(domain: &Domain, order: usize) -> Result<BasisSet> {
    if order == 0 {
        return Err(KernelError::InvalidOrder("truncation order must be at least 1".into()));
    }
    Ok(match domain {
        Domain::Disc { center, radius } => BasisSet::monomials(*center, *radius, order),
        Domain::Annulus { center, inner, outer } => BasisSet::laurent_no_inverse(*center, *inner, *outer, order),
        Domain::Sampled(_) => BasisSet::monomials(domain.center(), domain.outer_radius(), order),
    })
}

/// `G_jk = ∫ g_j conj(g_k) μ dA` on the nodes of `rule`.
pub fn gram_matrix(basis: &BasisSet, weight: &Weight, rule: &QuadratureRule) -> Result<DMatrix<Complex64>> {
    let n = basis.len();
    let scaled: Vec<Result<Vec<Complex64>>> = rule
        .nodes
        .par_iter()
        .zip(rule.weights.par_iter())
        .map(|(&z, &w)| {
            let mu = weight.eval(z)?;
            let factor = (w * mu).sqrt();
            let mut row = basis.eval(z, 0);
            for v in row.iter_mut() {
                *v *= factor;
                if !(v.re.is_finite() && v.im.is_finite()) {
                    return Err(KernelError::NanIntegrand(format!("{z}")));
                }
            }
            Ok(row)
        })
        .collect();
    let table: Vec<Vec<Complex64>> = scaled.into_iter().collect::<Result<_>>()?;

    let rows: Vec<Vec<Complex64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            (0..=j)
                .map(|k| {
                    let mut s = ComplexSum::default();
                    for node in &table {
                        s.add(node[j] * node[k].conj());
                    }
                    s.total()
                })
                .collect()
        })
        .collect();
    let mut g = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for (j, row) in rows.iter().enumerate() {
        for (k, v) in row.iter().enumerate() {
            g[(j, k)] = *v;
            g[(k, j)] = v.conj();
        }
    }
    Ok(g)
}

/// Diagonal Gram for a weight that is radial about the centre of a disc or
/// annulus: distinct powers are orthogonal and each squared norm is a 1-D
/// radial integral `2π ∫ (r/s)^{2e} μ(r) r dr`.
///
/// The radial Gauss–Legendre order is raised to `max|e| + 8` when needed so
/// polynomial integrands stay exact for high truncation orders.
pub fn radial_gram_diagonal(
    basis: &BasisSet,
    weight: &Weight,
    domain: &Domain,
    resolution: &ResolutionSpec,
) -> Option<Result<Vec<f64>>> {
    let (center, r0, r1) = match domain {
        Domain::Disc { center, radius } => (*center, 0.0, *radius),
        Domain::Annulus { center, inner, outer } => (*center, *inner, *outer),
        Domain::Sampled(_) => return None,
    };
    if basis.center() != center || !weight.is_radial_about(center) {
        return None;
    }
    let profile = weight.radial_profile()?;
    let nodes = resolution.radial.max(basis.max_abs_exponent() + 8);
    let (radii, rw) = gauss_legendre_on(nodes, r0, r1);
    let mut mu = Vec::with_capacity(radii.len());
    for r in &radii {
        let m = profile(*r);
        if !(m.is_finite() && m > 0.0) {
            return Some(Err(KernelError::NonpositiveWeight(format!("weight is {m} at radius {r}"))));
        }
        mu.push(m);
    }
    let norms = basis
        .exponents()
        .iter()
        .map(|&e| {
            let s = basis.scale_of(e);
            let mut acc = CompensatedSum::default();
            for ((r, w), m) in radii.iter().zip(&rw).zip(&mu) {
                acc.add(w * (r / s).powi(2 * e) * m * r);
            }
            2.0 * PI * acc.total()
        })
        .collect();
    Some(Ok(norms))
}

#[derive(Debug, Clone, PartialEq)]
pub enum Gram {
    Dense(DMatrix<Complex64>),
    Diagonal(Vec<f64>),
}

/// Gram assembly with the radial fast path when it applies.
pub fn assemble_gram(basis: &BasisSet, weight: &Weight, domain: &Domain, resolution: &ResolutionSpec) -> Result<Gram> {
    if let Some(diag) = radial_gram_diagonal(basis, weight, domain, resolution) {
        return diag.map(Gram::Diagonal);
    }
    let rule = crate::quadrature::area_quadrature(domain, resolution);
    gram_matrix(basis, weight, &rule).map(Gram::Dense)
}

#[derive(Debug, Clone, PartialEq)]
enum Coefficients {
    Diagonal(Vec<f64>),
    /// Lower triangular; entries above the diagonal are zero.
    Lower(DMatrix<Complex64>),
}

/// `φ_i = Σ_j C_ij g_j`, orthonormal in the weighted inner product.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthonormalBasis {
    basis: BasisSet,
    coefficients: Coefficients,
    rcond: f64,
    jitter: f64,
}

impl OrthonormalBasis {
    /// Wraps an arbitrary lower-triangular coefficient matrix without
    /// checking orthonormality.
    pub fn from_coefficients(basis: BasisSet, coefficients: DMatrix<Complex64>) -> Self {
        assert_eq!(coefficients.nrows(), basis.len());
        assert_eq!(coefficients.ncols(), basis.len());
        OrthonormalBasis { basis, coefficients: Coefficients::Lower(coefficients.lower_triangle()), rcond: f64::NAN, jitter: 0.0 }
    }

    pub fn from_gram(basis: BasisSet, gram: &Gram) -> Result<Self> {
        match gram {
            Gram::Dense(g) => orthonormalize(&basis, g),
            Gram::Diagonal(norms) => orthonormalize_diagonal(basis, norms),
        }
    }

    pub fn basis(&self) -> &BasisSet {
        &self.basis
    }

    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }

    /// Reciprocal 1-norm condition number of the Jacobi-equilibrated Gram.
    pub fn gram_condition_estimate(&self) -> f64 {
        self.rcond
    }

    pub fn jitter(&self) -> f64 {
        self.jitter
    }

    pub fn truncation_order(&self) -> usize {
        self.basis.max_abs_exponent()
    }

    pub fn is_diagonal(&self) -> bool {
        matches!(self.coefficients, Coefficients::Diagonal(_))
    }

    pub fn coefficient_matrix(&self) -> DMatrix<Complex64> {
        match &self.coefficients {
            Coefficients::Diagonal(d) => {
                DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(d.len(), d.iter().map(|v| Complex64::new(*v, 0.0))))
            }
            Coefficients::Lower(c) => c.clone(),
        }
    }

    /// `(φ_1^{(d)}(z), …, φ_N^{(d)}(z))`, from exact derivatives of the raw
    /// family.
    pub fn eval_basis_derivatives(&self, z: Complex64, d: usize) -> Vec<Complex64> {
        let raw = self.basis.eval(z, d);
        self.apply(&raw)
    }

    pub fn eval_primitives(&self, z: Complex64) -> Vec<Complex64> {
        let raw = self.basis.eval_primitives(z);
        self.apply(&raw)
    }

    fn apply(&self, raw: &[Complex64]) -> Vec<Complex64> {
        match &self.coefficients {
            Coefficients::Diagonal(d) => raw.iter().zip(d).map(|(g, c)| g * *c).collect(),
            Coefficients::Lower(c) => (0..raw.len())
                .map(|i| (0..=i).map(|j| c[(i, j)] * raw[j]).sum())
                .collect(),
        }
    }

    /// Raw-family coefficients `γ_j = Σ_i β_i C_ij` of `Σ_i β_i φ_i`.
    pub fn pull_back(&self, beta: &[Complex64]) -> Vec<Complex64> {
        match &self.coefficients {
            Coefficients::Diagonal(d) => beta.iter().zip(d).map(|(b, c)| b * *c).collect(),
            Coefficients::Lower(c) => {
                let n = beta.len();
                (0..n).map(|j| (j..n).map(|i| beta[i] * c[(i, j)]).sum()).collect()
            }
        }
    }
}

fn orthonormalize_diagonal(basis: BasisSet, norms: &[f64]) -> Result<OrthonormalBasis> {
    if norms.len() != basis.len() {
        return Err(KernelError::InvalidOrder("Gram dimension does not match the basis".into()));
    }
    if let Some(bad) = norms.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(KernelError::IllConditioned { rcond: if bad.is_finite() { 0.0 } else { f64::NAN } });
    }
    Ok(OrthonormalBasis {
        basis,
        coefficients: Coefficients::Diagonal(norms.iter().map(|v| v.sqrt().recip()).collect()),
        rcond: 1.0,
        jitter: 0.0,
    })
}

/// Whitens `G = L Lᴴ` into `C = L⁻¹`, lower triangular with positive real
/// diagonal.
///
/// The Gram is symmetrized and Jacobi-equilibrated first; if the Cholesky
/// factorization still fails, diagonal jitter of `10⁻¹⁶, 10⁻¹⁵, 10⁻¹⁴` times
/// the trace is tried in turn and the amount used is recorded.
pub fn orthonormalize(basis: &BasisSet, gram: &DMatrix<Complex64>) -> Result<OrthonormalBasis> {
    let n = basis.len();
    if gram.nrows() != n || gram.ncols() != n {
        return Err(KernelError::InvalidOrder(format!(
            "Gram is {}x{} but the basis has {n} elements",
            gram.nrows(),
            gram.ncols()
        )));
    }
    let hermitian = (gram + gram.adjoint()) * Complex64::new(0.5, 0.0);
    let mut scale = Vec::with_capacity(n);
    for j in 0..n {
        let d = hermitian[(j, j)].re;
        if !(d.is_finite() && d > 0.0) {
            return Err(KernelError::IllConditioned { rcond: 0.0 });
        }
        scale.push(d.sqrt().recip());
    }
    let equilibrated = DMatrix::from_fn(n, n, |i, j| hermitian[(i, j)] * (scale[i] * scale[j]));
    let trace = n as f64;

    let mut factor = None;
    let mut jitter_used = 0.0;
    for jitter in [0.0, 1e-16, 1e-15, MAX_JITTER] {
        let mut trial = equilibrated.clone();
        for j in 0..n {
            trial[(j, j)] += Complex64::new(jitter * trace, 0.0);
        }
        if let Some(l) = hermitian_cholesky(&trial) {
            factor = Some(l);
            jitter_used = jitter * trace;
            break;
        }
    }
    let Some(l) = factor else {
        return Err(KernelError::IllConditioned { rcond: 0.0 });
    };

    let identity = DMatrix::<Complex64>::identity(n, n);
    let l_inv = l
        .solve_lower_triangular(&identity)
        .ok_or(KernelError::IllConditioned { rcond: 0.0 })?;
    let inverse = l_inv.adjoint() * &l_inv;
    let rcond = (one_norm(&equilibrated) * one_norm(&inverse)).recip();
    if !(rcond >= RCOND_FLOOR) {
        return Err(KernelError::IllConditioned { rcond });
    }
    let mut c = l_inv;
    for j in 0..n {
        for i in 0..n {
            c[(i, j)] *= scale[j];
        }
    }
    Ok(OrthonormalBasis { basis: basis.clone(), coefficients: Coefficients::Lower(c.lower_triangle()), rcond, jitter: jitter_used })
}

/// Lower factor of a Hermitian positive-definite matrix, reading only the
/// lower triangle. `None` on a non-positive pivot (nalgebra's complex
/// Cholesky takes complex square roots of negative pivots instead).
fn hermitian_cholesky(a: &DMatrix<Complex64>) -> Option<DMatrix<Complex64>> {
    let n = a.nrows();
    let mut l = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for j in 0..n {
        let mut d = a[(j, j)].re;
        for k in 0..j {
            d -= l[(j, k)].norm_sqr();
        }
        if !(d.is_finite() && d > 0.0) {
            return None;
        }
        let djj = d.sqrt();
        l[(j, j)] = Complex64::new(djj, 0.0);
        for i in (j + 1)..n {
            let mut v = a[(i, j)];
            for k in 0..j {
                v -= l[(i, k)] * l[(j, k)].conj();
            }
            l[(i, j)] = v / djj;
        }
    }
    Some(l)
}

fn one_norm(m: &DMatrix<Complex64>) -> f64 {
    m.column_iter().map(|col| col.iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
}

/// `max_{i,j} |⟨φ_i, φ_j⟩_μ − δ_ij|` re-measured on `rule`.
pub fn orthonormality_defect(onb: &OrthonormalBasis, weight: &Weight, rule: &QuadratureRule) -> Result<f64> {
    let g = gram_matrix(onb.basis(), weight, rule)?;
    let c = onb.coefficient_matrix();
    let measured = &c * g * c.adjoint();
    let n = onb.len();
    let mut worst: f64 = 0.0;
    for i in 0..n {
        for j in 0..n {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((measured[(i, j)] - Complex64::new(target, 0.0)).norm());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::area_quadrature;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn generated_families() {
        let b = generate_basis(&Domain::unit_disc(), 3).unwrap();
        assert_eq!(b.exponents(), &[0, 1, 2, 3]);
        let a = Domain::annulus(c(0.0, 0.0), 0.3, 1.0).unwrap();
        let b = generate_basis(&a, 2).unwrap();
        assert_eq!(b.exponents(), &[-2, 0, 1, 2]);
        assert!(b.admits_primitives());
        assert_eq!(generate_basis(&a, 0).unwrap_err().code(), "INVALID_ORDER");
    }

    #[test]
    fn raw_derivatives_are_exact() {
        let b = BasisSet::laurent_no_inverse(c(0.1, 0.0), 0.3, 1.0, 4);
        let z = c(0.45, 0.31);
        for d in 0..4 {
            let vals = b.eval(z, d);
            for (v, &e) in vals.iter().zip(b.exponents()) {
                let s = if e >= 0 { 1.0 } else { 0.3 };
                let u = (z - c(0.1, 0.0)) / s;
                let expected = if e >= 0 && (e as usize) < d {
                    c(0.0, 0.0)
                } else {
                    u.powi(e - d as i32) * falling(e as f64, d) / s.powi(d as i32)
                };
                assert!((v - expected).norm() <= 1e-12 * expected.norm().max(1.0), "e={e} d={d}");
            }
        }
    }

    #[test]
    fn primitives_differentiate_back() {
        let b = BasisSet::laurent_no_inverse(c(0.0, 0.0), 0.3, 1.0, 3);
        let z = c(0.5, -0.2);
        let h = 1e-5;
        let plus = b.eval_primitives(z + h);
        let minus = b.eval_primitives(z - h);
        let g = b.eval(z, 0);
        for j in 0..b.len() {
            let fd = (plus[j] - minus[j]) / (2.0 * h);
            assert!((fd - g[j]).norm() < 1e-8);
        }
    }

    #[test]
    fn disc_gram_two_elements() {
        let b = BasisSet::monomials(c(0.0, 0.0), 1.0, 1);
        let rule = area_quadrature(&Domain::unit_disc(), &ResolutionSpec::default());
        let g = gram_matrix(&b, &Weight::Constant(1.0), &rule).unwrap();
        assert!((g[(0, 0)].re - PI).abs() < 1e-12);
        assert!((g[(1, 1)].re - PI / 2.0).abs() < 1e-12);
        assert!(g[(0, 1)].norm() < 1e-14);
    }

    #[test]
    fn radial_diagonal_matches_two_dimensional_gram() {
        let d = Domain::annulus(c(0.0, 0.0), 0.3, 1.0).unwrap();
        let b = generate_basis(&d, 4).unwrap();
        let res = ResolutionSpec::default();
        let diag = radial_gram_diagonal(&b, &Weight::Constant(1.0), &d, &res).unwrap().unwrap();
        let rule = area_quadrature(&d, &res);
        let g = gram_matrix(&b, &Weight::Constant(1.0), &rule).unwrap();
        for j in 0..b.len() {
            assert!((g[(j, j)].re - diag[j]).abs() < 1e-12 * diag[j]);
            for k in 0..b.len() {
                if j != k {
                    assert!(g[(j, k)].norm() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn whitening_of_diagonal_gram() {
        let b = BasisSet::monomials(c(0.0, 0.0), 1.0, 1);
        let g = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![c(PI, 0.0), c(PI / 2.0, 0.0)]));
        let onb = orthonormalize(&b, &g).unwrap();
        let cm = onb.coefficient_matrix();
        assert!((cm[(0, 0)].re - PI.sqrt().recip()).abs() < 1e-15);
        assert!((cm[(1, 1)].re - (2.0 / PI).sqrt()).abs() < 1e-15);
        assert!((onb.gram_condition_estimate() - 1.0).abs() < 1e-14);
        assert_eq!(onb.jitter(), 0.0);
    }

    #[test]
    fn identity_gram_gives_identity() {
        let b = BasisSet::monomials(c(0.0, 0.0), 1.0, 3);
        let onb = orthonormalize(&b, &DMatrix::identity(4, 4)).unwrap();
        assert_eq!(onb.coefficient_matrix(), DMatrix::identity(4, 4));
    }

    #[test]
    fn indefinite_gram_is_rejected() {
        let b = BasisSet::monomials(c(0.0, 0.0), 1.0, 1);
        // rotation of diag(1, -1e-3)
        let (cs, sn) = (0.6_f64, 0.8_f64);
        let lam = [1.0, -1e-3];
        let g = DMatrix::from_fn(2, 2, |i, j| {
            let q = [[cs, -sn], [sn, cs]];
            c(q[i][0] * lam[0] * q[j][0] + q[i][1] * lam[1] * q[j][1], 0.0)
        });
        assert_eq!(orthonormalize(&b, &g).unwrap_err().code(), "ILL_CONDITIONED");
    }

    #[test]
    fn coefficient_matrix_is_lower_triangular_with_positive_diagonal() {
        let d = Domain::disc(c(0.2, 0.1), 0.7).unwrap();
        let b = generate_basis(&d, 6).unwrap();
        let rule = area_quadrature(&d, &ResolutionSpec::default());
        // radial about the origin, not about the disc centre: full Gram
        let g = gram_matrix(&b, &Weight::RadialPower { p: 1.0 }, &rule).unwrap();
        let onb = orthonormalize(&b, &g).unwrap();
        let cm = onb.coefficient_matrix();
        for i in 0..b.len() {
            assert!(cm[(i, i)].re > 0.0 && cm[(i, i)].im == 0.0);
            for j in (i + 1)..b.len() {
                assert_eq!(cm[(i, j)], c(0.0, 0.0));
            }
        }
        assert!(orthonormality_defect(&onb, &Weight::RadialPower { p: 1.0 }, &rule).unwrap() < 1e-10);
    }

    #[test]
    fn pull_back_matches_explicit_sum() {
        let d = Domain::disc(c(0.2, 0.1), 0.7).unwrap();
        let b = generate_basis(&d, 5).unwrap();
        let rule = area_quadrature(&d, &ResolutionSpec::default());
        let g = gram_matrix(&b, &Weight::RadialPower { p: 0.5 }, &rule).unwrap();
        let onb = orthonormalize(&b, &g).unwrap();
        let beta: Vec<Complex64> = (0..b.len()).map(|i| c(i as f64 * 0.3 - 0.5, 0.1 * i as f64)).collect();
        let gamma = onb.pull_back(&beta);
        let z = c(0.3, -0.1);
        let phi = onb.eval_basis_derivatives(z, 0);
        let direct: Complex64 = beta.iter().zip(&phi).map(|(a, b)| a * b).sum();
        let via_raw: Complex64 = gamma.iter().zip(b.eval(z, 0)).map(|(a, b)| a * b).sum();
        assert!((direct - via_raw).norm() < 1e-12);
    }
}
