//! Exact reference values: unit-disc automorphisms and kernels, scaled
//! discs, the annulus series, and a brute-force finite-dimensional
//! realization of the reproducing property that does not use the
//! determinant formula.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::basis::{assemble_gram, generate_basis, BasisSet, Gram};
use crate::domain::Domain;
use crate::error::{KernelError, Result};
use crate::jet::factorial;
use crate::quadrature::{area_quadrature, integrate_area, ResolutionSpec};
use crate::testfn::{Polynomial, TestFunction};
use crate::weight::Weight;

/// Terms `|k| <= ANNULUS_TERMS` of the annulus series are summed.
pub const ANNULUS_TERMS: i32 = 60;

fn check_in_disc(what: &str, z: Complex64, radius: f64) -> Result<()> {
    if z.norm() < radius {
        Ok(())
    } else {
        Err(KernelError::OutOfDisc(format!("|{what}| = {} is not below {radius}", z.norm())))
    }
}

/// `φ_ζ(z) = (ζ - z) / (1 - z ζ̄)`, an involutive automorphism of the unit
/// disc swapping `0` and `ζ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobiusMap {
    zeta: Complex64,
}

impl MobiusMap {
    pub fn new(zeta: Complex64) -> Result<Self> {
        check_in_disc("ζ", zeta, 1.0)?;
        Ok(MobiusMap { zeta })
    }

    pub fn apply(&self, z: Complex64) -> Result<Complex64> {
        check_in_disc("z", z, 1.0)?;
        Ok((self.zeta - z) / (1.0 - z * self.zeta.conj()))
    }

    /// `φ_ζ'(z) = (|ζ|² - 1) / (1 - ζ̄ z)²`
    pub fn derivative(&self, z: Complex64) -> Result<Complex64> {
        check_in_disc("z", z, 1.0)?;
        let d = 1.0 - self.zeta.conj() * z;
        Ok(Complex64::new(self.zeta.norm_sqr() - 1.0, 0.0) / (d * d))
    }
}

pub fn mobius(zeta: Complex64, z: Complex64) -> Result<Complex64> {
    MobiusMap::new(zeta)?.apply(z)
}

/// `K̃_n(ξ, ζ) = (n!/π) φ_ζ(ξ)^{n-1} φ_ζ'(ξ) / conj(φ_ζ'(0)^n)` on the unit disc.
pub fn disc_kn(xi: Complex64, zeta: Complex64, n: usize) -> Result<Complex64> {
    check_n(n)?;
    let phi = MobiusMap::new(zeta)?;
    let num = phi.apply(xi)?.powi(n as i32 - 1) * phi.derivative(xi)?;
    let den = phi.derivative(Complex64::new(0.0, 0.0))?.powi(n as i32).conj();
    Ok(num / den * (factorial(n) / PI))
}

/// `M_n(ξ, ζ) = ((n-1)!/π) (ξ - ζ)^n / ((1 - ζ̄ξ)^n (1 - |ζ|²)^n)` on the unit disc.
pub fn disc_mn(xi: Complex64, zeta: Complex64, n: usize) -> Result<Complex64> {
    scaled_disc_mn(1.0, xi, zeta, n)
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(KernelError::InvalidOrder("kernel order n must be at least 1".into()));
    }
    Ok(())
}

fn check_scaled(radius: f64, xi: Complex64, zeta: Complex64, n: usize) -> Result<()> {
    check_n(n)?;
    if !(radius.is_finite() && radius > 0.0) {
        return Err(KernelError::InvalidGeometry(format!("radius must be positive, got {radius}")));
    }
    check_in_disc("ξ", xi, radius)?;
    check_in_disc("ζ", zeta, radius)
}

/// `M_n` of the disc `|z| < ρ`, by the substitution `z ↦ z/ρ`.
pub fn scaled_disc_mn(radius: f64, xi: Complex64, zeta: Complex64, n: usize) -> Result<Complex64> {
    check_scaled(radius, xi, zeta, n)?;
    let r2 = radius * radius;
    let ni = n as i32;
    let a = (xi - zeta).powi(ni);
    let b = (r2 - zeta.conj() * xi).powi(ni);
    let c = (r2 - zeta.norm_sqr()).powi(ni);
    Ok(a / (b * c) * (factorial(n - 1) / PI * r2.powi(ni)))
}

/// `∂_ξ` of [`scaled_disc_mn`]:
/// `(n!/π) ρ^{2n} (ξ-ζ)^{n-1} / ((ρ² - ζ̄ξ)^{n+1} (ρ² - |ζ|²)^{n-1})`.
pub fn scaled_disc_kn(radius: f64, xi: Complex64, zeta: Complex64, n: usize) -> Result<Complex64> {
    check_scaled(radius, xi, zeta, n)?;
    let r2 = radius * radius;
    let ni = n as i32;
    let a = (xi - zeta).powi(ni - 1);
    let b = (r2 - zeta.conj() * xi).powi(ni + 1);
    let c = (r2 - zeta.norm_sqr()).powi(ni - 1);
    Ok(a / b / c * (factorial(n) / PI * r2.powi(ni)))
}

/// `∂_ζ` of [`scaled_disc_mn`]:
/// `-(n!/π) ρ^{2n} (ξ-ζ)^{n-1} / ((ρ² - ζ̄ξ)^{n-1} (ρ² - |ζ|²)^{n+1})`.
pub fn scaled_disc_dm_dzeta(radius: f64, xi: Complex64, zeta: Complex64, n: usize) -> Result<Complex64> {
    check_scaled(radius, xi, zeta, n)?;
    let r2 = radius * radius;
    let ni = n as i32;
    let a = (xi - zeta).powi(ni - 1);
    let b = (r2 - zeta.conj() * xi).powi(ni - 1);
    let c = (r2 - zeta.norm_sqr()).powi(ni + 1);
    Ok(-a / b / c * (factorial(n) / PI * r2.powi(ni)))
}

/// `∂_ζ̄` of [`scaled_disc_mn`]:
/// `(n!/π) ρ^{2n} (ξ-ζ)^n (ρ²(ξ+ζ) - 2|ζ|²ξ) / ((ρ² - ζ̄ξ)^{n+1} (ρ² - |ζ|²)^{n+1})`.
pub fn scaled_disc_dm_dzetabar(radius: f64, xi: Complex64, zeta: Complex64, n: usize) -> Result<Complex64> {
    check_scaled(radius, xi, zeta, n)?;
    let r2 = radius * radius;
    let ni = n as i32;
    let a = (xi - zeta).powi(ni) * ((xi + zeta) * r2 - xi * (2.0 * zeta.norm_sqr()));
    let b = (r2 - zeta.conj() * xi).powi(ni + 1);
    let c = (r2 - zeta.norm_sqr()).powi(ni + 1);
    Ok(a / b / c * (factorial(n) / PI * r2.powi(ni)))
}

/// `(g^{(n)}(0), (n!/π) ∫_D g'(ξ) conj(ξ)^{n-1} dA)` with the integral on the
/// unit-disc area rule.
pub fn disc_moment_identity(g: &Polynomial, n: usize, resolution: &ResolutionSpec) -> Result<(Complex64, Complex64)> {
    check_n(n)?;
    let zero = Complex64::new(0.0, 0.0);
    for k in 0..n {
        let v = g.derivative(zero, k);
        if !(v.norm() < crate::kernel::VANISHING_TOL) {
            return Err(KernelError::BadTestFunction(format!("g^({k})(0) = {v} does not vanish")));
        }
    }
    let rule = area_quadrature(&Domain::unit_disc(), resolution);
    let integral = integrate_area(&rule, |xi| g.derivative(xi, 1) * xi.conj().powi(n as i32 - 1))?;
    Ok((g.derivative(zero, n), integral * (factorial(n) / PI)))
}

/// A truncated series with a bound on the omitted terms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub tail_bound: f64,
}

fn check_annulus(r: f64, z: Complex64, zeta: Complex64) -> Result<()> {
    if !(r > 0.0 && r < 1.0) {
        return Err(KernelError::OutOfAnnulus(format!("inner radius {r} is not in (0, 1)")));
    }
    for (name, p) in [("z", z), ("ζ", zeta)] {
        if !(p.norm() > r && p.norm() < 1.0) {
            return Err(KernelError::OutOfAnnulus(format!("|{name}| = {} is not in ({r}, 1)", p.norm())));
        }
    }
    Ok(())
}

/// `Σ_{k>=K} (k+1) q^k` in closed form.
fn weighted_geometric_tail(q: f64, first: i32) -> f64 {
    let k = first as f64;
    q.powi(first) * ((k + 1.0) / (1.0 - q) + q / ((1.0 - q) * (1.0 - q)))
}

/// Tail of `Σ_{|k|>60}` of the annulus series with general term
/// `t_k (z ζ̄)^k` where `|t_k| <= (|k|+1)/(π |1 - r^{2k+2}|)`.
fn annulus_tail(r: f64, z: Complex64, zeta: Complex64) -> f64 {
    let p = z.norm() * zeta.norm();
    let first = ANNULUS_TERMS + 1;
    let outer = weighted_geometric_tail(p, first) / (PI * (1.0 - r.powi(2 * first + 2)));
    // k = -m: magnitude (m-1) r^{2m-2} p^{-m} / (π (1 - r^{2m-2}))
    let u = r * r / p;
    let inner = weighted_geometric_tail(u, first) / (r * r * PI * (1.0 - r.powi(2 * first - 2)));
    outer + inner
}

/// Reduced Bergman kernel of `{r < |z| < 1}` with `μ ≡ 1`:
/// `Σ_{k≠-1} z^k conj(ζ)^k (k+1) / (π (1 - r^{2k+2}))`.
pub fn annulus_reduced_kernel(r: f64, z: Complex64, zeta: Complex64) -> Result<SeriesValue> {
    check_annulus(r, z, zeta)?;
    let w = z * zeta.conj();
    let mut value = Complex64::new(0.0, 0.0);
    for k in -ANNULUS_TERMS..=ANNULUS_TERMS {
        if k == -1 {
            continue;
        }
        let norm2 = PI * (1.0 - r.powi(2 * k + 2)) / (k as f64 + 1.0);
        value += w.powi(k) / norm2;
    }
    Ok(SeriesValue { value, tail_bound: annulus_tail(r, z, zeta) })
}

/// `M_1(z, ζ) = Σ_{k≠-1} (z^{k+1} - ζ^{k+1}) conj(ζ)^k / (π (1 - r^{2k+2}))`
/// on the annulus `{r < |z| < 1}`.
pub fn annulus_reduced_m1(r: f64, z: Complex64, zeta: Complex64) -> Result<SeriesValue> {
    check_annulus(r, z, zeta)?;
    let zb = zeta.conj();
    let mut value = Complex64::new(0.0, 0.0);
    for k in -ANNULUS_TERMS..=ANNULUS_TERMS {
        if k == -1 {
            continue;
        }
        let den = PI * (1.0 - r.powi(2 * k + 2));
        value += (z.powi(k + 1) - zeta.powi(k + 1)) * zb.powi(k) / den;
    }
    // |z^{k+1} - ζ^{k+1}| |ζ|^k <= |z| |zζ|^k + |ζ| |ζ|^{2k}, and each of
    // those series is dominated by the kernel tail at the same argument
    let tail_bound = z.norm() * annulus_tail(r, z, zeta) + zeta.norm() * annulus_tail(r, zeta, zeta);
    Ok(SeriesValue { value, tail_bound })
}

/// `K(ζ, ζ) - K̃(ζ, ζ) = |ζ|^{-2} / (2π ln(1/r))`, the diagonal of the one
/// term the reduced space omits.
pub fn annulus_bergman_gap(r: f64, zeta: Complex64) -> Result<f64> {
    check_annulus(r, zeta, zeta)?;
    Ok(1.0 / (zeta.norm_sqr() * 2.0 * PI * (1.0 / r).ln()))
}

/// Minimizer realization of `M_n(·, ζ)` inside the span of primitives of a
/// finite basis: `F^{(n)}(ζ) = ⟨F, M⟩` for every `F` in the span with
/// `F(ζ) = … = F^{(n-1)}(ζ) = 0`.
#[derive(Debug, Clone)]
pub struct BruteForceM {
    basis: BasisSet,
    zeta: Complex64,
    /// Coefficients of `M'` in the raw basis.
    coeffs: Vec<Complex64>,
    primitive_at_zeta: Complex64,
}

impl BruteForceM {
    pub fn value(&self, z: Complex64) -> Complex64 {
        let p = self.basis.eval_primitives(z);
        let total: Complex64 = self.coeffs.iter().zip(&p).map(|(m, p)| m * p).sum();
        total - self.primitive_at_zeta
    }

    pub fn derivative(&self, z: Complex64) -> Complex64 {
        self.basis.eval_combination(&self.coeffs, z)
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }
}

/// Builds [`BruteForceM`] from the raw basis of `domain` at `order`.
///
/// The vanishing conditions `F^{(k)}(ζ) = 0`, `1 <= k < n`, are linear in the
/// coefficients of `F'`; their null space is taken from a complete QR
/// factorization and the normal equations are solved there.
pub fn brute_force_mn(
    domain: &Domain,
    weight: &Weight,
    zeta: Complex64,
    n: usize,
    order: usize,
    resolution: &ResolutionSpec,
) -> Result<BruteForceM> {
    check_n(n)?;
    if order < n + 2 {
        return Err(KernelError::InvalidOrder(format!("order {order} is below n + 2 = {}", n + 2)));
    }
    if !domain.contains(zeta) {
        return Err(KernelError::InvalidGeometry(format!("ζ = {zeta} is not in the domain")));
    }
    let basis = generate_basis(domain, order)?;
    let len = basis.len();
    let gram = match assemble_gram(&basis, weight, domain, resolution)? {
        Gram::Dense(g) => g,
        Gram::Diagonal(d) => DMatrix::from_fn(len, len, |i, j| if i == j { Complex64::new(d[i], 0.0) } else { Complex64::new(0.0, 0.0) }),
    };

    // constraint rows: g_j^{(k-1)}(ζ), k = 1..n-1
    let q = if n == 1 {
        DMatrix::identity(len, len)
    } else {
        let a = DMatrix::from_fn(n - 1, len, |k, j| basis.eval(zeta, k)[j]);
        null_space(&a)?
    };
    let e = nalgebra::DVector::from_vec(basis.eval(zeta, n - 1));
    let reduced = q.transpose() * &gram * q.map(|v| v.conj());
    let rhs = q.transpose() * e;
    let y = reduced
        .clone()
        .lu()
        .solve(&rhs)
        .ok_or(KernelError::IllConditioned { rcond: 0.0 })?;
    let d = y.map(|v| v.conj());
    let m = &q * d;
    let coeffs: Vec<Complex64> = m.iter().copied().collect();
    let p0 = basis.eval_primitives(zeta);
    let primitive_at_zeta = coeffs.iter().zip(&p0).map(|(a, b)| a * b).sum();
    Ok(BruteForceM { basis, zeta, coeffs, primitive_at_zeta })
}

/// Orthonormal columns spanning `{a : A a = 0}` for a full-row-rank `A`.
fn null_space(a: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let (rows, cols) = a.shape();
    // {a : A a = 0} is the orthogonal complement of the columns of Aᴴ
    let qr = a.adjoint().qr();
    let r = qr.r();
    let largest = (0..rows).map(|k| r[(k, k)].norm()).fold(0.0, f64::max);
    for k in 0..rows {
        if !(r[(k, k)].norm() > 1e-12 * largest) || largest == 0.0 {
            return Err(KernelError::ConstraintRank(format!("constraint {k} is dependent on the others")));
        }
    }
    let mut qh = DMatrix::<Complex64>::identity(cols, cols);
    qr.q_tr_mul(&mut qh);
    let q_full = qh.adjoint();
    Ok(q_full.columns(rows, cols - rows).into_owned())
}
