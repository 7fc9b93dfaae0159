//! Truncated-series evaluation of the weighted reduced Bergman kernel, its
//! higher-order versions built from diagonal jets, the kernel functions `M_n`
//! recovered by path integration, and their mixed `ζ`/`ζ̄` partials.

use num_complex::Complex64;
use serde::Serialize;

use crate::basis::{assemble_gram, generate_basis, OrthonormalBasis};
use crate::domain::Domain;
use crate::error::{KernelError, Result};
use crate::jet::Jet2;
use crate::linalg::{determinant, without_column};
use crate::path::{integrate_path, path_build, Path, DEFAULT_PATH_TOL};
use crate::quadrature::{area_quadrature, try_integrate_area, ResolutionSpec};
use crate::testfn::TestFunction;
use crate::weight::Weight;

pub const DEFAULT_ZERO_SET_THRESHOLD: f64 = 1e-10;
/// `J_{n-2}` below this fraction of the product of its diagonal entries is
/// treated as a point of the zero set.
pub const NEAR_ZERO_SET_RATIO: f64 = 1e-12;
/// Vanishing tolerance for test functions in [`KernelEvaluator::reproduce_check`].
pub const VANISHING_TOL: f64 = 1e-8;

/// Default truncation order for a domain family.
pub fn default_order(domain: &Domain) -> usize {
    match domain {
        Domain::Disc { .. } => 40,
        Domain::Annulus { .. } => 24,
        Domain::Sampled(_) => 12,
    }
}

/// Upper limit for [`order_for_points`].
pub const MAX_AUTO_ORDER: usize = 3000;

/// Smallest order `N >= default_order(domain)` for which the series tail
/// `Σ_{k>N} k^{extra+1} q^k` is below `10⁻¹⁵`, where `q` is the worst ratio
/// of the points to the boundary circles of a disc or annulus. Sampled
/// regions keep the default order.
pub fn order_for_points(domain: &Domain, points: &[Complex64], extra: usize) -> usize {
    let base = default_order(domain);
    let q = match domain {
        Domain::Disc { center, radius } => {
            let far = points.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
            (far / radius).powi(2)
        }
        Domain::Annulus { center, inner, outer } => {
            let far = points.iter().map(|p| (p - center).norm()).fold(0.0, f64::max);
            let near = points.iter().map(|p| (p - center).norm()).fold(f64::INFINITY, f64::min);
            (far / outer).powi(2).max((inner / near).powi(2))
        }
        Domain::Sampled(_) => return base,
    };
    if !(q < 1.0) {
        return MAX_AUTO_ORDER;
    }
    let mut n = base;
    while n < MAX_AUTO_ORDER {
        let k = (n + 1) as f64;
        if k.powi(extra as i32 + 1) * q.powi(n as i32 + 1) / (1.0 - q) < 1e-15 {
            break;
        }
        n += 1;
    }
    n
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelOptions {
    pub order: usize,
    pub resolution: ResolutionSpec,
    pub path_tol: f64,
    pub zero_set_threshold: f64,
}

impl KernelOptions {
    pub fn for_domain(domain: &Domain) -> Self {
        KernelOptions {
            order: default_order(domain),
            resolution: ResolutionSpec::default(),
            path_tol: DEFAULT_PATH_TOL,
            zero_set_threshold: DEFAULT_ZERO_SET_THRESHOLD,
        }
    }

    pub fn with_order(mut self, order: usize) -> Self {
        self.order = order;
        self
    }
}

#[derive(Debug, Clone)]
pub struct KernelEvaluator {
    domain: Domain,
    weight: Weight,
    onb: OrthonormalBasis,
    options: KernelOptions,
    /// Largest `K̃(p, p)` over the domain's probe lattice.
    diagonal_scale: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagonalJets {
    pub base_point: Complex64,
    pub order: usize,
    /// `K̃_{jk̄}(ζ, ζ)` for `0 <= j, k <= order`.
    pub matrix: Vec<Vec<Complex64>>,
    /// `J_0, …, J_order` (real parts).
    pub determinants: Vec<f64>,
    /// Largest `|Im J_m| / |J_m|` that was discarded.
    pub max_imaginary_ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelFunctionEval {
    pub value: Complex64,
    pub path: Path,
    pub error_estimate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixedPartialEval {
    pub value: Complex64,
    /// The path-integral part.
    pub integral: Complex64,
    /// The diagonal correction subtracted when `r >= 1`.
    pub diagonal_term: Complex64,
    pub path: Path,
    pub error_estimate: f64,
}

/// `ξ ↦ K̃_n(ξ, ζ)` for fixed `ζ`, collapsed onto the raw basis so one
/// evaluation costs a single pass over the family.
#[derive(Debug, Clone)]
pub struct KernelSection<'a> {
    ke: &'a KernelEvaluator,
    zeta: Complex64,
    n: usize,
    gamma: Vec<Complex64>,
}

impl KernelSection<'_> {
    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn eval(&self, xi: Complex64) -> Complex64 {
        self.ke.onb.basis().eval_combination(&self.gamma, xi)
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn sign(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 {
        return Err(KernelError::InvalidOrder("kernel order n must be at least 1".into()));
    }
    Ok(())
}

impl KernelEvaluator {
    /// Generates the basis, assembles the Gram matrix and whitens it.
    pub fn build(domain: &Domain, weight: &Weight, options: &KernelOptions) -> Result<Self> {
        let basis = generate_basis(domain, options.order)?;
        let gram = assemble_gram(&basis, weight, domain, &options.resolution)?;
        let onb = OrthonormalBasis::from_gram(basis, &gram)?;
        Ok(Self::from_parts(domain.clone(), weight.clone(), onb, options.clone()))
    }

    /// Wraps an already whitened basis.
    pub fn from_parts(domain: Domain, weight: Weight, onb: OrthonormalBasis, options: KernelOptions) -> Self {
        let mut ke = KernelEvaluator { domain, weight, onb, options, diagonal_scale: 0.0 };
        ke.diagonal_scale = ke
            .domain
            .probe_points(9)
            .into_iter()
            .map(|p| ke.reduced_kernel(p, p, 0, 0).re)
            .fold(0.0, f64::max);
        ke
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn weight(&self) -> &Weight {
        &self.weight
    }

    pub fn basis(&self) -> &OrthonormalBasis {
        &self.onb
    }

    pub fn options(&self) -> &KernelOptions {
        &self.options
    }

    pub fn diagonal_scale(&self) -> f64 {
        self.diagonal_scale
    }

    fn check_point(&self, z: Complex64, what: &str) -> Result<()> {
        if self.domain.contains(z) {
            Ok(())
        } else {
            Err(KernelError::InvalidGeometry(format!("{what} = {z} is not in the domain")))
        }
    }

    /// `φ^{(d)}(z)` for `d = 0..=max_d`.
    fn derivative_table(&self, z: Complex64, max_d: usize) -> Vec<Vec<Complex64>> {
        (0..=max_d).map(|d| self.onb.eval_basis_derivatives(z, d)).collect()
    }

    /// `Σ_i φ_i^{(j)}(z) conj(φ_i^{(k)}(ζ))`
    pub fn reduced_kernel(&self, z: Complex64, zeta: Complex64, j: usize, k: usize) -> Complex64 {
        let a = self.onb.eval_basis_derivatives(z, j);
        let b = self.onb.eval_basis_derivatives(zeta, k);
        dot_conj(&a, &b)
    }

    pub fn diagonal_jets(&self, zeta: Complex64, n: usize) -> DiagonalJets {
        let table = self.derivative_table(zeta, n);
        let matrix: Vec<Vec<Complex64>> =
            (0..=n).map(|j| (0..=n).map(|k| dot_conj(&table[j], &table[k])).collect()).collect();
        let unit = Complex64::new(1.0, 0.0);
        let mut determinants = Vec::with_capacity(n + 1);
        let mut max_imaginary_ratio: f64 = 0.0;
        for m in 0..=n {
            let lead: Vec<Vec<Complex64>> = matrix[..=m].iter().map(|row| row[..=m].to_vec()).collect();
            let det = determinant(&lead, &unit);
            if det.norm() > 0.0 {
                max_imaginary_ratio = max_imaginary_ratio.max(det.im.abs() / det.norm());
            }
            determinants.push(det.re);
        }
        DiagonalJets { base_point: zeta, order: n, matrix, determinants, max_imaginary_ratio }
    }

    /// Whether `K̃(ζ, ζ)` is negligible against the largest diagonal value
    /// over the probe lattice.
    pub fn zero_set_probe(&self, zeta: Complex64) -> bool {
        let k = self.reduced_kernel(zeta, zeta, 0, 0).re;
        k <= 0.0 || k < self.options.zero_set_threshold * self.diagonal_scale
    }

    /// Cofactors `c_k` with `K̃_n(ξ, ζ) = Σ_k c_k K̃_{0k̄}(ξ, ζ)`; `c_{n-1} = 1`.
    fn cofactors(&self, zeta: Complex64, n: usize, table: &[Vec<Complex64>]) -> Result<Vec<Complex64>> {
        if n == 1 {
            return Ok(vec![Complex64::new(1.0, 0.0)]);
        }
        let rows: Vec<Vec<Complex64>> =
            (0..n - 1).map(|j| (0..n).map(|k| dot_conj(&table[j], &table[k])).collect()).collect();
        self.guard_zero_set(zeta, n, &rows)?;
        let unit = Complex64::new(1.0, 0.0);
        let minors: Vec<Complex64> = (0..n).map(|k| determinant(&without_column(&rows, k), &unit)).collect();
        let j_prev = minors[n - 1].re;
        Ok(minors.iter().enumerate().map(|(k, m)| m * (sign(n - 1) * sign(k) / j_prev)).collect())
    }

    /// `rows` are the `n - 1` diagonal rows `K̃_{jk̄}(ζ, ζ)`, `k < n`.
    fn guard_zero_set(&self, zeta: Complex64, n: usize, rows: &[Vec<Complex64>]) -> Result<()> {
        if self.zero_set_probe(zeta) {
            return Err(KernelError::NearZeroSet(format!("K(ζ,ζ) is negligible at ζ = {zeta}")));
        }
        let lead: Vec<Vec<Complex64>> = rows.iter().map(|r| r[..n - 1].to_vec()).collect();
        let j_prev = determinant(&lead, &Complex64::new(1.0, 0.0)).re;
        // Hadamard: 0 <= J <= Π diagonal
        let scale: f64 = (0..n - 1).map(|j| rows[j][j].re).product();
        if !(scale > 0.0 && j_prev > NEAR_ZERO_SET_RATIO * scale) {
            return Err(KernelError::NearZeroSet(format!(
                "J_{} = {j_prev:e} against diagonal scale {scale:e} at ζ = {zeta}",
                n - 2
            )));
        }
        Ok(())
    }

    /// `K̃_n(z, ζ)` from the determinant formula, evaluated directly as an
    /// `n × n` determinant.
    pub fn higher_order_kernel(&self, z: Complex64, zeta: Complex64, n: usize) -> Result<Complex64> {
        check_order(n)?;
        let table = self.derivative_table(zeta, n - 1);
        let at_z = self.onb.eval_basis_derivatives(z, 0);
        let first: Vec<Complex64> = (0..n).map(|k| dot_conj(&at_z, &table[k])).collect();
        if n == 1 {
            return Ok(first[0]);
        }
        let lower: Vec<Vec<Complex64>> =
            (0..n - 1).map(|j| (0..n).map(|k| dot_conj(&table[j], &table[k])).collect()).collect();
        self.guard_zero_set(zeta, n, &lower)?;
        let unit = Complex64::new(1.0, 0.0);
        let lead: Vec<Vec<Complex64>> = lower.iter().map(|r| r[..n - 1].to_vec()).collect();
        let j_prev = determinant(&lead, &unit).re;
        let mut full = Vec::with_capacity(n);
        full.push(first);
        full.extend(lower);
        Ok(determinant(&full, &unit) * (sign(n - 1) / j_prev))
    }

    /// Precomputes `ξ ↦ K̃_n(ξ, ζ)`.
    pub fn section(&self, zeta: Complex64, n: usize) -> Result<KernelSection<'_>> {
        check_order(n)?;
        let table = self.derivative_table(zeta, n - 1);
        let c = self.cofactors(zeta, n, &table)?;
        let beta: Vec<Complex64> =
            (0..self.onb.len()).map(|i| (0..n).map(|k| c[k] * table[k][i].conj()).sum()).collect();
        Ok(KernelSection { ke: self, zeta, n, gamma: self.onb.pull_back(&beta) })
    }

    fn resolve_path(&self, zeta: Complex64, z: Complex64, path: Option<&Path>) -> Result<Path> {
        match path {
            Some(p) => {
                if p.start() != zeta || p.end() != z {
                    return Err(KernelError::NoPath(format!("given path does not run from {zeta} to {z}")));
                }
                Path::new(&self.domain, p.vertices().to_vec())
            }
            None if z == zeta => Path::new(&self.domain, vec![zeta]),
            None => path_build(&self.domain, zeta, z, None),
        }
    }

    /// `M_n(z, ζ) = ∫_ζ^z K̃_n(ξ, ζ) dξ`.
    pub fn kernel_function_m(&self, z: Complex64, zeta: Complex64, n: usize, path: Option<&Path>) -> Result<KernelFunctionEval> {
        check_order(n)?;
        self.check_point(zeta, "ζ")?;
        self.check_point(z, "z")?;
        let section = self.section(zeta, n)?;
        let path = self.resolve_path(zeta, z, path)?;
        if z == zeta {
            return Ok(KernelFunctionEval { value: Complex64::new(0.0, 0.0), path, error_estimate: 0.0 });
        }
        let integral = integrate_path(&path, |xi| section.eval(xi), self.options.path_tol)?;
        Ok(KernelFunctionEval { value: integral.value, path, error_estimate: integral.error_estimate })
    }

    /// `∂_ζ^r ∂_ζ̄^s M_n(z, ζ)`.
    ///
    /// The `ζ`-dependence of `K̃_n(ξ, ζ)` is carried exactly: the cofactors of
    /// the determinant formula are expanded as truncated Taylor series in
    /// `(ζ, ζ̄)` whose entries are themselves kernel derivatives on the
    /// diagonal, and the anti-holomorphic first-row factors contribute higher
    /// basis derivatives at `ζ`. For `r >= 1` the moving lower limit of the
    /// integral contributes the diagonal correction
    /// `Σ_{k<r} ∂_ζ^k ∂_ζ̄^s [∂_w^{r-1-k} K̃_n(z, w)]_{z=w=ζ}`.
    pub fn m_mixed_partial(
        &self,
        z: Complex64,
        zeta: Complex64,
        n: usize,
        r: usize,
        s: usize,
        path: Option<&Path>,
    ) -> Result<MixedPartialEval> {
        check_order(n)?;
        if r == 0 && s == 0 {
            let m = self.kernel_function_m(z, zeta, n, path)?;
            return Ok(MixedPartialEval {
                value: m.value,
                integral: m.value,
                diagonal_term: Complex64::new(0.0, 0.0),
                path: m.path,
                error_estimate: m.error_estimate,
            });
        }
        self.check_point(zeta, "ζ")?;
        self.check_point(z, "z")?;
        let table = self.derivative_table(zeta, n + r + s);
        let kd = |a: usize, b: usize| dot_conj(&table[a], &table[b]);
        let cof = self.cofactor_jets(zeta, n, r, s, &table)?;

        let len = self.onb.len();
        let mut beta = vec![Complex64::new(0.0, 0.0); len];
        for (k, ck) in cof.iter().enumerate() {
            for q in 0..=s {
                let weight = ck.partial(r, s - q) * binomial(s, q);
                if weight == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (b, phi) in beta.iter_mut().zip(&table[k + q]) {
                    *b += weight * phi.conj();
                }
            }
        }
        let path = self.resolve_path(zeta, z, path)?;
        let (integral, error_estimate) = if z == zeta || beta.iter().all(|b| *b == Complex64::new(0.0, 0.0)) {
            (Complex64::new(0.0, 0.0), 0.0)
        } else {
            let gamma = self.onb.pull_back(&beta);
            let basis = self.onb.basis();
            let out = integrate_path(&path, |xi| basis.eval_combination(&gamma, xi), self.options.path_tol)?;
            (out.value, out.error_estimate)
        };

        let mut diagonal_term = Complex64::new(0.0, 0.0);
        for kk in 0..r {
            let m = r - 1 - kk;
            for (k, ck) in cof.iter().enumerate() {
                let dc = ck.differentiate_h(m);
                let (dh, da) = dc.degrees();
                let e = Jet2::from_partials(dh, da, |a, b| kd(a, k + b));
                diagonal_term += (&dc * &e).partial(kk, s);
            }
        }
        Ok(MixedPartialEval { value: integral - diagonal_term, integral, diagonal_term, path, error_estimate })
    }

    /// The cofactors as truncated series of degree `(r, s)` in `(ζ, ζ̄)`.
    fn cofactor_jets(&self, zeta: Complex64, n: usize, r: usize, s: usize, table: &[Vec<Complex64>]) -> Result<Vec<Jet2>> {
        if n == 1 {
            return Ok(vec![Jet2::constant(Complex64::new(1.0, 0.0), r, s)]);
        }
        let plain: Vec<Vec<Complex64>> =
            (0..n - 1).map(|j| (0..n).map(|k| dot_conj(&table[j], &table[k])).collect()).collect();
        self.guard_zero_set(zeta, n, &plain)?;
        let rows: Vec<Vec<Jet2>> = (0..n - 1)
            .map(|j| (0..n).map(|k| Jet2::from_partials(r, s, |a, b| dot_conj(&table[j + a], &table[k + b]))).collect())
            .collect();
        let unit = Jet2::constant(Complex64::new(1.0, 0.0), r, s);
        let minors: Vec<Jet2> = (0..n).map(|k| determinant(&without_column(&rows, k), &unit)).collect();
        let inv = minors[n - 1].recip();
        Ok(minors
            .iter()
            .enumerate()
            .map(|(k, m)| (m * &inv).scale(Complex64::new(sign(n - 1) * sign(k), 0.0)))
            .collect())
    }

    /// `|f^{(n)}(ζ) − ∫ f' conj(K̃_n(·, ζ)) μ dA|` on the area rule of the
    /// evaluator's resolution.
    pub fn reproduce_check(&self, f: &dyn TestFunction, zeta: Complex64, n: usize) -> Result<f64> {
        check_order(n)?;
        self.check_point(zeta, "ζ")?;
        for k in 0..n {
            let v = f.derivative(zeta, k);
            if !(v.norm() < VANISHING_TOL) {
                return Err(KernelError::BadTestFunction(format!(
                    "f^({k})(ζ) = {v} does not vanish (tolerance {VANISHING_TOL:e})"
                )));
            }
        }
        let section = self.section(zeta, n)?;
        let rule = area_quadrature(&self.domain, &self.options.resolution);
        let integral = try_integrate_area(&rule, |xi| {
            let mu = self.weight.eval(xi)?;
            Ok(f.derivative(xi, 1) * section.eval(xi).conj() * mu)
        })?;
        Ok((f.derivative(zeta, n) - integral).norm())
    }
}

fn dot_conj(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x * y.conj()).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn disc() -> KernelEvaluator {
        let d = Domain::unit_disc();
        KernelEvaluator::build(&d, &Weight::Constant(1.0), &KernelOptions::for_domain(&d)).unwrap()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn disc_reduced_kernel_values() {
        let ke = disc();
        assert!(close(ke.reduced_kernel(c(0.0, 0.0), c(0.0, 0.0), 0, 0), c(1.0 / PI, 0.0), 1e-14));
        let z = c(0.3, -0.4);
        assert!(close(ke.reduced_kernel(z, c(0.0, 0.0), 0, 1), z * (2.0 / PI), 1e-14));
        assert!(close(ke.reduced_kernel(c(0.5, 0.0), c(0.5, 0.0), 0, 0), c(16.0 / (9.0 * PI), 0.0), 1e-10));
    }

    #[test]
    fn disc_jets_at_origin() {
        let jets = disc().diagonal_jets(c(0.0, 0.0), 1);
        assert!(close(jets.matrix[0][0], c(1.0 / PI, 0.0), 1e-14));
        assert!(close(jets.matrix[1][1], c(2.0 / PI, 0.0), 1e-14));
        assert!(jets.matrix[0][1].norm() < 1e-15);
        assert!((jets.determinants[0] - 1.0 / PI).abs() < 1e-14);
        assert!((jets.determinants[1] - 2.0 / (PI * PI)).abs() < 1e-14);
    }

    #[test]
    fn second_order_kernel_on_disc() {
        let ke = disc();
        let v = ke.higher_order_kernel(c(0.5, 0.0), c(0.0, 0.0), 2).unwrap();
        assert!(close(v, c(1.0 / PI, 0.0), 1e-13));
        assert!(ke.higher_order_kernel(c(0.0, 0.0), c(0.0, 0.0), 2).unwrap().norm() < 1e-15);
    }

    #[test]
    fn section_matches_direct_determinant() {
        let ke = disc();
        let zeta = c(0.2, -0.3);
        for n in 1..=3 {
            let section = ke.section(zeta, n).unwrap();
            for z in [c(0.1, 0.1), c(-0.5, 0.2), c(0.0, 0.6)] {
                let direct = ke.higher_order_kernel(z, zeta, n).unwrap();
                assert!(close(section.eval(z), direct, 1e-11 * direct.norm().max(1.0)), "n={n} z={z}");
            }
        }
    }

    #[test]
    fn kernel_function_values() {
        let ke = disc();
        let m1 = ke.kernel_function_m(c(0.5, 0.0), c(0.0, 0.0), 1, None).unwrap();
        assert!(close(m1.value, c(0.5 / PI, 0.0), 1e-12));
        let m2 = ke.kernel_function_m(c(0.5, 0.0), c(0.0, 0.0), 2, None).unwrap();
        assert!(close(m2.value, c(0.25 / PI, 0.0), 1e-12));
        let same = ke.kernel_function_m(c(0.3, 0.1), c(0.3, 0.1), 2, None).unwrap();
        assert_eq!(same.value, c(0.0, 0.0));
        assert_eq!(same.path.vertices().len(), 1);
    }

    #[test]
    fn mixed_partials_at_origin() {
        let ke = disc();
        let z = c(0.5, 0.0);
        let v = ke.m_mixed_partial(z, c(0.0, 0.0), 1, 0, 1, None).unwrap();
        assert!(close(v.value, c(0.25 / PI, 0.0), 1e-12));
        let v = ke.m_mixed_partial(z, c(0.0, 0.0), 1, 1, 0, None).unwrap();
        assert!(close(v.value, c(-1.0 / PI, 0.0), 1e-12));
        let direct = ke.kernel_function_m(z, c(0.1, 0.2), 2, None).unwrap();
        let via = ke.m_mixed_partial(z, c(0.1, 0.2), 2, 0, 0, None).unwrap();
        assert_eq!(direct.value, via.value);
    }

    #[test]
    fn reproducing_property_and_guards() {
        let ke = disc();
        let zero = c(0.0, 0.0);
        let sq = crate::testfn::Polynomial::power(zero, 2);
        assert!(ke.reproduce_check(&sq, zero, 2).unwrap() < 1e-6);
        let cube = crate::testfn::Polynomial::power(zero, 3);
        assert!(ke.reproduce_check(&cube, zero, 2).unwrap() < 1e-6);
        let lin = crate::testfn::Polynomial::power(zero, 1);
        assert_eq!(ke.reproduce_check(&lin, zero, 2).unwrap_err().code(), "BAD_TEST_FUNCTION");
    }

    #[test]
    fn zero_set_probe_cases() {
        let ke = disc();
        for z in [c(0.0, 0.0), c(0.9, 0.0), c(-0.5, 0.6)] {
            assert!(!ke.zero_set_probe(z));
        }
        let d = Domain::unit_disc();
        let basis = generate_basis(&d, 3).unwrap();
        let zeros = nalgebra::DMatrix::from_element(4, 4, c(0.0, 0.0));
        let onb = OrthonormalBasis::from_coefficients(basis, zeros);
        let dead = KernelEvaluator::from_parts(d.clone(), Weight::Constant(1.0), onb, KernelOptions::for_domain(&d));
        assert!(dead.zero_set_probe(c(0.1, 0.0)));
        assert_eq!(dead.higher_order_kernel(c(0.2, 0.0), c(0.1, 0.0), 2).unwrap_err().code(), "NEAR_ZERO_SET");
    }

    #[test]
    fn automatic_order_grows_near_the_boundary() {
        let d = Domain::disc(c(0.0, 0.0), 0.5).unwrap();
        assert_eq!(order_for_points(&d, &[c(0.1, 0.0)], 2), default_order(&d));
        let n = order_for_points(&d, &[c(0.45, 0.0)], 2);
        assert!(n > 200 && n < MAX_AUTO_ORDER, "{n}");
    }

    #[test]
    fn order_zero_is_rejected() {
        let ke = disc();
        assert_eq!(ke.higher_order_kernel(c(0.0, 0.0), c(0.0, 0.0), 0).unwrap_err().code(), "INVALID_ORDER");
    }
}
