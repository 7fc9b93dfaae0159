//! Admissible weights and the local-integrability admissibility probe.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::domain::{to_complex, Domain};
use crate::error::{KernelError, Result};
use crate::quadrature::{gauss_legendre, CompensatedSum};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum WeightSpec {
    Constant(f64),
    /// `|z|^(2p)`
    RadialPower { p: f64 },
    /// `(1 - |z|^2)^alpha`
    DiscPower { alpha: f64 },
    /// Piecewise constant on cells; `values[row][col]`, row 0 at the bottom.
    Sampled {
        origin: [f64; 2],
        cell_size: f64,
        values: Vec<Vec<f64>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledWeight {
    origin: Complex64,
    cell_size: f64,
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl SampledWeight {
    fn value_at(&self, z: Complex64) -> Option<f64> {
        let x = (z.re - self.origin.re) / self.cell_size;
        let y = (z.im - self.origin.im) / self.cell_size;
        if !(x >= 0.0 && y >= 0.0 && x < self.cols as f64 && y < self.rows as f64) {
            return None;
        }
        let (row, col) = (y.floor() as usize, x.floor() as usize);
        Some(self.values[row * self.cols + col])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Weight {
    Constant(f64),
    RadialPower { p: f64 },
    DiscPower { alpha: f64 },
    Sampled(SampledWeight),
}

impl Weight {
    pub fn from_spec(spec: &WeightSpec) -> Result<Self> {
        let invalid = |msg: String| Err(KernelError::NonpositiveWeight(msg));
        match spec {
            WeightSpec::Constant(v) => {
                if !(v.is_finite() && *v > 0.0) {
                    return invalid(format!("constant weight must be positive, got {v}"));
                }
                Ok(Weight::Constant(*v))
            }
            WeightSpec::RadialPower { p } => {
                if !(p.is_finite() && *p >= 0.0) {
                    return invalid(format!("radial power exponent must be non-negative, got {p}"));
                }
                Ok(Weight::RadialPower { p: *p })
            }
            WeightSpec::DiscPower { alpha } => {
                if !(alpha.is_finite() && *alpha > -1.0) {
                    return invalid(format!("disc power exponent must exceed -1, got {alpha}"));
                }
                Ok(Weight::DiscPower { alpha: *alpha })
            }
            WeightSpec::Sampled { origin, cell_size, values } => {
                let rows = values.len();
                let cols = values.first().map_or(0, Vec::len);
                if rows == 0 || cols == 0 || values.iter().any(|r| r.len() != cols) {
                    return invalid("sampled weight grid must be a non-empty rectangle".into());
                }
                if !(cell_size.is_finite() && *cell_size > 0.0) {
                    return invalid(format!("sampled weight cell size must be positive, got {cell_size}"));
                }
                Ok(Weight::Sampled(SampledWeight {
                    origin: to_complex(*origin),
                    cell_size: *cell_size,
                    rows,
                    cols,
                    values: values.iter().flatten().copied().collect(),
                }))
            }
        }
    }

    /// `μ(z)`.
    ///
    /// `RadialPower` with `p > 0` vanishes at the origin only; that null set
    /// is returned as `0.0` rather than an error. Quadrature nodes never
    /// land on it.
    pub fn eval(&self, z: Complex64) -> Result<f64> {
        let value = match self {
            Weight::Constant(v) => *v,
            Weight::RadialPower { p } => {
                if *p == 0.0 {
                    1.0
                } else {
                    return Ok(z.norm_sqr().powf(*p));
                }
            }
            Weight::DiscPower { alpha } => (1.0 - z.norm_sqr()).powf(*alpha),
            Weight::Sampled(grid) => grid.value_at(z).ok_or_else(|| {
                KernelError::NonpositiveWeight(format!("{z} lies outside the sampled weight grid"))
            })?,
        };
        if value.is_finite() && value > 0.0 {
            Ok(value)
        } else {
            Err(KernelError::NonpositiveWeight(format!("weight is {value} at {z}")))
        }
    }

    /// Radial profile `μ(r)` if the weight depends only on `|z|`.
    pub fn radial_profile(&self) -> Option<Box<dyn Fn(f64) -> f64 + Send + Sync>> {
        match *self {
            Weight::Constant(v) => Some(Box::new(move |_| v)),
            Weight::RadialPower { p } => Some(Box::new(move |r: f64| (r * r).powf(p))),
            Weight::DiscPower { alpha } => Some(Box::new(move |r: f64| (1.0 - r * r).powf(alpha))),
            Weight::Sampled(_) => None,
        }
    }

    /// Constant weights are invariant under every translation; the other
    /// radial kinds only under rotation about the origin.
    pub fn is_radial_about(&self, center: Complex64) -> bool {
        match self {
            Weight::Constant(_) => true,
            Weight::RadialPower { .. } | Weight::DiscPower { .. } => center == Complex64::new(0.0, 0.0),
            Weight::Sampled(_) => false,
        }
    }
}

/// Closed disc `|z - center| <= radius`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompactSpec {
    pub center: [f64; 2],
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub compact: CompactSpec,
    pub exponent: f64,
    pub local_integral_estimate: f64,
    pub verdict: Verdict,
    /// Refinement levels used before stopping.
    pub levels: usize,
}

const ADMISSIBILITY_LEVELS: usize = 7;
const ADMISSIBILITY_RTOL: f64 = 1e-9;

/// Estimates `∫_K μ^{-a} dA` over a closed disc `K` by a polar tensor rule
/// centred on `K`, doubling the resolution until two successive estimates
/// agree. The verdict is `Pass` on agreement and `Inconclusive` otherwise;
/// `Fail` is never issued because local integrability is only sufficient.
pub fn check_admissibility(
    weight: &Weight,
    domain: &Domain,
    exponent: f64,
    compact: CompactSpec,
) -> Result<AdmissibilityReport> {
    let center = to_complex(compact.center);
    if !(compact.radius.is_finite() && compact.radius > 0.0) || !domain.contains_closed_disc(center, compact.radius) {
        return Err(KernelError::CompactNotInside(format!(
            "closed disc centre {center} radius {} is not compactly inside the domain",
            compact.radius
        )));
    }
    if !(exponent.is_finite() && exponent > 0.0) {
        return Err(KernelError::InvalidOrder(format!("admissibility exponent must be positive, got {exponent}")));
    }

    let mut previous: Option<f64> = None;
    let mut last = f64::NAN;
    for level in 0..ADMISSIBILITY_LEVELS {
        let radial = 8 << level;
        let estimate = polar_estimate(weight, center, compact.radius, exponent, radial, 2 * radial)?;
        last = estimate;
        if !estimate.is_finite() {
            break;
        }
        if let Some(prev) = previous {
            if (estimate - prev).abs() <= ADMISSIBILITY_RTOL * estimate.abs().max(1.0) {
                return Ok(AdmissibilityReport {
                    compact,
                    exponent,
                    local_integral_estimate: estimate,
                    verdict: Verdict::Pass,
                    levels: level + 1,
                });
            }
        }
        previous = Some(estimate);
    }
    Ok(AdmissibilityReport {
        compact,
        exponent,
        local_integral_estimate: last,
        verdict: Verdict::Inconclusive,
        levels: ADMISSIBILITY_LEVELS,
    })
}

fn polar_estimate(
    weight: &Weight,
    center: Complex64,
    radius: f64,
    exponent: f64,
    radial: usize,
    angular: usize,
) -> Result<f64> {
    let (x, w) = gauss_legendre(radial);
    let dtheta = 2.0 * std::f64::consts::PI / angular as f64;
    let mut sum = CompensatedSum::default();
    for (xi, wi) in x.iter().zip(&w) {
        let r = 0.5 * radius * (1.0 + xi);
        let jac = 0.5 * radius * wi * r * dtheta;
        for m in 0..angular {
            let z = center + Complex64::from_polar(r, m as f64 * dtheta);
            let mu = weight.eval(z)?;
            sum.add(jac * mu.powf(-exponent));
        }
    }
    Ok(sum.total())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn evaluation_examples() {
        assert_eq!(Weight::Constant(1.0).eval(c(0.3, -0.7)).unwrap(), 1.0);
        let w = Weight::RadialPower { p: 1.0 };
        assert!((w.eval(c(0.5, 0.0)).unwrap() - 0.25).abs() < 1e-15);
        let w = Weight::DiscPower { alpha: 1.0 };
        assert!((w.eval(c(0.6, 0.0)).unwrap() - 0.64).abs() < 1e-15);
    }

    #[test]
    fn sampled_weight_with_zero_cell_is_rejected_at_query() {
        let spec = WeightSpec::Sampled {
            origin: [0.0, 0.0],
            cell_size: 1.0,
            values: vec![vec![1.0, 0.0]],
        };
        let w = Weight::from_spec(&spec).unwrap();
        assert_eq!(w.eval(c(0.5, 0.5)).unwrap(), 1.0);
        assert_eq!(w.eval(c(1.5, 0.5)).unwrap_err().code(), "NONPOSITIVE_WEIGHT");
        assert_eq!(w.eval(c(3.5, 0.5)).unwrap_err().code(), "NONPOSITIVE_WEIGHT");
    }

    #[test]
    fn disc_power_outside_unit_disc_is_nonpositive() {
        let w = Weight::DiscPower { alpha: 1.0 };
        assert_eq!(w.eval(c(1.2, 0.0)).unwrap_err().code(), "NONPOSITIVE_WEIGHT");
    }

    #[test]
    fn invalid_specs() {
        assert!(Weight::from_spec(&WeightSpec::Constant(0.0)).is_err());
        assert!(Weight::from_spec(&WeightSpec::RadialPower { p: -1.0 }).is_err());
        assert!(Weight::from_spec(&WeightSpec::DiscPower { alpha: -1.0 }).is_err());
    }

    #[test]
    fn admissibility_constant() {
        let report = check_admissibility(
            &Weight::Constant(1.0),
            &Domain::unit_disc(),
            1.0,
            CompactSpec { center: [0.0, 0.0], radius: 0.5 },
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!((report.local_integral_estimate - PI * 0.25).abs() < 1e-12);
    }

    #[test]
    fn admissibility_constant_scales_with_value() {
        let report = check_admissibility(
            &Weight::Constant(4.0),
            &Domain::unit_disc(),
            0.5,
            CompactSpec { center: [0.1, 0.1], radius: 0.3 },
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!((report.local_integral_estimate - 0.5 * PI * 0.09).abs() < 1e-12);
    }

    #[test]
    fn admissibility_radial_power_integrable_singularity() {
        // ∫_{|z|<=1/2} |z|^{-1} dA = 2π · 1/2
        let report = check_admissibility(
            &Weight::RadialPower { p: 1.0 },
            &Domain::unit_disc(),
            0.5,
            CompactSpec { center: [0.0, 0.0], radius: 0.5 },
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Pass);
        assert!((report.local_integral_estimate - PI).abs() < 1e-10);
    }

    #[test]
    fn admissibility_divergent_is_inconclusive() {
        // |z|^{-2} is not integrable at the origin
        let report = check_admissibility(
            &Weight::RadialPower { p: 1.0 },
            &Domain::unit_disc(),
            1.0,
            CompactSpec { center: [0.0, 0.0], radius: 0.5 },
        )
        .unwrap();
        assert_eq!(report.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn admissibility_compact_must_be_inside() {
        let err = check_admissibility(
            &Weight::Constant(1.0),
            &Domain::unit_disc(),
            1.0,
            CompactSpec { center: [0.8, 0.0], radius: 0.5 },
        )
        .unwrap_err();
        assert_eq!(err.code(), "COMPACT_NOT_INSIDE");
    }

    #[test]
    fn admissibility_sampled_zero_cell() {
        let spec = WeightSpec::Sampled {
            origin: [-1.0, -1.0],
            cell_size: 0.5,
            values: vec![vec![1.0; 4], vec![1.0, 0.0, 1.0, 1.0], vec![1.0; 4], vec![1.0; 4]],
        };
        let w = Weight::from_spec(&spec).unwrap();
        let err = check_admissibility(&w, &Domain::unit_disc(), 1.0, CompactSpec { center: [0.0, 0.0], radius: 0.5 })
            .unwrap_err();
        assert_eq!(err.code(), "NONPOSITIVE_WEIGHT");
    }
}
