//! Holomorphic test functions with exact derivatives.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub trait TestFunction: Sync {
    /// `f^{(k)}(z)`
    fn derivative(&self, z: Complex64, k: usize) -> Complex64;

    fn value(&self, z: Complex64) -> Complex64 {
        self.derivative(z, 0)
    }
}

/// `Σ_m a_m (z - c)^m`
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    pub center: Complex64,
    pub coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(center: Complex64, coeffs: Vec<Complex64>) -> Self {
        Polynomial { center, coeffs }
    }

    /// `(z - c)^m`
    pub fn power(center: Complex64, m: usize) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); m + 1];
        coeffs[m] = Complex64::new(1.0, 0.0);
        Polynomial { center, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }
}

impl TestFunction for Polynomial {
    fn derivative(&self, z: Complex64, k: usize) -> Complex64 {
        let w = z - self.center;
        let mut acc = Complex64::new(0.0, 0.0);
        // Horner over the k-th derivative's coefficients
        for m in (k..self.coeffs.len()).rev() {
            let falling: f64 = (0..k).map(|i| (m - i) as f64).product();
            acc = acc * w + self.coeffs[m] * falling;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_of_shifted_power() {
        let zeta = Complex64::new(0.3, 0.2);
        let p = Polynomial::power(zeta, 3);
        let z = Complex64::new(-0.1, 0.4);
        let w = z - zeta;
        assert!((p.value(z) - w * w * w).norm() < 1e-15);
        assert!((p.derivative(z, 1) - w * w * 3.0).norm() < 1e-15);
        assert!((p.derivative(z, 2) - w * 6.0).norm() < 1e-15);
        assert_eq!(p.derivative(z, 3), Complex64::new(6.0, 0.0));
        assert_eq!(p.derivative(z, 4), Complex64::new(0.0, 0.0));
    }
}
