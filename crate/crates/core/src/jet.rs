//! Truncated bivariate Taylor series in a holomorphic shift `ε` (the `ζ`
//! direction) and an anti-holomorphic shift `δ` (the `ζ̄` direction).
//!
//! A function `F(ζ, ζ̄)` is represented by the coefficients
//! `c[a][b] = ∂_ζ^a ∂_ζ̄^b F / (a! b!)` for `a <= deg_h`, `b <= deg_a`.
//! Products, quotients and determinants of such series yield the exact mixed
//! Wirtinger derivatives of the combined expression, without finite
//! differences.

use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::linalg::LuScalar;

#[derive(Debug, Clone, PartialEq)]
pub struct Jet2 {
    deg_h: usize,
    deg_a: usize,
    coeffs: Vec<Complex64>,
}

impl Jet2 {
    pub fn zeros(deg_h: usize, deg_a: usize) -> Self {
        Jet2 { deg_h, deg_a, coeffs: vec![Complex64::new(0.0, 0.0); (deg_h + 1) * (deg_a + 1)] }
    }

    pub fn constant(value: Complex64, deg_h: usize, deg_a: usize) -> Self {
        let mut j = Jet2::zeros(deg_h, deg_a);
        j.coeffs[0] = value;
        j
    }

    /// Builds the series from a table of partial derivatives
    /// `partial(a, b) = ∂_ζ^a ∂_ζ̄^b F`.
    pub fn from_partials(deg_h: usize, deg_a: usize, partial: impl Fn(usize, usize) -> Complex64) -> Self {
        let mut j = Jet2::zeros(deg_h, deg_a);
        for a in 0..=deg_h {
            for b in 0..=deg_a {
                j.coeffs[a * (deg_a + 1) + b] = partial(a, b) / (factorial(a) * factorial(b));
            }
        }
        j
    }

    pub fn degrees(&self) -> (usize, usize) {
        (self.deg_h, self.deg_a)
    }

    pub fn coeff(&self, a: usize, b: usize) -> Complex64 {
        self.coeffs[a * (self.deg_a + 1) + b]
    }

    fn coeff_mut(&mut self, a: usize, b: usize) -> &mut Complex64 {
        &mut self.coeffs[a * (self.deg_a + 1) + b]
    }

    pub fn value(&self) -> Complex64 {
        self.coeffs[0]
    }

    /// `∂_ζ^a ∂_ζ̄^b F` at the expansion point.
    pub fn partial(&self, a: usize, b: usize) -> Complex64 {
        self.coeff(a, b) * (factorial(a) * factorial(b))
    }

    /// Series of `∂_ζ^m F`, one degree shorter per differentiation.
    pub fn differentiate_h(&self, m: usize) -> Jet2 {
        assert!(m <= self.deg_h, "cannot differentiate a degree-{} jet {m} times", self.deg_h);
        Jet2::from_partials(self.deg_h - m, self.deg_a, |a, b| self.partial(a + m, b))
    }

    pub fn scale(&self, s: Complex64) -> Jet2 {
        Jet2 { deg_h: self.deg_h, deg_a: self.deg_a, coeffs: self.coeffs.iter().map(|c| c * s).collect() }
    }

    fn check_shape(&self, other: &Jet2) {
        assert_eq!(self.degrees(), other.degrees(), "jet degree mismatch");
    }

    /// `1 / F`; requires a non-zero constant term.
    pub fn recip(&self) -> Jet2 {
        let f0 = self.value();
        assert!(f0.norm() > 0.0, "reciprocal of a jet with zero constant term");
        let inv0 = f0.inv();
        let mut g = Jet2::zeros(self.deg_h, self.deg_a);
        for a in 0..=self.deg_h {
            for b in 0..=self.deg_a {
                if a == 0 && b == 0 {
                    *g.coeff_mut(0, 0) = inv0;
                    continue;
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for a1 in 0..=a {
                    for b1 in 0..=b {
                        if a1 == 0 && b1 == 0 {
                            continue;
                        }
                        acc += self.coeff(a1, b1) * g.coeff(a - a1, b - b1);
                    }
                }
                *g.coeff_mut(a, b) = -acc * inv0;
            }
        }
        g
    }
}

impl Add for &Jet2 {
    type Output = Jet2;
    fn add(self, rhs: &Jet2) -> Jet2 {
        self.check_shape(rhs);
        Jet2 {
            deg_h: self.deg_h,
            deg_a: self.deg_a,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: &Jet2) -> Jet2 {
        self.check_shape(rhs);
        Jet2 {
            deg_h: self.deg_h,
            deg_a: self.deg_a,
            coeffs: self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect(),
        }
    }
}

impl Mul for &Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: &Jet2) -> Jet2 {
        self.check_shape(rhs);
        let mut out = Jet2::zeros(self.deg_h, self.deg_a);
        for a1 in 0..=self.deg_h {
            for b1 in 0..=self.deg_a {
                let x = self.coeff(a1, b1);
                if x == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for a2 in 0..=(self.deg_h - a1) {
                    for b2 in 0..=(self.deg_a - b1) {
                        *out.coeff_mut(a1 + a2, b1 + b2) += x * rhs.coeff(a2, b2);
                    }
                }
            }
        }
        out
    }
}

impl Neg for &Jet2 {
    type Output = Jet2;
    fn neg(self) -> Jet2 {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl LuScalar for Jet2 {
    fn pivot_size(&self) -> f64 {
        self.value().norm()
    }
    fn zero_like(&self) -> Self {
        Jet2::zeros(self.deg_h, self.deg_a)
    }
    fn one_like(&self) -> Self {
        Jet2::constant(Complex64::new(1.0, 0.0), self.deg_h, self.deg_a)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn sub(&self, other: &Self) -> Self {
        self - other
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn recip(&self) -> Self {
        Jet2::recip(self)
    }
}

pub(crate) fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}
