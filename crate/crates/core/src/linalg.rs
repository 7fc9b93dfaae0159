//! Small dense linear algebra: pivoted LU determinants over any commutative
//! ring whose units are the elements with non-zero "pivot size".

use num_complex::Complex64;

pub trait LuScalar: Clone {
    /// Magnitude used to choose pivots; zero means "not invertible".
    fn pivot_size(&self) -> f64;
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn recip(&self) -> Self;
}

impl LuScalar for Complex64 {
    fn pivot_size(&self) -> f64 {
        self.norm()
    }
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
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
        self.inv()
    }
}

/// Determinant of a square matrix given row-major, by LU with partial
/// pivoting. The empty matrix has determinant one, taken from `unit`.
///
/// When no remaining pivot candidate is invertible (possible over rings
/// such as truncated series, whose non-units need not be zero), the
/// remaining block is expanded by minors instead.
pub fn determinant<T: LuScalar>(rows: &[Vec<T>], unit: &T) -> T {
    let n = rows.len();
    if n == 0 {
        return unit.one_like();
    }
    debug_assert!(rows.iter().all(|r| r.len() == n), "determinant of a non-square matrix");
    let mut a: Vec<Vec<T>> = rows.to_vec();
    let mut det = unit.one_like();
    for col in 0..n {
        let (pivot_row, size) = (col..n)
            .map(|r| (r, a[r][col].pivot_size()))
            .fold((col, -1.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if size == 0.0 {
            let rest: Vec<Vec<T>> = a[col..].iter().map(|r| r[col..].to_vec()).collect();
            return det.mul(&laplace(&rest, unit));
        }
        if pivot_row != col {
            a.swap(pivot_row, col);
            det = det.neg();
        }
        let pivot = a[col][col].clone();
        det = det.mul(&pivot);
        let inv = pivot.recip();
        for r in (col + 1)..n {
            let factor = a[r][col].mul(&inv);
            for c in (col + 1)..n {
                let update = factor.mul(&a[col][c]);
                a[r][c] = a[r][c].sub(&update);
            }
        }
    }
    det
}

/// Expansion along the first row; `O(n!)`, used only on small blocks.
fn laplace<T: LuScalar>(rows: &[Vec<T>], unit: &T) -> T {
    let n = rows.len();
    if n == 0 {
        return unit.one_like();
    }
    let mut total = unit.zero_like();
    for k in 0..n {
        let term = rows[0][k].mul(&laplace(&without_column(&rows[1..], k), unit));
        total = if k % 2 == 0 { total.add(&term) } else { total.sub(&term) };
    }
    total
}

/// Drops one column from every row.
pub fn without_column<T: Clone>(rows: &[Vec<T>], col: usize) -> Vec<Vec<T>> {
    rows.iter()
        .map(|r| r.iter().enumerate().filter(|(k, _)| *k != col).map(|(_, v)| v.clone()).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute_det(m: &[Vec<Complex64>]) -> Complex64 {
        // Laplace expansion along the first row
        let n = m.len();
        if n == 0 {
            return c(1.0, 0.0);
        }
        let mut total = c(0.0, 0.0);
        for k in 0..n {
            let minor: Vec<Vec<Complex64>> = without_column(&m[1..], k);
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            total += m[0][k] * brute_det(&minor) * sign;
        }
        total
    }

    #[test]
    fn matches_laplace_expansion() {
        let m = vec![
            vec![c(1.0, 2.0), c(0.5, -1.0), c(0.0, 0.3), c(2.0, 0.0)],
            vec![c(0.0, 0.0), c(3.0, 1.0), c(-1.0, 0.0), c(0.1, 0.1)],
            vec![c(4.0, -2.0), c(0.2, 0.0), c(1.0, 1.0), c(0.0, -1.0)],
            vec![c(0.3, 0.3), c(0.0, 2.0), c(-0.5, 0.5), c(1.0, 0.0)],
        ];
        let unit = c(1.0, 0.0);
        assert!((determinant(&m, &unit) - brute_det(&m)).norm() < 1e-12);
    }

    #[test]
    fn singular_and_empty() {
        let unit = c(1.0, 0.0);
        let m = vec![vec![c(1.0, 0.0), c(2.0, 0.0)], vec![c(2.0, 0.0), c(4.0, 0.0)]];
        assert!(determinant(&m, &unit).norm() < 1e-15);
        assert_eq!(determinant::<Complex64>(&[], &unit), unit);
    }
}
