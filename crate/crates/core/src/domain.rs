//! Planar domains.
//!
//! All domains are open: boundary points are rejected by [`Domain::contains`].
//! A sampled region is the union of the grid cells flagged `true`; each cell
//! is the half-open square `[x, x + h) × [y, y + h)` and the outer boundary of
//! the bounding box is excluded.

use std::collections::VecDeque;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{KernelError, Result};

/// Serializable description of a domain, as read from run configurations.
///
/// Complex numbers are `[re, im]` pairs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DomainSpec {
    Disc {
        #[serde(default = "origin")]
        center: [f64; 2],
        radius: f64,
    },
    Annulus {
        #[serde(default = "origin")]
        center: [f64; 2],
        inner: f64,
        outer: f64,
    },
    /// `grid[row][col]`, row 0 at the bottom edge (`origin.im`).
    Sampled {
        origin: [f64; 2],
        cell_size: f64,
        grid: Vec<Vec<bool>>,
    },
}

fn origin() -> [f64; 2] {
    [0.0, 0.0]
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampledRegion {
    origin: Complex64,
    cell_size: f64,
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
}

impl SampledRegion {
    pub fn origin(&self) -> Complex64 {
        self.origin
    }

    pub fn cell_size(&self) -> f64 {
        self.cell_size
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_set(&self, row: usize, col: usize) -> bool {
        row < self.rows && col < self.cols && self.cells[row * self.cols + col]
    }

    /// Lower-left corner of a cell.
    pub fn cell_corner(&self, row: usize, col: usize) -> Complex64 {
        self.origin + Complex64::new(col as f64 * self.cell_size, row as f64 * self.cell_size)
    }

    /// A set cell touching an unset (or out-of-grid) cell across an edge.
    pub fn is_boundary_cell(&self, row: usize, col: usize) -> bool {
        let neighbour = |dr: isize, dc: isize| {
            let r = row as isize + dr;
            let c = col as isize + dc;
            r >= 0 && c >= 0 && self.is_set(r as usize, c as usize)
        };
        !(neighbour(1, 0) && neighbour(-1, 0) && neighbour(0, 1) && neighbour(0, -1))
    }

    fn cell_of(&self, z: Complex64) -> Option<(usize, usize)> {
        let x = (z.re - self.origin.re) / self.cell_size;
        let y = (z.im - self.origin.im) / self.cell_size;
        if !(x > 0.0 && y > 0.0 && x < self.cols as f64 && y < self.rows as f64) {
            return None;
        }
        Some((y.floor() as usize, x.floor() as usize))
    }

    fn set_cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.rows).flat_map(move |r| (0..self.cols).map(move |c| (r, c)))
            .filter(move |&(r, c)| self.is_set(r, c))
    }

    fn is_connected(&self) -> bool {
        let Some(start) = self.set_cells().next() else {
            return false;
        };
        let mut seen = vec![false; self.cells.len()];
        let mut queue = VecDeque::from([start]);
        seen[start.0 * self.cols + start.1] = true;
        let mut count = 1usize;
        while let Some((r, c)) = queue.pop_front() {
            let steps = [(1isize, 0isize), (-1, 0), (0, 1), (0, -1)];
            for (dr, dc) in steps {
                let (nr, nc) = (r as isize + dr, c as isize + dc);
                if nr < 0 || nc < 0 {
                    continue;
                }
                let (nr, nc) = (nr as usize, nc as usize);
                if self.is_set(nr, nc) && !seen[nr * self.cols + nc] {
                    seen[nr * self.cols + nc] = true;
                    count += 1;
                    queue.push_back((nr, nc));
                }
            }
        }
        count == self.cells.iter().filter(|&&b| b).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Domain {
    Disc { center: Complex64, radius: f64 },
    Annulus { center: Complex64, inner: f64, outer: f64 },
    Sampled(SampledRegion),
}

/// Validates a [`DomainSpec`] and builds the domain it describes.
pub fn make_domain(spec: &DomainSpec) -> Result<Domain> {
    match spec {
        DomainSpec::Disc { center, radius } => Domain::disc(to_complex(*center), *radius),
        DomainSpec::Annulus { center, inner, outer } => {
            Domain::annulus(to_complex(*center), *inner, *outer)
        }
        DomainSpec::Sampled { origin, cell_size, grid } => {
            Domain::sampled(to_complex(*origin), *cell_size, grid)
        }
    }
}

pub(crate) fn to_complex(p: [f64; 2]) -> Complex64 {
    Complex64::new(p[0], p[1])
}

impl Domain {
    pub fn disc(center: Complex64, radius: f64) -> Result<Self> {
        if !(radius.is_finite() && radius > 0.0) || !is_finite(center) {
            return Err(KernelError::InvalidGeometry(format!("disc radius must be positive, got {radius}")));
        }
        Ok(Domain::Disc { center, radius })
    }

    pub fn unit_disc() -> Self {
        Domain::Disc { center: Complex64::new(0.0, 0.0), radius: 1.0 }
    }

    pub fn annulus(center: Complex64, inner: f64, outer: f64) -> Result<Self> {
        if !(inner.is_finite() && outer.is_finite() && inner > 0.0 && inner < outer) || !is_finite(center) {
            return Err(KernelError::InvalidGeometry(format!(
                "annulus needs 0 < inner < outer, got inner={inner}, outer={outer}"
            )));
        }
        Ok(Domain::Annulus { center, inner, outer })
    }

    pub fn sampled(origin: Complex64, cell_size: f64, grid: &[Vec<bool>]) -> Result<Self> {
        if !(cell_size.is_finite() && cell_size > 0.0) || !is_finite(origin) {
            return Err(KernelError::InvalidGeometry(format!("cell size must be positive, got {cell_size}")));
        }
        let rows = grid.len();
        let cols = grid.first().map_or(0, Vec::len);
        if rows == 0 || cols == 0 {
            return Err(KernelError::InvalidGeometry("indicator grid is empty".into()));
        }
        if grid.iter().any(|row| row.len() != cols) {
            return Err(KernelError::InvalidGeometry("indicator grid rows have unequal length".into()));
        }
        let region = SampledRegion {
            origin,
            cell_size,
            rows,
            cols,
            cells: grid.iter().flatten().copied().collect(),
        };
        if !region.cells.iter().any(|&b| b) {
            return Err(KernelError::InvalidGeometry("indicator grid has no cells set".into()));
        }
        if !region.is_connected() {
            return Err(KernelError::InvalidGeometry("indicator grid is not 4-connected".into()));
        }
        Ok(Domain::Sampled(region))
    }

    pub fn contains(&self, z: Complex64) -> bool {
        if !is_finite(z) {
            return false;
        }
        match self {
            Domain::Disc { center, radius } => (z - center).norm() < *radius,
            Domain::Annulus { center, inner, outer } => {
                let r = (z - center).norm();
                *inner < r && r < *outer
            }
            Domain::Sampled(region) => region
                .cell_of(z)
                .is_some_and(|(row, col)| region.is_set(row, col)),
        }
    }

    /// Expansion centre used by the basis generator.
    pub fn center(&self) -> Complex64 {
        match self {
            Domain::Disc { center, .. } | Domain::Annulus { center, .. } => *center,
            Domain::Sampled(region) => {
                let half = Complex64::new(0.5, 0.5) * region.cell_size;
                let (sum, count) = region
                    .set_cells()
                    .fold((Complex64::new(0.0, 0.0), 0usize), |(s, n), (r, c)| {
                        (s + region.cell_corner(r, c) + half, n + 1)
                    });
                sum / count as f64
            }
        }
    }

    /// Largest distance from [`Domain::center`] to a point of the closure.
    pub fn outer_radius(&self) -> f64 {
        match self {
            Domain::Disc { radius, .. } => *radius,
            Domain::Annulus { outer, .. } => *outer,
            Domain::Sampled(region) => {
                let c = self.center();
                let h = region.cell_size;
                region
                    .set_cells()
                    .flat_map(|(r, col)| {
                        let p = region.cell_corner(r, col);
                        [p, p + h, p + Complex64::new(0.0, h), p + Complex64::new(h, h)]
                    })
                    .map(|p| (p - c).norm())
                    .fold(0.0, f64::max)
            }
        }
    }

    pub fn area(&self) -> f64 {
        use std::f64::consts::PI;
        match self {
            Domain::Disc { radius, .. } => PI * radius * radius,
            Domain::Annulus { inner, outer, .. } => PI * (outer * outer - inner * inner),
            Domain::Sampled(region) => {
                region.cells.iter().filter(|&&b| b).count() as f64 * region.cell_size * region.cell_size
            }
        }
    }

    /// Whether the closed disc `|z - center| <= radius` lies in the domain
    /// with positive distance to its boundary.
    pub fn contains_closed_disc(&self, center: Complex64, radius: f64) -> bool {
        match self {
            Domain::Disc { center: c, radius: r } => (center - c).norm() + radius < *r,
            Domain::Annulus { center: c, inner, outer } => {
                let d = (center - c).norm();
                d + radius < *outer && d - radius > *inner
            }
            Domain::Sampled(_) => {
                // dense sampling of the closed disc; boundary circle plus interior rings
                let rings = 16;
                let spokes = 256;
                (0..=rings).all(|k| {
                    let rho = radius * k as f64 / rings as f64;
                    (0..spokes).all(|m| {
                        let t = 2.0 * std::f64::consts::PI * m as f64 / spokes as f64;
                        self.contains(center + Complex64::from_polar(rho, t))
                    })
                })
            }
        }
    }

    /// Points of a `k × k` lattice over the bounding box that lie in the
    /// domain; used to fix a scale for relative thresholds.
    pub fn probe_points(&self, k: usize) -> Vec<Complex64> {
        let c = self.center();
        let r = self.outer_radius();
        let k = k.max(2);
        let mut out = Vec::new();
        for i in 0..k {
            for j in 0..k {
                // stay strictly inside the bounding box
                let x = -r + 2.0 * r * (i as f64 + 0.5) / k as f64;
                let y = -r + 2.0 * r * (j as f64 + 0.5) / k as f64;
                let z = c + Complex64::new(x, y) * 0.9;
                if self.contains(z) {
                    out.push(z);
                }
            }
        }
        out
    }
}

fn is_finite(z: Complex64) -> bool {
    z.re.is_finite() && z.im.is_finite()
}
