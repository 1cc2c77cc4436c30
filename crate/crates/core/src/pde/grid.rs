use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Boundary {
    Periodic,
    FixedZero,
    /// Zero normal derivative, by mirroring across the end nodes.
    Neumann,
}

/// Uniform grid on `[0, length]` with `cells` cells.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid1D {
    pub cells: usize,
    pub length: f64,
    pub boundary: Boundary,
}

impl Grid1D {
    pub fn new(cells: usize, length: f64, boundary: Boundary) -> Result<Grid1D> {
        if cells < 8 {
            return Err(Error::InvalidDimensions(format!(
                "grid needs at least 8 cells, got {cells}"
            )));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "grid length must be positive, got {length}"
            )));
        }
        Ok(Grid1D {
            cells,
            length,
            boundary,
        })
    }

    pub fn dx(&self) -> f64 {
        self.length / self.cells as f64
    }

    /// Number of stored nodes: `cells` when periodic, `cells + 1` otherwise.
    pub fn nodes(&self) -> usize {
        match self.boundary {
            Boundary::Periodic => self.cells,
            _ => self.cells + 1,
        }
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.dx()
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.nodes()).map(|j| self.x(j)).collect()
    }

    pub fn sample(&self, f: impl Fn(f64) -> f64) -> Vec<f64> {
        let mut u: Vec<f64> = (0..self.nodes()).map(|j| f(self.x(j))).collect();
        self.enforce(&mut u);
        u
    }

    /// Trapezoid weights, so that `sum w_j f_j dx` integrates over the domain.
    pub fn weight(&self, j: usize) -> f64 {
        match self.boundary {
            Boundary::Periodic => 1.0,
            _ if j == 0 || j == self.cells => 0.5,
            _ => 1.0,
        }
    }

    pub fn integrate(&self, f: &[f64]) -> f64 {
        let dx = self.dx();
        f.iter().enumerate().map(|(j, v)| self.weight(j) * v * dx).sum()
    }

    pub fn enforce(&self, u: &mut [f64]) {
        if self.boundary == Boundary::FixedZero {
            u[0] = 0.0;
            u[self.cells] = 0.0;
        }
    }

    /// Neighbours of node `j`, `None` past a fixed end.
    pub fn neighbours(&self, j: usize) -> (Option<usize>, Option<usize>) {
        let n = self.nodes();
        match self.boundary {
            Boundary::Periodic => (Some((j + n - 1) % n), Some((j + 1) % n)),
            Boundary::FixedZero => (j.checked_sub(1), (j + 1 < n).then_some(j + 1)),
            Boundary::Neumann => {
                let left = if j == 0 { 1 } else { j - 1 };
                let right = if j + 1 == n { n - 2 } else { j + 1 };
                (Some(left), Some(right))
            }
        }
    }

    /// Second difference; zero on fixed ends.
    pub fn laplacian(&self, u: &[f64], out: &mut [f64]) {
        let inv = 1.0 / (self.dx() * self.dx());
        for j in 0..self.nodes() {
            out[j] = match self.neighbours(j) {
                (Some(l), Some(r)) => (u[l] - 2.0 * u[j] + u[r]) * inv,
                _ => 0.0,
            };
        }
    }

    /// Number of edges between nodes.
    pub fn edges(&self) -> usize {
        self.cells
    }

    /// Forward difference on edge `e`, between nodes `e` and `e + 1`.
    pub fn edge_gradient(&self, u: &[f64], e: usize) -> f64 {
        let r = (e + 1) % self.nodes();
        (u[r] - u[e]) / self.dx()
    }

    /// Edges adjacent to node `j`.
    pub fn node_edges(&self, j: usize) -> Vec<usize> {
        match self.boundary {
            Boundary::Periodic => vec![(j + self.cells - 1) % self.cells, j],
            _ => {
                let mut e = Vec::with_capacity(2);
                if j > 0 {
                    e.push(j - 1);
                }
                if j < self.cells {
                    e.push(j);
                }
                e
            }
        }
    }

    /// Nodes where centred differences are available.
    pub fn interior(&self) -> std::ops::Range<usize> {
        match self.boundary {
            Boundary::Periodic => 0..self.nodes(),
            _ => 1..self.cells,
        }
    }

    /// `sin(m pi x / L)` for fixed ends, `cos(m pi x / L)` for Neumann ends,
    /// `sin(2 m pi x / L)` when periodic.
    pub fn mode(&self, m: usize) -> Vec<f64> {
        let k = self.wavenumber(m);
        match self.boundary {
            Boundary::Neumann => self.sample(|x| (k * x).cos()),
            _ => self.sample(|x| (k * x).sin()),
        }
    }

    pub fn wavenumber(&self, m: usize) -> f64 {
        let base = std::f64::consts::PI * m as f64 / self.length;
        match self.boundary {
            Boundary::Periodic => 2.0 * base,
            _ => base,
        }
    }

    /// `sum w u v / sum w v v`.
    pub fn project(&self, u: &[f64], shape: &[f64]) -> f64 {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..self.nodes() {
            let w = self.weight(j);
            num += w * u[j] * shape[j];
            den += w * shape[j] * shape[j];
        }
        if den == 0.0 {
            0.0
        } else {
            num / den
        }
    }
}
