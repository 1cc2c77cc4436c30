//! Lagrangian side: energy, Cartan and contact forms, Legendre map, fibre
//! Hessian, Reeb fields, Euler-Lagrange residuals and the coefficient
//! equations of Lagrangian k-vector fields.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundles::{Chart, ChartKind, KVectorField, OneForm};
use crate::error::{Error, Result};
use crate::symcore::{div_exact, LinSystem, Poly, RatFunc, Role, Symbol};

const RANK_SAMPLES: usize = 5;
const RANK_TOLERANCE: f64 = 1e-9;
const RANK_SEED: u64 = 0x6b63_6f6e_7461_6374;

#[derive(Clone, Debug, PartialEq)]
pub struct LagrangianSystem {
    chart: Chart,
    lagrangian: Poly,
}

impl LagrangianSystem {
    /// `chart` may be any chart with velocities; the system lives on its
    /// velocity-bundle version.
    pub fn new(chart: &Chart, lagrangian: Poly) -> Result<LagrangianSystem> {
        if !chart.has_velocities() {
            return Err(Error::MissingVelocities);
        }
        let chart = chart.with_kind(ChartKind::Velocity);
        for s in lagrangian.symbols() {
            if s.role() == Role::Momentum {
                return Err(Error::ChartMismatch(format!("Lagrangian references momentum `{s}`")));
            }
            if s.role().is_coordinate() && !chart.contains(&s) {
                return Err(Error::ChartMismatch(format!("`{s}` is not a coordinate of the chart")));
            }
        }
        Ok(LagrangianSystem { chart, lagrangian })
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn lagrangian(&self) -> &Poly {
        &self.lagrangian
    }

    pub fn n(&self) -> usize {
        self.chart.n()
    }

    pub fn k(&self) -> usize {
        self.chart.k()
    }

    /// Velocity symbols in `(i, a)` order, the index set of the Hessian.
    pub fn velocity_labels(&self) -> Vec<Symbol> {
        self.chart.velocities().cloned().collect()
    }

    /// `dL/dv^i_a`.
    pub fn fibre_derivative(&self, i: usize, a: usize) -> Poly {
        self.lagrangian.diff(self.chart.vel(i, a))
    }

    /// `E_L = v^i_a dL/dv^i_a - L`.
    pub fn energy(&self) -> Poly {
        let mut e = -&self.lagrangian;
        for v in self.chart.velocities() {
            e += &(Poly::var(v) * self.lagrangian.diff(v));
        }
        e
    }

    /// `(theta_L^a, eta_L^a)` with `theta_L^a = dL/dv^i_a dq^i` and
    /// `eta_L^a = ds^a - theta_L^a`.
    pub fn cartan_contact_forms(&self) -> (Vec<OneForm>, Vec<OneForm>) {
        let mut thetas = Vec::new();
        let mut etas = Vec::new();
        for a in 0..self.k() {
            let mut theta = OneForm::zero(&self.chart);
            for i in 0..self.n() {
                theta.add(self.chart.base(i), &self.fibre_derivative(i, a));
            }
            let mut eta = theta.scale(&-Poly::one());
            eta.add(self.chart.diss(a), &Poly::one());
            thetas.push(theta);
            etas.push(eta);
        }
        (thetas, etas)
    }

    /// The Legendre map `p_i^a = dL/dv^i_a`, identity on `q` and `s`.
    pub fn legendre(&self) -> CoordinateMap {
        let target = self.chart.with_kind(ChartKind::Momentum);
        let mut components = BTreeMap::new();
        for i in 0..self.n() {
            components.insert(self.chart.base(i).clone(), Poly::var(self.chart.base(i)));
            for a in 0..self.k() {
                components.insert(target.mom(i, a).clone(), self.fibre_derivative(i, a));
            }
        }
        for a in 0..self.k() {
            components.insert(self.chart.diss(a).clone(), Poly::var(self.chart.diss(a)));
        }
        CoordinateMap {
            source: self.chart.clone(),
            target,
            components,
        }
    }

    pub fn hessian(&self) -> Hessian {
        let labels = self.velocity_labels();
        let first: Vec<Poly> = labels.iter().map(|v| self.lagrangian.diff(v)).collect();
        let w: Vec<Vec<Poly>> = first
            .iter()
            .map(|d| labels.iter().map(|v| d.diff(v)).collect())
            .collect();
        let det = bareiss_determinant(&w);
        let inverse = if !det.is_zero() && det.is_constant_only() {
            invert(&w)
        } else {
            None
        };
        Hessian {
            labels,
            w,
            det,
            inverse,
        }
    }

    pub fn classify(&self) -> Regularity {
        self.hessian().classify()
    }

    /// `(R_L)_a = d/ds^a - W^{-1}[(i,b),(j,c)] d2L/ds^a dv^j_c d/dv^i_b`.
    pub fn reeb_lagrangian(&self) -> Result<KVectorField> {
        let h = self.hessian();
        let inv = h.inverse.as_ref().ok_or(Error::ReebUndefined)?;
        let labels = &h.labels;
        let mut r = KVectorField::zero(&self.chart);
        for a in 0..self.k() {
            let s = self.chart.diss(a);
            r.set(a, s, Poly::one())?;
            let mixed: Vec<RatFunc> = labels
                .iter()
                .map(|v| RatFunc::from(self.lagrangian.diff(s).diff(v)))
                .collect();
            for (row, v) in labels.iter().enumerate() {
                let mut acc = RatFunc::zero();
                for (col, m) in mixed.iter().enumerate() {
                    if !m.is_zero() {
                        acc = &acc - &(&inv[row][col] * m);
                    }
                }
                let p = acc
                    .to_poly()
                    .ok_or_else(|| Error::NonPolynomial(format!("Reeb component {acc}")))?;
                r.set(a, v, p)?;
            }
        }
        Ok(r)
    }

    /// Total derivative along direction `a` over the jet symbols of the chart.
    pub fn total_derivative(&self, f: &Poly, a: usize) -> Poly {
        let c = &self.chart;
        let mut out = Poly::zero();
        for i in 0..self.n() {
            let d = f.diff(c.base(i));
            if !d.is_zero() {
                out += &(d * Poly::var(c.vel(i, a)));
            }
            for b in 0..self.k() {
                let d = f.diff(c.vel(i, b));
                if !d.is_zero() {
                    out += &(d * Poly::var(&c.base_jet2(i, b, a)));
                }
            }
        }
        for b in 0..self.k() {
            let d = f.diff(c.diss(b));
            if !d.is_zero() {
                out += &(d * Poly::var(&c.diss_jet(b, a)));
            }
        }
        out
    }

    /// Euler-Lagrange residuals over jet symbols.
    pub fn el_residual(&self) -> ElResidual {
        let c = &self.chart;
        let l = &self.lagrangian;
        let mut field = Vec::with_capacity(self.n());
        for i in 0..self.n() {
            let mut r = -l.diff(c.base(i));
            for a in 0..self.k() {
                let dv = self.fibre_derivative(i, a);
                r += &self.total_derivative(&dv, a);
                r -= &(l.diff(c.diss(a)) * dv);
            }
            field.push(r);
        }
        let mut s_equation = -l;
        for a in 0..self.k() {
            s_equation += &Poly::var(&c.diss_jet(a, a));
        }
        ElResidual { field, s_equation }
    }

    /// A Lagrangian k-vector field whose every component is an unknown
    /// named `X_a[coordinate]`, with the ordered unknowns.
    pub fn unknown_field(&self) -> Result<(KVectorField, Vec<Symbol>)> {
        KVectorField::unknown(&self.chart, "X", &[Role::Base, Role::Velocity, Role::Dissipation])
    }

    /// The coefficient equations of a Lagrangian k-vector field in the four
    /// families `lag-1` (one row per `b`), `lag-2` (per `(i, b)`), `lag-3`
    /// (per `i`) and `lag-4`.
    pub fn lagrangian_field_equations(&self, x: &KVectorField, unknowns: &[Symbol]) -> Result<LinSystem> {
        if x.chart != self.chart {
            return Err(Error::ChartMismatch("field must live on the velocity chart".into()));
        }
        let c = &self.chart;
        let l = &self.lagrangian;
        let (n, k) = (self.n(), self.k());
        let mut sys = LinSystem::new(unknowns.to_vec());
        // (X_a)^j - v^j_a
        let defect = |a: usize, j: usize| &x.get(a, c.base(j)) - &Poly::var(c.vel(j, a));
        for b in 0..k {
            let mut row = Poly::zero();
            for a in 0..k {
                for j in 0..n {
                    row += &(defect(a, j) * l.diff(c.vel(j, a)).diff(c.diss(b)));
                }
            }
            sys.add_equation(&row, &Poly::zero())?;
        }
        for i in 0..n {
            for b in 0..k {
                let mut row = Poly::zero();
                for a in 0..k {
                    for j in 0..n {
                        row += &(defect(a, j) * l.diff(c.vel(i, b)).diff(c.vel(j, a)));
                    }
                }
                sys.add_equation(&row, &Poly::zero())?;
            }
        }
        for i in 0..n {
            let mut row = l.diff(c.base(i));
            for a in 0..k {
                let dvi = self.fibre_derivative(i, a);
                for j in 0..n {
                    row += &(defect(a, j) * l.diff(c.base(i)).diff(c.vel(j, a)));
                    row -= &(dvi.diff(c.base(j)) * x.get(a, c.base(j)));
                    for b in 0..k {
                        row -= &(dvi.diff(c.vel(j, b)) * x.get(a, c.vel(j, b)));
                    }
                }
                for b in 0..k {
                    row -= &(dvi.diff(c.diss(b)) * x.get(a, c.diss(b)));
                }
                row += &(l.diff(c.diss(a)) * dvi);
            }
            sys.add_equation(&row, &Poly::zero())?;
        }
        let mut row = l.clone();
        for a in 0..k {
            for i in 0..n {
                row += &(self.fibre_derivative(i, a) * defect(a, i));
            }
            row -= &x.get(a, c.diss(a));
        }
        sys.add_equation(&row, &Poly::zero())?;
        Ok(sys)
    }

    /// The same equations built from the forms: `i(X_a) d eta_L^a = dE_L -
    /// (R_a E_L) eta_L^a` and `i(X_a) eta_L^a = -E_L`, with the given Reeb
    /// fields.
    pub fn lagrangian_field_equations_intrinsic(
        &self,
        x: &KVectorField,
        unknowns: &[Symbol],
        reeb: &KVectorField,
    ) -> Result<LinSystem> {
        let (_, etas) = self.cartan_contact_forms();
        let omegas: Vec<_> = etas.iter().map(OneForm::exterior_derivative).collect();
        let e = self.energy();
        crate::hamiltonian::contact_equations(&self.chart, x, unknowns, &etas, &omegas, &e, reeb)
    }
}

/// Euler-Lagrange residuals: one per field component, plus the dissipation
/// equation `sum_a ds^a/dt^a - L`.
#[derive(Clone, Debug, PartialEq)]
pub struct ElResidual {
    pub field: Vec<Poly>,
    pub s_equation: Poly,
}

impl ElResidual {
    pub fn substitute(&self, map: &BTreeMap<Symbol, Poly>) -> Result<ElResidual> {
        Ok(ElResidual {
            field: self.field.iter().map(|p| p.substitute(map)).collect::<Result<_>>()?,
            s_equation: self.s_equation.substitute(map)?,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CoordinateMap {
    pub source: Chart,
    pub target: Chart,
    pub components: BTreeMap<Symbol, Poly>,
}

impl CoordinateMap {
    /// Pulls a function on the target back to the source.
    pub fn pullback(&self, f: &Poly) -> Result<Poly> {
        f.substitute(&self.components)
    }

    /// The graph relations `p - component(p)` for the momentum coordinates.
    pub fn graph_relations(&self) -> Vec<Poly> {
        self.target
            .momenta()
            .map(|p| Poly::var(p) - self.components[p].clone())
            .collect()
    }
}

impl fmt::Display for CoordinateMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.target.coordinates() {
            writeln!(f, "{s} = {}", self.components[s])?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    Regular,
    Singular { rank: usize },
}

impl fmt::Display for Regularity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Regularity::Regular => f.write_str("regular"),
            Regularity::Singular { rank } => write!(f, "singular (rank {rank})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Hessian {
    pub labels: Vec<Symbol>,
    pub w: Vec<Vec<Poly>>,
    pub det: Poly,
    pub inverse: Option<Vec<Vec<RatFunc>>>,
}

impl Hessian {
    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn classify(&self) -> Regularity {
        if !self.det.is_zero() && self.det.is_constant_only() {
            return Regularity::Regular;
        }
        if !self.det.is_zero() {
            log::warn!(
                "Hessian determinant `{}` depends on coordinates; classifying by sampled rank",
                self.det
            );
        }
        Regularity::Singular {
            rank: sampled_rank(&self.w),
        }
    }
}

/// Fraction-free Gaussian elimination; every division is exact.
pub fn bareiss_determinant(m: &[Vec<Poly>]) -> Poly {
    let n = m.len();
    if n == 0 {
        return Poly::one();
    }
    let mut a: Vec<Vec<Poly>> = m.to_vec();
    let mut sign = Poly::one();
    let mut prev = Poly::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&r| !a[r][k].is_zero()) else {
            return Poly::zero();
        };
        if p != k {
            a.swap(p, k);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &(&a[i][j] * &a[k][k]) - &(&a[i][k] * &a[k][j]);
                a[i][j] = div_exact(&num, &prev).expect("Bareiss division is exact");
            }
            a[i][k] = Poly::zero();
        }
        prev = a[k][k].clone();
    }
    &sign * &a[n - 1][n - 1]
}

/// Gauss-Jordan inverse over rational functions; `None` when singular.
pub fn invert(m: &[Vec<Poly>]) -> Option<Vec<Vec<RatFunc>>> {
    let n = m.len();
    let mut a: Vec<Vec<RatFunc>> = m.iter().map(|row| row.iter().map(RatFunc::from).collect()).collect();
    let mut inv: Vec<Vec<RatFunc>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { RatFunc::one() } else { RatFunc::zero() })
                .collect()
        })
        .collect();
    for col in 0..n {
        let p = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(p, col);
        inv.swap(p, col);
        let f = a[col][col].recip().ok()?;
        for j in 0..n {
            a[col][j] = &a[col][j] * &f;
            inv[col][j] = &inv[col][j] * &f;
        }
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let g = a[r][col].clone();
            for j in 0..n {
                let da = &g * &a[col][j];
                a[r][j] = &a[r][j] - &da;
                let di = &g * &inv[col][j];
                inv[r][j] = &inv[r][j] - &di;
            }
        }
    }
    Some(inv)
}

/// Numeric rank, maximized over seeded random points whose coordinates and
/// constants are nonzero rationals in [-10, 10].
pub fn sampled_rank(m: &[Vec<Poly>]) -> usize {
    let mut symbols = std::collections::BTreeSet::new();
    for row in m {
        for p in row {
            symbols.extend(p.symbols());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(RANK_SEED);
    let mut best = 0;
    for _ in 0..RANK_SAMPLES {
        let point: HashMap<Symbol, f64> = symbols
            .iter()
            .map(|s| {
                let mut v = 0;
                while v == 0 {
                    v = rng.gen_range(-100..=100);
                }
                (s.clone(), v as f64 / 10.0)
            })
            .collect();
        let numeric: Vec<Vec<f64>> = m
            .iter()
            .map(|row| {
                row.iter()
                    .map(|p| p.eval(&point).expect("all symbols assigned"))
                    .collect()
            })
            .collect();
        best = best.max(numeric_rank(numeric));
    }
    best
}

fn numeric_rank(mut a: Vec<Vec<f64>>) -> usize {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let scale = a.iter().flatten().fold(0.0_f64, |m, x| m.max(x.abs())).max(1.0);
    let mut rank = 0;
    for col in 0..cols {
        if rank == rows {
            break;
        }
        let (p, best) =
            (rank..rows)
                .map(|r| (r, a[r][col].abs()))
                .fold((rank, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if best <= RANK_TOLERANCE * scale {
            continue;
        }
        a.swap(p, rank);
        for r in rank + 1..rows {
            let f = a[r][col] / a[rank][col];
            for j in col..cols {
                a[r][j] -= f * a[rank][j];
            }
        }
        rank += 1;
    }
    rank
}
