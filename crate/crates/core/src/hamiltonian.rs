//! Hamiltonian side: de Donder-Weyl style contact field equations on the
//! momentum chart, section residuals and their pullback through the
//! Legendre map.

use std::collections::BTreeMap;

use crate::bundles::{
    contact_forms, d_contact, interior_sum, interior_sum_1, Chart, ChartKind, KVectorField, OneForm, TwoForm,
};
use crate::error::{Error, Result};
use crate::lagrangian::{CoordinateMap, ElResidual, LagrangianSystem};
use crate::symcore::{solve_affine, LinSystem, Poly, Role, Symbol};

#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianSystem {
    chart: Chart,
    hamiltonian: Poly,
}

impl HamiltonianSystem {
    pub fn new(chart: &Chart, hamiltonian: Poly) -> Result<HamiltonianSystem> {
        if !chart.has_momenta() {
            return Err(Error::MissingMomenta);
        }
        let chart = chart.with_kind(ChartKind::Momentum);
        for s in hamiltonian.symbols() {
            if s.role() == Role::Velocity {
                return Err(Error::ChartMismatch(format!("Hamiltonian references velocity `{s}`")));
            }
            if s.role().is_coordinate() && !chart.contains(&s) {
                return Err(Error::ChartMismatch(format!("`{s}` is not a coordinate of the chart")));
            }
        }
        Ok(HamiltonianSystem { chart, hamiltonian })
    }

    /// `H = E_L` expressed in momenta; needs an invertible, affine Legendre map.
    pub fn from_lagrangian(lag: &LagrangianSystem) -> Result<HamiltonianSystem> {
        let inv = invert_legendre(lag)?;
        if !inv.is_regular() {
            return Err(Error::ReebUndefined);
        }
        let h = lag.energy().substitute(&inv.velocities)?;
        HamiltonianSystem::new(&lag.chart().with_kind(ChartKind::Momentum), h)
    }

    pub fn chart(&self) -> &Chart {
        &self.chart
    }

    pub fn hamiltonian(&self) -> &Poly {
        &self.hamiltonian
    }

    /// `d/ds^a`, the Reeb fields of the canonical contact forms.
    pub fn reeb(&self) -> KVectorField {
        canonical_reeb(&self.chart)
    }

    pub fn unknown_field(&self) -> Result<(KVectorField, Vec<Symbol>)> {
        KVectorField::unknown(&self.chart, "Y", &[Role::Base, Role::Momentum, Role::Dissipation])
    }

    /// `i(Y_a) d eta^a = dH - (R_a H) eta^a`, `i(Y_a) eta^a = -H`.
    pub fn hdw_field_equations(&self, y: &KVectorField, unknowns: &[Symbol]) -> Result<LinSystem> {
        let etas = contact_forms(&self.chart)?;
        let omegas = d_contact(&self.chart)?;
        contact_equations(
            &self.chart,
            y,
            unknowns,
            &etas,
            &omegas,
            &self.hamiltonian,
            &self.reeb(),
        )
    }

    /// Residuals of the field equations for a section `(q(t), p(t), s(t))`,
    /// written on jet symbols.
    pub fn hdw_section_residual(&self) -> HdwResidual {
        let c = &self.chart;
        let h = &self.hamiltonian;
        let (n, k) = (c.n(), c.k());
        let mut base = Vec::with_capacity(n);
        let mut momentum = Vec::with_capacity(n);
        for i in 0..n {
            base.push(
                (0..k)
                    .map(|a| Poly::var(&c.base_jet1(i, a)) - h.diff(c.mom(i, a)))
                    .collect(),
            );
            let mut r = h.diff(c.base(i));
            for a in 0..k {
                r += &Poly::var(&c.mom_jet(i, a, a));
                r += &(Poly::var(c.mom(i, a)) * h.diff(c.diss(a)));
            }
            momentum.push(r);
        }
        let mut dissipation = h.clone();
        for a in 0..k {
            dissipation += &Poly::var(&c.diss_jet(a, a));
            for i in 0..n {
                dissipation -= &(Poly::var(c.mom(i, a)) * h.diff(c.mom(i, a)));
            }
        }
        HdwResidual {
            base,
            momentum,
            dissipation,
        }
    }

    /// Section residuals pulled back along the Legendre map of `lag`: momenta
    /// become `dL/dv` and their jets the total derivatives of `dL/dv`.
    pub fn pullback_residual(&self, lag: &LagrangianSystem, leg: &CoordinateMap) -> Result<HdwResidual> {
        let c = &self.chart;
        let mut map: BTreeMap<Symbol, Poly> = leg.components.clone();
        for i in 0..c.n() {
            for a in 0..c.k() {
                let dl = lag.fibre_derivative(i, a);
                for b in 0..c.k() {
                    map.insert(c.mom_jet(i, a, b), lag.total_derivative(&dl, b));
                }
            }
        }
        self.hdw_section_residual().substitute(&map)
    }
}

/// Residuals of the section equations: `dq^i/dt^a - dH/dp_i^a`,
/// `sum_a dp_i^a/dt^a + dH/dq^i + p_i^a dH/ds^a` and
/// `sum_a ds^a/dt^a - (p dH/dp - H)`.
#[derive(Clone, Debug, PartialEq)]
pub struct HdwResidual {
    pub base: Vec<Vec<Poly>>,
    pub momentum: Vec<Poly>,
    pub dissipation: Poly,
}

impl HdwResidual {
    pub fn substitute(&self, map: &BTreeMap<Symbol, Poly>) -> Result<HdwResidual> {
        Ok(HdwResidual {
            base: self
                .base
                .iter()
                .map(|row| row.iter().map(|p| p.substitute(map)).collect())
                .collect::<Result<_>>()?,
            momentum: self.momentum.iter().map(|p| p.substitute(map)).collect::<Result<_>>()?,
            dissipation: self.dissipation.substitute(map)?,
        })
    }

    /// True when the pulled-back residual coincides with the Euler-Lagrange
    /// residual and the base equations hold identically.
    pub fn matches(&self, el: &ElResidual) -> bool {
        self.base.iter().flatten().all(Poly::is_zero) && self.momentum == el.field && self.dissipation == el.s_equation
    }
}

/// `d/ds^a` on any chart.
pub fn canonical_reeb(chart: &Chart) -> KVectorField {
    let mut r = KVectorField::zero(chart);
    for a in 0..chart.k() {
        r.set(a, chart.diss(a), Poly::one())
            .expect("dissipation is a coordinate");
    }
    r
}

/// Coefficient equations of `i(Z_a) omega^a = dH - (R_a H) eta^a` together
/// with `i(Z_a) eta^a = -H`. The trace row comes first, then one row per
/// chart coordinate in chart order.
pub fn contact_equations(
    chart: &Chart,
    z: &KVectorField,
    unknowns: &[Symbol],
    etas: &[OneForm],
    omegas: &[TwoForm],
    h: &Poly,
    reeb: &KVectorField,
) -> Result<LinSystem> {
    let mut sys = LinSystem::new(unknowns.to_vec());
    sys.add_equation(&interior_sum_1(z, etas)?, &-h)?;
    let lhs = interior_sum(z, omegas)?;
    let reeb_h: Vec<Poly> = (0..chart.k()).map(|a| reeb.apply(a, h)).collect();
    for c in chart.coordinates() {
        let mut rhs = h.diff(c);
        for (a, eta) in etas.iter().enumerate() {
            let e = eta.get(c);
            if !e.is_zero() && !reeb_h[a].is_zero() {
                rhs -= &(&reeb_h[a] * &e);
            }
        }
        sys.add_equation(&lhs.get(c), &rhs)?;
    }
    Ok(sys)
}

/// Velocities solved from `p = dL/dv`.
#[derive(Clone, Debug, PartialEq)]
pub struct LegendreInverse {
    pub velocities: BTreeMap<Symbol, Poly>,
    /// Velocities left undetermined.
    pub free: Vec<Symbol>,
    /// Relations among `(q, p, s)` alone.
    pub constraints: Vec<Poly>,
}

impl LegendreInverse {
    pub fn is_regular(&self) -> bool {
        self.free.is_empty() && self.constraints.is_empty()
    }
}

/// Solves `p_i^a - dL/dv^i_a = 0` for the velocities.
pub fn invert_legendre(lag: &LagrangianSystem) -> Result<LegendreInverse> {
    let leg = lag.legendre();
    solve_graph(lag.velocity_labels(), &leg.graph_relations())
}

pub(crate) fn solve_graph(velocities: Vec<Symbol>, relations: &[Poly]) -> Result<LegendreInverse> {
    let mut sys = LinSystem::new(velocities);
    for r in relations {
        sys.add_equation(r, &Poly::zero())?;
    }
    let sol = solve_affine(&sys)?;
    Ok(LegendreInverse {
        velocities: sol.polynomial_assignment()?,
        free: sol.free,
        constraints: sol.residual_constraints,
    })
}
