//! The unified (Skinner-Rusk) formalism on the Pontryagin chart: field
//! equations, the constraint algorithm and the projections onto the
//! Lagrangian and Hamiltonian sides.

use std::collections::BTreeMap;
use std::fmt;

use crate::bundles::{contact_forms, d_contact, reeb_family, reeb_parameters, Chart, ChartKind, KVectorField};
use crate::error::{Error, Result};
use crate::hamiltonian::{contact_equations, solve_graph};
use crate::lagrangian::LagrangianSystem;
use crate::symcore::{solve_affine, LinSystem, Poly, Reducer, Role, SolveResult, Symbol};

const UNKNOWN_GROUPS: [Role; 4] = [Role::Base, Role::Velocity, Role::Momentum, Role::Dissipation];
const LAGRANGIAN_GROUPS: [Role; 4] = [Role::Base, Role::Momentum, Role::Velocity, Role::Dissipation];

#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub poly: Poly,
    pub generation: usize,
}

/// Constraints in insertion order; each one is independent of the earlier
/// ones modulo reduction.
#[derive(Clone, Debug, Default)]
pub struct ConstraintSet {
    items: Vec<Constraint>,
    reducer: Reducer,
}

impl ConstraintSet {
    pub fn new() -> ConstraintSet {
        ConstraintSet::default()
    }

    /// Returns false, and drops the candidate, when it is zero modulo the
    /// constraints already present.
    pub fn insert(&mut self, poly: Poly, generation: usize) -> bool {
        if poly.is_zero() || !self.reducer.insert(&poly) {
            return false;
        }
        self.items.push(Constraint { poly, generation });
        true
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Constraint> {
        self.items.iter()
    }

    pub fn polys(&self) -> Vec<Poly> {
        self.items.iter().map(|c| c.poly.clone()).collect()
    }

    pub fn generation(&self, g: usize) -> Vec<&Poly> {
        self.items
            .iter()
            .filter(|c| c.generation == g)
            .map(|c| &c.poly)
            .collect()
    }

    /// Highest generation present, 0 when empty.
    pub fn generations(&self) -> usize {
        self.items.iter().map(|c| c.generation).max().unwrap_or(0)
    }

    /// Cumulative constraint count after each generation.
    pub fn counts_by_generation(&self) -> Vec<usize> {
        (1..=self.generations())
            .map(|g| self.items.iter().filter(|c| c.generation <= g).count())
            .collect()
    }

    pub fn reduce(&self, f: &Poly) -> Poly {
        self.reducer.reduce(f)
    }

    pub fn is_zero_mod(&self, f: &Poly) -> bool {
        self.reducer.is_zero(f)
    }

    pub fn reducer(&self) -> &Reducer {
        &self.reducer
    }
}

/// `sum p_i^a v^i_a`.
pub fn coupling(chart: &Chart) -> Result<Poly> {
    if !chart.has_momenta() {
        return Err(Error::MissingMomenta);
    }
    if !chart.has_velocities() {
        return Err(Error::MissingVelocities);
    }
    let mut c = Poly::zero();
    for i in 0..chart.n() {
        for a in 0..chart.k() {
            c += &(Poly::var(chart.mom(i, a)) * Poly::var(chart.vel(i, a)));
        }
    }
    Ok(c)
}

/// `coupling - L`.
pub fn sr_hamiltonian(sys: &LagrangianSystem) -> Poly {
    let chart = sys.chart().with_kind(ChartKind::Pontryagin);
    coupling(&chart).expect("Pontryagin chart") - sys.lagrangian().clone()
}

/// The field equations of the unified formalism for an unknown k-vector
/// field `Z_a[coordinate]`.
#[derive(Clone, Debug)]
pub struct SrSystem {
    pub lagrangian: LagrangianSystem,
    pub chart: Chart,
    pub hamiltonian: Poly,
    pub field: KVectorField,
    pub unknowns: Vec<Symbol>,
    pub equations: LinSystem,
    pub reeb: KVectorField,
}

/// Built with the Reeb fields `d/ds^a`.
pub fn sr_equations(sys: &LagrangianSystem) -> Result<SrSystem> {
    let chart = sys.chart().with_kind(ChartKind::Pontryagin);
    let zero: BTreeMap<Symbol, Poly> = reeb_parameters(&chart)?
        .into_iter()
        .map(|s| (s, Poly::zero()))
        .collect();
    let reeb = reeb_family(&chart)?.substitute(&zero)?;
    sr_equations_with_reeb(sys, &reeb)
}

/// Built with any member of the Reeb family of the Pontryagin chart.
pub fn sr_equations_with_reeb(sys: &LagrangianSystem, reeb: &KVectorField) -> Result<SrSystem> {
    let chart = sys.chart().with_kind(ChartKind::Pontryagin);
    if reeb.chart != chart {
        return Err(Error::ChartMismatch(
            "Reeb fields must live on the Pontryagin chart".into(),
        ));
    }
    let h = sr_hamiltonian(sys);
    let (field, unknowns) = KVectorField::unknown(&chart, "Z", &UNKNOWN_GROUPS)?;
    let etas = contact_forms(&chart)?;
    let omegas = d_contact(&chart)?;
    let equations = contact_equations(&chart, &field, &unknowns, &etas, &omegas, &h, reeb)?;
    Ok(SrSystem {
        lagrangian: sys.clone(),
        chart,
        hamiltonian: h,
        field,
        unknowns,
        equations,
        reeb: reeb.clone(),
    })
}

impl SrSystem {
    /// Solves the field equations once; the residual rows become the
    /// generation-1 constraints.
    pub fn initial_family(&self) -> Result<SolutionFamily> {
        let sol = solve_affine(&self.equations)?;
        let mut constraints = ConstraintSet::new();
        for r in sol.residual_constraints.iter() {
            constraints.insert(r.clone(), 1);
        }
        let family = SolutionFamily::from_solution(self, self.equations.clone(), &sol, constraints, 0)?;
        family.check_dimension()?;
        Ok(family)
    }

    /// Equation rows as polynomials, reduced modulo `constraints`.
    pub fn reduced_rows(&self, constraints: &ConstraintSet) -> Vec<Poly> {
        self.equations
            .row_polys()
            .iter()
            .map(|p| constraints.reduce(p))
            .collect()
    }
}

#[derive(Clone, Debug)]
pub struct SolutionFamily {
    pub chart: Chart,
    pub unknown_field: KVectorField,
    pub unknowns: Vec<Symbol>,
    /// Field equations together with all tangency rows added so far.
    pub equations: LinSystem,
    pub determined: Vec<(Symbol, Poly)>,
    pub free: Vec<Symbol>,
    /// The unknown field with the determined coefficients substituted.
    pub field: KVectorField,
    pub constraints: ConstraintSet,
    pub tangency_passes: usize,
    processed: usize,
}

impl SolutionFamily {
    fn from_solution(
        sr: &SrSystem,
        equations: LinSystem,
        sol: &SolveResult,
        constraints: ConstraintSet,
        tangency_passes: usize,
    ) -> Result<SolutionFamily> {
        let mut determined: Vec<(Symbol, Poly)> = sol.polynomial_assignment()?.into_iter().collect();
        let order: BTreeMap<&Symbol, usize> = sr.unknowns.iter().enumerate().map(|(i, s)| (s, i)).collect();
        determined.sort_by_key(|(s, _)| order[s]);
        let map: BTreeMap<Symbol, Poly> = determined.iter().cloned().collect();
        let field = sr.field.substitute(&map)?;
        Ok(SolutionFamily {
            chart: sr.chart.clone(),
            unknown_field: sr.field.clone(),
            unknowns: sr.unknowns.clone(),
            equations,
            determined,
            free: sol.free.clone(),
            field,
            constraints,
            tangency_passes,
            processed: 0,
        })
    }

    pub fn generations(&self) -> usize {
        self.constraints.generations()
    }

    pub fn get(&self, unknown: &Symbol) -> Option<&Poly> {
        self.determined.iter().find(|(s, _)| s == unknown).map(|(_, p)| p)
    }

    /// The representative with every free parameter set to zero.
    pub fn canonical(&self) -> Result<KVectorField> {
        let zero: BTreeMap<Symbol, Poly> = self.free.iter().map(|s| (s.clone(), Poly::zero())).collect();
        self.field.substitute(&zero)
    }

    /// True when every equation row vanishes modulo the constraints after
    /// substituting the determined coefficients.
    pub fn satisfies_equations(&self) -> Result<bool> {
        let map: BTreeMap<Symbol, Poly> = self.determined.iter().cloned().collect();
        for row in self.equations.row_polys() {
            if !self.constraints.is_zero_mod(&row.substitute(&map)?) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    fn check_dimension(&self) -> Result<()> {
        if self.constraints.len() >= self.chart.dim() {
            return Err(Error::NoDynamics {
                constraints: self.constraints.len(),
                dimension: self.chart.dim(),
            });
        }
        Ok(())
    }
}

impl fmt::Display for SolutionFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "constraints:")?;
        for c in self.constraints.iter() {
            writeln!(f, "  [{}] {} = 0", c.generation, c.poly)?;
        }
        writeln!(f, "determined:")?;
        for (s, p) in &self.determined {
            writeln!(f, "  {s} = {p}")?;
        }
        write!(f, "free:")?;
        for s in &self.free {
            write!(f, " {s}")?;
        }
        writeln!(f)
    }
}

/// Appends `Z_a(zeta)`, reduced modulo the constraints, for every constraint
/// not yet processed, then re-solves. New independent residuals form the
/// next generation.
pub fn tangency_step(sr: &SrSystem, fam: &SolutionFamily) -> Result<SolutionFamily> {
    let mut equations = fam.equations.clone();
    let pending: Vec<Poly> = fam
        .constraints
        .iter()
        .skip(fam.processed)
        .map(|c| c.poly.clone())
        .collect();
    for zeta in &pending {
        for a in 0..fam.chart.k() {
            let row = fam.constraints.reduce(&fam.unknown_field.apply(a, zeta));
            if !row.is_zero() {
                equations.add_equation(&row, &Poly::zero())?;
            }
        }
    }
    let sol = solve_affine(&equations)?;
    let mut constraints = fam.constraints.clone();
    let generation = constraints.generations() + 1;
    for r in &sol.residual_constraints {
        constraints.insert(constraints.reduce(r), generation);
    }
    let mut next = SolutionFamily::from_solution(sr, equations, &sol, constraints, fam.tangency_passes + 1)?;
    next.processed = fam.constraints.len();
    next.check_dimension()?;
    Ok(next)
}

/// Runs tangency passes until no new constraint appears, at most
/// `max_iterations` passes (`2 dim` when `None`).
pub fn constraint_algorithm(sr: &SrSystem, max_iterations: Option<usize>) -> Result<SolutionFamily> {
    let limit = max_iterations.unwrap_or(2 * sr.chart.dim());
    let mut fam = sr.initial_family()?;
    for _ in 0..limit {
        let before = fam.constraints.len();
        fam = tangency_step(sr, &fam)?;
        log::debug!(
            "tangency pass {}: {} constraints",
            fam.tangency_passes,
            fam.constraints.len()
        );
        if fam.constraints.len() == before {
            return Ok(fam);
        }
    }
    Err(Error::NonStabilization(limit))
}

/// Convenience: `sr_equations` followed by `constraint_algorithm`.
pub fn solve_unified(sys: &LagrangianSystem) -> Result<(SrSystem, SolutionFamily)> {
    let sr = sr_equations(sys)?;
    let fam = constraint_algorithm(&sr, None)?;
    Ok((sr, fam))
}

#[derive(Clone, Debug)]
pub struct LagrangianProjection {
    pub field: KVectorField,
    pub free: Vec<Symbol>,
    /// Constraints that survive the graph substitution.
    pub constraints: Vec<Poly>,
}

/// Projects onto the velocity side: momentum components are solved first,
/// momenta are replaced through the graph of the Legendre map and the free
/// coefficients are renamed `X_a[coordinate]`.
pub fn project_lagrangian(sr: &SrSystem, fam: &SolutionFamily) -> Result<LagrangianProjection> {
    let (field, unknowns) = KVectorField::unknown(&fam.chart, "Z", &LAGRANGIAN_GROUPS)?;
    let mut sys = LinSystem::new(unknowns);
    for row in fam.equations.row_polys() {
        sys.add_equation(&row, &Poly::zero())?;
    }
    let sol = solve_affine(&sys)?;
    let map = sol.polynomial_assignment()?;
    let leg = sr.lagrangian.legendre();
    let graph: BTreeMap<Symbol, Poly> = fam
        .chart
        .momenta()
        .map(|p| (p.clone(), leg.components[p].clone()))
        .collect();
    let mut rename = BTreeMap::new();
    let mut free = Vec::new();
    for z in &sol.free {
        let x = Symbol::free(&format!("X{}", &z.name()[1..]))?;
        rename.insert(z.clone(), Poly::var(&x));
        free.push(x);
    }
    let z = field.substitute(&map)?.substitute(&rename)?.substitute(&graph)?;
    let velocity = fam.chart.with_kind(ChartKind::Velocity);
    let constraints = fam
        .constraints
        .iter()
        .map(|c| c.poly.substitute(&graph))
        .filter(|p| !matches!(p, Ok(q) if q.is_zero()))
        .collect::<Result<_>>()?;
    Ok(LagrangianProjection {
        field: z.restrict_to(&velocity)?,
        free,
        constraints,
    })
}

#[derive(Clone, Debug)]
pub struct HamiltonianProjection {
    pub field: KVectorField,
    pub hamiltonian: Poly,
    /// Relations among `(q, p, s)`; empty in the regular case.
    pub constraints: Vec<Poly>,
    /// Velocities left as fibre parameters; empty in the regular case.
    pub fibre: Vec<Symbol>,
}

impl HamiltonianProjection {
    pub fn is_regular(&self) -> bool {
        self.constraints.is_empty() && self.fibre.is_empty()
    }
}

/// Projects onto the momentum side by solving the constraints for the
/// velocities. Undetermined velocities stay in the components.
pub fn project_hamiltonian(sr: &SrSystem, fam: &SolutionFamily) -> Result<HamiltonianProjection> {
    let velocities: Vec<Symbol> = fam.chart.velocities().cloned().collect();
    let inv = solve_graph(velocities, &fam.constraints.polys())?;
    let field = fam.field.substitute(&inv.velocities)?;
    let momentum = fam.chart.with_kind(ChartKind::Momentum);
    Ok(HamiltonianProjection {
        field: field.restrict_to(&momentum)?,
        hamiltonian: sr.hamiltonian.substitute(&inv.velocities)?,
        constraints: inv.constraints,
        fibre: inv.free,
    })
}

/// `(Id x FL)_* X`: velocity-chart fields carried to the Pontryagin chart.
pub fn pushforward(lag: &LagrangianSystem, x: &KVectorField) -> Result<KVectorField> {
    if x.chart != *lag.chart() {
        return Err(Error::ChartMismatch("pushforward needs a velocity-chart field".into()));
    }
    let target = lag.chart().with_kind(ChartKind::Pontryagin);
    let mut z = KVectorField::zero(&target);
    for a in 0..target.k() {
        for c in lag.chart().coordinates() {
            z.set(a, c, x.get(a, c))?;
        }
        for i in 0..target.n() {
            for b in 0..target.k() {
                z.set(a, target.mom(i, b), x.apply(a, &lag.fibre_derivative(i, b)))?;
            }
        }
    }
    Ok(z)
}

/// Pushes the Lagrangian projection forward and checks it against the family:
/// every equation row must vanish modulo the constraints, and the family's
/// components must agree with it once its free coefficients take the pushed
/// values.
pub fn round_trip(sr: &SrSystem, fam: &SolutionFamily) -> Result<bool> {
    let proj = project_lagrangian(sr, fam)?;
    let z = pushforward(&sr.lagrangian, &proj.field)?;
    let mut values = BTreeMap::new();
    for a in 0..fam.chart.k() {
        for c in fam.chart.coordinates() {
            let u = KVectorField::unknown_symbol(&fam.chart, "Z", a, c)?;
            values.insert(u, z.get(a, c));
        }
    }
    for row in fam.equations.row_polys() {
        if !fam.constraints.is_zero_mod(&row.substitute(&values)?) {
            return Ok(false);
        }
    }
    let free: BTreeMap<Symbol, Poly> = fam.free.iter().map(|s| (s.clone(), values[s].clone())).collect();
    let specialized = fam.field.substitute(&free)?;
    for a in 0..fam.chart.k() {
        for c in fam.chart.coordinates() {
            if !fam.constraints.is_zero_mod(&(specialized.get(a, c) - z.get(a, c))) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
