//! The three reference field theories, with hand-written expected data.

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use crate::bundles::{Chart, ChartKind, Naming};
use crate::error::{Error, Result};
use crate::lagrangian::{LagrangianSystem, Regularity};
use crate::symcore::{Poly, Rational, Symbol};

/// Numeric values for some model constants; the rest stay symbolic.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ModelParams {
    values: BTreeMap<String, Rational>,
}

impl ModelParams {
    pub fn symbolic() -> ModelParams {
        ModelParams::default()
    }

    pub fn with(mut self, name: &str, value: Rational) -> ModelParams {
        self.values.insert(name.to_string(), value);
        self
    }

    pub fn set(&mut self, name: &str, value: Rational) {
        self.values.insert(name.to_string(), value);
    }

    pub fn get(&self, name: &str) -> Option<&Rational> {
        self.values.get(name)
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Rational)> {
        self.values.iter()
    }
}

#[derive(Clone, Debug)]
pub struct ModelBundle {
    pub name: &'static str,
    pub system: LagrangianSystem,
    pub pontryagin: Chart,
    pub constants: Vec<Symbol>,
    /// `p - dL/dv`, written out by hand.
    pub expected_constraints: Vec<Poly>,
    /// Euler-Lagrange residual per field component, in the normalization
    /// produced by `el_residual`.
    pub expected_residual: Vec<Poly>,
    pub expected_regularity: Regularity,
    pub expected_hamiltonian: Option<Poly>,
}

impl ModelBundle {
    pub fn chart(&self) -> &Chart {
        self.system.chart()
    }

    /// Replaces the constants named in `params` by their values.
    pub fn specialize(&self, params: &ModelParams) -> Result<ModelBundle> {
        let mut map = BTreeMap::new();
        for (name, value) in params.iter() {
            let s =
                self.constants.iter().find(|c| c.name() == name).ok_or_else(|| {
                    Error::InvalidParameter(format!("model `{}` has no constant `{name}`", self.name))
                })?;
            check_range(name, value)?;
            map.insert(s.clone(), Poly::constant(value.clone()));
        }
        if map.is_empty() {
            return Ok(self.clone());
        }
        let sub = |p: &Poly| p.substitute(&map);
        let subs = |v: &[Poly]| v.iter().map(sub).collect::<Result<Vec<_>>>();
        Ok(ModelBundle {
            name: self.name,
            system: LagrangianSystem::new(self.system.chart(), sub(self.system.lagrangian())?)?,
            pontryagin: self.pontryagin.clone(),
            constants: self
                .constants
                .iter()
                .filter(|c| !map.contains_key(*c))
                .cloned()
                .collect(),
            expected_constraints: subs(&self.expected_constraints)?,
            expected_residual: subs(&self.expected_residual)?,
            expected_regularity: self.expected_regularity,
            expected_hamiltonian: self.expected_hamiltonian.as_ref().map(sub).transpose()?,
        })
    }
}

fn check_range(name: &str, value: &Rational) -> Result<()> {
    let positive = ["ρ", "τ", "μ₀"];
    if positive.contains(&name) && !value.is_positive() {
        return Err(Error::InvalidParameter(format!("{name} must be positive, got {value}")));
    }
    if name == "m²" && value.is_negative() {
        return Err(Error::InvalidParameter(format!("m² must be non-negative, got {value}")));
    }
    Ok(())
}

fn c(name: &str) -> Poly {
    Poly::var(&Symbol::constant(name).expect("constant name"))
}

fn v(s: &Symbol) -> Poly {
    Poly::var(s)
}

fn half() -> Poly {
    Poly::frac(1, 2)
}

pub fn string_naming() -> Naming {
    Naming {
        fields: vec!["u".into()],
        directions: vec!["x".into(), "t".into()],
        time: 1,
        base: "u".into(),
        vel: "u_{a}".into(),
        mom: "p^{a}".into(),
        diss: "s^{a}".into(),
        base_jet: "u_{a}{b}".into(),
        mom_jet: "p^{a}_{b}".into(),
        diss_jet: "s^{a}_{b}".into(),
    }
}

/// `L = rho/2 u_t^2 - tau/2 u_x^2 - gamma s^t` on `(x, t)`.
pub fn damped_string(params: &ModelParams) -> Result<ModelBundle> {
    let chart = Chart::new(string_naming(), ChartKind::Pontryagin)?;
    let (rho, tau, gamma) = (c("ρ"), c("τ"), c("γ"));
    let (x, t) = (0, 1);
    let ux = v(chart.vel(0, x));
    let ut = v(chart.vel(0, t));
    let st = v(chart.diss(t));
    let l = &half() * &rho * ut.pow(2) - &half() * &tau * ux.pow(2) - &gamma * &st;
    let px = v(chart.mom(0, x));
    let pt = v(chart.mom(0, t));
    let utt = v(&chart.base_jet2(0, t, t));
    let uxx = v(&chart.base_jet2(0, x, x));
    let bundle = ModelBundle {
        name: "damped_string",
        system: LagrangianSystem::new(&chart, l)?,
        constants: ["ρ", "τ", "γ"]
            .iter()
            .map(|n| Symbol::constant(n))
            .collect::<Result<_>>()?,
        expected_constraints: vec![&px + &(&tau * &ux), &pt - &(&rho * &ut)],
        expected_residual: vec![&rho * &utt - &tau * &uxx + &gamma * &rho * &ut],
        expected_regularity: Regularity::Regular,
        expected_hamiltonian: Some(
            pt.pow(2) * rho.unit_inverse().expect("unit") * half()
                - px.pow(2) * tau.unit_inverse().expect("unit") * half()
                + &gamma * &st,
        ),
        pontryagin: chart,
    };
    bundle.specialize(params)
}

fn minkowski_directions() -> Vec<String> {
    (0..4).map(|a| a.to_string()).collect()
}

pub fn klein_gordon_naming() -> Naming {
    Naming {
        fields: vec!["φ".into()],
        directions: minkowski_directions(),
        time: 0,
        base: "φ".into(),
        vel: "φ_{a}".into(),
        mom: "p^{a}".into(),
        diss: "s^{a}".into(),
        base_jet: "φ_{a}{b}".into(),
        mom_jet: "p^{a}_{b}".into(),
        diss_jet: "s^{a}_{b}".into(),
    }
}

fn metric(a: usize) -> i64 {
    if a == 0 {
        1
    } else {
        -1
    }
}

/// `L = 1/2 g^{ab} phi_a phi_b - m^2/2 phi^2 + gamma_a s^a` in 3+1 dimensions.
pub fn damped_klein_gordon(params: &ModelParams) -> Result<ModelBundle> {
    let chart = Chart::new(klein_gordon_naming(), ChartKind::Pontryagin)?;
    let m2 = c("m²");
    let gammas: Vec<Poly> = (0..4).map(|a| c(&format!("γ_{a}"))).collect();
    let phi = v(chart.base(0));
    let mut l = -(&half() * &m2 * phi.pow(2));
    let mut h = &half() * &m2 * phi.pow(2);
    let mut constraints = Vec::new();
    let mut residual = &m2 * &phi;
    for a in 0..4 {
        let g = Poly::int(metric(a));
        let va = v(chart.vel(0, a));
        let pa = v(chart.mom(0, a));
        l += &(&half() * &g * va.pow(2));
        l += &(&gammas[a] * &v(chart.diss(a)));
        h += &(&half() * &g * pa.pow(2));
        h -= &(&gammas[a] * &v(chart.diss(a)));
        constraints.push(&pa - &(&g * &va));
        residual += &(&g * &v(&chart.base_jet2(0, a, a)));
        residual -= &(&g * &gammas[a] * &va);
    }
    let mut constants = vec![Symbol::constant("m²")?];
    for a in 0..4 {
        constants.push(Symbol::constant(&format!("γ_{a}"))?);
    }
    let bundle = ModelBundle {
        name: "damped_klein_gordon",
        system: LagrangianSystem::new(&chart, l)?,
        constants,
        expected_constraints: constraints,
        expected_residual: vec![residual],
        expected_regularity: Regularity::Regular,
        expected_hamiltonian: Some(h),
        pontryagin: chart,
    };
    bundle.specialize(params)
}

pub fn maxwell_naming() -> Naming {
    Naming {
        fields: minkowski_directions(),
        directions: minkowski_directions(),
        time: 0,
        base: "A_{i}".into(),
        vel: "A_{i},{a}".into(),
        mom: "P^{i},{a}".into(),
        diss: "s^{a}".into(),
        base_jet: "A_{i},{a}{b}".into(),
        mom_jet: "P^{i},{a}_{b}".into(),
        diss_jet: "s^{a}_{b}".into(),
    }
}

/// `F_{mn} = A_{n,m} - A_{m,n}`.
pub fn field_strength(chart: &Chart, m: usize, n: usize) -> Poly {
    v(chart.vel(n, m)) - v(chart.vel(m, n))
}

/// `F^{mn}` with the metric `diag(1, -1, -1, -1)`.
pub fn field_strength_up(chart: &Chart, m: usize, n: usize) -> Poly {
    field_strength(chart, m, n).scale(&Rational::from_integer((metric(m) * metric(n)).into()))
}

/// `d_a F^{mn}` on second jets.
fn field_strength_up_jet(chart: &Chart, m: usize, n: usize, a: usize) -> Poly {
    let f = v(&chart.base_jet2(n, m, a)) - v(&chart.base_jet2(m, n, a));
    f.scale(&Rational::from_integer((metric(m) * metric(n)).into()))
}

/// `L = -1/(4 mu0) F_{mn} F^{mn} - gamma_a s^a`.
pub fn dissipative_maxwell(params: &ModelParams) -> Result<ModelBundle> {
    let chart = Chart::new(maxwell_naming(), ChartKind::Pontryagin)?;
    let inv_mu = c("μ₀").unit_inverse().expect("unit");
    let gammas: Vec<Poly> = (0..4).map(|a| c(&format!("γ_{a}"))).collect();
    let mut ff = Poly::zero();
    for m in 0..4 {
        for n in 0..4 {
            ff += &(field_strength(&chart, m, n) * field_strength_up(&chart, m, n));
        }
    }
    let mut l = -(ff * &inv_mu * Poly::frac(1, 4));
    for a in 0..4 {
        l -= &(&gammas[a] * &v(chart.diss(a)));
    }
    let mut constraints = Vec::new();
    for i in 0..4 {
        for a in 0..4 {
            constraints.push(v(chart.mom(i, a)) - field_strength_up(&chart, i, a) * &inv_mu);
        }
    }
    let residual = (0..4)
        .map(|m| {
            let mut r = Poly::zero();
            for a in 0..4 {
                r += &field_strength_up_jet(&chart, a, m, a);
                r += &(&gammas[a] * &field_strength_up(&chart, a, m));
            }
            -(r * &inv_mu)
        })
        .collect();
    let mut constants = vec![Symbol::constant("μ₀")?];
    for a in 0..4 {
        constants.push(Symbol::constant(&format!("γ_{a}"))?);
    }
    let bundle = ModelBundle {
        name: "dissipative_maxwell",
        system: LagrangianSystem::new(&chart, l)?,
        constants,
        expected_constraints: constraints,
        expected_residual: residual,
        expected_regularity: Regularity::Singular { rank: 6 },
        expected_hamiltonian: None,
        pontryagin: chart,
    };
    bundle.specialize(params)
}

pub const MODEL_NAMES: [&str; 3] = ["damped_string", "damped_klein_gordon", "dissipative_maxwell"];

/// Looks a model up by name; `string`, `kg` and `maxwell` are accepted too.
pub fn by_name(name: &str, params: &ModelParams) -> Result<ModelBundle> {
    match name {
        "damped_string" | "string" => damped_string(params),
        "damped_klein_gordon" | "klein_gordon" | "kg" => damped_klein_gordon(params),
        "dissipative_maxwell" | "maxwell" => dissipative_maxwell(params),
        other => Err(Error::UnknownModel(other.to_string())),
    }
}

/// `gamma_a = (-gamma, 0, 0, 0)`: the Klein-Gordon model specialized to the
/// telegrapher equation. `m²` stays symbolic.
pub fn telegrapher_params(gamma: Rational) -> ModelParams {
    let mut p = ModelParams::symbolic();
    p.set("γ_0", -gamma);
    for a in 1..4 {
        p.set(&format!("γ_{a}"), Rational::zero());
    }
    p
}
