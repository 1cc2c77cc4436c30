//! Coordinate charts of the velocity, momentum and Pontryagin bundles, and
//! the contact forms, interior products and Reeb fields living on them.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::symcore::{Poly, Role, Symbol};

/// Name templates for the coordinates of a chart. Placeholders: `{i}` is a
/// field label, `{a}` and `{b}` are direction labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Naming {
    pub fields: Vec<String>,
    pub directions: Vec<String>,
    /// Index into `directions` of the evolution direction.
    pub time: usize,
    pub base: String,
    pub vel: String,
    pub mom: String,
    pub diss: String,
    pub base_jet: String,
    pub mom_jet: String,
    pub diss_jet: String,
}

impl Naming {
    /// `q_i`, `v_i_a`, `p_i_a`, `s_a` with 1-based labels.
    pub fn generic(n: usize, k: usize) -> Naming {
        Naming {
            fields: (1..=n).map(|i| i.to_string()).collect(),
            directions: (1..=k).map(|a| a.to_string()).collect(),
            time: 0,
            base: "q_{i}".into(),
            vel: "v_{i}_{a}".into(),
            mom: "p_{i}_{a}".into(),
            diss: "s_{a}".into(),
            base_jet: "q_{i}_{a}_{b}".into(),
            mom_jet: "p_{i}_{a}_{b}".into(),
            diss_jet: "s_{a}_{b}".into(),
        }
    }

    fn fill(template: &str, i: Option<&str>, a: Option<&str>, b: Option<&str>) -> String {
        let mut out = template.to_string();
        if let Some(i) = i {
            out = out.replace("{i}", i);
        }
        if let Some(a) = a {
            out = out.replace("{a}", a);
        }
        if let Some(b) = b {
            out = out.replace("{b}", b);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ChartKind {
    /// Coordinates `(q, v, s)` of the velocity bundle times R^k.
    Velocity,
    /// Coordinates `(q, p, s)` of the momentum bundle times R^k.
    Momentum,
    /// Coordinates `(q, v, p, s)`.
    Pontryagin,
}

#[derive(Clone)]
pub struct Chart {
    naming: Arc<Naming>,
    kind: ChartKind,
    base: Vec<Symbol>,
    vel: Vec<Vec<Symbol>>,
    mom: Vec<Vec<Symbol>>,
    diss: Vec<Symbol>,
    coords: Vec<Symbol>,
    index: HashMap<Symbol, usize>,
}

impl PartialEq for Chart {
    fn eq(&self, other: &Self) -> bool {
        self.kind == other.kind && self.naming == other.naming
    }
}

impl fmt::Debug for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Chart({:?}, n={}, k={}, [", self.kind, self.n(), self.k())?;
        for (j, c) in self.coords.iter().enumerate() {
            if j > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("])")
    }
}

impl Chart {
    pub fn new(naming: Naming, kind: ChartKind) -> Result<Chart> {
        let n = naming.fields.len();
        let k = naming.directions.len();
        if n == 0 || k == 0 {
            return Err(Error::InvalidDimensions(format!("n = {n}, k = {k}")));
        }
        if naming.time >= k {
            return Err(Error::InvalidDimensions(format!(
                "time direction {} out of range for k = {k}",
                naming.time
            )));
        }
        let base = naming
            .fields
            .iter()
            .map(|i| Symbol::new(&Naming::fill(&naming.base, Some(i), None, None), Role::Base))
            .collect::<Result<Vec<_>>>()?;
        let grid = |template: &str, role: Role| -> Result<Vec<Vec<Symbol>>> {
            naming
                .fields
                .iter()
                .map(|i| {
                    naming
                        .directions
                        .iter()
                        .map(|a| Symbol::new(&Naming::fill(template, Some(i), Some(a), None), role))
                        .collect()
                })
                .collect()
        };
        let vel = if kind == ChartKind::Momentum {
            Vec::new()
        } else {
            grid(&naming.vel, Role::Velocity)?
        };
        let mom = if kind == ChartKind::Velocity {
            Vec::new()
        } else {
            grid(&naming.mom, Role::Momentum)?
        };
        let diss = naming
            .directions
            .iter()
            .map(|a| Symbol::new(&Naming::fill(&naming.diss, None, Some(a), None), Role::Dissipation))
            .collect::<Result<Vec<_>>>()?;
        let mut coords: Vec<Symbol> = base.clone();
        coords.extend(vel.iter().flatten().cloned());
        coords.extend(mom.iter().flatten().cloned());
        coords.extend(diss.iter().cloned());
        let index: HashMap<Symbol, usize> = coords.iter().enumerate().map(|(j, s)| (s.clone(), j)).collect();
        if index.len() != coords.len() {
            return Err(Error::InvalidDimensions("coordinate names collide".into()));
        }
        Ok(Chart {
            naming: Arc::new(naming),
            kind,
            base,
            vel,
            mom,
            diss,
            coords,
            index,
        })
    }

    pub fn with_kind(&self, kind: ChartKind) -> Chart {
        Chart::new((*self.naming).clone(), kind).expect("naming already validated")
    }

    pub fn naming(&self) -> &Naming {
        &self.naming
    }

    pub fn kind(&self) -> ChartKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.base.len()
    }

    pub fn k(&self) -> usize {
        self.diss.len()
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coordinates(&self) -> &[Symbol] {
        &self.coords
    }

    pub fn position(&self, s: &Symbol) -> Option<usize> {
        self.index.get(s).copied()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.index.contains_key(s)
    }

    pub fn has_velocities(&self) -> bool {
        !self.vel.is_empty()
    }

    pub fn has_momenta(&self) -> bool {
        !self.mom.is_empty()
    }

    pub fn base(&self, i: usize) -> &Symbol {
        &self.base[i]
    }

    pub fn bases(&self) -> &[Symbol] {
        &self.base
    }

    pub fn vel(&self, i: usize, a: usize) -> &Symbol {
        &self.vel[i][a]
    }

    pub fn mom(&self, i: usize, a: usize) -> &Symbol {
        &self.mom[i][a]
    }

    pub fn diss(&self, a: usize) -> &Symbol {
        &self.diss[a]
    }

    pub fn velocities(&self) -> impl Iterator<Item = &Symbol> {
        self.vel.iter().flatten()
    }

    pub fn momenta(&self) -> impl Iterator<Item = &Symbol> {
        self.mom.iter().flatten()
    }

    pub fn dissipations(&self) -> &[Symbol] {
        &self.diss
    }

    pub fn direction_label(&self, a: usize) -> &str {
        &self.naming.directions[a]
    }

    pub fn time_direction(&self) -> usize {
        self.naming.time
    }

    /// Directions with the time direction first, the rest in declared order.
    pub fn direction_order(&self) -> Vec<usize> {
        let t = self.naming.time;
        std::iter::once(t).chain((0..self.k()).filter(|a| *a != t)).collect()
    }

    /// First jet `dq^i/dt^a`; it shares its symbol with the velocity `v^i_a`.
    pub fn base_jet1(&self, i: usize, a: usize) -> Symbol {
        let name = Naming::fill(
            &self.naming.vel,
            Some(&self.naming.fields[i]),
            Some(&self.naming.directions[a]),
            None,
        );
        Symbol::new(&name, Role::Velocity).expect("velocity names are velocity symbols")
    }

    /// Second jet `d^2 q^i / dt^a dt^b`, stored with `a <= b`.
    pub fn base_jet2(&self, i: usize, a: usize, b: usize) -> Symbol {
        let (a, b) = if a <= b { (a, b) } else { (b, a) };
        self.jet(&self.naming.base_jet, Some(i), a, Some(b))
    }

    /// `d p_i^a / dt^b`.
    pub fn mom_jet(&self, i: usize, a: usize, b: usize) -> Symbol {
        self.jet(&self.naming.mom_jet, Some(i), a, Some(b))
    }

    /// `d s^a / dt^b`.
    pub fn diss_jet(&self, a: usize, b: usize) -> Symbol {
        self.jet(&self.naming.diss_jet, None, a, Some(b))
    }

    fn jet(&self, template: &str, i: Option<usize>, a: usize, b: Option<usize>) -> Symbol {
        let name = Naming::fill(
            template,
            i.map(|i| self.naming.fields[i].as_str()),
            Some(&self.naming.directions[a]),
            b.map(|b| self.naming.directions[b].as_str()),
        );
        Symbol::new(&name, Role::Jet).expect("jet names are jet symbols")
    }

    fn require_momenta(&self) -> Result<()> {
        if self.has_momenta() {
            Ok(())
        } else {
            Err(Error::MissingMomenta)
        }
    }
}

/// The Pontryagin chart with generic names `q_i`, `v_i_a`, `p_i_a`, `s_a`.
pub fn pontryagin_chart(n: usize, k: usize) -> Result<Chart> {
    if n == 0 || k == 0 {
        return Err(Error::InvalidDimensions(format!(
            "n = {n}, k = {k}; both must be positive"
        )));
    }
    Chart::new(Naming::generic(n, k), ChartKind::Pontryagin)
}

#[derive(Clone, Debug, PartialEq)]
pub struct OneForm {
    pub chart: Chart,
    pub coeff: BTreeMap<Symbol, Poly>,
}

impl OneForm {
    pub fn zero(chart: &Chart) -> OneForm {
        OneForm {
            chart: chart.clone(),
            coeff: BTreeMap::new(),
        }
    }

    pub fn get(&self, s: &Symbol) -> Poly {
        self.coeff.get(s).cloned().unwrap_or_default()
    }

    pub fn add(&mut self, s: &Symbol, c: &Poly) {
        let entry = self.coeff.entry(s.clone()).or_default();
        *entry += c;
        if entry.is_zero() {
            self.coeff.remove(s);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_empty()
    }

    /// Exterior derivative of a form with polynomial coefficients.
    pub fn exterior_derivative(&self) -> TwoForm {
        let mut out = TwoForm::zero(&self.chart);
        for (x, a) in &self.coeff {
            for y in self.chart.coordinates() {
                let d = a.diff(y);
                if !d.is_zero() {
                    // d(a dx) = da/dy dy ^ dx
                    out.add(y, x, &d);
                }
            }
        }
        out
    }

    pub fn scale(&self, f: &Poly) -> OneForm {
        let mut out = OneForm::zero(&self.chart);
        for (s, c) in &self.coeff {
            out.add(s, &(c * f));
        }
        out
    }
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for s in self.chart.coordinates() {
            if let Some(c) = self.coeff.get(s) {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                if c.is_one() {
                    write!(f, "d{s}")?;
                } else {
                    write!(f, "({c})*d{s}")?;
                }
            }
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// A 2-form stored on ordered coordinate pairs `(x, y)` with `x` before `y`
/// in chart order.
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    pub chart: Chart,
    coeff: BTreeMap<(usize, usize), Poly>,
}

impl TwoForm {
    pub fn zero(chart: &Chart) -> TwoForm {
        TwoForm {
            chart: chart.clone(),
            coeff: BTreeMap::new(),
        }
    }

    /// Adds `c dx ^ dy`.
    pub fn add(&mut self, x: &Symbol, y: &Symbol, c: &Poly) {
        let (Some(i), Some(j)) = (self.chart.position(x), self.chart.position(y)) else {
            return;
        };
        if i == j {
            return;
        }
        let (key, c) = if i < j { ((i, j), c.clone()) } else { ((j, i), -c) };
        let entry = self.coeff.entry(key).or_default();
        *entry += &c;
        if entry.is_zero() {
            self.coeff.remove(&key);
        }
    }

    /// Coefficient of `dx ^ dy`; antisymmetric in its arguments.
    pub fn coeff(&self, x: &Symbol, y: &Symbol) -> Poly {
        let (Some(i), Some(j)) = (self.chart.position(x), self.chart.position(y)) else {
            return Poly::zero();
        };
        match i.cmp(&j) {
            std::cmp::Ordering::Less => self.coeff.get(&(i, j)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Greater => -self.coeff.get(&(j, i)).cloned().unwrap_or_default(),
            std::cmp::Ordering::Equal => Poly::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_empty()
    }

    /// `i(Z) w` for a single vector field given by its components.
    pub fn contract(&self, z: &[Poly]) -> OneForm {
        let mut out = OneForm::zero(&self.chart);
        let coords = self.chart.coordinates();
        for ((i, j), c) in &self.coeff {
            // i(Z)(c dx^dy) = c (Z^x dy - Z^y dx)
            out.add(&coords[*j], &(c * &z[*i]));
            out.add(&coords[*i], &-(c * &z[*j]));
        }
        out
    }
}

impl fmt::Display for TwoForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeff.is_empty() {
            return f.write_str("0");
        }
        let coords = self.chart.coordinates();
        for (n, ((i, j), c)) in self.coeff.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if c.is_one() {
                write!(f, "d{} ^ d{}", coords[*i], coords[*j])?;
            } else {
                write!(f, "({c})*d{} ^ d{}", coords[*i], coords[*j])?;
            }
        }
        Ok(())
    }
}

/// `eta^a = ds^a - p_i^a dq^i`.
pub fn contact_forms(chart: &Chart) -> Result<Vec<OneForm>> {
    chart.require_momenta()?;
    Ok((0..chart.k())
        .map(|a| {
            let mut eta = OneForm::zero(chart);
            eta.add(chart.diss(a), &Poly::one());
            for i in 0..chart.n() {
                eta.add(chart.base(i), &-Poly::var(chart.mom(i, a)));
            }
            eta
        })
        .collect())
}

/// `d eta^a = dq^i ^ dp_i^a`.
pub fn d_contact(chart: &Chart) -> Result<Vec<TwoForm>> {
    chart.require_momenta()?;
    Ok((0..chart.k())
        .map(|a| {
            let mut w = TwoForm::zero(chart);
            for i in 0..chart.n() {
                w.add(chart.base(i), chart.mom(i, a), &Poly::one());
            }
            w
        })
        .collect())
}

/// A k-tuple of vector fields, components indexed by chart position.
#[derive(Clone, Debug, PartialEq)]
pub struct KVectorField {
    pub chart: Chart,
    comp: Vec<Vec<Poly>>,
}

impl KVectorField {
    pub fn zero(chart: &Chart) -> KVectorField {
        KVectorField {
            chart: chart.clone(),
            comp: vec![vec![Poly::zero(); chart.dim()]; chart.k()],
        }
    }

    /// Every component a fresh unknown named `{prefix}_{a}[{coordinate}]`.
    /// Also returns the unknowns, ordered with the time direction first and
    /// the coordinate groups in the given order.
    pub fn unknown(chart: &Chart, prefix: &str, groups: &[Role]) -> Result<(KVectorField, Vec<Symbol>)> {
        let mut z = KVectorField::zero(chart);
        let mut order = Vec::new();
        for &role in groups {
            for a in chart.direction_order() {
                for (j, c) in chart.coordinates().iter().enumerate() {
                    if c.role() != role {
                        continue;
                    }
                    let name = format!("{prefix}_{}[{}]", chart.direction_label(a), c.name());
                    let s = Symbol::free(&name)?;
                    z.comp[a][j] = Poly::var(&s);
                    order.push(s);
                }
            }
        }
        Ok((z, order))
    }

    pub fn unknown_symbol(chart: &Chart, prefix: &str, a: usize, coord: &Symbol) -> Result<Symbol> {
        Symbol::free(&format!("{prefix}_{}[{}]", chart.direction_label(a), coord.name()))
    }

    pub fn get(&self, a: usize, coord: &Symbol) -> Poly {
        self.chart
            .position(coord)
            .map(|j| self.comp[a][j].clone())
            .unwrap_or_default()
    }

    pub fn set(&mut self, a: usize, coord: &Symbol, value: Poly) -> Result<()> {
        let j = self
            .chart
            .position(coord)
            .ok_or_else(|| Error::ChartMismatch(format!("{coord} is not a chart coordinate")))?;
        self.comp[a][j] = value;
        Ok(())
    }

    pub fn component(&self, a: usize) -> &[Poly] {
        &self.comp[a]
    }

    /// `Z_a(f)`, the derivative of `f` along the `a`-th field.
    pub fn apply(&self, a: usize, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (j, c) in self.chart.coordinates().iter().enumerate() {
            if self.comp[a][j].is_zero() {
                continue;
            }
            let d = f.diff(c);
            if !d.is_zero() {
                out += &(&d * &self.comp[a][j]);
            }
        }
        out
    }

    pub fn map(&self, f: impl Fn(&Poly) -> Result<Poly>) -> Result<KVectorField> {
        let comp = self
            .comp
            .iter()
            .map(|row| row.iter().map(&f).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(KVectorField {
            chart: self.chart.clone(),
            comp,
        })
    }

    pub fn substitute(&self, map: &BTreeMap<Symbol, Poly>) -> Result<KVectorField> {
        self.map(|p| p.substitute(map))
    }

    pub fn scale(&self, f: &Poly) -> KVectorField {
        self.map(|p| Ok(p * f)).expect("infallible")
    }

    pub fn add(&self, other: &KVectorField) -> Result<KVectorField> {
        if self.chart != other.chart {
            return Err(Error::ChartMismatch("adding fields on different charts".into()));
        }
        let mut out = self.clone();
        for (ra, rb) in out.comp.iter_mut().zip(&other.comp) {
            for (x, y) in ra.iter_mut().zip(rb) {
                *x += y;
            }
        }
        Ok(out)
    }

    /// Free-parameter symbols appearing in any component.
    pub fn free_symbols(&self) -> Vec<Symbol> {
        let mut set = std::collections::BTreeSet::new();
        for row in &self.comp {
            for p in row {
                set.extend(p.symbols().into_iter().filter(|s| s.role() == Role::FreeParameter));
            }
        }
        set.into_iter().collect()
    }

    /// Re-expresses the field on another chart sharing the same naming:
    /// components of shared coordinates are kept, the others dropped.
    pub fn restrict_to(&self, chart: &Chart) -> Result<KVectorField> {
        if chart.naming() != self.chart.naming() {
            return Err(Error::ChartMismatch("charts use different naming".into()));
        }
        let mut out = KVectorField::zero(chart);
        for a in 0..chart.k() {
            for c in chart.coordinates() {
                out.set(a, c, self.get(a, c))?;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for KVectorField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for a in 0..self.chart.k() {
            write!(f, "[{}]", self.chart.direction_label(a))?;
            let mut any = false;
            for (j, c) in self.chart.coordinates().iter().enumerate() {
                let v = &self.comp[a][j];
                if v.is_zero() {
                    continue;
                }
                any = true;
                write!(f, " ({v})*d/d{c}")?;
            }
            if !any {
                f.write_str(" 0")?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

fn check_chart(z: &KVectorField, chart: &Chart) -> Result<()> {
    if &z.chart != chart {
        return Err(Error::ChartMismatch(format!(
            "field on {:?} chart, forms on {:?} chart",
            z.chart.kind(),
            chart.kind()
        )));
    }
    Ok(())
}

/// `sum_a i(Z_a) omega^a`.
pub fn interior_sum(z: &KVectorField, omegas: &[TwoForm]) -> Result<OneForm> {
    if omegas.len() != z.chart.k() {
        return Err(Error::ChartMismatch(format!(
            "{} two-forms for k = {}",
            omegas.len(),
            z.chart.k()
        )));
    }
    let mut out = OneForm::zero(&z.chart);
    for (a, w) in omegas.iter().enumerate() {
        check_chart(z, &w.chart)?;
        for (s, c) in w.contract(&z.comp[a]).coeff {
            out.add(&s, &c);
        }
    }
    Ok(out)
}

/// `sum_a i(Z_a) eta^a`.
pub fn interior_sum_1(z: &KVectorField, etas: &[OneForm]) -> Result<Poly> {
    if etas.len() != z.chart.k() {
        return Err(Error::ChartMismatch(format!(
            "{} one-forms for k = {}",
            etas.len(),
            z.chart.k()
        )));
    }
    let mut out = Poly::zero();
    for (a, eta) in etas.iter().enumerate() {
        check_chart(z, &eta.chart)?;
        out += &pair(eta, &z.comp[a]);
    }
    Ok(out)
}

/// `eta(Z)` for a single vector field.
pub fn pair(eta: &OneForm, z: &[Poly]) -> Poly {
    let mut out = Poly::zero();
    for (s, c) in &eta.coeff {
        if let Some(j) = eta.chart.position(s) {
            out += &(c * &z[j]);
        }
    }
    out
}

/// Reeb fields of the Pontryagin chart, `R_a = d/ds^a + R_a[v] d/dv` with
/// arbitrary coefficients `R_a[v]` as free parameters.
pub fn reeb_family(chart: &Chart) -> Result<KVectorField> {
    if chart.kind() != ChartKind::Pontryagin {
        return Err(Error::ChartMismatch("Reeb family needs the Pontryagin chart".into()));
    }
    let mut r = KVectorField::zero(chart);
    for a in 0..chart.k() {
        r.set(a, chart.diss(a), Poly::one())?;
        for v in chart.velocities().cloned().collect::<Vec<_>>() {
            let s = KVectorField::unknown_symbol(chart, "R", a, &v)?;
            r.set(a, &v, Poly::var(&s))?;
        }
    }
    Ok(r)
}

/// The free coefficients of `reeb_family(chart)`.
pub fn reeb_parameters(chart: &Chart) -> Result<Vec<Symbol>> {
    let mut out = Vec::new();
    for a in 0..chart.k() {
        for v in chart.velocities() {
            out.push(KVectorField::unknown_symbol(chart, "R", a, v)?);
        }
    }
    Ok(out)
}
