use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use super::poly::Poly;
use super::ratfunc::RatFunc;
use super::symbol::Symbol;
use crate::error::{Error, Result};

/// One affine equation `sum_j coeffs[j] * x_j = rhs`, sparse in the unknowns.
#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub coeffs: BTreeMap<usize, RatFunc>,
    pub rhs: RatFunc,
}

impl Row {
    pub fn is_trivial(&self) -> bool {
        self.coeffs.is_empty() && self.rhs.is_zero()
    }

    fn scale(&mut self, f: &RatFunc) {
        for c in self.coeffs.values_mut() {
            *c = &*c * f;
        }
        self.rhs = &self.rhs * f;
    }

    /// `self -= f * other`
    fn sub_scaled(&mut self, f: &RatFunc, other: &Row) {
        for (j, c) in &other.coeffs {
            let delta = f * c;
            let entry = self.coeffs.entry(*j).or_insert_with(RatFunc::zero);
            *entry = &*entry - &delta;
            if entry.is_zero() {
                self.coeffs.remove(j);
            }
        }
        self.rhs = &self.rhs - &(f * &other.rhs);
    }
}

/// An affine system over declared unknowns.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct LinSystem {
    unknowns: Vec<Symbol>,
    index: BTreeMap<Symbol, usize>,
    rows: Vec<Row>,
}

impl LinSystem {
    pub fn new(unknowns: Vec<Symbol>) -> LinSystem {
        let index = unknowns.iter().enumerate().map(|(i, s)| (s.clone(), i)).collect();
        LinSystem {
            unknowns,
            index,
            rows: Vec::new(),
        }
    }

    pub fn unknowns(&self) -> &[Symbol] {
        &self.unknowns
    }

    pub fn rows(&self) -> &[Row] {
        &self.rows
    }

    pub fn unknown_set(&self) -> BTreeSet<Symbol> {
        self.unknowns.iter().cloned().collect()
    }

    pub fn push_row(&mut self, row: Row) -> Result<()> {
        if let Some(j) = row.coeffs.keys().find(|j| **j >= self.unknowns.len()) {
            return Err(Error::InvalidDimensions(format!("row references unknown #{j}")));
        }
        self.rows.push(row);
        Ok(())
    }

    /// Adds the equation `lhs = rhs`; both sides must be affine in the unknowns.
    pub fn add_equation(&mut self, lhs: &Poly, rhs: &Poly) -> Result<()> {
        let (linear, rest) = (lhs - rhs).split_affine(&self.unknown_set())?;
        let coeffs = linear
            .into_iter()
            .map(|(s, c)| (self.index[&s], RatFunc::from(c)))
            .collect();
        self.rows.push(Row {
            coeffs,
            rhs: RatFunc::from(-rest),
        });
        Ok(())
    }

    /// The row as a polynomial `sum c_j x_j - rhs`, when all entries are
    /// polynomial.
    pub fn row_poly(&self, r: usize) -> Option<Poly> {
        let row = &self.rows[r];
        let mut out = -row.rhs.to_poly()?;
        for (j, c) in &row.coeffs {
            out += &(c.to_poly()? * Poly::var(&self.unknowns[*j]));
        }
        Some(out)
    }

    pub fn row_polys(&self) -> Vec<Poly> {
        (0..self.rows.len()).filter_map(|r| self.row_poly(r)).collect()
    }

    /// True if some row equals `lhs - rhs` up to a nonzero rational factor.
    pub fn contains_equation(&self, lhs: &Poly, rhs: &Poly) -> bool {
        let target = lhs - rhs;
        self.row_polys().iter().any(|p| proportional(p, &target))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Applies `f` to every coefficient and right-hand side.
    pub fn map_entries(&self, f: impl Fn(&RatFunc) -> Result<RatFunc>) -> Result<LinSystem> {
        let mut out = LinSystem::new(self.unknowns.clone());
        for row in &self.rows {
            let mut coeffs = BTreeMap::new();
            for (j, c) in &row.coeffs {
                let c = f(c)?;
                if !c.is_zero() {
                    coeffs.insert(*j, c);
                }
            }
            out.rows.push(Row {
                coeffs,
                rhs: f(&row.rhs)?,
            });
        }
        Ok(out)
    }
}

/// `a = c * b` for some nonzero rational `c`.
pub fn proportional(a: &Poly, b: &Poly) -> bool {
    match (a.leading(), b.leading()) {
        (None, None) => true,
        (Some((ma, ca)), Some((mb, cb))) if ma == mb => b.scale(&(ca / cb)) == *a,
        _ => false,
    }
}

impl fmt::Display for LinSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in &self.rows {
            let mut lhs = String::new();
            for (k, (j, c)) in row.coeffs.iter().enumerate() {
                if k > 0 {
                    lhs.push_str(" + ");
                }
                lhs.push_str(&format!("({c})*{}", self.unknowns[*j]));
            }
            if lhs.is_empty() {
                lhs.push('0');
            }
            writeln!(f, "{lhs} = {}", row.rhs)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveResult {
    /// Pivot unknowns in elimination order, each expressed through the free
    /// unknowns.
    pub particular: Vec<(Symbol, RatFunc)>,
    pub free: Vec<Symbol>,
    pub residual_constraints: Vec<Poly>,
}

impl SolveResult {
    pub fn get(&self, s: &Symbol) -> Option<&RatFunc> {
        self.particular.iter().find(|(t, _)| t == s).map(|(_, v)| v)
    }

    pub fn pivot_count(&self) -> usize {
        self.particular.len()
    }

    /// Polynomial assignment of the pivots; fails on non-unit denominators.
    pub fn polynomial_assignment(&self) -> Result<BTreeMap<Symbol, Poly>> {
        self.particular
            .iter()
            .map(|(s, v)| {
                v.to_poly()
                    .map(|p| (s.clone(), p))
                    .ok_or_else(|| Error::NonPolynomial(format!("{s} = {v}")))
            })
            .collect()
    }
}

/// Gauss-Jordan elimination over rational functions. Columns are visited in
/// declared order and the first unused row with an admissible entry becomes
/// the pivot row; columns whose entries all depend on coordinates are
/// revisited until no further pivot is found.
pub fn solve_affine(sys: &LinSystem) -> Result<SolveResult> {
    let n = sys.unknowns.len();
    let mut rows: Vec<Row> = sys.rows.clone();
    let mut used = vec![false; rows.len()];
    let mut pivot_row: Vec<Option<usize>> = vec![None; n];
    let mut order: Vec<usize> = Vec::new();
    loop {
        let mut progress = false;
        for col in 0..n {
            if pivot_row[col].is_some() {
                continue;
            }
            let Some(r) = (0..rows.len())
                .find(|&r| !used[r] && rows[r].coeffs.get(&col).is_some_and(RatFunc::is_admissible_pivot))
            else {
                continue;
            };
            let inv = rows[r].coeffs[&col].recip()?;
            rows[r].scale(&inv);
            let pivot = rows[r].clone();
            for (k, row) in rows.iter_mut().enumerate() {
                if k == r {
                    continue;
                }
                if let Some(f) = row.coeffs.get(&col).cloned() {
                    row.sub_scaled(&f, &pivot);
                }
            }
            used[r] = true;
            pivot_row[col] = Some(r);
            order.push(col);
            progress = true;
        }
        if !progress {
            break;
        }
    }
    let mut residual_constraints = Vec::new();
    for (r, row) in rows.iter().enumerate() {
        if used[r] {
            continue;
        }
        if let Some((_, c)) = row.coeffs.iter().next() {
            return Err(Error::PivotDegenerate(c.numer().to_string()));
        }
        if !row.rhs.is_zero() {
            residual_constraints.push(row.rhs.numer().clone());
        }
    }
    let mut particular = Vec::with_capacity(order.len());
    for col in order {
        let row = &rows[pivot_row[col].unwrap()];
        let mut value = row.rhs.clone();
        for (j, c) in &row.coeffs {
            if *j != col {
                value = &value - &(c * &RatFunc::from(Poly::var(&sys.unknowns[*j])));
            }
        }
        particular.push((sys.unknowns[col].clone(), value));
    }
    let free = (0..n)
        .filter(|c| pivot_row[*c].is_none())
        .map(|c| sys.unknowns[c].clone())
        .collect();
    Ok(SolveResult {
        particular,
        free,
        residual_constraints,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::symbol::Role;

    fn s(name: &str, role: Role) -> Symbol {
        Symbol::new(name, role).unwrap()
    }

    #[test]
    fn one_by_one() {
        let a = s("ls_a", Role::FreeParameter);
        let ux = s("u_x", Role::Velocity);
        let mut sys = LinSystem::new(vec![a.clone()]);
        sys.add_equation(&Poly::var(&a), &Poly::var(&ux)).unwrap();
        let sol = solve_affine(&sys).unwrap();
        assert_eq!(sol.get(&a), Some(&RatFunc::from(Poly::var(&ux))));
        assert!(sol.free.is_empty());
        assert!(sol.residual_constraints.is_empty());
    }

    #[test]
    fn underdetermined_row_leaves_later_unknown_free() {
        let g = s("ls_G11", Role::FreeParameter);
        let f = s("ls_F11", Role::FreeParameter);
        let tau = Symbol::constant("τ").unwrap();
        let mut sys = LinSystem::new(vec![g.clone(), f.clone()]);
        sys.add_equation(&(Poly::var(&g) + Poly::var(&tau) * Poly::var(&f)), &Poly::zero())
            .unwrap();
        let sol = solve_affine(&sys).unwrap();
        assert_eq!(sol.free, vec![f.clone()]);
        assert_eq!(sol.get(&g).unwrap(), &RatFunc::from(-(Poly::var(&tau) * Poly::var(&f))));
    }

    #[test]
    fn inconsistent_row_becomes_residual() {
        let px = s("p^x", Role::Momentum);
        let tau = Symbol::constant("τ").unwrap();
        let ux = s("u_x", Role::Velocity);
        let xi = Poly::var(&px) + Poly::var(&tau) * Poly::var(&ux);
        let mut sys = LinSystem::new(vec![]);
        sys.add_equation(&Poly::zero(), &xi).unwrap();
        let sol = solve_affine(&sys).unwrap();
        assert_eq!(sol.residual_constraints, vec![xi]);
    }

    #[test]
    fn coordinate_pivot_is_degenerate() {
        let a = s("ls_a", Role::FreeParameter);
        let ux = s("u_x", Role::Velocity);
        let mut sys = LinSystem::new(vec![a.clone()]);
        sys.add_equation(&(Poly::var(&ux) * Poly::var(&a)), &Poly::one())
            .unwrap();
        assert!(matches!(solve_affine(&sys), Err(Error::PivotDegenerate(_))));
    }

    #[test]
    fn non_affine_equation_rejected() {
        let a = s("ls_a", Role::FreeParameter);
        let mut sys = LinSystem::new(vec![a.clone()]);
        assert!(sys
            .add_equation(&(Poly::var(&a) * Poly::var(&a)), &Poly::one())
            .is_err());
    }
}
