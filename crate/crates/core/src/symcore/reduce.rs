use std::collections::BTreeMap;

use super::poly::Poly;
use super::symbol::{Role, Symbol};

const DIVISION_STEP_LIMIT: usize = 10_000;

/// Normal forms modulo a list of constraints.
///
/// Constraints that are affine in some coordinate with a unit coefficient
/// become substitution rules `lead -> rest`; the rules are kept mutually
/// reduced so that one simultaneous substitution yields the normal form.
/// Any other constraint is kept as a divisor for graded lex division.
#[derive(Clone, Debug, Default)]
pub struct Reducer {
    rules: BTreeMap<Symbol, Poly>,
    divisors: Vec<Poly>,
}

fn role_rank(role: Role) -> u8 {
    match role {
        Role::Momentum => 0,
        Role::Velocity => 1,
        Role::Dissipation => 2,
        Role::Base => 3,
        Role::Jet => 4,
        Role::FreeParameter => 5,
        Role::ModelConstant => 6,
    }
}

impl Reducer {
    pub fn new() -> Reducer {
        Reducer::default()
    }

    pub fn from_constraints<'a>(constraints: impl IntoIterator<Item = &'a Poly>) -> Reducer {
        let mut r = Reducer::new();
        for c in constraints {
            r.insert(c);
        }
        r
    }

    pub fn rules(&self) -> &BTreeMap<Symbol, Poly> {
        &self.rules
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty() && self.divisors.is_empty()
    }

    /// Adds a constraint. Returns false when it already reduces to zero.
    pub fn insert(&mut self, constraint: &Poly) -> bool {
        let reduced = self.reduce(constraint);
        if reduced.is_zero() {
            return false;
        }
        match solve_for_lead(&reduced) {
            Some((lead, value)) => {
                let mut single = BTreeMap::new();
                single.insert(lead.clone(), value.clone());
                for rhs in self.rules.values_mut() {
                    if rhs.contains(&lead) {
                        *rhs = rhs.substitute(&single).expect("coordinate substitution");
                    }
                }
                self.divisors = self
                    .divisors
                    .iter()
                    .map(|d| d.substitute(&single).expect("coordinate substitution"))
                    .filter(|d| !d.is_zero())
                    .collect();
                self.rules.insert(lead, value);
            }
            None => self.divisors.push(reduced),
        }
        true
    }

    pub fn reduce(&self, f: &Poly) -> Poly {
        let mut g = if self.rules.is_empty() {
            f.clone()
        } else {
            f.substitute(&self.rules).expect("coordinate substitution")
        };
        if !self.divisors.is_empty() {
            g = divide(&g, &self.divisors);
        }
        g
    }

    pub fn is_zero(&self, f: &Poly) -> bool {
        self.reduce(f).is_zero()
    }
}

/// Picks the symbol to eliminate: it must occur only linearly, with a unit
/// coefficient. Momenta are preferred, then velocities, dissipation and base
/// coordinates; within a role the greatest symbol wins.
fn solve_for_lead(c: &Poly) -> Option<(Symbol, Poly)> {
    let mut candidates: Vec<Symbol> = c
        .symbols()
        .into_iter()
        .filter(|s| s.role().is_coordinate() && c.max_degree_in(s) == 1)
        .collect();
    candidates.sort_by(|a, b| role_rank(a.role()).cmp(&role_rank(b.role())).then(b.cmp(a)));
    for s in candidates {
        let coeff = c.coeff_of(&s, 1);
        let Some(inv) = coeff.unit_inverse() else {
            continue;
        };
        let rest = c.coeff_of(&s, 0);
        return Some((s, -(&rest * &inv)));
    }
    None
}

fn divide(f: &Poly, divisors: &[Poly]) -> Poly {
    let mut p = f.clone();
    let mut remainder = Poly::zero();
    let mut steps = 0;
    while let Some((lm, lc)) = p.leading().map(|(m, c)| (m.clone(), c.clone())) {
        steps += 1;
        if steps > DIVISION_STEP_LIMIT {
            log::warn!("division step limit reached; returning partial remainder");
            return &remainder + &p;
        }
        let mut divided = false;
        for d in divisors {
            let (dm, dc) = d.leading().expect("nonzero divisor");
            if let Some(q) = lm.checked_div(dm) {
                p -= &d.mul_monomial(&q, &(&lc / dc));
                divided = true;
                break;
            }
        }
        if !divided {
            let t = Poly::term(lc, lm);
            p -= &t;
            remainder += &t;
        }
    }
    remainder
}
