use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::symbol::{Role, Symbol};
use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn rat_int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// A power product of symbols. Exponents are nonzero; negative exponents are
/// only ever attached to model constants, which makes those symbols units.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(Vec<(Symbol, i32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: &Symbol) -> Self {
        Monomial(vec![(s.clone(), 1)])
    }

    pub fn from_factors(factors: impl IntoIterator<Item = (Symbol, i32)>) -> Result<Self> {
        let mut acc: BTreeMap<Symbol, i32> = BTreeMap::new();
        for (s, e) in factors {
            *acc.entry(s).or_insert(0) += e;
        }
        let mut out = Vec::with_capacity(acc.len());
        for (s, e) in acc {
            if e == 0 {
                continue;
            }
            if e < 0 && !s.is_constant() {
                return Err(Error::NegativeExponent(s.name().to_string()));
            }
            out.push((s, e));
        }
        Ok(Monomial(out))
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn factors(&self) -> &[(Symbol, i32)] {
        &self.0
    }

    pub fn degree(&self) -> i64 {
        self.0.iter().map(|(_, e)| *e as i64).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> i32 {
        self.0
            .binary_search_by(|(t, _)| t.cmp(s))
            .map(|i| self.0[i].1)
            .unwrap_or(0)
    }

    /// True when only model constants appear.
    pub fn is_constant_only(&self) -> bool {
        self.0.iter().all(|(s, _)| s.is_constant())
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                Ordering::Less => {
                    out.push(self.0[i].clone());
                    i += 1;
                }
                Ordering::Greater => {
                    out.push(other.0[j].clone());
                    j += 1;
                }
                Ordering::Equal => {
                    let e = self.0[i].1 + other.0[j].1;
                    if e != 0 {
                        out.push((self.0[i].0.clone(), e));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    pub fn inverse(&self) -> Monomial {
        Monomial(self.0.iter().map(|(s, e)| (s.clone(), -e)).collect())
    }

    /// `self / other` when every non-constant exponent stays nonnegative.
    pub fn checked_div(&self, other: &Monomial) -> Option<Monomial> {
        let q = self.mul(&other.inverse());
        if q.0.iter().all(|(s, e)| *e > 0 || s.is_constant()) {
            Some(q)
        } else {
            None
        }
    }

    pub fn without(&self, s: &Symbol) -> Monomial {
        Monomial(self.0.iter().filter(|(t, _)| t != s).cloned().collect())
    }

    pub fn pow(&self, n: i32) -> Monomial {
        if n == 0 {
            return Monomial::one();
        }
        Monomial(self.0.iter().map(|(s, e)| (s.clone(), e * n)).collect())
    }

    pub fn symbols(&self) -> impl Iterator<Item = &Symbol> {
        self.0.iter().map(|(s, _)| s)
    }
}

/// Graded lexicographic order: total degree first, then exponents compared
/// from the greatest symbol downwards.
impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        let d = self.degree().cmp(&other.degree());
        if d != Ordering::Equal {
            return d;
        }
        let mut i = self.0.len();
        let mut j = other.0.len();
        while i > 0 || j > 0 {
            let a = if i > 0 { Some(&self.0[i - 1]) } else { None };
            let b = if j > 0 { Some(&other.0[j - 1]) } else { None };
            let (ea, eb, step_a, step_b) = match (a, b) {
                (Some((sa, ea)), Some((sb, eb))) => match sa.cmp(sb) {
                    Ordering::Greater => (*ea, 0, true, false),
                    Ordering::Less => (0, *eb, false, true),
                    Ordering::Equal => (*ea, *eb, true, true),
                },
                (Some((_, ea)), None) => (*ea, 0, true, false),
                (None, Some((_, eb))) => (0, *eb, false, true),
                (None, None) => unreachable!(),
            };
            if ea != eb {
                return ea.cmp(&eb);
            }
            if step_a {
                i -= 1;
            }
            if step_b {
                j -= 1;
            }
        }
        Ordering::Equal
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        for (k, (s, e)) in self.0.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            if *e == 1 {
                write!(f, "{s}")?;
            } else {
                write!(f, "{s}^{e}")?;
            }
        }
        Ok(())
    }
}

/// Exact multivariate polynomial with rational coefficients, stored as a
/// sorted map from monomial to nonzero coefficient.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn one() -> Self {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Poly::term(c, Monomial::one())
    }

    pub fn int(n: i64) -> Self {
        Poly::constant(rat_int(n))
    }

    pub fn frac(n: i64, d: i64) -> Self {
        Poly::constant(rat(n, d))
    }

    pub fn var(s: &Symbol) -> Self {
        Poly::term(Rational::one(), Monomial::var(s))
    }

    pub fn term(c: Rational, m: Monomial) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Poly::zero();
        for (m, c) in terms {
            p.add_term(m, c);
        }
        p
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.as_rational().is_some_and(|c| c.is_one())
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    /// The rational value of a symbol-free polynomial.
    pub fn as_rational(&self) -> Option<Rational> {
        match self.terms.len() {
            0 => Some(Rational::zero()),
            1 => {
                let (m, c) = self.terms.iter().next().unwrap();
                m.is_one().then(|| c.clone())
            }
            _ => None,
        }
    }

    pub fn as_symbol(&self) -> Option<Symbol> {
        if self.terms.len() != 1 {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        match m.factors() {
            [(s, 1)] if c.is_one() => Some(s.clone()),
            _ => None,
        }
    }

    /// True when every symbol is a model constant (rational numbers included).
    pub fn is_constant_only(&self) -> bool {
        self.terms.keys().all(Monomial::is_constant_only)
    }

    /// A unit of the coefficient ring: a single nonzero term built from a
    /// rational number and (possibly negative) powers of model constants.
    pub fn is_unit(&self) -> bool {
        self.terms.len() == 1 && self.terms.keys().next().unwrap().is_constant_only()
    }

    pub fn unit_inverse(&self) -> Option<Poly> {
        if !self.is_unit() {
            return None;
        }
        let (m, c) = self.terms.iter().next().unwrap();
        Some(Poly::term(c.recip(), m.inverse()))
    }

    pub fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn symbols(&self) -> BTreeSet<Symbol> {
        self.terms.keys().flat_map(|m| m.symbols().cloned()).collect()
    }

    pub fn contains(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) != 0)
    }

    pub fn contains_role(&self, role: Role) -> bool {
        self.terms.keys().any(|m| m.symbols().any(|s| s.role() == role))
    }

    pub fn max_degree_in(&self, s: &Symbol) -> i32 {
        self.terms.keys().map(|m| m.exponent(s)).max().unwrap_or(0)
    }

    pub fn min_degree_in(&self, s: &Symbol) -> i32 {
        self.terms.keys().map(|m| m.exponent(s)).min().unwrap_or(0)
    }

    /// Total degree in the given set of symbols, over all terms.
    pub fn degree_in_set(&self, set: &BTreeSet<Symbol>) -> i32 {
        self.terms
            .keys()
            .map(|m| {
                m.factors()
                    .iter()
                    .filter(|(s, _)| set.contains(s))
                    .map(|(_, e)| *e)
                    .sum::<i32>()
            })
            .max()
            .unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly {
            terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect(),
        }
    }

    pub fn mul_monomial(&self, m: &Monomial, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        let mut out = Poly::zero();
        for (mm, k) in &self.terms {
            out.add_term(mm.mul(m), k * c);
        }
        out
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut result = Poly::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                result = &result * &base;
            }
            n >>= 1;
            if n > 0 {
                base = &base * &base;
            }
        }
        result
    }

    /// Formal partial derivative.
    pub fn diff(&self, x: &Symbol) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exponent(x);
            if e == 0 {
                continue;
            }
            let mut factors: Vec<(Symbol, i32)> = m.factors().to_vec();
            for f in factors.iter_mut() {
                if &f.0 == x {
                    f.1 -= 1;
                }
            }
            factors.retain(|(_, e)| *e != 0);
            out.add_term(Monomial(factors), c * rat_int(e as i64));
        }
        out
    }

    pub fn diff_by_name(&self, name: &str) -> Result<Poly> {
        let s = Symbol::lookup(name)?;
        Ok(self.diff(&s))
    }

    /// Coefficient of `s^e`, as a polynomial in the remaining symbols.
    pub fn coeff_of(&self, s: &Symbol, e: i32) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            if m.exponent(s) == e {
                out.add_term(m.without(s), c.clone());
            }
        }
        out
    }

    /// Splits the polynomial as `sum_u coeff_u * u + rest` over the given
    /// unknowns, failing when any term has total degree > 1 in them.
    pub fn split_affine(&self, unknowns: &BTreeSet<Symbol>) -> Result<(BTreeMap<Symbol, Poly>, Poly)> {
        let mut linear: BTreeMap<Symbol, Poly> = BTreeMap::new();
        let mut rest = Poly::zero();
        for (m, c) in &self.terms {
            let mut hit: Option<&Symbol> = None;
            for (s, e) in m.factors() {
                if unknowns.contains(s) {
                    if *e != 1 || hit.is_some() {
                        return Err(Error::NotAffine(self.to_string()));
                    }
                    hit = Some(s);
                }
            }
            match hit {
                Some(s) => linear.entry(s.clone()).or_default().add_term(m.without(s), c.clone()),
                None => rest.add_term(m.clone(), c.clone()),
            }
        }
        linear.retain(|_, p| !p.is_zero());
        Ok((linear, rest))
    }

    /// Simultaneous substitution of symbols by polynomials.
    pub fn substitute(&self, map: &BTreeMap<Symbol, Poly>) -> Result<Poly> {
        if map.is_empty() {
            return Ok(self.clone());
        }
        let mut cache: HashMap<(Symbol, i32), Poly> = HashMap::new();
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut kept: Vec<(Symbol, i32)> = Vec::new();
            let mut factor = Poly::one();
            for (s, e) in m.factors() {
                match map.get(s) {
                    None => kept.push((s.clone(), *e)),
                    Some(rep) => {
                        let key = (s.clone(), *e);
                        let p = match cache.get(&key) {
                            Some(p) => p.clone(),
                            None => {
                                let p = if *e >= 0 {
                                    rep.pow(*e as u32)
                                } else {
                                    rep.unit_inverse()
                                        .ok_or_else(|| {
                                            Error::NonPolynomial(format!(
                                                "substituting non-unit `{rep}` for {s} with negative exponent"
                                            ))
                                        })?
                                        .pow((-*e) as u32)
                                };
                                cache.insert(key, p.clone());
                                p
                            }
                        };
                        factor = &factor * &p;
                    }
                }
            }
            out += &factor.mul_monomial(&Monomial(kept), c);
        }
        Ok(out)
    }

    pub fn substitute_one(&self, s: &Symbol, rep: &Poly) -> Result<Poly> {
        let mut map = BTreeMap::new();
        map.insert(s.clone(), rep.clone());
        self.substitute(&map)
    }

    /// Numeric evaluation by recursive Horner's scheme in the greatest symbol.
    pub fn eval(&self, point: &HashMap<Symbol, f64>) -> Result<f64> {
        let missing: BTreeSet<Symbol> = self.symbols().into_iter().filter(|s| !point.contains_key(s)).collect();
        if !missing.is_empty() {
            return Err(Error::MissingAssignment(
                missing.iter().map(|s| s.name().to_string()).collect(),
            ));
        }
        let terms: Vec<(&[(Symbol, i32)], f64)> = self
            .terms
            .iter()
            .map(|(m, c)| (m.factors(), c.to_f64().unwrap_or(f64::NAN)))
            .collect();
        Ok(horner(&terms, point))
    }

    /// Rational content: gcd of numerators over lcm of denominators, signed
    /// so that the leading coefficient of the primitive part is positive.
    pub fn content(&self) -> Rational {
        use num_integer::Integer;
        let mut num = BigInt::zero();
        let mut den = BigInt::one();
        for c in self.terms.values() {
            num = num.gcd(c.numer());
            den = den.lcm(c.denom());
        }
        if num.is_zero() {
            return Rational::one();
        }
        let mut content = Rational::new(num, den);
        if let Some((_, lc)) = self.leading() {
            if lc.is_negative() {
                content = -content;
            }
        }
        content
    }

    pub fn map_coeffs(&self, f: impl Fn(&Rational) -> Rational) -> Poly {
        Poly::from_terms(self.terms.iter().map(|(m, c)| (m.clone(), f(c))))
    }
}

fn horner(terms: &[(&[(Symbol, i32)], f64)], point: &HashMap<Symbol, f64>) -> f64 {
    if terms.is_empty() {
        return 0.0;
    }
    // greatest symbol still present in any term
    let top = terms
        .iter()
        .filter_map(|(f, _)| f.last().map(|(s, _)| s))
        .max()
        .cloned();
    let Some(x) = top else {
        return terms.iter().map(|(_, c)| *c).sum();
    };
    let mut groups: BTreeMap<i32, Vec<(&[(Symbol, i32)], f64)>> = BTreeMap::new();
    for (f, c) in terms {
        match f.last() {
            Some((s, e)) if *s == x => groups.entry(*e).or_default().push((&f[..f.len() - 1], *c)),
            _ => groups.entry(0).or_default().push((f, *c)),
        }
    }
    let xv = point[&x];
    let lo = *groups.keys().next().unwrap();
    let hi = *groups.keys().next_back().unwrap();
    let mut acc = 0.0;
    for e in (lo..=hi).rev() {
        acc *= xv;
        if let Some(g) = groups.get(&e) {
            acc += horner(g, point);
        }
    }
    acc * xv.powi(lo)
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let abs = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else {
                f.write_str(if neg { " - " } else { " + " })?;
            }
            if m.is_one() {
                write!(f, "{abs}")?;
            } else if abs.is_one() {
                write!(f, "{m}")?;
            } else {
                write!(f, "{abs}*{m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl From<&Symbol> for Poly {
    fn from(s: &Symbol) -> Self {
        Poly::var(s)
    }
}

impl From<Rational> for Poly {
    fn from(c: Rational) -> Self {
        Poly::constant(c)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &rhs.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        self.map_coeffs(|c| -c.clone())
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! owned_binop {
    ($tr:ident, $m:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $m(self, rhs: &Poly) -> Poly {
                (&self).$m(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                self.$m(&rhs)
            }
        }
    };
}

owned_binop!(Add, add);
owned_binop!(Sub, sub);
owned_binop!(Mul, mul);

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        *self += &rhs;
    }
}

impl SubAssign<Poly> for Poly {
    fn sub_assign(&mut self, rhs: Poly) {
        *self -= &rhs;
    }
}

impl std::iter::Sum for Poly {
    fn sum<I: Iterator<Item = Poly>>(iter: I) -> Poly {
        let mut acc = Poly::zero();
        for p in iter {
            acc += &p;
        }
        acc
    }
}
