//! Multivariate polynomial gcd over the rationals by recursive primitive
//! pseudo-remainder sequences. Inputs must have nonnegative exponents.

use std::collections::BTreeMap;

use num_traits::{One, Signed};

use super::poly::{Monomial, Poly, Rational};
use super::symbol::Symbol;

/// Exact quotient `a / b` if `b` divides `a`, by repeated leading-term
/// division in graded lex order.
pub fn div_exact(a: &Poly, b: &Poly) -> Option<Poly> {
    if b.is_zero() {
        return None;
    }
    if let Some(inv) = b.unit_inverse() {
        return Some(a * &inv);
    }
    let (lm_b, lc_b) = b.leading().map(|(m, c)| (m.clone(), c.clone()))?;
    let mut rem = a.clone();
    let mut quot = Poly::zero();
    while let Some((lm, lc)) = rem.leading().map(|(m, c)| (m.clone(), c.clone())) {
        let m = lm.checked_div(&lm_b)?;
        let c = &lc / &lc_b;
        let t = Poly::term(c, m);
        rem -= &(&t * b);
        quot += &t;
    }
    Some(quot)
}

/// The largest monomial dividing every term, including negative powers of
/// constants.
pub fn monomial_content(p: &Poly) -> Monomial {
    if p.is_zero() {
        return Monomial::one();
    }
    let mins = p.symbols().into_iter().map(|s| {
        let e = p.terms().map(|(m, _)| m.exponent(&s)).min().unwrap_or(0);
        (s, e)
    });
    Monomial::from_factors(mins).expect("content exponents are valid")
}

fn coeffs_in(p: &Poly, x: &Symbol) -> BTreeMap<i32, Poly> {
    let mut out: BTreeMap<i32, Poly> = BTreeMap::new();
    for (m, c) in p.terms() {
        let e = m.exponent(x);
        *out.entry(e).or_default() += &Poly::term(c.clone(), m.without(x));
    }
    out
}

/// Gcd of the coefficients of `p` viewed as a polynomial in `x`.
fn content_in(p: &Poly, x: &Symbol) -> Poly {
    let mut g = Poly::zero();
    for c in coeffs_in(p, x).values() {
        g = gcd(&g, c);
        if g.is_one() {
            break;
        }
    }
    g
}

fn lead_in(p: &BTreeMap<i32, Poly>) -> (i32, Poly) {
    let (e, c) = p.iter().next_back().expect("nonzero");
    (*e, c.clone())
}

fn prem(a: &Poly, b: &Poly, x: &Symbol) -> Poly {
    let bc = coeffs_in(b, x);
    let (db, lb) = lead_in(&bc);
    let mut r = a.clone();
    loop {
        if r.is_zero() {
            return r;
        }
        let rc = coeffs_in(&r, x);
        let (dr, lr) = lead_in(&rc);
        if dr < db {
            return r;
        }
        let shift = Monomial::from_factors([(x.clone(), dr - db)]).expect("nonnegative");
        r = &(&lb * &r) - &(&lr * &b.mul_monomial(&shift, &Rational::one()));
    }
}

/// Greatest common divisor, normalized to a positive leading coefficient and
/// unit rational content. `gcd(0, 0) = 0`.
pub fn gcd(a: &Poly, b: &Poly) -> Poly {
    if a.is_zero() {
        return normalize(b);
    }
    if b.is_zero() {
        return normalize(a);
    }
    if a.as_rational().is_some() || b.as_rational().is_some() {
        return Poly::one();
    }
    let ma = monomial_content(a);
    let mb = monomial_content(b);
    let mg = common_monomial(&ma, &mb);
    let a = a.mul_monomial(&ma.inverse(), &Rational::one());
    let b = b.mul_monomial(&mb.inverse(), &Rational::one());
    let g = gcd_primitive(&a, &b);
    normalize(&g.mul_monomial(&mg, &Rational::one()))
}

fn common_monomial(a: &Monomial, b: &Monomial) -> Monomial {
    let factors = a
        .factors()
        .iter()
        .map(|(s, e)| (s.clone(), (*e).min(b.exponent(s)).max(0)));
    Monomial::from_factors(factors).expect("nonnegative")
}

fn gcd_primitive(a: &Poly, b: &Poly) -> Poly {
    if a.as_rational().is_some() || b.as_rational().is_some() {
        return Poly::one();
    }
    let sa = a.symbols();
    let sb = b.symbols();
    let x = sa.iter().chain(sb.iter()).max().cloned().expect("nonconstant");
    let in_a = sa.contains(&x);
    let in_b = sb.contains(&x);
    if !in_a {
        return gcd(a, &content_in(b, &x));
    }
    if !in_b {
        return gcd(&content_in(a, &x), b);
    }
    let ca = content_in(a, &x);
    let cb = content_in(b, &x);
    let c = gcd(&ca, &cb);
    let mut p = div_exact(a, &ca).expect("content divides");
    let mut q = div_exact(b, &cb).expect("content divides");
    if q.max_degree_in(&x) > p.max_degree_in(&x) {
        std::mem::swap(&mut p, &mut q);
    }
    while !q.is_zero() {
        let r = prem(&p, &q, &x);
        p = q;
        if r.is_zero() {
            break;
        }
        if !r.contains(&x) {
            // a remainder free of x means the primitive parts are coprime
            return c;
        }
        let cr = content_in(&r, &x);
        q = div_exact(&r, &cr).expect("content divides");
    }
    let cp = content_in(&p, &x);
    let pp = div_exact(&p, &cp).expect("content divides");
    &c * &pp
}

/// Divides out the rational content and makes the leading coefficient positive.
pub fn normalize(p: &Poly) -> Poly {
    if p.is_zero() {
        return Poly::zero();
    }
    let content = p.content();
    let mut out = p.scale(&content.recip());
    if out.leading().is_some_and(|(_, c)| c.is_negative()) {
        out = -out;
    }
    out
}
