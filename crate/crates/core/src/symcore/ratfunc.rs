use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::One;

use super::gcd::{div_exact, gcd, monomial_content};
use super::poly::{Monomial, Poly, Rational};
use crate::error::{Error, Result};

/// A quotient of polynomials in canonical form: numerator and denominator
/// are coprime, the denominator carries no constant-symbol monomial factor
/// and no rational content, and its leading coefficient is 1. Units of the
/// coefficient ring are folded into the numerator, so a polynomial divided
/// by `ρ` is stored with denominator 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatFunc {
    num: Poly,
    den: Poly,
}

impl RatFunc {
    pub fn new(num: Poly, den: Poly) -> Result<RatFunc> {
        if den.is_zero() {
            return Err(Error::PivotDegenerate(format!("zero denominator under `{num}`")));
        }
        Ok(canonical(num, den))
    }

    pub fn zero() -> RatFunc {
        RatFunc::from(Poly::zero())
    }

    pub fn one() -> RatFunc {
        RatFunc::from(Poly::one())
    }

    pub fn numer(&self) -> &Poly {
        &self.num
    }

    pub fn denom(&self) -> &Poly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_poly(&self) -> bool {
        self.den.is_one()
    }

    pub fn to_poly(&self) -> Option<Poly> {
        self.is_poly().then(|| self.num.clone())
    }

    /// Nonzero and built from rationals and model constants only. These are
    /// the pivots elimination is allowed to divide by.
    pub fn is_admissible_pivot(&self) -> bool {
        !self.is_zero() && self.num.is_constant_only() && self.den.is_constant_only()
    }

    pub fn recip(&self) -> Result<RatFunc> {
        RatFunc::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &RatFunc) -> Result<RatFunc> {
        Ok(self * &other.recip()?)
    }

    pub fn substitute(&self, map: &std::collections::BTreeMap<super::Symbol, Poly>) -> Result<RatFunc> {
        RatFunc::new(self.num.substitute(map)?, self.den.substitute(map)?)
    }
}

fn canonical(num: Poly, den: Poly) -> RatFunc {
    if num.is_zero() {
        return RatFunc { num, den: Poly::one() };
    }
    if let Some(inv) = den.unit_inverse() {
        return RatFunc {
            num: &num * &inv,
            den: Poly::one(),
        };
    }
    // clear negative constant powers so that gcd sees ordinary polynomials
    let mn = monomial_content(&num);
    let md = monomial_content(&den);
    let shift = Monomial::from_factors(
        mn.factors()
            .iter()
            .chain(md.factors())
            .filter(|(_, e)| *e < 0)
            .map(|(s, e)| (s.clone(), -e)),
    )
    .expect("constant shift");
    let one = Rational::one();
    let mut num = num.mul_monomial(&shift, &one);
    let mut den = den.mul_monomial(&shift, &one);
    let g = gcd(&num, &den);
    if !g.is_one() {
        num = div_exact(&num, &g).expect("gcd divides numerator");
        den = div_exact(&den, &g).expect("gcd divides denominator");
    }
    // fold the unit part of the denominator into the numerator
    let md = monomial_content(&den);
    let unit_part = Monomial::from_factors(md.factors().iter().filter(|(s, _)| s.is_constant()).cloned())
        .expect("constant factors");
    let lc = den.leading().map(|(_, c)| c.clone()).expect("nonzero");
    let inv = unit_part.inverse();
    let den = den.mul_monomial(&inv, &lc.recip());
    let num = num.mul_monomial(&inv, &lc.recip());
    RatFunc { num, den }
}

impl From<Poly> for RatFunc {
    fn from(p: Poly) -> Self {
        RatFunc {
            num: p,
            den: Poly::one(),
        }
    }
}

impl From<&Poly> for RatFunc {
    fn from(p: &Poly) -> Self {
        RatFunc::from(p.clone())
    }
}

impl Add<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: &RatFunc) -> RatFunc {
        if self.den == rhs.den {
            if self.den.is_one() {
                return RatFunc::from(&self.num + &rhs.num);
            }
            return canonical(&self.num + &rhs.num, self.den.clone());
        }
        canonical(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: &RatFunc) -> RatFunc {
        self + &(-rhs)
    }
}

impl Mul<&RatFunc> for &RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: &RatFunc) -> RatFunc {
        if self.den.is_one() && rhs.den.is_one() {
            return RatFunc::from(&self.num * &rhs.num);
        }
        canonical(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        RatFunc {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Add for RatFunc {
    type Output = RatFunc;
    fn add(self, rhs: RatFunc) -> RatFunc {
        &self + &rhs
    }
}

impl Sub for RatFunc {
    type Output = RatFunc;
    fn sub(self, rhs: RatFunc) -> RatFunc {
        &self - &rhs
    }
}

impl Mul for RatFunc {
    type Output = RatFunc;
    fn mul(self, rhs: RatFunc) -> RatFunc {
        &self * &rhs
    }
}

impl Neg for RatFunc {
    type Output = RatFunc;
    fn neg(self) -> RatFunc {
        -&self
    }
}

impl fmt::Display for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for RatFunc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RatFunc({self})")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::symbol::{Role, Symbol};

    fn c(name: &str) -> Poly {
        Poly::var(&Symbol::constant(name).unwrap())
    }

    fn b(name: &str) -> Poly {
        Poly::var(&Symbol::new(name, Role::Base).unwrap())
    }

    #[test]
    fn division_by_constant_folds_into_numerator() {
        let tau = c("τ");
        let x = b("rf_x");
        let r = RatFunc::new(&x * &tau, &tau * &tau).unwrap();
        assert!(r.is_poly());
        assert_eq!(
            r.numer(),
            &(&x * &tau.pow(1)).mul_monomial(
                &Monomial::from_factors([(Symbol::lookup("τ").unwrap(), -2)]).unwrap(),
                &Rational::one()
            )
        );
    }

    #[test]
    fn cancels_common_factor() {
        let x = b("rf_x");
        let y = b("rf_y");
        let r = RatFunc::new(&(&x + &y) * &x, &(&x + &y) * &Poly::int(3)).unwrap();
        assert_eq!(r, RatFunc::from(x.scale(&super::super::poly::rat(1, 3))));
    }

    #[test]
    fn zero_denominator_rejected() {
        assert!(matches!(
            RatFunc::new(Poly::one(), Poly::zero()),
            Err(Error::PivotDegenerate(_))
        ));
    }

    #[test]
    fn sum_of_fractions() {
        let x = b("rf_x");
        let one = Poly::one();
        let a = RatFunc::new(one.clone(), x.clone()).unwrap();
        let s = &a + &a;
        assert_eq!(s, RatFunc::new(Poly::int(2), x.clone()).unwrap());
        assert!((&s - &s).is_zero());
    }

    #[test]
    fn canonical_form_is_idempotent() {
        let x = b("rf_x");
        let rho = c("ρ");
        let r = RatFunc::new(&x * &rho, &(&rho * &x) + &(&rho * &rho)).unwrap();
        let again = RatFunc::new(r.numer().clone(), r.denom().clone()).unwrap();
        assert_eq!(r, again);
    }
}
