//! Text syntax for polynomials: signed sums of products, `*` explicit,
//! `^` for integer powers, `/` by a number or a model constant, and
//! parentheses. Symbol names are matched longest-first against a declared
//! list, so names may themselves contain `^`, `_` or `,`.

use num_bigint::BigInt;

use super::poly::{Monomial, Poly, Rational};
use super::symbol::Symbol;
use crate::error::{Error, Result};

pub fn parse_poly(text: &str, symbols: &[Symbol]) -> Result<Poly> {
    let mut names: Vec<(&str, &Symbol)> = symbols.iter().map(|s| (s.name(), s)).collect();
    names.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then(a.0.cmp(b.0)));
    let mut p = Parser {
        src: text,
        pos: 0,
        names,
    };
    let value = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(value)
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    names: Vec<(&'a str, &'a Symbol)>,
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn error(&self, message: &str) -> Error {
        let before = &self.src[..self.pos];
        let line = before.matches('\n').count() + 1;
        let column = before.rsplit('\n').next().unwrap_or("").chars().count() + 1;
        Error::Parse {
            line,
            column,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn eat(&mut self, c: char) -> bool {
        self.skip_ws();
        if self.rest().starts_with(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.rest().chars().next()
    }

    fn expr(&mut self) -> Result<Poly> {
        let mut acc = Poly::zero();
        let mut first = true;
        loop {
            let sign = if self.eat('+') {
                1
            } else if self.eat('-') || self.eat('−') {
                -1
            } else if first {
                1
            } else {
                break;
            };
            first = false;
            let t = self.term()?;
            if sign < 0 {
                acc -= &t;
            } else {
                acc += &t;
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Poly> {
        let mut acc = self.power()?;
        loop {
            if self.eat('*') {
                acc = &acc * &self.power()?;
            } else if self.eat('/') {
                let d = self.power()?;
                let inv = d
                    .unit_inverse()
                    .ok_or_else(|| self.error("division only by numbers and model constants"))?;
                acc = &acc * &inv;
            } else {
                return Ok(acc);
            }
        }
    }

    fn power(&mut self) -> Result<Poly> {
        let base = self.atom()?;
        if !self.eat('^') {
            return Ok(base);
        }
        let negative = self.eat('-');
        let e = self.integer()?;
        let e: u32 = e.try_into().map_err(|_| self.error("exponent too large"))?;
        if negative {
            let inv = base
                .unit_inverse()
                .ok_or_else(|| self.error("negative powers only of model constants"))?;
            Ok(inv.pow(e))
        } else {
            Ok(base.pow(e))
        }
    }

    fn integer(&mut self) -> Result<u64> {
        self.skip_ws();
        let digits: String = self.rest().chars().take_while(char::is_ascii_digit).collect();
        if digits.is_empty() {
            return Err(self.error("expected integer"));
        }
        self.pos += digits.len();
        digits.parse().map_err(|_| self.error("integer out of range"))
    }

    fn atom(&mut self) -> Result<Poly> {
        match self.peek() {
            None => Err(self.error("unexpected end of input")),
            Some('(') => {
                self.eat('(');
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`"));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let digits: String = self
                    .rest()
                    .chars()
                    .take_while(|c| c.is_ascii_digit() || *c == '.')
                    .collect();
                self.pos += digits.len();
                decimal(&digits).ok_or_else(|| self.error("malformed number"))
            }
            Some(_) => {
                let rest = self.rest();
                let hit = self
                    .names
                    .iter()
                    .find(|(n, _)| rest.starts_with(n))
                    .map(|(n, s)| (n.len(), (*s).clone()));
                match hit {
                    Some((len, s)) => {
                        self.pos += len;
                        Ok(Poly::term(Rational::from_integer(1.into()), Monomial::var(&s)))
                    }
                    None => Err(self.error("unknown symbol")),
                }
            }
        }
    }
}

fn decimal(text: &str) -> Option<Poly> {
    let (int, frac) = match text.split_once('.') {
        Some((i, f)) => (i, f),
        None => (text, ""),
    };
    if frac.contains('.') || int.is_empty() {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = digits.parse().ok()?;
    let d = BigInt::from(10u32).pow(frac.len() as u32);
    Some(Poly::constant(Rational::new(n, d)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symcore::symbol::Role;

    #[test]
    fn parses_string_lagrangian() {
        let rho = Symbol::constant("ρ").unwrap();
        let tau = Symbol::constant("τ").unwrap();
        let gamma = Symbol::constant("γ").unwrap();
        let ux = Symbol::new("u_x", Role::Velocity).unwrap();
        let ut = Symbol::new("u_t", Role::Velocity).unwrap();
        let st = Symbol::new("s^t", Role::Dissipation).unwrap();
        let syms = [
            rho.clone(),
            tau.clone(),
            gamma.clone(),
            ux.clone(),
            ut.clone(),
            st.clone(),
        ];
        let p = parse_poly("1/2*ρ*u_t^2 - 1/2*τ*u_x^2 - γ*s^t", &syms).unwrap();
        let expected = Poly::frac(1, 2) * Poly::var(&rho) * Poly::var(&ut).pow(2)
            - Poly::frac(1, 2) * Poly::var(&tau) * Poly::var(&ux).pow(2)
            - Poly::var(&gamma) * Poly::var(&st);
        assert_eq!(p, expected);
        assert_eq!(parse_poly(&p.to_string(), &syms).unwrap(), p);
    }

    #[test]
    fn negative_constant_power_round_trips() {
        let mu = Symbol::constant("μ₀").unwrap();
        let p = parse_poly("3*μ₀^-2 + 0.5", &[mu.clone()]).unwrap();
        assert_eq!(parse_poly(&p.to_string(), &[mu]).unwrap(), p);
    }

    #[test]
    fn reports_position_of_unknown_symbol() {
        let ux = Symbol::new("u_x", Role::Velocity).unwrap();
        let err = parse_poly("u_x +\n  2*w", &[ux]).unwrap_err();
        assert_eq!(
            err,
            Error::Parse {
                line: 2,
                column: 5,
                message: "unknown symbol".into()
            }
        );
    }

    #[test]
    fn rejects_division_by_coordinate() {
        let ux = Symbol::new("u_x", Role::Velocity).unwrap();
        assert!(parse_poly("1/u_x", &[ux]).is_err());
    }
}
