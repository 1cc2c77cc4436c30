//! Exact polynomial algebra and affine elimination.

mod gcd;
mod linsys;
mod parse;
mod poly;
mod ratfunc;
mod reduce;
mod symbol;

pub use gcd::{div_exact, gcd, normalize};
pub use linsys::{proportional, solve_affine, LinSystem, Row, SolveResult};
pub use parse::parse_poly;
pub use poly::{rat, rat_int, Monomial, Poly, Rational};
pub use ratfunc::RatFunc;
pub use reduce::Reducer;
pub use symbol::{Role, Symbol};
