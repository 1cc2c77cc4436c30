use std::cmp::Ordering;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock, RwLock};

use crate::error::{Error, Result};

/// What a symbol stands for. The order of the variants is the primary
/// sort key of symbols, so model constants print first in a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    ModelConstant,
    FreeParameter,
    Base,
    Velocity,
    Momentum,
    Dissipation,
    /// Derivatives of section components (second jets of the base fields,
    /// first jets of momenta and dissipation variables).
    Jet,
}

impl Role {
    pub fn name(self) -> &'static str {
        match self {
            Role::ModelConstant => "model-constant",
            Role::FreeParameter => "free-parameter",
            Role::Base => "base",
            Role::Velocity => "velocity",
            Role::Momentum => "momentum",
            Role::Dissipation => "dissipation",
            Role::Jet => "jet",
        }
    }

    /// Coordinates of a chart, as opposed to constants and unknowns.
    pub fn is_coordinate(self) -> bool {
        matches!(
            self,
            Role::Base | Role::Velocity | Role::Momentum | Role::Dissipation | Role::Jet
        )
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug)]
struct SymbolData {
    name: Box<str>,
    role: Role,
}

/// An interned, role-tagged symbol. Two symbols are equal iff their names are
/// equal; the registry guarantees a name is bound to exactly one role.
#[derive(Clone)]
pub struct Symbol(Arc<SymbolData>);

fn registry() -> &'static RwLock<HashMap<Box<str>, Symbol>> {
    static REGISTRY: OnceLock<RwLock<HashMap<Box<str>, Symbol>>> = OnceLock::new();
    REGISTRY.get_or_init(|| RwLock::new(HashMap::new()))
}

impl Symbol {
    /// Registers `name` with `role`, or returns the existing symbol when the
    /// name is already bound to the same role.
    pub fn new(name: &str, role: Role) -> Result<Symbol> {
        if let Some(existing) = registry().read().unwrap().get(name) {
            return existing.check_role(role);
        }
        let mut map = registry().write().unwrap();
        if let Some(existing) = map.get(name) {
            return existing.check_role(role);
        }
        let sym = Symbol(Arc::new(SymbolData {
            name: name.into(),
            role,
        }));
        map.insert(name.into(), sym.clone());
        Ok(sym)
    }

    pub fn lookup(name: &str) -> Result<Symbol> {
        registry()
            .read()
            .unwrap()
            .get(name)
            .cloned()
            .ok_or_else(|| Error::UnregisteredSymbol(name.to_string()))
    }

    pub fn constant(name: &str) -> Result<Symbol> {
        Symbol::new(name, Role::ModelConstant)
    }

    pub fn free(name: &str) -> Result<Symbol> {
        Symbol::new(name, Role::FreeParameter)
    }

    fn check_role(&self, role: Role) -> Result<Symbol> {
        if self.0.role == role {
            Ok(self.clone())
        } else {
            Err(Error::RoleConflict {
                name: self.name().to_string(),
                existing: self.0.role.to_string(),
                requested: role.to_string(),
            })
        }
    }

    pub fn name(&self) -> &str {
        &self.0.name
    }

    pub fn role(&self) -> Role {
        self.0.role
    }

    pub fn is_constant(&self) -> bool {
        self.0.role == Role::ModelConstant
    }
}

impl PartialEq for Symbol {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0) || self.0.name == other.0.name
    }
}

impl Eq for Symbol {}

impl Hash for Symbol {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.name.hash(state);
    }
}

impl Ord for Symbol {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        self.0
            .role
            .cmp(&other.0.role)
            .then_with(|| natural_cmp(&self.0.name, &other.0.name))
    }
}

impl PartialOrd for Symbol {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Compares names so that embedded digit runs sort numerically
/// (`q_2` < `q_10`). Ties fall back to plain byte order.
fn natural_cmp(a: &str, b: &str) -> Ordering {
    let mut ai = a.chars().peekable();
    let mut bi = b.chars().peekable();
    loop {
        match (ai.peek().copied(), bi.peek().copied()) {
            (None, None) => return a.cmp(b),
            (None, Some(_)) => return Ordering::Less,
            (Some(_), None) => return Ordering::Greater,
            (Some(x), Some(y)) if x.is_ascii_digit() && y.is_ascii_digit() => {
                let mut na = String::new();
                while let Some(c) = ai.peek().copied().filter(char::is_ascii_digit) {
                    na.push(c);
                    ai.next();
                }
                let mut nb = String::new();
                while let Some(c) = bi.peek().copied().filter(char::is_ascii_digit) {
                    nb.push(c);
                    bi.next();
                }
                let ord = na
                    .trim_start_matches('0')
                    .len()
                    .cmp(&nb.trim_start_matches('0').len())
                    .then_with(|| na.trim_start_matches('0').cmp(nb.trim_start_matches('0')));
                if ord != Ordering::Equal {
                    return ord;
                }
            }
            (Some(x), Some(y)) => {
                if x != y {
                    return x.cmp(&y);
                }
                ai.next();
                bi.next();
            }
        }
    }
}
