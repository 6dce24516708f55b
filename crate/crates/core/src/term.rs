//! First-order terms over a finite signature.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

/// Default cap on term height for parsing and enumeration.
pub const DEFAULT_MAX_HEIGHT: usize = 12;

/// Upper bound on the size of an enumerated ground-term universe.
pub const MAX_UNIVERSE: usize = 2_000_000;

/// A location in source text, 1-based line and column.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct SourcePos {
    pub offset: usize,
    pub line: usize,
    pub col: usize,
}

impl fmt::Display for SourcePos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.col)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("{pos}: unknown symbol `{name}`")]
    UnknownSymbol { name: String, pos: SourcePos },
    #[error("{pos}: symbol `{name}` expects {expected} argument(s), found {found}")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
        pos: SourcePos,
    },
    #[error("{pos}: syntax error: {message}")]
    Syntax { message: String, pos: SourcePos },
    #[error("term height {height} exceeds the cap of {cap}")]
    TooDeep { height: usize, cap: usize },
    #[error("ground term universe exceeds {limit} terms")]
    UniverseTooLarge { limit: usize },
    #[error("invalid position {0:?}")]
    InvalidPosition(Position),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolId(pub usize);

/// A finite set of function symbols with fixed arities.
///
/// Declaration order is the canonical symbol order used by enumeration and
/// precedence search.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Signature {
    symbols: Vec<(String, usize)>,
    index: HashMap<String, SymbolId>,
}

impl Signature {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_symbols<I, S>(symbols: I) -> Result<Self, TermError>
    where
        I: IntoIterator<Item = (S, usize)>,
        S: Into<String>,
    {
        let mut sig = Self::new();
        for (name, arity) in symbols {
            sig.add(name, arity)?;
        }
        Ok(sig)
    }

    pub fn add(&mut self, name: impl Into<String>, arity: usize) -> Result<SymbolId, TermError> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(TermError::DuplicateSymbol(name));
        }
        let id = SymbolId(self.symbols.len());
        self.index.insert(name.clone(), id);
        self.symbols.push((name, arity));
        Ok(id)
    }

    pub fn lookup(&self, name: &str) -> Option<SymbolId> {
        self.index.get(name).copied()
    }

    pub fn name(&self, id: SymbolId) -> &str {
        &self.symbols[id.0].0
    }

    pub fn arity(&self, id: SymbolId) -> usize {
        self.symbols[id.0].1
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = SymbolId> + '_ {
        (0..self.symbols.len()).map(SymbolId)
    }

    pub fn symbols(&self) -> &[(String, usize)] {
        &self.symbols
    }

    /// Builds `name(args..)`, checking the declared arity.
    pub fn app(&self, name: &str, args: Vec<Term>) -> Result<Term, TermError> {
        let id = self.lookup(name).ok_or_else(|| TermError::UnknownSymbol {
            name: name.to_string(),
            pos: SourcePos::default(),
        })?;
        if self.arity(id) != args.len() {
            return Err(TermError::ArityMismatch {
                name: name.to_string(),
                expected: self.arity(id),
                found: args.len(),
                pos: SourcePos::default(),
            });
        }
        Ok(Term::App(id, args))
    }

    /// Checks that every application node in `t` is well-formed here.
    pub fn check(&self, t: &Term) -> Result<(), TermError> {
        match t {
            Term::Var(_) => Ok(()),
            Term::App(f, args) => {
                if f.0 >= self.len() {
                    return Err(TermError::UnknownSymbol {
                        name: format!("#{}", f.0),
                        pos: SourcePos::default(),
                    });
                }
                if self.arity(*f) != args.len() {
                    return Err(TermError::ArityMismatch {
                        name: self.name(*f).to_string(),
                        expected: self.arity(*f),
                        found: args.len(),
                        pos: SourcePos::default(),
                    });
                }
                args.iter().try_for_each(|a| self.check(a))
            }
        }
    }

    pub fn display<'a>(&'a self, term: &'a Term) -> TermDisplay<'a> {
        TermDisplay { sig: self, term }
    }

    pub fn show(&self, term: &Term) -> String {
        self.display(term).to_string()
    }
}

pub struct TermDisplay<'a> {
    sig: &'a Signature,
    term: &'a Term,
}

impl fmt::Display for TermDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.term {
            Term::Var(x) => f.write_str(x),
            Term::App(g, args) => {
                f.write_str(self.sig.name(*g))?;
                if !args.is_empty() {
                    f.write_str("(")?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            f.write_str(",")?;
                        }
                        write!(f, "{}", self.sig.display(a))?;
                    }
                    f.write_str(")")?;
                }
                Ok(())
            }
        }
    }
}

/// Argument-index path from the root; the empty path is the root.
pub type Position = Vec<usize>;

/// A first-order term. Equality is syntactic.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Var(String),
    App(SymbolId, Vec<Term>),
}

impl Term {
    pub fn var(name: impl Into<String>) -> Self {
        Term::Var(name.into())
    }

    pub fn constant(id: SymbolId) -> Self {
        Term::App(id, Vec::new())
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn root(&self) -> Option<SymbolId> {
        match self {
            Term::App(f, _) => Some(*f),
            Term::Var(_) => None,
        }
    }

    /// Arguments of an application; empty for variables.
    pub fn args(&self) -> &[Term] {
        match self {
            Term::App(_, args) => args,
            Term::Var(_) => &[],
        }
    }

    /// Constants and variables have height 0.
    pub fn height(&self) -> usize {
        self.args().iter().map(|a| a.height() + 1).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.args().iter().map(Term::size).sum::<usize>()
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::App(_, args) => args.iter().all(Term::is_ground),
        }
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(x) => {
                out.insert(x.as_str());
            }
            Term::App(_, args) => args.iter().for_each(|a| a.collect_vars(out)),
        }
    }

    pub fn subterm_at(&self, pos: &[usize]) -> Option<&Term> {
        match pos.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.args().get(i)?.subterm_at(rest),
        }
    }

    /// Returns a copy with the subterm at `pos` replaced.
    pub fn replace_at(&self, pos: &[usize], new: Term) -> Option<Term> {
        match pos.split_first() {
            None => Some(new),
            Some((&i, rest)) => match self {
                Term::App(f, args) if i < args.len() => {
                    let mut args = args.clone();
                    args[i] = args[i].replace_at(rest, new)?;
                    Some(Term::App(*f, args))
                }
                _ => None,
            },
        }
    }

    /// All positions in pre-order (outermost first, then left to right).
    pub fn positions(&self) -> Vec<Position> {
        let mut out = Vec::new();
        let mut path = Vec::new();
        self.collect_positions(&mut path, &mut out);
        out
    }

    fn collect_positions(&self, path: &mut Position, out: &mut Vec<Position>) {
        out.push(path.clone());
        for (i, a) in self.args().iter().enumerate() {
            path.push(i);
            a.collect_positions(path, out);
            path.pop();
        }
    }

    pub fn contains(&self, other: &Term) -> Option<Position> {
        self.positions()
            .into_iter()
            .find(|p| self.subterm_at(p) == Some(other))
    }

    pub fn apply(&self, sigma: &Substitution) -> Term {
        match self {
            Term::Var(x) => sigma.get(x).cloned().unwrap_or_else(|| self.clone()),
            Term::App(f, args) => Term::App(*f, args.iter().map(|a| a.apply(sigma)).collect()),
        }
    }
}

/// The immediate subterm relation `t ⊳ u`, as a list.
pub fn immediate_subterms(t: &Term) -> Vec<Term> {
    t.args().to_vec()
}

/// Finite map from variable names to terms.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Substitution(BTreeMap<String, Term>);

impl Substitution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, var: impl Into<String>, t: Term) -> Option<Term> {
        self.0.insert(var.into(), t)
    }

    pub fn get(&self, var: &str) -> Option<&Term> {
        self.0.get(var)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &Term)> {
        self.0.iter()
    }
}

impl<S: Into<String>> FromIterator<(S, Term)> for Substitution {
    fn from_iter<I: IntoIterator<Item = (S, Term)>>(iter: I) -> Self {
        Substitution(iter.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }
}

pub fn apply_substitution(t: &Term, sigma: &Substitution) -> Term {
    t.apply(sigma)
}

/// A term with a single hole, stored as the enclosing term and the hole's
/// position. Whatever sits at the hole position is ignored by `plug`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    skeleton: Term,
    hole: Position,
}

impl Context {
    pub fn new(skeleton: Term, hole: Position) -> Result<Self, TermError> {
        if skeleton.subterm_at(&hole).is_none() {
            return Err(TermError::InvalidPosition(hole));
        }
        Ok(Context { skeleton, hole })
    }

    /// The empty context `□`.
    pub fn hole() -> Self {
        Context {
            skeleton: Term::var("□"),
            hole: Vec::new(),
        }
    }

    pub fn hole_position(&self) -> &[usize] {
        &self.hole
    }

    pub fn plug(&self, t: Term) -> Term {
        self.skeleton
            .replace_at(&self.hole, t)
            .expect("hole position validated on construction")
    }
}

/// All ground terms of height at most `depth`, ordered by height, then
/// symbol order, then lexicographically by argument (in enumeration order).
pub fn enumerate_ground_terms(sig: &Signature, depth: usize) -> Result<Vec<Term>, TermError> {
    enumerate_ground_terms_capped(sig, depth, DEFAULT_MAX_HEIGHT)
}

pub fn enumerate_ground_terms_capped(
    sig: &Signature,
    depth: usize,
    cap: usize,
) -> Result<Vec<Term>, TermError> {
    if depth > cap {
        return Err(TermError::TooDeep { height: depth, cap });
    }
    let mut all: Vec<Term> = Vec::new();
    let mut heights: Vec<usize> = Vec::new();
    for h in 0..=depth {
        let before = all.len();
        for f in sig.ids() {
            let n = sig.arity(f);
            if h == 0 {
                if n == 0 {
                    all.push(Term::constant(f));
                    heights.push(0);
                }
                continue;
            }
            if n == 0 || before == 0 {
                continue;
            }
            // odometer over argument tuples drawn from terms of height < h,
            // keeping those with at least one argument of height exactly h-1
            let mut idx = vec![0usize; n];
            loop {
                if idx.iter().any(|&i| heights[i] == h - 1) {
                    if all.len() >= MAX_UNIVERSE {
                        return Err(TermError::UniverseTooLarge {
                            limit: MAX_UNIVERSE,
                        });
                    }
                    let args = idx.iter().map(|&i| all[i].clone()).collect();
                    all.push(Term::App(f, args));
                    heights.push(h);
                }
                if !advance(&mut idx, before) {
                    break;
                }
            }
        }
        if all.len() == before && h > 0 {
            // nothing new at this height, and nothing can appear later
            break;
        }
    }
    Ok(all)
}

/// Steps a little-endian-last odometer; false once it wraps around.
fn advance(idx: &mut [usize], base: usize) -> bool {
    for k in (0..idx.len()).rev() {
        idx[k] += 1;
        if idx[k] < base {
            return true;
        }
        idx[k] = 0;
    }
    false
}
