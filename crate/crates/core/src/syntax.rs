//! Concrete syntax for terms and the TRS file format.
//!
//! Terms are written `name` or `name(t1,...,tn)`. A TRS file looks like
//!
//! ```text
//! # Ackermann
//! (VAR x y)
//! (RULES
//!   ack(0,y) -> s(y)
//!   ack(s(x),0) -> ack(x,s(0))
//!   ack(s(x),s(y)) -> ack(x,ack(s(x),y))
//! )
//! ```
//!
//! Whitespace between tokens is insignificant and `#` starts a comment that
//! runs to the end of the line. The `(VAR ...)` block is optional.

use std::collections::{BTreeSet, HashMap};

use crate::term::{Signature, SourcePos, Term, TermError, DEFAULT_MAX_HEIGHT};

#[derive(Clone, Debug, PartialEq, Eq)]
enum Tok {
    Name(String),
    LParen,
    RParen,
    Comma,
    Arrow,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Name(n) => format!("`{n}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn tokenize(input: &str) -> Vec<(Tok, SourcePos)> {
    let mut out = Vec::new();
    let mut line = 1;
    let mut col = 1;
    let mut chars = input.char_indices().peekable();
    let pos = |offset, line, col| SourcePos { offset, line, col };
    while let Some(&(off, c)) = chars.peek() {
        let here = pos(off, line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '#' => {
                while let Some(&(_, c)) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                }
            }
            '(' | ')' | ',' => {
                chars.next();
                col += 1;
                let tok = match c {
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    _ => Tok::Comma,
                };
                out.push((tok, here));
            }
            '-' if input[off..].starts_with("->") => {
                chars.next();
                chars.next();
                col += 2;
                out.push((Tok::Arrow, here));
            }
            _ => {
                let mut name = String::new();
                while let Some(&(o, c)) = chars.peek() {
                    if c.is_whitespace()
                        || matches!(c, '(' | ')' | ',' | '#')
                        || input[o..].starts_with("->")
                    {
                        break;
                    }
                    name.push(c);
                    chars.next();
                    col += 1;
                }
                out.push((Tok::Name(name), here));
            }
        }
    }
    let end = SourcePos {
        offset: input.len(),
        line,
        col,
    };
    out.push((Tok::Eof, end));
    out
}

/// A parsed but unresolved term: names are not yet classified as
/// variables or symbols.
#[derive(Clone, Debug)]
struct RawTerm {
    name: String,
    pos: SourcePos,
    args: Option<Vec<RawTerm>>,
}

struct Parser {
    toks: Vec<(Tok, SourcePos)>,
    at: usize,
    max_height: usize,
}

impl Parser {
    fn new(input: &str, max_height: usize) -> Self {
        Parser {
            toks: tokenize(input),
            at: 0,
            max_height,
        }
    }

    fn peek(&self) -> &(Tok, SourcePos) {
        &self.toks[self.at]
    }

    fn bump(&mut self) -> (Tok, SourcePos) {
        let t = self.toks[self.at].clone();
        if self.at + 1 < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn syntax<T>(&self, expected: &str) -> Result<T, TermError> {
        let (tok, pos) = self.peek();
        Err(TermError::Syntax {
            message: format!("expected {expected}, found {}", tok.describe()),
            pos: *pos,
        })
    }

    fn expect(&mut self, want: Tok) -> Result<SourcePos, TermError> {
        if self.peek().0 == want {
            Ok(self.bump().1)
        } else {
            self.syntax(&want.describe())
        }
    }

    fn raw_term(&mut self, depth: usize) -> Result<RawTerm, TermError> {
        if depth > self.max_height {
            return Err(TermError::TooDeep {
                height: depth,
                cap: self.max_height,
            });
        }
        let (tok, pos) = self.peek().clone();
        let Tok::Name(name) = tok else {
            return self.syntax("a term");
        };
        self.bump();
        if self.peek().0 != Tok::LParen {
            return Ok(RawTerm {
                name,
                pos,
                args: None,
            });
        }
        self.bump();
        let mut args = Vec::new();
        if self.peek().0 != Tok::RParen {
            loop {
                args.push(self.raw_term(depth + 1)?);
                match self.peek().0 {
                    Tok::Comma => {
                        self.bump();
                    }
                    Tok::RParen => break,
                    _ => return self.syntax("`,` or `)`"),
                }
            }
        }
        self.expect(Tok::RParen)?;
        Ok(RawTerm {
            name,
            pos,
            args: Some(args),
        })
    }
}

fn resolve(raw: &RawTerm, sig: &Signature, vars: &BTreeSet<String>) -> Result<Term, TermError> {
    if vars.contains(&raw.name) {
        if raw.args.as_ref().is_some_and(|a| !a.is_empty()) {
            return Err(TermError::Syntax {
                message: format!("variable `{}` cannot take arguments", raw.name),
                pos: raw.pos,
            });
        }
        return Ok(Term::Var(raw.name.clone()));
    }
    let id = sig.lookup(&raw.name).ok_or_else(|| TermError::UnknownSymbol {
        name: raw.name.clone(),
        pos: raw.pos,
    })?;
    let raw_args: &[RawTerm] = raw.args.as_deref().unwrap_or(&[]);
    if raw_args.len() != sig.arity(id) {
        return Err(TermError::ArityMismatch {
            name: raw.name.clone(),
            expected: sig.arity(id),
            found: raw_args.len(),
            pos: raw.pos,
        });
    }
    let args = raw_args
        .iter()
        .map(|a| resolve(a, sig, vars))
        .collect::<Result<_, _>>()?;
    Ok(Term::App(id, args))
}

/// Parses a single term. Names listed in `vars` are variables; every other
/// name must be a declared symbol used at its declared arity.
pub fn parse_term<S: AsRef<str>>(input: &str, sig: &Signature, vars: &[S]) -> Result<Term, TermError> {
    let vars: BTreeSet<String> = vars.iter().map(|v| v.as_ref().to_string()).collect();
    let mut p = Parser::new(input, DEFAULT_MAX_HEIGHT);
    let raw = p.raw_term(0)?;
    if p.peek().0 != Tok::Eof {
        return p.syntax("end of input");
    }
    resolve(&raw, sig, &vars)
}

/// The on-disk TRS format, parsed. The signature is inferred from the rules
/// in order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrsFile {
    pub vars: Vec<String>,
    pub signature: Signature,
    pub rules: Vec<(Term, Term)>,
}

pub fn parse_trs(input: &str) -> Result<TrsFile, TermError> {
    let mut p = Parser::new(input, DEFAULT_MAX_HEIGHT);
    let mut vars = Vec::new();
    let mut raw_rules = Vec::new();

    p.expect(Tok::LParen)?;
    let (tok, pos) = p.bump();
    let mut section = match tok {
        Tok::Name(n) => n,
        _ => {
            return Err(TermError::Syntax {
                message: "expected `VAR` or `RULES`".into(),
                pos,
            })
        }
    };
    if section == "VAR" {
        loop {
            match p.bump() {
                (Tok::Name(v), _) => vars.push(v),
                (Tok::RParen, _) => break,
                (t, pos) => {
                    return Err(TermError::Syntax {
                        message: format!("expected a variable name or `)`, found {}", t.describe()),
                        pos,
                    })
                }
            }
        }
        p.expect(Tok::LParen)?;
        let (tok, pos) = p.bump();
        section = match tok {
            Tok::Name(n) => n,
            t => {
                return Err(TermError::Syntax {
                    message: format!("expected `RULES`, found {}", t.describe()),
                    pos,
                })
            }
        };
        if section != "RULES" {
            return Err(TermError::Syntax {
                message: format!("expected `RULES`, found `{section}`"),
                pos,
            });
        }
    } else if section != "RULES" {
        return Err(TermError::Syntax {
            message: format!("expected `VAR` or `RULES`, found `{section}`"),
            pos,
        });
    }
    while p.peek().0 != Tok::RParen {
        let lhs = p.raw_term(0)?;
        p.expect(Tok::Arrow)?;
        let rhs = p.raw_term(0)?;
        raw_rules.push((lhs, rhs));
    }
    p.expect(Tok::RParen)?;
    if p.peek().0 != Tok::Eof {
        return p.syntax("end of input");
    }

    let var_set: BTreeSet<String> = vars.iter().cloned().collect();
    let mut arities: HashMap<String, usize> = HashMap::new();
    let mut signature = Signature::new();
    for (l, r) in &raw_rules {
        infer_symbols(l, &var_set, &mut arities, &mut signature)?;
        infer_symbols(r, &var_set, &mut arities, &mut signature)?;
    }
    let rules = raw_rules
        .iter()
        .map(|(l, r)| Ok((resolve(l, &signature, &var_set)?, resolve(r, &signature, &var_set)?)))
        .collect::<Result<_, TermError>>()?;
    Ok(TrsFile {
        vars,
        signature,
        rules,
    })
}

fn infer_symbols(
    raw: &RawTerm,
    vars: &BTreeSet<String>,
    arities: &mut HashMap<String, usize>,
    sig: &mut Signature,
) -> Result<(), TermError> {
    if vars.contains(&raw.name) {
        return Ok(());
    }
    let args: &[RawTerm] = raw.args.as_deref().unwrap_or(&[]);
    match arities.get(&raw.name) {
        Some(&n) if n != args.len() => {
            return Err(TermError::ArityMismatch {
                name: raw.name.clone(),
                expected: n,
                found: args.len(),
                pos: raw.pos,
            })
        }
        Some(_) => {}
        None => {
            arities.insert(raw.name.clone(), args.len());
            sig.add(raw.name.clone(), args.len())?;
        }
    }
    args.iter().try_for_each(|a| infer_symbols(a, vars, arities, sig))
}

impl TrsFile {
    /// Renders the file back in canonical layout.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if !self.vars.is_empty() {
            out.push_str("(VAR ");
            out.push_str(&self.vars.join(" "));
            out.push_str(")\n");
        }
        out.push_str("(RULES\n");
        for (l, r) in &self.rules {
            out.push_str(&format!(
                "  {} -> {}\n",
                self.signature.show(l),
                self.signature.show(r)
            ));
        }
        out.push_str(")\n");
        out
    }

    pub fn parse_term(&self, input: &str) -> Result<Term, TermError> {
        parse_term(input, &self.signature, &self.vars)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ack_sig() -> Signature {
        Signature::from_symbols([("ack", 2), ("s", 1), ("0", 0)]).unwrap()
    }

    #[test]
    fn parses_ackermann_lhs() {
        let sig = ack_sig();
        let t = parse_term("ack(s(x),0)", &sig, &["x", "y"]).unwrap();
        let ack = sig.lookup("ack").unwrap();
        let s = sig.lookup("s").unwrap();
        let zero = sig.lookup("0").unwrap();
        assert_eq!(
            t,
            Term::App(
                ack,
                vec![Term::App(s, vec![Term::var("x")]), Term::App(zero, vec![])]
            )
        );
    }

    #[test]
    fn reports_arity_mismatch() {
        let err = parse_term("ack(x)", &ack_sig(), &["x"]).unwrap_err();
        assert!(matches!(
            err,
            TermError::ArityMismatch { ref name, expected: 2, found: 1, .. } if name == "ack"
        ));
    }

    #[test]
    fn reports_unknown_symbol() {
        let err = parse_term("foo(x)", &ack_sig(), &["x"]).unwrap_err();
        assert!(matches!(err, TermError::UnknownSymbol { ref name, .. } if name == "foo"));
    }

    #[test]
    fn reports_syntax_position() {
        let err = parse_term("ack(x,\n  0", &ack_sig(), &["x"]).unwrap_err();
        match err {
            TermError::Syntax { pos, message } => {
                assert_eq!((pos.line, pos.col), (2, 4));
                assert!(message.contains("end of input"), "{message}");
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse_term("s(0) s(0)", &ack_sig(), &["x"]),
            Err(TermError::Syntax { .. })
        ));
        assert!(matches!(
            parse_term("x(0)", &ack_sig(), &["x"]),
            Err(TermError::Syntax { .. })
        ));
    }

    #[test]
    fn constants_accept_empty_parens() {
        let sig = ack_sig();
        assert_eq!(
            parse_term("0()", &sig, &["x"]).unwrap(),
            parse_term("0", &sig, &["x"]).unwrap()
        );
    }

    #[test]
    fn height_cap_is_a_resource_error() {
        let sig = ack_sig();
        let deep = format!("{}0{}", "s(".repeat(13), ")".repeat(13));
        assert!(matches!(
            parse_term(&deep, &sig, &["x"]),
            Err(TermError::TooDeep { cap: 12, .. })
        ));
        let ok = format!("{}0{}", "s(".repeat(12), ")".repeat(12));
        assert!(parse_term(&ok, &sig, &["x"]).is_ok());
    }

    const ACK: &str = "# Ackermann\n(VAR x y)\n(RULES\n  ack(0,y) -> s(y)\n  ack(s(x),0) -> ack(x,s(0))\n  ack(s(x),s(y)) -> ack(x,ack(s(x),y))\n)\n";

    #[test]
    fn trs_file_ackermann() {
        let f = parse_trs(ACK).unwrap();
        assert_eq!(f.vars, ["x", "y"]);
        let names: Vec<_> = f.signature.symbols().iter().map(|(n, a)| (n.as_str(), *a)).collect();
        assert_eq!(names, [("ack", 2), ("0", 0), ("s", 1)]);
        assert_eq!(f.rules.len(), 3);
        assert_eq!(f.signature.show(&f.rules[2].1), "ack(x,ack(s(x),y))");
        assert_eq!(parse_trs(&f.render()).unwrap(), f);
    }

    #[test]
    fn trs_file_whitespace_insensitive() {
        let f = parse_trs("(VAR x)(RULES f(x)->f(f(x)) g ->g)").unwrap();
        assert_eq!(f.rules.len(), 2);
        let g = parse_trs("(RULES a -> b)").unwrap();
        assert!(g.vars.is_empty());
    }

    #[test]
    fn trs_file_errors() {
        let e = parse_trs("(VAR x)\n(RULES\n f(x) -> f(x,x)\n)").unwrap_err();
        assert!(matches!(e, TermError::ArityMismatch { ref pos, .. } if pos.line == 3));
        assert!(matches!(
            parse_trs("(VAR x)\n(RULES\n f(x) => x\n)"),
            Err(TermError::Syntax { .. })
        ));
        assert!(matches!(parse_trs("(VAR x)\n(RULES\n f(x) -> x\n"), Err(TermError::Syntax { .. })));
        assert!(matches!(parse_trs("(FOO)"), Err(TermError::Syntax { .. })));
    }

    fn arb_term() -> impl Strategy<Value = String> {
        let leaf = prop_oneof![Just("0".to_string()), Just("x".to_string()), Just("y".to_string())];
        leaf.prop_recursive(5, 40, 2, |inner| {
            prop_oneof![
                inner.clone().prop_map(|t| format!("s({t})")),
                (inner.clone(), inner).prop_map(|(a, b)| format!("ack({a},{b})")),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(src in arb_term()) {
            let sig = ack_sig();
            let t = parse_term(&src, &sig, &["x", "y"]).unwrap();
            let printed = sig.show(&t);
            prop_assert_eq!(&printed, &src);
            prop_assert_eq!(parse_term(&printed, &sig, &["x", "y"]).unwrap(), t);
        }
    }
}
