//! Textual formula syntax.
//!
//! Quantifiers: `forall1 a.`, `exists1 a.`, `forall2 A.`, `exists2 A.`,
//! optionally guarded (`forall1 a in A.`); connectives `&`, `|`, `=>`, `<=>`,
//! `!`; atoms like `a.stime < b.rtime`, `a.proc = p1`, `a.ival = _`,
//! `a.oval = undef`, `a.type = write`, `vis(a,b)`, `ar(a,b)`, `a in A`;
//! macros `rb(a,b)`, `ss(a,b)`, `so(a,b)`, `sorr(a,b)`, `dsucc(a,b,p)`,
//! `ctxt(b,a)`, `lastwrite(a,c)`, `finite(O)`, `finite{a | ...}`.
//!
//! Identifiers starting with an uppercase letter are second-order variables.
//! A quantifier's scope extends as far to the right as possible.

use super::*;
use crate::history::OpType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("parse error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Dot,
    Comma,
    LParen,
    RParen,
    LBrace,
    RBrace,
    Pipe,
    Amp,
    Bang,
    Lt,
    Le,
    Eq,
    Ne,
    Imp,
    Iff,
    Eof,
}

struct Lexer {
    toks: Vec<(usize, Tok)>,
    pos: usize,
}

fn lex(input: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = input.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '.' => {
                toks.push((i, Tok::Dot));
                i += 1;
            }
            ',' => {
                toks.push((i, Tok::Comma));
                i += 1;
            }
            '(' => {
                toks.push((i, Tok::LParen));
                i += 1;
            }
            ')' => {
                toks.push((i, Tok::RParen));
                i += 1;
            }
            '{' => {
                toks.push((i, Tok::LBrace));
                i += 1;
            }
            '}' => {
                toks.push((i, Tok::RBrace));
                i += 1;
            }
            '|' => {
                toks.push((i, Tok::Pipe));
                i += 1;
            }
            '&' => {
                toks.push((i, Tok::Amp));
                i += 1;
            }
            '<' => {
                if input[i..].starts_with("<=>") {
                    toks.push((i, Tok::Iff));
                    i += 3;
                } else if input[i..].starts_with("<=") {
                    toks.push((i, Tok::Le));
                    i += 2;
                } else {
                    toks.push((i, Tok::Lt));
                    i += 1;
                }
            }
            '=' => {
                if input[i..].starts_with("=>") {
                    toks.push((i, Tok::Imp));
                    i += 2;
                } else {
                    toks.push((i, Tok::Eq));
                    i += 1;
                }
            }
            '!' => {
                if input[i..].starts_with("!=") {
                    toks.push((i, Tok::Ne));
                    i += 2;
                } else {
                    toks.push((i, Tok::Bang));
                    i += 1;
                }
            }
            c if c.is_ascii_alphanumeric() || c == '_' => {
                let start = i;
                while i < bytes.len() {
                    let c = bytes[i] as char;
                    if c.is_ascii_alphanumeric() || c == '_' || c == '\'' {
                        i += 1;
                    } else {
                        break;
                    }
                }
                toks.push((start, Tok::Ident(input[start..i].to_string())));
            }
            other => {
                return Err(ParseError {
                    pos: i,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    toks.push((input.len(), Tok::Eof));
    Ok(toks)
}

impl Lexer {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn peek_at(&self, off: usize) -> &Tok {
        let ix = (self.pos + off).min(self.toks.len() - 1);
        &self.toks[ix].1
    }

    fn here(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok, what: &str) -> Result<(), ParseError> {
        if *self.peek() == t {
            self.bump();
            Ok(())
        } else {
            Err(self.err(format!("expected {what}")))
        }
    }

    fn err(&self, msg: String) -> ParseError {
        ParseError {
            pos: self.here(),
            msg,
        }
    }

    fn ident(&mut self, what: &str) -> Result<String, ParseError> {
        match self.bump() {
            Tok::Ident(s) => Ok(s),
            _ => Err(ParseError {
                pos: self.toks[self.pos.saturating_sub(1)].0,
                msg: format!("expected {what}"),
            }),
        }
    }
}

fn is_so_name(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_ascii_uppercase())
}

const RESERVED: &[&str] = &[
    "forall1", "forall2", "exists1", "exists2", "in", "rb", "ss", "so", "sorr", "vis", "ar",
    "ctxt", "lastwrite", "dsucc", "finite", "true", "false", "read", "write", "undef", "stime",
    "rtime", "proc", "obj", "type", "ival", "oval",
];

fn check_var(lx: &Lexer, name: &str) -> Result<(), ParseError> {
    if RESERVED.contains(&name) {
        return Err(lx.err(format!("`{name}` is a reserved word")));
    }
    Ok(())
}

/// Parses a formula from its textual syntax.
pub fn parse_formula(input: &str) -> Result<Formula, ParseError> {
    let mut lx = Lexer {
        toks: lex(input)?,
        pos: 0,
    };
    let f = parse_iff(&mut lx)?;
    if *lx.peek() != Tok::Eof {
        return Err(lx.err("trailing input after formula".into()));
    }
    Ok(f)
}

fn parse_iff(lx: &mut Lexer) -> Result<Formula, ParseError> {
    let mut f = parse_implies(lx)?;
    while *lx.peek() == Tok::Iff {
        lx.bump();
        let g = parse_implies(lx)?;
        f = Formula::iff(f, g);
    }
    Ok(f)
}

fn parse_implies(lx: &mut Lexer) -> Result<Formula, ParseError> {
    let f = parse_or(lx)?;
    if *lx.peek() == Tok::Imp {
        lx.bump();
        let g = parse_implies(lx)?;
        return Ok(Formula::implies(f, g));
    }
    Ok(f)
}

fn parse_or(lx: &mut Lexer) -> Result<Formula, ParseError> {
    let mut f = parse_and(lx)?;
    while *lx.peek() == Tok::Pipe {
        lx.bump();
        let g = parse_and(lx)?;
        f = Formula::or(f, g);
    }
    Ok(f)
}

fn parse_and(lx: &mut Lexer) -> Result<Formula, ParseError> {
    let mut f = parse_unary(lx)?;
    while *lx.peek() == Tok::Amp {
        lx.bump();
        let g = parse_unary(lx)?;
        f = Formula::and(f, g);
    }
    Ok(f)
}

fn parse_unary(lx: &mut Lexer) -> Result<Formula, ParseError> {
    match lx.peek() {
        Tok::Bang => {
            lx.bump();
            Ok(Formula::not(parse_unary(lx)?))
        }
        Tok::LParen => {
            lx.bump();
            let f = parse_iff(lx)?;
            lx.expect(Tok::RParen, "`)`")?;
            Ok(f)
        }
        Tok::Ident(name) => match name.as_str() {
            "forall1" | "exists1" | "forall2" | "exists2" => parse_quantifier(lx),
            _ => parse_atom(lx),
        },
        _ => Err(lx.err("expected a formula".into())),
    }
}

fn parse_quantifier(lx: &mut Lexer) -> Result<Formula, ParseError> {
    let kw = lx.ident("quantifier")?;
    let var = lx.ident("variable")?;
    check_var(lx, &var)?;
    let second_order = kw.ends_with('2');
    if second_order != is_so_name(&var) {
        return Err(lx.err(format!(
            "`{var}`: second-order variables start with an uppercase letter, first-order ones do not"
        )));
    }
    let mut guard: Option<String> = None;
    if let Tok::Ident(w) = lx.peek() {
        if w == "in" {
            if second_order {
                return Err(lx.err("guarded quantification is first-order only".into()));
            }
            lx.bump();
            let set = lx.ident("set variable")?;
            if !is_so_name(&set) {
                return Err(lx.err(format!("`{set}` is not a second-order variable")));
            }
            guard = Some(set);
        }
    }
    lx.expect(Tok::Dot, "`.` after quantified variable")?;
    let body = parse_iff(lx)?;
    Ok(match (kw.as_str(), guard) {
        ("forall1", None) => Formula::forall_fo(var, body),
        ("exists1", None) => Formula::exists_fo(var, body),
        ("forall1", Some(set)) => Formula::forall_fo_in(var, set, body),
        ("exists1", Some(set)) => Formula::exists_fo_in(var, set, body),
        ("forall2", _) => Formula::forall_so(var, body),
        ("exists2", _) => Formula::exists_so(var, body),
        _ => unreachable!(),
    })
}

fn parse_var(lx: &mut Lexer) -> Result<FoVar, ParseError> {
    let name = lx.ident("first-order variable")?;
    check_var(lx, &name)?;
    if is_so_name(&name) {
        return Err(lx.err(format!("`{name}` is second-order where an operation variable is expected")));
    }
    Ok(FoVar(name))
}

fn parse_pair(lx: &mut Lexer) -> Result<(FoVar, FoVar), ParseError> {
    lx.expect(Tok::LParen, "`(`")?;
    let a = parse_var(lx)?;
    lx.expect(Tok::Comma, "`,`")?;
    let b = parse_var(lx)?;
    lx.expect(Tok::RParen, "`)`")?;
    Ok((a, b))
}

fn parse_atom(lx: &mut Lexer) -> Result<Formula, ParseError> {
    let name = lx.ident("atom")?;
    match name.as_str() {
        "true" => return Ok(Formula::tt()),
        "false" => return Ok(Formula::ff()),
        "rb" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::atom(Atom::Rb(a, b)));
        }
        "ss" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::atom(Atom::Ss(a, b)));
        }
        "so" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::atom(Atom::So(a, b)));
        }
        "sorr" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::atom(Atom::Sorr(a, b)));
        }
        "vis" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::atom(Atom::Vis(a, b)));
        }
        "ar" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::atom(Atom::Ar(a, b)));
        }
        "ctxt" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::atom(Atom::InCtxt(a, b)));
        }
        "lastwrite" => {
            let (a, b) = parse_pair(lx)?;
            return Ok(Formula::LastWrite(a, b));
        }
        "dsucc" => {
            lx.expect(Tok::LParen, "`(`")?;
            let a = parse_var(lx)?;
            lx.expect(Tok::Comma, "`,`")?;
            let b = parse_var(lx)?;
            lx.expect(Tok::Comma, "`,`")?;
            let p = lx.ident("process literal")?;
            lx.expect(Tok::RParen, "`)`")?;
            return Ok(Formula::atom(Atom::DirectSuccOn(a, b, p)));
        }
        "finite" => return parse_finite(lx),
        _ => {}
    }
    check_var(lx, &name)?;
    if is_so_name(&name) {
        return Err(lx.err(format!("set variable `{name}` cannot start an atom")));
    }
    let var = FoVar(name);
    match lx.peek() {
        Tok::Ident(w) if w == "in" => {
            lx.bump();
            let set = lx.ident("set variable")?;
            check_var(lx, &set)?;
            if !is_so_name(&set) {
                return Err(lx.err(format!("`{set}` is not a second-order variable")));
            }
            Ok(Formula::atom(Atom::InSet(var, SoVar(set))))
        }
        Tok::Dot => {
            lx.bump();
            let attr = parse_attr(lx)?;
            parse_attr_rhs(lx, var, attr)
        }
        _ => Err(lx.err("expected `.attr` or `in` after variable".into())),
    }
}

fn parse_finite(lx: &mut Lexer) -> Result<Formula, ParseError> {
    match lx.peek() {
        Tok::LParen => {
            lx.bump();
            let set = lx.ident("set variable")?;
            check_var(lx, &set)?;
            if !is_so_name(&set) {
                return Err(lx.err(format!("`{set}` is not a second-order variable")));
            }
            lx.expect(Tok::RParen, "`)`")?;
            Ok(Formula::Finite(FiniteArg::SetVar(SoVar(set))))
        }
        Tok::LBrace => {
            lx.bump();
            let var = parse_var(lx)?;
            lx.expect(Tok::Pipe, "`|`")?;
            let body = parse_iff(lx)?;
            lx.expect(Tok::RBrace, "`}`")?;
            Ok(Formula::Finite(FiniteArg::Comprehension(var, Box::new(body))))
        }
        _ => Err(lx.err("expected `finite(O)` or `finite{a | ...}`".into())),
    }
}

fn parse_attr(lx: &mut Lexer) -> Result<Attr, ParseError> {
    let name = lx.ident("attribute")?;
    Ok(match name.as_str() {
        "stime" => Attr::STime,
        "rtime" => Attr::RTime,
        "proc" => Attr::Proc,
        "obj" => Attr::Obj,
        "type" => Attr::Type,
        "ival" => Attr::IVal,
        "oval" => Attr::OVal,
        other => return Err(lx.err(format!("unknown attribute `{other}`"))),
    })
}

fn term_of(var: FoVar, attr: Attr, lx: &Lexer) -> Result<Term, ParseError> {
    match attr {
        Attr::STime => Ok(Term {
            var,
            attr: TimeAttr::STime,
        }),
        Attr::RTime => Ok(Term {
            var,
            attr: TimeAttr::RTime,
        }),
        other => Err(lx.err(format!("`{}` is not a timestamp attribute", other.name()))),
    }
}

fn parse_attr_rhs(lx: &mut Lexer, var: FoVar, attr: Attr) -> Result<Formula, ParseError> {
    match lx.bump() {
        Tok::Lt | Tok::Le => {
            let strict = lx.toks[lx.pos - 1].1 == Tok::Lt;
            let lhs = term_of(var, attr, lx)?;
            let rv = parse_var(lx)?;
            lx.expect(Tok::Dot, "`.`")?;
            let rattr = parse_attr(lx)?;
            let rhs = term_of(rv, rattr, lx)?;
            Ok(Formula::atom(if strict {
                Atom::TimeLt(lhs, rhs)
            } else {
                Atom::TimeLe(lhs, rhs)
            }))
        }
        Tok::Eq | Tok::Ne => {
            let negated = lx.toks[lx.pos - 1].1 == Tok::Ne;
            let inner = parse_eq_rhs(lx, var, attr)?;
            Ok(if negated { Formula::not(inner) } else { inner })
        }
        _ => Err(lx.err("expected `=`, `!=`, `<` or `<=`".into())),
    }
}

fn parse_eq_rhs(lx: &mut Lexer, var: FoVar, attr: Attr) -> Result<Formula, ParseError> {
    // `b.attr` on the right makes this an attribute comparison.
    if let (Tok::Ident(_), Tok::Dot) = (lx.peek(), lx.peek_at(1)) {
        let rv = parse_var(lx)?;
        lx.expect(Tok::Dot, "`.`")?;
        let rattr = parse_attr(lx)?;
        return attr_eq(var, attr, rv, rattr)
            .map(Formula::atom)
            .map_err(|e| lx.err(e.to_string()));
    }
    let lit = lx.ident("literal")?;
    match attr {
        Attr::Proc => Ok(Formula::atom(Atom::ProcIs(var, lit))),
        Attr::Obj => Ok(Formula::atom(Atom::ObjIs(var, lit))),
        Attr::Type => match lit.as_str() {
            "read" => Ok(Formula::atom(Atom::TypeIs(var, OpType::Read))),
            "write" => Ok(Formula::atom(Atom::TypeIs(var, OpType::Write))),
            other => Err(lx.err(format!("`{other}` is not an operation type"))),
        },
        Attr::IVal => match lit.as_str() {
            "_" => Ok(Formula::atom(Atom::IvalEmpty(var))),
            "undef" => Err(lx.err("input values cannot be undef".into())),
            _ => Ok(Formula::atom(Atom::ValEq(var, ValAttr::IVal, lit))),
        },
        Attr::OVal => match lit.as_str() {
            "_" => Ok(Formula::atom(Atom::OvalEmpty(var))),
            "undef" => Ok(Formula::atom(Atom::OvalUndef(var))),
            _ => Ok(Formula::atom(Atom::ValEq(var, ValAttr::OVal, lit))),
        },
        Attr::STime | Attr::RTime => Err(lx.err("timestamps can only be compared to attributes".into())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_quantified_implication() {
        let f = parse_formula("forall1 a. forall1 b. rb(a,b) => ar(a,b)").unwrap();
        let expected = Formula::forall_fo(
            "a",
            Formula::forall_fo(
                "b",
                Formula::implies(
                    Formula::atom(Atom::Rb(FoVar::new("a"), FoVar::new("b"))),
                    Formula::atom(Atom::Ar(FoVar::new("a"), FoVar::new("b"))),
                ),
            ),
        );
        assert_eq!(f, expected);
    }

    #[test]
    fn parses_attribute_atoms() {
        assert!(parse_formula("forall1 a. a.stime < a.rtime").is_ok());
        assert!(parse_formula("forall1 a. a.proc = p1").is_ok());
        assert!(parse_formula("forall1 a. a.ival = _").is_ok());
        assert!(parse_formula("forall1 a. a.oval = undef").is_ok());
        assert!(parse_formula("forall1 a. a.type = write => a.oval = _").is_ok());
        assert!(parse_formula("forall1 a. forall1 b. a.ival = b.oval").is_ok());
        assert!(parse_formula("forall1 a. a.proc = b.obj").is_err());
        assert!(parse_formula("exists2 A. forall1 a in A. a.type = read").is_ok());
        assert!(parse_formula("forall1 a. finite{b | b.obj = a.obj}").is_ok());
    }

    #[test]
    fn case_convention_enforced() {
        assert!(parse_formula("forall1 A. A.stime < A.rtime").is_err());
        assert!(parse_formula("forall2 x. true").is_err());
        assert!(parse_formula("forall1 a. a in x").is_err());
    }

    #[test]
    fn quantifier_scope_extends_right() {
        let f = parse_formula("forall1 a. a.type = read | a.type = write").unwrap();
        assert!(matches!(f, Formula::ForallFo(_, _)));
    }
}
