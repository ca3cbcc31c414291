//! Abstract syntax of the second-order logic over histories and abstract
//! executions.
//!
//! The core grammar is deliberately small: atoms, disjunction, negation and
//! the two universal quantifiers. Everything else (conjunction, implication,
//! existentials, guarded quantifiers) is expanded at construction time, and
//! the relation macros (`rb`, `ss`, `so`, context membership, finiteness of
//! comprehensions, last-write) are first-class atoms rewritten away by
//! [`expand_macros`].

mod parse;
mod print;
pub mod random;

pub use parse::{parse_formula, ParseError};
pub use print::print_formula;

use crate::history::OpType;
use std::collections::BTreeSet;
use std::fmt;
use thiserror::Error;

/// First-order variable, interpreted as an operation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FoVar(pub String);

/// Second-order variable, interpreted as a set of operations.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SoVar(pub String);

impl FoVar {
    pub fn new(s: impl Into<String>) -> Self {
        FoVar(s.into())
    }
}

impl SoVar {
    pub fn new(s: impl Into<String>) -> Self {
        SoVar(s.into())
    }
}

impl fmt::Display for FoVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for SoVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Timestamp attribute of an operation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TimeAttr {
    STime,
    RTime,
}

/// Any comparable attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Attr {
    Proc,
    Obj,
    Type,
    IVal,
    OVal,
    STime,
    RTime,
}

/// Attribute comparisons must stay within one kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttrKind {
    Proc,
    Obj,
    Type,
    Value,
    Time,
}

impl Attr {
    pub fn kind(self) -> AttrKind {
        match self {
            Attr::Proc => AttrKind::Proc,
            Attr::Obj => AttrKind::Obj,
            Attr::Type => AttrKind::Type,
            Attr::IVal | Attr::OVal => AttrKind::Value,
            Attr::STime | Attr::RTime => AttrKind::Time,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Attr::Proc => "proc",
            Attr::Obj => "obj",
            Attr::Type => "type",
            Attr::IVal => "ival",
            Attr::OVal => "oval",
            Attr::STime => "stime",
            Attr::RTime => "rtime",
        }
    }
}

/// Value-carrying attribute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ValAttr {
    IVal,
    OVal,
}

impl ValAttr {
    pub fn attr(self) -> Attr {
        match self {
            ValAttr::IVal => Attr::IVal,
            ValAttr::OVal => Attr::OVal,
        }
    }
}

/// Timestamp term `a.stime` or `a.rtime`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Term {
    pub var: FoVar,
    pub attr: TimeAttr,
}

impl Term {
    pub fn stime(v: impl Into<String>) -> Self {
        Term {
            var: FoVar::new(v),
            attr: TimeAttr::STime,
        }
    }

    pub fn rtime(v: impl Into<String>) -> Self {
        Term {
            var: FoVar::new(v),
            attr: TimeAttr::RTime,
        }
    }
}

/// Atomic formulas, including the relation macros eliminated by
/// [`expand_macros`].
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Atom {
    /// `a.attr = b.attr'` with like-kinded attributes.
    AttrEq(FoVar, Attr, FoVar, Attr),
    /// `t < t'` on timestamps.
    TimeLt(Term, Term),
    /// `a.proc = p` with a process literal.
    ProcIs(FoVar, String),
    /// `a.obj = o` with an object literal.
    ObjIs(FoVar, String),
    /// `a.type = read|write`.
    TypeIs(FoVar, OpType),
    /// `a.ival = _` (empty input).
    IvalEmpty(FoVar),
    /// `a.oval = _` (empty output).
    OvalEmpty(FoVar),
    /// `a.oval = undef` (missing output).
    OvalUndef(FoVar),
    /// `a.ival = v` / `a.oval = v` with a value literal.
    ValEq(FoVar, ValAttr, String),
    /// `a in A`.
    InSet(FoVar, SoVar),
    /// `vis(a, b)`: `a` is visible to `b`.
    Vis(FoVar, FoVar),
    /// `ar(a, b)`: `a` is arbitrated before `b`.
    Ar(FoVar, FoVar),
    // --- macros ---
    /// `rb(a, b)`: `a.rtime < b.stime`.
    Rb(FoVar, FoVar),
    /// `ss(a, b)`: same process.
    Ss(FoVar, FoVar),
    /// `so(a, b)`: same process and returns-before.
    So(FoVar, FoVar),
    /// `sorr(a, b)`: session order restricted to read-read pairs.
    Sorr(FoVar, FoVar),
    /// `dsucc(a, b, p)`: `b` is the first operation on `p` after `a` returns.
    DirectSuccOn(FoVar, FoVar, String),
    /// `ctxt(b, a)`: `b` is a write on `a`'s object visible to `a`.
    InCtxt(FoVar, FoVar),
    /// `t <= t'` on timestamps.
    TimeLe(Term, Term),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("attributes `{0}` and `{1}` have different kinds and cannot be compared")]
    IllKinded(&'static str, &'static str),
}

/// Like-kinded attribute equality; rejects e.g. `a.proc = b.obj`.
pub fn attr_eq(a: FoVar, x: Attr, b: FoVar, y: Attr) -> Result<Atom, LogicError> {
    if x.kind() != y.kind() {
        return Err(LogicError::IllKinded(x.name(), y.name()));
    }
    Ok(Atom::AttrEq(a, x, b, y))
}

/// Formulas over the core grammar plus two binding macros.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Atom(Atom),
    Or(Box<Formula>, Box<Formula>),
    Not(Box<Formula>),
    ForallFo(FoVar, Box<Formula>),
    ForallSo(SoVar, Box<Formula>),
    /// `finite(O)` or `finite{x | φ}`; always true over finite models, and
    /// expanded into the bounded-start formulation for the word pipeline.
    Finite(FiniteArg),
    /// `lastwrite(a, c)`: `a.oval` is the value of the last write, under
    /// arbitration, among the writes visible to `c` on `c`'s object.
    LastWrite(FoVar, FoVar),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum FiniteArg {
    SetVar(SoVar),
    Comprehension(FoVar, Box<Formula>),
}

impl Formula {
    pub fn atom(a: Atom) -> Self {
        Formula::Atom(a)
    }

    pub fn or(p: Formula, q: Formula) -> Self {
        Formula::Or(Box::new(p), Box::new(q))
    }

    pub fn not(p: Formula) -> Self {
        Formula::Not(Box::new(p))
    }

    pub fn and(p: Formula, q: Formula) -> Self {
        Formula::not(Formula::or(Formula::not(p), Formula::not(q)))
    }

    pub fn implies(p: Formula, q: Formula) -> Self {
        Formula::or(Formula::not(p), q)
    }

    pub fn iff(p: Formula, q: Formula) -> Self {
        Formula::and(
            Formula::implies(p.clone(), q.clone()),
            Formula::implies(q, p),
        )
    }

    pub fn forall_fo(v: impl Into<String>, p: Formula) -> Self {
        Formula::ForallFo(FoVar::new(v), Box::new(p))
    }

    pub fn forall_so(v: impl Into<String>, p: Formula) -> Self {
        Formula::ForallSo(SoVar::new(v), Box::new(p))
    }

    pub fn exists_fo(v: impl Into<String>, p: Formula) -> Self {
        Formula::not(Formula::forall_fo(v, Formula::not(p)))
    }

    pub fn exists_so(v: impl Into<String>, p: Formula) -> Self {
        Formula::not(Formula::forall_so(v, Formula::not(p)))
    }

    /// `forall1 v in A. p`
    pub fn forall_fo_in(v: impl Into<String>, set: impl Into<String>, p: Formula) -> Self {
        let v = v.into();
        let guard = Formula::atom(Atom::InSet(FoVar::new(v.clone()), SoVar::new(set)));
        Formula::forall_fo(v, Formula::implies(guard, p))
    }

    /// `exists1 v in A. p`
    pub fn exists_fo_in(v: impl Into<String>, set: impl Into<String>, p: Formula) -> Self {
        let v = v.into();
        let guard = Formula::atom(Atom::InSet(FoVar::new(v.clone()), SoVar::new(set)));
        Formula::exists_fo(v, Formula::and(guard, p))
    }

    /// Closed tautology: every operation starts when it starts.
    pub fn tt() -> Self {
        Formula::forall_fo(
            "_t",
            Formula::Atom(Atom::AttrEq(
                FoVar::new("_t"),
                Attr::STime,
                FoVar::new("_t"),
                Attr::STime,
            )),
        )
    }

    pub fn ff() -> Self {
        Formula::not(Formula::tt())
    }

    /// Free first- and second-order variables.
    pub fn free_variables(&self) -> (BTreeSet<FoVar>, BTreeSet<SoVar>) {
        let mut fo = BTreeSet::new();
        let mut so = BTreeSet::new();
        self.collect_free(&mut fo, &mut so, &mut Vec::new(), &mut Vec::new());
        (fo, so)
    }

    fn collect_free(
        &self,
        fo: &mut BTreeSet<FoVar>,
        so: &mut BTreeSet<SoVar>,
        bound_fo: &mut Vec<FoVar>,
        bound_so: &mut Vec<SoVar>,
    ) {
        let touch_fo = |v: &FoVar, bound: &[FoVar], fo: &mut BTreeSet<FoVar>| {
            if !bound.contains(v) {
                fo.insert(v.clone());
            }
        };
        match self {
            Formula::Atom(a) => {
                for v in a.fo_vars() {
                    touch_fo(v, bound_fo, fo);
                }
                if let Atom::InSet(_, s) = a {
                    if !bound_so.contains(s) {
                        so.insert(s.clone());
                    }
                }
            }
            Formula::Or(p, q) => {
                p.collect_free(fo, so, bound_fo, bound_so);
                q.collect_free(fo, so, bound_fo, bound_so);
            }
            Formula::Not(p) => p.collect_free(fo, so, bound_fo, bound_so),
            Formula::ForallFo(v, p) => {
                bound_fo.push(v.clone());
                p.collect_free(fo, so, bound_fo, bound_so);
                bound_fo.pop();
            }
            Formula::ForallSo(v, p) => {
                bound_so.push(v.clone());
                p.collect_free(fo, so, bound_fo, bound_so);
                bound_so.pop();
            }
            Formula::Finite(FiniteArg::SetVar(s)) => {
                if !bound_so.contains(s) {
                    so.insert(s.clone());
                }
            }
            Formula::Finite(FiniteArg::Comprehension(v, p)) => {
                bound_fo.push(v.clone());
                p.collect_free(fo, so, bound_fo, bound_so);
                bound_fo.pop();
            }
            Formula::LastWrite(a, c) => {
                touch_fo(a, bound_fo, fo);
                touch_fo(c, bound_fo, fo);
            }
        }
    }

    pub fn is_closed(&self) -> bool {
        let (fo, so) = self.free_variables();
        fo.is_empty() && so.is_empty()
    }

    /// True iff the formula mentions visibility or arbitration, possibly
    /// through a macro, and therefore needs an abstract execution.
    pub fn uses_exec_relations(&self) -> bool {
        match self {
            Formula::Atom(a) => matches!(a, Atom::Vis(_, _) | Atom::Ar(_, _) | Atom::InCtxt(_, _)),
            Formula::Or(p, q) => p.uses_exec_relations() || q.uses_exec_relations(),
            Formula::Not(p) => p.uses_exec_relations(),
            Formula::ForallFo(_, p) | Formula::ForallSo(_, p) => p.uses_exec_relations(),
            Formula::Finite(FiniteArg::SetVar(_)) => false,
            Formula::Finite(FiniteArg::Comprehension(_, p)) => p.uses_exec_relations(),
            Formula::LastWrite(_, _) => true,
        }
    }
}

impl Atom {
    fn fo_vars(&self) -> Vec<&FoVar> {
        match self {
            Atom::AttrEq(a, _, b, _) => vec![a, b],
            Atom::TimeLt(s, t) | Atom::TimeLe(s, t) => vec![&s.var, &t.var],
            Atom::ProcIs(a, _)
            | Atom::ObjIs(a, _)
            | Atom::TypeIs(a, _)
            | Atom::IvalEmpty(a)
            | Atom::OvalEmpty(a)
            | Atom::OvalUndef(a)
            | Atom::ValEq(a, _, _) => vec![a],
            Atom::InSet(a, _) => vec![a],
            Atom::Vis(a, b)
            | Atom::Ar(a, b)
            | Atom::Rb(a, b)
            | Atom::Ss(a, b)
            | Atom::So(a, b)
            | Atom::Sorr(a, b)
            | Atom::InCtxt(a, b) => vec![a, b],
            Atom::DirectSuccOn(a, b, _) => vec![a, b],
        }
    }
}

/// Deterministic fresh-name source avoiding every name already used in the
/// formula it was built from.
struct FreshNames {
    used: BTreeSet<String>,
    next: usize,
}

impl FreshNames {
    fn for_formula(f: &Formula) -> Self {
        let mut used = BTreeSet::new();
        collect_names(f, &mut used);
        FreshNames { used, next: 0 }
    }

    fn fresh_fo(&mut self) -> FoVar {
        loop {
            let name = format!("_c{}", self.next);
            self.next += 1;
            if self.used.insert(name.clone()) {
                return FoVar(name);
            }
        }
    }
}

fn collect_names(f: &Formula, out: &mut BTreeSet<String>) {
    match f {
        Formula::Atom(a) => {
            for v in a.fo_vars() {
                out.insert(v.0.clone());
            }
            if let Atom::InSet(_, s) = a {
                out.insert(s.0.clone());
            }
        }
        Formula::Or(p, q) => {
            collect_names(p, out);
            collect_names(q, out);
        }
        Formula::Not(p) => collect_names(p, out),
        Formula::ForallFo(v, p) => {
            out.insert(v.0.clone());
            collect_names(p, out);
        }
        Formula::ForallSo(v, p) => {
            out.insert(v.0.clone());
            collect_names(p, out);
        }
        Formula::Finite(FiniteArg::SetVar(s)) => {
            out.insert(s.0.clone());
        }
        Formula::Finite(FiniteArg::Comprehension(v, p)) => {
            out.insert(v.0.clone());
            collect_names(p, out);
        }
        Formula::LastWrite(a, c) => {
            out.insert(a.0.clone());
            out.insert(c.0.clone());
        }
    }
}

/// Capture-avoiding substitution of a free first-order variable by another
/// (used only with fresh replacements, which cannot be captured).
fn subst_fo(f: &Formula, from: &FoVar, to: &FoVar) -> Formula {
    let sv = |v: &FoVar| if v == from { to.clone() } else { v.clone() };
    let st = |t: &Term| Term {
        var: sv(&t.var),
        attr: t.attr,
    };
    match f {
        Formula::Atom(a) => Formula::Atom(match a {
            Atom::AttrEq(a1, x, b1, y) => Atom::AttrEq(sv(a1), *x, sv(b1), *y),
            Atom::TimeLt(s, t) => Atom::TimeLt(st(s), st(t)),
            Atom::TimeLe(s, t) => Atom::TimeLe(st(s), st(t)),
            Atom::ProcIs(a1, p) => Atom::ProcIs(sv(a1), p.clone()),
            Atom::ObjIs(a1, o) => Atom::ObjIs(sv(a1), o.clone()),
            Atom::TypeIs(a1, t) => Atom::TypeIs(sv(a1), *t),
            Atom::IvalEmpty(a1) => Atom::IvalEmpty(sv(a1)),
            Atom::OvalEmpty(a1) => Atom::OvalEmpty(sv(a1)),
            Atom::OvalUndef(a1) => Atom::OvalUndef(sv(a1)),
            Atom::ValEq(a1, w, v) => Atom::ValEq(sv(a1), *w, v.clone()),
            Atom::InSet(a1, s) => Atom::InSet(sv(a1), s.clone()),
            Atom::Vis(a1, b1) => Atom::Vis(sv(a1), sv(b1)),
            Atom::Ar(a1, b1) => Atom::Ar(sv(a1), sv(b1)),
            Atom::Rb(a1, b1) => Atom::Rb(sv(a1), sv(b1)),
            Atom::Ss(a1, b1) => Atom::Ss(sv(a1), sv(b1)),
            Atom::So(a1, b1) => Atom::So(sv(a1), sv(b1)),
            Atom::Sorr(a1, b1) => Atom::Sorr(sv(a1), sv(b1)),
            Atom::DirectSuccOn(a1, b1, p) => Atom::DirectSuccOn(sv(a1), sv(b1), p.clone()),
            Atom::InCtxt(a1, b1) => Atom::InCtxt(sv(a1), sv(b1)),
        }),
        Formula::Or(p, q) => Formula::or(subst_fo(p, from, to), subst_fo(q, from, to)),
        Formula::Not(p) => Formula::not(subst_fo(p, from, to)),
        Formula::ForallFo(v, p) => {
            if v == from {
                Formula::ForallFo(v.clone(), p.clone())
            } else {
                Formula::ForallFo(v.clone(), Box::new(subst_fo(p, from, to)))
            }
        }
        Formula::ForallSo(v, p) => Formula::ForallSo(v.clone(), Box::new(subst_fo(p, from, to))),
        Formula::Finite(FiniteArg::SetVar(s)) => Formula::Finite(FiniteArg::SetVar(s.clone())),
        Formula::Finite(FiniteArg::Comprehension(v, p)) => {
            if v == from {
                Formula::Finite(FiniteArg::Comprehension(v.clone(), p.clone()))
            } else {
                Formula::Finite(FiniteArg::Comprehension(
                    v.clone(),
                    Box::new(subst_fo(p, from, to)),
                ))
            }
        }
        Formula::LastWrite(a, c) => Formula::LastWrite(sv(a), sv(c)),
    }
}

/// Rewrites every macro into the core grammar. Idempotent, and preserves the
/// free variables of the input.
pub fn expand_macros(f: &Formula) -> Formula {
    let mut fresh = FreshNames::for_formula(f);
    expand(f, &mut fresh)
}

fn expand(f: &Formula, fresh: &mut FreshNames) -> Formula {
    match f {
        Formula::Atom(a) => expand_atom(a, fresh),
        Formula::Or(p, q) => Formula::or(expand(p, fresh), expand(q, fresh)),
        Formula::Not(p) => Formula::not(expand(p, fresh)),
        Formula::ForallFo(v, p) => Formula::ForallFo(v.clone(), Box::new(expand(p, fresh))),
        Formula::ForallSo(v, p) => Formula::ForallSo(v.clone(), Box::new(expand(p, fresh))),
        Formula::Finite(FiniteArg::SetVar(s)) => {
            // (no element) or (some element starting last)
            let a = fresh.fresh_fo();
            let b = fresh.fresh_fo();
            let in_a = Formula::atom(Atom::InSet(a.clone(), s.clone()));
            let in_b = Formula::atom(Atom::InSet(b.clone(), s.clone()));
            let empty = Formula::not(Formula::exists_fo(a.0.clone(), in_a.clone()));
            let le = le_stime(&b, &a);
            let max = Formula::exists_fo(
                a.0.clone(),
                Formula::and(
                    in_a,
                    Formula::forall_fo(b.0.clone(), Formula::implies(in_b, le)),
                ),
            );
            Formula::or(empty, max)
        }
        Formula::Finite(FiniteArg::Comprehension(x, p)) => {
            let p = expand(p, fresh);
            let y = fresh.fresh_fo();
            let p_y = subst_fo(&p, x, &y);
            let empty = Formula::not(Formula::exists_fo(x.0.clone(), p.clone()));
            let le = le_stime(&y, x);
            let max = Formula::exists_fo(
                x.0.clone(),
                Formula::and(
                    p,
                    Formula::forall_fo(y.0.clone(), Formula::implies(p_y, le)),
                ),
            );
            Formula::or(empty, max)
        }
        Formula::LastWrite(a, c) => {
            // Every visible write whose input differs from a.oval is
            // arbitrated before another visible write.
            let b = fresh.fresh_fo();
            let d = fresh.fresh_fo();
            let b_in_ctxt = expand_atom(&Atom::InCtxt(b.clone(), c.clone()), fresh);
            let d_in_ctxt = expand_atom(&Atom::InCtxt(d.clone(), c.clone()), fresh);
            let differs = Formula::not(Formula::Atom(Atom::AttrEq(
                b.clone(),
                Attr::IVal,
                a.clone(),
                Attr::OVal,
            )));
            let dominated = Formula::exists_fo(
                d.0.clone(),
                Formula::and(d_in_ctxt, Formula::atom(Atom::Ar(b.clone(), d))),
            );
            Formula::forall_fo(
                b.0.clone(),
                Formula::implies(Formula::and(b_in_ctxt, differs), dominated),
            )
        }
    }
}

fn le_stime(a: &FoVar, b: &FoVar) -> Formula {
    Formula::or(
        Formula::atom(Atom::TimeLt(
            Term {
                var: a.clone(),
                attr: TimeAttr::STime,
            },
            Term {
                var: b.clone(),
                attr: TimeAttr::STime,
            },
        )),
        Formula::atom(Atom::AttrEq(
            a.clone(),
            Attr::STime,
            b.clone(),
            Attr::STime,
        )),
    )
}

fn expand_atom(a: &Atom, fresh: &mut FreshNames) -> Formula {
    match a {
        Atom::Rb(x, y) => Formula::atom(Atom::TimeLt(
            Term {
                var: x.clone(),
                attr: TimeAttr::RTime,
            },
            Term {
                var: y.clone(),
                attr: TimeAttr::STime,
            },
        )),
        Atom::Ss(x, y) => Formula::atom(Atom::AttrEq(
            x.clone(),
            Attr::Proc,
            y.clone(),
            Attr::Proc,
        )),
        Atom::So(x, y) => Formula::and(
            expand_atom(&Atom::Ss(x.clone(), y.clone()), fresh),
            expand_atom(&Atom::Rb(x.clone(), y.clone()), fresh),
        ),
        Atom::Sorr(x, y) => Formula::and(
            Formula::and(
                Formula::atom(Atom::TypeIs(x.clone(), OpType::Read)),
                Formula::atom(Atom::TypeIs(y.clone(), OpType::Read)),
            ),
            expand_atom(&Atom::So(x.clone(), y.clone()), fresh),
        ),
        Atom::DirectSuccOn(x, y, p) => {
            let c = fresh.fresh_fo();
            let blocker = Formula::exists_fo(
                c.0.clone(),
                Formula::and(
                    expand_atom(&Atom::Ss(c.clone(), y.clone()), fresh),
                    Formula::and(
                        expand_atom(&Atom::Rb(x.clone(), c.clone()), fresh),
                        expand_atom(&Atom::Rb(c.clone(), y.clone()), fresh),
                    ),
                ),
            );
            Formula::and(
                Formula::atom(Atom::ProcIs(y.clone(), p.clone())),
                Formula::and(
                    expand_atom(&Atom::Rb(x.clone(), y.clone()), fresh),
                    Formula::not(blocker),
                ),
            )
        }
        Atom::InCtxt(b, a) => Formula::and(
            Formula::atom(Atom::Vis(b.clone(), a.clone())),
            Formula::and(
                Formula::atom(Atom::TypeIs(b.clone(), OpType::Write)),
                Formula::atom(Atom::AttrEq(b.clone(), Attr::Obj, a.clone(), Attr::Obj)),
            ),
        ),
        Atom::TimeLe(s, t) => Formula::or(
            Formula::atom(Atom::TimeLt(s.clone(), t.clone())),
            Formula::atom(Atom::AttrEq(
                s.var.clone(),
                match s.attr {
                    TimeAttr::STime => Attr::STime,
                    TimeAttr::RTime => Attr::RTime,
                },
                t.var.clone(),
                match t.attr {
                    TimeAttr::STime => Attr::STime,
                    TimeAttr::RTime => Attr::RTime,
                },
            )),
        ),
        other => Formula::Atom(other.clone()),
    }
}

/// Canonically renames all bound variables (`_b0`, `_b1`, ... and `_B0`, ...
/// in traversal order), eliminating shadowing.
pub fn alpha_normalize(f: &Formula) -> Formula {
    let mut counter = 0usize;
    normalize(f, &mut counter, &mut Vec::new(), &mut Vec::new())
}

fn normalize(
    f: &Formula,
    counter: &mut usize,
    env_fo: &mut Vec<(FoVar, FoVar)>,
    env_so: &mut Vec<(SoVar, SoVar)>,
) -> Formula {
    let look_fo = |v: &FoVar, env: &[(FoVar, FoVar)]| -> FoVar {
        env.iter()
            .rev()
            .find(|(k, _)| k == v)
            .map(|(_, nv)| nv.clone())
            .unwrap_or_else(|| v.clone())
    };
    match f {
        Formula::Atom(_) | Formula::LastWrite(_, _) | Formula::Finite(FiniteArg::SetVar(_)) => {
            // Rename free occurrences through the environment.
            rename_formula(f, &|v| look_fo(v, env_fo), &|s| {
                env_so
                    .iter()
                    .rev()
                    .find(|(k, _)| k == s)
                    .map(|(_, ns)| ns.clone())
                    .unwrap_or_else(|| s.clone())
            })
        }
        Formula::Or(p, q) => Formula::or(
            normalize(p, counter, env_fo, env_so),
            normalize(q, counter, env_fo, env_so),
        ),
        Formula::Not(p) => Formula::not(normalize(p, counter, env_fo, env_so)),
        Formula::ForallFo(v, p) => {
            let nv = FoVar(format!("_b{}", *counter));
            *counter += 1;
            env_fo.push((v.clone(), nv.clone()));
            let body = normalize(p, counter, env_fo, env_so);
            env_fo.pop();
            Formula::ForallFo(nv, Box::new(body))
        }
        Formula::ForallSo(v, p) => {
            let nv = SoVar(format!("_B{}", *counter));
            *counter += 1;
            env_so.push((v.clone(), nv.clone()));
            let body = normalize(p, counter, env_fo, env_so);
            env_so.pop();
            Formula::ForallSo(nv, Box::new(body))
        }
        Formula::Finite(FiniteArg::Comprehension(v, p)) => {
            let nv = FoVar(format!("_b{}", *counter));
            *counter += 1;
            env_fo.push((v.clone(), nv.clone()));
            let body = normalize(p, counter, env_fo, env_so);
            env_fo.pop();
            Formula::Finite(FiniteArg::Comprehension(nv, Box::new(body)))
        }
    }
}

fn rename_formula(
    f: &Formula,
    fo: &impl Fn(&FoVar) -> FoVar,
    so: &impl Fn(&SoVar) -> SoVar,
) -> Formula {
    match f {
        Formula::Atom(a) => {
            let st = |t: &Term| Term {
                var: fo(&t.var),
                attr: t.attr,
            };
            Formula::Atom(match a {
                Atom::AttrEq(a1, x, b1, y) => Atom::AttrEq(fo(a1), *x, fo(b1), *y),
                Atom::TimeLt(s, t) => Atom::TimeLt(st(s), st(t)),
                Atom::TimeLe(s, t) => Atom::TimeLe(st(s), st(t)),
                Atom::ProcIs(a1, p) => Atom::ProcIs(fo(a1), p.clone()),
                Atom::ObjIs(a1, o) => Atom::ObjIs(fo(a1), o.clone()),
                Atom::TypeIs(a1, t) => Atom::TypeIs(fo(a1), *t),
                Atom::IvalEmpty(a1) => Atom::IvalEmpty(fo(a1)),
                Atom::OvalEmpty(a1) => Atom::OvalEmpty(fo(a1)),
                Atom::OvalUndef(a1) => Atom::OvalUndef(fo(a1)),
                Atom::ValEq(a1, w, v) => Atom::ValEq(fo(a1), *w, v.clone()),
                Atom::InSet(a1, s) => Atom::InSet(fo(a1), so(s)),
                Atom::Vis(a1, b1) => Atom::Vis(fo(a1), fo(b1)),
                Atom::Ar(a1, b1) => Atom::Ar(fo(a1), fo(b1)),
                Atom::Rb(a1, b1) => Atom::Rb(fo(a1), fo(b1)),
                Atom::Ss(a1, b1) => Atom::Ss(fo(a1), fo(b1)),
                Atom::So(a1, b1) => Atom::So(fo(a1), fo(b1)),
                Atom::Sorr(a1, b1) => Atom::Sorr(fo(a1), fo(b1)),
                Atom::DirectSuccOn(a1, b1, p) => Atom::DirectSuccOn(fo(a1), fo(b1), p.clone()),
                Atom::InCtxt(a1, b1) => Atom::InCtxt(fo(a1), fo(b1)),
            })
        }
        Formula::LastWrite(a, c) => Formula::LastWrite(fo(a), fo(c)),
        Formula::Finite(FiniteArg::SetVar(s)) => Formula::Finite(FiniteArg::SetVar(so(s))),
        _ => unreachable!("rename_formula is only called on leaves"),
    }
}

/// Alpha-equivalence: equality modulo consistent renaming of bound variables.
pub fn alpha_eq(f: &Formula, g: &Formula) -> bool {
    alpha_normalize(f) == alpha_normalize(g)
}
