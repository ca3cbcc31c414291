//! Formula printer. Output re-parses to an alpha-equivalent formula; the
//! derived connectives are recovered from their core shapes for readability.

use super::*;

/// Renders a formula in the concrete syntax accepted by
/// [`parse_formula`](super::parse_formula).
pub fn print_formula(f: &Formula) -> String {
    let mut out = String::new();
    write_formula(f, &mut out);
    out
}

/// True for formulas whose printed form starts with a quantifier and whose
/// body extends as far right as possible; as operands of a binary connective
/// they need explicit parentheses.
fn quantifier_shaped(f: &Formula) -> bool {
    match f {
        Formula::ForallFo(_, _) | Formula::ForallSo(_, _) => true,
        Formula::Not(inner) => matches!(
            inner.as_ref(),
            Formula::ForallFo(_, body) | Formula::ForallSo(_, body)
                if matches!(body.as_ref(), Formula::Not(_))
        ),
        _ => false,
    }
}

fn write_operand(f: &Formula, out: &mut String) {
    if quantifier_shaped(f) {
        out.push('(');
        write_formula(f, out);
        out.push(')');
    } else {
        write_formula(f, out);
    }
}

fn write_formula(f: &Formula, out: &mut String) {
    // exists1/exists2: !(forall v. !p)
    if let Formula::Not(inner) = f {
        match inner.as_ref() {
            Formula::ForallFo(v, body) => {
                if let Formula::Not(p) = body.as_ref() {
                    out.push_str(&format!("exists1 {v}. "));
                    write_formula(p, out);
                    return;
                }
            }
            Formula::ForallSo(v, body) => {
                if let Formula::Not(p) = body.as_ref() {
                    out.push_str(&format!("exists2 {v}. "));
                    write_formula(p, out);
                    return;
                }
            }
            // conjunction: !(!p | !q)
            Formula::Or(l, r) => {
                if let (Formula::Not(p), Formula::Not(q)) = (l.as_ref(), r.as_ref()) {
                    out.push('(');
                    write_operand(p, out);
                    out.push_str(" & ");
                    write_operand(q, out);
                    out.push(')');
                    return;
                }
            }
            _ => {}
        }
    }
    match f {
        Formula::Atom(a) => write_atom(a, out),
        Formula::Or(p, q) => {
            // implication: !p | q
            if let Formula::Not(inner) = p.as_ref() {
                out.push('(');
                write_operand(inner, out);
                out.push_str(" => ");
                write_operand(q, out);
                out.push(')');
                return;
            }
            out.push('(');
            write_operand(p, out);
            out.push_str(" | ");
            write_operand(q, out);
            out.push(')');
        }
        Formula::Not(p) => {
            out.push('!');
            match p.as_ref() {
                Formula::Atom(_) => write_formula(p, out),
                _ => {
                    out.push('(');
                    write_formula(p, out);
                    out.push(')');
                }
            }
        }
        Formula::ForallFo(v, p) => {
            out.push_str(&format!("forall1 {v}. "));
            write_formula(p, out);
        }
        Formula::ForallSo(v, p) => {
            out.push_str(&format!("forall2 {v}. "));
            write_formula(p, out);
        }
        Formula::Finite(FiniteArg::SetVar(s)) => out.push_str(&format!("finite({s})")),
        Formula::Finite(FiniteArg::Comprehension(v, p)) => {
            out.push_str(&format!("finite{{{v} | "));
            write_formula(p, out);
            out.push('}');
        }
        Formula::LastWrite(a, c) => out.push_str(&format!("lastwrite({a}, {c})")),
    }
}

fn term_str(t: &Term) -> String {
    match t.attr {
        TimeAttr::STime => format!("{}.stime", t.var),
        TimeAttr::RTime => format!("{}.rtime", t.var),
    }
}

fn write_atom(a: &Atom, out: &mut String) {
    let s = match a {
        Atom::AttrEq(x, ax, y, ay) => format!("{x}.{} = {y}.{}", ax.name(), ay.name()),
        Atom::TimeLt(s, t) => format!("{} < {}", term_str(s), term_str(t)),
        Atom::TimeLe(s, t) => format!("{} <= {}", term_str(s), term_str(t)),
        Atom::ProcIs(x, p) => format!("{x}.proc = {p}"),
        Atom::ObjIs(x, o) => format!("{x}.obj = {o}"),
        Atom::TypeIs(x, t) => format!("{x}.type = {t}"),
        Atom::IvalEmpty(x) => format!("{x}.ival = _"),
        Atom::OvalEmpty(x) => format!("{x}.oval = _"),
        Atom::OvalUndef(x) => format!("{x}.oval = undef"),
        Atom::ValEq(x, ValAttr::IVal, v) => format!("{x}.ival = {v}"),
        Atom::ValEq(x, ValAttr::OVal, v) => format!("{x}.oval = {v}"),
        Atom::InSet(x, s) => format!("{x} in {s}"),
        Atom::Vis(x, y) => format!("vis({x}, {y})"),
        Atom::Ar(x, y) => format!("ar({x}, {y})"),
        Atom::Rb(x, y) => format!("rb({x}, {y})"),
        Atom::Ss(x, y) => format!("ss({x}, {y})"),
        Atom::So(x, y) => format!("so({x}, {y})"),
        Atom::Sorr(x, y) => format!("sorr({x}, {y})"),
        Atom::DirectSuccOn(x, y, p) => format!("dsucc({x}, {y}, {p})"),
        Atom::InCtxt(x, y) => format!("ctxt({x}, {y})"),
    };
    out.push_str(&s);
}

#[cfg(test)]
mod tests {
    use super::super::{alpha_eq, parse_formula};
    use super::*;

    #[test]
    fn print_parse_round_trip() {
        let sources = [
            "forall1 a. forall1 b. rb(a,b) => ar(a,b)",
            "exists2 X. (forall1 x. x in X => x.oval = undef) & forall1 a. forall1 b. (vis(a,b) <=> ar(a,b) & !(a in X))",
            "forall1 a. (a.type = write => a.oval = _) & (a.type = read => lastwrite(a, a))",
            "finite{a | a.type = write} => exists1 a. a.type = read",
            "forall1 a. a.stime <= a.rtime | sorr(a, a)",
            "exists1 a in A. dsucc(a, a, p1)",
        ];
        for src in sources {
            let f = parse_formula(src).unwrap();
            let printed = print_formula(&f);
            let g = parse_formula(&printed)
                .unwrap_or_else(|e| panic!("printed form of `{src}` does not re-parse: {printed}\n{e}"));
            assert!(
                alpha_eq(&f, &g),
                "round trip changed `{src}`:\n  printed: {printed}"
            );
        }
    }
}
