//! ASCII pretty-printing for types, terms, let-normal terms, and contexts.
//!
//! Output uses `/\`, `\/`, `bot`, and `x^0`-style linear variables so logs
//! stay terminal-safe. Source terms round-trip through the parser; linear
//! variables and lets appear only in output.

use std::fmt::Write as _;

use crate::syntax::{
    ContextualAnnotation, LNTerm, LinEntry, LinearContext, Term, Type, TypingContext, VarSpace,
};

// type precedence: /\ binds tightest, then \/, then ->
fn type_prec(t: &Type) -> u8 {
    match t {
        Type::Base(_) | Type::Bot => 4,
        Type::Intersect(_, _) => 3,
        Type::Union(_, _) => 2,
        Type::Arrow(_, _) => 1,
    }
}

fn fmt_type(t: &Type, min_prec: u8, out: &mut String) {
    let prec = type_prec(t);
    let parens = prec < min_prec;
    if parens {
        out.push('(');
    }
    match t {
        Type::Base(name) => out.push_str(name),
        Type::Bot => out.push_str("bot"),
        Type::Arrow(a, b) => {
            // right-associative: left operand needs strictly higher precedence
            fmt_type(a, 2, out);
            out.push_str(" -> ");
            fmt_type(b, 1, out);
        }
        Type::Union(a, b) => {
            fmt_type(a, 2, out);
            out.push_str(" \\/ ");
            fmt_type(b, 3, out);
        }
        Type::Intersect(a, b) => {
            fmt_type(a, 3, out);
            out.push_str(" /\\ ");
            fmt_type(b, 4, out);
        }
    }
    if parens {
        out.push(')');
    }
}

pub fn print_type(t: &Type) -> String {
    let mut s = String::new();
    fmt_type(t, 0, &mut s);
    s
}

pub fn print_annotations(annos: &[ContextualAnnotation]) -> String {
    let mut s = String::new();
    for (i, a) in annos.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        if !a.context.is_empty() {
            for (j, entry) in a.context.entries.iter().enumerate() {
                if j > 0 {
                    s.push_str(", ");
                }
                let _ = write!(s, "{} : {}", entry.name, print_type(&entry.ty));
            }
            s.push_str(" |- ");
        }
        s.push_str(&print_type(&a.ty));
    }
    s
}

// term precedence levels: 0 = open (fn/fix/let bodies), 1 = application,
// 2 = atom
fn fmt_ln(t: &LNTerm, level: u8, out: &mut String) {
    match t {
        LNTerm::Var(x) => out.push_str(x),
        LNTerm::FixVar(u) => out.push_str(u),
        LNTerm::LinVar(x) => out.push_str(x),
        LNTerm::Lam(x, b) => {
            let parens = level > 0;
            if parens {
                out.push('(');
            }
            let _ = write!(out, "fn {x} => ");
            fmt_ln(b, 0, out);
            if parens {
                out.push(')');
            }
        }
        LNTerm::Fix(u, b) => {
            let parens = level > 0;
            if parens {
                out.push('(');
            }
            let _ = write!(out, "fix {u} => ");
            fmt_ln(b, 0, out);
            if parens {
                out.push(')');
            }
        }
        LNTerm::App(f, a) => {
            let parens = level > 1;
            if parens {
                out.push('(');
            }
            fmt_ln(f, 1, out);
            out.push(' ');
            fmt_ln(a, 2, out);
            if parens {
                out.push(')');
            }
        }
        LNTerm::Anno(e, annos) => {
            out.push('(');
            fmt_ln(e, 0, out);
            out.push_str(" : ");
            out.push_str(&print_annotations(annos));
            out.push(')');
        }
        LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) => {
            let parens = level > 0;
            if parens {
                out.push('(');
            }
            let kw = if matches!(t, LNTerm::SlackLet(_, _, _)) {
                "let!"
            } else {
                "let"
            };
            let _ = write!(out, "{kw} {x} = ");
            fmt_ln(r, 1, out);
            out.push_str(" in ");
            fmt_ln(b, 0, out);
            if parens {
                out.push(')');
            }
        }
    }
}

pub fn print_lnterm(t: &LNTerm) -> String {
    let mut s = String::new();
    fmt_ln(t, 0, &mut s);
    s
}

pub fn print_term(t: &Term) -> String {
    print_lnterm(&LNTerm::from(t))
}

pub fn print_gamma(gamma: &TypingContext) -> String {
    let mut s = String::new();
    for (i, e) in gamma.entries.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        let marker = match e.space {
            VarSpace::Ord => "",
            VarSpace::Fix => "fix ",
        };
        let _ = write!(s, "{}{} : {}", marker, e.name, print_type(&e.ty));
    }
    s
}

pub fn print_delta(delta: &LinearContext) -> String {
    let mut s = String::new();
    for (i, e) in delta.entries.iter().enumerate() {
        if i > 0 {
            s.push_str(", ");
        }
        match e {
            LinEntry::Linear { var, ty } => {
                let _ = write!(s, "{} : {}", var, print_type(ty));
            }
            LinEntry::Slack { var, value } => {
                let _ = write!(s, "{} ! {}", var, print_lnterm(value));
            }
        }
    }
    s
}

impl std::fmt::Display for Type {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_type(self))
    }
}

impl std::fmt::Display for Term {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl std::fmt::Display for LNTerm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&print_lnterm(self))
    }
}
