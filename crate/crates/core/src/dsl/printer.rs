//! Deterministic pretty-printer; its output parses back to an alpha-equal value.

use std::fmt::{self, Write};

use crate::logic::{Context, Formula, Sequent, Term, Theory, Variable};

fn write_term(out: &mut String, t: &Term, scope: &[&str]) {
    match t {
        Term::Var(v) => out.push_str(&v.name),
        Term::App(f, args) => {
            out.push_str(f);
            if args.is_empty() {
                // a bare name would resolve to the variable
                if scope.contains(&f.as_str()) {
                    out.push_str("()");
                }
                return;
            }
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(out, a, scope);
            }
            out.push(')');
        }
    }
}

fn write_formula<'a>(out: &mut String, f: &'a Formula, scope: &mut Vec<&'a str>) {
    match f {
        Formula::And(l, r) => {
            write_operand(out, l, scope);
            out.push_str(" & ");
            write_formula(out, r, scope);
        }
        Formula::Exists(v, body) => {
            let _ = write!(out, "exists {}:{}. ", v.name, v.sort);
            scope.push(&v.name);
            write_formula(out, body, scope);
            scope.pop();
        }
        _ => write_operand(out, f, scope),
    }
}

/// Left operand of `&`: conjunctions and quantifiers need parentheses.
fn write_operand<'a>(out: &mut String, f: &'a Formula, scope: &mut Vec<&'a str>) {
    match f {
        Formula::Rel(r, args) => {
            out.push_str(r);
            out.push('(');
            for (i, a) in args.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_term(out, a, scope);
            }
            out.push(')');
        }
        Formula::Eq(l, r) => {
            write_term(out, l, scope);
            out.push_str(" = ");
            write_term(out, r, scope);
        }
        Formula::Top => out.push_str("true"),
        Formula::Bottom => out.push_str("false"),
        Formula::Or(list) => {
            out.push_str("\\/[");
            for (i, g) in list.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_formula(out, g, scope);
            }
            out.push(']');
        }
        Formula::And(..) | Formula::Exists(..) => {
            out.push('(');
            write_formula(out, f, scope);
            out.push(')');
        }
    }
}

pub fn print_term(t: &Term) -> String {
    let mut vars = std::collections::BTreeSet::new();
    t.vars(&mut vars);
    let names: Vec<&str> = vars.iter().map(|v| v.name.as_str()).collect();
    let mut out = String::new();
    write_term(&mut out, t, &names);
    out
}

pub fn print_formula(f: &Formula) -> String {
    let free = f.free_vars();
    let mut scope: Vec<&str> = free.iter().map(|v| v.name.as_str()).collect();
    let mut out = String::new();
    write_formula(&mut out, f, &mut scope);
    out
}

fn write_context(out: &mut String, ctx: &Context) {
    out.push('[');
    for (i, v) in ctx.vars().iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        let _ = write!(out, "{}:{}", v.name, v.sort);
    }
    out.push(']');
}

pub fn print_sequent(s: &Sequent) -> String {
    let mut out = String::new();
    write_sequent(&mut out, s);
    out
}

fn write_sequent(out: &mut String, s: &Sequent) {
    write_context(out, &s.context);
    out.push(' ');
    let mut scope: Vec<&str> = s.context.vars().iter().map(|v| v.name.as_str()).collect();
    write_formula(out, &s.premise, &mut scope);
    out.push_str(" |- ");
    write_formula(out, &s.conclusion, &mut scope);
}

fn write_sorts(out: &mut String, sorts: &[crate::logic::Sort]) {
    for (i, s) in sorts.iter().enumerate() {
        if i > 0 {
            out.push_str(", ");
        }
        out.push_str(s.name());
    }
}

pub fn print_theory(t: &Theory) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "obs {}", super::FORMAT_VERSION);
    let _ = writeln!(out, "theory {}.", t.id);
    let sig = &t.signature;
    for s in sig.sorts() {
        let _ = writeln!(out, "sort {s}.");
    }
    for f in sig.functions() {
        out.push_str("fn ");
        out.push_str(&f.name);
        if f.arity() > 0 {
            out.push('(');
            write_sorts(&mut out, &f.arg_sorts);
            out.push(')');
        }
        let _ = writeln!(out, ": {}.", f.result_sort);
    }
    for r in sig.relations() {
        let _ = write!(out, "rel {}(", r.name);
        write_sorts(&mut out, &r.arg_sorts);
        out.push_str(").\n");
    }
    for ax in &t.axioms {
        let _ = write!(out, "axiom {}: ", ax.name);
        write_sequent(&mut out, &ax.sequent);
        out.push_str(".\n");
    }
    out
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_formula(self))
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_sequent(self))
    }
}

impl fmt::Display for Variable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.name, self.sort)
    }
}

impl fmt::Display for Theory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_theory(self))
    }
}
