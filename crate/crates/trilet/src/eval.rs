//! Small-step call-by-value evaluation of source terms, for progress-style
//! fuzz checks.
//!
//! Annotations carry no reduction rule of their own: an annotated value is
//! a value, and the annotation is erased when the term under it must step
//! or be consumed in function position.

use crate::syntax::{subst_term, Term, VarRef};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepResult {
    Stepped(Term),
    IsValue,
    Stuck(String),
}

/// Perform the unique leftmost reduction, if any.
pub fn step(e: &Term) -> StepResult {
    match e {
        Term::Var(_) | Term::Lam(_, _) => StepResult::IsValue,
        Term::FixVar(u) => StepResult::Stuck(format!("free fix variable {u}")),
        Term::Fix(u, body) => StepResult::Stepped(subst_term(body, VarRef::Fix(u), e)),
        Term::Anno(inner, annos) => {
            if inner.is_value() {
                StepResult::IsValue
            } else {
                match step(inner) {
                    StepResult::Stepped(i) => {
                        StepResult::Stepped(Term::Anno(Box::new(i), annos.clone()))
                    }
                    other => other,
                }
            }
        }
        Term::App(f, a) => match step(f) {
            StepResult::Stepped(f2) => {
                StepResult::Stepped(Term::App(Box::new(f2), a.clone()))
            }
            StepResult::Stuck(r) => StepResult::Stuck(r),
            StepResult::IsValue => match step(a) {
                StepResult::Stepped(a2) => {
                    StepResult::Stepped(Term::App(f.clone(), Box::new(a2)))
                }
                StepResult::Stuck(r) => StepResult::Stuck(r),
                StepResult::IsValue => match strip_annotations(f) {
                    Term::Lam(x, body) => {
                        StepResult::Stepped(subst_term(&body, VarRef::Ord(&x), a))
                    }
                    other => StepResult::Stuck(format!("non-function {other} applied")),
                },
            },
        },
    }
}

fn strip_annotations(e: &Term) -> Term {
    match e {
        Term::Anno(inner, _) => strip_annotations(inner),
        _ => e.clone(),
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalResult {
    Value(Term),
    Stuck { term: Term, reason: String },
    OutOfSteps(Term),
}

/// Iterate `step` up to `max_steps` times.
pub fn eval(e: &Term, max_steps: usize) -> EvalResult {
    let mut cur = e.clone();
    for _ in 0..max_steps {
        match step(&cur) {
            StepResult::Stepped(next) => cur = next,
            StepResult::IsValue => return EvalResult::Value(cur),
            StepResult::Stuck(reason) => return EvalResult::Stuck { term: cur, reason },
        }
    }
    match step(&cur) {
        StepResult::IsValue => EvalResult::Value(cur),
        StepResult::Stuck(reason) => EvalResult::Stuck { term: cur, reason },
        StepResult::Stepped(_) => EvalResult::OutOfSteps(cur),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn id(x: &str) -> Term {
        Term::lam(x, Term::var(x))
    }

    #[test]
    fn beta_step() {
        let e = Term::app(id("x"), id("y"));
        assert_eq!(step(&e), StepResult::Stepped(id("y")));
    }

    #[test]
    fn fix_unrolls() {
        let e = Term::fix("u", id("x"));
        assert_eq!(step(&e), StepResult::Stepped(id("x")));
    }

    #[test]
    fn free_variable_application_is_stuck() {
        let e = Term::app(Term::var("x"), Term::var("y"));
        assert!(matches!(step(&e), StepResult::Stuck(_)));
    }

    #[test]
    fn eval_two_steps() {
        let e = Term::app(id("x"), Term::app(id("y"), id("z")));
        assert_eq!(eval(&e, 10), EvalResult::Value(id("z")));
    }

    #[test]
    fn eval_divergence() {
        let e = Term::fix("u", Term::fixvar("u"));
        assert!(matches!(eval(&e, 50), EvalResult::OutOfSteps(_)));
    }

    #[test]
    fn eval_value_immediately() {
        assert_eq!(eval(&id("x"), 5), EvalResult::Value(id("x")));
    }

    #[test]
    fn annotation_erased_in_function_position() {
        let anno = crate::syntax::ContextualAnnotation::plain(crate::syntax::Type::base("P"));
        let e = Term::app(Term::anno(id("x"), vec![anno]), id("y"));
        assert_eq!(step(&e), StepResult::Stepped(id("y")));
    }
}
