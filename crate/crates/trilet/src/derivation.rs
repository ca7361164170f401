//! Rule-labeled derivations shared by both checkers, the independent
//! schema validator used to replay them, and the canonical judgment keys
//! the checkers memoize on.

use std::collections::HashMap;
use std::rc::Rc;

use crate::pretty::{print_delta, print_gamma, print_lnterm, print_type};
use crate::subtyping::{validate_sub, SubDerivation};
use crate::syntax::{
    alpha_eq, decompose_eval, ok_delta, ok_gamma, subst, ContextualAnnotation, LNTerm, LinEntry,
    LinearContext, Type, TypingContext, VarRef, VarSpace,
};

/// Which rule set a derivation claims to come from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    Tri,
    LetNormal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Direction {
    Check,
    Synth,
}

/// A judgment Γ; Δ ⊢ e ⇓ A or Γ; Δ ⊢ e ⇑ A. For synthesis, `ty` is the
/// synthesized result.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Judgment {
    pub gamma: TypingContext,
    pub delta: LinearContext,
    pub subject: LNTerm,
    pub dir: Direction,
    pub ty: Type,
}

impl Judgment {
    pub fn describe(&self) -> String {
        let arrow = match self.dir {
            Direction::Check => "<=",
            Direction::Synth => "=>",
        };
        format!(
            "{}; {} |- {} {} {}",
            print_gamma(&self.gamma),
            print_delta(&self.delta),
            print_lnterm(&self.subject),
            arrow,
            print_type(&self.ty)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Rule {
    Var,
    VarBar,
    FixVarR,
    ArrowI,
    ArrowE,
    Sub,
    FixR,
    BotL,
    CtxAnno,
    AndL1,
    AndL2,
    AndI,
    AndE1,
    AndE2,
    OrL,
    OrI1,
    OrI2,
    DirectL,
    Let,
    LetSlack,
    SlackVar,
}

impl Rule {
    pub fn name(self) -> &'static str {
        match self {
            Rule::Var => "var",
            Rule::VarBar => "var^",
            Rule::FixVarR => "fixvar",
            Rule::ArrowI => "->I",
            Rule::ArrowE => "->E",
            Rule::Sub => "sub",
            Rule::FixR => "fix",
            Rule::BotL => "botL",
            Rule::CtxAnno => "ctx-anno",
            Rule::AndL1 => "/\\L1",
            Rule::AndL2 => "/\\L2",
            Rule::AndI => "/\\I",
            Rule::AndE1 => "/\\E1",
            Rule::AndE2 => "/\\E2",
            Rule::OrL => "\\/L",
            Rule::OrI1 => "\\/I1",
            Rule::OrI2 => "\\/I2",
            Rule::DirectL => "directL",
            Rule::Let => "let",
            Rule::LetSlack => "let!",
            Rule::SlackVar => "!var",
        }
    }

    pub fn from_name(name: &str) -> Option<Rule> {
        use Rule::*;
        Some(match name {
            "var" => Var,
            "var^" => VarBar,
            "fixvar" => FixVarR,
            "->I" => ArrowI,
            "->E" => ArrowE,
            "sub" => Sub,
            "fix" => FixR,
            "botL" => BotL,
            "ctx-anno" => CtxAnno,
            "/\\L1" => AndL1,
            "/\\L2" => AndL2,
            "/\\I" => AndI,
            "/\\E1" => AndE1,
            "/\\E2" => AndE2,
            "\\/L" => OrL,
            "\\/I1" => OrI1,
            "\\/I2" => OrI2,
            "directL" => DirectL,
            "let" => Let,
            "let!" => LetSlack,
            "!var" => SlackVar,
            _ => return None,
        })
    }
}

/// A proof tree emitted by a checker.
#[derive(Clone, Debug)]
pub struct Derivation {
    pub rule: Rule,
    pub judgment: Judgment,
    pub children: Vec<Rc<Derivation>>,
    /// Present exactly on `sub` nodes: the A <= B side derivation.
    pub subtyping: Option<SubDerivation>,
}

impl Derivation {
    pub fn node_count(&self) -> usize {
        1 + self
            .children
            .iter()
            .map(|c| c.node_count())
            .sum::<usize>()
    }
}

/// Does Γ support the annotation context Γ0? Pointwise: each x:B in Γ0 must
/// be declared in Γ at a subtype of B.
pub fn ctx_anno_satisfied(ctx0: &TypingContext, gamma: &TypingContext) -> bool {
    ctx0.entries.iter().all(|entry| {
        gamma
            .lookup(&entry.name, entry.space)
            .is_some_and(|declared| crate::subtyping::subtype(declared, &entry.ty))
    })
}

fn delta_as_multiset(delta: &LinearContext) -> Vec<&LinEntry> {
    let mut v: Vec<&LinEntry> = delta.entries.iter().collect();
    v.sort_by_key(|e| match e {
        LinEntry::Linear { var, ty } => (0u8, var.clone(), format!("{ty:?}")),
        LinEntry::Slack { var, value } => (1u8, var.clone(), format!("{value:?}")),
    });
    v
}

fn same_delta_split(whole: &LinearContext, d1: &LinearContext, d2: &LinearContext) -> bool {
    delta_as_multiset(whole) == delta_as_multiset(&d1.concat(d2))
}

/// Validation failure, with a path to the offending node.
#[derive(Clone, Debug, thiserror::Error)]
#[error("derivation invalid at {judgment}: {message}")]
pub struct ValidationError {
    pub judgment: String,
    pub message: String,
}

/// Replay a derivation against the rule schemas. Checks, at every node,
/// that the rule's shape, premises, context splits, side conditions, and
/// linearity discipline are exactly as the figures state. Independent of
/// the search that produced the derivation.
pub fn validate(d: &Derivation, system: System) -> Result<(), ValidationError> {
    let fail = |m: String| {
        Err(ValidationError {
            judgment: format!("[{}] {}", d.rule.name(), d.judgment.describe()),
            message: m,
        })
    };
    let j = &d.judgment;

    match (system, d.rule) {
        (System::LetNormal, Rule::DirectL) => {
            return fail("directL is not part of the let-normal system".into())
        }
        (System::Tri, Rule::Let | Rule::LetSlack | Rule::SlackVar) => {
            return fail("let rules are not part of the tridirectional system".into())
        }
        _ => {}
    }

    if !ok_gamma(&j.gamma, &j.subject) {
        return fail("subject not well-scoped under gamma".into());
    }
    if !ok_delta(&j.delta, &j.subject) {
        return fail("linearity violated: delta does not match subject".into());
    }

    let arity = |n: usize| -> Result<(), ValidationError> {
        if d.children.len() == n {
            Ok(())
        } else {
            Err(ValidationError {
                judgment: format!("[{}] {}", d.rule.name(), j.describe()),
                message: format!("expected {n} premises, found {}", d.children.len()),
            })
        }
    };
    let child = |i: usize| -> &Judgment { &d.children[i].judgment };
    let same_gamma = |i: usize| child(i).gamma == j.gamma;

    match d.rule {
        Rule::Var => {
            arity(0)?;
            if j.dir != Direction::Synth {
                return fail("var synthesizes".into());
            }
            match &j.subject {
                LNTerm::Var(x) => {
                    if !j.delta.is_empty() {
                        return fail("var requires an empty linear context".into());
                    }
                    if j.gamma.lookup_ord(x) != Some(&j.ty) {
                        return fail("type is not the declared one".into());
                    }
                }
                _ => return fail("subject is not an ordinary variable".into()),
            }
        }
        Rule::VarBar => {
            arity(0)?;
            if j.dir != Direction::Synth {
                return fail("var^ synthesizes".into());
            }
            match &j.subject {
                LNTerm::LinVar(x) => match j.delta.entries.as_slice() {
                    [LinEntry::Linear { var, ty }] if var == x && *ty == j.ty => {}
                    _ => return fail("delta is not exactly the variable's entry".into()),
                },
                _ => return fail("subject is not a linear variable".into()),
            }
        }
        Rule::FixVarR => {
            arity(0)?;
            if j.dir != Direction::Synth {
                return fail("fixvar synthesizes".into());
            }
            match &j.subject {
                LNTerm::FixVar(u) => {
                    if !j.delta.is_empty() {
                        return fail("fixvar requires an empty linear context".into());
                    }
                    if j.gamma.lookup_fix(u) != Some(&j.ty) {
                        return fail("type is not the declared one".into());
                    }
                }
                _ => return fail("subject is not a fix variable".into()),
            }
        }
        Rule::ArrowI => {
            arity(1)?;
            if j.dir != Direction::Check {
                return fail("->I checks".into());
            }
            let (dom, cod) = match &j.ty {
                Type::Arrow(a, b) => (a, b),
                _ => return fail("goal is not an arrow".into()),
            };
            let (x, body) = match &j.subject {
                LNTerm::Lam(x, b) => (x, b),
                _ => return fail("subject is not a lambda".into()),
            };
            if !j.delta.is_empty() {
                return fail("->I requires an empty linear context".into());
            }
            let c = child(0);
            if c.dir != Direction::Check || c.ty != **cod || !c.delta.is_empty() {
                return fail("premise does not check the body against the codomain".into());
            }
            // the checker may have renamed the binder to keep gamma duplicate-free
            let prefix_len = j.gamma.entries.len();
            if c.gamma.entries.len() != prefix_len + 1
                || c.gamma.entries[..prefix_len] != j.gamma.entries[..]
            {
                return fail("premise context is not gamma extended by one entry".into());
            }
            let last = &c.gamma.entries[prefix_len];
            if last.space != VarSpace::Ord || last.ty != **dom {
                return fail("extension does not bind the argument at the domain".into());
            }
            let renamed = subst(body, VarRef::Ord(x), &LNTerm::Var(last.name.clone()));
            if !alpha_eq(&renamed, &c.subject) {
                return fail("premise subject is not the lambda body".into());
            }
        }
        Rule::FixR => {
            arity(1)?;
            if j.dir != Direction::Check {
                return fail("fix checks".into());
            }
            let (u, body) = match &j.subject {
                LNTerm::Fix(u, b) => (u, b),
                _ => return fail("subject is not a fix".into()),
            };
            if !j.delta.is_empty() {
                return fail("fix requires an empty linear context".into());
            }
            let c = child(0);
            if c.dir != Direction::Check || c.ty != j.ty || !c.delta.is_empty() {
                return fail("premise does not check the body against the goal".into());
            }
            let prefix_len = j.gamma.entries.len();
            if c.gamma.entries.len() != prefix_len + 1
                || c.gamma.entries[..prefix_len] != j.gamma.entries[..]
            {
                return fail("premise context is not gamma extended by one entry".into());
            }
            let last = &c.gamma.entries[prefix_len];
            if last.space != VarSpace::Fix || last.ty != j.ty {
                return fail("extension does not bind the fix variable at the goal".into());
            }
            let renamed = subst(body, VarRef::Fix(u), &LNTerm::FixVar(last.name.clone()));
            if !alpha_eq(&renamed, &c.subject) {
                return fail("premise subject is not the fix body".into());
            }
        }
        Rule::ArrowE => {
            arity(2)?;
            if j.dir != Direction::Synth {
                return fail("->E synthesizes".into());
            }
            let (e1, e2) = match &j.subject {
                LNTerm::App(f, a) => (f, a),
                _ => return fail("subject is not an application".into()),
            };
            let (c1, c2) = (child(0), child(1));
            if !same_gamma(0) || !same_gamma(1) {
                return fail("premise gammas differ".into());
            }
            if c1.dir != Direction::Synth || c2.dir != Direction::Check {
                return fail("premise directions are wrong".into());
            }
            match &c1.ty {
                Type::Arrow(a, b) => {
                    if c2.ty != **a {
                        return fail("argument premise does not check the domain".into());
                    }
                    if j.ty != **b {
                        return fail("conclusion type is not the codomain".into());
                    }
                }
                _ => return fail("function premise does not synthesize an arrow".into()),
            }
            if c1.subject != **e1 || c2.subject != **e2 {
                return fail("premise subjects do not match the application".into());
            }
            if !same_delta_split(&j.delta, &c1.delta, &c2.delta) {
                return fail("linear context does not split across the premises".into());
            }
        }
        Rule::Sub => {
            arity(1)?;
            if j.dir != Direction::Check {
                return fail("sub checks".into());
            }
            let c = child(0);
            if c.dir != Direction::Synth
                || !same_gamma(0)
                || c.delta != j.delta
                || c.subject != j.subject
            {
                return fail("premise is not a synthesis of the same judgment".into());
            }
            match &d.subtyping {
                None => return fail("sub node is missing its subtyping derivation".into()),
                Some(s) => {
                    if s.lhs != c.ty || s.rhs != j.ty {
                        return fail("subtyping derivation relates the wrong types".into());
                    }
                    if let Err(e) = validate_sub(s) {
                        return fail(e);
                    }
                }
            }
        }
        Rule::BotL => {
            arity(0)?;
            if j.dir != Direction::Check {
                return fail("botL checks".into());
            }
            if !j
                .delta
                .entries
                .iter()
                .any(|en| matches!(en, LinEntry::Linear { ty: Type::Bot, .. }))
            {
                return fail("no bot assumption in the linear context".into());
            }
            // ok_gamma and ok_delta already verified above
        }
        Rule::CtxAnno => {
            arity(1)?;
            if j.dir != Direction::Synth {
                return fail("ctx-anno synthesizes".into());
            }
            let (inner, annos) = match &j.subject {
                LNTerm::Anno(e, annos) => (e, annos),
                _ => return fail("subject is not annotated".into()),
            };
            let entry_ok = annos
                .iter()
                .any(|a| a.ty == j.ty && ctx_anno_satisfied(&a.context, &j.gamma));
            if !entry_ok {
                return fail("no satisfied annotation entry carries the type".into());
            }
            let c = child(0);
            if c.dir != Direction::Check
                || c.ty != j.ty
                || !same_gamma(0)
                || c.delta != j.delta
                || c.subject != **inner
            {
                return fail("premise does not check the subject against the entry".into());
            }
        }
        Rule::AndL1 | Rule::AndL2 | Rule::OrL => {
            let two = d.rule == Rule::OrL;
            arity(if two { 2 } else { 1 })?;
            if j.dir != Direction::Check {
                return fail("left rules check".into());
            }
            // exactly one entry changes, in place
            let c0 = child(0);
            if c0.delta.len() != j.delta.len() {
                return fail("premise delta has the wrong length".into());
            }
            let mut changed = None;
            for (i, (a, b)) in j
                .delta
                .entries
                .iter()
                .zip(c0.delta.entries.iter())
                .enumerate()
            {
                if a != b {
                    if changed.is_some() {
                        return fail("more than one linear entry changed".into());
                    }
                    changed = Some(i);
                }
            }
            let idx = match changed {
                Some(i) => i,
                None => return fail("no linear entry changed".into()),
            };
            let (var, ty) = match &j.delta.entries[idx] {
                LinEntry::Linear { var, ty } => (var, ty),
                _ => return fail("left rule applied to a slack entry".into()),
            };
            let parts = match (d.rule, ty) {
                (Rule::AndL1, Type::Intersect(a, _)) => vec![(0usize, (**a).clone())],
                (Rule::AndL2, Type::Intersect(_, b)) => vec![(0usize, (**b).clone())],
                (Rule::OrL, Type::Union(a, b)) => {
                    vec![(0usize, (**a).clone()), (1usize, (**b).clone())]
                }
                _ => return fail("entry type does not match the rule".into()),
            };
            for (ci, part) in parts {
                let c = child(ci);
                if c.dir != Direction::Check
                    || c.ty != j.ty
                    || !same_gamma(ci)
                    || c.subject != j.subject
                {
                    return fail("premise does not recheck the same judgment".into());
                }
                let expected = j.delta.with_entry_replaced(
                    idx,
                    LinEntry::Linear {
                        var: var.clone(),
                        ty: part,
                    },
                );
                if c.delta != expected {
                    return fail("premise delta is not the decomposed context".into());
                }
            }
        }
        Rule::AndI => {
            arity(2)?;
            if j.dir != Direction::Check {
                return fail("/\\I checks".into());
            }
            if !j.subject.is_value() {
                return fail("/\\I subject must be a value".into());
            }
            let (a, b) = match &j.ty {
                Type::Intersect(a, b) => (a, b),
                _ => return fail("goal is not an intersection".into()),
            };
            for (i, part) in [(0usize, a), (1usize, b)] {
                let c = child(i);
                if c.dir != Direction::Check
                    || c.ty != **part
                    || !same_gamma(i)
                    || c.delta != j.delta
                    || c.subject != j.subject
                {
                    return fail("premise does not check the component".into());
                }
            }
        }
        Rule::AndE1 | Rule::AndE2 => {
            arity(1)?;
            if j.dir != Direction::Synth {
                return fail("/\\E synthesizes".into());
            }
            let c = child(0);
            if c.dir != Direction::Synth
                || !same_gamma(0)
                || c.delta != j.delta
                || c.subject != j.subject
            {
                return fail("premise is not a synthesis of the same judgment".into());
            }
            match &c.ty {
                Type::Intersect(a, b) => {
                    let want = if d.rule == Rule::AndE1 { a } else { b };
                    if j.ty != **want {
                        return fail("conclusion is not the stated projection".into());
                    }
                }
                _ => return fail("premise does not synthesize an intersection".into()),
            }
        }
        Rule::OrI1 | Rule::OrI2 => {
            arity(1)?;
            if j.dir != Direction::Check {
                return fail("\\/I checks".into());
            }
            let (a, b) = match &j.ty {
                Type::Union(a, b) => (a, b),
                _ => return fail("goal is not a union".into()),
            };
            let want = if d.rule == Rule::OrI1 { a } else { b };
            let c = child(0);
            if c.dir != Direction::Check
                || c.ty != **want
                || !same_gamma(0)
                || c.delta != j.delta
                || c.subject != j.subject
            {
                return fail("premise does not check the injected component".into());
            }
        }
        Rule::DirectL => {
            arity(2)?;
            if j.dir != Direction::Check {
                return fail("directL checks".into());
            }
            let (c1, c2) = (child(0), child(1));
            if !same_gamma(0) || !same_gamma(1) {
                return fail("premise gammas differ".into());
            }
            if c1.dir != Direction::Synth || c2.dir != Direction::Check || c2.ty != j.ty {
                return fail("premise directions or goal are wrong".into());
            }
            // the fresh linear variable: declared in the second premise but
            // not in the conclusion
            let fresh: Vec<&LinEntry> = c2
                .delta
                .entries
                .iter()
                .filter(|en| !j.delta.declares(en.var()))
                .collect();
            let (xbar, named_ty) = match fresh.as_slice() {
                [LinEntry::Linear { var, ty }] => (var.clone(), ty.clone()),
                _ => return fail("premise must introduce exactly one fresh linear entry".into()),
            };
            if named_ty != c1.ty {
                return fail("fresh entry's type is not the synthesized one".into());
            }
            if matches!(c1.subject, LNTerm::LinVar(_)) {
                return fail("directL must not name a linear variable".into());
            }
            if !c1.subject.is_synthesizing_form() {
                return fail("named subterm is not in synthesizing form".into());
            }
            // the named position must be an evaluation position
            if !decompose_eval(&c2.subject)
                .iter()
                .any(|(_, s)| matches!(s, LNTerm::LinVar(v) if *v == xbar))
            {
                return fail("fresh variable does not sit in evaluation position".into());
            }
            let replugged = subst(&c2.subject, VarRef::Lin(&xbar), &c1.subject);
            if !alpha_eq(&replugged, &j.subject) {
                return fail("premise subjects do not reassemble the conclusion".into());
            }
            let c2_minus = LinearContext {
                entries: c2
                    .delta
                    .entries
                    .iter()
                    .filter(|en| en.var() != xbar)
                    .cloned()
                    .collect(),
            };
            if !same_delta_split(&j.delta, &c1.delta, &c2_minus) {
                return fail("linear context does not split across the premises".into());
            }
        }
        Rule::Let => {
            arity(2)?;
            if j.dir != Direction::Check {
                return fail("let checks".into());
            }
            let (x, rhs, body) = match &j.subject {
                LNTerm::Let(x, r, b) => (x, r, b),
                _ => return fail("subject is not a let".into()),
            };
            if !crate::syntax::body_is_q_of(body, x) {
                return fail("body is not Q[x] for the bound variable".into());
            }
            let (c1, c2) = (child(0), child(1));
            if !same_gamma(0) || !same_gamma(1) {
                return fail("premise gammas differ".into());
            }
            if c1.dir != Direction::Synth
                || c1.subject != **rhs
                || c2.dir != Direction::Check
                || c2.ty != j.ty
                || c2.subject != **body
            {
                return fail("premises do not take the right-hand side and body".into());
            }
            let fresh: Vec<&LinEntry> = c2
                .delta
                .entries
                .iter()
                .filter(|en| !j.delta.declares(en.var()))
                .collect();
            match fresh.as_slice() {
                [LinEntry::Linear { var, ty }] if var == x && *ty == c1.ty => {}
                _ => return fail("body premise must add the bound variable at the synthesized type".into()),
            }
            let c2_minus = LinearContext {
                entries: c2
                    .delta
                    .entries
                    .iter()
                    .filter(|en| en.var() != x)
                    .cloned()
                    .collect(),
            };
            if !same_delta_split(&j.delta, &c1.delta, &c2_minus) {
                return fail("linear context does not split across the premises".into());
            }
        }
        Rule::LetSlack => {
            arity(1)?;
            if j.dir != Direction::Check {
                return fail("let! checks".into());
            }
            let (x, rhs, body) = match &j.subject {
                LNTerm::SlackLet(x, r, b) => (x, r, b),
                _ => return fail("subject is not a slack let".into()),
            };
            if !crate::syntax::body_is_q_of(body, x) {
                return fail("body is not Q[x] for the bound variable".into());
            }
            if !matches!(&**rhs, LNTerm::Anno(v, _) if v.is_value()) {
                return fail("slack right-hand side is not an annotated value".into());
            }
            let c = child(0);
            if c.dir != Direction::Check || c.ty != j.ty || !same_gamma(0) || c.subject != **body {
                return fail("premise does not check the body".into());
            }
            let expected = j.delta.pushed(LinEntry::Slack {
                var: x.clone(),
                value: (**rhs).clone(),
            });
            if delta_as_multiset(&c.delta) != delta_as_multiset(&expected) {
                return fail("premise delta does not gain the slack entry".into());
            }
        }
        Rule::SlackVar => {
            arity(2)?;
            if j.dir != Direction::Check {
                return fail("!var checks".into());
            }
            let (c1, c2) = (child(0), child(1));
            if !same_gamma(0) || !same_gamma(1) {
                return fail("premise gammas differ".into());
            }
            if c1.dir != Direction::Synth || c2.dir != Direction::Check || c2.ty != j.ty {
                return fail("premise directions or goal are wrong".into());
            }
            if c2.subject != j.subject {
                return fail("checking premise changes the subject".into());
            }
            // which slack entry was discharged: in conclusion, absent in c2
            let discharged: Vec<&LinEntry> = j
                .delta
                .entries
                .iter()
                .filter(|en| {
                    matches!(en, LinEntry::Slack { .. })
                        && !c2.delta.entries.contains(en)
                        && !c1.delta.entries.contains(en)
                })
                .collect();
            let (xbar, value) = match discharged.as_slice() {
                [LinEntry::Slack { var, value }] => (var.clone(), value.clone()),
                _ => return fail("exactly one slack entry must be discharged".into()),
            };
            if c1.subject != value {
                return fail("synthesis premise is not over the stored value".into());
            }
            match c2.delta.lookup_linear(&xbar) {
                Some(t) if *t == c1.ty => {}
                _ => return fail("discharged variable is not rebound at the synthesized type".into()),
            }
            let c2_minus = LinearContext {
                entries: c2
                    .delta
                    .entries
                    .iter()
                    .filter(|en| en.var() != xbar)
                    .cloned()
                    .collect(),
            };
            let conclusion_minus = LinearContext {
                entries: j
                    .delta
                    .entries
                    .iter()
                    .filter(|en| en.var() != xbar)
                    .cloned()
                    .collect(),
            };
            if !same_delta_split(&conclusion_minus, &c1.delta, &c2_minus) {
                return fail("linear context does not split across the premises".into());
            }
        }
    }

    for c in &d.children {
        validate(c, system)?;
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// canonical judgment keys for memoization

/// Render an alpha-normalized key for (Γ, Δ, e, direction, goal). Bound
/// variables are numbered by traversal order, free linear variables by
/// first occurrence, so judgments that differ only in generated names share
/// a key.
pub(crate) fn memo_key(
    gamma: &TypingContext,
    delta: &LinearContext,
    subject: &LNTerm,
    goal: Option<&Type>,
) -> String {
    // assign ids to free linear variables: first by occurrence in the
    // subject, then through slack values, then any remaining entries
    let mut ids: HashMap<String, usize> = HashMap::new();
    collect_free_lin_order(subject, &mut Vec::new(), &mut ids);
    loop {
        let before = ids.len();
        for entry in &delta.entries {
            if let LinEntry::Slack { var, value } = entry {
                if ids.contains_key(var) {
                    collect_free_lin_order(value, &mut Vec::new(), &mut ids);
                }
            }
        }
        if ids.len() == before {
            break;
        }
    }
    for entry in &delta.entries {
        if !ids.contains_key(entry.var()) {
            let n = ids.len();
            ids.insert(entry.var().to_string(), n);
            if let LinEntry::Slack { value, .. } = entry {
                collect_free_lin_order(value, &mut Vec::new(), &mut ids);
            }
        }
    }

    let mut out = String::with_capacity(128);
    // gamma, order-insensitively
    let mut gamma_entries: Vec<&crate::syntax::CtxEntry> = gamma.entries.iter().collect();
    gamma_entries.sort_by(|a, b| (a.space, &a.name).cmp(&(b.space, &b.name)));
    out.push('G');
    for e in gamma_entries {
        let tag = match e.space {
            VarSpace::Ord => 'o',
            VarSpace::Fix => 'f',
        };
        out.push(tag);
        out.push_str(&e.name);
        out.push(':');
        canon_type(&e.ty, &mut out);
        out.push(';');
    }
    // delta, sorted by assigned id
    let mut delta_entries: Vec<&LinEntry> = delta.entries.iter().collect();
    delta_entries.sort_by_key(|e| ids.get(e.var()).copied().unwrap_or(usize::MAX));
    out.push_str("|D");
    for e in delta_entries {
        let id = ids[e.var()];
        match e {
            LinEntry::Linear { ty, .. } => {
                out.push_str(&format!("L{id}:"));
                canon_type(ty, &mut out);
            }
            LinEntry::Slack { value, .. } => {
                out.push_str(&format!("S{id}:"));
                canon_term(value, &mut Scopes::default(), &ids, &mut out);
            }
        }
        out.push(';');
    }
    out.push_str("|J");
    match goal {
        Some(t) => {
            out.push('c');
            canon_type(t, &mut out);
        }
        None => out.push('s'),
    }
    out.push_str("|T");
    canon_term(subject, &mut Scopes::default(), &ids, &mut out);
    out
}

#[derive(Default)]
struct Scopes {
    ord: Vec<String>,
    fix: Vec<String>,
    lin: Vec<String>,
}

fn collect_free_lin_order(
    e: &LNTerm,
    bound: &mut Vec<String>,
    ids: &mut HashMap<String, usize>,
) {
    match e {
        LNTerm::LinVar(x) => {
            if !bound.iter().any(|b| b == x) && !ids.contains_key(x) {
                let n = ids.len();
                ids.insert(x.clone(), n);
            }
        }
        LNTerm::Var(_) | LNTerm::FixVar(_) => {}
        LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => collect_free_lin_order(b, bound, ids),
        LNTerm::App(f, a) => {
            collect_free_lin_order(f, bound, ids);
            collect_free_lin_order(a, bound, ids);
        }
        LNTerm::Anno(inner, _) => collect_free_lin_order(inner, bound, ids),
        LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) => {
            collect_free_lin_order(r, bound, ids);
            bound.push(x.clone());
            collect_free_lin_order(b, bound, ids);
            bound.pop();
        }
    }
}

fn canon_type(t: &Type, out: &mut String) {
    match t {
        Type::Base(n) => {
            out.push('.');
            out.push_str(n);
        }
        Type::Bot => out.push('_'),
        Type::Arrow(a, b) => {
            out.push('>');
            canon_type(a, out);
            canon_type(b, out);
        }
        Type::Intersect(a, b) => {
            out.push('&');
            canon_type(a, out);
            canon_type(b, out);
        }
        Type::Union(a, b) => {
            out.push('+');
            canon_type(a, out);
            canon_type(b, out);
        }
    }
}

fn canon_annos(annos: &[ContextualAnnotation], out: &mut String) {
    out.push('[');
    for a in annos {
        out.push('(');
        for e in &a.context.entries {
            let tag = match e.space {
                VarSpace::Ord => 'o',
                VarSpace::Fix => 'f',
            };
            out.push(tag);
            out.push_str(&e.name);
            out.push(':');
            canon_type(&e.ty, out);
            out.push(',');
        }
        out.push('!');
        canon_type(&a.ty, out);
        out.push(')');
    }
    out.push(']');
}

fn canon_term(e: &LNTerm, scopes: &mut Scopes, lin_ids: &HashMap<String, usize>, out: &mut String) {
    match e {
        LNTerm::Var(x) => {
            match scopes.ord.iter().rposition(|b| b == x) {
                Some(i) => out.push_str(&format!("v{i}")),
                None => {
                    out.push('V');
                    out.push_str(x);
                    out.push(';');
                }
            };
        }
        LNTerm::FixVar(u) => {
            match scopes.fix.iter().rposition(|b| b == u) {
                Some(i) => out.push_str(&format!("u{i}")),
                None => {
                    out.push('U');
                    out.push_str(u);
                    out.push(';');
                }
            };
        }
        LNTerm::LinVar(x) => match scopes.lin.iter().rposition(|b| b == x) {
            Some(i) => out.push_str(&format!("l{i}")),
            None => out.push_str(&format!("F{}", lin_ids.get(x).copied().unwrap_or(usize::MAX))),
        },
        LNTerm::Lam(x, b) => {
            out.push('\\');
            scopes.ord.push(x.clone());
            canon_term(b, scopes, lin_ids, out);
            scopes.ord.pop();
        }
        LNTerm::Fix(u, b) => {
            out.push('Y');
            scopes.fix.push(u.clone());
            canon_term(b, scopes, lin_ids, out);
            scopes.fix.pop();
        }
        LNTerm::App(f, a) => {
            out.push('@');
            canon_term(f, scopes, lin_ids, out);
            canon_term(a, scopes, lin_ids, out);
        }
        LNTerm::Anno(inner, annos) => {
            out.push(':');
            canon_term(inner, scopes, lin_ids, out);
            canon_annos(annos, out);
        }
        LNTerm::Let(x, r, b) => {
            out.push('L');
            canon_term(r, scopes, lin_ids, out);
            scopes.lin.push(x.clone());
            canon_term(b, scopes, lin_ids, out);
            scopes.lin.pop();
        }
        LNTerm::SlackLet(x, r, b) => {
            out.push('S');
            canon_term(r, scopes, lin_ids, out);
            scopes.lin.push(x.clone());
            canon_term(b, scopes, lin_ids, out);
            scopes.lin.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn memo_key_alpha_normalizes() {
        let gamma = TypingContext::empty().extended("x", VarSpace::Ord, Type::base("P"));
        let d1 = LinearContext::single("a^0", Type::base("P"));
        let d2 = LinearContext::single("b^7", Type::base("P"));
        let s1 = LNTerm::app(LNTerm::linvar("a^0"), LNTerm::var("x"));
        let s2 = LNTerm::app(LNTerm::linvar("b^7"), LNTerm::var("x"));
        let goal = Type::base("Q");
        assert_eq!(
            memo_key(&gamma, &d1, &s1, Some(&goal)),
            memo_key(&gamma, &d2, &s2, Some(&goal))
        );
        // bound binder names do not matter either
        let t1 = LNTerm::lam("x", LNTerm::var("x"));
        let t2 = LNTerm::lam("y", LNTerm::var("y"));
        assert_eq!(
            memo_key(&gamma, &LinearContext::empty(), &t1, None),
            memo_key(&gamma, &LinearContext::empty(), &t2, None)
        );
        // but different structure does
        assert_ne!(
            memo_key(&gamma, &d1, &s1, Some(&goal)),
            memo_key(&gamma, &d1, &s1, None)
        );
    }
}
