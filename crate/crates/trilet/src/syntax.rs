//! Core syntax: the type algebra, source terms, let-normal terms, contexts,
//! substitution, scoping checks, and evaluation-position decomposition.

use std::collections::{HashMap, HashSet};

/// Types: base atoms, the empty type, arrows, intersections, and unions.
///
/// Atoms are uninterpreted names declared in a prelude; subtyping between
/// atoms is reflexive only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Type {
    Base(String),
    Bot,
    Arrow(Box<Type>, Box<Type>),
    Intersect(Box<Type>, Box<Type>),
    Union(Box<Type>, Box<Type>),
}

impl Type {
    pub fn base(name: &str) -> Type {
        Type::Base(name.to_string())
    }
    pub fn arrow(a: Type, b: Type) -> Type {
        Type::Arrow(Box::new(a), Box::new(b))
    }
    pub fn inter(a: Type, b: Type) -> Type {
        Type::Intersect(Box::new(a), Box::new(b))
    }
    pub fn union(a: Type, b: Type) -> Type {
        Type::Union(Box::new(a), Box::new(b))
    }

    /// Number of connective and leaf nodes.
    pub fn size(&self) -> usize {
        match self {
            Type::Base(_) | Type::Bot => 1,
            Type::Arrow(a, b) | Type::Intersect(a, b) | Type::Union(a, b) => {
                1 + a.size() + b.size()
            }
        }
    }

    pub fn depth(&self) -> usize {
        match self {
            Type::Base(_) | Type::Bot => 1,
            Type::Arrow(a, b) | Type::Intersect(a, b) | Type::Union(a, b) => {
                1 + a.depth().max(b.depth())
            }
        }
    }

    /// True when a union or the empty type occurs anywhere inside.
    ///
    /// Left rules only ever matter for assumptions satisfying this: an
    /// intersection assumption with no union or bot inside never needs
    /// decomposing in the linear context, because the synthesis projections
    /// reach every part.
    pub fn contains_union_or_bot(&self) -> bool {
        match self {
            Type::Base(_) => false,
            Type::Bot | Type::Union(_, _) => true,
            Type::Arrow(a, b) | Type::Intersect(a, b) => {
                a.contains_union_or_bot() || b.contains_union_or_bot()
            }
        }
    }
}

/// One entry of a contextual typing annotation: `(Γ0 ⊢ A)`.
///
/// The entry applies only when the ambient context supports `context`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ContextualAnnotation {
    pub context: TypingContext,
    pub ty: Type,
}

impl ContextualAnnotation {
    pub fn plain(ty: Type) -> ContextualAnnotation {
        ContextualAnnotation {
            context: TypingContext::empty(),
            ty,
        }
    }
}

/// Source-language terms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Term {
    Var(String),
    FixVar(String),
    Lam(String, Box<Term>),
    App(Box<Term>, Box<Term>),
    Fix(String, Box<Term>),
    Anno(Box<Term>, Vec<ContextualAnnotation>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }
    pub fn fixvar(u: &str) -> Term {
        Term::FixVar(u.to_string())
    }
    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(x.to_string(), Box::new(body))
    }
    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Box::new(f), Box::new(a))
    }
    pub fn fix(u: &str, body: Term) -> Term {
        Term::Fix(u.to_string(), Box::new(body))
    }
    pub fn anno(e: Term, annos: Vec<ContextualAnnotation>) -> Term {
        Term::Anno(Box::new(e), annos)
    }

    /// Number of term nodes (annotation types do not count).
    pub fn size(&self) -> usize {
        match self {
            Term::Var(_) | Term::FixVar(_) => 1,
            Term::Lam(_, b) | Term::Fix(_, b) => 1 + b.size(),
            Term::App(f, a) => 1 + f.size() + a.size(),
            Term::Anno(e, _) => 1 + e.size(),
        }
    }

    /// Source values: variables, lambdas, and annotated values.
    pub fn is_value(&self) -> bool {
        match self {
            Term::Var(_) | Term::Lam(_, _) => true,
            Term::Anno(e, _) => e.is_value(),
            _ => false,
        }
    }
}

/// Let-normal terms: all source constructors plus linear variables and the
/// two binding forms.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LNTerm {
    Var(String),
    FixVar(String),
    Lam(String, Box<LNTerm>),
    App(Box<LNTerm>, Box<LNTerm>),
    Fix(String, Box<LNTerm>),
    Anno(Box<LNTerm>, Vec<ContextualAnnotation>),
    LinVar(String),
    Let(String, Box<LNTerm>, Box<LNTerm>),
    SlackLet(String, Box<LNTerm>, Box<LNTerm>),
}

impl LNTerm {
    pub fn var(x: &str) -> LNTerm {
        LNTerm::Var(x.to_string())
    }
    pub fn fixvar(u: &str) -> LNTerm {
        LNTerm::FixVar(u.to_string())
    }
    pub fn linvar(x: &str) -> LNTerm {
        LNTerm::LinVar(x.to_string())
    }
    pub fn lam(x: &str, body: LNTerm) -> LNTerm {
        LNTerm::Lam(x.to_string(), Box::new(body))
    }
    pub fn app(f: LNTerm, a: LNTerm) -> LNTerm {
        LNTerm::App(Box::new(f), Box::new(a))
    }
    pub fn fix(u: &str, body: LNTerm) -> LNTerm {
        LNTerm::Fix(u.to_string(), Box::new(body))
    }
    pub fn anno(e: LNTerm, annos: Vec<ContextualAnnotation>) -> LNTerm {
        LNTerm::Anno(Box::new(e), annos)
    }
    pub fn let_(x: &str, rhs: LNTerm, body: LNTerm) -> LNTerm {
        LNTerm::Let(x.to_string(), Box::new(rhs), Box::new(body))
    }
    pub fn slack_let(x: &str, rhs: LNTerm, body: LNTerm) -> LNTerm {
        LNTerm::SlackLet(x.to_string(), Box::new(rhs), Box::new(body))
    }

    pub fn size(&self) -> usize {
        match self {
            LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => 1,
            LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => 1 + b.size(),
            LNTerm::App(f, a) => 1 + f.size() + a.size(),
            LNTerm::Anno(e, _) => 1 + e.size(),
            LNTerm::Let(_, r, b) | LNTerm::SlackLet(_, r, b) => 1 + r.size() + b.size(),
        }
    }

    /// Let-normal values: x, λx.e, x̄, (v : As), and lets whose two parts are
    /// both values.
    pub fn is_value(&self) -> bool {
        match self {
            LNTerm::Var(_) | LNTerm::Lam(_, _) | LNTerm::LinVar(_) => true,
            LNTerm::Anno(e, _) => e.is_value(),
            LNTerm::Let(_, r, b) | LNTerm::SlackLet(_, r, b) => r.is_value() && b.is_value(),
            _ => false,
        }
    }

    /// Synthesizing forms: terms that can appear at the root of a synthesis
    /// derivation (variables, fix variables, linear variables, applications,
    /// annotated terms).
    pub fn is_synthesizing_form(&self) -> bool {
        matches!(
            self,
            LNTerm::Var(_)
                | LNTerm::FixVar(_)
                | LNTerm::LinVar(_)
                | LNTerm::App(_, _)
                | LNTerm::Anno(_, _)
        )
    }

    /// True when the term contains a let or slack-let node.
    pub fn contains_let(&self) -> bool {
        match self {
            LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => false,
            LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => b.contains_let(),
            LNTerm::App(f, a) => f.contains_let() || a.contains_let(),
            LNTerm::Anno(e, _) => e.contains_let(),
            LNTerm::Let(_, _, _) | LNTerm::SlackLet(_, _, _) => true,
        }
    }
}

impl From<&Term> for LNTerm {
    fn from(t: &Term) -> LNTerm {
        match t {
            Term::Var(x) => LNTerm::Var(x.clone()),
            Term::FixVar(u) => LNTerm::FixVar(u.clone()),
            Term::Lam(x, b) => LNTerm::Lam(x.clone(), Box::new(LNTerm::from(&**b))),
            Term::App(f, a) => LNTerm::App(
                Box::new(LNTerm::from(&**f)),
                Box::new(LNTerm::from(&**a)),
            ),
            Term::Fix(u, b) => LNTerm::Fix(u.clone(), Box::new(LNTerm::from(&**b))),
            Term::Anno(e, annos) => LNTerm::Anno(Box::new(LNTerm::from(&**e)), annos.clone()),
        }
    }
}

impl From<Term> for LNTerm {
    fn from(t: Term) -> LNTerm {
        LNTerm::from(&t)
    }
}

/// Error converting a let-normal term back to a source term.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum FromLNError {
    #[error("unbound linear variable {0} escapes its binding")]
    UnboundLinear(String),
    #[error("residual let binding for {0}")]
    ResidualLet(String),
}

impl TryFrom<&LNTerm> for Term {
    type Error = FromLNError;
    fn try_from(t: &LNTerm) -> Result<Term, FromLNError> {
        match t {
            LNTerm::Var(x) => Ok(Term::Var(x.clone())),
            LNTerm::FixVar(u) => Ok(Term::FixVar(u.clone())),
            LNTerm::Lam(x, b) => Ok(Term::Lam(x.clone(), Box::new(Term::try_from(&**b)?))),
            LNTerm::App(f, a) => Ok(Term::App(
                Box::new(Term::try_from(&**f)?),
                Box::new(Term::try_from(&**a)?),
            )),
            LNTerm::Fix(u, b) => Ok(Term::Fix(u.clone(), Box::new(Term::try_from(&**b)?))),
            LNTerm::Anno(e, annos) => {
                Ok(Term::Anno(Box::new(Term::try_from(&**e)?), annos.clone()))
            }
            LNTerm::LinVar(x) => Err(FromLNError::UnboundLinear(x.clone())),
            LNTerm::Let(x, _, _) | LNTerm::SlackLet(x, _, _) => {
                Err(FromLNError::ResidualLet(x.clone()))
            }
        }
    }
}

/// Pre-value / anti-value classification.
///
/// An anti-value can never become a value, however many subterms in
/// evaluation position are replaced by linear variables; in this fragment
/// only `fix` is one. Everything else is a pre-value.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Classification {
    PreValue,
    AntiValue,
}

pub fn classify(e: &LNTerm) -> Classification {
    match e {
        LNTerm::Fix(_, _) => Classification::AntiValue,
        _ => Classification::PreValue,
    }
}

pub fn classify_term(e: &Term) -> Classification {
    match e {
        Term::Fix(_, _) => Classification::AntiValue,
        _ => Classification::PreValue,
    }
}

pub fn is_pre_value(e: &LNTerm) -> bool {
    classify(e) == Classification::PreValue
}

/// Namespace of an ordinary-context entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VarSpace {
    Ord,
    Fix,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CtxEntry {
    pub name: String,
    pub space: VarSpace,
    pub ty: Type,
}

/// Ordinary typing context Γ: ordered entries `x:A` and `u:A`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct TypingContext {
    pub entries: Vec<CtxEntry>,
}

impl TypingContext {
    pub fn empty() -> TypingContext {
        TypingContext::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn lookup(&self, name: &str, space: VarSpace) -> Option<&Type> {
        self.entries
            .iter()
            .rev()
            .find(|e| e.space == space && e.name == name)
            .map(|e| &e.ty)
    }

    pub fn lookup_ord(&self, name: &str) -> Option<&Type> {
        self.lookup(name, VarSpace::Ord)
    }

    pub fn lookup_fix(&self, name: &str) -> Option<&Type> {
        self.lookup(name, VarSpace::Fix)
    }

    pub fn declares(&self, name: &str, space: VarSpace) -> bool {
        self.lookup(name, space).is_some()
    }

    /// New context with one more entry. Panics on a duplicate name within
    /// the same namespace; callers rename first.
    pub fn extended(&self, name: &str, space: VarSpace, ty: Type) -> TypingContext {
        assert!(
            !self.declares(name, space),
            "duplicate context entry {name}"
        );
        let mut out = self.clone();
        out.entries.push(CtxEntry {
            name: name.to_string(),
            space,
            ty,
        });
        out
    }

    pub fn push(&mut self, name: &str, space: VarSpace, ty: Type) -> Result<(), String> {
        if self.declares(name, space) {
            return Err(name.to_string());
        }
        self.entries.push(CtxEntry {
            name: name.to_string(),
            space,
            ty,
        });
        Ok(())
    }
}

/// One entry of the linear context Δ.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum LinEntry {
    /// `x̄ : A`
    Linear { var: String, ty: Type },
    /// `x̄ † v` — a slack binding whose value is an annotated value; the
    /// type is synthesized at discharge time, not here.
    Slack { var: String, value: LNTerm },
}

impl LinEntry {
    pub fn var(&self) -> &str {
        match self {
            LinEntry::Linear { var, .. } | LinEntry::Slack { var, .. } => var,
        }
    }
}

/// Linear context Δ: ordered linear and slack entries.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct LinearContext {
    pub entries: Vec<LinEntry>,
}

impl LinearContext {
    pub fn empty() -> LinearContext {
        LinearContext::default()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn single(var: &str, ty: Type) -> LinearContext {
        LinearContext {
            entries: vec![LinEntry::Linear {
                var: var.to_string(),
                ty,
            }],
        }
    }

    pub fn declares(&self, var: &str) -> bool {
        self.entries.iter().any(|e| e.var() == var)
    }

    pub fn lookup_linear(&self, var: &str) -> Option<&Type> {
        self.entries.iter().find_map(|e| match e {
            LinEntry::Linear { var: v, ty } if v == var => Some(ty),
            _ => None,
        })
    }

    pub fn pushed(&self, entry: LinEntry) -> LinearContext {
        let mut out = self.clone();
        out.entries.push(entry);
        out
    }

    pub fn with_entry_replaced(&self, idx: usize, entry: LinEntry) -> LinearContext {
        let mut out = self.clone();
        out.entries[idx] = entry;
        out
    }

    pub fn without_entry(&self, idx: usize) -> LinearContext {
        let mut out = self.clone();
        out.entries.remove(idx);
        out
    }

    pub fn concat(&self, other: &LinearContext) -> LinearContext {
        let mut out = self.clone();
        out.entries.extend(other.entries.iter().cloned());
        out
    }
}

/// Free-variable information, with occurrence counts for linear variables.
#[derive(Clone, Debug, Default)]
pub struct FreeVars {
    pub ord: HashSet<String>,
    pub fix: HashSet<String>,
    pub lin: HashMap<String, usize>,
}

impl FreeVars {
    fn absorb(&mut self, other: FreeVars) {
        self.ord.extend(other.ord);
        self.fix.extend(other.fix);
        for (k, n) in other.lin {
            *self.lin.entry(k).or_insert(0) += n;
        }
    }
}

pub fn free_vars(e: &LNTerm) -> FreeVars {
    let mut fv = FreeVars::default();
    collect_free(e, &mut fv);
    fv
}

fn collect_free(e: &LNTerm, fv: &mut FreeVars) {
    match e {
        LNTerm::Var(x) => {
            fv.ord.insert(x.clone());
        }
        LNTerm::FixVar(u) => {
            fv.fix.insert(u.clone());
        }
        LNTerm::LinVar(x) => {
            *fv.lin.entry(x.clone()).or_insert(0) += 1;
        }
        LNTerm::Lam(x, b) => {
            let mut inner = FreeVars::default();
            collect_free(b, &mut inner);
            inner.ord.remove(x);
            fv.absorb(inner);
        }
        LNTerm::Fix(u, b) => {
            let mut inner = FreeVars::default();
            collect_free(b, &mut inner);
            inner.fix.remove(u);
            fv.absorb(inner);
        }
        LNTerm::App(f, a) => {
            collect_free(f, fv);
            collect_free(a, fv);
        }
        LNTerm::Anno(inner, _) => collect_free(inner, fv),
        LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) => {
            collect_free(r, fv);
            let mut inner = FreeVars::default();
            collect_free(b, &mut inner);
            inner.lin.remove(x);
            fv.absorb(inner);
        }
    }
}

pub fn free_vars_term(e: &Term) -> FreeVars {
    free_vars(&LNTerm::from(e))
}

/// Count free occurrences of the linear variable `var` in `e`.
pub fn count_linear(e: &LNTerm, var: &str) -> usize {
    free_vars(e).lin.get(var).copied().unwrap_or(0)
}

/// Γ ⊢ e ok: every free ordinary and fix variable of `e` is declared in Γ.
pub fn ok_gamma(gamma: &TypingContext, e: &LNTerm) -> bool {
    let fv = free_vars(e);
    fv.ord.iter().all(|x| gamma.declares(x, VarSpace::Ord))
        && fv.fix.iter().all(|u| gamma.declares(u, VarSpace::Fix))
}

/// Δ ⊩ e ok: each variable declared in Δ occurs exactly once across the
/// subject and the values stored in slack entries, and no undeclared linear
/// variable occurs anywhere in them.
pub fn ok_delta(delta: &LinearContext, e: &LNTerm) -> bool {
    let mut counts: HashMap<String, usize> = HashMap::new();
    let bump = |fv: FreeVars, counts: &mut HashMap<String, usize>| -> bool {
        for (v, n) in fv.lin {
            if !delta.declares(&v) {
                return false;
            }
            *counts.entry(v).or_insert(0) += n;
        }
        true
    };
    if !bump(free_vars(e), &mut counts) {
        return false;
    }
    for entry in &delta.entries {
        if let LinEntry::Slack { value, .. } = entry {
            if !bump(free_vars(value), &mut counts) {
                return false;
            }
        }
    }
    delta
        .entries
        .iter()
        .all(|en| counts.get(en.var()).copied().unwrap_or(0) == 1)
}

/// Which occurrences a substitution targets.
#[derive(Clone, Copy, Debug)]
pub enum VarRef<'a> {
    Ord(&'a str),
    Fix(&'a str),
    Lin(&'a str),
}

fn fresh_avoiding(base: &str, avoid: &dyn Fn(&str) -> bool) -> String {
    if !avoid(base) {
        return base.to_string();
    }
    for i in 0.. {
        let cand = format!("{base}_{i}");
        if !avoid(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Capture-avoiding substitution of `rep` for the variable `target` in `e`.
///
/// Total on all inputs; binders are renamed when they would capture a free
/// variable of `rep`.
pub fn subst(e: &LNTerm, target: VarRef, rep: &LNTerm) -> LNTerm {
    let rep_fv = free_vars(rep);
    subst_in(e, &target, rep, &rep_fv)
}

fn subst_in(e: &LNTerm, target: &VarRef, rep: &LNTerm, rep_fv: &FreeVars) -> LNTerm {
    match e {
        LNTerm::Var(x) => match target {
            VarRef::Ord(t) if x == t => rep.clone(),
            _ => e.clone(),
        },
        LNTerm::FixVar(u) => match target {
            VarRef::Fix(t) if u == t => rep.clone(),
            _ => e.clone(),
        },
        LNTerm::LinVar(x) => match target {
            VarRef::Lin(t) if x == t => rep.clone(),
            _ => e.clone(),
        },
        LNTerm::Lam(x, b) => {
            if matches!(target, VarRef::Ord(t) if x == *t) {
                return e.clone();
            }
            let (x2, b2) = rename_if_captures(x, b, VarSpace::Ord, rep_fv);
            LNTerm::Lam(x2, Box::new(subst_in(&b2, target, rep, rep_fv)))
        }
        LNTerm::Fix(u, b) => {
            if matches!(target, VarRef::Fix(t) if u == *t) {
                return e.clone();
            }
            let (u2, b2) = rename_if_captures(u, b, VarSpace::Fix, rep_fv);
            LNTerm::Fix(u2, Box::new(subst_in(&b2, target, rep, rep_fv)))
        }
        LNTerm::App(f, a) => LNTerm::App(
            Box::new(subst_in(f, target, rep, rep_fv)),
            Box::new(subst_in(a, target, rep, rep_fv)),
        ),
        LNTerm::Anno(inner, annos) => LNTerm::Anno(
            Box::new(subst_in(inner, target, rep, rep_fv)),
            annos.clone(),
        ),
        LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) => {
            let slack = matches!(e, LNTerm::SlackLet(_, _, _));
            let r2 = subst_in(r, target, rep, rep_fv);
            let (x2, b2) = if matches!(target, VarRef::Lin(t) if x == *t) {
                (x.clone(), (**b).clone())
            } else {
                let (x2, b2) = rename_lin_if_captures(x, b, rep_fv);
                (x2, subst_in(&b2, target, rep, rep_fv))
            };
            let mk = if slack {
                LNTerm::SlackLet
            } else {
                LNTerm::Let
            };
            mk(x2, Box::new(r2), Box::new(b2))
        }
    }
}

fn rename_if_captures(
    bound: &str,
    body: &LNTerm,
    space: VarSpace,
    rep_fv: &FreeVars,
) -> (String, LNTerm) {
    let captured = match space {
        VarSpace::Ord => rep_fv.ord.contains(bound),
        VarSpace::Fix => rep_fv.fix.contains(bound),
    };
    if !captured {
        return (bound.to_string(), body.clone());
    }
    let body_fv = free_vars(body);
    let avoid = |c: &str| {
        rep_fv.ord.contains(c)
            || rep_fv.fix.contains(c)
            || body_fv.ord.contains(c)
            || body_fv.fix.contains(c)
    };
    let fresh = fresh_avoiding(bound, &avoid);
    let rep_var = match space {
        VarSpace::Ord => LNTerm::Var(fresh.clone()),
        VarSpace::Fix => LNTerm::FixVar(fresh.clone()),
    };
    let target = match space {
        VarSpace::Ord => VarRef::Ord(bound),
        VarSpace::Fix => VarRef::Fix(bound),
    };
    (fresh, subst(body, target, &rep_var))
}

fn rename_lin_if_captures(bound: &str, body: &LNTerm, rep_fv: &FreeVars) -> (String, LNTerm) {
    if !rep_fv.lin.contains_key(bound) {
        return (bound.to_string(), body.clone());
    }
    let body_fv = free_vars(body);
    let avoid = |c: &str| rep_fv.lin.contains_key(c) || body_fv.lin.contains_key(c);
    let fresh = fresh_avoiding(bound, &avoid);
    (
        fresh.clone(),
        subst(body, VarRef::Lin(bound), &LNTerm::LinVar(fresh)),
    )
}

/// Substitution on source terms (β-reduction, fix unrolling).
pub fn subst_term(e: &Term, target: VarRef, rep: &Term) -> Term {
    let ln = subst(&LNTerm::from(e), target, &LNTerm::from(rep));
    Term::try_from(&ln).expect("substituting a source term into a source term stays source")
}

/// Substitute a value for an ordinary or linear variable.
///
/// The typing arguments all substitute values only; this wrapper states
/// that contract. If the variable is linear and occurs exactly once, the
/// result gains the value's linear variables exactly once.
pub fn subst_value(v: &LNTerm, target: VarRef, e: &LNTerm) -> LNTerm {
    debug_assert!(v.is_value(), "subst_value expects a value");
    subst(e, target, v)
}

/// Alpha-equivalence for let-normal terms (and, via embedding, source terms).
pub fn alpha_eq(a: &LNTerm, b: &LNTerm) -> bool {
    alpha_eq_in(a, b, &mut AlphaMaps::default())
}

pub fn alpha_eq_term(a: &Term, b: &Term) -> bool {
    alpha_eq(&LNTerm::from(a), &LNTerm::from(b))
}

#[derive(Default)]
struct AlphaMaps {
    // bound-variable correspondences, pushed and popped as we descend
    ord: Vec<(String, String)>,
    fix: Vec<(String, String)>,
    lin: Vec<(String, String)>,
}

fn lookup_pair(stack: &[(String, String)], a: &str, b: &str) -> Option<bool> {
    for (x, y) in stack.iter().rev() {
        if x == a || y == b {
            return Some(x == a && y == b);
        }
    }
    None
}

fn alpha_eq_in(a: &LNTerm, b: &LNTerm, maps: &mut AlphaMaps) -> bool {
    match (a, b) {
        (LNTerm::Var(x), LNTerm::Var(y)) => lookup_pair(&maps.ord, x, y).unwrap_or(x == y),
        (LNTerm::FixVar(x), LNTerm::FixVar(y)) => lookup_pair(&maps.fix, x, y).unwrap_or(x == y),
        (LNTerm::LinVar(x), LNTerm::LinVar(y)) => lookup_pair(&maps.lin, x, y).unwrap_or(x == y),
        (LNTerm::Lam(x, ba), LNTerm::Lam(y, bb)) => {
            maps.ord.push((x.clone(), y.clone()));
            let r = alpha_eq_in(ba, bb, maps);
            maps.ord.pop();
            r
        }
        (LNTerm::Fix(x, ba), LNTerm::Fix(y, bb)) => {
            maps.fix.push((x.clone(), y.clone()));
            let r = alpha_eq_in(ba, bb, maps);
            maps.fix.pop();
            r
        }
        (LNTerm::App(fa, aa), LNTerm::App(fb, ab)) => {
            alpha_eq_in(fa, fb, maps) && alpha_eq_in(aa, ab, maps)
        }
        (LNTerm::Anno(ea, la), LNTerm::Anno(eb, lb)) => la == lb && alpha_eq_in(ea, eb, maps),
        (LNTerm::Let(x, ra, ba), LNTerm::Let(y, rb, bb))
        | (LNTerm::SlackLet(x, ra, ba), LNTerm::SlackLet(y, rb, bb)) => {
            if std::mem::discriminant(a) != std::mem::discriminant(b) {
                return false;
            }
            if !alpha_eq_in(ra, rb, maps) {
                return false;
            }
            maps.lin.push((x.clone(), y.clone()));
            let r = alpha_eq_in(ba, bb, maps);
            maps.lin.pop();
            r
        }
        _ => false,
    }
}

/// An evaluation context E ::= [] | E e | v E | (E : As), stored as a path
/// of frames from the outside in.
///
/// The annotation production is forced by the let-normal translation,
/// which floats a non-value annotation's inner bindings outside the
/// annotation: the systems only agree if a subterm inside an annotation in
/// evaluation position can be named directly.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalContext {
    pub frames: Vec<EvalFrame>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EvalFrame {
    /// hole in function position: `[] e`
    AppFn { arg: LNTerm },
    /// hole in argument position: `v []` (function must be a value)
    AppArg { func: LNTerm },
    /// hole under an annotation: `([] : As)`
    Anno { annos: Vec<ContextualAnnotation> },
}

impl EvalContext {
    pub fn hole() -> EvalContext {
        EvalContext { frames: Vec::new() }
    }

    pub fn is_hole(&self) -> bool {
        self.frames.is_empty()
    }

    pub fn plug(&self, t: LNTerm) -> LNTerm {
        self.frames.iter().rev().fold(t, |acc, frame| match frame {
            EvalFrame::AppFn { arg } => LNTerm::App(Box::new(acc), Box::new(arg.clone())),
            EvalFrame::AppArg { func } => LNTerm::App(Box::new(func.clone()), Box::new(acc)),
            EvalFrame::Anno { annos } => LNTerm::Anno(Box::new(acc), annos.clone()),
        })
    }
}

/// All decompositions e = E[e'], outermost first, function side before
/// argument side. The identity decomposition ([], e) always comes first.
pub fn decompose_eval(e: &LNTerm) -> Vec<(EvalContext, LNTerm)> {
    let mut out = vec![(EvalContext::hole(), e.clone())];
    match e {
        LNTerm::App(f, a) => {
            for (mut cx, s) in decompose_eval(f) {
                cx.frames.insert(0, EvalFrame::AppFn { arg: (**a).clone() });
                out.push((cx, s));
            }
            if f.is_value() {
                for (mut cx, s) in decompose_eval(a) {
                    cx.frames.insert(
                        0,
                        EvalFrame::AppArg {
                            func: (**f).clone(),
                        },
                    );
                    out.push((cx, s));
                }
            }
        }
        LNTerm::Anno(inner, annos) => {
            for (mut cx, s) in decompose_eval(inner) {
                cx.frames.insert(
                    0,
                    EvalFrame::Anno {
                        annos: annos.clone(),
                    },
                );
                out.push((cx, s));
            }
        }
        _ => {}
    }
    out
}

pub fn decompose_eval_term(e: &Term) -> Vec<(EvalContext, LNTerm)> {
    decompose_eval(&LNTerm::from(e))
}

/// An elongated evaluation context Q, which can additionally skip over
/// pre-values, descend into annotations, and descend into let bindings.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QContext {
    pub frames: Vec<QFrame>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QFrame {
    /// `Q e`
    AppFn { arg: LNTerm },
    /// `ě Q` — function part must be a pre-value
    AppArg { func: LNTerm },
    /// `(Q : As)`
    Anno { annos: Vec<ContextualAnnotation> },
    /// `let x̄ = Q in e`
    LetRhs { var: String, body: LNTerm },
    /// `let x̄ = ě in Q` — right-hand side must be a pre-value
    LetBody { var: String, rhs: LNTerm },
    /// `let† x̄ = Q in e`
    SlackRhs { var: String, body: LNTerm },
    /// `let† x̄ = v in Q` — right-hand side must be a value
    SlackBody { var: String, rhs: LNTerm },
}

impl QContext {
    pub fn hole() -> QContext {
        QContext { frames: Vec::new() }
    }

    pub fn plug(&self, t: LNTerm) -> LNTerm {
        self.frames.iter().rev().fold(t, |acc, frame| match frame {
            QFrame::AppFn { arg } => LNTerm::App(Box::new(acc), Box::new(arg.clone())),
            QFrame::AppArg { func } => LNTerm::App(Box::new(func.clone()), Box::new(acc)),
            QFrame::Anno { annos } => LNTerm::Anno(Box::new(acc), annos.clone()),
            QFrame::LetRhs { var, body } => {
                LNTerm::Let(var.clone(), Box::new(acc), Box::new(body.clone()))
            }
            QFrame::LetBody { var, rhs } => {
                LNTerm::Let(var.clone(), Box::new(rhs.clone()), Box::new(acc))
            }
            QFrame::SlackRhs { var, body } => {
                LNTerm::SlackLet(var.clone(), Box::new(acc), Box::new(body.clone()))
            }
            QFrame::SlackBody { var, rhs } => {
                LNTerm::SlackLet(var.clone(), Box::new(rhs.clone()), Box::new(acc))
            }
        })
    }
}

/// All decompositions e = Q[e'] under the elongated-evaluation-context
/// grammar, outermost first.
pub fn elongated_decompose(e: &LNTerm) -> Vec<(QContext, LNTerm)> {
    let mut out = vec![(QContext::hole(), e.clone())];
    let extend = |frame: QFrame, sub: Vec<(QContext, LNTerm)>, out: &mut Vec<_>| {
        for (mut cx, s) in sub {
            cx.frames.insert(0, frame.clone());
            out.push((cx, s));
        }
    };
    match e {
        LNTerm::App(f, a) => {
            extend(
                QFrame::AppFn { arg: (**a).clone() },
                elongated_decompose(f),
                &mut out,
            );
            if is_pre_value(f) {
                extend(
                    QFrame::AppArg {
                        func: (**f).clone(),
                    },
                    elongated_decompose(a),
                    &mut out,
                );
            }
        }
        LNTerm::Anno(inner, annos) => {
            extend(
                QFrame::Anno {
                    annos: annos.clone(),
                },
                elongated_decompose(inner),
                &mut out,
            );
        }
        LNTerm::Let(x, r, b) => {
            extend(
                QFrame::LetRhs {
                    var: x.clone(),
                    body: (**b).clone(),
                },
                elongated_decompose(r),
                &mut out,
            );
            if is_pre_value(r) {
                extend(
                    QFrame::LetBody {
                        var: x.clone(),
                        rhs: (**r).clone(),
                    },
                    elongated_decompose(b),
                    &mut out,
                );
            }
        }
        LNTerm::SlackLet(x, r, b) => {
            extend(
                QFrame::SlackRhs {
                    var: x.clone(),
                    body: (**b).clone(),
                },
                elongated_decompose(r),
                &mut out,
            );
            if r.is_value() {
                extend(
                    QFrame::SlackBody {
                        var: x.clone(),
                        rhs: (**r).clone(),
                    },
                    elongated_decompose(b),
                    &mut out,
                );
            }
        }
        _ => {}
    }
    out
}

/// True when `body` has the shape Q[x̄] for the given bound variable: x̄
/// occurs exactly once and that occurrence is in elongated evaluation
/// position.
pub fn body_is_q_of(body: &LNTerm, var: &str) -> bool {
    count_linear(body, var) == 1
        && elongated_decompose(body)
            .iter()
            .any(|(_, s)| matches!(s, LNTerm::LinVar(v) if v == var))
}

/// Split Δ into the entries needed by `part` (transitively through slack
/// values) and the rest, preserving order.
pub fn split_delta(delta: &LinearContext, part: &LNTerm) -> (LinearContext, LinearContext) {
    let mut needed: HashSet<String> = free_vars(part).lin.keys().cloned().collect();
    // slack entries whose variable is needed drag in the variables free in
    // their stored value
    loop {
        let mut grew = false;
        for entry in &delta.entries {
            if let LinEntry::Slack { var, value } = entry {
                if needed.contains(var) {
                    for v in free_vars(value).lin.keys() {
                        if needed.insert(v.clone()) {
                            grew = true;
                        }
                    }
                }
            }
        }
        if !grew {
            break;
        }
    }
    let mut used = LinearContext::empty();
    let mut rest = LinearContext::empty();
    for entry in &delta.entries {
        if needed.contains(entry.var()) {
            used.entries.push(entry.clone());
        } else {
            rest.entries.push(entry.clone());
        }
    }
    (used, rest)
}

/// Deterministic fresh-name source for linear variables.
#[derive(Clone, Debug)]
pub struct NameGen {
    prefix: &'static str,
    counter: usize,
}

impl NameGen {
    pub fn new(prefix: &'static str) -> NameGen {
        NameGen { prefix, counter: 0 }
    }

    pub fn fresh(&mut self) -> String {
        let n = self.counter;
        self.counter += 1;
        format!("{}{}", self.prefix, n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn subst_variable_case() {
        // [y/x] x = y
        let e = subst_term(&v("x"), VarRef::Ord("x"), &v("y"));
        assert_eq!(e, v("y"));
    }

    #[test]
    fn subst_capture_avoidance() {
        // [v/x](fn y => x y) renames y when y is free in v
        let body = Term::lam("y", Term::app(v("x"), v("y")));
        let out = subst_term(&body, VarRef::Ord("x"), &v("y"));
        // the binder must have been renamed away from "y"
        match &out {
            Term::Lam(b, inner) => {
                assert_ne!(b, "y");
                assert_eq!(**inner, Term::app(v("y"), Term::var(b)));
            }
            other => panic!("expected lambda, got {other:?}"),
        }
    }

    #[test]
    fn subst_linear_single_occurrence() {
        // [v/x̄](x̄ ȳ) = v ȳ
        let e = LNTerm::app(LNTerm::linvar("x^0"), LNTerm::linvar("y^0"));
        let val = LNTerm::lam("z", LNTerm::var("z"));
        let out = subst(&e, VarRef::Lin("x^0"), &val);
        assert_eq!(out, LNTerm::app(val, LNTerm::linvar("y^0")));
    }

    #[test]
    fn ok_gamma_cases() {
        let gamma = TypingContext::empty().extended("x", VarSpace::Ord, Type::base("int"));
        assert!(ok_gamma(&gamma, &LNTerm::var("x")));
        assert!(!ok_gamma(&TypingContext::empty(), &LNTerm::var("x")));
        assert!(ok_gamma(
            &TypingContext::empty(),
            &LNTerm::lam("x", LNTerm::var("x"))
        ));
    }

    #[test]
    fn ok_delta_cases() {
        let d1 = LinearContext::single("x^0", Type::base("A"));
        assert!(ok_delta(&d1, &LNTerm::linvar("x^0")));
        assert!(!ok_delta(
            &d1,
            &LNTerm::app(LNTerm::linvar("x^0"), LNTerm::linvar("x^0"))
        ));
        let d2 = d1.pushed(LinEntry::Linear {
            var: "y^0".into(),
            ty: Type::base("B"),
        });
        assert!(!ok_delta(&d2, &LNTerm::linvar("x^0")));
    }

    #[test]
    fn classify_cases() {
        assert_eq!(
            classify_term(&Term::app(v("f"), v("g"))),
            Classification::PreValue
        );
        assert_eq!(
            classify_term(&Term::fix("u", Term::fixvar("u"))),
            Classification::AntiValue
        );
        assert_eq!(
            classify_term(&Term::lam("x", v("x"))),
            Classification::PreValue
        );
    }

    #[test]
    fn decompose_eval_five_positions() {
        // f (x y) has five evaluation positions in a fixed order
        let e = Term::app(v("f"), Term::app(v("x"), v("y")));
        let ds = decompose_eval_term(&e);
        let subjects: Vec<String> = ds.iter().map(|(_, s)| format!("{s:?}")).collect();
        assert_eq!(ds.len(), 5, "{subjects:?}");
        // order: whole, f, (x y), x, y
        assert!(matches!(&ds[0].1, LNTerm::App(_, _)));
        assert!(matches!(&ds[1].1, LNTerm::Var(x) if x == "f"));
        assert!(matches!(&ds[2].1, LNTerm::App(_, _)));
        assert!(matches!(&ds[3].1, LNTerm::Var(x) if x == "x"));
        assert!(matches!(&ds[4].1, LNTerm::Var(x) if x == "y"));
        // every decomposition plugs back to the original term
        let ln = LNTerm::from(&e);
        for (cx, s) in &ds {
            assert_eq!(cx.plug(s.clone()), ln);
        }
    }

    #[test]
    fn decompose_eval_three_positions() {
        let e = Term::app(v("f"), v("x"));
        assert_eq!(decompose_eval_term(&e).len(), 3);
    }

    #[test]
    fn decompose_eval_value() {
        let e = Term::lam("x", v("x"));
        let ds = decompose_eval_term(&e);
        assert_eq!(ds.len(), 1);
        assert!(ds[0].0.is_hole());
    }

    #[test]
    fn elongated_skips_pre_values() {
        // in (x y) z the argument z is in elongated position though not in
        // evaluation position
        let e = LNTerm::app(LNTerm::app(LNTerm::var("x"), LNTerm::var("y")), LNTerm::var("z"));
        let qs = elongated_decompose(&e);
        assert!(qs
            .iter()
            .any(|(_, s)| matches!(s, LNTerm::Var(v) if v == "z")));
        let es = decompose_eval(&e);
        assert!(!es
            .iter()
            .any(|(_, s)| matches!(s, LNTerm::Var(v) if v == "z")));
    }

    #[test]
    fn elongated_blocked_by_anti_value() {
        // an anti-value in function position blocks descent into the argument
        let e = LNTerm::app(
            LNTerm::fix("u", LNTerm::fixvar("u")),
            LNTerm::app(LNTerm::var("w"), LNTerm::var("x")),
        );
        let qs = elongated_decompose(&e);
        assert!(!qs
            .iter()
            .any(|(_, s)| matches!(s, LNTerm::Var(v) if v == "w")));
        // the fix itself is still in elongated (function) position
        assert!(qs.iter().any(|(_, s)| matches!(s, LNTerm::Fix(_, _))));
    }

    #[test]
    fn elongated_linear_var_alone() {
        let e = LNTerm::linvar("x^0");
        let qs = elongated_decompose(&e);
        assert_eq!(qs.len(), 1);
    }

    #[test]
    fn alpha_eq_cases() {
        assert!(alpha_eq_term(
            &Term::lam("x", v("x")),
            &Term::lam("y", v("y"))
        ));
        assert!(alpha_eq(
            &LNTerm::let_("x^0", LNTerm::var("x"), LNTerm::linvar("x^0")),
            &LNTerm::let_("y^0", LNTerm::var("x"), LNTerm::linvar("y^0")),
        ));
        assert!(!alpha_eq_term(
            &Term::lam("x", v("x")),
            &Term::lam("x", v("y"))
        ));
    }

    #[test]
    fn subst_preserves_ok_delta() {
        // if Δ1 ⊩ v ok and Δ2, x̄:A ⊩ e ok then Δ1,Δ2 ⊩ [v/x̄]e ok
        let v_term = LNTerm::app(LNTerm::linvar("a^0"), LNTerm::linvar("a^1"));
        let d1 = LinearContext {
            entries: vec![
                LinEntry::Linear {
                    var: "a^0".into(),
                    ty: Type::base("P"),
                },
                LinEntry::Linear {
                    var: "a^1".into(),
                    ty: Type::base("Q"),
                },
            ],
        };
        assert!(ok_delta(&d1, &v_term));
        let e = LNTerm::app(LNTerm::linvar("x^0"), LNTerm::linvar("b^0"));
        let d2x = LinearContext {
            entries: vec![
                LinEntry::Linear {
                    var: "b^0".into(),
                    ty: Type::base("R"),
                },
                LinEntry::Linear {
                    var: "x^0".into(),
                    ty: Type::base("S"),
                },
            ],
        };
        assert!(ok_delta(&d2x, &e));
        let out = subst(&e, VarRef::Lin("x^0"), &v_term);
        let d12 = LinearContext {
            entries: vec![
                LinEntry::Linear {
                    var: "a^0".into(),
                    ty: Type::base("P"),
                },
                LinEntry::Linear {
                    var: "a^1".into(),
                    ty: Type::base("Q"),
                },
                LinEntry::Linear {
                    var: "b^0".into(),
                    ty: Type::base("R"),
                },
            ],
        };
        assert!(ok_delta(&d12, &out));
    }
}
