//! The left tridirectional typechecker.
//!
//! Checking explores, at every node: the syntax-directed rule for the
//! subject's head, subsumption through the synthesis stream, union
//! introductions, left rules on linear assumptions, and directL over every
//! evaluation-position decomposition whose subterm is in synthesizing form
//! and is not a linear variable. Search is fuel-bounded and memoized on
//! alpha-normalized judgments; Reject is only reported when the whole
//! space was explored, so it is definitive, while FuelExhausted is kept
//! distinct.

use std::collections::HashMap;
use std::rc::Rc;

use crate::derivation::{memo_key, Derivation, Direction, Judgment, Rule};
pub use crate::derivation::ctx_anno_satisfied;
use crate::subtyping::{subtype, subtype_derive};
use crate::syntax::{
    decompose_eval, ok_delta, ok_gamma, split_delta, LNTerm, LinEntry, LinearContext, Term, Type,
    TypingContext, VarSpace,
};

/// Left-rule search strategy.
///
/// `Heuristic` applies botL and \/L eagerly (they are a leaf and an
/// invertible rule) and tries /\L only on assumptions whose top-level
/// intersection structure hides a union or bot. `Exhaustive` backtracks
/// over every left-rule application order. The two must agree; the
/// differential suite checks that they do.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    Heuristic,
    Exhaustive,
}

#[derive(Clone, Debug)]
pub struct CheckConfig {
    pub strategy: Strategy,
    pub fuel: u64,
    pub build_derivations: bool,
}

impl Default for CheckConfig {
    fn default() -> CheckConfig {
        CheckConfig {
            strategy: Strategy::Heuristic,
            fuel: 100_000,
            build_derivations: true,
        }
    }
}

impl CheckConfig {
    pub fn decision_only() -> CheckConfig {
        CheckConfig {
            build_derivations: false,
            ..CheckConfig::default()
        }
    }

    pub fn with_fuel(mut self, fuel: u64) -> CheckConfig {
        self.fuel = fuel;
        self
    }

    pub fn with_strategy(mut self, strategy: Strategy) -> CheckConfig {
        self.strategy = strategy;
        self
    }
}

/// Result of a checking run.
#[derive(Clone, Debug)]
pub enum CheckOutcome {
    Accept(Rc<Derivation>),
    Reject,
    FuelExhausted,
}

impl CheckOutcome {
    pub fn is_accept(&self) -> bool {
        matches!(self, CheckOutcome::Accept(_))
    }
}

/// Outcome without a derivation, for bulk runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Decision {
    Accept,
    Reject,
    FuelExhausted,
}

/// Result of a synthesis run: every type synthesizable within fuel,
/// deduplicated, declared types before their projections.
#[derive(Clone, Debug)]
pub struct SynthOutcome {
    pub types: Vec<(Type, Option<Rc<Derivation>>)>,
    pub fuel_exhausted: bool,
}

#[derive(Clone, Debug, thiserror::Error)]
pub enum CheckError {
    #[error("ill-scoped: {0}")]
    IllScoped(String),
    #[error("ill-formed: {0}")]
    IllFormed(String),
}

// internal search result
#[derive(Clone, Debug)]
enum Res {
    Accept(Option<Rc<Derivation>>),
    Reject,
    Fuel,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum MemoVal {
    Accept,
    Reject,
}

#[derive(Clone)]
struct SynthMemo {
    types: Vec<Type>,
}

/// A reusable tridirectional checker. The memo table persists across calls
/// (accepted and rejected judgments stay decided); fuel is per call.
pub struct TriChecker {
    cfg: CheckConfig,
    memo: HashMap<String, MemoVal>,
    synth_memo: HashMap<String, SynthMemo>,
    fuel_left: u64,
    fresh: usize,
}

impl TriChecker {
    pub fn new(cfg: CheckConfig) -> TriChecker {
        TriChecker {
            cfg,
            memo: HashMap::new(),
            synth_memo: HashMap::new(),
            fuel_left: 0,
            fresh: 0,
        }
    }

    pub fn fuel_used(&self) -> u64 {
        self.cfg.fuel - self.fuel_left
    }

    fn validate_input(
        &self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
    ) -> Result<(), CheckError> {
        if e.contains_let() {
            return Err(CheckError::IllFormed(
                "tridirectional subjects must not contain let bindings".into(),
            ));
        }
        if delta
            .entries
            .iter()
            .any(|en| matches!(en, LinEntry::Slack { .. }))
        {
            return Err(CheckError::IllFormed(
                "tridirectional linear contexts have no slack entries".into(),
            ));
        }
        if !ok_gamma(gamma, e) {
            return Err(CheckError::IllScoped(format!(
                "free variable of {e} not declared in gamma"
            )));
        }
        if !ok_delta(delta, e) {
            return Err(CheckError::IllScoped(format!(
                "linear variables of {e} do not match delta"
            )));
        }
        Ok(())
    }

    /// Γ; Δ ⊢ e ⇓ C. Requires a derivation-building configuration; use
    /// [`TriChecker::decide`] for bulk decision-only runs.
    pub fn check(
        &mut self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Result<CheckOutcome, CheckError> {
        assert!(
            self.cfg.build_derivations,
            "check() needs build_derivations; use decide()"
        );
        self.validate_input(gamma, delta, e)?;
        self.fuel_left = self.cfg.fuel;
        Ok(match self.check_in(gamma, delta, e, goal) {
            Res::Accept(d) => CheckOutcome::Accept(d.expect("derivation built in build mode")),
            Res::Reject => CheckOutcome::Reject,
            Res::Fuel => CheckOutcome::FuelExhausted,
        })
    }

    /// Decision-only checking; no derivation is constructed.
    pub fn decide(
        &mut self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Result<Decision, CheckError> {
        self.validate_input(gamma, delta, e)?;
        self.fuel_left = self.cfg.fuel;
        Ok(match self.check_in(gamma, delta, e, goal) {
            Res::Accept(_) => Decision::Accept,
            Res::Reject => Decision::Reject,
            Res::Fuel => Decision::FuelExhausted,
        })
    }

    /// Γ; Δ ⊢ e ⇑ — the full synthesis stream.
    pub fn synth(
        &mut self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
    ) -> Result<SynthOutcome, CheckError> {
        self.validate_input(gamma, delta, e)?;
        self.fuel_left = self.cfg.fuel;
        let stream = self.synth_in(gamma, delta, e);
        Ok(SynthOutcome {
            types: stream.items,
            fuel_exhausted: stream.exhausted,
        })
    }

    // ------------------------------------------------------------------
    // internals

    fn build(&self) -> bool {
        self.cfg.build_derivations
    }

    #[allow(clippy::too_many_arguments)]
    fn node(
        &self,
        rule: Rule,
        gamma: &TypingContext,
        delta: &LinearContext,
        subject: &LNTerm,
        dir: Direction,
        ty: &Type,
        children: Vec<Option<Rc<Derivation>>>,
        subtyping: Option<crate::subtyping::SubDerivation>,
    ) -> Option<Rc<Derivation>> {
        if !self.build() {
            return None;
        }
        Some(Rc::new(Derivation {
            rule,
            judgment: Judgment {
                gamma: gamma.clone(),
                delta: delta.clone(),
                subject: subject.clone(),
                dir,
                ty: ty.clone(),
            },
            children: children.into_iter().map(|c| c.expect("child built")).collect(),
            subtyping,
        }))
    }

    fn fresh_var(&mut self) -> String {
        let n = self.fresh;
        self.fresh += 1;
        format!("d^{n}")
    }

    fn check_in(
        &mut self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Res {
        if self.fuel_left == 0 {
            return Res::Fuel;
        }
        self.fuel_left -= 1;

        let key = memo_key(gamma, delta, e, Some(goal));
        match self.memo.get(&key) {
            Some(MemoVal::Accept) => return Res::Accept(None),
            Some(MemoVal::Reject) => return Res::Reject,
            None => {}
        }

        let res = self.check_alternatives(gamma, delta, e, goal);
        match &res {
            Res::Accept(_) if !self.build() => {
                self.memo.insert(key, MemoVal::Accept);
            }
            Res::Reject => {
                self.memo.insert(key, MemoVal::Reject);
            }
            _ => {}
        }
        res
    }

    fn bot_leaf(
        &mut self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Res {
        // botL premises: Γ ⊢ e ok and Δ ⊩ e ok
        if ok_gamma(gamma, e) && ok_delta(delta, e) {
            Res::Accept(self.node(
                Rule::BotL,
                gamma,
                delta,
                e,
                Direction::Check,
                goal,
                vec![],
                None,
            ))
        } else {
            Res::Reject
        }
    }

    fn or_l(
        &mut self,
        idx: usize,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Res {
        let (var, a, b) = match &delta.entries[idx] {
            LinEntry::Linear {
                var,
                ty: Type::Union(a, b),
            } => (var.clone(), (**a).clone(), (**b).clone()),
            _ => unreachable!("or_l on a non-union entry"),
        };
        let left = delta.with_entry_replaced(
            idx,
            LinEntry::Linear {
                var: var.clone(),
                ty: a,
            },
        );
        let d1 = match self.check_in(gamma, &left, e, goal) {
            Res::Accept(d) => d,
            other => return other,
        };
        let right = delta.with_entry_replaced(idx, LinEntry::Linear { var, ty: b });
        match self.check_in(gamma, &right, e, goal) {
            Res::Accept(d2) => Res::Accept(self.node(
                Rule::OrL,
                gamma,
                delta,
                e,
                Direction::Check,
                goal,
                vec![d1, d2],
                None,
            )),
            other => other,
        }
    }

    fn and_l(
        &mut self,
        idx: usize,
        first: bool,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Res {
        let (var, part) = match &delta.entries[idx] {
            LinEntry::Linear {
                var,
                ty: Type::Intersect(a, b),
            } => (var.clone(), if first { (**a).clone() } else { (**b).clone() }),
            _ => unreachable!("and_l on a non-intersection entry"),
        };
        let inner = delta.with_entry_replaced(idx, LinEntry::Linear { var, ty: part });
        match self.check_in(gamma, &inner, e, goal) {
            Res::Accept(d) => Res::Accept(self.node(
                if first { Rule::AndL1 } else { Rule::AndL2 },
                gamma,
                delta,
                e,
                Direction::Check,
                goal,
                vec![d],
                None,
            )),
            other => other,
        }
    }

    fn check_alternatives(
        &mut self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Res {
        let heuristic = self.cfg.strategy == Strategy::Heuristic;

        if heuristic {
            // botL is an accepting leaf whenever a bot assumption exists
            if delta
                .entries
                .iter()
                .any(|en| matches!(en, LinEntry::Linear { ty: Type::Bot, .. }))
            {
                return self.bot_leaf(gamma, delta, e, goal);
            }
            // \/L is invertible: split the first union assumption eagerly
            if let Some(idx) = delta
                .entries
                .iter()
                .position(|en| matches!(en, LinEntry::Linear { ty: Type::Union(_, _), .. }))
            {
                return self.or_l(idx, gamma, delta, e, goal);
            }
        }

        let mut fuel_hit = false;
        let run = |res: Res, fuel_hit: &mut bool| -> Option<Res> {
            match res {
                Res::Accept(d) => Some(Res::Accept(d)),
                Res::Fuel => {
                    *fuel_hit = true;
                    None
                }
                Res::Reject => None,
            }
        };

        if !heuristic {
            // exhaustive mode interleaves left rules freely
            for idx in 0..delta.entries.len() {
                match &delta.entries[idx] {
                    LinEntry::Linear { ty: Type::Bot, .. } => {
                        let r = self.bot_leaf(gamma, delta, e, goal);
                        if let Some(out) = run(r, &mut fuel_hit) {
                            return out;
                        }
                    }
                    LinEntry::Linear {
                        ty: Type::Union(_, _),
                        ..
                    } => {
                        let r = self.or_l(idx, gamma, delta, e, goal);
                        if let Some(out) = run(r, &mut fuel_hit) {
                            return out;
                        }
                    }
                    _ => {}
                }
            }
        }

        // syntax-directed rule for the subject's head
        match e {
            LNTerm::Lam(x, body) => {
                if let Type::Arrow(dom, cod) = goal {
                    if delta.is_empty() {
                        let (x2, body2, gamma2) =
                            extend_gamma(gamma, x, VarSpace::Ord, (**dom).clone(), body);
                        let _ = x2;
                        let r = self.check_in(&gamma2, delta, &body2, cod);
                        match r {
                            Res::Accept(d) => {
                                return Res::Accept(self.node(
                                    Rule::ArrowI,
                                    gamma,
                                    delta,
                                    e,
                                    Direction::Check,
                                    goal,
                                    vec![d],
                                    None,
                                ))
                            }
                            Res::Fuel => fuel_hit = true,
                            Res::Reject => {}
                        }
                    }
                }
            }
            LNTerm::Fix(u, body) => {
                if delta.is_empty() {
                    let (u2, body2, gamma2) =
                        extend_gamma(gamma, u, VarSpace::Fix, goal.clone(), body);
                    let _ = u2;
                    let r = self.check_in(&gamma2, delta, &body2, goal);
                    match r {
                        Res::Accept(d) => {
                            return Res::Accept(self.node(
                                Rule::FixR,
                                gamma,
                                delta,
                                e,
                                Direction::Check,
                                goal,
                                vec![d],
                                None,
                            ))
                        }
                        Res::Fuel => fuel_hit = true,
                        Res::Reject => {}
                    }
                }
            }
            _ if e.is_synthesizing_form() => {
                // sub: synthesize, then subtype
                let stream = self.synth_in(gamma, delta, e);
                if stream.exhausted {
                    fuel_hit = true;
                }
                for (ty, d) in &stream.items {
                    if subtype(ty, goal) {
                        let sub_d = if self.build() {
                            subtype_derive(ty, goal)
                        } else {
                            None
                        };
                        return Res::Accept(self.node(
                            Rule::Sub,
                            gamma,
                            delta,
                            e,
                            Direction::Check,
                            goal,
                            vec![d.clone()],
                            sub_d,
                        ));
                    }
                }
            }
            _ => {}
        }

        // union introductions
        if let Type::Union(a, b) = goal {
            for (rule, part) in [(Rule::OrI1, a), (Rule::OrI2, b)] {
                let r = self.check_in(gamma, delta, e, part);
                match r {
                    Res::Accept(d) => {
                        return Res::Accept(self.node(
                            rule,
                            gamma,
                            delta,
                            e,
                            Direction::Check,
                            goal,
                            vec![d],
                            None,
                        ))
                    }
                    Res::Fuel => fuel_hit = true,
                    Res::Reject => {}
                }
            }
        }

        // intersection introduction, values only
        if let Type::Intersect(a, b) = goal {
            if e.is_value() {
                'andi: {
                    let d1 = match self.check_in(gamma, delta, e, a) {
                        Res::Accept(d) => d,
                        Res::Fuel => {
                            fuel_hit = true;
                            break 'andi;
                        }
                        Res::Reject => break 'andi,
                    };
                    match self.check_in(gamma, delta, e, b) {
                        Res::Accept(d2) => {
                            return Res::Accept(self.node(
                                Rule::AndI,
                                gamma,
                                delta,
                                e,
                                Direction::Check,
                                goal,
                                vec![d1, d2],
                                None,
                            ))
                        }
                        Res::Fuel => fuel_hit = true,
                        Res::Reject => {}
                    }
                }
            }
        }

        // /\L on intersection assumptions; the heuristic only bothers when a
        // union or bot is reachable through top-level intersections
        for idx in 0..delta.entries.len() {
            let decompose = match &delta.entries[idx] {
                LinEntry::Linear {
                    ty: ty @ Type::Intersect(_, _),
                    ..
                } => !heuristic || left_decomposable(ty),
                _ => false,
            };
            if !decompose {
                continue;
            }
            for first in [true, false] {
                let r = self.and_l(idx, first, gamma, delta, e, goal);
                match r {
                    Res::Accept(d) => return Res::Accept(d),
                    Res::Fuel => fuel_hit = true,
                    Res::Reject => {}
                }
            }
        }

        // directL over every nameable decomposition
        for (cx, sub) in decompose_eval(e) {
            if !sub.is_synthesizing_form() || matches!(sub, LNTerm::LinVar(_)) {
                continue;
            }
            let (d1ctx, d2ctx) = split_delta(delta, &sub);
            let stream = self.synth_in(gamma, &d1ctx, &sub);
            if stream.exhausted {
                fuel_hit = true;
            }
            for (ty, syn_d) in &stream.items {
                let xbar = self.fresh_var();
                let plugged = cx.plug(LNTerm::LinVar(xbar.clone()));
                let extended = d2ctx.pushed(LinEntry::Linear {
                    var: xbar.clone(),
                    ty: ty.clone(),
                });
                match self.check_in(gamma, &extended, &plugged, goal) {
                    Res::Accept(d2) => {
                        return Res::Accept(self.node(
                            Rule::DirectL,
                            gamma,
                            delta,
                            e,
                            Direction::Check,
                            goal,
                            vec![syn_d.clone(), d2],
                            None,
                        ))
                    }
                    Res::Fuel => fuel_hit = true,
                    Res::Reject => {}
                }
            }
        }

        if fuel_hit {
            Res::Fuel
        } else {
            Res::Reject
        }
    }

    fn synth_in(&mut self, gamma: &TypingContext, delta: &LinearContext, e: &LNTerm) -> Stream {
        if self.fuel_left == 0 {
            return Stream {
                items: vec![],
                exhausted: true,
            };
        }
        self.fuel_left -= 1;

        let key = memo_key(gamma, delta, e, None);
        if let Some(m) = self.synth_memo.get(&key) {
            if !self.build() {
                return Stream {
                    items: m.types.iter().cloned().map(|t| (t, None)).collect(),
                    exhausted: false,
                };
            } else if m.types.is_empty() {
                // an empty stream needs no derivations; reuse it in any mode
                return Stream {
                    items: vec![],
                    exhausted: false,
                };
            }
        }

        let mut stream = Stream {
            items: vec![],
            exhausted: false,
        };

        match e {
            LNTerm::Var(x) => {
                if delta.is_empty() {
                    if let Some(ty) = gamma.lookup_ord(x) {
                        let d = self.node(
                            Rule::Var,
                            gamma,
                            delta,
                            e,
                            Direction::Synth,
                            ty,
                            vec![],
                            None,
                        );
                        stream.push(ty.clone(), d);
                    }
                }
            }
            LNTerm::FixVar(u) => {
                if delta.is_empty() {
                    if let Some(ty) = gamma.lookup_fix(u) {
                        let d = self.node(
                            Rule::FixVarR,
                            gamma,
                            delta,
                            e,
                            Direction::Synth,
                            ty,
                            vec![],
                            None,
                        );
                        stream.push(ty.clone(), d);
                    }
                }
            }
            LNTerm::LinVar(x) => {
                if let [LinEntry::Linear { var, ty }] = delta.entries.as_slice() {
                    if var == x {
                        let d = self.node(
                            Rule::VarBar,
                            gamma,
                            delta,
                            e,
                            Direction::Synth,
                            ty,
                            vec![],
                            None,
                        );
                        stream.push(ty.clone(), d);
                    }
                }
            }
            LNTerm::App(f, a) => {
                let (d1ctx, d2ctx) = split_delta(delta, f);
                let fstream = self.synth_in(gamma, &d1ctx, f);
                if fstream.exhausted {
                    stream.exhausted = true;
                }
                for (fty, fd) in &fstream.items {
                    if let Type::Arrow(dom, cod) = fty {
                        match self.check_in(gamma, &d2ctx, a, dom) {
                            Res::Accept(ad) => {
                                let d = self.node(
                                    Rule::ArrowE,
                                    gamma,
                                    delta,
                                    e,
                                    Direction::Synth,
                                    cod,
                                    vec![fd.clone(), ad],
                                    None,
                                );
                                stream.push((**cod).clone(), d);
                            }
                            Res::Fuel => stream.exhausted = true,
                            Res::Reject => {}
                        }
                    }
                }
            }
            LNTerm::Anno(inner, annos) => {
                for entry in annos {
                    if !ctx_anno_satisfied(&entry.context, gamma) {
                        continue;
                    }
                    match self.check_in(gamma, delta, inner, &entry.ty) {
                        Res::Accept(d1) => {
                            let d = self.node(
                                Rule::CtxAnno,
                                gamma,
                                delta,
                                e,
                                Direction::Synth,
                                &entry.ty,
                                vec![d1],
                                None,
                            );
                            stream.push(entry.ty.clone(), d);
                        }
                        Res::Fuel => stream.exhausted = true,
                        Res::Reject => {}
                    }
                }
            }
            // lambdas and fixes are checked forms: they synthesize nothing
            _ => {}
        }

        // close under /\E1 and /\E2 projections, breadth-first
        let mut i = 0;
        while i < stream.items.len() {
            if let Type::Intersect(a, b) = stream.items[i].0.clone() {
                let parent = stream.items[i].1.clone();
                for (rule, part) in [(Rule::AndE1, (*a).clone()), (Rule::AndE2, (*b).clone())] {
                    let d = self.node(
                        rule,
                        gamma,
                        delta,
                        e,
                        Direction::Synth,
                        &part,
                        vec![parent.clone()],
                        None,
                    );
                    stream.push(part, d);
                }
            }
            i += 1;
        }

        if !stream.exhausted && (!self.build() || stream.items.is_empty()) {
            self.synth_memo.insert(
                key,
                SynthMemo {
                    types: stream.items.iter().map(|(t, _)| t.clone()).collect(),
                },
            );
        }
        stream
    }
}

struct Stream {
    items: Vec<(Type, Option<Rc<Derivation>>)>,
    exhausted: bool,
}

impl Stream {
    fn push(&mut self, ty: Type, d: Option<Rc<Derivation>>) {
        if !self.items.iter().any(|(t, _)| *t == ty) {
            self.items.push((ty, d));
        }
    }
}

/// Union or bot reachable by stripping top-level intersections only; the
/// only shapes a left rule can ever expose.
fn left_decomposable(t: &Type) -> bool {
    match t {
        Type::Union(_, _) | Type::Bot => true,
        Type::Intersect(a, b) => left_decomposable(a) || left_decomposable(b),
        _ => false,
    }
}

/// Extend gamma with a binder, renaming it when the name is already
/// declared; returns the (possibly renamed) binder, body, and new context.
pub(crate) fn extend_gamma(
    gamma: &TypingContext,
    name: &str,
    space: VarSpace,
    ty: Type,
    body: &LNTerm,
) -> (String, LNTerm, TypingContext) {
    if !gamma.declares(name, space) {
        return (
            name.to_string(),
            body.clone(),
            gamma.extended(name, space, ty),
        );
    }
    let mut fresh = String::new();
    for i in 0.. {
        fresh = format!("{name}_{i}");
        if !gamma.declares(&fresh, space) {
            break;
        }
    }
    let rep = match space {
        VarSpace::Ord => LNTerm::Var(fresh.clone()),
        VarSpace::Fix => LNTerm::FixVar(fresh.clone()),
    };
    let target = match space {
        VarSpace::Ord => crate::syntax::VarRef::Ord(name),
        VarSpace::Fix => crate::syntax::VarRef::Fix(name),
    };
    let body2 = crate::syntax::subst(body, target, &rep);
    (fresh.clone(), body2, gamma.extended(&fresh, space, ty))
}

// ---------------------------------------------------------------------------
// spec-level entry points

/// Check a (let-free) subject against a type in the tridirectional system.
pub fn tri_check(
    gamma: &TypingContext,
    delta: &LinearContext,
    e: &LNTerm,
    goal: &Type,
    cfg: &CheckConfig,
) -> Result<CheckOutcome, CheckError> {
    TriChecker::new(cfg.clone()).check(gamma, delta, e, goal)
}

/// Check a source term under empty linear assumptions.
pub fn tri_check_term(
    gamma: &TypingContext,
    e: &Term,
    goal: &Type,
    cfg: &CheckConfig,
) -> Result<CheckOutcome, CheckError> {
    tri_check(gamma, &LinearContext::empty(), &LNTerm::from(e), goal, cfg)
}

/// Synthesis stream for a (let-free) subject.
pub fn tri_synth(
    gamma: &TypingContext,
    delta: &LinearContext,
    e: &LNTerm,
    cfg: &CheckConfig,
) -> Result<SynthOutcome, CheckError> {
    TriChecker::new(cfg.clone()).synth(gamma, delta, e)
}
