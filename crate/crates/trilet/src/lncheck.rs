//! The let-normal typechecker: rules let, let†, and †var on top of the
//! tridirectional rule set minus directL.
//!
//! Implemented independently of the tridirectional checker on purpose: the
//! differential harness compares the two, so they must not share search
//! code.

use std::collections::HashMap;
use std::rc::Rc;

use crate::derivation::{ctx_anno_satisfied, memo_key, Derivation, Direction, Judgment, Rule};
use crate::subtyping::{subtype, subtype_derive};
use crate::syntax::{
    count_linear, ok_delta, ok_gamma, split_delta, LNTerm, LinEntry, LinearContext, Type,
    TypingContext, VarSpace,
};
use crate::transform::wf_letnormal;
pub use crate::tri::{CheckConfig, CheckError, CheckOutcome, Decision, Strategy, SynthOutcome};

/// Knobs specific to the let-normal system.
#[derive(Clone, Debug, Default)]
pub struct LnOptions {
    /// Test hook: at rule `let` with a variable right-hand side, skip the
    /// declared (principal) type and offer only its proper projections.
    pub let_var_projections_only: bool,
}

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

/// A reusable let-normal checker; memo persists across calls, fuel is per
/// call.
pub struct LnChecker {
    cfg: CheckConfig,
    opts: LnOptions,
    memo: HashMap<String, MemoVal>,
    synth_memo: HashMap<String, Vec<Type>>,
    fuel_left: u64,
}

impl LnChecker {
    pub fn new(cfg: CheckConfig) -> LnChecker {
        LnChecker::with_options(cfg, LnOptions::default())
    }

    pub fn with_options(cfg: CheckConfig, opts: LnOptions) -> LnChecker {
        LnChecker {
            cfg,
            opts,
            memo: HashMap::new(),
            synth_memo: HashMap::new(),
            fuel_left: 0,
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
        if !wf_letnormal(e) {
            return Err(CheckError::IllFormed(format!(
                "subject is not well-formed let-normal: {e}"
            )));
        }
        for entry in &delta.entries {
            if let LinEntry::Slack { value, .. } = entry {
                if !matches!(value, LNTerm::Anno(v, _) if v.is_value()) {
                    return Err(CheckError::IllFormed(
                        "slack entry value is not an annotated value".into(),
                    ));
                }
            }
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

    /// Γ; Δ ⊢ e ⇓ C in the let-normal system.
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

    pub fn synth(
        &mut self,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
    ) -> Result<SynthOutcome, CheckError> {
        self.validate_input(gamma, delta, e)?;
        self.fuel_left = self.cfg.fuel;
        let s = self.synth_in(gamma, delta, e);
        Ok(SynthOutcome {
            types: s.items,
            fuel_exhausted: s.exhausted,
        })
    }

    // ------------------------------------------------------------------

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
            _ => unreachable!(),
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
            } => (
                var.clone(),
                if first { (**a).clone() } else { (**b).clone() },
            ),
            _ => unreachable!(),
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

    /// Rule †var: discharge the slack entry at `idx`, synthesizing a type
    /// for its stored value and rebinding the variable linearly.
    fn slack_var(
        &mut self,
        idx: usize,
        gamma: &TypingContext,
        delta: &LinearContext,
        e: &LNTerm,
        goal: &Type,
    ) -> Res {
        let (var, value) = match &delta.entries[idx] {
            LinEntry::Slack { var, value } => (var.clone(), value.clone()),
            _ => unreachable!(),
        };
        let remaining = delta.without_entry(idx);
        let (d1ctx, d2ctx) = split_delta(&remaining, &value);
        let stream = self.synth_in(gamma, &d1ctx, &value);
        let mut fuel_hit = stream.exhausted;
        for (ty, syn_d) in &stream.items {
            let rebound = d2ctx.pushed(LinEntry::Linear {
                var: var.clone(),
                ty: ty.clone(),
            });
            match self.check_in(gamma, &rebound, e, goal) {
                Res::Accept(d2) => {
                    return Res::Accept(self.node(
                        Rule::SlackVar,
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
        if fuel_hit {
            Res::Fuel
        } else {
            Res::Reject
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
            if delta
                .entries
                .iter()
                .any(|en| matches!(en, LinEntry::Linear { ty: Type::Bot, .. }))
            {
                return self.bot_leaf(gamma, delta, e, goal);
            }
            if let Some(idx) = delta
                .entries
                .iter()
                .position(|en| matches!(en, LinEntry::Linear { ty: Type::Union(_, _), .. }))
            {
                return self.or_l(idx, gamma, delta, e, goal);
            }
        }

        let mut fuel_hit = false;

        if !heuristic {
            for idx in 0..delta.entries.len() {
                match &delta.entries[idx] {
                    LinEntry::Linear { ty: Type::Bot, .. } => {
                        match self.bot_leaf(gamma, delta, e, goal) {
                            Res::Accept(d) => return Res::Accept(d),
                            Res::Fuel => fuel_hit = true,
                            Res::Reject => {}
                        }
                    }
                    LinEntry::Linear {
                        ty: Type::Union(_, _),
                        ..
                    } => match self.or_l(idx, gamma, delta, e, goal) {
                        Res::Accept(d) => return Res::Accept(d),
                        Res::Fuel => fuel_hit = true,
                        Res::Reject => {}
                    },
                    _ => {}
                }
            }
        }

        // syntax-directed rule for the subject's head
        match e {
            LNTerm::Let(x, rhs, body) => {
                // rule let: synthesize the right-hand side, bind, check the
                // body; backtracking over the synthesis stream
                let (d1ctx, d2ctx) = split_delta(delta, rhs);
                let stream = self.synth_in(gamma, &d1ctx, rhs);
                if stream.exhausted {
                    fuel_hit = true;
                }
                for (ty, syn_d) in &stream.items {
                    if self.opts.let_var_projections_only && matches!(&**rhs, LNTerm::Var(_)) {
                        // test hook: refuse the declared type, keep projections
                        if let LNTerm::Var(name) = &**rhs {
                            if gamma.lookup_ord(name) == Some(ty) {
                                continue;
                            }
                        }
                    }
                    let extended = d2ctx.pushed(LinEntry::Linear {
                        var: x.clone(),
                        ty: ty.clone(),
                    });
                    match self.check_in(gamma, &extended, body, goal) {
                        Res::Accept(d2) => {
                            return Res::Accept(self.node(
                                Rule::Let,
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
            LNTerm::SlackLet(x, rhs, body) => {
                // rule let†: move the binding into Δ without synthesizing
                let extended = delta.pushed(LinEntry::Slack {
                    var: x.clone(),
                    value: (**rhs).clone(),
                });
                match self.check_in(gamma, &extended, body, goal) {
                    Res::Accept(d) => {
                        return Res::Accept(self.node(
                            Rule::LetSlack,
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
            LNTerm::Lam(x, body) => {
                if let Type::Arrow(dom, cod) = goal {
                    if delta.is_empty() {
                        let (_, body2, gamma2) = crate::tri::extend_gamma(
                            gamma,
                            x,
                            VarSpace::Ord,
                            (**dom).clone(),
                            body,
                        );
                        match self.check_in(&gamma2, delta, &body2, cod) {
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
                    let (_, body2, gamma2) =
                        crate::tri::extend_gamma(gamma, u, VarSpace::Fix, goal.clone(), body);
                    match self.check_in(&gamma2, delta, &body2, goal) {
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
                match self.check_in(gamma, delta, e, part) {
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

        // intersection introduction on values
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

        // /\L on intersection assumptions
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
                match self.and_l(idx, first, gamma, delta, e, goal) {
                    Res::Accept(d) => return Res::Accept(d),
                    Res::Fuel => fuel_hit = true,
                    Res::Reject => {}
                }
            }
        }

        // †var: discharge any slack entry whose variable occurs in the
        // subject, backtracking over discharge points
        for idx in 0..delta.entries.len() {
            let live = match &delta.entries[idx] {
                LinEntry::Slack { var, .. } => count_linear(e, var) > 0,
                _ => false,
            };
            if !live {
                continue;
            }
            match self.slack_var(idx, gamma, delta, e, goal) {
                Res::Accept(d) => return Res::Accept(d),
                Res::Fuel => fuel_hit = true,
                Res::Reject => {}
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
        if let Some(types) = self.synth_memo.get(&key) {
            if !self.build() {
                return Stream {
                    items: types.iter().cloned().map(|t| (t, None)).collect(),
                    exhausted: false,
                };
            } else if types.is_empty() {
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
            // lambdas, fixes, and lets are checked forms
            _ => {}
        }

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
            self.synth_memo
                .insert(key, stream.items.iter().map(|(t, _)| t.clone()).collect());
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

fn left_decomposable(t: &Type) -> bool {
    match t {
        Type::Union(_, _) | Type::Bot => true,
        Type::Intersect(a, b) => left_decomposable(a) || left_decomposable(b),
        _ => false,
    }
}

// ---------------------------------------------------------------------------
// spec-level entry points

pub fn ln_check(
    gamma: &TypingContext,
    delta: &LinearContext,
    e: &LNTerm,
    goal: &Type,
    cfg: &CheckConfig,
) -> Result<CheckOutcome, CheckError> {
    LnChecker::new(cfg.clone()).check(gamma, delta, e, goal)
}

pub fn ln_synth(
    gamma: &TypingContext,
    delta: &LinearContext,
    e: &LNTerm,
    cfg: &CheckConfig,
) -> Result<SynthOutcome, CheckError> {
    LnChecker::new(cfg.clone()).synth(gamma, delta, e)
}
