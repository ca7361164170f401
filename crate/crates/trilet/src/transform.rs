//! The let-normal translation, its reverse (unwinding), well-formedness of
//! let-normal terms, and the canonicality measure.

use std::collections::HashMap;

use crate::syntax::{
    classify, classify_term, subst, Classification, FromLNError, LNTerm, NameGen, Term, VarRef,
};

/// One translation binding: ordinary `x̄ = e` or slack `x̄ † v`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Binding {
    Bind { var: String, rhs: LNTerm },
    SlackBind { var: String, rhs: LNTerm },
}

impl Binding {
    pub fn var(&self) -> &str {
        match self {
            Binding::Bind { var, .. } | Binding::SlackBind { var, .. } => var,
        }
    }

    pub fn rhs(&self) -> &LNTerm {
        match self {
            Binding::Bind { rhs, .. } | Binding::SlackBind { rhs, .. } => rhs,
        }
    }

    pub fn is_slack(&self) -> bool {
        matches!(self, Binding::SlackBind { .. })
    }
}

/// An ordered sequence of bindings L.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BindingSeq(pub Vec<Binding>);

impl BindingSeq {
    pub fn empty() -> BindingSeq {
        BindingSeq::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Translate a source term: e ↪ L + e'.
///
/// Fresh linear names are drawn left to right (x^0, x^1, …) so output is
/// reproducible bit for bit.
pub fn translate(e: &Term) -> (BindingSeq, LNTerm) {
    let mut names = NameGen::new("x^");
    translate_with(e, &mut names)
}

pub fn translate_with(e: &Term, names: &mut NameGen) -> (BindingSeq, LNTerm) {
    match e {
        // variables bind themselves: x ↪ (x̄ = x) + x̄
        Term::Var(x) => {
            let v = names.fresh();
            (
                BindingSeq(vec![Binding::Bind {
                    var: v.clone(),
                    rhs: LNTerm::Var(x.clone()),
                }]),
                LNTerm::LinVar(v),
            )
        }
        // fix variables synthesize, so they are named too
        Term::FixVar(u) => {
            let v = names.fresh();
            (
                BindingSeq(vec![Binding::Bind {
                    var: v.clone(),
                    rhs: LNTerm::FixVar(u.clone()),
                }]),
                LNTerm::LinVar(v),
            )
        }
        // checked forms wrap their translated bodies and float nothing out
        Term::Lam(x, body) => {
            let (l, b) = translate_with(body, names);
            (
                BindingSeq::empty(),
                LNTerm::Lam(x.clone(), Box::new(embed(&l, b))),
            )
        }
        Term::Fix(u, body) => {
            let (l, b) = translate_with(body, names);
            (
                BindingSeq::empty(),
                LNTerm::Fix(u.clone(), Box::new(embed(&l, b))),
            )
        }
        Term::App(e1, e2) => {
            let (l1, b1) = translate_with(e1, names);
            let (l2, b2) = translate_with(e2, names);
            let v = names.fresh();
            match classify_term(e1) {
                // an anti-value function seals the argument's bindings
                // inside the argument position
                Classification::AntiValue => {
                    let arg = embed(&l2, b2);
                    let mut seq = l1;
                    seq.0.push(Binding::Bind {
                        var: v.clone(),
                        rhs: LNTerm::App(Box::new(b1), Box::new(arg)),
                    });
                    (seq, LNTerm::LinVar(v))
                }
                // a pre-value function lets both sequences float out
                Classification::PreValue => {
                    let mut seq = l1;
                    seq.0.extend(l2.0);
                    seq.0.push(Binding::Bind {
                        var: v.clone(),
                        rhs: LNTerm::App(Box::new(b1), Box::new(b2)),
                    });
                    (seq, LNTerm::LinVar(v))
                }
            }
        }
        Term::Anno(inner, annos) => {
            let (l, b) = translate_with(inner, names);
            let v = names.fresh();
            let rhs = LNTerm::Anno(Box::new(b), annos.clone());
            let binding = if inner.is_value() {
                // annotated values get slack bindings: their type is
                // synthesized at discharge time, not at the binding site
                Binding::SlackBind {
                    var: v.clone(),
                    rhs,
                }
            } else {
                Binding::Bind {
                    var: v.clone(),
                    rhs,
                }
            };
            let mut seq = l;
            seq.0.push(binding);
            (seq, LNTerm::LinVar(v))
        }
    }
}

/// L ⟨in⟩ e: right-nest the bindings around the body. embed(·, e) = e.
pub fn embed(l: &BindingSeq, body: LNTerm) -> LNTerm {
    l.0.iter().rev().fold(body, |acc, b| match b {
        Binding::Bind { var, rhs } => {
            LNTerm::Let(var.clone(), Box::new(rhs.clone()), Box::new(acc))
        }
        Binding::SlackBind { var, rhs } => {
            LNTerm::SlackLet(var.clone(), Box::new(rhs.clone()), Box::new(acc))
        }
    })
}

/// Translate and embed in one step.
pub fn translate_embed(e: &Term) -> LNTerm {
    let (l, body) = translate(e);
    embed(&l, body)
}

/// Reverse translation: substitute each binding's unwound right-hand side
/// for its linear variable in the unwound body. Slack bindings unwind like
/// ordinary ones.
pub fn unwind(e: &LNTerm) -> Result<Term, FromLNError> {
    let flat = unwind_ln(e);
    Term::try_from(&flat)
}

fn unwind_ln(e: &LNTerm) -> LNTerm {
    match e {
        LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => e.clone(),
        LNTerm::Lam(x, b) => LNTerm::Lam(x.clone(), Box::new(unwind_ln(b))),
        LNTerm::Fix(u, b) => LNTerm::Fix(u.clone(), Box::new(unwind_ln(b))),
        LNTerm::App(f, a) => LNTerm::App(Box::new(unwind_ln(f)), Box::new(unwind_ln(a))),
        LNTerm::Anno(inner, annos) => {
            LNTerm::Anno(Box::new(unwind_ln(inner)), annos.clone())
        }
        LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) => {
            let rhs = unwind_ln(r);
            let body = unwind_ln(b);
            subst(&body, VarRef::Lin(x), &rhs)
        }
    }
}

/// Well-formed let-normal terms: every let body is Q[x̄] for its own bound
/// variable (with exactly one occurrence), and slack right-hand sides are
/// annotated values.
pub fn wf_letnormal(e: &LNTerm) -> bool {
    match e {
        LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => true,
        LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => wf_letnormal(b),
        LNTerm::App(f, a) => wf_letnormal(f) && wf_letnormal(a),
        LNTerm::Anno(inner, _) => wf_letnormal(inner),
        LNTerm::Let(x, r, b) => {
            crate::syntax::body_is_q_of(b, x) && wf_letnormal(r) && wf_letnormal(b)
        }
        LNTerm::SlackLet(x, r, b) => {
            matches!(&**r, LNTerm::Anno(v, _) if v.is_value())
                && crate::syntax::body_is_q_of(b, x)
                && wf_letnormal(r)
                && wf_letnormal(b)
        }
    }
}

/// The canonicality measure ⟨unbound⇑, brittle, prickly, transposed⟩,
/// compared lexicographically. All zeroes exactly at the image of the
/// translation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord)]
pub struct Measure {
    pub unbound_synth: usize,
    pub brittle: usize,
    pub prickly: usize,
    pub transposed: usize,
}

impl Measure {
    pub fn is_zero(&self) -> bool {
        *self == Measure::default()
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{} {} {} {}",
            self.unbound_synth, self.brittle, self.prickly, self.transposed
        )
    }
}

pub fn measure(e: &LNTerm) -> Measure {
    Measure {
        unbound_synth: count_unbound_synth(e, false),
        brittle: count_brittle(e, &mut Vec::new()),
        prickly: count_prickly(e, true),
        transposed: count_transposed(e),
    }
}

/// Subterms in synthesizing form (x, u, applications, annotated terms) that
/// are not the immediate right-hand side of a binding. Linear variables are
/// already names and do not count.
fn count_unbound_synth(e: &LNTerm, is_rhs: bool) -> usize {
    let own = usize::from(
        !is_rhs
            && matches!(
                e,
                LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::App(_, _) | LNTerm::Anno(_, _)
            ),
    );
    own + match e {
        LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => 0,
        LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => count_unbound_synth(b, false),
        LNTerm::App(f, a) => count_unbound_synth(f, false) + count_unbound_synth(a, false),
        LNTerm::Anno(inner, _) => count_unbound_synth(inner, false),
        LNTerm::Let(_, r, b) | LNTerm::SlackLet(_, r, b) => {
            count_unbound_synth(r, true) + count_unbound_synth(b, false)
        }
    }
}

/// Ordinary bindings of the form let x̄ = (v : As) whose annotated subject
/// stands for a value — these correspond to slack bindings in the
/// translation and need to be slackened.
///
/// "Stands for a value" reads the subject through the bindings in scope: a
/// linear variable bound to an application does not become a value when
/// substituted back, so a binding like `let ā = (z̄ : As)` arising from an
/// annotated application is not brittle, while `let ā = (x̄ : As)` with
/// `x̄ = x` is.
fn count_brittle(e: &LNTerm, env: &mut Vec<(String, LNTerm)>) -> usize {
    match e {
        LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => 0,
        LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => count_brittle(b, env),
        LNTerm::App(f, a) => count_brittle(f, env) + count_brittle(a, env),
        LNTerm::Anno(inner, _) => count_brittle(inner, env),
        LNTerm::Let(x, r, b) => {
            let own = match &**r {
                LNTerm::Anno(v, _) if v.is_value() && stands_for_value(v, env) => 1,
                _ => 0,
            };
            let inner_rhs = count_brittle(r, env);
            env.push((x.clone(), (**r).clone()));
            let inner_body = count_brittle(b, env);
            env.pop();
            own + inner_rhs + inner_body
        }
        LNTerm::SlackLet(x, r, b) => {
            let inner_rhs = count_brittle(r, env);
            env.push((x.clone(), (**r).clone()));
            let inner_body = count_brittle(b, env);
            env.pop();
            inner_rhs + inner_body
        }
    }
}

fn stands_for_value(v: &LNTerm, env: &[(String, LNTerm)]) -> bool {
    match v {
        LNTerm::Var(_) | LNTerm::Lam(_, _) => true,
        LNTerm::Anno(inner, _) => stands_for_value(inner, env),
        LNTerm::LinVar(x) => match env.iter().rev().find(|(n, _)| n == x) {
            Some((_, rhs)) => stands_for_value(rhs, env),
            None => true, // free linear variables are values
        },
        LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) => {
            // unwinding replaces the variable with the rhs inside the body
            let mut env2 = env.to_vec();
            env2.push((x.clone(), (**r).clone()));
            stands_for_value(b, &env2)
        }
        _ => false,
    }
}

/// Bindings not collected at a root. Roots are the places the translation
/// may leave a binding sequence: the top of the whole term, the top of each
/// lambda or fix body, and the top of an application argument whose
/// function part is an anti-value.
fn count_prickly(e: &LNTerm, at_root: bool) -> usize {
    match e {
        LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => 0,
        LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => count_prickly(b, true),
        LNTerm::App(f, a) => {
            let arg_root = classify(f) == Classification::AntiValue;
            count_prickly(f, false) + count_prickly(a, arg_root)
        }
        LNTerm::Anno(inner, _) => count_prickly(inner, false),
        LNTerm::Let(_, r, b) | LNTerm::SlackLet(_, r, b) => {
            usize::from(!at_root) + count_prickly(r, false) + count_prickly(b, at_root)
        }
    }
}

/// Transposed variable pairs, counted per binding sequence: two variables
/// of one sequence whose unique uses sit in the same host (a later binding's
/// right-hand side or the sequence body) in the opposite order to their
/// bindings.
fn count_transposed(e: &LNTerm) -> usize {
    match e {
        LNTerm::Var(_) | LNTerm::FixVar(_) | LNTerm::LinVar(_) => 0,
        LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => count_transposed(b),
        LNTerm::App(f, a) => count_transposed(f) + count_transposed(a),
        LNTerm::Anno(inner, _) => count_transposed(inner),
        LNTerm::Let(_, _, _) | LNTerm::SlackLet(_, _, _) => {
            // collect the maximal chain starting here
            let mut vars: Vec<String> = Vec::new();
            let mut hosts: Vec<&LNTerm> = Vec::new(); // rhs of each binding
            let mut cur = e;
            while let LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) = cur {
                vars.push(x.clone());
                hosts.push(r);
                cur = b;
            }
            let body = cur;
            // a variable's unique use lives in some later rhs or in the body;
            // find (host index, preorder position)
            let mut usage: HashMap<String, (usize, usize)> = HashMap::new();
            for (i, var) in vars.iter().enumerate() {
                for (j, rhs) in hosts.iter().enumerate().skip(i + 1) {
                    if let Some(pos) = preorder_position(rhs, var) {
                        usage.insert(var.clone(), (j, pos));
                        break;
                    }
                }
                if !usage.contains_key(var) {
                    if let Some(pos) = preorder_position(body, var) {
                        usage.insert(var.clone(), (hosts.len(), pos));
                    }
                }
            }
            let mut count = 0;
            for i in 0..vars.len() {
                for j in (i + 1)..vars.len() {
                    if let (Some(&(hi, pi)), Some(&(hj, pj))) =
                        (usage.get(&vars[i]), usage.get(&vars[j]))
                    {
                        if hi == hj && pj < pi {
                            count += 1;
                        }
                    }
                }
            }
            // recurse into every right-hand side and the final body
            count
                + hosts.iter().map(|r| count_transposed(r)).sum::<usize>()
                + count_transposed(body)
        }
    }
}

/// Pre-order position of the (free) occurrence of `var` in `e`, if any.
fn preorder_position(e: &LNTerm, var: &str) -> Option<usize> {
    fn walk(e: &LNTerm, var: &str, pos: &mut usize, shadowed: bool) -> Option<usize> {
        let here = *pos;
        *pos += 1;
        match e {
            LNTerm::LinVar(x) if x == var && !shadowed => Some(here),
            LNTerm::LinVar(_) | LNTerm::Var(_) | LNTerm::FixVar(_) => None,
            LNTerm::Lam(_, b) | LNTerm::Fix(_, b) => walk(b, var, pos, shadowed),
            LNTerm::App(f, a) => {
                walk(f, var, pos, shadowed).or_else(|| walk(a, var, pos, shadowed))
            }
            LNTerm::Anno(inner, _) => walk(inner, var, pos, shadowed),
            LNTerm::Let(x, r, b) | LNTerm::SlackLet(x, r, b) => {
                walk(r, var, pos, shadowed)
                    .or_else(|| walk(b, var, pos, shadowed || x == var))
            }
        }
    }
    walk(e, var, &mut 0, false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::{alpha_eq_term, ContextualAnnotation, Type};

    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn translate_nested_application() {
        // f (x y) ↪ f̄=f, x̄=x, ȳ=y, z̄=x̄ ȳ, ā=f̄ z̄ + ā
        let e = Term::app(v("f"), Term::app(v("x"), v("y")));
        let (l, body) = translate(&e);
        assert_eq!(body, LNTerm::linvar("x^4"));
        let expect = vec![
            ("x^0", LNTerm::var("f"), false),
            ("x^1", LNTerm::var("x"), false),
            ("x^2", LNTerm::var("y"), false),
            (
                "x^3",
                LNTerm::app(LNTerm::linvar("x^1"), LNTerm::linvar("x^2")),
                false,
            ),
            (
                "x^4",
                LNTerm::app(LNTerm::linvar("x^0"), LNTerm::linvar("x^3")),
                false,
            ),
        ];
        assert_eq!(l.len(), expect.len());
        for (b, (var, rhs, slack)) in l.0.iter().zip(expect) {
            assert_eq!(b.var(), var);
            assert_eq!(*b.rhs(), rhs);
            assert_eq!(b.is_slack(), slack);
        }
    }

    #[test]
    fn translate_lambda() {
        let e = Term::lam("x", v("x"));
        let (l, body) = translate(&e);
        assert!(l.is_empty());
        assert_eq!(
            body,
            LNTerm::lam("x", LNTerm::let_("x^0", LNTerm::var("x"), LNTerm::linvar("x^0")))
        );
    }

    #[test]
    fn translate_anti_value_application_nests_argument() {
        // (fix u.u)(w x): argument bindings sit inside the application argument
        let e = Term::app(
            Term::fix("u", Term::fixvar("u")),
            Term::app(v("w"), v("x")),
        );
        let (l, body) = translate(&e);
        assert_eq!(l.len(), 1, "one outer binding only");
        let binding = &l.0[0];
        assert_eq!(body, LNTerm::LinVar(binding.var().to_string()));
        match binding.rhs() {
            LNTerm::App(f, a) => {
                assert!(matches!(&**f, LNTerm::Fix(_, _)));
                // the argument is a let chain binding w, x, and w x
                let mut lets = 0;
                let mut cur = &**a;
                while let LNTerm::Let(_, _, b) = cur {
                    lets += 1;
                    cur = b;
                }
                assert_eq!(lets, 3);
                assert!(matches!(cur, LNTerm::LinVar(_)));
            }
            other => panic!("expected application rhs, got {other:?}"),
        }
    }

    #[test]
    fn translate_value_annotation_is_slack() {
        // ((fn x => x) : int -> int) y
        let anno = ContextualAnnotation::plain(Type::arrow(Type::base("int"), Type::base("int")));
        let e = Term::app(
            Term::anno(Term::lam("x", v("x")), vec![anno]),
            v("y"),
        );
        let (l, body) = translate(&e);
        assert_eq!(l.len(), 3);
        assert!(l.0[0].is_slack(), "annotated value must be slack-bound");
        assert!(!l.0[1].is_slack());
        assert!(!l.0[2].is_slack());
        match l.0[2].rhs() {
            LNTerm::App(f, a) => {
                assert_eq!(**f, LNTerm::LinVar(l.0[0].var().to_string()));
                assert_eq!(**a, LNTerm::LinVar(l.0[1].var().to_string()));
            }
            other => panic!("expected application, got {other:?}"),
        }
        assert_eq!(body, LNTerm::LinVar(l.0[2].var().to_string()));
    }

    #[test]
    fn embed_shapes() {
        let l = BindingSeq(vec![
            Binding::Bind {
                var: "x^0".into(),
                rhs: LNTerm::var("a"),
            },
            Binding::Bind {
                var: "x^1".into(),
                rhs: LNTerm::var("b"),
            },
        ]);
        let out = embed(&l, LNTerm::linvar("x^1"));
        assert_eq!(
            out,
            LNTerm::let_(
                "x^0",
                LNTerm::var("a"),
                LNTerm::let_("x^1", LNTerm::var("b"), LNTerm::linvar("x^1"))
            )
        );
        assert_eq!(embed(&BindingSeq::empty(), LNTerm::linvar("x^0")), LNTerm::linvar("x^0"));
        let slack = BindingSeq(vec![Binding::SlackBind {
            var: "x^0".into(),
            rhs: LNTerm::anno(
                LNTerm::lam("x", LNTerm::var("x")),
                vec![ContextualAnnotation::plain(Type::base("P"))],
            ),
        }]);
        assert!(matches!(
            embed(&slack, LNTerm::linvar("x^0")),
            LNTerm::SlackLet(_, _, _)
        ));
    }

    #[test]
    fn unwind_simple() {
        let e = LNTerm::let_("x^0", LNTerm::var("x"), LNTerm::linvar("x^0"));
        assert_eq!(unwind(&e).unwrap(), v("x"));
    }

    #[test]
    fn unwind_round_trip() {
        let e = Term::app(v("f"), Term::app(v("x"), v("y")));
        let back = unwind(&translate_embed(&e)).unwrap();
        assert!(alpha_eq_term(&back, &e));
    }

    #[test]
    fn unwind_reports_escaped_linear_variables() {
        let e = LNTerm::slack_let(
            "x^0",
            LNTerm::anno(
                LNTerm::lam("x", LNTerm::var("x")),
                vec![ContextualAnnotation::plain(Type::base("P"))],
            ),
            LNTerm::app(LNTerm::linvar("x^0"), LNTerm::linvar("y^9")),
        );
        assert_eq!(
            unwind(&e),
            Err(FromLNError::UnboundLinear("y^9".into()))
        );
    }

    #[test]
    fn wf_cases() {
        assert!(wf_letnormal(&LNTerm::let_(
            "x^0",
            LNTerm::var("x"),
            LNTerm::linvar("x^0")
        )));
        // x̄ under a lambda is not in elongated position
        assert!(!wf_letnormal(&LNTerm::let_(
            "x^0",
            LNTerm::var("x"),
            LNTerm::lam("y", LNTerm::linvar("x^0"))
        )));
    }

    #[test]
    fn measure_of_canonical_translation_is_zero() {
        let cases = vec![
            v("x"),
            Term::lam("x", v("x")),
            Term::app(v("f"), Term::app(v("x"), v("y"))),
            Term::app(Term::fix("u", Term::fixvar("u")), Term::app(v("w"), v("x"))),
            Term::app(
                Term::anno(
                    Term::lam("x", v("x")),
                    vec![ContextualAnnotation::plain(Type::arrow(
                        Type::base("P"),
                        Type::base("P"),
                    ))],
                ),
                v("y"),
            ),
            // annotated application: ordinary binding of an annotated
            // linear variable, still canonical
            Term::anno(
                Term::app(v("f"), v("x")),
                vec![ContextualAnnotation::plain(Type::base("P"))],
            ),
        ];
        for e in cases {
            let t = translate_embed(&e);
            assert!(wf_letnormal(&t), "not wf: {t}");
            let m = measure(&t);
            assert!(m.is_zero(), "measure {m} for {t}");
        }
    }

    #[test]
    fn prickly_binding_inside_argument() {
        // let ā = c (let ȳ=y in ȳ) in ā
        let e = LNTerm::let_(
            "a^0",
            LNTerm::app(
                LNTerm::var("c"),
                LNTerm::let_("y^0", LNTerm::var("y"), LNTerm::linvar("y^0")),
            ),
            LNTerm::linvar("a^0"),
        );
        assert_eq!(measure(&e).prickly, 1);
    }

    #[test]
    fn transposed_pair() {
        // let ȳ=y in let x̄=x in x̄ ȳ
        let e = LNTerm::let_(
            "y^0",
            LNTerm::var("y"),
            LNTerm::let_(
                "x^0",
                LNTerm::var("x"),
                LNTerm::app(LNTerm::linvar("x^0"), LNTerm::linvar("y^0")),
            ),
        );
        let m = measure(&e);
        assert_eq!(m.transposed, 1);
        // the canonical order is not transposed
        let ok = LNTerm::let_(
            "x^0",
            LNTerm::var("x"),
            LNTerm::let_(
                "y^0",
                LNTerm::var("y"),
                LNTerm::app(LNTerm::linvar("x^0"), LNTerm::linvar("y^0")),
            ),
        );
        assert_eq!(measure(&ok).transposed, 0);
    }

    #[test]
    fn unbound_synthesizing_subterms_counted() {
        // bare f x: both the variables and the application are unbound
        let e = LNTerm::app(LNTerm::var("f"), LNTerm::var("x"));
        assert_eq!(measure(&e).unbound_synth, 3);
    }
}
