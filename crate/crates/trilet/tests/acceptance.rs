//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (visible with `cargo test --test acceptance -- --nocapture`).

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trilet::derivation::{validate, System};
use trilet::differ::{
    enumerate_terms, enumerate_types, gen_random_term, run_differential, DifferOptions, Signature,
};
use trilet::eval::{eval, EvalResult};
use trilet::lncheck::{LnChecker, LnOptions};
use trilet::pretty::print_term;
use trilet::subtyping::subtype;
use trilet::syntax::{
    alpha_eq_term, LNTerm, LinearContext, Term, Type, TypingContext, VarSpace,
};
use trilet::transform::{measure, translate, translate_embed, unwind, wf_letnormal};
use trilet::tri::{CheckConfig, CheckOutcome, Decision, TriChecker};

fn atom(n: &str) -> Type {
    Type::base(n)
}

fn pass(n: usize, what: &str) {
    println!("ACCEPTANCE {n} PASS - {what}");
}

fn map_filter_prelude() -> TypingContext {
    let int = atom("int");
    let s = atom("s");
    let n = atom("n");
    let mut gamma = TypingContext::empty();
    gamma
        .push(
            "map",
            VarSpace::Ord,
            Type::arrow(
                Type::arrow(int.clone(), int.clone()),
                Type::inter(
                    Type::arrow(s.clone(), s.clone()),
                    Type::arrow(n.clone(), n.clone()),
                ),
            ),
        )
        .unwrap();
    gamma
        .push("f", VarSpace::Ord, Type::arrow(int.clone(), int.clone()))
        .unwrap();
    gamma
        .push(
            "filter",
            VarSpace::Ord,
            Type::arrow(int, Type::union(s, n)),
        )
        .unwrap();
    gamma.push("n", VarSpace::Ord, atom("int")).unwrap();
    gamma
}

#[test]
fn criterion_1_worked_example_checks_in_both_systems() {
    let started = Instant::now();
    let gamma = map_filter_prelude();
    let term = Term::app(
        Term::app(Term::var("map"), Term::var("f")),
        Term::app(Term::var("filter"), Term::var("n")),
    );
    let goal = Type::union(atom("s"), atom("n"));
    let cfg = CheckConfig::default().with_fuel(10_000);

    let mut tri = TriChecker::new(cfg.clone());
    let tri_out = tri
        .check(&gamma, &LinearContext::empty(), &LNTerm::from(&term), &goal)
        .unwrap();
    let tri_deriv = match tri_out {
        CheckOutcome::Accept(d) => d,
        other => panic!("tridirectional system did not accept: {other:?}"),
    };
    validate(&tri_deriv, System::Tri).unwrap();
    assert!(tri.fuel_used() <= 10_000);

    let translated = translate_embed(&term);
    let mut ln = LnChecker::new(cfg);
    let ln_out = ln
        .check(&gamma, &LinearContext::empty(), &translated, &goal)
        .unwrap();
    let ln_deriv = match ln_out {
        CheckOutcome::Accept(d) => d,
        other => panic!("let-normal system did not accept: {other:?}"),
    };
    validate(&ln_deriv, System::LetNormal).unwrap();
    assert!(ln.fuel_used() <= 10_000);

    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "worked example took {elapsed:?}"
    );
    pass(
        1,
        &format!(
            "(map f)(filter n) <= s \\/ n accepts in both systems (tri fuel {}, let fuel {}, {:?})",
            tri.fuel_used(),
            ln.fuel_used(),
            elapsed
        ),
    );
}

#[test]
fn criterion_2_principal_synthesis_example() {
    let started = Instant::now();
    let a1 = atom("A1");
    let a2 = atom("A2");
    let b = atom("B");
    let mut gamma = TypingContext::empty();
    gamma
        .push(
            "x",
            VarSpace::Ord,
            Type::inter(
                Type::arrow(a1.clone(), b.clone()),
                Type::arrow(a2.clone(), b.clone()),
            ),
        )
        .unwrap();
    gamma
        .push("y", VarSpace::Ord, Type::union(a1, a2))
        .unwrap();
    let term = Term::app(Term::var("x"), Term::var("y"));

    let cfg = CheckConfig::default();
    let tri_out = trilet::tri_check_term(&gamma, &term, &b, &cfg).unwrap();
    assert!(tri_out.is_accept(), "tridirectional rejects x y <= B");

    let translated = translate_embed(&term);
    let ln_out =
        trilet::ln_check(&gamma, &LinearContext::empty(), &translated, &b, &cfg).unwrap();
    assert!(matches!(ln_out, CheckOutcome::Accept(_)), "let-normal rejects");

    // forcing the let-rule synthesis choice to a projection loses the
    // derivation: the only choice that works is the declared type
    let mut forced = LnChecker::with_options(
        cfg,
        LnOptions {
            let_var_projections_only: true,
        },
    );
    let forced_out = forced
        .check(&gamma, &LinearContext::empty(), &translated, &b)
        .unwrap();
    assert!(
        matches!(forced_out, CheckOutcome::Reject),
        "projection-forced run should reject, got {forced_out:?}"
    );

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0);
    pass(
        2,
        "x y <= B accepts in both systems and fails when the let rule is forced to a projection",
    );
}

#[test]
fn criterion_3_soundness_completeness_at_desk_scale() {
    let started = Instant::now();
    let sig = Signature::default(); // atoms {P,Q}, the five-entry prelude, size 7
    assert_eq!(sig.size_bound, 7);
    assert_eq!(sig.check_types.len(), 30); // depth <= 2 over two atoms
    let opts = DifferOptions {
        random_count: 500,
        random_size: 12,
        ..DifferOptions::default()
    };
    let report = run_differential(&sig, &opts);
    assert!(
        report.disagreements.is_empty(),
        "disagreements:\n{}",
        report.human_table()
    );
    assert!(report.agree_accept > 0);
    // the searches terminate on the corpus well inside the default fuel
    assert_eq!(report.fuel_exhausted, 0, "fuel is a safety net only");
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 600.0,
        "differential run took {elapsed:?}"
    );
    pass(
        3,
        &format!(
            "zero disagreements over {} cases ({} enumerated + {} random terms, {} accepts, {} fuel-exhausted) in {:?}",
            report.cases,
            report.exhaustive_terms,
            report.random_terms,
            report.agree_accept,
            report.fuel_exhausted,
            elapsed
        ),
    );
}

#[test]
fn criterion_4_translation_canonicality() {
    let sig = Signature::default();
    let enumerated = enumerate_terms(&sig);
    let mut corpus: Vec<Term> = enumerated.into_iter().take(800).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(sig.seed ^ 0x4444);
    while corpus.len() < 1000 {
        corpus.push(gen_random_term(&sig, &mut rng, 10));
    }
    assert_eq!(corpus.len(), 1000);
    let mut failures = 0;
    for e in &corpus {
        let t = translate_embed(e);
        let m = measure(&t);
        let round = unwind(&t);
        let ok = wf_letnormal(&t)
            && m.is_zero()
            && round.as_ref().map(|r| alpha_eq_term(r, e)).unwrap_or(false);
        if !ok {
            failures += 1;
            eprintln!(
                "canonicality failure for {}: measure {m}, wf {}",
                print_term(e),
                wf_letnormal(&t)
            );
        }
    }
    assert_eq!(failures, 0);
    pass(
        4,
        "1000 corpus terms translate to well-formed all-zero-measure forms that unwind back",
    );
}

#[test]
fn criterion_5_anti_value_nesting() {
    // translate((fix u.u)(w x)) must keep every binding for w x strictly
    // inside the application argument
    let term = Term::app(
        Term::fix("u", Term::fixvar("u")),
        Term::app(Term::var("w"), Term::var("x")),
    );
    let (l, body) = translate(&term);
    assert_eq!(l.len(), 1, "exactly one outer binding");
    let binding = &l.0[0];
    assert_eq!(body, LNTerm::LinVar(binding.var().to_string()));
    match binding.rhs() {
        LNTerm::App(f, arg) => {
            assert!(matches!(&**f, LNTerm::Fix(_, _)));
            // the argument is a three-element let chain ending in its own
            // bound variable: w, x, and w x are bound inside
            let mut rhss = Vec::new();
            let mut cur = &**arg;
            while let LNTerm::Let(_, r, b) = cur {
                rhss.push((**r).clone());
                cur = b;
            }
            assert_eq!(rhss.len(), 3);
            assert_eq!(rhss[0], LNTerm::var("w"));
            assert_eq!(rhss[1], LNTerm::var("x"));
            assert!(matches!(rhss[2], LNTerm::App(_, _)));
            assert!(matches!(cur, LNTerm::LinVar(_)));
        }
        other => panic!("expected an application right-hand side, got {other:?}"),
    }

    // and with w : int -> bot, x : int the term rejects in both systems
    let mut gamma = TypingContext::empty();
    gamma
        .push("w", VarSpace::Ord, Type::arrow(atom("int"), Type::Bot))
        .unwrap();
    gamma.push("x", VarSpace::Ord, atom("int")).unwrap();
    let cfg = CheckConfig::default();
    let goal = atom("int");
    let tri_out = trilet::tri_check_term(&gamma, &term, &goal, &cfg).unwrap();
    assert!(matches!(tri_out, CheckOutcome::Reject));
    let ln_out = trilet::ln_check(
        &gamma,
        &LinearContext::empty(),
        &translate_embed(&term),
        &goal,
        &cfg,
    )
    .unwrap();
    assert!(matches!(ln_out, CheckOutcome::Reject));
    pass(
        5,
        "(fix u.u)(w x) nests the argument bindings inside the argument and rejects in both systems",
    );
}

#[test]
fn criterion_6_subtyping_suite() {
    let started = Instant::now();
    let atoms = vec!["P".to_string(), "Q".to_string()];
    let types = enumerate_types(3, &atoms);
    let n = types.len();
    assert_eq!(n, 2703, "depth <= 3 over two atoms");

    // relation matrix as bitset rows
    let words = n.div_ceil(64);
    let mut rows: Vec<Vec<u64>> = vec![vec![0; words]; n];
    for (i, a) in types.iter().enumerate() {
        for (j, b) in types.iter().enumerate() {
            if subtype(a, b) {
                rows[i][j / 64] |= 1 << (j % 64);
            }
        }
    }

    // reflexivity
    for (i, _) in types.iter().enumerate() {
        assert!(rows[i][i / 64] & (1 << (i % 64)) != 0, "not reflexive: {}", types[i]);
    }
    // bot is least
    let bot_idx = types.iter().position(|t| *t == Type::Bot).unwrap();
    assert!(rows[bot_idx].iter().enumerate().all(|(w, &bits)| {
        let expect = if (w + 1) * 64 <= n {
            u64::MAX
        } else {
            (1u64 << (n - w * 64)) - 1
        };
        bits == expect
    }));
    // admissible transitivity: row(B) ⊆ row(A) whenever A <= B
    let mut premise_pairs = 0usize;
    for i in 0..n {
        for j in 0..n {
            if rows[i][j / 64] & (1 << (j % 64)) != 0 {
                premise_pairs += 1;
                let superset = rows[j]
                    .iter()
                    .zip(rows[i].iter())
                    .all(|(bj, bi)| bj & !bi == 0);
                assert!(
                    superset,
                    "transitivity fails through {} <= {}",
                    types[i],
                    types[j]
                );
            }
        }
    }
    // the intersection of arrows does not distribute
    let p = atom("P");
    let q = atom("Q");
    let r = atom("R");
    let lhs = Type::inter(Type::arrow(p.clone(), q.clone()), Type::arrow(p.clone(), r.clone()));
    let rhs = Type::arrow(p, Type::inter(q, r));
    assert!(!subtype(&lhs, &rhs));

    let elapsed = started.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "subtyping suite took {elapsed:?}");
    pass(
        6,
        &format!(
            "reflexivity and transitivity hold over {n} types ({premise_pairs} derivable pairs), bot is least, arrow distribution rejected ({elapsed:?})"
        ),
    );
}

#[test]
fn criterion_7_progress_fuzzing() {
    // truly closed terms: enumerate under an empty prelude, plus seeded
    // random closed annotated terms
    let sig = Signature {
        prelude: TypingContext::empty(),
        annotation_density: 0.6,
        ..Signature::default()
    };
    let mut corpus = enumerate_terms(&sig);
    let enumerated = corpus.len();
    let mut rng = ChaCha8Rng::seed_from_u64(0x7777);
    for _ in 0..300 {
        corpus.push(gen_random_term(&sig, &mut rng, 10));
    }
    let cfg = CheckConfig::decision_only();
    let mut accepted = 0usize;
    let mut stuck = Vec::new();
    for term in &corpus {
        let mut checker = TriChecker::new(cfg.clone());
        let subject = LNTerm::from(term);
        let is_accepted = sig.check_types.iter().any(|goal| {
            matches!(
                checker.decide(&TypingContext::empty(), &LinearContext::empty(), &subject, goal),
                Ok(Decision::Accept)
            )
        });
        if is_accepted {
            accepted += 1;
            if let EvalResult::Stuck { term: at, reason } = eval(term, 1000) {
                stuck.push(format!(
                    "{} got stuck at {}: {reason}",
                    print_term(term),
                    print_term(&at)
                ));
            }
        }
    }
    assert!(stuck.is_empty(), "stuck evaluations:\n{}", stuck.join("\n"));
    assert!(accepted > 0, "no accepted closed terms in the corpus");
    pass(
        7,
        &format!(
            "{accepted} accepted closed terms (of {} enumerated + 300 random) evaluate 1000 steps without getting stuck",
            enumerated
        ),
    );
}

#[test]
fn criterion_8_derivation_replay() {
    // every accept derivation emitted over a derivation-mode corpus passes
    // the independent schema validator
    let sig = Signature {
        size_bound: 4,
        ..Signature::default()
    };
    let mut terms = enumerate_terms(&sig);
    let mut rng = ChaCha8Rng::seed_from_u64(0x8888);
    for _ in 0..60 {
        terms.push(gen_random_term(&sig, &mut rng, 9));
    }
    let cfg = CheckConfig::default();
    let mut emitted = 0usize;
    for term in &terms {
        let subject = LNTerm::from(term);
        let translated = translate_embed(term);
        for goal in &sig.check_types {
            let mut tri = TriChecker::new(cfg.clone());
            if let Ok(CheckOutcome::Accept(d)) =
                tri.check(&sig.prelude, &LinearContext::empty(), &subject, goal)
            {
                validate(&d, System::Tri).unwrap_or_else(|e| {
                    panic!("tri derivation failed replay for {} <= {}: {e}", term, goal)
                });
                emitted += 1;
            }
            let mut ln = LnChecker::new(cfg.clone());
            if let Ok(CheckOutcome::Accept(d)) =
                ln.check(&sig.prelude, &LinearContext::empty(), &translated, goal)
            {
                validate(&d, System::LetNormal).unwrap_or_else(|e| {
                    panic!(
                        "let-normal derivation failed replay for {} <= {}: {e}",
                        term, goal
                    )
                });
                emitted += 1;
            }
        }
    }
    assert!(emitted > 100, "only {emitted} accept derivations emitted");
    pass(
        8,
        &format!("{emitted} accept derivations all replay against the rule schemas"),
    );
}
