//! Cross-checks between the search strategies and fuel behavior, on top of
//! the main differential suite in the acceptance tests.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use trilet::differ::{enumerate_terms, gen_random_term, Signature};
use trilet::lncheck::LnChecker;
use trilet::syntax::{LNTerm, LinearContext};
use trilet::transform::translate_embed;
use trilet::tri::{CheckConfig, Decision, Strategy, TriChecker};

fn corpus(size_bound: usize, random: usize, seed: u64) -> (Signature, Vec<trilet::Term>) {
    let sig = Signature {
        size_bound,
        ..Signature::default()
    };
    let mut terms = enumerate_terms(&sig);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..random {
        terms.push(gen_random_term(&sig, &mut rng, 9));
    }
    (sig, terms)
}

/// The heuristic left-rule strategy must agree with exhaustive
/// interleaving, for both checkers, on every corpus case.
#[test]
fn strategies_agree_on_corpus() {
    let (sig, terms) = corpus(4, 120, 0x5EED);
    let heuristic = CheckConfig {
        strategy: Strategy::Heuristic,
        build_derivations: false,
        ..CheckConfig::default()
    };
    let exhaustive = CheckConfig {
        strategy: Strategy::Exhaustive,
        build_derivations: false,
        ..CheckConfig::default()
    };
    let empty = LinearContext::empty();
    for term in &terms {
        let subject = LNTerm::from(term);
        let translated = translate_embed(term);
        let mut tri_h = TriChecker::new(heuristic.clone());
        let mut tri_e = TriChecker::new(exhaustive.clone());
        let mut ln_h = LnChecker::new(heuristic.clone());
        let mut ln_e = LnChecker::new(exhaustive.clone());
        for goal in &sig.check_types {
            let th = tri_h.decide(&sig.prelude, &empty, &subject, goal).unwrap();
            let te = tri_e.decide(&sig.prelude, &empty, &subject, goal).unwrap();
            assert_eq!(
                th, te,
                "tri strategies disagree on {term} against {goal}"
            );
            let lh = ln_h.decide(&sig.prelude, &empty, &translated, goal).unwrap();
            let le = ln_e.decide(&sig.prelude, &empty, &translated, goal).unwrap();
            assert_eq!(
                lh, le,
                "let-normal strategies disagree on {term} against {goal}"
            );
        }
    }
}

/// Accept at fuel k implies accept at any higher fuel; a definitive reject
/// stays a reject; tiny fuel yields FuelExhausted, never a bogus verdict.
#[test]
fn fuel_monotonicity() {
    let (sig, terms) = corpus(4, 60, 0xF0E1);
    let empty = LinearContext::empty();
    for term in terms.iter().take(400) {
        let subject = LNTerm::from(term);
        for goal in sig.check_types.iter().step_by(7) {
            let at = |fuel: u64| -> Decision {
                let cfg = CheckConfig {
                    fuel,
                    build_derivations: false,
                    ..CheckConfig::default()
                };
                TriChecker::new(cfg)
                    .decide(&sig.prelude, &empty, &subject, goal)
                    .unwrap()
            };
            let full = at(100_000);
            assert_ne!(full, Decision::FuelExhausted, "default fuel too small");
            assert_eq!(at(200_000), full, "outcome changed with more fuel");
            match at(2) {
                Decision::FuelExhausted => {}
                early => assert_eq!(early, full, "tiny fuel produced a different verdict"),
            }
        }
    }
}

/// FuelExhausted is reported (not Reject) when the budget genuinely runs
/// out mid-search.
#[test]
fn fuel_exhaustion_reported() {
    let sig = Signature::default();
    let term = trilet::Term::app(
        trilet::Term::app(trilet::Term::var("g"), trilet::Term::var("x")),
        trilet::Term::app(trilet::Term::var("f"), trilet::Term::var("x")),
    );
    let cfg = CheckConfig {
        fuel: 4,
        build_derivations: false,
        ..CheckConfig::default()
    };
    let out = TriChecker::new(cfg)
        .decide(
            &sig.prelude,
            &LinearContext::empty(),
            &LNTerm::from(&term),
            &sig.check_types[0],
        )
        .unwrap();
    assert_eq!(out, Decision::FuelExhausted);
}
