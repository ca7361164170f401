//! Differential testing of the two checkers through the translation: the
//! executable form of the soundness and completeness theorems. Terms are
//! enumerated exhaustively (duplicate-free up to alpha equivalence) and
//! generated randomly from a seed; each is checked in the tridirectional
//! system directly and in the let-normal system after translation, and the
//! outcomes must agree whenever neither side ran out of fuel.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::lncheck::LnChecker;
use crate::pretty::{print_term, print_type};
use crate::syntax::{ContextualAnnotation, LNTerm, LinearContext, Term, Type, TypingContext, VarSpace};
use crate::transform::translate_embed;
use crate::tri::{CheckConfig, Decision, Strategy, TriChecker};

/// Corpus parameters.
#[derive(Clone, Debug)]
pub struct Signature {
    pub atoms: Vec<String>,
    pub prelude: TypingContext,
    pub check_types: Vec<Type>,
    pub size_bound: usize,
    pub annotation_density: f64,
    pub seed: u64,
}

impl Default for Signature {
    fn default() -> Signature {
        let atoms = vec!["P".to_string(), "Q".to_string()];
        let p = Type::base("P");
        let q = Type::base("Q");
        let mut prelude = TypingContext::empty();
        // one variable per interesting type shape, to exercise \/L, /\E,
        // botL, directL reordering, and slack bindings
        prelude.push("x", VarSpace::Ord, p.clone()).unwrap();
        prelude
            .push("f", VarSpace::Ord, Type::arrow(p.clone(), q.clone()))
            .unwrap();
        prelude
            .push(
                "g",
                VarSpace::Ord,
                Type::inter(
                    Type::arrow(p.clone(), q.clone()),
                    Type::arrow(p.clone(), p.clone()),
                ),
            )
            .unwrap();
        prelude
            .push("h", VarSpace::Ord, Type::union(p.clone(), q))
            .unwrap();
        prelude
            .push("w", VarSpace::Ord, Type::arrow(p, Type::Bot))
            .unwrap();
        Signature {
            check_types: enumerate_types(2, &atoms),
            atoms,
            prelude,
            size_bound: 7,
            annotation_density: 0.5,
            seed: 0xD1FF,
        }
    }
}

/// All types of the given depth bound over the atom set, deterministic
/// order, small first.
pub fn enumerate_types(depth: usize, atoms: &[String]) -> Vec<Type> {
    let mut by_depth: Vec<Vec<Type>> = vec![Vec::new()];
    let mut leaves: Vec<Type> = atoms.iter().map(|a| Type::Base(a.clone())).collect();
    leaves.push(Type::Bot);
    by_depth.push(leaves);
    for d in 2..=depth {
        let shallower: Vec<Type> = by_depth.iter().flatten().cloned().collect();
        let mut level = Vec::new();
        for a in &shallower {
            for b in &shallower {
                // at least one side must reach depth d-1
                if a.depth().max(b.depth()) == d - 1 {
                    level.push(Type::arrow(a.clone(), b.clone()));
                    level.push(Type::inter(a.clone(), b.clone()));
                    level.push(Type::union(a.clone(), b.clone()));
                }
            }
        }
        by_depth.push(level);
    }
    by_depth.into_iter().flatten().collect()
}

/// Exhaustively enumerate closed-under-Γ terms up to the signature's size
/// bound, duplicate-free up to alpha equivalence (binders are generated
/// canonically), in a deterministic order.
pub fn enumerate_terms(sig: &Signature) -> Vec<Term> {
    let prelude_vars: Vec<String> = sig.prelude.entries.iter().map(|e| e.name.clone()).collect();
    let mut memo: HashMap<(usize, usize, usize), Vec<Term>> = HashMap::new();
    let mut out = Vec::new();
    for n in 1..=sig.size_bound {
        out.extend(terms_of(n, 0, 0, &prelude_vars, &mut memo));
    }
    out
}

fn terms_of(
    n: usize,
    lam_depth: usize,
    fix_depth: usize,
    prelude: &[String],
    memo: &mut HashMap<(usize, usize, usize), Vec<Term>>,
) -> Vec<Term> {
    if n == 0 {
        return Vec::new();
    }
    if let Some(v) = memo.get(&(n, lam_depth, fix_depth)) {
        return v.clone();
    }
    let mut out = Vec::new();
    if n == 1 {
        for p in prelude {
            out.push(Term::var(p));
        }
        for i in 0..lam_depth {
            out.push(Term::var(&format!("v{i}")));
        }
        for i in 0..fix_depth {
            out.push(Term::fixvar(&format!("r{i}")));
        }
    } else {
        for body in terms_of(n - 1, lam_depth + 1, fix_depth, prelude, memo) {
            out.push(Term::lam(&format!("v{lam_depth}"), body));
        }
        for body in terms_of(n - 1, lam_depth, fix_depth + 1, prelude, memo) {
            out.push(Term::fix(&format!("r{fix_depth}"), body));
        }
        for i in 1..=(n - 2) {
            let fs = terms_of(i, lam_depth, fix_depth, prelude, memo);
            let args = terms_of(n - 1 - i, lam_depth, fix_depth, prelude, memo);
            for f in &fs {
                for a in &args {
                    out.push(Term::app(f.clone(), a.clone()));
                }
            }
        }
    }
    memo.insert((n, lam_depth, fix_depth), out.clone());
    out
}

/// One seeded random well-scoped term whose unannotated skeleton honors
/// the size bound; annotations are then layered onto application function
/// positions with the configured density (so density 1 annotates every
/// such position regardless of remaining budget).
pub fn gen_random_term(sig: &Signature, rng: &mut ChaCha8Rng, size_bound: usize) -> Term {
    let prelude_vars: Vec<String> = sig.prelude.entries.iter().map(|e| e.name.clone()).collect();
    let mut counter = 0usize;
    gen(
        size_bound.max(1),
        &prelude_vars,
        &mut Vec::new(),
        &mut counter,
        sig,
        rng,
    )
}

fn gen(
    budget: usize,
    prelude: &[String],
    scope: &mut Vec<(String, VarSpace)>,
    counter: &mut usize,
    sig: &Signature,
    rng: &mut ChaCha8Rng,
) -> Term {
    let pick_var = |scope: &Vec<(String, VarSpace)>, rng: &mut ChaCha8Rng| -> Term {
        let total = prelude.len() + scope.len();
        let i = rng.gen_range(0..total);
        if i < prelude.len() {
            Term::var(&prelude[i])
        } else {
            let (name, space) = &scope[i - prelude.len()];
            match space {
                VarSpace::Ord => Term::var(name),
                VarSpace::Fix => Term::fixvar(name),
            }
        }
    };
    let can_var = !prelude.is_empty() || !scope.is_empty();
    if budget <= 1 {
        if can_var {
            return pick_var(scope, rng);
        }
        // nothing in scope: the smallest closed term is an identity
        let name = format!("a{}", *counter);
        *counter += 1;
        return Term::lam(&name, Term::var(&name));
    }
    let roll: f64 = rng.gen();
    if budget >= 3 && roll < 0.45 {
        // application; maybe annotate the function position
        let fb = rng.gen_range(1..=(budget - 2));
        let ab = budget - 1 - fb;
        let mut f = gen(fb, prelude, scope, counter, sig, rng);
        if rng.gen::<f64>() < sig.annotation_density {
            f = Term::anno(f, random_annotations(sig, rng));
        }
        let a = gen(ab, prelude, scope, counter, sig, rng);
        Term::app(f, a)
    } else if roll < 0.75 {
        let name = format!("a{}", *counter);
        *counter += 1;
        scope.push((name.clone(), VarSpace::Ord));
        let body = gen(budget - 1, prelude, scope, counter, sig, rng);
        scope.pop();
        Term::lam(&name, body)
    } else if roll < 0.9 || !can_var {
        let name = format!("u{}", *counter);
        *counter += 1;
        scope.push((name.clone(), VarSpace::Fix));
        let body = gen(budget - 1, prelude, scope, counter, sig, rng);
        scope.pop();
        Term::fix(&name, body)
    } else {
        pick_var(scope, rng)
    }
}

fn random_annotations(sig: &Signature, rng: &mut ChaCha8Rng) -> Vec<ContextualAnnotation> {
    let n = if rng.gen::<f64>() < 0.25 { 2 } else { 1 };
    (0..n)
        .map(|_| {
            let i = rng.gen_range(0..sig.check_types.len());
            ContextualAnnotation::plain(sig.check_types[i].clone())
        })
        .collect()
}

/// Outcome of one differential case.
#[derive(Clone, Debug)]
pub struct CaseRecord {
    pub term: Term,
    pub goal: Type,
    pub tri: Decision,
    pub ln: Decision,
    pub tri_fuel_used: u64,
    pub ln_fuel_used: u64,
}

impl CaseRecord {
    /// A case disagrees when the outcomes differ and neither ran out of
    /// fuel.
    pub fn disagrees(&self) -> bool {
        self.tri != self.ln
            && self.tri != Decision::FuelExhausted
            && self.ln != Decision::FuelExhausted
    }
}

/// Run one term/type pair through both systems.
pub fn differential_check(
    gamma: &TypingContext,
    e: &Term,
    goal: &Type,
    cfg: &CheckConfig,
) -> CaseRecord {
    let mut tri = TriChecker::new(cfg.clone());
    let mut ln = LnChecker::new(cfg.clone());
    let translated = translate_embed(e);
    case_with(gamma, e, &translated, goal, &mut tri, &mut ln)
}

fn case_with(
    gamma: &TypingContext,
    e: &Term,
    translated: &LNTerm,
    goal: &Type,
    tri: &mut TriChecker,
    ln: &mut LnChecker,
) -> CaseRecord {
    let empty = LinearContext::empty();
    let subject = LNTerm::from(e);
    let tri_out = tri
        .decide(gamma, &empty, &subject, goal)
        .expect("corpus terms are well-scoped");
    let tri_fuel = tri.fuel_used();
    let ln_out = ln
        .decide(gamma, &empty, translated, goal)
        .expect("translations are well-formed and well-scoped");
    let ln_fuel = ln.fuel_used();
    CaseRecord {
        term: e.clone(),
        goal: goal.clone(),
        tri: tri_out,
        ln: ln_out,
        tri_fuel_used: tri_fuel,
        ln_fuel_used: ln_fuel,
    }
}

#[derive(Clone, Debug)]
pub struct DifferOptions {
    pub fuel: u64,
    pub strategy: Strategy,
    pub random_count: usize,
    pub random_size: usize,
    pub parallel: bool,
    pub keep_cases: bool,
}

impl Default for DifferOptions {
    fn default() -> DifferOptions {
        DifferOptions {
            fuel: 100_000,
            strategy: Strategy::Heuristic,
            random_count: 500,
            random_size: 12,
            parallel: true,
            keep_cases: false,
        }
    }
}

/// Aggregate outcome of a differential run.
#[derive(Clone, Debug, Default)]
pub struct AgreementReport {
    pub exhaustive_terms: usize,
    pub random_terms: usize,
    pub cases: usize,
    pub agree_accept: usize,
    pub agree_reject: usize,
    pub fuel_exhausted: usize,
    pub max_fuel_used: u64,
    pub disagreements: Vec<CaseRecord>,
    pub records: Vec<CaseRecord>,
}

impl AgreementReport {
    fn absorb_case(&mut self, c: CaseRecord, keep: bool) {
        self.cases += 1;
        self.max_fuel_used = self.max_fuel_used.max(c.tri_fuel_used).max(c.ln_fuel_used);
        if c.tri == Decision::FuelExhausted || c.ln == Decision::FuelExhausted {
            self.fuel_exhausted += 1;
        } else if c.disagrees() {
            self.disagreements.push(c.clone());
        } else if c.tri == Decision::Accept {
            self.agree_accept += 1;
        } else {
            self.agree_reject += 1;
        }
        if keep {
            self.records.push(c);
        }
    }

    fn merge(mut self, other: AgreementReport) -> AgreementReport {
        self.exhaustive_terms += other.exhaustive_terms;
        self.random_terms += other.random_terms;
        self.cases += other.cases;
        self.agree_accept += other.agree_accept;
        self.agree_reject += other.agree_reject;
        self.fuel_exhausted += other.fuel_exhausted;
        self.max_fuel_used = self.max_fuel_used.max(other.max_fuel_used);
        self.disagreements.extend(other.disagreements);
        self.records.extend(other.records);
        self
    }

    pub fn human_table(&self) -> String {
        use std::fmt::Write as _;
        let mut s = String::new();
        let _ = writeln!(
            s,
            "terms: {} enumerated + {} random; cases: {}",
            self.exhaustive_terms, self.random_terms, self.cases
        );
        let _ = writeln!(
            s,
            "agree-accept: {}  agree-reject: {}  fuel-exhausted: {}  disagreements: {}",
            self.agree_accept,
            self.agree_reject,
            self.fuel_exhausted,
            self.disagreements.len()
        );
        let _ = writeln!(s, "max fuel used by a single case: {}", self.max_fuel_used);
        for d in &self.disagreements {
            let _ = writeln!(
                s,
                "DISAGREE  {}  against {}  tri={:?} ln={:?}",
                print_term(&d.term),
                print_type(&d.goal),
                d.tri,
                d.ln
            );
        }
        s
    }
}

/// Run the full differential corpus: exhaustive enumeration up to the
/// signature's size bound plus seeded random terms, each term checked
/// against every candidate type in both systems.
pub fn run_differential(sig: &Signature, opts: &DifferOptions) -> AgreementReport {
    let enumerated = enumerate_terms(sig);
    let exhaustive_count = enumerated.len();
    let mut rng = ChaCha8Rng::seed_from_u64(sig.seed);
    let random: Vec<Term> = (0..opts.random_count)
        .map(|_| {
            let size = rng.gen_range(2..=opts.random_size.max(2));
            gen_random_term(sig, &mut rng, size)
        })
        .collect();
    let random_count = random.len();

    let all: Vec<(bool, Term)> = enumerated
        .into_iter()
        .map(|t| (false, t))
        .chain(random.into_iter().map(|t| (true, t)))
        .collect();

    let cfg = CheckConfig {
        strategy: opts.strategy,
        fuel: opts.fuel,
        build_derivations: false,
    };

    let per_term = |(_, term): &(bool, Term)| -> AgreementReport {
        let mut report = AgreementReport::default();
        let mut tri = TriChecker::new(cfg.clone());
        let mut ln = LnChecker::new(cfg.clone());
        let translated = translate_embed(term);
        for goal in &sig.check_types {
            let rec = case_with(&sig.prelude, term, &translated, goal, &mut tri, &mut ln);
            report.absorb_case(rec, opts.keep_cases);
        }
        report
    };

    let mut report = if opts.parallel {
        all.par_iter()
            .map(per_term)
            .reduce(AgreementReport::default, AgreementReport::merge)
    } else {
        all.iter()
            .map(per_term)
            .fold(AgreementReport::default(), AgreementReport::merge)
    };
    report.exhaustive_terms = exhaustive_count;
    report.random_terms = random_count;
    // deterministic output regardless of scheduling
    report
        .disagreements
        .sort_by_key(|c| (print_term(&c.term), print_type(&c.goal)));
    report
        .records
        .sort_by_key(|c| (print_term(&c.term), print_type(&c.goal)));
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn enumeration_contains_expected_terms() {
        let sig = Signature {
            size_bound: 3,
            ..Signature::default()
        };
        let terms = enumerate_terms(&sig);
        assert!(terms.contains(&Term::var("x")));
        assert!(terms.contains(&Term::app(Term::var("f"), Term::var("x"))));
        assert!(terms.contains(&Term::lam("v0", Term::var("v0"))));
        // no alpha duplicates: every pair is alpha-distinct
        for (i, a) in terms.iter().enumerate() {
            for b in terms.iter().skip(i + 1) {
                assert!(
                    !crate::syntax::alpha_eq_term(a, b),
                    "alpha duplicates {a} and {b}"
                );
            }
        }
    }

    #[test]
    fn enumeration_sizes() {
        let sig = Signature {
            size_bound: 4,
            ..Signature::default()
        };
        for t in enumerate_terms(&sig) {
            assert!(t.size() <= 4);
        }
    }

    #[test]
    fn random_generation_is_reproducible() {
        let sig = Signature::default();
        let mut r1 = ChaCha8Rng::seed_from_u64(42);
        let mut r2 = ChaCha8Rng::seed_from_u64(42);
        let a = gen_random_term(&sig, &mut r1, 9);
        let b = gen_random_term(&sig, &mut r2, 9);
        assert_eq!(a, b);
        // the size bound governs the unannotated skeleton
        fn skeleton_size(t: &Term) -> usize {
            match t {
                Term::Var(_) | Term::FixVar(_) => 1,
                Term::Lam(_, b) | Term::Fix(_, b) => 1 + skeleton_size(b),
                Term::App(f, x) => 1 + skeleton_size(f) + skeleton_size(x),
                Term::Anno(e, _) => skeleton_size(e),
            }
        }
        assert!(skeleton_size(&a) <= 9);
    }

    #[test]
    fn zero_density_means_no_annotations() {
        let sig = Signature {
            annotation_density: 0.0,
            ..Signature::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..40 {
            let t = gen_random_term(&sig, &mut rng, 10);
            fn has_anno(t: &Term) -> bool {
                match t {
                    Term::Anno(_, _) => true,
                    Term::Var(_) | Term::FixVar(_) => false,
                    Term::Lam(_, b) | Term::Fix(_, b) => has_anno(b),
                    Term::App(f, a) => has_anno(f) || has_anno(a),
                }
            }
            assert!(!has_anno(&t));
        }
    }

    #[test]
    fn full_density_annotates_every_application_function() {
        let sig = Signature {
            annotation_density: 1.0,
            ..Signature::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        fn check(t: &Term) {
            match t {
                Term::App(f, a) => {
                    assert!(matches!(&**f, Term::Anno(_, _)), "unannotated function");
                    if let Term::Anno(inner, _) = &**f {
                        check(inner);
                    }
                    check(a);
                }
                Term::Lam(_, b) | Term::Fix(_, b) => check(b),
                Term::Anno(e, _) => check(e),
                _ => {}
            }
        }
        for _ in 0..40 {
            check(&gen_random_term(&sig, &mut rng, 10));
        }
    }

    #[test]
    fn map_filter_agrees() {
        let mut gamma = TypingContext::empty();
        let int = Type::base("int");
        let s = Type::base("s");
        let n = Type::base("n");
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
                Type::arrow(int.clone(), Type::union(s.clone(), n.clone())),
            )
            .unwrap();
        gamma.push("n", VarSpace::Ord, int).unwrap();
        let term = Term::app(
            Term::app(Term::var("map"), Term::var("f")),
            Term::app(Term::var("filter"), Term::var("n")),
        );
        let rec = differential_check(
            &gamma,
            &term,
            &Type::union(s, n),
            &CheckConfig::decision_only(),
        );
        assert_eq!(rec.tri, Decision::Accept);
        assert_eq!(rec.ln, Decision::Accept);
    }

    #[test]
    fn nested_annotated_values_agree() {
        // ((x : P \/ Q) : Q \/ P) f exercises nested slack bindings on the
        // let-normal side and annotation-context descent on the other
        let p = Type::base("P");
        let q = Type::base("Q");
        let mut gamma = TypingContext::empty();
        gamma
            .push("x", VarSpace::Ord, Type::union(p.clone(), q.clone()))
            .unwrap();
        gamma
            .push(
                "f",
                VarSpace::Ord,
                Type::inter(
                    Type::arrow(p.clone(), p.clone()),
                    Type::arrow(q.clone(), q.clone()),
                ),
            )
            .unwrap();
        let subject = Term::app(
            Term::anno(
                Term::anno(
                    Term::var("f"),
                    vec![ContextualAnnotation::plain(Type::inter(
                        Type::arrow(p.clone(), p.clone()),
                        Type::arrow(q.clone(), q.clone()),
                    ))],
                ),
                vec![
                    ContextualAnnotation::plain(Type::arrow(p.clone(), p.clone())),
                    ContextualAnnotation::plain(Type::arrow(q.clone(), q.clone())),
                ],
            ),
            Term::var("x"),
        );
        let rec = differential_check(
            &gamma,
            &subject,
            &Type::union(p, q),
            &CheckConfig::decision_only(),
        );
        assert_eq!(rec.tri, Decision::Accept, "tri should accept");
        assert_eq!(rec.ln, Decision::Accept, "let-normal should accept");
    }

    #[test]
    fn plain_identity_rejects_in_both() {
        let gamma = TypingContext::empty();
        let rec = differential_check(
            &gamma,
            &Term::lam("x", Term::var("x")),
            &Type::arrow(Type::base("P"), Type::base("Q")),
            &CheckConfig::decision_only(),
        );
        assert_eq!(rec.tri, Decision::Reject);
        assert_eq!(rec.ln, Decision::Reject);
    }

    #[test]
    fn small_corpus_has_zero_disagreements() {
        let sig = Signature {
            size_bound: 4,
            ..Signature::default()
        };
        let opts = DifferOptions {
            random_count: 50,
            random_size: 8,
            parallel: false,
            ..DifferOptions::default()
        };
        let report = run_differential(&sig, &opts);
        assert!(
            report.disagreements.is_empty(),
            "{}",
            report.human_table()
        );
        assert!(report.agree_accept > 0, "corpus should accept something");
    }
}
