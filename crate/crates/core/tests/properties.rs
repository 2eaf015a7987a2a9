//! Oracle-backed invariants: every clever operation must agree with the
//! brute-force semantics on small instances.

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use abduce::dnf::{self, ApplyRenaming, Renaming};
use abduce::engine::{self, AbductionProblem, KnowledgeBase, Query, SolveOutcome};
use abduce::formula::{
    Assignment, Clause, Cnf, Dnf, Literal, PartialAssignment, Term, VarId, VarSet,
};
use abduce::generator::{self, QueryClass, SigmaClass};
use abduce::io;
use abduce::oracle::{self, ModelSet};
use abduce::{AffineSystem, EquationDisjunction, LinearEquation};

fn term_from(n: u32, pairs: &[(u32, bool)]) -> Term {
    let mut seen: BTreeMap<u32, bool> = BTreeMap::new();
    for &(v, p) in pairs {
        seen.entry(v % n + 1).or_insert(p);
    }
    Term::try_new(seen.into_iter().map(|(v, p)| Literal {
        var: VarId::new(v),
        positive: p,
    }))
    .expect("one literal per variable")
}

fn clause_from(n: u32, pairs: &[(u32, bool)]) -> Clause {
    Clause::new(pairs.iter().map(|&(v, p)| Literal {
        var: VarId::new(v % n + 1),
        positive: p,
    }))
}

fn varset_from(n: u32, mask: u64) -> VarSet {
    (1..=n)
        .filter(|i| mask >> (i - 1) & 1 == 1)
        .map(VarId::new)
        .collect()
}

prop_compose! {
    fn arb_dnf(max_n: u32)
        (n in 1..=max_n)
        (n in Just(n), raw in prop::collection::vec(prop::collection::vec((0u32..8, any::<bool>()), 0..=3), 0..=6))
        -> Dnf
    {
        Dnf::new(n, raw.iter().map(|pairs| term_from(n, pairs)).collect())
    }
}

prop_compose! {
    fn arb_cnf(max_n: u32)
        (n in 1..=max_n)
        (n in Just(n), raw in prop::collection::vec(prop::collection::vec((0u32..8, any::<bool>()), 0..=3), 0..=5))
        -> Cnf
    {
        Cnf::new(n, raw.iter().map(|pairs| clause_from(n, pairs)).collect())
    }
}

prop_compose! {
    fn arb_affine(max_n: u32)
        (n in 1..=max_n)
        (n in Just(n), raw in prop::collection::vec((prop::collection::vec(0u32..8, 0..=3), any::<bool>()), 0..=6))
        -> AffineSystem
    {
        AffineSystem::new(
            n,
            raw.iter()
                .map(|(vars, rhs)| {
                    LinearEquation::new(vars.iter().map(|v| VarId::new(v % n + 1)), *rhs)
                })
                .collect(),
        )
    }
}

prop_compose! {
    fn arb_eqdisj(max_n: u32)
        (n in 1..=max_n)
        (n in Just(n), raw in prop::collection::vec((prop::collection::vec(0u32..8, 0..=3), any::<bool>()), 0..=4))
        -> EquationDisjunction
    {
        EquationDisjunction::new(
            n,
            raw.iter()
                .map(|(vars, rhs)| {
                    LinearEquation::new(vars.iter().map(|v| VarId::new(v % n + 1)), *rhs)
                })
                .collect(),
        )
    }
}

proptest! {
    #[test]
    fn dnf_projection_matches_the_model_oracle(f in arb_dnf(10), amask in any::<u64>()) {
        let n = f.num_vars();
        let a = varset_from(n, amask);
        let projected = f.project(&a);
        let via_models = oracle::models(&f, n).unwrap().project(&a);
        prop_assert_eq!(oracle::models(&projected, n).unwrap(), via_models);
    }

    #[test]
    fn projection_distributes_over_disjunction(
        f in arb_dnf(8),
        g_raw in prop::collection::vec(prop::collection::vec((0u32..8, any::<bool>()), 0..=3), 0..=6),
        amask in any::<u64>(),
    ) {
        let n = f.num_vars();
        let g = Dnf::new(n, g_raw.iter().map(|pairs| term_from(n, pairs)).collect());
        let a = varset_from(n, amask);
        let mut both = f.terms().to_vec();
        both.extend(g.terms().iter().cloned());
        let union = Dnf::new(n, both);
        let left = oracle::models(&union.project(&a), n).unwrap();
        let right = oracle::models(&f.project(&a), n).unwrap()
            .union(&oracle::models(&g.project(&a), n).unwrap());
        prop_assert_eq!(left, right);
    }

    #[test]
    fn conditioning_matches_model_filtering(
        f in arb_dnf(8),
        pairs in prop::collection::vec((0u32..8, any::<bool>()), 0..=3),
    ) {
        let n = f.num_vars();
        let p = term_from(n, &pairs).as_partial();
        let conditioned = f.condition(&p);
        for mask in 0..1u64 << n {
            let m = Assignment::from_mask(n, mask);
            let mut with_p = m.clone();
            for &l in p.literals() {
                with_p.set(l.var, l.positive);
            }
            prop_assert_eq!(conditioned.evaluate(&m), f.evaluate(&with_p));
        }
    }

    #[test]
    fn entailment_equals_truth_table_containment(f in arb_dnf(8), g in arb_cnf(8)) {
        let n = f.num_vars().max(g.num_vars());
        let f = Dnf::new(n, f.terms().to_vec());
        let g = Cnf::new(n, g.clauses().to_vec());
        let mf = oracle::models(&f, n).unwrap();
        let mg = oracle::models(&g, n).unwrap();
        let contained = mf.members().iter().all(|&m| mg.contains(m));
        prop_assert_eq!(f.entails(&g), contained);
    }

    #[test]
    fn triangulation_preserves_models_under_any_order(
        s in arb_affine(10),
        perm_seed in any::<u64>(),
    ) {
        let n = s.num_vars();
        let mut order: Vec<VarId> = (1..=n).map(VarId::new).collect();
        let mut state = perm_seed | 1;
        for i in (1..order.len()).rev() {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            order.swap(i, (state % (i as u64 + 1)) as usize);
        }
        let models = oracle::models(&s, n).unwrap();
        match s.triangulate(&order) {
            None => prop_assert!(models.is_empty()),
            Some(t) => {
                prop_assert_eq!(oracle::models(&t, n).unwrap(), models);
                prop_assert!(t.rows().len() <= s.rows().len().min(n as usize));
            }
        }
    }

    #[test]
    fn affine_solve_agrees_with_the_oracle(s in arb_affine(10)) {
        let n = s.num_vars();
        let models = oracle::models(&s, n).unwrap();
        match s.solve() {
            None => prop_assert!(models.is_empty()),
            Some(m) => prop_assert!(models.contains(m.to_mask())),
        }
    }

    #[test]
    fn affine_projection_matches_the_model_oracle(s in arb_affine(10), amask in any::<u64>()) {
        let n = s.num_vars();
        let a = varset_from(n, amask);
        let projected = s.project(&a);
        let via_models = oracle::models(&s, n).unwrap().project(&a);
        prop_assert_eq!(&oracle::models(&projected, n).unwrap(), &via_models);
        // the echelon bound: at most min(k, |A|) rows, all formed upon a
        if !via_models.is_empty() {
            prop_assert!(projected.rows().len() <= s.rows().len().min(a.len()));
            for row in projected.rows() {
                prop_assert!(row.vars().iter().all(|v| a.contains(*v)));
            }
        }
    }

    #[test]
    fn eqdisj_negation_complements_models(d in arb_eqdisj(8)) {
        let n = d.num_vars();
        let direct = oracle::models(&d, n).unwrap();
        let negated = oracle::models(&d.negate(), n).unwrap();
        prop_assert_eq!(negated, direct.complement());
    }

    #[test]
    fn affine_complement_roundtrips_models(s in arb_affine(8)) {
        let n = s.num_vars();
        let back = s.complement().negate();
        prop_assert_eq!(
            oracle::models(&back, n).unwrap(),
            oracle::models(&s, n).unwrap()
        );
    }

    #[test]
    fn clause_embedding_has_equal_models(
        n in 1u32..=8,
        pairs in prop::collection::vec((0u32..8, any::<bool>()), 0..=4),
    ) {
        let c = clause_from(n, &pairs);
        let d = EquationDisjunction::from_clause(n, &c);
        prop_assert_eq!(
            oracle::models(&d, n).unwrap(),
            oracle::models(&c, n).unwrap()
        );
    }

    #[test]
    fn renaming_search_agrees_with_exhaustion(f in arb_dnf(8)) {
        let brute = (0..1u64 << f.num_vars()).map(|mask| {
            Renaming::new(varset_from(f.num_vars(), mask))
        }).find(|r| {
            f.apply_renaming(r).terms().iter().all(|t| t.positive_literals() <= 1)
        });
        match dnf::find_horn_renaming(&f) {
            Some(r) => {
                let renamed = f.apply_renaming(&r);
                prop_assert!(renamed.terms().iter().all(|t| t.positive_literals() <= 1));
                prop_assert!(brute.is_some());
            }
            None => prop_assert!(brute.is_none()),
        }
    }

    #[test]
    fn renaming_transports_models(f in arb_dnf(8), mask in any::<u64>()) {
        let n = f.num_vars();
        let r = Renaming::new(varset_from(n, mask));
        let rf = f.apply_renaming(&r);
        for m in 0..1u64 << n {
            let m = Assignment::from_mask(n, m);
            prop_assert_eq!(f.evaluate(&m), rf.evaluate(&m.apply_renaming(&r)));
        }
        prop_assert_eq!(rf.apply_renaming(&r), f);
    }

    #[test]
    fn model_projection_is_idempotent_and_monotone(
        n in 1u32..=8,
        small_mask in any::<u64>(),
        extra_mask in any::<u64>(),
        amask in any::<u64>(),
    ) {
        let space = 1u64 << n;
        let small: Vec<u64> = (0..space).filter(|m| small_mask >> (m % 64) & 1 == 1).collect();
        let large: Vec<u64> = (0..space)
            .filter(|m| small_mask >> (m % 64) & 1 == 1 || extra_mask >> (m % 64) & 1 == 1)
            .collect();
        let a = varset_from(n, amask);
        let p_small = ModelSet::from_masks(n, small);
        let p_large = ModelSet::from_masks(n, large);
        let proj_small = p_small.project(&a);
        prop_assert_eq!(proj_small.project(&a), proj_small.clone());
        let proj_large = p_large.project(&a);
        for &m in proj_small.members() {
            prop_assert!(proj_large.contains(m));
        }
    }

    #[test]
    fn generated_problems_roundtrip_through_text(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for (class, shape) in [
            (SigmaClass::Affine, QueryClass::EqDisj),
            (SigmaClass::Horn, QueryClass::Clause),
            (SigmaClass::Horn, QueryClass::MatchedCnf),
            (SigmaClass::Negative, QueryClass::MatchedCnf),
            (SigmaClass::TwoDnf, QueryClass::Clause),
        ] {
            let p = generator::problem(class, shape, 6, 4, 2, 4, &mut rng);
            let text = io::serialize_problem(&p);
            let reparsed = io::parse_problem(&text).unwrap().problem;
            prop_assert_eq!(&reparsed, &p);
            prop_assert_eq!(io::serialize_problem(&reparsed), text);
        }
    }
}

/// Exhaustive semantic checks of a solve outcome against the oracle.
fn check_against_oracle(p: &AbductionProblem) {
    let best = oracle::best_explanations(p).unwrap();
    match engine::solve(p) {
        SolveOutcome::Unsupported(reason) => {
            panic!("generated instance should be supported: {reason}")
        }
        SolveOutcome::NoExplanation => {
            assert!(best.is_empty(), "solver missed an explanation: {best:?}")
        }
        SolveOutcome::Best(e) => {
            assert!(
                best.contains(&e),
                "returned hypothesis {e} is not among the subset-minimal explanations"
            );
            assert!(engine::is_explanation(p, &e).unwrap());
        }
    }
    let full = engine::enumerate_full(p, None).unwrap();
    let oracle_full = oracle::full_explanations(p).unwrap();
    assert_eq!(
        full.iter()
            .cloned()
            .collect::<std::collections::BTreeSet<_>>(),
        oracle_full,
        "full-explanation enumeration disagrees"
    );
}

#[test]
fn solver_agrees_with_oracle_across_class_pairs() {
    let pairs = [
        (SigmaClass::Affine, QueryClass::EqDisj),
        (SigmaClass::Affine, QueryClass::Clause),
        (SigmaClass::Affine, QueryClass::Term),
        (SigmaClass::Horn, QueryClass::Clause),
        (SigmaClass::Horn, QueryClass::MatchedCnf),
        (SigmaClass::ReverseHorn, QueryClass::Clause),
        (SigmaClass::ReverseHorn, QueryClass::MatchedCnf),
        (SigmaClass::TwoDnf, QueryClass::Clause),
        (SigmaClass::Positive, QueryClass::Clause),
        (SigmaClass::Positive, QueryClass::MatchedCnf),
        (SigmaClass::Negative, QueryClass::Clause),
        (SigmaClass::Negative, QueryClass::MatchedCnf),
        (SigmaClass::HornRenamable, QueryClass::Clause),
    ];
    for (i, &(class, shape)) in pairs.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE + i as u64);
        for round in 0..60 {
            let n = round % 7 + 2;
            let p = generator::problem(class, shape, n, 4, 2, 5, &mut rng);
            check_against_oracle(&p);
        }
    }
}

#[test]
fn necessity_matches_the_oracle_definition() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xBEEF);
    let mut with_explanation = 0;
    for round in 0..120 {
        let class = [SigmaClass::Horn, SigmaClass::Affine, SigmaClass::TwoDnf][round % 3];
        let shape = if class == SigmaClass::Affine {
            QueryClass::EqDisj
        } else {
            QueryClass::Clause
        };
        let p = generator::problem(class, shape, round as u32 % 5 + 2, 4, 2, 4, &mut rng);
        let best = oracle::best_explanations(&p).unwrap();
        if best.is_empty() {
            continue;
        }
        with_explanation += 1;
        for x in p.abducibles().iter() {
            let oracle_necessary = best.iter().all(|e| e.mentions(x));
            assert_eq!(
                engine::is_necessary(&p, x).unwrap(),
                oracle_necessary,
                "necessity of {x} disagrees"
            );
        }
    }
    assert!(
        with_explanation > 10,
        "suite too degenerate to be meaningful"
    );
}

#[test]
fn renamed_problems_transport_explanations_back() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xFADE);
    let mut transported = 0;
    for round in 0..80 {
        let n = round % 6 + 2;
        let (sigma, _) = generator::horn_renamable_non_horn_dnf(n as u32, 4, &mut rng);
        let alpha = generator::clause(n as u32, &mut rng);
        let a = generator::abducibles(n as u32, 5, &mut rng);
        let p = AbductionProblem::new(
            KnowledgeBase::Dnf(sigma.clone()),
            Query::Clause(alpha.clone()),
            a.clone(),
        )
        .unwrap();
        let renaming = dnf::find_horn_renaming(&sigma).unwrap();
        let renamed = AbductionProblem::new(
            KnowledgeBase::Dnf(sigma.apply_renaming(&renaming)),
            Query::Clause(alpha.apply_renaming(&renaming)),
            a,
        )
        .unwrap();
        match (engine::solve(&p), engine::solve(&renamed)) {
            (SolveOutcome::Best(_), SolveOutcome::Best(re)) => {
                let back = engine::Hypothesis::new(re.as_partial().apply_renaming(&renaming));
                assert!(
                    engine::is_explanation(&p, &back).unwrap(),
                    "un-renamed answer must explain the original problem"
                );
                transported += 1;
            }
            (SolveOutcome::NoExplanation, SolveOutcome::NoExplanation) => {}
            (a, b) => panic!("renaming changed the outcome: {a:?} vs {b:?}"),
        }
    }
    assert!(transported > 10, "suite too degenerate to be meaningful");
}

#[test]
fn solve_is_deterministic() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xD00D);
    for _ in 0..20 {
        let p = generator::problem(SigmaClass::Horn, QueryClass::Clause, 7, 5, 2, 5, &mut rng);
        let first = engine::solve(&p);
        for _ in 0..3 {
            assert_eq!(engine::solve(&p), first);
        }
    }
}

#[test]
fn empty_hypothesis_answers_follow_entailment() {
    // entailed query over empty abducibles
    let sigma = Dnf::new(
        2,
        vec![Term::try_new([Literal::positive(VarId::new(2))]).unwrap()],
    );
    let p = AbductionProblem::new(
        KnowledgeBase::Dnf(sigma),
        Query::Clause(Clause::new([Literal::positive(VarId::new(2))])),
        VarSet::new(),
    )
    .unwrap();
    assert_eq!(
        engine::solve(&p),
        SolveOutcome::Best(engine::Hypothesis::new(PartialAssignment::empty()))
    );
}
