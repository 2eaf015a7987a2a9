//! Seeded pseudo-random problem instances for the command line and the
//! test harness. Every function is deterministic in the RNG state; no
//! wall-clock or OS entropy is involved.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::affine::{AffineSystem, EquationDisjunction, LinearEquation};
use crate::dnf::{ApplyRenaming, Renaming};
use crate::engine::{AbductionProblem, KnowledgeBase, Query};
use crate::formula::{Assignment, Clause, Cnf, Dnf, Literal, Term, VarId, VarSet};

/// The knowledge-base shapes the generator can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaClass {
    Affine,
    Horn,
    ReverseHorn,
    TwoDnf,
    Positive,
    Negative,
    HornRenamable,
}

impl SigmaClass {
    pub fn name(self) -> &'static str {
        match self {
            SigmaClass::Affine => "affine",
            SigmaClass::Horn => "horn",
            SigmaClass::ReverseHorn => "reverse-horn",
            SigmaClass::TwoDnf => "two-dnf",
            SigmaClass::Positive => "positive",
            SigmaClass::Negative => "negative",
            SigmaClass::HornRenamable => "horn-renamable",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "affine" => SigmaClass::Affine,
            "horn" => SigmaClass::Horn,
            "reverse-horn" => SigmaClass::ReverseHorn,
            "two-dnf" | "2dnf" => SigmaClass::TwoDnf,
            "positive" => SigmaClass::Positive,
            "negative" => SigmaClass::Negative,
            "horn-renamable" => SigmaClass::HornRenamable,
            _ => return None,
        })
    }
}

/// The query shapes the generator can produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryClass {
    Clause,
    /// A CNF matched to the knowledge-base class so the pair is supported.
    MatchedCnf,
    Term,
    EqDisj,
}

impl QueryClass {
    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "clause" => QueryClass::Clause,
            "cnf" => QueryClass::MatchedCnf,
            "term" => QueryClass::Term,
            "eqdisj" => QueryClass::EqDisj,
            _ => return None,
        })
    }
}

fn sample_vars(n: u32, len: usize, rng: &mut ChaCha8Rng) -> Vec<VarId> {
    let mut vars: Vec<VarId> = (1..=n).map(VarId::new).collect();
    vars.shuffle(rng);
    vars.truncate(len);
    vars
}

fn term_len(n: u32, max: usize, rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(1..=max.min(n as usize))
}

/// One term with at most one positive literal.
fn horn_term(n: u32, rng: &mut ChaCha8Rng) -> Term {
    let vars = sample_vars(n, term_len(n, 3, rng), rng);
    let positive_slot = if rng.gen_bool(0.5) { Some(0) } else { None };
    Term::try_new(vars.iter().enumerate().map(|(i, &v)| Literal {
        var: v,
        positive: positive_slot == Some(i),
    }))
    .expect("distinct variables cannot clash")
}

pub fn horn_dnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Dnf {
    Dnf::new(n, (0..k).map(|_| horn_term(n, rng)).collect())
}

pub fn reverse_horn_dnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Dnf {
    let flip_all = Renaming::new(VarSet::full(n));
    horn_dnf(n, k, rng).apply_renaming(&flip_all)
}

pub fn positive_dnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Dnf {
    Dnf::new(
        n,
        (0..k)
            .map(|_| {
                let vars = sample_vars(n, term_len(n, 3, rng), rng);
                Term::try_new(vars.into_iter().map(Literal::positive)).unwrap()
            })
            .collect(),
    )
}

pub fn negative_dnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Dnf {
    Dnf::new(
        n,
        (0..k)
            .map(|_| {
                let vars = sample_vars(n, term_len(n, 3, rng), rng);
                Term::try_new(vars.into_iter().map(Literal::negative)).unwrap()
            })
            .collect(),
    )
}

pub fn two_dnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Dnf {
    Dnf::new(
        n,
        (0..k)
            .map(|_| {
                let vars = sample_vars(n, term_len(n, 2, rng), rng);
                Term::try_new(vars.into_iter().map(|v| Literal {
                    var: v,
                    positive: rng.gen_bool(0.5),
                }))
                .unwrap()
            })
            .collect(),
    )
}

/// A DNF with arbitrary polarities, for exercising class recognition.
pub fn unrestricted_dnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Dnf {
    Dnf::new(
        n,
        (0..k)
            .map(|_| {
                let vars = sample_vars(n, term_len(n, 3, rng), rng);
                Term::try_new(vars.into_iter().map(|v| Literal {
                    var: v,
                    positive: rng.gen_bool(0.5),
                }))
                .unwrap()
            })
            .collect(),
    )
}

/// A Horn-renamable DNF that is not syntactically Horn, built by renaming
/// a Horn formula under a flip set that breaks at least one term.
///
/// Needs n >= 2.
pub fn horn_renamable_non_horn_dnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> (Dnf, Renaming) {
    assert!(n >= 2 && k >= 1);
    // force a term with two negative literals so flipping both makes it
    // non-Horn
    let anchor_vars = sample_vars(n, 2, rng);
    let anchor = Term::try_new(anchor_vars.iter().map(|&v| Literal::negative(v))).unwrap();
    let mut terms = vec![anchor];
    for _ in 1..k {
        terms.push(horn_term(n, rng));
    }
    let mut flipped: VarSet = anchor_vars.into_iter().collect();
    for i in 1..=n {
        let v = VarId::new(i);
        if !flipped.contains(v) && rng.gen_bool(0.3) {
            flipped.insert(v);
        }
    }
    let renaming = Renaming::new(flipped);
    let renamed = Dnf::new(n, terms).apply_renaming(&renaming);
    debug_assert!(renamed.terms().iter().any(|t| t.positive_literals() >= 2));
    (renamed, renaming)
}

/// A satisfiable affine system: right-hand sides are read off a hidden
/// assignment, which is therefore always a model.
pub fn affine_system(n: u32, k: usize, rng: &mut ChaCha8Rng) -> AffineSystem {
    let mut hidden = Assignment::all_false(n);
    for i in 1..=n {
        hidden.set(VarId::new(i), rng.gen_bool(0.5));
    }
    let rows = (0..k)
        .map(|_| {
            let vars = sample_vars(n, term_len(n, 3, rng), rng);
            let parity = vars.iter().filter(|&&v| hidden.get(v)).count() % 2 == 1;
            LinearEquation::new(vars, parity)
        })
        .collect();
    AffineSystem::new(n, rows)
}

pub fn clause(n: u32, rng: &mut ChaCha8Rng) -> Clause {
    let vars = sample_vars(n, term_len(n, 3, rng), rng);
    Clause::new(vars.into_iter().map(|v| Literal {
        var: v,
        positive: rng.gen_bool(0.5),
    }))
}

pub fn positive_cnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Cnf {
    Cnf::new(
        n,
        (0..k)
            .map(|_| {
                let vars = sample_vars(n, term_len(n, 3, rng), rng);
                Clause::new(vars.into_iter().map(Literal::positive))
            })
            .collect(),
    )
}

pub fn negative_cnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Cnf {
    Cnf::new(
        n,
        (0..k)
            .map(|_| {
                let vars = sample_vars(n, term_len(n, 3, rng), rng);
                Clause::new(vars.into_iter().map(Literal::negative))
            })
            .collect(),
    )
}

/// A satisfiable Horn CNF: clauses are kept true under a hidden
/// assignment, defaulting literals negative and promoting one to positive
/// only when needed.
pub fn horn_cnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Cnf {
    let mut hidden = Assignment::all_false(n);
    for i in 1..=n {
        hidden.set(VarId::new(i), rng.gen_bool(0.5));
    }
    let clauses = (0..k)
        .map(|_| {
            let vars = sample_vars(n, term_len(n, 3, rng), rng);
            let mut lits: Vec<Literal> = vars.iter().map(|&v| Literal::negative(v)).collect();
            if !lits.iter().any(|&l| hidden.satisfies(l)) {
                // every chosen variable is true under the hidden model
                let slot = rng.gen_range(0..lits.len());
                lits[slot] = lits[slot].complement();
            }
            Clause::new(lits)
        })
        .collect();
    Cnf::new(n, clauses)
}

pub fn reverse_horn_cnf(n: u32, k: usize, rng: &mut ChaCha8Rng) -> Cnf {
    let flip_all = Renaming::new(VarSet::full(n));
    horn_cnf(n, k, rng).apply_renaming(&flip_all)
}

pub fn eqdisj(n: u32, k: usize, rng: &mut ChaCha8Rng) -> EquationDisjunction {
    EquationDisjunction::new(
        n,
        (0..k)
            .map(|_| {
                let vars = sample_vars(n, term_len(n, 3, rng), rng);
                LinearEquation::new(vars, rng.gen_bool(0.5))
            })
            .collect(),
    )
}

/// A random abducible set of at most `max_size` variables.
pub fn abducibles(n: u32, max_size: usize, rng: &mut ChaCha8Rng) -> VarSet {
    let size = rng.gen_range(0..=max_size.min(n as usize));
    sample_vars(n, size, rng).into_iter().collect()
}

pub fn sigma(class: SigmaClass, n: u32, k: usize, rng: &mut ChaCha8Rng) -> KnowledgeBase {
    match class {
        SigmaClass::Affine => KnowledgeBase::Affine(affine_system(n, k, rng)),
        SigmaClass::Horn => KnowledgeBase::Dnf(horn_dnf(n, k, rng)),
        SigmaClass::ReverseHorn => KnowledgeBase::Dnf(reverse_horn_dnf(n, k, rng)),
        SigmaClass::TwoDnf => KnowledgeBase::Dnf(two_dnf(n, k, rng)),
        SigmaClass::Positive => KnowledgeBase::Dnf(positive_dnf(n, k, rng)),
        SigmaClass::Negative => KnowledgeBase::Dnf(negative_dnf(n, k, rng)),
        SigmaClass::HornRenamable => {
            KnowledgeBase::Dnf(horn_renamable_non_horn_dnf(n.max(2), k, rng).0)
        }
    }
}

/// A query of the requested shape, matched to the knowledge-base class
/// where the shape demands it (the `MatchedCnf` and affine forms).
pub fn query(
    sigma_class: SigmaClass,
    shape: QueryClass,
    n: u32,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Query {
    match shape {
        QueryClass::Clause => Query::Clause(clause(n, rng)),
        QueryClass::Term => {
            if sigma_class == SigmaClass::Affine {
                // only single-literal terms are supported on the affine route
                let v = sample_vars(n, 1, rng)[0];
                Query::Term(
                    Term::try_new([Literal {
                        var: v,
                        positive: rng.gen_bool(0.5),
                    }])
                    .unwrap(),
                )
            } else {
                let vars = sample_vars(n, term_len(n, 3, rng), rng);
                let positive = match sigma_class {
                    SigmaClass::Horn => true,         // positive units
                    SigmaClass::ReverseHorn => false, // negative units
                    _ => true,
                };
                Query::Term(
                    Term::try_new(vars.into_iter().map(|v| Literal { var: v, positive })).unwrap(),
                )
            }
        }
        QueryClass::EqDisj => Query::EquationDisjunction(eqdisj(n, k.max(1), rng)),
        QueryClass::MatchedCnf => Query::Cnf(match sigma_class {
            SigmaClass::Horn => positive_cnf(n, k.max(1), rng),
            SigmaClass::ReverseHorn => negative_cnf(n, k.max(1), rng),
            SigmaClass::Positive => horn_cnf(n, k.max(1), rng),
            SigmaClass::Negative => reverse_horn_cnf(n, k.max(1), rng),
            // no supported cnf pairing exists; emit a positive cnf and let
            // the solver report the combination
            _ => positive_cnf(n, k.max(1), rng),
        }),
    }
}

/// A complete random problem. The knowledge base is satisfiable by
/// construction, so this cannot fail validation.
pub fn problem(
    sigma_class: SigmaClass,
    query_shape: QueryClass,
    n: u32,
    sigma_size: usize,
    query_size: usize,
    max_abducibles: usize,
    seed_rng: &mut ChaCha8Rng,
) -> AbductionProblem {
    let kb = sigma(sigma_class, n, sigma_size.max(1), seed_rng);
    let q = query(sigma_class, query_shape, n, query_size, seed_rng);
    let a = abducibles(n, max_abducibles, seed_rng);
    AbductionProblem::new(kb, q, a).expect("generated problems are well-formed")
}
