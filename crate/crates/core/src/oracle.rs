//! Brute-force truth-table reference implementations of models,
//! projection, full and best explanations, and relevance. Everything here
//! must stay obviously correct; the engines are tested against it.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::affine::{AffineSystem, EquationDisjunction};
use crate::engine::{AbductionProblem, Hypothesis, KnowledgeBase, Query};
use crate::formula::{Assignment, Clause, Cnf, Dnf, PartialAssignment, Term, VarId, VarSet};

/// Default bound on the variable count for model-set materialization.
pub const DEFAULT_MODEL_CAP: u32 = 20;

/// Bound on the abducible count for hypothesis enumeration.
pub const ABDUCIBLE_CAP: usize = 10;

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("{what} of size {size} exceeds the brute-force cap of {cap}")]
pub struct CapExceeded {
    pub what: &'static str,
    pub size: u64,
    pub cap: u64,
}

/// Anything that can be evaluated under a total assignment.
pub trait Evaluate {
    fn evaluate(&self, m: &Assignment) -> bool;
}

impl Evaluate for Dnf {
    fn evaluate(&self, m: &Assignment) -> bool {
        Dnf::evaluate(self, m)
    }
}

impl Evaluate for Cnf {
    fn evaluate(&self, m: &Assignment) -> bool {
        Cnf::evaluate(self, m)
    }
}

impl Evaluate for Term {
    fn evaluate(&self, m: &Assignment) -> bool {
        Term::evaluate(self, m)
    }
}

impl Evaluate for Clause {
    fn evaluate(&self, m: &Assignment) -> bool {
        Clause::evaluate(self, m)
    }
}

impl Evaluate for AffineSystem {
    fn evaluate(&self, m: &Assignment) -> bool {
        AffineSystem::evaluate(self, m)
    }
}

impl Evaluate for EquationDisjunction {
    fn evaluate(&self, m: &Assignment) -> bool {
        EquationDisjunction::evaluate(self, m)
    }
}

impl Evaluate for KnowledgeBase {
    fn evaluate(&self, m: &Assignment) -> bool {
        KnowledgeBase::evaluate(self, m)
    }
}

impl Evaluate for Query {
    fn evaluate(&self, m: &Assignment) -> bool {
        Query::evaluate(self, m)
    }
}

/// A materialized set of assignments to 1..n, stored as sorted bit masks
/// (bit i-1 carries the value of variable i).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModelSet {
    n: u32,
    members: Vec<u64>,
}

impl ModelSet {
    pub fn from_masks(n: u32, mut members: Vec<u64>) -> Self {
        members.sort_unstable();
        members.dedup();
        debug_assert!(members.iter().all(|&m| n == 64 || m < 1 << n));
        ModelSet { n, members }
    }

    pub fn empty(n: u32) -> Self {
        ModelSet {
            n,
            members: Vec::new(),
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn members(&self) -> &[u64] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, mask: u64) -> bool {
        self.members.binary_search(&mask).is_ok()
    }

    pub fn assignments(&self) -> impl Iterator<Item = Assignment> + '_ {
        self.members
            .iter()
            .map(|&m| Assignment::from_mask(self.n, m))
    }

    pub fn complement(&self) -> ModelSet {
        let members = (0..1u64 << self.n).filter(|&m| !self.contains(m)).collect();
        ModelSet { n: self.n, members }
    }

    pub fn intersect(&self, other: &ModelSet) -> ModelSet {
        assert_eq!(self.n, other.n);
        let members = self
            .members
            .iter()
            .copied()
            .filter(|&m| other.contains(m))
            .collect();
        ModelSet { n: self.n, members }
    }

    pub fn union(&self, other: &ModelSet) -> ModelSet {
        assert_eq!(self.n, other.n);
        let mut members = self.members.clone();
        members.extend(&other.members);
        ModelSet::from_masks(self.n, members)
    }

    /// Projection onto `a`: every assignment that agrees with some member
    /// on `a`, still over the full variable set.
    pub fn project(&self, a: &VarSet) -> ModelSet {
        let amask = varset_mask(a);
        let images: BTreeSet<u64> = self.members.iter().map(|&m| m & amask).collect();
        let members = (0..1u64 << self.n)
            .filter(|&m| images.contains(&(m & amask)))
            .collect();
        ModelSet { n: self.n, members }
    }
}

fn varset_mask(a: &VarSet) -> u64 {
    a.iter().fold(0u64, |m, v| m | 1 << v.zero_based())
}

fn check_cap(n: u32, cap: u32) -> Result<(), CapExceeded> {
    if n > cap {
        return Err(CapExceeded {
            what: "variable count",
            size: n.into(),
            cap: cap.into(),
        });
    }
    Ok(())
}

/// The exact model set of a formula by exhaustive evaluation.
pub fn models<F: Evaluate + ?Sized>(f: &F, n: u32) -> Result<ModelSet, CapExceeded> {
    models_with_cap(f, n, DEFAULT_MODEL_CAP)
}

pub fn models_with_cap<F: Evaluate + ?Sized>(
    f: &F,
    n: u32,
    cap: u32,
) -> Result<ModelSet, CapExceeded> {
    check_cap(n, cap)?;
    let members = (0..1u64 << n)
        .filter(|&mask| f.evaluate(&Assignment::from_mask(n, mask)))
        .collect();
    Ok(ModelSet { n, members })
}

/// All full explanations, computed by explicit set algebra over the
/// characterization: models of the knowledge base whose abducible part
/// cannot be reached from any countermodel of the query.
pub fn full_explanations(p: &AbductionProblem) -> Result<BTreeSet<Hypothesis>, CapExceeded> {
    let n = p.num_vars();
    check_cap(n, DEFAULT_MODEL_CAP)?;
    let a = p.abducibles();
    let m_kb = models(p.kb(), n)?;
    let m_query = models(p.query(), n)?;
    let countermodels = m_kb.intersect(&m_query.complement());
    let blocked = countermodels.project(a);
    let witnesses = m_kb.intersect(&blocked.complement());
    Ok(witnesses
        .assignments()
        .map(|m| Hypothesis::new(m.select(a)))
        .collect())
}

/// All subset-minimal explanations, by enumerating every hypothesis over
/// the abducibles and filtering.
pub fn best_explanations(p: &AbductionProblem) -> Result<BTreeSet<Hypothesis>, CapExceeded> {
    let n = p.num_vars();
    check_cap(n, DEFAULT_MODEL_CAP)?;
    let abds: Vec<VarId> = p.abducibles().iter().collect();
    if abds.len() > ABDUCIBLE_CAP {
        return Err(CapExceeded {
            what: "abducible count",
            size: abds.len() as u64,
            cap: ABDUCIBLE_CAP as u64,
        });
    }
    let m_kb = models(p.kb(), n)?;
    let query_holds: Vec<bool> = {
        let m_query = models(p.query(), n)?;
        (0..1u64 << n).map(|m| m_query.contains(m)).collect()
    };

    // each hypothesis is a (variables mentioned, values) mask pair
    let mut explanations: Vec<(u64, u64)> = Vec::new();
    let count = 3u64.pow(abds.len() as u32);
    for code in 0..count {
        let mut rest = code;
        let mut set_mask = 0u64;
        let mut val_mask = 0u64;
        for &v in &abds {
            let digit = rest % 3;
            rest /= 3;
            match digit {
                0 => {}
                1 => set_mask |= 1 << v.zero_based(),
                _ => {
                    set_mask |= 1 << v.zero_based();
                    val_mask |= 1 << v.zero_based();
                }
            }
        }
        let mut consistent = false;
        let mut entails = true;
        for &m in m_kb.members() {
            if m & set_mask == val_mask {
                consistent = true;
                if !query_holds[m as usize] {
                    entails = false;
                    break;
                }
            }
        }
        if consistent && entails {
            explanations.push((set_mask, val_mask));
        }
    }

    let minimal = explanations.iter().filter(|&&(set, val)| {
        !explanations
            .iter()
            .any(|&(oset, oval)| oset != set && oset & set == oset && oval == val & oset)
    });
    Ok(minimal
        .map(|&(set, val)| {
            let lits = abds
                .iter()
                .filter(|v| set >> v.zero_based() & 1 == 1)
                .map(|&v| crate::formula::Literal {
                    var: v,
                    positive: val >> v.zero_based() & 1 == 1,
                });
            Hypothesis::new(PartialAssignment::from_literals(lits).unwrap())
        })
        .collect())
}

/// Does some best explanation mention the variable?
pub fn relevance(p: &AbductionProblem, x: VarId) -> Result<bool, CapExceeded> {
    Ok(best_explanations(p)?.iter().any(|e| e.mentions(x)))
}
