//! The end-to-end search for best explanations: validation, class
//! dispatch, full-explanation search, greedy minimization, enumeration,
//! and necessity.

use std::fmt;

use thiserror::Error;

use crate::affine::{AffineSystem, EquationDisjunction, LinearEquation};
use crate::dnf::{
    find_falsifying_assignment, find_horn_renaming, is_tautology, is_tautology_guarded, DnfClass,
    GuardedDnf, UnsupportedClass,
};
use crate::formula::{Assignment, Clause, Cnf, Dnf, PartialAssignment, Term, VarId, VarSet};

/// The knowledge base of an abduction problem. Must be satisfiable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KnowledgeBase {
    Dnf(Dnf),
    Affine(AffineSystem),
}

impl KnowledgeBase {
    pub fn num_vars(&self) -> u32 {
        match self {
            KnowledgeBase::Dnf(f) => f.num_vars(),
            KnowledgeBase::Affine(s) => s.num_vars(),
        }
    }

    pub fn is_satisfiable(&self) -> bool {
        match self {
            KnowledgeBase::Dnf(f) => !f.is_empty(),
            KnowledgeBase::Affine(s) => s.is_satisfiable(),
        }
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        match self {
            KnowledgeBase::Dnf(f) => f.evaluate(m),
            KnowledgeBase::Affine(s) => s.evaluate(m),
        }
    }
}

/// The query of an abduction problem.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Query {
    Clause(Clause),
    Cnf(Cnf),
    Term(Term),
    EquationDisjunction(EquationDisjunction),
}

impl Query {
    pub fn max_var(&self) -> Option<VarId> {
        match self {
            Query::Clause(c) => c.max_var(),
            Query::Cnf(f) => f.clauses().iter().filter_map(Clause::max_var).max(),
            Query::Term(t) => t.max_var(),
            Query::EquationDisjunction(d) => d
                .equations()
                .iter()
                .filter_map(LinearEquation::max_var)
                .max(),
        }
    }

    /// The per-class syntactic satisfiability check used at validation
    /// time. A CNF passes when it has no empty clause; deeper checks are
    /// deliberately not attempted.
    pub fn is_satisfiable_syntactic(&self) -> bool {
        match self {
            Query::Clause(c) => !c.is_empty(),
            Query::Cnf(f) => !f.has_empty_clause(),
            Query::Term(_) => true,
            Query::EquationDisjunction(d) => d.is_satisfiable(),
        }
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        match self {
            Query::Clause(c) => c.evaluate(m),
            Query::Cnf(f) => f.evaluate(m),
            Query::Term(t) => t.evaluate(m),
            Query::EquationDisjunction(d) => d.evaluate(m),
        }
    }
}

/// Rejected at problem construction, as opposed to a solve-time outcome.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum InvalidProblem {
    #[error("knowledge base is unsatisfiable")]
    UnsatisfiableKnowledgeBase,
    #[error("query is unsatisfiable")]
    UnsatisfiableQuery,
    #[error("query mentions variable {var} but the problem declares {n} variables")]
    QueryVarOutOfRange { var: u32, n: u32 },
    #[error("abducible {var} out of range (problem declares {n} variables)")]
    AbducibleOutOfRange { var: u32, n: u32 },
}

/// A knowledge base, a query, and the abducible variables hypotheses may
/// mention. Construction enforces the well-formedness conditions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbductionProblem {
    n: u32,
    kb: KnowledgeBase,
    query: Query,
    abducibles: VarSet,
}

impl AbductionProblem {
    pub fn new(
        kb: KnowledgeBase,
        query: Query,
        abducibles: VarSet,
    ) -> Result<Self, InvalidProblem> {
        let n = kb.num_vars();
        if let Some(v) = query.max_var() {
            if v.get() > n {
                return Err(InvalidProblem::QueryVarOutOfRange { var: v.get(), n });
            }
        }
        if let Some(v) = abducibles.max_var() {
            if v.get() > n {
                return Err(InvalidProblem::AbducibleOutOfRange { var: v.get(), n });
            }
        }
        if !kb.is_satisfiable() {
            return Err(InvalidProblem::UnsatisfiableKnowledgeBase);
        }
        if !query.is_satisfiable_syntactic() {
            return Err(InvalidProblem::UnsatisfiableQuery);
        }
        Ok(AbductionProblem {
            n,
            kb,
            query,
            abducibles,
        })
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn kb(&self) -> &KnowledgeBase {
        &self.kb
    }

    pub fn query(&self) -> &Query {
        &self.query
    }

    pub fn abducibles(&self) -> &VarSet {
        &self.abducibles
    }

    /// The same problem over a different abducible set.
    pub fn with_abducibles(&self, abducibles: VarSet) -> Result<Self, InvalidProblem> {
        AbductionProblem::new(self.kb.clone(), self.query.clone(), abducibles)
    }
}

/// A consistent set of literals over the abducibles, read as their
/// conjunction. A full hypothesis assigns every abducible.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Hypothesis {
    lits: PartialAssignment,
}

impl Hypothesis {
    pub fn new(lits: PartialAssignment) -> Self {
        Hypothesis { lits }
    }

    pub fn empty() -> Self {
        Hypothesis {
            lits: PartialAssignment::empty(),
        }
    }

    pub fn literals(&self) -> &[crate::formula::Literal] {
        self.lits.literals()
    }

    pub fn as_partial(&self) -> &PartialAssignment {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn mentions(&self, v: VarId) -> bool {
        self.lits.value_of(v).is_some()
    }
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.lits)
    }
}

/// What `solve` reports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolveOutcome {
    /// A subset-minimal explanation.
    Best(Hypothesis),
    NoExplanation,
    /// The representation pair is outside the supported classes.
    Unsupported(String),
}

/// The dispatch taken for a supported (knowledge base, query) pair.
enum Route {
    /// Affine knowledge base with a query reduced to a disjunction of
    /// linear equations.
    Affine { alpha: EquationDisjunction },
    /// Tractable DNF knowledge base with a single-clause query; the
    /// negated query is kept factored out as a guard.
    DnfClause { class: DnfClass, alpha: Clause },
    /// DNF knowledge base with a CNF query from one of the pairings whose
    /// term-by-clause products stay inside a tractable class.
    DnfCnf { alpha: Cnf },
}

/// The tautology-tractable class of a knowledge base DNF, computing the
/// renaming check only when no cheap flag holds.
fn tractable_class(f: &Dnf) -> Option<DnfClass> {
    let mut class = DnfClass::syntactic(f);
    if class.tautology_tractable() {
        return Some(class);
    }
    class.horn_renamable = find_horn_renaming(f).is_some();
    class.tautology_tractable().then_some(class)
}

fn resolve_route(p: &AbductionProblem) -> Result<Route, String> {
    let n = p.n;
    match (&p.kb, &p.query) {
        (KnowledgeBase::Affine(_), q) => {
            let alpha =
                match q {
                    Query::EquationDisjunction(d) => d.clone(),
                    Query::Clause(c) => EquationDisjunction::from_clause(n, c),
                    Query::Term(t) => match t.literals() {
                        [] => EquationDisjunction::new(n, vec![LinearEquation::constant(false)]),
                        [l] => EquationDisjunction::new(n, vec![LinearEquation::unit(*l)]),
                        _ => return Err(
                            "affine knowledge bases support term queries only when they reduce \
                             to a single equation (at most one literal)"
                                .into(),
                        ),
                    },
                    Query::Cnf(f) => match f.clauses() {
                        [] => EquationDisjunction::new(n, vec![LinearEquation::constant(false)]),
                        [c] => EquationDisjunction::from_clause(n, c),
                        _ => {
                            return Err(
                                "affine knowledge bases support cnf queries only when they reduce \
                             to a single clause"
                                    .into(),
                            )
                        }
                    },
                };
            Ok(Route::Affine { alpha })
        }
        (KnowledgeBase::Dnf(sigma), q) => {
            // Single-clause query forms all go through the guarded route.
            let as_cnf: Cnf = match q {
                Query::EquationDisjunction(_) => {
                    return Err(
                        "equation-disjunction queries require an affine knowledge base".into(),
                    )
                }
                Query::Clause(c) => {
                    let class = tractable_class(sigma).ok_or_else(|| {
                        "dnf knowledge base is not Horn, reverse Horn, 2-DNF, or Horn-renamable"
                            .to_string()
                    })?;
                    return Ok(Route::DnfClause {
                        class,
                        alpha: c.clone(),
                    });
                }
                Query::Term(t) => Cnf::from_term(n, t),
                Query::Cnf(f) => f.clone(),
            };
            if let [c] = as_cnf.clauses() {
                let class = tractable_class(sigma).ok_or_else(|| {
                    "dnf knowledge base is not Horn, reverse Horn, 2-DNF, or Horn-renamable"
                        .to_string()
                })?;
                return Ok(Route::DnfClause {
                    class,
                    alpha: c.clone(),
                });
            }
            if as_cnf.is_empty() {
                // a trivially true query works for any tractable base
                if tractable_class(sigma).is_some() {
                    return Ok(Route::DnfCnf { alpha: as_cnf });
                }
                return Err(
                    "dnf knowledge base is not Horn, reverse Horn, 2-DNF, or Horn-renamable".into(),
                );
            }
            let sigma_class = DnfClass::syntactic(sigma);
            let supported = (sigma_class.horn && as_cnf.is_positive())
                || (sigma_class.reverse_horn && as_cnf.is_negative())
                || (sigma_class.positive && as_cnf.is_horn())
                || (sigma_class.negative && as_cnf.is_reverse_horn());
            if !supported {
                return Err(
                    "dnf knowledge base and cnf query are outside the supported pairings \
                     (Horn with positive, reverse Horn with negative, positive with Horn, \
                     negative with reverse Horn)"
                        .into(),
                );
            }
            Ok(Route::DnfCnf { alpha: as_cnf })
        }
    }
}

fn kb_dnf(p: &AbductionProblem) -> &Dnf {
    match &p.kb {
        KnowledgeBase::Dnf(f) => f,
        KnowledgeBase::Affine(_) => unreachable!("route guarantees a dnf knowledge base"),
    }
}

fn kb_affine(p: &AbductionProblem) -> &AffineSystem {
    match &p.kb {
        KnowledgeBase::Affine(s) => s,
        KnowledgeBase::Dnf(_) => unreachable!("route guarantees an affine knowledge base"),
    }
}

/// The per-route representation of the projected countermodel set: a
/// formula over the abducibles whose models are exactly the abducible
/// parts that extend into a model of (knowledge base and not query).
enum Projection {
    Affine(AffineSystem),
    Guarded(GuardedDnf, DnfClass),
    Plain(Dnf, DnfClass),
}

fn build_projection(p: &AbductionProblem, route: &Route) -> Result<Projection, UnsupportedClass> {
    let a = &p.abducibles;
    match route {
        Route::Affine { alpha } => {
            let combined = kb_affine(p).with_rows(alpha.negate().rows().iter().cloned());
            Ok(Projection::Affine(combined.project(a)))
        }
        Route::DnfClause { class, alpha } => {
            let sigma = kb_dnf(p);
            let guarded = match alpha.negated_term() {
                // tautological query: the countermodel set is empty
                None => GuardedDnf::new(Term::empty(), Dnf::new(p.n, Vec::new())),
                Some(t_alpha) => {
                    let body = sigma.condition(&t_alpha.as_partial()).project(a);
                    GuardedDnf::new(t_alpha.restrict(a), body)
                }
            };
            Ok(Projection::Guarded(guarded, *class))
        }
        Route::DnfCnf { alpha } => {
            let sigma = kb_dnf(p);
            let mut products = Vec::new();
            for clause in alpha.clauses() {
                let Some(neg) = clause.negated_term() else {
                    continue; // tautological clause: its negation has no models
                };
                for s in sigma.terms() {
                    if let Some(u) = s.union(&neg) {
                        products.push(u);
                    }
                }
            }
            let projected = Dnf::new(p.n, products).project(a);
            let class = tractable_class(&projected).ok_or_else(|| {
                UnsupportedClass("projected product formula left every tractable class".into())
            })?;
            Ok(Projection::Plain(projected, class))
        }
    }
}

impl Projection {
    /// Does some full explanation extend `fixed`? This is an exact
    /// emptiness test for the witness set constrained by `fixed`, so the
    /// enumeration never descends into a dead branch.
    fn has_witness_extending(
        &self,
        p: &AbductionProblem,
        fixed: &PartialAssignment,
    ) -> Result<bool, UnsupportedClass> {
        match self {
            Projection::Affine(projected) => {
                let constrained = kb_affine(p).with_units(fixed.literals());
                Ok(projected
                    .complement()
                    .equations()
                    .iter()
                    .any(|eq| constrained.with_rows([eq.clone()]).is_satisfiable()))
            }
            Projection::Guarded(g, class) => {
                for t in kb_dnf(p).terms() {
                    let Some(joined) = fixed.union(&t.restrict(&p.abducibles).as_partial()) else {
                        continue;
                    };
                    if !is_tautology_guarded(&g.condition(&joined), *class)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
            Projection::Plain(f, class) => {
                for t in kb_dnf(p).terms() {
                    let Some(joined) = fixed.union(&t.restrict(&p.abducibles).as_partial()) else {
                        continue;
                    };
                    if !is_tautology(&f.condition(&joined), *class)? {
                        return Ok(true);
                    }
                }
                Ok(false)
            }
        }
    }
}

/// Merges a knowledge-base term into a model candidate: the abducible part
/// stays as found, the term's other literals are restored.
fn merge_term_outside(mut m: Assignment, t: &Term, a: &VarSet) -> Assignment {
    for &l in t.literals() {
        if !a.contains(l.var) {
            m.set(l.var, l.positive);
        }
    }
    m
}

fn find_full_with_route(
    p: &AbductionProblem,
    route: &Route,
) -> Result<Option<Hypothesis>, UnsupportedClass> {
    let a = &p.abducibles;
    let projection = build_projection(p, route)?;
    match (&projection, route) {
        (Projection::Affine(projected), Route::Affine { .. }) => {
            let sigma = kb_affine(p);
            // Every model of (knowledge base and some flipped row) selects a
            // full explanation; distribute the conjunction over the
            // complement disjunction and take the first satisfiable branch.
            for eq in projected.complement().equations() {
                if let Some(m) = sigma.with_rows([eq.clone()]).solve() {
                    return Ok(Some(Hypothesis::new(m.select(a))));
                }
            }
            Ok(None)
        }
        (Projection::Guarded(g, class), _) => {
            let sigma = kb_dnf(p);
            for t in sigma.terms() {
                let mu = t.restrict(a).as_partial();
                if !is_tautology_guarded(&g.condition(&mu), *class)? {
                    let falsifier = g
                        .find_falsifying(*class, &mu)?
                        .expect("a non-covering projection admits a falsifier");
                    let m = merge_term_outside(falsifier, t, a);
                    debug_assert!(p.kb.evaluate(&m));
                    return Ok(Some(Hypothesis::new(m.select(a))));
                }
            }
            Ok(None)
        }
        (Projection::Plain(f, class), _) => {
            let sigma = kb_dnf(p);
            for t in sigma.terms() {
                let mu = t.restrict(a).as_partial();
                if !is_tautology(&f.condition(&mu), *class)? {
                    let falsifier = find_falsifying_assignment(f, *class, &mu)?
                        .expect("a non-covering projection admits a falsifier");
                    let m = merge_term_outside(falsifier, t, a);
                    debug_assert!(p.kb.evaluate(&m));
                    return Ok(Some(Hypothesis::new(m.select(a))));
                }
            }
            Ok(None)
        }
        _ => unreachable!("projection variant always matches its route"),
    }
}

/// Entailment test used by minimization and explanation checking:
/// knowledge base conjoined with the hypothesis implies the query.
fn entails_with_route(p: &AbductionProblem, route: &Route, e: &PartialAssignment) -> bool {
    match route {
        Route::Affine { alpha } => kb_affine(p)
            .with_units(e.literals())
            .with_rows(alpha.negate().rows().iter().cloned())
            .solve()
            .is_none(),
        Route::DnfClause { alpha, .. } => {
            dnf_entails(kb_dnf(p), e, &Cnf::from_clause(p.n, alpha.clone()))
        }
        Route::DnfCnf { alpha } => dnf_entails(kb_dnf(p), e, alpha),
    }
}

fn dnf_entails(sigma: &Dnf, e: &PartialAssignment, alpha: &Cnf) -> bool {
    // Conditioning erases e's variables, but the query may mention them;
    // reattach e before the containment test.
    sigma
        .condition(e)
        .conjoin_term(&Term::from_partial(e))
        .entails(alpha)
}

fn satisfiable_with(p: &AbductionProblem, e: &PartialAssignment) -> bool {
    match &p.kb {
        KnowledgeBase::Dnf(f) => !f.condition(e).is_empty(),
        KnowledgeBase::Affine(s) => s.with_units(e.literals()).is_satisfiable(),
    }
}

/// Is the hypothesis an explanation: consistent with the knowledge base
/// and sufficient for the query?
pub fn is_explanation(p: &AbductionProblem, e: &Hypothesis) -> Result<bool, UnsupportedClass> {
    debug_assert!(
        e.literals().iter().all(|l| p.abducibles.contains(l.var)),
        "hypothesis literals must be formed upon the abducibles"
    );
    let route = resolve_route(p).map_err(UnsupportedClass)?;
    Ok(satisfiable_with(p, e.as_partial()) && entails_with_route(p, &route, e.as_partial()))
}

/// The greedy reduction: literals are dropped in ascending variable order
/// whenever entailment survives without them. Consistency never needs
/// rechecking, since removing literals can only grow the model set.
pub fn minimize(p: &AbductionProblem, f: &Hypothesis) -> Result<Hypothesis, UnsupportedClass> {
    let route = resolve_route(p).map_err(UnsupportedClass)?;
    debug_assert!(
        satisfiable_with(p, f.as_partial()) && entails_with_route(p, &route, f.as_partial()),
        "minimize expects an explanation"
    );
    Ok(minimize_with_route(p, &route, f))
}

fn minimize_with_route(p: &AbductionProblem, route: &Route, f: &Hypothesis) -> Hypothesis {
    let mut current = f.as_partial().clone();
    for &l in f.literals() {
        let trial = current.without_var(l.var);
        if entails_with_route(p, route, &trial) {
            current = trial;
        }
    }
    Hypothesis::new(current)
}

/// A full explanation (assigning every abducible), or `None` when no
/// hypothesis at all explains the query.
pub fn find_full_explanation(p: &AbductionProblem) -> Result<Option<Hypothesis>, UnsupportedClass> {
    let route = resolve_route(p).map_err(UnsupportedClass)?;
    find_full_with_route(p, &route)
}

/// Finds a best (subset-minimal) explanation, reports that none exists,
/// or rejects the representation pair.
pub fn solve(p: &AbductionProblem) -> SolveOutcome {
    let route = match resolve_route(p) {
        Err(reason) => return SolveOutcome::Unsupported(reason),
        Ok(route) => route,
    };
    match find_full_with_route(p, &route) {
        Err(e) => SolveOutcome::Unsupported(e.0),
        Ok(None) => SolveOutcome::NoExplanation,
        Ok(Some(full)) => SolveOutcome::Best(minimize_with_route(p, &route, &full)),
    }
}

/// All full explanations in lexicographic order (negative literal before
/// positive, variables ascending), optionally truncated.
pub fn enumerate_full(
    p: &AbductionProblem,
    limit: Option<usize>,
) -> Result<Vec<Hypothesis>, UnsupportedClass> {
    let route = resolve_route(p).map_err(UnsupportedClass)?;
    let max = limit.unwrap_or(usize::MAX);
    let mut out = Vec::new();
    if max == 0 {
        return Ok(out);
    }
    let projection = build_projection(p, &route)?;
    let abds: Vec<VarId> = p.abducibles.iter().collect();
    let mut partial = PartialAssignment::empty();
    descend(p, &projection, &abds, 0, &mut partial, max, &mut out)?;
    Ok(out)
}

fn descend(
    p: &AbductionProblem,
    projection: &Projection,
    abds: &[VarId],
    depth: usize,
    partial: &mut PartialAssignment,
    max: usize,
    out: &mut Vec<Hypothesis>,
) -> Result<(), UnsupportedClass> {
    if out.len() >= max {
        return Ok(());
    }
    if !projection.has_witness_extending(p, partial)? {
        return Ok(());
    }
    // On a total assignment the witness test degenerates to "this is a
    // full explanation", so reaching the leaf means emit.
    if depth == abds.len() {
        out.push(Hypothesis::new(partial.clone()));
        return Ok(());
    }
    let v = abds[depth];
    for positive in [false, true] {
        let lit = crate::formula::Literal { var: v, positive };
        let saved = partial.clone();
        *partial = partial.with(lit).expect("abducible is unassigned");
        descend(p, projection, abds, depth + 1, partial, max, out)?;
        *partial = saved;
    }
    Ok(())
}

/// An abducible is necessary when the problem without it has no
/// explanation at all.
pub fn is_necessary(p: &AbductionProblem, x: VarId) -> Result<bool, UnsupportedClass> {
    debug_assert!(p.abducibles.contains(x), "x must be an abducible");
    resolve_route(p).map_err(UnsupportedClass)?;
    let mut reduced = p.abducibles.clone();
    reduced.remove(x);
    let sub = p
        .with_abducibles(reduced)
        .expect("shrinking the abducibles preserves validity");
    Ok(matches!(solve(&sub), SolveOutcome::NoExplanation))
}
