//! DNF class recognition, polynomial tautology deciders, variable
//! renamings, guarded formulas, and falsifying-assignment search.

use std::fmt;

use thiserror::Error;

use crate::formula::{
    Assignment, Clause, Cnf, Dnf, Literal, PartialAssignment, Term, VarId, VarSet,
};
use crate::twosat::TwoSat;

/// Raised when an operation needs a tautology-tractable class and the
/// given hint provides none.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unsupported class combination: {0}")]
pub struct UnsupportedClass(pub String);

/// Syntactic class flags of a DNF. Each flag is computed independently
/// from its definition, so several can hold at once (a negative DNF, for
/// instance, is also Horn).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DnfClass {
    /// At most one positive literal per term.
    pub horn: bool,
    /// At most one negative literal per term.
    pub reverse_horn: bool,
    /// No negative literals at all.
    pub positive: bool,
    /// No positive literals at all.
    pub negative: bool,
    /// At most two literals per term.
    pub two_dnf: bool,
    /// Becomes Horn after flipping the polarity of some variables.
    pub horn_renamable: bool,
}

impl DnfClass {
    /// Does any flag admit a polynomial tautology decider?
    pub fn tautology_tractable(&self) -> bool {
        self.horn
            || self.reverse_horn
            || self.positive
            || self.negative
            || self.two_dnf
            || self.horn_renamable
    }

    /// The cheaply computable flags; Horn renamability is left false.
    pub(crate) fn syntactic(f: &Dnf) -> DnfClass {
        let mut class = DnfClass {
            horn: true,
            reverse_horn: true,
            positive: true,
            negative: true,
            two_dnf: true,
            horn_renamable: false,
        };
        for t in f.terms() {
            let pos = t.positive_literals();
            let neg = t.negative_literals();
            class.horn &= pos <= 1;
            class.reverse_horn &= neg <= 1;
            class.positive &= neg == 0;
            class.negative &= pos == 0;
            class.two_dnf &= t.len() <= 2;
        }
        class
    }
}

impl fmt::Display for DnfClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let flags = [
            (self.horn, "horn"),
            (self.reverse_horn, "reverse-horn"),
            (self.positive, "positive"),
            (self.negative, "negative"),
            (self.two_dnf, "2dnf"),
            (self.horn_renamable, "horn-renamable"),
        ];
        let mut first = true;
        for (on, name) in flags {
            if on {
                if !first {
                    write!(f, ",")?;
                }
                write!(f, "{name}")?;
                first = false;
            }
        }
        if first {
            write!(f, "none")?;
        }
        Ok(())
    }
}

/// A set of variables whose polarity is flipped throughout a formula.
/// Applying the same renaming twice is the identity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Renaming {
    flipped: VarSet,
}

impl Renaming {
    pub fn new(flipped: VarSet) -> Self {
        Renaming { flipped }
    }

    pub fn empty() -> Self {
        Renaming::default()
    }

    pub fn flips(&self, v: VarId) -> bool {
        self.flipped.contains(v)
    }

    pub fn flipped_vars(&self) -> &VarSet {
        &self.flipped
    }

    pub fn is_empty(&self) -> bool {
        self.flipped.is_empty()
    }
}

/// Polarity flipping for every value a renaming acts on. Satisfaction is
/// transported: m satisfies f exactly when the renamed m satisfies the
/// renamed f.
pub trait ApplyRenaming {
    fn apply_renaming(&self, r: &Renaming) -> Self;
}

impl ApplyRenaming for Literal {
    fn apply_renaming(&self, r: &Renaming) -> Literal {
        if r.flips(self.var) {
            self.complement()
        } else {
            *self
        }
    }
}

impl ApplyRenaming for Term {
    fn apply_renaming(&self, r: &Renaming) -> Term {
        Term::try_new(self.literals().iter().map(|l| l.apply_renaming(r)))
            .expect("renaming preserves consistency")
    }
}

impl ApplyRenaming for Clause {
    fn apply_renaming(&self, r: &Renaming) -> Clause {
        Clause::new(self.literals().iter().map(|l| l.apply_renaming(r)))
    }
}

impl ApplyRenaming for PartialAssignment {
    fn apply_renaming(&self, r: &Renaming) -> PartialAssignment {
        PartialAssignment::from_literals(self.literals().iter().map(|l| l.apply_renaming(r)))
            .expect("renaming preserves consistency")
    }
}

impl ApplyRenaming for Assignment {
    fn apply_renaming(&self, r: &Renaming) -> Assignment {
        let mut m = self.clone();
        for v in r.flipped_vars().iter() {
            if v.get() <= self.num_vars() {
                m.set(v, !self.get(v));
            }
        }
        m
    }
}

impl ApplyRenaming for Dnf {
    fn apply_renaming(&self, r: &Renaming) -> Dnf {
        Dnf::new(
            self.num_vars(),
            self.terms().iter().map(|t| t.apply_renaming(r)).collect(),
        )
    }
}

impl ApplyRenaming for Cnf {
    fn apply_renaming(&self, r: &Renaming) -> Cnf {
        Cnf::new(
            self.num_vars(),
            self.clauses().iter().map(|c| c.apply_renaming(r)).collect(),
        )
    }
}

/// All class flags of a DNF, including Horn renamability.
pub fn classify(f: &Dnf) -> DnfClass {
    let mut class = DnfClass::syntactic(f);
    class.horn_renamable = find_horn_renaming(f).is_some();
    class
}

fn is_syntactically_horn(f: &Dnf) -> bool {
    f.terms().iter().all(|t| t.positive_literals() <= 1)
}

/// Searches for a renaming that turns the formula Horn.
///
/// Reduced to 2-SAT over one flip proposition per variable: for every pair
/// of literals in a term, forbid the flip choices under which both become
/// positive. A Horn input always yields the empty renaming.
pub fn find_horn_renaming(f: &Dnf) -> Option<Renaming> {
    if is_syntactically_horn(f) {
        return Some(Renaming::empty());
    }
    let n = f.num_vars() as usize;
    let mut ts = TwoSat::new(n);
    for t in f.terms() {
        let lits = t.literals();
        for i in 0..lits.len() {
            for j in i + 1..lits.len() {
                // Literal l ends up positive exactly when its variable's flip
                // proposition equals "l was negative"; forbid both-positive.
                ts.add_clause(
                    (lits[i].var.zero_based(), lits[i].positive),
                    (lits[j].var.zero_based(), lits[j].positive),
                );
            }
        }
    }
    let model = ts.solve()?;
    let flipped: VarSet = model
        .iter()
        .enumerate()
        .filter(|&(_, &flip)| flip)
        .map(|(i, _)| VarId::new(i as u32 + 1))
        .collect();
    let renaming = Renaming::new(flipped);
    debug_assert!(is_syntactically_horn(&f.apply_renaming(&renaming)));
    Some(renaming)
}

/// The clauses of the negated formula: each term becomes the disjunction
/// of its complemented literals.
fn dual_clauses(f: &Dnf) -> Vec<Vec<Literal>> {
    f.terms()
        .iter()
        .map(|t| t.literals().iter().map(|l| l.complement()).collect())
        .collect()
}

/// Unit propagation to fixpoint; reports satisfiability.
///
/// Complete when the clause set is uniformly Horn (assign the rest 0) or
/// uniformly reverse Horn (assign the rest 1); only conflict detection is
/// needed either way. Runs in time linear in the formula size.
fn unit_prop_sat(n: u32, clauses: &[Vec<Literal>]) -> bool {
    let lit_id = |l: Literal| 2 * l.var.zero_based() + usize::from(!l.positive);
    let mut occ: Vec<Vec<u32>> = vec![Vec::new(); 2 * n as usize];
    let mut remaining: Vec<u32> = Vec::with_capacity(clauses.len());
    let mut satisfied = vec![false; clauses.len()];
    let mut value: Vec<Option<bool>> = vec![None; n as usize];
    let mut queue: Vec<Literal> = Vec::new();

    for (ci, clause) in clauses.iter().enumerate() {
        if clause.is_empty() {
            return false;
        }
        remaining.push(clause.len() as u32);
        for &l in clause {
            occ[lit_id(l)].push(ci as u32);
        }
        if clause.len() == 1 {
            queue.push(clause[0]);
        }
    }

    while let Some(l) = queue.pop() {
        match value[l.var.zero_based()] {
            Some(v) if v == l.positive => continue,
            Some(_) => return false,
            None => value[l.var.zero_based()] = Some(l.positive),
        }
        for &ci in &occ[lit_id(l)] {
            satisfied[ci as usize] = true;
        }
        for &ci in &occ[lit_id(l.complement())] {
            let ci = ci as usize;
            if satisfied[ci] {
                continue;
            }
            remaining[ci] -= 1;
            match remaining[ci] {
                0 => return false,
                1 => {
                    let unit = clauses[ci]
                        .iter()
                        .copied()
                        .find(|x| value[x.var.zero_based()].is_none())
                        .expect("one unassigned literal must remain");
                    queue.push(unit);
                }
                _ => {}
            }
        }
    }
    true
}

/// Satisfiability of the negated formula when every term has at most two
/// literals, via the implication graph.
fn dual_two_cnf_sat(f: &Dnf) -> bool {
    let mut ts = TwoSat::new(f.num_vars() as usize);
    for t in f.terms() {
        let neg: Vec<Literal> = t.literals().iter().map(|l| l.complement()).collect();
        match neg.as_slice() {
            [] => ts.add_empty_clause(),
            [a] => ts.add_unit((a.var.zero_based(), a.positive)),
            [a, b] => ts.add_clause(
                (a.var.zero_based(), a.positive),
                (b.var.zero_based(), b.positive),
            ),
            _ => unreachable!("term too long for the 2-DNF decider"),
        }
    }
    ts.solve().is_some()
}

/// Does every assignment to 1..n satisfy the formula? Dispatches on the
/// first tractable flag of the hint; every decider works by refuting the
/// negated formula.
///
/// The hint must be honest: each set flag is a promise that the formula is
/// in that class.
pub fn is_tautology(f: &Dnf, hint: DnfClass) -> Result<bool, UnsupportedClass> {
    if hint.positive {
        // the all-zeros assignment falsifies every nonempty positive term
        return Ok(f.has_empty_term());
    }
    if hint.negative {
        return Ok(f.has_empty_term());
    }
    if hint.horn || hint.reverse_horn {
        // The dual CNF of a Horn DNF is reverse Horn and vice versa; unit
        // propagation decides both.
        return Ok(!unit_prop_sat(f.num_vars(), &dual_clauses(f)));
    }
    if hint.two_dnf {
        return Ok(!dual_two_cnf_sat(f));
    }
    if hint.horn_renamable {
        let renaming = find_horn_renaming(f).ok_or_else(|| {
            UnsupportedClass("formula hinted Horn-renamable admits no renaming".into())
        })?;
        let renamed = f.apply_renaming(&renaming);
        return Ok(!unit_prop_sat(renamed.num_vars(), &dual_clauses(&renamed)));
    }
    Err(UnsupportedClass(
        "no tautology-tractable flag in the class hint".into(),
    ))
}

/// A consistent term conjoined with a DNF body over disjoint variables.
/// An empty guard with an empty body denotes the constant false.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GuardedDnf {
    guard: Term,
    body: Dnf,
}

impl GuardedDnf {
    pub fn new(guard: Term, body: Dnf) -> Self {
        debug_assert!(
            guard.literals().iter().all(|l| !body.mentions_var(l.var)),
            "guard and body must not share variables"
        );
        GuardedDnf { guard, body }
    }

    pub fn guard(&self) -> &Term {
        &self.guard
    }

    pub fn body(&self) -> &Dnf {
        &self.body
    }

    pub fn num_vars(&self) -> u32 {
        self.body.num_vars()
    }

    /// Conditioning distributes over the conjunction: entailed guard
    /// literals are dropped, a contradicted guard collapses the whole
    /// formula to false.
    pub fn condition(&self, p: &PartialAssignment) -> GuardedDnf {
        let mut residual = Vec::new();
        for &l in self.guard.literals() {
            match p.value_of(l.var) {
                Some(v) if v == l.positive => {}
                Some(_) => {
                    return GuardedDnf {
                        guard: Term::empty(),
                        body: Dnf::new(self.body.num_vars(), Vec::new()),
                    }
                }
                None => residual.push(l),
            }
        }
        GuardedDnf {
            guard: Term::try_new(residual).expect("residual guard stays consistent"),
            body: self.body.condition(p),
        }
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        self.guard.evaluate(m) && self.body.evaluate(m)
    }

    /// A total assignment extending `fixed` that falsifies the formula, or
    /// `None` when none exists. A residual guard literal is the cheapest
    /// thing to falsify; otherwise the search runs on the body.
    pub fn find_falsifying(
        &self,
        body_hint: DnfClass,
        fixed: &PartialAssignment,
    ) -> Result<Option<Assignment>, UnsupportedClass> {
        let conditioned = self.condition(fixed);
        if let Some(&l) = conditioned.guard.literals().first() {
            let extended = fixed
                .with(l.complement())
                .expect("residual guard variables are unassigned");
            return Ok(Some(extended.fill_false(self.num_vars())));
        }
        if conditioned.body.is_empty() {
            // constant false under `fixed`: anything extends
            return Ok(Some(fixed.fill_false(self.num_vars())));
        }
        find_falsifying_assignment(&self.body, body_hint, fixed)
    }
}

/// Is a guarded formula satisfied by every assignment? A nonempty
/// consistent guard never is, so this reduces to the body.
pub fn is_tautology_guarded(g: &GuardedDnf, body_hint: DnfClass) -> Result<bool, UnsupportedClass> {
    if !g.guard().is_empty() {
        return Ok(false);
    }
    is_tautology(g.body(), body_hint)
}

/// Search-to-decision self-reduction: extends `fixed` to a total
/// assignment falsifying the formula, visiting unfixed variables in
/// ascending order and preferring 0. Returns `None` exactly when the
/// formula conditioned on `fixed` is a tautology.
pub fn find_falsifying_assignment(
    f: &Dnf,
    hint: DnfClass,
    fixed: &PartialAssignment,
) -> Result<Option<Assignment>, UnsupportedClass> {
    let mut current = f.condition(fixed);
    if is_tautology(&current, hint)? {
        return Ok(None);
    }
    let mut chosen = fixed.clone();
    for i in 1..=f.num_vars() {
        let v = VarId::new(i);
        if chosen.value_of(v).is_some() {
            continue;
        }
        if !current.mentions_var(v) {
            chosen = chosen.with(Literal::negative(v)).expect("v is unassigned");
            continue;
        }
        let zero = PartialAssignment::from_literals([Literal::negative(v)]).unwrap();
        let conditioned = current.condition(&zero);
        if !is_tautology(&conditioned, hint)? {
            current = conditioned;
            chosen = chosen.with(Literal::negative(v)).expect("v is unassigned");
        } else {
            let one = PartialAssignment::from_literals([Literal::positive(v)]).unwrap();
            let conditioned = current.condition(&one);
            debug_assert!(
                !is_tautology(&conditioned, hint).unwrap_or(true),
                "a non-tautology must stay falsifiable on one branch"
            );
            current = conditioned;
            chosen = chosen.with(Literal::positive(v)).expect("v is unassigned");
        }
    }
    debug_assert!(current.is_empty());
    Ok(Some(chosen.fill_false(f.num_vars())))
}
