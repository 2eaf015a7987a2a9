//! Variables, literals, assignments, terms, clauses, and the DNF/CNF
//! containers shared by every engine.

use std::fmt;
use std::str::FromStr;

/// 1-based propositional variable index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(u32);

impl VarId {
    pub fn new(index: u32) -> Self {
        assert!(index >= 1, "variable indices are 1-based");
        VarId(index)
    }

    pub fn get(self) -> u32 {
        self.0
    }

    pub(crate) fn zero_based(self) -> usize {
        (self.0 - 1) as usize
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "x{}", self.0)
    }
}

/// A variable or its negation.
///
/// Field order matters: the derived `Ord` sorts by variable first and puts
/// the negative literal before the positive one, which is the canonical
/// order every container in this crate uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Literal {
    pub var: VarId,
    pub positive: bool,
}

impl Literal {
    pub fn positive(var: VarId) -> Self {
        Literal {
            var,
            positive: true,
        }
    }

    pub fn negative(var: VarId) -> Self {
        Literal {
            var,
            positive: false,
        }
    }

    pub fn complement(self) -> Self {
        Literal {
            var: self.var,
            positive: !self.positive,
        }
    }

    /// DIMACS-style encoding: `3` is x3, `-3` is its negation, `0` is invalid.
    pub fn from_signed(value: i64) -> Option<Self> {
        if value == 0 {
            return None;
        }
        Some(Literal {
            var: VarId::new(value.unsigned_abs() as u32),
            positive: value > 0,
        })
    }

    pub fn to_signed(self) -> i64 {
        let v = i64::from(self.var.get());
        if self.positive {
            v
        } else {
            -v
        }
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_signed())
    }
}

/// A set of variables backed by a bitset; iteration is always ascending.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash, PartialOrd, Ord)]
pub struct VarSet {
    words: Vec<u64>,
}

impl VarSet {
    pub fn new() -> Self {
        VarSet { words: Vec::new() }
    }

    /// The full set {x1, .., xn}.
    pub fn full(n: u32) -> Self {
        (1..=n).map(VarId::new).collect()
    }

    pub fn insert(&mut self, v: VarId) {
        let idx = v.zero_based();
        let word = idx / 64;
        if word >= self.words.len() {
            self.words.resize(word + 1, 0);
        }
        self.words[word] |= 1 << (idx % 64);
    }

    pub fn remove(&mut self, v: VarId) {
        let idx = v.zero_based();
        let word = idx / 64;
        if word < self.words.len() {
            self.words[word] &= !(1 << (idx % 64));
        }
        while self.words.last() == Some(&0) {
            self.words.pop();
        }
    }

    pub fn contains(&self, v: VarId) -> bool {
        let idx = v.zero_based();
        let word = idx / 64;
        word < self.words.len() && self.words[word] & (1 << (idx % 64)) != 0
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> impl Iterator<Item = VarId> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            (0..64).filter_map(move |b| {
                if w & (1 << b) != 0 {
                    Some(VarId::new((wi * 64 + b) as u32 + 1))
                } else {
                    None
                }
            })
        })
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.iter().last()
    }
}

impl FromIterator<VarId> for VarSet {
    fn from_iter<T: IntoIterator<Item = VarId>>(iter: T) -> Self {
        let mut s = VarSet::new();
        for v in iter {
            s.insert(v);
        }
        s
    }
}

/// A total assignment to the variables 1..n.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Assignment {
    bits: Vec<bool>,
}

impl Assignment {
    pub fn all_false(n: u32) -> Self {
        Assignment {
            bits: vec![false; n as usize],
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.bits.len() as u32
    }

    pub fn get(&self, v: VarId) -> bool {
        self.bits[v.zero_based()]
    }

    pub fn set(&mut self, v: VarId, value: bool) {
        self.bits[v.zero_based()] = value;
    }

    /// The literal this assignment satisfies on `v`.
    pub fn literal(&self, v: VarId) -> Literal {
        Literal {
            var: v,
            positive: self.get(v),
        }
    }

    pub fn satisfies(&self, l: Literal) -> bool {
        self.get(l.var) == l.positive
    }

    /// Restriction to a variable set: the literals of this assignment over `a`.
    pub fn select(&self, a: &VarSet) -> PartialAssignment {
        PartialAssignment {
            lits: a.iter().map(|v| self.literal(v)).collect(),
        }
    }

    /// Bit i-1 of `mask` is the value of variable i. Needs n <= 64.
    pub fn from_mask(n: u32, mask: u64) -> Self {
        assert!(n <= 64);
        Assignment {
            bits: (0..n).map(|i| mask >> i & 1 != 0).collect(),
        }
    }

    pub fn to_mask(&self) -> u64 {
        assert!(self.bits.len() <= 64);
        self.bits
            .iter()
            .enumerate()
            .fold(0, |m, (i, &b)| if b { m | 1 << i } else { m })
    }
}

impl FromStr for Assignment {
    type Err = String;

    /// Tuple notation: `"0110"` assigns x1=0, x2=1, x3=1, x4=0.
    fn from_str(s: &str) -> Result<Self, String> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(format!("invalid assignment digit {other:?}")),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Assignment { bits })
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", u8::from(b))?;
        }
        Ok(())
    }
}

/// Normalizes a literal list: sorted by variable, duplicates merged.
/// Returns `None` when two literals on the same variable disagree.
fn normalize_consistent(mut lits: Vec<Literal>) -> Option<Vec<Literal>> {
    lits.sort_unstable();
    lits.dedup();
    for pair in lits.windows(2) {
        if pair[0].var == pair[1].var {
            return None;
        }
    }
    Some(lits)
}

/// A consistent set of literals: at most one per variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct PartialAssignment {
    lits: Vec<Literal>,
}

impl PartialAssignment {
    pub fn empty() -> Self {
        PartialAssignment::default()
    }

    pub fn from_literals(lits: impl IntoIterator<Item = Literal>) -> Option<Self> {
        Some(PartialAssignment {
            lits: normalize_consistent(lits.into_iter().collect())?,
        })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn value_of(&self, v: VarId) -> Option<bool> {
        self.lits
            .binary_search_by_key(&v, |l| l.var)
            .ok()
            .map(|i| self.lits[i].positive)
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.value_of(l.var) == Some(l.positive)
    }

    pub fn contains_complement_of(&self, l: Literal) -> bool {
        self.value_of(l.var) == Some(!l.positive)
    }

    pub fn vars(&self) -> VarSet {
        self.lits.iter().map(|l| l.var).collect()
    }

    /// Extension by one literal; `None` when it contradicts the current value.
    pub fn with(&self, l: Literal) -> Option<Self> {
        match self.value_of(l.var) {
            Some(v) if v == l.positive => Some(self.clone()),
            Some(_) => None,
            None => {
                let mut lits = self.lits.clone();
                let pos = lits.partition_point(|x| x.var < l.var);
                lits.insert(pos, l);
                Some(PartialAssignment { lits })
            }
        }
    }

    pub fn without_var(&self, v: VarId) -> Self {
        PartialAssignment {
            lits: self.lits.iter().copied().filter(|l| l.var != v).collect(),
        }
    }

    /// Union of two partial assignments; `None` when they disagree
    /// somewhere.
    pub fn union(&self, other: &PartialAssignment) -> Option<Self> {
        PartialAssignment::from_literals(self.lits.iter().chain(other.lits.iter()).copied())
    }

    /// Restriction to the variables in `a` (the selection primitive on
    /// partial assignments).
    pub fn restrict(&self, a: &VarSet) -> Self {
        PartialAssignment {
            lits: self
                .lits
                .iter()
                .copied()
                .filter(|l| a.contains(l.var))
                .collect(),
        }
    }

    /// Total assignment extending this one, unassigned variables set to 0.
    pub fn fill_false(&self, n: u32) -> Assignment {
        let mut m = Assignment::all_false(n);
        for l in &self.lits {
            m.set(l.var, l.positive);
        }
        m
    }
}

impl fmt::Display for PartialAssignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for l in &self.lits {
            if !first {
                write!(f, " ")?;
            }
            write!(f, "{l}")?;
            first = false;
        }
        Ok(())
    }
}

/// A conjunction of literals. The empty term is true. Construction rejects
/// complementary pairs, so a `Term` is always satisfiable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Term {
    lits: Vec<Literal>,
}

impl Term {
    pub fn empty() -> Self {
        Term::default()
    }

    /// `None` when the literals contain a complementary pair.
    pub fn try_new(lits: impl IntoIterator<Item = Literal>) -> Option<Self> {
        Some(Term {
            lits: normalize_consistent(lits.into_iter().collect())?,
        })
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn value_of(&self, v: VarId) -> Option<bool> {
        self.lits
            .binary_search_by_key(&v, |l| l.var)
            .ok()
            .map(|i| self.lits[i].positive)
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.value_of(l.var) == Some(l.positive)
    }

    pub fn restrict(&self, a: &VarSet) -> Term {
        Term {
            lits: self
                .lits
                .iter()
                .copied()
                .filter(|l| a.contains(l.var))
                .collect(),
        }
    }

    /// Conjunction of two terms; `None` when they disagree on a variable.
    pub fn union(&self, other: &Term) -> Option<Term> {
        Term::try_new(self.lits.iter().chain(other.lits.iter()).copied())
    }

    pub fn as_partial(&self) -> PartialAssignment {
        PartialAssignment {
            lits: self.lits.clone(),
        }
    }

    pub fn from_partial(p: &PartialAssignment) -> Term {
        Term {
            lits: p.lits.clone(),
        }
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        self.lits.iter().all(|&l| m.satisfies(l))
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.lits.last().map(|l| l.var)
    }

    pub fn positive_literals(&self) -> usize {
        self.lits.iter().filter(|l| l.positive).count()
    }

    pub fn negative_literals(&self) -> usize {
        self.lits.iter().filter(|l| !l.positive).count()
    }
}

/// A disjunction of literals. The empty clause is false. Unlike terms,
/// a clause may contain a complementary pair (it is then tautological).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Clause {
    lits: Vec<Literal>,
}

impl Clause {
    pub fn empty() -> Self {
        Clause::default()
    }

    pub fn new(lits: impl IntoIterator<Item = Literal>) -> Self {
        let mut lits: Vec<Literal> = lits.into_iter().collect();
        lits.sort_unstable();
        lits.dedup();
        Clause { lits }
    }

    pub fn literals(&self) -> &[Literal] {
        &self.lits
    }

    pub fn len(&self) -> usize {
        self.lits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lits.is_empty()
    }

    pub fn contains(&self, l: Literal) -> bool {
        self.lits.binary_search(&l).is_ok()
    }

    pub fn is_tautological(&self) -> bool {
        self.lits.windows(2).any(|pair| pair[0].var == pair[1].var)
    }

    /// De Morgan: the negation of a clause is a term. `None` when the clause
    /// is tautological (its negation would be inconsistent).
    pub fn negated_term(&self) -> Option<Term> {
        Term::try_new(self.lits.iter().map(|l| l.complement()))
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        self.lits.iter().any(|&l| m.satisfies(l))
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.lits.last().map(|l| l.var)
    }

    pub fn positive_literals(&self) -> usize {
        self.lits.iter().filter(|l| l.positive).count()
    }

    pub fn negative_literals(&self) -> usize {
        self.lits.iter().filter(|l| !l.positive).count()
    }
}

/// Disjunctive normal form over the variables 1..n. Every stored term is
/// consistent, so the formula is satisfiable exactly when it has a term.
/// Exact duplicate terms are merged at construction; term order is
/// otherwise preserved.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Dnf {
    n: u32,
    terms: Vec<Term>,
}

impl Dnf {
    pub fn new(n: u32, terms: Vec<Term>) -> Self {
        let mut seen = std::collections::HashSet::new();
        let mut kept = Vec::with_capacity(terms.len());
        for t in terms {
            assert!(
                t.max_var().map_or(0, VarId::get) <= n,
                "term mentions a variable beyond {n}"
            );
            if seen.insert(t.clone()) {
                kept.push(t);
            }
        }
        Dnf { n, terms: kept }
    }

    /// Builds from raw literal lists, silently dropping inconsistent terms
    /// (they denote false and contribute no models).
    pub fn from_raw(n: u32, terms: impl IntoIterator<Item = Vec<Literal>>) -> Self {
        Dnf::new(n, terms.into_iter().filter_map(Term::try_new).collect())
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    /// An empty DNF has no models.
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_empty_term(&self) -> bool {
        self.terms.iter().any(Term::is_empty)
    }

    pub fn mentions_var(&self, v: VarId) -> bool {
        self.terms.iter().any(|t| t.value_of(v).is_some())
    }

    /// Conditioning on a partial assignment: drops every term that
    /// contradicts `p` and deletes the literals `p` entails from the rest.
    /// The result mentions none of `p`'s variables.
    pub fn condition(&self, p: &PartialAssignment) -> Dnf {
        let mut out = Vec::with_capacity(self.terms.len());
        'terms: for t in &self.terms {
            let mut kept = Vec::with_capacity(t.lits.len());
            for &l in t.literals() {
                match p.value_of(l.var) {
                    Some(v) if v == l.positive => {} // entailed, delete
                    Some(_) => continue 'terms,      // contradicted, drop the term
                    None => kept.push(l),
                }
            }
            out.push(Term { lits: kept });
        }
        Dnf::new(self.n, out)
    }

    /// Projection onto `a`: cancels every literal not formed upon `a`.
    pub fn project(&self, a: &VarSet) -> Dnf {
        Dnf::new(self.n, self.terms.iter().map(|t| t.restrict(a)).collect())
    }

    /// Deduction: does every model of this DNF satisfy `other`?
    ///
    /// A consistent term entails a clause exactly when they share a literal,
    /// except that tautological clauses are entailed by everything.
    pub fn entails(&self, other: &Cnf) -> bool {
        other.clauses.iter().all(|c| {
            c.is_tautological()
                || self
                    .terms
                    .iter()
                    .all(|t| t.literals().iter().any(|&l| c.contains(l)))
        })
    }

    /// Conjunction with a consistent term; inconsistent unions are dropped.
    pub fn conjoin_term(&self, t: &Term) -> Dnf {
        Dnf::new(
            self.n,
            self.terms.iter().filter_map(|s| s.union(t)).collect(),
        )
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        self.terms.iter().any(|t| t.evaluate(m))
    }
}

/// Conjunctive normal form over the variables 1..n.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cnf {
    n: u32,
    clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(n: u32, clauses: Vec<Clause>) -> Self {
        for c in &clauses {
            assert!(
                c.max_var().map_or(0, VarId::get) <= n,
                "clause mentions a variable beyond {n}"
            );
        }
        Cnf { n, clauses }
    }

    pub fn from_clause(n: u32, clause: Clause) -> Self {
        Cnf::new(n, vec![clause])
    }

    /// A term viewed as the conjunction of its unit clauses.
    pub fn from_term(n: u32, term: &Term) -> Self {
        Cnf::new(
            n,
            term.literals().iter().map(|&l| Clause::new([l])).collect(),
        )
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    pub fn is_empty(&self) -> bool {
        self.clauses.is_empty()
    }

    pub fn has_empty_clause(&self) -> bool {
        self.clauses.iter().any(Clause::is_empty)
    }

    /// At most one positive literal per clause.
    pub fn is_horn(&self) -> bool {
        self.clauses.iter().all(|c| c.positive_literals() <= 1)
    }

    /// At most one negative literal per clause.
    pub fn is_reverse_horn(&self) -> bool {
        self.clauses.iter().all(|c| c.negative_literals() <= 1)
    }

    pub fn is_positive(&self) -> bool {
        self.clauses.iter().all(|c| c.negative_literals() == 0)
    }

    pub fn is_negative(&self) -> bool {
        self.clauses.iter().all(|c| c.positive_literals() == 0)
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        self.clauses.iter().all(|c| c.evaluate(m))
    }
}
