//! XOR-constraint systems over the two-element field: triangulation,
//! solving, projection, and the negation/complement conversions between
//! conjunctive systems and equation disjunctions.
//!
//! Rows are packed into machine words during elimination so that adding
//! two equations costs O(n/64) XORs.

use crate::formula::{Assignment, Clause, Literal, VarId, VarSet};

/// A single XOR constraint: the parity of `vars` equals `rhs`.
///
/// Construction cancels repeated variables in pairs (x + x = 0 over GF(2)).
/// The empty equation is a tautology when `rhs` is 0 and a contradiction
/// when it is 1.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LinearEquation {
    vars: Vec<VarId>,
    rhs: bool,
}

impl LinearEquation {
    pub fn new(vars: impl IntoIterator<Item = VarId>, rhs: bool) -> Self {
        let mut vars: Vec<VarId> = vars.into_iter().collect();
        vars.sort_unstable();
        let mut kept = Vec::with_capacity(vars.len());
        let mut i = 0;
        while i < vars.len() {
            let mut run = 1;
            while i + run < vars.len() && vars[i + run] == vars[i] {
                run += 1;
            }
            if run % 2 == 1 {
                kept.push(vars[i]);
            }
            i += run;
        }
        LinearEquation { vars: kept, rhs }
    }

    /// The variable-free equation 0 = rhs.
    pub fn constant(rhs: bool) -> Self {
        LinearEquation {
            vars: Vec::new(),
            rhs,
        }
    }

    /// The unit equation a literal denotes: x = 1 or x = 0.
    pub fn unit(l: Literal) -> Self {
        LinearEquation {
            vars: vec![l.var],
            rhs: l.positive,
        }
    }

    pub fn vars(&self) -> &[VarId] {
        &self.vars
    }

    pub fn rhs(&self) -> bool {
        self.rhs
    }

    pub fn is_tautology(&self) -> bool {
        self.vars.is_empty() && !self.rhs
    }

    pub fn is_contradiction(&self) -> bool {
        self.vars.is_empty() && self.rhs
    }

    /// The same left-hand side with the right-hand side flipped; over GF(2)
    /// this is exactly the negation of the equation.
    pub fn flipped(&self) -> Self {
        LinearEquation {
            vars: self.vars.clone(),
            rhs: !self.rhs,
        }
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        let parity = self.vars.iter().filter(|&&v| m.get(v)).count() % 2 == 1;
        parity == self.rhs
    }

    pub fn max_var(&self) -> Option<VarId> {
        self.vars.last().copied()
    }
}

/// Bit-packed row used during elimination: one bit per column position
/// plus the right-hand side.
#[derive(Clone)]
struct BitRow {
    words: Vec<u64>,
    rhs: bool,
}

impl BitRow {
    fn zero(words: usize) -> Self {
        BitRow {
            words: vec![0; words],
            rhs: false,
        }
    }

    fn set(&mut self, pos: usize) {
        self.words[pos / 64] ^= 1 << (pos % 64);
    }

    fn test(&self, pos: usize) -> bool {
        self.words[pos / 64] & (1 << (pos % 64)) != 0
    }

    fn xor_assign(&mut self, other: &BitRow) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
        self.rhs ^= other.rhs;
    }

    fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }
}

/// A conjunction of linear equations over 1..n. The empty system is true.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AffineSystem {
    n: u32,
    rows: Vec<LinearEquation>,
}

impl AffineSystem {
    pub fn new(n: u32, rows: Vec<LinearEquation>) -> Self {
        for r in &rows {
            assert!(
                r.max_var().map_or(0, VarId::get) <= n,
                "equation mentions a variable beyond {n}"
            );
        }
        AffineSystem { n, rows }
    }

    /// The empty (always true) system.
    pub fn top(n: u32) -> Self {
        AffineSystem {
            n,
            rows: Vec::new(),
        }
    }

    /// The single-row system 0 = 1, used as the in-band representation of
    /// an unsatisfiable projection result.
    pub fn contradiction(n: u32) -> Self {
        AffineSystem {
            n,
            rows: vec![LinearEquation::constant(true)],
        }
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn rows(&self) -> &[LinearEquation] {
        &self.rows
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// This system plus extra rows.
    pub fn with_rows(&self, extra: impl IntoIterator<Item = LinearEquation>) -> AffineSystem {
        let mut rows = self.rows.clone();
        rows.extend(extra);
        AffineSystem::new(self.n, rows)
    }

    /// Conjoins the unit equations a set of literals denotes.
    pub fn with_units<'a>(&self, lits: impl IntoIterator<Item = &'a Literal>) -> AffineSystem {
        self.with_rows(lits.into_iter().map(|&l| LinearEquation::unit(l)))
    }

    /// Gaussian elimination with pivot columns chosen leftmost-first under
    /// `order` (a permutation of 1..n). Returns the row-equivalent echelon
    /// system, or `None` when elimination derives 0 = 1. The result has at
    /// most min(k, n) rows.
    pub fn triangulate(&self, order: &[VarId]) -> Option<AffineSystem> {
        let n = self.n as usize;
        debug_assert_eq!(order.len(), n, "order must be a permutation of 1..n");
        let mut position = vec![usize::MAX; n];
        for (pos, v) in order.iter().enumerate() {
            position[v.zero_based()] = pos;
        }
        debug_assert!(position.iter().all(|&p| p != usize::MAX));

        let words = n.div_ceil(64).max(1);
        let mut rows: Vec<BitRow> = self
            .rows
            .iter()
            .map(|eq| {
                let mut row = BitRow::zero(words);
                for v in eq.vars() {
                    row.set(position[v.zero_based()]);
                }
                row.rhs = eq.rhs();
                row
            })
            .collect();

        let mut rank = 0;
        for col in 0..n {
            let Some(pivot) = (rank..rows.len()).find(|&i| rows[i].test(col)) else {
                continue;
            };
            rows.swap(rank, pivot);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot_row = &head[rank];
            for r in tail.iter_mut() {
                if r.test(col) {
                    r.xor_assign(pivot_row);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }

        // Rows below the rank have empty left-hand sides.
        if rows[rank..].iter().any(|r| r.rhs) {
            return None;
        }
        debug_assert!(rows[rank..].iter().all(BitRow::is_zero));

        let out = rows[..rank]
            .iter()
            .map(|r| {
                let vars = (0..n).filter(|&pos| r.test(pos)).map(|pos| order[pos]);
                LinearEquation::new(vars, r.rhs)
            })
            .collect();
        Some(AffineSystem {
            n: self.n,
            rows: out,
        })
    }

    /// A satisfying assignment via triangulation and back-substitution, or
    /// `None` when the system is inconsistent. Free variables are set to 0
    /// so the output is deterministic.
    pub fn solve(&self) -> Option<Assignment> {
        let order: Vec<VarId> = (1..=self.n).map(VarId::new).collect();
        let echelon = self.triangulate(&order)?;
        let mut m = Assignment::all_false(self.n);
        // Pivots strictly increase down the echelon; solving bottom-up only
        // ever reads already-determined or free variables.
        for eq in echelon.rows().iter().rev() {
            let pivot = eq.vars()[0];
            let parity = eq.vars()[1..].iter().filter(|&&v| m.get(v)).count() % 2 == 1;
            m.set(pivot, parity != eq.rhs());
        }
        debug_assert!(self.evaluate(&m));
        Some(m)
    }

    pub fn is_satisfiable(&self) -> bool {
        let order: Vec<VarId> = (1..=self.n).map(VarId::new).collect();
        self.triangulate(&order).is_some()
    }

    /// Projection onto `a`: triangulate with the variables of `a` put
    /// rightmost, then keep the rows formed upon `a` only. An inconsistent
    /// input projects to the single row 0 = 1 (the projection of the empty
    /// model set is empty).
    pub fn project(&self, a: &VarSet) -> AffineSystem {
        let mut order: Vec<VarId> = (1..=self.n)
            .map(VarId::new)
            .filter(|v| !a.contains(*v))
            .collect();
        order.extend((1..=self.n).map(VarId::new).filter(|v| a.contains(*v)));
        match self.triangulate(&order) {
            None => AffineSystem::contradiction(self.n),
            Some(echelon) => AffineSystem {
                n: self.n,
                rows: echelon
                    .rows
                    .into_iter()
                    .filter(|eq| eq.vars().iter().all(|v| a.contains(*v)))
                    .collect(),
            },
        }
    }

    /// The negation of a conjunction of equations is the disjunction of
    /// their flips. The empty system (true) maps to the empty disjunction
    /// (false).
    pub fn complement(&self) -> EquationDisjunction {
        EquationDisjunction {
            n: self.n,
            eqs: self.rows.iter().map(LinearEquation::flipped).collect(),
        }
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        self.rows.iter().all(|eq| eq.evaluate(m))
    }
}

/// A disjunction of linear equations. The empty disjunction is false.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EquationDisjunction {
    n: u32,
    eqs: Vec<LinearEquation>,
}

impl EquationDisjunction {
    pub fn new(n: u32, eqs: Vec<LinearEquation>) -> Self {
        for e in &eqs {
            assert!(
                e.max_var().map_or(0, VarId::get) <= n,
                "equation mentions a variable beyond {n}"
            );
        }
        EquationDisjunction { n, eqs }
    }

    /// Literal-wise embedding of a clause: x becomes x = 1, and its
    /// negation becomes x = 0. The model sets coincide.
    pub fn from_clause(n: u32, c: &Clause) -> Self {
        EquationDisjunction::new(
            n,
            c.literals()
                .iter()
                .map(|&l| LinearEquation::unit(l))
                .collect(),
        )
    }

    pub fn num_vars(&self) -> u32 {
        self.n
    }

    pub fn equations(&self) -> &[LinearEquation] {
        &self.eqs
    }

    pub fn is_empty(&self) -> bool {
        self.eqs.is_empty()
    }

    /// Satisfiable exactly when some member is not the row 0 = 1.
    pub fn is_satisfiable(&self) -> bool {
        self.eqs.iter().any(|e| !e.is_contradiction())
    }

    /// De Morgan over XOR constants: the negation of a disjunction of
    /// equations is the conjunction of their flips.
    pub fn negate(&self) -> AffineSystem {
        AffineSystem {
            n: self.n,
            rows: self.eqs.iter().map(LinearEquation::flipped).collect(),
        }
    }

    pub fn evaluate(&self, m: &Assignment) -> bool {
        self.eqs.iter().any(|eq| eq.evaluate(m))
    }
}
