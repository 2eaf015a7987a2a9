//! 2-SAT over an implication graph, decided by Tarjan's strongly
//! connected components.

/// Binary-clause satisfiability instance over propositions 0..n.
///
/// Each proposition gets two graph nodes (asserted / negated); a clause
/// contributes the two standard implication edges.
pub(crate) struct TwoSat {
    num_props: usize,
    adj: Vec<Vec<u32>>,
    contradictory: bool,
}

/// A proposition together with the value the literal asserts.
pub(crate) type Prop = (usize, bool);

fn node((p, value): Prop) -> u32 {
    (2 * p + usize::from(!value)) as u32
}

impl TwoSat {
    pub fn new(num_props: usize) -> Self {
        TwoSat {
            num_props,
            adj: vec![Vec::new(); 2 * num_props],
            contradictory: false,
        }
    }

    /// Adds the disjunction a | b.
    pub fn add_clause(&mut self, a: Prop, b: Prop) {
        let (na, nb) = (node(a), node(b));
        let (ca, cb) = (node((a.0, !a.1)), node((b.0, !b.1)));
        self.adj[ca as usize].push(nb);
        self.adj[cb as usize].push(na);
    }

    /// Adds the unit clause a.
    pub fn add_unit(&mut self, a: Prop) {
        let ca = node((a.0, !a.1));
        self.adj[ca as usize].push(node(a));
    }

    /// Marks the instance unsatisfiable (an empty clause was seen).
    pub fn add_empty_clause(&mut self) {
        self.contradictory = true;
    }

    /// A model, or `None` when some proposition is equivalent to its own
    /// negation. Deterministic: component ids come from a fixed traversal.
    pub fn solve(&self) -> Option<Vec<bool>> {
        if self.contradictory {
            return None;
        }
        let comp = tarjan_components(&self.adj);
        let mut model = Vec::with_capacity(self.num_props);
        for p in 0..self.num_props {
            let yes = comp[node((p, true)) as usize];
            let no = comp[node((p, false)) as usize];
            if yes == no {
                return None;
            }
            // Tarjan numbers components sinks-first; the literal whose
            // component is closer to the sinks can safely be made true.
            model.push(yes < no);
        }
        Some(model)
    }
}

/// Iterative Tarjan. Returns a component id per node; ids are assigned in
/// completion order, so a component only reaches components with smaller ids.
fn tarjan_components(adj: &[Vec<u32>]) -> Vec<u32> {
    const UNSET: u32 = u32::MAX;
    let n = adj.len();
    let mut index = vec![UNSET; n];
    let mut low = vec![0u32; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSET; n];
    let mut stack: Vec<u32> = Vec::new();
    let mut next_index = 0u32;
    let mut next_comp = 0u32;
    // (node, next outgoing edge to examine)
    let mut frames: Vec<(u32, usize)> = Vec::new();

    for start in 0..n as u32 {
        if index[start as usize] != UNSET {
            continue;
        }
        frames.push((start, 0));
        index[start as usize] = next_index;
        low[start as usize] = next_index;
        next_index += 1;
        stack.push(start);
        on_stack[start as usize] = true;

        while let Some(&mut (v, ref mut edge)) = frames.last_mut() {
            if let Some(&w) = adj[v as usize].get(*edge) {
                *edge += 1;
                if index[w as usize] == UNSET {
                    index[w as usize] = next_index;
                    low[w as usize] = next_index;
                    next_index += 1;
                    stack.push(w);
                    on_stack[w as usize] = true;
                    frames.push((w, 0));
                } else if on_stack[w as usize] {
                    low[v as usize] = low[v as usize].min(index[w as usize]);
                }
            } else {
                frames.pop();
                if low[v as usize] == index[v as usize] {
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        comp[w as usize] = next_comp;
                        if w == v {
                            break;
                        }
                    }
                    next_comp += 1;
                }
                if let Some(&mut (parent, _)) = frames.last_mut() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
            }
        }
    }
    comp
}
