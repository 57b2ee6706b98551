//! Backtracking search with forward checking, shared by homomorphism
//! enumeration and polymorphism search.
//!
//! Variables are assigned in index order and values in ascending order,
//! so solutions are produced in lexicographic order of the assignment
//! vector. After each assignment the domains of constraint-adjacent
//! unassigned variables are pruned; an emptied domain triggers an
//! immediate backtrack.

/// Why an enumeration stopped.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StopReason {
    /// The whole search space was explored.
    Exhausted,
    /// The requested number of solutions was reached.
    LimitReached,
    /// The expansion budget ran out; `items` holds what was found so far.
    BudgetExhausted,
}

/// Results of a budgeted enumeration together with its stop reason.
#[derive(Clone, Debug)]
pub struct Enumeration<T> {
    pub items: Vec<T>,
    pub stop: StopReason,
    pub expansions: u64,
}

impl<T> Enumeration<T> {
    /// True when `items` is provably the complete solution set.
    pub fn is_complete(&self) -> bool {
        self.stop == StopReason::Exhausted
    }

    pub fn map<U>(self, f: impl FnMut(T) -> U) -> Enumeration<U> {
        Enumeration {
            items: self.items.into_iter().map(f).collect(),
            stop: self.stop,
            expansions: self.expansions,
        }
    }
}

/// Domain of one variable as a bitset over target values.
#[derive(Clone, PartialEq, Eq)]
pub(crate) struct Mask {
    words: Vec<u64>,
}

impl Mask {
    pub fn full(n: usize) -> Mask {
        let mut words = vec![u64::MAX; n.div_ceil(64)];
        if n % 64 != 0 {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        Mask { words }
    }

    pub fn empty(n: usize) -> Mask {
        Mask {
            words: vec![0; n.div_ceil(64)],
        }
    }

    pub fn singleton(n: usize, v: usize) -> Mask {
        let mut m = Mask::empty(n);
        m.insert(v);
        m
    }

    pub fn insert(&mut self, v: usize) {
        self.words[v / 64] |= 1 << (v % 64);
    }

    pub fn remove(&mut self, v: usize) {
        self.words[v / 64] &= !(1 << (v % 64));
    }

    pub fn contains(&self, v: usize) -> bool {
        self.words[v / 64] >> (v % 64) & 1 == 1
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn intersect_with(&mut self, other: &Mask) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    /// Smallest member `>= from`, if any.
    pub fn next_at_least(&self, from: usize) -> Option<usize> {
        let mut word = from / 64;
        if word >= self.words.len() {
            return None;
        }
        let mut bits = self.words[word] & (u64::MAX << (from % 64));
        loop {
            if bits != 0 {
                return Some(word * 64 + bits.trailing_zeros() as usize);
            }
            word += 1;
            if word == self.words.len() {
                return None;
            }
            bits = self.words[word];
        }
    }
}

/// A finite constraint problem over `var_count` variables with values in
/// `0..target_n`. Every constraint `(a, b)` requires the value pair
/// `(val[a], val[b])` to be an edge of the target digraph, described by
/// per-vertex successor and predecessor masks.
pub(crate) struct Problem {
    pub var_count: usize,
    pub target_n: usize,
    /// `succ[v]` = values w with an edge v → w in the target.
    pub succ: Vec<Mask>,
    /// `pred[v]` = values w with an edge w → v in the target.
    pub pred: Vec<Mask>,
    /// Constraints as ordered variable pairs, self-pairs allowed.
    pub constraints: Vec<(usize, usize)>,
    /// Pre-assigned variables.
    pub fixed: Vec<Option<usize>>,
    /// Require pairwise distinct values (used for embeddings).
    pub injective: bool,
}

impl Problem {
    pub fn solve(&self, limit: usize, budget: u64) -> Enumeration<Vec<usize>> {
        let v_count = self.var_count;
        let n = self.target_n;

        // loop mask handles self-constraints up front
        let mut loop_mask = Mask::empty(n);
        for v in 0..n {
            if self.succ[v].contains(v) {
                loop_mask.insert(v);
            }
        }

        let mut domains: Vec<Mask> = (0..v_count)
            .map(|x| match self.fixed[x] {
                Some(v) => Mask::singleton(n, v),
                None => Mask::full(n),
            })
            .collect();

        let mut out_adj: Vec<Vec<usize>> = vec![Vec::new(); v_count];
        let mut in_adj: Vec<Vec<usize>> = vec![Vec::new(); v_count];
        for &(a, b) in &self.constraints {
            if a == b {
                domains[a].intersect_with(&loop_mask);
            } else {
                out_adj[a].push(b);
                in_adj[b].push(a);
            }
        }

        let mut items = Vec::new();
        let mut expansions = 0u64;

        if v_count == 0 {
            items.push(Vec::new());
            let stop = if limit == 0 {
                StopReason::LimitReached
            } else {
                StopReason::Exhausted
            };
            return Enumeration { items, stop, expansions };
        }
        if limit == 0 {
            return Enumeration {
                items,
                stop: StopReason::LimitReached,
                expansions,
            };
        }

        let mut assignment = vec![0usize; v_count];
        // next value to try at each depth; trail of domain prunings per depth
        let mut next_val = vec![0usize; v_count];
        let mut trail: Vec<Vec<(usize, Mask)>> = vec![Vec::new(); v_count];
        let mut depth = 0usize;
        let stop;

        // restore must be LIFO: the same variable may be pruned more than
        // once within a single propagation
        macro_rules! undo {
            ($d:expr) => {
                while let Some((var, saved)) = trail[$d].pop() {
                    domains[var] = saved;
                }
            };
        }

        loop {
            let candidate = domains[depth].next_at_least(next_val[depth]);
            let v = match candidate {
                None => {
                    next_val[depth] = 0;
                    if depth == 0 {
                        stop = StopReason::Exhausted;
                        break;
                    }
                    depth -= 1;
                    undo!(depth);
                    continue;
                }
                Some(v) => v,
            };
            next_val[depth] = v + 1;
            expansions += 1;
            if expansions > budget {
                stop = StopReason::BudgetExhausted;
                break;
            }

            // forward-check the assignment depth <- v
            let mut ok = true;
            for &d in &out_adj[depth] {
                if d > depth {
                    let saved = domains[d].clone();
                    domains[d].intersect_with(&self.succ[v]);
                    if domains[d] != saved {
                        trail[depth].push((d, saved));
                    }
                    if domains[d].is_empty() {
                        ok = false;
                        break;
                    }
                }
            }
            if ok {
                for &d in &in_adj[depth] {
                    if d > depth {
                        let saved = domains[d].clone();
                        domains[d].intersect_with(&self.pred[v]);
                        if domains[d] != saved {
                            trail[depth].push((d, saved));
                        }
                        if domains[d].is_empty() {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if ok && self.injective {
                for d in depth + 1..v_count {
                    if domains[d].contains(v) {
                        let saved = domains[d].clone();
                        domains[d].remove(v);
                        trail[depth].push((d, saved));
                        if domains[d].is_empty() {
                            ok = false;
                            break;
                        }
                    }
                }
            }
            if !ok {
                undo!(depth);
                continue;
            }

            assignment[depth] = v;
            if depth + 1 == v_count {
                items.push(assignment.clone());
                if items.len() >= limit {
                    stop = StopReason::LimitReached;
                    break;
                }
                undo!(depth);
                continue;
            }
            depth += 1;
            next_val[depth] = 0;
        }

        Enumeration {
            items,
            stop,
            expansions,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn masks(n: usize, edges: &[(usize, usize)]) -> (Vec<Mask>, Vec<Mask>) {
        let mut succ = vec![Mask::empty(n); n];
        let mut pred = vec![Mask::empty(n); n];
        for &(u, v) in edges {
            succ[u].insert(v);
            pred[v].insert(u);
        }
        (succ, pred)
    }

    #[test]
    fn mask_iteration() {
        let mut m = Mask::empty(70);
        m.insert(0);
        m.insert(65);
        assert_eq!(m.next_at_least(0), Some(0));
        assert_eq!(m.next_at_least(1), Some(65));
        assert_eq!(m.next_at_least(66), None);
        m.remove(0);
        assert_eq!(m.next_at_least(0), Some(65));
    }

    #[test]
    fn enumerates_in_lexicographic_order() {
        // maps from a single edge 0 -> 1 into a directed 2-cycle with loops
        let (succ, pred) = masks(2, &[(0, 0), (1, 1), (0, 1), (1, 0)]);
        let p = Problem {
            var_count: 2,
            target_n: 2,
            succ,
            pred,
            constraints: vec![(0, 1)],
            fixed: vec![None, None],
            injective: false,
        };
        let e = p.solve(usize::MAX, 1_000);
        assert!(e.is_complete());
        assert_eq!(e.items, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
    }

    #[test]
    fn self_constraints_restrict_to_loops() {
        let (succ, pred) = masks(2, &[(0, 0), (0, 1)]);
        let p = Problem {
            var_count: 1,
            target_n: 2,
            succ,
            pred,
            constraints: vec![(0, 0)],
            fixed: vec![None],
            injective: false,
        };
        let e = p.solve(usize::MAX, 1_000);
        assert_eq!(e.items, vec![vec![0]]);
    }

    #[test]
    fn budget_stops_early_with_partial_results() {
        let (succ, pred) = masks(2, &[(0, 0), (1, 1), (0, 1), (1, 0)]);
        let p = Problem {
            var_count: 3,
            target_n: 2,
            succ,
            pred,
            constraints: vec![],
            fixed: vec![None; 3],
            injective: false,
        };
        let e = p.solve(usize::MAX, 4);
        assert_eq!(e.stop, StopReason::BudgetExhausted);
        assert!(e.items.len() < 8);
    }

    #[test]
    fn limit_reports_truncation() {
        let (succ, pred) = masks(2, &[(0, 0), (1, 1), (0, 1), (1, 0)]);
        let p = Problem {
            var_count: 3,
            target_n: 2,
            succ,
            pred,
            constraints: vec![],
            fixed: vec![None; 3],
            injective: false,
        };
        let e = p.solve(3, 1_000);
        assert_eq!(e.stop, StopReason::LimitReached);
        assert_eq!(e.items.len(), 3);
        assert_eq!(e.items[0], vec![0, 0, 0]);
    }
}
