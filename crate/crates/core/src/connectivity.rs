//! The four connectivity equivalences (weak, strong, extreme, radical),
//! template-digraph equivalences, explicit path search, the brute-force
//! minimal-antisymmetric-quotient oracle, and the return-path bound.

use std::fmt;

use crate::digraph::{enumerate_homomorphisms, quotient, Digraph};
use crate::error::{Error, Result};
use crate::partition::{Partition, UnionFind};
use crate::Budget;

/// The three path-defined equivalences. The radical equivalence is
/// computed separately by [`radical`] because it carries a stage trace.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquivalenceKind {
    /// Connectivity by oriented paths (edges in either direction).
    Weak,
    /// Mutual directed reachability.
    Strong,
    /// Connectivity by symmetric paths (double edges).
    Extreme,
}

/// Computes the weak, strong, or extreme equivalence of `g` as a
/// canonical partition. Reflexivity is not required: length-zero paths
/// make every vertex related to itself.
pub fn equivalence(g: &Digraph, kind: EquivalenceKind) -> Partition {
    match kind {
        EquivalenceKind::Weak => {
            Partition::from_pairs(g.n(), g.edges())
        }
        EquivalenceKind::Extreme => Partition::from_pairs(
            g.n(),
            g.edges().filter(|&(u, v)| g.has_edge(v, u)),
        ),
        EquivalenceKind::Strong => strong_components(g),
    }
}

/// Strongly connected components via Kosaraju's two-pass DFS.
fn strong_components(g: &Digraph) -> Partition {
    let n = g.n();
    let out = g.out_adj();
    let inn = g.in_adj();

    // first pass: post-order over the forward graph
    let mut finish = Vec::with_capacity(n);
    let mut seen = vec![false; n];
    let mut stack: Vec<(usize, usize)> = Vec::new();
    for root in 0..n {
        if seen[root] {
            continue;
        }
        seen[root] = true;
        stack.push((root, 0));
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            if *i < out[v].len() {
                let w = out[v][*i];
                *i += 1;
                if !seen[w] {
                    seen[w] = true;
                    stack.push((w, 0));
                }
            } else {
                finish.push(v);
                stack.pop();
            }
        }
    }

    // second pass: reverse graph in reverse finish order
    let mut comp = vec![usize::MAX; n];
    let mut next = 0;
    let mut dfs = Vec::new();
    for &root in finish.iter().rev() {
        if comp[root] != usize::MAX {
            continue;
        }
        comp[root] = next;
        dfs.push(root);
        while let Some(v) = dfs.pop() {
            for &w in &inn[v] {
                if comp[w] == usize::MAX {
                    comp[w] = next;
                    dfs.push(w);
                }
            }
        }
        next += 1;
    }
    Partition::from_assignment(&comp)
}

/// The radical fixpoint: stage 0 is the extreme equivalence, each later
/// stage lifts the extreme equivalence of the current quotient back to
/// the vertices, until nothing changes.
#[derive(Clone, Debug)]
pub struct RadicalTrace {
    /// `ν₀ ⊆ ν₁ ⊆ …`, strictly increasing until the final repeat. A
    /// single entry means stage 0 was already stable.
    pub stages: Vec<Partition>,
    pub result: Partition,
}

pub fn radical(g: &Digraph) -> RadicalTrace {
    let mut stages = vec![equivalence(g, EquivalenceKind::Extreme)];
    loop {
        let current = stages.last().unwrap();
        let q = quotient(g, current).expect("partition built over g");
        let next = current.lift(&equivalence(&q, EquivalenceKind::Extreme));
        if next == *current {
            if stages.len() > 1 {
                stages.push(next);
            }
            break;
        }
        stages.push(next);
    }
    let result = stages.last().unwrap().clone();
    RadicalTrace { stages, result }
}

/// Brute-force oracle for the least equivalence with antisymmetric
/// quotient: enumerates every partition of the vertex set and keeps the
/// refinement-minimum among those whose quotient is antisymmetric.
///
/// Only defined for reflexive digraphs (where that minimum is guaranteed
/// to exist and equal the radical equivalence); a missing minimum is
/// reported as [`Error::Falsified`].
pub fn smallest_antisymmetric_oracle(g: &Digraph, budget: &Budget) -> Result<Partition> {
    if !g.is_reflexive() {
        return Err(Error::Precondition(
            "the minimal-antisymmetric-quotient oracle requires a reflexive digraph".into(),
        ));
    }
    if g.n() > budget.oracle_cap {
        return Err(Error::Precondition(format!(
            "oracle cap is {} vertices, digraph has {}",
            budget.oracle_cap,
            g.n()
        )));
    }
    let mut kept: Vec<Partition> = Vec::new();
    for p in all_partitions(g.n()) {
        let q = quotient(g, &p)?;
        if q.is_antisymmetric() {
            kept.push(p);
        }
    }
    // single-block partition always qualifies, so `kept` is nonempty
    let minimum = kept
        .iter()
        .position(|p| kept.iter().all(|q| p.refines(q)))
        .ok_or_else(|| {
            Error::Falsified(format!(
                "digraph {} admits no least partition with antisymmetric quotient",
                g.name()
            ))
        })?;
    Ok(kept.swap_remove(minimum))
}

/// All partitions of `{0..n}` via restricted growth strings.
pub(crate) fn all_partitions(n: usize) -> Vec<Partition> {
    let mut out = Vec::new();
    if n == 0 {
        out.push(Partition::discrete(0));
        return out;
    }
    let mut rgs = vec![0usize; n];
    fn rec(rgs: &mut Vec<usize>, pos: usize, max: usize, out: &mut Vec<Partition>) {
        if pos == rgs.len() {
            out.push(Partition::from_assignment(rgs));
            return;
        }
        for b in 0..=max + 1 {
            rgs[pos] = b;
            rec(rgs, pos + 1, max.max(b), out);
        }
    }
    rec(&mut rgs, 1, 0, &mut out);
    out
}

/// The transitive closure of "these two vertices lie in the range of a
/// common homomorphism `h → g`", computed by union-find over the full
/// homomorphism enumeration.
pub fn h_equivalence(g: &Digraph, h: &Digraph, budget: &Budget) -> Result<Partition> {
    if h.n() == 0 {
        return Err(Error::Precondition("template digraph must be nonempty".into()));
    }
    let homs = enumerate_homomorphisms(h, g, &[], usize::MAX, budget.expansions)?;
    if !homs.is_complete() {
        return Err(Error::Budget {
            spent: homs.expansions,
            found: homs.items.len(),
        });
    }
    let mut uf = UnionFind::new(g.n());
    for map in &homs.items {
        let first = map.apply(0);
        for v in 1..h.n() {
            uf.union(first, map.apply(v));
        }
    }
    Ok(uf.into_partition())
}

/// Step relation used by [`find_path`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PathMode {
    /// One edge in either direction per step.
    Oriented,
    /// Forward edges only.
    Directed,
    /// A double edge per step.
    Symmetric,
}

impl PathMode {
    fn step_adj(self, g: &Digraph) -> Vec<Vec<usize>> {
        let mut adj = vec![std::collections::BTreeSet::new(); g.n()];
        for (u, v) in g.edges() {
            match self {
                PathMode::Directed => {
                    adj[u].insert(v);
                }
                PathMode::Oriented => {
                    adj[u].insert(v);
                    adj[v].insert(u);
                }
                PathMode::Symmetric => {
                    if g.has_edge(v, u) {
                        adj[u].insert(v);
                        adj[v].insert(u);
                    }
                }
            }
        }
        adj.into_iter().map(|s| s.into_iter().collect()).collect()
    }
}

/// Shortest path from `a` to `b` under the given step relation; among
/// equal-length paths the lexicographically smallest vertex sequence is
/// returned. `Some(vec![a])` when `a == b`.
pub fn find_path(g: &Digraph, a: usize, b: usize, mode: PathMode) -> Result<Option<Vec<usize>>> {
    for v in [a, b] {
        if v >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
        }
    }
    let forward = mode.step_adj(g);
    // distances to b over the reversed step relation
    let mut reverse = vec![Vec::new(); g.n()];
    for (u, vs) in forward.iter().enumerate() {
        for &v in vs {
            reverse[v].push(u);
        }
    }
    let mut dist = vec![usize::MAX; g.n()];
    dist[b] = 0;
    let mut queue = std::collections::VecDeque::from([b]);
    while let Some(v) = queue.pop_front() {
        for &u in &reverse[v] {
            if dist[u] == usize::MAX {
                dist[u] = dist[v] + 1;
                queue.push_back(u);
            }
        }
    }
    if dist[a] == usize::MAX {
        return Ok(None);
    }
    // greedy descent keeps the path lexicographically least
    let mut path = vec![a];
    let mut cur = a;
    while cur != b {
        let next = forward[cur]
            .iter()
            .copied()
            .find(|&u| dist[u] + 1 == dist[cur])
            .expect("BFS distance admits a descending step");
        path.push(next);
        cur = next;
    }
    Ok(Some(path))
}

/// The least `n` such that every edge `a → b` admits a directed return
/// path from `b` to `a` of length at most `n − 1`; `None` when some edge
/// has no return path. Requires a reflexive digraph.
pub fn hm_bound(g: &Digraph) -> Result<Option<usize>> {
    if !g.is_reflexive() {
        return Err(Error::Precondition("return-path bound requires a reflexive digraph".into()));
    }
    let adj = g.out_adj();
    let mut worst = 0usize;
    for source in 0..g.n() {
        // BFS once per source; look up distances for edges (a, source)
        let mut dist = vec![usize::MAX; g.n()];
        dist[source] = 0;
        let mut queue = std::collections::VecDeque::from([source]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        for (a, b) in g.edges() {
            if b == source {
                if dist[a] == usize::MAX {
                    return Ok(None);
                }
                worst = worst.max(dist[a]);
            }
        }
    }
    Ok(Some(worst + 1))
}

/// The four equivalences of a digraph together with the status of each
/// inclusion in the chain extreme ⊆ radical ⊆ strong ⊆ weak.
#[derive(Clone, Debug)]
pub struct ChainReport {
    pub weak: Partition,
    pub strong: Partition,
    pub radical: Partition,
    pub extreme: Partition,
    pub extreme_in_radical: bool,
    pub radical_in_strong: bool,
    pub strong_in_weak: bool,
}

impl ChainReport {
    pub fn all_hold(&self) -> bool {
        self.extreme_in_radical && self.radical_in_strong && self.strong_in_weak
    }
}

impl fmt::Display for ChainReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "extreme  {}", self.extreme)?;
        writeln!(f, "radical  {}", self.radical)?;
        writeln!(f, "strong   {}", self.strong)?;
        writeln!(f, "weak     {}", self.weak)?;
        writeln!(
            f,
            "extreme ⊆ radical: {}",
            if self.extreme_in_radical { "holds" } else { "VIOLATED" }
        )?;
        writeln!(
            f,
            "radical ⊆ strong:  {}",
            if self.radical_in_strong { "holds" } else { "VIOLATED" }
        )?;
        write!(
            f,
            "strong ⊆ weak:     {}",
            if self.strong_in_weak { "holds" } else { "VIOLATED" }
        )
    }
}

/// Computes all four equivalences and checks the inclusion chain.
/// Violations are reported, not thrown; one would falsify the
/// implementation, not the input.
pub fn verify_chain(g: &Digraph) -> ChainReport {
    let weak = equivalence(g, EquivalenceKind::Weak);
    let strong = equivalence(g, EquivalenceKind::Strong);
    let extreme = equivalence(g, EquivalenceKind::Extreme);
    let radical = radical(g).result;
    ChainReport {
        extreme_in_radical: extreme.refines(&radical),
        radical_in_strong: radical.refines(&strong),
        strong_in_weak: strong.refines(&weak),
        weak,
        strong,
        radical,
        extreme,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::gallery;

    /// Reachability closure by repeated squaring-free propagation; the
    /// independent oracle for the path-defined equivalences.
    fn reachable(n: usize, step: impl Fn(usize, usize) -> bool) -> Vec<Vec<bool>> {
        let mut r = vec![vec![false; n]; n];
        for v in 0..n {
            r[v][v] = true;
        }
        for u in 0..n {
            for v in 0..n {
                if step(u, v) {
                    r[u][v] = true;
                }
            }
        }
        loop {
            let mut changed = false;
            for u in 0..n {
                for v in 0..n {
                    if !r[u][v] {
                        if (0..n).any(|w| r[u][w] && r[w][v]) {
                            r[u][v] = true;
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                return r;
            }
        }
    }

    fn naive_equivalence(g: &Digraph, kind: EquivalenceKind) -> Partition {
        let n = g.n();
        let r = match kind {
            EquivalenceKind::Weak => reachable(n, |u, v| g.has_edge(u, v) || g.has_edge(v, u)),
            EquivalenceKind::Strong => reachable(n, |u, v| g.has_edge(u, v)),
            EquivalenceKind::Extreme => reachable(n, |u, v| g.has_edge(u, v) && g.has_edge(v, u)),
        };
        let mut pairs = Vec::new();
        for u in 0..n {
            for v in 0..n {
                if r[u][v] && r[v][u] {
                    pairs.push((u, v));
                }
            }
        }
        Partition::from_pairs(n, pairs)
    }

    #[test]
    fn d_equivalences() {
        let d = gallery("D").unwrap();
        assert_eq!(
            equivalence(&d, EquivalenceKind::Extreme).to_string(),
            "{{0,1},{2}}"
        );
        assert_eq!(
            equivalence(&d, EquivalenceKind::Strong).to_string(),
            "{{0,1,2}}"
        );
        assert_eq!(
            equivalence(&d, EquivalenceKind::Weak).to_string(),
            "{{0,1,2}}"
        );
    }

    #[test]
    fn k_equivalences() {
        let k = gallery("K").unwrap();
        assert_eq!(
            equivalence(&k, EquivalenceKind::Extreme).to_string(),
            "{{0,1},{2,3}}"
        );
        assert_eq!(
            equivalence(&k, EquivalenceKind::Strong).to_string(),
            "{{0,1,2,3}}"
        );
    }

    #[test]
    fn equivalences_match_reachability_oracle() {
        for name in ["D", "K", "N", "C3", "C5", "fig3"] {
            let g = gallery(name).unwrap();
            for kind in [
                EquivalenceKind::Weak,
                EquivalenceKind::Strong,
                EquivalenceKind::Extreme,
            ] {
                assert_eq!(
                    equivalence(&g, kind),
                    naive_equivalence(&g, kind),
                    "{name} {kind:?}"
                );
            }
        }
    }

    #[test]
    fn radical_traces() {
        let d = gallery("D").unwrap();
        let trace = radical(&d);
        assert_eq!(trace.result.to_string(), "{{0,1,2}}");
        assert_eq!(trace.stages.len(), 3); // ν₀ ⊊ ν₁ = ν₂
        assert_eq!(trace.stages[0].to_string(), "{{0,1},{2}}");
        assert_eq!(trace.stages[1], trace.stages[2]);

        let k = gallery("K").unwrap();
        assert!(radical(&k).result.is_single());

        let c3 = gallery("C3").unwrap();
        let trace = radical(&c3);
        assert!(trace.result.is_discrete());
        assert_eq!(trace.stages.len(), 1);
    }

    #[test]
    fn oracle_examples() {
        let budget = Budget::default();
        let d = gallery("D").unwrap();
        assert!(smallest_antisymmetric_oracle(&d, &budget)
            .unwrap()
            .is_single());
        let c3 = gallery("C3").unwrap();
        assert!(smallest_antisymmetric_oracle(&c3, &budget)
            .unwrap()
            .is_discrete());
        let single = gallery("C1").unwrap();
        assert!(smallest_antisymmetric_oracle(&single, &budget)
            .unwrap()
            .is_single());

        let irreflexive = Digraph::new("x", 2, [(0, 1)]).unwrap();
        assert!(smallest_antisymmetric_oracle(&irreflexive, &budget).is_err());
        let big = gallery("C9").unwrap();
        assert!(smallest_antisymmetric_oracle(&big, &budget).is_err());
    }

    #[test]
    fn partition_enumeration_counts_are_bell_numbers() {
        assert_eq!(all_partitions(1).len(), 1);
        assert_eq!(all_partitions(3).len(), 5);
        assert_eq!(all_partitions(4).len(), 15);
        assert_eq!(all_partitions(5).len(), 52);
    }

    #[test]
    fn h_equivalence_examples() {
        let budget = Budget::default();
        let d = gallery("D").unwrap();
        let n = gallery("N").unwrap();
        assert_eq!(
            h_equivalence(&d, &n, &budget).unwrap(),
            equivalence(&d, EquivalenceKind::Extreme)
        );
        assert!(h_equivalence(&d, &d, &budget).unwrap().is_single());
        let c3 = gallery("C3").unwrap();
        assert!(h_equivalence(&c3, &n, &budget).unwrap().is_discrete());
    }

    #[test]
    fn paths() {
        let d = gallery("D").unwrap();
        assert_eq!(
            find_path(&d, 0, 2, PathMode::Directed).unwrap(),
            Some(vec![0, 1, 2])
        );
        assert_eq!(
            find_path(&d, 1, 1, PathMode::Symmetric).unwrap(),
            Some(vec![1])
        );
        assert_eq!(
            find_path(&d, 2, 1, PathMode::Symmetric).unwrap(),
            None
        );
        let fig3 = gallery("fig3").unwrap();
        assert_eq!(find_path(&fig3, 0, 2, PathMode::Symmetric).unwrap(), None);
        assert!(find_path(&fig3, 0, 2, PathMode::Oriented).unwrap().is_some());
        assert!(find_path(&d, 0, 5, PathMode::Directed).is_err());
    }

    #[test]
    fn return_path_bounds() {
        let d = gallery("D").unwrap();
        assert_eq!(hm_bound(&d).unwrap(), Some(3));
        let n = gallery("N").unwrap();
        assert_eq!(hm_bound(&n).unwrap(), Some(2));
        let single = gallery("C1").unwrap();
        assert_eq!(hm_bound(&single).unwrap(), Some(1));

        // a 3-cycle with a pendant loop vertex pointing into it: the
        // pendant edge has no return path
        let mut edges: Vec<(usize, usize)> = gallery("C3").unwrap().edges().collect();
        edges.push((3, 3));
        edges.push((3, 0));
        let g = Digraph::new("tail", 4, edges).unwrap();
        assert_eq!(hm_bound(&g).unwrap(), None);

        let irreflexive = Digraph::new("x", 2, [(0, 1)]).unwrap();
        assert!(hm_bound(&irreflexive).is_err());
    }

    #[test]
    fn chain_reports() {
        let d = gallery("D").unwrap();
        let report = verify_chain(&d);
        assert!(report.all_hold());
        assert!(report.extreme.refines(&report.radical));
        assert_ne!(report.extreme, report.radical);
        assert_eq!(report.radical, report.strong);
        assert_eq!(report.strong, report.weak);

        let single = gallery("C1").unwrap();
        let report = verify_chain(&single);
        assert!(report.all_hold());
        assert_eq!(report.extreme, report.weak);

        let k = gallery("K").unwrap();
        let report = verify_chain(&k);
        assert!(report.all_hold());
        assert_ne!(report.extreme, report.radical);
        assert_eq!(report.radical, report.weak);
    }
}
