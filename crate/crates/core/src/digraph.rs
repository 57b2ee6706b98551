//! Finite digraphs with set-semantics edges, the named gallery, and
//! structural operations: quotients, powers, induced subdigraphs,
//! homomorphism enumeration and retraction testing.

use std::collections::BTreeSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::search::{Enumeration, Mask, Problem, StopReason};
use crate::Budget;

/// A digraph on vertices `0..n` with an ordered-pair edge relation.
///
/// Loops are ordinary edges; reflexivity is the derived predicate
/// [`Digraph::is_reflexive`]. Equality ignores the name.
#[derive(Clone)]
pub struct Digraph {
    name: String,
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl PartialEq for Digraph {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.edges == other.edges
    }
}

impl Eq for Digraph {}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph({}, n={}, edges={:?})", self.name, self.n, self.edges)
    }
}

impl Digraph {
    pub fn new(
        name: impl Into<String>,
        n: usize,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Digraph> {
        let mut set = BTreeSet::new();
        for (u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            set.insert((u, v));
        }
        Ok(Digraph {
            name: name.into(),
            n,
            edges: set,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Digraph {
        self.name = name.into();
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.edges.contains(&(u, v))
    }

    /// Successor lists, ascending per vertex.
    pub fn out_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[u].push(v);
        }
        adj
    }

    /// Predecessor lists, ascending per vertex.
    pub fn in_adj(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(u, v) in &self.edges {
            adj[v].push(u);
        }
        adj
    }

    pub fn is_reflexive(&self) -> bool {
        (0..self.n).all(|v| self.has_edge(v, v))
    }

    /// True when no two distinct vertices are joined in both directions.
    pub fn is_antisymmetric(&self) -> bool {
        self.edges
            .iter()
            .all(|&(u, v)| u == v || !self.has_edge(v, u))
    }

    pub(crate) fn succ_pred_masks(&self) -> (Vec<Mask>, Vec<Mask>) {
        let mut succ = vec![Mask::empty(self.n); self.n];
        let mut pred = vec![Mask::empty(self.n); self.n];
        for &(u, v) in &self.edges {
            succ[u].insert(v);
            pred[v].insert(u);
        }
        (succ, pred)
    }

    /// Serializes in the line-oriented text format accepted by [`parse_digraph`].
    pub fn to_text(&self) -> String {
        let mut out = format!("digraph {}\nvertices {}\nedges\n", self.name, self.n);
        for &(u, v) in &self.edges {
            out.push_str(&format!("{u} {v}\n"));
        }
        out.push_str("end\n");
        out
    }
}

/// A total map between vertex sets, the witness type for homomorphisms,
/// retractions and coretractions.
#[derive(Clone, PartialEq, Eq)]
pub struct VertexMap {
    source_n: usize,
    target_n: usize,
    image: Vec<usize>,
}

impl VertexMap {
    pub fn new(source_n: usize, target_n: usize, image: Vec<usize>) -> Result<VertexMap> {
        if image.len() != source_n {
            return Err(Error::SizeMismatch(format!(
                "image array has length {}, expected {}",
                image.len(),
                source_n
            )));
        }
        if let Some(&v) = image.iter().find(|&&v| v >= target_n) {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: target_n,
            });
        }
        Ok(VertexMap {
            source_n,
            target_n,
            image,
        })
    }

    pub fn identity(n: usize) -> VertexMap {
        VertexMap {
            source_n: n,
            target_n: n,
            image: (0..n).collect(),
        }
    }

    pub fn source_n(&self) -> usize {
        self.source_n
    }

    pub fn target_n(&self) -> usize {
        self.target_n
    }

    pub fn apply(&self, v: usize) -> usize {
        self.image[v]
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn is_injective(&self) -> bool {
        let mut seen = vec![false; self.target_n];
        self.image.iter().all(|&v| !std::mem::replace(&mut seen[v], true))
    }

    /// `other ∘ self`: apply `self`, then `other`.
    pub fn then(&self, other: &VertexMap) -> Result<VertexMap> {
        if self.target_n != other.source_n {
            return Err(Error::SizeMismatch(format!(
                "cannot compose map into {} with map from {}",
                self.target_n, other.source_n
            )));
        }
        VertexMap::new(
            self.source_n,
            other.target_n,
            self.image.iter().map(|&v| other.apply(v)).collect(),
        )
    }

    /// Checks edge preservation from `h` to `g`.
    pub fn is_homomorphism(&self, h: &Digraph, g: &Digraph) -> bool {
        self.source_n == h.n()
            && self.target_n == g.n()
            && h.edges().all(|(u, v)| g.has_edge(self.apply(u), self.apply(v)))
    }
}

impl fmt::Display for VertexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, v) in self.image.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{v}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Debug for VertexMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Parses the line-oriented digraph format:
///
/// ```text
/// digraph <name>
/// vertices <n>
/// [reflexive]
/// edges
/// <u> <v>
/// end
/// ```
///
/// `#` starts a comment; blank lines are skipped. The `reflexive`
/// directive inserts all loops before the edge lines are read.
/// Duplicate edges are accepted silently (set semantics).
pub fn parse_digraph(text: &str) -> Result<Digraph> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| {
            let body = raw.split('#').next().unwrap_or("").trim();
            (i + 1, body)
        })
        .filter(|(_, body)| !body.is_empty());
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let name = header
        .strip_prefix("digraph")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| err(line, "expected `digraph <name>`"))?
        .to_string();

    let (line, vline) = lines.next().ok_or_else(|| err(line, "missing `vertices <n>`"))?;
    let n: usize = vline
        .strip_prefix("vertices")
        .map(str::trim)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(line, "expected `vertices <n>`"))?;

    let (line, mut cur) = lines.next().ok_or_else(|| err(line, "missing `edges` section"))?;
    let mut edges: BTreeSet<(usize, usize)> = BTreeSet::new();
    if cur == "reflexive" {
        edges.extend((0..n).map(|v| (v, v)));
        let (_, next) = lines.next().ok_or_else(|| err(line, "missing `edges` section"))?;
        cur = next;
    }
    if cur != "edges" {
        return Err(err(line, "expected `edges`"));
    }

    let mut closed = false;
    for (line, body) in lines.by_ref() {
        if body == "end" {
            closed = true;
            break;
        }
        let mut it = body.split_whitespace();
        let pair = (it.next(), it.next(), it.next());
        let (u, v) = match pair {
            (Some(a), Some(b), None) => {
                let u = a.parse().map_err(|_| err(line, "expected `<u> <v>`"))?;
                let v = b.parse().map_err(|_| err(line, "expected `<u> <v>`"))?;
                (u, v)
            }
            _ => return Err(err(line, "expected `<u> <v>`")),
        };
        for w in [u, v] {
            if w >= n {
                return Err(err(line, &format!("vertex {w} out of range (n = {n})")));
            }
        }
        edges.insert((u, v));
    }
    if !closed {
        return Err(err(text.lines().count(), "missing `end`"));
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing content after `end`"));
    }
    Ok(Digraph { name, n, edges })
}

/// The named digraphs used throughout: `D`, `K`, `N`, reflexive cycles
/// `C<k>`, and the stored seven-vertex regression digraph `fig3` (the
/// digraph freely generated by the reflexive 3-cycle over the two-element
/// semilattice, generators at vertices 0, 1, 2).
pub fn gallery(name: &str) -> Result<Digraph> {
    match name {
        "D" => Digraph::new(
            "D",
            3,
            [(0, 0), (1, 1), (2, 2), (0, 1), (1, 0), (1, 2), (2, 0)],
        ),
        "K" => Digraph::new(
            "K",
            4,
            [
                (0, 0),
                (1, 1),
                (2, 2),
                (3, 3),
                (0, 1),
                (1, 0),
                (1, 2),
                (2, 3),
                (3, 2),
                (3, 0),
            ],
        ),
        "N" => Digraph::new("N", 2, [(0, 0), (0, 1), (1, 0), (1, 1)]),
        "fig3" => Digraph::new("fig3", 7, FIG3_EDGES.iter().copied()),
        _ => {
            if let Some(size) = name.strip_prefix('C') {
                let k: usize = size
                    .parse()
                    .map_err(|_| Error::UnknownGallery(name.to_string()))?;
                return reflexive_cycle(k);
            }
            Err(Error::UnknownGallery(name.to_string()))
        }
    }
}

/// The reflexive directed `k`-cycle; `C1` is a single loop.
pub fn reflexive_cycle(k: usize) -> Result<Digraph> {
    if k == 0 {
        return Err(Error::Precondition("cycle length must be at least 1".into()));
    }
    let mut edges: Vec<(usize, usize)> = (0..k).map(|v| (v, v)).collect();
    edges.extend((0..k).map(|v| (v, (v + 1) % k)));
    Digraph::new(format!("C{k}"), k, edges)
}

/// Edges of the stored `fig3` digraph. Vertices 0..3 are the generators
/// x, y, z; vertices 3..7 are the meets xy, xz, yz, xyz.
const FIG3_EDGES: [(usize, usize); 28] = [
    (0, 0),
    (0, 1),
    (0, 3),
    (1, 1),
    (1, 2),
    (1, 5),
    (2, 0),
    (2, 2),
    (2, 4),
    (3, 1),
    (3, 3),
    (3, 4),
    (3, 5),
    (3, 6),
    (4, 0),
    (4, 3),
    (4, 4),
    (4, 5),
    (4, 6),
    (5, 2),
    (5, 3),
    (5, 4),
    (5, 5),
    (5, 6),
    (6, 3),
    (6, 4),
    (6, 5),
    (6, 6),
];

/// Quotient digraph: vertices are the blocks of `p` in canonical order;
/// `A → B` iff some `a ∈ A`, `b ∈ B` has `a → b`.
pub fn quotient(g: &Digraph, p: &Partition) -> Result<Digraph> {
    if p.n() != g.n() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} elements, digraph has {} vertices",
            p.n(),
            g.n()
        )));
    }
    let edges: BTreeSet<(usize, usize)> = g
        .edges()
        .map(|(u, v)| (p.block_of(u), p.block_of(v)))
        .collect();
    Ok(Digraph {
        name: format!("{}/~", g.name),
        n: p.block_count(),
        edges,
    })
}

/// The `k`-th categorical power: vertices are `k`-tuples in lexicographic
/// order (first coordinate most significant), with componentwise edges.
pub fn power(g: &Digraph, k: usize, budget: &Budget) -> Result<Digraph> {
    if k == 0 {
        return Err(Error::Precondition("power exponent must be at least 1".into()));
    }
    let cells = checked_pow(g.n(), k, budget.expansions)?;
    checked_pow(g.edge_count(), k, budget.expansions)?;
    let mut edges = BTreeSet::new();
    let edge_list: Vec<(usize, usize)> = g.edges().collect();
    // odometer over k-tuples of edges
    let mut idx = vec![0usize; k];
    if !edge_list.is_empty() {
        loop {
            let mut a = 0;
            let mut b = 0;
            for &i in &idx {
                a = a * g.n() + edge_list[i].0;
                b = b * g.n() + edge_list[i].1;
            }
            edges.insert((a, b));
            let mut pos = k;
            loop {
                if pos == 0 {
                    break;
                }
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < edge_list.len() {
                    break;
                }
                idx[pos] = 0;
            }
            if pos == 0 && idx[0] == 0 {
                break;
            }
        }
    }
    Ok(Digraph {
        name: format!("{}^{}", g.name, k),
        n: cells,
        edges,
    })
}

pub(crate) fn checked_pow(base: usize, exp: usize, cap: u64) -> Result<usize> {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
        if acc > cap as u128 {
            return Err(Error::Budget { spent: cap, found: 0 });
        }
    }
    Ok(acc as usize)
}

/// Subdigraph induced by `s`, re-indexed canonically (ascending order of
/// the chosen vertices).
pub fn induced(g: &Digraph, s: &[usize]) -> Result<Digraph> {
    let picked: BTreeSet<usize> = s.iter().copied().collect();
    if let Some(&v) = picked.iter().find(|&&v| v >= g.n()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: g.n() });
    }
    let index: std::collections::BTreeMap<usize, usize> =
        picked.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let edges: BTreeSet<(usize, usize)> = g
        .edges()
        .filter(|(u, v)| picked.contains(u) && picked.contains(v))
        .map(|(u, v)| (index[&u], index[&v]))
        .collect();
    Ok(Digraph {
        name: format!("{}[{}]", g.name, picked.len()),
        n: picked.len(),
        edges,
    })
}

/// Enumerates every homomorphism `h → g` extending `fixed`, in
/// lexicographic order of the image arrays.
///
/// The result reports whether the enumeration is complete or was cut off
/// by `limit` or by the expansion budget.
pub fn enumerate_homomorphisms(
    h: &Digraph,
    g: &Digraph,
    fixed: &[(usize, usize)],
    limit: usize,
    budget: u64,
) -> Result<Enumeration<VertexMap>> {
    let problem = hom_problem(h, g, fixed, false)?;
    let source_n = h.n();
    let target_n = g.n();
    Ok(problem.solve(limit, budget).map(|image| VertexMap {
        source_n,
        target_n,
        image,
    }))
}

fn hom_problem(h: &Digraph, g: &Digraph, fixed: &[(usize, usize)], injective: bool) -> Result<Problem> {
    let mut fixed_vec: Vec<Option<usize>> = vec![None; h.n()];
    for &(v, img) in fixed {
        if v >= h.n() {
            return Err(Error::VertexOutOfRange { vertex: v, n: h.n() });
        }
        if img >= g.n() {
            return Err(Error::VertexOutOfRange { vertex: img, n: g.n() });
        }
        if let Some(prev) = fixed_vec[v] {
            if prev != img {
                return Err(Error::Precondition(format!(
                    "vertex {v} fixed to both {prev} and {img}"
                )));
            }
        }
        fixed_vec[v] = Some(img);
    }
    let (succ, pred) = g.succ_pred_masks();
    Ok(Problem {
        var_count: h.n(),
        target_n: g.n(),
        succ,
        pred,
        constraints: h.edges().collect(),
        fixed: fixed_vec,
        injective,
    })
}

/// Searches for a coretraction `β: h → g` (injective homomorphism) and a
/// retraction `α: g → h` with `α ∘ β = id`, returning the
/// lexicographically first such pair.
pub fn is_retract(h: &Digraph, g: &Digraph, budget: &Budget) -> Result<Option<(VertexMap, VertexMap)>> {
    let mut spent: u64 = 0;
    let embeddings = hom_problem(h, g, &[], true)?.solve(usize::MAX, budget.expansions);
    spent += embeddings.expansions;
    if embeddings.stop == StopReason::BudgetExhausted {
        return Err(Error::Budget { spent, found: 0 });
    }
    for beta_image in embeddings.items {
        let fixed: Vec<(usize, usize)> = beta_image.iter().enumerate().map(|(v, &b)| (b, v)).collect();
        let remaining = budget.expansions.saturating_sub(spent);
        let alphas = hom_problem(g, h, &fixed, false)?.solve(1, remaining);
        spent += alphas.expansions;
        if alphas.stop == StopReason::BudgetExhausted {
            return Err(Error::Budget { spent, found: 0 });
        }
        if let Some(alpha_image) = alphas.items.into_iter().next() {
            let beta = VertexMap {
                source_n: h.n(),
                target_n: g.n(),
                image: beta_image,
            };
            let alpha = VertexMap {
                source_n: g.n(),
                target_n: h.n(),
                image: alpha_image,
            };
            return Ok(Some((beta, alpha)));
        }
    }
    Ok(None)
}

/// Finds an isomorphism `g → h` if one exists.
///
/// An injective homomorphism between digraphs of equal order and equal
/// edge count is automatically an isomorphism, because distinct edges map
/// to distinct edges.
pub fn find_isomorphism(g: &Digraph, h: &Digraph, budget: &Budget) -> Result<Option<VertexMap>> {
    if g.n() != h.n() || g.edge_count() != h.edge_count() {
        return Ok(None);
    }
    let sol = hom_problem(g, h, &[], true)?.solve(1, budget.expansions);
    if sol.stop == StopReason::BudgetExhausted {
        return Err(Error::Budget {
            spent: sol.expansions,
            found: sol.items.len(),
        });
    }
    Ok(sol.items.into_iter().next().map(|image| VertexMap {
        source_n: g.n(),
        target_n: h.n(),
        image,
    }))
}
