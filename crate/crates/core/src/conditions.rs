//! The six-ary identity chain characterizing the collapse of strong and
//! extreme components, its witness search inside freely generated
//! digraphs, the ρ-operator, and equivalence-collapse reports.

use std::fmt;
use std::str::FromStr;

use crate::algebra::{
    close_pairs, free_algebra, parse_term_table, Derivation, FiniteAlgebra, TermTable,
};
use crate::connectivity::{equivalence, find_path, radical, EquivalenceKind, PathMode};
use crate::digraph::Digraph;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::Budget;

/// Which generator the identity chain must reach. The printed final
/// identity uses `y`, the path formulation uses `z`; both readings are
/// supported.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Endpoint {
    Y,
    Z,
}

impl Endpoint {
    /// Position of the endpoint among the generators x, y, z.
    fn generator_index(self) -> usize {
        match self {
            Endpoint::Y => 1,
            Endpoint::Z => 2,
        }
    }
}

impl fmt::Display for Endpoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Endpoint::Y => "y",
            Endpoint::Z => "z",
        })
    }
}

impl FromStr for Endpoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Endpoint> {
        match s {
            "y" | "Y" => Ok(Endpoint::Y),
            "z" | "Z" => Ok(Endpoint::Z),
            other => Err(Error::Precondition(format!("endpoint must be y or z, got `{other}`"))),
        }
    }
}

/// A length-`n` chain of six-ary term pairs `(tᵢ, sᵢ)` together with the
/// symmetric path it realizes in the freely generated digraph of the
/// reflexive 3-cycle on x, y, z.
///
/// The path is informative: [`check_identity_system`] evaluates only the
/// tables. Witnesses produced by [`search_identity_witness`] carry the
/// actual path (`n + 1` vertices); hand-built witnesses may leave it empty.
#[derive(Clone, Debug)]
pub struct IdentityWitness {
    pub chain_length: usize,
    pub t_terms: Vec<TermTable>,
    pub s_terms: Vec<TermTable>,
    pub path: Vec<usize>,
    pub endpoint: Endpoint,
}

impl IdentityWitness {
    /// Serializes as a `witness` header, the term blocks `t₁..tₙ` then
    /// `s₁..sₙ`, the path line, and `end`.
    pub fn to_text(&self) -> String {
        let mut out = format!("witness n={} endpoint={}\n", self.chain_length, self.endpoint);
        for t in self.t_terms.iter().chain(&self.s_terms) {
            out.push_str(&t.to_text());
        }
        out.push_str("path");
        for v in &self.path {
            out.push_str(&format!(" {v}"));
        }
        out.push('\n');
        out.push_str("end\n");
        out
    }
}

/// Parses the witness serialization produced by [`IdentityWitness::to_text`].
pub fn parse_witness(text: &str) -> Result<IdentityWitness> {
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, body)| !body.is_empty());

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let rest = header
        .strip_prefix("witness")
        .ok_or_else(|| err(line, "expected `witness n=<n> endpoint=<y|z>`"))?;
    let mut chain_length = None;
    let mut endpoint = None;
    for tok in rest.split_whitespace() {
        if let Some(v) = tok.strip_prefix("n=") {
            chain_length = Some(v.parse().map_err(|_| err(line, "bad n"))?);
        } else if let Some(v) = tok.strip_prefix("endpoint=") {
            endpoint = Some(v.parse()?);
        } else {
            return Err(err(line, &format!("unexpected token `{tok}`")));
        }
    }
    let chain_length: usize = chain_length.ok_or_else(|| err(line, "missing n="))?;
    let endpoint: Endpoint = endpoint.ok_or_else(|| err(line, "missing endpoint="))?;
    if chain_length == 0 {
        return Err(err(line, "chain length must be at least 1"));
    }

    let mut terms = Vec::with_capacity(2 * chain_length);
    let mut path = None;
    let mut ended = false;
    while let Some((line, body)) = lines.next() {
        if body == "end" {
            ended = true;
            break;
        }
        if let Some(rest) = body.strip_prefix("path") {
            let mut vs = Vec::new();
            for tok in rest.split_whitespace() {
                vs.push(tok.parse().map_err(|_| err(line, "bad path vertex"))?);
            }
            path = Some(vs);
            continue;
        }
        if body.starts_with("term") {
            // pull the value lines belonging to this block
            let mut block = String::from(body);
            block.push('\n');
            let header_err = || err(line, "malformed term header");
            let mut it = body.split_whitespace();
            it.next();
            let arity: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(header_err)?;
            let size: usize = it.next().and_then(|t| t.parse().ok()).ok_or_else(header_err)?;
            let need = size
                .checked_pow(arity as u32)
                .ok_or_else(|| err(line, "term table too large"))?;
            let mut have = it.count();
            while have < need {
                let (l, more) = lines
                    .next()
                    .ok_or_else(|| err(line, "term table values missing"))?;
                if more == "end" || more.starts_with("term") || more.starts_with("path") {
                    return Err(err(l, "term table values missing"));
                }
                have += more.split_whitespace().count();
                block.push_str(more);
                block.push('\n');
            }
            terms.push(parse_term_table(&block)?);
            continue;
        }
        return Err(err(line, "expected `term`, `path`, or `end`"));
    }
    if !ended {
        return Err(err(text.lines().count(), "missing `end`"));
    }
    if terms.len() != 2 * chain_length {
        return Err(Error::SizeMismatch(format!(
            "witness lists {} term blocks, expected {}",
            terms.len(),
            2 * chain_length
        )));
    }
    let s_terms = terms.split_off(chain_length);
    Ok(IdentityWitness {
        chain_length,
        t_terms: terms,
        s_terms,
        path: path.unwrap_or_default(),
        endpoint,
    })
}

/// Evaluates the identity chain over every `(x, y, z)` in the cube of
/// the universe:
///
/// ```text
/// t₁(x,x,y,y,z,z) = x
/// tᵢ(x,x,y,y,z,z) = sᵢ(x,y,y,z,z,x)
/// sᵢ(x,x,y,y,z,z) = tᵢ(x,y,y,z,z,x)
/// tᵢ(x,x,y,y,z,z) = tᵢ₋₁(x,y,y,z,z,x)   for i > 1
/// endpoint        = tₙ(x,y,y,z,z,x)
/// ```
pub fn check_identity_system(a: &FiniteAlgebra, w: &IdentityWitness) -> Result<bool> {
    if w.chain_length == 0
        || w.t_terms.len() != w.chain_length
        || w.s_terms.len() != w.chain_length
    {
        return Err(Error::SizeMismatch(format!(
            "witness declares n={} but carries {} t-terms and {} s-terms",
            w.chain_length,
            w.t_terms.len(),
            w.s_terms.len()
        )));
    }
    for t in w.t_terms.iter().chain(&w.s_terms) {
        if t.arity() != 6 {
            return Err(Error::ArityMismatch {
                expected: 6,
                got: t.arity(),
            });
        }
        if t.size() != a.size() {
            return Err(Error::SizeMismatch(format!(
                "term table over size {}, algebra has size {}",
                t.size(),
                a.size()
            )));
        }
    }
    let s = a.size();
    let n = w.chain_length;
    for x in 0..s {
        for y in 0..s {
            for z in 0..s {
                let left = [x, x, y, y, z, z];
                let right = [x, y, y, z, z, x];
                if w.t_terms[0].get(&left) != x {
                    return Ok(false);
                }
                for i in 0..n {
                    if w.t_terms[i].get(&left) != w.s_terms[i].get(&right) {
                        return Ok(false);
                    }
                    if w.s_terms[i].get(&left) != w.t_terms[i].get(&right) {
                        return Ok(false);
                    }
                    if i > 0 && w.t_terms[i].get(&left) != w.t_terms[i - 1].get(&right) {
                        return Ok(false);
                    }
                }
                let goal = match w.endpoint {
                    Endpoint::Y => y,
                    Endpoint::Z => z,
                };
                if w.t_terms[n - 1].get(&right) != goal {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Seed pairs of the reflexive 3-cycle copy on generators x, y, z, in the
/// order that makes the identity argument patterns `(x,x,y,y,z,z)` and
/// `(x,y,y,z,z,x)` the left and right projections of the seed list.
fn witness_seed_pairs(generators: &[usize]) -> Vec<(usize, usize)> {
    let (x, y, z) = (generators[0], generators[1], generators[2]);
    vec![(x, x), (x, y), (y, y), (y, z), (z, z), (z, x)]
}

/// Searches for an identity-chain witness by building the digraph freely
/// generated by the reflexive 3-cycle, walking the shortest symmetric
/// path from the generator x to the endpoint generator, and replaying
/// each path edge's closure derivation into a six-ary term table.
///
/// Returns `None` when no symmetric path of length at most `max_n`
/// exists. A reconstructed witness that fails [`check_identity_system`]
/// is a hard error: it would falsify the edge/term correspondence.
pub fn search_identity_witness(
    a: &FiniteAlgebra,
    endpoint: Endpoint,
    max_n: usize,
    budget: &Budget,
) -> Result<Option<IdentityWitness>> {
    let free = free_algebra(a, 3, budget)?;
    let seeds = witness_seed_pairs(&free.generators);
    let closure = close_pairs(&free.algebra, &seeds);
    let fg = Digraph::new("free-c3", free.algebra.size(), closure.pairs.clone())?;

    let start = free.generators[0];
    let goal = free.generators[endpoint.generator_index()];
    let mut path = match find_path(&fg, start, goal, PathMode::Symmetric)? {
        None => return Ok(None),
        Some(p) => p,
    };
    if path.len() == 1 {
        // collapsed generators (one-element free algebra); realize the
        // required n ≥ 1 through the loop at the start vertex
        path.push(start);
    }
    let n = path.len() - 1;
    if n > max_n {
        return Ok(None);
    }

    let pair_index: std::collections::BTreeMap<(usize, usize), usize> = closure
        .pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut memo: Vec<Option<TermTable>> = vec![None; closure.pairs.len()];
    let mut t_terms = Vec::with_capacity(n);
    let mut s_terms = Vec::with_capacity(n);
    for i in 0..n {
        let forward = pair_index[&(path[i], path[i + 1])];
        let backward = pair_index[&(path[i + 1], path[i])];
        t_terms.push(replay_term(a, &closure.derivations, forward, &mut memo));
        s_terms.push(replay_term(a, &closure.derivations, backward, &mut memo));
    }
    let witness = IdentityWitness {
        chain_length: n,
        t_terms,
        s_terms,
        path,
        endpoint,
    };
    if !check_identity_system(a, &witness)? {
        return Err(Error::Falsified(
            "reconstructed witness fails the identity system".into(),
        ));
    }
    Ok(Some(witness))
}

/// Rebuilds the six-ary term table of a closure pair by structural
/// recursion over its derivation: seed pairs are projections, derived
/// pairs apply a basic operation pointwise to their parents.
fn replay_term(
    a: &FiniteAlgebra,
    derivations: &[Derivation],
    pair: usize,
    memo: &mut Vec<Option<TermTable>>,
) -> TermTable {
    if let Some(t) = &memo[pair] {
        return t.clone();
    }
    let table = match &derivations[pair] {
        Derivation::Seed(i) => TermTable::projection(a.size(), 6, *i),
        Derivation::Apply(op, parents) => {
            let parent_tables: Vec<TermTable> = parents
                .iter()
                .map(|&p| replay_term(a, derivations, p, memo))
                .collect();
            let len = parent_tables[0].table().len();
            let mut args = vec![0usize; parent_tables.len()];
            let values: Vec<usize> = (0..len)
                .map(|j| {
                    for (slot, t) in args.iter_mut().zip(&parent_tables) {
                        *slot = t.table()[j];
                    }
                    a.apply(*op, &args)
                })
                .collect();
            TermTable::new(a.size(), 6, values).expect("pointwise image stays in range")
        }
    };
    memo[pair] = Some(table.clone());
    table
}

/// Same vertices; an edge `x → y` exactly when some `u` has `x → u`,
/// `u → y`, and `y → u`.
pub fn rho_digraph(g: &Digraph) -> Digraph {
    let out = g.out_adj();
    let mut edges = Vec::new();
    for x in 0..g.n() {
        for y in 0..g.n() {
            if out[x]
                .iter()
                .any(|&u| g.has_edge(u, y) && g.has_edge(y, u))
            {
                edges.push((x, y));
            }
        }
    }
    Digraph::new(format!("rho({})", g.name()), g.n(), edges).expect("vertices unchanged")
}

/// The four connectivity partitions of a digraph and which pairs of them
/// coincide.
#[derive(Clone, Debug)]
pub struct CollapseReport {
    pub weak: Partition,
    pub strong: Partition,
    pub radical: Partition,
    pub extreme: Partition,
    pub weak_eq_strong: bool,
    pub strong_eq_radical: bool,
    pub radical_eq_extreme: bool,
    pub weak_eq_extreme: bool,
    pub strong_eq_extreme: bool,
}

pub fn collapse_report(g: &Digraph) -> CollapseReport {
    let weak = equivalence(g, EquivalenceKind::Weak);
    let strong = equivalence(g, EquivalenceKind::Strong);
    let extreme = equivalence(g, EquivalenceKind::Extreme);
    let radical = radical(g).result;
    CollapseReport {
        weak_eq_strong: weak == strong,
        strong_eq_radical: strong == radical,
        radical_eq_extreme: radical == extreme,
        weak_eq_extreme: weak == extreme,
        strong_eq_extreme: strong == extreme,
        weak,
        strong,
        radical,
        extreme,
    }
}

impl fmt::Display for CollapseReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "weak     {}", self.weak)?;
        writeln!(f, "strong   {}", self.strong)?;
        writeln!(f, "radical  {}", self.radical)?;
        writeln!(f, "extreme  {}", self.extreme)?;
        writeln!(f, "weak=strong      {}", self.weak_eq_strong)?;
        writeln!(f, "strong=radical   {}", self.strong_eq_radical)?;
        writeln!(f, "radical=extreme  {}", self.radical_eq_extreme)?;
        writeln!(f, "weak=extreme     {}", self.weak_eq_extreme)?;
        write!(f, "strong=extreme   {}", self.strong_eq_extreme)
    }
}
