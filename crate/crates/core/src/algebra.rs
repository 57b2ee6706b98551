//! Finite algebras as explicit operation tables, subuniverse closure,
//! compatibility and congruence checks, generated and freely generated
//! digraphs, and term-operation closures.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use crate::connectivity::{equivalence, EquivalenceKind};
use crate::digraph::{checked_pow, Digraph};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::Budget;

/// One basic operation: a total function `{0..size}^arity → {0..size}`
/// stored as a full table in lexicographic argument order, first argument
/// most significant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Operation {
    pub name: String,
    pub arity: usize,
    pub table: Vec<usize>,
}

/// A finite algebra on universe `{0, …, size−1}`. Nullary operations are
/// rejected; at least one operation is required.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    name: String,
    size: usize,
    ops: Vec<Operation>,
}

impl FiniteAlgebra {
    pub fn new(name: impl Into<String>, size: usize, ops: Vec<Operation>) -> Result<FiniteAlgebra> {
        let name = name.into();
        if size == 0 {
            return Err(Error::Precondition("universe must be nonempty".into()));
        }
        if ops.is_empty() {
            return Err(Error::Precondition("algebra needs at least one operation".into()));
        }
        for op in &ops {
            if op.arity == 0 {
                return Err(Error::Precondition(format!(
                    "operation {} is nullary; constants are not supported",
                    op.name
                )));
            }
            let expect = size.checked_pow(op.arity as u32).ok_or_else(|| {
                Error::Precondition(format!("table of {} would overflow", op.name))
            })?;
            if op.table.len() != expect {
                return Err(Error::SizeMismatch(format!(
                    "operation {} has {} table entries, expected {}",
                    op.name,
                    op.table.len(),
                    expect
                )));
            }
            if let Some(&v) = op.table.iter().find(|&&v| v >= size) {
                return Err(Error::VertexOutOfRange { vertex: v, n: size });
            }
        }
        Ok(FiniteAlgebra { name, size, ops })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn ops(&self) -> &[Operation] {
        &self.ops
    }

    /// Applies basic operation `op` to `args` (unchecked index math).
    pub fn apply(&self, op: usize, args: &[usize]) -> usize {
        let o = &self.ops[op];
        debug_assert_eq!(args.len(), o.arity);
        o.table[tuple_index(self.size, args)]
    }

    /// The two-element meet semilattice, `meet = min` on `{0, 1}`.
    pub fn semilattice2() -> FiniteAlgebra {
        FiniteAlgebra::new(
            "sl2",
            2,
            vec![Operation {
                name: "meet".into(),
                arity: 2,
                table: vec![0, 0, 0, 1],
            }],
        )
        .unwrap()
    }

    /// Idempotent affine ℤ₂: the single Mal'cev operation `x + y + z mod 2`.
    pub fn affine_z2() -> FiniteAlgebra {
        FiniteAlgebra::new(
            "z2aff",
            2,
            vec![Operation {
                name: "mal".into(),
                arity: 3,
                table: vec![0, 1, 1, 0, 1, 0, 0, 1],
            }],
        )
        .unwrap()
    }

    /// Meet of the three-element chain `0 < 1 < 2`.
    pub fn chain_meet3() -> FiniteAlgebra {
        FiniteAlgebra::new(
            "chain3meet",
            3,
            vec![Operation {
                name: "meet".into(),
                arity: 2,
                table: vec![0, 0, 0, 0, 1, 1, 0, 1, 2],
            }],
        )
        .unwrap()
    }

    /// Looks up a bundled algebra by name.
    pub fn bundled(name: &str) -> Option<FiniteAlgebra> {
        match name {
            "sl2" => Some(FiniteAlgebra::semilattice2()),
            "z2aff" => Some(FiniteAlgebra::affine_z2()),
            "chain3meet" => Some(FiniteAlgebra::chain_meet3()),
            _ => None,
        }
    }

    /// Serializes in the text format accepted by [`parse_algebra`].
    pub fn to_text(&self) -> String {
        let mut out = format!("algebra {}\nsize {}\n", self.name, self.size);
        for op in &self.ops {
            out.push_str(&format!("op {} {}\ntable", op.name, op.arity));
            for v in &op.table {
                out.push_str(&format!(" {v}"));
            }
            out.push('\n');
        }
        out.push_str("end\n");
        out
    }
}

/// Index of `args` in a table over `size`, first argument most significant.
pub(crate) fn tuple_index(size: usize, args: &[usize]) -> usize {
    args.iter().fold(0, |acc, &a| acc * size + a)
}

/// Writes the `idx`-th argument tuple into `out`.
pub(crate) fn decode_tuple(size: usize, mut idx: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        *slot = idx % size;
        idx /= size;
    }
}

/// An explicit finitary function on `{0..size}`, used for term operations
/// and polymorphisms. Equality is entrywise table equality.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermTable {
    size: usize,
    arity: usize,
    table: Vec<usize>,
}

impl TermTable {
    pub fn new(size: usize, arity: usize, table: Vec<usize>) -> Result<TermTable> {
        if size == 0 || arity == 0 {
            return Err(Error::Precondition("term tables need size ≥ 1 and arity ≥ 1".into()));
        }
        let expect = size.checked_pow(arity as u32).ok_or_else(|| {
            Error::Precondition("term table length overflows".into())
        })?;
        if table.len() != expect {
            return Err(Error::SizeMismatch(format!(
                "term table has {} entries, expected {}",
                table.len(),
                expect
            )));
        }
        if let Some(&v) = table.iter().find(|&&v| v >= size) {
            return Err(Error::VertexOutOfRange { vertex: v, n: size });
        }
        Ok(TermTable { size, arity, table })
    }

    /// The `coord`-th projection (0-based) of the given arity.
    pub fn projection(size: usize, arity: usize, coord: usize) -> TermTable {
        assert!(coord < arity);
        let len = size.pow(arity as u32);
        let mut table = vec![0; len];
        let mut args = vec![0; arity];
        for (idx, slot) in table.iter_mut().enumerate() {
            decode_tuple(size, idx, &mut args);
            *slot = args[coord];
        }
        TermTable { size, arity, table }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    /// Table lookup with arity checking.
    pub fn apply(&self, args: &[usize]) -> Result<usize> {
        if args.len() != self.arity {
            return Err(Error::ArityMismatch {
                expected: self.arity,
                got: args.len(),
            });
        }
        if let Some(&v) = args.iter().find(|&&v| v >= self.size) {
            return Err(Error::VertexOutOfRange { vertex: v, n: self.size });
        }
        Ok(self.table[tuple_index(self.size, args)])
    }

    /// Unchecked lookup for hot loops.
    pub(crate) fn get(&self, args: &[usize]) -> usize {
        self.table[tuple_index(self.size, args)]
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.size).all(|x| {
            let idx = (0..self.arity).fold(0, |acc, _| acc * self.size + x);
            self.table[idx] == x
        })
    }

    /// The unary table `x ↦ t(x, …, x)`.
    pub fn diagonal_unary(&self) -> TermTable {
        let table = (0..self.size)
            .map(|x| {
                let idx = (0..self.arity).fold(0, |acc, _| acc * self.size + x);
                self.table[idx]
            })
            .collect();
        TermTable {
            size: self.size,
            arity: 1,
            table,
        }
    }

    /// Serializes as a `term <arity> <size>` header plus the table line.
    pub fn to_text(&self) -> String {
        let mut out = format!("term {} {}\n", self.arity, self.size);
        for (i, v) in self.table.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(&v.to_string());
        }
        out.push('\n');
        out
    }
}

impl fmt::Debug for TermTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "term {}/{} {:?}", self.arity, self.size, self.table)
    }
}

impl fmt::Display for TermTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.to_text().trim_end())
    }
}

/// Parses the serialized term-table format: a `term <arity> <size>`
/// header line followed by `size^arity` whitespace-separated values
/// (line breaks allowed).
pub fn parse_term_table(text: &str) -> Result<TermTable> {
    let mut tokens = text
        .lines()
        .flat_map(|l| l.split('#').next().unwrap_or("").split_whitespace());
    let err = |msg: &str| Error::Parse {
        line: 1,
        msg: msg.to_string(),
    };
    if tokens.next() != Some("term") {
        return Err(err("expected `term <arity> <size>`"));
    }
    let arity: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad arity"))?;
    let size: usize = tokens
        .next()
        .and_then(|t| t.parse().ok())
        .ok_or_else(|| err("bad size"))?;
    let mut table = Vec::new();
    for tok in tokens {
        table.push(tok.parse().map_err(|_| err("non-numeric table entry"))?);
    }
    TermTable::new(size, arity, table)
}

/// Parses the algebra text format:
///
/// ```text
/// algebra <name>
/// size <s>
/// op <name> <arity>
/// table <s^arity values, lexicographic argument order>
/// end
/// ```
///
/// `#` starts a comment. Table values may continue on following lines.
pub fn parse_algebra(text: &str) -> Result<FiniteAlgebra> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, raw)| (i + 1, raw.split('#').next().unwrap_or("").trim()))
        .filter(|(_, body)| !body.is_empty())
        .peekable();
    let err = |line: usize, msg: &str| Error::Parse {
        line,
        msg: msg.to_string(),
    };

    let (line, header) = lines.next().ok_or_else(|| err(1, "empty input"))?;
    let name = header
        .strip_prefix("algebra")
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .ok_or_else(|| err(line, "expected `algebra <name>`"))?
        .to_string();

    let (line, sline) = lines.next().ok_or_else(|| err(line, "missing `size <s>`"))?;
    let size: usize = sline
        .strip_prefix("size")
        .map(str::trim)
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| err(line, "expected `size <s>`"))?;

    let mut ops = Vec::new();
    let mut ended = false;
    while let Some((line, body)) = lines.next() {
        if body == "end" {
            ended = true;
            break;
        }
        let rest = body
            .strip_prefix("op")
            .map(str::trim)
            .ok_or_else(|| err(line, "expected `op <name> <arity>` or `end`"))?;
        let mut it = rest.split_whitespace();
        let op_name = it.next().ok_or_else(|| err(line, "missing operation name"))?;
        let arity: usize = it
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| err(line, "missing or bad arity"))?;
        if it.next().is_some() {
            return Err(err(line, "unexpected tokens after arity"));
        }
        if arity == 0 {
            return Err(err(line, "nullary operations are not supported"));
        }
        let expect = size.checked_pow(arity as u32).ok_or_else(|| {
            err(line, "table size overflows")
        })?;

        let (tline, tbody) = lines
            .next()
            .ok_or_else(|| err(line, "missing `table ...`"))?;
        let first = tbody
            .strip_prefix("table")
            .ok_or_else(|| err(tline, "expected `table <values>`"))?;
        let mut table: Vec<usize> = Vec::with_capacity(expect);
        let push_tokens = |line: usize, s: &str, table: &mut Vec<usize>| -> Result<()> {
            for tok in s.split_whitespace() {
                let v: usize = tok
                    .parse()
                    .map_err(|_| err(line, &format!("non-numeric table entry `{tok}`")))?;
                if v >= size {
                    return Err(err(line, &format!("table entry {v} out of range (size {size})")));
                }
                table.push(v);
            }
            Ok(())
        };
        push_tokens(tline, first, &mut table)?;
        while table.len() < expect {
            match lines.peek() {
                Some(&(l, body)) if !body.starts_with("op") && body != "end" => {
                    push_tokens(l, body, &mut table)?;
                    lines.next();
                }
                _ => break,
            }
        }
        if table.len() != expect {
            return Err(err(
                tline,
                &format!("operation {op_name} has {} table entries, expected {expect}", table.len()),
            ));
        }
        ops.push(Operation {
            name: op_name.to_string(),
            arity,
            table,
        });
    }
    if !ended {
        return Err(err(text.lines().count(), "missing `end`"));
    }
    if let Some((line, _)) = lines.next() {
        return Err(err(line, "trailing content after `end`"));
    }
    FiniteAlgebra::new(name, size, ops)
}

/// The least superset of `seed` closed under all basic operations,
/// returned in ascending order.
pub fn subuniverse_closure(a: &FiniteAlgebra, seed: &[usize]) -> Result<Vec<usize>> {
    if seed.is_empty() {
        return Err(Error::Precondition("closure seed must be nonempty".into()));
    }
    if let Some(&v) = seed.iter().find(|&&v| v >= a.size()) {
        return Err(Error::VertexOutOfRange { vertex: v, n: a.size() });
    }
    let mut member = vec![false; a.size()];
    let mut elements: Vec<usize> = Vec::new();
    for &v in seed {
        if !member[v] {
            member[v] = true;
            elements.push(v);
        }
    }
    let mut args_buf = Vec::new();
    loop {
        let mut added = false;
        for (op_idx, op) in a.ops().iter().enumerate() {
            let count = elements.len();
            let mut idx = vec![0usize; op.arity];
            loop {
                args_buf.clear();
                args_buf.extend(idx.iter().map(|&i| elements[i]));
                let value = a.apply(op_idx, &args_buf);
                if !member[value] {
                    member[value] = true;
                    elements.push(value);
                    added = true;
                }
                if !advance(&mut idx, count) {
                    break;
                }
            }
        }
        if !added {
            break;
        }
    }
    elements.sort_unstable();
    Ok(elements)
}

/// Advances an odometer over `0..count` per digit; false on wrap-around.
fn advance(idx: &mut [usize], count: usize) -> bool {
    for slot in idx.iter_mut().rev() {
        *slot += 1;
        if *slot < count {
            return true;
        }
        *slot = 0;
    }
    false
}

/// True when the edge set of `g` is closed under every operation of `a`
/// acting coordinatewise on pairs, i.e. every basic operation is a
/// polymorphism of `g`.
pub fn is_compatible(g: &Digraph, a: &FiniteAlgebra) -> Result<bool> {
    if g.n() != a.size() {
        return Err(Error::SizeMismatch(format!(
            "digraph has {} vertices, algebra has size {}",
            g.n(),
            a.size()
        )));
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    if edges.is_empty() {
        return Ok(true);
    }
    for (op_idx, op) in a.ops().iter().enumerate() {
        let mut idx = vec![0usize; op.arity];
        let mut lefts = vec![0usize; op.arity];
        let mut rights = vec![0usize; op.arity];
        loop {
            for (j, &i) in idx.iter().enumerate() {
                lefts[j] = edges[i].0;
                rights[j] = edges[i].1;
            }
            let u = a.apply(op_idx, &lefts);
            let v = a.apply(op_idx, &rights);
            if !g.has_edge(u, v) {
                return Ok(false);
            }
            if !advance(&mut idx, edges.len()) {
                break;
            }
        }
    }
    Ok(true)
}

/// True when `p` is a congruence of `a`: every operation maps blockwise
/// related tuples to related results. Checked by single-coordinate
/// substitution, which suffices by transitivity.
pub fn is_congruence(a: &FiniteAlgebra, p: &Partition) -> Result<bool> {
    if p.n() != a.size() {
        return Err(Error::SizeMismatch(format!(
            "partition covers {} elements, algebra has size {}",
            p.n(),
            a.size()
        )));
    }
    let size = a.size();
    for op in a.ops() {
        let len = op.table.len();
        let mut args = vec![0usize; op.arity];
        for idx in 0..len {
            decode_tuple(size, idx, &mut args);
            let value = op.table[idx];
            // substitute one related element per coordinate
            let mut stride = len / size;
            for i in 0..op.arity {
                let base = idx - args[i] * stride;
                for y in 0..size {
                    if y != args[i] && p.same(args[i], y) {
                        let other = op.table[base + y * stride];
                        if !p.same(value, other) {
                            return Ok(false);
                        }
                    }
                }
                stride /= size;
            }
        }
    }
    Ok(true)
}

/// How a pair entered the edge closure: either as a seed edge or as an
/// operation applied to earlier pairs.
#[derive(Clone, Debug)]
pub(crate) enum Derivation {
    Seed(usize),
    Apply(usize, Vec<usize>),
}

/// Closure of a seed edge set inside the square of an algebra, with a
/// derivation recorded for every discovered pair.
pub(crate) struct PairClosure {
    /// Pairs in discovery order: seeds first, then round by round.
    pub pairs: Vec<(usize, usize)>,
    pub derivations: Vec<Derivation>,
}

pub(crate) fn close_pairs(a: &FiniteAlgebra, seeds: &[(usize, usize)]) -> PairClosure {
    let mut index: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    let mut derivations: Vec<Derivation> = Vec::new();
    for (i, &pair) in seeds.iter().enumerate() {
        if !index.contains_key(&pair) {
            index.insert(pair, pairs.len());
            pairs.push(pair);
            derivations.push(Derivation::Seed(i));
        }
    }
    let mut lefts = Vec::new();
    let mut rights = Vec::new();
    loop {
        let frozen = pairs.len();
        let mut discovered: Vec<((usize, usize), Derivation)> = Vec::new();
        let mut seen_now: BTreeSet<(usize, usize)> = BTreeSet::new();
        for (op_idx, op) in a.ops().iter().enumerate() {
            let mut idx = vec![0usize; op.arity];
            loop {
                lefts.clear();
                rights.clear();
                for &i in &idx {
                    lefts.push(pairs[i].0);
                    rights.push(pairs[i].1);
                }
                let pair = (a.apply(op_idx, &lefts), a.apply(op_idx, &rights));
                if !index.contains_key(&pair) && seen_now.insert(pair) {
                    discovered.push((pair, Derivation::Apply(op_idx, idx.clone())));
                }
                if !advance(&mut idx, frozen) {
                    break;
                }
            }
        }
        if discovered.is_empty() {
            break;
        }
        for (pair, deriv) in discovered {
            index.insert(pair, pairs.len());
            pairs.push(pair);
            derivations.push(deriv);
        }
    }
    PairClosure { pairs, derivations }
}

/// The digraph on the full universe of `a` whose edge set is the
/// subalgebra of `a²` generated by the seed's edges mapped through the
/// embedding (`seed` vertex `i` goes to universe element `embedding[i]`).
///
/// The embedding must generate `a`; otherwise the generated proper
/// subuniverse is reported in the error.
pub fn generated_digraph(a: &FiniteAlgebra, seed: &Digraph, embedding: &[usize]) -> Result<Digraph> {
    if embedding.len() != seed.n() {
        return Err(Error::SizeMismatch(format!(
            "embedding lists {} vertices, seed has {}",
            embedding.len(),
            seed.n()
        )));
    }
    let distinct: BTreeSet<usize> = embedding.iter().copied().collect();
    if distinct.len() != embedding.len() {
        return Err(Error::Precondition("embedding must be injective".into()));
    }
    let closure = subuniverse_closure(a, embedding)?;
    if closure.len() != a.size() {
        return Err(Error::NotGenerating {
            generators: embedding.to_vec(),
            closure,
        });
    }
    let seed_pairs: Vec<(usize, usize)> = seed
        .edges()
        .map(|(u, v)| (embedding[u], embedding[v]))
        .collect();
    let closed = close_pairs(a, &seed_pairs);
    Digraph::new(
        format!("gen({},{})", a.name(), seed.name()),
        a.size(),
        closed.pairs,
    )
}

/// A free algebra over the variety generated by a finite algebra,
/// realized concretely as the subalgebra of `a^(a^k)` generated by the
/// `k` projections.
#[derive(Clone, Debug)]
pub struct FreeAlgebraResult {
    /// The free algebra with elements re-indexed `0..m`.
    pub algebra: FiniteAlgebra,
    /// Indices of the free generators (the projections, always `0..k`).
    pub generators: Vec<usize>,
    /// For each element, its originating `k`-ary term table over the base
    /// algebra. Pairwise distinct and closed under the basic operations.
    pub element_tables: Vec<TermTable>,
}

/// Closure of the `k` projections under pointwise application of the
/// basic operations. Elements appear in breadth-first discovery order,
/// projections first, ties within a round broken by table order.
fn close_term_tables(a: &FiniteAlgebra, k: usize, cap: usize) -> Result<Vec<TermTable>> {
    if k == 0 {
        return Err(Error::Precondition("term arity must be at least 1".into()));
    }
    checked_pow(a.size(), k, cap as u64)?;
    let mut elements: Vec<TermTable> = (0..k)
        .map(|i| TermTable::projection(a.size(), k, i))
        .collect();
    elements.dedup(); // size 1 collapses all projections
    let mut index: HashMap<Vec<usize>, usize> = elements
        .iter()
        .enumerate()
        .map(|(i, t)| (t.table.clone(), i))
        .collect();
    loop {
        let frozen = elements.len();
        let mut fresh: BTreeSet<Vec<usize>> = BTreeSet::new();
        for (op_idx, op) in a.ops().iter().enumerate() {
            let mut idx = vec![0usize; op.arity];
            let mut args = vec![0usize; op.arity];
            loop {
                let table: Vec<usize> = (0..elements[0].table.len())
                    .map(|j| {
                        for (slot, &i) in args.iter_mut().zip(idx.iter()) {
                            *slot = elements[i].table[j];
                        }
                        a.apply(op_idx, &args)
                    })
                    .collect();
                if !index.contains_key(&table) {
                    fresh.insert(table);
                }
                if !advance(&mut idx, frozen) {
                    break;
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        for table in fresh {
            if elements.len() >= cap {
                return Err(Error::Budget {
                    spent: cap as u64,
                    found: elements.len(),
                });
            }
            index.insert(table.clone(), elements.len());
            elements.push(TermTable {
                size: a.size(),
                arity: k,
                table,
            });
        }
    }
    Ok(elements)
}

/// The free algebra on `k` generators in the variety generated by `a`.
pub fn free_algebra(a: &FiniteAlgebra, k: usize, budget: &Budget) -> Result<FreeAlgebraResult> {
    let element_tables = close_term_tables(a, k, budget.free_elements)?;
    let m = element_tables.len();
    let index: HashMap<&[usize], usize> = element_tables
        .iter()
        .enumerate()
        .map(|(i, t)| (t.table.as_slice(), i))
        .collect();
    let mut ops = Vec::with_capacity(a.ops().len());
    for (op_idx, op) in a.ops().iter().enumerate() {
        let len = checked_pow(m, op.arity, budget.term_tables as u64)?;
        let mut table = Vec::with_capacity(len);
        let mut idx = vec![0usize; op.arity];
        let mut args = vec![0usize; op.arity];
        let width = element_tables[0].table.len();
        loop {
            let image: Vec<usize> = (0..width)
                .map(|j| {
                    for (slot, &i) in args.iter_mut().zip(idx.iter()) {
                        *slot = element_tables[i].table[j];
                    }
                    a.apply(op_idx, &args)
                })
                .collect();
            table.push(index[image.as_slice()]);
            if !advance(&mut idx, m) {
                break;
            }
        }
        ops.push(Operation {
            name: op.name.clone(),
            arity: op.arity,
            table,
        });
    }
    let generators = if m == 1 { vec![0; k] } else { (0..k).collect() };
    Ok(FreeAlgebraResult {
        algebra: FiniteAlgebra::new(format!("free({},{})", a.name(), k), m, ops)?,
        generators,
        element_tables,
    })
}

/// A freely generated compatible digraph together with the free algebra
/// it lives on.
#[derive(Clone, Debug)]
pub struct FreelyGenerated {
    pub digraph: Digraph,
    /// Vertices of the free generators inside the digraph.
    pub generators: Vec<usize>,
    pub free: FreeAlgebraResult,
}

/// Builds the free algebra on `seed.n()` generators and closes the seed's
/// edges (mapped to the generators) inside its square.
pub fn freely_generated_digraph(
    a: &FiniteAlgebra,
    seed: &Digraph,
    budget: &Budget,
) -> Result<FreelyGenerated> {
    let free = free_algebra(a, seed.n(), budget)?;
    let seed_pairs: Vec<(usize, usize)> = seed
        .edges()
        .map(|(u, v)| (free.generators[u], free.generators[v]))
        .collect();
    let closed = close_pairs(&free.algebra, &seed_pairs);
    let digraph = Digraph::new(
        format!("free({},{})", a.name(), seed.name()),
        free.algebra.size(),
        closed.pairs,
    )?;
    Ok(FreelyGenerated {
        digraph,
        generators: free.generators.clone(),
        free,
    })
}

/// All `k`-ary term operations of `a` as tables, in canonical discovery
/// order, optionally filtered to the idempotent ones.
pub fn term_tables(
    a: &FiniteAlgebra,
    k: usize,
    idempotent_only: bool,
    budget: &Budget,
) -> Result<Vec<TermTable>> {
    let mut tables = close_term_tables(a, k, budget.term_tables)?;
    if idempotent_only {
        tables.retain(TermTable::is_idempotent);
    }
    Ok(tables)
}

/// Labels each weak component of a freely generated digraph by the unary
/// table obtained from any member's term table on the diagonal. All
/// members of a component must agree; a clash is a hard error.
pub fn weak_component_labels(
    fr: &FreeAlgebraResult,
    fg: &Digraph,
) -> Result<BTreeMap<usize, TermTable>> {
    if fg.n() != fr.element_tables.len() {
        return Err(Error::SizeMismatch(format!(
            "digraph has {} vertices, free algebra has {} elements",
            fg.n(),
            fr.element_tables.len()
        )));
    }
    let weak = equivalence(fg, EquivalenceKind::Weak);
    let mut labels: BTreeMap<usize, TermTable> = BTreeMap::new();
    for (element, table) in fr.element_tables.iter().enumerate() {
        let block = weak.block_of(element);
        let unary = table.diagonal_unary();
        match labels.get(&block) {
            None => {
                labels.insert(block, unary);
            }
            Some(existing) if *existing == unary => {}
            Some(existing) => {
                return Err(Error::Falsified(format!(
                    "weak component {block} carries two diagonal labels: {existing} and {unary}"
                )));
            }
        }
    }
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::gallery;

    #[test]
    fn parse_bundled_round_trip() {
        for name in ["sl2", "z2aff", "chain3meet"] {
            let a = FiniteAlgebra::bundled(name).unwrap();
            assert_eq!(parse_algebra(&a.to_text()).unwrap(), a);
        }
    }

    #[test]
    fn parse_examples() {
        let a = parse_algebra("algebra sl\nsize 2\nop meet 2\ntable 0 0 0 1\nend\n").unwrap();
        assert_eq!(a.size(), 2);
        assert_eq!(a.ops(), FiniteAlgebra::semilattice2().ops());

        let a = parse_algebra("algebra z\nsize 2\nop mal 3\ntable 0 1 1 0\ntable-continues-no\n");
        assert!(a.is_err());

        // multi-line table
        let a = parse_algebra("algebra z\nsize 2\nop mal 3\ntable 0 1 1 0\n1 0 0 1\nend\n").unwrap();
        assert_eq!(a.ops()[0].table, FiniteAlgebra::affine_z2().ops()[0].table);
    }

    #[test]
    fn parse_rejects_bad_tables() {
        assert!(parse_algebra("algebra a\nsize 2\nop f 0\ntable 0\nend\n").is_err());
        assert!(parse_algebra("algebra a\nsize 2\nop f 1\ntable 0 1 0\nend\n").is_err());
        assert!(parse_algebra("algebra a\nsize 2\nop f 1\ntable 0 7\nend\n").is_err());
        assert!(parse_algebra("algebra a\nsize 2\nend\n").is_err());
        assert!(parse_algebra("algebra a\nsize 2\nop f 1\ntable 0 1\n").is_err());
    }

    #[test]
    fn apply_examples() {
        let chain = FiniteAlgebra::chain_meet3();
        assert_eq!(chain.apply(0, &[1, 2]), 1);
        let z2 = FiniteAlgebra::affine_z2();
        assert_eq!(z2.apply(0, &[1, 1, 1]), 1);
        assert_eq!(z2.apply(0, &[0, 1, 1]), 0);

        let t = TermTable::new(3, 2, chain.ops()[0].table.clone()).unwrap();
        assert_eq!(t.apply(&[1, 2]).unwrap(), 1);
        assert!(t.apply(&[1]).is_err());
        assert!(t.apply(&[1, 9]).is_err());
    }

    #[test]
    fn term_table_round_trip() {
        let t = TermTable::projection(3, 2, 1);
        let parsed = parse_term_table(&t.to_text()).unwrap();
        assert_eq!(parsed, t);
        assert!(parse_term_table("term 2 3\n0 1").is_err());
    }

    #[test]
    fn closure_examples() {
        let chain = FiniteAlgebra::chain_meet3();
        assert_eq!(subuniverse_closure(&chain, &[2]).unwrap(), vec![2]);
        assert_eq!(subuniverse_closure(&chain, &[0, 1, 2]).unwrap(), vec![0, 1, 2]);
        assert_eq!(subuniverse_closure(&chain, &[1, 2]).unwrap(), vec![1, 2]);
        assert!(subuniverse_closure(&chain, &[]).is_err());
        assert!(subuniverse_closure(&chain, &[5]).is_err());
    }

    #[test]
    fn closure_operator_laws() {
        let algebras = [
            FiniteAlgebra::semilattice2(),
            FiniteAlgebra::affine_z2(),
            FiniteAlgebra::chain_meet3(),
        ];
        for a in &algebras {
            for seed_bits in 1..(1usize << a.size()) {
                let seed: Vec<usize> = (0..a.size()).filter(|&v| seed_bits >> v & 1 == 1).collect();
                let c1 = subuniverse_closure(a, &seed).unwrap();
                // extensive
                assert!(seed.iter().all(|v| c1.contains(v)));
                // idempotent
                assert_eq!(subuniverse_closure(a, &c1).unwrap(), c1);
                // monotone: add one element
                for extra in 0..a.size() {
                    let mut bigger = seed.clone();
                    bigger.push(extra);
                    let c2 = subuniverse_closure(a, &bigger).unwrap();
                    assert!(c1.iter().all(|v| c2.contains(v)));
                }
            }
        }
    }

    #[test]
    fn compatibility_examples() {
        let d = gallery("D").unwrap();
        let chain = FiniteAlgebra::chain_meet3();
        assert!(is_compatible(&d, &chain).unwrap());

        // C3 is not compatible with the chain meet: min of (1,2),(2,0) is (1,0)
        let c3 = gallery("C3").unwrap();
        assert!(!is_compatible(&c3, &chain).unwrap());

        // projections preserve everything
        let proj = FiniteAlgebra::new(
            "proj",
            3,
            vec![Operation {
                name: "p1".into(),
                arity: 2,
                table: TermTable::projection(3, 2, 0).table().to_vec(),
            }],
        )
        .unwrap();
        assert!(is_compatible(&c3, &proj).unwrap());
        assert!(is_compatible(&d, &proj).unwrap());

        assert!(is_compatible(&gallery("N").unwrap(), &chain).is_err());
    }

    #[test]
    fn congruence_examples() {
        let chain = FiniteAlgebra::chain_meet3();
        assert!(is_congruence(&chain, &Partition::discrete(3)).unwrap());
        assert!(is_congruence(&chain, &Partition::single(3)).unwrap());
        let p: Partition = "{{0,1},{2}}".parse().unwrap();
        assert!(is_congruence(&chain, &p).unwrap());
        // {{0,2},{1}} is not a congruence: meet(0,1)=0 but meet(2,1)=1
        let q: Partition = "{{0,2},{1}}".parse().unwrap();
        assert!(!is_congruence(&chain, &q).unwrap());
        assert!(is_congruence(&chain, &Partition::discrete(2)).is_err());
    }

    #[test]
    fn generated_digraph_examples() {
        let chain = FiniteAlgebra::chain_meet3();
        let d = gallery("D").unwrap();
        let g = generated_digraph(&chain, &d, &[0, 1, 2]).unwrap();
        assert!(g.is_reflexive());
        assert!(d.edges().all(|(u, v)| g.has_edge(u, v)));
        assert!(is_compatible(&g, &chain).unwrap());

        // an already-closed complete seed stays complete
        let full = Digraph::new(
            "full",
            3,
            (0..3).flat_map(|u| (0..3).map(move |v| (u, v))),
        )
        .unwrap();
        let g = generated_digraph(&chain, &full, &[0, 1, 2]).unwrap();
        assert_eq!(g.edge_count(), 9);

        // N over affine Z2: all four pairs are already closed
        let z2 = FiniteAlgebra::affine_z2();
        let n = gallery("N").unwrap();
        let g = generated_digraph(&z2, &n, &[0, 1]).unwrap();
        assert_eq!(g.edge_count(), 4);

        // non-generating embedding is rejected with the subuniverse named
        let single = gallery("C1").unwrap();
        match generated_digraph(&chain, &single, &[2]) {
            Err(Error::NotGenerating { closure, .. }) => assert_eq!(closure, vec![2]),
            other => panic!("expected NotGenerating, got {other:?}"),
        }
    }

    #[test]
    fn free_algebra_sizes() {
        let budget = Budget::default();
        let sl = FiniteAlgebra::semilattice2();
        let fr = free_algebra(&sl, 3, &budget).unwrap();
        assert_eq!(fr.algebra.size(), 7);
        assert_eq!(fr.generators, vec![0, 1, 2]);

        let z2 = FiniteAlgebra::affine_z2();
        let fr = free_algebra(&z2, 3, &budget).unwrap();
        assert_eq!(fr.algebra.size(), 4);

        // only the identity unary term over an idempotent algebra
        let fr = free_algebra(&sl, 1, &budget).unwrap();
        assert_eq!(fr.algebra.size(), 1);

        let tiny = Budget {
            free_elements: 3,
            ..Budget::default()
        };
        assert!(free_algebra(&sl, 3, &tiny).is_err());
    }

    #[test]
    fn free_algebra_element_tables_are_term_tables() {
        let budget = Budget::default();
        for a in [FiniteAlgebra::semilattice2(), FiniteAlgebra::affine_z2()] {
            let fr = free_algebra(&a, 3, &budget).unwrap();
            let terms = term_tables(&a, 3, false, &budget).unwrap();
            assert_eq!(fr.element_tables, terms);
        }
    }

    #[test]
    fn freely_generated_fig3() {
        let budget = Budget::default();
        let sl = FiniteAlgebra::semilattice2();
        let c3 = gallery("C3").unwrap();
        let fg = freely_generated_digraph(&sl, &c3, &budget).unwrap();
        assert_eq!(fg.digraph.n(), 7);
        assert_eq!(fg.generators, vec![0, 1, 2]);
        // matches the stored regression digraph exactly under the canonical
        // element order
        assert_eq!(fg.digraph, gallery("fig3").unwrap());
    }

    #[test]
    fn freely_generated_affine_d() {
        let budget = Budget::default();
        let z2 = FiniteAlgebra::affine_z2();
        let d = gallery("D").unwrap();
        let fg = freely_generated_digraph(&z2, &d, &budget).unwrap();
        assert_eq!(fg.digraph.n(), 4);
        // the closure fills the complete digraph on four vertices
        assert_eq!(fg.digraph.edge_count(), 16);
        assert!(equivalence(&fg.digraph, EquivalenceKind::Extreme).is_single());
    }

    #[test]
    fn freely_generated_single_loop() {
        let budget = Budget::default();
        for a in [FiniteAlgebra::semilattice2(), FiniteAlgebra::affine_z2()] {
            let fg = freely_generated_digraph(&a, &gallery("C1").unwrap(), &budget).unwrap();
            assert_eq!(fg.digraph.n(), 1);
            assert_eq!(fg.digraph.edge_count(), 1);
        }
    }

    #[test]
    fn term_table_counts() {
        let budget = Budget::default();
        let sl = FiniteAlgebra::semilattice2();
        let binary = term_tables(&sl, 2, false, &budget).unwrap();
        assert_eq!(binary.len(), 3);
        assert_eq!(binary[0], TermTable::projection(2, 2, 0));
        assert_eq!(binary[1], TermTable::projection(2, 2, 1));
        assert_eq!(binary[2].table(), &[0, 0, 0, 1]);

        assert_eq!(term_tables(&sl, 1, false, &budget).unwrap().len(), 1);
        assert_eq!(term_tables(&sl, 6, false, &budget).unwrap().len(), 63);

        let z2 = FiniteAlgebra::affine_z2();
        assert_eq!(term_tables(&z2, 6, true, &budget).unwrap().len(), 32);
    }

    #[test]
    fn weak_labels_are_single_identity_for_idempotent_algebras() {
        let budget = Budget::default();
        let sl = FiniteAlgebra::semilattice2();
        let fg = freely_generated_digraph(&sl, &gallery("C3").unwrap(), &budget).unwrap();
        let labels = weak_component_labels(&fg.free, &fg.digraph).unwrap();
        assert_eq!(labels.len(), 1);
        let id = TermTable::projection(2, 1, 0);
        assert_eq!(labels[&0], id);

        let z2 = FiniteAlgebra::affine_z2();
        let fg = freely_generated_digraph(&z2, &gallery("D").unwrap(), &budget).unwrap();
        let labels = weak_component_labels(&fg.free, &fg.digraph).unwrap();
        assert_eq!(labels.len(), 1);
        assert_eq!(labels[&0], TermTable::projection(2, 1, 0));
    }
}
