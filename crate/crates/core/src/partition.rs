//! Equivalence relations on `{0, …, n−1}` in canonical block form.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A partition of `{0, …, n−1}` into nonempty blocks.
///
/// The representation is canonical: block ids are assigned in order of
/// each block's least element, so two partitions are equal as values
/// exactly when they are equal as equivalence relations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    n: usize,
    block_of: Vec<usize>,
    block_count: usize,
}

impl Partition {
    /// Canonicalizes an arbitrary block-id assignment.
    pub fn from_assignment(raw: &[usize]) -> Partition {
        let n = raw.len();
        let mut relabel: Vec<Option<usize>> = vec![None; n.max(raw.iter().map(|r| r + 1).max().unwrap_or(0))];
        let mut block_of = vec![0; n];
        let mut next = 0;
        for (v, &r) in raw.iter().enumerate() {
            let id = *relabel[r].get_or_insert_with(|| {
                let id = next;
                next += 1;
                id
            });
            block_of[v] = id;
        }
        Partition {
            n,
            block_of,
            block_count: next,
        }
    }

    /// The partition into singletons.
    pub fn discrete(n: usize) -> Partition {
        Partition {
            n,
            block_of: (0..n).collect(),
            block_count: n,
        }
    }

    /// The partition with a single block.
    pub fn single(n: usize) -> Partition {
        Partition {
            n,
            block_of: vec![0; n],
            block_count: if n == 0 { 0 } else { 1 },
        }
    }

    /// Builds the finest partition in which every listed pair is related.
    pub fn from_pairs(n: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Partition {
        let mut uf = UnionFind::new(n);
        for (u, v) in pairs {
            uf.union(u, v);
        }
        uf.into_partition()
    }

    /// Builds a partition from explicit blocks, which must cover
    /// `{0, …, n−1}` exactly once.
    pub fn from_blocks(n: usize, blocks: &[Vec<usize>]) -> Result<Partition> {
        let mut block_of = vec![usize::MAX; n];
        for (id, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition("empty block".into()));
            }
            for &v in block {
                if v >= n {
                    return Err(Error::VertexOutOfRange { vertex: v, n });
                }
                if block_of[v] != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "element {v} appears in more than one block"
                    )));
                }
                block_of[v] = id;
            }
        }
        if let Some(v) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "element {v} is not covered by any block"
            )));
        }
        Ok(Partition::from_assignment(&block_of))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn block_count(&self) -> usize {
        self.block_count
    }

    pub fn block_of(&self, v: usize) -> usize {
        self.block_of[v]
    }

    pub fn same(&self, u: usize, v: usize) -> bool {
        self.block_of[u] == self.block_of[v]
    }

    pub fn is_discrete(&self) -> bool {
        self.block_count == self.n
    }

    pub fn is_single(&self) -> bool {
        self.block_count <= 1
    }

    /// Blocks in canonical order, elements ascending within each block.
    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut blocks = vec![Vec::new(); self.block_count];
        for v in 0..self.n {
            blocks[self.block_of[v]].push(v);
        }
        blocks
    }

    /// True when every block of `self` is contained in a block of `other`.
    pub fn refines(&self, other: &Partition) -> bool {
        assert_eq!(self.n, other.n, "partitions over different ground sets");
        // representative check: v and the least element of its block agree
        let mut least = vec![usize::MAX; self.block_count];
        for v in 0..self.n {
            let b = self.block_of[v];
            if least[b] == usize::MAX {
                least[b] = v;
            } else if other.block_of(v) != other.block_of(least[b]) {
                return false;
            }
        }
        true
    }

    /// Lifts a partition of the blocks of `self` back to the ground set.
    pub fn lift(&self, on_blocks: &Partition) -> Partition {
        assert_eq!(on_blocks.n(), self.block_count);
        let raw: Vec<usize> = (0..self.n)
            .map(|v| on_blocks.block_of(self.block_of[v]))
            .collect();
        Partition::from_assignment(&raw)
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, block) in self.blocks().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, v) in block.iter().enumerate() {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "}}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Partition {
    type Err = Error;

    /// Parses the block-list notation, e.g. `{{0,1},{2}}`.
    fn from_str(s: &str) -> Result<Partition> {
        let bad = |msg: &str| Error::InvalidPartition(format!("{msg} in `{s}`"));
        let body = s
            .trim()
            .strip_prefix("{{")
            .and_then(|t| t.strip_suffix("}}"))
            .ok_or_else(|| bad("expected {{...}} block list"))?;
        let mut blocks = Vec::new();
        let mut max = 0;
        for part in body.split("},{") {
            let mut block = Vec::new();
            for tok in part.split(',') {
                let tok = tok.trim();
                if tok.is_empty() {
                    return Err(bad("empty element"));
                }
                let v: usize = tok.parse().map_err(|_| bad("non-numeric element"))?;
                max = max.max(v + 1);
                block.push(v);
            }
            blocks.push(block);
        }
        Partition::from_blocks(max, &blocks)
    }
}

/// Union-find with path halving and union by size.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub fn union(&mut self, a: usize, b: usize) {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
    }

    pub fn into_partition(mut self) -> Partition {
        let n = self.parent.len();
        let raw: Vec<usize> = (0..n).map(|v| self.find(v)).collect();
        Partition::from_assignment(&raw)
    }
}
