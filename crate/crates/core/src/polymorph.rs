//! Backtracking polymorphism search, projection detection, the
//! major-subset analysis of idempotent polymorphisms of the digraph `D`,
//! and the six-ary bracket identity checks.

use std::collections::BTreeSet;
use std::fmt;

use crate::algebra::{term_tables, tuple_index, FiniteAlgebra, TermTable};
use crate::digraph::{checked_pow, Digraph};
use crate::error::{Error, Result};
use crate::search::{Enumeration, Problem};
use crate::Budget;

/// A polymorphism search: tables `f: G^arity → G` mapping componentwise
/// edges to edges, equivalently homomorphisms `power(g, arity) → g`.
#[derive(Clone, Debug)]
pub struct PolymorphismQuery {
    pub digraph: Digraph,
    pub arity: usize,
    /// Pre-assign the diagonal cells `f(v, …, v) = v`.
    pub idempotent: bool,
    /// Stop after this many solutions.
    pub limit: usize,
    /// Node-expansion budget for the backtracking search.
    pub budget: u64,
}

impl PolymorphismQuery {
    pub fn new(digraph: Digraph, arity: usize) -> PolymorphismQuery {
        PolymorphismQuery {
            digraph,
            arity,
            idempotent: false,
            limit: usize::MAX,
            budget: Budget::default().expansions,
        }
    }

    pub fn idempotent(mut self, flag: bool) -> Self {
        self.idempotent = flag;
        self
    }

    pub fn limit(mut self, limit: usize) -> Self {
        self.limit = limit;
        self
    }

    pub fn budget(mut self, budget: u64) -> Self {
        self.budget = budget;
        self
    }
}

/// Enumerates polymorphism tables in lexicographic order. Each cell
/// assignment forward-checks the edge constraints of `power(g, arity)`,
/// pruning the candidate values of affected cells.
///
/// The result reports whether enumeration was complete, hit the solution
/// limit, or exhausted the budget (with the solutions found so far).
pub fn find_polymorphisms(q: &PolymorphismQuery) -> Result<Enumeration<TermTable>> {
    let g = &q.digraph;
    let n = g.n();
    if n == 0 {
        return Err(Error::Precondition("polymorphism search needs a nonempty digraph".into()));
    }
    if q.arity == 0 {
        return Err(Error::Precondition("polymorphism arity must be at least 1".into()));
    }
    let cells = checked_pow(n, q.arity, q.budget)?;
    checked_pow(g.edge_count(), q.arity, q.budget)?;

    let edges: Vec<(usize, usize)> = g.edges().collect();
    let mut constraints = Vec::new();
    if !edges.is_empty() {
        let mut idx = vec![0usize; q.arity];
        loop {
            let mut a = 0;
            let mut b = 0;
            for &i in &idx {
                a = a * n + edges[i].0;
                b = b * n + edges[i].1;
            }
            constraints.push((a, b));
            let mut pos = idx.len();
            let mut wrapped = true;
            while pos > 0 {
                pos -= 1;
                idx[pos] += 1;
                if idx[pos] < edges.len() {
                    wrapped = false;
                    break;
                }
                idx[pos] = 0;
            }
            if wrapped {
                break;
            }
        }
    }

    let mut fixed = vec![None; cells];
    if q.idempotent {
        for v in 0..n {
            let diag = vec![v; q.arity];
            fixed[tuple_index(n, &diag)] = Some(v);
        }
    }

    let (succ, pred) = g.succ_pred_masks();
    let problem = Problem {
        var_count: cells,
        target_n: n,
        succ,
        pred,
        constraints,
        fixed,
        injective: false,
    };
    let outcome = problem.solve(q.limit, q.budget);
    Ok(outcome.map(|table| {
        TermTable::new(n, q.arity, table).expect("search assigns in-range values")
    }))
}

/// `Some(i)` (1-based) when the table is the `i`-th projection.
pub fn is_projection(t: &TermTable) -> Option<usize> {
    (0..t.arity())
        .find(|&coord| *t == TermTable::projection(t.size(), t.arity(), coord))
        .map(|coord| coord + 1)
}

/// The family of major subsets of an idempotent operation on the
/// three-element universe of `D`: index sets `I` for which some argument
/// tuple whose value-2 positions are exactly `I` evaluates to 2.
///
/// Subsets are stored as bitmasks with bit `i − 1` for index `i`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajorFamily {
    pub arity: usize,
    pub subsets: BTreeSet<u32>,
    /// Intersection of all members when the family is a filter.
    pub least: Option<u32>,
}

impl MajorFamily {
    /// Members as sorted 1-based index lists.
    pub fn members(&self) -> Vec<Vec<usize>> {
        self.subsets.iter().map(|&m| mask_to_indices(m)).collect()
    }

    pub fn least_members(&self) -> Option<Vec<usize>> {
        self.least.map(mask_to_indices)
    }
}

fn mask_to_indices(mask: u32) -> Vec<usize> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

impl fmt::Display for MajorFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, m) in self.members().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{{")?;
            for (j, v) in m.iter().enumerate() {
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

/// Scans all `3^arity` argument tuples of an idempotent table over the
/// universe of `D` and collects its major subsets. Capped at arity 12.
pub fn major_subsets(t: &TermTable) -> Result<MajorFamily> {
    if t.size() != 3 {
        return Err(Error::Precondition(
            "major subsets are defined over the three-element universe of D".into(),
        ));
    }
    if !t.is_idempotent() {
        return Err(Error::Precondition("major subsets require an idempotent table".into()));
    }
    if t.arity() > 12 {
        return Err(Error::Precondition("major-subset scan is capped at arity 12".into()));
    }
    let mut subsets = BTreeSet::new();
    let mut args = vec![0usize; t.arity()];
    for (idx, &value) in t.table().iter().enumerate() {
        if value == 2 {
            crate::algebra::decode_tuple(3, idx, &mut args);
            let mask = args
                .iter()
                .enumerate()
                .fold(0u32, |m, (i, &a)| if a == 2 { m | 1 << i } else { m });
            subsets.insert(mask);
        }
    }
    let mut family = MajorFamily {
        arity: t.arity(),
        subsets,
        least: None,
    };
    if filter_check(&family) {
        family.least = family.subsets.iter().copied().reduce(|a, b| a & b);
    }
    Ok(family)
}

/// True when the family is nonempty, upward closed in the subset lattice
/// of `{1..arity}`, and closed under pairwise intersection.
pub fn filter_check(m: &MajorFamily) -> bool {
    if m.subsets.is_empty() {
        return false;
    }
    let full: u32 = if m.arity >= 32 { u32::MAX } else { (1 << m.arity) - 1 };
    for &s in &m.subsets {
        // one-element extensions suffice for upward closure
        let mut missing = full & !s;
        while missing != 0 {
            let bit = missing & missing.wrapping_neg();
            if !m.subsets.contains(&(s | bit)) {
                return false;
            }
            missing ^= bit;
        }
        for &other in &m.subsets {
            if !m.subsets.contains(&(s & other)) {
                return false;
            }
        }
    }
    true
}

/// Verifies that `t` restricted to arguments from `{0, 2}` is the meet
/// over the least major subset: the value is 2 exactly when every least
/// coordinate is 2, and 0 otherwise.
pub fn meet_restriction_check(t: &TermTable, m: &MajorFamily) -> Result<bool> {
    if m.arity != t.arity() || t.size() != 3 {
        return Err(Error::Precondition("family does not match the table".into()));
    }
    let least = m.least.ok_or_else(|| {
        Error::Precondition("meet restriction needs a filter with a least member".into())
    })?;
    let mut args = vec![0usize; t.arity()];
    for choice in 0u32..1 << t.arity() {
        for (i, slot) in args.iter_mut().enumerate() {
            *slot = if choice >> i & 1 == 1 { 2 } else { 0 };
        }
        let expect = if least & !choice == 0 { 2 } else { 0 };
        if t.get(&args) != expect {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the six-ary bracket identities
/// `t(x,x,x,y,y,y) = t(x,y,y,x,x,y) = t(y,x,y,x,y,x)` together with
/// idempotency, over every pair `(x, y)`.
pub fn olsak_check(t: &TermTable) -> Result<bool> {
    if t.arity() != 6 {
        return Err(Error::ArityMismatch {
            expected: 6,
            got: t.arity(),
        });
    }
    if !t.is_idempotent() {
        return Ok(false);
    }
    let s = t.size();
    for x in 0..s {
        for y in 0..s {
            let a = t.get(&[x, x, x, y, y, y]);
            let b = t.get(&[x, y, y, x, x, y]);
            let c = t.get(&[y, x, y, x, y, x]);
            if a != b || b != c {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// First table in the canonical idempotent 6-ary term closure of `a`
/// passing [`olsak_check`], if any.
pub fn olsak_search(a: &FiniteAlgebra, budget: &Budget) -> Result<Option<TermTable>> {
    let tables = term_tables(a, 6, true, budget)?;
    for t in tables {
        if olsak_check(&t)? {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::digraph::gallery;

    /// Independent brute force over all tables: odometer plus a direct
    /// check against every tuple of edges.
    fn brute_polymorphisms(g: &Digraph, arity: usize, idempotent: bool) -> Vec<Vec<usize>> {
        let n = g.n();
        let cells = n.pow(arity as u32);
        let edges: Vec<(usize, usize)> = g.edges().collect();
        let mut out = Vec::new();
        let mut table = vec![0usize; cells];
        'outer: loop {
            let tt = TermTable::new(n, arity, table.clone()).unwrap();
            let ok = (!idempotent || tt.is_idempotent()) && {
                let mut idx = vec![0usize; arity];
                let mut good = true;
                'edges: loop {
                    let mut lefts = Vec::with_capacity(arity);
                    let mut rights = Vec::with_capacity(arity);
                    for &i in &idx {
                        lefts.push(edges[i].0);
                        rights.push(edges[i].1);
                    }
                    if !g.has_edge(tt.get(&lefts), tt.get(&rights)) {
                        good = false;
                        break 'edges;
                    }
                    let mut pos = arity;
                    loop {
                        if pos == 0 {
                            break 'edges;
                        }
                        pos -= 1;
                        idx[pos] += 1;
                        if idx[pos] < edges.len() {
                            break;
                        }
                        idx[pos] = 0;
                    }
                }
                good
            };
            if ok {
                out.push(table.clone());
            }
            let mut pos = cells;
            loop {
                if pos == 0 {
                    break 'outer;
                }
                pos -= 1;
                table[pos] += 1;
                if table[pos] < n {
                    break;
                }
                table[pos] = 0;
            }
        }
        out
    }

    #[test]
    fn k_idempotent_polymorphisms_are_projections() {
        let k = gallery("K").unwrap();
        for arity in [1usize, 2] {
            let found =
                find_polymorphisms(&PolymorphismQuery::new(k.clone(), arity).idempotent(true))
                    .unwrap();
            assert!(found.is_complete());
            assert_eq!(found.items.len(), arity);
            for (i, t) in found.items.iter().enumerate() {
                assert_eq!(is_projection(t), Some(i + 1));
            }
        }
    }

    #[test]
    fn d_binary_idempotent_polymorphisms() {
        let d = gallery("D").unwrap();
        let found = find_polymorphisms(&PolymorphismQuery::new(d.clone(), 2).idempotent(true))
            .unwrap();
        assert!(found.is_complete());
        let tables: Vec<Vec<usize>> = found.items.iter().map(|t| t.table().to_vec()).collect();
        assert_eq!(tables, brute_polymorphisms(&d, 2, true));
        assert_eq!(tables.len(), 6);
        // lexicographically first solution is the chain meet
        assert_eq!(tables[0], vec![0, 0, 0, 0, 1, 1, 0, 1, 2]);
        assert!(found.items.iter().any(|t| is_projection(t) == Some(1)));
        assert!(found.items.iter().any(|t| is_projection(t) == Some(2)));
    }

    #[test]
    fn search_matches_brute_force_without_idempotency() {
        let n = gallery("N").unwrap();
        let found = find_polymorphisms(&PolymorphismQuery::new(n.clone(), 2)).unwrap();
        let tables: Vec<Vec<usize>> = found.items.iter().map(|t| t.table().to_vec()).collect();
        assert_eq!(tables, brute_polymorphisms(&n, 2, false));

        let c3 = gallery("C3").unwrap();
        let found = find_polymorphisms(&PolymorphismQuery::new(c3.clone(), 1)).unwrap();
        let tables: Vec<Vec<usize>> = found.items.iter().map(|t| t.table().to_vec()).collect();
        assert_eq!(tables, brute_polymorphisms(&c3, 1, false));
    }

    #[test]
    fn single_loop_has_one_polymorphism_per_arity() {
        let single = gallery("C1").unwrap();
        for arity in 1..=4 {
            let found =
                find_polymorphisms(&PolymorphismQuery::new(single.clone(), arity)).unwrap();
            assert_eq!(found.items.len(), 1);
        }
    }

    #[test]
    fn limit_and_budget_are_reported() {
        let d = gallery("D").unwrap();
        let found = find_polymorphisms(
            &PolymorphismQuery::new(d.clone(), 2).idempotent(true).limit(2),
        )
        .unwrap();
        assert_eq!(found.stop, crate::search::StopReason::LimitReached);
        assert_eq!(found.items.len(), 2);

        // budget 49 passes the size guards (9 cells, 49 constraints) but
        // cannot finish the unrestricted search
        let found = find_polymorphisms(&PolymorphismQuery::new(d, 2).budget(49)).unwrap();
        assert_eq!(found.stop, crate::search::StopReason::BudgetExhausted);
    }

    #[test]
    fn projection_detection() {
        assert_eq!(is_projection(&TermTable::projection(2, 2, 1)), Some(2));
        assert_eq!(is_projection(&TermTable::projection(3, 1, 0)), Some(1));
        let meet = TermTable::new(3, 2, vec![0, 0, 0, 0, 1, 1, 0, 1, 2]).unwrap();
        assert_eq!(is_projection(&meet), None);
    }

    #[test]
    fn major_subsets_of_chain_meet() {
        let meet = TermTable::new(3, 2, vec![0, 0, 0, 0, 1, 1, 0, 1, 2]).unwrap();
        let fam = major_subsets(&meet).unwrap();
        assert_eq!(fam.members(), vec![vec![1, 2]]);
        assert!(filter_check(&fam));
        assert_eq!(fam.least_members(), Some(vec![1, 2]));
        assert!(meet_restriction_check(&meet, &fam).unwrap());
    }

    #[test]
    fn major_subsets_of_projection() {
        let p1 = TermTable::projection(3, 3, 0);
        let fam = major_subsets(&p1).unwrap();
        assert_eq!(
            fam.members(),
            vec![vec![1], vec![1, 2], vec![1, 3], vec![1, 2, 3]]
        );
        assert_eq!(fam.least_members(), Some(vec![1]));
        assert!(meet_restriction_check(&p1, &fam).unwrap());
        // the full index set is always a member, by idempotency
        assert!(fam.subsets.contains(&0b111));
    }

    #[test]
    fn major_subsets_preconditions() {
        assert!(major_subsets(&TermTable::projection(2, 2, 0)).is_err());
        let not_idem = TermTable::new(3, 1, vec![0, 0, 0]).unwrap();
        assert!(major_subsets(&not_idem).is_err());
    }

    #[test]
    fn filter_check_examples() {
        let fam = |arity, lists: &[&[usize]]| MajorFamily {
            arity,
            subsets: lists
                .iter()
                .map(|l| l.iter().fold(0u32, |m, &i| m | 1 << (i - 1)))
                .collect(),
            least: None,
        };
        assert!(filter_check(&fam(2, &[&[1, 2]])));
        assert!(!filter_check(&fam(2, &[&[1], &[2], &[1, 2]]))); // {1}∩{2}=∅ missing
        assert!(filter_check(&fam(3, &[&[2], &[1, 2], &[2, 3], &[1, 2, 3]])));
        assert!(!filter_check(&fam(2, &[&[1]]))); // {1,2} missing above {1}
        assert!(!filter_check(&fam(2, &[])));
    }

    #[test]
    fn every_enumerated_d_polymorphism_passes_the_meet_analysis() {
        let d = gallery("D").unwrap();
        for arity in [1usize, 2] {
            let found =
                find_polymorphisms(&PolymorphismQuery::new(d.clone(), arity).idempotent(true))
                    .unwrap();
            assert!(found.is_complete());
            for t in &found.items {
                let fam = major_subsets(t).unwrap();
                assert!(filter_check(&fam), "filter fails for {t}");
                assert!(meet_restriction_check(t, &fam).unwrap(), "meet fails for {t}");
            }
        }
    }

    #[test]
    fn olsak_check_examples() {
        // x1 + x2 + x3 over Z2
        let table: Vec<usize> = (0..64)
            .map(|idx| (idx >> 5 ^ idx >> 4 ^ idx >> 3) & 1)
            .collect();
        let parity3 = TermTable::new(2, 6, table).unwrap();
        assert!(olsak_check(&parity3).unwrap());

        for coord in 0..6 {
            let p = TermTable::projection(2, 6, coord);
            assert!(!olsak_check(&p).unwrap(), "projection {coord} should fail");
        }

        let trivial = TermTable::new(1, 6, vec![0]).unwrap();
        assert!(olsak_check(&trivial).unwrap());

        assert!(olsak_check(&TermTable::projection(2, 3, 0)).is_err());
    }

    #[test]
    fn olsak_search_affine() {
        let budget = Budget::default();
        let found = olsak_search(&FiniteAlgebra::affine_z2(), &budget).unwrap();
        let t = found.expect("affine Z2 has a 6-ary bracket term");
        assert!(olsak_check(&t).unwrap());
    }

    #[test]
    fn olsak_search_semilattice_finds_wide_meets() {
        // Meets whose support hits both variable groups of all three
        // patterns satisfy the identities (each pattern evaluates to
        // x ∧ y), so the search over the 63 semilattice terms succeeds.
        let budget = Budget::default();
        let found = olsak_search(&FiniteAlgebra::semilattice2(), &budget).unwrap();
        let t = found.expect("wide meets pass the bracket identities");
        assert!(olsak_check(&t).unwrap());
        assert!(is_projection(&t).is_none());
    }

    #[test]
    fn olsak_search_trivial_algebra() {
        let one = FiniteAlgebra::new(
            "one",
            1,
            vec![crate::algebra::Operation {
                name: "f".into(),
                arity: 2,
                table: vec![0],
            }],
        )
        .unwrap();
        let found = olsak_search(&one, &Budget::default()).unwrap();
        assert!(found.is_some());
    }
}
