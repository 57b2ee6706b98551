//! The one-shot verification suite behind the `paper-check` command: a
//! fixed list of named checks over the bundled digraphs and algebras,
//! exhaustive small-digraph sweeps, and seeded random samples. Each check
//! reports one PASS/FAIL line.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{
    free_algebra, generated_digraph, is_compatible, is_congruence, term_tables, FiniteAlgebra,
    TermTable,
};
use crate::conditions::{
    check_identity_system, rho_digraph, search_identity_witness, Endpoint, IdentityWitness,
};
use crate::connectivity::{
    equivalence, find_path, h_equivalence, hm_bound, radical, smallest_antisymmetric_oracle,
    verify_chain, EquivalenceKind, PathMode,
};
use crate::digraph::{find_isomorphism, gallery, quotient, Digraph};
use crate::error::Result;
use crate::polymorph::{
    filter_check, find_polymorphisms, is_projection, major_subsets, meet_restriction_check,
    olsak_check, olsak_search, PolymorphismQuery,
};
use crate::search::StopReason;
use crate::Budget;

/// Outcome of one suite item.
#[derive(Clone, Debug)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

impl CheckResult {
    /// The printed report line.
    pub fn line(&self) -> String {
        format!(
            "{} {} ({})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.detail
        )
    }
}

fn run(name: &'static str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    match f() {
        Ok((pass, detail)) => CheckResult { name, pass, detail },
        Err(e) => CheckResult {
            name,
            pass: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Names of all suite items, in execution order.
pub const CHECK_NAMES: [&str; 16] = [
    "gallery-equivalences",
    "chain-inclusions",
    "radical-minimality",
    "n-equivalence",
    "k-projections",
    "d-major-filter",
    "chain-meet-polymorphism",
    "free-semilattice-c3",
    "affine-identity-witness",
    "free-affine-d",
    "olsak-terms",
    "hm-collapse",
    "rho-compatibility",
    "connectivity-congruences",
    "template-equivalences",
    "negative-control",
];

/// Runs every suite item whose name contains `filter` (all when absent).
pub fn run_suite(filter: Option<&str>, budget: &Budget) -> Vec<CheckResult> {
    let selected = |name: &str| filter.is_none_or(|f| name.contains(f));
    let mut results = Vec::new();
    let mut samples: Option<Vec<(Digraph, FiniteAlgebra)>> = None;
    for name in CHECK_NAMES {
        if !selected(name) {
            continue;
        }
        let result = match name {
            "gallery-equivalences" => gallery_equivalences(),
            "chain-inclusions" => chain_inclusions(),
            "radical-minimality" => radical_minimality(budget),
            "n-equivalence" => n_equivalence(budget),
            "k-projections" => k_projections(),
            "d-major-filter" => d_major_filter(budget),
            "chain-meet-polymorphism" => chain_meet_polymorphism(budget),
            "free-semilattice-c3" => free_semilattice_c3(budget),
            "affine-identity-witness" => affine_identity_witness(budget),
            "free-affine-d" => free_affine_d(budget),
            "olsak-terms" => olsak_terms(budget),
            "hm-collapse" | "rho-compatibility" | "connectivity-congruences"
            | "template-equivalences" => {
                if samples.is_none() {
                    samples = Some(match affine_samples(50, budget) {
                        Ok(s) => s,
                        Err(e) => {
                            results.push(CheckResult {
                                name: "sample-generation",
                                pass: false,
                                detail: format!("error: {e}"),
                            });
                            return results;
                        }
                    });
                }
                let s = samples.as_ref().unwrap();
                match name {
                    "hm-collapse" => hm_collapse(s),
                    "rho-compatibility" => rho_compatibility(s),
                    "connectivity-congruences" => connectivity_congruences(s),
                    _ => template_equivalences(s, budget),
                }
            }
            "negative-control" => negative_control(budget),
            _ => unreachable!(),
        };
        results.push(result);
    }
    results
}

/// The reflexive digraph on four vertices selected by the 12 bits of
/// `bits`, one per ordered non-loop pair in lexicographic order.
fn reflexive4(bits: u16) -> Digraph {
    let mut edges: Vec<(usize, usize)> = (0..4).map(|v| (v, v)).collect();
    let mut j = 0;
    for u in 0..4 {
        for v in 0..4 {
            if u != v {
                if bits >> j & 1 == 1 {
                    edges.push((u, v));
                }
                j += 1;
            }
        }
    }
    Digraph::new(format!("r4-{bits}"), 4, edges).unwrap()
}

fn random_reflexive(rng: &mut ChaCha8Rng, n: usize) -> Digraph {
    let density: f64 = rng.random_range(0.15..0.85);
    let mut edges: Vec<(usize, usize)> = (0..n).map(|v| (v, v)).collect();
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.random_bool(density) {
                edges.push((u, v));
            }
        }
    }
    Digraph::new(format!("rnd{n}"), n, edges).unwrap()
}

/// Compatible reflexive digraphs over the idempotent affine ℤ₂ variety:
/// each is generated inside the free algebra on 3 or 4 generators from a
/// random reflexive seed on the generators. Deterministically seeded.
pub fn affine_samples(count: usize, budget: &Budget) -> Result<Vec<(Digraph, FiniteAlgebra)>> {
    let z2 = FiniteAlgebra::affine_z2();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0012);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let gens = if rng.random_bool(0.5) { 3 } else { 4 };
        let seed = random_reflexive(&mut rng, gens);
        let free = free_algebra(&z2, gens, budget)?;
        let g = generated_digraph(&free.algebra, &seed, &free.generators)?;
        out.push((g, free.algebra));
    }
    Ok(out)
}

pub fn gallery_equivalences() -> CheckResult {
    run("gallery-equivalences", || {
        let d = gallery("D")?;
        let k = gallery("K")?;
        let checks = [
            equivalence(&d, EquivalenceKind::Extreme).to_string() == "{{0,1},{2}}",
            equivalence(&d, EquivalenceKind::Strong).is_single(),
            radical(&d).result.is_single(),
            equivalence(&k, EquivalenceKind::Extreme).to_string() == "{{0,1},{2,3}}",
            radical(&k).result.is_single(),
        ];
        Ok((
            checks.iter().all(|&c| c),
            format!("{}/5 equalities hold", checks.iter().filter(|&&c| c).count()),
        ))
    })
}

pub fn chain_inclusions() -> CheckResult {
    run("chain-inclusions", || {
        let mut violations = 0usize;
        for bits in 0..(1u16 << 12) {
            let g = reflexive4(bits);
            let rep = verify_chain(&g);
            let anti = quotient(&g, &rep.radical)?.is_antisymmetric();
            if !(rep.all_hold() && anti) {
                violations += 1;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_0002);
        for _ in 0..1000 {
            let n = rng.random_range(1..=8);
            let g = random_reflexive(&mut rng, n);
            let rep = verify_chain(&g);
            let anti = quotient(&g, &rep.radical)?.is_antisymmetric();
            if !(rep.all_hold() && anti) {
                violations += 1;
            }
        }
        Ok((
            violations == 0,
            format!("4096 exhaustive + 1000 random digraphs, {violations} violations"),
        ))
    })
}

pub fn radical_minimality(budget: &Budget) -> CheckResult {
    run("radical-minimality", || {
        let mut mismatches = 0usize;
        for bits in 0..(1u16 << 12) {
            let g = reflexive4(bits);
            if radical(&g).result != smallest_antisymmetric_oracle(&g, budget)? {
                mismatches += 1;
            }
        }
        Ok((
            mismatches == 0,
            format!("4096 reflexive 4-vertex digraphs, {mismatches} mismatches"),
        ))
    })
}

pub fn n_equivalence(budget: &Budget) -> CheckResult {
    run("n-equivalence", || {
        let n = gallery("N")?;
        let mut mismatches = 0usize;
        for bits in 0..(1u16 << 12) {
            let g = reflexive4(bits);
            if h_equivalence(&g, &n, budget)? != equivalence(&g, EquivalenceKind::Extreme) {
                mismatches += 1;
            }
        }
        Ok((
            mismatches == 0,
            format!("4096 reflexive 4-vertex digraphs, {mismatches} mismatches"),
        ))
    })
}

pub fn k_projections() -> CheckResult {
    run("k-projections", || {
        let k = gallery("K")?;
        for arity in 1..=2usize {
            let found = find_polymorphisms(
                &PolymorphismQuery::new(k.clone(), arity)
                    .idempotent(true)
                    .budget(100_000_000),
            )?;
            if !found.is_complete()
                || found.items.len() != arity
                || !found
                    .items
                    .iter()
                    .enumerate()
                    .all(|(i, t)| is_projection(t) == Some(i + 1))
            {
                return Ok((false, format!("arity {arity} enumeration is wrong")));
            }
        }
        let found = find_polymorphisms(
            &PolymorphismQuery::new(k.clone(), 3)
                .idempotent(true)
                .budget(100_000_000),
        )?;
        if found.stop == StopReason::BudgetExhausted {
            return Ok((
                true,
                format!(
                    "arities 1-2 exact; arity 3 budget-limited after {} expansions",
                    found.expansions
                ),
            ));
        }
        let ok = found.items.len() == 3
            && found
                .items
                .iter()
                .enumerate()
                .all(|(i, t)| is_projection(t) == Some(i + 1));
        Ok((
            ok,
            format!(
                "arities 1,2,3 yield 1,2,{} solutions, all projections: {ok} ({} expansions at arity 3)",
                found.items.len(),
                found.expansions
            ),
        ))
    })
}

pub fn d_major_filter(budget: &Budget) -> CheckResult {
    run("d-major-filter", || {
        let d = gallery("D")?;
        let mut checked = 0usize;
        for arity in 1..=2usize {
            let found = find_polymorphisms(
                &PolymorphismQuery::new(d.clone(), arity)
                    .idempotent(true)
                    .budget(budget.expansions),
            )?;
            if !found.is_complete() {
                return Ok((false, format!("arity {arity} enumeration incomplete")));
            }
            for t in &found.items {
                let fam = major_subsets(t)?;
                if !filter_check(&fam) || !meet_restriction_check(t, &fam)? {
                    return Ok((false, format!("failure at arity {arity}: {t}")));
                }
                checked += 1;
            }
        }
        let sampled = find_polymorphisms(
            &PolymorphismQuery::new(d.clone(), 3)
                .idempotent(true)
                .limit(150)
                .budget(budget.expansions),
        )?;
        if sampled.items.len() < 100 {
            return Ok((
                false,
                format!("only {} arity-3 solutions sampled", sampled.items.len()),
            ));
        }
        for t in &sampled.items {
            let fam = major_subsets(t)?;
            if !filter_check(&fam) || !meet_restriction_check(t, &fam)? {
                return Ok((false, format!("failure at arity 3: {t}")));
            }
            checked += 1;
        }
        Ok((
            true,
            format!("{checked} idempotent polymorphisms pass filter and meet checks"),
        ))
    })
}

pub fn chain_meet_polymorphism(budget: &Budget) -> CheckResult {
    run("chain-meet-polymorphism", || {
        let d = gallery("D")?;
        let chain = FiniteAlgebra::chain_meet3();
        let compatible = is_compatible(&d, &chain)?;
        let meet = TermTable::new(3, 2, chain.ops()[0].table.clone())?;
        let found = find_polymorphisms(
            &PolymorphismQuery::new(d, 2)
                .idempotent(true)
                .budget(budget.expansions),
        )?;
        let listed = found.items.contains(&meet);
        Ok((
            compatible && listed,
            format!("compatible: {compatible}, enumerated: {listed}"),
        ))
    })
}

pub fn free_semilattice_c3(budget: &Budget) -> CheckResult {
    run("free-semilattice-c3", || {
        let sl = FiniteAlgebra::semilattice2();
        let c3 = gallery("C3")?;
        let fg = crate::algebra::freely_generated_digraph(&sl, &c3, budget)?;
        let seven = fg.digraph.n() == 7;
        let weakly = equivalence(&fg.digraph, EquivalenceKind::Weak).is_single();
        let iso = find_isomorphism(&fg.digraph, &gallery("fig3")?, budget)?.is_some();
        let no_sym_path = find_path(
            &fg.digraph,
            fg.generators[0],
            fg.generators[2],
            PathMode::Symmetric,
        )?
        .is_none();
        let no_witness = search_identity_witness(&sl, Endpoint::Z, 10, budget)?.is_none();
        Ok((
            seven && weakly && iso && no_sym_path && no_witness,
            format!(
                "7 vertices: {seven}, weakly connected: {weakly}, isomorphic to stored: {iso}, \
                 no symmetric x-z path: {no_sym_path}, endpoint-z search empty: {no_witness}"
            ),
        ))
    })
}

pub fn affine_identity_witness(budget: &Budget) -> CheckResult {
    run("affine-identity-witness", || {
        let z2 = FiniteAlgebra::affine_z2();
        let found = search_identity_witness(&z2, Endpoint::Y, 16, budget)?;
        let (n_one, validated) = match &found {
            Some(w) => (w.chain_length == 1, check_identity_system(&z2, w)?),
            None => (false, false),
        };
        // the explicit pair t1 = second projection, s1 = x4 + x5 + x6
        let parity456: Vec<usize> = (0..64).map(|i| (i >> 2 ^ i >> 1 ^ i) & 1).collect();
        let explicit = IdentityWitness {
            chain_length: 1,
            t_terms: vec![TermTable::projection(2, 6, 1)],
            s_terms: vec![TermTable::new(2, 6, parity456)?],
            path: vec![0, 1],
            endpoint: Endpoint::Y,
        };
        let explicit_ok = check_identity_system(&z2, &explicit)?;
        Ok((
            n_one && validated && explicit_ok,
            format!(
                "search finds n=1: {n_one}, validates: {validated}, explicit pair passes: {explicit_ok}"
            ),
        ))
    })
}

pub fn free_affine_d(budget: &Budget) -> CheckResult {
    run("free-affine-d", || {
        let z2 = FiniteAlgebra::affine_z2();
        let fg = crate::algebra::freely_generated_digraph(&z2, &gallery("D")?, budget)?;
        let four = fg.digraph.n() == 4;
        let extreme = equivalence(&fg.digraph, EquivalenceKind::Extreme).is_single();
        Ok((
            four && extreme,
            format!("4 vertices: {four}, extremely connected: {extreme}"),
        ))
    })
}

pub fn olsak_terms(budget: &Budget) -> CheckResult {
    run("olsak-terms", || {
        // x1 + x2 + x3 over Z2 passes
        let parity123: Vec<usize> = (0..64).map(|i| (i >> 5 ^ i >> 4 ^ i >> 3) & 1).collect();
        let positive = olsak_check(&TermTable::new(2, 6, parity123)?)?;
        // all six projections fail
        let projections_fail = (0..6).try_fold(true, |acc, c| {
            olsak_check(&TermTable::projection(2, 6, c)).map(|ok| acc && !ok)
        })?;
        // expected-empty search over the two-element semilattice
        let sl = FiniteAlgebra::semilattice2();
        let sl_terms = term_tables(&sl, 6, true, budget)?.len();
        let sl_found = olsak_search(&sl, budget)?;
        let sl_empty = sl_found.is_none();
        let detail = match &sl_found {
            None => format!(
                "parity term passes: {positive}, projections fail: {projections_fail}, \
                 semilattice search empty over {sl_terms} terms: true"
            ),
            Some(t) => format!(
                "parity term passes: {positive}, projections fail: {projections_fail}, \
                 semilattice search expected empty over {sl_terms} terms but found a term \
                 (the wide meet {t:?} satisfies the identities; the two-element semilattice \
                 has a weak-near-unanimity meet, so such terms must exist)"
            ),
        };
        Ok((positive && projections_fail && sl_empty, detail))
    })
}

pub fn hm_collapse(samples: &[(Digraph, FiniteAlgebra)]) -> CheckResult {
    run("hm-collapse", || {
        for (g, _) in samples {
            let rep = crate::conditions::collapse_report(g);
            if !(rep.weak_eq_strong && rep.strong_eq_radical && rep.radical_eq_extreme) {
                return Ok((false, format!("equivalences differ on {}", g.name())));
            }
            match hm_bound(g)? {
                Some(b) if b <= 2 => {}
                other => return Ok((false, format!("return-path bound {other:?} on {}", g.name()))),
            }
        }
        Ok((
            true,
            format!(
                "{} generated digraphs: all four equivalences coincide, bound ≤ 2",
                samples.len()
            ),
        ))
    })
}

pub fn rho_compatibility(samples: &[(Digraph, FiniteAlgebra)]) -> CheckResult {
    run("rho-compatibility", || {
        for (g, alg) in samples {
            if !is_compatible(&rho_digraph(g), alg)? {
                return Ok((false, format!("rho image incompatible on {}", g.name())));
            }
        }
        let expected = Digraph::new(
            "rhoD",
            3,
            [
                (0, 0),
                (0, 1),
                (1, 0),
                (1, 1),
                (1, 2),
                (2, 0),
                (2, 1),
                (2, 2),
            ],
        )?;
        let d_matches = rho_digraph(&gallery("D")?) == expected;
        Ok((
            d_matches,
            format!(
                "{} rho images compatible, rho(D) matches the 8-edge digraph: {d_matches}",
                samples.len()
            ),
        ))
    })
}

pub fn connectivity_congruences(samples: &[(Digraph, FiniteAlgebra)]) -> CheckResult {
    run("connectivity-congruences", || {
        for (g, alg) in samples {
            let partitions = [
                equivalence(g, EquivalenceKind::Weak),
                equivalence(g, EquivalenceKind::Strong),
                equivalence(g, EquivalenceKind::Extreme),
                radical(g).result,
            ];
            for p in &partitions {
                if !is_congruence(alg, p)? {
                    return Ok((false, format!("{p} is no congruence on {}", g.name())));
                }
            }
        }
        Ok((
            true,
            format!("4 × {} partitions are congruences", samples.len()),
        ))
    })
}

pub fn template_equivalences(samples: &[(Digraph, FiniteAlgebra)], budget: &Budget) -> CheckResult {
    run("template-equivalences", || {
        let k = gallery("K")?;
        let d = gallery("D")?;
        for (g, _) in samples {
            let via_k = h_equivalence(g, &k, budget)?;
            let via_d = h_equivalence(g, &d, budget)?;
            let extreme = equivalence(g, EquivalenceKind::Extreme);
            if via_k != via_d || via_d != extreme {
                return Ok((false, format!("template equivalences differ on {}", g.name())));
            }
        }
        Ok((
            true,
            format!("{} digraphs: K- and D-equivalence equal the extreme one", samples.len()),
        ))
    })
}

pub fn negative_control(budget: &Budget) -> CheckResult {
    run("negative-control", || {
        let stored = gallery("fig3")?;
        let mut edges: Vec<(usize, usize)> = stored.edges().collect();
        let removed = (0, 1);
        edges.retain(|&e| e != removed);
        let corrupted = Digraph::new("fig3-corrupted", stored.n(), edges)?;
        let sl = FiniteAlgebra::semilattice2();
        let fg = crate::algebra::freely_generated_digraph(&sl, &gallery("C3")?, budget)?;
        let iso_breaks = find_isomorphism(&fg.digraph, &corrupted, budget)?.is_none();
        let intact = find_isomorphism(&fg.digraph, &stored, budget)?.is_some();
        Ok((
            iso_breaks && intact,
            format!("dropping one edge breaks the isomorphism: {iso_breaks}, intact copy matches: {intact}"),
        ))
    })
}
