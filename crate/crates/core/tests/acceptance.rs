//! Acceptance suite: every bundled desk-scale check as its own test,
//! printing one PASS/FAIL line per item (same lines as `paper-check`).
//!
//! Run with `cargo test --test acceptance -- --nocapture` to see the
//! report lines.

use std::sync::OnceLock;

use convar::suite::{self, CheckResult};
use convar::{Budget, Digraph, FiniteAlgebra};

fn budget() -> Budget {
    Budget::default()
}

fn assert_check(result: CheckResult) {
    println!("{}", result.line());
    assert!(result.pass, "{}", result.line());
}

fn samples() -> &'static [(Digraph, FiniteAlgebra)] {
    static SAMPLES: OnceLock<Vec<(Digraph, FiniteAlgebra)>> = OnceLock::new();
    SAMPLES.get_or_init(|| suite::affine_samples(50, &budget()).expect("sample generation"))
}

#[test]
fn criterion_01_gallery_equivalences() {
    assert_check(suite::gallery_equivalences());
}

#[test]
fn criterion_02_chain_inclusions() {
    assert_check(suite::chain_inclusions());
}

#[test]
fn criterion_03_radical_minimality() {
    assert_check(suite::radical_minimality(&budget()));
}

#[test]
fn criterion_04_n_equivalence() {
    assert_check(suite::n_equivalence(&budget()));
}

#[test]
fn criterion_05_k_projections() {
    assert_check(suite::k_projections());
}

#[test]
fn criterion_06_d_major_filter() {
    assert_check(suite::d_major_filter(&budget()));
}

#[test]
fn criterion_07_chain_meet_polymorphism() {
    assert_check(suite::chain_meet_polymorphism(&budget()));
}

#[test]
fn criterion_08_free_semilattice_c3() {
    assert_check(suite::free_semilattice_c3(&budget()));
}

#[test]
fn criterion_09_affine_identity_witness() {
    assert_check(suite::affine_identity_witness(&budget()));
}

#[test]
fn criterion_10_free_affine_d() {
    assert_check(suite::free_affine_d(&budget()));
}

#[test]
fn criterion_11_olsak_terms() {
    assert_check(suite::olsak_terms(&budget()));
}

#[test]
fn criterion_12_hm_collapse() {
    assert_check(suite::hm_collapse(samples()));
}

#[test]
fn criterion_13_rho_compatibility() {
    assert_check(suite::rho_compatibility(samples()));
}

#[test]
fn criterion_14_connectivity_congruences() {
    assert_check(suite::connectivity_congruences(samples()));
}

#[test]
fn criterion_15_template_equivalences() {
    assert_check(suite::template_equivalences(samples(), &budget()));
}

#[test]
fn criterion_16_negative_control() {
    assert_check(suite::negative_control(&budget()));
}
