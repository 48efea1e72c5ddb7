mod common;

use std::sync::Arc;

use common::{below, random_quadratic, rng, trivial, M};
use dkoszul_core::gmod::{Generator, GradedModule};
use dkoszul_core::koszul::{certify_window, is_koszul_module, Property};
use dkoszul_core::resolve::{horseshoe, minimal_resolution_to, minimize, Direct};

const H: usize = 4;

#[test]
fn generalized_two_koszul_matches_linear_test() {
    let mut r = rng(0x2b0c);
    let mut seen = [0usize; 2];
    for case in 0..20 {
        let a = random_quadratic(&mut r, H + 5);
        let mut modules: Vec<M> = vec![trivial(&a)];
        for v in 0..a.num_vertices() {
            modules.push(Arc::new(GradedModule::simple(a.clone(), v).unwrap()));
        }
        for m in modules {
            let linear = is_koszul_module(&Direct, &m, H).unwrap();
            let general = certify_window(&Direct, &m, Property::GeneralizedDKoszul, 2, H, H + 2).unwrap();
            assert_eq!(linear.holds(), general.holds(), "case {case}");
            assert_eq!(linear.multisets, general.multisets, "case {case}");
            seen[linear.holds() as usize] += 1;
        }
    }
    // both verdicts occur among the samples
    assert!(seen[0] > 0 && seen[1] > 0, "{seen:?}");
}

/// A random graded module: a sum of shifted projectives cut down by a
/// power of the radical, or a sum of projectives and simples.
fn random_module(r: &mut rand_chacha::ChaCha8Rng, a: &common::A) -> M {
    let nv = a.num_vertices();
    let gens: Vec<Generator> = (0..1 + below(r, 2))
        .map(|_| Generator::new(below(r, nv as u32), below(r, 2) as i32))
        .collect();
    let p = Arc::new(GradedModule::projective(a.clone(), &gens).unwrap());
    if below(r, 2) == 0 {
        let cut = p.radical_power(1 + below(r, 3));
        p.quotient(&cut.map).module
    } else {
        let s = Arc::new(GradedModule::simple(a.clone(), below(r, nv as u32)).unwrap());
        Arc::new(GradedModule::direct_sum(&p, &s).unwrap())
    }
}

#[test]
fn minimized_horseshoe_matches_minimal() {
    let mut r = rng(0x5e1f);
    let hi = 5;
    let mut non_minimal = 0;
    for case in 0..20 {
        let a = random_quadratic(&mut r, hi as usize + 1);
        let m = Arc::new(random_module(&mut r, &a).with_window(0, hi));
        let jm = m.radical();
        let top = m.quotient(&jm.map);
        let ra = minimal_resolution_to(&jm.module, H, hi).unwrap();
        let rc = minimal_resolution_to(&top.module, H, hi).unwrap();
        let big = horseshoe(&jm.map, &top.map, &ra, &rc).unwrap();
        big.check_exact().unwrap();
        non_minimal += big.check_minimal().is_err() as usize;
        let small = minimize(&big).unwrap();
        small.check_exact().unwrap();
        let min = minimal_resolution_to(&m, H, hi).unwrap();
        for i in 0..H {
            assert_eq!(small.generator_multiset(i), min.generator_multiset(i), "case {case}, Q^{i}");
        }
    }
    assert!(non_minimal > 0);
}
