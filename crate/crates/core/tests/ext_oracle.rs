mod common;

use std::sync::Arc;

use common::{algebra, hom_cohomology, omega1_down, template, trivial};
use dkoszul_core::builtins::builtins;
use dkoszul_core::gmod::GradedModule;
use dkoszul_core::resolve::{inflated_resolution_to, minimal_resolution_to, oracle_resolution, Direct};
use dkoszul_core::verify::{ext_table_oracle, Status};

const H: usize = 6;

fn modules(name: &str) -> Vec<(String, common::M)> {
    let b = dkoszul_core::builtins::builtin(name).unwrap();
    let hi = template(H + 1, b.d) + 2 * b.d as i32;
    let a = algebra(name, hi as usize + 2 * b.d);
    let mut out = vec![("k".to_string(), trivial(&a))];
    for v in 0..a.num_vertices() {
        out.push((format!("S{v}"), Arc::new(GradedModule::simple(a.clone(), v).unwrap())));
    }
    out
}

#[test]
fn minimal_tables_match_hom_cohomology_of_oracle() {
    for b in builtins() {
        let hi = template(H + 1, b.d) + 2 * b.d as i32;
        for (label, m) in modules(b.name) {
            let min = minimal_resolution_to(&m, H + 1, hi).unwrap();
            let oracle = oracle_resolution(&m, H + 1, hi).unwrap();
            oracle.check_exact().unwrap();
            let mut table = min.betti_table();
            table.retain(|&(i, _), _| i <= H);
            assert_eq!(table, hom_cohomology(&oracle), "{}:{label}", b.name);
        }
    }
}

#[test]
fn shifted_first_syzygy_matches_oracle() {
    // the inflated oracle grows quickly on larger modules, so a lower bound
    let h = 4;
    for b in builtins() {
        let hi = template(h + 1, b.d) + 2 * b.d as i32;
        let a = algebra(b.name, hi as usize + 2 * b.d);
        let m = omega1_down(&a, hi);
        let min = minimal_resolution_to(&m, h + 1, hi).unwrap();
        let oracle = oracle_resolution(&m, h + 1, hi).unwrap();
        let mut table = min.betti_table();
        table.retain(|&(i, _), _| i <= h);
        assert_eq!(table, hom_cohomology(&oracle), "{}", b.name);
    }
}

#[test]
fn inflated_resolutions_are_not_minimal_but_agree() {
    let a = algebra("loop-chain", 16);
    let s1 = Arc::new(GradedModule::simple(a, 0).unwrap());
    let infl = inflated_resolution_to(&s1, 5, 10).unwrap();
    assert!(infl.check_minimal().is_err());
    let min = minimal_resolution_to(&s1, 5, 10).unwrap();
    let mut table = min.betti_table();
    table.retain(|&(i, _), _| i < 5);
    assert_eq!(hom_cohomology(&infl), table);
}

#[test]
fn library_oracle_agrees() {
    for b in builtins() {
        let window = (template(H + 1, b.d) + 2 * b.d as i32) as usize;
        let a = algebra(b.name, window + 2 * b.d);
        let s = ext_table_oracle(&Direct, &trivial(&a), H, window).unwrap();
        assert_eq!(s.status, Status::Pass, "{}: {s:?}", b.name);
    }
}

