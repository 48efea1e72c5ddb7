mod common;

use std::time::Instant;

use common::instance;
use dkoszul_core::builtins::builtins;
use dkoszul_core::resolve::{minimal_resolution_to, Direct};
use dkoszul_core::verify::{verify, Claim, Outcome, Status, VerificationReport};

fn koszul_builtins() -> Vec<&'static str> {
    builtins().into_iter().filter(|b| b.d_koszul).map(|b| b.name).collect()
}

fn assert_passes(r: &VerificationReport) {
    assert_eq!(r.outcome, Outcome::Pass, "{}: {r:#?}", r.instance);
    for s in &r.subclaims {
        assert_ne!(s.status, Status::Fail, "{}: {s:?}", r.instance);
    }
}

fn evidence<'a>(r: &'a VerificationReport, prefix: &str, key: &str) -> Vec<&'a str> {
    r.subclaims
        .iter()
        .filter(|s| s.name.starts_with(prefix))
        .flat_map(|s| s.evidence.iter().filter(|(k, _)| k == key).map(|(_, v)| v.as_str()))
        .collect()
}

#[test]
fn syzygy_shift_suite() {
    let start = Instant::now();
    for name in koszul_builtins() {
        let (inst, budget) = instance(name, 3, false);
        let r = verify(&Direct, &inst, Claim::SyzygyShifts, budget).unwrap();
        assert_passes(&r);
        assert_eq!(evidence(&r, "odd Ext", "isomorphism"), vec!["constructed"], "{name}");
        let shifts: Vec<_> = r.subclaims.iter().filter(|s| s.name.starts_with("(Omega^")).collect();
        assert_eq!(shifts.len(), 6, "{name}: syzygies 0..=5");
        assert!(shifts.iter().all(|s| s.status == Status::Pass));
    }
    assert!(start.elapsed().as_secs_f64() < 30.0, "took {:?}", start.elapsed());
}

#[test]
fn radical_layer_suite() {
    for name in ["two-loops-j3", "poly-3"] {
        for omega in [false, true] {
            let (inst, budget) = instance(name, 3, omega);
            let r = verify(&Direct, &inst, Claim::RadicalLayers, budget).unwrap();
            assert_passes(&r);
            let layers = r.subclaims.iter().filter(|s| s.name.starts_with("(J^")).count();
            assert_eq!(layers, 3, "{}", inst.name);
            let chains: Vec<_> = r.subclaims.iter().filter(|s| s.name.starts_with("Ext^")).collect();
            assert_eq!(chains.len(), 3, "{}: n = 1..=3", inst.name);
            assert!(chains.iter().all(|s| s.status == Status::Pass));
        }
    }
}

#[test]
fn exact_sequence_identities() {
    for b in builtins() {
        for omega in [false, true] {
            let (inst, budget) = instance(b.name, 3, omega);
            let r = verify(&Direct, &inst, Claim::ExactSequences, budget).unwrap();
            if r.outcome == Outcome::Precondition {
                assert!(!b.d_koszul, "{}", inst.name);
                continue;
            }
            assert_passes(&r);
            let rows = evidence(&r, "dim Ext^{2n}(N/JN)", "n=3");
            assert_eq!(rows.len(), 1, "{}: identity evaluated at n = 3", inst.name);
        }
    }
}

#[test]
fn even_ext_theorems() {
    let start = Instant::now();
    for name in koszul_builtins() {
        let (inst, budget) = instance(name, 3, false);
        assert_eq!(budget.h_e, 3);
        for claim in [Claim::EvenExtKoszul, Claim::MainTheorem, Claim::OddExtKoszul] {
            let r = verify(&Direct, &inst, claim, budget).unwrap();
            assert_passes(&r);
            if claim == Claim::OddExtKoszul {
                let agree = r.subclaims.iter().find(|s| s.name.starts_with("grade dims agree")).unwrap();
                assert_eq!(agree.status, Status::Pass);
            }
        }
    }
    assert!(start.elapsed().as_secs_f64() < 120.0, "took {:?}", start.elapsed());
}

#[test]
fn non_koszul_hypotheses_gate() {
    let (inst, budget) = instance("loop-chain", 2, false);
    for claim in Claim::ALL {
        let r = verify(&Direct, &inst, claim, budget).unwrap();
        assert_eq!(r.outcome, Outcome::Precondition, "{}", claim.id());
        assert!(r.subclaims.is_empty());
    }
}

#[test]
fn shifted_syzygy_module_gates_by_d() {
    // (Omega k)[-1] is generalized d-Koszul; its first syzygy sits in degree
    // d - 1, so it is d-Koszul only when d = 2 or that syzygy vanishes
    for b in builtins().into_iter().filter(|b| b.d_koszul) {
        let (inst, budget) = instance(b.name, 2, true);
        let k = common::trivial(&inst.algebra);
        let q2_empty = minimal_resolution_to(&k, 2, 2 * b.d as i32).unwrap().generators(2).is_empty();
        let r = verify(&Direct, &inst, Claim::MainTheorem, budget).unwrap();
        assert_passes(&r);
        let r = verify(&Direct, &inst, Claim::OddExtKoszul, budget).unwrap();
        if b.d == 2 || q2_empty {
            assert_passes(&r);
        } else {
            assert_eq!(r.outcome, Outcome::Precondition, "{}", inst.name);
        }
    }
}
