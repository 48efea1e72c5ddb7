mod common;

use std::time::Instant;

use common::{algebra, template, trivial};
use dkoszul_core::builtins::builtins;
use dkoszul_core::koszul::{concentrated_on_delta, delta, delta_set, ext_concentration_table, is_d_koszul_algebra};
use dkoszul_core::resolve::{Direct, ResolutionProvider};

const H: usize = 8;

#[test]
fn d_koszul_algebras_to_h8() {
    let start = Instant::now();
    let names = ["poly-2", "poly-3", "poly-4", "poly-5", "two-loops-j3", "three-cycle-j3", "kronecker-j3"];
    for name in names {
        let d = name.strip_prefix("poly-").map_or(3, |n| n.parse().unwrap());
        let window = template(H, d) as usize + d;
        let a = algebra(name, window + d);
        let c = is_d_koszul_algebra(&Direct, &a, d, H).unwrap();
        assert!(c.holds(), "{name}: {c:?}");
        let res = Direct.resolve(&trivial(&a), H, window as i32).unwrap();
        let table = ext_concentration_table(&res);
        assert!(concentrated_on_delta(&table, d), "{name}");
        for &(i, j) in table.keys() {
            assert_eq!(j, template(i, d), "{name}: Ext^{i} in degree {j}");
        }
        for i in 0..=H {
            assert!(table.contains_key(&(i, template(i, d))) || res.generators(i).is_empty(), "{name} i={i}");
        }
    }
    assert!(start.elapsed().as_secs_f64() < 10.0, "took {:?}", start.elapsed());
}

#[test]
fn builtin_expectations_hold() {
    for b in builtins() {
        let window = template(6, b.d) as usize + b.d;
        let a = algebra(b.name, window + b.d);
        let c = is_d_koszul_algebra(&Direct, &a, b.d, 6).unwrap();
        assert_eq!(c.holds(), b.d_koszul, "{}", b.name);
    }
}

#[test]
fn templates_are_coherent() {
    for d in 2..=6 {
        for i in 0..20 {
            assert_eq!(delta(i, d), template(i, d));
            let here = delta_set(i, d);
            let next = delta_set(i + 1, d);
            assert!(here.contains(&delta(i, d)));
            assert!(here.iter().max() < next.iter().min(), "d={d} i={i}");
        }
    }
}
