#![allow(dead_code)]

use std::collections::BTreeMap;
use std::sync::Arc;

use dkoszul_core::algebra::{GradedAlgebra, PathAlgebraPresentation, Quiver};
use dkoszul_core::builtins::builtin;
use dkoszul_core::gmod::GradedModule;
use dkoszul_core::resolve::{minimal_resolution_to, Resolution};
use dkoszul_core::scalar::{Field, Matrix, PrimeField};
use dkoszul_core::verify::{Budget, Instance};
use rand_chacha::rand_core::RngCore;
use rand_chacha::ChaCha8Rng;

pub type A = Arc<GradedAlgebra<PrimeField>>;
pub type M = Arc<GradedModule<PrimeField>>;

/// Degree of the d-Koszul template, written out from its definition.
pub fn template(i: usize, d: usize) -> i32 {
    let n = (i / 2) as i32;
    if i % 2 == 0 {
        n * d as i32
    } else {
        n * d as i32 + 1
    }
}

pub fn algebra(name: &str, max_degree: usize) -> A {
    let b = builtin(name).unwrap();
    let p = b.presentation(PrimeField::default()).unwrap();
    Arc::new(GradedAlgebra::from_presentation(&p, max_degree))
}

pub fn trivial(a: &A) -> M {
    Arc::new(GradedModule::trivial(a.clone()))
}

/// `(Ω¹k)[-1]`, known through `hi`.
pub fn omega1_down(a: &A, hi: i32) -> M {
    let k = trivial(a);
    let res = minimal_resolution_to(&k, 1, hi + 1).unwrap();
    Arc::new(res.syzygy(1).unwrap().shift(-1))
}

/// Verification instance for a built-in at the given effort, with `M = k`
/// or `M = (Ω¹k)[-1]`.
pub fn instance(name: &str, effort: usize, omega: bool) -> (Instance<PrimeField>, Budget) {
    let b = builtin(name).unwrap();
    let budget = Budget::from_effort(b.d, effort);
    let a = algebra(name, budget.window + 2 * b.d + 2);
    let module = if omega {
        omega1_down(&a, budget.window as i32 + b.d as i32)
    } else {
        trivial(&a)
    };
    let label = if omega { "omega1-down" } else { "k" };
    (
        Instance {
            name: format!("{name}:{label}"),
            algebra: a,
            module,
            d: b.d,
        },
        budget,
    )
}

/// `dim Ext^i(M, Λ_0)_j` for `i < length`, as the cohomology of
/// `Hom(Q^•, Λ_0)` computed straight from the stored differentials. Only
/// the coefficients of generators in the same internal degree survive in
/// `Hom(-, Λ_0)`.
pub fn hom_cohomology(res: &Resolution<PrimeField>) -> BTreeMap<(usize, i32), usize> {
    let f = *res.field();
    let parts = res.parts();
    // rank of the degree-j scalar part of d_i : Q^i -> Q^{i-1}
    let scalar_rank = |i: usize, j: i32| -> usize {
        if i == 0 || i >= parts.len() {
            return 0;
        }
        let (gens, images) = &parts[i];
        let prev = &parts[i - 1].0;
        let rows: Vec<usize> = (0..prev.len()).filter(|&h| prev[h].degree == j).collect();
        let cols: Vec<usize> = (0..gens.len()).filter(|&g| gens[g].degree == j).collect();
        let mut m = Matrix::zeros(&f, rows.len(), cols.len());
        let term = res.term(i - 1);
        for (c, &g) in cols.iter().enumerate() {
            for (k, x) in &images[g] {
                let (h, _) = term.free_entry(j, gens[g].vertex, *k).unwrap();
                if let Some(r) = rows.iter().position(|&y| y == h) {
                    m.set(r, c, *x);
                }
            }
        }
        m.rank()
    };
    let mut out = BTreeMap::new();
    for i in 0..parts.len().saturating_sub(1) {
        let mut degrees: Vec<i32> = parts[i].0.iter().map(|g| g.degree).collect();
        degrees.sort();
        degrees.dedup();
        for j in degrees {
            let n = parts[i].0.iter().filter(|g| g.degree == j).count();
            let h = n - scalar_rank(i, j) - scalar_rank(i + 1, j);
            if h > 0 {
                out.insert((i, j), h);
            }
        }
    }
    out
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand_chacha::rand_core::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn below(rng: &mut ChaCha8Rng, n: u32) -> usize {
    (rng.next_u32() % n) as usize
}

/// A random quadratic quiver algebra: one or two vertices, two or three
/// arrows, and one or two random relations among parallel length-2 paths.
pub fn random_quadratic(rng: &mut ChaCha8Rng, max_degree: usize) -> A {
    let f = PrimeField::default();
    loop {
        let nv = 1 + below(rng, 2);
        let na = 2 + below(rng, 2);
        let vertices: Vec<String> = (0..nv).map(|v| format!("v{v}")).collect();
        let arrows: Vec<(String, String, String)> = (0..na)
            .map(|k| {
                let s = below(rng, nv as u32);
                let t = below(rng, nv as u32);
                (format!("a{k}"), vertices[s].clone(), vertices[t].clone())
            })
            .collect();
        let q = Quiver::new(&vertices, &arrows).unwrap();
        let paths = q.paths(2);
        if paths.is_empty() {
            continue;
        }
        let mut rels = Vec::new();
        for _ in 0..1 + below(rng, 2) {
            let first = &paths[below(rng, paths.len() as u32)];
            let ends = q.path_endpoints(first);
            let parallel: Vec<&Vec<usize>> = paths.iter().filter(|p| q.path_endpoints(p) == ends).collect();
            let rel: Vec<_> = parallel
                .iter()
                .map(|p| (f.from_i64(below(rng, 5) as i64 - 2), (*p).clone()))
                .collect();
            rels.push(rel);
        }
        let Ok(p) = PathAlgebraPresentation::new(f, q, rels) else {
            continue;
        };
        return Arc::new(GradedAlgebra::from_presentation(&p, max_degree));
    }
}
