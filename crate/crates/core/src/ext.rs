//! Ext groups, Yoneda products and the even Ext algebra.
//!
//! With a minimal resolution `Q^•` of `M`, `Ext^i(M, Λ_0)_j` is dual to the
//! generators of `Q^i` in degree `j`, so elements are coefficient vectors
//! over those generators. `Λ_0` is resolved one simple at a time.
//!
//! `yoneda_product(g, f)` is `g` after `f`: `f ∈ Ext^i(M, S(u))` is lifted
//! to a chain map `Q^{i+s} → P^s(S(u))[j]`, and `g` is evaluated on the
//! `m`-th component. The even Ext algebra `E^ev(Λ)` has grade `n` equal to
//! `Ext^{2n}(Λ_0, Λ_0)`; its basis element for generator `γ` of
//! `P^{2n}(S(u))` runs from vertex `u` to the vertex of `γ`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{AlgebraError, BasisElement, GradedAlgebra, SparseVec, StandardReport, StructureConstants};
use crate::gmod::{GradedModule, ModuleError};
use crate::resolve::{lift_chain_map, ChainMap, Resolution, ResolutionProvider, ResolveError};
use crate::scalar::{Field, Matrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExtError {
    #[error(transparent)]
    Resolve(#[from] ResolveError),
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error("even Ext algebra is not standardly graded up to grade {h_e}: condition (iii) fails at ({i},{j})")]
    NotStandard { h_e: usize, i: usize, j: usize },
    #[error("resolution of length {available} too short for homological degree {needed}")]
    Depth { needed: usize, available: usize },
}

/// Element of `Ext^i(M, Λ_0)_j`: coefficients over the degree-`j`
/// generators of `Q^i`, by generator index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtElement<E> {
    pub i: usize,
    pub j: i32,
    pub coeffs: SparseVec<E>,
}

/// Dual basis to the generators of `Q^i`, in generator order.
pub fn ext_basis<F: Field>(res: &Resolution<F>, i: usize) -> Vec<ExtElement<F::Elem>> {
    let one = res.field().one();
    res.generators(i)
        .iter()
        .enumerate()
        .map(|(k, g)| ExtElement {
            i,
            j: g.degree,
            coeffs: vec![(k, one.clone())],
        })
        .collect()
}

/// Minimal resolutions of the simples `S(u)`, together resolving `Λ_0`.
#[derive(Clone, Debug)]
pub struct SimpleResolutions<F: Field> {
    pub per_vertex: Vec<Arc<Resolution<F>>>,
}

impl<F: Field> SimpleResolutions<F> {
    pub fn new(
        p: &dyn ResolutionProvider<F>,
        alg: &Arc<GradedAlgebra<F>>,
        depth: usize,
        hi: i32,
    ) -> Result<Self, ResolveError> {
        let per_vertex = (0..alg.num_vertices())
            .map(|u| p.resolve(&Arc::new(GradedModule::simple(alg.clone(), u)?), depth, hi))
            .collect::<Result<_, _>>()?;
        Ok(SimpleResolutions { per_vertex })
    }

    pub fn length(&self) -> usize {
        self.per_vertex.iter().map(|r| r.length()).min().unwrap_or(0)
    }
}

/// Lift of an Ext element: one chain map per vertex `u` where it has a
/// component, into the resolution of `S(u)`.
#[derive(Clone, Debug)]
pub struct LiftedExt<F: Field> {
    pub i: usize,
    pub j: i32,
    pub parts: Vec<(usize, ChainMap<F>)>,
}

pub fn lift_ext<F: Field>(
    simples: &SimpleResolutions<F>,
    res: &Resolution<F>,
    f: &ExtElement<F::Elem>,
    depth: usize,
) -> Result<LiftedExt<F>, ExtError> {
    let gens = res.generators(f.i);
    let mut parts = Vec::new();
    for (u, target) in simples.per_vertex.iter().enumerate() {
        let mut any = false;
        let f0: Vec<SparseVec<F::Elem>> = (0..gens.len())
            .map(|k| {
                let hit = f.coeffs.iter().find(|(g, _)| *g == k);
                match hit {
                    Some((_, c)) if gens[k].vertex == u && gens[k].degree == f.j => {
                        any = true;
                        vec![(target.term(0).generator_index(0), c.clone())]
                    }
                    _ => Vec::new(),
                }
            })
            .collect();
        if any {
            parts.push((u, lift_chain_map(res, target, f.i, f.j, f0, depth)?));
        }
    }
    Ok(LiftedExt { i: f.i, j: f.j, parts })
}

/// `g ∘ f` for `g ∈ Ext^m(S(u), Λ_0)` (over `simples[u]`) and a lifted `f`.
pub fn compose_lifted<F: Field>(
    simples: &SimpleResolutions<F>,
    u: usize,
    g: &ExtElement<F::Elem>,
    res: &Resolution<F>,
    f: &LiftedExt<F>,
) -> Result<ExtElement<F::Elem>, ExtError> {
    let field = res.field();
    let m = g.i;
    let level = f.i + m;
    let out_j = f.j + g.j;
    let Some((_, chain)) = f.parts.iter().find(|(w, _)| *w == u) else {
        return Ok(ExtElement {
            i: level,
            j: out_j,
            coeffs: Vec::new(),
        });
    };
    if chain.components.len() <= m {
        return Err(ExtError::Depth {
            needed: level,
            available: f.i + chain.components.len() - 1,
        });
    }
    let su = &simples.per_vertex[u];
    let gens_g = su.generators(m);
    let p_m = su.term(m);
    let mut coeffs = Vec::new();
    for (h, gen) in res.generators(level).iter().enumerate() {
        if gen.degree != out_j {
            continue;
        }
        let image = &chain.components[m][h];
        let mut acc = field.zero();
        for (gi, c) in &g.coeffs {
            let gg = gens_g[*gi];
            if gg.vertex != gen.vertex || gg.degree != g.j {
                continue;
            }
            let idx = p_m.generator_index(*gi);
            if let Some((_, v)) = image.iter().find(|(k, _)| *k == idx) {
                acc = field.add(&acc, &field.mul(c, v));
            }
        }
        if !field.is_zero(&acc) {
            coeffs.push((h, acc));
        }
    }
    Ok(ExtElement {
        i: level,
        j: out_j,
        coeffs,
    })
}

/// `g ∘ f` with `g` an element of `Ext(S(u), Λ_0)`.
pub fn yoneda_product<F: Field>(
    simples: &SimpleResolutions<F>,
    u: usize,
    g: &ExtElement<F::Elem>,
    res: &Resolution<F>,
    f: &ExtElement<F::Elem>,
) -> Result<ExtElement<F::Elem>, ExtError> {
    let lifted = lift_ext(simples, res, f, g.i)?;
    compose_lifted(simples, u, g, res, &lifted)
}

/// `E^ev(Λ)` through grade `h_e`, with the data it was built from.
#[derive(Clone, Debug)]
pub struct EvenExtAlgebra<F: Field> {
    pub base: Arc<GradedAlgebra<F>>,
    pub h_e: usize,
    pub simples: SimpleResolutions<F>,
    /// `basis[n]`: `(u, generator of P^{2n}(S(u)))` pairs.
    pub basis: Vec<Vec<(usize, usize)>>,
    pub constants: StructureConstants<F>,
    pub standard: StandardReport,
    /// Present only when the tables pass all three conditions.
    pub algebra: Option<Arc<GradedAlgebra<F>>>,
}

impl<F: Field> EvenExtAlgebra<F> {
    pub fn grade_dims(&self) -> Vec<usize> {
        self.basis.iter().map(|b| b.len()).collect()
    }

    /// The even algebra, or the reason it cannot be used.
    pub fn require(&self) -> Result<&Arc<GradedAlgebra<F>>, ExtError> {
        match (&self.algebra, &self.standard.generated_in_degree_one) {
            (Some(a), _) => Ok(a),
            (None, Err((i, j))) => Err(ExtError::NotStandard {
                h_e: self.h_e,
                i: *i,
                j: *j,
            }),
            (None, Ok(())) => Err(ExtError::NotStandard {
                h_e: self.h_e,
                i: 0,
                j: 0,
            }),
        }
    }

    fn element(&self, n: usize, k: usize) -> (usize, ExtElement<F::Elem>) {
        let (u, g) = self.basis[n][k];
        let gen = self.simples.per_vertex[u].generators(2 * n)[g];
        (
            u,
            ExtElement {
                i: 2 * n,
                j: gen.degree,
                coeffs: vec![(g, self.base.field().one())],
            },
        )
    }
}

/// Builds `E^ev(Λ)` through grade `h_e` from resolutions of the simples to
/// depth `2 h_e`, internal window `[0, hi]`.
pub fn build_ext_even_algebra<F: Field>(
    p: &dyn ResolutionProvider<F>,
    base: &Arc<GradedAlgebra<F>>,
    h_e: usize,
    hi: i32,
) -> Result<EvenExtAlgebra<F>, ExtError> {
    let f = base.field().clone();
    let r = base.num_vertices();
    let simples = SimpleResolutions::new(p, base, 2 * h_e, hi)?;
    let basis: Vec<Vec<(usize, usize)>> = (0..=h_e)
        .map(|n| {
            (0..r)
                .flat_map(|u| (0..simples.per_vertex[u].generators(2 * n).len()).map(move |g| (u, g)))
                .collect()
        })
        .collect();
    let index: Vec<BTreeMap<(usize, usize), usize>> = basis
        .iter()
        .map(|b| b.iter().enumerate().map(|(k, &ug)| (ug, k)).collect())
        .collect();
    let elements: Vec<Vec<BasisElement>> = (1..=h_e)
        .map(|n| {
            basis[n]
                .iter()
                .map(|&(u, g)| {
                    let gen = simples.per_vertex[u].generators(2 * n)[g];
                    BasisElement {
                        source: u,
                        target: gen.vertex,
                        label: format!("ext{}[{}>{}]#{}", 2 * n, u, gen.vertex, g),
                        path: None,
                    }
                })
                .collect()
        })
        .collect();
    let mut products: BTreeMap<(usize, usize), Vec<SparseVec<F::Elem>>> = BTreeMap::new();
    for a in 1..h_e {
        for b in 1..=h_e - a {
            products.insert((a, b), vec![Vec::new(); basis[a].len() * basis[b].len()]);
        }
    }
    let mut shell = EvenExtAlgebra {
        base: base.clone(),
        h_e,
        simples,
        basis,
        constants: StructureConstants {
            field: f.clone(),
            vertices: base.vertices().to_vec(),
            basis: elements,
            products: BTreeMap::new(),
        },
        standard: StandardReport {
            degree_zero_semisimple: true,
            finite_dimensional: true,
            generated_in_degree_one: Ok(()),
        },
        algebra: None,
    };
    for b in 1..h_e {
        for y in 0..shell.basis[b].len() {
            let (u, ye) = shell.element(b, y);
            let su = shell.simples.per_vertex[u].clone();
            let lifted = lift_ext(&shell.simples, &su, &ye, 2 * (h_e - b))?;
            for a in 1..=h_e - b {
                for x in 0..shell.basis[a].len() {
                    let (w, xe) = shell.element(a, x);
                    if w != elements_target(&shell, b, y) {
                        continue;
                    }
                    let prod = compose_lifted(&shell.simples, w, &xe, &su, &lifted)?;
                    let mut sv: SparseVec<F::Elem> = prod
                        .coeffs
                        .into_iter()
                        .map(|(h, c)| (index[a + b][&(u, h)], c))
                        .collect();
                    sv.sort_by_key(|e| e.0);
                    let dim_b = shell.basis[b].len();
                    products.get_mut(&(a, b)).unwrap()[x * dim_b + y] = sv;
                }
            }
        }
    }
    shell.constants.products = products;
    shell.standard = GradedAlgebra::standard_report_for(shell.constants.clone())?;
    if shell.standard.passes() {
        shell.algebra = Some(Arc::new(GradedAlgebra::from_structure_constants(shell.constants.clone())?));
    }
    Ok(shell)
}

fn elements_target<F: Field>(e: &EvenExtAlgebra<F>, n: usize, k: usize) -> usize {
    e.constants.basis[n - 1][k].target
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn level(self, n: usize) -> usize {
        match self {
            Parity::Even => 2 * n,
            Parity::Odd => 2 * n + 1,
        }
    }
}

/// `E^ev(M)` or `E^od(M)` as a graded module over the even algebra, grades
/// `0..=h_e`.
#[derive(Clone, Debug)]
pub struct ExtModule<F: Field> {
    pub parity: Parity,
    pub module: Arc<GradedModule<F>>,
    /// `blocks[n][v]`: generator indices of `Q^{level(n)}` at vertex `v`.
    pub blocks: Vec<Vec<Vec<usize>>>,
}

impl<F: Field> ExtModule<F> {
    pub fn grade_dims(&self) -> Vec<usize> {
        self.blocks.iter().map(|b| b.iter().map(|v| v.len()).sum()).collect()
    }
}

/// Builds `E^ev(M)` or `E^od(M)` from a minimal resolution of `M` reaching
/// `level(h_e)`. Only the action of grade one is computed.
pub fn build_ext_module<F: Field>(
    even: &EvenExtAlgebra<F>,
    res: &Resolution<F>,
    parity: Parity,
) -> Result<ExtModule<F>, ExtError> {
    let alg = even.require()?.clone();
    let f = alg.field().clone();
    let h_e = even.h_e;
    let r = alg.num_vertices();
    let top = parity.level(h_e);
    if res.length() < top {
        return Err(ExtError::Depth {
            needed: top,
            available: res.length(),
        });
    }
    let blocks: Vec<Vec<Vec<usize>>> = (0..=h_e)
        .map(|n| {
            let gens = res.generators(parity.level(n));
            (0..r)
                .map(|v| (0..gens.len()).filter(|&k| gens[k].vertex == v).collect())
                .collect()
        })
        .collect();
    let dims: Vec<Vec<usize>> = blocks.iter().map(|b| b.iter().map(|v| v.len()).collect()).collect();
    let mut act: Vec<Vec<Matrix<F>>> = Vec::new();
    for n in 0..h_e {
        let level = parity.level(n);
        let mut mats: Vec<Matrix<F>> = alg
            .basis(1)
            .iter()
            .map(|b| Matrix::zeros(&f, dims[n + 1][b.target], dims[n][b.source]))
            .collect();
        for v in 0..r {
            for (col, &k) in blocks[n][v].iter().enumerate() {
                let fe = ExtElement {
                    i: level,
                    j: res.generators(level)[k].degree,
                    coeffs: vec![(k, f.one())],
                };
                let lifted = lift_ext(&even.simples, res, &fe, 2)?;
                for (a, b) in alg.basis(1).iter().enumerate() {
                    if b.source != v {
                        continue;
                    }
                    let (u, ae) = even.element(1, a);
                    let prod = compose_lifted(&even.simples, u, &ae, res, &lifted)?;
                    for (h, c) in prod.coeffs {
                        let row = blocks[n + 1][b.target].iter().position(|&x| x == h).unwrap();
                        mats[a].set(row, col, c);
                    }
                }
            }
        }
        act.push(mats);
    }
    let module = Arc::new(GradedModule::explicit(alg, 0, dims, act, false)?);
    Ok(ExtModule { parity, module, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Quiver;
    use crate::resolve::{minimal_resolution_to, Direct};
    use crate::scalar::PrimeField;

    fn poly(d: usize, max: usize) -> Arc<GradedAlgebra<PrimeField>> {
        let q = Quiver::new(&["0"], &[("x", "0", "0")]).unwrap();
        Arc::new(GradedAlgebra::truncated(PrimeField::default(), q, d, max).unwrap())
    }

    #[test]
    fn truncated_poly_products() {
        let a = poly(3, 20);
        let k = Arc::new(GradedModule::trivial(a.clone()));
        let res = minimal_resolution_to(&k, 6, 12).unwrap();
        let simples = SimpleResolutions::new(&Direct, &a, 6, 12).unwrap();
        let eta = &ext_basis(&res, 2)[0];
        assert_eq!(eta.j, 3);
        let sq = yoneda_product(&simples, 0, eta, &res, eta).unwrap();
        assert_eq!((sq.i, sq.j), (4, 6));
        assert_eq!(sq.coeffs, vec![(0, 1)]);
        let xi = &ext_basis(&res, 1)[0];
        let xx = yoneda_product(&simples, 0, xi, &res, xi).unwrap();
        assert!(xx.coeffs.is_empty());
        let unit = ExtElement { i: 0, j: 0, coeffs: vec![(0, 1)] };
        assert_eq!(yoneda_product(&simples, 0, &unit, &res, eta).unwrap().coeffs, eta.coeffs);
    }

    #[test]
    fn even_algebra_truncated_poly() {
        let a = poly(3, 20);
        let even = build_ext_even_algebra(&Direct, &a, 3, 12).unwrap();
        assert_eq!(even.grade_dims(), vec![1, 1, 1, 1]);
        let e = even.require().unwrap();
        assert_eq!(e.mul(1, 0, 1, 0), &[(0, 1)]);
        assert_eq!(e.mul(1, 0, 2, 0), &[(0, 1)]);
        let k = Arc::new(GradedModule::trivial(a.clone()));
        let res = minimal_resolution_to(&k, 7, 14).unwrap();
        let ev = build_ext_module(&even, &res, Parity::Even).unwrap();
        let od = build_ext_module(&even, &res, Parity::Odd).unwrap();
        assert_eq!(ev.grade_dims(), vec![1, 1, 1, 1]);
        assert_eq!(od.grade_dims(), vec![1, 1, 1, 1]);
        ev.module.validate().unwrap();
        od.module.validate().unwrap();
        assert_eq!(od.module.top_generators().len(), 1);
    }

    #[test]
    fn semisimple_even_algebra() {
        let q = Quiver::new(&["a", "b"], &[] as &[(&str, &str, &str)]).unwrap();
        let a = Arc::new(GradedAlgebra::truncated(PrimeField::default(), q, 2, 4).unwrap());
        let even = build_ext_even_algebra(&Direct, &a, 2, 4).unwrap();
        assert_eq!(even.grade_dims(), vec![2, 0, 0]);
    }

    #[test]
    fn two_loops_even_algebra() {
        let q = Quiver::new(&["0"], &[("x", "0", "0"), ("y", "0", "0")]).unwrap();
        let a = Arc::new(GradedAlgebra::truncated(PrimeField::default(), q, 3, 20).unwrap());
        let even = build_ext_even_algebra(&Direct, &a, 3, 12).unwrap();
        assert_eq!(even.grade_dims(), vec![1, 8, 64, 512]);
        // associativity and generation are checked on ingestion
        assert!(even.require().is_ok());
    }
}
