//! Truncated graded modules over a [`GradedAlgebra`].
//!
//! A module stores the degrees `lo..=hi` split into vertex blocks
//! `e_v M_t`. Vectors are always local to one block. Only the action of
//! `A_1` is stored; higher-degree elements act through the algebra's
//! factorization `x = Σ c·a·y`. Free modules keep no matrices at all and act
//! through the multiplication tables.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::algebra::{GradedAlgebra, SparseVec};
use crate::scalar::{Field, Matrix, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ModuleError {
    #[error("degree budget exceeded: degree {needed} needed, algebra stored through {available}")]
    Budget { needed: i64, available: usize },
    #[error("module data ends at degree {hi}, degree {needed} needed")]
    Window { needed: i32, hi: i32 },
    #[error("unknown vertex {0}")]
    UnknownVertex(usize),
    #[error("modules live over different algebras")]
    AlgebraMismatch,
    #[error("subspace is not closed under the action at degree {degree}, vertex {vertex}")]
    NotClosed { degree: i32, vertex: usize },
    #[error("action is not well defined at degree {degree}, vertex {vertex}")]
    IllDefined { degree: i32, vertex: usize },
    #[error("map does not commute with arrow {arrow} at degree {degree}")]
    NotHomomorphism { degree: i32, arrow: usize },
    #[error("operation needs a free module")]
    NotFree,
    #[error("bad block shape at degree {degree}, vertex {vertex}")]
    Shape { degree: i32, vertex: usize },
}

/// A generator of a free module: `A e_vertex` shifted to start in `degree`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Generator {
    pub degree: i32,
    pub vertex: usize,
}

impl Generator {
    pub fn new(vertex: usize, degree: i32) -> Self {
        Generator { degree, vertex }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Kind<F: Field> {
    /// `act[t - lo][a]`: block `(t, source a)` to block `(t + 1, target a)`.
    Explicit { act: Vec<Vec<Matrix<F>>> },
    Free(FreeData),
}

#[derive(Clone, Debug, PartialEq)]
struct FreeData {
    gens: Vec<Generator>,
    /// `[t - lo][w]` -> `(generator, algebra basis index)` per block entry.
    entries: Vec<Vec<Vec<(u32, u32)>>>,
    /// `[t - lo][w][g]` -> first index of generator `g`'s segment.
    starts: Vec<Vec<Vec<u32>>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradedModule<F: Field> {
    algebra: Arc<GradedAlgebra<F>>,
    lo: i32,
    hi: i32,
    /// Every degree above `hi` is zero.
    complete: bool,
    dims: Vec<Vec<usize>>,
    kind: Kind<F>,
}

/// A submodule or quotient together with its structure map.
#[derive(Clone, Debug)]
pub struct Embedded<F: Field> {
    pub module: Arc<GradedModule<F>>,
    pub map: GradedMap<F>,
}

fn budget_ok<F: Field>(alg: &GradedAlgebra<F>, n: i64) -> Result<(), ModuleError> {
    if n < 0 || (n as usize) <= alg.max_degree() || alg.vanishing_degree().is_some() {
        Ok(())
    } else {
        Err(ModuleError::Budget {
            needed: n,
            available: alg.max_degree(),
        })
    }
}

impl<F: Field> GradedModule<F> {
    /// Module given by explicit `A_1` matrices. `dims[t - lo][v]`,
    /// `act[t - lo][a]` for `lo <= t < hi`.
    pub fn explicit(
        algebra: Arc<GradedAlgebra<F>>,
        lo: i32,
        dims: Vec<Vec<usize>>,
        act: Vec<Vec<Matrix<F>>>,
        complete: bool,
    ) -> Result<Self, ModuleError> {
        let r = algebra.num_vertices();
        let hi = lo + dims.len() as i32 - 1;
        if dims.iter().any(|d| d.len() != r) {
            return Err(ModuleError::Shape { degree: lo, vertex: r });
        }
        let steps = dims.len().saturating_sub(1);
        if act.len() != steps {
            return Err(ModuleError::Shape { degree: hi, vertex: 0 });
        }
        for (k, mats) in act.iter().enumerate() {
            if mats.len() != algebra.dim(1) {
                return Err(ModuleError::Shape { degree: lo + k as i32, vertex: 0 });
            }
            for (a, m) in mats.iter().enumerate() {
                let b = &algebra.basis(1)[a];
                if m.shape() != (dims[k + 1][b.target], dims[k][b.source]) {
                    return Err(ModuleError::Shape {
                        degree: lo + k as i32,
                        vertex: b.source,
                    });
                }
            }
        }
        Ok(GradedModule {
            algebra,
            lo,
            hi,
            complete,
            dims,
            kind: Kind::Explicit { act },
        })
    }

    pub fn zero(algebra: Arc<GradedAlgebra<F>>) -> Self {
        GradedModule {
            algebra,
            lo: 0,
            hi: -1,
            complete: true,
            dims: Vec::new(),
            kind: Kind::Explicit { act: Vec::new() },
        }
    }

    /// `Λ_0` concentrated in degree 0, one basis vector per vertex.
    pub fn trivial(algebra: Arc<GradedAlgebra<F>>) -> Self {
        let r = algebra.num_vertices();
        GradedModule {
            algebra,
            lo: 0,
            hi: 0,
            complete: true,
            dims: vec![vec![1; r]],
            kind: Kind::Explicit { act: Vec::new() },
        }
    }

    pub fn simple(algebra: Arc<GradedAlgebra<F>>, v: usize) -> Result<Self, ModuleError> {
        let r = algebra.num_vertices();
        if v >= r {
            return Err(ModuleError::UnknownVertex(v));
        }
        let mut d = vec![0; r];
        d[v] = 1;
        Ok(GradedModule {
            algebra,
            lo: 0,
            hi: 0,
            complete: true,
            dims: vec![d],
            kind: Kind::Explicit { act: Vec::new() },
        })
    }

    /// `⊕ A e_v[s]` over the generators, stored through the algebra's
    /// truncation (or until it vanishes).
    pub fn projective(algebra: Arc<GradedAlgebra<F>>, gens: &[Generator]) -> Result<Self, ModuleError> {
        if gens.is_empty() {
            return Ok(Self::zero(algebra));
        }
        let lo = gens.iter().map(|g| g.degree).min().unwrap();
        let top = gens.iter().map(|g| g.degree).max().unwrap();
        let reach = match algebra.vanishing_degree() {
            Some(v) => v as i32 - 1,
            None => algebra.max_degree() as i32 - (top - lo),
        };
        Self::free(algebra, gens.to_vec(), lo, top.max(lo + reach).max(lo))
    }

    /// Free module on `gens` with window `[lo, hi]`. Needs `A_n` for every
    /// `n <= hi - min degree`.
    pub fn free(algebra: Arc<GradedAlgebra<F>>, gens: Vec<Generator>, lo: i32, hi: i32) -> Result<Self, ModuleError> {
        let r = algebra.num_vertices();
        for g in &gens {
            if g.vertex >= r {
                return Err(ModuleError::UnknownVertex(g.vertex));
            }
        }
        if let Some(min) = gens.iter().map(|g| g.degree).min() {
            budget_ok(&algebra, (hi - min) as i64)?;
        }
        let width = (hi - lo + 1).max(0) as usize;
        let mut dims = Vec::with_capacity(width);
        let mut entries = Vec::with_capacity(width);
        let mut starts = Vec::with_capacity(width);
        for t in lo..=hi {
            let mut d = vec![0; r];
            let mut ent = vec![Vec::new(); r];
            let mut st = vec![Vec::with_capacity(gens.len()); r];
            for (gi, g) in gens.iter().enumerate() {
                let n = t - g.degree;
                for w in 0..r {
                    st[w].push(ent[w].len() as u32);
                    if n >= 0 {
                        for &x in algebra.block(n as usize, g.vertex, w) {
                            ent[w].push((gi as u32, x as u32));
                        }
                    }
                }
            }
            for w in 0..r {
                d[w] = ent[w].len();
            }
            dims.push(d);
            entries.push(ent);
            starts.push(st);
        }
        let complete = match (algebra.vanishing_degree(), gens.iter().map(|g| g.degree).max()) {
            (_, None) => true,
            (Some(v), Some(top)) => hi >= top + v as i32 - 1,
            (None, Some(_)) => false,
        };
        Ok(GradedModule {
            algebra,
            lo,
            hi,
            complete,
            dims,
            kind: Kind::Free(FreeData { gens, entries, starts }),
        })
    }

    pub fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        &self.algebra
    }
    pub fn field(&self) -> &F {
        self.algebra.field()
    }
    pub fn lo(&self) -> i32 {
        self.lo
    }
    pub fn hi(&self) -> i32 {
        self.hi
    }
    pub fn is_complete(&self) -> bool {
        self.complete
    }
    pub fn num_vertices(&self) -> usize {
        self.algebra.num_vertices()
    }

    /// Whether degree `t` is known: stored, below the window, or forced zero.
    pub fn knows(&self, t: i32) -> bool {
        t <= self.hi || self.complete
    }

    pub fn generators(&self) -> Option<&[Generator]> {
        match &self.kind {
            Kind::Free(d) => Some(&d.gens),
            Kind::Explicit { .. } => None,
        }
    }

    pub fn dim(&self, t: i32, v: usize) -> usize {
        if t < self.lo || t > self.hi {
            0
        } else {
            self.dims[(t - self.lo) as usize][v]
        }
    }

    pub fn dim_total(&self, t: i32) -> usize {
        (0..self.num_vertices()).map(|v| self.dim(t, v)).sum()
    }

    /// `(degree, per-vertex dims)` for every stored degree.
    pub fn dims(&self) -> Vec<(i32, Vec<usize>)> {
        (self.lo..=self.hi).map(|t| (t, self.dims[(t - self.lo) as usize].clone())).collect()
    }

    /// Total dimension per degree over `lo..=hi` of the caller's choosing.
    pub fn dims_between(&self, lo: i32, hi: i32) -> Vec<usize> {
        (lo..=hi).map(|t| self.dim_total(t)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.dims.iter().flatten().all(|&d| d == 0)
    }

    /// Least degree with a nonzero component, `None` for the zero module.
    pub fn support_floor(&self) -> Option<i32> {
        (self.lo..=self.hi).find(|&t| self.dim_total(t) > 0)
    }

    pub fn support_ceiling(&self) -> Option<i32> {
        (self.lo..=self.hi).rev().find(|&t| self.dim_total(t) > 0)
    }

    /// Free-module block entry `(generator, algebra basis element)`.
    pub fn free_entry(&self, t: i32, w: usize, k: usize) -> Option<(usize, usize)> {
        match &self.kind {
            Kind::Free(d) => {
                let (g, x) = d.entries[(t - self.lo) as usize][w][k];
                Some((g as usize, x as usize))
            }
            Kind::Explicit { .. } => None,
        }
    }

    /// Index of `x·e_g` in block `(t, target x)` of a free module.
    pub fn free_index(&self, t: i32, g: usize, x: usize) -> usize {
        let Kind::Free(d) = &self.kind else {
            panic!("free_index on an explicit module")
        };
        let gen = d.gens[g];
        let n = (t - gen.degree) as usize;
        let w = self.algebra.basis(n)[x].target;
        d.starts[(t - self.lo) as usize][w][g] as usize + self.algebra.position(n, x)
    }

    /// Index of generator `g` itself in block `(degree g, vertex g)`.
    pub fn generator_index(&self, g: usize) -> usize {
        let gen = self.generators().expect("free module")[g];
        self.free_index(gen.degree, g, gen.vertex)
    }

    /// Action of `a ∈ A_1` on a vector of block `(t, source a)`.
    pub fn act(&self, a: usize, t: i32, v: &[F::Elem]) -> Vec<F::Elem> {
        let b = &self.algebra.basis(1)[a];
        match &self.kind {
            Kind::Explicit { act } => {
                if t < self.lo || t >= self.hi {
                    return self.field().zeros(self.dim(t + 1, b.target));
                }
                act[(t - self.lo) as usize][a].mul_vec(v)
            }
            Kind::Free(_) => self.mul(1, a, t, v),
        }
    }

    /// `x·v` for `x ∈ A_n`, `v` in block `(t, source x)`.
    pub fn mul(&self, n: usize, x: usize, t: i32, v: &[F::Elem]) -> Vec<F::Elem> {
        let f = self.field();
        let bx = &self.algebra.basis(n)[x];
        let out_dim = self.dim(t + n as i32, bx.target);
        match &self.kind {
            Kind::Free(_) => {
                let sparse: SparseVec<F::Elem> = v
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| !f.is_zero(c))
                    .map(|(k, c)| (k, c.clone()))
                    .collect();
                let mut out = f.zeros(out_dim);
                for (k, c) in self.mul_free_sparse(n, x, t, bx.source, &sparse) {
                    out[k] = c;
                }
                out
            }
            Kind::Explicit { .. } => {
                let orbit = self.orbit(t, bx.source, v, n);
                orbit[n][self.algebra.source_position(n, x)].clone()
            }
        }
    }

    /// `x·v` for a free module with `v` sparse in block `(t, w)`.
    pub fn mul_free_sparse(
        &self,
        n: usize,
        x: usize,
        t: i32,
        w: usize,
        v: &[(usize, F::Elem)],
    ) -> SparseVec<F::Elem> {
        let f = self.field();
        let Kind::Free(d) = &self.kind else {
            panic!("mul_free_sparse on an explicit module")
        };
        let tt = t + n as i32;
        if tt > self.hi || t < self.lo {
            return Vec::new();
        }
        let ent = &d.entries[(t - self.lo) as usize][w];
        let mut acc: alloc::collections::BTreeMap<usize, F::Elem> = alloc::collections::BTreeMap::new();
        for (k, c) in v {
            let (g, y) = ent[*k];
            let (g, y) = (g as usize, y as usize);
            let m = (t - d.gens[g].degree) as usize;
            for (z, cz) in self.algebra.mul(n, x, m, y) {
                let idx = self.free_index(tt, g, *z);
                let slot = acc.entry(idx).or_insert_with(|| f.zero());
                *slot = f.add(slot, &f.mul(c, cz));
            }
        }
        acc.into_iter().filter(|(_, c)| !f.is_zero(c)).collect()
    }

    /// `x·v` for every `x ∈ A_n e_w`, `n <= max_n`, `v` in block `(t, w)`.
    /// Entry `[n][k]` belongs to the `k`-th element of
    /// [`GradedAlgebra::from_source`]`(n, w)`.
    pub fn orbit(&self, t: i32, w: usize, v: &[F::Elem], max_n: usize) -> Vec<Vec<Vec<F::Elem>>> {
        let alg = &self.algebra;
        let f = self.field();
        let mut out: Vec<Vec<Vec<F::Elem>>> = vec![vec![v.to_vec()]];
        for n in 1..=max_n {
            let xs = alg.from_source(n, w);
            let mut level = Vec::with_capacity(xs.len());
            for &x in xs {
                let target = alg.basis(n)[x].target;
                let tt = t + n as i32;
                let img = match &self.kind {
                    Kind::Free(_) => self.mul(n, x, t, v),
                    Kind::Explicit { .. } => {
                        let mut acc = f.zeros(self.dim(tt, target));
                        for (c, a, y) in alg.factor(n, x) {
                            let prev = &out[n - 1][alg.source_position(n - 1, *y)];
                            let moved = self.act(*a, tt - 1, prev);
                            f.axpy(&mut acc, c, &moved);
                        }
                        acc
                    }
                };
                level.push(img);
            }
            out.push(level);
        }
        out
    }

    /// `M[n]`: degree `t` of the result is degree `t - n` of `self`.
    pub fn shift(&self, n: i32) -> Self {
        let mut out = self.clone();
        out.lo += n;
        out.hi += n;
        if let Kind::Free(d) = &mut out.kind {
            for g in &mut d.gens {
                g.degree += n;
            }
        }
        out
    }

    /// Matrix of `a ∈ A_1` from block `(t, source a)` to `(t + 1, target a)`.
    pub fn action_matrix(&self, a: usize, t: i32) -> Matrix<F> {
        let f = self.field();
        let b = &self.algebra.basis(1)[a];
        let (src, dst) = (self.dim(t, b.source), self.dim(t + 1, b.target));
        if let Kind::Explicit { act } = &self.kind {
            if t >= self.lo && t < self.hi {
                return act[(t - self.lo) as usize][a].clone();
            }
            return Matrix::zeros(f, dst, src);
        }
        let cols: Vec<Vec<F::Elem>> = (0..src)
            .map(|k| {
                let mut e = f.zeros(src);
                e[k] = f.one();
                self.act(a, t, &e)
            })
            .collect();
        Matrix::from_columns(f, dst, &cols)
    }

    /// Same module with every action stored as a matrix.
    pub fn to_explicit(&self) -> Self {
        if let Kind::Explicit { .. } = self.kind {
            return self.clone();
        }
        let act = (self.lo..self.hi)
            .map(|t| (0..self.algebra.dim(1)).map(|a| self.action_matrix(a, t)).collect())
            .collect();
        GradedModule {
            algebra: self.algebra.clone(),
            lo: self.lo,
            hi: self.hi,
            complete: self.complete,
            dims: self.dims.clone(),
            kind: Kind::Explicit { act },
        }
    }

    /// Same data on the window `[lo, hi]`; degrees outside the stored window
    /// are zero.
    pub fn with_window(&self, lo: i32, hi: i32) -> Self {
        let m = self.to_explicit();
        let r = self.num_vertices();
        let dims: Vec<Vec<usize>> = (lo..=hi).map(|t| (0..r).map(|v| m.dim(t, v)).collect()).collect();
        let act = (lo..hi)
            .map(|t| (0..self.algebra.dim(1)).map(|a| m.action_matrix(a, t)).collect())
            .collect();
        GradedModule {
            algebra: self.algebra.clone(),
            lo,
            hi,
            complete: self.complete || hi < self.hi,
            dims,
            kind: Kind::Explicit { act },
        }
    }

    /// Checks that the `A_1` action extends to all of `A`: for every basis
    /// vector `m`, `a·(y·m)` must equal `(a·y)·m` computed through the
    /// factorization.
    pub fn validate(&self) -> Result<(), ModuleError> {
        let alg = &self.algebra;
        let f = self.field();
        for t in self.lo..=self.hi {
            for w in 0..self.num_vertices() {
                let dim = self.dim(t, w);
                let reach = (self.hi - t).max(0) as usize;
                let reach = reach.min(alg.max_degree());
                for k in 0..dim {
                    let mut e = f.zeros(dim);
                    e[k] = f.one();
                    let orbit = self.orbit(t, w, &e, reach);
                    for n in 1..reach {
                        for &y in alg.from_source(n, w) {
                            let ym = &orbit[n][alg.source_position(n, y)];
                            for a in 0..alg.dim(1) {
                                let direct = if alg.basis(1)[a].source == alg.basis(n)[y].target {
                                    self.act(a, t + n as i32, ym)
                                } else {
                                    continue;
                                };
                                let tgt = alg.basis(1)[a].target;
                                let mut via = f.zeros(self.dim(t + n as i32 + 1, tgt));
                                for (z, c) in alg.mul(1, a, n, y) {
                                    let zm = &orbit[n + 1][alg.source_position(n + 1, *z)];
                                    f.axpy(&mut via, c, zm);
                                }
                                if direct != via {
                                    return Err(ModuleError::IllDefined { degree: t, vertex: w });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Submodule spanned by `spans[(t - lo)][v]` (vectors in block `(t, v)`),
    /// which must already be closed under the action.
    pub fn submodule(self: &Arc<Self>, spans: Vec<Vec<Subspace<F>>>) -> Result<Embedded<F>, ModuleError> {
        let f = self.field().clone();
        let r = self.num_vertices();
        let dims: Vec<Vec<usize>> = spans.iter().map(|s| s.iter().map(Subspace::dim).collect()).collect();
        let mut act = Vec::new();
        for t in self.lo..self.hi {
            let k = (t - self.lo) as usize;
            let mut mats = Vec::new();
            for (a, b) in self.algebra.basis(1).iter().enumerate() {
                let src = &spans[k][b.source];
                let dst = &spans[k + 1][b.target];
                let mut cols = Vec::with_capacity(src.dim());
                for v in &src.basis {
                    let img = self.act(a, t, v);
                    let c = dst.coordinates(&f, &img).ok_or(ModuleError::NotClosed {
                        degree: t + 1,
                        vertex: b.target,
                    })?;
                    cols.push(c);
                }
                mats.push(Matrix::from_columns(&f, dst.dim(), &cols));
            }
            act.push(mats);
        }
        let sub = Arc::new(GradedModule {
            algebra: self.algebra.clone(),
            lo: self.lo,
            hi: self.hi,
            complete: self.complete,
            dims,
            kind: Kind::Explicit { act },
        });
        let blocks = spans
            .iter()
            .enumerate()
            .map(|(k, row)| {
                (0..r)
                    .map(|v| {
                        let t = self.lo + k as i32;
                        let m = row[v].basis_matrix(&f);
                        if m.cols() == 0 {
                            Matrix::zeros(&f, self.dim(t, v), 0)
                        } else {
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        let map = GradedMap {
            source: sub.clone(),
            target: self.clone(),
            blocks,
        };
        Ok(Embedded { module: sub, map })
    }

    /// `JM`: in degree `t`, the span of `a·M_{t-1}` over the arrows.
    pub fn radical(self: &Arc<Self>) -> Embedded<F> {
        let f = self.field().clone();
        let r = self.num_vertices();
        let spans = (self.lo..=self.hi)
            .map(|t| {
                (0..r)
                    .map(|w| {
                        let mut vecs = Vec::new();
                        for (a, b) in self.algebra.basis(1).iter().enumerate() {
                            if b.target != w {
                                continue;
                            }
                            let m = self.action_matrix(a, t - 1);
                            vecs.extend(m.columns().into_iter().filter(|c| !f.is_zero_vec(c)));
                        }
                        Subspace::span(&f, self.dim(t, w), &vecs)
                    })
                    .collect()
            })
            .collect();
        self.submodule(spans).expect("radical is a submodule")
    }

    /// `J^i M` with its inclusion into `M`.
    pub fn radical_power(self: &Arc<Self>, i: usize) -> Embedded<F> {
        let mut cur = self.identity_embedding();
        for _ in 0..i {
            let next = cur.module.radical();
            let map = cur.map.compose(&next.map);
            cur = Embedded {
                module: next.module,
                map,
            };
        }
        cur
    }

    pub fn identity_embedding(self: &Arc<Self>) -> Embedded<F> {
        Embedded {
            module: self.clone(),
            map: GradedMap::identity(self.clone()),
        }
    }

    /// `M / S` for a submodule `S` given by its inclusion.
    pub fn quotient(self: &Arc<Self>, sub: &GradedMap<F>) -> Embedded<F> {
        let f = self.field().clone();
        let r = self.num_vertices();
        let mut spaces = Vec::new();
        let mut dims = Vec::new();
        for t in self.lo..=self.hi {
            let mut row = Vec::new();
            let mut drow = Vec::new();
            for v in 0..r {
                let s = Subspace::span(&f, self.dim(t, v), &sub.block(t, v).columns());
                drow.push(self.dim(t, v) - s.dim());
                row.push(s);
            }
            spaces.push(row);
            dims.push(drow);
        }
        let project = |t: i32, v: usize, x: &[F::Elem]| -> Vec<F::Elem> {
            let s: &Subspace<F> = &spaces[(t - self.lo) as usize][v];
            let red = s.reduce(&f, x);
            s.non_pivots().iter().map(|&p| red[p].clone()).collect()
        };
        let lift = |t: i32, v: usize, k: usize| -> Vec<F::Elem> {
            let s: &Subspace<F> = &spaces[(t - self.lo) as usize][v];
            let mut e = f.zeros(self.dim(t, v));
            e[s.non_pivots()[k]] = f.one();
            e
        };
        let mut act = Vec::new();
        for t in self.lo..self.hi {
            let k = (t - self.lo) as usize;
            let mut mats = Vec::new();
            for (a, b) in self.algebra.basis(1).iter().enumerate() {
                let cols: Vec<Vec<F::Elem>> = (0..dims[k][b.source])
                    .map(|j| project(t + 1, b.target, &self.act(a, t, &lift(t, b.source, j))))
                    .collect();
                mats.push(Matrix::from_columns(&f, dims[k + 1][b.target], &cols));
            }
            act.push(mats);
        }
        let q = Arc::new(GradedModule {
            algebra: self.algebra.clone(),
            lo: self.lo,
            hi: self.hi,
            complete: self.complete,
            dims,
            kind: Kind::Explicit { act },
        });
        let blocks = (self.lo..=self.hi)
            .map(|t| {
                (0..r)
                    .map(|v| {
                        let n = self.dim(t, v);
                        let cols: Vec<Vec<F::Elem>> = (0..n)
                            .map(|j| {
                                let mut e = f.zeros(n);
                                e[j] = f.one();
                                project(t, v, &e)
                            })
                            .collect();
                        Matrix::from_columns(&f, q.dim(t, v), &cols)
                    })
                    .collect()
            })
            .collect();
        let map = GradedMap {
            source: self.clone(),
            target: q.clone(),
            blocks,
        };
        Embedded { module: q, map }
    }

    /// `M/JM` with the projection.
    pub fn top(self: &Arc<Self>) -> Embedded<F> {
        let j = self.radical();
        self.quotient(&j.map)
    }

    /// Degrees and vertices of a minimal generating set, one entry per
    /// generator, sorted by `(degree, vertex)`.
    pub fn top_generators(self: &Arc<Self>) -> Vec<Generator> {
        let t = self.top();
        let mut out = Vec::new();
        for deg in t.module.lo..=t.module.hi {
            for v in 0..self.num_vertices() {
                for _ in 0..t.module.dim(deg, v) {
                    out.push(Generator::new(v, deg));
                }
            }
        }
        out
    }

    /// `Ok(())` when the top is concentrated in `degrees`, otherwise the
    /// least degree outside with nonzero top.
    pub fn generated_in_degrees(self: &Arc<Self>, degrees: &[i32]) -> Result<(), i32> {
        match self.top_generators().into_iter().find(|g| !degrees.contains(&g.degree)) {
            Some(g) => Err(g.degree),
            None => Ok(()),
        }
    }

    pub fn direct_sum(a: &Arc<Self>, b: &Arc<Self>) -> Result<Self, ModuleError> {
        if !same_algebra(&a.algebra, &b.algebra) {
            return Err(ModuleError::AlgebraMismatch);
        }
        let f = a.field().clone();
        if let (Some(ga), Some(gb)) = (a.generators(), b.generators()) {
            let mut gens = ga.to_vec();
            gens.extend_from_slice(gb);
            return Self::free(a.algebra.clone(), gens, a.lo.min(b.lo), a.hi.min(b.hi));
        }
        let (lo, hi) = (a.lo.min(b.lo), a.hi.max(b.hi));
        let r = a.num_vertices();
        let dims = (lo..=hi)
            .map(|t| (0..r).map(|v| a.dim(t, v) + b.dim(t, v)).collect())
            .collect();
        let act = (lo..hi)
            .map(|t| {
                (0..a.algebra.dim(1))
                    .map(|x| {
                        let (ma, mb) = (a.action_matrix(x, t), b.action_matrix(x, t));
                        let mut m = Matrix::zeros(&f, ma.rows() + mb.rows(), ma.cols() + mb.cols());
                        for i in 0..ma.rows() {
                            for j in 0..ma.cols() {
                                m.set(i, j, ma.get(i, j).clone());
                            }
                        }
                        for i in 0..mb.rows() {
                            for j in 0..mb.cols() {
                                m.set(ma.rows() + i, ma.cols() + j, mb.get(i, j).clone());
                            }
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        Ok(GradedModule {
            algebra: a.algebra.clone(),
            lo,
            hi,
            complete: a.complete && b.complete,
            dims,
            kind: Kind::Explicit { act },
        })
    }

    /// Canonical byte encoding for content hashing.
    pub fn encode(&self, out: &mut Vec<u8>) {
        let f = self.field();
        self.algebra.encode(out);
        out.extend_from_slice(&self.lo.to_le_bytes());
        out.extend_from_slice(&self.hi.to_le_bytes());
        out.push(self.complete as u8);
        for d in self.dims.iter().flatten() {
            out.extend_from_slice(&(*d as u64).to_le_bytes());
        }
        match &self.kind {
            Kind::Free(d) => {
                out.push(1);
                for g in &d.gens {
                    out.extend_from_slice(&g.degree.to_le_bytes());
                    out.extend_from_slice(&(g.vertex as u64).to_le_bytes());
                }
            }
            Kind::Explicit { act } => {
                out.push(0);
                for m in act.iter().flatten() {
                    for i in 0..m.rows() {
                        for x in m.row(i) {
                            f.encode_elem(x, out);
                        }
                    }
                }
            }
        }
    }
}

pub fn same_algebra<F: Field>(a: &Arc<GradedAlgebra<F>>, b: &Arc<GradedAlgebra<F>>) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

/// Degree-preserving map, stored as blocks `[t - source.lo][v]` of shape
/// `target(t, v) x source(t, v)`.
#[derive(Clone, Debug)]
pub struct GradedMap<F: Field> {
    pub source: Arc<GradedModule<F>>,
    pub target: Arc<GradedModule<F>>,
    blocks: Vec<Vec<Matrix<F>>>,
}

impl<F: Field> GradedMap<F> {
    pub fn new(source: Arc<GradedModule<F>>, target: Arc<GradedModule<F>>, blocks: Vec<Vec<Matrix<F>>>) -> Self {
        GradedMap { source, target, blocks }
    }

    pub fn identity(m: Arc<GradedModule<F>>) -> Self {
        let f = m.field().clone();
        let blocks = (m.lo..=m.hi)
            .map(|t| (0..m.num_vertices()).map(|v| Matrix::identity(&f, m.dim(t, v))).collect())
            .collect();
        GradedMap {
            source: m.clone(),
            target: m,
            blocks,
        }
    }

    pub fn zero(source: Arc<GradedModule<F>>, target: Arc<GradedModule<F>>) -> Self {
        let f = source.field().clone();
        let blocks = (source.lo..=source.hi)
            .map(|t| {
                (0..source.num_vertices())
                    .map(|v| Matrix::zeros(&f, target.dim(t, v), source.dim(t, v)))
                    .collect()
            })
            .collect();
        GradedMap { source, target, blocks }
    }

    /// Map out of a free module determined by the images of its generators
    /// (`images[g]` lies in block `(degree g, vertex g)` of the target).
    pub fn from_generator_images(
        source: Arc<GradedModule<F>>,
        target: Arc<GradedModule<F>>,
        images: &[Vec<F::Elem>],
    ) -> Result<Self, ModuleError> {
        let gens = source.generators().ok_or(ModuleError::NotFree)?.to_vec();
        let f = source.field().clone();
        let alg = source.algebra.clone();
        let r = source.num_vertices();
        let mut blocks: Vec<Vec<Vec<Vec<F::Elem>>>> = (source.lo..=source.hi)
            .map(|t| (0..r).map(|v| vec![Vec::new(); source.dim(t, v)]).collect())
            .collect();
        for (g, gen) in gens.iter().enumerate() {
            let reach = (source.hi - gen.degree).max(0) as usize;
            if !target.knows(source.hi) {
                return Err(ModuleError::Window {
                    needed: source.hi,
                    hi: target.hi,
                });
            }
            let orbit = target.orbit(gen.degree, gen.vertex, &images[g], reach);
            for (n, level) in orbit.iter().enumerate() {
                let t = gen.degree + n as i32;
                for (k, &x) in alg.from_source(n, gen.vertex).iter().enumerate() {
                    let w = alg.basis(n)[x].target;
                    let idx = source.free_index(t, g, x);
                    blocks[(t - source.lo) as usize][w][idx] = level[k].clone();
                }
            }
        }
        let blocks = blocks
            .into_iter()
            .enumerate()
            .map(|(k, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(v, cols)| Matrix::from_columns(&f, target.dim(source.lo + k as i32, v), &cols))
                    .collect()
            })
            .collect();
        Ok(GradedMap { source, target, blocks })
    }

    pub fn block(&self, t: i32, v: usize) -> Matrix<F> {
        if t < self.source.lo || t > self.source.hi {
            return Matrix::zeros(self.source.field(), self.target.dim(t, v), self.source.dim(t, v));
        }
        self.blocks[(t - self.source.lo) as usize][v].clone()
    }

    pub fn block_ref(&self, t: i32, v: usize) -> Option<&Matrix<F>> {
        if t < self.source.lo || t > self.source.hi {
            return None;
        }
        Some(&self.blocks[(t - self.source.lo) as usize][v])
    }

    pub fn apply(&self, t: i32, v: usize, x: &[F::Elem]) -> Vec<F::Elem> {
        match self.block_ref(t, v) {
            Some(m) => m.mul_vec(x),
            None => self.source.field().zeros(self.target.dim(t, v)),
        }
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &GradedMap<F>) -> GradedMap<F> {
        let src = inner.source.clone();
        let blocks = (src.lo..=src.hi)
            .map(|t| {
                (0..src.num_vertices())
                    .map(|v| self.block(t, v).mul(&inner.block(t, v)).expect("composable maps"))
                    .collect()
            })
            .collect();
        GradedMap {
            source: src,
            target: self.target.clone(),
            blocks,
        }
    }

    /// Checks `f ∘ a = a ∘ f` on every stored degree.
    pub fn check_homomorphism(&self) -> Result<(), ModuleError> {
        let (s, tg) = (&self.source, &self.target);
        for t in s.lo..s.hi {
            for (a, b) in s.algebra.basis(1).iter().enumerate() {
                let left = self.block(t + 1, b.target).mul(&s.action_matrix(a, t)).unwrap();
                let right = tg.action_matrix(a, t).mul(&self.block(t, b.source)).unwrap();
                if left != right {
                    return Err(ModuleError::NotHomomorphism { degree: t, arrow: a });
                }
            }
        }
        Ok(())
    }

    /// Kernel with its inclusion into the source.
    pub fn kernel(&self) -> Result<Embedded<F>, ModuleError> {
        let s = &self.source;
        let f = s.field().clone();
        let spans = (s.lo..=s.hi)
            .map(|t| {
                (0..s.num_vertices())
                    .map(|v| {
                        let m = self.block(t, v);
                        if m.cols() == 0 {
                            Subspace::zero(0)
                        } else if m.rows() == 0 {
                            Subspace::full(&f, m.cols())
                        } else {
                            m.kernel_subspace()
                        }
                    })
                    .collect()
            })
            .collect();
        s.submodule(spans)
    }

    /// Whether every block is invertible.
    pub fn is_isomorphism(&self) -> bool {
        let (s, t) = (&self.source, &self.target);
        let lo = s.lo.min(t.lo);
        let hi = s.hi.max(t.hi);
        (lo..=hi).all(|d| {
            (0..s.num_vertices()).all(|v| {
                let (a, b) = (s.dim(d, v), t.dim(d, v));
                a == b && (a == 0 || self.block(d, v).rank() == a)
            })
        })
    }
}

/// Outcome of [`graded_iso`].
#[derive(Clone, Debug)]
pub enum IsoOutcome<F: Field> {
    Isomorphic(GradedMap<F>),
    /// Dimension vectors differ at `(degree, vertex)`.
    DimensionMismatch { degree: i32, vertex: usize },
    /// Dimensions agree but the search found no isomorphism.
    NotFound,
}

impl<F: Field> IsoOutcome<F> {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoOutcome::Isomorphic(_))
    }
}

const ISO_ATTEMPTS: usize = 24;

/// Searches for a graded isomorphism `m → n`.
///
/// Homomorphisms are parametrized by the images of a minimal generating set
/// of `m`, constrained to kill the relations of `m`; candidates from that
/// space are tested for invertibility in every degree. The dimension check
/// is decisive; the search is not.
pub fn graded_iso<F: Field>(m: &Arc<GradedModule<F>>, n: &Arc<GradedModule<F>>) -> Result<IsoOutcome<F>, ModuleError> {
    if !same_algebra(&m.algebra, &n.algebra) {
        return Err(ModuleError::AlgebraMismatch);
    }
    let r = m.num_vertices();
    let lo = m.lo.max(n.lo);
    let hi = m.hi.min(n.hi);
    for t in m.lo.min(n.lo)..=m.hi.max(n.hi) {
        if (t > m.hi && !m.complete) || (t > n.hi && !n.complete) {
            continue;
        }
        for v in 0..r {
            if m.dim(t, v) != n.dim(t, v) {
                return Ok(IsoOutcome::DimensionMismatch { degree: t, vertex: v });
            }
        }
    }
    if hi < lo {
        let z = Arc::new(GradedModule::zero(m.algebra.clone()));
        return Ok(IsoOutcome::Isomorphic(GradedMap::zero(z.clone(), z)));
    }
    let m = Arc::new(m.with_window(lo, hi));
    let n = Arc::new(n.with_window(lo, hi));
    let f = m.field().clone();
    let alg = m.algebra.clone();

    // generators of m: standard vectors at non-pivot positions of JM
    let jm = m.radical();
    let mut gens: Vec<(i32, usize, Vec<F::Elem>)> = Vec::new();
    for t in lo..=hi {
        for v in 0..r {
            let s = Subspace::span(&f, m.dim(t, v), &jm.map.block(t, v).columns());
            for p in s.non_pivots() {
                let mut e = f.zeros(m.dim(t, v));
                e[p] = f.one();
                gens.push((t, v, e));
            }
        }
    }
    let unknown_start: Vec<usize> = gens
        .iter()
        .scan(0, |acc, (t, v, _)| {
            let s = *acc;
            *acc += n.dim(*t, *v);
            Some(s)
        })
        .collect();
    let num_unknowns: usize = gens.iter().map(|(t, v, _)| n.dim(*t, *v)).sum();

    let orbits_m: Vec<_> = gens
        .iter()
        .map(|(t, v, e)| m.orbit(*t, *v, e, (hi - t) as usize))
        .collect();
    let orbits_n: Vec<Vec<_>> = gens
        .iter()
        .map(|(t, v, _)| {
            (0..n.dim(*t, *v))
                .map(|b| {
                    let mut e = f.zeros(n.dim(*t, *v));
                    e[b] = f.one();
                    n.orbit(*t, *v, &e, (hi - t) as usize)
                })
                .collect()
        })
        .collect();

    // per (t, w): cover columns (g, x) and the induced map data
    struct Cover {
        t: i32,
        w: usize,
        cols: Vec<(usize, usize, usize)>,
    }
    let mut covers = Vec::new();
    let mut constraint_rows: Vec<Vec<F::Elem>> = Vec::new();
    let mut pis = Vec::new();
    for t in lo..=hi {
        for w in 0..r {
            let mut cols = Vec::new();
            let mut pcols = Vec::new();
            for (g, (s, v, _)) in gens.iter().enumerate() {
                let k = (t - s) as usize;
                if t < *s {
                    continue;
                }
                for (pos, &x) in alg.from_source(k, *v).iter().enumerate() {
                    if alg.basis(k)[x].target == w {
                        cols.push((g, k, pos));
                        pcols.push(orbits_m[g][k][pos].clone());
                    }
                }
            }
            let pi = Matrix::from_columns(&f, m.dim(t, w), &pcols);
            let ker = pi.kernel_basis();
            for kv in ker.columns() {
                // Σ κ_(g,x) x·φ(g) = 0 in n_(t,w), one row per coordinate
                let dn = n.dim(t, w);
                let mut rows = vec![f.zeros(num_unknowns); dn];
                for (c, &(g, k, pos)) in kv.iter().zip(&cols) {
                    if f.is_zero(c) {
                        continue;
                    }
                    for b in 0..orbits_n[g].len() {
                        let img = &orbits_n[g][b][k][pos];
                        for (row, val) in rows.iter_mut().zip(img) {
                            if !f.is_zero(val) {
                                let u = unknown_start[g] + b;
                                row[u] = f.add(&row[u], &f.mul(c, val));
                            }
                        }
                    }
                }
                constraint_rows.extend(rows.into_iter().filter(|row| !f.is_zero_vec(row)));
            }
            covers.push(Cover { t, w, cols });
            pis.push(pi);
        }
    }
    let homs = if constraint_rows.is_empty() {
        Matrix::identity(&f, num_unknowns)
    } else {
        Matrix::from_rows(&f, constraint_rows).unwrap().kernel_basis()
    };
    let sections: Vec<Option<Matrix<F>>> = pis
        .iter()
        .map(|pi| {
            if pi.rows() == 0 {
                return Some(Matrix::zeros(&f, pi.cols(), 0));
            }
            pi.solve(&Matrix::identity(&f, pi.rows())).ok().flatten()
        })
        .collect();

    let build = |phi: &[F::Elem]| -> Option<GradedMap<F>> {
        let mut blocks: Vec<Vec<Matrix<F>>> = (lo..=hi).map(|_| Vec::new()).collect();
        for (ci, cov) in covers.iter().enumerate() {
            let dn = n.dim(cov.t, cov.w);
            let psi_cols: Vec<Vec<F::Elem>> = cov
                .cols
                .iter()
                .map(|&(g, k, pos)| {
                    let mut acc = f.zeros(dn);
                    for b in 0..orbits_n[g].len() {
                        let c = &phi[unknown_start[g] + b];
                        f.axpy(&mut acc, c, &orbits_n[g][b][k][pos]);
                    }
                    acc
                })
                .collect();
            let psi = Matrix::from_columns(&f, dn, &psi_cols);
            let block = psi.mul(sections[ci].as_ref()?).ok()?;
            blocks[(cov.t - lo) as usize].push(block);
        }
        let map = GradedMap {
            source: m.clone(),
            target: n.clone(),
            blocks,
        };
        map.is_isomorphism().then_some(map)
    };

    if homs.cols() == 0 {
        return Ok(if num_unknowns == 0 && m.is_zero() {
            IsoOutcome::Isomorphic(GradedMap::zero(m.clone(), n.clone()))
        } else {
            IsoOutcome::NotFound
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b6f737a);
    for attempt in 0..ISO_ATTEMPTS {
        let coeffs: Vec<F::Elem> = (0..homs.cols())
            .map(|_| {
                if attempt == 0 {
                    f.one()
                } else {
                    f.from_i64((rng.next_u32() % 2003) as i64 - 1001)
                }
            })
            .collect();
        let phi = homs.mul_vec(&coeffs);
        if let Some(map) = build(&phi) {
            return Ok(IsoOutcome::Isomorphic(map));
        }
    }
    Ok(IsoOutcome::NotFound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PathAlgebraPresentation, Quiver};
    use crate::scalar::PrimeField;

    pub(crate) fn example() -> Arc<GradedAlgebra<PrimeField>> {
        let q = Quiver::new(
            &["1", "2", "3"],
            &[("alpha", "1", "1"), ("beta", "1", "2"), ("gamma", "2", "3")],
        )
        .unwrap();
        let p = PathAlgebraPresentation::from_names(
            PrimeField::default(),
            q,
            &[
                vec![(1, vec!["alpha", "alpha", "alpha"])],
                vec![(1, vec!["alpha", "beta", "gamma"])],
            ],
        )
        .unwrap();
        Arc::new(GradedAlgebra::from_presentation(&p, 8))
    }

    fn totals(m: &GradedModule<PrimeField>, lo: i32, hi: i32) -> Vec<usize> {
        m.dims_between(lo, hi)
    }

    #[test]
    fn trivial_and_simple() {
        let a = example();
        let k = GradedModule::trivial(a.clone());
        assert_eq!(k.dims()[0].1, vec![1, 1, 1]);
        let s = GradedModule::simple(a.clone(), 0).unwrap();
        assert_eq!(totals(&s, 0, 2), vec![1, 0, 0]);
        assert!(GradedModule::simple(a, 7).is_err());
    }

    #[test]
    fn projective_dims() {
        let a = example();
        let p = Arc::new(GradedModule::projective(a.clone(), &[Generator::new(0, 0)]).unwrap());
        assert_eq!(totals(&p, 0, 5), vec![1, 2, 3, 1, 0, 0]);
        p.validate().unwrap();
        p.to_explicit().validate().unwrap();
        let j = p.radical();
        assert_eq!(totals(&j.module, 0, 4), vec![0, 2, 3, 1, 0]);
        j.map.check_homomorphism().unwrap();
        let t = p.top();
        assert_eq!(totals(&t.module, 0, 3), vec![1, 0, 0, 0]);
        t.map.check_homomorphism().unwrap();
    }

    #[test]
    fn generation_degrees() {
        let a = example();
        let q = Arc::new(
            GradedModule::projective(a.clone(), &[Generator::new(0, 4), Generator::new(1, 5)]).unwrap(),
        );
        assert_eq!(q.generated_in_degrees(&[4]), Err(5));
        assert_eq!(q.generated_in_degrees(&[4, 5]), Ok(()));
        let z = Arc::new(GradedModule::zero(a));
        assert_eq!(z.generated_in_degrees(&[]), Ok(()));
    }

    #[test]
    fn shift_composes() {
        let a = example();
        let s = GradedModule::simple(a, 0).unwrap();
        assert_eq!(s.shift(0), s);
        assert_eq!(s.shift(2).shift(1), s.shift(3));
        assert_eq!(s.shift(3).support_floor(), Some(3));
    }

    #[test]
    fn iso_search() {
        let a = example();
        let p = Arc::new(GradedModule::projective(a.clone(), &[Generator::new(0, 0)]).unwrap());
        assert!(graded_iso(&p, &p).unwrap().is_isomorphic());
        let s1 = Arc::new(GradedModule::simple(a.clone(), 0).unwrap());
        let s2 = Arc::new(GradedModule::simple(a.clone(), 1).unwrap());
        assert!(matches!(
            graded_iso(&s1, &s2).unwrap(),
            IsoOutcome::DimensionMismatch { degree: 0, vertex: 0 }
        ));
        let explicit = Arc::new(p.to_explicit());
        let out = graded_iso(&p, &explicit).unwrap();
        let IsoOutcome::Isomorphic(map) = out else {
            panic!("free and explicit forms of P(1) must be isomorphic")
        };
        map.check_homomorphism().unwrap();
        // JP(1) has dims 0,2,3,1 while P(1)[1] ⊕ P(2)[1] has 0,2,3,3,1
        let j = p.radical().module;
        let p1 = Arc::new(GradedModule::projective(a, &[Generator::new(0, 1), Generator::new(1, 1)]).unwrap());
        assert!(matches!(
            graded_iso(&j, &p1).unwrap(),
            IsoOutcome::DimensionMismatch { degree: 3, .. }
        ));
    }

    #[test]
    fn kernel_of_identity_and_zero() {
        let a = example();
        let p = Arc::new(GradedModule::projective(a, &[Generator::new(0, 0)]).unwrap().to_explicit());
        let id = GradedMap::identity(p.clone());
        assert!(id.kernel().unwrap().module.is_zero());
        let z = GradedMap::zero(p.clone(), p.clone());
        assert_eq!(z.kernel().unwrap().module.dims(), p.dims());
    }
}
