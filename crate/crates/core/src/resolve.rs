//! Graded projective resolutions.
//!
//! Level `i` of a [`Resolution`] is a free module `Q^i` together with the
//! images of its generators under the differential: a vector in block
//! `(degree, vertex)` of `Q^{i-1}`, or of the resolved module for `i = 0`.
//! The minimal resolution is built one internal degree at a time: new
//! generators in degree `t` span a complement of the image of the older
//! generators inside the kernel of the previous differential.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{densify, sparsify, GradedAlgebra, SparseVec};
use crate::gmod::{Embedded, Generator, GradedMap, GradedModule, ModuleError};
use crate::scalar::{Field, Matrix, ScalarError, Subspace};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ResolveError {
    #[error("degree budget exceeded: window needs algebra degree {needed}, stored through {available}")]
    Budget { needed: usize, available: usize },
    #[error("module data ends at degree {hi}, resolution window needs degree {needed}")]
    Window { needed: i32, hi: i32 },
    #[error("module is nonzero in degree {degree}, below the window")]
    BelowWindow { degree: i32 },
    #[error("sequence is not exact at degree {degree}, vertex {vertex}")]
    NotExact { degree: i32, vertex: usize },
    #[error("chain map does not lift at level {level}, degree {degree}")]
    NoLift { level: usize, degree: i32 },
    #[error("homological degree {requested} exceeds the stored bound {available}")]
    Depth { requested: usize, available: usize },
    #[error("stored resolution is malformed at level {level}")]
    Malformed { level: usize },
    #[error(transparent)]
    Module(#[from] ModuleError),
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug)]
pub struct Level<F: Field> {
    pub free: Arc<GradedModule<F>>,
    /// `images[g]`: sparse vector in block `(degree g, vertex g)` of the
    /// previous term.
    pub images: Vec<SparseVec<F::Elem>>,
}

#[derive(Clone, Debug)]
pub struct Resolution<F: Field> {
    module: Arc<GradedModule<F>>,
    lo: i32,
    hi: i32,
    levels: Vec<Level<F>>,
}

/// Computes or fetches resolutions; lets callers put a cache in front of
/// the engine.
pub trait ResolutionProvider<F: Field>: Send + Sync {
    fn resolve(&self, m: &Arc<GradedModule<F>>, h: usize, hi: i32) -> Result<Arc<Resolution<F>>, ResolveError>;
}

/// Always recomputes.
#[derive(Clone, Copy, Debug, Default)]
pub struct Direct;

impl<F: Field> ResolutionProvider<F> for Direct {
    fn resolve(&self, m: &Arc<GradedModule<F>>, h: usize, hi: i32) -> Result<Arc<Resolution<F>>, ResolveError> {
        Ok(Arc::new(minimal_resolution_to(m, h, hi)?))
    }
}

/// Default window top: as far as the algebra's truncation allows.
pub fn default_window_top<F: Field>(m: &GradedModule<F>) -> i32 {
    m.lo() + m.algebra().max_degree() as i32
}

pub fn minimal_resolution<F: Field>(m: &Arc<GradedModule<F>>, h: usize) -> Result<Resolution<F>, ResolveError> {
    minimal_resolution_to(m, h, default_window_top(m))
}

/// Minimal resolution through homological degree `h`, exact in every
/// internal degree up to `hi`.
pub fn minimal_resolution_to<F: Field>(
    m: &Arc<GradedModule<F>>,
    h: usize,
    hi: i32,
) -> Result<Resolution<F>, ResolveError> {
    Builder::new(m, hi)?.run(h, false)
}

/// A non-minimal resolution: every first new generator in a block also gets
/// redundant partners one degree up, mapping to its multiples by arrows.
pub fn inflated_resolution_to<F: Field>(
    m: &Arc<GradedModule<F>>,
    h: usize,
    hi: i32,
) -> Result<Resolution<F>, ResolveError> {
    Builder::new(m, hi)?.run(h, true)
}

struct Builder<F: Field> {
    module: Arc<GradedModule<F>>,
    alg: Arc<GradedAlgebra<F>>,
    lo: i32,
    hi: i32,
}

impl<F: Field> Builder<F> {
    fn new(m: &Arc<GradedModule<F>>, hi: i32) -> Result<Self, ResolveError> {
        let alg = m.algebra().clone();
        let lo = m.lo();
        let span = (hi - lo).max(0) as usize;
        if span > alg.max_degree() && alg.vanishing_degree().is_none() {
            return Err(ResolveError::Budget {
                needed: span,
                available: alg.max_degree(),
            });
        }
        if !m.knows(hi) {
            return Err(ResolveError::Window { needed: hi, hi: m.hi() });
        }
        Ok(Builder {
            module: m.clone(),
            alg,
            lo,
            hi,
        })
    }

    fn run(self, h: usize, inflate: bool) -> Result<Resolution<F>, ResolveError> {
        let f = self.alg.field().clone();
        let r = self.alg.num_vertices();
        let mut res = Resolution {
            module: self.module.clone(),
            lo: self.lo,
            hi: self.hi,
            levels: Vec::new(),
        };
        for i in 0..=h {
            let mut gens: Vec<Generator> = Vec::new();
            let mut images: Vec<SparseVec<F::Elem>> = Vec::new();
            let mut scheduled: BTreeMap<(i32, usize), Vec<SparseVec<F::Elem>>> = BTreeMap::new();
            // dense orbits of level-0 images in the module
            let mut orbits: Vec<Vec<Vec<Vec<F::Elem>>>> = Vec::new();
            for t in self.lo..=self.hi {
                for w in 0..r {
                    let ambient = res.target_dim(i, t, w);
                    if ambient == 0 {
                        continue;
                    }
                    let kernel: Vec<Vec<F::Elem>> = if i == 0 {
                        Subspace::full(&f, ambient).basis
                    } else {
                        let d = res.differential_block(i - 1, t, w);
                        if d.rows() == 0 {
                            Subspace::full(&f, ambient).basis
                        } else {
                            d.kernel_basis().columns()
                        }
                    };
                    if kernel.is_empty() {
                        continue;
                    }
                    let mut image_cols: Vec<Vec<F::Elem>> = Vec::new();
                    for (g, gen) in gens.iter().enumerate() {
                        let n = (t - gen.degree) as usize;
                        for &x in self.alg.block(n, gen.vertex, w) {
                            let col = if i == 0 {
                                orbits[g][n][self.alg.source_position(n, x)].clone()
                            } else {
                                let prev = &res.levels[i - 1].free;
                                densify(&f, &prev.mul_free_sparse(n, x, gen.degree, gen.vertex, &images[g]), ambient)
                            };
                            if !f.is_zero_vec(&col) {
                                image_cols.push(col);
                            }
                        }
                    }
                    if let Some(extra) = scheduled.remove(&(t, w)) {
                        for img in extra {
                            let dense = densify(&f, &img, ambient);
                            image_cols.push(dense.clone());
                            self.push_gen(i, &mut gens, &mut images, &mut orbits, Generator::new(w, t), dense);
                        }
                    }
                    let fresh = complement(&f, ambient, &image_cols, &kernel);
                    for (k, v) in fresh.into_iter().enumerate() {
                        if inflate && k == 0 && t < self.hi {
                            for (a, b) in self.alg.basis(1).iter().enumerate() {
                                if b.source != w {
                                    continue;
                                }
                                let moved = if i == 0 {
                                    self.module.act(a, t, &v)
                                } else {
                                    let prev = &res.levels[i - 1].free;
                                    densify(
                                        &f,
                                        &prev.mul_free_sparse(1, a, t, w, &sparsify(&f, &v)),
                                        prev.dim(t + 1, b.target),
                                    )
                                };
                                if !f.is_zero_vec(&moved) {
                                    scheduled.entry((t + 1, b.target)).or_default().push(sparsify(&f, &moved));
                                }
                            }
                        }
                        self.push_gen(i, &mut gens, &mut images, &mut orbits, Generator::new(w, t), v);
                    }
                }
            }
            let free = Arc::new(GradedModule::free(self.alg.clone(), gens, self.lo, self.hi)?);
            res.levels.push(Level { free, images });
        }
        Ok(res)
    }

    fn push_gen(
        &self,
        i: usize,
        gens: &mut Vec<Generator>,
        images: &mut Vec<SparseVec<F::Elem>>,
        orbits: &mut Vec<Vec<Vec<Vec<F::Elem>>>>,
        gen: Generator,
        image: Vec<F::Elem>,
    ) {
        let f = self.alg.field();
        if i == 0 {
            let reach = (self.hi - gen.degree) as usize;
            orbits.push(self.module.orbit(gen.degree, gen.vertex, &image, reach));
        }
        gens.push(gen);
        images.push(sparsify(f, &image));
    }
}

/// Vectors of `kernel`, in order, that extend a basis of `span(image)`
/// to a basis of `span(image) + span(kernel)`.
fn complement<F: Field>(
    f: &F,
    ambient: usize,
    image: &[Vec<F::Elem>],
    kernel: &[Vec<F::Elem>],
) -> Vec<Vec<F::Elem>> {
    if image.is_empty() {
        return kernel.to_vec();
    }
    let im_rank = Matrix::from_columns(f, ambient, image).rank();
    if im_rank >= kernel.len() {
        return Vec::new();
    }
    let mut cols = image.to_vec();
    cols.extend_from_slice(kernel);
    let rr = Matrix::from_columns(f, ambient, &cols).rref();
    rr.pivots
        .into_iter()
        .filter(|&p| p >= image.len())
        .map(|p| kernel[p - image.len()].clone())
        .collect()
}

impl<F: Field> Resolution<F> {
    pub fn module(&self) -> &Arc<GradedModule<F>> {
        &self.module
    }
    pub fn algebra(&self) -> &Arc<GradedAlgebra<F>> {
        self.module.algebra()
    }
    pub fn field(&self) -> &F {
        self.module.field()
    }
    /// Homological bound `H`.
    pub fn length(&self) -> usize {
        self.levels.len() - 1
    }
    pub fn window(&self) -> (i32, i32) {
        (self.lo, self.hi)
    }
    pub fn level(&self, i: usize) -> &Level<F> {
        &self.levels[i]
    }
    pub fn term(&self, i: usize) -> &Arc<GradedModule<F>> {
        &self.levels[i].free
    }
    pub fn generators(&self, i: usize) -> &[Generator] {
        self.levels[i].free.generators().unwrap()
    }

    /// Generator multiset of `Q^i` as sorted `(vertex, degree)` pairs.
    pub fn generator_multiset(&self, i: usize) -> Vec<(usize, i32)> {
        let mut v: Vec<(usize, i32)> = self.generators(i).iter().map(|g| (g.vertex, g.degree)).collect();
        v.sort();
        v
    }

    fn target_dim(&self, i: usize, t: i32, w: usize) -> usize {
        if i == 0 {
            self.module.dim(t, w)
        } else {
            self.levels[i - 1].free.dim(t, w)
        }
    }

    /// Matrix of `d_i : Q^i → Q^{i-1}` (the augmentation for `i = 0`) on
    /// block `(t, w)`.
    pub fn differential_block(&self, i: usize, t: i32, w: usize) -> Matrix<F> {
        let f = self.field();
        let level = &self.levels[i];
        let src = &level.free;
        let rows = self.target_dim(i, t, w);
        let alg = self.algebra();
        let mut orbits: BTreeMap<usize, Vec<Vec<F::Elem>>> = BTreeMap::new();
        let cols: Vec<Vec<F::Elem>> = (0..src.dim(t, w))
            .map(|k| {
                let (g, x) = src.free_entry(t, w, k).unwrap();
                let gen = src.generators().unwrap()[g];
                let n = (t - gen.degree) as usize;
                if i == 0 {
                    let orbit = orbits.entry(g).or_insert_with(|| {
                        let img = densify(f, &level.images[g], self.module.dim(gen.degree, gen.vertex));
                        self.module.orbit(gen.degree, gen.vertex, &img, n).swap_remove(n)
                    });
                    orbit[alg.source_position(n, x)].clone()
                } else {
                    let prev = &self.levels[i - 1].free;
                    densify(f, &prev.mul_free_sparse(n, x, gen.degree, gen.vertex, &level.images[g]), rows)
                }
            })
            .collect();
        Matrix::from_columns(f, rows, &cols)
    }

    /// `d_i` as a graded map.
    pub fn differential(&self, i: usize) -> GradedMap<F> {
        let src = self.levels[i].free.clone();
        let tgt = if i == 0 {
            self.module.clone()
        } else {
            self.levels[i - 1].free.clone()
        };
        let blocks = (src.lo()..=src.hi())
            .map(|t| (0..src.num_vertices()).map(|w| self.differential_block(i, t, w)).collect())
            .collect();
        GradedMap::new(src, tgt, blocks)
    }

    /// `rank d_0 = dim M` and `rank d_i + rank d_{i+1} = dim Q^i` on every
    /// block of the window; the first failing position otherwise.
    pub fn check_exact(&self) -> Result<(), (usize, i32, usize)> {
        let r = self.module.num_vertices();
        for t in self.lo..=self.hi {
            for w in 0..r {
                let mut prev_rank = self.differential_block(0, t, w).rank();
                if prev_rank != self.module.dim(t, w) {
                    return Err((0, t, w));
                }
                for i in 0..self.length() {
                    let next = self.differential_block(i + 1, t, w).rank();
                    if prev_rank + next != self.levels[i].free.dim(t, w) {
                        return Err((i, t, w));
                    }
                    prev_rank = next;
                }
            }
        }
        Ok(())
    }

    /// `Im d_i ⊆ J Q^{i-1}` for `i >= 1`: no image touches a generator.
    pub fn check_minimal(&self) -> Result<(), (usize, usize)> {
        for i in 1..self.levels.len() {
            let prev = &self.levels[i - 1].free;
            let prev_gens = prev.generators().unwrap();
            for (g, gen) in self.generators(i).iter().enumerate() {
                for (k, _) in &self.levels[i].images[g] {
                    let (h, _) = prev.free_entry(gen.degree, gen.vertex, *k).unwrap();
                    if prev_gens[h].degree == gen.degree {
                        return Err((i, g));
                    }
                }
            }
        }
        Ok(())
    }

    /// `Ω^i`: the module for `i = 0`, otherwise `ker d_{i-1} ⊆ Q^{i-1}`.
    pub fn syzygy(&self, i: usize) -> Result<Arc<GradedModule<F>>, ResolveError> {
        Ok(self.syzygy_embedded(i)?.module)
    }

    pub fn syzygy_embedded(&self, i: usize) -> Result<Embedded<F>, ResolveError> {
        if i > self.levels.len() {
            return Err(ResolveError::Depth {
                requested: i,
                available: self.levels.len(),
            });
        }
        if i == 0 {
            return Ok(self.module.identity_embedding());
        }
        Ok(self.differential(i - 1).kernel()?)
    }

    /// `δ^i_j`: coefficient of generator `h` of `Q^i` in `d_{i+1}(g)` for
    /// generators of degree `j`; rows `h`, columns `g`.
    pub fn top_coefficients(&self, i: usize, j: i32) -> Matrix<F> {
        let f = self.field();
        let hs: Vec<usize> = (0..self.generators(i).len())
            .filter(|&h| self.generators(i)[h].degree == j)
            .collect();
        let gs: Vec<usize> = (0..self.generators(i + 1).len())
            .filter(|&g| self.generators(i + 1)[g].degree == j)
            .collect();
        let q = &self.levels[i].free;
        let mut m = Matrix::zeros(f, hs.len(), gs.len());
        for (col, &g) in gs.iter().enumerate() {
            let gen = self.generators(i + 1)[g];
            for (k, c) in &self.levels[i + 1].images[g] {
                let (h, _) = q.free_entry(j, gen.vertex, *k).unwrap();
                if let Some(row) = hs.iter().position(|&x| x == h) {
                    if self.generators(i)[h].degree == j {
                        m.set(row, col, c.clone());
                    }
                }
            }
        }
        m
    }

    /// Number of generators of `Q^i` in internal degree `j`.
    pub fn betti(&self, i: usize, j: i32) -> usize {
        self.generators(i).iter().filter(|g| g.degree == j).count()
    }

    /// Sorted map `(i, j) -> count` over nonzero entries.
    pub fn betti_table(&self) -> BTreeMap<(usize, i32), usize> {
        let mut out = BTreeMap::new();
        for i in 0..self.levels.len() {
            for g in self.generators(i) {
                *out.entry((i, g.degree)).or_insert(0) += 1;
            }
        }
        out
    }

    /// Reassembles a resolution from generator lists and differential
    /// images, as produced by [`Self::encode`]'s inputs. Shapes are
    /// checked; exactness and minimality are not.
    pub fn from_parts(
        module: Arc<GradedModule<F>>,
        lo: i32,
        hi: i32,
        parts: Vec<(Vec<Generator>, Vec<SparseVec<F::Elem>>)>,
    ) -> Result<Resolution<F>, ResolveError> {
        let alg = module.algebra().clone();
        let mut levels: Vec<Level<F>> = Vec::with_capacity(parts.len());
        for (level, (gens, images)) in parts.into_iter().enumerate() {
            let bad = ResolveError::Malformed { level };
            if gens.len() != images.len() {
                return Err(bad);
            }
            for (g, img) in gens.iter().zip(&images) {
                if g.vertex >= alg.num_vertices() || g.degree < lo || g.degree > hi {
                    return Err(bad);
                }
                let ambient = match levels.last() {
                    None => module.dim(g.degree, g.vertex),
                    Some(prev) => prev.free.dim(g.degree, g.vertex),
                };
                if img.iter().any(|(k, _)| *k >= ambient) {
                    return Err(bad);
                }
            }
            let free = Arc::new(GradedModule::free(alg.clone(), gens, lo, hi)?);
            levels.push(Level { free, images });
        }
        if levels.is_empty() {
            return Err(ResolveError::Malformed { level: 0 });
        }
        Ok(Resolution { module, lo, hi, levels })
    }

    /// Generator lists and differential images, level by level.
    pub fn parts(&self) -> Vec<(Vec<Generator>, Vec<SparseVec<F::Elem>>)> {
        self.levels
            .iter()
            .map(|l| (l.free.generators().unwrap().to_vec(), l.images.clone()))
            .collect()
    }

    /// Same resolution truncated at homological degree `h`.
    pub fn truncate(&self, h: usize) -> Resolution<F> {
        Resolution {
            module: self.module.clone(),
            lo: self.lo,
            hi: self.hi,
            levels: self.levels[..=h.min(self.length())].to_vec(),
        }
    }

    /// Canonical byte encoding of the whole resolution.
    pub fn encode(&self, out: &mut Vec<u8>) {
        let f = self.field();
        out.extend_from_slice(&self.lo.to_le_bytes());
        out.extend_from_slice(&self.hi.to_le_bytes());
        for level in &self.levels {
            let gens = level.free.generators().unwrap();
            out.extend_from_slice(&(gens.len() as u64).to_le_bytes());
            for (g, img) in gens.iter().zip(&level.images) {
                out.extend_from_slice(&g.degree.to_le_bytes());
                out.extend_from_slice(&(g.vertex as u64).to_le_bytes());
                out.extend_from_slice(&(img.len() as u64).to_le_bytes());
                for (k, c) in img {
                    out.extend_from_slice(&(*k as u64).to_le_bytes());
                    f.encode_elem(c, out);
                }
            }
        }
    }
}

/// Dimensions of `Ext^i(M, Λ_0)_j` from the cohomology of
/// `Hom(Q^•, Λ_0[j])`: `n_{i,j} - rank δ^i_j - rank δ^{i-1}_j`. Valid for
/// `i < H`.
pub fn hom_complex_cohomology<F: Field>(res: &Resolution<F>) -> BTreeMap<(usize, i32), usize> {
    let mut out = BTreeMap::new();
    let (lo, hi) = res.window();
    for i in 0..res.length() {
        for j in lo..=hi {
            let n = res.betti(i, j);
            if n == 0 {
                continue;
            }
            let out_rank = res.top_coefficients(i, j).rank();
            let in_rank = if i == 0 { 0 } else { res.top_coefficients(i - 1, j).rank() };
            let dim = n - out_rank - in_rank;
            if dim > 0 {
                out.insert((i, j), dim);
            }
        }
    }
    out
}

/// Horseshoe resolution of `B` from `0 → A → B → C → 0`, given by
/// `iota: A → B` and `pi: B → C`. Both input resolutions must share the
/// window. `Q^i_B = Q^i_A ⊕ Q^i_C` with the A-generators first.
pub fn horseshoe<F: Field>(
    iota: &GradedMap<F>,
    pi: &GradedMap<F>,
    res_a: &Resolution<F>,
    res_c: &Resolution<F>,
) -> Result<Resolution<F>, ResolveError> {
    check_short_exact(iota, pi)?;
    let b = iota.target.clone();
    let f = b.field().clone();
    let alg = b.algebra().clone();
    let (lo, hi) = res_a.window();
    let h = res_a.length().min(res_c.length());
    let mut res = Resolution {
        module: b.clone(),
        lo,
        hi,
        levels: Vec::new(),
    };
    for i in 0..=h {
        let ga = res_a.generators(i).to_vec();
        let gc = res_c.generators(i).to_vec();
        let mut gens = ga.clone();
        gens.extend_from_slice(&gc);
        let free = Arc::new(GradedModule::free(alg.clone(), gens, lo, hi)?);
        let mut images: Vec<SparseVec<F::Elem>> = Vec::new();
        if i == 0 {
            for (g, gen) in ga.iter().enumerate() {
                let x = densify(&f, &res_a.levels[0].images[g], res_a.module.dim(gen.degree, gen.vertex));
                images.push(sparsify(&f, &iota.apply(gen.degree, gen.vertex, &x)));
            }
            for (g, gen) in gc.iter().enumerate() {
                let y = densify(&f, &res_c.levels[0].images[g], res_c.module.dim(gen.degree, gen.vertex));
                let p = pi.block(gen.degree, gen.vertex);
                let x = crate::scalar::solve_vec(&p, &y)?.ok_or(ResolveError::NoLift {
                    level: 0,
                    degree: gen.degree,
                })?;
                images.push(sparsify(&f, &x));
            }
        } else {
            let prev = res.levels[i - 1].free.clone();
            let prev_a = res_a.levels[i - 1].free.clone();
            let prev_c = res_c.levels[i - 1].free.clone();
            let na_prev = res_a.generators(i - 1).len();
            let reindex = |from: &GradedModule<F>, offset: usize, t: i32, w: usize, v: &SparseVec<F::Elem>| {
                let mut out: SparseVec<F::Elem> = v
                    .iter()
                    .map(|(k, c)| {
                        let (g, x) = from.free_entry(t, w, *k).unwrap();
                        (prev.free_index(t, g + offset, x), c.clone())
                    })
                    .collect();
                out.sort_by_key(|e| e.0);
                out
            };
            for (g, gen) in ga.iter().enumerate() {
                images.push(reindex(&prev_a, 0, gen.degree, gen.vertex, &res_a.levels[i].images[g]));
            }
            for (g, gen) in gc.iter().enumerate() {
                let (t, w) = (gen.degree, gen.vertex);
                let c_part = reindex(&prev_c, na_prev, t, w, &res_c.levels[i].images[g]);
                let d = res.differential_block(i - 1, t, w);
                let y = d.mul_vec(&densify(&f, &c_part, prev.dim(t, w)));
                let a_cols: Vec<usize> = (0..prev.dim(t, w))
                    .filter(|&k| prev.free_entry(t, w, k).unwrap().0 < na_prev)
                    .collect();
                let da = d.select_columns(&a_cols);
                let neg: Vec<F::Elem> = y.iter().map(|c| f.neg(c)).collect();
                let x = crate::scalar::solve_vec(&da, &neg)?.ok_or(ResolveError::NoLift { level: i, degree: t })?;
                let mut full = densify(&f, &c_part, prev.dim(t, w));
                for (c, &k) in x.iter().zip(&a_cols) {
                    full[k] = f.add(&full[k], c);
                }
                images.push(sparsify(&f, &full));
            }
        }
        res.levels.push(Level { free, images });
    }
    Ok(res)
}

/// `iota` injective, `pi` surjective and `im iota = ker pi` in every
/// degree of the middle module's window.
pub fn check_short_exact<F: Field>(iota: &GradedMap<F>, pi: &GradedMap<F>) -> Result<(), ResolveError> {
    let b = &iota.target;
    for t in b.lo()..=b.hi() {
        for w in 0..b.num_vertices() {
            let i = iota.block(t, w);
            let p = pi.block(t, w);
            let ri = i.rank();
            let rp = p.rank();
            let composite_zero = p.rows() == 0 || i.cols() == 0 || p.mul(&i)?.is_zero();
            if ri != i.cols() || rp != p.rows() || ri + rp != b.dim(t, w) || !composite_zero {
                return Err(ResolveError::NotExact { degree: t, vertex: w });
            }
        }
    }
    Ok(())
}

/// Splits off contractible pairs `g ↦ c·h + …` (`c` a nonzero scalar,
/// `g`, `h` of equal degree and vertex) until none remain below the top
/// level. The top level may stay non-minimal.
pub fn minimize<F: Field>(res: &Resolution<F>) -> Result<Resolution<F>, ResolveError> {
    let f = res.field().clone();
    let alg = res.algebra().clone();
    let (lo, hi) = res.window();
    // images as (generator, algebra element, coefficient) triples
    type Img<E> = Vec<(usize, usize, E)>;
    let mut gens: Vec<Vec<Generator>> = (0..=res.length()).map(|i| res.generators(i).to_vec()).collect();
    let mut imgs: Vec<Vec<Img<F::Elem>>> = Vec::new();
    for i in 0..=res.length() {
        let level = &res.levels[i];
        let v: Vec<Img<F::Elem>> = (0..gens[i].len())
            .map(|g| {
                let gen = gens[i][g];
                level.images[g]
                    .iter()
                    .map(|(k, c)| {
                        if i == 0 {
                            (*k, usize::MAX, c.clone())
                        } else {
                            let (h, x) = res.levels[i - 1].free.free_entry(gen.degree, gen.vertex, *k).unwrap();
                            (h, x, c.clone())
                        }
                    })
                    .collect()
            })
            .collect();
        imgs.push(v);
    }

    for i in 1..=res.length() {
        loop {
            // find g at level i with a scalar coefficient on some h
            let mut found = None;
            'search: for (g, img) in imgs[i].iter().enumerate() {
                for (h, _, c) in img {
                    let hg = gens[i - 1][*h];
                    if hg.degree == gens[i][g].degree && !f.is_zero(c) {
                        found = Some((g, *h, c.clone()));
                        break 'search;
                    }
                }
            }
            let Some((g, h, c)) = found else { break };
            let cinv = f.inv(&c).unwrap();
            let gen_g = gens[i][g];
            let img_g = imgs[i][g].clone();
            // as a free-module vector in Q^{i-1}
            let prev = Arc::new(GradedModule::free(alg.clone(), gens[i - 1].clone(), lo, hi)?);
            let to_sparse = |img: &Img<F::Elem>, t: i32| -> SparseVec<F::Elem> {
                let mut v: SparseVec<F::Elem> =
                    img.iter().map(|(hh, x, cc)| (prev.free_index(t, *hh, *x), cc.clone())).collect();
                v.sort_by_key(|e| e.0);
                v
            };
            let g_sparse = to_sparse(&img_g, gen_g.degree);
            for x in 0..gens[i].len() {
                if x == g {
                    continue;
                }
                let gen_x = gens[i][x];
                let n = gen_x.degree - gen_g.degree;
                if n < 0 {
                    continue;
                }
                let y: Vec<(usize, F::Elem)> = imgs[i][x]
                    .iter()
                    .filter(|(hh, _, _)| *hh == h)
                    .map(|(_, z, cc)| (*z, cc.clone()))
                    .collect();
                if y.is_empty() {
                    continue;
                }
                let mut cur = to_sparse(&imgs[i][x], gen_x.degree);
                let mut acc: BTreeMap<usize, F::Elem> = cur.drain(..).collect();
                for (z, cz) in y {
                    let coef = f.neg(&f.mul(&cinv, &cz));
                    for (k, v) in prev.mul_free_sparse(n as usize, z, gen_g.degree, gen_g.vertex, &g_sparse) {
                        let slot = acc.entry(k).or_insert_with(|| f.zero());
                        *slot = f.add(slot, &f.mul(&coef, &v));
                    }
                }
                imgs[i][x] = acc
                    .into_iter()
                    .filter(|(_, v)| !f.is_zero(v))
                    .map(|(k, v)| {
                        let (hh, z) = prev.free_entry(gen_x.degree, gen_x.vertex, k).unwrap();
                        (hh, z, v)
                    })
                    .collect();
            }
            // drop g from level i, h from level i - 1
            gens[i].remove(g);
            imgs[i].remove(g);
            gens[i - 1].remove(h);
            imgs[i - 1].remove(h);
            for img in imgs[i].iter_mut() {
                img.retain(|(hh, _, _)| *hh != h);
                for e in img.iter_mut() {
                    if e.0 > h {
                        e.0 -= 1;
                    }
                }
            }
            if i + 1 < imgs.len() {
                for img in imgs[i + 1].iter_mut() {
                    img.retain(|(gg, _, _)| *gg != g);
                    for e in img.iter_mut() {
                        if e.0 > g {
                            e.0 -= 1;
                        }
                    }
                }
            }
        }
    }

    let mut out = Resolution {
        module: res.module.clone(),
        lo,
        hi,
        levels: Vec::new(),
    };
    for i in 0..gens.len() {
        let free = Arc::new(GradedModule::free(alg.clone(), gens[i].clone(), lo, hi)?);
        let images = (0..gens[i].len())
            .map(|g| {
                let gen = gens[i][g];
                let mut v: SparseVec<F::Elem> = imgs[i][g]
                    .iter()
                    .map(|(hh, x, c)| {
                        if i == 0 {
                            (*hh, c.clone())
                        } else {
                            (out.levels[i - 1].free.free_index(gen.degree, *hh, *x), c.clone())
                        }
                    })
                    .collect();
                v.sort_by_key(|e| e.0);
                v
            })
            .collect();
        out.levels.push(Level { free, images });
    }
    Ok(out)
}

/// A resolution built without the minimal algorithm: the inflated one for
/// semisimple modules, a horseshoe over `0 → JM → M → M/JM → 0` otherwise.
pub fn oracle_resolution<F: Field>(m: &Arc<GradedModule<F>>, h: usize, hi: i32) -> Result<Resolution<F>, ResolveError> {
    let jm = m.radical();
    if jm.module.is_zero() {
        return inflated_resolution_to(m, h, hi);
    }
    let top = m.quotient(&jm.map);
    let ra = inflated_resolution_to(&jm.module, h, hi)?;
    let rc = inflated_resolution_to(&top.module, h, hi)?;
    horseshoe(&jm.map, &top.map, &ra, &rc)
}

/// Chain map `f_k : Q_src^{start + k} → Q_tgt^k[shift]` for `k <= depth`,
/// each given by generator images (sparse, in the target block at degree
/// `deg g - shift`).
#[derive(Clone, Debug)]
pub struct ChainMap<F: Field> {
    pub start: usize,
    pub shift: i32,
    pub components: Vec<Vec<SparseVec<F::Elem>>>,
}

/// Lifts `f_0` (images of the generators of `Q_src^start` in `Q_tgt^0`)
/// through both resolutions. `ε_tgt ∘ f_0 ∘ d_src` must vanish.
pub fn lift_chain_map<F: Field>(
    src: &Resolution<F>,
    tgt: &Resolution<F>,
    start: usize,
    shift: i32,
    f0: Vec<SparseVec<F::Elem>>,
    depth: usize,
) -> Result<ChainMap<F>, ResolveError> {
    let need = start + depth;
    if need > src.length() || depth > tgt.length() {
        return Err(ResolveError::Depth {
            requested: need,
            available: src.length(),
        });
    }
    let f = src.field().clone();
    let mut comps = vec![f0];
    for k in 1..=depth {
        let level = start + k;
        let gens = src.generators(level);
        let prev_src = &src.levels[level - 1].free;
        let tgt_prev = &tgt.levels[k - 1].free;
        let fprev = &comps[k - 1];
        // group generators by block
        let mut by_block: BTreeMap<(i32, usize), Vec<usize>> = BTreeMap::new();
        for (z, g) in gens.iter().enumerate() {
            by_block.entry((g.degree, g.vertex)).or_default().push(z);
        }
        let mut out = vec![Vec::new(); gens.len()];
        for ((t, w), zs) in by_block {
            let tt = t - shift;
            let dim_prev = tgt_prev.dim(tt, w);
            let rhs: Vec<Vec<F::Elem>> = zs
                .iter()
                .map(|&z| {
                    let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
                    for (idx, c) in &src.levels[level].images[z] {
                        let (g, x) = prev_src.free_entry(t, w, *idx).unwrap();
                        let gg = prev_src.generators().unwrap()[g];
                        let n = (t - gg.degree) as usize;
                        for (kk, v) in tgt_prev.mul_free_sparse(n, x, gg.degree - shift, gg.vertex, &fprev[g]) {
                            let slot = acc.entry(kk).or_insert_with(|| f.zero());
                            *slot = f.add(slot, &f.mul(c, &v));
                        }
                    }
                    let sv: SparseVec<F::Elem> = acc.into_iter().filter(|(_, v)| !f.is_zero(v)).collect();
                    densify(&f, &sv, dim_prev)
                })
                .collect();
            if rhs.iter().all(|v| f.is_zero_vec(v)) {
                continue;
            }
            let d = tgt.differential_block(k, tt, w);
            let b = Matrix::from_columns(&f, dim_prev, &rhs);
            let sol = d.solve(&b)?.ok_or(ResolveError::NoLift { level: k, degree: t })?;
            for (col, &z) in zs.iter().enumerate() {
                out[z] = sparsify(&f, &sol.column(col));
            }
        }
        comps.push(out);
    }
    Ok(ChainMap {
        start,
        shift,
        components: comps,
    })
}

/// Lifts a module map `phi: src.module → tgt.module` to `depth`.
pub fn lift_module_map<F: Field>(
    phi: &GradedMap<F>,
    src: &Resolution<F>,
    tgt: &Resolution<F>,
    depth: usize,
) -> Result<ChainMap<F>, ResolveError> {
    let f = src.field().clone();
    let mut f0 = Vec::new();
    for (g, gen) in src.generators(0).iter().enumerate() {
        let (t, w) = (gen.degree, gen.vertex);
        let x = densify(&f, &src.levels[0].images[g], src.module.dim(t, w));
        let y = phi.apply(t, w, &x);
        let aug = tgt.differential_block(0, t, w);
        let sol = crate::scalar::solve_vec(&aug, &y)?.ok_or(ResolveError::NoLift { level: 0, degree: t })?;
        f0.push(sparsify(&f, &sol));
    }
    lift_chain_map(src, tgt, 0, 0, f0, depth)
}

/// Checks `d_tgt ∘ f_k = f_{k-1} ∘ d_src` on generators, and
/// `ε ∘ f_0 = φ ∘ ε` when `phi` is given.
pub fn check_chain_map<F: Field>(
    cm: &ChainMap<F>,
    src: &Resolution<F>,
    tgt: &Resolution<F>,
) -> bool {
    let f = src.field();
    for k in 1..cm.components.len() {
        let level = cm.start + k;
        for (z, gen) in src.generators(level).iter().enumerate() {
            let tt = gen.degree - cm.shift;
            let tgt_prev = &tgt.levels[k - 1].free;
            let lhs = tgt
                .differential_block(k, tt, gen.vertex)
                .mul_vec(&densify(f, &cm.components[k][z], tgt.levels[k].free.dim(tt, gen.vertex)));
            let prev_src = &src.levels[level - 1].free;
            let mut rhs = f.zeros(tgt_prev.dim(tt, gen.vertex));
            for (idx, c) in &src.levels[level].images[z] {
                let (g, x) = prev_src.free_entry(gen.degree, gen.vertex, *idx).unwrap();
                let gg = prev_src.generators().unwrap()[g];
                let n = (gen.degree - gg.degree) as usize;
                for (kk, v) in tgt_prev.mul_free_sparse(n, x, gg.degree - cm.shift, gg.vertex, &cm.components[k - 1][g]) {
                    rhs[kk] = f.add(&rhs[kk], &f.mul(c, &v));
                }
            }
            if lhs != rhs {
                return false;
            }
        }
    }
    true
}

/// Least degree with nonzero component, `None` for the zero module.
pub fn support_floor<F: Field>(m: &GradedModule<F>) -> Option<i32> {
    m.support_floor()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PathAlgebraPresentation, Quiver};
    use crate::gmod::{graded_iso, IsoOutcome};
    use crate::scalar::PrimeField;

    fn example() -> Arc<GradedAlgebra<PrimeField>> {
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
        Arc::new(GradedAlgebra::from_presentation(&p, 12))
    }

    fn truncated_poly(d: usize) -> Arc<GradedAlgebra<PrimeField>> {
        let q = Quiver::new(&["0"], &[("x", "0", "0")]).unwrap();
        Arc::new(GradedAlgebra::truncated(PrimeField::default(), q, d, 12).unwrap())
    }

    #[test]
    fn example_resolution() {
        let a = example();
        let s1 = Arc::new(GradedModule::simple(a, 0).unwrap());
        let res = minimal_resolution(&s1, 4).unwrap();
        assert_eq!(res.generator_multiset(0), vec![(0, 0)]);
        assert_eq!(res.generator_multiset(1), vec![(0, 1), (1, 1)]);
        assert_eq!(res.generator_multiset(2), vec![(0, 3), (2, 3)]);
        assert_eq!(res.generator_multiset(3), vec![(0, 4), (2, 5)]);
        res.check_exact().unwrap();
        res.check_minimal().unwrap();
        let o4 = res.syzygy(4).unwrap();
        let o2 = Arc::new(res.syzygy(2).unwrap().shift(3));
        assert!(matches!(graded_iso(&o4, &o2).unwrap(), IsoOutcome::Isomorphic(_)));
    }

    #[test]
    fn truncated_poly_degrees() {
        let a = truncated_poly(3);
        let k = Arc::new(GradedModule::trivial(a));
        let res = minimal_resolution(&k, 5).unwrap();
        let degs: Vec<i32> = (0..=5).map(|i| res.generators(i)[0].degree).collect();
        assert_eq!(degs, vec![0, 1, 3, 4, 6, 7]);
        assert!((0..=5).all(|i| res.generators(i).len() == 1));
        res.check_exact().unwrap();
    }

    #[test]
    fn projective_resolves_in_one_step() {
        let a = example();
        let p = Arc::new(GradedModule::projective(a, &[Generator::new(0, 0)]).unwrap());
        let res = minimal_resolution(&p, 3).unwrap();
        assert_eq!(res.generators(0).len(), 1);
        assert!((1..=3).all(|i| res.generators(i).is_empty()));
    }

    #[test]
    fn inflated_and_minimized_agree() {
        let a = example();
        let s1 = Arc::new(GradedModule::simple(a, 0).unwrap());
        let hi = 8;
        let min = minimal_resolution_to(&s1, 5, hi).unwrap();
        let infl = inflated_resolution_to(&s1, 5, hi).unwrap();
        infl.check_exact().unwrap();
        assert!(infl.check_minimal().is_err());
        assert_eq!(hom_complex_cohomology(&infl), hom_complex_cohomology(&min));
        let m = minimize(&infl).unwrap();
        m.check_exact().unwrap();
        for i in 0..5 {
            assert_eq!(m.generator_multiset(i), min.generator_multiset(i));
        }
    }

    #[test]
    fn horseshoe_unions() {
        let a = example();
        let s1 = Arc::new(GradedModule::simple(a.clone(), 0).unwrap());
        let p1 = Arc::new(GradedModule::projective(a, &[Generator::new(0, 0)]).unwrap());
        let m = Arc::new(GradedModule::direct_sum(&s1, &p1).unwrap());
        let hi = 8;
        let jm = m.radical();
        let top = m.quotient(&jm.map);
        let ra = minimal_resolution_to(&jm.module, 4, hi).unwrap();
        let rc = minimal_resolution_to(&top.module, 4, hi).unwrap();
        let rb = horseshoe(&jm.map, &top.map, &ra, &rc).unwrap();
        rb.check_exact().unwrap();
        for i in 0..=4 {
            let mut u = ra.generator_multiset(i);
            u.extend(rc.generator_multiset(i));
            u.sort();
            assert_eq!(rb.generator_multiset(i), u);
        }
    }

    #[test]
    fn lifting_identity_and_zero() {
        let a = example();
        let s1 = Arc::new(GradedModule::simple(a, 0).unwrap());
        let res = minimal_resolution(&s1, 3).unwrap();
        let id = GradedMap::identity(s1.clone());
        let cm = lift_module_map(&id, &res, &res, 3).unwrap();
        assert!(check_chain_map(&cm, &res, &res));
        for k in 0..=3 {
            for (g, img) in cm.components[k].iter().enumerate() {
                let gen = res.generators(k)[g];
                assert_eq!(img, &vec![(res.term(k).generator_index(g), 1)], "level {k} gen {gen:?}");
            }
        }
        let z = GradedMap::zero(s1.clone(), s1.clone());
        let cz = lift_module_map(&z, &res, &res, 3).unwrap();
        assert!(cz.components.iter().flatten().all(|v| v.is_empty()));
    }
}
