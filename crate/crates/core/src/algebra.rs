//! Truncated standardly graded algebras `kQ/I` and algebras given by
//! structure constants.
//!
//! Paths are lists of arrow indices in application order: the first arrow
//! applied comes first. A product `x·y` means "x after y", so the path of
//! `x·y` is `path(y) ++ path(x)` and is nonzero only when `source(x) =
//! target(y)`.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::scalar::{Field, Matrix, ScalarError};

/// Sparse vector: `(basis index, coefficient)` pairs, indices increasing.
pub type SparseVec<E> = Vec<(usize, E)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("duplicate vertex name {0:?}")]
    DuplicateVertex(String),
    #[error("duplicate arrow name {0:?}")]
    DuplicateArrow(String),
    #[error("unknown vertex {0:?}")]
    UnknownVertex(String),
    #[error("unknown arrow {0:?}")]
    UnknownArrow(String),
    #[error("quiver has no vertices")]
    NoVertices,
    #[error("relation {relation}: term {term} is not a composable path")]
    NonComposable { relation: usize, term: usize },
    #[error("relation {relation}: inhomogeneous relation (paths of lengths {a} and {b})")]
    Inhomogeneous { relation: usize, a: usize, b: usize },
    #[error("relation {relation}: paths are not parallel")]
    NonParallel { relation: usize },
    #[error("relation {relation}: paths must have length at least 2")]
    TooShort { relation: usize },
    #[error("truncated path algebra needs d >= 2, got {0}")]
    BadPower(usize),
    #[error("structure constants: {0}")]
    Shape(String),
    #[error("vertex compatibility fails at degrees ({i},{j})")]
    VertexMismatch { i: usize, j: usize },
    #[error("associativity fails at degrees ({i},{j},{k})")]
    Associativity { i: usize, j: usize, k: usize },
    #[error("condition (iii) fails at ({i},{j})")]
    NotGenerated { i: usize, j: usize },
    #[error(transparent)]
    Scalar(#[from] ScalarError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub source: usize,
    pub target: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Quiver {
    vertices: Vec<String>,
    arrows: Vec<Arrow>,
}

impl Quiver {
    /// `arrows` are `(name, source name, target name)`.
    pub fn new<S: AsRef<str>>(vertices: &[S], arrows: &[(S, S, S)]) -> Result<Self, AlgebraError> {
        let vertices: Vec<String> = vertices.iter().map(|v| String::from(v.as_ref())).collect();
        if vertices.is_empty() {
            return Err(AlgebraError::NoVertices);
        }
        for (i, v) in vertices.iter().enumerate() {
            if vertices[..i].contains(v) {
                return Err(AlgebraError::DuplicateVertex(v.clone()));
            }
        }
        let lookup = |name: &str| {
            vertices
                .iter()
                .position(|v| v == name)
                .ok_or_else(|| AlgebraError::UnknownVertex(String::from(name)))
        };
        let mut out: Vec<Arrow> = Vec::with_capacity(arrows.len());
        for (name, s, t) in arrows {
            let name = String::from(name.as_ref());
            if out.iter().any(|a| a.name == name) {
                return Err(AlgebraError::DuplicateArrow(name));
            }
            out.push(Arrow {
                source: lookup(s.as_ref())?,
                target: lookup(t.as_ref())?,
                name,
            });
        }
        Ok(Quiver {
            vertices,
            arrows: out,
        })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }
    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }
    pub fn vertex_index(&self, name: &str) -> Option<usize> {
        self.vertices.iter().position(|v| v == name)
    }
    pub fn arrow_index(&self, name: &str) -> Option<usize> {
        self.arrows.iter().position(|a| a.name == name)
    }

    /// Source and target of a nonempty path, or `None` if it does not compose.
    pub fn path_endpoints(&self, path: &[usize]) -> Option<(usize, usize)> {
        let first = self.arrows.get(*path.first()?)?;
        let mut at = first.target;
        for &a in &path[1..] {
            let arrow = self.arrows.get(a)?;
            if arrow.source != at {
                return None;
            }
            at = arrow.target;
        }
        Some((first.source, at))
    }

    /// Every path of length `n >= 1`, in lexicographic order of arrow indices.
    pub fn paths(&self, n: usize) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = (0..self.arrows.len()).map(|a| vec![a]).collect();
        for _ in 1..n {
            let mut next = Vec::new();
            for p in &out {
                let at = self.arrows[*p.last().unwrap()].target;
                for (b, arrow) in self.arrows.iter().enumerate() {
                    if arrow.source == at {
                        let mut q = p.clone();
                        q.push(b);
                        next.push(q);
                    }
                }
            }
            out = next;
        }
        if n == 0 {
            Vec::new()
        } else {
            out
        }
    }

    pub fn path_name(&self, path: &[usize]) -> String {
        let names: Vec<&str> = path.iter().map(|&a| self.arrows[a].name.as_str()).collect();
        names.join(".")
    }
}

/// A homogeneous relation: coefficients on parallel paths of one length.
#[derive(Clone, Debug, PartialEq)]
pub struct Relation<F: Field> {
    pub terms: Vec<(F::Elem, Vec<usize>)>,
}

impl<F: Field> Relation<F> {
    pub fn len(&self) -> usize {
        self.terms.first().map_or(0, |t| t.1.len())
    }
    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PathAlgebraPresentation<F: Field> {
    pub field: F,
    pub quiver: Quiver,
    pub relations: Vec<Relation<F>>,
}

impl<F: Field> PathAlgebraPresentation<F> {
    /// Validates homogeneity, composability and parallelism. Repeated paths
    /// in a relation are merged and zero terms dropped; a relation that
    /// becomes empty is discarded.
    pub fn new(
        field: F,
        quiver: Quiver,
        relations: Vec<Vec<(F::Elem, Vec<usize>)>>,
    ) -> Result<Self, AlgebraError> {
        let mut out = Vec::new();
        for (ri, terms) in relations.into_iter().enumerate() {
            let mut ends = None;
            let mut len = None;
            for (ti, (_, path)) in terms.iter().enumerate() {
                let e = quiver
                    .path_endpoints(path)
                    .ok_or(AlgebraError::NonComposable { relation: ri, term: ti })?;
                match len {
                    None => len = Some(path.len()),
                    Some(l) if l != path.len() => {
                        return Err(AlgebraError::Inhomogeneous {
                            relation: ri,
                            a: l,
                            b: path.len(),
                        })
                    }
                    _ => {}
                }
                match ends {
                    None => ends = Some(e),
                    Some(x) if x != e => return Err(AlgebraError::NonParallel { relation: ri }),
                    _ => {}
                }
            }
            if len.is_some_and(|l| l < 2) {
                return Err(AlgebraError::TooShort { relation: ri });
            }
            let mut merged: BTreeMap<Vec<usize>, F::Elem> = BTreeMap::new();
            for (c, p) in terms {
                let slot = merged.entry(p).or_insert_with(|| field.zero());
                *slot = field.add(slot, &c);
            }
            let terms: Vec<_> = merged
                .into_iter()
                .filter(|(_, c)| !field.is_zero(c))
                .map(|(p, c)| (c, p))
                .collect();
            if !terms.is_empty() {
                out.push(Relation { terms });
            }
        }
        Ok(PathAlgebraPresentation {
            field,
            quiver,
            relations: out,
        })
    }

    /// Relations given with arrow names.
    pub fn from_names(
        field: F,
        quiver: Quiver,
        relations: &[Vec<(i64, Vec<&str>)>],
    ) -> Result<Self, AlgebraError> {
        let mut rels = Vec::new();
        for r in relations {
            let mut terms = Vec::new();
            for (c, names) in r {
                let path = names
                    .iter()
                    .map(|n| {
                        quiver
                            .arrow_index(n)
                            .ok_or_else(|| AlgebraError::UnknownArrow(String::from(*n)))
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                terms.push((field.from_i64(*c), path));
            }
            rels.push(terms);
        }
        Self::new(field, quiver, rels)
    }

    /// All paths of length `d`.
    pub fn truncated(field: F, quiver: Quiver, d: usize) -> Result<Self, AlgebraError> {
        if d < 2 {
            return Err(AlgebraError::BadPower(d));
        }
        let rels = quiver
            .paths(d)
            .into_iter()
            .map(|p| vec![(field.one(), p)])
            .collect();
        Self::new(field, quiver, rels)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BasisElement {
    pub source: usize,
    pub target: usize,
    pub label: String,
    /// Normal-form path for path algebras.
    pub path: Option<Vec<usize>>,
}

/// Input for [`GradedAlgebra::from_structure_constants`]. Degree-0 basis
/// elements are the vertex idempotents and are not listed; products with a
/// degree-0 factor follow from sources and targets.
#[derive(Clone, Debug, PartialEq)]
pub struct StructureConstants<F: Field> {
    pub field: F,
    pub vertices: Vec<String>,
    /// `basis[n-1]` lists the basis of degree `n >= 1`.
    pub basis: Vec<Vec<BasisElement>>,
    /// `products[(i, j)][x * dim_j + y]` = `x·y` for `i, j >= 1`, `i + j <= D`.
    pub products: BTreeMap<(usize, usize), Vec<SparseVec<F::Elem>>>,
}

/// Pass/fail of the three defining conditions, with the first failing pair
/// for condition (iii).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StandardReport {
    pub degree_zero_semisimple: bool,
    pub finite_dimensional: bool,
    pub generated_in_degree_one: Result<(), (usize, usize)>,
}

impl StandardReport {
    pub fn passes(&self) -> bool {
        self.degree_zero_semisimple && self.finite_dimensional && self.generated_in_degree_one.is_ok()
    }
}

/// A standardly graded algebra stored through degree `D`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradedAlgebra<F: Field> {
    field: F,
    vertices: Vec<String>,
    max_degree: usize,
    basis: Vec<Vec<BasisElement>>,
    /// `[n][source * r + target]` -> basis indices of `A_n` in that block.
    blocks: Vec<Vec<Vec<usize>>>,
    position: Vec<Vec<usize>>,
    /// `[n][v]` -> basis indices of `A_n e_v`.
    sources: Vec<Vec<Vec<usize>>>,
    source_pos: Vec<Vec<usize>>,
    products: Vec<Vec<Vec<SparseVec<F::Elem>>>>,
    /// `[n][x]` -> terms `(c, a, y)` with `x = Σ c·a·y`, `a ∈ A_1`, `y ∈ A_{n-1}`.
    factors: Vec<Vec<Vec<(F::Elem, usize, usize)>>>,
    presentation: Option<PathAlgebraPresentation<F>>,
}

fn deglex_desc(a: &[usize], b: &[usize]) -> Ordering {
    b.len().cmp(&a.len()).then_with(|| b.cmp(a))
}

impl<F: Field> GradedAlgebra<F> {
    /// Builds `kQ/I` through degree `max_degree` one degree at a time:
    /// `A_n` is `A_{n-1} ⊗ arrows` modulo the relations ending in the last
    /// position. Normal forms are the paths that are not leading terms in
    /// descending deglex order.
    pub fn from_presentation(p: &PathAlgebraPresentation<F>, max_degree: usize) -> Self {
        let f = &p.field;
        let q = &p.quiver;
        let mut basis: Vec<Vec<BasisElement>> = vec![q
            .vertices
            .iter()
            .enumerate()
            .map(|(v, name)| BasisElement {
                source: v,
                target: v,
                label: format!("e_{name}"),
                path: Some(Vec::new()),
            })
            .collect()];
        // right[n][(z, a)] = a·z in A_n for z ∈ A_{n-1}
        let mut right: Vec<BTreeMap<(usize, usize), SparseVec<F::Elem>>> = vec![BTreeMap::new()];

        for n in 1..=max_degree {
            let prev = &basis[n - 1];
            let mut cands: Vec<(usize, usize, Vec<usize>)> = Vec::new();
            for (z, bz) in prev.iter().enumerate() {
                for (a, arrow) in q.arrows.iter().enumerate() {
                    if arrow.source == bz.target {
                        let mut path = bz.path.clone().unwrap();
                        path.push(a);
                        cands.push((z, a, path));
                    }
                }
            }
            cands.sort_by(|x, y| deglex_desc(&x.2, &y.2));
            let col_of: BTreeMap<(usize, usize), usize> = cands
                .iter()
                .enumerate()
                .map(|(i, c)| ((c.0, c.1), i))
                .collect();

            let mut rows: Vec<Vec<F::Elem>> = Vec::new();
            for rel in &p.relations {
                let len = rel.len();
                if len > n {
                    continue;
                }
                let (src, _) = q.path_endpoints(&rel.terms[0].1).unwrap();
                for (u, bu) in basis[n - len].iter().enumerate() {
                    if bu.target != src {
                        continue;
                    }
                    let mut row = f.zeros(cands.len());
                    for (c, path) in &rel.terms {
                        let mut v: SparseVec<F::Elem> = vec![(u, f.one())];
                        for (step, &b) in path[..len - 1].iter().enumerate() {
                            v = extend_sparse(f, &right[n - len + step + 1], &v, b);
                        }
                        let last = path[len - 1];
                        for (z, x) in v {
                            let col = col_of[&(z, last)];
                            row[col] = f.add(&row[col], &f.mul(c, &x));
                        }
                    }
                    if !f.is_zero_vec(&row) {
                        rows.push(row);
                    }
                }
            }

            let (pivots, reduced) = if rows.is_empty() {
                (Vec::new(), Matrix::zeros(f, 0, cands.len()))
            } else {
                let rr = Matrix::from_rows(f, rows).unwrap().rref();
                (rr.pivots, rr.reduced)
            };
            let mut is_pivot = vec![false; cands.len()];
            for &c in &pivots {
                is_pivot[c] = true;
            }
            // basis in ascending deglex: reverse of the column order
            let free: Vec<usize> = (0..cands.len()).rev().filter(|&c| !is_pivot[c]).collect();
            let mut basis_of_col = vec![usize::MAX; cands.len()];
            for (bi, &c) in free.iter().enumerate() {
                basis_of_col[c] = bi;
            }
            let mut ext = BTreeMap::new();
            for (c, cand) in cands.iter().enumerate() {
                let v = if !is_pivot[c] {
                    vec![(basis_of_col[c], f.one())]
                } else {
                    let row = pivots.iter().position(|&p| p == c).unwrap();
                    let mut v: SparseVec<F::Elem> = reduced
                        .row(row)
                        .iter()
                        .enumerate()
                        .filter(|(j, x)| *j != c && !f.is_zero(x))
                        .map(|(j, x)| (basis_of_col[j], f.neg(x)))
                        .collect();
                    v.sort_by_key(|e| e.0);
                    v
                };
                ext.insert((cand.0, cand.1), v);
            }
            let level: Vec<BasisElement> = free
                .iter()
                .map(|&c| {
                    let path = cands[c].2.clone();
                    let (s, t) = q.path_endpoints(&path).unwrap();
                    BasisElement {
                        source: s,
                        target: t,
                        label: q.path_name(&path),
                        path: Some(path),
                    }
                })
                .collect();
            basis.push(level);
            right.push(ext);
        }

        // products: x·y = red(path(y) ++ path(x))
        let mut products = Vec::with_capacity(max_degree + 1);
        for i in 0..=max_degree {
            let mut row = Vec::with_capacity(max_degree + 1 - i);
            for j in 0..=max_degree - i {
                let mut table = Vec::with_capacity(basis[i].len() * basis[j].len());
                for bx in &basis[i] {
                    for (y, by) in basis[j].iter().enumerate() {
                        if i == 0 {
                            table.push(if by.target == bx.source {
                                vec![(y, f.one())]
                            } else {
                                Vec::new()
                            });
                            continue;
                        }
                        if bx.source != by.target {
                            table.push(Vec::new());
                            continue;
                        }
                        let mut v: SparseVec<F::Elem> = vec![(y, f.one())];
                        for (step, &a) in bx.path.as_ref().unwrap().iter().enumerate() {
                            v = extend_sparse(f, &right[j + step + 1], &v, a);
                        }
                        table.push(v);
                    }
                }
                row.push(table);
            }
            products.push(row);
        }

        let mut factors = vec![Vec::new()];
        for n in 1..=max_degree {
            let level = basis[n]
                .iter()
                .map(|b| {
                    let path = b.path.as_ref().unwrap();
                    let a = *path.last().unwrap();
                    let prefix = &path[..n - 1];
                    let y = basis[n - 1]
                        .iter()
                        .position(|c| c.path.as_deref() == Some(prefix))
                        .unwrap();
                    vec![(f.one(), a, y)]
                })
                .collect();
            factors.push(level);
        }

        let mut alg = GradedAlgebra {
            field: f.clone(),
            vertices: q.vertices.clone(),
            max_degree,
            basis,
            blocks: Vec::new(),
            position: Vec::new(),
            sources: Vec::new(),
            source_pos: Vec::new(),
            products,
            factors,
            presentation: Some(p.clone()),
        };
        alg.index_blocks();
        alg
    }

    /// `kQ/J^d`: all paths of length `d` are relations.
    pub fn truncated(field: F, quiver: Quiver, d: usize, max_degree: usize) -> Result<Self, AlgebraError> {
        let p = PathAlgebraPresentation::truncated(field, quiver, d)?;
        Ok(Self::from_presentation(&p, max_degree))
    }

    /// Validates and ingests structure constants. Fails on the first
    /// violated invariant, naming the offending degrees.
    pub fn from_structure_constants(sc: StructureConstants<F>) -> Result<Self, AlgebraError> {
        let alg = Self::assemble(sc)?;
        alg.check_vertices()?;
        alg.check_associativity()?;
        if let Err((i, j)) = alg.standard_report().generated_in_degree_one {
            return Err(AlgebraError::NotGenerated { i, j });
        }
        Ok(alg)
    }

    /// Structure constants checked only for shape; used to report on tables
    /// that may fail condition (iii).
    pub fn standard_report_for(sc: StructureConstants<F>) -> Result<StandardReport, AlgebraError> {
        Ok(Self::assemble(sc)?.standard_report())
    }

    fn assemble(sc: StructureConstants<F>) -> Result<Self, AlgebraError> {
        let f = sc.field;
        let r = sc.vertices.len();
        if r == 0 {
            return Err(AlgebraError::NoVertices);
        }
        let max_degree = sc.basis.len();
        let mut basis = vec![sc
            .vertices
            .iter()
            .enumerate()
            .map(|(v, name)| BasisElement {
                source: v,
                target: v,
                label: format!("e_{name}"),
                path: None,
            })
            .collect::<Vec<_>>()];
        basis.extend(sc.basis);
        for level in &basis {
            if level.iter().any(|b| b.source >= r || b.target >= r) {
                return Err(AlgebraError::Shape(String::from("basis element with unknown vertex")));
            }
        }
        let mut products = Vec::new();
        for i in 0..=max_degree {
            let mut row = Vec::new();
            for j in 0..=max_degree - i {
                let (di, dj) = (basis[i].len(), basis[j].len());
                let table = if i == 0 || j == 0 {
                    let mut t = Vec::with_capacity(di * dj);
                    for (x, bx) in basis[i].iter().enumerate() {
                        for (y, by) in basis[j].iter().enumerate() {
                            let v = if i == 0 {
                                (by.target == bx.source).then(|| vec![(y, f.one())])
                            } else {
                                (by.target == bx.source).then(|| vec![(x, f.one())])
                            };
                            t.push(v.unwrap_or_default());
                        }
                    }
                    t
                } else {
                    let t = sc.products.get(&(i, j)).cloned().ok_or_else(|| {
                        AlgebraError::Shape(format!("missing product table ({i},{j})"))
                    })?;
                    if t.len() != di * dj {
                        return Err(AlgebraError::Shape(format!("product table ({i},{j}) has wrong size")));
                    }
                    let dk = basis[i + j].len();
                    if t.iter().flatten().any(|(k, _)| *k >= dk) {
                        return Err(AlgebraError::Shape(format!("product table ({i},{j}) index out of range")));
                    }
                    t
                };
                row.push(table);
            }
            products.push(row);
        }
        let mut alg = GradedAlgebra {
            field: f,
            vertices: sc.vertices,
            max_degree,
            basis,
            blocks: Vec::new(),
            position: Vec::new(),
            sources: Vec::new(),
            source_pos: Vec::new(),
            products,
            factors: Vec::new(),
            presentation: None,
        };
        alg.index_blocks();
        alg.factors = alg.compute_factors();
        Ok(alg)
    }

    fn index_blocks(&mut self) {
        let r = self.vertices.len();
        self.blocks.clear();
        self.position.clear();
        self.sources.clear();
        self.source_pos.clear();
        for level in &self.basis {
            let mut by_source = vec![Vec::new(); r];
            let mut spos = Vec::with_capacity(level.len());
            for (x, b) in level.iter().enumerate() {
                spos.push(by_source[b.source].len());
                by_source[b.source].push(x);
            }
            self.sources.push(by_source);
            self.source_pos.push(spos);
            let mut blocks = vec![Vec::new(); r * r];
            let mut pos = Vec::with_capacity(level.len());
            for (x, b) in level.iter().enumerate() {
                let blk = &mut blocks[b.source * r + b.target];
                pos.push(blk.len());
                blk.push(x);
            }
            self.blocks.push(blocks);
            self.position.push(pos);
        }
    }

    /// Expresses each basis element of degree `n >= 2` through `A_1·A_{n-1}`
    /// when possible; elements that are not reachable get no terms.
    fn compute_factors(&self) -> Vec<Vec<Vec<(F::Elem, usize, usize)>>> {
        let f = &self.field;
        let mut out = vec![Vec::new()];
        for n in 1..=self.max_degree {
            let dn = self.dim(n);
            if n == 1 {
                out.push((0..dn).map(|x| vec![(f.one(), x, self.basis[1][x].source)]).collect());
                continue;
            }
            let (d1, dp) = (self.dim(1), self.dim(n - 1));
            let mut pairs = Vec::new();
            let mut cols = Vec::new();
            for a in 0..d1 {
                for y in 0..dp {
                    let prod = &self.products[1][n - 1][a * dp + y];
                    if !prod.is_empty() {
                        pairs.push((a, y));
                        cols.push(densify(f, prod, dn));
                    }
                }
            }
            let m = Matrix::from_columns(f, dn, &cols);
            let level = (0..dn)
                .map(|x| {
                    let mut e = f.zeros(dn);
                    e[x] = f.one();
                    match crate::scalar::solve_vec(&m, &e) {
                        Ok(Some(sol)) => sol
                            .into_iter()
                            .enumerate()
                            .filter(|(_, c)| !f.is_zero(c))
                            .map(|(k, c)| (c, pairs[k].0, pairs[k].1))
                            .collect(),
                        _ => Vec::new(),
                    }
                })
                .collect();
            out.push(level);
        }
        out
    }

    fn check_vertices(&self) -> Result<(), AlgebraError> {
        for i in 1..=self.max_degree {
            for j in 1..=self.max_degree - i {
                let dj = self.dim(j);
                for (x, bx) in self.basis[i].iter().enumerate() {
                    for (y, by) in self.basis[j].iter().enumerate() {
                        for (z, _) in &self.products[i][j][x * dj + y] {
                            let bz = &self.basis[i + j][*z];
                            if bx.source != by.target || bz.source != by.source || bz.target != bx.target {
                                return Err(AlgebraError::VertexMismatch { i, j });
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn check_associativity(&self) -> Result<(), AlgebraError> {
        let f = &self.field;
        let top = self.max_degree;
        for i in 1..=top {
            for j in 1..=top - i {
                for k in 1..=top - i - j {
                    for x in 0..self.dim(i) {
                        for y in 0..self.dim(j) {
                            let xy = self.mul(i, x, j, y);
                            for z in 0..self.dim(k) {
                                let yz = self.mul(j, y, k, z);
                                let left = self.mul_sparse(i + j, xy, k, &[(z, f.one())]);
                                let right = self.mul_sparse(i, &[(x, f.one())], j + k, yz);
                                if left != right {
                                    return Err(AlgebraError::Associativity { i, j, k });
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Conditions (i)–(iii) for all `i + j <= D`.
    pub fn standard_report(&self) -> StandardReport {
        let f = &self.field;
        let r = self.vertices.len();
        let zero_ok = r >= 1
            && self.basis[0].len() == r
            && self.basis[0].iter().enumerate().all(|(v, b)| b.source == v && b.target == v);
        let mut gen = Ok(());
        'outer: for n in 2..=self.max_degree {
            for i in 1..n {
                let j = n - i;
                let dn = self.dim(n);
                let cols: Vec<Vec<F::Elem>> = self.products[i][j]
                    .iter()
                    .filter(|p| !p.is_empty())
                    .map(|p| densify(f, p, dn))
                    .collect();
                if Matrix::from_columns(f, dn, &cols).rank() < dn {
                    gen = Err((i, j));
                    break 'outer;
                }
            }
        }
        StandardReport {
            degree_zero_semisimple: zero_ok,
            finite_dimensional: true,
            generated_in_degree_one: gen,
        }
    }

    pub fn field(&self) -> &F {
        &self.field
    }
    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }
    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }
    pub fn max_degree(&self) -> usize {
        self.max_degree
    }
    pub fn presentation(&self) -> Option<&PathAlgebraPresentation<F>> {
        self.presentation.as_ref()
    }

    /// Same presentation, different truncation. `None` for algebras built
    /// from structure constants.
    pub fn with_max_degree(&self, max_degree: usize) -> Option<Self> {
        self.presentation.as_ref().map(|p| Self::from_presentation(p, max_degree))
    }

    /// Least stored degree whose component vanishes; every later degree
    /// vanishes too.
    pub fn vanishing_degree(&self) -> Option<usize> {
        (1..=self.max_degree).find(|&n| self.basis[n].is_empty())
    }

    /// Whether `A_n` is known, either stored or forced to vanish.
    pub fn knows_degree(&self, n: usize) -> bool {
        n <= self.max_degree || self.vanishing_degree().is_some()
    }

    pub fn dim(&self, n: usize) -> usize {
        self.basis.get(n).map_or(0, Vec::len)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis.iter().map(Vec::len).collect()
    }

    pub fn basis(&self, n: usize) -> &[BasisElement] {
        self.basis.get(n).map_or(&[], Vec::as_slice)
    }

    /// Basis indices of `e_target A_n e_source`.
    pub fn block(&self, n: usize, source: usize, target: usize) -> &[usize] {
        let r = self.vertices.len();
        self.blocks
            .get(n)
            .map_or(&[], |b| b[source * r + target].as_slice())
    }

    /// Basis indices of `A_n e_v`, the degree-`n` paths leaving `v`.
    pub fn from_source(&self, n: usize, v: usize) -> &[usize] {
        self.sources.get(n).map_or(&[], |s| s[v].as_slice())
    }

    /// Position of `x ∈ A_n` inside [`Self::from_source`] of its source.
    pub fn source_position(&self, n: usize, x: usize) -> usize {
        self.source_pos[n][x]
    }

    /// Position of basis element `x` of `A_n` inside its block.
    pub fn position(&self, n: usize, x: usize) -> usize {
        self.position[n][x]
    }

    /// `x·y` for basis elements `x ∈ A_i`, `y ∈ A_j`; empty beyond `D`.
    pub fn mul(&self, i: usize, x: usize, j: usize, y: usize) -> &[(usize, F::Elem)] {
        if i + j > self.max_degree {
            return &[];
        }
        &self.products[i][j][x * self.dim(j) + y]
    }

    pub fn mul_sparse(
        &self,
        i: usize,
        x: &[(usize, F::Elem)],
        j: usize,
        y: &[(usize, F::Elem)],
    ) -> SparseVec<F::Elem> {
        let f = &self.field;
        let mut acc: BTreeMap<usize, F::Elem> = BTreeMap::new();
        for (xi, cx) in x {
            for (yi, cy) in y {
                let c = f.mul(cx, cy);
                for (z, cz) in self.mul(i, *xi, j, *yi) {
                    let slot = acc.entry(*z).or_insert_with(|| f.zero());
                    *slot = f.add(slot, &f.mul(&c, cz));
                }
            }
        }
        acc.into_iter().filter(|(_, c)| !f.is_zero(c)).collect()
    }

    /// Dense multiplication table `A_i × A_j → A_{i+j}`, one column per pair
    /// `x * dim_j + y`.
    pub fn mult_matrix(&self, i: usize, j: usize) -> Matrix<F> {
        let dn = self.dim(i + j);
        let cols: Vec<Vec<F::Elem>> = (0..self.dim(i) * self.dim(j))
            .map(|k| {
                let (x, y) = (k / self.dim(j).max(1), k % self.dim(j).max(1));
                densify(&self.field, self.mul(i, x, j, y), dn)
            })
            .collect();
        Matrix::from_columns(&self.field, dn, &cols)
    }

    /// `x = Σ c·a·y` with `a ∈ A_1`, `y ∈ A_{n-1}`.
    pub fn factor(&self, n: usize, x: usize) -> &[(F::Elem, usize, usize)] {
        &self.factors[n][x]
    }

    /// Per-degree dimensions of the block `e_target A e_source`.
    pub fn block_dims(&self, source: usize, target: usize) -> Vec<usize> {
        (0..=self.max_degree).map(|n| self.block(n, source, target).len()).collect()
    }

    /// Dimensions of `A e_v`, the paths starting at `v`.
    pub fn projective_dims(&self, v: usize) -> Vec<usize> {
        (0..=self.max_degree)
            .map(|n| self.basis[n].iter().filter(|b| b.source == v).count())
            .collect()
    }

    /// Canonical byte encoding for content hashing.
    pub fn encode(&self, out: &mut Vec<u8>) {
        let f = &self.field;
        let put = |out: &mut Vec<u8>, n: usize| out.extend_from_slice(&(n as u64).to_le_bytes());
        out.extend_from_slice(f.descriptor().to_string().as_bytes());
        put(out, self.vertices.len());
        put(out, self.max_degree);
        for level in &self.basis {
            put(out, level.len());
            for b in level {
                put(out, b.source);
                put(out, b.target);
            }
        }
        for row in &self.products {
            for table in row {
                for v in table {
                    put(out, v.len());
                    for (k, c) in v {
                        put(out, *k);
                        f.encode_elem(c, out);
                    }
                }
            }
        }
    }
}

fn extend_sparse<E: Clone, F: Field<Elem = E>>(
    f: &F,
    right: &BTreeMap<(usize, usize), SparseVec<E>>,
    v: &[(usize, E)],
    a: usize,
) -> SparseVec<E> {
    let mut acc: BTreeMap<usize, E> = BTreeMap::new();
    for (z, c) in v {
        if let Some(img) = right.get(&(*z, a)) {
            for (k, x) in img {
                let slot = acc.entry(*k).or_insert_with(|| f.zero());
                *slot = f.add(slot, &f.mul(c, x));
            }
        }
    }
    acc.into_iter().filter(|(_, c)| !f.is_zero(c)).collect()
}

pub fn densify<F: Field>(f: &F, v: &[(usize, F::Elem)], n: usize) -> Vec<F::Elem> {
    let mut out = f.zeros(n);
    for (k, c) in v {
        out[*k] = c.clone();
    }
    out
}

pub fn sparsify<F: Field>(f: &F, v: &[F::Elem]) -> SparseVec<F::Elem> {
    v.iter()
        .enumerate()
        .filter(|(_, c)| !f.is_zero(c))
        .map(|(k, c)| (k, c.clone()))
        .collect()
}
