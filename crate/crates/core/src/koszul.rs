//! Degree templates and Koszul-type classifiers.
//!
//! `δ(2n) = nd`, `δ(2n+1) = nd + 1`; `Δ(2n) = {nd}`,
//! `Δ(2n+1) = {nd+1, …, nd+d−1}`. A module is d-Koszul when every `Q^i` of
//! its minimal resolution is generated in degree `δ(i)` and generalized
//! d-Koszul when generated in degrees from `Δ(i)`. All verdicts are bounded
//! by the homological bound `H` and the internal window `D`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::algebra::GradedAlgebra;
use crate::gmod::GradedModule;
use crate::resolve::{Resolution, ResolutionProvider, ResolveError};
use crate::scalar::{Field, FieldDescriptor};

pub fn delta(i: usize, d: usize) -> i32 {
    let n = (i / 2 * d) as i32;
    if i % 2 == 0 {
        n
    } else {
        n + 1
    }
}

/// `Δ(i)` in increasing order.
pub fn delta_set(i: usize, d: usize) -> Vec<i32> {
    let n = (i / 2 * d) as i32;
    if i % 2 == 0 {
        alloc::vec![n]
    } else {
        (n + 1..n + d as i32).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Property {
    DKoszul,
    GeneralizedDKoszul,
    KoszulLinear,
}

impl Property {
    pub fn name(self, d: usize) -> String {
        match self {
            Property::DKoszul => alloc::format!("{d}-koszul"),
            Property::GeneralizedDKoszul => alloc::format!("generalized-{d}-koszul"),
            Property::KoszulLinear => String::from("koszul-linear"),
        }
    }

    /// Whether `degree` is allowed for generators of `Q^i`, relative to
    /// the module's base degree.
    pub fn allows(self, i: usize, d: usize, degree: i32) -> bool {
        match self {
            Property::DKoszul => degree == delta(i, d),
            Property::GeneralizedDKoszul => delta_set(i, d).contains(&degree),
            Property::KoszulLinear => degree == i as i32,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    HoldsUpTo,
    Fails,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::HoldsUpTo => "holds-up-to",
            Verdict::Fails => "fails",
        })
    }
}

/// First generator outside the template: homological degree, vertex,
/// internal degree.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Witness {
    pub i: usize,
    pub vertex: usize,
    pub degree: i32,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KoszulCertificate {
    pub property: Property,
    pub d: usize,
    pub verdict: Verdict,
    pub h: usize,
    /// Internal window: degrees `base ..= base + window` were resolved.
    pub window: usize,
    pub base: i32,
    pub field: FieldDescriptor,
    pub witness: Option<Witness>,
    /// `multisets[i]`: sorted `(vertex, degree)` generators of `Q^i`.
    pub multisets: Vec<Vec<(usize, i32)>>,
}

impl KoszulCertificate {
    pub fn holds(&self) -> bool {
        self.verdict == Verdict::HoldsUpTo
    }
}

/// Internal window the classifiers resolve: `δ(H) + d`, or `H + 2` for the
/// linear test.
pub fn required_window(property: Property, d: usize, h: usize) -> usize {
    match property {
        Property::KoszulLinear => h + 2,
        _ => delta(h, d) as usize + d,
    }
}

/// Reads a verdict off a finished resolution. Degrees are taken relative to
/// `base`.
pub fn classify<F: Field>(res: &Resolution<F>, property: Property, d: usize, base: i32) -> KoszulCertificate {
    let h = res.length();
    let multisets: Vec<Vec<(usize, i32)>> = (0..=h).map(|i| res.generator_multiset(i)).collect();
    let mut witness = None;
    'outer: for (i, gens) in multisets.iter().enumerate() {
        let mut bad: Vec<(i32, usize)> = gens
            .iter()
            .filter(|(_, deg)| !property.allows(i, d, deg - base))
            .map(|&(v, deg)| (deg, v))
            .collect();
        bad.sort();
        if let Some(&(degree, vertex)) = bad.first() {
            witness = Some(Witness { i, vertex, degree });
            break 'outer;
        }
    }
    let (lo, hi) = res.window();
    KoszulCertificate {
        property,
        d,
        verdict: if witness.is_some() { Verdict::Fails } else { Verdict::HoldsUpTo },
        h,
        window: (hi - lo) as usize,
        base,
        field: res.field().descriptor(),
        witness,
        multisets,
    }
}

/// Restricts `m` to start at its support floor, so the window is spent
/// where the module lives.
fn rebase<F: Field>(m: &Arc<GradedModule<F>>) -> (Arc<GradedModule<F>>, i32) {
    match m.support_floor() {
        Some(s) if s > m.lo() => (Arc::new(m.with_window(s, m.hi())), s),
        Some(s) => (m.clone(), s),
        None => (m.clone(), m.lo()),
    }
}

/// Classifies `m` against `property`. Degrees are measured from the module's
/// least nonzero degree for the linear test, and absolutely otherwise.
pub fn certify<F: Field>(
    p: &dyn ResolutionProvider<F>,
    m: &Arc<GradedModule<F>>,
    property: Property,
    d: usize,
    h: usize,
) -> Result<KoszulCertificate, ResolveError> {
    certify_window(p, m, property, d, h, required_window(property, d, h))
}

/// [`certify`] with an explicit internal window.
pub fn certify_window<F: Field>(
    p: &dyn ResolutionProvider<F>,
    m: &Arc<GradedModule<F>>,
    property: Property,
    d: usize,
    h: usize,
    window: usize,
) -> Result<KoszulCertificate, ResolveError> {
    let (m, floor) = rebase(m);
    let res = p.resolve(&m, h, m.lo() + window as i32)?;
    let base = match property {
        Property::KoszulLinear => floor,
        _ => 0,
    };
    Ok(classify(&res, property, d, base))
}

pub fn is_d_koszul<F: Field>(
    p: &dyn ResolutionProvider<F>,
    m: &Arc<GradedModule<F>>,
    d: usize,
    h: usize,
) -> Result<KoszulCertificate, ResolveError> {
    certify(p, m, Property::DKoszul, d, h)
}

pub fn is_generalized_d_koszul<F: Field>(
    p: &dyn ResolutionProvider<F>,
    m: &Arc<GradedModule<F>>,
    d: usize,
    h: usize,
) -> Result<KoszulCertificate, ResolveError> {
    certify(p, m, Property::GeneralizedDKoszul, d, h)
}

pub fn is_d_koszul_algebra<F: Field>(
    p: &dyn ResolutionProvider<F>,
    a: &Arc<GradedAlgebra<F>>,
    d: usize,
    h: usize,
) -> Result<KoszulCertificate, ResolveError> {
    is_d_koszul(p, &Arc::new(GradedModule::trivial(a.clone())), d, h)
}

/// Linear-resolution test: `Q^i` generated in degree `i` above the module's
/// base degree.
pub fn is_koszul_module<F: Field>(
    p: &dyn ResolutionProvider<F>,
    m: &Arc<GradedModule<F>>,
    h: usize,
) -> Result<KoszulCertificate, ResolveError> {
    certify(p, m, Property::KoszulLinear, 2, h)
}

/// `(i, j) ↦ dim Ext^i(M, Λ_0)_j`, read off the generators of a minimal
/// resolution.
pub fn ext_concentration_table<F: Field>(res: &Resolution<F>) -> BTreeMap<(usize, i32), usize> {
    res.betti_table()
}

/// Whether every nonzero entry `(i, j)` of a table has `j = δ(i)`.
pub fn concentrated_on_delta(table: &BTreeMap<(usize, i32), usize>, d: usize) -> bool {
    table.keys().all(|&(i, j)| j == delta(i, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{PathAlgebraPresentation, Quiver};
    use crate::gmod::Generator;
    use crate::resolve::Direct;
    use crate::scalar::PrimeField;

    fn example(max: usize) -> Arc<GradedAlgebra<PrimeField>> {
        let q = Quiver::new(
            &["1", "2", "3"],
            &[("alpha", "1", "1"), ("beta", "1", "2"), ("gamma", "2", "3")],
        )
        .unwrap();
        let p = PathAlgebraPresentation::from_names(
            PrimeField::default(),
            q,
            &[
                alloc::vec![(1, alloc::vec!["alpha", "alpha", "alpha"])],
                alloc::vec![(1, alloc::vec!["alpha", "beta", "gamma"])],
            ],
        )
        .unwrap();
        Arc::new(GradedAlgebra::from_presentation(&p, max))
    }

    #[test]
    fn templates() {
        assert_eq!(delta(0, 3), 0);
        assert_eq!(delta(2, 3), 3);
        assert_eq!(delta(3, 3), 4);
        assert_eq!(delta(4, 3), 6);
        assert_eq!(delta_set(2, 3), alloc::vec![3]);
        assert_eq!(delta_set(3, 3), alloc::vec![4, 5]);
        assert_eq!(delta_set(5, 2), alloc::vec![5]);
        for d in 2..7 {
            for i in 0..12 {
                assert!(delta_set(i, d).contains(&delta(i, d)));
                assert!(delta_set(i, d).last() < delta_set(i + 1, d).first());
            }
        }
    }

    #[test]
    fn example_classification() {
        let a = example(20);
        let s1 = Arc::new(GradedModule::simple(a.clone(), 0).unwrap());
        let gen = is_generalized_d_koszul(&Direct, &s1, 3, 8).unwrap();
        assert!(gen.holds());
        let strict = is_d_koszul(&Direct, &s1, 3, 3).unwrap();
        assert_eq!(strict.witness, Some(Witness { i: 3, vertex: 2, degree: 5 }));
        let later = is_d_koszul(&Direct, &s1, 3, 6).unwrap();
        assert_eq!(later.witness, strict.witness);
        let shifted = Arc::new(s1.shift(1));
        let c = is_generalized_d_koszul(&Direct, &shifted, 3, 2).unwrap();
        assert_eq!(c.witness.map(|w| (w.i, w.degree)), Some((0, 1)));
        let s3 = Arc::new(GradedModule::simple(a.clone(), 2).unwrap());
        assert!(is_d_koszul(&Direct, &s3, 3, 6).unwrap().holds());
        assert!(!is_d_koszul_algebra(&Direct, &a, 3, 4).unwrap().holds());
    }

    #[test]
    fn projective_always_holds() {
        let a = example(20);
        let p = Arc::new(GradedModule::projective(a, &[Generator::new(0, 0), Generator::new(1, 0)]).unwrap());
        for d in 2..5 {
            assert!(is_d_koszul(&Direct, &p, d, 4).unwrap().holds());
        }
    }

    #[test]
    fn linear_test() {
        let q = Quiver::new(&["0"], &[("x", "0", "0"), ("y", "0", "0")]).unwrap();
        let p = PathAlgebraPresentation::from_names(
            PrimeField::default(),
            q,
            &[alloc::vec![(1, alloc::vec!["x", "y"]), (-1, alloc::vec!["y", "x"])]],
        )
        .unwrap();
        let a = Arc::new(GradedAlgebra::from_presentation(&p, 8));
        let k = Arc::new(GradedModule::trivial(a));
        let c = is_koszul_module(&Direct, &k, 3).unwrap();
        assert!(c.holds());
        let counts: Vec<usize> = c.multisets.iter().map(|m| m.len()).collect();
        assert_eq!(counts, alloc::vec![1, 2, 1, 0]);

        let q = Quiver::new(&["0"], &[("x", "0", "0")]).unwrap();
        let a = Arc::new(GradedAlgebra::truncated(PrimeField::default(), q, 3, 8).unwrap());
        let k = Arc::new(GradedModule::trivial(a));
        let c = is_koszul_module(&Direct, &k, 2).unwrap();
        assert_eq!(c.witness.map(|w| (w.i, w.degree)), Some((2, 3)));
    }
}
