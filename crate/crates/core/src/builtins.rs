//! Built-in instances: small quiver algebras spanning d-Koszul,
//! generalized-but-not-d-Koszul and quadratic cases.

use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::algebra::{AlgebraError, PathAlgebraPresentation, Quiver};
use crate::scalar::Field;

/// A built-in algebra: quiver data plus either explicit relations or a
/// radical power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Builtin {
    pub name: &'static str,
    pub summary: &'static str,
    /// Koszul parameter the instance is meant for.
    pub d: usize,
    /// Whether the algebra is expected to be d-Koszul.
    pub d_koszul: bool,
    pub vertices: Vec<&'static str>,
    pub arrows: Vec<(&'static str, &'static str, &'static str)>,
    pub relations: Relations,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Relations {
    /// Coefficient and arrow names in application order.
    Explicit(Vec<Vec<(i64, Vec<&'static str>)>>),
    /// All paths of this length.
    RadicalPower(usize),
}

impl Builtin {
    pub fn quiver(&self) -> Result<Quiver, AlgebraError> {
        Quiver::new(&self.vertices, &self.arrows)
    }

    pub fn presentation<F: Field>(&self, field: F) -> Result<PathAlgebraPresentation<F>, AlgebraError> {
        let q = self.quiver()?;
        match &self.relations {
            Relations::Explicit(rels) => PathAlgebraPresentation::from_names(field, q, rels),
            Relations::RadicalPower(n) => PathAlgebraPresentation::truncated(field, q, *n),
        }
    }

    /// Relations as explicit path lists, expanding a radical power.
    pub fn relation_lists(&self) -> Vec<Vec<(i64, Vec<String>)>> {
        match &self.relations {
            Relations::Explicit(rels) => rels
                .iter()
                .map(|r| r.iter().map(|(c, p)| (*c, p.iter().map(|s| String::from(*s)).collect())).collect())
                .collect(),
            Relations::RadicalPower(n) => {
                let q = self.quiver().expect("built-in quiver");
                q.paths(*n)
                    .into_iter()
                    .map(|p| vec![(1, p.iter().map(|&a| q.arrows()[a].name.clone()).collect())])
                    .collect()
            }
        }
    }
}

fn poly(d: usize, name: &'static str) -> Builtin {
    Builtin {
        name,
        summary: "one loop x with x^d = 0",
        d,
        d_koszul: true,
        vertices: vec!["0"],
        arrows: vec![("x", "0", "0")],
        relations: Relations::RadicalPower(d),
    }
}

pub fn builtins() -> Vec<Builtin> {
    vec![
        Builtin {
            name: "loop-chain",
            summary: "loop alpha at 1, beta: 1 -> 2, gamma: 2 -> 3; relations alpha^3, gamma.beta.alpha",
            d: 3,
            d_koszul: false,
            vertices: vec!["1", "2", "3"],
            arrows: vec![("alpha", "1", "1"), ("beta", "1", "2"), ("gamma", "2", "3")],
            relations: Relations::Explicit(vec![
                vec![(1, vec!["alpha", "alpha", "alpha"])],
                vec![(1, vec!["alpha", "beta", "gamma"])],
            ]),
        },
        poly(2, "poly-2"),
        poly(3, "poly-3"),
        poly(4, "poly-4"),
        poly(5, "poly-5"),
        Builtin {
            name: "two-loops-j3",
            summary: "one vertex, loops x and y, all paths of length 3 vanish",
            d: 3,
            d_koszul: true,
            vertices: vec!["0"],
            arrows: vec![("x", "0", "0"), ("y", "0", "0")],
            relations: Relations::RadicalPower(3),
        },
        Builtin {
            name: "three-cycle-j3",
            summary: "oriented 3-cycle a: 1 -> 2, b: 2 -> 3, c: 3 -> 1, all paths of length 3 vanish",
            d: 3,
            d_koszul: true,
            vertices: vec!["1", "2", "3"],
            arrows: vec![("a", "1", "2"), ("b", "2", "3"), ("c", "3", "1")],
            relations: Relations::RadicalPower(3),
        },
        Builtin {
            name: "kronecker-j3",
            summary: "two arrows p, q: 1 -> 2, all paths of length 3 vanish (hereditary)",
            d: 3,
            d_koszul: true,
            vertices: vec!["1", "2"],
            arrows: vec![("p", "1", "2"), ("q", "1", "2")],
            relations: Relations::RadicalPower(3),
        },
        Builtin {
            name: "commutative-xy",
            summary: "polynomial ring k[x,y]: loops x, y with xy = yx",
            d: 2,
            d_koszul: true,
            vertices: vec!["0"],
            arrows: vec![("x", "0", "0"), ("y", "0", "0")],
            relations: Relations::Explicit(vec![vec![(1, vec!["x", "y"]), (-1, vec!["y", "x"])]]),
        },
    ]
}

pub fn builtin(name: &str) -> Option<Builtin> {
    builtins().into_iter().find(|b| b.name == name)
}
