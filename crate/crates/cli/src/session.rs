//! An instance file bound to a field: the algebra and its named modules.

use std::sync::Arc;

use dkoszul_core::algebra::{GradedAlgebra, PathAlgebraPresentation, Quiver};
use dkoszul_core::gmod::{Generator, GradedModule};
use dkoszul_core::resolve::ResolutionProvider;
use dkoszul_core::scalar::Field;

use crate::instance::{InstanceFile, ModuleSpec};
use crate::CliError;

pub struct Session<F: Field> {
    pub name: String,
    pub file: InstanceFile,
    pub algebra: Arc<GradedAlgebra<F>>,
}

impl<F: Field> Session<F> {
    /// Builds the algebra through degree `max_degree`.
    pub fn new(name: &str, file: InstanceFile, field: F, max_degree: usize) -> Result<Self, CliError> {
        let arrows: Vec<(&str, &str, &str)> = file
            .arrows
            .iter()
            .map(|a| (a.name.as_str(), a.source.as_str(), a.target.as_str()))
            .collect();
        let quiver = Quiver::new(&file.vertices.iter().map(String::as_str).collect::<Vec<_>>(), &arrows)
            .map_err(|e| CliError::Input(e.to_string()))?;
        let mut rels = Vec::new();
        for r in &file.relations {
            let mut terms = Vec::new();
            for (c, path) in r {
                let num = field.from_i64(c.num);
                let den = field
                    .inv(&field.from_i64(c.den))
                    .ok_or_else(|| CliError::Input(format!("coefficient {c} is undefined over {}", field.descriptor())))?;
                let idx = path
                    .iter()
                    .map(|n| quiver.arrow_index(n).expect("validated arrow"))
                    .collect();
                terms.push((field.mul(&num, &den), idx));
            }
            rels.push(terms);
        }
        let p = PathAlgebraPresentation::new(field, quiver, rels).map_err(|e| CliError::Input(e.to_string()))?;
        let algebra = Arc::new(GradedAlgebra::from_presentation(&p, max_degree));
        Ok(Session {
            name: name.to_string(),
            file,
            algebra,
        })
    }

    /// Degree the algebra must be stored through so that `module` can be
    /// known `span` degrees above its floor.
    pub fn degree_needed(file: &InstanceFile, module: &str, span: usize) -> usize {
        fn extra(file: &InstanceFile, name: &str, l: usize) -> usize {
            match file.module(name).map(|m| &m.spec) {
                Some(ModuleSpec::Projective(gens)) => {
                    let lo = gens.iter().map(|g| g.1).min().unwrap_or(0);
                    let hi = gens.iter().map(|g| g.1).max().unwrap_or(0);
                    (hi - lo) as usize
                }
                Some(ModuleSpec::Shift(x, _)) => extra(file, x, l),
                Some(ModuleSpec::RadicalPower(x, i)) => extra(file, x, l) + i,
                Some(ModuleSpec::Syzygy(x, i)) => extra(file, x, l) + i.div_ceil(2) * l,
                _ => 0,
            }
        }
        span + extra(file, module, file.relation_degree())
    }

    fn vertex(&self, name: &str) -> usize {
        self.file.vertices.iter().position(|v| v == name).expect("validated vertex")
    }

    /// The named module, known at least `span` degrees above its lowest
    /// nonzero degree (or completely).
    pub fn module(
        &self,
        p: &dyn ResolutionProvider<F>,
        name: &str,
        span: usize,
    ) -> Result<Arc<GradedModule<F>>, CliError> {
        if self.file.module(name).is_none() {
            let known: Vec<&str> = self.file.modules.iter().map(|m| m.name.as_str()).collect();
            return Err(CliError::Input(format!(
                "unknown module '{name}' (declared: {})",
                known.join(", ")
            )));
        }
        let guess = self.floor_guess(name) + span as i32;
        let m = self.build(p, name, guess)?;
        match m.support_floor() {
            Some(f) if !m.knows(f + span as i32) => self.build(p, name, f + span as i32),
            _ => Ok(m),
        }
    }

    fn floor_guess(&self, name: &str) -> i32 {
        match &self.file.module(name).expect("validated module").spec {
            ModuleSpec::Simple(_) | ModuleSpec::Trivial => 0,
            ModuleSpec::Projective(gens) => gens.iter().map(|g| g.1).min().unwrap_or(0),
            ModuleSpec::Shift(x, n) => self.floor_guess(x) + n,
            ModuleSpec::RadicalPower(x, i) => self.floor_guess(x) + *i as i32,
            ModuleSpec::Syzygy(x, i) => self.floor_guess(x) + *i as i32,
        }
    }

    /// Module with data through absolute degree `hi` where possible.
    fn build(&self, p: &dyn ResolutionProvider<F>, name: &str, hi: i32) -> Result<Arc<GradedModule<F>>, CliError> {
        let alg = self.algebra.clone();
        let spec = self.file.module(name).expect("validated module").spec.clone();
        let m = match spec {
            ModuleSpec::Simple(v) => Arc::new(GradedModule::simple(alg, self.vertex(&v)).map_err(CliError::engine)?),
            ModuleSpec::Trivial => Arc::new(GradedModule::trivial(alg)),
            ModuleSpec::Projective(gens) => {
                let gens: Vec<Generator> = gens.iter().map(|(v, d)| Generator::new(self.vertex(v), *d)).collect();
                Arc::new(GradedModule::projective(alg, &gens).map_err(CliError::engine)?)
            }
            ModuleSpec::Shift(x, n) => Arc::new(self.build(p, &x, hi - n)?.shift(n)),
            ModuleSpec::RadicalPower(x, i) => self.build(p, &x, hi)?.radical_power(i).module,
            ModuleSpec::Syzygy(x, i) => {
                let base = self.build(p, &x, hi)?;
                let top = if base.knows(hi) { hi } else { base.hi() };
                let res = p.resolve(&base, i, top).map_err(CliError::engine)?;
                res.syzygy(i).map_err(CliError::engine)?
            }
        };
        Ok(m)
    }
}
