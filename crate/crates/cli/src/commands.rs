use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use dkoszul_core::builtins::{builtin, builtins};
use dkoszul_core::ext::{build_ext_even_algebra, build_ext_module, Parity};
use dkoszul_core::gmod::{graded_iso, GradedModule, IsoOutcome};
use dkoszul_core::koszul::{
    certify_window, concentrated_on_delta, delta, required_window, KoszulCertificate, Property,
};
use dkoszul_core::resolve::{Direct, Resolution, ResolutionProvider};
use dkoszul_core::scalar::{Field, FieldDescriptor, PrimeField, Rationals};
use dkoszul_core::verify::{
    ext_table_oracle, verify, Budget, Claim, Instance, Outcome, Status, VerificationReport,
};

use crate::cache::Cache;
use crate::instance::{parse_instance, InstanceFile};
use crate::report::{Bounds, Report, Table, Verdict};
use crate::session::Session;
use crate::CliError;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    File(PathBuf),
    Builtin(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CacheMode {
    Off,
    Memory,
    Dir(PathBuf),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Options {
    /// `None` only for `selftest`.
    pub source: Option<Source>,
    pub field: Option<FieldDescriptor>,
    pub cache: CacheMode,
    /// Recompute every cache hit and compare.
    pub verify_cache: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    Resolve {
        module: String,
        homdeg: usize,
        degbound: Option<usize>,
        d: Option<usize>,
    },
    Check {
        module: String,
        d: usize,
        generalized: bool,
        homdeg: usize,
        degbound: Option<usize>,
    },
    Ext {
        module: String,
        parity: Parity,
        grades: usize,
        degbound: Option<usize>,
        d: Option<usize>,
    },
    Verify {
        /// `None` runs every claim.
        claim: Option<Claim>,
        module: String,
        d: Option<usize>,
        effort: usize,
        homdeg: Option<usize>,
        degbound: Option<usize>,
    },
    Selftest {
        effort: usize,
    },
    Show,
}

struct Loaded {
    name: String,
    file: InstanceFile,
    /// Koszul parameter the instance declares or implies.
    d: usize,
}

fn load(source: &Source) -> Result<Loaded, CliError> {
    match source {
        Source::Builtin(name) => {
            let b = builtin(name).ok_or_else(|| {
                let names: Vec<&str> = builtins().iter().map(|b| b.name).collect();
                CliError::Input(format!("unknown built-in '{name}' (available: {})", names.join(", ")))
            })?;
            Ok(Loaded {
                name: b.name.to_string(),
                file: InstanceFile::from_builtin(&b),
                d: b.d,
            })
        }
        Source::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let file = parse_instance(&text).map_err(CliError::Parse)?;
            let name = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| path.display().to_string());
            let d = file.relation_degree();
            Ok(Loaded { name, file, d })
        }
    }
}

/// Canonical text of the selected instance.
pub fn show_instance(opts: &Options) -> Result<String, CliError> {
    let source = opts
        .source
        .as_ref()
        .ok_or_else(|| CliError::Input("no instance given (use --instance FILE or --builtin NAME)".into()))?;
    let mut file = load(source)?.file;
    if let Some(f) = opts.field {
        file.field = f;
    }
    Ok(file.serialize())
}

/// Runs one command. Budget shortfalls become a `budget-exceeded` report;
/// input problems are returned as errors.
pub fn run(opts: &Options, cmd: &Command) -> Result<Report, CliError> {
    if let Command::Selftest { effort } = cmd {
        return Ok(selftest(opts, *effort));
    }
    let source = opts
        .source
        .as_ref()
        .ok_or_else(|| CliError::Input("no instance given (use --instance FILE or --builtin NAME)".into()))?;
    let loaded = load(source)?;
    if let Command::Show = cmd {
        return Err(CliError::Input("`show` produces an instance file, not a report; use `show_instance`".into()));
    }
    let field = opts.field.unwrap_or(loaded.file.field);
    let out = match field {
        FieldDescriptor::Prime(p) => {
            let f = PrimeField::new(p as u64).map_err(|e| CliError::Input(e.to_string()))?;
            run_in(opts, cmd, &loaded, f)
        }
        FieldDescriptor::Rational => run_in(opts, cmd, &loaded, Rationals),
    };
    match out {
        Err(CliError::Budget(msg)) => {
            let mut r = Report::new(command_name(cmd), &loaded.name, field.to_string());
            r.verdict = Verdict::BudgetExceeded;
            r.fact("reason", msg);
            Ok(r)
        }
        other => other,
    }
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Resolve { .. } => "resolve",
        Command::Check { .. } => "check",
        Command::Ext { .. } => "ext",
        Command::Verify { .. } => "verify",
        Command::Selftest { .. } => "selftest",
        Command::Show => "show",
    }
}

fn provider<F: Field>(opts: &Options) -> Box<dyn ResolutionProvider<F>> {
    match &opts.cache {
        CacheMode::Off => Box::new(Direct),
        CacheMode::Memory => Box::new(Cache::new(None, opts.verify_cache)),
        CacheMode::Dir(d) => Box::new(Cache::new(Some(d.clone()), opts.verify_cache)),
    }
}

/// Default internal window for a homological bound: the Budget rule with
/// `d` standing in for the relation degree.
fn default_window(h: usize, d: usize) -> usize {
    delta(h, d) as usize + 2 * d
}

fn run_in<F: Field>(opts: &Options, cmd: &Command, l: &Loaded, field: F) -> Result<Report, CliError> {
    let p = provider::<F>(opts);
    let p = p.as_ref();
    match cmd {
        Command::Resolve {
            module,
            homdeg,
            degbound,
            d,
        } => {
            let d = d.unwrap_or(l.d);
            let window = degbound.unwrap_or_else(|| default_window(*homdeg, d));
            let s = session(l, field, module, window + d)?;
            let m = s.module(p, module, window)?;
            resolve_report(p, &s, module, &m, *homdeg, window)
        }
        Command::Check {
            module,
            d,
            generalized,
            homdeg,
            degbound,
        } => {
            let property = if *generalized {
                Property::GeneralizedDKoszul
            } else {
                Property::DKoszul
            };
            let window = degbound.unwrap_or_else(|| required_window(property, *d, *homdeg));
            let s = session(l, field, module, window + d)?;
            let m = s.module(p, module, window)?;
            let cert = certify_window(p, &m, property, *d, *homdeg, window).map_err(CliError::engine)?;
            let mut r = base_report("check", &s, Some(module));
            r.bounds = Bounds {
                h: Some(*homdeg),
                d: Some(window),
                ..Bounds::default()
            };
            let needed = required_window(property, *d, *homdeg);
            r.verdict = if !cert.holds() {
                Verdict::Fail
            } else if window < needed {
                r.fact(
                    "reason",
                    format!("window D={window} cannot show generators of Q^{homdeg}; D={needed} is needed"),
                );
                Verdict::BudgetExceeded
            } else {
                Verdict::Pass
            };
            certificate_into(&mut r, &s, &cert);
            Ok(r)
        }
        Command::Ext {
            module,
            parity,
            grades,
            degbound,
            d,
        } => {
            let d = d.unwrap_or(l.d);
            let h = 2 * grades + 1;
            let window = degbound.unwrap_or_else(|| default_window(h, d));
            let s = session(l, field, module, window + d)?;
            let m = s.module(p, module, window)?;
            ext_report(p, &s, module, &m, *parity, *grades, window)
        }
        Command::Verify {
            claim,
            module,
            d,
            effort,
            homdeg,
            degbound,
        } => {
            let d = d.unwrap_or(l.d);
            let budget = Budget::from_effort(d, *effort).with_overrides(*homdeg, *degbound);
            let s = session(l, field, module, budget.window + 2 * d)?;
            let m = s.module(p, module, budget.window)?;
            let inst = Instance {
                name: format!("{}:{}", s.name, module),
                algebra: s.algebra.clone(),
                module: m,
                d,
            };
            let claims: Vec<Claim> = match claim {
                Some(c) => vec![*c],
                None => Claim::ALL.to_vec(),
            };
            let results: Vec<Result<VerificationReport, CliError>> = std::thread::scope(|scope| {
                let handles: Vec<_> = claims
                    .iter()
                    .map(|&c| {
                        let inst = &inst;
                        scope.spawn(move || verify(p, inst, c, budget).map_err(CliError::engine))
                    })
                    .collect();
                handles.into_iter().map(|h| h.join().expect("verification thread")).collect()
            });
            let mut reports = Vec::new();
            for (c, res) in claims.iter().zip(results) {
                reports.push(match res {
                    Ok(v) => verification_report(&s, module, &v),
                    Err(CliError::Budget(msg)) => {
                        let mut r = base_report("verify", &s, Some(module));
                        r.claim = Some(c.id().into());
                        r.verdict = Verdict::BudgetExceeded;
                        r.bounds = budget_bounds(&budget);
                        r.fact("reason", msg);
                        r
                    }
                    Err(e) => return Err(e),
                });
            }
            if reports.len() == 1 {
                return Ok(reports.pop().unwrap());
            }
            let mut r = base_report("verify", &s, Some(module));
            r.claim = Some("all".into());
            r.bounds = budget_bounds(&budget);
            r.verdict = Verdict::combine(reports.iter().map(|x| x.verdict));
            let mut t = Table::new("claims", &["claim", "verdict"]);
            for x in &reports {
                t.row(vec![x.claim.clone().unwrap_or_default(), x.verdict.as_str().into()]);
            }
            r.tables.push(t);
            r.parts = reports;
            Ok(r)
        }
        Command::Selftest { .. } | Command::Show => unreachable!("handled by run"),
    }
}

fn session<F: Field>(l: &Loaded, field: F, module: &str, span: usize) -> Result<Session<F>, CliError> {
    if l.file.module(module).is_none() {
        let known: Vec<&str> = l.file.modules.iter().map(|m| m.name.as_str()).collect();
        return Err(CliError::Input(format!(
            "unknown module '{module}' (declared: {})",
            known.join(", ")
        )));
    }
    let max = Session::<F>::degree_needed(&l.file, module, span);
    Session::new(&l.name, l.file.clone(), field, max)
}

fn base_report<F: Field>(command: &str, s: &Session<F>, module: Option<&str>) -> Report {
    let mut r = Report::new(command, &s.name, s.algebra.field().descriptor().to_string());
    r.module = module.map(str::to_string);
    r
}

fn vname<F: Field>(s: &Session<F>, v: usize) -> String {
    s.algebra.vertices()[v].clone()
}

fn multiset<F: Field>(s: &Session<F>, gens: &[(usize, i32)]) -> String {
    let parts: Vec<String> = gens.iter().map(|&(v, d)| format!("({},{})", vname(s, v), d)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn certificate_line(c: &KoszulCertificate) -> String {
    format!("{} {} (H={}, D={})", c.property.name(c.d), c.verdict, c.h, c.window)
}

fn certificate_into<F: Field>(r: &mut Report, s: &Session<F>, c: &KoszulCertificate) {
    r.fact("property", c.property.name(c.d));
    r.fact("certificate", certificate_line(c));
    if c.base != 0 {
        r.fact("base degree", c.base);
    }
    if let Some(w) = c.witness {
        r.witnesses.push(format!(
            "(i={}, vertex {}, degree {}): generator of Q^{} outside the template",
            w.i,
            vname(s, w.vertex),
            w.degree,
            w.i
        ));
    }
    let mut t = Table::new("generators", &["i", "count", "(vertex,degree)"]);
    for (i, m) in c.multisets.iter().enumerate() {
        t.row(vec![i.to_string(), m.len().to_string(), multiset(s, m)]);
    }
    r.tables.push(t);
}

fn betti_table<F: Field>(res: &Resolution<F>, title: &str) -> Table {
    let table = res.betti_table();
    let degrees: Vec<i32> = {
        let mut v: Vec<i32> = table.keys().map(|k| k.1).collect();
        v.sort();
        v.dedup();
        v
    };
    let mut cols = vec!["i \\ j".to_string()];
    cols.extend(degrees.iter().map(|j| j.to_string()));
    let mut t = Table {
        title: title.into(),
        columns: cols,
        rows: Vec::new(),
    };
    for i in 0..=res.length() {
        let mut row = vec![i.to_string()];
        for j in &degrees {
            row.push(table.get(&(i, *j)).map_or(".".into(), |n| n.to_string()));
        }
        t.row(row);
    }
    t
}

fn resolve_report<F: Field>(
    p: &dyn ResolutionProvider<F>,
    s: &Session<F>,
    name: &str,
    m: &Arc<GradedModule<F>>,
    h: usize,
    window: usize,
) -> Result<Report, CliError> {
    let base = m.support_floor().unwrap_or(m.lo());
    let m = if base > m.lo() {
        Arc::new(m.with_window(base, m.hi()))
    } else {
        m.clone()
    };
    let res = p.resolve(&m, h, base + window as i32).map_err(CliError::engine)?;
    let mut r = base_report("resolve", s, Some(name));
    r.bounds = Bounds {
        h: Some(h),
        d: Some(window),
        ..Bounds::default()
    };
    let (lo, hi) = res.window();
    r.fact("window", format!("[{lo}, {hi}]"));
    let exact = res.check_exact();
    let minimal = res.check_minimal();
    r.fact("exact", exact.is_ok());
    r.fact("minimal", minimal.is_ok());
    if let Err((i, t, v)) = exact {
        r.witnesses.push(format!("not exact at level {i}, degree {t}, vertex {}", vname(s, v)));
    }
    if let Err((i, g)) = minimal {
        r.witnesses.push(format!("generator {g} of Q^{i} maps outside the radical"));
    }
    r.verdict = if r.witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail };
    let mut t = Table::new("generators", &["i", "count", "(vertex,degree)"]);
    for i in 0..=res.length() {
        let g = res.generator_multiset(i);
        t.row(vec![i.to_string(), g.len().to_string(), multiset(s, &g)]);
    }
    r.tables.push(t);
    r.tables.push(betti_table(&res, "Ext dimensions dim Ext^i(M, L0)_j"));
    Ok(r)
}

fn ext_report<F: Field>(
    p: &dyn ResolutionProvider<F>,
    s: &Session<F>,
    name: &str,
    m: &Arc<GradedModule<F>>,
    parity: Parity,
    h_e: usize,
    window: usize,
) -> Result<Report, CliError> {
    let base = m.support_floor().unwrap_or(m.lo());
    let m = if base > m.lo() {
        Arc::new(m.with_window(base, m.hi()))
    } else {
        m.clone()
    };
    let top = parity.level(h_e);
    let mut hi = base + window as i32;
    if !m.knows(hi) {
        hi = m.hi();
    }
    let res = p.resolve(&m, top, hi).map_err(CliError::engine)?;
    let even = build_ext_even_algebra(p, &s.algebra, h_e, window as i32).map_err(CliError::engine)?;
    let mut r = base_report("ext", s, Some(name));
    r.bounds = Bounds {
        h: Some(top),
        d: Some(window),
        h_e: Some(h_e),
        ..Bounds::default()
    };
    let label = match parity {
        Parity::Even => "E^ev(M)",
        Parity::Odd => "E^od(M)",
    };
    r.fact("object", label);
    r.fact("E^ev(L) grade dims", fmt_dims(&even.grade_dims()));
    r.fact("E^ev(L) standardly graded", even.standard.passes());
    let mut t = Table::new(format!("{label} by grade"), &["grade n", "Ext level", "dim", "(vertex,degree)"]);
    for n in 0..=h_e {
        let g = res.generator_multiset(parity.level(n));
        t.row(vec![
            n.to_string(),
            parity.level(n).to_string(),
            g.len().to_string(),
            multiset(s, &g),
        ]);
    }
    r.tables.push(t);
    match build_ext_module(&even, &res, parity) {
        Ok(ext) => {
            r.fact(format!("{label} grade dims"), fmt_dims(&ext.grade_dims()));
            let gens = ext.module.top_generators();
            let by_grade: BTreeMap<i32, usize> = gens.iter().fold(BTreeMap::new(), |mut acc, g| {
                *acc.entry(g.degree).or_insert(0) += 1;
                acc
            });
            let parts: Vec<String> = by_grade.iter().map(|(d, n)| format!("{n} in grade {d}")).collect();
            r.fact("module generators", parts.join(", "));
        }
        Err(e) => {
            r.verdict = Verdict::PreconditionFailed;
            r.fact("reason", e);
        }
    }
    Ok(r)
}

fn fmt_dims(v: &[usize]) -> String {
    let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
    format!("[{}]", parts.join(", "))
}

fn budget_bounds(b: &Budget) -> Bounds {
    Bounds {
        h: Some(b.h),
        d: Some(b.window),
        h_e: Some(b.h_e),
        effort: Some(b.effort),
        formulas: Some(Budget::FORMULAS.into()),
    }
}

fn verification_report<F: Field>(s: &Session<F>, module: &str, v: &VerificationReport) -> Report {
    let mut r = base_report("verify", s, Some(module));
    r.claim = Some(v.claim.id().into());
    r.bounds = budget_bounds(&v.budget);
    r.verdict = match v.outcome {
        Outcome::Pass => Verdict::Pass,
        Outcome::Fail => Verdict::Fail,
        Outcome::Precondition => Verdict::PreconditionFailed,
    };
    r.fact("statement", v.claim.statement());
    r.fact("d", v.d);
    if let Some(n) = &v.note {
        r.fact("note", n);
    }
    let mut pre = Table::new("preconditions", &["hypothesis", "verdict", "certificate"]);
    for (label, c) in &v.preconditions {
        pre.row(vec![
            label.clone(),
            if c.holds() { "holds" } else { "fails" }.into(),
            certificate_line(c),
        ]);
        if let Some(w) = c.witness {
            r.witnesses.push(format!(
                "{label}: fails at (i={}, vertex {}, degree {})",
                w.i,
                vname(s, w.vertex),
                w.degree
            ));
        }
    }
    r.tables.push(pre);
    if !v.subclaims.is_empty() {
        let mut t = Table::new("subclaims", &["subclaim", "status"]);
        for sc in &v.subclaims {
            t.row(vec![sc.name.clone(), sc.status.as_str().into()]);
        }
        r.tables.push(t);
    }
    for sc in &v.subclaims {
        if sc.evidence.is_empty() {
            continue;
        }
        let mut t = Table::new(format!("evidence: {}", sc.name), &["key", "value"]);
        for (k, val) in &sc.evidence {
            t.row(vec![k.clone(), val.clone()]);
        }
        if sc.status == Status::Fail {
            let rows: Vec<String> = sc.evidence.iter().map(|(k, v)| format!("{k} = {v}")).collect();
            r.witnesses.push(format!("{}: {}", sc.name, rows.join("; ")));
        }
        r.tables.push(t);
    }
    r
}

/// Built-in consistency checks: the d-Koszul expectation of every built-in
/// algebra, Ext tables against Hom-complex cohomology, and the golden
/// resolution of the loop-chain simple.
fn selftest(opts: &Options, effort: usize) -> Report {
    let field = opts.field.unwrap_or(FieldDescriptor::Prime(dkoszul_core::scalar::DEFAULT_PRIME));
    let mut top = Report::new("selftest", "built-ins", field.to_string());
    let f = match field {
        FieldDescriptor::Prime(p) => PrimeField::new(p as u64).expect("parsed field"),
        FieldDescriptor::Rational => {
            top.verdict = Verdict::PreconditionFailed;
            top.fact("reason", "selftest runs over prime fields only");
            return top;
        }
    };
    let p = provider::<PrimeField>(opts);
    let p = p.as_ref();
    let mut summary = Table::new("built-ins", &["name", "d", "verdict"]);
    for b in builtins() {
        let mut r = Report::new("selftest", b.name, field.to_string());
        let budget = Budget::from_effort(b.d, effort);
        let h = 2 * effort + 2;
        r.bounds = Bounds {
            h: Some(h),
            d: Some(budget.window),
            ..Bounds::default()
        };
        let mut checks = Table::new("checks", &["check", "status", "detail"]);
        let file = InstanceFile::from_builtin(&b);
        let loaded = Loaded {
            name: b.name.into(),
            file,
            d: b.d,
        };
        let outcome = (|| -> Result<(), CliError> {
            let s = session(&loaded, f, "k", budget.window + 2 * b.d)?;
            let k = s.module(p, "k", budget.window)?;
            let cert = certify_window(p, &k, Property::DKoszul, b.d, h, budget.window).map_err(CliError::engine)?;
            let ok = cert.holds() == b.d_koszul;
            checks.row(vec![
                "d-Koszul expectation".into(),
                status(ok),
                format!("expected {}, {}", b.d_koszul, certificate_line(&cert)),
            ]);
            if cert.holds() {
                let res = p.resolve(&k, h, budget.window as i32).map_err(CliError::engine)?;
                let conc = concentrated_on_delta(&res.betti_table(), b.d);
                checks.row(vec![
                    "Ext concentrated on (i, delta(i))".into(),
                    status(conc),
                    String::new(),
                ]);
            }
            let oracle = ext_table_oracle(p, &k, h.min(6), budget.window).map_err(CliError::engine)?;
            checks.row(vec![
                "Ext table equals Hom-complex cohomology".into(),
                status(oracle.status == Status::Pass),
                format!("i <= {}", h.min(6)),
            ]);
            if b.name == "loop-chain" {
                let s1 = s.module(p, "S1", budget.window)?;
                let res = p.resolve(&s1, 4, budget.window as i32).map_err(CliError::engine)?;
                let got: Vec<Vec<(usize, i32)>> = (0..=3).map(|i| res.generator_multiset(i)).collect();
                let want = vec![
                    vec![(0, 0)],
                    vec![(0, 1), (1, 1)],
                    vec![(0, 3), (2, 3)],
                    vec![(0, 4), (2, 5)],
                ];
                checks.row(vec![
                    "S1 generator multisets".into(),
                    status(got == want),
                    got.iter().map(|g| multiset(&s, g)).collect::<Vec<_>>().join(" "),
                ]);
                let o4 = res.syzygy(4).map_err(CliError::engine)?;
                let o2 = Arc::new(res.syzygy(2).map_err(CliError::engine)?.shift(3));
                let iso = graded_iso(&o4, &o2).map_err(CliError::engine)?;
                checks.row(vec![
                    "Omega^4 S1 isomorphic to (Omega^2 S1)[3]".into(),
                    status(matches!(iso, IsoOutcome::Isomorphic(_))),
                    String::new(),
                ]);
            }
            Ok(())
        })();
        if let Err(e) = outcome {
            checks.row(vec!["run".into(), "fail".into(), e.to_string()]);
        }
        r.verdict = if checks.rows.iter().all(|row| row[1] == "pass") {
            Verdict::Pass
        } else {
            Verdict::Fail
        };
        summary.row(vec![b.name.into(), b.d.to_string(), r.verdict.as_str().into()]);
        r.tables.push(checks);
        top.parts.push(r);
    }
    top.verdict = Verdict::combine(top.parts.iter().map(|r| r.verdict));
    top.tables.push(summary);
    top
}

fn status(ok: bool) -> String {
    if ok { "pass" } else { "fail" }.into()
}
