//! Acceptance run: one line per criterion, non-zero exit if any fails.

use std::process::Command as Process;
use std::sync::Arc;
use std::time::Instant;

use dkoszul::commands::CacheMode;
use dkoszul::{run, Command, Options, Report, Source, Verdict};
use dkoszul_core::algebra::{GradedAlgebra, PathAlgebraPresentation, Quiver};
use dkoszul_core::builtins::{builtin, builtins};
use dkoszul_core::gmod::{graded_iso, Generator, GradedModule};
use dkoszul_core::koszul::{
    certify_window, concentrated_on_delta, delta, ext_concentration_table, is_koszul_module, Property,
};
use dkoszul_core::resolve::{horseshoe, minimal_resolution_to, minimize, Direct, ResolutionProvider};
use dkoszul_core::scalar::{Field, PrimeField};
use dkoszul_core::verify::{ext_table_oracle, Claim, Status};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts(name: &str) -> Options {
    Options {
        source: Some(Source::Builtin(name.into())),
        field: None,
        cache: CacheMode::Off,
        verify_cache: false,
    }
}

fn verify(name: &str, claim: Claim, module: &str) -> Result<Report, String> {
    run(
        &opts(name),
        &Command::Verify {
            claim: Some(claim),
            module: module.into(),
            d: None,
            effort: 3,
            homdeg: None,
            degbound: None,
        },
    )
    .map_err(|e| format!("{name}: {e}"))
}

fn table_rows<'a>(r: &'a Report, title: &str) -> Vec<&'a Vec<String>> {
    r.tables.iter().filter(|t| t.title == title).flat_map(|t| t.rows.iter()).collect()
}

fn koszul_names() -> Vec<&'static str> {
    builtins().into_iter().filter(|b| b.d_koszul).map(|b| b.name).collect()
}

fn algebra(name: &str, max_degree: usize) -> Arc<GradedAlgebra<PrimeField>> {
    let p = builtin(name).unwrap().presentation(PrimeField::default()).unwrap();
    Arc::new(GradedAlgebra::from_presentation(&p, max_degree))
}

fn timed(limit: f64, start: Instant) -> Result<String, String> {
    let s = start.elapsed().as_secs_f64();
    ensure(s < limit, || format!("took {s:.2} s, limit {limit} s"))?;
    Ok(format!("{s:.2} s"))
}

fn golden_resolution() -> Check {
    let start = Instant::now();
    let a = algebra("loop-chain", 12);
    let s1 = Arc::new(GradedModule::simple(a, 0).map_err(|e| e.to_string())?);
    let res = minimal_resolution_to(&s1, 4, 10).map_err(|e| e.to_string())?;
    let want: [&[(usize, i32)]; 4] = [&[(0, 0)], &[(0, 1), (1, 1)], &[(0, 3), (2, 3)], &[(0, 4), (2, 5)]];
    for (i, w) in want.iter().enumerate() {
        let got = res.generator_multiset(i);
        ensure(got == *w, || format!("Q^{i}: {got:?}"))?;
    }
    let o4 = res.syzygy(4).map_err(|e| e.to_string())?;
    let o2 = Arc::new(res.syzygy(2).map_err(|e| e.to_string())?.shift(3));
    ensure(graded_iso(&o4, &o2).map_err(|e| e.to_string())?.is_isomorphic(), || {
        "no isomorphism Omega^4 -> (Omega^2)[3]".into()
    })?;
    timed(1.0, start)
}

fn bin(args: &[&str]) -> Result<(i32, String), String> {
    let o = Process::new(env!("CARGO_BIN_EXE_dkoszul"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    Ok((o.status.code().unwrap_or(-1), String::from_utf8_lossy(&o.stdout).into_owned()))
}

fn cli_classification() -> Check {
    let start = Instant::now();
    let (code, out) = bin(&["-b", "loop-chain", "--no-cache", "check", "S1", "--d", "3", "--generalized"])?;
    ensure(code == 0 && out.contains("holds-up-to (H=8,"), || format!("generalized: exit {code}\n{out}"))?;
    let (code, out) = bin(&["-b", "loop-chain", "--no-cache", "check", "S1", "--d", "3"])?;
    ensure(code == 1 && out.contains("witness: (i=3, vertex 3, degree 5)"), || {
        format!("strict: exit {code}\n{out}")
    })?;
    timed(2.0, start)
}

fn algebra_suite() -> Check {
    let start = Instant::now();
    let names = ["poly-2", "poly-3", "poly-4", "poly-5", "two-loops-j3", "three-cycle-j3", "kronecker-j3"];
    for name in names {
        let d = builtin(name).unwrap().d;
        let r = run(
            &opts(name),
            &Command::Check {
                module: "k".into(),
                d,
                generalized: false,
                homdeg: 8,
                degbound: None,
            },
        )
        .map_err(|e| e.to_string())?;
        ensure(r.verdict == Verdict::Pass, || format!("{name}: {}", r.to_text()))?;
        let window = delta(8, d) as usize + d;
        let a = algebra(name, window + d);
        let res = Direct
            .resolve(&Arc::new(GradedModule::trivial(a)), 8, window as i32)
            .map_err(|e| e.to_string())?;
        ensure(concentrated_on_delta(&ext_concentration_table(&res), d), || {
            format!("{name}: Ext off the template")
        })?;
    }
    timed(10.0, start)
}

fn ext_oracle() -> Check {
    let mut checked = 0;
    for b in builtins() {
        let window = delta(7, b.d) as usize + 2 * b.d;
        let a = algebra(b.name, window + 2 * b.d);
        let mut modules = vec![Arc::new(GradedModule::trivial(a.clone()))];
        for v in 0..a.num_vertices() {
            modules.push(Arc::new(GradedModule::simple(a.clone(), v).unwrap()));
        }
        for m in modules {
            let s = ext_table_oracle(&Direct, &m, 6, window).map_err(|e| e.to_string())?;
            ensure(s.status == Status::Pass, || format!("{}: {s:?}", b.name))?;
            checked += 1;
        }
    }
    Ok(format!("{checked} modules, i <= 6"))
}

fn syzygy_shifts() -> Check {
    let start = Instant::now();
    for name in koszul_names() {
        let r = verify(name, Claim::SyzygyShifts, "k")?;
        ensure(r.verdict == Verdict::Pass, || format!("{name}: {}", r.to_text()))?;
        let rows = table_rows(&r, "subclaims");
        let iso = rows.iter().any(|row| row[0].starts_with("odd Ext") && row[1] == "pass");
        let shifts = rows.iter().filter(|row| row[0].starts_with("(Omega^") && row[1] == "pass").count();
        ensure(iso && shifts == 6, || format!("{name}: {rows:?}"))?;
        let constructed = table_rows(&r, "evidence: odd Ext of M isomorphic to even Ext of Omega M")
            .iter()
            .any(|row| row[0] == "isomorphism" && row[1] == "constructed");
        ensure(constructed, || format!("{name}: no explicit isomorphism"))?;
    }
    timed(30.0, start)
}

fn radical_layers() -> Check {
    for name in ["two-loops-j3", "poly-3"] {
        for module in ["k", "omega1-down"] {
            let r = verify(name, Claim::RadicalLayers, module)?;
            ensure(r.verdict == Verdict::Pass, || format!("{name}:{module}: {}", r.to_text()))?;
            let rows = table_rows(&r, "subclaims");
            let layers = rows.iter().filter(|row| row[0].starts_with("(J^")).count();
            let chains = rows.iter().filter(|row| row[0].starts_with("Ext^")).count();
            ensure(layers == 3 && chains == 3, || format!("{name}:{module}: {rows:?}"))?;
        }
    }
    Ok("i = 1..3, n <= 3".into())
}

fn exact_sequences() -> Check {
    let mut passed = 0;
    for b in builtins() {
        for module in ["k", "omega1-down"] {
            let r = verify(b.name, Claim::ExactSequences, module)?;
            match r.verdict {
                Verdict::Pass => passed += 1,
                Verdict::PreconditionFailed if !b.d_koszul => {}
                v => return Err(format!("{}:{module}: {}", b.name, v.as_str())),
            }
            if r.verdict == Verdict::Pass {
                let n3 = table_rows(&r, "evidence: dim Ext^{2n}(N/JN)_{nd} = dim Ext^{2n-1}(JN)_{nd} + dim Ext^{2n}(N)_{nd}")
                    .iter()
                    .any(|row| row[0] == "n=3");
                ensure(n3, || format!("{}:{module}: n = 3 missing", b.name))?;
            }
        }
    }
    Ok(format!("{passed} instances, n <= 3"))
}

fn even_ext() -> Check {
    let start = Instant::now();
    for name in koszul_names() {
        for claim in [Claim::EvenExtKoszul, Claim::MainTheorem, Claim::OddExtKoszul] {
            let r = verify(name, claim, "k")?;
            ensure(r.verdict == Verdict::Pass && r.bounds.h_e == Some(3), || {
                format!("{name} {}: {}", claim.id(), r.to_text())
            })?;
        }
    }
    timed(120.0, start)
}

fn random_quadratic(rng: &mut ChaCha8Rng, max_degree: usize) -> Arc<GradedAlgebra<PrimeField>> {
    let f = PrimeField::default();
    let mut below = |n: usize| (rng.next_u32() as usize) % n;
    loop {
        let nv = 1 + below(2);
        let na = 2 + below(2);
        let vs: Vec<String> = (0..nv).map(|v| format!("v{v}")).collect();
        let arrows: Vec<(String, String, String)> = (0..na)
            .map(|k| (format!("a{k}"), vs[below(nv)].clone(), vs[below(nv)].clone()))
            .collect();
        let q = Quiver::new(&vs, &arrows).unwrap();
        let paths = q.paths(2);
        if paths.is_empty() {
            continue;
        }
        let first = paths[below(paths.len())].clone();
        let ends = q.path_endpoints(&first);
        let rel: Vec<_> = paths
            .iter()
            .filter(|p| q.path_endpoints(p) == ends)
            .map(|p| (f.from_i64(below(5) as i64 - 2), p.clone()))
            .collect();
        if let Ok(p) = PathAlgebraPresentation::new(f, q, vec![rel]) {
            return Arc::new(GradedAlgebra::from_presentation(&p, max_degree));
        }
    }
}

fn random_properties() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0xacce);
    for case in 0..20 {
        let a = random_quadratic(&mut rng, 9);
        let k = Arc::new(GradedModule::trivial(a));
        let lin = is_koszul_module(&Direct, &k, 4).map_err(|e| e.to_string())?;
        let gen = certify_window(&Direct, &k, Property::GeneralizedDKoszul, 2, 4, 6).map_err(|e| e.to_string())?;
        ensure(lin.holds() == gen.holds(), || format!("classifiers disagree on case {case}"))?;
    }
    let hi = 5;
    for case in 0..20 {
        let a = random_quadratic(&mut rng, hi as usize + 1);
        let v = (rng.next_u32() as usize) % a.num_vertices();
        let p = Arc::new(GradedModule::projective(a.clone(), &[Generator::new(v, 0)]).unwrap());
        let s = Arc::new(GradedModule::simple(a, v).unwrap());
        let m = Arc::new(GradedModule::direct_sum(&p, &s).unwrap().with_window(0, hi));
        let jm = m.radical();
        let top = m.quotient(&jm.map);
        let e = |x: dkoszul_core::resolve::ResolveError| x.to_string();
        let ra = minimal_resolution_to(&jm.module, 4, hi).map_err(e)?;
        let rc = minimal_resolution_to(&top.module, 4, hi).map_err(e)?;
        let small = minimize(&horseshoe(&jm.map, &top.map, &ra, &rc).map_err(e)?).map_err(e)?;
        let min = minimal_resolution_to(&m, 4, hi).map_err(e)?;
        for i in 0..4 {
            ensure(small.generator_multiset(i) == min.generator_multiset(i), || {
                format!("case {case}: Q^{i} differs")
            })?;
        }
    }
    Ok("20 + 20 seeded instances".into())
}

fn determinism() -> Check {
    let dir = std::env::temp_dir().join(format!("dkoszul-acceptance-{}", std::process::id()));
    let cache = dir.to_str().unwrap().to_string();
    let commands: [&[&str]; 3] = [
        &["-b", "two-loops-j3", "verify", "all", "--effort", "2"],
        &["-b", "loop-chain", "check", "S1", "--d", "3"],
        &["-b", "poly-3", "ext", "k", "--odd"],
    ];
    for args in commands {
        let mut seen: Vec<String> = Vec::new();
        for mode in [&["--no-cache"][..], &["--no-cache"], &["--cache-dir", &cache], &["--cache-dir", &cache]] {
            let mut all: Vec<&str> = mode.to_vec();
            all.extend(["--json", "-"]);
            all.extend(args);
            seen.push(bin(&all)?.1);
        }
        ensure(seen.windows(2).all(|w| w[0] == w[1]), || format!("{args:?} differs between runs"))?;
    }
    let _ = std::fs::remove_dir_all(dir);
    Ok("cache off, off, cold, warm".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("loop-chain-golden-resolution", golden_resolution),
        ("loop-chain-cli-classification", cli_classification),
        ("d-koszul-algebra-suite", algebra_suite),
        ("ext-table-oracle", ext_oracle),
        ("syzygy-shift-suite", syzygy_shifts),
        ("radical-layer-suite", radical_layers),
        ("exact-sequence-identities", exact_sequences),
        ("even-ext-theorems", even_ext),
        ("random-instance-properties", random_properties),
        ("deterministic-reports", determinism),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name} ({detail})"),
            Err(why) => {
                failed += 1;
                println!("FAIL {name}: {why}");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
