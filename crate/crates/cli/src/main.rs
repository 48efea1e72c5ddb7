use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use dkoszul::commands::CacheMode;
use dkoszul::{run, CliError, Command, Options, Source};
use dkoszul_core::ext::Parity;
use dkoszul_core::scalar::FieldDescriptor;
use dkoszul_core::verify::Claim;

#[derive(Parser)]
#[command(name = "dkoszul", version, about = "Minimal resolutions, d-Koszul checks and Ext algebras over graded quotients of path algebras")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Sub,
}

#[derive(Args)]
struct Global {
    /// Instance file.
    #[arg(short = 'i', long, global = true, conflicts_with = "builtin")]
    instance: Option<PathBuf>,
    /// Built-in instance name (see `dkoszul selftest`).
    #[arg(short = 'b', long, global = true)]
    builtin: Option<String>,
    /// Ground field, `prime:P` or `rational`. Overrides the instance file.
    #[arg(long, global = true)]
    field: Option<FieldDescriptor>,
    /// Do not read or write the on-disk resolution cache.
    #[arg(long, global = true)]
    no_cache: bool,
    /// Cache directory. Defaults to $DKOSZUL_CACHE_DIR, then
    /// $XDG_CACHE_HOME/dkoszul, then ~/.cache/dkoszul.
    #[arg(long, global = true)]
    cache_dir: Option<PathBuf>,
    /// Recompute every cache hit and compare it with the stored entry.
    #[arg(long, global = true)]
    check_cache: bool,
    /// Write the text report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Also write the JSON report; `-` sends it to stdout in place of text.
    #[arg(long, global = true)]
    json: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Sub {
    /// Minimal graded projective resolution of a module.
    Resolve {
        module: String,
        /// Homological bound H.
        #[arg(long, default_value_t = 6)]
        homdeg: usize,
        /// Internal degree window D above the module's lowest degree.
        #[arg(long)]
        degbound: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Check the (generalized) d-Koszul property up to a bound.
    Check {
        module: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        generalized: bool,
        #[arg(long, default_value_t = 8)]
        homdeg: usize,
        #[arg(long)]
        degbound: Option<usize>,
    },
    /// Even or odd Ext of a module over the even Ext algebra of the base.
    Ext {
        module: String,
        #[arg(long, conflicts_with = "odd")]
        even: bool,
        #[arg(long)]
        odd: bool,
        /// Number of Ext grades H_E.
        #[arg(long, default_value_t = 3)]
        grades: usize,
        #[arg(long)]
        degbound: Option<usize>,
        #[arg(long)]
        d: Option<usize>,
    },
    /// Verify a claim (or `all`) on an instance.
    Verify {
        /// lemma-2-5, theorem-2-6, exact-sequences, gmmz, main-theorem,
        /// corollary or all.
        #[arg(default_value = "all")]
        claim: String,
        #[arg(long, default_value = "k")]
        module: String,
        #[arg(long)]
        d: Option<usize>,
        #[arg(long, default_value_t = 3)]
        effort: usize,
        #[arg(long)]
        homdeg: Option<usize>,
        #[arg(long)]
        degbound: Option<usize>,
    },
    /// Run the built-in consistency checks.
    Selftest {
        #[arg(long, default_value_t = 2)]
        effort: usize,
    },
    /// Print the instance in canonical form.
    Show,
}

fn default_cache_dir() -> Option<PathBuf> {
    if let Some(d) = std::env::var_os("DKOSZUL_CACHE_DIR") {
        return Some(d.into());
    }
    if let Some(d) = std::env::var_os("XDG_CACHE_HOME") {
        return Some(PathBuf::from(d).join("dkoszul"));
    }
    std::env::var_os("HOME").map(|h| PathBuf::from(h).join(".cache").join("dkoszul"))
}

fn command(sub: Sub) -> Result<Command, CliError> {
    Ok(match sub {
        Sub::Resolve {
            module,
            homdeg,
            degbound,
            d,
        } => Command::Resolve {
            module,
            homdeg,
            degbound,
            d,
        },
        Sub::Check {
            module,
            d,
            generalized,
            homdeg,
            degbound,
        } => Command::Check {
            module,
            d,
            generalized,
            homdeg,
            degbound,
        },
        Sub::Ext {
            module,
            even: _,
            odd,
            grades,
            degbound,
            d,
        } => Command::Ext {
            module,
            parity: if odd { Parity::Odd } else { Parity::Even },
            grades,
            degbound,
            d,
        },
        Sub::Verify {
            claim,
            module,
            d,
            effort,
            homdeg,
            degbound,
        } => {
            let claim = match claim.as_str() {
                "all" => None,
                id => Some(Claim::from_id(id).ok_or_else(|| {
                    let ids: Vec<&str> = Claim::ALL.iter().map(|c| c.id()).collect();
                    CliError::Input(format!("unknown claim '{id}' (known: {}, all)", ids.join(", ")))
                })?),
            };
            Command::Verify {
                claim,
                module,
                d,
                effort,
                homdeg,
                degbound,
            }
        }
        Sub::Selftest { effort } => Command::Selftest { effort },
        Sub::Show => Command::Show,
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let g = cli.global;
    let source = match (g.instance, g.builtin) {
        (Some(p), _) => Some(Source::File(p)),
        (None, Some(b)) => Some(Source::Builtin(b)),
        (None, None) => None,
    };
    let cache = if g.no_cache {
        CacheMode::Memory
    } else {
        g.cache_dir.or_else(default_cache_dir).map_or(CacheMode::Memory, CacheMode::Dir)
    };
    let opts = Options {
        source,
        field: g.field,
        cache,
        verify_cache: g.check_cache,
    };
    if let Sub::Show = cli.command {
        return match dkoszul::commands::show_instance(&opts) {
            Ok(text) => {
                print!("{text}");
                ExitCode::SUCCESS
            }
            Err(e) => {
                eprintln!("dkoszul: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        };
    }
    let report = command(cli.command).and_then(|cmd| run(&opts, &cmd));
    let report = match report {
        Ok(r) => r,
        Err(e) => {
            eprintln!("dkoszul: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let json_stdout = g.json.as_deref().is_some_and(|p| p.as_os_str() == "-");
    let write = |path: &std::path::Path, text: &str| -> bool {
        if let Err(e) = std::fs::write(path, text) {
            eprintln!("dkoszul: {}: {e}", path.display());
            return false;
        }
        true
    };
    match &g.out {
        Some(path) => {
            if !write(path, &report.to_text()) {
                return ExitCode::from(3);
            }
        }
        None if !json_stdout => print!("{}", report.to_text()),
        None => {}
    }
    match &g.json {
        Some(_) if json_stdout => print!("{}", report.to_json()),
        Some(path) if !write(path, &report.to_json()) => return ExitCode::from(3),
        _ => {}
    }
    ExitCode::from(report.exit_code() as u8)
}
