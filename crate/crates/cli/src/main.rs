use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use k3pic::audit::audit_all;
use k3pic::counting::{count, fixture_table, CountError, CountOptions, CountTable, Strategy};
use k3pic::geometry::{load_fixture, smoothness_check, SurfaceSpec};
use k3pic::liftcert::{build_certificate, crt_lift, verify_reductions, CertificateOptions, CountSource, Target};
use k3pic::zeta::{rank_bound, WeilData};

/// Exit status when a requested check fails.
const EXIT_FAIL: u8 = 1;
/// Exit status for invalid input (also used by clap).
const EXIT_USAGE: u8 = 2;
/// Exit status when a computation exceeds its budget or cannot finish.
const EXIT_ERROR: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "k3pic", version, about = "Picard rank verification for K3 surfaces over the rationals")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "K3PIC_THREADS")]
    threads: Option<usize>,
    /// Write the output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    format: Format,
    /// Largest number of ambient points a count may enumerate.
    #[arg(long, global = true, default_value_t = CountOptions::default().budget)]
    budget: u128,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Records,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Source {
    Fixtures,
    Computed,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count points over GF(p^n).
    Count {
        #[arg(long)]
        surface: String,
        /// A single n, a range like 1..10, or a list like 1,3,5.
        #[arg(long, default_value = "1")]
        n: String,
        /// naive, slice or p4 (default depends on the ambient space).
        #[arg(long)]
        strategy: Option<String>,
    },
    /// Reconstruct the Frobenius characteristic polynomial.
    Zeta {
        #[arg(long)]
        surface: String,
        #[arg(long, value_enum, default_value_t = Source::Fixtures)]
        from: Source,
    },
    /// Upper bound for the geometric Picard rank.
    Rank {
        #[arg(long)]
        surface: String,
        #[arg(long, value_enum, default_value_t = Source::Fixtures)]
        from: Source,
    },
    /// Jacobian smoothness check.
    Smooth {
        #[arg(long)]
        surface: String,
    },
    /// Hyperplane-section audit.
    Audit {
        #[arg(long, default_value = "s2")]
        surface: String,
    },
    /// Lift the mod-2 and mod-3 surfaces to the integers.
    Lift {
        #[arg(long)]
        target: String,
    },
    /// Build the full certificate.
    VerifyAll {
        #[arg(long)]
        target: String,
        #[arg(long, value_enum, default_value_t = Source::Fixtures)]
        from: Source,
        /// Leave out the section audit (the certificate then has no conclusion).
        #[arg(long)]
        skip_audit: bool,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Budget { needed: u128, budget: u128 },
    Failed(String),
}

impl CliError {
    fn exit(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Budget { .. } | CliError::Failed(_) => EXIT_ERROR,
        }
    }

    fn record(&self) -> serde_json::Value {
        match self {
            CliError::Usage(m) => json!({ "error": "usage", "message": m }),
            CliError::Budget { needed, budget } => {
                json!({ "error": "budget_exceeded", "needed": needed.to_string(), "budget": budget.to_string() })
            }
            CliError::Failed(m) => json!({ "error": "failed", "message": m }),
        }
    }
}

impl From<CountError> for CliError {
    fn from(e: CountError) -> Self {
        match e {
            CountError::BudgetExceeded { needed, budget } => CliError::Budget { needed, budget },
            CountError::WrongAmbient { .. } | CountError::UnknownTable(_) => CliError::Usage(e.to_string()),
            other => CliError::Failed(other.to_string()),
        }
    }
}

fn parse_ns(s: &str) -> Result<Vec<u32>, CliError> {
    let bad = || CliError::Usage(format!("invalid n range `{s}`"));
    let ns: Vec<u32> = if let Some((a, b)) = s.split_once("..") {
        let (a, b): (u32, u32) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
        (a..=b).collect()
    } else {
        s.split(',').map(|x| x.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if ns.is_empty() || ns.iter().any(|&n| !(1..=10).contains(&n)) {
        return Err(CliError::Usage(format!("n must lie in 1..10, got `{s}`")));
    }
    Ok(ns)
}

fn surface(name: &str) -> Result<SurfaceSpec, CliError> {
    load_fixture(name).map_err(|e| CliError::Usage(e.to_string()))
}

fn target(name: &str) -> Result<Target, CliError> {
    Target::parse(name).ok_or_else(|| CliError::Usage(format!("unknown target `{name}` (degree10 or degree6)")))
}

fn table(name: &str, from: Source, opts: &CountOptions) -> Result<CountTable, CliError> {
    match from {
        Source::Fixtures => Ok(fixture_table(name)?),
        Source::Computed => {
            let spec = surface(name)?;
            Ok(k3pic::counting::count_table(&spec, 1..=10, Strategy::default_for(spec.ambient), opts)?)
        }
    }
}

fn weil(name: &str, from: Source, opts: &CountOptions) -> Result<WeilData, CliError> {
    rank_bound(&table(name, from, opts)?, 2).map_err(|e| CliError::Failed(e.to_string()))
}

/// Runs one subcommand; returns the output and whether its checks passed.
fn run(cli: &Cli) -> Result<(String, bool), CliError> {
    let opts = CountOptions { budget: cli.budget, ..CountOptions::default() };
    let records = cli.format == Format::Records;
    let mut out = String::new();
    let pass = match &cli.command {
        Command::Count { surface: name, n, strategy } => {
            let spec = surface(name)?;
            let strategy = match strategy {
                Some(s) => s.parse::<Strategy>().map_err(|e| CliError::Usage(e.to_string()))?,
                None => Strategy::default_for(spec.ambient),
            };
            for n in parse_ns(n)? {
                let c = count(&spec, n, strategy, &opts)?;
                if records {
                    let r = json!({ "surface": name, "p": spec.characteristic, "n": n, "strategy": strategy, "count": c.to_string() });
                    let _ = writeln!(out, "{r}");
                } else {
                    let _ = writeln!(out, "{n} {c}");
                }
            }
            true
        }
        Command::Zeta { surface: name, from } => {
            let w = weil(name, *from, &opts)?;
            let c: Vec<String> = w.c.iter().map(|x| x.to_string()).collect();
            let polys: Vec<String> = w.candidates.iter().map(|k| k.q.to_string()).collect();
            if records {
                let r = json!({
                    "surface": name, "p": w.p, "c": c, "completions": polys,
                    "unit_roots": w.unit_roots(), "rank_upper_bound": w.rank_upper_bound(),
                });
                let _ = writeln!(out, "{r}");
            } else {
                for (i, x) in c.iter().enumerate() {
                    let _ = writeln!(out, "c_{} = {x}", i + 1);
                }
                for (k, p) in w.candidates.iter().zip(&polys) {
                    let _ = writeln!(out, "Q(t) [{:?}] = {p}", k.parity);
                }
                let _ = writeln!(out, "unit roots: {}", w.unit_roots());
                let _ = writeln!(out, "rank upper bound: {}", w.rank_upper_bound());
            }
            true
        }
        Command::Rank { surface: name, from } => {
            let w = weil(name, *from, &opts)?;
            if records {
                let r = json!({ "surface": name, "rank_upper_bound": w.rank_upper_bound(), "ambiguous": w.is_ambiguous() });
                let _ = writeln!(out, "{r}");
            } else {
                let _ = writeln!(out, "{name}: geometric Picard rank upper bound {}", w.rank_upper_bound());
            }
            true
        }
        Command::Smooth { surface: name } => {
            let v = smoothness_check(&surface(name)?).map_err(|e| CliError::Failed(e.to_string()))?;
            if records {
                let _ = writeln!(out, "{}", json!({ "surface": name, "smooth": v.is_smooth_surface(), "verdict": v.to_string() }));
            } else {
                let _ = writeln!(out, "{name}: {v}");
            }
            v.is_smooth_surface()
        }
        Command::Audit { surface: name } => {
            let s = audit_all(&surface(name)?).map_err(|e| CliError::Usage(e.to_string()))?;
            if records {
                for r in &s.reports {
                    let _ = writeln!(out, "{}", serde_json::to_string(r).expect("serializes"));
                }
            } else {
                let _ = write!(out, "{s}");
            }
            s.all_pass()
        }
        Command::Lift { target: t } => {
            let (name, a, b) = target(t)?.surfaces();
            let (sa, sb) = (surface(a)?, surface(b)?);
            let lift = crt_lift(name, &sa, &sb).map_err(|e| CliError::Failed(e.to_string()))?;
            let checks = verify_reductions(&lift, &sa, &sb).map_err(|e| CliError::Failed(e.to_string()))?;
            if records {
                let _ = writeln!(out, "{}", json!({ "lift": lift.to_fixture_text(), "checks": checks }));
            } else {
                out.push_str(&lift.to_fixture_text());
                for c in &checks {
                    let _ = writeln!(out, "# mod {} -> {}: {}", c.p, c.fixture, if c.pass { "ok" } else { "MISMATCH" });
                }
            }
            checks.iter().all(|c| c.pass)
        }
        Command::VerifyAll { target: t, from, skip_audit } => {
            let counts = match from {
                Source::Fixtures => CountSource::Fixtures,
                Source::Computed => CountSource::Computed(opts),
            };
            let cert = build_certificate(target(t)?, &CertificateOptions { counts, audit: !skip_audit });
            if records {
                out.push_str(&cert.to_json());
                out.push('\n');
            } else {
                out.push_str(&cert.render_text());
            }
            cert.conclusion.is_some()
        }
    };
    Ok((out, pass))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("{}", json!({ "error": "threads", "message": e.to_string() }));
            return ExitCode::from(EXIT_USAGE);
        }
    }
    match run(&cli) {
        Ok((text, pass)) => {
            match &cli.out {
                Some(path) => {
                    if let Err(e) = fs::write(path, &text) {
                        eprintln!("{}", json!({ "error": "io", "message": e.to_string() }));
                        return ExitCode::from(EXIT_ERROR);
                    }
                }
                None => print!("{text}"),
            }
            if pass { ExitCode::SUCCESS } else { ExitCode::from(EXIT_FAIL) }
        }
        Err(e) => {
            eprintln!("{}", e.record());
            ExitCode::from(e.exit())
        }
    }
}
