use clap::{Parser, Subcommand, ValueEnum};
use lbounds::certify::{certify_residual_negative, CertStatus, Region, ResidualKind, ResidualSpec};
use lbounds::characters::enumerate_characters_mod;
use lbounds::harness::{self, SweepConfig};
use lbounds::{bounds, lfun};
use std::path::PathBuf;
use std::process::ExitCode;

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_USAGE: u8 = 64;

#[derive(Parser)]
#[command(
    name = "lbounds",
    about = "Certified Dirichlet L-function values on the 1-line and verification of their explicit upper bounds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Hurwitz,
    Psum,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Backlund,
    Psum,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one |L(1+it, chi)| with a certified radius and check the bounds
    Eval {
        #[arg(long)]
        q: u64,
        /// Index of the character in the canonical non-principal enumeration
        #[arg(long)]
        chi: usize,
        #[arg(long)]
        t: f64,
        /// Target error radius
        #[arg(long, default_value_t = 1e-6)]
        radius: f64,
        #[arg(long, value_enum, default_value = "hurwitz")]
        method: MethodArg,
    },
    /// Run a verification sweep from a config file and write the CSV report
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Overrides output_path from the config
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Certify that a proof residual is negative on a region
    Certify {
        #[arg(long, value_enum)]
        kind: KindArg,
        #[arg(long)]
        m: f64,
        #[arg(long)]
        b: Option<f64>,
        #[arg(long = "t-min")]
        t_min: f64,
        #[arg(long = "t-max", default_value_t = 1e6)]
        t_max: f64,
        #[arg(long = "q-min")]
        q_min: Option<f64>,
        #[arg(long = "q-max")]
        q_max: Option<f64>,
        #[arg(long, default_value_t = 1e-3)]
        tol: f64,
        /// Write the certificate here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the identity / regression checks over small moduli
    Identities {
        #[arg(long = "q-max", default_value_t = 12)]
        q_max: u64,
    },
}

fn run_eval(q: u64, chi_index: usize, t: f64, radius: f64, method: MethodArg) -> Result<u8, String> {
    let chis = enumerate_characters_mod(q, false);
    if chis.is_empty() {
        return Err(format!("no non-principal characters mod {q}"));
    }
    let chi = chis
        .get(chi_index)
        .ok_or_else(|| format!("chi index {chi_index} out of range (mod {q} has {} characters)", chis.len()))?;
    let point = match method {
        MethodArg::Hurwitz => lfun::l_eval_hurwitz(chi, t, radius),
        MethodArg::Psum => {
            let n = harness::psum_truncation(q, t, radius);
            lfun::l_eval_partial_sum(chi, t, n)
        }
    }
    .map_err(|e| e.to_string())?;
    println!("q: {q}");
    println!(
        "chi: {} (exponents {})",
        chi_index,
        chi.exponents()
            .iter()
            .map(|e| e.to_string())
            .collect::<Vec<_>>()
            .join(";")
    );
    println!("t: {}", harness::fmt_float(t));
    println!("method: {}", point.method.as_str());
    println!("l_abs_mid: {}", harness::fmt_float(point.value.mid.norm()));
    println!("l_abs_radius: {}", harness::fmt_float(point.value.radius));
    let mut worst = EXIT_OK;
    let upper = point.value.abs_upper();
    let checks: [(&str, Option<f64>); 3] = [
        ("theorem1", bounds::theorem1_bound(q, t).ok()),
        ("theorem2", bounds::theorem2_bound(q, t).ok()),
        ("corollary", bounds::corollary_bound(q, t).ok()),
    ];
    for (name, bound) in checks {
        if let Some(b) = bound {
            let margin = b - upper;
            let verdict = if upper < b {
                "PASS"
            } else if point.value.abs_lower() > b {
                worst = EXIT_FAIL;
                "FAIL"
            } else {
                if worst == EXIT_OK {
                    worst = EXIT_INCONCLUSIVE;
                }
                "INCONCLUSIVE"
            };
            println!(
                "{name}: bound={} margin={} verdict={verdict}",
                harness::fmt_float(b),
                harness::fmt_float(margin)
            );
        }
    }
    Ok(worst)
}

fn run(cli: Cli) -> Result<u8, String> {
    match cli.command {
        Command::Eval {
            q,
            chi,
            t,
            radius,
            method,
        } => run_eval(q, chi, t, radius, method),
        Command::Sweep { config, out } => {
            let text = std::fs::read_to_string(&config)
                .map_err(|e| format!("cannot read {}: {e}", config.display()))?;
            let mut cfg = SweepConfig::parse(&text).map_err(|e| e.to_string())?;
            if let Some(path) = out {
                cfg.output_path = Some(path);
            }
            let report = harness::run_sweep(&cfg).map_err(|e| e.to_string())?;
            if let Some(path) = &cfg.output_path {
                harness::write_csv(&report, path).map_err(|e| e.to_string())?;
            } else {
                print!("{}", harness::csv_string(&report));
            }
            let s = &report.summary;
            eprintln!(
                "rows={} pass={} fail={} inconclusive={} min_margin={} at {}",
                report.rows.len(),
                s.pass,
                s.fail,
                s.inconclusive,
                harness::fmt_float(s.min_margin),
                s.min_margin_at
            );
            Ok(report.exit_code() as u8)
        }
        Command::Certify {
            kind,
            m,
            b,
            t_min,
            t_max,
            q_min,
            q_max,
            tol,
            out,
        } => {
            let spec = match kind {
                KindArg::Backlund => {
                    if q_min.is_some() || q_max.is_some() {
                        return Err("backlund residual takes no q range".into());
                    }
                    ResidualSpec {
                        kind: ResidualKind::Backlund { m },
                        region: Region {
                            q: None,
                            t: (t_min, t_max),
                        },
                    }
                }
                KindArg::Psum => ResidualSpec {
                    kind: ResidualKind::PartialSummation {
                        m,
                        b: b.ok_or("psum residual requires --b")?,
                    },
                    region: Region {
                        q: Some((q_min.unwrap_or(2.0), q_max.unwrap_or(1e4))),
                        t: (t_min, t_max),
                    },
                },
            };
            // malformed regions are usage errors, not certification failures
            spec.validate().map_err(|e| e.to_string())?;
            let cert = certify_residual_negative(&spec, tol).map_err(|e| e.to_string())?;
            let text = cert.to_text();
            match out {
                Some(path) => std::fs::write(&path, &text).map_err(|e| e.to_string())?,
                None => print!("{text}"),
            }
            Ok(match cert.status {
                CertStatus::Certified => EXIT_OK,
                CertStatus::Failed => EXIT_FAIL,
                CertStatus::EvidenceOnly => EXIT_INCONCLUSIVE,
            })
        }
        Command::Identities { q_max } => {
            let checks = harness::run_identities(q_max).map_err(|e| e.to_string())?;
            let mut failed = 0;
            for c in &checks {
                println!("{} {}", if c.passed { "ok  " } else { "FAIL" }, c.name);
                if !c.passed {
                    eprintln!("  {}", c.detail);
                    failed += 1;
                }
            }
            println!("{} checks, {} failed", checks.len(), failed);
            Ok(if failed > 0 { EXIT_FAIL } else { EXIT_OK })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // help/version requests are not usage errors
            use clap::error::ErrorKind;
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::from(EXIT_OK),
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}
