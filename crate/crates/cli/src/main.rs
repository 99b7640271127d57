mod config;
mod output;

use std::io::Write;
use std::process::ExitCode;

use clap::{CommandFactory, Parser};
use isingrect::contour::uplane_field;
use isingrect::identities::{run_identity_suite, SuiteOptions};
use isingrect::partition::{assemble_logz, AssembleOptions, PartitionResult};
use isingrect::spectrum::Spectrum;
use rayon::prelude::*;
use serde::Serialize;

use config::{couplings, parse_precision, routes, Cli, Command, Format, RunConfig, UsageError};
use output::*;

const EXIT_NUMERICAL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_GATING: u8 = 3;

enum Failure {
    Usage(String),
    Numerical(String),
}

impl From<UsageError> for Failure {
    fn from(e: UsageError) -> Self {
        Failure::Usage(e.0)
    }
}

fn json<T: Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn emit(out: &Option<std::path::PathBuf>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(text.as_bytes()).map_err(|e| Failure::Numerical(e.to_string()))
        }
    }
}

fn strip_timings(r: &mut PartitionResult) {
    for rec in r.routes.values_mut() {
        rec.seconds = 0.0;
    }
}

fn failed(r: &PartitionResult) -> bool {
    r.has_errors() || r.routes.values().all(|x| x.log_z.is_none())
}

fn render_partition(r: &PartitionResult, f: Format) -> String {
    match f {
        Format::Json => json(r),
        Format::Csv => partition_csv(r),
        Format::Text => partition_text(r),
    }
}

fn run(cli: &Cli) -> Result<u8, Failure> {
    if cli.workers > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.workers)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    match &cli.command {
        Command::Z { sys, route, timings } => {
            let cfg = RunConfig::new(cli, sys, Format::Json)?;
            let rs = routes(route)?;
            let opts = AssembleOptions { precision: cfg.precision, swap_check: false };
            let mut r = assemble_logz(&cfg.couplings, &rs, &opts);
            if !timings {
                strip_timings(&mut r);
            }
            emit(&cfg.out, &render_partition(&r, cfg.format))?;
            Ok(if failed(&r) { EXIT_NUMERICAL } else { 0 })
        }
        Command::Compare { sys, timings } => {
            let cfg = RunConfig::new(cli, sys, Format::Json)?;
            let opts = AssembleOptions { precision: cfg.precision, swap_check: true };
            let mut r = assemble_logz(&cfg.couplings, &isingrect::Route::ALL, &opts);
            if !timings {
                strip_timings(&mut r);
            }
            let bad = failed(&r);
            let rep = CompareReport::new(r);
            let text = match cfg.format {
                Format::Json => json(&rep),
                Format::Csv => partition_csv(&rep.result),
                Format::Text => {
                    let mut t = partition_text(&rep.result);
                    t.push_str(&format!("max pairwise deviation {:.3e}\n", rep.max_pairwise));
                    t
                }
            };
            emit(&cfg.out, &text)?;
            Ok(if bad { EXIT_NUMERICAL } else { 0 })
        }
        Command::Spectrum { sys } => {
            let cfg = RunConfig::new(cli, sys, Format::Json)?;
            cfg.couplings.require_even_m().map_err(|e| Failure::Usage(e.to_string()))?;
            let s = Spectrum::<f64>::compute(&cfg.couplings).map_err(|e| Failure::Numerical(e.to_string()))?;
            let rows = spectrum_rows(&s);
            let text = match cfg.format {
                Format::Json => json(&rows),
                Format::Csv => spectrum_csv(&rows),
                Format::Text => spectrum_text(&rows),
            };
            emit(&cfg.out, &text)?;
            Ok(0)
        }
        Command::Identities { sys, tol, samples } => {
            let cfg = RunConfig::new(cli, sys, Format::Json)?;
            let opts = SuiteOptions { tol: *tol, samples: *samples, seed: cfg.seed };
            let rep = run_identity_suite(&cfg.couplings, opts).map_err(|e| Failure::Numerical(e.to_string()))?;
            let text = match cfg.format {
                Format::Json => json(&rep),
                Format::Csv => identities_csv(&rep),
                Format::Text => identities_text(&rep),
            };
            emit(&cfg.out, &text)?;
            Ok(if rep.passed { 0 } else { EXIT_GATING })
        }
        Command::Scan { l, m, eta_frac, k_from, k_to, steps, route } => {
            let precision = parse_precision(&cli.precision_bits)?;
            let rs = routes(route)?;
            if *steps < 1 {
                return Err(Failure::Usage("--steps must be at least 1".into()));
            }
            let ks: Vec<f64> = (0..*steps)
                .map(|i| if *steps == 1 { *k_from } else { k_from + (k_to - k_from) * i as f64 / (*steps - 1) as f64 })
                .collect();
            let mut cs = Vec::new();
            for &k in &ks {
                let sys = config::SystemArgs { l: *l, m: *m, kh: None, kv: None, k: Some(k), eta_frac: Some(*eta_frac) };
                cs.push(couplings(&sys)?);
            }
            let opts = AssembleOptions { precision, swap_check: false };
            let mut results: Vec<(usize, PartitionResult)> =
                cs.par_iter().enumerate().map(|(i, c)| (i, assemble_logz(c, &rs, &opts))).collect();
            results.sort_by_key(|(i, _)| *i);
            let bad = results.iter().any(|(_, r)| failed(r));
            let names: Vec<String> = rs.iter().map(|r| r.name().to_string()).collect();
            let rows: Vec<ScanRow> = results
                .into_iter()
                .zip(&ks)
                .map(|((_, r), &k)| ScanRow {
                    k,
                    k_h: r.k_h,
                    k_v: r.k_v,
                    log_z: r.routes.iter().map(|(n, v)| (n.clone(), v.log_z)).collect(),
                    max_deviation: r.max_pairwise_deviation(),
                })
                .collect();
            let text = match cli.format.unwrap_or(Format::Csv) {
                Format::Json => json(&rows),
                _ => scan_csv(&rows, &names),
            };
            emit(&cli.out, &text)?;
            Ok(if bad { EXIT_NUMERICAL } else { 0 })
        }
        Command::Uplane { sys, n, grid } => {
            let cfg = RunConfig::new(cli, sys, Format::Text)?;
            if cfg.format != Format::Text {
                return Err(Failure::Usage("uplane writes the text format only".into()));
            }
            cfg.couplings.require_even_m().map_err(|e| Failure::Usage(e.to_string()))?;
            let s = Spectrum::<f64>::compute(&cfg.couplings).map_err(|e| Failure::Numerical(e.to_string()))?;
            let f = uplane_field(*n, *grid, &s).map_err(|e| Failure::Usage(e.to_string()))?;
            emit(&cfg.out, &f.to_text())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\n{}\nRun with --help for details.", Cli::command().render_usage());
            ExitCode::from(EXIT_USAGE)
        }
        Err(Failure::Numerical(msg)) => {
            let diag = serde_json::json!({ "error": "numerical_failure", "message": msg });
            println!("{}", serde_json::to_string_pretty(&diag).unwrap_or_default());
            ExitCode::from(EXIT_NUMERICAL)
        }
    }
}
