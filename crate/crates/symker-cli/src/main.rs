//! Command-line experiment harness over the symker library.
//!
//! Subcommands mirror the experiment layer: pointwise kernel evaluation,
//! envelope sandwiches, weight classification, axiom certification,
//! convergence/divergence runs, boundedness probes, the distinguished
//! (solvable-group) reruns, and the weight-zoo dump. Exit code 0 means
//! pass, 1 an experiment failure, 2 a usage error.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use symker::classcert;
use symker::experiments::{
    run_boundedness_probe, run_converge, run_distinguished, sandwich_band, write_outputs,
    ExperimentConfig,
};
use symker::kernels::{heat_h3, KernelFamily};
use symker::quad::QuadratureSpec;
use symker::weights::{dp_membership, parse_weight, zoo_json, Verdict};
use symker::RootData;

#[derive(Parser)]
#[command(name = "symker", version, about = "evolution-kernel experiments on hyperbolic 3-space")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct FamilyArgs {
    /// Kernel family: heat, frac_heat or frac_poisson.
    #[arg(long)]
    family: String,
    /// Spectral parameter in [0, 1].
    #[arg(long, default_value_t = 1.0)]
    zeta: f64,
    /// Fractional-heat order in (0, 2).
    #[arg(long)]
    alpha: Option<f64>,
    /// Extension order in (0, 1).
    #[arg(long)]
    sigma: Option<f64>,
}

impl FamilyArgs {
    fn build(&self) -> Result<KernelFamily, String> {
        match self.family.as_str() {
            "heat" => KernelFamily::heat(self.zeta).map_err(|e| e.to_string()),
            "frac_heat" => {
                let alpha = self.alpha.ok_or("frac_heat needs --alpha")?;
                KernelFamily::frac_heat(alpha, self.zeta).map_err(|e| e.to_string())
            }
            "frac_poisson" => {
                let sigma = self.sigma.ok_or("frac_poisson needs --sigma")?;
                KernelFamily::frac_poisson(sigma, self.zeta).map_err(|e| e.to_string())
            }
            other => Err(format!("unknown family: {other}")),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a kernel pointwise.
    KernelEval {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        t: f64,
        #[arg(long)]
        r: f64,
    },
    /// Fitted kernel/envelope bands per regime.
    Sandwich {
        #[command(flatten)]
        family: FamilyArgs,
        /// Regime threshold κ.
        #[arg(long, default_value_t = 1.0)]
        kappa: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weight-class membership verdict.
    WeightClass {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        p: f64,
        /// Weight descriptor, e.g. "one", "exp:-3", "zoo:frontier_member".
        #[arg(long)]
        weight: String,
    },
    /// Certify the kernel-class axioms for one family.
    Certify {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long = "R", default_value_t = 1.0)]
        big_r: f64,
        #[arg(long, default_value_t = 0.1)]
        a: f64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Pointwise-convergence run (members) or divergence witness
    /// (non-members).
    Converge {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 10)]
        k_max: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Weighted-boundedness probe with the companion weight.
    Probe {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long)]
        weight: String,
        #[arg(long)]
        p: f64,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Distinguished-Laplacian rerun: conjugation identity and
    /// right-measure maximal band.
    Distinguished {
        #[command(flatten)]
        family: FamilyArgs,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value = "results")]
        out: PathBuf,
    },
    /// Dump the curated weight zoo.
    Zoo {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Ok(threads) = std::env::var("SYMKER_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(cli) {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn run(cli: Cli) -> Result<bool, String> {
    match cli.command {
        Command::KernelEval { family, t, r } => {
            let fam = family.build()?;
            let value = match fam.kind {
                symker::kernels::KernelKind::Heat => heat_h3(t, r, fam.zeta),
                _ => {
                    let spec =
                        QuadratureSpec { rel_tol: 1e-10, abs_tol: 1e-280, max_subdivisions: 400 };
                    let ev = fam.evaluator().map_err(|e| e.to_string())?.with_spec(spec);
                    ev.eval(t, r).map_err(|e| e.to_string())?
                }
            };
            println!("{value:.10e}");
            Ok(true)
        }
        Command::Sandwich { family, kappa, out } => {
            let fam = family.build()?;
            let report = sandwich_band(&fam, kappa).map_err(|e| e.to_string())?;
            for (label, lo, hi, lo2, hi2) in &report.bands {
                println!(
                    "{label}: band [{lo:.6e}, {hi:.6e}] (refined [{lo2:.6e}, {hi2:.6e}]), \
                     c2/c1 = {:.4}",
                    hi / lo
                );
            }
            println!("max refinement drift: {:.3e}", report.max_drift);
            if let Some(path) = out {
                std::fs::write(&path, report.to_json()).map_err(|e| e.to_string())?;
                println!("wrote {}", path.display());
            }
            Ok(report.stable)
        }
        Command::WeightClass { family, p, weight } => {
            let fam = family.build()?;
            let v = parse_weight(&weight).map_err(|e| e.to_string())?;
            let report = dp_membership(&v, &fam, p).map_err(|e| e.to_string())?;
            let word = match report.verdict {
                Verdict::Member => "member",
                Verdict::NonMember => "non-member",
                Verdict::Borderline => "borderline",
            };
            println!("{word}");
            if let Some(t0) = report.witness_t0 {
                println!("witness t0 = {t0}");
            }
            println!(
                "tail trace: dexp {:+.3e}, gauss {:+.3e}, exp {:+.3e}, poly {:+.3}",
                report.tail_trace.dexp,
                report.tail_trace.gauss,
                report.tail_trace.exp,
                report.tail_trace.poly
            );
            println!(
                "numeric trend: {} (consistent: {})",
                if report.numeric_growing { "growing" } else { "stabilizing" },
                report.consistent
            );
            Ok(report.consistent)
        }
        Command::Certify { family, big_r, a, out } => {
            let fam = family.build()?;
            let rd = RootData::h3();
            let report = classcert::certify(&fam, &rd, big_r, a).map_err(|e| e.to_string())?;
            print!("{}", report.summary());
            std::fs::create_dir_all(&out).map_err(|e| e.to_string())?;
            let path = out
                .join(format!("certify-{}.json", fam.label().replace(['(', ')', ',', '='], "-")));
            std::fs::write(&path, report.to_json()).map_err(|e| e.to_string())?;
            println!("wrote {}", path.display());
            Ok(report.pass)
        }
        Command::Converge { family, weight, p, k_max, seed, out } => {
            let fam = family.build()?;
            let mut config = ExperimentConfig::converge_default(fam, &weight, p);
            config.k_max = k_max;
            config.seed = seed;
            let table = run_converge(&config).map_err(|e| e.to_string())?;
            println!("{}", table.verdict);
            let (csv, json) = write_outputs(&table, &out).map_err(|e| e.to_string())?;
            println!("wrote {csv}\nwrote {json}");
            // plot-ready two-column files per evaluation point
            for &x in &config.eval_dists {
                let mut data = String::new();
                for row in table.rows.iter().filter(|r| r.x_dist == x) {
                    data.push_str(&format!("{:.8e} {:.8e}\n", row.t, row.error));
                }
                if !data.is_empty() {
                    let path = out.join(format!("converge-{}-curve-x{x}.dat", table.config_hash));
                    std::fs::write(&path, data).map_err(|e| e.to_string())?;
                }
            }
            Ok(table.verdict.starts_with("converged")
                || table.verdict.starts_with("divergence witness triggered")
                || table.verdict.starts_with("borderline"))
        }
        Command::Probe { family, weight, p, seed, out } => {
            let fam = family.build()?;
            let mut config = ExperimentConfig::converge_default(fam, &weight, p);
            config.seed = seed;
            let table = run_boundedness_probe(&config).map_err(|e| e.to_string())?;
            println!("{}", table.verdict);
            let (csv, json) = write_outputs(&table, &out).map_err(|e| e.to_string())?;
            println!("wrote {csv}\nwrote {json}");
            Ok(table.verdict.starts_with("bounded"))
        }
        Command::Distinguished { family, seed, out } => {
            let fam = family.build()?;
            let mut config = ExperimentConfig::converge_default(fam, "one", 2.0);
            config.seed = seed;
            let table = run_distinguished(&config).map_err(|e| e.to_string())?;
            println!("{}", table.verdict);
            let (csv, json) = write_outputs(&table, &out).map_err(|e| e.to_string())?;
            println!("wrote {csv}\nwrote {json}");
            Ok(table.verdict.starts_with("conjugation identity"))
        }
        Command::Zoo { out } => {
            let json = zoo_json();
            match out {
                Some(path) => {
                    std::fs::write(&path, &json).map_err(|e| e.to_string())?;
                    println!("wrote {}", path.display());
                }
                None => println!("{json}"),
            }
            Ok(true)
        }
    }
}
