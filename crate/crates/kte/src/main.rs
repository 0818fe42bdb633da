//! `kte`: transport-energy bound verification on grid-discretized measures.
//!
//! Subcommands mirror the library layers: `cost` (Young-function and Δ₂
//! diagnostics), `hopflax` (infimum convolution), `norm` (Luxemburg/Orlicz),
//! `dualnorm` (dual Sobolev norm), `ot` (exact transport), `bvp` (the θ
//! boundary-value problem), and `verify` (seeded theorem checks emitting one
//! JSON report per line, exit code 0 only if every case passes).

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand};
use kte_core::harness::{self, MeasureKind, Theorem};
use kte_core::measure::VectorSample;
use kte_core::sobolev::{self, DualNormProblem};
use kte_core::{bvp, hopflax, orlicz, transport};
use kte_core::{CostSpec, DiscreteMeasure, GridField, GridGeometry};
use serde_json::json;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "kte", version, about = "energy bounds for Kantorovich transport distances")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Young-function profile and Δ₂ diagnostics of a cost
    Cost {
        #[arg(long)]
        cost: PathBuf,
    },
    /// Hopf-Lax operator Q_t f on a grid field
    Hopflax {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        t: f64,
        /// write Q_t f as CSV
        #[arg(long)]
        out: Option<PathBuf>,
        /// also report the semigroup residual against Q_t(Q_s f)
        #[arg(long)]
        semigroup_s: Option<f64>,
    },
    /// Luxemburg and Orlicz pseudo-norms of a vector sample
    Norm {
        #[arg(long)]
        u: PathBuf,
        #[arg(long)]
        lam: PathBuf,
        #[arg(long)]
        cost: PathBuf,
    },
    /// Dual Sobolev norm ||nu - mu||_{H^{-1,L}(lam)} on a grid
    Dualnorm {
        #[arg(long)]
        problem: PathBuf,
        /// write the witness field as CSV
        #[arg(long)]
        emit_witness: Option<PathBuf>,
    },
    /// Exact optimal transport between two discrete measures
    Ot {
        #[arg(long)]
        mu: PathBuf,
        #[arg(long)]
        nu: PathBuf,
        #[arg(long)]
        cost: PathBuf,
        /// cross-check against the 1D monotone-coupling oracle
        #[arg(long, value_name = "KIND")]
        oracle: Option<String>,
        /// write the plan as CSV rows i,j,mass
        #[arg(long)]
        emit_plan: Option<PathBuf>,
    },
    /// Boundary-value problem: delta(c) and theta(t)
    Bvp {
        #[arg(long)]
        cost: PathBuf,
        #[arg(long)]
        c: f64,
        /// write t,theta,theta_prime samples as CSV
        #[arg(long)]
        emit_theta: Option<PathBuf>,
    },
    /// Seeded energy-bound verification; one JSON report per line
    Verify {
        /// 11, 12, or 13
        #[arg(long)]
        theorem: String,
        #[arg(long)]
        cost: PathBuf,
        /// inclusive range, e.g. 0..99
        #[arg(long)]
        seeds: String,
        /// e.g. N=256,range=[-2,2]
        #[arg(long)]
        grid: String,
        /// bumps, mixture, or pwconst
        #[arg(long, default_value = "bumps")]
        kind: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_cost(path: &PathBuf) -> Result<CostSpec> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(CostSpec::from_json(&src)?)
}

fn load_measure(path: &PathBuf) -> Result<DiscreteMeasure> {
    let src = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    Ok(DiscreteMeasure::from_json(&src)?)
}

fn load_field(path: &PathBuf) -> Result<GridField> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    Ok(GridField::read_csv(std::io::BufReader::new(file))?)
}

/// `a..b` as an inclusive seed range.
fn parse_seeds(s: &str) -> Result<std::ops::RangeInclusive<u64>> {
    let (a, b) = s
        .split_once("..")
        .with_context(|| format!("seed range {s:?} must look like 0..99"))?;
    Ok(a.trim().parse()?..=b.trim().parse()?)
}

/// `N=256,range=[-2,2]` as a 1D grid.
fn parse_grid(s: &str) -> Result<GridGeometry> {
    let mut n = None;
    let mut lo = None;
    for part in s.split(',') {
        if let Some(v) = part.strip_prefix("N=") {
            n = Some(v.trim().parse::<usize>()?);
        } else if let Some(v) = part.strip_prefix("range=[") {
            lo = Some(v.trim().parse::<f64>()?);
        } else if let Some(v) = part.strip_suffix(']') {
            let (Some(n), Some(lo)) = (n, lo) else {
                bail!("grid spec {s:?} must look like N=256,range=[-2,2]");
            };
            let hi = v.trim().parse::<f64>()?;
            if !(hi > lo) {
                bail!("grid range must satisfy lo < hi");
            }
            return Ok(GridGeometry::line_span(lo, hi, n)?);
        }
    }
    bail!("grid spec {s:?} must look like N=256,range=[-2,2]")
}

fn master_seed() -> u64 {
    std::env::var("KTE_SEED")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Cost { cost } => {
            let spec = load_cost(&cost)?;
            let prof = spec.young_profile()?;
            let d2 = spec.delta2_diagnostic()?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "dim": spec.dim(),
                    "superlinear": spec.superlinear(),
                    "p_minus": prof.p_minus,
                    "p_plus": prof.p_plus,
                    "p_error": prof.p_error,
                    "gamma": prof.gamma,
                    "a_thm12": prof.a_thm12,
                    "a_thm13": prof.a_thm13,
                    "analytic_profile": prof.analytic,
                    "delta2": d2,
                }))?
            );
        }
        Command::Hopflax {
            field,
            cost,
            t,
            out,
            semigroup_s,
        } => {
            let f = load_field(&field)?;
            let spec = load_cost(&cost)?;
            let q = hopflax::inf_convolve(&f, &spec, t)?;
            let clipped = q.clipped.iter().filter(|&&c| c).count();
            let mut summary = json!({
                "t": t,
                "max_abs": q.field.max_abs(),
                "lipschitz": q.field.lip_estimate(),
                "clipped_nodes": clipped,
            });
            if let Some(s) = semigroup_s {
                summary["semigroup_residual"] =
                    json!(hopflax::semigroup_residual(&f, &spec, t, s)?);
            }
            if let Some(path) = out {
                let mut w = fs::File::create(&path)?;
                q.field.write_csv(&mut w)?;
                summary["out"] = json!(path.display().to_string());
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Norm { u, lam, cost } => {
            let lam = load_measure(&lam)?;
            let spec = load_cost(&cost)?;
            let sample: VectorSample =
                serde_json::from_str(&fs::read_to_string(&u)?).context("parsing sample")?;
            let lux = orlicz::luxemburg_norm(&sample, &spec, &lam)?;
            let orl = orlicz::orlicz_norm(&sample, &spec, &lam)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({"luxemburg": lux, "orlicz": orl}))?
            );
        }
        Command::Dualnorm {
            problem,
            emit_witness,
        } => {
            #[derive(serde::Deserialize)]
            struct ProblemRepr {
                grid: GridGeometry,
                mu: Vec<f64>,
                nu: Vec<f64>,
                lam: Vec<f64>,
                cost: serde_json::Value,
            }
            let repr: ProblemRepr = serde_json::from_str(&fs::read_to_string(&problem)?)?;
            let spec = CostSpec::from_json(&repr.cost.to_string())?;
            let prob = DualNormProblem::new(repr.grid, repr.mu, repr.nu, repr.lam, spec)?;
            let sol = sobolev::dual_sobolev_norm(&prob, master_seed())?;
            if let Some(path) = emit_witness {
                let mut w = fs::File::create(&path)?;
                sol.witness.write_csv(&mut w)?;
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "value": sol.value,
                    "restarts": sol.restarts,
                    "iterations": sol.iterations,
                    "constraint_residual": sol.constraint_residual,
                }))?
            );
        }
        Command::Ot {
            mu,
            nu,
            cost,
            oracle,
            emit_plan,
        } => {
            let mu = load_measure(&mu)?;
            let nu = load_measure(&nu)?;
            let spec = load_cost(&cost)?;
            let plan = transport::solve_ot(&mu, &nu, &spec)?;
            let mut summary = json!({
                "cost": plan.cost,
                "duality_gap": plan.duality_gap,
                "entries": plan.entries.len(),
                "support_optimal": transport::support_optimality_check(&plan, &spec)?,
            });
            match oracle.as_deref() {
                None => {}
                Some("1d") => {
                    let (oc, _) = transport::ot_1d_monotone(&mu, &nu, &spec)?;
                    summary["oracle_cost"] = json!(oc);
                    summary["oracle_gap"] = json!((plan.cost - oc).abs());
                }
                Some(other) => bail!("unknown oracle {other:?} (expected \"1d\")"),
            }
            if let Some(path) = emit_plan {
                let mut w = fs::File::create(&path)?;
                writeln!(w, "i,j,mass")?;
                for (i, j, m) in &plan.entries {
                    writeln!(w, "{i},{j},{m}")?;
                }
            }
            println!("{}", serde_json::to_string_pretty(&summary)?);
        }
        Command::Bvp { cost, c, emit_theta } => {
            let spec = load_cost(&cost)?;
            let prof = spec.young_profile()?;
            let sol = bvp::solve_theta(c, prof)?;
            let ic = bvp::interpolation_constant(&sol, prof)?;
            if let Some(path) = emit_theta {
                let mut w = fs::File::create(&path)?;
                writeln!(w, "t,theta,theta_prime")?;
                for k in 0..=1024 {
                    let t = k as f64 / 1024.0;
                    writeln!(w, "{t},{},{}", sol.theta(t), sol.theta_prime(t))?;
                }
            }
            println!(
                "{}",
                serde_json::to_string_pretty(&json!({
                    "c": c,
                    "delta": sol.delta,
                    "r1": sol.r1,
                    "residual_sup": sol.residual_sup,
                    "interpolation_constant": ic,
                    "a_phi_c_bound": prof.a_thm12 * prof.phi(c),
                }))?
            );
        }
        Command::Verify {
            theorem,
            cost,
            seeds,
            grid,
            kind,
            out,
        } => {
            let spec = load_cost(&cost)?;
            let theorem = Theorem::parse(&theorem)?;
            let kind = MeasureKind::parse(&kind)?;
            let grid = parse_grid(&grid)?;
            let seeds = parse_seeds(&seeds)?;
            let reports =
                harness::run_energy_cases(&grid, &spec, theorem, kind, seeds, master_seed())?;
            let mut sink: Box<dyn Write> = match &out {
                Some(path) => Box::new(fs::File::create(path)?),
                None => Box::new(std::io::stdout()),
            };
            let mut failures = 0usize;
            for r in &reports {
                writeln!(sink, "{}", r.jsonl_line())?;
                if !r.pass {
                    failures += 1;
                }
            }
            drop(sink);
            eprintln!(
                "{} cases, {} failed, min margin {:.6}",
                reports.len(),
                failures,
                reports
                    .iter()
                    .map(|r| r.margin)
                    .fold(f64::INFINITY, f64::min)
            );
            if failures > 0 {
                std::process::exit(1);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_range_is_inclusive() {
        let r = parse_seeds("0..99").unwrap();
        assert_eq!(r.clone().count(), 100);
        assert_eq!(*r.end(), 99);
        assert!(parse_seeds("17").is_err());
    }

    #[test]
    fn grid_spec_parses() {
        let g = parse_grid("N=256,range=[-2,2]").unwrap();
        assert_eq!(g.len(), 256);
        let (lo, hi) = g.axes[0].span();
        assert_eq!(lo, -2.0);
        assert!((hi - 2.0).abs() < 1e-12);
        assert!(parse_grid("N=256").is_err());
        assert!(parse_grid("N=16,range=[2,-2]").is_err());
    }
}
