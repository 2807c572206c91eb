//! Command-line interface to the psvf library.
//!
//! Exit codes: 0 on success, 1 when a verification or equivalence check
//! fails (or a skeleton mismatch is found), 2 on usage or input errors.

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use psvf::{
    classify_fold, classify_point, make_canonical, piecewise_from_json, sliding_field,
    Alphabet, Engine, FamilyKind, PiecewiseField, Point, PortraitOptions, RunConfig,
    SymbolWindow, Tolerances, Trajectory,
};
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "psvf", version, about = "Planar piecewise smooth vector fields")]
struct Cli {
    /// Optional `key = value` configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed override for randomized verification.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Inspect and render piecewise fields.
    #[command(subcommand)]
    Fields(FieldsCmd),
    /// Simulate, synthesize and read off trajectories.
    #[command(subcommand)]
    Traj(TrajCmd),
    /// Symbolic shift spaces: metrics, mixing, periodic counts.
    #[command(subcommand)]
    Shift(ShiftCmd),
    /// Numerical verification of conjugacies and equivalences.
    #[command(subcommand)]
    Verify(VerifyCmd),
}

#[derive(Args)]
struct FieldInput {
    /// Canonical family (`k2`, `k3`, .., `inf`, `bean`).
    #[arg(long, conflicts_with = "field")]
    family: Option<FamilyKind>,
    /// JSON field document path (schema: upper/lower components, switching).
    #[arg(long)]
    field: Option<PathBuf>,
}

impl FieldInput {
    fn load(&self) -> Result<(PiecewiseField, Option<FamilyKind>)> {
        match (&self.family, &self.field) {
            (Some(kind), None) => Ok((make_canonical(*kind).field, Some(*kind))),
            (None, Some(path)) => {
                let doc = std::fs::read_to_string(path)
                    .with_context(|| format!("reading {}", path.display()))?;
                Ok((piecewise_from_json(&doc)?, None))
            }
            _ => bail!("exactly one of --family or --field is required"),
        }
    }
}

#[derive(Subcommand)]
enum FieldsCmd {
    /// Classify switching-manifold points of a field.
    Describe {
        #[command(flatten)]
        input: FieldInput,
        /// Abscissas on the manifold to classify, comma separated.
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        at: Vec<f64>,
    },
    /// Render an SVG phase portrait.
    Portrait {
        #[command(flatten)]
        input: FieldInput,
        /// Output SVG path.
        #[arg(long)]
        out: PathBuf,
        /// Overlay a trajectory from a `t,x,y,governing` CSV file.
        #[arg(long)]
        traj: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum TrajCmd {
    /// Enumerate forward branches from a starting point and write the first
    /// branch as CSV; a JSON summary of the tree goes to standard output.
    Simulate {
        /// Canonical family.
        #[arg(long)]
        family: FamilyKind,
        #[arg(long, allow_negative_numbers = true)]
        x: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        y: f64,
        #[arg(long)]
        horizon: Option<f64>,
        /// CSV output path for the first branch.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Synthesize the trajectory of a symbol word (chain families) or a
    /// beat-value window (bean) and write it as CSV.
    Synth {
        #[arg(long)]
        family: FamilyKind,
        /// Comma-separated symbols (integers) or beat values in (0, 1].
        #[arg(long)]
        word: String,
        /// Index of the first entry.
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        offset: i64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Read a trajectory CSV back and print its itinerary.
    Itinerary {
        #[arg(long)]
        family: FamilyKind,
        /// Input CSV path.
        #[arg(long)]
        input: PathBuf,
        #[arg(long, allow_negative_numbers = true)]
        from: i64,
        #[arg(long, allow_negative_numbers = true)]
        to: i64,
    },
}

#[derive(Subcommand)]
enum ShiftCmd {
    /// Distance between two symbol windows, with its tail bound.
    Metric {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long)]
        a: String,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        offset_a: i64,
        #[arg(long)]
        b: String,
        #[arg(long, default_value_t = 0, allow_negative_numbers = true)]
        offset_b: i64,
    },
    /// Mixing time and periodic-point counts of a finite chain subshift.
    Mixing {
        /// Number of folds plus one (the finite family parameter).
        #[arg(long)]
        k: u32,
        /// Report periodic counts up to this period.
        #[arg(long, default_value_t = 6)]
        max_period: u32,
    },
}

#[derive(Subcommand)]
enum VerifyCmd {
    /// Check that itineraries conjugate the time-one (or first-return)
    /// shift to the symbol shift.
    Conjugacy {
        #[arg(long)]
        family: FamilyKind,
        #[arg(long, default_value_t = 16)]
        samples: usize,
    },
    /// Check topological equivalence of two chain-shaped fields.
    Equivalence {
        /// `kN`, or a JSON document adding `profile` and `range` keys to the
        /// field schema.
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
}

fn parse_symbols(word: &str) -> Result<Vec<i64>> {
    word.split(',')
        .map(|s| s.trim().parse::<i64>().map_err(|e| anyhow!("symbol {s:?}: {e}")))
        .collect()
}

fn parse_values(word: &str) -> Result<Vec<f64>> {
    word.split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| anyhow!("value {s:?}: {e}")))
        .collect()
}

fn load_config(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    if let Some(path) = &cli.config {
        let doc = std::fs::read_to_string(path)
            .with_context(|| format!("reading {}", path.display()))?;
        cfg.merge_str(&doc)?;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    Ok(cfg)
}

fn describe(input: &FieldInput, at: &[f64]) -> Result<()> {
    let (field, kind) = input.load()?;
    let tol = Tolerances::default();
    let mut rows = Vec::new();
    for &x in at {
        let p = Point::new(x, 0.0);
        let class = classify_point(&field, p, &tol)?;
        let fold = classify_fold(&field, p, &tol).ok();
        let slide = sliding_field(&field, p).ok();
        rows.push(serde_json::json!({
            "x": x,
            "class": format!("{class:?}"),
            "fold": fold.and_then(|f| f.two_fold).map(|t| format!("{t:?}")),
            "sliding_field": slide.map(|v| [v.x, v.y]),
        }));
    }
    let doc = serde_json::json!({
        "family": kind.map(|k| k.to_string()),
        "points": rows,
    });
    println!("{}", serde_json::to_string_pretty(&doc)?);
    Ok(())
}

fn synth_trajectory(family: FamilyKind, word: &str, offset: i64) -> Result<Trajectory> {
    match family {
        FamilyKind::Bean => {
            let values = parse_values(word)?;
            let w = psvf::RealWindow::new(offset, values)?;
            Ok(psvf::synthesize(&w)?)
        }
        FamilyKind::FiniteK(k) => {
            let symbols = parse_symbols(word)?;
            let w = SymbolWindow::new(Alphabet::Finite(2 * k as usize - 2), offset, symbols)?;
            Ok(Engine::new(family).trajectory_from_symbols(&w)?)
        }
        FamilyKind::Infinite => {
            let symbols = parse_symbols(word)?;
            let w = SymbolWindow::new(Alphabet::Integers, offset, symbols)?;
            Ok(Engine::new(family).trajectory_from_symbols(&w)?)
        }
    }
}

fn write_traj(gamma: &Trajectory, out: Option<&PathBuf>, samples: usize) -> Result<()> {
    match out {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .with_context(|| format!("creating {}", path.display()))?;
            psvf::write_csv(gamma, samples, &mut f)?;
        }
        None => {
            let mut stdout = std::io::stdout();
            psvf::write_csv(gamma, samples, &mut stdout)?;
        }
    }
    Ok(())
}

/// Runs a command; `Ok(true)` means all checks passed, `Ok(false)` a failed
/// verification (exit 1).
fn run(cli: &Cli) -> Result<bool> {
    let cfg = load_config(cli)?;
    match &cli.command {
        Command::Fields(FieldsCmd::Describe { input, at }) => {
            describe(input, at)?;
            Ok(true)
        }
        Command::Fields(FieldsCmd::Portrait { input, out, traj }) => {
            let (field, kind) = input.load()?;
            let gamma = match traj {
                Some(path) => Some(
                    psvf::read_csv(&std::fs::read_to_string(path)?)
                        .map_err(|e| anyhow!("{e}"))?,
                ),
                None => None,
            };
            let svg = psvf::portrait_svg(
                &field,
                kind,
                gamma.as_ref(),
                &PortraitOptions::default(),
            );
            std::fs::write(out, svg).with_context(|| format!("writing {}", out.display()))?;
            println!("wrote {}", out.display());
            Ok(true)
        }
        Command::Traj(TrajCmd::Simulate {
            family,
            x,
            y,
            horizon,
            out,
        }) => {
            let engine = Engine::new(*family);
            let horizon = horizon.unwrap_or(cfg.horizon);
            let tree = engine.enumerate_branches(Point::new(*x, *y), horizon, cfg.branch_budget);
            let summary = serde_json::json!({
                "family": family.to_string(),
                "horizon": horizon,
                "branches": tree.leaves.len(),
                "junctions": tree.junctions.len(),
                "depth": tree.depth,
                "truncated": tree.truncated,
                "junction_times": tree.junctions.iter().map(|j| j.time).collect::<Vec<_>>(),
            });
            println!("{}", serde_json::to_string_pretty(&summary)?);
            if let Some(first) = tree.leaves.first() {
                if out.is_some() {
                    write_traj(first, out.as_ref(), cfg.samples_per_arc)?;
                }
            }
            Ok(true)
        }
        Command::Traj(TrajCmd::Synth {
            family,
            word,
            offset,
            out,
        }) => {
            let gamma = synth_trajectory(*family, word, *offset)?;
            write_traj(&gamma, out.as_ref(), cfg.samples_per_arc)?;
            Ok(true)
        }
        Command::Traj(TrajCmd::Itinerary {
            family,
            input,
            from,
            to,
        }) => {
            let gamma = psvf::read_csv(&std::fs::read_to_string(input)?)
                .map_err(|e| anyhow!("{e}"))?;
            match family {
                FamilyKind::Bean => {
                    let w = psvf::beat_itinerary(&gamma)?;
                    println!("{}", serde_json::to_string_pretty(&w)?);
                }
                _ => {
                    let w = Engine::new(*family).itinerary(&gamma, *from, *to)?;
                    println!("{}", serde_json::to_string_pretty(&w)?);
                }
            }
            Ok(true)
        }
        Command::Shift(ShiftCmd::Metric {
            family,
            a,
            offset_a,
            b,
            offset_b,
        }) => {
            let alphabet = match family {
                FamilyKind::FiniteK(k) => Alphabet::Finite(2 * *k as usize - 2),
                FamilyKind::Infinite => Alphabet::Integers,
                FamilyKind::Bean => bail!("use beat windows for the bean family"),
            };
            let wa = SymbolWindow::new(alphabet, *offset_a, parse_symbols(a)?)?;
            let wb = SymbolWindow::new(alphabet, *offset_b, parse_symbols(b)?)?;
            let d = psvf::metric_d(&wa, &wb)?;
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "value": d.value,
                    "tail": d.tail,
                    "upper": d.upper(),
                }))?
            );
            Ok(true)
        }
        Command::Shift(ShiftCmd::Mixing { k, max_period }) => {
            if *k < 2 {
                bail!("finite families need k >= 2");
            }
            let m = psvf::sft_matrix(*k);
            let mixing = psvf::is_mixing(&m);
            let counts: Vec<u128> = (1..=*max_period).map(|n| psvf::periodic_count(&m, n)).collect();
            println!(
                "{}",
                serde_json::to_string_pretty(&serde_json::json!({
                    "k": k,
                    "alphabet": 2 * k - 2,
                    "mixing_time": mixing,
                    "periodic_counts": counts.iter().map(|c| *c as u64).collect::<Vec<_>>(),
                }))?
            );
            Ok(mixing.is_some())
        }
        Command::Verify(VerifyCmd::Conjugacy { family, samples }) => {
            let report = psvf::verify_conjugacy(*family, *samples, cfg.seed);
            println!("{}", serde_json::to_string_pretty(&report)?);
            Ok(report.all_pass())
        }
        Command::Verify(VerifyCmd::Equivalence { left, right }) => {
            let (zl, sl) = load_equiv_side(left)?;
            let (zr, sr) = load_equiv_side(right)?;
            match psvf::sigma_equivalence_check(&zl, &sl, &zr, &sr, &cfg.tolerances()) {
                Ok(report) => {
                    println!("{}", serde_json::to_string_pretty(&report)?);
                    Ok(report.equivalent)
                }
                Err(psvf::EquivError::SkeletonMismatch { reason }) => {
                    println!(
                        "{}",
                        serde_json::to_string_pretty(&serde_json::json!({
                            "equivalent": false,
                            "mismatch": reason,
                        }))?
                    );
                    Ok(false)
                }
                Err(e) => Err(e.into()),
            }
        }
    }
}

/// Loads one side of an equivalence check: a finite canonical family name,
/// or a JSON document with the field schema plus `profile` and `range`.
fn load_equiv_side(side: &str) -> Result<(PiecewiseField, psvf::InvariantSample)> {
    if let Ok(FamilyKind::FiniteK(k)) = side.parse::<FamilyKind>() {
        let fam = make_canonical(FamilyKind::FiniteK(k));
        let p = psvf::Pk::new(k);
        let (lo, hi) = (p.r0(), p.r1());
        let sample = psvf::sample_profile(move |x| p.value(x), lo, hi, 1600);
        return Ok((fam.field, sample));
    }
    let doc = std::fs::read_to_string(side).with_context(|| format!("reading {side}"))?;
    let value: serde_json::Value = serde_json::from_str(&doc)?;
    let field = piecewise_from_json(&doc)?;
    let profile_src = value
        .get("profile")
        .and_then(|v| v.as_str())
        .ok_or_else(|| anyhow!("{side}: missing \"profile\" expression"))?;
    let range = value
        .get("range")
        .and_then(|v| v.as_array())
        .and_then(|a| {
            let lo = a.first()?.as_f64()?;
            let hi = a.get(1)?.as_f64()?;
            Some((lo, hi))
        })
        .ok_or_else(|| anyhow!("{side}: missing \"range\" pair"))?;
    let profile = psvf::Expr::parse(profile_src)?;
    let sample = psvf::sample_profile(
        move |x| profile.eval(Point::new(x, 0.0)),
        range.0,
        range.1,
        1600,
    );
    Ok((field, sample))
}

fn main() {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => {}
        Ok(false) => std::process::exit(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            std::process::exit(2);
        }
    }
}
