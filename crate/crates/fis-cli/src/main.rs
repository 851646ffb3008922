//! `fis` — command-line front end: one subcommand per analysis pillar
//! (surface meshes, dimension estimates, overlap certificates, the exact
//! matrix-group chain, and the symbolic separation search), each emitting a
//! deterministic JSON report.

use clap::{Args, Parser, Subcommand};
use fis_core::attractor::{
    box_count, chaos_game, export_csv_table, export_obj, export_pgm, subdivision_mesh,
    DEFAULT_BURN_IN, DEFAULT_TRIANGLE_BUDGET,
};
use fis_core::cfs::from_projected_x;
use fis_core::dimension::{
    box_dimension_fit, bound_failure_interval, closed_form_quartic, closed_form_subdivided,
    surface_affinity_dimension, AffinityBranch, BoundVariant,
};
use fis_core::furstenberg::{build_furstenberg, certificate_pipeline, project_1d, Axis, Verdict};
use fis_core::markov::{
    build_gd_ifs, canonical_group, chain_analysis, rational_matrix_csv, ratio_to_f64,
    return_counts, t_hat, transition_matrix, BIPARTITE_ORDER,
};
use fis_core::report::Report;
use fis_core::{Construction, SurfaceConfig, SurfaceIfs};
use serde::Deserialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

#[derive(Parser)]
#[command(name = "fis", version, about = "Fractal interpolation surface toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for reports and exports.
    #[arg(long)]
    out: Option<PathBuf>,
    /// RNG seed (overrides the config value).
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads (fallback: FSL_WORKERS, then all cores).
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Build a surface IFS and export its subdivision mesh (OBJ + PGM).
    Surface {
        #[command(flatten)]
        common: CommonArgs,
        /// Subdivision depth.
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Affinity dimension, closed forms, and a chaos-game box-count fit.
    Dimension {
        #[command(flatten)]
        common: CommonArgs,
        /// Chaos-game point count.
        #[arg(long)]
        samples: Option<usize>,
        /// Comma-separated box scales, strictly decreasing.
        #[arg(long)]
        scales: Option<String>,
    },
    /// Run the overlap-certificate pipeline with full trace.
    Certify {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Exact group/chain analysis and the graph-directed system; CSVs on request.
    Markov {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest n for exact return counts (≤ 12).
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Symbolic separation search over equal-contraction word pairs.
    Esc {
        #[command(flatten)]
        common: CommonArgs,
        /// Word length.
        #[arg(long)]
        depth: Option<usize>,
    },
}

/// On-disk run configuration: the surface parameters plus per-command knobs.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    surface: Option<SurfaceConfig>,
    seed: Option<u64>,
    samples: Option<usize>,
    depth: Option<usize>,
    scales: Option<Vec<f64>>,
    esc: Option<EscParams>,
    markov: Option<MarkovParams>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct EscParams {
    word_length: Option<usize>,
    slope: f64,
    budget: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct MarkovParams {
    n_max: Option<usize>,
    /// Vertical scale for the graph-directed maps and the t̂ table.
    s: Option<f64>,
}

enum CliError {
    /// Bad configuration or parameters — exit code 2.
    Config(String),
    /// Filesystem failure — exit code 3.
    Io(String),
}

impl CliError {
    fn code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(3),
        }
    }
    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

fn config_err<E: std::fmt::Display>(e: E) -> CliError {
    CliError::Config(e.to_string())
}

fn io_err<E: std::fmt::Display>(path: &Path, e: E) -> CliError {
    CliError::Io(format!("{}: {}", path.display(), e))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let started = Instant::now();
    let result = match &cli.command {
        Command::Surface { common, depth } => run(common, started, |cfg| cmd_surface(common, cfg, *depth)),
        Command::Dimension {
            common,
            samples,
            scales,
        } => run(common, started, |cfg| cmd_dimension(common, cfg, *samples, scales.as_deref())),
        Command::Certify { common } => run(common, started, |cfg| cmd_certify(cfg)),
        Command::Markov { common, n_max } => run(common, started, |cfg| cmd_markov(common, cfg, *n_max)),
        Command::Esc { common, depth } => run(common, started, |cfg| cmd_esc(cfg, *depth)),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.code()
        }
    }
}

/// Shared scaffolding: worker pool, config loading, report output.
fn run<F>(common: &CommonArgs, started: Instant, body: F) -> Result<(), CliError>
where
    F: FnOnce(&RunConfig) -> Result<Report, CliError>,
{
    let workers = common.workers.or_else(|| {
        std::env::var("FSL_WORKERS")
            .ok()
            .and_then(|v| v.parse().ok())
    });
    if let Some(n) = workers {
        // Ignore the error when a pool already exists (tests call run twice).
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global();
    }
    let mut config = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
            serde_json::from_str::<RunConfig>(&text).map_err(config_err)?
        }
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        config.seed = Some(seed);
    }
    if let Some(dir) = &common.out {
        std::fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    let report = body(&config)?;
    let rendered = report.render().map_err(config_err)?;
    print!("{rendered}");
    if let Some(dir) = &common.out {
        let path = dir.join(format!("{}.json", report.command));
        report
            .write(&path, started.elapsed().as_secs_f64())
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    Ok(())
}

fn build_surface(config: &RunConfig) -> Result<(SurfaceIfs, Value), CliError> {
    let surface = config
        .surface
        .as_ref()
        .ok_or_else(|| CliError::Config("config requires a `surface` section".into()))?;
    let ifs = surface.build().map_err(config_err)?;
    let echo = serde_json::to_value(surface).map_err(config_err)?;
    Ok((ifs, echo))
}

fn cmd_surface(common: &CommonArgs, config: &RunConfig, depth: Option<usize>) -> Result<Report, CliError> {
    let (ifs, echo) = build_surface(config)?;
    let depth = depth.or(config.depth).unwrap_or(4);
    let mesh = subdivision_mesh(&ifs, depth, DEFAULT_TRIANGLE_BUDGET).map_err(config_err)?;
    let mut exports = Vec::new();
    if let Some(dir) = &common.out {
        let obj = dir.join("surface.obj");
        export_obj(&mesh, &obj).map_err(|e| io_err(&obj, e))?;
        let pgm = dir.join("surface.pgm");
        export_pgm(&mesh, &pgm, 512).map_err(|e| io_err(&pgm, e))?;
        exports.push(obj.display().to_string());
        exports.push(pgm.display().to_string());
    }
    Ok(Report::new(
        "surface",
        json!({ "surface": echo, "depth": depth }),
        json!({
            "triangles": mesh.triangles.len(),
            "exports": exports,
        }),
    ))
}

fn parse_scales(text: &str) -> Result<Vec<f64>, CliError> {
    text.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(config_err))
        .collect()
}

fn cmd_dimension(
    common: &CommonArgs,
    config: &RunConfig,
    samples: Option<usize>,
    scales: Option<&str>,
) -> Result<Report, CliError> {
    let (ifs, echo) = build_surface(config)?;
    let sol = surface_affinity_dimension(&ifs).map_err(config_err)?;
    let closed_form = match ifs.construction {
        Construction::Massopust => closed_form_subdivided(ifs.n, &ifs.s).ok(),
        Construction::GeronimoHardin => closed_form_quartic(ifs.s[0]).ok(),
    };

    let samples = samples.or(config.samples).unwrap_or(200_000);
    let seed = config.seed.unwrap_or(1);
    let scales = match scales {
        Some(text) => parse_scales(text)?,
        None => match config.scales.clone() {
            Some(v) => v,
            // Powers of the natural subdivision ratio, k = 2..6.
            None => {
                let base = 1.0 / ifs.n as f64;
                (2..=6).map(|k| base.powi(k)).collect()
            }
        },
    };
    let weights = vec![1.0 / ifs.map_count() as f64; ifs.map_count()];
    let cloud = chaos_game(&ifs.maps, &weights, samples, seed, DEFAULT_BURN_IN, 8)
        .map_err(config_err)?;
    let table = box_count(&cloud.points, &scales).map_err(config_err)?;
    let fit = box_dimension_fit(&table).map_err(config_err)?;
    let mut results = json!({
        "t0": sol.t0,
        "r1": sol.r1,
        "r2": sol.r2,
        "branch": match sol.branch {
            AffinityBranch::HeightOnly => "height-only",
            AffinityBranch::Mixed => "mixed",
        },
        "closed_form": closed_form,
        "box_fit": {
            "scales": table.scales,
            "counts": table.counts,
            "slope": fit.slope,
            "slope_std_err": fit.slope_std_err,
            "abs_slope_minus_t0": (fit.slope - sol.t0).abs(),
        },
        "failure_intervals": Value::Null,
    });
    // The failure-interval analysis applies to the subdivided family only.
    if ifs.construction == Construction::Massopust {
        let plain = bound_failure_interval(ifs.n, BoundVariant::Plain).map_err(config_err)?;
        let corrected =
            bound_failure_interval(ifs.n, BoundVariant::OverlapCorrected).map_err(config_err)?;
        let pair = |v: Option<(f64, f64)>| match v {
            Some((lo, hi)) => json!([lo, hi]),
            None => Value::Null,
        };
        results["failure_intervals"] = json!({
            "plain": pair(plain),
            "overlap_corrected": pair(corrected),
        });
    }
    if let Some(dir) = &common.out {
        let csv = dir.join("occupancy.csv");
        export_csv_table(&table, &csv).map_err(|e| io_err(&csv, e))?;
    }
    Ok(Report::new(
        "dimension",
        json!({ "surface": echo, "samples": samples, "seed": seed, "scales": scales }),
        results,
    ))
}

fn cmd_certify(config: &RunConfig) -> Result<Report, CliError> {
    let (ifs, echo) = build_surface(config)?;
    let report = certificate_pipeline(&ifs).map_err(config_err)?;
    let certificate = report.certificate.as_ref().map(|c| {
        json!({
            "q": c.q,
            "depth": c.depth,
            "hypotheses_met": c.hypotheses_met,
            "triple_interior_empty": c.triple_interior_empty,
            "notes": c.notes,
        })
    });
    Ok(Report::new(
        "certify",
        json!({ "surface": echo }),
        json!({
            "verdict": match report.verdict {
                Verdict::Certified => "certified",
                Verdict::HypothesesUnmet => "hypotheses-unmet",
                Verdict::BoundInsufficient => "bound-insufficient",
            },
            "t0": report.t0,
            "target": report.target,
            "bound": report.bound,
            "bound_alt": report.bound_alt,
            "sufficient_closed_form": report.sufficient_closed_form,
            "certificate": certificate,
            "trace": report.trace,
        }),
    ))
}

fn cmd_markov(common: &CommonArgs, config: &RunConfig, n_max: Option<usize>) -> Result<Report, CliError> {
    let params = config.markov.clone();
    let n_max = n_max
        .or(params.as_ref().and_then(|p| p.n_max))
        .unwrap_or(8);
    let s = params.as_ref().and_then(|p| p.s).unwrap_or(0.82);

    let group = canonical_group();
    let p = transition_matrix(&group, &BIPARTITE_ORDER);
    let analysis = chain_analysis(&p);
    let counts = return_counts(&group, n_max).map_err(config_err)?;
    let gd = build_gd_ifs(&group, s).map_err(config_err)?;
    let t_hat_table: Vec<f64> = (1..=n_max)
        .map(|n| t_hat(s, n))
        .collect::<Result<_, _>>()
        .map_err(config_err)?;

    if let Some(dir) = &common.out {
        let write = |name: &str, body: String| -> Result<(), CliError> {
            let path = dir.join(name);
            std::fs::write(&path, body).map_err(|e| io_err(&path, e))
        };
        let mut table = String::new();
        for row in &group.table {
            let cells: Vec<String> = row.iter().map(|i| (i + 1).to_string()).collect();
            table.push_str(&cells.join(","));
            table.push('\n');
        }
        write("group_table.csv", table)?;
        write("transition.csv", rational_matrix_csv(&p.entries))?;
        write("two_step_block.csv", rational_matrix_csv(&analysis.r_block))?;
        let mut counts_csv = String::from("n,count\n");
        for (i, c) in counts.counts.iter().enumerate() {
            counts_csv.push_str(&format!("{},{}\n", i + 1, c));
        }
        write("return_counts.csv", counts_csv)?;
    }

    let degrees: Vec<usize> = (0..gd.vertices.len())
        .map(|l| gd.edges.iter().filter(|e| e.from == l).count())
        .collect();
    let witnesses: Vec<Value> = gd
        .edges
        .iter()
        .map(|e| json!({"from": e.from + 1, "to": e.to + 1, "k": e.k, "offset": e.offset}))
        .collect();
    Ok(Report::new(
        "markov",
        json!({ "n_max": n_max, "s": s }),
        json!({
            "group_order": group.elements.len(),
            "period": analysis.period,
            "two_step_return": ratio_to_f64(&analysis.two_step_return),
            "limit_convergence_n": analysis.convergence_n,
            "limit_deviation": analysis.deviation,
            "return_counts": counts.counts.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "count_bound_n0": counts.n0,
            "t_hat": t_hat_table,
            "gd_out_degrees": degrees,
            "gd_edges": witnesses,
            "gd_contraction": gd.contraction,
        }),
    ))
}

fn cmd_esc(config: &RunConfig, depth: Option<usize>) -> Result<Report, CliError> {
    let (ifs, echo) = build_surface(config)?;
    let params = config
        .esc
        .as_ref()
        .ok_or_else(|| CliError::Config("config requires an `esc` section".into()))?;
    let n = depth
        .or(params.word_length)
        .or(config.depth)
        .unwrap_or(3);
    let seed = config.seed.unwrap_or(1);
    let fifs = build_furstenberg(&ifs).map_err(config_err)?;
    let px = project_1d(&fifs, Axis::X).map_err(config_err)?;
    let sys = from_projected_x(&px, ifs.n).map_err(config_err)?;
    let report = fis_core::cfs::esc_violation_search(&sys, n, params.slope, params.budget, seed);
    let violations: Vec<Value> = report
        .violations
        .iter()
        .map(|v| json!({"left": v.left, "right": v.right, "gap": v.gap}))
        .collect();
    Ok(Report::new(
        "esc",
        json!({
            "surface": echo,
            "word_length": n,
            "slope": params.slope,
            "budget": params.budget,
            "seed": seed,
        }),
        json!({
            "violations": violations,
            "pairs_checked": report.pairs_checked,
            "pairs_total": report.pairs_total,
            "exhaustive": report.exhaustive,
        }),
    ))
}
