//! Command-line surface: subcommands over the curve-file format and CSV
//! reports. All outputs are byte-deterministic given the same flags and
//! seed, independent of the thread count.
//!
//! Exit codes: 0 success, 1 usage error, 2 input validation error,
//! 3 runtime signal (density violation, degenerate fit, I/O, ...).

use crate::collection_metric::{collection_distance, CurveCollection};
use crate::coupling::{build_coding, convergence_diagnostic, families};
use crate::crossings::find_crossings;
use crate::curve_metric::{curve_distance, MetricMethod};
use crate::diagnostics::{
    estimate_tail, estimate_tail_ladder, fit_power, locate_hotspot, rate_check, regularity_report,
};
use crate::ensembles::EnsembleSpec;
use crate::files::{
    fmt_f64, fmt_point, parse_curve_file, serialize_curve_file, CsvReport, CurveFile,
};
use crate::geometry::{Annulus, Point, Polyline};
use crate::nets::{bounding_box, coarsen_collection, grid_net};
use crate::{Error, Result};
use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Parser, Debug)]
#[command(name = "polycross", version, about = "Annulus-crossing statistics and metrics for polyline curve collections")]
struct Cli {
    /// Write the report or file to this path instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads (0 = library default). Output bytes do not depend on
    /// this.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct AnnulusArgs {
    /// Annulus center as comma-separated decimals, e.g. `0,0`.
    #[arg(long, value_parser = parse_point)]
    center: Point,
    /// Inner radius.
    #[arg(long)]
    inner: f64,
    /// Outer radius.
    #[arg(long)]
    outer: f64,
}

impl AnnulusArgs {
    fn annulus(&self) -> Result<Annulus> {
        Annulus::new(self.center.clone(), self.inner, self.outer)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a curve file from a seeded ensemble.
    Generate {
        /// Ensemble kind: random-walk | brownian-bridge | pathological |
        /// loop-collection.
        #[arg(long)]
        kind: String,
        #[arg(long, default_value_t = 64)]
        steps: u32,
        #[arg(long, default_value_t = 2)]
        dim: u32,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Curves to emit (draws for walk kinds, loop count otherwise).
        #[arg(long, default_value_t = 1)]
        count: u32,
        /// Quarter-phase grid size of the pathological curve.
        #[arg(long, default_value_t = 64)]
        grid: u32,
        /// Perturbation bound for the pathological ensemble (0 = exact).
        #[arg(long, default_value_t = 0.0)]
        bound: f64,
        #[arg(long, default_value_t = 2.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.25)]
        min_diameter: f64,
    },
    /// Count annulus crossings per curve of a file.
    Crossings {
        file: PathBuf,
        #[command(flatten)]
        annulus: AnnulusArgs,
        /// Emit one row per crossing interval instead of per curve.
        #[arg(long)]
        intervals: bool,
    },
    /// Distance between the single curves of two files.
    Dist {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// Bottleneck distance between the collections of two files.
    Cdist {
        file_a: PathBuf,
        file_b: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Skeleton coarse-graining at net scale 1/k with its certified bound.
    Coarsen {
        file: PathBuf,
        #[arg(long)]
        k: u32,
        /// Where to write the coarsened curve file.
        #[arg(long)]
        coarse_out: PathBuf,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Monte-Carlo tail estimates over a threshold ladder.
    Tails {
        /// Sampler spec as JSON, e.g.
        /// `{"kind":"random-walk","steps":64,"dim":2,"seed":7}`.
        #[arg(long, value_parser = parse_spec)]
        sampler: EnsembleSpec,
        #[command(flatten)]
        annulus: AnnulusArgs,
        /// Comma-separated thresholds.
        #[arg(long, value_parser = parse_u32_list)]
        threshold_n: std::vec::Vec<u32>,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sup-over-samplers tail table on a grid of annuli.
    Regularity {
        /// Repeatable sampler spec (JSON).
        #[arg(long, value_parser = parse_spec, required = true)]
        sampler: Vec<EnsembleSpec>,
        /// Grid cells `cx,cy:r:R` separated by `;`.
        #[arg(long, value_parser = parse_grid)]
        grid: GridCells,
        #[arg(long, value_parser = parse_u32_list)]
        threshold_n: std::vec::Vec<u32>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Power-law fit of tails across an inner-radius ladder.
    Fit {
        #[arg(long, value_parser = parse_spec)]
        sampler: EnsembleSpec,
        #[arg(long, value_parser = parse_point)]
        center: Point,
        #[arg(long)]
        outer: f64,
        /// Comma-separated inner radii.
        #[arg(long, value_parser = parse_f64_list)]
        inner_ladder: std::vec::Vec<f64>,
        #[arg(long)]
        threshold_n: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Vanishing-rate verdict for terminal tails along a radius ladder.
    Rate {
        #[arg(long, value_parser = parse_spec)]
        sampler: EnsembleSpec,
        #[arg(long, value_parser = parse_point)]
        center: Point,
        #[arg(long)]
        outer: f64,
        #[arg(long, value_parser = parse_f64_list)]
        inner_ladder: std::vec::Vec<f64>,
        #[arg(long)]
        threshold_n: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Optional gauge for the weaker rate form: none | sqrt | log.
        #[arg(long, default_value = "none")]
        gauge: String,
    },
    /// Face-subdivision search for where crossing mass concentrates.
    Hotspot {
        #[arg(long, value_parser = parse_spec)]
        sampler: EnsembleSpec,
        #[command(flatten)]
        annulus: AnnulusArgs,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Consistent-coupling stabilization diagnostics for a measure family.
    Couple {
        /// Measure family: constant | converging | oscillating.
        #[arg(long)]
        family: String,
        #[arg(long, default_value_t = 64)]
        horizon: usize,
        #[arg(long, default_value_t = 2000)]
        draws: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Clone)]
struct GridCells(Vec<(Point, f64, f64)>);

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let coords: std::result::Result<Vec<f64>, _> =
        s.split(',').map(|c| c.trim().parse::<f64>()).collect();
    let coords = coords.map_err(|e| format!("bad coordinate: {e}"))?;
    Point::new(coords).map_err(|e| e.to_string())
}

fn parse_spec(s: &str) -> std::result::Result<EnsembleSpec, String> {
    serde_json::from_str(s).map_err(|e| format!("bad sampler spec: {e}"))
}

fn parse_u32_list(s: &str) -> std::result::Result<Vec<u32>, String> {
    s.split(',')
        .map(|c| c.trim().parse::<u32>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_f64_list(s: &str) -> std::result::Result<Vec<f64>, String> {
    s.split(',')
        .map(|c| c.trim().parse::<f64>().map_err(|e| e.to_string()))
        .collect()
}

fn parse_grid(s: &str) -> std::result::Result<GridCells, String> {
    let mut cells = Vec::new();
    for part in s.split(';') {
        let fields: Vec<&str> = part.split(':').collect();
        if fields.len() != 3 {
            return Err(format!("grid cell `{part}` is not `point:r:R`"));
        }
        let point = parse_point(fields[0])?;
        let r: f64 = fields[1].trim().parse().map_err(|e| format!("{e}"))?;
        let big_r: f64 = fields[2].trim().parse().map_err(|e| format!("{e}"))?;
        cells.push((point, r, big_r));
    }
    Ok(GridCells(cells))
}

fn read_collection(path: &PathBuf) -> Result<(CurveFile, CurveCollection)> {
    let bytes = std::fs::read(path)?;
    let file = parse_curve_file(&bytes)?;
    let coll = file.to_collection()?;
    Ok((file, coll))
}

fn single_curve(path: &PathBuf) -> Result<Polyline> {
    let (file, coll) = read_collection(path)?;
    if coll.len() != 1 || file.curves[0].multiplicity != 1 {
        return Err(Error::Schema(format!(
            "`{}` must contain exactly one curve of multiplicity 1",
            path.display()
        )));
    }
    let curve = coll.iter().next().unwrap().0.clone();
    Ok(curve)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Run the CLI against the given argv (including the program name) and
/// return the process exit code.
pub fn run<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            // Help and version requests are successes, anything else is a
            // usage error.
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let run_inner = || -> Result<()> {
        if cli.threads > 0 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(cli.threads)
                .build()
                .map_err(|e| Error::InvalidParameter(e.to_string()))?;
            pool.install(|| dispatch(&cli))
        } else {
            dispatch(&cli)
        }
    };
    match run_inner() {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::Generate {
            kind,
            steps,
            dim,
            seed,
            count,
            grid,
            bound,
            alpha,
            min_diameter,
        } => {
            let spec = match kind.as_str() {
                "random-walk" => EnsembleSpec::RandomWalk { steps: *steps, dim: *dim, seed: *seed },
                "brownian-bridge" => {
                    EnsembleSpec::BrownianBridge { steps: *steps, dim: *dim, seed: *seed }
                }
                "pathological" => {
                    EnsembleSpec::Pathological { grid_size: *grid, bound: *bound, seed: *seed }
                }
                "loop-collection" => EnsembleSpec::LoopCollection {
                    num_curves: *count,
                    steps: *steps,
                    dim: *dim,
                    alpha: *alpha,
                    min_diameter: *min_diameter,
                    seed: *seed,
                },
                other => {
                    return Err(Error::InvalidParameter(format!("unknown ensemble kind `{other}`")))
                }
            };
            use crate::ensembles::CollectionSampler;
            let coll = match spec {
                EnsembleSpec::LoopCollection { .. } => spec.sample(0),
                _ => {
                    let mut all = Vec::new();
                    for draw in 0..*count as u64 {
                        for (c, m) in spec.sample(draw).iter() {
                            all.push((c.clone(), *m));
                        }
                    }
                    CurveCollection::from_curves(all)?
                }
            };
            let file = CurveFile::from_collection(&coll, "curve");
            emit(&cli.out, &serialize_curve_file(&file))
        }
        Command::Crossings { file, annulus, intervals } => {
            let (curve_file, _) = read_collection(file)?;
            let ann = annulus.annulus()?;
            if *intervals {
                let mut rep =
                    CsvReport::new("crossing-intervals.v1", &["id", "index", "a", "b", "direction"]);
                for rec in &curve_file.curves {
                    let poly = record_polyline(rec)?;
                    let report = find_crossings(&poly, &ann)?;
                    for (i, iv) in report.intervals.iter().enumerate() {
                        rep.row(&[
                            rec.id.clone(),
                            i.to_string(),
                            fmt_f64(iv.a),
                            fmt_f64(iv.b),
                            format!("{:?}", iv.direction).to_lowercase(),
                        ]);
                    }
                }
                emit(&cli.out, &rep.finish())
            } else {
                let mut rep = CsvReport::new("crossings.v1", &["id", "multiplicity", "count"]);
                for rec in &curve_file.curves {
                    let poly = record_polyline(rec)?;
                    let report = find_crossings(&poly, &ann)?;
                    rep.row(&[
                        rec.id.clone(),
                        rec.multiplicity.to_string(),
                        report.count().to_string(),
                    ]);
                }
                emit(&cli.out, &rep.finish())
            }
        }
        Command::Dist { file_a, file_b, tol } => {
            let a = single_curve(file_a)?;
            let b = single_curve(file_b)?;
            let r = curve_distance(&a, &b, *tol)?;
            let mut rep = CsvReport::new("dist.v1", &["value", "tolerance", "method"]);
            rep.row(&[fmt_f64(r.value), fmt_f64(r.tolerance), method_name(r.method).into()]);
            emit(&cli.out, &rep.finish())
        }
        Command::Cdist { file_a, file_b, tol } => {
            let (_, a) = read_collection(file_a)?;
            let (_, b) = read_collection(file_b)?;
            let r = collection_distance(&a, &b, *tol)?;
            let mut rep = CsvReport::new("cdist.v1", &["value", "tolerance", "method"]);
            rep.row(&[fmt_f64(r.value), fmt_f64(r.tolerance), method_name(r.method).into()]);
            emit(&cli.out, &rep.finish())
        }
        Command::Coarsen { file, k, coarse_out, tol } => {
            let (_, coll) = read_collection(file)?;
            let (lo, hi) = bounding_box(&coll, 0.0)
                .ok_or(Error::EmptyInput("cannot coarsen an empty collection"))?;
            let net = grid_net(&lo, &hi, 1.0 / *k as f64)?;
            let coarse = coarsen_collection(&coll, &net, *k)?;
            let out_file = CurveFile::from_collection(&coarse, "skeleton");
            std::fs::write(coarse_out, serialize_curve_file(&out_file))?;
            let measured = collection_distance(&coll, &coarse, *tol)?;
            let mut rep = CsvReport::new(
                "coarsen.v1",
                &["k", "bound", "measured_distance", "curves_in", "curves_out"],
            );
            rep.row(&[
                k.to_string(),
                fmt_f64(11.0 / *k as f64),
                fmt_f64(measured.value),
                coll.len().to_string(),
                coarse.len().to_string(),
            ]);
            emit(&cli.out, &rep.finish())
        }
        Command::Tails { sampler, annulus, threshold_n, samples, seed } => {
            let ann = annulus.annulus()?;
            let tails = estimate_tail_ladder(sampler, &ann, threshold_n, *samples, *seed)?;
            let mut rep = CsvReport::new(
                "tails.v1",
                &["x", "inner", "outer", "threshold", "p_hat", "ci_lo", "ci_hi", "samples"],
            );
            for t in &tails {
                rep.row(&[
                    fmt_point(&t.x),
                    fmt_f64(t.inner),
                    fmt_f64(t.outer),
                    t.threshold.to_string(),
                    fmt_f64(t.p_hat),
                    fmt_f64(t.ci_lo),
                    fmt_f64(t.ci_hi),
                    t.samples.to_string(),
                ]);
            }
            emit(&cli.out, &rep.finish())
        }
        Command::Regularity { sampler, grid, threshold_n, samples, seed } => {
            let report = regularity_report(sampler, &grid.0, threshold_n, *samples, *seed)?;
            let mut rep = CsvReport::new(
                "regularity.v1",
                &[
                    "cell",
                    "x",
                    "inner",
                    "outer",
                    "threshold",
                    "sup_p",
                    "sup_sampler",
                    "ci_lo",
                    "ci_hi",
                    "terminal_sup",
                    "monotone",
                ],
            );
            for row in &report.rows {
                let trend = &report.trends[row.cell];
                rep.row(&[
                    row.cell.to_string(),
                    fmt_point(&row.x),
                    fmt_f64(row.inner),
                    fmt_f64(row.outer),
                    row.threshold.to_string(),
                    fmt_f64(row.sup_p),
                    row.sup_sampler.to_string(),
                    fmt_f64(row.ci_lo),
                    fmt_f64(row.ci_hi),
                    fmt_f64(trend.terminal_sup),
                    trend.monotone_nonincreasing.to_string(),
                ]);
            }
            emit(&cli.out, &rep.finish())
        }
        Command::Fit { sampler, center, outer, inner_ladder, threshold_n, samples, seed } => {
            let tails = ladder_tails(sampler, center, *outer, inner_ladder, *threshold_n, *samples, *seed)?;
            let fit = fit_power(&tails)?;
            let mut rep =
                CsvReport::new("fit.v1", &["threshold", "lambda", "k", "residual", "points"]);
            rep.row(&[
                fit.threshold.to_string(),
                fmt_f64(fit.lambda),
                fmt_f64(fit.k),
                fmt_f64(fit.residual),
                tails.iter().filter(|t| t.p_hat > 0.0).count().to_string(),
            ]);
            emit(&cli.out, &rep.finish())
        }
        Command::Rate {
            sampler,
            center,
            outer,
            inner_ladder,
            threshold_n,
            samples,
            seed,
            gauge,
        } => {
            use crate::ensembles::CollectionSampler;
            let tails = ladder_tails(sampler, center, *outer, inner_ladder, *threshold_n, *samples, *seed)?;
            let dim = sampler.dim();
            let gauge_fn: Option<Box<dyn Fn(f64) -> f64>> = match gauge.as_str() {
                "none" => None,
                "sqrt" => Some(Box::new(|r: f64| r.sqrt())),
                "log" => Some(Box::new(|r: f64| -1.0 / r.ln())),
                other => {
                    return Err(Error::InvalidParameter(format!("unknown gauge `{other}`")))
                }
            };
            let report = rate_check(&tails, dim, gauge_fn.as_deref())?;
            let mut rep = CsvReport::new("rate.v1", &["verdict", "gauged", "dim", "ratios"]);
            rep.row(&[
                if report.pass { "pass".into() } else { "fail".into() },
                report.gauged.to_string(),
                dim.to_string(),
                report
                    .ratios
                    .iter()
                    .map(|r| fmt_f64(*r))
                    .collect::<Vec<_>>()
                    .join(";"),
            ]);
            emit(&cli.out, &rep.finish())
        }
        Command::Hotspot { sampler, annulus, depth, samples, seed } => {
            let ann = annulus.annulus()?;
            let report = locate_hotspot(sampler, &ann, *depth, *samples, *seed)?;
            let mut rep = CsvReport::new(
                "hotspot.v1",
                &["level", "eps", "p_hat", "face_center", "y", "p0", "initial_faces"],
            );
            for level in &report.levels {
                rep.row(&[
                    level.level.to_string(),
                    fmt_f64(level.eps),
                    fmt_f64(level.p_hat),
                    fmt_point(&level.face.center()),
                    fmt_point(&report.y),
                    fmt_f64(report.p0),
                    report.initial_faces.to_string(),
                ]);
            }
            emit(&cli.out, &rep.finish())
        }
        Command::Couple { family, horizon, draws, seed } => {
            let measures = match family.as_str() {
                "constant" => families::constant(*horizon)?,
                "converging" => families::converging(*horizon)?,
                "oscillating" => families::oscillating(*horizon)?,
                other => {
                    return Err(Error::InvalidParameter(format!("unknown family `{other}`")))
                }
            };
            let nets = vec![families::two_atom_net()];
            let coding = build_coding(&measures, &nets)?;
            let report = convergence_diagnostic(&coding, &nets, *draws, *horizon, *seed)?;
            let mut rep = CsvReport::new(
                "couple.v1",
                &["level", "stabilized_fraction", "draws", "horizon"],
            );
            for (i, frac) in report.fractions.iter().enumerate() {
                rep.row(&[
                    (i + 1).to_string(),
                    fmt_f64(*frac),
                    report.draws.to_string(),
                    report.horizon.to_string(),
                ]);
            }
            emit(&cli.out, &rep.finish())
        }
    }
}

fn record_polyline(rec: &crate::files::CurveRecord) -> Result<Polyline> {
    Polyline::new(
        rec.vertices
            .iter()
            .map(|v| Point::new(v.clone()))
            .collect::<Result<Vec<_>>>()?,
    )
}

fn ladder_tails(
    sampler: &EnsembleSpec,
    center: &Point,
    outer: f64,
    inner_ladder: &[f64],
    threshold: u32,
    samples: usize,
    seed: u64,
) -> Result<Vec<crate::diagnostics::TailEstimate>> {
    if inner_ladder.is_empty() {
        return Err(Error::EmptyInput("inner radius ladder is empty"));
    }
    inner_ladder
        .iter()
        .enumerate()
        .map(|(i, &r)| {
            let ann = Annulus::new(center.clone(), r, outer)?;
            estimate_tail(sampler, &ann, threshold, samples, seed ^ ((i as u64) << 40))
        })
        .collect()
}

fn method_name(m: MetricMethod) -> &'static str {
    match m {
        MetricMethod::ExactDecisionSearch => "exact-decision-search",
        MetricMethod::DiscreteUpperBound => "discrete-upper-bound",
    }
}
