use std::time::Instant;

use rayon::prelude::*;
use serde_json::json;

use polymoments::chord_cdf::ChordLengthDistribution;
use polymoments::circle::{circle_chord_cdf, circle_distance_pdf};
use polymoments::distance_pdf::DistanceDensity;
use polymoments::moments::{
    circle_moment, circle_variance, moment, moment_by_cdf_quadrature, moment_by_monte_carlo,
    moment_by_pdf_quadrature, variance,
};
use polymoments::oracles::monte_carlo::GENERATOR;
use polymoments::verify::{self, VerifyConfig};
use polymoments::{Estimator, McConfig, PolygonParams, PolygonSpec, QuadConfig};

use crate::args::{CurveArgs, CurveKind, MomentsArgs, OrderSpec, TableArgs, VerifyArgs};
use crate::output::{
    CheckRow, CurveRow, Metadata, MomentRow, OutputRecord, Rows, TableRow, SCHEMA_VERSION,
};
use crate::CliError;

const DEFAULT_VERIFY_SAMPLES: u64 = 1_000_000;

/// A finished command: the record to print and whether it succeeded.
pub struct Outcome {
    pub record: OutputRecord,
    pub success: bool,
}

fn polygon(n: u32, r: f64) -> Result<PolygonParams, CliError> {
    Ok(PolygonSpec::new(n, r)?.derive()?)
}

fn quad_config() -> QuadConfig {
    QuadConfig::new(1e-14, 1e-12)
}

fn record(
    command: &str,
    params: serde_json::Value,
    rows: Rows,
    metadata: Metadata,
) -> OutputRecord {
    OutputRecord {
        schema_version: SCHEMA_VERSION.to_owned(),
        command: command.to_owned(),
        params,
        rows,
        metadata,
    }
}

fn base_metadata(started: Instant) -> Metadata {
    Metadata {
        threads: rayon::current_num_threads(),
        elapsed_seconds: started.elapsed().as_secs_f64(),
        ..Metadata::default()
    }
}

fn with_mc(mut meta: Metadata, cfg: &McConfig) -> Metadata {
    meta.generator = Some(GENERATOR.to_owned());
    meta.seed = Some(cfg.seed());
    meta.shard_plan = Some(cfg.shard_plan());
    meta
}

fn with_quad(mut meta: Metadata, cfg: &QuadConfig) -> Metadata {
    meta.abs_tol = Some(cfg.abs_tol);
    meta.rel_tol = Some(cfg.rel_tol);
    meta
}

pub fn moments(args: &MomentsArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let p = polygon(args.n, args.r)?;
    let params =
        json!({ "n": args.n, "r": args.r, "m": args.m.to_string(), "verify": args.verify });
    let orders = match &args.m {
        OrderSpec::Variance => {
            let rows = vec![TableRow {
                n: args.n.to_string(),
                quantity: "variance".into(),
                value: variance(&p)?,
            }];
            let meta = base_metadata(started);
            return Ok(Outcome {
                record: record("moments", params, Rows::Table(rows), meta),
                success: true,
            });
        }
        OrderSpec::Orders(orders) => orders,
    };

    let quad = quad_config();
    let mc = McConfig::new(
        args.mc.mc_samples.unwrap_or(DEFAULT_VERIFY_SAMPLES),
        args.mc.seed,
        Estimator::PointPairDistance,
    )?;
    let rows = orders
        .par_iter()
        .map(|&m| {
            let exact = moment(&p, m)?;
            let mut row = MomentRow {
                n: args.n,
                r: args.r,
                m,
                value: exact.value,
                method: exact.method,
                err_estimate: exact.err_estimate,
                quadrature_pdf: None,
                quadrature_cdf: None,
                monte_carlo: None,
                mc_std_error: None,
            };
            if args.verify {
                row.quadrature_pdf = Some(moment_by_pdf_quadrature(&p, m, &quad)?.value);
                row.quadrature_cdf = Some(moment_by_cdf_quadrature(&p, m, &quad)?.value);
                let est = moment_by_monte_carlo(&p, m, &mc)?;
                row.monte_carlo = Some(est.value);
                row.mc_std_error = est.err_estimate;
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>, CliError>>()?;

    let mut meta = base_metadata(started);
    if args.verify {
        meta = with_quad(with_mc(meta, &mc), &quad);
    }
    Ok(Outcome {
        record: record("moments", params, Rows::Moments(rows), meta),
        success: true,
    })
}

pub fn table(args: &TableArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let ns: Vec<u32> = args.n.values().map_err(CliError::Usage)?;
    let cells = |p: Option<&PolygonParams>| -> Result<Vec<(String, f64)>, CliError> {
        Ok(match &args.m {
            OrderSpec::Variance => vec![(
                "variance".to_owned(),
                match p {
                    Some(p) => variance(p)?,
                    None => circle_variance(args.r)?,
                },
            )],
            OrderSpec::Orders(orders) => orders
                .iter()
                .map(|&m| {
                    let value = match p {
                        Some(p) => moment(p, m)?.value,
                        None => circle_moment(m, args.r)?,
                    };
                    Ok((format!("M_{m}"), value))
                })
                .collect::<Result<_, CliError>>()?,
        })
    };
    let per_n = ns
        .par_iter()
        .map(|&n| {
            let p = polygon(n, args.r)?;
            Ok(cells(Some(&p))?
                .into_iter()
                .map(|(quantity, value)| TableRow {
                    n: n.to_string(),
                    quantity,
                    value,
                })
                .collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, CliError>>()?;
    let mut rows: Vec<TableRow> = per_n.into_iter().flatten().collect();
    rows.extend(cells(None)?.into_iter().map(|(quantity, value)| TableRow {
        n: "inf".into(),
        quantity,
        value,
    }));
    let params = json!({ "n": args.n.to_string(), "r": args.r, "m": args.m.to_string() });
    Ok(Outcome {
        record: record("table", params, Rows::Table(rows), base_metadata(started)),
        success: true,
    })
}

pub fn curve(args: &CurveArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let p = polygon(args.n, args.r)?;
    let rows: Vec<CurveRow> = match args.kind {
        CurveKind::Cdf => ChordLengthDistribution::new(&p)
            .curve(args.points)
            .into_iter()
            .map(|s| {
                Ok(CurveRow {
                    x: s.x,
                    value: s.value,
                    chord_pdf: None,
                    circle: args
                        .circle
                        .then(|| circle_chord_cdf(args.r, s.x))
                        .transpose()?,
                })
            })
            .collect::<Result<_, CliError>>()?,
        CurveKind::Pdf => {
            let density = DistanceDensity::new(&p);
            let step = 1e-6 * p.diameter();
            density
                .curve(args.points)
                .into_iter()
                .map(|s| {
                    Ok(CurveRow {
                        x: s.x,
                        value: s.value,
                        chord_pdf: density.chords().chord_pdf_numeric(s.x, step).ok(),
                        circle: args
                            .circle
                            .then(|| circle_distance_pdf(args.r, s.x))
                            .transpose()?,
                    })
                })
                .collect::<Result<_, CliError>>()?
        }
    };
    let kind = match args.kind {
        CurveKind::Cdf => "cdf",
        CurveKind::Pdf => "pdf",
    };
    let params = json!({
        "kind": kind,
        "n": args.n,
        "r": args.r,
        "points": args.points,
        "circle": args.circle,
    });
    Ok(Outcome {
        record: record("curve", params, Rows::Curve(rows), base_metadata(started)),
        success: true,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let started = Instant::now();
    let cfg = VerifyConfig {
        n_values: args.n.values().map_err(CliError::Usage)?,
        m_values: args.m.values().map_err(CliError::Usage)?,
        r: args.r,
        mc_samples: args.mc.mc_samples.unwrap_or(0),
        seed: args.mc.seed,
        grid_points: args.grid_points,
    };
    let report = verify::run(&cfg)?;
    let mut rows: Vec<CheckRow> = report
        .checks
        .into_iter()
        .map(|c| CheckRow {
            name: c.name,
            n: c.n,
            m: c.m,
            discrepancy: c.discrepancy,
            tolerance: c.tolerance,
            passed: c.passed,
        })
        .collect();
    let elapsed = started.elapsed().as_secs_f64();
    if let Some(budget) = args.budget {
        rows.push(CheckRow {
            name: "runtime budget (seconds)".into(),
            n: None,
            m: None,
            discrepancy: elapsed,
            tolerance: budget,
            passed: elapsed <= budget,
        });
    }
    let success = rows.iter().all(|r| r.passed);

    let mut meta = with_quad(base_metadata(started), &quad_config());
    if cfg.mc_samples > 0 {
        let mc = McConfig::new(cfg.mc_samples, cfg.seed, Estimator::PointPairDistance)?;
        meta = with_mc(meta, &mc);
        meta.shard_plan = meta
            .shard_plan
            .map(|plan| format!("{plan}; per-polygon seed = seed xor n"));
    }
    let params = json!({
        "n": args.n.to_string(),
        "m": args.m.to_string(),
        "r": args.r,
        "mc_samples": cfg.mc_samples,
        "seed": cfg.seed,
        "grid_points": cfg.grid_points,
        "budget": args.budget,
    });
    Ok(Outcome {
        record: record("verify", params, Rows::Checks(rows), meta),
        success,
    })
}
