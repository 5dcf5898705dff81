//! Seeded experiment grids producing plot-ready CSV.
//!
//! Every output file starts with `#` comment lines holding the artifact
//! version, the base seed and the full spec as JSON, followed by a CSV table.
//! Instance `s` of a grid point is drawn from stream `s` of the base seed, so
//! all solvers and all `M` values at one `K` see the same channels.

use std::io::Write;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channel::{generate_instance, ChannelConfig};
use crate::error::{Error, Result};
use crate::multi_carrier::{exhaustive_oracle, McpcOptions, OracleOptions, Solver};
use crate::scheduler::{run_frame, write_frame_csv, write_summary_csv, FrameConfig, FrameReport};

/// Version string embedded in every output header.
pub const VERSION: &str = concat!("noma-wsr ", env!("CARGO_PKG_VERSION"));
/// Revision of the output file layout.
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    WsrVsK,
    OpcountVsK,
    PfFrame,
    OracleGap,
}

impl std::str::FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "wsr-vs-k" => Ok(ExperimentId::WsrVsK),
            "opcount-vs-k" => Ok(ExperimentId::OpcountVsK),
            "pf-frame" => Ok(ExperimentId::PfFrame),
            "oracle-gap" => Ok(ExperimentId::OracleGap),
            _ => Err(Error::InvalidArgument(format!(
                "unknown experiment `{s}` (expected wsr-vs-k, opcount-vs-k, pf-frame or oracle-gap)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub id: ExperimentId,
    pub k_values: Vec<usize>,
    pub m_values: Vec<usize>,
    pub seeds: usize,
    pub epsilon: f64,
    pub solvers: Vec<Solver>,
    pub channel: ChannelConfig,
    pub out: PathBuf,
}

impl ExperimentSpec {
    /// Desk-scale defaults for `id`.
    pub fn new(id: ExperimentId, out: impl Into<PathBuf>) -> Self {
        let mut spec = ExperimentSpec {
            id,
            k_values: vec![5, 10, 15, 20, 25, 30],
            m_values: vec![1, 2, 3],
            seeds: 200,
            epsilon: 1e-4,
            solvers: vec![Solver::Jspa, Solver::Ftpc],
            channel: ChannelConfig::default(),
            out: out.into(),
        };
        match id {
            ExperimentId::WsrVsK => {}
            ExperimentId::OpcountVsK => spec.solvers = vec![Solver::Jspa],
            ExperimentId::PfFrame => {
                spec.k_values = vec![30];
                spec.m_values = vec![2];
                spec.seeds = 100;
            }
            ExperimentId::OracleGap => {
                spec.k_values = vec![3, 4, 5];
                spec.m_values = vec![2];
                spec.seeds = 50;
                spec.channel.subcarriers = 3;
                spec.solvers = vec![Solver::Jspa, Solver::Ftpc];
            }
        }
        spec
    }

    pub fn validate(&self) -> Result<()> {
        self.channel.validate()?;
        if self.seeds == 0 {
            return Err(Error::InvalidArgument("seeds must be at least 1".into()));
        }
        if self.k_values.is_empty() || self.k_values.iter().any(|&k| !(1..=64).contains(&k)) {
            return Err(Error::InvalidArgument("K values must lie in 1..=64".into()));
        }
        if self.m_values.is_empty() || self.m_values.contains(&0) {
            return Err(Error::InvalidArgument("M values must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::InvalidArgument("epsilon must be > 0".into()));
        }
        if self.id == ExperimentId::OracleGap
            && (self.k_values.iter().any(|&k| k > 6) || self.channel.subcarriers > 4)
        {
            return Err(Error::InvalidArgument(
                "oracle-gap is limited to K <= 6 and N <= 4".into(),
            ));
        }
        Ok(())
    }

    fn mcpc(&self) -> McpcOptions {
        McpcOptions {
            epsilon: self.epsilon,
            keep_trace: false,
            ..McpcOptions::default()
        }
    }
}

/// Sample mean and normal-approximation 95% half-width.
pub fn mean_ci95(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * (var / n as f64).sqrt())
}

/// One aggregated output row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Row {
    pub solver: String,
    #[serde(rename = "K")]
    pub k: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub metric: String,
    /// Seeds that produced a value.
    pub n: usize,
    pub mean: f64,
    pub ci95: f64,
    /// Seeds whose solve returned an error or an undefined metric.
    pub failed: usize,
    /// Seeds whose solve hit the iteration cap.
    pub not_converged: usize,
}

struct Sample {
    values: Vec<Option<f64>>,
    not_converged: usize,
}

fn row(solver: &str, k: usize, m: usize, metric: &str, s: &Sample) -> Row {
    let ok: Vec<f64> = s.values.iter().flatten().copied().collect();
    let (mean, ci95) = mean_ci95(&ok);
    Row {
        solver: solver.into(),
        k,
        m,
        metric: metric.into(),
        n: ok.len(),
        mean,
        ci95,
        failed: s.values.len() - ok.len(),
        not_converged: s.not_converged,
    }
}

/// Result of [`run_experiment`]; `extra` holds per-seed tables keyed by file
/// suffix.
pub struct ExperimentOutput {
    pub rows: Vec<Row>,
    pub extra: Vec<(String, Vec<u8>)>,
}

fn channel_for(spec: &ExperimentSpec, m: usize) -> ChannelConfig {
    ChannelConfig {
        max_mux: m,
        ..spec.channel.clone()
    }
}

/// Runs the grid on the current rayon pool. Output is independent of the
/// pool size.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    spec.validate()?;
    let opts = spec.mcpc();
    let seeds: Vec<u64> = (0..spec.seeds as u64).collect();
    let mut rows = Vec::new();
    let mut extra = Vec::new();
    match spec.id {
        ExperimentId::WsrVsK | ExperimentId::OpcountVsK => {
            for &k in &spec.k_values {
                for &m in &spec.m_values {
                    let cfg = channel_for(spec, m);
                    for &solver in &spec.solvers {
                        let results: Vec<Option<(f64, f64, f64, bool)>> = seeds
                            .par_iter()
                            .map(|&s| {
                                let inst = generate_instance(&cfg, k, s).ok()?;
                                let r = solver.solve(&inst, &opts).ok()?;
                                let ops = r.ops.total() as f64;
                                let per_iter = ops / r.iterations.max(1) as f64;
                                Some((r.wsr, ops, per_iter, r.converged))
                            })
                            .collect();
                        let not_converged = results.iter().flatten().filter(|r| !r.3).count();
                        let pick = |f: fn(&(f64, f64, f64, bool)) -> f64| Sample {
                            values: results.iter().map(|r| r.as_ref().map(f)).collect(),
                            not_converged,
                        };
                        let name = solver.name();
                        if spec.id == ExperimentId::WsrVsK {
                            rows.push(row(name, k, m, "wsr", &pick(|r| r.0)));
                        } else {
                            rows.push(row(name, k, m, "ops", &pick(|r| r.1)));
                            rows.push(row(name, k, m, "ops_per_iteration", &pick(|r| r.2)));
                        }
                    }
                }
            }
        }
        ExperimentId::PfFrame => {
            for &k in &spec.k_values {
                for &m in &spec.m_values {
                    let cfg = channel_for(spec, m);
                    let mut summary = Vec::new();
                    let mut frames_csv = Vec::new();
                    for &solver in &spec.solvers {
                        let frame_cfg = FrameConfig {
                            mcpc: opts,
                            ..FrameConfig::new(solver)
                        };
                        let frames: Vec<Option<(crate::model::Instance, FrameReport)>> = seeds
                            .par_iter()
                            .map(|&s| {
                                let inst = generate_instance(&cfg, k, s).ok()?;
                                let f = run_frame(&inst, &frame_cfg).ok()?;
                                Some((inst, f))
                            })
                            .collect();
                        let not_converged =
                            frames.iter().flatten().filter(|(_, f)| !f.converged).count();
                        let fairness = Sample {
                            values: frames
                                .iter()
                                .map(|f| f.as_ref().and_then(|(_, f)| f.fairness_index))
                                .collect(),
                            not_converged,
                        };
                        let sum_rate = Sample {
                            values: frames.iter().map(|f| f.as_ref().map(|(_, f)| f.sum_rate)).collect(),
                            not_converged,
                        };
                        rows.push(row(solver.name(), k, m, "fairness_index", &fairness));
                        rows.push(row(solver.name(), k, m, "sum_rate", &sum_rate));
                        for (s, f) in seeds.iter().zip(frames) {
                            if let Some(f) = f {
                                summary.push((*s, f));
                            }
                        }
                    }
                    let refs: Vec<(u64, &crate::model::Instance, &FrameReport)> =
                        summary.iter().map(|(s, (i, f))| (*s, i, f)).collect();
                    let mut buf = Vec::new();
                    write_summary_csv(&mut buf, &refs)?;
                    extra.push((format!("summary_K{k}_M{m}"), buf));
                    let frefs: Vec<(u64, &FrameReport)> =
                        summary.iter().map(|(s, (_, f))| (*s, f)).collect();
                    write_frame_csv(&mut frames_csv, &frefs)?;
                    extra.push((format!("frames_K{k}_M{m}"), frames_csv));
                }
            }
        }
        ExperimentId::OracleGap => {
            let oracle_opts = OracleOptions {
                mcpc: McpcOptions {
                    epsilon: spec.epsilon.min(OracleOptions::default().mcpc.epsilon),
                    ..OracleOptions::default().mcpc
                },
                ..OracleOptions::default()
            };
            for &k in &spec.k_values {
                for &m in &spec.m_values {
                    let cfg = channel_for(spec, m);
                    let results: Vec<Option<(f64, Vec<Option<f64>>)>> = seeds
                        .par_iter()
                        .map(|&s| {
                            let inst = generate_instance(&cfg, k, s).ok()?;
                            let best = exhaustive_oracle(&inst, &oracle_opts).ok()?.wsr;
                            let ratios = spec
                                .solvers
                                .iter()
                                .map(|sv| sv.solve(&inst, &opts).ok().map(|r| r.wsr / best))
                                .collect();
                            Some((best, ratios))
                        })
                        .collect();
                    for (i, solver) in spec.solvers.iter().enumerate() {
                        let s = Sample {
                            values: results
                                .iter()
                                .map(|r| r.as_ref().and_then(|(_, v)| v[i]))
                                .collect(),
                            not_converged: 0,
                        };
                        rows.push(row(solver.name(), k, m, "wsr_ratio_to_oracle", &s));
                    }
                }
            }
        }
    }
    Ok(ExperimentOutput { rows, extra })
}

fn write_header<W: Write>(w: &mut W, spec: &ExperimentSpec) -> Result<()> {
    writeln!(w, "# version: {VERSION}")?;
    writeln!(w, "# format: {FORMAT_VERSION}")?;
    writeln!(w, "# seed: {}", spec.channel.seed)?;
    writeln!(w, "# spec: {}", serde_json::to_string(spec)?)?;
    Ok(())
}

/// Writes the aggregated rows (header plus CSV with columns
/// `solver,K,M,metric,n,mean,ci95,failed,not_converged`).
pub fn write_rows<W: Write>(mut out: W, spec: &ExperimentSpec, rows: &[Row]) -> Result<()> {
    write_header(&mut out, spec)?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Path of a per-seed table written next to `out`.
pub fn sibling_path(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("experiment");
    out.with_file_name(format!("{stem}_{suffix}.csv"))
}

/// Runs `spec` and writes `spec.out` plus any per-seed tables beside it.
/// Returns the paths written.
pub fn run_and_write(spec: &ExperimentSpec) -> Result<Vec<PathBuf>> {
    let output = run_experiment(spec)?;
    let mut paths = vec![spec.out.clone()];
    write_rows(std::fs::File::create(&spec.out)?, spec, &output.rows)?;
    for (suffix, bytes) in output.extra {
        let path = sibling_path(&spec.out, &suffix);
        let mut f = std::fs::File::create(&path)?;
        write_header(&mut f, spec)?;
        f.write_all(&bytes)?;
        paths.push(path);
    }
    Ok(paths)
}
