//! Monte-Carlo frame-error simulation and inner-solver benchmarks.

use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{transmit_and_llr, ChannelSpec, RngSeed};
use crate::codes::{is_codeword, ml_decode_exhaustive, BinaryWord, LlrVector, SparseBinaryMatrix};
use crate::error::{Error, Result};
use crate::ipm::{DecodeResult, DecodeStatus, Decoder, SolverConfig};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimOptions {
    pub trials: usize,
    pub base_seed: u64,
    /// Worker threads; `None` uses the available parallelism.
    pub workers: Option<usize>,
    /// Decode every trial exhaustively as well (small codes only).
    pub compare_ml: bool,
    /// Record per-trial wall time (makes records non-reproducible).
    pub timing: bool,
}

impl SimOptions {
    pub fn new(trials: usize, base_seed: u64) -> Self {
        Self {
            trials,
            base_seed,
            workers: None,
            compare_ml: false,
            timing: false,
        }
    }
}

/// One simulated frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub index: u64,
    pub seed: u64,
    pub channel: String,
    pub status: DecodeStatus,
    pub frame_error: bool,
    pub bit_errors: usize,
    pub outer_iterations: usize,
    pub inner_iterations: usize,
    pub ml_frame_error: Option<bool>,
    pub wall_time_us: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MlComparison {
    pub frame_errors: usize,
    pub fer: f64,
    /// Integral LP outputs that differ from the exhaustive ML decision.
    pub certificate_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSummary {
    pub code_length: usize,
    pub channel: String,
    pub algorithm: String,
    pub inner: String,
    pub trials: usize,
    pub frame_errors: usize,
    pub fer: f64,
    /// Half-width of the normal-approximation 95% interval on the FER.
    pub fer_ci95: f64,
    pub bit_errors: usize,
    pub ber: f64,
    pub status_counts: BTreeMap<String, usize>,
    /// Mean outer iterations per status.
    pub mean_iterations: BTreeMap<String, f64>,
    /// EarlyRounded outputs that are not codewords.
    pub invalid_early_rounded: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ml: Option<MlComparison>,
}

impl SimSummary {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

fn pool(workers: Option<usize>) -> Result<rayon::ThreadPool> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::InvalidParameter("workers must be >= 1".into()));
        }
        b = b.num_threads(w);
    }
    b.build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))
}

struct Trial {
    record: TrialRecord,
    early_invalid: bool,
    certificate_violation: bool,
}

fn run_trial(
    decoder: &Decoder,
    ch: &ChannelSpec,
    opts: &SimOptions,
    channel: &str,
    index: u64,
) -> Result<Trial> {
    let h = decoder.code();
    let n = h.n();
    let seed = RngSeed(opts.base_seed).for_trial(index);
    let zero = BinaryWord::zeros(n);
    let gamma = transmit_and_llr(&zero, ch, seed)?;
    let start = Instant::now();
    let res: DecodeResult = decoder.decode(&gamma)?;
    let elapsed = start.elapsed();

    let bit_errors = res.output.iter().filter(|&&v| v != 0.0).count();
    // A run that did not converge makes no decision.
    let frame_error = bit_errors > 0 || res.status == DecodeStatus::Failure;
    let early_invalid = res.status == DecodeStatus::EarlyRounded
        && !res
            .word()
            .map(|w| is_codeword(h, &w).unwrap_or(false))
            .unwrap_or(false);

    let mut ml_frame_error = None;
    let mut certificate_violation = false;
    if opts.compare_ml {
        let (ml, _) = ml_decode_exhaustive(h, &gamma)?;
        ml_frame_error = Some(ml.weight() > 0);
        if res.status == DecodeStatus::Integral && res.word().as_ref() != Some(&ml) {
            certificate_violation = true;
        }
    }
    Ok(Trial {
        record: TrialRecord {
            index,
            seed: seed.0,
            channel: channel.to_string(),
            status: res.status,
            frame_error,
            bit_errors,
            outer_iterations: res.outer_iterations,
            inner_iterations: res.inner.iterations,
            ml_frame_error,
            wall_time_us: opts.timing.then_some(elapsed.as_secs_f64() * 1e6),
        },
        early_invalid,
        certificate_violation,
    })
}

/// Transmits the all-zero word `trials` times and decodes each frame.
/// Records come back in trial order and do not depend on the worker count.
pub fn simulate(
    h: &SparseBinaryMatrix,
    ch: &ChannelSpec,
    cfg: &SolverConfig,
    opts: &SimOptions,
) -> Result<(SimSummary, Vec<TrialRecord>)> {
    if opts.trials == 0 {
        return Err(Error::InvalidParameter("trials must be >= 1".into()));
    }
    ch.validate()?;
    let decoder = Decoder::new(h, cfg)?;
    let channel = ch.to_string();
    let trials: Vec<Trial> = pool(opts.workers)?.install(|| {
        (0..opts.trials as u64)
            .into_par_iter()
            .map(|i| run_trial(&decoder, ch, opts, &channel, i))
            .collect::<Result<Vec<_>>>()
    })?;

    let n = h.n();
    let total = trials.len();
    let frame_errors = trials.iter().filter(|t| t.record.frame_error).count();
    let bit_errors: usize = trials.iter().map(|t| t.record.bit_errors).sum();
    let fer = frame_errors as f64 / total as f64;
    let mut status_counts = BTreeMap::new();
    let mut iter_sums: BTreeMap<String, usize> = BTreeMap::new();
    for t in &trials {
        let key = t.record.status.name().to_string();
        *status_counts.entry(key.clone()).or_insert(0) += 1;
        *iter_sums.entry(key).or_insert(0) += t.record.outer_iterations;
    }
    let mean_iterations = iter_sums
        .iter()
        .map(|(k, &s)| (k.clone(), s as f64 / status_counts[k] as f64))
        .collect();
    let ml = opts.compare_ml.then(|| {
        let errs = trials
            .iter()
            .filter(|t| t.record.ml_frame_error == Some(true))
            .count();
        MlComparison {
            frame_errors: errs,
            fer: errs as f64 / total as f64,
            certificate_violations: trials.iter().filter(|t| t.certificate_violation).count(),
        }
    });
    let summary = SimSummary {
        code_length: n,
        channel,
        algorithm: cfg.algorithm.name().to_string(),
        inner: cfg.inner.name().to_string(),
        trials: total,
        frame_errors,
        fer,
        fer_ci95: 1.96 * (fer * (1.0 - fer) / total as f64).sqrt(),
        bit_errors,
        ber: bit_errors as f64 / (total * n) as f64,
        status_counts,
        mean_iterations,
        invalid_early_rounded: trials.iter().filter(|t| t.early_invalid).count(),
        ml,
    };
    Ok((summary, trials.into_iter().map(|t| t.record).collect()))
}

/// CSV with a header row and one record per line.
pub fn records_to_csv(records: &[TrialRecord]) -> Result<String> {
    to_csv(records)
}

fn to_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r)
            .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::InvalidParameter(format!("csv: {e}")))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// One (configuration, fixture) cell of a benchmark.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub config: usize,
    pub algorithm: String,
    pub inner: String,
    pub fixture: usize,
    pub status: DecodeStatus,
    pub cost: f64,
    pub outer_iterations: usize,
    pub inner_solves: usize,
    pub inner_iterations: usize,
    pub inner_fallbacks: usize,
    pub gap: f64,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub max_inner_residual: f64,
    pub wall_ms: f64,
}

/// Decodes every fixture under every configuration of the grid.
pub fn bench_inner_solvers(
    h: &SparseBinaryMatrix,
    fixtures: &[LlrVector],
    grid: &[SolverConfig],
) -> Result<Vec<BenchRow>> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("benchmark grid is empty".into()));
    }
    if fixtures.is_empty() {
        return Err(Error::InvalidParameter(
            "benchmark needs at least one fixture".into(),
        ));
    }
    let mut rows = Vec::with_capacity(grid.len() * fixtures.len());
    for (ci, cfg) in grid.iter().enumerate() {
        let decoder = Decoder::new(h, cfg)?;
        for (fi, gamma) in fixtures.iter().enumerate() {
            let start = Instant::now();
            let res = decoder.decode(gamma)?;
            let wall_ms = start.elapsed().as_secs_f64() * 1e3;
            rows.push(BenchRow {
                config: ci,
                algorithm: cfg.algorithm.name().to_string(),
                inner: cfg.inner.name().to_string(),
                fixture: fi,
                status: res.status,
                cost: res.cost,
                outer_iterations: res.outer_iterations,
                inner_solves: res.inner.solves,
                inner_iterations: res.inner.iterations,
                inner_fallbacks: res.inner.gabp_fallbacks + res.inner.dense_fallbacks,
                gap: res.gap,
                primal_residual: res.primal_residual,
                dual_residual: res.dual_residual,
                max_inner_residual: res.inner.max_relative_residual,
                wall_ms,
            });
        }
    }
    Ok(rows)
}

pub fn bench_to_csv(rows: &[BenchRow]) -> Result<String> {
    to_csv(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ipm::{Algorithm, InnerSolverKind};
    use rand::{Rng, SeedableRng};

    fn hamming() -> SparseBinaryMatrix {
        SparseBinaryMatrix::hamming_7_4()
    }

    #[test]
    fn noiseless_fer_is_zero() {
        let ch = ChannelSpec::bsc(1e-9).unwrap();
        for h in [hamming(), SparseBinaryMatrix::repetition(5).unwrap()] {
            let (s, recs) =
                simulate(&h, &ch, &SolverConfig::default(), &SimOptions::new(100, 1)).unwrap();
            assert_eq!(s.frame_errors, 0);
            assert_eq!(s.fer, 0.0);
            assert_eq!(s.fer_ci95, 0.0);
            assert_eq!(recs.len(), 100);
        }
    }

    #[test]
    fn worker_count_does_not_matter() {
        let ch = ChannelSpec::bsc(0.1).unwrap();
        let cfg = SolverConfig::default();
        let mut o1 = SimOptions::new(200, 42);
        o1.workers = Some(1);
        let mut o8 = o1.clone();
        o8.workers = Some(8);
        let (a, ra) = simulate(&hamming(), &ch, &cfg, &o1).unwrap();
        let (b, rb) = simulate(&hamming(), &ch, &cfg, &o8).unwrap();
        assert_eq!(a, b);
        assert_eq!(ra, rb);
        assert!(a.frame_errors > 0);
    }

    #[test]
    fn summary_arithmetic() {
        let ch = ChannelSpec::bsc(0.15).unwrap();
        let mut opts = SimOptions::new(300, 7);
        opts.compare_ml = true;
        let (s, recs) = simulate(&hamming(), &ch, &SolverConfig::default(), &opts).unwrap();
        assert_eq!(
            s.frame_errors,
            recs.iter().filter(|r| r.frame_error).count()
        );
        assert_eq!(s.fer, s.frame_errors as f64 / 300.0);
        let expect_ci = 1.96 * (s.fer * (1.0 - s.fer) / 300.0).sqrt();
        assert_eq!(s.fer_ci95, expect_ci);
        assert_eq!(s.status_counts.values().sum::<usize>(), 300);
        assert!(recs.iter().all(|r| r.bit_errors <= 7));
        let ml = s.ml.unwrap();
        assert_eq!(ml.certificate_violations, 0);
        assert!(s.fer >= ml.fer - 1e-12);
        assert_eq!(s.invalid_early_rounded, 0);
    }

    #[test]
    fn csv_has_header_and_rows() {
        let ch = ChannelSpec::biawgn(2.0, 4.0 / 7.0).unwrap();
        let mut opts = SimOptions::new(5, 3);
        opts.compare_ml = true;
        let (_, recs) = simulate(&hamming(), &ch, &SolverConfig::default(), &opts).unwrap();
        let csv = records_to_csv(&recs).unwrap();
        let mut lines = csv.lines();
        assert_eq!(
            lines.next().unwrap(),
            "index,seed,channel,status,frame_error,bit_errors,outer_iterations,inner_iterations,ml_frame_error,wall_time_us"
        );
        assert_eq!(lines.count(), 5);
    }

    #[test]
    fn zero_trials_rejected() {
        let ch = ChannelSpec::bsc(0.1).unwrap();
        assert!(simulate(
            &hamming(),
            &ch,
            &SolverConfig::default(),
            &SimOptions::new(0, 1)
        )
        .is_err());
    }

    #[test]
    fn bench_dense_cg_gabp_agree() {
        let h = hamming();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let fixtures: Vec<LlrVector> = (0..5)
            .map(|_| LlrVector::new((0..7).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap())
            .collect();
        let grid: Vec<SolverConfig> = [
            InnerSolverKind::Dense,
            InnerSolverKind::Cg,
            InnerSolverKind::Gabp,
        ]
        .into_iter()
        .map(|inner| {
            let mut c = SolverConfig::new(Algorithm::PdipFeasible, inner);
            c.rounding_cadence = 0;
            c
        })
        .collect();
        let rows = bench_inner_solvers(&h, &fixtures, &grid).unwrap();
        assert_eq!(rows.len(), 15);
        for f in 0..5 {
            let dense = rows
                .iter()
                .find(|r| r.fixture == f && r.inner == "dense")
                .unwrap()
                .cost;
            for r in rows.iter().filter(|r| r.fixture == f) {
                assert!(
                    (r.cost - dense).abs() <= 1e-6,
                    "{} {}",
                    r.inner,
                    r.cost - dense
                );
            }
        }
        let csv = bench_to_csv(&rows).unwrap();
        assert_eq!(csv.lines().count(), 16);
        assert!(bench_inner_solvers(&h, &fixtures, &[]).is_err());
        assert!(bench_inner_solvers(&h, &[], &grid).is_err());
    }
}
