//! Instance generation, batched solving, sweeps and their serialized forms.

use std::io::Write;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::gf::{Field, FieldCtx};
use crate::linalg::{Matrix, Subspace, Vector};
use crate::oracle::{HidingOracle, Mode};
use crate::quantum::law::{exact_weights, matrix_from_index, perp_of_coset};
use crate::solver::{round_success_probability, solve, SolveError, SolveReport, SolverConfig};

/// Random stream for instance `index` under a master seed.
pub fn instance_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

#[derive(Debug, Clone, Serialize)]
pub struct Trial {
    pub instance: u64,
    /// Recovered flag equals the instance's flag.
    pub recovered: bool,
    pub report: SolveReport,
}

/// Generates and solves `trials` instances; the result is ordered by index.
pub fn run_trials(
    field: &Field,
    n: usize,
    mode: Mode,
    seed: u64,
    trials: u64,
    cfg: &SolverConfig,
) -> Result<Vec<Trial>, SolveError> {
    (0..trials)
        .into_par_iter()
        .map(|instance| {
            let mut rng = instance_rng(seed, instance);
            let (oracle, desc) = HidingOracle::make_instance(field, n, mode, &mut rng);
            let report = solve(&oracle, cfg, &mut rng)?;
            let recovered = report.flag.as_ref() == Some(&desc.flag);
            Ok(Trial { instance, recovered, report })
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub n: usize,
    pub p: u64,
    pub r: u32,
    pub q: u64,
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub success_rate: f64,
    pub mean_rounds: f64,
    pub mean_rounds_total: f64,
    pub mean_queries: f64,
    /// Expected top-level rounds, the reciprocal of the per-round success
    /// probability.
    pub predicted_rounds: f64,
}

pub fn summarize(field: &Field, n: usize, mode: Mode, seed: u64, trials: &[Trial]) -> Result<Summary, SolveError> {
    let count = trials.len().max(1) as f64;
    let mean = |f: &dyn Fn(&Trial) -> u64| trials.iter().map(f).sum::<u64>() as f64 / count;
    let successes = trials.iter().filter(|t| t.report.success && t.recovered).count() as u64;
    let e = match mode {
        Mode::Gl => 1,
        Mode::Sl => n as u64,
    };
    let predicted_rounds = if n > 1 { 1.0 / round_success_probability(field, n, e)? } else { 0.0 };
    Ok(Summary {
        n,
        p: field.characteristic(),
        r: field.degree(),
        q: field.order(),
        mode,
        seed,
        trials: trials.len() as u64,
        successes,
        success_rate: successes as f64 / count,
        mean_rounds: mean(&|t| t.report.top_rounds()),
        mean_rounds_total: mean(&|t| t.report.rounds_total()),
        mean_queries: mean(&|t| t.report.oracle_queries),
        predicted_rounds,
    })
}

/// Per-instance CSV: one row per trial.
pub fn write_solve_csv(out: impl Write, seed: u64, trials: &[Trial]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "p",
        "r",
        "mode",
        "seed",
        "instance",
        "rounds_total",
        "queries",
        "prep_failures",
        "success",
    ])?;
    for t in trials {
        let r = &t.report;
        w.write_record([
            r.n.to_string(),
            r.p.to_string(),
            r.r.to_string(),
            r.mode.to_string(),
            seed.to_string(),
            t.instance.to_string(),
            r.rounds_total().to_string(),
            r.oracle_queries.to_string(),
            r.prep_failures.to_string(),
            (r.success && t.recovered).to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SolveDocument<'a> {
    summary: &'a Summary,
    instances: &'a [Trial],
}

pub fn write_solve_json(mut out: impl Write, summary: &Summary, trials: &[Trial]) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, &SolveDocument { summary, instances: trials })?;
    writeln!(out)
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub n: usize,
    pub p: u64,
    pub r: u32,
    pub q: u64,
    pub mode: Mode,
    pub seed: u64,
    pub trials: u64,
    pub success_rate: f64,
    pub mean_rounds: f64,
    pub predicted_rounds: f64,
    pub ratio: f64,
    pub mean_queries: f64,
}

/// Solves `trials` instances in every cell of the `(n, q)` grid.
pub fn sweep(
    ns: &[usize],
    qs: &[u64],
    mode: Mode,
    seed: u64,
    trials: u64,
    cfg: &SolverConfig,
) -> Result<Vec<SweepRow>, anyhow::Error> {
    let mut rows = Vec::new();
    for &n in ns {
        for &q in qs {
            let field = FieldCtx::of_order(q)?;
            let results = run_trials(&field, n, mode, seed, trials, cfg)?;
            let s = summarize(&field, n, mode, seed, &results)?;
            let ratio = if s.predicted_rounds > 0.0 { s.mean_rounds / s.predicted_rounds } else { f64::NAN };
            rows.push(SweepRow {
                n,
                p: s.p,
                r: s.r,
                q,
                mode,
                seed,
                trials,
                success_rate: s.success_rate,
                mean_rounds: s.mean_rounds,
                predicted_rounds: s.predicted_rounds,
                ratio,
                mean_queries: s.mean_queries,
            });
        }
    }
    Ok(rows)
}

pub fn write_sweep_csv(out: impl Write, rows: &[SweepRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "n",
        "p",
        "r",
        "q",
        "mode",
        "seed",
        "trials",
        "success_rate",
        "mean_rounds",
        "predicted_rounds",
        "ratio",
        "mean_queries",
    ])?;
    for row in rows {
        w.write_record([
            row.n.to_string(),
            row.p.to_string(),
            row.r.to_string(),
            row.q.to_string(),
            row.mode.to_string(),
            row.seed.to_string(),
            row.trials.to_string(),
            format!("{:.6}", row.success_rate),
            format!("{:.6}", row.mean_rounds),
            format!("{:.6}", row.predicted_rounds),
            format!("{:.6}", row.ratio),
            format!("{:.6}", row.mean_queries),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// The GL outcome law of one coset together with its stratum masses, each
/// computed by summing over outcomes.
#[derive(Debug, Clone, Serialize)]
pub struct ExactDistDump {
    pub n: usize,
    pub p: u64,
    pub r: u32,
    pub x: Vec<u32>,
    pub b: Vec<u32>,
    pub denominator: String,
    /// `(outcome encodings, numerator)` over the common denominator.
    pub rows: Vec<(Vec<u32>, String)>,
    pub perp: String,
    pub success: String,
    pub guess: String,
}

/// Draws `X` and `B` from `seed` and tabulates the law.
pub fn exact_dist(field: &Field, n: usize, seed: u64) -> Result<ExactDistDump, anyhow::Error> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = Matrix::random_invertible(field, n, &mut rng);
    let b = Matrix::random_invertible(field, n, &mut rng);
    let (nums, den) = exact_weights(&x, &b)?;
    let perp = perp_of_coset(&x, &b)?;
    let target = Subspace::span(field, n, vec![x.inverse()?.column(n - 1)]);
    let (mut perp_num, mut success_num, mut guess_num) = (0u32.into(), 0u32.into(), 0u32.into());
    let mut rows = Vec::with_capacity(nums.len());
    for (idx, num) in nums.iter().enumerate() {
        let y = matrix_from_index(field, n, idx);
        if *num != 0u32.into() {
            let in_perp = perp.contains(&Vector(y.entries().to_vec()));
            let corank_one = y.rank() + 1 == n;
            if in_perp {
                perp_num += num;
                if corank_one {
                    success_num += num;
                }
            }
            if corank_one && y.transpose().kernel() == target {
                guess_num += num;
            }
        }
        rows.push((y.encodings(), num.to_string()));
    }
    let ratio = |num: num_bigint::BigUint| {
        BigRational::new(num.into(), den.clone().into()).to_string()
    };
    Ok(ExactDistDump {
        n,
        p: field.characteristic(),
        r: field.degree(),
        x: x.encodings(),
        b: b.encodings(),
        denominator: den.to_string(),
        rows,
        perp: ratio(perp_num),
        success: ratio(success_num),
        guess: ratio(guess_num),
    })
}

fn split_ratio(s: &str) -> (String, String) {
    match s.split_once('/') {
        Some((a, b)) => (a.to_string(), b.to_string()),
        None => (s.to_string(), "1".to_string()),
    }
}

/// CSV with header `y,prob_num,prob_den` and footer rows `perp`, `success`
/// and `guess` holding reduced fractions.
pub fn write_exact_dist_csv(out: impl Write, dump: &ExactDistDump) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["y", "prob_num", "prob_den"])?;
    for (y, num) in &dump.rows {
        let enc: Vec<String> = y.iter().map(u32::to_string).collect();
        w.write_record([enc.join(";"), num.clone(), dump.denominator.clone()])?;
    }
    for (name, value) in [("perp", &dump.perp), ("success", &dump.success), ("guess", &dump.guess)] {
        let (num, den) = split_ratio(value);
        w.write_record([name.to_string(), num, den])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_exact_dist_json(mut out: impl Write, dump: &ExactDistDump) -> std::io::Result<()> {
    serde_json::to_writer_pretty(&mut out, dump)?;
    writeln!(out)
}

/// Parses a reduced fraction written by [`write_exact_dist_csv`].
pub fn parse_fraction(num: &str, den: &str) -> Option<BigRational> {
    let n: num_bigint::BigInt = num.parse().ok()?;
    let d: num_bigint::BigInt = den.parse().ok()?;
    (d != 0.into()).then(|| BigRational::new(n, d))
}

/// Mean and standard error of the top-level round counts.
pub fn round_statistics(trials: &[Trial]) -> (f64, f64) {
    let xs: Vec<f64> = trials.iter().map(|t| t.report.top_rounds().to_f64().unwrap_or(0.0)).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}
