// SPDX-License-Identifier: MIT OR Apache-2.0

//! Synthetic series and the timing harness behind `strongseg bench`.

use std::fmt::Write as _;
use std::io::Write;
use std::time::Instant;

use clap::{Args, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Algorithm, CliError, PenaltyArg, DEFAULT_EPSILON};
use crate::approx::solve_approx;
use crate::cumulative::{all_dp, all_ms};
use crate::exact_dp::bellman_all;
use crate::maxseg::ms_fast;
use crate::penalty::{Counted, Penalty, PenaltyKind, PenaltySource, Series};

/// Largest `m` for which `bench` runs the quadratic exact solver.
pub const DEFAULT_EXACT_CAP: usize = 20_000;

/// Planted segments in the `step` generator.
const STEP_SEGMENTS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Generator {
    /// Piecewise-constant levels with uniform noise.
    Step,
    /// Random walk with uniform increments.
    Walk,
    /// Independent uniform noise.
    Noise,
}

impl Generator {
    pub fn name(self) -> &'static str {
        match self {
            Generator::Step => "step",
            Generator::Walk => "walk",
            Generator::Noise => "noise",
        }
    }

    /// Reproducible series of `m` points.
    pub fn generate(self, m: usize, seed: u64) -> Series {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let points = match self {
            Generator::Noise => (0..m).map(|_| rng.random_range(-1.0..1.0)).collect(),
            Generator::Walk => {
                let mut x = 0.0;
                (0..m)
                    .map(|_| {
                        x += rng.random_range(-1.0..1.0);
                        x
                    })
                    .collect()
            }
            Generator::Step => {
                let mut cuts: Vec<usize> = (1..STEP_SEGMENTS).map(|_| rng.random_range(0..=m)).collect();
                cuts.push(m);
                cuts.sort_unstable();
                let mut points = Vec::with_capacity(m);
                for cut in cuts {
                    let level: f64 = rng.random_range(-10.0..10.0);
                    while points.len() < cut {
                        points.push(level + rng.random_range(-1.0..1.0));
                    }
                }
                points
            }
        };
        Series::new(points).expect("generated series is finite and non-empty")
    }
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "step")]
    pub generators: Vec<Generator>,
    /// Series lengths.
    #[arg(long, value_delimiter = ',', default_value = "1000,10000,100000")]
    pub sizes: Vec<usize>,
    #[arg(long = "k", value_delimiter = ',', default_value = "10")]
    pub ks: Vec<usize>,
    #[arg(long = "epsilon", value_delimiter = ',', default_values_t = vec![DEFAULT_EPSILON])]
    pub epsilons: Vec<f64>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "solve,maxseg,cumulative,cumulative-max")]
    pub algorithms: Vec<Algorithm>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Runs per cell; the median wall time is reported.
    #[arg(long, default_value_t = 1)]
    pub repeats: usize,
    #[arg(long, value_enum, default_value_t = PenaltyArg::L2)]
    pub penalty: PenaltyArg,
    /// Largest m for which `exact` cells run.
    #[arg(long, default_value_t = DEFAULT_EXACT_CAP)]
    pub exact_cap: usize,
}

impl BenchArgs {
    pub fn into_config(self) -> Result<BenchConfig, CliError> {
        let config = BenchConfig {
            generators: self.generators,
            sizes: self.sizes,
            ks: self.ks,
            epsilons: self.epsilons,
            algorithms: self.algorithms,
            seed: self.seed,
            repeats: self.repeats,
            penalty: self.penalty.into(),
            exact_cap: self.exact_cap,
        };
        config.validate()?;
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchConfig {
    pub generators: Vec<Generator>,
    pub sizes: Vec<usize>,
    pub ks: Vec<usize>,
    pub epsilons: Vec<f64>,
    pub algorithms: Vec<Algorithm>,
    pub seed: u64,
    pub repeats: usize,
    pub penalty: PenaltyKind,
    pub exact_cap: usize,
}

impl BenchConfig {
    fn validate(&self) -> Result<(), CliError> {
        if self.sizes.contains(&0) {
            return Err(CliError::Usage("sizes must be positive".into()));
        }
        if self.ks.contains(&0) {
            return Err(CliError::Usage("k must be at least 1".into()));
        }
        if self.epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) {
            return Err(CliError::Usage("epsilon must be positive".into()));
        }
        if self.repeats == 0 {
            return Err(CliError::Usage("repeats must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub generator: Generator,
    pub seed: u64,
    pub m: usize,
    pub k: usize,
    pub epsilon: Option<f64>,
    pub algorithm: Algorithm,
    pub wall_time_ms: f64,
    pub eval_count: u64,
    pub cost: f64,
    pub ratio_vs_exact: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchTable {
    pub rows: Vec<BenchRow>,
}

pub const BENCH_COLUMNS: [&str; 10] = [
    "generator",
    "seed",
    "m",
    "k",
    "epsilon",
    "algorithm",
    "wall_time_ms",
    "eval_count",
    "cost",
    "ratio_vs_exact",
];

impl BenchTable {
    pub fn to_tsv(&self) -> String {
        let mut out = BENCH_COLUMNS.join("\t");
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{}\t{}\t{}\t{}\t{}\t{}\t{:.3}\t{}\t{}\t{}",
                r.generator.name(),
                r.seed,
                r.m,
                r.k,
                r.epsilon.map(|e| e.to_string()).unwrap_or_default(),
                r.algorithm.name(),
                r.wall_time_ms,
                r.eval_count,
                r.cost,
                r.ratio_vs_exact.map(|x| x.to_string()).unwrap_or_default(),
            );
        }
        out
    }
}

/// Runs one solver once, returning (cost, eval count, wall milliseconds).
pub fn time_solver(
    p: &PenaltySource,
    algorithm: Algorithm,
    k: usize,
    epsilon: f64,
) -> Result<(f64, u64, f64), CliError> {
    let counted = Counted::new(p);
    let m = p.num_points();
    let started = Instant::now();
    let cost = match algorithm {
        Algorithm::Solve => solve_approx(&counted, k, epsilon)?.cost,
        Algorithm::Exact => bellman_all(&counted, k)?.get(m, k),
        Algorithm::Maxseg => ms_fast(&counted, k)?.value,
        Algorithm::Cumulative => all_dp(&counted, k, epsilon)?.get(m, k),
        Algorithm::CumulativeMax => all_ms(&counted, k)?.get(m, k),
    };
    let wall = started.elapsed().as_secs_f64() * 1e3;
    Ok((cost, counted.evals(), wall))
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        (xs[n / 2 - 1] + xs[n / 2]) / 2.0
    }
}

fn measure(
    p: &PenaltySource,
    algorithm: Algorithm,
    k: usize,
    epsilon: f64,
    repeats: usize,
) -> Result<(f64, u64, f64), CliError> {
    let (cost, evals, first) = time_solver(p, algorithm, k, epsilon)?;
    let mut walls = vec![first];
    for _ in 1..repeats {
        walls.push(time_solver(p, algorithm, k, epsilon)?.2);
    }
    Ok((cost, evals, median(walls)))
}

/// Runs every configured cell. Exact cells above the cap are refused with a
/// note on `warn` and leave `ratio_vs_exact` empty for that size.
pub fn bench(config: &BenchConfig, warn: &mut dyn Write) -> Result<BenchTable, CliError> {
    config.validate()?;
    let mut table = BenchTable::default();
    for &generator in &config.generators {
        for &m in &config.sizes {
            let series = generator.generate(m, config.seed);
            let p = PenaltySource::build(config.penalty, &series);
            for &k in &config.ks {
                let mut exact_cost = None;
                let mut pending = Vec::new();
                for &algorithm in &config.algorithms {
                    if algorithm == Algorithm::Exact && m > config.exact_cap {
                        let _ = writeln!(
                            warn,
                            "refusing exact cell: generator={} m={m} k={k} exceeds cap {}",
                            generator.name(),
                            config.exact_cap
                        );
                        continue;
                    }
                    let eps_list: Vec<Option<f64>> = if algorithm.uses_epsilon() {
                        config.epsilons.iter().copied().map(Some).collect()
                    } else {
                        vec![None]
                    };
                    for epsilon in eps_list {
                        let (cost, eval_count, wall_time_ms) =
                            measure(&p, algorithm, k, epsilon.unwrap_or(DEFAULT_EPSILON), config.repeats)?;
                        if algorithm == Algorithm::Exact {
                            exact_cost = Some(cost);
                        }
                        pending.push(BenchRow {
                            generator,
                            seed: config.seed,
                            m,
                            k,
                            epsilon,
                            algorithm,
                            wall_time_ms,
                            eval_count,
                            cost,
                            ratio_vs_exact: None,
                        });
                    }
                }
                for mut row in pending {
                    if row.algorithm.objective() == super::Objective::Sum {
                        row.ratio_vs_exact = exact_cost.map(|e| ratio(row.cost, e));
                    }
                    table.rows.push(row);
                }
            }
        }
    }
    Ok(table)
}

fn ratio(cost: f64, exact: f64) -> f64 {
    if exact == 0.0 {
        if cost == 0.0 {
            1.0
        } else {
            f64::INFINITY
        }
    } else {
        cost / exact
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generators_are_deterministic() {
        for g in [Generator::Step, Generator::Walk, Generator::Noise] {
            let a = g.generate(1000, 7);
            let b = g.generate(1000, 7);
            assert_eq!(a.points().len(), 1000);
            let bytes = |s: &Series| s.points().iter().flat_map(|x| x.to_le_bytes()).collect::<Vec<u8>>();
            assert_eq!(bytes(&a), bytes(&b));
            assert_ne!(bytes(&a), bytes(&g.generate(1000, 8)));
        }
    }

    #[test]
    fn step_has_plateaus() {
        let s = Generator::Step.generate(500, 3);
        let jumps = s.points().windows(2).filter(|w| (w[0] - w[1]).abs() > 2.0).count();
        assert!(jumps < STEP_SEGMENTS);
    }

    #[test]
    fn refuses_exact_above_cap() {
        let config = BenchConfig {
            generators: vec![Generator::Noise],
            sizes: vec![50, 120],
            ks: vec![3],
            epsilons: vec![0.5],
            algorithms: vec![Algorithm::Exact, Algorithm::Solve, Algorithm::Maxseg],
            seed: 1,
            repeats: 1,
            penalty: PenaltyKind::L2,
            exact_cap: 100,
        };
        let mut warn = Vec::new();
        let t = bench(&config, &mut warn).unwrap();
        let warn = String::from_utf8(warn).unwrap();
        assert!(warn.contains("m=120"));
        let small: Vec<_> = t.rows.iter().filter(|r| r.m == 50).collect();
        let large: Vec<_> = t.rows.iter().filter(|r| r.m == 120).collect();
        assert_eq!(small.len(), 3);
        assert_eq!(large.len(), 2);
        let solve = small.iter().find(|r| r.algorithm == Algorithm::Solve).unwrap();
        let ratio = solve.ratio_vs_exact.unwrap();
        assert!((1.0..=1.5 + 1e-9).contains(&ratio));
        assert!(small.iter().find(|r| r.algorithm == Algorithm::Maxseg).unwrap().ratio_vs_exact.is_none());
        assert!(large.iter().all(|r| r.ratio_vs_exact.is_none()));

        let tsv = t.to_tsv();
        let mut lines = tsv.lines();
        assert_eq!(lines.next().unwrap().split('\t').collect::<Vec<_>>(), BENCH_COLUMNS);
        assert!(lines.all(|l| l.split('\t').count() == BENCH_COLUMNS.len()));
    }
}
