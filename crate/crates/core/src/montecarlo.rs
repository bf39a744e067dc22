//! Trial execution, aggregation, and table rows.

use std::ops::AddAssign;

use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::codes::CodeKind;
use crate::error::ConfigError;
use crate::exec::TrialNoise;
use crate::noise::{BellDistribution, MeasurementNoise, NoiseModel, RngStream};
use crate::protocols::{
    AttemptStats, BasisOrder, PostselectMode, Protocol, ProtocolOptions, SchemeKind, MAX_ROUNDS,
};

/// Trials handed to a worker at a time. Fixed so chunking never depends on `jobs`.
const CHUNK: u64 = 2048;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub scheme: SchemeKind,
    pub code_a: CodeKind,
    pub code_b: CodeKind,
    pub rounds: usize,
    pub p: f64,
    pub trials: u64,
    pub seed: u64,
    pub postselect: PostselectMode,
    pub basis_order: BasisOrder,
    pub measurement_noise: MeasurementNoise,
    pub source: BellDistribution,
    pub kq_budget_steane: usize,
    pub kq_budget_surface: usize,
    /// Worker threads; 0 lets rayon decide. Never affects results.
    #[serde(skip)]
    pub jobs: usize,
}

impl RunConfig {
    pub const DEFAULT_TRIALS: u64 = 1_000_000;
    pub const DEFAULT_SEED: u64 = 2015;

    pub fn new(scheme: SchemeKind, code_a: CodeKind, code_b: CodeKind, rounds: usize, p: f64) -> Self {
        let opts = ProtocolOptions::default();
        RunConfig {
            scheme,
            code_a,
            code_b,
            rounds,
            p,
            trials: Self::DEFAULT_TRIALS,
            seed: Self::DEFAULT_SEED,
            postselect: opts.postselect,
            basis_order: opts.basis_order,
            measurement_noise: MeasurementNoise::default(),
            source: BellDistribution::RAW,
            kq_budget_steane: opts.kq_budget_steane,
            kq_budget_surface: opts.kq_budget_surface,
            jobs: 0,
        }
    }

    pub fn with_trials(mut self, trials: u64) -> Self {
        self.trials = trials;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_source(mut self, source: BellDistribution) -> Self {
        self.source = source;
        self
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = jobs;
        self
    }

    pub fn options(&self) -> ProtocolOptions {
        ProtocolOptions {
            postselect: self.postselect,
            basis_order: self.basis_order,
            kq_budget_steane: self.kq_budget_steane,
            kq_budget_surface: self.kq_budget_surface,
        }
    }

    pub fn noise(&self) -> Result<NoiseModel, ConfigError> {
        NoiseModel::with_measurement(self.p, self.measurement_noise)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        self.noise()?;
        if self.trials == 0 {
            return Err(ConfigError::NoTrials);
        }
        if self.rounds > MAX_ROUNDS {
            return Err(ConfigError::TooManyRounds(self.rounds, MAX_ROUNDS));
        }
        if self.kq_budget_steane < 7 || self.kq_budget_surface < 13 {
            return Err(ConfigError::Other("KQ budget smaller than the encoder register".into()));
        }
        if self.scheme == SchemeKind::Baseline
            && (self.code_a != CodeKind::Physical || self.code_b != CodeKind::Physical)
        {
            return Err(ConfigError::BaselineNeedsPhysical);
        }
        Ok(())
    }

    pub fn protocol(&self) -> Result<Protocol<'static>, ConfigError> {
        self.validate()?;
        Protocol::with_kinds(
            self.scheme,
            self.code_a,
            self.code_b,
            self.noise()?,
            self.source,
            self.options(),
        )
    }
}

/// Integer sums over a set of trials. Merging is order-independent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Tally {
    pub trials: u64,
    pub x_errors: u64,
    pub z_errors: u64,
    pub merged_errors: u64,
    pub raw_pairs: u64,
    pub kq: u64,
    pub n_1q: u64,
    pub n_2q: u64,
    pub stats: AttemptStats,
}

impl AddAssign<&Tally> for Tally {
    fn add_assign(&mut self, o: &Tally) {
        self.trials += o.trials;
        self.x_errors += o.x_errors;
        self.z_errors += o.z_errors;
        self.merged_errors += o.merged_errors;
        self.raw_pairs += o.raw_pairs;
        self.kq += o.kq;
        self.n_1q += o.n_1q;
        self.n_2q += o.n_2q;
        self.stats += &o.stats;
    }
}

/// Runs trials `range` of `cfg` on the current thread.
pub fn run_trial_range(protocol: &Protocol<'_>, cfg: &RunConfig, range: std::ops::Range<u64>) -> Tally {
    let mut t = Tally::default();
    for i in range {
        let mut noise = TrialNoise::new(protocol.noise(), RngStream::new(cfg.seed, i));
        let pair = protocol.build_pair_with_stats(cfg.rounds, &mut noise, &mut t.stats);
        let (x, z) = protocol.final_evaluate(&pair);
        t.trials += 1;
        t.x_errors += u64::from(x);
        t.z_errors += u64::from(z);
        t.merged_errors += u64::from(x || z);
        t.raw_pairs += pair.ledger.raw_pairs;
        t.kq += pair.ledger.kq;
        t.n_1q += pair.ledger.n_1q;
        t.n_2q += pair.ledger.n_2q;
    }
    t
}

/// All trials of `cfg`, spread over `cfg.jobs` workers.
pub fn run_tally(cfg: &RunConfig) -> Result<Tally, ConfigError> {
    let protocol = cfg.protocol()?;
    let chunks = cfg.trials.div_ceil(CHUNK);
    let work = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let lo = c * CHUNK;
                run_trial_range(&protocol, cfg, lo..(lo + CHUNK).min(cfg.trials))
            })
            .reduce(Tally::default, |mut a, b| {
                a += &b;
                a
            })
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| ConfigError::Other(format!("thread pool: {e}")))?;
    Ok(pool.install(work))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TableRow {
    pub rounds: usize,
    pub trials: u64,
    pub x_rate: f64,
    pub z_rate: f64,
    pub merged_rate: f64,
    pub ineff: f64,
    pub kq: f64,
    pub n_1q: f64,
    pub n_2q: f64,
    pub x_ci: Interval,
    pub z_ci: Interval,
    pub merged_ci: Interval,
}

impl TableRow {
    pub fn from_tally(rounds: usize, t: &Tally) -> Self {
        let n = t.trials as f64;
        let ci = |k| {
            let (lo, hi) = wilson_interval(k, t.trials, 0.95);
            Interval { lo, hi }
        };
        TableRow {
            rounds,
            trials: t.trials,
            x_rate: t.x_errors as f64 / n,
            z_rate: t.z_errors as f64 / n,
            merged_rate: t.merged_errors as f64 / n,
            ineff: t.raw_pairs as f64 / n,
            kq: t.kq as f64 / n,
            n_1q: t.n_1q as f64 / n,
            n_2q: t.n_2q as f64 / n,
            x_ci: ci(t.x_errors),
            z_ci: ci(t.z_errors),
            merged_ci: ci(t.merged_errors),
        }
    }
}

pub fn run_row(cfg: &RunConfig) -> Result<TableRow, ConfigError> {
    Ok(TableRow::from_tally(cfg.rounds, &run_tally(cfg)?))
}

/// One row per rounds value in `0..=max_rounds`, all other settings from `cfg`.
pub fn run_table(cfg: &RunConfig, max_rounds: usize) -> Result<Vec<TableRow>, ConfigError> {
    (0..=max_rounds)
        .map(|rounds| run_row(&RunConfig { rounds, ..cfg.clone() }))
        .collect()
}

/// Wilson score interval for `successes` out of `trials` at the given confidence.
///
/// Panics if `trials == 0`, `successes > trials`, or confidence is outside (0, 1).
pub fn wilson_interval(successes: u64, trials: u64, confidence: f64) -> (f64, f64) {
    assert!(trials > 0 && successes <= trials, "need 0 <= successes <= trials, trials > 0");
    assert!(confidence > 0.0 && confidence < 1.0, "confidence must lie in (0, 1)");
    let z = if confidence == 0.95 {
        Z_95
    } else {
        Normal::standard().inverse_cdf(0.5 + confidence / 2.0)
    };
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z / denom * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

const Z_95: f64 = 1.959_963_984_540_054;

/// Error rates tabulated for each configuration.
pub const TABLE_P: [f64; 3] = [1e-3, 1e-4, 1e-5];

/// Numbered sweep: a scheme over a code pair, rounds 0 to 4 at each of [`TABLE_P`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TableSpec {
    pub id: usize,
    pub scheme: SchemeKind,
    pub code_a: CodeKind,
    pub code_b: CodeKind,
}

impl TableSpec {
    pub const MAX_ROUNDS: usize = 4;

    pub fn all() -> [TableSpec; 6] {
        use CodeKind::*;
        use SchemeKind::*;
        let t = |id, scheme, code_a, code_b| TableSpec { id, scheme, code_a, code_b };
        [
            t(1, Baseline, Physical, Physical),
            t(2, BeforeEncoding, Steane7, Surface3),
            t(3, AfterEncoding, Steane7, Surface3),
            t(4, AfterEncodingStrict, Steane7, Surface3),
            t(5, AfterEncodingStrict, Steane7, Physical),
            t(6, AfterEncodingStrict, Surface3, Physical),
        ]
    }

    pub fn get(id: usize) -> Option<TableSpec> {
        Self::all().into_iter().find(|t| t.id == id)
    }

    /// Sub-table suffix for each entry of [`TABLE_P`].
    pub fn file_name(&self, p_index: usize) -> String {
        format!("table{}{}.csv", self.id, (b'a' + p_index as u8) as char)
    }

    pub fn config(&self, p: f64) -> RunConfig {
        RunConfig::new(self.scheme, self.code_a, self.code_b, 0, p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Bound found by bisection on |p̂ − q| = z·sqrt(q(1 − q)/n).
    fn wilson_by_bisection(k: u64, n: u64, z: f64, upper: bool) -> f64 {
        let ph = k as f64 / n as f64;
        let f = |q: f64| (ph - q).abs() - z * (q * (1.0 - q) / n as f64).sqrt();
        let (mut lo, mut hi) = if upper { (ph, 1.0) } else { (0.0, ph) };
        if upper && f(1.0) <= 0.0 || !upper && f(0.0) <= 0.0 {
            return if upper { 1.0 } else { 0.0 };
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            let inside = f(mid) <= 0.0;
            if inside == upper {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn wilson_matches_bisection_oracle() {
        for (k, n) in [(0, 100), (50, 100), (100, 100), (3, 1000), (1234, 1_000_000), (7, 7)] {
            let (lo, hi) = wilson_interval(k, n, 0.95);
            assert!((lo - wilson_by_bisection(k, n, Z_95, false)).abs() < 1e-9, "{k}/{n}");
            assert!((hi - wilson_by_bisection(k, n, Z_95, true)).abs() < 1e-9, "{k}/{n}");
        }
    }

    #[test]
    fn wilson_reference_points() {
        let (_, hi) = wilson_interval(0, 100, 0.95);
        assert!((hi - 0.036994).abs() < 1e-6);
        let (lo, hi) = wilson_interval(50, 100, 0.95);
        assert!(((lo + hi) / 2.0 - 0.5).abs() < 1e-12);
        let (lo, _) = wilson_interval(100, 100, 0.95);
        assert!((lo - 0.963006).abs() < 1e-6);
        let (lo99, hi99) = wilson_interval(50, 100, 0.99);
        assert!(lo99 < lo && hi99 > hi);
    }

    #[test]
    fn z_constant_matches_inverse_cdf() {
        let z = Normal::standard().inverse_cdf(0.975);
        assert!((z - Z_95).abs() < 1e-9);
    }

    #[test]
    fn jobs_do_not_change_tallies() {
        let base = RunConfig::new(SchemeKind::AfterEncodingStrict, CodeKind::Steane7, CodeKind::Physical, 2, 1e-2)
            .with_trials(5000)
            .with_seed(99);
        let a = run_tally(&base.clone().with_jobs(1)).unwrap();
        let b = run_tally(&base.with_jobs(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn invalid_configs() {
        let ok = RunConfig::new(SchemeKind::Baseline, CodeKind::Physical, CodeKind::Physical, 1, 0.1);
        assert!(ok.validate().is_ok());
        assert!(RunConfig { p: 1.5, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { trials: 0, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { code_a: CodeKind::Steane7, ..ok.clone() }.validate().is_err());
        assert!(RunConfig { kq_budget_surface: 12, ..ok }.validate().is_err());
    }

    #[test]
    fn table_files() {
        let t = TableSpec::get(4).unwrap();
        assert_eq!(t.file_name(0), "table4a.csv");
        assert_eq!(t.file_name(2), "table4c.csv");
        assert!(TableSpec::get(7).is_none());
    }
}
