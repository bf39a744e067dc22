//! Pauli circuit-level noise, the raw Bell-pair source, and per-trial RNG streams.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::ConfigError;
use crate::pauli::Pauli;

pub type TrialRng = ChaCha8Rng;

/// Identifies one independent random stream: master seed plus trial index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngStream {
    pub seed: u64,
    pub stream_id: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        RngStream { seed, stream_id }
    }

    /// ChaCha keyed by the seed, positioned on its own stream.
    pub fn rng(&self) -> TrialRng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream_id);
        rng
    }
}

/// How a readout fault is modeled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MeasurementNoise {
    /// A 1q Pauli draw right before a Z readout; flips with probability 2p/3.
    #[default]
    Pauli,
    /// The outcome bit flips with probability p; the frame is untouched.
    Flip,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NoiseModel {
    p: f64,
    measurement: MeasurementNoise,
}

impl NoiseModel {
    pub fn new(p: f64) -> Result<Self, ConfigError> {
        Self::with_measurement(p, MeasurementNoise::default())
    }

    pub fn with_measurement(p: f64, measurement: MeasurementNoise) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&p) {
            return Err(ConfigError::Probability(p));
        }
        Ok(NoiseModel { p, measurement })
    }

    pub fn noiseless() -> Self {
        NoiseModel { p: 0.0, measurement: MeasurementNoise::Pauli }
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn measurement(&self) -> MeasurementNoise {
        self.measurement
    }
}

/// Bell-diagonal weights over (Φ⁺, Φ⁻, Ψ⁺, Ψ⁻).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BellDistribution {
    weights: [f64; 4],
}

impl BellDistribution {
    /// The source used by every table: F = 0.85 with a phase-flip component of 0.04.
    pub const RAW: BellDistribution = BellDistribution {
        weights: [0.85, 0.04, 0.055, 0.055],
    };

    pub const PERFECT: BellDistribution = BellDistribution {
        weights: [1.0, 0.0, 0.0, 0.0],
    };

    pub fn werner(f: f64) -> Result<Self, ConfigError> {
        if !(0.0..=1.0).contains(&f) {
            return Err(ConfigError::Fidelity(f));
        }
        let e = (1.0 - f) / 3.0;
        Ok(BellDistribution { weights: [f, e, e, e] })
    }

    /// Weights must be non-negative and sum to 1 within 1e-9.
    pub fn from_weights(weights: [f64; 4]) -> Result<Self, ConfigError> {
        let sum: f64 = weights.iter().sum();
        if weights.iter().any(|&w| !(0.0..=1.0).contains(&w)) || (sum - 1.0).abs() > 1e-9 {
            return Err(ConfigError::Other(format!("invalid Bell weights {weights:?}")));
        }
        Ok(BellDistribution { weights })
    }

    pub fn weights(&self) -> [f64; 4] {
        self.weights
    }

    pub fn fidelity(&self) -> f64 {
        self.weights[0]
    }

    /// Error on half B relative to Φ⁺: I, Z, X or Y.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Pauli {
        let u: f64 = rng.random();
        let [w0, w1, w2, _] = self.weights;
        if u < w0 {
            Pauli::I
        } else if u < w0 + w1 {
            Pauli::Z
        } else if u < w0 + w1 + w2 {
            Pauli::X
        } else {
            Pauli::Y
        }
    }
}

impl Default for BellDistribution {
    fn default() -> Self {
        Self::RAW
    }
}

/// I with probability 1 − p, otherwise X, Y or Z uniformly.
pub fn sample_1q_noise<R: Rng + ?Sized>(rng: &mut R, p: f64) -> Pauli {
    if rng.random::<f64>() < p {
        uniform_1q(rng)
    } else {
        Pauli::I
    }
}

/// (I, I) with probability 1 − p, otherwise one of the 15 other pairs uniformly.
pub fn sample_2q_noise<R: Rng + ?Sized>(rng: &mut R, p: f64) -> (Pauli, Pauli) {
    if rng.random::<f64>() < p {
        uniform_2q(rng)
    } else {
        (Pauli::I, Pauli::I)
    }
}

pub fn sample_raw_bell<R: Rng + ?Sized>(rng: &mut R) -> Pauli {
    BellDistribution::RAW.sample(rng)
}

/// Folds a 1q draw into `frame` and reports whether a Z readout flips.
pub fn measurement_flip<R: Rng + ?Sized>(rng: &mut R, p: f64, frame: &mut Pauli) -> bool {
    *frame = *frame * sample_1q_noise(rng, p);
    frame.x_bit()
}

fn uniform_1q<R: Rng + ?Sized>(rng: &mut R) -> Pauli {
    Pauli::from_index(rng.random_range(1..4u8))
}

fn uniform_2q<R: Rng + ?Sized>(rng: &mut R) -> (Pauli, Pauli) {
    let k = rng.random_range(1..16u8);
    (Pauli::from_index(k >> 2), Pauli::from_index(k & 3))
}

/// Decides fault locations by drawing the gap to the next fault from a
/// geometric law. Equivalent to one Bernoulli(p) per location, but costs one
/// draw per fault instead of one per location.
#[derive(Debug, Clone)]
pub struct FaultSampler {
    p: f64,
    ln_q: f64,
    gap: u64,
}

impl FaultSampler {
    pub fn new<R: Rng + ?Sized>(p: f64, rng: &mut R) -> Self {
        let mut s = FaultSampler {
            p,
            ln_q: (1.0 - p).ln(),
            gap: 0,
        };
        s.gap = s.draw_gap(rng);
        s
    }

    fn draw_gap<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        if self.p <= 0.0 {
            return u64::MAX;
        }
        if self.p >= 1.0 {
            return 0;
        }
        // u in (0, 1] keeps ln finite.
        let u = 1.0 - rng.random::<f64>();
        let g = (u.ln() / self.ln_q).floor();
        if g >= u64::MAX as f64 {
            u64::MAX
        } else {
            g as u64
        }
    }

    /// Whether the next location is faulty.
    #[inline]
    pub fn strike<R: Rng + ?Sized>(&mut self, rng: &mut R) -> bool {
        if self.gap == 0 {
            self.gap = self.draw_gap(rng);
            true
        } else {
            if self.gap != u64::MAX {
                self.gap -= 1;
            }
            false
        }
    }

    /// Next single-qubit location: I, or X/Y/Z with p/3 each.
    #[inline]
    pub fn next_1q<R: Rng + ?Sized>(&mut self, rng: &mut R) -> Pauli {
        if self.strike(rng) {
            uniform_1q(rng)
        } else {
            Pauli::I
        }
    }

    /// Next two-qubit location: (I, I), or one of 15 pairs with p/15 each.
    #[inline]
    pub fn next_2q<R: Rng + ?Sized>(&mut self, rng: &mut R) -> (Pauli, Pauli) {
        if self.strike(rng) {
            uniform_2q(rng)
        } else {
            (Pauli::I, Pauli::I)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn within_4_sigma(count: u64, n: u64, p: f64) -> bool {
        let mean = n as f64 * p;
        let sd = (n as f64 * p * (1.0 - p)).sqrt();
        (count as f64 - mean).abs() <= 4.0 * sd
    }

    #[test]
    fn zero_p_is_silent() {
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..1000 {
            assert_eq!(sample_1q_noise(&mut rng, 0.0), Pauli::I);
            assert_eq!(sample_2q_noise(&mut rng, 0.0), (Pauli::I, Pauli::I));
        }
    }

    #[test]
    fn unit_p_always_faults() {
        let mut rng = RngStream::new(2, 0).rng();
        for _ in 0..1000 {
            assert_ne!(sample_1q_noise(&mut rng, 1.0), Pauli::I);
            assert_ne!(sample_2q_noise(&mut rng, 1.0), (Pauli::I, Pauli::I));
        }
    }

    #[test]
    fn one_qubit_frequencies() {
        let mut rng = RngStream::new(3, 0).rng();
        let n = 1_000_000u64;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            counts[sample_1q_noise(&mut rng, 0.3) as usize] += 1;
        }
        assert!(within_4_sigma(counts[0], n, 0.7));
        for c in &counts[1..] {
            assert!(within_4_sigma(*c, n, 0.1), "{counts:?}");
        }
    }

    #[test]
    fn two_qubit_frequencies() {
        let mut rng = RngStream::new(4, 0).rng();
        let n = 1_000_000u64;
        let mut counts = [0u64; 16];
        for _ in 0..n {
            let (a, b) = sample_2q_noise(&mut rng, 0.15);
            counts[(a as usize) * 4 + b as usize] += 1;
        }
        assert!(within_4_sigma(counts[0], n, 0.85));
        for c in &counts[1..] {
            assert!(within_4_sigma(*c, n, 0.01), "{counts:?}");
        }
    }

    #[test]
    fn raw_bell_frequencies() {
        let mut rng = RngStream::new(5, 0).rng();
        let n = 1_000_000u64;
        let mut counts = [0u64; 4];
        for _ in 0..n {
            counts[sample_raw_bell(&mut rng) as usize] += 1;
        }
        assert!(within_4_sigma(counts[Pauli::I as usize], n, 0.85));
        assert!(within_4_sigma(counts[Pauli::Z as usize], n, 0.04));
        let x_component = counts[Pauli::X as usize] + counts[Pauli::Y as usize];
        assert!(within_4_sigma(x_component, n, 0.11));
    }

    #[test]
    fn measurement_flip_cases() {
        let mut rng = RngStream::new(6, 0).rng();
        for (frame, flip) in [(Pauli::I, false), (Pauli::X, true), (Pauli::Z, false), (Pauli::Y, true)] {
            let mut f = frame;
            assert_eq!(measurement_flip(&mut rng, 0.0, &mut f), flip);
            assert_eq!(f, frame);
        }
    }

    #[test]
    fn streams_replay_and_differ() {
        let draw = |s: RngStream| {
            let mut r = s.rng();
            (0..8).map(|_| r.random::<u64>()).collect::<Vec<_>>()
        };
        assert_eq!(draw(RngStream::new(9, 3)), draw(RngStream::new(9, 3)));
        assert_ne!(draw(RngStream::new(9, 3)), draw(RngStream::new(9, 4)));
        assert_ne!(draw(RngStream::new(9, 3)), draw(RngStream::new(10, 3)));
    }

    #[test]
    fn fault_sampler_matches_bernoulli_rate() {
        for p in [0.0, 1e-3, 0.05, 0.5, 1.0] {
            let mut rng = RngStream::new(7, 0).rng();
            let mut f = FaultSampler::new(p, &mut rng);
            let n = 2_000_000u64;
            let hits = (0..n).filter(|_| f.strike(&mut rng)).count() as u64;
            if p == 0.0 || p == 1.0 {
                assert_eq!(hits, (p * n as f64) as u64);
            } else {
                assert!(within_4_sigma(hits, n, p), "p={p} hits={hits}");
            }
        }
    }

    #[test]
    fn fault_gaps_are_memoryless() {
        // Faults at consecutive locations should occur with probability p².
        let p = 0.2;
        let mut rng = RngStream::new(8, 0).rng();
        let mut f = FaultSampler::new(p, &mut rng);
        let n = 1_000_000u64;
        let mut prev = false;
        let mut pairs = 0u64;
        for _ in 0..n {
            let cur = f.strike(&mut rng);
            pairs += u64::from(prev && cur);
            prev = cur;
        }
        assert!(within_4_sigma(pairs, n - 1, p * p));
    }

    #[test]
    fn werner_and_validation() {
        let w = BellDistribution::werner(0.25).unwrap().weights();
        assert!(w.iter().all(|&x| (x - 0.25).abs() < 1e-15));
        assert!(BellDistribution::werner(1.2).is_err());
        assert!(NoiseModel::new(-0.1).is_err());
        assert!(BellDistribution::from_weights([0.5, 0.5, 0.1, 0.0]).is_err());
    }
}
