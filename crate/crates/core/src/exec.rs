//! Noisy replay of scheduled circuits on a Pauli frame.

use rand::Rng;

use crate::circuit::Circuit;
use crate::noise::{FaultSampler, MeasurementNoise, NoiseModel, RngStream, TrialRng};
use crate::pauli::{Gate, Pauli, PauliString};

/// Everything random that one trial consumes.
#[derive(Debug, Clone)]
pub struct TrialNoise {
    rng: TrialRng,
    faults: FaultSampler,
    measurement: MeasurementNoise,
}

impl TrialNoise {
    pub fn new(noise: &NoiseModel, stream: RngStream) -> Self {
        let mut rng = stream.rng();
        let faults = FaultSampler::new(noise.p(), &mut rng);
        TrialNoise {
            rng,
            faults,
            measurement: noise.measurement(),
        }
    }

    pub fn rng(&mut self) -> &mut TrialRng {
        &mut self.rng
    }

    #[inline]
    pub fn one_qubit(&mut self) -> Pauli {
        self.faults.next_1q(&mut self.rng)
    }

    #[inline]
    pub fn two_qubit(&mut self) -> (Pauli, Pauli) {
        self.faults.next_2q(&mut self.rng)
    }

    /// Readout of qubit `q` in the Z basis; true means the ideal outcome flipped.
    #[inline]
    pub fn measure(&mut self, frame: &mut PauliString, q: usize) -> bool {
        match self.measurement {
            MeasurementNoise::Pauli => {
                let e = self.one_qubit();
                frame.mul_at(q, e);
                frame.get(q).x_bit()
            }
            MeasurementNoise::Flip => {
                let flip = self.faults.strike(&mut self.rng);
                frame.get(q).x_bit() ^ flip
            }
        }
    }

    /// Uniform draw in [0, 1) from the trial stream.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random()
    }
}

/// Replays `circuit` on `frame` with its wire 0 mapped to `offset`.
///
/// Each gate conjugates the frame and then injects its fault; idle wires of a
/// timestep get one single-qubit draw. Measurement flips are written into
/// `record` as X entries at the measured positions.
pub fn run_noisy(
    circuit: &Circuit,
    offset: usize,
    frame: &mut PauliString,
    noise: &mut TrialNoise,
    record: &mut PauliString,
) {
    debug_assert!(offset + circuit.register_size() <= frame.len());
    for layer in circuit.layers() {
        for g in &layer.gates {
            let g = g.shifted(offset);
            frame.apply_gate(&g);
            match g {
                Gate::H(q) | Gate::Idle(q) => {
                    let e = noise.one_qubit();
                    frame.mul_at(q, e);
                }
                Gate::PrepZ(q) => {
                    frame.set(q, Pauli::I);
                    let e = noise.one_qubit();
                    frame.mul_at(q, e);
                }
                Gate::Cnot { control, target } => {
                    let (a, b) = noise.two_qubit();
                    frame.mul_at(control, a);
                    frame.mul_at(target, b);
                }
                Gate::MeasZ(q) => {
                    if noise.measure(frame, q) {
                        record.mul_at(q, Pauli::X);
                    }
                }
            }
        }
        for &q in &layer.idle {
            let e = noise.one_qubit();
            frame.mul_at(q + offset, e);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::schedule;

    #[test]
    fn noiseless_run_equals_ideal_propagation() {
        let c = schedule(vec![Gate::H(0), Gate::cnot(0, 1), Gate::cnot(1, 2), Gate::H(2)], 3).unwrap();
        let mut noise = TrialNoise::new(&NoiseModel::noiseless(), RngStream::new(0, 0));
        let start: PauliString = "XIZ".parse().unwrap();
        let mut frame = start.clone();
        let mut record = PauliString::identity(3);
        run_noisy(&c, 0, &mut frame, &mut noise, &mut record);
        assert_eq!(frame, c.propagate(&start));
        assert!(record.is_identity());
    }

    #[test]
    fn offset_and_measurement_record() {
        let c = schedule(vec![Gate::cnot(0, 1), Gate::MeasZ(1)], 2).unwrap();
        let mut noise = TrialNoise::new(&NoiseModel::noiseless(), RngStream::new(0, 0));
        let mut frame: PauliString = "IIXI".parse().unwrap();
        let mut record = PauliString::identity(4);
        run_noisy(&c, 2, &mut frame, &mut noise, &mut record);
        assert_eq!(frame.to_string(), "IIXX");
        assert_eq!(record.to_string(), "IIIX");
    }

    #[test]
    fn every_location_faults_at_p_one() {
        let c = schedule(vec![Gate::H(0), Gate::cnot(1, 2)], 4).unwrap();
        let mut noise = TrialNoise::new(&NoiseModel::new(1.0).unwrap(), RngStream::new(3, 1));
        let mut frame = PauliString::identity(4);
        let mut record = PauliString::identity(4);
        run_noisy(&c, 0, &mut frame, &mut noise, &mut record);
        assert!(!frame.get(0).is_identity());
        assert!(!frame.get(3).is_identity());
        assert!(!(frame.get(1).is_identity() && frame.get(2).is_identity()));
    }
}
