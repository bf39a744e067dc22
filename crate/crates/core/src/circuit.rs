//! Gate lists, ASAP scheduling, and resource metrics.

use serde::Serialize;

use crate::error::{CircuitError, ParseError};
use crate::pauli::{Gate, PauliString};

/// One timestep: gates with disjoint supports plus the qubits left idle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layer {
    pub gates: Vec<Gate>,
    pub idle: Vec<usize>,
}

/// A gate list together with its greedy as-soon-as-possible schedule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Circuit {
    register_size: usize,
    gates: Vec<Gate>,
    steps: Vec<usize>,
    layers: Vec<Layer>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct GateCounts {
    pub n_1q: u64,
    pub n_2q: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ResourceMetrics {
    pub depth: usize,
    pub kq: u64,
    pub n_1q: u64,
    pub n_2q: u64,
}

/// Places each gate one step after the latest step already holding any of its
/// operands. Ties are impossible, so the result depends only on input order.
pub fn schedule(gates: Vec<Gate>, register_size: usize) -> Result<Circuit, CircuitError> {
    let mut last = vec![0usize; register_size];
    let mut steps = Vec::with_capacity(gates.len());
    let mut depth = 0;
    for g in &gates {
        let qs = g.qubits();
        if let Some(&q) = qs.iter().find(|&&q| q >= register_size) {
            return Err(CircuitError::OperandOutOfRange {
                gate: g.to_string(),
                qubit: q,
                register_size,
            });
        }
        let step = qs.iter().map(|&q| last[q]).max().unwrap_or(0) + 1;
        for &q in &qs {
            last[q] = step;
        }
        depth = depth.max(step);
        steps.push(step - 1);
    }

    let mut layers: Vec<Layer> = (0..depth)
        .map(|_| Layer { gates: Vec::new(), idle: Vec::new() })
        .collect();
    let mut busy = vec![vec![false; register_size]; depth];
    for (g, &s) in gates.iter().zip(&steps) {
        layers[s].gates.push(*g);
        for q in g.qubits() {
            busy[s][q] = true;
        }
    }
    for (layer, busy) in layers.iter_mut().zip(&busy) {
        layer.idle = (0..register_size).filter(|&q| !busy[q]).collect();
    }

    Ok(Circuit { register_size, gates, steps, layers })
}

impl Circuit {
    pub fn empty(register_size: usize) -> Self {
        Circuit {
            register_size,
            gates: Vec::new(),
            steps: Vec::new(),
            layers: Vec::new(),
        }
    }

    pub fn register_size(&self) -> usize {
        self.register_size
    }

    /// Gates in their original order.
    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    /// Timestep assigned to each gate, parallel to [`Circuit::gates`].
    pub fn steps(&self) -> &[usize] {
        &self.steps
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// `qubit_budget × depth`; the budget may exceed the wires actually touched.
    pub fn kq(&self, qubit_budget: usize) -> Result<u64, CircuitError> {
        if qubit_budget < self.register_size {
            return Err(CircuitError::BudgetTooSmall {
                budget: qubit_budget,
                register_size: self.register_size,
            });
        }
        Ok((qubit_budget * self.depth()) as u64)
    }

    /// CNOTs are two-qubit; H, PREPZ and MEASZ are single-qubit; IDLE is neither.
    pub fn gate_counts(&self) -> GateCounts {
        let mut c = GateCounts::default();
        for g in &self.gates {
            match g {
                Gate::Cnot { .. } => c.n_2q += 1,
                Gate::H(_) | Gate::PrepZ(_) | Gate::MeasZ(_) => c.n_1q += 1,
                Gate::Idle(_) => {}
            }
        }
        c
    }

    pub fn metrics(&self, qubit_budget: usize) -> Result<ResourceMetrics, CircuitError> {
        let GateCounts { n_1q, n_2q } = self.gate_counts();
        Ok(ResourceMetrics {
            depth: self.depth(),
            kq: self.kq(qubit_budget)?,
            n_1q,
            n_2q,
        })
    }

    /// `self` followed by `other`, rescheduled on the larger register.
    pub fn concat(&self, other: &Circuit) -> Circuit {
        let n = self.register_size.max(other.register_size);
        let gates = self.gates.iter().chain(&other.gates).copied().collect();
        schedule(gates, n).expect("operands already validated")
    }

    /// Ideal conjugation of `s` by every gate, in list order.
    pub fn propagate(&self, s: &PauliString) -> PauliString {
        let mut out = s.clone();
        for g in &self.gates {
            out.apply_gate(g);
        }
        out
    }

    /// Ideal conjugation layer by layer, following the schedule.
    pub fn propagate_scheduled(&self, s: &PauliString) -> PauliString {
        let mut out = s.clone();
        for layer in &self.layers {
            for g in &layer.gates {
                out.apply_gate(g);
            }
        }
        out
    }

    /// One gate per line, in list order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for g in &self.gates {
            out.push_str(&g.to_string());
            out.push('\n');
        }
        out
    }

    /// Inverse of [`Circuit::to_text`]. Blank lines and `#` comments are skipped.
    /// Without an explicit size the register is the highest operand plus one.
    pub fn from_text(text: &str, register_size: Option<usize>) -> Result<Circuit, ParseError> {
        let gates = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(str::parse)
            .collect::<Result<Vec<Gate>, _>>()?;
        let inferred = gates
            .iter()
            .flat_map(|g| g.qubits())
            .max()
            .map_or(0, |q| q + 1);
        schedule(gates, register_size.unwrap_or(inferred))
            .map_err(|e| ParseError::new(e.to_string()))
    }
}
