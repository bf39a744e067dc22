use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error: {0}")]
pub struct ParseError(String);

impl ParseError {
    pub fn new(msg: impl Into<String>) -> Self {
        ParseError(msg.into())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CircuitError {
    #[error("gate `{gate}` touches qubit {qubit} outside a register of {register_size}")]
    OperandOutOfRange {
        gate: String,
        qubit: usize,
        register_size: usize,
    },
    #[error("qubit budget {budget} is smaller than the register ({register_size} qubits)")]
    BudgetTooSmall { budget: usize, register_size: usize },
}

/// Reasons an encoder fails to define a usable `[[n,1,3]]` code.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CodeError {
    #[error("input wire {input} outside a {n}-qubit encoder")]
    InputOutOfRange { input: usize, n: usize },
    #[error("{0}-qubit encoders are not supported (at most 64)")]
    TooLarge(usize),
    #[error("encoder contains {0}, which is not a unitary Clifford gate")]
    NonUnitaryGate(String),
    #[error("derived generators are not independent (rank {rank}, expected {expected})")]
    Dependent { rank: usize, expected: usize },
    #[error("derived stabilizer group is not CSS-separable")]
    NotCss,
    #[error("{0} has weight {1} and acts as a nontrivial logical operator")]
    LowWeightLogical(String, usize),
    #[error("derived operators fail to commute: {0}")]
    Commutation(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("error probability {0} is outside [0, 1]")]
    Probability(f64),
    #[error("fidelity {0} is outside [0, 1]")]
    Fidelity(f64),
    #[error("trial count must be at least 1")]
    NoTrials,
    #[error("rounds {0} exceeds the supported maximum of {1}")]
    TooManyRounds(usize, usize),
    #[error("the baseline scheme needs physical qubits on both halves")]
    BaselineNeedsPhysical,
    #[error("{0}")]
    Circuit(#[from] CircuitError),
    #[error("{0}")]
    Other(String),
}
