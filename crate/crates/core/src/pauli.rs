//! Phaseless Pauli algebra over bit-packed registers.
//!
//! A [`PauliString`] stores one X bit and one Z bit per qubit. Phases are
//! never tracked: every circuit here is Clifford and every fault is Pauli,
//! so the frame's class is all that matters.

use std::fmt;
use std::ops::Mul;
use std::str::FromStr;

use smallvec::SmallVec;

use crate::error::ParseError;

/// Single-qubit Pauli operator, phase dropped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub enum Pauli {
    #[default]
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub const ALL: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    pub const NON_IDENTITY: [Pauli; 3] = [Pauli::X, Pauli::Y, Pauli::Z];

    pub const fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Index in the order I, X, Y, Z.
    pub const fn from_index(i: u8) -> Self {
        match i & 3 {
            0 => Pauli::I,
            1 => Pauli::X,
            2 => Pauli::Y,
            _ => Pauli::Z,
        }
    }

    /// True for X and Y.
    pub const fn x_bit(self) -> bool {
        matches!(self, Pauli::X | Pauli::Y)
    }

    /// True for Z and Y.
    pub const fn z_bit(self) -> bool {
        matches!(self, Pauli::Z | Pauli::Y)
    }

    pub const fn is_identity(self) -> bool {
        matches!(self, Pauli::I)
    }

    pub const fn mul(self, other: Pauli) -> Pauli {
        Pauli::from_bits(self.x_bit() ^ other.x_bit(), self.z_bit() ^ other.z_bit())
    }

    pub const fn anticommutes(self, other: Pauli) -> bool {
        (self.x_bit() & other.z_bit()) ^ (self.z_bit() & other.x_bit())
    }

    /// Image under Hadamard conjugation.
    pub const fn hadamard(self) -> Pauli {
        Pauli::from_bits(self.z_bit(), self.x_bit())
    }

    pub const fn symbol(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

impl Mul for Pauli {
    type Output = Pauli;
    fn mul(self, rhs: Pauli) -> Pauli {
        Pauli::mul(self, rhs)
    }
}

impl fmt::Display for Pauli {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

/// Gate set for every circuit in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Gate {
    H(usize),
    Cnot { control: usize, target: usize },
    Idle(usize),
    PrepZ(usize),
    MeasZ(usize),
}

impl Gate {
    /// Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT operands must be distinct");
        Gate::Cnot { control, target }
    }

    pub fn qubits(&self) -> SmallVec<[usize; 2]> {
        match *self {
            Gate::Cnot { control, target } => SmallVec::from_buf([control, target]),
            Gate::H(q) | Gate::Idle(q) | Gate::PrepZ(q) | Gate::MeasZ(q) => {
                let mut v = SmallVec::new();
                v.push(q);
                v
            }
        }
    }

    pub fn is_two_qubit(&self) -> bool {
        matches!(self, Gate::Cnot { .. })
    }

    /// Same gate with every operand shifted by `offset`.
    pub fn shifted(&self, offset: usize) -> Gate {
        match *self {
            Gate::H(q) => Gate::H(q + offset),
            Gate::Cnot { control, target } => Gate::Cnot {
                control: control + offset,
                target: target + offset,
            },
            Gate::Idle(q) => Gate::Idle(q + offset),
            Gate::PrepZ(q) => Gate::PrepZ(q + offset),
            Gate::MeasZ(q) => Gate::MeasZ(q + offset),
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Gate::H(q) => write!(f, "H {q}"),
            Gate::Cnot { control, target } => write!(f, "CNOT {control} {target}"),
            Gate::Idle(q) => write!(f, "IDLE {q}"),
            Gate::PrepZ(q) => write!(f, "PREPZ {q}"),
            Gate::MeasZ(q) => write!(f, "MEASZ {q}"),
        }
    }
}

impl FromStr for Gate {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut parts = s.split_whitespace();
        let name = parts.next().ok_or_else(|| ParseError::new("empty gate line"))?;
        let mut operand = || -> Result<usize, ParseError> {
            parts
                .next()
                .ok_or_else(|| ParseError::new(format!("missing operand in `{s}`")))?
                .parse()
                .map_err(|_| ParseError::new(format!("bad operand in `{s}`")))
        };
        let gate = match name.to_ascii_uppercase().as_str() {
            "H" => Gate::H(operand()?),
            "CNOT" | "CX" => {
                let (c, t) = (operand()?, operand()?);
                if c == t {
                    return Err(ParseError::new(format!("CNOT operands coincide in `{s}`")));
                }
                Gate::Cnot { control: c, target: t }
            }
            "IDLE" => Gate::Idle(operand()?),
            "PREPZ" => Gate::PrepZ(operand()?),
            "MEASZ" => Gate::MeasZ(operand()?),
            other => return Err(ParseError::new(format!("unknown gate `{other}`"))),
        };
        Ok(gate)
    }
}

type Words = SmallVec<[u64; 1]>;

fn word_count(n: usize) -> usize {
    n.div_ceil(64)
}

fn low_mask(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

/// Pauli operator on a register of `len` qubits.
///
/// Registers of up to 64 qubits stay inline; the largest joint register
/// built by the protocols is 52 qubits.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    len: usize,
    x: Words,
    z: Words,
}

impl PauliString {
    pub fn identity(len: usize) -> Self {
        let w = word_count(len);
        PauliString {
            len,
            x: SmallVec::from_elem(0, w),
            z: SmallVec::from_elem(0, w),
        }
    }

    pub fn single(len: usize, qubit: usize, p: Pauli) -> Self {
        let mut s = Self::identity(len);
        s.set(qubit, p);
        s
    }

    pub fn from_paulis(ps: &[Pauli]) -> Self {
        let mut s = Self::identity(ps.len());
        for (q, &p) in ps.iter().enumerate() {
            s.set(q, p);
        }
        s
    }

    /// Same Pauli on every listed qubit.
    pub fn on_support(len: usize, support: &[usize], p: Pauli) -> Self {
        let mut s = Self::identity(len);
        for &q in support {
            s.set(q, p);
        }
        s
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, q: usize) -> Pauli {
        debug_assert!(q < self.len);
        let (w, b) = (q / 64, q % 64);
        Pauli::from_bits((self.x[w] >> b) & 1 == 1, (self.z[w] >> b) & 1 == 1)
    }

    #[inline]
    pub fn set(&mut self, q: usize, p: Pauli) {
        assert!(q < self.len, "qubit {q} outside register of {}", self.len);
        let (w, b) = (q / 64, q % 64);
        let m = 1u64 << b;
        self.x[w] = (self.x[w] & !m) | (u64::from(p.x_bit()) << b);
        self.z[w] = (self.z[w] & !m) | (u64::from(p.z_bit()) << b);
    }

    /// Multiplies `p` into position `q`.
    #[inline]
    pub fn mul_at(&mut self, q: usize, p: Pauli) {
        debug_assert!(q < self.len);
        let (w, b) = (q / 64, q % 64);
        self.x[w] ^= u64::from(p.x_bit()) << b;
        self.z[w] ^= u64::from(p.z_bit()) << b;
    }

    pub fn weight(&self) -> usize {
        self.x
            .iter()
            .zip(&self.z)
            .map(|(x, z)| (x | z).count_ones() as usize)
            .sum()
    }

    pub fn is_identity(&self) -> bool {
        self.x.iter().chain(&self.z).all(|&w| w == 0)
    }

    /// No Z components anywhere.
    pub fn is_x_type(&self) -> bool {
        self.z.iter().all(|&w| w == 0)
    }

    /// No X components anywhere.
    pub fn is_z_type(&self) -> bool {
        self.x.iter().all(|&w| w == 0)
    }

    pub fn x_words(&self) -> &[u64] {
        &self.x
    }

    pub fn z_words(&self) -> &[u64] {
        &self.z
    }

    /// Qubits carrying a non-identity entry, ascending.
    pub fn support(&self) -> Vec<usize> {
        (0..self.len).filter(|&q| !self.get(q).is_identity()).collect()
    }

    pub fn iter(&self) -> impl Iterator<Item = Pauli> + '_ {
        (0..self.len).map(|q| self.get(q))
    }

    /// Panics on register size mismatch.
    pub fn anticommutes(&self, other: &PauliString) -> bool {
        assert_eq!(self.len, other.len, "register size mismatch");
        let mut acc = 0u64;
        for i in 0..self.x.len() {
            acc ^= (self.x[i] & other.z[i]) ^ (self.z[i] & other.x[i]);
        }
        acc.count_ones() & 1 == 1
    }

    /// Pointwise phaseless product. Panics on register size mismatch.
    pub fn compose(&self, other: &PauliString) -> PauliString {
        let mut out = self.clone();
        out.compose_assign(other);
        out
    }

    pub fn compose_assign(&mut self, other: &PauliString) {
        assert_eq!(self.len, other.len, "register size mismatch");
        for i in 0..self.x.len() {
            self.x[i] ^= other.x[i];
            self.z[i] ^= other.z[i];
        }
    }

    /// Conjugates in place by `gate`; IDLE, PREPZ and MEASZ leave the string alone.
    #[inline]
    pub fn apply_gate(&mut self, gate: &Gate) {
        match *gate {
            Gate::H(q) => {
                debug_assert!(q < self.len);
                let (w, b) = (q / 64, q % 64);
                let diff = ((self.x[w] ^ self.z[w]) >> b) & 1;
                self.x[w] ^= diff << b;
                self.z[w] ^= diff << b;
            }
            Gate::Cnot { control, target } => {
                debug_assert!(control < self.len && target < self.len);
                let xc = (self.x[control / 64] >> (control % 64)) & 1;
                let zt = (self.z[target / 64] >> (target % 64)) & 1;
                self.x[target / 64] ^= xc << (target % 64);
                self.z[control / 64] ^= zt << (control % 64);
            }
            Gate::Idle(_) | Gate::PrepZ(_) | Gate::MeasZ(_) => {}
        }
    }

    /// Copy of the qubits `start..start + len` as a fresh register.
    pub fn slice(&self, start: usize, len: usize) -> PauliString {
        assert!(start + len <= self.len, "slice outside register");
        let mut out = PauliString::identity(len);
        if self.len <= 64 && len > 0 {
            out.x[0] = (self.x[0] >> start) & low_mask(len);
            out.z[0] = (self.z[0] >> start) & low_mask(len);
            return out;
        }
        for q in 0..len {
            out.set(q, self.get(start + q));
        }
        out
    }

    /// Register `self ++ other`.
    pub fn concat(&self, other: &PauliString) -> PauliString {
        let mut out = PauliString::identity(self.len + other.len);
        out.overwrite(0, self);
        out.overwrite(self.len, other);
        out
    }

    /// Writes `block` over qubits `offset..offset + block.len()`.
    pub fn overwrite(&mut self, offset: usize, block: &PauliString) {
        assert!(offset + block.len <= self.len, "block outside register");
        if block.len == 0 {
            return;
        }
        if self.len <= 64 {
            let mask = low_mask(block.len) << offset;
            self.x[0] = (self.x[0] & !mask) | (block.x[0] << offset);
            self.z[0] = (self.z[0] & !mask) | (block.z[0] << offset);
            return;
        }
        for q in 0..block.len {
            self.set(offset + q, block.get(q));
        }
    }

    /// Embeds `block` at `offset` in an identity register of size `len`.
    pub fn embed(len: usize, offset: usize, block: &PauliString) -> PauliString {
        let mut out = PauliString::identity(len);
        out.overwrite(offset, block);
        out
    }
}

/// `g · s · g⁻¹` up to phase.
pub fn conjugate_through(gate: &Gate, s: &PauliString) -> PauliString {
    let mut out = s.clone();
    out.apply_gate(gate);
    out
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in self.iter() {
            write!(f, "{}", p.symbol())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}

impl FromStr for PauliString {
    type Err = ParseError;

    /// Parses a dense string such as `"IXZY"`; `_` is accepted for identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let ps = s
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'I' | '_' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(ParseError::new(format!("invalid Pauli symbol `{other}`"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PauliString::from_paulis(&ps))
    }
}
