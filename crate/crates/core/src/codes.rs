//! Encoder circuits, stabilizer groups derived from them, and lookup decoders.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::circuit::{schedule, Circuit};
use crate::error::{CodeError, ParseError};
use crate::pauli::{Gate, Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CodeKind {
    Steane7,
    Surface3,
    Physical,
}

impl CodeKind {
    pub const ALL: [CodeKind; 3] = [CodeKind::Steane7, CodeKind::Surface3, CodeKind::Physical];

    pub fn name(self) -> &'static str {
        match self {
            CodeKind::Steane7 => "steane7",
            CodeKind::Surface3 => "surface3",
            CodeKind::Physical => "physical",
        }
    }
}

impl fmt::Display for CodeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CodeKind {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "steane7" | "steane" => Ok(CodeKind::Steane7),
            "surface3" | "surface" => Ok(CodeKind::Surface3),
            "physical" | "none" => Ok(CodeKind::Physical),
            other => Err(ParseError::new(format!(
                "unknown code `{other}` (expected steane7, surface3 or physical)"
            ))),
        }
    }
}

/// Generator syndrome: bit `i` is the outcome of generator `i`, X-type first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Syndrome {
    bits: u64,
    len: usize,
}

impl Syndrome {
    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn get(&self, i: usize) -> bool {
        (self.bits >> i) & 1 == 1
    }
}

/// Minimum-weight correction for each syndrome value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecoderTable {
    corrections: Vec<PauliString>,
}

impl DecoderTable {
    pub fn correction(&self, s: Syndrome) -> &PauliString {
        &self.corrections[s.bits as usize]
    }

    pub fn len(&self) -> usize {
        self.corrections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.corrections.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &PauliString> {
        self.corrections.iter()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StabilizerCode {
    kind: CodeKind,
    n: usize,
    encoder: Circuit,
    input: usize,
    x_generators: Vec<PauliString>,
    z_generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
    decoder: DecoderTable,
}

impl StabilizerCode {
    pub fn kind(&self) -> CodeKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn encoder(&self) -> &Circuit {
        &self.encoder
    }

    /// Encoder wire that carries the state being encoded.
    pub fn input_wire(&self) -> usize {
        self.input
    }

    pub fn x_generators(&self) -> &[PauliString] {
        &self.x_generators
    }

    pub fn z_generators(&self) -> &[PauliString] {
        &self.z_generators
    }

    pub fn generators(&self) -> impl Iterator<Item = &PauliString> {
        self.x_generators.iter().chain(&self.z_generators)
    }

    pub fn num_generators(&self) -> usize {
        self.x_generators.len() + self.z_generators.len()
    }

    pub fn logical_x(&self) -> &PauliString {
        &self.logical_x
    }

    pub fn logical_z(&self) -> &PauliString {
        &self.logical_z
    }

    pub fn decoder(&self) -> &DecoderTable {
        &self.decoder
    }

    pub fn syndrome(&self, e: &PauliString) -> Syndrome {
        assert_eq!(e.len(), self.n, "error defined on the wrong block size");
        let mut bits = 0u64;
        for (i, g) in self.generators().enumerate() {
            bits |= u64::from(g.anticommutes(e)) << i;
        }
        Syndrome { bits, len: self.num_generators() }
    }

    pub fn correction(&self, s: Syndrome) -> &PauliString {
        self.decoder.correction(s)
    }

    /// `e` followed by the lookup correction for its syndrome.
    pub fn correct(&self, e: &PauliString) -> PauliString {
        e.compose(self.correction(self.syndrome(e)))
    }

    /// Logical action of a syndrome-free error. Panics if the syndrome is nonzero.
    pub fn logical_class(&self, e: &PauliString) -> Pauli {
        assert!(
            self.syndrome(e).is_zero(),
            "logical_class needs a syndrome-free error, got {e}"
        );
        Pauli::from_bits(
            e.anticommutes(&self.logical_z),
            e.anticommutes(&self.logical_x),
        )
    }

    /// Generators whose outcome can be read off a transversal Z measurement.
    pub fn z_type_generators(&self) -> impl Iterator<Item = &PauliString> {
        self.generators().filter(|g| g.is_z_type())
    }

    /// Plain-text listing of generators and logicals.
    pub fn describe(&self) -> String {
        let mut out = format!("code {} n={} input={}\n", self.kind, self.n, self.input);
        for g in &self.x_generators {
            out.push_str(&format!("SX {g}\n"));
        }
        for g in &self.z_generators {
            out.push_str(&format!("SZ {g}\n"));
        }
        out.push_str(&format!("LX {}\nLZ {}\n", self.logical_x, self.logical_z));
        out
    }
}

/// Non-fault-tolerant Steane encoder, input on wire 3 (0-based).
pub fn build_steane_encoder() -> Circuit {
    let c = Gate::cnot;
    let gates = vec![
        c(3, 1),
        Gate::H(4),
        Gate::H(5),
        Gate::H(6),
        c(3, 2),
        c(4, 0),
        c(4, 2),
        c(4, 3),
        c(5, 0),
        c(5, 1),
        c(5, 3),
        c(6, 0),
        c(6, 1),
        c(6, 2),
    ];
    schedule(gates, 7).expect("static circuit")
}

pub const STEANE_INPUT: usize = 3;
pub const SURFACE3_INPUT: usize = 6;

/// Distance-3 planar code encoder on 13 wires, input on wire 6 (0-based).
///
/// Six X-check pivots are put in |+⟩, logical X is spread from the input,
/// and each pivot then fans out to the rest of its check.
pub fn build_surface3_encoder() -> Circuit {
    let c = Gate::cnot;
    let mut gates: Vec<Gate> = [0, 1, 5, 7, 11, 12].into_iter().map(Gate::H).collect();
    gates.extend([
        c(6, 4),
        c(6, 9),
        c(0, 4),
        c(0, 2),
        c(1, 4),
        c(1, 3),
        c(5, 6),
        c(5, 2),
        c(5, 10),
        c(7, 6),
        c(7, 3),
        c(7, 8),
        c(11, 9),
        c(11, 10),
        c(12, 9),
        c(12, 8),
    ]);
    schedule(gates, 13).expect("static circuit")
}

/// A 13-wire variant with the same gate counts whose X checks miss wires 3
/// and 10. It does not encode a distance-3 code; [`derive_code`] rejects it.
pub fn surface3_encoder_unrepaired() -> Circuit {
    let c = Gate::cnot;
    let gates = vec![
        Gate::H(0),
        Gate::H(1),
        c(6, 4),
        Gate::H(7),
        Gate::H(11),
        Gate::H(12),
        Gate::H(5),
        c(6, 9),
        c(4, 3),
        c(7, 6),
        c(5, 6),
        c(9, 10),
        c(11, 7),
        c(1, 5),
        c(7, 8),
        c(3, 8),
        c(12, 11),
        c(5, 2),
        c(12, 9),
        c(0, 1),
        c(10, 2),
        c(0, 4),
    ];
    schedule(gates, 13).expect("static circuit")
}

/// Derives stabilizers and logicals by pushing the initial ones through `encoder`.
///
/// Ancillas start in |0⟩ (stabilized by Z), the input wire carries the
/// logical. The result must be a CSS `[[n,1,3]]` code.
pub fn derive_code(kind: CodeKind, encoder: Circuit, input: usize) -> Result<StabilizerCode, CodeError> {
    let n = encoder.register_size();
    if input >= n {
        return Err(CodeError::InputOutOfRange { input, n });
    }
    if n > 64 {
        return Err(CodeError::TooLarge(n));
    }
    if let Some(g) = encoder
        .gates()
        .iter()
        .find(|g| matches!(g, Gate::PrepZ(_) | Gate::MeasZ(_)))
    {
        return Err(CodeError::NonUnitaryGate(g.to_string()));
    }

    let stabilizers: Vec<PauliString> = (0..n)
        .filter(|&q| q != input)
        .map(|q| encoder.propagate(&PauliString::single(n, q, Pauli::Z)))
        .collect();
    let logical_x = encoder.propagate(&PauliString::single(n, input, Pauli::X));
    let logical_z = encoder.propagate(&PauliString::single(n, input, Pauli::Z));

    let rank = gf2_rank(stabilizers.iter().map(symplectic).collect());
    if rank != n - 1 {
        return Err(CodeError::Dependent { rank, expected: n - 1 });
    }
    let (x_generators, z_generators) = css_split(&stabilizers).ok_or(CodeError::NotCss)?;

    let code = assemble(kind, encoder, input, x_generators, z_generators, logical_x, logical_z);
    check_commutation(&code)?;
    check_distance_3(&code)?;
    Ok(code)
}

fn assemble(
    kind: CodeKind,
    encoder: Circuit,
    input: usize,
    x_generators: Vec<PauliString>,
    z_generators: Vec<PauliString>,
    logical_x: PauliString,
    logical_z: PauliString,
) -> StabilizerCode {
    let mut code = StabilizerCode {
        kind,
        n: encoder.register_size(),
        encoder,
        input,
        x_generators,
        z_generators,
        logical_x,
        logical_z,
        decoder: DecoderTable { corrections: Vec::new() },
    };
    code.decoder = build_decoder(&code);
    code
}

fn check_commutation(code: &StabilizerCode) -> Result<(), CodeError> {
    let gens: Vec<&PauliString> = code.generators().collect();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i + 1..] {
            if a.anticommutes(b) {
                return Err(CodeError::Commutation(format!("{a} and {b}")));
            }
        }
        for l in [&code.logical_x, &code.logical_z] {
            if a.anticommutes(l) {
                return Err(CodeError::Commutation(format!("{a} and logical {l}")));
            }
        }
    }
    if !code.logical_x.anticommutes(&code.logical_z) {
        return Err(CodeError::Commutation("logical X and Z commute".into()));
    }
    Ok(())
}

/// Every error of weight 1 or 2 either triggers a syndrome or is a stabilizer.
fn check_distance_3(code: &StabilizerCode) -> Result<(), CodeError> {
    let mut e = PauliString::identity(code.n);
    for w in 1..=2 {
        let mut found = None;
        visit_weight(w, 0, &mut e, &mut |e| {
            if is_nontrivial_logical(code, e) {
                found = Some(e.to_string());
            }
            found.is_some()
        });
        if let Some(s) = found {
            return Err(CodeError::LowWeightLogical(s, w));
        }
    }
    Ok(())
}

fn is_nontrivial_logical(code: &StabilizerCode, e: &PauliString) -> bool {
    code.syndrome(e).is_zero()
        && (e.anticommutes(&code.logical_x) || e.anticommutes(&code.logical_z))
}

/// Binary symplectic row: X bits in the low half, Z bits in the high half.
fn symplectic(s: &PauliString) -> u128 {
    let x = u128::from(s.x_words().first().copied().unwrap_or(0));
    let z = u128::from(s.z_words().first().copied().unwrap_or(0));
    x | (z << 64)
}

fn gf2_rank(mut rows: Vec<u128>) -> usize {
    let mut rank = 0;
    for bit in 0..128 {
        let m = 1u128 << bit;
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] & m != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank && rows[i] & m != 0 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rank
}

/// Basis of the subgroup whose rows vanish on the `kill` half.
fn pure_subgroup(rows: &[u128], kill: u128) -> Vec<u128> {
    let mut rows = rows.to_vec();
    let mut rank = 0;
    for bit in 0..128 {
        let m = 1u128 << bit;
        if kill & m == 0 {
            continue;
        }
        let Some(pivot) = (rank..rows.len()).find(|&i| rows[i] & m != 0) else {
            continue;
        };
        rows.swap(rank, pivot);
        for i in 0..rows.len() {
            if i != rank && rows[i] & m != 0 {
                rows[i] ^= rows[rank];
            }
        }
        rank += 1;
    }
    rows.split_off(rank).into_iter().filter(|&r| r != 0).collect()
}

/// Splits a stabilizer group into pure-X and pure-Z generators, or `None` if
/// the group is not CSS. Already-pure generator lists keep their order.
fn css_split(stabilizers: &[PauliString]) -> Option<(Vec<PauliString>, Vec<PauliString>)> {
    if stabilizers.iter().all(|s| s.is_x_type() || s.is_z_type()) {
        let (x, z) = stabilizers.iter().cloned().partition(|s| s.is_x_type());
        return Some((x, z));
    }
    let n = stabilizers[0].len();
    let rows: Vec<u128> = stabilizers.iter().map(symplectic).collect();
    let low = (1u128 << 64) - 1;
    let x_rows = pure_subgroup(&rows, low << 64);
    let z_rows = pure_subgroup(&rows, low);
    if x_rows.len() + z_rows.len() != stabilizers.len() {
        return None;
    }
    let unpack = |r: u128| {
        let mut s = PauliString::identity(n);
        for q in 0..n {
            let x = (r >> q) & 1 == 1;
            let z = (r >> (64 + q)) & 1 == 1;
            s.set(q, Pauli::from_bits(x, z));
        }
        s
    };
    Some((
        x_rows.into_iter().map(unpack).collect(),
        z_rows.into_iter().map(unpack).collect(),
    ))
}

/// Minimum-weight lookup table over every syndrome value.
///
/// Candidates are visited by weight, then as sequences of (qubit, Pauli)
/// pairs in lexicographic order with qubits ascending and X < Y < Z. The
/// first candidate reaching a syndrome wins.
pub fn build_decoder(code: &StabilizerCode) -> DecoderTable {
    let n = code.n;
    let size = 1usize << code.num_generators();
    let mut table: Vec<Option<PauliString>> = vec![None; size];
    let mut filled = 0;
    let mut e = PauliString::identity(n);
    for w in 0..=n {
        let done = visit_weight(w, 0, &mut e, &mut |e| {
            let s = code.syndrome(e).bits as usize;
            if table[s].is_none() {
                table[s] = Some(e.clone());
                filled += 1;
            }
            filled == size
        });
        if done {
            break;
        }
    }
    DecoderTable {
        corrections: table
            .into_iter()
            .map(|c| c.expect("every syndrome is reachable by some Pauli"))
            .collect(),
    }
}

/// Calls `f` on every weight-`w` string supported on `start..`, stopping early
/// when `f` returns true.
fn visit_weight(
    w: usize,
    start: usize,
    e: &mut PauliString,
    f: &mut impl FnMut(&PauliString) -> bool,
) -> bool {
    if w == 0 {
        return f(e);
    }
    let n = e.len();
    if start + w > n {
        return false;
    }
    for q in start..=n - w {
        for p in Pauli::NON_IDENTITY {
            e.set(q, p);
            if visit_weight(w - 1, q + 1, e, f) {
                e.set(q, Pauli::I);
                return true;
            }
        }
        e.set(q, Pauli::I);
    }
    false
}

/// The code with every generator and logical conjugated by `gates`, decoder rebuilt.
///
/// If the conjugated X-type and Z-type lists trade places (transversal H on a
/// CSS code) they are swapped back so `x_generators` stays X-type.
pub fn conjugate_code_through(code: &StabilizerCode, gates: &[Gate]) -> StabilizerCode {
    let conj = |s: &PauliString| {
        let mut out = s.clone();
        for g in gates {
            out.apply_gate(g);
        }
        out
    };
    let mut xg: Vec<PauliString> = code.x_generators.iter().map(conj).collect();
    let mut zg: Vec<PauliString> = code.z_generators.iter().map(conj).collect();
    let swapped = xg.iter().all(PauliString::is_z_type) && zg.iter().all(PauliString::is_x_type);
    if swapped && !(xg.is_empty() && zg.is_empty()) {
        std::mem::swap(&mut xg, &mut zg);
    }
    assemble(
        code.kind,
        code.encoder.clone(),
        code.input,
        xg,
        zg,
        conj(&code.logical_x),
        conj(&code.logical_z),
    )
}

pub fn transversal_h(n: usize) -> Vec<Gate> {
    (0..n).map(Gate::H).collect()
}

/// A code in its reference frame and after one transversal Hadamard layer.
#[derive(Debug, Clone)]
pub struct CodeFamily {
    pub base: StabilizerCode,
    pub dual: StabilizerCode,
}

impl CodeFamily {
    pub fn new(base: StabilizerCode) -> Self {
        let dual = conjugate_code_through(&base, &transversal_h(base.n()));
        CodeFamily { base, dual }
    }

    pub fn kind(&self) -> CodeKind {
        self.base.kind
    }

    pub fn n(&self) -> usize {
        self.base.n
    }

    /// The binding after an even (`false`) or odd (`true`) number of H layers.
    pub fn code(&self, conjugated: bool) -> &StabilizerCode {
        if conjugated {
            &self.dual
        } else {
            &self.base
        }
    }

    /// Shared, lazily built family for a named code.
    pub fn get(kind: CodeKind) -> &'static CodeFamily {
        static STEANE: OnceLock<CodeFamily> = OnceLock::new();
        static SURFACE: OnceLock<CodeFamily> = OnceLock::new();
        static PHYSICAL: OnceLock<CodeFamily> = OnceLock::new();
        let cell = match kind {
            CodeKind::Steane7 => &STEANE,
            CodeKind::Surface3 => &SURFACE,
            CodeKind::Physical => &PHYSICAL,
        };
        cell.get_or_init(|| CodeFamily::new(build_code(kind)))
    }
}

pub fn build_code(kind: CodeKind) -> StabilizerCode {
    match kind {
        CodeKind::Steane7 => derive_code(kind, build_steane_encoder(), STEANE_INPUT)
            .expect("Steane encoder is valid"),
        CodeKind::Surface3 => derive_code(kind, build_surface3_encoder(), SURFACE3_INPUT)
            .expect("surface encoder is valid"),
        CodeKind::Physical => physical_code(),
    }
}

/// One bare qubit: no generators, logicals X and Z.
pub fn physical_code() -> StabilizerCode {
    assemble(
        CodeKind::Physical,
        Circuit::empty(1),
        0,
        Vec::new(),
        Vec::new(),
        PauliString::single(1, 0, Pauli::X),
        PauliString::single(1, 0, Pauli::Z),
    )
}
