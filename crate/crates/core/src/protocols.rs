//! Bell-pair preparation: raw pairs, encoding, purification, and the schemes
//! that combine them.

use std::fmt;
use std::ops::AddAssign;
use std::str::FromStr;

use serde::Serialize;

use crate::circuit::{schedule, Circuit};
use crate::codes::{CodeFamily, CodeKind, StabilizerCode};
use crate::error::{ConfigError, ParseError};
use crate::exec::{run_noisy, TrialNoise};
use crate::noise::{BellDistribution, NoiseModel};
use crate::pauli::{Gate, Pauli, PauliString};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    /// Unencoded pairs purified at the physical level.
    Baseline,
    /// Purify physical pairs, then encode each half.
    BeforeEncoding,
    /// Encode each half of every raw pair, then purify logically.
    AfterEncoding,
    /// As `AfterEncoding`, also discarding on any odd stabilizer parity.
    AfterEncodingStrict,
}

impl SchemeKind {
    pub const ALL: [SchemeKind; 4] = [
        SchemeKind::Baseline,
        SchemeKind::BeforeEncoding,
        SchemeKind::AfterEncoding,
        SchemeKind::AfterEncodingStrict,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Baseline => "baseline",
            SchemeKind::BeforeEncoding => "before",
            SchemeKind::AfterEncoding => "after",
            SchemeKind::AfterEncodingStrict => "strict",
        }
    }

    fn purifies_encoded(self) -> bool {
        matches!(self, SchemeKind::AfterEncoding | SchemeKind::AfterEncodingStrict)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "baseline" | "baseline-physical" => Ok(SchemeKind::Baseline),
            "before" | "before-encoding" => Ok(SchemeKind::BeforeEncoding),
            "after" | "after-encoding" => Ok(SchemeKind::AfterEncoding),
            "strict" | "after-encoding-strict" => Ok(SchemeKind::AfterEncodingStrict),
            other => Err(ParseError::new(format!(
                "unknown scheme `{other}` (expected baseline, before, after or strict)"
            ))),
        }
    }
}

/// Which stabilizer parities the strict scheme inspects on measured blocks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PostselectMode {
    /// Only generators readable from the transversal Z outcomes.
    #[default]
    BasisCompatible,
    /// Additionally every generator, evaluated on the frame itself.
    OracleAll,
}

impl FromStr for PostselectMode {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "basis-compatible" | "basis" => Ok(PostselectMode::BasisCompatible),
            "oracle-all" | "oracle" => Ok(PostselectMode::OracleAll),
            other => Err(ParseError::new(format!(
                "unknown postselect mode `{other}` (expected basis-compatible or oracle-all)"
            ))),
        }
    }
}

/// Frame in which residual X and Z errors are reported.
///
/// Every round measures in the Z basis and then applies H to the kept pair.
/// With `ZFirst` labels follow the physical frame after those H layers, so the
/// first round shows up as Z suppression. `XFirst` undoes the H layers before
/// labelling, so the first round shows up as X suppression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BasisOrder {
    #[default]
    ZFirst,
    XFirst,
}

impl FromStr for BasisOrder {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "z-first" | "z" => Ok(BasisOrder::ZFirst),
            "x-first" | "x" => Ok(BasisOrder::XFirst),
            other => Err(ParseError::new(format!(
                "unknown basis order `{other}` (expected z-first or x-first)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    A,
    B,
}

/// Resources spent on a pair, including every discarded attempt behind it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct ResourceLedger {
    pub raw_pairs: u64,
    pub kq: u64,
    pub n_1q: u64,
    pub n_2q: u64,
}

impl AddAssign<&ResourceLedger> for ResourceLedger {
    fn add_assign(&mut self, o: &ResourceLedger) {
        self.raw_pairs += o.raw_pairs;
        self.kq += o.kq;
        self.n_1q += o.n_1q;
        self.n_2q += o.n_2q;
    }
}

/// A half's code together with how many H layers it has been through, mod 2.
#[derive(Debug, Clone, Copy)]
pub struct Binding<'c> {
    pub family: &'c CodeFamily,
    pub conjugated: bool,
}

impl<'c> Binding<'c> {
    pub fn code(&self) -> &'c StabilizerCode {
        self.family.code(self.conjugated)
    }

    pub fn n(&self) -> usize {
        self.family.n()
    }

    pub fn kind(&self) -> CodeKind {
        self.family.kind()
    }

    fn same_as(&self, o: &Binding<'_>) -> bool {
        std::ptr::eq(self.family, o.family) && self.conjugated == o.conjugated
    }
}

/// One in-flight Bell pair. The frame holds half A's block then half B's.
#[derive(Debug, Clone)]
pub struct PairState<'c> {
    pub frame: PauliString,
    pub a: Binding<'c>,
    pub b: Binding<'c>,
    /// Number of transversal H layers applied, mod 2.
    pub basis_parity: bool,
    pub ledger: ResourceLedger,
}

#[derive(Debug, Clone)]
pub enum PurifyOutcome<'c> {
    Success(PairState<'c>),
    /// Logical outcomes disagreed; carries the spent resources.
    ParityFail(ResourceLedger),
    /// A stabilizer parity of a measured block was odd; carries the spent resources.
    PostselectFail(ResourceLedger),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProtocolOptions {
    pub postselect: PostselectMode,
    pub basis_order: BasisOrder,
    pub kq_budget_steane: usize,
    pub kq_budget_surface: usize,
}

impl Default for ProtocolOptions {
    fn default() -> Self {
        ProtocolOptions {
            postselect: PostselectMode::default(),
            basis_order: BasisOrder::default(),
            kq_budget_steane: 7,
            kq_budget_surface: 25,
        }
    }
}

impl ProtocolOptions {
    /// Qubits charged per timestep for a block of this code.
    pub fn budget(&self, kind: CodeKind) -> usize {
        match kind {
            CodeKind::Steane7 => self.kq_budget_steane,
            CodeKind::Surface3 => self.kq_budget_surface,
            CodeKind::Physical => 1,
        }
    }
}

/// Precomputed purification step for one pair of bindings.
#[derive(Debug, Clone)]
struct PurifyPlan {
    circuit: Circuit,
    /// Z-type logical of each measured block, embedded in the joint register.
    logical_a: PauliString,
    logical_b: PauliString,
    /// Z-type generators of both measured blocks.
    checks: Vec<PauliString>,
    /// Every generator of both measured blocks.
    oracle_checks: Vec<PauliString>,
    ledger: ResourceLedger,
}

impl PurifyPlan {
    fn new(a: Binding<'_>, b: Binding<'_>, opts: &ProtocolOptions) -> Self {
        let (na, nb) = (a.n(), b.n());
        let m = na + nb;
        let total = 2 * m;

        // Kept pair on 0..m is control, sacrificed pair on m..2m is target.
        let mut gates: Vec<Gate> = (0..m).map(|i| Gate::cnot(i, m + i)).collect();
        gates.extend((0..m).map(Gate::H));
        gates.extend((m..total).map(Gate::MeasZ));
        let circuit = schedule(gates, total).expect("operands in range");

        let z_logical = |code: &StabilizerCode| {
            [code.logical_z(), code.logical_x()]
                .into_iter()
                .find(|l| l.is_z_type())
                .expect("CSS binding has a Z-type logical")
                .clone()
        };
        let (ca, cb) = (a.code(), b.code());
        let embed = |offset: usize, s: &PauliString| PauliString::embed(total, offset, s);
        let checks = ca
            .z_type_generators()
            .map(|g| embed(m, g))
            .chain(cb.z_type_generators().map(|g| embed(m + na, g)))
            .collect();
        let oracle_checks = ca
            .generators()
            .map(|g| embed(m, g))
            .chain(cb.generators().map(|g| embed(m + na, g)))
            .collect();

        let depth = circuit.depth() as u64;
        let counts = circuit.gate_counts();
        let budget = 2 * (opts.budget(a.kind()) + opts.budget(b.kind())) as u64;
        PurifyPlan {
            logical_a: embed(m, &z_logical(ca)),
            logical_b: embed(m + na, &z_logical(cb)),
            checks,
            oracle_checks,
            ledger: ResourceLedger {
                raw_pairs: 0,
                kq: budget * depth,
                n_1q: counts.n_1q,
                n_2q: counts.n_2q,
            },
            circuit,
        }
    }
}

/// A fully configured preparation procedure, shared read-only by all trials.
#[derive(Debug, Clone)]
pub struct Protocol<'c> {
    scheme: SchemeKind,
    noise: NoiseModel,
    source: BellDistribution,
    opts: ProtocolOptions,
    code_a: &'c CodeFamily,
    code_b: &'c CodeFamily,
    physical: &'c CodeFamily,
    /// Indexed by the conjugation state of the bindings being purified.
    plans: [PurifyPlan; 2],
}

impl<'c> Protocol<'c> {
    pub fn new(
        scheme: SchemeKind,
        code_a: &'c CodeFamily,
        code_b: &'c CodeFamily,
        physical: &'c CodeFamily,
        noise: NoiseModel,
        source: BellDistribution,
        opts: ProtocolOptions,
    ) -> Result<Self, ConfigError> {
        if scheme == SchemeKind::Baseline
            && (code_a.kind() != CodeKind::Physical || code_b.kind() != CodeKind::Physical)
        {
            return Err(ConfigError::BaselineNeedsPhysical);
        }
        if physical.kind() != CodeKind::Physical {
            return Err(ConfigError::Other("physical family must be the bare-qubit code".into()));
        }
        let (pa, pb) = if scheme.purifies_encoded() {
            (code_a, code_b)
        } else {
            (physical, physical)
        };
        let plan = |conjugated| {
            PurifyPlan::new(
                Binding { family: pa, conjugated },
                Binding { family: pb, conjugated },
                &opts,
            )
        };
        Ok(Protocol {
            scheme,
            noise,
            source,
            opts,
            code_a,
            code_b,
            physical,
            plans: [plan(false), plan(true)],
        })
    }

    /// Protocol over the shared code families.
    pub fn with_kinds(
        scheme: SchemeKind,
        a: CodeKind,
        b: CodeKind,
        noise: NoiseModel,
        source: BellDistribution,
        opts: ProtocolOptions,
    ) -> Result<Protocol<'static>, ConfigError> {
        Protocol::new(
            scheme,
            CodeFamily::get(a),
            CodeFamily::get(b),
            CodeFamily::get(CodeKind::Physical),
            noise,
            source,
            opts,
        )
    }

    pub fn scheme(&self) -> SchemeKind {
        self.scheme
    }

    pub fn noise(&self) -> &NoiseModel {
        &self.noise
    }

    pub fn options(&self) -> &ProtocolOptions {
        &self.opts
    }

    /// Fresh physical pair; the whole Bell-diagonal error sits on half B.
    pub fn make_raw_pair(&self, noise: &mut TrialNoise) -> PairState<'c> {
        let e = self.source.sample(noise.rng());
        let phys = Binding { family: self.physical, conjugated: false };
        PairState {
            frame: PauliString::from_paulis(&[Pauli::I, e]),
            a: phys,
            b: phys,
            basis_parity: false,
            ledger: ResourceLedger { raw_pairs: 1, ..Default::default() },
        }
    }

    /// Encodes one physical half into `family` with a noisy encoder.
    ///
    /// The half's error moves to the encoder's input wire and is carried
    /// through the ideal gates while faults are injected at every location.
    pub fn encode_half(
        &self,
        mut pair: PairState<'c>,
        side: Side,
        family: &'c CodeFamily,
        noise: &mut TrialNoise,
    ) -> PairState<'c> {
        let (na, nb) = (pair.a.n(), pair.b.n());
        let (own, other_offset, other_len) = match side {
            Side::A => (pair.a, na, nb),
            Side::B => (pair.b, 0, na),
        };
        assert_eq!(own.kind(), CodeKind::Physical, "side is already encoded");
        if family.kind() == CodeKind::Physical {
            return pair;
        }
        let code = &family.base;
        let n = code.n();
        let own_offset = if side == Side::A { 0 } else { na };
        let carried = pair.frame.get(own_offset);

        let other = pair.frame.slice(other_offset, other_len);
        let mut frame = PauliString::identity(n + other_len);
        let block_offset = match side {
            Side::A => {
                frame.overwrite(n, &other);
                0
            }
            Side::B => {
                frame.overwrite(0, &other);
                other_len
            }
        };
        frame.set(block_offset + code.input_wire(), carried);

        let mut record = PauliString::identity(frame.len());
        run_noisy(code.encoder(), block_offset, &mut frame, noise, &mut record);

        let encoded = Binding { family, conjugated: false };
        match side {
            Side::A => pair.a = encoded,
            Side::B => pair.b = encoded,
        }
        let counts = code.encoder().gate_counts();
        pair.frame = frame;
        pair.ledger.kq += (self.opts.budget(family.kind()) * code.encoder().depth()) as u64;
        pair.ledger.n_1q += counts.n_1q;
        pair.ledger.n_2q += counts.n_2q;
        pair
    }

    /// One bilateral purification step.
    ///
    /// CNOT from each kept block onto its partner block, H on the kept blocks
    /// while the partner blocks are measured in Z. Outcomes are compared
    /// through each node's Z-type logical; under the strict scheme the Z-type
    /// generator parities of the measured blocks must also be even.
    pub fn purify_once(
        &self,
        kept: PairState<'c>,
        sacrificed: PairState<'c>,
        noise: &mut TrialNoise,
    ) -> PurifyOutcome<'c> {
        assert!(
            kept.a.same_as(&sacrificed.a)
                && kept.b.same_as(&sacrificed.b)
                && kept.basis_parity == sacrificed.basis_parity,
            "purification inputs have different code bindings"
        );
        assert_eq!(kept.a.conjugated, kept.b.conjugated, "halves out of step");
        let plan = &self.plans[usize::from(kept.a.conjugated)];
        assert!(
            std::ptr::eq(kept.a.family, self.purify_family(Side::A))
                && std::ptr::eq(kept.b.family, self.purify_family(Side::B)),
            "pair is not at this protocol's purification level"
        );

        let m = kept.frame.len();
        let mut frame = kept.frame.concat(&sacrificed.frame);
        let mut record = PauliString::identity(2 * m);
        run_noisy(&plan.circuit, 0, &mut frame, noise, &mut record);

        let mut ledger = kept.ledger;
        ledger += &sacrificed.ledger;
        ledger += &plan.ledger;

        if record.anticommutes(&plan.logical_a) != record.anticommutes(&plan.logical_b) {
            return PurifyOutcome::ParityFail(ledger);
        }
        if self.scheme == SchemeKind::AfterEncodingStrict {
            let odd = plan.checks.iter().any(|g| record.anticommutes(g))
                || (self.opts.postselect == PostselectMode::OracleAll
                    && plan.oracle_checks.iter().any(|g| frame.anticommutes(g)));
            if odd {
                return PurifyOutcome::PostselectFail(ledger);
            }
        }

        let flip = |b: Binding<'c>| Binding { conjugated: !b.conjugated, ..b };
        PurifyOutcome::Success(PairState {
            frame: frame.slice(0, m),
            a: flip(kept.a),
            b: flip(kept.b),
            basis_parity: !kept.basis_parity,
            ledger,
        })
    }

    fn purify_family(&self, side: Side) -> &'c CodeFamily {
        match (self.scheme.purifies_encoded(), side) {
            (true, Side::A) => self.code_a,
            (true, Side::B) => self.code_b,
            (false, _) => self.physical,
        }
    }

    /// Level-0 input to the purification recursion.
    fn base_pair(&self, noise: &mut TrialNoise) -> PairState<'c> {
        let pair = self.make_raw_pair(noise);
        if self.scheme.purifies_encoded() {
            let pair = self.encode_half(pair, Side::A, self.code_a, noise);
            self.encode_half(pair, Side::B, self.code_b, noise)
        } else {
            pair
        }
    }

    /// Nested symmetric purification: a level-k pair consumes two level-(k−1)
    /// pairs, and a failed attempt discards both and rebuilds them.
    fn purified(&self, level: usize, noise: &mut TrialNoise, stats: &mut AttemptStats) -> PairState<'c> {
        if level == 0 {
            return self.base_pair(noise);
        }
        let mut spent = ResourceLedger::default();
        loop {
            let kept = self.purified(level - 1, noise, stats);
            let sacrificed = self.purified(level - 1, noise, stats);
            stats.attempts[level - 1] += 1;
            match self.purify_once(kept, sacrificed, noise) {
                PurifyOutcome::Success(mut pair) => {
                    stats.successes[level - 1] += 1;
                    pair.ledger += &spent;
                    return pair;
                }
                PurifyOutcome::ParityFail(l) => {
                    stats.parity_fails[level - 1] += 1;
                    spent += &l;
                }
                PurifyOutcome::PostselectFail(l) => {
                    stats.postselect_fails[level - 1] += 1;
                    spent += &l;
                }
            }
        }
    }

    /// A finished pair after `rounds` purification rounds under this scheme.
    pub fn build_pair(&self, rounds: usize, noise: &mut TrialNoise) -> PairState<'c> {
        self.build_pair_with_stats(rounds, noise, &mut AttemptStats::default())
    }

    pub fn build_pair_with_stats(
        &self,
        rounds: usize,
        noise: &mut TrialNoise,
        stats: &mut AttemptStats,
    ) -> PairState<'c> {
        assert!(rounds <= MAX_ROUNDS, "at most {MAX_ROUNDS} rounds are supported");
        let pair = self.purified(rounds, noise, stats);
        match self.scheme {
            SchemeKind::BeforeEncoding => {
                let pair = self.encode_half(pair, Side::A, self.code_a, noise);
                self.encode_half(pair, Side::B, self.code_b, noise)
            }
            _ => pair,
        }
    }

    /// Residual (x_error, z_error) after ideal decoding of each block.
    pub fn final_evaluate(&self, pair: &PairState<'_>) -> (bool, bool) {
        final_evaluate(pair, self.opts.basis_order)
    }
}

/// Perfect syndrome extraction and correction on each block, then the parity
/// of the two halves' logical classes. X⊗X and Z⊗Z stabilize the target
/// pair, so only a mismatch between halves counts as an error.
pub fn final_evaluate(pair: &PairState<'_>, order: BasisOrder) -> (bool, bool) {
    let na = pair.a.n();
    let la = block_label(pair.a, &pair.frame.slice(0, na));
    let lb = block_label(pair.b, &pair.frame.slice(na, pair.b.n()));
    let (mut x, mut z) = (la.x_bit() ^ lb.x_bit(), la.z_bit() ^ lb.z_bit());
    if order == BasisOrder::XFirst && pair.basis_parity {
        std::mem::swap(&mut x, &mut z);
    }
    (x, z)
}

/// Logical class in the block's physical frame: the X label is set when the
/// residual anticommutes with the binding's Z-type logical.
fn block_label(binding: Binding<'_>, block: &PauliString) -> Pauli {
    let code = binding.code();
    let class = code.logical_class(&code.correct(block));
    if binding.conjugated {
        class.hadamard()
    } else {
        class
    }
}

pub const MAX_ROUNDS: usize = 12;

/// Per-level purification counts; index k is the step producing level k+1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct AttemptStats {
    pub attempts: [u64; MAX_ROUNDS],
    pub successes: [u64; MAX_ROUNDS],
    pub parity_fails: [u64; MAX_ROUNDS],
    pub postselect_fails: [u64; MAX_ROUNDS],
}

impl AddAssign<&AttemptStats> for AttemptStats {
    fn add_assign(&mut self, o: &AttemptStats) {
        for i in 0..MAX_ROUNDS {
            self.attempts[i] += o.attempts[i];
            self.successes[i] += o.successes[i];
            self.parity_fails[i] += o.parity_fails[i];
            self.postselect_fails[i] += o.postselect_fails[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::noise::RngStream;

    fn protocol(scheme: SchemeKind, a: CodeKind, b: CodeKind, p: f64, src: BellDistribution) -> Protocol<'static> {
        Protocol::with_kinds(scheme, a, b, NoiseModel::new(p).unwrap(), src, ProtocolOptions::default()).unwrap()
    }

    fn quiet(seed: u64) -> TrialNoise {
        TrialNoise::new(&NoiseModel::noiseless(), RngStream::new(seed, 0))
    }

    fn pair_with(frame: &str, a: CodeKind, b: CodeKind) -> PairState<'static> {
        PairState {
            frame: frame.parse().unwrap(),
            a: Binding { family: CodeFamily::get(a), conjugated: false },
            b: Binding { family: CodeFamily::get(b), conjugated: false },
            basis_parity: false,
            ledger: ResourceLedger::default(),
        }
    }

    #[test]
    fn raw_pair_branches() {
        let proto = protocol(SchemeKind::Baseline, CodeKind::Physical, CodeKind::Physical, 0.0, BellDistribution::RAW);
        let mut seen = std::collections::HashSet::new();
        let mut noise = quiet(11);
        for _ in 0..2000 {
            let pair = proto.make_raw_pair(&mut noise);
            assert_eq!(pair.frame.get(0), Pauli::I);
            assert_eq!(pair.ledger.raw_pairs, 1);
            seen.insert(pair.frame.get(1));
        }
        assert_eq!(seen.len(), 4);
    }

    #[test]
    fn encoding_carries_the_half_error() {
        let proto = protocol(SchemeKind::AfterEncoding, CodeKind::Steane7, CodeKind::Physical, 0.0, BellDistribution::RAW);
        let steane = CodeFamily::get(CodeKind::Steane7);
        let mut noise = quiet(0);
        let pair = pair_with("XI", CodeKind::Physical, CodeKind::Physical);
        let enc = proto.encode_half(pair, Side::A, steane, &mut noise);
        assert_eq!(enc.frame.len(), 8);
        let block = enc.frame.slice(0, 7);
        assert_eq!(&block, steane.base.logical_x());
        assert!(steane.base.syndrome(&block).is_zero());
        assert_eq!(enc.ledger.kq, 42);
        assert_eq!(proto.final_evaluate(&enc), (true, false));

        let pair = pair_with("II", CodeKind::Physical, CodeKind::Physical);
        let enc = proto.encode_half(pair, Side::B, steane, &mut noise);
        assert!(enc.frame.is_identity());
        assert_eq!(enc.b.kind(), CodeKind::Steane7);
    }

    #[test]
    fn final_evaluate_parity() {
        let steane = CodeFamily::get(CodeKind::Steane7);
        let lx = steane.base.logical_x().to_string();
        let id = "IIIIIII";
        let proto_order = BasisOrder::ZFirst;
        let one = pair_with(&format!("{lx}{id}"), CodeKind::Steane7, CodeKind::Steane7);
        assert_eq!(final_evaluate(&one, proto_order), (true, false));
        let both = pair_with(&format!("{lx}{lx}"), CodeKind::Steane7, CodeKind::Steane7);
        assert_eq!(final_evaluate(&both, proto_order), (false, false));
        let none = pair_with(&format!("{id}{id}"), CodeKind::Steane7, CodeKind::Steane7);
        assert_eq!(final_evaluate(&none, proto_order), (false, false));
    }

    #[test]
    fn noiseless_purification_of_clean_pairs() {
        let proto = protocol(SchemeKind::AfterEncodingStrict, CodeKind::Steane7, CodeKind::Surface3, 0.0, BellDistribution::PERFECT);
        let mut noise = quiet(1);
        let k = proto.base_pair(&mut noise);
        let s = proto.base_pair(&mut noise);
        match proto.purify_once(k, s, &mut noise) {
            PurifyOutcome::Success(p) => {
                assert!(p.frame.is_identity());
                assert!(p.basis_parity && p.a.conjugated && p.b.conjugated);
                assert_eq!(p.ledger.raw_pairs, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn strict_rejects_stray_x_on_measured_surface_block() {
        let proto = protocol(SchemeKind::AfterEncodingStrict, CodeKind::Steane7, CodeKind::Surface3, 0.0, BellDistribution::PERFECT);
        let surface = &CodeFamily::get(CodeKind::Surface3).base;
        // Qubit 0 is off the Z-type logical support.
        assert_eq!(surface.logical_z().get(0), Pauli::I);
        let mut noise = quiet(2);
        let k = proto.base_pair(&mut noise);
        let mut s = proto.base_pair(&mut noise);
        s.frame.set(7, Pauli::X);
        assert!(matches!(proto.purify_once(k.clone(), s.clone(), &mut noise), PurifyOutcome::PostselectFail(_)));

        let lenient = protocol(SchemeKind::AfterEncoding, CodeKind::Steane7, CodeKind::Surface3, 0.0, BellDistribution::PERFECT);
        assert!(matches!(lenient.purify_once(k, s, &mut noise), PurifyOutcome::Success(_)));
    }

    #[test]
    fn parity_failure_on_single_sided_x() {
        let proto = protocol(SchemeKind::Baseline, CodeKind::Physical, CodeKind::Physical, 0.0, BellDistribution::PERFECT);
        let mut noise = quiet(3);
        let k = pair_with("II", CodeKind::Physical, CodeKind::Physical);
        let s = pair_with("IX", CodeKind::Physical, CodeKind::Physical);
        let out = proto.purify_once(k, s, &mut noise);
        let PurifyOutcome::ParityFail(ledger) = out else { panic!("expected parity failure") };
        assert_eq!(ledger.n_2q, 2);
        assert_eq!(ledger.n_1q, 4);
    }

    #[test]
    #[should_panic(expected = "different code bindings")]
    fn mismatched_bindings_are_rejected() {
        let proto = protocol(SchemeKind::Baseline, CodeKind::Physical, CodeKind::Physical, 0.0, BellDistribution::PERFECT);
        let mut noise = quiet(4);
        let k = pair_with("II", CodeKind::Physical, CodeKind::Physical);
        let mut s = k.clone();
        s.basis_parity = true;
        proto.purify_once(k, s, &mut noise);
    }

    #[test]
    fn perfect_inputs_double_each_round() {
        for scheme in SchemeKind::ALL {
            let (a, b) = if scheme == SchemeKind::Baseline {
                (CodeKind::Physical, CodeKind::Physical)
            } else {
                (CodeKind::Steane7, CodeKind::Surface3)
            };
            let proto = protocol(scheme, a, b, 0.0, BellDistribution::PERFECT);
            let mut noise = quiet(5);
            for rounds in 0..4 {
                let pair = proto.build_pair(rounds, &mut noise);
                assert_eq!(pair.ledger.raw_pairs, 1 << rounds);
                assert_eq!(proto.final_evaluate(&pair), (false, false));
            }
        }
    }

    #[test]
    fn baseline_needs_physical_codes() {
        let err = Protocol::with_kinds(
            SchemeKind::Baseline,
            CodeKind::Steane7,
            CodeKind::Physical,
            NoiseModel::noiseless(),
            BellDistribution::RAW,
            ProtocolOptions::default(),
        );
        assert!(err.is_err());
    }
}
