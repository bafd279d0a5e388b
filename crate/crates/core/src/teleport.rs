//! Teleportation of a pair qubit from the accumulator (ions 1, 2) into the
//! storage region (ions 3, 4) through a four-ion resource on ions 3–6.
//!
//! The register holds three logical pairs: A = ions 1, 2 (input),
//! B = ions 3, 4 (receiver) and C = ions 5, 6 (the resource half that is
//! shuttled next to A). The Bell analysis is the two-pair evolution
//! `R(π/4)` on A and C followed by reading out ions 1, 2, 5 and 6; every
//! Bell state maps onto its own product state, so the discrimination is
//! complete.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::gates::{gate_r, pauli_correction, Correction, BELL_THETA};
use crate::measure::{measure_distribution, residual_phase, sample_outcome};
use crate::state::{fidelity, tensor, Layout, PureState};
use crate::unitary::{apply, Unitary};

pub const PAIR_A: usize = 0;
pub const PAIR_B: usize = 1;
pub const PAIR_C: usize = 2;

/// Fidelity shortfall tolerated when calling a teleported state correct.
pub const FIDELITY_TOL: f64 = 1e-9;

/// Readout labels of ions 1, 2, 5, 6.
pub const BELL_OUTCOMES: [&str; 4] = ["egeg", "gege", "geeg", "egge"];

/// Input phases used to pin down the correction for each outcome.
pub fn derivation_thetas() -> [f64; 8] {
    std::array::from_fn(|k| 2.0 * PI * k as f64 / 8.0)
}

/// `(|1̃⟩ + e^{iθ}|0̃⟩)/√2` on pair A.
pub fn make_input(theta: f64) -> Result<PureState> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    PureState::from_slice(
        &[Complex64::new(1.0, 0.0), Complex64::from_polar(1.0, theta)],
        Layout::logical(1),
    )
}

/// Relative phase `arg(a₀̃ / a₁̃)` of a single-pair state, in `[0, 2π)`.
pub fn relative_phase(s: &PureState) -> f64 {
    let phase = (s.amplitude(1) / s.amplitude(0)).arg();
    phase.rem_euclid(2.0 * PI)
}

/// `(|1̃⟩_B|0̃⟩_C − i|0̃⟩_B|1̃⟩_C)/√2`, i.e. `(|egge⟩ − i|geeg⟩)/√2` on ions 3–6.
pub fn resource_state() -> PureState {
    let h = FRAC_1_SQRT_2;
    let amps = [
        Complex64::new(0.0, 0.0),
        Complex64::new(h, 0.0),
        Complex64::new(0.0, -h),
        Complex64::new(0.0, 0.0),
    ];
    PureState::new(DVector::from_column_slice(&amps), Layout::logical(2)).expect("unit norm")
}

/// Builds the A, B, C register from a state of (A, C) and one of B.
pub fn assemble_register(ac: &PureState, b: &PureState) -> Result<PureState> {
    if ac.layout() != Layout::logical(2) || b.layout() != Layout::logical(1) {
        return Err(Error::InvalidRegister(
            "expected a two-pair (A, C) state and a one-pair B state".into(),
        ));
    }
    // tensor order is (A, C, B); move B into the middle
    let acb = tensor(ac, b)?;
    let amps = DVector::from_iterator(
        8,
        (0..8usize).map(|abc| {
            let (a, bb, c) = ((abc >> 2) & 1, (abc >> 1) & 1, abc & 1);
            acb.amplitude((a << 2) | (c << 1) | bb)
        }),
    );
    PureState::new(amps, Layout::logical(3))
}

/// `R(π/4)`, the Bell-analysis pulse of duration `π/(2Ω̃)`.
pub fn bell_pulse() -> Unitary {
    gate_r(BELL_THETA).expect("finite angle").unitary
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellMode {
    /// Every outcome with its exact probability.
    Exhaustive,
    /// One outcome drawn with the given seed.
    Sampled { seed: u64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellOutcome {
    /// Readout of ions 1, 2, 5, 6.
    pub label: String,
    pub probability: f64,
    /// Pair B before any correction.
    pub receiver: PureState,
}

/// Applies the Bell pulse to pairs A and C and reads both out.
pub fn bell_measure(joint: &PureState, mode: BellMode) -> Result<Vec<BellOutcome>> {
    if joint.layout() != Layout::logical(3) {
        return Err(Error::InvalidRegister(format!(
            "Bell analysis needs a three-pair logical register, got {:?}",
            joint.layout()
        )));
    }
    let pulsed = apply(&bell_pulse(), joint, &[PAIR_A, PAIR_C])?;
    let distribution = measure_distribution(&pulsed, &[PAIR_A, PAIR_C])?;
    let records = match mode {
        BellMode::Exhaustive => distribution,
        BellMode::Sampled { seed } => vec![sample_outcome(&distribution, seed)?],
    };
    Ok(records
        .into_iter()
        .map(|r| BellOutcome {
            label: r.outcome_label,
            probability: r.probability,
            receiver: r.post_state,
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Found by searching the correction candidates numerically.
    Derived,
    /// Assignment exactly as printed alongside the protocol.
    PaperLiteral,
}

impl Provenance {
    pub fn as_str(self) -> &'static str {
        match self {
            Provenance::Derived => "derived",
            Provenance::PaperLiteral => "paper-literal",
        }
    }
}

/// Outcome → correction mapping covering all four Bell outcomes.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrectionTable {
    entries: BTreeMap<String, Correction>,
    provenance: Provenance,
}

impl CorrectionTable {
    pub fn new(entries: &[(&str, Correction)], provenance: Provenance) -> Result<Self> {
        let mut map = BTreeMap::new();
        for &(label, correction) in entries {
            if !BELL_OUTCOMES.contains(&label) {
                return Err(Error::InvalidLabel(label.to_string()));
            }
            map.insert(label.to_string(), correction);
        }
        if let Some(missing) = BELL_OUTCOMES.iter().find(|l| !map.contains_key(**l)) {
            return Err(Error::InvalidRegister(format!(
                "correction table has no entry for {missing}"
            )));
        }
        Ok(Self {
            entries: map,
            provenance,
        })
    }

    pub fn correction(&self, label: &str) -> Option<Correction> {
        self.entries.get(label).copied()
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// Entries in [`BELL_OUTCOMES`] order.
    pub fn entries(&self) -> Vec<(&'static str, Correction)> {
        BELL_OUTCOMES
            .iter()
            .map(|&l| (l, self.entries[l]))
            .collect()
    }
}

/// `egeg → I, gege → Z3, geeg → X3X4, egge → X3X4Z3`, as printed.
pub fn paper_literal_table() -> CorrectionTable {
    CorrectionTable::new(
        &[
            ("egeg", Correction::I),
            ("gege", Correction::Z3),
            ("geeg", Correction::X3X4),
            ("egge", Correction::X3X4Z3),
        ],
        Provenance::PaperLiteral,
    )
    .expect("complete table")
}

/// For each outcome, the single correction that restores the input for
/// every phase in [`derivation_thetas`].
pub fn derived_correction_table() -> Result<CorrectionTable> {
    let mut fits: BTreeMap<&str, Vec<Correction>> = BELL_OUTCOMES
        .iter()
        .map(|&l| (l, Correction::ALL.to_vec()))
        .collect();
    for theta in derivation_thetas() {
        let input = make_input(theta)?;
        let joint = TeleportSetup::new(theta)?.joint_state()?;
        for outcome in bell_measure(&joint, BellMode::Exhaustive)? {
            let Some(candidates) = fits.get_mut(outcome.label.as_str()) else {
                continue;
            };
            candidates.retain(|&c| {
                outcome
                    .receiver
                    .apply(&pauli_correction(c), &[0])
                    .and_then(|fixed| fidelity(&fixed, &input))
                    .is_ok_and(|f| f >= 1.0 - FIDELITY_TOL)
            });
        }
    }
    let mut entries = Vec::with_capacity(4);
    for (label, candidates) in fits {
        match candidates.as_slice() {
            [only] => entries.push((label, *only)),
            _ => {
                return Err(Error::CorrectionSearch {
                    outcome: label.to_string(),
                    candidates: candidates.len(),
                })
            }
        }
    }
    CorrectionTable::new(&entries, Provenance::Derived)
}

/// Step of the protocol as it appears in a report trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolStep {
    /// Resource `(|egge⟩ − i|geeg⟩)/√2` on ions 3–6 in the storage region.
    PrepareResource,
    /// Ions 5 and 6 moved to the accumulator; modeled as a relabeling that
    /// costs `latency_s` seconds.
    Shuttle { latency_s: f64 },
    BellPulse { theta: f64 },
    Readout,
    Correct,
}

/// Protocol inputs: the phase of the state to send and the shuttle latency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TeleportSetup {
    pub theta: f64,
    pub shuttle_latency: f64,
}

impl TeleportSetup {
    pub fn new(theta: f64) -> Result<Self> {
        Self::with_latency(theta, 0.0)
    }

    pub fn with_latency(theta: f64, shuttle_latency: f64) -> Result<Self> {
        if !theta.is_finite() {
            return Err(Error::NonFinite("theta"));
        }
        if !(shuttle_latency.is_finite() && shuttle_latency >= 0.0) {
            return Err(Error::InvalidParams(format!(
                "shuttle latency must be ≥ 0, got {shuttle_latency}"
            )));
        }
        Ok(Self {
            theta,
            shuttle_latency,
        })
    }

    /// Input on A tensored with the resource on (B, C).
    pub fn joint_state(&self) -> Result<PureState> {
        tensor(&make_input(self.theta)?, &resource_state())
    }

    pub fn run(&self, table: &CorrectionTable) -> Result<TeleportReport> {
        let input = make_input(self.theta)?;
        let joint = self.joint_state()?;
        let mut outcomes = Vec::with_capacity(4);
        for outcome in bell_measure(&joint, BellMode::Exhaustive)? {
            let correction = table.correction(&outcome.label).ok_or_else(|| {
                Error::InvalidRegister(format!("no correction for {}", outcome.label))
            })?;
            let corrected = outcome.receiver.apply(&pauli_correction(correction), &[0])?;
            outcomes.push(OutcomeReport {
                fidelity: fidelity(&corrected, &input)?,
                label: outcome.label,
                probability: outcome.probability,
                correction,
                corrected,
            });
        }
        let min_fidelity = outcomes.iter().map(|o| o.fidelity).fold(1.0, f64::min);
        let mean_fidelity =
            outcomes.iter().map(|o| o.probability * o.fidelity).sum::<f64>();
        Ok(TeleportReport {
            theta: self.theta,
            provenance: table.provenance(),
            outcomes,
            min_fidelity,
            mean_fidelity,
            trace: vec![
                ProtocolStep::PrepareResource,
                ProtocolStep::Shuttle {
                    latency_s: self.shuttle_latency,
                },
                ProtocolStep::BellPulse { theta: BELL_THETA },
                ProtocolStep::Readout,
                ProtocolStep::Correct,
            ],
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeReport {
    pub label: String,
    pub probability: f64,
    pub correction: Correction,
    /// Pair B after the correction.
    pub corrected: PureState,
    /// Overlap of the corrected pair B with the input.
    pub fidelity: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TeleportReport {
    pub theta: f64,
    pub provenance: Provenance,
    pub outcomes: Vec<OutcomeReport>,
    pub min_fidelity: f64,
    /// Probability-weighted fidelity.
    pub mean_fidelity: f64,
    pub trace: Vec<ProtocolStep>,
}

impl TeleportReport {
    /// Total probability of outcomes whose corrected state is faithful.
    pub fn success_probability(&self) -> f64 {
        self.outcomes
            .iter()
            .filter(|o| o.fidelity >= 1.0 - FIDELITY_TOL)
            .map(|o| o.probability)
            .sum()
    }

    pub fn failing_outcomes(&self) -> Vec<&OutcomeReport> {
        self.outcomes
            .iter()
            .filter(|o| o.fidelity < 1.0 - FIDELITY_TOL)
            .collect()
    }
}

/// Exhaustive teleportation of `make_input(theta)` with `table`.
pub fn teleport(theta: f64, table: &CorrectionTable) -> Result<TeleportReport> {
    TeleportSetup::new(theta)?.run(table)
}

/// How one Bell state of (A, C) comes out of the Bell pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct BellCheck {
    /// Bell state written over ions 1, 2, 5, 6.
    pub bell_state: &'static str,
    pub outcome: String,
    pub probability: f64,
    /// Phase of the product state the Bell state is mapped to.
    pub phase: Complex64,
    /// Phase printed for the same mapping.
    pub printed_phase: Complex64,
}

impl BellCheck {
    pub fn matches_print(&self, tol: f64) -> bool {
        (self.phase - self.printed_phase).norm() <= tol
    }
}

/// Runs the Bell pulse on each of the four Bell states of (A, C).
pub fn bell_discrimination() -> Result<Vec<BellCheck>> {
    let one = Complex64::new(1.0, 0.0);
    let i = Complex64::new(0.0, 1.0);
    let pairs = Layout::logical(2);
    // (first ket, sign of the i-term, second ket, printed result phase)
    let cases = [
        ("(|egeg> + i|gege>)/sqrt2", "egeg", one, "gege", one),
        ("(|egeg> - i|gege>)/sqrt2", "egeg", -one, "gege", -i),
        ("(|geeg> + i|egge>)/sqrt2", "geeg", one, "egge", one),
        ("(|geeg> - i|egge>)/sqrt2", "geeg", -one, "egge", i),
    ];
    let mut checks = Vec::with_capacity(4);
    for (name, first, sign, second, printed_phase) in cases {
        let mut amps = vec![Complex64::new(0.0, 0.0); 4];
        amps[pairs.index(first)?] = one;
        amps[pairs.index(second)?] = sign * i;
        let bell = PureState::from_slice(&amps, pairs)?;
        let pulsed = apply(&bell_pulse(), &bell, &[0, 1])?;
        let dist = measure_distribution(&pulsed, &[0, 1])?;
        let top = dist
            .into_iter()
            .max_by(|a, b| a.probability.total_cmp(&b.probability))
            .ok_or(Error::EmptyDistribution)?;
        checks.push(BellCheck {
            bell_state: name,
            phase: residual_phase(&top.post_state).expect("fully measured"),
            outcome: top.outcome_label,
            probability: top.probability,
            printed_phase,
        });
    }
    Ok(checks)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn input_states() {
        let h = FRAC_1_SQRT_2;
        let s = make_input(0.0).unwrap();
        assert!(s.max_abs_diff(&PureState::from_slice(&[c(1.0, 0.0), c(1.0, 0.0)], Layout::logical(1)).unwrap()) < 1e-15);
        let s = make_input(PI).unwrap();
        assert!((s.amplitude(0) - c(h, 0.0)).norm() < 1e-15);
        assert!((s.amplitude(1) - c(-h, 0.0)).norm() < 1e-15);
        assert!(make_input(f64::NAN).is_err());
    }

    #[test]
    fn resource_is_the_storage_entangled_state() {
        let r = resource_state();
        let pairs = Layout::logical(2);
        assert!((r.amplitude(pairs.index("egge").unwrap()) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((r.amplitude(pairs.index("geeg").unwrap()) - c(0.0, -FRAC_1_SQRT_2)).norm() < 1e-15);
        assert!((r.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn register_assembly_places_pairs() {
        let ac = PureState::from_label(Layout::logical(2), "egge").unwrap();
        let joint = assemble_register(&ac, &PureState::zero()).unwrap();
        assert_eq!(joint, PureState::from_label(Layout::logical(3), "eggege").unwrap());
        assert!(assemble_register(&PureState::one(), &PureState::one()).is_err());
    }

    #[test]
    fn bell_measure_needs_three_pairs() {
        let s = PureState::basis(Layout::logical(2), 0).unwrap();
        assert!(matches!(
            bell_measure(&s, BellMode::Exhaustive),
            Err(Error::InvalidRegister(_))
        ));
    }

    fn ac_state(first: &str, coeff: Complex64, second: &str) -> PureState {
        let pairs = Layout::logical(2);
        let mut amps = vec![c(0.0, 0.0); 4];
        amps[pairs.index(first).unwrap()] = c(1.0, 0.0);
        amps[pairs.index(second).unwrap()] = coeff;
        PureState::from_slice(&amps, pairs).unwrap()
    }

    #[test]
    fn bell_states_are_discriminated() {
        let b = make_input(0.4).unwrap();
        let cases = [
            (ac_state("egeg", c(0.0, 1.0), "gege"), "egeg"),
            (ac_state("egeg", c(0.0, -1.0), "gege"), "gege"),
            (ac_state("geeg", c(0.0, 1.0), "egge"), "geeg"),
            (ac_state("geeg", c(0.0, -1.0), "egge"), "egge"),
        ];
        for (ac, expected) in cases {
            let joint = assemble_register(&ac, &b).unwrap();
            let out = bell_measure(&joint, BellMode::Exhaustive).unwrap();
            assert_eq!(out.len(), 1);
            assert_eq!(out[0].label, expected);
            assert!((out[0].probability - 1.0).abs() < 1e-12);
            assert!((fidelity(&out[0].receiver, &b).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sampled_mode_returns_one_outcome() {
        let joint = TeleportSetup::new(1.1).unwrap().joint_state().unwrap();
        let a = bell_measure(&joint, BellMode::Sampled { seed: 99 }).unwrap();
        let b = bell_measure(&joint, BellMode::Sampled { seed: 99 }).unwrap();
        assert_eq!(a.len(), 1);
        assert_eq!(a, b);
        assert!(BELL_OUTCOMES.contains(&a[0].label.as_str()));
    }

    #[test]
    fn correction_table_must_be_total() {
        assert!(CorrectionTable::new(&[("egeg", Correction::I)], Provenance::Derived).is_err());
        assert!(CorrectionTable::new(&[("eeee", Correction::I)], Provenance::Derived).is_err());
        let t = paper_literal_table();
        assert_eq!(t.correction("gege"), Some(Correction::Z3));
        assert_eq!(t.provenance(), Provenance::PaperLiteral);
    }

    #[test]
    fn setup_validation_and_trace() {
        assert!(TeleportSetup::with_latency(0.0, -1.0).is_err());
        let setup = TeleportSetup::with_latency(0.3, 2.5e-3).unwrap();
        let report = setup.run(&paper_literal_table()).unwrap();
        assert!(report
            .trace
            .contains(&ProtocolStep::Shuttle { latency_s: 2.5e-3 }));
        assert_eq!(report.trace.len(), 5);
    }

    #[test]
    fn relative_phase_readout() {
        for theta in [0.0, 0.5, 3.0, 6.0] {
            assert!((relative_phase(&make_input(theta).unwrap()) - theta).abs() < 1e-12);
        }
    }
}
