//! Gate set acting on pair-encoded qubits.
//!
//! Single-pair gates are written in the `(|1̃⟩, |0̃⟩) = (|eg⟩, |ge⟩)` basis;
//! the two-pair evolution `R(θ)` in `(|1̃1̃⟩, |1̃0̃⟩, |0̃1̃⟩, |0̃0̃⟩)`. Pair `0`
//! is ions 1 and 2, pair `1` is ions 3 and 4, and so on.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::state::{Layout, PureState};
use crate::unitary::{apply, Unitary};

/// Half-angle of the two-pair evolution used inside the CNOT sequence.
pub const CNOT_THETA: f64 = 3.0 * PI / 4.0;

/// Half-angle of the Bell-analysis pulse.
pub const BELL_THETA: f64 = PI / 4.0;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PairGateKind {
    /// Identity, used as a no-op schedule step.
    I,
    /// `|eg⟩ → (|eg⟩ − i|ge⟩)/√2`, `|ge⟩ → (|ge⟩ − i|eg⟩)/√2`.
    H,
    /// π/2 phase on `|eg⟩`.
    P,
    Pinv,
    X,
    Z,
}

impl PairGateKind {
    pub fn name(self) -> &'static str {
        match self {
            PairGateKind::I => "I",
            PairGateKind::H => "H",
            PairGateKind::P => "P",
            PairGateKind::Pinv => "P^-1",
            PairGateKind::X => "X",
            PairGateKind::Z => "Z",
        }
    }

    pub fn matrix(self) -> Unitary {
        let h = Complex64::new(FRAC_1_SQRT_2, 0.0);
        let entries = match self {
            PairGateKind::I => [ONE, ZERO, ZERO, ONE],
            PairGateKind::H => [h, -I * h, -I * h, h],
            PairGateKind::P => [I, ZERO, ZERO, ONE],
            PairGateKind::Pinv => [-I, ZERO, ZERO, ONE],
            PairGateKind::X => [ZERO, ONE, ONE, ZERO],
            PairGateKind::Z => [ONE, ZERO, ZERO, -ONE],
        };
        Unitary::from_rows(2, &entries).expect("fixed pair gates are unitary")
    }
}

/// A named single-pair gate with its 2×2 matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct PairGate {
    pub kind: PairGateKind,
    pub unitary: Unitary,
}

pub fn pair_gate(kind: PairGateKind) -> PairGate {
    PairGate {
        kind,
        unitary: kind.matrix(),
    }
}

/// Two-pair evolution `R(θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoPairGate {
    pub theta: f64,
    pub unitary: Unitary,
}

/// `R(θ)`: within each of the blocks `{|1̃1̃⟩, |0̃0̃⟩}` and `{|1̃0̃⟩, |0̃1̃⟩}`
/// the diagonal is `cos θ` and the off-diagonal `−i sin θ`. The pulse area
/// `Ω̃t` corresponds to `θ = Ω̃t/2`.
pub fn gate_r(theta: f64) -> Result<TwoPairGate> {
    if !theta.is_finite() {
        return Err(Error::NonFinite("theta"));
    }
    let c = Complex64::new(theta.cos(), 0.0);
    let s = -I * theta.sin();
    #[rustfmt::skip]
    let entries = [
        c,    ZERO, ZERO, s,
        ZERO, c,    s,    ZERO,
        ZERO, s,    c,    ZERO,
        s,    ZERO, ZERO, c,
    ];
    Ok(TwoPairGate {
        theta,
        unitary: Unitary::from_rows(4, &entries)?,
    })
}

/// `P·H`: `|1̃⟩ → i(|1̃⟩ − |0̃⟩)/√2`, `|0̃⟩ → (|0̃⟩ + |1̃⟩)/√2`.
pub fn logical_hadamard() -> Unitary {
    PairGateKind::P
        .matrix()
        .compose(&PairGateKind::H.matrix())
        .expect("2x2 product")
}

/// Outcome-dependent correction on the receiving pair (ions 3 and 4).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Correction {
    I,
    /// σ_z on ion 3.
    Z3,
    /// σ_x on ions 3 and 4.
    X3X4,
    /// σ_z on ion 3 followed by σ_x on ions 3 and 4.
    X3X4Z3,
}

impl Correction {
    pub const ALL: [Correction; 4] = [
        Correction::I,
        Correction::Z3,
        Correction::X3X4,
        Correction::X3X4Z3,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Correction::I => "I",
            Correction::Z3 => "Z3",
            Correction::X3X4 => "X3X4",
            Correction::X3X4Z3 => "X3X4Z3",
        }
    }
}

impl fmt::Display for Correction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Correction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Correction::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::InvalidLabel(s.to_string()))
    }
}

/// Logical matrix of a correction. With `σ_z|e⟩ = |e⟩`, σ_z on the first
/// ion of a pair is logical Z; σ_x on both ions swaps `|eg⟩ ↔ |ge⟩`.
pub fn pauli_correction(label: Correction) -> Unitary {
    match label {
        Correction::I => PairGateKind::I.matrix(),
        Correction::Z3 => PairGateKind::Z.matrix(),
        Correction::X3X4 => PairGateKind::X.matrix(),
        Correction::X3X4Z3 => PairGateKind::X
            .matrix()
            .compose(&PairGateKind::Z.matrix())
            .expect("2x2 product"),
    }
}

/// Gate in a schedule.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateOp {
    Pair(PairGateKind),
    R(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScheduledGate {
    pub op: GateOp,
    pub targets: Vec<usize>,
}

impl ScheduledGate {
    pub fn pair(kind: PairGateKind, pair: usize) -> Self {
        Self {
            op: GateOp::Pair(kind),
            targets: vec![pair],
        }
    }

    pub fn r(theta: f64, first: usize, second: usize) -> Self {
        Self {
            op: GateOp::R(theta),
            targets: vec![first, second],
        }
    }

    pub fn unitary(&self) -> Result<Unitary> {
        match self.op {
            GateOp::Pair(kind) => Ok(kind.matrix()),
            GateOp::R(theta) => Ok(gate_r(theta)?.unitary),
        }
    }
}

fn ion_subscript(pair: usize) -> String {
    format!("{}{}", 2 * pair + 1, 2 * pair + 2)
}

impl fmt::Display for ScheduledGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ions: String = self.targets.iter().map(|&p| ion_subscript(p)).collect();
        match self.op {
            GateOp::Pair(kind) => write!(f, "{}_{}", kind.name(), ions),
            GateOp::R(theta) => write!(f, "R({theta:.6})_{ions}"),
        }
    }
}

/// Ordered, validated list of gates on a register of `pairs` logical qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct GateSchedule {
    pairs: usize,
    steps: Vec<ScheduledGate>,
}

impl GateSchedule {
    pub fn new(pairs: usize, steps: Vec<ScheduledGate>) -> Result<Self> {
        if steps.is_empty() {
            return Err(Error::InvalidSchedule("schedule is empty".into()));
        }
        for step in &steps {
            let arity = match step.op {
                GateOp::Pair(_) => 1,
                GateOp::R(theta) => {
                    if !theta.is_finite() {
                        return Err(Error::NonFinite("theta"));
                    }
                    2
                }
            };
            if step.targets.len() != arity {
                return Err(Error::InvalidSchedule(format!(
                    "{step} needs {arity} target pair(s)"
                )));
            }
            if let Some(&t) = step.targets.iter().find(|&&t| t >= pairs) {
                return Err(Error::TargetOutOfRange {
                    target: t,
                    count: pairs,
                });
            }
            if arity == 2 && step.targets[0] == step.targets[1] {
                return Err(Error::DuplicateTarget(step.targets[0]));
            }
        }
        Ok(Self { pairs, steps })
    }

    pub fn pairs(&self) -> usize {
        self.pairs
    }

    pub fn steps(&self) -> &[ScheduledGate] {
        &self.steps
    }

    /// Product of all steps on the `2^pairs` logical space.
    pub fn unitary(&self) -> Result<Unitary> {
        let layout = Layout::logical(self.pairs);
        let dim = layout.dim();
        let mut entries = nalgebra::DMatrix::zeros(dim, dim);
        for col in 0..dim {
            let out = apply_schedule(self, &PureState::basis(layout, col)?)?;
            entries.set_column(col, out.amplitudes());
        }
        Unitary::with_tolerance(entries, crate::PIPELINE_TOL)
    }
}

impl fmt::Display for GateSchedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.steps.iter().map(|s| s.to_string()).collect();
        f.write_str(&names.join(", "))
    }
}

/// Applies the steps in listed order.
pub fn apply_schedule(schedule: &GateSchedule, s: &PureState) -> Result<PureState> {
    if !s.layout().is_logical() {
        return Err(Error::LayoutMismatch(
            "gate schedules act on logical states".into(),
        ));
    }
    let mut state = s.clone();
    for step in &schedule.steps {
        state = apply(&step.unitary()?, &state, &step.targets)?;
    }
    Ok(state)
}

/// The CNOT pulse sequence on pairs A = 0 (ions 1, 2, target) and
/// B = 1 (ions 3, 4, control) with an explicit R half-angle.
pub fn cnot_schedule(theta: f64) -> Result<GateSchedule> {
    use PairGateKind::*;
    const A: usize = 0;
    const B: usize = 1;
    GateSchedule::new(
        2,
        vec![
            ScheduledGate::pair(H, B),
            ScheduledGate::pair(P, B),
            ScheduledGate::r(theta, A, B),
            ScheduledGate::pair(P, B),
            ScheduledGate::pair(H, A),
            ScheduledGate::pair(H, B),
            ScheduledGate::pair(Pinv, B),
        ],
    )
}

/// The seven-step CNOT schedule at `θ = 3π/4` and its composed matrix.
pub fn cnot_sequence() -> (GateSchedule, Unitary) {
    let schedule = cnot_schedule(CNOT_THETA).expect("fixed schedule is valid");
    let unitary = schedule.unitary().expect("fixed schedule composes");
    (schedule, unitary)
}

/// Rows of the published truth table as `(input, output)` ket strings over
/// ions 1–4.
pub const CNOT_TRUTH_TABLE: [(&str, &str); 4] = [
    ("egge", "egge"),
    ("gege", "gege"),
    ("egeg", "geeg"),
    ("geeg", "egeg"),
];

/// Comparison of a 4×4 unitary with [`CNOT_TRUTH_TABLE`] up to global phase.
#[derive(Debug, Clone, PartialEq)]
pub struct TruthTableCheck {
    /// Best-fit common phase `e^{iφ}`.
    pub global_phase: Complex64,
    /// `max |U − e^{iφ} T|` over all sixteen entries.
    pub max_deviation: f64,
    /// `U[out, in]` for each table row, in table order.
    pub row_amplitudes: [Complex64; 4],
    /// Largest pairwise distance between the per-row phases.
    pub phase_spread: f64,
}

impl TruthTableCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.max_deviation <= tol && self.phase_spread <= tol
    }
}

/// Permutation matrix of [`CNOT_TRUTH_TABLE`].
pub fn cnot_truth_matrix() -> Unitary {
    let layout = Layout::logical(2);
    let mut entries = [ZERO; 16];
    for (input, output) in CNOT_TRUTH_TABLE {
        let col = layout.index(input).expect("table labels");
        let row = layout.index(output).expect("table labels");
        entries[row * 4 + col] = ONE;
    }
    Unitary::from_rows(4, &entries).expect("permutation")
}

pub fn check_truth_table(u: &Unitary) -> Result<TruthTableCheck> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            found: u.dim(),
        });
    }
    let layout = Layout::logical(2);
    let mut row_amplitudes = [ZERO; 4];
    for (k, (input, output)) in CNOT_TRUTH_TABLE.iter().enumerate() {
        row_amplitudes[k] = u.entry(layout.index(output)?, layout.index(input)?);
    }
    let overlap: Complex64 = row_amplitudes.iter().sum();
    let global_phase = if overlap.norm() > 0.0 {
        overlap / overlap.norm()
    } else {
        ONE
    };
    let truth = cnot_truth_matrix();
    let mut max_deviation = 0.0f64;
    for row in 0..4 {
        for col in 0..4 {
            let d = (u.entry(row, col) - global_phase * truth.entry(row, col)).norm();
            max_deviation = max_deviation.max(d);
        }
    }
    let phases: Vec<Complex64> = row_amplitudes
        .iter()
        .map(|a| if a.norm() > 0.0 { a / a.norm() } else { ZERO })
        .collect();
    let mut phase_spread = 0.0f64;
    for a in &phases {
        for b in &phases {
            phase_spread = phase_spread.max((a - b).norm());
        }
    }
    Ok(TruthTableCheck {
        global_phase,
        max_deviation,
        row_amplitudes,
        phase_spread,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn pair_gate_entries() {
        let h = FRAC_1_SQRT_2;
        let expected = [
            (PairGateKind::H, [c(h, 0.0), c(0.0, -h), c(0.0, -h), c(h, 0.0)]),
            (PairGateKind::P, [c(0.0, 1.0), ZERO, ZERO, ONE]),
            (PairGateKind::Pinv, [c(0.0, -1.0), ZERO, ZERO, ONE]),
            (PairGateKind::X, [ZERO, ONE, ONE, ZERO]),
            (PairGateKind::Z, [ONE, ZERO, ZERO, -ONE]),
        ];
        for (kind, entries) in expected {
            let g = pair_gate(kind);
            for (k, e) in entries.iter().enumerate() {
                assert!(close(g.unitary.entry(k / 2, k % 2), *e, 1e-15), "{kind:?}");
            }
        }
        assert_eq!(
            PairGateKind::Pinv.matrix(),
            PairGateKind::P.matrix().adjoint()
        );
    }

    #[test]
    fn r_special_angles() {
        assert!(gate_r(0.0).unwrap().unitary.max_abs_diff(&Unitary::identity(4)) < 1e-15);

        let s = PureState::from_label(Layout::logical(2), "egeg").unwrap();
        let out = s.apply(&gate_r(PI / 2.0).unwrap().unitary, &[0, 1]).unwrap();
        let expected = PureState::from_label(Layout::logical(2), "gege")
            .unwrap()
            .with_global_phase(-PI / 2.0);
        assert!(out.max_abs_diff(&expected) < 1e-15);

        // (|egeg⟩ + i|gege⟩)/√2 → |egeg⟩
        let bell = PureState::from_slice(&[ONE, ZERO, ZERO, c(0.0, 1.0)], Layout::logical(2)).unwrap();
        let out = bell.apply(&gate_r(PI / 4.0).unwrap().unitary, &[0, 1]).unwrap();
        assert!(out.max_abs_diff(&PureState::basis(Layout::logical(2), 0).unwrap()) < 1e-15);
    }

    #[test]
    fn r_rejects_non_finite() {
        assert_eq!(gate_r(f64::NAN).unwrap_err(), Error::NonFinite("theta"));
        assert!(gate_r(f64::INFINITY).is_err());
    }

    #[test]
    fn logical_hadamard_action() {
        let lh = logical_hadamard();
        let out = PureState::one().apply(&lh, &[0]).unwrap();
        let h = FRAC_1_SQRT_2;
        assert!(close(out.amplitude(0), c(0.0, h), 1e-15));
        assert!(close(out.amplitude(1), c(0.0, -h), 1e-15));
        let out = PureState::zero().apply(&lh, &[0]).unwrap();
        assert!(close(out.amplitude(0), c(h, 0.0), 1e-15));
        assert!(close(out.amplitude(1), c(h, 0.0), 1e-15));
        assert!(lh.unitarity_deviation() < 1e-12);
    }

    #[test]
    fn logical_hadamard_squared() {
        // (PH)² by hand: PH = [[i/√2, 1/√2], [-i/√2, 1/√2]]
        let h = FRAC_1_SQRT_2;
        let ph = [[c(0.0, h), c(h, 0.0)], [c(0.0, -h), c(h, 0.0)]];
        let mut sq = [[ZERO; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                sq[i][j] = ph[i][0] * ph[0][j] + ph[i][1] * ph[1][j];
            }
        }
        let lh = logical_hadamard();
        let computed = lh.compose(&lh).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert!(close(computed.entry(i, j), sq[i][j], 1e-12));
            }
        }
    }

    #[test]
    fn corrections_on_the_receiving_pair() {
        let z = pauli_correction(Correction::Z3);
        assert_eq!(PureState::one().apply(&z, &[0]).unwrap(), PureState::one());
        assert!(PureState::zero()
            .apply(&z, &[0])
            .unwrap()
            .max_abs_diff(&PureState::zero().with_global_phase(PI))
            < 1e-15);

        let x = pauli_correction(Correction::X3X4);
        assert_eq!(PureState::one().apply(&x, &[0]).unwrap(), PureState::zero());

        // X·Z (|eg⟩ − |ge⟩)/√2: Z gives (|eg⟩ + |ge⟩)/√2, X leaves it
        let minus = PureState::from_slice(&[ONE, -ONE], Layout::logical(1)).unwrap();
        let plus = PureState::from_slice(&[ONE, ONE], Layout::logical(1)).unwrap();
        let out = minus.apply(&pauli_correction(Correction::X3X4Z3), &[0]).unwrap();
        assert!((crate::state::fidelity(&out, &plus).unwrap() - 1.0).abs() < 1e-15);

        for label in Correction::ALL {
            assert_eq!(label.name().parse::<Correction>().unwrap(), label);
        }
    }

    #[test]
    fn schedule_validation() {
        assert!(GateSchedule::new(2, vec![]).is_err());
        assert!(GateSchedule::new(2, vec![ScheduledGate::pair(PairGateKind::H, 2)]).is_err());
        assert!(GateSchedule::new(2, vec![ScheduledGate::r(0.1, 1, 1)]).is_err());
        assert!(GateSchedule::new(2, vec![ScheduledGate::r(f64::NAN, 0, 1)]).is_err());
        let bad_arity = ScheduledGate {
            op: GateOp::R(0.1),
            targets: vec![0],
        };
        assert!(GateSchedule::new(2, vec![bad_arity]).is_err());
    }

    #[test]
    fn identity_schedule_is_noop() {
        let sch = GateSchedule::new(1, vec![ScheduledGate::pair(PairGateKind::I, 0)]).unwrap();
        let s = PureState::from_slice(&[c(0.3, 0.1), c(-0.2, 0.9)], Layout::logical(1)).unwrap();
        assert_eq!(apply_schedule(&sch, &s).unwrap(), s);
        let phys = PureState::basis(Layout::physical(2), 0).unwrap();
        assert!(apply_schedule(&sch, &phys).is_err());
    }

    #[test]
    fn schedule_display_uses_ion_numbers() {
        let (sch, _) = cnot_sequence();
        assert_eq!(
            sch.to_string(),
            "H_34, P_34, R(2.356194)_1234, P_34, H_12, H_34, P^-1_34"
        );
    }

    #[test]
    fn truth_table_matrix() {
        let t = cnot_truth_matrix();
        // control B = |1̃⟩ flips target A
        assert_eq!(t.entry(2, 0), ONE);
        assert_eq!(t.entry(0, 2), ONE);
        assert_eq!(t.entry(1, 1), ONE);
        assert_eq!(t.entry(3, 3), ONE);
        let check = check_truth_table(&t).unwrap();
        assert!(check.passes(1e-15));
        assert!(close(check.global_phase, ONE, 1e-15));
    }

    #[test]
    fn wrong_angle_fails_truth_table() {
        let u = cnot_schedule(PI / 4.0).unwrap().unitary().unwrap();
        let check = check_truth_table(&u).unwrap();
        assert!(!check.passes(1e-10));
        assert!(check.max_deviation > 0.1);
    }
}
