//! Pure states over pair-encoded logical qubits or bare physical ions.
//!
//! # Basis convention
//!
//! Every subsystem is two-dimensional and the convention is fixed here and
//! nowhere else:
//!
//! * logical pair: `|1̃⟩ = |eg⟩` has index 0, `|0̃⟩ = |ge⟩` has index 1;
//! * physical ion: `|e⟩` has index 0, `|g⟩` has index 1;
//! * tensor order: the lowest-numbered pair or ion is the most significant
//!   bit of the flat index.
//!
//! With this ordering the two-pair basis reads `|1̃1̃⟩, |1̃0̃⟩, |0̃1̃⟩, |0̃0̃⟩`,
//! i.e. `|egeg⟩, |egge⟩, |geeg⟩, |gege⟩`, and the ket strings used
//! throughout (`"egge"`, ...) name ions left to right.

use nalgebra::DVector;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::CONSTRUCTION_TOL;

/// Largest register (pairs or ions) the dense representation accepts.
pub const MAX_SUBSYSTEMS: usize = 12;

/// How the amplitudes of a [`PureState`] are to be read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Layout {
    /// `pairs` logical qubits, each encoded on two ions.
    Logical { pairs: usize },
    /// `ions` bare two-level ions.
    Physical { ions: usize },
}

impl Layout {
    pub fn logical(pairs: usize) -> Self {
        Layout::Logical { pairs }
    }

    pub fn physical(ions: usize) -> Self {
        Layout::Physical { ions }
    }

    /// Number of two-dimensional subsystems.
    pub fn subsystems(self) -> usize {
        match self {
            Layout::Logical { pairs } => pairs,
            Layout::Physical { ions } => ions,
        }
    }

    pub fn dim(self) -> usize {
        1 << self.subsystems()
    }

    pub fn is_logical(self) -> bool {
        matches!(self, Layout::Logical { .. })
    }

    /// Same kind of layout with a different subsystem count.
    pub fn with_subsystems(self, count: usize) -> Self {
        match self {
            Layout::Logical { .. } => Layout::Logical { pairs: count },
            Layout::Physical { .. } => Layout::Physical { ions: count },
        }
    }

    /// Label of one subsystem in the given local state (0 or 1).
    pub fn subsystem_label(self, bit: usize) -> &'static str {
        match (self, bit) {
            (Layout::Logical { .. }, 0) => "eg",
            (Layout::Logical { .. }, _) => "ge",
            (Layout::Physical { .. }, 0) => "e",
            (Layout::Physical { .. }, _) => "g",
        }
    }

    /// Ket string (`e`/`g` per ion) of a basis index.
    pub fn label(self, index: usize) -> String {
        let n = self.subsystems();
        (0..n)
            .map(|q| self.subsystem_label((index >> (n - 1 - q)) & 1))
            .collect()
    }

    /// Basis index of a ket string. Logical layouts read the string two
    /// characters (one pair) at a time.
    pub fn index(self, label: &str) -> Result<usize> {
        let bad = || Error::InvalidLabel(label.to_string());
        let chars: Vec<char> = label.chars().collect();
        let n = self.subsystems();
        let per = if self.is_logical() { 2 } else { 1 };
        if chars.len() != n * per {
            return Err(bad());
        }
        let mut index = 0usize;
        for chunk in chars.chunks(per) {
            let bit = match (self, chunk) {
                (Layout::Logical { .. }, ['e', 'g']) => 0,
                (Layout::Logical { .. }, ['g', 'e']) => 1,
                (Layout::Physical { .. }, ['e']) => 0,
                (Layout::Physical { .. }, ['g']) => 1,
                _ => return Err(bad()),
            };
            index = (index << 1) | bit;
        }
        Ok(index)
    }
}

/// Normalized amplitude vector tagged with its [`Layout`].
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    amplitudes: DVector<Complex64>,
    layout: Layout,
}

impl PureState {
    /// Wraps amplitudes that must already be unit norm.
    pub fn new(amplitudes: DVector<Complex64>, layout: Layout) -> Result<Self> {
        check_size(&amplitudes, layout)?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > CONSTRUCTION_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self { amplitudes, layout })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(amplitudes: DVector<Complex64>, layout: Layout) -> Result<Self> {
        check_size(&amplitudes, layout)?;
        let norm = amplitudes.norm();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::NotNormalized(norm));
        }
        Ok(Self {
            amplitudes: amplitudes.unscale(norm),
            layout,
        })
    }

    pub fn from_slice(amplitudes: &[Complex64], layout: Layout) -> Result<Self> {
        Self::normalized(DVector::from_column_slice(amplitudes), layout)
    }

    /// Computational basis state.
    pub fn basis(layout: Layout, index: usize) -> Result<Self> {
        if layout.subsystems() > MAX_SUBSYSTEMS {
            return Err(Error::TooLarge(layout.subsystems()));
        }
        let dim = layout.dim();
        if index >= dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: index + 1,
            });
        }
        let mut amplitudes = DVector::zeros(dim);
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amplitudes, layout })
    }

    /// Basis state from a ket string such as `"egge"`.
    pub fn from_label(layout: Layout, label: &str) -> Result<Self> {
        Self::basis(layout, layout.index(label)?)
    }

    /// Logical `|1̃⟩`.
    pub fn one() -> Self {
        Self::basis(Layout::logical(1), 0).unwrap()
    }

    /// Logical `|0̃⟩`.
    pub fn zero() -> Self {
        Self::basis(Layout::logical(1), 1).unwrap()
    }

    pub fn amplitudes(&self) -> &DVector<Complex64> {
        &self.amplitudes
    }

    pub fn amplitude(&self, index: usize) -> Complex64 {
        self.amplitudes[index]
    }

    pub fn layout(&self) -> Layout {
        self.layout
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &PureState) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: other.dim(),
            });
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Multiplies by `e^{iφ}`.
    pub fn with_global_phase(&self, phi: f64) -> Self {
        Self {
            amplitudes: self.amplitudes.map(|a| a * Complex64::from_polar(1.0, phi)),
            layout: self.layout,
        }
    }

    /// Largest elementwise difference, used for exact-amplitude comparisons.
    pub fn max_abs_diff(&self, other: &PureState) -> f64 {
        self.amplitudes
            .iter()
            .zip(other.amplitudes.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub(crate) fn from_parts(amplitudes: DVector<Complex64>, layout: Layout) -> Self {
        debug_assert_eq!(amplitudes.len(), layout.dim());
        Self { amplitudes, layout }
    }
}

fn check_size(amplitudes: &DVector<Complex64>, layout: Layout) -> Result<()> {
    if layout.subsystems() > MAX_SUBSYSTEMS {
        return Err(Error::TooLarge(layout.subsystems()));
    }
    if amplitudes.len() != layout.dim() {
        return Err(Error::DimensionMismatch {
            expected: layout.dim(),
            found: amplitudes.len(),
        });
    }
    Ok(())
}

/// Kronecker product `a ⊗ b`; `a` occupies the most significant subsystems.
pub fn tensor(a: &PureState, b: &PureState) -> Result<PureState> {
    let layout = match (a.layout, b.layout) {
        (Layout::Logical { pairs: x }, Layout::Logical { pairs: y }) => Layout::logical(x + y),
        (Layout::Physical { ions: x }, Layout::Physical { ions: y }) => Layout::physical(x + y),
        (x, y) => {
            return Err(Error::LayoutMismatch(format!(
                "cannot tensor {x:?} with {y:?}"
            )))
        }
    };
    if layout.subsystems() > MAX_SUBSYSTEMS {
        return Err(Error::TooLarge(layout.subsystems()));
    }
    let amplitudes = a.amplitudes.kronecker(&b.amplitudes);
    Ok(PureState::from_parts(amplitudes, layout))
}

/// `|⟨a|b⟩|²`.
pub fn fidelity(a: &PureState, b: &PureState) -> Result<f64> {
    Ok(a.inner(b)?.norm_sqr().min(1.0))
}

/// Physical index of the ion pair string encoding a logical index.
fn encode_index(logical: usize, pairs: usize) -> usize {
    let mut physical = 0usize;
    for q in 0..pairs {
        let bit = (logical >> (pairs - 1 - q)) & 1;
        // |1̃⟩ = |eg⟩ -> ion bits (0, 1); |0̃⟩ = |ge⟩ -> (1, 0)
        physical = (physical << 2) | (bit << 1) | (1 - bit);
    }
    physical
}

/// Maps `|1̃⟩ ↦ |eg⟩`, `|0̃⟩ ↦ |ge⟩` pair by pair.
pub fn embed_logical_to_physical(s: &PureState) -> Result<PureState> {
    let Layout::Logical { pairs } = s.layout else {
        return Err(Error::LayoutMismatch(
            "embedding expects a logical state".into(),
        ));
    };
    let ions = 2 * pairs;
    if ions > MAX_SUBSYSTEMS {
        return Err(Error::TooLarge(ions));
    }
    let mut amplitudes = DVector::zeros(1 << ions);
    for (k, a) in s.amplitudes.iter().enumerate() {
        amplitudes[encode_index(k, pairs)] = *a;
    }
    Ok(PureState::from_parts(amplitudes, Layout::physical(ions)))
}

/// Inverse of [`embed_logical_to_physical`]. Fails if more than
/// [`crate::PIPELINE_TOL`] of the probability sits on `|ee⟩`/`|gg⟩` sectors.
pub fn project_physical_to_logical(s: &PureState) -> Result<PureState> {
    let Layout::Physical { ions } = s.layout else {
        return Err(Error::LayoutMismatch(
            "projection expects a physical state".into(),
        ));
    };
    if ions % 2 != 0 {
        return Err(Error::LayoutMismatch(format!(
            "{ions} ions do not form pairs"
        )));
    }
    let pairs = ions / 2;
    let amplitudes =
        DVector::from_iterator(1 << pairs, (0..1 << pairs).map(|k| s.amplitudes[encode_index(k, pairs)]));
    let outside = (1.0 - amplitudes.norm_squared()).max(0.0);
    if outside > crate::PIPELINE_TOL {
        return Err(Error::OutsideCodeSpace(outside));
    }
    PureState::normalized(amplitudes, Layout::logical(pairs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn tensor_of_basis_states() {
        let s = tensor(&PureState::one(), &PureState::one()).unwrap();
        assert_eq!(s.dim(), 4);
        assert_eq!(s.amplitude(0), c(1.0, 0.0));

        let s = tensor(&PureState::zero(), &PureState::one()).unwrap();
        assert_eq!(s.amplitude(2), c(1.0, 0.0));
        assert_eq!(s.layout(), Layout::logical(2));
    }

    #[test]
    fn tensor_is_linear() {
        let plus = PureState::from_slice(&[c(1.0, 0.0), c(1.0, 0.0)], Layout::logical(1)).unwrap();
        let s = tensor(&plus, &PureState::one()).unwrap();
        let expected = [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2, 0.0];
        for (a, e) in s.amplitudes().iter().zip(expected) {
            assert!((a - c(e, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn tensor_rejects_mixed_layouts() {
        let ion = PureState::basis(Layout::physical(1), 0).unwrap();
        assert!(matches!(
            tensor(&PureState::one(), &ion),
            Err(Error::LayoutMismatch(_))
        ));
    }

    #[test]
    fn construction_checks_norm_and_size() {
        let v = DVector::from_vec(vec![c(1.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            PureState::new(v.clone(), Layout::logical(1)),
            Err(Error::NotNormalized(_))
        ));
        assert!(matches!(
            PureState::new(v, Layout::logical(2)),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(PureState::normalized(DVector::zeros(2), Layout::logical(1)).is_err());
    }

    #[test]
    fn fidelity_basics() {
        let s = PureState::from_slice(&[c(0.6, 0.0), c(0.0, 0.8)], Layout::logical(1)).unwrap();
        assert!((fidelity(&s, &s).unwrap() - 1.0).abs() < 1e-15);
        assert!((fidelity(&s, &s.with_global_phase(1.234)).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(fidelity(&PureState::one(), &PureState::zero()).unwrap(), 0.0);
        let pair = PureState::basis(Layout::logical(2), 0).unwrap();
        assert!(fidelity(&s, &pair).is_err());
    }

    #[test]
    fn labels_follow_convention() {
        let two = Layout::logical(2);
        let names: Vec<String> = (0..4).map(|k| two.label(k)).collect();
        assert_eq!(names, ["egeg", "egge", "geeg", "gege"]);
        assert_eq!(Layout::physical(3).label(0b010), "ege");
        assert_eq!(two.index("geeg").unwrap(), 2);
        assert!(two.index("eeee").is_err());
        assert!(two.index("eg").is_err());
    }

    #[test]
    fn label_round_trip_up_to_twelve_subsystems() {
        for n in 0..=MAX_SUBSYSTEMS {
            for layout in [Layout::logical(n), Layout::physical(n)] {
                for k in 0..layout.dim() {
                    assert_eq!(layout.index(&layout.label(k)).unwrap(), k);
                }
            }
        }
    }

    #[test]
    fn embedding_matches_pair_encoding() {
        let phys = embed_logical_to_physical(&PureState::one()).unwrap();
        assert_eq!(phys, PureState::from_label(Layout::physical(2), "eg").unwrap());

        let theta = 0.73;
        let psi = PureState::from_slice(
            &[c(1.0, 0.0), Complex64::from_polar(1.0, theta)],
            Layout::logical(1),
        )
        .unwrap();
        let phys = embed_logical_to_physical(&psi).unwrap();
        let ions = Layout::physical(2);
        assert!((phys.amplitude(ions.index("eg").unwrap()) - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!(
            (phys.amplitude(ions.index("ge").unwrap()) - Complex64::from_polar(FRAC_1_SQRT_2, theta)).norm()
                < 1e-15
        );
        assert_eq!(phys.amplitude(ions.index("ee").unwrap()), c(0.0, 0.0));
        assert_eq!(phys.amplitude(ions.index("gg").unwrap()), c(0.0, 0.0));

        let s = PureState::from_label(Layout::logical(2), "egge").unwrap();
        let phys = embed_logical_to_physical(&s).unwrap();
        assert_eq!(phys, PureState::from_label(Layout::physical(4), "egge").unwrap());
    }

    #[test]
    fn embedding_rejects_physical_input() {
        let s = PureState::basis(Layout::physical(2), 1).unwrap();
        assert!(embed_logical_to_physical(&s).is_err());
        assert!(project_physical_to_logical(&PureState::one()).is_err());
    }

    #[test]
    fn projection_rejects_leakage() {
        let s = PureState::from_label(Layout::physical(2), "ee").unwrap();
        assert!(matches!(
            project_physical_to_logical(&s),
            Err(Error::OutsideCodeSpace(_))
        ));
    }
}
