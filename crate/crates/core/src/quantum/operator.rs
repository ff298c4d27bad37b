use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mode::{check_distinct, total_dim};
use super::{BasisLabel, Mode, ModeKind, StateVector, ALGEBRA_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OperatorKind {
    Unitary,
    Observable,
}

/// A dense operator acting on the joint space of its target modes.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeOperator {
    targets: Vec<Mode>,
    matrix: DMatrix<Complex64>,
    kind: OperatorKind,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

impl ModeOperator {
    /// Validated constructor: unitaries must satisfy `U†U = I` and observables
    /// must be Hermitian, both to [`ALGEBRA_TOL`].
    pub fn new(targets: Vec<Mode>, matrix: DMatrix<Complex64>, kind: OperatorKind) -> Result<Self> {
        let op = Self::from_matrix_unchecked(targets, matrix, kind)?;
        match kind {
            OperatorKind::Unitary => {
                let err = op.unitarity_error();
                if err > ALGEBRA_TOL {
                    return Err(Error::NotUnitary(err));
                }
            }
            OperatorKind::Observable => {
                let err = op.hermiticity_error();
                if err > ALGEBRA_TOL {
                    return Err(Error::NotObservable(err));
                }
            }
        }
        Ok(op)
    }

    /// Checks only the shape. Lets callers build deliberately faulty
    /// operators, e.g. for negative controls of the unitarity checks.
    pub fn from_matrix_unchecked(
        targets: Vec<Mode>,
        matrix: DMatrix<Complex64>,
        kind: OperatorKind,
    ) -> Result<Self> {
        check_distinct(&targets)?;
        let dim = total_dim(&targets);
        if matrix.nrows() != dim || matrix.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: matrix.nrows().max(matrix.ncols()),
            });
        }
        Ok(ModeOperator {
            targets,
            matrix,
            kind,
        })
    }

    pub fn identity(targets: Vec<Mode>) -> Result<Self> {
        let dim = total_dim(&targets);
        Self::new(targets, DMatrix::identity(dim, dim), OperatorKind::Unitary)
    }

    /// Phase flip `Z^q`: `|1⟩ → −|1⟩`, `|0⟩` and `|vac⟩` unchanged.
    pub fn z_pow(mode: Mode, q: bool) -> Self {
        let dim = mode.kind.dim();
        let mut m = DMatrix::identity(dim, dim);
        if q {
            let one = mode
                .kind
                .index_of(BasisLabel::One)
                .expect("every kind has |1⟩");
            m[(one, one)] = -ONE;
        }
        Self::known_unitary(vec![mode], m)
    }

    /// Polarization flip `X^t`: `|0⟩ ↔ |1⟩`, `|vac⟩` unchanged.
    pub fn x_pow(mode: Mode, t: bool) -> Self {
        let dim = mode.kind.dim();
        let mut m = DMatrix::identity(dim, dim);
        if t {
            let zero = mode
                .kind
                .index_of(BasisLabel::Zero)
                .expect("every kind has |0⟩");
            let one = mode
                .kind
                .index_of(BasisLabel::One)
                .expect("every kind has |1⟩");
            m[(zero, zero)] = ZERO;
            m[(one, one)] = ZERO;
            m[(zero, one)] = ONE;
            m[(one, zero)] = ONE;
        }
        Self::known_unitary(vec![mode], m)
    }

    /// Exchanges the full contents of two photon modes.
    pub fn swap(b: &str, e: &str) -> Self {
        let mut m = DMatrix::zeros(9, 9);
        for x in 0..3 {
            for y in 0..3 {
                m[(3 * y + x, 3 * x + y)] = ONE;
            }
        }
        Self::known_unitary(vec![Mode::photon(b), Mode::photon(e)], m)
    }

    /// Eve's entangling operation on two photon modes `(b, e)`:
    ///
    /// ```text
    /// V |vac⟩_b|s⟩_e = (−i/√2)(|0⟩_b|vac⟩_e + (−1)^s |vac⟩_b|1⟩_e),  s ∈ {0, 1}
    /// V |0⟩_b|vac⟩_e = |vac⟩_b|0⟩_e
    /// ```
    ///
    /// and identity on the remaining six basis states. The third line is the
    /// only completion (up to a phase) that keeps V block diagonal on
    /// `span{|vac,0⟩, |vac,1⟩, |0,vac⟩}`.
    pub fn v(b: &str, e: &str) -> Self {
        const VAC: usize = 0;
        const H: usize = 1;
        const V: usize = 2;
        let idx = |b: usize, e: usize| 3 * b + e;
        let amp = Complex64::new(0.0, -FRAC_1_SQRT_2);

        let mut m = DMatrix::identity(9, 9);
        for col in [idx(VAC, H), idx(VAC, V), idx(H, VAC)] {
            m[(col, col)] = ZERO;
        }
        m[(idx(H, VAC), idx(VAC, H))] = amp;
        m[(idx(VAC, V), idx(VAC, H))] = amp;
        m[(idx(H, VAC), idx(VAC, V))] = amp;
        m[(idx(VAC, V), idx(VAC, V))] = -amp;
        m[(idx(VAC, H), idx(H, VAC))] = ONE;
        Self::known_unitary(vec![Mode::photon(b), Mode::photon(e)], m)
    }

    /// Exchanges `|vac⟩` and `|label⟩` on a photon mode. Acting on an empty
    /// mode it places a fresh photon in state `label`.
    pub fn vacuum_exchange(mode: &str, label: BasisLabel) -> Self {
        let mut m = DMatrix::identity(3, 3);
        let i = ModeKind::Photon
            .index_of(label)
            .expect("photon has all labels");
        if i != 0 {
            m[(0, 0)] = ZERO;
            m[(i, i)] = ZERO;
            m[(0, i)] = ONE;
            m[(i, 0)] = ONE;
        }
        Self::known_unitary(vec![Mode::photon(mode)], m)
    }

    /// Parity observable `R = |00⟩⟨00| + |11⟩⟨11|` on a qubit `a` and photon `b`.
    /// It has no support on the vacuum of `b`.
    pub fn parity(a: &str, b: &str) -> Self {
        let mut m = DMatrix::zeros(6, 6);
        // (a, b) index = 3·a + b_index, with b_index(0) = 1, b_index(1) = 2
        m[(1, 1)] = ONE;
        m[(5, 5)] = ONE;
        ModeOperator {
            targets: vec![Mode::qubit(a), Mode::photon(b)],
            matrix: m,
            kind: OperatorKind::Observable,
        }
    }

    /// Rank-one projector `|ψ⟩⟨ψ|` over the modes of `state`.
    pub fn projector(state: &StateVector) -> Self {
        let v = nalgebra::DVector::from_column_slice(state.amplitudes());
        ModeOperator {
            targets: state.modes().to_vec(),
            matrix: &v * v.adjoint(),
            kind: OperatorKind::Observable,
        }
    }

    fn known_unitary(targets: Vec<Mode>, matrix: DMatrix<Complex64>) -> Self {
        debug_assert!((matrix.adjoint() * &matrix
            - DMatrix::<Complex64>::identity(matrix.nrows(), matrix.ncols()))
        .iter()
        .all(|z| z.norm() < ALGEBRA_TOL));
        ModeOperator {
            targets,
            matrix,
            kind: OperatorKind::Unitary,
        }
    }

    pub fn targets(&self) -> &[Mode] {
        &self.targets
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// `max |(U†U − I)_ij|`.
    pub fn unitarity_error(&self) -> f64 {
        let n = self.matrix.nrows();
        (self.matrix.adjoint() * &self.matrix - DMatrix::<Complex64>::identity(n, n))
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// `max |(A − A†)_ij|`.
    pub fn hermiticity_error(&self) -> f64 {
        (&self.matrix - self.matrix.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    /// Conjugate transpose of a unitary.
    pub fn dagger(&self) -> Result<ModeOperator> {
        let err = self.unitarity_error();
        if self.kind != OperatorKind::Unitary || err > ALGEBRA_TOL {
            return Err(Error::NotUnitary(err));
        }
        Ok(ModeOperator {
            targets: self.targets.clone(),
            matrix: self.matrix.adjoint(),
            kind: OperatorKind::Unitary,
        })
    }

    /// The same operator on a larger mode layout (identity on the extra modes).
    pub fn embed(&self, layout: &[Mode]) -> Result<ModeOperator> {
        let dim = total_dim(layout);
        let mut matrix = DMatrix::zeros(dim, dim);
        let mut basis = vec![ZERO; dim];
        for col in 0..dim {
            basis[col] = ONE;
            let input = StateVector::from_parts(layout.to_vec(), basis.clone())?;
            let image = input.apply(self)?;
            for (row, a) in image.amplitudes().iter().enumerate() {
                matrix[(row, col)] = *a;
            }
            basis[col] = ZERO;
        }
        Self::from_matrix_unchecked(layout.to_vec(), matrix, self.kind)
    }

    /// Product `self · first` (apply `first`, then `self`) on the union of
    /// both target lists.
    pub fn after(&self, first: &ModeOperator) -> Result<ModeOperator> {
        let mut layout = self.targets.clone();
        for m in &first.targets {
            match layout.iter().find(|l| l.name == m.name) {
                Some(l) if l.kind != m.kind => {
                    return Err(Error::WrongModeKind {
                        mode: m.name.clone(),
                        expected: l.kind.name(),
                    })
                }
                Some(_) => {}
                None => layout.push(m.clone()),
            }
        }
        let outer = self.embed(&layout)?;
        let inner = first.embed(&layout)?;
        let kind = match (self.kind, first.kind) {
            (OperatorKind::Unitary, OperatorKind::Unitary) => OperatorKind::Unitary,
            _ => return Err(Error::NotUnitary(f64::NAN)),
        };
        Self::from_matrix_unchecked(layout, outer.matrix * inner.matrix, kind)
    }
}
