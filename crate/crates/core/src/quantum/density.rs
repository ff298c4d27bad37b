use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use super::{Mode, ModeOperator, OperatorKind, StateVector, ALGEBRA_TOL};
use crate::{Error, Result};

/// Mixed state over an ordered list of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    modes: Vec<Mode>,
    entries: DMatrix<Complex64>,
}

impl DensityMatrix {
    pub fn pure(state: &StateVector) -> Self {
        let v = DVector::from_column_slice(state.amplitudes());
        DensityMatrix {
            modes: state.modes().to_vec(),
            entries: &v * v.adjoint(),
        }
    }

    /// `Σ w_i |ψ_i⟩⟨ψ_i|` for non-negative weights summing to one.
    pub fn from_mixture(terms: &[(f64, StateVector)]) -> Result<Self> {
        let Some((_, first)) = terms.first() else {
            return Err(Error::BadMixture("no terms".into()));
        };
        if let Some((w, _)) = terms.iter().find(|(w, _)| w.is_nan() || *w < 0.0) {
            return Err(Error::BadMixture(format!("negative weight {w}")));
        }
        let total: f64 = terms.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::BadMixture(format!("weights sum to {total}")));
        }
        let mut rho = DensityMatrix {
            modes: first.modes().to_vec(),
            entries: DMatrix::zeros(first.dim(), first.dim()),
        };
        for (w, state) in terms {
            if state.modes() != rho.modes.as_slice() {
                return Err(Error::ModeCollision(
                    "mixture terms have different layouts".into(),
                ));
            }
            rho.entries += DensityMatrix::pure(state).entries * Complex64::new(*w, 0.0);
        }
        Ok(rho)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn trace(&self) -> Complex64 {
        self.entries.trace()
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint())
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.entries
            .clone()
            .symmetric_eigenvalues()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min)
    }

    /// `ρ ⊗ σ`.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if let Some(m) = other.modes.iter().find(|m| self.modes.contains(m)) {
            return Err(Error::ModeCollision(format!(
                "mode `{}` present in both factors",
                m.name
            )));
        }
        Ok(DensityMatrix {
            modes: self.modes.iter().chain(&other.modes).cloned().collect(),
            entries: self.entries.kronecker(&other.entries),
        })
    }

    /// `U ρ U†` with `U` acting on a subset of the modes.
    pub fn conjugate(&self, op: &ModeOperator) -> Result<DensityMatrix> {
        if op.kind() != OperatorKind::Unitary {
            return Err(Error::NotUnitary(f64::NAN));
        }
        let err = op.unitarity_error();
        if err > ALGEBRA_TOL {
            return Err(Error::NotUnitary(err));
        }
        let u = op.embed(&self.modes)?;
        Ok(DensityMatrix {
            modes: self.modes.clone(),
            entries: u.matrix() * &self.entries * u.matrix().adjoint(),
        })
    }

    /// `Tr(ρ A)` for a Hermitian `A` on a subset of the modes.
    pub fn expectation(&self, obs: &ModeOperator) -> Result<f64> {
        let err = obs.hermiticity_error();
        if obs.kind() != OperatorKind::Observable || err > ALGEBRA_TOL {
            return Err(Error::NotObservable(err));
        }
        let a = obs.embed(&self.modes)?;
        Ok((&self.entries * a.matrix()).trace().re)
    }
}
