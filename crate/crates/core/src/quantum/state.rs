use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::mode::{check_distinct, strides, total_dim};
use super::{BasisLabel, Mode, ModeKind, ModeOperator, ALGEBRA_TOL};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BellSign {
    Plus,
    Minus,
}

/// Pure state over an ordered list of modes.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    modes: Vec<Mode>,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Builds a normalized state; fails if the amplitude count or norm is off.
    pub fn new(modes: Vec<Mode>, amplitudes: Vec<Complex64>) -> Result<Self> {
        let state = Self::from_parts(modes, amplitudes)?;
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::NotNormalized(norm));
        }
        Ok(state)
    }

    /// Same as [`StateVector::new`] but without the norm check. Used for
    /// projected branches and for deliberately perturbed operators.
    pub(crate) fn from_parts(modes: Vec<Mode>, amplitudes: Vec<Complex64>) -> Result<Self> {
        check_distinct(&modes)?;
        let dim = total_dim(&modes);
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                actual: amplitudes.len(),
            });
        }
        Ok(StateVector { modes, amplitudes })
    }

    /// Product basis state with amplitude one on `labels`.
    pub fn basis(modes: Vec<Mode>, labels: &[BasisLabel]) -> Result<Self> {
        if labels.len() != modes.len() {
            return Err(Error::DimensionMismatch {
                expected: modes.len(),
                actual: labels.len(),
            });
        }
        let strides = strides(&modes);
        let mut index = 0;
        for ((mode, &label), stride) in modes.iter().zip(labels).zip(&strides) {
            index += mode.index_of(label)? * stride;
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); total_dim(&modes)];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Self::from_parts(modes, amplitudes)
    }

    /// Single-mode basis state.
    pub fn single(mode: Mode, label: BasisLabel) -> Result<Self> {
        Self::basis(vec![mode], &[label])
    }

    /// `|Ψ±⟩ = (|0⟩_a|1⟩_b ± |1⟩_a|0⟩_b)/√2` with `a` a qubit and `b` a photon mode.
    pub fn bell(sign: BellSign, mode_a: &str, mode_b: &str) -> Result<Self> {
        let modes = vec![Mode::qubit(mode_a), Mode::photon(mode_b)];
        let s = match sign {
            BellSign::Plus => 1.0,
            BellSign::Minus => -1.0,
        };
        let mut state = Self::basis(modes, &[BasisLabel::Zero, BasisLabel::One])?;
        let strides = strides(&state.modes);
        let i01 = state.modes[1].index_of(BasisLabel::One)?;
        let i10 = strides[0] + state.modes[1].index_of(BasisLabel::Zero)?;
        state.amplitudes[i01] = Complex64::new(FRAC_1_SQRT_2, 0.0);
        state.amplitudes[i10] = Complex64::new(s * FRAC_1_SQRT_2, 0.0);
        Ok(state)
    }

    pub fn modes(&self) -> &[Mode] {
        &self.modes
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn position(&self, name: &str) -> Result<usize> {
        self.modes
            .iter()
            .position(|m| m.name == name)
            .ok_or_else(|| Error::UnknownMode(name.to_string()))
    }

    pub fn mode(&self, name: &str) -> Result<&Mode> {
        self.position(name).map(|i| &self.modes[i])
    }

    /// Amplitude of the product basis configuration `labels` (in mode order).
    pub fn amplitude(&self, labels: &[BasisLabel]) -> Result<Complex64> {
        if labels.len() != self.modes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.modes.len(),
                actual: labels.len(),
            });
        }
        let strides = strides(&self.modes);
        let mut index = 0;
        for ((mode, &label), stride) in self.modes.iter().zip(labels).zip(&strides) {
            index += mode.index_of(label)? * stride;
        }
        Ok(self.amplitudes[index])
    }

    /// Tensor product; `self`'s modes come first.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        if let Some(m) = other
            .modes
            .iter()
            .find(|m| self.modes.iter().any(|s| s.name == m.name))
        {
            return Err(Error::ModeCollision(format!(
                "mode `{}` present in both factors",
                m.name
            )));
        }
        let modes = self.modes.iter().chain(&other.modes).cloned().collect();
        let amplitudes = self
            .amplitudes
            .iter()
            .flat_map(|a| other.amplitudes.iter().map(move |b| a * b))
            .collect();
        Self::from_parts(modes, amplitudes)
    }

    /// Hermitian inner product `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.modes != other.modes {
            return Err(Error::ModeCollision(
                "inner product of different mode layouts".into(),
            ));
        }
        Ok(self
            .amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Applies `op` on its target modes, identity elsewhere.
    pub fn apply(&self, op: &ModeOperator) -> Result<StateVector> {
        let positions = self.target_positions(op.targets())?;
        let full_strides = strides(&self.modes);
        let target_modes: Vec<Mode> = positions.iter().map(|&p| self.modes[p].clone()).collect();
        let target_dim = total_dim(&target_modes);
        let target_strides = strides(&target_modes);

        // offsets[c]: displacement in the full index of target configuration c.
        let offsets: Vec<usize> = (0..target_dim)
            .map(|c| {
                positions
                    .iter()
                    .zip(&target_strides)
                    .zip(&target_modes)
                    .map(|((&p, &ts), m)| (c / ts) % m.kind.dim() * full_strides[p])
                    .sum()
            })
            .collect();

        let matrix = op.matrix();
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, slot) in out.iter_mut().enumerate() {
            let row: usize = positions
                .iter()
                .zip(&target_strides)
                .zip(&target_modes)
                .map(|((&p, &ts), m)| (i / full_strides[p]) % m.kind.dim() * ts)
                .sum();
            let base = i - offsets[row];
            *slot = offsets
                .iter()
                .enumerate()
                .map(|(c, off)| matrix[(row, c)] * self.amplitudes[base + off])
                .sum();
        }
        Self::from_parts(self.modes.clone(), out)
    }

    /// Positions of `targets` in this state, checking names and kinds.
    pub(crate) fn target_positions(&self, targets: &[Mode]) -> Result<Vec<usize>> {
        targets
            .iter()
            .map(|t| {
                let p = self.position(&t.name)?;
                if self.modes[p].kind != t.kind {
                    return Err(Error::WrongModeKind {
                        mode: t.name.clone(),
                        expected: t.kind.name(),
                    });
                }
                Ok(p)
            })
            .collect()
    }

    pub(crate) fn scaled(&self, factor: f64) -> StateVector {
        StateVector {
            modes: self.modes.clone(),
            amplitudes: self.amplitudes.iter().map(|a| a * factor).collect(),
        }
    }

    pub(crate) fn sub(&self, other: &StateVector) -> StateVector {
        StateVector {
            modes: self.modes.clone(),
            amplitudes: self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest amplitude difference to `other` after removing the best global
    /// phase. Returns `f64::INFINITY` for different layouts.
    pub fn distance_up_to_phase(&self, other: &StateVector) -> f64 {
        let Ok(overlap) = self.inner(other) else {
            return f64::INFINITY;
        };
        // phase such that other ≈ phase · self
        let phase = if overlap.norm() > 0.0 {
            overlap / overlap.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a * phase - b).norm())
            .fold(0.0, f64::max)
    }

    /// Largest amplitude difference to `other`, phases included.
    pub fn distance(&self, other: &StateVector) -> f64 {
        if self.modes != other.modes {
            return f64::INFINITY;
        }
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Reorders modes to `order` (a permutation of the current mode names).
    pub fn permuted(&self, order: &[&str]) -> Result<StateVector> {
        if order.len() != self.modes.len() {
            return Err(Error::DimensionMismatch {
                expected: self.modes.len(),
                actual: order.len(),
            });
        }
        let positions: Vec<usize> = order
            .iter()
            .map(|n| self.position(n))
            .collect::<Result<_>>()?;
        let modes: Vec<Mode> = positions.iter().map(|&p| self.modes[p].clone()).collect();
        check_distinct(&modes)?;
        let old_strides = strides(&self.modes);
        let new_strides = strides(&modes);
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); self.dim()];
        for (i, a) in amplitudes.iter_mut().enumerate() {
            let old: usize = positions
                .iter()
                .zip(&new_strides)
                .zip(&modes)
                .map(|((&p, &ns), m)| (i / ns) % m.kind.dim() * old_strides[p])
                .sum();
            *a = self.amplitudes[old];
        }
        Self::from_parts(modes, amplitudes)
    }

    /// Whether the state is in the layout `[(name, kind)]` order.
    pub fn has_layout(&self, layout: &[(&str, ModeKind)]) -> bool {
        self.modes.len() == layout.len()
            && self
                .modes
                .iter()
                .zip(layout)
                .all(|(m, (n, k))| m.name == *n && m.kind == *k)
    }
}
