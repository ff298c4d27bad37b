use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeKind {
    /// Polarization qubit, basis `[0, 1]`.
    Qubit,
    /// Spatial mode with vacuum, basis `[VAC, 0, 1]`.
    Photon,
}

/// Computational basis label of a single mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BasisLabel {
    Vac,
    /// Horizontally polarized photon.
    Zero,
    /// Vertically polarized photon.
    One,
}

impl BasisLabel {
    pub fn from_bit(bit: bool) -> Self {
        if bit {
            BasisLabel::One
        } else {
            BasisLabel::Zero
        }
    }

    /// Polarization bit carried by the label, `None` for vacuum.
    pub fn bit(self) -> Option<bool> {
        match self {
            BasisLabel::Vac => None,
            BasisLabel::Zero => Some(false),
            BasisLabel::One => Some(true),
        }
    }
}

impl fmt::Display for BasisLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BasisLabel::Vac => "vac",
            BasisLabel::Zero => "0",
            BasisLabel::One => "1",
        })
    }
}

impl ModeKind {
    pub const fn dim(self) -> usize {
        match self {
            ModeKind::Qubit => 2,
            ModeKind::Photon => 3,
        }
    }

    /// Basis labels in matrix-index order.
    pub fn labels(self) -> &'static [BasisLabel] {
        match self {
            ModeKind::Qubit => &[BasisLabel::Zero, BasisLabel::One],
            ModeKind::Photon => &[BasisLabel::Vac, BasisLabel::Zero, BasisLabel::One],
        }
    }

    pub fn index_of(self, label: BasisLabel) -> Option<usize> {
        self.labels().iter().position(|&l| l == label)
    }

    pub(crate) fn name(self) -> &'static str {
        match self {
            ModeKind::Qubit => "qubit",
            ModeKind::Photon => "photon",
        }
    }
}

/// A named mode of a multi-mode state.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mode {
    pub name: String,
    pub kind: ModeKind,
}

impl Mode {
    pub fn new(name: impl Into<String>, kind: ModeKind) -> Self {
        Mode {
            name: name.into(),
            kind,
        }
    }

    pub fn qubit(name: impl Into<String>) -> Self {
        Mode::new(name, ModeKind::Qubit)
    }

    pub fn photon(name: impl Into<String>) -> Self {
        Mode::new(name, ModeKind::Photon)
    }

    pub fn index_of(&self, label: BasisLabel) -> Result<usize> {
        self.kind
            .index_of(label)
            .ok_or_else(|| Error::InvalidBasisLabel {
                mode: self.name.clone(),
                label: label.to_string(),
            })
    }
}

/// Row-major layout helpers shared by states, operators and density matrices.
pub(crate) fn total_dim(modes: &[Mode]) -> usize {
    modes.iter().map(|m| m.kind.dim()).product()
}

pub(crate) fn strides(modes: &[Mode]) -> Vec<usize> {
    let mut strides = vec![1; modes.len()];
    for i in (0..modes.len().saturating_sub(1)).rev() {
        strides[i] = strides[i + 1] * modes[i + 1].kind.dim();
    }
    strides
}

pub(crate) fn check_distinct(modes: &[Mode]) -> Result<()> {
    for (i, m) in modes.iter().enumerate() {
        if modes[..i].iter().any(|o| o.name == m.name) {
            return Err(Error::ModeCollision(format!("duplicate mode `{}`", m.name)));
        }
    }
    Ok(())
}
