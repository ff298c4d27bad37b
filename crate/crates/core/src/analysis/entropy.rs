use std::collections::BTreeMap;

use crate::{Error, Result};

/// Shannon binary entropy in bits, with `0·log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::bad_param("x", x, "binary entropy needs 0 <= x <= 1"));
    }
    Ok(h2(x))
}

/// `1 − H(q)` without cancellation near `q = 1/2`.
pub(crate) fn one_minus_h2(q: f64) -> f64 {
    let d = 1.0 - 2.0 * q;
    let term = |y: f64| {
        if y == 0.0 || y <= -1.0 {
            0.0
        } else {
            (1.0 + y) * y.ln_1p()
        }
    };
    ((term(d) + term(-d)) / (2.0 * std::f64::consts::LN_2)).max(0.0)
}

pub(crate) fn h2(x: f64) -> f64 {
    xlog2(x) + xlog2(1.0 - x)
}

fn xlog2(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// Contingency table of two discrete variables.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JointCounts<X: Ord, Y: Ord> {
    cells: BTreeMap<(X, Y), u64>,
}

impl<X: Ord, Y: Ord> Default for JointCounts<X, Y> {
    fn default() -> Self {
        JointCounts {
            cells: BTreeMap::new(),
        }
    }
}

impl<X: Ord + Clone, Y: Ord + Clone> JointCounts<X, Y> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, x: X, y: Y) {
        *self.cells.entry((x, y)).or_insert(0) += 1;
    }

    pub fn add_count(&mut self, x: X, y: Y, count: u64) {
        *self.cells.entry((x, y)).or_insert(0) += count;
    }

    pub fn total(&self) -> u64 {
        self.cells.values().sum()
    }

    pub fn cells(&self) -> &BTreeMap<(X, Y), u64> {
        &self.cells
    }

    /// The same table with the roles of the variables exchanged.
    pub fn transposed(&self) -> JointCounts<Y, X> {
        JointCounts {
            cells: self
                .cells
                .iter()
                .map(|((x, y), &c)| ((y.clone(), x.clone()), c))
                .collect(),
        }
    }

    /// Plug-in mutual information of the table, in bits.
    pub fn mutual_information(&self) -> Result<f64> {
        plugin_mutual_information(&self.cells)
    }
}

impl<X: Ord + Clone, Y: Ord + Clone> FromIterator<(X, Y)> for JointCounts<X, Y> {
    fn from_iter<I: IntoIterator<Item = (X, Y)>>(iter: I) -> Self {
        let mut t = JointCounts::new();
        for (x, y) in iter {
            t.add(x, y);
        }
        t
    }
}

/// `Σ p̂(x,y) log2[p̂(x,y) / (p̂(x) p̂(y))]` over the observed cells.
pub fn plugin_mutual_information<X: Ord + Clone, Y: Ord + Clone>(
    joint_counts: &BTreeMap<(X, Y), u64>,
) -> Result<f64> {
    let total: u64 = joint_counts.values().sum();
    if total == 0 {
        return Err(Error::bad_param(
            "joint_counts",
            0.0,
            "total count must be positive",
        ));
    }
    let n = total as f64;
    let mut px: BTreeMap<X, u64> = BTreeMap::new();
    let mut py: BTreeMap<Y, u64> = BTreeMap::new();
    for ((x, y), &c) in joint_counts {
        *px.entry(x.clone()).or_insert(0) += c;
        *py.entry(y.clone()).or_insert(0) += c;
    }
    let mi: f64 = joint_counts
        .iter()
        .filter(|(_, &c)| c > 0)
        .map(|((x, y), &c)| {
            let pxy = c as f64 / n;
            let ratio = (c as f64 * n) / (px[x] as f64 * py[y] as f64);
            pxy * ratio.log2()
        })
        .sum();
    // rounding can leave tiny negative residues on independent tables
    Ok(mi.max(0.0))
}
