//! Block decomposition of `rho^{(x)N}` for a qubit with Bloch length `r`.
//!
//! Within the spin-`l` block the state is diagonal in the eigenbasis of the
//! spin component along the Bloch axis, with weights
//!
//! ```text
//! w_{l,m} = (r+ r-)^{N/2 - l} r+^{l+m} r-^{l-m},    r± = (1 ± r)/2,
//! ```
//!
//! repeated `d_l` times. The factored form has no singularity at `r = 1`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spin::{check_bloch_length, multiplicity, spin_ladder, Spin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Z,
    X,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochQubit {
    r: f64,
    axis: Axis,
}

impl BlochQubit {
    pub fn new(r: f64, axis: Axis) -> Result<Self> {
        check_bloch_length(r)?;
        Ok(BlochQubit { r, axis })
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// `(r+, r-)`.
    pub fn populations(&self) -> (f64, f64) {
        ((1.0 + self.r) / 2.0, (1.0 - self.r) / 2.0)
    }
}

/// Weights of one spin-`l` block, ordered `m = -l ..= l`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpinBlockWeights {
    pub spin: Spin,
    pub multiplicity: f64,
    pub weights: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BlockWeights {
    copies: u32,
    axis: Axis,
    blocks: Vec<SpinBlockWeights>,
}

impl BlockWeights {
    pub fn copies(&self) -> u32 {
        self.copies
    }

    /// The axis whose spin-component eigenbasis the weights refer to.
    pub fn axis(&self) -> Axis {
        self.axis
    }

    /// Blocks in ascending `l`.
    pub fn blocks(&self) -> &[SpinBlockWeights] {
        &self.blocks
    }

    pub fn block(&self, l: Spin) -> Option<&SpinBlockWeights> {
        self.blocks.iter().find(|b| b.spin == l)
    }

    /// `sum_l d_l sum_m w_{l,m}`, which is 1 up to rounding.
    pub fn total_trace(&self) -> f64 {
        self.blocks
            .iter()
            .map(|b| b.multiplicity * b.weights.iter().sum::<f64>())
            .sum()
    }
}

/// `w_{l,m}` for `copies` qubits; `twice_m` must lie on the ladder of `l`.
pub fn block_weight(copies: u32, l: Spin, twice_m: i32, r: f64) -> f64 {
    let (rp, rm) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
    let t = l.doubled() as i32;
    let pairs = (copies as i32 - t) / 2;
    (rp * rm).powi(pairs) * rp.powi((t + twice_m) / 2) * rm.powi((t - twice_m) / 2)
}

/// `(w_{l,b} - w_{l,-b}) / r` for `b > 0`, evaluated without dividing by `r`.
///
/// The difference does not depend on `l`:
/// `(r+ r-)^{N/2 - b} (r+^{2b} - r-^{2b}) / (r+ - r-)`, and the last ratio is
/// the complete homogeneous polynomial `sum_k r+^k r-^{2b-1-k}`.
pub fn odd_weight_over_r(copies: u32, twice_b: i32, r: f64) -> f64 {
    debug_assert!(twice_b > 0 && twice_b as u32 <= copies);
    let (rp, rm) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
    let degree = twice_b - 1;
    let mut h = 0.0;
    let mut rp_pow = 1.0;
    for k in 0..=degree {
        h += rp_pow * rm.powi(degree - k);
        rp_pow *= rp;
    }
    (rp * rm).powi((copies as i32 - twice_b) / 2) * h
}

/// Table of [`odd_weight_over_r`] indexed by `2b` (entry 0 unused), built with
/// the positive recurrence `h_d = r- h_{d-1} + r+^d`.
pub fn odd_weights_over_r(copies: u32, r: f64) -> Vec<f64> {
    let (rp, rm) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
    let mut table = vec![0.0; copies as usize + 1];
    let (mut h, mut rp_pow) = (1.0, 1.0);
    for twice_b in 1..=copies as i32 {
        if twice_b > 1 {
            rp_pow *= rp;
            h = rm * h + rp_pow;
        }
        table[twice_b as usize] = (rp * rm).powi((copies as i32 - twice_b) / 2) * h;
    }
    table
}

pub fn decompose(copies: u32, qubit: BlochQubit) -> Result<BlockWeights> {
    if copies == 0 {
        return Err(Error::InvalidCopies("at least one input copy is required".into()));
    }
    let blocks = spin_ladder(copies)
        .into_iter()
        .map(|l| {
            Ok(SpinBlockWeights {
                spin: l,
                multiplicity: multiplicity(copies, l)?,
                weights: l.magnetic().map(|t| block_weight(copies, l, t, qubit.r)).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockWeights { copies, axis: qubit.axis, blocks })
}
