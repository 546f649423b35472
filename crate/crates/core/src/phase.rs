//! Optimal phase-covariant `N -> M` broadcasting for equatorial qubits.
//!
//! Inputs lie on the `x` axis (any equatorial phase reduces to it by
//! covariance). An extremal channel picks per input spin `l` an output irrep
//! `j_l` and an offset `k_l`, mapping `|l, n><l, n'|` to
//! `|j_l, n + k_l><j_l, n' + k_l|` with unit off-diagonal coefficients.
//! The optimum takes `j_l = M/2` and `k_l` as close to zero as parity
//! allows: `0` if `M - N` is even, `+-1/2` otherwise.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::product_state::{block_weight, odd_weights_over_r};
use crate::spin::{check_bloch_length, jx_element, jx_weighted_exponential, multiplicity, spin_ladder, wigner_half_pi, Spin};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PhaseChoice {
    pub input_spin: Spin,
    pub output_spin: Spin,
    /// `2 k_l`.
    pub twice_offset: i32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PhaseExtremalSpec {
    inputs: u32,
    outputs: u32,
    choices: Vec<PhaseChoice>,
}

impl PhaseExtremalSpec {
    /// Only `j_l >= l` is supported; `|k_l| <= j_l - l` and `2 k_l` must
    /// have the parity of `2 (j_l - l)`.
    pub fn new(inputs: u32, outputs: u32, choices: Vec<PhaseChoice>) -> Result<Self> {
        if inputs == 0 || outputs == 0 {
            return Err(Error::InvalidCopies("copy counts must be positive".into()));
        }
        let ladder = spin_ladder(inputs);
        if choices.len() != ladder.len() || choices.iter().zip(&ladder).any(|(c, l)| c.input_spin != *l) {
            return Err(Error::InvalidSpec("one choice per input spin, ascending".into()));
        }
        let out_ladder = spin_ladder(outputs);
        for c in &choices {
            if !out_ladder.contains(&c.output_spin) {
                return Err(Error::InvalidSpec(format!(
                    "j = {} does not occur for {outputs} output qubits",
                    c.output_spin
                )));
            }
            if c.output_spin < c.input_spin {
                return Err(Error::InvalidSpec(format!(
                    "j = {} below l = {} is not supported",
                    c.output_spin, c.input_spin
                )));
            }
            let gap = (c.output_spin.doubled() - c.input_spin.doubled()) as i32;
            if c.twice_offset.abs() > gap || (gap - c.twice_offset) % 2 != 0 {
                return Err(Error::InvalidSpec(format!(
                    "offset {}/2 is not admissible for j = {}, l = {}",
                    c.twice_offset, c.output_spin, c.input_spin
                )));
            }
        }
        Ok(PhaseExtremalSpec { inputs, outputs, choices })
    }

    /// `j_l = M/2` for all `l`, with a common offset.
    pub fn uniform(inputs: u32, outputs: u32, twice_offset: i32) -> Result<Self> {
        let top = Spin::from_doubled(outputs);
        let choices = spin_ladder(inputs)
            .into_iter()
            .map(|l| PhaseChoice { input_spin: l, output_spin: top, twice_offset })
            .collect();
        Self::new(inputs, outputs, choices)
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn outputs(&self) -> u32 {
        self.outputs
    }

    pub fn choices(&self) -> &[PhaseChoice] {
        &self.choices
    }

    /// Rank-one coefficient `1 / d_{j_l}`.
    pub fn coefficient(&self, choice: &PhaseChoice) -> Result<f64> {
        Ok(1.0 / multiplicity(self.outputs, choice.output_spin)?)
    }

    /// Scaling factor of this channel along `x`.
    pub fn scaling_factor(&self, r: f64) -> Result<f64> {
        check_bloch_length(r)?;
        let odd = odd_weights_over_r(self.inputs, r);
        let mut acc = 0.0;
        for c in &self.choices {
            let d = multiplicity(self.inputs, c.input_spin)?;
            let coupling = |twice_n: i32| jx_element(c.output_spin, twice_n + c.twice_offset);
            acc += d * dot(&shifted_overlaps(c.input_spin, coupling)?, &odd);
        }
        Ok(4.0 * acc / f64::from(self.outputs))
    }
}

/// The optimal channel: one spec when `M - N` is even, the `k = +-1/2` pair otherwise.
#[derive(Clone, Debug, PartialEq)]
pub enum PhaseOptimum {
    Even(PhaseExtremalSpec),
    Odd { plus: PhaseExtremalSpec, minus: PhaseExtremalSpec },
}

impl PhaseOptimum {
    /// The branches with their mixing weights.
    pub fn branches(&self) -> Vec<(f64, &PhaseExtremalSpec)> {
        match self {
            PhaseOptimum::Even(s) => vec![(1.0, s)],
            PhaseOptimum::Odd { plus, minus } => vec![(0.5, plus), (0.5, minus)],
        }
    }
}

fn check_sizes(inputs: u32, outputs: u32) -> Result<()> {
    if inputs == 0 {
        return Err(Error::InvalidCopies("at least one input copy is required".into()));
    }
    if outputs < inputs {
        return Err(Error::InvalidCopies(format!("M = {outputs} < N = {inputs} is not supported")));
    }
    Ok(())
}

pub fn optimal_spec(inputs: u32, outputs: u32) -> Result<PhaseOptimum> {
    check_sizes(inputs, outputs)?;
    if (outputs - inputs) % 2 == 0 {
        Ok(PhaseOptimum::Even(PhaseExtremalSpec::uniform(inputs, outputs, 0)?))
    } else {
        Ok(PhaseOptimum::Odd {
            plus: PhaseExtremalSpec::uniform(inputs, outputs, 1)?,
            minus: PhaseExtremalSpec::uniform(inputs, outputs, -1)?,
        })
    }
}

/// Sparse `(2b, c_b)` pairs.
fn dot(coefficients: &[(i32, f64)], odd: &[f64]) -> f64 {
    coefficients.iter().map(|&(t, c)| c * odd[t as usize]).sum()
}

/// `c_b = sum_n W_{n,b} W_{n+1,b} coupling(n)` for `b > 0`.
///
/// `[E_l]_{n,n+1} = sum_b W_{n,b} W_{n+1,b} w_b`, and the product of
/// neighbouring rows is odd in `b`, so contracting with any coupling leaves
/// `sum_{b>0} c_b (w_b - w_{-b})`.
fn shifted_overlaps(l: Spin, coupling: impl Fn(i32) -> f64) -> Result<Vec<(i32, f64)>> {
    let w = wigner_half_pi(l)?;
    let rows: Vec<i32> = l.magnetic().collect();
    Ok(l.magnetic()
        .enumerate()
        .filter(|&(_, tb)| tb > 0)
        .map(|(col, tb)| {
            let c = rows
                .windows(2)
                .enumerate()
                .map(|(i, pair)| w.entries()[(i, col)] * w.entries()[(i + 1, col)] * coupling(pair[0]))
                .sum();
            (tb, c)
        })
        .collect())
}

/// Precomputed optimal scaling-factor curve `r -> p(r)` for fixed sizes.
///
/// Setup costs `O(N^3)`; each evaluation is `O(N^2)`.
#[derive(Clone, Debug)]
pub struct PhaseCurve {
    inputs: u32,
    prefactor: f64,
    terms: Vec<(f64, Vec<(i32, f64)>)>,
}

impl PhaseCurve {
    /// `outputs = None` gives the `M -> infinity` limit, where
    /// `(4/M) [J_x^{(M/2)}]_{a,a+1} -> 1`.
    pub fn new(inputs: u32, outputs: Option<u32>) -> Result<Self> {
        if let Some(m) = outputs {
            check_sizes(inputs, m)?;
        } else if inputs == 0 {
            return Err(Error::InvalidCopies("at least one input copy is required".into()));
        }
        let twice_offset = match outputs {
            Some(m) if (m - inputs) % 2 == 1 => 1,
            _ => 0,
        };
        let terms = spin_ladder(inputs)
            .into_iter()
            .map(|l| {
                let d = multiplicity(inputs, l)?;
                let c = match outputs {
                    Some(m) => {
                        let top = Spin::from_doubled(m);
                        shifted_overlaps(l, |tn| jx_element(top, tn + twice_offset))?
                    }
                    None => shifted_overlaps(l, |_| 1.0)?,
                };
                Ok((d, c))
            })
            .collect::<Result<_>>()?;
        let prefactor = outputs.map_or(1.0, |m| 4.0 / f64::from(m));
        Ok(PhaseCurve { inputs, prefactor, terms })
    }

    pub fn eval(&self, r: f64) -> f64 {
        let odd = odd_weights_over_r(self.inputs, r);
        self.prefactor * self.terms.iter().map(|(d, c)| d * dot(c, &odd)).sum::<f64>()
    }
}

/// Optimal phase-covariant scaling factor; finite at `r = 0` and exact at `r = 1`.
pub fn scaling_factor(inputs: u32, outputs: u32, r: f64) -> Result<f64> {
    check_bloch_length(r)?;
    Ok(PhaseCurve::new(inputs, Some(outputs))?.eval(r))
}

/// `lim_{M -> infinity} p^{N,M}(r)`.
pub fn scaling_factor_infinite(inputs: u32, r: f64) -> Result<f64> {
    check_bloch_length(r)?;
    Ok(PhaseCurve::new(inputs, None)?.eval(r))
}

/// Which branch of an odd `M - N` channel to return.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Branch {
    #[default]
    Mixed,
    Plus,
    Minus,
}

/// Output state on `H_{M/2}` in the `J_z` basis (`m = -M/2` first).
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseOutput {
    outputs: u32,
    matrix: DMatrix<f64>,
    mixture: bool,
}

impl PhaseOutput {
    pub fn outputs(&self) -> u32 {
        self.outputs
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn is_mixture(&self) -> bool {
        self.mixture
    }

    pub fn trace(&self) -> f64 {
        self.matrix.trace()
    }

    /// `(2/M) Tr[J_x Sigma]`.
    pub fn bloch_x(&self) -> f64 {
        let top = Spin::from_doubled(self.outputs);
        let acc: f64 = top
            .magnetic()
            .take(top.dim() - 1)
            .enumerate()
            .map(|(a, tm)| 2.0 * jx_element(top, tm) * self.matrix[(a, a + 1)])
            .sum();
        2.0 * acc / f64::from(self.outputs)
    }

    /// `(2/M) Tr[J_z Sigma]`.
    pub fn bloch_z(&self) -> f64 {
        let top = Spin::from_doubled(self.outputs);
        let acc: f64 = top.magnetic().enumerate().map(|(a, tm)| f64::from(tm) / 2.0 * self.matrix[(a, a)]).sum();
        2.0 * acc / f64::from(self.outputs)
    }
}

/// Output of an extremal channel whose choices all have `j_l = M/2`.
pub fn spec_output_state(spec: &PhaseExtremalSpec, r: f64) -> Result<PhaseOutput> {
    check_bloch_length(r)?;
    let top = Spin::from_doubled(spec.outputs);
    let mut matrix = DMatrix::zeros(top.dim(), top.dim());
    for c in &spec.choices {
        if c.output_spin != top {
            return Err(Error::InvalidSpec("output states are only built for j_l = M/2".into()));
        }
        let l = c.input_spin;
        let d = multiplicity(spec.inputs, l)?;
        let e = jx_weighted_exponential(l, r, spec.inputs - l.doubled())?;
        let base = top
            .index_of(-(l.doubled() as i32) + c.twice_offset)
            .ok_or_else(|| Error::InvalidSpec("offset leaves the output ladder".into()))?;
        let mut view = matrix.view_mut((base, base), (l.dim(), l.dim()));
        view += e.entries() * d;
    }
    Ok(PhaseOutput { outputs: spec.outputs, matrix, mixture: false })
}

pub fn output_state(inputs: u32, outputs: u32, r: f64, branch: Branch) -> Result<PhaseOutput> {
    match optimal_spec(inputs, outputs)? {
        PhaseOptimum::Even(spec) => spec_output_state(&spec, r),
        PhaseOptimum::Odd { plus, minus } => match branch {
            Branch::Plus => spec_output_state(&plus, r),
            Branch::Minus => spec_output_state(&minus, r),
            Branch::Mixed => {
                let a = spec_output_state(&plus, r)?;
                let b = spec_output_state(&minus, r)?;
                Ok(PhaseOutput { outputs, matrix: (a.matrix + b.matrix) * 0.5, mixture: true })
            }
        },
    }
}

/// Single-site `z` Bloch component induced by the offsets `k_l`:
/// `(2/M) sum_l d_l k_l Tr[E_l(r)]`.
///
/// The block traces depend on `r`, so the bias does too; for a uniform
/// offset `k` it reduces to `2k/M`.
pub fn z_bias(spec: &PhaseExtremalSpec, r: f64) -> Result<f64> {
    check_bloch_length(r)?;
    let mut acc = 0.0;
    for c in &spec.choices {
        if c.twice_offset == 0 {
            continue;
        }
        let l = c.input_spin;
        let d = multiplicity(spec.inputs, l)?;
        let trace: f64 = l.magnetic().map(|t| block_weight(spec.inputs, l, t, r)).sum();
        acc += d * f64::from(c.twice_offset) / 2.0 * trace;
    }
    Ok(2.0 * acc / f64::from(spec.outputs))
}
