//! Optimal universally covariant `N -> M` broadcasting.
//!
//! Extremal symmetric covariant channels are labelled by two functions of the
//! input spin `l`: the output irrep `j_l` and the coupled total spin `J_l`.
//! The single-site scaling factor of such a channel is
//!
//! ```text
//! p(r) = (2 / (M r)) sum_l beta(J_l, j_l, l) d_l sum_n n w_{l,-n},
//! beta(J, j, l) = [J(J+1) - j(j+1) - l(l+1)] / (2 l (l+1)),
//! ```
//!
//! and since the inner sum is negative, the optimum minimizes `beta`:
//! `j_l = M/2`, `J_l = M/2 - l`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::product_state::{block_weight, odd_weights_over_r};
use crate::spin::{check_bloch_length, clebsch_gordan, multiplicity, spin_ladder, Spin};

fn check_triangle(total: Spin, j: Spin, l: Spin) -> Result<()> {
    let (t, a, b) = (total.doubled() as i64, j.doubled() as i64, l.doubled() as i64);
    if t < (a - b).abs() || t > a + b || (t + a + b) % 2 != 0 {
        return Err(Error::InvalidSpec(format!("J = {total} is not in {j} (x) {l}")));
    }
    Ok(())
}

/// `beta(J, j, l)`; undefined (rejected) for `l = 0`.
pub fn beta(total: Spin, j: Spin, l: Spin) -> Result<f64> {
    if l == Spin::ZERO {
        return Err(Error::InvalidSpin("beta is undefined for l = 0".into()));
    }
    check_triangle(total, j, l)?;
    Ok((total.casimir() - j.casimir() - l.casimir()) / (2.0 * l.casimir()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    /// `M > N`.
    Broadcasting,
    /// `M = N`: the same construction acts as a purifier.
    Purification,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct UniversalChoice {
    pub input_spin: Spin,
    pub output_spin: Spin,
    pub total: Spin,
}

/// An extremal universally covariant channel `l -> (j_l, J_l)`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalExtremalSpec {
    inputs: u32,
    outputs: u32,
    choices: Vec<UniversalChoice>,
}

impl UniversalExtremalSpec {
    /// `choices` must list every input spin of `inputs` qubits once, ascending.
    pub fn new(inputs: u32, outputs: u32, choices: Vec<UniversalChoice>) -> Result<Self> {
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
            check_triangle(c.total, c.output_spin, c.input_spin)?;
        }
        Ok(UniversalExtremalSpec { inputs, outputs, choices })
    }

    /// Every extremal channel for the given sizes.
    pub fn enumerate(inputs: u32, outputs: u32) -> Result<Vec<Self>> {
        let per_l: Vec<Vec<UniversalChoice>> = spin_ladder(inputs)
            .into_iter()
            .map(|l| {
                spin_ladder(outputs)
                    .into_iter()
                    .flat_map(|j| {
                        let lo = (j.doubled() as i64 - l.doubled() as i64).unsigned_abs() as u32;
                        (lo..=j.doubled() + l.doubled()).step_by(2).map(move |t| UniversalChoice {
                            input_spin: l,
                            output_spin: j,
                            total: Spin::from_doubled(t),
                        })
                    })
                    .collect()
            })
            .collect();
        let mut specs = vec![Vec::new()];
        for options in &per_l {
            specs = specs
                .into_iter()
                .flat_map(|prefix: Vec<UniversalChoice>| {
                    options.iter().map(move |c| {
                        let mut next = prefix.clone();
                        next.push(*c);
                        next
                    })
                })
                .collect();
        }
        specs.into_iter().map(|c| Self::new(inputs, outputs, c)).collect()
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn outputs(&self) -> u32 {
        self.outputs
    }

    pub fn choices(&self) -> &[UniversalChoice] {
        &self.choices
    }

    pub fn regime(&self) -> Regime {
        if self.outputs > self.inputs {
            Regime::Broadcasting
        } else {
            Regime::Purification
        }
    }

    /// `s^{J_l}_{j_l, l} = (2l+1) / ((2J_l+1) d_{j_l})`.
    pub fn coefficient(&self, choice: &UniversalChoice) -> Result<f64> {
        let d = multiplicity(self.outputs, choice.output_spin)?;
        Ok(choice.input_spin.dim() as f64 / (choice.total.dim() as f64 * d))
    }

    /// Largest deviation from `sum s (2J+1)/(2l+1) d_j = 1` over `l`.
    pub fn trace_preservation_residual(&self) -> Result<f64> {
        let mut worst = 0.0f64;
        for c in &self.choices {
            let d = multiplicity(self.outputs, c.output_spin)?;
            let lhs = self.coefficient(c)? * c.total.dim() as f64 / c.input_spin.dim() as f64 * d;
            worst = worst.max((lhs - 1.0).abs());
        }
        Ok(worst)
    }

    /// Scaling factor of this extremal channel.
    pub fn scaling_factor(&self, r: f64) -> Result<f64> {
        check_bloch_length(r)?;
        let odd = odd_weights_over_r(self.inputs, r);
        let mut acc = 0.0;
        for c in &self.choices {
            if c.input_spin == Spin::ZERO {
                continue;
            }
            let b = beta(c.total, c.output_spin, c.input_spin)?;
            let d = multiplicity(self.inputs, c.input_spin)?;
            acc += b * d * first_moment_over_r(c.input_spin, &odd);
        }
        Ok(-2.0 * acc / f64::from(self.outputs))
    }
}

/// `odd[t] = (w_b - w_{-b}) / r` for `2b = t`.
/// `sum_m m w_{l,m} / r`.
fn first_moment_over_r(l: Spin, odd: &[f64]) -> f64 {
    l.magnetic().filter(|&t| t > 0).map(|t| f64::from(t) / 2.0 * odd[t as usize]).sum()
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

/// `j_l = M/2`, `J_l = M/2 - l`.
pub fn optimal_spec(inputs: u32, outputs: u32) -> Result<UniversalExtremalSpec> {
    check_sizes(inputs, outputs)?;
    let top = Spin::from_doubled(outputs);
    let choices = spin_ladder(inputs)
        .into_iter()
        .map(|l| UniversalChoice {
            input_spin: l,
            output_spin: top,
            total: Spin::from_doubled(outputs - l.doubled()),
        })
        .collect();
    UniversalExtremalSpec::new(inputs, outputs, choices)
}

/// `G_N(r) = sum_l d_l/(l+1) sum_m m w_{l,m} / r`; the optimal scaling factor
/// is `(M+2)/M * G_N(r)`, and `G_N` itself is the `M -> infinity` limit.
#[derive(Clone, Debug)]
pub struct UniversalCurve {
    inputs: u32,
    multiplicities: Vec<(Spin, f64)>,
}

impl UniversalCurve {
    pub fn new(inputs: u32) -> Result<Self> {
        if inputs == 0 {
            return Err(Error::InvalidCopies("at least one input copy is required".into()));
        }
        let multiplicities = spin_ladder(inputs)
            .into_iter()
            .map(|l| Ok((l, multiplicity(inputs, l)?)))
            .collect::<Result<_>>()?;
        Ok(UniversalCurve { inputs, multiplicities })
    }

    pub fn limit(&self, r: f64) -> f64 {
        let odd = odd_weights_over_r(self.inputs, r);
        self.multiplicities
            .iter()
            .map(|&(l, d)| d / (l.value() + 1.0) * first_moment_over_r(l, &odd))
            .sum()
    }

    pub fn at(&self, outputs: u32, r: f64) -> f64 {
        let m = f64::from(outputs);
        (m + 2.0) / m * self.limit(r)
    }
}

/// Optimal universal scaling factor; finite at `r = 0` (the analytic limit)
/// and exact at `r = 1`.
pub fn scaling_factor(inputs: u32, outputs: u32, r: f64) -> Result<f64> {
    check_sizes(inputs, outputs)?;
    check_bloch_length(r)?;
    Ok(UniversalCurve::new(inputs)?.at(outputs, r))
}

/// `lim_{M -> infinity} p^{N,M}(r)`.
pub fn scaling_factor_infinite(inputs: u32, r: f64) -> Result<f64> {
    check_bloch_length(r)?;
    Ok(UniversalCurve::new(inputs)?.limit(r))
}

/// Diagonal output state on the symmetric block `H_{M/2}`.
#[derive(Clone, Debug, PartialEq)]
pub struct UniversalOutput {
    outputs: u32,
    weights: Vec<f64>,
}

impl UniversalOutput {
    pub fn outputs(&self) -> u32 {
        self.outputs
    }

    /// `sigma_m` for `m = -M/2 ..= M/2`.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn trace(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// `(2/M) sum_m m sigma_m`, the single-site Bloch `z` component.
    pub fn bloch_z(&self) -> f64 {
        let top = Spin::from_doubled(self.outputs);
        top.magnetic().zip(&self.weights).map(|(t, w)| f64::from(t) / 2.0 * w).sum::<f64>() * 2.0
            / f64::from(self.outputs)
    }

    pub fn to_matrix(&self) -> nalgebra::DMatrix<f64> {
        nalgebra::DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.weights))
    }
}

pub fn output_state(inputs: u32, outputs: u32, r: f64) -> Result<UniversalOutput> {
    check_sizes(inputs, outputs)?;
    check_bloch_length(r)?;
    let top = Spin::from_doubled(outputs);
    let mut weights = vec![0.0; top.dim()];
    for l in spin_ladder(inputs) {
        let total = Spin::from_doubled(outputs - l.doubled());
        let prefactor = l.dim() as f64 / total.dim() as f64 * multiplicity(inputs, l)?;
        for tn in l.magnetic() {
            // (r+ r-)^{N/2} (r-/r+)^n in factored form
            let w = prefactor * block_weight(inputs, l, -tn, r);
            if w == 0.0 {
                continue;
            }
            for (a, tm) in top.magnetic().enumerate() {
                if total.index_of(tm + tn).is_none() {
                    continue;
                }
                let cg = clebsch_gordan(top, tm, l, tn, total, tm + tn)?;
                weights[a] += cg * cg * w;
            }
        }
    }
    Ok(UniversalOutput { outputs, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn s(t: u32) -> Spin {
        Spin::from_doubled(t)
    }

    #[test]
    fn beta_examples() {
        assert!((beta(s(0), s(1), s(1)).unwrap() + 1.0).abs() < 1e-15);
        for outputs in 1..12u32 {
            for tl in (1..=outputs).rev().step_by(2) {
                let l = s(tl);
                let got = beta(s(outputs - tl), s(outputs), l).unwrap();
                let expect = -(f64::from(outputs) + 2.0) / (2.0 * (l.value() + 1.0));
                assert!((got - expect).abs() < 1e-13);
            }
        }
        for tj in 0..8u32 {
            for tl in 1..8u32 {
                let (j, l) = (s(tj), s(tl));
                let top = beta(s(tj + tl), j, l).unwrap();
                assert!((top - j.value() / (l.value() + 1.0)).abs() < 1e-13);
                let low = beta(s((tj as i32 - tl as i32).unsigned_abs()), j, l).unwrap();
                let expect = if tj < tl {
                    -j.value() / l.value()
                } else {
                    -(j.value() + 1.0) / (l.value() + 1.0)
                };
                assert!((low - expect).abs() < 1e-13);
            }
        }
        assert!(beta(s(2), s(2), s(0)).is_err());
        assert!(beta(s(6), s(1), s(1)).is_err());
    }

    #[test]
    fn optimal_spec_examples() {
        let spec = optimal_spec(4, 5).unwrap();
        let totals: Vec<Spin> = spec.choices().iter().map(|c| c.total).collect();
        assert_eq!(totals, vec![s(5), s(3), s(1)]);
        assert!(spec.trace_preservation_residual().unwrap() < 1e-12);
        assert_eq!(spec.regime(), Regime::Broadcasting);

        let id = optimal_spec(1, 1).unwrap();
        assert_eq!(id.choices()[0].output_spin, Spin::HALF);
        assert_eq!(id.choices()[0].total, Spin::ZERO);
        assert_eq!(id.regime(), Regime::Purification);

        let two = optimal_spec(2, 2).unwrap();
        let totals: Vec<Spin> = two.choices().iter().map(|c| c.total).collect();
        assert_eq!(totals, vec![s(2), s(0)]);

        assert!(optimal_spec(3, 2).is_err());
    }

    #[test]
    fn identity_channel() {
        for i in 0..=100 {
            let r = f64::from(i) / 100.0;
            assert!((scaling_factor(1, 1, r).unwrap() - 1.0).abs() < 1e-12);
            let out = output_state(1, 1, r).unwrap();
            assert!((out.weights()[1] - (1.0 + r) / 2.0).abs() < 1e-12);
            assert!((out.weights()[0] - (1.0 - r) / 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn pure_state_limit_matches_cloner() {
        for n in 1..=20u32 {
            for m in n..=20u32 {
                let p = scaling_factor(n, m, 1.0).unwrap();
                let expect = f64::from(n * (m + 2)) / f64::from(m * (n + 2));
                assert!((p - expect).abs() < 1e-9, "N={n} M={m}: {p} vs {expect}");
            }
        }
        assert!((scaling_factor(4, 5, 1.0).unwrap() - 14.0 / 15.0).abs() < 1e-12);
        assert!((scaling_factor_infinite(1, 1.0).unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn matches_direct_formula_away_from_zero() {
        // p = -(M+2)/(M r) (r+ r-)^{N/2} sum_l d_l/(l+1) sum_n n (r-/r+)^n
        for n in 1..=12u32 {
            for r in [0.15f64, 0.5, 0.787, 0.95] {
                let (rp, rm): (f64, f64) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
                let mut acc = 0.0;
                for l in spin_ladder(n) {
                    let d = multiplicity(n, l).unwrap();
                    let inner: f64 = l
                        .magnetic()
                        .map(|t| {
                            let nn = f64::from(t) / 2.0;
                            nn * (rm / rp).powf(nn)
                        })
                        .sum();
                    acc += d / (l.value() + 1.0) * inner;
                }
                let m = n + 1;
                let direct = -(f64::from(m) + 2.0) / (f64::from(m) * r) * (rp * rm).powf(f64::from(n) / 2.0) * acc;
                assert!((scaling_factor(n, m, r).unwrap() - direct).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn small_r_is_continuous() {
        for n in 1..=10u32 {
            let p0 = scaling_factor(n, n + 1, 0.0).unwrap();
            let p1 = scaling_factor(n, n + 1, 1e-7).unwrap();
            assert!(p0.is_finite());
            assert!((p0 - p1).abs() < 1e-6);
        }
    }

    #[test]
    fn output_self_consistency() {
        for n in 1..=10u32 {
            for m in n..=12u32 {
                for i in 0..=10 {
                    let r = f64::from(i) / 10.0;
                    let out = output_state(n, m, r).unwrap();
                    assert!((out.trace() - 1.0).abs() < 1e-10);
                    assert!(out.weights().iter().all(|&w| w >= -1e-15));
                    let p = scaling_factor(n, m, r).unwrap();
                    assert!((out.bloch_z() - r * p).abs() < 1e-10, "N={n} M={m} r={r}");
                }
            }
        }
    }

    #[test]
    fn spec_formula_agrees_with_optimum() {
        for n in 1..=6u32 {
            for m in n..=8u32 {
                let spec = optimal_spec(n, m).unwrap();
                for &r in &[0.0, 0.3, 0.9, 1.0] {
                    let a = spec.scaling_factor(r).unwrap();
                    let b = scaling_factor(n, m, r).unwrap();
                    assert!((a - b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn optimum_strictly_dominates_other_extremal_maps() {
        for (n, m) in [(2, 3), (3, 4), (4, 5), (2, 4)] {
            let best = optimal_spec(n, m).unwrap();
            for spec in UniversalExtremalSpec::enumerate(n, m).unwrap() {
                assert!(spec.trace_preservation_residual().unwrap() < 1e-12);
                // the l = 0 choice never affects p
                if spec.choices()[1..] == best.choices()[1..] || (n == 1 && spec.choices()[0] == best.choices()[0]) {
                    continue;
                }
                for &r in &[0.2, 0.6, 0.99] {
                    assert!(spec.scaling_factor(r).unwrap() < best.scaling_factor(r).unwrap() - 1e-12);
                }
            }
        }
    }

    #[test]
    fn monotone_in_outputs() {
        for n in 1..=10u32 {
            for i in 0..=20 {
                let r = f64::from(i) / 20.0;
                let inf = scaling_factor_infinite(n, r).unwrap();
                for m in n..=30u32 {
                    let a = scaling_factor(n, m, r).unwrap();
                    let b = scaling_factor(n, m + 1, r).unwrap();
                    assert!(a >= b - 1e-14 && b >= inf - 1e-14);
                }
            }
        }
    }

    #[test]
    fn no_superbroadcasting_below_four_copies() {
        for n in 1..=3u32 {
            let max = (0..=2000)
                .map(|i| scaling_factor(n, n + 1, f64::from(i) / 2000.0).unwrap())
                .fold(f64::MIN, f64::max);
            assert!(max <= 1.0 + 1e-9, "N={n}: {max}");
        }
    }

    #[test]
    fn threshold_neighbourhood_four_to_five() {
        let p = scaling_factor(4, 5, 0.787).unwrap();
        assert!((p - 1.0).abs() < 1e-2);
        assert!(scaling_factor_infinite(6, 0.1).unwrap() > 1.0);
    }

    proptest! {
        #[test]
        fn prop_positive_on_grid(n in 1u32..30, extra in 0u32..30, r in 0.0f64..=1.0) {
            let p = scaling_factor(n, n + extra, r).unwrap();
            prop_assert!(p > 0.0 && p.is_finite());
        }
    }
}
