//! Brute-force cross-checks on the full `2^{M+N}`-dimensional space.
//!
//! The optimal channels are assembled as explicit Choi operators from
//! coupled-spin bases, applied to `rho^{(x)N}`, and compared against the
//! closed forms of the other modules.

pub mod basis;
pub mod choi;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

pub use basis::{transposition_matrix, CouplingOrder, SpinBasis};
pub use choi::{
    apply_channel, apply_to_state, build_choi, check_covariance, reduce_leading, ChannelSpec, CovarianceReport,
    DenseChoi, CHOI_TOL, MAX_ORACLE_QUBITS,
};

use crate::error::{Error, Result};
use crate::phase::{self, Branch};
use crate::product_state::{Axis, BlochQubit};
use crate::reduced;
use crate::spin::Spin;
use crate::thresholds::Family;
use crate::universal;

/// Bloch lengths at which every case is compared.
pub const CHECK_RADII: [f64; 6] = [0.1, 0.3, 0.5, 0.7, 0.9, 0.99];
/// Agreement required between the oracle and the closed forms.
pub const AGREEMENT_TOL: f64 = 1e-9;

/// `x` (phase) or `z` (universal) single-site Bloch component of a dense output.
fn bloch_component(state: &DMatrix<Complex64>, outputs: u32, axis: Axis) -> [f64; 3] {
    let site = reduce_leading(state, outputs, 1);
    let off = site[(0, 1)];
    let b = [2.0 * off.re, -2.0 * off.im, (site[(0, 0)] - site[(1, 1)]).re];
    match axis {
        // reorder so the first entry is the on-axis component
        Axis::Z => [b[2], b[0], b[1]],
        Axis::X => b,
    }
}

fn embed_symmetric(basis: &SpinBasis, block: &DMatrix<f64>) -> DMatrix<Complex64> {
    let v = basis.symmetric();
    (v * block * v.transpose()).map(|x| Complex64::new(x, 0.0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CaseReport {
    pub family: Family,
    pub inputs: u32,
    pub outputs: u32,
    pub trace_preservation: f64,
    pub min_eigenvalue: f64,
    pub charge_leak: f64,
    pub covariance: CovarianceReport,
    /// `max_r |p_oracle - p_analytic|`.
    pub scaling_error: f64,
    /// Largest single-site Bloch component off the input axis.
    pub off_axis: f64,
    pub single_site_error: f64,
    /// `None` for `M = 1`.
    pub two_site_error: Option<f64>,
    /// `max ||E_oracle(rho) - V Sigma V^T||_F` with the analytic `Sigma` on `H_{M/2}`.
    pub state_error: f64,
    /// Weight outside the symmetric subspace.
    pub outside_symmetric: f64,
    pub passed: bool,
}

pub fn verify_case(family: Family, inputs: u32, outputs: u32) -> Result<CaseReport> {
    let spec = ChannelSpec::optimal(family, inputs, outputs)?;
    let choi = DenseChoi::assemble(&spec, CouplingOrder::LeftToRight)?;
    let (min_eigenvalue, charge_leak) = choi.min_eigenvalue();
    let trace_preservation = choi.trace_preservation_residual();
    let covariance = check_covariance(&choi, family);
    let basis = SpinBasis::new(outputs, CouplingOrder::LeftToRight)?;
    let top = Spin::from_doubled(outputs);
    let axis = match family {
        Family::Universal => Axis::Z,
        Family::Phase => Axis::X,
    };

    let (mut scaling_error, mut off_axis, mut single_site_error) = (0.0f64, 0.0f64, 0.0f64);
    let (mut two_site_error, mut state_error, mut outside_symmetric) = (None::<f64>, 0.0f64, 0.0f64);
    for r in CHECK_RADII {
        let out = apply_channel(&choi, BlochQubit::new(r, axis)?)?;
        let (p, sigma) = match family {
            Family::Universal => {
                (universal::scaling_factor(inputs, outputs, r)?, universal::output_state(inputs, outputs, r)?.to_matrix())
            }
            Family::Phase => (
                phase::scaling_factor(inputs, outputs, r)?,
                phase::output_state(inputs, outputs, r, Branch::Mixed)?.matrix().clone(),
            ),
        };
        let b = bloch_component(&out, outputs, axis);
        scaling_error = scaling_error.max((b[0] / r - p).abs());
        off_axis = off_axis.max(b[1].abs()).max(b[2].abs());

        let analytic_site = reduced::single_site(outputs, top, &sigma)?;
        let site = reduce_leading(&out, outputs, 1);
        let diff = site.iter().zip(analytic_site.matrix().iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
        single_site_error = single_site_error.max(diff.sqrt());

        if outputs >= 2 {
            let analytic_pair = reduced::two_site(outputs, &sigma)?;
            let pair = reduce_leading(&out, outputs, 2);
            let diff = pair.iter().zip(analytic_pair.matrix().iter()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>();
            two_site_error = Some(two_site_error.unwrap_or(0.0).max(diff.sqrt()));
        }

        let embedded = embed_symmetric(&basis, &sigma);
        state_error = state_error.max((&out - &embedded).norm());
        let v = basis.symmetric().map(|x| Complex64::new(x, 0.0));
        let inside = (v.transpose() * &out * &v).trace().re;
        outside_symmetric = outside_symmetric.max((out.trace().re - inside).abs());
    }

    let passed = trace_preservation < CHOI_TOL
        && min_eigenvalue > -CHOI_TOL
        && charge_leak < CHOI_TOL
        && covariance.max_group_norm < AGREEMENT_TOL
        && covariance.max_permutation_norm < AGREEMENT_TOL
        && scaling_error < AGREEMENT_TOL
        && off_axis < AGREEMENT_TOL
        && single_site_error < AGREEMENT_TOL
        && two_site_error.map_or(true, |e| e < AGREEMENT_TOL)
        && state_error < AGREEMENT_TOL
        && outside_symmetric < AGREEMENT_TOL;
    Ok(CaseReport {
        family,
        inputs,
        outputs,
        trace_preservation,
        min_eigenvalue,
        charge_leak,
        covariance,
        scaling_error,
        off_axis,
        single_site_error,
        two_site_error,
        state_error,
        outside_symmetric,
        passed,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    pub max_total_qubits: u32,
    pub tolerance: f64,
    pub radii: Vec<f64>,
    pub cases: Vec<CaseReport>,
    pub passed: bool,
}

/// Every `1 <= N <= M` with `N + M <= max_total_qubits`, both families.
pub fn verify(max_total_qubits: u32) -> Result<VerificationReport> {
    if max_total_qubits > MAX_ORACLE_QUBITS {
        return Err(Error::OversizeInstance { qubits: max_total_qubits, limit: MAX_ORACLE_QUBITS });
    }
    let mut jobs = Vec::new();
    for family in [Family::Universal, Family::Phase] {
        for inputs in 1..=max_total_qubits / 2 {
            for outputs in inputs..=max_total_qubits - inputs {
                jobs.push((family, inputs, outputs));
            }
        }
    }
    let cases = jobs
        .into_par_iter()
        .map(|(f, n, m)| verify_case(f, n, m))
        .collect::<Result<Vec<_>>>()?;
    let passed = cases.iter().all(|c| c.passed);
    Ok(VerificationReport { max_total_qubits, tolerance: AGREEMENT_TOL, radii: CHECK_RADII.to_vec(), cases, passed })
}
