//! Two-qubit entanglement of broadcast outputs.
//!
//! A swap-symmetric two-qubit state that commutes with `J_z` is diagonal in
//! the triplet basis and fixed by two numbers: `alpha`, the `|1,0>`
//! population, and `beta`, half the `|1,1>`-`|1,-1>` imbalance. Its
//! concurrence has the closed form
//!
//! ```text
//! C = 0                                         if alpha <= (1 - 4 beta^2) / 2
//! C = alpha - sqrt(1 - 2 alpha + alpha^2 - 4 beta^2)  otherwise.
//! ```
//!
//! The radicand equals `4 rho_{11} rho_{-1-1}`, which is how it is evaluated:
//! the expanded form cancels catastrophically near the edge `alpha + 2|beta| = 1`.
//!
//! General states go through the Wootters construction.

use nalgebra::{DMatrix, Matrix3, Matrix4, Vector3};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::{self, Branch};
use crate::reduced::{self, TwoQubitState};
use crate::thresholds::Family;
use crate::universal;

const DIAGONAL_TOL: f64 = 1e-10;
/// Wootters concurrences below this are rounding noise of a separable state.
pub const CONCURRENCE_FLOOR: f64 = 1e-12;

/// Coordinates in the physical triangle `alpha >= 0`, `alpha + 2|beta| <= 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleCoords {
    beta: f64,
    alpha: f64,
    // `rho_{11}` and `rho_{-1-1}`, kept exact when read off a state
    #[serde(skip)]
    up: f64,
    #[serde(skip)]
    down: f64,
}

impl TriangleCoords {
    pub fn new(beta: f64, alpha: f64) -> Result<Self> {
        let tol = 1e-12;
        if !(beta.is_finite() && alpha.is_finite()) || alpha < -tol || alpha + 2.0 * beta.abs() > 1.0 + tol {
            return Err(Error::InvalidState(format!("(beta, alpha) = ({beta}, {alpha}) is outside the triangle")));
        }
        let gamma = (1.0 - alpha) / 2.0;
        Ok(TriangleCoords { beta, alpha, up: (gamma + beta).max(0.0), down: (gamma - beta).max(0.0) })
    }

    fn from_populations(down: f64, zero: f64, up: f64) -> Result<Self> {
        let coords = TriangleCoords::new((up - down) / 2.0, zero)?;
        Ok(TriangleCoords { up: up.max(0.0), down: down.max(0.0), ..coords })
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// `(rho_{11} + rho_{-1-1}) / 2`.
    pub fn gamma(&self) -> f64 {
        (1.0 - self.alpha) / 2.0
    }

    /// The diagonal triplet state with these coordinates.
    pub fn to_state(&self) -> Result<TwoQubitState> {
        let block = Matrix3::from_diagonal(&Vector3::new(
            Complex64::new(self.down, 0.0),
            Complex64::new(self.alpha.max(0.0), 0.0),
            Complex64::new(self.up, 0.0),
        ));
        TwoQubitState::from_triplet(&block)
    }
}

/// Triangle coordinates plus the norm of everything they ignore
/// (off-diagonal triplet entries and singlet components).
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TriangleProjection {
    pub coords: TriangleCoords,
    pub residual: f64,
}

/// Projects onto the triangle; fails if the residual exceeds `1e-10`.
pub fn triangle_coords(state: &TwoQubitState) -> Result<TriangleProjection> {
    let projection = project_triangle(state)?;
    if projection.residual > DIAGONAL_TOL {
        return Err(Error::InvalidState(format!(
            "state is not triplet-diagonal (residual {:e})",
            projection.residual
        )));
    }
    Ok(projection)
}

/// Like [`triangle_coords`] but reports the residual instead of failing.
pub fn project_triangle(state: &TwoQubitState) -> Result<TriangleProjection> {
    let t = state.triplet_block();
    let (down, zero, up) = (t[(0, 0)].re, t[(1, 1)].re, t[(2, 2)].re);
    // off-diagonal triplet entries and any singlet component
    let residual = (state.matrix() - embed_diagonal(&t)).norm();
    let coords = TriangleCoords::from_populations(down, zero, up)?;
    Ok(TriangleProjection { coords, residual })
}

fn embed_diagonal(t: &Matrix3<Complex64>) -> Matrix4<Complex64> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let v = [[0.0, 0.0, 0.0, 1.0], [0.0, s, s, 0.0], [1.0, 0.0, 0.0, 0.0]];
    Matrix4::from_fn(|a, b| {
        let mut acc = Complex64::new(0.0, 0.0);
        for mu in 0..3 {
            acc += t[(mu, mu)] * v[mu][a] * v[mu][b];
        }
        acc
    })
}

pub fn concurrence_triangle(coords: &TriangleCoords) -> f64 {
    let (a, b) = (coords.alpha, coords.beta);
    if a <= (1.0 - 4.0 * b * b) / 2.0 {
        return 0.0;
    }
    (a - 2.0 * (coords.up * coords.down).sqrt()).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ConcurrenceResult {
    pub concurrence: f64,
    /// Square roots of the eigenvalues of `rho (sY sY) rho* (sY sY)`, descending.
    pub lambdas: [f64; 4],
}

/// Wootters concurrence.
///
/// The `lambda_i` are obtained as singular values of
/// `tau = X^T (sY (x) sY) X` with `rho = X X^dagger`. Rounding noise in a
/// vanishing eigenvalue then enters `tau` linearly instead of through a
/// square root of `rho rho~`.
pub fn concurrence(state: &TwoQubitState) -> Result<ConcurrenceResult> {
    let rho = DMatrix::from_column_slice(4, 4, state.matrix().as_slice());
    let eig = rho.clone().symmetric_eigen();
    let min = eig.eigenvalues.min();
    if min < -DIAGONAL_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    let kept: Vec<usize> = (0..4).filter(|&i| eig.eigenvalues[i] > 0.0).collect();
    let mut lambdas = [0.0; 4];
    if !kept.is_empty() {
        let x = DMatrix::from_fn(4, kept.len(), |a, k| {
            eig.eigenvectors[(a, kept[k])] * eig.eigenvalues[kept[k]].sqrt()
        });
        let flip = DMatrix::from_fn(4, 4, |a, b| {
            let v = match (a, b) {
                (0, 3) | (3, 0) => -1.0,
                (1, 2) | (2, 1) => 1.0,
                _ => 0.0,
            };
            Complex64::new(v, 0.0)
        });
        let tau = x.transpose() * flip * &x;
        let sv = tau.singular_values();
        let mut values: Vec<f64> = sv.iter().copied().collect();
        values.sort_by(|a, b| b.total_cmp(a));
        for (slot, v) in lambdas.iter_mut().zip(values) {
            *slot = v;
        }
    }
    let mut c = (lambdas[0] - lambdas[1] - lambdas[2] - lambdas[3]).clamp(0.0, 1.0);
    if c < CONCURRENCE_FLOOR {
        c = 0.0;
    }
    Ok(ConcurrenceResult { concurrence: c, lambdas })
}

fn binary_entropy(x: f64) -> f64 {
    let h = |p: f64| if p <= 0.0 { 0.0 } else { -p * p.log2() };
    h(x) + h(1.0 - x)
}

/// `E(C) = h((1 + sqrt(1 - C^2)) / 2)` in bits.
pub fn entanglement_of_formation(concurrence: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&concurrence) {
        return Err(Error::InvalidInput(format!("concurrence {concurrence} is outside [0, 1]")));
    }
    if concurrence == 0.0 {
        return Ok(0.0);
    }
    Ok(binary_entropy((1.0 + (1.0 - concurrence * concurrence).sqrt()) / 2.0))
}

/// Two-site entanglement of an optimal broadcast output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PairEntanglement {
    /// Triangle coordinates; only defined for the universal family.
    pub coords: Option<TriangleCoords>,
    pub concurrence: f64,
    pub formation: f64,
}

/// Universal outputs use the triangle closed form, phase outputs the
/// Wootters construction; `branch` only matters for phase maps with odd `M - N`.
pub fn output_pair_entanglement(
    family: Family,
    inputs: u32,
    outputs: u32,
    r: f64,
    branch: Branch,
) -> Result<PairEntanglement> {
    if outputs < 2 {
        return Err(Error::InvalidCopies(format!("two-site state needs at least 2 outputs, got {outputs}")));
    }
    let (coords, concurrence) = match family {
        Family::Universal => {
            let sigma = universal::output_state(inputs, outputs, r)?.to_matrix();
            let pair = reduced::two_site(outputs, &sigma)?;
            let coords = triangle_coords(&pair)?.coords;
            (Some(coords), concurrence_triangle(&coords))
        }
        Family::Phase => {
            let sigma = phase::output_state(inputs, outputs, r, branch)?;
            let pair = reduced::two_site(outputs, sigma.matrix())?;
            (None, concurrence(&pair)?.concurrence)
        }
    };
    Ok(PairEntanglement { coords, concurrence, formation: entanglement_of_formation(concurrence)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Vector4;

    fn pure(v: [f64; 4]) -> TwoQubitState {
        let v = Vector4::from(v).map(|x| Complex64::new(x, 0.0));
        let v = v / Complex64::new(v.norm(), 0.0);
        TwoQubitState::new(v * v.adjoint()).unwrap()
    }

    #[test]
    fn bell_and_product_states() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let singlet = pure([0.0, s, -s, 0.0]);
        assert!((concurrence(&singlet).unwrap().concurrence - 1.0).abs() < 1e-12);
        let triplet0 = pure([0.0, s, s, 0.0]);
        assert!((concurrence(&triplet0).unwrap().concurrence - 1.0).abs() < 1e-12);
        let product = pure([1.0, 0.0, 0.0, 0.0]);
        assert!(concurrence(&product).unwrap().concurrence.abs() < 1e-12);
        let mixed = TwoQubitState::new(Matrix4::identity() * Complex64::new(0.25, 0.0)).unwrap();
        assert!(concurrence(&mixed).unwrap().concurrence.abs() < 1e-12);
    }

    #[test]
    fn werner_states() {
        // p |Psi-><Psi-| + (1 - p) 1/4 has C = max(0, (3p - 1)/2)
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = Vector4::new(0.0, s, -s, 0.0).map(|x| Complex64::new(x, 0.0));
        for i in 0..=20 {
            let p = f64::from(i) / 20.0;
            let rho = v * v.adjoint() * Complex64::new(p, 0.0) + Matrix4::identity() * Complex64::new((1.0 - p) / 4.0, 0.0);
            let c = concurrence(&TwoQubitState::new(rho).unwrap()).unwrap().concurrence;
            assert!((c - ((3.0 * p - 1.0) / 2.0).max(0.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn triangle_examples() {
        let c = |b, a| concurrence_triangle(&TriangleCoords::new(b, a).unwrap());
        assert!((c(0.0, 1.0) - 1.0).abs() < 1e-15);
        assert_eq!(c(0.0, 0.5), 0.0);
        assert_eq!(c(0.5, 0.0), 0.0);
        assert!(TriangleCoords::new(0.5, 0.5).is_err());
        let corner = TriangleCoords::new(0.0, 1.0).unwrap();
        let state = corner.to_state().unwrap();
        let back = triangle_coords(&state).unwrap();
        assert!((back.coords.alpha() - 1.0).abs() < 1e-14 && back.residual < 1e-14);
    }

    #[test]
    fn rejects_off_diagonal_for_triangle() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let plus = pure([0.5, 0.5, 0.5, 0.5]);
        assert!(triangle_coords(&plus).is_err());
        let singlet = pure([0.0, s, -s, 0.0]);
        assert!(triangle_coords(&singlet).is_err());
        assert!(project_triangle(&singlet).unwrap().residual > 0.9);
    }

    #[test]
    fn entanglement_of_formation_values() {
        assert_eq!(entanglement_of_formation(0.0).unwrap(), 0.0);
        assert!((entanglement_of_formation(1.0).unwrap() - 1.0).abs() < 1e-15);
        let mid = entanglement_of_formation(0.5).unwrap();
        assert!(mid > 0.0 && mid < 1.0);
        let mut last = 0.0;
        for i in 1..=100 {
            let e = entanglement_of_formation(f64::from(i) / 100.0).unwrap();
            assert!(e > last);
            last = e;
        }
        assert!(entanglement_of_formation(1.5).is_err());
        assert!(entanglement_of_formation(-0.1).is_err());
    }

    #[test]
    fn triangle_matches_wootters_on_grid() {
        for i in 0..=80 {
            for k in 0..=80 {
                let beta = -0.5 + f64::from(i) / 80.0;
                let alpha = f64::from(k) / 80.0;
                let Ok(t) = TriangleCoords::new(beta, alpha) else { continue };
                let closed = concurrence_triangle(&t);
                let general = concurrence(&t.to_state().unwrap()).unwrap().concurrence;
                assert!((closed - general).abs() < 1e-10, "beta={beta} alpha={alpha}");
            }
        }
    }

    #[test]
    fn universal_pair_matches_wootters() {
        for r in [0.3, 0.9, 0.995, 1.0] {
            let pair = output_pair_entanglement(Family::Universal, 4, 5, r, Branch::Mixed).unwrap();
            let sigma = universal::output_state(4, 5, r).unwrap().to_matrix();
            let general = concurrence(&reduced::two_site(5, &sigma).unwrap()).unwrap().concurrence;
            assert!((pair.concurrence - general).abs() < 1e-10, "r={r}");
        }
        assert_eq!(output_pair_entanglement(Family::Universal, 4, 5, 0.5, Branch::Mixed).unwrap().formation, 0.0);
        assert!(output_pair_entanglement(Family::Universal, 4, 5, 0.999, Branch::Mixed).unwrap().formation > 0.0);
    }

    #[test]
    fn phase_pairs() {
        // the k = +-1/2 mixture is separable, each branch alone is not
        for r in [0.5, 0.9, 0.999] {
            let mixed = output_pair_entanglement(Family::Phase, 2, 3, r, Branch::Mixed).unwrap();
            assert!(mixed.coords.is_none());
            assert_eq!(mixed.concurrence, 0.0);
        }
        let branch = |n: u32, r: f64| {
            let s = phase::output_state(n, n + 1, r, Branch::Plus).unwrap();
            concurrence(&reduced::two_site(n + 1, s.matrix()).unwrap()).unwrap().concurrence
        };
        assert!((branch(2, 0.9) - 0.152502116752787).abs() < 1e-12);
        assert!(branch(4, 0.9) < branch(2, 0.9));
        assert!(branch(10, 0.9) < branch(4, 0.9));
        assert!(output_pair_entanglement(Family::Phase, 2, 1, 0.5, Branch::Mixed).is_err());
    }
}
