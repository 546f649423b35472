//! One- and two-site reductions of permutation-invariant `M`-qubit states.
//!
//! A state supported on the spin-`j` block (tensored with the identity on its
//! multiplicity space) reduces to a single site as
//!
//! ```text
//! Tr_{M-1}[|jm><jm'| (x) 1] = d_j [ (M-2j)/(2M) delta_{mm'} 1 + (2j/M) T_j(m, m') ],
//! ```
//!
//! where `T_j` traces out the spin-`(j-1/2)` factor of `|jm><jm'|`. Two-site
//! reductions of symmetric states use the analogous `(j-1) (x) 1` split.
//!
//! Qubit basis order throughout: index 0 is spin up.

use nalgebra::{DMatrix, Matrix2, Matrix3, Matrix4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spin::{clebsch_gordan, multiplicity, Spin};

const STATE_TOL: f64 = 1e-10;

fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SingleQubitState {
    matrix: Matrix2<Complex64>,
}

impl SingleQubitState {
    pub fn new(matrix: Matrix2<Complex64>) -> Result<Self> {
        check_density(DMatrix::from_column_slice(2, 2, matrix.as_slice()))?;
        Ok(SingleQubitState { matrix })
    }

    pub fn from_bloch(x: f64, y: f64, z: f64) -> Result<Self> {
        let m = Matrix2::new(
            c((1.0 + z) / 2.0),
            Complex64::new(x, -y) / 2.0,
            Complex64::new(x, y) / 2.0,
            c((1.0 - z) / 2.0),
        );
        Self::new(m)
    }

    pub fn matrix(&self) -> &Matrix2<Complex64> {
        &self.matrix
    }

    /// `(x, y, z)` with `rho = (1 + x X + y Y + z Z) / 2`.
    pub fn bloch(&self) -> [f64; 3] {
        let off = self.matrix[(0, 1)];
        [2.0 * off.re, -2.0 * off.im, (self.matrix[(0, 0)] - self.matrix[(1, 1)]).re]
    }
}

/// Two-qubit density matrix in the computational basis `|00>, |01>, |10>, |11>`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TwoQubitState {
    matrix: Matrix4<Complex64>,
}

fn triplet_vectors() -> [[f64; 4]; 3] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    // |1,-1>, |1,0>, |1,1>
    [[0.0, 0.0, 0.0, 1.0], [0.0, s, s, 0.0], [1.0, 0.0, 0.0, 0.0]]
}

impl TwoQubitState {
    pub fn new(matrix: Matrix4<Complex64>) -> Result<Self> {
        check_density(DMatrix::from_column_slice(4, 4, matrix.as_slice()))?;
        Ok(TwoQubitState { matrix })
    }

    /// Embeds a state given in the triplet basis `|1,-1>, |1,0>, |1,1>`.
    pub fn from_triplet(block: &Matrix3<Complex64>) -> Result<Self> {
        let t = triplet_vectors();
        let matrix = Matrix4::from_fn(|a, b| {
            let mut acc = Complex64::new(0.0, 0.0);
            for mu in 0..3 {
                for nu in 0..3 {
                    acc += block[(mu, nu)] * t[mu][a] * t[nu][b];
                }
            }
            acc
        });
        Self::new(matrix)
    }

    pub fn matrix(&self) -> &Matrix4<Complex64> {
        &self.matrix
    }

    /// Compression onto the triplet subspace, basis `|1,-1>, |1,0>, |1,1>`.
    pub fn triplet_block(&self) -> Matrix3<Complex64> {
        let t = triplet_vectors();
        Matrix3::from_fn(|mu, nu| {
            let mut acc = Complex64::new(0.0, 0.0);
            for a in 0..4 {
                for b in 0..4 {
                    acc += t[mu][a] * self.matrix[(a, b)] * t[nu][b];
                }
            }
            acc
        })
    }

    /// `<Psi-| rho |Psi->`.
    pub fn singlet_weight(&self) -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let v = [0.0, s, -s, 0.0];
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..4 {
            for b in 0..4 {
                acc += v[a] * self.matrix[(a, b)] * v[b];
            }
        }
        acc.re
    }

    /// State of the first qubit.
    pub fn first_site(&self) -> SingleQubitState {
        let m = Matrix2::from_fn(|a, b| self.matrix[(2 * a, 2 * b)] + self.matrix[(2 * a + 1, 2 * b + 1)]);
        SingleQubitState { matrix: m }
    }
}

fn check_density(m: DMatrix<Complex64>) -> Result<()> {
    let herm = (&m - m.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
    if herm > STATE_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (deviation {herm:e})")));
    }
    let tr = m.trace();
    if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
        return Err(Error::InvalidState(format!("trace {tr} is not 1")));
    }
    let min = m.symmetric_eigenvalues().min();
    if min < -STATE_TOL {
        return Err(Error::InvalidState(format!("negative eigenvalue {min:e}")));
    }
    Ok(())
}

fn check_block(state: &DMatrix<f64>, j: Spin) -> Result<f64> {
    if !state.is_square() || state.nrows() != j.dim() {
        return Err(Error::InvalidState(format!(
            "expected a {0}x{0} matrix on the spin-{j} block, got {1}x{2}",
            j.dim(),
            state.nrows(),
            state.ncols()
        )));
    }
    let tr = state.trace();
    if tr.abs() < 1e-300 || !tr.is_finite() {
        return Err(Error::InvalidState("zero trace".into()));
    }
    Ok(tr)
}

/// Normalized single-site reduction of `state (x) 1_{d_j}` on `qubits` qubits.
pub fn single_site(qubits: u32, j: Spin, state: &DMatrix<f64>) -> Result<SingleQubitState> {
    multiplicity(qubits, j)?;
    let tr = check_block(state, j)?;
    let big_m = f64::from(qubits);
    let twice_j = f64::from(j.doubled());
    let mut t = Matrix2::<f64>::zeros();
    if j.doubled() > 0 {
        let a = |tm: i32| ((twice_j + f64::from(tm)) / (2.0 * twice_j)).sqrt();
        let b = |tm: i32| ((twice_j - f64::from(tm)) / (2.0 * twice_j)).sqrt();
        let ms: Vec<i32> = j.magnetic().collect();
        for (i, &tm) in ms.iter().enumerate() {
            t[(0, 0)] += state[(i, i)] * a(tm) * a(tm);
            t[(1, 1)] += state[(i, i)] * b(tm) * b(tm);
            if i > 0 {
                // |j m> contains a_m |.., m-1/2>|up>, |j m-1> contains b_{m-1} |.., m-1/2>|down>
                t[(0, 1)] += state[(i, i - 1)] * a(tm) * b(ms[i - 1]);
                t[(1, 0)] += state[(i - 1, i)] * b(ms[i - 1]) * a(tm);
            }
        }
    }
    let mixed = (big_m - twice_j) / (2.0 * big_m) * tr;
    let reduced = (Matrix2::identity() * mixed + t * (twice_j / big_m)) / tr;
    SingleQubitState::new(reduced.map(c))
}

/// Normalized two-site reduction of a state on the symmetric block `H_{M/2}`,
/// `M >= 2`.
pub fn two_site(qubits: u32, state: &DMatrix<f64>) -> Result<TwoQubitState> {
    if qubits < 2 {
        return Err(Error::InvalidCopies("two-site reduction needs M >= 2".into()));
    }
    let top = Spin::from_doubled(qubits);
    let rest = Spin::from_doubled(qubits - 2);
    let tr = check_block(state, top)?;
    let one = Spin::from_doubled(2);
    let mut block = Matrix3::<f64>::zeros();
    let ms: Vec<i32> = top.magnetic().collect();
    for (i, &tm) in ms.iter().enumerate() {
        for (k, &tk) in ms.iter().enumerate() {
            for (mu, tmu) in [-2, 0, 2].into_iter().enumerate() {
                for (nu, tnu) in [-2, 0, 2].into_iter().enumerate() {
                    // same state of the traced spin-(j-1) factor
                    if tm - tmu != tk - tnu || rest.index_of(tm - tmu).is_none() {
                        continue;
                    }
                    let a = clebsch_gordan(rest, tm - tmu, one, tmu, top, tm)?;
                    let b = clebsch_gordan(rest, tk - tnu, one, tnu, top, tk)?;
                    block[(mu, nu)] += state[(i, k)] * a * b;
                }
            }
        }
    }
    TwoQubitState::from_triplet(&(block / tr).map(c))
}
