//! Dense Choi operators of the broadcasting channels.
//!
//! `R` lives on `output (x) input`, basis index `out * 2^N + in`, and acts as
//! `E(rho) = Tr_in[(1 (x) rho^T) R]`.

use nalgebra::{DMatrix, Matrix2};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use super::basis::{permute_index, CouplingOrder, SpinBasis};
use crate::error::{Error, Result};
use crate::phase::{self, PhaseExtremalSpec};
use crate::product_state::{Axis, BlochQubit};
use crate::spin::{clebsch_gordan, Spin};
use crate::thresholds::Family;
use crate::universal::{self, UniversalExtremalSpec};

/// Largest `M + N` the dense oracle accepts.
pub const MAX_ORACLE_QUBITS: u32 = 14;
/// Tolerance for the PSD and trace-preservation checks.
pub const CHOI_TOL: f64 = 1e-9;
const COVARIANCE_SAMPLES: usize = 12;
const COVARIANCE_SEED: u64 = 0x5eed_c0de;

/// Which channel to assemble.
#[derive(Clone, Debug)]
pub enum ChannelSpec {
    Universal(UniversalExtremalSpec),
    /// Convex mixture of phase-covariant extremal channels.
    Phase(Vec<(f64, PhaseExtremalSpec)>),
}

impl ChannelSpec {
    pub fn optimal(family: Family, inputs: u32, outputs: u32) -> Result<Self> {
        Ok(match family {
            Family::Universal => ChannelSpec::Universal(universal::optimal_spec(inputs, outputs)?),
            Family::Phase => ChannelSpec::Phase(
                phase::optimal_spec(inputs, outputs)?
                    .branches()
                    .into_iter()
                    .map(|(w, s)| (w, s.clone()))
                    .collect(),
            ),
        })
    }

    fn sizes(&self) -> Result<(u32, u32)> {
        match self {
            ChannelSpec::Universal(s) => Ok((s.inputs(), s.outputs())),
            ChannelSpec::Phase(branches) => {
                let (_, first) = branches.first().ok_or_else(|| Error::InvalidSpec("empty mixture".into()))?;
                if branches.iter().any(|(_, s)| (s.inputs(), s.outputs()) != (first.inputs(), first.outputs())) {
                    return Err(Error::InvalidSpec("mixture of channels with different sizes".into()));
                }
                Ok((first.inputs(), first.outputs()))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct DenseChoi {
    inputs: u32,
    outputs: u32,
    family: Family,
    matrix: DMatrix<Complex64>,
}

fn check_size(inputs: u32, outputs: u32) -> Result<()> {
    let qubits = inputs + outputs;
    if qubits > MAX_ORACLE_QUBITS {
        return Err(Error::OversizeInstance { qubits, limit: MAX_ORACLE_QUBITS });
    }
    Ok(())
}

/// Applies `Y = [[0, -1], [1, 0]]` to every qubit of each column.
fn apply_y_all(v: &DMatrix<f64>, qubits: u32) -> DMatrix<f64> {
    let mut out = v.clone();
    for q in 0..qubits {
        let mask = 1usize << (qubits - 1 - q);
        let prev = out.clone();
        for col in 0..out.ncols() {
            for i in 0..out.nrows() {
                // Y|0> = |1>, Y|1> = -|0>
                out[(i, col)] = if i & mask == 0 { -prev[(i | mask, col)] } else { prev[(i & !mask, col)] };
            }
        }
    }
    out
}

/// Adds `A S A^T` for every pair of output and input multiplet copies.
fn add_block(
    r: &mut DMatrix<f64>,
    kernel: &DMatrix<f64>,
    out_copies: &[DMatrix<f64>],
    in_copies: &[DMatrix<f64>],
) {
    for v in out_copies {
        for u in in_copies {
            let a = v.kronecker(u);
            let b = &a * kernel;
            r.gemm(1.0, &b, &a.transpose(), 1.0);
        }
    }
}

/// `P^J` on `H_j (x) H_l`, index `a_j * (2l+1) + a_l`.
fn coupled_projector(j: Spin, l: Spin, total: Spin) -> Result<DMatrix<f64>> {
    let dim = j.dim() * l.dim();
    let mut p = DMatrix::zeros(dim, dim);
    for tmt in total.magnetic() {
        let mut v = nalgebra::DVector::zeros(dim);
        for (a, tm) in j.magnetic().enumerate() {
            if let Some(b) = l.index_of(tmt - tm) {
                v[a * l.dim() + b] = clebsch_gordan(j, tm, l, tmt - tm, total, tmt)?;
            }
        }
        p += &v * v.transpose();
    }
    Ok(p)
}

impl DenseChoi {
    /// Assembles and validates `R`.
    pub fn build(spec: &ChannelSpec, order: CouplingOrder) -> Result<Self> {
        let choi = Self::assemble(spec, order)?;
        choi.validate()?;
        Ok(choi)
    }

    /// Assembles `R` without checking positivity or trace preservation.
    pub fn assemble(spec: &ChannelSpec, order: CouplingOrder) -> Result<Self> {
        let (inputs, outputs) = spec.sizes()?;
        check_size(inputs, outputs)?;
        let out_basis = SpinBasis::new(outputs, order)?;
        let in_basis = SpinBasis::new(inputs, order)?;
        let dim = 1usize << (inputs + outputs);
        let mut r = DMatrix::<f64>::zeros(dim, dim);
        let family = match spec {
            ChannelSpec::Universal(s) => {
                for c in s.choices() {
                    let kernel = coupled_projector(c.output_spin, c.input_spin, c.total)? * s.coefficient(c)?;
                    let out = &out_basis.block(c.output_spin).expect("output spin on ladder").copies;
                    let inp: Vec<DMatrix<f64>> = in_basis
                        .block(c.input_spin)
                        .expect("input spin on ladder")
                        .copies
                        .iter()
                        .map(|u| apply_y_all(u, inputs))
                        .collect();
                    add_block(&mut r, &kernel, out, &inp);
                }
                Family::Universal
            }
            ChannelSpec::Phase(branches) => {
                for (weight, s) in branches {
                    for c in s.choices() {
                        let (j, l) = (c.output_spin, c.input_spin);
                        let mut v = nalgebra::DVector::zeros(j.dim() * l.dim());
                        for (b, tn) in l.magnetic().enumerate() {
                            let a = j.index_of(tn + c.twice_offset).expect("validated offset");
                            v[a * l.dim() + b] = 1.0;
                        }
                        let kernel = &v * v.transpose() * (weight * s.coefficient(c)?);
                        let out = &out_basis.block(j).expect("output spin on ladder").copies;
                        let inp = &in_basis.block(l).expect("input spin on ladder").copies;
                        add_block(&mut r, &kernel, out, inp);
                    }
                }
                Family::Phase
            }
        };
        Ok(DenseChoi { inputs, outputs, family, matrix: r.map(|x| Complex64::new(x, 0.0)) })
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn outputs(&self) -> u32 {
        self.outputs
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    /// `Tr_out[R]`, which must be the identity on the input space.
    pub fn input_marginal(&self) -> DMatrix<Complex64> {
        let n = 1usize << self.inputs;
        let mut t = DMatrix::zeros(n, n);
        for a in 0..1usize << self.outputs {
            t += self.matrix.view((a * n, a * n), (n, n));
        }
        t
    }

    pub fn trace_preservation_residual(&self) -> f64 {
        let n = 1usize << self.inputs;
        (self.input_marginal() - DMatrix::identity(n, n)).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Smallest eigenvalue, computed per sector of `J_z^out - J_z^in`;
    /// the second value is the norm of entries coupling different sectors.
    pub fn min_eigenvalue(&self) -> (f64, f64) {
        let n = self.inputs as i32;
        let charge = |i: usize| {
            let out = i >> self.inputs;
            let inp = i & ((1 << self.inputs) - 1);
            // number of up spins out minus in
            (self.outputs as i32 - out.count_ones() as i32) - (n - inp.count_ones() as i32)
        };
        let dim = self.matrix.nrows();
        let mut cross = 0.0f64;
        let mut sectors: std::collections::BTreeMap<i32, Vec<usize>> = Default::default();
        for i in 0..dim {
            sectors.entry(charge(i)).or_default().push(i);
        }
        for i in 0..dim {
            for k in 0..dim {
                if charge(i) != charge(k) {
                    cross += self.matrix[(i, k)].norm_sqr();
                }
            }
        }
        let real = self.matrix.iter().all(|z| z.im.abs() < 1e-15);
        let min = sectors
            .values()
            .map(|idx| {
                if real {
                    let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.matrix[(idx[a], idx[b])].re);
                    block.symmetric_eigenvalues().min()
                } else {
                    let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| self.matrix[(idx[a], idx[b])]);
                    block.symmetric_eigenvalues().min()
                }
            })
            .fold(f64::INFINITY, f64::min);
        (min, cross.sqrt())
    }

    fn validate(&self) -> Result<()> {
        let tp = self.trace_preservation_residual();
        if tp > CHOI_TOL {
            return Err(Error::InvariantViolation { what: "trace preservation".into(), norm: tp });
        }
        let (min, cross) = self.min_eigenvalue();
        if min < -CHOI_TOL {
            return Err(Error::InvariantViolation { what: "positivity".into(), norm: -min });
        }
        if cross > CHOI_TOL {
            return Err(Error::InvariantViolation { what: "charge conservation".into(), norm: cross });
        }
        Ok(())
    }
}

/// The optimal channel of a family.
pub fn build_choi(inputs: u32, outputs: u32, family: Family) -> Result<DenseChoi> {
    check_size(inputs, outputs)?;
    DenseChoi::build(&ChannelSpec::optimal(family, inputs, outputs)?, CouplingOrder::LeftToRight)
}

fn single_qubit_state(qubit: &BlochQubit) -> DMatrix<Complex64> {
    let r = qubit.r();
    let m = match qubit.axis() {
        Axis::Z => [(1.0 + r) / 2.0, 0.0, 0.0, (1.0 - r) / 2.0],
        Axis::X => [0.5, r / 2.0, r / 2.0, 0.5],
    };
    DMatrix::from_row_slice(2, 2, &m).map(|x| Complex64::new(x, 0.0))
}

/// `E(rho^{(x)N})` as a dense `2^M x 2^M` matrix.
pub fn apply_channel(choi: &DenseChoi, qubit: BlochQubit) -> Result<DMatrix<Complex64>> {
    let single = single_qubit_state(&qubit);
    let rho = (1..choi.inputs).fold(single.clone(), |acc, _| acc.kronecker(&single));
    apply_to_state(choi, &rho)
}

/// `E(rho)` for an arbitrary `N`-qubit input.
pub fn apply_to_state(choi: &DenseChoi, rho: &DMatrix<Complex64>) -> Result<DMatrix<Complex64>> {
    let n = 1usize << choi.inputs;
    if rho.nrows() != n || rho.ncols() != n {
        return Err(Error::InvalidState(format!(
            "input must be {n}x{n}, got {}x{}",
            rho.nrows(),
            rho.ncols()
        )));
    }
    let m = 1usize << choi.outputs;
    let mut out = DMatrix::zeros(m, m);
    for a in 0..m {
        for a2 in 0..m {
            let block = choi.matrix.view((a * n, a2 * n), (n, n));
            // sum_{b,c} rho[c,b] R[(a,c),(a2,b)]
            let mut acc = Complex64::new(0.0, 0.0);
            for c in 0..n {
                for b in 0..n {
                    acc += rho[(c, b)] * block[(c, b)];
                }
            }
            out[(a, a2)] = acc;
        }
    }
    Ok(out)
}

/// Partial trace keeping the first `keep` qubits of a `qubits`-qubit state.
pub fn reduce_leading(state: &DMatrix<Complex64>, qubits: u32, keep: u32) -> DMatrix<Complex64> {
    let rest = 1usize << (qubits - keep);
    let k = 1usize << keep;
    DMatrix::from_fn(k, k, |a, b| (0..rest).map(|t| state[(a * rest + t, b * rest + t)]).sum())
}

/// Applies the 2x2 `u` to one qubit on the row side and `u^dagger` on the column side.
fn conjugate_local(m: &mut DMatrix<Complex64>, qubit: u32, qubits: u32, u: &Matrix2<Complex64>) {
    let mask = 1usize << (qubits - 1 - qubit);
    let dim = m.nrows();
    for col in 0..dim {
        for i in 0..dim {
            if i & mask == 0 {
                let (x0, x1) = (m[(i, col)], m[(i | mask, col)]);
                m[(i, col)] = u[(0, 0)] * x0 + u[(0, 1)] * x1;
                m[(i | mask, col)] = u[(1, 0)] * x0 + u[(1, 1)] * x1;
            }
        }
    }
    for row in 0..dim {
        for i in 0..dim {
            if i & mask == 0 {
                let (y0, y1) = (m[(row, i)], m[(row, i | mask)]);
                m[(row, i)] = y0 * u[(0, 0)].conj() + y1 * u[(0, 1)].conj();
                m[(row, i | mask)] = y0 * u[(1, 0)].conj() + y1 * u[(1, 1)].conj();
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CovarianceReport {
    pub group: Family,
    pub samples: usize,
    /// `max ||G R G^dagger - R||_F` over the sampled group elements.
    pub max_group_norm: f64,
    /// `max ||Pi R Pi^T - R||_F` over transpositions of outputs and of inputs.
    pub max_permutation_norm: f64,
}

/// Group samples: seeded Haar-random SU(2) elements, or an evenly spaced
/// grid of `z` rotations.
pub fn group_samples(group: Family) -> Vec<Matrix2<Complex64>> {
    match group {
        Family::Universal => {
            let mut rng = ChaCha8Rng::seed_from_u64(COVARIANCE_SEED);
            (0..COVARIANCE_SAMPLES)
                .map(|_| {
                    let g: [f64; 4] = std::array::from_fn(|_| rng.sample(StandardNormal));
                    let norm = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let a = Complex64::new(g[0], g[1]) / norm;
                    let b = Complex64::new(g[2], g[3]) / norm;
                    Matrix2::new(a, -b.conj(), b, a.conj())
                })
                .collect()
        }
        Family::Phase => (0..COVARIANCE_SAMPLES)
            .map(|i| {
                let phi = std::f64::consts::TAU * (i as f64 + 0.5) / COVARIANCE_SAMPLES as f64;
                let half = Complex64::from_polar(1.0, phi / 2.0);
                Matrix2::new(half.conj(), Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), half)
            })
            .collect(),
    }
}

/// Commutator norms of `R` with `U^{(x)M} (x) U*^{(x)N}` for sampled `U` of
/// the given group, and with every transposition of like copies.
pub fn check_covariance(choi: &DenseChoi, group: Family) -> CovarianceReport {
    let qubits = choi.inputs + choi.outputs;
    let samples = group_samples(group);
    let mut max_group_norm = 0.0f64;
    for u in &samples {
        let mut m = choi.matrix.clone();
        for q in 0..qubits {
            let local = if q < choi.outputs { *u } else { u.map(|z| z.conj()) };
            conjugate_local(&mut m, q, qubits, &local);
        }
        max_group_norm = max_group_norm.max((m - &choi.matrix).norm());
    }
    let mut max_permutation_norm = 0.0f64;
    let ranges = [(0, choi.outputs as usize), (choi.outputs as usize, qubits as usize)];
    for (lo, hi) in ranges {
        for a in lo..hi {
            for b in a + 1..hi {
                let mut perm: Vec<usize> = (0..qubits as usize).collect();
                perm.swap(a, b);
                let dim = choi.matrix.nrows();
                let map: Vec<usize> = (0..dim).map(|i| permute_index(i, &perm)).collect();
                let mut diff = 0.0;
                for i in 0..dim {
                    for k in 0..dim {
                        diff += (choi.matrix[(map[i], map[k])] - choi.matrix[(i, k)]).norm_sqr();
                    }
                }
                max_permutation_norm = max_permutation_norm.max(diff.sqrt());
            }
        }
    }
    CovarianceReport { group, samples: samples.len(), max_group_norm, max_permutation_norm }
}
