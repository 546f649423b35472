//! Explicit total-spin bases of `(C^2)^{(x)K}` and qubit permutations.
//!
//! Qubit 0 is the most significant bit of a basis index; bit value 0 is spin up.

use nalgebra::DMatrix;

use crate::error::Result;
use crate::spin::{clebsch_gordan, Spin};

/// Order in which qubits are coupled one at a time.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CouplingOrder {
    /// `((q0 q1) q2) ...`
    #[default]
    LeftToRight,
    /// `q0 (q1 (... q_{K-1}))`
    RightToLeft,
}

/// All orthonormal copies of the spin-`j` irrep, one `2^K x (2j+1)` matrix
/// per coupling path; column `a` is `m = -j + a`.
#[derive(Clone, Debug)]
pub struct Multiplets {
    pub spin: Spin,
    pub copies: Vec<DMatrix<f64>>,
}

#[derive(Clone, Debug)]
pub struct SpinBasis {
    qubits: u32,
    blocks: Vec<Multiplets>,
}

impl SpinBasis {
    pub fn new(qubits: u32, order: CouplingOrder) -> Result<Self> {
        let mut paths: Vec<(Spin, DMatrix<f64>)> = vec![(Spin::HALF, single_qubit())];
        for done in 1..qubits {
            let mut next = Vec::new();
            for (j, v) in &paths {
                for tj in [j.doubled() + 1, j.doubled().wrapping_sub(1)] {
                    if tj > j.doubled() + 1 {
                        continue;
                    }
                    next.push((Spin::from_doubled(tj), couple(*j, v, Spin::from_doubled(tj), done, order)?));
                }
            }
            paths = next;
        }
        let mut blocks: Vec<Multiplets> = Vec::new();
        for (j, v) in paths {
            match blocks.iter_mut().find(|b| b.spin == j) {
                Some(b) => b.copies.push(v),
                None => blocks.push(Multiplets { spin: j, copies: vec![v] }),
            }
        }
        blocks.sort_by_key(|b| b.spin);
        Ok(SpinBasis { qubits, blocks })
    }

    pub fn qubits(&self) -> u32 {
        self.qubits
    }

    /// Blocks in ascending spin.
    pub fn blocks(&self) -> &[Multiplets] {
        &self.blocks
    }

    pub fn block(&self, j: Spin) -> Option<&Multiplets> {
        self.blocks.iter().find(|b| b.spin == j)
    }

    /// The symmetric (Dicke) multiplet.
    pub fn symmetric(&self) -> &DMatrix<f64> {
        &self.blocks.last().expect("at least one block").copies[0]
    }
}

fn single_qubit() -> DMatrix<f64> {
    // columns m = -1/2 (|1>), m = +1/2 (|0>)
    DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0])
}

/// Couples one more qubit onto a spin-`j` multiplet of `done` qubits.
fn couple(j: Spin, v: &DMatrix<f64>, total: Spin, done: u32, order: CouplingOrder) -> Result<DMatrix<f64>> {
    let old_dim = 1usize << done;
    let mut out = DMatrix::zeros(2 * old_dim, total.dim());
    for (col, tm) in total.magnetic().enumerate() {
        for (bit, ts) in [(0usize, 1i32), (1, -1)] {
            let Some(src) = j.index_of(tm - ts) else { continue };
            let cg = match order {
                CouplingOrder::LeftToRight => clebsch_gordan(j, tm - ts, Spin::HALF, ts, total, tm)?,
                CouplingOrder::RightToLeft => clebsch_gordan(Spin::HALF, ts, j, tm - ts, total, tm)?,
            };
            if cg == 0.0 {
                continue;
            }
            for old in 0..old_dim {
                let x = v[(old, src)];
                if x == 0.0 {
                    continue;
                }
                let idx = match order {
                    CouplingOrder::LeftToRight => old * 2 + bit,
                    CouplingOrder::RightToLeft => bit * old_dim + old,
                };
                out[(idx, col)] += cg * x;
            }
        }
    }
    Ok(out)
}

/// Index map of the qubit permutation `perm`: qubit `q` moves to `perm[q]`.
pub fn permute_index(index: usize, perm: &[usize]) -> usize {
    let k = perm.len();
    let mut out = 0;
    for (q, &target) in perm.iter().enumerate() {
        let bit = (index >> (k - 1 - q)) & 1;
        out |= bit << (k - 1 - target);
    }
    out
}

/// Explicit 0/1 matrix swapping qubits `a` and `b` of `qubits`.
pub fn transposition_matrix(qubits: u32, a: usize, b: usize) -> DMatrix<f64> {
    let mut perm: Vec<usize> = (0..qubits as usize).collect();
    perm.swap(a, b);
    let dim = 1usize << qubits;
    let mut m = DMatrix::zeros(dim, dim);
    for i in 0..dim {
        m[(permute_index(i, &perm), i)] = 1.0;
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spin::{jx_matrix, jz_matrix, multiplicity};

    /// Total `J_z` and `J_x` on `K` qubits.
    fn collective(qubits: u32) -> (DMatrix<f64>, DMatrix<f64>) {
        let dim = 1usize << qubits;
        let mut jz = DMatrix::zeros(dim, dim);
        let mut jx = DMatrix::zeros(dim, dim);
        for i in 0..dim {
            for q in 0..qubits as usize {
                let shift = qubits as usize - 1 - q;
                let up = (i >> shift) & 1 == 0;
                jz[(i, i)] += if up { 0.5 } else { -0.5 };
                jx[(i ^ (1 << shift), i)] += 0.5;
            }
        }
        (jz, jx)
    }

    #[test]
    fn multiplets_are_orthonormal_irreps() {
        for qubits in 1..=6u32 {
            for order in [CouplingOrder::LeftToRight, CouplingOrder::RightToLeft] {
                let basis = SpinBasis::new(qubits, order).unwrap();
                let (jz, jx) = collective(qubits);
                let all: Vec<&DMatrix<f64>> = basis.blocks().iter().flat_map(|b| &b.copies).collect();
                let stacked = DMatrix::from_fn(1 << qubits, all.iter().map(|v| v.ncols()).sum(), |i, k| {
                    let mut k = k;
                    for v in &all {
                        if k < v.ncols() {
                            return v[(i, k)];
                        }
                        k -= v.ncols();
                    }
                    unreachable!()
                });
                let gram = stacked.transpose() * &stacked;
                assert!((gram - DMatrix::identity(1 << qubits, 1 << qubits)).amax() < 1e-12);
                for b in basis.blocks() {
                    assert_eq!(b.copies.len() as f64, multiplicity(qubits, b.spin).unwrap());
                    for v in &b.copies {
                        let z = v.transpose() * &jz * v;
                        let x = v.transpose() * &jx * v;
                        assert!((z - jz_matrix(b.spin).entries()).amax() < 1e-12);
                        assert!((x - jx_matrix(b.spin).entries()).amax() < 1e-12);
                    }
                }
            }
        }
    }

    #[test]
    fn dicke_top_state_is_all_up() {
        let basis = SpinBasis::new(4, CouplingOrder::LeftToRight).unwrap();
        let sym = basis.symmetric();
        assert!((sym[(0, 4)] - 1.0).abs() < 1e-14);
        assert!((sym[(15, 0)] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn transpositions() {
        let t = transposition_matrix(3, 0, 2);
        // |100> (index 4) <-> |001> (index 1)
        assert_eq!(t[(1, 4)], 1.0);
        assert_eq!(t[(4, 1)], 1.0);
        assert_eq!(t[(2, 2)], 1.0);
        assert!((&t * &t - DMatrix::identity(8, 8)).amax() == 0.0);
        let sym = SpinBasis::new(3, CouplingOrder::LeftToRight).unwrap().symmetric().clone();
        assert!((&t * &sym - &sym).amax() < 1e-14);
    }
}
