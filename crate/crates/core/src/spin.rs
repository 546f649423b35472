//! Angular-momentum kernel for SU(2) irreps built from qubits.
//!
//! Spins and magnetic numbers are carried as doubled integers (`2j`, `2m`)
//! so that integer and half-integer ladders share one code path. Matrices
//! on a spin-`j` block are indexed by `a = j + m`, i.e. row 0 is `m = -j`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, OnceLock, RwLock};

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::factorial::ln_factorial;

use crate::error::{Error, Result};
use crate::product_state::block_weight;

/// A spin label `j`, stored as `2j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Spin(u32);

impl Spin {
    pub const ZERO: Spin = Spin(0);
    pub const HALF: Spin = Spin(1);

    pub const fn from_doubled(twice_j: u32) -> Self {
        Spin(twice_j)
    }

    /// Parses a real value; only integers and half-integers are accepted.
    pub fn new(j: f64) -> Result<Self> {
        let twice = 2.0 * j;
        if !twice.is_finite() || twice < 0.0 || (twice - twice.round()).abs() > 1e-12 {
            return Err(Error::InvalidSpin(format!("{j} is not a nonnegative half-integer")));
        }
        Ok(Spin(twice.round() as u32))
    }

    pub const fn doubled(self) -> u32 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 2.0
    }

    /// Block dimension `2j + 1`.
    pub const fn dim(self) -> usize {
        self.0 as usize + 1
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Doubled magnetic numbers `2m` for `m = -j, ..., j`.
    pub fn magnetic(self) -> impl DoubleEndedIterator<Item = i32> + Clone {
        let t = self.0 as i32;
        (0..=self.0 as i32).map(move |a| 2 * a - t)
    }

    /// Matrix index of the doubled magnetic number `twice_m`, if it is on the ladder.
    pub fn index_of(self, twice_m: i32) -> Option<usize> {
        let t = self.0 as i32;
        if twice_m.abs() > t || (twice_m + t) % 2 != 0 {
            None
        } else {
            Some(((twice_m + t) / 2) as usize)
        }
    }

    /// `j(j+1)`.
    pub fn casimir(self) -> f64 {
        let j = self.value();
        j * (j + 1.0)
    }
}

impl fmt::Display for Spin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

/// The admissible total spins of `qubits` spin-1/2 particles, ascending
/// from `j0` (0 or 1/2) to `qubits/2`.
pub fn spin_ladder(qubits: u32) -> Vec<Spin> {
    (qubits % 2..=qubits).step_by(2).map(Spin).collect()
}

fn check_ladder(qubits: u32, j: Spin) -> Result<()> {
    if j.0 > qubits || (qubits - j.0) % 2 != 0 {
        return Err(Error::InvalidSpin(format!(
            "j = {j} does not occur in the decomposition of {qubits} qubits"
        )));
    }
    Ok(())
}

fn binomial_exact(n: u32, k: u32) -> Option<u128> {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) / (i + 1) stays integral at every step
        acc = acc.checked_mul(u128::from(n - i))? / u128::from(i + 1);
    }
    Some(acc)
}

fn ln_binomial(n: u32, k: u32) -> f64 {
    ln_factorial(u64::from(n)) - ln_factorial(u64::from(k)) - ln_factorial(u64::from(n - k))
}

/// Multiplicity `d_j` of the spin-`j` irrep in `qubits` copies of spin 1/2.
///
/// Exact whenever the binomials fit in 128 bits, log-gamma otherwise.
pub fn multiplicity(qubits: u32, j: Spin) -> Result<f64> {
    check_ladder(qubits, j)?;
    let k = (qubits - j.0) / 2;
    if let Some(upper) = binomial_exact(qubits, k) {
        let lower = if k == 0 { Some(0) } else { binomial_exact(qubits, k - 1) };
        if let Some(lower) = lower {
            return Ok((upper - lower) as f64);
        }
    }
    let twice_j = f64::from(j.0);
    let ln_d = (twice_j + 1.0).ln() - (f64::from(qubits + j.0) / 2.0 + 1.0).ln()
        + ln_binomial(qubits, k);
    Ok(ln_d.exp())
}

/// A real symmetric block on `H_j`.
///
/// Every block produced by this crate is real in the Condon-Shortley
/// convention, so the Hermitian condition reduces to symmetry.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianBlock {
    entries: DMatrix<f64>,
}

impl HermitianBlock {
    pub const SYMMETRY_TOL: f64 = 1e-12;

    pub fn new(entries: DMatrix<f64>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() == 0 {
            return Err(Error::InvalidState(format!(
                "block must be square and nonempty, got {}x{}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        let asym = (&entries - entries.transpose()).amax();
        if asym > Self::SYMMETRY_TOL {
            return Err(Error::InvalidState(format!("block is not symmetric (deviation {asym:e})")));
        }
        Ok(HermitianBlock { entries })
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    pub fn into_entries(self) -> DMatrix<f64> {
        self.entries
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace()
    }
}

pub fn jz_matrix(l: Spin) -> HermitianBlock {
    let diag: Vec<f64> = l.magnetic().map(|t| f64::from(t) / 2.0).collect();
    HermitianBlock { entries: DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag)) }
}

/// `[J_x]_{m, m+1} = sqrt(j(j+1) - m(m+1)) / 2`, zero off the ladder.
pub fn jx_element(j: Spin, twice_m: i32) -> f64 {
    let t = j.0 as i64;
    let m = i64::from(twice_m);
    if m < -t || m >= t || (m + t) % 2 != 0 {
        return 0.0;
    }
    // 4 [j(j+1) - m(m+1)] in doubled units
    let arg = t * (t + 2) - m * (m + 2);
    (arg as f64).sqrt() / 4.0
}

pub fn jx_matrix(l: Spin) -> HermitianBlock {
    let n = l.dim();
    let mut jx = DMatrix::zeros(n, n);
    for (a, t) in l.magnetic().enumerate().take(n - 1) {
        let v = jx_element(l, t);
        jx[(a, a + 1)] = v;
        jx[(a + 1, a)] = v;
    }
    HermitianBlock { entries: jx }
}

fn check_magnetic(j: Spin, twice_m: i32) -> Result<()> {
    if j.index_of(twice_m).is_none() {
        return Err(Error::InvalidMagnetic(format!("2m = {twice_m} is not on the ladder of j = {j}")));
    }
    Ok(())
}

fn ln_fact_half(doubled: i64) -> Option<f64> {
    // factorial of doubled/2, which must be a nonnegative integer
    if doubled < 0 || doubled % 2 != 0 {
        None
    } else {
        Some(ln_factorial((doubled / 2) as u64))
    }
}

/// Clebsch-Gordan coefficient `<j1 m1, j2 m2 | j m>` (Condon-Shortley),
/// with all magnetic numbers doubled.
///
/// Racah's single-sum formula in log-factorials. Selection-rule failures
/// (triangle, `m1 + m2 != m`, integrality of `j1 + j2 + j`) give zero.
pub fn clebsch_gordan(j1: Spin, m1: i32, j2: Spin, m2: i32, j: Spin, m: i32) -> Result<f64> {
    check_magnetic(j1, m1)?;
    check_magnetic(j2, m2)?;
    check_magnetic(j, m)?;
    let (a, b, c) = (i64::from(j1.0), i64::from(j2.0), i64::from(j.0));
    let (ma, mb, mc) = (i64::from(m1), i64::from(m2), i64::from(m));
    if ma + mb != mc || c < (a - b).abs() || c > a + b || (a + b + c) % 2 != 0 {
        return Ok(0.0);
    }

    let lf = |x: i64| ln_fact_half(x).expect("integral argument after selection rules");
    let ln_norm = 0.5
        * ((c as f64 + 1.0).ln() + lf(c + a - b) + lf(c - a + b) + lf(a + b - c)
            - lf(a + b + c + 2)
            + lf(c + mc)
            + lf(c - mc)
            + lf(a - ma)
            + lf(a + ma)
            + lf(b - mb)
            + lf(b + mb));

    // k runs over integers; work in doubled units, step 2
    let k_min = 0.max(b - c - ma).max(a + mb - c);
    let k_max = (a + b - c).min(a - ma).min(b + mb);
    let mut sum = 0.0;
    let mut k = k_min;
    while k <= k_max {
        let ln_den = lf(k)
            + lf(a + b - c - k)
            + lf(a - ma - k)
            + lf(b + mb - k)
            + lf(c - b + ma + k)
            + lf(c - a - mb + k);
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign * (ln_norm - ln_den).exp();
        k += 2;
    }
    Ok(sum)
}

/// Rotation taking `J_z` eigenvectors to `J_x` eigenvectors on a spin-`l`
/// block: `(W_l)_{ab} = <l, a | l^x, b>`, which coincides with the Wigner
/// small-d matrix `d^l_{ab}(pi/2)`.
#[derive(Clone, Debug)]
pub struct WignerHalfPi {
    l: Spin,
    entries: DMatrix<f64>,
}

impl WignerHalfPi {
    pub fn spin(&self) -> Spin {
        self.l
    }

    pub fn entries(&self) -> &DMatrix<f64> {
        &self.entries
    }

    /// Entry by doubled magnetic numbers (row along z, column along x).
    pub fn entry(&self, twice_a: i32, twice_b: i32) -> f64 {
        match (self.l.index_of(twice_a), self.l.index_of(twice_b)) {
            (Some(i), Some(k)) => self.entries[(i, k)],
            _ => 0.0,
        }
    }
}

const EIGEN_SNAP_TOL: f64 = 1e-8;

fn compute_wigner_half_pi(l: Spin) -> Result<WignerHalfPi> {
    let n = l.dim();
    let eig = SymmetricEigen::try_new(jx_matrix(l).into_entries(), f64::EPSILON, 0)
        .ok_or_else(|| Error::NumericalDegeneracy(format!("J_x eigensolver did not converge for l = {l}")))?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[x].total_cmp(&eig.eigenvalues[y]));

    let mut entries = DMatrix::zeros(n, n);
    for (col, &src) in order.iter().enumerate() {
        let expected = col as f64 - l.value();
        let got = eig.eigenvalues[src];
        if (got - expected).abs() > EIGEN_SNAP_TOL {
            return Err(Error::NumericalDegeneracy(format!(
                "J_x eigenvalue {got} for l = {l} does not snap to {expected}"
            )));
        }
        let v = eig.eigenvectors.column(src);
        // d^l_{-l, b}(pi/2) > 0 fixes the column sign
        let anchor = v[0];
        if anchor.abs() < 1e-300 {
            return Err(Error::NumericalDegeneracy(format!("vanishing sign anchor for l = {l}")));
        }
        let sign = anchor.signum();
        for row in 0..n {
            entries[(row, col)] = sign * v[row];
        }
    }
    Ok(WignerHalfPi { l, entries })
}

fn wigner_cache() -> &'static RwLock<HashMap<Spin, Arc<WignerHalfPi>>> {
    static CACHE: OnceLock<RwLock<HashMap<Spin, Arc<WignerHalfPi>>>> = OnceLock::new();
    CACHE.get_or_init(Default::default)
}

/// Cached per `l`.
pub fn wigner_half_pi(l: Spin) -> Result<Arc<WignerHalfPi>> {
    if let Some(w) = wigner_cache().read().expect("wigner cache poisoned").get(&l) {
        return Ok(Arc::clone(w));
    }
    let w = Arc::new(compute_wigner_half_pi(l)?);
    let mut cache = wigner_cache().write().expect("wigner cache poisoned");
    Ok(Arc::clone(cache.entry(l).or_insert(w)))
}

pub(crate) fn check_bloch_length(r: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidBlochLength(r));
    }
    Ok(())
}

/// `(r+ r-)^{N/2} exp(J_x log(r+/r-))` on the spin-`l` block, where
/// `N = 2l + extra_half_spins`.
///
/// Evaluated in the `J_x` eigenbasis with the weights in factored form, so it
/// stays finite at `r = 1`.
pub fn jx_weighted_exponential(l: Spin, r: f64, extra_half_spins: u32) -> Result<HermitianBlock> {
    check_bloch_length(r)?;
    if extra_half_spins % 2 != 0 {
        return Err(Error::InvalidSpin(format!(
            "N - 2l = {extra_half_spins} must be even"
        )));
    }
    let copies = l.0 + extra_half_spins;
    let w = wigner_half_pi(l)?;
    let weights: Vec<f64> = l.magnetic().map(|t| block_weight(copies, l, t, r)).collect();
    let scaled = DMatrix::from_fn(l.dim(), l.dim(), |i, k| w.entries[(i, k)] * weights[k]);
    let mut e = &scaled * w.entries.transpose();
    // exact symmetry
    for i in 0..e.nrows() {
        for k in (i + 1)..e.ncols() {
            let avg = 0.5 * (e[(i, k)] + e[(k, i)]);
            e[(i, k)] = avg;
            e[(k, i)] = avg;
        }
    }
    Ok(HermitianBlock { entries: e })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn half(t: u32) -> Spin {
        Spin::from_doubled(t)
    }

    /// Brute-force `d_j`: count the number of `2^M` basis states with
    /// `J_z = j` minus those with `J_z = j + 1`.
    fn multiplicity_by_counting(qubits: u32, j: Spin) -> f64 {
        let count = |twice_m: i64| {
            (0u64..(1 << qubits))
                .filter(|s| 2 * i64::from(s.count_ones()) - i64::from(qubits) == twice_m)
                .count() as f64
        };
        count(i64::from(j.doubled())) - count(i64::from(j.doubled()) + 2)
    }

    #[test]
    fn multiplicity_examples() {
        assert_eq!(multiplicity(4, Spin::new(2.0).unwrap()).unwrap(), 1.0);
        assert_eq!(multiplicity(4, Spin::new(1.0).unwrap()).unwrap(), 3.0);
        assert_eq!(multiplicity(2, Spin::ZERO).unwrap(), 1.0);
        for qubits in 1..=12 {
            for j in spin_ladder(qubits) {
                assert_eq!(multiplicity(qubits, j).unwrap(), multiplicity_by_counting(qubits, j));
            }
        }
    }

    #[test]
    fn multiplicity_rejects_bad_labels() {
        assert!(multiplicity(4, half(1)).is_err());
        assert!(multiplicity(4, half(6)).is_err());
        assert!(multiplicity(3, Spin::ZERO).is_err());
    }

    #[test]
    fn dimension_count_up_to_200() {
        for qubits in 1..=200u32 {
            let total: f64 = spin_ladder(qubits)
                .into_iter()
                .map(|j| j.dim() as f64 * multiplicity(qubits, j).unwrap())
                .sum();
            let expect = 2f64.powi(qubits as i32);
            assert!(((total - expect) / expect).abs() < 1e-9, "M = {qubits}: {total} vs {expect}");
        }
    }

    #[test]
    fn log_gamma_branch_agrees_with_exact_branch() {
        // M = 140 overflows u128 binomials near the middle
        let qubits = 140;
        let j = Spin::from_doubled(2);
        let d = multiplicity(qubits, j).unwrap();
        let ln = (3.0f64).ln() - (71.0f64 + 1.0).ln() + ln_binomial(qubits, 69);
        assert!((d - ln.exp()).abs() / d < 1e-12);
        assert!(d.is_finite() && d > 0.0);
    }

    #[test]
    fn spin_operator_examples() {
        let jz = jz_matrix(Spin::HALF);
        assert_eq!(jz.entries()[(0, 0)], -0.5);
        assert_eq!(jz.entries()[(1, 1)], 0.5);
        let jx = jx_matrix(Spin::HALF);
        assert_eq!(jx.entries()[(0, 1)], 0.5);
        assert_eq!(jx.entries()[(1, 0)], 0.5);
        let jx1 = jx_matrix(Spin::from_doubled(2));
        assert_abs_diff_eq!(jx1.entries()[(0, 1)], 1.0 / 2f64.sqrt(), epsilon = 1e-15);
        for t in 0..12 {
            assert_eq!(jz_matrix(half(t)).trace(), 0.0);
        }
    }

    #[test]
    fn spin_commutation_relation() {
        // [J_z, J_+] = J_+ with J_+ the upper part of 2 J_x
        for t in 1..10 {
            let l = half(t);
            let jz = jz_matrix(l).into_entries();
            let jx = jx_matrix(l).into_entries();
            // ascending-m order puts J_+ below the diagonal
            let jp = jx.lower_triangle() * 2.0;
            let comm = &jz * &jp - &jp * &jz;
            assert!((comm - &jp).amax() < 1e-12);
            let jx2: f64 = (&jx * &jx).trace();
            let expected = l.casimir() * l.dim() as f64 / 3.0;
            assert!((jx2 - expected).abs() < 1e-10);
        }
    }

    #[test]
    fn cg_examples() {
        let h = Spin::HALF;
        let one = Spin::from_doubled(2);
        assert_abs_diff_eq!(clebsch_gordan(h, 1, h, 1, one, 2).unwrap(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            clebsch_gordan(h, 1, h, -1, one, 0).unwrap(),
            1.0 / 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            clebsch_gordan(h, 1, h, -1, Spin::ZERO, 0).unwrap(),
            1.0 / 2f64.sqrt(),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            clebsch_gordan(h, -1, h, 1, Spin::ZERO, 0).unwrap(),
            -1.0 / 2f64.sqrt(),
            epsilon = 1e-15
        );
        // <j-1/2, m-1/2; 1/2 1/2 | j m> = sqrt((j+m)/2j)
        for tj in 1..14u32 {
            let j = half(tj);
            let lower = half(tj - 1);
            for tm in j.magnetic() {
                if lower.index_of(tm - 1).is_none() {
                    continue;
                }
                let cg = clebsch_gordan(lower, tm - 1, h, 1, j, tm).unwrap();
                let expect = ((f64::from(tj as i32 + tm) / 2.0) / f64::from(tj)).sqrt();
                assert_abs_diff_eq!(cg, expect, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn cg_selection_rules_and_errors() {
        let h = Spin::HALF;
        assert_eq!(clebsch_gordan(h, 1, h, 1, Spin::ZERO, 0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(h, 1, h, 1, half(2), 0).unwrap(), 0.0);
        assert_eq!(clebsch_gordan(half(2), 0, half(2), 0, half(8), 0).unwrap(), 0.0);
        assert!(clebsch_gordan(h, 3, h, 1, half(2), 2).is_err());
        assert!(clebsch_gordan(h, 0, h, 1, half(2), 1).is_err());
    }

    #[test]
    fn cg_unitarity_exhaustive() {
        // sum_J <j1 m1, j2 m2 | J M><j1 m1', j2 m2' | J M> = delta
        for t1 in 0..=12u32 {
            for t2 in 0..=(12 - t1) {
                let (j1, j2) = (half(t1), half(t2));
                let totals: Vec<Spin> = ((t1 as i32 - t2 as i32).unsigned_abs()..=t1 + t2)
                    .step_by(2)
                    .map(half)
                    .collect();
                for tm in -((t1 + t2) as i32)..=((t1 + t2) as i32) {
                    if (tm + (t1 + t2) as i32) % 2 != 0 {
                        continue;
                    }
                    let pairs: Vec<(i32, i32)> = j1
                        .magnetic()
                        .filter_map(|a| j2.index_of(tm - a).map(|_| (a, tm - a)))
                        .collect();
                    for &(a, b) in &pairs {
                        for &(c, d) in &pairs {
                            let s: f64 = totals
                                .iter()
                                .filter(|jj| jj.index_of(tm).is_some())
                                .map(|&jj| {
                                    clebsch_gordan(j1, a, j2, b, jj, tm).unwrap()
                                        * clebsch_gordan(j1, c, j2, d, jj, tm).unwrap()
                                })
                                .sum();
                            let delta = if a == c { 1.0 } else { 0.0 };
                            assert!((s - delta).abs() < 1e-12, "j1={j1} j2={j2} m={tm}: {s}");
                        }
                    }
                }
            }
        }
    }

    /// Wigner's explicit formula for `d^j_{m'm}(beta)`; independent of the
    /// eigen-decomposition route.
    fn wigner_small_d(j: Spin, tmp: i32, tm: i32, beta: f64) -> f64 {
        let tj = j.doubled() as i32;
        let f = |x: i32| ln_factorial((x / 2) as u64);
        let (c, s) = ((beta / 2.0).cos(), (beta / 2.0).sin());
        let mut acc = 0.0;
        let mut ts = 0;
        while ts <= 2 * tj {
            let args = [tj + tm - ts, ts, tmp - tm + ts, tj - tmp - ts];
            if args.iter().all(|&x| x >= 0) {
                let ln = 0.5 * (f(tj + tmp) + f(tj - tmp) + f(tj + tm) + f(tj - tm))
                    - args.iter().map(|&x| f(x)).sum::<f64>();
                let sign = if ((tmp - tm + ts) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                let pc = (2 * tj + tm - tmp - 2 * ts) / 2;
                let ps = (tmp - tm + 2 * ts) / 2;
                acc += sign * ln.exp() * c.powi(pc) * s.powi(ps);
            }
            ts += 2;
        }
        acc
    }

    #[test]
    fn wigner_half_pi_matches_small_d() {
        for t in 0..=30u32 {
            let l = half(t);
            let w = wigner_half_pi(l).unwrap();
            for a in l.magnetic() {
                for b in l.magnetic() {
                    let d = wigner_small_d(l, a, b, std::f64::consts::FRAC_PI_2);
                    assert!(
                        (w.entry(a, b) - d).abs() < 1e-10,
                        "l={l} a={a} b={b}: {} vs {d}",
                        w.entry(a, b)
                    );
                }
            }
        }
    }

    #[test]
    fn wigner_half_pi_spin_half() {
        let w = wigner_half_pi(Spin::HALF).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_abs_diff_eq!(w.entry(1, 1), s, epsilon = 1e-15);
        assert_abs_diff_eq!(w.entry(-1, 1), s, epsilon = 1e-15);
        assert_abs_diff_eq!(w.entry(1, -1), -s, epsilon = 1e-15);
        assert_abs_diff_eq!(w.entry(-1, -1), s, epsilon = 1e-15);
    }

    #[test]
    fn wigner_half_pi_properties() {
        for t in 0..=40u32 {
            let l = half(t);
            let w = wigner_half_pi(l).unwrap();
            let m = w.entries();
            let n = l.dim();
            assert!((m.transpose() * m - DMatrix::<f64>::identity(n, n)).amax() < 1e-10);
            let diag = m.transpose() * jx_matrix(l).entries() * m;
            let expect = jz_matrix(l).into_entries();
            assert!((diag - expect).amax() < 1e-10);
            for a in l.magnetic() {
                for b in l.magnetic() {
                    let sign = if ((a - b) / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    assert!((w.entry(a, b) - sign * w.entry(b, a)).abs() < 1e-10);
                    assert!((w.entry(-a, -b) - sign * w.entry(a, b)).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn weighted_exponential_examples() {
        // r = 0: 2^-N identity
        let e = jx_weighted_exponential(half(3), 0.0, 2).unwrap();
        let expect = DMatrix::<f64>::identity(4, 4) / 32.0;
        assert!((e.entries() - expect).amax() < 1e-15);

        // r = 1, l = N/2: projector onto |l^x, l>
        let l = half(4);
        let e = jx_weighted_exponential(l, 1.0, 0).unwrap();
        let w = wigner_half_pi(l).unwrap();
        let v = w.entries().column(4).into_owned();
        assert!((e.entries() - &v * v.transpose()).amax() < 1e-12);

        // r = 1, l < N/2: zero
        let e = jx_weighted_exponential(l, 1.0, 2).unwrap();
        assert_eq!(e.entries().amax(), 0.0);

        assert!(jx_weighted_exponential(l, 1.5, 0).is_err());
        assert!(jx_weighted_exponential(l, 0.5, 1).is_err());
    }

    #[test]
    fn weighted_exponential_matches_power_series() {
        // (r+ r-)^{N/2} exp(t J_x), t = log(r+/r-), via a truncated Taylor series
        let r: f64 = 0.4;
        let (rp, rm) = ((1.0 + r) / 2.0, (1.0 - r) / 2.0);
        let t = (rp / rm).ln();
        for twice_l in 0..=6u32 {
            let l = half(twice_l);
            let extra = 2;
            let jx = jx_matrix(l).into_entries() * t;
            let mut term = DMatrix::<f64>::identity(l.dim(), l.dim());
            let mut sum = term.clone();
            for k in 1..80 {
                term = &term * &jx / f64::from(k);
                sum += &term;
            }
            let n = f64::from(twice_l + extra);
            sum *= (rp * rm).powf(n / 2.0);
            let e = jx_weighted_exponential(l, r, extra).unwrap();
            assert!((e.entries() - sum).amax() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn prop_wigner_is_orthogonal(t in 0u32..60) {
            let w = wigner_half_pi(half(t)).unwrap();
            let m = w.entries();
            let n = m.nrows();
            prop_assert!((m.transpose() * m - DMatrix::<f64>::identity(n, n)).amax() < 1e-10);
        }

        #[test]
        fn prop_jx_element_symmetric(t in 0u32..80, a in 0u32..80) {
            let l = half(t);
            let tm = 2 * (a % (t + 1)) as i32 - t as i32;
            // [J_x]_{m,m+1} = [J_x]_{-(m+1),-m}
            prop_assert!((jx_element(l, tm) - jx_element(l, -tm - 2)).abs() < 1e-12);
        }
    }
}
