//! Superbroadcasting thresholds.
//!
//! `r_*(N, M)` is the largest `r` at which `p^{N,M}` falls through 1, and
//! `M_*(N)` the largest `M` for which `p^{N,M}` exceeds 1 anywhere. Scans
//! use a fixed grid plus bisection, so results are deterministic.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::phase::PhaseCurve;
use crate::universal::UniversalCurve;

/// Points of the uniform scan over `[0, 1]`, both ends included.
pub const GRID_POINTS: usize = 2001;
/// `p` must exceed `1 + SUPERBROADCAST_MARGIN` to count as superbroadcasting.
/// Several curves touch 1 exactly as `r -> 0` (for instance `p^{5,22}`).
pub const SUPERBROADCAST_MARGIN: f64 = 1e-12;
/// Margin for the large-`M` test used when no closed `M -> infinity` criterion exists.
pub const PROXY_MARGIN: f64 = 1e-6;
/// Outputs at which the large-`M` test is evaluated.
pub const PROXY_OUTPUTS: [u32; 3] = [1 << 10, 1 << 12, 1 << 14];
/// Beyond this, `M_*` is reported as unbounded.
pub const SEARCH_CAP: u32 = 1_000_000;
const BISECTION_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    Universal,
    Phase,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Universal => "universal",
            Family::Phase => "phase",
        })
    }
}

impl FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "universal" => Ok(Family::Universal),
            "phase" => Ok(Family::Phase),
            other => Err(Error::InvalidInput(format!("unknown family {other:?}"))),
        }
    }
}

/// Number of output copies, possibly the `M -> infinity` limit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Outputs {
    Finite(u32),
    Infinite,
}

impl fmt::Display for Outputs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outputs::Finite(m) => write!(f, "{m}"),
            Outputs::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Outputs {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "inf" | "infinity" => Ok(Outputs::Infinite),
            _ => s
                .parse::<u32>()
                .map(Outputs::Finite)
                .map_err(|_| Error::InvalidInput(format!("outputs must be a positive integer or inf, got {s:?}"))),
        }
    }
}

impl Serialize for Outputs {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Outputs::Finite(m) => s.serialize_u32(*m),
            Outputs::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `r -> p^{N,M}(r)` with all `r`-independent work done up front.
#[derive(Clone, Debug)]
pub struct ScalingCurve {
    family: Family,
    inputs: u32,
    outputs: Outputs,
    kind: CurveKind,
}

#[derive(Clone, Debug)]
enum CurveKind {
    Universal(UniversalCurve),
    Phase(PhaseCurve),
}

impl ScalingCurve {
    pub fn new(family: Family, inputs: u32, outputs: Outputs) -> Result<Self> {
        if let Outputs::Finite(m) = outputs {
            if inputs == 0 || m < inputs {
                return Err(Error::InvalidCopies(format!("need M >= N >= 1, got N = {inputs}, M = {m}")));
            }
        }
        let kind = match family {
            Family::Universal => CurveKind::Universal(UniversalCurve::new(inputs)?),
            Family::Phase => CurveKind::Phase(PhaseCurve::new(
                inputs,
                match outputs {
                    Outputs::Finite(m) => Some(m),
                    Outputs::Infinite => None,
                },
            )?),
        };
        Ok(ScalingCurve { family, inputs, outputs, kind })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn inputs(&self) -> u32 {
        self.inputs
    }

    pub fn outputs(&self) -> Outputs {
        self.outputs
    }

    /// `r` is assumed to lie in `[0, 1]`.
    pub fn eval(&self, r: f64) -> f64 {
        match (&self.kind, self.outputs) {
            (CurveKind::Universal(c), Outputs::Finite(m)) => c.at(m, r),
            (CurveKind::Universal(c), Outputs::Infinite) => c.limit(r),
            (CurveKind::Phase(c), _) => c.eval(r),
        }
    }
}

fn grid() -> impl Iterator<Item = f64> {
    (0..GRID_POINTS).map(|i| i as f64 / (GRID_POINTS - 1) as f64)
}

fn exceeds(p: f64) -> bool {
    p > 1.0 + SUPERBROADCAST_MARGIN
}

/// Location and value of `max_r p(r)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Supremum {
    pub r: f64,
    pub p: f64,
}

/// Grid maximum refined by golden-section search on the neighbouring cells.
pub fn supremum(curve: &ScalingCurve) -> Supremum {
    let values: Vec<f64> = grid().map(|r| curve.eval(r)).collect();
    let (best, _) = values
        .iter()
        .enumerate()
        .fold((0, f64::MIN), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    let step = 1.0 / (GRID_POINTS - 1) as f64;
    let lo = best.saturating_sub(1) as f64 * step;
    let hi = ((best + 1).min(GRID_POINTS - 1)) as f64 * step;
    let (mut a, mut b) = (lo, hi);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let x1 = b - ratio * (b - a);
        let x2 = a + ratio * (b - a);
        if curve.eval(x1) < curve.eval(x2) {
            a = x1;
        } else {
            b = x2;
        }
    }
    let mid = 0.5 * (a + b);
    let candidates = [(grid_r(best), values[best]), (mid, curve.eval(mid))];
    let (r, p) = candidates.into_iter().fold((0.0, f64::MIN), |acc, c| if c.1 > acc.1 { c } else { acc });
    Supremum { r, p }
}

fn grid_r(i: usize) -> f64 {
    i as f64 / (GRID_POINTS - 1) as f64
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ThresholdResult {
    pub family: Family,
    pub inputs: u32,
    pub outputs: Outputs,
    /// Largest downward crossing of `p = 1`; `None` without superbroadcasting.
    pub r_star: Option<f64>,
    /// Every bracketed crossing of `p = 1`, ascending.
    pub crossings: Vec<f64>,
    pub supremum: Supremum,
}

fn bisect(curve: &ScalingCurve, mut a: f64, mut b: f64) -> f64 {
    let above_a = exceeds(curve.eval(a));
    while b - a > BISECTION_TOL {
        let mid = 0.5 * (a + b);
        if exceeds(curve.eval(mid)) == above_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    0.5 * (a + b)
}

pub fn threshold(curve: &ScalingCurve) -> ThresholdResult {
    let values: Vec<f64> = grid().map(|r| curve.eval(r)).collect();
    let supremum = supremum(curve);
    let mut crossings = Vec::new();
    let mut r_star = None;
    if exceeds(supremum.p) {
        for i in 0..GRID_POINTS - 1 {
            let (x, y) = (exceeds(values[i]), exceeds(values[i + 1]));
            if x != y {
                let root = bisect(curve, grid_r(i), grid_r(i + 1));
                crossings.push(root);
                if x {
                    r_star = Some(root);
                }
            }
        }
    }
    ThresholdResult {
        family: curve.family(),
        inputs: curve.inputs(),
        outputs: curve.outputs(),
        r_star,
        crossings,
        supremum,
    }
}

/// `r_*(N, M)` for one family.
pub fn r_star(family: Family, inputs: u32, outputs: Outputs) -> Result<ThresholdResult> {
    Ok(threshold(&ScalingCurve::new(family, inputs, outputs)?))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MStar {
    /// No `M >= N + 1` superbroadcasts.
    None,
    Finite(u32),
    Unbounded,
}

impl fmt::Display for MStar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MStar::None => f.write_str("none"),
            MStar::Finite(m) => write!(f, "{m}"),
            MStar::Unbounded => f.write_str("inf"),
        }
    }
}

/// How an `M_*` value was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MStarMethod {
    /// `sup p^{N,infinity} > 1` from the closed limit.
    LimitCriterion,
    /// `sup p^{N,M} > 1 + PROXY_MARGIN` at every `M` in [`PROXY_OUTPUTS`].
    LargeOutputProxy,
    /// Exponential bracketing then bisection over `M`.
    Search,
    /// The search reached [`SEARCH_CAP`] without losing superbroadcasting.
    SearchCap,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MStarResult {
    pub family: Family,
    pub inputs: u32,
    pub m_star: MStar,
    pub method: MStarMethod,
    /// `sup_r p` at `M_*` (or at the largest `M` examined).
    pub supremum: f64,
}

fn sup_at(family: Family, inputs: u32, outputs: Outputs) -> Result<f64> {
    Ok(supremum(&ScalingCurve::new(family, inputs, outputs)?).p)
}

pub fn m_star(family: Family, inputs: u32) -> Result<MStarResult> {
    if inputs == 0 {
        return Err(Error::InvalidCopies("at least one input copy is required".into()));
    }
    let result = |m_star, method, supremum| MStarResult { family, inputs, m_star, method, supremum };
    match family {
        Family::Universal => {
            let limit = sup_at(family, inputs, Outputs::Infinite)?;
            if exceeds(limit) {
                return Ok(result(MStar::Unbounded, MStarMethod::LimitCriterion, limit));
            }
        }
        Family::Phase => {
            let sups = PROXY_OUTPUTS
                .iter()
                .map(|&m| sup_at(family, inputs, Outputs::Finite(m.max(inputs))))
                .collect::<Result<Vec<_>>>()?;
            if sups.iter().all(|&p| p > 1.0 + PROXY_MARGIN) {
                let last = *sups.last().expect("nonempty proxy list");
                return Ok(result(MStar::Unbounded, MStarMethod::LargeOutputProxy, last));
            }
        }
    }
    let first = sup_at(family, inputs, Outputs::Finite(inputs + 1))?;
    if !exceeds(first) {
        return Ok(result(MStar::None, MStarMethod::Search, first));
    }
    // invariant: lo superbroadcasts, hi does not
    let (mut lo, mut lo_sup) = (inputs + 1, first);
    let mut hi = None;
    let mut step = 1u32;
    while hi.is_none() {
        let next = lo.saturating_add(step);
        if next > SEARCH_CAP {
            return Ok(result(MStar::Unbounded, MStarMethod::SearchCap, lo_sup));
        }
        let p = sup_at(family, inputs, Outputs::Finite(next))?;
        if exceeds(p) {
            lo = next;
            lo_sup = p;
            step = step.saturating_mul(2);
        } else {
            hi = Some(next);
        }
    }
    let mut hi = hi.expect("bracket found");
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        let p = sup_at(family, inputs, Outputs::Finite(mid))?;
        if exceeds(p) {
            lo = mid;
            lo_sup = p;
        } else {
            hi = mid;
        }
    }
    Ok(result(MStar::Finite(lo), MStarMethod::Search, lo_sup))
}

/// `log y = exponent * log x + log prefactor`, fitted by least squares.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PowerLaw {
    pub exponent: f64,
    pub prefactor: f64,
}

pub fn power_law_fit(points: &[(f64, f64)]) -> Result<PowerLaw> {
    if points.len() < 2 {
        return Err(Error::InvalidInput("a power-law fit needs at least two points".into()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0 && x.is_finite() && y.is_finite())) {
        return Err(Error::InvalidInput("power-law fits need positive finite data".into()));
    }
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x.ln(), b + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| {
        let dx = x.ln() - mx;
        (a + dx * dx, b + dx * (y.ln() - my))
    });
    if sxx == 0.0 {
        return Err(Error::InvalidInput("all abscissae coincide".into()));
    }
    let exponent = sxy / sxx;
    Ok(PowerLaw { exponent, prefactor: (my - exponent * mx).exp() })
}

/// Which output count a threshold series uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeriesOutputs {
    NextCopy,
    MStar,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesPoint {
    pub inputs: u32,
    pub outputs: Outputs,
    pub r_star: f64,
}

/// `r_*(N, N+1)` or `r_*(N, M_*(N))` for each `N`; inputs without
/// superbroadcasting are skipped. Computed in parallel, returned in input order.
pub fn threshold_series(family: Family, inputs: &[u32], which: SeriesOutputs) -> Result<Vec<SeriesPoint>> {
    let points = inputs
        .par_iter()
        .map(|&n| -> Result<Option<SeriesPoint>> {
            let outputs = match which {
                SeriesOutputs::NextCopy => Outputs::Finite(n + 1),
                SeriesOutputs::MStar => match m_star(family, n)?.m_star {
                    MStar::None => return Ok(None),
                    MStar::Finite(m) => Outputs::Finite(m),
                    MStar::Unbounded => Outputs::Infinite,
                },
            };
            Ok(r_star(family, n, outputs)?.r_star.map(|r| SeriesPoint { inputs: n, outputs, r_star: r }))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(points.into_iter().flatten().collect())
}

/// Fit of `1 - r_*` against `N`.
pub fn fit_series(points: &[SeriesPoint]) -> Result<PowerLaw> {
    let data: Vec<(f64, f64)> = points.iter().map(|p| (f64::from(p.inputs), 1.0 - p.r_star)).collect();
    power_law_fit(&data)
}
