//! Data for each subcommand, as tables.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use superbroadcast::entanglement::output_pair_entanglement;
use superbroadcast::oracle::{self, VerificationReport};
use superbroadcast::phase::Branch;
use superbroadcast::thresholds::{self, MStar, ScalingCurve, SeriesOutputs};
use superbroadcast::{Family, Outputs, Result};

use crate::table::{Cell, Table};

/// `start:stop:step` (inclusive) or a single value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    start: f64,
    stop: f64,
    step: f64,
}

impl Grid {
    pub const UNIT: Grid = Grid { start: 0.0, stop: 1.0, step: 0.01 };

    pub fn points(&self) -> Vec<f64> {
        if self.step == 0.0 {
            return vec![self.start];
        }
        let n = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        (0..=n).map(|i| (self.start + i as f64 * self.step).min(self.stop)).collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
        let parts: Vec<&str> = s.split(':').collect();
        let grid = match parts.as_slice() {
            [x] => {
                let x = num(x)?;
                Grid { start: x, stop: x, step: 0.0 }
            }
            [a, b, h] => Grid { start: num(a)?, stop: num(b)?, step: num(h)? },
            _ => return Err(format!("expected `start:stop:step` or a single value, got `{s}`")),
        };
        let in_unit = |x: f64| (0.0..=1.0).contains(&x);
        if !(in_unit(grid.start) && in_unit(grid.stop)) {
            return Err(format!("grid `{s}` leaves [0, 1]"));
        }
        if parts.len() == 3 && !(grid.start < grid.stop && grid.step > 0.0) {
            return Err(format!("grid `{s}` needs start < stop and a positive step"));
        }
        Ok(grid)
    }
}

/// `a`, or the inclusive range `a:b`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Span {
    first: u32,
    last: u32,
}

impl Span {
    pub fn iter(&self) -> impl Iterator<Item = u32> {
        self.first..=self.last
    }
}

impl FromStr for Span {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let num = |t: &str| t.trim().parse::<u32>().map_err(|_| format!("`{t}` is not a count"));
        let span = match s.split_once(':') {
            None => {
                let x = num(s)?;
                Span { first: x, last: x }
            }
            Some((a, b)) => Span { first: num(a)?, last: num(b)? },
        };
        if span.first == 0 || span.first > span.last {
            return Err(format!("`{s}` is not a nonempty range of positive counts"));
        }
        Ok(span)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.first, self.last)
    }
}

fn outputs_cell(outputs: Outputs) -> Cell {
    match outputs {
        Outputs::Finite(m) => m.into(),
        Outputs::Infinite => "inf".into(),
    }
}

pub fn scaling(family: Family, inputs: u32, outputs: Outputs, grid: Grid) -> Result<Table> {
    let curve = ScalingCurve::new(family, inputs, outputs)?;
    let mut t = Table::new(&["r", "p"]);
    for r in grid.points() {
        t.push(vec![r.into(), curve.eval(r).into()]);
    }
    Ok(t)
}

pub fn threshold(family: Family, inputs: u32, outputs: &[Outputs]) -> Result<Table> {
    let results = outputs
        .par_iter()
        .map(|&m| thresholds::r_star(family, inputs, m))
        .collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["family", "N", "M", "r_star", "sup_r", "sup_p"]);
    for res in results {
        t.push(vec![
            family.to_string().into(),
            inputs.into(),
            outputs_cell(res.outputs),
            res.r_star.into(),
            res.supremum.r.into(),
            res.supremum.p.into(),
        ]);
    }
    Ok(t)
}

pub fn mstar(family: Family, inputs: Span) -> Result<Table> {
    let ns: Vec<u32> = inputs.iter().collect();
    let results = ns.par_iter().map(|&n| thresholds::m_star(family, n)).collect::<Result<Vec<_>>>()?;
    let mut t = Table::new(&["family", "N", "M_star", "method", "sup_p"]);
    for res in results {
        let method = serde_json::to_value(res.method).expect("serializable");
        t.push(vec![
            family.to_string().into(),
            res.inputs.into(),
            match res.m_star {
                MStar::Finite(m) => m.into(),
                other => other.to_string().into(),
            },
            method.as_str().unwrap_or_default().into(),
            res.supremum.into(),
        ]);
    }
    Ok(t)
}

pub fn entanglement(family: Family, inputs: u32, outputs: u32, grid: Grid, branch: Branch) -> Result<Table> {
    let mut t = Table::new(&["r", "beta", "alpha", "C", "E"]);
    for r in grid.points() {
        let e = output_pair_entanglement(family, inputs, outputs, r, branch)?;
        t.push(vec![
            r.into(),
            e.coords.map(|c| c.beta()).into(),
            e.coords.map(|c| c.alpha()).into(),
            e.concurrence.into(),
            e.formation.into(),
        ]);
    }
    Ok(t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Figure {
    /// Universal `p^{N,N+1}(r)`, `N = 10, 20, ..., 100`.
    Fig1,
    /// Universal `1 - r_*` for `M = N+1` and `M = M_*(N)`, `4 <= N <= 100`.
    Fig2,
    /// Phase-covariant `p^{N,N+1}(r)`, `N = 4, 12, ..., 100`.
    Fig3,
    /// Phase-covariant `1 - r_*`, `3 <= N <= 100`.
    Fig4,
    /// Two-site entanglement of formation, `N = 2, 4, ..., 10`, `M = N+1`.
    Fig5,
}

impl FromStr for Figure {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "fig1" => Ok(Figure::Fig1),
            "fig2" => Ok(Figure::Fig2),
            "fig3" => Ok(Figure::Fig3),
            "fig4" => Ok(Figure::Fig4),
            "fig5" => Ok(Figure::Fig5),
            _ => Err(format!("unknown figure `{s}` (expected fig1..fig5)")),
        }
    }
}

const FIG5_GRID: Grid = Grid { start: 0.0, stop: 1.0, step: 0.005 };

pub fn figure(id: Figure) -> Result<Table> {
    match id {
        Figure::Fig1 => scaling_family(Family::Universal, (10..=100).step_by(10)),
        Figure::Fig3 => scaling_family(Family::Phase, (4..=100).step_by(8)),
        Figure::Fig2 => threshold_figure(Family::Universal, 4),
        Figure::Fig4 => threshold_figure(Family::Phase, 3),
        Figure::Fig5 => {
            let mut t = Table::new(&["family", "N", "r", "E"]);
            for family in [Family::Universal, Family::Phase] {
                for n in (2..=10).step_by(2) {
                    for r in FIG5_GRID.points() {
                        let e = output_pair_entanglement(family, n, n + 1, r, Branch::Mixed)?;
                        t.push(vec![family.to_string().into(), n.into(), r.into(), e.formation.into()]);
                    }
                }
            }
            Ok(t)
        }
    }
}

fn scaling_family(family: Family, inputs: impl Iterator<Item = u32>) -> Result<Table> {
    let mut t = Table::new(&["N", "r", "p"]);
    for n in inputs {
        let curve = ScalingCurve::new(family, n, Outputs::Finite(n + 1))?;
        for r in Grid::UNIT.points() {
            t.push(vec![n.into(), r.into(), curve.eval(r).into()]);
        }
    }
    Ok(t)
}

fn threshold_figure(family: Family, first: u32) -> Result<Table> {
    let ns: Vec<u32> = (first..=100).collect();
    let mut t = Table::new(&["series", "N", "M", "one_minus_rstar"]);
    for (label, which) in [("next", SeriesOutputs::NextCopy), ("mstar", SeriesOutputs::MStar)] {
        for p in thresholds::threshold_series(family, &ns, which)? {
            t.push(vec![label.into(), p.inputs.into(), outputs_cell(p.outputs), (1.0 - p.r_star).into()]);
        }
    }
    Ok(t)
}

pub fn verify(max_total_qubits: u32) -> Result<VerificationReport> {
    oracle::verify(max_total_qubits)
}

pub fn verify_table(report: &VerificationReport) -> Table {
    let mut t = Table::new(&[
        "family",
        "N",
        "M",
        "trace_preservation",
        "min_eigenvalue",
        "covariance",
        "scaling_error",
        "single_site_error",
        "two_site_error",
        "state_error",
        "passed",
    ]);
    for c in &report.cases {
        t.push(vec![
            c.family.to_string().into(),
            c.inputs.into(),
            c.outputs.into(),
            c.trace_preservation.into(),
            c.min_eigenvalue.into(),
            c.covariance.max_group_norm.max(c.covariance.max_permutation_norm).into(),
            c.scaling_error.into(),
            c.single_site_error.into(),
            c.two_site_error.into(),
            c.state_error.into(),
            c.passed.to_string().into(),
        ]);
    }
    t
}
