//! Post-processing of simulation reports: discrete residuals of symbolic
//! field equations, the action audit, energy balance and fits.

use std::collections::HashMap;

use super::grid::Boundary;
use super::report::SimReport;
use crate::bundles::Chart;
use crate::error::{Error, Result};
use crate::symcore::{Poly, Symbol};

/// Which chart directions the simulated `(t, x)` correspond to; every other
/// direction is treated as constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Axes {
    pub time: usize,
    pub space: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualCheck {
    pub max_norm: f64,
    pub per_snapshot: Vec<Option<f64>>,
}

/// Evaluates `residual` (a polynomial in the first field, its first and
/// second jets and model constants) on the snapshots. Time derivatives use
/// centred differences over the snapshot spacing; space derivatives use the
/// wide centred stencil over `2 dx`, so that the check measures truncation
/// error even when the snapshots are the scheme's own time levels. Returns
/// the max norm over interior nodes of interior snapshots.
pub fn residual_check(
    report: &SimReport,
    residual: &Poly,
    chart: &Chart,
    axes: Axes,
    constants: &HashMap<Symbol, f64>,
) -> Result<ResidualCheck> {
    let snaps = &report.snapshots;
    if snaps.len() < 3 {
        return Err(Error::InsufficientSnapshots(format!(
            "{} snapshots; need three equally spaced",
            snaps.len()
        )));
    }
    let gap = snaps[1].step - snaps[0].step;
    let grid = &report.grid;
    let h = gap as f64 * report.dt;
    let dx = grid.dx();
    let (t, x) = (axes.time, axes.space);

    let mut slots: HashMap<Symbol, Slot> = HashMap::new();
    slots.insert(chart.base(0).clone(), Slot::U);
    slots.insert(chart.vel(0, t).clone(), Slot::Ut);
    slots.insert(chart.vel(0, x).clone(), Slot::Ux);
    slots.insert(chart.base_jet2(0, t, t), Slot::Utt);
    slots.insert(chart.base_jet2(0, x, x), Slot::Uxx);
    slots.insert(chart.base_jet2(0, x, t), Slot::Uxt);
    for a in 0..chart.k() {
        if a != t && a != x {
            slots.insert(chart.vel(0, a).clone(), Slot::Zero);
            for b in 0..chart.k() {
                slots.insert(chart.base_jet2(0, a, b), Slot::Zero);
            }
        }
    }
    let compiled = Compiled::new(residual, &slots, constants)?;

    let mut per_snapshot = vec![None; snaps.len()];
    let mut max_norm: f64 = 0.0;
    let mut evaluated = 0;
    for m in 1..snaps.len() - 1 {
        if snaps[m].step - snaps[m - 1].step != gap || snaps[m + 1].step - snaps[m].step != gap {
            continue;
        }
        let (prev, cur, next) = (&snaps[m - 1].field, &snaps[m].field, &snaps[m + 1].field);
        let mut norm: f64 = 0.0;
        for j in grid.interior() {
            let Some((l, r)) = wide_neighbours(grid, j) else {
                continue;
            };
            let values = [
                cur[j],
                (next[j] - prev[j]) / (2.0 * h),
                (cur[r] - cur[l]) / (4.0 * dx),
                (next[j] - 2.0 * cur[j] + prev[j]) / (h * h),
                (cur[r] - 2.0 * cur[j] + cur[l]) / (4.0 * dx * dx),
                (next[r] - next[l] - prev[r] + prev[l]) / (8.0 * dx * h),
                0.0,
            ];
            norm = norm.max(compiled.eval(&values).abs());
        }
        per_snapshot[m] = Some(norm);
        max_norm = max_norm.max(norm);
        evaluated += 1;
    }
    if evaluated == 0 {
        return Err(Error::InsufficientSnapshots(
            "no interior snapshot with equal spacing".into(),
        ));
    }
    Ok(ResidualCheck { max_norm, per_snapshot })
}

fn wide_neighbours(grid: &super::grid::Grid1D, j: usize) -> Option<(usize, usize)> {
    let (Some(l), Some(r)) = grid.neighbours(j) else {
        return None;
    };
    let (Some(ll), _) = grid.neighbours(l) else {
        return None;
    };
    let (_, Some(rr)) = grid.neighbours(r) else {
        return None;
    };
    Some((ll, rr))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Slot {
    U = 0,
    Ut = 1,
    Ux = 2,
    Utt = 3,
    Uxx = 4,
    Uxt = 5,
    Zero = 6,
}

/// A polynomial flattened to `sum c * prod slot^e`, constants folded in.
struct Compiled {
    terms: Vec<(f64, Vec<(usize, i32)>)>,
}

impl Compiled {
    fn new(p: &Poly, slots: &HashMap<Symbol, Slot>, constants: &HashMap<Symbol, f64>) -> Result<Compiled> {
        let mut terms = Vec::new();
        let mut missing = Vec::new();
        for (mono, coeff) in p.terms() {
            let mut c = num_traits::ToPrimitive::to_f64(coeff).unwrap_or(f64::NAN);
            let mut factors = Vec::new();
            for (s, e) in mono.factors() {
                if let Some(slot) = slots.get(s) {
                    factors.push((*slot as usize, *e));
                } else if let Some(v) = constants.get(s) {
                    c *= v.powi(*e);
                } else {
                    missing.push(s.name().to_string());
                }
            }
            terms.push((c, factors));
        }
        if !missing.is_empty() {
            missing.sort();
            missing.dedup();
            return Err(Error::MissingAssignment(missing));
        }
        Ok(Compiled { terms })
    }

    fn eval(&self, values: &[f64; 7]) -> f64 {
        self.terms
            .iter()
            .map(|(c, f)| f.iter().fold(*c, |acc, (slot, e)| acc * values[*slot].powi(*e)))
            .sum()
    }
}

/// `|S(T) - S(0) - A(T)| / |A(T)|`, where `A` is the accumulated action.
pub fn action_audit(report: &SimReport) -> Result<f64> {
    if report.grid.boundary == Boundary::Neumann {
        return Err(Error::BoundaryFlux(
            "Neumann ends carry a nonzero flux of s^x; the integrated s-equation does not close".into(),
        ));
    }
    let d = &report.diagnostics;
    let n = d.len() - 1;
    let delta = d.accumulator[n] - d.accumulator[0];
    let action = d.action[n];
    let scale = action.abs().max(f64::MIN_POSITIVE);
    Ok((delta - action).abs() / scale)
}

/// Largest `|dE/dt + rate|` over interior steps, with centred differences of
/// the node-centred energy.
pub fn energy_balance(report: &SimReport) -> f64 {
    let d = &report.diagnostics;
    let dt = report.dt;
    (1..d.len().saturating_sub(1))
        .map(|n| ((d.energy[n + 1] - d.energy[n - 1]) / (2.0 * dt) + d.dissipation_rate[n]).abs())
        .fold(0.0, f64::max)
}

/// Relative drift `max |E_half(t) - E_half(0)| / E_half(0)`.
pub fn energy_drift(report: &SimReport) -> f64 {
    let e = &report.diagnostics.energy_half;
    let e0 = e[0];
    e.iter().map(|v| (v - e0).abs()).fold(0.0, f64::max) / e0.abs().max(f64::MIN_POSITIVE)
}

/// Decay rate `a` of a signal `A e^{-a t} cos(w t - phi)`, from a least-squares
/// line through the logarithms of its interpolated extrema.
pub fn fit_decay(t: &[f64], x: &[f64]) -> Option<f64> {
    let peaks = extrema(t, x);
    if peaks.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = peaks.iter().map(|(tp, v)| (*tp, v.abs().ln())).collect();
    Some(-slope(&pts))
}

/// Angular frequency from the mean spacing of zero crossings.
pub fn fit_frequency(t: &[f64], x: &[f64]) -> Option<f64> {
    let mut crossings = Vec::new();
    for n in 1..x.len() {
        if x[n - 1] == 0.0 {
            continue;
        }
        if (x[n - 1] < 0.0) != (x[n] < 0.0) {
            let f = x[n - 1] / (x[n - 1] - x[n]);
            crossings.push(t[n - 1] + f * (t[n] - t[n - 1]));
        }
    }
    if crossings.len() < 2 {
        return None;
    }
    let span = crossings[crossings.len() - 1] - crossings[0];
    Some(std::f64::consts::PI * (crossings.len() - 1) as f64 / span)
}

fn extrema(t: &[f64], x: &[f64]) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for n in 1..x.len().saturating_sub(1) {
        let (a, b, c) = (x[n - 1], x[n], x[n + 1]);
        let is_max = b > a && b >= c;
        let is_min = b < a && b <= c;
        if !(is_max || is_min) {
            continue;
        }
        // parabola through the three samples
        let denom = a - 2.0 * b + c;
        let (off, val) = if denom == 0.0 {
            (0.0, b)
        } else {
            let off = 0.5 * (a - c) / denom;
            (off, b - 0.25 * (a - c) * off)
        };
        let h = t[n + 1] - t[n];
        out.push((t[n] + off * h, val));
    }
    out
}

fn slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    sxy / sxx
}

/// Max-norm distance between the final snapshot and `oracle(x, T)`.
pub fn linf_error(report: &SimReport, oracle: impl Fn(f64, f64) -> f64) -> f64 {
    let snap = report.last();
    snap.field
        .iter()
        .enumerate()
        .map(|(j, v)| (v - oracle(report.grid.x(j), snap.t)).abs())
        .fold(0.0, f64::max)
}

/// `log2(coarse / fine)` for a refinement by two.
pub fn convergence_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// `e^{-a t} (cos w t + b sin w t)`, the modal amplitude of a damped
/// oscillator with unit initial value.
pub fn damped_mode(a: f64, omega: f64, b: f64, t: f64) -> f64 {
    (-a * t).exp() * ((omega * t).cos() + b * (omega * t).sin())
}
