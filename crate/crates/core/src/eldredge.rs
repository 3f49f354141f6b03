//! Event-driven simulation of the incremental cascaded-CNOT GHZ growth.
//!
//! Every target `j` accrues rotation angle at rate `sum_{i in controls} h(i, j)`.
//! When a target reaches `pi/2` its CNOT is complete and it joins the controls,
//! which immediately raises the rate of every remaining target. Rates are
//! updated incrementally, one new control at a time, so a full run on `N`
//! sites costs `O(N^2)`.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::{CouplingModel, CouplingTable, Lattice};

/// One CNOT completion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScheduleEvent {
    pub time: f64,
    pub site: usize,
    /// Angle accrued by the target at completion; `pi/2` up to rounding.
    pub angle: f64,
}

/// Timeline of a greedy run. `total_time` is the GHZ-creation time;
/// state transfer takes twice as long.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScheduleResult {
    pub source: usize,
    pub total_time: f64,
    pub events: Vec<ScheduleEvent>,
}

impl ScheduleResult {
    /// Angle accrued by each completed site, keyed by site index.
    pub fn completion_angles(&self) -> BTreeMap<usize, f64> {
        self.events.iter().map(|e| (e.site, e.angle)).collect()
    }

    pub fn state_transfer_time(&self) -> f64 {
        2.0 * self.total_time
    }

    /// Sites that are controls during segment `k` (between event `k-1` and `k`).
    pub fn controls_during(&self, k: usize) -> Vec<usize> {
        std::iter::once(self.source).chain(self.events[..k].iter().map(|e| e.site)).collect()
    }

    /// Duration of segment `k`.
    pub fn segment_duration(&self, k: usize) -> f64 {
        let start = if k == 0 { 0.0 } else { self.events[k - 1].time };
        self.events[k].time - start
    }
}

#[derive(Clone, Copy)]
struct Target {
    site: u32,
    pos: [u32; 3],
    acc: f64,
    rate: f64,
}

#[inline]
fn displacement_index(a: &[u32; 3], b: &[u32; 3], strides: &[usize; 3]) -> usize {
    a[0].abs_diff(b[0]) as usize * strides[0]
        + a[1].abs_diff(b[1]) as usize * strides[1]
        + a[2].abs_diff(b[2]) as usize * strides[2]
}

/// Run the greedy schedule from `source` until every other site is a control.
pub fn run_schedule(lattice: &Lattice, model: &CouplingModel, source: usize) -> Result<ScheduleResult> {
    let n = lattice.num_sites();
    if n == 0 {
        return Err(Error::EmptyLattice);
    }
    lattice.check_site(source)?;
    if n > u32::MAX as usize {
        return Err(invalid("lattice too large"));
    }

    let table = CouplingTable::new(lattice, model);
    let mut strides = [0usize; 3];
    strides[..lattice.dimension()].copy_from_slice(table.strides());
    let flat = table.values();
    let position = |site: usize| {
        let mut p = [0u32; 3];
        for (slot, c) in p.iter_mut().zip(lattice.coords_unchecked(site)) {
            *slot = c as u32;
        }
        p
    };

    let mut targets: Vec<Target> = (0..n)
        .filter(|&s| s != source)
        .map(|s| Target { site: s as u32, pos: position(s), acc: 0.0, rate: 0.0 })
        .collect();
    let mut events = Vec::with_capacity(n.saturating_sub(1));
    let mut newest = position(source);
    let mut now = 0.0;
    let mut dt = 0.0;

    while !targets.is_empty() {
        let mut best_time = f64::INFINITY;
        let mut best_site = u32::MAX;
        let mut best_pos = 0;
        for (p, t) in targets.iter_mut().enumerate() {
            t.acc += dt * t.rate;
            t.rate += flat[displacement_index(&newest, &t.pos, &strides)];
            let remaining = (FRAC_PI_2 - t.acc) / t.rate;
            if remaining < best_time || (remaining == best_time && t.site < best_site) {
                best_time = remaining;
                best_site = t.site;
                best_pos = p;
            }
        }
        dt = best_time.max(0.0);
        now += dt;
        let done = targets.swap_remove(best_pos);
        events.push(ScheduleEvent {
            time: now,
            site: done.site as usize,
            angle: done.acc + dt * done.rate,
        });
        newest = done.pos;
    }

    Ok(ScheduleResult { source, total_time: now, events })
}

/// GHZ-creation time on an `r^d` hypercube with the source at a corner.
pub fn benchmark_time(r: usize, alpha: f64, d: usize) -> Result<f64> {
    if r < 1 {
        return Err(invalid("characteristic length must be >= 1"));
    }
    let lattice = Lattice::hypercube(d, r)?;
    let model = CouplingModel::new(alpha)?;
    Ok(run_schedule(&lattice, &model, lattice.corner())?.total_time)
}

/// Exact benchmark times for a range of characteristic lengths.
pub fn benchmark_times(
    rs: impl IntoIterator<Item = usize>,
    alpha: f64,
    d: usize,
) -> Result<BTreeMap<usize, f64>> {
    rs.into_iter().map(|r| Ok((r, benchmark_time(r, alpha, d)?))).collect()
}

/// Ordinary least squares `y = slope * x + intercept`.
pub fn linear_fit(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = points.len() as f64;
    if points.len() < 2 {
        return None;
    }
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    Some((slope, my - slope * mx))
}

/// Exact benchmark times plus an affine extrapolation of the tail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EldredgeFit {
    pub alpha: f64,
    pub d: usize,
    pub exact_times: BTreeMap<usize, f64>,
    pub fit_slope: f64,
    pub fit_intercept: f64,
    pub fit_window: (usize, usize),
    /// `(r, exact - fit)` inside the window.
    pub residuals: Vec<(usize, f64)>,
}

/// Default fitting window.
pub const DEFAULT_FIT_WINDOW: (usize, usize) = (60, 110);

impl EldredgeFit {
    pub fn from_exact(
        alpha: f64,
        d: usize,
        exact_times: BTreeMap<usize, f64>,
        fit_window: (usize, usize),
    ) -> Result<Self> {
        let (lo, hi) = fit_window;
        let pts: Vec<(f64, f64)> = exact_times
            .range(lo..=hi)
            .map(|(&r, &t)| (r as f64, t))
            .collect();
        let (fit_slope, fit_intercept) = linear_fit(&pts)
            .ok_or_else(|| invalid(format!("need at least two exact times in window [{lo}, {hi}]")))?;
        let residuals = exact_times
            .range(lo..=hi)
            .map(|(&r, &t)| (r, t - (fit_slope * r as f64 + fit_intercept)))
            .collect();
        Ok(Self { alpha, d, exact_times, fit_slope, fit_intercept, fit_window, residuals })
    }

    /// Run the scheduler for every `r` in `2..=window.1` and fit the window.
    pub fn compute(alpha: f64, d: usize, fit_window: (usize, usize)) -> Result<Self> {
        let exact = benchmark_times(2..=fit_window.1, alpha, d)?;
        Self::from_exact(alpha, d, exact, fit_window)
    }

    pub fn r_hi(&self) -> usize {
        self.fit_window.1
    }

    /// Affine prediction, ignoring any cached value.
    pub fn predict(&self, r: f64) -> f64 {
        self.fit_slope * r + self.fit_intercept
    }

    /// Cached exact time for `r <= r_hi`, otherwise the extrapolation.
    pub fn time(&self, r: usize) -> f64 {
        if r <= self.r_hi() {
            if let Some(&t) = self.exact_times.get(&r) {
                return t;
            }
        }
        self.predict(r as f64)
    }

    /// Log-log slope of the exact times over the fit window.
    pub fn loglog_exponent(&self) -> Option<f64> {
        let (lo, hi) = self.fit_window;
        let pts: Vec<(f64, f64)> = self
            .exact_times
            .range(lo..=hi)
            .map(|(&r, &t)| ((r as f64).ln(), t.ln()))
            .collect();
        linear_fit(&pts).map(|(s, _)| s)
    }

    pub fn max_relative_residual(&self) -> f64 {
        self.residuals
            .iter()
            .map(|&(r, res)| (res / self.exact_times[&r]).abs())
            .fold(0.0, f64::max)
    }
}

/// Free-function form of [`EldredgeFit::time`].
pub fn eldredge_time(fit: &EldredgeFit, r: usize) -> f64 {
    fit.time(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sites() {
        for alpha in [1.0, 3.0, 6.0] {
            let l = Lattice::chain(2).unwrap();
            let res = run_schedule(&l, &CouplingModel::new(alpha).unwrap(), 0).unwrap();
            assert!((res.total_time - FRAC_PI_2).abs() < 1e-15);
        }
    }

    #[test]
    fn three_site_chain_hand_oracle() {
        // Site 1 completes at pi/2 having driven site 2 to (pi/2)/8;
        // the remaining (pi/2)(7/8) accrues at rate 1 + 1/8.
        let l = Lattice::chain(3).unwrap();
        let res = run_schedule(&l, &CouplingModel::new(3.0).unwrap(), 0).unwrap();
        let expected = FRAC_PI_2 * (1.0 + (1.0 - 0.125) / (1.0 + 0.125));
        assert!((res.total_time - expected).abs() < 1e-14);
        assert!((res.total_time - FRAC_PI_2 * 16.0 / 9.0).abs() < 1e-14);
        assert!((res.total_time - 2.7925).abs() < 1e-4);
        assert_eq!(res.events.iter().map(|e| e.site).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn errors() {
        let l = Lattice::chain(3).unwrap();
        let m = CouplingModel::new(3.0).unwrap();
        assert!(matches!(run_schedule(&l, &m, 3), Err(Error::InvalidSite { .. })));
    }

    #[test]
    fn single_site_is_instant() {
        let l = Lattice::chain(1).unwrap();
        let res = run_schedule(&l, &CouplingModel::new(3.0).unwrap(), 0).unwrap();
        assert_eq!(res.total_time, 0.0);
        assert!(res.events.is_empty());
    }

    #[test]
    fn ties_broken_by_lowest_index() {
        // Source in the middle of a chain: sites 1 and 3 are equidistant.
        let l = Lattice::chain(5).unwrap();
        let res = run_schedule(&l, &CouplingModel::new(3.0).unwrap(), 2).unwrap();
        assert_eq!(res.events[0].site, 1);
        assert_eq!(res.events[1].site, 3);
    }

    #[test]
    fn invariants_on_square() {
        let l = Lattice::new(&[5, 4]).unwrap();
        let m = CouplingModel::new(2.5).unwrap();
        let res = run_schedule(&l, &m, 7).unwrap();
        assert_eq!(res.events.len(), l.num_sites() - 1);
        let angles = res.completion_angles();
        assert_eq!(angles.len(), l.num_sites() - 1);
        assert!(!angles.contains_key(&7));
        for w in res.events.windows(2) {
            assert!(w[0].time <= w[1].time);
        }
        for e in &res.events {
            assert!((e.angle - FRAC_PI_2).abs() < 1e-9);
        }
    }

    #[test]
    fn prefactor_scaling() {
        let l = Lattice::new(&[4, 4]).unwrap();
        let base = run_schedule(&l, &CouplingModel::new(3.0).unwrap(), 0).unwrap();
        let quad = run_schedule(&l, &CouplingModel::with_prefactor(3.0, 4.0).unwrap(), 0).unwrap();
        assert_eq!(quad.total_time, base.total_time / 4.0);
        let odd = run_schedule(&l, &CouplingModel::with_prefactor(3.0, 1.7).unwrap(), 0).unwrap();
        assert!((odd.total_time * 1.7 - base.total_time).abs() < 1e-12 * base.total_time);
    }

    #[test]
    fn fit_cache_and_extrapolation() {
        let exact: BTreeMap<usize, f64> = (2..=20).map(|r| (r, 0.5 * r as f64 + 1.0 + if r % 2 == 0 { 1e-3 } else { 0.0 })).collect();
        let fit = EldredgeFit::from_exact(3.0, 2, exact.clone(), (10, 20)).unwrap();
        for r in 2..=20 {
            assert_eq!(eldredge_time(&fit, r).to_bits(), exact[&r].to_bits());
        }
        let a = fit.time(21);
        let b = fit.time(40);
        assert!((fit.predict(21.0) - a).abs() == 0.0);
        assert!(((b - a) - fit.fit_slope * 19.0).abs() < 1e-12);
        assert!((fit.fit_slope - 0.5).abs() < 1e-3);
        assert!(EldredgeFit::from_exact(3.0, 2, exact, (30, 40)).is_err());
    }

    #[test]
    fn benchmark_matches_cache_bit_for_bit() {
        let fit = EldredgeFit::compute(3.0, 2, (6, 12)).unwrap();
        for r in [2usize, 7, 12] {
            assert_eq!(fit.time(r).to_bits(), benchmark_time(r, 3.0, 2).unwrap().to_bits());
        }
    }
}
