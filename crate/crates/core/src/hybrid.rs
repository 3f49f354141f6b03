//! Recursive merging cost model and the hybrid dynamic program.
//!
//! A GHZ state of characteristic length `r` is either grown directly by the
//! cascaded-CNOT protocol, or assembled from `m^d` blocks of length
//! `r1 = r / m`: create the blocks (`t1`), merge them with a uniform
//! controlled-phase (`t2`), undo and redo the target blocks (`2 t1`), for a
//! total of `3 t1 + t2`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::eldredge::EldredgeFit;
use crate::error::{invalid, Result};
use crate::scaling::{regime, Regime, ScalingConstants};

/// Duration of the merging controlled-phase step, `pi d^(alpha/2) (m r1)^alpha / r1^(2d)`.
///
/// Uses the worst-case separation `m r1 sqrt(d)` for every pair of sites.
pub fn merge_time_t2(r1: f64, m: f64, alpha: f64, d: usize) -> f64 {
    let df = d as f64;
    PI * df.powf(alpha / 2.0) * (m * r1).powf(alpha) / r1.powi(2 * d as i32)
}

/// Asymptotic block-count rule `m(r1)` with proportionality constant `scale`.
pub fn choose_m_scaled(r1: f64, alpha: f64, d: usize, scale: f64) -> f64 {
    let df = d as f64;
    let two_d = 2.0 * df;
    if (alpha - two_d).abs() <= crate::scaling::REGIME_TOL {
        let gamma = ScalingConstants::new(alpha, d).gamma;
        scale * (gamma / two_d * r1.ln().sqrt()).exp()
    } else if alpha < two_d {
        scale * r1.powf(two_d / alpha - 1.0)
    } else {
        scale * r1
    }
}

/// [`choose_m_scaled`] with unit proportionality constant.
pub fn choose_m(r1: f64, alpha: f64, d: usize) -> f64 {
    choose_m_scaled(r1, alpha, d, 1.0)
}

/// Number of recursive merging levels needed to shrink `r` down to `r0`.
///
/// Each level replaces the current length `r` by `r / m(r)`, i.e.
/// `r^(2 - 2d/alpha)` below `alpha = 2d`. Above `2d` the block rule `m = r1`
/// is solved for `r1 = sqrt(r)`.
pub fn recursion_depth_estimate(r: f64, r0: f64, alpha: f64, d: usize) -> usize {
    let two_d = 2.0 * d as f64;
    let mut cur = r;
    let mut depth = 0;
    while cur > r0 {
        let next = if alpha > two_d + crate::scaling::REGIME_TOL {
            cur.sqrt()
        } else {
            cur / choose_m(cur, alpha, d)
        };
        if !(next < cur) {
            break;
        }
        cur = next;
        depth += 1;
    }
    depth
}

/// Parameters of the recursion cost `3 t1 + t2_scale * t2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HybridCostModel {
    pub alpha: f64,
    pub d: usize,
    pub t2_scale: f64,
}

impl HybridCostModel {
    pub fn new(alpha: f64, d: usize) -> Self {
        Self { alpha, d, t2_scale: 1.0 }
    }

    #[inline]
    pub fn split_cost(&self, t1: f64, r: usize, r1: usize) -> f64 {
        let m = r as f64 / r1 as f64;
        3.0 * t1 + self.t2_scale * merge_time_t2(r1 as f64, m, self.alpha, self.d)
    }
}

/// Optimal hybrid GHZ-creation time for every `r` in `2..=r_max`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HybridPlan {
    pub cost: HybridCostModel,
    pub r_max: usize,
    /// Indexed by `r`; entries 0 and 1 are unused.
    pub eldredge_time: Vec<f64>,
    pub best_time: Vec<f64>,
    /// `None` means no split: pure cascaded growth is optimal.
    pub best_split: Vec<Option<usize>>,
    pub depth: Vec<u32>,
}

impl HybridPlan {
    pub fn best_time(&self, r: usize) -> f64 {
        self.best_time[r]
    }

    pub fn best_split(&self, r: usize) -> Option<usize> {
        self.best_split[r]
    }

    pub fn depth(&self, r: usize) -> u32 {
        self.depth[r]
    }

    /// `m = r / r1` at the optimal split, if any.
    pub fn m(&self, r: usize) -> Option<f64> {
        self.best_split[r].map(|r1| r as f64 / r1 as f64)
    }

    /// Smallest `r` whose optimum uses at least one merge.
    pub fn crossover(&self) -> Option<usize> {
        (2..=self.r_max).find(|&r| self.best_split[r].is_some())
    }

    /// Smallest `r` whose optimal recursion depth is at least `k`.
    pub fn depth_onset(&self, k: u32) -> Option<usize> {
        (2..=self.r_max).find(|&r| self.depth[r] >= k)
    }

    /// Range of `m` over `r` in `[lo, hi)` with recursion depth exactly one.
    pub fn single_split_m_range(&self) -> Option<(f64, f64)> {
        let lo = self.crossover()?;
        let hi = self.depth_onset(2).unwrap_or(self.r_max + 1);
        (lo..hi)
            .filter(|&r| self.depth[r] == 1)
            .filter_map(|r| self.m(r))
            .fold(None, |acc, m| match acc {
                None => Some((m, m)),
                Some((a, b)) => Some((f64::min(a, m), f64::max(b, m))),
            })
    }
}

/// Hybrid optimum on top of an exact-plus-extrapolated cascaded baseline.
pub fn optimize(base: &EldredgeFit, r_max: usize, alpha: f64, d: usize) -> Result<HybridPlan> {
    optimize_with(|r| base.time(r), r_max, HybridCostModel::new(alpha, d))
}

/// Bottom-up dynamic program:
/// `best(r) = min(base(r), min_{2 <= r1 <= r/2} 3 best(r1) + t2(r1, r/r1))`.
///
/// For fixed `r` the split cost is `a(r1) + b(r) c(r1)` with `b` increasing
/// and `c` decreasing, so the optimal `r1` is non-decreasing in `r`. Rows are
/// processed in doubling blocks `[lo, 2 lo)`, whose splits only read entries
/// below `lo`, and each block is solved by divide and conquer over the
/// monotone argmin in `O(lo log lo)`.
pub fn optimize_with(
    base: impl Fn(usize) -> f64,
    r_max: usize,
    cost: HybridCostModel,
) -> Result<HybridPlan> {
    if r_max < 2 {
        return Err(invalid(format!("r_max must be >= 2, got {r_max}")));
    }
    let n = r_max + 1;
    let mut eldredge_time = vec![f64::NAN; n];
    let mut best_time = vec![f64::NAN; n];
    let mut best_split = vec![None; n];
    let mut depth = vec![0u32; n];
    for r in 2..n {
        let t = base(r);
        if !(t.is_finite() && t > 0.0) {
            return Err(invalid(format!("base time at r={r} must be finite and positive, got {t}")));
        }
        eldredge_time[r] = t;
    }
    let head = n.min(4);
    best_time[2..head].copy_from_slice(&eldredge_time[2..head]);

    let mut split_best = vec![f64::INFINITY; n];
    let mut split_arg = vec![0usize; n];
    let mut lo = 4;
    while lo <= r_max {
        let hi = (2 * lo - 1).min(r_max);
        solve_block(&best_time, &cost, lo, hi, 2, hi / 2, &mut split_best, &mut split_arg);
        for r in lo..=hi {
            if split_best[r] < eldredge_time[r] {
                best_time[r] = split_best[r];
                best_split[r] = Some(split_arg[r]);
                depth[r] = depth[split_arg[r]] + 1;
            } else {
                best_time[r] = eldredge_time[r];
            }
        }
        lo = hi + 1;
    }

    Ok(HybridPlan { cost, r_max, eldredge_time, best_time, best_split, depth })
}

#[allow(clippy::too_many_arguments)]
fn solve_block(
    best: &[f64],
    cost: &HybridCostModel,
    lo: usize,
    hi: usize,
    opt_lo: usize,
    opt_hi: usize,
    out_best: &mut [f64],
    out_arg: &mut [usize],
) {
    if lo > hi {
        return;
    }
    let mid = lo + (hi - lo) / 2;
    let upper = opt_hi.min(mid / 2);
    let mut arg = opt_lo;
    let mut val = f64::INFINITY;
    for r1 in opt_lo..=upper {
        let v = cost.split_cost(best[r1], mid, r1);
        if v < val {
            val = v;
            arg = r1;
        }
    }
    out_best[mid] = val;
    out_arg[mid] = arg;
    if mid > lo {
        solve_block(best, cost, lo, mid - 1, opt_lo, arg, out_best, out_arg);
    }
    solve_block(best, cost, mid + 1, hi, arg, opt_hi, out_best, out_arg);
}

/// Regime of the recursion for `alpha` in dimension `d`.
pub fn hybrid_regime(alpha: f64, d: usize) -> Result<Regime> {
    regime(alpha, d)
}
