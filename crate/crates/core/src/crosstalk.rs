//! Crosstalk error budget between same-color blocks, color counts and pulse counts.
//!
//! Two bookkeeping conventions are supported. `Published` charges each level
//! `n * t_GHZ(L) * |H_crosstalk(L, R)|`; `Draft` drops the factor `n`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::hybrid::choose_m;
use crate::scaling::{classify_tran_asymptotics, regime, Regime, ScalingClass, ScalingConstants};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Convention {
    Published,
    Draft,
}

impl std::str::FromStr for Convention {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "published" => Ok(Convention::Published),
            "draft" => Ok(Convention::Draft),
            other => Err(invalid(format!("unknown convention '{other}' (published|draft)"))),
        }
    }
}

/// `|C_i||C_j| / dist^alpha` for two blocks of edge `l`.
pub fn pair_interaction_bound(l: f64, dist: f64, alpha: f64, d: usize) -> Result<f64> {
    if !(l >= 1.0) {
        return Err(invalid(format!("block length must be >= 1, got {l}")));
    }
    if !(dist >= l) {
        return Err(Error::OverlappingBlocks { dist, block_length: l });
    }
    Ok(l.powi(2 * d as i32) / dist.powf(alpha))
}

/// Radius (in super-lattice units) up to which shells are summed exactly.
fn exact_radius(d: usize) -> f64 {
    match d {
        1 => 4096.0,
        2 => 256.0,
        _ => 40.0,
    }
}

/// Surface area of the unit sphere in `d` dimensions.
fn unit_sphere_area(d: usize) -> f64 {
    match d {
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 4.0 * PI,
    }
}

/// `sum |k|^-alpha` over nonzero `k` in `Z^d` with `|k| <= rho`.
///
/// Shells up to [`exact_radius`] are summed exactly; beyond that the shell
/// density is replaced by the sphere area `S_d x^(d-1)`.
#[derive(Debug, Clone)]
pub struct LatticeSum {
    alpha: f64,
    d: usize,
    /// Distinct squared norms in increasing order.
    norms: Vec<u64>,
    /// Running sum of `mult * norm^(-alpha/2)` up to and including each shell.
    prefix: Vec<f64>,
}

impl LatticeSum {
    pub fn new(alpha: f64, d: usize) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(invalid(format!("dimension must be 1, 2 or 3, got {d}")));
        }
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive and finite, got {alpha}")));
        }
        let kmax = exact_radius(d) as i64;
        let cap = (kmax * kmax) as u64;
        let mut sq: Vec<u64> = Vec::new();
        let span = -kmax..=kmax;
        match d {
            1 => sq.extend((1..=kmax).flat_map(|k| [(k * k) as u64; 2])),
            2 => {
                for x in span.clone() {
                    for y in span.clone() {
                        sq.push((x * x + y * y) as u64);
                    }
                }
            }
            _ => {
                for x in span.clone() {
                    for y in span.clone() {
                        for z in span.clone() {
                            sq.push((x * x + y * y + z * z) as u64);
                        }
                    }
                }
            }
        }
        sq.retain(|&s| s > 0 && s <= cap);
        sq.sort_unstable();
        let mut norms = Vec::new();
        let mut prefix = Vec::new();
        let mut acc = 0.0;
        let mut i = 0;
        while i < sq.len() {
            let s = sq[i];
            let mut j = i;
            while j < sq.len() && sq[j] == s {
                j += 1;
            }
            acc += (j - i) as f64 * (s as f64).powf(-alpha / 2.0);
            norms.push(s);
            prefix.push(acc);
            i = j;
        }
        Ok(Self { alpha, d, norms, prefix })
    }

    pub fn converges(&self) -> bool {
        self.alpha > self.d as f64
    }

    /// Partial sum over `0 < |k| <= rho`; the nearest shell is always included.
    pub fn partial(&self, rho: f64) -> f64 {
        let rho = rho.max(1.0);
        let rc = exact_radius(self.d);
        if rho <= rc {
            let lim = (rho * rho + 1e-9).floor() as u64;
            let idx = self.norms.partition_point(|&s| s <= lim);
            return self.prefix[idx - 1];
        }
        *self.prefix.last().expect("non-empty") + self.tail(rc, rho)
    }

    /// Full sum to infinity; `None` when `alpha <= d`.
    pub fn total(&self) -> Option<f64> {
        self.converges().then(|| {
            let rc = exact_radius(self.d);
            let p = self.alpha - self.d as f64;
            self.prefix.last().expect("non-empty") + unit_sphere_area(self.d) * rc.powf(-p) / p
        })
    }

    fn tail(&self, from: f64, to: f64) -> f64 {
        let p = self.d as f64 - self.alpha;
        let s = unit_sphere_area(self.d);
        if p.abs() < 1e-12 {
            s * (to / from).ln()
        } else {
            s * (to.powf(p) - from.powf(p)) / p
        }
    }
}

/// Crosstalk norm of one block against all same-color blocks inside a region of radius `r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkNorm {
    /// Same-color lattice sum truncated at radius `r`.
    pub exact: f64,
    /// `c * L^(2d) / R^alpha` with `c` the full super-lattice sum; infinite when divergent.
    pub bound: f64,
    pub constant: f64,
    /// Set when `alpha <= d`: the sum grows without bound in `r`.
    pub divergent: bool,
}

/// Sum of [`pair_interaction_bound`] over a super-lattice of spacing `big_r` out to radius `r`.
pub fn crosstalk_norm(l: f64, big_r: f64, r: f64, alpha: f64, d: usize) -> Result<CrosstalkNorm> {
    let sums = LatticeSum::new(alpha, d)?;
    crosstalk_norm_with(&sums, l, big_r, r)
}

fn crosstalk_norm_with(sums: &LatticeSum, l: f64, big_r: f64, r: f64) -> Result<CrosstalkNorm> {
    let base = pair_interaction_bound(l, big_r, sums.alpha, sums.d)?;
    let exact = base * sums.partial(r / big_r);
    let (constant, divergent) = match sums.total() {
        Some(c) => (c, false),
        None => (f64::INFINITY, true),
    };
    Ok(CrosstalkNorm { exact, bound: constant * base, constant, divergent })
}

/// Same-color spacing `n^(1/d) L`.
pub fn color_spacing(l: f64, n: u128, d: usize) -> f64 {
    (n as f64).powf(1.0 / d as f64) * l
}

/// Crosstalk error accumulated while building blocks of edge `l`.
pub fn eps_level(l: f64, n: u128, r: f64, alpha: f64, d: usize, convention: Convention) -> Result<f64> {
    let sums = LatticeSum::new(alpha, d)?;
    let class = classify_tran_asymptotics(alpha, d)?;
    eps_level_with(&sums, class, l, n, r, convention)
}

fn eps_level_with(
    sums: &LatticeSum,
    class: ScalingClass,
    l: f64,
    n: u128,
    r: f64,
    convention: Convention,
) -> Result<f64> {
    if n == 0 {
        return Err(invalid("need at least one color"));
    }
    let big_r = color_spacing(l, n, sums.d);
    let norm = crosstalk_norm_with(sums, l, big_r, r)?.exact;
    let factor = match convention {
        Convention::Published => n as f64,
        Convention::Draft => 1.0,
    };
    Ok(factor * class.eval(l) * norm)
}

/// Block edges of the recursion levels, from `r` down to `r0`.
///
/// Below `2d` each level is `L^(1/lambda)` of the previous one with
/// `lambda = 2d / alpha`; at `2d` it shrinks by `m' = max(2, m(r0))`; above
/// `2d` it halves (published) or takes a square root (draft).
pub fn level_schedule(r: f64, r0: f64, alpha: f64, d: usize, convention: Convention) -> Result<Vec<f64>> {
    if !(r0 >= 2.0 && r > r0) {
        return Err(invalid(format!("need 2 <= r0 < r, got r0={r0}, r={r}")));
    }
    let reg = regime(alpha, d)?;
    let lambda = 2.0 * d as f64 / alpha;
    let m_prime = choose_m(r0, alpha, d).max(2.0);
    let mut levels = vec![r];
    loop {
        let cur = *levels.last().expect("non-empty");
        let next = match (reg, convention) {
            (Regime::Sub, _) => cur.powf(1.0 / lambda),
            (Regime::Critical, _) => cur / m_prime,
            (Regime::Super, Convention::Published) => cur / 2.0,
            (Regime::Super, Convention::Draft) => cur.sqrt(),
        };
        if next < r0 || !(next < cur) {
            break;
        }
        levels.push(next);
    }
    Ok(levels)
}

/// Per-level crosstalk errors and their total.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrosstalkBudget {
    pub convention: Convention,
    pub r: f64,
    pub r0: f64,
    pub alpha: f64,
    pub d: usize,
    /// `(L, eps(L))` from the largest level down.
    pub per_level: Vec<(f64, f64)>,
    pub total: f64,
    pub n: u128,
    pub i_max: usize,
    /// Closed-form growth bound with unit constant.
    pub analytic_bound: f64,
}

/// Closed-form growth of the total error in `r` and `n` (unit constants).
pub fn analytic_total_bound(r: f64, n: u128, alpha: f64, d: usize, convention: Convention) -> Result<f64> {
    let df = d as f64;
    let nf = n as f64;
    let reg = regime(alpha, d)?;
    let c = ScalingConstants::new(alpha, d);
    let n_pow = match convention {
        Convention::Published => nf.powf(alpha / df - 1.0),
        Convention::Draft => nf.powf(alpha / df),
    };
    Ok(match (reg, convention) {
        (Regime::Sub, _) => {
            let kappa = c.kappa_alpha.expect("sub regime");
            r.powf(2.0 * df - alpha) * r.ln().powf(kappa) / n_pow
        }
        (Regime::Critical, Convention::Published) => (c.gamma * r.ln().sqrt()).exp() / nf,
        (Regime::Critical, Convention::Draft) => r.powf(2.0 * df - alpha + 1.0) / n_pow,
        (Regime::Super, _) => r.ln() / n_pow,
    })
}

struct BudgetModel {
    sums: LatticeSum,
    class: ScalingClass,
    levels: Vec<f64>,
    r: f64,
    convention: Convention,
}

impl BudgetModel {
    fn new(r: f64, r0: f64, alpha: f64, d: usize, convention: Convention) -> Result<Self> {
        let class = classify_tran_asymptotics(alpha, d)?;
        let levels = level_schedule(r, r0, alpha, d, convention)?;
        Ok(Self { sums: LatticeSum::new(alpha, d)?, class, levels, r, convention })
    }

    fn per_level(&self, n: u128) -> Result<Vec<(f64, f64)>> {
        self.levels
            .iter()
            .map(|&l| Ok((l, eps_level_with(&self.sums, self.class, l, n, self.r, self.convention)?)))
            .collect()
    }

    fn total(&self, n: u128) -> Result<f64> {
        Ok(self.per_level(n)?.iter().map(|(_, e)| e).sum())
    }
}

pub fn total_crosstalk(
    r: f64,
    r0: f64,
    n: u128,
    alpha: f64,
    d: usize,
    convention: Convention,
) -> Result<CrosstalkBudget> {
    if n == 0 {
        return Err(invalid("need at least one color"));
    }
    let model = BudgetModel::new(r, r0, alpha, d, convention)?;
    let per_level = model.per_level(n)?;
    let total = per_level.iter().map(|(_, e)| e).sum();
    Ok(CrosstalkBudget {
        convention,
        r,
        r0,
        alpha,
        d,
        i_max: per_level.len(),
        per_level,
        total,
        n,
        analytic_bound: analytic_total_bound(r, n, alpha, d, convention)?,
    })
}

/// Smallest color count meeting an error target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ColorRequirement {
    pub n: u128,
    pub total: f64,
    /// Growth of `n` with `r`: a power of `r`, the stretched exponential, or a power of `log r`.
    pub analytic_class: ScalingClass,
}

/// Largest color count considered by [`colors_required`].
pub const MAX_COLORS: u128 = 1 << 100;

pub fn colors_required(
    r: f64,
    r0: f64,
    eps_target: f64,
    alpha: f64,
    d: usize,
    convention: Convention,
) -> Result<ColorRequirement> {
    if !(eps_target > 0.0) {
        return Err(invalid(format!("error target must be positive, got {eps_target}")));
    }
    let model = BudgetModel::new(r, r0, alpha, d, convention)?;
    let mut hi = 1u128;
    while model.total(hi)? > eps_target {
        if hi >= MAX_COLORS {
            return Err(invalid(format!("no color count up to {MAX_COLORS} meets target {eps_target}")));
        }
        hi *= 2;
    }
    let mut lo = hi / 2;
    // invariant: total(lo) > eps (or lo == 0), total(hi) <= eps
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if model.total(mid)? <= eps_target {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(ColorRequirement {
        n: hi,
        total: model.total(hi)?,
        analytic_class: color_growth_class(alpha, d, convention)?,
    })
}

/// How the required color count grows with `r`.
pub fn color_growth_class(alpha: f64, d: usize, convention: Convention) -> Result<ScalingClass> {
    let df = d as f64;
    let c = ScalingConstants::new(alpha, d);
    Ok(match (regime(alpha, d)?, convention) {
        (Regime::Sub, Convention::Published) => {
            ScalingClass::Power { exponent: df * (2.0 * df - alpha) / (alpha - df) }
        }
        (Regime::Sub, Convention::Draft) => ScalingClass::Power { exponent: df * (2.0 * df - alpha) / alpha },
        (Regime::Critical, Convention::Published) => ScalingClass::StretchedExponential { gamma: c.gamma },
        (Regime::Critical, Convention::Draft) => ScalingClass::Power { exponent: df / alpha },
        (Regime::Super, Convention::Published) => ScalingClass::Polylog { kappa: df / (alpha - df) },
        (Regime::Super, Convention::Draft) => ScalingClass::Polylog { kappa: df / alpha },
    })
}

/// Echo pulses needed to separate `n` colors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PulseCount {
    /// Pulses applied to color `i` (index 0 is color 1): 0, 2, then `2^(i-1)`.
    pub per_color: Vec<u64>,
    /// Distinct pulse times, `2^(n-1)` for `n >= 2`.
    pub total: u64,
}

/// Largest color count with an exact pulse count.
pub const MAX_PULSE_COLORS: u32 = 64;

pub fn pulse_count(n: u32) -> Result<PulseCount> {
    if n == 0 || n > MAX_PULSE_COLORS {
        return Err(invalid(format!("color count must be 1..={MAX_PULSE_COLORS}, got {n}")));
    }
    let per_color = (1..=n)
        .map(|i| match i {
            1 => 0,
            2 => 2,
            _ => 1u64 << (i - 1),
        })
        .collect();
    let total = if n == 1 { 0 } else { 1u64 << (n - 1) };
    Ok(PulseCount { per_color, total })
}

/// `2^(x-1)` for a non-integer color count, e.g. `x = m^2 / 2`.
pub fn pulse_count_estimate(x: f64) -> f64 {
    2f64.powf(x - 1.0)
}
