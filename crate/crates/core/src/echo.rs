//! Spin-echo sign schedules and exact accumulation of effective ZZ couplings.
//!
//! Every schedule here is a sequence of segments during which each site
//! carries a frame sign `+1` or `-1` (flipped by pi pulses) and the whole
//! Hamiltonian is scaled by a strength. A diagonal pair term `J_ij` then
//! accumulates `J_ij * sum_k strength_k * s_ik * s_jk * duration_k`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::lattice::{CouplingModel, CouplingTable, Lattice};
use crate::tiling::PlaquetteTiling;

/// Largest color count accepted by [`walsh_sequence`].
pub const MAX_ECHO_COLORS: usize = 20;

/// Equal-segment sign rows, one per color.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PulseSequence {
    pub total_time: f64,
    pub segment_durations: Vec<f64>,
    /// `signs[c][k]` is the frame sign of color `c` (0-based) during segment `k`.
    pub signs: Vec<Vec<i8>>,
    pub pulses_of_color: Vec<u64>,
}

/// Sign changes along a row that is closed by a return to `+1` at the end.
fn count_flips(row: &[i8]) -> u64 {
    let interior = row.windows(2).filter(|w| w[0] != w[1]).count() as u64;
    interior + u64::from(row.last() == Some(&-1))
}

/// Square-wave sign rows with halving periods.
///
/// For `n >= 2` there are `2^(n-1)` segments; color `i` (1-based) is split
/// into `2^(i-1)` equal blocks of alternating sign, starting with `+1`.
pub fn walsh_sequence(n: usize, total_time: f64) -> Result<PulseSequence> {
    if n == 0 {
        return Err(invalid("need at least one color"));
    }
    if n > MAX_ECHO_COLORS {
        return Err(invalid(format!("at most {MAX_ECHO_COLORS} colors supported, got {n}")));
    }
    if !(total_time > 0.0 && total_time.is_finite()) {
        return Err(invalid(format!("total time must be positive, got {total_time}")));
    }
    let segments = 1usize << (n - 1);
    let signs: Vec<Vec<i8>> = (1..=n)
        .map(|i| {
            let half = segments >> (i - 1);
            (0..segments).map(|k| if (k / half).is_multiple_of(2) { 1 } else { -1 }).collect()
        })
        .collect();
    let pulses_of_color = signs.iter().map(|row| count_flips(row)).collect();
    Ok(PulseSequence {
        total_time,
        segment_durations: vec![total_time / segments as f64; segments],
        signs,
        pulses_of_color,
    })
}

impl PulseSequence {
    pub fn num_colors(&self) -> usize {
        self.signs.len()
    }

    pub fn num_segments(&self) -> usize {
        self.segment_durations.len()
    }

    /// Duration-weighted product of two sign rows.
    pub fn inner(&self, a: usize, b: usize) -> f64 {
        self.signs[a]
            .iter()
            .zip(&self.signs[b])
            .zip(&self.segment_durations)
            .map(|((&x, &y), &dt)| f64::from(x * y) * dt)
            .sum()
    }

    /// Pulse times of one color, including the closing pulse at `total_time`.
    pub fn pulse_times(&self, color: usize) -> Vec<f64> {
        let row = &self.signs[color];
        let mut out = Vec::new();
        let mut t = 0.0;
        for k in 0..row.len() {
            t += self.segment_durations[k];
            let next = row.get(k + 1).copied().unwrap_or(1);
            if next != row[k] {
                out.push(if k + 1 == row.len() { self.total_time } else { t });
            }
        }
        out
    }

    /// Per-site schedule for a site coloring (0-based colors).
    pub fn site_schedule(&self, site_colors: &[usize]) -> Result<EchoSchedule> {
        if let Some(&c) = site_colors.iter().find(|&&c| c >= self.num_colors()) {
            return Err(invalid(format!("color {} but the sequence has {} colors", c + 1, self.num_colors())));
        }
        Ok(EchoSchedule {
            durations: self.segment_durations.clone(),
            strengths: vec![1.0; self.num_segments()],
            site_signs: (0..self.num_segments())
                .map(|k| site_colors.iter().map(|&c| self.signs[c][k]).collect())
                .collect(),
        })
    }

    /// Number of distinct times at which some color is pulsed.
    pub fn distinct_pulse_times(&self) -> usize {
        let mut all: Vec<f64> = (0..self.num_colors()).flat_map(|c| self.pulse_times(c)).collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        all.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Role {
    Control,
    Target,
    Uninvolved,
}

/// Dense symmetric coupling matrix with an empty diagonal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in (i + 1)..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Power-law couplings between all sites of a lattice.
    pub fn from_lattice(lattice: &Lattice, model: &CouplingModel) -> Self {
        let table = CouplingTable::new(lattice, model);
        Self::from_fn(lattice.num_sites(), |i, j| table.get(i, j))
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    /// Sets both `(i, j)` and `(j, i)`; the diagonal is ignored.
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        if i != j {
            self.data[i * self.n + j] = v;
            self.data[j * self.n + i] = v;
        }
    }

    /// Upper-triangle entries `(i, j, value)` with `i < j`.
    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.n).flat_map(move |i| ((i + 1)..self.n).map(move |j| (i, j, self.get(i, j))))
    }
}

/// Accumulated coupling times after an echo schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EffectiveCouplings {
    pub matrix: SymmetricMatrix,
    pub labels: Vec<Role>,
}

impl EffectiveCouplings {
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix.get(i, j)
    }

    /// Largest `|entry|` touching an uninvolved site.
    pub fn uninvolved_residual(&self) -> f64 {
        self.matrix
            .pairs()
            .filter(|&(i, j, _)| self.labels[i] == Role::Uninvolved || self.labels[j] == Role::Uninvolved)
            .map(|(_, _, v)| v.abs())
            .fold(0.0, f64::max)
    }
}

/// Segments with per-site frame signs and a global Hamiltonian strength.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EchoSchedule {
    pub durations: Vec<f64>,
    pub strengths: Vec<f64>,
    /// `site_signs[k][i]` during segment `k`.
    pub site_signs: Vec<Vec<i8>>,
}

impl EchoSchedule {
    /// `J_ij * sum_k strength_k * s_ik * s_jk * duration_k` for every pair.
    pub fn accumulate(&self, j: &SymmetricMatrix) -> SymmetricMatrix {
        let n = j.size();
        let mut out = SymmetricMatrix::zeros(n);
        for a in 0..n {
            for b in (a + 1)..n {
                let w: f64 = (0..self.durations.len())
                    .map(|k| {
                        let s = f64::from(self.site_signs[k][a] * self.site_signs[k][b]);
                        self.strengths[k] * s * self.durations[k]
                    })
                    .sum();
                out.set(a, b, j.get(a, b) * w);
            }
        }
        out
    }
}

fn check_size(j: &SymmetricMatrix, labels: &[Role]) -> Result<()> {
    if labels.len() != j.size() {
        return Err(invalid(format!("{} labels for {} sites", labels.len(), j.size())));
    }
    Ok(())
}

/// Two-segment echo: `+H` for `t`, pi pulses on the targets, then `-a H` for `t / a`.
///
/// Shelved uninvolved sites have their couplings removed; otherwise their
/// accumulated terms stay in the result as a residual.
pub fn control_target_schedule(labels: &[Role], t: f64, a: f64) -> Result<EchoSchedule> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(invalid(format!("echo strength a must be positive, got {a}")));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(invalid(format!("evolution time must be non-negative, got {t}")));
    }
    let flipped: Vec<i8> = labels.iter().map(|&r| if r == Role::Target { -1 } else { 1 }).collect();
    Ok(EchoSchedule {
        durations: vec![t, t / a],
        strengths: vec![1.0, -a],
        site_signs: vec![vec![1; labels.len()], flipped],
    })
}

pub fn control_target_echo(
    j: &SymmetricMatrix,
    labels: &[Role],
    t: f64,
    a: f64,
    shelve_uninvolved: bool,
) -> Result<EffectiveCouplings> {
    check_size(j, labels)?;
    let schedule = control_target_schedule(labels, t, a)?;
    let mut live = j.clone();
    if shelve_uninvolved {
        for (i, &r) in labels.iter().enumerate() {
            if r == Role::Uninvolved {
                for k in 0..j.size() {
                    live.set(i, k, 0.0);
                }
            }
        }
    }
    Ok(EffectiveCouplings { matrix: schedule.accumulate(&live), labels: labels.to_vec() })
}

/// Per-target pi-pulse timing that trims each target's coupling time to `t_i`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrimSchedule {
    pub t_max: f64,
    /// `(target, pulse time)`; targets with `t_i = t_max` need no pulse.
    pub pulses: Vec<(usize, f64)>,
    /// Net forward coupling time of each target.
    pub effective_times: BTreeMap<usize, f64>,
    pub schedule: EchoSchedule,
    pub couplings: EffectiveCouplings,
}

/// Pulse target `i` at `t_i + (t_max - t_i) / 2` so that it couples for `t_i` net.
pub fn per_target_trim(
    j: &SymmetricMatrix,
    labels: &[Role],
    t_required: &BTreeMap<usize, f64>,
    t_max: f64,
) -> Result<TrimSchedule> {
    check_size(j, labels)?;
    let n = j.size();
    let mut flip_at = vec![f64::INFINITY; n];
    let mut pulses = Vec::new();
    let mut effective_times = BTreeMap::new();
    for (&site, &ti) in t_required {
        if site >= n || labels[site] != Role::Target {
            return Err(invalid(format!("site {site} is not a target")));
        }
        if !(ti > 0.0) {
            return Err(invalid(format!("target {site}: required time must be positive, got {ti}")));
        }
        if ti > t_max {
            return Err(invalid(format!("target {site}: required time {ti} exceeds t_max {t_max}")));
        }
        let p = ti + (t_max - ti) / 2.0;
        if p < t_max {
            pulses.push((site, p));
            flip_at[site] = p;
        }
        effective_times.insert(site, p - (t_max - p));
    }
    // segment boundaries are the sorted pulse times
    let mut cuts: Vec<f64> = pulses.iter().map(|&(_, p)| p).collect();
    cuts.push(t_max);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut durations = Vec::with_capacity(cuts.len());
    let mut site_signs = Vec::with_capacity(cuts.len());
    let mut start = 0.0;
    for &end in &cuts {
        durations.push(end - start);
        site_signs.push((0..n).map(|i| if flip_at[i] <= start { -1 } else { 1 }).collect());
        start = end;
    }
    let schedule = EchoSchedule { strengths: vec![1.0; durations.len()], durations, site_signs };
    let matrix = schedule.accumulate(j);
    Ok(TrimSchedule {
        t_max,
        pulses,
        effective_times,
        schedule,
        couplings: EffectiveCouplings { matrix, labels: labels.to_vec() },
    })
}

/// Accumulated block-pair couplings under a color sequence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CancellationReport {
    pub total_time: f64,
    pub cross_color_pairs: usize,
    pub same_color_pairs: usize,
    /// Largest `|accumulated|` over cross-color block pairs.
    pub max_cross_residual: f64,
    /// Largest `|accumulated| / (T * raw)` over cross-color block pairs.
    pub max_cross_relative: f64,
    /// Sum of accumulated same-color couplings.
    pub retained_total: f64,
    /// `T` times the raw same-color coupling sum.
    pub same_color_raw_total: f64,
}

impl CancellationReport {
    pub fn cancels(&self, rel_tol: f64) -> bool {
        self.max_cross_relative <= rel_tol
    }
}

pub fn verify_cancellation(
    seq: &PulseSequence,
    tiling: &PlaquetteTiling,
    lattice: &Lattice,
    model: &CouplingModel,
) -> Result<CancellationReport> {
    if let Some(&c) = tiling.color_of_block.iter().max() {
        if c >= seq.num_colors() {
            return Err(invalid(format!(
                "tiling uses color {} but the sequence has {} colors",
                c + 1,
                seq.num_colors()
            )));
        }
    }
    let table = CouplingTable::new(lattice, model);
    let t = seq.total_time;
    let nb = tiling.num_blocks();
    let mut report = CancellationReport {
        total_time: t,
        cross_color_pairs: 0,
        same_color_pairs: 0,
        max_cross_residual: 0.0,
        max_cross_relative: 0.0,
        retained_total: 0.0,
        same_color_raw_total: 0.0,
    };
    for a in 0..nb {
        for b in (a + 1)..nb {
            let (ca, cb) = (tiling.color_of_block[a], tiling.color_of_block[b]);
            let raw: f64 = tiling.blocks[a]
                .iter()
                .flat_map(|&i| tiling.blocks[b].iter().map(move |&j| (i, j)))
                .map(|(i, j)| table.get(i, j))
                .sum();
            let acc = seq.inner(ca, cb) * raw;
            if ca == cb {
                report.same_color_pairs += 1;
                report.retained_total += acc;
                report.same_color_raw_total += t * raw;
            } else {
                report.cross_color_pairs += 1;
                report.max_cross_residual = report.max_cross_residual.max(acc.abs());
                if raw > 0.0 {
                    report.max_cross_relative = report.max_cross_relative.max(acc.abs() / (t * raw));
                }
            }
        }
    }
    Ok(report)
}
