//! Dense state-vector simulation of the GHZ protocols on small registers.
//!
//! Qubit `q` is bit `q` of the amplitude index, and qubit indices coincide
//! with lattice site indices.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::echo::{EchoSchedule, SymmetricMatrix};
use crate::eldredge::{run_schedule, ScheduleResult};
use crate::error::{invalid, Error, Result};
use crate::hybrid::merge_time_t2;
use crate::lattice::{CouplingModel, Lattice};

/// Largest register held as a dense vector.
pub const MAX_QUBITS: usize = 22;
/// Largest register accepted by [`run_eldredge_protocol`].
pub const MAX_PROTOCOL_QUBITS: usize = 16;
/// Largest register accepted by [`run_tran_step`].
pub const MAX_TRAN_QUBITS: usize = 20;

const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_qubits(n: usize, cap: usize) -> Result<()> {
    if n > cap {
        return Err(Error::SizeCap { requested: n, cap });
    }
    Ok(())
}

impl QuantumState {
    /// `|0...0>` on `n` qubits.
    pub fn zero(n: usize) -> Result<Self> {
        check_qubits(n, MAX_QUBITS)?;
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[0] = Complex64::new(1.0, 0.0);
        Ok(Self { num_qubits: n, amps })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        if !amps.len().is_power_of_two() {
            return Err(invalid(format!("{} amplitudes is not a power of two", amps.len())));
        }
        let n = amps.len().trailing_zeros() as usize;
        check_qubits(n, MAX_QUBITS)?;
        let s = Self { num_qubits: n, amps };
        if (s.norm() - 1.0).abs() > 1e-12 {
            return Err(invalid(format!("state norm {} differs from 1", s.norm())));
        }
        Ok(s)
    }

    /// Product state with qubit `q` in `a_q |0> + b_q |1>`.
    pub fn product(qubits: &[(Complex64, Complex64)]) -> Result<Self> {
        let mut s = Self::zero(qubits.len())?;
        for (q, &(a, b)) in qubits.iter().enumerate() {
            let bit = 1usize << q;
            for idx in 0..s.amps.len() {
                if idx & bit == 0 {
                    let v = s.amps[idx];
                    s.amps[idx] = a * v;
                    s.amps[idx | bit] = b * v;
                }
            }
        }
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    fn check_qubit(&self, q: usize) -> Result<()> {
        if q >= self.num_qubits {
            return Err(invalid(format!("qubit {q} out of range for {} qubits", self.num_qubits)));
        }
        Ok(())
    }

    /// Apply a 2x2 matrix `[[m00, m01], [m10, m11]]` to qubit `q`.
    pub fn apply_single(&mut self, q: usize, m: [[Complex64; 2]; 2]) -> Result<()> {
        self.check_qubit(q)?;
        let bit = 1usize << q;
        for idx in 0..self.amps.len() {
            if idx & bit == 0 {
                let (x, y) = (self.amps[idx], self.amps[idx | bit]);
                self.amps[idx] = m[0][0] * x + m[0][1] * y;
                self.amps[idx | bit] = m[1][0] * x + m[1][1] * y;
            }
        }
        Ok(())
    }

    pub fn hadamard(&mut self, q: usize) -> Result<()> {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        self.apply_single(q, [[h, h], [h, -h]])
    }

    pub fn pauli_x(&mut self, q: usize) -> Result<()> {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        self.apply_single(q, [[o, l], [l, o]])
    }

    /// `diag(1, i)` on qubit `q`; removes the `-i` left by `exp(-i pi X / 2)`.
    pub fn phase_fix(&mut self, q: usize) -> Result<()> {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        self.apply_single(q, [[l, o], [o, I]])
    }

    fn phase_unfix(&mut self, q: usize) -> Result<()> {
        let (o, l) = (Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0));
        self.apply_single(q, [[l, o], [o, -I]])
    }

    /// Evolve for `dt` under `sum_{i in controls, j in targets} h_ij |1><1|_i X_j`.
    ///
    /// All terms commute, so each target rotates by `exp(-i theta X)` with
    /// `theta = dt * sum of h_ij over the controls that are set`.
    pub fn evolve_controlled_x(
        &mut self,
        h: &SymmetricMatrix,
        controls: &[usize],
        targets: &[usize],
        dt: f64,
    ) -> Result<()> {
        if h.size() < self.num_qubits {
            return Err(invalid("coupling matrix smaller than the register"));
        }
        for &q in controls.iter().chain(targets) {
            self.check_qubit(q)?;
        }
        if let Some(&q) = targets.iter().find(|t| controls.contains(t)) {
            return Err(invalid(format!("qubit {q} is both a control and a target")));
        }
        for &j in targets {
            let bit = 1usize << j;
            let weights: Vec<(usize, f64)> = controls.iter().map(|&i| (1usize << i, h.get(i, j))).collect();
            for idx in 0..self.amps.len() {
                if idx & bit != 0 {
                    continue;
                }
                let theta: f64 = dt * weights.iter().filter(|(m, _)| idx & m != 0).map(|(_, w)| w).sum::<f64>();
                if theta == 0.0 {
                    continue;
                }
                let (c, s) = (theta.cos(), theta.sin());
                let (x, y) = (self.amps[idx], self.amps[idx | bit]);
                self.amps[idx] = c * x - I * s * y;
                self.amps[idx | bit] = c * y - I * s * x;
            }
        }
        Ok(())
    }

    /// Multiply each basis amplitude by `exp(-i t E(index))`.
    pub fn evolve_diagonal(&mut self, t: f64, energy: impl Fn(usize) -> f64) {
        for (idx, a) in self.amps.iter_mut().enumerate() {
            *a *= Complex64::from_polar(1.0, -t * energy(idx));
        }
    }

    /// Evolve under `sum_{i<j} J_ij Z_i Z_j`.
    pub fn evolve_diagonal_zz(&mut self, couplings: &SymmetricMatrix, t: f64) {
        let pairs: Vec<_> = couplings.pairs().filter(|p| p.2 != 0.0).collect();
        self.evolve_diagonal(t, |idx| {
            pairs
                .iter()
                .map(|&(i, j, v)| if ((idx >> i) ^ (idx >> j)) & 1 == 0 { v } else { -v })
                .sum()
        });
    }

    /// Evolve under `sum_{i<j} J_ij n_i n_j`.
    pub fn evolve_number_number(&mut self, couplings: &SymmetricMatrix, t: f64) {
        let pairs: Vec<_> = couplings.pairs().filter(|p| p.2 != 0.0).collect();
        self.evolve_diagonal(t, |idx| {
            pairs.iter().filter(|&&(i, j, _)| (idx >> i) & (idx >> j) & 1 == 1).map(|p| p.2).sum()
        });
    }

    /// Replay an echo schedule: each segment runs `strength * sum J_ij Z_i Z_j`
    /// in the frame set by the site signs.
    pub fn replay_echo(&mut self, schedule: &EchoSchedule, couplings: &SymmetricMatrix) -> Result<()> {
        let n = self.num_qubits;
        let mut frame = vec![1i8; n];
        for k in 0..schedule.durations.len() {
            let signs = &schedule.site_signs[k];
            for q in 0..n {
                if signs[q] != frame[q] {
                    self.pauli_x(q)?;
                    frame[q] = signs[q];
                }
            }
            let scaled = SymmetricMatrix::from_fn(n, |i, j| schedule.strengths[k] * couplings.get(i, j));
            self.evolve_diagonal_zz(&scaled, schedule.durations[k]);
        }
        for (q, &f) in frame.iter().enumerate() {
            if f == -1 {
                self.pauli_x(q)?;
            }
        }
        Ok(())
    }

    /// Overlap with `a|0...0> + b|1...1>` on `region`, other qubits in `|0>`.
    pub fn ghz_fidelity(&self, region: &[usize], a: Complex64, b: Complex64) -> Result<GhzOverlap> {
        let mut mask = 0usize;
        for &q in region {
            self.check_qubit(q)?;
            mask |= 1 << q;
        }
        let overlap = a.conj() * self.amps[0] + b.conj() * self.amps[mask];
        let inside: f64 = self
            .amps
            .iter()
            .enumerate()
            .filter(|(idx, _)| idx & !mask == 0)
            .map(|(_, v)| v.norm_sqr())
            .sum();
        Ok(GhzOverlap { fidelity: overlap.norm_sqr(), outside_population: (1.0 - inside).max(0.0) })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhzOverlap {
    pub fidelity: f64,
    /// Weight on basis states with a qubit outside the region set.
    pub outside_population: f64,
}

/// One step of a compiled GHZ unitary.
#[derive(Debug, Clone, PartialEq)]
pub enum ProtocolOp {
    Segment { dt: f64, controls: Vec<usize>, targets: Vec<usize> },
    PhaseFix(usize),
}

/// A GHZ-encoding unitary as a sequence of commuting-segment evolutions and phase fixes.
#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolCircuit {
    pub ops: Vec<ProtocolOp>,
}

impl ProtocolCircuit {
    /// Compile a schedule, relabelling sites by `site_map`.
    pub fn from_schedule(schedule: &ScheduleResult, num_sites: usize, site_map: &[usize]) -> Self {
        let mut done = vec![false; num_sites];
        done[schedule.source] = true;
        let mut ops = Vec::new();
        let mut prev = 0.0;
        for ev in &schedule.events {
            let controls: Vec<usize> = (0..num_sites).filter(|&s| done[s]).map(|s| site_map[s]).collect();
            let targets: Vec<usize> = (0..num_sites).filter(|&s| !done[s]).map(|s| site_map[s]).collect();
            if ev.time > prev {
                ops.push(ProtocolOp::Segment { dt: ev.time - prev, controls, targets });
            }
            ops.push(ProtocolOp::PhaseFix(site_map[ev.site]));
            done[ev.site] = true;
            prev = ev.time;
        }
        Self { ops }
    }

    pub fn apply(&self, state: &mut QuantumState, h: &SymmetricMatrix) -> Result<()> {
        for op in &self.ops {
            match op {
                ProtocolOp::Segment { dt, controls, targets } => {
                    state.evolve_controlled_x(h, controls, targets, *dt)?
                }
                ProtocolOp::PhaseFix(q) => state.phase_fix(*q)?,
            }
        }
        Ok(())
    }

    /// Backward evolution: the inverse unitary.
    pub fn apply_inverse(&self, state: &mut QuantumState, h: &SymmetricMatrix) -> Result<()> {
        for op in self.ops.iter().rev() {
            match op {
                ProtocolOp::Segment { dt, controls, targets } => {
                    state.evolve_controlled_x(h, controls, targets, -dt)?
                }
                ProtocolOp::PhaseFix(q) => state.phase_unfix(*q)?,
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct ProtocolRun {
    pub state: QuantumState,
    pub overlap: GhzOverlap,
    pub total_time: f64,
}

fn check_amplitudes(a: Complex64, b: Complex64) -> Result<()> {
    let n = a.norm_sqr() + b.norm_sqr();
    if (n - 1.0).abs() > 1e-12 {
        return Err(invalid(format!("|a|^2 + |b|^2 = {n}, expected 1")));
    }
    Ok(())
}

/// Grow `a|0...0> + b|1...1>` over the whole lattice from `source`.
pub fn run_eldredge_protocol(
    lattice: &Lattice,
    model: &CouplingModel,
    source: usize,
    a: Complex64,
    b: Complex64,
) -> Result<ProtocolRun> {
    let n = lattice.num_sites();
    if n < 2 {
        return Err(invalid("need at least two sites"));
    }
    check_qubits(n, MAX_PROTOCOL_QUBITS)?;
    check_amplitudes(a, b)?;
    let schedule = run_schedule(lattice, model, source)?;
    let identity: Vec<usize> = (0..n).collect();
    let circuit = ProtocolCircuit::from_schedule(&schedule, n, &identity);
    let h = SymmetricMatrix::from_lattice(lattice, model);
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let init: Vec<_> = (0..n).map(|q| if q == source { (a, b) } else { (one, zero) }).collect();
    let mut state = QuantumState::product(&init)?;
    circuit.apply(&mut state, &h)?;
    let overlap = state.ghz_fidelity(&identity, a, b)?;
    Ok(ProtocolRun { state, overlap, total_time: schedule.total_time })
}

#[derive(Debug, Clone)]
pub struct TranRun {
    pub state: QuantumState,
    pub overlap: GhzOverlap,
    pub t1: f64,
    pub t2: f64,
    /// Phase picked up by `|1..1>_{C_1} |1..1>_{C_j}` during the merge step.
    pub merge_phase: f64,
}

impl TranRun {
    pub fn total_time(&self) -> f64 {
        3.0 * self.t1 + self.t2
    }
}

/// Sites of block `b` of an `m^d` grid of `r1`-blocks, in block-local order.
fn block_sites(lattice: &Lattice, r1: usize, m: usize, b: usize) -> Vec<usize> {
    let d = lattice.dimension();
    let bc: Vec<usize> = {
        let mut rest = b;
        (0..d)
            .map(|_| {
                let c = rest % m;
                rest /= m;
                c
            })
            .collect()
    };
    let local = Lattice::hypercube(d, r1).expect("r1 >= 1");
    (0..local.num_sites())
        .map(|s| {
            let c: Vec<usize> = local.coords(s).expect("in range").iter().zip(&bc).map(|(x, o)| x + o * r1).collect();
            lattice.index_of(&c).expect("inside region")
        })
        .collect()
}

/// One merging step on an `(m r1)^d` region split into `m^d` blocks of edge `r1`.
///
/// The encoded state starts at the corner of block 1; every block is grown
/// from its corner by the cascaded-CNOT unitary, the blocks are merged by a
/// uniform controlled-phase for `t2`, and the target blocks are undone, rotated
/// by a Hadamard on their corner and redone.
pub fn run_tran_step(
    model: &CouplingModel,
    d: usize,
    r1: usize,
    m: usize,
    a: Complex64,
    b: Complex64,
) -> Result<TranRun> {
    if r1 == 0 || m < 2 {
        return Err(invalid(format!("need r1 >= 1 and m >= 2, got r1={r1}, m={m}")));
    }
    check_amplitudes(a, b)?;
    let lattice = Lattice::hypercube(d, m * r1)?;
    let n = lattice.num_sites();
    check_qubits(n, MAX_TRAN_QUBITS)?;
    let h = SymmetricMatrix::from_lattice(&lattice, model);

    let block = Lattice::hypercube(d, r1)?;
    let (block_schedule, t1) = if block.num_sites() > 1 {
        let s = run_schedule(&block, model, block.corner())?;
        let t = s.total_time;
        (Some(s), t)
    } else {
        (None, 0.0)
    };
    let blocks = m.pow(d as u32);
    let maps: Vec<Vec<usize>> = (0..blocks).map(|bi| block_sites(&lattice, r1, m, bi)).collect();
    let circuits: Vec<ProtocolCircuit> = maps
        .iter()
        .map(|map| match &block_schedule {
            Some(s) => ProtocolCircuit::from_schedule(s, block.num_sites(), map),
            None => ProtocolCircuit { ops: Vec::new() },
        })
        .collect();
    let corners: Vec<usize> = maps.iter().map(|map| map[block.corner()]).collect();

    // Step 1
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let plus = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let init: Vec<_> = (0..n)
        .map(|q| {
            if q == corners[0] {
                (a, b)
            } else if corners[1..].contains(&q) {
                (plus, plus)
            } else {
                (one, zero)
            }
        })
        .collect();
    let mut state = QuantumState::product(&init)?;
    for c in &circuits {
        c.apply(&mut state, &h)?;
    }

    // Step 2: uniform number-number coupling between block 1 and every other block
    let g = (m as f64 * r1 as f64 * (d as f64).sqrt()).powf(-model.alpha);
    let t2 = merge_time_t2(r1 as f64, m as f64, model.alpha, d);
    let mut h2 = SymmetricMatrix::zeros(n);
    for map in &maps[1..] {
        for &mu in &maps[0] {
            for &nu in map {
                h2.set(mu, nu, g);
            }
        }
    }
    state.evolve_number_number(&h2, t2);
    let v = block.num_sites() as f64;
    let merge_phase = g * v * v * t2;

    // Steps 3-5
    for c in &circuits[1..] {
        c.apply_inverse(&mut state, &h)?;
    }
    for &c in &corners[1..] {
        state.hadamard(c)?;
    }
    for c in &circuits[1..] {
        c.apply(&mut state, &h)?;
    }
    let all: Vec<usize> = (0..n).collect();
    let overlap = state.ghz_fidelity(&all, a, b)?;
    Ok(TranRun { state, overlap, t1, t2, merge_phase })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn one_pair(h: f64) -> SymmetricMatrix {
        SymmetricMatrix::from_fn(2, |_, _| h)
    }

    #[test]
    fn controlled_rotation_basics() {
        // control = qubit 0 in |1>, target qubit 1
        let mut s = QuantumState::product(&[(c(0.0, 0.0), c(1.0, 0.0)), (c(1.0, 0.0), c(0.0, 0.0))]).unwrap();
        s.evolve_controlled_x(&one_pair(1.0), &[0], &[1], PI / 2.0).unwrap();
        assert!((s.amplitudes()[0b11] - c(0.0, -1.0)).norm() < 1e-15);

        let mut z = QuantumState::zero(2).unwrap();
        z.evolve_controlled_x(&one_pair(1.0), &[0], &[1], 0.37).unwrap();
        assert_eq!(z, QuantumState::zero(2).unwrap());

        assert!(z.evolve_controlled_x(&one_pair(1.0), &[0], &[0], 1.0).is_err());
    }

    #[test]
    fn bell_state_from_plus_zero() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = QuantumState::product(&[(c(r, 0.0), c(r, 0.0)), (c(1.0, 0.0), c(0.0, 0.0))]).unwrap();
        s.evolve_controlled_x(&one_pair(2.0), &[0], &[1], PI / 4.0).unwrap();
        s.phase_fix(1).unwrap();
        let amps = s.amplitudes();
        assert!((amps[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((amps[3] - c(r, 0.0)).norm() < 1e-15);
        assert!(amps[1].norm() < 1e-15 && amps[2].norm() < 1e-15);
    }

    #[test]
    fn phase_fix_twice_is_z() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let mut s = QuantumState::product(&[(c(r, 0.0), c(0.0, r))]).unwrap();
        s.phase_fix(0).unwrap();
        s.phase_fix(0).unwrap();
        assert!((s.amplitudes()[0] - c(r, 0.0)).norm() < 1e-15);
        assert!((s.amplitudes()[1] - c(0.0, -r)).norm() < 1e-15);
    }

    #[test]
    fn fidelity_reference_values() {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let (a, b) = (c(r, 0.0), c(r, 0.0));
        let mut amps = vec![c(0.0, 0.0); 8];
        amps[0] = a;
        amps[7] = b;
        let ghz = QuantumState::from_amplitudes(amps).unwrap();
        assert!((ghz.ghz_fidelity(&[0, 1, 2], a, b).unwrap().fidelity - 1.0).abs() < 1e-15);
        let zero = QuantumState::zero(3).unwrap();
        assert!((zero.ghz_fidelity(&[0, 1, 2], a, b).unwrap().fidelity - 0.5).abs() < 1e-15);
        let mut other = QuantumState::zero(3).unwrap();
        other.pauli_x(1).unwrap();
        let o = other.ghz_fidelity(&[0, 2], a, b).unwrap();
        assert_eq!(o.fidelity, 0.0);
        assert!((o.outside_population - 1.0).abs() < 1e-15);
    }

    #[test]
    fn diagonal_evolutions() {
        let mut s = QuantumState::product(&[(c(0.0, 0.0), c(1.0, 0.0)); 2]).unwrap();
        let before = s.clone();
        s.evolve_diagonal_zz(&one_pair(1.0), 0.0);
        assert_eq!(s, before);
        s.evolve_number_number(&one_pair(1.0), PI);
        assert!((s.amplitudes()[3] + c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn eldredge_small_runs() {
        let m = CouplingModel::new(3.0).unwrap();
        let chain = Lattice::chain(3).unwrap();
        let run = run_eldredge_protocol(&chain, &m, 0, c(0.6, 0.0), c(0.8, 0.0)).unwrap();
        assert!(run.overlap.fidelity >= 1.0 - 1e-9);
        let trivial = run_eldredge_protocol(&chain, &m, 1, c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert!((trivial.overlap.fidelity - 1.0).abs() < 1e-15);
        let sq = Lattice::new(&[3, 3]).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let run = run_eldredge_protocol(&sq, &m, 4, c(r, 0.0), c(0.0, r)).unwrap();
        assert!(run.overlap.fidelity >= 1.0 - 1e-9);
        assert!((run.state.norm() - 1.0).abs() < 1e-12);
        let big = Lattice::new(&[17]).unwrap();
        assert!(matches!(
            run_eldredge_protocol(&big, &m, 0, c(1.0, 0.0), c(0.0, 0.0)),
            Err(Error::SizeCap { requested: 17, cap: 16 })
        ));
    }

    #[test]
    fn tran_step_small() {
        let m = CouplingModel::new(3.0).unwrap();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let run = run_tran_step(&m, 1, 2, 2, c(r, 0.0), c(r, 0.0)).unwrap();
        assert!(run.overlap.fidelity >= 1.0 - 1e-9, "{:?}", run.overlap);
        assert!((run.merge_phase - PI).abs() < 1e-12);
        let single_sites = run_tran_step(&m, 1, 1, 3, c(0.6, 0.0), c(0.0, 0.8)).unwrap();
        assert!(single_sites.overlap.fidelity >= 1.0 - 1e-9);
    }

    #[test]
    fn inverse_circuit_restores_state() {
        let lat = Lattice::new(&[2, 3]).unwrap();
        let model = CouplingModel::new(2.5).unwrap();
        let sched = run_schedule(&lat, &model, 2).unwrap();
        let id: Vec<usize> = (0..6).collect();
        let circ = ProtocolCircuit::from_schedule(&sched, 6, &id);
        let h = SymmetricMatrix::from_lattice(&lat, &model);
        let init: Vec<_> = (0..6).map(|q| (c(0.6, 0.0), c(0.0, 0.8 * if q % 2 == 0 { 1.0 } else { -1.0 }))).collect();
        let start = QuantumState::product(&init).unwrap();
        let mut s = start.clone();
        circ.apply(&mut s, &h).unwrap();
        circ.apply_inverse(&mut s, &h).unwrap();
        assert!((s.inner(&start).norm() - 1.0).abs() < 1e-10);
    }
}
