//! Independent oracles shared by the integration and acceptance tests.
#![allow(dead_code)]

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use num_complex::Complex64;
use powerlawst::echo::SymmetricMatrix;
use powerlawst::{CouplingModel, Lattice};
use rand::Rng;

/// Completion times from fixed-step integration of the accrued angles.
///
/// Each step adds `dt * sum_{controls} h` to every target; targets that
/// reach `pi/2` during a step join the controls at the end of that step.
pub fn integrate_schedule(lattice: &Lattice, model: &CouplingModel, source: usize, dt: f64) -> Vec<(usize, f64)> {
    let n = lattice.num_sites();
    let h = |i: usize, j: usize| model.between(lattice, i, j).unwrap();
    let mut is_control = vec![false; n];
    is_control[source] = true;
    let mut acc = vec![0.0f64; n];
    let mut rate: Vec<f64> = (0..n).map(|j| if j == source { 0.0 } else { h(source, j) }).collect();
    let mut done = Vec::new();
    let mut step = 0u64;
    while done.len() + 1 < n {
        step += 1;
        let mut fresh = Vec::new();
        for j in 0..n {
            if !is_control[j] {
                let before = acc[j];
                acc[j] += dt * rate[j];
                if acc[j] >= FRAC_PI_2 {
                    // linear interpolation inside the step
                    let frac = (FRAC_PI_2 - before) / (acc[j] - before);
                    fresh.push((j, (step as f64 - 1.0 + frac) * dt));
                }
            }
        }
        for &(j, t) in &fresh {
            is_control[j] = true;
            done.push((j, t));
        }
        for &(c, _) in &fresh {
            for k in 0..n {
                if !is_control[k] {
                    rate[k] += h(c, k);
                }
            }
        }
    }
    done
}

/// A random lattice with at most `max_sites` sites in 1 to 3 dimensions.
pub fn random_lattice(rng: &mut impl Rng, max_sites: usize) -> Lattice {
    loop {
        let d = rng.gen_range(1..=3);
        let extents: Vec<usize> = (0..d).map(|_| rng.gen_range(1..=max_sites)).collect();
        let n: usize = extents.iter().product();
        if (2..=max_sites).contains(&n) {
            return Lattice::new(&extents).unwrap();
        }
    }
}

pub fn random_amplitudes(rng: &mut impl Rng) -> (Complex64, Complex64) {
    let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    (Complex64::new(v[0] / norm, v[1] / norm), Complex64::new(v[2] / norm, v[3] / norm))
}

pub type Mat = DMatrix<Complex64>;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Single-qubit operator `op` on qubit `q` of an `n`-qubit register (qubit q = bit q).
pub fn embed(n: usize, q: usize, op: [[Complex64; 2]; 2]) -> Mat {
    let dim = 1 << n;
    Mat::from_fn(dim, dim, |row, col| {
        if (row ^ col) & !(1 << q) != 0 {
            return c(0.0);
        }
        op[(row >> q) & 1][(col >> q) & 1]
    })
}

pub fn projector_one(n: usize, q: usize) -> Mat {
    embed(n, q, [[c(0.0), c(0.0)], [c(0.0), c(1.0)]])
}

pub fn pauli_x(n: usize, q: usize) -> Mat {
    embed(n, q, [[c(0.0), c(1.0)], [c(1.0), c(0.0)]])
}

pub fn pauli_z(n: usize, q: usize) -> Mat {
    embed(n, q, [[c(1.0), c(0.0)], [c(0.0), c(-1.0)]])
}

pub fn phase_fix(n: usize, q: usize) -> Mat {
    embed(n, q, [[c(1.0), c(0.0)], [c(0.0), Complex64::new(0.0, 1.0)]])
}

pub fn hadamard(n: usize, q: usize) -> Mat {
    let h = c(std::f64::consts::FRAC_1_SQRT_2);
    embed(n, q, [[h, h], [h, -h]])
}

/// `sum_{i in controls, j in targets} h_ij |1><1|_i X_j`.
pub fn controlled_x_hamiltonian(n: usize, h: &SymmetricMatrix, controls: &[usize], targets: &[usize]) -> Mat {
    let mut out = Mat::zeros(1 << n, 1 << n);
    for &i in controls {
        for &j in targets {
            out += (projector_one(n, i) * pauli_x(n, j)) * c(h.get(i, j));
        }
    }
    out
}

pub fn zz_hamiltonian(n: usize, j: &SymmetricMatrix) -> Mat {
    let mut out = Mat::zeros(1 << n, 1 << n);
    for (a, b, v) in j.pairs() {
        out += (pauli_z(n, a) * pauli_z(n, b)) * c(v);
    }
    out
}

pub fn nn_hamiltonian(n: usize, j: &SymmetricMatrix) -> Mat {
    let mut out = Mat::zeros(1 << n, 1 << n);
    for (a, b, v) in j.pairs() {
        out += (projector_one(n, a) * projector_one(n, b)) * c(v);
    }
    out
}

/// `exp(-i H t)`.
pub fn propagator(h: &Mat, t: f64) -> Mat {
    (h * Complex64::new(0.0, -t)).exp()
}

pub fn apply(m: &Mat, amps: &[Complex64]) -> Vec<Complex64> {
    let v = nalgebra::DVector::from_column_slice(amps);
    (m * v).iter().copied().collect()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Unitary of the cascaded protocol compiled from its schedule.
pub fn eldredge_unitary(lattice: &Lattice, model: &CouplingModel, source: usize) -> Mat {
    let n = lattice.num_sites();
    let h = SymmetricMatrix::from_lattice(lattice, model);
    let sched = powerlawst::eldredge::run_schedule(lattice, model, source).unwrap();
    let mut u = Mat::identity(1 << n, 1 << n);
    let mut done = vec![false; n];
    done[source] = true;
    let mut prev = 0.0;
    for ev in &sched.events {
        let controls: Vec<usize> = (0..n).filter(|&s| done[s]).collect();
        let targets: Vec<usize> = (0..n).filter(|&s| !done[s]).collect();
        let seg = propagator(&controlled_x_hamiltonian(n, &h, &controls, &targets), ev.time - prev);
        u = phase_fix(n, ev.site) * seg * u;
        done[ev.site] = true;
        prev = ev.time;
    }
    u
}
