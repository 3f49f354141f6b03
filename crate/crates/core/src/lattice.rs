//! Hypercubic lattice geometry and isotropic power-law couplings.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};

/// Largest supported spatial dimension.
pub const MAX_DIMENSION: usize = 3;

/// A `d`-dimensional hypercubic lattice with unit spacing.
///
/// Sites are numbered with axis 0 varying fastest, so site `i` of a
/// 2D lattice with extents `[ex, ey]` sits at `(i % ex, i / ex)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Lattice {
    extents: Vec<usize>,
}

impl Lattice {
    pub fn new(extents: &[usize]) -> Result<Self> {
        if extents.is_empty() || extents.len() > MAX_DIMENSION {
            return Err(invalid(format!(
                "lattice dimension must be 1..={MAX_DIMENSION}, got {}",
                extents.len()
            )));
        }
        if extents.contains(&0) {
            return Err(Error::EmptyLattice);
        }
        Ok(Self { extents: extents.to_vec() })
    }

    /// An `r^d` hypercube.
    pub fn hypercube(d: usize, r: usize) -> Result<Self> {
        Self::new(&vec![r; d])
    }

    /// A 1D chain of `n` sites.
    pub fn chain(n: usize) -> Result<Self> {
        Self::new(&[n])
    }

    pub fn dimension(&self) -> usize {
        self.extents.len()
    }

    pub fn extents(&self) -> &[usize] {
        &self.extents
    }

    pub fn num_sites(&self) -> usize {
        self.extents.iter().product()
    }

    pub fn check_site(&self, i: usize) -> Result<()> {
        let n = self.num_sites();
        if i >= n {
            Err(Error::InvalidSite { index: i, num_sites: n })
        } else {
            Ok(())
        }
    }

    /// Integer coordinates of a site.
    pub fn coords(&self, i: usize) -> Result<Vec<usize>> {
        self.check_site(i)?;
        Ok(self.coords_unchecked(i))
    }

    pub(crate) fn coords_unchecked(&self, mut i: usize) -> Vec<usize> {
        self.extents
            .iter()
            .map(|&e| {
                let c = i % e;
                i /= e;
                c
            })
            .collect()
    }

    /// Site index of integer coordinates, if inside the lattice.
    pub fn index_of(&self, coords: &[usize]) -> Option<usize> {
        if coords.len() != self.extents.len() {
            return None;
        }
        let mut idx = 0;
        let mut stride = 1;
        for (&c, &e) in coords.iter().zip(&self.extents) {
            if c >= e {
                return None;
            }
            idx += c * stride;
            stride *= e;
        }
        Some(idx)
    }

    /// Euclidean distance between two sites.
    pub fn distance(&self, i: usize, j: usize) -> Result<f64> {
        self.check_site(i)?;
        self.check_site(j)?;
        Ok(self.squared_distance(i, j).sqrt())
    }

    pub(crate) fn squared_distance(&self, i: usize, j: usize) -> f64 {
        let (mut a, mut b) = (i, j);
        let mut s = 0usize;
        for &e in &self.extents {
            let (ca, cb) = (a % e, b % e);
            let dx = ca.abs_diff(cb);
            s += dx * dx;
            a /= e;
            b /= e;
        }
        s as f64
    }

    /// Worst-case distance inside an `r`-hypercube, `r * sqrt(d)`.
    pub fn worst_case_distance(r: f64, d: usize) -> f64 {
        r * (d as f64).sqrt()
    }

    /// Site at the all-zero corner.
    pub fn corner(&self) -> usize {
        0
    }
}

/// Isotropic power-law coupling `h(dist) = prefactor * dist^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingModel {
    pub alpha: f64,
    #[serde(default = "unit")]
    pub prefactor: f64,
}

fn unit() -> f64 {
    1.0
}

impl CouplingModel {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::with_prefactor(alpha, 1.0)
    }

    pub fn with_prefactor(alpha: f64, prefactor: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(invalid(format!("alpha must be positive and finite, got {alpha}")));
        }
        if !(prefactor > 0.0 && prefactor.is_finite()) {
            return Err(invalid(format!("prefactor must be positive and finite, got {prefactor}")));
        }
        Ok(Self { alpha, prefactor })
    }

    /// Coupling at a given distance; distances below one lattice spacing are rejected.
    pub fn coupling(&self, dist: f64) -> Result<f64> {
        if !(dist >= 1.0) {
            return Err(Error::SubLatticeDistance(dist));
        }
        Ok(self.prefactor * dist.powf(-self.alpha))
    }

    /// Coupling between two distinct sites of a lattice.
    pub fn between(&self, lattice: &Lattice, i: usize, j: usize) -> Result<f64> {
        if i == j {
            return Err(invalid("coupling of a site with itself is undefined"));
        }
        self.coupling(lattice.distance(i, j)?)
    }
}

/// Precomputed couplings indexed by absolute displacement.
///
/// On a hypercubic lattice the coupling depends only on `|dx_k|` per axis,
/// so a table with `prod(extents)` entries covers every pair.
#[derive(Debug, Clone)]
pub struct CouplingTable {
    strides: Vec<usize>,
    extents: Vec<usize>,
    values: Vec<f64>,
}

impl CouplingTable {
    pub fn new(lattice: &Lattice, model: &CouplingModel) -> Self {
        let extents = lattice.extents().to_vec();
        let mut strides = Vec::with_capacity(extents.len());
        let mut s = 1;
        for &e in &extents {
            strides.push(s);
            s *= e;
        }
        let values = (0..s)
            .map(|k| {
                let sq: usize = lattice.coords_unchecked(k).iter().map(|c| c * c).sum();
                if sq == 0 {
                    0.0
                } else {
                    model.prefactor * (sq as f64).sqrt().powf(-model.alpha)
                }
            })
            .collect();
        Self { strides, extents, values }
    }

    /// Coupling between sites `i != j`; returns 0 for `i == j`.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        let (mut a, mut b) = (i, j);
        let mut k = 0;
        for (&e, &s) in self.extents.iter().zip(&self.strides) {
            k += (a % e).abs_diff(b % e) * s;
            a /= e;
            b /= e;
        }
        self.values[k]
    }

    /// Flat table indexed by `sum_k |dx_k| * strides[k]`.
    pub(crate) fn values(&self) -> &[f64] {
        &self.values
    }

    pub(crate) fn strides(&self) -> &[usize] {
        &self.strides
    }
}

/// JSON lattice configuration: `{ "d": int, "extents": [int...], "alpha": float, "prefactor": float }`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LatticeConfig {
    pub d: usize,
    pub extents: Vec<usize>,
    pub alpha: f64,
    #[serde(default = "unit")]
    pub prefactor: f64,
}

impl LatticeConfig {
    pub fn build(&self) -> Result<(Lattice, CouplingModel)> {
        if self.extents.len() != self.d {
            return Err(invalid(format!(
                "d={} but {} extents given",
                self.d,
                self.extents.len()
            )));
        }
        Ok((Lattice::new(&self.extents)?, CouplingModel::with_prefactor(self.alpha, self.prefactor)?))
    }

    pub fn from_json(text: &str) -> Result<(Lattice, CouplingModel)> {
        let cfg: LatticeConfig =
            serde_json::from_str(text).map_err(|e| invalid(format!("lattice config: {e}")))?;
        cfg.build()
    }
}
