//! Plaquette tilings and periodic color assignments.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::lattice::Lattice;

/// Hypercubic blocks of edge `block_length` covering a lattice, each carrying a color.
///
/// Colors repeat on a super-cell of `supercell_edge` blocks per axis, where
/// `supercell_edge` is the largest integer `s` with `s^d <= n`. Only `s^d`
/// of the requested `n` colors are used when `n` is not a perfect power.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlaquetteTiling {
    pub block_length: usize,
    /// Blocks per axis.
    pub grid: Vec<usize>,
    /// Site indices of each block, in block order (axis 0 fastest).
    pub blocks: Vec<Vec<usize>>,
    pub color_of_block: Vec<usize>,
    pub requested_colors: usize,
    pub supercell_edge: usize,
    /// Blocks cut short by the lattice boundary. Analyses treat them as full blocks.
    pub truncated: Vec<bool>,
    /// Smallest center distance between two distinct same-color blocks, if any pair exists.
    pub min_same_color_distance: Option<f64>,
}

/// Largest `s` with `s^d <= n`.
pub fn integer_root(n: usize, d: usize) -> usize {
    let mut s = (n as f64).powf(1.0 / d as f64).round() as usize;
    while s > 0 && s.pow(d as u32) > n {
        s -= 1;
    }
    while (s + 1).pow(d as u32) <= n {
        s += 1;
    }
    s
}

impl PlaquetteTiling {
    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn colors_used(&self) -> usize {
        self.supercell_edge.pow(self.grid.len() as u32)
    }

    /// Block grid coordinates.
    pub fn block_coords(&self, b: usize) -> Vec<usize> {
        let mut rest = b;
        self.grid
            .iter()
            .map(|&g| {
                let c = rest % g;
                rest /= g;
                c
            })
            .collect()
    }

    /// Nominal center of a block (truncated blocks are treated as full).
    pub fn block_center(&self, b: usize) -> Vec<f64> {
        let l = self.block_length as f64;
        self.block_coords(b)
            .into_iter()
            .map(|c| c as f64 * l + (l - 1.0) / 2.0)
            .collect()
    }

    pub fn center_distance(&self, a: usize, b: usize) -> f64 {
        self.block_center(a)
            .iter()
            .zip(self.block_center(b))
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    /// Color of every site of the lattice the tiling was built on.
    pub fn site_colors(&self, num_sites: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; num_sites];
        for (b, sites) in self.blocks.iter().enumerate() {
            for &s in sites {
                out[s] = self.color_of_block[b];
            }
        }
        out
    }
}

/// Tile `lattice` with blocks of edge `block_length` and color them with at most `n` colors.
pub fn tile_and_color(lattice: &Lattice, block_length: usize, n: usize) -> Result<PlaquetteTiling> {
    if block_length == 0 {
        return Err(invalid("block length must be positive"));
    }
    if n == 0 {
        return Err(invalid("need at least one color"));
    }
    let d = lattice.dimension();
    let grid: Vec<usize> = lattice.extents().iter().map(|&e| e.div_ceil(block_length)).collect();
    let num_blocks: usize = grid.iter().product();
    if n > num_blocks {
        return Err(Error::TooManyColors { colors: n, blocks: num_blocks });
    }
    let s = integer_root(n, d);

    let mut blocks = vec![Vec::with_capacity(block_length.pow(d as u32)); num_blocks];
    for site in 0..lattice.num_sites() {
        let c = lattice.coords_unchecked(site);
        let mut b = 0;
        let mut stride = 1;
        for (x, g) in c.iter().zip(&grid) {
            b += (x / block_length) * stride;
            stride *= g;
        }
        blocks[b].push(site);
    }
    let full = block_length.pow(d as u32);
    let truncated = blocks.iter().map(|b| b.len() != full).collect();

    let mut tiling = PlaquetteTiling {
        block_length,
        grid: grid.clone(),
        blocks,
        color_of_block: Vec::with_capacity(num_blocks),
        requested_colors: n,
        supercell_edge: s,
        truncated,
        min_same_color_distance: None,
    };
    for b in 0..num_blocks {
        let mut color = 0;
        let mut stride = 1;
        for c in tiling.block_coords(b) {
            color += (c % s) * stride;
            stride *= s;
        }
        tiling.color_of_block.push(color);
    }
    // Nearest same-color partner is one super-cell away along a single axis.
    if grid.iter().any(|&g| g > s) {
        tiling.min_same_color_distance = Some((s * block_length) as f64);
    }
    Ok(tiling)
}
