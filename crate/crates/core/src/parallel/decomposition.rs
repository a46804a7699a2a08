use crate::error::{FksError, Result};
use crate::phase_space::SpatialGrid;

/// Offsets in `{-1, 0, 1}^3 \ {0}` restricted to the split axes, in a fixed
/// order (z slowest, then y, then x; each from -1 to 1).
pub fn directions(split: [bool; 3]) -> Vec<[i8; 3]> {
    let range = |s: bool| if s { vec![-1i8, 0, 1] } else { vec![0i8] };
    let mut out = Vec::new();
    for dz in range(split[2]) {
        for dy in range(split[1]) {
            for dx in range(split[0]) {
                if [dx, dy, dz] != [0; 3] {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

/// Adjacent block in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Neighbor {
    pub direction: [i8; 3],
    pub rank: usize,
}

/// Ghost-shell layout of one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HaloSpec {
    /// Cells of the one-layer shell over the split axes: faces, shared edges
    /// and shared corners.
    pub ghost_cells: usize,
    /// Ghost cells shared with the neighbor in each direction, in
    /// [`directions`] order.
    pub per_neighbor: Vec<([i8; 3], usize)>,
}

/// Equal cuboid blocks of a periodic grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    grid_n: usize,
    dims: [usize; 3],
    block: [usize; 3],
}

pub fn build_decomposition(sgrid: &SpatialGrid, dims: [usize; 3]) -> Result<Decomposition> {
    let n = sgrid.n_per_axis();
    let mut block = [0; 3];
    for a in 0..3 {
        let name = ["x", "y", "z"][a];
        if dims[a] == 0 {
            return Err(FksError::config(format!("worker count along {name} must be positive")));
        }
        if !n.is_multiple_of(dims[a]) {
            return Err(FksError::config(format!(
                "axis {name}: {n} cells are not divisible by {} workers",
                dims[a]
            )));
        }
        block[a] = n / dims[a];
    }
    Ok(Decomposition { grid_n: n, dims, block })
}

/// Parses `PxxPyxPz`, e.g. `4x2x1`.
pub fn parse_dims(s: &str) -> Result<[usize; 3]> {
    let parts: Vec<&str> = s.trim().split(['x', 'X']).collect();
    let bad = || FksError::config(format!("dims must look like 2x2x1, got {s:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let mut d = [0; 3];
    for (o, p) in d.iter_mut().zip(parts) {
        *o = p.trim().parse().map_err(|_| bad())?;
    }
    Ok(d)
}

/// Splits `workers` over the axes with the fewest cut axes: slabs first,
/// then pencils, then cuboids, preferring the most even split.
pub fn default_dims(workers: usize, n: usize) -> Result<[usize; 3]> {
    let mut best: Option<([usize; 3], (usize, usize))> = None;
    for px in 1..=workers {
        if !workers.is_multiple_of(px) {
            continue;
        }
        for py in 1..=workers / px {
            if !(workers / px).is_multiple_of(py) {
                continue;
            }
            let pz = workers / px / py;
            let d = [px, py, pz];
            if d.iter().any(|&p| !n.is_multiple_of(p)) || !(px >= py && py >= pz) {
                continue;
            }
            let split = d.iter().filter(|&&p| p > 1).count();
            let key = (split, px);
            if best.is_none_or(|(_, b)| key < b) {
                best = Some((d, key));
            }
        }
    }
    best.map(|(d, _)| d)
        .ok_or_else(|| FksError::config(format!("{workers} workers cannot split a {n}^3 grid into equal blocks")))
}

impl Decomposition {
    pub fn dims(&self) -> [usize; 3] {
        self.dims
    }

    pub fn workers(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn grid_n(&self) -> usize {
        self.grid_n
    }

    /// Cells per block along each axis.
    pub fn block_extents(&self) -> [usize; 3] {
        self.block
    }

    pub fn cells_per_block(&self) -> usize {
        self.block.iter().product()
    }

    pub fn split(&self) -> [bool; 3] {
        self.dims.map(|p| p > 1)
    }

    pub fn coords(&self, rank: usize) -> [usize; 3] {
        let [px, py, _] = self.dims;
        [rank % px, (rank / px) % py, rank / (px * py)]
    }

    pub fn rank(&self, coords: [usize; 3]) -> usize {
        coords[0] + self.dims[0] * (coords[1] + self.dims[1] * coords[2])
    }

    /// Rank at `coords(rank) + d`, periodic.
    pub fn shifted(&self, rank: usize, d: [i8; 3]) -> usize {
        let c = self.coords(rank);
        let mut out = [0; 3];
        for a in 0..3 {
            out[a] = (c[a] as i64 + d[a] as i64).rem_euclid(self.dims[a] as i64) as usize;
        }
        self.rank(out)
    }

    /// Global position of the first cell of a block.
    pub fn origin(&self, rank: usize) -> [usize; 3] {
        let c = self.coords(rank);
        [c[0] * self.block[0], c[1] * self.block[1], c[2] * self.block[2]]
    }

    pub fn neighbors(&self, rank: usize) -> Vec<Neighbor> {
        directions(self.split())
            .into_iter()
            .map(|d| Neighbor {
                direction: d,
                rank: self.shifted(rank, d),
            })
            .collect()
    }

    pub fn neighbor_count(&self) -> usize {
        directions(self.split()).len()
    }

    pub fn halo(&self) -> HaloSpec {
        let split = self.split();
        let padded: usize = (0..3).map(|a| self.block[a] + 2 * split[a] as usize).product();
        let per_neighbor = directions(split)
            .into_iter()
            .map(|d| {
                let cells = (0..3).map(|a| if d[a] == 0 { self.block[a] } else { 1 }).product();
                (d, cells)
            })
            .collect();
        HaloSpec {
            ghost_cells: padded - self.cells_per_block(),
            per_neighbor,
        }
    }
}
