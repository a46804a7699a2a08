//! Ghost-shell routing for escaped velocity slots.
//!
//! A slot that moved by `delta` reads cell `j - delta` for every interior
//! cell `j`. The out-of-block cells among those form up to seven face, edge
//! and corner pieces. Pieces that leave the block only along unsplit axes
//! are periodic images inside the block and are copied locally; the rest
//! arrive in one message per neighbor direction. Sender and receiver build
//! the same cell lists from the block geometry, which all blocks share.

use super::decomposition::{directions, Decomposition};
use super::message::{ExchangeMessage, SlotPayload};
use crate::error::{FksError, Result};
use crate::transport::{BlockField, Escape, GhostStatus};

/// Receiver ghost cells and the matching sender interior cells, both as
/// padded indices, in the same order.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Route {
    pub dst: Vec<u32>,
    pub src: Vec<u32>,
}

impl Route {
    pub fn len(&self) -> usize {
        self.dst.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dst.is_empty()
    }
}

#[inline]
fn delta_index(d: [i8; 3]) -> usize {
    (d[0] + 1) as usize + 3 * (d[1] + 1) as usize + 9 * (d[2] + 1) as usize
}

/// Routes of one block geometry for every `delta` and neighbor direction.
#[derive(Debug, Clone)]
pub struct HaloPlan {
    dirs: Vec<[i8; 3]>,
    // [delta_index][direction]
    remote: Vec<Vec<Route>>,
    // [delta_index]
    local: Vec<Route>,
}

impl HaloPlan {
    pub fn new(decomp: &Decomposition) -> Self {
        let n = decomp.block_extents();
        let split = decomp.split();
        let dirs = directions(split);
        let probe = BlockField::zeros(n, 0);
        let mut remote = vec![vec![Route::default(); dirs.len()]; 27];
        let mut local = vec![Route::default(); 27];
        let ni = n.map(|c| c as isize);
        for dz in -1i8..=1 {
            for dy in -1i8..=1 {
                for dx in -1i8..=1 {
                    let delta = [dx, dy, dz];
                    if delta == [0; 3] {
                        continue;
                    }
                    let di = delta_index(delta);
                    // out-of-block classes d with d_a in {0, -delta_a}, d != 0
                    for mask in 1u8..8 {
                        if (0..3).any(|a| mask & (1 << a) != 0 && delta[a] == 0) {
                            continue;
                        }
                        let d = [0, 1, 2].map(|a| if mask & (1 << a) != 0 { -delta[a] } else { 0 });
                        let axis = |a: usize| -> Vec<isize> {
                            match d[a] {
                                -1 => vec![-1],
                                1 => vec![ni[a]],
                                _ => (0..ni[a])
                                    .filter(|g| (0..ni[a]).contains(&(g + delta[a] as isize)))
                                    .collect(),
                            }
                        };
                        let reduced = [0, 1, 2].map(|a| if split[a] { d[a] } else { 0 });
                        let route = if reduced == [0; 3] {
                            &mut local[di]
                        } else {
                            let r = dirs.iter().position(|x| *x == reduced).expect("reduced direction");
                            &mut remote[di][r]
                        };
                        for &gz in &axis(2) {
                            for &gy in &axis(1) {
                                for &gx in &axis(0) {
                                    let g = [gx, gy, gz];
                                    let s = [0, 1, 2].map(|a| g[a].rem_euclid(ni[a]));
                                    route.dst.push(probe.padded(g) as u32);
                                    route.src.push(probe.padded(s) as u32);
                                }
                            }
                        }
                    }
                }
            }
        }
        Self { dirs, remote, local }
    }

    /// Neighbor directions in message order.
    pub fn directions(&self) -> &[[i8; 3]] {
        &self.dirs
    }

    pub fn route(&self, delta: [i8; 3], dir: usize) -> &Route {
        &self.remote[delta_index(delta)][dir]
    }

    pub fn local_route(&self, delta: [i8; 3]) -> &Route {
        &self.local[delta_index(delta)]
    }

    /// Values one worker sends per step for `escapes`, over all directions.
    pub fn expected_values(&self, escapes: &[Escape]) -> usize {
        escapes
            .iter()
            .map(|e| self.remote[delta_index(e.delta)].iter().map(Route::len).sum::<usize>())
            .sum()
    }

    /// Copies the periodic images that stay inside the block.
    pub fn fill_local(&self, field: &mut BlockField, escapes: &[Escape]) {
        for e in escapes {
            let r = self.local_route(e.delta);
            for (&d, &s) in r.dst.iter().zip(&r.src) {
                let m = field.get(s as usize, e.k);
                field.set(d as usize, e.k, m);
            }
        }
    }

    /// Message for direction `dir`: boundary masses the receiver at
    /// `coords - direction` needs.
    pub fn outgoing(&self, field: &BlockField, escapes: &[Escape], dir: usize, step: u64) -> ExchangeMessage {
        let slots = escapes
            .iter()
            .filter_map(|e| {
                let r = self.route(e.delta, dir);
                (!r.is_empty()).then(|| SlotPayload {
                    k: e.k as u32,
                    delta: e.delta,
                    values: r.src.iter().map(|&s| field.get(s as usize, e.k)).collect(),
                })
            })
            .collect();
        ExchangeMessage { step, slots }
    }

    /// Writes a received message into the ghost shell after checking it
    /// against the local escape list and geometry.
    pub fn apply(
        &self,
        field: &mut BlockField,
        escapes: &[Escape],
        dir: usize,
        step: u64,
        msg: &ExchangeMessage,
    ) -> Result<()> {
        if msg.step != step {
            return Err(FksError::protocol(format!(
                "message from direction {:?} is for step {}, expected {step}",
                self.dirs[dir], msg.step
            )));
        }
        let mut slots = msg.slots.iter();
        for e in escapes {
            let r = self.route(e.delta, dir);
            if r.is_empty() {
                continue;
            }
            let s = slots.next().ok_or_else(|| {
                FksError::protocol(format!(
                    "message from direction {:?} lacks slot {}",
                    self.dirs[dir], e.k
                ))
            })?;
            if s.k as usize != e.k || s.delta != e.delta || s.values.len() != r.len() {
                return Err(FksError::protocol(format!(
                    "slot mismatch from direction {:?}: got k={} delta={:?} with {} values, expected k={} delta={:?} with {}",
                    self.dirs[dir],
                    s.k,
                    s.delta,
                    s.values.len(),
                    e.k,
                    e.delta,
                    r.len()
                )));
            }
            for (&d, &v) in r.dst.iter().zip(&s.values) {
                field.set(d as usize, e.k, v);
            }
        }
        if slots.next().is_some() {
            return Err(FksError::protocol(format!(
                "message from direction {:?} carries unexpected slots",
                self.dirs[dir]
            )));
        }
        Ok(())
    }

    /// Marks every escaped slot ready once the local copy and all
    /// directions have been applied.
    pub fn mark_ready(&self, escapes: &[Escape], ghosts: &mut GhostStatus) {
        for e in escapes {
            ghosts.mark(e.k);
        }
    }
}
