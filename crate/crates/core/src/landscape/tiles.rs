use crate::configuration::Configuration;
use serde::{Deserialize, Serialize};

/// Stability class of the tile centered at a vertex: the local energy
/// response to flipping the center spin.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TileClass {
    /// Some flip of the center strictly lowers the energy.
    Unstable,
    /// No flip lowers the energy, but some flip keeps it equal.
    StableNotStrict,
    /// Every flip of the center strictly raises the energy.
    StrictlyStable,
}

/// Classify the tile at `v` by the case analysis of the stable-tile taxonomy.
///
/// With `sigma(v) = 1` the tile is strictly stable iff at least two neighbors
/// carry spin 1. With `sigma(v) = r in {2,3}` it is strictly stable iff at
/// least three neighbors carry `r`, or exactly two carry `r` and exactly one
/// carries 1 (the remaining one then carries the other of `{2,3}`); it is
/// stable-but-not-strict iff exactly two neighbors carry `r` and none carries
/// 1. The taxonomy is valid under the standing coupling assumptions (in
/// particular `2*g12 >= 4*g23 + g1`); a center with two spin-1 neighbors and
/// spin != 1 is always unstable regardless.
pub fn classify_tile(sigma: &Configuration, v: usize) -> TileClass {
    let mut counts = [0u8; 3];
    for w in sigma.lattice().neighbors(v) {
        counts[(sigma.get(w) - 1) as usize] += 1;
    }
    let center = sigma.get(v);
    let c1 = counts[0];
    if center == 1 {
        if c1 >= 2 {
            TileClass::StrictlyStable
        } else {
            TileClass::Unstable
        }
    } else {
        let cr = counts[(center - 1) as usize];
        if cr >= 3 || (cr == 2 && c1 == 1) {
            TileClass::StrictlyStable
        } else if cr == 2 && c1 == 0 {
            TileClass::StableNotStrict
        } else {
            TileClass::Unstable
        }
    }
}
