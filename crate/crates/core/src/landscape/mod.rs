//! Energy-landscape analysis: projections, tile/cluster geometry, and
//! exhaustive computations (communication heights, stability levels, local
//! minima, saddles, initial cycles) on enumerable or energy-capped spaces.

mod brute;
mod clusters;
mod critical;
mod escape;
mod path;
mod search;
mod space;
mod tiles;

pub use brute::{
    local_minima_and_plateaux, max_gamma_to_stable, minimal_saddles, LandscapeReport,
    MinimaReport, SaddleReport,
};
pub use clusters::{bridges, clusters, clusters_interact, BridgeReport, ClusterInfo};
pub use critical::{critical_slice_check, CriticalSliceReport};
pub use escape::build_escape_path;
pub use path::LatticePath;
pub use search::{
    comm_height, comm_height_capped, initial_cycle, initial_cycle_capped, stability_level,
    CommHeight, CycleMembership, SearchOutcome, StabilityLevel,
};
pub use space::EnumSpace;
pub use tiles::{classify_tile, TileClass};

use crate::configuration::Configuration;
use crate::error::{PottsError, Result};

/// Replace every spin `r` by `s`, leaving all other vertices unchanged.
pub fn project(sigma: &Configuration, r: u8, s: u8) -> Result<Configuration> {
    if r == s {
        return Err(PottsError::InvalidArgument(
            "projection requires r != s".to_string(),
        ));
    }
    if !crate::configuration::SPINS.contains(&r) || !crate::configuration::SPINS.contains(&s) {
        return Err(PottsError::InvalidArgument(format!(
            "spins must be in {{1,2,3}}, got r={r}, s={s}"
        )));
    }
    let mut out = sigma.clone();
    for v in 0..sigma.lattice().num_vertices() {
        if out.get(v) == r {
            out.set(v, s);
        }
    }
    Ok(out)
}
