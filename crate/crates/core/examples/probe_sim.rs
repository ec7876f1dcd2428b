//! Dev probe: timing of the dd slow-mode extraction.
use potts_core::coupling::CouplingParams;
use potts_core::landscape::EnumSpace;
use potts_core::lattice::TorusLattice;
use potts_core::spectral::{build_kernel, slow_modes};
use std::time::Instant;

fn main() {
    let lat = TorusLattice::new(2, 3).unwrap();
    let p = CouplingParams::new(0.45, 0.10, 0.10, 0.25, 0.25, 0.05).unwrap();
    let space = EnumSpace::new(lat, p, 19_683).unwrap();
    for beta in [0.5f64, 8.0, 40.0] {
        let kernel = build_kernel(&space, beta).unwrap();
        let t0 = Instant::now();
        let m = slow_modes(&kernel, 2).unwrap();
        println!("beta={beta}: rhos={:?} ({:.2}s)", m.rhos, t0.elapsed().as_secs_f64());
    }
}
