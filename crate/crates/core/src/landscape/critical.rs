use serde::{Deserialize, Serialize};

use crate::configuration::{energy, energy_monochromatic, Configuration};
use crate::coupling::{derive_constants, CouplingParams};
use crate::error::Result;
use crate::gates::{gate_membership, GateFamily};
use crate::lattice::TorusLattice;

/// Result of checking the critical energy level on the slice of
/// configurations with exactly `ell*(ell-1)+1` spins 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriticalSliceReport {
    /// Number of spins 1 defining the slice.
    pub slice_count: usize,
    pub configs_checked: usize,
    /// Smallest value of `H(eta) - H(2) - Gamma_star` seen (must be >= 0).
    pub min_residual: f64,
    /// Configurations violating the level bound (should be empty).
    pub violations: Vec<String>,
    /// Equality cases: packed spins plus whether they belong to
    /// `W(m,1) | W'(m,1)` for some m.
    pub equality_cases: Vec<(String, bool)>,
    /// Equality cases outside the two gate families (should be empty).
    pub equality_outside_gates: usize,
    /// True when the window/background budget truncated the enumeration.
    pub truncated: bool,
}

/// Enumerate the slice restricted to a window: the spins 1 are placed in all
/// ways inside a `window x window` box anchored at the origin; the remaining
/// vertices are monochromatic 2, monochromatic 3, or randomly mixed 2/3
/// backgrounds (up to `random_backgrounds`, seeded). Verifies
/// `H(eta) - H(2) >= Gamma_star` with equality exactly on the
/// protuberance-rectangle families.
pub fn critical_slice_check(
    params: &CouplingParams,
    lattice: &TorusLattice,
    window: usize,
    random_backgrounds: usize,
    max_configs: usize,
    seed: u64,
) -> Result<CriticalSliceReport> {
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    let derived = derive_constants(params)?;
    let ell = derived.ell_star as usize;
    let slice_count = ell * (ell - 1) + 1;
    let h2 = energy_monochromatic(lattice, params, 2);
    let level = h2 + derived.gamma_star;
    let tol = 1e-9 * level.abs().max(1.0);

    let window = window.min(lattice.rows()).min(lattice.cols());
    let cells: Vec<usize> = (0..window)
        .flat_map(|r| (0..window).map(move |c| lattice.vertex(r, c)))
        .collect();

    let mut rng = StdRng::seed_from_u64(seed);
    let nv = lattice.num_vertices();

    let mut report = CriticalSliceReport {
        slice_count,
        configs_checked: 0,
        min_residual: f64::INFINITY,
        violations: Vec::new(),
        equality_cases: Vec::new(),
        equality_outside_gates: 0,
        truncated: false,
    };

    let families = [
        GateFamily::W1 { m: 2 },
        GateFamily::W1 { m: 3 },
        GateFamily::W1Prime { m: 2 },
        GateFamily::W1Prime { m: 3 },
    ];

    let mut combo = init_combination(slice_count);
    loop {
        // backgrounds: all-2, all-3, plus random 2/3 mixtures
        for bg in 0..(2 + random_backgrounds) {
            if report.configs_checked >= max_configs {
                report.truncated = true;
                return Ok(report);
            }
            let mut spins: Vec<u8> = match bg {
                0 => vec![2; nv],
                1 => vec![3; nv],
                _ => (0..nv)
                    .map(|_| if rng.random_range(0..2) == 0 { 2u8 } else { 3 })
                    .collect(),
            };
            for &idx in &combo {
                spins[cells[idx]] = 1;
            }
            let eta = Configuration::from_spins(*lattice, spins)?;
            let h = energy(&eta, params);
            let residual = h - level;
            report.configs_checked += 1;
            report.min_residual = report.min_residual.min(residual);
            if residual < -tol {
                report.violations.push(eta.spin_string());
            } else if residual.abs() <= tol {
                let mut in_gate = false;
                for f in &families {
                    if gate_membership(&eta, f, params)?.is_some() {
                        in_gate = true;
                        break;
                    }
                }
                if !in_gate {
                    report.equality_outside_gates += 1;
                }
                report.equality_cases.push((eta.spin_string(), in_gate));
            }
        }
        if !next_combination(&mut combo, cells.len()) {
            break;
        }
    }
    Ok(report)
}

fn init_combination(k: usize) -> Vec<usize> {
    (0..k).collect()
}

fn next_combination(combo: &mut [usize], n: usize) -> bool {
    let k = combo.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if combo[i] < n - (k - i) {
            combo[i] += 1;
            for j in (i + 1)..k {
                combo[j] = combo[j - 1] + 1;
            }
            return true;
        }
    }
    false
}
