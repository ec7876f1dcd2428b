use serde::{Deserialize, Serialize};

use crate::coupling::CouplingParams;
use crate::error::{PottsError, Result};
use crate::lattice::TorusLattice;

pub const SPINS: [u8; 3] = [1, 2, 3];

/// A spin assignment `sigma: V -> {1,2,3}` on a torus, stored as a dense
/// row-major byte array.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Configuration {
    lattice: TorusLattice,
    spins: Vec<u8>,
}

impl Configuration {
    pub fn monochromatic(lattice: TorusLattice, spin: u8) -> Self {
        assert!(SPINS.contains(&spin), "spin must be in {{1,2,3}}");
        Self {
            lattice,
            spins: vec![spin; lattice.num_vertices()],
        }
    }

    pub fn from_spins(lattice: TorusLattice, spins: Vec<u8>) -> Result<Self> {
        if spins.len() != lattice.num_vertices() {
            return Err(PottsError::InvalidArgument(format!(
                "spin array length {} does not match K*L = {}",
                spins.len(),
                lattice.num_vertices()
            )));
        }
        if let Some(bad) = spins.iter().find(|s| !SPINS.contains(s)) {
            return Err(PottsError::InvalidArgument(format!(
                "spin value {bad} outside {{1,2,3}}"
            )));
        }
        Ok(Self { lattice, spins })
    }

    /// Parse a packed spin string like `"122313..."` (row-major).
    pub fn from_spin_string(lattice: TorusLattice, s: &str) -> Result<Self> {
        let spins: Vec<u8> = s
            .bytes()
            .map(|b| b.wrapping_sub(b'0'))
            .collect();
        Self::from_spins(lattice, spins)
    }

    /// Packed spin string (row-major digits).
    pub fn spin_string(&self) -> String {
        self.spins.iter().map(|s| (b'0' + s) as char).collect()
    }

    #[inline]
    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    #[inline]
    pub fn spins(&self) -> &[u8] {
        &self.spins
    }

    #[inline]
    pub fn get(&self, v: usize) -> u8 {
        self.spins[v]
    }

    /// In-place single spin update.
    #[inline]
    pub fn set(&mut self, v: usize, s: u8) {
        debug_assert!(SPINS.contains(&s));
        self.spins[v] = s;
    }

    /// Copy with one vertex flipped.
    pub fn flipped(&self, v: usize, s: u8) -> Self {
        let mut c = self.clone();
        c.set(v, s);
        c
    }

    pub fn is_monochromatic(&self) -> Option<u8> {
        let first = self.spins[0];
        if self.spins.iter().all(|&s| s == first) {
            Some(first)
        } else {
            None
        }
    }

    /// Number of vertices where `self` and `other` differ.
    pub fn hamming(&self, other: &Self) -> usize {
        self.spins
            .iter()
            .zip(&other.spins)
            .filter(|(a, b)| a != b)
            .count()
    }
}

/// Edge counts `n_ij` and spin counts `N_i` of a configuration.
///
/// `n[i][j]` (0-based spin indices) counts unordered `ij`-edges, so
/// `sum_{i<=j} n[i][j] = 2*K*L` and `4*N_i = 2*n_ii + sum_{j != i} n_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeCensus {
    pub n: [[u64; 3]; 3],
    pub counts: [u64; 3],
}

impl EdgeCensus {
    #[inline]
    pub fn n_pair(&self, a: u8, b: u8) -> u64 {
        self.n[(a - 1) as usize][(b - 1) as usize]
    }

    #[inline]
    pub fn count(&self, spin: u8) -> u64 {
        self.counts[(spin - 1) as usize]
    }

    /// Verify the structural identities against the lattice.
    pub fn check(&self, lattice: &TorusLattice) -> Result<()> {
        let mut edge_total = 0u64;
        for i in 0..3 {
            for j in i..3 {
                edge_total += self.n[i][j];
            }
        }
        if edge_total != lattice.num_edges() as u64 {
            return Err(PottsError::InvalidArgument(format!(
                "edge census totals {edge_total}, expected {}",
                lattice.num_edges()
            )));
        }
        let vertex_total: u64 = self.counts.iter().sum();
        if vertex_total != lattice.num_vertices() as u64 {
            return Err(PottsError::InvalidArgument(format!(
                "vertex census totals {vertex_total}, expected {}",
                lattice.num_vertices()
            )));
        }
        for i in 0..3 {
            let mut incident = 2 * self.n[i][i];
            for j in 0..3 {
                if j != i {
                    incident += self.n[i][j];
                }
            }
            if incident != 4 * self.counts[i] {
                return Err(PottsError::InvalidArgument(format!(
                    "census identity 4*N_i = 2*n_ii + sum n_ij violated for spin {}",
                    i + 1
                )));
            }
        }
        Ok(())
    }
}

/// Exact integer edge and spin counts of `sigma`.
pub fn edge_census(sigma: &Configuration) -> EdgeCensus {
    let lat = sigma.lattice();
    let spins = sigma.spins();
    let mut n = [[0u64; 3]; 3];
    let mut counts = [0u64; 3];
    for v in 0..lat.num_vertices() {
        let a = (spins[v] - 1) as usize;
        counts[a] += 1;
        for w in lat.forward_neighbors(v) {
            let b = (spins[w] - 1) as usize;
            let (lo, hi) = (a.min(b), a.max(b));
            n[lo][hi] += 1;
        }
    }
    // mirror for convenient symmetric access
    for i in 0..3 {
        for j in (i + 1)..3 {
            n[j][i] = n[i][j];
        }
    }
    EdgeCensus { n, counts }
}

/// Hamiltonian in the raw J-form: direct sum over edges of
/// `-J_ii` for aligned pairs and `+J_ij` for disagreeing pairs.
pub fn energy(sigma: &Configuration, params: &CouplingParams) -> f64 {
    let lat = sigma.lattice();
    let spins = sigma.spins();
    let mut h = 0.0;
    for v in 0..lat.num_vertices() {
        let a = spins[v];
        for w in lat.forward_neighbors(v) {
            let b = spins[w];
            if a == b {
                h -= params.j(a, a);
            } else {
                h += params.j(a, b);
            }
        }
    }
    h
}

/// Energy of the monochromatic configuration `spin` on `lattice`.
pub fn energy_monochromatic(lattice: &TorusLattice, params: &CouplingParams, spin: u8) -> f64 {
    -(lattice.num_edges() as f64) * params.j(spin, spin)
}

/// Hamiltonian in the gamma-form:
/// `H(2) - gamma1*n11 + gamma12*n12 + gamma13*n13 + gamma23*n23`
/// with `H(2) = -2*K*L*J22`.
pub fn energy_gamma_form(
    census: &EdgeCensus,
    lattice: &TorusLattice,
    params: &CouplingParams,
) -> f64 {
    let h2 = energy_monochromatic(lattice, params, 2);
    h2 - params.gamma1() * census.n_pair(1, 1) as f64
        + params.gamma12() * census.n_pair(1, 2) as f64
        + params.gamma13() * census.n_pair(1, 3) as f64
        + params.gamma23() * census.n_pair(2, 3) as f64
}

/// Local edge energy of vertex `v` carrying spin `s` against the four
/// incident edges of `sigma`.
#[inline]
fn local_energy(sigma: &Configuration, v: usize, s: u8, params: &CouplingParams) -> f64 {
    let mut e = 0.0;
    for w in sigma.lattice().neighbors(v) {
        let b = sigma.get(w);
        if s == b {
            e -= params.j(s, s);
        } else {
            e += params.j(s, b);
        }
    }
    e
}

/// `H(sigma^{v -> s}) - H(sigma)` using only the four incident edges.
pub fn energy_delta(sigma: &Configuration, v: usize, s: u8, params: &CouplingParams) -> f64 {
    let old = sigma.get(v);
    if old == s {
        return 0.0;
    }
    local_energy(sigma, v, s, params) - local_energy(sigma, v, old, params)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn params() -> CouplingParams {
        CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, 0.3).unwrap()
    }

    fn random_config(rng: &mut StdRng, lat: TorusLattice) -> Configuration {
        let spins: Vec<u8> = (0..lat.num_vertices())
            .map(|_| rng.random_range(1..=3u8))
            .collect();
        Configuration::from_spins(lat, spins).unwrap()
    }

    #[test]
    fn monochromatic_energies() {
        let lat = TorusLattice::new(4, 5).unwrap();
        let p = params();
        let one = Configuration::monochromatic(lat, 1);
        let two = Configuration::monochromatic(lat, 2);
        assert!((energy(&one, &p) - (-2.0 * 20.0 * 1.2)).abs() < 1e-12);
        assert!((energy(&two, &p) - (-2.0 * 20.0 * 0.2)).abs() < 1e-12);
    }

    #[test]
    fn census_of_single_defect() {
        let lat = TorusLattice::new(4, 4).unwrap();
        let two = Configuration::monochromatic(lat, 2);
        let c = edge_census(&two);
        assert_eq!(c.n_pair(2, 2), 32);
        assert_eq!(c.count(2), 16);
        c.check(&lat).unwrap();

        let with_one = two.flipped(5, 1);
        let c = edge_census(&with_one);
        assert_eq!(c.n_pair(1, 2), 4);
        assert_eq!(c.n_pair(2, 2), 2 * 16 - 4);
        assert_eq!(c.count(1), 1);
        c.check(&lat).unwrap();
    }

    #[test]
    fn flip_in_sea_of_two_costs_four_gammas() {
        let lat = TorusLattice::new(5, 6).unwrap();
        let p = params();
        let two = Configuration::monochromatic(lat, 2);
        let d1 = energy_delta(&two, 7, 1, &p);
        assert!((d1 - 4.0 * p.gamma12()).abs() < 1e-12);
        let d3 = energy_delta(&two, 7, 3, &p);
        assert!((d3 - 4.0 * p.gamma23()).abs() < 1e-12);
        assert_eq!(energy_delta(&two, 7, 2, &p), 0.0);
        // and against the full gamma-form example: H(2) + 4*gamma12
        let flipped = two.flipped(7, 1);
        let h = energy(&flipped, &p);
        let h2 = energy_monochromatic(&lat, &p, 2);
        assert!((h - (h2 + 4.0 * p.gamma12())).abs() < 1e-12);
    }

    #[test]
    fn dual_form_and_census_identities_random() {
        let mut rng = StdRng::seed_from_u64(0x5eed);
        for _ in 0..300 {
            let k = rng.random_range(2..=6usize);
            let l = rng.random_range(k..=6usize);
            let lat = TorusLattice::new(k, l).unwrap();
            let p = params();
            let sigma = random_config(&mut rng, lat);
            let census = edge_census(&sigma);
            census.check(&lat).unwrap();
            let raw = energy(&sigma, &p);
            let gf = energy_gamma_form(&census, &lat, &p);
            assert!(
                (raw - gf).abs() <= 1e-10 * raw.abs().max(1.0),
                "dual-form mismatch: {raw} vs {gf}"
            );
        }
    }

    #[test]
    fn delta_matches_full_recomputation() {
        let mut rng = StdRng::seed_from_u64(42);
        let lat = TorusLattice::new(3, 5).unwrap();
        let p = params();
        for _ in 0..500 {
            let sigma = random_config(&mut rng, lat);
            let v = rng.random_range(0..lat.num_vertices());
            let s = rng.random_range(1..=3u8);
            let d = energy_delta(&sigma, v, s, &p);
            let full = energy(&sigma.flipped(v, s), &p) - energy(&sigma, &p);
            assert!((d - full).abs() < 1e-12, "delta {d} vs full {full}");
        }
    }

    #[test]
    fn spin_string_roundtrip() {
        let lat = TorusLattice::new(2, 3).unwrap();
        let c = Configuration::from_spin_string(lat, "123321").unwrap();
        assert_eq!(c.spin_string(), "123321");
        assert!(Configuration::from_spin_string(lat, "123324").is_err());
        assert!(Configuration::from_spin_string(lat, "12332").is_err());
    }
}
