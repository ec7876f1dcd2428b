//! Discrete-time single-spin-flip Metropolis dynamics with exact integer
//! edge-census tracking (energies are reconstructed from counts, so the
//! cached energy never drifts) and reproducible per-replica RNG streams.

mod experiments;

pub use experiments::{
    arrhenius_experiment, recurrence_experiment, simulate_hitting, survival_median,
    transition_split_experiment, ArrheniusBetaBlock, ArrheniusReport, HittingRecord,
    RecurrenceReport, SaddleDetector, SaddleHit, TargetSet, TransitionSplitReport,
};

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::configuration::Configuration;
use crate::coupling::CouplingParams;
use crate::error::{PottsError, Result};
use crate::lattice::TorusLattice;

/// Index of the unordered spin pair (a,b) into a 6-slot census array:
/// 11,12,13,22,23,33.
#[inline]
fn pair_index(a: u8, b: u8) -> usize {
    const IDX: [[usize; 3]; 3] = [[0, 1, 2], [1, 3, 4], [2, 4, 5]];
    IDX[(a - 1) as usize][(b - 1) as usize]
}

/// Precomputed acceptance data per (old spin, new spin, neighbor counts).
struct AcceptTable {
    /// Energy difference of the flip.
    delta: Vec<f64>,
    /// Acceptance threshold as a u64 scale; u64::MAX means always accept.
    threshold: Vec<u64>,
}

#[inline]
fn table_index(old: u8, new: u8, c1: usize, c2: usize) -> usize {
    ((((old - 1) as usize * 3) + (new - 1) as usize) * 5 + c1) * 5 + c2
}

impl AcceptTable {
    fn build(params: &CouplingParams, beta: f64) -> Self {
        let n = 3 * 3 * 5 * 5;
        let mut delta = vec![0.0; n];
        let mut threshold = vec![0u64; n];
        // edge cost in the gamma form: aligned pairs contribute 0 except 11
        let cost = |s: u8, b: u8| -> f64 {
            if s == b {
                if s == 1 {
                    -params.gamma1()
                } else {
                    0.0
                }
            } else {
                params.gamma_pair(s, b)
            }
        };
        for old in 1u8..=3 {
            for new in 1u8..=3 {
                for c1 in 0..=4usize {
                    for c2 in 0..=(4 - c1) {
                        let c3 = 4 - c1 - c2;
                        let counts = [(1u8, c1), (2, c2), (3, c3)];
                        let mut d = 0.0;
                        for (b, c) in counts {
                            d += c as f64 * (cost(new, b) - cost(old, b));
                        }
                        let ix = table_index(old, new, c1, c2);
                        delta[ix] = d;
                        threshold[ix] = if d <= 0.0 {
                            u64::MAX
                        } else {
                            let p = (-beta * d).exp();
                            (p * (u64::MAX as f64)) as u64
                        };
                    }
                }
            }
        }
        Self { delta, threshold }
    }
}

/// A Metropolis chain bound to one inverse temperature, carrying the current
/// configuration, its exact integer censuses, the step counter, and the
/// seedable stream RNG.
pub struct ChainState {
    lattice: TorusLattice,
    spins: Vec<u8>,
    /// Flat neighbor table, 4 entries per vertex.
    neighbors: Vec<u32>,
    /// Unordered pair counts 11,12,13,22,23,33.
    pair_counts: [i64; 6],
    spin_counts: [i64; 3],
    h2: f64,
    gammas: [f64; 4], // gamma1, gamma12, gamma13, gamma23
    beta: f64,
    step: u64,
    rng: ChaCha8Rng,
    table: AcceptTable,
}

impl ChainState {
    pub fn new(
        start: &Configuration,
        params: &CouplingParams,
        beta: f64,
        seed: u64,
        stream: u64,
    ) -> Result<Self> {
        if !(beta > 0.0) {
            return Err(PottsError::InvalidArgument(format!(
                "beta must be positive, got {beta}"
            )));
        }
        let lattice = *start.lattice();
        let census = crate::configuration::edge_census(start);
        let mut pair_counts = [0i64; 6];
        for a in 1u8..=3 {
            for b in a..=3 {
                pair_counts[pair_index(a, b)] = census.n_pair(a, b) as i64;
            }
        }
        let spin_counts = [
            census.count(1) as i64,
            census.count(2) as i64,
            census.count(3) as i64,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        let mut neighbors = Vec::with_capacity(4 * lattice.num_vertices());
        for v in 0..lattice.num_vertices() {
            for w in lattice.neighbors(v) {
                neighbors.push(w as u32);
            }
        }
        Ok(Self {
            lattice,
            spins: start.spins().to_vec(),
            neighbors,
            pair_counts,
            spin_counts,
            h2: crate::configuration::energy_monochromatic(&lattice, params, 2),
            gammas: [
                params.gamma1(),
                params.gamma12(),
                params.gamma13(),
                params.gamma23(),
            ],
            beta,
            step: 0,
            rng,
            table: AcceptTable::build(params, beta),
        })
    }

    #[inline]
    pub fn beta(&self) -> f64 {
        self.beta
    }

    #[inline]
    pub fn step_count(&self) -> u64 {
        self.step
    }

    /// Energy reconstructed exactly from the integer censuses.
    #[inline]
    pub fn energy(&self) -> f64 {
        self.h2 - self.gammas[0] * self.pair_counts[0] as f64
            + self.gammas[1] * self.pair_counts[1] as f64
            + self.gammas[2] * self.pair_counts[2] as f64
            + self.gammas[3] * self.pair_counts[4] as f64
    }

    #[inline]
    pub fn spin_count(&self, spin: u8) -> i64 {
        self.spin_counts[(spin - 1) as usize]
    }

    #[inline]
    pub fn is_monochromatic(&self) -> Option<u8> {
        let n = self.lattice.num_vertices() as i64;
        (1u8..=3).find(|&s| self.spin_counts[(s - 1) as usize] == n)
    }

    pub fn configuration(&self) -> Configuration {
        Configuration::from_spins(self.lattice, self.spins.clone()).unwrap()
    }

    /// One chain step: propose (v, s) uniformly over 3|V| pairs (self-spin
    /// proposals are no-ops), accept with probability exp(-beta [dH]+).
    /// Returns true when the configuration changed.
    #[inline]
    pub fn step(&mut self) -> bool {
        self.step += 1;
        let nv = self.lattice.num_vertices();
        let pick = self.rng.random_range(0..(3 * nv) as u64) as usize;
        let v = pick / 3;
        let s = (pick % 3) as u8 + 1;
        let old = self.spins[v];
        if s == old {
            return false;
        }
        // gather neighbor spin counts
        let nb: [u32; 4] = self.neighbors[4 * v..4 * v + 4].try_into().unwrap();
        let mut c = [0usize; 3];
        for &w in &nb {
            c[(self.spins[w as usize] - 1) as usize] += 1;
        }
        let ix = table_index(old, s, c[0], c[1]);
        let thr = self.table.threshold[ix];
        if thr != u64::MAX && self.rng.next_u64() >= thr {
            return false;
        }
        // accepted: update spins and exact censuses
        self.spins[v] = s;
        for &w in &nb {
            let b = self.spins[w as usize];
            self.pair_counts[pair_index(old, b)] -= 1;
            self.pair_counts[pair_index(s, b)] += 1;
        }
        self.spin_counts[(old - 1) as usize] -= 1;
        self.spin_counts[(s - 1) as usize] += 1;
        true
    }

    /// The proposal's energy difference for diagnostics/tests.
    pub fn proposal_delta(&self, v: usize, s: u8) -> f64 {
        let old = self.spins[v];
        if old == s {
            return 0.0;
        }
        let mut c = [0usize; 3];
        for w in self.lattice.neighbors(v) {
            c[(self.spins[w] - 1) as usize] += 1;
        }
        self.table.delta[table_index(old, s, c[0], c[1])]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configuration::energy;

    fn params() -> CouplingParams {
        CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, 9.2 / 22.0 - 0.2).unwrap()
    }

    #[test]
    fn census_energy_matches_full_recomputation() {
        let lat = TorusLattice::new(4, 5).unwrap();
        let p = params();
        let start = Configuration::monochromatic(lat, 2);
        let mut chain = ChainState::new(&start, &p, 1.0, 42, 0).unwrap();
        for i in 0..20_000 {
            chain.step();
            if i % 1000 == 0 {
                let c = chain.configuration();
                assert!((chain.energy() - energy(&c, &p)).abs() < 1e-9);
            }
        }
        let c = chain.configuration();
        assert!((chain.energy() - energy(&c, &p)).abs() < 1e-9);
    }

    #[test]
    fn identical_seed_and_stream_reproduce_trajectories() {
        let lat = TorusLattice::new(3, 4).unwrap();
        let p = params();
        let start = Configuration::monochromatic(lat, 2);
        let mut a = ChainState::new(&start, &p, 2.0, 7, 3).unwrap();
        let mut b = ChainState::new(&start, &p, 2.0, 7, 3).unwrap();
        for _ in 0..5000 {
            a.step();
            b.step();
            assert_eq!(a.spins, b.spins);
        }
        // different stream diverges
        let mut c = ChainState::new(&start, &p, 2.0, 7, 4).unwrap();
        let mut diverged = false;
        for _ in 0..5000 {
            c.step();
            diverged |= c.spins != a.spins;
        }
        assert!(diverged);
    }

    #[test]
    fn downhill_always_accepted_uphill_never_at_huge_beta() {
        let lat = TorusLattice::new(4, 4).unwrap();
        let p = params();
        let start = Configuration::monochromatic(lat, 2);
        let mut chain = ChainState::new(&start, &p, 500.0, 1, 0).unwrap();
        for _ in 0..100_000 {
            chain.step();
        }
        // at beta -> infinity nothing ever leaves the ground of the 2-well
        assert_eq!(chain.is_monochromatic(), Some(2));
    }

    #[test]
    fn acceptance_table_matches_closed_form() {
        // the uphill flip 2 -> 3 in the sea of 2 costs 4*gamma23
        let lat = TorusLattice::new(3, 3).unwrap();
        let p = params();
        let beta = 1.3;
        let delta = 4.0 * p.gamma23();
        let start = Configuration::monochromatic(lat, 2);
        let st = ChainState::new(&start, &p, beta, 1, 0).unwrap();
        let d = st.proposal_delta(0, 3);
        assert!((d - delta).abs() < 1e-12);
        let thr = st.table.threshold[table_index(2, 3, 0, 4)];
        let p_acc = thr as f64 / u64::MAX as f64;
        assert!((p_acc - (-beta * delta).exp()).abs() < 1e-9);
        // identity flips and downhill flips always pass
        assert_eq!(st.proposal_delta(0, 2), 0.0);
        assert_eq!(st.table.threshold[table_index(1, 2, 0, 4)], u64::MAX);
    }
}
