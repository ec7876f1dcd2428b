use crate::configuration::{energy, Configuration};
use crate::coupling::CouplingParams;
use crate::error::{PottsError, Result};
use crate::lattice::TorusLattice;

/// Fully enumerated state space over `3^(K*L)` configurations.
///
/// States are packed base-3 (digit `spin - 1` of vertex `v` at place `3^v`);
/// energies are tabulated once at construction. Intended for desk-scale
/// lattices; construction refuses when the state count exceeds the budget.
pub struct EnumSpace {
    lattice: TorusLattice,
    params: CouplingParams,
    energies: Vec<f64>,
    pow3: Vec<u64>,
}

impl EnumSpace {
    pub const DEFAULT_MAX_STATES: u64 = 19_683; // 3^9

    pub fn new(lattice: TorusLattice, params: CouplingParams, max_states: u64) -> Result<Self> {
        let nv = lattice.num_vertices();
        let mut count: u64 = 1;
        for _ in 0..nv {
            count = count.checked_mul(3).ok_or_else(|| {
                PottsError::BudgetExhausted(format!("3^{nv} states overflow u64"))
            })?;
            if count > max_states {
                return Err(PottsError::BudgetExhausted(format!(
                    "full enumeration needs 3^{nv} = {} states, budget is {max_states}",
                    3f64.powi(nv as i32)
                )));
            }
        }
        let mut pow3 = vec![1u64; nv + 1];
        for v in 1..=nv {
            pow3[v] = pow3[v - 1] * 3;
        }
        let mut energies = Vec::with_capacity(count as usize);
        let mut spins = vec![1u8; nv];
        for id in 0..count {
            decode_into(id, nv, &mut spins);
            let c = Configuration::from_spins(lattice, spins.clone()).unwrap();
            energies.push(energy(&c, &params));
        }
        Ok(Self {
            lattice,
            params,
            energies,
            pow3,
        })
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.energies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.energies.is_empty()
    }

    #[inline]
    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    #[inline]
    pub fn params(&self) -> &CouplingParams {
        &self.params
    }

    #[inline]
    pub fn energy_of(&self, id: u64) -> f64 {
        self.energies[id as usize]
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Absolute tolerance for treating two tabulated energies as equal.
    pub fn energy_eps(&self) -> f64 {
        let scale = self
            .energies
            .iter()
            .fold(0.0f64, |m, &e| m.max(e.abs()))
            .max(1.0);
        1e-9 * scale
    }

    #[inline]
    pub fn num_vertices(&self) -> usize {
        self.lattice.num_vertices()
    }

    #[inline]
    pub fn spin_at(&self, id: u64, v: usize) -> u8 {
        ((id / self.pow3[v]) % 3) as u8 + 1
    }

    pub fn encode(&self, c: &Configuration) -> u64 {
        let mut id = 0u64;
        for v in (0..self.num_vertices()).rev() {
            id = id * 3 + (c.get(v) - 1) as u64;
        }
        id
    }

    pub fn decode(&self, id: u64) -> Configuration {
        let nv = self.num_vertices();
        let mut spins = vec![1u8; nv];
        decode_into(id, nv, &mut spins);
        Configuration::from_spins(self.lattice, spins).unwrap()
    }

    pub fn monochromatic_id(&self, spin: u8) -> u64 {
        let d = (spin - 1) as u64;
        // d * (3^nv - 1) / 2 = d * sum of 3^v
        (0..self.num_vertices()).map(|v| d * self.pow3[v]).sum()
    }

    /// Visit all single-flip neighbors of `id` as `(neighbor_id, vertex, new_spin)`.
    #[inline]
    pub fn for_each_neighbor<F: FnMut(u64, usize, u8)>(&self, id: u64, mut f: F) {
        for v in 0..self.num_vertices() {
            let d = (id / self.pow3[v]) % 3;
            for s in 0..3u64 {
                if s != d {
                    let nid =
                        (id as i64 + (s as i64 - d as i64) * self.pow3[v] as i64) as u64;
                    f(nid, v, s as u8 + 1);
                }
            }
        }
    }
}

fn decode_into(id: u64, nv: usize, spins: &mut [u8]) {
    let mut rest = id;
    for item in spins.iter_mut().take(nv) {
        *item = (rest % 3) as u8 + 1;
        rest /= 3;
    }
}
