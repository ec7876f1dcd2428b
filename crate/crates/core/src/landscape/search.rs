use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::configuration::{energy, Configuration};
use crate::coupling::CouplingParams;
use crate::error::Result;
use crate::landscape::path::LatticePath;
use crate::landscape::space::EnumSpace;
use crate::lattice::TorusLattice;

/// f64 wrapper ordered by `total_cmp`, for deterministic priority queues.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct TotalF64(pub f64);

impl Eq for TotalF64 {}
impl PartialOrd for TotalF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for TotalF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// Result of a communication-height query: the minimax value and a witness
/// path attaining it.
#[derive(Debug, Clone)]
pub struct CommHeight {
    pub phi: f64,
    pub witness: LatticePath,
}

/// Stability level `V_sigma`; `None` is the +infinity marker for an empty
/// `I_sigma` (global minima).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StabilityLevel {
    pub level: Option<f64>,
}

/// Outcome of an energy-capped search with a state budget.
#[derive(Debug, Clone)]
pub enum SearchOutcome {
    /// Target reached below the cap.
    Reached(CommHeight),
    /// The sublevel set was exhausted without reaching the target: the
    /// communication height is strictly above the cap.
    AboveCap { explored: usize },
    /// Budget ran out: undecided above the explored horizon.
    Undecided { explored: usize },
}

/// Best-first minimax sweep over the full enumerated space from `source`:
/// `keys[t] = Phi(source, t)` (bottleneck value including both endpoints),
/// with deterministic parents (ties broken by ascending state id).
pub(crate) fn minimax_from(space: &EnumSpace, source: u64) -> (Vec<f64>, Vec<u64>) {
    let n = space.len();
    let mut keys = vec![f64::INFINITY; n];
    let mut parents = vec![u64::MAX; n];
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(TotalF64, u64)>> = BinaryHeap::new();
    keys[source as usize] = space.energy_of(source);
    heap.push(Reverse((TotalF64(keys[source as usize]), source)));
    while let Some(Reverse((TotalF64(key), id))) = heap.pop() {
        let idx = id as usize;
        if done[idx] || key > keys[idx] {
            continue;
        }
        done[idx] = true;
        space.for_each_neighbor(id, |nid, _, _| {
            let nidx = nid as usize;
            if done[nidx] {
                return;
            }
            let nk = key.max(space.energy_of(nid));
            if nk < keys[nidx] {
                keys[nidx] = nk;
                parents[nidx] = id;
                heap.push(Reverse((TotalF64(nk), nid)));
            }
        });
    }
    (keys, parents)
}

fn witness_from_parents(
    space: &EnumSpace,
    parents: &[u64],
    source: u64,
    target: u64,
) -> Result<LatticePath> {
    let mut ids = vec![target];
    let mut cur = target;
    while cur != source {
        cur = parents[cur as usize];
        debug_assert_ne!(cur, u64::MAX, "broken parent chain");
        ids.push(cur);
    }
    ids.reverse();
    let steps: Vec<Configuration> = ids.iter().map(|&id| space.decode(id)).collect();
    LatticePath::new(steps, space.params())
}

/// Communication height `Phi(a, b)` by best-first minimax search on a fully
/// enumerated space, with a witness path attaining it.
pub fn comm_height(space: &EnumSpace, a: &Configuration, b: &Configuration) -> Result<CommHeight> {
    let ida = space.encode(a);
    let idb = space.encode(b);
    if ida == idb {
        let phi = space.energy_of(ida);
        return Ok(CommHeight {
            phi,
            witness: LatticePath::new(vec![a.clone()], space.params())?,
        });
    }
    let (keys, parents) = minimax_from(space, ida);
    let phi = keys[idb as usize];
    let witness = witness_from_parents(space, &parents, ida, idb)?;
    Ok(CommHeight { phi, witness })
}

/// Stability level `V_sigma = min_{H(eta) < H(sigma)} Phi(sigma, eta) - H(sigma)`
/// on a fully enumerated space. Strictness of `H(eta) < H(sigma)` uses the
/// space's energy-equality tolerance so that plateau partners (equal energy up
/// to rounding) are never counted as strictly lower.
pub fn stability_level(space: &EnumSpace, sigma: &Configuration) -> StabilityLevel {
    let id = space.encode(sigma);
    let h = space.energy_of(id);
    let eps = space.energy_eps();
    let (keys, _) = minimax_from(space, id);
    let mut best = f64::INFINITY;
    for t in 0..space.len() {
        if space.energy_of(t as u64) < h - eps {
            best = best.min(keys[t]);
        }
    }
    if best.is_finite() {
        StabilityLevel {
            level: Some(best - h),
        }
    } else {
        StabilityLevel { level: None }
    }
}

/// The initial cycle `C_r`: all states reachable from monochromatic `r`
/// through configurations of energy strictly below `cap`.
#[derive(Debug, Clone)]
pub struct CycleMembership {
    pub root: u8,
    pub cap: f64,
    pub members: Vec<Configuration>,
    /// False when a state budget truncated the expansion.
    pub complete: bool,
}

impl CycleMembership {
    pub fn contains(&self, c: &Configuration) -> bool {
        self.members.iter().any(|m| m == c)
    }
}

/// Initial cycle on a fully enumerated space (always complete).
pub fn initial_cycle(space: &EnumSpace, r: u8, cap: f64) -> CycleMembership {
    let root = space.monochromatic_id(r);
    let n = space.len();
    let mut seen = vec![false; n];
    let mut members = Vec::new();
    if space.energy_of(root) < cap {
        let mut queue = VecDeque::from([root]);
        seen[root as usize] = true;
        while let Some(id) = queue.pop_front() {
            members.push(id);
            space.for_each_neighbor(id, |nid, _, _| {
                if !seen[nid as usize] && space.energy_of(nid) < cap {
                    seen[nid as usize] = true;
                    queue.push_back(nid);
                }
            });
        }
    }
    members.sort_unstable();
    CycleMembership {
        root: r,
        cap,
        members: members.into_iter().map(|id| space.decode(id)).collect(),
        complete: true,
    }
}

/// Initial cycle by hashed energy-capped BFS on an arbitrary lattice; under
/// budget exhaustion the certified subset is returned with `complete: false`.
pub fn initial_cycle_capped(
    lattice: &TorusLattice,
    params: &CouplingParams,
    r: u8,
    cap: f64,
    max_states: usize,
) -> CycleMembership {
    let root = Configuration::monochromatic(*lattice, r);
    let mut members = Vec::new();
    let mut complete = true;
    if energy(&root, params) < cap {
        let mut seen: std::collections::HashSet<Configuration> = std::collections::HashSet::new();
        seen.insert(root.clone());
        let mut queue = VecDeque::from([root]);
        while let Some(c) = queue.pop_front() {
            members.push(c.clone());
            for v in 0..lattice.num_vertices() {
                let old = c.get(v);
                for s in [1u8, 2, 3] {
                    if s == old {
                        continue;
                    }
                    let next = c.flipped(v, s);
                    if !seen.contains(&next) && energy(&next, params) < cap {
                        if seen.len() >= max_states {
                            complete = false;
                        } else {
                            seen.insert(next.clone());
                            queue.push_back(next);
                        }
                    }
                }
            }
        }
    }
    members.sort_by_key(|c| c.spin_string());
    CycleMembership {
        root: r,
        cap,
        members,
        complete,
    }
}

/// Energy-capped best-first minimax search from `a` toward `b` on an
/// arbitrary lattice with hashed states. States are only expanded while the
/// running bottleneck key stays at or below `cap`.
pub fn comm_height_capped(
    params: &CouplingParams,
    a: &Configuration,
    b: &Configuration,
    cap: f64,
    max_states: usize,
) -> Result<SearchOutcome> {
    let lattice = *a.lattice();
    if a == b {
        let h = energy(a, params);
        return Ok(if h <= cap {
            SearchOutcome::Reached(CommHeight {
                phi: h,
                witness: LatticePath::new(vec![a.clone()], params)?,
            })
        } else {
            SearchOutcome::AboveCap { explored: 0 }
        });
    }
    let mut keys: HashMap<Configuration, f64> = HashMap::new();
    let mut parents: HashMap<Configuration, Configuration> = HashMap::new();
    let mut heap: BinaryHeap<Reverse<(TotalF64, String)>> = BinaryHeap::new();
    let ha = energy(a, params);
    if ha > cap {
        return Ok(SearchOutcome::AboveCap { explored: 0 });
    }
    keys.insert(a.clone(), ha);
    heap.push(Reverse((TotalF64(ha), a.spin_string())));
    let mut explored = 0usize;
    while let Some(Reverse((TotalF64(key), packed))) = heap.pop() {
        let cur = Configuration::from_spin_string(lattice, &packed)?;
        if keys.get(&cur).map(|&k| key > k).unwrap_or(true) {
            continue;
        }
        explored += 1;
        if &cur == b {
            let mut steps = vec![cur.clone()];
            let mut walk = cur.clone();
            while let Some(p) = parents.get(&walk) {
                steps.push(p.clone());
                walk = p.clone();
            }
            steps.reverse();
            return Ok(SearchOutcome::Reached(CommHeight {
                phi: key,
                witness: LatticePath::new(steps, params)?,
            }));
        }
        if explored >= max_states {
            return Ok(SearchOutcome::Undecided { explored });
        }
        for v in 0..lattice.num_vertices() {
            let old = cur.get(v);
            for s in [1u8, 2, 3] {
                if s == old {
                    continue;
                }
                let next = cur.flipped(v, s);
                let nk = key.max(energy(&next, params));
                if nk > cap {
                    continue;
                }
                let better = keys.get(&next).map(|&k| nk < k).unwrap_or(true);
                if better {
                    keys.insert(next.clone(), nk);
                    parents.insert(next.clone(), cur.clone());
                    heap.push(Reverse((TotalF64(nk), next.spin_string())));
                }
            }
        }
    }
    Ok(SearchOutcome::AboveCap { explored })
}
