use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::configuration::Configuration;
use crate::error::Result;
use crate::landscape::search::stability_level;
use crate::landscape::space::EnumSpace;

/// Local minima and stable plateaux of a fully enumerated space.
#[derive(Debug, Clone)]
pub struct MinimaReport {
    /// States whose every single flip strictly raises the energy.
    pub local_minima: Vec<Configuration>,
    /// Stable plateaux of size >= 2: maximal connected equal-energy sets
    /// whose entire boundary is strictly higher.
    pub plateaux: Vec<Vec<Configuration>>,
}

impl MinimaReport {
    /// Union of minima and plateau members.
    pub fn all_stable(&self) -> Vec<Configuration> {
        let mut out = self.local_minima.clone();
        for p in &self.plateaux {
            out.extend(p.iter().cloned());
        }
        out
    }
}

pub fn local_minima_and_plateaux(space: &EnumSpace) -> MinimaReport {
    let n = space.len();
    let eps = space.energy_eps();
    let mut visited = vec![false; n];
    let mut local_minima = Vec::new();
    let mut plateaux = Vec::new();
    for start in 0..n as u64 {
        if visited[start as usize] {
            continue;
        }
        // flood fill the equal-energy component of `start`
        let h = space.energy_of(start);
        let mut comp = Vec::new();
        let mut stable = true;
        let mut queue = VecDeque::from([start]);
        visited[start as usize] = true;
        while let Some(id) = queue.pop_front() {
            comp.push(id);
            space.for_each_neighbor(id, |nid, _, _| {
                let hn = space.energy_of(nid);
                if (hn - h).abs() <= eps {
                    if !visited[nid as usize] {
                        visited[nid as usize] = true;
                        queue.push_back(nid);
                    }
                } else if hn < h {
                    stable = false;
                }
            });
        }
        if stable {
            comp.sort_unstable();
            if comp.len() == 1 {
                local_minima.push(space.decode(comp[0]));
            } else {
                plateaux.push(comp.into_iter().map(|id| space.decode(id)).collect());
            }
        }
    }
    MinimaReport {
        local_minima,
        plateaux,
    }
}

/// Minimal saddles between two disjoint sets, with essential flags.
#[derive(Debug, Clone)]
pub struct SaddleReport {
    /// The communication height `Phi(A, B)`.
    pub phi: f64,
    pub saddles: Vec<Configuration>,
    /// Parallel to `saddles`.
    pub essential: Vec<bool>,
    /// True when the optimal-path family enumeration hit its budget; the
    /// essential flags are then based on the paths seen so far.
    pub truncated: bool,
}

/// Compute `S(A,B)` on a fully enumerated space: states that are argmax of H
/// along some optimal path, characterized via bottleneck values
/// `Phi(A, xi) <= Phi(A,B)`, `Phi(xi, B) <= Phi(A,B)` and `H(xi) = Phi(A,B)`.
///
/// Essential flags come from enumerating simple paths in the contracted graph
/// whose nodes are the connected components of the strict sublevel set plus
/// the individual level states; the family of argmax sets realizable by
/// optimal paths equals the family realized there, and a saddle is essential
/// iff it lies in some inclusion-minimal realizable set.
pub fn minimal_saddles(
    space: &EnumSpace,
    set_a: &[Configuration],
    set_b: &[Configuration],
    path_budget: usize,
) -> Result<SaddleReport> {
    assert!(!set_a.is_empty() && !set_b.is_empty(), "A, B must be nonempty");
    let ids_a: Vec<u64> = set_a.iter().map(|c| space.encode(c)).collect();
    let ids_b: Vec<u64> = set_b.iter().map(|c| space.encode(c)).collect();
    for a in &ids_a {
        assert!(!ids_b.contains(a), "A and B must be disjoint");
    }
    let eps = space.energy_eps();

    // multi-source bottleneck sweeps
    let keys_a = multi_minimax(space, &ids_a);
    let keys_b = multi_minimax(space, &ids_b);
    let phi = ids_b
        .iter()
        .map(|&b| keys_a[b as usize])
        .fold(f64::INFINITY, f64::min);

    let mut saddles: Vec<u64> = (0..space.len() as u64)
        .filter(|&id| {
            (space.energy_of(id) - phi).abs() <= eps
                && keys_a[id as usize] <= phi + eps
                && keys_b[id as usize] <= phi + eps
        })
        .collect();
    saddles.sort_unstable();

    let (family, truncated) = argmax_family(space, &ids_a, &ids_b, phi, eps, path_budget);
    // inclusion-minimal members of the family
    let minimal: Vec<&BTreeSet<u64>> = family
        .iter()
        .filter(|s| !family.iter().any(|t| t.len() < s.len() && t.is_subset(s)))
        .collect();
    let essential_ids: HashSet<u64> = minimal.iter().flat_map(|s| s.iter().copied()).collect();

    let essential: Vec<bool> = saddles.iter().map(|id| essential_ids.contains(id)).collect();
    Ok(SaddleReport {
        phi,
        saddles: saddles.into_iter().map(|id| space.decode(id)).collect(),
        essential,
        truncated,
    })
}

pub(crate) fn multi_minimax(space: &EnumSpace, sources: &[u64]) -> Vec<f64> {
    use super::search::TotalF64;
    use std::cmp::Reverse;
    use std::collections::BinaryHeap;
    let n = space.len();
    let mut keys = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(TotalF64, u64)>> = BinaryHeap::new();
    for &s in sources {
        let h = space.energy_of(s);
        if h < keys[s as usize] {
            keys[s as usize] = h;
            heap.push(Reverse((TotalF64(h), s)));
        }
    }
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
                heap.push(Reverse((TotalF64(nk), nid)));
            }
        });
    }
    keys
}

/// Node of the contracted graph: a strict-sublevel component or a level state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum CNode {
    Comp(u32),
    Level(u64),
}

/// Enumerate the family of argmax sets realizable by optimal paths A -> B.
fn argmax_family(
    space: &EnumSpace,
    ids_a: &[u64],
    ids_b: &[u64],
    phi: f64,
    eps: f64,
    path_budget: usize,
) -> (Vec<BTreeSet<u64>>, bool) {
    let n = space.len();
    // label strict-sublevel components
    let mut comp = vec![u32::MAX; n];
    let mut next_comp = 0u32;
    for start in 0..n as u64 {
        if comp[start as usize] != u32::MAX || space.energy_of(start) >= phi - eps {
            continue;
        }
        let mut queue = VecDeque::from([start]);
        comp[start as usize] = next_comp;
        while let Some(id) = queue.pop_front() {
            space.for_each_neighbor(id, |nid, _, _| {
                if comp[nid as usize] == u32::MAX && space.energy_of(nid) < phi - eps {
                    comp[nid as usize] = next_comp;
                    queue.push_back(nid);
                }
            });
        }
        next_comp += 1;
    }
    let is_level = |id: u64| (space.energy_of(id) - phi).abs() <= eps;

    let node_of = |id: u64| -> Option<CNode> {
        if space.energy_of(id) < phi - eps {
            Some(CNode::Comp(comp[id as usize]))
        } else if is_level(id) {
            Some(CNode::Level(id))
        } else {
            None
        }
    };

    // adjacency of the contracted graph
    let mut adj: HashMap<CNode, BTreeSet<CNode>> = HashMap::new();
    for id in 0..n as u64 {
        let Some(u) = node_of(id) else { continue };
        space.for_each_neighbor(id, |nid, _, _| {
            if let Some(v) = node_of(nid) {
                if u != v {
                    adj.entry(u).or_default().insert(v);
                    adj.entry(v).or_default().insert(u);
                }
            }
        });
    }

    let starts: BTreeSet<CNode> = ids_a.iter().filter_map(|&a| node_of(a)).collect();
    let targets: BTreeSet<CNode> = ids_b.iter().filter_map(|&b| node_of(b)).collect();

    // prune to nodes that can reach a target
    let mut reaches = HashSet::new();
    let mut queue: VecDeque<CNode> = targets.iter().copied().collect();
    reaches.extend(targets.iter().copied());
    while let Some(u) = queue.pop_front() {
        if let Some(ns) = adj.get(&u) {
            for &v in ns {
                if reaches.insert(v) {
                    queue.push_back(v);
                }
            }
        }
    }

    let mut family: BTreeSet<BTreeSet<u64>> = BTreeSet::new();
    let mut paths_seen = 0usize;
    let mut truncated = false;

    struct Dfs<'a> {
        adj: &'a HashMap<CNode, BTreeSet<CNode>>,
        targets: &'a BTreeSet<CNode>,
        reaches: &'a HashSet<CNode>,
        family: &'a mut BTreeSet<BTreeSet<u64>>,
        paths_seen: &'a mut usize,
        budget: usize,
        truncated: &'a mut bool,
    }

    impl Dfs<'_> {
        fn go(&mut self, u: CNode, visited: &mut BTreeSet<CNode>, levels: &mut Vec<u64>) {
            if *self.paths_seen >= self.budget {
                *self.truncated = true;
                return;
            }
            if self.targets.contains(&u) && !levels.is_empty() {
                *self.paths_seen += 1;
                self.family.insert(levels.iter().copied().collect());
                // a target component can also be passed through, keep going
            }
            let Some(ns) = self.adj.get(&u) else { return };
            for &v in ns {
                if visited.contains(&v) || !self.reaches.contains(&v) {
                    continue;
                }
                visited.insert(v);
                if let CNode::Level(id) = v {
                    levels.push(id);
                }
                self.go(v, visited, levels);
                if let CNode::Level(_) = v {
                    levels.pop();
                }
                visited.remove(&v);
            }
        }
    }

    for &s in &starts {
        let mut dfs = Dfs {
            adj: &adj,
            targets: &targets,
            reaches: &reaches,
            family: &mut family,
            paths_seen: &mut paths_seen,
            budget: path_budget,
            truncated: &mut truncated,
        };
        let mut visited = BTreeSet::from([s]);
        let mut levels = Vec::new();
        if let CNode::Level(id) = s {
            levels.push(id);
        }
        dfs.go(s, &mut visited, &mut levels);
    }

    (family.into_iter().collect(), truncated)
}

/// `max_{eta not in Xs} Gamma(eta, Xs)` where `Xs` is the set of global
/// minima: the exponential rate governing the spectral gap and mixing time.
/// Returns the maximum and the stable set.
pub fn max_gamma_to_stable(space: &EnumSpace) -> (f64, Vec<Configuration>) {
    let eps = space.energy_eps();
    let hmin = space
        .energies()
        .iter()
        .fold(f64::INFINITY, |m, &e| m.min(e));
    let stable: Vec<u64> = (0..space.len() as u64)
        .filter(|&id| (space.energy_of(id) - hmin).abs() <= eps)
        .collect();
    let keys = multi_minimax(space, &stable);
    let mut best = f64::NEG_INFINITY;
    for id in 0..space.len() as u64 {
        if (space.energy_of(id) - hmin).abs() <= eps {
            continue;
        }
        best = best.max(keys[id as usize] - space.energy_of(id));
    }
    (best, stable.into_iter().map(|id| space.decode(id)).collect())
}

/// Serializable landscape summary.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LandscapeReport {
    pub state_count: usize,
    pub local_minima: Vec<String>,
    pub plateaux: Vec<Vec<String>>,
    /// `Phi` for requested configuration pairs, keyed "sigma|sigma'".
    pub comm_height_table: BTreeMap<String, f64>,
    /// Stability level per requested state; absent value means +infinity.
    pub stability_levels: BTreeMap<String, Option<f64>>,
    pub saddle_set: Option<SaddleSection>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaddleSection {
    pub phi: f64,
    pub saddles: Vec<String>,
    pub essential: Vec<bool>,
    pub truncated: bool,
}

impl LandscapeReport {
    pub fn compute(
        space: &EnumSpace,
        pairs: &[(Configuration, Configuration)],
        stability_states: &[Configuration],
        saddle_query: Option<(&[Configuration], &[Configuration])>,
        path_budget: usize,
    ) -> Result<Self> {
        let minima = local_minima_and_plateaux(space);
        let mut comm_height_table = BTreeMap::new();
        for (a, b) in pairs {
            let ch = super::search::comm_height(space, a, b)?;
            comm_height_table.insert(format!("{}|{}", a.spin_string(), b.spin_string()), ch.phi);
        }
        let mut stability_levels = BTreeMap::new();
        for c in stability_states {
            let v = stability_level(space, c);
            stability_levels.insert(c.spin_string(), v.level);
        }
        let saddle_set = match saddle_query {
            Some((a, b)) => {
                let rep = minimal_saddles(space, a, b, path_budget)?;
                Some(SaddleSection {
                    phi: rep.phi,
                    saddles: rep.saddles.iter().map(|c| c.spin_string()).collect(),
                    essential: rep.essential,
                    truncated: rep.truncated,
                })
            }
            None => None,
        };
        Ok(Self {
            state_count: space.len(),
            local_minima: minima.local_minima.iter().map(|c| c.spin_string()).collect(),
            plateaux: minima
                .plateaux
                .iter()
                .map(|p| p.iter().map(|c| c.spin_string()).collect())
                .collect(),
            comm_height_table,
            stability_levels,
            saddle_set,
        })
    }
}
