//! Shared test oracles, purposely independent of the library's search
//! implementations: all-pairs minimax by Floyd-Warshall dynamic programming,
//! communication heights by union-find percolation, saddle sets by bounded
//! path search on the sublevel graph, and naive stepping for mixing times.

#![allow(dead_code)]

use potts_core::configuration::Configuration;
use potts_core::coupling::CouplingParams;
use potts_core::landscape::EnumSpace;
use potts_core::lattice::TorusLattice;

/// Assumption-satisfying theorem-scale parameters: gamma1 = 1, gamma12 = 1.4,
/// gamma23 = 9.2/22 (exact rationals J11=6/5, J22=J33=1/5, J12=J13=6/5,
/// J23=12/55), K = L = 10.
pub fn theorem_params() -> (TorusLattice, CouplingParams) {
    let lat = TorusLattice::new(10, 10).unwrap();
    let p = CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, 9.2 / 22.0 - 0.2).unwrap();
    (lat, p)
}

/// Generic (assumption-free) couplings used for oracle-equivalence checks.
pub fn generic_params() -> CouplingParams {
    CouplingParams::new(0.83, 0.31, 0.31, 0.46, 0.46, 0.29).unwrap()
}

/// Generic couplings for the spectral slope checks on 2x3.
pub fn spectral_params() -> CouplingParams {
    CouplingParams::new(0.45, 0.10, 0.10, 0.25, 0.25, 0.05).unwrap()
}

/// All-pairs bottleneck table by Floyd-Warshall dynamic programming:
/// `d[i][j] = min over paths of max H (including endpoints)`.
pub fn fw_minimax_table(space: &EnumSpace) -> Vec<f64> {
    let n = space.len();
    let mut d = vec![f64::INFINITY; n * n];
    for i in 0..n as u64 {
        d[(i * n as u64 + i) as usize] = space.energy_of(i);
        let hi = space.energy_of(i);
        space.for_each_neighbor(i, |j, _, _| {
            let v = hi.max(space.energy_of(j));
            let ix = (i * n as u64 + j) as usize;
            if v < d[ix] {
                d[ix] = v;
            }
        });
    }
    for k in 0..n {
        for i in 0..n {
            let dik = d[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let via = dik.max(d[k * n + j]);
                if via < d[i * n + j] {
                    d[i * n + j] = via;
                }
            }
        }
    }
    d
}

/// Communication height by union-find percolation: activate states in
/// increasing energy order, union single-flip edges among active states; the
/// height of `(a, b)` is the activation level at which they join.
pub fn union_find_phi(space: &EnumSpace, pairs: &[(u64, u64)]) -> Vec<f64> {
    let n = space.len();
    let mut order: Vec<u32> = (0..n as u32).collect();
    order.sort_by(|&a, &b| {
        space
            .energy_of(a as u64)
            .total_cmp(&space.energy_of(b as u64))
            .then(a.cmp(&b))
    });
    let mut parent: Vec<u32> = (0..n as u32).collect();
    fn find(parent: &mut Vec<u32>, mut x: u32) -> u32 {
        while parent[x as usize] != x {
            parent[x as usize] = parent[parent[x as usize] as usize];
            x = parent[x as usize];
        }
        x
    }
    let mut active = vec![false; n];
    let mut answers = vec![f64::INFINITY; pairs.len()];
    let mut remaining: Vec<usize> = (0..pairs.len()).collect();
    for &s in &order {
        let level = space.energy_of(s as u64);
        active[s as usize] = true;
        space.for_each_neighbor(s as u64, |t, _, _| {
            if active[t as usize] {
                let rs = find(&mut parent, s);
                let rt = find(&mut parent, t as u32);
                if rs != rt {
                    parent[rs as usize] = rt;
                }
            }
        });
        remaining.retain(|&qi| {
            let (a, b) = pairs[qi];
            if active[a as usize]
                && active[b as usize]
                && find(&mut parent, a as u32) == find(&mut parent, b as u32)
            {
                answers[qi] = level;
                false
            } else {
                true
            }
        });
        if remaining.is_empty() {
            break;
        }
    }
    answers
}

/// Saddle-set oracle: a level state `xi` belongs to `S(A,B)` iff bounded
/// breadth-first path search on the closed sublevel graph reaches `xi` from A
/// and B. Independent of the library's bottleneck sweeps.
pub fn saddle_oracle(
    space: &EnumSpace,
    set_a: &[u64],
    set_b: &[u64],
    phi: f64,
    eps: f64,
    max_depth: usize,
) -> Vec<u64> {
    let n = space.len();
    let sub = |id: u64| space.energy_of(id) <= phi + eps;
    let bfs = |sources: &[u64]| -> Vec<bool> {
        let mut seen = vec![false; n];
        let mut frontier: Vec<u64> = sources
            .iter()
            .copied()
            .filter(|&s| sub(s))
            .collect();
        for &s in &frontier {
            seen[s as usize] = true;
        }
        let mut depth = 0;
        while !frontier.is_empty() && depth < max_depth {
            let mut next = Vec::new();
            for &s in &frontier {
                space.for_each_neighbor(s, |t, _, _| {
                    if !seen[t as usize] && sub(t) {
                        seen[t as usize] = true;
                        next.push(t);
                    }
                });
            }
            frontier = next;
            depth += 1;
        }
        seen
    };
    let from_a = bfs(set_a);
    let from_b = bfs(set_b);
    (0..n as u64)
        .filter(|&id| {
            (space.energy_of(id) - phi).abs() <= eps
                && from_a[id as usize]
                && from_b[id as usize]
        })
        .collect()
}

/// Exhaustive simple-path enumeration oracle for small saddle problems:
/// walks the sublevel graph with cycle-free prefixes up to a length bound,
/// collecting argmax states of complete optimal paths.
pub fn saddle_path_enum_oracle(
    space: &EnumSpace,
    a: u64,
    b: u64,
    phi: f64,
    eps: f64,
    max_len: usize,
) -> Vec<u64> {
    use std::collections::HashSet;
    let mut result: HashSet<u64> = HashSet::new();
    let mut on_path = vec![false; space.len()];
    let mut stack_states: Vec<u64> = Vec::new();
    fn dfs(
        space: &EnumSpace,
        cur: u64,
        b: u64,
        phi: f64,
        eps: f64,
        max_len: usize,
        on_path: &mut Vec<bool>,
        stack_states: &mut Vec<u64>,
        result: &mut HashSet<u64>,
    ) {
        if cur == b {
            for &s in stack_states.iter() {
                if (space.energy_of(s) - phi).abs() <= eps {
                    result.insert(s);
                }
            }
            return;
        }
        if stack_states.len() >= max_len {
            return;
        }
        let mut nexts = Vec::new();
        space.for_each_neighbor(cur, |t, _, _| {
            if !on_path[t as usize] && space.energy_of(t) <= phi + eps {
                nexts.push(t);
            }
        });
        for t in nexts {
            on_path[t as usize] = true;
            stack_states.push(t);
            dfs(space, t, b, phi, eps, max_len, on_path, stack_states, result);
            stack_states.pop();
            on_path[t as usize] = false;
        }
    }
    on_path[a as usize] = true;
    stack_states.push(a);
    dfs(
        space,
        a,
        b,
        phi,
        eps,
        max_len,
        &mut on_path,
        &mut stack_states,
        &mut result,
    );
    result.into_iter().collect()
}

/// Direct local-minimum test: every single flip strictly raises the energy.
pub fn local_minima_oracle(space: &EnumSpace) -> Vec<u64> {
    let eps = space.energy_eps();
    (0..space.len() as u64)
        .filter(|&id| {
            let h = space.energy_of(id);
            let mut minimal = true;
            space.for_each_neighbor(id, |t, _, _| {
                if space.energy_of(t) <= h + eps {
                    minimal = false;
                }
            });
            minimal
        })
        .collect()
}

pub fn mono_config(space: &EnumSpace, spin: u8) -> Configuration {
    Configuration::monochromatic(*space.lattice(), spin)
}
