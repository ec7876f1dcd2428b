use serde::{Deserialize, Serialize};

use crate::configuration::Configuration;

/// A maximal 4-connected monochromatic component on the torus.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClusterInfo {
    pub spin: u8,
    /// Member vertices, sorted.
    pub cells: Vec<usize>,
    /// Anchor (top-left) of the circular bounding box as (row, col); rows and
    /// columns that wrap the torus entirely are anchored at 0.
    pub anchor: (usize, usize),
    /// Bounding-box height (rows) and width (columns).
    pub box_rows: usize,
    pub box_cols: usize,
    /// Cells exactly fill the bounding box.
    pub is_rectangle: bool,
    /// Box spans all K rows (vertical wrap) / all L columns (horizontal wrap).
    pub wraps_rows: bool,
    pub wraps_cols: bool,
    /// Outer boundary: vertices outside the cluster adjacent to it, sorted.
    pub boundary: Vec<usize>,
}

impl ClusterInfo {
    /// A strip wraps the torus in exactly one direction and is a rectangle.
    pub fn is_strip(&self) -> bool {
        self.is_rectangle && (self.wraps_rows ^ self.wraps_cols)
    }

    pub fn size(&self) -> usize {
        self.cells.len()
    }
}

/// Partition `{v : sigma(v) = r}` into maximal 4-connected torus components.
pub fn clusters(sigma: &Configuration, r: u8) -> Vec<ClusterInfo> {
    let lat = sigma.lattice();
    let n = lat.num_vertices();
    let mut seen = vec![false; n];
    let mut out = Vec::new();
    for start in 0..n {
        if seen[start] || sigma.get(start) != r {
            continue;
        }
        let mut cells = Vec::new();
        let mut stack = vec![start];
        seen[start] = true;
        while let Some(v) = stack.pop() {
            cells.push(v);
            for w in lat.neighbors(v) {
                if !seen[w] && sigma.get(w) == r {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        cells.sort_unstable();
        out.push(describe_cluster(sigma, r, cells));
    }
    out
}

fn circular_extent(present: &[bool]) -> (usize, usize, bool) {
    // returns (start, length, wraps_fully); `present` is indexed mod its length
    let m = present.len();
    let count = present.iter().filter(|&&p| p).count();
    if count == m {
        return (0, m, true);
    }
    // a 4-connected cluster projects to a circular arc: find the start
    let start = (0..m)
        .find(|&i| present[i] && !present[(i + m - 1) % m])
        .expect("nonempty arc has a start");
    let mut len = 0;
    while present[(start + len) % m] {
        len += 1;
    }
    (start, len, false)
}

fn describe_cluster(sigma: &Configuration, r: u8, cells: Vec<usize>) -> ClusterInfo {
    let lat = sigma.lattice();
    let k = lat.rows();
    let l = lat.cols();
    let mut row_present = vec![false; k];
    let mut col_present = vec![false; l];
    for &v in &cells {
        let (row, col) = lat.row_col(v);
        row_present[row] = true;
        col_present[col] = true;
    }
    let (row0, box_rows, wraps_rows) = circular_extent(&row_present);
    let (col0, box_cols, wraps_cols) = circular_extent(&col_present);

    // rectangle test: every box cell occupied
    let is_rectangle = if cells.len() == box_rows * box_cols {
        let set: std::collections::HashSet<usize> = cells.iter().copied().collect();
        (0..box_rows).all(|dr| {
            (0..box_cols).all(|dc| {
                let v = lat.vertex((row0 + dr) % k, (col0 + dc) % l);
                set.contains(&v)
            })
        })
    } else {
        false
    };

    let in_cluster: std::collections::HashSet<usize> = cells.iter().copied().collect();
    let mut boundary: Vec<usize> = cells
        .iter()
        .flat_map(|&v| lat.neighbors(v))
        .filter(|w| !in_cluster.contains(w))
        .collect();
    boundary.sort_unstable();
    boundary.dedup();

    ClusterInfo {
        spin: r,
        cells,
        anchor: (row0, col0),
        box_rows,
        box_cols,
        is_rectangle,
        wraps_rows,
        wraps_cols,
        boundary,
    }
}

/// Two clusters interact if some vertex outside both is adjacent to both.
pub fn clusters_interact(sigma: &Configuration, a: &ClusterInfo, b: &ClusterInfo) -> bool {
    let lat = sigma.lattice();
    let in_a: std::collections::HashSet<usize> = a.cells.iter().copied().collect();
    let in_b: std::collections::HashSet<usize> = b.cells.iter().copied().collect();
    for v in 0..lat.num_vertices() {
        if in_a.contains(&v) || in_b.contains(&v) {
            continue;
        }
        let mut touches_a = false;
        let mut touches_b = false;
        for w in lat.neighbors(v) {
            touches_a |= in_a.contains(&w);
            touches_b |= in_b.contains(&w);
        }
        if touches_a && touches_b {
            return true;
        }
    }
    false
}

/// Monochromatic rows and columns of spin `r`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BridgeReport {
    pub horizontal: Vec<usize>,
    pub vertical: Vec<usize>,
    pub has_cross: bool,
}

pub fn bridges(sigma: &Configuration, r: u8) -> BridgeReport {
    let lat = sigma.lattice();
    let horizontal: Vec<usize> = (0..lat.rows())
        .filter(|&row| (0..lat.cols()).all(|col| sigma.get(lat.vertex(row, col)) == r))
        .collect();
    let vertical: Vec<usize> = (0..lat.cols())
        .filter(|&col| (0..lat.rows()).all(|row| sigma.get(lat.vertex(row, col)) == r))
        .collect();
    let has_cross = !horizontal.is_empty() && !vertical.is_empty();
    BridgeReport {
        horizontal,
        vertical,
        has_cross,
    }
}
