//! Gate families of the metastable transitions: rectangles, rectangles with
//! protuberance bars, their strip variants, membership predicates, and
//! explicit reference paths.

mod refpath;

pub use refpath::{
    reference_path_2_to_3, reference_path_2_to_3_through, reference_path_m_to_1, sweep_path,
};

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::configuration::Configuration;
use crate::coupling::{derive_constants, CouplingParams};
use crate::error::{PottsError, Result};
use crate::landscape::clusters;
use crate::lattice::TorusLattice;

/// Shape of a single-cluster pattern: a plain `a x b` rectangle (`a` columns,
/// `b` rows), a rectangle with a bar of length `l` flush against one of its
/// vertical sides (length `b`), or against one of its horizontal sides
/// (length `a`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Shape {
    R { a: usize, b: usize },
    B { a: usize, b: usize, l: usize },
    HatB { a: usize, b: usize, l: usize },
}

impl Shape {
    pub fn cell_count(&self) -> usize {
        match *self {
            Shape::R { a, b } => a * b,
            Shape::B { a, b, l } | Shape::HatB { a, b, l } => a * b + l,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BarSide {
    Left,
    Right,
    Top,
    Bottom,
}

/// A concrete placement matching a configuration: the rectangle's top-left
/// anchor plus the bar placement when the shape carries one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RectDescriptor {
    pub shape: Shape,
    /// Sea spin and region spin.
    pub sea: u8,
    pub region: u8,
    /// (row, col) of the rectangle's top-left corner.
    pub anchor: (usize, usize),
    pub bar_side: Option<BarSide>,
    /// Offset of the bar's first cell along the side it is attached to.
    pub bar_offset: usize,
}

impl RectDescriptor {
    /// Materialize the region cells on the lattice.
    pub fn cells(&self, lat: &TorusLattice) -> Vec<usize> {
        let (r0, c0) = self.anchor;
        let (a, b, l) = match self.shape {
            Shape::R { a, b } => (a, b, 0),
            Shape::B { a, b, l } | Shape::HatB { a, b, l } => (a, b, l),
        };
        let mut cells = Vec::with_capacity(a * b + l);
        for dr in 0..b {
            for dc in 0..a {
                cells.push(lat.vertex((r0 + dr) % lat.rows(), (c0 + dc) % lat.cols()));
            }
        }
        if l > 0 {
            match self.bar_side.expect("bar shape carries a side") {
                BarSide::Left | BarSide::Right => {
                    let col = if self.bar_side == Some(BarSide::Left) {
                        (c0 + lat.cols() - 1) % lat.cols()
                    } else {
                        (c0 + a) % lat.cols()
                    };
                    for d in 0..l {
                        cells.push(lat.vertex((r0 + self.bar_offset + d) % lat.rows(), col));
                    }
                }
                BarSide::Top | BarSide::Bottom => {
                    let row = if self.bar_side == Some(BarSide::Top) {
                        (r0 + lat.rows() - 1) % lat.rows()
                    } else {
                        (r0 + b) % lat.rows()
                    };
                    for d in 0..l {
                        cells.push(lat.vertex(row, (c0 + self.bar_offset + d) % lat.cols()));
                    }
                }
            }
        }
        cells
    }

    /// Build the configuration: sea of `sea` with the region cells at `region`.
    pub fn materialize(&self, lat: &TorusLattice) -> Configuration {
        let mut c = Configuration::monochromatic(*lat, self.sea);
        for v in self.cells(lat) {
            c.set(v, self.region);
        }
        c
    }
}

/// The gate families of the metastable transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GateFamily {
    /// `W(m, 1)`: protocritical rectangle of 1s with a protuberance on a
    /// long side, in the sea of `m`.
    W1 { m: u8 },
    /// `W'(m, 1)`: protuberance on a short side.
    W1Prime { m: u8 },
    P { r: u8, s: u8 },
    Q { r: u8, s: u8 },
    H { r: u8, s: u8, i: usize },
    Wjh { r: u8, s: u8, j: usize, h: usize },
    /// The union `W(2,3)` of all minimal-gate families between 2 and 3.
    W23Union,
}

impl GateFamily {
    /// Parse compact CLI names: `W21`, `W31`, `Wp21`, `Wp31`, `P23`, `P32`,
    /// `Q23`, `Q32`, `Hi23:i`, `Hi32:i`, `Wjh23:j,h`, `23union`.
    pub fn parse(name: &str) -> Result<Self> {
        let err = || PottsError::InvalidArgument(format!("unknown gate family '{name}'"));
        if name == "23union" {
            return Ok(GateFamily::W23Union);
        }
        if let Some(rest) = name.strip_prefix("Wp") {
            return match rest {
                "21" => Ok(GateFamily::W1Prime { m: 2 }),
                "31" => Ok(GateFamily::W1Prime { m: 3 }),
                _ => Err(err()),
            };
        }
        if let Some(rest) = name.strip_prefix("Wjh") {
            let (spins, idx) = rest.split_once(':').ok_or_else(err)?;
            let (r, s) = parse_spin_pair(spins).ok_or_else(err)?;
            let (j, h) = idx.split_once(',').ok_or_else(err)?;
            let j = j.parse().map_err(|_| err())?;
            let h = h.parse().map_err(|_| err())?;
            return Ok(GateFamily::Wjh { r, s, j, h });
        }
        if let Some(rest) = name.strip_prefix("Hi") {
            let (spins, idx) = rest.split_once(':').ok_or_else(err)?;
            let (r, s) = parse_spin_pair(spins).ok_or_else(err)?;
            let i = idx.parse().map_err(|_| err())?;
            return Ok(GateFamily::H { r, s, i });
        }
        if let Some(rest) = name.strip_prefix('W') {
            return match rest {
                "21" => Ok(GateFamily::W1 { m: 2 }),
                "31" => Ok(GateFamily::W1 { m: 3 }),
                _ => Err(err()),
            };
        }
        if let Some(rest) = name.strip_prefix('P') {
            let (r, s) = parse_spin_pair(rest).ok_or_else(err)?;
            return Ok(GateFamily::P { r, s });
        }
        if let Some(rest) = name.strip_prefix('Q') {
            let (r, s) = parse_spin_pair(rest).ok_or_else(err)?;
            return Ok(GateFamily::Q { r, s });
        }
        Err(err())
    }
}

fn parse_spin_pair(s: &str) -> Option<(u8, u8)> {
    match s {
        "23" => Some((2, 3)),
        "32" => Some((3, 2)),
        _ => None,
    }
}

/// A template: one shape with its sea/region spins.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Template {
    pub shape: Shape,
    pub sea: u8,
    pub region: u8,
}

fn check_23(r: u8, s: u8) -> Result<()> {
    if (r == 2 && s == 3) || (r == 3 && s == 2) {
        Ok(())
    } else {
        Err(PottsError::InvalidArgument(format!(
            "family spins must be an ordered pair of {{2,3}}, got ({r},{s})"
        )))
    }
}

/// Expand a family into its shape templates for the given lattice.
pub(crate) fn family_templates(
    family: &GateFamily,
    lattice: &TorusLattice,
    params: &CouplingParams,
) -> Result<Vec<Template>> {
    let k = lattice.rows();
    let l = lattice.cols();
    let square = k == l;
    let mut out = Vec::new();
    match *family {
        GateFamily::W1 { m } | GateFamily::W1Prime { m } => {
            if m != 2 && m != 3 {
                return Err(PottsError::InvalidArgument(format!(
                    "W(m,1) requires m in {{2,3}}, got {m}"
                )));
            }
            let ell = derive_constants(params)?.ell_star as usize;
            if ell < 2 {
                return Err(PottsError::InvalidArgument(
                    "W(m,1) families need ell_star >= 2".to_string(),
                ));
            }
            if matches!(family, GateFamily::W1 { .. }) {
                // protuberance on a side of length ell_star (the long side)
                out.push(Template {
                    shape: Shape::B { a: ell - 1, b: ell, l: 1 },
                    sea: m,
                    region: 1,
                });
                out.push(Template {
                    shape: Shape::HatB { a: ell, b: ell - 1, l: 1 },
                    sea: m,
                    region: 1,
                });
            } else if ell == 2 {
                // the wrong-side protuberance on a length-1 side degenerates
                // to a straight 3 x 1 rectangle
                out.push(Template {
                    shape: Shape::R { a: 1, b: 3 },
                    sea: m,
                    region: 1,
                });
                out.push(Template {
                    shape: Shape::R { a: 3, b: 1 },
                    sea: m,
                    region: 1,
                });
            } else {
                // wrong side: protuberance on a side of length ell_star - 1
                out.push(Template {
                    shape: Shape::HatB { a: ell - 1, b: ell, l: 1 },
                    sea: m,
                    region: 1,
                });
                out.push(Template {
                    shape: Shape::B { a: ell, b: ell - 1, l: 1 },
                    sea: m,
                    region: 1,
                });
            }
        }
        GateFamily::P { r, s } => {
            check_23(r, s)?;
            out.push(Template {
                shape: Shape::B { a: 1, b: k, l: k - 1 },
                sea: r,
                region: s,
            });
            if square {
                out.push(Template {
                    shape: Shape::HatB { a: k, b: 1, l: k - 1 },
                    sea: r,
                    region: s,
                });
            }
        }
        GateFamily::Q { r, s } => {
            check_23(r, s)?;
            out.push(Template {
                shape: Shape::R { a: 2, b: k - 1 },
                sea: r,
                region: s,
            });
            out.push(Template {
                shape: Shape::B { a: 1, b: k, l: k - 2 },
                sea: r,
                region: s,
            });
            if square {
                out.push(Template {
                    shape: Shape::R { a: k - 1, b: 2 },
                    sea: r,
                    region: s,
                });
                out.push(Template {
                    shape: Shape::HatB { a: k, b: 1, l: k - 2 },
                    sea: r,
                    region: s,
                });
            }
        }
        GateFamily::H { r, s, i } => {
            check_23(r, s)?;
            if k < 4 || !(1..=k - 3).contains(&i) {
                return Err(PottsError::InvalidArgument(format!(
                    "H_i requires 1 <= i <= K-3, got i={i} with K={k}"
                )));
            }
            out.push(Template {
                shape: Shape::B { a: 1, b: k, l: i },
                sea: r,
                region: s,
            });
            for j in (i + 1)..=(k - 2) {
                out.push(Template {
                    shape: Shape::B { a: 1, b: k - 1, l: j },
                    sea: r,
                    region: s,
                });
            }
            if square {
                out.push(Template {
                    shape: Shape::HatB { a: k, b: 1, l: i },
                    sea: r,
                    region: s,
                });
                for j in (i + 1)..=(k - 2) {
                    out.push(Template {
                        shape: Shape::HatB { a: k - 1, b: 1, l: j },
                        sea: r,
                        region: s,
                    });
                }
            }
        }
        GateFamily::Wjh { r, s, j, h } => {
            check_23(r, s)?;
            if l < 5 || !(2..=l - 3).contains(&j) || !(1..=k - 1).contains(&h) {
                return Err(PottsError::InvalidArgument(format!(
                    "W_j^h requires 2 <= j <= L-3 and 1 <= h <= K-1, got j={j}, h={h}"
                )));
            }
            out.push(Template {
                shape: Shape::B { a: j, b: k, l: h },
                sea: r,
                region: s,
            });
            if square {
                out.push(Template {
                    shape: Shape::HatB { a: k, b: j, l: h },
                    sea: r,
                    region: s,
                });
            }
        }
        GateFamily::W23Union => {
            for (r, s) in [(2u8, 3u8), (3, 2)] {
                out.extend(family_templates(&GateFamily::P { r, s }, lattice, params)?);
                out.extend(family_templates(&GateFamily::Q { r, s }, lattice, params)?);
                for i in 1..=k.saturating_sub(3) {
                    out.extend(family_templates(&GateFamily::H { r, s, i }, lattice, params)?);
                }
            }
            for j in 2..=l.saturating_sub(3) {
                for h in 1..=(k - 1) {
                    out.extend(family_templates(
                        &GateFamily::Wjh { r: 2, s: 3, j, h },
                        lattice,
                        params,
                    )?);
                }
            }
        }
    }
    Ok(out)
}

/// Check whether the occupied slots `present` form a single circular run of
/// length `len` and return its start index.
fn circular_run(present: &[bool], len: usize) -> Option<usize> {
    let m = present.len();
    let count = present.iter().filter(|&&p| p).count();
    if count != len || len == 0 {
        return None;
    }
    if count == m {
        return Some(0);
    }
    let start = (0..m).find(|&i| present[i] && !present[(i + m - 1) % m])?;
    for d in 0..len {
        if !present[(start + d) % m] {
            return None;
        }
    }
    Some(start)
}

/// Match the spin-`s` region of a configuration (already a single cluster
/// with the given circular bounding box) against one template shape.
fn match_shape(
    lat: &TorusLattice,
    cells: &HashSet<usize>,
    cl_anchor: (usize, usize),
    cl_rows: usize,
    cl_cols: usize,
    t: &Template,
) -> Option<RectDescriptor> {
    let (k, l) = (lat.rows(), lat.cols());
    if cells.len() != t.shape.cell_count() {
        return None;
    }
    let occupied = |dr: usize, dc: usize| -> bool {
        cells.contains(&lat.vertex((cl_anchor.0 + dr) % k, (cl_anchor.1 + dc) % l))
    };
    match t.shape {
        Shape::R { a, b } => {
            if cl_rows == b
                && cl_cols == a
                && (0..b).all(|dr| (0..a).all(|dc| occupied(dr, dc)))
            {
                Some(RectDescriptor {
                    shape: t.shape,
                    sea: t.sea,
                    region: t.region,
                    anchor: cl_anchor,
                    bar_side: None,
                    bar_offset: 0,
                })
            } else {
                None
            }
        }
        Shape::B { a, b, l: bar } => {
            if cl_rows != b || cl_cols != a + 1 {
                return None;
            }
            for (side, rect_dc0, bar_dc) in
                [(BarSide::Right, 0usize, a), (BarSide::Left, 1usize, 0usize)]
            {
                let rect_full = (0..b).all(|dr| (0..a).all(|dc| occupied(dr, rect_dc0 + dc)));
                if !rect_full {
                    continue;
                }
                let present: Vec<bool> = (0..b).map(|dr| occupied(dr, bar_dc)).collect();
                let start = if b == k {
                    circular_run(&present, bar)
                } else {
                    circular_run(&present, bar).filter(|&st| st + bar <= b)
                };
                if let Some(st) = start {
                    return Some(RectDescriptor {
                        shape: t.shape,
                        sea: t.sea,
                        region: t.region,
                        anchor: (cl_anchor.0, (cl_anchor.1 + rect_dc0) % l),
                        bar_side: Some(side),
                        bar_offset: st,
                    });
                }
            }
            None
        }
        Shape::HatB { a, b, l: bar } => {
            if cl_rows != b + 1 || cl_cols != a {
                return None;
            }
            for (side, rect_dr0, bar_dr) in
                [(BarSide::Bottom, 0usize, b), (BarSide::Top, 1usize, 0usize)]
            {
                let rect_full = (0..b).all(|dr| (0..a).all(|dc| occupied(rect_dr0 + dr, dc)));
                if !rect_full {
                    continue;
                }
                let present: Vec<bool> = (0..a).map(|dc| occupied(bar_dr, dc)).collect();
                let start = if a == l {
                    circular_run(&present, bar)
                } else {
                    circular_run(&present, bar).filter(|&st| st + bar <= a)
                };
                if let Some(st) = start {
                    return Some(RectDescriptor {
                        shape: t.shape,
                        sea: t.sea,
                        region: t.region,
                        anchor: ((cl_anchor.0 + rect_dr0) % k, cl_anchor.1),
                        bar_side: Some(side),
                        bar_offset: st,
                    });
                }
            }
            None
        }
    }
}

/// Test membership of `sigma` in a gate family; on success return the
/// matching descriptor. Membership is translation-invariant on the torus.
pub fn gate_membership(
    sigma: &Configuration,
    family: &GateFamily,
    params: &CouplingParams,
) -> Result<Option<RectDescriptor>> {
    let lat = sigma.lattice();
    let templates = family_templates(family, lat, params)?;
    // group templates by (sea, region) so the cluster analysis runs once per pair
    let mut by_spins: Vec<((u8, u8), Vec<&Template>)> = Vec::new();
    for t in &templates {
        match by_spins.iter_mut().find(|(sp, _)| *sp == (t.sea, t.region)) {
            Some((_, v)) => v.push(t),
            None => by_spins.push(((t.sea, t.region), vec![t])),
        }
    }
    for ((sea, region), ts) in by_spins {
        let mut count_region = 0usize;
        let mut pure = true;
        for v in 0..lat.num_vertices() {
            let sp = sigma.get(v);
            if sp == region {
                count_region += 1;
            } else if sp != sea {
                pure = false;
                break;
            }
        }
        if !pure || count_region == 0 {
            continue;
        }
        let cls = clusters(sigma, region);
        if cls.len() != 1 {
            continue;
        }
        let cl = &cls[0];
        let cells: HashSet<usize> = cl.cells.iter().copied().collect();
        for t in ts {
            if let Some(d) = match_shape(lat, &cells, cl.anchor, cl.box_rows, cl.box_cols, t) {
                return Ok(Some(d));
            }
        }
    }
    Ok(None)
}

/// Enumerate every member of a family exactly once (deduplicated across
/// anchors, sides, and offsets). Returns the members and a truncation flag
/// when the budget was hit.
pub fn enumerate_family(
    family: &GateFamily,
    lattice: &TorusLattice,
    params: &CouplingParams,
    budget: usize,
) -> Result<(Vec<Configuration>, bool)> {
    let templates = family_templates(family, lattice, params)?;
    let (k, l) = (lattice.rows(), lattice.cols());
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut out = Vec::new();
    let mut truncated = false;
    'outer: for t in &templates {
        let (a, b, bar) = match t.shape {
            Shape::R { a, b } => (a, b, 0),
            Shape::B { a, b, l } | Shape::HatB { a, b, l } => (a, b, l),
        };
        let anchors_r = if b == k { 1 } else { k };
        let anchors_c = if a == l { 1 } else { l };
        let sides: Vec<Option<BarSide>> = match t.shape {
            Shape::R { .. } => vec![None],
            Shape::B { .. } => vec![Some(BarSide::Left), Some(BarSide::Right)],
            Shape::HatB { .. } => vec![Some(BarSide::Top), Some(BarSide::Bottom)],
        };
        for r0 in 0..anchors_r {
            for c0 in 0..anchors_c {
                for &side in &sides {
                    let offsets: Vec<usize> = match t.shape {
                        Shape::R { .. } => vec![0],
                        Shape::B { .. } => {
                            if b == k {
                                (0..k).collect()
                            } else {
                                (0..=(b - bar)).collect()
                            }
                        }
                        Shape::HatB { .. } => {
                            if a == l {
                                (0..l).collect()
                            } else {
                                (0..=(a - bar)).collect()
                            }
                        }
                    };
                    for off in offsets {
                        let d = RectDescriptor {
                            shape: t.shape,
                            sea: t.sea,
                            region: t.region,
                            anchor: (r0, c0),
                            bar_side: side,
                            bar_offset: off,
                        };
                        let c = d.materialize(lattice);
                        if seen.insert(c.spins().to_vec()) {
                            if out.len() >= budget {
                                truncated = true;
                                break 'outer;
                            }
                            out.push(c);
                        }
                    }
                }
            }
        }
    }
    Ok((out, truncated))
}
