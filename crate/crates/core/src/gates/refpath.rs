use crate::configuration::Configuration;
use crate::coupling::CouplingParams;
use crate::error::{PottsError, Result};
use crate::gates::{gate_membership, BarSide, GateFamily, RectDescriptor, Shape};
use crate::landscape::LatticePath;
use crate::lattice::TorusLattice;

fn flips_to_path(
    start: Configuration,
    flips: &[(usize, u8)],
    params: &CouplingParams,
) -> Result<LatticePath> {
    let mut steps = Vec::with_capacity(flips.len() + 1);
    steps.push(start);
    for &(v, s) in flips {
        let next = steps.last().unwrap().flipped(v, s);
        steps.push(next);
    }
    LatticePath::new(steps, params)
}

/// Column sweep from monochromatic 2 to monochromatic 3: every column is
/// updated in full before moving to an adjacent one; within a column the
/// updates run downward (cyclically) from the given start row.
pub fn sweep_path(
    lattice: &TorusLattice,
    params: &CouplingParams,
    column_order: &[usize],
    within_starts: &[usize],
) -> Result<LatticePath> {
    let (k, l) = (lattice.rows(), lattice.cols());
    if column_order.len() != l {
        return Err(PottsError::InvalidArgument(format!(
            "column order must list all {l} columns, got {}",
            column_order.len()
        )));
    }
    if within_starts.len() != l {
        return Err(PottsError::InvalidArgument(
            "within-column starts must match the column count".to_string(),
        ));
    }
    let mut seen = vec![false; l];
    for (i, &c) in column_order.iter().enumerate() {
        if c >= l || seen[c] {
            return Err(PottsError::InvalidArgument(format!(
                "column order entry {i} invalid or repeated: {c}"
            )));
        }
        seen[c] = true;
        if i > 0 {
            let prev = column_order[i - 1];
            let diff = (c + l - prev) % l;
            if diff != 1 && diff != l - 1 {
                return Err(PottsError::InvalidArgument(format!(
                    "consecutive columns {prev} and {c} are not adjacent on the torus"
                )));
            }
        }
    }
    let mut flips = Vec::with_capacity(k * l);
    for (i, &c) in column_order.iter().enumerate() {
        let start = within_starts[i] % k;
        for d in 0..k {
            flips.push((lattice.vertex((start + d) % k, c), 3u8));
        }
    }
    flips_to_path(Configuration::monochromatic(*lattice, 2), &flips, params)
}

/// Reference path between 2 and 3 (column sweep). `column_order` defaults to
/// `0..L`; `within_starts` (start row per column, consecutive downward
/// updates) defaults to row 0 everywhere.
pub fn reference_path_2_to_3(
    lattice: &TorusLattice,
    params: &CouplingParams,
    column_order: Option<&[usize]>,
    within_starts: Option<&[usize]>,
) -> Result<LatticePath> {
    let l = lattice.cols();
    let default_cols: Vec<usize> = (0..l).collect();
    let default_starts = vec![0usize; l];
    sweep_path(
        lattice,
        params,
        column_order.unwrap_or(&default_cols),
        within_starts.unwrap_or(&default_starts),
    )
}

/// Reference path from monochromatic `m` to monochromatic 1 through a given
/// member of `W(m,1)`: quasi-square growth of the protocritical rectangle,
/// the protuberance (the unique argmax), completion of the protuberance's
/// line, then quasi-square growth to the full lattice.
pub fn reference_path_m_to_1(
    anchor: &Configuration,
    params: &CouplingParams,
) -> Result<LatticePath> {
    let lat = anchor.lattice();
    let (k, l) = (lat.rows(), lat.cols());
    let mut found: Option<(u8, RectDescriptor)> = None;
    for m in [2u8, 3] {
        if let Some(d) = gate_membership(anchor, &GateFamily::W1 { m }, params)? {
            found = Some((m, d));
            break;
        }
    }
    let (m, d) = found.ok_or_else(|| {
        PottsError::InvalidArgument("anchor configuration is not a member of W(m,1)".to_string())
    })?;
    let (a, b) = match d.shape {
        Shape::B { a, b, .. } | Shape::HatB { a, b, .. } => (a, b),
        Shape::R { .. } => unreachable!("W(m,1) members carry a bar"),
    };
    let (r0, c0) = d.anchor;

    let mut flips: Vec<(usize, u8)> = Vec::with_capacity(k * l);
    // phase 1: quasi-square fill of the a x b rectangle
    let cell = |dr: usize, dc: usize| lat.vertex((r0 + dr) % k, (c0 + dc) % l);
    flips.push((cell(0, 0), 1));
    let (mut h, mut w) = (1usize, 1usize);
    while h < b || w < a {
        if h < b && (h <= w || w == a) {
            for dc in 0..w {
                flips.push((cell(h, dc), 1));
            }
            h += 1;
        } else {
            for dr in 0..h {
                flips.push((cell(dr, w), 1));
            }
            w += 1;
        }
    }
    // phase 2: the protuberance
    let side = d.bar_side.expect("W(m,1) descriptor has a bar");
    let (bar_row, bar_col, vertical) = match side {
        BarSide::Left => ((r0 + d.bar_offset) % k, (c0 + l - 1) % l, true),
        BarSide::Right => ((r0 + d.bar_offset) % k, (c0 + a) % l, true),
        BarSide::Top => ((r0 + k - 1) % k, (c0 + d.bar_offset) % l, false),
        BarSide::Bottom => ((r0 + b) % k, (c0 + d.bar_offset) % l, false),
    };
    flips.push((lat.vertex(bar_row, bar_col), 1));
    // phase 3: complete the protuberance's line within the rectangle's span
    if vertical {
        let off = d.bar_offset;
        for doff in (off + 1)..b {
            flips.push((lat.vertex((r0 + doff) % k, bar_col), 1));
        }
        for doff in (0..off).rev() {
            flips.push((lat.vertex((r0 + doff) % k, bar_col), 1));
        }
    } else {
        let off = d.bar_offset;
        for doff in (off + 1)..a {
            flips.push((lat.vertex(bar_row, (c0 + doff) % l), 1));
        }
        for doff in (0..off).rev() {
            flips.push((lat.vertex(bar_row, (c0 + doff) % l), 1));
        }
    }
    // phase 4: grow the ell x ell square to the full lattice
    let (ar0, ac0, mut rh, mut rw) = match side {
        BarSide::Left => (r0, (c0 + l - 1) % l, b, a + 1),
        BarSide::Right => (r0, c0, b, a + 1),
        BarSide::Top => ((r0 + k - 1) % k, c0, b + 1, a),
        BarSide::Bottom => (r0, c0, b + 1, a),
    };
    while rh < k || rw < l {
        if rh < k && (rh <= rw || rw == l) {
            for dc in 0..rw {
                flips.push((lat.vertex((ar0 + rh) % k, (ac0 + dc) % l), 1));
            }
            rh += 1;
        } else {
            for dr in 0..rh {
                flips.push((lat.vertex((ar0 + dr) % k, (ac0 + rw) % l), 1));
            }
            rw += 1;
        }
    }
    flips_to_path(Configuration::monochromatic(*lat, m), &flips, params)
}

fn swap23_config(c: &Configuration) -> Configuration {
    let spins = c
        .spins()
        .iter()
        .map(|&s| match s {
            2 => 3,
            3 => 2,
            other => other,
        })
        .collect();
    Configuration::from_spins(*c.lattice(), spins).unwrap()
}

fn transpose_config(c: &Configuration) -> Configuration {
    let lat = c.lattice();
    assert_eq!(lat.rows(), lat.cols(), "transpose needs a square lattice");
    let n = lat.rows();
    let mut spins = vec![1u8; n * n];
    for i in 0..n {
        for j in 0..n {
            spins[j * n + i] = c.get(i * n + j);
        }
    }
    Configuration::from_spins(*c.lattice(), spins).unwrap()
}

fn reflect_cols_config(c: &Configuration) -> Configuration {
    let lat = c.lattice();
    let (k, l) = (lat.rows(), lat.cols());
    let mut spins = vec![1u8; k * l];
    for i in 0..k {
        for j in 0..l {
            spins[i * l + (l - 1 - j)] = c.get(i * l + j);
        }
    }
    Configuration::from_spins(*c.lattice(), spins).unwrap()
}

fn map_path(
    p: &LatticePath,
    params: &CouplingParams,
    f: impl Fn(&Configuration) -> Configuration,
    reverse: bool,
) -> Result<LatticePath> {
    let mut steps: Vec<Configuration> = p.steps().iter().map(f).collect();
    if reverse {
        steps.reverse();
    }
    LatticePath::new(steps, params)
}

fn swap_family(f: &GateFamily) -> GateFamily {
    let sw = |x: u8| if x == 2 { 3 } else { 2 };
    match *f {
        GateFamily::P { r, s } => GateFamily::P { r: sw(r), s: sw(s) },
        GateFamily::Q { r, s } => GateFamily::Q { r: sw(r), s: sw(s) },
        GateFamily::H { r, s, i } => GateFamily::H { r: sw(r), s: sw(s), i },
        GateFamily::Wjh { r, s, j, h } => GateFamily::Wjh { r: sw(r), s: sw(s), j, h },
        other => other,
    }
}

/// Build a reference path from 2 to 3 that passes through the designated
/// member `sigma` of the given family and meets that family only at `sigma`.
pub fn reference_path_2_to_3_through(
    sigma: &Configuration,
    family: &GateFamily,
    params: &CouplingParams,
) -> Result<LatticePath> {
    if matches!(family, GateFamily::W1 { .. } | GateFamily::W1Prime { .. }) {
        return Err(PottsError::InvalidArgument(
            "W(m,1) families gate the transition to 1, not between 2 and 3".to_string(),
        ));
    }
    if matches!(family, GateFamily::W23Union) {
        // steer via the constituent family the configuration belongs to
        let lat = sigma.lattice();
        let (k, l) = (lat.rows(), lat.cols());
        let mut candidates: Vec<GateFamily> = Vec::new();
        for (r, s) in [(2u8, 3u8), (3, 2)] {
            candidates.push(GateFamily::P { r, s });
            candidates.push(GateFamily::Q { r, s });
            for i in 1..=k.saturating_sub(3) {
                candidates.push(GateFamily::H { r, s, i });
            }
        }
        for j in 2..=l.saturating_sub(3) {
            for h in 1..=(k - 1) {
                candidates.push(GateFamily::Wjh { r: 2, s: 3, j, h });
            }
        }
        for f in candidates {
            if gate_membership(sigma, &f, params)?.is_some() {
                return reference_path_2_to_3_through(sigma, &f, params);
            }
        }
        return Err(PottsError::InvalidArgument(
            "configuration is not a member of the W(2,3) union".to_string(),
        ));
    }

    let d = gate_membership(sigma, family, params)?.ok_or_else(|| {
        PottsError::InvalidArgument("configuration is not a member of the family".to_string())
    })?;

    // normalize sea spin to 2 via the 2<->3 swap plus time reversal
    if d.sea == 3 {
        let swapped = swap23_config(sigma);
        let p = reference_path_2_to_3_through(&swapped, &swap_family(family), params)?;
        return map_path(&p, params, swap23_config, true);
    }
    // normalize row variants (square lattices) via transposition
    let transposed = match d.shape {
        Shape::HatB { .. } => true,
        Shape::R { a, b } => a > b,
        Shape::B { .. } => false,
    };
    if transposed {
        let t = transpose_config(sigma);
        let p = reference_path_2_to_3_through(&t, family, params)?;
        return map_path(&p, params, transpose_config, false);
    }
    // normalize left bars via column reflection
    if d.bar_side == Some(BarSide::Left) {
        let r = reflect_cols_config(sigma);
        let p = reference_path_2_to_3_through(&r, family, params)?;
        return map_path(&p, params, reflect_cols_config, false);
    }

    let lat = sigma.lattice();
    let (k, l) = (lat.rows(), lat.cols());
    let (r0, c0) = d.anchor;
    match d.shape {
        // strip of j full columns plus a bar: the plain aligned sweep
        Shape::B { a: _, b, l: _ } if b == k => {
            let br = d.bar_offset % k;
            let cols: Vec<usize> = (0..l).map(|i| (c0 + i) % l).collect();
            let starts = vec![br; l];
            sweep_path(lat, params, &cols, &starts)
        }
        // K-1 column plus a bar (an H-family member): build the column with
        // one cell missing, attach the bar, close the gap to reach sigma,
        // then complete the strip and sweep on
        Shape::B { a: 1, b, l: j } if b == k - 1 => {
            let bar_col = (c0 + 1) % l;
            let br = (r0 + d.bar_offset) % k;
            // rect rows r0..r0+k-2; filler row must avoid the bar's span
            let bar_end = d.bar_offset + j - 1;
            let rx_off = if bar_end < b - 1 { b - 1 } else { d.bar_offset - 1 };
            let rx = (r0 + rx_off) % k;
            let mut flips: Vec<(usize, u8)> = Vec::new();
            for doff in 0..b {
                if doff != rx_off {
                    flips.push((lat.vertex((r0 + doff) % k, c0), 3));
                }
            }
            for dbar in 0..j {
                flips.push((lat.vertex((br + dbar) % k, bar_col), 3));
            }
            flips.push((lat.vertex(rx, c0), 3)); // sigma reached here
            flips.push((lat.vertex((r0 + b) % k, c0), 3)); // complete the column
            for dbar in j..k {
                flips.push((lat.vertex((br + dbar) % k, bar_col), 3));
            }
            for i in 2..l {
                let col = (c0 + i) % l;
                for dr in 0..k {
                    flips.push((lat.vertex((br + dr) % k, col), 3));
                }
            }
            flips_to_path(Configuration::monochromatic(*lat, 2), &flips, params)
        }
        // the 2 x (K-1) rectangle of the Q family: twin columns built in
        // lockstep, closed through the flat P-shaped step, then the sweep
        Shape::R { a: 2, b } if b == k - 1 => {
            let mut flips: Vec<(usize, u8)> = Vec::new();
            for doff in 0..b {
                flips.push((lat.vertex((r0 + doff) % k, c0), 3));
            }
            for doff in 0..b {
                flips.push((lat.vertex((r0 + doff) % k, (c0 + 1) % l), 3));
            }
            // sigma reached; close both columns
            flips.push((lat.vertex((r0 + b) % k, c0), 3));
            flips.push((lat.vertex((r0 + b) % k, (c0 + 1) % l), 3));
            for i in 2..l {
                let col = (c0 + i) % l;
                for dr in 0..k {
                    flips.push((lat.vertex((r0 + dr) % k, col), 3));
                }
            }
            flips_to_path(Configuration::monochromatic(*lat, 2), &flips, params)
        }
        other => Err(PottsError::InvalidArgument(format!(
            "no steering recipe for shape {other:?}"
        ))),
    }
}
