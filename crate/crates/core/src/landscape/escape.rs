use crate::configuration::{energy, energy_delta, Configuration};
use crate::coupling::{derive_constants, CouplingParams};
use crate::error::{PottsError, Result};
use crate::landscape::clusters::{clusters, ClusterInfo};
use crate::landscape::path::LatticePath;

/// Build an explicit downhill escape path from a non-monochromatic `eta` to a
/// strictly lower-energy configuration, following the constructive flip
/// schedules: immediate downhill flip when one exists, growth of a 1-cluster
/// with a side of length >= ell_star, clockwise filling of sub-critical
/// 1-rectangles with the majority boundary spin, and concavity-fill /
/// rectangle-erosion / strip-erosion for pure 2-3 configurations.
///
/// The construction is valid under the standing coupling assumptions; the
/// elevation of the returned path is at most `2(ell_star - 1)(g23 + g1)`.
pub fn build_escape_path(eta: &Configuration, params: &CouplingParams) -> Result<LatticePath> {
    if eta.is_monochromatic().is_some() {
        return Err(PottsError::InvalidArgument(
            "escape paths are defined for non-monochromatic configurations".to_string(),
        ));
    }
    let h0 = energy(eta, params);
    let eps = 1e-9 * h0.abs().max(1.0);

    // direct downhill flip
    if let Some((v, s)) = first_downhill(eta, params, eps) {
        let steps = vec![eta.clone(), eta.flipped(v, s)];
        return LatticePath::new(steps, params);
    }

    let ell = derive_constants(params)?.ell_star as usize;
    let n1 = eta.spins().iter().filter(|&&s| s == 1).count();

    let mut steps = vec![eta.clone()];
    if n1 > 0 {
        escape_via_one_clusters(eta, params, ell, h0, eps, &mut steps)?;
    } else {
        escape_two_three(eta, params, h0, eps, &mut steps)?;
    }
    LatticePath::new(steps, params)
}

fn first_downhill(c: &Configuration, params: &CouplingParams, eps: f64) -> Option<(usize, u8)> {
    for v in 0..c.lattice().num_vertices() {
        for s in [1u8, 2, 3] {
            if s != c.get(v) && energy_delta(c, v, s, params) < -eps {
                return Some((v, s));
            }
        }
    }
    None
}

fn push_flip(steps: &mut Vec<Configuration>, v: usize, s: u8) -> Configuration {
    let next = steps.last().unwrap().flipped(v, s);
    steps.push(next.clone());
    next
}

fn current_energy(steps: &[Configuration], params: &CouplingParams) -> f64 {
    energy(steps.last().unwrap(), params)
}

fn escape_via_one_clusters(
    eta: &Configuration,
    params: &CouplingParams,
    ell: usize,
    h0: f64,
    eps: f64,
    steps: &mut Vec<Configuration>,
) -> Result<()> {
    let lat = *eta.lattice();
    let one_clusters = clusters(eta, 1);
    // with every tile stable, 1-clusters are rectangles
    for c in &one_clusters {
        if !c.is_rectangle {
            return Err(PottsError::InvalidArgument(format!(
                "non-rectangular 1-cluster without a downhill flip (anchor {:?}); \
                 couplings violate the standing assumptions",
                c.anchor
            )));
        }
    }

    // grow a cluster along a side of length >= ell_star if any has room
    let growable = one_clusters.iter().find(|c| {
        (c.box_rows >= ell && !c.wraps_cols) || (c.box_cols >= ell && !c.wraps_rows)
    });
    if let Some(c) = growable {
        let (r0, c0) = c.anchor;
        if c.box_rows >= ell && !c.wraps_cols {
            // flip the column to the right of the rectangle, top to bottom
            let col = (c0 + c.box_cols) % lat.cols();
            for dr in 0..c.box_rows {
                let v = lat.vertex((r0 + dr) % lat.rows(), col);
                if steps.last().unwrap().get(v) != 1 {
                    push_flip(steps, v, 1);
                    if current_energy(steps, params) < h0 - eps {
                        return Ok(());
                    }
                }
            }
        } else {
            let row = (r0 + c.box_rows) % lat.rows();
            for dc in 0..c.box_cols {
                let v = lat.vertex(row, (c0 + dc) % lat.cols());
                if steps.last().unwrap().get(v) != 1 {
                    push_flip(steps, v, 1);
                    if current_energy(steps, params) < h0 - eps {
                        return Ok(());
                    }
                }
            }
        }
        if current_energy(steps, params) < h0 - eps {
            return Ok(());
        }
        return Err(PottsError::InvalidArgument(
            "supercritical growth did not lower the energy; couplings violate assumptions"
                .to_string(),
        ));
    }

    // all 1-clusters subcritical: fill the first one clockwise with the
    // majority spin of its outer boundary (ties broken toward 2)
    let c = &one_clusters[0];
    let mut count2 = 0usize;
    let mut count3 = 0usize;
    for &w in &c.boundary {
        match eta.get(w) {
            2 => count2 += 1,
            3 => count3 += 1,
            _ => {}
        }
    }
    let fill = if count3 > count2 { 3u8 } else { 2u8 };
    for v in spiral_order(&lat, c) {
        push_flip(steps, v, fill);
        if current_energy(steps, params) < h0 - eps {
            return Ok(());
        }
    }
    if current_energy(steps, params) < h0 - eps {
        Ok(())
    } else {
        Err(PottsError::InvalidArgument(
            "subcritical fill did not lower the energy; couplings violate assumptions".to_string(),
        ))
    }
}

/// Clockwise ring-by-ring order of a rectangular cluster starting at its
/// upper-left corner.
fn spiral_order(lat: &crate::lattice::TorusLattice, c: &ClusterInfo) -> Vec<usize> {
    let (r0, c0) = c.anchor;
    let (h, w) = (c.box_rows, c.box_cols);
    let mut order = Vec::with_capacity(h * w);
    let (mut top, mut bottom, mut left, mut right) = (0isize, h as isize - 1, 0isize, w as isize - 1);
    while top <= bottom && left <= right {
        for dc in left..=right {
            order.push((top, dc));
        }
        for dr in (top + 1)..=bottom {
            order.push((dr, right));
        }
        if bottom > top {
            for dc in (left..right).rev() {
                order.push((bottom, dc));
            }
        }
        if right > left {
            for dr in ((top + 1)..bottom).rev() {
                order.push((dr, left));
            }
        }
        top += 1;
        bottom -= 1;
        left += 1;
        right -= 1;
    }
    order
        .into_iter()
        .map(|(dr, dc)| {
            lat.vertex(
                (r0 + dr as usize) % lat.rows(),
                (c0 + dc as usize) % lat.cols(),
            )
        })
        .collect()
}

fn escape_two_three(
    eta: &Configuration,
    params: &CouplingParams,
    h0: f64,
    eps: f64,
    steps: &mut Vec<Configuration>,
) -> Result<()> {
    let lat = *eta.lattice();
    // fill concavities of 2-clusters: a spin-3 vertex with at least two
    // spin-2 neighbors flips flat (or downhill) to 2
    loop {
        let cur = steps.last().unwrap().clone();
        let mut flipped = false;
        for v in 0..lat.num_vertices() {
            if cur.get(v) != 3 {
                continue;
            }
            let twos = lat.neighbors(v).iter().filter(|&&w| cur.get(w) == 2).count();
            if twos >= 2 {
                push_flip(steps, v, 2);
                if current_energy(steps, params) < h0 - eps {
                    return Ok(());
                }
                flipped = true;
                break;
            }
        }
        if !flipped {
            break;
        }
    }

    // no concavities left: clusters of both spins are rectangles or strips
    let mut all = clusters(steps.last().unwrap(), 2);
    all.extend(clusters(steps.last().unwrap(), 3));
    if let Some(rect) = all
        .iter()
        .find(|c| c.is_rectangle && !c.wraps_rows && !c.wraps_cols)
    {
        // erode the top row of a finite rectangle, left to right
        let o = if rect.spin == 2 { 3u8 } else { 2u8 };
        let (r0, c0) = rect.anchor;
        for dc in 0..rect.box_cols {
            let v = lat.vertex(r0, (c0 + dc) % lat.cols());
            push_flip(steps, v, o);
            if current_energy(steps, params) < h0 - eps {
                return Ok(());
            }
        }
        return Err(PottsError::InvalidArgument(
            "rectangle erosion did not lower the energy".to_string(),
        ));
    }

    // strip landscape: erode the first 3-strip row by row (or column by
    // column for vertical strips) until the energy strictly drops
    let strips3 = clusters(steps.last().unwrap(), 3);
    let strip = strips3
        .first()
        .ok_or_else(|| PottsError::InvalidArgument("no spin-3 cluster to erode".to_string()))?;
    let (r0, c0) = strip.anchor;
    if strip.wraps_cols {
        for dr in 0..strip.box_rows {
            let row = (r0 + dr) % lat.rows();
            for col in 0..lat.cols() {
                let v = lat.vertex(row, col);
                push_flip(steps, v, 2);
                if current_energy(steps, params) < h0 - eps {
                    return Ok(());
                }
            }
        }
    } else {
        for dc in 0..strip.box_cols {
            let col = (c0 + dc) % lat.cols();
            for row in 0..lat.rows() {
                let v = lat.vertex(row, col);
                push_flip(steps, v, 2);
                if current_energy(steps, params) < h0 - eps {
                    return Ok(());
                }
            }
        }
    }
    Err(PottsError::InvalidArgument(
        "strip erosion did not lower the energy".to_string(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::TorusLattice;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn theorem_params() -> CouplingParams {
        CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, 9.2 / 22.0 - 0.2).unwrap()
    }

    #[test]
    fn protuberance_relaxes_in_one_step() {
        let lat = TorusLattice::new(10, 10).unwrap();
        let p = theorem_params();
        let eta = Configuration::monochromatic(lat, 2).flipped(33, 1);
        let path = build_escape_path(&eta, &p).unwrap();
        assert_eq!(path.len(), 2);
        assert!(path.height() <= energy(&eta, &p) + 1e-9);
    }

    #[test]
    fn random_escapes_respect_recurrence_bound() {
        let lat = TorusLattice::new(10, 10).unwrap();
        let p = theorem_params();
        let d = derive_constants(&p).unwrap();
        let bound = 2.0 * (d.ell_star as f64 - 1.0) * (p.gamma23() + p.gamma1());
        let mut rng = StdRng::seed_from_u64(0xcafe);
        for _ in 0..300 {
            let spins: Vec<u8> = (0..100).map(|_| rng.random_range(1..=3u8)).collect();
            let eta = match Configuration::from_spins(lat, spins) {
                Ok(c) if c.is_monochromatic().is_none() => c,
                _ => continue,
            };
            let h0 = energy(&eta, &p);
            let path = build_escape_path(&eta, &p).unwrap();
            assert_eq!(path.first(), &eta);
            assert!(
                energy(path.last(), &p) < h0 - 1e-12,
                "no strict descent from {}",
                eta.spin_string()
            );
            assert!(
                path.height() - h0 <= bound + 1e-9,
                "elevation {} exceeds bound {bound}",
                path.height() - h0
            );
        }
    }

    #[test]
    fn striped_configurations_escape() {
        // alternating 2/3 bands: a genuine plateau landscape
        let lat = TorusLattice::new(6, 6).unwrap();
        let p = theorem_params();
        let mut c = Configuration::monochromatic(lat, 2);
        for row in 0..3 {
            for col in 0..6 {
                c.set(lat.vertex(row, col), 3);
            }
        }
        let h0 = energy(&c, &p);
        let path = build_escape_path(&c, &p).unwrap();
        assert!(energy(path.last(), &p) < h0 - 1e-12);
        assert!(path.height() - h0 <= 2.0 * p.gamma23() + 1e-9);
    }
}
