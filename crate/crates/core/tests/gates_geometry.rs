//! Geometry of the gate families and the reference paths, exercised at
//! theorem scale (assumption-satisfying couplings on a 10x10 torus).

use potts_core::configuration::{energy, energy_monochromatic, Configuration};
use potts_core::coupling::{check_assumptions, derive_constants, CouplingParams};
use potts_core::gates::{
    enumerate_family, gate_membership, reference_path_2_to_3, reference_path_2_to_3_through,
    reference_path_m_to_1, GateFamily,
};
use potts_core::lattice::TorusLattice;

/// gamma1 = 1, gamma12 = 1.4, gamma23 = 9.2/22: Assumptions A-C hold on 10x10.
fn theorem_params() -> (TorusLattice, CouplingParams) {
    let lat = TorusLattice::new(10, 10).unwrap();
    let p = CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, 9.2 / 22.0 - 0.2).unwrap();
    (lat, p)
}

#[test]
fn theorem_params_satisfy_assumptions() {
    let (lat, p) = theorem_params();
    let r = check_assumptions(&p, &lat, 1e-9).unwrap();
    assert!(r.all_hold(), "{r:?}");
    assert_eq!(r.ell_star, 2);
    assert!((r.gamma_star - 9.2).abs() < 1e-9);
}

#[test]
fn membership_spec_examples() {
    let (lat, p) = theorem_params();
    // sea of 2 with a 1x2 rectangle of 1s plus a protuberance on the long side
    let mut c = Configuration::monochromatic(lat, 2);
    c.set(lat.vertex(3, 4), 1);
    c.set(lat.vertex(4, 4), 1);
    c.set(lat.vertex(3, 5), 1);
    assert!(gate_membership(&c, &GateFamily::W1 { m: 2 }, &p)
        .unwrap()
        .is_some());
    assert!(gate_membership(&c, &GateFamily::W1Prime { m: 2 }, &p)
        .unwrap()
        .is_none());
    assert!(gate_membership(&c, &GateFamily::W1 { m: 3 }, &p)
        .unwrap()
        .is_none());

    // straight tromino -> wrong-side family
    let mut s = Configuration::monochromatic(lat, 2);
    for r in 3..6 {
        s.set(lat.vertex(r, 4), 1);
    }
    assert!(gate_membership(&s, &GateFamily::W1 { m: 2 }, &p)
        .unwrap()
        .is_none());
    assert!(gate_membership(&s, &GateFamily::W1Prime { m: 2 }, &p)
        .unwrap()
        .is_some());

    // 2 x (K-1) block of 3s in the sea of 2 -> Q(2,3)
    let mut q = Configuration::monochromatic(lat, 2);
    for r in 0..9 {
        for cix in 2..4 {
            q.set(lat.vertex(r, cix), 3);
        }
    }
    let d = gate_membership(&q, &GateFamily::Q { r: 2, s: 3 }, &p)
        .unwrap()
        .expect("member of Q(2,3)");
    assert!(matches!(
        d.shape,
        potts_core::gates::Shape::R { a: 2, b: 9 }
    ));

    // monochromatic 2 is in no family
    let two = Configuration::monochromatic(lat, 2);
    for fam in [
        GateFamily::W1 { m: 2 },
        GateFamily::W1Prime { m: 2 },
        GateFamily::P { r: 2, s: 3 },
        GateFamily::Q { r: 2, s: 3 },
        GateFamily::H { r: 2, s: 3, i: 1 },
        GateFamily::Wjh { r: 2, s: 3, j: 3, h: 4 },
        GateFamily::W23Union,
    ] {
        assert!(gate_membership(&two, &fam, &p).unwrap().is_none());
    }
}

#[test]
fn family_index_ranges_are_validated() {
    let (lat, p) = theorem_params();
    let c = Configuration::monochromatic(lat, 2);
    assert!(gate_membership(&c, &GateFamily::H { r: 2, s: 3, i: 8 }, &p).is_err());
    assert!(gate_membership(&c, &GateFamily::Wjh { r: 2, s: 3, j: 8, h: 1 }, &p).is_err());
    assert!(gate_membership(&c, &GateFamily::Wjh { r: 2, s: 3, j: 1, h: 1 }, &p).is_err());
}

#[test]
fn enumeration_counts_and_roundtrip() {
    let (lat, p) = theorem_params();
    // W(2,1): the L-trominoes, 4 orientations per anchor
    let (w21, trunc) = enumerate_family(&GateFamily::W1 { m: 2 }, &lat, &p, 10_000).unwrap();
    assert!(!trunc);
    assert_eq!(w21.len(), 400);
    // W'(2,1): straight trominoes, 2 orientations per anchor
    let (wp21, _) = enumerate_family(&GateFamily::W1Prime { m: 2 }, &lat, &p, 10_000).unwrap();
    assert_eq!(wp21.len(), 200);
    // P(2,3) on a square lattice: column and row variants, counts double
    let (p23, _) = enumerate_family(&GateFamily::P { r: 2, s: 3 }, &lat, &p, 10_000).unwrap();
    assert_eq!(p23.len(), 2 * 10 * 2 * 10);

    // K < L: only the column variant
    let lat_rect = TorusLattice::new(4, 6).unwrap();
    let (p23r, _) =
        enumerate_family(&GateFamily::P { r: 2, s: 3 }, &lat_rect, &p, 10_000).unwrap();
    assert_eq!(p23r.len(), 6 * 2 * 4);

    // round trip: every member passes membership for its own family
    for fam in [
        GateFamily::W1 { m: 2 },
        GateFamily::W1Prime { m: 3 },
        GateFamily::Q { r: 3, s: 2 },
        GateFamily::H { r: 2, s: 3, i: 2 },
        GateFamily::Wjh { r: 2, s: 3, j: 3, h: 4 },
    ] {
        let (members, truncated) = enumerate_family(&fam, &lat_rect, &p, 50_000)
            .or_else(|_| enumerate_family(&fam, &lat, &p, 50_000))
            .unwrap();
        assert!(!truncated);
        assert!(!members.is_empty());
        for m in &members {
            assert!(
                gate_membership(m, &fam, &p).unwrap().is_some(),
                "round-trip failed for {fam:?} member {}",
                m.spin_string()
            );
        }
    }
}

#[test]
fn swap_symmetry_maps_w21_onto_w31() {
    let (lat, p) = theorem_params();
    let (w21, _) = enumerate_family(&GateFamily::W1 { m: 2 }, &lat, &p, 10_000).unwrap();
    for c in &w21 {
        let swapped: Vec<u8> = c
            .spins()
            .iter()
            .map(|&s| match s {
                2 => 3,
                3 => 2,
                o => o,
            })
            .collect();
        let sw = Configuration::from_spins(lat, swapped).unwrap();
        assert!(gate_membership(&sw, &GateFamily::W1 { m: 3 }, &p)
            .unwrap()
            .is_some());
    }
}

#[test]
fn reference_path_to_one_has_singleton_argmax_at_anchor() {
    let (lat, p) = theorem_params();
    let d = derive_constants(&p).unwrap();
    let h2 = energy_monochromatic(&lat, &p, 2);
    let level = h2 + d.gamma_star;
    let (members, _) = enumerate_family(&GateFamily::W1 { m: 2 }, &lat, &p, 10_000).unwrap();
    // a few members across anchors and orientations
    for anchor in [&members[0], &members[137], &members[399]] {
        let path = reference_path_m_to_1(anchor, &p).unwrap();
        assert_eq!(path.first().is_monochromatic(), Some(2));
        assert_eq!(path.last().is_monochromatic(), Some(1));
        assert!(
            (path.height() - level).abs() <= 1e-9 * level.abs().max(1.0),
            "height {} vs level {level}",
            path.height()
        );
        let tol = 1e-9 * level.abs().max(1.0);
        let argmax = path.argmax_indices(&p, tol);
        assert_eq!(argmax.len(), 1, "argmax not a singleton");
        assert_eq!(&path.steps()[argmax[0]], anchor);
        // the path meets W(2,1) only at the anchor
        let mut hits = 0;
        for s in path.steps() {
            if gate_membership(s, &GateFamily::W1 { m: 2 }, &p)
                .unwrap()
                .is_some()
            {
                hits += 1;
                assert_eq!(s, anchor);
            }
        }
        assert_eq!(hits, 1);
        // endpoint energies
        assert!((energy(path.first(), &p) - h2).abs() < 1e-9);
        assert!(
            (energy(path.last(), &p) - energy_monochromatic(&lat, &p, 1)).abs() < 1e-9
        );
    }
}

#[test]
fn reference_path_two_to_three_height() {
    let (lat, p) = theorem_params();
    let d = derive_constants(&p).unwrap();
    let h2 = energy_monochromatic(&lat, &p, 2);
    let path = reference_path_2_to_3(&lat, &p, None, None).unwrap();
    assert_eq!(path.first().is_monochromatic(), Some(2));
    assert_eq!(path.last().is_monochromatic(), Some(3));
    let expected = h2 + (2.0 * 10.0 + 2.0) * p.gamma23();
    assert!((path.height() - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    // condition B makes the sweep height equal the droplet barrier
    assert!((path.height() - (h2 + d.gamma_star)).abs() <= 1e-9 * 10.0);
    // multiple argmax steps
    let tol = 1e-9 * expected.abs().max(1.0);
    assert!(path.argmax_indices(&p, tol).len() > 1);
}

#[test]
fn row_sweep_on_square_lattice_matches_height() {
    let (lat, p) = theorem_params();
    // sweep along rows = transposed column sweep; realize it by steering
    // through a transposed Wjh member below. Here check the column sweep with
    // a custom order and starts.
    let cols: Vec<usize> = (0..10).map(|i| (7 + i) % 10).collect();
    let starts = vec![3usize; 10];
    let path = reference_path_2_to_3(&lat, &p, Some(&cols), Some(&starts)).unwrap();
    let h2 = energy_monochromatic(&lat, &p, 2);
    let expected = h2 + 22.0 * p.gamma23();
    assert!((path.height() - expected).abs() <= 1e-9 * expected.abs().max(1.0));
    // non-adjacent column order is rejected
    let bad: Vec<usize> = vec![0, 2, 1, 3, 4, 5, 6, 7, 8, 9];
    assert!(reference_path_2_to_3(&lat, &p, Some(&bad), None).is_err());
}

/// Steering: for each family in the theorem list, a 2->3 path through a
/// designated member meets the family only there, at the right height.
#[test]
fn steering_meets_family_only_at_designated_member() {
    let (lat, p) = theorem_params();
    let d = derive_constants(&p).unwrap();
    let h2 = energy_monochromatic(&lat, &p, 2);
    let level = h2 + d.gamma_star;
    let tol = 1e-9 * level.abs().max(1.0);

    let families = [
        GateFamily::Wjh { r: 2, s: 3, j: 3, h: 4 },
        GateFamily::Wjh { r: 2, s: 3, j: 7, h: 9 },
        GateFamily::P { r: 2, s: 3 },
        GateFamily::P { r: 3, s: 2 },
        GateFamily::Q { r: 2, s: 3 },
        GateFamily::Q { r: 3, s: 2 },
        GateFamily::H { r: 2, s: 3, i: 2 },
        GateFamily::H { r: 3, s: 2, i: 5 },
    ];
    for fam in &families {
        let (members, _) = enumerate_family(fam, &lat, &p, 100_000).unwrap();
        assert!(!members.is_empty());
        // sample a spread of members: different anchors, sides, row variants
        let picks: Vec<usize> = vec![0, members.len() / 3, members.len() - 1];
        for &ix in &picks {
            let sigma = &members[ix];
            let path = reference_path_2_to_3_through(sigma, fam, &p).unwrap();
            assert_eq!(path.first().is_monochromatic(), Some(2), "{fam:?}");
            assert_eq!(path.last().is_monochromatic(), Some(3), "{fam:?}");
            assert!(
                (path.height() - level).abs() <= tol,
                "{fam:?} height {} vs {level}",
                path.height()
            );
            let mut hits = 0;
            for s in path.steps() {
                if gate_membership(s, fam, &p).unwrap().is_some() {
                    hits += 1;
                    assert_eq!(
                        s,
                        sigma,
                        "{fam:?}: path meets the family away from the designated member"
                    );
                }
            }
            assert_eq!(hits, 1, "{fam:?}: expected exactly one family visit");
        }
    }
}
