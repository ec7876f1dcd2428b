//! Spectral-module checks: kernel structure, gap against an independent
//! dense eigensolve, naive mixing oracle, and route consistency.

mod common;

use common::*;
use nalgebra::DMatrix;
use potts_core::landscape::EnumSpace;
use potts_core::lattice::TorusLattice;
use potts_core::spectral::{
    build_kernel, lanczos_top_eigenvalues, mixing_time, mixing_time_spectral, spectral_gap,
    GibbsMeasure,
};

fn space(k: usize, l: usize) -> EnumSpace {
    EnumSpace::new(TorusLattice::new(k, l).unwrap(), spectral_params(), 19_683).unwrap()
}

#[test]
fn gibbs_and_kernel_invariants() {
    let sp = space(2, 3);
    for beta in [0.0, 1.0, 5.0, 20.0] {
        let mu = GibbsMeasure::new(&sp, beta);
        let total: f64 = mu.weights.iter().sum();
        assert!((total - 1.0).abs() < 1e-12);
        let kernel = build_kernel(&sp, beta).unwrap();
        // row sums
        for i in 0..kernel.n {
            let s: f64 = kernel.diag[i] + kernel.rows[i].iter().map(|e| e.1).sum::<f64>();
            assert!((s - 1.0).abs() < 1e-12, "row {i} sums to {s}");
        }
        // detailed balance entrywise
        for i in 0..kernel.n {
            for &(j, pij) in &kernel.rows[i] {
                let pji = kernel.rows[j as usize]
                    .iter()
                    .find(|e| e.0 as usize == i)
                    .map(|e| e.1)
                    .unwrap();
                let lhs = mu.weights[i] * pij;
                let rhs = mu.weights[j as usize] * pji;
                assert!(
                    (lhs - rhs).abs() <= 1e-12 * lhs.abs().max(rhs.abs()).max(1e-300),
                    "detailed balance violated at ({i},{j})"
                );
            }
        }
        // stationarity in l1
        let n = kernel.n;
        let p = kernel.dense();
        let mut mup = vec![0.0f64; n];
        for i in 0..n {
            for j in 0..n {
                mup[j] += mu.weights[i] * p[i * n + j];
            }
        }
        let l1: f64 = mup
            .iter()
            .zip(&mu.weights)
            .map(|(a, b)| (a - b).abs())
            .sum();
        assert!(l1 < 1e-10, "stationarity drift {l1}");
    }
}

#[test]
fn beta_zero_kernel_is_uniform_on_flips() {
    // no doubled edges on 3x3: every single-flip entry is 1/(3*9)
    let sp = space(3, 3);
    let kernel = build_kernel(&sp, 0.0).unwrap();
    for i in 0..kernel.n {
        for &(_, p) in &kernel.rows[i] {
            assert!((p - 1.0 / 27.0).abs() < 1e-15);
        }
    }
}

#[test]
fn gap_matches_independent_dense_eigensolve() {
    // independent oracle: complex eigenvalues of the raw nonsymmetric kernel
    let sp = space(2, 2);
    for beta in [0.0, 2.0] {
        let kernel = build_kernel(&sp, beta).unwrap();
        let res = spectral_gap(&kernel).unwrap();
        let n = kernel.n;
        let p = DMatrix::from_row_slice(n, n, &kernel.dense());
        let eigs = p.complex_eigenvalues();
        let mut re: Vec<f64> = eigs.iter().map(|c| c.re).collect();
        for c in eigs.iter() {
            assert!(c.im.abs() < 1e-10, "reversible kernel has real spectrum");
        }
        re.sort_by(|a, b| b.total_cmp(a));
        assert!((re[0] - 1.0).abs() < 1e-10);
        let rho_oracle = 1.0 - re[1];
        assert!(
            (res.rho - rho_oracle).abs() <= 1e-8 * rho_oracle.max(1e-8),
            "rho {} vs oracle {rho_oracle}",
            res.rho
        );
        // spectrum shape invariants
        assert!((res.eigenvalues[0] - 1.0).abs() < 1e-10);
        assert!(res.eigenvalues.windows(2).all(|w| w[0] >= w[1] - 1e-12));
        assert!(*res.eigenvalues.last().unwrap() >= -1.0 - 1e-10);
        assert!(res.rho > 0.0);
    }
}

#[test]
fn mixing_time_beta_zero_matches_naive_stepping_oracle() {
    let sp = space(2, 2);
    let kernel = build_kernel(&sp, 0.0).unwrap();
    let mu = GibbsMeasure::new(&sp, 0.0);
    let eps = 0.25;
    let got = mixing_time(&kernel, &mu, eps).unwrap();
    assert!(!got.lower_bound_only);
    // naive oracle: explicit stepping
    let n = kernel.n;
    let p = kernel.dense();
    let tv = |m: &[f64]| -> f64 {
        let mut worst = 0.0f64;
        for i in 0..n {
            let acc: f64 = (0..n).map(|j| (m[i * n + j] - mu.weights[j]).abs()).sum();
            worst = worst.max(0.5 * acc);
        }
        worst
    };
    let mut cur = p.clone();
    let mut steps = 1u128;
    while tv(&cur) > eps {
        let mut next = vec![0.0; n * n];
        for i in 0..n {
            for k in 0..n {
                let a = cur[i * n + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..n {
                    next[i * n + j] += a * p[k * n + j];
                }
            }
        }
        cur = next;
        steps += 1;
        assert!(steps < 10_000, "oracle runaway");
    }
    assert_eq!(got.n, steps, "doubling+descent disagrees with naive oracle");
    // epsilon outside (0,1) is rejected
    assert!(mixing_time(&kernel, &mu, 1.0).is_err());
    assert!(mixing_time(&kernel, &mu, 0.0).is_err());
}

#[test]
fn spectral_and_doubling_routes_agree_in_overlap_regime() {
    let sp = space(2, 3);
    let beta = 8.0;
    let kernel = build_kernel(&sp, beta).unwrap();
    let mu = GibbsMeasure::new(&sp, beta);
    let doubling = mixing_time(&kernel, &mu, 0.25).unwrap();
    assert_eq!(doubling.method, "doubling");
    let spectral = mixing_time_spectral(&kernel, &mu, 0.25).unwrap();
    let a = doubling.n as f64;
    let b = spectral.n as f64;
    assert!(
        (a - b).abs() <= 0.02 * a,
        "routes disagree: doubling {a}, spectral {b}"
    );
}

#[test]
fn lanczos_matches_dense_top_eigenvalues() {
    let sp = space(2, 3);
    for beta in [0.5, 3.0] {
        let kernel = build_kernel(&sp, beta).unwrap();
        let dense = spectral_gap(&kernel).unwrap().eigenvalues;
        let top = lanczos_top_eigenvalues(&kernel, 2, 400).unwrap();
        assert!((top[0] - dense[0]).abs() < 1e-9);
        assert!((top[1] - dense[1]).abs() < 1e-9, "{} vs {}", top[1], dense[1]);
    }
}

#[test]
fn tmix_respects_gap_lower_bound() {
    // t_mix(1/4) >= (1/rho - 1) ln 2: a standard cross-check
    let sp = space(2, 3);
    let beta = 6.0;
    let kernel = build_kernel(&sp, beta).unwrap();
    let mu = GibbsMeasure::new(&sp, beta);
    let rho = spectral_gap(&kernel).unwrap().rho;
    let mix = mixing_time(&kernel, &mu, 0.25).unwrap();
    assert!(mix.n as f64 >= (1.0 / rho - 1.0) * std::f64::consts::LN_2);
}

#[test]
fn budget_refusal_reports_required_size() {
    let lat = TorusLattice::new(3, 4).unwrap();
    let err = match EnumSpace::new(lat, spectral_params(), 19_683) {
        Err(e) => e,
        Ok(_) => panic!("12-vertex lattice must exceed the 3^9 budget"),
    };
    let msg = format!("{err}");
    assert!(msg.contains("budget"), "unhelpful refusal: {msg}");
}
