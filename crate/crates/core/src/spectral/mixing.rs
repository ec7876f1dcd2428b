use serde::{Deserialize, Serialize};

use crate::error::{PottsError, Result};
use crate::spectral::{GibbsMeasure, Kernel};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MixingResult {
    /// Smallest n with worst-start total variation <= epsilon; a lower bound
    /// when `lower_bound_only` is set.
    pub n: u128,
    pub lower_bound_only: bool,
    /// Worst-start TV at the reported n.
    pub tv: f64,
    /// "doubling" (exact matrix powering) or "spectral" (slow-mode
    /// asymptotics for gaps below double precision).
    pub method: String,
}

fn worst_tv(p: &[f64], n: usize, mu: &[f64]) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut acc = 0.0;
        let row = &p[i * n..(i + 1) * n];
        for j in 0..n {
            acc += (row[j] - mu[j]).abs();
        }
        worst = worst.max(0.5 * acc);
    }
    worst
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        let arow = &a[i * n..(i + 1) * n];
        let crow = &mut c[i * n..(i + 1) * n];
        for (kk, &aik) in arow.iter().enumerate() {
            if aik == 0.0 {
                continue;
            }
            let brow = &b[kk * n..(kk + 1) * n];
            for j in 0..n {
                crow[j] += aik * brow[j];
            }
        }
    }
    c
}

/// Largest doubling exponent explored; beyond this only a lower bound is
/// reported.
const MAX_DOUBLINGS: usize = 120;

/// Total-variation mixing time.
///
/// For gaps resolvable in double precision the result comes from repeated
/// squaring plus an exact descent on the bracketing interval (the worst-start
/// TV is nonincreasing in n). When the gap sits below ~1e-12, matrix powering
/// cannot track the slow modes (each squaring perturbs the near-degenerate
/// top eigenvalues by machine epsilon), so the crossing is computed from the
/// two leading relaxation modes extracted in double-double precision.
pub fn mixing_time(kernel: &Kernel, measure: &GibbsMeasure, epsilon: f64) -> Result<MixingResult> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(PottsError::InvalidArgument(format!(
            "mixing time requires 0 < epsilon < 1, got {epsilon}"
        )));
    }
    let n = kernel.n;
    if n > crate::spectral::DENSE_EIG_CAP {
        return Err(PottsError::BudgetExhausted(format!(
            "mixing time uses dense powering, limited to {} states (got {n})",
            crate::spectral::DENSE_EIG_CAP
        )));
    }
    let modes = crate::spectral::eig::slow_modes(kernel, 2)?;
    if modes.rhos[0] < 1e-12 {
        return spectral_mixing_time(kernel, measure, epsilon, &modes);
    }
    let mu = &measure.weights;

    // n = 0: the identity
    let mut ident = vec![0.0; n * n];
    for i in 0..n {
        ident[i * n + i] = 1.0;
    }
    if worst_tv(&ident, n, mu) <= epsilon {
        return Ok(MixingResult {
            n: 0,
            lower_bound_only: false,
            tv: worst_tv(&ident, n, mu),
            method: "doubling".to_string(),
        });
    }

    // doubling phase: powers[j] = P^(2^j)
    let p1 = kernel.dense();
    let mut powers: Vec<Vec<f64>> = vec![p1];
    let mut k = 0usize;
    loop {
        let tv = worst_tv(&powers[k], n, mu);
        if tv <= epsilon {
            break;
        }
        if k >= MAX_DOUBLINGS {
            return Ok(MixingResult {
                n: 1u128 << k,
                lower_bound_only: true,
                tv,
                method: "doubling".to_string(),
            });
        }
        let next = matmul(&powers[k], &powers[k], n);
        powers.push(next);
        k += 1;
    }

    if k == 0 {
        // P itself mixes and the identity does not
        let tv = worst_tv(&powers[0], n, mu);
        return Ok(MixingResult {
            n: 1,
            lower_bound_only: false,
            tv,
            method: "doubling".to_string(),
        });
    }

    // exact descent: maintain Q = P^m with TV(Q) > eps, m starts at 2^(k-1)
    let mut m_exp: u128 = 1u128 << (k - 1);
    let mut q = powers[k - 1].clone();
    for j in (0..k - 1).rev() {
        let cand = matmul(&q, &powers[j], n);
        if worst_tv(&cand, n, mu) > epsilon {
            q = cand;
            m_exp += 1u128 << j;
        }
    }
    // TV(P^m_exp) > eps and TV(P^(m_exp + 1)) <= eps
    let final_p = matmul(&q, &powers[0], n);
    let tv = worst_tv(&final_p, n, mu);
    Ok(MixingResult {
        n: m_exp + 1,
        lower_bound_only: false,
        tv,
        method: "doubling".to_string(),
    })
}

/// Worst-start TV from the two leading relaxation modes:
/// `P^n(i,j) - mu_j = mu_j sum_m lambda_m^n phi_m(i) phi_m(j)` for a
/// reversible chain, with the fast modes identically zero at these n.
fn two_mode_tv(
    mu: &[f64],
    phis: &[Vec<f64>],
    rates: &[f64],
    n_steps: f64,
) -> f64 {
    let n = mu.len();
    let decays: Vec<f64> = rates.iter().map(|r| (-n_steps * r).exp()).collect();
    let mut worst = 0.0f64;
    for i in 0..n {
        let mut acc = 0.0;
        for j in 0..n {
            let mut s = 0.0;
            for (m, d) in decays.iter().enumerate() {
                s += d * phis[m][i] * phis[m][j];
            }
            acc += mu[j] * s.abs();
        }
        worst = worst.max(0.5 * acc);
    }
    worst
}

/// Force the slow-mode route regardless of the gap (exposed so the two
/// routes can be cross-checked in regimes where both apply).
pub fn mixing_time_spectral(
    kernel: &Kernel,
    measure: &GibbsMeasure,
    epsilon: f64,
) -> Result<MixingResult> {
    let modes = crate::spectral::eig::slow_modes(kernel, 2)?;
    spectral_mixing_time(kernel, measure, epsilon, &modes)
}

fn spectral_mixing_time(
    kernel: &Kernel,
    measure: &GibbsMeasure,
    epsilon: f64,
    modes: &crate::spectral::eig::SlowModes,
) -> Result<MixingResult> {
    let n = kernel.n;
    let mu = &measure.weights;
    // phi_m = v_m / u (orthonormal in L^2(mu)); rates = -ln(1 - rho)
    let phis: Vec<Vec<f64>> = modes
        .vectors
        .iter()
        .map(|v| {
            (0..n)
                .map(|i| if modes.u[i] != 0.0 { v[i] / modes.u[i] } else { 0.0 })
                .collect()
        })
        .collect();
    let rates: Vec<f64> = modes
        .rhos
        .iter()
        .map(|&r| -(-r).ln_1p()) // -ln(1 - rho)
        .collect();
    let tv_at = |steps: f64| two_mode_tv(mu, &phis, &rates, steps);
    // exponential search then integer bisection (TV nonincreasing)
    let mut hi: f64 = 1.0;
    let mut guard = 0;
    while tv_at(hi) > epsilon {
        hi *= 2.0;
        guard += 1;
        if guard > 400 {
            return Ok(MixingResult {
                n: u128::MAX,
                lower_bound_only: true,
                tv: tv_at(hi),
                method: "spectral".to_string(),
            });
        }
    }
    let mut lo: f64 = hi / 2.0;
    if hi == 1.0 {
        return Ok(MixingResult {
            n: 1,
            lower_bound_only: false,
            tv: tv_at(1.0),
            method: "spectral".to_string(),
        });
    }
    while hi - lo > 0.5 && hi > lo * (1.0 + 1e-15) {
        let mid = 0.5 * (lo + hi);
        if tv_at(mid) > epsilon {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let n_exact = hi.ceil() as u128;
    Ok(MixingResult {
        n: n_exact,
        lower_bound_only: false,
        tv: tv_at(n_exact as f64),
        method: "spectral".to_string(),
    })
}
