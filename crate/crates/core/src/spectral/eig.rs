use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{PottsError, Result};
use crate::spectral::dd::Dd;
use crate::spectral::Kernel;

/// Full spectrum of the symmetrized kernel `S = D^{1/2} P D^{-1/2}`
/// (entrywise `s_ij = sqrt(p_ij p_ji)`), descending. Reversibility makes S
/// symmetric, so the spectrum is real by construction.
pub fn dense_symmetrized_spectrum(kernel: &Kernel) -> Result<Vec<f64>> {
    let n = kernel.n;
    let mut s = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        s[(i, i)] = kernel.diag[i];
        for &(j, p) in &kernel.rows[i] {
            let j = j as usize;
            // p_ji: locate the reverse entry
            let pji = kernel.rows[j]
                .iter()
                .find(|e| e.0 as usize == i)
                .map(|e| e.1)
                .unwrap_or(0.0);
            s[(i, j)] = (p * pji).sqrt();
        }
    }
    let eig = SymmetricEigen::new(s);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    Ok(vals)
}

/// High-relative-accuracy spectral gap via the double-double symmetrized
/// Laplacian.
///
/// The Laplacian is assembled from exactly symmetric conductances
/// `c_ij = q * exp(-beta (max(H_i, H_j) - H_ref))` and weights
/// `mu_i = exp(-beta (H_i - H_ref))`: off-diagonals `-c_ij / sqrt(mu_i mu_j)`
/// and diagonals `sum_j c_ij / mu_i`. With this construction `sqrt(mu)` lies
/// in the kernel of the stored matrix up to double-double roundoff, and
/// relative perturbations of the conductances move every eigenvalue only
/// relatively (Courant-Fischer on the quadratic-form ratio), so the second
/// eigenvalue is recovered with high relative accuracy even when it is far
/// below double precision. Deflated inverse iteration on
/// `M = L + u u^T` (u the normalized kernel vector) then extracts it.
pub fn refined_spectral_gap(kernel: &Kernel) -> Result<f64> {
    Ok(slow_modes(kernel, 1)?.rhos[0])
}

/// Leading nontrivial relaxation modes of the symmetrized Laplacian in
/// double-double precision: eigenvalues `rho_m = 1 - lambda_m` (ascending)
/// with their eigenvectors, plus the kernel vector `u = sqrt(mu)` and the
/// normalized weights, all via repeatedly deflated inverse iteration.
pub struct SlowModes {
    pub rhos: Vec<f64>,
    /// Eigenvectors of the symmetrized Laplacian (unit norm, f64 snapshots).
    pub vectors: Vec<Vec<f64>>,
    /// Normalized sqrt of the stationary weights.
    pub u: Vec<f64>,
}

pub fn slow_modes(kernel: &Kernel, count: usize) -> Result<SlowModes> {
    let n = kernel.n;
    let beta = kernel.beta;
    let href = kernel
        .energies
        .iter()
        .fold(f64::INFINITY, |m, &e| m.min(e));

    // kernel vector u = sqrt(mu'), normalized in dd
    let mu: Vec<Dd> = kernel
        .energies
        .iter()
        .map(|&e| Dd::from_f64((-beta * (e - href)).exp()))
        .collect();
    let mut u: Vec<Dd> = mu.iter().map(|m| m.sqrt()).collect();
    let norm2 = u.iter().fold(Dd::ZERO, |acc, x| acc.add(x.mul(*x)));
    let norm = norm2.sqrt();
    for x in &mut u {
        *x = x.div(norm);
    }

    // conductances c_ij = mu_i p_ij, symmetrized exactly in dd so that the
    // assembled Laplacian annihilates sqrt(mu) to double-double roundoff
    let mut lap = vec![Dd::ZERO; n * n];
    for i in 0..n {
        let mut row_sum = Dd::ZERO;
        for &(j, pij) in &kernel.rows[i] {
            let j = j as usize;
            let pji = kernel.rows[j]
                .iter()
                .find(|e| e.0 as usize == i)
                .map(|e| e.1)
                .unwrap_or(0.0);
            let cij = mu[i].mul(Dd::from_f64(pij));
            let cji = mu[j].mul(Dd::from_f64(pji));
            let c = cij.add(cji).mul(Dd::from_f64(0.5));
            row_sum = row_sum.add(c);
            let denom = mu[i].sqrt().mul(mu[j].sqrt());
            lap[i * n + j] = c.div(denom).neg();
        }
        lap[i * n + i] = row_sum.div(mu[i]);
    }
    let tau = Dd::from_f64(4.0);
    let mut m = lap.clone();
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = m[i * n + j].add(tau.mul(u[i].mul(u[j])));
        }
    }

    // LDL^T factorization in place (M is positive definite)
    ldl_factor(&mut m, n)?;

    // repeatedly deflated inverse iteration with deterministic starts
    let mut found: Vec<Vec<Dd>> = Vec::new();
    let mut rhos = Vec::new();
    for mode in 0..count {
        let mut x: Vec<Dd> = (0..n)
            .map(|i| {
                let h = (i as u64)
                    .wrapping_mul(2654435761)
                    .wrapping_add(mode as u64 * 97);
                Dd::from_f64((h % 1000) as f64 / 1000.0 - 0.5)
            })
            .collect();
        let deflate = |x: &mut Vec<Dd>, found: &Vec<Vec<Dd>>| {
            orthogonalize(x, &u);
            for f in found {
                orthogonalize(x, f);
            }
        };
        deflate(&mut x, &found);
        normalize(&mut x);
        let mut rho_prev = f64::INFINITY;
        for _ in 0..200 {
            ldl_solve(&m, n, &mut x);
            deflate(&mut x, &found);
            normalize(&mut x);
            let rho = rayleigh(&lap, n, &x).to_f64();
            if (rho - rho_prev).abs() <= 1e-10 * rho.abs().max(1e-300) {
                break;
            }
            rho_prev = rho;
        }
        rhos.push(rayleigh(&lap, n, &x).to_f64());
        found.push(x);
    }
    Ok(SlowModes {
        rhos,
        vectors: found
            .iter()
            .map(|v| v.iter().map(|x| x.to_f64()).collect())
            .collect(),
        u: u.iter().map(|x| x.to_f64()).collect(),
    })
}

fn orthogonalize(x: &mut [Dd], u: &[Dd]) {
    let dot = x
        .iter()
        .zip(u)
        .fold(Dd::ZERO, |acc, (a, b)| acc.add(a.mul(*b)));
    for (xi, ui) in x.iter_mut().zip(u) {
        *xi = xi.sub(dot.mul(*ui));
    }
}

fn normalize(x: &mut [Dd]) {
    let norm2 = x.iter().fold(Dd::ZERO, |acc, a| acc.add(a.mul(*a)));
    let norm = norm2.sqrt();
    for xi in x.iter_mut() {
        *xi = xi.div(norm);
    }
}

fn rayleigh(a: &[Dd], n: usize, x: &[Dd]) -> Dd {
    let mut acc = Dd::ZERO;
    for i in 0..n {
        let mut row = Dd::ZERO;
        for j in 0..n {
            row = row.add(a[i * n + j].mul(x[j]));
        }
        acc = acc.add(row.mul(x[i]));
    }
    acc
}

/// In-place LDL^T: strictly lower part holds L, diagonal holds D.
fn ldl_factor(a: &mut [Dd], n: usize) -> Result<()> {
    for j in 0..n {
        let mut d = a[j * n + j];
        for k in 0..j {
            let l = a[j * n + k];
            d = d.sub(l.mul(l).mul(a[k * n + k]));
        }
        if d.to_f64() <= 0.0 {
            return Err(PottsError::EigenFailure(format!(
                "LDL pivot {j} nonpositive: {}",
                d.to_f64()
            )));
        }
        a[j * n + j] = d;
        for i in (j + 1)..n {
            let mut v = a[i * n + j];
            for k in 0..j {
                v = v.sub(a[i * n + k].mul(a[j * n + k]).mul(a[k * n + k]));
            }
            a[i * n + j] = v.div(d);
        }
    }
    Ok(())
}

fn ldl_solve(f: &[Dd], n: usize, x: &mut [Dd]) {
    // forward: L y = x
    for i in 0..n {
        let mut v = x[i];
        for k in 0..i {
            v = v.sub(f[i * n + k].mul(x[k]));
        }
        x[i] = v;
    }
    // diagonal
    for i in 0..n {
        x[i] = x[i].div(f[i * n + i]);
    }
    // backward: L^T z = y
    for i in (0..n).rev() {
        let mut v = x[i];
        for k in (i + 1)..n {
            v = v.sub(f[k * n + i].mul(x[k]));
        }
        x[i] = v;
    }
}

/// Leading eigenvalues of the symmetrized kernel by Lanczos with full
/// reorthogonalization (double precision), for spaces too large for the
/// dense path.
pub fn lanczos_top_eigenvalues(kernel: &Kernel, k: usize, max_iter: usize) -> Result<Vec<f64>> {
    let n = kernel.n;
    // symmetrized CSR
    let mut srows: Vec<Vec<(u32, f64)>> = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(kernel.rows[i].len());
        for &(j, p) in &kernel.rows[i] {
            let pji = kernel.rows[j as usize]
                .iter()
                .find(|e| e.0 as usize == i)
                .map(|e| e.1)
                .unwrap_or(0.0);
            row.push((j, (p * pji).sqrt()));
        }
        srows.push(row);
    }
    let apply = |x: &[f64], y: &mut [f64]| {
        for i in 0..n {
            let mut acc = kernel.diag[i] * x[i];
            for &(j, s) in &srows[i] {
                acc += s * x[j as usize];
            }
            y[i] = acc;
        }
    };

    let m = max_iter.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m);
    let mut alphas: Vec<f64> = Vec::with_capacity(m);
    let mut betas: Vec<f64> = Vec::with_capacity(m);
    let mut v: Vec<f64> = (0..n)
        .map(|i| 1.0 + 1e-3 * (((i as u64).wrapping_mul(0x9e3779b9) % 997) as f64 / 997.0))
        .collect();
    let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= norm);
    let mut w = vec![0.0; n];
    let top_ritz = |alphas: &[f64], betas: &[f64], k: usize| -> Vec<f64> {
        let t = alphas.len();
        let mut tri = DMatrix::<f64>::zeros(t, t);
        for i in 0..t {
            tri[(i, i)] = alphas[i];
            if i + 1 < t {
                tri[(i, i + 1)] = betas[i];
                tri[(i + 1, i)] = betas[i];
            }
        }
        let mut vals: Vec<f64> = SymmetricEigen::new(tri).eigenvalues.iter().copied().collect();
        vals.sort_by(|a, b| b.total_cmp(a));
        vals.truncate(k);
        vals
    };
    let mut prev_ritz: Vec<f64> = Vec::new();
    for it in 0..m {
        apply(&v, &mut w);
        let alpha: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
        alphas.push(alpha);
        basis.push(v.clone());
        for (wi, vi) in w.iter_mut().zip(&v) {
            *wi -= alpha * vi;
        }
        // full reorthogonalization against the stored basis
        for q in &basis {
            let d: f64 = q.iter().zip(&w).map(|(a, b)| a * b).sum();
            for (wi, qi) in w.iter_mut().zip(q) {
                *wi -= d * qi;
            }
        }
        let beta = w.iter().map(|a| a * a).sum::<f64>().sqrt();
        if beta < 1e-13 || it + 1 == m {
            break;
        }
        // early exit once the leading Ritz values have settled
        if it >= 10 && it % 5 == 0 {
            let ritz = top_ritz(&alphas, &betas, k);
            if ritz.len() == prev_ritz.len()
                && ritz
                    .iter()
                    .zip(&prev_ritz)
                    .all(|(a, b)| (a - b).abs() <= 1e-13 * a.abs().max(1.0))
            {
                break;
            }
            prev_ritz = ritz;
        }
        betas.push(beta);
        v = w.iter().map(|a| a / beta).collect();
    }
    let t = alphas.len();
    let mut tri = DMatrix::<f64>::zeros(t, t);
    for i in 0..t {
        tri[(i, i)] = alphas[i];
        if i + 1 < t {
            tri[(i, i + 1)] = betas[i];
            tri[(i + 1, i)] = betas[i];
        }
    }
    let eig = SymmetricEigen::new(tri);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals.truncate(k);
    Ok(vals)
}
