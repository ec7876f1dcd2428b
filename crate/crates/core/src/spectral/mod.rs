//! Exact Gibbs measure, Metropolis transition kernel, spectral gap, and
//! total-variation mixing time for fully enumerable lattices.
//!
//! The spectral gap at large beta lies far below double-precision resolution
//! of `1 - lambda_2`; it is recovered by assembling the symmetrized
//! Laplacian from exactly symmetric conductances in double-double arithmetic
//! and running deflated inverse iteration (see `eig`).

pub mod dd;
pub(crate) mod eig;
mod mixing;

pub use eig::{lanczos_top_eigenvalues, refined_spectral_gap, slow_modes, SlowModes};
pub use mixing::{mixing_time, mixing_time_spectral, MixingResult};

use serde::{Deserialize, Serialize};

use crate::error::{PottsError, Result};
use crate::landscape::EnumSpace;

/// The Gibbs measure at one inverse temperature, in normalized form plus the
/// log partition function (log-domain accumulation with max subtraction).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GibbsMeasure {
    pub beta: f64,
    pub weights: Vec<f64>,
    pub log_z: f64,
}

impl GibbsMeasure {
    pub fn new(space: &EnumSpace, beta: f64) -> Self {
        let h_min = space
            .energies()
            .iter()
            .fold(f64::INFINITY, |m, &e| m.min(e));
        let mut weights: Vec<f64> = space
            .energies()
            .iter()
            .map(|&e| (-beta * (e - h_min)).exp())
            .collect();
        let z: f64 = weights.iter().sum();
        for w in &mut weights {
            *w /= z;
        }
        GibbsMeasure {
            beta,
            weights,
            log_z: z.ln() - beta * h_min,
        }
    }
}

/// Sparse row-stochastic Metropolis kernel on an enumerated space.
pub struct Kernel {
    pub n: usize,
    pub beta: f64,
    /// Off-diagonal entries per row: (column, probability).
    pub rows: Vec<Vec<(u32, f64)>>,
    pub diag: Vec<f64>,
    /// Energies of the underlying states (for conductance reconstruction).
    pub energies: Vec<f64>,
    /// Proposal probability 1/(3 |V|).
    pub proposal: f64,
}

impl Kernel {
    pub fn dense(&self) -> Vec<f64> {
        let n = self.n;
        let mut p = vec![0.0; n * n];
        for i in 0..n {
            p[i * n + i] = self.diag[i];
            for &(j, v) in &self.rows[i] {
                p[i * n + j as usize] = v;
            }
        }
        p
    }
}

/// Build the exact sparse kernel: `P(x,y) = (1/(3|V|)) exp(-beta [H(y)-H(x)]+)`
/// for single-flip pairs, with the diagonal absorbing self-spin proposals and
/// rejections.
pub fn build_kernel(space: &EnumSpace, beta: f64) -> Result<Kernel> {
    if !(beta >= 0.0) {
        return Err(PottsError::InvalidArgument(format!(
            "beta must be nonnegative, got {beta}"
        )));
    }
    let n = space.len();
    let proposal = 1.0 / (3.0 * space.num_vertices() as f64);
    let mut rows = Vec::with_capacity(n);
    let mut diag = Vec::with_capacity(n);
    for i in 0..n as u64 {
        let hi = space.energy_of(i);
        let mut row: Vec<(u32, f64)> = Vec::with_capacity(2 * space.num_vertices());
        space.for_each_neighbor(i, |j, _, _| {
            let hj = space.energy_of(j);
            let dh = (hj - hi).max(0.0);
            row.push((j as u32, proposal * (-beta * dh).exp()));
        });
        row.sort_unstable_by_key(|e| e.0);
        // 2-wide tori produce doubled edges; merge repeated columns
        let mut merged: Vec<(u32, f64)> = Vec::with_capacity(row.len());
        for (j, p) in row {
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += p,
                _ => merged.push((j, p)),
            }
        }
        let off_sum: f64 = merged.iter().map(|e| e.1).sum();
        rows.push(merged);
        diag.push(1.0 - off_sum);
    }
    Ok(Kernel {
        n,
        beta,
        rows,
        diag,
        energies: space.energies().to_vec(),
        proposal,
    })
}

/// Spectral data: the full (or leading) spectrum in descending order, the
/// gap `rho = 1 - lambda_2`, and how the gap was obtained.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpectralResult {
    pub eigenvalues: Vec<f64>,
    /// `1 - lambda_2`; refined in extended precision when available.
    pub rho: f64,
    /// True when `rho` came from the double-double deflated inverse
    /// iteration rather than from the double-precision spectrum.
    pub refined: bool,
}

/// Largest state count for which the dense symmetric eigensolve (and the
/// double-double refinement) is used; larger spaces fall back to sparse
/// Lanczos for the leading eigenvalues.
pub const DENSE_EIG_CAP: usize = 729;

/// Eigenvalues of the kernel via the symmetrized similarity transform
/// `S = D^{1/2} P D^{-1/2}` (reversibility makes the spectrum real), plus a
/// high-relative-accuracy gap from the double-double Laplacian when the
/// space is small enough for the dense path.
pub fn spectral_gap(kernel: &Kernel) -> Result<SpectralResult> {
    let n = kernel.n;
    if n <= DENSE_EIG_CAP {
        let eigenvalues = eig::dense_symmetrized_spectrum(kernel)?;
        let rho = eig::refined_spectral_gap(kernel)?;
        Ok(SpectralResult {
            eigenvalues,
            rho,
            refined: true,
        })
    } else {
        let top = eig::lanczos_top_eigenvalues(kernel, 2, 400)?;
        if top.len() < 2 {
            return Err(PottsError::EigenFailure(
                "Lanczos did not produce two leading eigenvalues".to_string(),
            ));
        }
        Ok(SpectralResult {
            rho: 1.0 - top[1],
            eigenvalues: top,
            refined: false,
        })
    }
}
