use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::configuration::{energy_monochromatic, Configuration};
use crate::coupling::{derive_constants, CouplingParams};
use crate::dynamics::ChainState;
use crate::error::{PottsError, Result};
use crate::gates::{gate_membership, GateFamily};
use crate::lattice::TorusLattice;

/// Hitting targets testable in O(1) from the chain's spin counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetSet {
    Monochromatic(u8),
    AnyMonochromatic,
}

impl TargetSet {
    fn matches(&self, chain: &ChainState) -> bool {
        match *self {
            TargetSet::Monochromatic(s) => chain.is_monochromatic() == Some(s),
            TargetSet::AnyMonochromatic => chain.is_monochromatic().is_some(),
        }
    }

    fn contains_config(&self, c: &Configuration) -> bool {
        match *self {
            TargetSet::Monochromatic(s) => c.is_monochromatic() == Some(s),
            TargetSet::AnyMonochromatic => c.is_monochromatic().is_some(),
        }
    }

    pub fn label(&self) -> String {
        match *self {
            TargetSet::Monochromatic(s) => format!("mono{s}"),
            TargetSet::AnyMonochromatic => "mono".to_string(),
        }
    }
}

/// First visit to the saddle level set and its gate classification.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SaddleHit {
    pub step: u64,
    pub config: String,
    /// "W21", "W31", "W23" or absent when the level configuration lies in
    /// none of the gate families.
    pub family: Option<String>,
}

/// Detector for the level set `{ |H - (H(2) + Gamma_star)| <= tol }`.
pub struct SaddleDetector {
    pub level: f64,
    pub tol: f64,
}

impl SaddleDetector {
    pub fn new(lattice: &TorusLattice, params: &CouplingParams) -> Result<Self> {
        let d = derive_constants(params)?;
        let level = energy_monochromatic(lattice, params, 2) + d.gamma_star;
        Ok(Self {
            level,
            tol: 1e-6 * d.gamma_star.abs(),
        })
    }

    pub fn classify(&self, c: &Configuration, params: &CouplingParams) -> Result<Option<String>> {
        if gate_membership(c, &GateFamily::W1 { m: 2 }, params)?.is_some() {
            return Ok(Some("W21".to_string()));
        }
        if gate_membership(c, &GateFamily::W1 { m: 3 }, params)?.is_some() {
            return Ok(Some("W31".to_string()));
        }
        if gate_membership(c, &GateFamily::W23Union, params)?.is_some() {
            return Ok(Some("W23".to_string()));
        }
        Ok(None)
    }
}

/// One replica's outcome.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HittingRecord {
    pub seed: u64,
    pub stream: u64,
    pub beta: f64,
    pub start: String,
    pub target: String,
    /// Steps to the first target visit; absent when censored at the budget.
    pub tau: Option<u64>,
    pub censored: bool,
    pub first_saddle_hit: Option<SaddleHit>,
    pub max_energy_seen: f64,
}

impl HittingRecord {
    pub const CSV_HEADER: &'static str = "seed,beta,tau,censored,first_gate_family,max_energy";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{:.9}",
            self.stream,
            self.beta,
            self.tau.map(|t| t.to_string()).unwrap_or_default(),
            self.censored,
            self.first_saddle_hit
                .as_ref()
                .and_then(|h| h.family.clone())
                .unwrap_or_default(),
            self.max_energy_seen
        )
    }
}

/// Run the chain from `start` until the target set is hit or the budget runs
/// out; record the first saddle-level visit and its gate classification.
#[allow(clippy::too_many_arguments)]
pub fn simulate_hitting(
    start: &Configuration,
    target: TargetSet,
    params: &CouplingParams,
    beta: f64,
    max_steps: u64,
    seed: u64,
    stream: u64,
    detector: Option<&SaddleDetector>,
) -> Result<HittingRecord> {
    if target.contains_config(start) {
        return Err(PottsError::InvalidArgument(
            "hitting time undefined: the start configuration lies in the target set".to_string(),
        ));
    }
    let mut chain = ChainState::new(start, params, beta, seed, stream)?;
    let mut max_e = chain.energy();
    let mut saddle: Option<SaddleHit> = None;
    let mut tau = None;
    while chain.step_count() < max_steps {
        if chain.step() {
            let e = chain.energy();
            if e > max_e {
                max_e = e;
            }
            if saddle.is_none() {
                if let Some(det) = detector {
                    if (e - det.level).abs() <= det.tol {
                        let c = chain.configuration();
                        saddle = Some(SaddleHit {
                            step: chain.step_count(),
                            config: c.spin_string(),
                            family: det.classify(&c, params)?,
                        });
                    }
                }
            }
            if target.matches(&chain) {
                tau = Some(chain.step_count());
                break;
            }
        }
    }
    Ok(HittingRecord {
        seed,
        stream,
        beta,
        start: start
            .is_monochromatic()
            .map(|s| format!("mono{s}"))
            .unwrap_or_else(|| start.spin_string()),
        target: target.label(),
        tau,
        censored: tau.is_none(),
        first_saddle_hit: saddle,
        max_energy_seen: max_e,
    })
}

/// Survival-aware median: censored records count as +infinity; the median is
/// reported only when more than half the records are uncensored.
pub fn survival_median(taus: &[Option<u64>]) -> Option<u64> {
    let n = taus.len();
    if n == 0 {
        return None;
    }
    let uncensored = taus.iter().filter(|t| t.is_some()).count();
    if 2 * uncensored <= n {
        return None;
    }
    let mut vals: Vec<u64> = taus.iter().map(|t| t.unwrap_or(u64::MAX)).collect();
    vals.sort_unstable();
    let med = vals[n / 2];
    if med == u64::MAX {
        None
    } else {
        Some(med)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrheniusBetaBlock {
    pub beta: f64,
    pub median_tau: Option<u64>,
    pub uncensored: usize,
    pub replicas: usize,
    /// Gate-classification tallies at the first saddle-level hit:
    /// (W21 + W31, W23, unclassified, no saddle hit recorded).
    pub sharp_hits: usize,
    pub complex_hits: usize,
    pub unclassified_hits: usize,
    pub no_hit: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ArrheniusReport {
    pub blocks: Vec<ArrheniusBetaBlock>,
    /// Least-squares slope of ln(median tau) against beta.
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    #[serde(skip)]
    pub records: Vec<HittingRecord>,
}

/// Hitting-time sweep from monochromatic 2 to monochromatic 1 over a beta
/// grid; replicas run in parallel on independent RNG streams (stream id =
/// replica index), aggregation is order-independent.
pub fn arrhenius_experiment(
    lattice: &TorusLattice,
    params: &CouplingParams,
    betas: &[f64],
    replicas: u64,
    max_steps: u64,
    seed: u64,
) -> Result<ArrheniusReport> {
    let start = Configuration::monochromatic(*lattice, 2);
    let detector = SaddleDetector::new(lattice, params)?;
    let mut blocks = Vec::new();
    let mut all_records = Vec::new();
    for (bi, &beta) in betas.iter().enumerate() {
        let records: Result<Vec<HittingRecord>> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                simulate_hitting(
                    &start,
                    TargetSet::Monochromatic(1),
                    params,
                    beta,
                    max_steps,
                    seed,
                    (bi as u64) << 32 | r,
                    Some(&detector),
                )
            })
            .collect();
        let records = records?;
        let taus: Vec<Option<u64>> = records.iter().map(|r| r.tau).collect();
        let mut sharp = 0;
        let mut complex = 0;
        let mut unclassified = 0;
        let mut none = 0;
        for r in &records {
            match &r.first_saddle_hit {
                Some(h) => match h.family.as_deref() {
                    Some("W21") | Some("W31") => sharp += 1,
                    Some("W23") => complex += 1,
                    _ => unclassified += 1,
                },
                None => none += 1,
            }
        }
        blocks.push(ArrheniusBetaBlock {
            beta,
            median_tau: survival_median(&taus),
            uncensored: taus.iter().filter(|t| t.is_some()).count(),
            replicas: replicas as usize,
            sharp_hits: sharp,
            complex_hits: complex,
            unclassified_hits: unclassified,
            no_hit: none,
        });
        all_records.extend(records);
    }
    let pts: Vec<(f64, f64)> = blocks
        .iter()
        .filter_map(|b| b.median_tau.map(|m| (b.beta, (m as f64).ln())))
        .collect();
    let (slope, intercept) = least_squares(&pts);
    Ok(ArrheniusReport {
        blocks,
        slope,
        intercept,
        records: all_records,
    })
}

fn least_squares(pts: &[(f64, f64)]) -> (Option<f64>, Option<f64>) {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return (None, None);
    }
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (None, None);
    }
    let slope = (n * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / n;
    (Some(slope), Some(intercept))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RecurrenceReport {
    pub beta: f64,
    pub epsilon: f64,
    /// The step bound exp(beta * (2(ell-1)(g23+g1) + eps)).
    pub bound_steps: u64,
    pub replicas: usize,
    pub violations: usize,
    pub censored: usize,
    pub max_tau: Option<u64>,
    pub taus: Vec<Option<u64>>,
}

/// Hitting times of {1, 2, 3} from uniformly random non-monochromatic
/// starts; verifies the recurrence bound empirically.
pub fn recurrence_experiment(
    lattice: &TorusLattice,
    params: &CouplingParams,
    beta: f64,
    replicas: u64,
    epsilon: f64,
    budget_factor: u64,
    seed: u64,
) -> Result<RecurrenceReport> {
    use rand::{Rng, SeedableRng};
    let d = derive_constants(params)?;
    let exponent = beta * (2.0 * (d.ell_star as f64 - 1.0) * (params.gamma23() + params.gamma1()) + epsilon);
    let bound_steps = exponent.exp().ceil() as u64;
    let max_steps = bound_steps.saturating_mul(budget_factor.max(1));
    let nv = lattice.num_vertices();

    let records: Result<Vec<Option<u64>>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0x9e3779b97f4a7c15);
            rng.set_stream(r);
            let start = loop {
                let spins: Vec<u8> = (0..nv).map(|_| rng.random_range(1..=3u8)).collect();
                let c = Configuration::from_spins(*lattice, spins)?;
                if c.is_monochromatic().is_none() {
                    break c;
                }
            };
            let rec = simulate_hitting(
                &start,
                TargetSet::AnyMonochromatic,
                params,
                beta,
                max_steps,
                seed,
                r,
                None,
            )?;
            Ok(rec.tau)
        })
        .collect();
    let taus = records?;
    let violations = taus
        .iter()
        .filter(|t| t.map(|v| v > bound_steps).unwrap_or(true))
        .count();
    let censored = taus.iter().filter(|t| t.is_none()).count();
    let max_tau = taus.iter().filter_map(|t| *t).max();
    Ok(RecurrenceReport {
        beta,
        epsilon,
        bound_steps,
        replicas: replicas as usize,
        violations,
        censored,
        max_tau,
        taus,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TransitionSplitReport {
    pub beta: f64,
    pub replicas: usize,
    pub sharp: usize,
    pub complex: usize,
    pub unclassified: usize,
    pub censored: usize,
    pub frac_2_to_1_direct: f64,
    pub frac_2_to_3_first: f64,
    /// Half-width of the 95% normal-approximation confidence interval.
    pub ci_halfwidth: f64,
}

/// From monochromatic 2, classify the first saddle-level visit of each
/// replica into the sharp (toward 1) or complex (toward 3) channel.
pub fn transition_split_experiment(
    lattice: &TorusLattice,
    params: &CouplingParams,
    beta: f64,
    replicas: u64,
    max_steps: u64,
    seed: u64,
) -> Result<TransitionSplitReport> {
    let start = Configuration::monochromatic(*lattice, 2);
    let detector = SaddleDetector::new(lattice, params)?;
    let outcomes: Result<Vec<Option<Option<String>>>> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut chain = ChainState::new(&start, params, beta, seed, r)?;
            while chain.step_count() < max_steps {
                if chain.step() {
                    let e = chain.energy();
                    if (e - detector.level).abs() <= detector.tol {
                        let c = chain.configuration();
                        return Ok(Some(detector.classify(&c, params)?));
                    }
                }
            }
            Ok(None)
        })
        .collect();
    let outcomes = outcomes?;
    let mut sharp = 0;
    let mut complex = 0;
    let mut unclassified = 0;
    let mut censored = 0;
    for o in &outcomes {
        match o {
            None => censored += 1,
            Some(None) => unclassified += 1,
            Some(Some(f)) if f == "W23" => complex += 1,
            Some(Some(_)) => sharp += 1,
        }
    }
    let classified = (sharp + complex) as f64;
    let frac_sharp = if classified > 0.0 {
        sharp as f64 / classified
    } else {
        f64::NAN
    };
    let ci = if classified > 0.0 {
        1.96 * (frac_sharp * (1.0 - frac_sharp) / classified).sqrt()
    } else {
        f64::NAN
    };
    Ok(TransitionSplitReport {
        beta,
        replicas: replicas as usize,
        sharp,
        complex,
        unclassified,
        censored,
        frac_2_to_1_direct: frac_sharp,
        frac_2_to_3_first: 1.0 - frac_sharp,
        ci_halfwidth: ci,
    })
}
