use crate::configuration::{energy, Configuration};
use crate::coupling::CouplingParams;
use crate::error::{PottsError, Result};

/// A finite sequence of configurations in which consecutive entries differ in
/// at most one vertex (equal steps are allowed: projected paths keep their
/// non-updating instances), together with its height `max H`.
#[derive(Debug, Clone)]
pub struct LatticePath {
    steps: Vec<Configuration>,
    height: f64,
}

impl LatticePath {
    /// Build a path from its steps, validating single-flip adjacency and
    /// computing the height.
    pub fn new(steps: Vec<Configuration>, params: &CouplingParams) -> Result<Self> {
        if steps.is_empty() {
            return Err(PottsError::InvalidArgument("empty path".to_string()));
        }
        for (i, w) in steps.windows(2).enumerate() {
            let d = w[0].hamming(&w[1]);
            if d > 1 {
                return Err(PottsError::InvalidArgument(format!(
                    "steps {i} and {} differ in {d} vertices",
                    i + 1
                )));
            }
        }
        let height = steps
            .iter()
            .map(|c| energy(c, params))
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Self { steps, height })
    }

    pub fn steps(&self) -> &[Configuration] {
        &self.steps
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    pub fn first(&self) -> &Configuration {
        self.steps.first().unwrap()
    }

    pub fn last(&self) -> &Configuration {
        self.steps.last().unwrap()
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// All indices attaining the height within `tol`.
    pub fn argmax_indices(&self, params: &CouplingParams, tol: f64) -> Vec<usize> {
        self.steps
            .iter()
            .enumerate()
            .filter(|(_, c)| (energy(c, params) - self.height).abs() <= tol)
            .map(|(i, _)| i)
            .collect()
    }

    /// Apply a projection (or any single-configuration map) stepwise.
    pub fn map_steps<F>(&self, params: &CouplingParams, f: F) -> Result<Self>
    where
        F: Fn(&Configuration) -> Result<Configuration>,
    {
        let steps: Result<Vec<_>> = self.steps.iter().map(f).collect();
        Self::new(steps?, params)
    }

    /// Concatenate two paths sharing an endpoint.
    pub fn concat(mut self, other: &LatticePath) -> Result<Self> {
        if self.last() != other.first() {
            return Err(PottsError::InvalidArgument(
                "paths do not share an endpoint".to_string(),
            ));
        }
        self.steps.extend_from_slice(&other.steps()[1..]);
        self.height = self.height.max(other.height);
        Ok(self)
    }

    /// Newline-delimited packed-spin dump.
    pub fn dump_packed(&self) -> String {
        let mut out = String::new();
        for s in &self.steps {
            out.push_str(&s.spin_string());
            out.push('\n');
        }
        out
    }
}
