use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{PottsError, Result};
use crate::lattice::TorusLattice;

pub type Rational = Ratio<i128>;

/// Guard band for ceiling computations on doubles: a value this close to an
/// integer is treated as that integer, so that `ell_star` is never off by one
/// due to rounding in the gamma arithmetic.
pub const CEIL_GUARD: f64 = 1e-9;

/// Default relative tolerance for the assumption-B equality test and the
/// distance-to-integer threshold of assumption A.
pub const DEFAULT_ASSUMPTION_TOL: f64 = 1e-9;

/// Ceiling with a guard band: values within `CEIL_GUARD` of an integer are
/// snapped to it before taking the ceiling.
pub fn ceil_guarded(x: f64) -> i64 {
    let nearest = x.round();
    if (x - nearest).abs() <= CEIL_GUARD {
        nearest as i64
    } else {
        x.ceil() as i64
    }
}

/// The auxiliary barrier function
/// `f_h(x) = 4(x+h/2)*ceil((x+h/2)/h) - 2h(ceil(..)^2 - ceil(..) + 1)`.
///
/// Continuous, piecewise linear and strictly increasing on `(0, inf)`.
pub fn f_h(h: f64, x: f64) -> Result<f64> {
    if !(h > 0.0) || !(x > 0.0) {
        return Err(PottsError::Domain(format!(
            "f_h requires h > 0 and x > 0, got h={h}, x={x}"
        )));
    }
    let t = (x + h / 2.0) / h;
    let c = ceil_guarded(t) as f64;
    Ok(4.0 * (x + h / 2.0) * c - 2.0 * h * (c * c - c + 1.0))
}

/// Exact-rational version of [`f_h`].
pub fn f_h_exact(h: &Rational, x: &Rational) -> Result<Rational> {
    if !h.is_positive() || !x.is_positive() {
        return Err(PottsError::Domain(
            "f_h requires h > 0 and x > 0".to_string(),
        ));
    }
    let half_h = h / 2;
    let t = (x + &half_h) / h;
    let c = t.ceil();
    let four = Rational::from_integer(4);
    let two = Rational::from_integer(2);
    Ok(&four * (x + &half_h) * &c - &two * h * (&c * &c - &c + Rational::from_integer(1)))
}

/// The six coupling constants `J_ij` together with the derived gammas.
///
/// Couplings may carry exact rational values alongside their double
/// representation; when all six are exact, derived quantities (`ell_star`,
/// `Gamma_star`, assumption residuals) are computed in exact arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingParams {
    j: [[f64; 3]; 3],
    exact: Option<ExactCouplings>,
    gamma1: f64,
    gamma12: f64,
    gamma13: f64,
    gamma23: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExactCouplings {
    pub j11: Rational,
    pub j22: Rational,
    pub j33: Rational,
    pub j12: Rational,
    pub j13: Rational,
    pub j23: Rational,
}

impl ExactCouplings {
    pub fn gamma1(&self) -> Rational {
        &self.j11 - &self.j22
    }
    pub fn gamma12(&self) -> Rational {
        &self.j12 + &self.j22
    }
    pub fn gamma23(&self) -> Rational {
        &self.j23 + &self.j22
    }
}

impl CouplingParams {
    /// Build from the six couplings, validating positivity, `J11 > J22 = J33`
    /// and `J12 = J13`.
    pub fn new(j11: f64, j22: f64, j33: f64, j12: f64, j13: f64, j23: f64) -> Result<Self> {
        let vals = [j11, j22, j33, j12, j13, j23];
        if vals.iter().any(|v| !(*v > 0.0) || !v.is_finite()) {
            return Err(PottsError::InvalidCouplings(format!(
                "all J entries must be positive finite reals, got {vals:?}"
            )));
        }
        if j22 != j33 {
            return Err(PottsError::InvalidCouplings(format!(
                "J22 = J33 required, got J22={j22}, J33={j33}"
            )));
        }
        if j12 != j13 {
            return Err(PottsError::InvalidCouplings(format!(
                "J12 = J13 required, got J12={j12}, J13={j13}"
            )));
        }
        if !(j11 > j22) {
            return Err(PottsError::InvalidCouplings(format!(
                "J11 > J22 required, got J11={j11}, J22={j22}"
            )));
        }
        let mut j = [[0.0; 3]; 3];
        j[0][0] = j11;
        j[1][1] = j22;
        j[2][2] = j33;
        j[0][1] = j12;
        j[1][0] = j12;
        j[0][2] = j13;
        j[2][0] = j13;
        j[1][2] = j23;
        j[2][1] = j23;
        Ok(Self {
            j,
            exact: None,
            gamma1: j11 - j22,
            gamma12: j12 + j22,
            gamma13: j13 + j22,
            gamma23: j23 + j22,
        })
    }

    /// Build from exact rationals; the double fields are derived from them.
    pub fn new_exact(e: ExactCouplings) -> Result<Self> {
        let to_f = |r: &Rational| r.to_f64().unwrap();
        if e.j22 != e.j33 || e.j12 != e.j13 || e.j11 <= e.j22 {
            return Err(PottsError::InvalidCouplings(
                "exact couplings violate J11 > J22 = J33, J12 = J13".to_string(),
            ));
        }
        if [&e.j11, &e.j22, &e.j33, &e.j12, &e.j13, &e.j23]
            .iter()
            .any(|r| !r.is_positive())
        {
            return Err(PottsError::InvalidCouplings(
                "all exact J entries must be positive".to_string(),
            ));
        }
        let mut p = Self::new(
            to_f(&e.j11),
            to_f(&e.j22),
            to_f(&e.j33),
            to_f(&e.j12),
            to_f(&e.j13),
            to_f(&e.j23),
        )?;
        p.exact = Some(e);
        Ok(p)
    }

    /// Coupling between spins `a` and `b` (1-based spin values).
    #[inline]
    pub fn j(&self, a: u8, b: u8) -> f64 {
        self.j[(a - 1) as usize][(b - 1) as usize]
    }

    #[inline]
    pub fn gamma1(&self) -> f64 {
        self.gamma1
    }
    #[inline]
    pub fn gamma12(&self) -> f64 {
        self.gamma12
    }
    #[inline]
    pub fn gamma13(&self) -> f64 {
        self.gamma13
    }
    #[inline]
    pub fn gamma23(&self) -> f64 {
        self.gamma23
    }

    pub fn exact(&self) -> Option<&ExactCouplings> {
        self.exact.as_ref()
    }

    /// Interface cost `gamma_ij` for an unordered spin pair `{a,b}`, `a != b`.
    #[inline]
    pub fn gamma_pair(&self, a: u8, b: u8) -> f64 {
        match (a.min(b), a.max(b)) {
            (1, 2) => self.gamma12,
            (1, 3) => self.gamma13,
            (2, 3) => self.gamma23,
            _ => unreachable!("gamma_pair requires distinct spins"),
        }
    }
}

/// The critical length `ell_star` and energy barrier `Gamma_star`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedConstants {
    pub ell_star: u64,
    pub gamma_star: f64,
}

/// `ell_star = ceil((2*g12 + g1) / (2*g1))` and
/// `Gamma_star = f_{g1}(g12) = 4*ell*g12 - 2*g1*(ell^2 - 2*ell + 1)`.
///
/// Both closed forms of `Gamma_star` are evaluated and must agree; with exact
/// rational couplings the agreement is exact by construction.
pub fn derive_constants(params: &CouplingParams) -> Result<DerivedConstants> {
    if let Some(e) = params.exact() {
        let g1 = e.gamma1();
        let g12 = e.gamma12();
        let t = (&g12 * 2 + &g1) / (&g1 * 2);
        let ell_r = t.ceil();
        let ell = ell_r
            .to_integer()
            .to_u64()
            .ok_or_else(|| PottsError::InvalidCouplings("ell_star overflow".into()))?;
        let ell_i = Rational::from_integer(ell as i128);
        let form_fh = f_h_exact(&g1, &g12)?;
        let form_a = (&g12 + &g1 / 2) * &ell_i * 4
            - &g1 * 2 * (&ell_i * &ell_i - &ell_i + Rational::from_integer(1));
        let form_b =
            &g12 * &ell_i * 4 - &g1 * 2 * (&ell_i * &ell_i - &ell_i * 2 + Rational::from_integer(1));
        if form_fh != form_a || form_a != form_b {
            return Err(PottsError::InvalidCouplings(
                "closed forms of Gamma_star disagree in exact arithmetic".to_string(),
            ));
        }
        return Ok(DerivedConstants {
            ell_star: ell,
            gamma_star: form_fh.to_f64().unwrap(),
        });
    }

    let g1 = params.gamma1();
    let g12 = params.gamma12();
    let t = (2.0 * g12 + g1) / (2.0 * g1);
    let ell = ceil_guarded(t);
    if ell < 1 {
        return Err(PottsError::InvalidCouplings(format!(
            "derived ell_star = {ell} < 1"
        )));
    }
    let ell_f = ell as f64;
    let form_fh = f_h(g1, g12)?;
    let form_b = 4.0 * ell_f * g12 - 2.0 * g1 * (ell_f * ell_f - 2.0 * ell_f + 1.0);
    let scale = form_fh.abs().max(1.0);
    if (form_fh - form_b).abs() > 1e-12 * scale {
        return Err(PottsError::InvalidCouplings(format!(
            "closed forms of Gamma_star disagree: {form_fh} vs {form_b}"
        )));
    }
    Ok(DerivedConstants {
        ell_star: ell as u64,
        gamma_star: form_b,
    })
}

/// Diagnostic report for Assumptions A, B, C plus the lattice-size margin.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssumptionReport {
    /// True iff `(2*g12 + g1)/(2*g1)` is not within tolerance of an integer.
    pub cond_a: bool,
    /// The fractional value tested by condition A.
    pub cond_a_value: f64,
    /// True iff `|f_{g1}(g12) - 2(K+1)*g23|` is within relative tolerance.
    pub cond_b: bool,
    /// The residual `f_{g1}(g12) - 2(K+1)*g23`.
    pub cond_b_residual: f64,
    /// True iff `2*g12 - 4*g23 - g1 >= 0`.
    pub cond_c: bool,
    /// The slack `2*g12 - 4*g23 - g1`.
    pub cond_c_slack: f64,
    /// True iff `2*sqrt(KL - ell^2) - 2*ell >= 2*ell - 1` and `K >= 2*ell + 2`.
    ///
    /// This is the inequality the large-lattice arguments actually use; the
    /// threshold is a reading of "K, L sufficiently large", not a quoted bound.
    pub lattice_margin: bool,
    pub ell_star: u64,
    pub gamma_star: f64,
}

impl AssumptionReport {
    pub fn all_hold(&self) -> bool {
        self.cond_a && self.cond_b && self.cond_c && self.lattice_margin
    }
}

pub fn check_assumptions(
    params: &CouplingParams,
    lattice: &TorusLattice,
    tol: f64,
) -> Result<AssumptionReport> {
    let derived = derive_constants(params)?;
    let ell = derived.ell_star as f64;
    let k = lattice.rows() as f64;
    let l = lattice.cols() as f64;

    let (cond_a, cond_a_value, cond_b, cond_b_residual, cond_c, cond_c_slack) =
        if let Some(e) = params.exact() {
            let g1 = e.gamma1();
            let g12 = e.gamma12();
            let g23 = e.gamma23();
            let t = (&g12 * 2 + &g1) / (&g1 * 2);
            let residual = f_h_exact(&g1, &g12)?
                - &g23 * Rational::from_integer(2 * (lattice.rows() as i128 + 1));
            let slack = &g12 * 2 - &g23 * 4 - &g1;
            (
                !t.is_integer(),
                t.to_f64().unwrap(),
                residual.is_zero(),
                residual.to_f64().unwrap(),
                !slack.is_negative(),
                slack.to_f64().unwrap(),
            )
        } else {
            let g1 = params.gamma1();
            let g12 = params.gamma12();
            let g23 = params.gamma23();
            let value = (2.0 * g12 + g1) / (2.0 * g1);
            let dist = (value - value.round()).abs();
            let residual = f_h(g1, g12)? - 2.0 * (k + 1.0) * g23;
            let slack = 2.0 * g12 - 4.0 * g23 - g1;
            (
                dist > tol,
                value,
                residual.abs() <= tol * derived.gamma_star.abs().max(1.0),
                residual,
                slack >= 0.0,
                slack,
            )
        };

    let kl = k * l;
    let margin_sq = kl - ell * ell;
    let lattice_margin = margin_sq >= 0.0
        && 2.0 * margin_sq.sqrt() - 2.0 * ell >= 2.0 * ell - 1.0
        && k >= 2.0 * ell + 2.0;

    Ok(AssumptionReport {
        cond_a,
        cond_a_value,
        cond_b,
        cond_b_residual,
        cond_c,
        cond_c_slack,
        lattice_margin,
        ell_star: derived.ell_star,
        gamma_star: derived.gamma_star,
    })
}

/// Parse a coupling value from JSON: either a plain number (double) or a
/// string `"p/q"` / `"n"` holding an exact rational.
fn parse_value(v: &serde_json::Value, key: &str) -> Result<(f64, Option<Rational>)> {
    match v {
        serde_json::Value::Number(n) => {
            let f = n
                .as_f64()
                .ok_or_else(|| PottsError::InvalidCouplings(format!("J{key} not a number")))?;
            Ok((f, None))
        }
        serde_json::Value::String(s) => {
            let r = parse_rational(s).ok_or_else(|| {
                PottsError::InvalidCouplings(format!("J{key}: cannot parse rational '{s}'"))
            })?;
            Ok((r.to_f64().unwrap(), Some(r)))
        }
        _ => Err(PottsError::InvalidCouplings(format!(
            "J{key} must be a number or a 'p/q' string"
        ))),
    }
}

pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: i128 = p.trim().parse().ok()?;
        let q: i128 = q.trim().parse().ok()?;
        if q == 0 {
            return None;
        }
        Some(Rational::new(p, q))
    } else {
        let p: i128 = s.parse().ok()?;
        Some(Rational::from_integer(p))
    }
}

/// Parse the shared model document
/// `{"K":int,"L":int,"J":{"11":...,"22":...,"33":...,"12":...,"13":...,"23":...}}`
/// where coupling values are numbers or exact-rational strings `"p/q"`.
pub fn parse_model_json(doc: &serde_json::Value) -> Result<(TorusLattice, CouplingParams)> {
    let k = doc
        .get("K")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| PottsError::InvalidLattice("missing integer field K".into()))?;
    let l = doc
        .get("L")
        .and_then(|v| v.as_u64())
        .ok_or_else(|| PottsError::InvalidLattice("missing integer field L".into()))?;
    let lattice = TorusLattice::new(k as usize, l as usize)?;
    let j = doc
        .get("J")
        .ok_or_else(|| PottsError::InvalidCouplings("missing J block".into()))?;
    let mut floats = [0.0f64; 6];
    let mut exacts: Vec<Option<Rational>> = Vec::with_capacity(6);
    for (i, key) in ["11", "22", "33", "12", "13", "23"].iter().enumerate() {
        let v = j.get(*key).ok_or_else(|| {
            PottsError::InvalidCouplings(format!("missing coupling J{key}"))
        })?;
        let (f, r) = parse_value(v, key)?;
        floats[i] = f;
        exacts.push(r);
    }
    let params = if exacts.iter().all(|r| r.is_some()) {
        let mut it = exacts.into_iter().map(|r| r.unwrap());
        CouplingParams::new_exact(ExactCouplings {
            j11: it.next().unwrap(),
            j22: it.next().unwrap(),
            j33: it.next().unwrap(),
            j12: it.next().unwrap(),
            j13: it.next().unwrap(),
            j23: it.next().unwrap(),
        })?
    } else {
        CouplingParams::new(
            floats[0], floats[1], floats[2], floats[3], floats[4], floats[5],
        )?
    };
    Ok((lattice, params))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn f_h_at_half_h_is_two_h() {
        for h in [0.25, 0.5, 1.0, 2.0, 3.7] {
            assert_eq!(f_h(h, h / 2.0).unwrap(), 2.0 * h);
        }
    }

    #[test]
    fn f_h_spec_value() {
        // ceil(1.9) = 2, 4*1.9*2 - 2*3 = 9.2
        let v = f_h(1.0, 1.4).unwrap();
        assert!((v - 9.2).abs() < 1e-12);
    }

    #[test]
    fn f_h_rejects_nonpositive() {
        assert!(f_h(0.0, 1.0).is_err());
        assert!(f_h(1.0, -0.5).is_err());
    }

    #[test]
    fn derive_constants_spec_values() {
        // gamma1 = 1, gamma12 = 1.4 via J22 = 0.2
        let p = CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, 0.3).unwrap();
        let d = derive_constants(&p).unwrap();
        assert_eq!(d.ell_star, 2);
        assert!((d.gamma_star - 9.2).abs() < 1e-12);

        // gamma1 = 1, gamma12 = 0.6 -> ceil(1.1) = 2
        let p = CouplingParams::new(1.2, 0.2, 0.2, 0.4, 0.4, 0.3).unwrap();
        let d = derive_constants(&p).unwrap();
        assert_eq!(d.ell_star, 2);
    }

    #[test]
    fn gamma_star_equals_f_h_of_gammas() {
        for (j11, j22, j12, j23) in [
            (1.2, 0.2, 1.2, 0.3),
            (0.83, 0.31, 0.46, 0.29),
            (2.0, 0.5, 1.7, 0.4),
        ] {
            let p = CouplingParams::new(j11, j22, j22, j12, j12, j23).unwrap();
            let d = derive_constants(&p).unwrap();
            let via_fh = f_h(p.gamma1(), p.gamma12()).unwrap();
            assert!((d.gamma_star - via_fh).abs() <= 1e-12 * via_fh.abs().max(1.0));
        }
    }

    #[test]
    fn assumption_integer_case_fails_a() {
        // gamma1 = 1, gamma12 = 1.5 -> value 2.0 integral -> condition A false
        let p = CouplingParams::new(1.2, 0.2, 0.2, 1.3, 1.3, 0.3).unwrap();
        let lat = TorusLattice::new(10, 10).unwrap();
        let r = check_assumptions(&p, &lat, DEFAULT_ASSUMPTION_TOL).unwrap();
        assert!(!r.cond_a);
        assert!((r.cond_a_value - 2.0).abs() < 1e-12);
    }

    #[test]
    fn assumption_b_by_construction() {
        // gamma23 = f_1(1.4) / (2*(K+1)) with K = 10 -> residual 0
        let k = 10usize;
        let g23 = 9.2 / (2.0 * (k as f64 + 1.0));
        let p = CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, g23 - 0.2).unwrap();
        let lat = TorusLattice::new(k, k).unwrap();
        let r = check_assumptions(&p, &lat, DEFAULT_ASSUMPTION_TOL).unwrap();
        assert!(r.cond_a);
        assert!(r.cond_b, "residual {}", r.cond_b_residual);
        assert!(r.cond_c, "slack {}", r.cond_c_slack);
        assert!(r.lattice_margin);
    }

    #[test]
    fn smallest_k_satisfying_condition_c() {
        // With gamma23 = 9.2/(2(K+1)) the condition-C slack first turns
        // nonnegative at K = 10.
        let mut first = None;
        for k in 2..=20usize {
            let g23 = 9.2 / (2.0 * (k as f64 + 1.0));
            if g23 <= 0.2 {
                continue; // J23 must stay positive with J22 = 0.2
            }
            let p = CouplingParams::new(1.2, 0.2, 0.2, 1.2, 1.2, g23 - 0.2).unwrap();
            let lat = TorusLattice::new(k, k).unwrap();
            let r = check_assumptions(&p, &lat, DEFAULT_ASSUMPTION_TOL).unwrap();
            if r.cond_c && first.is_none() {
                first = Some(k);
            }
        }
        assert_eq!(first, Some(10));
    }

    #[test]
    fn exact_rational_roundtrip() {
        let doc: serde_json::Value = serde_json::from_str(
            r#"{"K":10,"L":10,"J":{"11":"6/5","22":"1/5","33":"1/5","12":"6/5","13":"6/5","23":"12/55"}}"#,
        )
        .unwrap();
        let (lat, params) = parse_model_json(&doc).unwrap();
        assert_eq!(lat.rows(), 10);
        assert!(params.exact().is_some());
        let d = derive_constants(&params).unwrap();
        assert_eq!(d.ell_star, 2);
        assert!((d.gamma_star - 9.2).abs() < 1e-12);
        let r = check_assumptions(&params, &lat, DEFAULT_ASSUMPTION_TOL).unwrap();
        assert!(r.all_hold());
        assert_eq!(r.cond_b_residual, 0.0);
    }
}
