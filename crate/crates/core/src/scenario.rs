//! Experiment parameters and the feasibility inequalities that must hold
//! before anything is simulated.

use std::fmt;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Tolerance used when deciding whether a floating `p` is an integer.
const INTEGER_TOL: f64 = 1e-12;
/// Tolerance for the admissible-pair identity.
const PAIR_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("invalid scenario: {0}")]
    Invalid(String),
    #[error("geometry {geometry} is not defined in dimension {dim}")]
    GeometryMismatch { geometry: &'static str, dim: usize },
}

/// Where the linear flow focuses at `t_star`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Geometry {
    /// Focus at a single point.
    Point { center: Vec<f64> },
    /// Focus along the first coordinate axis.
    Line,
    /// Focus on the unit sphere in three dimensions.
    Sphere,
}

impl Geometry {
    pub fn name(&self) -> &'static str {
        match self {
            Geometry::Point { .. } => "point",
            Geometry::Line => "line",
            Geometry::Sphere => "sphere",
        }
    }

    /// Dimension of the directions in which the data is singular.
    pub fn effective_dim(&self, dim: usize) -> usize {
        match self {
            Geometry::Point { .. } => dim,
            Geometry::Line => dim - 1,
            Geometry::Sphere => 1,
        }
    }
}

/// The full parameter set of one experiment. Construct through [`Scenario::new`]
/// or deserialization; both enforce the invariants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawScenario")]
pub struct Scenario {
    pub dim: usize,
    pub p: f64,
    pub s: f64,
    pub m: f64,
    pub alpha: f64,
    pub t_star: f64,
    pub geometry: Geometry,
    pub sign: i8,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    dim: usize,
    p: f64,
    s: f64,
    m: f64,
    alpha: f64,
    t_star: f64,
    geometry: Geometry,
    sign: i8,
}

impl TryFrom<RawScenario> for Scenario {
    type Error = ScenarioError;

    fn try_from(r: RawScenario) -> Result<Self, Self::Error> {
        Scenario::new(r.dim, r.p, r.s, r.m, r.alpha, r.t_star, r.geometry, r.sign)
    }
}

impl Scenario {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        dim: usize,
        p: f64,
        s: f64,
        m: f64,
        alpha: f64,
        t_star: f64,
        geometry: Geometry,
        sign: i8,
    ) -> Result<Self, ScenarioError> {
        let bad = |msg: String| Err(ScenarioError::Invalid(msg));
        if dim == 0 {
            return bad("dim must be at least 1".into());
        }
        if !(p.is_finite() && p > 1.0) {
            return bad(format!("p must be finite and > 1, got {p}"));
        }
        if !(s.is_finite() && s >= 0.0) {
            return bad(format!("s must be finite and >= 0, got {s}"));
        }
        if !m.is_finite() {
            return bad(format!("m must be finite, got {m}"));
        }
        if !alpha.is_finite() {
            return bad(format!("alpha must be finite, got {alpha}"));
        }
        if !t_star.is_finite() || t_star == 0.0 {
            return bad(format!("t_star must be finite and nonzero, got {t_star}"));
        }
        if sign != 1 && sign != -1 {
            return bad(format!("sign must be +1 or -1, got {sign}"));
        }
        match &geometry {
            Geometry::Point { center } => {
                if center.len() != dim {
                    return bad(format!("point center has {} coordinates, dim is {dim}", center.len()));
                }
                if center.iter().any(|c| !c.is_finite()) {
                    return bad("point center must be finite".into());
                }
            }
            Geometry::Line if dim < 2 => {
                return Err(ScenarioError::GeometryMismatch { geometry: "line", dim });
            }
            Geometry::Sphere if dim != 3 => {
                return Err(ScenarioError::GeometryMismatch { geometry: "sphere", dim });
            }
            _ => {}
        }
        Ok(Self { dim, p, s, m, alpha, t_star, geometry, sign })
    }

    /// Focus point for point geometry, the origin otherwise.
    pub fn center(&self) -> Vec<f64> {
        match &self.geometry {
            Geometry::Point { center } => center.clone(),
            _ => vec![0.0; self.dim],
        }
    }

    pub fn with_alpha(&self, alpha: f64) -> Self {
        Self { alpha, ..self.clone() }
    }

    pub fn with_t_star(&self, t_star: f64) -> Result<Self, ScenarioError> {
        Self::new(self.dim, self.p, self.s, self.m, self.alpha, t_star, self.geometry.clone(), self.sign)
    }
}

/// A half-open interval `(lower, upper]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MInterval {
    pub lower: f64,
    pub upper: f64,
}

impl MInterval {
    pub fn is_empty(&self) -> bool {
        !(self.lower < self.upper)
    }

    pub fn contains(&self, m: f64) -> bool {
        self.lower < m && m <= self.upper
    }
}

impl fmt::Display for MInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}]", self.lower, self.upper)
    }
}

/// One violated inequality: a stable machine name plus a readable detail.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub name: String,
    pub detail: String,
}

impl Violation {
    fn new(name: &str, detail: String) -> Self {
        Self { name: name.to_string(), detail }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.name, self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityVerdict {
    pub assumption_a_ok: bool,
    pub theorem_range_ok: bool,
    pub m_interval: MInterval,
    pub m_in_interval: bool,
    pub membership_ok: bool,
    pub reasons: Vec<Violation>,
}

impl FeasibilityVerdict {
    pub fn is_feasible(&self) -> bool {
        self.assumption_a_ok && self.theorem_range_ok && self.m_in_interval && self.membership_ok
    }

    /// Name of the first violated inequality, `"none"` when feasible.
    pub fn binding(&self) -> &str {
        self.reasons.first().map(|v| v.name.as_str()).unwrap_or("none")
    }
}

/// Whether `p` is one of 2, 4, 6, ...
pub fn is_even_integer(p: f64) -> bool {
    let r = p.round();
    (p - r).abs() < INTEGER_TOL && r >= 2.0 && (r as i64) % 2 == 0
}

/// Local well-posedness conditions on `(p, s)` in dimension `dim`.
pub fn check_assumption_a(dim: usize, p: f64, s: f64) -> (bool, Vec<Violation>) {
    let d = dim as f64;
    let mut reasons = Vec::new();
    if !(p > 1.0) {
        reasons.push(Violation::new("assumption_a.p", format!("p = {p} must exceed 1")));
    }
    if !(s >= 0.0) {
        reasons.push(Violation::new("assumption_a.s_nonnegative", format!("s = {s} must be >= 0")));
    }
    let lower = d / 2.0 - 2.0 / (p - 1.0);
    if !(s > lower) {
        reasons.push(Violation::new(
            "assumption_a.s_lower",
            format!("s = {s} must exceed d/2 - 2/(p-1) = {lower}"),
        ));
    }
    if !is_even_integer(p) || s >= 2.0 {
        if s >= d / 2.0 {
            let need = 1.0 + s.floor();
            if !(p > need) {
                reasons.push(Violation::new(
                    "assumption_a.p_above_floor_s",
                    format!("s >= d/2 requires p > 1 + floor(s) = {need}, got p = {p}"),
                ));
            }
        } else if s > 1.0 && (2.0..4.0).contains(&s) {
            if !(p > s - 1.0) {
                reasons.push(Violation::new(
                    "assumption_a.p_above_s_minus_1",
                    format!("2 <= s < 4 with s < d/2 requires p > s - 1 = {}, got p = {p}", s - 1.0),
                ));
            }
        } else if s > 1.0 && s >= 4.0 && !(p > s - 2.0) {
            reasons.push(Violation::new(
                "assumption_a.p_above_s_minus_2",
                format!("s >= 4 with s < d/2 requires p > s - 2 = {}, got p = {p}", s - 2.0),
            ));
        }
    }
    (reasons.is_empty(), reasons)
}

/// The admissible range of `m` for the given focusing geometry.
pub fn m_interval(dim: usize, p: f64, geometry: &Geometry) -> Result<MInterval, ScenarioError> {
    let d = dim as f64;
    match geometry {
        Geometry::Point { .. } if dim >= 2 => {
            Ok(MInterval { lower: (d / 2.0 - 1.0 / p).max(d / 4.0), upper: d / 2.0 })
        }
        Geometry::Line if dim >= 2 => Ok(MInterval {
            lower: (d / 2.0 - 1.0 / p - 0.25).max((d - 1.0) / 4.0),
            upper: (d - 1.0) / 2.0,
        }),
        Geometry::Sphere if dim == 3 => Ok(MInterval { lower: (1.0 - 1.0 / p).max(0.25), upper: 0.5 }),
        g => Err(ScenarioError::GeometryMismatch { geometry: g.name(), dim }),
    }
}

/// Whether the initial data lies in `H^s`.
pub fn membership_condition(dim: usize, s: f64, m: f64, geometry: &Geometry) -> bool {
    let d = dim as f64;
    match geometry {
        Geometry::Point { .. } => 2.0 * m > s + d / 2.0,
        Geometry::Line => 2.0 * m > s + (d - 1.0) / 2.0,
        Geometry::Sphere => 2.0 * m > s + 0.5 && (0.0..0.5).contains(&s),
    }
}

/// Strichartz admissibility `2/q + d/r = d/2`, `2 <= q, r <= inf`,
/// excluding the endpoint `(2, inf, 2)`. Infinite exponents are `f64::INFINITY`.
pub fn is_admissible_pair(q: f64, r: f64, dim: usize) -> bool {
    let d = dim as f64;
    if !(q >= 2.0 && r >= 2.0) {
        return false;
    }
    if q == 2.0 && r.is_infinite() && dim == 2 {
        return false;
    }
    (2.0 / q + d / r - d / 2.0).abs() <= PAIR_TOL
}

/// Every inequality the scenario must satisfy, with each violation named.
pub fn validate(sc: &Scenario) -> FeasibilityVerdict {
    let d = sc.dim as f64;
    let (assumption_a_ok, mut reasons) = check_assumption_a(sc.dim, sc.p, sc.s);

    let mut theorem_range_ok = true;
    let lo = d / 2.0 - 2.0 / sc.p;
    if !(sc.s > lo) {
        theorem_range_ok = false;
        reasons.push(Violation::new("theorem_range.s_lower", format!("s = {} must exceed d/2 - 2/p = {lo}", sc.s)));
    }
    if !(sc.s <= d / 2.0) {
        theorem_range_ok = false;
        reasons.push(Violation::new("theorem_range.s_upper", format!("s = {} must be <= d/2 = {}", sc.s, d / 2.0)));
    }
    match sc.geometry {
        Geometry::Line if !(sc.p < 4.0) => {
            theorem_range_ok = false;
            reasons.push(Violation::new("line_p_bound", format!("line blow-up requires 1 < p < 4, got p = {}", sc.p)));
        }
        Geometry::Sphere => {
            if !(sc.p < 2.0) {
                theorem_range_ok = false;
                reasons.push(Violation::new(
                    "sphere_p_bound",
                    format!("sphere blow-up requires 1 < p < 2, got p = {}", sc.p),
                ));
            }
            if !(sc.s > 0.0) {
                theorem_range_ok = false;
                reasons.push(Violation::new("theorem_range.s_positive", "sphere blow-up requires s > 0".into()));
            }
        }
        _ => {}
    }

    let interval = m_interval(sc.dim, sc.p, &sc.geometry).unwrap_or(MInterval { lower: f64::NAN, upper: f64::NAN });
    let m_in_interval = interval.contains(sc.m);
    if interval.is_empty() {
        reasons.push(Violation::new("m_interval.empty", format!("m-interval {interval} is empty")));
    } else if !m_in_interval {
        reasons.push(Violation::new("m_interval.outside", format!("m = {} not in {interval}", sc.m)));
    }

    let membership_ok = membership_condition(sc.dim, sc.s, sc.m, &sc.geometry);
    if !membership_ok {
        let d_eff = match sc.geometry {
            Geometry::Point { .. } => d / 2.0,
            Geometry::Line => (d - 1.0) / 2.0,
            Geometry::Sphere => 0.5,
        };
        if 2.0 * sc.m <= sc.s + d_eff {
            reasons.push(Violation::new(
                "membership",
                format!("2m = {} must exceed s + {d_eff} = {}", 2.0 * sc.m, sc.s + d_eff),
            ));
        }
        if matches!(sc.geometry, Geometry::Sphere) && !(0.0..0.5).contains(&sc.s) {
            reasons.push(Violation::new(
                "membership.radial_transfer",
                format!("radial transfer needs s in [0, 1/2), got s = {}", sc.s),
            ));
        }
    }

    FeasibilityVerdict { assumption_a_ok, theorem_range_ok, m_interval: interval, m_in_interval, membership_ok, reasons }
}

/// SHA-256 of the scenario's canonical JSON encoding, hex encoded.
pub fn scenario_hash(sc: &Scenario) -> String {
    let json = serde_json::to_string(sc).expect("scenario serializes");
    hex::encode(Sha256::digest(json.as_bytes()))
}
