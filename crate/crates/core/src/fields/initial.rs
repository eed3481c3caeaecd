use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::{ComplexField, FieldError, GridSpec};
use crate::parallel::Execution;
use crate::scenario::{validate, Geometry, Scenario};

/// An initial condition given as an analytic formula.
pub trait InitialDatum: Sync + Send {
    fn dim(&self) -> usize;
    fn eval(&self, x: &[f64]) -> Complex64;
}

fn chirp(r2: f64, t_star: f64) -> Complex64 {
    Complex64::from_polar(1.0, -r2 / (4.0 * t_star))
}

/// `α e^(−i|x−x*|²/4t*) (1+|x−x*|²)^(−m)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointData {
    pub alpha: f64,
    pub m: f64,
    pub t_star: f64,
    pub center: Vec<f64>,
}

impl PointData {
    pub fn from_scenario(sc: &Scenario) -> Result<Self, FieldError> {
        match &sc.geometry {
            Geometry::Point { center } => {
                Ok(Self { alpha: sc.alpha, m: sc.m, t_star: sc.t_star, center: center.clone() })
            }
            g => Err(FieldError::Geometry(format!("point data needs point geometry, got {}", g.name()))),
        }
    }
}

impl InitialDatum for PointData {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        chirp(r2, self.t_star) * (self.alpha * (1.0 + r2).powf(-self.m))
    }
}

/// `G(x₁) α e^(−i|x|²/4t*) (1+|x̄|²)^(−m)` with `G(z) = e^(−z²/4)/(2√π)`, the
/// inverse transform of `e^(−ζ²)`; focuses on the `x₁` axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LineData {
    pub dim: usize,
    pub alpha: f64,
    pub m: f64,
    pub t_star: f64,
}

impl LineData {
    pub fn from_scenario(sc: &Scenario) -> Result<Self, FieldError> {
        match sc.geometry {
            Geometry::Line => Ok(Self { dim: sc.dim, alpha: sc.alpha, m: sc.m, t_star: sc.t_star }),
            ref g => Err(FieldError::Geometry(format!("line data needs line geometry, got {}", g.name()))),
        }
    }

    pub fn regular_factor(x1: f64) -> f64 {
        (-x1 * x1 / 4.0).exp() / (2.0 * PI.sqrt())
    }
}

impl InitialDatum for LineData {
    fn dim(&self) -> usize {
        self.dim
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let bar2: f64 = x[1..].iter().map(|v| v * v).sum();
        let r2 = x[0] * x[0] + bar2;
        chirp(r2, self.t_star) * (self.alpha * Self::regular_factor(x[0]) * (1.0 + bar2).powf(-self.m))
    }
}

/// Symmetry class of the one-dimensional radial datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    /// `v₀` itself, even in `r`.
    #[default]
    Even,
    /// `sgn(r) v₀(|r|)`, the extension whose evolution is `r·u` for the
    /// three-dimensional radial problem.
    Odd,
}

/// One-dimensional radial datum
/// `α (e^(−i(r−1)²/4t*) + e^(−i(r+1)²/4t*)) (1+r²)^(−m)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct V0Data {
    pub alpha: f64,
    pub m: f64,
    pub t_star: f64,
    pub parity: Parity,
}

impl V0Data {
    pub fn from_scenario(sc: &Scenario, parity: Parity) -> Result<Self, FieldError> {
        match sc.geometry {
            Geometry::Sphere => Ok(Self { alpha: sc.alpha, m: sc.m, t_star: sc.t_star, parity }),
            ref g => Err(FieldError::Geometry(format!("radial data needs sphere geometry, got {}", g.name()))),
        }
    }

    /// The even profile at `r`.
    pub fn even(&self, r: f64) -> Complex64 {
        let amp = self.alpha * (1.0 + r * r).powf(-self.m);
        (chirp((r - 1.0) * (r - 1.0), self.t_star) + chirp((r + 1.0) * (r + 1.0), self.t_star)) * amp
    }
}

impl InitialDatum for V0Data {
    fn dim(&self) -> usize {
        1
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let v = self.even(x[0]);
        match self.parity {
            Parity::Even => v,
            Parity::Odd => v * x[0].signum() * f64::from(x[0] != 0.0),
        }
    }
}

/// `u₀(x) = v₀(|x|)/|x|` in three dimensions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereData {
    pub v0: V0Data,
}

impl SphereData {
    pub fn from_scenario(sc: &Scenario) -> Result<Self, FieldError> {
        Ok(Self { v0: V0Data::from_scenario(sc, Parity::Even)? })
    }
}

impl InitialDatum for SphereData {
    fn dim(&self) -> usize {
        3
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        self.v0.even(r) / r
    }
}

/// `e^(−|x−c|²)`, used as smooth reference data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianData {
    pub center: Vec<f64>,
}

impl GaussianData {
    pub fn centered(dim: usize) -> Self {
        Self { center: vec![0.0; dim] }
    }
}

impl InitialDatum for GaussianData {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn eval(&self, x: &[f64]) -> Complex64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c) * (a - c)).sum();
        Complex64::new((-r2).exp(), 0.0)
    }
}

/// Samples a datum on every grid node.
pub fn sample<D: InitialDatum + ?Sized>(datum: &D, grid: &GridSpec) -> Result<ComplexField, FieldError> {
    if datum.dim() != grid.dim {
        return Err(FieldError::InvalidGrid(format!("datum is {}-dimensional, grid is {}", datum.dim(), grid.dim)));
    }
    ComplexField::from_fn(grid.clone(), Execution::default(), |x| datum.eval(x))
}

fn require_feasible(sc: &Scenario) -> Result<(), FieldError> {
    let v = validate(sc);
    if v.is_feasible() {
        Ok(())
    } else {
        let reasons: Vec<String> = v.reasons.iter().map(|r| r.to_string()).collect();
        Err(FieldError::Infeasible(reasons.join("; ")))
    }
}

fn require_dim(sc: &Scenario, grid: &GridSpec, dim: usize) -> Result<(), FieldError> {
    if grid.dim != dim {
        return Err(FieldError::InvalidGrid(format!("scenario needs a {dim}-dimensional grid, got {}", grid.dim)));
    }
    if sc.dim != dim && dim != 1 {
        return Err(FieldError::InvalidGrid(format!("scenario dimension {} does not match {dim}", sc.dim)));
    }
    Ok(())
}

pub fn make_point_data(sc: &Scenario, grid: &GridSpec) -> Result<ComplexField, FieldError> {
    let datum = PointData::from_scenario(sc)?;
    require_dim(sc, grid, sc.dim)?;
    require_feasible(sc)?;
    sample(&datum, grid)
}

pub fn make_line_data(sc: &Scenario, grid: &GridSpec) -> Result<ComplexField, FieldError> {
    let datum = LineData::from_scenario(sc)?;
    require_dim(sc, grid, sc.dim)?;
    require_feasible(sc)?;
    sample(&datum, grid)
}

/// Samples `v₀(|x|)/|x|`; the grid must not have a node at the origin.
pub fn make_sphere_data(sc: &Scenario, grid: &GridSpec) -> Result<ComplexField, FieldError> {
    let datum = SphereData::from_scenario(sc)?;
    require_dim(sc, grid, 3)?;
    require_feasible(sc)?;
    let h = grid.spacing();
    let on_axis = |a: usize| {
        let k = (-grid.origin(a) / h).round();
        (0.0..grid.n() as f64).contains(&k) && (grid.origin(a) + k * h).abs() < 1e-12 * h
    };
    if (0..3).all(on_axis) {
        return Err(FieldError::Geometry("a grid node sits at the origin; use an offset grid".into()));
    }
    sample(&datum, grid)
}

/// Samples the even radial datum on a one-dimensional grid.
pub fn make_v0(sc: &Scenario, grid1d: &GridSpec) -> Result<ComplexField, FieldError> {
    let datum = V0Data::from_scenario(sc, Parity::Even)?;
    require_dim(sc, grid1d, 1)?;
    require_feasible(sc)?;
    sample(&datum, grid1d)
}
