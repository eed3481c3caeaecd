use std::f64::consts::PI;

use num_complex::Complex64;

use super::LinPropError;
use crate::scenario::{Geometry, Scenario};
use crate::specfun::BesselProfile;

/// `(4πit)^(−d/2)` on the principal branch.
pub fn schrodinger_prefactor(t: f64, dim: usize) -> Complex64 {
    let d = dim as f64;
    Complex64::from_polar((4.0 * PI * t.abs()).powf(-d / 2.0), -PI * d / 4.0 * t.signum())
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// The linear solution at the focusing time, reconstructed in closed form.
///
/// Point: `C α (4πit*)^(−d/2) e^(i|z|²/4t*) ρ^(−ν) K_ν(ρ)`, `z = x − x*`,
/// `ρ = |z|/(2|t*|)`, `ν = d/2 − m`. Line: the same with the Bessel factor in
/// the transverse variables (`ν = (d−1)/2 − m`) times `e^(−(x₁/2t*)²)`.
pub fn exact_at_tstar(sc: &Scenario, points: &[Vec<f64>]) -> Result<Vec<Complex64>, LinPropError> {
    let t = sc.t_star;
    let pre = schrodinger_prefactor(t, sc.dim) * sc.alpha;
    match &sc.geometry {
        Geometry::Point { center } => {
            let profile = BesselProfile::new(sc.dim, sc.m)?;
            points
                .iter()
                .map(|x| {
                    let z: Vec<f64> = x.iter().zip(center).map(|(a, c)| a - c).collect();
                    let r = norm(&z);
                    if r == 0.0 {
                        return Err(LinPropError::Singular(x.clone()));
                    }
                    let phase = Complex64::from_polar(1.0, r * r / (4.0 * t));
                    Ok(pre * phase * profile.transform(r / (2.0 * t.abs()))?)
                })
                .collect()
        }
        Geometry::Line => {
            let profile = BesselProfile::new(sc.dim - 1, sc.m)?;
            points
                .iter()
                .map(|x| {
                    let rbar = norm(&x[1..]);
                    if rbar == 0.0 {
                        return Err(LinPropError::Singular(x.clone()));
                    }
                    let r2 = x.iter().map(|v| v * v).sum::<f64>();
                    let phase = Complex64::from_polar(1.0, r2 / (4.0 * t));
                    let reg = (-(x[0] / (2.0 * t)).powi(2)).exp();
                    Ok(pre * phase * reg * profile.transform(rbar / (2.0 * t.abs()))?)
                })
                .collect()
        }
        Geometry::Sphere => Err(LinPropError::Geometry(
            "sphere data focuses through its radial reduction; use exact_v_at_tstar".into(),
        )),
    }
}

/// The one-dimensional radial solution `v(t*, r)` for the even datum `v₀`:
/// `α (4πit*)^(−1/2) e^(i(r²−1)/4t*) (F((r−1)/2t*) + F((r+1)/2t*))`.
pub fn exact_v_at_tstar(sc: &Scenario, radii: &[f64]) -> Result<Vec<Complex64>, LinPropError> {
    if !matches!(sc.geometry, Geometry::Sphere) {
        return Err(LinPropError::Geometry("radial solution needs sphere geometry".into()));
    }
    let t = sc.t_star;
    let profile = BesselProfile::new(1, sc.m)?;
    let pre = schrodinger_prefactor(t, 1) * sc.alpha;
    radii
        .iter()
        .map(|&r| {
            if (r.abs() - 1.0).abs() == 0.0 {
                return Err(LinPropError::Singular(vec![r]));
            }
            let phase = Complex64::from_polar(1.0, (r * r - 1.0) / (4.0 * t));
            let f = profile.transform((r - 1.0).abs() / (2.0 * t.abs()))? + profile.transform((r + 1.0).abs() / (2.0 * t.abs()))?;
            Ok(pre * phase * f)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn modulus_is_radial() {
        let sc = Scenario::new(2, 3.0, 0.5, 0.8, 1.0, 1.0, Geometry::Point { center: vec![0.3, 0.1] }, 1).unwrap();
        let pts: Vec<Vec<f64>> = (0..8)
            .map(|k| {
                let a = k as f64 * 0.7;
                vec![0.3 + 0.4 * a.cos(), 0.1 + 0.4 * a.sin()]
            })
            .collect();
        let v = exact_at_tstar(&sc, &pts).unwrap();
        assert!(v.iter().all(|z| (z.norm() - v[0].norm()).abs() < 1e-13 * v[0].norm()));
        assert!(exact_at_tstar(&sc, &[vec![0.3, 0.1]]).is_err());
    }

    #[test]
    fn prefactor_branch() {
        let p = schrodinger_prefactor(1.0, 2);
        assert!((p - Complex64::new(0.0, -1.0 / (4.0 * PI))).norm() < 1e-16);
        let q = schrodinger_prefactor(-1.0, 2);
        assert!((q - p.conj()).norm() < 1e-16);
    }
}
