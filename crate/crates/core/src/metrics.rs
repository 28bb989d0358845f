//! Hyperbolic and Teichmüller distances and the Schwarz-type bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::C64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricKind {
    Hyperbolic,
    Teichmueller,
    CaratheodoryLower,
    Bound,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    pub value: f64,
    pub kind: MetricKind,
}

fn in_disk(name: &str, z: C64) -> Result<()> {
    if z.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {z} is not in the unit disk")))
    }
}

/// `tanh⁻¹ |(z1 − z2)/(1 − z̄1 z2)|`, curvature −4.
pub fn hyperbolic_distance(z1: C64, z2: C64) -> Result<f64> {
    in_disk("z1", z1)?;
    in_disk("z2", z2)?;
    let q = (z1 - z2) / (C64::new(1.0, 0.0) - z1.conj() * z2);
    Ok(q.norm().atanh())
}

/// `tanh⁻¹ k`.
pub fn teich_distance(k: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&k) {
        return Err(Error::Domain(format!("dilatation {k} outside [0, 1)")));
    }
    Ok(k.atanh())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GolusinBound {
    pub value: f64,
    /// `g0(t) = t^m (t + c)/(1 + c̄ t)`, attaining the bound on the ray through `c`.
    pub witness: C64,
}

fn check_golusin(m: u32, c: C64, t: C64) -> Result<()> {
    if m < 1 {
        return Err(Error::Domain("order m must be at least 1".into()));
    }
    if c == C64::default() {
        return Err(Error::Domain("leading coefficient c_m must be nonzero".into()));
    }
    if c.norm() > 1.0 {
        return Err(Error::Domain(format!("|c_m| = {} exceeds 1", c.norm())));
    }
    in_disk("t", t)
}

/// `|t|^m (|t| + |c|)/(1 + |c||t|)` for self-maps of the disk vanishing to
/// order `m` at 0 with `m`-th Taylor coefficient `c`.
pub fn golusin_bound(m: u32, c: C64, t: C64) -> Result<GolusinBound> {
    check_golusin(m, c, t)?;
    let (r, a) = (t.norm(), c.norm());
    let value = r.powi(m as i32) * (r + a) / (1.0 + a * r);
    let witness = t.powu(m) * (t + c) / (C64::new(1.0, 0.0) + c.conj() * t);
    Ok(GolusinBound { value, witness })
}

/// `tanh` of the Golusin bound.
pub fn growth_bound(m: u32, c: C64, t: C64) -> Result<f64> {
    Ok(golusin_bound(m, c, t)?.value.tanh())
}

/// `tanh⁻¹(tanh ρ / k)`, the distance in the ball of radius `k`.
pub fn ball_relation(rho: f64, k: f64) -> Result<f64> {
    if !(k > 0.0 && k <= 1.0) {
        return Err(Error::Domain(format!("radius {k} outside (0, 1]")));
    }
    if rho < 0.0 {
        return Err(Error::Domain("distance must be nonnegative".into()));
    }
    let s = rho.tanh() / k;
    if k == 1.0 {
        return Ok(rho);
    }
    if s >= 1.0 {
        return Err(Error::Domain(format!("tanh({rho}) is outside the ball of radius {k}")));
    }
    Ok(s.atanh())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_examples() {
        assert_eq!(hyperbolic_distance(C64::default(), C64::default()).unwrap(), 0.0);
        let r = 0.6;
        assert!((hyperbolic_distance(C64::default(), C64::new(r, 0.0)).unwrap() - r.atanh()).abs() < 1e-15);
        assert!(hyperbolic_distance(C64::new(1.0, 0.0), C64::default()).is_err());
        assert!((teich_distance(0.5).unwrap() - 0.549_306_144_334_054_8).abs() < 1e-15);
        assert!(teich_distance(1.0).is_err());
    }

    #[test]
    fn golusin_examples() {
        let b = golusin_bound(1, C64::new(0.5, 0.0), C64::new(0.5, 0.0)).unwrap();
        assert!((b.value - 0.4).abs() < 1e-15);
        assert!((b.witness.norm() - 0.4).abs() < 1e-15);
        let t = C64::from_polar(0.7, 1.1);
        let unit = golusin_bound(3, C64::from_polar(1.0, 0.3), t).unwrap();
        assert!((unit.value - 0.7f64.powi(3)).abs() < 1e-15);
        assert!(golusin_bound(2, C64::default(), t).is_err());
        assert_eq!(growth_bound(2, C64::new(0.3, 0.0), C64::default()).unwrap(), 0.0);
    }

    #[test]
    fn ball_examples() {
        assert_eq!(ball_relation(0.0, 0.5).unwrap(), 0.0);
        assert!((ball_relation(0.25f64.atanh(), 0.5).unwrap() - 0.5f64.atanh()).abs() < 1e-15);
        assert_eq!(ball_relation(0.8, 1.0).unwrap(), 0.8);
        assert!(ball_relation(0.6f64.atanh(), 0.5).is_err());
    }
}
