//! Rational quadratic differentials on the unit disk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{DiskQuadrature, Integral};
use crate::series::C64;

/// Two roots closer than this are treated as one pole.
const POLE_MERGE: f64 = 1e-7;

/// Rational density `num(z)/den(z)` with coefficients in ascending order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadDifferential {
    pub num: Vec<C64>,
    pub den: Vec<C64>,
    /// Distinct zeros of `den`; used for quadrature refinement and the
    /// integrability check.
    #[serde(default)]
    pub poles: Vec<C64>,
}

/// Real quadrature value with an error estimate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

fn horner(p: &[C64], z: C64) -> C64 {
    p.iter().rev().fold(C64::default(), |acc, c| acc * z + c)
}

fn trim(mut p: Vec<C64>) -> Vec<C64> {
    while p.len() > 1 && p.last() == Some(&C64::default()) {
        p.pop();
    }
    p
}

pub(crate) fn poly_mul(a: &[C64], b: &[C64]) -> Vec<C64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let mut out = vec![C64::default(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[C64], b: &[C64]) -> Vec<C64> {
    let mut out = vec![C64::default(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

/// Roots of a polynomial by Weierstrass (Durand–Kerner) iteration.
pub fn poly_roots(p: &[C64]) -> Vec<C64> {
    let p = trim(p.to_vec());
    let deg = p.len().saturating_sub(1);
    if deg == 0 {
        return vec![];
    }
    let lead = p[deg];
    let monic: Vec<C64> = p.iter().map(|c| c / lead).collect();
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let seed = C64::from_polar(0.9 * radius.min(2.0), 0.4);
    let mut roots: Vec<C64> = (0..deg).map(|k| seed.powu(k as u32 + 1)).collect();
    for _ in 0..2000 {
        let mut moved: f64 = 0.0;
        for i in 0..deg {
            let zi = roots[i];
            let mut denom = C64::new(1.0, 0.0);
            for (j, zj) in roots.iter().enumerate() {
                if i != j {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = C64::new(1e-12, 0.0);
            }
            let step = horner(&monic, zi) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-15 {
            break;
        }
    }
    roots
}

/// Multiplicity of `p` as a root, by repeated synthetic division.
fn multiplicity(poly: &[C64], p: C64) -> usize {
    let mut q = trim(poly.to_vec());
    let scale = q.iter().map(|c| c.norm()).fold(0.0, f64::max).max(1e-300);
    let mut m = 0;
    while q.len() > 1 {
        // q(z) = (z − p) s(z) + r
        let n = q.len() - 1;
        let mut s = vec![C64::default(); n];
        let mut acc = q[n];
        for k in (0..n).rev() {
            s[k] = acc;
            acc = q[k] + acc * p;
        }
        if acc.norm() > 1e-8 * scale * (1.0 + p.norm()).powi(n as i32) {
            break;
        }
        m += 1;
        q = s;
    }
    m
}

fn merge_poles(roots: Vec<C64>) -> Vec<C64> {
    let mut out: Vec<C64> = vec![];
    for r in roots {
        if let Some(q) = out.iter_mut().find(|q| (**q - r).norm() < POLE_MERGE) {
            *q = (*q + r) / 2.0;
        } else {
            out.push(r);
        }
    }
    for q in out.iter_mut() {
        if q.norm() < 1e-12 {
            *q = C64::default();
        }
    }
    out
}

impl QuadDifferential {
    /// Rational function with poles found from the denominator.
    pub fn rational(num: Vec<C64>, den: Vec<C64>) -> Result<Self> {
        let den = trim(den);
        if den.iter().all(|c| *c == C64::default()) {
            return Err(Error::Domain("zero denominator".into()));
        }
        let poles = merge_poles(poly_roots(&den));
        Ok(Self { num: trim(num), den, poles })
    }

    /// Rational function with known poles.
    pub fn with_poles(num: Vec<C64>, den: Vec<C64>, poles: Vec<C64>) -> Self {
        Self {
            num: trim(num),
            den: trim(den),
            poles,
        }
    }

    pub fn constant(c: C64) -> Self {
        Self::with_poles(vec![c], vec![C64::new(1.0, 0.0)], vec![])
    }

    pub fn zero() -> Self {
        Self::constant(C64::default())
    }

    /// `c·z^p` for any integer `p`.
    pub fn monomial(p: i32, c: C64) -> Self {
        let mut mono = vec![C64::default(); p.unsigned_abs() as usize + 1];
        *mono.last_mut().unwrap() = C64::new(1.0, 0.0);
        if p >= 0 {
            mono[p as usize] = c;
            Self::with_poles(mono, vec![C64::new(1.0, 0.0)], vec![])
        } else {
            Self::with_poles(vec![c], mono, vec![C64::default()])
        }
    }

    /// `c/(z − a)^(k+1)`.
    pub fn pole_power(a: C64, k: u32, c: C64) -> Self {
        let mut den = vec![C64::new(1.0, 0.0)];
        for _ in 0..=k {
            den = poly_mul(&den, &[-a, C64::new(1.0, 0.0)]);
        }
        Self::with_poles(vec![c], den, vec![a])
    }

    pub fn eval(&self, z: C64) -> C64 {
        horner(&self.num, z) / horner(&self.den, z)
    }

    pub fn is_zero(&self) -> bool {
        self.num.iter().all(|c| *c == C64::default())
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            num: self.num.iter().map(|x| x * c).collect(),
            ..self.clone()
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let (num, den) = if self.den == other.den {
            (poly_add(&self.num, &other.num), self.den.clone())
        } else {
            (
                poly_add(&poly_mul(&self.num, &other.den), &poly_mul(&other.num, &self.den)),
                poly_mul(&self.den, &other.den),
            )
        };
        let mut poles = self.poles.clone();
        for p in &other.poles {
            if !poles.iter().any(|q| (q - p).norm() < POLE_MERGE) {
                poles.push(*p);
            }
        }
        Self::with_poles(num, den, poles)
    }

    /// Order of the pole at a marked point (zero if it cancels).
    pub fn pole_order(&self, p: C64) -> usize {
        multiplicity(&self.den, p).saturating_sub(multiplicity(&self.num, p))
    }

    /// Marked poles in the closed disk with their orders.
    pub fn poles_in_disk(&self) -> Vec<(C64, usize)> {
        self.poles
            .iter()
            .filter(|p| p.norm() <= 1.0 + 1e-12)
            .map(|&p| (p, self.pole_order(p)))
            .filter(|(_, m)| *m > 0)
            .collect()
    }

    /// Fails unless every pole in the closed disk is simple.
    pub fn check_integrable(&self) -> Result<()> {
        for (p, m) in self.poles_in_disk() {
            if m > 1 {
                return Err(Error::NonIntegrable {
                    order: m,
                    location: format!("{} {:+}i", p.re, p.im),
                });
            }
        }
        Ok(())
    }

    /// Quadrature refined at the poles of this density.
    pub fn adapted(&self, quad: &DiskQuadrature) -> DiskQuadrature {
        quad.refined_at(&self.poles)
    }

    /// `∬_D |ψ| dx dy`.
    pub fn l1_norm(&self, quad: &DiskQuadrature) -> Result<Estimate> {
        self.check_integrable()?;
        let q = self.adapted(quad);
        let Integral { value, error, .. } = q.integrate_real(|z| self.eval(z).norm());
        Ok(Estimate { value: value.re, error })
    }

    /// `4ψ(z²)z²`, the pull-back under `z ↦ z²`.
    pub fn pullback_r2(&self) -> Self {
        let spread = |p: &[C64]| {
            let mut out = vec![C64::default(); 2 * p.len().max(1) - 1];
            for (i, c) in p.iter().enumerate() {
                out[2 * i] = *c;
            }
            out
        };
        let num = poly_mul(&spread(&self.num), &[C64::default(), C64::default(), C64::new(4.0, 0.0)]);
        let den = spread(&self.den);
        let mut poles = vec![];
        for p in &self.poles {
            let s = p.sqrt();
            poles.push(s);
            if s.norm() > 0.0 {
                poles.push(-s);
            }
        }
        Self::with_poles(num, den, poles)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn l1_norms_of_monomials() {
        let quad = DiskQuadrature::new(32, 64);
        let one = QuadDifferential::constant(C64::new(1.0, 0.0));
        assert!((one.l1_norm(&quad).unwrap().value - PI).abs() < 1e-13);
        for p in 1..5 {
            let psi = QuadDifferential::monomial(p, C64::new(1.0, 0.0));
            let v = psi.l1_norm(&quad).unwrap().value;
            assert!((v - 2.0 * PI / (p as f64 + 2.0)).abs() < 1e-13);
        }
        let inv = QuadDifferential::monomial(-1, C64::new(1.0, 0.0));
        assert!((inv.l1_norm(&quad).unwrap().value - 2.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn double_pole_is_not_integrable() {
        let quad = DiskQuadrature::new(8, 8);
        let psi = QuadDifferential::monomial(-2, C64::new(1.0, 0.0));
        assert!(matches!(psi.l1_norm(&quad), Err(Error::NonIntegrable { order: 2, .. })));
        let outside = QuadDifferential::pole_power(C64::new(2.0, 0.0), 3, C64::new(1.0, 0.0));
        assert!(outside.l1_norm(&quad).is_ok());
    }

    #[test]
    fn roots_and_cancellation() {
        let a = C64::new(0.5, 0.2);
        // (z − a)/((z − a)(z + 0.3)) has a removable point at a
        let num = vec![-a, C64::new(1.0, 0.0)];
        let den = poly_mul(&num, &[C64::new(0.3, 0.0), C64::new(1.0, 0.0)]);
        let psi = QuadDifferential::rational(num, den).unwrap();
        assert_eq!(psi.poles.len(), 2);
        assert_eq!(psi.pole_order(a), 0);
        assert_eq!(psi.pole_order(C64::new(-0.3, 0.0)), 1);
    }

    #[test]
    fn json_shape() {
        let psi = QuadDifferential::monomial(-1, C64::new(2.0, 0.0));
        let text = serde_json::to_string(&psi).unwrap();
        assert!(text.starts_with("{\"num\":[[2.0,0.0]],\"den\":"));
        let back: QuadDifferential = serde_json::from_str(&text).unwrap();
        assert_eq!(back, psi);
    }
}
