//! Extremal problems: first-order bounds for holomorphic functionals,
//! L1 distances to spans of rational kernels, and the coefficient problem.

use std::f64::consts::PI;

use log::warn;
use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::beltrami::{teichmueller_form, BeltramiCoeff};
use crate::error::{Error, Result};
use crate::qcmap::{family_map, Family, FixedPoint, UnivalentMap};
use crate::quaddiff::{Estimate, QuadDifferential};
use crate::quadrature::DiskQuadrature;
use crate::series::C64;

mod l1;

pub use l1::{l1_distance_to_span, L1Options, L1Result, SpanBasis, DEFAULT_TOLERANCE};

/// Derivative `∂J/∂ω` of a functional with respect to `f^(k)(z)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointTerm {
    pub z: C64,
    /// Derivative order `k`.
    #[serde(default)]
    pub order: u32,
    pub gradient: C64,
}

/// Holomorphic functional `J(f(a), f^(k)(z_j))` described by its gradient.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionalSpec {
    /// Interior evaluation point with its gradient.
    #[serde(default)]
    pub a: Option<C64>,
    #[serde(default)]
    pub grad_a: C64,
    /// Evaluations at points of the exterior disk.
    #[serde(default)]
    pub points: Vec<PointTerm>,
    /// Bound for `|J|` over the class, needed for `kappa0`.
    #[serde(default)]
    pub sup_bound: Option<f64>,
    #[serde(default)]
    pub normalization: FixedPoint,
}

impl FunctionalSpec {
    /// `J(f) = f(a)`.
    pub fn point_evaluation(a: C64, normalization: FixedPoint) -> Self {
        Self {
            a: Some(a),
            grad_a: C64::new(1.0, 0.0),
            points: vec![],
            sup_bound: None,
            normalization,
        }
    }
}

/// `1/(w − ζ)` minus its value at the normalization point.
fn kernel(zeta: C64, fix: FixedPoint, c: C64) -> QuadDifferential {
    let one = C64::new(1.0, 0.0);
    let direct = QuadDifferential::pole_power(zeta, 0, c);
    let fixed = match fix {
        FixedPoint::Zero => QuadDifferential::monomial(-1, -c),
        FixedPoint::One => QuadDifferential::pole_power(one, 0, -c),
    };
    direct.add(&fixed)
}

/// Density `ψ0` representing the derivative of a functional.
pub fn functional_derivative(spec: &FunctionalSpec) -> Result<QuadDifferential> {
    let mut psi = QuadDifferential::zero();
    if let Some(a) = spec.a {
        if (a.norm() - 1.0).abs() < 1e-12 {
            return Err(Error::Domain(format!("evaluation point {a} lies on the unit circle")));
        }
        if a.norm() > 1.0 {
            return Err(Error::Domain(format!("evaluation point {a} is outside the unit disk")));
        }
        if spec.grad_a != C64::default() {
            psi = psi.add(&kernel(a, spec.normalization, spec.grad_a));
        }
    }
    for term in &spec.points {
        if term.z.norm() <= 1.0 + 1e-12 {
            return Err(Error::Domain(format!("point {} is not in the exterior disk", term.z)));
        }
        if term.gradient == C64::default() {
            continue;
        }
        let d = if term.order == 0 {
            kernel(term.z, spec.normalization, term.gradient)
        } else {
            let fact: f64 = (1..=term.order).map(f64::from).product();
            QuadDifferential::pole_power(term.z, term.order, term.gradient * fact)
        };
        psi = psi.add(&d);
    }
    let probe = [C64::new(0.31, 0.17), C64::new(-0.42, 0.23), C64::new(0.05, -0.61)];
    if psi.is_zero() || probe.iter().all(|&z| psi.eval(z).norm() < 1e-14) {
        return Err(Error::Domain("functional has zero gradient".into()));
    }
    Ok(psi)
}

#[derive(Clone, Debug)]
pub struct DistortionBound {
    /// `(κ/π) ‖ψ0‖₁`.
    pub bound: f64,
    pub psi0: QuadDifferential,
    pub l1: Estimate,
    /// `κ|ψ0|/ψ0`.
    pub extremal: BeltramiCoeff,
}

/// First-order bound `|J(f) − J(id)| ≲ (κ/π) ‖ψ0‖₁` over maps with dilatation `κ`.
pub fn distortion_bound(spec: &FunctionalSpec, kappa: f64, quad: &DiskQuadrature) -> Result<DistortionBound> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::Domain(format!("dilatation {kappa} outside [0, 1)")));
    }
    let psi0 = functional_derivative(spec)?;
    let l1 = psi0.l1_norm(quad)?;
    if let Some(m) = spec.sup_bound {
        let k0 = kappa0_from(l1.value / PI, m)?;
        if kappa > k0 {
            warn!("dilatation {kappa} exceeds the range {k0} of the first-order estimate");
        }
    }
    Ok(DistortionBound {
        bound: kappa / PI * l1.value,
        extremal: teichmueller_form(&psi0, kappa)?,
        psi0,
        l1,
    })
}

/// `‖J'‖/(‖J'‖ + M + 1)`.
pub fn kappa0_from(derivative_norm: f64, sup_bound: f64) -> Result<f64> {
    if !(derivative_norm >= 0.0 && sup_bound >= 0.0) {
        return Err(Error::Domain("norms must be nonnegative".into()));
    }
    Ok(derivative_norm / (derivative_norm + sup_bound + 1.0))
}

/// Range of dilatations covered by the first-order estimate, with
/// `‖J'‖ = ‖ψ0‖₁/π`.
pub fn kappa0(spec: &FunctionalSpec, quad: &DiskQuadrature) -> Result<f64> {
    let m = spec
        .sup_bound
        .ok_or_else(|| Error::MissingData("sup bound M of the functional".into()))?;
    let psi0 = functional_derivative(spec)?;
    kappa0_from(psi0.l1_norm(quad)?.value / PI, m)
}

#[derive(Clone, Debug)]
pub struct CoefficientExtremal {
    /// `2κ/(n − 1)`, or `2κ` for `n = 2`.
    pub bound: f64,
    pub extremal: UnivalentMap,
    /// Dilatations for which the bound is established.
    pub valid_range: f64,
}

/// Sharp bound for `|a_n|` over maps with dilatation `κ`, with its extremal map.
pub fn coefficient_extremal(n: usize, kappa: f64) -> Result<CoefficientExtremal> {
    if n < 2 {
        return Err(Error::Domain("coefficient index must be at least 2".into()));
    }
    if !(kappa > 0.0 && kappa < 1.0) {
        return Err(Error::Domain(format!("dilatation {kappa} outside (0, 1)")));
    }
    let t = C64::new(kappa, 0.0);
    let (family, valid_range) = if n == 2 {
        (Family::Koebe { t }, 1.0)
    } else {
        (Family::PoweredKoebe { n, t }, 1.0 / (n * n + 1) as f64)
    };
    if n > 2 && kappa > valid_range {
        warn!("dilatation {kappa} exceeds the established range {valid_range} for a_{n}");
    }
    Ok(CoefficientExtremal {
        bound: 2.0 * kappa / (n - 1) as f64,
        extremal: family_map(&family)?,
        valid_range,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KappaNBounds {
    /// `1/(n² + 1)`.
    pub lower: f64,
    /// `(2/(n(n − 1)))^(1/(n − 2))`.
    pub upper: f64,
    /// `2κ/(n − 1)` at `κ = lower`.
    pub coefficient_bound: f64,
    /// `n κ^(n−1)` at `κ = lower`.
    pub koebe_coefficient: f64,
}

impl KappaNBounds {
    pub fn ordered(&self) -> bool {
        self.lower < self.upper && self.coefficient_bound > self.koebe_coefficient
    }
}

/// Bracket for the largest dilatation at which the powered Koebe map is extremal.
pub fn kappa_n_bounds(n: usize) -> Result<KappaNBounds> {
    if n < 3 {
        return Err(Error::Domain("bracket defined for n ≥ 3".into()));
    }
    let nf = n as f64;
    let lower = 1.0 / (nf * nf + 1.0);
    Ok(KappaNBounds {
        lower,
        upper: (2.0 / (nf * (nf - 1.0))).powf(1.0 / (nf - 2.0)),
        coefficient_bound: 2.0 * lower / (nf - 1.0),
        koebe_coefficient: nf * lower.powi(n as i32 - 1),
    })
}

/// Coefficient problem with prescribed fixed points.
#[derive(Clone, Debug)]
pub struct ConstrainedCoefficient {
    /// Finite-part value of `inf ∬ |z^(−n−1) + Σ ξ_s ρ_s|`; may be negative.
    pub d: f64,
    /// First-order bound `κ d/π`.
    pub bound: f64,
    pub solution: L1Result,
    /// The divergent part at the origin was removed.
    pub regularized: bool,
}

/// Finite part of `∬_D |z|^(−n−1)`.
fn finite_part(n: usize) -> f64 {
    if n == 1 {
        0.0
    } else {
        2.0 * PI / (1.0 - n as f64)
    }
}

fn check_independent(basis: &SpanBasis, quad: &DiskQuadrature) -> Result<()> {
    let q = quad.refined_at(&basis.poles());
    let values: Vec<Vec<C64>> = basis
        .functions()
        .iter()
        .map(|f| q.nodes().iter().map(|&z| f.eval(z)).collect())
        .collect();
    let s = values.len();
    let gram = DMatrix::from_fn(s, s, |i, j| {
        q.weights()
            .iter()
            .zip(values[i].iter().zip(&values[j]))
            .map(|(w, (a, b))| a.conj() * b * *w)
            .sum::<C64>()
    });
    let sv = gram.singular_values();
    let (lo, hi) = (sv.min(), sv.max());
    if !(lo > 1e-12 * hi) {
        return Err(Error::Domain("span basis is numerically dependent".into()));
    }
    Ok(())
}

/// `|a_n| ≲ κ d_n/π` over maps fixing the points `e_s`, with the pole of
/// `z^(−n−1)` at the origin handled by its finite part.
pub fn coefficient_extremal_constrained(
    n: usize,
    basis: &SpanBasis,
    kappa: f64,
    quad: &DiskQuadrature,
    opts: &L1Options,
) -> Result<ConstrainedCoefficient> {
    if n < 1 {
        return Err(Error::Domain("coefficient index must be at least 1".into()));
    }
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::Domain(format!("dilatation {kappa} outside [0, 1)")));
    }
    if basis.is_empty() {
        return Err(Error::NonIntegrable {
            order: n + 1,
            location: "0".into(),
        });
    }
    if basis.fixed_points.iter().any(|e| e.norm() < 1e-12) {
        return Err(Error::Domain("fixed point at the origin".into()));
    }
    check_independent(basis, quad)?;
    let psi_n = QuadDifferential::monomial(-(n as i32) - 1, C64::new(1.0, 0.0));
    let q = quad.refined_at(&basis.poles());
    let p = l1::Problem::new(&q, |z| psi_n.eval(z), &basis.functions(), Some(finite_part(n)));
    let solution = l1::solve(&p, &psi_n, basis, opts, 0.0);
    let pc = l1::Problem::new(&q.companion(), |z| psi_n.eval(z), &basis.functions(), Some(finite_part(n)));
    let x = l1::flatten(&solution.coeffs);
    let error = (pc.value(&x) - p.value(&x)).abs();
    let d = solution.d;
    Ok(ConstrainedCoefficient {
        d,
        bound: kappa * d / PI,
        solution: L1Result { error, ..solution },
        regularized: true,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn point_evaluation_kernel() {
        let a = c(0.3, 0.1);
        let psi = functional_derivative(&FunctionalSpec::point_evaluation(a, FixedPoint::Zero)).unwrap();
        let w = c(-0.2, 0.5);
        assert!((psi.eval(w) - (1.0 / (w - a) - 1.0 / w)).norm() < 1e-14);
        let psi1 = functional_derivative(&FunctionalSpec::point_evaluation(a, FixedPoint::One)).unwrap();
        assert!((psi1.eval(w) - (1.0 / (w - a) - 1.0 / (w - 1.0))).norm() < 1e-14);
    }

    #[test]
    fn functional_errors() {
        let spec = FunctionalSpec::point_evaluation(c(0.0, 1.0), FixedPoint::Zero);
        assert!(functional_derivative(&spec).is_err());
        assert!(functional_derivative(&FunctionalSpec::point_evaluation(c(0.0, 0.0), FixedPoint::Zero)).is_err());
        let inner = FunctionalSpec {
            a: None,
            grad_a: C64::default(),
            points: vec![PointTerm {
                z: c(0.5, 0.0),
                order: 1,
                gradient: c(1.0, 0.0),
            }],
            sup_bound: None,
            normalization: FixedPoint::Zero,
        };
        assert!(functional_derivative(&inner).is_err());
        assert!(matches!(
            kappa0(&FunctionalSpec::point_evaluation(c(0.5, 0.0), FixedPoint::Zero), &DiskQuadrature::new(8, 16)),
            Err(Error::MissingData(_))
        ));
    }

    #[test]
    fn derivative_terms() {
        let z = c(2.0, 0.5);
        let spec = FunctionalSpec {
            a: None,
            grad_a: C64::default(),
            points: vec![PointTerm {
                z,
                order: 2,
                gradient: c(0.0, 1.0),
            }],
            sup_bound: None,
            normalization: FixedPoint::Zero,
        };
        let psi = functional_derivative(&spec).unwrap();
        let w = c(0.1, 0.2);
        assert!((psi.eval(w) - c(0.0, 2.0) / (w - z).powi(3)).norm() < 1e-14);
    }

    #[test]
    fn kappa0_closed_form() {
        assert_eq!(kappa0_from(2.0, 1.0).unwrap(), 0.5);
    }

    #[test]
    fn coefficient_table() {
        for n in 3..=8 {
            let e = coefficient_extremal(n, 0.1).unwrap();
            let a = e.extremal.taylor_coefficient(n as i32).unwrap();
            assert!((a.norm() - e.bound).abs() < 1e-12);
        }
        let e = coefficient_extremal(2, 0.6).unwrap();
        assert_eq!(e.valid_range, 1.0);
        assert!((e.extremal.taylor_coefficient(2).unwrap().re - 1.2).abs() < 1e-15);
    }

    #[test]
    fn kappa_brackets() {
        for n in 3..=50 {
            assert!(kappa_n_bounds(n).unwrap().ordered(), "n = {n}");
        }
        assert!(kappa_n_bounds(2).is_err());
    }

    #[test]
    fn constrained_domain_errors() {
        let quad = DiskQuadrature::new(8, 16);
        let opts = L1Options::default();
        let empty = SpanBasis::new(vec![]).unwrap();
        assert!(matches!(
            coefficient_extremal_constrained(3, &empty, 0.1, &quad, &opts),
            Err(Error::NonIntegrable { order: 4, .. })
        ));
        let zero = SpanBasis::new(vec![C64::default()]).unwrap();
        assert!(matches!(
            coefficient_extremal_constrained(3, &zero, 0.1, &quad, &opts),
            Err(Error::Domain(_))
        ));
    }
}
