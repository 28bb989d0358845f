//! Univalent maps with quasiconformal extension: closed-form families and
//! the first-order variational map.

use std::f64::consts::PI;

use log::warn;
use serde::{Deserialize, Serialize};

use crate::beltrami::BeltramiCoeff;
use crate::error::{Error, Result};
use crate::grunsky::{self, GrunskyNorm, VARIATION_SIGN};
use crate::quadrature::DiskQuadrature;
use crate::series::{LaurentSeries, Point, C64, DEFAULT_ORDER};

/// Quadrature error above which a first-order map is reported as unreliable.
const FIRST_ORDER_WARN: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `z + b0 + b1/z + …` on the exterior disk.
    Sigma,
    /// `z + a2 z² + …` on the unit disk.
    S,
}

/// Second normalization point of the extension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum FixedPoint {
    /// The extension fixes 0.
    #[default]
    #[serde(rename = "fix0")]
    Zero,
    /// The extension fixes 1.
    #[serde(rename = "fix1")]
    One,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnivalentMap {
    pub normalization: Normalization,
    pub series: LaurentSeries,
    /// Closed-form Beltrami coefficient of the extension to the
    /// complementary region (the unit disk for `Sigma`, its exterior for `S`).
    pub extension: Option<BeltramiCoeff>,
    pub family_tag: String,
    /// The series is accurate to first order in the dilatation only.
    #[serde(default)]
    pub first_order_only: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Family {
    Affine { b1: C64 },
    Koebe { t: C64 },
    PoweredKoebe { n: usize, t: C64 },
    MonomialExtension { n: i32, t: C64 },
}

impl Family {
    pub fn tag(&self) -> String {
        match self {
            Family::Affine { .. } => "affine".into(),
            Family::Koebe { .. } => "koebe".into(),
            Family::PoweredKoebe { n, .. } => format!("powered_koebe_{n}"),
            Family::MonomialExtension { n, .. } => format!("monomial_extension_{n}"),
        }
    }
}

fn check_unit(name: &str, v: C64) -> Result<()> {
    if v.norm() < 1.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("|{name}| = {} is not below 1", v.norm())))
    }
}

/// `z/(1 − tz)²` through local exponent `order`.
fn koebe_series(t: C64, order: i32) -> Result<LaurentSeries> {
    let one = C64::new(1.0, 0.0);
    let den = LaurentSeries::polynomial(Point::Origin, 0, vec![one, -t]).with_order(order);
    LaurentSeries::identity(Point::Origin)
        .with_order(order)
        .mul(&den.pow(-2.0)?)
}

/// `f_{1,t}(z^(n−1))^(1/(n−1))` through local exponent `order`.
fn powered_koebe_series(n: usize, t: C64, order: i32) -> Result<LaurentSeries> {
    let m = n as i32 - 1;
    let inner_order = m * (order + 1);
    let power = LaurentSeries::monomial(Point::Origin, m, C64::new(1.0, 0.0)).with_order(inner_order);
    let composed = koebe_series(t, inner_order)?.with_order(inner_order).compose(&power)?;
    Ok(composed.pow(1.0 / m as f64)?.truncated(order).with_order(order))
}

pub fn family_map(kind: &Family) -> Result<UnivalentMap> {
    family_map_with_order(kind, DEFAULT_ORDER)
}

/// Closed-form family member with its series known through `order` terms.
pub fn family_map_with_order(kind: &Family, order: i32) -> Result<UnivalentMap> {
    let tag = kind.tag();
    match *kind {
        Family::Affine { b1 } => {
            check_unit("b1", b1)?;
            let series = LaurentSeries::polynomial(Point::Infinity, -1, vec![b1, C64::default(), C64::new(1.0, 0.0)])
                .with_order(order);
            Ok(UnivalentMap {
                normalization: Normalization::Sigma,
                series,
                extension: Some(BeltramiCoeff::Constant { c: b1 }),
                family_tag: tag,
                first_order_only: false,
            })
        }
        Family::Koebe { t } => {
            check_unit("t", t)?;
            Ok(UnivalentMap {
                normalization: Normalization::S,
                series: koebe_series(t, order)?,
                extension: Some(BeltramiCoeff::Monomial { n: 2, t }),
                family_tag: tag,
                first_order_only: false,
            })
        }
        Family::PoweredKoebe { n, t } => {
            check_unit("t", t)?;
            if n < 2 {
                return Err(Error::Domain("powered Koebe maps need n ≥ 2".into()));
            }
            Ok(UnivalentMap {
                normalization: Normalization::S,
                series: powered_koebe_series(n, t, order)?,
                extension: Some(BeltramiCoeff::Monomial { n: n as i32, t }),
                family_tag: tag,
                first_order_only: false,
            })
        }
        Family::MonomialExtension { n, t } => {
            check_unit("t", t)?;
            if n < 0 {
                return Err(Error::Domain("monomial index must be nonnegative".into()));
            }
            let mu = BeltramiCoeff::Monomial { n, t };
            let quad = DiskQuadrature::new(32, 4 * (n as usize + 4));
            let fo = first_order_map(&mu, &quad, order.max(n + 2), FixedPoint::Zero)?;
            Ok(UnivalentMap {
                normalization: Normalization::Sigma,
                series: fo.series,
                extension: Some(mu),
                family_tag: tag,
                first_order_only: true,
            })
        }
    }
}

impl UnivalentMap {
    /// `a_n` (S-normalization) or `b_n` (Σ-normalization).
    pub fn taylor_coefficient(&self, n: i32) -> Result<C64> {
        match self.normalization {
            Normalization::S => self.series.coeff(n),
            Normalization::Sigma => self.series.coeff(-n),
        }
    }

    pub fn dilatation(&self) -> Option<f64> {
        self.extension.as_ref().map(|e| e.norm_inf())
    }

    /// Σ-normalized series: the map itself, or `1/f(1/z)` for S maps.
    pub fn exterior_series(&self) -> Result<LaurentSeries> {
        match self.normalization {
            Normalization::Sigma => Ok(self.series.clone()),
            Normalization::S => Ok(self.series.inverse()?.relabel(Point::Infinity)),
        }
    }

    /// Largest Grunsky truncation the stored series supports.
    pub fn max_grunsky_order(&self) -> Result<usize> {
        let s = self.exterior_series()?;
        Ok(match s.truncation() {
            Some(t) => ((1 - t) / 2).max(0) as usize,
            None => usize::MAX,
        })
    }

    pub fn grunsky_norm(&self, n: usize) -> Result<GrunskyNorm> {
        grunsky::grunsky_norm_of(&self.exterior_series()?, n)
    }
}

/// First-order map with the quadrature error of its coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct FirstOrderMap {
    pub series: LaurentSeries,
    pub error: f64,
}

/// `z + b0 + Σ b_k z^−k` with `b_k = (s/π) ∬_D μ w^(k−1)` for `1 ≤ k ≤ order`.
/// The constant term is `(s/π) ∬ μ/w` for maps fixing 0 and `(s/π) ∬ μ/(w − 1)`
/// for maps fixing 1.
pub fn first_order_map(mu: &BeltramiCoeff, quad: &DiskQuadrature, order: i32, fix: FixedPoint) -> Result<FirstOrderMap> {
    if order < 0 {
        return Err(Error::Domain("order must be nonnegative".into()));
    }
    let scale = VARIATION_SIGN / PI;
    let one = C64::new(1.0, 0.0);
    let (m, mut err) = if order > 0 {
        grunsky::moments(mu, order as usize - 1, quad)
    } else {
        (vec![], 0.0)
    };
    let b0 = match fix {
        FixedPoint::Zero => quad.integrate(|w| mu.eval(w) / w),
        FixedPoint::One => quad.refined_at(&[one]).integrate(|w| mu.eval(w) / (w - one)),
    };
    err = err.max(b0.error);
    // Coefficients of z^-order .. z^1.
    let mut coeffs: Vec<C64> = m.iter().rev().map(|v| v * scale).collect();
    coeffs.push(b0.value * scale);
    coeffs.push(one);
    let series = LaurentSeries::new(Point::Infinity, -order, coeffs).with_order(order);
    let error = err / PI;
    if error > FIRST_ORDER_WARN {
        warn!("first-order map: estimated quadrature error {error:e}");
    }
    Ok(FirstOrderMap { series, error })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn koebe_coefficients() {
        let t = C64::new(0.1, 0.05);
        let f = family_map_with_order(&Family::Koebe { t }, 20).unwrap();
        for n in 1..=20 {
            let expected = t.powi(n - 1) * n as f64;
            assert!((f.taylor_coefficient(n).unwrap() - expected).norm() < 1e-15);
        }
        assert!(f.taylor_coefficient(21).is_err());
    }

    #[test]
    fn powered_koebe_leading_terms() {
        let t = c(0.3);
        let f = family_map(&Family::PoweredKoebe { n: 4, t }).unwrap();
        assert!((f.taylor_coefficient(4).unwrap() - c(0.2)).norm() < 1e-15);
        for k in [2, 3, 5, 6] {
            assert_eq!(f.taylor_coefficient(k).unwrap(), C64::default());
        }
        assert_eq!(f.series.truncation(), Some(DEFAULT_ORDER));
    }

    #[test]
    fn parameters_out_of_range() {
        assert!(family_map(&Family::Affine { b1: c(1.0) }).is_err());
        assert!(family_map(&Family::PoweredKoebe { n: 1, t: c(0.1) }).is_err());
    }

    #[test]
    fn first_order_constant_matches_affine() {
        let quad = DiskQuadrature::new(16, 32);
        let eps = c(1e-3);
        let mu = BeltramiCoeff::Constant { c: eps };
        let f = first_order_map(&mu, &quad, 6, FixedPoint::Zero).unwrap().series;
        assert!((f.coeff(-1).unwrap() - eps).norm() < 1e-17);
        assert!(f.coeff(0).unwrap().norm() < 1e-17);
        let g = first_order_map(&mu, &quad, 6, FixedPoint::One).unwrap().series;
        // f(1) = 1 to first order
        assert!((g.coeff(0).unwrap() + eps).norm() < 1e-9);
    }

    #[test]
    fn monomial_extension_single_coefficient() {
        let t = C64::new(0.01, -0.02);
        let f = family_map_with_order(&Family::MonomialExtension { n: 3, t }, 10).unwrap();
        assert!(f.first_order_only);
        for k in 0..=10 {
            let expected = if k == 5 { t * 2.0 / 6.0 } else { C64::default() };
            assert!((f.taylor_coefficient(k).unwrap() - expected).norm() < 1e-15, "k = {k}");
        }
    }
}
