//! Truncated Laurent series with complex coefficients.
//!
//! A series is expanded either about the origin (local variable `u = z`)
//! or about infinity (local variable `u = 1/z`). Internally every series is
//! stored in its local variable, so arithmetic is written once: a series is
//! known for local exponents `lo..=prec`, and `O(u^(prec+1))` is the
//! truncation error. Exact series (finite Laurent polynomials) carry no
//! truncation at all.
//!
//! Branches of `log` and fractional powers are anchored at the leading
//! coefficient and take its principal value.

mod compose;
mod transforms;

pub use transforms::SchwarzianResult;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Default working order for expansions of exact inputs.
pub const DEFAULT_ORDER: i32 = 48;

/// Exponent windows longer than this are rejected.
const MAX_TERMS: i64 = 1 << 20;

const INF: i64 = i64::MAX / 4;

/// Expansion point of a series.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Point {
    #[default]
    Origin,
    Infinity,
}

/// Operations accepted by [`algebra`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AlgebraOp {
    Add,
    Mul,
    Div,
    Log,
    Exp,
    Sqrt,
    Pow(f64),
}

/// Truncated Laurent series `Σ c_k z^k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SeriesJson", into = "SeriesJson")]
pub struct LaurentSeries {
    point: Point,
    /// Local exponent of `coeffs[0]`; equals the valuation when nonempty.
    lo: i32,
    coeffs: Vec<C64>,
    /// Highest known local exponent, `None` for exact series.
    prec: Option<i32>,
    /// Working order: expansions of exact inputs stop at this local exponent.
    order: i32,
}

impl LaurentSeries {
    fn from_local(point: Point, lo: i32, coeffs: Vec<C64>, prec: Option<i32>, order: i32) -> Self {
        let mut s = Self {
            point,
            lo,
            coeffs,
            prec,
            order,
        };
        s.normalize();
        s
    }

    fn normalize(&mut self) {
        if let Some(p) = self.prec {
            let keep = (p as i64 - self.lo as i64 + 1).max(0) as usize;
            self.coeffs.truncate(keep);
        }
        let lead = self.coeffs.iter().take_while(|c| **c == C64::new(0.0, 0.0)).count();
        if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i32;
        }
        if self.prec.is_none() {
            while self.coeffs.last() == Some(&C64::new(0.0, 0.0)) {
                self.coeffs.pop();
            }
            if self.coeffs.is_empty() {
                self.lo = 0;
            }
        }
    }

    /// Builds a truncated series from coefficients of ascending `z` exponents
    /// starting at `k_min`. At the origin the last coefficient is the
    /// truncation point; at infinity the first one is.
    pub fn new(point: Point, k_min: i32, coeffs: Vec<C64>) -> Self {
        let n = coeffs.len() as i32;
        match point {
            Point::Origin => {
                Self::from_local(point, k_min, coeffs, Some(k_min + n - 1), DEFAULT_ORDER)
            }
            Point::Infinity => {
                let k_max = k_min + n - 1;
                let mut local = coeffs;
                local.reverse();
                Self::from_local(point, -k_max, local, Some(-k_min), DEFAULT_ORDER)
            }
        }
    }

    /// Exact Laurent polynomial with coefficients of ascending `z` exponents.
    pub fn polynomial(point: Point, k_min: i32, coeffs: Vec<C64>) -> Self {
        let n = coeffs.len() as i32;
        match point {
            Point::Origin => Self::from_local(point, k_min, coeffs, None, DEFAULT_ORDER),
            Point::Infinity => {
                let mut local = coeffs;
                local.reverse();
                Self::from_local(point, -(k_min + n - 1), local, None, DEFAULT_ORDER)
            }
        }
    }

    /// Exact polynomial from real coefficients, ascending from `z^0`.
    pub fn real_polynomial(point: Point, coeffs: &[f64]) -> Self {
        Self::polynomial(point, 0, coeffs.iter().map(|&c| C64::new(c, 0.0)).collect())
    }

    pub fn monomial(point: Point, k: i32, c: C64) -> Self {
        Self::polynomial(point, k, vec![c])
    }

    pub fn identity(point: Point) -> Self {
        Self::monomial(point, 1, C64::new(1.0, 0.0))
    }

    pub fn constant(point: Point, c: C64) -> Self {
        Self::monomial(point, 0, c)
    }

    pub fn zero(point: Point) -> Self {
        Self::polynomial(point, 0, vec![])
    }

    /// Sets the working order, counted in powers of the local variable.
    pub fn with_order(mut self, order: i32) -> Self {
        self.order = order;
        self
    }

    /// Truncates a series (exact or not) after local exponent `prec`.
    pub fn truncated(&self, prec: i32) -> Self {
        let p = self.prec.map_or(prec, |q| q.min(prec));
        let mut coeffs = Vec::with_capacity((p - self.lo + 1).max(0) as usize);
        for l in self.lo..=p {
            coeffs.push(self.local(l).unwrap_or_default());
        }
        let lo = if coeffs.is_empty() { p + 1 } else { self.lo };
        Self::from_local(self.point, lo, coeffs, Some(p), self.order)
    }

    pub fn point(&self) -> Point {
        self.point
    }

    pub fn is_exact(&self) -> bool {
        self.prec.is_none()
    }

    pub fn order(&self) -> i32 {
        self.order
    }

    /// Lowest and highest `z` exponents of the stored window.
    pub fn k_min(&self) -> i32 {
        match self.point {
            Point::Origin => self.lo,
            Point::Infinity => -self.local_hi(),
        }
    }

    pub fn k_max(&self) -> i32 {
        match self.point {
            Point::Origin => self.local_hi(),
            Point::Infinity => -self.lo,
        }
    }

    /// The `z` exponent after which coefficients are unknown, if truncated.
    pub fn truncation(&self) -> Option<i32> {
        self.prec.map(|p| match self.point {
            Point::Origin => p,
            Point::Infinity => -p,
        })
    }

    fn local_hi(&self) -> i32 {
        match self.prec {
            Some(p) => p,
            None => self.lo + self.coeffs.len() as i32 - 1,
        }
    }

    fn prec_or_inf(&self) -> i64 {
        self.prec.map_or(INF, |p| p as i64)
    }

    /// Local coefficient, `None` when beyond the truncation.
    pub(crate) fn local(&self, l: i32) -> Option<C64> {
        if let Some(p) = self.prec {
            if l > p {
                return None;
            }
        }
        if l < self.lo {
            return Some(C64::default());
        }
        Some(self.coeffs.get((l - self.lo) as usize).copied().unwrap_or_default())
    }

    fn to_local(&self, k: i32) -> i32 {
        match self.point {
            Point::Origin => k,
            Point::Infinity => -k,
        }
    }

    /// Coefficient of `z^k`.
    pub fn coeff(&self, k: i32) -> Result<C64> {
        let l = self.to_local(k);
        self.local(l).ok_or(Error::Truncation {
            needed: k as i64,
            available: self.truncation().unwrap_or(k) as i64,
        })
    }

    /// Coefficients of the stored window in ascending `z` exponents.
    pub fn z_coeffs(&self) -> Vec<C64> {
        (self.k_min()..=self.k_max())
            .map(|k| self.coeff(k).unwrap_or_default())
            .collect()
    }

    /// Leading (lowest local exponent) coefficient, if any is known.
    pub fn leading(&self) -> Option<(i32, C64)> {
        self.coeffs
            .first()
            .map(|&c| (self.to_local(self.lo), c))
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Evaluates the known part of the series at `z`.
    pub fn eval(&self, z: C64) -> C64 {
        let u = match self.point {
            Point::Origin => z,
            Point::Infinity => z.inv(),
        };
        let mut acc = C64::default();
        for c in self.coeffs.iter().rev() {
            acc = acc * u + c;
        }
        acc * u.powi(self.lo)
    }

    fn check_point(&self, other: &Self) -> Result<()> {
        if self.point != other.point {
            return Err(Error::Domain(format!(
                "expansion points differ: {:?} vs {:?}",
                self.point, other.point
            )));
        }
        Ok(())
    }

    fn check_window(lo: i64, prec: i64) -> Result<()> {
        if prec != INF && prec - lo + 1 > MAX_TERMS {
            return Err(Error::Truncation {
                needed: prec - lo + 1,
                available: MAX_TERMS,
            });
        }
        Ok(())
    }

    pub fn scale(&self, c: C64) -> Self {
        let coeffs = self.coeffs.iter().map(|&a| a * c).collect();
        Self::from_local(self.point, self.lo, coeffs, self.prec, self.order)
    }

    pub fn neg(&self) -> Self {
        self.scale(C64::new(-1.0, 0.0))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_point(other)?;
        let order = self.order.min(other.order);
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            (a, b) => Some(a.unwrap_or(i32::MAX).min(b.unwrap_or(i32::MAX))),
        };
        let lo = self.lo.min(other.lo);
        let hi = match prec {
            Some(p) => p,
            None => self.local_hi().max(other.local_hi()),
        };
        let coeffs = (lo..=hi)
            .map(|l| self.local(l).unwrap_or_default() + other.local(l).unwrap_or_default())
            .collect();
        Ok(Self::from_local(self.point, lo, coeffs, prec, order))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check_point(other)?;
        let order = self.order.min(other.order);
        if (self.is_exact() && self.is_zero()) || (other.is_exact() && other.is_zero()) {
            return Ok(Self::zero(self.point).with_order(order));
        }
        let lo = self.lo as i64 + other.lo as i64;
        let prec = match (self.prec, other.prec) {
            (None, None) => None,
            _ => {
                let p = (self.prec_or_inf() + other.lo as i64)
                    .min(other.prec_or_inf() + self.lo as i64)
                    .min(order as i64);
                Some(p)
            }
        };
        let hi = match prec {
            Some(p) => p,
            None => self.local_hi() as i64 + other.local_hi() as i64,
        };
        Self::check_window(lo, hi)?;
        if hi < lo {
            let p = prec.expect("exact products are never empty-windowed") as i32;
            return Ok(Self::from_local(self.point, p + 1, vec![], Some(p), order));
        }
        let mut coeffs = vec![C64::default(); (hi - lo + 1) as usize];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == C64::default() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                let idx = i + j;
                if idx >= coeffs.len() {
                    break;
                }
                coeffs[idx] += a * b;
            }
        }
        Ok(Self::from_local(
            self.point,
            lo as i32,
            coeffs,
            prec.map(|p| p as i32),
            order,
        ))
    }

    /// Relative precision and target window for an expansion about the
    /// leading term: returns (valuation, leading coefficient, number of terms).
    fn expansion_window(&self, result_lo: i64) -> Result<(i32, C64, usize)> {
        let lead = *self
            .coeffs
            .first()
            .ok_or_else(|| Error::SingularInput("series has no known nonzero term".into()))?;
        let v = self.lo;
        let rel = match self.prec {
            Some(p) => (p - v) as i64,
            None => INF,
        };
        let prec = (result_lo + rel).min(self.order as i64);
        if prec < result_lo {
            return Err(Error::Truncation {
                needed: result_lo,
                available: self.order as i64,
            });
        }
        Self::check_window(result_lo, prec)?;
        Ok((v, lead, (prec - result_lo + 1) as usize))
    }

    /// Normalized tail `a_j = c_{v+j}/c_v` for `j < n`.
    fn unit_tail(&self, lead: C64, n: usize) -> Vec<C64> {
        (0..n)
            .map(|j| self.local(self.lo + j as i32).unwrap_or_default() / lead)
            .collect()
    }

    pub fn inverse(&self) -> Result<Self> {
        let lead = self.coeffs.first().copied().unwrap_or_default();
        if lead == C64::default() {
            return Err(Error::SingularInput("reciprocal of a series with zero leading term".into()));
        }
        if self.is_exact() && self.coeffs.len() == 1 {
            return Ok(Self::from_local(self.point, -self.lo, vec![lead.inv()], None, self.order));
        }
        let result_lo = -(self.lo as i64);
        let (_, lead, n) = self.expansion_window(result_lo)?;
        let a = self.unit_tail(lead, n);
        let mut g = vec![C64::default(); n];
        g[0] = C64::new(1.0, 0.0);
        for k in 1..n {
            let mut s = C64::default();
            for j in 1..=k {
                s += a[j] * g[k - j];
            }
            g[k] = -s;
        }
        let inv_lead = lead.inv();
        let coeffs = g.into_iter().map(|c| c * inv_lead).collect();
        let prec = result_lo as i32 + n as i32 - 1;
        Ok(Self::from_local(self.point, result_lo as i32, coeffs, Some(prec), self.order))
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        self.check_point(other)?;
        if other.coeffs.is_empty() {
            return Err(Error::SingularInput("division by a series with zero leading term".into()));
        }
        self.mul(&other.inverse()?)
    }

    /// `exp(f)`; `f` must have no negative local powers.
    pub fn exp(&self) -> Result<Self> {
        if !self.coeffs.is_empty() && self.lo < 0 {
            return Err(Error::Domain("exp of a series with a pole".into()));
        }
        let p = match self.prec {
            Some(p) => (p as i64).min(self.order as i64),
            None => self.order as i64,
        };
        if p < 0 {
            return Err(Error::Truncation { needed: 0, available: p });
        }
        let n = (p + 1) as usize;
        let h: Vec<C64> = (0..n).map(|l| self.local(l as i32).unwrap_or_default()).collect();
        let mut e = vec![C64::default(); n];
        e[0] = h[0].exp();
        for k in 1..n {
            let mut s = C64::default();
            for j in 1..=k {
                s += h[j] * (j as f64) * e[k - j];
            }
            e[k] = s / (k as f64);
        }
        Ok(Self::from_local(self.point, 0, e, Some(p as i32), self.order))
    }

    /// Principal logarithm; the series must start at local exponent zero.
    pub fn log(&self) -> Result<Self> {
        if self.coeffs.is_empty() || self.lo != 0 {
            return Err(Error::SingularInput(
                "log needs a nonzero constant leading term".into(),
            ));
        }
        let (_, lead, n) = self.expansion_window(0)?;
        let a = self.unit_tail(lead, n);
        let mut l = vec![C64::default(); n];
        l[0] = lead.ln();
        for k in 1..n {
            let mut s = a[k] * (k as f64);
            for j in 1..k {
                s -= l[j] * (j as f64) * a[k - j];
            }
            l[k] = s / (k as f64);
        }
        let prec = n as i32 - 1;
        Ok(Self::from_local(self.point, 0, l, Some(prec), self.order))
    }

    /// `f^r` with the branch fixed by the principal value of `c_v^r` at the
    /// leading coefficient. `r` times the leading exponent must be an integer.
    pub fn pow(&self, r: f64) -> Result<Self> {
        let lead = self.coeffs.first().copied().unwrap_or_default();
        if lead == C64::default() {
            return Err(Error::SingularInput("power of a series with zero leading term".into()));
        }
        let rv = r * self.lo as f64;
        if (rv - rv.round()).abs() > 1e-12 {
            return Err(Error::Domain(format!(
                "exponent {r} does not map leading power {} to an integer",
                self.lo
            )));
        }
        let result_lo = rv.round() as i64;
        let (_, lead, n) = self.expansion_window(result_lo)?;
        let a = self.unit_tail(lead, n);
        let mut b = vec![C64::default(); n];
        b[0] = C64::new(1.0, 0.0);
        for k in 1..n {
            let mut s = C64::default();
            for j in 1..=k {
                s += a[j] * b[k - j] * ((r + 1.0) * j as f64 - k as f64);
            }
            b[k] = s / (k as f64);
        }
        let lead_pow = principal_pow(lead, r);
        let coeffs = b.into_iter().map(|c| c * lead_pow).collect();
        let prec = result_lo as i32 + n as i32 - 1;
        Ok(Self::from_local(self.point, result_lo as i32, coeffs, Some(prec), self.order))
    }

    pub fn sqrt(&self) -> Result<Self> {
        self.pow(0.5)
    }

    /// Derivative with respect to `z` (not the local variable).
    pub fn derivative(&self) -> Self {
        let prec = self.prec.map(|p| match self.point {
            Point::Origin => p - 1,
            Point::Infinity => p + 1,
        });
        match self.point {
            Point::Origin => {
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * (self.lo + i as i32) as f64)
                    .collect();
                Self::from_local(self.point, self.lo - 1, coeffs, prec, self.order)
            }
            Point::Infinity => {
                let coeffs = self
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(i, c)| c * -((self.lo + i as i32) as f64))
                    .collect();
                Self::from_local(self.point, self.lo + 1, coeffs, prec, self.order)
            }
        }
    }

    /// Derivative in the local variable.
    pub(crate) fn local_derivative(&self) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * (self.lo + i as i32) as f64)
            .collect();
        Self::from_local(self.point, self.lo - 1, coeffs, self.prec.map(|p| p - 1), self.order)
    }

    /// Reinterprets the local coefficients at a different expansion point.
    pub fn relabel(&self, point: Point) -> Self {
        Self {
            point,
            ..self.clone()
        }
    }

    /// Maximum coefficient difference over the common known window.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.check_point(other)?;
        let lo = self.lo.min(other.lo);
        let hi = match (self.prec, other.prec) {
            (None, None) => self.local_hi().max(other.local_hi()),
            (a, b) => a.unwrap_or(i32::MAX).min(b.unwrap_or(i32::MAX)),
        };
        Ok((lo..=hi)
            .map(|l| (self.local(l).unwrap_or_default() - other.local(l).unwrap_or_default()).norm())
            .fold(0.0, f64::max))
    }
}

fn principal_pow(c: C64, r: f64) -> C64 {
    if c.im == 0.0 && c.re > 0.0 {
        C64::new(c.re.powf(r), 0.0)
    } else if r == 0.5 {
        c.sqrt()
    } else {
        c.powf(r)
    }
}

/// Dispatches one of the series operations by name.
pub fn algebra(op: AlgebraOp, f: &LaurentSeries, g: Option<&LaurentSeries>) -> Result<LaurentSeries> {
    let second = || g.ok_or_else(|| Error::Domain(format!("{op:?} needs two operands")));
    match op {
        AlgebraOp::Add => f.add(second()?),
        AlgebraOp::Mul => f.mul(second()?),
        AlgebraOp::Div => f.div(second()?),
        AlgebraOp::Log => f.log(),
        AlgebraOp::Exp => f.exp(),
        AlgebraOp::Sqrt => f.sqrt(),
        AlgebraOp::Pow(r) => f.pow(r),
    }
}

#[derive(Serialize, Deserialize)]
struct SeriesJson {
    k_min: i32,
    k_max: i32,
    coeffs: Vec<C64>,
    #[serde(default)]
    at: Point,
    #[serde(default)]
    exact: bool,
    #[serde(default)]
    order: Option<i32>,
}

impl From<LaurentSeries> for SeriesJson {
    fn from(s: LaurentSeries) -> Self {
        SeriesJson {
            k_min: s.k_min(),
            k_max: s.k_max(),
            coeffs: s.z_coeffs(),
            at: s.point,
            exact: s.is_exact(),
            order: Some(s.order),
        }
    }
}

impl TryFrom<SeriesJson> for LaurentSeries {
    type Error = Error;

    fn try_from(j: SeriesJson) -> Result<Self> {
        let expected = j.k_max as i64 - j.k_min as i64 + 1;
        if expected.max(0) != j.coeffs.len() as i64 {
            return Err(Error::Domain(format!(
                "window {}..={} needs {} coefficients, got {}",
                j.k_min,
                j.k_max,
                expected.max(0),
                j.coeffs.len()
            )));
        }
        let s = if j.exact {
            LaurentSeries::polynomial(j.at, j.k_min, j.coeffs)
        } else if j.coeffs.is_empty() {
            let p = match j.at {
                Point::Origin => j.k_max,
                Point::Infinity => -j.k_min,
            };
            LaurentSeries::from_local(j.at, p + 1, vec![], Some(p), DEFAULT_ORDER)
        } else {
            LaurentSeries::new(j.at, j.k_min, j.coeffs)
        };
        Ok(match j.order {
            Some(o) => s.with_order(o),
            None => s,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn product_of_binomials() {
        let a = LaurentSeries::real_polynomial(Point::Origin, &[1.0, 1.0]);
        let b = LaurentSeries::real_polynomial(Point::Origin, &[1.0, -1.0]);
        let p = a.mul(&b).unwrap();
        assert!(p.is_exact());
        assert_eq!(p.z_coeffs(), vec![c(1.0), c(0.0), c(-1.0)]);
    }

    #[test]
    fn log_mercator_at_infinity() {
        // log(1 - b/u) with u = z: -Σ b^k z^{-k} / k
        let b = C64::new(0.3, -0.2);
        let f = LaurentSeries::polynomial(Point::Infinity, -1, vec![-b, c(1.0)]).with_order(20);
        let l = f.log().unwrap();
        for k in 1..=20 {
            let expected = -b.powi(k) / k as f64;
            assert!((l.coeff(-k).unwrap() - expected).norm() < 1e-15);
        }
        assert!(l.coeff(-21).is_err());
    }

    #[test]
    fn sqrt_about_infinity_binomial() {
        let b0 = C64::new(0.4, 0.1);
        let f = LaurentSeries::polynomial(Point::Infinity, 0, vec![b0, c(0.0), c(1.0)]).with_order(9);
        let s = f.sqrt().unwrap();
        // z (1 + b0 z^-2)^{1/2}
        let mut binom = c(1.0);
        for j in 0..5 {
            let k = 1 - 2 * j;
            assert!((s.coeff(k).unwrap() - binom * b0.powi(j)).norm() < 1e-15);
            assert_eq!(s.coeff(k - 1).unwrap(), C64::default());
            binom *= (0.5 - j as f64) / (j as f64 + 1.0);
        }
        assert!((s.coeff(-1).unwrap() - b0 / 2.0).norm() < 1e-15);
        assert!((s.coeff(-3).unwrap() + b0 * b0 / 8.0).norm() < 1e-15);
    }

    #[test]
    fn singular_inputs_rejected() {
        let z = LaurentSeries::identity(Point::Origin);
        assert!(matches!(z.log(), Err(Error::SingularInput(_))));
        let zero = LaurentSeries::zero(Point::Origin);
        assert!(matches!(zero.inverse(), Err(Error::SingularInput(_))));
        assert!(matches!(z.div(&zero), Err(Error::SingularInput(_))));
        assert!(matches!(zero.sqrt(), Err(Error::SingularInput(_))));
        assert!(matches!(z.pow(0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn precision_propagates_as_minimum() {
        let a = LaurentSeries::new(Point::Origin, 0, vec![c(1.0); 6]);
        let b = LaurentSeries::new(Point::Origin, 1, vec![c(1.0); 3]);
        let p = a.mul(&b).unwrap();
        // a known through z^5, b = z + z^2 + z^3 + O(z^4)
        assert_eq!(p.truncation(), Some(3));
        let s = a.add(&b).unwrap();
        assert_eq!(s.truncation(), Some(3));
    }

    #[test]
    fn exp_log_roundtrip() {
        let f = LaurentSeries::new(
            Point::Origin,
            0,
            (0..25).map(|k| C64::new(1.0 / (k as f64 + 1.0), 0.1 * k as f64)).collect(),
        );
        let back = f.log().unwrap().exp().unwrap();
        assert!(back.max_abs_diff(&f).unwrap() < 1e-12);
    }

    #[test]
    fn derivative_at_infinity() {
        // d/dz (z + b/z) = 1 - b/z^2
        let f = LaurentSeries::polynomial(Point::Infinity, -1, vec![c(0.5), c(0.0), c(1.0)]);
        let d = f.derivative();
        assert_eq!(d.coeff(0).unwrap(), c(1.0));
        assert_eq!(d.coeff(-2).unwrap(), c(-0.5));
        assert_eq!(d.coeff(-1).unwrap(), c(0.0));
    }

    #[test]
    fn json_roundtrip_preserves_window() {
        let f = LaurentSeries::new(Point::Infinity, -4, vec![c(0.1), c(0.2), c(0.0), c(0.0), c(0.5), c(1.0)]);
        let text = serde_json::to_string(&f).unwrap();
        assert!(text.contains("\"k_min\":-4"));
        let back: LaurentSeries = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        let bad = r#"{"k_min":0,"k_max":3,"coeffs":[[1,0]]}"#;
        assert!(serde_json::from_str::<LaurentSeries>(bad).is_err());
    }
}
