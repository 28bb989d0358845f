use super::{LaurentSeries, Point, C64};
use crate::error::{Error, Result};

impl LaurentSeries {
    /// Composition `f ∘ g`, expanded at the point of `g`.
    ///
    /// When the inner series maps the expansion point of `g` to that of `f`
    /// the usual truncated composition is used. Otherwise `f` must be an
    /// exact Laurent polynomial, which is then evaluated on `g`.
    pub fn compose(&self, g: &LaurentSeries) -> Result<LaurentSeries> {
        let order = self.order.min(g.order);
        let g = g.clone().with_order(order);
        // The value of f's local variable as a series in g's local variable.
        let h = match self.point {
            Point::Origin => g.clone(),
            Point::Infinity => {
                if g.is_zero() {
                    return Err(Error::Domain("inner series is zero near the expansion point".into()));
                }
                g.inverse()?
            }
        };
        let f = self.clone().with_order(order);
        if f.is_zero() {
            let p = match f.prec {
                Some(_) => -1,
                None => return Ok(LaurentSeries::zero(g.point).with_order(order)),
            };
            return Ok(LaurentSeries::from_local(g.point, p + 1, vec![], Some(p), order));
        }
        let vh = h.leading().map(|_| h.lo);
        match (vh, f.prec) {
            (Some(v), _) if v >= 1 => {
                let cap = match f.prec {
                    Some(p) => (v as i64 * (p as i64 + 1) - 1).min(order as i64) as i32,
                    None => order,
                };
                let h = if h.is_exact() { h } else { h.truncated(cap) };
                let hi = match f.prec {
                    Some(p) => p.min(cap.div_euclid(v).max(f.lo)),
                    None => f.local_hi().min(cap.div_euclid(v).max(f.lo)),
                };
                let out = horner(&f, &h, f.lo, hi)?;
                Ok(out.truncated(cap).relabel(g.point))
            }
            (_, None) => {
                if h.is_zero() && f.lo < 0 {
                    return Err(Error::SingularInput("negative power of a vanishing series".into()));
                }
                horner(&f, &h, f.lo, f.local_hi()).map(|s| s.relabel(g.point))
            }
            _ => Err(Error::Domain(
                "inner series does not map the expansion point to that of the outer series".into(),
            )),
        }
    }

    /// Compositional inverse about the same expansion point.
    pub fn revert(&self) -> Result<LaurentSeries> {
        match self.point {
            Point::Origin => {
                if !self.is_zero() && self.lo <= 0 {
                    return Err(Error::Domain("series must vanish at the origin".into()));
                }
                revert_origin(self)
            }
            Point::Infinity => {
                match self.leading() {
                    Some((1, _)) => {}
                    Some((k, _)) if k > 1 => {
                        return Err(Error::Domain("series has a pole of order above one at infinity".into()))
                    }
                    _ => return Err(Error::NonInvertible("vanishing linear coefficient".into())),
                }
                let phi = self.inverse()?.relabel(Point::Origin);
                let psi = revert_origin(&phi)?;
                Ok(psi.inverse()?.relabel(Point::Infinity))
            }
        }
    }
}

/// `h^lo · Σ_{l=lo}^{hi} f_l h^{l-lo}` by Horner's rule.
fn horner(f: &LaurentSeries, h: &LaurentSeries, lo: i32, hi: i32) -> Result<LaurentSeries> {
    let point = h.point;
    let order = f.order.min(h.order);
    let coef = |l: i32| LaurentSeries::constant(point, f.local(l).unwrap_or_default()).with_order(order);
    let mut acc = coef(hi);
    for l in (lo..hi).rev() {
        acc = acc.mul(h)?.add(&coef(l))?;
    }
    if lo != 0 {
        let base = if lo > 0 { h.clone() } else { h.inverse()? };
        for _ in 0..lo.unsigned_abs() {
            acc = acc.mul(&base)?;
        }
    }
    Ok(acc)
}

/// Newton iteration `g ← g − (f∘g − u)/(f'∘g)`, doubling the number of
/// correct terms per step.
fn revert_origin(f: &LaurentSeries) -> Result<LaurentSeries> {
    let c1 = f.local(1).unwrap_or_default();
    if f.is_zero() || f.lo != 1 || c1 == C64::default() {
        return Err(Error::NonInvertible("vanishing linear coefficient".into()));
    }
    let prec = f.prec.unwrap_or(f.order).min(f.order);
    let f = f.clone().with_order(prec);
    let df = f.local_derivative();
    let u = LaurentSeries::identity(Point::Origin).with_order(prec);
    let mut g = u.scale(c1.inv()).truncated(prec);
    let mut known = 1;
    while known < prec {
        let resid = f.compose(&g)?.sub(&u)?;
        let step = resid.div(&df.compose(&g)?)?;
        g = g.sub(&step)?.truncated(prec);
        known *= 2;
    }
    // One more pass to absorb rounding.
    let resid = f.compose(&g)?.sub(&u)?;
    let step = resid.div(&df.compose(&g)?)?;
    Ok(g.sub(&step)?.truncated(prec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn compose_polynomials_exactly() {
        let f = LaurentSeries::monomial(Point::Origin, 2, c(1.0));
        let g = LaurentSeries::real_polynomial(Point::Origin, &[1.0, 1.0]);
        let h = f.compose(&g).unwrap();
        assert!(h.is_exact());
        assert_eq!(h.z_coeffs(), vec![c(1.0), c(2.0), c(1.0)]);
    }

    #[test]
    fn compose_with_identity() {
        let f = LaurentSeries::new(Point::Infinity, -6, (0..8).map(|k| C64::new(k as f64, 1.0)).collect());
        let id = LaurentSeries::identity(Point::Infinity);
        let h = f.compose(&id).unwrap();
        assert!(h.max_abs_diff(&f).unwrap() < 1e-15);
        assert_eq!(h.truncation(), f.truncation());
    }

    #[test]
    fn revert_quadratic() {
        let a = C64::new(0.3, 0.2);
        let f = LaurentSeries::polynomial(Point::Origin, 1, vec![c(1.0), a]).with_order(12);
        let g = f.revert().unwrap();
        // Catalan numbers: g = Σ (-1)^{k} C_k a^k z^{k+1}
        let catalan = [1.0, 1.0, 2.0, 5.0, 14.0, 42.0, 132.0];
        for (k, ck) in catalan.iter().enumerate() {
            let expected = a.powi(k as i32) * ck * if k % 2 == 0 { 1.0 } else { -1.0 };
            assert!((g.coeff(k as i32 + 1).unwrap() - expected).norm() < 1e-13);
        }
        let back = f.compose(&g).unwrap();
        assert!(back.max_abs_diff(&LaurentSeries::identity(Point::Origin)).unwrap() < 1e-13);
    }

    #[test]
    fn revert_at_infinity() {
        let b1 = c(0.25);
        let f = LaurentSeries::polynomial(Point::Infinity, -1, vec![b1, c(0.0), c(1.0)]).with_order(15);
        let g = f.revert().unwrap();
        assert!((g.coeff(1).unwrap() - c(1.0)).norm() < 1e-14);
        assert!((g.coeff(-1).unwrap() + b1).norm() < 1e-14);
        let back = f.compose(&g).unwrap();
        assert!(back.max_abs_diff(&LaurentSeries::identity(Point::Infinity)).unwrap() < 1e-13);
    }

    #[test]
    fn revert_rejects_degenerate_input() {
        let f = LaurentSeries::monomial(Point::Origin, 2, c(1.0));
        assert!(matches!(f.revert(), Err(Error::NonInvertible(_))));
        let g = LaurentSeries::real_polynomial(Point::Origin, &[1.0, 1.0]);
        assert!(matches!(g.revert(), Err(Error::Domain(_))));
    }

    #[test]
    fn mixed_points_need_exact_outer() {
        let f = LaurentSeries::new(Point::Origin, 0, vec![c(1.0), c(1.0), c(1.0)]);
        let g = LaurentSeries::real_polynomial(Point::Origin, &[1.0, 1.0]);
        assert!(matches!(f.compose(&g), Err(Error::Domain(_))));
    }
}
