use super::{LaurentSeries, Point, C64};
use crate::error::{Error, Result};

/// Schwarzian series plus a sampled sup of its hyperbolically weighted modulus.
#[derive(Clone, Debug)]
pub struct SchwarzianResult {
    pub series: LaurentSeries,
    /// Sup of `(|z|²−1)²|S(z)|` (exterior) or `(1−|z|²)²|S(z)|` (interior)
    /// over the sampling grid.
    pub b_norm: f64,
}

const GRID_RADII: usize = 40;
const GRID_ANGLES: usize = 64;

impl LaurentSeries {
    /// Checks `f(z) = z + b0 + b1/z + …` about infinity.
    pub fn check_hydrodynamic(&self) -> Result<()> {
        if self.point != Point::Infinity {
            return Err(Error::Domain("expected an expansion about infinity".into()));
        }
        match self.leading() {
            Some((1, c)) if (c - C64::new(1.0, 0.0)).norm() < 1e-12 => Ok(()),
            _ => Err(Error::Domain("series is not of the form z + b0 + b1/z + ...".into())),
        }
    }

    /// `f(z²) − c`, expanded about infinity with the working order doubled.
    fn squared_argument(&self, c: C64) -> Result<LaurentSeries> {
        self.check_hydrodynamic()?;
        let order = 2 * self.order + 1;
        let z2 = LaurentSeries::monomial(Point::Infinity, 2, C64::new(1.0, 0.0)).with_order(order);
        let g = self.clone().with_order(order).compose(&z2)?;
        g.sub(&LaurentSeries::constant(Point::Infinity, c))
    }

    /// Odd square-root transform `f(z²)^{1/2}`.
    pub fn r2_transform(&self) -> Result<LaurentSeries> {
        self.squared_argument(C64::default())?.sqrt()
    }

    /// Odd transform `(f(z²) − f0)^{1/2}`, where `f0` is the value of the
    /// extension at the origin.
    pub fn r20_transform(&self, f0: C64) -> Result<LaurentSeries> {
        self.squared_argument(f0)?.sqrt()
    }

    /// Schwarzian derivative `(f''/f')' − (f''/f')²/2`.
    pub fn schwarzian(&self) -> Result<SchwarzianResult> {
        let d1 = self.derivative();
        if d1.is_zero() {
            return Err(Error::SingularInput("derivative vanishes identically".into()));
        }
        let d2 = d1.derivative();
        let pre = d2.div(&d1)?;
        let series = pre.derivative().sub(&pre.mul(&pre)?.scale(C64::new(0.5, 0.0)))?;
        let b_norm = sampled_b_norm(&series);
        Ok(SchwarzianResult { series, b_norm })
    }
}

fn sampled_b_norm(s: &LaurentSeries) -> f64 {
    let mut best: f64 = 0.0;
    for i in 1..=GRID_RADII {
        let x = i as f64 / (GRID_RADII as f64 + 1.0);
        // Exterior radii run over (1, 5], interior ones over [0, 0.95).
        let (r, weight) = match s.point() {
            Point::Infinity => {
                let r = 1.0 + 4.0 * x;
                (r, (r * r - 1.0).powi(2))
            }
            Point::Origin => {
                let r = 0.95 * x;
                (r, (1.0 - r * r).powi(2))
            }
        };
        for j in 0..GRID_ANGLES {
            let z = C64::from_polar(r, std::f64::consts::TAU * j as f64 / GRID_ANGLES as f64);
            best = best.max(weight * s.eval(z).norm());
        }
    }
    best
}
