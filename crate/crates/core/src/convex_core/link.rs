use std::fmt;

use super::Point;
use crate::{Error, Result};

/// An injective map `g` from Ω into the generator's coordinates, with an
/// exact inverse on its image.
pub trait Link: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    fn apply(&self, p: &Point) -> Vec<f64>;

    /// `g⁻¹(y)`. Fails when `y` is outside the image of `g` or the pre-image
    /// is not a valid [`Point`].
    fn invert(&self, y: &[f64]) -> Result<Point>;
}

/// Elementwise, strictly monotone links on the positive reals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StdLink {
    Identity,
    Log,
    Sqrt,
    Square,
    Reciprocal,
    /// `x^r`, `r ≠ 0`.
    Power(f64),
}

impl StdLink {
    pub fn power(r: f64) -> Result<Self> {
        if r.is_finite() && r != 0.0 {
            Ok(Self::Power(r))
        } else {
            Err(Error::InvalidParameter(format!(
                "power link exponent must be finite and nonzero, got {r}"
            )))
        }
    }

    pub fn forward(self, x: f64) -> f64 {
        match self {
            Self::Identity => x,
            Self::Log => x.ln(),
            Self::Sqrt => x.sqrt(),
            Self::Square => x * x,
            Self::Reciprocal => x.recip(),
            Self::Power(r) => x.powf(r),
        }
    }

    pub fn inverse(self, y: f64) -> f64 {
        match self {
            Self::Identity => y,
            Self::Log => y.exp(),
            Self::Sqrt => y * y,
            Self::Square => y.sqrt(),
            Self::Reciprocal => y.recip(),
            Self::Power(r) => y.powf(r.recip()),
        }
    }

    /// Whether `y` is in `g((0, ∞))`.
    pub fn in_image(self, y: f64) -> bool {
        match self {
            Self::Log => y.is_finite(),
            _ => y.is_finite() && y > 0.0,
        }
    }
}

impl Link for StdLink {
    fn name(&self) -> String {
        match self {
            Self::Identity => "identity".into(),
            Self::Log => "ln".into(),
            Self::Sqrt => "sqrt".into(),
            Self::Square => "square".into(),
            Self::Reciprocal => "reciprocal".into(),
            Self::Power(r) => format!("pow[{r}]"),
        }
    }

    fn apply(&self, p: &Point) -> Vec<f64> {
        p.iter().map(|&x| self.forward(x)).collect()
    }

    fn invert(&self, y: &[f64]) -> Result<Point> {
        if let Some(&bad) = y.iter().find(|&&v| !self.in_image(v)) {
            return Err(Error::OutsideDomain {
                name: format!("{}⁻¹", self.name()),
                value: vec![bad],
            });
        }
        Point::new(y.iter().map(|&v| self.inverse(v)).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const ALL: [StdLink; 9] = [
        StdLink::Identity,
        StdLink::Log,
        StdLink::Sqrt,
        StdLink::Square,
        StdLink::Reciprocal,
        StdLink::Power(0.5),
        StdLink::Power(2.0),
        StdLink::Power(-1.0),
        StdLink::Power(3.0),
    ];

    #[test]
    fn round_trip() {
        let p = Point::new(vec![0.1, 0.9, 1.0, 3.7, 10.0]).unwrap();
        for link in ALL {
            let back = link.invert(&link.apply(&p)).unwrap();
            for (a, b) in back.iter().zip(p.iter()) {
                assert!((a - b).abs() <= 1e-12 * b, "{link:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn strictly_monotone() {
        let xs: Vec<f64> = (1..200).map(|i| f64::from(i) * 0.05).collect();
        for link in ALL {
            let ys: Vec<f64> = xs.iter().map(|&x| link.forward(x)).collect();
            let inc = ys.windows(2).all(|w| w[1] > w[0]);
            let dec = ys.windows(2).all(|w| w[1] < w[0]);
            assert!(inc || dec, "{link:?} not strictly monotone");
        }
    }

    #[test]
    fn invert_rejects_points_outside_image() {
        assert!(StdLink::Sqrt.invert(&[-0.5]).is_err());
        assert!(StdLink::Identity.invert(&[0.0]).is_err());
        assert!(StdLink::Reciprocal.invert(&[-2.0]).is_err());
        // ln has all of ℝ as image.
        assert!(StdLink::Log.invert(&[-30.0]).is_ok());
    }

    #[test]
    fn power_exponent_validated() {
        assert!(StdLink::power(0.0).is_err());
        assert!(StdLink::power(f64::INFINITY).is_err());
        assert_eq!(StdLink::power(0.5), Ok(StdLink::Power(0.5)));
    }
}
