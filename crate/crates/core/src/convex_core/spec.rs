use std::sync::Arc;

use super::{check_domain, Generator, Link, Point};
use crate::{Error, Result};

/// A generator paired with a link; the data behind every g-divergence.
#[derive(Debug, Clone)]
pub struct GDivergenceSpec {
    generator: Arc<dyn Generator>,
    link: Arc<dyn Link>,
    family_index: Option<f64>,
}

impl GDivergenceSpec {
    pub fn new(generator: Arc<dyn Generator>, link: Arc<dyn Link>) -> Self {
        Self {
            generator,
            link,
            family_index: None,
        }
    }

    /// Tag the spec with the index of a parametric family (`a ∉ {0, 1}`).
    pub fn with_family_index(mut self, index: f64) -> Result<Self> {
        if !index.is_finite() || index == 0.0 || index == 1.0 {
            return Err(Error::InvalidParameter(format!(
                "family index must be finite and outside {{0, 1}}, got {index}"
            )));
        }
        self.family_index = Some(index);
        Ok(self)
    }

    pub fn generator(&self) -> &Arc<dyn Generator> {
        &self.generator
    }

    pub fn link(&self) -> &Arc<dyn Link> {
        &self.link
    }

    pub fn family_index(&self) -> Option<f64> {
        self.family_index
    }

    /// `g(p)`, checked against the generator's domain.
    pub fn linked(&self, p: &Point) -> Result<Vec<f64>> {
        let y = self.link.apply(p);
        check_domain(self.generator.as_ref(), &y)?;
        Ok(y)
    }

    /// `(F*, ĝ)`: the spec whose divergence swaps the arguments of this one.
    pub fn dual(&self) -> Result<GDivergenceSpec> {
        let link = dual_link(self)?;
        let generator = link.conjugate.clone();
        Ok(GDivergenceSpec {
            generator,
            link: Arc::new(link),
            family_index: self.family_index,
        })
    }
}

/// `ĝ = ∇F ∘ g` with inverse `g⁻¹ ∘ ∇F*`.
#[derive(Debug, Clone)]
pub struct DualLink {
    generator: Arc<dyn Generator>,
    conjugate: Arc<dyn Generator>,
    link: Arc<dyn Link>,
}

impl DualLink {
    pub fn base_generator(&self) -> &Arc<dyn Generator> {
        &self.generator
    }

    pub fn base_link(&self) -> &Arc<dyn Link> {
        &self.link
    }
}

impl Link for DualLink {
    fn name(&self) -> String {
        format!("grad[{}]∘{}", self.generator.name(), self.link.name())
    }

    fn apply(&self, p: &Point) -> Vec<f64> {
        self.generator.grad(&self.link.apply(p))
    }

    fn invert(&self, y: &[f64]) -> Result<Point> {
        check_domain(self.conjugate.as_ref(), y)?;
        self.link.invert(&self.conjugate.grad(y))
    }
}

/// Build `ĝ` for a spec whose generator has a registered conjugate.
pub fn dual_link(spec: &GDivergenceSpec) -> Result<DualLink> {
    let conjugate = spec.generator.conjugate().ok_or_else(|| {
        Error::Unsupported(format!(
            "generator {} has no registered conjugate",
            spec.generator.name()
        ))
    })?;
    Ok(DualLink {
        generator: spec.generator.clone(),
        conjugate,
        link: spec.link.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_core::{LinearCombination, Potential, Separable, StdLink};

    fn spec(pot: Potential, link: StdLink) -> GDivergenceSpec {
        GDivergenceSpec::new(Arc::new(Separable::new(pot).unwrap()), Arc::new(link))
    }

    fn pt(v: &[f64]) -> Point {
        Point::new(v.to_vec()).unwrap()
    }

    #[test]
    fn squared_identity_dual_link_doubles() {
        let d = dual_link(&spec(Potential::Squared, StdLink::Identity)).unwrap();
        assert_eq!(d.apply(&pt(&[1.5, 4.0])), vec![3.0, 8.0]);
        assert_eq!(d.invert(&[3.0, 8.0]).unwrap(), pt(&[1.5, 4.0]));
    }

    #[test]
    fn neg_entropy_identity_dual_link_is_log_plus_one() {
        let d = dual_link(&spec(Potential::NegEntropy, StdLink::Identity)).unwrap();
        let p = pt(&[0.5, 2.0, 7.0]);
        for (y, x) in d.apply(&p).iter().zip(p.iter()) {
            assert!((y - (x.ln() + 1.0)).abs() < 1e-15);
        }
    }

    #[test]
    fn exp_log_dual_link_collapses_to_identity() {
        let d = dual_link(&spec(Potential::Exp, StdLink::Log)).unwrap();
        let p = pt(&[0.3, 1.0, 9.0]);
        for (y, x) in d.apply(&p).iter().zip(p.iter()) {
            assert!((y - x).abs() <= 1e-15 * x);
        }
    }

    #[test]
    fn dual_link_round_trip_for_catalog_pairs() {
        let pairs = [
            (Potential::NegEntropy, StdLink::Identity),
            (Potential::Exp, StdLink::Log),
            (Potential::Power(0.5), StdLink::Power(0.5)),
            (Potential::Power(-1.0), StdLink::Power(-1.0)),
            (Potential::Squared, StdLink::Sqrt),
            (Potential::NegSqrt, StdLink::Square),
            (Potential::Inverse, StdLink::Reciprocal),
        ];
        let p = pt(&[0.1, 0.5, 1.0, 3.0, 10.0]);
        for (pot, link) in pairs {
            let d = dual_link(&spec(pot, link)).unwrap();
            let back = d.invert(&d.apply(&p)).unwrap();
            for (a, b) in back.iter().zip(p.iter()) {
                assert!((a - b).abs() <= 1e-9 * b, "{pot:?}/{link:?}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn dual_link_requires_conjugate() {
        let g: Arc<dyn Generator> = Arc::new(Separable::new(Potential::Squared).unwrap());
        let comb = LinearCombination::new(vec![(1.0, g)]).unwrap();
        let s = GDivergenceSpec::new(Arc::new(comb), Arc::new(StdLink::Identity));
        assert!(matches!(dual_link(&s), Err(Error::Unsupported(_))));
        assert!(s.dual().is_err());
    }

    #[test]
    fn family_index_validation() {
        let s = spec(Potential::Squared, StdLink::Identity);
        assert!(s.clone().with_family_index(0.0).is_err());
        assert!(s.clone().with_family_index(1.0).is_err());
        assert_eq!(s.with_family_index(0.5).unwrap().family_index(), Some(0.5));
    }

    #[test]
    fn linked_checks_generator_domain() {
        // ln maps (0, 1) to negatives, outside neg-entropy's domain.
        let s = spec(Potential::NegEntropy, StdLink::Log);
        assert!(s.linked(&pt(&[0.5])).is_err());
        assert!(s.linked(&pt(&[2.0])).is_ok());
    }
}
