use super::{check_domain, Generator, Link, Point};
use crate::numeric::dot;
use crate::{Error, Result};

/// Maximum relative deviation between `∇F(x)` and central differences with
/// step `step` along each coordinate axis.
pub fn grad_check(gen: &dyn Generator, x: &[f64], step: f64) -> Result<f64> {
    if !(step.is_finite() && step > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step must be positive, got {step}"
        )));
    }
    check_domain(gen, x)?;
    let grad = gen.grad(x);
    let mut worst = 0.0f64;
    let mut probe = x.to_vec();
    for (i, &g) in grad.iter().enumerate() {
        probe[i] = x[i] + step;
        check_domain(gen, &probe)?;
        let hi = gen.eval(&probe);
        probe[i] = x[i] - step;
        check_domain(gen, &probe)?;
        let lo = gen.eval(&probe);
        probe[i] = x[i];
        let fd = (hi - lo) / (2.0 * step);
        worst = worst.max((fd - g).abs() / (g.abs() + 1e-300));
    }
    Ok(worst)
}

/// Gradient mismatch measured against the gradient's sup norm,
/// `max_i |D_i F(x) - ∂_i F(x)| / (max_i |∂_i F(x)| + 1e-300)`, with `D_i`
/// the fourth-order five-point central difference.
///
/// Unlike [`grad_check`] this stays meaningful when a single partial
/// derivative vanishes. Steps start at `1e-3 max(|x_i|, 0.01)` and are halved
/// until every probe lies in the domain.
pub fn gradient_mismatch(gen: &dyn Generator, x: &[f64]) -> Result<f64> {
    check_domain(gen, x)?;
    let grad = gen.grad(x);
    let norm = grad.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let mut probe = x.to_vec();
    let mut worst = 0.0f64;
    for i in 0..x.len() {
        let mut h = 1e-3 * x[i].abs().max(1e-2);
        let mut values = None;
        for _ in 0..40 {
            let mut f = [0.0; 4];
            let mut inside = true;
            for (slot, k) in f.iter_mut().zip([2.0, 1.0, -1.0, -2.0]) {
                probe[i] = x[i] + k * h;
                if !gen.in_domain(&probe) {
                    inside = false;
                    break;
                }
                *slot = gen.eval(&probe);
            }
            probe[i] = x[i];
            if inside {
                values = Some(f);
                break;
            }
            h *= 0.5;
        }
        let [f2, f1, m1, m2] = values.ok_or_else(|| Error::OutsideDomain {
            name: gen.name(),
            value: x.to_vec(),
        })?;
        let fd = (8.0 * (f1 - m1) - (f2 - m2)) / (12.0 * h);
        worst = worst.max((fd - grad[i]).abs());
    }
    Ok(worst / (norm + 1e-300))
}

/// `|F(x) + F*(∇F(x)) - <x, ∇F(x)>|`: zero when the registered conjugate is right.
pub fn fenchel_residual(gen: &dyn Generator, x: &[f64]) -> Result<f64> {
    let conj = gen.conjugate().ok_or_else(|| {
        Error::Unsupported(format!(
            "generator {} has no registered conjugate",
            gen.name()
        ))
    })?;
    check_domain(gen, x)?;
    let y = gen.grad(x);
    check_domain(conj.as_ref(), &y)?;
    Ok((gen.eval(x) + conj.eval(&y) - dot(x, &y)).abs())
}

/// Midpoint convexity gap `F(x) + F(y) - 2F((x+y)/2)`; positive for distinct
/// points under a strictly convex `F`.
pub fn convexity_gap(gen: &dyn Generator, x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    check_domain(gen, x)?;
    check_domain(gen, y)?;
    let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
    check_domain(gen, &mid)?;
    Ok(gen.eval(x) + gen.eval(y) - 2.0 * gen.eval(&mid))
}

/// Maximum relative error of `g⁻¹(g(p))` against `p`.
pub fn link_roundtrip_error(link: &dyn Link, p: &Point) -> Result<f64> {
    let back = link.invert(&link.apply(p))?;
    Ok(back
        .iter()
        .zip(p.iter())
        .map(|(b, x)| (b - x).abs() / x)
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::convex_core::{LinearCombination, Potential, Separable};
    use std::sync::Arc;

    fn sep(p: Potential) -> Separable {
        Separable::new(p).unwrap()
    }

    #[test]
    fn grad_check_quadratic_is_exact() {
        let dev = grad_check(&sep(Potential::Squared), &[3.0], 1e-5).unwrap();
        assert!(dev <= 1e-9, "{dev}");
    }

    #[test]
    fn grad_check_neg_entropy() {
        // ∇F(1) = ln 1 + 1 = 1.
        let gen = sep(Potential::NegEntropy);
        assert_eq!(gen.grad(&[1.0]), vec![1.0]);
        let dev = grad_check(&gen, &[1.0], 1e-5).unwrap();
        assert!(dev <= 1e-6, "{dev}");
    }

    #[test]
    fn grad_check_domain_exit() {
        let err = grad_check(&sep(Potential::Inverse), &[0.5], 1.0);
        assert!(matches!(err, Err(Error::OutsideDomain { .. })), "{err:?}");
        assert!(grad_check(&sep(Potential::Inverse), &[0.5], 0.0).is_err());
    }

    #[test]
    fn gradient_mismatch_small_for_catalog_generators() {
        let x = [0.01, 0.37, 1.0, 9.5];
        for pot in [
            Potential::Squared,
            Potential::NegEntropy,
            Potential::Exp,
            Potential::Inverse,
            Potential::NegSqrt,
            Potential::Power(-1.0),
            Potential::Power(0.5),
            Potential::Power(2.0),
        ] {
            let m = gradient_mismatch(&sep(pot), &x).unwrap();
            assert!(m <= 1e-8, "{pot:?}: {m}");
        }
        // Exp on coordinates straddling zero.
        let m = gradient_mismatch(&sep(Potential::Exp), &[-2.0, 1e-9, 2.3]).unwrap();
        assert!(m <= 1e-8, "{m}");
    }

    #[test]
    fn gradient_mismatch_detects_scaled_gradient() {
        #[derive(Debug)]
        struct Off(Separable);
        impl Generator for Off {
            fn name(&self) -> String {
                "off".into()
            }
            fn in_domain(&self, x: &[f64]) -> bool {
                self.0.in_domain(x)
            }
            fn eval(&self, x: &[f64]) -> f64 {
                self.0.eval(x)
            }
            fn grad(&self, x: &[f64]) -> Vec<f64> {
                self.0.grad(x).into_iter().map(|g| 1.01 * g).collect()
            }
        }
        let m = gradient_mismatch(&Off(sep(Potential::NegEntropy)), &[0.5, 2.0]).unwrap();
        assert!((m - 0.01 / 1.01).abs() < 1e-6, "{m}");
    }

    #[test]
    fn fenchel_squared() {
        // F(2)=4, ∇F=4, F*(4)=4, <2,4>=8.
        let r = fenchel_residual(&sep(Potential::Squared), &[2.0]).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn fenchel_neg_entropy() {
        let r = fenchel_residual(&sep(Potential::NegEntropy), &[1.0]).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn fenchel_exp() {
        // F(0)=1, ∇F=1, F*(1)=-1, <0,1>=0.
        let r = fenchel_residual(&sep(Potential::Exp), &[0.0]).unwrap();
        assert!(r <= 1e-12);
    }

    #[test]
    fn fenchel_requires_conjugate() {
        let g: Arc<dyn Generator> = Arc::new(sep(Potential::Squared));
        let comb = LinearCombination::new(vec![(1.0, g)]).unwrap();
        assert!(matches!(
            fenchel_residual(&comb, &[1.0]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn convexity_gap_positive_for_distinct_points() {
        let gap = convexity_gap(&sep(Potential::Squared), &[1.0], &[3.0]).unwrap();
        assert!((gap - 2.0).abs() < 1e-15);
        assert!(convexity_gap(&sep(Potential::Squared), &[1.0], &[1.0, 2.0]).is_err());
    }
}
