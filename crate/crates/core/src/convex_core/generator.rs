use std::fmt;
use std::sync::Arc;

use crate::numeric::sum_by;
use crate::{Error, Result};

/// A strictly convex, differentiable function `F` on a subset of ℝ^d.
///
/// Inputs are raw slices rather than [`Point`](super::Point)s: a generator is
/// evaluated on *linked* coordinates `g(p)`, which need not be positive
/// (for example `g = ln`).
pub trait Generator: fmt::Debug + Send + Sync {
    fn name(&self) -> String;

    /// Whether `x` lies in the (open) domain of `F`.
    fn in_domain(&self, x: &[f64]) -> bool;

    fn eval(&self, x: &[f64]) -> f64;

    fn grad(&self, x: &[f64]) -> Vec<f64>;

    /// The Legendre conjugate `F*`, when a closed form is registered.
    ///
    /// Its gradient is `(∇F)⁻¹` and its own conjugate is `F` again.
    fn conjugate(&self) -> Option<Arc<dyn Generator>> {
        None
    }
}

/// Error unless `x` is in the generator's domain.
pub fn check_domain(gen: &dyn Generator, x: &[f64]) -> Result<()> {
    if gen.in_domain(x) {
        Ok(())
    } else {
        Err(Error::OutsideDomain {
            name: gen.name(),
            value: x.to_vec(),
        })
    }
}

/// Scalar potentials `φ` for separable generators `F(x) = Σ φ(x_i)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Potential {
    /// `x²`
    Squared,
    /// `x ln x`
    NegEntropy,
    /// `eˣ`
    Exp,
    /// `1/x`
    Inverse,
    /// `-2√x`
    NegSqrt,
    /// `x^{1/a} / (1 - a)` for `a ∉ {0, 1}`
    Power(f64),
}

impl Potential {
    fn label(self) -> String {
        match self {
            Self::Squared => "squared".into(),
            Self::NegEntropy => "neg_entropy".into(),
            Self::Exp => "exp".into(),
            Self::Inverse => "inverse".into(),
            Self::NegSqrt => "neg_sqrt".into(),
            Self::Power(a) => format!("power[{a}]"),
        }
    }

    fn in_domain(self, x: f64) -> bool {
        match self {
            Self::Squared | Self::Exp => x.is_finite(),
            Self::NegEntropy | Self::Inverse | Self::NegSqrt | Self::Power(_) => {
                x.is_finite() && x > 0.0
            }
        }
    }

    fn value(self, x: f64) -> f64 {
        match self {
            Self::Squared => x * x,
            Self::NegEntropy => x * x.ln(),
            Self::Exp => x.exp(),
            Self::Inverse => x.recip(),
            Self::NegSqrt => -2.0 * x.sqrt(),
            Self::Power(a) => x.powf(a.recip()) / (1.0 - a),
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Self::Squared => 2.0 * x,
            Self::NegEntropy => x.ln() + 1.0,
            Self::Exp => x.exp(),
            Self::Inverse => -(x * x).recip(),
            Self::NegSqrt => -x.sqrt().recip(),
            Self::Power(a) => x.powf(a.recip() - 1.0) / (a * (1.0 - a)),
        }
    }

    fn conj_in_domain(self, y: f64) -> bool {
        y.is_finite()
            && match self {
                Self::Squared | Self::NegEntropy => true,
                Self::Exp => y > 0.0,
                Self::Inverse | Self::NegSqrt => y < 0.0,
                Self::Power(a) => y * a * (1.0 - a) > 0.0,
            }
    }

    fn conj_value(self, y: f64) -> f64 {
        match self {
            Self::Squared => 0.25 * y * y,
            Self::NegEntropy => (y - 1.0).exp(),
            Self::Exp => y * y.ln() - y,
            Self::Inverse => -2.0 * (-y).sqrt(),
            Self::NegSqrt => -y.recip(),
            Self::Power(a) => (y * a * (1.0 - a)).powf((1.0 - a).recip()) / a,
        }
    }

    fn conj_derivative(self, y: f64) -> f64 {
        match self {
            Self::Squared => 0.5 * y,
            Self::NegEntropy => (y - 1.0).exp(),
            Self::Exp => y.ln(),
            Self::Inverse => (-y).sqrt().recip(),
            Self::NegSqrt => (y * y).recip(),
            Self::Power(a) => (y * a * (1.0 - a)).powf(a / (1.0 - a)),
        }
    }
}

/// `F(x) = Σ φ(x_i)` for a registered [`Potential`], or its conjugate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Separable {
    potential: Potential,
    dual: bool,
}

impl Separable {
    pub fn new(potential: Potential) -> Result<Self> {
        if let Potential::Power(a) = potential {
            if !a.is_finite() || a == 0.0 || a == 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "power generator index must be finite and outside {{0, 1}}, got {a}"
                )));
            }
        }
        Ok(Self {
            potential,
            dual: false,
        })
    }

    pub fn potential(&self) -> Potential {
        self.potential
    }

    /// True for the conjugate side `F*`.
    pub fn is_conjugate(&self) -> bool {
        self.dual
    }

    fn scalar_in_domain(&self, x: f64) -> bool {
        if self.dual {
            self.potential.conj_in_domain(x)
        } else {
            self.potential.in_domain(x)
        }
    }

    fn scalar_value(&self, x: f64) -> f64 {
        if self.dual {
            self.potential.conj_value(x)
        } else {
            self.potential.value(x)
        }
    }

    fn scalar_derivative(&self, x: f64) -> f64 {
        if self.dual {
            self.potential.conj_derivative(x)
        } else {
            self.potential.derivative(x)
        }
    }
}

impl Generator for Separable {
    fn name(&self) -> String {
        if self.dual {
            format!("{}*", self.potential.label())
        } else {
            self.potential.label()
        }
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        !x.is_empty() && x.iter().all(|&v| self.scalar_in_domain(v))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        sum_by(x.len(), &|i| self.scalar_value(x[i]))
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|&v| self.scalar_derivative(v)).collect()
    }

    fn conjugate(&self) -> Option<Arc<dyn Generator>> {
        Some(Arc::new(Self {
            potential: self.potential,
            dual: !self.dual,
        }))
    }
}

/// `Σ c_k F_k` with strictly positive coefficients.
///
/// No conjugate is registered for combinations.
#[derive(Debug, Clone)]
pub struct LinearCombination {
    terms: Vec<(f64, Arc<dyn Generator>)>,
}

impl LinearCombination {
    pub fn new(terms: Vec<(f64, Arc<dyn Generator>)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::InvalidParameter(
                "linear combination needs at least one term".into(),
            ));
        }
        if let Some((c, _)) = terms.iter().find(|(c, _)| !(c.is_finite() && *c > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "combination coefficients must be positive, got {c}"
            )));
        }
        Ok(Self { terms })
    }
}

impl Generator for LinearCombination {
    fn name(&self) -> String {
        self.terms
            .iter()
            .map(|(c, g)| format!("{c}*{}", g.name()))
            .collect::<Vec<_>>()
            .join(" + ")
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        self.terms.iter().all(|(_, g)| g.in_domain(x))
    }

    fn eval(&self, x: &[f64]) -> f64 {
        self.terms.iter().map(|(c, g)| c * g.eval(x)).sum()
    }

    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; x.len()];
        for (c, g) in &self.terms {
            for (o, d) in out.iter_mut().zip(g.grad(x)) {
                *o += c * d;
            }
        }
        out
    }
}
