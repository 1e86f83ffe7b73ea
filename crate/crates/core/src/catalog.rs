//! Registered generator/link pairs and closed-form divergence formulas.
//!
//! | key | `F` | `g` | `B_F^g(p, q)` |
//! |-----|-----|-----|---------------|
//! | `kl` | `Σ x ln x` | `p` | `Σ (q - p + p ln(p/q))` |
//! | `reverse_kl` | `Σ eˣ` | `ln p` | `Σ (p - q + q ln(q/p))` |
//! | `alpha` (index `a`) | `Σ x^{1/a} / (1-a)` | `p^a` | `Σ (p^a q^{1-a} - a p - (1-a) q) / (a(a-1))` |
//! | `hellinger` | `Σ x²` | `√p` | `Σ (√p - √q)²` |
//! | `pearson_chi2` | `-2 Σ √x` | `p²` | `Σ (p - q)² / q` |
//! | `neyman_chi2` | `Σ 1/x` | `1/p` | `Σ (p - q)² / p` |
//!
//! The closed forms are written directly from their textbook definitions and
//! never call into [`crate::divergence`], so they serve as independent
//! oracles for it.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::convex_core::{GDivergenceSpec, Potential, Separable, StdLink};
use crate::divergence::same_dim;
use crate::{Error, Result};

/// Closed form of a two-argument divergence.
pub type PairOracle = Arc<dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync>;

/// Closed form of a skewed two-argument divergence; the last argument is the skew.
pub type SkewOracle = Arc<dyn Fn(&[f64], &[f64], f64) -> f64 + Send + Sync>;

/// Stable identifiers of the catalog entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CatalogKey {
    Kl,
    ReverseKl,
    Alpha(f64),
    Hellinger,
    PearsonChi2,
    NeymanChi2,
}

impl CatalogKey {
    pub const NAMES: [&'static str; 6] = [
        "kl",
        "reverse_kl",
        "alpha",
        "hellinger",
        "pearson_chi2",
        "neyman_chi2",
    ];

    /// Family indices exercised when every entry is requested.
    pub const DEFAULT_ALPHA_INDICES: [f64; 3] = [-1.0, 0.5, 2.0];

    /// Parse a key; `alpha` needs a family index, the others ignore it.
    pub fn parse(key: &str, family_index: Option<f64>) -> Result<Self> {
        match key {
            "kl" => Ok(Self::Kl),
            "reverse_kl" => Ok(Self::ReverseKl),
            "hellinger" => Ok(Self::Hellinger),
            "pearson_chi2" => Ok(Self::PearsonChi2),
            "neyman_chi2" => Ok(Self::NeymanChi2),
            "alpha" => {
                let a = family_index.ok_or_else(|| {
                    Error::InvalidParameter("alpha requires a family index".into())
                })?;
                if !a.is_finite() || a == 0.0 || a == 1.0 {
                    return Err(Error::InvalidParameter(format!(
                        "alpha family index must be finite and outside {{0, 1}}, got {a}"
                    )));
                }
                Ok(Self::Alpha(a))
            }
            other => Err(Error::UnknownKey(other.to_string())),
        }
    }

    /// Every entry, with `alpha` instantiated at [`Self::DEFAULT_ALPHA_INDICES`].
    pub fn standard_set() -> Vec<Self> {
        let mut keys = vec![Self::Kl, Self::ReverseKl];
        keys.extend(Self::DEFAULT_ALPHA_INDICES.iter().map(|&a| Self::Alpha(a)));
        keys.extend([Self::Hellinger, Self::PearsonChi2, Self::NeymanChi2]);
        keys
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Kl => "kl",
            Self::ReverseKl => "reverse_kl",
            Self::Alpha(_) => "alpha",
            Self::Hellinger => "hellinger",
            Self::PearsonChi2 => "pearson_chi2",
            Self::NeymanChi2 => "neyman_chi2",
        }
    }

    pub fn family_index(self) -> Option<f64> {
        match self {
            Self::Alpha(a) => Some(a),
            _ => None,
        }
    }

    pub fn entry(self) -> Result<CatalogEntry> {
        build_entry(self)
    }
}

impl fmt::Display for CatalogKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Alpha(a) => write!(f, "alpha[{a}]"),
            other => f.write_str(other.name()),
        }
    }
}

impl FromStr for CatalogKey {
    type Err = Error;

    /// Accepts the plain names and `alpha[<index>]`.
    fn from_str(s: &str) -> Result<Self> {
        if let Some(rest) = s.strip_prefix("alpha[").and_then(|r| r.strip_suffix(']')) {
            let a = rest
                .parse::<f64>()
                .map_err(|_| Error::UnknownKey(s.to_string()))?;
            return Self::parse("alpha", Some(a));
        }
        Self::parse(s, None)
    }
}

/// A registered pair with its closed-form oracles.
#[derive(Clone)]
pub struct CatalogEntry {
    pub key: CatalogKey,
    pub spec: GDivergenceSpec,
    /// Matches `B_F^g(p, q)` in the same argument order.
    pub oracle_forward: Option<PairOracle>,
    /// Matches `B_F,sym^g(p, q)`.
    pub oracle_symmetric: Option<PairOracle>,
    /// Matches `sJ_F,a^g(p, q)`.
    pub oracle_skew_jensen: Option<SkewOracle>,
    pub notes: &'static str,
}

impl fmt::Debug for CatalogEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CatalogEntry")
            .field("key", &self.key)
            .field("spec", &self.spec)
            .field("notes", &self.notes)
            .finish_non_exhaustive()
    }
}

/// Look up an entry by its public key.
pub fn get_entry(key: &str, family_index: Option<f64>) -> Result<CatalogEntry> {
    CatalogKey::parse(key, family_index)?.entry()
}

fn spec_of(potential: Potential, link: StdLink) -> Result<GDivergenceSpec> {
    Ok(GDivergenceSpec::new(
        Arc::new(Separable::new(potential)?),
        Arc::new(link),
    ))
}

fn build_entry(key: CatalogKey) -> Result<CatalogEntry> {
    let entry = match key {
        CatalogKey::Kl => CatalogEntry {
            key,
            spec: spec_of(Potential::NegEntropy, StdLink::Identity)?,
            oracle_forward: Some(Arc::new(generalized_kl)),
            oracle_symmetric: Some(Arc::new(jeffreys)),
            oracle_skew_jensen: Some(Arc::new(|p, q, a| skew_js(p, q, a) / (a * (1.0 - a)))),
            notes: "B(p,q) = generalized KL(p||q); sym = Jeffreys; sJ = skew JS / (a(1-a))",
        },
        CatalogKey::ReverseKl => CatalogEntry {
            key,
            spec: spec_of(Potential::Exp, StdLink::Log)?,
            oracle_forward: Some(Arc::new(|p, q| generalized_kl(q, p))),
            oracle_symmetric: Some(Arc::new(jeffreys)),
            oracle_skew_jensen: Some(Arc::new(|p, q, a| generalized_alpha(p, q, 1.0 - a))),
            notes: "B(p,q) = generalized KL(q||p); sym = Jeffreys; sJ_a = D_{1-a}(p||q)",
        },
        CatalogKey::Alpha(b) => CatalogEntry {
            key,
            spec: spec_of(Potential::Power(b), StdLink::power(b)?)?.with_family_index(b)?,
            oracle_forward: Some(Arc::new(move |p, q| generalized_alpha(p, q, b))),
            oracle_symmetric: Some(Arc::new(move |p, q| {
                generalized_alpha(p, q, b) + generalized_alpha(q, p, b)
            })),
            oracle_skew_jensen: Some(Arc::new(move |p, q, a| alpha_skew_jensen(p, q, a, b))),
            notes: "B(p,q) = generalized alpha-divergence D_a(p||q); sym = D_a(p||q) + D_a(q||p)",
        },
        CatalogKey::Hellinger => CatalogEntry {
            key,
            spec: spec_of(Potential::Squared, StdLink::Sqrt)?,
            oracle_forward: Some(Arc::new(hellinger_sq)),
            oracle_symmetric: Some(Arc::new(|p, q| 2.0 * hellinger_sq(p, q))),
            oracle_skew_jensen: Some(Arc::new(|p, q, _| hellinger_sq(p, q))),
            notes: "B(p,q) = H^2(p,q); sym = 2 H^2; sJ = H^2 for every skew",
        },
        CatalogKey::PearsonChi2 => CatalogEntry {
            key,
            spec: spec_of(Potential::NegSqrt, StdLink::Square)?,
            oracle_forward: Some(Arc::new(pearson_chi2)),
            oracle_symmetric: Some(Arc::new(symmetric_chi2)),
            oracle_skew_jensen: Some(Arc::new(pearson_skew_jensen)),
            notes: "B(p,q) = sum (p-q)^2/q, i.e. Pearson chi2 with q as reference; sym = sum (p-q)^2 (1/p + 1/q)",
        },
        CatalogKey::NeymanChi2 => CatalogEntry {
            key,
            spec: spec_of(Potential::Inverse, StdLink::Reciprocal)?,
            oracle_forward: Some(Arc::new(neyman_chi2)),
            oracle_symmetric: Some(Arc::new(symmetric_chi2)),
            oracle_skew_jensen: Some(Arc::new(neyman_skew_jensen)),
            notes: "B(p,q) = sum (p-q)^2/p, i.e. Neyman chi2 with p as reference; sym = sum (p-q)^2 (1/p + 1/q)",
        },
    };
    Ok(entry)
}

fn zip_sum(p: &[f64], q: &[f64], f: impl Fn(f64, f64) -> f64) -> f64 {
    p.iter().zip(q).map(|(&a, &b)| f(a, b)).sum()
}

/// `Σ p ln(p/q)`.
pub fn kl(p: &[f64], q: &[f64]) -> f64 {
    zip_sum(p, q, |a, b| a * (a / b).ln())
}

/// `Σ (q - p + p ln(p/q))`, the KL divergence extended to unnormalized vectors.
pub fn generalized_kl(p: &[f64], q: &[f64]) -> f64 {
    zip_sum(p, q, |a, b| b - a + a * (a / b).ln())
}

/// `Σ (p - q) ln(p/q)`.
pub fn jeffreys(p: &[f64], q: &[f64]) -> f64 {
    zip_sum(p, q, |a, b| (a - b) * (a / b).ln())
}

/// Squared Hellinger distance `Σ (√p - √q)²` (no ½ factor).
pub fn hellinger_sq(p: &[f64], q: &[f64]) -> f64 {
    zip_sum(p, q, |a, b| (a.sqrt() - b.sqrt()).powi(2))
}

/// `Σ (p - q)² / q`.
pub fn pearson_chi2(p: &[f64], q: &[f64]) -> f64 {
    zip_sum(p, q, |a, b| (a - b).powi(2) / b)
}

/// `Σ (p - q)² / p`.
pub fn neyman_chi2(p: &[f64], q: &[f64]) -> f64 {
    zip_sum(p, q, |a, b| (a - b).powi(2) / a)
}

/// `Σ (p - q)² / q + Σ (p - q)² / p`.
pub fn symmetric_chi2(p: &[f64], q: &[f64]) -> f64 {
    pearson_chi2(p, q) + neyman_chi2(p, q)
}

/// α-divergence for normalized inputs: `(Σ p^a q^{1-a} - 1) / (a(a-1))`.
pub fn alpha_divergence(p: &[f64], q: &[f64], a: f64) -> f64 {
    (zip_sum(p, q, |x, y| x.powf(a) * y.powf(1.0 - a)) - 1.0) / (a * (a - 1.0))
}

/// `Σ (p^a q^{1-a} - a p - (1-a) q) / (a(a-1))`, valid for unnormalized inputs.
pub fn generalized_alpha(p: &[f64], q: &[f64], a: f64) -> f64 {
    zip_sum(p, q, |x, y| {
        x.powf(a) * y.powf(1.0 - a) - a * x - (1.0 - a) * y
    }) / (a * (a - 1.0))
}

/// `(1-a) KL(p || m) + a KL(q || m)` with `m = (1-a) p + a q`; `a = ½` is the
/// Jensen-Shannon divergence.
pub fn skew_js(p: &[f64], q: &[f64], a: f64) -> f64 {
    let m: Vec<f64> = p
        .iter()
        .zip(q)
        .map(|(x, y)| (1.0 - a) * x + a * y)
        .collect();
    (1.0 - a) * kl(p, &m) + a * kl(q, &m)
}

/// Scaled skew Jensen divergence of the α-family pair, skew `a`, index `b`.
pub fn alpha_skew_jensen(p: &[f64], q: &[f64], a: f64, b: f64) -> f64 {
    zip_sum(p, q, |x, y| {
        (1.0 - a) * x + a * y - ((1.0 - a) * x.powf(b) + a * y.powf(b)).powf(b.recip())
    }) / (a * (1.0 - a) * (1.0 - b))
}

/// Scaled skew Jensen divergence of the Pearson pair.
pub fn pearson_skew_jensen(p: &[f64], q: &[f64], a: f64) -> f64 {
    2.0 / (a * (1.0 - a))
        * zip_sum(p, q, |x, y| {
            -(1.0 - a) * x - a * y + ((1.0 - a) * x * x + a * y * y).sqrt()
        })
}

/// Scaled skew Jensen divergence of the Neyman pair.
pub fn neyman_skew_jensen(p: &[f64], q: &[f64], a: f64) -> f64 {
    zip_sum(p, q, |x, y| {
        (1.0 - a) * x + a * y - x * y / ((1.0 - a) * y + a * x)
    }) / (a * (1.0 - a))
}

/// Evaluate a closed-form f-divergence by name.
///
/// Names: `kl`, `hellinger`, `pearson`, `neyman`, `alpha` (needs
/// `family_index`), `js`. These are the plain textbook forms; `kl` and `alpha`
/// assume normalized inputs.
pub fn oracle_fdiv(name: &str, p: &[f64], q: &[f64], family_index: Option<f64>) -> Result<f64> {
    same_dim(p, q)?;
    match name {
        "kl" => Ok(kl(p, q)),
        "hellinger" => Ok(hellinger_sq(p, q)),
        "pearson" => Ok(pearson_chi2(p, q)),
        "neyman" => Ok(neyman_chi2(p, q)),
        "js" => Ok(skew_js(p, q, 0.5)),
        "alpha" => {
            let a = family_index
                .ok_or_else(|| Error::InvalidParameter("alpha requires a family index".into()))?;
            if !a.is_finite() || a == 0.0 || a == 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "alpha family index must be finite and outside {{0, 1}}, got {a}"
                )));
            }
            Ok(alpha_divergence(p, q, a))
        }
        other => Err(Error::UnknownKey(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hellinger_entry_oracle() {
        let e = get_entry("hellinger", None).unwrap();
        let f = e.oracle_forward.unwrap();
        assert!((f(&[0.25], &[1.0]) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn alpha_half_is_twice_hellinger() {
        let e = get_entry("alpha", Some(0.5)).unwrap();
        let f = e.oracle_forward.unwrap();
        assert!((f(&[0.25], &[1.0]) - 0.5).abs() < 1e-15);
        assert_eq!(e.spec.family_index(), Some(0.5));
    }

    #[test]
    fn alpha_index_errors() {
        assert!(matches!(
            get_entry("alpha", Some(1.0)),
            Err(Error::InvalidParameter(_))
        ));
        assert!(get_entry("alpha", Some(0.0)).is_err());
        assert!(get_entry("alpha", None).is_err());
    }

    #[test]
    fn unknown_key() {
        assert_eq!(
            get_entry("bhattacharyya", None).unwrap_err(),
            Error::UnknownKey("bhattacharyya".into())
        );
    }

    #[test]
    fn oracle_examples() {
        let p = [0.5, 0.5];
        let q = [0.25, 0.75];
        let k = oracle_fdiv("kl", &p, &q, None).unwrap();
        assert!((k - (0.5 * 2f64.ln() + 0.5 * (2.0f64 / 3.0).ln())).abs() < 1e-15);
        assert!((k - 0.143841).abs() < 1e-6);
        assert_eq!(
            oracle_fdiv("hellinger", &[0.3, 0.7], &[0.3, 0.7], None).unwrap(),
            0.0
        );
        let pe = oracle_fdiv("pearson", &p, &q, None).unwrap();
        assert!((pe - (0.0625 / 0.25 + 0.0625 / 0.75)).abs() < 1e-15);
        assert!(matches!(
            oracle_fdiv("kl", &p, &[1.0], None),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(oracle_fdiv("alpha", &p, &q, None).is_err());
    }

    #[test]
    fn alpha_divergence_vanishes_on_equal_distributions() {
        let p = [0.2, 0.3, 0.5];
        for a in [-1.0, 0.5, 2.0, 3.0] {
            assert!(oracle_fdiv("alpha", &p, &p, Some(a)).unwrap().abs() < 1e-15);
        }
    }

    #[test]
    fn key_round_trip_through_display() {
        for key in CatalogKey::standard_set() {
            assert_eq!(key.to_string().parse::<CatalogKey>().unwrap(), key);
        }
        assert_eq!(CatalogKey::standard_set().len(), 8);
    }

    #[test]
    fn every_entry_has_all_oracles() {
        for key in CatalogKey::standard_set() {
            let e = key.entry().unwrap();
            assert!(e.oracle_forward.is_some());
            assert!(e.oracle_symmetric.is_some());
            assert!(e.oracle_skew_jensen.is_some());
            assert!(e.spec.generator().conjugate().is_some());
        }
    }
}
