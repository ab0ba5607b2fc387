//! Propagation-effect (fading and shadowing) distributions.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use rand::Rng;
use rand_distr::{Distribution, Exp1, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{check_beta, domain, Error, Result};
use crate::quadrature::GaussRule;

const HERMITE_ORDER: usize = 128;

fn hermite_rule() -> &'static GaussRule {
    static RULE: OnceLock<GaussRule> = OnceLock::new();
    RULE.get_or_init(|| GaussRule::hermite(HERMITE_ORDER).expect("Hermite rule converges"))
}

/// Distribution of the propagation effects `H_i`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FadingModel {
    /// No fading: `H ≡ 1`.
    Dirac1,
    Exponential { mean: f64 },
    Gamma { shape: f64, scale: f64 },
    /// Nakagami-m power fading, `Gamma(m, 1/m)`.
    Nakagami { m: f64 },
    LogNormal { mu: f64, sigma: f64 },
}

/// Constants `(p, c_H)` with `L_H(s) ≤ c_H s^{-p}` for `s ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LaplaceDecay {
    Power { p: f64, c_h: f64 },
    /// Exponential decay: every `p` works.
    AnyPower,
    /// Holds, but the constants come from an external asymptotic analysis.
    Deferred,
}

/// `M_H(ζ)` (infinite outside the domain) and the critical exponent `ζ₀`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfValue {
    pub value: f64,
    pub critical: f64,
}

impl FadingModel {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Self::Dirac1 => true,
            Self::Exponential { mean } => mean > 0.0 && mean.is_finite(),
            Self::Gamma { shape, scale } => {
                shape > 0.0 && scale > 0.0 && shape.is_finite() && scale.is_finite()
            }
            Self::Nakagami { m } => m > 0.0 && m.is_finite(),
            Self::LogNormal { mu, sigma } => mu.is_finite() && sigma > 0.0 && sigma.is_finite(),
        };
        if ok {
            Ok(())
        } else {
            Err(domain(format!("invalid fading parameters: {self}")))
        }
    }

    /// Shape and scale when the law is a gamma law (Exponential and Nakagami included).
    pub fn as_gamma(&self) -> Option<(f64, f64)> {
        match *self {
            Self::Exponential { mean } => Some((1.0, mean)),
            Self::Gamma { shape, scale } => Some((shape, scale)),
            Self::Nakagami { m } => Some((m, 1.0 / m)),
            _ => None,
        }
    }

    pub fn has_closed_form_laplace(&self) -> bool {
        !matches!(self, Self::LogNormal { .. })
    }

    pub fn mean(&self) -> f64 {
        match *self {
            Self::Dirac1 => 1.0,
            Self::LogNormal { mu, sigma } => (mu + 0.5 * sigma * sigma).exp(),
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                p * q
            }
        }
    }

    pub fn second_moment(&self) -> f64 {
        match *self {
            Self::Dirac1 => 1.0,
            Self::LogNormal { mu, sigma } => (2.0 * mu + 2.0 * sigma * sigma).exp(),
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                p * (p + 1.0) * q * q
            }
        }
    }

    pub fn sampler(&self) -> Result<FadingSampler> {
        self.validate()?;
        Ok(match *self {
            Self::Dirac1 => FadingSampler::Unit,
            Self::Exponential { mean } => FadingSampler::Exp(mean),
            Self::LogNormal { mu, sigma } => FadingSampler::LogNormal(mu, sigma),
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                FadingSampler::Gamma(Gamma::new(p, q).map_err(|e| domain(e.to_string()))?)
            }
        })
    }

    /// One draw from the law. Prefer [`FadingModel::sampler`] in loops.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<f64> {
        Ok(self.sampler()?.sample(rng))
    }

    /// Laplace transform `E[e^{-sH}]`.
    pub fn laplace(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 1.0;
        }
        match *self {
            Self::Dirac1 => (-s).exp(),
            Self::LogNormal { mu, sigma } => {
                hermite_rule().expect(|z| (-s * (mu + sigma * z).exp()).exp())
            }
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                (-p * (q * s).ln_1p()).exp()
            }
        }
    }

    /// `1 - E[e^{-sH}]`, accurate for small `s`.
    pub fn laplace_complement(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 0.0;
        }
        match *self {
            Self::Dirac1 => -(-s).exp_m1(),
            Self::LogNormal { mu, sigma } => {
                hermite_rule().expect(|z| -(-s * (mu + sigma * z).exp()).exp_m1())
            }
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                -(-p * (q * s).ln_1p()).exp_m1()
            }
        }
    }

    /// Moment generating function at `ζ` together with its critical value.
    pub fn mgf_and_critical(&self, zeta: f64) -> MgfValue {
        let critical = self.mgf_critical();
        let value = match *self {
            _ if zeta == 0.0 => 1.0,
            Self::Dirac1 => zeta.exp(),
            Self::LogNormal { .. } if zeta < 0.0 => self.laplace(-zeta),
            Self::LogNormal { .. } => f64::INFINITY,
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                if zeta < critical {
                    (-p * (-q * zeta).ln_1p()).exp()
                } else {
                    f64::INFINITY
                }
            }
        };
        MgfValue { value, critical }
    }

    /// `ζ₀ = sup{ζ : M_H(ζ) < ∞}`.
    pub fn mgf_critical(&self) -> f64 {
        match *self {
            Self::Dirac1 => f64::INFINITY,
            Self::LogNormal { .. } => 0.0,
            _ => 1.0 / self.as_gamma().expect("gamma family").1,
        }
    }

    /// Fractional moment `E[H^{1/β}]`.
    pub fn frac_moment(&self, beta: f64) -> Result<f64> {
        check_beta(beta)?;
        let k = 1.0 / beta;
        Ok(match *self {
            Self::Dirac1 => 1.0,
            Self::LogNormal { mu, sigma } => (mu * k + 0.5 * sigma * sigma * k * k).exp(),
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                q.powf(k) * (ln_gamma(p + k) - ln_gamma(p)).exp()
            }
        })
    }

    pub fn condition_a_params(&self) -> LaplaceDecay {
        match *self {
            Self::Dirac1 => LaplaceDecay::AnyPower,
            Self::LogNormal { .. } => LaplaceDecay::Deferred,
            _ => {
                let (p, q) = self.as_gamma().expect("gamma family");
                LaplaceDecay::Power { p, c_h: q.powf(-p) }
            }
        }
    }

    /// Whether `log L_H(s)` is negligible against every regularly varying
    /// function of index `1/β`. Gamma-type laws have `F_H(x) ≥ c x^p` near 0
    /// and so `|log L_H(s)| = O(log s)`; the lognormal has
    /// `|log L_H(s)| ~ (log s)² / (2σ²)`. A point mass at 1 puts no mass near
    /// 0 and `|log L_H(s)| = s`.
    pub fn laplace_log_is_slow(&self) -> bool {
        !matches!(self, Self::Dirac1)
    }
}

impl fmt::Display for FadingModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Dirac1 => write!(f, "dirac1"),
            Self::Exponential { mean } => write!(f, "exp:{mean}"),
            Self::Gamma { shape, scale } => write!(f, "gamma:{shape},{scale}"),
            Self::Nakagami { m } => write!(f, "nakagami:{m}"),
            Self::LogNormal { mu, sigma } => write!(f, "lognormal:{mu},{sigma}"),
        }
    }
}

impl FromStr for FadingModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (kind, args) = s.split_once(':').unwrap_or((s, ""));
        let nums: Vec<f64> = if args.is_empty() {
            Vec::new()
        } else {
            args.split(',')
                .map(|a| a.trim().parse::<f64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|_| Error::Parse(format!("invalid number in fading descriptor '{s}'")))?
        };
        let arity = |n: usize| -> Result<()> {
            if nums.len() == n {
                Ok(())
            } else {
                Err(Error::Parse(format!("fading '{kind}' takes {n} parameter(s), got '{s}'")))
            }
        };
        let model = match kind.to_ascii_lowercase().as_str() {
            "dirac1" | "dirac" | "none" => {
                arity(0)?;
                Self::Dirac1
            }
            "exp" | "exponential" | "rayleigh" => {
                if nums.is_empty() {
                    Self::Exponential { mean: 1.0 }
                } else {
                    arity(1)?;
                    Self::Exponential { mean: nums[0] }
                }
            }
            "gamma" => {
                arity(2)?;
                Self::Gamma { shape: nums[0], scale: nums[1] }
            }
            "nakagami" => {
                arity(1)?;
                Self::Nakagami { m: nums[0] }
            }
            "lognormal" => {
                arity(2)?;
                Self::LogNormal { mu: nums[0], sigma: nums[1] }
            }
            _ => return Err(Error::Parse(format!("unknown fading descriptor '{s}'"))),
        };
        model.validate()?;
        Ok(model)
    }
}

crate::impl_serde_via_str!(FadingModel);

/// Prepared sampler for repeated draws.
#[derive(Debug, Clone, Copy)]
pub enum FadingSampler {
    Unit,
    Exp(f64),
    Gamma(Gamma<f64>),
    LogNormal(f64, f64),
}

impl Distribution<f64> for FadingSampler {
    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self {
            Self::Unit => 1.0,
            Self::Exp(mean) => {
                let e: f64 = Exp1.sample(rng);
                mean * e
            }
            Self::Gamma(g) => g.sample(rng),
            Self::LogNormal(mu, sigma) => {
                let z: f64 = StandardNormal.sample(rng);
                (mu + sigma * z).exp()
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::integrate_to_infinity;
    use crate::rng::RngStream;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn catalog() -> Vec<FadingModel> {
        vec![
            FadingModel::Dirac1,
            FadingModel::Exponential { mean: 1.0 },
            FadingModel::Gamma { shape: 2.0, scale: 0.5 },
            FadingModel::Nakagami { m: 3.0 },
            FadingModel::LogNormal { mu: 0.0, sigma: 1.0 },
        ]
    }

    #[test]
    fn laplace_examples() {
        for m in catalog() {
            assert_eq!(m.laplace(0.0), 1.0);
        }
        assert_relative_eq!(FadingModel::Gamma { shape: 2.0, scale: 0.5 }.laplace(2.0), 0.25, epsilon = 1e-15);
        assert_relative_eq!(FadingModel::Exponential { mean: 1.0 }.laplace(1.0), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn laplace_monotone_and_vanishing() {
        for m in catalog() {
            let mut prev = 1.0;
            for k in 1..200 {
                let s = 0.05 * k as f64;
                let v = m.laplace(s);
                assert!(v <= prev + 1e-15, "{m} not monotone at {s}");
                assert_relative_eq!(v + m.laplace_complement(s), 1.0, epsilon = 1e-14);
                prev = v;
            }
            assert!(m.laplace(1e8) < 1e-3, "{m}");
        }
    }

    #[test]
    fn lognormal_laplace_matches_adaptive_quadrature() {
        let m = FadingModel::LogNormal { mu: 0.0, sigma: 1.0 };
        for &s in &[0.1, 1.0, 10.0] {
            // E[exp(-s e^Z)] = ∫ exp(-s x) lognormal density dx
            let dens = |x: f64| {
                if x <= 0.0 {
                    0.0
                } else {
                    (-(x.ln()).powi(2) / 2.0).exp() / (x * (2.0 * PI).sqrt())
                }
            };
            let r = integrate_to_infinity(|x| (-s * x).exp() * dens(x), 0.0, &[0.1, 1.0, 10.0], 1e-14, 1e-13);
            assert_relative_eq!(m.laplace(s), r.value, max_relative = 1e-8);
        }
    }

    #[test]
    fn mgf_examples() {
        let e = FadingModel::Exponential { mean: 1.0 }.mgf_and_critical(0.5);
        assert_eq!(e.critical, 1.0);
        assert_relative_eq!(e.value, 2.0, epsilon = 1e-14);
        assert!(FadingModel::Exponential { mean: 1.0 }.mgf_and_critical(1.0).value.is_infinite());
        let d = FadingModel::Dirac1.mgf_and_critical(0.7);
        assert_eq!(d.critical, f64::INFINITY);
        assert_relative_eq!(d.value, 0.7f64.exp());
        assert_eq!(FadingModel::LogNormal { mu: 0.0, sigma: 1.0 }.mgf_critical(), 0.0);
        assert_eq!(FadingModel::Gamma { shape: 2.0, scale: 0.25 }.mgf_critical(), 4.0);
    }

    #[test]
    fn frac_moment_examples() {
        let half_sqrt_pi = PI.sqrt() / 2.0;
        assert_relative_eq!(
            FadingModel::Exponential { mean: 1.0 }.frac_moment(2.0).unwrap(),
            half_sqrt_pi,
            max_relative = 1e-13
        );
        assert_relative_eq!(
            FadingModel::Nakagami { m: 1.0 }.frac_moment(2.0).unwrap(),
            half_sqrt_pi,
            max_relative = 1e-13
        );
        assert_eq!(FadingModel::Dirac1.frac_moment(3.0).unwrap(), 1.0);
        assert!(FadingModel::Dirac1.frac_moment(1.0).is_err());
    }

    #[test]
    fn frac_moment_limits_and_jensen() {
        for m in catalog() {
            let mean = m.mean();
            for &beta in &[1.5, 2.0, 4.0] {
                assert!(m.frac_moment(beta).unwrap() <= mean.powf(1.0 / beta) * (1.0 + 1e-12), "{m}");
            }
            if (mean - 1.0).abs() < 1e-12 {
                assert!((m.frac_moment(1e3).unwrap() - 1.0).abs() < 1e-2, "{m}");
            }
        }
    }

    #[test]
    fn condition_a_examples() {
        assert_eq!(
            FadingModel::Gamma { shape: 2.0, scale: 0.5 }.condition_a_params(),
            LaplaceDecay::Power { p: 2.0, c_h: 4.0 }
        );
        assert_eq!(
            FadingModel::Exponential { mean: 1.0 }.condition_a_params(),
            LaplaceDecay::Power { p: 1.0, c_h: 1.0 }
        );
        assert_eq!(FadingModel::Dirac1.condition_a_params(), LaplaceDecay::AnyPower);
        // the constant really bounds the transform
        for m in catalog() {
            if let LaplaceDecay::Power { p, c_h } = m.condition_a_params() {
                for k in 0..100 {
                    let s = 1.0 + k as f64 * 0.7;
                    assert!(m.laplace(s) <= c_h * s.powf(-p) * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn sampling_moments() {
        let mut rng = RngStream::new(11, 0).rng();
        assert_eq!(FadingModel::Dirac1.sample(&mut rng).unwrap(), 1.0);
        let n = 1_000_000;
        let s = FadingModel::Exponential { mean: 1.0 }.sampler().unwrap();
        let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 3.0 * (1.0 / n as f64).sqrt());

        let s = FadingModel::Nakagami { m: 2.0 }.sampler().unwrap();
        let xs: Vec<f64> = (0..n).map(|_| s.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((mean - 1.0).abs() < 3.0 * (0.5 / n as f64).sqrt());
        // Var of the sample variance for Gamma(2, 1/2): (μ4 - σ⁴)/n, μ4 = 3σ⁴(1 + 2/k) = 1.5
        assert!((var - 0.5).abs() < 3.0 * ((1.5 - 0.25) / n as f64).sqrt());
        assert!(xs.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn laplace_matches_monte_carlo() {
        let n = 1_000_000;
        for (k, m) in catalog().into_iter().enumerate() {
            let sampler = m.sampler().unwrap();
            let mut rng = RngStream::new(21, k as u64).rng();
            let hs: Vec<f64> = (0..n).map(|_| sampler.sample(&mut rng)).collect();
            for &s in &[0.1, 1.0, 10.0] {
                let vals: Vec<f64> = hs.iter().map(|h| (-s * h).exp()).collect();
                let mean = vals.iter().sum::<f64>() / n as f64;
                let var = vals.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
                let se = (var / n as f64).sqrt();
                assert!((mean - m.laplace(s)).abs() <= 3.0 * se + 1e-9, "{m} at s={s}");
            }
        }
    }

    #[test]
    fn exp_and_gamma_one_share_law() {
        // two-sample Kolmogorov–Smirnov at level 0.01
        let n = 20_000;
        let a = FadingModel::Exponential { mean: 1.0 }.sampler().unwrap();
        let b = FadingModel::Gamma { shape: 1.0, scale: 1.0 }.sampler().unwrap();
        let mut rng = RngStream::new(5, 0).rng();
        let mut xa: Vec<f64> = (0..n).map(|_| a.sample(&mut rng)).collect();
        let mut xb: Vec<f64> = (0..n).map(|_| b.sample(&mut rng)).collect();
        xa.sort_by(f64::total_cmp);
        xb.sort_by(f64::total_cmp);
        let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
        while i < n && j < n {
            if xa[i] <= xb[j] {
                i += 1;
            } else {
                j += 1;
            }
            d = d.max((i as f64 - j as f64).abs() / n as f64);
        }
        let crit = 1.628 * (2.0 / n as f64).sqrt();
        assert!(d < crit, "KS distance {d} exceeds {crit}");
    }

    #[test]
    fn descriptors_parse() {
        assert_eq!("dirac1".parse::<FadingModel>().unwrap(), FadingModel::Dirac1);
        assert_eq!("exp:1.0".parse::<FadingModel>().unwrap(), FadingModel::Exponential { mean: 1.0 });
        assert_eq!(
            "gamma:2,0.5".parse::<FadingModel>().unwrap(),
            FadingModel::Gamma { shape: 2.0, scale: 0.5 }
        );
        assert_eq!("nakagami:3".parse::<FadingModel>().unwrap(), FadingModel::Nakagami { m: 3.0 });
        assert_eq!(
            "lognormal:0,1".parse::<FadingModel>().unwrap(),
            FadingModel::LogNormal { mu: 0.0, sigma: 1.0 }
        );
        assert!("rician:2".parse::<FadingModel>().is_err());
        assert!("gamma:2".parse::<FadingModel>().is_err());
        assert!("exp:-1".parse::<FadingModel>().is_err());
    }
}
