//! Asymptotic constants of the SIR tail and the exponents of the
//! logarithmic bounds for bounded path loss.
//!
//! The α-Ginibre constant is
//!
//! ```text
//! C = α E[H^{1/β}] / Γ(1+1/β) · ∫_0^∞ Π_{i≥1} [1 - α + α E L_H((t/Y_i)^β)] dt,   Y_i ~ Gamma(i+1, 1).
//! ```
//!
//! Writing `x_i(t) = E[1 - L_H((t/Y_i)^β)]`, the gamma densities of all
//! `Y_i, i ≥ 0` sum to one, so `Σ_{i≥0} x_i(t) = t E[H^{1/β}] Γ(1-1/β)`
//! exactly. The tail of the log-product is therefore `-α` times a known
//! number up to a second-order remainder, and only the first few hundred or
//! thousand factors need quadrature.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use statrs::function::beta::beta as beta_fn;
use statrs::function::gamma::{gamma, ln_gamma};

use crate::error::{check_alpha, check_beta, domain, Error, Result};
use crate::fading::FadingModel;
use crate::output::ext_f64;
use crate::pathloss::PathLossModel;
use crate::pointproc::unit_ball_volume;
use crate::quadrature::{adaptive_simpson, gauss_kronrod, integrate_to_infinity, GaussRule};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ClosedForm,
    Quadrature,
    MonteCarlo,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticConstant {
    /// May be `+∞` (serialised as `"inf"`).
    #[serde(with = "ext_f64")]
    pub value: f64,
    pub abs_error_estimate: f64,
    pub method: Method,
    pub provenance: String,
    pub parameters: BTreeMap<String, Value>,
}

impl AsymptoticConstant {
    fn closed_form(value: f64, provenance: &str) -> Self {
        Self {
            value,
            abs_error_estimate: 0.0,
            method: Method::ClosedForm,
            provenance: provenance.to_string(),
            parameters: BTreeMap::new(),
        }
    }

    pub(crate) fn with_param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    pub fn is_infinite(&self) -> bool {
        self.value.is_infinite()
    }
}

/// `(β/π) sin(π/β)`: the limit of `θ^{1/β} P(SIR > θ)` for Poisson base
/// stations, whatever the fading.
pub fn poisson_tail_constant(beta: f64) -> Result<AsymptoticConstant> {
    check_beta(beta)?;
    Ok(AsymptoticConstant::closed_form(
        beta / PI * (PI / beta).sin(),
        "closed form (beta/pi) sin(pi/beta) for Poisson base stations",
    )
    .with_param("beta", beta))
}

/// Tolerances of the Ginibre constant quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GinibreOptions {
    /// Absolute tolerance of the outer `t` integral.
    pub outer_tol: f64,
    /// Pointwise bound on the error of the truncated product.
    pub product_tol: f64,
    /// Bound on the integral beyond the truncation point `T_max`.
    pub tail_tol: f64,
    /// Hard cap on the number of product factors evaluated.
    pub max_terms: usize,
}

impl Default for GinibreOptions {
    fn default() -> Self {
        Self { outer_tol: 1e-9, product_tol: 1e-10, tail_tol: 1e-12, max_terms: 200_000 }
    }
}

impl GinibreOptions {
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            outer_tol: self.outer_tol * factor,
            product_tol: self.product_tol * factor,
            tail_tol: self.tail_tol * factor,
            max_terms: self.max_terms,
        }
    }
}

/// Order of the generalised Gauss–Laguerre rules for the inner integrals.
const LAGUERRE_ORDER: usize = 64;
/// Shapes below this use adaptive quadrature instead of a Laguerre rule.
const LAGUERRE_FROM: usize = 32;
/// Relative accuracy credited to a Laguerre inner integral.
const LAGUERRE_REL_ERR: f64 = 1e-11;

/// Smallest `T` with `e^α e^{-αcT} / (αc) ≤ tol`; the product is bounded by
/// `exp(-α Σ_{i≥1} x_i) ≤ e^α e^{-αct}`.
fn outer_cutoff(alpha: f64, c: f64, tol: f64) -> (f64, f64) {
    let ac = alpha * c;
    let t = ((alpha - (tol * ac).ln()) / ac).max(1.0);
    (t, alpha.exp() * (-ac * t).exp() / ac)
}

/// Second-order remainder of `Σ_{i>N} log(1 - α x_i)` beyond `-α Σ_{i>N} x_i`,
/// given the last evaluated `x_N` (the `x_i` decrease in `i`).
fn log_tail_remainder(alpha: f64, x_last: f64, tail1: f64) -> f64 {
    let ax = alpha * x_last;
    if ax >= 1.0 {
        return f64::INFINITY;
    }
    alpha * ax * tail1 / (2.0 * (1.0 - ax))
}

struct GinibreProduct<'a> {
    alpha: f64,
    beta: f64,
    fading: &'a FadingModel,
    /// `E[H^{1/β}] Γ(1-1/β)`.
    tail_slope: f64,
    opts: GinibreOptions,
    rules: Vec<Option<GaussRule>>,
    max_pointwise_error: f64,
    max_terms_used: usize,
    hit_cap: bool,
}

impl GinibreProduct<'_> {
    fn rule(&mut self, i: usize) -> Result<&GaussRule> {
        if self.rules.len() <= i {
            self.rules.resize(i + 1, None);
        }
        if self.rules[i].is_none() {
            self.rules[i] = Some(GaussRule::laguerre(LAGUERRE_ORDER, i as f64)?);
        }
        Ok(self.rules[i].as_ref().expect("just filled"))
    }

    /// `E[f((t/Y)^β)]` for `Y ~ Gamma(i+1, 1)` with its error estimate.
    fn gamma_expect(&mut self, i: usize, t: f64, complement: bool) -> Result<(f64, f64)> {
        let (beta, fading) = (self.beta, *self.fading);
        let f = move |y: f64| {
            let s = (t / y).powf(beta);
            if complement {
                fading.laplace_complement(s)
            } else {
                fading.laplace(s)
            }
        };
        if i >= LAGUERRE_FROM {
            let v = self.rule(i)?.expect(f);
            return Ok((v, LAGUERRE_REL_ERR * v.abs()));
        }
        let log_norm = ln_gamma(i as f64 + 1.0);
        let k = i as f64;
        let dens = move |y: f64| {
            if i == 0 {
                (-y).exp()
            } else {
                (k * y.ln() - y - log_norm).exp()
            }
        };
        let centre = k + 1.0;
        let breaks = [t.min(centre), t.max(centre), centre + 8.0 * centre.sqrt()];
        let r = integrate_to_infinity(|y| f(y) * dens(y), 0.0, &breaks, 1e-15, 1e-12);
        Ok((r.value, r.abs_error))
    }

    /// The truncated product at `t`.
    fn eval(&mut self, t: f64) -> Result<f64> {
        if t <= 0.0 {
            return Ok(1.0);
        }
        let alpha = self.alpha;
        let min_terms = ((10.0 / alpha).ceil() as usize).max(LAGUERRE_FROM);
        let (x0, e0) = self.gamma_expect(0, t, true)?;
        let mut sum_x = x0;
        let mut sum_err = e0;
        let mut log_p = 0.0;
        let total = t * self.tail_slope;
        let mut i = 1;
        loop {
            let (x, ex) = self.gamma_expect(i, t, true)?;
            sum_x += x;
            sum_err += ex;
            let term = if alpha * x < 0.5 {
                1.0 - alpha * x
            } else {
                let (l, el) = self.gamma_expect(i, t, false)?;
                sum_err += el;
                (1.0 - alpha) + alpha * l
            };
            if term <= 0.0 {
                return Ok(0.0);
            }
            log_p += term.ln();
            let tail1 = (total - sum_x).max(0.0);
            let remainder = log_tail_remainder(alpha, x, tail1);
            let partial = log_p.exp();
            let done = i >= min_terms && partial * remainder < self.opts.product_tol;
            if done || i >= self.opts.max_terms || partial == 0.0 {
                if !done && partial > 0.0 {
                    self.hit_cap = true;
                }
                let value = (log_p - alpha * tail1).exp();
                let err = partial * (remainder + 2.0 * alpha * sum_err);
                self.max_pointwise_error = self.max_pointwise_error.max(err);
                self.max_terms_used = self.max_terms_used.max(i);
                return Ok(value);
            }
            i += 1;
        }
    }
}

fn check_closed_form_laplace(fading: &FadingModel) -> Result<()> {
    fading.validate()?;
    if fading.has_closed_form_laplace() {
        Ok(())
    } else {
        Err(Error::Unsupported(format!(
            "fading {fading} has no closed-form Laplace transform; the Ginibre constant needs one"
        )))
    }
}

/// The limit of `θ^{1/β} P(SIR > θ)` for α-Ginibre base stations.
pub fn ginibre_tail_constant(
    alpha: f64,
    beta: f64,
    fading: &FadingModel,
    opts: GinibreOptions,
) -> Result<AsymptoticConstant> {
    check_alpha(alpha)?;
    check_beta(beta)?;
    check_closed_form_laplace(fading)?;
    let frac = fading.frac_moment(beta)?;
    let tail_slope = frac * gamma(1.0 - 1.0 / beta);
    let (t_max, cut_bound) = outer_cutoff(alpha, tail_slope, opts.tail_tol);
    let mut prod = GinibreProduct {
        alpha,
        beta,
        fading,
        tail_slope,
        opts,
        rules: Vec::new(),
        max_pointwise_error: 0.0,
        max_terms_used: 0,
        hit_cap: false,
    };
    let mut failure = None;
    let panels = 16;
    let mut integral = 0.0;
    let mut quad_err = 0.0;
    for k in 0..panels {
        let (a, b) = (t_max * k as f64 / panels as f64, t_max * (k + 1) as f64 / panels as f64);
        let r = gauss_kronrod(
            |t| match prod.eval(t) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            },
            a,
            b,
            opts.outer_tol / panels as f64,
            0.0,
        );
        integral += r.value;
        quad_err += r.abs_error;
    }
    if let Some(e) = failure {
        return Err(e);
    }
    let prefactor = alpha * frac / gamma(1.0 + 1.0 / beta);
    let err = quad_err + cut_bound + t_max * prod.max_pointwise_error;
    Ok(AsymptoticConstant {
        value: prefactor * integral,
        abs_error_estimate: prefactor * err,
        method: Method::Quadrature,
        provenance: "alpha-Ginibre tail constant: product over Palm gamma radii, Laguerre inner quadrature"
            .into(),
        parameters: BTreeMap::new(),
    }
    .with_param("alpha", alpha)
    .with_param("beta", beta)
    .with_param("fading", fading.to_string())
    .with_param("t_max", t_max)
    .with_param("max_terms", prod.max_terms_used as u64)
    .with_param("term_cap_reached", prod.hit_cap))
}

/// The α-Ginibre constant for Nakagami-m fading in the rescaled form
/// `αβ / B(m, 1/β) ∫_0^∞ Π_{i≥1}[1 - α + α E(1+(u/Y_i)^β)^{-m}] du`.
///
/// Shares no numerics with [`ginibre_tail_constant`]: adaptive quadrature
/// for every inner integral, a numerically integrated tail slope and an
/// adaptive Simpson outer rule.
pub fn nakagami_ginibre_constant(alpha: f64, beta: f64, m: f64, opts: GinibreOptions) -> Result<AsymptoticConstant> {
    check_alpha(alpha)?;
    check_beta(beta)?;
    if !(m > 0.0 && m.is_finite()) {
        return Err(domain(format!("Nakagami m must be positive (got {m})")));
    }
    let kernel = move |z: f64| -(-m * z.powf(beta).ln_1p()).exp_m1();
    // ∫_0^∞ [1 - (1 + v^{-β})^{-m}] dv, the second piece with v = e^x
    let head = gauss_kronrod(|v| kernel(1.0 / v), 0.0, 1.0, 1e-15, 1e-13);
    let tail = integrate_to_infinity(|x| kernel((-x).exp()) * x.exp(), 0.0, &[2.0, 8.0], 1e-15, 1e-13);
    let slope = head.value + tail.value;

    let min_terms = ((10.0 / alpha).ceil() as usize).max(32);
    let mut max_pointwise: f64 = 0.0;
    let mut hit_cap = false;
    let mut product = |u: f64| -> f64 {
        if u <= 0.0 {
            return 1.0;
        }
        // E[1 - (1+(u/Y)^β)^{-m}] for Y ~ Gamma(i+1, 1)
        let inner = |i: usize| {
            let k = i as f64;
            let ln_norm = ln_gamma(k + 1.0);
            let centre = k + 1.0;
            let w = centre.sqrt();
            let breaks = [(centre - 8.0 * w).max(0.0), u, centre, centre + 8.0 * w];
            integrate_to_infinity(
                |y| {
                    let dens = if i == 0 { (-y).exp() } else { (k * y.ln() - y - ln_norm).exp() };
                    kernel(u / y) * dens
                },
                0.0,
                &breaks,
                1e-15,
                1e-12,
            )
        };
        let r0 = inner(0);
        let mut sum = r0.value;
        let mut err = r0.abs_error;
        let mut log_p = 0.0;
        let mut i = 1;
        loop {
            let r = inner(i);
            let x = r.value;
            sum += x;
            err += r.abs_error;
            let factor = 1.0 - alpha * x;
            if factor <= 0.0 {
                return 0.0;
            }
            log_p += factor.ln();
            let tail1 = (u * slope - sum).max(0.0);
            let ax = alpha * x;
            let rem = if ax < 1.0 { alpha * ax * tail1 / (2.0 * (1.0 - ax)) } else { f64::INFINITY };
            let partial = log_p.exp();
            let done = i >= min_terms && partial * rem < opts.product_tol;
            if done || i >= opts.max_terms || partial == 0.0 {
                hit_cap |= !done && partial > 0.0;
                max_pointwise = max_pointwise.max(partial * (rem + 2.0 * alpha * err));
                return (log_p - alpha * tail1).exp();
            }
            i += 1;
        }
    };
    let ac = alpha * slope;
    let u_max = ((alpha - (opts.tail_tol * ac).ln()) / ac).max(1.0);
    let cut = alpha.exp() * (-ac * u_max).exp() / ac;
    let outer = adaptive_simpson(&mut product, 0.0, u_max, opts.outer_tol, 40);
    let prefactor = alpha * beta / beta_fn(m, 1.0 / beta);
    let err = outer.abs_error + cut + u_max * max_pointwise + u_max * (head.abs_error + tail.abs_error);
    Ok(AsymptoticConstant {
        value: prefactor * outer.value,
        abs_error_estimate: prefactor * err,
        method: Method::Quadrature,
        provenance: "alpha-Ginibre tail constant, Nakagami-m rescaled form with beta-function prefactor".into(),
        parameters: BTreeMap::new(),
    }
    .with_param("alpha", alpha)
    .with_param("beta", beta)
    .with_param("m", m)
    .with_param("u_max", u_max)
    .with_param("term_cap_reached", hit_cap))
}

/// Base station model for constants that exist for both processes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum ConstantProcess {
    Poisson,
    Ginibre { alpha: f64 },
}

/// Tail constant of either process; Poisson ignores the fading.
pub fn tail_constant(
    process: ConstantProcess,
    beta: f64,
    fading: &FadingModel,
    opts: GinibreOptions,
) -> Result<AsymptoticConstant> {
    match process {
        ConstantProcess::Poisson => poisson_tail_constant(beta),
        ConstantProcess::Ginibre { alpha } => ginibre_tail_constant(alpha, beta, fading, opts),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JensenComparison {
    /// `E[H^{1/β}] / (E H)^{1/β}`, in `(0, 1]`.
    pub ratio: f64,
    /// `ratio · C(β, δ_1)`, a lower bound on the constant with this fading.
    pub lower_bound: AsymptoticConstant,
}

/// Lower bound on the tail constant from Jensen's inequality applied to
/// `E[H^{1/β}]`, relative to the constant without fading.
pub fn jensen_comparison(
    process: ConstantProcess,
    beta: f64,
    fading: &FadingModel,
    opts: GinibreOptions,
) -> Result<JensenComparison> {
    check_beta(beta)?;
    fading.validate()?;
    let ratio = fading.frac_moment(beta)? / fading.mean().powf(1.0 / beta);
    let base = tail_constant(process, beta, &FadingModel::Dirac1, opts)?;
    let lower_bound = AsymptoticConstant {
        value: ratio * base.value,
        abs_error_estimate: ratio * base.abs_error_estimate,
        method: base.method,
        provenance: format!("fractional-moment ratio times the unfaded constant ({})", base.provenance),
        parameters: base.parameters.clone(),
    }
    .with_param("fading", fading.to_string())
    .with_param("ratio", ratio);
    Ok(JensenComparison { ratio, lower_bound })
}

/// `Γ(1-1/β) ζ₀^{1/β} E[H^{1/β}]`: for bounded path loss,
/// `limsup (1/h(θ)) log P(SIR > θ) ≤ -value`. Infinite when `ζ₀ = ∞`.
pub fn bounded_upper_exponent(beta: f64, fading: &FadingModel) -> Result<AsymptoticConstant> {
    check_beta(beta)?;
    fading.validate()?;
    let zeta0 = fading.mgf_critical();
    if zeta0 == 0.0 {
        return Err(Error::HeavyTailedMgf(fading.to_string()));
    }
    let value = if zeta0.is_infinite() {
        f64::INFINITY
    } else {
        gamma(1.0 - 1.0 / beta) * zeta0.powf(1.0 / beta) * fading.frac_moment(beta)?
    };
    Ok(AsymptoticConstant::closed_form(
        value,
        "upper decay exponent Gamma(1-1/beta) zeta0^(1/beta) E[H^(1/beta)] for bounded path loss",
    )
    .with_param("beta", beta)
    .with_param("fading", fading.to_string())
    .with_param("zeta0", if zeta0.is_finite() { Value::from(zeta0) } else { Value::from("inf") }))
}

/// `E[ℓ(|X₁|)^{-1/β}] (π/β) csc(π/β)` for Poisson base stations of intensity
/// `λ` and Rayleigh fading: `liminf (1/h(θ)) log P(SIR > θ) ≥ -value`.
pub fn bounded_lower_exponent(pathloss: &PathLossModel, intensity: f64) -> Result<AsymptoticConstant> {
    pathloss.validate()?;
    if !pathloss.is_bounded() {
        return Err(Error::Unsupported("the lower exponent needs bounded path loss".into()));
    }
    if !(intensity > 0.0 && intensity.is_finite()) {
        return Err(domain(format!("intensity must be positive (got {intensity})")));
    }
    let (d, beta) = (pathloss.dim(), pathloss.beta());
    let scale = 1.0 / (intensity * unit_ball_volume(d)?);
    // λπ_d|X₁|^d ~ Exp(1) and ℓ(|X₁|)^{-1/β} = g(|X₁|^d)^{1/β}
    let moment = integrate_to_infinity(
        |v| (-v).exp() * pathloss.g(v * scale).unwrap_or(f64::NAN).powf(1.0 / beta),
        0.0,
        &[1.0, 10.0, 40.0],
        1e-12,
        1e-12,
    );
    if !moment.value.is_finite() {
        return Err(Error::Divergent("E[l(|X1|)^(-1/beta)] is not finite".into()));
    }
    Ok(bounded_lower_exponent_from_moment(beta, moment.value, moment.abs_error)?
        .with_param("pathloss", pathloss.to_string())
        .with_param("intensity", intensity))
}

/// The lower exponent from a given `E[ℓ(|X₁|)^{-1/β}]`; `moment = 1`
/// corresponds to path loss identically one on the support.
pub fn bounded_lower_exponent_from_moment(beta: f64, moment: f64, moment_err: f64) -> Result<AsymptoticConstant> {
    check_beta(beta)?;
    let k = PI / beta / (PI / beta).sin();
    Ok(AsymptoticConstant {
        value: moment * k,
        abs_error_estimate: moment_err * k,
        method: if moment_err == 0.0 { Method::ClosedForm } else { Method::Quadrature },
        provenance: "lower decay exponent E[l(|X1|)^(-1/beta)] (pi/beta) csc(pi/beta), Poisson and Rayleigh fading"
            .into(),
        parameters: BTreeMap::new(),
    }
    .with_param("beta", beta)
    .with_param("moment", moment))
}
