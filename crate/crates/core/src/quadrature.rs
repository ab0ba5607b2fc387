//! Numerical integration and root finding.
//!
//! Adaptive Simpson and adaptive Gauss–Kronrod (7/15) on finite intervals,
//! a mapped variant for `[a, ∞)`, and Gauss rules built by the Golub–Welsch
//! method (Laguerre with arbitrary parameter, Hermite for the normal law).

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
}

/// Adaptive Simpson rule with Richardson correction.
pub fn adaptive_simpson<F>(mut f: F, a: f64, b: f64, abs_tol: f64, max_depth: u32) -> QuadResult
where
    F: FnMut(f64) -> f64,
{
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    let mut evals = 3;
    let mut err = 0.0;
    let value = simpson_step(&mut f, a, b, fa, fm, fb, whole, abs_tol, max_depth, &mut evals, &mut err);
    QuadResult { value, abs_error: err, evaluations: evals }
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: FnMut(f64) -> f64>(
    f: &mut F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
    evals: &mut usize,
    err: &mut f64,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    *evals += 2;
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        *err += delta.abs() / 15.0;
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1, evals, err)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1, evals, err)
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Globally adaptive Gauss–Kronrod 7/15 quadrature on `[a, b]`.
pub fn gauss_kronrod<F>(mut f: F, a: f64, b: f64, abs_tol: f64, rel_tol: f64) -> QuadResult
where
    F: FnMut(f64) -> f64,
{
    const MAX_INTERVALS: usize = 4000;
    let (v, e) = gk15(&mut f, a, b);
    let mut pieces = vec![(a, b, v, e)];
    let mut evals = 15;
    loop {
        let (total, err) = pieces
            .iter()
            .fold((0.0, 0.0), |(s, r), p| (s + p.2, r + p.3));
        if err <= abs_tol.max(rel_tol * total.abs()) || pieces.len() >= MAX_INTERVALS {
            return QuadResult { value: total, abs_error: err, evaluations: evals };
        }
        let worst = pieces
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let (lo, hi, _, _) = pieces.swap_remove(worst);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval can no longer be split in f64; accept what we have
            return QuadResult { value: total, abs_error: err, evaluations: evals };
        }
        let (v1, e1) = gk15(&mut f, lo, mid);
        let (v2, e2) = gk15(&mut f, mid, hi);
        evals += 30;
        pieces.push((lo, mid, v1, e1));
        pieces.push((mid, hi, v2, e2));
    }
}

/// Integral over `[a, ∞)`: finite panels split at `breaks`, then the mapped
/// tail `y = b + u / (1 - u)`.
pub fn integrate_to_infinity<F>(
    mut f: F,
    a: f64,
    breaks: &[f64],
    abs_tol: f64,
    rel_tol: f64,
) -> QuadResult
where
    F: FnMut(f64) -> f64,
{
    let mut points: Vec<f64> = std::iter::once(a)
        .chain(breaks.iter().copied().filter(|&x| x > a && x.is_finite()))
        .collect();
    points.sort_by(f64::total_cmp);
    points.dedup();
    let panels = points.len();
    let tol = abs_tol / panels as f64;
    let mut out = QuadResult { value: 0.0, abs_error: 0.0, evaluations: 0 };
    for w in points.windows(2) {
        let r = gauss_kronrod(&mut f, w[0], w[1], tol, rel_tol);
        out.value += r.value;
        out.abs_error += r.abs_error;
        out.evaluations += r.evaluations;
    }
    let start = *points.last().unwrap_or(&a);
    let r = gauss_kronrod(
        |u: f64| {
            let one_minus = 1.0 - u;
            let y = start + u / one_minus;
            let v = f(y) / (one_minus * one_minus);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        },
        0.0,
        1.0,
        tol,
        rel_tol,
    );
    out.value += r.value;
    out.abs_error += r.abs_error;
    out.evaluations += r.evaluations;
    out
}

/// Bisection for a sign change of `f` on `[lo, hi]`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> Result<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() || !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::Numerical(format!(
            "no sign change on [{lo}, {hi}] (f = {flo}, {fhi})"
        )));
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= x_tol || mid <= lo || mid >= hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Gauss rule normalised to a probability measure: `Σ w_k f(x_k) ≈ E f(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn expect<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Golub–Welsch: eigenvalues of the Jacobi matrix are the nodes, squared
    /// first components of the eigenvectors the (normalised) weights.
    pub fn from_jacobi(diag: &[f64], offdiag: &[f64]) -> Result<Self> {
        let n = diag.len();
        let mut d = diag.to_vec();
        let mut e = vec![0.0; n];
        e[..n - 1].copy_from_slice(&offdiag[..n - 1]);
        let mut z = vec![0.0; n];
        z[0] = 1.0;
        tridiagonal_ql(&mut d, &mut e, &mut z)?;
        let mut pairs: Vec<(f64, f64)> = d.into_iter().zip(z.into_iter().map(|v| v * v)).collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let total: f64 = pairs.iter().map(|p| p.1).sum();
        Ok(Self {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1 / total).collect(),
        })
    }

    /// Generalised Gauss–Laguerre rule for the weight `y^a e^{-y}`, i.e. the
    /// law Gamma(a + 1, 1).
    pub fn laguerre(order: usize, a: f64) -> Result<Self> {
        let diag: Vec<f64> = (0..order).map(|k| 2.0 * k as f64 + a + 1.0).collect();
        let off: Vec<f64> = (0..order)
            .map(|k| ((k as f64 + 1.0) * (k as f64 + 1.0 + a)).sqrt())
            .collect();
        Self::from_jacobi(&diag, &off)
    }

    /// Gauss–Hermite rule for the standard normal law.
    pub fn hermite(order: usize) -> Result<Self> {
        let diag = vec![0.0; order];
        let off: Vec<f64> = (0..order).map(|k| (k as f64 + 1.0).sqrt()).collect();
        Self::from_jacobi(&diag, &off)
    }
}

/// Implicit QL with Wilkinson shifts on a symmetric tridiagonal matrix,
/// tracking only the first row of the eigenvector matrix.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], z: &mut [f64]) -> Result<()> {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 100 {
                return Err(Error::Numerical("tridiagonal QL did not converge".into()));
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut deflated = false;
            let mut i = m;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    deflated = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                let zf = z[i + 1];
                z[i + 1] = s * z[i] + c * zf;
                z[i] = c * z[i] - s * zf;
            }
            if deflated {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use statrs::function::gamma::ln_gamma;

    #[test]
    fn simpson_polynomial_exact() {
        let r = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 30);
        assert_relative_eq!(r.value, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn kronrod_smooth_and_infinite() {
        let r = gauss_kronrod(f64::sin, 0.0, std::f64::consts::PI, 1e-13, 0.0);
        assert_relative_eq!(r.value, 2.0, epsilon = 1e-12);
        let r = integrate_to_infinity(|x| (-x).exp(), 0.0, &[1.0], 1e-13, 0.0);
        assert_relative_eq!(r.value, 1.0, epsilon = 1e-12);
        let r = integrate_to_infinity(|x| 1.0 / (1.0 + x * x), 0.0, &[], 1e-12, 0.0);
        assert_relative_eq!(r.value, std::f64::consts::FRAC_PI_2, epsilon = 1e-10);
    }

    #[test]
    fn laguerre_moments_match_gamma() {
        // E[Y^k] for Y ~ Gamma(a+1, 1) is Γ(a+1+k)/Γ(a+1)
        for &a in &[0.0, 3.0, 40.0, 1500.0] {
            let rule = GaussRule::laguerre(64, a).unwrap();
            assert_relative_eq!(rule.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-13);
            for k in 1..=5 {
                let exact = (ln_gamma(a + 1.0 + k as f64) - ln_gamma(a + 1.0)).exp();
                let got = rule.expect(|y| y.powi(k));
                assert_relative_eq!(got, exact, max_relative = 1e-11);
            }
            // not polynomial: only accurate once the weight keeps nodes off the origin
            if a >= 32.0 {
                assert_relative_eq!(rule.expect(|y| 1.0 / y), 1.0 / a, max_relative = 1e-10);
            }
        }
    }

    #[test]
    fn hermite_moments() {
        let rule = GaussRule::hermite(128).unwrap();
        assert_relative_eq!(rule.expect(|x| x * x), 1.0, epsilon = 1e-12);
        assert_relative_eq!(rule.expect(|x| x.powi(4)), 3.0, epsilon = 1e-11);
        assert_relative_eq!(rule.expect(f64::exp), 0.5f64.exp(), max_relative = 1e-13);
    }

    #[test]
    fn bisect_finds_root() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_relative_eq!(r, 2f64.sqrt(), epsilon = 1e-13);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-6).is_err());
    }
}
