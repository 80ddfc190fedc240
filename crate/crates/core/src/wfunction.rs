//! The W-function f(α, β, γ, δ; z), the solution of
//! -z f'(z) + β f(z) = E(α+1; δ; z) E(α+γ; β; -z)
//! that tends to Γ(α+1)Γ(α+γ)/(Γ(β+1)Γ(δ)) as |z| → ∞.
//!
//! Three evaluation paths:
//! * a series of E-functions in powers of 1/z, best for large |z|;
//! * a Kampé de Fériet double series in -1/z and 1/z;
//! * a Kummer-transformed double series whose diagonal weights are lower
//!   incomplete gamma integrals. Its terms do not alternate along the real
//!   axis, so it stays accurate near z = 0 where the other two cancel.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::doubleseries::{kdf_diagonal_blocks, kdf_sum, sum_antidiagonals, KdfSpec};
use crate::error::{Error, Result};
use crate::hyperseries::{kummer_m, ParamList, SeriesControl};
use crate::macrobert::{e_eval, rebudget, EFunctionSpec};
use crate::numerics::{
    ensure_finite, gamma, gamma_ratio, nonpositive_integer_near, reciprocal_gamma, Complex, EvalResult, POLE_TOLERANCE,
};
use crate::parallel::map_ordered;

const ONE: Complex = Complex::new(1.0, 0.0);

/// Inner E-functions are evaluated in batches of this size.
const ESERIES_BATCH: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WArgs {
    pub alpha: Complex,
    pub beta: Complex,
    pub gamma: Complex,
    pub delta: Complex,
    pub z: Complex,
}

impl WArgs {
    pub fn new(alpha: Complex, beta: Complex, gamma: Complex, delta: Complex, z: Complex) -> Result<Self> {
        let args = WArgs {
            alpha,
            beta,
            gamma,
            delta,
            z,
        };
        args.validate()?;
        Ok(args)
    }

    /// Real-parameter shorthand.
    pub fn real(alpha: f64, beta: f64, gamma: f64, delta: f64, z: Complex) -> Result<Self> {
        let r = |v: f64| Complex::new(v, 0.0);
        Self::new(r(alpha), r(beta), r(gamma), r(delta), z)
    }

    pub fn with_z(self, z: Complex) -> Result<Self> {
        Self::new(self.alpha, self.beta, self.gamma, self.delta, z)
    }

    pub fn validate(&self) -> Result<()> {
        if self.z == Complex::new(0.0, 0.0) || !(self.z.re.is_finite() && self.z.im.is_finite()) {
            return Err(Error::Parameter(format!("z = {} must be finite and nonzero", self.z)));
        }
        let checks = [
            ("delta", self.delta),
            ("beta", self.beta),
            ("alpha+1", self.alpha + ONE),
            ("alpha+gamma", self.alpha + self.gamma),
        ];
        for (name, v) in checks {
            if nonpositive_integer_near(v, POLE_TOLERANCE).is_some() {
                return Err(Error::Parameter(format!("{name} = {v} is a nonpositive integer")));
            }
        }
        Ok(())
    }

    /// Γ(α+1)Γ(α+γ)/(Γ(β+1)Γ(δ)), the value at infinity.
    pub fn prefactor(&self) -> Result<Complex> {
        let v = gamma_ratio(self.alpha + ONE, self.beta + ONE)? * gamma_ratio(self.alpha + self.gamma, self.delta)?;
        ensure_finite(v, "W prefactor")
    }

    fn kdf_spec(&self, z: Complex) -> KdfSpec {
        KdfSpec {
            a1: self.beta,
            b1: self.alpha + ONE,
            b2: self.alpha + self.gamma,
            c1: self.beta + ONE,
            d1: self.delta,
            d2: self.beta,
            z1: -z.inv(),
            z2: z.inv(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WPath {
    Auto,
    ESeries,
    Kdf,
    Transformed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfPlane {
    NegativeRe,
    PositiveRe,
}

/// Σ_ν z^{-ν} Γ(α+γ+ν)/(ν! Γ(β+ν)) · E(α+1, β+ν; δ, β+1+ν; z).
pub fn w_eval_eseries(args: &WArgs, ctl: &SeriesControl) -> Result<EvalResult> {
    args.validate()?;
    ctl.validate()?;
    let z = args.z;
    let inner_scale = gamma_ratio(args.alpha + ONE, args.delta)?.norm();
    let mut coef = gamma_ratio(args.alpha + args.gamma, args.beta)?;
    let mut partial = Complex::new(0.0, 0.0);
    let mut err = 0.0;
    let mut terms = 0usize;
    let mut prev_abs = f64::INFINITY;
    let mut run = 0;
    let mut nu0 = 0usize;
    loop {
        let batch: Vec<usize> = (nu0..nu0 + ESERIES_BATCH).collect();
        let inner = map_ordered(ctl.execution, &batch, |&nu| {
            let bn = args.beta + nu as f64;
            let spec = EFunctionSpec::new(
                ParamList::from_values(&[args.alpha + ONE, bn]),
                ParamList::from_values(&[args.delta, bn + ONE]),
                z,
            )?;
            e_eval(&spec, ctl)
        });
        for (nu, e) in batch.into_iter().zip(inner) {
            let e = e?;
            terms += e.terms_used;
            if terms > ctl.max_terms {
                return Err(Error::NoConvergence { terms });
            }
            let u = coef * e.value;
            partial += u;
            err += coef.norm() * e.abs_error_estimate;
            let u_abs = u.norm();
            let threshold = ctl.rel_tol * partial.norm();
            if u_abs < prev_abs && u_abs <= threshold {
                run += 1;
            } else {
                run = 0;
            }
            if run >= ctl.stagnation_window {
                let q = (u_abs / prev_abs).min(0.5);
                let mut tail = 2.0 * u_abs * q / (1.0 - q);
                if nu + 1 >= 10 {
                    tail = tail.max(2.0 * inner_scale * tail_estimate(args, nu as u32 + 1)?);
                }
                let r = EvalResult::from_budget(partial, err + tail, terms, ctl.rel_tol, true);
                return Ok(r);
            }
            prev_abs = u_abs;
            let k = nu as f64;
            coef *= (args.alpha + args.gamma + k) / ((args.beta + k) * (k + 1.0) * z);
            if !(coef.re.is_finite() && coef.im.is_finite()) {
                return Err(Error::Overflow("E-series coefficient".into()));
            }
        }
        nu0 += ESERIES_BATCH;
    }
}

/// C · F^{1:1;1}_{1:1;1}(β : α+1; α+γ ; β+1 : δ; β ; -1/z, 1/z).
pub fn w_eval_kdf(args: &WArgs, ctl: &SeriesControl) -> Result<EvalResult> {
    args.validate()?;
    let pre = args.prefactor()?;
    let sum = kdf_sum(&args.kdf_spec(args.z), ctl)?;
    Ok(rebudget(sum.result.scaled(pre), ctl))
}

/// ∫_0^1 t^{s-1} e^{-x t} dt = e^{-x} Σ_k x^k/(s)_{k+1}, with a relative
/// rounding estimate.
fn unit_lower_gamma(s: Complex, x: Complex) -> Result<(Complex, f64)> {
    let mut t = s.inv();
    let mut sum = t;
    let mut sum_abs = t.norm();
    let xr = x.norm();
    for k in 0..100_000usize {
        t *= x / (s + (k as f64 + 1.0));
        sum += t;
        sum_abs += t.norm();
        if (k as f64) > xr && t.norm() <= 1e-17 * sum.norm() {
            let value = ensure_finite((-x).exp() * sum, "incomplete gamma weight")?;
            let rel = 4.0 * f64::EPSILON * sum_abs / sum.norm().max(f64::MIN_POSITIVE);
            return Ok((value, rel));
        }
    }
    Err(Error::NoConvergence { terms: 100_000 })
}

/// Kummer-transformed double series. With x = -1/z (Re z < 0) or x = 1/z
/// (Re z >= 0), W = Cβ Σ_n g(β+n, x) Σ_{m+ν=n} A_m B_ν with
/// g(s, x) = ∫_0^1 t^{s-1} e^{-xt} dt.
pub fn w_eval_transformed(args: &WArgs, ctl: &SeriesControl) -> Result<EvalResult> {
    args.validate()?;
    let pre = args.prefactor()? * args.beta;
    let z = args.z;
    let (x, a_top, b_top) = if z.re < 0.0 {
        (-z.inv(), args.alpha + ONE, args.beta - args.alpha - args.gamma)
    } else {
        (z.inv(), args.delta - args.alpha - ONE, args.alpha + args.gamma)
    };
    let (delta, beta) = (args.delta, args.beta);
    let mut g_rel = 0.0f64;
    let mut g_err: Option<Error> = None;
    let sum = sum_antidiagonals(
        ctl,
        false,
        |n| match unit_lower_gamma(beta + n as f64, x) {
            Ok((g, rel)) => {
                g_rel = g_rel.max(rel);
                g
            }
            Err(e) => {
                g_err.get_or_insert(e);
                Complex::new(f64::NAN, 0.0)
            }
        },
        move |m| {
            let k = m as f64;
            x * (a_top + k) / ((delta + k) * (k + 1.0))
        },
        move |nu| {
            let k = nu as f64;
            x * (b_top + k) / ((beta + k) * (k + 1.0))
        },
    );
    if let Some(e) = g_err {
        return Err(e);
    }
    let sum = sum?;
    let mass: f64 = sum.blocks.iter().map(|b| b.norm()).sum();
    let r = sum.result;
    let budget = EvalResult {
        abs_error_estimate: r.abs_error_estimate + g_rel * mass,
        ..r
    };
    Ok(rebudget(budget.scaled(pre), ctl))
}

fn better(a: EvalResult, b: EvalResult) -> EvalResult {
    match (a.converged, b.converged) {
        (true, false) => a,
        (false, true) => b,
        _ => {
            let ra = a.abs_error_estimate / a.value.norm().max(1.0);
            let rb = b.abs_error_estimate / b.value.norm().max(1.0);
            if ra <= rb {
                a
            } else {
                b
            }
        }
    }
}

/// Evaluates along `path`. `Auto` uses the E-series for |z| >= 4, the
/// double series below that, and falls back to the transformed series when
/// the double series loses its digits.
pub fn w_eval_path(args: &WArgs, path: WPath, ctl: &SeriesControl) -> Result<EvalResult> {
    match path {
        WPath::ESeries => w_eval_eseries(args, ctl),
        WPath::Kdf => w_eval_kdf(args, ctl),
        WPath::Transformed => w_eval_transformed(args, ctl),
        WPath::Auto => {
            if args.z.norm() >= 4.0 {
                return w_eval_eseries(args, ctl);
            }
            let kdf = w_eval_kdf(args, ctl);
            if matches!(&kdf, Ok(r) if r.converged) && args.z.norm() >= 1.0 {
                return kdf;
            }
            match (kdf, w_eval_transformed(args, ctl)) {
                (Ok(a), Ok(b)) => Ok(better(a, b)),
                (Ok(a), Err(_)) => Ok(a),
                (Err(_), Ok(b)) => Ok(b),
                (Err(k), Err(t)) => Err(if args.z.norm() < 1.0 { t } else { k }),
            }
        }
    }
}

pub fn w_eval(args: &WArgs, ctl: &SeriesControl) -> Result<EvalResult> {
    w_eval_path(args, WPath::Auto, ctl)
}

/// Γ(α+1)Γ(α+γ)/(Γ(β+1)Γ(δ)).
pub fn w_asymptotic_infinity(args: &WArgs) -> Result<Complex> {
    Ok(gamma(args.alpha + ONE)?
        * gamma(args.alpha + args.gamma)?
        * reciprocal_gamma(args.beta + ONE)
        * reciprocal_gamma(args.delta))
}

/// Leading behaviour as z → 0 in the given half-plane:
/// e^{-1/z}(-z)^{γ+δ}Γ(α+γ)/Γ(β-α-γ) for Re z < 0 and
/// e^{1/z} z^{β+2-γ}Γ(α+1)/Γ(δ-α-1) for Re z > 0, principal branches.
/// A pole in the denominator gamma gives exactly 0.
pub fn w_asymptotic_zero(args: &WArgs, half_plane: HalfPlane) -> Result<Complex> {
    let z = args.z;
    let (log_part, num, den) = match half_plane {
        HalfPlane::NegativeRe => {
            if z.re >= 0.0 {
                return Err(Error::Parameter(format!("Re z = {} is not negative", z.re)));
            }
            (
                -z.inv() + (args.gamma + args.delta) * (-z).ln(),
                args.alpha + args.gamma,
                args.beta - args.alpha - args.gamma,
            )
        }
        HalfPlane::PositiveRe => {
            if z.re <= 0.0 {
                return Err(Error::Parameter(format!("Re z = {} is not positive", z.re)));
            }
            (
                z.inv() + (args.beta + 2.0 - args.gamma) * z.ln(),
                args.alpha + ONE,
                args.delta - args.alpha - ONE,
            )
        }
    };
    let rg = reciprocal_gamma(den);
    if rg == Complex::new(0.0, 0.0) || nonpositive_integer_near(den, POLE_TOLERANCE).is_some() {
        return Ok(Complex::new(0.0, 0.0));
    }
    ensure_finite(log_part.exp() * gamma(num)? * rg, "small-z asymptotic form")
}

/// |R| / max(1, |f|) for R = -z f' + β f - E(α+1; δ; z) E(α+γ; β; -z), with
/// f and -z f' from the double series (term-wise derivative).
pub fn ode_residual(args: &WArgs, ctl: &SeriesControl) -> Result<f64> {
    let (f, minus_z_df) = w_with_derivative(args, ctl)?;
    ode_residual_with(args, f, minus_z_df, ctl)
}

/// f(z) and -z f'(z) from the double series.
pub fn w_with_derivative(args: &WArgs, ctl: &SeriesControl) -> Result<(Complex, Complex)> {
    args.validate()?;
    let pre = args.prefactor()?;
    let sum = kdf_sum(&args.kdf_spec(args.z), ctl)?;
    Ok((pre * sum.result.value, pre * sum.index_weighted))
}

/// The residual for caller-supplied values of f and -z f'.
pub fn ode_residual_with(args: &WArgs, f: Complex, minus_z_df: Complex, ctl: &SeriesControl) -> Result<f64> {
    let z = args.z;
    let e1 = e_eval(&EFunctionSpec::simple(args.alpha + ONE, args.delta, z)?, ctl)?;
    let e2 = e_eval(&EFunctionSpec::simple(args.alpha + args.gamma, args.beta, -z)?, ctl)?;
    let r = minus_z_df + args.beta * f - e1.value * e2.value;
    Ok(r.norm() / f.norm().max(1.0))
}

/// Stirling-based magnitude of the ν-th 2F2 term u_ν of the E-series
/// (u_ν carries Γ(α+γ+ν)/(ν! Γ(β+1+ν)) and omits Γ(α+1)/Γ(δ)):
/// |M(α+1; δ; -1/z) z^{-ν} e^ν ν^{α+γ-β-ν-3/2}| / √(2π).
pub fn tail_estimate(args: &WArgs, nu: u32) -> Result<f64> {
    if nu < 10 {
        return Err(Error::Parameter(format!("tail estimate needs nu >= 10, got {nu}")));
    }
    let m = kummer_m(args.alpha + ONE, args.delta, -args.z.inv(), &SeriesControl::default())?.value;
    let n = f64::from(nu);
    let exponent = (args.alpha + args.gamma - args.beta).re - n - 1.5;
    let log_mag = m.norm().ln() - 0.5 * (2.0 * PI).ln() - n * args.z.norm().ln() + n + exponent * n.ln();
    Ok(log_mag.exp())
}

/// The coefficients c0, c1, c2 of f = c0 + c1/z + c2/z^2 + O(z^-3), read off
/// the first three anti-diagonals of the double series.
pub fn w_expansion_coefficients(args: &WArgs) -> Result<[Complex; 3]> {
    let pre = args.prefactor()?;
    let blocks = kdf_diagonal_blocks(&args.kdf_spec(ONE), 3)?;
    Ok([pre * blocks[0], pre * blocks[1], pre * blocks[2]])
}

/// Closed gamma expressions for the leading coefficients in which the
/// z^-2 term keeps only the mixed (1, 1) product of the two inner series.
/// c0 and c1 agree with [`w_expansion_coefficients`]; c2 omits the (2, 0)
/// and (0, 2) contributions.
pub fn w_expansion_coefficients_cross_term(args: &WArgs) -> Result<[Complex; 3]> {
    let (a, b, g, d) = (args.alpha, args.beta, args.gamma, args.delta);
    let c0 = gamma(a + 1.0)? * gamma(a + g)? / (b * gamma(b)? * gamma(d)?);
    let c1 = gamma(a + 1.0)? * gamma(a + g + 1.0)? / (gamma(b + 2.0)? * gamma(d)?)
        - gamma(a + 2.0)? * gamma(a + g)? / ((b + 1.0) * gamma(b)? * gamma(d + 1.0)?);
    let c2 = -gamma(a + 2.0)? * gamma(a + g + 1.0)? / ((b + 2.0) * gamma(b + 1.0)? * gamma(d + 1.0)?);
    Ok([c0, c1, c2])
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn rel(a: Complex, b: Complex) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn value_at_infinity() {
        let ctl = SeriesControl::default();
        let args = WArgs::real(1.0, 2.0, 1.0, 3.0, c(1e6, 0.0)).unwrap();
        assert!((w_eval_eseries(&args, &ctl).unwrap().value - c(0.25, 0.0)).norm() < 1e-5);
        assert!((w_eval_kdf(&args, &ctl).unwrap().value - c(0.25, 0.0)).norm() < 1e-5);
        assert!(rel(w_asymptotic_infinity(&args).unwrap(), c(0.25, 0.0)) < 1e-15);
        let args = WArgs::real(1.0, 1.0, 0.0, 1.0, c(1e6, 0.0)).unwrap();
        assert!((w_eval_eseries(&args, &ctl).unwrap().value - c(1.0, 0.0)).norm() < 1e-5);
        assert!(rel(w_asymptotic_infinity(&args).unwrap(), c(1.0, 0.0)) < 1e-15);
        let args = WArgs::real(0.5, 1.5, 0.5, 2.0, c(1.0, 0.0)).unwrap();
        assert!(rel(w_asymptotic_infinity(&args).unwrap(), c(2.0 / 3.0, 0.0)) < 1e-14);
    }

    #[test]
    fn reference_values_all_paths() {
        let ctl = SeriesControl::default();
        let cases = [
            (
                WArgs::real(0.5, 1.5, 0.5, 2.0, c(2.0, 1.0)).unwrap(),
                c(0.656_018_566_091_294_1, 0.003_157_499_900_202_874),
            ),
            (
                WArgs::real(0.5, 1.5, 0.5, 2.0, c(3.0, 0.0)).unwrap(),
                c(0.658_020_594_037_590_3, 0.0),
            ),
            (
                WArgs::real(0.3, 1.1, 0.2, 1.7, c(0.3, -0.2)).unwrap(),
                c(1.276_698_842_573_54, -0.010_453_063_228_630_763),
            ),
        ];
        for (args, want) in cases {
            for path in [WPath::ESeries, WPath::Kdf, WPath::Transformed, WPath::Auto] {
                if path == WPath::ESeries && args.z.norm() < 1.0 {
                    continue;
                }
                let got = w_eval_path(&args, path, &ctl).unwrap();
                assert!(rel(got.value, want) < 1e-11, "{path:?} at {}: {}", args.z, got.value);
            }
        }
    }

    #[test]
    fn small_z_reference_values() {
        let ctl = SeriesControl::default();
        let base = WArgs::real(0.3, 1.1, 0.2, 1.7, c(1.0, 0.0)).unwrap();
        for (z, want) in [
            (-0.02, 3_717_006_403_182_892_489.0),
            (-0.05, 2_043_474.906_228_530_7),
            (0.05, 38_965.480_146_941_8),
        ] {
            let args = base.with_z(c(z, 0.0)).unwrap();
            let got = w_eval(&args, &ctl).unwrap();
            assert!(rel(got.value, c(want, 0.0)) < 1e-11, "z = {z}: {}", got.value);
            assert!(got.converged);
        }
        let args = base.with_z(c(-0.05, 0.0)).unwrap();
        let asym = w_asymptotic_zero(&args, HalfPlane::NegativeRe).unwrap();
        assert!(rel(asym, c(1_947_855.857_069_993_9, 0.0)) < 1e-12);
    }

    #[test]
    fn small_z_asymptotic_ratios() {
        let ctl = SeriesControl::default();
        let base = WArgs::real(0.3, 1.1, 0.2, 1.7, c(1.0, 0.0)).unwrap();
        let neg = base.with_z(c(-0.02, 0.0)).unwrap();
        let ratio = w_eval(&neg, &ctl).unwrap().value / w_asymptotic_zero(&neg, HalfPlane::NegativeRe).unwrap();
        assert!((ratio.re - 1.0).abs() < 0.05 && ratio.im.abs() < 1e-12);
        let pos = base.with_z(c(0.02, 0.0)).unwrap();
        let ratio = w_eval(&pos, &ctl).unwrap().value / w_asymptotic_zero(&pos, HalfPlane::PositiveRe).unwrap();
        assert!((ratio.re - 1.0).abs() < 0.1);
    }

    #[test]
    fn asymptotic_zero_pole_and_half_plane() {
        let args = WArgs::real(1.0, 2.0, 1.0, 3.0, c(-0.01, 0.0)).unwrap();
        assert_eq!(w_asymptotic_zero(&args, HalfPlane::NegativeRe).unwrap(), c(0.0, 0.0));
        assert!(w_asymptotic_zero(&args, HalfPlane::PositiveRe).is_err());
    }

    #[test]
    fn ode_residuals() {
        let ctl = SeriesControl::default();
        for args in [
            WArgs::real(1.0, 2.0, 1.0, 3.0, c(2.0, 0.0)).unwrap(),
            WArgs::real(0.5, 1.5, 0.5, 2.0, c(2.0, 1.0)).unwrap(),
        ] {
            assert!(ode_residual(&args, &ctl).unwrap() <= 1e-8);
            let (f, d) = w_with_derivative(&args, &ctl).unwrap();
            assert!(ode_residual_with(&args, f * 1.01, d, &ctl).unwrap() >= 1e-3);
        }
    }

    #[test]
    fn tail_estimate_behaviour() {
        let ctl = SeriesControl::default();
        let args = WArgs::real(1.0, 2.0, 1.0, 3.0, c(2.0, 0.0)).unwrap();
        // Direct u_50 = z^-50 Γ(α+γ+50)/(50! Γ(β+51)) 2F2(α+1, β+50; δ, β+51; -1/z).
        let spec = EFunctionSpec::new(
            ParamList::from_values(&[c(2.0, 0.0), c(52.0, 0.0)]),
            ParamList::from_values(&[c(3.0, 0.0), c(53.0, 0.0)]),
            c(2.0, 0.0),
        )
        .unwrap();
        let e = e_eval(&spec, &ctl).unwrap().value / spec.prefactor().unwrap();
        let coef = gamma_ratio(c(52.0, 0.0), c(53.0, 0.0)).unwrap() / gamma(c(51.0, 0.0)).unwrap() / 2f64.powi(50);
        let ratio = tail_estimate(&args, 50).unwrap() / (coef * e).norm();
        assert!((0.5..=2.0).contains(&ratio), "ratio {ratio}");

        let mut prev = f64::INFINITY;
        for nu in 10..80 {
            let t = tail_estimate(&args, nu).unwrap();
            assert!(t < prev);
            prev = t;
        }
        let unit = args.with_z(c(1.0, 0.0)).unwrap();
        assert!(tail_estimate(&unit, 30).unwrap() >= tail_estimate(&args, 30).unwrap());
        assert!(tail_estimate(&args, 5).is_err());
    }

    #[test]
    fn expansion_coefficients() {
        let args = WArgs::real(1.0, 2.0, 1.0, 3.0, c(50.0, 0.0)).unwrap();
        let full = w_expansion_coefficients(&args).unwrap();
        let cross = w_expansion_coefficients_cross_term(&args).unwrap();
        assert!(rel(full[0], c(0.25, 0.0)) < 1e-15);
        assert!((full[0] - cross[0]).norm() < 1e-15);
        assert!((full[1] - cross[1]).norm() < 1e-15);
        // The cross term alone is -1/12; the squared terms add 3/32.
        assert!((cross[2] - c(-1.0 / 12.0, 0.0)).norm() < 1e-15);
        assert!((full[2] - cross[2] - c(0.093_75, 0.0)).norm() < 1e-15);
        // f(50) - c0 - c1/50 - c2/2500 is O(50^-3).
        let f = w_eval_kdf(&args, &SeriesControl::default()).unwrap().value;
        let z = 50.0;
        let resid = f - full[0] - full[1] / z - full[2] / (z * z);
        assert!(resid.norm() < 2.0 / (z * z * z));
    }

    #[test]
    fn invalid_args() {
        assert!(WArgs::real(1.0, 2.0, 1.0, 3.0, c(0.0, 0.0)).is_err());
        assert!(WArgs::real(1.0, 2.0, 1.0, 0.0, c(1.0, 0.0)).is_err());
        assert!(WArgs::real(-1.0, 2.0, 1.0, 3.0, c(1.0, 0.0)).is_err());
        assert!(WArgs::real(1.0, -2.0, 1.0, 3.0, c(1.0, 0.0)).is_err());
    }

    fn arb_c() -> impl Strategy<Value = Complex> {
        (0.3f64..2.0, -0.5f64..0.5).prop_map(|(re, im)| Complex::new(re, im))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn paths_agree(a in arb_c(), b in arb_c(), g in arb_c(), d in arb_c(), r in 1.0f64..10.0, th in -3.1f64..3.1) {
            let ctl = SeriesControl::default();
            let args = WArgs::new(a, b, g, d, Complex::from_polar(r, th)).unwrap();
            let e = w_eval_eseries(&args, &ctl).unwrap().value;
            let k = w_eval_kdf(&args, &ctl).unwrap().value;
            prop_assert!((e - k).norm() <= 1e-9 * e.norm().max(k.norm()).max(1e-300));
            prop_assert!(ode_residual(&args, &ctl).unwrap() <= 1e-8);
        }

        #[test]
        fn transformed_agrees_inside_unit_disk(a in arb_c(), b in arb_c(), g in arb_c(), d in arb_c(),
                                               r in 0.3f64..1.0, th in -3.1f64..3.1) {
            let ctl = SeriesControl::default();
            let args = WArgs::new(a, b, g, d, Complex::from_polar(r, th)).unwrap();
            let t = w_eval_transformed(&args, &ctl).unwrap().value;
            let k = w_eval_kdf(&args, &ctl).unwrap().value;
            prop_assert!((t - k).norm() <= 1e-9 * t.norm().max(k.norm()).max(1.0));
        }
    }
}
