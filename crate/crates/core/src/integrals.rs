//! Closed forms for
//!
//! ∫_0^ρ t^{β+l} E(α;β;λ/t) E(α+γ;β;-λ/t) dt
//!
//! in terms of E- and W-functions, the Laplace transform of the l = 0
//! integrand as an Appell F2 series, and an independent quadrature oracle
//! for both.
//!
//! The oracle integrates the Kummer form of the integrand,
//! E(α;β;λ/t) = Γ(α)/Γ(β) M(α;β;-t/λ), whose argument vanishes at t = 0.
//! Panels are dyadic toward the origin and the last one, (0, ε], is
//! replaced by the leading term of the expansion in t.

use serde::{Deserialize, Serialize};

use crate::doubleseries::{appell_f2, AppellF2Spec};
use crate::error::{Error, Result};
use crate::hyperseries::{kummer_m, ParamList, SeriesControl};
use crate::macrobert::{e_eval, EFunctionSpec};
use crate::numerics::{
    binomial, ensure_finite, gamma, gamma_ratio, nonpositive_integer_near, pochhammer, Complex, EvalResult,
    POLE_TOLERANCE,
};
use crate::parallel::{map_ordered, Execution};
use crate::quadrature::integrate;
use crate::wfunction::{w_eval, WArgs};

const ONE: Complex = Complex::new(1.0, 0.0);
const I: Complex = Complex::new(0.0, 1.0);

/// Panel budget for the oracle.
pub const MAX_PANELS: usize = 20_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralSpec {
    pub alpha: Complex,
    pub beta: Complex,
    pub gamma: Complex,
    pub l: u32,
    pub rho: f64,
    pub lambda: Complex,
}

impl IntegralSpec {
    /// λ = i.
    pub fn new(alpha: Complex, beta: Complex, gamma: Complex, l: u32, rho: f64) -> Result<Self> {
        let spec = IntegralSpec {
            alpha,
            beta,
            gamma,
            l,
            rho,
            lambda: I,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn real(alpha: f64, beta: f64, gamma: f64, l: u32, rho: f64) -> Result<Self> {
        let r = |v: f64| Complex::new(v, 0.0);
        Self::new(r(alpha), r(beta), r(gamma), l, rho)
    }

    pub fn with_lambda(self, lambda: Complex) -> Result<Self> {
        let spec = IntegralSpec { lambda, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_rho(self, rho: f64) -> Result<Self> {
        let spec = IntegralSpec { rho, ..self };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho.is_finite() && self.rho > 0.0) {
            return Err(Error::Parameter(format!(
                "rho = {} must be finite and positive",
                self.rho
            )));
        }
        if (self.lambda.norm() - 1.0).abs() > 1e-12 {
            return Err(Error::Parameter(format!("|lambda| = {} must be 1", self.lambda.norm())));
        }
        if self.beta.re + f64::from(self.l) <= -1.0 {
            return Err(Error::Parameter(format!(
                "Re(beta) + l = {} must exceed -1",
                self.beta.re + f64::from(self.l)
            )));
        }
        if nonpositive_integer_near(self.beta, POLE_TOLERANCE).is_some() {
            return Err(Error::Parameter(format!(
                "beta = {} is a nonpositive integer",
                self.beta
            )));
        }
        for (name, v) in [("alpha", self.alpha), ("alpha+gamma", self.alpha + self.gamma)] {
            if nonpositive_integer_near(v, POLE_TOLERANCE).is_some() {
                return Err(Error::Pole(format!("gamma({name} = {v})")));
            }
        }
        Ok(())
    }

    /// λ/ρ, the argument of every E and W on the closed-form side.
    fn z(&self) -> Complex {
        self.lambda / self.rho
    }

    /// ρ/λ, which plays the role of -iρ when λ = i.
    fn q(&self) -> Complex {
        self.rho / self.lambda
    }

    fn rho_power(&self, extra: f64) -> Complex {
        ((self.beta + extra) * self.rho.ln()).exp()
    }

    fn w(&self, alpha: Complex, beta: Complex, gamma: Complex, delta: Complex) -> Result<WArgs> {
        WArgs::new(alpha, beta, gamma, delta, self.z())
    }
}

/// ∫_0^∞ t^β e^{-ht} E(α;β;i/t) E(α+γ;β;-i/t) dt.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LaplaceSpec {
    pub alpha: Complex,
    pub beta: Complex,
    pub gamma: Complex,
    pub h: Complex,
}

impl LaplaceSpec {
    pub fn new(alpha: Complex, beta: Complex, gamma: Complex, h: Complex) -> Result<Self> {
        let spec = LaplaceSpec { alpha, beta, gamma, h };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.h.norm() <= 2.0 {
            return Err(Error::Domain(format!("|h| = {} must exceed 2", self.h.norm())));
        }
        if self.beta.re <= -1.0 {
            return Err(Error::Parameter(format!("Re(beta) = {} must exceed -1", self.beta.re)));
        }
        IntegralSpec {
            alpha: self.alpha,
            beta: self.beta,
            gamma: self.gamma,
            l: 0,
            rho: 1.0,
            lambda: I,
        }
        .validate()
    }
}

/// Running sum of coefficient · result with a combined error budget.
#[derive(Default)]
struct Combination {
    value: Complex,
    error: f64,
    terms: usize,
    ok: bool,
}

impl Combination {
    fn new() -> Self {
        Combination {
            ok: true,
            ..Default::default()
        }
    }

    fn add(&mut self, coefficient: Complex, r: &EvalResult) {
        self.value += coefficient * r.value;
        self.error += coefficient.norm() * r.abs_error_estimate;
        self.terms += r.terms_used;
        self.ok &= r.converged;
    }

    /// Adds coefficient · a · b for two independently evaluated factors.
    fn add_product(&mut self, coefficient: Complex, a: &EvalResult, b: &EvalResult) {
        self.value += coefficient * a.value * b.value;
        self.error += coefficient.norm()
            * (a.abs_error_estimate * b.value.norm()
                + b.abs_error_estimate * a.value.norm()
                + a.abs_error_estimate * b.abs_error_estimate);
        self.terms += a.terms_used + b.terms_used;
        self.ok &= a.converged && b.converged;
    }

    fn finish(self, ctl: &SeriesControl) -> Result<EvalResult> {
        let value = ensure_finite(self.value, "closed-form integral")?;
        Ok(EvalResult::from_budget(
            value,
            self.error,
            self.terms,
            ctl.rel_tol,
            self.ok,
        ))
    }
}

fn require_l(spec: &IntegralSpec, l: u32) -> Result<()> {
    if spec.l != l {
        return Err(Error::Parameter(format!("this form needs l = {l}, got {}", spec.l)));
    }
    Ok(())
}

/// ρ^{β+1}[E(α;β;z) E(α+γ, β+1; β, β+2; -z) + qβ W(α, β+2, γ, β+1; z) + q² W(α, β+3, γ+1, β+1; z)]
/// with z = λ/ρ and q = ρ/λ.
pub fn integral_closed_l0(spec: &IntegralSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    require_l(spec, 0)?;
    let (a, b, g) = (spec.alpha, spec.beta, spec.gamma);
    let (z, q, p) = (spec.z(), spec.q(), spec.rho_power(1.0));
    let e1 = e_eval(&EFunctionSpec::simple(a, b, z)?, ctl)?;
    let e2 = e_eval(
        &EFunctionSpec::new(
            ParamList::from_values(&[a + g, b + ONE]),
            ParamList::from_values(&[b, b + 2.0]),
            -z,
        )?,
        ctl,
    )?;
    let w1 = w_eval(&spec.w(a, b + 2.0, g, b + ONE)?, ctl)?;
    let w2 = w_eval(&spec.w(a, b + 3.0, g + ONE, b + ONE)?, ctl)?;
    let mut sum = Combination::new();
    sum.add_product(p, &e1, &e2);
    sum.add(p * q * b, &w1);
    sum.add(p * q * q, &w2);
    sum.finish(ctl)
}

/// ρ^{β+1}[β W(α-1, β+1, γ+1, β; z) + q W(α-1, β+2, γ+2, β; z)].
pub fn integral_closed_l0_alt(spec: &IntegralSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    require_l(spec, 0)?;
    let (a, b, g) = (spec.alpha, spec.beta, spec.gamma);
    let (q, p) = (spec.q(), spec.rho_power(1.0));
    let w1 = w_eval(&spec.w(a - ONE, b + ONE, g + ONE, b)?, ctl)?;
    let w2 = w_eval(&spec.w(a - ONE, b + 2.0, g + 2.0, b)?, ctl)?;
    let mut sum = Combination::new();
    sum.add(p * b, &w1);
    sum.add(p * q, &w2);
    sum.finish(ctl)
}

/// The worked l = 1 case, written out term by term:
/// ρ^{β+2}[β(β+1) W(α-1, β+2, γ+1, β) + 2q(β+1) W(α-1, β+3, γ+2, β) + q² W(α-1, β+4, γ+3, β)].
pub fn integral_closed_l1(spec: &IntegralSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    require_l(spec, 1)?;
    let (a, b, g) = (spec.alpha, spec.beta, spec.gamma);
    let (q, p) = (spec.q(), spec.rho_power(2.0));
    let w0 = w_eval(&spec.w(a - ONE, b + 2.0, g + ONE, b)?, ctl)?;
    let w1 = w_eval(&spec.w(a - ONE, b + 3.0, g + 2.0, b)?, ctl)?;
    let w2 = w_eval(&spec.w(a - ONE, b + 4.0, g + 3.0, b)?, ctl)?;
    let mut sum = Combination::new();
    sum.add(p * b * (b + ONE), &w0);
    sum.add(p * q * 2.0 * (b + ONE), &w1);
    sum.add(p * q * q, &w2);
    sum.finish(ctl)
}

/// ρ^{β+l+1} Σ_{n=0}^{l+1} q^n Γ(β+l+1)/Γ(β+n) C(l+1, n) W(α-1, β+l+n+1, γ+n+1, β; λ/ρ).
pub fn integral_closed_general(spec: &IntegralSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    ctl.validate()?;
    let (a, b, g) = (spec.alpha, spec.beta, spec.gamma);
    let l = spec.l;
    let (q, p) = (spec.q(), spec.rho_power(f64::from(l) + 1.0));
    let indices: Vec<u32> = (0..=l + 1).collect();
    let terms = map_ordered(ctl.execution, &indices, |&n| -> Result<(Complex, EvalResult)> {
        let nf = f64::from(n);
        let coefficient =
            q.powu(n) * pochhammer(b + nf, u64::from(l + 1 - n))? * binomial(u64::from(l + 1), u64::from(n));
        let w = w_eval(&spec.w(a - ONE, b + f64::from(l) + nf + 1.0, g + nf + 1.0, b)?, ctl)?;
        Ok((coefficient, w))
    });
    let mut sum = Combination::new();
    for t in terms {
        let (coefficient, w) = t?;
        sum.add(p * coefficient, &w);
    }
    sum.finish(ctl)
}

/// βΓ(α)Γ(α+γ)/(h^{β+1}Γ(β)) · F2(β+1; α, α+γ; β, β; i/h, -i/h).
pub fn laplace_integral_f2(spec: &LaplaceSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    let (a, b, g, h) = (spec.alpha, spec.beta, spec.gamma, spec.h);
    let pre = b * gamma_ratio(a, b)? * gamma(a + g)? * (-(b + ONE) * h.ln()).exp();
    let pre = ensure_finite(pre, "Laplace prefactor")?;
    let f2 = appell_f2(
        &AppellF2Spec {
            a: b + ONE,
            b1: a,
            b2: a + g,
            c1: b,
            c2: b,
            x: I / h,
            y: -I / h,
        },
        ctl,
    )?;
    Ok(crate::macrobert::rebudget(f2.scaled(pre), ctl))
}

/// The reduced integrand t^{β+l} e^{-ht} Γ(α)Γ(α+γ)/Γ(β)² M(α;β;-t/λ) M(α+γ;β;t/λ),
/// with an estimate of its rounding error.
struct Integrand {
    alpha: Complex,
    beta: Complex,
    gamma: Complex,
    power: Complex,
    lambda: Complex,
    h: Option<Complex>,
    scale: Complex,
    ctl: SeriesControl,
}

impl Integrand {
    fn new(spec: &IntegralSpec, h: Option<Complex>) -> Result<Self> {
        let scale = gamma_ratio(spec.alpha, spec.beta)? * gamma_ratio(spec.alpha + spec.gamma, spec.beta)?;
        Ok(Integrand {
            alpha: spec.alpha,
            beta: spec.beta,
            gamma: spec.gamma,
            power: spec.beta + f64::from(spec.l),
            lambda: spec.lambda,
            h,
            scale: ensure_finite(scale, "integrand prefactor")?,
            ctl: SeriesControl::default()
                .with_rel_tol(1e-15)
                .with_execution(Execution::Sequential),
        })
    }

    fn eval(&self, t: f64) -> Result<(Complex, f64)> {
        let x = t / self.lambda;
        let m1 = kummer_m(self.alpha, self.beta, -x, &self.ctl)?;
        let m2 = kummer_m(self.alpha + self.gamma, self.beta, x, &self.ctl)?;
        let mut weight = self.scale * (self.power * t.ln()).exp();
        if let Some(h) = self.h {
            weight *= (-h * t).exp();
        }
        let value = weight * m1.value * m2.value;
        let error = weight.norm()
            * (m1.abs_error_estimate * m2.value.norm()
                + m2.abs_error_estimate * m1.value.norm()
                + 4.0 * f64::EPSILON * (m1.value * m2.value).norm());
        Ok((value, error))
    }

    fn value_or_nan(&self, t: f64) -> Complex {
        self.eval(t).map_or(Complex::new(f64::NAN, f64::NAN), |(v, _)| v)
    }

    /// Linear coefficient of the integrand's expansion at 0, relative to the
    /// leading one.
    fn slope(&self) -> f64 {
        let lin = self.gamma / (self.beta * self.lambda) - self.h.unwrap_or_default();
        lin.norm() + 1.0
    }
}

/// Numerical value of the integral over (0, ρ], or over (0, ∞) with the
/// weight e^{-ht} when `weight_h` is given.
pub fn quadrature_oracle(spec: &IntegralSpec, weight_h: Option<Complex>, abs_tol: f64) -> Result<EvalResult> {
    quadrature_oracle_with(spec, weight_h, abs_tol, Execution::default())
}

pub fn quadrature_oracle_with(
    spec: &IntegralSpec,
    weight_h: Option<Complex>,
    abs_tol: f64,
    exec: Execution,
) -> Result<EvalResult> {
    spec.validate()?;
    if abs_tol.is_nan() || abs_tol <= 0.0 {
        return Err(Error::Parameter(format!("abs_tol = {abs_tol} must be positive")));
    }
    let f = Integrand::new(spec, weight_h)?;
    let upper = match weight_h {
        None => spec.rho,
        Some(h) => cutoff(&f, h, abs_tol)?,
    };
    integrate_from_zero(&f, upper, abs_tol, exec)
}

/// Numerical value of the integral over [ρ1, ρ] without the exponential weight.
pub fn quadrature_oracle_between(spec: &IntegralSpec, rho1: f64, abs_tol: f64) -> Result<EvalResult> {
    spec.validate()?;
    if !(rho1 > 0.0 && rho1 < spec.rho) {
        return Err(Error::Parameter(format!("need 0 < rho1 = {rho1} < rho = {}", spec.rho)));
    }
    let f = Integrand::new(spec, None)?;
    let r = integrate(
        &|t| f.value_or_nan(t),
        &[(rho1, spec.rho)],
        abs_tol,
        MAX_PANELS,
        Execution::default(),
    )?;
    let rounding = rounding_bound(&f, rho1, spec.rho)?;
    Ok(EvalResult {
        value: r.value,
        abs_error_estimate: r.abs_error + rounding,
        terms_used: 15 * r.panels,
        converged: true,
    })
}

fn integrate_from_zero(f: &Integrand, upper: f64, abs_tol: f64, exec: Execution) -> Result<EvalResult> {
    let s = f.power + 1.0;
    let s_re = s.re;
    let tail_weight = f.scale.norm() * f.slope() / (s_re + 1.0);
    let budget = 0.01 * abs_tol;
    let mut intervals = Vec::new();
    let mut eps = upper;
    // Dyadic panels until the first-order remainder of the leading-term tail
    // drops below the budget.
    while intervals.len() < 8
        || tail_weight * eps.powf(s_re + 1.0) * (1.0 + f.h.map_or(0.0, |h| h.norm()) * eps) > budget
    {
        if intervals.len() >= 1000 {
            return Err(Error::QuadratureFailure("endpoint panels exhausted".into()));
        }
        intervals.push((eps / 2.0, eps));
        eps /= 2.0;
    }
    let tail = f.scale * (s * eps.ln()).exp() / s;
    let tail_err = 2.0 * tail_weight * eps.powf(s_re + 1.0);
    let r = integrate(&|t| f.value_or_nan(t), &intervals, abs_tol, MAX_PANELS, exec)?;
    let rounding = rounding_bound(f, eps, upper)?;
    Ok(EvalResult {
        value: r.value + tail,
        abs_error_estimate: r.abs_error + tail_err + rounding,
        terms_used: 15 * r.panels,
        converged: true,
    })
}

/// (b - a) · max rounding error of the integrand on a sample grid.
fn rounding_bound(f: &Integrand, a: f64, b: f64) -> Result<f64> {
    let grid: Vec<f64> = (0..=64).map(|k| a + (b - a) * f64::from(k) / 64.0).collect();
    let mut worst = 0.0f64;
    for t in grid.into_iter().filter(|&t| t > 0.0) {
        worst = worst.max(f.eval(t)?.1);
    }
    Ok((b - a) * worst)
}

/// Smallest T on a 1.25-geometric grid past which both |e^{-hT}| and the
/// integrand envelope fall below the tolerance.
fn cutoff(f: &Integrand, h: Complex, abs_tol: f64) -> Result<f64> {
    if h.re <= 0.0 {
        return Err(Error::Domain(format!("Re(h) = {} must be positive", h.re)));
    }
    let mut t = 1.0f64;
    while t < 1e4 {
        let envelope = [1.0, 1.1, 1.25, 1.5]
            .iter()
            .map(|k| f.eval(k * t).map(|(v, _)| v.norm()))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        if (-h.re * t).exp() < abs_tol && envelope * 2.0 / h.re < 0.01 * abs_tol {
            return Ok(t);
        }
        t *= 1.25;
    }
    Err(Error::QuadratureFailure(
        "no cutoff below 1e4 makes the tail negligible".into(),
    ))
}
