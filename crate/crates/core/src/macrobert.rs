//! MacRobert's E-function for p <= q:
//! E(a; b; z) = ΠΓ(a_j)/ΠΓ(b_j) · pFq(a; b; -1/z).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperseries::{pfq, pfq_index_weighted, weighted_pfq, ParamList, SeriesControl};
use crate::numerics::{gamma_ratio, nonpositive_integer_near, reciprocal_gamma, Complex, EvalResult, POLE_TOLERANCE};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EFunctionSpec {
    pub upper: ParamList,
    pub lower: ParamList,
    pub argument: Complex,
}

impl EFunctionSpec {
    pub fn new(upper: ParamList, lower: ParamList, argument: Complex) -> Result<Self> {
        let spec = EFunctionSpec { upper, lower, argument };
        spec.validate()?;
        Ok(spec)
    }

    /// E(a; b; z) with one parameter on each side.
    pub fn simple(a: Complex, b: Complex, z: Complex) -> Result<Self> {
        Self::new(ParamList::single(a), ParamList::single(b), z)
    }

    pub fn validate(&self) -> Result<()> {
        if self.argument == Complex::new(0.0, 0.0) {
            return Err(Error::Parameter("E-function argument must be nonzero".into()));
        }
        if self.upper.len() > self.lower.len() {
            return Err(Error::Parameter(format!(
                "p = {} exceeds q = {}",
                self.upper.len(),
                self.lower.len()
            )));
        }
        for a in self.upper.expanded() {
            if let Some(n) = nonpositive_integer_near(a, POLE_TOLERANCE) {
                return Err(Error::Pole(format!("upper parameter at {n}")));
            }
        }
        for b in self.lower.expanded() {
            if nonpositive_integer_near(b, POLE_TOLERANCE).is_some() {
                return Err(Error::Parameter(format!(
                    "lower parameter {b} is a nonpositive integer"
                )));
            }
        }
        Ok(())
    }

    /// ΠΓ(a_j)/ΠΓ(b_j), pairing upper and lower entries in order so that
    /// large but close parameters never overflow separately.
    pub fn prefactor(&self) -> Result<Complex> {
        let mut lower = self.lower.expanded();
        let mut pre = Complex::new(1.0, 0.0);
        for a in self.upper.expanded() {
            let b = lower.next().expect("p <= q checked");
            pre *= gamma_ratio(a, b)?;
        }
        for b in lower {
            pre *= reciprocal_gamma(b);
        }
        crate::numerics::ensure_finite(pre, "E-function prefactor")
    }

    fn series_argument(&self) -> Complex {
        -self.argument.inv()
    }
}

/// Evaluates the E-function through its hypergeometric series.
pub fn e_eval(spec: &EFunctionSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    let pre = spec.prefactor()?;
    let series = pfq(&spec.upper, &spec.lower, spec.series_argument(), ctl)?;
    Ok(rebudget(series.scaled(pre), ctl))
}

/// z dE/dz by term-wise differentiation: -pre · Σ k t_k.
pub fn e_z_derivative(spec: &EFunctionSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    let pre = spec.prefactor()?;
    let series = pfq_index_weighted(&spec.upper, &spec.lower, spec.series_argument(), ctl)?;
    Ok(rebudget(series.scaled(-pre), ctl))
}

pub(crate) fn rebudget(r: EvalResult, ctl: &SeriesControl) -> EvalResult {
    EvalResult::from_budget(r.value, r.abs_error_estimate, r.terms_used, ctl.rel_tol, r.converged)
}

/// Σ_ν x^ν ν^r Γ(α+ν)/(ν! Γ(β+ν)), summed directly for |x| < 1.
pub fn e_moment_sum(alpha: Complex, beta: Complex, r: u32, x: Complex, ctl: &SeriesControl) -> Result<EvalResult> {
    if x.norm() >= 1.0 {
        return Err(Error::Domain(format!("|x| = {} must be below 1", x.norm())));
    }
    if nonpositive_integer_near(alpha, POLE_TOLERANCE).is_some() {
        return Err(Error::Pole(format!("gamma({alpha})")));
    }
    let pre = gamma_ratio(alpha, beta)?;
    let series = weighted_pfq(&ParamList::single(alpha), &ParamList::single(beta), x, ctl, |k| {
        Complex::new((k as f64).powi(r as i32), 0.0)
    })?;
    Ok(rebudget(series.scaled(pre), ctl))
}

/// The E-function that the moment sum collapses to:
/// r = 0 gives E(α; β; -1/x), r >= 1 gives x · E(α+1, [2]_{r-1}; β+1, [1]_{r-1}; -1/x).
pub fn e_moment_sum_closed(
    alpha: Complex,
    beta: Complex,
    r: u32,
    x: Complex,
    ctl: &SeriesControl,
) -> Result<EvalResult> {
    let one = Complex::new(1.0, 0.0);
    if x == Complex::new(0.0, 0.0) {
        let v = if r == 0 {
            gamma_ratio(alpha, beta)?
        } else {
            Complex::new(0.0, 0.0)
        };
        return Ok(EvalResult::exact(v));
    }
    let w = -x.inv();
    if r == 0 {
        return e_eval(&EFunctionSpec::simple(alpha, beta, w)?, ctl);
    }
    let spec = EFunctionSpec::new(
        ParamList::single(alpha + one).with(Complex::new(2.0, 0.0), r - 1),
        ParamList::single(beta + one).with(one, r - 1),
        w,
    )?;
    Ok(rebudget(e_eval(&spec, ctl)?.scaled(x), ctl))
}

#[cfg(test)]
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
    fn exponential_case() {
        let ctl = SeriesControl::default();
        let e = e_eval(
            &EFunctionSpec::simple(c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)).unwrap(),
            &ctl,
        )
        .unwrap();
        assert!(rel(e.value, c((-0.5f64).exp(), 0.0)) < 1e-15);
    }

    #[test]
    fn large_argument_limit() {
        let ctl = SeriesControl::default();
        let e = e_eval(
            &EFunctionSpec::simple(c(2.0, 0.0), c(3.0, 0.0), c(1e9, 0.0)).unwrap(),
            &ctl,
        )
        .unwrap();
        assert!((e.value - c(0.5, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn repeated_parameter_reference() {
        let ctl = SeriesControl::default();
        let spec = EFunctionSpec::new(
            ParamList::single(c(1.5, 0.0)).with(c(2.0, 0.0), 2),
            ParamList::single(c(2.5, 0.0)).with(c(1.0, 0.0), 2),
            c(1.0, 1.0),
        )
        .unwrap();
        let e = e_eval(&spec, &ctl).unwrap();
        let want = c(-0.026_845_409_351_075_31, 0.300_563_397_141_749_5);
        assert!(rel(e.value, want) < 1e-13, "{}", e.value);
    }

    #[test]
    fn invalid_specs() {
        assert!(EFunctionSpec::simple(c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)).is_err());
        assert!(matches!(
            EFunctionSpec::simple(c(-1.0, 0.0), c(1.0, 0.0), c(1.0, 0.0)),
            Err(Error::Pole(_))
        ));
        assert!(matches!(
            EFunctionSpec::new(
                ParamList::from_values(&[c(1.0, 0.0), c(2.0, 0.0)]),
                ParamList::single(c(1.0, 0.0)),
                c(1.0, 0.0)
            ),
            Err(Error::Parameter(_))
        ));
    }

    #[test]
    fn moment_sum_matches_e_functions() {
        let ctl = SeriesControl::default();
        let (a, b) = (c(1.0, 0.0), c(2.0, 0.0));
        let direct = e_moment_sum(a, b, 0, c(0.3, 0.0), &ctl).unwrap().value;
        let via_e = e_eval(&EFunctionSpec::simple(a, b, c(-1.0 / 0.3, 0.0)).unwrap(), &ctl)
            .unwrap()
            .value;
        assert!(rel(direct, via_e) < 1e-13);

        let (a, b) = (c(1.2, 0.0), c(2.1, 0.0));
        let direct = e_moment_sum(a, b, 1, c(0.4, 0.0), &ctl).unwrap().value;
        let via_e = e_eval(
            &EFunctionSpec::simple(c(2.2, 0.0), c(3.1, 0.0), c(-2.5, 0.0)).unwrap(),
            &ctl,
        )
        .unwrap()
        .value
            * 0.4;
        assert!(rel(direct, via_e) < 1e-13);

        // Plain loop over the defining sum.
        let mut brute = c(0.0, 0.0);
        let mut t = crate::numerics::gamma_ratio(a, b).unwrap();
        for nu in 0..200 {
            brute += t * (nu as f64).powi(3);
            t *= c(0.4, 0.0) * (a + nu as f64) / ((b + nu as f64) * (nu as f64 + 1.0));
        }
        let direct = e_moment_sum(a, b, 3, c(0.4, 0.0), &ctl).unwrap().value;
        assert!(rel(direct, brute) < 1e-11);
        let closed = e_moment_sum_closed(a, b, 3, c(0.4, 0.0), &ctl).unwrap().value;
        assert!(rel(closed, brute) < 1e-11);
        assert!(e_moment_sum(a, b, 1, c(1.0, 0.0), &ctl).is_err());
    }

    fn arb_c(lo: f64, hi: f64, im: f64) -> impl Strategy<Value = Complex> {
        (lo..hi, -im..im).prop_map(|(re, im)| Complex::new(re, im))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(50))]

        #[test]
        fn derivative_relation(a in arb_c(0.3, 2.0, 0.5), b in arb_c(0.3, 2.0, 0.5), d in arb_c(0.3, 2.0, 0.5),
                               nu in 0u32..6, r in 0.5f64..5.0, th in -3.1f64..3.1) {
            let ctl = SeriesControl::default();
            let z = Complex::from_polar(r, th);
            let one = c(1.0, 0.0);
            let bn = b + f64::from(nu);
            let spec = EFunctionSpec::new(ParamList::from_values(&[a + one, bn]), ParamList::from_values(&[d, bn + one]), z).unwrap();
            let lhs = e_z_derivative(&spec, &ctl).unwrap().value;
            let rhs = bn * e_eval(&spec, &ctl).unwrap().value
                - e_eval(&EFunctionSpec::simple(a + one, d, z).unwrap(), &ctl).unwrap().value;
            prop_assert!((lhs - rhs).norm() <= 1e-10 * lhs.norm().max(rhs.norm()).max(1.0));
        }

        #[test]
        fn matching_entries_cancel(a in arb_c(0.3, 3.0, 0.5), b in arb_c(0.3, 3.0, 0.5), s in arb_c(0.3, 3.0, 0.5),
                                   r in 0.5f64..5.0, th in -3.1f64..3.1) {
            let ctl = SeriesControl::default();
            let z = Complex::from_polar(r, th);
            let full = e_eval(&EFunctionSpec::new(ParamList::from_values(&[a, s]), ParamList::from_values(&[b, s]), z).unwrap(), &ctl).unwrap().value;
            let reduced = e_eval(&EFunctionSpec::simple(a, b, z).unwrap(), &ctl).unwrap().value;
            prop_assert!((full - reduced).norm() <= 1e-12 * reduced.norm().max(1.0));
        }
    }
}
