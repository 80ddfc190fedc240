//! Residual evaluators for the recurrence and summation identities of the
//! W-function and the E-functions it is built from.
//!
//! Every evaluator returns an [`IdentityReport`] with
//! residual = |lhs - rhs| / max(1, |lhs|, |rhs|).

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::doubleseries::sum_antidiagonals;
use crate::error::{Error, Result};
use crate::hyperseries::{weighted_pfq, ParamList, SeriesControl};
use crate::macrobert::{e_eval, e_z_derivative, EFunctionSpec};
use crate::numerics::{binomial, gamma_ratio, Complex};
use crate::wfunction::{w_eval, WArgs};

const ONE: Complex = Complex::new(1.0, 0.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub name: String,
    pub residual: f64,
    pub lhs: Complex,
    pub rhs: Complex,
    pub params: BTreeMap<String, Complex>,
}

impl IdentityReport {
    pub fn new(name: impl Into<String>, lhs: Complex, rhs: Complex, params: &[(&str, Complex)]) -> Self {
        let residual = (lhs - rhs).norm() / 1f64.max(lhs.norm()).max(rhs.norm());
        IdentityReport {
            name: name.into(),
            residual,
            lhs,
            rhs,
            params: params.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }
}

/// Which member of a three-identity family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Which {
    A,
    B,
    C,
}

impl Which {
    pub const ALL: [Which; 3] = [Which::A, Which::B, Which::C];

    pub fn label(self) -> &'static str {
        match self {
            Which::A => "a",
            Which::B => "b",
            Which::C => "c",
        }
    }
}

fn e1(a: Complex, b: Complex, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    Ok(e_eval(&EFunctionSpec::simple(a, b, z)?, ctl)?.value)
}

fn e_lists(upper: ParamList, lower: ParamList, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    Ok(e_eval(&EFunctionSpec::new(upper, lower, z)?, ctl)?.value)
}

fn w(a: Complex, b: Complex, g: Complex, d: Complex, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    Ok(w_eval(&WArgs::new(a, b, g, d, z)?, ctl)?.value)
}

/// E(α+1; δ; z) E(α+γ; β+1; -z) against its three W-function expansions:
/// * A: W(α,β,γ,δ) - W(α+1,β+1,γ-1,δ+1)/z
/// * B: (β-α-1)/β W(α,β,γ,δ) + W(α+1,β,γ-1,δ)/β + W(α+1,β+2,γ,δ+1)/(βz²)
/// * C: (β-δ+1)/β W(α,β,γ,δ) + W(α,β,γ,δ-1)/β + W(α+1,β+2,γ,δ+1)/(βz²)
pub fn recurrence_8(
    which: Which,
    alpha: Complex,
    beta: Complex,
    gamma: Complex,
    delta: Complex,
    z: Complex,
    ctl: &SeriesControl,
) -> Result<IdentityReport> {
    let (a, b, g, d) = (alpha, beta, gamma, delta);
    let lhs = e1(a + ONE, d, z, ctl)? * e1(a + g, b + ONE, -z, ctl)?;
    let base = w(a, b, g, d, z, ctl)?;
    let rhs = match which {
        Which::A => base - w(a + ONE, b + ONE, g - ONE, d + ONE, z, ctl)? / z,
        Which::B => {
            (b - a - ONE) / b * base
                + w(a + ONE, b, g - ONE, d, z, ctl)? / b
                + w(a + ONE, b + 2.0, g, d + ONE, z, ctl)? / (b * z * z)
        }
        Which::C => {
            (b - d + ONE) / b * base
                + w(a, b, g, d - ONE, z, ctl)? / b
                + w(a + ONE, b + 2.0, g, d + ONE, z, ctl)? / (b * z * z)
        }
    };
    Ok(IdentityReport::new(
        format!("recurrence_8{}", which.label()),
        lhs,
        rhs,
        &[("alpha", a), ("beta", b), ("gamma", g), ("delta", d), ("z", z)],
    ))
}

/// Parameters of the summation identities; `gamma` is used by C only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SumParams {
    pub alpha: Complex,
    pub beta: Complex,
    pub gamma: Complex,
}

impl SumParams {
    fn entries(&self, z: Complex, r: u32) -> Vec<(&'static str, Complex)> {
        vec![
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("gamma", self.gamma),
            ("z", z),
            ("r", Complex::new(f64::from(r), 0.0)),
        ]
    }
}

/// E(α+1, [2]_{s-1}; β+1, [1]_{s-1}; z).
fn e_stack(p: &SumParams, s: u32, z: Complex, ctl: &SeriesControl) -> Result<Complex> {
    e_lists(
        ParamList::single(p.alpha + ONE).with(Complex::new(2.0, 0.0), s - 1),
        ParamList::single(p.beta + ONE).with(ONE, s - 1),
        z,
        ctl,
    )
}

/// The closed right-hand sides:
/// * A: -E(α+1, β+2; β+1, β+3; z)
/// * B: z r! (E(α; β; z) - (β+1)^{r+1} E(α, [β+1]_{r+1}; β, [β+2]_{r+1}; z))
/// * C: -β W(α, β+2, γ, β+1; z) - W(α, β+3, γ+1, β+1; z)/z
pub fn sum_identity_10_rhs(which: Which, p: &SumParams, z: Complex, r: u32, ctl: &SeriesControl) -> Result<Complex> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    Ok(match which {
        Which::A => -e_lists(
            ParamList::from_values(&[a + ONE, b + 2.0]),
            ParamList::from_values(&[b + ONE, b + 3.0]),
            z,
            ctl,
        )?,
        Which::B => {
            let fact: f64 = (1..=r).map(f64::from).product();
            let stacked = e_lists(
                ParamList::single(a).with(b + ONE, r + 1),
                ParamList::single(b).with(b + 2.0, r + 1),
                z,
                ctl,
            )?;
            z * fact * (e1(a, b, z, ctl)? - (b + ONE).powu(r + 1) * stacked)
        }
        Which::C => -b * w(a, b + 2.0, g, b + ONE, z, ctl)? - w(a, b + 3.0, g + ONE, b + ONE, z, ctl)? / z,
    })
}

/// The s-th term of the left-hand side (s >= 1).
fn sum_term(which: Which, p: &SumParams, z: Complex, r: u32, s: u32, ctl: &SeriesControl) -> Result<Complex> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let sign = if s.is_multiple_of(2) { 1.0 } else { -1.0 };
    Ok(match which {
        Which::A => sign / (b + ONE).powu(s) * e_stack(p, s, z, ctl)?,
        Which::B => {
            // (r+s)!/s! = (s+1)(s+2)...(s+r)
            let rising: f64 = (1..=r).map(|j| f64::from(s + j)).product();
            sign * rising / (b + ONE).powu(s) * e_stack(p, s, z, ctl)?
        }
        Which::C => {
            let second = e_lists(
                ParamList::single(a + g).with(b + ONE, s + 1),
                ParamList::single(b).with(b + 2.0, s + 1),
                -z,
                ctl,
            )?;
            sign * e_stack(p, s, z, ctl)? * second
        }
    })
}

/// Left-hand side as the literal partial sum over s = 1..=s_terms, stopping
/// early after `stagnation_window` consecutive terms below `rel_tol · |partial|`.
pub fn sum_identity_10_partial(
    which: Which,
    p: &SumParams,
    z: Complex,
    r: u32,
    s_terms: u32,
    ctl: &SeriesControl,
) -> Result<Complex> {
    let mut partial = Complex::new(0.0, 0.0);
    let mut run = 0;
    for s in 1..=s_terms {
        let t = sum_term(which, p, z, r, s, ctl)?;
        partial += t;
        if !(partial.re.is_finite() && partial.im.is_finite()) {
            return Err(Error::Overflow(format!("partial sum at s = {s}")));
        }
        run = if t.norm() <= ctl.rel_tol * partial.norm() {
            run + 1
        } else {
            0
        };
        if run >= ctl.stagnation_window {
            break;
        }
    }
    Ok(partial)
}

/// Literal partial sum against the closed form.
pub fn sum_identity_10(
    which: Which,
    p: &SumParams,
    z: Complex,
    r: u32,
    s_terms: u32,
    ctl: &SeriesControl,
) -> Result<IdentityReport> {
    if s_terms < 10 {
        return Err(Error::Parameter(format!("s_terms must be at least 10, got {s_terms}")));
    }
    let lhs = sum_identity_10_partial(which, p, z, r, s_terms, ctl)?;
    let rhs = sum_identity_10_rhs(which, p, z, r, ctl)?;
    Ok(IdentityReport::new(
        format!("sum_10{}_partial", which.label()),
        lhs,
        rhs,
        &p.entries(z, r),
    ))
}

/// Left-hand side with the s-sum carried out inside the hypergeometric
/// series first. Writing E(α+1, [2]_{s-1}; β+1, [1]_{s-1}; z) as
/// Γ(α+1)/Γ(β+1) Σ_k c_k (k+1)^{s-1}, the s-sums are geometric (or
/// negative-binomial) and give, term by term in k,
/// * A: -1/(β+2+k)
/// * B: r!/(k+1) · (((β+1)/(β+2+k))^{r+1} - 1)
/// * C: -1/((β+1+k')(β+2+k+k')) against the second factor's index k'.
///
/// This is the analytic continuation of the s-sum, which itself diverges
/// once (k+1)/(β+1) exceeds one.
pub fn sum_identity_10_resummed_lhs(
    which: Which,
    p: &SumParams,
    z: Complex,
    r: u32,
    ctl: &SeriesControl,
) -> Result<Complex> {
    let (a, b, g) = (p.alpha, p.beta, p.gamma);
    let x = -z.inv();
    let pre = gamma_ratio(a + ONE, b + ONE)?;
    let upper = ParamList::single(a + ONE);
    let lower = ParamList::single(b + ONE);
    Ok(match which {
        Which::A => pre * weighted_pfq(&upper, &lower, x, ctl, |k| -(b + 2.0 + k as f64).inv())?.value,
        Which::B => {
            let fact: f64 = (1..=r).map(f64::from).product();
            let series = weighted_pfq(&upper, &lower, x, ctl, |k| {
                let k = k as f64;
                fact / (k + 1.0) * (((b + ONE) / (b + 2.0 + k)).powu(r + 1) - ONE)
            })?;
            pre * series.value
        }
        Which::C => {
            let pre2 = gamma_ratio(a + g, b)?;
            let sum = sum_antidiagonals(
                ctl,
                false,
                |n| -(b + 2.0 + n as f64).inv(),
                |k| {
                    let k = k as f64;
                    x * (a + ONE + k) / ((b + ONE + k) * (k + 1.0))
                },
                // B_{k'} = (α+γ)_{k'}/((β)_{k'} k'!) z^{-k'} / (β+1+k')
                |k| {
                    let k = k as f64;
                    (a + g + k) * (b + ONE + k) / ((b + k) * (k + 1.0) * z * (b + 2.0 + k))
                },
            )?;
            pre * pre2 * sum.result.value / (b + ONE)
        }
    })
}

/// Resummed left-hand side against the closed form.
pub fn sum_identity_10_resummed(
    which: Which,
    p: &SumParams,
    z: Complex,
    r: u32,
    ctl: &SeriesControl,
) -> Result<IdentityReport> {
    let lhs = sum_identity_10_resummed_lhs(which, p, z, r, ctl)?;
    let rhs = sum_identity_10_rhs(which, p, z, r, ctl)?;
    Ok(IdentityReport::new(
        format!("sum_10{}_resummed", which.label()),
        lhs,
        rhs,
        &p.entries(z, r),
    ))
}

/// z d/dz E(α+1, β+ν; δ, β+1+ν; z) = (β+ν) E(α+1, β+ν; δ, β+1+ν; z) - E(α+1; δ; z),
/// with the left side by term-wise differentiation.
pub fn derivative_relation(
    alpha: Complex,
    beta: Complex,
    delta: Complex,
    nu: u32,
    z: Complex,
    ctl: &SeriesControl,
) -> Result<IdentityReport> {
    let bn = beta + f64::from(nu);
    let spec = EFunctionSpec::new(
        ParamList::from_values(&[alpha + ONE, bn]),
        ParamList::from_values(&[delta, bn + ONE]),
        z,
    )?;
    let lhs = e_z_derivative(&spec, ctl)?.value;
    let rhs = bn * e_eval(&spec, ctl)?.value - e1(alpha + ONE, delta, z, ctl)?;
    Ok(IdentityReport::new(
        "derivative_relation",
        lhs,
        rhs,
        &[
            ("alpha", alpha),
            ("beta", beta),
            ("delta", delta),
            ("nu", Complex::new(f64::from(nu), 0.0)),
            ("z", z),
        ],
    ))
}

/// E(α+γ; β; x) + (1/x) E(α+γ+1, β+2; β+1, β+3; x) = (β+1) E(α+γ, β+1; β, β+2; x)
/// at x = -λ/ρ.
pub fn e_recurrence_shift(
    alpha: Complex,
    beta: Complex,
    gamma: Complex,
    rho: f64,
    lambda: Complex,
    ctl: &SeriesControl,
) -> Result<IdentityReport> {
    let ag = alpha + gamma;
    let x = -lambda / rho;
    let lhs = e1(ag, beta, x, ctl)?
        + x.inv()
            * e_lists(
                ParamList::from_values(&[ag + ONE, beta + 2.0]),
                ParamList::from_values(&[beta + ONE, beta + 3.0]),
                x,
                ctl,
            )?;
    let rhs = (beta + ONE)
        * e_lists(
            ParamList::from_values(&[ag, beta + ONE]),
            ParamList::from_values(&[beta, beta + 2.0]),
            x,
            ctl,
        )?;
    Ok(IdentityReport::new(
        "e_recurrence_shift",
        lhs,
        rhs,
        &[
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("rho", Complex::new(rho, 0.0)),
            ("lambda", lambda),
        ],
    ))
}

/// E(α+γ, β+l+1-ζ; β, β+l+2-ζ; x) =
/// Σ_{n=0}^{l+1} (ρ/λ)^n Γ(β+l+1)/Γ(β+n) C(l+1, n)
///   E(α+γ+n, β+l+n+1-ζ; β+l+n+1, β+l+n+2-ζ; x), x = -λ/ρ.
#[allow(clippy::too_many_arguments)]
pub fn e_recurrence_binomial(
    alpha: Complex,
    beta: Complex,
    gamma: Complex,
    l: u32,
    zeta: Complex,
    rho: f64,
    lambda: Complex,
    ctl: &SeriesControl,
) -> Result<IdentityReport> {
    let ag = alpha + gamma;
    let x = -lambda / rho;
    let lf = f64::from(l);
    let lhs = e_lists(
        ParamList::from_values(&[ag, beta + lf + 1.0 - zeta]),
        ParamList::from_values(&[beta, beta + lf + 2.0 - zeta]),
        x,
        ctl,
    )?;
    let mut rhs = Complex::new(0.0, 0.0);
    for n in 0..=l + 1 {
        let nf = f64::from(n);
        let coef = (rho / lambda).powu(n)
            * gamma_ratio(beta + lf + 1.0, beta + nf)?
            * binomial(u64::from(l) + 1, u64::from(n));
        let e = e_lists(
            ParamList::from_values(&[ag + nf, beta + lf + nf + 1.0 - zeta]),
            ParamList::from_values(&[beta + lf + nf + 1.0, beta + lf + nf + 2.0 - zeta]),
            x,
            ctl,
        )?;
        rhs += coef * e;
    }
    Ok(IdentityReport::new(
        format!("e_recurrence_binomial_l{l}"),
        lhs,
        rhs,
        &[
            ("alpha", alpha),
            ("beta", beta),
            ("gamma", gamma),
            ("zeta", zeta),
            ("rho", Complex::new(rho, 0.0)),
            ("lambda", lambda),
        ],
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn sp(a: f64, b: f64, g: f64) -> SumParams {
        SumParams {
            alpha: c(a, 0.0),
            beta: c(b, 0.0),
            gamma: c(g, 0.0),
        }
    }

    #[test]
    fn recurrences_at_spot_points() {
        let ctl = SeriesControl::default();
        let (a, b, g, d) = (c(0.5, 0.0), c(1.5, 0.0), c(0.5, 0.0), c(2.0, 0.0));
        let r = recurrence_8(Which::A, a, b, g, d, c(3.0, 0.0), &ctl).unwrap();
        assert!(r.residual <= 1e-9, "{r:?}");
        let r = recurrence_8(Which::B, a, b, g, d, c(2.0, 1.0), &ctl).unwrap();
        assert!(r.residual <= 1e-9, "{r:?}");
        let r = recurrence_8(Which::C, a, b, c(0.0, 0.0), d, c(3.0, 0.0), &ctl).unwrap();
        assert!(r.residual <= 1e-9, "{r:?}");
        assert_eq!(r.params["z"], c(3.0, 0.0));
    }

    #[test]
    fn resummed_sums_match_closed_forms() {
        let ctl = SeriesControl::default();
        let p = SumParams {
            alpha: c(1.0, 0.2),
            beta: c(1.5, 0.1),
            gamma: c(0.5, -0.2),
        };
        let z = c(2.0, 0.5);
        for which in Which::ALL {
            for r in [0, 1, 3] {
                let rep = sum_identity_10_resummed(which, &p, z, r, &ctl).unwrap();
                assert!(rep.residual <= 1e-11, "{which:?} r={r}: {rep:?}");
            }
        }
        let p = sp(1.0, 1.5, 0.5);
        for which in Which::ALL {
            let rep = sum_identity_10_resummed(which, &p, c(2.0, 0.0), 0, &ctl).unwrap();
            assert!(rep.residual <= 1e-12, "{which:?}: {rep:?}");
        }
    }

    #[test]
    fn literal_partial_sums_diverge() {
        // The s-sum converges only while (k+1)/(β+1) < 1 for every k that
        // contributes, which never holds: partial sums grow without bound.
        let ctl = SeriesControl::default();
        let p = sp(1.0, 1.5, 0.5);
        let z = c(2.0, 0.0);
        let s20 = sum_identity_10_partial(Which::A, &p, z, 0, 20, &ctl).unwrap();
        let s40 = sum_identity_10_partial(Which::A, &p, z, 0, 40, &ctl).unwrap();
        assert!(s40.norm() > 1e3 * s20.norm().max(1.0));
        let rep = sum_identity_10(Which::A, &p, z, 0, 40, &ctl).unwrap();
        assert!(rep.residual > 1.0);
        assert!(sum_identity_10(Which::A, &p, z, 0, 5, &ctl).is_err());
    }

    #[test]
    fn e_recurrences() {
        let ctl = SeriesControl::default();
        let (a, b, g) = (c(1.2, 0.1), c(1.7, -0.2), c(0.3, 0.4));
        let rep = e_recurrence_shift(a, b, g, 1.3, Complex::i(), &ctl).unwrap();
        assert!(rep.residual <= 1e-12, "{rep:?}");
        for l in 0..4 {
            let rep = e_recurrence_binomial(a, b, g, l, c(0.37, 0.0), 1.3, Complex::i(), &ctl).unwrap();
            assert!(rep.residual <= 1e-11, "{rep:?}");
        }
    }

    fn arb_c() -> impl Strategy<Value = Complex> {
        (0.3f64..2.0, -0.5f64..0.5).prop_map(|(re, im)| Complex::new(re, im))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn recurrences_hold(a in arb_c(), b in arb_c(), g in arb_c(), d in arb_c(), r in 1.5f64..8.0, th in -3.1f64..3.1) {
            let ctl = SeriesControl::default();
            let z = Complex::from_polar(r, th);
            for which in Which::ALL {
                let rep = recurrence_8(which, a, b, g, d, z, &ctl).unwrap();
                prop_assert!(rep.residual <= 1e-9, "{:?}", rep);
            }
        }

        #[test]
        fn e_recurrence_shift_holds(a in arb_c(), b in arb_c(), g in arb_c(), rho in 0.5f64..5.0) {
            let rep = e_recurrence_shift(a, b, g, rho, Complex::i(), &SeriesControl::default()).unwrap();
            prop_assert!(rep.residual <= 1e-10, "{:?}", rep);
        }
    }
}
