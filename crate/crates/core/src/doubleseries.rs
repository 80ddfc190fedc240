//! Double hypergeometric series summed along anti-diagonals m + ν = n:
//! the Kampé de Fériet function F^{1:1;1}_{1:1;1} and Appell's F2.
//!
//! Both share one engine: block_n = w(n) · Σ_{m+ν=n} A_m B_ν, where A and B
//! are single-index coefficient sequences given by their term ratios.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hyperseries::SeriesControl;
use crate::numerics::{nonpositive_integer_near, Complex, EvalResult, POLE_TOLERANCE};

/// Outcome of an anti-diagonal summation.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSum {
    pub result: EvalResult,
    /// Σ n · block_n; for series in powers of 1/z this is -z d/dz of the sum.
    pub index_weighted: Complex,
    pub blocks: Vec<Complex>,
}

/// Coefficient sequence c_0 = 1, c_{k+1} = c_k · ratio(k), generated lazily.
struct Coefficients<F> {
    values: Vec<Complex>,
    ratio: F,
}

impl<F: FnMut(usize) -> Complex> Coefficients<F> {
    fn new(ratio: F) -> Self {
        Coefficients {
            values: vec![Complex::new(1.0, 0.0)],
            ratio,
        }
    }

    fn extend_to(&mut self, n: usize) {
        while self.values.len() <= n {
            let k = self.values.len() - 1;
            let next = self.values[k] * (self.ratio)(k);
            self.values.push(next);
        }
    }
}

fn finite(z: Complex) -> bool {
    z.re.is_finite() && z.im.is_finite()
}

/// Sums Σ_n w(n) Σ_{m+ν=n} K(n, m) A_m B_ν, where K is 1 or, with
/// `binomial` set, C(n, m). `weight` is called for n = 0, 1, ... in order;
/// `a_ratio(m)` and `b_ratio(ν)` give A_{m+1}/A_m and B_{ν+1}/B_ν.
///
/// The binomial form keeps series like Appell's F2, whose weight (a)_n
/// alone would overflow, in range: (a)_{m+ν}/(m! ν!) = C(n, m) (a)_n/n!.
///
/// Stops once `stagnation_window` consecutive blocks have absolute mass
/// Σ|w A_m B_ν| below `rel_tol · |partial|` and shrinking. `terms_used`
/// counts individual (m, ν) terms.
pub(crate) fn sum_antidiagonals<W, FA, FB>(
    ctl: &SeriesControl,
    binomial: bool,
    mut weight: W,
    a_ratio: FA,
    b_ratio: FB,
) -> Result<DiagonalSum>
where
    W: FnMut(usize) -> Complex,
    FA: FnMut(usize) -> Complex,
    FB: FnMut(usize) -> Complex,
{
    ctl.validate()?;
    let mut a = Coefficients::new(a_ratio);
    let mut b = Coefficients::new(b_ratio);
    let mut partial = Complex::new(0.0, 0.0);
    let mut index_weighted = Complex::new(0.0, 0.0);
    let mut blocks = Vec::new();
    let mut sum_abs = 0.0;
    let mut prev_abs = f64::INFINITY;
    let mut run = 0;
    let mut terms = 0usize;
    for n in 0.. {
        if terms + n + 1 > ctl.max_terms {
            return Err(Error::NoConvergence { terms });
        }
        terms += n + 1;
        a.extend_to(n);
        b.extend_to(n);
        let (mut raw, mut raw_abs) = (Complex::new(0.0, 0.0), 0.0);
        let mut choose = 1.0;
        for m in 0..=n {
            let t = a.values[m] * b.values[n - m] * choose;
            raw += t;
            raw_abs += t.norm();
            if binomial {
                choose *= (n - m) as f64 / (m + 1) as f64;
            }
        }
        let w = weight(n);
        let block = w * raw;
        let block_abs = w.norm() * raw_abs;
        if !finite(block) || !block_abs.is_finite() {
            return Err(Error::Overflow(format!("double-series block {n} overflowed")));
        }
        partial += block;
        index_weighted += block * n as f64;
        sum_abs += block_abs;
        blocks.push(block);

        let threshold = ctl.rel_tol * partial.norm().max(f64::EPSILON * sum_abs);
        let shrinking = block_abs == 0.0 || block_abs < prev_abs;
        if shrinking && block_abs <= threshold && (threshold > 0.0 || block_abs == 0.0) && n > 0 {
            run += 1;
        } else {
            run = 0;
        }
        if run >= ctl.stagnation_window {
            let q = if prev_abs > 0.0 && prev_abs.is_finite() {
                (block_abs / prev_abs).min(0.5)
            } else {
                0.0
            };
            let tail = 2.0 * block_abs * q / (1.0 - q);
            let rounding = 2.0 * f64::EPSILON * sum_abs * (1.0 + (n as f64).sqrt());
            return Ok(DiagonalSum {
                result: EvalResult::from_budget(partial, tail + rounding, terms, ctl.rel_tol, true),
                index_weighted,
                blocks,
            });
        }
        prev_abs = block_abs;
    }
    unreachable!("the block loop only exits by returning")
}

/// F^{1:1;1}_{1:1;1}(a1 : b1; b2 ; c1 : d1; d2 ; z1, z2).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdfSpec {
    pub a1: Complex,
    pub b1: Complex,
    pub b2: Complex,
    pub c1: Complex,
    pub d1: Complex,
    pub d2: Complex,
    pub z1: Complex,
    pub z2: Complex,
}

impl KdfSpec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("d1", self.d1), ("d2", self.d2)] {
            if nonpositive_integer_near(v, POLE_TOLERANCE).is_some() {
                return Err(Error::Parameter(format!("{name} = {v} is a nonpositive integer")));
            }
        }
        Ok(())
    }
}

pub(crate) fn kdf_sum(spec: &KdfSpec, ctl: &SeriesControl) -> Result<DiagonalSum> {
    spec.validate()?;
    let s = *spec;
    let mut w = Complex::new(1.0, 0.0);
    sum_antidiagonals(
        ctl,
        false,
        move |n| {
            if n > 0 {
                let k = (n - 1) as f64;
                w *= (s.a1 + k) / (s.c1 + k);
            }
            w
        },
        move |m| {
            let k = m as f64;
            s.z1 * (s.b1 + k) / ((s.d1 + k) * (k + 1.0))
        },
        move |nu| {
            let k = nu as f64;
            s.z2 * (s.b2 + k) / ((s.d2 + k) * (k + 1.0))
        },
    )
}

pub fn kdf_eval(spec: &KdfSpec, ctl: &SeriesControl) -> Result<EvalResult> {
    Ok(kdf_sum(spec, ctl)?.result)
}

/// The first `count` anti-diagonal blocks, without any stopping rule.
pub fn kdf_diagonal_blocks(spec: &KdfSpec, count: usize) -> Result<Vec<Complex>> {
    spec.validate()?;
    let s = *spec;
    let mut a = Coefficients::new(|m: usize| {
        let k = m as f64;
        s.z1 * (s.b1 + k) / ((s.d1 + k) * (k + 1.0))
    });
    let mut b = Coefficients::new(|nu: usize| {
        let k = nu as f64;
        s.z2 * (s.b2 + k) / ((s.d2 + k) * (k + 1.0))
    });
    let mut w = Complex::new(1.0, 0.0);
    let mut out = Vec::with_capacity(count);
    for n in 0..count {
        if n > 0 {
            let k = (n - 1) as f64;
            w *= (s.a1 + k) / (s.c1 + k);
        }
        a.extend_to(n);
        b.extend_to(n);
        let raw: Complex = (0..=n).map(|m| a.values[m] * b.values[n - m]).sum();
        out.push(w * raw);
    }
    Ok(out)
}

/// Appell F2(a; b1, b2; c1, c2; x, y).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AppellF2Spec {
    pub a: Complex,
    pub b1: Complex,
    pub b2: Complex,
    pub c1: Complex,
    pub c2: Complex,
    pub x: Complex,
    pub y: Complex,
}

impl AppellF2Spec {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("c1", self.c1), ("c2", self.c2)] {
            if nonpositive_integer_near(v, POLE_TOLERANCE).is_some() {
                return Err(Error::Parameter(format!("{name} = {v} is a nonpositive integer")));
            }
        }
        let reach = self.x.norm() + self.y.norm();
        if reach >= 1.0 {
            return Err(Error::Domain(format!("|x| + |y| = {reach} is not below 1")));
        }
        Ok(())
    }
}

pub fn appell_f2(spec: &AppellF2Spec, ctl: &SeriesControl) -> Result<EvalResult> {
    spec.validate()?;
    let s = *spec;
    let mut w = Complex::new(1.0, 0.0);
    // (a)_n/n! on the diagonal, C(n, m) inside it, no factorials in A and B.
    let sum = sum_antidiagonals(
        ctl,
        true,
        move |n| {
            if n > 0 {
                w *= (s.a + (n - 1) as f64) / n as f64;
            }
            w
        },
        move |m| {
            let k = m as f64;
            s.x * (s.b1 + k) / (s.c1 + k)
        },
        move |nu| {
            let k = nu as f64;
            s.y * (s.b2 + k) / (s.c2 + k)
        },
    )?;
    Ok(sum.result)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hyperseries::{pfq, ParamList};
    use crate::numerics::ln_gamma;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex {
        Complex::new(re, im)
    }

    fn rel(a: Complex, b: Complex) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[allow(clippy::too_many_arguments)]
    fn kdf(a1: f64, b1: f64, b2: f64, c1: f64, d1: f64, d2: f64, z1: Complex, z2: Complex) -> KdfSpec {
        KdfSpec {
            a1: c(a1, 0.0),
            b1: c(b1, 0.0),
            b2: c(b2, 0.0),
            c1: c(c1, 0.0),
            d1: c(d1, 0.0),
            d2: c(d2, 0.0),
            z1,
            z2,
        }
    }

    #[test]
    fn kdf_at_origin_is_one() {
        let ctl = SeriesControl::default();
        let r = kdf_eval(&kdf(2.5, 1.2, 0.8, 3.5, 2.2, 1.8, c(0.0, 0.0), c(0.0, 0.0)), &ctl).unwrap();
        assert_eq!(r.value, c(1.0, 0.0));
        assert!(r.converged);
    }

    #[test]
    fn kdf_with_zero_second_argument_is_single_series() {
        let ctl = SeriesControl::default();
        let z1 = c(-0.7, 0.3);
        let r = kdf_eval(&kdf(2.5, 1.2, 0.8, 3.5, 2.2, 1.8, z1, c(0.0, 0.0)), &ctl).unwrap();
        let single = pfq(
            &ParamList::from_values(&[c(2.5, 0.0), c(1.2, 0.0)]),
            &ParamList::from_values(&[c(3.5, 0.0), c(2.2, 0.0)]),
            z1,
            &ctl,
        )
        .unwrap();
        assert!(rel(r.value, single.value) < 1e-13);
    }

    #[test]
    fn kdf_reference_value() {
        let ctl = SeriesControl::default();
        let r = kdf_eval(&kdf(2.5, 1.2, 0.8, 3.5, 2.2, 1.8, c(-0.4, 0.0), c(0.4, 0.0)), &ctl).unwrap();
        assert!(rel(r.value, c(0.978_778_437_027_589_8, 0.0)) < 1e-13, "{}", r.value);
        assert!(r.converged);
    }

    #[test]
    fn blocks_sum_to_value() {
        let ctl = SeriesControl::default();
        let spec = kdf(1.0, 2.0, 1.5, 2.5, 1.7, 1.3, c(0.2, 0.1), c(-0.3, 0.2));
        let blocks = kdf_diagonal_blocks(&spec, 60).unwrap();
        let total: Complex = blocks.iter().sum();
        assert!(rel(total, kdf_eval(&spec, &ctl).unwrap().value) < 1e-14);
    }

    #[test]
    fn f2_reference_cases() {
        let ctl = SeriesControl::default();
        let one = c(1.0, 0.0);
        let base = AppellF2Spec {
            a: one,
            b1: one,
            b2: one,
            c1: c(2.0, 0.0),
            c2: c(2.0, 0.0),
            x: c(0.0, 0.0),
            y: c(0.0, 0.0),
        };
        assert_eq!(appell_f2(&base, &ctl).unwrap().value, one);
        let r = appell_f2(&AppellF2Spec { x: c(0.5, 0.0), ..base }, &ctl).unwrap();
        assert!(rel(r.value, c(2.0 * 2f64.ln(), 0.0)) < 1e-12);
        let r = appell_f2(
            &AppellF2Spec {
                a: c(2.0, 0.0),
                c1: one,
                c2: one,
                x: c(0.0, 0.2),
                y: c(0.0, -0.2),
                ..base
            },
            &ctl,
        )
        .unwrap();
        assert!(rel(r.value, one) < 1e-14);
        let far = AppellF2Spec {
            x: c(0.5, 0.0),
            y: c(0.0, 0.5),
            ..base
        };
        assert!(matches!(appell_f2(&far, &ctl), Err(Error::Domain(_))));
    }

    #[test]
    fn invalid_lower_parameters() {
        let ctl = SeriesControl::default();
        let spec = kdf(1.0, 1.0, 1.0, -2.0, 1.0, 1.0, c(0.1, 0.0), c(0.1, 0.0));
        assert!(matches!(kdf_eval(&spec, &ctl), Err(Error::Parameter(_))));
    }

    /// Rectangular sum over m1, m2 <= n with every coefficient from log-gamma
    /// differences.
    fn brute_kdf(s: &KdfSpec, n: u64) -> Complex {
        let lg = |v: Complex| ln_gamma(v).unwrap();
        let ratio = |b: Complex, d: Complex, m: f64| (lg(b + m) - lg(b) - lg(d + m) + lg(d)).exp();
        let side = |b: Complex, d: Complex, z: Complex| -> Vec<Complex> {
            (0..=n)
                .map(|m| {
                    if m == 0 {
                        c(1.0, 0.0)
                    } else if z == c(0.0, 0.0) {
                        c(0.0, 0.0)
                    } else {
                        let m = m as f64;
                        ratio(b, d, m) * (z.ln() * m - lg(c(m + 1.0, 0.0))).exp()
                    }
                })
                .collect()
        };
        let a = side(s.b1, s.d1, s.z1);
        let b = side(s.b2, s.d2, s.z2);
        let diag: Vec<Complex> = (0..=2 * n).map(|k| ratio(s.a1, s.c1, k as f64)).collect();
        let mut total = c(0.0, 0.0);
        for m1 in 0..=n as usize {
            for m2 in 0..=n as usize {
                total += diag[m1 + m2] * a[m1] * b[m2];
            }
        }
        total
    }

    fn arb_c(lo: f64, hi: f64, im: f64) -> impl Strategy<Value = Complex> {
        (lo..hi, -im..im).prop_map(|(re, im)| Complex::new(re, im))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn kdf_matches_rectangular_sum(a1 in arb_c(0.2, 3.0, 0.5), b1 in arb_c(0.2, 3.0, 0.5), b2 in arb_c(0.2, 3.0, 0.5),
                                       c1 in arb_c(0.5, 3.0, 0.5), d1 in arb_c(0.5, 3.0, 0.5), d2 in arb_c(0.5, 3.0, 0.5),
                                       r1 in 0.0f64..0.6, t1 in -3.1f64..3.1, r2 in 0.0f64..0.6, t2 in -3.1f64..3.1) {
            let spec = KdfSpec { a1, b1, b2, c1, d1, d2, z1: Complex::from_polar(r1, t1), z2: Complex::from_polar(r2, t2) };
            let v = kdf_eval(&spec, &SeriesControl::default()).unwrap().value;
            let brute = brute_kdf(&spec, 150);
            prop_assert!((v - brute).norm() <= 1e-10 * brute.norm().max(1e-3));
        }

        #[test]
        fn f2_symmetry(a in arb_c(0.2, 3.0, 0.5), b1 in arb_c(0.2, 3.0, 0.5), b2 in arb_c(0.2, 3.0, 0.5),
                       c1 in arb_c(0.5, 3.0, 0.5), c2 in arb_c(0.5, 3.0, 0.5),
                       r1 in 0.0f64..0.45, t1 in -3.1f64..3.1, r2 in 0.0f64..0.45, t2 in -3.1f64..3.1) {
            let ctl = SeriesControl::default();
            let x = Complex::from_polar(r1, t1);
            let y = Complex::from_polar(r2, t2);
            let p = appell_f2(&AppellF2Spec { a, b1, b2, c1, c2, x, y }, &ctl).unwrap().value;
            let q = appell_f2(&AppellF2Spec { a, b1: b2, b2: b1, c1: c2, c2: c1, x: y, y: x }, &ctl).unwrap().value;
            prop_assert!(rel(p, q) <= 1e-12);
        }
    }
}
