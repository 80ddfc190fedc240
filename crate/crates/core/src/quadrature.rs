//! Globally adaptive 15-point Gauss–Kronrod quadrature for complex-valued
//! integrands on a union of real intervals.
//!
//! Each round bisects every interval whose error estimate exceeds its share
//! of the tolerance; the new halves are evaluated as one batch, in parallel
//! when the execution policy allows. Results are summed in interval order,
//! so the outcome does not depend on the policy.
#![allow(clippy::excessive_precision)]

use crate::error::{Error, Result};
use crate::numerics::Complex;
use crate::parallel::{map_ordered, Execution};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];

/// 7-point Gauss weights for the nodes XGK[1], XGK[3], XGK[5] and 0.
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Panel {
    pub a: f64,
    pub b: f64,
    pub value: Complex,
    pub error: f64,
}

/// Kronrod estimate on [a, b] with |Kronrod - Gauss| as its error.
pub fn gk15<F: Fn(f64) -> Complex>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += pair * WGK[j];
        if j % 2 == 1 {
            gauss += pair * WG[j / 2];
        }
    }
    let value = kronrod * half;
    let error = ((kronrod - gauss) * half).norm();
    Panel { a, b, value, error }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex,
    pub abs_error: f64,
    pub panels: usize,
}

/// Integrates `f` over the union of `intervals` to absolute accuracy
/// `abs_tol`, using at most `max_panels` panels.
pub fn integrate<F>(
    f: &F,
    intervals: &[(f64, f64)],
    abs_tol: f64,
    max_panels: usize,
    exec: Execution,
) -> Result<QuadratureResult>
where
    F: Fn(f64) -> Complex + Sync,
{
    let mut panels = map_ordered(exec, intervals, |&(a, b)| gk15(f, a, b));
    loop {
        let total_err: f64 = panels.iter().map(|p| p.error).sum();
        if panels
            .iter()
            .any(|p| !(p.value.re.is_finite() && p.value.im.is_finite()))
            || !total_err.is_finite()
        {
            return Err(Error::QuadratureFailure("integrand is not finite".into()));
        }
        if total_err <= abs_tol {
            panels.sort_by(|p, q| p.a.total_cmp(&q.a));
            let value = panels.iter().map(|p| p.value).sum();
            return Ok(QuadratureResult {
                value,
                abs_error: total_err,
                panels: panels.len(),
            });
        }
        let share = abs_tol / panels.len() as f64;
        let (split, keep): (Vec<Panel>, Vec<Panel>) = panels.into_iter().partition(|p| p.error > share);
        let halves: Vec<(f64, f64)> = split
            .iter()
            .flat_map(|p| {
                let m = 0.5 * (p.a + p.b);
                [(p.a, m), (m, p.b)]
            })
            .collect();
        if keep.len() + halves.len() > max_panels {
            return Err(Error::QuadratureFailure(format!(
                "error {total_err:.3e} above {abs_tol:.3e} after {} panels",
                keep.len() + split.len()
            )));
        }
        if halves
            .iter()
            .any(|(a, b)| b - a <= 4.0 * f64::EPSILON * a.abs().max(b.abs()))
        {
            return Err(Error::QuadratureFailure(format!(
                "interval width reached rounding level with error {total_err:.3e}"
            )));
        }
        panels = keep;
        panels.extend(map_ordered(exec, &halves, |&(a, b)| gk15(f, a, b)));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let f = |t: f64| Complex::new(t.powi(5) - 2.0 * t, t * t);
        let p = gk15(&f, 0.0, 2.0);
        assert!((p.value - Complex::new(64.0 / 6.0 - 4.0, 8.0 / 3.0)).norm() < 1e-13);
    }

    #[test]
    fn oscillatory_complex_integrand() {
        // ∫_0^10 e^{i 5 t} dt = (e^{50 i} - 1)/(5i)
        let f = |t: f64| Complex::new(0.0, 5.0 * t).exp();
        let want = (Complex::new(0.0, 50.0).exp() - 1.0) / Complex::new(0.0, 5.0);
        for exec in [Execution::Sequential, Execution::Parallel] {
            let r = integrate(&f, &[(0.0, 10.0)], 1e-13, 1000, exec).unwrap();
            assert!((r.value - want).norm() < 1e-13);
        }
    }

    #[test]
    fn endpoint_singularity_by_panels() {
        // ∫_0^1 t^{-1/2} dt = 2 over dyadic panels down to 2^-60.
        let f = |t: f64| Complex::new(t.powf(-0.5), 0.0);
        let mut intervals = vec![];
        let mut b = 1.0;
        for _ in 0..60 {
            intervals.push((b / 2.0, b));
            b /= 2.0;
        }
        let r = integrate(&f, &intervals, 1e-12, 5000, Execution::Sequential).unwrap();
        let tail = 2.0 * b.sqrt();
        assert!((r.value.re + tail - 2.0).abs() < 1e-11);
    }

    #[test]
    fn budget_exhaustion_fails() {
        let f = |t: f64| Complex::new((1.0 / t).sin(), 0.0);
        let r = integrate(&f, &[(1e-6, 1.0)], 1e-14, 20, Execution::Sequential);
        assert!(matches!(r, Err(Error::QuadratureFailure(_))));
    }
}
