//! Golden integral values computed once by the quadrature oracle.
//!
//! Numbers are stored as decimal strings with 17 significant digits, which
//! round-trip every f64 exactly.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::integrals::{quadrature_oracle, IntegralSpec};
use crate::numerics::Complex;

pub const INTEGRAL_FIXTURES: &str = include_str!("../fixtures/integrals.json");

/// Absolute tolerance handed to the oracle when regenerating.
pub const ORACLE_ABS_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegralFixture {
    /// alpha, beta and gamma as [re, im] pairs.
    pub params: BTreeMap<String, [String; 2]>,
    pub lambda: [String; 2],
    pub l: u32,
    pub rho: String,
    pub value_re: String,
    pub value_im: String,
    pub abs_err: String,
}

pub fn format_f64(x: f64) -> String {
    format!("{x:.16e}")
}

fn parse(s: &str) -> Result<f64> {
    s.parse()
        .map_err(|_| Error::Parameter(format!("bad fixture number {s:?}")))
}

fn pair(z: Complex) -> [String; 2] {
    [format_f64(z.re), format_f64(z.im)]
}

fn unpair(p: &[String; 2]) -> Result<Complex> {
    Ok(Complex::new(parse(&p[0])?, parse(&p[1])?))
}

impl IntegralFixture {
    pub fn new(spec: &IntegralSpec, value: Complex, abs_err: f64) -> Self {
        let params = [("alpha", spec.alpha), ("beta", spec.beta), ("gamma", spec.gamma)]
            .into_iter()
            .map(|(k, v)| (k.to_string(), pair(v)))
            .collect();
        IntegralFixture {
            params,
            lambda: pair(spec.lambda),
            l: spec.l,
            rho: format_f64(spec.rho),
            value_re: format_f64(value.re),
            value_im: format_f64(value.im),
            abs_err: format_f64(abs_err),
        }
    }

    pub fn spec(&self) -> Result<IntegralSpec> {
        let get = |k: &str| {
            self.params
                .get(k)
                .ok_or_else(|| Error::Parameter(format!("fixture lacks {k}")))
                .and_then(unpair)
        };
        IntegralSpec::new(get("alpha")?, get("beta")?, get("gamma")?, self.l, parse(&self.rho)?)?
            .with_lambda(unpair(&self.lambda)?)
    }

    pub fn value(&self) -> Result<Complex> {
        Ok(Complex::new(parse(&self.value_re)?, parse(&self.value_im)?))
    }

    pub fn abs_err(&self) -> Result<f64> {
        parse(&self.abs_err)
    }
}

pub fn parse_fixtures(json: &str) -> Result<Vec<IntegralFixture>> {
    serde_json::from_str(json).map_err(|e| Error::Parameter(format!("fixture file: {e}")))
}

pub fn integral_fixtures() -> Result<Vec<IntegralFixture>> {
    parse_fixtures(INTEGRAL_FIXTURES)
}

/// The parameter points that make up the fixture file.
pub fn golden_specs() -> Vec<IntegralSpec> {
    let c = Complex::new;
    let real = |a, b, g, l, rho| IntegralSpec::real(a, b, g, l, rho).expect("valid golden spec");
    let mut specs = vec![
        real(1.5, 2.0, 0.5, 0, 1.0),
        real(1.5, 2.0, 0.5, 1, 1.0),
        real(1.5, 2.0, 0.5, 2, 3.0),
        real(0.7, -0.5, 0.2, 0, 2.5),
        real(1.0, 1.0, 0.0, 0, 2.0),
        IntegralSpec::new(c(2.0, -0.5), c(4.0, 0.0), c(0.0, 1.0), 0, 1.0).expect("valid golden spec"),
        IntegralSpec::new(c(2.0, -1.0), c(4.0, 0.0), c(0.0, 2.0), 0, 1.0).expect("valid golden spec"),
        IntegralSpec::new(c(1.2, 0.3), c(2.5, -0.2), c(0.8, 0.1), 1, 2.0).expect("valid golden spec"),
    ];
    specs.push(
        real(1.3, 1.7, 0.4, 1, 1.5)
            .with_lambda(Complex::from_polar(1.0, 0.7))
            .expect("valid golden spec"),
    );
    specs
}

/// Runs the oracle over `golden_specs` and renders the fixture file.
pub fn regenerate() -> Result<String> {
    let fixtures = golden_specs()
        .iter()
        .map(|spec| {
            let r = quadrature_oracle(spec, None, ORACLE_ABS_TOL)?;
            Ok(IntegralFixture::new(spec, r.value, r.abs_error_estimate))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = serde_json::to_string_pretty(&fixtures).map_err(|e| Error::Parameter(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for x in [0.1, -1.0 / 3.0, 1e-300, 6.02214076e23, f64::MIN_POSITIVE, 0.0] {
            assert_eq!(parse(&format_f64(x)).unwrap().to_bits(), x.to_bits());
        }
    }

    #[test]
    fn embedded_file_parses() {
        let f = integral_fixtures().unwrap();
        assert_eq!(f.len(), golden_specs().len());
        for (fx, spec) in f.iter().zip(golden_specs()) {
            assert_eq!(fx.spec().unwrap(), spec);
        }
    }
}
