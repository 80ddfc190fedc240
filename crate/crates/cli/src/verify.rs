//! Seeded verification batches. Each check collects one residual per draw
//! and passes when the largest stays within its limit; any evaluation error
//! fails the check and keeps the offending draw for reproduction.

use std::collections::BTreeMap;

use clap::ValueEnum;
use wfunc::fixtures::integral_fixtures;
use wfunc::identities::{
    derivative_relation, e_recurrence_binomial, e_recurrence_shift, recurrence_8, sum_identity_10_resummed,
    IdentityReport, Which,
};
use wfunc::integrals::{
    integral_closed_general, integral_closed_l0, integral_closed_l0_alt, laplace_integral_f2, quadrature_oracle,
    IntegralSpec,
};
use wfunc::parallel::map_ordered;
use wfunc::sampling::{Sampler, Suite};
use wfunc::wfunction::{w_asymptotic_zero, w_eval, w_expansion_coefficients, HalfPlane};
use wfunc::{Complex, Result, SeriesControl};

use crate::output::{Cell, Record};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteName {
    Recurrences,
    Sums,
    Asymptotics,
    Integrals,
    All,
}

impl SuiteName {
    pub fn default_tol(self) -> f64 {
        match self {
            SuiteName::Recurrences | SuiteName::Sums => 1e-9,
            SuiteName::Asymptotics => 1e-6,
            SuiteName::Integrals | SuiteName::All => 1e-7,
        }
    }

    fn label(self) -> &'static str {
        match self {
            SuiteName::Recurrences => "recurrences",
            SuiteName::Sums => "sums",
            SuiteName::Asymptotics => "asymptotics",
            SuiteName::Integrals => "integrals",
            SuiteName::All => "all",
        }
    }
}

/// Small-z checks compare against a leading-order form only.
const SMALL_Z_RATIO_LIMIT: f64 = 0.2;
/// Oracle tolerance for integral draws.
const ORACLE_TOL: f64 = 1e-12;

pub struct Check {
    pub suite: &'static str,
    pub name: String,
    pub limit: f64,
    pub draws: usize,
    pub max_residual: f64,
    pub worst: BTreeMap<String, Complex>,
    pub error: Option<(String, BTreeMap<String, Complex>)>,
}

impl Check {
    fn new(suite: &'static str, name: impl Into<String>, limit: f64) -> Self {
        Check {
            suite,
            name: name.into(),
            limit,
            draws: 0,
            max_residual: 0.0,
            worst: BTreeMap::new(),
            error: None,
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.max_residual <= self.limit
    }

    fn record(&mut self, params: &[(&str, Complex)], outcome: Result<IdentityReport>) {
        self.draws += 1;
        match outcome {
            Ok(rep) if rep.residual.is_nan() => self.fail("residual is NaN".into(), params),
            Ok(rep) => {
                if rep.residual > self.max_residual || self.worst.is_empty() {
                    self.max_residual = self.max_residual.max(rep.residual);
                    self.worst = owned(params);
                }
            }
            Err(e) => self.fail(e.to_string(), params),
        }
    }

    fn fail(&mut self, msg: String, params: &[(&str, Complex)]) {
        if self.error.is_none() {
            self.error = Some((msg, owned(params)));
        }
    }

    pub fn to_record(&self) -> Record {
        let mut r = Record::new();
        r.text("suite", self.suite)
            .text("identity", self.name.clone())
            .push("draws", Cell::Int(self.draws as u64))
            .num("max_residual", self.max_residual)
            .num("limit", self.limit)
            .push("passed", Cell::Bool(self.passed()))
            .text("worst_draw", describe(&self.worst))
            .text(
                "error",
                self.error
                    .as_ref()
                    .map_or(String::new(), |(m, p)| format!("{m} at {}", describe(p))),
            );
        r
    }
}

fn owned(params: &[(&str, Complex)]) -> BTreeMap<String, Complex> {
    params.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn describe(params: &BTreeMap<String, Complex>) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={}{:+}i", v.re, v.im))
        .collect::<Vec<_>>()
        .join(";")
}

type Params = Vec<(&'static str, Complex)>;

/// Evaluates the draws in parallel and feeds them to `check` in draw order.
fn run<D: Sync>(
    check: &mut Check,
    draws: &[D],
    ctl: &SeriesControl,
    f: impl Fn(&D) -> (Params, Result<IdentityReport>) + Sync + Send,
) {
    for (params, outcome) in map_ordered(ctl.execution, draws, f) {
        check.record(&params, outcome);
    }
}

fn c(x: f64) -> Complex {
    Complex::new(x, 0.0)
}

fn recurrences(draws: usize, seed: u64, tol: f64, ctl: &SeriesControl) -> Vec<Check> {
    let mut s = Sampler::new(seed, Suite::Recurrences);
    let w: Vec<_> = (0..draws).map(|_| s.w_args(1.5, 8.0)).collect();
    let rho: Vec<f64> = (0..draws).map(|_| s.uniform(0.5, 5.0)).collect();
    let zeta: Vec<f64> = (0..draws).map(|_| s.uniform(-0.5, 0.5)).collect();
    let mut out = Vec::new();
    for which in Which::ALL {
        let mut check = Check::new("recurrences", format!("recurrence_8{}", which.label()), tol);
        run(&mut check, &w, ctl, |a| {
            let p = vec![
                ("alpha", a.alpha),
                ("beta", a.beta),
                ("gamma", a.gamma),
                ("delta", a.delta),
                ("z", a.z),
            ];
            (p, recurrence_8(which, a.alpha, a.beta, a.gamma, a.delta, a.z, ctl))
        });
        out.push(check);
    }
    let idx: Vec<usize> = (0..draws).collect();
    let mut check = Check::new("recurrences", "e_derivative_relation", tol);
    run(&mut check, &idx, ctl, |&i| {
        let a = &w[i];
        let nu = (i % 6) as u32;
        let p = vec![
            ("alpha", a.alpha),
            ("beta", a.beta),
            ("delta", a.delta),
            ("nu", c(f64::from(nu))),
            ("z", a.z),
        ];
        (p, derivative_relation(a.alpha, a.beta, a.delta, nu, a.z, ctl))
    });
    out.push(check);
    let mut check = Check::new("recurrences", "e_recurrence_shift", tol);
    run(&mut check, &idx, ctl, |&i| {
        let a = &w[i];
        let p = vec![
            ("alpha", a.alpha),
            ("beta", a.beta),
            ("gamma", a.gamma),
            ("rho", c(rho[i])),
        ];
        (
            p,
            e_recurrence_shift(a.alpha, a.beta, a.gamma, rho[i], Complex::i(), ctl),
        )
    });
    out.push(check);
    let mut check = Check::new("recurrences", "e_recurrence_binomial", tol);
    run(&mut check, &idx, ctl, |&i| {
        let a = &w[i];
        let l = (i % 4) as u32;
        let p = vec![
            ("alpha", a.alpha),
            ("beta", a.beta),
            ("gamma", a.gamma),
            ("l", c(f64::from(l))),
            ("zeta", c(zeta[i])),
            ("rho", c(rho[i])),
        ];
        (
            p,
            e_recurrence_binomial(a.alpha, a.beta, a.gamma, l, c(zeta[i]), rho[i], Complex::i(), ctl),
        )
    });
    out.push(check);
    out
}

fn sums(draws: usize, seed: u64, tol: f64, ctl: &SeriesControl) -> Vec<Check> {
    let mut s = Sampler::new(seed, Suite::Sums);
    let d: Vec<_> = (0..draws)
        .map(|i| (s.sum_params(), s.polar(1.5, 8.0), (i % 4) as u32))
        .collect();
    Which::ALL
        .into_iter()
        .map(|which| {
            let mut check = Check::new("sums", format!("sum_10{}_resummed", which.label()), tol);
            run(&mut check, &d, ctl, |(p, z, r)| {
                let params = vec![
                    ("alpha", p.alpha),
                    ("beta", p.beta),
                    ("gamma", p.gamma),
                    ("z", *z),
                    ("r", c(f64::from(*r))),
                ];
                (params, sum_identity_10_resummed(which, p, *z, *r, ctl))
            });
            check
        })
        .collect()
}

fn asymptotics(draws: usize, seed: u64, tol: f64, ctl: &SeriesControl) -> Vec<Check> {
    let mut s = Sampler::new(seed, Suite::Asymptotics);
    let far: Vec<_> = (0..draws)
        .map(|_| {
            let z = Complex::from_polar(1000.0, s.uniform(-3.1, 3.1));
            s.w_params(z)
        })
        .collect();
    let near: Vec<_> = (0..draws).map(|_| s.w_params_small(c(-0.02))).collect();
    let mut check = Check::new("asymptotics", "w_infinity_expansion", tol);
    run(&mut check, &far, ctl, |a| {
        let p = vec![
            ("alpha", a.alpha),
            ("beta", a.beta),
            ("gamma", a.gamma),
            ("delta", a.delta),
            ("z", a.z),
        ];
        let outcome = (|| {
            let [c0, c1, c2] = w_expansion_coefficients(a)?;
            let w = w_eval(a, ctl)?.value;
            Ok(IdentityReport::new(
                "w_infinity_expansion",
                w,
                c0 + c1 / a.z + c2 / (a.z * a.z),
                &p,
            ))
        })();
        (p, outcome)
    });
    let mut small = Check::new("asymptotics", "w_small_z_ratio", SMALL_Z_RATIO_LIMIT);
    run(&mut small, &near, ctl, |a| {
        let p = vec![
            ("alpha", a.alpha),
            ("beta", a.beta),
            ("gamma", a.gamma),
            ("delta", a.delta),
            ("z", a.z),
        ];
        let outcome = (|| {
            let w = w_eval(a, ctl)?.value;
            let lead = w_asymptotic_zero(a, HalfPlane::NegativeRe)?;
            // Relative deviation of the ratio from 1.
            Ok(IdentityReport::new("w_small_z_ratio", w / lead, c(1.0), &p))
        })();
        (p, outcome)
    });
    vec![check, small]
}

fn integral_params(s: &IntegralSpec) -> Params {
    vec![
        ("alpha", s.alpha),
        ("beta", s.beta),
        ("gamma", s.gamma),
        ("l", c(f64::from(s.l))),
        ("rho", c(s.rho)),
        ("lambda", s.lambda),
    ]
}

fn integrals(draws: usize, seed: u64, tol: f64, ctl: &SeriesControl) -> Vec<Check> {
    let mut s = Sampler::new(seed, Suite::Integrals);
    let specs: Vec<IntegralSpec> = (0..draws).map(|_| s.integral_spec()).collect();
    let mut l = Sampler::new(seed, Suite::Laplace);
    let laplace: Vec<_> = (0..draws)
        .map(|i| l.laplace_spec(c([2.5, 3.0, 5.0, 10.0][i % 4])))
        .collect();

    let mut oracle = Check::new("integrals", "closed_form_vs_oracle", tol);
    run(&mut oracle, &specs, ctl, |spec| {
        let p = integral_params(spec);
        let outcome = (|| {
            let closed = integral_closed_general(spec, ctl)?.value;
            let numeric = quadrature_oracle(spec, None, ORACLE_TOL)?.value;
            Ok(IdentityReport::new("closed_form_vs_oracle", closed, numeric, &p))
        })();
        (p, outcome)
    });
    let mut forms = Check::new("integrals", "l0_forms_agree", tol.min(1e-10));
    run(&mut forms, &specs, ctl, |spec| {
        let spec = IntegralSpec { l: 0, ..*spec };
        let p = integral_params(&spec);
        let outcome = (|| {
            let a = integral_closed_l0(&spec, ctl)?.value;
            let b = integral_closed_l0_alt(&spec, ctl)?.value;
            let g = integral_closed_general(&spec, ctl)?.value;
            let ab = IdentityReport::new("l0_forms_agree", a, b, &p);
            let ag = IdentityReport::new("l0_forms_agree", a, g, &p);
            Ok(if ab.residual >= ag.residual { ab } else { ag })
        })();
        (p, outcome)
    });
    let mut lap = Check::new("integrals", "laplace_f2_vs_oracle", tol.max(1e-6));
    run(&mut lap, &laplace, ctl, |spec| {
        let p = vec![
            ("alpha", spec.alpha),
            ("beta", spec.beta),
            ("gamma", spec.gamma),
            ("h", spec.h),
        ];
        let outcome = (|| {
            let closed = laplace_integral_f2(spec, ctl)?.value;
            let base = IntegralSpec::new(spec.alpha, spec.beta, spec.gamma, 0, 1.0)?;
            let numeric = quadrature_oracle(&base, Some(spec.h), ORACLE_TOL)?.value;
            Ok(IdentityReport::new("laplace_f2_vs_oracle", closed, numeric, &p))
        })();
        (p, outcome)
    });
    vec![oracle, forms, lap]
}

/// Closed forms against the frozen oracle values.
fn fixtures(tol: f64, ctl: &SeriesControl) -> Check {
    let mut check = Check::new("fixtures", "golden_integrals", tol);
    match integral_fixtures() {
        Ok(list) => run(&mut check, &list, ctl, |fx| {
            let spec = fx.spec();
            let p = spec.as_ref().map(integral_params).unwrap_or_default();
            let outcome = spec.and_then(|spec| {
                let closed = integral_closed_general(&spec, ctl)?.value;
                Ok(IdentityReport::new("golden_integrals", closed, fx.value()?, &p))
            });
            (p, outcome)
        }),
        Err(e) => check.fail(e.to_string(), &[]),
    }
    check
}

pub fn verify(suite: SuiteName, draws: usize, seed: u64, tol: Option<f64>, ctl: &SeriesControl) -> Vec<Check> {
    let tol_for = |s: SuiteName| tol.unwrap_or(s.default_tol());
    let mut out = Vec::new();
    let selected = match suite {
        SuiteName::All => vec![
            SuiteName::Recurrences,
            SuiteName::Sums,
            SuiteName::Asymptotics,
            SuiteName::Integrals,
        ],
        s => vec![s],
    };
    for s in selected.iter().filter(|_| draws > 0) {
        let t = tol_for(*s);
        out.extend(match s {
            SuiteName::Recurrences => recurrences(draws, seed, t, ctl),
            SuiteName::Sums => sums(draws, seed, t, ctl),
            SuiteName::Asymptotics => asymptotics(draws, seed, t, ctl),
            SuiteName::Integrals => integrals(draws, seed, t, ctl),
            SuiteName::All => unreachable!("expanded above"),
        });
    }
    if matches!(suite, SuiteName::Integrals | SuiteName::All) {
        out.push(fixtures(tol_for(SuiteName::Integrals), ctl));
    }
    out
}

impl std::fmt::Display for SuiteName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}
