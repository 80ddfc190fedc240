//! Generalized hypergeometric series pFq(a; b; x) for p <= q.
//!
//! Terms come from the ratio t_{k+1}/t_k, multiplying `(a + k)` once per
//! multiplicity so that long repeated blocks never pass through gamma
//! products. Summation stops once `stagnation_window` consecutive terms are
//! below `rel_tol * |partial|` while the term ratio is below one.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{nonpositive_integer_near, Complex, EvalResult, POLE_TOLERANCE};
use crate::parallel::Execution;

/// Ordered multiset of complex parameters; `(value, multiplicity)` entries.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ParamList {
    entries: Vec<(Complex, u32)>,
}

impl ParamList {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_values(values: &[Complex]) -> Self {
        values.iter().fold(Self::new(), |list, v| list.with(*v, 1))
    }

    pub fn single(value: Complex) -> Self {
        Self::new().with(value, 1)
    }

    /// Appends `value` repeated `multiplicity` times. A zero multiplicity is
    /// the empty block and leaves the list unchanged.
    pub fn with(mut self, value: Complex, multiplicity: u32) -> Self {
        self.push(value, multiplicity);
        self
    }

    pub fn push(&mut self, value: Complex, multiplicity: u32) {
        if multiplicity > 0 {
            self.entries.push((value, multiplicity));
        }
    }

    pub fn entries(&self) -> &[(Complex, u32)] {
        &self.entries
    }

    /// Expanded length: the sum of multiplicities.
    pub fn len(&self) -> usize {
        self.entries.iter().map(|(_, m)| *m as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn expanded(&self) -> impl Iterator<Item = Complex> + '_ {
        self.entries
            .iter()
            .flat_map(|(v, m)| std::iter::repeat_n(*v, *m as usize))
    }
}

/// Truncation and scheduling knobs shared by every series evaluator.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeriesControl {
    pub rel_tol: f64,
    pub max_terms: usize,
    pub stagnation_window: usize,
    pub execution: Execution,
}

impl Default for SeriesControl {
    fn default() -> Self {
        SeriesControl {
            rel_tol: 1e-12,
            max_terms: 100_000,
            stagnation_window: 3,
            execution: Execution::default(),
        }
    }
}

impl SeriesControl {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        SeriesControl { rel_tol, ..self }
    }

    pub fn with_max_terms(self, max_terms: usize) -> Self {
        SeriesControl { max_terms, ..self }
    }

    pub fn with_execution(self, execution: Execution) -> Self {
        SeriesControl { execution, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::Parameter(format!(
                "rel_tol must be positive, got {}",
                self.rel_tol
            )));
        }
        if self.stagnation_window == 0 || self.max_terms == 0 {
            return Err(Error::Parameter(
                "stagnation_window and max_terms must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

fn check_lists(upper: &ParamList, lower: &ParamList) -> Result<()> {
    if upper.len() > lower.len() {
        return Err(Error::Parameter(format!(
            "p = {} exceeds q = {}",
            upper.len(),
            lower.len()
        )));
    }
    for b in lower.expanded() {
        if nonpositive_integer_near(b, POLE_TOLERANCE).is_some() {
            return Err(Error::Parameter(format!(
                "lower parameter {b} is a nonpositive integer"
            )));
        }
    }
    Ok(())
}

/// t_{k+1}/t_k with upper and lower factors interleaved.
fn term_ratio(upper: &ParamList, lower: &ParamList, x: Complex, k: usize) -> Complex {
    let kf = k as f64;
    let mut lo = lower.expanded();
    let mut r = x / (kf + 1.0);
    for a in upper.expanded() {
        // p <= q guarantees a partner.
        let b = lo.next().unwrap_or(Complex::new(1.0, 0.0));
        r *= (a + kf) / (b + kf);
    }
    for b in lo {
        r /= b + kf;
    }
    r
}

/// First `n` terms of the series, from the same recurrence the evaluator uses.
pub fn series_terms(upper: &ParamList, lower: &ParamList, x: Complex, n: usize) -> Vec<Complex> {
    let mut t = Complex::new(1.0, 0.0);
    (0..n)
        .map(|k| {
            let current = t;
            t *= term_ratio(upper, lower, x, k);
            current
        })
        .collect()
}

/// Σ w(k) t_k with the standard stopping rule; `weight` is called for
/// k = 0, 1, 2, ... in order.
pub(crate) fn weighted_pfq<W>(
    upper: &ParamList,
    lower: &ParamList,
    x: Complex,
    ctl: &SeriesControl,
    mut weight: W,
) -> Result<EvalResult>
where
    W: FnMut(usize) -> Complex,
{
    ctl.validate()?;
    check_lists(upper, lower)?;
    let mut t = Complex::new(1.0, 0.0);
    let mut partial = Complex::new(0.0, 0.0);
    let mut sum_abs = 0.0;
    let mut small_run = 0;
    for k in 0..ctl.max_terms {
        let wt = weight(k) * t;
        partial += wt;
        sum_abs += wt.norm();
        let ratio = term_ratio(upper, lower, x, k);
        let rounding = 2.0 * f64::EPSILON * sum_abs;
        if t == Complex::new(0.0, 0.0) || ratio == Complex::new(0.0, 0.0) {
            // Terminating series: every later term is exactly zero.
            return finish(partial, rounding, k + 1, ctl, true);
        }
        let q = ratio.norm();
        let threshold = ctl.rel_tol * partial.norm().max(f64::EPSILON * sum_abs);
        if q < 1.0 && wt.norm() <= threshold && threshold > 0.0 {
            small_run += 1;
        } else {
            small_run = 0;
        }
        if small_run >= ctl.stagnation_window {
            let tail = 2.0 * wt.norm() * q / (1.0 - q);
            return finish(partial, tail + rounding, k + 1, ctl, true);
        }
        t *= ratio;
        if !(t.re.is_finite() && t.im.is_finite()) {
            return Err(Error::Overflow(format!("series term {k} overflowed")));
        }
    }
    Err(Error::NoConvergence { terms: ctl.max_terms })
}

fn finish(value: Complex, abs_err: f64, terms: usize, ctl: &SeriesControl, stagnated: bool) -> Result<EvalResult> {
    Ok(EvalResult::from_budget(value, abs_err, terms, ctl.rel_tol, stagnated))
}

/// pFq(upper; lower; x).
pub fn pfq(upper: &ParamList, lower: &ParamList, x: Complex, ctl: &SeriesControl) -> Result<EvalResult> {
    weighted_pfq(upper, lower, x, ctl, |_| Complex::new(1.0, 0.0))
}

/// Σ k t_k, i.e. x d/dx pFq(upper; lower; x).
pub fn pfq_index_weighted(upper: &ParamList, lower: &ParamList, x: Complex, ctl: &SeriesControl) -> Result<EvalResult> {
    weighted_pfq(upper, lower, x, ctl, |k| Complex::new(k as f64, 0.0))
}

/// Kummer's function M(a; b; x) = 1F1(a; b; x).
pub fn kummer_m(a: Complex, b: Complex, x: Complex, ctl: &SeriesControl) -> Result<EvalResult> {
    pfq(&ParamList::single(a), &ParamList::single(b), x, ctl)
}
