//! Parameter sweeps. Every grid point yields one row; a failed evaluation
//! is reported in the `status` column and the sweep carries on.

use wfunc::integrals::{integral_closed_general, IntegralSpec};
use wfunc::parallel::map_ordered;
use wfunc::wfunction::{w_eval_path, WArgs, WPath};
use wfunc::{Complex, Error, EvalResult, Result, SeriesControl};

use crate::output::{Cell, Record};

/// `steps` evenly spaced points from `start` to `stop`, both included.
pub fn grid(start: f64, stop: f64, steps: usize) -> std::result::Result<Vec<f64>, String> {
    if steps == 0 {
        return Err("steps must be at least 1".into());
    }
    if start.is_nan() || stop.is_nan() || start >= stop {
        return Err(format!("start {start} must be below stop {stop}"));
    }
    if steps == 1 {
        return Ok(vec![start]);
    }
    let h = (stop - start) / (steps - 1) as f64;
    Ok((0..steps)
        .map(|k| if k + 1 == steps { stop } else { start + h * k as f64 })
        .collect())
}

pub fn status(outcome: &Result<EvalResult>) -> String {
    match outcome {
        Ok(r) if r.converged => "ok".into(),
        Ok(_) => "unconverged".into(),
        Err(Error::NoConvergence { terms }) => format!("no_convergence after {terms} terms"),
        Err(e) => format!("error: {e}"),
    }
}

fn result_cells(r: &mut Record, outcome: &Result<EvalResult>) {
    match outcome {
        Ok(v) => {
            r.eval_result(v);
        }
        Err(_) => {
            r.text("value_re", "")
                .text("value_im", "")
                .text("abs_error_estimate", "")
                .text("terms_used", "")
                .text("converged", "false");
        }
    }
    r.text("status", status(outcome));
}

/// W along the ray z = r e^{iθ}, r over the grid.
pub fn w_table(base: &WArgs, radii: &[f64], theta: f64, path: WPath, ctl: &SeriesControl) -> Vec<Record> {
    map_ordered(ctl.execution, radii, |&r| {
        let z = Complex::from_polar(r, theta);
        let outcome = base.with_z(z).and_then(|a| w_eval_path(&a, path, ctl));
        let mut row = Record::new();
        row.complex("alpha", base.alpha)
            .complex("beta", base.beta)
            .complex("gamma", base.gamma)
            .complex("delta", base.delta)
            .complex("z", z);
        result_cells(&mut row, &outcome);
        row
    })
}

pub fn integral_table(base: &IntegralSpec, rhos: &[f64], ctl: &SeriesControl) -> Vec<Record> {
    map_ordered(ctl.execution, rhos, |&rho| {
        let outcome = base.with_rho(rho).and_then(|s| integral_closed_general(&s, ctl));
        let mut row = Record::new();
        row.complex("alpha", base.alpha)
            .complex("beta", base.beta)
            .complex("gamma", base.gamma)
            .push("l", Cell::Int(u64::from(base.l)))
            .num("rho", rho)
            .complex("lambda", base.lambda);
        result_cells(&mut row, &outcome);
        row
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(grid(1.0, 2.0, 2).unwrap(), vec![1.0, 2.0]);
        assert_eq!(grid(10.0, 1000.0, 3).unwrap(), vec![10.0, 505.0, 1000.0]);
        assert_eq!(grid(0.0, 1.0, 1).unwrap(), vec![0.0]);
        assert!(grid(1.0, 1.0, 3).is_err());
        assert!(grid(0.0, 1.0, 0).is_err());
    }
}
