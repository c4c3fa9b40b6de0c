use std::io::Write;

use qlm_core::machines::{
    brute_force_error, covariant_povm, error_from_delta, lm_delta_from_povm, lm_error_projection,
    lm_error_recoupling, optimal_error, tetrahedron_povm,
};
use serde::Serialize;

use crate::output::{write_json, Format};
use crate::Failure;

#[derive(Debug, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub max_defect: f64,
    pub tolerance: f64,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.max_defect <= self.tolerance
    }
}

fn max_over(cap: usize, f: impl Fn(usize) -> qlm_core::Result<f64>) -> qlm_core::Result<f64> {
    (1..=cap).try_fold(0.0f64, |acc, n| Ok(acc.max(f(n)?)))
}

pub fn run_checks(cap: usize) -> qlm_core::Result<Vec<Check>> {
    let against_closed =
        |value: qlm_core::Result<f64>, n: usize| Ok((value? - optimal_error(n)).abs());
    Ok(vec![
        Check {
            name: "brute-force",
            max_defect: max_over(cap, |n| against_closed(brute_force_error(n), n))?,
            tolerance: 1e-9,
        },
        Check {
            name: "projection",
            max_defect: max_over(cap, |n| against_closed(lm_error_projection(n), n))?,
            tolerance: 1e-12,
        },
        Check {
            name: "recoupling",
            max_defect: max_over(cap, |n| against_closed(lm_error_recoupling(n), n))?,
            tolerance: 1e-12,
        },
        Check {
            name: "povm-assembly",
            max_defect: max_over(cap, |n| {
                let delta = lm_delta_from_povm(n, &covariant_povm(n)?)?;
                against_closed(Ok(error_from_delta(delta)), n)
            })?,
            tolerance: 1e-9,
        },
        Check {
            name: "quadrature-completeness",
            max_defect: max_over(cap, |n| covariant_povm(n)?.completeness_defect())?,
            tolerance: 1e-10,
        },
        Check {
            name: "tetrahedron-completeness",
            max_defect: tetrahedron_povm()?.completeness_defect()?,
            tolerance: 1e-10,
        },
    ])
}

pub fn write(checks: &[Check], format: Format, out: &mut dyn Write) -> Result<(), Failure> {
    match format {
        Format::Json => write_json(out, checks),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            w.write_record(["check", "max_defect", "tolerance", "status"])?;
            for c in checks {
                w.write_record([
                    c.name.to_string(),
                    c.max_defect.to_string(),
                    c.tolerance.to_string(),
                    status(c).to_string(),
                ])?;
            }
            w.flush()?;
            Ok(())
        }
        Format::Pretty => {
            for c in checks {
                writeln!(
                    out,
                    "{:<26} {:>10.3e}  (tol {:.0e})  {}",
                    c.name,
                    c.max_defect,
                    c.tolerance,
                    status(c)
                )?;
            }
            Ok(())
        }
    }
}

fn status(c: &Check) -> &'static str {
    if c.passed() {
        "ok"
    } else {
        "FAIL"
    }
}
