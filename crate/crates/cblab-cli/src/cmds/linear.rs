//! `cblab linear`: long-horizon decay-rate scan of the linearized mode
//! system over one or more buoyancy strengths, compared against the
//! reference long-time exponents.

use cblab::linear::{yang_lin_rate_scan, DEFAULT_MODE_SET};
use cblab::report::{num, KvReport, Table};

use super::{Ctx, Failure};

/// Allowed gap between a fitted exponent and its reference value.
const EXPONENT_TOL: f64 = 0.1;

pub fn run(ctx: &mut Ctx) -> Result<(), Failure> {
    ctx.cfg.check_keys("linear.", &["gamma_sq", "T"])?;
    let gamma_sq = ctx.cfg.f64_list("linear.gamma_sq", &[1.0, 0.16])?;
    if gamma_sq.is_empty() {
        return Err(Failure::Usage(
            "linear.gamma_sq resolves to an empty list".into(),
        ));
    }
    let t_fit_max = ctx.cfg.f64("linear.T", 2000.0)?;
    ctx.manifest.config_value("linear.T", t_fit_max);
    ctx.manifest.config_value(
        "linear.gamma_sq",
        gamma_sq.iter().map(|g| num(*g)).collect::<Vec<_>>().join(","),
    );

    let mut table = Table::new(&[
        "gamma_sq",
        "quantity",
        "fitted_exponent",
        "expected_exponent",
        "residual",
        "window",
    ]);
    let mut kv = KvReport::new();
    let mut failures: Vec<String> = Vec::new();
    for &g in &gamma_sq {
        let rows = yang_lin_rate_scan(g, &DEFAULT_MODE_SET, t_fit_max)?;
        for row in &rows {
            table.row(vec![
                num(row.gamma_sq),
                row.quantity.id().into(),
                num(row.fit.exponent),
                num(row.expected),
                num(row.fit.residual),
                format!("{}..{}", num(row.fit.window.0), num(row.fit.window.1)),
            ]);
            let gap = (row.fit.exponent - row.expected).abs();
            kv.push(
                format!("gamma_sq_{}.{}", num(g), row.quantity.id()),
                format!("{} (expected {})", num(row.fit.exponent), num(row.expected)),
            );
            if gap > EXPONENT_TOL || !row.converged {
                failures.push(format!(
                    "gamma_sq={} {}: fitted {} vs expected {} (gap {}, converged {})",
                    num(g),
                    row.quantity.id(),
                    num(row.fit.exponent),
                    num(row.expected),
                    num(gap),
                    row.converged
                ));
            }
        }
    }
    table.write(&ctx.out.join("rates.csv"))?;
    ctx.manifest.artifact("rates.csv");

    kv.push("exponent_tolerance", num(EXPONENT_TOL));
    kv.push("fits_failed", failures.len());
    kv.push("pass", failures.is_empty());
    kv.write(&ctx.out.join("summary.txt"))?;
    ctx.manifest.artifact("summary.txt");

    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}
