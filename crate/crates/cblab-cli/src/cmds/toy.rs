//! `cblab toy`: resonant-pair amplification sweep against the designed
//! power law, plus a truncated-chain experiment checking that one frequency
//! column realizes bounded growth insensitive to the truncation order.

use cblab::numerics::fit::linear_fit;
use cblab::numerics::geomspace;
use cblab::report::{num, KvReport, Table};
use cblab::toy::{
    designed_growth_exponent, designed_interval_ratio, gaussian_offset_profile, integrate_chain,
    toy_amplification_sweep, ChainState,
};
use cblab::weights::intervals::critical_interval;
use cblab::weights::theta::log_theta_nr;

use super::{Ctx, Failure};

/// Allowed relative gap between the fitted and designed power-law exponents.
const EXPONENT_REL_TOL: f64 = 0.1;
/// Allowed relative change in chain growth when the truncation is doubled.
const TRUNCATION_REL_TOL: f64 = 0.05;

pub fn run(ctx: &mut Ctx) -> Result<(), Failure> {
    ctx.cfg
        .check_keys("toy.", &["k", "etas", "chain_eta", "chain_l"])?;
    let k = ctx.cfg.u64("toy.k", 1)? as i64;
    let default_etas = geomspace(1e2, 1e5, 10);
    let etas = ctx.cfg.f64_list("toy.etas", &default_etas)?;
    if etas.is_empty() {
        return Err(Failure::Usage("toy.etas resolves to an empty list".into()));
    }
    let chain_eta = ctx.cfg.f64("toy.chain_eta", 1000.0)?;
    let chain_l = ctx.cfg.u64("toy.chain_l", 10)? as i64;
    let kappa = ctx.weights.kappa;
    let ck = ctx.weights.ck();
    ctx.manifest.config_value("toy.k", k);
    ctx.manifest.config_value(
        "toy.etas",
        etas.iter().map(|e| num(*e)).collect::<Vec<_>>().join(","),
    );
    ctx.manifest.config_value("toy.chain_eta", chain_eta);
    ctx.manifest.config_value("toy.chain_l", chain_l);

    let mut failures: Vec<String> = Vec::new();

    // -- resonant-pair sweep against the designed interval budget ---------
    let sweep = toy_amplification_sweep(k, &etas, kappa)?;
    let mut table = Table::new(&[
        "eta",
        "k",
        "interval",
        "amplification",
        "designed_theta_ratio",
        "ratio_of_ratios",
    ]);
    let mut log_x = Vec::with_capacity(sweep.len());
    let mut log_amp = Vec::with_capacity(sweep.len());
    for row in &sweep {
        let interval = critical_interval(k, row.eta)
            .map_err(|e| Failure::Usage(e.to_string()))?
            .ok_or_else(|| {
                Failure::Usage(format!(
                    "eta = {} is below the resonance cutoff for k = {k}",
                    num(row.eta)
                ))
            })?;
        let designed = designed_interval_ratio(&interval, ck);
        table.row(vec![
            num(row.eta),
            k.to_string(),
            format!("{}..{}", num(interval.t_minus), num(interval.t_plus)),
            num(row.amplification),
            num(designed),
            num(row.amplification / designed),
        ]);
        log_x.push((row.eta / (k as f64).powi(3)).ln());
        log_amp.push(row.amplification.ln());
    }
    table.write(&ctx.out.join("toy.csv"))?;
    ctx.manifest.artifact("toy.csv");

    let designed_exp = designed_growth_exponent(ck);
    let (fitted_exp, _, fit_residual) = linear_fit(&log_x, &log_amp);
    let exp_rel_gap = (fitted_exp - designed_exp).abs() / designed_exp;
    if log_x.len() >= 3 && exp_rel_gap > EXPONENT_REL_TOL {
        failures.push(format!(
            "pair amplification exponent {} misses designed {} by {}",
            num(fitted_exp),
            num(designed_exp),
            num(exp_rel_gap)
        ));
    }

    // -- truncated chain at two truncation orders -------------------------
    let horizon = 2.0 * chain_eta;
    let mut chain_kv: Vec<(String, String)> = Vec::new();
    let mut ln_growths = Vec::new();
    for l_max in [chain_l, 2 * chain_l] {
        let state = ChainState::uniform(chain_eta, l_max)?;
        let initial_norm = state
            .amplitudes
            .iter()
            .map(|a| a.norm_sqr())
            .sum::<f64>()
            .sqrt();
        let profile = gaussian_offset_profile(l_max);
        let run = integrate_chain(&state, &profile, 1.0, horizon)?;
        let ln_growth = (run.max_amplitude / initial_norm).ln();
        ln_growths.push(ln_growth);
        chain_kv.push((format!("chain.l{l_max}.ln_growth"), num(ln_growth)));
        chain_kv.push((
            format!("chain.l{l_max}.dominant_mode"),
            run.dominant_mode.to_string(),
        ));
    }
    let truncation_gap = (ln_growths[0] - ln_growths[1]).abs() / ln_growths[1].abs();
    if truncation_gap > TRUNCATION_REL_TOL {
        failures.push(format!(
            "chain growth shifts by {} when truncation doubles",
            num(truncation_gap)
        ));
    }
    let designed_log = -log_theta_nr(0.0, chain_eta, ck);
    if ln_growths[1] > designed_log {
        failures.push(format!(
            "chain growth {} exceeds the designed budget {}",
            num(ln_growths[1]),
            num(designed_log)
        ));
    }

    // -- scalar summary ----------------------------------------------------
    let mut kv = KvReport::new();
    kv.push("pair.fitted_exponent", num(fitted_exp));
    kv.push("pair.designed_exponent", num(designed_exp));
    kv.push("pair.exponent_rel_gap", num(exp_rel_gap));
    kv.push("pair.fit_residual", num(fit_residual));
    for (key, value) in chain_kv {
        kv.push(key, value);
    }
    kv.push("chain.truncation_rel_gap", num(truncation_gap));
    kv.push("chain.designed_log_budget", num(designed_log));
    kv.push("pass", failures.is_empty());
    kv.write(&ctx.out.join("summary.txt"))?;
    ctx.manifest.artifact("summary.txt");

    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}
