//! `cblab weights`: run every multiplier-weight verification suite, write
//! per-suite CSV detail plus a one-line-per-suite `lemmas.csv`, and fail with
//! exit 1 if any suite misses its bound.

use cblab::report::{num, KvReport, Table};
use cblab::weights::verify::{
    check_interval_coupling, verify_g_closed_form, verify_growth_lemma,
    verify_junction_continuity, verify_ratio_lemmas,
};

use super::{Ctx, Failure};

const DEFAULT_ETAS: [f64; 6] = [10.0, 100.0, 1e3, 1e4, 1e5, 1e6];
const G_REL_TOL: f64 = 1e-8;
const LEMMA_STABILITY_TOL: f64 = 0.1;
const COUPLING_BANDS: [(&str, f64, f64); 3] = [
    ("ratio1", 0.005, 3.0),
    ("ratio2", 0.1, 200.0),
    ("rate_vs_inverse_time", 0.005, 3.0),
];

pub fn run(ctx: &mut Ctx) -> Result<(), Failure> {
    let etas = ctx.cfg.f64_list("weights.etas", &DEFAULT_ETAS)?;
    if etas.is_empty() {
        return Err(Failure::Usage(
            "weights.etas resolves to an empty frequency list".into(),
        ));
    }
    let band = (
        ctx.cfg.f64("weights.band_lo", 0.02)?,
        ctx.cfg.f64("weights.band_hi", 50.0)?,
    );
    if !(band.0 > 0.0 && band.1 > band.0) {
        return Err(Failure::Usage(format!(
            "weights.band_lo..band_hi must be a positive increasing pair, got {}..{}",
            band.0, band.1
        )));
    }
    let samples = ctx.cfg.usize("weights.samples", 10_000)?;
    let seed = match ctx.seed_flag {
        Some(s) => s,
        None => ctx.cfg.u64("weights.seed", 11)?,
    };
    for (key, value) in [
        ("weights.band_lo", band.0),
        ("weights.band_hi", band.1),
        ("weights.samples", samples as f64),
        ("weights.seed", seed as f64),
    ] {
        ctx.manifest.config_value(key, value);
    }
    ctx.manifest.config_value(
        "weights.etas",
        etas.iter().map(|e| num(*e)).collect::<Vec<_>>().join(","),
    );
    let p = ctx.weights.clone();

    let growth = verify_growth_lemma(&etas, band, &p);
    let g_check = verify_g_closed_form(&etas, samples.min(2000).max(200), seed, &p);
    let lemmas = verify_ratio_lemmas(samples, seed, &p);
    let coupling = check_interval_coupling(samples, seed, &p);
    let junctions = verify_junction_continuity(&etas, &p);

    // -- per-suite detail tables ----------------------------------------
    let mut growth_tbl = Table::new(&["eta", "log_inv_theta", "ratio", "stirling_log_gap"]);
    for row in &growth.rows {
        growth_tbl.row(vec![
            num(row.eta),
            num(row.log_inv_theta),
            num(row.ratio),
            row.stirling_log_gap.map(num).unwrap_or_default(),
        ]);
    }
    growth_tbl.write(&ctx.out.join("growth.csv"))?;
    ctx.manifest.artifact("growth.csv");

    let mut g_tbl = Table::new(&["eta", "ode_log", "closed_log", "rel_err"]);
    for row in &g_check.rows {
        g_tbl.row(vec![
            num(row.eta),
            num(row.ode_log),
            num(row.closed_log),
            num(row.rel_err),
        ]);
    }
    g_tbl.write(&ctx.out.join("g_closed_form.csv"))?;
    ctx.manifest.artifact("g_closed_form.csv");

    let mut junction_tbl = Table::new(&["k", "eta", "t", "log_jump"]);
    for probe in &junctions.worst_per_mode {
        junction_tbl.row(vec![
            probe.k.to_string(),
            num(probe.eta),
            num(probe.t),
            num(probe.log_jump),
        ]);
    }
    junction_tbl.write(&ctx.out.join("junctions.csv"))?;
    ctx.manifest.artifact("junctions.csv");

    // -- one pass/fail row per suite ------------------------------------
    let mut suite_tbl = Table::new(&[
        "lemma_id",
        "sample_count",
        "fitted_constant",
        "pass",
        "worst_case_inputs",
    ]);
    let mut failures: Vec<String> = Vec::new();

    let growth_worst = growth
        .rows
        .iter()
        .max_by(|a, b| a.ratio.total_cmp(&b.ratio))
        .expect("etas is non-empty");
    suite_tbl.row(vec![
        "growth-envelope".into(),
        growth.rows.len().to_string(),
        num(growth.ratio_max),
        growth.pass.to_string(),
        format!("eta={}", num(growth_worst.eta)),
    ]);
    if !growth.pass {
        failures.push(format!(
            "growth-envelope ratio band {}..{} escapes {}..{} (max drift {})",
            num(growth.ratio_min),
            num(growth.ratio_max),
            num(band.0),
            num(band.1),
            num(growth.max_successive_drift)
        ));
    }

    let g_worst = g_check
        .rows
        .iter()
        .max_by(|a, b| a.rel_err.total_cmp(&b.rel_err))
        .expect("etas is non-empty");
    let g_pass = g_check.worst_rel_err <= G_REL_TOL && g_check.bound_pass;
    suite_tbl.row(vec![
        "g-closed-form".into(),
        g_check.bound_samples.to_string(),
        num(g_check.worst_rel_err),
        g_pass.to_string(),
        format!("eta={}", num(g_worst.eta)),
    ]);
    if !g_pass {
        failures.push(format!(
            "g-closed-form rel err {} (tol {}) bound slack {}",
            num(g_check.worst_rel_err),
            num(G_REL_TOL),
            num(g_check.bound_min_slack)
        ));
    }

    for stab in &lemmas {
        let fit = &stab.first;
        let ok = fit.c_star.is_finite() && stab.rel_gap <= LEMMA_STABILITY_TOL;
        let w = &fit.worst;
        suite_tbl.row(vec![
            fit.lemma.id().into(),
            fit.samples.to_string(),
            num(fit.c_star),
            ok.to_string(),
            format!(
                "t={};k={};eta={};l={};xi={}",
                num(w.t),
                w.k,
                num(w.eta),
                w.l,
                num(w.xi)
            ),
        ]);
        if !ok {
            failures.push(format!(
                "{}: fitted constant {} (re-seeded gap {})",
                fit.lemma.id(),
                num(fit.c_star),
                num(stab.rel_gap)
            ));
        }
    }

    let coupling_rows = [
        ("ratio1", coupling.ratio1),
        ("ratio2", coupling.ratio2),
        ("rate_vs_inverse_time", coupling.rate_vs_inverse_time),
    ];
    let mut coupling_pass = true;
    for ((name, lo, hi), (got_lo, got_hi)) in COUPLING_BANDS.iter().zip(
        coupling_rows
            .iter()
            .map(|(_, band)| *band)
            .collect::<Vec<_>>(),
    ) {
        if !(got_lo >= *lo && got_hi <= *hi) {
            coupling_pass = false;
            failures.push(format!(
                "interval-coupling {name} band {}..{} escapes {}..{}",
                num(got_lo),
                num(got_hi),
                num(*lo),
                num(*hi)
            ));
        }
    }
    suite_tbl.row(vec![
        "interval-coupling".into(),
        coupling.samples.to_string(),
        num(coupling.ratio1.1),
        coupling_pass.to_string(),
        coupling_rows
            .iter()
            .map(|(name, (lo, hi))| format!("{name}={}..{}", num(*lo), num(*hi)))
            .collect::<Vec<_>>()
            .join(";"),
    ]);

    let junction_worst = junctions
        .worst_per_mode
        .iter()
        .max_by(|a, b| a.log_jump.total_cmp(&b.log_jump));
    suite_tbl.row(vec![
        "junction-continuity".into(),
        junctions.probes.to_string(),
        num(junctions.worst),
        junctions.pass.to_string(),
        junction_worst
            .map(|w| format!("t={};k={};eta={}", num(w.t), w.k, num(w.eta)))
            .unwrap_or_default(),
    ]);
    if !junctions.pass {
        failures.push(format!(
            "junction-continuity worst log jump {} exceeds {}",
            num(junctions.worst),
            num(junctions.tolerance)
        ));
    }

    suite_tbl.write(&ctx.out.join("lemmas.csv"))?;
    ctx.manifest.artifact("lemmas.csv");

    // -- scalar summary ---------------------------------------------------
    let mut kv = KvReport::new();
    kv.push("suites_total", 9);
    kv.push("suites_failed", failures.len());
    kv.push("growth.pass", growth.pass);
    kv.push("growth.ratio_min", num(growth.ratio_min));
    kv.push("growth.ratio_max", num(growth.ratio_max));
    kv.push("growth.max_successive_drift", num(growth.max_successive_drift));
    kv.push("g.worst_rel_err", num(g_check.worst_rel_err));
    kv.push("g.bound_min_slack", num(g_check.bound_min_slack));
    kv.push("g.bound_pass", g_check.bound_pass);
    for stab in &lemmas {
        let id = stab.first.lemma.id();
        kv.push(format!("{id}.c_star"), num(stab.first.c_star));
        kv.push(format!("{id}.c_star_reseeded"), num(stab.second.c_star));
        kv.push(format!("{id}.rel_gap"), num(stab.rel_gap));
    }
    for (name, (lo, hi)) in &coupling_rows {
        kv.push(format!("coupling.{name}_min"), num(*lo));
        kv.push(format!("coupling.{name}_max"), num(*hi));
    }
    kv.push("junction.probes", junctions.probes);
    kv.push("junction.worst_log_jump", num(junctions.worst));
    kv.push("junction.tolerance", num(junctions.tolerance));
    kv.push("pass", failures.is_empty());
    kv.write(&ctx.out.join("summary.txt"))?;
    ctx.manifest.artifact("summary.txt");

    if failures.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failures.join("; ")))
    }
}
