use rayon::prelude::*;
use serde_json::json;

use cekit::closed_forms::{ghz_cce, w_cce};
use cekit::entropy::EntropyParams;
use cekit::measures::{cce_value, named_measures, NamedMeasures, INEQ_TOL};
use cekit::roof::{cce_mixed_upper, RoofOptions};
use cekit::states::{dicke, ghz, star, w, StateRecipe};
use cekit::subset::SubsetSpec;
use cekit::suites::{run_suite, run_trial, Suite};
use cekit::swaptest::{bounds_from_estimate, cce_from_distribution, sample_shots, swap_test_distribution};

use crate::error::CliError;
use crate::grid::Grid;
use crate::table::{Cell, Table};

/// Recipe shorthand; `star:` also takes angle expressions such as `pi/4`.
fn parse_recipe(text: &str) -> Result<StateRecipe> {
    if let Some(angle) = text.strip_prefix("star:") {
        let recipe = StateRecipe::Star {
            theta: crate::grid::parse_number(angle)?,
        };
        recipe.validate()?;
        return Ok(recipe);
    }
    Ok(text.parse()?)
}

/// What a command produced, and whether its built-in assertions held.
pub struct Report {
    pub table: Table,
    /// Replaces the table in JSON output when present.
    pub json: Option<serde_json::Value>,
    pub ok: bool,
}

impl Report {
    fn table(table: Table, ok: bool) -> Self {
        Self { table, json: None, ok }
    }
}

type Result<T> = std::result::Result<T, CliError>;

const NAMED: [&str; 4] = ["E", "R2", "T3", "C"];

/// Largest `n` evaluated from statevectors in the GHZ/W sweep.
pub const EXACT_SWEEP_MAX_N: usize = 10;

fn subset_or_full(s: Option<&str>, n: usize) -> Result<SubsetSpec> {
    Ok(match s {
        Some(text) => SubsetSpec::parse(text)?,
        None => SubsetSpec::full(n)?,
    })
}

fn named_cells(m: &NamedMeasures) -> Vec<Cell> {
    vec![m.e.into(), m.r2.into(), m.t3.into(), m.c.into()]
}

pub fn compute(
    states: &[String],
    s: Option<&str>,
    alpha: &Grid,
    beta: &Grid,
    named_only: bool,
) -> Result<Report> {
    let recipes: Vec<StateRecipe> = states.iter().map(|t| parse_recipe(t)).collect::<Result<_>>()?;
    let mut prepared = Vec::with_capacity(recipes.len());
    for r in &recipes {
        let psi = r.build_pure().map_err(|e| {
            CliError::Usage(format!("{e}; mixed states are handled by the `roof` command"))
        })?;
        let subset = subset_or_full(s, psi.num_subsystems())?;
        let named = named_measures(&psi, &subset)?;
        prepared.push((r.to_string(), psi, subset, named));
    }

    if named_only {
        let mut t = Table::new("named", &["state", "subset", "E", "R2", "T3", "C"]);
        for (name, _, subset, named) in &prepared {
            let mut row: Vec<Cell> = vec![name.as_str().into(), subset.to_string().into()];
            row.extend(named_cells(named));
            t.push(row);
        }
        return Ok(Report::table(t, true));
    }

    let mut points = Vec::new();
    for (i, _) in prepared.iter().enumerate() {
        for &a in alpha.values() {
            for &b in beta.values() {
                points.push((i, EntropyParams::new(a, b)?));
            }
        }
    }
    let values: Vec<f64> = points
        .par_iter()
        .map(|&(i, p)| cce_value(&prepared[i].1, &prepared[i].2, p))
        .collect::<std::result::Result<_, _>>()?;

    let mut t = Table::new(
        "compute",
        &["state", "subset", "alpha", "beta", "value", "E", "R2", "T3", "C"],
    );
    for (&(i, p), v) in points.iter().zip(values) {
        let (name, _, subset, named) = &prepared[i];
        let mut row: Vec<Cell> = vec![
            name.as_str().into(),
            subset.to_string().into(),
            p.alpha().into(),
            p.beta().into(),
            v.into(),
        ];
        row.extend(named_cells(named));
        t.push(row);
    }
    Ok(Report::table(t, true))
}

pub fn ghz_w_sweep(n_min: usize, n_max: usize, sizes: Option<&[usize]>) -> Result<Report> {
    if n_min < 2 || n_min > n_max {
        return Err(CliError::Usage(format!("need 2 <= n-min <= n-max, got {n_min}..{n_max}")));
    }
    if n_max > cekit::closed_forms::MAX_CLOSED_FORM_N {
        return Err(CliError::Usage(format!(
            "n-max is limited to {}",
            cekit::closed_forms::MAX_CLOSED_FORM_N
        )));
    }
    let mut tasks = Vec::new();
    for n in n_min..=n_max {
        match sizes {
            Some(list) => tasks.extend(list.iter().filter(|&&k| k >= 1 && k <= n).map(|&k| (n, k))),
            None => tasks.extend((1..=n).map(|k| (n, k))),
        }
    }
    let params = NamedMeasures::params();
    let results: Vec<(usize, usize, bool, Vec<(f64, f64)>)> = tasks
        .par_iter()
        .map(|&(n, k)| -> Result<_> {
            if n <= EXACT_SWEEP_MAX_N {
                let labels: Vec<usize> = (1..=k).collect();
                let s = SubsetSpec::new(&labels)?;
                let (g, wv) = (ghz(n)?, w(n)?);
                let vals = params
                    .iter()
                    .map(|&p| Ok((cce_value(&g, &s, p)?, cce_value(&wv, &s, p)?)))
                    .collect::<Result<_>>()?;
                Ok((n, k, true, vals))
            } else {
                let vals = params
                    .iter()
                    .map(|&p| Ok((ghz_cce(n, k, p)?, w_cce(n, k, p)?)))
                    .collect::<Result<_>>()?;
                Ok((n, k, false, vals))
            }
        })
        .collect::<Result<_>>()?;

    let mut t = Table::new(
        "ghz-w-sweep",
        &["n", "subset_size", "measure", "ghz", "w", "delta", "method", "delta_positive"],
    );
    let mut ok = true;
    for (n, k, exact, vals) in results {
        for (name, (g, wv)) in NAMED.iter().zip(vals) {
            let delta = g - wv;
            let positive = delta > 0.0;
            // GHZ₂ and W₂ are both Bell pairs
            if n >= 3 && !positive {
                ok = false;
            }
            t.push(vec![
                n.into(),
                k.into(),
                (*name).into(),
                g.into(),
                wv.into(),
                delta.into(),
                (if exact { "exact" } else { "closed-form" }).into(),
                positive.into(),
            ]);
        }
    }
    Ok(Report::table(t, ok))
}

/// `E ≥ R₂ ≥ C ≥ T₃` within tolerance.
fn chain_holds(m: &NamedMeasures) -> bool {
    m.e - m.r2 >= -INEQ_TOL && m.r2 - m.c >= -INEQ_TOL && m.c - m.t3 >= -INEQ_TOL
}

pub fn star_sweep(grid: &Grid) -> Result<Report> {
    let half_pi = std::f64::consts::FRAC_PI_2;
    if let Some(bad) = grid.values().iter().find(|&&x| !(-1e-12..=half_pi + 1e-12).contains(&x)) {
        return Err(CliError::Usage(format!("angle {bad} outside [0, pi/2]")));
    }
    let s = SubsetSpec::full(4)?;
    let rows: Vec<NamedMeasures> = grid
        .values()
        .par_iter()
        .map(|&theta| Ok(named_measures(&star(theta)?, &s)?))
        .collect::<Result<_>>()?;
    let mut t = Table::new("star-sweep", &["theta", "E", "R2", "T3", "C", "chain_holds"]);
    let mut ok = true;
    for (&theta, m) in grid.values().iter().zip(&rows) {
        let holds = chain_holds(m);
        ok &= holds;
        let mut row: Vec<Cell> = vec![theta.into()];
        row.extend(named_cells(m));
        row.push(holds.into());
        t.push(row);
    }
    Ok(Report::table(t, ok))
}

pub fn dicke_table(n: usize) -> Result<Report> {
    if !(2..=cekit::measures::MAX_SUBSET_SIZE).contains(&n) {
        return Err(CliError::Usage(format!("n = {n} outside 2..=20")));
    }
    let s = SubsetSpec::full(n)?;
    let rows: Vec<NamedMeasures> = (0..=n)
        .into_par_iter()
        .map(|k| Ok(named_measures(&dicke(n, k)?, &s)?))
        .collect::<Result<_>>()?;
    let as_vec = |m: &NamedMeasures| [m.e, m.r2, m.t3, m.c];
    let symmetric = (0..=n).all(|k| {
        as_vec(&rows[k])
            .iter()
            .zip(as_vec(&rows[n - k]))
            .all(|(a, b)| (a - b).abs() <= 1e-10)
    });
    let mid = as_vec(&rows[n / 2]);
    let middle_max = rows
        .iter()
        .all(|m| as_vec(m).iter().zip(mid).all(|(v, top)| *v <= top + 1e-10));
    let mut t = Table::new("dicke-table", &["k", "E", "R2", "T3", "C"]);
    for (k, m) in rows.iter().enumerate() {
        let mut row: Vec<Cell> = vec![k.into()];
        row.extend(named_cells(m));
        t.push(row);
    }
    Ok(Report::table(t, symmetric && middle_max))
}

pub fn verify(suite: &str, seed: u64, trials: Option<usize>, trial_seed: Option<u64>) -> Result<Report> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse()?]
    };
    let mut t = Table::new("verify", &["suite", "seed", "trials", "passed", "failed"]);

    if let Some(ts) = trial_seed {
        let mut outcomes = Vec::new();
        let mut ok = true;
        for s in suites {
            let o = run_trial(s, ts)?;
            if !o.pass {
                eprintln!("FAIL {s} trial_seed={ts}: {}", o.detail);
            }
            ok &= o.pass;
            t.push(vec![
                s.name().into(),
                ts.into(),
                1usize.into(),
                usize::from(o.pass).into(),
                usize::from(!o.pass).into(),
            ]);
            outcomes.push(json!({"suite": s, "trial_seed": ts, "outcome": o}));
        }
        return Ok(Report {
            table: t,
            json: Some(serde_json::Value::Array(outcomes)),
            ok,
        });
    }

    let mut reports = Vec::new();
    for s in suites {
        let rep = run_suite(s, seed, trials.unwrap_or_else(|| s.default_trials()))?;
        for f in &rep.failures {
            eprintln!(
                "FAIL {s} trial={} trial_seed={} (rerun: cekit verify {s} --trial-seed {}): {}",
                f.trial, f.trial_seed, f.trial_seed, f.detail
            );
        }
        t.push(vec![
            s.name().into(),
            seed.into(),
            rep.trials.into(),
            rep.passed.into(),
            rep.failures.len().into(),
        ]);
        reports.push(rep);
    }
    let ok = reports.iter().all(|r| r.all_passed());
    Ok(Report {
        table: t,
        json: Some(serde_json::to_value(&reports)?),
        ok,
    })
}

pub fn swaptest(state: &str, s: Option<&str>, shots: u64, seed: u64) -> Result<Report> {
    let recipe = parse_recipe(state)?;
    let psi = recipe.build_pure()?;
    let subset = subset_or_full(s, psi.num_subsystems())?;
    let exact = cce_value(&psi, &subset, EntropyParams::linear())?;
    let dist = swap_test_distribution(&psi)?;
    let circuit = cce_from_distribution(&dist, &subset)?;
    let record = sample_shots(&dist, shots, seed)?;
    let (estimate, sigma) = record.estimate(&subset)?;
    let bounds = bounds_from_estimate(estimate)?;

    let mut t = Table::new(
        "swaptest",
        &[
            "state", "subset", "shots", "seed", "exact_c", "circuit_c", "estimate", "sigma",
            "e_lower", "r2_lower", "t3_upper",
        ],
    );
    t.push(vec![
        recipe.to_string().into(),
        subset.to_string().into(),
        shots.into(),
        seed.into(),
        exact.into(),
        circuit.into(),
        estimate.into(),
        sigma.into(),
        bounds.e_lower.into(),
        bounds.r2_lower.into(),
        bounds.t3_upper.into(),
    ]);
    let body = json!({
        "state": recipe.to_string(),
        "subset": subset,
        "exact_c": exact,
        "circuit_c": circuit,
        "estimate": estimate,
        "sigma": sigma,
        "bounds": bounds,
        "distribution": dist,
        "shots": record,
    });
    Ok(Report {
        table: t,
        json: Some(body),
        ok: true,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn roof(
    state: &str,
    s: Option<&str>,
    alpha: f64,
    beta: f64,
    restarts: usize,
    iterations: usize,
    mixer_size: Option<usize>,
    seed: u64,
) -> Result<Report> {
    let recipe = parse_recipe(state)?;
    let rho = recipe.build_density()?;
    let subset = subset_or_full(s, rho.num_subsystems())?;
    let params = EntropyParams::new(alpha, beta)?;
    let opts = RoofOptions {
        restarts,
        iterations,
        seed,
        mixer_size,
        ..Default::default()
    };
    let res = cce_mixed_upper(&rho, &subset, params, &opts)?;
    let mut t = Table::new(
        "roof",
        &[
            "state", "subset", "alpha", "beta", "upper_bound", "restarts_used", "converged",
            "ensemble_size",
        ],
    );
    t.push(vec![
        recipe.to_string().into(),
        subset.to_string().into(),
        alpha.into(),
        beta.into(),
        res.upper_bound.into(),
        res.restarts_used.into(),
        res.converged.into(),
        res.best_ensemble.len().into(),
    ]);
    let body = json!({
        "state": recipe.to_string(),
        "subset": subset,
        "alpha": alpha,
        "beta": beta,
        "result": res,
    });
    Ok(Report {
        table: t,
        json: Some(body),
        ok: true,
    })
}
