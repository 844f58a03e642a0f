//! The subcommands. Each fills in defaults on its argument struct, so the echo
//! in the output header is the complete configuration of the run.

use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use nonlinear_metrology::bounds::{
    extreme_eigenvalues, occupation_class_count, optimal_product_state, qcrb_entangled,
    qcrb_from_variance, SEARCH_BUDGET,
};
use nonlinear_metrology::exact_moments::{
    decohered_sensitivity, fringe_model, gaussian_envelope_moments, moments_exact,
    scaling_exponent, scan_dephasing_time, sensitivity_exact, sensitivity_gaussian,
    DecoherenceSpec, OperatingRule,
};
use nonlinear_metrology::oracle::{
    closed_form_equivalence, collective_moments, evolve, identity_residuals,
    product_variance_exact, string_extremes, DENSE_MAX_TWO_J, IDENTITY_MAX_TWO_J, VARIANCE_MAX_N,
};
use nonlinear_metrology::protocol_sim::{
    adaptive_feedback, cat_protocol, overhead_factor, random_phase, run_estimation, CatConfig,
    FeedbackConfig, SamplingMode, TrialConfig,
};
use nonlinear_metrology::{
    Axis, CoherentPreparation, CouplingSpec, Error, ExperimentClock, MomentSet, SingleBodySpectrum,
    Spin,
};

use crate::report::{Cell, Format, Report};
use crate::values::{Angle, Grid, Real, RealList, Rule, SpinPairs};
use crate::{
    echo, BoundArgs, DecohereArgs, Failure, FeedbackArgs, MomentModel, MomentsArgs,
    OracleCheckArgs, Outcome, Protocol, ScalingArgs, SensitivityArgs, SimulateArgs, EXIT_BREACH,
};

fn missing(flag: &str) -> Failure {
    Failure::Usage(format!("--{flag} is required"))
}

/// Rounds `J` to a half-integer and writes the rounded value back.
fn spin_arg(j: &mut Option<Real>, notices: &mut Vec<String>) -> Result<Spin, Failure> {
    let given = j.ok_or_else(|| missing("J"))?.0;
    let spin = Spin::from_j(given)?;
    if spin.j() != given {
        notices.push(format!("J = {given} rounded to {}", spin.j()));
    }
    *j = Some(Real(spin.j()));
    Ok(spin)
}

fn finish<A: Serialize>(args: &A, report: Report, format: Format, notices: Vec<String>) -> Outcome {
    let mut report = report;
    report.config = echo(args);
    Outcome {
        report,
        format,
        exit_code: 0,
        notices,
    }
}

fn labelled(label: impl Serialize) -> Cell {
    match serde_json::to_value(label) {
        Ok(serde_json::Value::String(s)) => Cell::Text(s),
        Ok(other) => Cell::Text(other.to_string()),
        Err(e) => Cell::Text(e.to_string()),
    }
}

fn join_counts(counts: &[u64]) -> Cell {
    Cell::Text(
        counts
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(";"),
    )
}

pub fn bound(mut a: BoundArgs) -> Result<Outcome, Failure> {
    let k = a.k.ok_or_else(|| missing("k"))?;
    let n = a.n.ok_or_else(|| missing("n"))?;
    let levels = a
        .levels
        .get_or_insert_with(|| RealList(vec![-0.5, 0.5]))
        .0
        .clone();
    let t = a.t.get_or_insert(Real(1.0)).0;
    let nu = *a.nu.get_or_insert(1);
    let self_interactions = !*a.no_self_interaction.get_or_insert(false);
    let format = *a.format.get_or_insert_default();

    let spectrum = SingleBodySpectrum::new(&levels)?;
    let coupling = CouplingSpec::new(k, n, self_interactions)?;
    let clock = ExperimentClock::new(0.0, t, nu)?;
    let extremes = extreme_eigenvalues(&spectrum, &coupling)?;
    let product = optimal_product_state(&spectrum, &coupling);

    let mut r = Report::new("bound", serde_json::Value::Null, vec!["quantity", "value"]);
    let mut put = |name: &str, value: Cell| r.row(vec![name.into(), value]);
    put("case", labelled(extremes.case));
    put("lambda_cap_max", extremes.lambda_cap_max.into());
    put("lambda_cap_min", extremes.lambda_cap_min.into());
    put("seminorm", extremes.seminorm().into());
    put("extremes_exact", extremes.exact.into());
    put("counts_max", join_counts(&extremes.counts_max));
    put("counts_min", join_counts(&extremes.counts_min));
    if let Some(delta) = extremes.delta {
        put("delta", delta.into());
    }
    if let Some(epsilon) = extremes.epsilon {
        put("epsilon", epsilon.into());
    }
    put(
        "entangled_delta_gamma",
        qcrb_entangled(&extremes, &clock).into(),
    );
    put("product_branch", labelled(product.global_branch));
    put("product_x", product.x_opt.into());
    put("product_p", product.p_opt.into());
    put("product_beta", product.beta_opt.into());
    put("product_variance_leading", product.variance.into());
    put(
        "product_delta_gamma",
        qcrb_from_variance(product.variance, &clock).into(),
    );
    if spectrum.is_two_level() && n <= VARIANCE_MAX_N {
        let exact = product_variance_exact(&spectrum, product.p_opt, n, k, self_interactions)?;
        put("product_variance_exact", exact.into());
        put(
            "product_delta_gamma_exact",
            qcrb_from_variance(exact, &clock).into(),
        );
    }

    let mut warnings = Vec::new();
    if occupation_class_count(n, spectrum.levels().len()) <= SEARCH_BUDGET {
        let search = string_extremes(&spectrum, &coupling)?;
        put("enumerated_lambda_cap_max", search.lambda_cap_max.into());
        put("enumerated_lambda_cap_min", search.lambda_cap_min.into());
        let scale = extremes.seminorm().abs().max(f64::MIN_POSITIVE);
        let gap = (search.lambda_cap_max - extremes.lambda_cap_max)
            .abs()
            .max((search.lambda_cap_min - extremes.lambda_cap_min).abs());
        if extremes.exact && gap / scale > 1e-9 {
            warnings.push(format!(
                "enumeration differs from the extreme search by {:e}",
                gap / scale
            ));
        }
    }
    r.warnings = warnings;
    Ok(finish(&a, r, format, Vec::new()))
}

pub fn sensitivity(mut a: SensitivityArgs) -> Result<Outcome, Failure> {
    let mut notices = Vec::new();
    let spin = spin_arg(&mut a.j, &mut notices)?;
    let beta = a.beta.get_or_insert(Angle(FRAC_PI_4)).0;
    let axis = *a.axis.get_or_insert(Axis::Y);
    let grid = *a.phi.get_or_insert(Grid::Span {
        start: -PI / 8.0,
        stop: PI / 8.0,
        step: None,
    });
    let points = *a.points.get_or_insert(801);
    let nu = *a.nu.get_or_insert(1);
    let format = *a.format.get_or_insert_default();
    if nu == 0 {
        return Err(Failure::Usage("--nu must be at least 1".into()));
    }

    let scale = 1.0 / (nu as f64).sqrt();
    let bound_line = scale / (2f64.sqrt() * spin.j().powf(1.5));
    let rows: Vec<Vec<Cell>> = grid
        .values(points)?
        .par_iter()
        .map(|&phi| {
            let fringe = fringe_model(spin, beta, phi);
            let fringe_dphi = match axis {
                Axis::X => fringe.delta_phi_x,
                Axis::Y => fringe.delta_phi_y,
            };
            vec![
                phi.into(),
                sensitivity_exact(spin, beta, phi, axis)
                    .delta_phi
                    .scaled(scale)
                    .into(),
                fringe_dphi.scaled(scale).into(),
                fringe.valid.into(),
                sensitivity_gaussian(spin, beta, phi, axis)
                    .delta_phi
                    .scaled(scale)
                    .into(),
                bound_line.into(),
            ]
        })
        .collect();
    let mut r = Report::new(
        "sensitivity",
        serde_json::Value::Null,
        vec![
            "phi",
            "delta_phi_exact",
            "delta_phi_fringe",
            "fringe_valid",
            "delta_phi_gaussian",
            "bound_line",
        ],
    );
    rows.into_iter().for_each(|row| r.row(row));
    Ok(finish(&a, r, format, notices))
}

pub fn scaling(mut a: ScalingArgs) -> Result<Outcome, Failure> {
    let axis = *a.axis.get_or_insert(Axis::Y);
    let grid = *a.beta.get_or_insert(Grid::Span {
        start: PI / 180.0,
        stop: 179.0 * PI / 180.0,
        step: Some(PI / 180.0),
    });
    let points = *a.points.get_or_insert(179);
    let pairs = a
        .pairs
        .get_or_insert_with(|| SpinPairs(vec![(1e3, 1e5), (1e5, 1e7)]))
        .0
        .clone();
    let rule = a
        .rule
        .get_or_insert(Rule(OperatingRule::default_for(axis)))
        .0;
    let format = *a.format.get_or_insert_default();

    let spins = pairs
        .iter()
        .map(|&(lo, hi)| Ok((Spin::from_j(lo)?, Spin::from_j(hi)?)))
        .collect::<Result<Vec<_>, Error>>()?;
    let ranged = !matches!(grid, Grid::Single(_));
    let betas: Vec<f64> = grid
        .values(points)?
        .into_iter()
        .filter(|b| !(ranged && axis == Axis::Y && (b - FRAC_PI_2).abs() < 1e-12))
        .collect();
    let jobs: Vec<(f64, Spin, Spin)> = betas
        .iter()
        .flat_map(|&b| spins.iter().map(move |&(lo, hi)| (b, lo, hi)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(beta, lo, hi)| {
            let cells = match scaling_exponent(beta, axis, lo, hi, rule) {
                Ok(s) => [s.xi.into(), s.delta_phi_lo.into(), s.delta_phi_hi.into()],
                Err(Error::NoInformation(_)) => [
                    Cell::NoInformation,
                    Cell::NoInformation,
                    Cell::NoInformation,
                ],
                Err(e) => return Err(e),
            };
            let [xi, lo_d, hi_d] = cells;
            Ok(vec![
                beta.into(),
                lo.j().into(),
                hi.j().into(),
                xi,
                lo_d,
                hi_d,
            ])
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut r = Report::new(
        "scaling",
        serde_json::Value::Null,
        vec!["beta", "j_lo", "j_hi", "xi", "delta_phi_lo", "delta_phi_hi"],
    );
    rows.into_iter().for_each(|row| r.row(row));
    Ok(finish(&a, r, format, Vec::new()))
}

pub fn moments(mut a: MomentsArgs) -> Result<Outcome, Failure> {
    let mut notices = Vec::new();
    let spin = spin_arg(&mut a.j, &mut notices)?;
    let beta = a.beta.get_or_insert(Angle(FRAC_PI_4)).0;
    let grid = *a.phi.get_or_insert(Grid::Single(0.0));
    let points = *a.points.get_or_insert(101);
    let model = *a.model.get_or_insert(MomentModel::Exact);
    let format = *a.format.get_or_insert_default();
    if model == MomentModel::Oracle && spin.two_j() > DENSE_MAX_TWO_J {
        return Err(Failure::Usage(format!(
            "the oracle model needs 2J <= {DENSE_MAX_TWO_J}"
        )));
    }

    let prep = CoherentPreparation::new(spin, beta)?;
    let sets = grid
        .values(points)?
        .par_iter()
        .map(|&phi| {
            let set: MomentSet = match model {
                MomentModel::Exact => moments_exact(spin, beta, phi),
                MomentModel::Fringe => fringe_model(spin, beta, phi).moments,
                MomentModel::Gaussian => gaussian_envelope_moments(spin, beta, phi),
                MomentModel::Oracle => collective_moments(&evolve(&prep, phi, 2)?),
            };
            Ok((phi, set))
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let mut columns = vec!["phi"];
    columns.extend(sets[0].1.fields().map(|(name, _)| name));
    let mut r = Report::new("moments", serde_json::Value::Null, columns);
    for (phi, set) in sets {
        let mut row = vec![phi.into()];
        row.extend(set.fields().iter().map(|&(_, v)| Cell::from(v)));
        r.row(row);
    }
    Ok(finish(&a, r, format, notices))
}

fn reject_flags(protocol: &str, given: &[(&str, bool)]) -> Result<(), Failure> {
    let stray: Vec<String> = given
        .iter()
        .filter(|(_, set)| *set)
        .map(|(f, _)| format!("--{f}"))
        .collect();
    if stray.is_empty() {
        Ok(())
    } else {
        Err(Failure::Usage(format!(
            "{} not used by the {protocol} protocol",
            stray.join(", ")
        )))
    }
}

pub fn simulate(mut a: SimulateArgs) -> Result<Outcome, Failure> {
    let protocol = *a.protocol.get_or_insert(Protocol::Spin);
    let nu = *a.nu.get_or_insert(1000);
    let batches = *a.batches.get_or_insert(100);
    let seed = *a.seed.get_or_insert(0);
    let format = *a.format.get_or_insert_default();
    let mut notices = Vec::new();

    match protocol {
        Protocol::Spin => {
            reject_flags(
                "spin",
                &[
                    ("seminorm", a.seminorm.is_some()),
                    ("gamma", a.gamma.is_some()),
                    ("t", a.t.is_some()),
                ],
            )?;
            let spin = spin_arg(&mut a.j, &mut notices)?;
            let config = TrialConfig {
                spin,
                beta: a.beta.get_or_insert(Angle(FRAC_PI_4)).0,
                phi_true: a.phi_true.get_or_insert(Angle(0.0)).0,
                phi_operating: a.phi_operating.get_or_insert(Angle(0.0)).0,
                axis: *a.axis.get_or_insert(Axis::Y),
                nu,
                batches,
                seed,
                gamma_t: a.gamma_t.get_or_insert(Real(0.0)).0,
                sampling: *a.sampling.get_or_insert(SamplingMode::Auto),
            };
            let out = run_estimation(&config)?;
            let mut r = Report::new(
                "simulate",
                serde_json::Value::Null,
                vec!["batch", "phi_est"],
            );
            r.summary("phi_est", out.phi_est);
            r.summary("empirical_delta_phi", out.empirical_delta_phi);
            r.summary("empirical_delta_phi_se", out.empirical_delta_phi_se);
            r.summary("analytic_delta_phi", out.analytic_delta_phi);
            r.summary("sample_mean", out.sample_mean);
            r.summary("sample_variance", out.sample_variance);
            r.summary("slope_used", out.slope_used);
            r.summary("exact_sampling", out.exact_sampling);
            r.warnings = out.warnings.clone();
            for (i, &est) in out.batch_estimates.iter().enumerate() {
                r.row(vec![(i as u64).into(), est.into()]);
            }
            Ok(finish(&a, r, format, notices))
        }
        Protocol::Cat => {
            reject_flags(
                "cat",
                &[
                    ("J", a.j.is_some()),
                    ("beta", a.beta.is_some()),
                    ("phi-true", a.phi_true.is_some()),
                    ("phi-operating", a.phi_operating.is_some()),
                    ("axis", a.axis.is_some()),
                    ("gamma-t", a.gamma_t.is_some()),
                    ("sampling", a.sampling.is_some()),
                ],
            )?;
            let config = CatConfig {
                seminorm: a.seminorm.ok_or_else(|| missing("seminorm"))?.0,
                gamma: a.gamma.ok_or_else(|| missing("gamma"))?.0,
                t: a.t.get_or_insert(Real(1.0)).0,
                nu,
                batches,
                seed,
            };
            let out = cat_protocol(&config)?;
            let mut r = Report::new("simulate", serde_json::Value::Null, Vec::new());
            r.summary("gamma_est", out.gamma_est);
            r.summary("empirical_delta_gamma", out.empirical_delta_gamma);
            r.summary("analytic_delta_gamma", out.analytic_delta_gamma);
            r.summary("p_plus", out.p_plus);
            r.summary("tan_squared", out.tan_squared);
            if out.validity_warning {
                r.warnings.push(format!(
                    "tan^2(||H|| gamma t) = {:e} is not small compared with nu = {nu}",
                    out.tan_squared
                ));
            }
            Ok(finish(&a, r, format, notices))
        }
    }
}

pub fn feedback(mut a: FeedbackArgs) -> Result<Outcome, Failure> {
    let seed = *a.seed.get_or_insert(0);
    let config = FeedbackConfig {
        f: a.f.get_or_insert(Real(8.0)).0,
        nu: *a.nu.get_or_insert(100),
        bits: *a.bits.get_or_insert(10),
        phi_true: a
            .phi_true
            .get_or_insert_with(|| Angle(random_phase(seed)))
            .0,
        seed,
        beta: a.beta.get_or_insert(Angle(FRAC_PI_4)).0,
        sampling: *a.sampling.get_or_insert(SamplingMode::Auto),
    };
    let format = *a.format.get_or_insert_default();
    let rec = adaptive_feedback(&config)?;

    let mut r = Report::new(
        "feedback",
        serde_json::Value::Null,
        vec![
            "l",
            "j_raw",
            "two_j",
            "delta_phi",
            "residual_before",
            "estimate",
            "residual_after",
        ],
    );
    r.summary("phi_true", config.phi_true);
    r.summary("total_n", rec.total_n);
    r.summary("closed_form_n", rec.closed_form_n);
    r.summary("rounding_slack", config.nu * config.bits as u64);
    r.summary("final_estimate", rec.final_estimate);
    r.summary("final_error", rec.final_error);
    r.summary("target_precision", rec.target_precision);
    r.summary("success", rec.success);
    r.summary("last_step_fraction", rec.last_step_fraction);
    r.summary("overhead_factor", overhead_factor(config.f));
    for s in &rec.steps {
        if s.no_information {
            r.warnings.push(format!(
                "step {}: 2J = {} carries no information and was skipped",
                s.l, s.two_j
            ));
        }
        if s.clamped {
            r.warnings
                .push(format!("step {}: J = {:.4} raised to 1/2", s.l, s.j_raw));
        }
        if s.fringe_edge {
            r.warnings
                .push(format!("step {}: residual outside the central fringe", s.l));
        }
        r.row(vec![
            s.l.into(),
            s.j_raw.into(),
            s.two_j.into(),
            s.delta_phi.into(),
            s.residual_before.into(),
            s.estimate.into(),
            s.residual_after.into(),
        ]);
    }
    Ok(finish(&a, r, format, Vec::new()))
}

pub fn decohere(mut a: DecohereArgs) -> Result<Outcome, Failure> {
    let mut notices = Vec::new();
    let spin = spin_arg(&mut a.j, &mut notices)?;
    let beta = a.beta.get_or_insert(Angle(FRAC_PI_4)).0;
    let total_time = a.total_time.get_or_insert(Real(100.0)).0;
    let spec = match (a.tau2, a.gamma_rate) {
        (Some(_), Some(_)) => {
            return Err(Failure::Usage("give either --tau2 or --gamma-rate".into()))
        }
        (None, Some(rate)) => DecoherenceSpec::new(rate.0, total_time)?,
        (tau2, None) => {
            DecoherenceSpec::from_tau2(a.tau2.insert(tau2.unwrap_or(Real(1.0))).0, total_time)?
        }
    };
    let tau2 = spec.tau2();
    let grid = match a.scan_t {
        Some(g) => g,
        None if tau2.is_finite() => *a.scan_t.insert(Grid::Span {
            start: 0.05 * tau2,
            stop: 2.0 * tau2,
            step: Some(0.05 * tau2),
        }),
        None => {
            return Err(Failure::Usage(
                "--scan-t is required without dephasing".into(),
            ))
        }
    };
    let points = *a.points.get_or_insert(40);
    let format = *a.format.get_or_insert_default();

    let times = grid.values(points)?;
    let scan = scan_dephasing_time(spin, beta, &spec, &times)?;
    let rows = times
        .par_iter()
        .map(|&t| {
            let nu = total_time / t;
            decohered_sensitivity(spin, beta, &spec, t, nu).map(|d| {
                vec![
                    t.into(),
                    nu.into(),
                    d.delta_gamma.into(),
                    d.delta_gamma_free.into(),
                ]
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    let reference = decohered_sensitivity(spin, beta, &spec, times[0], total_time / times[0])?;

    let mut r = Report::new(
        "decohere",
        serde_json::Value::Null,
        vec!["t", "nu", "delta_gamma", "delta_gamma_free"],
    );
    r.summary("argmin_t", scan.argmin_t);
    r.summary("min_delta_gamma", scan.min_delta_gamma);
    r.summary("optimal_t", reference.optimal_t);
    r.summary("delta_gamma_optimal", reference.delta_gamma_optimal);
    rows.into_iter().for_each(|row| r.row(row));
    Ok(finish(&a, r, format, notices))
}

const IDENTITY_POINTS: [(f64, f64); 3] = [(0.3, 1.7), (1.0, 1.0), (1.9, 0.2)];

pub fn oracle_check(mut a: OracleCheckArgs) -> Result<Outcome, Failure> {
    let max_two_j = *a.max_two_j.get_or_insert(50);
    let grid = *a.grid.get_or_insert(16);
    let tolerance = a.tolerance.get_or_insert(Real(1e-10)).0;
    let format = *a.format.get_or_insert_default();
    if max_two_j == 0 || max_two_j > DENSE_MAX_TWO_J {
        return Err(Failure::Usage(format!(
            "--max-2J must lie in [1, {DENSE_MAX_TWO_J}]"
        )));
    }
    if grid == 0 {
        return Err(Failure::Usage("--grid must be at least 1".into()));
    }

    let results = (1..=max_two_j)
        .into_par_iter()
        .map(|two_j| {
            let spin = Spin::from_two_j(two_j)?;
            let eq = closed_form_equivalence(spin, grid)?;
            let identity = if two_j <= IDENTITY_MAX_TWO_J {
                let mut worst = 0f64;
                for (x, y) in IDENTITY_POINTS {
                    worst = identity_residuals(spin, x, y)?
                        .iter()
                        .fold(worst, |m, &v| m.max(v));
                }
                Some(worst)
            } else {
                None
            };
            let pass = eq.max_moment_deviation <= tolerance
                && eq.max_sensitivity_deviation <= tolerance
                && eq.information_mismatches == 0
                && identity.is_none_or(|v| v <= tolerance);
            Ok((eq, identity, pass))
        })
        .collect::<Result<Vec<_>, Error>>()?;

    let mut r = Report::new(
        "oracle-check",
        serde_json::Value::Null,
        vec![
            "two_j",
            "max_moment_deviation",
            "max_sensitivity_deviation",
            "information_mismatches",
            "identity_residual",
            "pass",
        ],
    );
    let failures = results.iter().filter(|(_, _, pass)| !pass).count() as u64;
    r.summary("checked", max_two_j);
    r.summary("failures", failures);
    for (eq, identity, pass) in results {
        let identity = identity.map_or(Cell::Text("skipped".into()), Cell::Real);
        r.row(vec![
            eq.two_j.into(),
            eq.max_moment_deviation.into(),
            eq.max_sensitivity_deviation.into(),
            eq.information_mismatches.into(),
            identity,
            pass.into(),
        ]);
    }
    if failures > 0 {
        r.warnings.push(format!(
            "{failures} spins exceed the tolerance {tolerance:e}"
        ));
    }
    let mut out = finish(&a, r, format, Vec::new());
    if failures > 0 {
        out.exit_code = EXIT_BREACH;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bound_example() {
        let a = BoundArgs {
            k: Some(2),
            n: Some(1000),
            ..Default::default()
        };
        let out = bound(a).unwrap();
        let find = |name: &str| {
            out.report
                .rows
                .iter()
                .find(|r| r[0] == Cell::from(name))
                .map(|r| r[1].clone())
                .unwrap()
        };
        let Cell::Real(entangled) = find("entangled_delta_gamma") else {
            panic!()
        };
        assert!((entangled - 4e-6).abs() < 1e-12);
        let Cell::Real(product) = find("product_delta_gamma") else {
            panic!()
        };
        assert!((product / 6.3246e-5 - 1.0).abs() < 1e-4);
    }

    #[test]
    fn scaling_range_skips_equator_for_y() {
        let a = ScalingArgs {
            beta: Some("pi/4:3pi/4".parse().unwrap()),
            points: Some(3),
            pairs: Some("10:100".parse().unwrap()),
            ..Default::default()
        };
        let out = scaling(a).unwrap();
        assert_eq!(out.report.rows.len(), 2);
        assert!(out
            .report
            .rows
            .iter()
            .all(|r| matches!(r[3], Cell::Real(_))));
    }
}
