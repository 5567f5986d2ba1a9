use std::fs::File;
use std::path::Path;

use chrono::NaiveDate;
use surveyerr_core::decomposition::{
    decompose_error, effective_sample_size, scenario_metrics, z_statistic, DecompositionInput, ReportRule,
    ResponseRule, ScenarioSpec,
};
use surveyerr_core::ingest::{self, PanelFileSpec, DATE_FORMAT};
use surveyerr_core::ranking::{self, required_sample_size, RankSimConfig};
use surveyerr_core::synthetic::us_like_truth;
use surveyerr_core::twogroup::{self, TwoGroupParams};
use surveyerr_core::{GeoTruth, PanelSeries, RngSeed};

use crate::args::{
    Cli, Command, MeanArgs, ModelArgs, PanelColumns, PanelPair, ReproKind, ScenarioCommon, ScenarioKind, TauKind,
    TruthArgs, TwoGroupKind, Units,
};
use crate::table::{Cell, Table};
use crate::CliError;

const TAU_VARIANT: &str = "tau-b";
const SIGMA_CONVENTION: &str = "population (1/N)";

pub fn dispatch(cli: &Cli) -> Result<Table, CliError> {
    let units = cli.global.units;
    match &cli.command {
        Command::Decompose(a) => decompose(a, units),
        Command::Neff(a) => {
            let s = units.scale();
            let n_eff = effective_sample_size(a.error * s, a.sigma * s, a.population)?;
            let mut t = Table::new(&["error", "sigma", "N", "n_eff"]);
            t.push(vec![
                (a.error * s).into(),
                (a.sigma * s).into(),
                a.population.into(),
                n_eff.into(),
            ]);
            Ok(t)
        }
        Command::Zstat(a) => {
            let input = mean_input(a, units)?;
            let z = z_statistic(&input)?;
            let mut t = Table::new(&["z", "ddc", "sqrt_N"]);
            let root_n = (input.population as f64).sqrt();
            t.push(vec![z.into(), (z / root_n).into(), root_n.into()]);
            Ok(t)
        }
        Command::Scenario { kind } => scenario(kind, units, require_seed(cli)?),
        Command::Tau { kind } => match kind {
            TauKind::Cross(p) => {
                let (a, b) = load_pair(p, units)?;
                Ok(cross_table(&a, &b)?)
            }
            TauKind::Temporal(p) => {
                let (a, b) = load_pair(p, units)?;
                Ok(temporal_table(&a, &b)?)
            }
        },
        Command::RankSim(a) => {
            let truth = load_truth(&a.truth, units)?;
            rank_power(truth, &a.n, a.reps, require_seed(cli)?)
        }
        Command::RankNeff(a) => {
            let truth = load_truth(&a.truth, units)?;
            let seed = require_seed(cli)?;
            let target = match (a.target_tau, &a.survey) {
                (Some(t), _) => t,
                (None, Some(path)) => {
                    let date = parse_date(a.date.as_deref().unwrap_or_default())?;
                    let panel = load_panel(path, &a.value_col, None, &a.columns, units)?;
                    observed_tau(&panel, &truth, date)?
                }
                (None, None) => return Err(CliError::usage("missing_target", "need --target-tau or --survey")),
            };
            let res = required_sample_size(&truth, target, a.reps, seed, (a.n_lo, a.n_hi), a.ratio)?;
            let mut t = Table::new(&[
                "target_tau",
                "n",
                "mean_tau",
                "sd_tau",
                "se_tau",
                "replications_used",
                "dropped_replications",
                "evaluations",
                "tau_variant",
            ]);
            let s = res.summary;
            t.push(vec![
                target.into(),
                res.n.into(),
                s.mean_tau.into(),
                s.sd_tau.into(),
                s.standard_error().into(),
                s.replications_used.into(),
                s.dropped_replications.into(),
                res.evaluated.len().into(),
                TAU_VARIANT.into(),
            ]);
            Ok(t)
        }
        Command::Twogroup { kind } => match kind {
            TwoGroupKind::Curve { model, rho_max, steps } => curve(model, *rho_max * units.scale(), *steps),
            TwoGroupKind::Sim {
                model,
                rho,
                populations,
            } => {
                let p = params(model);
                let rho = rho * units.scale();
                let first = require_seed(cli)?;
                let expected = twogroup::expected_bias(&p, rho)?;
                let runs = twogroup::simulate_many(&p, rho, first.0, *populations)?;
                let mut t = Table::new(&[
                    "seed",
                    "rho",
                    "respondents",
                    "empirical_bias",
                    "expected_bias",
                    "empirical_ddc",
                    "plug_in_ddc",
                ]);
                for (i, r) in runs.iter().enumerate() {
                    t.push(vec![
                        first.0.wrapping_add(i as u64).into(),
                        rho.into(),
                        r.respondents.into(),
                        r.empirical_bias.into(),
                        expected.into(),
                        r.empirical_ddc.into(),
                        r.plug_in_ddc.into(),
                    ]);
                }
                Ok(t)
            }
            TwoGroupKind::Slope { model } => {
                let p = params(model);
                let mut t = Table::new(&["eta", "b", "gamma", "slope"]);
                t.push(vec![
                    p.eta.into(),
                    p.b.into(),
                    p.gamma.into(),
                    twogroup::slope_vs_truth(&p)?.into(),
                ]);
                Ok(t)
            }
        },
        Command::Avg7(a) => {
            let panel = load_panel(&a.input, &a.value_col, a.sample_size_col.as_deref(), &a.columns, units)?;
            Ok(panel_table(&ingest::trailing_average(&panel, a.window)?))
        }
        Command::Repro { kind } => match kind {
            ReproKind::FigRankPower { truth, n, reps } => {
                let truth = load_truth(truth, units)?;
                let grid = if n.is_empty() {
                    (0..8).map(|k| 500u64 << k).collect()
                } else {
                    n.clone()
                };
                rank_power(truth, &grid, *reps, require_seed(cli)?)
            }
            ReproKind::FigDdcCurve { model, rho_max, steps } => curve(model, *rho_max * units.scale(), *steps),
            ReproKind::FigCorrPanel {
                survey,
                benchmark,
                survey_value_col,
                benchmark_value_col,
                columns,
                window,
            } => {
                let mut a = load_panel(survey, survey_value_col, None, columns, units)?;
                let mut b = load_panel(benchmark, benchmark_value_col, None, columns, units)?;
                if let Some(w) = window {
                    a = ingest::trailing_average(&a, *w)?;
                    b = ingest::trailing_average(&b, *w)?;
                }
                let mut t = Table::new(&["analysis", "date", "geo", "tau", "n", "tau_variant"]);
                for r in ranking::cross_sectional_tau(&a, &b)? {
                    t.push(vec![
                        "by_date".into(),
                        r.date.format(DATE_FORMAT).to_string().into(),
                        Cell::Null,
                        r.tau.into(),
                        r.n_geos.into(),
                        TAU_VARIANT.into(),
                    ]);
                }
                for r in ranking::temporal_tau(&a, &b)? {
                    t.push(vec![
                        "by_geo".into(),
                        Cell::Null,
                        r.geo.into(),
                        r.tau.into(),
                        r.n_dates.into(),
                        TAU_VARIANT.into(),
                    ]);
                }
                Ok(t)
            }
        },
    }
}

fn require_seed(cli: &Cli) -> Result<RngSeed, CliError> {
    match cli.global.seed.as_deref() {
        None => Err(CliError::usage(
            "missing_seed",
            "this subcommand is stochastic: pass --seed <u64> or --seed auto",
        )),
        Some("auto") => {
            let seed: u64 = rand::random();
            eprintln!("seed={seed}");
            Ok(RngSeed(seed))
        }
        Some(text) => text
            .parse()
            .map(RngSeed)
            .map_err(|_| CliError::usage("bad_seed", format!("--seed {text:?} is not a u64 or `auto`"))),
    }
}

fn parse_date(text: &str) -> Result<NaiveDate, CliError> {
    NaiveDate::parse_from_str(text, DATE_FORMAT)
        .map_err(|_| CliError::usage("bad_date", format!("{text:?} is not a YYYY-MM-DD date")))
}

fn mean_input(a: &MeanArgs, units: Units) -> Result<DecompositionInput, CliError> {
    let s = units.scale();
    Ok(DecompositionInput::new(
        a.sample_mean * s,
        a.pop_mean * s,
        a.n,
        a.population,
        a.sigma * s,
    )?)
}

fn decompose(a: &MeanArgs, units: Units) -> Result<Table, CliError> {
    let r = decompose_error(&mean_input(a, units)?)?;
    let mut t = Table::new(&[
        "error",
        "ddc",
        "quantity_term",
        "difficulty_term",
        "n_eff",
        "out_of_range",
        "sigma_convention",
    ]);
    t.push(vec![
        r.error.into(),
        r.ddc.into(),
        r.quantity_term.into(),
        r.difficulty_term.into(),
        r.n_eff.into(),
        r.out_of_range.into(),
        SIGMA_CONVENTION.into(),
    ]);
    Ok(t)
}

fn scenario(kind: &ScenarioKind, units: Units, seed: RngSeed) -> Result<Table, CliError> {
    let rate = |c: &ScenarioCommon| c.true_rate * units.scale();
    let (name, spec, common) = match kind {
        ScenarioKind::Intimidating { common, sample_size } => {
            let n = sample_size.unwrap_or(common.population / 20).max(1);
            (
                "intimidating",
                ScenarioSpec::intimidating(common.population, rate(common), n),
                common,
            )
        }
        ScenarioKind::Misread { common } => (
            "misread",
            ScenarioSpec::misread(common.population, rate(common)),
            common,
        ),
        ScenarioKind::Custom {
            common,
            srs_n,
            p_respond_one,
            p_respond_zero,
            p_report_one_if_one,
            p_report_one_if_zero,
        } => {
            let response = match srs_n {
                Some(n) => ResponseRule::SimpleRandomSample { n: *n },
                None => ResponseRule::Bernoulli {
                    p_if_one: *p_respond_one,
                    p_if_zero: *p_respond_zero,
                },
            };
            let spec = ScenarioSpec {
                population: common.population,
                true_rate: rate(common),
                response,
                report: ReportRule {
                    p_report_one_if_one: *p_report_one_if_one,
                    p_report_one_if_zero: *p_report_one_if_zero,
                },
            };
            ("custom", spec, common)
        }
    };
    let r = scenario_metrics(&spec, common.reps, seed)?;
    let mut t = Table::new(&[
        "scenario",
        "population",
        "respondents",
        "sampling_fraction",
        "ddc_hat",
        "true_corr",
        "design_effect",
        "srs_ddc_scale",
        "replications_used",
        "ddc_out_of_range",
    ]);
    t.push(vec![
        name.into(),
        spec.population.into(),
        r.respondents.into(),
        r.sampling_fraction.into(),
        r.ddc_hat.into(),
        r.true_corr.into(),
        r.design_effect.into(),
        (1.0 / (spec.population as f64).sqrt()).into(),
        r.replications_used.into(),
        r.ddc_out_of_range.into(),
    ]);
    Ok(t)
}

fn panel_spec(
    path: &Path,
    value_col: &str,
    size_col: Option<&str>,
    columns: &PanelColumns,
) -> Result<PanelFileSpec, CliError> {
    let delimiter = u8::try_from(columns.delimiter)
        .map_err(|_| CliError::usage("bad_delimiter", "delimiter must be a single ASCII character"))?;
    Ok(PanelFileSpec {
        geo_column: columns.geo_col.clone(),
        date_column: columns.date_col.clone(),
        value_column: value_col.to_string(),
        sample_size_column: size_col.map(str::to_string),
        delimiter,
        ..PanelFileSpec::new(path)
    })
}

fn load_panel(
    path: &Path,
    value_col: &str,
    size_col: Option<&str>,
    columns: &PanelColumns,
    units: Units,
) -> Result<PanelSeries, CliError> {
    let parsed = ingest::parse_panel(&panel_spec(path, value_col, size_col, columns)?)?;
    if parsed.skipped_rows > 0 {
        eprintln!(
            "{}: skipped {} rows with blank values",
            path.display(),
            parsed.skipped_rows
        );
    }
    let scale = units.scale();
    if scale == 1.0 {
        Ok(parsed.panel)
    } else {
        Ok(parsed.panel.map_values(|v| v * scale)?)
    }
}

fn load_pair(p: &PanelPair, units: Units) -> Result<(PanelSeries, PanelSeries), CliError> {
    let mut a = load_panel(&p.a, &p.a_value_col, None, &p.columns, units)?;
    let mut b = load_panel(&p.b, &p.b_value_col, None, &p.columns, units)?;
    if let Some(w) = p.window {
        a = ingest::trailing_average(&a, w)?;
        b = ingest::trailing_average(&b, w)?;
    }
    Ok((a, b))
}

fn load_truth(a: &TruthArgs, units: Units) -> Result<Vec<GeoTruth>, CliError> {
    match &a.truth {
        Some(path) => Ok(ingest::read_truth(File::open(path)?, units.scale())?),
        None => Ok(us_like_truth(
            a.synthetic_lo * units.scale(),
            a.synthetic_hi * units.scale(),
        )),
    }
}

fn observed_tau(panel: &PanelSeries, truth: &[GeoTruth], date: NaiveDate) -> Result<f64, CliError> {
    let (est, rates): (Vec<f64>, Vec<f64>) = truth
        .iter()
        .filter_map(|t| panel.get(&t.geo, date).map(|e| (e.value, t.true_rate)))
        .unzip();
    if est.len() < ranking::MIN_SHARED {
        return Err(surveyerr_core::Error::NoOverlap.into());
    }
    let tau = ranking::kendall_tau(&est, &rates)?;
    eprintln!("observed {TAU_VARIANT} on {date} over {} geos: {tau}", est.len());
    Ok(tau)
}

fn rank_power(truth: Vec<GeoTruth>, grid: &[u64], reps: u32, seed: RngSeed) -> Result<Table, CliError> {
    let mut t = Table::new(&[
        "national_n",
        "mean_tau",
        "sd_tau",
        "se_tau",
        "replications_used",
        "dropped_replications",
        "tau_variant",
    ]);
    for &n in grid {
        let config = RankSimConfig {
            truth: truth.clone(),
            national_n: n,
            replications: reps,
            seed,
        };
        let s = ranking::expected_tau(&config)?;
        t.push(vec![
            n.into(),
            s.mean_tau.into(),
            s.sd_tau.into(),
            s.standard_error().into(),
            s.replications_used.into(),
            s.dropped_replications.into(),
            TAU_VARIANT.into(),
        ]);
    }
    Ok(t)
}

fn params(m: &ModelArgs) -> TwoGroupParams {
    TwoGroupParams {
        eta: m.eta,
        b: m.b,
        gamma: m.gamma,
        base_response: m.base_response,
        population: m.population,
        sample_size: m.n,
    }
}

fn curve(model: &ModelArgs, rho_max: f64, steps: usize) -> Result<Table, CliError> {
    let p = params(model);
    let grid = twogroup::rho_grid(rho_max, steps)?;
    let mut t = Table::new(&["rho", "true_rate", "respondent_rate", "bias", "ddc"]);
    for c in twogroup::ddc_curve(&p, &grid)? {
        t.push(vec![
            c.rho.into(),
            c.true_rate.into(),
            c.respondent_rate.into(),
            c.bias.into(),
            c.ddc.into(),
        ]);
    }
    Ok(t)
}

fn cross_table(a: &PanelSeries, b: &PanelSeries) -> Result<Table, surveyerr_core::Error> {
    let mut t = Table::new(&["date", "tau", "n_geos", "tau_variant"]);
    for r in ranking::cross_sectional_tau(a, b)? {
        t.push(vec![
            r.date.format(DATE_FORMAT).to_string().into(),
            r.tau.into(),
            r.n_geos.into(),
            TAU_VARIANT.into(),
        ]);
    }
    Ok(t)
}

fn temporal_table(a: &PanelSeries, b: &PanelSeries) -> Result<Table, surveyerr_core::Error> {
    let mut t = Table::new(&["geo", "tau", "n_dates", "tau_variant"]);
    for r in ranking::temporal_tau(a, b)? {
        t.push(vec![r.geo.into(), r.tau.into(), r.n_dates.into(), TAU_VARIANT.into()]);
    }
    Ok(t)
}

/// Same columns as [`ingest::write_panel`], so the CSV reads back with
/// [`ingest::parse_panel`].
fn panel_table(p: &PanelSeries) -> Table {
    let mut t = Table::new(&["geo", "date", "value", "sample_size", ingest::WINDOW_PRESENT_COLUMN]);
    for e in p.entries() {
        t.push(vec![
            e.geo.clone().into(),
            e.date.format(DATE_FORMAT).to_string().into(),
            e.value.into(),
            e.sample_size.into(),
            e.window_present.into(),
        ]);
    }
    t
}
