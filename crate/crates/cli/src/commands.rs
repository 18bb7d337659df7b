use std::collections::BTreeMap;

use hardy_core::catalog::{evaluate_detailed, CaseId, ParamSet, VerificationReport};
use hardy_core::manifold::ManifoldModel;
use hardy_core::prober::{generate_corpus, open_problem_from_report, sharpness_sweep, DEFAULT_SWEEP};
use hardy_core::radial::RadialFunction;
use rayon::prelude::*;

use crate::config::{Kind, RunConfig};
use crate::report::{open_problem_holds, Row};
use crate::CliError;

/// Rows of one run plus whether any row failed for configuration reasons.
#[derive(Debug)]
pub struct Outcome {
    pub rows: Vec<Row>,
    pub config_error: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.config_error {
            2
        } else if self.rows.iter().all(Row::pass) {
            0
        } else {
            1
        }
    }
}

struct Task<'a> {
    id: CaseId,
    model: &'a ManifoldModel,
    params: ParamSet,
    f: &'a RadialFunction,
}

fn failed(id: CaseId, model: &ManifoldModel, function: &str, e: &hardy_core::Error) -> Row {
    Row::Failed {
        case_id: id.to_string(),
        model: model.name().to_string(),
        function: function.to_string(),
        error: e.to_string(),
    }
}

/// Every parameter set is validated before any corpus is built or integrated.
fn plan(cfg: &RunConfig, cases: &[CaseId], models: &[ManifoldModel]) -> Result<Vec<(CaseId, usize, ParamSet)>, CliError> {
    let mut out = Vec::new();
    for &id in cases {
        for (mi, m) in models.iter().enumerate() {
            out.push((id, mi, cfg.validated_params(id, m)?));
        }
    }
    Ok(out)
}

fn corpora(cfg: &RunConfig, cases: &[CaseId]) -> Result<BTreeMap<CaseId, Vec<RadialFunction>>, CliError> {
    let mut out = BTreeMap::new();
    for &id in cases {
        if let std::collections::btree_map::Entry::Vacant(e) = out.entry(id) {
            e.insert(generate_corpus(&cfg.corpus_spec(Some(id)))?);
        }
    }
    Ok(out)
}

/// Evaluate the grid concurrently; `finish` turns each report into a row.
fn run_grid<F>(cfg: &RunConfig, cases: &[CaseId], finish: F) -> Result<Outcome, CliError>
where
    F: Fn(VerificationReport, Vec<VerificationReport>) -> Row + Sync,
{
    let models = cfg.model_list()?;
    let plan = plan(cfg, cases, &models)?;
    let corpora = corpora(cfg, cases)?;
    let spec = cfg.quadrature();
    let models = &models;
    let tasks: Vec<Task> = plan
        .iter()
        .flat_map(|(id, mi, params)| {
            corpora[id].iter().map(move |f| Task {
                id: *id,
                model: &models[*mi],
                params: params.clone(),
                f,
            })
        })
        .collect();
    let results: Vec<(Row, bool)> = tasks
        .par_iter()
        .map(|t| match evaluate_detailed(t.id, &t.params, t.model, t.f, &spec) {
            Ok((r, links)) => (finish(r, links), false),
            Err(e) => (failed(t.id, t.model, t.f.label(), &e), e.is_configuration()),
        })
        .collect();
    Ok(Outcome {
        config_error: results.iter().any(|r| r.1),
        rows: results.into_iter().map(|r| r.0).collect(),
    })
}

pub fn verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.cases.is_empty() {
        return Err(CliError::Config("verify needs at least one --case".into()));
    }
    run_grid(cfg, &cfg.cases, |report, links| Row::Report {
        pass: report.pass,
        report,
        links,
        open_problem: None,
    })
}

fn only_case(cfg: &RunConfig, id: CaseId, command: &str) -> Result<(), CliError> {
    match cfg.cases.iter().find(|c| **c != id) {
        Some(c) => Err(CliError::Config(format!("{command} runs {id} only, got --case {c}"))),
        None => Ok(()),
    }
}

pub fn identity(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let id = CaseId::CritIdentity;
    only_case(cfg, id, "identity")?;
    let bound = cfg.bound.unwrap_or(hardy_core::catalog::IDENTITY_BOUND);
    if !(bound > 0.0) {
        return Err(CliError::Config(format!("--bound must be positive, got {bound}")));
    }
    run_grid(cfg, &[id], |mut report, links| {
        report.pass = report.residual.is_some_and(|r| r <= bound);
        Row::Report {
            pass: report.pass,
            report,
            links,
            open_problem: None,
        }
    })
}

pub fn stability(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let id = match cfg.kind.unwrap_or(Kind::Subcritical) {
        Kind::Subcritical => CaseId::StabSubcrit,
        Kind::Critical => CaseId::StabCrit,
    };
    only_case(cfg, id, "stability")?;
    let models = cfg.model_list()?;
    if id == CaseId::StabCrit {
        if let Some(m) = models.iter().find(|m| !m.has_constant_density()) {
            return Err(CliError::Config(format!(
                "critical stability needs a model with constant density, got {}",
                m.name()
            )));
        }
    }
    run_grid(cfg, &[id], |report, links| {
        let open_problem = (id == CaseId::StabSubcrit)
            .then(|| open_problem_from_report(&report).ok())
            .flatten();
        let pass = report.pass && open_problem.as_ref().is_none_or(open_problem_holds);
        Row::Report {
            report,
            links,
            open_problem,
            pass,
        }
    })
}

pub fn sharpness(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.cases.is_empty() {
        return Err(CliError::Config(
            "sharpness needs --case CRIT_LOG_GENERAL, DOUBLE_WEIGHT or CRIT_DUAL_LOG".into(),
        ));
    }
    for id in &cfg.cases {
        if !matches!(id, CaseId::CritLogGeneral | CaseId::DoubleWeight | CaseId::CritDualLog) {
            return Err(CliError::Config(format!("no sharpness family for {id}")));
        }
    }
    let bound = cfg.bound.unwrap_or(0.02);
    if !(bound > 0.0) {
        return Err(CliError::Config(format!("--bound must be positive, got {bound}")));
    }
    let values = cfg.values.clone().unwrap_or_else(|| DEFAULT_SWEEP.to_vec());
    let models = cfg.model_list()?;
    let plan = plan(cfg, &cfg.cases, &models)?;
    let spec = cfg.quadrature();
    let mut out = Outcome {
        rows: Vec::new(),
        config_error: false,
    };
    for (id, mi, params) in &plan {
        let m = &models[*mi];
        match sharpness_sweep(*id, params, m, &values, &spec) {
            Ok(sweep) => {
                let pass = sweep.relative_gap <= bound;
                out.rows.push(Row::Sweep { sweep, pass });
            }
            Err(e) => {
                out.config_error |= e.is_configuration();
                out.rows.push(failed(*id, m, "extremal family", &e));
            }
        }
    }
    Ok(out)
}
