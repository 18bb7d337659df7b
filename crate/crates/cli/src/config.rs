use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, ValueEnum};
use hardy_core::catalog::{ckn_gamma, validate_params, CaseId, ParamSet};
use hardy_core::functionals::StabilityKind;
use hardy_core::manifold::{ManifoldModel, Region};
use hardy_core::prober::{CorpusSpec, ValueField};
use hardy_core::quadrature::QuadratureSpec;
use serde::Serialize;

use crate::CliError;

/// Corpus size used by `--corpus default`.
pub const DEFAULT_CORPUS_COUNT: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Real,
    Complex,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Subcritical,
    Critical,
}

impl From<Kind> for StabilityKind {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Subcritical => StabilityKind::SubCritical,
            Kind::Critical => StabilityKind::Critical,
        }
    }
}

/// Flags shared by every command.
#[derive(Args, Clone, Debug)]
pub struct CommonArgs {
    /// Case ids, repeated or comma separated
    #[arg(long = "case", value_delimiter = ',')]
    pub cases: Vec<String>,
    /// Model specs such as euclidean:3, hyperbolic:3:1 or warped:cubic:3
    #[arg(long = "model", value_delimiter = ',', default_value = "euclidean:3")]
    pub models: Vec<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub p: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub gamma: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub beta: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub c: Option<f64>,
    #[arg(long = "bigR", allow_hyphen_values = true)]
    pub big_r: Option<f64>,
    #[arg(long)]
    pub k: Option<usize>,
    /// `default` or a function count
    #[arg(long, default_value = "default")]
    pub corpus: String,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Field::Real)]
    pub field: Field,
    /// Corpus support `inner:outer`; defaults to the case's own
    #[arg(long)]
    pub support: Option<String>,
    #[arg(long = "rel-tol", allow_hyphen_values = true)]
    pub rel_tol: Option<f64>,
    #[arg(long = "abs-tol", allow_hyphen_values = true)]
    pub abs_tol: Option<f64>,
    /// Report path; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct Overrides {
    pub p: Option<f64>,
    pub gamma: Option<f64>,
    pub beta: Option<f64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub c: Option<f64>,
    #[serde(rename = "bigR")]
    pub big_r: Option<f64>,
    pub k: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorpusConfig {
    pub seed: u64,
    pub count: usize,
    pub field: Field,
    /// `None` uses each case's default support.
    pub support: Option<Region>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub abs_tol: f64,
}

/// Fully resolved run configuration, echoed at the top of every report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub cases: Vec<CaseId>,
    pub models: Vec<String>,
    pub overrides: Overrides,
    pub corpus: CorpusConfig,
    pub quadrature: QuadConfig,
    pub bound: Option<f64>,
    pub kind: Option<Kind>,
    pub values: Option<Vec<f64>>,
    pub out: Option<String>,
    pub format: Format,
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

fn parse_support(s: &str) -> Result<Region, CliError> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| config_err(format!("--support expects inner:outer, got `{s}`")))?;
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| config_err(format!("--support: `{t}` is not a number")))
    };
    let (inner, outer) = (num(a)?, num(b)?);
    if !(inner >= 0.0 && inner < outer && outer.is_finite()) {
        return Err(config_err(format!("--support needs 0 <= inner < outer < inf, got {inner}:{outer}")));
    }
    Ok(if inner == 0.0 {
        Region::Ball { radius: outer }
    } else {
        Region::Annulus { inner, outer }
    })
}

impl RunConfig {
    pub fn from_args(command: &str, args: &CommonArgs) -> Result<Self, CliError> {
        let cases = args
            .cases
            .iter()
            .filter(|s| !s.trim().is_empty())
            .map(|s| CaseId::from_str(s).map_err(CliError::Core))
            .collect::<Result<Vec<_>, _>>()?;
        let models: Vec<String> = args.models.iter().map(|m| m.trim().to_string()).filter(|m| !m.is_empty()).collect();
        if models.is_empty() {
            return Err(config_err("at least one --model is required"));
        }
        for m in &models {
            ManifoldModel::parse(m).map_err(CliError::Core)?;
        }
        let count = match args.corpus.trim() {
            "default" => DEFAULT_CORPUS_COUNT,
            n => n
                .parse::<usize>()
                .map_err(|_| config_err(format!("--corpus expects `default` or a count, got `{n}`")))?,
        };
        if count == 0 {
            return Err(config_err("--corpus count must be at least 1"));
        }
        let support = args.support.as_deref().map(parse_support).transpose()?;
        let defaults = QuadratureSpec::default();
        let quadrature = QuadConfig {
            rel_tol: args.rel_tol.unwrap_or(defaults.rel_tol),
            abs_tol: args.abs_tol.unwrap_or(defaults.abs_tol),
        };
        QuadratureSpec::with_tolerances(quadrature.rel_tol, quadrature.abs_tol)
            .validate()
            .map_err(CliError::Core)?;
        Ok(RunConfig {
            command: command.to_string(),
            cases,
            models,
            overrides: Overrides {
                p: args.p,
                gamma: args.gamma,
                beta: args.beta,
                a: args.a,
                b: args.b,
                c: args.c,
                big_r: args.big_r,
                k: args.k,
            },
            corpus: CorpusConfig {
                seed: args.seed,
                count,
                field: args.field,
                support,
            },
            quadrature,
            bound: None,
            kind: None,
            values: None,
            out: args.out.as_ref().map(|p| p.display().to_string()),
            format: args.format,
        })
    }

    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec::with_tolerances(self.quadrature.rel_tol, self.quadrature.abs_tol)
    }

    pub fn model_list(&self) -> Result<Vec<ManifoldModel>, CliError> {
        self.models
            .iter()
            .map(|m| ManifoldModel::parse(m).map_err(CliError::Core))
            .collect()
    }

    /// Case defaults for dimension `n` with the overrides applied.
    pub fn params(&self, id: CaseId, n: usize) -> ParamSet {
        let mut s = ParamSet::defaults(id, n).unwrap_or_else(|| {
            let mut s = ParamSet::base(n);
            match id {
                CaseId::HigherOdd => s.k = 3,
                CaseId::HigherEven => s.k = 4,
                _ => {}
            }
            s
        });
        let o = &self.overrides;
        if let Some(v) = o.p {
            s.p = v;
        }
        if let Some(v) = o.gamma {
            s.gamma = v;
        }
        if let Some(v) = o.beta {
            s.beta = v;
        }
        if let Some(v) = o.a {
            s.a = v;
        }
        if let Some(v) = o.b {
            s.b = v;
        }
        if let Some(v) = o.c {
            s.c = v;
        }
        if let Some(v) = o.big_r {
            s.big_r = v;
        }
        if let Some(v) = o.k {
            s.k = v;
        }
        match id {
            CaseId::Ckn if o.gamma.is_none() => s.gamma = ckn_gamma(&s),
            CaseId::CritLogP if o.gamma.is_none() => s.gamma = s.p,
            _ => {}
        }
        s
    }

    /// Parameters for every (case, model) pair, refusing the run if any set
    /// violates its hypotheses.
    pub fn validated_params(&self, id: CaseId, model: &ManifoldModel) -> Result<ParamSet, CliError> {
        let s = self.params(id, model.dim());
        validate_params(id, &s).map_err(|v| {
            CliError::Core(hardy_core::Error::Hypothesis {
                case: id.to_string(),
                violations: v,
            })
        })?;
        Ok(s)
    }

    pub fn corpus_spec(&self, id: Option<CaseId>) -> CorpusSpec {
        let support = self
            .corpus
            .support
            .unwrap_or_else(|| id.map(|c| c.default_support()).unwrap_or(Region::Annulus { inner: 0.2, outer: 0.9 }));
        let mut spec = CorpusSpec::new(self.corpus.seed, self.corpus.count, support);
        spec.field = match self.corpus.field {
            Field::Real => ValueField::Real,
            Field::Complex => ValueField::Complex,
        };
        spec
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    #[derive(Parser)]
    struct Wrap {
        #[command(flatten)]
        common: CommonArgs,
    }

    fn cfg(args: &[&str]) -> Result<RunConfig, CliError> {
        let w = Wrap::try_parse_from(std::iter::once("x").chain(args.iter().copied())).unwrap();
        RunConfig::from_args("verify", &w.common)
    }

    #[test]
    fn overrides_apply_over_defaults() {
        let c = cfg(&["--case", "DOUBLE_WEIGHT", "--c", "3", "--model", "euclidean:5"]).unwrap();
        let s = c.params(CaseId::DoubleWeight, 5);
        assert_eq!((s.a, s.b, s.c, s.p), (2.0, 2.0, 3.0, 2.0));
        let c = cfg(&["--case", "CKN", "--beta", "-1"]).unwrap();
        let s = c.params(CaseId::Ckn, 5);
        assert_eq!(s.gamma, ckn_gamma(&s));
    }

    #[test]
    fn rejects_bad_configuration() {
        assert!(cfg(&["--case", "NOT_A_CASE"]).is_err());
        assert!(cfg(&["--model", "sphere:3"]).is_err());
        assert!(cfg(&["--corpus", "0"]).is_err());
        assert!(cfg(&["--support", "0.9:0.2"]).is_err());
        assert!(cfg(&["--rel-tol", "-1"]).is_err());
        let c = cfg(&["--case", "DOUBLE_WEIGHT", "--b", "1"]).unwrap();
        let m = ManifoldModel::euclidean(3).unwrap();
        assert!(c.validated_params(CaseId::DoubleWeight, &m).is_err());
    }

    #[test]
    fn support_parsing() {
        assert_eq!(parse_support("0:0.5").unwrap(), Region::Ball { radius: 0.5 });
        assert_eq!(
            parse_support("1.2:5").unwrap(),
            Region::Annulus { inner: 1.2, outer: 5.0 }
        );
    }
}
