//! Problem files and result documents. Complex numbers are `[re, im]`
//! arrays; angles are radians.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::CliError;
use crate::finitemodel::{FiniteAlgebra, NormKind};
use crate::problem::{
    sup_lower_bound, Backend, BackendKind, Certificate, InterpolationProblem, NormResult, Site, DEFAULT_TOLERANCE,
};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BackendParams {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    /// Basis vectors of a subalgebra, each a list of `[re, im]` entries.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<[f64; 2]>>>,
}

impl BackendParams {
    fn is_empty(&self) -> bool {
        *self == BackendParams::default()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    pub backend: String,
    #[serde(default, skip_serializing_if = "BackendParams::is_empty")]
    pub backend_params: BackendParams,
    pub sites: Vec<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

fn field(path: impl Into<String>, msg: impl std::fmt::Display) -> CliError {
    CliError::Invalid(format!("field `{}`: {msg}", path.into()))
}

fn complex(v: &Value, path: &str) -> Result<C64, CliError> {
    match v {
        Value::Number(n) => Ok(C64::new(n.as_f64().unwrap_or(f64::NAN), 0.0)),
        Value::Array(a) if a.len() == 2 => match (a[0].as_f64(), a[1].as_f64()) {
            (Some(re), Some(im)) => Ok(C64::new(re, im)),
            _ => Err(field(path, "expected [re, im] with numeric entries")),
        },
        _ => Err(field(path, "expected a number or an [re, im] pair")),
    }
}

fn integer(v: &Value, path: &str) -> Result<i64, CliError> {
    v.as_i64().ok_or_else(|| field(path, "expected an integer"))
}

impl ProblemFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Invalid(format!("problem file: {e}")))
    }

    pub fn kind(&self) -> Result<BackendKind, CliError> {
        self.backend.parse().map_err(|e: crate::Error| field("backend", e))
    }

    pub fn backend(&self) -> Result<Backend, CliError> {
        let params = &self.backend_params;
        let finite = |kind: NormKind| -> Result<Backend, CliError> {
            let weights = match (&params.weights, params.dimension) {
                (Some(w), Some(d)) if w.len() != d => {
                    return Err(field("backend_params.dimension", format!("{d} but {} weights", w.len())))
                }
                (Some(w), _) => w.clone(),
                (None, Some(d)) => vec![1.0; d],
                (None, None) => return Err(field("backend_params", "needs `weights` or `dimension`")),
            };
            let basis = params.basis.as_ref().map(|b| {
                b.iter()
                    .map(|v| v.iter().map(|[re, im]| C64::new(*re, *im)).collect())
                    .collect()
            });
            FiniteAlgebra::new(kind, weights, basis)
                .map(Backend::Finite)
                .map_err(|e| field("backend_params", e))
        };
        Ok(match self.kind()? {
            BackendKind::Hardy => Backend::Hardy,
            BackendKind::AnalyticWiener => Backend::AnalyticWiener,
            BackendKind::Wiener => Backend::Wiener,
            BackendKind::L1Torus => Backend::L1Torus,
            BackendKind::FiniteSup => finite(NormKind::WeightedSup)?,
            BackendKind::FiniteL1 => finite(NormKind::WeightedL1)?,
            BackendKind::FiniteLp => {
                let p = params.p.ok_or_else(|| field("backend_params.p", "required for finite_lp"))?;
                finite(NormKind::Lp(p))?
            }
        })
    }

    pub fn sites(&self) -> Result<Vec<Site>, CliError> {
        let kind = self.kind()?;
        self.sites
            .iter()
            .enumerate()
            .map(|(i, v)| {
                let path = format!("sites[{i}]");
                Ok(match kind {
                    BackendKind::Hardy | BackendKind::AnalyticWiener => Site::DiscPoint(complex(v, &path)?),
                    BackendKind::Wiener => {
                        Site::CircleAngle(v.as_f64().ok_or_else(|| field(&path, "expected an angle in radians"))?)
                    }
                    BackendKind::L1Torus => Site::IntegerCharacter(integer(v, &path)?),
                    BackendKind::FiniteSup | BackendKind::FiniteL1 | BackendKind::FiniteLp => {
                        let k = integer(v, &path)?;
                        Site::CoordinateIndex(
                            usize::try_from(k).map_err(|_| field(&path, "expected a 1-based coordinate index"))?,
                        )
                    }
                })
            })
            .collect()
    }

    pub fn targets(&self) -> Result<Vec<C64>, CliError> {
        let t = self.targets.as_ref().ok_or_else(|| field("targets", "missing"))?;
        Ok(t.iter().map(|[re, im]| C64::new(*re, *im)).collect())
    }

    pub fn problem(&self, tolerance_override: Option<f64>) -> Result<InterpolationProblem, CliError> {
        let tolerance = tolerance_override.or(self.tolerance).unwrap_or(DEFAULT_TOLERANCE);
        let p = InterpolationProblem::new(self.backend()?, self.sites()?, self.targets()?).with_tolerance(tolerance);
        p.validate()?;
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub tolerance: f64,
    pub problem: ProblemFile,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultDocument {
    pub norm_lower: f64,
    pub norm_upper: f64,
    pub sup_floor: f64,
    /// The bracket is the best reached before the solver gave up.
    pub stalled: bool,
    pub iterations: usize,
    pub certificate: Certificate,
    pub backend_echo: String,
    pub timing_ms: Option<f64>,
    pub config_echo: ConfigEcho,
}

impl ResultDocument {
    pub fn new(file: &ProblemFile, problem: &InterpolationProblem, r: &NormResult, stalled: bool) -> Self {
        ResultDocument {
            norm_lower: r.lower,
            norm_upper: r.upper,
            sup_floor: sup_lower_bound(&problem.targets).unwrap_or(0.0),
            stalled,
            iterations: r.iterations,
            certificate: r.certificate.clone(),
            backend_echo: problem.backend.name().to_string(),
            timing_ms: None,
            config_echo: ConfigEcho {
                tolerance: problem.tolerance,
                problem: file.clone(),
            },
        }
    }

    /// Re-parses the echoed problem and checks the bracket invariants.
    pub fn revalidate(&self) -> Result<(), CliError> {
        let p = self.config_echo.problem.problem(Some(self.config_echo.tolerance))?;
        let floor = sup_lower_bound(&p.targets)?;
        let tol = self.config_echo.tolerance;
        if self.sup_floor != floor {
            return Err(field("sup_floor", format!("{} but the targets give {floor}", self.sup_floor)));
        }
        if self.norm_lower < floor - tol || self.norm_upper < self.norm_lower {
            return Err(field(
                "norm_lower",
                format!("bracket [{}, {}] violates the floor {floor}", self.norm_lower, self.norm_upper),
            ));
        }
        Ok(())
    }

    pub fn csv_header() -> &'static str {
        "backend,n,norm_lower,norm_upper,sup_floor,gap,stalled"
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{:e},{:e},{:e},{:e},{}",
            self.backend_echo,
            self.config_echo.problem.sites.len(),
            self.norm_lower,
            self.norm_upper,
            self.sup_floor,
            self.norm_upper - self.norm_lower,
            self.stalled
        )
    }
}
