//! Run configuration files.
//!
//! ```toml
//! [problem]
//! a = 0
//! alpha = 0.5
//! beta = 0.5
//! x0 = 3
//! h = 10
//! b = 8
//! k = "-1/3"          # numbers may be given as constant expressions
//! rhs = "t^(-1/3)*(1 + t*(x^4)^(1/3))"
//!
//! [hypotheses]        # optional; estimated by sampling when absent
//! M = 25.46
//!
//! [numerics]          # optional
//! N = 256
//! r = 2
//! Q = 64
//! tol = 1e-10
//! max_iter = 500
//!
//! [output]
//! dir = "out"         # relative to the config file
//! ```

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::expr::parse_str;
use crate::picard::{KnownConstants, Problem, ProblemParams, SolveConfig};
use crate::quadrature::InterpOrder;

/// A number, or a string holding a constant expression such as `"-1/3"`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum Scalar {
    Num(f64),
    Text(String),
}

impl Scalar {
    pub fn value(&self, key: &str) -> std::result::Result<f64, String> {
        match self {
            Scalar::Num(v) => Ok(*v),
            Scalar::Text(src) => {
                let e = parse_str(src).map_err(|e| format!("{key}: {e}"))?;
                if !e.is_constant() {
                    return Err(format!("{key}: `{src}` must not depend on t or x"));
                }
                e.eval(0.0, 0.0).map_err(|e| format!("{key}: {e}"))
            }
        }
    }
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Num(v)
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSection {
    pub a: Scalar,
    pub alpha: Scalar,
    pub beta: Scalar,
    pub x0: Scalar,
    pub h: Scalar,
    pub b: Scalar,
    pub k: Scalar,
    pub rhs: String,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HypothesesSection {
    #[serde(rename = "M", alias = "m")]
    pub m: Option<Scalar>,
    #[serde(rename = "A", alias = "lipschitz")]
    pub a: Option<Scalar>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NumericsSection {
    #[serde(rename = "N")]
    pub n: Option<usize>,
    pub r: Option<f64>,
    #[serde(rename = "Q")]
    pub q: Option<usize>,
    pub tol: Option<f64>,
    pub max_iter: Option<usize>,
    pub l_override: Option<Scalar>,
    pub interp: Option<InterpOrder>,
    pub sample_t: Option<usize>,
    pub sample_x: Option<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub problem: ProblemSection,
    #[serde(default)]
    pub hypotheses: HypothesesSection,
    #[serde(default)]
    pub numerics: NumericsSection,
    #[serde(default)]
    pub output: OutputSection,
}

/// A validated configuration ready to solve.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub problem: Problem,
    pub known: KnownConstants,
    pub solve: SolveConfig,
    pub output_dir: PathBuf,
}

impl RunConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config {
            path: path.to_path_buf(),
            message: e.to_string().trim_end().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text, path)
    }

    /// Build the problem and solver settings. A relative output directory is
    /// taken relative to `path`.
    pub fn resolve(&self, path: &Path) -> Result<LoadedConfig> {
        let err = |message: String| Error::Config {
            path: path.to_path_buf(),
            message,
        };
        let pr = &self.problem;
        let num = |s: &Scalar, key: &str| s.value(key).map_err(err);
        let params = ProblemParams {
            a: num(&pr.a, "problem.a")?,
            alpha: num(&pr.alpha, "problem.alpha")?,
            beta: num(&pr.beta, "problem.beta")?,
            x0: num(&pr.x0, "problem.x0")?,
            h: num(&pr.h, "problem.h")?,
            b: num(&pr.b, "problem.b")?,
            k: num(&pr.k, "problem.k")?,
        };
        let rhs = parse_str(&pr.rhs).map_err(|e| err(format!("problem.rhs: {e}")))?;
        let problem = Problem::new(params, rhs).map_err(|e| err(e.to_string()))?;

        let opt = |s: &Option<Scalar>, key: &str| s.as_ref().map(|s| num(s, key)).transpose();
        let known = KnownConstants {
            m: opt(&self.hypotheses.m, "hypotheses.M")?,
            a: opt(&self.hypotheses.a, "hypotheses.A")?,
        };

        let n = &self.numerics;
        let d = SolveConfig::default();
        let solve = SolveConfig {
            n: n.n.unwrap_or(d.n),
            grading: n.r.unwrap_or(d.grading),
            quad_nodes: n.q.unwrap_or(d.quad_nodes),
            tol: n.tol.unwrap_or(d.tol),
            max_iter: n.max_iter.unwrap_or(d.max_iter),
            l_override: opt(&n.l_override, "numerics.l_override")?,
            interp: n.interp.unwrap_or(d.interp),
            sample_t: n.sample_t.unwrap_or(d.sample_t),
            sample_x: n.sample_x.unwrap_or(d.sample_x),
            threads: d.threads,
        };
        solve.validate().map_err(|e| err(e.to_string()))?;

        let base = path.parent().unwrap_or(Path::new("."));
        let output_dir = match &self.output.dir {
            Some(d) if d.is_absolute() => d.clone(),
            Some(d) => base.join(d),
            None => base.join("output"),
        };
        Ok(LoadedConfig {
            problem,
            known,
            solve,
            output_dir,
        })
    }
}

pub fn load_config(path: &Path) -> Result<LoadedConfig> {
    RunConfig::load(path)?.resolve(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
[problem]
a = 0
alpha = 0.5
beta = "1/2"
x0 = 3
h = 10
b = 8
k = "-1/3"
rhs = "t^(-1/3)*(1 + t*(x^4)^(1/3))"

[hypotheses]
M = "1 + 11^(4/3)"

[numerics]
N = 64
Q = 16
interp = "linear"
"#;

    #[test]
    fn parses_expressions_and_defaults() {
        let path = Path::new("/tmp/cfg/run.toml");
        let cfg = RunConfig::parse(EXAMPLE, path)
            .unwrap()
            .resolve(path)
            .unwrap();
        let p = cfg.problem.params();
        assert_eq!(p.beta, 0.5);
        assert_eq!(p.k, -1.0 / 3.0);
        assert!((cfg.known.m.unwrap() - 25.46378099626247).abs() < 1e-12);
        assert_eq!(cfg.known.a, None);
        assert_eq!(cfg.solve.n, 64);
        assert_eq!(cfg.solve.tol, 1e-10);
        assert_eq!(cfg.solve.interp, InterpOrder::Linear);
        assert_eq!(cfg.output_dir, Path::new("/tmp/cfg/output"));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let path = Path::new("x.toml");
        let text = EXAMPLE.replace("N = 64", "N = 64\nnodes = 3");
        let e = RunConfig::parse(&text, path).unwrap_err().to_string();
        assert!(e.contains("nodes"), "{e}");
        assert!(e.contains("line"), "{e}");
    }

    #[test]
    fn bad_values_are_config_errors() {
        let path = Path::new("x.toml");
        for (from, to) in [
            ("rhs = \"t^(-1/3)*(1 + t*(x^4)^(1/3))\"", "rhs = \"t^(\""),
            ("k = \"-1/3\"", "k = \"x/3\""),
            ("alpha = 0.5", "alpha = 1.5"),
            ("N = 64", "N = 1"),
        ] {
            let text = EXAMPLE.replace(from, to);
            let e = RunConfig::parse(&text, path)
                .unwrap()
                .resolve(path)
                .unwrap_err();
            assert!(matches!(e, Error::Config { .. }), "{to}: {e}");
            assert_eq!(e.exit_code(), 1);
        }
    }
}
