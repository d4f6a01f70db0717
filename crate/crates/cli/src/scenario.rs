//! JSON scenario files: one subcommand with its options.
//!
//! A scenario is rewritten into the equivalent argument list and parsed by
//! clap, so both entry points share validation. Relative paths inside a
//! scenario are taken relative to the scenario file.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "snake_case")]
pub struct Scenario {
    pub command: String,
    pub n: Option<usize>,
    pub a: Option<usize>,
    pub coin: Option<String>,
    pub schedule_policy: Option<String>,
    pub initial: Option<String>,
    pub edge: Option<usize>,
    pub steps: Option<usize>,
    pub method: Option<String>,
    pub source: Option<String>,
    pub seed: Option<u64>,
    pub x0: Option<usize>,
    pub g: Option<usize>,
    pub tol: Option<f64>,
    pub grouping_tol: Option<f64>,
    pub format: Option<String>,
    pub output: Option<PathBuf>,
    pub p0: Option<PathBuf>,
    pub p1: Option<PathBuf>,
}

fn resolve(base: &Path, p: &Path) -> PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

/// Rewrites `kind:<file>` specs so the file is found relative to `base`.
fn resolve_spec(base: &Path, spec: &str, file_kinds: &[&str]) -> String {
    match spec.split_once(':') {
        Some((kind, path)) if file_kinds.contains(&kind) => {
            format!("{kind}:{}", resolve(base, Path::new(path)).display())
        }
        _ => spec.to_string(),
    }
}

impl Scenario {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::param(format!("{}: {e}", path.display())))
    }

    /// Argument vector (without the program name) equivalent to this scenario.
    pub fn to_args(&self, base: &Path) -> CliResult<Vec<OsString>> {
        if self.command == "run" {
            return Err(CliError::param("a scenario cannot run another scenario"));
        }
        let mut args: Vec<OsString> = vec![self.command.clone().into()];
        let mut push = |flag: &str, value: String| {
            args.push(format!("--{flag}").into());
            args.push(value.into());
        };
        let num = |v: Option<usize>| v.map(|x| x.to_string());
        let pairs = [
            ("n", num(self.n)),
            ("a", num(self.a)),
            (
                "coin",
                self.coin
                    .as_deref()
                    .map(|c| resolve_spec(base, c, &["custom", "schedule"])),
            ),
            ("schedule-policy", self.schedule_policy.clone()),
            (
                "initial",
                self.initial.as_deref().map(|s| resolve_spec(base, s, &["custom"])),
            ),
            ("edge", num(self.edge)),
            ("steps", num(self.steps)),
            ("method", self.method.clone()),
            ("source", self.source.clone()),
            ("seed", self.seed.map(|s| s.to_string())),
            ("x0", num(self.x0)),
            ("g", num(self.g)),
            ("tol", self.tol.map(|t| t.to_string())),
            ("grouping-tol", self.grouping_tol.map(|t| t.to_string())),
            ("format", self.format.clone()),
            (
                "output",
                self.output.as_deref().map(|p| resolve(base, p).display().to_string()),
            ),
            ("p0", self.p0.as_deref().map(|p| resolve(base, p).display().to_string())),
            ("p1", self.p1.as_deref().map(|p| resolve(base, p).display().to_string())),
        ];
        for (flag, value) in pairs {
            if let Some(v) = value {
                push(flag, v);
            }
        }
        Ok(args)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_rejected() {
        let err = serde_json::from_str::<Scenario>(r#"{"command": "evolve", "bogus": 1}"#);
        assert!(err.is_err());
    }

    #[test]
    fn paths_resolve_against_scenario_dir() {
        let s: Scenario = serde_json::from_str(
            r#"{"command": "limiting", "n": 6, "a": 2, "coin": "custom:c.json", "output": "out.csv"}"#,
        )
        .unwrap();
        let args = s.to_args(Path::new("/tmp/exp")).unwrap();
        let args: Vec<String> = args.into_iter().map(|a| a.into_string().unwrap()).collect();
        assert_eq!(
            args,
            [
                "limiting",
                "--n",
                "6",
                "--a",
                "2",
                "--coin",
                "custom:/tmp/exp/c.json",
                "--output",
                "/tmp/exp/out.csv"
            ]
        );
    }

    #[test]
    fn nested_run_rejected() {
        let s: Scenario = serde_json::from_str(r#"{"command": "run"}"#).unwrap();
        assert!(s.to_args(Path::new(".")).is_err());
    }
}
