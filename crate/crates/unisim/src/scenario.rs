//! Scenario files: one JSON document with the physical parameters, the
//! simulation settings, the rider profile, the controller and output paths.
//! Every section except `params` may be omitted and is then defaulted.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use unicycle_core::{IntentProfile, Issue, Params, PidConfig, SimConfig};

use crate::error::{Error, Result};
use crate::FORMAT_VERSION;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControllerKind {
    #[default]
    Pid,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerSpec {
    pub kind: ControllerKind,
    pub pid: PidConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Outputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub log: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub plot: Option<String>,
    pub plot_fields: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub frames_dir: Option<String>,
    pub frame_every: usize,
}

impl Default for Outputs {
    fn default() -> Self {
        Outputs { log: None, plot: None, plot_fields: vec!["theta".into(), "v_W".into()], frames_dir: None, frame_every: 100 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default = "format_version")]
    pub format_version: u32,
    pub params: Params,
    #[serde(default)]
    pub sim: SimConfig,
    #[serde(default)]
    pub profile: IntentProfile,
    #[serde(default)]
    pub controller: ControllerSpec,
    #[serde(default)]
    pub outputs: Outputs,
}

fn format_version() -> u32 {
    FORMAT_VERSION
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            format_version: FORMAT_VERSION,
            params: Params::default(),
            sim: SimConfig::default(),
            profile: IntentProfile::default(),
            controller: ControllerSpec::default(),
            outputs: Outputs::default(),
        }
    }
}

impl Scenario {
    /// Every violated invariant across all sections.
    pub fn validate(&self) -> Vec<Issue> {
        let mut issues = Vec::new();
        if self.format_version != FORMAT_VERSION {
            issues.push(Issue::new(
                "format_version",
                format!("unsupported version {}, expected {FORMAT_VERSION}", self.format_version),
            ));
        }
        issues.extend(self.params.validate().into_iter().map(|i| i.under("params")));
        issues.extend(self.sim.validate().into_iter().map(|i| i.under("sim")));
        issues.extend(self.profile.validate().into_iter().map(|i| i.under("profile")));
        issues.extend(self.controller.pid.validate().into_iter().map(|i| i.under("controller.pid")));
        if self.outputs.frame_every == 0 {
            issues.push(Issue::new("outputs.frame_every", "must be >= 1"));
        }
        for (i, field) in self.outputs.plot_fields.iter().enumerate() {
            if !crate::csvlog::is_numeric_column(field) {
                issues.push(Issue::new(format!("outputs.plot_fields[{i}]"), format!("unknown log column `{field}`")));
            }
        }
        issues
    }

    pub fn from_json(text: &str, path: &Path) -> Result<Self> {
        let scenario: Scenario =
            serde_json::from_str(text).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
        let issues = scenario.validate();
        if issues.is_empty() {
            Ok(scenario)
        } else {
            Err(Error::Validation(issues))
        }
    }

    /// Canonical pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serialises");
        s.push('\n');
        s
    }
}

pub fn load_scenario(path: impl AsRef<Path>) -> Result<Scenario> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Scenario::from_json(&text, path)
}

pub fn save_scenario(scenario: &Scenario, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, scenario.to_json()).map_err(|e| Error::io(path, e))
}

/// Reads a flat parameter file.
pub fn load_params(path: impl AsRef<Path>) -> Result<Params> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let params: Params =
        serde_json::from_str(&text).map_err(|source| Error::Json { path: path.to_path_buf(), source })?;
    let issues = params.validate();
    if issues.is_empty() {
        Ok(params)
    } else {
        Err(Error::Validation(issues))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_gets_defaults() {
        let s = Scenario::from_json(r#"{"params": {}}"#, Path::new("min.json")).unwrap();
        assert_eq!(s.sim.dt, 0.001);
        assert_eq!(s.sim.duration, 30.0);
        assert_eq!(s, Scenario::default());
    }

    #[test]
    fn invalid_xi_is_named() {
        let err = Scenario::from_json(r#"{"params": {"xi": 1.2}}"#, Path::new("x.json")).unwrap_err();
        match err {
            Error::Validation(issues) => {
                assert_eq!(issues.len(), 1);
                assert_eq!(issues[0].path, "params.xi");
            }
            other => panic!("unexpected {other}"),
        }
    }

    #[test]
    fn all_violations_are_reported() {
        let text = r#"{"params": {"xi": 0.2, "m_S": -3},
                       "sim": {"dt": 0.5},
                       "controller": {"pid": {"integral_limit": 0}},
                       "outputs": {"frame_every": 0, "plot_fields": ["theta", "nope"]}}"#;
        let Error::Validation(issues) = Scenario::from_json(text, Path::new("x.json")).unwrap_err() else {
            panic!("expected validation error");
        };
        let paths: Vec<_> = issues.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(
            paths,
            [
                "params.m_S",
                "params.xi",
                "sim.dt",
                "controller.pid.integral_limit",
                "outputs.frame_every",
                "outputs.plot_fields[1]"
            ]
        );
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = Scenario::from_json(r#"{"params": {"radius": 1}}"#, Path::new("x.json")).unwrap_err();
        assert!(matches!(err, Error::Json { .. }));
        assert!(err.to_string().contains("radius"));
    }

    #[test]
    fn save_load_is_a_fixed_point() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = Scenario {
            profile: IntentProfile::step(0.0, 5.0, 2.0),
            outputs: Outputs { log: Some("log.csv".into()), ..Outputs::default() },
            ..Scenario::default()
        };
        save_scenario(&s, &path).unwrap();
        let first = fs::read_to_string(&path).unwrap();
        let loaded = load_scenario(&path).unwrap();
        assert_eq!(loaded, s);
        save_scenario(&loaded, &path).unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), first);
    }
}
