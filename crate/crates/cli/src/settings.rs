//! Run settings: flags over an optional `key = value` file over defaults.

use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use angenent_core::IntegratorConfig;
use clap::ValueEnum;

use crate::cli::{Common, Format, Precision};
use crate::UsageError;

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub integrator: IntegratorConfig,
    pub output_dir: PathBuf,
    pub force: bool,
    pub format: Format,
    pub precision: Precision,
    pub jobs: usize,
}

const KEYS: &[&str] = &[
    "output_dir",
    "format",
    "precision",
    "jobs",
    "force",
    "rel_tol",
    "abs_tol",
    "max_step",
    "r_min",
    "escape_radius",
    "max_arclength",
    "max_axis_crossings",
    "max_steps",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_file(text: &str) -> Result<Vec<(String, String)>, UsageError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| UsageError(format!("config line {}: expected `key = value`", i + 1)))?;
        let (k, v) = (k.trim().replace('-', "_"), v.trim().to_string());
        if !KEYS.contains(&k.as_str()) {
            return Err(UsageError(format!(
                "config line {}: unknown key `{k}`",
                i + 1
            )));
        }
        out.push((k, v));
    }
    Ok(out)
}

fn parse<T: FromStr>(key: &str, v: &str) -> Result<T, UsageError> {
    v.parse()
        .map_err(|_| UsageError(format!("config: bad value `{v}` for `{key}`")))
}

fn parse_enum<T: ValueEnum>(key: &str, v: &str) -> Result<T, UsageError> {
    T::from_str(v, true).map_err(|_| UsageError(format!("config: bad value `{v}` for `{key}`")))
}

impl RunConfig {
    pub fn resolve(flags: &Common) -> Result<Self, UsageError> {
        let file = match &flags.config {
            Some(p) => read(p)?,
            None => Vec::new(),
        };
        let mut rc = RunConfig {
            integrator: IntegratorConfig::default(),
            output_dir: PathBuf::from("out"),
            force: false,
            format: Format::Both,
            precision: Precision::Double,
            jobs: 1,
        };
        for (k, v) in &file {
            rc.apply(k, v)?;
        }
        let ic = &mut rc.integrator;
        macro_rules! flag {
            ($($f:ident),*) => {$(
                if let Some(v) = flags.$f {
                    ic.$f = v;
                }
            )*};
        }
        flag!(
            rel_tol,
            abs_tol,
            max_step,
            r_min,
            escape_radius,
            max_arclength,
            max_axis_crossings,
            max_steps
        );
        if let Some(d) = &flags.output_dir {
            rc.output_dir = d.clone();
        }
        rc.force |= flags.force;
        if let Some(f) = flags.format {
            rc.format = f;
        }
        if let Some(p) = flags.precision {
            rc.precision = p;
        }
        if let Some(j) = flags.jobs {
            rc.jobs = j as usize;
        }
        rc.integrator
            .validate()
            .map_err(|e| UsageError(e.to_string()))?;
        Ok(rc)
    }

    fn apply(&mut self, k: &str, v: &str) -> Result<(), UsageError> {
        let ic = &mut self.integrator;
        match k {
            "output_dir" => self.output_dir = PathBuf::from(v),
            "format" => self.format = parse_enum(k, v)?,
            "precision" => self.precision = parse_enum(k, v)?,
            "jobs" => {
                self.jobs = parse(k, v)?;
                if self.jobs == 0 {
                    return Err(UsageError("config: jobs must be at least 1".into()));
                }
            }
            "force" => self.force = parse(k, v)?,
            "rel_tol" => ic.rel_tol = parse(k, v)?,
            "abs_tol" => ic.abs_tol = parse(k, v)?,
            "max_step" => ic.max_step = parse(k, v)?,
            "r_min" => ic.r_min = parse(k, v)?,
            "escape_radius" => ic.escape_radius = parse(k, v)?,
            "max_arclength" => ic.max_arclength = parse(k, v)?,
            "max_axis_crossings" => ic.max_axis_crossings = parse(k, v)?,
            "max_steps" => ic.max_steps = parse(k, v)?,
            _ => unreachable!("keys checked by parse_file"),
        }
        Ok(())
    }
}

fn read(p: &Path) -> Result<Vec<(String, String)>, UsageError> {
    let text =
        fs::read_to_string(p).map_err(|e| UsageError(format!("config {}: {e}", p.display())))?;
    parse_file(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_syntax() {
        let kv = parse_file("# comment\nrel_tol = 1e-10\n\n max-step=0.1 # trailing\n").unwrap();
        assert_eq!(
            kv,
            vec![
                ("rel_tol".into(), "1e-10".into()),
                ("max_step".into(), "0.1".into())
            ]
        );
        assert!(parse_file("nonsense").is_err());
        assert!(parse_file("colour = red").is_err());
    }

    #[test]
    fn flags_beat_file_beat_defaults() {
        let dir = std::env::temp_dir().join(format!("angenent-settings-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let path = dir.join("run.conf");
        fs::write(&path, "rel_tol = 1e-9\nabs_tol = 1e-10\nformat = json\n").unwrap();
        let flags = Common {
            config: Some(path),
            rel_tol: Some(1e-8),
            ..Default::default()
        };
        let rc = RunConfig::resolve(&flags).unwrap();
        assert_eq!(rc.integrator.rel_tol, 1e-8);
        assert_eq!(rc.integrator.abs_tol, 1e-10);
        assert_eq!(rc.integrator.max_step, IntegratorConfig::default().max_step);
        assert_eq!(rc.format, Format::Json);
        assert_eq!(rc.jobs, 1);
        fs::remove_dir_all(dir).unwrap();
    }

    #[test]
    fn invalid_integrator_settings_rejected() {
        let flags = Common {
            rel_tol: Some(-1.0),
            ..Default::default()
        };
        assert!(RunConfig::resolve(&flags).is_err());
    }
}
