use std::path::{Path, PathBuf};

use mixtri_core::TriangleSpec;

use crate::args::Globals;
use crate::CliError;

/// Global options after merging the config file under the flags.
#[derive(Debug, Clone, PartialEq)]
pub struct Settings {
    pub alpha_deg: Option<f64>,
    pub beta_deg: Option<f64>,
    pub n: usize,
    pub grading: Option<f64>,
    pub tol: f64,
    pub seed: u64,
    pub out: PathBuf,
    pub workers: Option<usize>,
}

impl Settings {
    pub fn spec(&self) -> Result<TriangleSpec, CliError> {
        match (self.alpha_deg, self.beta_deg) {
            (Some(a), Some(b)) => Ok(mixtri_core::make_triangle_deg(a, b)?),
            _ => Err(CliError::Usage("--alpha-deg and --beta-deg are required".into())),
        }
    }

    /// `<alpha>x<beta>` directory label.
    pub fn label(&self) -> String {
        format!(
            "{}x{}",
            self.alpha_deg.unwrap_or(f64::NAN),
            self.beta_deg.unwrap_or(f64::NAN)
        )
    }
}

fn parse<T: std::str::FromStr>(path: &Path, line: usize, key: &str, v: &str) -> Result<T, CliError> {
    v.parse().map_err(|_| CliError::Config {
        path: path.to_path_buf(),
        line,
        msg: format!("bad value for {key}: {v:?}"),
    })
}

/// Fills the unset fields of `g` from `key = value` lines.
pub fn apply_config(g: &mut Globals, path: &Path, text: &str) -> Result<(), CliError> {
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let s = raw.split('#').next().unwrap_or("").trim();
        if s.is_empty() {
            continue;
        }
        let (k, v) = s.split_once('=').ok_or_else(|| CliError::Config {
            path: path.to_path_buf(),
            line,
            msg: format!("expected `key = value`, got {s:?}"),
        })?;
        let key = k.trim().replace('_', "-");
        let v = v.trim();
        match key.as_str() {
            "alpha-deg" => g.alpha_deg = g.alpha_deg.or(Some(parse(path, line, &key, v)?)),
            "beta-deg" => g.beta_deg = g.beta_deg.or(Some(parse(path, line, &key, v)?)),
            "n" => g.n = g.n.or(Some(parse(path, line, &key, v)?)),
            "grading" => g.grading = g.grading.or(Some(parse(path, line, &key, v)?)),
            "tol" => g.tol = g.tol.or(Some(parse(path, line, &key, v)?)),
            "seed" => g.seed = g.seed.or(Some(parse(path, line, &key, v)?)),
            "out" => g.out = g.out.clone().or(Some(PathBuf::from(v))),
            "workers" => g.workers = g.workers.or(Some(parse(path, line, &key, v)?)),
            _ => {
                return Err(CliError::Config {
                    path: path.to_path_buf(),
                    line,
                    msg: format!("unknown key {key:?}"),
                })
            }
        }
    }
    Ok(())
}

pub fn resolve(mut g: Globals) -> Result<Settings, CliError> {
    if let Some(path) = g.config.clone() {
        let text = std::fs::read_to_string(&path).map_err(|source| CliError::Io {
            path: path.clone(),
            source,
        })?;
        apply_config(&mut g, &path, &text)?;
    }
    let n = g.n.unwrap_or(64);
    if n == 0 {
        return Err(CliError::Usage("--n must be positive".into()));
    }
    if g.workers == Some(0) {
        return Err(CliError::Usage("--workers must be positive".into()));
    }
    Ok(Settings {
        alpha_deg: g.alpha_deg,
        beta_deg: g.beta_deg,
        n,
        grading: g.grading,
        tol: g.tol.unwrap_or(1e-8),
        seed: g.seed.unwrap_or(0),
        out: g.out.unwrap_or_else(|| PathBuf::from("out")),
        workers: g.workers,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flags_override_file() {
        let mut g = Globals {
            n: Some(32),
            ..Globals::default()
        };
        let text = "# defaults\nalpha-deg = 48\nbeta_deg = 33  # upper\n\nn = 96\nout = results\n";
        apply_config(&mut g, Path::new("c.txt"), text).unwrap();
        let s = resolve(g).unwrap();
        assert_eq!((s.alpha_deg, s.beta_deg, s.n), (Some(48.0), Some(33.0), 32));
        assert_eq!(s.out, PathBuf::from("results"));
        assert_eq!(s.label(), "48x33");
        assert!(s.spec().is_ok());
    }

    #[test]
    fn bad_lines() {
        let mut g = Globals::default();
        let e = apply_config(&mut g, Path::new("c"), "n = 1\nbogus = 2\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 2, .. }));
        let e = apply_config(&mut g, Path::new("c"), "tol 3\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 1, .. }));
        let e = apply_config(&mut Globals::default(), Path::new("c"), "n = many\n").unwrap_err();
        assert!(matches!(e, CliError::Config { line: 1, .. }));
        assert!(matches!(
            resolve(Globals::default()).unwrap().spec(),
            Err(CliError::Usage(_))
        ));
    }
}
