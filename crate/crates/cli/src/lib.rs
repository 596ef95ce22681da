//! The `mixtri` command line.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod args;
mod commands;
mod config;
mod output;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::error::ErrorKind;
use clap::Parser;
use thiserror::Error;

use mixtri_core::fem::FemError;
use mixtri_core::geometry::GeometryError;
use mixtri_core::mesh::MeshError;
use mixtri_core::qualify::QualifyError;
use mixtri_core::sweep::SweepError;

pub use args::{Cli, Command, Globals};
pub use config::{apply_config, resolve, Settings};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}:{line}: {msg}")]
    Config { path: PathBuf, line: usize, msg: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Fem(#[from] FemError),
    #[error(transparent)]
    Qualify(#[from] QualifyError),
    #[error(transparent)]
    Sweep(#[from] SweepError),
}

/// Runs the command line and returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    let start = Instant::now();
    let outcome = resolve(cli.globals).and_then(|s| match &cli.command {
        Command::Geom(a) => commands::geom(&s, a),
        Command::Mesh => commands::mesh(&s),
        Command::Eigen => commands::eigen(&s),
        Command::Semilinear(a) => commands::semilinear(&s, a),
        Command::Verify(a) => commands::verify(&s, a),
        Command::Sweep(a) => commands::sweep(&s, a),
        Command::Continue(a) => commands::continuation(&s, a),
    });
    match outcome {
        Ok(o) => {
            let mut out = std::io::stdout().lock();
            // a closed pipe downstream is not an error of ours
            let _ = write!(out, "{}", o.summary).and_then(|_| writeln!(out, "output = {}", o.dir.display()));
            eprintln!("elapsed {:.3} s", start.elapsed().as_secs_f64());
            if o.pass {
                0
            } else {
                2
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
