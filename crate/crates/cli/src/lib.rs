//! Command-line front-end: image I/O, overlays, metrics CSV and the
//! two-method benchmark.

pub mod args;
pub mod bench;
pub mod error;
pub mod image_io;
pub mod metrics;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use psls::{ContourSpec, RunResult, ScalarField};

pub use args::{Cli, InitArg, Method};
pub use bench::{benchmark, BenchReport};
pub use error::{CliError, CliResult};

fn contour(init: Option<&InitArg>, image: &ScalarField) -> CliResult<ContourSpec> {
    let (w, h) = (image.width(), image.height());
    Ok(match init {
        None => ContourSpec::Circle {
            cx: (w - 1) as f64 / 2.0,
            cy: (h - 1) as f64 / 2.0,
            r: w.min(h) as f64 / 4.0,
        },
        Some(InitArg::Circle { cx, cy, r }) => ContourSpec::Circle {
            cx: *cx,
            cy: *cy,
            r: *r,
        },
        Some(&InitArg::Rect { x0, y0, x1, y1 }) => ContourSpec::Rect { x0, y0, x1, y1 },
        Some(InitArg::Mask(path)) => ContourSpec::Mask(image_io::load_mask(path)?),
    })
}

fn write_outputs(cli: &Cli, image: &ScalarField, result: &RunResult) -> CliResult<()> {
    if let Some(path) = &cli.out {
        image_io::save_overlay(image, &result.initial_mask, &result.mask, path)?;
    }
    if let Some(path) = &cli.metrics {
        metrics::write_metrics(&result.metrics, path)?;
    }
    Ok(())
}

/// Runs a parsed command, writing the report to `out`.
pub fn execute(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    let params = cli.params()?;
    let lp = cli.lbf_params()?;
    let image = image_io::load_image(&cli.input)?;
    let spec = contour(cli.init.as_ref(), &image)?;
    spec.validate(image.width(), image.height())
        .map_err(|e| CliError::Usage(format!("--init: {e}")))?;
    let stdout_err = |e| CliError::io(std::path::Path::new("<stdout>"), e);

    if cli.benchmark {
        let report = benchmark(&image, &spec, &params, &lp, cli.repeats)?;
        let chosen = match cli.method {
            Method::Ours => &report.ours_result,
            Method::Lbf => &report.lbf_result,
        };
        write_outputs(cli, &image, chosen)?;
        writeln!(out, "{report}").map_err(stdout_err)?;
        return Ok(());
    }

    let result = match cli.method {
        Method::Ours => psls::run(&image, &spec, &params)?,
        Method::Lbf => psls::lbf_run(&image, &spec, &params, &lp)?,
    };
    write_outputs(cli, &image, &result)?;
    writeln!(
        out,
        "iterations: {}\nstop: {:?}\nconvolutions: {}\nseconds: {:.6}\ninside pixels: {}",
        result.iterations,
        result.stop_reason,
        result.total_convolutions,
        result.total_seconds,
        result.mask.count()
    )
    .map_err(stdout_err)
}

/// Parses `argv` (program name first), runs, and returns the exit code:
/// 0 on success, 2 on usage errors, 1 on runtime errors.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("psls: {e}");
            if matches!(e, CliError::Usage(_)) {
                eprintln!("run `psls --help` for usage");
            }
            e.exit_code()
        }
    }
}
