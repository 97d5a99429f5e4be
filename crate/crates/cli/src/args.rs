use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use psls::{LbfParams, Params};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Ours,
    Lbf,
}

/// Initial contour as given on the command line. Mask files are read later.
#[derive(Debug, Clone, PartialEq)]
pub enum InitArg {
    Circle {
        cx: f64,
        cy: f64,
        r: f64,
    },
    Rect {
        x0: usize,
        y0: usize,
        x1: usize,
        y1: usize,
    },
    Mask(PathBuf),
}

fn numbers<T: FromStr>(text: &str, n: usize, form: &str) -> Result<Vec<T>, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != n {
        return Err(format!("expected {form}"));
    }
    parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<T>()
                .map_err(|_| format!("bad number {p:?} in {form}"))
        })
        .collect()
}

impl FromStr for InitArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (kind, rest) = s.split_once(':').ok_or_else(|| {
            format!("expected circle:CX,CY,R, rect:X0,Y0,X1,Y1 or mask:PATH, got {s:?}")
        })?;
        match kind {
            "circle" => {
                let v: Vec<f64> = numbers(rest, 3, "circle:CX,CY,R")?;
                Ok(InitArg::Circle {
                    cx: v[0],
                    cy: v[1],
                    r: v[2],
                })
            }
            "rect" => {
                let v: Vec<usize> = numbers(rest, 4, "rect:X0,Y0,X1,Y1")?;
                Ok(InitArg::Rect {
                    x0: v[0],
                    y0: v[1],
                    x1: v[2],
                    y1: v[3],
                })
            }
            "mask" if !rest.is_empty() => Ok(InitArg::Mask(PathBuf::from(rest))),
            "mask" => Err("mask: needs a path".into()),
            other => Err(format!("unknown contour kind {other:?}")),
        }
    }
}

/// Level-set segmentation of a grayscale image.
#[derive(Debug, Clone, Parser)]
#[command(name = "psls", version, allow_negative_numbers = true)]
pub struct Cli {
    /// Grayscale input image (PGM P5 or PNG).
    #[arg(long, value_name = "PATH")]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Ours)]
    pub method: Method,
    /// circle:CX,CY,R | rect:X0,Y0,X1,Y1 | mask:PATH. Defaults to a centred
    /// circle with radius a quarter of the shorter side.
    #[arg(long, value_name = "SPEC")]
    pub init: Option<InitArg>,
    /// Kernel scale, restricted to [1, 2] unless overridden.
    #[arg(long, default_value_t = 1.5)]
    pub t: f64,
    #[arg(long, default_value_t = 0.02)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.001 * 255.0 * 255.0)]
    pub nu: f64,
    #[arg(long, default_value_t = 0.02)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.025)]
    pub dt: f64,
    #[arg(long, default_value_t = 1.0)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 2.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub tol: f64,
    #[arg(long, default_value_t = 10)]
    pub patience: usize,
    #[arg(long, default_value_t = 1.0)]
    pub lambda1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub lambda2: f64,
    /// Overlay image (PNG, or PPM when the name ends in .ppm).
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Per-iteration metrics CSV.
    #[arg(long, value_name = "PATH")]
    pub metrics: Option<PathBuf>,
    /// Run both methods and print a timing comparison.
    #[arg(long)]
    pub benchmark: bool,
    /// Timed repetitions per method in benchmark mode.
    #[arg(long, default_value_t = 3)]
    pub repeats: usize,
    /// Accept a kernel scale outside [1, 2].
    #[arg(long)]
    pub allow_t_out_of_range: bool,
}

impl Cli {
    pub fn params(&self) -> CliResult<Params> {
        if !self.allow_t_out_of_range && !(1.0..=2.0).contains(&self.t) {
            return Err(CliError::Usage(format!(
                "--t {} is outside [1, 2]; pass --allow-t-out-of-range to override",
                self.t
            )));
        }
        let p = Params {
            alpha: self.alpha,
            nu: self.nu,
            mu: self.mu,
            dt: self.dt,
            t: self.t,
            epsilon: self.epsilon,
            c0: self.c0,
            max_iters: self.max_iters,
            tol: self.tol,
            patience: self.patience,
            ..Params::default()
        };
        p.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(p)
    }

    pub fn lbf_params(&self) -> CliResult<LbfParams> {
        let lp = LbfParams {
            lambda1: self.lambda1,
            lambda2: self.lambda2,
        };
        lp.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(lp)
    }
}
