//! Run configuration: a TOML or JSON file, or the `# config:` line of an earlier output file,
//! overlaid by command-line flags.

use std::path::{Path, PathBuf};

use clap::Args;
use nifs_core::nifs::{MapSchedule, ParameterRegion};
use nifs_core::Complex64;
use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Catalog key or path to a family file.
    pub family: String,
    /// Single parameters, each `"re,im"`.
    pub t: Vec<String>,
    /// `"re_lo,re_hi,im_lo,im_hi,step"`.
    pub grid: Option<String>,
    /// `"re,im;re,im;steps"`.
    pub path: Option<String>,
    pub depth: Option<usize>,
    pub tol: Option<f64>,
    pub points: Option<usize>,
    pub seed: u64,
    pub out: PathBuf,
    pub level: Option<usize>,
    pub s: Option<f64>,
    pub eps: Option<f64>,
    pub trials: Option<usize>,
    pub restarts: Option<usize>,
    pub levels: Option<usize>,
    pub pairs: Option<usize>,
    /// `"re,im,radius"`.
    pub disk: Option<String>,
    pub clip: Option<f64>,
    pub mask_radius: Option<f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            family: "paper-example".into(),
            t: Vec::new(),
            grid: None,
            path: None,
            depth: None,
            tol: None,
            points: None,
            seed: 0,
            out: PathBuf::from("out"),
            level: None,
            s: None,
            eps: None,
            trials: None,
            restarts: None,
            levels: None,
            pairs: None,
            disk: None,
            clip: None,
            mask_radius: None,
        }
    }
}

/// Flags shared by every subcommand; any flag given overrides the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// Config file (TOML, JSON, or an earlier output file with a `# config:` header line).
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Catalog key (paper-example, cantor, random-affine:<seed>) or family file path.
    #[arg(long)]
    pub family: Option<String>,
    /// Parameter as "re,im"; repeatable.
    #[arg(long = "t", allow_hyphen_values = true)]
    pub t: Vec<String>,
    /// Parameter grid "re_lo,re_hi,im_lo,im_hi,step".
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Parameter path "re,im;re,im;steps" (sweep).
    #[arg(long, allow_hyphen_values = true)]
    pub path: Option<String>,
    /// Depth: pressure depth, or condition-check depth.
    #[arg(long)]
    pub depth: Option<usize>,
    /// Address truncation tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Points per cloud.
    #[arg(long)]
    pub points: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory (created if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Gibbs level n.
    #[arg(long)]
    pub level: Option<usize>,
    /// Gibbs exponent (default: the Bowen dimension at t).
    #[arg(long)]
    pub s: Option<f64>,
    /// Render cell size.
    #[arg(long)]
    pub eps: Option<f64>,
    /// Double-zero search trials (transversality).
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Largest level of the transversality scan.
    #[arg(long)]
    pub levels: Option<usize>,
    /// Stream pairs per level in the transversality scan.
    #[arg(long)]
    pub pairs: Option<usize>,
    /// Transversality region "re,im,radius".
    #[arg(long, allow_hyphen_values = true)]
    pub disk: Option<String>,
    /// Largest |t| kept in the transversality region.
    #[arg(long)]
    pub clip: Option<f64>,
    /// Radius of the exported sublevel mask (transversality).
    #[arg(long)]
    pub mask_radius: Option<f64>,
}

fn config_error(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
    if let Some(line) = text.lines().find_map(|l| l.strip_prefix("# config: ")) {
        return serde_json::from_str(line)
            .map_err(|e| config_error(format!("bad config header in {}: {e}", path.display())));
    }
    if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text)
            .map_err(|e| config_error(format!("bad config {}: {e}", path.display())))
    } else {
        toml::from_str(&text).map_err(|e| config_error(format!("bad config {}: {e}", path.display())))
    }
}

impl Flags {
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let mut c = match &self.config {
            Some(path) => load_config(path)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {
                $(if let Some(v) = &self.$field { c.$field = Some(v.clone()); })*
            };
        }
        if let Some(f) = &self.family {
            c.family = f.clone();
        }
        if !self.t.is_empty() {
            c.t = self.t.clone();
        }
        if let Some(seed) = self.seed {
            c.seed = seed;
        }
        if let Some(out) = &self.out {
            c.out = out.clone();
        }
        take!(grid, path, depth, tol, points, level, s, eps, trials, restarts, levels, pairs, disk, clip, mask_radius);
        Ok(c)
    }
}

fn numbers(text: &str, expected: usize, what: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != expected {
        return Err(config_error(format!(
            "{what} {text:?}: expected {expected} comma-separated numbers"
        )));
    }
    parts
        .iter()
        .map(|p| {
            p.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| config_error(format!("{what} {text:?}: {p:?} is not a number")))
        })
        .collect()
}

/// `"re,im"` or a bare real `"re"`.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    if text.contains(',') {
        let v = numbers(text, 2, "parameter")?;
        Ok(Complex64::new(v[0], v[1]))
    } else {
        Ok(Complex64::new(numbers(text, 1, "parameter")?[0], 0.0))
    }
}

pub fn parse_grid(text: &str) -> Result<Vec<Complex64>, CliError> {
    let v = numbers(text, 5, "grid")?;
    let (re_lo, re_hi, im_lo, im_hi, step) = (v[0], v[1], v[2], v[3], v[4]);
    if !(step > 0.0) || re_hi < re_lo || im_hi < im_lo {
        return Err(config_error(format!("grid {text:?}: need lo <= hi and step > 0")));
    }
    let count = |lo: f64, hi: f64| ((hi - lo) / step + 1e-9).floor() as usize + 1;
    let (nr, ni) = (count(re_lo, re_hi), count(im_lo, im_hi));
    if nr * ni > 1_000_000 {
        return Err(config_error(format!("grid {text:?} has more than 10^6 points")));
    }
    Ok((0..ni)
        .flat_map(|j| {
            (0..nr).map(move |i| Complex64::new(re_lo + i as f64 * step, im_lo + j as f64 * step))
        })
        .collect())
}

pub fn parse_path(text: &str) -> Result<(Complex64, Complex64, usize), CliError> {
    let parts: Vec<&str> = text.split(';').collect();
    if parts.len() != 3 {
        return Err(config_error(format!("path {text:?}: expected \"re,im;re,im;steps\"")));
    }
    let steps = parts[2]
        .trim()
        .parse()
        .map_err(|_| config_error(format!("path {text:?}: bad step count")))?;
    Ok((parse_complex(parts[0])?, parse_complex(parts[1])?, steps))
}

pub fn parse_disk(text: &str) -> Result<(Complex64, f64), CliError> {
    let v = numbers(text, 3, "disk")?;
    if !(v[2] > 0.0) {
        return Err(config_error(format!("disk {text:?}: radius must be positive")));
    }
    Ok((Complex64::new(v[0], v[1]), v[2]))
}

impl RunConfig {
    pub fn schedule(&self) -> Result<MapSchedule, CliError> {
        nifs_core::catalog::resolve(&self.family).map_err(|e| config_error(e.to_string()))
    }

    /// Grid if given, else the `t` list; families without parameter constraints default to 0.
    pub fn parameters(&self, schedule: &MapSchedule) -> Result<Vec<Complex64>, CliError> {
        if let Some(grid) = &self.grid {
            return parse_grid(grid);
        }
        if !self.t.is_empty() {
            return self.t.iter().map(|t| parse_complex(t)).collect();
        }
        if schedule.region == ParameterRegion::Unconstrained {
            return Ok(vec![Complex64::new(0.0, 0.0)]);
        }
        Err(config_error(format!(
            "no parameter given: pass --t or --grid (region {})",
            schedule.region.description()
        )))
    }

    pub fn single_parameter(&self, schedule: &MapSchedule) -> Result<Complex64, CliError> {
        let params = self.parameters(schedule)?;
        if params.len() != 1 {
            return Err(config_error("this command takes exactly one parameter"));
        }
        Ok(params[0])
    }
}
