//! Run configuration: a flat dotted key-value file (or the equivalent JSON
//! object) describing the solution, the sampling grid, the quadrature and
//! the tolerance scale.

use std::collections::HashMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use phlo_core::coulomb::{ChargeConfig, CoulombQuadrature};
use phlo_core::fields::{AxisSpec, GridSpec, QuadratureSpec, Rule};
use phlo_core::phlo::{support_box_of, SolutionSpec};

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub solution: SolutionSpec,
    /// Optional override of the phase advance scale; a value different from
    /// the solution scale produces a deliberately broken field.
    pub psi_l0: Option<f64>,
    pub grid: GridSpec,
    pub quad: QuadratureSpec,
    pub tolerance_scale: f64,
    pub coulomb: CoulombSettings,
}

#[derive(Debug, Clone, Copy)]
pub struct CoulombSettings {
    pub charges: ChargeConfig,
    pub box_half_width: f64,
}

/// Load a configuration file: JSON when the content starts with a brace,
/// `key = value` lines otherwise.
pub fn load_pairs(path: &Path) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    if text.trim_start().starts_with('{') {
        let value: serde_json::Value =
            serde_json::from_str(&text).context("config is not valid JSON")?;
        let mut out = HashMap::new();
        flatten_json("", &value, &mut out)?;
        Ok(out)
    } else {
        let mut out = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!("config line {} has no '=': {line}", lineno + 1);
            };
            out.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(out)
    }
}

fn flatten_json(
    prefix: &str,
    value: &serde_json::Value,
    out: &mut HashMap<String, String>,
) -> Result<()> {
    match value {
        serde_json::Value::Object(map) => {
            for (k, v) in map {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten_json(&key, v, out)?;
            }
        }
        serde_json::Value::String(s) => {
            out.insert(prefix.to_string(), s.clone());
        }
        serde_json::Value::Number(n) => {
            out.insert(prefix.to_string(), n.to_string());
        }
        serde_json::Value::Bool(b) => {
            out.insert(prefix.to_string(), b.to_string());
        }
        other => bail!("unsupported JSON value at {prefix}: {other}"),
    }
    Ok(())
}

fn section(pairs: &HashMap<String, String>, name: &str) -> HashMap<String, String> {
    let prefix = format!("{name}.");
    pairs
        .iter()
        .filter_map(|(k, v)| {
            k.strip_prefix(&prefix)
                .map(|rest| (rest.to_string(), v.clone()))
        })
        .collect()
}

fn parse_number(pairs: &HashMap<String, String>, key: &str, default: f64) -> Result<f64> {
    match pairs.get(key) {
        Some(v) => v
            .trim()
            .parse::<f64>()
            .with_context(|| format!("bad number for {key}: {v}")),
        None => Ok(default),
    }
}

fn parse_axis(value: &str, key: &str) -> Result<AxisSpec> {
    let parts: Vec<&str> = value.split(',').map(str::trim).collect();
    if parts.len() != 3 {
        bail!("{key} must be min,max,count; got {value}");
    }
    Ok(AxisSpec::new(
        parts[0].parse().with_context(|| format!("{key} min"))?,
        parts[1].parse().with_context(|| format!("{key} max"))?,
        parts[2].parse().with_context(|| format!("{key} count"))?,
    ))
}

impl RunConfig {
    pub fn from_pairs(pairs: &HashMap<String, String>) -> Result<RunConfig> {
        let solution = SolutionSpec::from_pairs(&section(pairs, "solution"))
            .context("invalid solution section")?;
        let psi_l0 = match pairs.get("solution.psi_l0") {
            Some(v) => Some(v.trim().parse::<f64>().context("bad solution.psi_l0")?),
            None => None,
        };

        // default grid: the support box at the initial slice, padded, with
        // a few slices of one window of the fourth coordinate
        let support = support_box_of(&solution, 0.0);
        let pad = 0.1 * solution.disk_radius;
        let axis_default = |i: usize, count: usize| {
            AxisSpec::new(support.min[i] - pad, support.max[i] + pad, count)
        };
        let mut grid = GridSpec {
            x: axis_default(0, 21),
            y: axis_default(1, 21),
            z: axis_default(2, 21),
            xi: AxisSpec::new(0.0, solution.window_length(), 3),
        };
        for (key, axis) in [("grid.x", 0), ("grid.y", 1), ("grid.z", 2), ("grid.xi", 3)] {
            if let Some(v) = pairs.get(key) {
                let spec = parse_axis(v, key)?;
                match axis {
                    0 => grid.x = spec,
                    1 => grid.y = spec,
                    2 => grid.z = spec,
                    _ => grid.xi = spec,
                }
            }
        }
        grid.validate().context("invalid grid")?;

        let resolution = parse_number(pairs, "quad.resolution", 61.0)? as usize;
        let rule = match pairs.get("quad.rule").map(|s| s.trim()) {
            None | Some("simpson") => Rule::Simpson,
            Some("midpoint") => Rule::Midpoint,
            Some(other) => bail!("unknown quadrature rule {other}"),
        };
        let quad = QuadratureSpec {
            region: phlo_core::fields::Region::CompactSupport,
            rule,
            resolution: [resolution; 3],
        };
        quad.validate().context("invalid quadrature")?;

        let tolerance_scale = parse_number(pairs, "verify.tolerance_scale", 1.0)?;
        if !(tolerance_scale > 0.0) {
            bail!("verify.tolerance_scale must be positive");
        }

        let c = section(pairs, "coulomb");
        let separation = parse_number(&c, "separation", 2.0)?;
        let ball_radius = parse_number(&c, "ball_radius", 0.1)?;
        let charges = ChargeConfig::on_axis(
            parse_number(&c, "q1", 1.0)?,
            parse_number(&c, "q2", 1.0)?,
            separation,
            ball_radius,
        );
        let coulomb = CoulombSettings {
            charges,
            box_half_width: parse_number(&c, "box_half_width", 40.0)?,
        };

        Ok(RunConfig {
            solution,
            psi_l0,
            grid,
            quad,
            tolerance_scale,
            coulomb,
        })
    }

    /// Apply the grid point-count override `nx,ny,nz,nt`.
    pub fn override_grid_counts(&mut self, counts: &str) -> Result<()> {
        let parts: Vec<usize> = counts
            .split(',')
            .map(|s| s.trim().parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .context("grid override must be nx,ny,nz,nt")?;
        if parts.len() != 4 {
            bail!("grid override must have four counts, got {counts}");
        }
        self.grid.x.count = parts[0];
        self.grid.y.count = parts[1];
        self.grid.z.count = parts[2];
        self.grid.xi.count = parts[3];
        self.grid.validate().context("invalid grid override")?;
        Ok(())
    }

    pub fn coulomb_quadrature(&self) -> CoulombQuadrature {
        CoulombQuadrature::default_for(&self.coulomb.charges, self.coulomb.box_half_width)
    }
}
