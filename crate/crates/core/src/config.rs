//! Flat `key = value` configuration files for [`PipelineConfig`].
//!
//! Keys match the config field names; simulation and Monte Carlo fields
//! carry `sim.` and `mc.` prefixes. `#` starts a comment.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::model::ModelKind;
use crate::pipeline::PipelineConfig;

/// Key/value pairs in file order, with their 1-based line numbers.
pub fn parse_pairs(text: &str) -> Result<Vec<(usize, String, String)>> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
            line: idx + 1,
            reason: format!("expected `key = value`, got `{line}`"),
        })?;
        out.push((idx + 1, k.trim().to_string(), v.trim().to_string()));
    }
    Ok(out)
}

fn num<T: std::str::FromStr>(key: &str, v: &str) -> Result<T> {
    v.parse::<T>()
        .map_err(|_| Error::config(key, format!("cannot parse `{v}`")))
}

/// Sets one field by its flat key name.
pub fn apply(cfg: &mut PipelineConfig, key: &str, value: &str) -> Result<()> {
    match key {
        "model" => cfg.model = value.parse()?,
        "sub" => cfg.sub = num(key, value)?,
        "block_size" => cfg.block_size = num(key, value)?,
        "stride" => cfg.stride = num(key, value)?,
        "detrend" => cfg.detrend = value.parse()?,
        "se_method" => cfg.se_method = value.parse()?,
        "stop_rule" => cfg.stop_rule = value.parse()?,
        "sim.epsilon" => cfg.sim.epsilon = num(key, value)?,
        "sim.r" => cfg.sim.r = num(key, value)?,
        "sim.dt" => cfg.sim.dt = num(key, value)?,
        "sim.lambda0" => cfg.sim.lambda0 = num(key, value)?,
        "sim.alpha_x" => cfg.sim.alpha_x = num(key, value)?,
        "sim.alpha_y" => cfg.sim.alpha_y = num(key, value)?,
        "sim.omega" => cfg.sim.omega = num(key, value)?,
        "sim.tspan" => cfg.sim.tspan = num(key, value)?,
        "sim.seed" => cfg.sim.seed = num(key, value)?,
        "sim.noise_scaling" => cfg.sim.noise_scaling = value.parse()?,
        "mc.n_samples" => cfg.mc.n_samples = num(key, value)?,
        "mc.seed" => cfg.mc.seed = num(key, value)?,
        "mc.max_discard_fraction" => cfg.mc.max_discard_fraction = num(key, value)?,
        other => return Err(Error::config(other, "unknown configuration key")),
    }
    Ok(())
}

/// A parsed configuration together with non-fatal warnings.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: PipelineConfig,
    pub warnings: Vec<String>,
}

/// Parses a config file on top of a preset.
///
/// The preset is chosen by `model` (the caller's override wins over the
/// file's own `model` key); other keys then override preset values.
pub fn load(text: &str, model_override: Option<ModelKind>) -> Result<LoadedConfig> {
    let pairs = parse_pairs(text)?;
    let file_model = pairs
        .iter()
        .find(|(_, k, _)| k == "model")
        .map(|(_, _, v)| v.parse::<ModelKind>())
        .transpose()?;
    let model = model_override.or(file_model).unwrap_or(ModelKind::Fold);
    let mut config = PipelineConfig::preset(model);
    let mut warnings = Vec::new();
    for (line, k, v) in &pairs {
        if k == "model" {
            continue;
        }
        if (k == "sim.epsilon" || k == "sim.noise_scaling") && !model.has_epsilon() {
            warnings.push(format!("line {line}: {k} is ignored by the {model} model"));
        }
        apply(&mut config, k, v)?;
    }
    Ok(LoadedConfig { config, warnings })
}

/// Renders a configuration in the file format accepted by [`load`].
pub fn render(cfg: &PipelineConfig) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "model = {}", cfg.model);
    let _ = writeln!(s, "sub = {}", cfg.sub);
    let _ = writeln!(s, "block_size = {}", cfg.block_size);
    let _ = writeln!(s, "stride = {}", cfg.stride);
    let _ = writeln!(s, "detrend = {}", cfg.detrend);
    let _ = writeln!(s, "se_method = {}", cfg.se_method);
    let _ = writeln!(s, "stop_rule = {}", cfg.stop_rule);
    if cfg.model.has_epsilon() {
        let _ = writeln!(s, "sim.epsilon = {}", cfg.sim.epsilon);
    }
    let _ = writeln!(s, "sim.r = {}", cfg.sim.r);
    let _ = writeln!(s, "sim.dt = {}", cfg.sim.dt);
    let _ = writeln!(s, "sim.lambda0 = {}", cfg.sim.lambda0);
    let _ = writeln!(s, "sim.alpha_x = {}", cfg.sim.alpha_x);
    let _ = writeln!(s, "sim.alpha_y = {}", cfg.sim.alpha_y);
    let _ = writeln!(s, "sim.omega = {}", cfg.sim.omega);
    let _ = writeln!(s, "sim.tspan = {}", cfg.sim.tspan);
    let _ = writeln!(s, "sim.seed = {}", cfg.sim.seed);
    if cfg.model.has_epsilon() {
        let _ = writeln!(s, "sim.noise_scaling = {}", cfg.sim.noise_scaling);
    }
    let _ = writeln!(s, "mc.n_samples = {}", cfg.mc.n_samples);
    let _ = writeln!(s, "mc.seed = {}", cfg.mc.seed);
    let _ = writeln!(
        s,
        "mc.max_discard_fraction = {}",
        cfg.mc.max_discard_fraction
    );
    s
}

/// The reference parameter table, one column per model.
pub fn presets_table() -> String {
    let cols: Vec<PipelineConfig> = ModelKind::ALL
        .iter()
        .map(|&k| PipelineConfig::preset(k))
        .collect();
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:<40} {:>8} {:>17} {:>14}",
        "Parameter", "Meaning", "Fold", "Subcritical Hopf", "Singular Hopf"
    );
    let row = |s: &mut String, p: &str, m: &str, vals: [String; 3]| {
        let _ = writeln!(
            s,
            "{:<10} {:<40} {:>8} {:>17} {:>14}",
            p, m, vals[0], vals[1], vals[2]
        );
    };
    let each = |f: &dyn Fn(&PipelineConfig) -> String| [f(&cols[0]), f(&cols[1]), f(&cols[2])];
    row(
        &mut s,
        "epsilon",
        "Time scale separation",
        each(&|c| {
            if c.model.has_epsilon() {
                c.sim.epsilon.to_string()
            } else {
                format!("({})", c.sim.epsilon)
            }
        }),
    );
    row(&mut s, "r", "Ramping rate", each(&|c| c.sim.r.to_string()));
    row(
        &mut s,
        "dt",
        "Simulation time step",
        each(&|c| c.sim.dt.to_string()),
    );
    row(
        &mut s,
        "lambda0",
        "Initial value of lambda",
        each(&|c| format!("{:.1}", c.sim.lambda0)),
    );
    row(
        &mut s,
        "alpha_x",
        "Noise amplitude on the x variable",
        each(&|c| c.sim.alpha_x.to_string()),
    );
    row(
        &mut s,
        "alpha_y",
        "Noise amplitude on the y variable",
        each(&|c| c.sim.alpha_y.to_string()),
    );
    row(
        &mut s,
        "omega",
        "Rotational frequency",
        each(&|c| {
            if c.model == ModelKind::SubcriticalHopf {
                c.sim.omega.to_string()
            } else {
                "-".into()
            }
        }),
    );
    row(
        &mut s,
        "Tspan",
        "Length of simulation",
        each(&|c| c.sim.tspan.to_string()),
    );
    row(&mut s, "Sub", "Sampling rate", each(&|c| c.sub.to_string()));
    row(
        &mut s,
        "Block Size",
        "Number of points in observation window",
        each(&|c| c.block_size.to_string()),
    );
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::StopRule;

    #[test]
    fn render_and_load_round_trip() {
        for k in ModelKind::ALL {
            let cfg = PipelineConfig::preset(k).with_seed(17);
            let loaded = load(&render(&cfg), None).unwrap();
            assert_eq!(loaded.config, cfg);
            assert!(loaded.warnings.is_empty());
        }
    }

    #[test]
    fn comments_and_overrides() {
        let text = "# fold run\nmodel = fold\nstride = 5   # faster\nstop_rule = departure(0.2)\n";
        let c = load(text, None).unwrap().config;
        assert_eq!(c.stride, 5);
        assert_eq!(c.stop_rule, StopRule::Departure(Some(0.2)));
        assert_eq!(c.block_size, 1250);
    }

    #[test]
    fn unknown_key_is_named() {
        match load("blocksize = 10\n", None) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "blocksize"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn bad_value_is_named() {
        match load("stride = many\n", None) {
            Err(Error::InvalidConfig { field, .. }) => assert_eq!(field, "stride"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn hopf_epsilon_warns() {
        let loaded = load("model = subcritical_hopf\nsim.epsilon = 0.5\n", None).unwrap();
        assert_eq!(loaded.warnings.len(), 1);
    }

    #[test]
    fn table_lists_all_columns() {
        let t = presets_table();
        assert!(t.contains("1250") && t.contains("250") && t.contains("1000"));
        assert!(t.contains("(1)"));
        assert!(t
            .lines()
            .any(|l| l.starts_with("lambda0") && l.contains("3.0")));
    }
}
