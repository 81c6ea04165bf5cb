//! Scenario files: flat TOML sections, unknown keys rejected, every value
//! validated with an error message that names the offending key.
//!
//! ```toml
//! mode = "simulate"   # simulate | lab-beta | lab-k1 | lab-ckp | equilibrium | validate
//! seed = 7            # optional, default 0
//!
//! [domain]
//! dimension = 1
//! lengths = [1.0]
//!
//! [grid]
//! cells = [128]
//!
//! [diffusion]
//! d1 = 1.0
//! d2 = 0.5
//! d3 = 2.0
//! d4 = 0.0
//!
//! [initial]           # simulate mode
//! kind = "cosine-perturbed-equilibrium"
//! masses = [2.0, 2.0, 2.0]
//! species = 1
//! amplitude = 0.1
//! mode = [1]
//!
//! [integrator]        # simulate mode
//! dt_max = 1e-3
//! t_end = 18.0
//! sample_every = 0.1  # optional, default t_end / 100
//! theta = 0.9         # optional, default 0.9
//! splitting = "strang" # optional: strang | lie
//!
//! [masses]            # lab + equilibrium modes
//! m13 = 2.0
//! m14 = 2.0
//! m23 = 2.0
//! volume = 1.0        # equilibrium mode only; defaults to the domain volume
//!
//! [sampler]           # lab modes
//! roughness = 4
//! amplitude = 0.8
//! samples = 10000
//!
//! [lab]               # lab-k1
//! gamma = 1.0         # optional; 2D norm exponent is q = 1 + gamma
//!
//! [output]
//! dir = "out"         # optional, default "out"
//! csv = "trajectory.csv"
//! json = "report.json"
//! svg = false         # simulate mode: also write SVG plots
//! ```

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::{IntegratorConfig, Splitting};
use crate::error::{Error, Result};
use crate::grid::{DiffusionCoeffs, DomainSpec, Grid, Masses};

pub const DEFAULT_THETA: f64 = 0.9;
pub const DEFAULT_GAMMA: f64 = 1.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "simulate")]
    Simulate,
    #[serde(rename = "lab-beta")]
    LabBeta,
    #[serde(rename = "lab-k1")]
    LabK1,
    #[serde(rename = "lab-ckp")]
    LabCkp,
    #[serde(rename = "equilibrium")]
    Equilibrium,
    #[serde(rename = "validate")]
    Validate,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub domain: Option<DomainSection>,
    pub grid: Option<GridSection>,
    pub diffusion: Option<DiffusionSection>,
    pub initial: Option<InitialSection>,
    pub integrator: Option<IntegratorSection>,
    pub masses: Option<MassesSection>,
    pub sampler: Option<SamplerSection>,
    pub lab: Option<LabSection>,
    #[serde(default)]
    pub output: OutputSection,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DomainSection {
    pub dimension: usize,
    pub lengths: Vec<f64>,
    #[serde(default)]
    pub label: String,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub cells: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiffusionSection {
    pub d1: f64,
    pub d2: f64,
    pub d3: f64,
    #[serde(default)]
    pub d4: f64,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialSection {
    pub kind: InitialKind,
    /// `constant` initial data: one value per species.
    pub values: Option<[f64; 4]>,
    /// `cosine-perturbed-equilibrium`: totals fixing the base equilibrium.
    pub masses: Option<[f64; 3]>,
    /// Perturbed species, 1-based.
    pub species: Option<usize>,
    pub amplitude: Option<f64>,
    /// Cosine wavenumbers per axis.
    pub mode: Option<Vec<u32>>,
    /// `sampled`: number of random modes.
    pub roughness: Option<u32>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialKind {
    #[serde(rename = "constant")]
    Constant,
    #[serde(rename = "cosine-perturbed-equilibrium")]
    CosinePerturbedEquilibrium,
    #[serde(rename = "sampled")]
    Sampled,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSection {
    pub dt_max: f64,
    pub t_end: f64,
    pub sample_every: Option<f64>,
    pub theta: Option<f64>,
    pub splitting: Option<Splitting>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassesSection {
    pub m13: f64,
    pub m14: f64,
    pub m23: f64,
    pub volume: Option<f64>,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSection {
    pub roughness: u32,
    pub amplitude: f64,
    pub samples: u64,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabSection {
    pub gamma: Option<f64>,
}

#[derive(Clone, Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: Option<String>,
    pub csv: Option<String>,
    pub json: Option<String>,
    #[serde(default)]
    pub svg: bool,
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let cfg: RunConfig =
        toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
    validate(&cfg)?;
    Ok(cfg)
}

fn require<'a, T>(section: &'a Option<T>, name: &str, mode: Mode) -> Result<&'a T> {
    section.as_ref().ok_or_else(|| {
        Error::Config(format!(
            "missing [{name}] section required by mode {mode:?}"
        ))
    })
}

fn validate(cfg: &RunConfig) -> Result<()> {
    match cfg.mode {
        Mode::Simulate => {
            cfg.build_grid()?;
            cfg.build_diffusion()?;
            cfg.validate_initial()?;
            cfg.build_integrator()?;
        }
        Mode::LabBeta | Mode::LabK1 => {
            cfg.build_grid()?;
            cfg.build_diffusion()?;
            cfg.build_masses()?;
            cfg.sampler_section()?;
            if let Some(lab) = &cfg.lab {
                if let Some(g) = lab.gamma {
                    if !(g > 0.0) {
                        return Err(Error::Config(format!(
                            "lab.gamma must be positive, got {g}"
                        )));
                    }
                }
            }
        }
        Mode::LabCkp => {
            cfg.build_grid()?;
            cfg.build_masses()?;
            cfg.sampler_section()?;
        }
        Mode::Equilibrium => {
            cfg.build_masses()?;
        }
        Mode::Validate => {}
    }
    Ok(())
}

impl RunConfig {
    pub fn build_grid(&self) -> Result<Arc<Grid>> {
        let dom = require(&self.domain, "domain", self.mode)?;
        if dom.dimension != dom.lengths.len() {
            return Err(Error::Config(format!(
                "domain.dimension = {} disagrees with domain.lengths ({} entries)",
                dom.dimension,
                dom.lengths.len()
            )));
        }
        let spec = DomainSpec::new(dom.lengths.clone())
            .map_err(|e| Error::Config(format!("domain.lengths: {e}")))?
            .with_label(dom.label.clone());
        let grid = require(&self.grid, "grid", self.mode)?;
        Grid::new(spec, &grid.cells).map_err(|e| Error::Config(format!("grid.cells: {e}")))
    }

    pub fn build_diffusion(&self) -> Result<DiffusionCoeffs> {
        let d = require(&self.diffusion, "diffusion", self.mode)?;
        DiffusionCoeffs::new(d.d1, d.d2, d.d3, d.d4).map_err(|e| match e {
            Error::InvalidParameter(msg) => Error::Config(msg),
            other => other,
        })
    }

    pub fn build_masses(&self) -> Result<Masses> {
        let m = require(&self.masses, "masses", self.mode)?;
        let masses = Masses::new(m.m13, m.m14, m.m23).map_err(|e| match e {
            Error::InvalidParameter(msg) => Error::Config(msg),
            other => other,
        })?;
        if masses.m24() <= 0.0 {
            return Err(Error::Config(format!(
                "masses: m14 + m23 - m13 = {} leaves no positive equilibrium",
                masses.m24()
            )));
        }
        Ok(masses)
    }

    pub fn masses_volume(&self) -> Result<f64> {
        let m = require(&self.masses, "masses", self.mode)?;
        let vol = match m.volume {
            Some(v) => v,
            None => match &self.domain {
                Some(d) => d.lengths.iter().product(),
                None => 1.0,
            },
        };
        if !(vol > 0.0) {
            return Err(Error::Config(format!(
                "masses.volume must be positive, got {vol}"
            )));
        }
        Ok(vol)
    }

    pub fn build_integrator(&self) -> Result<(IntegratorConfig, f64)> {
        let it = require(&self.integrator, "integrator", self.mode)?;
        let cfg = IntegratorConfig::new(
            it.dt_max,
            it.theta.unwrap_or(DEFAULT_THETA),
            it.t_end,
            it.splitting.unwrap_or(Splitting::Strang),
        )
        .map_err(|e| match e {
            Error::InvalidParameter(msg) => Error::Config(format!("integrator: {msg}")),
            other => other,
        })?;
        let sample_every = it.sample_every.unwrap_or(it.t_end / 100.0);
        if !(sample_every > 0.0) {
            return Err(Error::Config(format!(
                "integrator.sample_every must be positive, got {sample_every}"
            )));
        }
        Ok((cfg, sample_every))
    }

    pub fn sampler_section(&self) -> Result<&SamplerSection> {
        let s = require(&self.sampler, "sampler", self.mode)?;
        if !(0.0..1.0).contains(&s.amplitude) {
            return Err(Error::Config(format!(
                "sampler.amplitude must lie in [0, 1), got {}",
                s.amplitude
            )));
        }
        if s.samples == 0 {
            return Err(Error::Config(
                "sampler.samples must be at least 1".to_string(),
            ));
        }
        Ok(s)
    }

    pub fn validate_initial(&self) -> Result<()> {
        let init = require(&self.initial, "initial", self.mode)?;
        match init.kind {
            InitialKind::Constant => {
                let values = init.values.ok_or_else(|| {
                    Error::Config("initial.values is required for kind = \"constant\"".to_string())
                })?;
                if values.iter().any(|v| !(*v >= 0.0)) {
                    return Err(Error::Config(
                        "initial.values must all be nonnegative".to_string(),
                    ));
                }
            }
            InitialKind::CosinePerturbedEquilibrium => {
                let m = init.masses.ok_or_else(|| {
                    Error::Config(
                        "initial.masses is required for kind = \"cosine-perturbed-equilibrium\""
                            .to_string(),
                    )
                })?;
                Masses::new(m[0], m[1], m[2]).map_err(|e| match e {
                    Error::InvalidParameter(msg) => Error::Config(format!("initial.{msg}")),
                    other => other,
                })?;
                let species = init
                    .species
                    .ok_or_else(|| Error::Config("initial.species is required".to_string()))?;
                if !(1..=4).contains(&species) {
                    return Err(Error::Config(format!(
                        "initial.species must lie in 1..=4, got {species}"
                    )));
                }
                let amp = init
                    .amplitude
                    .ok_or_else(|| Error::Config("initial.amplitude is required".to_string()))?;
                if !(amp >= 0.0) {
                    return Err(Error::Config(format!(
                        "initial.amplitude must be nonnegative, got {amp}"
                    )));
                }
            }
            InitialKind::Sampled => {
                if init.roughness.is_none() {
                    return Err(Error::Config(
                        "initial.roughness is required for kind = \"sampled\"".to_string(),
                    ));
                }
                if init.masses.is_none() {
                    return Err(Error::Config(
                        "initial.masses is required for kind = \"sampled\"".to_string(),
                    ));
                }
                let amp = init.amplitude.unwrap_or(0.5);
                if !(0.0..1.0).contains(&amp) {
                    return Err(Error::Config(format!(
                        "initial.amplitude must lie in [0, 1), got {amp}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn lab_gamma(&self) -> f64 {
        self.lab
            .as_ref()
            .and_then(|l| l.gamma)
            .unwrap_or(DEFAULT_GAMMA)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL_SIMULATE: &str = r#"
mode = "simulate"

[domain]
dimension = 1
lengths = [1.0]

[grid]
cells = [64]

[diffusion]
d1 = 1.0
d2 = 0.5
d3 = 2.0

[initial]
kind = "constant"
values = [2.0, 2.0, 0.5, 0.5]

[integrator]
dt_max = 1e-3
t_end = 1.0
"#;

    #[test]
    fn minimal_simulate_config_fills_defaults() {
        let cfg = parse_config(MINIMAL_SIMULATE).unwrap();
        assert_eq!(cfg.mode, Mode::Simulate);
        assert_eq!(cfg.seed, 0);
        let (icfg, sample_every) = cfg.build_integrator().unwrap();
        assert_eq!(icfg.theta, DEFAULT_THETA);
        assert_eq!(icfg.splitting, Splitting::Strang);
        assert!((sample_every - 0.01).abs() < 1e-15);
        assert_eq!(cfg.build_diffusion().unwrap().d4, 0.0);
    }

    #[test]
    fn negative_diffusion_names_the_key() {
        let text = MINIMAL_SIMULATE.replace("d1 = 1.0", "d1 = -1.0");
        let err = parse_config(&text).unwrap_err();
        assert!(
            err.to_string().contains("diffusion.d1 must be positive"),
            "unexpected message: {err}"
        );
    }

    #[test]
    fn lab_beta_without_masses_names_the_section() {
        let text = r#"
mode = "lab-beta"

[domain]
dimension = 1
lengths = [1.0]

[grid]
cells = [64]

[diffusion]
d1 = 1.0
d2 = 1.0
d3 = 1.0

[sampler]
roughness = 4
amplitude = 0.8
samples = 100
"#;
        let err = parse_config(text).unwrap_err();
        assert!(err.to_string().contains("masses"), "message: {err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let text = MINIMAL_SIMULATE.replace("[integrator]", "[integrator]\nwhatever = 3");
        assert!(parse_config(&text).is_err());
    }

    #[test]
    fn dimension_must_match_lengths() {
        let text = MINIMAL_SIMULATE.replace("dimension = 1", "dimension = 2");
        let err = parse_config(&text).unwrap_err();
        assert!(err.to_string().contains("domain.dimension"));
    }
}
