use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Integer lattice sites, one inner list of `dim` coordinates per emitter.
    #[serde(default)]
    pub emitters: Vec<Vec<i64>>,
    pub grid: GridConfig,
    #[serde(default)]
    pub pipeline: PipelineConfig,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default)]
    pub output: OutputConfig,
    /// Measured values used by `retrieve` instead of simulating the emitters.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub measurements: Option<Measurements>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    #[serde(default = "one")]
    pub dim: usize,
    pub pixels: usize,
    /// Lattice period `P`; defaults to `pixels`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub period: Option<usize>,
}

impl GridConfig {
    pub fn period(&self) -> usize {
        self.period.unwrap_or(self.pixels)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PipelineConfig {
    pub order: usize,
    pub use_g4_pruning: bool,
    pub gauge: f64,
    pub both_reflections: bool,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            order: 3,
            use_g4_pruning: false,
            gauge: 0.0,
            both_reflections: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub eps_tol: f64,
    pub eps_clamp: f64,
    pub eps_g4: f64,
    pub eps_mag: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eps_tol: 1e-6,
            eps_clamp: 1e-9,
            eps_g4: 1e-8,
            eps_mag: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NoiseConfig {
    pub sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub formats: Vec<Format>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            dir: PathBuf::from("out"),
            formats: vec![Format::Csv, Format::Json],
        }
    }
}

impl OutputConfig {
    pub fn wants(&self, f: Format) -> bool {
        self.formats.contains(&f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClosurePhaseEntry {
    pub m: i64,
    pub n: i64,
    pub abs_phase: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct G4Entry {
    pub u: [i64; 3],
    pub value: f64,
}

/// One-dimensional measured inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Measurements {
    pub count: f64,
    /// `|S(u)|` for `u = 0..pixels`.
    pub magnitudes: Vec<f64>,
    pub closure_phases: Vec<ClosurePhaseEntry>,
    #[serde(default)]
    pub g4_samples: Vec<G4Entry>,
    /// Reference phases for `u = 0..pixels`; used for alignment and, when no
    /// fourth-order samples are given, to generate them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub truth_phases: Option<Vec<f64>>,
}

fn one() -> usize {
    1
}

/// Flag values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub order: Option<usize>,
    pub prune_g4: bool,
    pub both_reflections: bool,
    pub tol: Option<f64>,
    pub noise_sigma: Option<f64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = o.order {
            self.pipeline.order = k;
        }
        self.pipeline.use_g4_pruning |= o.prune_g4;
        self.pipeline.both_reflections |= o.both_reflections;
        if let Some(t) = o.tol {
            self.tolerances.eps_tol = t;
        }
        if let Some(s) = o.noise_sigma {
            self.noise.sigma = s;
        }
        if o.seed.is_some() {
            self.noise.seed = o.seed;
        }
        if let Some(d) = &o.out {
            self.output.dir = d.clone();
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let g = &self.grid;
        if g.dim != 1 && g.dim != 2 {
            return Err(invalid(format!("grid.dim must be 1 or 2, got {}", g.dim)));
        }
        if g.pixels < 2 {
            return Err(invalid(format!(
                "grid.pixels must be at least 2, got {}",
                g.pixels
            )));
        }
        if g.period() == 0 {
            return Err(invalid("grid.period must be positive"));
        }
        let p = g.period() as i64;
        for (i, e) in self.emitters.iter().enumerate() {
            if e.len() != g.dim {
                return Err(invalid(format!(
                    "emitter {i} has {} coordinates, expected {}",
                    e.len(),
                    g.dim
                )));
            }
            if e.iter().any(|&x| !(0..p).contains(&x)) {
                return Err(invalid(format!(
                    "emitter {i} at {e:?} lies outside 0..{}",
                    p - 1
                )));
            }
        }
        if !(2..=4).contains(&self.pipeline.order) {
            return Err(invalid(format!(
                "pipeline.order must be 2, 3 or 4, got {}",
                self.pipeline.order
            )));
        }
        if !self.pipeline.gauge.is_finite() {
            return Err(invalid("pipeline.gauge must be finite"));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("eps_tol", t.eps_tol),
            ("eps_clamp", t.eps_clamp),
            ("eps_g4", t.eps_g4),
            ("eps_mag", t.eps_mag),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!(
                    "tolerances.{name} must be positive, got {v}"
                )));
            }
        }
        if !(self.noise.sigma >= 0.0 && self.noise.sigma.is_finite()) {
            return Err(invalid(format!(
                "noise.sigma must be non-negative, got {}",
                self.noise.sigma
            )));
        }
        if let Some(m) = &self.measurements {
            if g.dim != 1 {
                return Err(invalid("measurements are one-dimensional"));
            }
            if m.magnitudes.len() != g.pixels {
                return Err(invalid(format!(
                    "measurements.magnitudes has {} entries, expected {}",
                    m.magnitudes.len(),
                    g.pixels
                )));
            }
            if let Some(tp) = &m.truth_phases {
                if tp.len() != g.pixels {
                    return Err(invalid(format!(
                        "measurements.truth_phases has {} entries, expected {}",
                        tp.len(),
                        g.pixels
                    )));
                }
            }
        }
        Ok(())
    }

    /// The configuration as recorded in output files. Without noise the
    /// seed has no effect and is left out.
    pub fn provenance(&self) -> RunConfig {
        let mut c = self.clone();
        if c.noise.sigma == 0.0 {
            c.noise.seed = None;
        }
        c.output.dir = PathBuf::new();
        c
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(s: &str) -> RunConfig {
        serde_json::from_str(s).unwrap()
    }

    #[test]
    fn defaults_fill_in() {
        let c = parse(r#"{"emitters": [[0], [2]], "grid": {"pixels": 5}}"#);
        assert_eq!(c.grid.dim, 1);
        assert_eq!(c.grid.period(), 5);
        assert_eq!(c.pipeline.order, 3);
        assert_eq!(c.tolerances, Tolerances::default());
        assert!(c.validate().is_ok());
    }

    #[test]
    fn rejects_bad_values() {
        let base = r#""grid": {"pixels": 5}"#;
        let bad = [
            format!(r#"{{"emitters": [[5]], {base}}}"#),
            format!(r#"{{"emitters": [[0, 1]], {base}}}"#),
            r#"{"grid": {"pixels": 1}}"#.to_string(),
            format!(r#"{{{base}, "tolerances": {{"eps_tol": 0}}}}"#),
            format!(r#"{{{base}, "noise": {{"sigma": -1}}}}"#),
            format!(r#"{{{base}, "pipeline": {{"order": 5}}}}"#),
        ];
        for b in bad {
            assert!(
                matches!(parse(&b).validate(), Err(CliError::Validation(_))),
                "{b}"
            );
        }
        assert!(
            serde_json::from_str::<RunConfig>(r#"{"grid": {"pixels": 5}, "extra": 1}"#).is_err()
        );
    }

    #[test]
    fn overrides_and_provenance() {
        let mut c = parse(r#"{"grid": {"pixels": 5}, "noise": {"seed": 9}}"#);
        c.apply(&Overrides {
            order: Some(4),
            tol: Some(1e-3),
            prune_g4: true,
            ..Default::default()
        });
        assert_eq!(c.pipeline.order, 4);
        assert!(c.pipeline.use_g4_pruning);
        assert_eq!(c.tolerances.eps_tol, 1e-3);
        assert_eq!(c.provenance().noise.seed, None);
        c.noise.sigma = 0.1;
        assert_eq!(c.provenance().noise.seed, Some(9));
    }
}
