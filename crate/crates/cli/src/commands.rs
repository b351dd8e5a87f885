use std::cell::RefCell;
use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};

use idi_phase::closure::{
    canonical_equations, census_closed_form, census_enumerated, unknown_count,
};
use idi_phase::correlations::{g2, g3, g4_closed, CorrelationTuple};
use idi_phase::retrieval::{
    default_g4_tuples, gauge_fit, phases_1d, prune_with_g4, sample_g4, ClosureData1d, G4Sample,
    RetrievalOptions, RetrievalReport, RetrievalStatus,
};
use idi_phase::verify::{self, CheckOutcome, VerifyScope};
use idi_phase::{
    ClosureEquation, ClosureMeasurement, EmitterConfig, PhaseModel, QGrid, QIndex,
    StructureFactorTable,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{Format, Measurements, NoiseConfig, RunConfig};
use crate::error::CliError;
use crate::output::{real, write_csv, write_json, ToolInfo, TOOL};

struct Noise {
    rng: ChaCha8Rng,
    dist: Option<Normal<f64>>,
}

impl Noise {
    fn new(cfg: &NoiseConfig) -> Result<Self, CliError> {
        let dist = if cfg.sigma > 0.0 {
            Some(Normal::new(0.0, cfg.sigma).map_err(|e| CliError::Validation(e.to_string()))?)
        } else {
            None
        };
        Ok(Noise {
            rng: ChaCha8Rng::seed_from_u64(cfg.seed.unwrap_or(0)),
            dist,
        })
    }

    fn add(&mut self, v: f64) -> f64 {
        match &self.dist {
            Some(d) => v + d.sample(&mut self.rng),
            None => v,
        }
    }
}

fn emitter_config(cfg: &RunConfig) -> Result<EmitterConfig<f64>, CliError> {
    if cfg.emitters.is_empty() {
        return Err(CliError::Validation("no emitters given".into()));
    }
    let positions: Vec<Vec<f64>> = cfg
        .emitters
        .iter()
        .map(|e| e.iter().map(|&x| x as f64).collect())
        .collect();
    Ok(EmitterConfig::new(cfg.grid.dim, &positions)?)
}

fn simulated_table(cfg: &RunConfig) -> Result<StructureFactorTable<f64>, CliError> {
    let grid = QGrid::new(cfg.grid.dim, cfg.grid.pixels, cfg.grid.period())?;
    let extent = grid.extent_for_order(4);
    Ok(StructureFactorTable::with_extent(
        &emitter_config(cfg)?,
        &grid,
        extent,
    )?)
}

fn pixel_indices(dim: usize, pixels: usize) -> Vec<QIndex> {
    let m = pixels as i64;
    if dim == 1 {
        (0..m).map(QIndex::d1).collect()
    } else {
        (0..m)
            .flat_map(|x| (0..m).map(move |y| QIndex::d2(x, y)))
            .collect()
    }
}

fn index_json(dim: usize, u: QIndex) -> Value {
    if dim == 1 {
        json!(u.0[0])
    } else {
        json!([u.0[0], u.0[1]])
    }
}

fn index_cells(dim: usize, u: QIndex) -> Vec<String> {
    if dim == 1 {
        vec![u.0[0].to_string()]
    } else {
        vec![u.0[0].to_string(), u.0[1].to_string()]
    }
}

fn equation_label(e: &ClosureEquation) -> String {
    format!("({},{})", e.m, e.n)
}

#[derive(Serialize)]
struct CorrelationRow {
    u: Vec<Value>,
    value: f64,
}

#[derive(Serialize)]
struct SimulateOutput {
    tool: ToolInfo,
    config: RunConfig,
    emitter_count: usize,
    tables: BTreeMap<String, Vec<CorrelationRow>>,
}

/// Writes `g^(k)` tables for `k = 2..=order` over non-negative detector
/// differences. Returns the files written.
pub fn simulate(cfg: &RunConfig, plot: Option<&Path>) -> Result<Vec<PathBuf>, CliError> {
    let table = simulated_table(cfg)?;
    let dim = cfg.grid.dim;
    let pixels = pixel_indices(dim, cfg.grid.pixels);
    let mut noise = Noise::new(&cfg.noise)?;
    let provenance = cfg.provenance();
    let mut written = Vec::new();
    let mut tables = BTreeMap::new();
    let mut plot_rows = Vec::new();

    for k in 2..=cfg.pipeline.order {
        let mut tuples: Vec<Vec<QIndex>> = vec![Vec::new()];
        for _ in 1..k {
            tuples = tuples
                .into_iter()
                .flat_map(|t| {
                    pixels.iter().map(move |&u| {
                        let mut t = t.clone();
                        t.push(u);
                        t
                    })
                })
                .collect();
        }
        let mut rows = Vec::with_capacity(tuples.len());
        let mut cells = Vec::with_capacity(tuples.len());
        for diffs in tuples {
            let value = noise.add(CorrelationTuple::new(diffs.clone())?.evaluate(&table)?);
            let first = diffs[0];
            if diffs.iter().all(|&u| u == first) && first.0[1] == 0 {
                plot_rows.push(vec![format!("g{k}"), first.0[0].to_string(), real(value)]);
            }
            let mut c: Vec<String> = diffs.iter().flat_map(|&u| index_cells(dim, u)).collect();
            c.push(real(value));
            cells.push(c);
            rows.push(CorrelationRow {
                u: diffs.iter().map(|&u| index_json(dim, u)).collect(),
                value,
            });
        }
        if cfg.output.wants(Format::Csv) {
            let mut header: Vec<String> = Vec::new();
            for a in 1..k {
                if dim == 1 {
                    header.push(format!("u{a}"));
                } else {
                    header.push(format!("u{a}x"));
                    header.push(format!("u{a}y"));
                }
            }
            header.push("value".into());
            let h: Vec<&str> = header.iter().map(String::as_str).collect();
            let path = cfg.output.dir.join(format!("g{k}.csv"));
            write_csv(&path, &provenance, &h, &cells)?;
            written.push(path);
        }
        tables.insert(format!("g{k}"), rows);
    }

    if cfg.output.wants(Format::Json) {
        let path = cfg.output.dir.join("correlations.json");
        let out = SimulateOutput {
            tool: TOOL,
            config: provenance.clone(),
            emitter_count: cfg.emitters.len(),
            tables,
        };
        write_json(&path, &out)?;
        written.push(path);
    }
    if let Some(p) = plot {
        write_csv(p, &provenance, &["series", "x", "y"], &plot_rows)?;
        written.push(p.to_path_buf());
    }
    Ok(written)
}

#[derive(Debug, Serialize)]
struct EquationRow {
    m: Value,
    n: Value,
    target: Value,
}

#[derive(Debug, Serialize)]
pub struct EnumerateOutput {
    tool: ToolInfo,
    pub pixels: usize,
    pub dim: usize,
    pub total: u64,
    pub trivial: u64,
    pub redundant: u64,
    pub canonical: u64,
    pub formula_canonical: u64,
    #[serde(rename = "match")]
    pub matches: bool,
    pub unknowns: u64,
    equations: Vec<EquationRow>,
}

pub fn enumerate(
    pixels: usize,
    dim: usize,
    out_dir: &Path,
) -> Result<(EnumerateOutput, PathBuf), CliError> {
    let e = census_enumerated(pixels, dim)?;
    let c = census_closed_form(pixels, dim)?;
    let equations = canonical_equations(pixels, dim)?
        .iter()
        .map(|q| EquationRow {
            m: index_json(dim, q.m),
            n: index_json(dim, q.n),
            target: index_json(dim, q.target()),
        })
        .collect();
    let out = EnumerateOutput {
        tool: TOOL,
        pixels,
        dim,
        total: e.total,
        trivial: e.trivial,
        redundant: e.redundant,
        canonical: e.canonical,
        formula_canonical: c.canonical,
        matches: e == c,
        unknowns: unknown_count(pixels, dim)?,
        equations,
    };
    let path = out_dir.join("census.json");
    write_json(&path, &out)?;
    Ok((out, path))
}

#[derive(Serialize)]
struct HypothesisOut {
    phases: BTreeMap<i64, f64>,
    signs: BTreeMap<String, char>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alignment_error: Option<f64>,
}

#[derive(Serialize)]
struct StageOut {
    status: &'static str,
    hypotheses: usize,
}

#[derive(Serialize)]
struct SampleOut {
    u: [i64; 3],
    value: f64,
}

#[derive(Serialize)]
struct RetrieveOutput {
    tool: ToolInfo,
    config: RunConfig,
    status: &'static str,
    pixels: usize,
    count: f64,
    gauge_index: Option<i64>,
    hypotheses: Vec<HypothesisOut>,
    ambiguity: BTreeMap<i64, usize>,
    equations_used: BTreeMap<i64, Vec<String>>,
    skipped_equations: Vec<String>,
    missing_equations: Vec<String>,
    undefined_indices: Vec<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    g3_only: Option<StageOut>,
    g4_samples: Vec<SampleOut>,
    alignment_error: Option<f64>,
}

pub fn status_name(s: RetrievalStatus) -> &'static str {
    match s {
        RetrievalStatus::Unique => "unique",
        RetrievalStatus::Ambiguous => "ambiguous",
        RetrievalStatus::Contradictory => "contradictory",
    }
}

struct Inputs {
    data: ClosureData1d<f64>,
    samples: Vec<G4Sample<f64>>,
    truth: Option<BTreeMap<QIndex, f64>>,
}

fn from_measurements(cfg: &RunConfig, m: &Measurements) -> Result<Inputs, CliError> {
    let pixels = cfg.grid.pixels;
    let eps = cfg.tolerances.eps_mag;
    let undefined: BTreeSet<QIndex> = (1..pixels)
        .filter(|&u| m.magnitudes[u] * m.magnitudes[u] <= eps * m.count * m.count)
        .map(|u| QIndex::d1(u as i64))
        .collect();
    let measurements = m
        .closure_phases
        .iter()
        .map(|c| {
            let e = ClosureEquation::classify(QIndex::d1(c.m), QIndex::d1(c.n));
            ClosureMeasurement::from_abs_phase(e, c.abs_phase)
        })
        .collect();
    let data = ClosureData1d {
        pixels,
        count: m.count,
        magnitudes: m.magnitudes.clone(),
        measurements,
        undefined,
    };
    let truth = m.truth_phases.as_ref().map(|tp| {
        tp.iter()
            .enumerate()
            .map(|(u, &p)| (QIndex::d1(u as i64), p))
            .filter(|(u, _)| !data.undefined.contains(u))
            .collect::<BTreeMap<_, _>>()
    });
    let samples = if !m.g4_samples.is_empty() {
        m.g4_samples
            .iter()
            .map(|s| G4Sample {
                u: s.u.map(QIndex::d1),
                value: s.value,
            })
            .collect()
    } else if let Some(tp) = &m.truth_phases {
        let phases: Vec<Option<f64>> = tp.iter().map(|&p| Some(p)).collect();
        let model = PhaseModel::from_1d(m.count, &m.magnitudes, &phases);
        sample_g4(&model, &default_g4_tuples(pixels))?
    } else {
        Vec::new()
    };
    Ok(Inputs {
        data,
        samples,
        truth,
    })
}

fn from_emitters(cfg: &RunConfig) -> Result<Inputs, CliError> {
    let table = simulated_table(cfg)?;
    let pixels = cfg.grid.pixels;
    let noise = RefCell::new(Noise::new(&cfg.noise)?);
    let t = &cfg.tolerances;
    let data = ClosureData1d::from_correlations(
        pixels,
        |u| Ok(noise.borrow_mut().add(g2(&table, u)?)),
        |a, b| Ok(noise.borrow_mut().add(g3(&table, a, b)?)),
        t.eps_mag,
        t.eps_clamp,
    )?;
    let mut samples = Vec::new();
    if cfg.pipeline.use_g4_pruning {
        for u in default_g4_tuples(pixels) {
            let value = noise.borrow_mut().add(g4_closed(&table, u[0], u[1], u[2])?);
            samples.push(G4Sample { u, value });
        }
    }
    let truth = Some(phases_1d(&table, pixels, &data.undefined)?);
    Ok(Inputs {
        data,
        samples,
        truth,
    })
}

fn hypotheses_out(
    report: &RetrievalReport<f64>,
    truth: Option<&BTreeMap<QIndex, f64>>,
) -> Vec<HypothesisOut> {
    report
        .hypotheses
        .iter()
        .map(|h| HypothesisOut {
            phases: h.assignment.iter().map(|(u, &p)| (u.0[0], p)).collect(),
            signs: h
                .signs
                .iter()
                .map(|((m, n), s)| (format!("({m},{n})"), s.symbol()))
                .collect(),
            alignment_error: truth.map(|t| gauge_fit(&h.assignment, t, 1).error),
        })
        .collect()
}

/// Forward model (or measured inputs), inversion, retrieval, optional
/// pruning and alignment. Returns the final status and the report path.
pub fn retrieve(
    cfg: &RunConfig,
    plot: Option<&Path>,
) -> Result<(RetrievalStatus, PathBuf), CliError> {
    if cfg.grid.dim != 1 {
        return Err(CliError::Validation(
            "retrieval runs on one-dimensional grids".into(),
        ));
    }
    let inputs = match &cfg.measurements {
        Some(m) => from_measurements(cfg, m)?,
        None => from_emitters(cfg)?,
    };
    let opts = RetrievalOptions {
        gauge: cfg.pipeline.gauge,
        both_reflections: cfg.pipeline.both_reflections,
        tol: cfg.tolerances.eps_tol,
        ..Default::default()
    };
    let first = inputs.data.retrieve(&opts)?;
    let (report, g3_only) = if cfg.pipeline.use_g4_pruning {
        if inputs.samples.is_empty() {
            return Err(CliError::Validation(
                "pruning needs fourth-order samples".into(),
            ));
        }
        let pruned = prune_with_g4(
            &first,
            inputs.data.count,
            &inputs.data.magnitudes,
            &inputs.samples,
            cfg.tolerances.eps_g4,
        )?;
        let stage = StageOut {
            status: status_name(first.status()),
            hypotheses: first.hypotheses.len(),
        };
        (pruned, Some(stage))
    } else {
        (first, None)
    };

    let truth = inputs.truth.as_ref();
    let hypotheses = hypotheses_out(&report, truth);
    let alignment_error = hypotheses
        .iter()
        .filter_map(|h| h.alignment_error)
        .reduce(f64::min);
    let provenance = cfg.provenance();
    let status = report.status();
    let out = RetrieveOutput {
        tool: TOOL,
        config: provenance.clone(),
        status: status_name(status),
        pixels: report.pixels,
        count: inputs.data.count,
        gauge_index: report.gauge_index.map(|u| u.0[0]),
        hypotheses,
        ambiguity: report.ambiguity.iter().map(|(u, &n)| (u.0[0], n)).collect(),
        equations_used: report
            .equations_used
            .iter()
            .map(|(u, es)| (u.0[0], es.iter().map(equation_label).collect()))
            .collect(),
        skipped_equations: report.skipped.iter().map(equation_label).collect(),
        missing_equations: report.missing.iter().map(equation_label).collect(),
        undefined_indices: report.undefined.iter().map(|u| u.0[0]).collect(),
        g3_only,
        g4_samples: inputs
            .samples
            .iter()
            .map(|s| SampleOut {
                u: s.u.map(|q| q.0[0]),
                value: s.value,
            })
            .collect(),
        alignment_error,
    };
    let path = cfg.output.dir.join("retrieval.json");
    write_json(&path, &out)?;

    if let (Some(p), Some(t)) = (plot, truth) {
        let fits: Vec<_> = report
            .hypotheses
            .iter()
            .map(|h| (h, gauge_fit(&h.assignment, t, 1)))
            .collect();
        let mut rows = Vec::new();
        if let Some((h, fit)) = fits.iter().min_by(|a, b| a.1.error.total_cmp(&b.1.error)) {
            for (u, &r) in &h.assignment {
                if let Some(&tv) = t.get(u) {
                    rows.push(vec!["phase".to_string(), real(tv), real(fit.apply(*u, r))]);
                }
            }
        }
        write_csv(p, &provenance, &["series", "x", "y"], &rows)?;
    }
    Ok((status, path))
}

pub fn run_verify(scope: VerifyScope, seed: u64) -> Result<Vec<CheckOutcome>, CliError> {
    Ok(verify::run(scope, seed)?)
}
