//! Seeded self-checks: closed forms against the brute-force oracle, the
//! equation census against its closed form, and the two fourth-order forms
//! against each other.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::closure::{census_closed_form, census_enumerated};
use crate::correlations::{g4_assembled, g4_closed, CorrelationTuple};
use crate::emitters::{EmitterConfig, QGrid, StructureFactorTable};
use crate::error::Result;
use crate::index::QIndex;
use crate::oracle::correlation_bruteforce;

pub const DEFAULT_SEED: u64 = 20_240_601;
pub const ORACLE_TOL: f64 = 1e-10;
const GRID_PIXELS: usize = 6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VerifyScope {
    Oracle,
    Counting,
    G4Consistency,
    All,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckOutcome {
    pub name: String,
    pub cases: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub failures: Vec<String>,
}

impl CheckOutcome {
    fn new(name: &str, tolerance: f64) -> Self {
        CheckOutcome {
            name: name.into(),
            cases: 0,
            max_residual: 0.0,
            tolerance,
            failures: Vec::new(),
        }
    }

    fn record(&mut self, residual: f64, label: impl FnOnce() -> String) {
        self.cases += 1;
        self.max_residual = self.max_residual.max(residual);
        if !(residual <= self.tolerance) {
            self.failures
                .push(format!("{}: residual {residual:e}", label()));
        }
    }

    pub fn passed(&self) -> bool {
        self.failures.is_empty() && self.cases > 0
    }
}

/// `n` emitters placed uniformly in `[0, period)^dim`.
pub fn random_config<R: Rng>(
    rng: &mut R,
    n: usize,
    dim: usize,
    period: usize,
) -> EmitterConfig<f64> {
    let p = period as f64;
    let positions: Vec<Vec<f64>> = (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(0.0..p)).collect())
        .collect();
    EmitterConfig::new(dim, &positions).expect("random positions are finite")
}

/// `count` difference indices with components in `-(M-1)..=M-1`.
pub fn random_diffs<R: Rng>(rng: &mut R, count: usize, dim: usize, pixels: usize) -> Vec<QIndex> {
    let r = pixels as i64 - 1;
    (0..count)
        .map(|_| {
            let x = rng.random_range(-r..=r);
            let y = if dim == 2 {
                rng.random_range(-r..=r)
            } else {
                0
            };
            QIndex::d2(x, y)
        })
        .collect()
}

/// Closed-form `g^(k)` against the pairing-sum oracle for `k = 2..=4`,
/// `N = 2..=6`, 20 configurations of 10 tuples each.
pub fn check_oracle(seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("oracle", ORACLE_TOL);
    for k in 2..=4 {
        for n in 2..=6 {
            let mut rng =
                ChaCha8Rng::seed_from_u64(seed ^ ((k * 16 + n) as u64).wrapping_mul(0x9E37_79B9));
            for draw in 0..20 {
                let dim = 1 + draw % 2;
                let grid = QGrid::square(dim, GRID_PIXELS)?;
                let cfg = random_config(&mut rng, n, dim, GRID_PIXELS);
                let table = StructureFactorTable::new(&cfg, &grid)?;
                for _ in 0..10 {
                    let diffs = random_diffs(&mut rng, k - 1, dim, GRID_PIXELS);
                    let closed = CorrelationTuple::new(diffs.clone())?.evaluate(&table)?;
                    let brute = correlation_bruteforce(&cfg, &grid, &diffs)?;
                    out.record((closed - brute).abs(), || {
                        format!("k={k} N={n} draw={draw} u={diffs:?}")
                    });
                }
            }
        }
    }
    Ok(out)
}

/// Enumerated census against the closed form, `M = 2..=16` in 1D and
/// `M = 2..=6` in 2D.
pub fn check_counting() -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("counting", 0.0);
    for (dim, top) in [(1, 16), (2, 6)] {
        for m in 2..=top {
            let e = census_enumerated(m, dim)?;
            let c = census_closed_form(m, dim)?;
            let residual = [
                e.total.abs_diff(c.total),
                e.trivial.abs_diff(c.trivial),
                e.redundant.abs_diff(c.redundant),
                e.canonical.abs_diff(c.canonical),
            ]
            .into_iter()
            .max()
            .unwrap_or(0) as f64;
            out.record(residual, || {
                format!("d={dim} M={m} enumerated {e:?} closed {c:?}")
            });
        }
    }
    Ok(out)
}

/// Collected fourth-order form against the sum of its 24 pairing terms.
pub fn check_g4_consistency(seed: u64) -> Result<CheckOutcome> {
    let mut out = CheckOutcome::new("g4-consistency", ORACLE_TOL);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(4));
    for case in 0..50 {
        let n = 2 + case % 5;
        let dim = 1 + case % 2;
        let grid = QGrid::square(dim, GRID_PIXELS)?;
        let cfg = random_config(&mut rng, n, dim, GRID_PIXELS);
        let table = StructureFactorTable::new(&cfg, &grid)?;
        let u = random_diffs(&mut rng, 3, dim, GRID_PIXELS);
        let closed = g4_closed(&table, u[0], u[1], u[2])?;
        let assembled = g4_assembled(&table, u[0], u[1], u[2])?;
        out.record((closed - assembled).abs(), || {
            format!("case={case} N={n} u={u:?}")
        });
    }
    Ok(out)
}

pub fn run(scope: VerifyScope, seed: u64) -> Result<Vec<CheckOutcome>> {
    Ok(match scope {
        VerifyScope::Oracle => vec![check_oracle(seed)?],
        VerifyScope::Counting => vec![check_counting()?],
        VerifyScope::G4Consistency => vec![check_g4_consistency(seed)?],
        VerifyScope::All => vec![
            check_oracle(seed)?,
            check_counting()?,
            check_g4_consistency(seed)?,
        ],
    })
}
