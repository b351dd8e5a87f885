//! Emitter configurations and their structure factor.
//!
//! Positions live on a lattice in units of the lattice constant. The
//! detector is discretised into a [`QGrid`]: index `u` maps to the
//! momentum `q(u) = dq * u` with `dq = 2 pi / P` for a configurable period
//! `P`, so that integer positions give a `P`-periodic structure factor.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::index::QIndex;
use crate::scalar::{cis, wrap_phase, Scalar};
use crate::spectrum::Spectrum;

/// Relative threshold below which `|S(q)|` is treated as zero.
pub const DEFAULT_MAG_EPS: f64 = 1e-12;

/// Positions of `N` point emitters in one or two dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct EmitterConfig<T> {
    dim: usize,
    coords: Vec<T>,
}

impl<T: Scalar> EmitterConfig<T> {
    pub fn new(dim: usize, positions: &[Vec<T>]) -> Result<Self> {
        check_dim(dim)?;
        if positions.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one emitter is required".into(),
            ));
        }
        let mut coords = Vec::with_capacity(dim * positions.len());
        for p in positions {
            if p.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                });
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidArgument(
                    "emitter positions must be finite".into(),
                ));
            }
            coords.extend_from_slice(p);
        }
        Ok(EmitterConfig { dim, coords })
    }

    pub fn from_1d(xs: &[T]) -> Result<Self> {
        let ps: Vec<Vec<T>> = xs.iter().map(|&x| vec![x]).collect();
        Self::new(1, &ps)
    }

    pub fn from_2d(xys: &[[T; 2]]) -> Result<Self> {
        let ps: Vec<Vec<T>> = xys.iter().map(|p| p.to_vec()).collect();
        Self::new(2, &ps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of emitters `N`.
    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn position(&self, i: usize) -> &[T] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn positions(&self) -> impl Iterator<Item = &[T]> {
        self.coords.chunks_exact(self.dim)
    }

    /// Moves the origin by `delta`: every position becomes `R_i - delta`,
    /// which multiplies the structure factor by `exp(i q . delta)`.
    pub fn shifted(&self, delta: &[T]) -> Result<Self> {
        if delta.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: delta.len(),
            });
        }
        let coords = self
            .coords
            .iter()
            .enumerate()
            .map(|(k, &x)| x - delta[k % self.dim])
            .collect();
        Ok(EmitterConfig {
            dim: self.dim,
            coords,
        })
    }

    /// Point reflection through the origin. Conjugates the structure factor.
    pub fn reflected(&self) -> Self {
        EmitterConfig {
            dim: self.dim,
            coords: self.coords.iter().map(|&x| -x).collect(),
        }
    }

    /// `sum_i exp(-i q . R_i)` for an arbitrary physical momentum, summed in
    /// input order.
    pub fn structure_factor_at(&self, q: &[T]) -> Complex<T> {
        debug_assert_eq!(q.len(), self.dim);
        self.positions()
            .fold(Complex::new(T::zero(), T::zero()), |acc, r| {
                let dot = r.iter().zip(q).fold(T::zero(), |s, (&x, &k)| s + x * k);
                acc + cis(-dot)
            })
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 1 || dim == 2 {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "dimension must be 1 or 2, got {dim}"
        )))
    }
}

/// Discretised momentum grid: `M` pixels per axis, period `P`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QGrid<T> {
    dim: usize,
    pixels: usize,
    period: usize,
    step: T,
}

impl<T: Scalar> QGrid<T> {
    pub fn new(dim: usize, pixels: usize, period: usize) -> Result<Self> {
        check_dim(dim)?;
        if pixels < 2 {
            return Err(Error::InvalidArgument(format!(
                "need at least 2 pixels, got {pixels}"
            )));
        }
        if period == 0 {
            return Err(Error::InvalidArgument("period must be positive".into()));
        }
        let step = T::TAU() / T::from_count(period);
        Ok(QGrid {
            dim,
            pixels,
            period,
            step,
        })
    }

    /// Grid whose period equals the pixel count.
    pub fn square(dim: usize, pixels: usize) -> Result<Self> {
        Self::new(dim, pixels, pixels)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pixels(&self) -> usize {
        self.pixels
    }

    pub fn period(&self) -> usize {
        self.period
    }

    /// Momentum step `dq` in radians per lattice unit.
    pub fn step(&self) -> T {
        self.step
    }

    /// Physical momentum `q(u)`.
    pub fn q(&self, u: QIndex) -> Vec<T> {
        (0..self.dim)
            .map(|a| self.step * T::from_int(u.0[a]))
            .collect()
    }

    /// Scalar `q(u) . r`.
    pub fn phase_ramp(&self, u: QIndex, r: &[T]) -> T {
        (0..self.dim).fold(T::zero(), |s, a| s + self.step * T::from_int(u.0[a]) * r[a])
    }

    /// Table extent needed to evaluate correlations up to `order` on
    /// difference indices with components in `-(M-1)..=M-1`.
    pub fn extent_for_order(&self, order: usize) -> i64 {
        let m = self.pixels as i64 - 1;
        match order {
            0..=2 => m,
            3 => 2 * m,
            _ => 4 * m,
        }
    }
}

/// Structure factor sampled on every index with components in
/// `-extent..=extent`.
#[derive(Debug, Clone)]
pub struct StructureFactorTable<T> {
    grid: QGrid<T>,
    count: usize,
    extent: i64,
    values: Vec<Complex<T>>,
    mag_eps: T,
}

impl<T: Scalar> StructureFactorTable<T> {
    /// Tabulates `S(q(u)) = sum_i exp(-i q(u) . R_i)`.
    ///
    /// Only the lexicographically positive half is summed; the negative half
    /// is filled by conjugation, so Hermitian symmetry holds bit for bit.
    pub fn with_extent(config: &EmitterConfig<T>, grid: &QGrid<T>, extent: i64) -> Result<Self> {
        if config.dim() != grid.dim() {
            return Err(Error::DimensionMismatch {
                expected: grid.dim(),
                got: config.dim(),
            });
        }
        if extent < 0 {
            return Err(Error::InvalidArgument("extent must be non-negative".into()));
        }
        let side = (2 * extent + 1) as usize;
        let size = if grid.dim() == 1 { side } else { side * side };
        let n = config.len();
        let mut table = StructureFactorTable {
            grid: *grid,
            count: n,
            extent,
            values: vec![Complex::new(T::zero(), T::zero()); size],
            mag_eps: T::lit(DEFAULT_MAG_EPS) * T::from_count(n),
        };
        let ys: Vec<i64> = if grid.dim() == 1 {
            vec![0]
        } else {
            (-extent..=extent).collect()
        };
        for &uy in &ys {
            for ux in -extent..=extent {
                let u = QIndex([ux, uy]);
                if u < QIndex::ZERO {
                    continue;
                }
                let s = if u.is_zero() {
                    Complex::new(T::from_count(n), T::zero())
                } else {
                    config.structure_factor_at(&grid.q(u))
                };
                let i = table.slot(u).expect("in range");
                let j = table.slot(-u).expect("in range");
                table.values[i] = s;
                table.values[j] = s.conj();
            }
        }
        Ok(table)
    }

    /// Table large enough for correlations up to fourth order.
    pub fn new(config: &EmitterConfig<T>, grid: &QGrid<T>) -> Result<Self> {
        Self::with_extent(config, grid, grid.extent_for_order(4))
    }

    pub fn grid(&self) -> &QGrid<T> {
        &self.grid
    }

    pub fn extent(&self) -> i64 {
        self.extent
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// Threshold under which the phase is reported as undefined.
    pub fn mag_eps(&self) -> T {
        self.mag_eps
    }

    pub fn set_mag_eps(&mut self, eps: T) {
        self.mag_eps = eps;
    }

    fn slot(&self, u: QIndex) -> Option<usize> {
        if u.extent() > self.extent || (self.grid.dim() == 1 && u.0[1] != 0) {
            return None;
        }
        let side = 2 * self.extent + 1;
        let x = u.0[0] + self.extent;
        let y = if self.grid.dim() == 1 {
            0
        } else {
            u.0[1] + self.extent
        };
        Some((y * side + x) as usize)
    }

    pub fn get(&self, u: QIndex) -> Result<Complex<T>> {
        self.slot(u)
            .map(|i| self.values[i])
            .ok_or(Error::IndexOutOfRange {
                index: u,
                extent: self.extent,
            })
    }

    pub fn magnitude(&self, u: QIndex) -> Result<T> {
        self.get(u).map(|s| s.norm())
    }

    /// `arg S(q(u))` in `(-pi, pi]`; undefined when `|S| < mag_eps`.
    pub fn phase_of(&self, u: QIndex) -> Result<T> {
        let s = self.get(u)?;
        let mag = s.norm();
        if mag < self.mag_eps {
            return Err(Error::UndefinedPhase {
                index: u,
                magnitude: mag.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(wrap_phase(s.im.atan2(s.re)))
    }

    /// All stored indices in lexicographic order.
    pub fn indices(&self) -> Vec<QIndex> {
        let e = self.extent;
        if self.grid.dim() == 1 {
            (-e..=e).map(QIndex::d1).collect()
        } else {
            (-e..=e)
                .flat_map(|x| (-e..=e).map(move |y| QIndex::d2(x, y)))
                .collect()
        }
    }
}

impl<T: Scalar> Spectrum<T> for StructureFactorTable<T> {
    fn emitter_count(&self) -> T {
        T::from_count(self.count)
    }

    fn value(&self, u: QIndex) -> Result<Complex<T>> {
        self.get(u)
    }
}

/// Convenience wrapper for `StructureFactorTable::new`.
pub fn structure_factor<T: Scalar>(
    config: &EmitterConfig<T>,
    grid: &QGrid<T>,
) -> Result<StructureFactorTable<T>> {
    StructureFactorTable::new(config, grid)
}
