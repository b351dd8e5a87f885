//! Read access to a structure factor, whether tabulated from emitters or
//! assembled from measured magnitudes and hypothesised phases.

use std::collections::BTreeMap;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::index::QIndex;
use crate::scalar::{cis, Scalar};

pub trait Spectrum<T: Scalar> {
    /// Number of emitters `N`, as a real number.
    fn emitter_count(&self) -> T;

    /// `S(q(u))`.
    fn value(&self, u: QIndex) -> Result<Complex<T>>;

    fn magnitude(&self, u: QIndex) -> Result<T> {
        self.value(u).map(|s| s.norm())
    }

    /// Raw argument of `S(q(u))`; no zero-magnitude check.
    fn arg(&self, u: QIndex) -> Result<T> {
        self.value(u).map(|s| s.im.atan2(s.re))
    }
}

/// Structure factor given as magnitudes plus (possibly partial) phases on
/// the non-negative half; the negative half follows from Hermitian symmetry.
///
/// An index with a magnitude of zero needs no phase. An index with a
/// nonzero magnitude and no phase makes [`Spectrum::value`] fail with
/// [`Error::UndefinedPhase`], which is how partial hypotheses signal that
/// they do not cover a requested index.
#[derive(Debug, Clone)]
pub struct PhaseModel<T> {
    count: T,
    entries: BTreeMap<QIndex, (T, Option<T>)>,
}

impl<T: Scalar> PhaseModel<T> {
    pub fn new(count: T) -> Self {
        let mut entries = BTreeMap::new();
        entries.insert(QIndex::ZERO, (count, Some(T::zero())));
        PhaseModel { count, entries }
    }

    pub fn set(&mut self, u: QIndex, magnitude: T, phase: Option<T>) {
        self.entries.insert(u, (magnitude, phase));
    }

    pub fn from_1d(count: T, magnitudes: &[T], phases: &[Option<T>]) -> Self {
        let mut model = PhaseModel::new(count);
        for (u, (&m, &p)) in magnitudes.iter().zip(phases).enumerate().skip(1) {
            model.set(QIndex::d1(u as i64), m, p);
        }
        model
    }
}

impl<T: Scalar> Spectrum<T> for PhaseModel<T> {
    fn emitter_count(&self) -> T {
        self.count
    }

    fn value(&self, u: QIndex) -> Result<Complex<T>> {
        let (key, conj) = if self.entries.contains_key(&u) {
            (u, false)
        } else {
            (-u, true)
        };
        let &(mag, phase) = self.entries.get(&key).ok_or(Error::IndexOutOfRange {
            index: u,
            extent: -1,
        })?;
        let s = match phase {
            Some(p) => cis(p) * mag,
            None if mag == T::zero() => Complex::new(T::zero(), T::zero()),
            None => {
                return Err(Error::UndefinedPhase {
                    index: u,
                    magnitude: mag.to_f64().unwrap_or(f64::NAN),
                })
            }
        };
        Ok(if conj { s.conj() } else { s })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn model_is_hermitian_and_reports_gaps() {
        let m = PhaseModel::from_1d(
            3.0,
            &[3.0, 1.0, 2.0, 0.0],
            &[Some(0.0), Some(0.5), None, None],
        );
        let a = m.value(QIndex::d1(1)).unwrap();
        let b = m.value(QIndex::d1(-1)).unwrap();
        assert_eq!(a, b.conj());
        assert_eq!(m.value(QIndex::ZERO).unwrap(), Complex::new(3.0, 0.0));
        assert!(matches!(
            m.value(QIndex::d1(2)),
            Err(Error::UndefinedPhase { .. })
        ));
        assert_eq!(m.value(QIndex::d1(-3)).unwrap(), Complex::new(0.0, 0.0));
        assert!(matches!(
            m.value(QIndex::d1(4)),
            Err(Error::IndexOutOfRange { .. })
        ));
    }
}
