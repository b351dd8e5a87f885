//! Closure-phase equations `Phi(m, n) = phi(m + n) - phi(m) - phi(n)` on a
//! pixelated detector, their census, and the inversion of measured `g2`/`g3`
//! values into `N`, `|S|` and `|Phi|`.

use crate::error::{Error, Result};
use crate::index::QIndex;
use crate::scalar::Scalar;

/// Default tolerance for arccos and magnitude domain overshoot.
pub const DEFAULT_CLAMP_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EquationClass {
    /// Kept representative, `m >= n` and `n != 0`.
    Canonical,
    /// Swapped duplicate `(m, n)` with `m < n` of a kept pair.
    Redundant,
    /// Kept pair with a zero argument, carrying no information.
    Trivial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ClosureEquation {
    pub m: QIndex,
    pub n: QIndex,
    pub class: EquationClass,
}

impl ClosureEquation {
    /// Classifies `(m, n)`. Of the pair `{(m,n), (n,m)}` the one with the
    /// lexicographically larger `m` is kept; a kept pair with `n = 0` is trivial.
    pub fn classify(m: QIndex, n: QIndex) -> Self {
        let class = if m < n {
            EquationClass::Redundant
        } else if n.is_zero() {
            EquationClass::Trivial
        } else {
            EquationClass::Canonical
        };
        ClosureEquation { m, n, class }
    }

    pub fn target(&self) -> QIndex {
        self.m + self.n
    }

    pub fn swapped(&self) -> Self {
        Self::classify(self.n, self.m)
    }

    pub fn is_canonical(&self) -> bool {
        self.class == EquationClass::Canonical
    }
}

fn pixel_indices(pixels: usize, dim: usize) -> Vec<QIndex> {
    let m = pixels as i64;
    match dim {
        1 => (0..m).map(QIndex::d1).collect(),
        _ => (0..m)
            .flat_map(|x| (0..m).map(move |y| QIndex::d2(x, y)))
            .collect(),
    }
}

fn check(pixels: usize, dim: usize) -> Result<()> {
    if pixels < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 pixels, got {pixels}"
        )));
    }
    if dim != 1 && dim != 2 {
        return Err(Error::InvalidArgument(format!(
            "dimension must be 1 or 2, got {dim}"
        )));
    }
    Ok(())
}

/// Every `(m, n)` with non-negative components and `m + n = u` for each
/// pixel difference `u`, ordered by `u` then `m` (both lexicographic).
pub fn enumerate_equations(pixels: usize, dim: usize) -> Result<Vec<ClosureEquation>> {
    check(pixels, dim)?;
    let mut out = Vec::new();
    for u in pixel_indices(pixels, dim) {
        for m in pixel_indices(pixels, dim) {
            if m.0[0] <= u.0[0] && m.0[1] <= u.0[1] {
                out.push(ClosureEquation::classify(m, u - m));
            }
        }
    }
    Ok(out)
}

/// Canonical equations only, in enumeration order.
pub fn canonical_equations(pixels: usize, dim: usize) -> Result<Vec<ClosureEquation>> {
    Ok(enumerate_equations(pixels, dim)?
        .into_iter()
        .filter(|e| e.is_canonical())
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EquationCensus {
    pub total: u64,
    pub trivial: u64,
    pub redundant: u64,
    pub canonical: u64,
}

impl EquationCensus {
    pub fn from_equations(eqs: &[ClosureEquation]) -> Self {
        let mut c = EquationCensus {
            total: eqs.len() as u64,
            ..Default::default()
        };
        for e in eqs {
            match e.class {
                EquationClass::Canonical => c.canonical += 1,
                EquationClass::Redundant => c.redundant += 1,
                EquationClass::Trivial => c.trivial += 1,
            }
        }
        c
    }

    pub fn is_consistent(&self) -> bool {
        self.total == self.trivial + self.redundant + self.canonical
    }
}

/// Counts from enumeration.
pub fn census_enumerated(pixels: usize, dim: usize) -> Result<EquationCensus> {
    Ok(EquationCensus::from_equations(&enumerate_equations(
        pixels, dim,
    )?))
}

/// Counts from the closed-form expressions, branching on the parity of `M`.
pub fn census_closed_form(pixels: usize, dim: usize) -> Result<EquationCensus> {
    check(pixels, dim)?;
    let m = pixels as u64;
    let even = m.is_multiple_of(2);
    let c = if dim == 1 {
        EquationCensus {
            total: m * (m + 1) / 2,
            trivial: m,
            redundant: if even { m * m / 4 } else { (m * m - 1) / 4 },
            canonical: if even {
                m * (m - 2) / 4
            } else {
                (m - 1) * (m - 1) / 4
            },
        }
    } else {
        EquationCensus {
            total: m * m * (m + 1) * (m + 1) / 4,
            trivial: m * m,
            redundant: if even {
                m * m * m * (m + 2) / 8
            } else {
                (m - 1) * (m + 1).pow(3) / 8
            },
            canonical: if even {
                m * m * (m * (m + 2) - 6) / 8
            } else {
                (m - 1) * (m - 1) * (m * (m + 4) + 1) / 8
            },
        }
    };
    Ok(c)
}

/// Unknowns of the closure system: one sign per canonical equation plus the
/// phases not fixed by `phi(0) = 0` and the origin gauge.
pub fn unknown_count(pixels: usize, dim: usize) -> Result<u64> {
    let c = census_closed_form(pixels, dim)?;
    let m = pixels as u64;
    Ok(if dim == 1 {
        c.canonical + m - 2
    } else {
        c.canonical + m * m - 3
    })
}

/// Upper bound on an emitter count recovered from `g2(0)`; beyond it the
/// denominator `2 - g2` is lost in rounding.
pub fn max_recoverable_count<T: Scalar>() -> T {
    T::epsilon().sqrt().recip()
}

/// `N = 2 / (2 - g2(0))`.
pub fn invert_g2_count<T: Scalar>(g2_at_zero: T) -> Result<T> {
    let two = T::lit(2.0);
    if !(g2_at_zero < two) {
        return Err(Error::DegenerateInput(format!(
            "g2(0) = {g2_at_zero} must be below 2"
        )));
    }
    let n = two / (two - g2_at_zero);
    if !n.is_finite() || n > max_recoverable_count::<T>() {
        return Err(Error::DegenerateInput(format!(
            "g2(0) = {g2_at_zero} implies N = {n}"
        )));
    }
    Ok(n)
}

/// `|S| = N sqrt(g2 - 1 + 2/N)`, clamped into `[0, N]` within `clamp_eps`.
pub fn invert_g2_magnitude<T: Scalar>(g2_value: T, n: T, clamp_eps: T) -> Result<T> {
    if !(n >= T::one()) {
        return Err(Error::InvalidArgument(format!(
            "N = {n} must be at least 1"
        )));
    }
    let n2 = n * n;
    let m2 = n2 * (g2_value - T::one() + T::lit(2.0) / n);
    if m2 < -clamp_eps * n2 || m2 > (T::one() + clamp_eps) * n2 || !m2.is_finite() {
        return Err(Error::OutOfRange(format!("|S|^2 = {m2} outside [0, {n2}]")));
    }
    Ok(m2.max(T::zero()).min(n2).sqrt())
}

/// A closure equation with the measured cosine of its closure phase.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureMeasurement<T> {
    pub equation: ClosureEquation,
    pub cos_value: T,
    pub abs_phase: T,
}

impl<T: Scalar> ClosureMeasurement<T> {
    /// Builds a measurement from a known `|Phi|` in `[0, pi]`.
    pub fn from_abs_phase(equation: ClosureEquation, abs_phase: T) -> Self {
        ClosureMeasurement {
            equation,
            cos_value: abs_phase.cos(),
            abs_phase,
        }
    }
}

/// Solves the third-order expression for `cos Phi(u1, u2)`.
///
/// `mags` are `(|S(u1)|, |S(u2)|, |S(u1+u2)|)`; each must exceed `mag_eps`.
pub fn invert_g3_cosine<T: Scalar>(
    equation: ClosureEquation,
    g3_value: T,
    n: T,
    mags: (T, T, T),
    mag_eps: T,
    clamp_eps: T,
) -> Result<ClosureMeasurement<T>> {
    let (a, b, c) = mags;
    for m in [a, b, c] {
        if !(m > mag_eps) {
            return Err(Error::MagnitudeTooSmall {
                magnitude: m.to_f64().unwrap_or(f64::NAN),
            });
        }
    }
    let n2 = n * n;
    let n3 = n2 * n;
    let rest = n3 * (g3_value - T::one() + T::lit(6.0) / n - T::lit(12.0) / n2)
        - (n - T::lit(4.0)) * (a * a + b * b + c * c);
    let cos = rest / (T::lit(2.0) * a * b * c);
    if !cos.is_finite() || cos.abs() > T::one() + clamp_eps {
        return Err(Error::CosOutOfRange {
            value: cos.to_f64().unwrap_or(f64::NAN),
        });
    }
    let cos = cos.max(-T::one()).min(T::one());
    Ok(ClosureMeasurement {
        equation,
        cos_value: cos,
        abs_phase: cos.acos(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pairs(eqs: &[ClosureEquation]) -> Vec<(i64, i64)> {
        eqs.iter().map(|e| (e.m.0[0], e.n.0[0])).collect()
    }

    #[test]
    fn nine_pixel_canonical_list() {
        let eqs = canonical_equations(9, 1).unwrap();
        assert_eq!(eqs.len(), 16);
        let mut got = pairs(&eqs);
        got.sort();
        let mut want = vec![
            (1, 1),
            (2, 1),
            (3, 1),
            (4, 1),
            (5, 1),
            (6, 1),
            (7, 1),
            (2, 2),
            (3, 2),
            (4, 2),
            (5, 2),
            (6, 2),
            (3, 3),
            (4, 3),
            (5, 3),
            (4, 4),
        ];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn two_pixels_have_no_canonical_equation() {
        let eqs = enumerate_equations(2, 1).unwrap();
        assert_eq!(pairs(&eqs), vec![(0, 0), (0, 1), (1, 0)]);
        assert!(eqs.iter().all(|e| !e.is_canonical()));
        assert_eq!(census_closed_form(2, 1).unwrap().canonical, 0);
    }

    #[test]
    fn closed_form_examples() {
        let c = census_closed_form(9, 1).unwrap();
        assert_eq!(
            c,
            EquationCensus {
                total: 45,
                trivial: 9,
                redundant: 20,
                canonical: 16
            }
        );
        let c = census_closed_form(3, 2).unwrap();
        assert_eq!(
            c,
            EquationCensus {
                total: 36,
                trivial: 9,
                redundant: 16,
                canonical: 11
            }
        );
        assert_eq!(census_closed_form(4, 1).unwrap().canonical, 2);
        assert_eq!(census_enumerated(4, 1).unwrap().canonical, 2);
    }

    #[test]
    fn enumeration_matches_closed_form() {
        for m in 2..=16 {
            let e = census_enumerated(m, 1).unwrap();
            assert!(e.is_consistent());
            assert_eq!(e, census_closed_form(m, 1).unwrap(), "M={m}");
        }
        for m in 2..=6 {
            assert_eq!(
                census_enumerated(m, 2).unwrap(),
                census_closed_form(m, 2).unwrap(),
                "M={m}"
            );
        }
    }

    #[test]
    fn canonical_swaps_are_redundant() {
        for (m, d) in [(9, 1), (4, 2), (5, 2)] {
            let all = enumerate_equations(m, d).unwrap();
            for e in all.iter().filter(|e| e.is_canonical()) {
                assert!(e.m >= e.n && !e.m.is_zero() && !e.n.is_zero());
                let s = e.swapped();
                if s.m != s.n {
                    assert_eq!(s.class, EquationClass::Redundant);
                    assert!(all.contains(&s));
                }
            }
        }
    }

    #[test]
    fn unknowns() {
        assert_eq!(unknown_count(9, 1).unwrap(), 23);
        assert_eq!(unknown_count(3, 2).unwrap(), 17);
        assert_eq!(unknown_count(2, 1).unwrap(), 0);
        assert!(unknown_count(1, 1).is_err());
    }

    #[test]
    fn count_inversion() {
        assert_eq!(invert_g2_count(0.0).unwrap(), 1.0);
        assert_eq!(invert_g2_count(1.5).unwrap(), 4.0);
        assert!(matches!(
            invert_g2_count(2.0),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(
            invert_g2_count(2.0 - 1e-15),
            Err(Error::DegenerateInput(_))
        ));
        assert!(invert_g2_count(f64::NAN).is_err());
    }

    #[test]
    fn magnitude_inversion() {
        let eps = DEFAULT_CLAMP_EPS;
        for n in [1.0, 3.0, 7.0] {
            let m = invert_g2_magnitude(2.0 * (1.0 - 1.0 / n), n, eps).unwrap();
            assert!((m - n).abs() < 1e-12);
            assert_eq!(invert_g2_magnitude(1.0 - 2.0 / n, n, eps).unwrap(), 0.0);
        }
        assert!(matches!(
            invert_g2_magnitude(3.0, 2.0, eps),
            Err(Error::OutOfRange(_))
        ));
        assert!(matches!(
            invert_g2_magnitude(-0.5, 2.0, eps),
            Err(Error::OutOfRange(_))
        ));
        // rounding overshoot below zero is clamped
        assert_eq!(
            invert_g2_magnitude(1.0 - 2.0 / 3.0 - 1e-13, 3.0, eps).unwrap(),
            0.0
        );
    }

    #[test]
    fn cosine_inversion_edge_cases() {
        let e = ClosureEquation::classify(QIndex::ZERO, QIndex::ZERO);
        let n = 4.0;
        // u1 = u2 = 0: every magnitude is N and Phi = 0
        let g3 = 6.0 * (1.0 - 1.0 / n) * (1.0 - 2.0 / n);
        let m = invert_g3_cosine(e, g3, n, (n, n, n), 1e-12, DEFAULT_CLAMP_EPS).unwrap();
        assert!((m.cos_value - 1.0).abs() < 1e-12);
        assert!(m.abs_phase < 1e-5);
        let err = invert_g3_cosine(e, g3, n, (0.0, 1.0, 1.0), 1e-12, DEFAULT_CLAMP_EPS);
        assert!(matches!(err, Err(Error::MagnitudeTooSmall { .. })));
        let err = invert_g3_cosine(e, 5.0, n, (1.0, 1.0, 1.0), 1e-12, DEFAULT_CLAMP_EPS);
        assert!(matches!(err, Err(Error::CosOutOfRange { .. })));
    }
}
