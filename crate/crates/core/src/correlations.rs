//! Closed-form normalised photon correlation functions of `N` incoherent
//! emitters, expressed through the structure factor.
//!
//! Difference indices follow the detector convention `u1 = k2 - k1`,
//! `u2 = k3 - k2`, `u3 = k4 - k3`; the composite indices of fourth order are
//! `u4 = u1 + u2`, `u5 = u1 + u2 + u3` and `u6 = u2 + u3`.
//!
//! Fourth order is available twice: [`g4_assembled`] sums the 24 pairing
//! contributions built from the five cycle-type kernels `p1..p5`, and
//! [`g4_closed`] evaluates the fully collected magnitude/cosine expression.
//! The assembly is the reference; the collected form is checked against it.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::index::QIndex;
use crate::oracle::CycleType;
use crate::scalar::Scalar;
use crate::spectrum::Spectrum;

/// Complex degree of coherence `S(q(u)) / N`.
pub fn g1_cdc<T: Scalar, S: Spectrum<T>>(spec: &S, u: QIndex) -> Result<Complex<T>> {
    Ok(spec.value(u)? / spec.emitter_count())
}

/// `1 - 2/N + |S(u)|^2 / N^2`.
pub fn g2<T: Scalar, S: Spectrum<T>>(spec: &S, u: QIndex) -> Result<T> {
    let n = spec.emitter_count();
    let m2 = spec.value(u)?.norm_sqr();
    Ok(T::one() - T::lit(2.0) / n + m2 / (n * n))
}

/// Third-order correlation; the phase enters only through the cosine of the
/// closure phase `phi(u1+u2) - phi(u1) - phi(u2)`.
pub fn g3<T: Scalar, S: Spectrum<T>>(spec: &S, u1: QIndex, u2: QIndex) -> Result<T> {
    let n = spec.emitter_count();
    let (s1, s2, s12) = (spec.value(u1)?, spec.value(u2)?, spec.value(u1 + u2)?);
    let (a, b, c) = (s1.norm(), s2.norm(), s12.norm());
    let closure = arg(s12) - arg(s1) - arg(s2);
    let n2 = n * n;
    let n3 = n2 * n;
    Ok(T::one() - T::lit(6.0) / n
        + T::lit(12.0) / n2
        + (n - T::lit(4.0)) / n3 * (a * a + b * b + c * c)
        + T::lit(2.0) / n3 * a * b * c * closure.cos())
}

fn arg<T: Scalar>(s: Complex<T>) -> T {
    s.im.atan2(s.re)
}

/// Identity kernel: `sum del(i,j,k,l) = N^4 - 6N^3 + 11N^2 - 6N`.
pub fn p1<T: Scalar>(n: T) -> T {
    n * (n * (n * (n - T::lit(6.0)) + T::lit(11.0)) - T::lit(6.0))
}

/// Transposition kernel `sum del e^{-i q (R_k - R_l)}`.
pub fn p2<T: Scalar, S: Spectrum<T>>(spec: &S, q: QIndex) -> Result<T> {
    let n = spec.emitter_count();
    let m2 = spec.value(q)?.norm_sqr();
    Ok(-n * n * n + T::lit(5.0) * n * n - T::lit(6.0) * n
        + (n * n - T::lit(5.0) * n + T::lit(6.0)) * m2)
}

/// Double-transposition kernel `sum del e^{-i q1 (R_i - R_j) - i q2 (R_k - R_l)}`.
pub fn p3<T: Scalar, S: Spectrum<T>>(spec: &S, q1: QIndex, q2: QIndex) -> Result<Complex<T>> {
    let n = spec.emitter_count();
    let s1 = spec.value(q1)?;
    let s2 = spec.value(q2)?;
    let sd = spec.value(q2 - q1)?;
    let ss = spec.value(q1 + q2)?;
    let (a2, b2) = (s1.norm_sqr(), s2.norm_sqr());
    let real = n * n - n * a2 - n * b2 - T::lit(6.0) * n
        + a2 * b2
        + sd.norm_sqr()
        + ss.norm_sqr()
        + T::lit(4.0) * (a2 + b2);
    let cross = s1.conj() * s2 * sd.conj()
        + s1 * s2.conj() * sd
        + s1.conj() * s2.conj() * ss
        + s1 * s2 * ss.conj();
    Ok(Complex::new(real, T::zero()) - cross)
}

/// Three-cycle kernel `sum del e^{-i q3 R_j + i q1 R_k + i q2 R_l}`.
pub fn p4<T: Scalar, S: Spectrum<T>>(
    spec: &S,
    q1: QIndex,
    q2: QIndex,
    q3: QIndex,
) -> Result<Complex<T>> {
    let n = spec.emitter_count();
    let c1 = spec.value(q1)?.conj();
    let c2 = spec.value(q2)?.conj();
    let s3 = spec.value(q3)?;
    let inner = c1 * c2 * s3
        - c2 * spec.value(q3 - q1)?
        - c1 * spec.value(q3 - q2)?
        - s3 * spec.value(q1 + q2)?.conj()
        + spec.value(q3 - q1 - q2)? * T::lit(2.0);
    Ok(inner * (n - T::lit(3.0)))
}

/// Four-cycle kernel `sum del e^{-i q4 R_i + i q1 R_j + i q2 R_k + i q3 R_l}`.
pub fn p5<T: Scalar, S: Spectrum<T>>(
    spec: &S,
    q1: QIndex,
    q2: QIndex,
    q3: QIndex,
    q4: QIndex,
) -> Result<Complex<T>> {
    let v = |u: QIndex| spec.value(u);
    let two = T::lit(2.0);
    let c1 = v(q1)?.conj();
    let c2 = v(q2)?.conj();
    let c3 = v(q3)?.conj();
    let s4 = v(q4)?;
    let c12 = v(q1 + q2)?.conj();
    let c13 = v(q1 + q3)?.conj();
    let c23 = v(q2 + q3)?.conj();
    let total = c1 * c2 * c3 * s4
        - c3 * s4 * c12
        - c2 * s4 * c13
        - c1 * s4 * c23
        - c2 * c3 * v(q4 - q1)?
        - c1 * c3 * v(q4 - q2)?
        - c1 * c2 * v(q4 - q3)?
        + c3 * v(q4 - q1 - q2)? * two
        + c2 * v(q4 - q1 - q3)? * two
        + c1 * v(q4 - q2 - q3)? * two
        + s4 * v(q1 + q2 + q3)?.conj() * two
        + v(q4 - q1)? * c23
        + c13 * v(q4 - q2)?
        + c12 * v(q4 - q3)?
        - v(q4 - q1 - q2 - q3)? * T::lit(6.0);
    Ok(total)
}

/// Dispatches to the kernel of the given cycle type. `args` carries the
/// kernel's momentum arguments (0, 1, 2, 3 or 4 indices).
pub fn p_contribution<T: Scalar, S: Spectrum<T>>(
    kind: CycleType,
    spec: &S,
    args: &[QIndex],
) -> Result<Complex<T>> {
    let want = kind.kernel_arity();
    if args.len() != want {
        return Err(Error::InvalidArgument(format!(
            "{kind:?} kernel takes {want} arguments, got {}",
            args.len()
        )));
    }
    let re = |x: T| Complex::new(x, T::zero());
    match kind {
        CycleType::Identity => Ok(re(p1(spec.emitter_count()))),
        CycleType::Transposition => p2(spec, args[0]).map(re),
        CycleType::DoubleTransposition => p3(spec, args[0], args[1]),
        CycleType::ThreeCycle => p4(spec, args[0], args[1], args[2]),
        CycleType::FourCycle => p5(spec, args[0], args[1], args[2], args[3]),
    }
}

/// Kernel arguments of the 24 pairings of fourth order, in terms of the
/// six difference vectors `q1..q6`.
pub fn g4_pairing_terms(u1: QIndex, u2: QIndex, u3: QIndex) -> Vec<(CycleType, Vec<QIndex>)> {
    use CycleType::*;
    let (q1, q2, q3) = (u1, u2, u3);
    let (q4, q5, q6) = (u1 + u2, u1 + u2 + u3, u2 + u3);
    let mut terms = vec![(Identity, vec![])];
    terms.extend(
        [q1, q2, q3, q4, q5, q6]
            .into_iter()
            .map(|q| (Transposition, vec![q])),
    );
    terms.extend([
        (DoubleTransposition, vec![q1, q3]),
        (DoubleTransposition, vec![q2, q5]),
        (DoubleTransposition, vec![q4, q6]),
    ]);
    terms.extend([
        (ThreeCycle, vec![q1, q2, q4]),
        (ThreeCycle, vec![-q2, q4, q1]),
        (ThreeCycle, vec![q1, q6, q5]),
        (ThreeCycle, vec![-q6, q5, q1]),
        (ThreeCycle, vec![q2, q3, q6]),
        (ThreeCycle, vec![-q3, q6, q2]),
        (ThreeCycle, vec![-q3, q5, q4]),
        (ThreeCycle, vec![q4, q3, q5]),
    ]);
    terms.extend([
        (FourCycle, vec![q1, q2, q3, q5]),
        (FourCycle, vec![-q2, -q3, q5, q1]),
        (FourCycle, vec![q1, -q3, q6, q4]),
        (FourCycle, vec![-q6, q4, q3, q1]),
        (FourCycle, vec![-q2, q4, q6, q5]),
        (FourCycle, vec![-q6, q2, q5, q4]),
    ]);
    terms
}

/// Sum of the 24 pairing kernels divided by `N^4`, before taking the real
/// part. The imaginary part cancels between conjugate pairings.
pub fn g4_assembled_complex<T: Scalar, S: Spectrum<T>>(
    spec: &S,
    u1: QIndex,
    u2: QIndex,
    u3: QIndex,
) -> Result<Complex<T>> {
    let n = spec.emitter_count();
    let mut acc = Complex::new(T::zero(), T::zero());
    for (kind, args) in g4_pairing_terms(u1, u2, u3) {
        acc += p_contribution(kind, spec, &args)?;
    }
    Ok(acc / (n * n * n * n))
}

/// Fourth-order correlation from the pairing assembly (reference form).
pub fn g4_assembled<T: Scalar, S: Spectrum<T>>(
    spec: &S,
    u1: QIndex,
    u2: QIndex,
    u3: QIndex,
) -> Result<T> {
    g4_assembled_complex(spec, u1, u2, u3).map(|z| z.re)
}

/// Fourth-order correlation from the collected magnitude/cosine expression.
pub fn g4_closed<T: Scalar, S: Spectrum<T>>(
    spec: &S,
    u1: QIndex,
    u2: QIndex,
    u3: QIndex,
) -> Result<T> {
    let n = spec.emitter_count();
    let lit = T::lit;

    let get = |u: QIndex| -> Result<(T, T)> {
        let s = spec.value(u)?;
        Ok((s.norm(), arg(s)))
    };
    let (m1, f1) = get(u1)?;
    let (m2, f2) = get(u2)?;
    let (m3, f3) = get(u3)?;
    let (m12, f12) = get(u1 + u2)?;
    let (m23, f23) = get(u2 + u3)?;
    let (m123, f123) = get(u1 + u2 + u3)?;
    let (m13, f13) = get(u1 + u3)?;
    let (mb, fb) = get(u1 + 2 * u2 + u3)?;
    let (md, fd) = get(u3 - u1)?;

    let sq = |x: T| x * x;
    let single = sq(m1) + sq(m2) + sq(m3) + sq(m12) + sq(m23) + sq(m123);

    let mut t = n * n * n * n - lit(12.0) * n * n * n + lit(60.0) * n * n - lit(144.0) * n;
    t += (n * n - lit(10.0) * n + lit(32.0)) * single;
    t += sq(m1) * sq(m3) + sq(m12) * sq(m23) + sq(m2) * sq(m123);
    t += lit(4.0) * (sq(m13) + sq(mb) + sq(md));

    let mixed = m12 * md * m23 * (f12 + fd - f23).cos()
        + m2 * m13 * m123 * (f2 + f13 - f123).cos()
        + m12 * m23 * mb * (f12 + f23 - fb).cos()
        + m2 * m123 * mb * (f2 + f123 - fb).cos()
        + m1 * m3 * md * (f1 - f3 + fd).cos()
        + m1 * m3 * m13 * (f1 + f3 - f13).cos();
    t -= lit(4.0) * mixed;

    let closure = m3 * m12 * m123 * (f3 + f12 - f123).cos()
        + m1 * m23 * m123 * (f1 + f23 - f123).cos()
        + m1 * m2 * m12 * (f1 + f2 - f12).cos()
        + m2 * m3 * m23 * (f2 + f3 - f23).cos();
    t += lit(2.0) * (n - lit(6.0)) * closure;

    let four_point = m1 * m3 * m12 * m23 * (f1 - f3 + f23 - f12).cos()
        + m1 * m2 * m3 * m123 * (f1 + f2 + f3 - f123).cos()
        + m2 * m12 * m23 * m123 * (f2 - f12 - f23 + f123).cos();
    t += lit(2.0) * four_point;

    Ok(t / (n * n * n * n))
}

/// A correlation request of order `k` with its `k - 1` difference indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorrelationTuple {
    diffs: Vec<QIndex>,
}

impl CorrelationTuple {
    pub fn new(diffs: Vec<QIndex>) -> Result<Self> {
        if diffs.is_empty() || diffs.len() > 3 {
            return Err(Error::InvalidArgument(format!(
                "correlation order must be 2..=4, got {}",
                diffs.len() + 1
            )));
        }
        Ok(CorrelationTuple { diffs })
    }

    pub fn order(&self) -> usize {
        self.diffs.len() + 1
    }

    pub fn diffs(&self) -> &[QIndex] {
        &self.diffs
    }

    /// Every index the closed form reads from the structure factor.
    pub fn required_indices(&self) -> Vec<QIndex> {
        match self.diffs[..] {
            [u] => vec![u],
            [u1, u2] => vec![u1, u2, u1 + u2],
            [u1, u2, u3] => vec![
                u1,
                u2,
                u3,
                u1 + u2,
                u2 + u3,
                u1 + u2 + u3,
                u1 + u3,
                u1 + 2 * u2 + u3,
                u3 - u1,
            ],
            _ => unreachable!(),
        }
    }

    /// Evaluates `g^(k)` with the collected closed forms.
    pub fn evaluate<T: Scalar, S: Spectrum<T>>(&self, spec: &S) -> Result<T> {
        match self.diffs[..] {
            [u] => g2(spec, u),
            [u1, u2] => g3(spec, u1, u2),
            [u1, u2, u3] => g4_closed(spec, u1, u2, u3),
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::emitters::{EmitterConfig, QGrid, StructureFactorTable};
    use std::f64::consts::PI;

    fn table(xs: &[f64], m: usize) -> StructureFactorTable<f64> {
        let cfg = EmitterConfig::from_1d(xs).unwrap();
        StructureFactorTable::new(&cfg, &QGrid::square(1, m).unwrap()).unwrap()
    }

    const Z: QIndex = QIndex::ZERO;
    fn u(x: i64) -> QIndex {
        QIndex::d1(x)
    }

    #[test]
    fn g1_values() {
        let t = table(&[0.0, 1.7, 3.2], 5);
        assert_eq!(g1_cdc(&t, Z).unwrap(), Complex::new(1.0, 0.0));
        let single = table(&[2.0], 5);
        for x in -4..=4 {
            let z = g1_cdc(&single, u(x)).unwrap();
            assert!((z.norm() - 1.0).abs() < 1e-15);
        }
        // atoms {0,1}, P = 8, u = 2: (1 + e^{-i pi/2}) / 2
        let two = table(&[0.0, 1.0], 8);
        let want = (Complex::new(1.0, 0.0) + Complex::from_polar(1.0, -PI / 2.0)) / 2.0;
        assert!((g1_cdc(&two, u(2)).unwrap() - want).norm() < 1e-15);
    }

    #[test]
    fn single_origin_atom_g1_is_exactly_one() {
        let t = table(&[0.0], 6);
        for x in -5..=5 {
            assert_eq!(g1_cdc(&t, u(x)).unwrap(), Complex::new(1.0, 0.0));
        }
    }

    #[test]
    fn g2_values() {
        for n in 1..=6 {
            let xs: Vec<f64> = (0..n).map(|i| i as f64 * 1.37).collect();
            let t = table(&xs, 7);
            let nf = n as f64;
            assert_eq!(g2(&t, Z).unwrap(), 2.0 * (1.0 - 1.0 / nf));
        }
        assert_eq!(g2(&table(&[0.4], 4), Z).unwrap(), 0.0);
        // two atoms {0, R}: (1 + cos qR) / 2
        let r = 2.0;
        let t = table(&[0.0, r], 9);
        for x in 0..9 {
            let q = 2.0 * PI / 9.0 * x as f64;
            assert!((g2(&t, u(x)).unwrap() - (1.0 + (q * r).cos()) / 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn g3_degenerate_and_single() {
        for n in 1..=7 {
            let xs: Vec<f64> = (0..n).map(|i| (i as f64).sqrt() * 2.1).collect();
            let t = table(&xs, 6);
            let nf = n as f64;
            let want = 6.0 * (1.0 - 1.0 / nf) * (1.0 - 2.0 / nf);
            assert!((g3(&t, Z, Z).unwrap() - want).abs() < 1e-12);
        }
        let single = table(&[1.3], 6);
        for a in -3..=3 {
            for b in -2..=2 {
                assert!(g3(&single, u(a), u(b)).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn g3_is_exchange_symmetric() {
        let t = table(&[0.0, 1.0, 3.5, 4.2, 7.7], 9);
        for a in -8..=8 {
            for b in -8..=8 {
                let x = g3(&t, u(a), u(b)).unwrap();
                let y = g3(&t, u(b), u(a)).unwrap();
                assert!((x - y).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn p_kernels_at_small_n() {
        // p1(N) = N(N-1)(N-2)(N-3)
        assert_eq!(p1(3.0), 0.0);
        assert_eq!(p1(4.0), 24.0);
        assert_eq!(p1(1.0), 0.0);
        // at q = 0 the transposition kernel counts the same tuples
        let t3 = table(&[0.0, 2.0, 5.0], 9);
        assert!(p2(&t3, Z).unwrap().abs() < 1e-12);
        let t4 = table(&[0.0, 2.0, 5.0, 6.5], 9);
        assert!((p2(&t4, Z).unwrap() - 24.0).abs() < 1e-12);
        let via = p_contribution(CycleType::Transposition, &t4, &[Z]).unwrap();
        assert!((via.re - 24.0).abs() < 1e-12 && via.im == 0.0);
        assert!(p_contribution(CycleType::FourCycle, &t4, &[Z]).is_err());
    }

    #[test]
    fn g4_single_emitter_vanishes() {
        let t = table(&[0.7], 5);
        for a in -4..=4 {
            for b in -4..=4 {
                let c = (a + b) % 5;
                assert!(g4_assembled(&t, u(a), u(b), u(c)).unwrap().abs() < 1e-12);
                assert!(g4_closed(&t, u(a), u(b), u(c)).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn g4_forms_agree_and_are_real() {
        let t = table(&[0.0, 1.3, 2.9, 4.4, 6.1], 7);
        for a in -6..=6 {
            for b in -3..=3 {
                for c in [-6, -1, 0, 2, 5] {
                    let z = g4_assembled_complex(&t, u(a), u(b), u(c)).unwrap();
                    let closed = g4_closed(&t, u(a), u(b), u(c)).unwrap();
                    assert!(z.im.abs() < 1e-10, "imag {}", z.im);
                    assert!((z.re - closed).abs() < 1e-10);
                }
            }
        }
    }

    /// The (1,1,1) specialisation with the products separated by `+`:
    /// `|S1|^4 + |S2|^4 + 2|S1|^2|S2|^2 + |S1|^2|S3|^2` in the `1/N^4` group.
    fn g4_111_expanded(t: &StructureFactorTable<f64>) -> f64 {
        let n = t.count() as f64;
        let m = |x: i64| t.magnitude(u(x)).unwrap();
        let f = |x: i64| t.phase_of(u(x)).unwrap();
        let (s1, s2, s3, s4) = (m(1), m(2), m(3), m(4));
        let (f1, f2, f3, f4) = (f(1), f(2), f(3), f(4));
        let c211 = (f2 - 2.0 * f1).cos();
        let c321 = (f3 - f2 - f1).cos();
        1.0 - 12.0 / n
            + (64.0 + 3.0 * s1 * s1 + 2.0 * s2 * s2 + s3 * s3) / n.powi(2)
            + (-144.0 - 34.0 * s1 * s1 - 24.0 * s2 * s2 - 10.0 * s3 * s3
                + 4.0 * s1 * s1 * s2 * c211
                + 4.0 * s1 * s2 * s3 * c321)
                / n.powi(3)
            + (s1.powi(4)
                + s2.powi(4)
                + 2.0 * s1 * s1 * s2 * s2
                + s1 * s1 * s3 * s3
                + 96.0 * s1 * s1
                + 68.0 * s2 * s2
                + 32.0 * s3 * s3
                + 4.0 * s4 * s4
                - 28.0 * s1 * s1 * s2 * c211
                - 28.0 * s1 * s2 * s3 * c321
                - 4.0 * s2 * s2 * s4 * (f4 - 2.0 * f2).cos()
                - 4.0 * s1 * s3 * s4 * (f4 - f3 - f1).cos()
                + 2.0 * s1.powi(3) * s3 * (f3 - 3.0 * f1).cos()
                + 2.0 * s1 * s2 * s2 * s3 * (f3 - 2.0 * f2 + f1).cos())
                / n.powi(4)
    }

    #[test]
    fn g4_unit_diagonal_specialisation() {
        for xs in [
            &[0.0, 1.0, 3.0, 4.5][..],
            &[0.2, 2.0, 2.7, 5.1, 7.9, 8.3][..],
        ] {
            let t = table(xs, 9);
            let want = g4_111_expanded(&t);
            let got = g4_assembled(&t, u(1), u(1), u(1)).unwrap();
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
            assert!((g4_closed(&t, u(1), u(1), u(1)).unwrap() - want).abs() < 1e-12);
        }
    }

    #[test]
    fn tuple_required_indices() {
        let t = CorrelationTuple::new(vec![u(1), u(2), u(3)]).unwrap();
        assert_eq!(t.order(), 4);
        let need = t.required_indices();
        assert!(need.contains(&u(8)) && need.contains(&u(2)) && need.contains(&u(6)));
        assert!(CorrelationTuple::new(vec![]).is_err());
        assert!(CorrelationTuple::new(vec![Z; 4]).is_err());
    }
}
