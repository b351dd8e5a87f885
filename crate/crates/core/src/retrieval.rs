//! Sequential lifting of closure-phase sign ambiguities in one dimension.
//!
//! Phases are assigned index by index. Every canonical equation ending at
//! the current index offers two candidate values `phi(m) + phi(n) +- |Phi|`;
//! a value survives when all equations agree on it. Hypotheses are tracked
//! as an explicit tree so that a value reachable only through incompatible
//! earlier sign choices is never accepted.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use crate::closure::{
    canonical_equations, invert_g2_count, invert_g2_magnitude, invert_g3_cosine, ClosureEquation,
    ClosureMeasurement,
};
use crate::correlations::{g2, g3, g4_closed};
use crate::error::{Error, Result};
use crate::index::QIndex;
use crate::scalar::{wrap_phase, wrapped_distance, Scalar};
use crate::spectrum::{PhaseModel, Spectrum};

pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_G4_EPS: f64 = 1e-8;
pub const DEFAULT_BRANCH_LIMIT: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn symbol(self) -> char {
        match self {
            Sign::Plus => '+',
            Sign::Minus => '-',
        }
    }
}

/// Wrapped phases, pairwise further apart than the merge tolerance.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateSet<T> {
    values: Vec<T>,
    tol: T,
}

impl<T: Scalar> CandidateSet<T> {
    pub fn empty(tol: T) -> Self {
        CandidateSet {
            values: Vec::new(),
            tol,
        }
    }

    pub fn from_values(values: &[T], tol: T) -> Self {
        let mut set = Self::empty(tol);
        for &v in values {
            set.insert(v);
        }
        set
    }

    /// Adds `wrap(v)` unless a stored value lies within the tolerance.
    pub fn insert(&mut self, v: T) -> bool {
        let v = wrap_phase(v);
        if self.contains(v) {
            return false;
        }
        self.values.push(v);
        true
    }

    pub fn contains(&self, v: T) -> bool {
        self.values
            .iter()
            .any(|&x| wrapped_distance(x, v) <= self.tol)
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn tol(&self) -> T {
        self.tol
    }
}

fn signed_candidates<T: Scalar>(base: T, abs_phase: T, tol: T) -> Vec<(T, Sign)> {
    let plus = wrap_phase(base + abs_phase);
    let minus = wrap_phase(base - abs_phase);
    if wrapped_distance(plus, minus) <= tol {
        let snapped = if abs_phase < T::FRAC_PI_2() {
            T::zero()
        } else {
            T::PI()
        };
        vec![(wrap_phase(base + snapped), Sign::Plus)]
    } else {
        vec![(plus, Sign::Plus), (minus, Sign::Minus)]
    }
}

/// `{phi(m) + phi(n) + |Phi|, phi(m) + phi(n) - |Phi|}`. When the two lie
/// within `tol` of each other `|Phi|` is taken as exactly `0` or `pi` and a
/// single value is returned.
pub fn candidate_set_for<T: Scalar>(
    measurement: &ClosureMeasurement<T>,
    phi_m: T,
    phi_n: T,
    tol: T,
) -> CandidateSet<T> {
    let vals: Vec<T> = signed_candidates(phi_m + phi_n, measurement.abs_phase, tol)
        .into_iter()
        .map(|(v, _)| v)
        .collect();
    CandidateSet::from_values(&vals, tol)
}

/// Values of the first set that every other set matches within `tol`.
pub fn intersect<T: Scalar>(sets: &[CandidateSet<T>], tol: T) -> CandidateSet<T> {
    let mut out = CandidateSet::empty(tol);
    if let Some((first, rest)) = sets.split_first() {
        for &v in first.values() {
            if rest
                .iter()
                .all(|s| s.values().iter().any(|&x| wrapped_distance(x, v) <= tol))
            {
                out.insert(v);
            }
        }
    }
    out
}

/// One branch of the retrieval tree.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseHypothesis<T> {
    pub assignment: BTreeMap<QIndex, T>,
    pub signs: BTreeMap<(QIndex, QIndex), Sign>,
}

impl<T: Scalar> PhaseHypothesis<T> {
    fn root() -> Self {
        let mut assignment = BTreeMap::new();
        assignment.insert(QIndex::ZERO, T::zero());
        PhaseHypothesis {
            assignment,
            signs: BTreeMap::new(),
        }
    }

    pub fn phase(&self, u: QIndex) -> Option<T> {
        self.assignment.get(&u).copied()
    }

    pub fn sign(&self, eq: &ClosureEquation) -> Option<Sign> {
        self.signs.get(&(eq.m, eq.n)).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RetrievalStatus {
    Unique,
    Ambiguous,
    Contradictory,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RetrievalOptions<T> {
    /// Phase fixed at the gauge index (normally `u = 1`).
    pub gauge: T,
    /// Keep both point-reflection branches instead of fixing the first sign.
    pub both_reflections: bool,
    pub tol: T,
    pub branch_limit: usize,
}

impl<T: Scalar> Default for RetrievalOptions<T> {
    fn default() -> Self {
        RetrievalOptions {
            gauge: T::zero(),
            both_reflections: false,
            tol: T::lit(DEFAULT_TOL),
            branch_limit: DEFAULT_BRANCH_LIMIT,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalReport<T> {
    pub pixels: usize,
    pub tol: T,
    pub hypotheses: Vec<PhaseHypothesis<T>>,
    /// Number of distinct values per index across the live hypotheses.
    pub ambiguity: BTreeMap<QIndex, usize>,
    pub equations_used: BTreeMap<QIndex, Vec<ClosureEquation>>,
    /// Canonical equations touching an index with undefined phase.
    pub skipped: Vec<ClosureEquation>,
    /// Canonical equations without a measurement.
    pub missing: Vec<ClosureEquation>,
    pub undefined: BTreeSet<QIndex>,
    pub gauge_index: Option<QIndex>,
}

impl<T: Scalar> RetrievalReport<T> {
    /// Indices that a complete hypothesis assigns.
    pub fn defined_indices(&self) -> Vec<QIndex> {
        (0..self.pixels as i64)
            .map(QIndex::d1)
            .filter(|u| !self.undefined.contains(u))
            .collect()
    }

    pub fn is_complete(&self, h: &PhaseHypothesis<T>) -> bool {
        self.defined_indices()
            .iter()
            .all(|u| h.assignment.contains_key(u))
    }

    pub fn status(&self) -> RetrievalStatus {
        match self.hypotheses.as_slice() {
            [] => RetrievalStatus::Contradictory,
            [h] if self.is_complete(h) => RetrievalStatus::Unique,
            _ => RetrievalStatus::Ambiguous,
        }
    }

    /// Distinct values of `phi(u)` over the live hypotheses.
    pub fn values_at(&self, u: QIndex) -> CandidateSet<T> {
        let mut set = CandidateSet::empty(self.tol);
        for h in &self.hypotheses {
            if let Some(v) = h.phase(u) {
                set.insert(v);
            }
        }
        set
    }

    fn recount(&mut self) {
        let keys: Vec<QIndex> = self.ambiguity.keys().copied().collect();
        for u in keys {
            let n = self.values_at(u).len();
            self.ambiguity.insert(u, n);
        }
    }
}

fn normalise(eq: ClosureEquation) -> (QIndex, QIndex) {
    if eq.m < eq.n {
        (eq.n, eq.m)
    } else {
        (eq.m, eq.n)
    }
}

/// Runs the sequential solver over targets `2..M`.
///
/// `undefined` lists indices whose structure factor vanishes; they are never
/// assigned and every equation touching them is skipped.
pub fn retrieve_1d<T: Scalar>(
    pixels: usize,
    measurements: &[ClosureMeasurement<T>],
    undefined: &BTreeSet<QIndex>,
    opts: &RetrievalOptions<T>,
) -> Result<RetrievalReport<T>> {
    if !(opts.tol > T::zero()) {
        return Err(Error::InvalidArgument("tolerance must be positive".into()));
    }
    let canonical = canonical_equations(pixels, 1)?;
    let top = pixels as i64;
    let mut measured: BTreeMap<(QIndex, QIndex), T> = BTreeMap::new();
    for meas in measurements {
        let key = normalise(meas.equation);
        let (m, n) = key;
        if m.0[1] != 0 || n.0[1] != 0 || n.0[0] < 0 || m.0[0] + n.0[0] >= top {
            return Err(Error::InvalidArgument(format!(
                "equation ({m}, {n}) is off the grid"
            )));
        }
        if !(meas.abs_phase >= T::zero() && meas.abs_phase <= T::PI() + opts.tol) {
            return Err(Error::OutOfRange(format!(
                "|Phi({m}, {n})| = {}",
                meas.abs_phase
            )));
        }
        measured.entry(key).or_insert(meas.abs_phase.min(T::PI()));
    }

    let touches_undefined = |e: &ClosureEquation| {
        undefined.contains(&e.m) || undefined.contains(&e.n) || undefined.contains(&e.target())
    };
    let skipped: Vec<ClosureEquation> = canonical
        .iter()
        .copied()
        .filter(touches_undefined)
        .collect();
    let missing: Vec<ClosureEquation> = canonical
        .iter()
        .copied()
        .filter(|e| !touches_undefined(e) && !measured.contains_key(&(e.m, e.n)))
        .collect();

    let mut root = PhaseHypothesis::root();
    let mut ambiguity = BTreeMap::new();
    ambiguity.insert(QIndex::ZERO, 1);
    let gauge_index = (1..top).map(QIndex::d1).find(|u| !undefined.contains(u));
    if let Some(g) = gauge_index {
        root.assignment.insert(g, wrap_phase(opts.gauge));
        ambiguity.insert(g, 1);
    }

    let mut live = vec![root];
    let mut equations_used = BTreeMap::new();
    let mut reflection_pending = !opts.both_reflections;

    for t in (2..top).map(QIndex::d1) {
        if undefined.contains(&t) || Some(t) == gauge_index {
            continue;
        }
        let usable: Vec<(ClosureEquation, T)> = canonical
            .iter()
            .filter(|e| e.target() == t && !touches_undefined(e))
            .filter_map(|e| measured.get(&(e.m, e.n)).map(|&p| (*e, p)))
            .collect();
        if usable.is_empty() {
            return Err(Error::InsufficientCoverage { index: t.0[0] });
        }

        let mut fixed_plus = None;
        if reflection_pending {
            let pi = T::PI();
            fixed_plus = usable
                .iter()
                .position(|&(_, p)| p > opts.tol && p < pi - opts.tol);
            if fixed_plus.is_some() {
                reflection_pending = false;
            }
        }

        let mut next = Vec::new();
        for h in &live {
            let mut options: Vec<Vec<(T, Sign)>> = Vec::with_capacity(usable.len());
            let mut covered = true;
            for (k, (e, abs_phase)) in usable.iter().enumerate() {
                let (Some(pm), Some(pn)) = (h.phase(e.m), h.phase(e.n)) else {
                    covered = false;
                    break;
                };
                let mut c = signed_candidates(pm + pn, *abs_phase, opts.tol);
                if fixed_plus == Some(k) {
                    c.truncate(1);
                }
                options.push(c);
            }
            if !covered {
                return Err(Error::InsufficientCoverage { index: t.0[0] });
            }
            for &(v, s0) in &options[0] {
                let mut signs = vec![s0];
                for opt in &options[1..] {
                    match opt
                        .iter()
                        .find(|(x, _)| wrapped_distance(*x, v) <= opts.tol)
                    {
                        Some(&(_, s)) => signs.push(s),
                        None => break,
                    }
                }
                if signs.len() < usable.len() {
                    continue;
                }
                let mut child = h.clone();
                child.assignment.insert(t, v);
                for ((e, _), s) in usable.iter().zip(signs) {
                    child.signs.insert((e.m, e.n), s);
                }
                next.push(child);
                if next.len() > opts.branch_limit {
                    return Err(Error::BranchLimitExceeded {
                        count: next.len(),
                        limit: opts.branch_limit,
                    });
                }
            }
        }
        if next.is_empty() {
            return Err(Error::ContradictoryMeasurements { index: t.0[0] });
        }
        live = next;
        equations_used.insert(t, usable.iter().map(|(e, _)| *e).collect());
        ambiguity.insert(t, 0);
    }

    let mut report = RetrievalReport {
        pixels,
        tol: opts.tol,
        hypotheses: live,
        ambiguity,
        equations_used,
        skipped,
        missing,
        undefined: undefined.clone(),
        gauge_index,
    };
    report.recount();
    Ok(report)
}

/// A measured fourth-order correlation at detector differences `u`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct G4Sample<T> {
    pub u: [QIndex; 3],
    pub value: T,
}

/// Diagonal tuples `(u, u, u)` for `u = 1..=(M-1)/3`.
pub fn default_g4_tuples(pixels: usize) -> Vec<[QIndex; 3]> {
    (1..=(pixels.saturating_sub(1) / 3) as i64)
        .map(|u| [QIndex::d1(u); 3])
        .collect()
}

/// Evaluates the fourth-order closed form of `spec` at each tuple.
pub fn sample_g4<T: Scalar, S: Spectrum<T>>(
    spec: &S,
    tuples: &[[QIndex; 3]],
) -> Result<Vec<G4Sample<T>>> {
    tuples
        .iter()
        .map(|&u| {
            Ok(G4Sample {
                u,
                value: g4_closed(spec, u[0], u[1], u[2])?,
            })
        })
        .collect()
}

/// Drops hypotheses whose predicted `g4` misses a sample by more than `eps`.
///
/// `magnitudes[u]` is `|S(u)|` for `u >= 0`. A sample is only checked
/// against hypotheses that assign every phase it needs.
pub fn prune_with_g4<T: Scalar>(
    report: &RetrievalReport<T>,
    count: T,
    magnitudes: &[T],
    samples: &[G4Sample<T>],
    eps: T,
) -> Result<RetrievalReport<T>> {
    let mut kept = Vec::new();
    for h in &report.hypotheses {
        let mut model = PhaseModel::new(count);
        for (i, &mag) in magnitudes.iter().enumerate().skip(1) {
            let u = QIndex::d1(i as i64);
            if report.undefined.contains(&u) {
                model.set(u, T::zero(), None);
            } else {
                model.set(u, mag, h.phase(u));
            }
        }
        let mut consistent = true;
        for s in samples {
            match g4_closed(&model, s.u[0], s.u[1], s.u[2]) {
                Ok(p) => {
                    if (p - s.value).abs() > eps {
                        consistent = false;
                        break;
                    }
                }
                Err(Error::UndefinedPhase { .. }) | Err(Error::IndexOutOfRange { .. }) => {}
                Err(e) => return Err(e),
            }
        }
        if consistent {
            kept.push(h.clone());
        }
    }
    if kept.is_empty() {
        return Err(Error::AllHypothesesPruned);
    }
    let mut out = report.clone();
    out.hypotheses = kept;
    out.recount();
    Ok(out)
}

/// Magnitudes, emitter count and closure measurements recovered from the
/// second- and third-order correlations of a spectrum.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosureData1d<T> {
    pub pixels: usize,
    pub count: T,
    /// `|S(u)|` for `u = 0..M`, zero where undefined.
    pub magnitudes: Vec<T>,
    pub measurements: Vec<ClosureMeasurement<T>>,
    pub undefined: BTreeSet<QIndex>,
}

impl<T: Scalar> ClosureData1d<T> {
    /// Inverts `g2(u)` and `g3(m, n)` read from `spec`.
    pub fn from_spectrum<S: Spectrum<T>>(
        spec: &S,
        pixels: usize,
        mag_eps: T,
        clamp_eps: T,
    ) -> Result<Self> {
        Self::from_correlations(
            pixels,
            |u| g2(spec, u),
            |m, n| g3(spec, m, n),
            mag_eps,
            clamp_eps,
        )
    }

    /// Inverts correlation values supplied by the caller, e.g. noisy ones.
    ///
    /// An index is undefined when `|S|^2 <= mag_eps * N^2`; the squared
    /// magnitude is what the inversion recovers to rounding precision.
    pub fn from_correlations(
        pixels: usize,
        mut g2_at: impl FnMut(QIndex) -> Result<T>,
        mut g3_at: impl FnMut(QIndex, QIndex) -> Result<T>,
        mag_eps: T,
        clamp_eps: T,
    ) -> Result<Self> {
        let count = invert_g2_count(g2_at(QIndex::ZERO)?)?;
        let mut magnitudes = vec![count];
        let mut undefined = BTreeSet::new();
        for i in 1..pixels as i64 {
            let u = QIndex::d1(i);
            let m = invert_g2_magnitude(g2_at(u)?, count, clamp_eps)?;
            if m * m <= mag_eps * count * count {
                undefined.insert(u);
                magnitudes.push(T::zero());
            } else {
                magnitudes.push(m);
            }
        }
        let mut measurements = Vec::new();
        for e in canonical_equations(pixels, 1)? {
            if [e.m, e.n, e.target()].iter().any(|u| undefined.contains(u)) {
                continue;
            }
            let mag = |u: QIndex| magnitudes[u.0[0] as usize];
            let mags = (mag(e.m), mag(e.n), mag(e.target()));
            measurements.push(invert_g3_cosine(
                e,
                g3_at(e.m, e.n)?,
                count,
                mags,
                T::zero(),
                clamp_eps,
            )?);
        }
        Ok(ClosureData1d {
            pixels,
            count,
            magnitudes,
            measurements,
            undefined,
        })
    }

    pub fn retrieve(&self, opts: &RetrievalOptions<T>) -> Result<RetrievalReport<T>> {
        retrieve_1d(self.pixels, &self.measurements, &self.undefined, opts)
    }
}

/// Phases of `spec` at `0..M`, skipping the given undefined indices.
pub fn phases_1d<T: Scalar, S: Spectrum<T>>(
    spec: &S,
    pixels: usize,
    undefined: &BTreeSet<QIndex>,
) -> Result<BTreeMap<QIndex, T>> {
    let mut out = BTreeMap::new();
    for u in (0..pixels as i64).map(QIndex::d1) {
        if !undefined.contains(&u) {
            out.insert(u, wrap_phase(spec.arg(u)?));
        }
    }
    Ok(out)
}

fn dot<T: Scalar>(u: QIndex, a: [T; 2]) -> T {
    T::from_int(u.0[0]) * a[0] + T::from_int(u.0[1]) * a[1]
}

fn worst<T: Scalar>(terms: &[(QIndex, T)], a: [T; 2]) -> T {
    terms
        .iter()
        .map(|&(u, d)| wrap_phase(d + dot(u, a)).abs())
        .fold(T::zero(), T::max)
}

/// Best gauge transformation found by [`gauge_fit`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeFit<T> {
    /// Remaining `max_u |wrap(s r(u) + a.u - t(u))|`.
    pub error: T,
    /// `s`, either `1` or `-1`.
    pub reflection: T,
    /// `a`; the second component is zero in one dimension.
    pub ramp: [T; 2],
}

impl<T: Scalar> GaugeFit<T> {
    /// `wrap(s r + a.u)`, the retrieved phase moved onto the reference.
    pub fn apply(&self, u: QIndex, phase: T) -> T {
        wrap_phase(self.reflection * phase + dot(u, self.ramp))
    }
}

/// Minimises `max_u |wrap(s r(u) + a.u - t(u))|` over the reflection `s`
/// and a continuous ramp `a`.
///
/// The objective is piecewise linear in `a`, so its minimum sits where one
/// term vanishes or two terms meet; only those points are evaluated.
/// Indices missing from either map are ignored.
pub fn gauge_fit<T: Scalar>(
    retrieved: &BTreeMap<QIndex, T>,
    truth: &BTreeMap<QIndex, T>,
    dim: usize,
) -> GaugeFit<T> {
    let tau = T::lit(TAU);
    let zero = [T::zero(), T::zero()];
    let mut best = GaugeFit {
        error: T::infinity(),
        reflection: T::one(),
        ramp: zero,
    };
    for s in [T::one(), -T::one()] {
        let terms: Vec<(QIndex, T)> = retrieved
            .iter()
            .filter_map(|(u, &r)| truth.get(u).map(|&t| (*u, wrap_phase(s * r - t))))
            .collect();
        if terms.is_empty() {
            return GaugeFit {
                error: T::zero(),
                ..best
            };
        }
        let mut consider = |a: [T; 2]| {
            let e = worst(&terms, a);
            if e < best.error {
                best = GaugeFit {
                    error: e,
                    reflection: s,
                    ramp: a,
                };
            }
        };
        consider(zero);
        let mut lines: Vec<(QIndex, T)> = Vec::new();
        for (i, &(u, du)) in terms.iter().enumerate() {
            lines.push((u, -du));
            for &(v, dv) in &terms[i + 1..] {
                lines.push((u - v, dv - du));
                lines.push((u + v, -du - dv));
            }
        }
        lines.retain(|(w, _)| !w.is_zero());
        if dim == 1 {
            for &(w, c) in &lines {
                let wx = w.0[0];
                for k in 0..wx.abs() {
                    consider([(c + tau * T::from_int(k)) / T::from_int(wx), T::zero()]);
                }
            }
        } else {
            let range = |w: QIndex, c: T| {
                let lo: i64 = w.0.iter().map(|&x| x.min(0)).sum();
                let hi: i64 = w.0.iter().map(|&x| x.max(0)).sum();
                let cf = (c / tau).floor().to_i64().unwrap_or(0);
                (lo - cf - 1)..=(hi - cf + 1)
            };
            for (i, &(w1, c1)) in lines.iter().enumerate() {
                for &(w2, c2) in &lines[i + 1..] {
                    let det = w1.0[0] * w2.0[1] - w1.0[1] * w2.0[0];
                    if det == 0 {
                        continue;
                    }
                    let det = T::from_int(det);
                    for k1 in range(w1, c1) {
                        let b1 = c1 + tau * T::from_int(k1);
                        for k2 in range(w2, c2) {
                            let b2 = c2 + tau * T::from_int(k2);
                            let ax = (b1 * T::from_int(w2.0[1]) - b2 * T::from_int(w1.0[1])) / det;
                            let ay = (T::from_int(w1.0[0]) * b2 - T::from_int(w2.0[0]) * b1) / det;
                            consider([ax, ay]);
                        }
                    }
                }
            }
        }
    }
    best
}

/// Alignment error of [`gauge_fit`].
pub fn gauge_align<T: Scalar>(
    retrieved: &BTreeMap<QIndex, T>,
    truth: &BTreeMap<QIndex, T>,
    dim: usize,
) -> T {
    gauge_fit(retrieved, truth, dim).error
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::closure::ClosureEquation;

    fn eq(m: i64, n: i64) -> ClosureEquation {
        ClosureEquation::classify(QIndex::d1(m), QIndex::d1(n))
    }

    fn meas(m: i64, n: i64, p: f64) -> ClosureMeasurement<f64> {
        ClosureMeasurement::from_abs_phase(eq(m, n), p)
    }

    fn five_pixel_example() -> Vec<ClosureMeasurement<f64>> {
        vec![
            meas(1, 1, 1.0),
            meas(2, 1, 1.0),
            meas(3, 1, 1.0),
            meas(2, 2, 1.0),
        ]
    }

    fn sorted(set: &CandidateSet<f64>) -> Vec<f64> {
        let mut v = set.values().to_vec();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn candidate_sets() {
        let tol = 1e-6;
        let s = candidate_set_for(&meas(1, 1, 1.0), 0.0, 0.0, tol);
        assert_eq!(sorted(&s), vec![-1.0, 1.0]);
        assert_eq!(
            candidate_set_for(&meas(1, 1, 0.0), 0.2, 0.3, tol).values(),
            &[0.5]
        );
        let s = candidate_set_for(&meas(1, 1, std::f64::consts::PI), 0.5, 0.0, tol);
        assert_eq!(s.len(), 1);
        assert!(wrapped_distance(s.values()[0], 0.5 + std::f64::consts::PI) < 1e-12);
    }

    #[test]
    fn intersections() {
        let tol = 1e-6;
        let a = CandidateSet::from_values(&[3.0, 1.0, -1.0], tol);
        let b = CandidateSet::from_values(&[3.0, 1.0], tol);
        assert_eq!(intersect(&[a, b.clone()], tol).values(), &[3.0, 1.0]);
        let c = CandidateSet::from_values(&[1.0, -1.0], tol);
        assert_eq!(intersect(&[c.clone(), c.clone()], tol), c);
        let d = CandidateSet::from_values(&[2.0, 0.0], tol);
        let e = CandidateSet::from_values(&[0.0], tol);
        assert_eq!(intersect(&[d, e], tol).values(), &[0.0]);
        let f = CandidateSet::from_values(&[2.5], tol);
        assert!(intersect(&[b, f], tol).is_empty());
    }

    #[test]
    fn five_pixel_example_is_ambiguous() {
        let r = retrieve_1d(
            5,
            &five_pixel_example(),
            &BTreeSet::new(),
            &RetrievalOptions::default(),
        )
        .unwrap();
        assert_eq!(r.status(), RetrievalStatus::Ambiguous);
        assert_eq!(sorted(&r.values_at(QIndex::d1(2))), vec![1.0]);
        assert_eq!(sorted(&r.values_at(QIndex::d1(3))), vec![0.0, 2.0]);
        assert_eq!(sorted(&r.values_at(QIndex::d1(4))), vec![1.0, 3.0]);
        let pairs: Vec<(f64, f64)> = r
            .hypotheses
            .iter()
            .map(|h| {
                (
                    h.phase(QIndex::d1(3)).unwrap(),
                    h.phase(QIndex::d1(4)).unwrap(),
                )
            })
            .collect();
        assert_eq!(pairs, vec![(2.0, 3.0), (2.0, 1.0), (0.0, 1.0)]);
        assert_eq!(r.ambiguity[&QIndex::d1(4)], 2);
        assert_eq!(r.equations_used[&QIndex::d1(4)].len(), 2);
    }

    #[test]
    fn five_pixel_example_resolved_by_g4() {
        let r = retrieve_1d(
            5,
            &five_pixel_example(),
            &BTreeSet::new(),
            &RetrievalOptions::default(),
        )
        .unwrap();
        let mags = [5.0, 2.0, 1.0, 1.5, 1.0];
        let truth = [Some(0.0), Some(0.0), Some(1.0), Some(0.0), Some(1.0)];
        let model = PhaseModel::from_1d(5.0, &mags, &truth);
        let samples = sample_g4(&model, &default_g4_tuples(5)).unwrap();
        assert_eq!(samples.len(), 1);
        let p = prune_with_g4(&r, 5.0, &mags, &samples, 1e-8).unwrap();
        assert_eq!(p.status(), RetrievalStatus::Unique);
        assert_eq!(p.hypotheses[0].phase(QIndex::d1(3)), Some(0.0));
        assert_eq!(p.hypotheses[0].phase(QIndex::d1(4)), Some(1.0));
        assert_eq!(p.ambiguity[&QIndex::d1(4)], 1);
        // a consistent single hypothesis passes through untouched
        assert_eq!(prune_with_g4(&p, 5.0, &mags, &samples, 1e-8).unwrap(), p);
        let bad = [G4Sample {
            value: samples[0].value + 1.0,
            ..samples[0]
        }];
        assert_eq!(
            prune_with_g4(&r, 5.0, &mags, &bad, 1e-8),
            Err(Error::AllHypothesesPruned)
        );
    }

    #[test]
    fn zero_closure_phases_are_unique() {
        let ms: Vec<_> = canonical_equations(9, 1)
            .unwrap()
            .into_iter()
            .map(|e| ClosureMeasurement::from_abs_phase(e, 0.0))
            .collect();
        let r = retrieve_1d(9, &ms, &BTreeSet::new(), &RetrievalOptions::default()).unwrap();
        assert_eq!(r.status(), RetrievalStatus::Unique);
        assert!(r.hypotheses[0].assignment.values().all(|&v| v == 0.0));
        assert!(r.missing.is_empty() && r.skipped.is_empty());
    }

    #[test]
    fn both_reflections_doubles_the_tree() {
        let opts = RetrievalOptions {
            both_reflections: true,
            ..Default::default()
        };
        let r = retrieve_1d(5, &five_pixel_example(), &BTreeSet::new(), &opts).unwrap();
        assert_eq!(r.hypotheses.len(), 6);
        assert_eq!(sorted(&r.values_at(QIndex::d1(2))), vec![-1.0, 1.0]);
    }

    #[test]
    fn contradiction_and_coverage_errors() {
        let mut ms = five_pixel_example();
        ms[3] = meas(2, 2, 0.3);
        let err = retrieve_1d(5, &ms, &BTreeSet::new(), &RetrievalOptions::default());
        assert_eq!(err, Err(Error::ContradictoryMeasurements { index: 4 }));
        let err = retrieve_1d(
            5,
            &five_pixel_example()[..2],
            &BTreeSet::new(),
            &RetrievalOptions::default(),
        );
        assert_eq!(err, Err(Error::InsufficientCoverage { index: 4 }));
        let opts = RetrievalOptions {
            branch_limit: 2,
            ..Default::default()
        };
        let err = retrieve_1d(5, &five_pixel_example(), &BTreeSet::new(), &opts);
        assert!(matches!(err, Err(Error::BranchLimitExceeded { .. })));
    }

    #[test]
    fn undefined_indices_are_skipped() {
        let undefined: BTreeSet<_> = [QIndex::d1(3)].into_iter().collect();
        let ms = vec![meas(1, 1, 1.0), meas(2, 2, 1.0)];
        let r = retrieve_1d(5, &ms, &undefined, &RetrievalOptions::default()).unwrap();
        assert_eq!(r.skipped, vec![eq(2, 1), eq(3, 1)]);
        assert!(r.missing.is_empty());
        assert_eq!(r.status(), RetrievalStatus::Ambiguous);
        assert_eq!(r.hypotheses[0].phase(QIndex::d1(3)), None);
    }

    #[test]
    fn gauge_moves_when_first_index_vanishes() {
        let undefined: BTreeSet<_> = [1, 2, 4, 5].into_iter().map(QIndex::d1).collect();
        let r = retrieve_1d(
            7,
            &[meas(3, 3, 0.4)],
            &undefined,
            &RetrievalOptions::default(),
        )
        .unwrap();
        assert_eq!(r.gauge_index, Some(QIndex::d1(3)));
        assert_eq!(r.status(), RetrievalStatus::Unique);
        assert!((r.hypotheses[0].phase(QIndex::d1(6)).unwrap() - 0.4).abs() < 1e-15);
    }

    fn map(vals: &[f64]) -> BTreeMap<QIndex, f64> {
        vals.iter()
            .enumerate()
            .map(|(i, &v)| (QIndex::d1(i as i64), v))
            .collect()
    }

    #[test]
    fn gauge_alignment() {
        let truth = [0.0, 0.4, -2.0, 1.3, 3.0, -0.7];
        let t = map(&truth);
        assert!(gauge_align(&t, &t, 1) < 1e-12);
        let ramp: Vec<f64> = truth
            .iter()
            .enumerate()
            .map(|(u, v)| wrap_phase(v + 0.3 * u as f64))
            .collect();
        assert!(gauge_align(&map(&ramp), &t, 1) < 1e-12);
        let refl: Vec<f64> = truth.iter().map(|v| -v).collect();
        assert!(gauge_align(&map(&refl), &t, 1) < 1e-12);
        let fit = gauge_fit(&map(&refl), &t, 1);
        assert_eq!(fit.reflection, -1.0);
        for (u, v) in map(&refl) {
            assert!(wrapped_distance(fit.apply(u, v), t[&u]) < 1e-12);
        }
        let mut off = truth;
        off[3] += 0.2;
        let e = gauge_align(&map(&off), &t, 1);
        // balanced between u = 3 and u = 5 at a = -0.025
        assert!((e - 0.125).abs() < 1e-12, "{e}");
    }

    #[test]
    fn gauge_alignment_2d() {
        let mut t = BTreeMap::new();
        let mut r = BTreeMap::new();
        let mut v = 0.37;
        for x in 0..3 {
            for y in 0..3 {
                v = wrap_phase(v * 7.1 + 1.3);
                let u = QIndex::d2(x, y);
                t.insert(u, v);
                r.insert(u, wrap_phase(-v + 0.2 * x as f64 - 1.1 * y as f64));
            }
        }
        assert!(gauge_align(&r, &t, 2) < 1e-12);
    }
}
