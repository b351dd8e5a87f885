//! Brute-force evaluation of normally ordered correlation functions.
//!
//! The expectation of `k` raising and `k` lowering operators of
//! initially excited, incoherently emitting two-level atoms is nonzero only
//! when every lowering operator is paired with a raising operator of the
//! same emitter, and no emitter carries two pairs. The sum therefore runs
//! over ordered tuples of pairwise distinct emitters and over all pairings,
//! i.e. over the symmetric group `S_k`. Nothing here reads a structure
//! factor table, so it is independent of the closed forms in
//! [`crate::correlations`].

use itertools::Itertools;
use num_complex::Complex;

use crate::emitters::{EmitterConfig, QGrid};
use crate::error::{Error, Result};
use crate::index::QIndex;
use crate::scalar::{cis, Scalar};

/// Largest `N` the brute-force sum accepts, per order.
pub const MAX_EMITTERS: [usize; 5] = [0, 0, 2000, 150, 12];

/// Conjugacy class of a permutation of at most four elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CycleType {
    Identity,
    Transposition,
    DoubleTransposition,
    ThreeCycle,
    FourCycle,
}

impl CycleType {
    pub const ALL: [CycleType; 5] = [
        CycleType::Identity,
        CycleType::Transposition,
        CycleType::DoubleTransposition,
        CycleType::ThreeCycle,
        CycleType::FourCycle,
    ];

    /// Classifies a partition (cycle lengths, any order).
    pub fn from_partition(cycles: &[usize]) -> Option<Self> {
        let mut long: Vec<usize> = cycles.iter().copied().filter(|&c| c > 1).collect();
        long.sort_unstable_by(|a, b| b.cmp(a));
        match long[..] {
            [] => Some(CycleType::Identity),
            [2] => Some(CycleType::Transposition),
            [2, 2] => Some(CycleType::DoubleTransposition),
            [3] => Some(CycleType::ThreeCycle),
            [4] => Some(CycleType::FourCycle),
            _ => None,
        }
    }

    /// Number of momentum arguments of the matching fourth-order kernel.
    pub fn kernel_arity(self) -> usize {
        match self {
            CycleType::Identity => 0,
            CycleType::Transposition => 1,
            CycleType::DoubleTransposition => 2,
            CycleType::ThreeCycle => 3,
            CycleType::FourCycle => 4,
        }
    }
}

/// A permutation of `{0, .., k-1}` stored as its image.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    image: Vec<usize>,
}

impl Permutation {
    pub fn new(image: Vec<usize>) -> Result<Self> {
        let k = image.len();
        let mut seen = vec![false; k];
        for &x in &image {
            if x >= k || std::mem::replace(&mut seen[x], true) {
                return Err(Error::InvalidArgument(format!(
                    "{image:?} is not a bijection"
                )));
            }
        }
        Ok(Permutation { image })
    }

    pub fn order(&self) -> usize {
        self.image.len()
    }

    pub fn image(&self) -> &[usize] {
        &self.image
    }

    pub fn apply(&self, a: usize) -> usize {
        self.image[a]
    }

    /// Disjoint cycles, each starting at its smallest element, fixed points
    /// included.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.order()];
        let mut out = Vec::new();
        for start in 0..self.order() {
            if seen[start] {
                continue;
            }
            let mut cycle = vec![start];
            seen[start] = true;
            let mut x = self.image[start];
            while x != start {
                seen[x] = true;
                cycle.push(x);
                x = self.image[x];
            }
            out.push(cycle);
        }
        out
    }

    /// Cycle lengths in non-increasing order.
    pub fn cycle_partition(&self) -> Vec<usize> {
        let mut p: Vec<usize> = self.cycles().iter().map(Vec::len).collect();
        p.sort_unstable_by(|a, b| b.cmp(a));
        p
    }

    pub fn cycle_type(&self) -> CycleType {
        CycleType::from_partition(&self.cycle_partition()).expect("order at most four")
    }

    /// Cycle notation with 1-based labels, e.g. `(1 3 2)`; identity is `()`.
    pub fn cycle_notation(&self) -> String {
        let parts: Vec<String> = self
            .cycles()
            .into_iter()
            .filter(|c| c.len() > 1)
            .map(|c| format!("({})", c.iter().map(|x| (x + 1).to_string()).join(" ")))
            .collect();
        if parts.is_empty() {
            "()".to_string()
        } else {
            parts.concat()
        }
    }
}

/// All `k!` permutations of order `k` in lexicographic image order.
pub fn enumerate_permutations(k: usize) -> Result<Vec<Permutation>> {
    if !(2..=4).contains(&k) {
        return Err(Error::InvalidArgument(format!(
            "permutation order must be 2..=4, got {k}"
        )));
    }
    Ok((0..k)
        .permutations(k)
        .map(|image| Permutation { image })
        .collect())
}

/// Detector wave vectors `k_1 = 0`, `k_{a+1} = k_a + q(u_a)`.
pub fn detector_momenta<T: Scalar>(grid: &QGrid<T>, diffs: &[QIndex]) -> Vec<Vec<T>> {
    let mut acc = QIndex::ZERO;
    let mut out = vec![grid.q(acc)];
    for &u in diffs {
        acc = acc + u;
        out.push(grid.q(acc));
    }
    out
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |s, (&x, &y)| s + x * y)
}

/// `(1/N^k) sum_{distinct i_1..i_k} sum_{sigma in S_k}
/// exp(i sum_a k_a.R_{i_a}) exp(-i sum_a k_a.R_{i_sigma(a)})`, complex.
pub fn expectation_bruteforce_complex<T: Scalar>(
    config: &EmitterConfig<T>,
    momenta: &[Vec<T>],
) -> Result<Complex<T>> {
    let k = momenta.len();
    let perms = enumerate_permutations(k)?;
    for m in momenta {
        if m.len() != config.dim() {
            return Err(Error::DimensionMismatch {
                expected: config.dim(),
                got: m.len(),
            });
        }
    }
    let n = config.len();
    if n > MAX_EMITTERS[k] {
        return Err(Error::TooLarge {
            n,
            cap: MAX_EMITTERS[k],
            order: k,
        });
    }
    // phase[a][i] = k_a . R_i
    let phase: Vec<Vec<T>> = momenta
        .iter()
        .map(|ka| config.positions().map(|r| dot(ka, r)).collect())
        .collect();

    let mut total = Complex::new(T::zero(), T::zero());
    for tuple in (0..n).permutations(k) {
        let raised = (0..k).fold(T::zero(), |s, a| s + phase[a][tuple[a]]);
        for sigma in &perms {
            let lowered = (0..k).fold(T::zero(), |s, a| s + phase[a][tuple[sigma.apply(a)]]);
            total += cis(raised - lowered);
        }
    }
    Ok(total / T::from_count(n).powi(k as i32))
}

/// Real-valued brute-force `g^(k)`; fails if the imaginary residue exceeds
/// [`Scalar::cancel_tol`].
pub fn expectation_bruteforce<T: Scalar>(
    config: &EmitterConfig<T>,
    momenta: &[Vec<T>],
) -> Result<T> {
    let z = expectation_bruteforce_complex(config, momenta)?;
    if z.im.abs() > T::cancel_tol() {
        return Err(Error::ImaginaryResidue {
            residue: z.im.abs().to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(z.re)
}

/// Brute-force `g^(k)` at difference indices on a grid.
pub fn correlation_bruteforce<T: Scalar>(
    config: &EmitterConfig<T>,
    grid: &QGrid<T>,
    diffs: &[QIndex],
) -> Result<T> {
    expectation_bruteforce(config, &detector_momenta(grid, diffs))
}

fn kd(a: usize, b: usize) -> i32 {
    i32::from(a == b)
}

/// `(1-d_ij)(1-d_ik)(1-d_il)(1-d_jk)(1-d_jl)(1-d_kl)`.
pub fn del_product(i: usize, j: usize, k: usize, l: usize) -> i32 {
    (1 - kd(i, j))
        * (1 - kd(i, k))
        * (1 - kd(i, l))
        * (1 - kd(j, k))
        * (1 - kd(j, l))
        * (1 - kd(k, l))
}

/// Expansion of [`del_product`] into sums of Kronecker-delta products,
/// term by term as used when deriving the fourth-order kernels.
pub fn del_expansion(i: usize, j: usize, k: usize, l: usize) -> i32 {
    let d = kd;
    1 - d(i, j) * d(i, k) * d(i, l)
        - d(i, j) * d(i, l) * d(j, k)
        - d(i, j) * d(i, k) * d(j, l)
        - d(i, j) * d(j, k) * d(j, l)
        - d(i, j) * d(i, k) * d(k, l)
        - d(i, j) * d(j, k) * d(k, l)
        + d(i, j) * d(k, l)
        + d(i, l) * d(j, k)
        + d(i, k) * d(j, l)
        + d(i, j) * d(i, k)
        + d(i, j) * d(j, k)
        + d(i, j) * d(i, l)
        + d(i, j) * d(j, l)
        + d(i, k) * d(i, l)
        + d(i, k) * d(k, l)
        + d(j, k) * d(j, l)
        + d(j, k) * d(k, l)
        - d(i, j)
        - d(i, k)
        - d(i, l)
        - d(j, k)
        - d(j, l)
        - d(k, l)
}

/// `sum_{i,j,k,l} del(i,j,k,l) * f(i,j,k,l)` for the representative phase
/// factor of one fourth-order cycle type. `args` are physical momenta.
pub fn restricted_pairing_sum<T: Scalar>(
    kind: CycleType,
    config: &EmitterConfig<T>,
    args: &[Vec<T>],
) -> Result<Complex<T>> {
    if args.len() != kind.kernel_arity() {
        return Err(Error::InvalidArgument(format!(
            "{kind:?} takes {} momenta, got {}",
            kind.kernel_arity(),
            args.len()
        )));
    }
    let n = config.len();
    if n > MAX_EMITTERS[4] {
        return Err(Error::TooLarge {
            n,
            cap: MAX_EMITTERS[4],
            order: 4,
        });
    }
    let ph: Vec<Vec<T>> = args
        .iter()
        .map(|q| config.positions().map(|r| dot(q, r)).collect())
        .collect();
    let mut total = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let w = del_product(i, j, k, l);
                    if w == 0 {
                        continue;
                    }
                    let angle = match kind {
                        CycleType::Identity => T::zero(),
                        CycleType::Transposition => -(ph[0][k] - ph[0][l]),
                        CycleType::DoubleTransposition => {
                            -(ph[0][i] - ph[0][j]) - (ph[1][k] - ph[1][l])
                        }
                        CycleType::ThreeCycle => -ph[2][j] + ph[0][k] + ph[1][l],
                        CycleType::FourCycle => -ph[3][i] + ph[0][j] + ph[1][k] + ph[2][l],
                    };
                    total += cis(angle) * T::from_int(i64::from(w));
                }
            }
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;

    fn census(k: usize) -> BTreeMap<CycleType, usize> {
        let mut m = BTreeMap::new();
        for p in enumerate_permutations(k).unwrap() {
            *m.entry(p.cycle_type()).or_insert(0) += 1;
        }
        m
    }

    #[test]
    fn s2_s3_s4_type_counts() {
        use CycleType::*;
        assert_eq!(
            census(2),
            BTreeMap::from([(Identity, 1), (Transposition, 1)])
        );
        assert_eq!(
            census(3),
            BTreeMap::from([(Identity, 1), (Transposition, 3), (ThreeCycle, 2)])
        );
        assert_eq!(
            census(4),
            BTreeMap::from([
                (Identity, 1),
                (Transposition, 6),
                (DoubleTransposition, 3),
                (ThreeCycle, 8),
                (FourCycle, 6)
            ])
        );
        assert!(enumerate_permutations(5).is_err());
        assert!(enumerate_permutations(1).is_err());
    }

    #[test]
    fn enumeration_is_lexicographic() {
        let p = enumerate_permutations(3).unwrap();
        let images: Vec<&[usize]> = p.iter().map(|x| x.image()).collect();
        assert_eq!(images[0], &[0, 1, 2]);
        assert_eq!(images[5], &[2, 1, 0]);
        assert!(images.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn cycle_notation_matches_two_line_form() {
        // 1->3, 2->1, 3->2 is (1 3 2)
        let p = Permutation::new(vec![2, 0, 1]).unwrap();
        assert_eq!(p.cycle_notation(), "(1 3 2)");
        assert_eq!(Permutation::new(vec![0, 1]).unwrap().cycle_notation(), "()");
        assert_eq!(
            Permutation::new(vec![1, 0, 3, 2]).unwrap().cycle_notation(),
            "(1 2)(3 4)"
        );
        assert!(Permutation::new(vec![0, 0]).is_err());
    }

    #[test]
    fn single_emitter_gives_no_pairs() {
        let cfg = EmitterConfig::from_1d(&[0.3]).unwrap();
        let g = QGrid::square(1, 5).unwrap();
        for k in 2..=4 {
            let diffs = vec![QIndex::d1(1); k - 1];
            assert_eq!(correlation_bruteforce(&cfg, &g, &diffs).unwrap(), 0.0);
        }
    }

    #[test]
    fn equal_detectors_second_order() {
        let cfg = EmitterConfig::from_1d(&[0.0, 1.1, 2.5, 4.0, 6.6]).unwrap();
        let v: f64 = expectation_bruteforce(&cfg, &[vec![0.7], vec![0.7]]).unwrap();
        assert!((v - 2.0 * (1.0 - 1.0 / 5.0)).abs() < 1e-14);
    }

    #[test]
    fn cap_is_enforced() {
        let xs: Vec<f64> = (0..13).map(f64::from).collect();
        let cfg = EmitterConfig::from_1d(&xs).unwrap();
        let err = expectation_bruteforce(&cfg, &vec![vec![0.0]; 4]).unwrap_err();
        assert!(matches!(err, Error::TooLarge { n: 13, .. }));
    }

    #[test]
    fn identity_restricted_sum_n3() {
        let cfg = EmitterConfig::from_1d(&[0.0, 1.0, 5.0]).unwrap();
        let z = restricted_pairing_sum(CycleType::Identity, &cfg, &[]).unwrap();
        // four distinct indices out of three emitters: none
        assert_eq!(z, Complex::new(0.0, 0.0));
        let cfg4 = EmitterConfig::from_1d(&[0.0, 1.0, 5.0, 2.0]).unwrap();
        let z = restricted_pairing_sum(CycleType::Identity, &cfg4, &[]).unwrap();
        assert_eq!(z.re, 24.0);
    }

    #[test]
    fn del_expansion_exhaustive() {
        for (i, j, k, l) in (1..=6)
            .cartesian_product(1..=6)
            .cartesian_product(1..=6)
            .cartesian_product(1..=6)
            .map(|(((a, b), c), d)| (a, b, c, d))
        {
            assert_eq!(
                del_product(i, j, k, l),
                del_expansion(i, j, k, l),
                "({i},{j},{k},{l})"
            );
        }
    }
}
