use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

/// Integer momentum index on the detector lattice.
///
/// One- and two-dimensional indices share this type; a 1D index keeps its
/// second component at zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct QIndex(pub [i64; 2]);

impl QIndex {
    pub const ZERO: QIndex = QIndex([0, 0]);

    pub const fn d1(u: i64) -> Self {
        QIndex([u, 0])
    }

    pub const fn d2(ux: i64, uy: i64) -> Self {
        QIndex([ux, uy])
    }

    pub fn is_zero(self) -> bool {
        self.0 == [0, 0]
    }

    /// Largest absolute component.
    pub fn extent(self) -> i64 {
        self.0[0].abs().max(self.0[1].abs())
    }
}

impl Add for QIndex {
    type Output = QIndex;
    fn add(self, o: QIndex) -> QIndex {
        QIndex([self.0[0] + o.0[0], self.0[1] + o.0[1]])
    }
}

impl Sub for QIndex {
    type Output = QIndex;
    fn sub(self, o: QIndex) -> QIndex {
        QIndex([self.0[0] - o.0[0], self.0[1] - o.0[1]])
    }
}

impl Neg for QIndex {
    type Output = QIndex;
    fn neg(self) -> QIndex {
        QIndex([-self.0[0], -self.0[1]])
    }
}

impl Mul<QIndex> for i64 {
    type Output = QIndex;
    fn mul(self, u: QIndex) -> QIndex {
        QIndex([self * u.0[0], self * u.0[1]])
    }
}

impl fmt::Display for QIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0[1] == 0 {
            write!(f, "{}", self.0[0])
        } else {
            write!(f, "({},{})", self.0[0], self.0[1])
        }
    }
}

impl From<i64> for QIndex {
    fn from(u: i64) -> Self {
        QIndex::d1(u)
    }
}

impl From<[i64; 2]> for QIndex {
    fn from(u: [i64; 2]) -> Self {
        QIndex(u)
    }
}
