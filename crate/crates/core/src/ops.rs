use serde::{Deserialize, Serialize};

/// Tally of basic operations performed by a solver.
///
/// Only arithmetic and comparisons on problem variables inside the solver
/// inner loops are counted. A logarithm counts as one multiplication.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounter {
    pub adds: u64,
    pub muls: u64,
    pub comparisons: u64,
}

impl OpCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, n: u64) {
        self.adds += n;
    }

    #[inline]
    pub fn mul(&mut self, n: u64) {
        self.muls += n;
    }

    #[inline]
    pub fn cmp(&mut self, n: u64) {
        self.comparisons += n;
    }

    pub fn total(&self) -> u64 {
        self.adds + self.muls + self.comparisons
    }

    pub fn merge(&mut self, other: &OpCounter) {
        self.adds += other.adds;
        self.muls += other.muls;
        self.comparisons += other.comparisons;
    }
}

impl std::ops::Sub for OpCounter {
    type Output = OpCounter;

    fn sub(self, rhs: OpCounter) -> OpCounter {
        OpCounter {
            adds: self.adds - rhs.adds,
            muls: self.muls - rhs.muls,
            comparisons: self.comparisons - rhs.comparisons,
        }
    }
}
