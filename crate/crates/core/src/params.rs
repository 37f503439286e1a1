use std::fmt;

use crate::{Error, Result};

/// The parameter pair `(k, ℓ)` of the generalised Thue–Morse family.
///
/// Both entries are positive; the substitution length `L = k + ℓ ≥ 2` is
/// derived and never stored separately, so it can never go inconsistent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Params {
    k: u32,
    l: u32,
}

impl Params {
    /// Creates a parameter pair; both components must be at least 1.
    pub fn new(k: u32, l: u32) -> Result<Self> {
        if k < 1 || l < 1 {
            return Err(Error::Domain(format!(
                "parameters must satisfy k ≥ 1 and l ≥ 1, got ({k}, {l})"
            )));
        }
        Ok(Params { k, l })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn l(&self) -> u32 {
        self.l
    }

    /// The substitution length `L = k + ℓ`.
    pub fn length(&self) -> u32 {
        self.k + self.l
    }

    /// `k − ℓ`, the third eigenvalue of the gTM cohomology action.
    pub fn k_minus_l(&self) -> i64 {
        i64::from(self.k) - i64::from(self.l)
    }

    /// The classical Thue–Morse case `k = ℓ = 1`.
    pub fn is_classical(&self) -> bool {
        self.k == 1 && self.l == 1
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.k, self.l)
    }
}
