//! Input data: the gluing matrix of the bundle and the data of a fiber-preserving map.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{IntMatrix2, IntVec2};

/// The torus bundle `MA = T × [0,1] / (p, 0) ~ (A·p, 1)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleSpec {
    pub gluing: IntMatrix2,
}

impl BundleSpec {
    pub fn new(gluing: IntMatrix2) -> Self {
        Self { gluing }
    }

    /// Rejects gluing matrices with `|det| ≠ 1`.
    pub fn validated(gluing: IntMatrix2) -> Result<Self> {
        if !gluing.is_unimodular() {
            return Err(Error::NonUnimodular { det: gluing.det() });
        }
        Ok(Self { gluing })
    }

    pub fn check_unimodular(&self) -> Result<()> {
        if self.gluing.is_unimodular() {
            Ok(())
        } else {
            Err(Error::NonUnimodular { det: self.gluing.det() })
        }
    }
}

/// A fiber-preserving map described by its action on the fundamental group:
/// `a ↦ a^b1 b^b2`, `b ↦ a^b3 b^b4`, `c ↦ a^c1 b^c2 c`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiberedMapSpec {
    pub fiber: IntMatrix2,
    pub translation: IntVec2,
}

impl FiberedMapSpec {
    pub fn new(fiber: IntMatrix2, translation: IntVec2) -> Self {
        Self { fiber, translation }
    }

    /// The normalized form `a ↦ a`, `b ↦ a^b3 b^b4`, `c ↦ a^c1 b^c2 c`.
    pub fn normalized(b3: impl Into<BigInt>, b4: impl Into<BigInt>, c1: impl Into<BigInt>, c2: impl Into<BigInt>) -> Self {
        Self {
            fiber: IntMatrix2 { a1: BigInt::one(), a2: BigInt::zero(), a3: b3.into(), a4: b4.into() },
            translation: IntVec2::new(c1, c2),
        }
    }

    pub fn is_normalized(&self) -> bool {
        self.fiber.a1.is_one() && self.fiber.a2.is_zero()
    }

    pub fn b3(&self) -> &BigInt {
        &self.fiber.a3
    }

    pub fn b4(&self) -> &BigInt {
        &self.fiber.a4
    }

    pub fn c1(&self) -> &BigInt {
        &self.translation.x
    }

    pub fn c2(&self) -> &BigInt {
        &self.translation.y
    }
}
