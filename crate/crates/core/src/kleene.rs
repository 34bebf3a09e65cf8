//! *-continuous Kleene algebras and the bounded scalar instances.
//!
//! An algebra is a value (possibly carrying context, like the feature
//! model of the featured lift) whose methods implement the operations on
//! its element type.

use std::fmt::{self, Debug};
use std::hash::Hash;

use crate::number::ExtRational;

/// Idempotent semiring with a computable star `x* = ⊕_{n≥0} xⁿ`.
pub trait KleeneAlgebra {
    type Elem: Clone + Eq + Hash + Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn plus(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn times(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem;
    fn star(&self, x: &Self::Elem) -> Self::Elem;

    fn is_zero(&self, x: &Self::Elem) -> bool {
        *x == self.zero()
    }

    /// Folds `⊕` over `items`, starting from `0`.
    fn sum<'a, I>(&self, items: I) -> Self::Elem
    where
        I: IntoIterator<Item = &'a Self::Elem>,
        Self::Elem: 'a,
    {
        items
            .into_iter()
            .fold(self.zero(), |acc, x| self.plus(&acc, x))
    }
}

/// Semiring-semimodule pair with an ω-power into the semimodule.
pub trait OmegaAlgebra: KleeneAlgebra {
    type Vector: Clone + Eq + Hash + Debug;

    fn vzero(&self) -> Self::Vector;
    fn vplus(&self, u: &Self::Vector, v: &Self::Vector) -> Self::Vector;
    /// Left action `x · v`.
    fn act(&self, x: &Self::Elem, v: &Self::Vector) -> Self::Vector;
    fn omega(&self, x: &Self::Elem) -> Self::Vector;
}

/// Element of the Boolean semiring (∨, ∧, false, true).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolValue(pub bool);

/// Element of the tropical semiring (min, +, ∞, 0).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TropValue(pub ExtRational);

/// Element of the fuzzy semiring (max, min, 0, ∞).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FuzzValue(pub ExtRational);

impl TropValue {
    pub fn int(n: i64) -> Self {
        TropValue(ExtRational::int(n))
    }

    pub fn infinity() -> Self {
        TropValue(ExtRational::Infinity)
    }
}

impl FuzzValue {
    pub fn int(n: i64) -> Self {
        FuzzValue(ExtRational::int(n))
    }

    pub fn infinity() -> Self {
        FuzzValue(ExtRational::Infinity)
    }
}

impl fmt::Display for BoolValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for TropValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

impl fmt::Display for FuzzValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Reachability: `x* = true`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Boolean;

/// Minimum cost: `x* = 0`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Tropical;

/// Maximum flow (bottleneck): `x* = ∞`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Fuzzy;

impl KleeneAlgebra for Boolean {
    type Elem = BoolValue;

    fn zero(&self) -> BoolValue {
        BoolValue(false)
    }

    fn one(&self) -> BoolValue {
        BoolValue(true)
    }

    fn plus(&self, x: &BoolValue, y: &BoolValue) -> BoolValue {
        BoolValue(x.0 || y.0)
    }

    fn times(&self, x: &BoolValue, y: &BoolValue) -> BoolValue {
        BoolValue(x.0 && y.0)
    }

    fn star(&self, _: &BoolValue) -> BoolValue {
        self.one()
    }
}

impl KleeneAlgebra for Tropical {
    type Elem = TropValue;

    fn zero(&self) -> TropValue {
        TropValue::infinity()
    }

    fn one(&self) -> TropValue {
        TropValue(ExtRational::zero())
    }

    fn plus(&self, x: &TropValue, y: &TropValue) -> TropValue {
        TropValue((&x.0).min(&y.0).clone())
    }

    fn times(&self, x: &TropValue, y: &TropValue) -> TropValue {
        TropValue(x.0.add(&y.0))
    }

    fn star(&self, _: &TropValue) -> TropValue {
        self.one()
    }
}

impl KleeneAlgebra for Fuzzy {
    type Elem = FuzzValue;

    fn zero(&self) -> FuzzValue {
        FuzzValue(ExtRational::zero())
    }

    fn one(&self) -> FuzzValue {
        FuzzValue::infinity()
    }

    fn plus(&self, x: &FuzzValue, y: &FuzzValue) -> FuzzValue {
        FuzzValue((&x.0).max(&y.0).clone())
    }

    fn times(&self, x: &FuzzValue, y: &FuzzValue) -> FuzzValue {
        FuzzValue((&x.0).min(&y.0).clone())
    }

    fn star(&self, _: &FuzzValue) -> FuzzValue {
        self.one()
    }
}
