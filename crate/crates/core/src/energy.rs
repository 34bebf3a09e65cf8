//! The energy semiring of piecewise-linear energy functions and its
//! semimodule of threshold indicators.
//!
//! An [`EnergyFunction`] is a partial map on `ℝ≥0 ∪ {⊥, ∞}` satisfying
//! `f(y) − f(x) ≥ y − x` for `x ≤ y`. The computable subclass used here
//! has finitely many rational pieces, each affine with slope `≥ 1` or the
//! constant `∞`, with per-boundary closedness. `⊕` is pointwise maximum and
//! `f ⊗ g` applies `f` first, then `g`.
//!
//! Every operation builds a *profile*: a sorted list of marks together with
//! the exact value at each mark and the single shape valid on the open
//! interval after it. [`EnergyFunction::from_profile`] turns a profile into
//! the unique normal form, so structural equality is pointwise equality.

use std::cmp::Ordering;
use std::fmt;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::kleene::{KleeneAlgebra, OmegaAlgebra};
use crate::number::{format_rational, rat, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnergyError {
    #[error("piece {0} has slope below 1")]
    SlopeBelowOne(usize),
    #[error("piece {0} starts at a negative point")]
    NegativeStart(usize),
    #[error("piece {0} does not start after its predecessor")]
    Unordered(usize),
    #[error("piece {0} follows an infinite piece")]
    AfterInfinite(usize),
    #[error("the function is negative at the start of its domain")]
    NegativeValue,
    #[error("the function drops at the start of piece {0}")]
    Decreasing(usize),
}

/// Element of `ℝ≥0 ∪ {⊥, ∞}`, ordered `⊥ < finite < ∞`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergyValue {
    Bottom,
    Finite(Rational),
    Infinite,
}

impl EnergyValue {
    pub fn int(n: i64) -> Self {
        EnergyValue::Finite(rat(n))
    }

    pub fn is_bottom(&self) -> bool {
        matches!(self, EnergyValue::Bottom)
    }

    fn exceeds(&self, x: &Rational) -> Ordering {
        match self {
            EnergyValue::Bottom => Ordering::Less,
            EnergyValue::Finite(q) => q.cmp(x),
            EnergyValue::Infinite => Ordering::Greater,
        }
    }
}

impl fmt::Display for EnergyValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EnergyValue::Bottom => f.write_str("bot"),
            EnergyValue::Finite(q) => f.write_str(&format_rational(q)),
            EnergyValue::Infinite => f.write_str("inf"),
        }
    }
}

/// What a piece computes.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    /// `x ↦ offset + slope·x`.
    Affine { offset: Rational, slope: Rational },
    /// `x ↦ ∞`.
    Infinite,
    /// Nowhere defined; never stored in a normal-form function.
    Undefined,
}

impl Shape {
    pub fn affine(offset: Rational, slope: Rational) -> Self {
        Shape::Affine { offset, slope }
    }

    fn identity() -> Self {
        Shape::affine(Rational::zero(), Rational::one())
    }

    pub fn eval(&self, x: &Rational) -> EnergyValue {
        match self {
            Shape::Affine { offset, slope } => EnergyValue::Finite(offset + slope * x),
            Shape::Infinite => EnergyValue::Infinite,
            Shape::Undefined => EnergyValue::Bottom,
        }
    }

    /// The point where the affine shape crosses the line `x ↦ offset + slope·x`.
    fn crossing(&self, offset: &Rational, slope: &Rational) -> Option<Rational> {
        match self {
            Shape::Affine { offset: o, slope: s } if s != slope => Some((offset - o) / (s - slope)),
            _ => None,
        }
    }

    /// The point where the affine shape reaches `level`.
    fn preimage(&self, level: &Rational) -> Option<Rational> {
        match self {
            Shape::Affine { offset, slope } => Some((level - offset) / slope),
            _ => None,
        }
    }
}

/// A maximal run of one shape starting at `start`; `closed` tells whether
/// `start` itself belongs to this piece.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Piece {
    pub start: Rational,
    pub closed: bool,
    pub shape: Shape,
}

impl Piece {
    pub fn affine(start: Rational, closed: bool, offset: Rational, slope: Rational) -> Self {
        Piece {
            start,
            closed,
            shape: Shape::affine(offset, slope),
        }
    }

    pub fn infinite(start: Rational, closed: bool) -> Self {
        Piece {
            start,
            closed,
            shape: Shape::Infinite,
        }
    }
}

/// A piecewise-linear energy function in normal form; no pieces is `⊥`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnergyFunction {
    pieces: Vec<Piece>,
}

/// Marks with the value at each mark and the shape right after it.
struct Profile {
    marks: Vec<Rational>,
    at: Vec<EnergyValue>,
    after: Vec<Shape>,
}

fn sorted_marks(points: impl IntoIterator<Item = Rational>) -> Vec<Rational> {
    let mut marks: Vec<Rational> = points.into_iter().filter(|q| !q.is_negative()).collect();
    marks.push(Rational::zero());
    marks.sort();
    marks.dedup();
    marks
}

/// A point strictly inside the `i`-th open interval of `marks`.
fn sample(marks: &[Rational], i: usize) -> Rational {
    match marks.get(i + 1) {
        Some(next) => (&marks[i] + next) / rat(2),
        None => &marks[i] + Rational::one(),
    }
}

/// Lower bound of `x ↦ x + delta` restricted to nonnegative outputs.
pub fn normalized_lower_bound(lower_bound: &Rational, delta: &Rational) -> Rational {
    let floor = if delta.is_negative() {
        -delta
    } else {
        Rational::zero()
    };
    lower_bound.clone().max(floor)
}

impl EnergyFunction {
    /// The nowhere-defined function `⊥`, the semiring zero.
    pub fn bottom() -> Self {
        EnergyFunction { pieces: Vec::new() }
    }

    /// The identity, the semiring unit.
    pub fn identity() -> Self {
        EnergyFunction {
            pieces: vec![Piece {
                start: Rational::zero(),
                closed: true,
                shape: Shape::identity(),
            }],
        }
    }

    /// `x ↦ x + delta` for `x ≥ lower_bound`; the bound is raised so that
    /// outputs stay nonnegative.
    pub fn update(lower_bound: Rational, delta: Rational) -> Self {
        let lb = normalized_lower_bound(&lower_bound, &delta);
        EnergyFunction {
            pieces: vec![Piece::affine(lb, true, delta, Rational::one())],
        }
    }

    /// Validates `pieces` and brings them into normal form.
    pub fn from_pieces(pieces: Vec<Piece>) -> Result<Self, EnergyError> {
        for (i, piece) in pieces.iter().enumerate() {
            if piece.start.is_negative() {
                return Err(EnergyError::NegativeStart(i));
            }
            match &piece.shape {
                Shape::Affine { slope, .. } if *slope < Rational::one() => {
                    return Err(EnergyError::SlopeBelowOne(i))
                }
                Shape::Undefined => return Err(EnergyError::Unordered(i)),
                _ => {}
            }
            if i == 0 {
                if piece.shape.eval(&piece.start) < EnergyValue::int(0) {
                    return Err(EnergyError::NegativeValue);
                }
                continue;
            }
            let prev = &pieces[i - 1];
            let ordered = match prev.start.cmp(&piece.start) {
                Ordering::Less => true,
                // a single-point piece followed by the rest of the interval
                Ordering::Equal => prev.closed && !piece.closed,
                Ordering::Greater => false,
            };
            if !ordered {
                return Err(EnergyError::Unordered(i));
            }
            if prev.shape == Shape::Infinite && piece.shape != Shape::Infinite {
                return Err(EnergyError::AfterInfinite(i));
            }
            if prev.shape.eval(&piece.start) > piece.shape.eval(&piece.start) {
                return Err(EnergyError::Decreasing(i));
            }
        }
        let raw = EnergyFunction { pieces };
        Ok(raw.rebuild(Vec::new()))
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn is_bottom(&self) -> bool {
        self.pieces.is_empty()
    }

    /// Lower end of the domain with its closedness, `None` for `⊥`.
    pub fn lower_bound(&self) -> Option<(&Rational, bool)> {
        self.pieces.first().map(|p| (&p.start, p.closed))
    }

    /// Evaluates at a finite point.
    pub fn eval_at(&self, x: &Rational) -> EnergyValue {
        self.piece_at(x)
            .map_or(EnergyValue::Bottom, |p| p.shape.eval(x))
    }

    /// Evaluates on the extended domain: `⊥ ↦ ⊥`, `∞ ↦ ∞` unless `f = ⊥`.
    pub fn apply(&self, x: &EnergyValue) -> EnergyValue {
        match x {
            EnergyValue::Bottom => EnergyValue::Bottom,
            EnergyValue::Infinite if self.is_bottom() => EnergyValue::Bottom,
            EnergyValue::Infinite => EnergyValue::Infinite,
            EnergyValue::Finite(q) => self.eval_at(q),
        }
    }

    fn piece_at(&self, x: &Rational) -> Option<&Piece> {
        self.pieces
            .iter()
            .rev()
            .find(|p| p.start < *x || (p.start == *x && p.closed))
    }

    /// The shape valid on `(x, x + ε)` for small `ε > 0`.
    fn shape_right_of(&self, x: &Rational) -> Shape {
        self.pieces
            .iter()
            .rev()
            .find(|p| p.start <= *x)
            .map_or(Shape::Undefined, |p| p.shape.clone())
    }

    fn starts(&self) -> impl Iterator<Item = Rational> + '_ {
        self.pieces.iter().map(|p| p.start.clone())
    }

    fn affine_shapes(&self) -> impl Iterator<Item = (&Rational, &Rational)> + '_ {
        self.pieces.iter().filter_map(|p| match &p.shape {
            Shape::Affine { offset, slope } => Some((offset, slope)),
            _ => None,
        })
    }

    /// Re-samples this function on its own starts plus `extra` marks.
    fn rebuild(&self, extra: Vec<Rational>) -> Self {
        let marks = sorted_marks(self.starts().chain(extra));
        let at = marks.iter().map(|b| self.eval_at(b)).collect();
        let after = marks.iter().map(|b| self.shape_right_of(b)).collect();
        Self::from_profile(Profile { marks, at, after })
    }

    /// Normal form: maximal runs of one shape; a boundary point joins the
    /// run on its right when that shape gives its value, else the run on
    /// its left, else it becomes a single-point piece of slope 1.
    fn from_profile(profile: Profile) -> Self {
        let Profile { marks, at, after } = profile;
        let mut pieces: Vec<Piece> = Vec::new();
        let mut current = Shape::Undefined;
        for ((b, v), next) in marks.iter().zip(at).zip(after) {
            if next.eval(b) == v {
                if next != current {
                    pieces.push(Piece {
                        start: b.clone(),
                        closed: true,
                        shape: next.clone(),
                    });
                    current = next;
                }
                continue;
            }
            if current.eval(b) != v {
                let point = match &v {
                    EnergyValue::Finite(q) => Shape::affine(q - b, Rational::one()),
                    EnergyValue::Infinite => Shape::Infinite,
                    EnergyValue::Bottom => Shape::Undefined,
                };
                pieces.push(Piece {
                    start: b.clone(),
                    closed: true,
                    shape: point,
                });
            }
            pieces.push(Piece {
                start: b.clone(),
                closed: false,
                shape: next.clone(),
            });
            current = next;
        }
        let first_defined = pieces
            .iter()
            .position(|p| p.shape != Shape::Undefined)
            .unwrap_or(pieces.len());
        pieces.drain(..first_defined);
        debug_assert!(pieces.iter().all(|p| p.shape != Shape::Undefined));
        EnergyFunction { pieces }
    }

    /// Pointwise maximum.
    pub fn max(&self, other: &Self) -> Self {
        let mut extra: Vec<Rational> = other.starts().collect();
        for (o1, s1) in self.affine_shapes() {
            for (o2, s2) in other.affine_shapes() {
                if s1 != s2 {
                    extra.push((o2 - o1) / (s1 - s2));
                }
            }
        }
        let marks = sorted_marks(self.starts().chain(extra));
        let at = marks
            .iter()
            .map(|b| self.eval_at(b).max(other.eval_at(b)))
            .collect();
        let after = (0..marks.len())
            .map(|i| {
                let mid = sample(&marks, i);
                let mine = self.shape_right_of(&marks[i]);
                let theirs = other.shape_right_of(&marks[i]);
                if theirs.eval(&mid) > mine.eval(&mid) {
                    theirs
                } else {
                    mine
                }
            })
            .collect();
        Self::from_profile(Profile { marks, at, after })
    }

    /// `self ⊗ next`: the function `x ↦ next(self(x))`.
    pub fn then(&self, next: &Self) -> Self {
        let mut extra = Vec::new();
        for piece in &self.pieces {
            for c in next.starts() {
                extra.extend(piece.shape.preimage(&c));
            }
        }
        let marks = sorted_marks(self.starts().chain(extra));
        let at = marks
            .iter()
            .map(|b| next.apply(&self.eval_at(b)))
            .collect();
        let after = (0..marks.len())
            .map(|i| match self.shape_right_of(&marks[i]) {
                Shape::Undefined => Shape::Undefined,
                Shape::Infinite if next.is_bottom() => Shape::Undefined,
                Shape::Infinite => Shape::Infinite,
                Shape::Affine { offset, slope } => {
                    let image = &offset + &slope * sample(&marks, i);
                    match next.shape_right_of(&image) {
                        Shape::Affine {
                            offset: o2,
                            slope: s2,
                        } => Shape::affine(&o2 + &s2 * &offset, s2 * slope),
                        other => other,
                    }
                }
            })
            .collect();
        Self::from_profile(Profile { marks, at, after })
    }

    /// `f* = ⊕_{n≥0} fⁿ`: `∞` where `f` gains energy, the identity elsewhere.
    pub fn star(&self) -> Self {
        let extra: Vec<Rational> = self
            .pieces
            .iter()
            .filter_map(|p| p.shape.crossing(&Rational::zero(), &Rational::one()))
            .collect();
        let marks = sorted_marks(self.starts().chain(extra));
        let lift = |gain: bool, x: &Rational| {
            if gain {
                EnergyValue::Infinite
            } else {
                EnergyValue::Finite(x.clone())
            }
        };
        let at = marks
            .iter()
            .map(|b| lift(self.eval_at(b).exceeds(b) == Ordering::Greater, b))
            .collect();
        let after = (0..marks.len())
            .map(|i| {
                let mid = sample(&marks, i);
                if self.shape_right_of(&marks[i]).eval(&mid).exceeds(&mid) == Ordering::Greater {
                    Shape::Infinite
                } else {
                    Shape::identity()
                }
            })
            .collect();
        Self::from_profile(Profile { marks, at, after })
    }

    /// `f^ω`: true exactly where `f` is defined and `f(x) ≥ x`.
    pub fn omega(&self) -> OmegaIndicator {
        let extra = self
            .pieces
            .iter()
            .filter_map(|p| p.shape.crossing(&Rational::zero(), &Rational::one()))
            .collect();
        self.first_where(extra, |x, fx| {
            !fx.is_bottom() && fx.exceeds(x) != Ordering::Less
        })
    }

    /// Smallest up-closed set `{x | pred(x, f(x))}`, assuming `pred` can only
    /// switch at the function's starts or at `extra`.
    fn first_where(
        &self,
        extra: Vec<Rational>,
        pred: impl Fn(&Rational, &EnergyValue) -> bool,
    ) -> OmegaIndicator {
        let marks = sorted_marks(self.starts().chain(extra));
        for (i, b) in marks.iter().enumerate() {
            if pred(b, &self.eval_at(b)) {
                return OmegaIndicator::from(b.clone(), true);
            }
            let mid = sample(&marks, i);
            if pred(&mid, &self.shape_right_of(b).eval(&mid)) {
                return OmegaIndicator::from(b.clone(), false);
            }
        }
        OmegaIndicator::Never
    }

    /// Structural check of `f(y) − f(x) ≥ y − x`: slopes at least 1 and no
    /// downward jumps between pieces.
    pub fn satisfies_monotone_difference(&self) -> bool {
        let slopes_ok = self.affine_shapes().all(|(_, s)| *s >= Rational::one());
        let jumps_ok = self
            .pieces
            .windows(2)
            .all(|w| w[0].shape.eval(&w[1].start) <= w[1].shape.eval(&w[1].start));
        let nonnegative = self
            .pieces
            .first()
            .is_none_or(|p| p.shape.eval(&p.start) >= EnergyValue::int(0));
        slopes_ok && jumps_ok && nonnegative
    }

    /// True iff the representation is already the normal form.
    pub fn is_normal(&self) -> bool {
        self.rebuild(Vec::new()) == *self
    }
}

fn write_shape(f: &mut fmt::Formatter<'_>, shape: &Shape) -> fmt::Result {
    match shape {
        Shape::Infinite => f.write_str("inf"),
        Shape::Undefined => f.write_str("bot"),
        Shape::Affine { offset, slope } => {
            if slope.is_one() {
                f.write_str("x")?;
            } else {
                write!(f, "{}*x", format_rational(slope))?;
            }
            match offset.cmp(&Rational::zero()) {
                Ordering::Greater => write!(f, " + {}", format_rational(offset)),
                Ordering::Less => write!(f, " - {}", format_rational(&-offset)),
                Ordering::Equal => Ok(()),
            }
        }
    }
}

impl fmt::Display for EnergyFunction {
    /// `bot`, or pieces like `[1, inf): x - 1; ...`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.pieces.is_empty() {
            return f.write_str("bot");
        }
        for (i, piece) in self.pieces.iter().enumerate() {
            if i > 0 {
                f.write_str("; ")?;
            }
            let open = if piece.closed { '[' } else { '(' };
            write!(f, "{open}{}, ", format_rational(&piece.start))?;
            match self.pieces.get(i + 1) {
                Some(next) => {
                    let close = if next.closed { ')' } else { ']' };
                    write!(f, "{}{close}: ", format_rational(&next.start))?;
                }
                None => f.write_str("inf): ")?,
            }
            write_shape(f, &piece.shape)?;
        }
        Ok(())
    }
}

/// An `∞`-continuous monotone predicate on energy levels: either never true
/// or true from a threshold on (and always at `∞`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum OmegaIndicator {
    Never,
    From { threshold: Rational, closed: bool },
}

impl OmegaIndicator {
    /// True on all of `ℝ≥0 ∪ {∞}`.
    pub fn always() -> Self {
        OmegaIndicator::from(Rational::zero(), true)
    }

    pub fn from(threshold: Rational, closed: bool) -> Self {
        OmegaIndicator::From { threshold, closed }
    }

    pub fn holds(&self, x: &EnergyValue) -> bool {
        match (self, x) {
            (OmegaIndicator::Never, _) | (_, EnergyValue::Bottom) => false,
            (_, EnergyValue::Infinite) => true,
            (OmegaIndicator::From { threshold, closed }, EnergyValue::Finite(q)) => {
                q > threshold || (*closed && q == threshold)
            }
        }
    }

    pub fn holds_at(&self, x: &Rational) -> bool {
        self.holds(&EnergyValue::Finite(x.clone()))
    }

    /// Pointwise disjunction.
    pub fn join(&self, other: &Self) -> Self {
        match (self, other) {
            (OmegaIndicator::Never, v) | (v, OmegaIndicator::Never) => v.clone(),
            (
                OmegaIndicator::From {
                    threshold: t1,
                    closed: c1,
                },
                OmegaIndicator::From {
                    threshold: t2,
                    closed: c2,
                },
            ) => match t1.cmp(t2) {
                Ordering::Less => self.clone(),
                Ordering::Greater => other.clone(),
                Ordering::Equal => OmegaIndicator::from(t1.clone(), *c1 || *c2),
            },
        }
    }

    /// The action `f · v = v ∘ f`.
    pub fn act(f: &EnergyFunction, v: &Self) -> Self {
        match v {
            OmegaIndicator::Never => OmegaIndicator::Never,
            OmegaIndicator::From { threshold, .. } => {
                let extra = f
                    .pieces
                    .iter()
                    .filter_map(|p| p.shape.preimage(threshold))
                    .collect();
                f.first_where(extra, |_, fx| v.holds(fx))
            }
        }
    }
}

impl fmt::Display for OmegaIndicator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OmegaIndicator::Never => f.write_str("false"),
            OmegaIndicator::From { threshold, closed } => {
                if *closed && threshold.is_zero() {
                    f.write_str("true")
                } else {
                    let op = if *closed { ">=" } else { ">" };
                    write!(f, "x {op} {}", format_rational(threshold))
                }
            }
        }
    }
}

/// The energy semiring together with its indicator semimodule.
#[derive(Debug, Clone, Copy, Default)]
pub struct Energy;

impl KleeneAlgebra for Energy {
    type Elem = EnergyFunction;

    fn zero(&self) -> EnergyFunction {
        EnergyFunction::bottom()
    }

    fn one(&self) -> EnergyFunction {
        EnergyFunction::identity()
    }

    fn plus(&self, x: &EnergyFunction, y: &EnergyFunction) -> EnergyFunction {
        x.max(y)
    }

    fn times(&self, x: &EnergyFunction, y: &EnergyFunction) -> EnergyFunction {
        x.then(y)
    }

    fn star(&self, x: &EnergyFunction) -> EnergyFunction {
        x.star()
    }
}

impl OmegaAlgebra for Energy {
    type Vector = OmegaIndicator;

    fn vzero(&self) -> OmegaIndicator {
        OmegaIndicator::Never
    }

    fn vplus(&self, u: &OmegaIndicator, v: &OmegaIndicator) -> OmegaIndicator {
        u.join(v)
    }

    fn act(&self, x: &EnergyFunction, v: &OmegaIndicator) -> OmegaIndicator {
        OmegaIndicator::act(x, v)
    }

    fn omega(&self, x: &EnergyFunction) -> OmegaIndicator {
        x.omega()
    }
}
