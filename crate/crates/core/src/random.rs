//! Random instances for property tests and benchmarks.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::automata::FeaturedWeightedAutomaton;
use crate::energy::{EnergyFunction, Piece};
use crate::features::{FeatureModel, Guard, GuardExpr};
use crate::gplift::GuardedValue;
use crate::kleene::{BoolValue, FuzzValue, TropValue};
use crate::number::{ratio, ExtRational, Rational};

const NAMES: [&str; 20] = [
    "a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l", "m", "n", "o", "p", "q", "r", "s",
    "t",
];

/// Model with features `a, b, …` and every subset as a product.
pub fn full_model(features: usize) -> Arc<FeatureModel> {
    Arc::new(FeatureModel::all(&NAMES[..features]).expect("at most 20 features"))
}

/// Model over `features` features with a random nonempty product set.
pub fn sparse_model<R: Rng>(rng: &mut R, features: usize) -> Arc<FeatureModel> {
    let universe = 1u32 << features;
    let mut products: Vec<u32> = (0..universe).filter(|_| rng.gen_bool(0.5)).collect();
    if products.is_empty() {
        products.push(rng.gen_range(0..universe));
    }
    Arc::new(FeatureModel::from_bits(&NAMES[..features], &products).expect("valid bits"))
}

pub fn random_guard_expr<R: Rng>(rng: &mut R, model: &FeatureModel, depth: usize) -> GuardExpr {
    let features = model.features().len();
    if depth == 0 || rng.gen_bool(0.35) {
        return match rng.gen_range(0..10) {
            0 => GuardExpr::True,
            1 if features == 0 => GuardExpr::False,
            _ if features == 0 => GuardExpr::True,
            _ => GuardExpr::Atom(rng.gen_range(0..features)),
        };
    }
    let left = Arc::new(random_guard_expr(rng, model, depth - 1));
    match rng.gen_range(0..3) {
        0 => GuardExpr::Not(left),
        1 => GuardExpr::And(left, Arc::new(random_guard_expr(rng, model, depth - 1))),
        _ => GuardExpr::Or(left, Arc::new(random_guard_expr(rng, model, depth - 1))),
    }
}

pub fn random_guard<R: Rng>(rng: &mut R, model: &FeatureModel) -> Guard {
    Guard::from_expr(random_guard_expr(rng, model, 3), model)
}

/// `0…8` and `∞`.
pub fn random_ext<R: Rng>(rng: &mut R) -> ExtRational {
    if rng.gen_bool(0.15) {
        ExtRational::Infinity
    } else {
        ExtRational::Finite(ratio(rng.gen_range(0..=16), rng.gen_range(1..=2)))
    }
}

pub fn random_trop<R: Rng>(rng: &mut R) -> TropValue {
    TropValue(random_ext(rng))
}

pub fn random_fuzz<R: Rng>(rng: &mut R) -> FuzzValue {
    FuzzValue(random_ext(rng))
}

pub fn random_bool<R: Rng>(rng: &mut R) -> BoolValue {
    BoolValue(rng.gen_bool(0.5))
}

/// A guarded value drawing one of `pool` values per product.
pub fn random_guarded<R: Rng, T: Clone + Eq + std::hash::Hash>(
    rng: &mut R,
    model: &FeatureModel,
    pool: &[T],
) -> GuardedValue<T> {
    let table: Vec<T> = (0..model.product_count())
        .map(|_| pool.choose(rng).expect("nonempty pool").clone())
        .collect();
    GuardedValue::from_table(model, &table)
}

/// `update(l, δ)` with `l, δ ∈ {−3, …, 3}`.
pub fn random_update<R: Rng>(rng: &mut R) -> EnergyFunction {
    EnergyFunction::update(
        ratio(rng.gen_range(-3..=3), 1),
        ratio(rng.gen_range(-3..=3), 1),
    )
}

/// A random function with slopes `≥ 1`, upward jumps, and possibly an
/// infinite tail; all of its data are multiples of `1/2`.
pub fn random_pwl<R: Rng>(rng: &mut R) -> EnergyFunction {
    let half = |n: i64| ratio(n, 2);
    let slopes = [ratio(1, 1), ratio(1, 1), ratio(3, 2), ratio(2, 1), ratio(3, 1)];
    let mut start = half(rng.gen_range(0..=6));
    let mut closed = rng.gen_bool(0.7);
    // value reached at `start` by the previous piece
    let mut floor: Rational = half(rng.gen_range(-6..=4)).max(ratio(0, 1));
    let count = rng.gen_range(1..=4);
    let mut pieces = Vec::with_capacity(count);
    for i in 0..count {
        if i + 1 == count && rng.gen_bool(0.2) {
            pieces.push(Piece::infinite(start.clone(), closed));
            break;
        }
        let slope = slopes.choose(rng).expect("nonempty").clone();
        let value = &floor + half(rng.gen_range(0..=3));
        let offset = &value - &slope * &start;
        let end = &start + half(rng.gen_range(1..=6));
        floor = &offset + &slope * &end;
        pieces.push(Piece::affine(start, closed, offset, slope));
        start = end;
        closed = rng.gen_bool(0.5);
    }
    EnergyFunction::from_pieces(pieces).expect("generated pieces are valid")
}

/// Random featured automaton whose transitions carry `guard ↦ weight`
/// labels with `zero` elsewhere.
pub fn random_guarded_automaton<R: Rng, T: Clone + Eq + std::hash::Hash>(
    rng: &mut R,
    model: Arc<FeatureModel>,
    max_states: usize,
    max_transitions: usize,
    zero: T,
    mut weight: impl FnMut(&mut R) -> T,
) -> FeaturedWeightedAutomaton<T> {
    let n = rng.gen_range(1..=max_states);
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let mut initial: Vec<usize> = (0..n).filter(|_| rng.gen_bool(0.35)).collect();
    if initial.is_empty() {
        initial.push(0);
    }
    let accepting = (0..n).filter(|_| rng.gen_bool(0.4)).collect();
    let m = rng.gen_range(0..=max_transitions);
    let transitions = (0..m)
        .map(|_| {
            let from = rng.gen_range(0..n);
            let to = rng.gen_range(0..n);
            (from, random_guard(rng, &model), weight(rng), to)
        })
        .collect();
    FeaturedWeightedAutomaton::from_guarded(model, states, initial, accepting, transitions, zero)
        .expect("indices in range")
}
