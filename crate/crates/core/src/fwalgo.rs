//! Symbolic Floyd–Warshall for real-weighted featured automata.
//!
//! Each distance cell is a guarded value over the tropical semiring. A
//! relaxation that improves a cell on part of a block splits that block,
//! and the improved part is merged with any block already carrying the
//! new value, so cells stay injective throughout.

use crate::automata::FeaturedWeightedAutomaton;
use crate::features::Guard;
use crate::gplift::{Featured, GuardedValue};
use crate::kleene::{KleeneAlgebra, TropValue, Tropical};

/// The `n×n` table `D` of symbolic distances.
#[derive(Debug, Clone)]
pub struct SymbolicDistanceTable {
    n: usize,
    cells: Vec<GuardedValue<TropValue>>,
}

impl SymbolicDistanceTable {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &GuardedValue<TropValue> {
        &self.cells[i * self.n + j]
    }

    fn get_mut(&mut self, i: usize, j: usize) -> &mut GuardedValue<TropValue> {
        &mut self.cells[i * self.n + j]
    }
}

fn position<T: Clone + Eq + std::hash::Hash>(cell: &GuardedValue<T>, guard: &Guard) -> Option<usize> {
    cell.blocks().iter().position(|(g, _)| g.sat() == guard.sat())
}

/// Assigns `x` on `γ1 ∧ γ2`, splitting `γ1` when `γ2` does not cover it,
/// then restores injectivity with [`combine_update`].
///
/// Panics unless `γ1` is a block of `cell` and `γ1 ∧ γ2` is satisfiable.
pub fn split_update<T: Clone + Eq + std::hash::Hash>(
    cell: &mut GuardedValue<T>,
    gamma1: &Guard,
    gamma2: &Guard,
    x: T,
) {
    let at = position(cell, gamma1).expect("γ1 is a block of the cell");
    let meet = gamma1.and(gamma2);
    assert!(meet.is_satisfiable(), "γ1 ∧ γ2 is unsatisfiable");
    let blocks = cell.blocks_mut();
    let assigned = if meet.sat() == gamma1.sat() {
        blocks[at].1 = x;
        blocks[at].0.clone()
    } else {
        let rest = gamma1.and(&gamma2.not());
        let old = std::mem::replace(&mut blocks[at], (meet.clone(), x)).1;
        blocks.insert(at + 1, (rest, old));
        meet
    };
    combine_update(cell, &assigned);
}

/// Merges the block `γ` with the block carrying the same value, if any.
///
/// A single assignment creates at most one duplicate; this is asserted.
pub fn combine_update<T: Clone + Eq + std::hash::Hash>(cell: &mut GuardedValue<T>, gamma: &Guard) {
    let at = position(cell, gamma).expect("γ is a block of the cell");
    let blocks = cell.blocks_mut();
    let value = blocks[at].1.clone();
    let mut duplicates = (0..blocks.len()).filter(|&i| i != at && blocks[i].1 == value);
    let Some(delta) = duplicates.next() else {
        return;
    };
    assert!(duplicates.next().is_none(), "more than one duplicate value");
    let merged = blocks[delta].0.or(&blocks[at].0);
    blocks[delta].0 = merged;
    blocks.remove(at);
}

/// Lowers `D(i,j)` to `w` wherever `γ` holds and the current value is larger.
fn improve(cell: &mut GuardedValue<TropValue>, gamma: &Guard, w: &TropValue) {
    let snapshot: Vec<(Guard, TropValue)> = cell.blocks().to_vec();
    for (g1, v) in snapshot {
        // blocks merged away by an earlier step already carry `w`
        if v <= *w || !g1.sat().intersects(gamma.sat()) || position(cell, &g1).is_none() {
            continue;
        }
        split_update(cell, &g1, gamma, w.clone());
    }
}

fn relax(d: &mut SymbolicDistanceTable, i: usize, k: usize, j: usize) {
    let left = d.get(i, k).blocks().to_vec();
    let right = d.get(k, j).blocks().to_vec();
    for (g2, x2) in &left {
        if x2.0.is_infinite() {
            continue;
        }
        for (g3, x3) in &right {
            if x3.0.is_infinite() || !g2.sat().intersects(g3.sat()) {
                continue;
            }
            let w = Tropical.times(x2, x3);
            improve(d.get_mut(i, j), &g2.and(g3), &w);
        }
    }
}

/// Computes all symbolic distances.
///
/// Unless `strict_fig1` is set, `D(i,i)` starts at `0` so that the empty
/// path is counted, matching `α M* κ`.
pub fn symbolic_distances(
    aut: &FeaturedWeightedAutomaton<TropValue>,
    strict_fig1: bool,
) -> SymbolicDistanceTable {
    let model = aut.model();
    let inner = aut.automaton();
    let n = inner.n();
    let mut d = SymbolicDistanceTable {
        n,
        cells: vec![GuardedValue::constant(model, TropValue::infinity()); n * n],
    };
    if !strict_fig1 {
        for i in 0..n {
            *d.get_mut(i, i) = GuardedValue::constant(model, TropValue::int(0));
        }
    }
    for t in inner.transitions() {
        for (guard, w) in t.weight.blocks() {
            if !w.0.is_infinite() {
                improve(d.get_mut(t.from, t.to), guard, w);
            }
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                relax(&mut d, i, k, j);
            }
        }
    }
    d
}

/// `|F|` over the tropical semiring by symbolic Floyd–Warshall.
pub fn featured_floyd_warshall(
    aut: &FeaturedWeightedAutomaton<TropValue>,
    strict_fig1: bool,
) -> GuardedValue<TropValue> {
    let d = symbolic_distances(aut, strict_fig1);
    let lifted = Featured::new(aut.model().clone(), Tropical);
    let inner = aut.automaton();
    let mut total = lifted.zero();
    for &i in inner.initial() {
        for &j in inner.accepting() {
            total = lifted.plus(&total, d.get(i, j));
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automata::{featured_reach_value, per_product_reach, Transition, WeightedAutomaton};
    use crate::features::{parse_guard, FeatureModel};
    use crate::gplift::canonicalize;
    use std::sync::Arc;

    fn t(n: i64) -> TropValue {
        TropValue::int(n)
    }

    fn inf() -> TropValue {
        TropValue::infinity()
    }

    fn gv(m: &FeatureModel, entries: &[(&str, TropValue)]) -> GuardedValue<TropValue> {
        canonicalize(
            entries
                .iter()
                .map(|(g, v)| (parse_guard(g, m).unwrap(), v.clone()))
                .collect(),
        )
    }

    #[test]
    fn split_examples() {
        let m = FeatureModel::all(&["a", "b"]).unwrap();
        let g = |s: &str| parse_guard(s, &m).unwrap();

        let mut cell = gv(&m, &[("true", inf())]);
        split_update(&mut cell, &g("true"), &g("a"), t(2));
        assert_eq!(cell, gv(&m, &[("a", t(2)), ("!a", inf())]));
        assert!(cell.is_well_formed(&m));

        let mut cell = gv(&m, &[("a", t(5)), ("!a", inf())]);
        split_update(&mut cell, &g("a"), &g("true"), t(2));
        assert_eq!(cell, gv(&m, &[("a", t(2)), ("!a", inf())]));

        let mut cell = gv(&m, &[("a", t(5)), ("!a", t(2))]);
        split_update(&mut cell, &g("a"), &g("b"), t(2));
        assert_eq!(cell, gv(&m, &[("a & b | !a", t(2)), ("a & !b", t(5))]));
        assert_eq!(cell.len(), 2);
    }

    #[test]
    fn combine_examples() {
        let m = FeatureModel::all(&["a", "b"]).unwrap();
        let g = |s: &str| parse_guard(s, &m).unwrap();
        let mut cell = GuardedValue::from_blocks_unchecked(vec![(g("a"), t(2)), (g("!a"), t(2))]);
        combine_update(&mut cell, &g("a"));
        assert_eq!(cell.len(), 1);
        assert!(cell.blocks()[0].0.sat().is_full());

        let mut cell = gv(&m, &[("a", t(1)), ("!a", t(2))]);
        let before = cell.clone();
        combine_update(&mut cell, &g("a"));
        assert_eq!(cell, before);

        let mut cell = GuardedValue::from_blocks_unchecked(vec![
            (g("a & b"), t(1)),
            (g("a & !b"), t(3)),
            (g("!a"), t(1)),
        ]);
        let expected = canonicalize(cell.blocks().to_vec());
        combine_update(&mut cell, &g("!a"));
        assert_eq!(cell, expected);
        assert!(cell.is_well_formed(&m));
    }

    fn running_example() -> FeaturedWeightedAutomaton<TropValue> {
        let model = Arc::new(FeatureModel::all(&["a"]).unwrap());
        let a = parse_guard("a", &model).unwrap();
        let tt = Guard::tt(&model);
        FeaturedWeightedAutomaton::from_guarded(
            model,
            vec!["s0".into(), "s1".into()],
            vec![0],
            vec![1],
            vec![(0, tt, t(5), 1), (0, a, t(2), 1)],
            inf(),
        )
        .unwrap()
    }

    #[test]
    fn examples() {
        let f = running_example();
        let m = f.model().clone();
        assert_eq!(
            featured_floyd_warshall(&f, false),
            gv(&m, &[("a", t(2)), ("!a", t(5))])
        );

        let empty = FeaturedWeightedAutomaton::<TropValue>::from_guarded(
            m.clone(),
            vec!["s0".into(), "s1".into()],
            vec![0],
            vec![1],
            vec![],
            inf(),
        )
        .unwrap();
        assert_eq!(featured_floyd_warshall(&empty, false), gv(&m, &[("true", inf())]));

        let single = FeaturedWeightedAutomaton::<TropValue>::from_guarded(
            m.clone(),
            vec!["s0".into()],
            vec![0],
            vec![0],
            vec![],
            inf(),
        )
        .unwrap();
        assert_eq!(featured_floyd_warshall(&single, false), gv(&m, &[("true", t(0))]));
        assert_eq!(featured_floyd_warshall(&single, true), gv(&m, &[("true", inf())]));
    }

    #[test]
    fn cycle_through_features() {
        // s0 -a/1-> s1 -true/1-> s2, s0 -true/7-> s2, s1 -b/1-> s0
        let model = Arc::new(FeatureModel::all(&["a", "b"]).unwrap());
        let g = |s: &str| parse_guard(s, &model).unwrap();
        let f = FeaturedWeightedAutomaton::from_guarded(
            model.clone(),
            vec!["s0".into(), "s1".into(), "s2".into()],
            vec![0],
            vec![2],
            vec![
                (0, g("a"), t(1), 1),
                (1, g("true"), t(1), 2),
                (0, g("true"), t(7), 2),
                (1, g("b"), t(1), 0),
            ],
            inf(),
        )
        .unwrap();
        let fw = featured_floyd_warshall(&f, false);
        assert_eq!(fw, featured_reach_value(&Tropical, &f));
        assert_eq!(fw.table(&model), per_product_reach(&Tropical, &f));
        let d = symbolic_distances(&f, false);
        for i in 0..3 {
            for j in 0..3 {
                assert!(d.get(i, j).is_well_formed(&model));
            }
        }
        assert_eq!(*d.get(1, 0), gv(&model, &[("b", t(1)), ("!b", inf())]));
    }

    #[test]
    fn parallel_labels_use_all_blocks() {
        let model = Arc::new(FeatureModel::all(&["a"]).unwrap());
        let a = parse_guard("a", &model).unwrap();
        let label = canonicalize(vec![(a.clone(), t(3)), (a.not(), t(4))]);
        let inner = WeightedAutomaton::new(
            vec!["s0".into(), "s1".into()],
            vec![0],
            vec![1],
            vec![Transition { from: 0, weight: label, to: 1 }],
        )
        .unwrap();
        let f = FeaturedWeightedAutomaton::new(model.clone(), inner).unwrap();
        assert_eq!(
            featured_floyd_warshall(&f, false),
            gv(&model, &[("a", t(3)), ("!a", t(4))])
        );
    }
}
