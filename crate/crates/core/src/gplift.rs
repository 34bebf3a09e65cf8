//! The featured lift `GP(K)`: injective maps from guard partitions to `K`.
//!
//! A [`GuardedValue`] stores one value per block of a guard partition, with
//! distinct blocks carrying distinct values. Every lifted operation follows
//! the same pattern: intersect the operands' partitions, compute blockwise,
//! then merge blocks with equal values ([`canonicalize`]).

use std::collections::hash_map::DefaultHasher;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use indexmap::map::Entry;
use indexmap::IndexMap;

use crate::features::{is_partition, FeatureModel, Guard, GuardPartition, Product};
use crate::kleene::{KleeneAlgebra, OmegaAlgebra};

/// A symbolic "value for every product".
#[derive(Debug, Clone)]
pub struct GuardedValue<T> {
    blocks: Vec<(Guard, T)>,
}

/// Merges blocks with equal values by disjunction (first occurrence order).
///
/// `raw` must be indexed by a guard partition; the result is injective and
/// has the same value as `raw` at every product.
pub fn canonicalize<T: Eq + Hash>(raw: Vec<(Guard, T)>) -> GuardedValue<T> {
    let mut merged: IndexMap<T, Guard> = IndexMap::with_capacity(raw.len());
    for (guard, value) in raw {
        match merged.entry(value) {
            Entry::Occupied(mut e) => {
                let joined = e.get().or(&guard);
                *e.get_mut() = joined;
            }
            Entry::Vacant(e) => {
                e.insert(guard);
            }
        }
    }
    GuardedValue {
        blocks: merged.into_iter().map(|(v, g)| (g, v)).collect(),
    }
}

impl<T: Clone + Eq + Hash> GuardedValue<T> {
    /// `{true ↦ value}`.
    pub fn constant(model: &FeatureModel, value: T) -> Self {
        GuardedValue {
            blocks: vec![(Guard::tt(model), value)],
        }
    }

    /// `{γ ↦ w, ¬γ ↦ zero}`, dropping an unsatisfiable side.
    pub fn from_guard_weight(guard: &Guard, weight: T, zero: T) -> Self {
        let raw = [(guard.clone(), weight), (guard.not(), zero)]
            .into_iter()
            .filter(|(g, _)| g.is_satisfiable())
            .collect();
        canonicalize(raw)
    }

    /// One value per product, in model product order.
    pub fn from_table(model: &FeatureModel, table: &[T]) -> Self {
        assert_eq!(table.len(), model.product_count());
        let raw = model
            .products()
            .iter()
            .zip(table)
            .map(|(&p, v)| {
                let guard = crate::features::characteristic_guard(p, model)
                    .expect("declared product");
                (guard, v.clone())
            })
            .collect();
        canonicalize(raw)
    }

    pub fn blocks(&self) -> &[(Guard, T)] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn partition(&self) -> GuardPartition {
        GuardPartition::new_unchecked(self.blocks.iter().map(|(g, _)| g.clone()).collect())
    }

    /// The value at the product with index `product_index`.
    pub fn semantics_at(&self, product_index: usize) -> &T {
        self.blocks
            .iter()
            .find(|(g, _)| g.holds(product_index))
            .map(|(_, v)| v)
            .expect("guard partition covers every product")
    }

    /// The value at product `p`, if `p` is declared by `model`.
    pub fn at_product(&self, model: &FeatureModel, p: Product) -> Option<&T> {
        model.product_index(p).map(|i| self.semantics_at(i))
    }

    /// The semantic representation as a product-indexed table.
    pub fn table(&self, model: &FeatureModel) -> Vec<T> {
        let mut out: Vec<Option<&T>> = vec![None; model.product_count()];
        for (g, v) in &self.blocks {
            for i in g.sat().iter() {
                out[i] = Some(v);
            }
        }
        out.into_iter()
            .map(|v| v.expect("guard partition covers every product").clone())
            .collect()
    }

    /// Partition conditions plus injectivity.
    pub fn is_well_formed(&self, model: &FeatureModel) -> bool {
        let guards: Vec<Guard> = self.blocks.iter().map(|(g, _)| g.clone()).collect();
        let injective = self
            .blocks
            .iter()
            .enumerate()
            .all(|(i, (_, v))| self.blocks[..i].iter().all(|(_, w)| w != v));
        injective && is_partition(&guards, model)
    }

    /// Blockwise map, canonicalized.
    pub fn map<U: Eq + Hash>(&self, mut op: impl FnMut(&T) -> U) -> GuardedValue<U> {
        canonicalize(self.blocks.iter().map(|(g, v)| (g.clone(), op(v))).collect())
    }

    /// Lifts a binary operation over the intersection of both partitions.
    pub fn zip_with<U, R: Eq + Hash>(
        &self,
        other: &GuardedValue<U>,
        mut op: impl FnMut(&T, &U) -> R,
    ) -> GuardedValue<R> {
        let mut raw = Vec::with_capacity(self.blocks.len().max(other.blocks.len()));
        for (g1, v1) in &self.blocks {
            for (g2, v2) in &other.blocks {
                if g1.sat().intersects(g2.sat()) {
                    raw.push((g1.and(g2), op(v1, v2)));
                }
            }
        }
        canonicalize(raw)
    }

    pub(crate) fn blocks_mut(&mut self) -> &mut Vec<(Guard, T)> {
        &mut self.blocks
    }

    #[cfg(test)]
    pub(crate) fn from_blocks_unchecked(blocks: Vec<(Guard, T)>) -> Self {
        GuardedValue { blocks }
    }
}

impl<T: Eq> PartialEq for GuardedValue<T> {
    /// Equality of injective values: same blocks with the same values, in
    /// any order. By extensionality this is pointwise equality.
    fn eq(&self, other: &Self) -> bool {
        self.blocks.len() == other.blocks.len()
            && self.blocks.iter().all(|(g, v)| {
                other
                    .blocks
                    .iter()
                    .any(|(h, w)| g.sat() == h.sat() && v == w)
            })
    }
}

impl<T: Eq> Eq for GuardedValue<T> {}

impl<T: Hash> Hash for GuardedValue<T> {
    fn hash<H: Hasher>(&self, state: &mut H) {
        // order-independent, to agree with `eq`
        let mut acc: u64 = 0;
        for (g, v) in &self.blocks {
            let mut h = DefaultHasher::new();
            g.sat().hash(&mut h);
            v.hash(&mut h);
            acc = acc.wrapping_add(h.finish());
        }
        self.blocks.len().hash(state);
        acc.hash(state);
    }
}

/// `GP(K)` over a fixed feature model.
#[derive(Debug, Clone)]
pub struct Featured<A> {
    model: Arc<FeatureModel>,
    inner: A,
}

impl<A: KleeneAlgebra> Featured<A> {
    pub fn new(model: Arc<FeatureModel>, inner: A) -> Self {
        Featured { model, inner }
    }

    pub fn model(&self) -> &Arc<FeatureModel> {
        &self.model
    }

    pub fn inner(&self) -> &A {
        &self.inner
    }

    /// `{γ ↦ w, ¬γ ↦ 0}`.
    pub fn guarded(&self, guard: &Guard, weight: A::Elem) -> GuardedValue<A::Elem> {
        GuardedValue::from_guard_weight(guard, weight, self.inner.zero())
    }

    pub fn constant(&self, value: A::Elem) -> GuardedValue<A::Elem> {
        GuardedValue::constant(&self.model, value)
    }
}

impl<A: KleeneAlgebra> KleeneAlgebra for Featured<A> {
    type Elem = GuardedValue<A::Elem>;

    fn zero(&self) -> Self::Elem {
        self.constant(self.inner.zero())
    }

    fn one(&self) -> Self::Elem {
        self.constant(self.inner.one())
    }

    fn plus(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        x.zip_with(y, |a, b| self.inner.plus(a, b))
    }

    fn times(&self, x: &Self::Elem, y: &Self::Elem) -> Self::Elem {
        x.zip_with(y, |a, b| self.inner.times(a, b))
    }

    fn star(&self, x: &Self::Elem) -> Self::Elem {
        x.map(|a| self.inner.star(a))
    }

    fn is_zero(&self, x: &Self::Elem) -> bool {
        x.blocks.len() == 1 && self.inner.is_zero(&x.blocks[0].1)
    }
}

impl<A: OmegaAlgebra> OmegaAlgebra for Featured<A> {
    type Vector = GuardedValue<A::Vector>;

    fn vzero(&self) -> Self::Vector {
        GuardedValue::constant(&self.model, self.inner.vzero())
    }

    fn vplus(&self, u: &Self::Vector, v: &Self::Vector) -> Self::Vector {
        u.zip_with(v, |a, b| self.inner.vplus(a, b))
    }

    fn act(&self, x: &Self::Elem, v: &Self::Vector) -> Self::Vector {
        x.zip_with(v, |a, b| self.inner.act(a, b))
    }

    fn omega(&self, x: &Self::Elem) -> Self::Vector {
        x.map(|a| self.inner.omega(a))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::energy::{Energy, EnergyFunction, OmegaIndicator};
    use crate::features::parse_guard;
    use crate::kleene::{TropValue, Tropical};
    use crate::number::rat;

    fn model(features: &[&str]) -> Arc<FeatureModel> {
        Arc::new(FeatureModel::all(features).unwrap())
    }

    fn gv<T: Clone + Eq + Hash>(m: &FeatureModel, entries: &[(&str, T)]) -> GuardedValue<T> {
        let raw: Vec<(Guard, T)> = entries
            .iter()
            .map(|(g, v)| (parse_guard(g, m).unwrap(), v.clone()))
            .collect();
        let guards: Vec<Guard> = raw.iter().map(|(g, _)| g.clone()).collect();
        assert!(is_partition(&guards, m));
        canonicalize(raw)
    }

    fn t(n: i64) -> TropValue {
        TropValue::int(n)
    }

    fn upd(l: i64, d: i64) -> EnergyFunction {
        EnergyFunction::update(rat(l), rat(d))
    }

    #[test]
    fn canonicalization_examples() {
        let m = model(&["a"]);
        let merged = gv(&m, &[("a", t(3)), ("!a", t(3))]);
        assert_eq!(merged.len(), 1);
        assert_eq!(merged.blocks()[0].0.render(&m), "a | !a");
        assert!(merged.blocks()[0].0.sat().is_full());

        let kept = gv(&m, &[("a", t(2)), ("!a", t(5))]);
        assert_eq!(kept.len(), 2);

        let m = model(&["a", "b"]);
        let f = gv(&m, &[("a & b", t(2)), ("a & !b", t(2)), ("!a", t(5))]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.blocks()[0].0.render(&m), "a & b | a & !b");
        assert_eq!(f, gv(&m, &[("a", t(2)), ("!a", t(5))]));
        assert!(f.is_well_formed(&m));
    }

    #[test]
    fn semantics_lookup() {
        let m = model(&["a"]);
        let f = gv(&m, &[("a", t(2)), ("!a", t(5))]);
        let pa = m.product(&["a"]).unwrap();
        assert_eq!(f.at_product(&m, pa), Some(&t(2)));
        assert_eq!(f.at_product(&m, Product::EMPTY), Some(&t(5)));
        let gp = Featured::new(m.clone(), Tropical);
        assert_eq!(gp.zero().table(&m), vec![TropValue::infinity(); 2]);
        assert_eq!(gp.constant(t(7)).table(&m), vec![t(7); 2]);
    }

    #[test]
    fn lifted_sum_and_product() {
        let m = model(&["a", "b"]);
        let gp = Featured::new(m.clone(), Tropical);
        let f1 = gv(&m, &[("a", t(2)), ("!a", t(5))]);
        let f2 = gv(&m, &[("b", t(3)), ("!b", t(7))]);
        let sum = gp.plus(&f1, &f2);
        assert_eq!(
            sum,
            gv(&m, &[("a", t(2)), ("!a & b", t(3)), ("!a & !b", t(5))])
        );
        assert_eq!(gp.plus(&f1, &gp.zero()), f1);
        assert_eq!(gp.plus(&f1, &f1), f1);

        let prod = gp.times(&f1, &gp.constant(t(1)));
        assert_eq!(prod, gv(&m, &[("a", t(3)), ("!a", t(6))]));
        assert_eq!(gp.times(&f1, &gp.one()), f1);
        assert_eq!(gp.times(&f1, &gp.zero()), gp.zero());
    }

    #[test]
    fn lifted_star() {
        let m = model(&["a"]);
        let gp = Featured::new(m.clone(), Tropical);
        let f = gv(&m, &[("a", t(2)), ("!a", t(5))]);
        assert_eq!(gp.star(&f), gp.constant(t(0)));
        assert_eq!(gp.star(&gp.zero()), gp.one());

        let ge = Featured::new(m.clone(), Energy);
        let f = gv(&m, &[("a", upd(0, 1)), ("!a", upd(1, -1))]);
        let expected = gv(
            &m,
            &[("a", upd(0, 1).star()), ("!a", EnergyFunction::identity())],
        );
        assert_eq!(ge.star(&f), expected);
        assert_eq!(expected.blocks()[0].1.to_string(), "[0, inf): inf");
    }

    #[test]
    fn lifted_omega() {
        let m = model(&["a"]);
        let ge = Featured::new(m.clone(), Energy);
        let f = gv(&m, &[("a", upd(0, 1)), ("!a", upd(1, -1))]);
        assert_eq!(
            ge.omega(&f),
            gv(
                &m,
                &[("a", OmegaIndicator::always()), ("!a", OmegaIndicator::Never)]
            )
        );
        assert_eq!(
            ge.omega(&ge.one()),
            GuardedValue::constant(&m, OmegaIndicator::always())
        );
        let both_lose = gv(&m, &[("a", upd(0, -1)), ("!a", upd(0, -2))]);
        let w = ge.omega(&both_lose);
        assert_eq!(w.len(), 1);
        assert_eq!(w.blocks()[0].1, OmegaIndicator::Never);
        assert!(w.blocks()[0].0.sat().is_full());
    }

    #[test]
    fn guard_weight_labels() {
        let m = model(&["a"]);
        let gp = Featured::new(m.clone(), Tropical);
        let a = parse_guard("a", &m).unwrap();
        assert_eq!(
            gp.guarded(&a, t(2)),
            gv(&m, &[("a", t(2)), ("!a", TropValue::infinity())])
        );
        let tt = parse_guard("true", &m).unwrap();
        assert_eq!(gp.guarded(&tt, t(2)), gp.constant(t(2)));

        let only_a = Arc::new(FeatureModel::with_products(&["a"], &[vec!["a"]]).unwrap());
        let gp = Featured::new(only_a.clone(), Tropical);
        let a = parse_guard("a", &only_a).unwrap();
        let f = gp.guarded(&a, t(2));
        assert_eq!(f.len(), 1);
        assert_eq!(f.blocks()[0].0.render(&only_a), "a");

        let never = parse_guard("a & !a", &only_a).unwrap();
        assert_eq!(gp.guarded(&never, t(2)), gp.zero());
    }

    #[test]
    fn table_round_trip() {
        let m = model(&["a", "b"]);
        let table = vec![t(1), t(2), t(1), t(4)];
        let f = GuardedValue::from_table(&m, &table);
        assert_eq!(f.table(&m), table);
        assert_eq!(f.len(), 3);
        assert!(f.is_well_formed(&m));
    }
}
