//! Weighted and featured weighted automata and their values.

use std::collections::HashSet;
use std::sync::Arc;

use thiserror::Error;

use crate::energy::{Energy, EnergyFunction, EnergyValue};
use crate::features::{FeatureModel, Guard, Product};
use crate::gplift::{Featured, GuardedValue};
use crate::kleene::{KleeneAlgebra, OmegaAlgebra};
use crate::matrix::{Matrix, MatrixRep};
use crate::number::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("state index {index} out of range ({n} states)")]
    StateOutOfRange { index: usize, n: usize },
    #[error("transition {0} has a label that is not a guard partition of the model")]
    MalformedLabel(usize),
    #[error("product {0} is not declared")]
    UnknownProduct(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition<T> {
    pub from: usize,
    pub weight: T,
    pub to: usize,
}

/// `(S, I, F, T)` with states referred to by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedAutomaton<T> {
    states: Vec<String>,
    initial: Vec<usize>,
    accepting: Vec<usize>,
    transitions: Vec<Transition<T>>,
}

impl<T> WeightedAutomaton<T> {
    pub fn new(
        states: Vec<String>,
        initial: Vec<usize>,
        accepting: Vec<usize>,
        transitions: Vec<Transition<T>>,
    ) -> Result<Self, AutomatonError> {
        let n = states.len();
        let mut seen = HashSet::new();
        for s in &states {
            if !seen.insert(s.as_str()) {
                return Err(AutomatonError::DuplicateState(s.clone()));
            }
        }
        let indices = initial
            .iter()
            .chain(&accepting)
            .copied()
            .chain(transitions.iter().flat_map(|t| [t.from, t.to]));
        for index in indices {
            if index >= n {
                return Err(AutomatonError::StateOutOfRange { index, n });
            }
        }
        let mut initial = initial;
        let mut accepting = accepting;
        initial.sort_unstable();
        initial.dedup();
        accepting.sort_unstable();
        accepting.dedup();
        Ok(WeightedAutomaton {
            states,
            initial,
            accepting,
            transitions,
        })
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn initial(&self) -> &[usize] {
        &self.initial
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn transitions(&self) -> &[Transition<T>] {
        &self.transitions
    }

    pub fn is_initial(&self, s: usize) -> bool {
        self.initial.binary_search(&s).is_ok()
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting.binary_search(&s).is_ok()
    }

    /// Same structure with every weight mapped.
    pub fn map_weights<U>(&self, mut f: impl FnMut(&T) -> U) -> WeightedAutomaton<U> {
        WeightedAutomaton {
            states: self.states.clone(),
            initial: self.initial.clone(),
            accepting: self.accepting.clone(),
            transitions: self
                .transitions
                .iter()
                .map(|t| Transition {
                    from: t.from,
                    weight: f(&t.weight),
                    to: t.to,
                })
                .collect(),
        }
    }
}

/// Reorders states stably so that accepting states come first, then builds
/// `(α, M, k)`. Parallel transitions are summed.
pub fn matrix_representation<A: KleeneAlgebra>(
    alg: &A,
    aut: &WeightedAutomaton<A::Elem>,
) -> MatrixRep<A::Elem> {
    let n = aut.n();
    let order: Vec<usize> = (0..n)
        .filter(|&s| aut.is_accepting(s))
        .chain((0..n).filter(|&s| !aut.is_accepting(s)))
        .collect();
    let mut position = vec![0; n];
    for (i, &s) in order.iter().enumerate() {
        position[s] = i;
    }
    let alpha = order
        .iter()
        .map(|&s| if aut.is_initial(s) { alg.one() } else { alg.zero() })
        .collect();
    let mut m = Matrix::zeros(alg, n, n);
    for t in &aut.transitions {
        let (i, j) = (position[t.from], position[t.to]);
        let entry = alg.plus(m.get(i, j), &t.weight);
        m.set(i, j, entry);
    }
    MatrixRep {
        order,
        alpha,
        m,
        k: aut.accepting.len(),
    }
}

/// `|S| = α M* κ`: the sum over accepting finite paths.
pub fn reach_value<A: KleeneAlgebra>(alg: &A, aut: &WeightedAutomaton<A::Elem>) -> A::Elem {
    matrix_representation(alg, aut).reach_value(alg)
}

/// `‖S‖ = α M^{ω_k}`: the sum over Büchi-accepting infinite paths.
pub fn buchi_value<A: OmegaAlgebra>(alg: &A, aut: &WeightedAutomaton<A::Elem>) -> A::Vector {
    matrix_representation(alg, aut).buchi_value(alg)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnergyAnswer {
    /// Some finite run from `x0` ends in an accepting state.
    pub reachable: bool,
    /// Some infinite run from `x0` visits accepting states infinitely often.
    pub buchi: bool,
}

/// Answers the two energy problems for initial credit `x0 ≥ 0`.
pub fn energy_queries(aut: &WeightedAutomaton<EnergyFunction>, x0: &Rational) -> EnergyAnswer {
    let rep = matrix_representation(&Energy, aut);
    let x = EnergyValue::Finite(x0.clone());
    EnergyAnswer {
        reachable: !rep.reach_value(&Energy).apply(&x).is_bottom(),
        buchi: rep.buchi_value(&Energy).holds(&x),
    }
}

/// A weighted automaton whose labels are guarded values over one model.
#[derive(Debug, Clone)]
pub struct FeaturedWeightedAutomaton<T> {
    model: Arc<FeatureModel>,
    automaton: WeightedAutomaton<GuardedValue<T>>,
}

impl<T: Clone + Eq + std::hash::Hash> FeaturedWeightedAutomaton<T> {
    pub fn new(
        model: Arc<FeatureModel>,
        automaton: WeightedAutomaton<GuardedValue<T>>,
    ) -> Result<Self, AutomatonError> {
        for (i, t) in automaton.transitions.iter().enumerate() {
            if !t.weight.is_well_formed(&model) {
                return Err(AutomatonError::MalformedLabel(i));
            }
        }
        Ok(FeaturedWeightedAutomaton { model, automaton })
    }

    /// Builds labels `{γ ↦ w, ¬γ ↦ zero}` from guard-weight transitions.
    pub fn from_guarded(
        model: Arc<FeatureModel>,
        states: Vec<String>,
        initial: Vec<usize>,
        accepting: Vec<usize>,
        transitions: Vec<(usize, Guard, T, usize)>,
        zero: T,
    ) -> Result<Self, AutomatonError> {
        let transitions = transitions
            .into_iter()
            .map(|(from, guard, weight, to)| Transition {
                from,
                weight: GuardedValue::from_guard_weight(&guard, weight, zero.clone()),
                to,
            })
            .collect();
        let automaton = WeightedAutomaton::new(states, initial, accepting, transitions)?;
        Ok(FeaturedWeightedAutomaton { model, automaton })
    }

    pub fn model(&self) -> &Arc<FeatureModel> {
        &self.model
    }

    pub fn automaton(&self) -> &WeightedAutomaton<GuardedValue<T>> {
        &self.automaton
    }

    /// `proj_p F` for the product with index `product_index`.
    pub fn project_index(&self, product_index: usize) -> WeightedAutomaton<T> {
        self.automaton
            .map_weights(|label| label.semantics_at(product_index).clone())
    }

    /// `proj_p F`.
    pub fn project(&self, p: Product) -> Result<WeightedAutomaton<T>, AutomatonError> {
        let index = self
            .model
            .product_index(p)
            .ok_or_else(|| AutomatonError::UnknownProduct(self.model.product_name(p)))?;
        Ok(self.project_index(index))
    }
}

/// `|F|` computed once over `GP(K)`.
pub fn featured_reach_value<A: KleeneAlgebra + Clone>(
    alg: &A,
    aut: &FeaturedWeightedAutomaton<A::Elem>,
) -> GuardedValue<A::Elem> {
    let lifted = Featured::new(aut.model.clone(), alg.clone());
    reach_value(&lifted, &aut.automaton)
}

/// `‖F‖` computed once over `GP(K)` and `GP(V)`.
pub fn featured_buchi_value<A: OmegaAlgebra + Clone>(
    alg: &A,
    aut: &FeaturedWeightedAutomaton<A::Elem>,
) -> GuardedValue<A::Vector> {
    let lifted = Featured::new(aut.model.clone(), alg.clone());
    buchi_value(&lifted, &aut.automaton)
}

/// Reachability value of every projection, one analysis per product (in
/// model product order).
pub fn per_product_reach<A: KleeneAlgebra>(
    alg: &A,
    aut: &FeaturedWeightedAutomaton<A::Elem>,
) -> Vec<A::Elem> {
    (0..aut.model.product_count())
        .map(|i| reach_value(alg, &aut.project_index(i)))
        .collect()
}

/// Büchi value of every projection, one analysis per product.
pub fn per_product_buchi<A: OmegaAlgebra>(
    alg: &A,
    aut: &FeaturedWeightedAutomaton<A::Elem>,
) -> Vec<A::Vector> {
    (0..aut.model.product_count())
        .map(|i| buchi_value(alg, &aut.project_index(i)))
        .collect()
}
