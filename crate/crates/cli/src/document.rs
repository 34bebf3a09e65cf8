//! JSON automaton documents and their validation.

use std::collections::HashMap;
use std::sync::Arc;

use fwa_core::automata::FeaturedWeightedAutomaton;
use fwa_core::energy::{normalized_lower_bound, EnergyFunction, Piece};
use fwa_core::features::{parse_guard, FeatureError, FeatureModel, Guard};
use fwa_core::kleene::{BoolValue, FuzzValue, TropValue};
use fwa_core::number::{format_rational, parse_rational, ExtRational, Rational};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Unreadable input, malformed JSON, schema or guard syntax errors.
    #[error("{0}")]
    Parse(String),
    /// Well-formed input that does not make sense.
    #[error("{0}")]
    Semantic(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 1,
            CliError::Semantic(_) => 2,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SemiringName {
    Bool,
    Tropical,
    Fuzzy,
    Energy,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Products {
    /// Only `"all"` is accepted.
    Keyword(String),
    List(Vec<Vec<String>>),
}

fn default_guard() -> String {
    "true".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionDoc {
    pub from: String,
    pub to: String,
    #[serde(default = "default_guard")]
    pub guard: String,
    pub weight: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AutomatonDocument {
    pub features: Vec<String>,
    pub products: Products,
    pub semiring: SemiringName,
    pub states: Vec<String>,
    pub initial: Vec<String>,
    pub accepting: Vec<String>,
    pub transitions: Vec<TransitionDoc>,
}

impl AutomatonDocument {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let doc: AutomatonDocument =
            serde_json::from_str(text).map_err(|e| CliError::Parse(format!("invalid document: {e}")))?;
        if let Products::Keyword(k) = &doc.products {
            if k != "all" {
                return Err(CliError::Parse(format!(
                    "invalid document: products must be \"all\" or a list, found \"{k}\""
                )));
            }
        }
        Ok(doc)
    }
}

#[derive(Debug, Clone)]
pub enum AnyAutomaton {
    Bool(FeaturedWeightedAutomaton<BoolValue>),
    Tropical(FeaturedWeightedAutomaton<TropValue>),
    Fuzzy(FeaturedWeightedAutomaton<FuzzValue>),
    Energy(FeaturedWeightedAutomaton<EnergyFunction>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Diagnostic {
    Warning(String),
    Note(String),
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Diagnostic::Warning(m) => write!(f, "warning: {m}"),
            Diagnostic::Note(m) => write!(f, "note: {m}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Loaded {
    pub model: Arc<FeatureModel>,
    pub automaton: AnyAutomaton,
    pub diagnostics: Vec<Diagnostic>,
}

impl Loaded {
    pub fn semiring(&self) -> SemiringName {
        match self.automaton {
            AnyAutomaton::Bool(_) => SemiringName::Bool,
            AnyAutomaton::Tropical(_) => SemiringName::Tropical,
            AnyAutomaton::Fuzzy(_) => SemiringName::Fuzzy,
            AnyAutomaton::Energy(_) => SemiringName::Energy,
        }
    }
}

fn feature_error(e: FeatureError) -> CliError {
    match e {
        FeatureError::Syntax { .. } => CliError::Parse(e.to_string()),
        _ => CliError::Semantic(e.to_string()),
    }
}

fn rational_field(v: &Value, what: &str) -> Result<Rational, String> {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(n) if n.is_i64() => n.to_string(),
        _ => return Err(format!("{what} must be an integer or a \"p/q\" string")),
    };
    parse_rational(&text).map_err(|e| format!("{what}: {e}"))
}

fn ext_weight(v: &Value) -> Result<ExtRational, String> {
    if v.as_str() == Some("inf") {
        return Ok(ExtRational::Infinity);
    }
    let q = rational_field(v, "weight")?;
    ExtRational::finite(q).ok_or_else(|| "weight must be nonnegative".to_string())
}

fn energy_weight(v: &Value, notes: &mut Vec<String>) -> Result<EnergyFunction, String> {
    let obj = v
        .as_object()
        .ok_or_else(|| "energy weight must be an object with a \"kind\"".to_string())?;
    let field = |name: &str| obj.get(name).ok_or_else(|| format!("energy weight lacks \"{name}\""));
    match obj.get("kind").and_then(Value::as_str) {
        Some("update") => {
            let lb = rational_field(field("lb")?, "lb")?;
            let delta = rational_field(field("delta")?, "delta")?;
            let raised = normalized_lower_bound(&lb, &delta);
            if raised != lb {
                notes.push(format!("lower bound raised to {}", format_rational(&raised)));
            }
            Ok(EnergyFunction::update(lb, delta))
        }
        Some("pwl") => {
            let lb = rational_field(field("lb")?, "lb")?;
            let pieces = field("pieces")?
                .as_array()
                .ok_or_else(|| "\"pieces\" must be a list".to_string())?;
            let mut parsed = Vec::with_capacity(pieces.len());
            for p in pieces {
                let start = rational_field(p.get("start").ok_or("piece lacks \"start\"")?, "start")?;
                let closed = p
                    .get("closed")
                    .and_then(Value::as_bool)
                    .ok_or("piece lacks boolean \"closed\"")?;
                if p.get("inf").and_then(Value::as_bool) == Some(true) {
                    parsed.push(Piece::infinite(start, closed));
                } else {
                    let offset = rational_field(p.get("offset").ok_or("piece lacks \"offset\"")?, "offset")?;
                    let slope = rational_field(p.get("slope").ok_or("piece lacks \"slope\"")?, "slope")?;
                    parsed.push(Piece::affine(start, closed, offset, slope));
                }
            }
            match parsed.first() {
                Some(first) if first.start != lb => {
                    return Err("the first piece must start at \"lb\"".to_string())
                }
                None => return Err("\"pieces\" must be nonempty".to_string()),
                _ => {}
            }
            EnergyFunction::from_pieces(parsed).map_err(|e| e.to_string())
        }
        _ => Err("energy weight kind must be \"update\" or \"pwl\"".to_string()),
    }
}

/// Resolves names, parses guards and weights, and collects diagnostics.
pub fn load(doc: &AutomatonDocument) -> Result<Loaded, CliError> {
    let model = match &doc.products {
        Products::Keyword(_) => FeatureModel::all(&doc.features),
        Products::List(list) => FeatureModel::with_products(&doc.features, list),
    }
    .map_err(feature_error)?;
    let model = Arc::new(model);

    let mut index = HashMap::new();
    for (i, s) in doc.states.iter().enumerate() {
        if index.insert(s.as_str(), i).is_some() {
            return Err(CliError::Semantic(format!("duplicate state `{s}`")));
        }
    }
    let state = |name: &str| {
        index
            .get(name)
            .copied()
            .ok_or_else(|| CliError::Semantic(format!("unknown state `{name}`")))
    };
    let initial = doc.initial.iter().map(|s| state(s)).collect::<Result<Vec<_>, _>>()?;
    let accepting = doc.accepting.iter().map(|s| state(s)).collect::<Result<Vec<_>, _>>()?;

    let mut diagnostics = Vec::new();
    let mut edges = Vec::with_capacity(doc.transitions.len());
    for (i, t) in doc.transitions.iter().enumerate() {
        let from = state(&t.from)?;
        let to = state(&t.to)?;
        let guard = parse_guard(&t.guard, &model).map_err(|e| match e {
            FeatureError::Syntax { .. } => CliError::Parse(format!("transition {i}: guard `{}`: {e}", t.guard)),
            _ => CliError::Semantic(format!("transition {i}: {e}")),
        })?;
        if !guard.is_satisfiable() {
            diagnostics.push(Diagnostic::Warning(format!(
                "transition {i} ({} -> {}): guard `{}` is never enabled",
                t.from, t.to, t.guard
            )));
        }
        edges.push((from, guard, to, &t.weight, i));
    }

    fn build<T: Clone + Eq + std::hash::Hash>(
        model: &Arc<FeatureModel>,
        doc: &AutomatonDocument,
        initial: &[usize],
        accepting: &[usize],
        edges: &[(usize, Guard, usize, &Value, usize)],
        zero: T,
        mut weight: impl FnMut(&Value, usize) -> Result<T, String>,
    ) -> Result<FeaturedWeightedAutomaton<T>, CliError> {
        let mut transitions = Vec::with_capacity(edges.len());
        for (from, guard, to, w, i) in edges {
            let w = weight(w, *i).map_err(|m| CliError::Semantic(format!("transition {i}: {m}")))?;
            transitions.push((*from, guard.clone(), w, *to));
        }
        FeaturedWeightedAutomaton::from_guarded(
            model.clone(),
            doc.states.clone(),
            initial.to_vec(),
            accepting.to_vec(),
            transitions,
            zero,
        )
        .map_err(|e| CliError::Semantic(e.to_string()))
    }

    let automaton = match doc.semiring {
        SemiringName::Bool => AnyAutomaton::Bool(build(
            &model, doc, &initial, &accepting, &edges, BoolValue(false),
            |w, _| w.as_bool().map(BoolValue).ok_or_else(|| "bool weight must be true or false".to_string()),
        )?),
        SemiringName::Tropical => AnyAutomaton::Tropical(build(
            &model, doc, &initial, &accepting, &edges, TropValue::infinity(),
            |w, _| ext_weight(w).map(TropValue),
        )?),
        SemiringName::Fuzzy => AnyAutomaton::Fuzzy(build(
            &model, doc, &initial, &accepting, &edges, FuzzValue::int(0),
            |w, _| ext_weight(w).map(FuzzValue),
        )?),
        SemiringName::Energy => AnyAutomaton::Energy(build(
            &model, doc, &initial, &accepting, &edges, EnergyFunction::bottom(),
            |w, i| {
                let mut notes = Vec::new();
                let f = energy_weight(w, &mut notes)?;
                diagnostics.extend(notes.into_iter().map(|n| Diagnostic::Note(format!("transition {i}: {n}"))));
                Ok(f)
            },
        )?),
    };
    Ok(Loaded {
        model,
        automaton,
        diagnostics,
    })
}
