//! Feature models, feature guards and guard partitions.
//!
//! Guards keep their syntactic formula for display, but every semantic
//! question (emptiness, disjointness, equality) is answered on the
//! memoized satisfaction set: a bit-set over the model's product list.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use fixedbitset::FixedBitSet;
use thiserror::Error;

/// Largest feature count for which all `2^n` products are materialized.
pub const MAX_FEATURES: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FeatureError {
    #[error("feature names must be nonempty")]
    EmptyFeatureName,
    #[error("duplicate feature `{0}`")]
    DuplicateFeature(String),
    #[error("invalid feature name `{0}`")]
    InvalidFeatureName(String),
    #[error("{0} features exceed the limit of {MAX_FEATURES}")]
    TooManyFeatures(usize),
    #[error("the product set is empty")]
    NoProducts,
    #[error("unknown feature `{0}`")]
    UnknownFeature(String),
    #[error("product {0} is not declared by the feature model")]
    UnknownProduct(String),
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
}

/// A product as a bit-vector over the feature ordering (bit `i` set iff
/// feature `i` is present).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Product(u32);

impl Product {
    pub const EMPTY: Product = Product(0);

    pub fn from_bits(bits: u32) -> Self {
        Product(bits)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn has(self, feature: usize) -> bool {
        self.0 >> feature & 1 == 1
    }

    pub fn with(self, feature: usize) -> Self {
        Product(self.0 | 1 << feature)
    }
}

/// Set of products, indexed by position in [`FeatureModel::products`].
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProductSet(FixedBitSet);

impl ProductSet {
    pub fn empty(len: usize) -> Self {
        ProductSet(FixedBitSet::with_capacity(len))
    }

    pub fn full(len: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(len);
        bits.insert_range(..);
        ProductSet(bits)
    }

    pub fn singleton(len: usize, index: usize) -> Self {
        let mut set = Self::empty(len);
        set.0.insert(index);
        set
    }

    pub fn contains(&self, index: usize) -> bool {
        self.0.contains(index)
    }

    pub fn insert(&mut self, index: usize) {
        self.0.insert(index);
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.0.count_ones(..) == self.0.len()
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn capacity(&self) -> usize {
        self.0.len()
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut bits = self.0.clone();
        bits.intersect_with(&other.0);
        ProductSet(bits)
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut bits = self.0.clone();
        bits.union_with(&other.0);
        ProductSet(bits)
    }

    pub fn complement(&self) -> Self {
        let mut bits = self.0.clone();
        bits.toggle_range(..);
        ProductSet(bits)
    }

    pub fn intersects(&self, other: &Self) -> bool {
        !self.0.is_disjoint(&other.0)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.ones().next()
    }
}

impl fmt::Debug for ProductSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.0.ones()).finish()
    }
}

/// Features `N` together with the admissible products `px ⊆ 2^N`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureModel {
    features: Vec<String>,
    products: Vec<Product>,
    index: HashMap<Product, usize>,
}

fn check_feature_name(name: &str) -> Result<(), FeatureError> {
    let mut chars = name.chars();
    match chars.next() {
        None => return Err(FeatureError::EmptyFeatureName),
        Some(c) if c.is_ascii_alphabetic() || c == '_' => {}
        Some(_) => return Err(FeatureError::InvalidFeatureName(name.to_string())),
    }
    if !chars.all(|c| c.is_ascii_alphanumeric() || c == '_') || name == "true" || name == "false"
    {
        return Err(FeatureError::InvalidFeatureName(name.to_string()));
    }
    Ok(())
}

impl FeatureModel {
    /// Model whose products are all subsets of `features`.
    pub fn all<S: AsRef<str>>(features: &[S]) -> Result<Self, FeatureError> {
        let features = Self::check_features(features)?;
        let products = (0..1u32 << features.len()).map(Product).collect();
        Ok(Self::build(features, products))
    }

    /// Model with an explicit product list; each product lists its features.
    pub fn with_products<S: AsRef<str>, P: AsRef<[S]>>(
        features: &[S],
        products: &[P],
    ) -> Result<Self, FeatureError> {
        let features = Self::check_features(features)?;
        let mut bits = Vec::with_capacity(products.len());
        for product in products {
            let mut p = Product::EMPTY;
            for name in product.as_ref() {
                let name = name.as_ref();
                let i = features
                    .iter()
                    .position(|f| f == name)
                    .ok_or_else(|| FeatureError::UnknownFeature(name.to_string()))?;
                p = p.with(i);
            }
            if !bits.contains(&p) {
                bits.push(p);
            }
        }
        if bits.is_empty() {
            return Err(FeatureError::NoProducts);
        }
        Ok(Self::build(features, bits))
    }

    /// Model with products given directly as bit-vectors.
    pub fn from_bits<S: AsRef<str>>(features: &[S], products: &[u32]) -> Result<Self, FeatureError> {
        let features = Self::check_features(features)?;
        let limit = 1u64 << features.len();
        let mut bits: Vec<Product> = Vec::new();
        for &p in products {
            if u64::from(p) >= limit {
                return Err(FeatureError::UnknownProduct(format!("{p:#b}")));
            }
            if !bits.contains(&Product(p)) {
                bits.push(Product(p));
            }
        }
        if bits.is_empty() {
            return Err(FeatureError::NoProducts);
        }
        Ok(Self::build(features, bits))
    }

    fn check_features<S: AsRef<str>>(features: &[S]) -> Result<Vec<String>, FeatureError> {
        if features.len() > MAX_FEATURES {
            return Err(FeatureError::TooManyFeatures(features.len()));
        }
        let mut out: Vec<String> = Vec::with_capacity(features.len());
        for f in features {
            let f = f.as_ref();
            check_feature_name(f)?;
            if out.iter().any(|g| g == f) {
                return Err(FeatureError::DuplicateFeature(f.to_string()));
            }
            out.push(f.to_string());
        }
        Ok(out)
    }

    fn build(features: Vec<String>, products: Vec<Product>) -> Self {
        let index = products.iter().enumerate().map(|(i, &p)| (p, i)).collect();
        FeatureModel {
            features,
            products,
            index,
        }
    }

    pub fn features(&self) -> &[String] {
        &self.features
    }

    pub fn products(&self) -> &[Product] {
        &self.products
    }

    pub fn product_count(&self) -> usize {
        self.products.len()
    }

    pub fn feature_index(&self, name: &str) -> Option<usize> {
        self.features.iter().position(|f| f == name)
    }

    /// Position of `p` in the product list, if it is a declared product.
    pub fn product_index(&self, p: Product) -> Option<usize> {
        self.index.get(&p).copied()
    }

    /// Resolves a list of feature names to a declared product.
    pub fn product<S: AsRef<str>>(&self, names: &[S]) -> Result<Product, FeatureError> {
        let mut p = Product::EMPTY;
        for name in names {
            let i = self
                .feature_index(name.as_ref())
                .ok_or_else(|| FeatureError::UnknownFeature(name.as_ref().to_string()))?;
            p = p.with(i);
        }
        match self.product_index(p) {
            Some(_) => Ok(p),
            None => Err(FeatureError::UnknownProduct(self.product_name(p))),
        }
    }

    pub fn product_features(&self, p: Product) -> Vec<&str> {
        (0..self.features.len())
            .filter(|&i| p.has(i))
            .map(|i| self.features[i].as_str())
            .collect()
    }

    /// Renders a product as `{a,b}`.
    pub fn product_name(&self, p: Product) -> String {
        format!("{{{}}}", self.product_features(p).join(","))
    }

    /// The satisfaction set of a formula, by exhaustive evaluation.
    pub fn sat(&self, expr: &GuardExpr) -> ProductSet {
        let mut set = ProductSet::empty(self.products.len());
        for (i, &p) in self.products.iter().enumerate() {
            if expr.eval(p) {
                set.insert(i);
            }
        }
        set
    }

    pub fn all_products(&self) -> ProductSet {
        ProductSet::full(self.products.len())
    }
}

/// Syntax tree of a feature guard; atoms are feature indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum GuardExpr {
    True,
    False,
    Atom(usize),
    Not(Arc<GuardExpr>),
    And(Arc<GuardExpr>, Arc<GuardExpr>),
    Or(Arc<GuardExpr>, Arc<GuardExpr>),
}

impl GuardExpr {
    pub fn eval(&self, p: Product) -> bool {
        match self {
            GuardExpr::True => true,
            GuardExpr::False => false,
            GuardExpr::Atom(i) => p.has(*i),
            GuardExpr::Not(e) => !e.eval(p),
            GuardExpr::And(l, r) => l.eval(p) && r.eval(p),
            GuardExpr::Or(l, r) => l.eval(p) || r.eval(p),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            GuardExpr::Or(..) => 1,
            GuardExpr::And(..) => 2,
            GuardExpr::Not(_) => 3,
            _ => 4,
        }
    }

    fn write(&self, names: &[String], out: &mut String) {
        match self {
            GuardExpr::True => out.push_str("true"),
            GuardExpr::False => out.push_str("false"),
            GuardExpr::Atom(i) => out.push_str(&names[*i]),
            GuardExpr::Not(e) => {
                out.push('!');
                e.write_operand(names, out, 3, false);
            }
            GuardExpr::And(l, r) => {
                l.write_operand(names, out, 2, false);
                out.push_str(" & ");
                r.write_operand(names, out, 2, true);
            }
            GuardExpr::Or(l, r) => {
                l.write_operand(names, out, 1, false);
                out.push_str(" | ");
                r.write_operand(names, out, 1, true);
            }
        }
    }

    // Binary operators are left-associative, so a right operand of equal
    // precedence needs parentheses.
    fn write_operand(&self, names: &[String], out: &mut String, parent: u8, right: bool) {
        let own = self.precedence();
        if own < parent || (right && own == parent && parent < 3) {
            out.push('(');
            self.write(names, out);
            out.push(')');
        } else {
            self.write(names, out);
        }
    }

    /// Renders the formula in the input grammar.
    pub fn render(&self, model: &FeatureModel) -> String {
        let mut out = String::new();
        self.write(&model.features, &mut out);
        out
    }

    pub fn size(&self) -> usize {
        match self {
            GuardExpr::True | GuardExpr::False | GuardExpr::Atom(_) => 1,
            GuardExpr::Not(e) => 1 + e.size(),
            GuardExpr::And(l, r) | GuardExpr::Or(l, r) => 1 + l.size() + r.size(),
        }
    }
}

/// A feature guard: formula plus its satisfaction set over one model.
#[derive(Debug, Clone)]
pub struct Guard {
    expr: Arc<GuardExpr>,
    sat: ProductSet,
}

impl PartialEq for Guard {
    /// Semantic equality.
    fn eq(&self, other: &Self) -> bool {
        self.sat == other.sat
    }
}

impl Eq for Guard {}

impl Guard {
    pub fn from_expr(expr: GuardExpr, model: &FeatureModel) -> Self {
        let sat = model.sat(&expr);
        Guard {
            expr: Arc::new(expr),
            sat,
        }
    }

    pub fn tt(model: &FeatureModel) -> Self {
        Guard {
            expr: Arc::new(GuardExpr::True),
            sat: model.all_products(),
        }
    }

    pub fn ff(model: &FeatureModel) -> Self {
        Guard {
            expr: Arc::new(GuardExpr::False),
            sat: ProductSet::empty(model.product_count()),
        }
    }

    pub fn atom(feature: usize, model: &FeatureModel) -> Self {
        Self::from_expr(GuardExpr::Atom(feature), model)
    }

    pub fn expr(&self) -> &GuardExpr {
        &self.expr
    }

    pub fn sat(&self) -> &ProductSet {
        &self.sat
    }

    pub fn is_satisfiable(&self) -> bool {
        !self.sat.is_empty()
    }

    pub fn holds(&self, product_index: usize) -> bool {
        self.sat.contains(product_index)
    }

    /// Conjunction; a literal `true` operand is dropped from the formula.
    pub fn and(&self, other: &Guard) -> Guard {
        if *self.expr == GuardExpr::True {
            return other.clone();
        }
        if *other.expr == GuardExpr::True {
            return self.clone();
        }
        Guard {
            expr: Arc::new(GuardExpr::And(self.expr.clone(), other.expr.clone())),
            sat: self.sat.intersection(&other.sat),
        }
    }

    pub fn or(&self, other: &Guard) -> Guard {
        Guard {
            expr: Arc::new(GuardExpr::Or(self.expr.clone(), other.expr.clone())),
            sat: self.sat.union(&other.sat),
        }
    }

    pub fn not(&self) -> Guard {
        Guard {
            expr: Arc::new(GuardExpr::Not(self.expr.clone())),
            sat: self.sat.complement(),
        }
    }

    /// The formula as written (no simplification).
    pub fn render(&self, model: &FeatureModel) -> String {
        self.expr.render(model)
    }

    /// A short equivalent formula synthesized from the satisfaction set.
    ///
    /// Products outside the model act as don't-cares. The result is a
    /// disjunction of cubes found by greedy literal dropping, so it is
    /// small but not necessarily minimal.
    pub fn render_simplified(&self, model: &FeatureModel) -> String {
        if self.sat.is_full() {
            return "true".into();
        }
        if self.sat.is_empty() {
            return "false".into();
        }
        let n = model.features.len();
        let off: Vec<u32> = model
            .products
            .iter()
            .enumerate()
            .filter(|(i, _)| !self.sat.contains(*i))
            .map(|(_, p)| p.bits())
            .collect();
        let on: Vec<u32> = self.sat.iter().map(|i| model.products[i].bits()).collect();
        let full_mask = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut covered = vec![false; on.len()];
        let mut cubes: Vec<(u32, u32)> = Vec::new();
        for start in 0..on.len() {
            if covered[start] {
                continue;
            }
            let value = on[start];
            let mut mask = full_mask;
            for f in 0..n {
                let trial = mask & !(1 << f);
                if off.iter().all(|&q| q & trial != value & trial) {
                    mask = trial;
                }
            }
            for (i, &p) in on.iter().enumerate() {
                if p & mask == value & mask {
                    covered[i] = true;
                }
            }
            cubes.push((mask, value & mask));
        }
        let rendered: Vec<String> = cubes
            .iter()
            .map(|&(mask, value)| {
                let lits: Vec<String> = (0..n)
                    .filter(|f| mask >> f & 1 == 1)
                    .map(|f| {
                        if value >> f & 1 == 1 {
                            model.features[f].clone()
                        } else {
                            format!("!{}", model.features[f])
                        }
                    })
                    .collect();
                if lits.is_empty() {
                    "true".to_string()
                } else {
                    lits.join(" & ")
                }
            })
            .collect();
        rendered.join(" | ")
    }
}

/// Returns exactly the products satisfying `expr`.
pub fn sat(expr: &GuardExpr, model: &FeatureModel) -> ProductSet {
    model.sat(expr)
}

/// `⋀_{f∈p} f ∧ ⋀_{f∉p} ¬f`, whose only model is `p`.
pub fn characteristic_guard(p: Product, model: &FeatureModel) -> Result<Guard, FeatureError> {
    if model.product_index(p).is_none() {
        return Err(FeatureError::UnknownProduct(model.product_name(p)));
    }
    let literal = |i: usize| {
        let atom = Arc::new(GuardExpr::Atom(i));
        if p.has(i) {
            atom
        } else {
            Arc::new(GuardExpr::Not(atom))
        }
    };
    let n = model.features.len();
    let expr = (1..n).fold(
        if n == 0 {
            Arc::new(GuardExpr::True)
        } else {
            literal(0)
        },
        |acc, i| Arc::new(GuardExpr::And(acc, literal(i))),
    );
    Ok(Guard::from_expr((*expr).clone(), model))
}

/// Checks the three guard-partition conditions: cover, nonempty, disjoint.
pub fn is_partition(guards: &[Guard], model: &FeatureModel) -> bool {
    let mut seen = ProductSet::empty(model.product_count());
    for g in guards {
        if g.sat.capacity() != model.product_count() || g.sat.is_empty() || g.sat.intersects(&seen)
        {
            return false;
        }
        seen = seen.union(&g.sat);
    }
    seen.is_full()
}

/// A set of guards whose satisfaction sets partition the products.
#[derive(Debug, Clone)]
pub struct GuardPartition {
    guards: Vec<Guard>,
}

impl GuardPartition {
    pub fn new(guards: Vec<Guard>, model: &FeatureModel) -> Option<Self> {
        is_partition(&guards, model).then_some(GuardPartition { guards })
    }

    /// The one-block partition `{true}`.
    pub fn trivial(model: &FeatureModel) -> Self {
        GuardPartition {
            guards: vec![Guard::tt(model)],
        }
    }

    pub(crate) fn new_unchecked(guards: Vec<Guard>) -> Self {
        GuardPartition { guards }
    }

    pub fn guards(&self) -> &[Guard] {
        &self.guards
    }

    pub fn len(&self) -> usize {
        self.guards.len()
    }

    pub fn is_empty(&self) -> bool {
        self.guards.is_empty()
    }

    /// Index of the unique block satisfied by the product at `product_index`.
    pub fn block_of(&self, product_index: usize) -> Option<usize> {
        self.guards.iter().position(|g| g.holds(product_index))
    }
}

/// `P1 ∧ P2` with, per block, the indices of its unique factors.
#[derive(Debug, Clone)]
pub struct Intersection {
    pub partition: GuardPartition,
    pub factors: Vec<(usize, usize)>,
}

pub fn intersect_partitions(p1: &GuardPartition, p2: &GuardPartition) -> Intersection {
    let mut guards = Vec::new();
    let mut factors = Vec::new();
    for (i, g1) in p1.guards.iter().enumerate() {
        for (j, g2) in p2.guards.iter().enumerate() {
            if g1.sat.intersects(&g2.sat) {
                guards.push(g1.and(g2));
                factors.push((i, j));
            }
        }
    }
    Intersection {
        partition: GuardPartition { guards },
        factors,
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    model: &'a FeatureModel,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn error(&self, msg: impl Into<String>) -> FeatureError {
        FeatureError::Syntax {
            pos: self.pos,
            msg: msg.into(),
        }
    }

    fn disjunction(&mut self) -> Result<GuardExpr, FeatureError> {
        let mut lhs = self.conjunction()?;
        while self.peek() == Some(b'|') {
            self.pos += 1;
            let rhs = self.conjunction()?;
            lhs = GuardExpr::Or(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<GuardExpr, FeatureError> {
        let mut lhs = self.negation()?;
        while self.peek() == Some(b'&') {
            self.pos += 1;
            let rhs = self.negation()?;
            lhs = GuardExpr::And(Arc::new(lhs), Arc::new(rhs));
        }
        Ok(lhs)
    }

    fn negation(&mut self) -> Result<GuardExpr, FeatureError> {
        match self.peek() {
            Some(b'!') => {
                self.pos += 1;
                Ok(GuardExpr::Not(Arc::new(self.negation()?)))
            }
            Some(b'(') => {
                self.pos += 1;
                let e = self.disjunction()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected `)`"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match word {
                    "true" => Ok(GuardExpr::True),
                    "false" => Ok(GuardExpr::False),
                    name => self
                        .model
                        .feature_index(name)
                        .map(GuardExpr::Atom)
                        .ok_or_else(|| FeatureError::UnknownFeature(name.to_string())),
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of input")),
        }
    }
}

/// Parses a guard in the `!`/`&`/`|` grammar and resolves its atoms.
pub fn parse_guard(text: &str, model: &FeatureModel) -> Result<Guard, FeatureError> {
    let mut parser = Parser {
        src: text.as_bytes(),
        pos: 0,
        model,
    };
    let expr = parser.disjunction()?;
    if parser.peek().is_some() {
        return Err(parser.error("trailing input"));
    }
    Ok(Guard::from_expr(expr, model))
}
