//! Result documents and their table/JSON rendering.

use fwa_core::features::FeatureModel;
use fwa_core::gplift::GuardedValue;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolicRow {
    pub guard: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ProductRow {
    pub product: String,
    pub value: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ResultDocument {
    pub query: String,
    pub symbolic: Vec<SymbolicRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub per_product: Option<Vec<ProductRow>>,
}

impl ResultDocument {
    /// Rows ordered by the first product of each block.
    pub fn from_value(
        query: &str,
        model: &FeatureModel,
        value: &GuardedValue<String>,
        enumerate: bool,
    ) -> Self {
        let mut blocks: Vec<_> = value.blocks().iter().collect();
        blocks.sort_by_key(|(g, _)| g.sat().first());
        let symbolic = blocks
            .into_iter()
            .map(|(g, v)| SymbolicRow {
                guard: g.render_simplified(model),
                value: v.clone(),
            })
            .collect();
        let per_product = enumerate.then(|| {
            model
                .products()
                .iter()
                .zip(value.table(model))
                .map(|(&p, value)| ProductRow {
                    product: model.product_name(p),
                    value,
                })
                .collect()
        });
        ResultDocument {
            query: query.to_string(),
            symbolic,
            per_product,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn to_table(&self) -> String {
        let mut out = format!("query: {}\n", self.query);
        let symbolic: Vec<[&str; 2]> = self
            .symbolic
            .iter()
            .map(|r| [r.guard.as_str(), r.value.as_str()])
            .collect();
        write_table(&mut out, ["guard", "value"], &symbolic);
        if let Some(rows) = &self.per_product {
            out.push('\n');
            let rows: Vec<[&str; 2]> = rows
                .iter()
                .map(|r| [r.product.as_str(), r.value.as_str()])
                .collect();
            write_table(&mut out, ["product", "value"], &rows);
        }
        out
    }
}

fn write_table(out: &mut String, header: [&str; 2], rows: &[[&str; 2]]) {
    let width = rows
        .iter()
        .map(|r| r[0].chars().count())
        .chain([header[0].len()])
        .max()
        .unwrap_or(0);
    for [left, right] in std::iter::once(header).chain(rows.iter().copied()) {
        let pad = width - left.chars().count();
        out.push_str(&format!("{left}{}  {right}\n", " ".repeat(pad)));
    }
}
