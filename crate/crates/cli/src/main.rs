//! `fwa`: analyze featured weighted automata from JSON documents.

mod bench;
mod document;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fwa_core::automata::{
    buchi_value, featured_buchi_value, featured_reach_value, reach_value, WeightedAutomaton,
};
use fwa_core::energy::{Energy, EnergyFunction, EnergyValue, OmegaIndicator};
use fwa_core::features::FeatureModel;
use fwa_core::fwalgo::featured_floyd_warshall;
use fwa_core::gplift::GuardedValue;
use fwa_core::kleene::{Boolean, Fuzzy, Tropical};
use fwa_core::number::{parse_rational, Rational};
use num_traits::Signed;

use crate::bench::BenchOptions;
use crate::document::{load, AnyAutomaton, AutomatonDocument, CliError, Loaded, SemiringName};
use crate::output::{ProductRow, ResultDocument, SymbolicRow};

#[derive(Parser)]
#[command(name = "fwa", version, about = "Family-based analysis of featured weighted automata")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the symbolic value of an automaton.
    Value {
        file: PathBuf,
        #[command(flatten)]
        query: QueryArgs,
        #[arg(long, value_enum, default_value = "matrix")]
        algo: Algo,
        /// Add the value of every product.
        #[arg(long)]
        enumerate: bool,
        /// Floyd–Warshall without the empty-path base case.
        #[arg(long)]
        strict_fig1: bool,
    },
    /// Compute the value of one product's projection.
    Project {
        file: PathBuf,
        /// Comma-separated features, e.g. `a,b`; empty for no features.
        product: String,
        #[command(flatten)]
        query: QueryArgs,
    },
    /// Check a document and report diagnostics.
    Validate { file: PathBuf },
    /// Time family-based against per-product analysis on random instances.
    Bench {
        #[arg(long, default_value_t = 10)]
        features: usize,
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long, default_value_t = 60)]
        transitions: usize,
        #[arg(long, default_value_t = 3)]
        instances: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct QueryArgs {
    #[arg(long, value_enum, default_value = "reach")]
    query: Query,
    /// Initial credit for energy automata; answers become true/false.
    #[arg(long)]
    x0: Option<String>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Query {
    Reach,
    Buchi,
    Minreach,
}

impl Query {
    fn name(self) -> &'static str {
        match self {
            Query::Reach => "reach",
            Query::Buchi => "buchi",
            Query::Minreach => "minreach",
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Algo {
    Matrix,
    Floydwarshall,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Table,
    Json,
}

fn semantic(msg: impl Into<String>) -> CliError {
    CliError::Semantic(msg.into())
}

fn read(path: &Path) -> Result<Loaded, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", path.display())))?;
    load(&AutomatonDocument::from_json(&text)?)
}

fn parse_x0(text: &Option<String>, semiring: SemiringName) -> Result<Option<Rational>, CliError> {
    let Some(text) = text else {
        return Ok(None);
    };
    if semiring != SemiringName::Energy {
        return Err(semantic("--x0 applies to energy automata only"));
    }
    let x0 = parse_rational(text).map_err(|e| CliError::Parse(e.to_string()))?;
    if x0.is_negative() {
        return Err(semantic("--x0 must be nonnegative"));
    }
    Ok(Some(x0))
}

fn check_query(query: Query, semiring: SemiringName) -> Result<(), CliError> {
    match query {
        Query::Buchi if semiring != SemiringName::Energy => {
            Err(semantic("the buchi query needs an energy automaton"))
        }
        Query::Minreach if semiring != SemiringName::Tropical => {
            Err(semantic("the minreach query needs a tropical automaton"))
        }
        _ => Ok(()),
    }
}

fn reach_at(f: &EnergyFunction, x0: &Option<Rational>) -> String {
    match x0 {
        Some(x) => (!f.apply(&EnergyValue::Finite(x.clone())).is_bottom()).to_string(),
        None => f.to_string(),
    }
}

fn buchi_at(v: &OmegaIndicator, x0: &Option<Rational>) -> String {
    match x0 {
        Some(x) => v.holds_at(x).to_string(),
        None => v.to_string(),
    }
}

fn symbolic_value(
    loaded: &Loaded,
    query: Query,
    algo: Algo,
    strict_fig1: bool,
    x0: &Option<Rational>,
) -> Result<GuardedValue<String>, CliError> {
    if algo == Algo::Floydwarshall && loaded.semiring() != SemiringName::Tropical {
        return Err(semantic("--algo floydwarshall needs a tropical automaton"));
    }
    if strict_fig1 && algo != Algo::Floydwarshall {
        return Err(semantic("--strict-fig1 needs --algo floydwarshall"));
    }
    let show = |v: &dyn std::fmt::Display| v.to_string();
    Ok(match (&loaded.automaton, query) {
        (AnyAutomaton::Bool(f), _) => featured_reach_value(&Boolean, f).map(|v| show(v)),
        (AnyAutomaton::Fuzzy(f), _) => featured_reach_value(&Fuzzy, f).map(|v| show(v)),
        (AnyAutomaton::Tropical(f), _) => match algo {
            Algo::Matrix => featured_reach_value(&Tropical, f).map(|v| show(v)),
            Algo::Floydwarshall => featured_floyd_warshall(f, strict_fig1).map(|v| show(v)),
        },
        (AnyAutomaton::Energy(f), Query::Buchi) => {
            featured_buchi_value(&Energy, f).map(|v| buchi_at(v, x0))
        }
        (AnyAutomaton::Energy(f), _) => featured_reach_value(&Energy, f).map(|v| reach_at(v, x0)),
    })
}

fn projected_value(
    loaded: &Loaded,
    product: &str,
    query: Query,
    x0: &Option<Rational>,
) -> Result<(String, String), CliError> {
    let model: &FeatureModel = &loaded.model;
    let names: Vec<&str> = product
        .trim()
        .trim_start_matches('{')
        .trim_end_matches('}')
        .split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .collect();
    let p = model.product(&names).map_err(|e| semantic(e.to_string()))?;
    let index = model
        .product_index(p)
        .ok_or_else(|| semantic(format!("product {} is not declared", model.product_name(p))))?;
    fn reach<A: fwa_core::kleene::KleeneAlgebra>(alg: &A, aut: &WeightedAutomaton<A::Elem>) -> String
    where
        A::Elem: std::fmt::Display,
    {
        reach_value(alg, aut).to_string()
    }
    let value = match (&loaded.automaton, query) {
        (AnyAutomaton::Bool(f), _) => reach(&Boolean, &f.project_index(index)),
        (AnyAutomaton::Fuzzy(f), _) => reach(&Fuzzy, &f.project_index(index)),
        (AnyAutomaton::Tropical(f), _) => reach(&Tropical, &f.project_index(index)),
        (AnyAutomaton::Energy(f), Query::Buchi) => {
            buchi_at(&buchi_value(&Energy, &f.project_index(index)), x0)
        }
        (AnyAutomaton::Energy(f), _) => reach_at(&reach_value(&Energy, &f.project_index(index)), x0),
    };
    Ok((model.product_name(p), value))
}

fn emit(doc: &ResultDocument, format: Format) {
    match format {
        Format::Table => print!("{}", doc.to_table()),
        Format::Json => println!("{}", doc.to_json()),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Value {
            file,
            query,
            algo,
            enumerate,
            strict_fig1,
        } => {
            let loaded = read(&file)?;
            check_query(query.query, loaded.semiring())?;
            let x0 = parse_x0(&query.x0, loaded.semiring())?;
            let value = symbolic_value(&loaded, query.query, algo, strict_fig1, &x0)?;
            let doc = ResultDocument::from_value(query.query.name(), &loaded.model, &value, enumerate);
            emit(&doc, query.format);
        }
        Command::Project {
            file,
            product,
            query,
        } => {
            let loaded = read(&file)?;
            check_query(query.query, loaded.semiring())?;
            let x0 = parse_x0(&query.x0, loaded.semiring())?;
            let (product, value) = projected_value(&loaded, &product, query.query, &x0)?;
            let doc = ResultDocument {
                query: query.query.name().to_string(),
                symbolic: vec![SymbolicRow {
                    guard: "true".to_string(),
                    value: value.clone(),
                }],
                per_product: Some(vec![ProductRow { product, value }]),
            };
            emit(&doc, query.format);
        }
        Command::Validate { file } => {
            let loaded = read(&file)?;
            for d in &loaded.diagnostics {
                eprintln!("{d}");
            }
            let features = loaded.model.features().len();
            eprintln!(
                "products: {} of {} ({} features)",
                loaded.model.product_count(),
                1u64 << features,
                features
            );
            println!("OK");
        }
        Command::Bench {
            features,
            states,
            transitions,
            instances,
            seed,
        } => {
            if features > fwa_core::features::MAX_FEATURES || states == 0 {
                return Err(semantic("bench needs 1 or more states and at most 20 features"));
            }
            let opts = BenchOptions {
                features,
                states,
                transitions,
                instances,
                seed,
            };
            print!("{}", bench::run(&opts));
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    // usage errors share exit code 1 with parse errors
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
