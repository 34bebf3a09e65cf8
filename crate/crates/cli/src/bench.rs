//! Family-based vs. product-by-product timing on random tropical automata.

use std::fmt::Write;
use std::time::{Duration, Instant};

use fwa_core::automata::{featured_reach_value, per_product_reach, FeaturedWeightedAutomaton};
use fwa_core::kleene::{TropValue, Tropical};
use fwa_core::random::{full_model, random_guard};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, Copy)]
pub struct BenchOptions {
    pub features: usize,
    pub states: usize,
    pub transitions: usize,
    pub instances: usize,
    pub seed: u64,
}

pub const CSV_HEADER: &str =
    "instance,features,products,states,transitions,family_ms,per_product_ms,speedup,blocks,agree";

fn instance(rng: &mut StdRng, opts: &BenchOptions) -> FeaturedWeightedAutomaton<TropValue> {
    let model = full_model(opts.features);
    let n = opts.states;
    let states = (0..n).map(|i| format!("s{i}")).collect();
    let accepting = (1..n).filter(|_| rng.gen_bool(0.25)).chain([n - 1]).collect();
    let transitions = (0..opts.transitions)
        .map(|_| {
            let from = rng.gen_range(0..n);
            let to = rng.gen_range(0..n);
            (from, random_guard(rng, &model), TropValue::int(rng.gen_range(1..=20)), to)
        })
        .collect();
    FeaturedWeightedAutomaton::from_guarded(
        model,
        states,
        vec![0],
        accepting,
        transitions,
        TropValue::infinity(),
    )
    .expect("indices in range")
}

fn millis(d: Duration) -> f64 {
    d.as_secs_f64() * 1000.0
}

/// Runs the benchmark and returns the CSV report.
pub fn run(opts: &BenchOptions) -> String {
    let mut rng = StdRng::seed_from_u64(opts.seed);
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for i in 0..opts.instances {
        let aut = instance(&mut rng, opts);
        let model = aut.model().clone();

        let start = Instant::now();
        let family = featured_reach_value(&Tropical, &aut);
        let family_time = start.elapsed();

        let start = Instant::now();
        let products = per_product_reach(&Tropical, &aut);
        let product_time = start.elapsed();

        let agree = family.table(&model) == products;
        let speedup = product_time.as_secs_f64() / family_time.as_secs_f64().max(1e-9);
        writeln!(
            out,
            "{i},{},{},{},{},{:.3},{:.3},{:.2},{},{agree}",
            opts.features,
            model.product_count(),
            opts.states,
            opts.transitions,
            millis(family_time),
            millis(product_time),
            speedup,
            family.len(),
        )
        .expect("writing to a string");
    }
    out
}
