//! Acceptance criteria, one PASS/FAIL line each.
//!
//! Oracle constants for the energy closed forms: at most 64 iterations per
//! sample point; an orbit still strictly increasing after that is declared
//! divergent (its increments never shrink), one still strictly decreasing
//! is declared to die out (its decrements never shrink).

use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use fwa_core::automata::{
    featured_buchi_value, featured_reach_value, matrix_representation, per_product_buchi,
    per_product_reach, FeaturedWeightedAutomaton,
};
use fwa_core::energy::{Energy, EnergyFunction, EnergyValue, OmegaIndicator};
use fwa_core::features::{FeatureModel, Guard};
use fwa_core::fwalgo::featured_floyd_warshall;
use fwa_core::gplift::{canonicalize, Featured};
use fwa_core::kleene::{BoolValue, Boolean, FuzzValue, Fuzzy, KleeneAlgebra, TropValue, Tropical};
use fwa_core::matrix::{mat_plus, mat_product, mat_star, path_sum_oracle, Matrix};
use fwa_core::number::{ratio, Rational};
use fwa_core::random::{
    full_model, random_bool, random_fuzz, random_guard, random_guarded, random_guarded_automaton,
    random_pwl, random_trop, random_update, sparse_model,
};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

struct Outcome {
    failures: Vec<String>,
    detail: String,
}

impl Outcome {
    fn new() -> Self {
        Outcome {
            failures: Vec::new(),
            detail: String::new(),
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if !ok && self.failures.len() < 5 {
            self.failures.push(what());
        } else if !ok {
            self.failures.push(String::new());
        }
    }
}

// ---- criterion 1 ---------------------------------------------------------

fn suite_one(seed: u64) -> Vec<FeaturedWeightedAutomaton<TropValue>> {
    let mut rng = StdRng::seed_from_u64(seed);
    (0..500)
        .map(|_| random_guarded_automaton(&mut rng, full_model(4), 6, 12, TropValue::infinity(), random_trop))
        .collect()
}

fn family_soundness(trop: &[FeaturedWeightedAutomaton<TropValue>]) -> Outcome {
    let mut out = Outcome::new();
    for (i, f) in trop.iter().enumerate() {
        let ok = featured_reach_value(&Tropical, f).table(f.model()) == per_product_reach(&Tropical, f);
        out.check(ok, || format!("tropical instance {i}"));
    }
    let mut rng = StdRng::seed_from_u64(12);
    for i in 0..500 {
        let f = random_guarded_automaton(&mut rng, full_model(4), 6, 12, FuzzValue::int(0), random_fuzz);
        let ok = featured_reach_value(&Fuzzy, &f).table(f.model()) == per_product_reach(&Fuzzy, &f);
        out.check(ok, || format!("fuzzy instance {i}"));
        let f = random_guarded_automaton(&mut rng, full_model(4), 6, 12, BoolValue(false), random_bool);
        let ok = featured_reach_value(&Boolean, &f).table(f.model()) == per_product_reach(&Boolean, &f);
        out.check(ok, || format!("boolean instance {i}"));
    }
    out.detail = "1500 automata, 16 products each".into();
    out
}

// ---- criterion 2 ---------------------------------------------------------

fn energy_family_soundness() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(2);
    for i in 0..200 {
        let model = full_model(rng.gen_range(0..=3));
        let f = random_guarded_automaton(&mut rng, model, 4, 8, EnergyFunction::bottom(), random_update);
        let ok = featured_buchi_value(&Energy, &f).table(f.model()) == per_product_buchi(&Energy, &f);
        out.check(ok, || format!("energy instance {i}"));
    }
    out.detail = "200 automata".into();
    out
}

// ---- criterion 3 ---------------------------------------------------------

fn floyd_warshall_equivalence(trop: &[FeaturedWeightedAutomaton<TropValue>]) -> Outcome {
    let mut out = Outcome::new();
    let mut differing = 0;
    for (i, f) in trop.iter().enumerate() {
        let reference = featured_reach_value(&Tropical, f);
        out.check(featured_floyd_warshall(f, false) == reference, || format!("instance {i}"));

        // strict mode counts only nonempty paths: α M M* κ
        let lifted = Featured::new(f.model().clone(), Tropical);
        let rep = matrix_representation(&lifted, f.automaton());
        let plus = mat_product(&lifted, &rep.m, &mat_star(&lifted, &rep.m)).unwrap();
        let inner = f.automaton();
        let mut nonempty = lifted.zero();
        for &s in inner.initial() {
            let row = rep.order.iter().position(|&o| o == s).unwrap();
            for col in 0..rep.k {
                nonempty = lifted.plus(&nonempty, plus.get(row, col));
            }
        }
        let strict = featured_floyd_warshall(f, true);
        out.check(strict == nonempty, || format!("strict instance {i}"));

        let empty_path_possible = inner.initial().iter().any(|&s| inner.is_accepting(s));
        let (strict, reference) = (strict.table(f.model()), reference.table(f.model()));
        for (p, (s, r)) in strict.iter().zip(&reference).enumerate() {
            if s != r {
                differing += 1;
                let ok = empty_path_possible && *r == TropValue::int(0) && s > r;
                out.check(ok, || format!("strict instance {i} product {p}: {s} vs {r}"));
            }
        }
    }
    out.detail = format!("500 automata; strict mode differs on {differing} product values, all empty-path optimal");
    out
}

// ---- criterion 4 ---------------------------------------------------------

fn laws<A: KleeneAlgebra>(
    alg: &A,
    bounded: bool,
    out: &mut Outcome,
    name: &str,
    mut gen: impl FnMut() -> A::Elem,
) {
    for i in 0..1000 {
        let (x, y, z) = (gen(), gen(), gen());
        let (zero, one) = (alg.zero(), alg.one());
        let p = |a: &A::Elem, b: &A::Elem| alg.plus(a, b);
        let t = |a: &A::Elem, b: &A::Elem| alg.times(a, b);
        let mut law = |ok: bool, which: &str| out.check(ok, || format!("{name} #{i}: {which} for {x:?}, {y:?}, {z:?}"));
        law(p(&p(&x, &y), &z) == p(&x, &p(&y, &z)), "+ associative");
        law(p(&x, &y) == p(&y, &x), "+ commutative");
        law(p(&x, &x) == x, "+ idempotent");
        law(p(&x, &zero) == x, "0 neutral");
        law(t(&t(&x, &y), &z) == t(&x, &t(&y, &z)), "· associative");
        law(t(&x, &one) == x && t(&one, &x) == x, "1 neutral");
        law(t(&x, &p(&y, &z)) == p(&t(&x, &y), &t(&x, &z)), "left distributive");
        law(t(&p(&x, &y), &z) == p(&t(&x, &z), &t(&y, &z)), "right distributive");
        law(t(&x, &zero) == zero && t(&zero, &x) == zero, "0 annihilates");
        let s = alg.star(&x);
        law(s == p(&one, &t(&x, &s)), "x* = 1 + x x*");
        law(s == p(&one, &t(&s, &x)), "x* = 1 + x* x");
        if bounded {
            law(p(&x, &one) == one, "x + 1 = 1");
        }
    }
}

fn random_energy(rng: &mut StdRng) -> EnergyFunction {
    match rng.gen_range(0..10) {
        0 => EnergyFunction::bottom(),
        1 => EnergyFunction::identity(),
        2..=5 => random_update(rng),
        _ => random_pwl(rng),
    }
}

fn law_suites() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(4);
    let r = &mut rng;
    laws(&Boolean, true, &mut out, "Bool", || random_bool(&mut *r));
    laws(&Tropical, true, &mut out, "Trop", || random_trop(&mut *r));
    laws(&Fuzzy, true, &mut out, "Fuzz", || random_fuzz(&mut *r));
    laws(&Energy, false, &mut out, "Energy", || random_energy(&mut *r));

    let mut model_rng = StdRng::seed_from_u64(40);
    let model = sparse_model(&mut model_rng, 3);
    let full = full_model(2);
    for (tag, m) in [("sparse", model), ("full", full)] {
        let pool: Vec<BoolValue> = vec![BoolValue(false), BoolValue(true)];
        laws(&Featured::new(m.clone(), Boolean), true, &mut out, &format!("GP(Bool) {tag}"), || {
            random_guarded(&mut *r, &m, &pool)
        });
        let pool: Vec<TropValue> = (0..4).map(|_| random_trop(&mut *r)).collect();
        laws(&Featured::new(m.clone(), Tropical), true, &mut out, &format!("GP(Trop) {tag}"), || {
            random_guarded(&mut *r, &m, &pool)
        });
        let pool: Vec<FuzzValue> = (0..4).map(|_| random_fuzz(&mut *r)).collect();
        laws(&Featured::new(m.clone(), Fuzzy), true, &mut out, &format!("GP(Fuzz) {tag}"), || {
            random_guarded(&mut *r, &m, &pool)
        });
        let pool: Vec<EnergyFunction> = (0..4).map(|_| random_energy(&mut *r)).collect();
        laws(&Featured::new(m.clone(), Energy), false, &mut out, &format!("GP(Energy) {tag}"), || {
            random_guarded(&mut *r, &m, &pool)
        });
    }
    out.detail = "12 algebras x 1000 instances".into();
    out
}

// ---- criterion 5 ---------------------------------------------------------

fn random_partition(rng: &mut StdRng, model: &FeatureModel) -> Vec<Guard> {
    let mut blocks = vec![Guard::tt(model)];
    for _ in 0..rng.gen_range(1..=6) {
        let i = rng.gen_range(0..blocks.len());
        let g = random_guard(rng, model);
        let (a, b) = (blocks[i].and(&g), blocks[i].and(&g.not()));
        if a.is_satisfiable() && b.is_satisfiable() {
            blocks[i] = a;
            blocks.push(b);
        }
    }
    blocks
}

fn canonicalization() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(5);
    let mut done = 0;
    while done < 1000 {
        let model = if rng.gen_bool(0.5) { full_model(3) } else { sparse_model(&mut rng, 4) };
        let blocks = random_partition(&mut rng, &model);
        if blocks.len() < 2 {
            continue;
        }
        let mut raw: Vec<(Guard, u8)> = blocks.into_iter().map(|g| (g, rng.gen_range(0..3))).collect();
        raw[1].1 = raw[0].1;
        let value_at = |p: usize| raw.iter().find(|(g, _)| g.holds(p)).map(|(_, v)| *v).unwrap();
        let c = canonicalize(raw.clone());
        out.check(c.is_well_formed(&model), || format!("map {done}: not injective or not a partition"));
        let preserved = (0..model.product_count()).all(|p| *c.semantics_at(p) == value_at(p));
        out.check(preserved, || format!("map {done}: semantics changed"));
        let again = canonicalize(c.blocks().to_vec());
        let same_blocks = again.len() == c.len()
            && again.blocks().iter().zip(c.blocks()).all(|((g, v), (h, w))| g.sat() == h.sat() && v == w);
        out.check(same_blocks, || format!("map {done}: not idempotent"));
        done += 1;
    }
    out.detail = "1000 non-injective maps".into();
    out
}

// ---- criterion 6 ---------------------------------------------------------

fn orbit_star(f: &EnergyFunction, x: &Rational) -> EnergyValue {
    let mut best = EnergyValue::Finite(x.clone());
    let mut prev = best.clone();
    let mut increments: Vec<Rational> = Vec::new();
    for _ in 0..64 {
        let next = f.apply(&prev);
        match (&prev, &next) {
            (_, EnergyValue::Infinite) => return EnergyValue::Infinite,
            (EnergyValue::Finite(a), EnergyValue::Finite(b)) => {
                if b > a {
                    increments.push(b - a);
                }
                if *b <= *a {
                    // the orbit no longer grows
                    return best;
                }
            }
            _ => return best,
        }
        best = best.max(next.clone());
        prev = next;
    }
    let growing = increments.windows(2).all(|w| w[1] >= w[0]);
    if growing {
        EnergyValue::Infinite
    } else {
        best
    }
}

fn orbit_omega(f: &EnergyFunction, x: &Rational) -> bool {
    let mut prev = EnergyValue::Finite(x.clone());
    for _ in 0..64 {
        let next = f.apply(&prev);
        match (&prev, &next) {
            (_, EnergyValue::Bottom) => return false,
            (_, EnergyValue::Infinite) => return true,
            (EnergyValue::Finite(a), EnergyValue::Finite(b)) if b >= a => return true,
            _ => {}
        }
        prev = next;
    }
    false
}

fn sample_points(f: &EnergyFunction, rng: &mut StdRng) -> Vec<Rational> {
    let mut points: Vec<Rational> = Vec::new();
    for piece in f.pieces() {
        points.push(piece.start.clone());
        points.push(&piece.start + ratio(1, 4));
        if piece.start > ratio(0, 1) {
            points.push(&piece.start - ratio(1, 8));
        }
    }
    while points.len() < 24 {
        points.push(ratio(rng.gen_range(0..=80), 4));
    }
    points.retain(|q| *q >= ratio(0, 1));
    points
}

fn energy_closed_forms() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(6);
    let mut samples = 0;
    for i in 0..500 {
        let f = random_pwl(&mut rng);
        let (star, omega) = (f.star(), f.omega());
        for x in sample_points(&f, &mut rng) {
            samples += 1;
            let expected = orbit_star(&f, &x);
            let got = star.eval_at(&x);
            out.check(got == expected, || format!("function {i} ({f}) star at {x}: {got} vs {expected}"));
            let expected = orbit_omega(&f, &x);
            let got = omega.holds_at(&x);
            out.check(got == expected, || format!("function {i} ({f}) omega at {x}: {got} vs {expected}"));
        }
    }
    for l in -3..=3 {
        for d in -3..=3 {
            let f = EnergyFunction::update(ratio(l, 1), ratio(d, 1));
            let lb = ratio(l.max(0).max(-d), 1);
            let expected = if d >= 0 { OmegaIndicator::from(lb.clone(), true) } else { OmegaIndicator::Never };
            out.check(f.omega() == expected, || format!("update({l},{d}) omega: {}", f.omega()));
            for k in 0..=24 {
                let x = ratio(k, 4);
                let expected = if x < lb || d <= 0 { EnergyValue::Finite(x.clone()) } else { EnergyValue::Infinite };
                out.check(f.star().eval_at(&x) == expected, || format!("update({l},{d}) star at {x}"));
            }
        }
    }
    out.detail = format!("500 functions, {samples} sample points, 49 update generators");
    out
}

// ---- criterion 7 ---------------------------------------------------------

fn random_matrix<T: Clone>(rng: &mut StdRng, n: usize, mut gen: impl FnMut(&mut StdRng) -> T) -> Matrix<T> {
    Matrix::from_rows((0..n).map(|_| (0..n).map(|_| gen(rng)).collect()).collect())
}

fn star_checks<A: KleeneAlgebra>(
    alg: &A,
    out: &mut Outcome,
    name: &str,
    rng: &mut StdRng,
    mut gen: impl FnMut(&mut StdRng) -> A::Elem,
) {
    for i in 0..200 {
        let n = rng.gen_range(1..=5);
        let m = random_matrix(rng, n, &mut gen);
        let s = mat_star(alg, &m);
        out.check(s == path_sum_oracle(alg, &m, n - 1), || format!("{name} matrix {i}: path sums"));
        let fix = mat_plus(alg, &Matrix::identity(alg, n), &mat_product(alg, &m, &s).unwrap());
        out.check(s == fix, || format!("{name} matrix {i}: fixpoint"));
    }
}

fn matrix_star() -> Outcome {
    let mut out = Outcome::new();
    let mut rng = StdRng::seed_from_u64(7);
    star_checks(&Boolean, &mut out, "Bool", &mut rng, random_bool);
    star_checks(&Tropical, &mut out, "Trop", &mut rng, random_trop);
    star_checks(&Fuzzy, &mut out, "Fuzz", &mut rng, random_fuzz);
    for i in 0..200 {
        let n = rng.gen_range(1..=3);
        let m = random_matrix(&mut rng, n, random_energy);
        let s = mat_star(&Energy, &m);
        let fix = mat_plus(&Energy, &Matrix::identity(&Energy, n), &mat_product(&Energy, &m, &s).unwrap());
        for (a, b) in s.entries().zip(fix.entries()) {
            for k in 0..24 {
                let x = ratio(k, 3);
                out.check(a.eval_at(&x) == b.eval_at(&x), || format!("Energy matrix {i}: fixpoint at {x}"));
            }
        }
    }
    out.detail = "600 bounded matrices, 200 energy matrices".into();
    out
}

// ---- criterion 8 ---------------------------------------------------------

fn speedup_report() -> Outcome {
    let mut out = Outcome::new();
    let run = Command::new(env!("CARGO_BIN_EXE_fwa"))
        .args(["bench", "--features", "10", "--states", "20", "--instances", "1"])
        .output()
        .expect("run fwa bench");
    let text = String::from_utf8_lossy(&run.stdout).into_owned();
    out.check(run.status.success(), || "fwa bench failed".into());
    let lines: Vec<&str> = text.lines().collect();
    let row: Vec<&str> = lines.get(1).map(|l| l.split(',').collect()).unwrap_or_default();
    let ok = lines.len() == 2 && row.len() == 10 && row[2] == "1024" && row[3] == "20" && row[9] == "true";
    out.check(ok, || format!("unexpected report: {text}"));
    if ok {
        out.detail = format!("family {} ms vs per-product {} ms (x{})", row[5], row[6], row[7]);
    }
    out
}

fn report(n: usize, title: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let in_time = limit.is_none_or(|l| elapsed <= l);
    let pass = outcome.failures.is_empty() && in_time;
    let limit_text = limit.map_or(String::new(), |l| format!(", limit {} s", l.as_secs()));
    println!(
        "criterion {n} {}: {title}: {} ({:.1} s{limit_text})",
        if pass { "PASS" } else { "FAIL" },
        outcome.detail,
        elapsed.as_secs_f64(),
    );
    for failure in outcome.failures.iter().filter(|f| !f.is_empty()) {
        println!("    {failure}");
    }
    if outcome.failures.len() > 5 {
        println!("    ... {} failures in total", outcome.failures.len());
    }
    pass
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let start = Instant::now();
    let trop = suite_one(1);
    let generated = start.elapsed();
    let results = [
        report(1, "featured reach value equals per-product oracle", Some(secs(60) - generated), || {
            family_soundness(&trop)
        }),
        report(2, "featured Büchi value equals per-product Büchi value", Some(secs(60)), energy_family_soundness),
        report(3, "symbolic Floyd–Warshall equals matrix route", Some(secs(30)), || floyd_warshall_equivalence(&trop)),
        report(4, "semiring laws, star fixpoint, boundedness", Some(secs(60)), law_suites),
        report(5, "canonicalization", None, canonicalization),
        report(6, "energy star and omega closed forms", None, energy_closed_forms),
        report(7, "matrix star against path sums", None, matrix_star),
        report(8, "family vs per-product benchmark report", None, speedup_report),
    ];
    if results.iter().all(|&ok| ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
