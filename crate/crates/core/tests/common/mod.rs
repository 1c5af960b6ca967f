//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the enumeration or solver code paths it is used to check.
#![allow(dead_code)]

use std::collections::HashMap;

use rand::Rng;
use scenery::measures::{SceneryMeasure, StepMeasure};
use scenery::words::{ColourAlphabet, ColourWord, Step, StepWord};

pub fn w(s: &str) -> ColourWord {
    s.parse().unwrap()
}

pub fn u(s: &str) -> StepWord {
    s.parse().unwrap()
}

/// Walks `steps` from site 0 and records which colour `word` forces on each
/// site. Returns the forced colours left to right, or `None` on a clash.
pub fn forced_sites(steps: &[Step], word: &[u8]) -> Option<ColourWord> {
    let mut sites: HashMap<i64, u8> = HashMap::new();
    let mut here = 0i64;
    for (t, &colour) in word.iter().enumerate() {
        if t > 0 {
            here += match steps[t - 1] {
                Step::L => -1,
                Step::H => 0,
                Step::R => 1,
            };
        }
        if let Some(&prev) = sites.get(&here) {
            if prev != colour {
                return None;
            }
        }
        sites.insert(here, colour);
    }
    let lo = *sites.keys().min().unwrap();
    let hi = *sites.keys().max().unwrap();
    Some(ColourWord((lo..=hi).map(|s| sites[&s]).collect()))
}

/// All step words of length `n` over `{L, H, R}`, built recursively.
pub fn all_walks(n: usize) -> Vec<Vec<Step>> {
    if n == 0 {
        return vec![vec![]];
    }
    let shorter = all_walks(n - 1);
    let mut out = Vec::new();
    for s in [Step::L, Step::H, Step::R] {
        for w in &shorter {
            let mut v = vec![s];
            v.extend_from_slice(w);
            out.push(v);
        }
    }
    out
}

/// `ρ[w] = Σ_u μ[u] λ[v(u, w)]` by direct enumeration.
pub fn rho_oracle(mu: &StepMeasure, lambda: &SceneryMeasure, word: &ColourWord) -> f64 {
    all_walks(word.len() - 1)
        .into_iter()
        .filter_map(|steps| {
            let m = mu.prob(&StepWord(steps.clone())).unwrap();
            forced_sites(&steps, word.symbols()).map(|v| m * lambda.prob(&v).unwrap())
        })
        .sum()
}

/// `A[w][v]` as a sparse map by direct enumeration.
pub fn matrix_row_oracle(mu: &StepMeasure, word: &ColourWord) -> HashMap<ColourWord, f64> {
    let mut row = HashMap::new();
    for steps in all_walks(word.len() - 1) {
        let m = mu.prob(&StepWord(steps.clone())).unwrap();
        if m == 0.0 {
            continue;
        }
        if let Some(v) = forced_sites(&steps, word.symbols()) {
            *row.entry(v).or_insert(0.0) += m;
        }
    }
    row
}

/// Record word of the walk on the periodic scenery `x` started at site 0.
pub fn record_on(x: &ColourWord, steps: &[Step]) -> ColourWord {
    let q = x.len() as i64;
    let mut here = 0i64;
    let mut out = vec![x.symbols()[0]];
    for s in steps {
        here += s.value();
        out.push(x.symbols()[here.rem_euclid(q) as usize]);
    }
    ColourWord(out)
}

/// Random stationary two-state Markov scenery, tabulated to `depth`.
pub fn random_markov_scenery(rng: &mut impl Rng, depth: usize) -> SceneryMeasure {
    let a: f64 = rng.random_range(0.05..0.95);
    let b: f64 = rng.random_range(0.05..0.95);
    // P(0→0) = a, P(1→1) = b
    let pi0 = (1.0 - b) / (2.0 - a - b);
    let p = [[a, 1.0 - a], [1.0 - b, b]];
    SceneryMeasure::tabulate(&ColourAlphabet::binary(), depth, move |v| {
        let s = v.symbols();
        let first = if s[0] == 0 { pi0 } else { 1.0 - pi0 };
        s.windows(2).fold(first, |acc, t| acc * p[t[0] as usize][t[1] as usize])
    })
}

/// Random mixture of periodic orbit measures, tabulated to `depth`.
pub fn random_periodic_mixture(rng: &mut impl Rng, depth: usize) -> SceneryMeasure {
    let parts: Vec<(f64, SceneryMeasure)> = (0..3)
        .map(|_| {
            let len = rng.random_range(1..=6);
            let word: String = (0..len).map(|_| if rng.random_bool(0.5) { '1' } else { '0' }).collect();
            (rng.random_range(0.1..1.0), SceneryMeasure::periodic_binary(&word).unwrap())
        })
        .collect();
    let total: f64 = parts.iter().map(|p| p.0).sum();
    SceneryMeasure::tabulate(&ColourAlphabet::binary(), depth, move |v| {
        parts.iter().map(|(wt, m)| wt / total * m.prob(v).unwrap()).sum()
    })
}

/// Random no-holding step measure: i.i.d. or two-state Markov.
pub fn random_plain_walk(rng: &mut impl Rng) -> StepMeasure {
    if rng.random_bool(0.5) {
        let p: f64 = rng.random_range(0.0..=1.0);
        StepMeasure::iid(p, 1.0 - p, 0.0).unwrap()
    } else {
        StepMeasure::markov_two_state(rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)).unwrap()
    }
}

/// `V_n(λ)` read straight off the measure, in canonical order.
pub fn scenery_vector(lambda: &SceneryMeasure, n: usize) -> Vec<f64> {
    let order = scenery::words::canonical_order(lambda.alphabet(), n).unwrap();
    order.entries().iter().map(|v| lambda.prob(v).unwrap()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
