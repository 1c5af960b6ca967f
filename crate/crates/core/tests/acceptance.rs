//! Acceptance suite. Each test checks one criterion at its stated tolerance
//! and prints a single `PASS`/`FAIL` line (visible with `--nocapture`).

mod common;

use std::collections::HashSet;
use std::time::{Duration, Instant};

use common::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use scenery::distinguish::{distinguish, first_divergence, is_equivalent, is_translate, primitive_words, PeriodicScenery, Relation};
use scenery::record::{
    check_equivariance_two_sided, empirical_cylinders, exact_record_vector, record_vector_for_scenery, simulate_record,
    TwoSidedSteps,
};
use scenery::reconstruct::{build_matrix, solve_asymmetric, solve_symmetric, symmetrize, verify_structure};
use scenery::words::{canonical_order, Block, ColourAlphabet, ColourWord, Step, StepWord};
use scenery::{CylinderVector, Error, SceneryMeasure, StepMeasure};

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!("criterion {id} [{name}]: {} ({detail})", if ok { "PASS" } else { "FAIL" });
    assert!(ok, "criterion {id} [{name}] failed: {detail}");
}

fn rho_of(mu: &StepMeasure, lambda: &SceneryMeasure, word: &str) -> f64 {
    exact_record_vector(mu, lambda, word.len()).unwrap().get(&w(word)).unwrap()
}

#[test]
fn criterion_1_displayed_expansions() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for draw in 0..100 {
        let mu = random_plain_walk(&mut rng);
        let lambda =
            if draw % 2 == 0 { random_markov_scenery(&mut rng, 4) } else { random_periodic_mixture(&mut rng, 4) };
        let m = |s: &str| mu.prob(&u(s)).unwrap();
        let l = |s: &str| lambda.prob(&w(s)).unwrap();
        let expected = [
            ("001", m("RR") * l("001") + m("LL") * l("100")),
            ("000", (m("RL") + m("LR")) * l("00") + (m("RR") + m("LL")) * l("000")),
            ("0001", m("RLL") * l("100") + m("LRR") * l("001") + m("RRR") * l("0001") + m("LLL") * l("1000")),
        ];
        for (word, value) in expected {
            worst = worst.max((rho_of(&mu, &lambda, word) - value).abs());
            worst = worst.max((rho_oracle(&mu, &lambda, &w(word)) - value).abs());
        }
    }
    let elapsed = start.elapsed();
    report(
        1,
        "displayed expansions",
        worst <= 1e-12 && elapsed < Duration::from_secs(1),
        format!("max error {worst:.2e}, {elapsed:.2?}"),
    );
}

#[test]
fn criterion_2_ordering_fidelity() {
    let order = canonical_order(&ColourAlphabet::binary(), 2).unwrap();
    let got: Vec<String> = order.entries().iter().map(|w| w.to_string()).collect();
    let mut ok = got == ["0", "1", "00", "11", "01", "10"];
    for n in 1..=8 {
        ok &= canonical_order(&ColourAlphabet::binary(), n).unwrap().len() == (1 << (n + 1)) - 2;
    }
    report(2, "ordering fidelity", ok, format!("V_2 order {got:?}, lengths checked for n = 1..8"));
}

/// Blocks derived from palindrome status alone, for comparison with the order.
fn oracle_blocks(order: &[ColourWord]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let size = if order[i].is_palindrome() { 1 } else { 2 };
        if size == 2 {
            assert_eq!(order[i + 1], order[i].reverse());
        }
        out.push((i, i + size));
        i += size;
    }
    out
}

#[test]
fn criterion_3_structure() {
    let start = Instant::now();
    let alphabet = ColourAlphabet::binary();
    let cases = [
        ("iid(0.7,0.3,0)", StepMeasure::iid(0.7, 0.3, 0.0).unwrap()),
        ("markov(0.8,0.4)", StepMeasure::markov_two_state(0.8, 0.4).unwrap()),
        ("iid(0.6,0.2,0.2)", StepMeasure::iid(0.6, 0.2, 0.2).unwrap()),
    ];
    // Holding variants: a fifth of the mass of every move goes to holding.
    let holding_markov = StepMeasure::markov([[0.32, 0.2, 0.48], [0.4, 0.2, 0.4], [0.16, 0.2, 0.64]]).unwrap();
    let variants = [
        (StepMeasure::iid(0.7, 0.3, 0.0).unwrap(), StepMeasure::iid(0.56, 0.24, 0.2).unwrap()),
        (StepMeasure::markov_two_state(0.8, 0.4).unwrap(), holding_markov),
        (StepMeasure::iid(0.75, 0.25, 0.0).unwrap(), StepMeasure::iid(0.6, 0.2, 0.2).unwrap()),
    ];

    let mut failures = Vec::new();
    let mut checked = 0usize;
    for n in 1..=6 {
        let order = canonical_order(&alphabet, n).unwrap();
        let entries = order.entries();
        let blocks = oracle_blocks(entries);
        let block_end: Vec<usize> =
            blocks.iter().flat_map(|&(s, e)| std::iter::repeat_n(e, e - s)).collect();
        for (name, mu) in &cases {
            let a = build_matrix(mu, &alphabet, n).unwrap();
            let lib_blocks: Vec<(usize, usize)> = a.blocks().iter().map(|b: &Block| (b.start(), b.end() + 1)).collect();
            if lib_blocks != blocks {
                failures.push(format!("{name} n={n}: block layout"));
            }
            for (i, word) in entries.iter().enumerate() {
                let row = matrix_row_oracle(mu, word);
                for (j, v) in entries.iter().enumerate() {
                    let expected = row.get(v).copied().unwrap_or(0.0);
                    if (a.get(i, j) - expected).abs() > 1e-12 {
                        failures.push(format!("{name} n={n}: entry [{word}][{v}]"));
                    }
                    if j >= block_end[i] && expected != 0.0 {
                        failures.push(format!("{name} n={n}: nonzero above block at [{word}][{v}]"));
                    }
                    checked += 1;
                }
                let big_n = word.len() - 1;
                let r = mu.prob(&StepWord::repeat(Step::R, big_n)).unwrap();
                let l = mu.prob(&StepWord::repeat(Step::L, big_n)).unwrap();
                let diag = row.get(word).copied().unwrap_or(0.0);
                if word.is_palindrome() {
                    let want = if big_n == 0 { 1.0 } else { r + l };
                    if (diag - want).abs() > 1e-12 {
                        failures.push(format!("{name} n={n}: palindrome block at {word}"));
                    }
                } else {
                    let off = row.get(&word.reverse()).copied().unwrap_or(0.0);
                    if (diag - r).abs() > 1e-12 || (off - l).abs() > 1e-12 {
                        failures.push(format!("{name} n={n}: pair block at {word}"));
                    }
                }
            }
            let rep = verify_structure(&a, mu).unwrap();
            if !rep.is_ok() {
                failures.push(format!("{name} n={n}: verify_structure {:?}", rep.violations.first()));
            }
        }

        for (plain, hold) in &variants {
            let a0 = build_matrix(plain, &alphabet, n).unwrap();
            let a1 = build_matrix(hold, &alphabet, n).unwrap();
            let (mut below0, mut below1) = (0, 0);
            for i in 0..entries.len() {
                let bs = blocks.iter().find(|&&(s, e)| s <= i && i < e).unwrap().0;
                for j in 0..entries.len() {
                    let changed = (a0.get(i, j) == 0.0) != (a1.get(i, j) == 0.0);
                    if j >= bs && changed {
                        failures.push(format!("holding n={n}: pattern change at or above block [{i}][{j}]"));
                    }
                    if j < bs {
                        below0 += usize::from(a0.get(i, j) != 0.0);
                        below1 += usize::from(a1.get(i, j) != 0.0);
                    }
                }
            }
            if n >= 3 && below1 <= below0 {
                failures.push(format!("holding n={n}: no new entries below the blocks"));
            }
            if !verify_structure(&a1, hold).unwrap().is_ok() {
                failures.push(format!("holding n={n}: verify_structure"));
            }
        }
    }
    let elapsed = start.elapsed();
    report(
        3,
        "structure",
        failures.is_empty() && elapsed < Duration::from_secs(30),
        format!("{checked} entries checked, {} failures {:?}, {elapsed:.2?}", failures.len(), failures.first()),
    );
}

#[test]
fn criterion_4_asymmetric_round_trip() {
    let alphabet = ColourAlphabet::binary();
    let n = 6;
    let walks = [
        StepMeasure::iid(0.7, 0.3, 0.0).unwrap(),
        StepMeasure::markov_two_state(0.8, 0.4).unwrap(),
        StepMeasure::iid(0.6, 0.2, 0.2).unwrap(),
    ];
    let sceneries = [
        SceneryMeasure::periodic_binary("001011").unwrap(),
        SceneryMeasure::periodic_binary("0001").unwrap(),
        SceneryMeasure::iid(&alphabet, vec![0.5, 0.5]).unwrap(),
    ];
    let mut worst = 0.0f64;
    for mu in &walks {
        assert!(mu.is_strongly_asymmetric(n - 1, 1e-12).unwrap());
        let a = build_matrix(mu, &alphabet, n).unwrap();
        for lambda in &sceneries {
            let rho = exact_record_vector(mu, lambda, n).unwrap();
            let got = solve_asymmetric(&a, &rho, 1e-12).unwrap();
            worst = worst.max(max_abs_diff(&got.values, &scenery_vector(lambda, n)));
        }
    }
    let fair = StepMeasure::iid(0.5, 0.5, 0.0).unwrap();
    let a = build_matrix(&fair, &alphabet, n).unwrap();
    let rho = exact_record_vector(&fair, &sceneries[0], n).unwrap();
    let singular = solve_asymmetric(&a, &rho, 1e-12);
    let witness_ok = matches!(&singular, Err(Error::SingularSystem { n: 1, .. }));
    report(
        4,
        "asymmetric round trip",
        worst <= 1e-8 && witness_ok,
        format!("max error {worst:.2e}, fair walk gives {:?}", singular.err()),
    );
}

#[test]
fn criterion_5_symmetric_round_trip() {
    let alphabet = ColourAlphabet::binary();
    let n = 6;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let sceneries = [
        SceneryMeasure::periodic_binary("001011").unwrap(),
        SceneryMeasure::periodic_binary("0001").unwrap(),
        SceneryMeasure::iid(&alphabet, vec![0.5, 0.5]).unwrap(),
        random_markov_scenery(&mut rng, n),
        random_periodic_mixture(&mut rng, n),
    ];
    let mut worst = 0.0f64;
    let mut collapse = 0.0f64;
    for mu in [StepMeasure::iid(0.5, 0.5, 0.0).unwrap(), StepMeasure::iid(0.4, 0.4, 0.2).unwrap()] {
        for lambda in &sceneries {
            let rho = exact_record_vector(&mu, lambda, n).unwrap();
            let got = solve_symmetric(&mu, &rho, 1e-12).unwrap();
            let order = canonical_order(&alphabet, n).unwrap();
            let truth = CylinderVector::new(order, scenery_vector(lambda, n)).unwrap();
            worst = worst.max(max_abs_diff(got.values(), symmetrize(&truth).values()));
        }
        let x = exact_record_vector(&mu, &SceneryMeasure::periodic_binary("001011").unwrap(), n).unwrap();
        let y = exact_record_vector(&mu, &SceneryMeasure::periodic_binary("110100").unwrap(), n).unwrap();
        collapse = collapse.max(x.max_abs_diff(&y).unwrap());
        let reversed = SceneryMeasure::tabulate(&alphabet, n, |v| sceneries[3].prob(&v.reverse()).unwrap());
        let a = exact_record_vector(&mu, &sceneries[3], n).unwrap();
        let b = exact_record_vector(&mu, &reversed, n).unwrap();
        collapse = collapse.max(a.max_abs_diff(&b).unwrap());
    }
    report(
        5,
        "symmetric round trip",
        worst <= 1e-10 && collapse <= 1e-12,
        format!("max error {worst:.2e}, reversal collapse {collapse:.2e}"),
    );
}

#[test]
fn criterion_6_distinguishability_sweep() {
    let start = Instant::now();
    let words = primitive_words(&ColourAlphabet::binary(), 5);
    let sceneries: Vec<PeriodicScenery> = words.iter().map(|w| PeriodicScenery::binary(&w.to_string()).unwrap()).collect();
    let asym = StepMeasure::iid(0.7, 0.3, 0.0).unwrap();
    let sym = StepMeasure::iid(0.5, 0.5, 0.0).unwrap();
    let mut pairs = 0usize;
    let mut failures = Vec::new();
    let mut deepest = [0usize; 2];
    let mut zero_pairs = [0usize; 2];
    for i in 0..sceneries.len() {
        for j in i + 1..sceneries.len() {
            pairs += 1;
            let (x, y) = (&sceneries[i], &sceneries[j]);
            for (slot, mu, equivalent) in
                [(0, &asym, is_translate(x, y).is_some()), (1, &sym, is_equivalent(x, y).is_some())]
            {
                if equivalent {
                    zero_pairs[slot] += 1;
                    if let Some(d) = first_divergence(x, y, mu, 10, 1e-12).unwrap() {
                        failures.push(format!("{} vs {}: equivalent but diverge at {}", x.word(), y.word(), d.word));
                    }
                } else {
                    match distinguish(x, y, mu, 10, 1e-12) {
                        Ok(v) if v.relation == Relation::Distinguishable && v.depth.unwrap() <= 10 => {
                            deepest[slot] = deepest[slot].max(v.depth.unwrap());
                        }
                        other => failures.push(format!("{} vs {}: {other:?}", x.word(), y.word())),
                    }
                }
            }
        }
    }
    // Distinct primitive words of equal length can still be rotations of one another.
    let pal = PeriodicScenery::binary("001011").unwrap();
    let rev = PeriodicScenery::binary("110100").unwrap();
    if first_divergence(&pal, &rev, &sym, 10, 1e-12).unwrap().is_some() {
        failures.push("001011 vs 110100 diverge under the symmetric walk".into());
    }
    let elapsed = start.elapsed();
    report(
        6,
        "distinguishability sweep",
        failures.is_empty() && elapsed < Duration::from_secs(120),
        format!(
            "{pairs} pairs, equivalent pairs {zero_pairs:?}, deepest certificate {deepest:?}, {} failures {:?}, {elapsed:.2?}",
            failures.len(),
            failures.first()
        ),
    );
}

/// The record along `ω` seen from site 0, read directly from the positions.
fn record_by_positions(omega: &TwoSidedSteps, x: &ColourWord, offset: i64, n: i64) -> u8 {
    let pos: i64 = if n >= 0 {
        omega.future[..n as usize].iter().map(|s| s.value()).sum()
    } else {
        -omega.past[..(-n) as usize].iter().map(|s| s.value()).sum::<i64>()
    };
    x.symbols()[(pos + offset).rem_euclid(x.len() as i64) as usize]
}

#[test]
fn criterion_7_equivariance() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let step = |rng: &mut ChaCha8Rng| Step::ALL[rng.random_range(0..3)];
    let mut mismatches = 0;
    for _ in 0..1000 {
        let horizon = rng.random_range(1..=8);
        let past: Vec<Step> = (0..rng.random_range(0..5)).map(|_| step(&mut rng)).collect();
        let future: Vec<Step> = (0..horizon + 1 + rng.random_range(0..3)).map(|_| step(&mut rng)).collect();
        let x = ColourWord((0..rng.random_range(1..=6)).map(|_| rng.random_range(0..2u8)).collect());
        let omega = TwoSidedSteps { past, future };
        let lib = check_equivariance_two_sided(&omega, &x, horizon).unwrap();
        // Independent path: r_{n+1}(ω, x) against r_n(σω, T^{ω_0} x) from walk positions.
        let shifted = omega.shifted();
        let jump = omega.future[0].value();
        let oracle = (-(omega.past.len() as i64) - 1..horizon as i64)
            .all(|n| record_by_positions(&omega, &x, 0, n + 1) == record_by_positions(&shifted, &x, jump, n));
        if !(lib && oracle) {
            mismatches += 1;
        }
    }
    report(7, "equivariance", mismatches == 0, format!("1000 instances, {mismatches} mismatches"));
}

#[test]
fn criterion_8_mixture_identity() {
    let alphabet = ColourAlphabet::binary();
    let walks = [
        StepMeasure::iid(0.7, 0.3, 0.0).unwrap(),
        StepMeasure::iid(0.4, 0.4, 0.2).unwrap(),
        StepMeasure::markov_two_state(0.8, 0.4).unwrap(),
    ];
    let n = 6;
    let mut worst = 0.0f64;
    let mut words = 0;
    for q in 1..=6 {
        for p in alphabet.words_of_length(q) {
            words += 1;
            let lambda = SceneryMeasure::periodic(&alphabet, p.clone()).unwrap();
            for mu in &walks {
                let global = exact_record_vector(mu, &lambda, n).unwrap();
                let mut avg = vec![0.0; global.values.len()];
                for k in 0..q {
                    let rx = record_vector_for_scenery(mu, &alphabet, &p.rotate(k), n).unwrap();
                    for (a, b) in avg.iter_mut().zip(&rx.values) {
                        *a += b / q as f64;
                    }
                }
                worst = worst.max(max_abs_diff(&global.values, &avg));
            }
        }
    }
    report(8, "mixture identity", worst <= 1e-12, format!("{words} period words, max error {worst:.2e}"));
}

#[test]
fn criterion_9_monte_carlo() {
    let start = Instant::now();
    let alphabet = ColourAlphabet::binary();
    let mu = StepMeasure::iid(0.7, 0.3, 0.0).unwrap();
    let x = w("001011");
    let lambda = SceneryMeasure::periodic(&alphabet, x.clone()).unwrap();
    let n = 4;
    let t = 1_000_000;
    // One long record is an ergodic average, so its target is the record
    // measure of the orbit of x.
    let exact = exact_record_vector(&mu, &lambda, n).unwrap();
    let a = build_matrix(&mu, &alphabet, n).unwrap();
    let truth = scenery_vector(&lambda, 3);
    let mut close = 0;
    let mut recovered = 0;
    let mut worst_dev = 0.0f64;
    let mut worst_lambda = 0.0f64;
    for seed in 0..20 {
        let rec = simulate_record(&mu, &alphabet, &x, t, seed).unwrap();
        let est = empirical_cylinders(&rec, n).unwrap();
        let dev = est.max_abs_diff(&exact).unwrap();
        worst_dev = worst_dev.max(dev);
        close += usize::from(dev <= 5e-3);
        let lam = solve_asymmetric(&a, &est, 1e-12).unwrap().truncate(3).unwrap();
        let err = max_abs_diff(&lam.values, &truth);
        worst_lambda = worst_lambda.max(err);
        recovered += usize::from(err <= 2e-2);
    }
    let elapsed = start.elapsed();
    report(
        9,
        "monte carlo",
        close >= 19 && recovered == 20 && elapsed < Duration::from_secs(120),
        format!(
            "{close}/20 seeds within 5e-3 (worst {worst_dev:.2e}), {recovered}/20 recover depth-3 cylinders within 2e-2 (worst {worst_lambda:.2e}), {elapsed:.2?}"
        ),
    );
}

#[test]
fn translate_classes_partition_primitive_words() {
    // Sanity for criterion 6: distinct primitive words that are rotations of
    // one another exist, so the translate branch is exercised.
    let words = primitive_words(&ColourAlphabet::binary(), 5);
    let classes: HashSet<String> = words
        .iter()
        .map(|w| (0..w.len()).map(|k| w.rotate(k).to_string()).min().unwrap())
        .collect();
    assert!(classes.len() < words.len());
}
