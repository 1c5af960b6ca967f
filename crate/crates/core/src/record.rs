//! The forward map from a walk and a scenery to the colour record.
//!
//! A walk word `u` of length `N` paired with a colour word `w` of length
//! `N + 1` forces colours on the visited sites `[min S, max S]` of the
//! partial sums `S`; reading those sites left to right gives the anchored
//! word `v` and `ρ[w] = Σ_u μ[u] λ[v]` by shift invariance of `λ`.
//!
//! Sums over walk words always run in canonical step-word order
//! (lexicographic with `L < H < R`), so results are bit-identical whether
//! or not the per-length layers are computed in parallel.

use std::io::{BufRead, Write};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::measures::{SceneryMeasure, StepMeasure};
use crate::words::{ColourAlphabet, ColourWord, Step, StepWord, WordOrder};

/// Default cap on exact enumeration depth (cost grows like `3^n`).
pub const DEFAULT_MAX_EXACT_DEPTH: usize = 12;

/// The sites visited by a walk word and the colours a record word forces
/// on them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathPattern {
    pub span_lo: i64,
    pub span_hi: i64,
    /// Colour forced at site `span_lo + i`.
    pub anchored_word: ColourWord,
}

impl PathPattern {
    pub fn span(&self) -> usize {
        (self.span_hi - self.span_lo + 1) as usize
    }
}

/// Pattern of `(u, w)`, or `None` when a revisited site is asked to carry
/// two different colours.
pub fn walk_pattern(u: &StepWord, w: &ColourWord) -> Result<Option<PathPattern>> {
    if w.len() != u.len() + 1 {
        return Err(Error::Contract(format!(
            "record word length {} must be walk length {} plus one",
            w.len(),
            u.len()
        )));
    }
    let pos = u.positions();
    let lo = *pos.iter().min().unwrap();
    let hi = *pos.iter().max().unwrap();
    let mut forced: Vec<Option<u8>> = vec![None; (hi - lo + 1) as usize];
    for (&p, &c) in pos.iter().zip(w.symbols()) {
        let slot = &mut forced[(p - lo) as usize];
        match *slot {
            Some(prev) if prev != c => return Ok(None),
            _ => *slot = Some(c),
        }
    }
    // every site in [lo, hi] is visited by a nearest-neighbour walk
    let anchored_word = ColourWord(forced.into_iter().map(|c| c.expect("interval visited")).collect());
    Ok(Some(PathPattern { span_lo: lo, span_hi: hi, anchored_word }))
}

/// Cylinder probabilities indexed by a [`WordOrder`].
#[derive(Debug, Clone, PartialEq)]
pub struct CylinderVector {
    pub order: WordOrder,
    pub values: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct CsvRow {
    word: String,
    length: usize,
    value: f64,
}

impl CylinderVector {
    pub fn new(order: WordOrder, values: Vec<f64>) -> Result<Self> {
        if values.len() != order.len() {
            return Err(Error::Contract(format!("{} values for an order of {} words", values.len(), order.len())));
        }
        Ok(Self { order, values })
    }

    pub fn zeros(order: WordOrder) -> Self {
        let values = vec![0.0; order.len()];
        Self { order, values }
    }

    /// Builds the vector from lexicographically indexed per-length layers.
    pub fn from_layers(order: WordOrder, layers: &[Vec<f64>]) -> Self {
        let mut values = vec![0.0; order.len()];
        for (k, layer) in layers.iter().enumerate() {
            let len = k + 1;
            for (rank, &x) in layer.iter().enumerate() {
                values[order.position_by_rank(len, rank)] = x;
            }
        }
        Self { order, values }
    }

    pub fn depth(&self) -> usize {
        self.order.depth()
    }

    pub fn get(&self, w: &ColourWord) -> Option<f64> {
        self.order.position(w).map(|i| self.values[i])
    }

    /// Values of the words of length `len`, in canonical order.
    pub fn length_slice(&self, len: usize) -> &[f64] {
        &self.values[self.order.length_range(len)]
    }

    /// The vector restricted to words of length at most `depth`.
    pub fn truncate(&self, depth: usize) -> Result<Self> {
        let order = WordOrder::new(self.order.alphabet(), depth.min(self.depth()))?;
        let values = self.values[..order.len()].to_vec();
        Ok(Self { order, values })
    }

    /// `max_w |self[w] - other[w]|`.
    pub fn max_abs_diff(&self, other: &CylinderVector) -> Result<f64> {
        if self.order != other.order {
            return Err(Error::Contract("cylinder vectors use different word orders".into()));
        }
        Ok(self.values.iter().zip(&other.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
    }

    /// Largest deviation of a per-length total from one.
    pub fn row_sum_error(&self) -> f64 {
        (1..=self.depth()).map(|k| (self.length_slice(k).iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max)
    }

    /// CSV with header `word,length,value`, one row per word in canonical order.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(out);
        let alphabet = self.order.alphabet();
        for (w, &value) in self.order.entries().iter().zip(&self.values) {
            wtr.serialize(CsvRow { word: alphabet.render(w), length: w.len(), value })?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads a vector written by [`CylinderVector::write_csv`]. Rows may come
    /// in any order but every word of length `1..=depth` must appear once.
    pub fn read_csv<R: std::io::Read>(input: R, alphabet: &ColourAlphabet) -> Result<Self> {
        let mut rdr = csv::Reader::from_reader(input);
        let rows: Vec<CsvRow> = rdr.deserialize().collect::<std::result::Result<_, _>>()?;
        let depth = rows.iter().map(|r| r.length).max().ok_or_else(|| Error::Parse("empty vector CSV".into()))?;
        let order = WordOrder::new(alphabet, depth)?;
        let mut values = vec![f64::NAN; order.len()];
        for row in rows {
            let w = alphabet.parse(&row.word)?;
            if w.len() != row.length {
                return Err(Error::Parse(format!("word {} has length {}, row says {}", row.word, w.len(), row.length)));
            }
            let i = order.position(&w).ok_or_else(|| Error::Parse(format!("unknown word {}", row.word)))?;
            if !values[i].is_nan() {
                return Err(Error::Parse(format!("duplicate word {}", row.word)));
            }
            values[i] = row.value;
        }
        if let Some(i) = values.iter().position(|x| x.is_nan()) {
            return Err(Error::Parse(format!("missing word {}", alphabet.render(order.word(i)))));
        }
        Ok(Self { order, values })
    }
}

/// `ρ[w]` for every word of length `k`, indexed by lexicographic rank.
pub fn record_layer(mu: &StepMeasure, lambda: &SceneryMeasure, k: usize) -> Result<Vec<f64>> {
    if k == 0 {
        return Err(Error::InvalidDepth(0));
    }
    let base = lambda.alphabet().size();
    let steps = k - 1;
    let mu_layer = mu.layer(steps)?;
    let mut lambda_layers: Vec<Option<Vec<f64>>> = vec![None; k + 1];
    let mut out = vec![0.0; base.pow(k as u32)];
    let mut powers = vec![1usize; k + 1];
    for i in 1..=k {
        powers[i] = powers[i - 1] * base;
    }
    for (ui, &m) in mu_layer.iter().enumerate() {
        if m == 0.0 {
            continue;
        }
        let pos = StepWord::from_index(ui, steps).positions();
        let lo = *pos.iter().min().unwrap();
        let hi = *pos.iter().max().unwrap();
        let span = (hi - lo + 1) as usize;
        if lambda_layers[span].is_none() {
            lambda_layers[span] = Some(lambda.layer(span)?);
        }
        let lam = lambda_layers[span].as_ref().unwrap();
        // digit of site s inside a rank-encoded word of length `span`
        let shifts: Vec<usize> = pos.iter().map(|&p| powers[span - 1 - (p - lo) as usize]).collect();
        for (vr, &l) in lam.iter().enumerate() {
            if l == 0.0 {
                continue;
            }
            let wr = shifts.iter().fold(0, |acc, &s| acc * base + (vr / s) % base);
            out[wr] += m * l;
        }
    }
    Ok(out)
}

/// Exact `V_n(ρ)` for the record measure of `μ` over scenery measure `λ`.
pub fn exact_record_vector(mu: &StepMeasure, lambda: &SceneryMeasure, n: usize) -> Result<CylinderVector> {
    exact_record_vector_with_cap(mu, lambda, n, DEFAULT_MAX_EXACT_DEPTH)
}

pub fn exact_record_vector_with_cap(
    mu: &StepMeasure,
    lambda: &SceneryMeasure,
    n: usize,
    cap: usize,
) -> Result<CylinderVector> {
    if n > cap {
        return Err(Error::DepthExceeded { requested: n, max: cap });
    }
    let order = WordOrder::new(lambda.alphabet(), n)?;
    let layers = (1..=n).into_par_iter().map(|k| record_layer(mu, lambda, k)).collect::<Result<Vec<_>>>()?;
    Ok(CylinderVector::from_layers(order, &layers))
}

/// Exact `V_n(ρ_x)` for the single scenery `x = ...ppp...` with `x_0 = p_0`.
pub fn record_vector_for_scenery(
    mu: &StepMeasure,
    alphabet: &ColourAlphabet,
    x: &ColourWord,
    n: usize,
) -> Result<CylinderVector> {
    if x.is_empty() {
        return Err(Error::Contract("scenery word must be nonempty".into()));
    }
    if !alphabet.contains(x) {
        return Err(Error::Contract(format!("scenery word {x} not over alphabet {alphabet}")));
    }
    if n > DEFAULT_MAX_EXACT_DEPTH {
        return Err(Error::DepthExceeded { requested: n, max: DEFAULT_MAX_EXACT_DEPTH });
    }
    let order = WordOrder::new(alphabet, n)?;
    let base = alphabet.size();
    let q = x.len() as i64;
    let layers = (1..=n)
        .into_par_iter()
        .map(|k| {
            let mut out = vec![0.0; base.pow(k as u32)];
            for (ui, &m) in mu.layer(k - 1)?.iter().enumerate() {
                if m == 0.0 {
                    continue;
                }
                let pos = StepWord::from_index(ui, k - 1).positions();
                let wr = pos.iter().fold(0, |acc, &p| acc * base + x.symbols()[p.rem_euclid(q) as usize] as usize);
                out[wr] += m;
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CylinderVector::from_layers(order, &layers))
}

/// A finite forward colour record `r_0 r_1 ... r_{T-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordSequence {
    pub alphabet: ColourAlphabet,
    pub colours: ColourWord,
    pub seed: Option<u64>,
}

impl RecordSequence {
    pub fn len(&self) -> usize {
        self.colours.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colours.is_empty()
    }

    /// One line of colour characters.
    pub fn to_text(&self) -> String {
        let mut s = self.alphabet.render(&self.colours);
        s.push('\n');
        s
    }

    pub fn from_text(text: &str, alphabet: &ColourAlphabet) -> Result<Self> {
        let colours = alphabet.parse(text.trim())?;
        if colours.is_empty() {
            return Err(Error::Parse("empty record".into()));
        }
        Ok(Self { alphabet: alphabet.clone(), colours, seed: None })
    }

    pub fn read<R: BufRead>(input: R, alphabet: &ColourAlphabet) -> Result<Self> {
        let mut text = String::new();
        for line in input.lines() {
            text.push_str(line?.trim());
        }
        Self::from_text(&text, alphabet)
    }
}

/// Draws step sequences from an i.i.d. or Markov step measure.
struct StepSampler<'a> {
    mu: &'a StepMeasure,
    last: Option<usize>,
}

fn draw(rng: &mut ChaCha8Rng, p: &[f64; 3]) -> usize {
    let r: f64 = rng.random();
    let mut acc = 0.0;
    for (i, &pi) in p.iter().enumerate() {
        acc += pi;
        if r < acc {
            return i;
        }
    }
    // rounding at the top of the cumulative sum
    (0..3).rev().find(|&i| p[i] > 0.0).unwrap_or(2)
}

impl<'a> StepSampler<'a> {
    fn new(mu: &'a StepMeasure) -> Result<Self> {
        if !mu.is_sampleable() {
            return Err(Error::NotSampleable);
        }
        Ok(Self { mu, last: None })
    }

    fn next(&mut self, rng: &mut ChaCha8Rng) -> Step {
        let i = match self.mu {
            StepMeasure::Iid { p } => draw(rng, p),
            StepMeasure::Markov { initial, transition } => match self.last {
                None => draw(rng, initial),
                Some(a) => draw(rng, &transition[a]),
            },
            StepMeasure::Table { .. } => unreachable!("checked in new"),
        };
        self.last = Some(i);
        Step::ALL[i]
    }
}

fn simulate_with(
    mu: &StepMeasure,
    alphabet: &ColourAlphabet,
    x: &ColourWord,
    t: usize,
    rng: &mut ChaCha8Rng,
) -> Result<ColourWord> {
    let mut sampler = StepSampler::new(mu)?;
    let q = x.len() as i64;
    let mut colours = Vec::with_capacity(t);
    let mut pos = 0i64;
    colours.push(x.symbols()[0]);
    for _ in 1..t {
        pos += sampler.next(rng).value();
        colours.push(x.symbols()[pos.rem_euclid(q) as usize]);
    }
    debug_assert!(alphabet.contains(&ColourWord(colours.clone())));
    Ok(ColourWord(colours))
}

fn check_scenery(alphabet: &ColourAlphabet, x: &ColourWord, t: usize) -> Result<()> {
    if x.is_empty() || !alphabet.contains(x) {
        return Err(Error::Contract(format!("scenery word {x} must be nonempty and over {alphabet}")));
    }
    if t < 1 {
        return Err(Error::Contract("record length must be at least 1".into()));
    }
    Ok(())
}

/// Simulates `r_0 ... r_{T-1}` on the periodic scenery `x` starting at site 0.
pub fn simulate_record(
    mu: &StepMeasure,
    alphabet: &ColourAlphabet,
    x: &ColourWord,
    t: usize,
    seed: u64,
) -> Result<RecordSequence> {
    check_scenery(alphabet, x, t)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let colours = simulate_with(mu, alphabet, x, t, &mut rng)?;
    Ok(RecordSequence { alphabet: alphabet.clone(), colours, seed: Some(seed) })
}

/// `count` independent records of length `t`, record `i` drawn from stream
/// `i` of the generator seeded with `seed`.
pub fn simulate_records(
    mu: &StepMeasure,
    alphabet: &ColourAlphabet,
    x: &ColourWord,
    t: usize,
    count: usize,
    seed: u64,
) -> Result<Vec<RecordSequence>> {
    check_scenery(alphabet, x, t)?;
    (0..count)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            let colours = simulate_with(mu, alphabet, x, t, &mut rng)?;
            Ok(RecordSequence { alphabet: alphabet.clone(), colours, seed: Some(seed) })
        })
        .collect()
}

/// Sliding-window frequencies: `value[w] = #occurrences / (T - |w| + 1)`.
///
/// Along one long record this is an ergodic average, so it estimates the
/// stationary record measure `ρ` of the scenery's orbit measure.
pub fn empirical_cylinders(rec: &RecordSequence, n: usize) -> Result<CylinderVector> {
    let t = rec.len();
    if t < n {
        return Err(Error::InsufficientData { have: t, need: n });
    }
    let order = WordOrder::new(&rec.alphabet, n)?;
    let base = rec.alphabet.size();
    let symbols = rec.colours.symbols();
    let layers: Vec<Vec<f64>> = (1..=n)
        .map(|k| {
            let modulus = base.pow(k as u32);
            let mut counts = vec![0u64; modulus];
            let mut rank = 0usize;
            for (i, &c) in symbols.iter().enumerate() {
                rank = (rank * base + c as usize) % modulus;
                if i + 1 >= k {
                    counts[rank] += 1;
                }
            }
            let windows = (t - k + 1) as f64;
            counts.into_iter().map(|c| c as f64 / windows).collect()
        })
        .collect();
    Ok(CylinderVector::from_layers(order, &layers))
}

/// Prefix frequencies over many independent records: `value[w]` is the
/// fraction of records starting with `w`. Estimates `ρ_x` for the fixed
/// starting scenery.
pub fn empirical_prefix_cylinders(records: &[RecordSequence], n: usize) -> Result<CylinderVector> {
    let first = records.first().ok_or(Error::InsufficientData { have: 0, need: n })?;
    if let Some(short) = records.iter().find(|r| r.len() < n) {
        return Err(Error::InsufficientData { have: short.len(), need: n });
    }
    let order = WordOrder::new(&first.alphabet, n)?;
    let base = first.alphabet.size();
    let mut layers: Vec<Vec<f64>> = (1..=n).map(|k| vec![0.0; base.pow(k as u32)]).collect();
    let weight = 1.0 / records.len() as f64;
    for rec in records {
        let mut rank = 0;
        for (k, &c) in rec.colours.symbols()[..n].iter().enumerate() {
            rank = rank * base + c as usize;
            layers[k][rank] += weight;
        }
    }
    Ok(CylinderVector::from_layers(order, &layers))
}

/// A two-sided step sequence: `past[j]` is `ω_{-(j+1)}`, `future[i]` is `ω_i`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSidedSteps {
    pub past: Vec<Step>,
    pub future: Vec<Step>,
}

impl TwoSidedSteps {
    /// The left shift `σ`: `(σω)_i = ω_{i+1}`.
    pub fn shifted(&self) -> Self {
        let mut past = Vec::with_capacity(self.past.len() + 1);
        past.push(self.future[0]);
        past.extend_from_slice(&self.past);
        Self { past, future: self.future[1..].to_vec() }
    }
}

/// A periodic scenery viewed through a shift: `site(j) = x_{j + offset}`.
#[derive(Debug, Clone, Copy)]
struct ShiftedScenery<'a> {
    word: &'a ColourWord,
    offset: i64,
}

impl ShiftedScenery<'_> {
    fn site(&self, j: i64) -> u8 {
        self.word.symbols()[(j + self.offset).rem_euclid(self.word.len() as i64) as usize]
    }

    fn shift(self, k: i64) -> Self {
        Self { offset: self.offset + k, ..self }
    }
}

/// `r_n(ω, x)` straight from the forward, zero and backward formulas.
fn record_symbol(omega: &TwoSidedSteps, x: ShiftedScenery<'_>, n: i64) -> u8 {
    match n {
        0 => x.site(0),
        n if n > 0 => x.shift(omega.future[..n as usize].iter().map(|s| s.value()).sum()).site(0),
        n => x.shift(-omega.past[..(-n) as usize].iter().map(|s| s.value()).sum::<i64>()).site(0),
    }
}

/// Checks `r_{n+1}(ω, x) = r_n(σω, T^{ω_0} x)` for `n = -1 ..= horizon - 1`.
pub fn check_equivariance(omega: &StepWord, x: &ColourWord, horizon: usize) -> Result<bool> {
    let steps = TwoSidedSteps { past: Vec::new(), future: omega.steps().to_vec() };
    check_equivariance_two_sided(&steps, x, horizon)
}

/// Two-sided version: checks `n = -|past| - 1 ..= horizon - 1`, which
/// exercises the backward record formula.
pub fn check_equivariance_two_sided(omega: &TwoSidedSteps, x: &ColourWord, horizon: usize) -> Result<bool> {
    if omega.future.len() < horizon + 1 {
        return Err(Error::Contract(format!(
            "need at least {} forward steps for horizon {horizon}, got {}",
            horizon + 1,
            omega.future.len()
        )));
    }
    if x.is_empty() {
        return Err(Error::Contract("scenery word must be nonempty".into()));
    }
    let scenery = ShiftedScenery { word: x, offset: 0 };
    let shifted_steps = omega.shifted();
    let shifted_scenery = scenery.shift(omega.future[0].value());
    let lo = -(omega.past.len() as i64) - 1;
    Ok((lo..horizon as i64)
        .all(|n| record_symbol(omega, scenery, n + 1) == record_symbol(&shifted_steps, shifted_scenery, n)))
}
