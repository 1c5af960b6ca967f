//! Deciding whether two periodic sceneries can be told apart by their
//! colour records.
//!
//! Two routes are cross-checked. The combinatorial route tests whether one
//! period word is a rotation (translate) of the other, or of its reversal
//! (reflection). The measure route compares the exact record measures of the
//! two orbit measures cylinder by cylinder, in canonical order, and reports
//! the shallowest word where they differ.
//!
//! Strongly asymmetric walks separate every pair that is not a translate;
//! symmetric straightforward walks separate every pair that is not
//! equivalent under translation and reflection. Both statements assume the
//! global record measures are ergodic, which is not checked here.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{SceneryMeasure, StepMeasure, DEFAULT_EPS};
use crate::record::record_layer;
use crate::words::{ColourAlphabet, ColourWord, WordOrder};

/// Default tolerance for comparing exact record probabilities.
pub const DEFAULT_TOL: f64 = 1e-10;

pub const ERGODICITY_ASSUMPTION: &str = "ergodic global record measure";

/// A periodic scenery given by its primitive period word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PeriodicScenery {
    alphabet: ColourAlphabet,
    word: ColourWord,
}

impl PeriodicScenery {
    /// Reduces `word` to its primitive root, so `"0101"` becomes `"01"`.
    pub fn new(alphabet: &ColourAlphabet, word: ColourWord) -> Result<Self> {
        if word.is_empty() || !alphabet.contains(&word) {
            return Err(Error::Contract(format!("period word {word} must be nonempty and over {alphabet}")));
        }
        Ok(Self { alphabet: alphabet.clone(), word: word.primitive_root() })
    }

    pub fn binary(word: &str) -> Result<Self> {
        let alphabet = ColourAlphabet::binary();
        let w = alphabet.parse(word)?;
        Self::new(&alphabet, w)
    }

    pub fn word(&self) -> &ColourWord {
        &self.word
    }

    pub fn alphabet(&self) -> &ColourAlphabet {
        &self.alphabet
    }

    pub fn period(&self) -> usize {
        self.word.len()
    }

    /// Period word of the reflection `x_{-k}`, up to translation.
    pub fn reflected(&self) -> Self {
        Self { alphabet: self.alphabet.clone(), word: self.word.reverse() }
    }
}

/// The uniform measure on the `Per(x)` shifts of `x`.
pub fn orbit_measure(x: &PeriodicScenery) -> SceneryMeasure {
    SceneryMeasure::periodic(&x.alphabet, x.word.clone()).expect("validated at construction")
}

/// `k` with `T^k x = y`, if any.
pub fn is_translate(x: &PeriodicScenery, y: &PeriodicScenery) -> Option<usize> {
    if x.alphabet != y.alphabet || x.period() != y.period() {
        return None;
    }
    (0..x.period()).find(|&k| x.word.rotate(k) == y.word)
}

/// `(k, reflected)` such that `y` is `T^k x`, or `T^k` of the reflection of
/// `x` when `reflected` is set.
pub fn is_equivalent(x: &PeriodicScenery, y: &PeriodicScenery) -> Option<(usize, bool)> {
    if let Some(k) = is_translate(x, y) {
        return Some((k, false));
    }
    is_translate(&x.reflected(), y).map(|k| (k, true))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Relation {
    Translate,
    ReflectionEquivalent,
    Distinguishable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    /// Strongly asymmetric walk: sceneries are recovered up to translation.
    Asymmetric,
    /// Symmetric straightforward walk: up to translation and reflection.
    Symmetric,
}

/// The outcome of [`distinguish`], with either the shift realizing an
/// equivalence or the shallowest divergent record word.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Verdict {
    pub relation: Relation,
    pub shift: Option<usize>,
    pub reflected: Option<bool>,
    pub certificate_word: Option<String>,
    pub depth: Option<usize>,
    pub divergence: Option<f64>,
    /// `ρ[w]` under the orbit measures of `x` and `y` at the certificate word.
    pub value_x: Option<f64>,
    pub value_y: Option<f64>,
    pub regime: Regime,
    pub assumptions: Vec<String>,
}

/// First word (in canonical order) where the two record measures differ.
#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    pub word: ColourWord,
    pub value_x: f64,
    pub value_y: f64,
}

impl Divergence {
    pub fn magnitude(&self) -> f64 {
        (self.value_x - self.value_y).abs()
    }
}

/// Scans depths `1..=n_max` and returns the shallowest canonical-order word
/// with `|ρ_x[w] − ρ_y[w]| > tol`, where `ρ_x` and `ρ_y` are the exact
/// record measures of the two orbit measures.
pub fn first_divergence(
    x: &PeriodicScenery,
    y: &PeriodicScenery,
    mu: &StepMeasure,
    n_max: usize,
    tol: f64,
) -> Result<Option<Divergence>> {
    if x.alphabet != y.alphabet {
        return Err(Error::Contract("sceneries use different alphabets".into()));
    }
    let order = WordOrder::new(&x.alphabet, n_max)?;
    let (lx, ly) = (orbit_measure(x), orbit_measure(y));
    let base = x.alphabet.size();
    for k in 1..=n_max {
        let rx = record_layer(mu, &lx, k)?;
        let ry = record_layer(mu, &ly, k)?;
        for i in order.length_range(k) {
            let r = order.word(i).rank(base);
            if (rx[r] - ry[r]).abs() > tol {
                return Ok(Some(Divergence { word: order.word(i).clone(), value_x: rx[r], value_y: ry[r] }));
            }
        }
    }
    Ok(None)
}

/// Reconstruction regime of `μ` at the depths a depth-`n_max` comparison uses.
pub fn regime(mu: &StepMeasure, n_max: usize) -> Result<Regime> {
    let depth = n_max.saturating_sub(1).max(1);
    if mu.is_strongly_asymmetric(depth, DEFAULT_EPS)? {
        Ok(Regime::Asymmetric)
    } else if mu.is_symmetric(depth, DEFAULT_EPS)? && mu.is_straightforward(depth, DEFAULT_EPS)? {
        Ok(Regime::Symmetric)
    } else {
        Err(Error::UnsupportedRegime { depth })
    }
}

/// `Per(x) + Per(y)`.
pub fn default_depth(x: &PeriodicScenery, y: &PeriodicScenery) -> usize {
    x.period() + y.period()
}

/// Classifies `(x, y)` as translates, reflection-equivalent or
/// distinguishable under `μ`.
///
/// Equivalent pairs are cross-checked for zero divergence up to `n_max`.
/// A non-equivalent pair without divergence up to `n_max` yields
/// [`Error::InconclusiveDepth`], never an equivalence claim.
pub fn distinguish(
    x: &PeriodicScenery,
    y: &PeriodicScenery,
    mu: &StepMeasure,
    n_max: usize,
    tol: f64,
) -> Result<Verdict> {
    if n_max < 1 {
        return Err(Error::InvalidDepth(n_max));
    }
    let regime = regime(mu, n_max)?;
    let equivalence = match regime {
        Regime::Asymmetric => is_translate(x, y).map(|k| (k, false)),
        Regime::Symmetric => is_equivalent(x, y),
    };
    let divergence = first_divergence(x, y, mu, n_max, tol)?;
    let assumptions = vec![ERGODICITY_ASSUMPTION.to_string()];
    let render = |w: &ColourWord| x.alphabet.render(w);

    match (equivalence, divergence) {
        (Some((k, reflected)), None) => Ok(Verdict {
            relation: if reflected { Relation::ReflectionEquivalent } else { Relation::Translate },
            shift: Some(k),
            reflected: Some(reflected),
            certificate_word: None,
            depth: None,
            divergence: None,
            value_x: None,
            value_y: None,
            regime,
            assumptions,
        }),
        (Some((k, reflected)), Some(d)) => Err(Error::Contract(format!(
            "equivalent sceneries (shift {k}, reflected {reflected}) diverge at {} by {:e}",
            render(&d.word),
            d.magnitude()
        ))),
        (None, Some(d)) => Ok(Verdict {
            relation: Relation::Distinguishable,
            shift: None,
            reflected: None,
            certificate_word: Some(render(&d.word)),
            depth: Some(d.word.len()),
            divergence: Some(d.magnitude()),
            value_x: Some(d.value_x),
            value_y: Some(d.value_y),
            regime,
            assumptions,
        }),
        (None, None) => Err(Error::InconclusiveDepth { n_max }),
    }
}

/// All primitive words of length `1..=max_len` over `alphabet`, shortest first.
pub fn primitive_words(alphabet: &ColourAlphabet, max_len: usize) -> Vec<ColourWord> {
    (1..=max_len)
        .flat_map(|len| alphabet.words_of_length(len).collect::<Vec<_>>())
        .filter(|w| w.primitive_root() == *w)
        .collect()
}
