//! Step measures `μ` on walk words and scenery measures `λ` on colour words.
//!
//! Both are queried by cylinder probability: `μ[u]` for a step word `u`,
//! `λ[v]` for a colour word `v`. Built-in kinds are i.i.d., stationary
//! Markov (steps only), periodic orbits (sceneries only) and explicit
//! tables. The JSON descriptors documented in `docs/schema.md` map onto the
//! `*Spec` types of this module.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::words::{ColourAlphabet, ColourWord, Step, StepWord};

/// Default tolerance for measure identities, asymmetry and positivity checks.
pub const DEFAULT_EPS: f64 = 1e-12;

// Tolerance for row sums of user-supplied probability vectors.
const INPUT_TOL: f64 = 1e-9;

/// A stationary measure on step sequences over `{L, H, R}`.
///
/// Arrays indexed by step use the canonical order `L, H, R`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "StepMeasureSpec", into = "StepMeasureSpec")]
pub enum StepMeasure {
    Iid { p: [f64; 3] },
    Markov { initial: [f64; 3], transition: [[f64; 3]; 3] },
    Table { max_depth: usize, probs: HashMap<StepWord, f64> },
}

fn check_probability_vector(p: &[f64], what: &str) -> Result<()> {
    if p.iter().any(|&x| !(0.0..=1.0).contains(&x) || x.is_nan()) {
        return Err(Error::InvalidMeasure(format!("{what}: probabilities must lie in [0, 1], got {p:?}")));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > INPUT_TOL {
        return Err(Error::InvalidMeasure(format!("{what}: probabilities sum to {s}, not 1")));
    }
    Ok(())
}

/// Stationary distribution of a chain on the states whose rows are nonzero,
/// via the Markov chain tree theorem (closed form for at most three states).
fn stationary(transition: &[[f64; 3]; 3]) -> Result<[f64; 3]> {
    let active: Vec<usize> = (0..3).filter(|&i| transition[i].iter().sum::<f64>() > 0.0).collect();
    let p = |i: usize, j: usize| transition[active[i]][active[j]];
    let weights: Vec<f64> = match active.len() {
        1 => vec![1.0],
        2 => vec![p(1, 0), p(0, 1)],
        3 => vec![
            p(1, 0) * p(2, 0) + p(1, 0) * p(2, 1) + p(1, 2) * p(2, 0),
            p(0, 1) * p(2, 1) + p(0, 1) * p(2, 0) + p(0, 2) * p(2, 1),
            p(0, 2) * p(1, 2) + p(0, 2) * p(1, 0) + p(0, 1) * p(1, 2),
        ],
        _ => return Err(Error::InvalidMeasure("transition matrix has no active state".into())),
    };
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        return Err(Error::InvalidMeasure("transition matrix has no unique stationary distribution".into()));
    }
    let mut pi = [0.0; 3];
    for (k, &i) in active.iter().enumerate() {
        pi[i] = weights[k] / total;
    }
    Ok(pi)
}

impl StepMeasure {
    /// I.i.d. steps with `P(R) = p_r`, `P(L) = p_l`, `P(H) = p_h`.
    pub fn iid(p_r: f64, p_l: f64, p_h: f64) -> Result<Self> {
        let p = [p_l, p_h, p_r];
        check_probability_vector(&p, "iid step measure")?;
        Ok(StepMeasure::Iid { p })
    }

    /// Stationary Markov chain. `transition[a][b]` is the probability of step
    /// `b` after step `a`, indexed `L, H, R`; an all-zero row marks a state
    /// the chain never visits. The initial law is the stationary one.
    pub fn markov(transition: [[f64; 3]; 3]) -> Result<Self> {
        for (i, row) in transition.iter().enumerate() {
            let s: f64 = row.iter().sum();
            if s == 0.0 {
                if transition.iter().any(|r| r[i] > 0.0) {
                    return Err(Error::InvalidMeasure(format!(
                        "state {} is entered but has no outgoing transitions",
                        Step::ALL[i].as_char()
                    )));
                }
                continue;
            }
            check_probability_vector(row, &format!("transition row {}", Step::ALL[i].as_char()))?;
        }
        let initial = stationary(&transition)?;
        Ok(StepMeasure::Markov { initial, transition })
    }

    /// Two-state chain on `{L, R}` with `P(R→R) = p_rr` and `P(L→L) = p_ll`.
    pub fn markov_two_state(p_rr: f64, p_ll: f64) -> Result<Self> {
        Self::markov([[p_ll, 0.0, 1.0 - p_ll], [0.0; 3], [1.0 - p_rr, 0.0, p_rr]])
    }

    /// Markov chain with a caller-supplied initial law. The law is not
    /// required to be stationary; [`StepMeasure::validate`] reports it if not.
    pub fn markov_with_initial(transition: [[f64; 3]; 3], initial: [f64; 3]) -> Result<Self> {
        let StepMeasure::Markov { transition, .. } = Self::markov(transition)? else { unreachable!() };
        check_probability_vector(&initial, "markov initial distribution")?;
        Ok(StepMeasure::Markov { initial, transition })
    }

    /// Explicit word probabilities up to `max_depth`; absent words have
    /// probability zero and the empty word has probability one.
    pub fn table(max_depth: usize, probs: HashMap<StepWord, f64>) -> Result<Self> {
        if let Some(u) = probs.keys().find(|u| u.len() > max_depth) {
            return Err(Error::InvalidMeasure(format!("table word {u} longer than max_depth {max_depth}")));
        }
        Ok(StepMeasure::Table { max_depth, probs })
    }

    /// Tabulates `f` on every step word of length `1..=max_depth`.
    pub fn tabulate(max_depth: usize, f: impl Fn(&StepWord) -> f64) -> Self {
        let probs = (1..=max_depth)
            .flat_map(StepWord::all_of_length)
            .map(|u| {
                let p = f(&u);
                (u, p)
            })
            .collect();
        StepMeasure::Table { max_depth, probs }
    }

    /// Largest queryable word length, `None` when unbounded.
    pub fn max_depth(&self) -> Option<usize> {
        match self {
            StepMeasure::Table { max_depth, .. } => Some(*max_depth),
            _ => None,
        }
    }

    pub fn is_sampleable(&self) -> bool {
        !matches!(self, StepMeasure::Table { .. })
    }

    /// `μ[u]`.
    pub fn prob(&self, u: &StepWord) -> Result<f64> {
        match self {
            StepMeasure::Iid { p } => Ok(u.steps().iter().map(|s| p[s.index()]).product()),
            StepMeasure::Markov { initial, transition } => {
                let Some(first) = u.steps().first() else { return Ok(1.0) };
                Ok(u.steps()
                    .windows(2)
                    .fold(initial[first.index()], |acc, w| acc * transition[w[0].index()][w[1].index()]))
            }
            StepMeasure::Table { max_depth, probs } => {
                if u.len() > *max_depth {
                    return Err(Error::DepthExceeded { requested: u.len(), max: *max_depth });
                }
                if u.is_empty() {
                    return Ok(1.0);
                }
                Ok(probs.get(u).copied().unwrap_or(0.0))
            }
        }
    }

    /// `μ[u]` for all `3^len` step words of length `len`, in canonical order.
    pub fn layer(&self, len: usize) -> Result<Vec<f64>> {
        if let Some(max) = self.max_depth() {
            if len > max {
                return Err(Error::DepthExceeded { requested: len, max });
            }
        }
        match self {
            StepMeasure::Iid { p } => {
                let mut v = vec![1.0];
                for _ in 0..len {
                    v = v.iter().flat_map(|&x| p.iter().map(move |&q| x * q)).collect();
                }
                Ok(v)
            }
            StepMeasure::Markov { initial, transition } => {
                if len == 0 {
                    return Ok(vec![1.0]);
                }
                // track (probability, last step) pairs
                let mut v: Vec<(f64, usize)> = (0..3).map(|s| (initial[s], s)).collect();
                for _ in 1..len {
                    v = v
                        .iter()
                        .flat_map(|&(x, last)| (0..3).map(move |s| (x * transition[last][s], s)))
                        .collect();
                }
                Ok(v.into_iter().map(|(x, _)| x).collect())
            }
            StepMeasure::Table { .. } => StepWord::all_of_length(len).map(|u| self.prob(&u)).collect(),
        }
    }

    /// `μ[H] > 0`.
    pub fn has_holding(&self) -> bool {
        self.prob(&StepWord::repeat(Step::H, 1)).map(|p| p > 0.0).unwrap_or(false)
    }

    /// `μ[u] = μ[mirror(u)]` for every `|u| ≤ depth`, within `eps`.
    pub fn is_symmetric(&self, depth: usize, eps: f64) -> Result<bool> {
        for len in 1..=depth {
            let layer = self.layer(len)?;
            for (i, u) in StepWord::all_of_length(len).enumerate() {
                let m = mirror_index(&u);
                if (layer[i] - layer[m]).abs() > eps {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// Checks `|μ[R^N] − μ[L^N]| > eps` for `N = 1..=depth`.
    pub fn strong_asymmetry(&self, depth: usize, eps: f64) -> Result<AsymmetryCheck> {
        for n in 1..=depth {
            let r = self.prob(&StepWord::repeat(Step::R, n))?;
            let l = self.prob(&StepWord::repeat(Step::L, n))?;
            if (r - l).abs() <= eps {
                return Ok(AsymmetryCheck { holds: false, witness: Some(n) });
            }
        }
        Ok(AsymmetryCheck { holds: true, witness: None })
    }

    pub fn is_strongly_asymmetric(&self, depth: usize, eps: f64) -> Result<bool> {
        Ok(self.strong_asymmetry(depth, eps)?.holds)
    }

    /// `μ[R^N] > eps` for `N = 1..=depth`.
    pub fn is_straightforward(&self, depth: usize, eps: f64) -> Result<bool> {
        for n in 1..=depth {
            if self.prob(&StepWord::repeat(Step::R, n))? <= eps {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// The same walk with holding removed: each non-holding move keeps its
    /// relative weight. Defined for i.i.d. and Markov kinds.
    pub fn without_holding(&self) -> Result<Self> {
        match self {
            StepMeasure::Iid { p } => {
                let moving = p[0] + p[2];
                if moving <= 0.0 {
                    return Err(Error::InvalidMeasure("walk never moves".into()));
                }
                Self::iid(p[2] / moving, p[0] / moving, 0.0)
            }
            StepMeasure::Markov { transition, .. } => {
                let mut t = [[0.0; 3]; 3];
                for a in [0, 2] {
                    let moving = transition[a][0] + transition[a][2];
                    if transition[a].iter().sum::<f64>() == 0.0 {
                        continue;
                    }
                    if moving <= 0.0 {
                        return Err(Error::InvalidMeasure("state only holds after a move".into()));
                    }
                    t[a][0] = transition[a][0] / moving;
                    t[a][2] = transition[a][2] / moving;
                }
                Self::markov(t)
            }
            StepMeasure::Table { .. } => {
                Err(Error::Contract("holding removal is not defined for explicit tables".into()))
            }
        }
    }

    /// Range, additivity and stationarity checks for all words up to
    /// `depth` (capped at the table depth), plus stationarity of a Markov
    /// initial law.
    pub fn validate(&self, depth: usize, eps: f64) -> Result<ValidationReport> {
        let depth = self.max_depth().map_or(depth, |m| m.min(depth));
        let mut violations = Vec::new();
        let mut layers = vec![vec![1.0]];
        for len in 1..=depth {
            layers.push(self.layer(len)?);
        }
        for (len, layer) in layers.iter().enumerate() {
            for (i, &x) in layer.iter().enumerate() {
                if !(-eps..=1.0 + eps).contains(&x) {
                    violations.push(Violation {
                        check: Check::Range,
                        word: StepWord::from_index(i, len).to_string(),
                        depth: len,
                        magnitude: if x < 0.0 { -x } else { x - 1.0 },
                    });
                }
            }
        }
        for len in 0..depth {
            let (this, next) = (&layers[len], &layers[len + 1]);
            let stride = this.len();
            for (i, &x) in this.iter().enumerate() {
                let right: f64 = (0..3).map(|s| next[3 * i + s]).sum();
                let left: f64 = (0..3).map(|s| next[s * stride + i]).sum();
                let word = StepWord::from_index(i, len).to_string();
                if (x - right).abs() > eps {
                    violations.push(Violation { check: Check::Additivity, word: word.clone(), depth: len, magnitude: (x - right).abs() });
                }
                if (x - left).abs() > eps {
                    violations.push(Violation { check: Check::Stationarity, word, depth: len, magnitude: (x - left).abs() });
                }
            }
        }
        if let StepMeasure::Markov { initial, transition } = self {
            let drift = (0..3)
                .map(|b| ((0..3).map(|a| initial[a] * transition[a][b]).sum::<f64>() - initial[b]).abs())
                .fold(0.0, f64::max);
            if drift > eps {
                violations.push(Violation {
                    check: Check::InitialNotStationary,
                    word: String::new(),
                    depth: 0,
                    magnitude: drift,
                });
            }
        }
        Ok(ValidationReport { violations })
    }
}

fn mirror_index(u: &StepWord) -> usize {
    u.steps().iter().fold(0, |acc, s| acc * 3 + s.mirror().index())
}

/// Result of a strong-asymmetry check; `witness` is the smallest failing `N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AsymmetryCheck {
    pub holds: bool,
    pub witness: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Range,
    /// `m[w] = Σ_s m[ws]`.
    Additivity,
    /// `m[w] = Σ_s m[sw]`.
    Stationarity,
    InitialNotStationary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub check: Check,
    pub word: String,
    pub depth: usize,
    pub magnitude: f64,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// JSON descriptor of a [`StepMeasure`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum StepMeasureSpec {
    Iid {
        #[serde(rename = "pR")]
        p_r: f64,
        #[serde(rename = "pL")]
        p_l: f64,
        #[serde(rename = "pH", default)]
        p_h: f64,
    },
    Markov {
        transition: BTreeMap<String, f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<BTreeMap<String, f64>>,
    },
    Table {
        max_depth: usize,
        probs: BTreeMap<String, f64>,
    },
}

fn step_of(c: char) -> Result<usize> {
    Step::from_char(c).map(Step::index).ok_or_else(|| Error::Parse(format!("invalid step {c:?}")))
}

impl TryFrom<StepMeasureSpec> for StepMeasure {
    type Error = Error;

    fn try_from(spec: StepMeasureSpec) -> Result<Self> {
        match spec {
            StepMeasureSpec::Iid { p_r, p_l, p_h } => Self::iid(p_r, p_l, p_h),
            StepMeasureSpec::Markov { transition, initial } => {
                let mut t = [[0.0; 3]; 3];
                for (key, &p) in &transition {
                    let cs: Vec<char> = key.chars().collect();
                    if cs.len() != 2 {
                        return Err(Error::Parse(format!("transition key {key:?} must be two steps")));
                    }
                    t[step_of(cs[0])?][step_of(cs[1])?] = p;
                }
                match initial {
                    None => Self::markov(t),
                    Some(init) => {
                        let mut pi = [0.0; 3];
                        for (key, &p) in &init {
                            let mut cs = key.chars();
                            match (cs.next(), cs.next()) {
                                (Some(c), None) => pi[step_of(c)?] = p,
                                _ => return Err(Error::Parse(format!("initial key {key:?} must be one step"))),
                            }
                        }
                        Self::markov_with_initial(t, pi)
                    }
                }
            }
            StepMeasureSpec::Table { max_depth, probs } => {
                let probs = probs
                    .into_iter()
                    .map(|(k, p)| Ok((k.parse::<StepWord>()?, p)))
                    .collect::<Result<HashMap<_, _>>>()?;
                Self::table(max_depth, probs)
            }
        }
    }
}

impl From<StepMeasure> for StepMeasureSpec {
    fn from(m: StepMeasure) -> Self {
        let name = |i: usize| Step::ALL[i].as_char();
        match m {
            StepMeasure::Iid { p } => StepMeasureSpec::Iid { p_r: p[2], p_l: p[0], p_h: p[1] },
            StepMeasure::Markov { initial, transition } => {
                let mut t = BTreeMap::new();
                for (a, row) in transition.iter().enumerate() {
                    for (b, &p) in row.iter().enumerate().filter(|(_, p)| **p != 0.0) {
                        t.insert(format!("{}{}", name(a), name(b)), p);
                    }
                }
                let init = (0..3).filter(|&a| initial[a] != 0.0).map(|a| (name(a).to_string(), initial[a])).collect();
                StepMeasureSpec::Markov { transition: t, initial: Some(init) }
            }
            StepMeasure::Table { max_depth, probs } => StepMeasureSpec::Table {
                max_depth,
                probs: probs.into_iter().map(|(u, p)| (u.to_string(), p)).collect(),
            },
        }
    }
}

/// A shift-invariant measure on colour sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SceneryMeasureSpec", into = "SceneryMeasureSpec")]
pub struct SceneryMeasure {
    alphabet: ColourAlphabet,
    kind: SceneryKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SceneryKind {
    /// Uniform measure on the shifts of the periodic sequence `...ppp...`.
    Periodic { word: ColourWord },
    Iid { probs: Vec<f64> },
    Table { max_depth: usize, probs: HashMap<ColourWord, f64> },
}

impl SceneryMeasure {
    pub fn periodic(alphabet: &ColourAlphabet, word: ColourWord) -> Result<Self> {
        if word.is_empty() {
            return Err(Error::InvalidMeasure("periodic word must be nonempty".into()));
        }
        if !alphabet.contains(&word) {
            return Err(Error::InvalidMeasure(format!("periodic word {word} not over alphabet {alphabet}")));
        }
        Ok(Self { alphabet: alphabet.clone(), kind: SceneryKind::Periodic { word } })
    }

    /// Periodic orbit over the binary alphabet from a string such as `"001011"`.
    pub fn periodic_binary(word: &str) -> Result<Self> {
        let alphabet = ColourAlphabet::binary();
        let w = alphabet.parse(word)?;
        Self::periodic(&alphabet, w)
    }

    pub fn iid(alphabet: &ColourAlphabet, probs: Vec<f64>) -> Result<Self> {
        if probs.len() != alphabet.size() {
            return Err(Error::InvalidMeasure(format!(
                "iid scenery needs {} probabilities, got {}",
                alphabet.size(),
                probs.len()
            )));
        }
        check_probability_vector(&probs, "iid scenery measure")?;
        Ok(Self { alphabet: alphabet.clone(), kind: SceneryKind::Iid { probs } })
    }

    pub fn table(alphabet: &ColourAlphabet, max_depth: usize, probs: HashMap<ColourWord, f64>) -> Result<Self> {
        if let Some(v) = probs.keys().find(|v| v.len() > max_depth || !alphabet.contains(v)) {
            return Err(Error::InvalidMeasure(format!("table word {v} is too long or off-alphabet")));
        }
        Ok(Self { alphabet: alphabet.clone(), kind: SceneryKind::Table { max_depth, probs } })
    }

    /// Tabulates `f` on every colour word of length `1..=max_depth`.
    pub fn tabulate(alphabet: &ColourAlphabet, max_depth: usize, f: impl Fn(&ColourWord) -> f64) -> Self {
        let probs = (1..=max_depth)
            .flat_map(|len| alphabet.words_of_length(len).collect::<Vec<_>>())
            .map(|v| {
                let p = f(&v);
                (v, p)
            })
            .collect();
        Self { alphabet: alphabet.clone(), kind: SceneryKind::Table { max_depth, probs } }
    }

    pub fn alphabet(&self) -> &ColourAlphabet {
        &self.alphabet
    }

    pub fn kind(&self) -> &SceneryKind {
        &self.kind
    }

    pub fn max_depth(&self) -> Option<usize> {
        match &self.kind {
            SceneryKind::Table { max_depth, .. } => Some(*max_depth),
            _ => None,
        }
    }

    /// `λ[v]`.
    pub fn prob(&self, v: &ColourWord) -> Result<f64> {
        match &self.kind {
            SceneryKind::Periodic { word } => {
                let p = word.len();
                let hits = (0..p)
                    .filter(|&k| v.symbols().iter().enumerate().all(|(i, &c)| word.symbols()[(k + i) % p] == c))
                    .count();
                Ok(hits as f64 / p as f64)
            }
            SceneryKind::Iid { probs } => Ok(v
                .symbols()
                .iter()
                .map(|&c| probs.get(c as usize).copied().unwrap_or(0.0))
                .product()),
            SceneryKind::Table { max_depth, probs } => {
                if v.len() > *max_depth {
                    return Err(Error::DepthExceeded { requested: v.len(), max: *max_depth });
                }
                if v.is_empty() {
                    return Ok(1.0);
                }
                Ok(probs.get(v).copied().unwrap_or(0.0))
            }
        }
    }

    /// `λ[v]` for all words of length `len`, indexed by lexicographic rank.
    pub fn layer(&self, len: usize) -> Result<Vec<f64>> {
        let base = self.alphabet.size();
        let count = base.pow(len as u32);
        match &self.kind {
            SceneryKind::Periodic { word } => {
                let p = word.len();
                let mut v = vec![0.0; count];
                for k in 0..p {
                    let rank = (0..len).fold(0, |acc, i| acc * base + word.symbols()[(k + i) % p] as usize);
                    v[rank] += 1.0;
                }
                v.iter_mut().for_each(|x| *x /= p as f64);
                Ok(v)
            }
            _ => self.alphabet.words_of_length(len).map(|v| self.prob(&v)).collect(),
        }
    }

    /// Range checks and both shift-invariance identities
    /// `λ[v] = Σ_c λ[vc] = Σ_c λ[cv]` up to `depth` (capped at the table depth).
    pub fn validate(&self, depth: usize, eps: f64) -> Result<ValidationReport> {
        let depth = self.max_depth().map_or(depth, |m| m.min(depth));
        let base = self.alphabet.size();
        let mut violations = Vec::new();
        let mut layers = vec![vec![1.0]];
        for len in 1..=depth {
            layers.push(self.layer(len)?);
        }
        let name = |r: usize, len: usize| self.alphabet.render(&ColourWord::from_rank(r, len, base));
        for (len, layer) in layers.iter().enumerate() {
            for (r, &x) in layer.iter().enumerate() {
                if !(-eps..=1.0 + eps).contains(&x) {
                    violations.push(Violation {
                        check: Check::Range,
                        word: name(r, len),
                        depth: len,
                        magnitude: if x < 0.0 { -x } else { x - 1.0 },
                    });
                }
            }
        }
        for len in 0..depth {
            let (this, next) = (&layers[len], &layers[len + 1]);
            let stride = this.len();
            for (r, &x) in this.iter().enumerate() {
                let right: f64 = (0..base).map(|c| next[base * r + c]).sum();
                let left: f64 = (0..base).map(|c| next[c * stride + r]).sum();
                if (x - right).abs() > eps {
                    violations.push(Violation { check: Check::Additivity, word: name(r, len), depth: len, magnitude: (x - right).abs() });
                }
                if (x - left).abs() > eps {
                    violations.push(Violation { check: Check::Stationarity, word: name(r, len), depth: len, magnitude: (x - left).abs() });
                }
            }
        }
        Ok(ValidationReport { violations })
    }
}

/// JSON descriptor of a [`SceneryMeasure`]. `alphabet` defaults to `"01"`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum SceneryMeasureSpec {
    Periodic {
        word: String,
        #[serde(default)]
        alphabet: ColourAlphabet,
    },
    Iid {
        probs: Vec<f64>,
        #[serde(default)]
        alphabet: ColourAlphabet,
    },
    Table {
        max_depth: usize,
        probs: BTreeMap<String, f64>,
        #[serde(default)]
        alphabet: ColourAlphabet,
    },
}

impl TryFrom<SceneryMeasureSpec> for SceneryMeasure {
    type Error = Error;

    fn try_from(spec: SceneryMeasureSpec) -> Result<Self> {
        match spec {
            SceneryMeasureSpec::Periodic { word, alphabet } => {
                let w = alphabet.parse(&word)?;
                Self::periodic(&alphabet, w)
            }
            SceneryMeasureSpec::Iid { probs, alphabet } => Self::iid(&alphabet, probs),
            SceneryMeasureSpec::Table { max_depth, probs, alphabet } => {
                let probs = probs
                    .into_iter()
                    .map(|(k, p)| Ok((alphabet.parse(&k)?, p)))
                    .collect::<Result<HashMap<_, _>>>()?;
                Self::table(&alphabet, max_depth, probs)
            }
        }
    }
}

impl From<SceneryMeasure> for SceneryMeasureSpec {
    fn from(m: SceneryMeasure) -> Self {
        let alphabet = m.alphabet;
        match m.kind {
            SceneryKind::Periodic { word } => SceneryMeasureSpec::Periodic { word: alphabet.render(&word), alphabet },
            SceneryKind::Iid { probs } => SceneryMeasureSpec::Iid { probs, alphabet },
            SceneryKind::Table { max_depth, probs } => SceneryMeasureSpec::Table {
                max_depth,
                probs: probs.into_iter().map(|(v, p)| (alphabet.render(&v), p)).collect(),
                alphabet,
            },
        }
    }
}
