//! The linear system `V_n(ρ) = A_n V_n(λ)` and its block forward
//! substitution.
//!
//! Rows and columns of `A_n` follow the canonical [`WordOrder`]. A record
//! word `w` of length `N + 1` only draws on scenery words of length at most
//! `N + 1`, and length `N + 1` only through the straight walks `R^N` and
//! `L^N`. Hence `A_n` is lower triangular up to its diagonal blocks: `1×1`
//! blocks `μ[R^N] + μ[L^N]` at palindromes and `2×2` blocks
//! `[[μ[R^N], μ[L^N]], [μ[L^N], μ[R^N]]]` at reversal pairs.
//!
//! For symmetric walks the pair blocks are singular and only the reversal
//! symmetrization `λ̌[w] = ½(λ[w] + λ[reverse(w)])` is recoverable; the
//! matrix is then collapsed onto reversal classes, which makes it genuinely
//! lower triangular with diagonal `2μ[R^N]`.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{StepMeasure, DEFAULT_EPS};
use crate::record::{walk_pattern, CylinderVector};
use crate::words::{Block, ColourAlphabet, Step, StepWord, WordOrder};

/// Default cap on matrix depth; the dense matrix has `(2^{n+1} - 2)^2`
/// entries for a binary alphabet.
pub const DEFAULT_MAX_MATRIX_DEPTH: usize = 10;

/// Tolerance for structural identities of `A_n`.
pub const STRUCTURE_TOL: f64 = 1e-12;

/// The dense matrix `A_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReconMatrix {
    order: WordOrder,
    entries: Vec<f64>,
    holding: bool,
}

impl ReconMatrix {
    /// Wraps raw row-major entries; used for fault injection in tests and
    /// for matrices read back from disk.
    pub fn from_entries(order: WordOrder, entries: Vec<f64>, holding: bool) -> Result<Self> {
        if entries.len() != order.len() * order.len() {
            return Err(Error::Contract("matrix entries do not match the order dimension".into()));
        }
        Ok(Self { order, entries, holding })
    }

    pub fn order(&self) -> &WordOrder {
        &self.order
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn holding(&self) -> bool {
        self.holding
    }

    pub fn blocks(&self) -> &[Block] {
        self.order.blocks()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim() + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        let d = self.dim();
        self.entries[row * d + col] = value;
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let d = self.dim();
        &self.entries[row * d..(row + 1) * d]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.dim()).map(|r| self.row(r).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    /// Nonzero entries as `row,col,value` CSV with words as labels.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.order, &self.entries, out)
    }

    pub fn descriptor(&self) -> MatrixDescriptor {
        MatrixDescriptor::new(&self.order, self.holding, self.dim(), "full")
    }
}

#[derive(Serialize)]
struct MatrixRow {
    row: String,
    col: String,
    value: f64,
}

fn write_matrix_csv<W: Write>(order: &WordOrder, entries: &[f64], out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    let alphabet = order.alphabet();
    let d = order.len();
    for r in 0..d {
        for c in 0..d {
            let v = entries[r * d + c];
            if v != 0.0 {
                wtr.serialize(MatrixRow { row: alphabet.render(order.word(r)), col: alphabet.render(order.word(c)), value: v })?;
            }
        }
    }
    wtr.flush()?;
    Ok(())
}

/// Compact JSON description of a matrix and its diagonal blocks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixDescriptor {
    pub kind: &'static str,
    pub depth: usize,
    pub alphabet: String,
    pub dimension: usize,
    pub effective_rank: usize,
    pub holding: bool,
    pub blocks: Vec<BlockDescriptor>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockDescriptor {
    pub kind: &'static str,
    pub index: usize,
    pub words: Vec<String>,
}

impl MatrixDescriptor {
    fn new(order: &WordOrder, holding: bool, effective_rank: usize, kind: &'static str) -> Self {
        let alphabet = order.alphabet();
        let blocks = order
            .blocks()
            .iter()
            .map(|b| BlockDescriptor {
                kind: match b {
                    Block::Palindrome { .. } => "palindrome",
                    Block::Pair { .. } => "pair",
                },
                index: b.start(),
                words: (b.start()..=b.end()).map(|i| alphabet.render(order.word(i))).collect(),
            })
            .collect();
        Self {
            kind,
            depth: order.depth(),
            alphabet: alphabet.to_string(),
            dimension: order.len(),
            effective_rank,
            holding,
            blocks,
        }
    }
}

/// `A_n[w][v] = Σ μ[u]` over walk words `u` (`|u| = |w| - 1`) whose pattern
/// with `w` is consistent and anchors `v`.
pub fn build_matrix(mu: &StepMeasure, alphabet: &ColourAlphabet, n: usize) -> Result<ReconMatrix> {
    build_matrix_with_cap(mu, alphabet, n, DEFAULT_MAX_MATRIX_DEPTH)
}

pub fn build_matrix_with_cap(mu: &StepMeasure, alphabet: &ColourAlphabet, n: usize, cap: usize) -> Result<ReconMatrix> {
    if n > cap {
        return Err(Error::DepthExceeded { requested: n, max: cap });
    }
    let order = WordOrder::new(alphabet, n)?;
    let d = order.len();
    let walks: Vec<Vec<(StepWord, f64)>> = (0..n)
        .map(|len| {
            Ok(mu
                .layer(len)?
                .into_iter()
                .enumerate()
                .filter(|&(_, m)| m != 0.0)
                .map(|(i, m)| (StepWord::from_index(i, len), m))
                .collect())
        })
        .collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = (0..d)
        .into_par_iter()
        .map(|r| {
            let w = order.word(r);
            let mut row = vec![0.0; d];
            for (u, m) in &walks[w.len() - 1] {
                if let Some(p) = walk_pattern(u, w)? {
                    let c = order.position(&p.anchored_word).expect("anchored word within depth");
                    row[c] += m;
                }
            }
            Ok(row)
        })
        .collect::<Result<_>>()?;
    Ok(ReconMatrix { order, entries: rows.concat(), holding: mu.has_holding() })
}

/// Expected diagonal-block values for walk length `n_steps`:
/// `(μ[R^N], μ[L^N])`, with the empty walk counted once.
fn straight_masses(mu: &StepMeasure, n_steps: usize) -> Result<(f64, f64)> {
    if n_steps == 0 {
        return Ok((1.0, 0.0));
    }
    Ok((mu.prob(&StepWord::repeat(Step::R, n_steps))?, mu.prob(&StepWord::repeat(Step::L, n_steps))?))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StructureCheck {
    NegativeEntry,
    /// Nonzero strictly to the right of the row's diagonal block.
    AboveBlock,
    /// Nonzero at a same-length column other than `w` and `reverse(w)`.
    SameLengthOffBlock,
    PalindromeBlock,
    PairBlock,
    /// Column mass per row length differs from the walk-range law.
    ColumnMass,
    /// A nonzero introduced by holding that is not strictly below the blocks.
    HoldingNotBelow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureViolation {
    pub check: StructureCheck,
    pub row: String,
    pub col: String,
    pub expected: f64,
    pub found: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HoldingComparison {
    /// Entries zero without holding and nonzero with it.
    pub new_nonzeros: usize,
    /// Nonzero entries strictly below the diagonal blocks, without / with holding.
    pub below_block_nonzeros: (usize, usize),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StructureReport {
    pub violations: Vec<StructureViolation>,
    pub nonzeros_below_blocks: usize,
    pub holding: Option<HoldingComparison>,
}

impl StructureReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

fn count_below(a: &ReconMatrix) -> usize {
    (0..a.dim())
        .map(|r| {
            let start = a.order.block_containing(r).start();
            a.row(r)[..start].iter().filter(|&&x| x != 0.0).count()
        })
        .sum()
}

/// Checks the almost-lower-triangular form of `a` against `μ`.
///
/// When `μ` holds, `a` is also compared with the matrix of the same walk
/// with holding removed: every entry that holding turns nonzero must lie
/// strictly below the diagonal blocks.
pub fn verify_structure(a: &ReconMatrix, mu: &StepMeasure) -> Result<StructureReport> {
    let order = &a.order;
    let alphabet = order.alphabet();
    let name = |i: usize| alphabet.render(order.word(i));
    let mut violations = Vec::new();
    let mut flag = |check, r: usize, c: usize, expected: f64, found: f64| {
        violations.push(StructureViolation { check, row: name(r), col: name(c), expected, found });
    };

    for r in 0..a.dim() {
        let block = order.block_containing(r);
        let len = order.word(r).len();
        let same_len = order.length_range(len);
        for c in 0..a.dim() {
            let x = a.get(r, c);
            if x < 0.0 {
                flag(StructureCheck::NegativeEntry, r, c, 0.0, x);
            }
            if x != 0.0 {
                if c > block.end() {
                    flag(StructureCheck::AboveBlock, r, c, 0.0, x);
                } else if same_len.contains(&c) && c < block.start() {
                    flag(StructureCheck::SameLengthOffBlock, r, c, 0.0, x);
                }
            }
        }
    }

    for block in order.blocks() {
        let i = block.start();
        let (right, left) = straight_masses(mu, order.word(i).len() - 1)?;
        match block {
            Block::Palindrome { .. } => {
                let found = a.get(i, i);
                if (found - (right + left)).abs() > STRUCTURE_TOL {
                    flag(StructureCheck::PalindromeBlock, i, i, right + left, found);
                }
            }
            Block::Pair { .. } => {
                for (r, c, expected) in [(i, i, right), (i, i + 1, left), (i + 1, i, left), (i + 1, i + 1, right)] {
                    let found = a.get(r, c);
                    if (found - expected).abs() > STRUCTURE_TOL {
                        flag(StructureCheck::PairBlock, r, c, expected, found);
                    }
                }
            }
        }
    }

    // For each row length k, Σ_{|w|=k} A[w][v] is the probability that a
    // k-1 step walk covers |v| sites; these masses sum to one.
    for k in 1..=order.depth() {
        let rows = order.length_range(k);
        let mut total = 0.0;
        for m in 1..=k {
            let cols = order.length_range(m);
            let masses: Vec<f64> = cols.clone().map(|c| rows.clone().map(|r| a.get(r, c)).sum()).collect();
            for (c, &mass) in cols.zip(&masses) {
                if (mass - masses[0]).abs() > STRUCTURE_TOL {
                    flag(StructureCheck::ColumnMass, rows.start, c, masses[0], mass);
                }
            }
            total += masses[0];
        }
        if (total - 1.0).abs() > STRUCTURE_TOL {
            flag(StructureCheck::ColumnMass, rows.start, rows.start, 1.0, total);
        }
    }

    // Tables have no holding-free counterpart to compare against.
    let holding = if mu.has_holding() && mu.max_depth().is_none() {
        let plain = build_matrix_with_cap(&mu.without_holding()?, alphabet, order.depth(), order.depth())?;
        let mut new_nonzeros = 0;
        for r in 0..a.dim() {
            let start = order.block_containing(r).start();
            for c in 0..a.dim() {
                if plain.get(r, c) == 0.0 && a.get(r, c) != 0.0 {
                    new_nonzeros += 1;
                    if c >= start {
                        flag(StructureCheck::HoldingNotBelow, r, c, 0.0, a.get(r, c));
                    }
                }
            }
        }
        Some(HoldingComparison { new_nonzeros, below_block_nonzeros: (count_below(&plain), count_below(a)) })
    } else {
        None
    };

    Ok(StructureReport { violations, nonzeros_below_blocks: count_below(a), holding })
}

fn check_same_order(a: &WordOrder, b: &WordOrder) -> Result<()> {
    if a != b {
        return Err(Error::Contract(format!(
            "matrix order (depth {}, alphabet {}) does not match vector order (depth {}, alphabet {})",
            a.depth(),
            a.alphabet(),
            b.depth(),
            b.alphabet()
        )));
    }
    Ok(())
}

/// Solves `A x = ρ` by block forward substitution, returning `V_n(λ)`.
///
/// A pair block is rejected as singular when `|μ[R^N] − μ[L^N]| ≤ eps`, a
/// palindrome block when `μ[R^N] + μ[L^N] ≤ eps`.
pub fn solve_asymmetric(a: &ReconMatrix, rho: &CylinderVector, eps: f64) -> Result<CylinderVector> {
    check_same_order(&a.order, &rho.order)?;
    let mut x = vec![0.0; a.dim()];
    let reduced = |x: &[f64], r: usize, upto: usize| {
        a.row(r)[..upto].iter().zip(&x[..upto]).fold(rho.values[r], |acc, (m, v)| acc - m * v)
    };
    for block in a.blocks() {
        let i = block.start();
        let n_steps = a.order.word(i).len() - 1;
        match block {
            Block::Palindrome { .. } => {
                let d = a.get(i, i);
                if d <= eps {
                    return Err(Error::SingularSystem {
                        n: n_steps,
                        reason: format!("palindrome block μ[R^N] + μ[L^N] = {d:e}"),
                    });
                }
                x[i] = reduced(&x, i, i) / d;
            }
            Block::Pair { .. } => {
                let (p, q) = (a.get(i, i), a.get(i, i + 1));
                let (s, t) = (a.get(i + 1, i), a.get(i + 1, i + 1));
                if (p - q).abs() <= eps || p + q <= eps {
                    return Err(Error::SingularSystem {
                        n: n_steps,
                        reason: format!("pair block with μ[R^N] = {p:e}, μ[L^N] = {q:e} (strong asymmetry fails)"),
                    });
                }
                let b0 = reduced(&x, i, i);
                let b1 = reduced(&x, i + 1, i);
                let det = p * t - q * s;
                x[i] = (t * b0 - q * b1) / det;
                x[i + 1] = (p * b1 - s * b0) / det;
            }
        }
    }
    CylinderVector::new(a.order.clone(), x)
}

/// `‖A x − ρ‖_∞`.
pub fn residual(a: &ReconMatrix, x: &CylinderVector, rho: &CylinderVector) -> Result<f64> {
    check_same_order(&a.order, &x.order)?;
    check_same_order(&a.order, &rho.order)?;
    Ok(a.mul_vec(&x.values).iter().zip(&rho.values).map(|(l, r)| (l - r).abs()).fold(0.0, f64::max))
}

/// Cylinder values satisfying `v[w] = v[reverse(w)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetrizedVector(CylinderVector);

impl SymmetrizedVector {
    pub fn vector(&self) -> &CylinderVector {
        &self.0
    }

    pub fn into_vector(self) -> CylinderVector {
        self.0
    }

    pub fn values(&self) -> &[f64] {
        &self.0.values
    }
}

/// `½(v[w] + v[reverse(w)])`.
pub fn symmetrize(v: &CylinderVector) -> SymmetrizedVector {
    let values = (0..v.values.len())
        .map(|i| {
            let j = v.order.reverse_position(i);
            if i == j {
                v.values[i]
            } else {
                0.5 * (v.values[i] + v.values[j])
            }
        })
        .collect();
    SymmetrizedVector(CylinderVector { order: v.order.clone(), values })
}

/// `A_n` collapsed onto reversal classes: the coefficient of a class sits in
/// the column of its first member and the partner column is zero. Pair rows
/// are kept for both members, so the stored matrix has the full dimension
/// while its effective rank is the number of classes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    order: WordOrder,
    entries: Vec<f64>,
    holding: bool,
}

impl SymmetricMatrix {
    pub fn from_full(a: &ReconMatrix) -> Self {
        let d = a.dim();
        let mut entries = vec![0.0; d * d];
        for r in 0..d {
            for c in 0..d {
                let rep = a.order.block_containing(c).start();
                entries[r * d + rep] += a.get(r, c);
            }
        }
        Self { order: a.order.clone(), entries, holding: a.holding }
    }

    pub fn order(&self) -> &WordOrder {
        &self.order
    }

    pub fn dim(&self) -> usize {
        self.order.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim() + col]
    }

    pub fn effective_rank(&self) -> usize {
        self.order.blocks().len()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        write_matrix_csv(&self.order, &self.entries, out)
    }

    pub fn descriptor(&self) -> MatrixDescriptor {
        MatrixDescriptor::new(&self.order, self.holding, self.effective_rank(), "reversal-classes")
    }
}

pub fn build_symmetric_matrix(mu: &StepMeasure, alphabet: &ColourAlphabet, n: usize) -> Result<SymmetricMatrix> {
    Ok(SymmetricMatrix::from_full(&build_matrix(mu, alphabet, n)?))
}

/// Reconstructs `V_n(λ̌)` from `V_n(ρ)` for a symmetric walk.
///
/// The class-diagonal entry of row `w` is `2μ[R^N]` (for palindromes this is
/// `μ[R^N] + μ[L^N]`, equal under symmetry); it is rejected as singular when
/// `μ[R^N] ≤ eps`.
pub fn solve_symmetric(mu: &StepMeasure, rho: &CylinderVector, eps: f64) -> Result<SymmetrizedVector> {
    let n = rho.depth();
    if !mu.is_symmetric(n - 1, DEFAULT_EPS)? {
        return Err(Error::Contract(format!("step measure is not mirror-symmetric up to depth {}", n - 1)));
    }
    for n_steps in 1..n {
        let right = mu.prob(&StepWord::repeat(Step::R, n_steps))?;
        if right <= eps {
            return Err(Error::SingularSystem {
                n: n_steps,
                reason: format!("μ[R^N] = {right:e} (walk is not straightforward)"),
            });
        }
    }
    let s = build_symmetric_matrix(mu, rho.order.alphabet(), n)?;
    let mut x = vec![0.0; s.dim()];
    for block in s.order.blocks() {
        let i = block.start();
        let d = s.get(i, i);
        let b = (0..i).fold(rho.values[i], |acc, j| acc - s.get(i, j) * x[j]);
        x[i] = b / d;
        if let Block::Pair { .. } = block {
            x[i + 1] = x[i];
        }
    }
    Ok(SymmetrizedVector(CylinderVector::new(s.order.clone(), x)?))
}

/// Which solver a reconstruction used.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReconstructionKind {
    /// `V_n(λ)` from a strongly asymmetric walk.
    SceneryMeasure,
    /// `V_n(λ̌)` from a symmetric straightforward walk.
    ReversalSymmetrized,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub kind: ReconstructionKind,
    pub values: CylinderVector,
    /// `‖A_n x − ρ‖_∞` over all rows of the full matrix.
    pub residual: f64,
}

/// Picks the solver from the walk: strongly asymmetric walks recover `λ`,
/// symmetric walks recover `λ̌`.
pub fn reconstruct(mu: &StepMeasure, rho: &CylinderVector, eps: f64) -> Result<Reconstruction> {
    let n = rho.depth();
    let a = build_matrix(mu, rho.order.alphabet(), n)?;
    let asym = mu.strong_asymmetry(n - 1, eps)?;
    let (kind, values) = if asym.holds {
        (ReconstructionKind::SceneryMeasure, solve_asymmetric(&a, rho, eps)?)
    } else if mu.is_symmetric(n - 1, DEFAULT_EPS)? {
        (ReconstructionKind::ReversalSymmetrized, solve_symmetric(mu, rho, eps)?.into_vector())
    } else {
        return Err(Error::SingularSystem {
            n: asym.witness.unwrap_or(1),
            reason: "walk is neither strongly asymmetric nor symmetric".into(),
        });
    };
    let residual = residual(&a, &values, rho)?;
    Ok(Reconstruction { kind, values, residual })
}
