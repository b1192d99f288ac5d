//! Generic linear codes given by a generator matrix.
//!
//! Everything here is deliberately structure-blind: Schur squares are formed
//! from all pairwise products of basis rows and minimum distances come from
//! enumerating codewords. These are the oracles the cyclic-code machinery is
//! checked against.
//!
//! Binary codes use bit-packed rows; other fields use one [`FqElem`] per
//! coordinate. Both routes share the same reduced-row-echelon invariant so
//! their outputs compare directly.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{FieldCtx, FqElem};
use crate::{Error, Result};

type BitRow = Vec<u64>;

fn row_words(n: usize) -> usize {
    n.div_ceil(64)
}

fn bit(row: &[u64], i: usize) -> bool {
    (row[i / 64] >> (i % 64)) & 1 == 1
}

fn set_bit(row: &mut [u64], i: usize) {
    row[i / 64] |= 1 << (i % 64);
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= s;
    }
}

fn weight_bits(row: &[u64]) -> usize {
    row.iter().map(|w| w.count_ones() as usize).sum()
}

fn first_bit(row: &[u64]) -> Option<usize> {
    row.iter()
        .enumerate()
        .find(|(_, &w)| w != 0)
        .map(|(i, &w)| i * 64 + w.trailing_zeros() as usize)
}

/// Incremental reduced row-echelon basis over GF(2).
///
/// Every stored row has a pivot column that is zero in all other rows, so a
/// vector is reduced by XORing in the rows of the pivots it hits, in any order.
struct BinaryReducer {
    rows: Vec<BitRow>,
    pivot_mask: BitRow,
    row_of_pivot: Vec<u32>,
}

impl BinaryReducer {
    fn new(n: usize) -> Self {
        BinaryReducer {
            rows: Vec::new(),
            pivot_mask: vec![0; row_words(n)],
            row_of_pivot: vec![u32::MAX; n],
        }
    }

    fn reduce(&self, v: &mut [u64]) {
        for wi in 0..v.len() {
            let mut hits = v[wi] & self.pivot_mask[wi];
            while hits != 0 {
                let b = hits.trailing_zeros() as usize;
                hits &= hits - 1;
                let r = self.row_of_pivot[wi * 64 + b] as usize;
                xor_into(v, &self.rows[r]);
            }
        }
    }

    fn insert(&mut self, mut v: BitRow) -> bool {
        self.reduce(&mut v);
        let Some(p) = first_bit(&v) else {
            return false;
        };
        for row in &mut self.rows {
            if bit(row, p) {
                xor_into(row, &v);
            }
        }
        self.row_of_pivot[p] = self.rows.len() as u32;
        set_bit(&mut self.pivot_mask, p);
        self.rows.push(v);
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn into_rows(self) -> Vec<BitRow> {
        let mut rows = self.rows;
        rows.sort_by_key(|r| first_bit(r));
        rows
    }
}

/// Incremental reduced row-echelon basis over an arbitrary field.
struct DenseReducer {
    field: Arc<FieldCtx>,
    rows: Vec<Vec<FqElem>>,
    pivots: Vec<usize>,
}

impl DenseReducer {
    fn new(field: Arc<FieldCtx>) -> Self {
        DenseReducer {
            field,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn reduce(&self, v: &mut [FqElem]) {
        let f = &self.field;
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let c = v[p];
            if c.is_zero() {
                continue;
            }
            for (x, &y) in v.iter_mut().zip(row) {
                if !y.is_zero() {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
    }

    fn insert(&mut self, mut v: Vec<FqElem>) -> bool {
        self.reduce(&mut v);
        let Some(p) = v.iter().position(|c| !c.is_zero()) else {
            return false;
        };
        let f = self.field.clone();
        let inv = f.inv(v[p]).expect("nonzero pivot");
        for x in v.iter_mut() {
            *x = f.mul(*x, inv);
        }
        for row in &mut self.rows {
            let c = row[p];
            if c.is_zero() {
                continue;
            }
            for (x, &y) in row.iter_mut().zip(&v) {
                if !y.is_zero() {
                    *x = f.sub(*x, f.mul(c, y));
                }
            }
        }
        self.rows.push(v);
        self.pivots.push(p);
        true
    }

    fn rank(&self) -> usize {
        self.rows.len()
    }

    fn into_rows(self) -> Vec<Vec<FqElem>> {
        let mut pairs: Vec<_> = self.pivots.into_iter().zip(self.rows).collect();
        pairs.sort_by_key(|(p, _)| *p);
        pairs.into_iter().map(|(_, r)| r).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Rows {
    Binary(Vec<BitRow>),
    Dense(Vec<Vec<FqElem>>),
}

/// A linear code over `GF(q)` held as a reduced row-echelon basis.
#[derive(Clone, Debug)]
pub struct GeneratorMatrix {
    field: Arc<FieldCtx>,
    n: usize,
    rows: Rows,
}

impl PartialEq for GeneratorMatrix {
    /// Equality of row spaces (bases are canonical).
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.n == other.n && self.rows() == other.rows()
    }
}

impl Eq for GeneratorMatrix {}

impl GeneratorMatrix {
    /// Row-reduce arbitrary spanning rows. Binary fields use the packed path.
    pub fn from_rows(
        field: Arc<FieldCtx>,
        n: usize,
        rows: impl IntoIterator<Item = Vec<FqElem>>,
    ) -> Result<Self> {
        if field.size() == 2 {
            let mut red = BinaryReducer::new(n);
            for r in rows {
                red.insert(pack_row(&r, n)?);
            }
            Ok(GeneratorMatrix {
                field,
                n,
                rows: Rows::Binary(red.into_rows()),
            })
        } else {
            Self::from_rows_dense(field, n, rows)
        }
    }

    /// Same as [`from_rows`](Self::from_rows) but always on the generic path.
    pub fn from_rows_dense(
        field: Arc<FieldCtx>,
        n: usize,
        rows: impl IntoIterator<Item = Vec<FqElem>>,
    ) -> Result<Self> {
        let mut red = DenseReducer::new(field.clone());
        for r in rows {
            if r.len() != n {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: r.len(),
                });
            }
            if let Some(bad) = r.iter().find(|c| c.value() >= field.size()) {
                return Err(Error::NotAnElement {
                    value: bad.value(),
                    size: field.size(),
                });
            }
            red.insert(r);
        }
        Ok(GeneratorMatrix {
            field,
            n,
            rows: Rows::Dense(red.into_rows()),
        })
    }

    /// Binary code from packed rows (`n.div_ceil(64)` words each, bit `i` = coordinate `i`).
    pub fn from_bit_rows(n: usize, rows: impl IntoIterator<Item = Vec<u64>>) -> Result<Self> {
        let mut red = BinaryReducer::new(n);
        for r in rows {
            if r.len() != row_words(n) || (!n.is_multiple_of(64) && r[r.len() - 1] >> (n % 64) != 0) {
                return Err(Error::LengthMismatch {
                    expected: n,
                    got: r.len() * 64,
                });
            }
            red.insert(r);
        }
        Ok(GeneratorMatrix {
            field: FieldCtx::prime(2)?,
            n,
            rows: Rows::Binary(red.into_rows()),
        })
    }

    pub fn zero(field: Arc<FieldCtx>, n: usize) -> Self {
        Self::from_rows(field, n, std::iter::empty()).expect("no rows")
    }

    pub fn full(field: Arc<FieldCtx>, n: usize) -> Self {
        let rows = (0..n).map(|i| {
            let mut r = vec![FqElem::ZERO; n];
            r[i] = FqElem::ONE;
            r
        });
        Self::from_rows(field, n, rows).expect("identity rows")
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    /// Code length.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension (rank of the reduced basis).
    pub fn dim(&self) -> usize {
        match &self.rows {
            Rows::Binary(r) => r.len(),
            Rows::Dense(r) => r.len(),
        }
    }

    pub fn is_binary_packed(&self) -> bool {
        matches!(self.rows, Rows::Binary(_))
    }

    /// The reduced basis, one vector per row.
    pub fn rows(&self) -> Vec<Vec<FqElem>> {
        match &self.rows {
            Rows::Binary(rows) => rows.iter().map(|r| unpack_row(r, self.n)).collect(),
            Rows::Dense(rows) => rows.clone(),
        }
    }

    /// Pivot column of each basis row.
    pub fn pivots(&self) -> Vec<usize> {
        self.rows()
            .iter()
            .map(|r| r.iter().position(|c| !c.is_zero()).expect("nonzero row"))
            .collect()
    }

    /// Whether `word` lies in the row space.
    pub fn contains(&self, word: &[FqElem]) -> bool {
        if word.len() != self.n {
            return false;
        }
        match &self.rows {
            Rows::Binary(rows) => {
                let Ok(mut v) = pack_row(word, self.n) else {
                    return false;
                };
                for r in rows {
                    if bit(&v, first_bit(r).unwrap()) {
                        xor_into(&mut v, r);
                    }
                }
                v.iter().all(|&w| w == 0)
            }
            Rows::Dense(rows) => {
                let mut red = DenseReducer::new(self.field.clone());
                for r in rows {
                    red.insert(r.clone());
                }
                let mut v = word.to_vec();
                red.reduce(&mut v);
                v.iter().all(|c| c.is_zero())
            }
        }
    }

    /// `a * G` for a message `a` of length `dim`.
    pub fn encode(&self, msg: &[FqElem]) -> Vec<FqElem> {
        assert_eq!(msg.len(), self.dim());
        let f = &self.field;
        let mut out = vec![FqElem::ZERO; self.n];
        for (&c, row) in msg.iter().zip(self.rows()) {
            if c.is_zero() {
                continue;
            }
            for (o, x) in out.iter_mut().zip(row) {
                *o = f.add(*o, f.mul(c, x));
            }
        }
        out
    }

    /// Schur square: the span of all coordinatewise products of pairs of
    /// basis rows, reduced.
    pub fn schur_square(&self) -> GeneratorMatrix {
        let n = self.n;
        match &self.rows {
            Rows::Binary(rows) => {
                let mut red = BinaryReducer::new(n);
                'outer: for i in 0..rows.len() {
                    for j in i..rows.len() {
                        let prod: BitRow =
                            rows[i].iter().zip(&rows[j]).map(|(a, b)| a & b).collect();
                        red.insert(prod);
                        if red.rank() == n {
                            break 'outer;
                        }
                    }
                }
                GeneratorMatrix {
                    field: self.field.clone(),
                    n,
                    rows: Rows::Binary(red.into_rows()),
                }
            }
            Rows::Dense(rows) => {
                let f = &self.field;
                let mut red = DenseReducer::new(f.clone());
                'outer: for i in 0..rows.len() {
                    for j in i..rows.len() {
                        let prod = rows[i].iter().zip(&rows[j]).map(|(&a, &b)| f.mul(a, b)).collect();
                        red.insert(prod);
                        if red.rank() == n {
                            break 'outer;
                        }
                    }
                }
                GeneratorMatrix {
                    field: f.clone(),
                    n,
                    rows: Rows::Dense(red.into_rows()),
                }
            }
        }
    }

    /// Delete the given coordinates.
    pub fn puncture(&self, positions: &[usize]) -> Result<GeneratorMatrix> {
        let drop = position_mask(positions, self.n)?;
        let keep: Vec<usize> = (0..self.n).filter(|i| !drop[*i]).collect();
        if keep.is_empty() {
            return Err(Error::PunctureAll);
        }
        let rows = self
            .rows()
            .into_iter()
            .map(|r| keep.iter().map(|&i| r[i]).collect::<Vec<_>>());
        Self::from_rows(self.field.clone(), keep.len(), rows)
    }

    /// Keep the codewords vanishing on `positions`, then delete those coordinates.
    pub fn shorten(&self, positions: &[usize]) -> Result<GeneratorMatrix> {
        let drop = position_mask(positions, self.n)?;
        let keep: Vec<usize> = (0..self.n).filter(|i| !drop[*i]).collect();
        if keep.is_empty() {
            return Err(Error::PunctureAll);
        }
        let dropped: Vec<usize> = (0..self.n).filter(|i| drop[*i]).collect();
        // Echelon form with the shortened coordinates first: rows whose pivot
        // falls past them vanish there.
        let order: Vec<usize> = dropped.iter().chain(&keep).copied().collect();
        let permuted = self
            .rows()
            .into_iter()
            .map(|r| order.iter().map(|&i| r[i]).collect::<Vec<_>>());
        let reduced = Self::from_rows_dense(self.field.clone(), self.n, permuted)?;
        let d = dropped.len();
        let rows = reduced
            .rows()
            .into_iter()
            .filter(|r| r[..d].iter().all(|c| c.is_zero()))
            .map(|r| r[d..].to_vec());
        Self::from_rows(self.field.clone(), keep.len(), rows)
    }

    /// Each codeword `c` becomes `(c, c, ..., c)` with `m` copies.
    pub fn repeat(&self, m: usize) -> Result<GeneratorMatrix> {
        if m == 0 {
            return Err(Error::InvalidParameters("repeat count must be positive".into()));
        }
        let rows = self.rows().into_iter().map(|r| r.repeat(m));
        Self::from_rows(self.field.clone(), self.n * m, rows)
    }

    /// Minimum Hamming distance within the given budget.
    pub fn min_distance(&self, budget: &DistanceBudget) -> Result<DistanceResult> {
        let k = self.dim();
        if k == 0 {
            return Err(Error::ZeroCode);
        }
        let q = self.field.size() as u128;
        let words = (0..k).try_fold(1u128, |acc, _| acc.checked_mul(q));
        let exhaustive = matches!(words, Some(w) if w <= 1u128 << budget.exhaustive_cap_bits);
        if exhaustive {
            let (weight, witness) = match &self.rows {
                Rows::Binary(rows) => {
                    let (w, r) = exhaustive_binary(rows);
                    (w, unpack_row(&r, self.n))
                }
                Rows::Dense(rows) => exhaustive_dense(&self.field, rows),
            };
            return Ok(DistanceResult {
                value: weight,
                exact: true,
                method: DistanceMethod::Exhaustive,
                witness: Some(witness.iter().map(|c| c.value()).collect()),
                seed: None,
            });
        }
        let (weight, witness) = self.sample_min_weight(budget.samples, budget.seed);
        let certified = budget.lower_bound == Some(weight);
        Ok(DistanceResult {
            value: weight,
            exact: certified,
            method: if certified {
                DistanceMethod::Witness
            } else {
                DistanceMethod::BoundOnly
            },
            witness: Some(witness.iter().map(|c| c.value()).collect()),
            seed: Some(budget.seed),
        })
    }

    fn sample_min_weight(&self, samples: u64, seed: u64) -> (usize, Vec<FqElem>) {
        let rows = self.rows();
        let mut best = rows
            .iter()
            .min_by_key(|r| hamming_weight(r))
            .cloned()
            .expect("nonzero code");
        let mut best_w = hamming_weight(&best);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = self.field.size();
        for _ in 0..samples {
            let msg: Vec<FqElem> = (0..rows.len()).map(|_| self.field.elem(rng.gen_range(0..q)).expect("in range")).collect();
            if msg.iter().all(|c| c.is_zero()) {
                continue;
            }
            let w = self.encode(&msg);
            let wt = hamming_weight(&w);
            if wt < best_w {
                best_w = wt;
                best = w;
            }
        }
        (best_w, best)
    }
}

/// Basis of `{x : M x = 0}` for an `equations x ncols` system over `field`.
pub fn nullspace(
    field: &Arc<FieldCtx>,
    equations: impl IntoIterator<Item = Vec<FqElem>>,
    ncols: usize,
) -> Vec<Vec<FqElem>> {
    let mut red = DenseReducer::new(field.clone());
    for e in equations {
        assert_eq!(e.len(), ncols);
        red.insert(e);
    }
    let mut is_pivot = vec![false; ncols];
    for &p in &red.pivots {
        is_pivot[p] = true;
    }
    (0..ncols)
        .filter(|&c| !is_pivot[c])
        .map(|free| {
            let mut x = vec![FqElem::ZERO; ncols];
            x[free] = FqElem::ONE;
            for (row, &p) in red.rows.iter().zip(&red.pivots) {
                x[p] = field.neg(row[free]);
            }
            x
        })
        .collect()
}

/// Number of nonzero coordinates.
pub fn hamming_weight(word: &[FqElem]) -> usize {
    word.iter().filter(|c| !c.is_zero()).count()
}

fn position_mask(positions: &[usize], n: usize) -> Result<Vec<bool>> {
    let mut mask = vec![false; n];
    for &p in positions {
        if p >= n {
            return Err(Error::IndexOutOfRange { index: p, n });
        }
        mask[p] = true;
    }
    Ok(mask)
}

fn pack_row(r: &[FqElem], n: usize) -> Result<BitRow> {
    if r.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: r.len(),
        });
    }
    let mut out = vec![0u64; row_words(n)];
    for (i, c) in r.iter().enumerate() {
        match c.value() {
            0 => {}
            1 => set_bit(&mut out, i),
            v => return Err(Error::NotAnElement { value: v, size: 2 }),
        }
    }
    Ok(out)
}

fn unpack_row(r: &[u64], n: usize) -> Vec<FqElem> {
    (0..n)
        .map(|i| if bit(r, i) { FqElem::ONE } else { FqElem::ZERO })
        .collect()
}

/// Gray-code walk over every nonzero combination of the rows.
fn exhaustive_binary(rows: &[BitRow]) -> (usize, BitRow) {
    let k = rows.len();
    let split = k.saturating_sub(16).min(12);
    let low = k - split;
    let chunk = |c: u64| -> Option<(usize, BitRow)> {
        let mut word = vec![0u64; rows[0].len()];
        for (b, row) in rows[low..].iter().enumerate() {
            if c >> b & 1 == 1 {
                xor_into(&mut word, row);
            }
        }
        let mut best: Option<(usize, BitRow)> = None;
        if c != 0 {
            best = Some((weight_bits(&word), word.clone()));
        }
        for i in 1u64..1 << low {
            xor_into(&mut word, &rows[i.trailing_zeros() as usize]);
            let w = weight_bits(&word);
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                best = Some((w, word.clone()));
                if w == 1 {
                    break;
                }
            }
        }
        best
    };
    (0u64..1 << split)
        .into_par_iter()
        .filter_map(|c| chunk(c).map(|(w, r)| (w, c, r)))
        .min_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)))
        .map(|(w, _, r)| (w, r))
        .expect("at least one nonzero codeword")
}

/// Enumerate codewords whose first nonzero message coefficient is one;
/// scalar multiples share the weight.
fn exhaustive_dense(field: &FieldCtx, rows: &[Vec<FqElem>]) -> (usize, Vec<FqElem>) {
    let k = rows.len();
    let n = rows[0].len();
    let elems: Vec<FqElem> = field.elements().collect();
    let mut best: Option<(usize, Vec<FqElem>)> = None;
    for lead in 0..k {
        let mut word = rows[lead].clone();
        let tail = k - lead - 1;
        let mut digits = vec![0usize; tail];
        loop {
            let w = hamming_weight(&word);
            if best.as_ref().is_none_or(|(bw, _)| w < *bw) {
                best = Some((w, word.clone()));
            }
            // odometer step, updating the word by (new - old) * row
            let mut pos = 0;
            loop {
                if pos == tail {
                    break;
                }
                let old = elems[digits[pos]];
                digits[pos] = (digits[pos] + 1) % elems.len();
                let new = elems[digits[pos]];
                let delta = field.sub(new, old);
                let row = &rows[lead + 1 + pos];
                for i in 0..n {
                    word[i] = field.add(word[i], field.mul(delta, row[i]));
                }
                if digits[pos] != 0 {
                    break;
                }
                pos += 1;
            }
            if pos == tail {
                break;
            }
        }
    }
    best.expect("nonzero code")
}

/// Limits for [`GeneratorMatrix::min_distance`].
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceBudget {
    /// Exhaustive search runs when `q^dim <= 2^exhaustive_cap_bits`.
    pub exhaustive_cap_bits: u32,
    /// Random codewords drawn otherwise.
    pub samples: u64,
    pub seed: u64,
    /// A proven lower bound (e.g. BCH) that certifies a matching witness.
    pub lower_bound: Option<usize>,
}

impl Default for DistanceBudget {
    fn default() -> Self {
        DistanceBudget {
            exhaustive_cap_bits: 26,
            samples: 1 << 16,
            seed: 0,
            lower_bound: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistanceMethod {
    Exhaustive,
    BoundOnly,
    Witness,
}

/// Outcome of a distance computation. When `exact` is false, `value` is only
/// an upper bound (the weight of the witness).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistanceResult {
    pub value: usize,
    pub exact: bool,
    pub method: DistanceMethod,
    pub witness: Option<Vec<u64>>,
    pub seed: Option<u64>,
}

/// `RS(m, n)`: evaluations of polynomials of degree `<= m` at the given points.
pub fn reed_solomon(
    field: Arc<FieldCtx>,
    points: &[FqElem],
    m: usize,
) -> Result<GeneratorMatrix> {
    let n = points.len();
    if m >= n || n as u64 > field.size() {
        return Err(Error::InvalidParameters(format!(
            "need m < n <= q, got m = {m}, n = {n}, q = {}",
            field.size()
        )));
    }
    let mut seen = std::collections::HashSet::new();
    if !points.iter().all(|p| seen.insert(*p)) {
        return Err(Error::RepeatedPoint);
    }
    let rows = (0..=m).map(|i| points.iter().map(|&b| field.pow(b, i as u64)).collect());
    GeneratorMatrix::from_rows(field.clone(), n, rows)
}

/// Binary `RM(r, k)` with evaluation points `0..2^k` in integer order (bit `i`
/// of the point index is coordinate `X_{i+1}`).
pub fn reed_muller(r: u32, k: u32) -> Result<GeneratorMatrix> {
    if r > k || k > 20 {
        return Err(Error::InvalidParameters(format!("need r <= k <= 20, got r = {r}, k = {k}")));
    }
    let n = 1usize << k;
    let rows = (0u32..1 << k)
        .filter(|mono| mono.count_ones() <= r)
        .map(|mono| {
            let mut row = vec![0u64; row_words(n)];
            for b in 0..n as u32 {
                if b & mono == mono {
                    set_bit(&mut row, b as usize);
                }
            }
            row
        });
    GeneratorMatrix::from_bit_rows(n, rows)
}

/// Parameters of the concatenated Reed-Solomon construction (arithmetic only).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConcatParams {
    pub length: u64,
    pub dim: u64,
    pub square_distance_lower: u64,
}

pub fn concat_params(q: u64, s: u32, m: u64) -> Result<ConcatParams> {
    let big = q
        .checked_pow(2 * s + 1)
        .ok_or_else(|| Error::InvalidParameters("q^(2s+1) overflows".into()))?;
    let spread = q.pow(s) + 1;
    if s == 0 || m * spread >= big {
        return Err(Error::InvalidParameters(format!(
            "need s >= 1 and m < q^(2s+1)/(q^s+1), got s = {s}, m = {m}"
        )));
    }
    Ok(ConcatParams {
        length: (s as u64 + 1) * (2 * s as u64 + 1) * big,
        dim: (2 * s as u64 + 1) * (m + 1),
        square_distance_lower: big - m * spread,
    })
}
