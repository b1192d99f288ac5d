//! Restricted q-ary weights and the code families built on them.
//!
//! For `n = q^k - 1`, an index `t` is a string of `k` base-`q` digits and
//! multiplication by `q` rotates it, so any rotation-invariant weight is
//! constant on cyclotomic cosets. The `s`-restricted weight is the largest
//! digit sum over `s` cyclically consecutive digits; keeping indices of
//! restricted weight `<= m` gives a generating set whose sumset stays below
//! restricted weight `2m`.
//!
//! The number of such indices is the number of closed walks of length `k` in a
//! small digraph on `(s-1)`-digit windows, which yields linear recurrences in
//! `k` for the code dimension.

use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{ExtensionCtx, FieldCtx, FqElem};
use crate::cyclic::{Closure, CyclicCodeSpec};
use crate::cyclotomic::{all_cosets, IndexSet};
use crate::{Error, Provenance, Result};

/// Default bound on `q^k` for enumerating index sets, as a power of two.
pub const DEFAULT_ENUMERATION_CAP_BITS: u32 = 26;

/// Largest vertex count accepted by [`build_graph`].
pub const MAX_GRAPH_VERTICES: usize = 4096;

/// Base-`q` digits of `t`, least significant first.
pub fn digits(t: u64, q: u64, k: u32) -> Vec<u64> {
    let mut t = t;
    (0..k)
        .map(|_| {
            let d = t % q;
            t /= q;
            d
        })
        .collect()
}

/// Digit sum of `t` in base `q` over `k` digits.
pub fn wq(t: u64, q: u64, k: u32) -> u64 {
    digits(t, q, k).iter().sum()
}

/// Largest digit sum over `s` cyclically consecutive digits among the `k`
/// digits of `t`. Requires `1 <= s <= k`.
pub fn wqs(t: u64, q: u64, k: u32, s: u32) -> u64 {
    window_max(&digits(t, q, k), s as usize)
}

fn window_max(d: &[u64], s: usize) -> u64 {
    let k = d.len();
    assert!(s >= 1 && s <= k, "window length must lie in 1..=k");
    let mut cur: u64 = d[..s].iter().sum();
    let mut best = cur;
    for i in 1..k {
        cur = cur + d[(i + s - 1) % k] - d[i - 1];
        best = best.max(cur);
    }
    best
}

/// Parameters `(q, k, s, m)` of the restricted-weight construction.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RwParams {
    pub q: u64,
    pub k: u32,
    pub s: u32,
    pub m: u32,
}

impl RwParams {
    pub fn new(q: u64, k: u32, s: u32, m: u32) -> Result<Self> {
        if q < 2 {
            return Err(Error::InvalidParameters(format!("q = {q} must be at least 2")));
        }
        if s < 1 || s > k {
            return Err(Error::InvalidParameters(format!("need 1 <= s <= k, got s = {s}, k = {k}")));
        }
        if m < 1 {
            return Err(Error::InvalidParameters("m must be at least 1".into()));
        }
        match q.checked_pow(k) {
            Some(v) if v <= 1 << 62 => Ok(RwParams { q, k, s, m }),
            _ => Err(Error::InvalidParameters(format!("{q}^{k} is too large"))),
        }
    }

    /// Code length `q^k - 1`.
    pub fn n(&self) -> u64 {
        self.q.pow(self.k) - 1
    }

    /// `floor(m k / s)`, the largest `q`-ary weight in `W_{k,s,m}`.
    pub fn weight_cap(&self) -> u64 {
        (self.m as u64 * self.k as u64) / self.s as u64
    }

    /// Same `q, k, s` with `m` doubled.
    pub fn doubled(&self) -> RwParams {
        RwParams {
            m: 2 * self.m,
            ..*self
        }
    }
}

fn check_cap(p: &RwParams, cap_bits: u32) -> Result<()> {
    if p.q.checked_pow(p.k).is_none_or(|v| v > 1u64 << cap_bits.min(62)) {
        return Err(Error::CapExceeded {
            what: format!("W_{{{},{},{}}} over q = {}", p.k, p.s, p.m, p.q),
            cap_bits,
        });
    }
    Ok(())
}

/// `W_{k,s,m}`: all residues mod `q^k - 1` of restricted weight `<= m`.
pub fn w_set(p: &RwParams, cap_bits: u32) -> Result<IndexSet> {
    check_cap(p, cap_bits)?;
    let n = p.n();
    let members: Vec<usize> = (0..n)
        .into_par_iter()
        .filter(|&t| wqs(t, p.q, p.k, p.s) <= p.m as u64)
        .map(|t| t as usize)
        .collect();
    let set = IndexSet::new(n as usize, p.q, members)?;
    if !set.is_coset_union() {
        return Err(Error::Internal("restricted weight is not coset-invariant".into()));
    }
    Ok(set)
}

/// Largest `t < q^k - 1` with restricted weight `<= m` and, optionally,
/// digit sum `<= weight_cap`, built digit by digit from the most significant
/// end. A partial string is feasible iff its zero completion is, since both
/// weights are monotone in every digit.
pub fn greedy_max(p: &RwParams, weight_cap: Option<u64>) -> u64 {
    let k = p.k as usize;
    let mut d = vec![0u64; k];
    for pos in (0..k).rev() {
        for digit in (1..p.q).rev() {
            d[pos] = digit;
            let ok = window_max(&d, p.s as usize) <= p.m as u64
                && weight_cap.is_none_or(|c| d.iter().sum::<u64>() <= c);
            if ok {
                break;
            }
            d[pos] = 0;
        }
    }
    let v = d.iter().rev().fold(0u64, |acc, &x| acc * p.q + x);
    // The all-(q-1) string is 0 mod n; its predecessor has smaller weights.
    v.min(p.n() - 1)
}

/// Closed form of `B_{k,s,m}` for `q = 2`, `k >= s`, `1 <= m <= s - 1`.
pub fn closed_b(k: u32, s: u32, m: u32) -> u64 {
    let blocks = k / s;
    let r = k - s * blocks;
    let head: u64 = (0..blocks)
        .flat_map(|i| (1..=m).map(move |j| 1u64 << (k - i * s - j)))
        .sum();
    let tail: u64 = (s - m..r).map(|i| 1u64 << i).sum();
    head + tail
}

/// Closed form of `B^_{k,s,2m}` for `q = 2`, `k >= s`, `1 <= 2m <= s - 1`.
pub fn closed_bhat(k: u32, s: u32, m: u32) -> u64 {
    let blocks = k / s;
    let r = (k - s * blocks) as i64;
    let head: u64 = (0..blocks)
        .flat_map(|i| (1..=2 * m).map(move |j| 1u64 << (k - i * s - j)))
        .sum();
    let spare = 2 * ((m * k) / s) as i64 - 2 * (m * blocks) as i64;
    let u = (s as i64 - 2 * m as i64).max(r - spare);
    let tail: u64 = (u..r).map(|i| 1u64 << i).sum();
    head + tail
}

/// `B_{k,s,m} = max W_{k,s,m}`. For `q = 2` the greedy value is checked
/// against the closed form.
pub fn b_max(p: &RwParams) -> Result<u64> {
    let greedy = greedy_max(p, None);
    if p.q == 2 && p.m < p.s {
        let closed = closed_b(p.k, p.s, p.m);
        if closed != greedy {
            return Err(Error::Internal(format!(
                "B_{{{},{},{}}}: greedy {greedy} != closed form {closed}",
                p.k, p.s, p.m
            )));
        }
    }
    Ok(greedy)
}

/// `B^_{k,s,2m}`: the largest element of `W_{k,s,2m}` of digit sum at most
/// `2 floor(mk/s)`. Here `p` carries the undoubled `m`.
pub fn bhat_max(p: &RwParams) -> Result<u64> {
    let greedy = greedy_max(&p.doubled(), Some(2 * p.weight_cap()));
    if p.q == 2 && 2 * p.m < p.s {
        let closed = closed_bhat(p.k, p.s, p.m);
        if closed != greedy {
            return Err(Error::Internal(format!(
                "B^_{{{},{},{}}}: greedy {greedy} != closed form {closed}",
                p.k, p.s, 2 * p.m
            )));
        }
    }
    Ok(greedy)
}

/// The digraph on `(s-1)`-digit windows of digit sum `<= m`. An edge `x -> y`
/// means `y` is `x` shifted by one digit and the `s`-digit string they span
/// has digit sum `<= m`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkGraph {
    pub q: u64,
    pub s: u32,
    pub m: u32,
    /// Vertices in lexicographic order, first digit first.
    pub vertices: Vec<Vec<u64>>,
    pub adjacency: Vec<Vec<u8>>,
    /// Characteristic polynomial coefficients `p_0, ..., p_g`, with `p_g = 1`.
    pub charpoly: Vec<BigInt>,
}

pub fn build_graph(q: u64, s: u32, m: u32) -> Result<WalkGraph> {
    if q < 2 || s < 2 || m < 1 {
        return Err(Error::InvalidParameters(format!(
            "need q >= 2, s >= 2, m >= 1; got q = {q}, s = {s}, m = {m}"
        )));
    }
    let len = (s - 1) as usize;
    let space = q
        .checked_pow(s - 1)
        .filter(|&v| v <= 1 << 24)
        .ok_or_else(|| Error::CapExceeded {
            what: "walk graph window strings".into(),
            cap_bits: 24,
        })?;
    let mut vertices = Vec::new();
    for v in 0..space {
        // most significant digit first gives lexicographic order
        let mut d = digits(v, q, s - 1);
        d.reverse();
        if d.iter().sum::<u64>() <= m as u64 {
            vertices.push(d);
            if vertices.len() > MAX_GRAPH_VERTICES {
                return Err(Error::CapExceeded {
                    what: "walk graph vertices".into(),
                    cap_bits: MAX_GRAPH_VERTICES.trailing_zeros(),
                });
            }
        }
    }
    let adjacency: Vec<Vec<u8>> = vertices
        .iter()
        .map(|x| {
            vertices
                .iter()
                .map(|y| {
                    let overlap = x[1..] == y[..len - 1];
                    let weight: u64 = x.iter().sum::<u64>() + y[len - 1];
                    u8::from(overlap && weight <= m as u64)
                })
                .collect()
        })
        .collect();
    let charpoly = charpoly(&adjacency);
    Ok(WalkGraph {
        q,
        s,
        m,
        vertices,
        adjacency,
        charpoly,
    })
}

type BigMatrix = Vec<Vec<BigInt>>;

fn to_big(a: &[Vec<u8>]) -> BigMatrix {
    a.iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect()
}

fn mat_mul(a: &BigMatrix, b: &BigMatrix) -> BigMatrix {
    let g = a.len();
    (0..g)
        .map(|i| {
            (0..g)
                .map(|j| {
                    let mut acc = BigInt::zero();
                    for (l, x) in a[i].iter().enumerate() {
                        if !x.is_zero() && !b[l][j].is_zero() {
                            acc += x * &b[l][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn trace(a: &BigMatrix) -> BigInt {
    (0..a.len()).map(|i| a[i][i].clone()).sum()
}

/// Faddeev-LeVerrier: `M_1 = I`, `c_{g-j} = -tr(A M_j) / j`,
/// `M_{j+1} = A M_j + c_{g-j} I`. All divisions are exact.
fn charpoly(adjacency: &[Vec<u8>]) -> Vec<BigInt> {
    let g = adjacency.len();
    let a = to_big(adjacency);
    let mut c = vec![BigInt::zero(); g + 1];
    c[g] = BigInt::one();
    let mut mj: BigMatrix = (0..g)
        .map(|i| (0..g).map(|j| BigInt::from(u8::from(i == j))).collect())
        .collect();
    for j in 1..=g {
        let am = mat_mul(&a, &mj);
        let t = trace(&am);
        let jj = BigInt::from(j);
        assert!((&t % &jj).is_zero(), "characteristic polynomial must be integral");
        c[g - j] = -(t / jj);
        mj = am;
        for i in 0..g {
            mj[i][i] += &c[g - j];
        }
    }
    c
}

impl WalkGraph {
    /// Number of vertices `g`.
    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    /// `Tr(A^j)` for `j = 0..=upto`, by repeated multiplication.
    pub fn trace_powers(&self, upto: usize) -> Vec<BigInt> {
        let a = to_big(&self.adjacency);
        let g = self.order();
        let mut cur: BigMatrix = (0..g)
            .map(|i| (0..g).map(|j| BigInt::from(u8::from(i == j))).collect())
            .collect();
        let mut out = vec![trace(&cur)];
        for _ in 0..upto {
            cur = mat_mul(&cur, &a);
            out.push(trace(&cur));
        }
        out
    }

    /// `N'_j = Tr(A^j)` for `j = 0..=k`: traces up to `g - 1`, then the
    /// recurrence `N'_j = -sum_{i=1..g} p_{g-i} N'_{j-i}`.
    pub fn n_counts(&self, k: usize) -> Vec<BigInt> {
        let g = self.order();
        let mut seq = self.trace_powers(k.min(g.saturating_sub(1)));
        for j in seq.len()..=k {
            let v: BigInt = (1..=g)
                .map(|i| &self.charpoly[g - i] * &seq[j - i])
                .sum();
            seq.push(-v);
        }
        seq
    }

    pub fn n_count(&self, k: usize) -> BigInt {
        self.n_counts(k).pop().expect("nonempty")
    }

    /// Integers whose digit windows trace a closed walk of length `k`,
    /// reading the first digit of each visited vertex as `t_0, t_1, ...`.
    pub fn closed_walk_integers(&self, k: u32) -> Vec<u64> {
        let g = self.order();
        let succ: Vec<Vec<usize>> = (0..g)
            .map(|i| (0..g).filter(|&j| self.adjacency[i][j] == 1).collect())
            .collect();
        let mut out = Vec::new();
        let mut path = Vec::with_capacity(k as usize);
        for start in 0..g {
            path.clear();
            path.push(start);
            self.extend_walks(&succ, start, k as usize, &mut path, &mut out);
        }
        out.sort_unstable();
        out
    }

    fn extend_walks(
        &self,
        succ: &[Vec<usize>],
        start: usize,
        k: usize,
        path: &mut Vec<usize>,
        out: &mut Vec<u64>,
    ) {
        let last = *path.last().expect("nonempty path");
        if path.len() == k {
            if succ[last].contains(&start) {
                let t = path
                    .iter()
                    .rev()
                    .fold(0u64, |acc, &v| acc * self.q + self.vertices[v][0]);
                out.push(t);
            }
            return;
        }
        for &next in &succ[last] {
            path.push(next);
            self.extend_walks(succ, start, k, path, out);
            path.pop();
        }
    }
}

/// `N'_{k,s,m}` for the given field size.
pub fn n_count(q: u64, s: u32, m: u32, k: usize) -> Result<BigInt> {
    Ok(build_graph(q, s, m)?.n_count(k))
}

/// One row of a parameter table. Distance columns are lower bounds; the
/// `*_source` fields say how each number was obtained.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub k: u32,
    pub n: u64,
    pub dim_c: u64,
    pub d_c_lower: u64,
    pub dim_csq: u64,
    pub d_csq_lower: u64,
    pub dim_c_source: Provenance,
    pub dim_csq_source: Provenance,
    /// [`Provenance::ExhaustiveDistance`] once the bound is certified tight.
    pub d_c_source: Provenance,
    pub d_csq_source: Provenance,
}

impl TableRow {
    /// `(n, dim C, d(C) bound, dim C^2, d(C^2) bound)`.
    pub fn numbers(&self) -> (u64, u64, u64, u64, u64) {
        (self.n, self.dim_c, self.d_c_lower, self.dim_csq, self.d_csq_lower)
    }

    /// Which distance bounds are certified exact, e.g. `"d_c;d_csq"`, or `"-"`.
    pub fn exact_flags(&self) -> String {
        let mut f = Vec::new();
        if self.d_c_source == Provenance::ExhaustiveDistance {
            f.push("d_c");
        }
        if self.d_csq_source == Provenance::ExhaustiveDistance {
            f.push("d_csq");
        }
        if f.is_empty() {
            "-".into()
        } else {
            f.join(";")
        }
    }
}

fn field(q: u64) -> Result<Arc<FieldCtx>> {
    FieldCtx::of_order(q)
}

/// The code generated by `W_{k,s,m}` (without `0` when `drop_zero`), with the
/// bounds `n - B` and `n - B^` (one more each when `0` is dropped).
pub fn construct_restricted(
    p: &RwParams,
    drop_zero: bool,
    cap_bits: u32,
) -> Result<(CyclicCodeSpec, TableRow)> {
    if 2 * p.m > p.s - 1 {
        return Err(Error::InvalidParameters(format!(
            "need m <= (s - 1) / 2, got s = {}, m = {}",
            p.s, p.m
        )));
    }
    if drop_zero && 2 * p.weight_cap() >= p.k as u64 {
        return Err(Error::InvalidParameters(format!(
            "dropping 0 needs 2 floor(mk/s) < k, got {} >= {}",
            2 * p.weight_cap(),
            p.k
        )));
    }
    let w = w_set(p, cap_bits)?;
    let set = if drop_zero {
        w.difference(&IndexSet::new(w.n(), p.q, [0])?)?
    } else {
        w
    };
    let n = p.n();
    let ext = ExtensionCtx::new(field(p.q)?, n as usize)?;
    let spec = CyclicCodeSpec::from_generating_set(ext, &set, Closure::Require)?;
    let square = set.sumset(&set)?;
    let shift = u64::from(drop_zero);
    let row = TableRow {
        k: p.k,
        n,
        dim_c: set.len() as u64,
        d_c_lower: n - b_max(p)? + shift,
        dim_csq: square.len() as u64,
        d_csq_lower: n - bhat_max(p)? + shift,
        dim_c_source: Provenance::Enumeration,
        dim_csq_source: Provenance::Enumeration,
        d_c_source: Provenance::BoundOnly,
        d_csq_source: Provenance::BoundOnly,
    };
    Ok((spec, row))
}

/// The code whose generating set is every coset inside `{0, ..., t}`, with
/// bounds `d(C) >= n - t` and `d(C^2) >= max(1, n - 2t)`.
pub fn construct_bch_t(q: u64, n: usize, t: usize) -> Result<(CyclicCodeSpec, TableRow)> {
    if t == 0 || t >= n {
        return Err(Error::InvalidParameters(format!("need 0 < t < n, got t = {t}, n = {n}")));
    }
    let ext = ExtensionCtx::new(field(q)?, n)?;
    let r = ext.r() as u64;
    let members = all_cosets(q, n)
        .into_iter()
        .filter(|c| c.max().expect("nonempty") <= t)
        .flat_map(|c| c.members());
    let set = IndexSet::new(n, q, members)?;
    let dim = set.len() as u64;
    let (n64, t64) = (n as u64, t as u64);
    let general = (n64 as i64 - ((n64 - t64 - 1) * r) as i64).max(1);
    let binary = n64 as f64 - ((n64 - t64) * r) as f64 / 2.0;
    if (dim as i64) < general || (q == 2 && (dim as f64) < binary.max(1.0)) {
        return Err(Error::Internal(format!("dimension {dim} is below the BCH estimate")));
    }
    let spec = CyclicCodeSpec::from_generating_set(ext, &set, Closure::Require)?;
    let square = set.sumset(&set)?;
    let row = TableRow {
        k: r as u32,
        n: n64,
        dim_c: dim,
        d_c_lower: n64 - t64,
        dim_csq: square.len() as u64,
        d_csq_lower: (n64 as i64 - 2 * t64 as i64).max(1) as u64,
        dim_c_source: Provenance::Enumeration,
        dim_csq_source: Provenance::Enumeration,
        d_c_source: Provenance::BoundOnly,
        d_csq_source: Provenance::BoundOnly,
    };
    Ok((spec, row))
}

/// The code generated by `{i : w_q(i) <= (q-1) h}` for `n = q^k - 1`, with
/// bounds `d(C) >= q^(k-h) - 1` and `d(C^2) >= q^(k-2h) - 1`, floored at 1.
pub fn construct_qweight(q: u64, k: u32, h: u32, cap_bits: u32) -> Result<(CyclicCodeSpec, TableRow)> {
    if h < 1 || h > k {
        return Err(Error::InvalidParameters(format!("need 1 <= h <= k, got h = {h}, k = {k}")));
    }
    let p = RwParams::new(q, k, k, 1)?;
    check_cap(&p, cap_bits)?;
    let n = p.n();
    let limit = (q - 1) * h as u64;
    let members: Vec<usize> = (0..n)
        .into_par_iter()
        .filter(|&t| wq(t, q, k) <= limit)
        .map(|t| t as usize)
        .collect();
    let set = IndexSet::new(n as usize, q, members)?;
    let ext = ExtensionCtx::new(field(q)?, n as usize)?;
    let spec = CyclicCodeSpec::from_generating_set(ext, &set, Closure::Require)?;
    let square = set.sumset(&set)?;
    let bound = |e: u32| -> u64 {
        if e > k {
            1
        } else {
            (q.pow(k - e) - 1).max(1)
        }
    };
    let row = TableRow {
        k,
        n,
        dim_c: set.len() as u64,
        d_c_lower: bound(h),
        dim_csq: square.len() as u64,
        d_csq_lower: bound(2 * h),
        dim_c_source: Provenance::Enumeration,
        dim_csq_source: Provenance::Enumeration,
        d_c_source: Provenance::BoundOnly,
        d_csq_source: Provenance::BoundOnly,
    };
    Ok((spec, row))
}

/// A low-weight word of the square of the binary `W_{k,s,(s-1)/2}` code.
#[derive(Clone, Debug)]
pub struct LowWeightWord {
    pub word: Vec<FqElem>,
    pub weight: usize,
    /// Parity check against the square's defining set.
    pub in_square: bool,
}

/// For `q = 2`, `s in {3, 5}` and `s | k`: evaluate
/// `f = 1 + X^(n/p) + ... + X^((p-1)n/p)`, `p = 2^s - 1`, at the powers of
/// `beta`. The result is the indicator of the multiples of `p`, of weight `n/p`.
pub fn special_low_weight_word(k: u32, s: u32) -> Result<LowWeightWord> {
    if !(s == 3 || s == 5) || !k.is_multiple_of(s) {
        return Err(Error::InvalidParameters(format!(
            "need s in {{3, 5}} dividing k, got k = {k}, s = {s}"
        )));
    }
    let p = RwParams::new(2, k, s, (s - 1) / 2)?;
    let (code, _) = construct_restricted(&p, false, DEFAULT_ENUMERATION_CAP_BITS)?;
    let square = code.square();
    let ext = code.ext();
    let big = ext.big();
    let n = p.n() as usize;
    let period = (1usize << s) - 1;
    let step = n / period;
    let word = (0..n)
        .map(|i| {
            let x = ext.beta_pow(i as i64);
            let xs = big.pow(x, step as u64);
            let mut acc = FqElem::ZERO;
            let mut cur = FqElem::ONE;
            for _ in 0..period {
                acc = big.add(acc, cur);
                cur = big.mul(cur, xs);
            }
            ext.to_base(acc)
        })
        .collect::<Result<Vec<_>>>()?;
    let weight = word.iter().filter(|c| !c.is_zero()).count();
    let in_square = square.contains(&word);
    Ok(LowWeightWord {
        word,
        weight,
        in_square,
    })
}

/// The two parameter tables: `(s, m) = (3, 1)` and `(5, 2)` over `GF(2)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ParamTable {
    T1,
    T2,
}

impl ParamTable {
    pub fn params(self) -> (u32, u32) {
        match self {
            ParamTable::T1 => (3, 1),
            ParamTable::T2 => (5, 2),
        }
    }
}

/// Distance bounds `(d_k, d^_k)` from the digit recurrences, for `k >= s`.
///
/// For `m = 1` (any `s >= 3`): `d_s = 2^(s-1) - 1`, `d^_s = 2^(s-2) - 1`, and
/// each step doubles and adds one, except at `k = 0 mod s` where a new
/// leading block subtracts `2^(s-1) - 1` (resp. `3 * 2^(s-2) - 1`).
/// For `(s, m) = (5, 2)`: `d_5 = 7`, `d^_5 = 1`, with the corrections `-7` at
/// `k = 0, 4 mod 5` and `-5` at `k = 0, 3 mod 5`.
pub fn distance_recurrence(s: u32, m: u32, k: u32) -> Result<(u64, u64)> {
    if k < s {
        return Err(Error::InvalidParameters(format!("need k >= s, got k = {k}, s = {s}")));
    }
    let (mut d, mut dh): (i64, i64);
    let step: Box<dyn Fn(u32, i64, i64) -> (i64, i64)> = match (s, m) {
        (s, 1) if s >= 3 => {
            d = (1i64 << (s - 1)) - 1;
            dh = (1i64 << (s - 2)) - 1;
            Box::new(move |k, d, dh| {
                if k % s == 0 {
                    (2 * d - (1 << (s - 1)) + 1, 2 * dh - 3 * (1 << (s - 2)) + 1)
                } else {
                    (2 * d + 1, 2 * dh + 1)
                }
            })
        }
        (5, 2) => {
            d = 7;
            dh = 1;
            Box::new(|k, d, dh| {
                let nd = if matches!(k % 5, 0 | 4) { 2 * d - 7 } else { 2 * d + 1 };
                let ndh = if matches!(k % 5, 0 | 3) { 2 * dh - 5 } else { 2 * dh + 1 };
                (nd, ndh)
            })
        }
        _ => {
            return Err(Error::InvalidParameters(format!(
                "no distance recurrence for s = {s}, m = {m}"
            )))
        }
    };
    for j in s + 1..=k {
        (d, dh) = step(j, d, dh);
    }
    Ok((d as u64, dh as u64))
}

/// Rows of a parameter table for `k` in `ks`. Dimensions come from the walk
/// recurrence, distance bounds from [`distance_recurrence`], and `dim C^2`
/// from the sumset `|W + W|` (it has no recurrence).
pub fn table(which: ParamTable, ks: std::ops::RangeInclusive<u32>, cap_bits: u32) -> Result<Vec<TableRow>> {
    let (s, m) = which.params();
    let graph = build_graph(2, s, m)?;
    let kmax = *ks.end() as usize;
    let counts = graph.n_counts(kmax);
    ks.map(|k| {
        if k < s {
            return Err(Error::InvalidParameters(format!("need k >= {s}, got {k}")));
        }
        let p = RwParams::new(2, k, s, m)?;
        let (d, dh) = distance_recurrence(s, m, k)?;
        let dim: u64 = counts[k as usize]
            .to_string()
            .parse()
            .map_err(|_| Error::Internal("dimension overflows u64".into()))?;
        let w = w_set(&p, cap_bits)?;
        Ok(TableRow {
            k,
            n: p.n(),
            dim_c: dim,
            d_c_lower: d,
            dim_csq: w.sumset(&w)?.len() as u64,
            d_csq_lower: dh,
            dim_c_source: Provenance::Recurrence,
            dim_csq_source: Provenance::Enumeration,
            d_c_source: Provenance::BoundOnly,
            d_csq_source: Provenance::BoundOnly,
        })
    })
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(q: u64, k: u32, s: u32, m: u32) -> RwParams {
        RwParams::new(q, k, s, m).unwrap()
    }

    /// Restricted weight straight from the definition, via string slicing.
    fn wqs_naive(t: u64, k: u32, s: u32) -> u64 {
        let bits: Vec<u64> = (0..k).map(|i| t >> i & 1).collect();
        let doubled: Vec<u64> = bits.iter().chain(&bits).copied().collect();
        (0..k as usize)
            .map(|i| doubled[i..i + s as usize].iter().sum())
            .max()
            .unwrap()
    }

    #[test]
    fn weight_examples() {
        assert_eq!(wqs(26, 2, 5, 3), 2);
        assert_eq!(wq(0, 2, 5), 0);
        assert_eq!(wqs(0, 2, 5, 3), 0);
        for t in 0..1 << 8 {
            assert_eq!(wqs(t, 2, 8, 8), wq(t, 2, 8));
        }
        // 25 = (2, 2, 1) in base 3
        assert_eq!(wq(25, 3, 3), 5);
        assert_eq!(wqs(25, 3, 3, 2), 4);
    }

    #[test]
    fn w_set_examples() {
        let w = w_set(&params(2, 5, 3, 1), 26).unwrap();
        assert_eq!(w.members(), vec![0, 1, 2, 4, 8, 16]);
        let w2 = w_set(&params(2, 5, 3, 2), 26).unwrap();
        assert!(w2.contains(26));
        assert!(!w.sumset(&w).unwrap().contains(26));
        assert_eq!(w_set(&params(2, 10, 5, 2), 26).unwrap().len(), 126);
        assert!(matches!(
            w_set(&params(2, 30, 5, 2), 26),
            Err(Error::CapExceeded { .. })
        ));
    }

    #[test]
    fn b_examples() {
        assert_eq!(b_max(&params(2, 5, 5, 2)).unwrap(), 24);
        assert_eq!(bhat_max(&params(2, 5, 5, 2)).unwrap(), 30);
        assert_eq!(b_max(&params(2, 4, 3, 1)).unwrap(), 8);
    }

    #[test]
    fn greedy_matches_enumeration_and_closed_form() {
        for q in [2u64, 3] {
            for k in 2..=if q == 2 { 14 } else { 8 } {
                for s in 2..=k {
                    for m in 1..s {
                        let p = params(q, k, s, m);
                        let w = w_set(&p, 26).unwrap();
                        assert_eq!(greedy_max(&p, None), w.max().unwrap() as u64, "{p:?}");
                        assert_eq!(b_max(&p).unwrap(), w.max().unwrap() as u64);
                        if 2 * m < s {
                            let cap = 2 * p.weight_cap();
                            let expect = w_set(&p.doubled(), 26)
                                .unwrap()
                                .iter()
                                .filter(|&t| wq(t as u64, q, k) <= cap)
                                .max()
                                .unwrap() as u64;
                            assert_eq!(bhat_max(&p).unwrap(), expect, "{p:?}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn graph_examples() {
        let g = build_graph(2, 5, 2).unwrap();
        assert_eq!(g.order(), 11);
        let expect: Vec<BigInt> = [0, 1, 0, 1, 0, 0, -2, 0, -1, 0, -1, 1]
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        assert_eq!(g.charpoly, expect);
        for s in 2..9 {
            let g = build_graph(2, s, 1).unwrap();
            let mut expect = vec![BigInt::zero(); s as usize + 1];
            expect[0] = BigInt::from(-1);
            expect[s as usize - 1] = BigInt::from(-1);
            expect[s as usize] = BigInt::one();
            assert_eq!(g.charpoly, expect, "s = {s}");
        }
        for v in &g.vertices {
            assert!(v.iter().sum::<u64>() <= 2);
        }
    }

    #[test]
    fn n_count_examples() {
        for s in 3..8u32 {
            let counts = build_graph(2, s, 1).unwrap().n_counts(s as usize - 1);
            assert_eq!(counts[0], BigInt::from(s));
            assert!(counts[1..].iter().all(|c| *c == BigInt::one()));
        }
        assert_eq!(n_count(2, 5, 2, 12).unwrap(), BigInt::from(338));
        assert_eq!(n_count(2, 3, 1, 12).unwrap(), BigInt::from(98));
        let seeds: Vec<BigInt> = build_graph(2, 5, 2).unwrap().n_counts(10)[1..].to_vec();
        let expect: Vec<BigInt> = [1, 1, 4, 5, 16, 22, 29, 45, 76, 126]
            .iter()
            .map(|&c| BigInt::from(c))
            .collect();
        assert_eq!(seeds, expect);
    }

    #[test]
    fn large_counts_do_not_overflow() {
        let g = build_graph(2, 5, 2).unwrap();
        let c = g.n_count(200);
        assert!(c.bits() > 64);
    }

    #[test]
    fn walk_bijection() {
        for (s, m) in [(3u32, 1u32), (4, 1), (5, 2), (4, 2)] {
            let g = build_graph(2, s, m).unwrap();
            for k in s..=10 {
                let w = w_set(&params(2, k, s, m), 26).unwrap();
                let mut walks = g.closed_walk_integers(k);
                // the all-ones string, if admissible, is 0 mod n and repeats index 0
                let n = (1u64 << k) - 1;
                walks.retain(|&t| t != n);
                let members: Vec<u64> = w.iter().map(|t| t as u64).collect();
                assert_eq!(walks, members, "s = {s}, m = {m}, k = {k}");
            }
        }
        let g3 = build_graph(3, 3, 2).unwrap();
        for k in 3..=7 {
            let w = w_set(&params(3, k, 3, 2), 26).unwrap();
            assert_eq!(g3.closed_walk_integers(k).len(), w.len());
        }
    }

    #[test]
    fn triple_agreement() {
        for (s, m) in [(3u32, 1u32), (4, 1), (5, 1), (5, 2), (7, 3)] {
            let g = build_graph(2, s, m).unwrap();
            let traces = g.trace_powers(16);
            let rec = g.n_counts(16);
            for k in s..=16 {
                let w = w_set(&params(2, k, s, m), 26).unwrap();
                assert_eq!(traces[k as usize], BigInt::from(w.len()));
                assert_eq!(rec[k as usize], BigInt::from(w.len()));
            }
        }
    }

    #[test]
    fn restricted_examples() {
        let (c, row) = construct_restricted(&params(2, 10, 3, 1), false, 26).unwrap();
        assert_eq!(row.numbers(), (1023, 46, 439, 441, 147));
        assert_eq!(c.dim(), 46);
        let (_, row) = construct_restricted(&params(2, 9, 5, 2), false, 26).unwrap();
        assert_eq!(row.numbers(), (511, 76, 119, 430, 19));
        let (_, z) = construct_restricted(&params(2, 10, 3, 1), true, 26).unwrap();
        assert_eq!((z.dim_c, z.d_c_lower, z.d_csq_lower), (45, 440, 148));
        let (_, z) = construct_restricted(&params(2, 5, 5, 2), true, 26).unwrap();
        assert_eq!(z.dim_c, 15);
        assert!(construct_restricted(&params(2, 6, 3, 2), false, 26).is_err());
    }

    #[test]
    fn bch_t_examples() {
        let (_, row) = construct_bch_t(2, 7, 3).unwrap();
        assert_eq!((row.dim_c, row.d_c_lower, row.d_csq_lower), (1, 4, 1));
        for t in 1..6 {
            let (_, row) = construct_bch_t(7, 6, t).unwrap();
            assert_eq!(row.dim_c, t as u64 + 1);
        }
        let (c, _) = construct_bch_t(2, 15, 14).unwrap();
        assert_eq!(c.dim(), 15);
    }

    #[test]
    fn qweight_examples() {
        let (_, row) = construct_qweight(2, 4, 1, 26).unwrap();
        assert_eq!((row.dim_c, row.d_c_lower, row.d_csq_lower), (5, 7, 3));
        let (_, row) = construct_qweight(2, 6, 1, 26).unwrap();
        assert_eq!((row.dim_c, row.d_csq_lower), (7, 15));
        let (_, row) = construct_qweight(2, 4, 2, 26).unwrap();
        assert_eq!(row.d_csq_lower, 1);
        let (c, row) = construct_qweight(3, 2, 1, 26).unwrap();
        assert_eq!(row.dim_c, 6);
        assert!(c.bounds().unwrap().d_csq_lower >= row.d_csq_lower as usize);
    }

    #[test]
    fn low_weight_words() {
        let w = special_low_weight_word(3, 3).unwrap();
        assert_eq!(w.weight, 1);
        assert!(w.in_square);
        let w = special_low_weight_word(6, 3).unwrap();
        assert_eq!(w.weight, 9);
        assert!(w.in_square);
        assert!(special_low_weight_word(7, 3).is_err());
    }

    #[test]
    fn table_rows() {
        let t1 = table(ParamTable::T1, 3..=8, 26).unwrap();
        assert_eq!(t1[0].numbers(), (7, 4, 3, 7, 1));
        assert_eq!(t1[5].numbers(), (255, 21, 111, 123, 39));
        let t2 = table(ParamTable::T2, 11..=11, 26).unwrap();
        assert_eq!(t2[0].numbers(), (2047, 210, 463, 1695, 67));
    }

    #[test]
    fn recurrences_match_closed_forms() {
        for (s, m) in [(3u32, 1u32), (4, 1), (5, 1), (5, 2)] {
            for k in s..=24 {
                let p = params(2, k, s, m);
                let (d, dh) = distance_recurrence(s, m, k).unwrap();
                assert_eq!(d, p.n() - closed_b(k, s, m));
                assert_eq!(dh, p.n() - closed_bhat(k, s, m));
            }
        }
    }

    #[test]
    fn subadditivity_exhaustive_small() {
        for k in 1..=7u32 {
            let n = (1u64 << k) - 1;
            for s in 1..=k {
                for t in 0..n {
                    for u in 0..n {
                        let v = (t + u) % n;
                        assert!(wqs(v, 2, k, s) <= wqs(t, 2, k, s) + wqs(u, 2, k, s));
                    }
                }
            }
        }
    }

    #[test]
    fn weight_caps() {
        for k in 3..=12u32 {
            for s in 2..=k {
                for m in 1..s {
                    let p = params(2, k, s, m);
                    let w = w_set(&p, 26).unwrap();
                    let cap = p.weight_cap();
                    assert!(w.iter().all(|t| wq(t as u64, 2, k) <= cap));
                    let ww = w.sumset(&w).unwrap();
                    assert!(ww.iter().all(|t| wq(t as u64, 2, k) <= 2 * cap));
                    if 2 * m < s {
                        assert!(ww.is_subset(&w_set(&p.doubled(), 26).unwrap()));
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn restricted_weight_matches_definition(k in 1u32..20, t in 0u64..1 << 20, s in 1u32..20) {
            let k = k.max(s);
            let t = t % ((1 << k) - 1).max(1);
            prop_assert_eq!(wqs(t, 2, k, s), wqs_naive(t, k, s));
        }

        #[test]
        fn coset_invariance(q in 2u64..5, k in 2u32..9, t in 0u64..100_000, s in 1u32..9) {
            let s = s.min(k);
            let n = q.pow(k) - 1;
            let t = t % n;
            prop_assert_eq!(wqs(t * q % n, q, k, s), wqs(t, q, k, s));
            prop_assert_eq!(wq(t * q % n, q, k), wq(t, q, k));
        }

        #[test]
        fn qary_subadditivity(q in 2u64..6, k in 1u32..8, a in 0u64..1_000_000, b in 0u64..1_000_000) {
            let n = q.pow(k) - 1;
            let (a, b) = (a % n.max(1), b % n.max(1));
            let v = (a + b) % n.max(1);
            prop_assert!(wq(v, q, k) <= wq(a, q, k) + wq(b, q, k));
        }
    }
}
