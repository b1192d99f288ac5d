//! Subsets of `Z/nZ`: cyclotomic cosets, closures, sumsets, negation and
//! amplitude.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A subset of `Z/nZ`, stored as a dense bitset.
///
/// `q` is the field size against which coset closure is judged.
#[derive(Clone, Serialize, Deserialize)]
#[serde(into = "IndexSetRepr", try_from = "IndexSetRepr")]
pub struct IndexSet {
    n: usize,
    q: u64,
    words: Vec<u64>,
    len: usize,
    coset_union: bool,
}

#[derive(Serialize, Deserialize)]
struct IndexSetRepr {
    n: usize,
    q: u64,
    members: Vec<usize>,
}

impl From<IndexSet> for IndexSetRepr {
    fn from(s: IndexSet) -> Self {
        IndexSetRepr {
            n: s.n,
            q: s.q,
            members: s.members(),
        }
    }
}

impl TryFrom<IndexSetRepr> for IndexSet {
    type Error = Error;

    fn try_from(r: IndexSetRepr) -> Result<Self> {
        IndexSet::new(r.n, r.q, r.members)
    }
}

impl PartialEq for IndexSet {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n && self.q == other.q && self.words == other.words
    }
}

impl Eq for IndexSet {}

impl fmt::Debug for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IndexSet(n={}, ", self.n)?;
        f.debug_set().entries(self.iter()).finish()?;
        write!(f, ")")
    }
}

fn words_for(n: usize) -> usize {
    n.div_ceil(64)
}

impl IndexSet {
    pub fn new(n: usize, q: u64, members: impl IntoIterator<Item = usize>) -> Result<Self> {
        let mut words = vec![0u64; words_for(n)];
        for u in members {
            if u >= n {
                return Err(Error::IndexOutOfRange { index: u, n });
            }
            words[u / 64] |= 1 << (u % 64);
        }
        Ok(Self::from_words(n, q, words))
    }

    fn from_words(n: usize, q: u64, words: Vec<u64>) -> Self {
        let len = words.iter().map(|w| w.count_ones() as usize).sum();
        let mut s = IndexSet {
            n,
            q,
            words,
            len,
            coset_union: false,
        };
        let closed = s.iter().all(|u| s.contains(mul_mod(u, q, n)));
        s.coset_union = closed;
        s
    }

    pub fn empty(n: usize, q: u64) -> Self {
        Self::from_words(n, q, vec![0; words_for(n)])
    }

    pub fn full(n: usize, q: u64) -> Self {
        let mut words = vec![u64::MAX; words_for(n)];
        if !n.is_multiple_of(64) {
            *words.last_mut().unwrap() = (1u64 << (n % 64)) - 1;
        }
        Self::from_words(n, q, words)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn is_full(&self) -> bool {
        self.len == self.n
    }

    pub fn is_coset_union(&self) -> bool {
        self.coset_union
    }

    pub fn contains(&self, u: usize) -> bool {
        u < self.n && (self.words[u / 64] >> (u % 64)) & 1 == 1
    }

    /// Members in increasing order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * 64 + b)
            })
        })
    }

    pub fn members(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn max(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .rev()
            .find(|(_, &w)| w != 0)
            .map(|(wi, &w)| wi * 64 + 63 - w.leading_zeros() as usize)
    }

    fn check_compatible(&self, other: &IndexSet) -> Result<()> {
        if self.n != other.n {
            return Err(Error::ModulusMismatch(self.n, other.n));
        }
        Ok(())
    }

    pub fn union(&self, other: &IndexSet) -> Result<IndexSet> {
        self.check_compatible(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Ok(Self::from_words(self.n, self.q, words))
    }

    pub fn difference(&self, other: &IndexSet) -> Result<IndexSet> {
        self.check_compatible(other)?;
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & !b).collect();
        Ok(Self::from_words(self.n, self.q, words))
    }

    pub fn is_subset(&self, other: &IndexSet) -> bool {
        self.n == other.n && self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// `Z/nZ` minus this set.
    pub fn complement(&self) -> IndexSet {
        IndexSet::full(self.n, self.q)
            .difference(self)
            .expect("same modulus")
    }

    /// The same members judged against a different field size.
    pub fn with_q(&self, q: u64) -> IndexSet {
        Self::from_words(self.n, q, self.words.clone())
    }

    /// Smallest union of `q`-cyclotomic cosets containing this set.
    pub fn closure(&self) -> IndexSet {
        if self.coset_union {
            return self.clone();
        }
        let mut out = self.clone();
        let mut stack: Vec<usize> = self.members();
        while let Some(u) = stack.pop() {
            let v = mul_mod(u, self.q, self.n);
            if !out.contains(v) {
                out.words[v / 64] |= 1 << (v % 64);
                stack.push(v);
            }
        }
        Self::from_words(self.n, self.q, out.words)
    }

    /// `{-i : i in self}`.
    pub fn negate(&self) -> IndexSet {
        let n = self.n;
        let mut words = vec![0u64; self.words.len()];
        for u in self.iter() {
            let v = (n - u) % n;
            words[v / 64] |= 1 << (v % 64);
        }
        Self::from_words(n, self.q, words)
    }

    /// `{i + j : i in self, j in other}` in `Z/nZ`.
    pub fn sumset(&self, other: &IndexSet) -> Result<IndexSet> {
        self.check_compatible(other)?;
        let (small, large) = if self.len <= other.len {
            (self, other)
        } else {
            (other, self)
        };
        let n = self.n;
        let full = IndexSet::full(n, self.q);
        let mut words = vec![0u64; self.words.len()];
        for a in small.iter() {
            or_rotated(&mut words, &large.words, n, a);
            if words == full.words {
                break;
            }
        }
        let out = Self::from_words(n, self.q, words);
        if self.coset_union && other.coset_union {
            assert!(out.coset_union, "sumset of coset unions must be a coset union");
        }
        Ok(out)
    }

    /// Size of the smallest cyclic interval containing the set.
    pub fn amplitude(&self) -> Result<usize> {
        let first = self.min().ok_or(Error::EmptySet)?;
        let mut prev = first;
        let mut longest_gap = 0;
        for u in self.iter().skip(1) {
            longest_gap = longest_gap.max(u - prev - 1);
            prev = u;
        }
        longest_gap = longest_gap.max(first + self.n - prev - 1);
        Ok(self.n - longest_gap)
    }
}

fn mul_mod(u: usize, q: u64, n: usize) -> usize {
    ((u as u128 * q as u128) % n as u128) as usize
}

/// Bits `start .. start + len` of `src` (no wrap-around), `len <= 64`.
fn read_linear(src: &[u64], start: usize, len: usize) -> u64 {
    if len == 0 {
        return 0;
    }
    let (wi, off) = (start / 64, start % 64);
    let mut v = src[wi] >> off;
    if off > 0 && wi + 1 < src.len() {
        v |= src[wi + 1] << (64 - off);
    }
    if len < 64 {
        v &= (1u64 << len) - 1;
    }
    v
}

fn read_cyclic(src: &[u64], n: usize, start: usize, len: usize) -> u64 {
    if start + len <= n {
        read_linear(src, start, len)
    } else {
        let first = n - start;
        read_linear(src, start, first) | (read_linear(src, 0, len - first) << first)
    }
}

/// `dst |= src` rotated up by `shift` positions modulo `n`.
fn or_rotated(dst: &mut [u64], src: &[u64], n: usize, shift: usize) {
    for (w, slot) in dst.iter_mut().enumerate() {
        let lo = w * 64;
        let len = 64.min(n - lo);
        let start = (lo + n - shift % n) % n;
        *slot |= read_cyclic(src, n, start, len);
    }
}

/// The `q`-cyclotomic coset `{u q^j mod n}`.
pub fn coset(u: usize, q: u64, n: usize) -> IndexSet {
    IndexSet::new(n, q, [u % n]).expect("in range").closure()
}

/// All `q`-cyclotomic cosets of `Z/nZ`, ordered by smallest member.
pub fn all_cosets(q: u64, n: usize) -> Vec<IndexSet> {
    let mut seen = IndexSet::empty(n, q);
    let mut out = Vec::new();
    for u in 0..n {
        if seen.contains(u) {
            continue;
        }
        let c = coset(u, q, n);
        seen = seen.union(&c).expect("same modulus");
        out.push(c);
    }
    out
}

/// Every union of `q`-cyclotomic cosets of `Z/nZ`, indexed by the bitmask over
/// [`all_cosets`]. Only sensible for a small number of cosets.
pub fn all_coset_unions(q: u64, n: usize) -> Vec<IndexSet> {
    let cosets = all_cosets(q, n);
    assert!(cosets.len() < 24, "too many cosets to enumerate unions");
    (0u32..1 << cosets.len())
        .map(|mask| {
            cosets
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .fold(IndexSet::empty(n, q), |acc, (_, c)| acc.union(c).unwrap())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(n: usize, q: u64, m: &[usize]) -> IndexSet {
        IndexSet::new(n, q, m.iter().copied()).unwrap()
    }

    #[test]
    fn coset_examples() {
        assert_eq!(coset(1, 2, 15).members(), vec![1, 2, 4, 8]);
        assert_eq!(coset(0, 2, 15).members(), vec![0]);
        assert_eq!(coset(5, 2, 15).members(), vec![5, 10]);
        assert_eq!(all_cosets(2, 15).len(), 5);
        assert_eq!(all_cosets(2, 31).len(), 7);
    }

    #[test]
    fn closure_examples() {
        assert_eq!(set(7, 2, &[1]).closure().members(), vec![1, 2, 4]);
        let closed = set(7, 2, &[0, 1, 2, 4]);
        assert!(closed.is_coset_union());
        assert_eq!(closed.closure(), closed);
        assert_eq!(
            set(15, 2, &[3, 5]).closure().members(),
            vec![3, 5, 6, 9, 10, 12]
        );
    }

    #[test]
    fn sumset_examples() {
        let a = set(7, 2, &[0, 1]);
        assert_eq!(a.sumset(&a).unwrap().members(), vec![0, 1, 2]);
        let h = set(7, 2, &[0, 1, 2, 4]);
        assert!(h.sumset(&h).unwrap().is_full());
        let zero = set(7, 2, &[0]);
        assert_eq!(zero.sumset(&h).unwrap(), h);
        assert_eq!(
            h.sumset(&set(15, 2, &[0])).unwrap_err(),
            Error::ModulusMismatch(7, 15)
        );
    }

    #[test]
    fn amplitude_examples() {
        assert_eq!(set(31, 2, &[0, 1, 2, 4, 8, 16]).amplitude().unwrap(), 17);
        assert_eq!(set(31, 2, &[9]).amplitude().unwrap(), 1);
        assert_eq!(IndexSet::full(13, 2).amplitude().unwrap(), 13);
        assert_eq!(IndexSet::empty(13, 2).amplitude().unwrap_err(), Error::EmptySet);
        // wrap-around interval {29, 30, 0, 1}
        assert_eq!(set(31, 2, &[0, 1, 29, 30]).amplitude().unwrap(), 4);
    }

    #[test]
    fn negate_examples() {
        assert_eq!(set(7, 2, &[1, 2, 4]).negate().members(), vec![3, 5, 6]);
        assert_eq!(set(7, 2, &[0]).negate().members(), vec![0]);
    }

    #[test]
    fn closure_axioms_exhaustive_small() {
        for n in [5usize, 7, 9, 11, 13] {
            for mask in 0u32..1 << n {
                let a = IndexSet::new(n, 2, (0..n).filter(|i| mask >> i & 1 == 1)).unwrap();
                let c = a.closure();
                assert!(a.is_subset(&c));
                assert_eq!(c.closure(), c);
                assert!(c.is_coset_union());
            }
        }
    }

    #[test]
    fn sumset_of_closures_is_closed() {
        for q in [2u64, 3] {
            for n in (2..=63usize).filter(|n| crate::algebra::gcd(*n as u64, q) == 1) {
                let cosets = all_cosets(q, n);
                for (i, a) in cosets.iter().enumerate() {
                    for b in cosets.iter().skip(i) {
                        assert!(a.sumset(b).unwrap().is_coset_union());
                    }
                }
            }
        }
    }

    fn arb_set() -> impl Strategy<Value = IndexSet> {
        (1usize..130).prop_flat_map(|n| {
            proptest::collection::vec(0..n, 0..40)
                .prop_map(move |m| IndexSet::new(n, 2, m).unwrap())
        })
    }

    proptest! {
        #[test]
        fn sumset_matches_pairwise_sums(a in arb_set(), seed in any::<u64>()) {
            let n = a.n();
            let b = IndexSet::new(n, 2, (0..n).filter(|i| (seed >> (i % 64)) & 1 == 1)).unwrap();
            let expected = IndexSet::new(
                n, 2, a.iter().flat_map(|i| b.iter().map(move |j| (i + j) % n))).unwrap();
            prop_assert_eq!(a.sumset(&b).unwrap(), expected);
        }

        #[test]
        fn amplitude_properties(a in arb_set()) {
            prop_assume!(!a.is_empty());
            let amp = a.amplitude().unwrap();
            prop_assert!(amp <= 1 + a.max().unwrap());
            prop_assert!(amp <= a.n());
            let brute = (1..=a.n()).find(|&len| (0..a.n()).any(|c| {
                a.iter().all(|u| (u + a.n() - c) % a.n() < len)
            })).unwrap();
            prop_assert_eq!(amp, brute);
        }

        #[test]
        fn sumset_not_smaller(a in arb_set()) {
            prop_assume!(!a.is_empty());
            prop_assert!(a.sumset(&a).unwrap().len() >= a.len());
        }

        #[test]
        fn negate_is_involution(a in arb_set()) {
            prop_assert_eq!(a.negate().negate(), a);
        }

        #[test]
        fn closure_monotone(a in arb_set(), extra in 0usize..130) {
            let n = a.n();
            let b = a.union(&IndexSet::new(n, 2, [extra % n]).unwrap()).unwrap();
            prop_assert!(a.closure().is_subset(&b.closure()));
        }
    }
}
