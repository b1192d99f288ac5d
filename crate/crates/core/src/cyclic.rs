//! Cyclic codes described by their generating set.
//!
//! A code of length `n` over `GF(q)` is fixed by a coset-closed set
//! `I ⊆ Z/nZ`; its defining set is the complement `J` and its generator is
//! `g = prod_{j in J} (X - beta^j)`. The square has generating set `I + I`.
//!
//! Two oracles reconstruct the same objects without using that description:
//! [`subfield_subcode`] solves for the base-field evaluation code directly, and
//! [`gcd_square_generator`] gets the square's generator from a gcd of
//! coordinatewise products.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{ExtensionCtx, FieldCtx, FqElem, Poly};
use crate::cyclotomic::{all_cosets, IndexSet};
use crate::linear::{nullspace, GeneratorMatrix};
use crate::{Error, Result};

/// What to do with a generating set that is not a union of cosets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Closure {
    /// Reject it.
    Require,
    /// Replace it by its closure.
    Close,
}

#[derive(Clone, Debug)]
pub struct CyclicCodeSpec {
    ext: Arc<ExtensionCtx>,
    generating: IndexSet,
    defining: IndexSet,
    g: Poly,
}

impl PartialEq for CyclicCodeSpec {
    fn eq(&self, other: &Self) -> bool {
        self.generating == other.generating && self.g == other.g
    }
}

impl Eq for CyclicCodeSpec {}

/// Dimensions and amplitude lower bounds for a code and its square.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: usize,
    pub dim_c: usize,
    pub d_c_lower: usize,
    pub dim_csq: usize,
    pub d_csq_lower: usize,
    /// Upper cap on the true square distance: `max(1, n - 2 dim + 2)`.
    pub singleton_cap: usize,
}

impl CyclicCodeSpec {
    pub fn from_generating_set(
        ext: Arc<ExtensionCtx>,
        set: &IndexSet,
        closure: Closure,
    ) -> Result<Self> {
        let n = ext.n();
        let q = ext.base().size();
        if set.n() != n {
            return Err(Error::ModulusMismatch(set.n(), n));
        }
        let set = set.with_q(q);
        let generating = if set.is_coset_union() {
            set
        } else {
            match closure {
                Closure::Require => return Err(Error::NotCosetUnion),
                Closure::Close => set.closure(),
            }
        };
        let defining = generating.complement();
        let g = product_of_minimal_polys(&ext, &defining);
        if g.degree() != Some(defining.len()) {
            return Err(Error::Internal("generator degree differs from |J|".into()));
        }
        Ok(CyclicCodeSpec {
            ext,
            generating,
            defining,
            g,
        })
    }

    /// Build the splitting field as well; convenient for one-off codes.
    pub fn over(q: &Arc<FieldCtx>, set: &IndexSet, closure: Closure) -> Result<Self> {
        let ext = ExtensionCtx::new(q.clone(), set.n())?;
        Self::from_generating_set(ext, set, closure)
    }

    pub fn ext(&self) -> &Arc<ExtensionCtx> {
        &self.ext
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        self.ext.base()
    }

    pub fn n(&self) -> usize {
        self.ext.n()
    }

    pub fn dim(&self) -> usize {
        self.generating.len()
    }

    pub fn is_zero_code(&self) -> bool {
        self.generating.is_empty()
    }

    /// The generating set `I`.
    pub fn generating_set(&self) -> &IndexSet {
        &self.generating
    }

    /// The defining set `J`, the complement of `I`.
    pub fn defining_set(&self) -> &IndexSet {
        &self.defining
    }

    /// Generator polynomial over the base field. `X^n - 1` for the zero code.
    pub fn generator(&self) -> &Poly {
        &self.g
    }

    /// Rows `g, gX, ..., gX^(dim-1)`.
    pub fn generator_matrix(&self) -> GeneratorMatrix {
        let n = self.n();
        let g = self.g.to_vec(n);
        let rows = (0..self.dim()).map(|i| {
            let mut r = vec![FqElem::ZERO; n];
            r[i..].copy_from_slice(&g[..n - i]);
            r
        });
        GeneratorMatrix::from_rows(self.field().clone(), n, rows)
            .expect("rows have the right length")
    }

    /// The Schur square, with generating set `I + I`.
    pub fn square(&self) -> CyclicCodeSpec {
        let sum = self
            .generating
            .sumset(&self.generating)
            .expect("same modulus");
        assert!(sum.is_coset_union(), "I + I must be coset-closed");
        CyclicCodeSpec::from_generating_set(self.ext.clone(), &sum, Closure::Require)
            .expect("closed generating set")
    }

    /// The dual code, with generating set `-J`.
    pub fn dual(&self) -> CyclicCodeSpec {
        CyclicCodeSpec::from_generating_set(self.ext.clone(), &self.defining.negate(), Closure::Require)
            .expect("negation preserves closure")
    }

    pub fn bounds(&self) -> Result<BoundsReport> {
        if self.is_zero_code() {
            return Err(Error::ZeroCode);
        }
        let n = self.n();
        let sq = self.generating.sumset(&self.generating)?;
        let dim = self.dim();
        Ok(BoundsReport {
            n,
            dim_c: dim,
            d_c_lower: n - self.generating.amplitude()? + 1,
            dim_csq: sq.len(),
            d_csq_lower: n - sq.amplitude()? + 1,
            singleton_cap: (n as i64 - 2 * dim as i64 + 2).max(1) as usize,
        })
    }

    /// Parity check: `c(beta^j) = 0` for one representative `j` of every coset in `J`.
    pub fn contains(&self, word: &[FqElem]) -> bool {
        let n = self.n();
        if word.len() != n {
            return false;
        }
        let big = self.ext.big();
        let lifted: Vec<FqElem> = word.iter().map(|&c| self.ext.embed(c)).collect();
        for coset in all_cosets(self.field().size(), n) {
            let j = coset.min().expect("cosets are nonempty");
            if !self.defining.contains(j) {
                continue;
            }
            let val = lifted
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .fold(FqElem::ZERO, |acc, (i, &c)| {
                    big.add(acc, big.mul(c, self.ext.beta_pow((i * j) as i64)))
                });
            if !val.is_zero() {
                return false;
            }
        }
        true
    }
}

fn product_of_minimal_polys(ext: &ExtensionCtx, set: &IndexSet) -> Poly {
    let base = ext.base().clone();
    all_cosets(base.size(), ext.n())
        .into_iter()
        .filter(|c| set.contains(c.min().expect("nonempty")))
        .fold(Poly::one(base), |acc, c| {
            acc.mul(&ext.minimal_poly(c.min().unwrap()))
        })
}

/// `B(M)` restricted to the base field: words `(f(1), f(beta), ..., f(beta^(n-1)))`
/// over polynomials `f` supported on `M` whose evaluations all lie in `GF(q)`.
///
/// Each coefficient of `f` is written as `sum_l a_{i,l} omega^l` with `a_{i,l}`
/// in `GF(q)`; the off-base coordinates of every evaluation give the linear
/// constraints.
pub fn subfield_subcode(ext: &Arc<ExtensionCtx>, m: &IndexSet) -> Result<GeneratorMatrix> {
    let n = ext.n();
    if m.n() != n {
        return Err(Error::ModulusMismatch(m.n(), n));
    }
    let base = ext.base();
    let big = ext.big();
    let r = ext.r() as usize;
    let members = m.members();
    let unknowns = members.len() * r;
    let omega_pows: Vec<FqElem> = (0..r as u64).map(|l| big.pow(ext.omega(), l)).collect();

    // contrib[j][u] = flattened evaluation at beta^j of unknown u.
    let contrib: Vec<Vec<Vec<FqElem>>> = (0..n)
        .map(|j| {
            members
                .iter()
                .flat_map(|&i| {
                    let b = ext.beta_pow((i * j) as i64);
                    omega_pows.iter().map(move |&w| ext.flatten(big.mul(w, b)))
                })
                .collect()
        })
        .collect();

    let equations = (0..n).flat_map(|j| {
        let c = &contrib[j];
        (1..r).map(move |t| c.iter().map(|v| v[t]).collect::<Vec<_>>())
    });
    let kernel = nullspace(base, equations, unknowns);
    let rows = kernel.iter().map(|a| {
        (0..n)
            .map(|j| {
                contrib[j]
                    .iter()
                    .zip(a)
                    .fold(FqElem::ZERO, |acc, (v, &x)| base.add(acc, base.mul(x, v[0])))
            })
            .collect::<Vec<_>>()
    });
    GeneratorMatrix::from_rows(base.clone(), n, rows)
}

fn cyclic_shift(v: &[FqElem], j: usize) -> Vec<FqElem> {
    let n = v.len();
    (0..n).map(|i| v[(i + n - j % n) % n]).collect()
}

/// Generator of the square as `gcd(X^n - 1, g * g, g * (gX), ..., g * (gX^(dim-1)))`,
/// where `*` is the coordinatewise product of coefficient vectors and `gX^j` is
/// taken mod `X^n - 1`.
pub fn gcd_square_generator(code: &CyclicCodeSpec) -> Poly {
    let n = code.n();
    let f = code.field().clone();
    let g = code.generator().to_vec(n);
    let mut acc = Poly::x_n_minus_one(f.clone(), n);
    for j in 0..code.dim() {
        let shifted = cyclic_shift(&g, j);
        let prod = g.iter().zip(&shifted).map(|(&a, &b)| f.mul(a, b)).collect();
        let p = Poly::new(f.clone(), prod);
        if !p.is_zero() {
            acc = acc.gcd(&p);
        }
    }
    acc.monic()
}

/// Generator of the smallest cyclic code containing the rows of `code`:
/// the gcd of `X^n - 1` with every row read as a polynomial.
pub fn generator_from_code(code: &GeneratorMatrix) -> Poly {
    let f = code.field().clone();
    code.rows()
        .into_iter()
        .fold(Poly::x_n_minus_one(f.clone(), code.n()), |acc, r| {
            acc.gcd(&Poly::new(f.clone(), r))
        })
        .monic()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclotomic::all_coset_unions;
    use crate::linear::DistanceBudget;

    fn ext(q: u64, n: usize) -> Arc<ExtensionCtx> {
        ExtensionCtx::new(FieldCtx::prime(q).unwrap(), n).unwrap()
    }

    fn spec(q: u64, n: usize, members: &[usize]) -> CyclicCodeSpec {
        let set = IndexSet::new(n, q, members.iter().copied()).unwrap();
        CyclicCodeSpec::from_generating_set(ext(q, n), &set, Closure::Require).unwrap()
    }

    fn hamming() -> CyclicCodeSpec {
        spec(2, 7, &[0, 1, 2, 4])
    }

    #[test]
    fn hamming_generator() {
        let h = hamming();
        assert_eq!(h.generator().degree(), Some(3));
        assert_eq!(h.dim(), 4);
        let g = h.generator().clone();
        assert!(Poly::x_n_minus_one(g.field().clone(), 7).rem(&g).unwrap().is_zero());
        let d = h.generator_matrix().min_distance(&DistanceBudget::default()).unwrap();
        assert_eq!(d.value, 3);
    }

    #[test]
    fn full_and_zero_codes() {
        let full = spec(2, 7, &[0, 1, 2, 3, 4, 5, 6]);
        assert_eq!(full.generator().degree(), Some(0));
        assert_eq!(full.bounds().unwrap().d_c_lower, 1);
        let zero = full.dual();
        assert!(zero.is_zero_code());
        assert_eq!(zero.generator(), &Poly::x_n_minus_one(full.field().clone(), 7));
        assert_eq!(zero.bounds().unwrap_err(), Error::ZeroCode);
        assert_eq!(zero.dual(), full);
    }

    #[test]
    fn closure_flag() {
        let set = IndexSet::new(7, 2, [1]).unwrap();
        assert_eq!(
            CyclicCodeSpec::from_generating_set(ext(2, 7), &set, Closure::Require).unwrap_err(),
            Error::NotCosetUnion
        );
        let c = CyclicCodeSpec::from_generating_set(ext(2, 7), &set, Closure::Close).unwrap();
        assert_eq!(c.generating_set().members(), vec![1, 2, 4]);
    }

    #[test]
    fn squares() {
        assert_eq!(hamming().square().dim(), 7);
        let c = spec(2, 15, &[0, 1, 2, 4, 8]);
        assert_eq!(c.dim(), 5);
        assert_eq!(c.square().dim(), 11);
        assert_eq!(gcd_square_generator(&c).degree(), Some(4));
        let rep = spec(2, 9, &[0]);
        assert_eq!(rep.square(), rep);
        assert_eq!(gcd_square_generator(&rep), *rep.generator());
        assert_eq!(gcd_square_generator(&hamming()).degree(), Some(0));
    }

    #[test]
    fn dual_of_hamming() {
        let d = hamming().dual();
        assert_eq!(d.generating_set().members(), vec![1, 2, 4]);
        assert_eq!(d.dim(), 3);
        assert_eq!(d.dual(), hamming());
    }

    #[test]
    fn dual_is_orthogonal_and_involutive() {
        for (q, n) in [(2u64, 7usize), (2, 15), (2, 31), (3, 8), (3, 13)] {
            let e = ext(q, n);
            for set in all_coset_unions(q, n) {
                let c = CyclicCodeSpec::from_generating_set(e.clone(), &set, Closure::Require).unwrap();
                let d = c.dual();
                assert_eq!(d.dual(), c);
                assert_eq!(c.dim() + d.dim(), n);
                let f = c.field();
                for a in c.generator_matrix().rows() {
                    for b in d.generator_matrix().rows() {
                        let ip = a
                            .iter()
                            .zip(&b)
                            .fold(FqElem::ZERO, |acc, (&x, &y)| f.add(acc, f.mul(x, y)));
                        assert!(ip.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn bounds_table_one_row() {
        let b = spec(2, 31, &[0, 1, 2, 4, 8, 16]).bounds().unwrap();
        assert_eq!((b.dim_c, b.d_c_lower, b.dim_csq, b.d_csq_lower), (6, 15, 16, 7));
    }

    #[test]
    fn subfield_subcode_examples() {
        let e = ext(2, 7);
        let h = hamming();
        let b = subfield_subcode(&e, &h.generating_set().negate()).unwrap();
        assert_eq!(b.dim(), 4);
        assert_eq!(b, h.generator_matrix());
        let rep = subfield_subcode(&e, &IndexSet::new(7, 2, [0]).unwrap()).unwrap();
        assert_eq!(rep.dim(), 1);
        assert_eq!(subfield_subcode(&e, &IndexSet::full(7, 2)).unwrap().dim(), 7);
    }

    #[test]
    fn contains_matches_generator_matrix() {
        let c = spec(2, 15, &[0, 1, 2, 4, 8]);
        for row in c.generator_matrix().rows() {
            assert!(c.contains(&row));
        }
        let f = c.field();
        let mut e = vec![FqElem::ZERO; 15];
        e[3] = f.one();
        assert!(!c.contains(&e));
    }

    #[test]
    fn three_oracles_agree() {
        for n in [7usize, 15, 31] {
            let e = ext(2, n);
            for set in all_coset_unions(2, n) {
                let c = CyclicCodeSpec::from_generating_set(e.clone(), &set, Closure::Require).unwrap();
                let g = c.generator_matrix();
                assert_eq!(subfield_subcode(&e, &set.negate()).unwrap(), g);
                let sq = c.square();
                let oracle = g.schur_square();
                assert_eq!(oracle.dim(), sq.dim());
                assert_eq!(gcd_square_generator(&c), *sq.generator());
                assert_eq!(generator_from_code(&oracle), *sq.generator());
            }
        }
    }

    #[test]
    fn ternary_and_quaternary_oracles_agree() {
        let f4 = FieldCtx::gf(2, 2).unwrap();
        for (f, n) in [(FieldCtx::prime(3).unwrap(), 8usize), (FieldCtx::prime(3).unwrap(), 13), (f4, 5), (FieldCtx::gf(2, 2).unwrap(), 9)] {
            let e = ExtensionCtx::new(f.clone(), n).unwrap();
            for set in all_coset_unions(f.size(), n) {
                let c = CyclicCodeSpec::from_generating_set(e.clone(), &set, Closure::Require).unwrap();
                let g = c.generator_matrix();
                assert_eq!(subfield_subcode(&e, &set.negate()).unwrap(), g);
                assert_eq!(g.schur_square().dim(), c.square().dim());
                assert_eq!(gcd_square_generator(&c), *c.square().generator());
            }
        }
    }

    #[test]
    fn bch_bound_holds_where_distance_is_exact() {
        let budget = DistanceBudget::default();
        for n in [7usize, 15] {
            let e = ext(2, n);
            for set in all_coset_unions(2, n).into_iter().skip(1) {
                let c = CyclicCodeSpec::from_generating_set(e.clone(), &set, Closure::Require).unwrap();
                let b = c.bounds().unwrap();
                let d = c.generator_matrix().min_distance(&budget).unwrap();
                assert!(b.d_c_lower <= d.value);
                let dsq = c.square().generator_matrix().min_distance(&budget).unwrap();
                assert!(b.d_csq_lower <= dsq.value);
                assert!(dsq.value <= b.singleton_cap);
                assert!(c.dim() <= b.dim_csq && b.dim_csq <= c.dim() * (c.dim() + 1) / 2);
            }
        }
    }
}
