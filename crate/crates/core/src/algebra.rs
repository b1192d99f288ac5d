//! Finite fields `GF(p^e)`, dense polynomials over them, and the splitting
//! field of `X^n - 1` over `GF(q)`.
//!
//! Elements are stored packed: the coefficient of `x^i` in the polynomial
//! basis is the `i`-th base-`p` digit of the packed integer. Multiplication has
//! three routes that must agree: the generic digit-vector path, a carry-less
//! path for characteristic 2, and log/exp tables for small fields.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use crate::cyclotomic::coset;
use crate::{Error, Result};

/// Largest base field accepted from callers.
pub const MAX_BASE_FIELD: u64 = 1 << 16;
/// Fields up to this size get log/exp tables.
const TABLE_LIMIT: u64 = 1 << 16;
/// Splitting fields are limited so that packed elements fit comfortably in a `u64`.
const MAX_FIELD: u64 = 1 << 62;
/// Default cap on the degree `r` of the splitting field over the base field.
pub const DEFAULT_EXTENSION_CAP: u32 = 24;

/// An element of some [`FieldCtx`], in packed polynomial-basis form.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FqElem(u64);

impl FqElem {
    pub const ZERO: FqElem = FqElem(0);
    pub const ONE: FqElem = FqElem(1);

    pub fn value(self) -> u64 {
        self.0
    }

    pub fn is_zero(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for FqElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug)]
struct LogTables {
    exp: Vec<u64>,
    log: Vec<u32>,
}

/// The field `GF(p^e)` with a fixed monic irreducible modulus.
pub struct FieldCtx {
    p: u64,
    e: u32,
    modulus: Vec<u64>,
    size: u64,
    bin_modulus: u64,
    tables: Option<LogTables>,
}

impl fmt::Debug for FieldCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldCtx")
            .field("p", &self.p)
            .field("e", &self.e)
            .field("modulus", &self.modulus)
            .finish()
    }
}

impl PartialEq for FieldCtx {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.e == other.e && self.modulus == other.modulus
    }
}

impl Eq for FieldCtx {}

impl FieldCtx {
    /// The prime field `GF(p)`.
    pub fn prime(p: u64) -> Result<Arc<Self>> {
        Self::gf(p, 1)
    }

    /// `GF(p^e)` with the canonical modulus: the least primitive polynomial of
    /// degree `e` over `GF(p)`.
    pub fn gf(p: u64, e: u32) -> Result<Arc<Self>> {
        check_size(p, e, MAX_BASE_FIELD)?;
        Self::canonical(p, e, MAX_BASE_FIELD).map(Arc::new)
    }

    /// The canonical field with `q` elements; `q` must be a prime power.
    pub fn of_order(q: u64) -> Result<Arc<Self>> {
        let not_power = || Error::InvalidParameters(format!("{q} is not a prime power"));
        let p = *prime_factors(q).first().ok_or_else(not_power)?;
        let (mut rest, mut e) = (q, 0u32);
        while rest % p == 0 {
            rest /= p;
            e += 1;
        }
        if rest != 1 {
            return Err(not_power());
        }
        Self::gf(p, e)
    }

    /// `GF(p^e)` with a caller-supplied modulus (coefficients low to high, monic).
    pub fn with_modulus(p: u64, modulus: Vec<u64>) -> Result<Arc<Self>> {
        if modulus.len() < 2 {
            return Err(Error::BadModulus("degree must be at least 1".into()));
        }
        let e = (modulus.len() - 1) as u32;
        check_size(p, e, MAX_BASE_FIELD)?;
        if modulus[e as usize] != 1 {
            return Err(Error::BadModulus("modulus must be monic".into()));
        }
        if modulus.iter().any(|&c| c >= p) {
            return Err(Error::BadModulus(format!("coefficients must lie in [0, {p})")));
        }
        if !is_irreducible(p, &modulus) {
            return Err(Error::ReducibleModulus(p));
        }
        Ok(Arc::new(Self::build(p, modulus)))
    }

    fn canonical(p: u64, e: u32, limit: u64) -> Result<Self> {
        type ModulusCache = Mutex<HashMap<(u64, u32), Vec<u64>>>;
        check_size(p, e, limit)?;
        static CACHE: OnceLock<ModulusCache> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(m) = cache.lock().unwrap().get(&(p, e)) {
            return Ok(Self::build(p, m.clone()));
        }
        let modulus = least_primitive_poly(p, e);
        cache.lock().unwrap().insert((p, e), modulus.clone());
        Ok(Self::build(p, modulus))
    }

    fn build(p: u64, modulus: Vec<u64>) -> Self {
        let e = (modulus.len() - 1) as u32;
        let size = p.pow(e);
        let bin_modulus = if p == 2 {
            modulus
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &c)| acc | (c << i))
        } else {
            0
        };
        let mut ctx = FieldCtx {
            p,
            e,
            modulus,
            size,
            bin_modulus,
            tables: None,
        };
        if size <= TABLE_LIMIT {
            ctx.tables = Some(ctx.build_tables());
        }
        ctx
    }

    fn build_tables(&self) -> LogTables {
        let order = self.size - 1;
        let factors = prime_factors(order);
        let generator = (1..self.size)
            .map(FqElem)
            .find(|&g| self.has_full_order(g, order, &factors))
            .expect("the multiplicative group of a finite field is cyclic");
        let mut exp = Vec::with_capacity(order as usize);
        let mut log = vec![0u32; self.size as usize];
        let mut cur = FqElem::ONE;
        for i in 0..order {
            exp.push(cur.0);
            log[cur.0 as usize] = i as u32;
            cur = self.mul_raw(cur, generator);
        }
        LogTables { exp, log }
    }

    fn has_full_order(&self, g: FqElem, order: u64, factors: &[u64]) -> bool {
        self.pow_raw(g, order) == FqElem::ONE
            && factors
                .iter()
                .all(|&l| self.pow_raw(g, order / l) != FqElem::ONE)
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.e
    }

    /// Number of elements `q = p^e`.
    pub fn size(&self) -> u64 {
        self.size
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn zero(&self) -> FqElem {
        FqElem::ZERO
    }

    pub fn one(&self) -> FqElem {
        FqElem::ONE
    }

    /// Interpret a packed value as an element, checking the range.
    pub fn elem(&self, value: u64) -> Result<FqElem> {
        if value < self.size {
            Ok(FqElem(value))
        } else {
            Err(Error::NotAnElement {
                value,
                size: self.size,
            })
        }
    }

    /// The image of an integer under `Z -> GF(p) -> GF(q)`.
    pub fn from_int(&self, v: i64) -> FqElem {
        FqElem(v.rem_euclid(self.p as i64) as u64)
    }

    pub fn from_digits(&self, digits: &[u64]) -> FqElem {
        debug_assert!(digits.len() <= self.e as usize);
        FqElem(digits.iter().rev().fold(0, |acc, &d| acc * self.p + d % self.p))
    }

    /// Coefficients of `a` in the polynomial basis, low to high, always `e` long.
    pub fn digits(&self, a: FqElem) -> Vec<u64> {
        let mut out = Vec::with_capacity(self.e as usize);
        let mut v = a.0;
        for _ in 0..self.e {
            out.push(v % self.p);
            v /= self.p;
        }
        out
    }

    pub fn elements(&self) -> impl Iterator<Item = FqElem> {
        (0..self.size).map(FqElem)
    }

    /// The class of `x` in `GF(p)[x]/(modulus)`. Primitive for canonical fields.
    pub fn x_elem(&self) -> FqElem {
        if self.e >= 2 {
            FqElem(self.p)
        } else {
            FqElem((self.p - self.modulus[0]) % self.p)
        }
    }

    pub fn add(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.p == 2 {
            return FqElem(a.0 ^ b.0);
        }
        self.add_generic(a, b)
    }

    pub fn add_generic(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.e == 1 {
            return FqElem((a.0 + b.0) % self.p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.e {
            out += ((x % self.p + y % self.p) % self.p) * scale;
            x /= self.p;
            y /= self.p;
            scale *= self.p;
        }
        FqElem(out)
    }

    pub fn neg(&self, a: FqElem) -> FqElem {
        if self.p == 2 {
            return a;
        }
        let mut x = a.0;
        let mut out = 0;
        let mut scale = 1;
        for _ in 0..self.e {
            out += ((self.p - x % self.p) % self.p) * scale;
            x /= self.p;
            scale *= self.p;
        }
        FqElem(out)
    }

    pub fn sub(&self, a: FqElem, b: FqElem) -> FqElem {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FqElem, b: FqElem) -> FqElem {
        if a.0 == 0 || b.0 == 0 {
            return FqElem::ZERO;
        }
        if let Some(t) = &self.tables {
            let order = t.exp.len();
            let idx = t.log[a.0 as usize] as usize + t.log[b.0 as usize] as usize;
            let idx = if idx >= order { idx - order } else { idx };
            return FqElem(t.exp[idx]);
        }
        self.mul_raw(a, b)
    }

    /// Multiplication without tables: carry-less for `p = 2`, generic otherwise.
    fn mul_raw(&self, a: FqElem, b: FqElem) -> FqElem {
        if self.p == 2 {
            self.mul_binary(a, b)
        } else {
            self.mul_generic(a, b)
        }
    }

    /// Schoolbook multiplication on digit vectors followed by reduction.
    pub fn mul_generic(&self, a: FqElem, b: FqElem) -> FqElem {
        let e = self.e as usize;
        let (da, db) = (self.digits(a), self.digits(b));
        let mut prod = vec![0u64; 2 * e - 1];
        for (i, &x) in da.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in db.iter().enumerate() {
                prod[i + j] = (prod[i + j] + x * y) % self.p;
            }
        }
        for top in (e..prod.len()).rev() {
            let c = prod[top];
            if c == 0 {
                continue;
            }
            for j in 0..e {
                let sub = c * self.modulus[j] % self.p;
                let slot = &mut prod[top - e + j];
                *slot = (*slot + self.p - sub) % self.p;
            }
            prod[top] = 0;
        }
        self.from_digits(&prod[..e])
    }

    /// Carry-less multiplication for characteristic 2.
    pub fn mul_binary(&self, a: FqElem, b: FqElem) -> FqElem {
        debug_assert_eq!(self.p, 2);
        let e = self.e;
        let mut prod: u128 = 0;
        let mut x = a.0;
        let y = b.0 as u128;
        let mut shift = 0;
        while x != 0 {
            if x & 1 == 1 {
                prod ^= y << shift;
            }
            x >>= 1;
            shift += 1;
        }
        if e == 1 {
            return FqElem((prod & 1) as u64);
        }
        for bit in (e..(2 * e - 1)).rev() {
            if (prod >> bit) & 1 == 1 {
                prod ^= (self.bin_modulus as u128) << (bit - e);
            }
        }
        FqElem(prod as u64)
    }

    fn pow_raw(&self, a: FqElem, mut exp: u64) -> FqElem {
        let mut base = a;
        let mut acc = FqElem::ONE;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            exp >>= 1;
        }
        acc
    }

    pub fn pow(&self, a: FqElem, exp: u64) -> FqElem {
        if let Some(t) = &self.tables {
            if a.0 == 0 {
                return if exp == 0 { FqElem::ONE } else { FqElem::ZERO };
            }
            let order = t.exp.len() as u128;
            let idx = (t.log[a.0 as usize] as u128 * exp as u128) % order;
            return FqElem(t.exp[idx as usize]);
        }
        self.pow_raw(a, exp)
    }

    pub fn inv(&self, a: FqElem) -> Result<FqElem> {
        if a.0 == 0 {
            return Err(Error::InverseOfZero);
        }
        if let Some(t) = &self.tables {
            let order = t.exp.len();
            let l = t.log[a.0 as usize] as usize;
            return Ok(FqElem(t.exp[(order - l) % order]));
        }
        Ok(self.pow_raw(a, self.size - 2))
    }

    pub fn div(&self, a: FqElem, b: FqElem) -> Result<FqElem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: FqElem) -> u64 {
        assert!(!a.is_zero(), "zero has no multiplicative order");
        let mut order = self.size - 1;
        for l in prime_factors(order) {
            while order.is_multiple_of(l) && self.pow(a, order / l) == FqElem::ONE {
                order /= l;
            }
        }
        order
    }
}

fn check_size(p: u64, e: u32, limit: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    if e == 0 {
        return Err(Error::ZeroDegree);
    }
    match p.checked_pow(e) {
        Some(size) if size <= limit => Ok(()),
        _ => Err(Error::FieldTooLarge { p, e }),
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// Distinct prime factors, ascending.
pub(crate) fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= m {
        if m.is_multiple_of(d) {
            out.push(d);
            while m.is_multiple_of(d) {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Remainder of `a` modulo the monic-or-not `b` over `GF(p)`; both low to high.
fn prime_poly_rem(p: u64, a: &[u64], b: &[u64]) -> Vec<u64> {
    let mut r = a.to_vec();
    let db = b.len() - 1;
    let lead_inv = mod_pow(b[db], p - 2, p);
    while r.len() > db {
        let top = *r.last().unwrap();
        if top != 0 {
            let c = top * lead_inv % p;
            let off = r.len() - 1 - db;
            for (j, &bj) in b.iter().enumerate() {
                r[off + j] = (r[off + j] + p - c * bj % p) % p;
            }
        }
        r.pop();
    }
    while r.last() == Some(&0) {
        r.pop();
    }
    r
}

fn mod_pow(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

/// Irreducibility by trial division against every monic polynomial of degree `<= e/2`.
pub fn is_irreducible(p: u64, modulus: &[u64]) -> bool {
    let e = modulus.len() - 1;
    if e == 1 {
        return true;
    }
    for d in 1..=e / 2 {
        let count = p.pow(d as u32);
        let mut cand = vec![0u64; d + 1];
        cand[d] = 1;
        for idx in 0..count {
            let mut v = idx;
            for c in cand.iter_mut().take(d) {
                *c = v % p;
                v /= p;
            }
            if prime_poly_rem(p, modulus, &cand).is_empty() {
                return false;
            }
        }
    }
    true
}

/// Least monic primitive polynomial of degree `e` over `GF(p)`, ordered by the
/// packed value `sum c_i p^i`.
fn least_primitive_poly(p: u64, e: u32) -> Vec<u64> {
    let size = p.pow(e);
    let order = size - 1;
    let factors = prime_factors(order);
    for low in 0..size {
        let mut modulus = Vec::with_capacity(e as usize + 1);
        let mut v = low;
        for _ in 0..e {
            modulus.push(v % p);
            v /= p;
        }
        modulus.push(1);
        if modulus[0] == 0 {
            continue;
        }
        let ctx = FieldCtx {
            p,
            e,
            modulus: modulus.clone(),
            size,
            bin_modulus: if p == 2 {
                modulus
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &c)| acc | (c << i))
            } else {
                0
            },
            tables: None,
        };
        if ctx.has_full_order(ctx.x_elem(), order, &factors) && is_irreducible(p, &modulus) {
            return modulus;
        }
    }
    unreachable!("primitive polynomials exist in every degree")
}

/// Dense univariate polynomial over a [`FieldCtx`], coefficients low to high,
/// with no trailing zeros.
#[derive(Clone)]
pub struct Poly {
    field: Arc<FieldCtx>,
    coeffs: Vec<FqElem>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

impl PartialEq for Poly {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Eq for Poly {}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match (i, c.0) {
                (0, v) => write!(f, "{v}")?,
                (1, 1) => write!(f, "X")?,
                (1, v) => write!(f, "{v}*X")?,
                (_, 1) => write!(f, "X^{i}")?,
                (_, v) => write!(f, "{v}*X^{i}")?,
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn new(field: Arc<FieldCtx>, mut coeffs: Vec<FqElem>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { field, coeffs }
    }

    pub fn zero(field: Arc<FieldCtx>) -> Self {
        Poly {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn one(field: Arc<FieldCtx>) -> Self {
        Poly {
            field,
            coeffs: vec![FqElem::ONE],
        }
    }

    /// `c X^deg`.
    pub fn monomial(field: Arc<FieldCtx>, c: FqElem, deg: usize) -> Self {
        let mut coeffs = vec![FqElem::ZERO; deg + 1];
        coeffs[deg] = c;
        Poly::new(field, coeffs)
    }

    /// `X^n - 1`.
    pub fn x_n_minus_one(field: Arc<FieldCtx>, n: usize) -> Self {
        let mut coeffs = vec![FqElem::ZERO; n + 1];
        coeffs[0] = field.neg(FqElem::ONE);
        coeffs[n] = FqElem::ONE;
        Poly::new(field, coeffs)
    }

    /// `prod (X - r)` over the given roots.
    pub fn from_roots(field: Arc<FieldCtx>, roots: impl IntoIterator<Item = FqElem>) -> Self {
        let mut coeffs = vec![FqElem::ONE];
        for r in roots {
            let neg_r = field.neg(r);
            coeffs.push(FqElem::ZERO);
            for i in (0..coeffs.len()).rev() {
                let shifted = if i > 0 { coeffs[i - 1] } else { FqElem::ZERO };
                coeffs[i] = field.add(shifted, field.mul(coeffs[i], neg_r));
            }
        }
        Poly::new(field, coeffs)
    }

    /// Polynomial with small-integer coefficients, e.g. `[1, 1, 0, 1]` for `X^3 + X + 1`.
    pub fn from_ints(field: Arc<FieldCtx>, coeffs: &[i64]) -> Self {
        let c = coeffs.iter().map(|&v| field.from_int(v)).collect();
        Poly::new(field, c)
    }

    pub fn field(&self) -> &Arc<FieldCtx> {
        &self.field
    }

    pub fn coeffs(&self) -> &[FqElem] {
        &self.coeffs
    }

    /// Coefficient of `X^i` (zero past the degree).
    pub fn coeff(&self, i: usize) -> FqElem {
        self.coeffs.get(i).copied().unwrap_or(FqElem::ZERO)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> FqElem {
        self.coeffs.last().copied().unwrap_or(FqElem::ZERO)
    }

    fn same_field(&self, other: &Poly) {
        assert!(
            Arc::ptr_eq(&self.field, &other.field) || self.field == other.field,
            "polynomials over different fields"
        );
    }

    pub fn add(&self, other: &Poly) -> Poly {
        self.same_field(other);
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|i| self.field.add(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::new(self.field.clone(), c)
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.same_field(other);
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|i| self.field.sub(self.coeff(i), other.coeff(i)))
            .collect();
        Poly::new(self.field.clone(), c)
    }

    pub fn scale(&self, c: FqElem) -> Poly {
        let v = self.coeffs.iter().map(|&a| self.field.mul(a, c)).collect();
        Poly::new(self.field.clone(), v)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        self.same_field(other);
        if self.is_zero() || other.is_zero() {
            return Poly::zero(self.field.clone());
        }
        let f = &self.field;
        let mut out = vec![FqElem::ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Poly::new(f.clone(), out)
    }

    /// Quotient and remainder with `deg(remainder) < deg(divisor)`.
    pub fn divmod(&self, divisor: &Poly) -> Result<(Poly, Poly)> {
        self.same_field(divisor);
        let db = divisor.degree().ok_or(Error::DivisionByZero)?;
        let f = &self.field;
        let lead_inv = f.inv(divisor.lead())?;
        let mut rem = self.coeffs.clone();
        if rem.len() <= db {
            return Ok((Poly::zero(f.clone()), self.clone()));
        }
        let mut quot = vec![FqElem::ZERO; rem.len() - db];
        for top in (db..rem.len()).rev() {
            let c = rem[top];
            if c.is_zero() {
                continue;
            }
            let factor = f.mul(c, lead_inv);
            quot[top - db] = factor;
            for (j, &d) in divisor.coeffs.iter().enumerate() {
                let slot = &mut rem[top - db + j];
                *slot = f.sub(*slot, f.mul(factor, d));
            }
        }
        rem.truncate(db);
        Ok((Poly::new(f.clone(), quot), Poly::new(f.clone(), rem)))
    }

    pub fn rem(&self, divisor: &Poly) -> Result<Poly> {
        Ok(self.divmod(divisor)?.1)
    }

    /// Scale to leading coefficient one; the zero polynomial is returned unchanged.
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        let inv = self.field.inv(self.lead()).expect("nonzero lead");
        self.scale(inv)
    }

    /// Monic greatest common divisor; `gcd(0, 0) = 0`.
    pub fn gcd(&self, other: &Poly) -> Poly {
        self.same_field(other);
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b).expect("b is nonzero");
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn eval(&self, x: FqElem) -> FqElem {
        self.coeffs
            .iter()
            .rev()
            .fold(FqElem::ZERO, |acc, &c| self.field.add(self.field.mul(acc, x), c))
    }

    /// Coefficients padded or truncated to exactly `len` entries.
    pub fn to_vec(&self, len: usize) -> Vec<FqElem> {
        (0..len).map(|i| self.coeff(i)).collect()
    }
}

/// The splitting field `GF(q^r)` of `X^n - 1` over `GF(q)`, with a fixed
/// primitive `n`-th root of unity.
pub struct ExtensionCtx {
    base: Arc<FieldCtx>,
    n: usize,
    r: u32,
    big: Arc<FieldCtx>,
    beta: FqElem,
    beta_pows: Vec<FqElem>,
    omega: FqElem,
    embed_table: Vec<FqElem>,
    // GF(p)-inverse of the matrix whose rows are embed(x^a) * omega^l.
    coord_inverse: Vec<Vec<u64>>,
}

impl fmt::Debug for ExtensionCtx {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionCtx")
            .field("q", &self.base.size())
            .field("n", &self.n)
            .field("r", &self.r)
            .field("beta", &self.beta)
            .finish()
    }
}

/// Multiplicative order of `q` modulo `n` (`1` when `n = 1`).
pub fn multiplicative_order(q: u64, n: u64) -> Option<u32> {
    if n == 1 {
        return Some(1);
    }
    if gcd(q % n, n) != 1 {
        return None;
    }
    let mut acc = q % n;
    let mut r = 1u32;
    while acc != 1 {
        acc = (acc as u128 * q as u128 % n as u128) as u64;
        r += 1;
    }
    Some(r)
}

impl ExtensionCtx {
    pub fn new(base: Arc<FieldCtx>, n: usize) -> Result<Arc<Self>> {
        Self::with_cap(base, n, DEFAULT_EXTENSION_CAP)
    }

    pub fn with_cap(base: Arc<FieldCtx>, n: usize, cap: u32) -> Result<Arc<Self>> {
        let q = base.size();
        if n == 0 {
            return Err(Error::InvalidParameters("code length must be positive".into()));
        }
        let r = multiplicative_order(q, n as u64).ok_or(Error::NotCoprime { n: n as u64, q })?;
        if r > cap {
            return Err(Error::ExtensionTooLarge { r, cap });
        }
        let p = base.characteristic();
        let total = base
            .degree()
            .checked_mul(r)
            .ok_or(Error::FieldTooLarge { p, e: u32::MAX })?;
        let big = Arc::new(FieldCtx::canonical(p, total, MAX_FIELD)?);
        let order = big.size() - 1;
        let omega = big.x_elem();
        let beta = big.pow(omega, order / n as u64);
        if big.pow(beta, n as u64) != FqElem::ONE
            || prime_factors(n as u64)
                .iter()
                .any(|&l| big.pow(beta, n as u64 / l) == FqElem::ONE)
        {
            return Err(Error::Internal("beta is not a primitive n-th root".into()));
        }
        let mut beta_pows = Vec::with_capacity(n);
        let mut cur = FqElem::ONE;
        for _ in 0..n {
            beta_pows.push(cur);
            cur = big.mul(cur, beta);
        }

        // Root of the base modulus inside the big field, from the subfield of order q.
        let e = base.degree() as usize;
        let theta = if e == 1 {
            FqElem::ONE
        } else {
            let step = order / (q - 1);
            let generator = big.pow(omega, step);
            let mut cand = generator;
            let mut found = None;
            for _ in 1..q {
                let val = base.modulus().iter().rev().fold(FqElem::ZERO, |acc, &c| {
                    big.add(big.mul(acc, cand), big.from_int(c as i64))
                });
                if val.is_zero() {
                    found = Some(cand);
                    break;
                }
                cand = big.mul(cand, generator);
            }
            found.ok_or_else(|| Error::Internal("base modulus has no root".into()))?
        };
        let theta_pows: Vec<FqElem> = (0..e).map(|a| big.pow(theta, a as u64)).collect();
        let embed_of = |a: FqElem| -> FqElem {
            base.digits(a)
                .iter()
                .zip(&theta_pows)
                .fold(FqElem::ZERO, |acc, (&d, &t)| {
                    big.add(acc, big.mul(big.from_int(d as i64), t))
                })
        };
        let embed_table: Vec<FqElem> = base.elements().map(embed_of).collect();

        let dim = e * r as usize;
        let mut rows = Vec::with_capacity(dim);
        for l in 0..r as u64 {
            let wl = big.pow(omega, l);
            for t in &theta_pows {
                rows.push(big.digits(big.mul(*t, wl)));
            }
        }
        let coord_inverse = invert_mod_p(rows, p)
            .ok_or_else(|| Error::Internal("flattening basis is singular".into()))?;

        Ok(Arc::new(ExtensionCtx {
            base,
            n,
            r,
            big,
            beta,
            beta_pows,
            omega,
            embed_table,
            coord_inverse,
        }))
    }

    pub fn base(&self) -> &Arc<FieldCtx> {
        &self.base
    }

    pub fn big(&self) -> &Arc<FieldCtx> {
        &self.big
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Degree of the splitting field over the base field.
    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn beta(&self) -> FqElem {
        self.beta
    }

    /// `beta^i` for any integer exponent, reduced mod `n`.
    pub fn beta_pow(&self, i: i64) -> FqElem {
        self.beta_pows[i.rem_euclid(self.n as i64) as usize]
    }

    /// The generator `omega` of the big field; `1, omega, ..., omega^(r-1)` is
    /// the basis used by [`flatten`](Self::flatten).
    pub fn omega(&self) -> FqElem {
        self.omega
    }

    pub fn embed(&self, a: FqElem) -> FqElem {
        self.embed_table[a.0 as usize]
    }

    /// Coordinates of `y` over `GF(q)` in the basis `1, omega, ..., omega^(r-1)`.
    pub fn flatten(&self, y: FqElem) -> Vec<FqElem> {
        let p = self.base.characteristic();
        let digits = self.big.digits(y);
        let dim = digits.len();
        let mut c = vec![0u64; dim];
        for (i, &d) in digits.iter().enumerate() {
            if d == 0 {
                continue;
            }
            for (j, slot) in c.iter_mut().enumerate() {
                *slot = (*slot + d * self.coord_inverse[i][j]) % p;
            }
        }
        let e = self.base.degree() as usize;
        c.chunks(e).map(|ch| self.base.from_digits(ch)).collect()
    }

    /// Inverse of [`embed`](Self::embed); fails when `y` lies outside `GF(q)`.
    pub fn to_base(&self, y: FqElem) -> Result<FqElem> {
        let coords = self.flatten(y);
        if coords[1..].iter().any(|c| !c.is_zero()) {
            return Err(Error::NotInBaseField);
        }
        Ok(coords[0])
    }

    /// Map a polynomial over the big field with base-field coefficients down.
    pub fn poly_to_base(&self, f: &Poly) -> Result<Poly> {
        let c = f
            .coeffs()
            .iter()
            .map(|&y| self.to_base(y))
            .collect::<Result<Vec<_>>>()?;
        Ok(Poly::new(self.base.clone(), c))
    }

    pub fn poly_to_big(&self, f: &Poly) -> Poly {
        let c = f.coeffs().iter().map(|&a| self.embed(a)).collect();
        Poly::new(self.big.clone(), c)
    }

    /// Minimal polynomial over `GF(q)` of `beta^i`.
    pub fn minimal_poly(&self, i: usize) -> Poly {
        let c = coset(i % self.n, self.base.size(), self.n);
        let f = Poly::from_roots(self.big.clone(), c.iter().map(|u| self.beta_pows[u]));
        self.poly_to_base(&f)
            .expect("minimal polynomials have coefficients in the base field")
    }
}

/// Inverse of a square matrix over `GF(p)`, row-vector convention: if
/// `x = c M` then `c = x M^{-1}`.
fn invert_mod_p(mut m: Vec<Vec<u64>>, p: u64) -> Option<Vec<Vec<u64>>> {
    let n = m.len();
    let mut inv: Vec<Vec<u64>> = (0..n)
        .map(|i| (0..n).map(|j| u64::from(i == j)).collect())
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != 0)?;
        m.swap(col, piv);
        inv.swap(col, piv);
        let s = mod_pow(m[col][col], p - 2, p);
        for j in 0..n {
            m[col][j] = m[col][j] * s % p;
            inv[col][j] = inv[col][j] * s % p;
        }
        for r in 0..n {
            if r != col && m[r][col] != 0 {
                let f = m[r][col];
                for j in 0..n {
                    m[r][j] = (m[r][j] + p - f * m[col][j] % p) % p;
                    inv[r][j] = (inv[r][j] + p - f * inv[col][j] % p) % p;
                }
            }
        }
    }
    Some(inv)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gf2() -> Arc<FieldCtx> {
        FieldCtx::prime(2).unwrap()
    }

    #[test]
    fn gf2_one_plus_one() {
        let f = gf2();
        assert_eq!(f.add(FqElem::ONE, FqElem::ONE), FqElem::ZERO);
    }

    #[test]
    fn gf8_x_times_x2_is_x_plus_1() {
        let f = FieldCtx::with_modulus(2, vec![1, 1, 0, 1]).unwrap();
        let x = f.from_digits(&[0, 1, 0]);
        let x2 = f.from_digits(&[0, 0, 1]);
        assert_eq!(f.digits(f.mul(x, x2)), vec![1, 1, 0]);
        // The canonical modulus of GF(8) is the same polynomial.
        assert_eq!(FieldCtx::gf(2, 3).unwrap().modulus(), &[1, 1, 0, 1]);
    }

    #[test]
    fn fermat_and_inverse() {
        for (p, e) in [(2, 1), (2, 4), (3, 2), (5, 1), (7, 2), (2, 8)] {
            let f = FieldCtx::gf(p, e).unwrap();
            for a in f.elements().skip(1) {
                assert_eq!(f.pow(a, f.size() - 1), FqElem::ONE);
                assert_eq!(f.mul(f.inv(a).unwrap(), a), FqElem::ONE);
            }
            assert_eq!(f.inv(FqElem::ZERO), Err(Error::InverseOfZero));
        }
    }

    #[test]
    fn inverse_of_product_exhaustive() {
        for (p, e) in [(2, 6), (3, 3), (5, 2)] {
            let f = FieldCtx::gf(p, e).unwrap();
            for a in f.elements().skip(1) {
                for b in f.elements().skip(1) {
                    let lhs = f.inv(f.mul(a, b)).unwrap();
                    let rhs = f.mul(f.inv(b).unwrap(), f.inv(a).unwrap());
                    assert_eq!(lhs, rhs);
                }
            }
        }
    }

    #[test]
    fn multiplication_routes_agree() {
        for e in 1..=12 {
            let f = FieldCtx::gf(2, e).unwrap();
            let step = (f.size() / 97).max(1);
            for a in (0..f.size()).step_by(step as usize).map(FqElem) {
                for b in (0..f.size()).step_by(step as usize + 3).map(FqElem) {
                    let generic = f.mul_generic(a, b);
                    assert_eq!(f.mul_binary(a, b), generic);
                    assert_eq!(f.mul(a, b), generic);
                    assert_eq!(f.add(a, b), f.add_generic(a, b));
                }
            }
        }
        let f = FieldCtx::gf(3, 4).unwrap();
        for a in f.elements() {
            for b in f.elements().step_by(7) {
                assert_eq!(f.mul(a, b), f.mul_generic(a, b));
            }
        }
    }

    #[test]
    fn rejects_reducible_modulus() {
        assert_eq!(
            FieldCtx::with_modulus(2, vec![1, 0, 1]).unwrap_err(),
            Error::ReducibleModulus(2)
        );
        assert!(FieldCtx::with_modulus(2, vec![1, 1, 1]).is_ok());
        assert_eq!(FieldCtx::prime(4).unwrap_err(), Error::NotPrime(4));
        assert!(matches!(FieldCtx::gf(2, 17), Err(Error::FieldTooLarge { .. })));
    }

    #[test]
    fn poly_examples() {
        let f = gf2();
        let a = Poly::from_ints(f.clone(), &[1, 0, 1]);
        let b = Poly::from_ints(f.clone(), &[1, 1]);
        assert!(a.rem(&b).unwrap().is_zero());

        let x7 = Poly::x_n_minus_one(f.clone(), 7);
        let h = Poly::from_ints(f.clone(), &[1, 1, 0, 1]);
        assert_eq!(x7.gcd(&h), h);

        assert_eq!(a.divmod(&Poly::zero(f)).unwrap_err(), Error::DivisionByZero);
    }

    #[test]
    fn divmod_degree_contract() {
        let f = FieldCtx::gf(3, 2).unwrap();
        let a = Poly::new(f.clone(), (0..9).map(|v| FqElem(v % 9)).collect());
        let b = Poly::new(f.clone(), vec![FqElem(2), FqElem(5), FqElem(7)]);
        let (q, r) = a.divmod(&b).unwrap();
        assert!(r.degree().unwrap_or(0) < 2);
        assert_eq!(q.mul(&b).add(&r), a);
    }

    #[test]
    fn extension_degrees() {
        let f = gf2();
        assert_eq!(ExtensionCtx::new(f.clone(), 7).unwrap().r(), 3);
        assert_eq!(ExtensionCtx::new(f.clone(), 15).unwrap().r(), 4);
        let one = ExtensionCtx::new(f.clone(), 1).unwrap();
        assert_eq!(one.r(), 1);
        assert_eq!(one.beta(), FqElem::ONE);
        assert_eq!(
            ExtensionCtx::new(f.clone(), 6).unwrap_err(),
            Error::NotCoprime { n: 6, q: 2 }
        );
        assert_eq!(
            ExtensionCtx::with_cap(f, 31, 4).unwrap_err(),
            Error::ExtensionTooLarge { r: 5, cap: 4 }
        );
    }

    #[test]
    fn beta_has_exact_order_n() {
        for (q, n) in [(2u64, 7usize), (2, 15), (2, 21), (3, 8), (3, 13), (4, 5), (7, 6)] {
            let base = match q {
                4 => FieldCtx::gf(2, 2).unwrap(),
                _ => FieldCtx::prime(q).unwrap(),
            };
            let ext = ExtensionCtx::new(base, n).unwrap();
            let big = ext.big();
            assert_eq!(big.pow(ext.beta(), n as u64), FqElem::ONE);
            for d in (1..n).filter(|d| n % d == 0) {
                assert_ne!(big.pow(ext.beta(), d as u64), FqElem::ONE, "q={q} n={n} d={d}");
            }
        }
    }

    #[test]
    fn extension_is_deterministic() {
        let a = ExtensionCtx::new(gf2(), 63).unwrap();
        let b = ExtensionCtx::new(gf2(), 63).unwrap();
        assert_eq!(a.beta(), b.beta());
        assert_eq!(a.big().modulus(), b.big().modulus());
    }

    #[test]
    fn embedding_round_trips() {
        let base = FieldCtx::gf(2, 2).unwrap();
        let ext = ExtensionCtx::new(base.clone(), 5).unwrap();
        for a in base.elements() {
            for b in base.elements() {
                let (ea, eb) = (ext.embed(a), ext.embed(b));
                assert_eq!(ext.big().mul(ea, eb), ext.embed(base.mul(a, b)));
                assert_eq!(ext.big().add(ea, eb), ext.embed(base.add(a, b)));
            }
            assert_eq!(ext.to_base(ext.embed(a)).unwrap(), a);
        }
        assert_eq!(ext.to_base(ext.omega()).unwrap_err(), Error::NotInBaseField);
    }

    #[test]
    fn minimal_poly_examples() {
        let f = gf2();
        let ext7 = ExtensionCtx::new(f.clone(), 7).unwrap();
        assert_eq!(ext7.minimal_poly(0), Poly::from_ints(f.clone(), &[1, 1]));
        let m1 = ext7.minimal_poly(1);
        assert_eq!(m1.degree(), Some(3));
        assert!(Poly::x_n_minus_one(f.clone(), 7).rem(&m1).unwrap().is_zero());

        let ext15 = ExtensionCtx::new(f.clone(), 15).unwrap();
        assert_eq!(ext15.minimal_poly(5), Poly::from_ints(f, &[1, 1, 1]));
    }

    #[test]
    fn minimal_polys_multiply_to_x_n_minus_one() {
        let cases: Vec<(Arc<FieldCtx>, usize)> = vec![
            (gf2(), 7),
            (gf2(), 15),
            (gf2(), 31),
            (gf2(), 63),
            (gf2(), 21),
            (FieldCtx::prime(3).unwrap(), 8),
            (FieldCtx::prime(3).unwrap(), 26),
            (FieldCtx::gf(2, 2).unwrap(), 15),
            (FieldCtx::prime(7).unwrap(), 6),
        ];
        for (base, n) in cases {
            let ext = ExtensionCtx::new(base.clone(), n).unwrap();
            let mut prod = Poly::one(base.clone());
            for c in crate::cyclotomic::all_cosets(base.size(), n) {
                let rep = c.min().unwrap();
                let m = ext.minimal_poly(rep);
                assert_eq!(m.degree(), Some(c.len()));
                for u in c.iter() {
                    assert!(ext.poly_to_big(&m).eval(ext.beta_pow(u as i64)).is_zero());
                }
                prod = prod.mul(&m);
            }
            assert_eq!(prod, Poly::x_n_minus_one(base, n));
        }
    }
}
