//! Exact arithmetic in finite fields.
//!
//! A [`Field`] is either GF(p^e) built directly over the prime field, or an
//! explicit extension of degree `e` over another [`Field`]. Elements are
//! canonical integer indices: an element with coefficient vector
//! `(c_0, .., c_{e-1})` over its immediate base has index
//! `c_0 + c_1 |base| + .. + c_{e-1} |base|^{e-1}`.
//!
//! Two consequences of this encoding are used throughout the crate:
//!
//! * the base field sits inside a tower as the indices `0..|base|`, so the
//!   subfield embedding is the identity on indices;
//! * addition is digit-wise addition mod p of the base-p expansion of the
//!   index at every tower level (plain XOR in characteristic 2).
//!
//! The modulus of every level is the lexicographically smallest monic
//! irreducible polynomial of the requested degree, comparing coefficient
//! lists constant term first. Isomorphic fields built with different towers
//! are different [`Field`] values.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// Largest supported field order.
pub const MAX_ORDER: u64 = 1 << 20;
const TABLE_ORDER: u32 = 256;
const LOG_ORDER: u32 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("characteristic {0} is not prime")]
    NonPrimeCharacteristic(u32),
    #[error("no monic irreducible polynomial of degree {0} found")]
    NoIrreducibleFound(u32),
    #[error("base field has characteristic {base}, requested {requested}")]
    CharacteristicMismatch { base: u32, requested: u32 },
    #[error("extension degree must be positive")]
    ZeroDegree,
    #[error("field order {0} exceeds 2^20")]
    TooLarge(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u32),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("element index {index} out of range for a field of order {order}")]
    IndexOutOfRange { index: u32, order: u32 },
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("field is not an extension over the requested base")]
    NotAnExtensionOverRequestedBase,
}

/// A finite field. Cheap to clone; immutable after construction.
#[derive(Clone)]
pub struct Field(Arc<Inner>);

struct Inner {
    p: u32,
    order: u32,
    degree: u32,
    base: Option<Field>,
    modulus: Vec<u32>,
    backend: Backend,
}

enum Backend {
    /// Full 256-stride tables, used when `order <= 256`.
    Table {
        add: Box<[u8]>,
        mul: Box<[u8]>,
        neg: Box<[u8]>,
        inv: Box<[u8]>,
    },
    /// Discrete log tables; `exp` has length `2 (order - 1)`.
    Log {
        exp: Box<[u32]>,
        log: Box<[u32]>,
    },
    Poly,
}

/// Coefficient domain of one tower level.
#[derive(Clone, Copy)]
enum Coef<'a> {
    Prime(u32),
    Field(&'a Field),
}

impl Coef<'_> {
    fn order(self) -> u32 {
        match self {
            Coef::Prime(p) => p,
            Coef::Field(f) => f.order(),
        }
    }
    fn add(self, a: u32, b: u32) -> u32 {
        match self {
            Coef::Prime(p) => (a + b) % p,
            Coef::Field(f) => f.add(a, b),
        }
    }
    fn sub(self, a: u32, b: u32) -> u32 {
        match self {
            Coef::Prime(p) => (a + p - b) % p,
            Coef::Field(f) => f.sub(a, b),
        }
    }
    fn mul(self, a: u32, b: u32) -> u32 {
        match self {
            Coef::Prime(p) => ((a as u64 * b as u64) % p as u64) as u32,
            Coef::Field(f) => f.mul(a, b),
        }
    }
    fn inv(self, a: u32) -> u32 {
        match self {
            Coef::Prime(p) => mod_pow(a, p - 2, p),
            Coef::Field(f) => f.inv(a),
        }
    }
}

fn mod_pow(b: u32, mut e: u32, m: u32) -> u32 {
    let m = m as u64;
    let (mut acc, mut b) = (1u64 % m, b as u64 % m);
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u32
}

fn trim(v: &mut Vec<u32>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Polynomial arithmetic over one coefficient domain; polynomials are
/// coefficient lists, constant term first, without trailing zeros.
struct PolyOps<'a> {
    c: Coef<'a>,
}

impl PolyOps<'_> {
    fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u32; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.c.add(out[i + j], self.c.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    fn sub(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let n = a.len().max(b.len());
        let mut out: Vec<u32> = (0..n)
            .map(|i| {
                self.c
                    .sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0))
            })
            .collect();
        trim(&mut out);
        out
    }

    fn divrem(&self, a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
        debug_assert!(!b.is_empty());
        let mut rem = a.to_vec();
        trim(&mut rem);
        if rem.len() < b.len() {
            return (Vec::new(), rem);
        }
        let lead_inv = self.c.inv(*b.last().unwrap());
        let mut quot = vec![0u32; rem.len() - b.len() + 1];
        while rem.len() >= b.len() {
            let shift = rem.len() - b.len();
            let factor = self.c.mul(*rem.last().unwrap(), lead_inv);
            quot[shift] = factor;
            for (j, &bj) in b.iter().enumerate() {
                rem[shift + j] = self.c.sub(rem[shift + j], self.c.mul(factor, bj));
            }
            trim(&mut rem);
        }
        trim(&mut quot);
        (quot, rem)
    }

    /// Inverse of `a` modulo `m` by the extended Euclidean algorithm.
    fn inv_mod(&self, a: &[u32], m: &[u32]) -> Option<Vec<u32>> {
        let (mut r0, mut r1) = (m.to_vec(), a.to_vec());
        trim(&mut r1);
        let (mut t0, mut t1): (Vec<u32>, Vec<u32>) = (Vec::new(), vec![1]);
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1);
            let t2 = self.sub(&t0, &self.mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            t0 = std::mem::replace(&mut t1, t2);
        }
        // r0 is a nonzero constant iff gcd(a, m) = 1.
        if r0.len() != 1 {
            return None;
        }
        let c = self.c.inv(r0[0]);
        let mut out: Vec<u32> = t0.iter().map(|&t| self.c.mul(t, c)).collect();
        trim(&mut out);
        Some(out)
    }

    fn is_irreducible(&self, f: &[u32]) -> bool {
        let e = f.len() - 1;
        let q = self.c.order() as u64;
        for d in 1..=e / 2 {
            let count = q.pow(d as u32);
            for t in 0..count {
                let mut g = digits(t, q, d);
                g.push(1);
                if self.divrem(f, &g).1.is_empty() {
                    return false;
                }
            }
        }
        true
    }
}

/// Little-endian base-`q` digits of `t`, exactly `len` of them.
fn digits(mut t: u64, q: u64, len: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push((t % q) as u32);
        t /= q;
    }
    out
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while (d as u64) * (d as u64) <= n as u64 {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Splits a prime power `q` into `(p, e)`.
pub fn prime_power(q: u32) -> Option<(u32, u32)> {
    if q < 2 {
        return None;
    }
    let p = (2..=q).find(|d| q.is_multiple_of(*d))?;
    let mut e = 0;
    let mut r = q;
    while r.is_multiple_of(p) {
        r /= p;
        e += 1;
    }
    (r == 1).then_some((p, e))
}

#[inline]
fn digit_add(p: u32, mut a: u32, mut b: u32) -> u32 {
    if p == 2 {
        return a ^ b;
    }
    let (mut out, mut w) = (0, 1);
    while a > 0 || b > 0 {
        out += ((a % p + b % p) % p) * w;
        a /= p;
        b /= p;
        w *= p;
    }
    out
}

#[inline]
fn digit_neg(p: u32, mut a: u32) -> u32 {
    if p == 2 {
        return a;
    }
    let (mut out, mut w) = (0, 1);
    while a > 0 {
        out += ((p - a % p) % p) * w;
        a /= p;
        w *= p;
    }
    out
}

impl Field {
    /// Builds GF(q^e) where q is the order of `base` (or `p` when no base is
    /// given), using the lexicographically smallest monic irreducible modulus.
    pub fn new(p: u32, e: u32, base: Option<&Field>) -> Result<Field, FieldError> {
        check_char(p, base)?;
        if e == 0 {
            return Err(FieldError::ZeroDegree);
        }
        let q = base.map_or(p, Field::order) as u64;
        let order = q
            .checked_pow(e)
            .filter(|&o| o <= MAX_ORDER)
            .ok_or(FieldError::TooLarge(q.saturating_pow(e)))?;
        let ops = PolyOps {
            c: base.map_or(Coef::Prime(p), Coef::Field),
        };
        let e_us = e as usize;
        // Constant term is the most significant digit of the candidate counter.
        let modulus = (0..order)
            .map(|t| {
                let mut c = digits(t, q, e_us);
                c.reverse();
                c.push(1);
                c
            })
            .find(|f| e == 1 || (f[0] != 0 && ops.is_irreducible(f)))
            .ok_or(FieldError::NoIrreducibleFound(e))?;
        Ok(Field::assemble(p, e, base.cloned(), modulus))
    }

    /// Builds a field from an explicit monic irreducible modulus.
    pub fn with_modulus(p: u32, base: Option<&Field>, modulus: Vec<u32>) -> Result<Field, FieldError> {
        check_char(p, base)?;
        let q = base.map_or(p, Field::order);
        if modulus.len() < 2 || *modulus.last().unwrap() != 1 {
            return Err(FieldError::InvalidModulus("modulus must be monic of positive degree".into()));
        }
        if modulus.iter().any(|&c| c >= q) {
            return Err(FieldError::InvalidModulus("coefficient out of range".into()));
        }
        let e = (modulus.len() - 1) as u32;
        let order = (q as u64).checked_pow(e).unwrap_or(u64::MAX);
        if order > MAX_ORDER {
            return Err(FieldError::TooLarge(order));
        }
        let ops = PolyOps {
            c: base.map_or(Coef::Prime(p), Coef::Field),
        };
        if e > 1 && (modulus[0] == 0 || !ops.is_irreducible(&modulus)) {
            return Err(FieldError::InvalidModulus("modulus is reducible".into()));
        }
        Ok(Field::assemble(p, e, base.cloned(), modulus))
    }

    /// GF(q) for a prime power q, built directly over the prime field.
    pub fn gf(q: u32) -> Result<Field, FieldError> {
        let (p, e) = prime_power(q).ok_or(FieldError::NotPrimePower(q))?;
        Field::new(p, e, None)
    }

    /// Degree-`m` extension with `self` as the explicit base.
    pub fn extension(&self, m: u32) -> Result<Field, FieldError> {
        Field::new(self.characteristic(), m, Some(self))
    }

    fn assemble(p: u32, degree: u32, base: Option<Field>, modulus: Vec<u32>) -> Field {
        let q = base.as_ref().map_or(p, Field::order);
        let order = q.pow(degree);
        let poly = Field(Arc::new(Inner {
            p,
            order,
            degree,
            base,
            modulus,
            backend: Backend::Poly,
        }));
        if order > LOG_ORDER {
            return poly;
        }
        let (exp, log) = poly.log_tables();
        let backend = if order <= TABLE_ORDER {
            let n = TABLE_ORDER as usize;
            let mut add = vec![0u8; n * n];
            let mut mul = vec![0u8; n * n];
            let mut neg = vec![0u8; n];
            let mut inv = vec![0u8; n];
            for a in 0..order {
                neg[a as usize] = digit_neg(p, a) as u8;
                if a != 0 {
                    inv[a as usize] = poly.poly_inv(a) as u8;
                }
                for b in 0..order {
                    let i = ((a as usize) << 8) | b as usize;
                    add[i] = digit_add(p, a, b) as u8;
                    mul[i] = if a == 0 || b == 0 {
                        0
                    } else {
                        exp[(log[a as usize] + log[b as usize]) as usize] as u8
                    };
                }
            }
            Backend::Table {
                add: add.into(),
                mul: mul.into(),
                neg: neg.into(),
                inv: inv.into(),
            }
        } else {
            Backend::Log {
                exp: exp.into(),
                log: log.into(),
            }
        };
        let inner = Arc::try_unwrap(poly.0).ok().expect("fresh field is uniquely owned");
        Field(Arc::new(Inner { backend, ..inner }))
    }

    fn log_tables(&self) -> (Vec<u32>, Vec<u32>) {
        let order = self.order();
        let group = (order - 1) as u64;
        let factors = prime_factors(group);
        let generator = (1..order)
            .find(|&g| factors.iter().all(|&r| self.poly_pow(g, group / r) != 1))
            .expect("multiplicative group is cyclic");
        let mut exp = vec![0u32; 2 * group as usize];
        let mut log = vec![0u32; order as usize];
        let mut x = 1;
        for i in 0..group as usize {
            exp[i] = x;
            exp[i + group as usize] = x;
            log[x as usize] = i as u32;
            x = self.poly_mul(x, generator);
        }
        (exp, log)
    }

    fn coef(&self) -> Coef<'_> {
        self.0.base.as_ref().map_or(Coef::Prime(self.0.p), Coef::Field)
    }

    fn poly_mul(&self, a: u32, b: u32) -> u32 {
        let ops = PolyOps { c: self.coef() };
        let prod = ops.mul(&self.coeffs(a), &self.coeffs(b));
        let (_, rem) = ops.divrem(&prod, &self.0.modulus);
        self.from_coeffs(&rem)
    }

    fn poly_pow(&self, a: u32, mut n: u64) -> u32 {
        let (mut acc, mut b) = (1, a);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.poly_mul(acc, b);
            }
            b = self.poly_mul(b, b);
            n >>= 1;
        }
        acc
    }

    fn poly_inv(&self, a: u32) -> u32 {
        let ops = PolyOps { c: self.coef() };
        let inv = ops
            .inv_mod(&self.coeffs(a), &self.0.modulus)
            .expect("nonzero element of a field is invertible");
        self.from_coeffs(&inv)
    }

    #[inline]
    pub fn characteristic(&self) -> u32 {
        self.0.p
    }

    #[inline]
    pub fn order(&self) -> u32 {
        self.0.order
    }

    /// Degree over the immediate base.
    pub fn degree(&self) -> u32 {
        self.0.degree
    }

    pub fn base(&self) -> Option<&Field> {
        self.0.base.as_ref()
    }

    /// Order of the immediate base (p when built over the prime field).
    pub fn base_order(&self) -> u32 {
        self.coef().order()
    }

    /// Defining polynomial over the immediate base, constant term first.
    pub fn modulus(&self) -> &[u32] {
        &self.0.modulus
    }

    /// Extension degrees from the bottom of the tower up.
    pub fn tower(&self) -> Vec<u32> {
        let mut t = self.base().map(Field::tower).unwrap_or_default();
        t.push(self.degree());
        t
    }

    /// Moduli from the bottom of the tower up.
    pub fn moduli(&self) -> Vec<Vec<u32>> {
        let mut m = self.base().map(Field::moduli).unwrap_or_default();
        m.push(self.modulus().to_vec());
        m
    }

    /// True for GF(p) presented as a degree-one extension of the prime field.
    pub fn is_prime_field(&self) -> bool {
        self.0.degree == 1 && self.0.base.is_none()
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        match &self.0.backend {
            Backend::Table { add, .. } => add[((a as usize) << 8) | b as usize] as u32,
            _ => digit_add(self.0.p, a, b),
        }
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        match &self.0.backend {
            Backend::Table { neg, .. } => neg[a as usize] as u32,
            _ => digit_neg(self.0.p, a),
        }
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        match &self.0.backend {
            Backend::Table { mul, .. } => mul[((a as usize) << 8) | b as usize] as u32,
            Backend::Log { exp, log } => {
                if a == 0 || b == 0 {
                    0
                } else {
                    exp[(log[a as usize] + log[b as usize]) as usize]
                }
            }
            Backend::Poly => self.poly_mul(a, b),
        }
    }

    /// Multiplicative inverse of a nonzero element. Panics on zero; see
    /// [`FieldElement::inv`] for the checked variant.
    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        assert!(a != 0, "inverse of zero");
        match &self.0.backend {
            Backend::Table { inv, .. } => inv[a as usize] as u32,
            Backend::Log { exp, log } => exp[(self.0.order - 1 - log[a as usize]) as usize],
            Backend::Poly => self.poly_inv(a),
        }
    }

    #[inline]
    pub fn div(&self, a: u32, b: u32) -> u32 {
        self.mul(a, self.inv(b))
    }

    /// `a^n`; negative exponents invert first (and panic on zero).
    pub fn pow(&self, a: u32, n: i64) -> u32 {
        let base = if n < 0 { self.inv(a) } else { a };
        let mut e = n.unsigned_abs();
        let (mut acc, mut b) = (1, base);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, b);
            }
            b = self.mul(b, b);
            e >>= 1;
        }
        acc
    }

    /// Coefficient vector over the immediate base.
    pub fn coeffs(&self, a: u32) -> Vec<u32> {
        digits(a as u64, self.base_order() as u64, self.0.degree as usize)
    }

    /// Inverse of [`Field::coeffs`]; missing high coefficients are zero.
    pub fn from_coeffs(&self, c: &[u32]) -> u32 {
        let q = self.base_order();
        c.iter().rev().fold(0, |acc, &x| acc * q + x)
    }

    pub fn element(&self, index: u32) -> Result<FieldElement, FieldError> {
        if index >= self.order() {
            return Err(FieldError::IndexOutOfRange {
                index,
                order: self.order(),
            });
        }
        Ok(FieldElement {
            field: self.clone(),
            index,
        })
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            index: 0,
        }
    }

    pub fn one(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            index: 1,
        }
    }

    /// Whether `base` is the immediate base of this field. A field built over
    /// the prime field accepts GF(p) (degree one, no base) as its base.
    pub fn is_extension_of(&self, base: &Field) -> bool {
        match self.base() {
            Some(b) => b == base,
            None => base.is_prime_field() && base.characteristic() == self.characteristic(),
        }
    }

    /// Tables are only borrowed by hot loops through this view.
    pub(crate) fn small_tables(&self) -> Option<SmallTables<'_>> {
        match &self.0.backend {
            Backend::Table { add, mul, neg, inv } => Some(SmallTables { add, mul, neg, inv }),
            _ => None,
        }
    }
}

fn check_char(p: u32, base: Option<&Field>) -> Result<(), FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NonPrimeCharacteristic(p));
    }
    if let Some(b) = base {
        if b.characteristic() != p {
            return Err(FieldError::CharacteristicMismatch {
                base: b.characteristic(),
                requested: p,
            });
        }
    }
    Ok(())
}

/// Borrowed lookup tables of a field of order at most 256.
#[derive(Clone, Copy)]
pub(crate) struct SmallTables<'a> {
    add: &'a [u8],
    mul: &'a [u8],
    neg: &'a [u8],
    inv: &'a [u8],
}

/// Arithmetic used by the scanning kernels; implemented both by the borrowed
/// tables and by [`Field`] itself so kernels can be monomorphised once.
pub(crate) trait Ops: Copy {
    fn add(self, a: u32, b: u32) -> u32;
    fn mul(self, a: u32, b: u32) -> u32;
    fn neg(self, a: u32) -> u32;
    fn inv(self, a: u32) -> u32;
}

impl Ops for SmallTables<'_> {
    #[inline(always)]
    fn add(self, a: u32, b: u32) -> u32 {
        self.add[((a as usize) << 8) | b as usize] as u32
    }
    #[inline(always)]
    fn mul(self, a: u32, b: u32) -> u32 {
        self.mul[((a as usize) << 8) | b as usize] as u32
    }
    #[inline(always)]
    fn neg(self, a: u32) -> u32 {
        self.neg[a as usize] as u32
    }
    #[inline(always)]
    fn inv(self, a: u32) -> u32 {
        self.inv[a as usize] as u32
    }
}

impl Ops for &Field {
    #[inline]
    fn add(self, a: u32, b: u32) -> u32 {
        Field::add(self, a, b)
    }
    #[inline]
    fn mul(self, a: u32, b: u32) -> u32 {
        Field::mul(self, a, b)
    }
    #[inline]
    fn neg(self, a: u32) -> u32 {
        Field::neg(self, a)
    }
    #[inline]
    fn inv(self, a: u32) -> u32 {
        Field::inv(self, a)
    }
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.p == other.0.p
                && self.0.degree == other.0.degree
                && self.0.modulus == other.0.modulus
                && self.0.base == other.0.base)
    }
}

impl Eq for Field {}

impl Hash for Field {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.0.p.hash(state);
        self.tower().hash(state);
        self.moduli().hash(state);
    }
}

impl fmt::Debug for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({}) tower {:?} over GF({})", self.order(), self.tower(), self.0.p)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GF({})", self.order())
    }
}

/// An element bound to its field, with checked arithmetic.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: Field,
    index: u32,
}

impl FieldElement {
    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    pub fn is_zero(&self) -> bool {
        self.index == 0
    }

    fn same(&self, other: &FieldElement) -> Result<(), FieldError> {
        if self.field == other.field {
            Ok(())
        } else {
            Err(FieldError::FieldMismatch)
        }
    }

    fn wrap(&self, index: u32) -> FieldElement {
        FieldElement {
            field: self.field.clone(),
            index,
        }
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(other)?;
        Ok(self.wrap(self.field.add(self.index, other.index)))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(other)?;
        Ok(self.wrap(self.field.sub(self.index, other.index)))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.same(other)?;
        Ok(self.wrap(self.field.mul(self.index, other.index)))
    }

    pub fn neg(&self) -> FieldElement {
        self.wrap(self.field.neg(self.index))
    }

    pub fn inv(&self) -> Result<FieldElement, FieldError> {
        if self.index == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.wrap(self.field.inv(self.index)))
    }

    pub fn pow(&self, n: i64) -> Result<FieldElement, FieldError> {
        if n < 0 && self.index == 0 {
            return Err(FieldError::DivisionByZero);
        }
        Ok(self.wrap(self.field.pow(self.index, n)))
    }

    /// Coefficient vector over `base`, which must be the immediate base of
    /// this element's field.
    pub fn coeffs_over_base(&self, base: &Field) -> Result<Vec<FieldElement>, FieldError> {
        if !self.field.is_extension_of(base) {
            return Err(FieldError::NotAnExtensionOverRequestedBase);
        }
        Ok(self
            .field
            .coeffs(self.index)
            .into_iter()
            .map(|c| FieldElement {
                field: base.clone(),
                index: c,
            })
            .collect())
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}@{}", self.index, self.field)
    }
}
