//! The univariate polynomial ring GF(2)[x].
//!
//! Polynomials are coefficient bitstrings packed into `u64` limbs, bit `i` of
//! the string being the coefficient of `x^i`. Provides arithmetic, gcd,
//! irreducibility testing and complete factorization into irreducibles
//! (squarefree split, distinct-degree, then trace-based equal-degree
//! splitting, which is the variant that works in characteristic 2).

use std::cmp::Ordering;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

/// Seed for the randomized equal-degree splitter when no RNG is supplied.
/// Factorizations are canonical regardless of the seed; fixing it keeps
/// certificate replays byte-identical.
pub const DEFAULT_FACTOR_SEED: u64 = 0x0a9d_2026;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolyError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("gcd of two zero polynomials")]
    BothZero,
    #[error("irreducibility is undefined for constant polynomials")]
    ConstantPolynomial,
    #[error("cannot factor the zero polynomial")]
    ZeroPolynomial,
    #[error("syntax error in polynomial literal: {0}")]
    Syntax(String),
}

/// A polynomial over GF(2), canonical form: no trailing zero limbs.
/// The zero polynomial is the empty limb vector.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitPoly {
    limbs: Vec<u64>,
}

impl BitPoly {
    pub fn zero() -> Self {
        BitPoly { limbs: Vec::new() }
    }

    pub fn one() -> Self {
        BitPoly { limbs: vec![1] }
    }

    pub fn x() -> Self {
        BitPoly { limbs: vec![2] }
    }

    /// The monomial x^k.
    pub fn monomial(k: usize) -> Self {
        let mut p = BitPoly::zero();
        p.set_coeff(k, true);
        p
    }

    /// Builds a polynomial from its low coefficient bits.
    pub fn from_bits(bits: u128) -> Self {
        let mut p = BitPoly {
            limbs: vec![bits as u64, (bits >> 64) as u64],
        };
        p.normalize();
        p
    }

    pub fn from_limbs(limbs: Vec<u64>) -> Self {
        let mut p = BitPoly { limbs };
        p.normalize();
        p
    }

    /// Sum of x^e over the given exponents (repeats cancel).
    pub fn from_exponents(exps: &[u64]) -> Self {
        let mut p = BitPoly::zero();
        for &e in exps {
            let e = e as usize;
            p.set_coeff(e, !p.coeff(e));
        }
        p
    }

    pub fn limbs(&self) -> &[u64] {
        &self.limbs
    }

    /// Coefficient bits as a little-endian hex string (lsb = constant term).
    pub fn to_hex(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut s = String::new();
        for (i, limb) in self.limbs.iter().enumerate().rev() {
            if i == self.limbs.len() - 1 {
                s.push_str(&format!("{:x}", limb));
            } else {
                s.push_str(&format!("{:016x}", limb));
            }
        }
        s
    }

    pub fn from_hex(s: &str) -> Result<Self, PolyError> {
        let s = s.trim().trim_start_matches("0x");
        if s.is_empty() || !s.chars().all(|c| c.is_ascii_hexdigit()) {
            return Err(PolyError::Syntax(format!("bad hex literal: {s:?}")));
        }
        let mut limbs = Vec::new();
        let bytes: Vec<u8> = s.bytes().rev().collect();
        for chunk in bytes.chunks(16) {
            let mut limb = 0u64;
            for (i, &b) in chunk.iter().enumerate() {
                let v = (b as char).to_digit(16).unwrap() as u64;
                limb |= v << (4 * i);
            }
            limbs.push(limb);
        }
        Ok(BitPoly::from_limbs(limbs))
    }

    fn normalize(&mut self) {
        while let Some(&0) = self.limbs.last() {
            self.limbs.pop();
        }
    }

    pub fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.limbs == [1]
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        let top = *self.limbs.last()?;
        Some((self.limbs.len() - 1) * 64 + (63 - top.leading_zeros() as usize))
    }

    pub fn coeff(&self, i: usize) -> bool {
        self.limbs
            .get(i / 64)
            .map_or(false, |l| (l >> (i % 64)) & 1 == 1)
    }

    pub fn set_coeff(&mut self, i: usize, v: bool) {
        let limb = i / 64;
        if limb >= self.limbs.len() {
            if !v {
                return;
            }
            self.limbs.resize(limb + 1, 0);
        }
        if v {
            self.limbs[limb] |= 1 << (i % 64);
        } else {
            self.limbs[limb] &= !(1 << (i % 64));
            self.normalize();
        }
    }

    pub fn add(&self, other: &BitPoly) -> BitPoly {
        let (long, short) = if self.limbs.len() >= other.limbs.len() {
            (self, other)
        } else {
            (other, self)
        };
        let mut limbs = long.limbs.clone();
        for (i, l) in short.limbs.iter().enumerate() {
            limbs[i] ^= l;
        }
        BitPoly::from_limbs(limbs)
    }

    /// xor `other << shift` into self.
    fn xor_shifted(&mut self, other: &BitPoly, shift: usize) {
        let (words, bits) = (shift / 64, shift % 64);
        let need = other.limbs.len() + words + 1;
        if self.limbs.len() < need {
            self.limbs.resize(need, 0);
        }
        for (i, &l) in other.limbs.iter().enumerate() {
            self.limbs[words + i] ^= l << bits;
            if bits != 0 {
                self.limbs[words + i + 1] ^= l >> (64 - bits);
            }
        }
        self.normalize();
    }

    pub fn mul(&self, other: &BitPoly) -> BitPoly {
        if self.is_zero() || other.is_zero() {
            return BitPoly::zero();
        }
        let mut out = vec![0u64; self.limbs.len() + other.limbs.len()];
        for (i, &a) in self.limbs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.limbs.iter().enumerate() {
                if b == 0 {
                    continue;
                }
                let prod = clmul64(a, b);
                out[i + j] ^= prod as u64;
                out[i + j + 1] ^= (prod >> 64) as u64;
            }
        }
        BitPoly::from_limbs(out)
    }

    /// Squaring is coefficient-bit spreading in characteristic 2.
    pub fn square(&self) -> BitPoly {
        let mut out = Vec::with_capacity(self.limbs.len() * 2);
        for &l in &self.limbs {
            out.push(spread32(l as u32));
            out.push(spread32((l >> 32) as u32));
        }
        BitPoly::from_limbs(out)
    }

    /// Inverse of `square`; requires every set coefficient at an even index.
    pub fn sqrt(&self) -> Option<BitPoly> {
        let mut out = vec![0u64; (self.limbs.len() + 1) / 2];
        for (i, &l) in self.limbs.iter().enumerate() {
            if spread32(compress_even(l) as u32) != l {
                return None;
            }
            let half = compress_even(l);
            out[i / 2] |= half << (32 * (i % 2));
        }
        Some(BitPoly::from_limbs(out))
    }

    /// Formal derivative: shifts odd-index coefficients down.
    pub fn derivative(&self) -> BitPoly {
        let mut out = self.clone();
        // keep odd positions, shift right by one
        let mut limbs = vec![0u64; out.limbs.len()];
        for (i, &l) in out.limbs.iter().enumerate() {
            let odd = l & 0xaaaa_aaaa_aaaa_aaaa;
            limbs[i] |= odd >> 1;
        }
        out.limbs = limbs;
        out.normalize();
        out
    }

    /// Euclidean division: self = q*b + r with deg r < deg b.
    pub fn divrem(&self, b: &BitPoly) -> Result<(BitPoly, BitPoly), PolyError> {
        let db = b.degree().ok_or(PolyError::DivisionByZero)?;
        let mut r = self.clone();
        let mut q = BitPoly::zero();
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let shift = dr - db;
            q.set_coeff(shift, true);
            r.xor_shifted(b, shift);
        }
        Ok((q, r))
    }

    pub fn rem(&self, b: &BitPoly) -> Result<BitPoly, PolyError> {
        Ok(self.divrem(b)?.1)
    }

    /// Exact division; `None` when the remainder is nonzero.
    pub fn exact_div(&self, b: &BitPoly) -> Option<BitPoly> {
        let (q, r) = self.divrem(b).ok()?;
        r.is_zero().then_some(q)
    }

    pub fn gcd(&self, other: &BitPoly) -> Result<BitPoly, PolyError> {
        if self.is_zero() && other.is_zero() {
            return Err(PolyError::BothZero);
        }
        let mut a = self.clone();
        let mut b = other.clone();
        while !b.is_zero() {
            let r = a.rem(&b).unwrap();
            a = b;
            b = r;
        }
        Ok(a)
    }

    /// Product over `self^2 mod f`.
    pub fn modsqr(&self, f: &BitPoly) -> BitPoly {
        self.square().rem(f).unwrap()
    }

    pub fn modmul(&self, other: &BitPoly, f: &BitPoly) -> BitPoly {
        self.mul(other).rem(f).unwrap()
    }

    /// x^(2^k) mod f by repeated modular squaring.
    pub fn frobenius_power(f: &BitPoly, k: usize) -> BitPoly {
        let mut h = BitPoly::x().rem(f).unwrap();
        for _ in 0..k {
            h = h.modsqr(f);
        }
        h
    }

    /// Irreducibility over GF(2): x^(2^d) = x mod f and, for each prime p | d,
    /// gcd(x^(2^(d/p)) - x, f) = 1.
    pub fn is_irreducible(&self) -> Result<bool, PolyError> {
        let d = match self.degree() {
            None | Some(0) => return Err(PolyError::ConstantPolynomial),
            Some(d) => d,
        };
        if d == 1 {
            return Ok(true);
        }
        // one squaring pass, checkpointing the exponents we need
        let mut checkpoints: Vec<usize> = prime_divisors(d).iter().map(|p| d / p).collect();
        checkpoints.sort_unstable();
        let x = BitPoly::x().rem(self).unwrap();
        let mut h = x.clone();
        let mut next = 0usize;
        for k in 1..=d {
            h = h.modsqr(self);
            if next < checkpoints.len() && k == checkpoints[next] {
                next += 1;
                let g = h.add(&x).gcd(self).unwrap();
                if !g.is_one() {
                    return Ok(false);
                }
            }
        }
        Ok(h == x)
    }

    /// Complete factorization into irreducibles with multiplicities.
    pub fn factorize(&self) -> Result<Factorization, PolyError> {
        let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_FACTOR_SEED);
        self.factorize_with_rng(&mut rng)
    }

    pub fn factorize_with_rng<R: Rng>(&self, rng: &mut R) -> Result<Factorization, PolyError> {
        if self.is_zero() {
            return Err(PolyError::ZeroPolynomial);
        }
        let mut factors: Vec<(BitPoly, u32)> = Vec::new();
        factor_rec(self.clone(), 1, rng, &mut factors);
        // merge duplicates and sort by (degree, bit-value)
        factors.sort_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(BitPoly, u32)> = Vec::new();
        for (p, m) in factors {
            match merged.last_mut() {
                Some((q, mm)) if *q == p => *mm += m,
                _ => merged.push((p, m)),
            }
        }
        Ok(Factorization { factors: merged })
    }

    /// Parses the ASCII literal syntax, e.g. `x^12+x^11+x^8+1`.
    pub fn parse(text: &str) -> Result<Self, PolyError> {
        let mut p = BitPoly::zero();
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(PolyError::Syntax("empty literal".into()));
        }
        for term in cleaned.split('+') {
            if term == "0" {
                continue;
            }
            if term == "1" {
                p.set_coeff(0, !p.coeff(0));
                continue;
            }
            let e = if term == "x" {
                1
            } else if let Some(rest) = term.strip_prefix("x^") {
                rest.parse::<usize>()
                    .map_err(|_| PolyError::Syntax(format!("bad exponent in {term:?}")))?
            } else {
                return Err(PolyError::Syntax(format!("bad term {term:?}")));
            };
            p.set_coeff(e, !p.coeff(e));
        }
        Ok(p)
    }
}

impl PartialOrd for BitPoly {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Order by (degree, coefficient bit-value); used for canonical factor lists.
impl Ord for BitPoly {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl fmt::Display for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = match self.degree() {
            None => return write!(f, "0"),
            Some(d) => d,
        };
        let mut first = true;
        for i in (0..=d).rev() {
            if !self.coeff(i) {
                continue;
            }
            if !first {
                write!(f, "+")?;
            }
            first = false;
            match i {
                0 => write!(f, "1")?,
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPoly({self})")
    }
}

/// Multiset of irreducible factors, sorted by (degree, bit-value).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization {
    factors: Vec<(BitPoly, u32)>,
}

impl Factorization {
    pub fn factors(&self) -> &[(BitPoly, u32)] {
        &self.factors
    }

    /// Re-expands the product of poly^multiplicity.
    pub fn expand(&self) -> BitPoly {
        let mut acc = BitPoly::one();
        for (p, m) in &self.factors {
            for _ in 0..*m {
                acc = acc.mul(p);
            }
        }
        acc
    }

    /// Degrees of the irreducible factors, optionally excluding x and x+1.
    pub fn degree_set(&self, exclude_linear: bool) -> std::collections::BTreeSet<usize> {
        self.factors
            .iter()
            .filter(|(p, _)| !(exclude_linear && p.degree() == Some(1)))
            .map(|(p, _)| p.degree().unwrap())
            .collect()
    }
}

impl fmt::Display for Factorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let mut first = true;
        for (p, m) in &self.factors {
            if !first {
                write!(f, "*")?;
            }
            first = false;
            if *m == 1 {
                write!(f, "({p})")?;
            } else {
                write!(f, "({p})^{m}")?;
            }
        }
        Ok(())
    }
}

fn factor_rec<R: Rng>(f: BitPoly, mult: u32, rng: &mut R, out: &mut Vec<(BitPoly, u32)>) {
    let deg = f.degree().expect("nonzero input");
    if deg == 0 {
        return;
    }
    let d = f.derivative();
    if d.is_zero() {
        // perfect square: f = g(x)^2
        let g = f.sqrt().expect("zero derivative implies even exponents");
        factor_rec(g, mult * 2, rng, out);
        return;
    }
    // squarefree part carrying the odd-multiplicity irreducibles
    let w = f.exact_div(&f.gcd(&d).unwrap()).unwrap();
    let mut rest = f;
    if !w.is_one() {
        for q in squarefree_factorize(&w, rng) {
            // full multiplicity of q in the original input
            let mut e = 0u32;
            while let Some(next) = rest.exact_div(&q) {
                rest = next;
                e += 1;
            }
            out.push((q, mult * e));
        }
    }
    // what remains has only even multiplicities
    if rest.degree() != Some(0) {
        let g = rest.sqrt().expect("remaining multiplicities are even");
        factor_rec(g, mult * 2, rng, out);
    }
}

/// Distinct-degree then equal-degree factorization of a squarefree input.
fn squarefree_factorize<R: Rng>(w: &BitPoly, rng: &mut R) -> Vec<BitPoly> {
    let mut out = Vec::new();
    let mut w = w.clone();
    let mut h = BitPoly::x().rem(&w).unwrap();
    let x = BitPoly::x();
    let mut d = 0usize;
    while let Some(dw) = w.degree() {
        if dw == 0 {
            break;
        }
        d += 1;
        if d * 2 > dw {
            out.push(w);
            break;
        }
        h = h.modsqr(&w);
        let g = h.add(&x.rem(&w).unwrap()).gcd(&w).unwrap();
        if !g.is_one() {
            equal_degree_split(&g, d, rng, &mut out);
            w = w.exact_div(&g).unwrap();
            h = h.rem(&w).unwrap();
        }
    }
    out
}

/// Splits a product of distinct irreducibles all of degree `d` using the
/// GF(2^d)-trace of a random element; the Cantor-Zassenhaus power map
/// degenerates at q = 2.
fn equal_degree_split<R: Rng>(f: &BitPoly, d: usize, rng: &mut R, out: &mut Vec<BitPoly>) {
    let df = f.degree().unwrap();
    if df == d {
        out.push(f.clone());
        return;
    }
    loop {
        let xi = random_poly(df, rng).rem(f).unwrap();
        let mut t = xi.clone();
        let mut pw = xi;
        for _ in 1..d {
            pw = pw.modsqr(f);
            t = t.add(&pw);
        }
        if t.is_zero() {
            continue;
        }
        let g = t.gcd(f).unwrap();
        if let Some(dg) = g.degree() {
            if dg > 0 && dg < df {
                equal_degree_split(&g, d, rng, out);
                equal_degree_split(&f.exact_div(&g).unwrap(), d, rng, out);
                return;
            }
        }
    }
}

fn random_poly<R: Rng>(deg_bound: usize, rng: &mut R) -> BitPoly {
    let limbs = (deg_bound + 63) / 64;
    let mut v = vec![0u64; limbs];
    for l in v.iter_mut() {
        *l = rng.gen();
    }
    // clear bits at deg_bound and above
    let top = deg_bound % 64;
    if top != 0 {
        let last = v.len() - 1;
        v[last] &= (1u64 << top) - 1;
    }
    BitPoly::from_limbs(v)
}

/// Carryless 64x64 -> 128 multiply.
pub(crate) fn clmul64(mut a: u64, b: u64) -> u128 {
    let mut acc = 0u128;
    let wide = b as u128;
    while a != 0 {
        let i = a.trailing_zeros();
        acc ^= wide << i;
        a &= a - 1;
    }
    acc
}

/// Interleaves zero bits: bit i -> bit 2i.
fn spread32(x: u32) -> u64 {
    let mut v = x as u64;
    v = (v | (v << 16)) & 0x0000_ffff_0000_ffff;
    v = (v | (v << 8)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v << 4)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v << 2)) & 0x3333_3333_3333_3333;
    v = (v | (v << 1)) & 0x5555_5555_5555_5555;
    v
}

/// Gathers even-index bits: bit 2i -> bit i.
fn compress_even(x: u64) -> u64 {
    let mut v = x & 0x5555_5555_5555_5555;
    v = (v | (v >> 1)) & 0x3333_3333_3333_3333;
    v = (v | (v >> 2)) & 0x0f0f_0f0f_0f0f_0f0f;
    v = (v | (v >> 4)) & 0x00ff_00ff_00ff_00ff;
    v = (v | (v >> 8)) & 0x0000_ffff_0000_ffff;
    v = (v | (v >> 16)) & 0x0000_0000_ffff_ffff;
    v
}

pub(crate) fn prime_divisors(mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BitPoly {
        BitPoly::parse(s).unwrap()
    }

    #[test]
    fn parse_display_roundtrip() {
        for s in ["x^12+x^11+x^8+x^6+x^4+x^3+x^2+x+1", "x", "1", "0", "x^2+1"] {
            assert_eq!(p(s).to_string(), s);
        }
        assert_eq!(p("x+x"), BitPoly::zero());
    }

    #[test]
    fn hex_roundtrip() {
        let f = p("x^9+x+1");
        assert_eq!(f.to_hex(), "203");
        assert_eq!(BitPoly::from_hex("203").unwrap(), f);
        assert_eq!(BitPoly::from_hex(&f.to_hex()).unwrap(), f);
    }

    #[test]
    fn add_mul_basics() {
        assert_eq!(p("x+1").mul(&p("x+1")), p("x^2+1"));
        let f = p("x^5+x^3+1");
        assert_eq!(f.add(&f), BitPoly::zero());
        assert_eq!(f.square(), f.mul(&f));
        assert_eq!(f.square().sqrt().unwrap(), f);
    }

    #[test]
    fn divrem_contract() {
        // long division by hand: x^3+x = (x+1)(x^2+x+1) + (x+1)
        let (q, r) = p("x^3+x").divrem(&p("x^2+x+1")).unwrap();
        assert_eq!(q, p("x+1"));
        assert_eq!(r, p("x+1"));
        assert_eq!(q.mul(&p("x^2+x+1")).add(&r), p("x^3+x"));
        assert_eq!(
            p("x").divrem(&BitPoly::zero()),
            Err(PolyError::DivisionByZero)
        );
    }

    #[test]
    fn gcd_cases() {
        assert_eq!(p("x^2+x").gcd(&p("x^2+1")).unwrap(), p("x+1"));
        assert_eq!(p("x^3+x+1").gcd(&BitPoly::zero()).unwrap(), p("x^3+x+1"));
        assert_eq!(p("x^2+x+1").gcd(&p("x^3+x+1")).unwrap(), BitPoly::one());
        assert_eq!(
            BitPoly::zero().gcd(&BitPoly::zero()),
            Err(PolyError::BothZero)
        );
    }

    #[test]
    fn irreducibility() {
        assert!(p("x^2+x+1").is_irreducible().unwrap());
        assert!(!p("x^2+1").is_irreducible().unwrap());
        assert!(p("x^12+x^11+x^8+x^6+x^4+x^3+x^2+x+1")
            .is_irreducible()
            .unwrap());
        assert!(p("x^9+x+1").is_irreducible().unwrap());
        assert_eq!(
            BitPoly::one().is_irreducible(),
            Err(PolyError::ConstantPolynomial)
        );
    }

    /// Trial-division oracle, independent of the Frobenius-based test.
    fn is_irreducible_naive(f: &BitPoly) -> bool {
        let d = f.degree().unwrap();
        if d == 0 {
            return false;
        }
        for bits in 2u128..(1u128 << d) {
            let g = BitPoly::from_bits(bits);
            if g.degree().unwrap() >= 1 && f.rem(&g).unwrap().is_zero() {
                return false;
            }
        }
        true
    }

    #[test]
    fn irreducibility_matches_trial_division() {
        for d in 1..=10usize {
            for bits in (1u128 << d)..(1u128 << (d + 1)) {
                let f = BitPoly::from_bits(bits);
                assert_eq!(
                    f.is_irreducible().unwrap(),
                    is_irreducible_naive(&f),
                    "mismatch at {f}"
                );
            }
        }
    }

    #[test]
    fn factorize_small() {
        let f = p("x^4+x");
        let fac = f.factorize().unwrap();
        let parts: Vec<String> = fac
            .factors()
            .iter()
            .map(|(p, m)| format!("{p}^{m}"))
            .collect();
        assert_eq!(parts, ["x^1", "x+1^1", "x^2+x+1^1"]);
        assert_eq!(fac.expand(), f);

        let sq = p("x^2+1").factorize().unwrap();
        assert_eq!(sq.factors(), &[(p("x+1"), 2)]);
    }

    #[test]
    fn factorize_expected_thm_product() {
        // x(x+1)(x^2+x+1)^4
        let f = p("x").mul(&p("x+1")).mul(&{
            let q = p("x^2+x+1");
            q.square().square()
        });
        let fac = f.factorize().unwrap();
        assert_eq!(
            fac.factors(),
            &[(p("x"), 1), (p("x+1"), 1), (p("x^2+x+1"), 4)]
        );
        assert_eq!(
            fac.degree_set(true),
            std::collections::BTreeSet::from([2usize])
        );
        assert!(p("x").mul(&p("x+1")).factorize().unwrap().degree_set(true).is_empty());
    }

    #[test]
    fn factorize_reexpansion_random() {
        use rand::SeedableRng;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..60 {
            let deg = rng.gen_range(1..200);
            let f = random_poly(deg + 1, &mut rng);
            if f.is_zero() || f.degree() == Some(0) {
                continue;
            }
            let fac = f.factorize().unwrap();
            assert_eq!(fac.expand(), f, "re-expansion failed for {f}");
            for (q, _) in fac.factors() {
                assert!(q.is_irreducible().unwrap(), "non-irreducible factor {q}");
            }
        }
    }

    #[test]
    fn irreducible_counts_match_moebius() {
        // number of monic irreducibles of degree d = (1/d) sum_{e|d} mu(e) 2^(d/e)
        fn moebius(n: usize) -> i64 {
            let ps = prime_divisors(n);
            let mut x = n;
            for p in &ps {
                let mut c = 0;
                while x % p == 0 {
                    x /= p;
                    c += 1;
                }
                if c > 1 {
                    return 0;
                }
            }
            if ps.len() % 2 == 0 {
                1
            } else {
                -1
            }
        }
        for d in 1..=12usize {
            let mut count = 0u64;
            for bits in (1u128 << d)..(1u128 << (d + 1)) {
                if BitPoly::from_bits(bits).is_irreducible().unwrap() {
                    count += 1;
                }
            }
            let mut expect = 0i64;
            for e in 1..=d {
                if d % e == 0 {
                    expect += moebius(e) * (1i64 << (d / e));
                }
            }
            assert_eq!(count as i64, expect / d as i64, "degree {d}");
        }
    }
}
