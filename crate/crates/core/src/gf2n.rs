//! Arithmetic in GF(2^n) for 1 <= n <= 32.
//!
//! A [`FieldCtx`] fixes the extension degree and an irreducible modulus; all
//! element operations flow through it. Contexts are immutable after
//! construction and safe to share across worker threads.

use std::collections::HashMap;
use std::sync::OnceLock;

use thiserror::Error;

use crate::gf2poly::{clmul64, prime_divisors, BitPoly, PolyError};

/// Hard upper bound on the extension degree.
pub const MAX_DEGREE: u32 = 32;

/// Degrees up to this get log/exp tables (a few MiB at most); beyond it the
/// carryless-multiply path is used.
const TABLE_DEGREE_LIMIT: u32 = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("modulus of degree {0} is not irreducible")]
    NonIrreducibleModulus(String),
    #[error("modulus degree {got} does not match field degree {want}")]
    DegreeMismatch { want: u32, got: usize },
    #[error("unsupported extension degree {0} (must be 1..={MAX_DEGREE})")]
    UnsupportedDegree(u32),
    #[error("division by zero in GF(2^n)")]
    DivisionByZero,
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// An element of GF(2^n): an n-bit coefficient vector of a residue mod the
/// field modulus.
pub type Felt = u64;

struct LogTables {
    log: Vec<u32>,
    exp: Vec<u64>,
}

/// A concrete GF(2^n).
pub struct FieldCtx {
    n: u32,
    modulus: BitPoly,
    modulus_bits: u64, // coefficient bits incl. the degree-n term
    tables: Option<LogTables>,
}

impl FieldCtx {
    /// Field with the default modulus for degree `n` (the irreducible
    /// polynomial whose coefficient bitstring is smallest as an integer).
    pub fn new(n: u32) -> Result<Self, FieldError> {
        let modulus = default_modulus(n)?;
        Self::with_modulus(n, modulus)
    }

    pub fn with_modulus(n: u32, modulus: BitPoly) -> Result<Self, FieldError> {
        if n == 0 || n > MAX_DEGREE {
            return Err(FieldError::UnsupportedDegree(n));
        }
        match modulus.degree() {
            Some(d) if d == n as usize => {}
            d => {
                return Err(FieldError::DegreeMismatch {
                    want: n,
                    got: d.unwrap_or(0),
                })
            }
        }
        if !modulus.is_irreducible()? {
            return Err(FieldError::NonIrreducibleModulus(modulus.to_string()));
        }
        let modulus_bits = modulus.limbs()[0];
        let mut ctx = FieldCtx {
            n,
            modulus,
            modulus_bits,
            tables: None,
        };
        if (2..=TABLE_DEGREE_LIMIT).contains(&n) {
            ctx.tables = Some(ctx.build_tables());
        }
        Ok(ctx)
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn modulus(&self) -> &BitPoly {
        &self.modulus
    }

    pub fn modulus_hex(&self) -> String {
        self.modulus.to_hex()
    }

    /// Number of field elements, 2^n.
    pub fn size(&self) -> u64 {
        1u64 << self.n
    }

    /// Order of the multiplicative group, 2^n - 1.
    pub fn group_order(&self) -> u64 {
        self.size() - 1
    }

    pub fn elements(&self) -> impl Iterator<Item = Felt> {
        0..self.size()
    }

    #[inline]
    pub fn add(&self, a: Felt, b: Felt) -> Felt {
        a ^ b
    }

    #[inline]
    pub fn mul(&self, a: Felt, b: Felt) -> Felt {
        if let Some(t) = &self.tables {
            if a == 0 || b == 0 {
                return 0;
            }
            let order = self.group_order();
            let mut idx = t.log[a as usize] as u64 + t.log[b as usize] as u64;
            if idx >= order {
                idx -= order;
            }
            return t.exp[idx as usize];
        }
        self.mul_clmul(a, b)
    }

    /// Carryless multiply then shift-xor reduction; works uniformly to n = 32
    /// regardless of tables.
    pub fn mul_clmul(&self, a: Felt, b: Felt) -> Felt {
        let mut acc = clmul64(a, b);
        let n = self.n;
        let modw = self.modulus_bits as u128;
        let mut bit = 127 - acc.leading_zeros() as i64;
        while acc != 0 && bit >= n as i64 {
            acc ^= modw << (bit as u32 - n);
            if acc == 0 {
                break;
            }
            bit = 127 - acc.leading_zeros() as i64;
        }
        acc as u64
    }

    #[inline]
    pub fn square(&self, a: Felt) -> Felt {
        self.mul(a, a)
    }

    /// Square-and-multiply; pow(0, 0) = 1 by convention.
    pub fn pow(&self, a: Felt, mut e: u64) -> Felt {
        if a == 0 {
            return if e == 0 { 1 } else { 0 };
        }
        if let Some(t) = &self.tables {
            let order = self.group_order() as u128;
            let idx = (t.log[a as usize] as u128 * e as u128) % order;
            return t.exp[idx as usize];
        }
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            e >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: Felt) -> Result<Felt, FieldError> {
        if a == 0 {
            return Err(FieldError::DivisionByZero);
        }
        if let Some(t) = &self.tables {
            let order = self.group_order();
            let l = t.log[a as usize] as u64;
            let idx = if l == 0 { 0 } else { order - l };
            return Ok(t.exp[idx as usize]);
        }
        Ok(self.pow(a, self.group_order() - 1))
    }

    /// The Frobenius map x -> x^2.
    #[inline]
    pub fn frobenius(&self, a: Felt) -> Felt {
        self.square(a)
    }

    /// Multiplicative order of a nonzero element.
    pub fn order(&self, a: Felt) -> u64 {
        assert!(a != 0);
        let group = self.group_order();
        let mut ord = group;
        for p in prime_divisors(group as usize) {
            while ord % p as u64 == 0 && self.pow(a, ord / p as u64) == 1 {
                ord /= p as u64;
            }
        }
        ord
    }

    fn build_tables(&self) -> LogTables {
        let order = self.group_order();
        let g = self.find_generator();
        let mut exp = vec![0u64; order as usize];
        let mut log = vec![0u32; self.size() as usize];
        let mut acc = 1u64;
        for (i, slot) in exp.iter_mut().enumerate() {
            *slot = acc;
            log[acc as usize] = i as u32;
            acc = self.mul_clmul(acc, g);
        }
        debug_assert_eq!(acc, 1);
        LogTables { log, exp }
    }

    fn find_generator(&self) -> Felt {
        let order = self.group_order();
        let primes = prime_divisors(order as usize);
        'cand: for g in 2..self.size() {
            for &p in &primes {
                if self.pow_no_tables(g, order / p as u64) == 1 {
                    continue 'cand;
                }
            }
            return g;
        }
        unreachable!("the multiplicative group of a finite field is cyclic")
    }

    fn pow_no_tables(&self, a: Felt, mut e: u64) -> Felt {
        let mut base = a;
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul_clmul(acc, base);
            }
            base = self.mul_clmul(base, base);
            e >>= 1;
        }
        acc
    }
}

/// Lowest-bit-value irreducible polynomial of degree n; deterministic across
/// runs so reports are reproducible bit-for-bit.
pub fn default_modulus(n: u32) -> Result<BitPoly, FieldError> {
    if n == 0 || n > MAX_DEGREE {
        return Err(FieldError::UnsupportedDegree(n));
    }
    static CACHE: OnceLock<std::sync::Mutex<HashMap<u32, BitPoly>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| std::sync::Mutex::new(HashMap::new()));
    if let Some(m) = cache.lock().unwrap().get(&n) {
        return Ok(m.clone());
    }
    for bits in (1u128 << n) + 1..1u128 << (n + 1) {
        let f = BitPoly::from_bits(bits);
        if f.is_irreducible()? {
            cache.lock().unwrap().insert(n, f.clone());
            return Ok(f);
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

/// Parses a modulus override table: one line per degree, `n <hex>` where the
/// hex string encodes coefficient bits with lsb = constant term.
pub fn parse_modulus_table(text: &str) -> Result<HashMap<u32, BitPoly>, FieldError> {
    let mut map = HashMap::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let (n, hex) = match (it.next(), it.next()) {
            (Some(n), Some(h)) => (n, h),
            _ => {
                return Err(FieldError::Poly(PolyError::Syntax(format!(
                    "bad modulus table line: {line:?}"
                ))))
            }
        };
        let n: u32 = n.parse().map_err(|_| {
            FieldError::Poly(PolyError::Syntax(format!("bad degree in line {line:?}")))
        })?;
        map.insert(n, BitPoly::from_hex(hex)?);
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> BitPoly {
        BitPoly::parse(s).unwrap()
    }

    #[test]
    fn construction() {
        assert!(FieldCtx::with_modulus(2, p("x^2+x+1")).is_ok());
        assert!(matches!(
            FieldCtx::with_modulus(2, p("x^2+1")),
            Err(FieldError::NonIrreducibleModulus(_))
        ));
        assert!(matches!(
            FieldCtx::with_modulus(3, p("x^2+x+1")),
            Err(FieldError::DegreeMismatch { .. })
        ));
        assert!(matches!(FieldCtx::new(0), Err(FieldError::UnsupportedDegree(0))));
        assert!(matches!(FieldCtx::new(33), Err(FieldError::UnsupportedDegree(33))));
    }

    #[test]
    fn default_moduli() {
        assert_eq!(default_modulus(2).unwrap(), p("x^2+x+1"));
        assert_eq!(default_modulus(3).unwrap(), p("x^3+x+1"));
        assert_eq!(default_modulus(4).unwrap(), p("x^4+x+1"));
        // first irreducible of degree 9 in ascending bit-value order
        let m9 = default_modulus(9).unwrap();
        for bits in (1u128 << 9) + 1..m9.limbs()[0] as u128 {
            assert!(!BitPoly::from_bits(bits).is_irreducible().unwrap());
        }
        assert_eq!(m9, p("x^9+x+1"));
    }

    #[test]
    fn gf4_arithmetic() {
        let ctx = FieldCtx::with_modulus(2, p("x^2+x+1")).unwrap();
        let x = 0b10u64;
        assert_eq!(ctx.mul(x, x), 0b11); // x^2 = x+1
        assert_eq!(ctx.pow(x, 3), 1);
        assert_eq!(ctx.inv(x).unwrap(), 0b11);
        for a in ctx.elements() {
            assert_eq!(ctx.add(a, a), 0);
        }
    }

    #[test]
    fn table_and_clmul_paths_agree() {
        for n in [2u32, 5, 8, 11] {
            let ctx = FieldCtx::new(n).unwrap();
            assert!(ctx.tables.is_some());
            for a in ctx.elements().step_by(3) {
                for b in ctx.elements().step_by(7) {
                    assert_eq!(ctx.mul(a, b), ctx.mul_clmul(a, b));
                }
            }
        }
    }

    #[test]
    fn field_axioms_small() {
        for n in 1..=6u32 {
            let ctx = FieldCtx::new(n).unwrap();
            for a in ctx.elements() {
                assert_eq!(ctx.pow(a, ctx.size()), a, "Frobenius fixed point");
                if a != 0 {
                    assert_eq!(ctx.mul(a, ctx.inv(a).unwrap()), 1);
                    assert_eq!(ctx.pow(a, ctx.group_order()), 1);
                }
                for b in ctx.elements() {
                    assert_eq!(ctx.mul(a, b), ctx.mul(b, a));
                    assert_eq!(
                        ctx.square(ctx.add(a, b)),
                        ctx.add(ctx.square(a), ctx.square(b)),
                        "Frobenius additivity"
                    );
                    for c in ctx.elements() {
                        if n <= 4 {
                            assert_eq!(
                                ctx.mul(a, ctx.add(b, c)),
                                ctx.add(ctx.mul(a, b), ctx.mul(a, c))
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pow_gf512_all_units() {
        let ctx = FieldCtx::new(9).unwrap();
        for g in 1..ctx.size() {
            assert_eq!(ctx.pow(g, 511), 1);
        }
    }

    #[test]
    fn inv_matches_pow_path() {
        for n in 1..=10u32 {
            let ctx = FieldCtx::new(n).unwrap();
            for a in 1..ctx.size() {
                assert_eq!(ctx.inv(a).unwrap(), ctx.pow_no_tables(a, ctx.group_order() - 1));
            }
        }
        assert_eq!(FieldCtx::new(4).unwrap().inv(0), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn order_multiset_is_modulus_independent() {
        // field isomorphism sanity check: the multiset {ord(a)} agrees for
        // two different irreducible moduli of the same degree
        for n in [4u32, 6, 8] {
            let m1 = default_modulus(n).unwrap();
            let mut m2 = None;
            for bits in m1.limbs()[0] as u128 + 1..1u128 << (n + 1) {
                let f = BitPoly::from_bits(bits);
                if f.is_irreducible().unwrap() {
                    m2 = Some(f);
                    break;
                }
            }
            let c1 = FieldCtx::with_modulus(n, m1).unwrap();
            let c2 = FieldCtx::with_modulus(n, m2.unwrap()).unwrap();
            let mut o1: Vec<u64> = (1..c1.size()).map(|a| c1.order(a)).collect();
            let mut o2: Vec<u64> = (1..c2.size()).map(|a| c2.order(a)).collect();
            o1.sort_unstable();
            o2.sort_unstable();
            assert_eq!(o1, o2);
        }
    }

    #[test]
    fn modulus_table_parsing() {
        let t = parse_modulus_table("# comment\n9 203\n4 13\n").unwrap();
        assert_eq!(t[&9], p("x^9+x+1"));
        assert_eq!(t[&4], p("x^4+x+1"));
        assert!(parse_modulus_table("oops").is_err());
    }
}
