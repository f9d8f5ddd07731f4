//! Exhaustive differential analysis of power maps x^d over GF(2^n).
//!
//! The central predicate is the 0-APN test: x^d is 0-APN iff
//! F(x+1) + F(x) + 1 = 0 has no solution outside {0, 1}. The equivalent
//! quadruple formulation (F(x0) + F(x) + F(y) + F(x0+x+y) = 0 forces the
//! quadruple to be degenerate) is available for arbitrary base points x0.
//!
//! For power maps the differential uniformity only needs the a = 1 row of
//! the difference distribution table: delta(a, b) = delta(1, b / a^d).

use std::sync::Arc;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2n::{FieldCtx, Felt};
use crate::run;

/// Scans above this field degree require an explicit opt-in.
pub const SPECTRUM_DEGREE_CEILING: u32 = 24;

const CHUNK: u64 = 1 << 14;
const MAX_WITNESSES: usize = 16;

#[derive(Debug, Error)]
pub enum DiffError {
    #[error("direction a must be nonzero")]
    ZeroDirection,
    #[error("field degree {0} exceeds the exhaustive-scan ceiling {SPECTRUM_DEGREE_CEILING}; pass force to override")]
    FieldTooLarge(u32),
}

/// A power function x |-> x^d over a fixed field.
#[derive(Clone)]
pub struct PowerMap {
    ctx: Arc<FieldCtx>,
    d: u64,
}

impl PowerMap {
    /// The exponent is reduced mod 2^n - 1 (exponents act on the unit
    /// group); a reduction to 0 means x^d is constant on units, which is
    /// degenerate, so the original exponent must not be a multiple of
    /// 2^n - 1.
    pub fn new(ctx: Arc<FieldCtx>, d: u64) -> Option<PowerMap> {
        let order = ctx.group_order();
        let d = d % order;
        if d == 0 {
            return None;
        }
        Some(PowerMap { ctx, d })
    }

    pub fn ctx(&self) -> &Arc<FieldCtx> {
        &self.ctx
    }

    pub fn exponent(&self) -> u64 {
        self.d
    }

    pub fn apply(&self, x: Felt) -> Felt {
        self.ctx.pow(x, self.d)
    }

    /// Number of solutions x of F(x + a) + F(x) = b.
    pub fn derivative_count(&self, a: Felt, b: Felt) -> Result<u64, DiffError> {
        if a == 0 {
            return Err(DiffError::ZeroDirection);
        }
        let ctx = &self.ctx;
        let mut count = 0u64;
        for x in ctx.elements() {
            if self.apply(ctx.add(x, a)) ^ self.apply(x) == b {
                count += 1;
            }
        }
        Ok(count)
    }

    /// The 0-APN test. Returns whether the map is 0-APN together with up to
    /// 16 counterexample witnesses x (in ascending order) when it is not.
    pub fn is_zero_apn(&self) -> (bool, Vec<Felt>) {
        let witnesses = scan_witnesses(&self.ctx, self.d);
        (witnesses.is_empty(), witnesses)
    }

    /// The x0-APN test for an arbitrary base point: every solution (x, y) of
    /// F(x0) + F(x) + F(y) + F(x0 + x + y) = 0 must satisfy
    /// (x0 + x)(x0 + y)(x + y) = 0.
    pub fn is_x0_apn(&self, x0: Felt) -> bool {
        let ctx = &self.ctx;
        let fx0 = self.apply(x0);
        let size = ctx.size();
        let bad = run::map_chunks(size, CHUNK, |lo, hi| {
            for x in lo..hi {
                if x == x0 {
                    continue;
                }
                let fx = self.apply(x);
                for y in (x + 1)..size {
                    if y == x0 {
                        continue;
                    }
                    if fx0 ^ fx ^ self.apply(y) ^ self.apply(x0 ^ x ^ y) == 0 {
                        return true;
                    }
                }
            }
            false
        });
        !bad.into_iter().any(|b| b)
    }

    /// Differential uniformity: max over nonzero a and all b of the number
    /// of solutions of F(x + a) + F(x) = b. For power maps this is the
    /// maximum multiplicity in the a = 1 derivative row.
    pub fn differential_uniformity(&self) -> u64 {
        row_counts(&self.ctx, self.d)
            .into_iter()
            .map(|(_, c)| c)
            .max()
            .unwrap_or(0)
    }

    /// Full differential spectrum: for each solution count k, the number of
    /// pairs (a, b) with a != 0 whose derivative equation has exactly k
    /// solutions. Each a = 1 row count appears once per unit a, i.e. scaled
    /// by 2^n - 1; values b missed by the row contribute to k = 0.
    pub fn diff_spectrum(&self, force: bool) -> Result<Vec<(u64, u64)>, DiffError> {
        let n = self.ctx.degree();
        if n > SPECTRUM_DEGREE_CEILING && !force {
            return Err(DiffError::FieldTooLarge(n));
        }
        let row = row_counts(&self.ctx, self.d);
        let order = self.ctx.group_order();
        let mut by_count: std::collections::BTreeMap<u64, u64> = std::collections::BTreeMap::new();
        let mut b_hit = 0u64;
        for (_, c) in row {
            *by_count.entry(c).or_insert(0) += order;
            b_hit += 1;
        }
        let b_missed = self.ctx.size() - b_hit;
        if b_missed > 0 {
            *by_count.entry(0).or_insert(0) += b_missed * order;
        }
        Ok(by_count.into_iter().collect())
    }
}

/// Witnesses x outside {0,1} with x^d + (x+1)^d + 1 = 0, ascending, capped
/// at 16. Chunked so the parallel and sequential builds agree exactly.
fn scan_witnesses(ctx: &FieldCtx, d: u64) -> Vec<Felt> {
    let size = ctx.size();
    let per_chunk = run::map_chunks(size, CHUNK, |lo, hi| {
        let mut found = Vec::new();
        for x in lo.max(2)..hi {
            if ctx.pow(x, d) ^ ctx.pow(x ^ 1, d) ^ 1 == 0 {
                found.push(x);
                if found.len() == MAX_WITNESSES {
                    break;
                }
            }
        }
        found
    });
    let mut all = Vec::new();
    for chunk in per_chunk {
        for w in chunk {
            if all.len() == MAX_WITNESSES {
                return all;
            }
            all.push(w);
        }
    }
    all
}

/// The a = 1 derivative row as (value, multiplicity) pairs: multiplicities
/// of D(x) = (x+1)^d + x^d over all x, obtained by sorting the value list.
fn row_counts(ctx: &FieldCtx, d: u64) -> Vec<(Felt, u64)> {
    let size = ctx.size();
    let mut values: Vec<Felt> = run::map_chunks(size, CHUNK, |lo, hi| {
        (lo..hi)
            .map(|x| ctx.pow(x ^ 1, d) ^ ctx.pow(x, d))
            .collect::<Vec<_>>()
    })
    .into_iter()
    .flatten()
    .collect();
    values.sort_unstable();
    let mut out = Vec::new();
    let mut i = 0;
    while i < values.len() {
        let mut j = i + 1;
        while j < values.len() && values[j] == values[i] {
            j += 1;
        }
        out.push((values[i], (j - i) as u64));
        i = j;
    }
    out
}

/// Sequential reference implementation of the 0-APN scan, for benchmarks
/// and cross-checks.
pub fn is_zero_apn_seq(ctx: &FieldCtx, d: u64) -> bool {
    for x in 2..ctx.size() {
        if ctx.pow(x, d) ^ ctx.pow(x ^ 1, d) ^ 1 == 0 {
            return false;
        }
    }
    true
}

/// Chunked (parallel under the default feature) 0-APN scan.
pub fn is_zero_apn_par(ctx: &FieldCtx, d: u64) -> bool {
    scan_witnesses(ctx, d).is_empty()
}

/// Serializable result of a single instance check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CheckReport {
    pub n: u32,
    pub d: u64,
    pub modulus_hex: String,
    pub zero_apn: bool,
    pub uniformity: u64,
    /// Counterexamples as hex field elements; empty when `zero_apn`.
    pub witnesses: Vec<String>,
    pub elapsed_ms: u64,
}

impl CheckReport {
    pub fn run(map: &PowerMap) -> CheckReport {
        let start = Instant::now();
        let (zero_apn, wits) = map.is_zero_apn();
        let uniformity = map.differential_uniformity();
        CheckReport {
            n: map.ctx().degree(),
            d: map.exponent(),
            modulus_hex: map.ctx().modulus_hex(),
            zero_apn,
            uniformity,
            witnesses: wits.iter().map(|w| format!("{w:x}")).collect(),
            elapsed_ms: start.elapsed().as_millis() as u64,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn map(n: u32, d: u64) -> PowerMap {
        PowerMap::new(Arc::new(FieldCtx::new(n).unwrap()), d).unwrap()
    }

    #[test]
    fn exponent_reduction() {
        let ctx = Arc::new(FieldCtx::new(4).unwrap());
        assert_eq!(PowerMap::new(ctx.clone(), 18).unwrap().exponent(), 3);
        assert!(PowerMap::new(ctx.clone(), 15).is_none());
        assert!(PowerMap::new(ctx, 0).is_none());
    }

    #[test]
    fn gold_maps_are_apn_hence_zero_apn() {
        // x^3 over GF(2^5): classical APN, uniformity 2
        let m = map(5, 3);
        let (ok, wits) = m.is_zero_apn();
        assert!(ok && wits.is_empty());
        assert_eq!(m.differential_uniformity(), 2);
        assert!(m.is_x0_apn(0));
    }

    #[test]
    fn identity_map_fails() {
        // x^1: the derivative is constant 1, every x >= 2 is a witness
        let m = map(4, 1);
        let (ok, wits) = m.is_zero_apn();
        assert!(!ok);
        assert_eq!(wits, (2..16u64).take(14).collect::<Vec<_>>());
        assert_eq!(m.differential_uniformity(), 16);
        assert!(!m.is_x0_apn(0));
    }

    #[test]
    fn witness_cap_and_order() {
        let m = map(8, 1);
        let (_, wits) = m.is_zero_apn();
        assert_eq!(wits.len(), MAX_WITNESSES);
        assert!(wits.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(wits[0], 2);
    }

    #[test]
    fn zero_apn_iff_x0_apn_at_zero() {
        for n in 3..=7u32 {
            let ctx = Arc::new(FieldCtx::new(n).unwrap());
            for d in 1..ctx.group_order() {
                let m = PowerMap::new(ctx.clone(), d).unwrap();
                assert_eq!(m.is_zero_apn().0, m.is_x0_apn(0), "n={n} d={d}");
            }
        }
    }

    #[test]
    fn uniformity_matches_naive_ddt() {
        for n in 3..=6u32 {
            let ctx = Arc::new(FieldCtx::new(n).unwrap());
            for d in [1u64, 3, 5, 7, (1 << n) - 2] {
                if d % ctx.group_order() == 0 {
                    continue;
                }
                let m = PowerMap::new(ctx.clone(), d).unwrap();
                let mut max = 0u64;
                for a in 1..ctx.size() {
                    for b in 0..ctx.size() {
                        max = max.max(m.derivative_count(a, b).unwrap());
                    }
                }
                assert_eq!(m.differential_uniformity(), max, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn spectrum_sums() {
        let m = map(6, 3);
        let spec = m.diff_spectrum(false).unwrap();
        let order = m.ctx().group_order();
        let size = m.ctx().size();
        // total pairs (a, b): (2^n - 1) * 2^n
        let total: u64 = spec.iter().map(|&(_, c)| c).sum();
        assert_eq!(total, order * size);
        // weighted by k: every (x, a) pair lands somewhere
        let weighted: u64 = spec.iter().map(|&(k, c)| k * c).sum();
        assert_eq!(weighted, order * size);
        // APN map: counts 0 and 2 only
        assert_eq!(spec.iter().map(|&(k, _)| k).collect::<Vec<_>>(), vec![0, 2]);
    }

    #[test]
    fn derivative_count_errors_on_zero_direction() {
        assert!(matches!(
            map(4, 3).derivative_count(0, 1),
            Err(DiffError::ZeroDirection)
        ));
    }

    #[test]
    fn seq_and_chunked_scans_agree() {
        for n in 3..=8u32 {
            let ctx = FieldCtx::new(n).unwrap();
            for d in 1..ctx.group_order() {
                assert_eq!(is_zero_apn_seq(&ctx, d), is_zero_apn_par(&ctx, d));
            }
        }
    }

    #[test]
    fn report_serializes() {
        let r = CheckReport::run(&map(4, 1));
        let js = serde_json::to_string(&r).unwrap();
        let back: CheckReport = serde_json::from_str(&js).unwrap();
        assert_eq!(back.n, 4);
        assert!(!back.zero_apn);
        assert_eq!(back.witnesses[0], "2");
    }
}
