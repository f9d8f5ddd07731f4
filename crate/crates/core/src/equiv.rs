//! CCZ-equivalence of power exponents via cyclotomic cosets, plus the
//! catalog of known exponent families used for classification.
//!
//! Two power maps x^d and x^e over GF(2^n) are CCZ-equivalent whenever e
//! lies in the cyclotomic coset of d modulo 2^n - 1, or gcd(d, 2^n - 1) = 1
//! and e lies in the coset of the inverse exponent d^{-1} mod 2^n - 1
//! (the inverse map parametrizes the same graph). This sufficient condition
//! is what the classifier decides; inequivalence claims mean "not equivalent
//! by these moves".

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Bindings, Constraint, Expr, ExprError};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("catalog line {0}: {1}")]
    Line(usize, String),
    #[error("expression error: {0}")]
    Expr(#[from] ExprError),
}

/// The cyclotomic coset of `d` modulo 2^n - 1, i.e. {d * 2^i mod 2^n - 1},
/// sorted ascending.
pub fn cyclotomic_coset(d: u64, n: u32) -> Vec<u64> {
    let order = (1u64 << n) - 1;
    let d = d % order;
    let mut out = Vec::new();
    let mut cur = d;
    loop {
        out.push(cur);
        cur = (cur as u128 * 2 % order as u128) as u64;
        if cur == d {
            break;
        }
    }
    out.sort_unstable();
    out
}

/// Inverse of `a` modulo `m` when gcd(a, m) = 1.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Decides the coset-based CCZ-equivalence condition for exponents d and e
/// over GF(2^n).
pub fn ccz_equivalent_power(d: u64, e: u64, n: u32) -> bool {
    let order = (1u64 << n) - 1;
    let d = d % order;
    let e = e % order;
    let coset = cyclotomic_coset(d, n);
    if coset.binary_search(&e).is_ok() {
        return true;
    }
    match mod_inverse(d, order) {
        Some(di) => cyclotomic_coset(di, n).binary_search(&e).is_ok(),
        None => false,
    }
}

/// What kind of known behavior a catalog entry certifies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// Classical APN exponent family (hence also 0-APN).
    Apn,
    /// Exponent family known to be 0-APN but not APN in general.
    ZeroApn,
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Apn => write!(f, "apn"),
            FamilyKind::ZeroApn => write!(f, "zero-apn"),
        }
    }
}

/// One parametrized exponent family: d and n as expressions in the free
/// parameter m (or in n directly), plus side constraints.
#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub name: String,
    pub kind: FamilyKind,
    pub d_expr: Expr,
    pub n_expr: Expr,
    pub constraints: Vec<Constraint>,
}

impl CatalogEntry {
    /// All exponents d this family produces over GF(2^n), reduced modulo
    /// 2^n - 1, over every admissible parameter value.
    pub fn exponents_for_degree(&self, n: u32) -> Vec<u64> {
        let order = (1u128 << n) - 1;
        let mut out = Vec::new();
        // the parameter m never exceeds n for the shapes we store
        for m in 0..=(n as i128 + 2) {
            let b = Bindings {
                m: Some(m),
                n: Some(n as i128),
            };
            let Ok(nv) = self.n_expr.eval(&b) else { continue };
            if nv != n as i128 {
                continue;
            }
            let ok = self
                .constraints
                .iter()
                .all(|c| c.holds(&b).unwrap_or(false));
            if !ok {
                continue;
            }
            let Ok(dv) = self.d_expr.eval(&b) else { continue };
            let d = dv.rem_euclid(order as i128) as u64;
            if d != 0 {
                out.push(d);
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// A classification hit: the matched family and the member exponent whose
/// coset (or inverse coset) contains the query.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Classification {
    pub family: String,
    pub kind: FamilyKind,
    pub member_exponent: u64,
    pub via_inverse: bool,
}

/// The built-in exponent catalog, embedded at compile time. Extra families
/// can be appended at runtime from files in the same line format.
pub const DEFAULT_CATALOG: &str = include_str!("../data/catalog.txt");

/// Parses catalog text: one family per line,
/// `name | kind | d_expr | n_expr | constraint; constraint; ...`
/// with `#` comments and blank lines ignored.
pub fn parse_catalog(text: &str) -> Result<Vec<CatalogEntry>, CatalogError> {
    let mut out = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        if !(4..=5).contains(&parts.len()) {
            return Err(CatalogError::Line(
                lineno,
                format!("expected 4 or 5 '|' fields, got {}", parts.len()),
            ));
        }
        let kind = match parts[1] {
            "apn" => FamilyKind::Apn,
            "zero-apn" => FamilyKind::ZeroApn,
            other => {
                return Err(CatalogError::Line(
                    lineno,
                    format!("unknown kind {other:?} (expected apn or zero-apn)"),
                ))
            }
        };
        let d_expr = Expr::parse(parts[2])
            .map_err(|e| CatalogError::Line(lineno, e.to_string()))?;
        let n_expr = Expr::parse(parts[3])
            .map_err(|e| CatalogError::Line(lineno, e.to_string()))?;
        let mut constraints = Vec::new();
        if parts.len() == 5 && !parts[4].is_empty() {
            for c in parts[4].split(';') {
                let c = c.trim();
                if c.is_empty() {
                    continue;
                }
                constraints.push(
                    Constraint::parse(c)
                        .map_err(|e| CatalogError::Line(lineno, e.to_string()))?,
                );
            }
        }
        out.push(CatalogEntry {
            name: parts[0].to_string(),
            kind,
            d_expr,
            n_expr,
            constraints,
        });
    }
    Ok(out)
}

/// Loads the embedded catalog (panics only on a build-time data defect).
pub fn default_catalog() -> Vec<CatalogEntry> {
    parse_catalog(DEFAULT_CATALOG).expect("embedded catalog is well-formed")
}

/// All catalog families whose cosets explain the exponent d over GF(2^n).
pub fn classify(d: u64, n: u32, catalog: &[CatalogEntry]) -> Vec<Classification> {
    let order = (1u64 << n) - 1;
    let d = d % order;
    if d == 0 {
        return Vec::new();
    }
    let coset = cyclotomic_coset(d, n);
    let inv_coset = mod_inverse(d, order).map(|di| cyclotomic_coset(di, n));
    let mut hits = Vec::new();
    for entry in catalog {
        for e in entry.exponents_for_degree(n) {
            if coset.binary_search(&e).is_ok() {
                hits.push(Classification {
                    family: entry.name.clone(),
                    kind: entry.kind,
                    member_exponent: e,
                    via_inverse: false,
                });
                break;
            }
            if let Some(ic) = &inv_coset {
                if ic.binary_search(&e).is_ok() {
                    hits.push(Classification {
                        family: entry.name.clone(),
                        kind: entry.kind,
                        member_exponent: e,
                        via_inverse: true,
                    });
                    break;
                }
            }
        }
    }
    hits
}

/// Pairwise coset-equivalence matrix for a list of (label, d, n) instances
/// sharing the same n. Entry (i, j) is true when the exponents are
/// equivalent under the coset moves.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PairwiseReport {
    pub n: u32,
    pub labels: Vec<String>,
    pub exponents: Vec<u64>,
    pub equivalent: Vec<Vec<bool>>,
}

pub fn pairwise_inequivalence_report(
    n: u32,
    instances: &[(String, u64)],
) -> PairwiseReport {
    let k = instances.len();
    let mut matrix = vec![vec![false; k]; k];
    for i in 0..k {
        for j in 0..k {
            matrix[i][j] = i == j || ccz_equivalent_power(instances[i].1, instances[j].1, n);
        }
    }
    PairwiseReport {
        n,
        labels: instances.iter().map(|(l, _)| l.clone()).collect(),
        exponents: instances.iter().map(|&(_, d)| d).collect(),
        equivalent: matrix,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coset_of_3_mod_31() {
        assert_eq!(cyclotomic_coset(3, 5), vec![3, 6, 12, 17, 24]);
    }

    #[test]
    fn coset_closure_and_size_divides_n() {
        for n in 2..=12u32 {
            let order = (1u64 << n) - 1;
            for d in 1..order.min(200) {
                let c = cyclotomic_coset(d, n);
                assert_eq!(n % c.len() as u32, 0, "d={d} n={n}");
                for &e in &c {
                    assert!(c.binary_search(&(e * 2 % order)).is_ok());
                }
            }
        }
    }

    #[test]
    fn inverse_mod() {
        assert_eq!(mod_inverse(3, 31), Some(21));
        assert_eq!(mod_inverse(3, 15), None);
        assert_eq!(mod_inverse(1, 7), Some(1));
    }

    #[test]
    fn equivalence_examples() {
        // same coset: 3 ~ 6 over GF(2^5)
        assert!(ccz_equivalent_power(3, 6, 5));
        // inverse coset: 3^{-1} = 21 mod 31, coset of 21 contains 11
        assert!(ccz_equivalent_power(3, 11, 5));
        // 3 and 5 are in different cosets over GF(2^5), and 5 is not in the
        // coset of 21 either
        assert!(!ccz_equivalent_power(3, 5, 5));
        // symmetric
        for (d, e) in [(3u64, 5u64), (3, 7), (5, 11), (7, 15)] {
            assert_eq!(
                ccz_equivalent_power(d, e, 5),
                ccz_equivalent_power(e, d, 5)
            );
        }
    }

    #[test]
    fn equivalence_is_coset_invariant() {
        for n in [6u32, 9] {
            let order = (1u64 << n) - 1;
            for d in [3u64, 5, 7, 35 % order] {
                for &e in &cyclotomic_coset(d, n) {
                    assert!(ccz_equivalent_power(d, e, n));
                }
            }
        }
    }

    #[test]
    fn catalog_parses_and_matches_gold() {
        let cat = default_catalog();
        assert!(cat.len() >= 20);
        // x^3 is Gold with i = 1 on every n >= 3 with gcd(1, n) = 1
        let hits = classify(3, 7, &cat);
        assert!(hits.iter().any(|h| h.family == "gold" && h.kind == FamilyKind::Apn));
        // kasami i=2 over GF(2^5): 2^4 - 2^2 + 1 = 13
        let hits = classify(13, 5, &cat);
        assert!(hits.iter().any(|h| h.family == "kasami"));
        // inverse exponent over GF(2^7): 2^7 - 2 = 126
        let hits = classify(126, 7, &cat);
        assert!(hits.iter().any(|h| h.family == "inverse"));
    }

    #[test]
    fn catalog_welch_niho_dobbertin() {
        let cat = default_catalog();
        // welch n=5 (m=2): 2^2 + 3 = 7
        assert!(classify(7, 5, &cat).iter().any(|h| h.family == "welch"));
        // niho n=9 (m=2, 4m+1): 2^4 + 2^2 - 1 = 19
        assert!(classify(19, 9, &cat).iter().any(|h| h.family == "niho"));
        // dobbertin n=5 (m=1): 2^4 + 2^3 + 2^2 + 2 - 1 = 29
        assert!(classify(29, 5, &cat).iter().any(|h| h.family == "dobbertin"));
    }

    #[test]
    fn catalog_new_families_present() {
        let cat = default_catalog();
        // family over n = 2m+1 with d = 2^(m+1) + 3: m=4 gives (35, 9)
        assert!(classify(35, 9, &cat)
            .iter()
            .any(|h| h.kind == FamilyKind::ZeroApn));
        // family over n = 4m-1 with d = 3 * (2^(2m+1) - 1): m=3 gives (381, 11)
        assert!(classify(381, 11, &cat)
            .iter()
            .any(|h| h.kind == FamilyKind::ZeroApn));
        // family over n = 5m with d = 2^(3m) + 2^m + 1: m=2 gives (69, 10)
        assert!(classify(69, 10, &cat)
            .iter()
            .any(|h| h.kind == FamilyKind::ZeroApn));
    }

    #[test]
    fn classify_rejects_degenerate() {
        let cat = default_catalog();
        assert!(classify(31, 5, &cat).is_empty());
    }

    #[test]
    fn pairwise_matrix_shape() {
        let rep = pairwise_inequivalence_report(
            5,
            &[("a".into(), 3), ("b".into(), 6), ("c".into(), 5)],
        );
        assert!(rep.equivalent[0][1] && rep.equivalent[1][0]);
        assert!(!rep.equivalent[0][2]);
        assert!(rep.equivalent.iter().enumerate().all(|(i, row)| row[i]));
    }

    #[test]
    fn catalog_line_errors() {
        assert!(parse_catalog("bad line").is_err());
        assert!(parse_catalog("x | nope | 3 | n").is_err());
        assert!(parse_catalog("x | apn | 3 | n | gcd(").is_err());
        assert!(parse_catalog("# comment only\n\n").unwrap().is_empty());
    }
}
