//! Sparse multivariate polynomials over GF(2) in the ordered variables
//! (x, y, z, u, v), with evaluation, exact division and resultant
//! elimination.
//!
//! Every present term has coefficient 1, so a polynomial is just a set of
//! exponent vectors; insertion toggles membership (GF(2) cancellation).
//! Printing uses graded lex order with x > y > z > u > v so outputs diff
//! cleanly.
//!
//! Resultants with respect to a variable are computed by grid
//! evaluation-interpolation over an extension field GF(2^s) large enough for
//! the Bezout-style degree bound in every remaining variable. Degree drops at
//! specialization points are compensated by the leading-coefficient power
//! identity for fixed-size Sylvester determinants, so every grid node is
//! usable.

use std::collections::HashSet;
use std::fmt;

use thiserror::Error;

use crate::gf2n::{FieldCtx, Felt};

/// The fixed variable alphabet, in elimination order.
pub const VAR_NAMES: [char; 5] = ['x', 'y', 'z', 'u', 'v'];
pub const NVARS: usize = 5;

/// Index into [`VAR_NAMES`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Var(pub usize);

impl Var {
    pub const X: Var = Var(0);
    pub const Y: Var = Var(1);
    pub const Z: Var = Var(2);
    pub const U: Var = Var(3);
    pub const V: Var = Var(4);

    pub fn from_name(c: char) -> Option<Var> {
        VAR_NAMES.iter().position(|&v| v == c).map(Var)
    }

    pub fn name(self) -> char {
        VAR_NAMES[self.0]
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MPolyError {
    #[error("syntax error in polynomial: {0}")]
    Syntax(String),
    #[error("unknown variable {0:?} (expected one of x,y,z,u,v)")]
    UnknownVariable(char),
    #[error("variable {0} is unassigned in evaluation")]
    MissingVariable(char),
    #[error("resultant requires positive degree in {0} for both operands")]
    DegreeZeroInVariable(char),
    #[error("leading coefficient vanished at the specialization point")]
    LeadingCoefficientVanished,
    #[error("interpolation field construction failed: {0}")]
    Field(String),
}

/// Exponent vector; entry i is the exponent of VAR_NAMES[i].
pub type Mono = [u16; NVARS];

fn grlex(a: &Mono, b: &Mono) -> std::cmp::Ordering {
    let da: u32 = a.iter().map(|&e| e as u32).sum();
    let db: u32 = b.iter().map(|&e| e as u32).sum();
    da.cmp(&db).then_with(|| a.cmp(b))
}

/// A multivariate polynomial over GF(2); term set kept sorted descending in
/// graded lex order.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct MPoly {
    terms: Vec<Mono>,
}

impl MPoly {
    pub fn zero() -> Self {
        MPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        MPoly {
            terms: vec![[0; NVARS]],
        }
    }

    pub fn var(v: Var) -> Self {
        let mut m = [0u16; NVARS];
        m[v.0] = 1;
        MPoly { terms: vec![m] }
    }

    pub fn from_terms(terms: Vec<Mono>) -> Self {
        let mut set: HashSet<Mono> = HashSet::new();
        for t in terms {
            if !set.insert(t) {
                set.remove(&t);
            }
        }
        let mut terms: Vec<Mono> = set.into_iter().collect();
        terms.sort_by(|a, b| grlex(b, a));
        MPoly { terms }
    }

    pub fn terms(&self) -> &[Mono] {
        &self.terms
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one(&self) -> bool {
        self.terms.len() == 1 && self.terms[0] == [0; NVARS]
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        MPoly::from_terms(terms)
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        let mut set: HashSet<Mono> = HashSet::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            for b in &other.terms {
                let mut m = [0u16; NVARS];
                for i in 0..NVARS {
                    m[i] = a[i]
                        .checked_add(b[i])
                        .expect("exponent overflow (u16)");
                }
                if !set.insert(m) {
                    set.remove(&m);
                }
            }
        }
        let mut terms: Vec<Mono> = set.into_iter().collect();
        terms.sort_by(|a, b| grlex(b, a));
        MPoly { terms }
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one();
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn degree_in(&self, v: Var) -> usize {
        self.terms.iter().map(|m| m[v.0] as usize).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> usize {
        self.terms
            .iter()
            .map(|m| m.iter().map(|&e| e as usize).sum())
            .max()
            .unwrap_or(0)
    }

    /// Bitmask of variables actually present.
    pub fn vars_used(&self) -> u8 {
        let mut mask = 0u8;
        for m in &self.terms {
            for (i, &e) in m.iter().enumerate() {
                if e > 0 {
                    mask |= 1 << i;
                }
            }
        }
        mask
    }

    /// Coefficients as a univariate polynomial in `v`; index i is the
    /// coefficient (an MPoly without `v`) of v^i.
    pub fn univariate_in(&self, v: Var) -> Vec<MPoly> {
        let d = self.degree_in(v);
        let mut coeffs: Vec<Vec<Mono>> = vec![Vec::new(); d + 1];
        for m in &self.terms {
            let mut rest = *m;
            let e = rest[v.0] as usize;
            rest[v.0] = 0;
            coeffs[e].push(rest);
        }
        coeffs.into_iter().map(MPoly::from_terms).collect()
    }

    /// Field value of the polynomial at a point; every used variable must be
    /// assigned.
    pub fn eval(&self, ctx: &FieldCtx, assign: &[Option<Felt>; NVARS]) -> Result<Felt, MPolyError> {
        let used = self.vars_used();
        for i in 0..NVARS {
            if used & (1 << i) != 0 && assign[i].is_none() {
                return Err(MPolyError::MissingVariable(VAR_NAMES[i]));
            }
        }
        let mut acc = 0u64;
        for m in &self.terms {
            let mut t = 1u64;
            for i in 0..NVARS {
                if m[i] > 0 {
                    t = ctx.mul(t, ctx.pow(assign[i].unwrap(), m[i] as u64));
                }
            }
            acc ^= t;
        }
        Ok(acc)
    }

    /// Exact multivariate division; `None` when not divisible.
    pub fn exact_div(&self, d: &MPoly) -> Option<MPoly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let lead = d.terms[0];
        let mut rem = self.clone();
        let mut q_terms: Vec<Mono> = Vec::new();
        while !rem.is_zero() {
            let lt = rem.terms[0];
            let mut t = [0u16; NVARS];
            for i in 0..NVARS {
                if lt[i] < lead[i] {
                    return None;
                }
                t[i] = lt[i] - lead[i];
            }
            q_terms.push(t);
            let tq = MPoly { terms: vec![t] };
            rem = rem.add(&tq.mul(d));
        }
        Some(MPoly::from_terms(q_terms))
    }

    /// Converts a polynomial using only variable `v` into a GF(2)[x]
    /// bitstring polynomial.
    pub fn to_bitpoly(&self, v: Var) -> Option<crate::gf2poly::BitPoly> {
        let mask = self.vars_used();
        if mask & !(1u8 << v.0) != 0 {
            return None;
        }
        let exps: Vec<u64> = self.terms.iter().map(|m| m[v.0] as u64).collect();
        Some(crate::gf2poly::BitPoly::from_exponents(&exps))
    }

    pub fn from_bitpoly(p: &crate::gf2poly::BitPoly, v: Var) -> MPoly {
        let d = match p.degree() {
            None => return MPoly::zero(),
            Some(d) => d,
        };
        let mut terms = Vec::new();
        for i in 0..=d {
            if p.coeff(i) {
                let mut m = [0u16; NVARS];
                m[v.0] = i as u16;
                terms.push(m);
            }
        }
        MPoly::from_terms(terms)
    }

    /// Parses the canonical ASCII syntax: terms joined by `+`, each term a
    /// product of variable powers (explicit `*` optional), e.g.
    /// `y^2*x^2+y^2x+x^3+1`.
    pub fn parse(text: &str) -> Result<Self, MPolyError> {
        let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        if cleaned.is_empty() {
            return Err(MPolyError::Syntax("empty polynomial".into()));
        }
        let mut terms = Vec::new();
        for term in cleaned.split('+') {
            if term.is_empty() {
                return Err(MPolyError::Syntax("empty term".into()));
            }
            let mut mono = [0u16; NVARS];
            let mut constant_zero = false;
            let chars: Vec<char> = term.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let c = chars[i];
                if c == '*' {
                    i += 1;
                    continue;
                }
                if c.is_ascii_digit() {
                    // integer constant, reduced mod 2
                    let mut j = i;
                    let mut val = 0u64;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        val = val * 10 + chars[j].to_digit(10).unwrap() as u64;
                        j += 1;
                    }
                    if val % 2 == 0 {
                        constant_zero = true;
                    }
                    i = j;
                    continue;
                }
                let v = match Var::from_name(c) {
                    Some(v) => v,
                    None => return Err(MPolyError::UnknownVariable(c)),
                };
                i += 1;
                let mut e = 1u16;
                if i < chars.len() && chars[i] == '^' {
                    i += 1;
                    let mut j = i;
                    let mut val = 0u32;
                    while j < chars.len() && chars[j].is_ascii_digit() {
                        val = val * 10 + chars[j].to_digit(10).unwrap();
                        j += 1;
                    }
                    if j == i || val > u16::MAX as u32 {
                        return Err(MPolyError::Syntax(format!("bad exponent in {term:?}")));
                    }
                    e = val as u16;
                    i = j;
                }
                mono[v.0] = mono[v.0]
                    .checked_add(e)
                    .ok_or_else(|| MPolyError::Syntax("exponent overflow".into()))?;
            }
            if !constant_zero {
                terms.push(mono);
            }
        }
        Ok(MPoly::from_terms(terms))
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for m in &self.terms {
            if !first {
                write!(f, "+")?;
            }
            first = false;
            if m.iter().all(|&e| e == 0) {
                write!(f, "1")?;
                continue;
            }
            let mut first_var = true;
            for i in 0..NVARS {
                if m[i] == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                if m[i] == 1 {
                    write!(f, "{}", VAR_NAMES[i])?;
                } else {
                    write!(f, "{}^{}", VAR_NAMES[i], m[i])?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "MPoly({self})")
    }
}

/// One elimination step of a proof chain.
#[derive(Clone, Debug)]
pub struct EliminationStep {
    pub lhs: MPoly,
    pub rhs: MPoly,
    pub variable: Var,
    pub result: MPoly,
}

/// Resultant of `f` and `g` with respect to `var`, i.e. the determinant of
/// their Sylvester matrix viewed as univariate polynomials in `var` with
/// coefficients in GF(2)[remaining vars].
pub fn resultant(f: &MPoly, g: &MPoly, var: Var) -> Result<MPoly, MPolyError> {
    let df = f.degree_in(var);
    let dg = g.degree_in(var);
    if df == 0 || dg == 0 {
        return Err(MPolyError::DegreeZeroInVariable(var.name()));
    }
    let fc = f.univariate_in(var);
    let gc = g.univariate_in(var);

    // remaining variables and per-variable degree bounds
    // deg_w(Res) <= deg_var(f) * deg_w(g) + deg_var(g) * deg_w(f)
    let mut dims: Vec<(Var, usize)> = Vec::new();
    let used = (f.vars_used() | g.vars_used()) & !(1u8 << var.0);
    for i in 0..NVARS {
        if used & (1 << i) != 0 {
            let w = Var(i);
            let bound = df * g.degree_in(w) + dg * f.degree_in(w);
            dims.push((w, bound + 1));
        }
    }

    if dims.is_empty() {
        // both operands univariate in var over GF(2)
        let ctx = FieldCtx::new(1).map_err(|e| MPolyError::Field(e.to_string()))?;
        let fv: Vec<Felt> = fc.iter().map(|c| if c.is_one() { 1 } else { 0 }).collect();
        let gv: Vec<Felt> = gc.iter().map(|c| if c.is_one() { 1 } else { 0 }).collect();
        let r = sylvester_value(&fv, &gv, &ctx);
        return Ok(if r == 1 { MPoly::one() } else { MPoly::zero() });
    }

    // extension field big enough to host every interpolation grid axis
    let max_nodes = dims.iter().map(|&(_, n)| n).max().unwrap();
    let mut s = 2u32;
    while (1u64 << s) < max_nodes as u64 {
        s += 1;
    }
    let ctx = FieldCtx::new(s).map_err(|e| MPolyError::Field(e.to_string()))?;

    // evaluate the determinant on the tensor grid (node i encodes field elt i)
    let sizes: Vec<usize> = dims.iter().map(|&(_, n)| n).collect();
    let total: usize = sizes.iter().product();
    let eval_at = |flat: usize| -> Felt {
        let mut assign: [Option<Felt>; NVARS] = [None; NVARS];
        let mut rem = flat;
        for k in (0..dims.len()).rev() {
            assign[dims[k].0 .0] = Some((rem % sizes[k]) as u64);
            rem /= sizes[k];
        }
        let fv: Vec<Felt> = fc.iter().map(|c| c.eval(&ctx, &assign).unwrap()).collect();
        let gv: Vec<Felt> = gc.iter().map(|c| c.eval(&ctx, &assign).unwrap()).collect();
        sylvester_value(&fv, &gv, &ctx)
    };
    let values: Vec<Felt> = crate::run::map_indexed(total, eval_at);

    // interpolate dimension by dimension
    let coeffs = interp_grid(&values, &sizes, &ctx);

    // assemble: every surviving coefficient must be 0 or 1
    let mut terms = Vec::new();
    for (flat, &c) in coeffs.iter().enumerate() {
        if c == 0 {
            continue;
        }
        assert_eq!(c, 1, "resultant interpolation produced a non-GF(2) coefficient");
        let mut m = [0u16; NVARS];
        let mut rem = flat;
        for k in (0..dims.len()).rev() {
            m[dims[k].0 .0] = (rem % sizes[k]) as u16;
            rem /= sizes[k];
        }
        terms.push(m);
    }
    Ok(MPoly::from_terms(terms))
}

/// Resultant of the two polynomials specialized at `point` (all variables
/// except `var`), computed by the Euclidean remainder method over the field.
/// Cross-checks the interpolated resultant: the symbolic result evaluated at
/// the point must equal this value whenever the leading coefficients survive.
pub fn resultant_univariate_oracle(
    f: &MPoly,
    g: &MPoly,
    var: Var,
    ctx: &FieldCtx,
    point: &[Option<Felt>; NVARS],
) -> Result<Felt, MPolyError> {
    let df = f.degree_in(var);
    let dg = g.degree_in(var);
    if df == 0 || dg == 0 {
        return Err(MPolyError::DegreeZeroInVariable(var.name()));
    }
    let fv: Vec<Felt> = f
        .univariate_in(var)
        .iter()
        .map(|c| c.eval(ctx, point))
        .collect::<Result<_, _>>()?;
    let gv: Vec<Felt> = g
        .univariate_in(var)
        .iter()
        .map(|c| c.eval(ctx, point))
        .collect::<Result<_, _>>()?;
    if *fv.last().unwrap() == 0 || *gv.last().unwrap() == 0 {
        return Err(MPolyError::LeadingCoefficientVanished);
    }
    Ok(euclid_resultant(fv, gv, ctx))
}

/// Value of the order-(deg f + deg g) Sylvester determinant at a point,
/// with formal degrees given by the slice lengths. A drop in one operand's
/// actual degree contributes the other's leading coefficient as a power
/// factor; a drop in both zeroes the first column, hence the determinant.
pub(crate) fn sylvester_value(f: &[Felt], g: &[Felt], ctx: &FieldCtx) -> Felt {
    let nf = f.len() - 1;
    let mg = g.len() - 1;
    let af = trim(f);
    let ag = trim(g);
    if af.is_empty() || ag.is_empty() {
        return 0; // one side identically zero
    }
    let nf_act = af.len() - 1;
    let mg_act = ag.len() - 1;
    if nf_act < nf && mg_act < mg {
        return 0;
    }
    let mut acc = 1u64;
    if nf_act < nf {
        acc = ctx.mul(acc, ctx.pow(*ag.last().unwrap(), (nf - nf_act) as u64));
    }
    if mg_act < mg {
        acc = ctx.mul(acc, ctx.pow(*af.last().unwrap(), (mg - mg_act) as u64));
    }
    ctx.mul(acc, euclid_resultant(af.to_vec(), ag.to_vec(), ctx))
}

fn trim(v: &[Felt]) -> &[Felt] {
    let mut n = v.len();
    while n > 0 && v[n - 1] == 0 {
        n -= 1;
    }
    &v[..n]
}

/// Euclidean resultant of two univariate polynomials with exact degrees
/// (nonzero leading coefficients). Signs are immaterial in characteristic 2.
fn euclid_resultant(mut a: Vec<Felt>, mut b: Vec<Felt>, ctx: &FieldCtx) -> Felt {
    let mut res = 1u64;
    if a.len() < b.len() {
        std::mem::swap(&mut a, &mut b);
    }
    loop {
        if b.len() == 1 {
            // res(a, c) = c^(deg a)
            return ctx.mul(res, ctx.pow(b[0], (a.len() - 1) as u64));
        }
        let r = poly_rem(&a, &b, ctx);
        let da = a.len() - 1;
        if r.is_empty() {
            return 0; // common factor
        }
        let dr = r.len() - 1;
        res = ctx.mul(res, ctx.pow(*b.last().unwrap(), (da - dr) as u64));
        a = b;
        b = r;
    }
}

/// Remainder of a by b over the field; inputs have exact degrees, output is
/// trimmed (empty = zero).
fn poly_rem(a: &[Felt], b: &[Felt], ctx: &FieldCtx) -> Vec<Felt> {
    let db = b.len() - 1;
    let inv_lead = ctx.inv(*b.last().unwrap()).expect("exact degree");
    let mut r = a.to_vec();
    while r.len() > db {
        let lead = *r.last().unwrap();
        if lead != 0 {
            let c = ctx.mul(lead, inv_lead);
            let shift = r.len() - 1 - db;
            for i in 0..db {
                r[shift + i] ^= ctx.mul(c, b[i]);
            }
        }
        r.pop();
        while r.len() > db && *r.last().unwrap() == 0 {
            r.pop();
        }
    }
    trim(&r).to_vec()
}

/// Per-dimension Newton interpolation over a tensor grid; nodes along a
/// dimension of size k are the field elements 0..k.
fn interp_grid(values: &[Felt], sizes: &[usize], ctx: &FieldCtx) -> Vec<Felt> {
    let mut data = values.to_vec();
    let mut block: usize = sizes.iter().product();
    // process dimensions from outermost to innermost
    for (dim, &k) in sizes.iter().enumerate() {
        let stride = block / k;
        let repeats: usize = data.len() / block;
        let _ = dim;
        for r in 0..repeats {
            let base = r * block;
            for off in 0..stride {
                // gather the k samples along this axis
                let mut ys: Vec<Felt> = (0..k).map(|i| data[base + i * stride + off]).collect();
                newton_interpolate(&mut ys, ctx);
                for i in 0..k {
                    data[base + i * stride + off] = ys[i];
                }
            }
        }
        block = stride;
    }
    data
}

/// In-place Newton interpolation: input point values at nodes 0..k (as field
/// elements), output monomial coefficients.
fn newton_interpolate(ys: &mut [Felt], ctx: &FieldCtx) {
    let k = ys.len();
    if k == 1 {
        return;
    }
    // divided differences; node arithmetic is XOR of the index bits
    for level in 1..k {
        for i in (level..k).rev() {
            let num = ys[i] ^ ys[i - 1];
            let den = (i as u64) ^ ((i - level) as u64);
            ys[i] = ctx.mul(num, ctx.inv(den).expect("distinct nodes"));
        }
    }
    // expand the Newton form to monomial coefficients
    let mut coeffs = vec![0u64; k];
    for i in (0..k).rev() {
        // coeffs = coeffs * (t - node_i) + dd[i]
        for j in (1..k).rev() {
            coeffs[j] = coeffs[j - 1] ^ ctx.mul(coeffs[j], i as u64);
        }
        coeffs[0] = ctx.mul(coeffs[0], i as u64) ^ ys[i];
    }
    ys.copy_from_slice(&coeffs);
}
