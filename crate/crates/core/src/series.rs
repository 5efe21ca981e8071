//! Truncated β series of f_{2k}(s), their certified tails, and master-equation residuals
//! in the N → ∞ theory.

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::catalan::catalan;
use crate::coeff::CoeffTable;
use crate::ops::{entries_at, operation_catalog, Family, Sign};
use crate::sequence::LoopSequence;

/// Σ_{i ≤ i_max} a_{i,k}(s) β^i together with a bound on the rest of the series.
#[derive(Clone, Debug)]
pub struct SeriesValue {
    pub k: u32,
    pub beta: BigRational,
    pub i_max: u32,
    pub coefficients: Vec<BigRational>,
    pub exact: BigRational,
    pub value: f64,
    /// Bound on Σ_{i > i_max} |a_{i,k}(s)||β|^i; +∞ when not certified.
    pub tail_bound: f64,
    /// 2|β|K^{5+2k} < 1 with K = 1024d.
    pub certified: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SeriesReport {
    pub k: u32,
    pub beta: String,
    pub i_max: u32,
    pub value: f64,
    pub value_exact: String,
    pub tail_bound: f64,
    pub certified: bool,
}

impl SeriesValue {
    pub fn report(&self) -> SeriesReport {
        SeriesReport {
            k: self.k,
            beta: self.beta.to_string(),
            i_max: self.i_max,
            value: self.value,
            value_exact: self.exact.to_string(),
            tail_bound: self.tail_bound,
            certified: self.certified,
        }
    }
}

/// Parse a decimal or fraction (`1e-4`, `0.25`, `3/7`) exactly.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let t = text.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().ok()?;
        let d: BigInt = d.trim().parse().ok()?;
        return (!d.is_zero()).then(|| BigRational::new(n, d));
    }
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(p) => (&t[..p], t[p + 1..].parse::<i32>().ok()?),
        None => (t, 0),
    };
    let (neg, mant) = match mant.strip_prefix('-') {
        Some(m) => (true, m),
        None => (false, mant.strip_prefix('+').unwrap_or(mant)),
    };
    let (int_part, frac_part) = mant.split_once('.').unwrap_or((mant, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits: BigInt = format!("{int_part}{frac_part}0").parse::<BigInt>().ok()? / 10;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut v = if scale >= 0 {
        BigRational::from_integer(digits * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(digits, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        v = -v;
    }
    Some(v)
}

fn ln_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap_or(f64::INFINITY).ln();
    }
    let shift = bits - 64;
    (n >> shift).to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let Some(v) = r.to_f64().filter(|v| v.is_normal()) {
        return v;
    }
    let (n, d) = (r.numer().magnitude(), r.denom().magnitude());
    let v = (ln_big(n) - ln_big(d)).exp();
    if r.is_negative() {
        -v
    } else {
        v
    }
}

fn ln_rational(r: &BigRational) -> f64 {
    ln_big(r.numer().magnitude()) - ln_big(r.denom().magnitude())
}

/// ln of K^{ι(δ)}|δ|^{3k}ΠC_{δ_j−1}, and ln(|β|K^{5+2k}).
fn log_bound_parts(k: u32, s: &LoopSequence, beta: &BigRational, d: usize) -> (f64, f64) {
    let ln_k = ((1024 * d) as f64).ln();
    let mut pre = s.index() as f64 * ln_k;
    if k > 0 {
        pre += 3.0 * k as f64 * (s.len() as f64).ln();
    }
    for deg in s.degrees() {
        pre += ln_big(&catalan(deg as u64 - 1));
    }
    let ln_r = if beta.is_zero() { f64::NEG_INFINITY } else { ln_rational(&beta.abs()) + (5 + 2 * k) as f64 * ln_k };
    (pre, ln_r)
}

/// Is 2|β|K^{5+2k} < 1?
pub fn is_certified(k: u32, beta: &BigRational, d: usize) -> bool {
    let kk = BigRational::from_integer(BigInt::from(1024 * d as u64));
    BigRational::from_integer(2.into()) * beta.abs() * num_traits::pow(kk, 5 + 2 * k as usize) < BigRational::one()
}

/// Bound on the tail Σ_{i > i_max} of the series; +∞ unless certified.
pub fn tail_bound(k: u32, s: &LoopSequence, beta: &BigRational, i_max: u32, d: usize) -> f64 {
    if s.is_null() || beta.is_zero() {
        return 0.0;
    }
    if !is_certified(k, beta, d) {
        return f64::INFINITY;
    }
    let (pre, ln_r) = log_bound_parts(k, s, beta, d);
    let r = ln_r.exp();
    (pre + (i_max as f64 + 1.0) * ln_r - (1.0 - r).ln()).exp()
}

/// (2^{3k+12}d)^{|s|}, as a natural logarithm.
pub fn ln_magnitude_bound(k: u32, s: &LoopSequence, d: usize) -> f64 {
    s.len() as f64 * ((3 * k + 12) as f64 * std::f64::consts::LN_2 + (d as f64).ln())
}

pub fn f_value(table: &CoeffTable, k: u32, s: &LoopSequence, beta: &BigRational, i_max: u32, d: usize) -> SeriesValue {
    let coefficients: Vec<BigRational> = (0..=i_max).map(|i| table.a(i as i64, k as i64, s)).collect();
    let exact = eval(&coefficients, beta);
    SeriesValue {
        k,
        beta: beta.clone(),
        i_max,
        value: to_f64(&exact),
        exact,
        tail_bound: tail_bound(k, s, beta, i_max, d),
        certified: s.is_null() || is_certified(k, beta, d),
        coefficients,
    }
}

pub fn eval(coefficients: &[BigRational], beta: &BigRational) -> BigRational {
    coefficients.iter().rev().fold(BigRational::zero(), |acc, c| acc * beta + c)
}

/// Dense polynomial in β with rational coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Poly(Vec<BigRational>);

impl Poly {
    fn zero(n: usize) -> Self {
        Poly(vec![BigRational::zero(); n])
    }

    /// self += c · β^shift · p
    fn add_scaled(&mut self, p: &[BigRational], c: &BigRational, shift: usize) {
        for (i, v) in p.iter().enumerate() {
            if i + shift < self.0.len() && !v.is_zero() {
                self.0[i + shift] += c * v;
            }
        }
    }
}

/// Residual of the symmetrized limit equation with every f replaced by its truncation.
#[derive(Clone, Debug)]
pub struct MasterResidual {
    pub k: u32,
    pub i_max: u32,
    /// Coefficients of β^0 … β^{i_max+1} of LHS − RHS.
    pub polynomial: Vec<BigRational>,
    /// What the β^{i_max+1} coefficient must equal if the truncated series are exact to
    /// order i_max: minus the non-β part of the equation at order i_max + 1.
    pub predicted_top: BigRational,
    pub residual: BigRational,
    pub residual_f64: f64,
    /// Σ of the tail bounds of every term, weighted as in the equation.
    pub tail_budget: f64,
}

impl MasterResidual {
    pub fn lower_orders_vanish(&self) -> bool {
        self.polynomial[..=self.i_max as usize].iter().all(Zero::is_zero)
    }

    pub fn top_matches(&self) -> bool {
        self.polynomial[self.i_max as usize + 1] == self.predicted_top
    }

    pub fn within_budget(&self) -> bool {
        self.residual_f64.abs() <= self.tail_budget
    }
}

fn series(table: &CoeffTable, i_lo: u32, i_hi: u32, k: i64, s: &LoopSequence) -> Vec<BigRational> {
    (0..=i_hi)
        .map(|i| if i < i_lo { BigRational::zero() } else { table.a(i as i64, k, s) })
        .collect()
}

/// Evaluate
///
/// |s|f_{2k}(s) − ℓ(s)f_{2k−2}(s) − Σ_{M⁻}f_{2k−2} + Σ_{M⁺}f_{2k−2} − Σ_{S⁻}f_{2k} + Σ_{S⁺}f_{2k}
///   − (β/2)(Σ_{D⁻} − Σ_{D⁺} + Σ_{E⁻} − Σ_{E⁺})f_{2k}
///
/// with each f truncated at i_max.
pub fn master_residual_limit(
    table: &CoeffTable,
    s: &LoopSequence,
    k: u32,
    beta: &BigRational,
    i_max: u32,
    d: usize,
) -> MasterResidual {
    assert!(!s.is_null(), "the master equation is stated for non-null sequences");
    let n = i_max as usize + 2;
    let kk = k as i64;
    let half = BigRational::new(1.into(), 2.into());
    let one = BigRational::one();
    let mut p = Poly::zero(n);
    let mut top = BigRational::zero();
    let big_i = i_max as i64 + 1;

    let len = BigRational::from_integer(BigInt::from(s.len()));
    let ell = BigRational::from_integer(BigInt::from(s.ell()));
    p.add_scaled(&series(table, 0, i_max, kk, s), &len, 0);
    p.add_scaled(&series(table, 0, i_max, kk - 1, s), &-&ell, 0);
    top -= &len * table.a(big_i, kk, s) - &ell * table.a(big_i, kk - 1, s);

    let mut budget = len.to_f64().unwrap() * tail_bound(k, s, beta, i_max, d);
    if k > 0 && !ell.is_zero() {
        budget += ell.to_f64().unwrap() * tail_bound(k - 1, s, beta, i_max, d);
    }
    let beta_half = to_f64(&beta.abs()) / 2.0;

    let cat = operation_catalog(s).expect("non-null");
    for en in cat.entries.iter().skip(1) {
        let family = en.op.kind.family();
        // sign with which the term enters LHS − RHS
        let neg = en.op.kind.sign() == Some(Sign::Minus);
        let c = if neg { -&one } else { one.clone() };
        let r = &en.result;
        match family {
            Family::Merger => {
                p.add_scaled(&series(table, 0, i_max, kk - 1, r), &c, 0);
                top -= &c * table.a(big_i, kk - 1, r);
                if k > 0 {
                    budget += tail_bound(k - 1, r, beta, i_max, d);
                }
            }
            Family::Split => {
                p.add_scaled(&series(table, 0, i_max, kk, r), &c, 0);
                top -= &c * table.a(big_i, kk, r);
                budget += tail_bound(k, r, beta, i_max, d);
            }
            Family::Deform | Family::Expand => {
                p.add_scaled(&series(table, 0, i_max, kk, r), &(&c * &half), 1);
                if beta_half > 0.0 {
                    budget += beta_half * tail_bound(k, r, beta, i_max, d);
                }
            }
            Family::Inaction => unreachable!("inaction is the first entry"),
        }
    }
    let residual = eval(&p.0, beta);
    MasterResidual {
        k,
        i_max,
        polynomial: p.0,
        predicted_top: top,
        residual_f64: to_f64(&residual),
        residual,
        tail_budget: budget,
    }
}

/// The f_0 equation at coupling 2β with the expansion terms dropped:
/// m f_0(s) − Σ_split f_0 − β Σ_deform f_0, unsymmetrized at the first edge of l₁,
/// every f_0 evaluated at 2β. Also returns the dropped expansion sum, which factorization
/// makes vanish order by order.
pub struct ReducedResidual {
    pub polynomial: Vec<BigRational>,
    pub expansion_sum: Vec<BigRational>,
}

pub fn reduced_residual(table: &CoeffTable, s: &LoopSequence, i_max: u32) -> ReducedResidual {
    assert!(!s.is_null());
    let n = i_max as usize + 1;
    let two = BigRational::from_integer(2.into());
    // f_0(·; 2β) coefficients up to i_max
    let f2 = |r: &LoopSequence| -> Vec<BigRational> {
        (0..=i_max)
            .map(|i| table.a(i as i64, 0, r) * num_traits::pow(two.clone(), i as usize))
            .collect()
    };
    let l1 = &s.loops()[0];
    let e = l1.edges()[0].clone();
    let c1 = s.occurrences(&e).c(0);
    let m = BigRational::from_integer(BigInt::from(c1.len()));
    let mut p = Poly::zero(n);
    let mut ex = Poly::zero(n);
    p.add_scaled(&f2(s), &m, 0);
    let mut entries = Vec::new();
    for &x in &c1 {
        entries_at(s, 1, x, &mut entries);
    }
    let one = BigRational::one();
    for en in &entries {
        let sign = if en.op.kind.sign() == Some(Sign::Plus) { -&one } else { one.clone() };
        match en.op.kind.family() {
            Family::Split => p.add_scaled(&f2(&en.result), &-&sign, 0),
            Family::Deform => p.add_scaled(&f2(&en.result), &-&sign, 1),
            Family::Expand => ex.add_scaled(&f2(&en.result), &sign, 1),
            Family::Merger | Family::Inaction => {}
        }
    }
    ReducedResidual { polynomial: p.0, expansion_sum: ex.0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Loop, Vertex};

    fn p() -> LoopSequence {
        LoopSequence::single(Loop::from_steps(&Vertex::origin(2), &[1, 2, -1, -2]).unwrap())
    }

    #[test]
    fn parse_decimal_exactly() {
        assert_eq!(parse_rational("1e-4").unwrap(), BigRational::new(1.into(), 10000.into()));
        assert_eq!(parse_rational("0.25").unwrap(), BigRational::new(1.into(), 4.into()));
        assert_eq!(parse_rational("-3/6").unwrap(), BigRational::new((-1).into(), 2.into()));
        assert_eq!(parse_rational("2.5E2").unwrap(), BigRational::from_integer(250.into()));
        assert!(parse_rational("abc").is_none());
    }

    #[test]
    fn null_sequence_is_one() {
        let t = CoeffTable::new();
        let v = f_value(&t, 0, &LoopSequence::null(), &parse_rational("0.3").unwrap(), 4, 2);
        assert_eq!(v.exact, BigRational::one());
        assert_eq!(v.tail_bound, 0.0);
    }

    #[test]
    fn plaquette_leading_term() {
        let t = CoeffTable::new();
        let beta = parse_rational("1e-4").unwrap();
        let v = f_value(&t, 0, &p(), &beta, 3, 2);
        assert_eq!(v.exact, beta / BigRational::from_integer(2.into()));
        assert!(!v.certified);
    }

    #[test]
    fn residual_at_zero_coupling() {
        let t = CoeffTable::new();
        let r = master_residual_limit(&t, &p(), 0, &BigRational::zero(), 3, 2);
        assert!(r.residual.is_zero());
    }
}
