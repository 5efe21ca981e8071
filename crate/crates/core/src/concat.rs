//! Concatenation of vanishing trajectories and the interleaving-weight identity.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::enumerate::{enumerate_vanishing, sums_over_trajectories, CatalogCache, EnumConfig};
use crate::error::{EnumerateError, OpError};
use crate::ops::Family;
use crate::sequence::LoopSequence;
use crate::trajectory::Trajectory;
use crate::weight::SymbolicWeight;

/// All α: {0..n+m} → {0..n} with α(0) = 0, α(n+m) = n and unit or zero steps, given as
/// their step vectors (true where α increases).
pub fn interleavings(n: usize, m: usize) -> Vec<Vec<bool>> {
    fn go(n: usize, m: usize, cur: &mut Vec<bool>, out: &mut Vec<Vec<bool>>) {
        if n == 0 && m == 0 {
            out.push(cur.clone());
            return;
        }
        if n > 0 {
            cur.push(true);
            go(n - 1, m, cur, out);
            cur.pop();
        }
        if m > 0 {
            cur.push(false);
            go(n, m - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(n, m, &mut Vec::with_capacity(n + m), &mut out);
    out
}

/// Σ_α Π_{i<n+m} 1/(a_{α(i)} + b_{i−α(i)}), with a_n = b_m = 0 appended implicitly.
pub fn interleaving_sum(a: &[BigRational], b: &[BigRational]) -> BigRational {
    let (n, m) = (a.len(), b.len());
    let at = |v: &[BigRational], i: usize| v.get(i).cloned().unwrap_or_else(BigRational::zero);
    let mut total = BigRational::zero();
    for steps in interleavings(n, m) {
        let (mut i, mut j) = (0, 0);
        let mut term = BigRational::one();
        for up in steps {
            term /= at(a, i) + at(b, j);
            if up {
                i += 1;
            } else {
                j += 1;
            }
        }
        total += term;
    }
    total
}

/// 1/(Π a Π b).
pub fn interleaving_product(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().chain(b).fold(BigRational::one(), |acc, x| acc / x)
}

/// Run X on the first block and X' on the second block of s∘s', interleaved by α.
pub fn concatenate(x: &Trajectory, xp: &Trajectory, steps: &[bool]) -> Result<Trajectory, OpError> {
    if steps.iter().filter(|&&u| u).count() != x.len() || steps.len() != x.len() + xp.len() {
        return Err(OpError::NotAdmissible("interleaving does not match trajectory lengths"));
    }
    let mut t = Trajectory::start(x.initial().concat(xp.initial()));
    let (mut i, mut j) = (0, 0);
    for &up in steps {
        let op = if up {
            i += 1;
            x.ops()[i - 1].clone()
        } else {
            let shift = x.states()[i].size();
            let mut op = xp.ops()[j].clone();
            j += 1;
            if op.kind.family() != Family::Inaction {
                op.r += shift;
                op.r2 = op.r2.map(|r| r + shift);
            }
            op
        };
        t.push(op)?;
        let expect = x.states()[i].concat(&xp.states()[j]);
        if t.last() != &expect {
            return Err(OpError::NotAdmissible("concatenated state differs from the block product"));
        }
    }
    Ok(t)
}

/// Every concatenation X ∘_α X' over α ∈ A(|X|, |X'|).
pub fn concatenations(x: &Trajectory, xp: &Trajectory) -> Result<Vec<Trajectory>, OpError> {
    interleavings(x.len(), xp.len()).iter().map(|st| concatenate(x, xp, st)).collect()
}

/// Σ_α w(X ∘_α X') for a pair of trajectories without inaction steps.
pub fn concatenation_weight(x: &Trajectory, xp: &Trajectory) -> Result<SymbolicWeight, OpError> {
    let all = concatenations(x, xp)?;
    let power = x.weight().beta_power + xp.weight().beta_power;
    let sum = all.iter().fold(BigRational::zero(), |acc, t| acc + t.weight().coefficient);
    Ok(SymbolicWeight::new(sum, power))
}

/// Result of the genus-zero factorization check at one order.
#[derive(Clone, Debug)]
pub struct FactorizationCheck {
    pub order: u32,
    /// Σ over X_{order,0}(s∘s') by direct enumeration.
    pub direct: BigRational,
    /// Σ_{i₁+i₂=order} S_{i₁}(s) S_{i₂}(s').
    pub convolution: BigRational,
    /// Σ over explicitly built concatenations, pair by pair.
    pub via_concatenation: BigRational,
    pub pairs: u64,
}

impl FactorizationCheck {
    pub fn holds(&self) -> bool {
        self.direct == self.convolution && self.direct == self.via_concatenation
    }
}

/// Compare the three routes to Σ_{X ∈ X_{j,0}(s∘s')} w for every j ≤ max_order.
pub fn factorization_check(
    s: &LoopSequence,
    sp: &LoopSequence,
    max_order: u32,
    cfg: &EnumConfig,
) -> Result<Vec<FactorizationCheck>, EnumerateError> {
    let cache = CatalogCache::new();
    let joint = s.concat(sp);
    let single = |t: &LoopSequence, i: u32| -> Result<Vec<Trajectory>, EnumerateError> {
        // genus zero: a deformations and b expansions with a + b = i
        let mut all = Vec::new();
        for a in 0..=i {
            all.extend(enumerate_vanishing(t, a, i - a, 0, 0, cfg)?);
        }
        Ok(all)
    };
    let mut left = Vec::new();
    let mut right = Vec::new();
    for i in 0..=max_order {
        left.push(single(s, i)?);
        right.push(if sp == s { left[i as usize].clone() } else { single(sp, i)? });
    }
    let sum = |ts: &[Trajectory]| ts.iter().fold(BigRational::zero(), |acc, t| acc + t.weight().coefficient);
    let mut out = Vec::new();
    for j in 0..=max_order {
        let direct = sums_over_trajectories(j, 0, &joint, cfg, &cache)?.signed.coefficient;
        let mut convolution = BigRational::zero();
        let mut via = BigRational::zero();
        let mut pairs = 0;
        for i1 in 0..=j {
            let (l, r) = (&left[i1 as usize], &right[(j - i1) as usize]);
            convolution += sum(l) * sum(r);
            for x in l {
                for xp in r {
                    let w = concatenation_weight(x, xp).map_err(EnumerateError::Op)?;
                    via += w.coefficient;
                    pairs += 1;
                }
            }
        }
        out.push(FactorizationCheck { order: j, direct, convolution, via_concatenation: via, pairs });
    }
    Ok(out)
}

/// Integer lengths as rationals, for the interleaving identity.
pub fn sizes(values: &[u64]) -> Vec<BigRational> {
    values.iter().map(|&v| BigRational::from_integer(BigInt::from(v))).collect()
}
