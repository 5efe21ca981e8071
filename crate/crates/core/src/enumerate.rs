//! Depth-first enumeration of vanishing trajectories.
//!
//! Every vanishing trajectory with the requested operation counts is walked explicitly;
//! nothing is memoized except the operation catalog of each visited state. Weights are
//! accumulated exactly as (i128 numerator, u128 denominator) along the path and summed
//! per denominator in big integers at the leaves.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;

use dashmap::DashMap;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rayon::prelude::*;

use crate::error::EnumerateError;
use crate::ops::{operation_catalog, Catalog, CatalogEntry, Family, OperationRecord};
use crate::sequence::LoopSequence;
use crate::trajectory::{Counts, Trajectory};
use crate::weight::{kind_weight, SymbolicWeight};

/// Remaining operation budget.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Budget {
    /// Exactly a deformations, b expansions, c mergers, d inactions.
    Exact { a: u32, b: u32, c: u32, d: u32 },
    /// i = deformations + expansions, k = mergers + inactions.
    Graded { i: u32, k: u32 },
}

impl Budget {
    fn take(self, f: Family) -> Option<Budget> {
        use Budget::*;
        match (self, f) {
            (_, Family::Split) => Some(self),
            (Exact { a, b, c, d }, Family::Deform) if a > 0 => Some(Exact { a: a - 1, b, c, d }),
            (Exact { a, b, c, d }, Family::Expand) if b > 0 => Some(Exact { a, b: b - 1, c, d }),
            (Exact { a, b, c, d }, Family::Merger) if c > 0 => Some(Exact { a, b, c: c - 1, d }),
            (Exact { a, b, c, d }, Family::Inaction) if d > 0 => Some(Exact { a, b, c, d: d - 1 }),
            (Graded { i, k }, Family::Deform | Family::Expand) if i > 0 => Some(Graded { i: i - 1, k }),
            (Graded { i, k }, Family::Merger | Family::Inaction) if k > 0 => Some(Graded { i, k: k - 1 }),
            _ => None,
        }
    }

    fn is_spent(self) -> bool {
        matches!(self, Budget::Exact { a: 0, b: 0, c: 0, d: 0 } | Budget::Graded { i: 0, k: 0 })
    }

    /// Upper bounds on the deformations and on the mergers still available.
    fn caps(self) -> (u32, u32, u32) {
        match self {
            Budget::Exact { a, b, c, .. } => (a, a + b, c),
            Budget::Graded { i, k } => (i, i, k),
        }
    }

    /// Total β power of every trajectory in this budget, if fixed.
    fn beta_power(self) -> u32 {
        match self {
            Budget::Exact { a, b, .. } => a + b,
            Budget::Graded { i, .. } => i,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EnumConfig {
    /// Abort with [`EnumerateError::Budget`] after this many leaves.
    pub max_trajectories: u64,
    /// Prune states that provably cannot vanish within the remaining budget.
    pub shortcuts: bool,
    /// Keep inaction steps of weight zero (ℓ(s) = 0).
    pub include_zero_weight: bool,
    pub parallel: bool,
}

impl Default for EnumConfig {
    fn default() -> Self {
        EnumConfig { max_trajectories: 1 << 40, shortcuts: true, include_zero_weight: false, parallel: true }
    }
}

/// Exact sums over a set of vanishing trajectories.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrajectorySums {
    pub signed: SymbolicWeight,
    pub absolute: SymbolicWeight,
    pub count: u64,
    /// Largest splitting count seen, and whether every trajectory respected
    /// splits ≤ ι(s₀) + 4a + 3b + c.
    pub max_splits: u32,
    pub split_bound_ok: bool,
}

/// Operation catalogs of visited states.
#[derive(Default)]
pub struct CatalogCache {
    map: DashMap<LoopSequence, Arc<Catalog>>,
}

impl CatalogCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, s: &LoopSequence) -> Arc<Catalog> {
        if let Some(c) = self.map.get(s) {
            return c.clone();
        }
        let c = Arc::new(operation_catalog(s).expect("non-null state"));
        self.map.insert(s.clone(), c.clone());
        c
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }
}

/// Could `s` still reach ∅ within `rem`? Only deformations (one each) and mergers (at most
/// two each) remove components, and only deformations and expansions change the edge
/// chain t, by one plaquette boundary each.
pub(crate) fn can_vanish_within(s: &LoopSequence, a_cap: u32, ab_cap: u32, c_cap: u32, ab_exact: bool) -> bool {
    if s.size() as u64 > a_cap as u64 + 2 * c_cap as u64 || s.z2_support() as u64 > 4 * ab_cap as u64 {
        return false;
    }
    match s.planar_area() {
        Some((area, total)) => {
            area <= ab_cap as u64 && (!ab_exact || (ab_cap as i64 - total).rem_euclid(2) == 0)
        }
        None => true,
    }
}

fn can_vanish(s: &LoopSequence, rem: Budget) -> bool {
    let (a_cap, ab_cap, c_cap) = rem.caps();
    can_vanish_within(s, a_cap, ab_cap, c_cap, true)
}

struct Path {
    num: i128,
    den: u128,
    counts: Counts,
    ops: Vec<OperationRecord>,
    states: Vec<LoopSequence>,
}

#[derive(Default)]
struct Sink {
    by_den: HashMap<u128, (BigInt, BigInt)>,
    count: u64,
    max_splits: u32,
    split_bound_ok: bool,
    trajectories: Option<Vec<Trajectory>>,
}

impl Sink {
    fn new(collect: bool) -> Self {
        Sink { split_bound_ok: true, trajectories: collect.then(Vec::new), ..Default::default() }
    }

    fn absorb(&mut self, other: Sink) {
        for (den, (s, a)) in other.by_den {
            let e = self.by_den.entry(den).or_default();
            e.0 += s;
            e.1 += a;
        }
        self.count += other.count;
        self.max_splits = self.max_splits.max(other.max_splits);
        self.split_bound_ok &= other.split_bound_ok;
        if let (Some(t), Some(o)) = (self.trajectories.as_mut(), other.trajectories) {
            t.extend(o);
        }
    }
}

struct Walker<'a> {
    cache: &'a CatalogCache,
    cfg: &'a EnumConfig,
    iota0: u64,
    leaves: &'a AtomicU64,
}

impl Walker<'_> {
    fn leaf(&self, path: &Path, sink: &mut Sink) -> Result<(), EnumerateError> {
        let n = self.leaves.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.cfg.max_trajectories {
            return Err(EnumerateError::Budget(self.cfg.max_trajectories));
        }
        let c = path.counts;
        let bound = self.iota0 + 4 * c.a as u64 + 3 * c.b as u64 + c.c as u64;
        sink.split_bound_ok &= (c.splits as u64) <= bound;
        sink.max_splits = sink.max_splits.max(c.splits);
        sink.count += 1;
        if path.num != 0 {
            let e = sink.by_den.entry(path.den).or_default();
            e.0 += BigInt::from(path.num);
            e.1 += BigInt::from(path.num.unsigned_abs());
        }
        if let Some(list) = sink.trajectories.as_mut() {
            let t = Trajectory::from_parts(path.states.clone(), path.ops.clone())
                .expect("enumerated steps replay");
            list.push(t);
        }
        Ok(())
    }

    fn step(
        &self,
        s: &LoopSequence,
        entry: &CatalogEntry,
        rem: Budget,
        path: &mut Path,
        sink: &mut Sink,
    ) -> Result<(), EnumerateError> {
        let family = entry.op.kind.family();
        let Some(next) = rem.take(family) else { return Ok(()) };
        let (num, den, _) = kind_weight(s, entry.op.kind);
        if num == 0 && !self.cfg.include_zero_weight {
            return Ok(());
        }
        let saved = (path.num, path.den, path.counts);
        path.num = path.num.checked_mul(num as i128).ok_or(EnumerateError::Overflow)?;
        path.den = path.den.checked_mul(den as u128).ok_or(EnumerateError::Overflow)?;
        path.counts.add(family);
        let collect = sink.trajectories.is_some();
        if collect {
            path.ops.push(entry.op.clone());
            path.states.push(entry.result.clone());
        }
        let r = self.visit(&entry.result, next, path, sink);
        if collect {
            path.ops.pop();
            path.states.pop();
        }
        (path.num, path.den, path.counts) = saved;
        r
    }

    fn visit(&self, s: &LoopSequence, rem: Budget, path: &mut Path, sink: &mut Sink) -> Result<(), EnumerateError> {
        if s.is_null() {
            return if rem.is_spent() { self.leaf(path, sink) } else { Ok(()) };
        }
        if rem.is_spent() {
            // splittings alone never reach ∅
            return Ok(());
        }
        if self.cfg.shortcuts && !can_vanish(s, rem) {
            return Ok(());
        }
        let cat = self.cache.get(s);
        for entry in &cat.entries {
            self.step(s, entry, rem, path, sink)?;
        }
        Ok(())
    }
}

fn run(
    s: &LoopSequence,
    budget: Budget,
    cfg: &EnumConfig,
    cache: &CatalogCache,
    collect: bool,
) -> Result<Sink, EnumerateError> {
    let leaves = AtomicU64::new(0);
    let w = Walker { cache, cfg, iota0: s.index() as u64, leaves: &leaves };
    let fresh = || Path {
        num: 1,
        den: 1,
        counts: Counts::default(),
        ops: Vec::new(),
        states: vec![s.clone()],
    };
    if s.is_null() || !cfg.parallel || rem_trivial(s, budget, cfg) {
        let mut sink = Sink::new(collect);
        w.visit(s, budget, &mut fresh(), &mut sink)?;
        return Ok(sink);
    }
    let cat = cache.get(s);
    let parts: Vec<Result<Sink, EnumerateError>> = cat
        .entries
        .par_iter()
        .map(|entry| {
            let mut sink = Sink::new(collect);
            w.step(s, entry, budget, &mut fresh(), &mut sink)?;
            Ok(sink)
        })
        .collect();
    let mut sink = Sink::new(collect);
    for p in parts {
        sink.absorb(p?);
    }
    Ok(sink)
}

fn rem_trivial(s: &LoopSequence, budget: Budget, cfg: &EnumConfig) -> bool {
    budget.is_spent() || (cfg.shortcuts && !can_vanish(s, budget))
}

fn to_sums(sink: Sink, beta_power: u32) -> TrajectorySums {
    let mut signed = BigRational::zero();
    let mut absolute = BigRational::zero();
    for (den, (sn, ab)) in sink.by_den {
        let den = BigInt::from(den);
        signed += BigRational::new(sn, den.clone());
        absolute += BigRational::new(ab, den);
    }
    debug_assert!(!absolute.is_negative());
    TrajectorySums {
        signed: SymbolicWeight::new(signed, beta_power),
        absolute: SymbolicWeight::new(absolute, beta_power),
        count: sink.count,
        max_splits: sink.max_splits,
        split_bound_ok: sink.split_bound_ok,
    }
}

/// The set X_{a,b,c,d}(s) as explicit trajectories, in catalog order.
pub fn enumerate_vanishing(
    s: &LoopSequence,
    a: u32,
    b: u32,
    c: u32,
    d: u32,
    cfg: &EnumConfig,
) -> Result<Vec<Trajectory>, EnumerateError> {
    let cache = CatalogCache::new();
    let cfg = EnumConfig { parallel: false, ..cfg.clone() };
    let sink = run(s, Budget::Exact { a, b, c, d }, &cfg, &cache, true)?;
    Ok(sink.trajectories.unwrap_or_default())
}

/// Σ w and Σ |w| over X_{i,k}(s).
pub fn sums_over_trajectories(
    i: u32,
    k: u32,
    s: &LoopSequence,
    cfg: &EnumConfig,
    cache: &CatalogCache,
) -> Result<TrajectorySums, EnumerateError> {
    let budget = Budget::Graded { i, k };
    Ok(to_sums(run(s, budget, cfg, cache, false)?, budget.beta_power()))
}

/// Σ w and Σ |w| over X_{a,b,c,d}(s).
pub fn sums_exact(
    s: &LoopSequence,
    a: u32,
    b: u32,
    c: u32,
    d: u32,
    cfg: &EnumConfig,
    cache: &CatalogCache,
) -> Result<TrajectorySums, EnumerateError> {
    let budget = Budget::Exact { a, b, c, d };
    Ok(to_sums(run(s, budget, cfg, cache, false)?, budget.beta_power()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Loop, Vertex};

    fn p() -> Loop {
        Loop::from_steps(&Vertex::origin(2), &[1, 2, -1, -2]).unwrap()
    }

    #[test]
    fn trivial_sets() {
        let cfg = EnumConfig::default();
        let null = enumerate_vanishing(&LoopSequence::null(), 0, 0, 0, 0, &cfg).unwrap();
        assert_eq!(null.len(), 1);
        assert!(null[0].is_empty());
        let sp = LoopSequence::single(p());
        assert!(enumerate_vanishing(&sp, 0, 0, 0, 0, &cfg).unwrap().is_empty());
    }

    #[test]
    fn single_deformation() {
        let sp = LoopSequence::single(p());
        let cfg = EnumConfig::default();
        let ts = enumerate_vanishing(&sp, 1, 0, 0, 0, &cfg).unwrap();
        assert_eq!(ts.len(), 4);
        for t in &ts {
            assert_eq!(t.weight(), SymbolicWeight::from_ratio(1, 8, 1));
        }
        let sums = sums_over_trajectories(1, 0, &sp, &cfg, &CatalogCache::new()).unwrap();
        assert_eq!(sums.signed, SymbolicWeight::from_ratio(1, 2, 1));
        assert_eq!(sums.absolute, SymbolicWeight::from_ratio(1, 2, 1));
    }

    #[test]
    fn shortcuts_do_not_change_sums() {
        let sp = LoopSequence::new(vec![p(), p().inverse()]).unwrap();
        let cache = CatalogCache::new();
        for (i, k) in [(0, 1), (1, 1), (2, 0), (2, 1)] {
            let on = sums_over_trajectories(i, k, &sp, &EnumConfig::default(), &cache).unwrap();
            let off_cfg = EnumConfig { shortcuts: false, ..Default::default() };
            let off = sums_over_trajectories(i, k, &sp, &off_cfg, &cache).unwrap();
            assert_eq!(on, off, "i={i} k={k}");
        }
    }
}
