//! Loop sequences in minimal representation and their statistics.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;

use crate::error::LatticeError;
use crate::lattice::{Edge, Loop};

/// An ordered list of non-null loops. The null sequence ∅ has no components.
///
/// Cached statistics are functions of the loops, so derived equality and hashing agree
/// with equality of the component lists.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct LoopSequence {
    loops: Vec<Loop>,
    len: usize,
    ell: u64,
    z2: usize,
}

/// (|s|, #s, ι(s), ℓ(s), δ).
#[derive(Clone, PartialEq, Eq, Debug, Serialize)]
pub struct SequenceStats {
    pub len: usize,
    pub size: usize,
    pub index: usize,
    pub ell: u64,
    pub degrees: Vec<usize>,
}

/// Occurrence sets of a query edge e in every component.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct OccurrenceSets {
    pub edge: Edge,
    /// A_r: 1-based locations of e in component r.
    pub a: Vec<Vec<usize>>,
    /// B_r: 1-based locations of e⁻¹ in component r.
    pub b: Vec<Vec<usize>>,
}

impl OccurrenceSets {
    pub fn m(&self, r: usize) -> usize {
        self.a[r].len() + self.b[r].len()
    }

    pub fn t_r(&self, r: usize) -> i64 {
        self.a[r].len() as i64 - self.b[r].len() as i64
    }

    pub fn t(&self) -> i64 {
        (0..self.a.len()).map(|r| self.t_r(r)).sum()
    }

    /// C_r = A_r ∪ B_r, sorted.
    pub fn c(&self, r: usize) -> Vec<usize> {
        let mut c: Vec<usize> = self.a[r].iter().chain(&self.b[r]).copied().collect();
        c.sort_unstable();
        c
    }
}

impl LoopSequence {
    /// Build from loops; null components are dropped (minimal representation).
    pub fn new(loops: Vec<Loop>) -> Result<Self, LatticeError> {
        let loops: Vec<Loop> = loops.into_iter().filter(|l| !l.is_null()).collect();
        if let Some(d) = loops.first().and_then(Loop::dim) {
            for l in &loops {
                let ld = l.dim().unwrap_or(d);
                if ld != d {
                    return Err(LatticeError::DimensionMismatch { expected: d, found: ld });
                }
            }
        }
        Ok(Self::from_nonnull(loops))
    }

    pub(crate) fn from_nonnull(loops: Vec<Loop>) -> Self {
        debug_assert!(loops.iter().all(|l| !l.is_null()));
        let len = loops.iter().map(Loop::len).sum();
        let mut t: HashMap<&Edge, i64> = HashMap::with_capacity(len);
        let mut inverses = Vec::new();
        for l in &loops {
            for e in l.edges() {
                if e.is_positive() {
                    *t.entry(e).or_insert(0) += 1;
                } else {
                    inverses.push(e.inverse());
                }
            }
        }
        for e in &inverses {
            *t.entry(e).or_insert(0) -= 1;
        }
        let ell = t.values().map(|x| (x * x) as u64).sum();
        let z2 = t.values().filter(|x| *x % 2 != 0).count();
        LoopSequence { loops, len, ell, z2 }
    }

    pub fn null() -> Self {
        Self::default()
    }

    pub fn single(l: Loop) -> Self {
        Self::from_nonnull(if l.is_null() { vec![] } else { vec![l] })
    }

    pub fn loops(&self) -> &[Loop] {
        &self.loops
    }

    pub fn into_loops(self) -> Vec<Loop> {
        self.loops
    }

    pub fn is_null(&self) -> bool {
        self.loops.is_empty()
    }

    /// |s|
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.is_null()
    }

    /// #s
    pub fn size(&self) -> usize {
        self.loops.len()
    }

    /// ι(s) = |s| − #s
    pub fn index(&self) -> usize {
        self.len - self.loops.len()
    }

    /// ℓ(s) = Σ_{e∈E⁺} t(e)²
    pub fn ell(&self) -> u64 {
        self.ell
    }

    /// Number of undirected edges with odd net multiplicity: the support of the Z/2 chain.
    pub fn z2_support(&self) -> usize {
        self.z2
    }

    /// In d = 2, the 2-chain F with ∂F = t is unique; returns (Σ|F|, ΣF).
    ///
    /// Every deformation or expansion changes t by the boundary of one plaquette while the
    /// other operations leave it fixed, so reaching ∅ takes at least Σ|F| of them, and
    /// their number has the parity of ΣF.
    pub fn planar_area(&self) -> Option<(u64, i64)> {
        if self.dim() != Some(2) {
            return None;
        }
        let mut th: HashMap<(i32, i32), i64> = HashMap::new();
        for l in &self.loops {
            for e in l.edges().iter().filter(|e| e.axis() == 1) {
                let p = e.positive();
                let c = p.base().coords();
                *th.entry((c[0], c[1])).or_insert(0) += if e.is_positive() { 1 } else { -1 };
            }
        }
        let mut cols: Vec<((i32, i32), i64)> = th.into_iter().filter(|(_, v)| *v != 0).collect();
        cols.sort_unstable();
        let (mut area, mut total) = (0u64, 0i64);
        let mut i = 0;
        while i < cols.len() {
            let x = cols[i].0 .0;
            let mut f = 0i64;
            let mut y_prev = 0;
            while i < cols.len() && cols[i].0 .0 == x {
                let ((_, y), v) = cols[i];
                if f != 0 {
                    let h = (y - y_prev) as i64;
                    area += (f.unsigned_abs()) * h as u64;
                    total += f * h;
                }
                f += v;
                y_prev = y;
                i += 1;
            }
            debug_assert_eq!(f, 0, "t is a cycle");
        }
        Some((area, total))
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.loops.iter().map(Loop::len).collect()
    }

    pub fn dim(&self) -> Option<usize> {
        self.loops.first().and_then(Loop::dim)
    }

    pub fn stats(&self) -> SequenceStats {
        SequenceStats {
            len: self.len,
            size: self.size(),
            index: self.index(),
            ell: self.ell,
            degrees: self.degrees(),
        }
    }

    pub fn occurrences(&self, e: &Edge) -> OccurrenceSets {
        let (a, b) = self.loops.iter().map(|l| l.locations(e)).unzip();
        OccurrenceSets { edge: e.clone(), a, b }
    }

    /// Concatenate two sequences: (l_1,…,l_n, l'_1,…,l'_m).
    pub fn concat(&self, other: &LoopSequence) -> LoopSequence {
        let mut loops = self.loops.clone();
        loops.extend_from_slice(&other.loops);
        Self::from_nonnull(loops)
    }
}

impl fmt::Display for LoopSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::word::format_sequence(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Vertex;

    fn p() -> Loop {
        Loop::from_steps(&Vertex::origin(2), &[1, 2, -1, -2]).unwrap()
    }

    #[test]
    fn plaquette_stats() {
        let s = LoopSequence::single(p());
        let st = s.stats();
        assert_eq!((st.len, st.size, st.index, st.ell), (4, 1, 3, 4));
        assert_eq!(st.degrees, vec![4]);
        let pp = LoopSequence::new(vec![p(), p()]).unwrap();
        assert_eq!(pp.ell(), 16);
        assert_eq!(pp.z2_support(), 0);
        let pq = LoopSequence::new(vec![p(), p().inverse()]).unwrap();
        assert_eq!(pq.ell(), 0);
    }

    #[test]
    fn occurrence_sets() {
        let s = LoopSequence::single(p());
        let e = s.loops()[0].edge(1).unwrap().clone();
        let occ = s.occurrences(&e);
        assert_eq!(occ.a[0], vec![1]);
        assert!(occ.b[0].is_empty());
        assert_eq!((occ.m(0), occ.t()), (1, 1));

        let pq = LoopSequence::new(vec![p(), p().inverse()]).unwrap();
        let occ = pq.occurrences(&e);
        assert_eq!((occ.m(0), occ.m(1), occ.t()), (1, 1, 0));

        let dw = Loop::from_steps(&Vertex::origin(2), &[1, 2, -1, -2, 1, 2, -1, -2]).unwrap();
        let s = LoopSequence::single(dw);
        let e = s.loops()[0].edge(1).unwrap().clone();
        assert_eq!(s.occurrences(&e).a[0], vec![1, 5]);
        assert_eq!(s.occurrences(&e).m(0), 2);
    }

    #[test]
    fn planar_area() {
        assert_eq!(LoopSequence::single(p()).planar_area().map(|a| a.0), Some(1));
        let dw = Loop::from_steps(&Vertex::origin(2), &[1, 2, -1, -2, 1, 2, -1, -2]).unwrap();
        assert_eq!(LoopSequence::single(dw).planar_area().map(|a| a.0), Some(2));
        let pq = LoopSequence::new(vec![p(), p().inverse()]).unwrap();
        assert_eq!(pq.planar_area(), Some((0, 0)));
        let rect = Loop::from_steps(&Vertex::origin(2), &[1, 1, 1, 2, 2, -1, -1, -1, -2, -2]).unwrap();
        assert_eq!(LoopSequence::single(rect).planar_area().map(|a| a.0), Some(6));
        let p3 = Loop::from_steps(&Vertex::origin(3), &[1, 2, -1, -2]).unwrap();
        assert_eq!(LoopSequence::single(p3).planar_area(), None);
    }

    #[test]
    fn null_components_dropped() {
        let s = LoopSequence::new(vec![Loop::null(), p()]).unwrap();
        assert_eq!(s.size(), 1);
        assert!(LoopSequence::new(vec![]).unwrap().is_null());
    }
}
