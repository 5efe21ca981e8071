//! Vertices, directed edges, paths, loops and plaquettes on Z^d.
//!
//! A [`Loop`] is stored in canonical rotation: the rotation of its edge word that is
//! lexicographically smallest under the edge order (base coordinates, axis, sign).
//! Two loops are equal iff their canonical words are equal; translations are distinct.

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::LatticeError;

pub type Coord = i32;

/// A point of Z^d. The length of the coordinate tuple is the dimension.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Vertex(SmallVec<[Coord; 4]>);

impl Vertex {
    pub fn new(coords: &[Coord]) -> Result<Self, LatticeError> {
        if coords.len() < 2 {
            return Err(LatticeError::Dimension(coords.len()));
        }
        Ok(Vertex(SmallVec::from_slice(coords)))
    }

    pub fn origin(dim: usize) -> Self {
        Vertex(SmallVec::from_elem(0, dim))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Coord] {
        &self.0
    }

    /// The neighbour one step along `axis` (1-based) in direction `sign`.
    pub fn step(&self, axis: u8, sign: i8) -> Result<Vertex, LatticeError> {
        let mut c = self.0.clone();
        let slot = &mut c[axis as usize - 1];
        *slot = slot
            .checked_add(sign as Coord)
            .ok_or(LatticeError::Overflow)?;
        Ok(Vertex(c))
    }

    pub fn translated(&self, by: &[Coord]) -> Result<Vertex, LatticeError> {
        if by.len() != self.dim() {
            return Err(LatticeError::DimensionMismatch {
                expected: self.dim(),
                found: by.len(),
            });
        }
        let mut c = self.0.clone();
        for (x, d) in c.iter_mut().zip(by) {
            *x = x.checked_add(*d).ok_or(LatticeError::Overflow)?;
        }
        Ok(Vertex(c))
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A directed unit edge: starts at `base` = u(e) and moves one step along `axis`.
///
/// Field order gives the derived total order used for canonical rotations.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Edge {
    base: Vertex,
    axis: u8,
    sign: i8,
}

impl Edge {
    pub fn new(base: Vertex, axis: u8, sign: i8) -> Result<Self, LatticeError> {
        if axis == 0 || axis as usize > base.dim() {
            return Err(LatticeError::Axis { axis, dim: base.dim() });
        }
        if sign != 1 && sign != -1 {
            return Err(LatticeError::Sign(sign));
        }
        // reject edges whose far endpoint would overflow
        base.step(axis, sign)?;
        Ok(Edge { base, axis, sign })
    }

    pub fn base(&self) -> &Vertex {
        &self.base
    }

    pub fn axis(&self) -> u8 {
        self.axis
    }

    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// Signed axis step, e.g. `-2` for a step backwards along axis 2.
    pub fn step(&self) -> i8 {
        self.sign * self.axis as i8
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn u(&self) -> &Vertex {
        &self.base
    }

    pub fn v(&self) -> Vertex {
        self.base
            .step(self.axis, self.sign)
            .expect("endpoint checked at construction")
    }

    pub fn inverse(&self) -> Edge {
        Edge {
            base: self.v(),
            axis: self.axis,
            sign: -self.sign,
        }
    }

    /// u(e) is lexicographically smaller than v(e).
    pub fn is_positive(&self) -> bool {
        self.sign > 0
    }

    /// The positively oriented member of {e, e⁻¹}.
    pub fn positive(&self) -> Edge {
        if self.is_positive() {
            self.clone()
        } else {
            self.inverse()
        }
    }

    /// True if `other` is this edge or its inverse.
    pub fn same_undirected(&self, other: &Edge) -> bool {
        self.axis == other.axis
            && if self.sign == other.sign {
                self.base == other.base
            } else {
                other.base == self.v()
            }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{:+}", self.base, self.step())
    }
}

/// An ordered list of edges with matching endpoints.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct Path {
    edges: Vec<Edge>,
}

impl Path {
    pub fn new(edges: Vec<Edge>) -> Result<Self, LatticeError> {
        for i in 1..edges.len() {
            if edges[i].u() != &edges[i - 1].v() {
                return Err(LatticeError::Disconnected { at: i + 1 });
            }
        }
        Ok(Path { edges })
    }

    /// Walk `steps` (signed 1-based axes) starting at `start`.
    pub fn from_steps(start: &Vertex, steps: &[i8]) -> Result<Self, LatticeError> {
        let mut edges = Vec::with_capacity(steps.len());
        let mut at = start.clone();
        for &s in steps {
            if s == 0 {
                return Err(LatticeError::Axis { axis: 0, dim: start.dim() });
            }
            let e = Edge::new(at, s.unsigned_abs(), s.signum())?;
            at = e.v();
            edges.push(e);
        }
        Ok(Path { edges })
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_closed(&self) -> bool {
        match (self.edges.first(), self.edges.last()) {
            (Some(f), Some(l)) => &l.v() == f.u(),
            _ => true,
        }
    }

    pub fn into_edges(self) -> Vec<Edge> {
        self.edges
    }
}

/// Erase backtracks e·e⁻¹ from a closed edge word, cyclically, returning the reduced word
/// (not yet rotated to canonical form).
pub(crate) fn reduce_cyclic(edges: &[Edge]) -> Vec<Edge> {
    let mut st: Vec<Edge> = Vec::with_capacity(edges.len());
    for e in edges {
        match st.last() {
            Some(top) if is_inverse_pair(top, e) => {
                st.pop();
            }
            _ => st.push(e.clone()),
        }
    }
    let (mut i, mut j) = (0, st.len());
    while j - i >= 2 && is_inverse_pair(&st[j - 1], &st[i]) {
        i += 1;
        j -= 1;
    }
    st.drain(j..);
    st.drain(..i);
    st
}

#[inline]
pub(crate) fn is_inverse_pair(a: &Edge, b: &Edge) -> bool {
    a.axis == b.axis && a.sign == -b.sign && b.base == a.v()
}

fn has_cyclic_backtrack(edges: &[Edge]) -> bool {
    let n = edges.len();
    (0..n).any(|i| is_inverse_pair(&edges[i], &edges[(i + 1) % n])) && n > 0
}

/// Index of the rotation with lexicographically smallest edge word.
fn min_rotation(edges: &[Edge]) -> usize {
    let n = edges.len();
    let mut best = 0;
    for i in 1..n {
        match edges[i].cmp(&edges[best]) {
            Ordering::Less => best = i,
            Ordering::Greater => {}
            Ordering::Equal => {
                for k in 1..n {
                    match edges[(i + k) % n].cmp(&edges[(best + k) % n]) {
                        Ordering::Less => {
                            best = i;
                            break;
                        }
                        Ordering::Greater => break,
                        Ordering::Equal => {}
                    }
                }
            }
        }
    }
    best
}

/// A loop: a closed, cyclically non-backtracking edge word in canonical rotation.
/// The null loop has no edges.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Default)]
pub struct Loop {
    edges: Vec<Edge>,
}

impl Loop {
    pub fn null() -> Self {
        Loop { edges: Vec::new() }
    }

    /// Canonicalize a closed, non-backtracking cycle.
    pub fn canonicalize(edges: Vec<Edge>) -> Result<Self, LatticeError> {
        let path = Path::new(edges)?;
        if !path.is_closed() {
            return Err(LatticeError::NotClosed);
        }
        if has_cyclic_backtrack(path.edges()) {
            return Err(LatticeError::Backtracking);
        }
        Ok(Self::rotate_canonical(path.into_edges()))
    }

    /// The non-backtracking core of a closed path, canonicalized.
    pub fn core_of(path: &Path) -> Result<Self, LatticeError> {
        if !path.is_closed() {
            return Err(LatticeError::NotClosed);
        }
        Ok(Self::rotate_canonical(reduce_cyclic(path.edges())))
    }

    /// Core of a closed word already known to be connected and closed.
    pub(crate) fn core_unchecked(edges: &[Edge]) -> Self {
        debug_assert!(Path::new(edges.to_vec()).map(|p| p.is_closed()).unwrap_or(false));
        Self::rotate_canonical(reduce_cyclic(edges))
    }

    fn rotate_canonical(mut edges: Vec<Edge>) -> Self {
        let r = min_rotation(&edges);
        edges.rotate_left(r);
        Loop { edges }
    }

    pub fn from_steps(start: &Vertex, steps: &[i8]) -> Result<Self, LatticeError> {
        Self::core_of(&Path::from_steps(start, steps)?)
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_null(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_null()
    }

    /// Edge at 1-based location `x`.
    pub fn edge(&self, x: usize) -> Option<&Edge> {
        x.checked_sub(1).and_then(|i| self.edges.get(i))
    }

    pub fn base(&self) -> Option<&Vertex> {
        self.edges.first().map(|e| e.u())
    }

    pub fn dim(&self) -> Option<usize> {
        self.edges.first().map(|e| e.dim())
    }

    pub fn steps(&self) -> Vec<i8> {
        self.edges.iter().map(Edge::step).collect()
    }

    /// The loop traversed backwards.
    pub fn inverse(&self) -> Loop {
        let rev: Vec<Edge> = self.edges.iter().rev().map(Edge::inverse).collect();
        Self::rotate_canonical(rev)
    }

    /// 1-based locations holding `e` and holding `e⁻¹`.
    pub fn locations(&self, e: &Edge) -> (Vec<usize>, Vec<usize>) {
        let inv = e.inverse();
        let mut a = Vec::new();
        let mut b = Vec::new();
        for (i, f) in self.edges.iter().enumerate() {
            if f == e {
                a.push(i + 1);
            } else if f == &inv {
                b.push(i + 1);
            }
        }
        (a, b)
    }

    /// Edge word starting at 0-based index `i` and wrapping around.
    pub(crate) fn rotated_from(&self, i: usize) -> Vec<Edge> {
        let mut v = Vec::with_capacity(self.edges.len());
        v.extend_from_slice(&self.edges[i..]);
        v.extend_from_slice(&self.edges[..i]);
        v
    }

    /// Plaquette orientation test for a length-4 loop.
    ///
    /// The canonical rotation starts at the smallest vertex, so the loop is positively
    /// oriented iff its second starting vertex is the second smallest of the four.
    pub fn is_positive_plaquette(&self) -> Result<bool, LatticeError> {
        if !self.is_square() {
            return Err(LatticeError::NotAPlaquette);
        }
        let u: Vec<&Vertex> = self.edges.iter().map(Edge::u).collect();
        Ok(u[1] < u[2] && u[1] < u[3])
    }

    /// Four edges along two distinct axes forming a unit square.
    pub fn is_square(&self) -> bool {
        if self.edges.len() != 4 {
            return false;
        }
        let e = &self.edges;
        e[0].axis != e[1].axis && is_opposite(&e[0], &e[2]) && is_opposite(&e[1], &e[3])
    }
}

fn is_opposite(a: &Edge, b: &Edge) -> bool {
    a.axis == b.axis && a.sign == -b.sign
}

impl fmt::Display for Loop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        crate::word::write_loop(f, self)
    }
}

/// Orientation test on a closed 4-edge path, as written (not up to rotation):
/// u(e1) is the smallest and u(e2) the second smallest of the four starting vertices.
pub fn path_is_positive_plaquette(p: &Path) -> Result<bool, LatticeError> {
    let lp = Loop::canonicalize(p.edges().to_vec())?;
    if !lp.is_square() {
        return Err(LatticeError::NotAPlaquette);
    }
    let mut u: Vec<&Vertex> = p.edges().iter().map(Edge::u).collect();
    let (u1, u2) = (u[0].clone(), u[1].clone());
    u.sort();
    Ok(*u[0] == u1 && *u[1] == u2)
}

/// A unit square loop together with its orientation flag.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Plaquette {
    lp: Loop,
    positive: bool,
}

impl Plaquette {
    pub fn new(lp: Loop) -> Result<Self, LatticeError> {
        let positive = lp.is_positive_plaquette()?;
        Ok(Plaquette { lp, positive })
    }

    /// The square through `e` turning into `axis2` with sign `turn`, starting with `e`.
    pub fn from_edge(e: &Edge, axis2: u8, turn: i8) -> Result<Self, LatticeError> {
        if axis2 == e.axis() {
            return Err(LatticeError::NotAPlaquette);
        }
        let steps = [e.step(), turn * axis2 as i8, -e.step(), -turn * axis2 as i8];
        Self::new(Loop::from_steps(e.u(), &steps)?)
    }

    pub fn as_loop(&self) -> &Loop {
        &self.lp
    }

    pub fn into_loop(self) -> Loop {
        self.lp
    }

    pub fn is_positive(&self) -> bool {
        self.positive
    }

    pub fn inverse(&self) -> Plaquette {
        Plaquette {
            lp: self.lp.inverse(),
            positive: !self.positive,
        }
    }

    /// The unique 1-based location of `e` or `e⁻¹` in this plaquette.
    pub fn location_of(&self, e: &Edge) -> Option<usize> {
        self.lp
            .edges()
            .iter()
            .position(|f| f.same_undirected(e))
            .map(|i| i + 1)
    }
}

/// P(e): the 2(d−1) plaquettes containing `e`.
pub fn plaquettes_containing(e: &Edge) -> Vec<Plaquette> {
    let d = e.dim() as u8;
    let mut out = Vec::with_capacity(2 * (d as usize - 1));
    for nu in 1..=d {
        if nu == e.axis() {
            continue;
        }
        for turn in [1i8, -1] {
            out.push(Plaquette::from_edge(e, nu, turn).expect("valid square"));
        }
    }
    out
}

/// P⁺(e): the 2(d−1) positively oriented plaquettes passing through `e` or `e⁻¹`.
pub fn positive_plaquettes_through(e: &Edge) -> Vec<Plaquette> {
    plaquettes_containing(e)
        .into_iter()
        .map(|p| if p.is_positive() { p } else { p.inverse() })
        .collect()
}

/// (P(e), P⁺(e)).
pub fn plaquettes_through(e: &Edge) -> (Vec<Plaquette>, Vec<Plaquette>) {
    (plaquettes_containing(e), positive_plaquettes_through(e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i32]) -> Vertex {
        Vertex::new(c).unwrap()
    }

    #[test]
    fn edge_inverse_swaps_endpoints() {
        let e = Edge::new(v(&[0, 0]), 1, 1).unwrap();
        let inv = e.inverse();
        assert_eq!(inv, Edge::new(v(&[1, 0]), 1, -1).unwrap());
        assert_eq!(inv.inverse(), e);
        assert!(e.is_positive() ^ inv.is_positive());
        assert!(Edge::new(v(&[0, 0]), 2, 1).unwrap().is_positive());
    }

    #[test]
    fn plaquette_orientation_follows_lexicographic_corners() {
        let o = v(&[0, 0]);
        // (0,0)->(0,1)->(1,1)->(1,0): u(e2)=(0,1) is the second smallest corner
        let pos = Path::from_steps(&o, &[2, 1, -2, -1]).unwrap();
        let neg = Path::from_steps(&o, &[1, 2, -1, -2]).unwrap();
        assert!(path_is_positive_plaquette(&pos).unwrap());
        assert!(!path_is_positive_plaquette(&neg).unwrap());
        let lp = Loop::core_of(&neg).unwrap();
        assert!(!lp.is_positive_plaquette().unwrap());
        assert!(lp.inverse().is_positive_plaquette().unwrap());
    }

    #[test]
    fn exactly_one_orientation_positive_in_box() {
        for d in [2usize, 3] {
            let mut coords = vec![0i32; d];
            loop {
                let base = Vertex::new(&coords).unwrap();
                for mu in 1..=d as u8 {
                    let e = Edge::new(base.clone(), mu, 1).unwrap();
                    for p in plaquettes_containing(&e) {
                        assert!(p.is_positive() ^ p.inverse().is_positive());
                    }
                }
                let mut i = 0;
                while i < d {
                    coords[i] += 1;
                    if coords[i] < 3 {
                        break;
                    }
                    coords[i] = 0;
                    i += 1;
                }
                if i == d {
                    break;
                }
            }
        }
    }

    #[test]
    fn plaquette_counts() {
        for d in 2..=4usize {
            let e = Edge::new(Vertex::origin(d), 1, -1).unwrap();
            let (all, pos) = plaquettes_through(&e);
            assert_eq!(all.len(), 2 * (d - 1));
            assert_eq!(pos.len(), 2 * (d - 1));
            for p in &all {
                let (a, b) = p.as_loop().locations(&e);
                assert_eq!((a.len(), b.len()), (1, 0));
            }
            for p in &pos {
                assert!(p.is_positive());
                let (a, b) = p.as_loop().locations(&e);
                assert_eq!(a.len() + b.len(), 1);
            }
        }
    }

    #[test]
    fn core_and_rotation() {
        let o = v(&[0, 0]);
        assert!(Loop::from_steps(&o, &[1, -1]).unwrap().is_null());
        let sq = Loop::from_steps(&o, &[1, 2, -1, -2]).unwrap();
        let with_bt = Loop::from_steps(&o, &[1, 2, 1, -1, -1, -2]).unwrap();
        assert_eq!(sq, with_bt);
        let spur_at_start = Loop::from_steps(&v(&[0, -1]), &[2, 1, 2, -1, -2, -2]).unwrap();
        assert_eq!(sq, spur_at_start);
        let start = v(&[1, 1]);
        let rotated = Loop::from_steps(&start, &[-1, -2, 1, 2]).unwrap();
        assert_eq!(sq, rotated);
        assert!(Loop::canonicalize(Path::from_steps(&o, &[1, -1, 2, -2]).unwrap().into_edges()).is_err());
        assert!(Loop::from_steps(&o, &[1, 2]).is_err());
    }
}
