//! Merger, splitting, deformation, expansion and inaction, and the operation catalog
//! of a loop sequence.
//!
//! All splices work on rotated words: with `l` rotated so that location `x` comes first,
//! `l = e B`, and `l'` rotated at `y`, `l' = f D` with `f ∈ {e, e⁻¹}`:
//!
//! | f    | positive      | negative |
//! |------|---------------|----------|
//! | e    | `e D e B`     | `B D⁻¹`  |
//! | e⁻¹  | `e D⁻¹ e B`   | `B D`    |
//!
//! which are cyclic rotations of `[aedceb]`, `[ac⁻¹d⁻¹b]`, `[aec⁻¹d⁻¹eb]` and `[adcb]`.

use serde::{Deserialize, Serialize};

use crate::error::OpError;
use crate::lattice::{plaquettes_containing, positive_plaquettes_through, Edge, Loop, Plaquette};
use crate::sequence::LoopSequence;

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OpKind {
    Inaction,
    PosMerger,
    NegMerger,
    PosSplit,
    NegSplit,
    PosDeform,
    NegDeform,
    PosExpand,
    NegExpand,
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug)]
pub enum Family {
    Inaction,
    Merger,
    Split,
    Deform,
    Expand,
}

impl OpKind {
    pub const ALL: [OpKind; 9] = [
        OpKind::Inaction,
        OpKind::PosMerger,
        OpKind::NegMerger,
        OpKind::PosSplit,
        OpKind::NegSplit,
        OpKind::PosDeform,
        OpKind::NegDeform,
        OpKind::PosExpand,
        OpKind::NegExpand,
    ];

    pub fn family(self) -> Family {
        use OpKind::*;
        match self {
            Inaction => Family::Inaction,
            PosMerger | NegMerger => Family::Merger,
            PosSplit | NegSplit => Family::Split,
            PosDeform | NegDeform => Family::Deform,
            PosExpand | NegExpand => Family::Expand,
        }
    }

    /// Sign subtype; `None` for inaction.
    pub fn sign(self) -> Option<Sign> {
        use OpKind::*;
        match self {
            Inaction => None,
            PosMerger | PosSplit | PosDeform | PosExpand => Some(Sign::Plus),
            _ => Some(Sign::Minus),
        }
    }

    fn with_sign(family: Family, sign: Sign) -> OpKind {
        use OpKind::*;
        match (family, sign) {
            (Family::Inaction, _) => Inaction,
            (Family::Merger, Sign::Plus) => PosMerger,
            (Family::Merger, Sign::Minus) => NegMerger,
            (Family::Split, Sign::Plus) => PosSplit,
            (Family::Split, Sign::Minus) => NegSplit,
            (Family::Deform, Sign::Plus) => PosDeform,
            (Family::Deform, Sign::Minus) => NegDeform,
            (Family::Expand, Sign::Plus) => PosExpand,
            (Family::Expand, Sign::Minus) => NegExpand,
        }
    }
}

/// One applied operation. Component indices and locations are 1-based.
///
/// For mergers, `r` is the component that receives the merged loop (its slot is kept)
/// and `r2` the component merged into it (its slot is removed).
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct OperationRecord {
    pub kind: OpKind,
    pub r: usize,
    pub r2: Option<usize>,
    pub x: Option<usize>,
    pub y: Option<usize>,
    pub plaquette: Option<Plaquette>,
}

impl OperationRecord {
    pub fn inaction() -> Self {
        OperationRecord { kind: OpKind::Inaction, r: 0, r2: None, x: None, y: None, plaquette: None }
    }

    pub fn merger(sign: Sign, r: usize, x: usize, r2: usize, y: usize) -> Self {
        OperationRecord {
            kind: OpKind::with_sign(Family::Merger, sign),
            r,
            r2: Some(r2),
            x: Some(x),
            y: Some(y),
            plaquette: None,
        }
    }

    pub fn split(sign: Sign, r: usize, x: usize, y: usize) -> Self {
        OperationRecord {
            kind: OpKind::with_sign(Family::Split, sign),
            r,
            r2: None,
            x: Some(x),
            y: Some(y),
            plaquette: None,
        }
    }

    pub fn deform(sign: Sign, r: usize, x: usize, p: Plaquette) -> Self {
        OperationRecord {
            kind: OpKind::with_sign(Family::Deform, sign),
            r,
            r2: None,
            x: Some(x),
            y: None,
            plaquette: Some(p),
        }
    }

    pub fn expand(sign: Sign, r: usize, x: usize, p: Plaquette) -> Self {
        OperationRecord {
            kind: OpKind::with_sign(Family::Expand, sign),
            r,
            r2: None,
            x: Some(x),
            y: None,
            plaquette: Some(p),
        }
    }
}

fn inverse_path(p: &[Edge]) -> Vec<Edge> {
    p.iter().rev().map(Edge::inverse).collect()
}

fn edge_at(l: &Loop, x: usize) -> Result<&Edge, OpError> {
    l.edge(x).ok_or(OpError::Location { x, len: l.len() })
}

/// Merger of `l` and `l2` at locations `x` (in `l`) and `y` (in `l2`).
///
/// All four variants are available here; the catalog only uses ⊕ for equal edges and
/// ⊖ for inverse edges (see [`operation_catalog`]).
pub fn merge(l: &Loop, x: usize, l2: &Loop, y: usize, sign: Sign) -> Result<Loop, OpError> {
    if l.is_null() || l2.is_null() {
        return Err(OpError::NotAdmissible("merger of a null loop"));
    }
    let e = edge_at(l, x)?.clone();
    let f = edge_at(l2, y)?;
    let same = *f == e;
    if !same && *f != e.inverse() {
        return Err(OpError::NotAdmissible("merger locations do not hold e and e or e⁻¹"));
    }
    let lw = l.rotated_from(x - 1);
    let mw = l2.rotated_from(y - 1);
    let b = &lw[1..];
    let d = &mw[1..];
    let mut w: Vec<Edge> = Vec::with_capacity(lw.len() + mw.len());
    match (sign, same) {
        (Sign::Plus, true) => {
            w.push(e.clone());
            w.extend_from_slice(d);
            w.push(e);
            w.extend_from_slice(b);
        }
        (Sign::Plus, false) => {
            w.push(e.clone());
            w.extend(inverse_path(d));
            w.push(e);
            w.extend_from_slice(b);
        }
        (Sign::Minus, true) => {
            w.extend_from_slice(b);
            w.extend(inverse_path(d));
        }
        (Sign::Minus, false) => {
            w.extend_from_slice(b);
            w.extend_from_slice(d);
        }
    }
    Ok(Loop::core_unchecked(&w))
}

/// Splitting of `l` at `(x, y)`. Positive: `e` at both locations, pieces `([aec], [be])`.
/// Negative: `e` at `x` and `e⁻¹` at `y`, pieces `([ac], [b])`.
///
/// Locations are read cyclically from `x`, so `(y, x)` yields the same two loops in the
/// other order.
pub fn split(l: &Loop, x: usize, y: usize, sign: Sign) -> Result<(Loop, Loop), OpError> {
    if x == y {
        return Err(OpError::NotAdmissible("splitting needs x ≠ y"));
    }
    let e = edge_at(l, x)?.clone();
    let f = edge_at(l, y)?;
    let ok = match sign {
        Sign::Plus => *f == e,
        Sign::Minus => *f == e.inverse(),
    };
    if !ok {
        return Err(OpError::NotAdmissible("splitting locations do not hold the required edges"));
    }
    let n = l.len();
    let w = l.rotated_from(x - 1);
    let j = (y + n - x) % n;
    let b = &w[1..j];
    let c = &w[j + 1..];
    let (p1, p2) = match sign {
        Sign::Plus => {
            let mut one = vec![e.clone()];
            one.extend_from_slice(c);
            let mut two = vec![e];
            two.extend_from_slice(b);
            (one, two)
        }
        Sign::Minus => (c.to_vec(), b.to_vec()),
    };
    Ok((Loop::core_unchecked(&p1), Loop::core_unchecked(&p2)))
}

/// Deformation of `l` at `x` by a plaquette through the edge at `x` or its inverse.
pub fn deform(l: &Loop, x: usize, p: &Plaquette, sign: Sign) -> Result<Loop, OpError> {
    let e = edge_at(l, x)?;
    let y = p
        .location_of(e)
        .ok_or(OpError::NotAdmissible("plaquette does not pass through e or e⁻¹"))?;
    merge(l, x, p.as_loop(), y, sign)
}

/// Expansion of `l` at `x` by `p`: positive needs `p` through `e⁻¹`, negative through `e`.
pub fn expand(l: &Loop, x: usize, p: &Plaquette, sign: Sign) -> Result<LoopSequence, OpError> {
    check_expand(l, x, p, sign)?;
    Ok(LoopSequence::from_nonnull(vec![l.clone(), p.as_loop().clone()]))
}

fn check_expand(l: &Loop, x: usize, p: &Plaquette, sign: Sign) -> Result<(), OpError> {
    let e = edge_at(l, x)?;
    let need = match sign {
        Sign::Plus => e.inverse(),
        Sign::Minus => e.clone(),
    };
    if !p.as_loop().edges().contains(&need) {
        return Err(OpError::NotAdmissible("expansion plaquette has the wrong orientation"));
    }
    Ok(())
}

fn component(s: &LoopSequence, r: usize) -> Result<&Loop, OpError> {
    r.checked_sub(1)
        .and_then(|i| s.loops().get(i))
        .ok_or(OpError::NoComponent(r))
}

fn replace_slot(s: &LoopSequence, r: usize, with: &[Loop]) -> LoopSequence {
    let mut loops = Vec::with_capacity(s.size() + 1);
    for (i, l) in s.loops().iter().enumerate() {
        if i + 1 == r {
            loops.extend(with.iter().filter(|l| !l.is_null()).cloned());
        } else {
            loops.push(l.clone());
        }
    }
    LoopSequence::from_nonnull(loops)
}

/// Apply a catalog operation to a sequence.
pub fn apply(s: &LoopSequence, op: &OperationRecord) -> Result<LoopSequence, OpError> {
    if s.is_null() {
        return Err(OpError::NullSequence);
    }
    let need = |v: Option<usize>| v.ok_or(OpError::NotAdmissible("missing location"));
    let sign = op.kind.sign().unwrap_or(Sign::Plus);
    match op.kind.family() {
        Family::Inaction => Ok(s.clone()),
        Family::Merger => {
            let r2 = op.r2.ok_or(OpError::NotAdmissible("merger without a second component"))?;
            if r2 == op.r {
                return Err(OpError::SameLoop);
            }
            let (l, l2) = (component(s, op.r)?, component(s, r2)?);
            let (x, y) = (need(op.x)?, need(op.y)?);
            let same = edge_at(l2, y)? == edge_at(l, x)?;
            if same != sign.is_plus() {
                return Err(OpError::NotAdmissible(
                    "catalog mergers are ⊕ on equal edges and ⊖ on inverse edges",
                ));
            }
            let m = merge(l, x, l2, y, sign)?;
            let mut loops = Vec::with_capacity(s.size());
            for (i, c) in s.loops().iter().enumerate() {
                if i + 1 == op.r {
                    if !m.is_null() {
                        loops.push(m.clone());
                    }
                } else if i + 1 != r2 {
                    loops.push(c.clone());
                }
            }
            Ok(LoopSequence::from_nonnull(loops))
        }
        Family::Split => {
            let l = component(s, op.r)?;
            let (a, b) = split(l, need(op.x)?, need(op.y)?, sign)?;
            Ok(replace_slot(s, op.r, &[a, b]))
        }
        Family::Deform => {
            let l = component(s, op.r)?;
            let p = op.plaquette.as_ref().ok_or(OpError::NotAdmissible("missing plaquette"))?;
            if !p.is_positive() {
                return Err(OpError::NotAdmissible("deformation plaquette must be positively oriented"));
            }
            let m = deform(l, need(op.x)?, p, sign)?;
            Ok(replace_slot(s, op.r, &[m]))
        }
        Family::Expand => {
            let l = component(s, op.r)?;
            let p = op.plaquette.as_ref().ok_or(OpError::NotAdmissible("missing plaquette"))?;
            check_expand(l, need(op.x)?, p, sign)?;
            Ok(replace_slot(s, op.r, &[l.clone(), p.as_loop().clone()]))
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CatalogEntry {
    pub op: OperationRecord,
    pub result: LoopSequence,
}

/// Every operation applicable to a non-null sequence, with its result.
///
/// The inaction entry comes first; `zero_inaction` marks it when ℓ(s) = 0.
#[derive(Clone, Debug)]
pub struct Catalog {
    pub entries: Vec<CatalogEntry>,
    pub zero_inaction: bool,
}

impl Catalog {
    pub fn of_kind(&self, kind: OpKind) -> impl Iterator<Item = &CatalogEntry> {
        self.entries.iter().filter(move |c| c.op.kind == kind)
    }

    pub fn count(&self, kind: OpKind) -> usize {
        self.of_kind(kind).count()
    }
}

/// Build M±(s), S±(s), D±(s), E±(s) and the inaction entry.
///
/// Mergers are ⊕ when the two locations hold the same edge and ⊖ when they hold inverse
/// edges; both merge directions are listed. Splitting pairs are ordered. Expansions and
/// deformations are listed per location.
pub fn operation_catalog(s: &LoopSequence) -> Result<Catalog, OpError> {
    if s.is_null() {
        return Err(OpError::NullSequence);
    }
    let mut entries = vec![CatalogEntry { op: OperationRecord::inaction(), result: s.clone() }];
    for (ri, l) in s.loops().iter().enumerate() {
        for x in 1..=l.len() {
            entries_at(s, ri + 1, x, &mut entries);
        }
    }
    Ok(Catalog { entries, zero_inaction: s.ell() == 0 })
}

/// All non-inaction catalog entries acting on component `r` at location `x`: deformations
/// and expansions at `x`, splittings at `(x, y)`, and mergers of another component into
/// `r` at `(x, y)`.
///
/// Panics if `r` or `x` is out of range.
pub fn entries_at(s: &LoopSequence, r: usize, x: usize, out: &mut Vec<CatalogEntry>) {
    let loops = s.loops();
    let ri = r - 1;
    let l = &loops[ri];
    let e = &l.edges()[x - 1];
    for p in positive_plaquettes_through(e) {
        for sign in [Sign::Plus, Sign::Minus] {
            let m = deform(l, x, &p, sign).expect("admissible by construction");
            out.push(CatalogEntry {
                op: OperationRecord::deform(sign, r, x, p.clone()),
                result: replace_slot(s, r, &[m]),
            });
        }
    }
    for (sign, through) in [(Sign::Plus, e.inverse()), (Sign::Minus, e.clone())] {
        for p in plaquettes_containing(&through) {
            let result = replace_slot(s, r, &[l.clone(), p.as_loop().clone()]);
            out.push(CatalogEntry { op: OperationRecord::expand(sign, r, x, p), result });
        }
    }
    let inv = e.inverse();
    let sign_of = |f: &Edge| {
        if f == e {
            Some(Sign::Plus)
        } else if *f == inv {
            Some(Sign::Minus)
        } else {
            None
        }
    };
    for (yi, f) in l.edges().iter().enumerate() {
        let y = yi + 1;
        if y == x {
            continue;
        }
        let Some(sign) = sign_of(f) else { continue };
        let (a, b) = split(l, x, y, sign).expect("admissible by construction");
        out.push(CatalogEntry {
            op: OperationRecord::split(sign, r, x, y),
            result: replace_slot(s, r, &[a, b]),
        });
    }
    for (r2i, l2) in loops.iter().enumerate() {
        if r2i == ri {
            continue;
        }
        for (yi, f) in l2.edges().iter().enumerate() {
            let Some(sign) = sign_of(f) else { continue };
            let y = yi + 1;
            let m = merge(l, x, l2, y, sign).expect("admissible by construction");
            let mut merged = Vec::with_capacity(loops.len() - 1);
            for (i, c) in loops.iter().enumerate() {
                if i == ri {
                    if !m.is_null() {
                        merged.push(m.clone());
                    }
                } else if i != r2i {
                    merged.push(c.clone());
                }
            }
            out.push(CatalogEntry {
                op: OperationRecord::merger(sign, r, x, r2i + 1, y),
                result: LoopSequence::from_nonnull(merged),
            });
        }
    }
}

/// One JSON-lines record of a catalog dump.
#[derive(Serialize, Deserialize, Debug, Clone, PartialEq, Eq)]
pub struct CatalogLine {
    pub kind: OpKind,
    pub r: usize,
    pub r2: Option<usize>,
    pub x: Option<usize>,
    pub y: Option<usize>,
    pub plaquette: Option<String>,
    pub result: String,
    pub zero_weight: bool,
}

pub fn catalog_lines(c: &Catalog) -> Vec<CatalogLine> {
    c.entries
        .iter()
        .map(|en| CatalogLine {
            kind: en.op.kind,
            r: en.op.r,
            r2: en.op.r2,
            x: en.op.x,
            y: en.op.y,
            plaquette: en.op.plaquette.as_ref().map(|p| p.as_loop().to_string()),
            result: en.result.to_string(),
            zero_weight: en.op.kind == OpKind::Inaction && c.zero_inaction,
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::Vertex;

    fn lp(start: &[i32], steps: &[i8]) -> Loop {
        Loop::from_steps(&Vertex::new(start).unwrap(), steps).unwrap()
    }

    fn p() -> Loop {
        lp(&[0, 0], &[1, 2, -1, -2])
    }

    #[test]
    fn self_negative_merger_is_null() {
        let l = p();
        for x in 1..=4 {
            assert!(merge(&l, x, &l, x, Sign::Minus).unwrap().is_null());
        }
    }

    #[test]
    fn adjacent_squares() {
        // left square has e = (1,0)->(1,1); the right square traversed the same way has e⁻¹
        let left = p();
        let right = lp(&[1, 0], &[1, 2, -1, -2]);
        let e = Edge::new(Vertex::new(&[1, 0]).unwrap(), 2, 1).unwrap();
        let x = left.locations(&e).0[0];
        let y = right.locations(&e).1[0];
        let m = merge(&left, x, &right, y, Sign::Minus).unwrap();
        assert_eq!(m, lp(&[0, 0], &[1, 1, 2, -1, -1, -2]));

        let right_rev = right.inverse();
        let y = right_rev.locations(&e).0[0];
        let m = merge(&left, x, &right_rev, y, Sign::Plus).unwrap();
        assert_eq!(m.len(), 8);
        let (a, b) = m.locations(&e);
        assert_eq!((a.len(), b.len()), (2, 0));
    }

    #[test]
    fn double_wound_positive_split() {
        let dw = lp(&[0, 0], &[1, 2, -1, -2, 1, 2, -1, -2]);
        let (a, b) = split(&dw, 1, 5, Sign::Plus).unwrap();
        assert_eq!((a, b), (p(), p()));
    }

    #[test]
    fn dumbbell_negative_split() {
        // square A below the origin, bridge f along axis 1 from (1,0), square B at (2,0)
        let w = lp(&[1, 0], &[1, 1, 2, -1, -2, -1, -1, -2, 1, 2]);
        let f = Edge::new(Vertex::new(&[1, 0]).unwrap(), 1, 1).unwrap();
        let (fa, fb) = w.locations(&f);
        let (one, two) = split(&w, fa[0], fb[0], Sign::Minus).unwrap();
        let sq_b = lp(&[2, 0], &[1, 2, -1, -2]);
        let sq_a = lp(&[0, -1], &[1, 2, -1, -2]);
        let mut got = vec![one, two];
        got.sort();
        let mut want = vec![sq_a, sq_b];
        want.sort();
        assert_eq!(got, want);
    }

    #[test]
    fn deformation_by_self_and_neighbour() {
        let l = p();
        for x in 1..=4 {
            let e = l.edge(x).unwrap();
            let q = positive_plaquettes_through(e)
                .into_iter()
                .find(|q| q.as_loop() == &l || q.as_loop() == &l.inverse())
                .unwrap();
            assert!(deform(&l, x, &q, Sign::Minus).unwrap().is_null());
        }
        let e = Edge::new(Vertex::new(&[1, 0]).unwrap(), 2, 1).unwrap();
        let x = l.locations(&e).0[0];
        for q in positive_plaquettes_through(&e) {
            if q.as_loop() == &l || q.as_loop() == &l.inverse() {
                continue;
            }
            let m = deform(&l, x, &q, Sign::Minus).unwrap();
            assert_eq!(m.len(), 6);
            let m = deform(&l, x, &q, Sign::Plus).unwrap();
            assert!(m.len() <= 8);
        }
    }

    #[test]
    fn plaquette_catalog_counts() {
        let s = LoopSequence::single(p());
        let c = operation_catalog(&s).unwrap();
        assert_eq!(c.count(OpKind::NegDeform), 8);
        assert_eq!(c.count(OpKind::PosDeform), 8);
        assert_eq!(c.count(OpKind::NegExpand), 8);
        assert_eq!(c.count(OpKind::PosExpand), 8);
        assert_eq!(c.count(OpKind::PosSplit) + c.count(OpKind::NegSplit), 0);
        assert_eq!(c.count(OpKind::PosMerger) + c.count(OpKind::NegMerger), 0);
        let nulls = c.of_kind(OpKind::NegDeform).filter(|e| e.result.is_null()).count();
        assert_eq!(nulls, 4);
        for en in &c.entries {
            assert_eq!(apply(&s, &en.op).unwrap(), en.result);
        }
    }

    #[test]
    fn merger_directions_counted_separately() {
        let s = LoopSequence::new(vec![p(), p()]).unwrap();
        let c = operation_catalog(&s).unwrap();
        let from_first = c.of_kind(OpKind::PosMerger).filter(|e| e.op.r == 1).count();
        assert_eq!(from_first, 4);
        assert_eq!(c.count(OpKind::PosMerger), 8);
        assert_eq!(c.count(OpKind::NegMerger), 0);
        let s = LoopSequence::new(vec![p(), p().inverse()]).unwrap();
        let c = operation_catalog(&s).unwrap();
        assert_eq!(c.count(OpKind::NegMerger), 8);
        assert!(c.of_kind(OpKind::NegMerger).all(|e| e.result.is_null()));
    }

    #[test]
    fn expansion_by_itself() {
        let l = p();
        let q = Plaquette::new(l.clone()).unwrap();
        let s = expand(&l, 1, &q, Sign::Minus).unwrap();
        assert_eq!(s.loops(), &[l.clone(), l.clone()]);
        assert!(expand(&l, 1, &q, Sign::Plus).is_err());
    }
}
