//! Checkers for the structural lemmas on loop operations, shared by the property tests
//! and the acceptance suite.

use crate::error::LatticeError;
use crate::lattice::{Edge, Loop, Path, Vertex};
use crate::ops::{operation_catalog, apply, Family, Sign};
use crate::sequence::LoopSequence;
use crate::trajectory::Trajectory;

/// Close a walk by stepping back along each axis in turn.
pub fn closed_walk(dim: usize, steps: &[i8]) -> Vec<i8> {
    let mut disp = vec![0i64; dim];
    for &s in steps {
        disp[s.unsigned_abs() as usize - 1] += s.signum() as i64;
    }
    let mut out = steps.to_vec();
    for (a, &v) in disp.iter().enumerate() {
        let back = -(v.signum() as i8) * (a as i8 + 1);
        out.extend(std::iter::repeat_n(back, v.unsigned_abs() as usize));
    }
    out
}

/// Reduce a closed path by erasing cyclically adjacent e e⁻¹ pairs, choosing which pair to
/// erase next from `choices` (taken modulo the number of available pairs).
pub fn reduce_in_order(path: &Path, choices: &[usize]) -> Result<Loop, LatticeError> {
    let inverse = |a: &Edge, b: &Edge| *b == a.inverse();
    let mut w: Vec<Edge> = path.edges().to_vec();
    let mut ci = 0;
    loop {
        let n = w.len();
        let pairs: Vec<usize> = (0..n).filter(|&i| n >= 2 && inverse(&w[i], &w[(i + 1) % n])).collect();
        if pairs.is_empty() {
            break;
        }
        let pick = pairs[choices.get(ci).copied().unwrap_or(0) % pairs.len()];
        ci += 1;
        let j = (pick + 1) % n;
        let (lo, hi) = if pick < j { (pick, j) } else { (j, pick) };
        w.remove(hi);
        w.remove(lo);
    }
    if w.is_empty() {
        return Ok(Loop::null());
    }
    Loop::canonicalize(w)
}

/// Core order-independence for one path and one erase order.
pub fn check_core_order(start: &Vertex, steps: &[i8], choices: &[usize]) -> Result<(), String> {
    let path = Path::from_steps(start, steps).map_err(|e| e.to_string())?;
    let a = Loop::core_of(&path).map_err(|e| e.to_string())?;
    let b = reduce_in_order(&path, choices).map_err(|e| e.to_string())?;
    if a != b {
        return Err(format!("core differs: {a:?} vs {b:?}"));
    }
    Ok(())
}

/// Check every catalog entry of `s` against the length and index lemmas and replay it.
/// Returns the number of entries checked.
#[allow(clippy::int_plus_one)] // bounds kept in the form they are stated
pub fn check_catalog_lemmas(s: &LoopSequence) -> Result<usize, String> {
    let cat = operation_catalog(s).map_err(|e| e.to_string())?;
    let (len, iota) = (s.len() as i64, s.index() as i64);
    for en in &cat.entries {
        let op = &en.op;
        let r = &en.result;
        let replay = apply(s, op).map_err(|e| e.to_string())?;
        if &replay != r {
            return Err(format!("{op:?} does not replay"));
        }
        let (l2, i2) = (r.len() as i64, r.index() as i64);
        let fail = |what: &str| Err(format!("{what} fails for {op:?} on {s}: |s'|={l2} ι'={i2}"));
        match op.kind.family() {
            Family::Inaction => {
                if r != s {
                    return fail("inaction");
                }
            }
            Family::Merger => {
                if l2 > len || i2 > iota + 1 {
                    return fail("merger lemma");
                }
            }
            Family::Deform => {
                if l2 > len + 4 || i2 > iota + 4 {
                    return fail("deformation lemma");
                }
            }
            Family::Expand => {
                if l2 != len + 4 || i2 != iota + 3 {
                    return fail("expansion lemma");
                }
            }
            Family::Split => {
                if r.is_null() || i2 >= iota {
                    return fail("splitting index lemma");
                }
                let l = &s.loops()[op.r - 1];
                let n = l.len() as i64;
                let (x, y) = (op.x.unwrap() as i64, op.y.unwrap() as i64);
                let piece1 = r.loops()[op.r - 1].len() as i64;
                let piece2 = r.loops()[op.r].len() as i64;
                let gap = (y - x).abs();
                // for x > y the cyclic offset is n − |y − x| and the roles of the pieces swap
                let (b1, b2) = if x < y { (n - gap, gap) } else { (gap, n - gap) };
                let ok = match op.kind.sign() {
                    Some(Sign::Minus) => {
                        piece1 <= b1 - 1 && piece2 <= b2 - 1 && i2 <= iota - 3
                    }
                    _ => piece1 <= b1 && piece2 <= b2 && i2 <= iota - 1,
                };
                if !ok {
                    return fail("splitting length bound");
                }
            }
        }
    }
    Ok(cat.entries.len())
}

/// splits ≤ ι(s₀) + 4a + 3b + c for one trajectory.
pub fn split_count_ok(t: &Trajectory) -> bool {
    let c = t.counts();
    c.splits as u64 <= t.initial().index() as u64 + 4 * c.a as u64 + 3 * c.b as u64 + c.c as u64
}
