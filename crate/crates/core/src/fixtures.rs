//! The worked eleven-step vanishing trajectory of a 3×1 rectangle in d = 2.
//!
//! Operations are located by edges rather than by raw indices so the fixture does not
//! depend on the canonical rotation order.

use crate::lattice::{Edge, Loop, Plaquette, Vertex};
use crate::ops::{OperationRecord, Sign};
use crate::sequence::LoopSequence;
use crate::trajectory::Trajectory;
use crate::word::{parse_loop, parse_sequence};

fn lp(word: &str) -> Loop {
    parse_loop(word).expect("fixture word").0
}

fn seq(words: &str) -> LoopSequence {
    if words == "null" {
        return LoopSequence::null();
    }
    parse_sequence(words).expect("fixture sequence").0
}

fn edge(x: i32, y: i32, axis: u8, sign: i8) -> Edge {
    Edge::new(Vertex::new(&[x, y]).unwrap(), axis, sign).unwrap()
}

/// The positively oriented unit square with lower-left corner (x, y).
fn cell(x: i32, y: i32) -> Plaquette {
    let p = Plaquette::new(Loop::from_steps(&Vertex::new(&[x, y]).unwrap(), &[2, 1, -2, -1]).unwrap())
        .unwrap();
    debug_assert!(p.is_positive());
    p
}

fn loc(s: &LoopSequence, r: usize, e: &Edge) -> usize {
    let (a, _) = s.loops()[r - 1].locations(e);
    *a.first().expect("fixture edge present in component")
}

/// Expected states s_0, …, s_11.
pub fn worked_states() -> Vec<LoopSequence> {
    [
        "@(0,1) +1 +1 +1 -2 -1 -1 -1 +2",
        "@(0,1) +1 +1 +1 -2 -1 +2 -1 -2 -1 +2",
        "@(0,0) +2 +1 -2 -1 ; @(2,0) +2 +1 -2 -1",
        "@(0,0) +2 +1 -2 -1 ; @(2,0) +2 +1 -2 -1",
        "@(0,0) +2 +1 -2 -1 ; @(0,-1) +2 +1 -2 -1 ; @(2,0) +2 +1 -2 -1",
        "@(0,-1) +2 +2 +1 -2 -2 -1 ; @(2,0) +2 +1 -2 -1",
        "@(0,-1) +2 +2 +1 -2 -2 -1 ; @(1,0) +2 +1 +1 -2 -1 -1",
        "@(0,-1) +2 +2 +1 +1 +1 -2 -1 -1 -2 -1",
        "@(0,-1) +2 +2 +1 +1 -2 -1 -2 -1",
        "@(0,-1) +2 +2 +1 -2 -2 -1",
        "@(0,0) +2 +1 -2 -1",
        "null",
    ]
    .iter()
    .map(|w| seq(w))
    .collect()
}

/// Replay the worked trajectory. Its weight is −β⁷/226492416000 and it lies in
/// X_{6,1,2,1} of the rectangle.
pub fn worked_trajectory() -> Trajectory {
    let s0 = LoopSequence::single(lp("@(0,1) +1 +1 +1 -2 -1 -1 -1 +2"));
    let mut t = Trajectory::start(s0);
    let step = |t: &mut Trajectory, op: OperationRecord| t.push(op).expect("fixture step applies");

    // push the middle of the bottom side up to the top side
    let s = t.last().clone();
    step(&mut t, OperationRecord::deform(Sign::Minus, 1, loc(&s, 1, &edge(2, 0, 1, -1)), cell(1, 0)));
    // cut along the doubled top edge
    let s = t.last().clone();
    let (x, y) = (loc(&s, 1, &edge(1, 1, 1, 1)), loc(&s, 1, &edge(2, 1, 1, -1)));
    step(&mut t, OperationRecord::split(Sign::Minus, 1, x, y));
    step(&mut t, OperationRecord::inaction());
    let s = t.last().clone();
    step(&mut t, OperationRecord::expand(Sign::Plus, 1, loc(&s, 1, &edge(1, 0, 1, -1)), cell(0, -1)));
    let s = t.last().clone();
    let (x, y) = (loc(&s, 1, &edge(1, 0, 1, -1)), loc(&s, 2, &edge(0, 0, 1, 1)));
    step(&mut t, OperationRecord::merger(Sign::Minus, 1, x, 2, y));
    let s = t.last().clone();
    step(&mut t, OperationRecord::deform(Sign::Minus, 2, loc(&s, 2, &edge(2, 0, 2, 1)), cell(1, 0)));
    let s = t.last().clone();
    let (x, y) = (loc(&s, 1, &edge(1, 1, 2, -1)), loc(&s, 2, &edge(1, 0, 2, 1)));
    step(&mut t, OperationRecord::merger(Sign::Minus, 1, x, 2, y));
    for (e, c) in [
        (edge(3, 1, 2, -1), cell(2, 0)),
        (edge(2, 1, 2, -1), cell(1, 0)),
        (edge(1, -1, 1, -1), cell(0, -1)),
        (edge(1, 0, 1, -1), cell(0, 0)),
    ] {
        let s = t.last().clone();
        step(&mut t, OperationRecord::deform(Sign::Minus, 1, loc(&s, 1, &e), c));
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weight::SymbolicWeight;

    #[test]
    fn replays_expected_states() {
        let t = worked_trajectory();
        assert_eq!(t.states(), worked_states().as_slice());
        assert!(t.is_vanishing());
        let c = t.counts();
        assert_eq!((c.a, c.b, c.c, c.d), (6, 1, 2, 1));
        assert_eq!(t.weight(), SymbolicWeight::from_ratio(-1, 226_492_416_000, 7));
    }
}
