//! Trajectories: replayable sequences of operations and their weights.

use serde::{Deserialize, Serialize};

use crate::error::OpError;
use crate::ops::{apply, Family, OperationRecord};
use crate::sequence::LoopSequence;
use crate::weight::{transition_weight, SymbolicWeight};

/// Operation counts of a trajectory: a deformations, b expansions, c mergers, d inactions.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Default, Serialize, Deserialize)]
pub struct Counts {
    pub a: u32,
    pub b: u32,
    pub c: u32,
    pub d: u32,
    pub splits: u32,
}

impl Counts {
    pub fn add(&mut self, family: Family) {
        match family {
            Family::Deform => self.a += 1,
            Family::Expand => self.b += 1,
            Family::Merger => self.c += 1,
            Family::Inaction => self.d += 1,
            Family::Split => self.splits += 1,
        }
    }

    /// (i, k) = (a + b, c + d).
    pub fn grade(&self) -> (u32, u32) {
        (self.a + self.b, self.c + self.d)
    }
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Trajectory {
    states: Vec<LoopSequence>,
    ops: Vec<OperationRecord>,
}

impl Trajectory {
    pub fn start(s0: LoopSequence) -> Self {
        Trajectory { states: vec![s0], ops: Vec::new() }
    }

    /// Replay `ops` from `s0`.
    pub fn from_ops(s0: LoopSequence, ops: Vec<OperationRecord>) -> Result<Self, OpError> {
        let mut t = Self::start(s0);
        for op in ops {
            t.push(op)?;
        }
        Ok(t)
    }

    /// Replay `ops` from `states[0]` and require every recorded state to match.
    pub fn from_parts(states: Vec<LoopSequence>, ops: Vec<OperationRecord>) -> Result<Self, OpError> {
        if states.len() != ops.len() + 1 {
            return Err(OpError::Replay(states.len().min(ops.len() + 1)));
        }
        let t = Self::from_ops(states[0].clone(), ops)?;
        if let Some(i) = (0..states.len()).find(|&i| t.states[i] != states[i]) {
            return Err(OpError::Replay(i));
        }
        Ok(t)
    }

    pub fn push(&mut self, op: OperationRecord) -> Result<(), OpError> {
        let next = apply(self.last(), &op)?;
        self.states.push(next);
        self.ops.push(op);
        Ok(())
    }

    pub fn states(&self) -> &[LoopSequence] {
        &self.states
    }

    pub fn ops(&self) -> &[OperationRecord] {
        &self.ops
    }

    pub fn initial(&self) -> &LoopSequence {
        &self.states[0]
    }

    pub fn last(&self) -> &LoopSequence {
        self.states.last().expect("trajectory has an initial state")
    }

    /// Number of operations.
    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Ends at ∅ with every earlier state non-null.
    pub fn is_vanishing(&self) -> bool {
        let n = self.states.len();
        self.states[n - 1].is_null() && self.states[..n - 1].iter().all(|s| !s.is_null())
    }

    pub fn counts(&self) -> Counts {
        let mut c = Counts::default();
        for op in &self.ops {
            c.add(op.kind.family());
        }
        c
    }

    /// Mergers plus inactions.
    pub fn genus(&self) -> u32 {
        self.counts().grade().1
    }

    pub fn weight(&self) -> SymbolicWeight {
        self.states
            .iter()
            .zip(&self.ops)
            .map(|(s, op)| transition_weight(s, op).expect("trajectory steps were replayed"))
            .fold(SymbolicWeight::one(), |acc, w| acc * w)
    }
}
