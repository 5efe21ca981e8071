//! Axis-aligned vertex boxes, their positive edges and plaquettes.

use serde::{Deserialize, Serialize};

use lstring_core::lattice::plaquettes_containing;
use lstring_core::{Edge, LoopSequence, Vertex};

use crate::error::GaugeError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Free,
    /// Wraps the field only; loops are never wrapped.
    Periodic,
}

/// A link as it enters an ordered product: storage slot and whether it is daggered.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Step {
    pub slot: usize,
    pub dagger: bool,
}

/// Vertices with 0 ≤ x_a < extent[a].
#[derive(Clone, Debug)]
pub struct Region {
    extent: Vec<i32>,
    boundary: Boundary,
    edges: Vec<usize>,
    plaquettes: Vec<[Step; 4]>,
    /// slot → (plaquette, position of the slot in it)
    touching: Vec<Vec<(usize, usize)>>,
}

impl Region {
    pub fn new(extent: &[i32], boundary: Boundary) -> Result<Self, GaugeError> {
        let d = extent.len();
        if d == 0 || extent.iter().any(|&e| e < 2) {
            return Err(GaugeError::BadBox(d));
        }
        let mut r = Region {
            extent: extent.to_vec(),
            boundary,
            edges: Vec::new(),
            plaquettes: Vec::new(),
            touching: Vec::new(),
        };
        let nv = r.volume();
        r.touching = vec![Vec::new(); nv * d];
        let periodic = boundary == Boundary::Periodic;
        for lin in 0..nv {
            let v = r.coords_of(lin);
            for a in 0..d {
                if periodic || v[a] + 1 < extent[a] {
                    r.edges.push(lin * d + a);
                }
            }
            for i in 0..d {
                for j in i + 1..d {
                    let (Some(vi), Some(vj)) = (r.shift(&v, i), r.shift(&v, j)) else { continue };
                    let steps = [
                        Step { slot: r.slot_of(&v, i), dagger: false },
                        Step { slot: r.slot_of(&vi, j), dagger: false },
                        Step { slot: r.slot_of(&vj, i), dagger: true },
                        Step { slot: r.slot_of(&v, j), dagger: true },
                    ];
                    let pi = r.plaquettes.len();
                    for (pos, st) in steps.iter().enumerate() {
                        r.touching[st.slot].push((pi, pos));
                    }
                    r.plaquettes.push(steps);
                }
            }
        }
        Ok(r)
    }

    /// The box [0, L)^d.
    pub fn cube(d: usize, l: i32, boundary: Boundary) -> Result<Self, GaugeError> {
        Self::new(&vec![l; d], boundary)
    }

    pub fn dim(&self) -> usize {
        self.extent.len()
    }

    pub fn extent(&self) -> &[i32] {
        &self.extent
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn volume(&self) -> usize {
        self.extent.iter().map(|&e| e as usize).product()
    }

    /// Number of link slots (including unused ones on a free boundary).
    pub fn slots(&self) -> usize {
        self.volume() * self.dim()
    }

    /// Active slots: E⁺_Λ.
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    /// P⁺_Λ, each as an ordered product of four steps.
    pub fn plaquettes(&self) -> &[[Step; 4]] {
        &self.plaquettes
    }

    pub fn touching(&self, slot: usize) -> &[(usize, usize)] {
        &self.touching[slot]
    }

    fn coords_of(&self, mut lin: usize) -> Vec<i32> {
        let mut c = vec![0; self.dim()];
        for (a, &e) in self.extent.iter().enumerate() {
            c[a] = (lin % e as usize) as i32;
            lin /= e as usize;
        }
        c
    }

    fn linear(&self, v: &[i32]) -> usize {
        let mut lin = 0usize;
        for a in (0..self.dim()).rev() {
            lin = lin * self.extent[a] as usize + v[a] as usize;
        }
        lin
    }

    fn slot_of(&self, v: &[i32], axis: usize) -> usize {
        self.linear(v) * self.dim() + axis
    }

    fn shift(&self, v: &[i32], axis: usize) -> Option<Vec<i32>> {
        let mut w = v.to_vec();
        w[axis] += 1;
        if w[axis] == self.extent[axis] {
            if self.boundary == Boundary::Periodic {
                w[axis] = 0;
            } else {
                return None;
            }
        }
        Some(w)
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        v.dim() == self.dim() && v.coords().iter().zip(&self.extent).all(|(&x, &e)| (0..e).contains(&x))
    }

    /// The slot and orientation of a lattice edge with both endpoints in the box.
    pub fn step_of(&self, e: &Edge) -> Result<Step, GaugeError> {
        if !self.contains(e.u()) || !self.contains(&e.v()) {
            return Err(GaugeError::EdgeOutside(format!("{e:?}")));
        }
        let p = e.positive();
        Ok(Step { slot: self.slot_of(p.base().coords(), p.axis() as usize - 1), dagger: !e.is_positive() })
    }

    /// Every plaquette through an edge of `s` must lie in the box, so that the loop
    /// equation at `s` involves only plaquettes of the action.
    pub fn check_covers(&self, s: &LoopSequence) -> Result<(), GaugeError> {
        if let Some(d) = s.dim() {
            if d != self.dim() {
                return Err(GaugeError::Dimension { loops: d, region: self.dim() });
            }
        }
        for l in s.loops() {
            for e in l.edges() {
                for p in plaquettes_containing(e) {
                    if let Some(bad) = p.as_loop().edges().iter().find(|pe| !self.contains(pe.u())) {
                        return Err(GaugeError::RegionTooSmall(format!(
                            "{} (vertex {:?})",
                            lstring_core::word::format_loop(p.as_loop()),
                            bad.u().coords()
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}
