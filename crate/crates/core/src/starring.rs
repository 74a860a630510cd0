//! Farey mediants and binary starrings of regular cones.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice_geom::{line_side, PrimitiveVector, QuadPoint2, RationalLine, RegularCone};

/// Unordered pair of generator indices `{i, j}` (0-based), stored with `i < j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "[usize; 2]", into = "[usize; 2]")]
pub struct Edge(usize, usize);

impl Edge {
    pub fn new(i: usize, j: usize) -> Result<Edge> {
        if i == j || i > 2 || j > 2 {
            return Err(Error::Parse {
                what: "edge",
                input: format!("[{i},{j}]"),
            });
        }
        Ok(Edge(i.min(j), i.max(j)))
    }

    pub fn lo(self) -> usize {
        self.0
    }

    pub fn hi(self) -> usize {
        self.1
    }

    /// The generator not on this edge.
    pub fn off(self) -> usize {
        3 - self.0 - self.1
    }
}

impl TryFrom<[usize; 2]> for Edge {
    type Error = Error;
    fn try_from([i, j]: [usize; 2]) -> Result<Edge> {
        Edge::new(i, j)
    }
}

impl From<Edge> for [usize; 2] {
    fn from(e: Edge) -> [usize; 2] {
        [e.0, e.1]
    }
}

/// One binary starring: which edge was split, which child was kept
/// (0: mediant replaced the lower index, 1: the higher), and the mediant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarringStep {
    pub edge: Edge,
    pub kept_child: u8,
    pub mediant: PrimitiveVector,
}

pub fn mediant(u: &PrimitiveVector, v: &PrimitiveVector) -> Result<PrimitiveVector> {
    let m = u.add_scaled(v, &BigInt::one());
    if m.content() != BigInt::one() {
        return Err(Error::NotCoprimePair);
    }
    Ok(m)
}

/// Both children of starring `c` at the mediant of `edge`.
///
/// Child 0 has the mediant in place of generator `edge.lo()`, child 1 in
/// place of `edge.hi()`.
pub fn binary_star(c: &RegularCone, edge: Edge) -> (RegularCone, RegularCone) {
    let g = c.generators();
    let m = g[edge.lo()].add_scaled(&g[edge.hi()], &BigInt::one());
    let mut first = g.clone();
    first[edge.lo()] = m.clone();
    let mut second = g.clone();
    second[edge.hi()] = m;
    // det is unchanged by adding one row to another
    (
        RegularCone::new_unchecked(first),
        RegularCone::new_unchecked(second),
    )
}

/// Star `edge` and keep child `kept`, recording the step.
pub fn star_keep(c: &RegularCone, edge: Edge, kept: u8) -> (RegularCone, StarringStep) {
    let (a, b) = binary_star(c, edge);
    let child = if kept == 0 { a } else { b };
    let step = StarringStep {
        edge,
        kept_child: kept,
        mediant: child
            .generator(if kept == 0 { edge.lo() } else { edge.hi() })
            .clone(),
    };
    (child, step)
}

/// The child of the starring at `edge` whose closed triangle holds `target`.
///
/// The two children are separated by the line through the mediant and the
/// off-edge generator; a target on that line has no unique child.
pub fn child_containing(
    c: &RegularCone,
    edge: Edge,
    target: &QuadPoint2,
) -> Result<(RegularCone, StarringStep)> {
    let g = c.generators();
    let m = g[edge.lo()].add_scaled(&g[edge.hi()], &BigInt::one());
    let split = RationalLine::through(&m, &g[edge.off()])?;
    let side_t = line_side(&split, target);
    if side_t == Ordering::Equal {
        return Err(Error::OnSplitLine);
    }
    let side_lo = line_side(&split, &g[edge.lo()].point());
    // child 1 keeps generator lo
    let kept = if side_t == side_lo { 1 } else { 0 };
    Ok(star_keep(c, edge, kept))
}

/// σ_{p,q} = ⟨a + p·b, c + q·b, b⟩ for `c` ordered as ⟨a, b, c⟩.
pub fn sigma_pq(c: &RegularCone, p: u64, q: u64) -> RegularCone {
    let [a, b, cv] = c.generators();
    RegularCone::new_unchecked([
        a.add_scaled(b, &BigInt::from(p)),
        cv.add_scaled(b, &BigInt::from(q)),
        b.clone(),
    ])
}

/// σ_{p,q} as an explicit chain of p + q binary starrings.
///
/// The chain runs on the ordering ⟨a, b, c⟩: p starrings of edge {0, 1}
/// keeping the child with the mediant in slot 0, then q starrings of edge
/// {1, 2} keeping the child with the mediant in slot 2. The final cone is
/// returned in σ_{p,q} order.
pub fn sigma_pq_steps(c: &RegularCone, p: u64, q: u64) -> (RegularCone, Vec<StarringStep>) {
    let mut cur = c.clone();
    let mut steps = Vec::with_capacity((p + q) as usize);
    let ab = Edge(0, 1);
    let bc = Edge(1, 2);
    for _ in 0..p {
        let (next, s) = star_keep(&cur, ab, 0);
        cur = next;
        steps.push(s);
    }
    for _ in 0..q {
        let (next, s) = star_keep(&cur, bc, 1);
        cur = next;
        steps.push(s);
    }
    (cur.permuted([0, 2, 1]), steps)
}

/// `count` consecutive starrings of one edge that all keep the same child.
///
/// With kept child 0 the generator in slot `edge.lo()` becomes
/// `g[lo] + count·g[hi]`; with kept child 1 slot `edge.hi()` becomes
/// `g[hi] + count·g[lo]`. `mediant` is the vector written by the last
/// starring of the run.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StarringRun {
    pub edge: Edge,
    pub kept_child: u8,
    pub count: u64,
    pub mediant: PrimitiveVector,
}

impl StarringRun {
    fn slots(&self) -> (usize, usize) {
        if self.kept_child == 0 {
            (self.edge.lo(), self.edge.hi())
        } else {
            (self.edge.hi(), self.edge.lo())
        }
    }

    /// Applies the whole run to `c`.
    pub fn apply(&self, c: &RegularCone) -> RegularCone {
        star_run(c, self.edge, self.kept_child, self.count).0
    }

    /// The individual starrings of the run, starting from `c`.
    pub fn expand(&self, c: &RegularCone) -> Vec<StarringStep> {
        let mut cur = c.clone();
        (0..self.count)
            .map(|_| {
                let (next, s) = star_keep(&cur, self.edge, self.kept_child);
                cur = next;
                s
            })
            .collect()
    }

    /// True when the run starting at `c` ends with the recorded mediant.
    pub fn consistent_with(&self, c: &RegularCone) -> bool {
        let (dst, _) = self.slots();
        self.count > 0 && self.apply(c).generator(dst) == &self.mediant
    }
}

/// `count` starrings of `edge` keeping child `kept`, in closed form.
pub fn star_run(c: &RegularCone, edge: Edge, kept: u8, count: u64) -> (RegularCone, StarringRun) {
    let (dst, src) = if kept == 0 {
        (edge.lo(), edge.hi())
    } else {
        (edge.hi(), edge.lo())
    };
    let mut g = c.generators().clone();
    g[dst] = g[dst].add_scaled(&g[src], &BigInt::from(count));
    let run = StarringRun {
        edge,
        kept_child: kept,
        count,
        mediant: g[dst].clone(),
    };
    (RegularCone::new_unchecked(g), run)
}

/// σ_{p,q} as at most two runs, in the same order as [`sigma_pq_steps`].
pub fn sigma_pq_runs(c: &RegularCone, p: u64, q: u64) -> (RegularCone, Vec<StarringRun>) {
    let mut cur = c.clone();
    let mut runs = Vec::new();
    for (edge, kept, n) in [(Edge(0, 1), 0, p), (Edge(1, 2), 1, q)] {
        if n > 0 {
            let (next, r) = star_run(&cur, edge, kept, n);
            cur = next;
            runs.push(r);
        }
    }
    (cur.permuted([0, 2, 1]), runs)
}
