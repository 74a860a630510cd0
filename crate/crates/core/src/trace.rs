//! JSONL trace files: one stage per line.
//!
//! Lines are parsed into raw records first so that a corrupted cone reaches
//! the verifier as a failed invariant rather than a parse failure.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::accessor::{ExpansionTrace, Stage};
use crate::error::{Error, Result};
use crate::exactnum::Rat;
use crate::lattice_geom::{
    parse_int_triple, PrimitiveVector, QuadPoint2, RationalLine, RegularCone,
};
use crate::starring::{StarringRun, StarringStep};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawCone {
    pub v: [[String; 3]; 3],
}

impl RawCone {
    pub fn from_cone(c: &RegularCone) -> RawCone {
        RawCone {
            v: c.generators()
                .clone()
                .map(|g| g.coords().map(|x| x.to_string())),
        }
    }

    pub fn vectors(&self) -> Result<[PrimitiveVector; 3]> {
        let [a, b, c] = self
            .v
            .clone()
            .map(|t| parse_int_triple(t).and_then(|[p, q, r]| PrimitiveVector::new(p, q, r)));
        Ok([a?, b?, c?])
    }

    /// The cone, checked for regularity and positive third coordinates.
    pub fn cone(&self) -> Result<RegularCone> {
        RegularCone::new(self.vectors()?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub preamble: bool,
    pub step1_iterations: u64,
    pub p: u64,
    pub q: u64,
}

/// One line of a trace file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub k: usize,
    pub cone: RawCone,
    pub steps: Vec<StarringRun>,
    pub avoided_line: [i64; 3],
    pub zeta_cos2: Rat,
    pub steering: Vec<QuadPoint2>,
    pub rounds: Vec<RoundRecord>,
}

fn line_i64(l: &RationalLine) -> [i64; 3] {
    l.coeffs().map(|x| {
        x.to_i64()
            .expect("enumerated lines have small coefficients")
    })
}

impl StageRecord {
    pub fn from_stage(s: &Stage) -> StageRecord {
        StageRecord {
            k: s.k,
            cone: RawCone::from_cone(&s.cone),
            steps: s.steps.clone(),
            avoided_line: line_i64(&s.avoided_line),
            zeta_cos2: s.zeta_cos2.clone(),
            steering: s.steering(),
            rounds: s
                .rounds
                .iter()
                .map(|r| RoundRecord {
                    preamble: r.preamble,
                    step1_iterations: r.step1_iterations,
                    p: r.p,
                    q: r.q,
                })
                .collect(),
        }
    }

    pub fn avoided_line(&self) -> Result<RationalLine> {
        let [a, b, c] = self.avoided_line.map(BigInt::from);
        RationalLine::new(a, b, c)
    }

    /// Rebuilds a stage without per-round detail.
    pub fn to_stage(&self) -> Result<Stage> {
        Ok(Stage {
            k: self.k,
            cone: self.cone()?,
            steps: self.steps.clone(),
            avoided_line: self.avoided_line()?,
            zeta_cos2: self.zeta_cos2.clone(),
            rounds: Vec::new(),
        })
    }

    pub fn cone(&self) -> Result<RegularCone> {
        self.cone.cone()
    }
}

pub fn to_jsonl(trace: &ExpansionTrace) -> String {
    let mut out = String::new();
    for s in &trace.stages {
        out.push_str(
            &serde_json::to_string(&StageRecord::from_stage(s)).expect("record serializes"),
        );
        out.push('\n');
    }
    out
}

/// Parses every non-empty line; the error names the 1-based line number.
pub fn parse_jsonl(text: &str) -> Result<Vec<StageRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::Parse {
                what: "trace line",
                input: format!("line {}: {e}", i + 1),
            })
        })
        .collect()
}

/// One line of a baseline trace.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaselineRecord {
    pub k: usize,
    pub cone: RawCone,
    pub step: StarringStep,
    pub min_angle_cos2: Rat,
}
