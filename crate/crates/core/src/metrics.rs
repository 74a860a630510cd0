//! Exact identity checks, ratio bounds and certified distances to the limit ray.

use std::cmp::Ordering;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::Signed;
use serde::Serialize;

use crate::accessor::ExpansionTrace;
use crate::error::{Error, Result};
use crate::exactnum::{interval_sqrt_upper, Rat, RatInterval};
use crate::lattice_geom::{
    angle_cmp, angle_cos2, diam2, dual_of, min_angle_cos2, orient, AngleThreshold, PrimitiveVector,
    RatTriangle, RegularCone,
};

/// Checks the nine exact identities linking a regular cone to its dual rows.
///
/// For every rotation (i, j, k) of (0, 1, 2):
/// dist²(uⱼ, uₖ)·rⱼ²rₖ² = δᵢ², dist²(uᵢ, uⱼuₖ)·rᵢ²δᵢ² = 1 and sin²θᵢ·δⱼ²δₖ² = rᵢ².
pub fn verify_duality(c: &RegularCone) -> Result<bool> {
    if !c.in_upper_half_space() {
        return Err(Error::NotInUpperHalfSpace);
    }
    let t = c.triangle();
    let dual = dual_of(c);
    let r2 = c.denominators().map(|r| Rat::from(r * r));
    let u = t.vertices();
    for i in 0..3 {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        let side2 = u[j].dist2(&u[k]);
        if &side2 * &r2[j] * &r2[k] != dual.delta2[i] {
            return Ok(false);
        }
        let height2 = orient(&u[j], &u[k], &u[i]).square() / &side2;
        if height2 * &r2[i] * &dual.delta2[i] != Rat::one() {
            return Ok(false);
        }
        let sin2 = Rat::one() - angle_cos2(&t, i);
        if sin2 * &dual.delta2[j] * &dual.delta2[k] != r2[i] {
            return Ok(false);
        }
    }
    Ok(true)
}

/// diam⁴ / area², the fourth power of the diameter-to-√area ratio.
pub fn ratio4(t: &RatTriangle) -> Rat {
    let d = diam2(t);
    (&d * &d) / t.area().square()
}

/// Interval holding dist²(v, ray through (α, β, 1)) for every (α, β) in the box.
///
/// With v = r·(x₀, y₀, 1), e_α = α − x₀ and e_β = β − y₀ the distance is
/// r²(e_α² + e_β² + (x₀e_β − y₀e_α)²)/(α² + β² + 1). Centering on v's own
/// point keeps a tiny box from turning into a wide interval.
pub fn certified_ray_distance(
    v: &PrimitiveVector,
    enclosure: &(RatInterval, RatInterval),
) -> Result<RatInterval> {
    if !v.r().is_positive() {
        return Err(Error::NotInUpperHalfSpace);
    }
    let (alpha, beta) = enclosure;
    let pt = v.point();
    let ea = alpha.shift(&-&pt.x);
    let eb = beta.shift(&-&pt.y);
    let cross = eb.scale(&pt.x).sub(&ea.scale(&pt.y));
    let num = ea.square().add(&eb.square()).add(&cross.square());
    let den = alpha.square().add(&beta.square()).shift(&Rat::one());
    let r2 = Rat::from(v.r() * v.r());
    let q = num.div_positive(&den).ok_or(Error::EmptyInterval)?;
    Ok(q.scale(&r2))
}

/// k⁴ for k = 2·(13/23)^{1/4}.
pub fn k4_theta_star() -> Rat {
    Rat::new(208, 23)
}

fn as_strings<S: serde::Serializer>(d: &[BigInt; 3], s: S) -> std::result::Result<S::Ok, S::Error> {
    d.clone().map(|x| x.to_string()).serialize(s)
}

/// One row of a convergence report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct StageReport {
    pub k: usize,
    /// Vertex denominators, ascending.
    #[serde(serialize_with = "as_strings")]
    pub d: [BigInt; 3],
    pub area: Rat,
    pub diam2: Rat,
    pub ratio4: Rat,
    pub min_angle_cos2: Rat,
    /// dist² from the smallest-denominator vertex vector to the limit ray.
    pub dist2: RatInterval,
    /// 52/(23·d₃²), the square of the bound k²/(2d₃) on dist².
    pub bound4: Rat,
    /// distUB² ≤ d₁²·diam².
    pub chain_ok: bool,
    /// (distUB²)² ≤ 52/(23·d₃²).
    pub bound_ok: bool,
}

impl StageReport {
    /// Rational upper bound on k²/(2d₃).
    pub fn bound2_upper(&self) -> Rat {
        interval_sqrt_upper(&self.bound4, 64).expect("bound4 is positive")
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConvergenceReport {
    pub enclosure_depth: usize,
    pub enclosure: (RatInterval, RatInterval),
    pub stages: Vec<StageReport>,
}

impl ConvergenceReport {
    pub fn all_ok(&self) -> bool {
        self.stages.iter().all(|s| s.chain_ok && s.bound_ok)
    }

    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("k,d1,d2,d3,area,diam2,ratio4,min_angle_cos2,distUB2_hi,bound2\n");
        for s in &self.stages {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{}",
                s.k,
                s.d[0],
                s.d[1],
                s.d[2],
                s.area,
                s.diam2,
                s.ratio4,
                s.min_angle_cos2,
                s.dist2.hi(),
                s.bound2_upper()
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Reports stages 0..depth−1 of `trace` against the bounding box of stage
/// `depth − 1`, which encloses the limit point.
pub fn convergence_report(trace: &ExpansionTrace, depth: usize) -> Result<ConvergenceReport> {
    let cones: Vec<&RegularCone> = trace.stages.iter().map(|s| &s.cone).collect();
    convergence_report_cones(&cones, depth)
}

pub fn convergence_report_cones(cones: &[&RegularCone], depth: usize) -> Result<ConvergenceReport> {
    if depth == 0 || cones.len() < depth {
        return Err(Error::InsufficientDepth {
            have: cones.len(),
            need: depth.max(1),
        });
    }
    let enclosure = cones[depth - 1].triangle().bounding_box();
    let mut stages = Vec::with_capacity(depth - 1);
    for (k, c) in cones[..depth - 1].iter().enumerate() {
        let t = c.triangle();
        let mut order = [0usize, 1, 2];
        order.sort_by(|&i, &j| c.denominators()[i].cmp(c.denominators()[j]).then(i.cmp(&j)));
        let d = order.map(|i| c.denominators()[i].clone());
        let dist2 = certified_ray_distance(c.generator(order[0]), &enclosure)?;
        let diam2 = diam2(&t);
        let d1 = Rat::from(d[0].clone());
        let d3 = Rat::from(d[2].clone());
        let bound4 = Rat::new(52, 23) / d3.square();
        let chain_ok = dist2.hi() <= &(d1.square() * &diam2);
        let bound_ok = dist2.hi().square() <= bound4;
        stages.push(StageReport {
            k,
            d,
            area: t.area(),
            ratio4: ratio4(&t),
            diam2,
            min_angle_cos2: min_angle_cos2(&t),
            dist2,
            bound4,
            chain_ok,
            bound_ok,
        });
    }
    Ok(ConvergenceReport {
        enclosure_depth: depth,
        enclosure,
        stages,
    })
}

/// If every angle of `t` is at least θ, then ratio⁴ ≤ 16·cot²θ, the value on
/// the isosceles triangle with base angles θ. Vacuously true otherwise.
///
/// For θ* this is 23·ratio⁴ ≤ 208.
pub fn davenport_floor_check(t: &RatTriangle, theta: &AngleThreshold) -> bool {
    let all_at_least = (0..3).all(|i| {
        matches!(
            angle_cmp(t, i, theta),
            Ok(Ordering::Greater | Ordering::Equal)
        )
    });
    if !all_at_least {
        return true;
    }
    ratio4(t) * theta.sin2() <= Rat::from(16) * theta.cos2()
}
