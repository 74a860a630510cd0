use rand::Rng;

use crate::lattice_geom::{PrimitiveVector, RegularCone};
use crate::starring::{binary_star, Edge};

pub fn unit_cone() -> RegularCone {
    let pv = |p, q, r| PrimitiveVector::new(p, q, r).unwrap();
    RegularCone::new([pv(0, 0, 1), pv(1, 0, 1), pv(0, 1, 1)]).unwrap()
}

/// Regular cone reached from the unit cone by a random starring chain.
pub fn random_regular_cone<R: Rng>(rng: &mut R, max_depth: usize) -> RegularCone {
    let depth = rng.gen_range(0..=max_depth);
    let mut c = unit_cone();
    for _ in 0..depth {
        let i = rng.gen_range(0..3);
        let e = Edge::new(i, (i + rng.gen_range(1..3)) % 3).unwrap();
        let (a, b) = binary_star(&c, e);
        c = if rng.gen_bool(0.5) { a } else { b };
    }
    c
}
