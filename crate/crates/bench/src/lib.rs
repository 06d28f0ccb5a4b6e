//! Fixed inputs shared by the benchmarks.

use std::sync::Arc;

use arakelov_core::random::{self, GenParams};
use arakelov_core::rational::{int, q};
use arakelov_core::{CurveModel, EdgeData, MetrisedDivisor, Plf, PointId};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn w1() -> MetrisedDivisor {
    let curve = Arc::new(CurveModel::genus_zero(&[("p0", 1), ("pinf", 1)]).unwrap());
    let dip = Plf::new(int(0), vec![int(1)], vec![q(-1, 2)], int(0)).unwrap();
    MetrisedDivisor::make(
        curve,
        int(0),
        [
            (PointId::from("pinf"), EdgeData::canonical(int(1))),
            (PointId::from("p0"), EdgeData::new(int(0), dip)),
        ],
    )
    .unwrap()
}

/// Random instances with `deg(D) > 0` and the default generator parameters.
pub fn positive_degree(seed: u64, count: usize) -> Vec<MetrisedDivisor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = GenParams::default();
    (0..count)
        .map(|_| {
            let curve = random::curve(&mut rng, &p);
            random::metrised_positive_degree(&mut rng, &curve, &p)
        })
        .collect()
}

pub fn phi_star_instances(seed: u64, count: usize) -> Vec<MetrisedDivisor> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = GenParams {
        max_points: 3,
        max_breakpoints: 3,
        bound: 4,
        max_den: 4,
        max_weight: 2,
    };
    (0..count).map(|_| random::phi_star_instance(&mut rng, &p)).collect()
}
