//! Workloads shared by the benchmarks.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toricity_core::{
    parse_system_file, FieldSpec, Monomial, OrderKind, PolyRing, PolySystem, Polynomial,
};

pub fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures")
}

pub fn fixture(name: &str) -> PolySystem {
    parse_system_file(&fixture_dir().join(name), FieldSpec::RATIONALS).expect("fixture parses")
}

/// `count` random dense-ish systems over `nvars` variables, each polynomial
/// with up to 4 terms of degree at most `deg`. Same seed, same systems.
pub fn random_systems(seed: u64, count: usize, nvars: usize, deg: u32) -> Vec<PolySystem> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let ring: Arc<PolyRing> = PolyRing::new(
        (1..=nvars).map(|i| format!("x{i}")),
        FieldSpec::RATIONALS,
        OrderKind::Grevlex,
    )
    .unwrap();
    let q = FieldSpec::RATIONALS;
    (0..count)
        .map(|_| {
            let m = rng.gen_range(1..=3);
            let polys = (0..m)
                .map(|_| {
                    let terms: Vec<_> = (0..rng.gen_range(2..=4))
                        .map(|_| {
                            let mut e = vec![0u32; nvars];
                            for _ in 0..rng.gen_range(0..=deg) {
                                e[rng.gen_range(0..nvars)] += 1;
                            }
                            let c =
                                rng.gen_range(1..=9i64) * if rng.gen_bool(0.5) { 1 } else { -1 };
                            (q.from_i64(c), Monomial::new(e))
                        })
                        .collect();
                    Polynomial::from_terms(&ring, terms).unwrap()
                })
                .collect();
            PolySystem::new(&ring, polys).unwrap()
        })
        .collect()
}
