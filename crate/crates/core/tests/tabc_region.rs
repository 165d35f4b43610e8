//! Region soundness of the T_{a,b,c} harness in the disk, using the quick
//! options that `tabc-sweep` runs with by default.

use bmo_corona::norms::tabc::{tabc_region_harness, HarnessOptions, TabcParams, Verdict};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn interior_triples(count: usize, seed: u64) -> Vec<TabcParams> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            TabcParams::new(
                rng.gen_range(0.7..2.0),
                rng.gen_range(-1.3..1.0),
                rng.gen_range(-1.8..2.0),
            )
        })
        .collect()
}

#[test]
fn random_interior_triples_are_bounded() {
    let opts = HarnessOptions::quick();
    for t in interior_triples(10, 11) {
        assert!(t.region_margins(1).iter().all(|m| *m >= 0.2), "{t:?}");
        let r = tabc_region_harness(&t, 1, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::Bounded, "{t:?}: {:?}", r.curve);
    }
}

#[test]
fn single_face_violations_are_never_bounded() {
    let opts = HarnessOptions::quick();
    let base = interior_triples(3, 12);
    for (i, t) in base.iter().enumerate() {
        let (a, b, c) = (t.a, t.b, t.c);
        let probes = [
            TabcParams::new(0.25, b, c),
            TabcParams::new(a, -1.75, c),
            TabcParams::new(a, b, -2.25),
        ];
        let probe = probes[i];
        assert!(!probe.in_region(1));
        let r = tabc_region_harness(&probe, 1, &opts).unwrap();
        assert_ne!(r.verdict, Verdict::Bounded, "{probe:?}: {:?}", r.curve);
    }
}
