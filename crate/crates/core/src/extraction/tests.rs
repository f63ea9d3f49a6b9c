use proptest::prelude::*;

use super::*;
use crate::arcs::find_arcs;
use crate::generate::{periodic, random_nontrivial};
use crate::rng::rng_from_seed;

fn sample(n: usize, seed: u64) -> (Graph, MoveSequence, Configuration) {
    let mut rng = rng_from_seed(seed);
    let g = Graph::complete(n);
    let s = random_nontrivial(&g, 5 * n, &mut rng).unwrap();
    let gamma = Configuration::random(n, &mut rng);
    (g, s, gamma)
}

#[test]
fn random_sequences_give_valid_certificates() {
    for seed in 0..30 {
        let (g, s, gamma) = sample(16, seed);
        let ex = extract(&s, &gamma, &g, ExtractOptions::default()).unwrap();
        assert!(check_certificate(&s, &gamma, &ex.certificate, &g));
        assert!(ex.certificate.rank > 0);
    }
}

#[test]
fn mutated_certificates_fail() {
    let (g, s, gamma) = sample(16, 4);
    let cert = extract(&s, &gamma, &g, ExtractOptions::default()).unwrap().certificate;

    let mut bad = cert.clone();
    bad.rank += 1;
    assert!(!check_certificate(&s, &gamma, &bad, &g));

    // point the first Q arc at a different source arc of H
    let other = find_arcs(&s).into_iter().find(|a| {
        let q = cert.q[0];
        (a.left, a.right) != (q.source.left, q.source.right)
            && improvement_vector(&s, a, &gamma, &g).unwrap()
                != improvement_vector(&s, &q.source_arc(), &gamma, &g).unwrap()
    });
    let other = other.unwrap();
    let mut bad = cert.clone();
    bad.q[0].source = Span { left: other.left, right: other.right };
    bad.q[0].node = other.node;
    assert!(!check_certificate(&s, &gamma, &bad, &g));

    let mut bad = cert.clone();
    let v = *bad.tau.keys().next().unwrap();
    bad.tau.remove(&v);
    assert!(!check_certificate(&s, &gamma, &bad, &g));

    let mut bad = cert;
    bad.b.reverse();
    assert!(!check_certificate(&s, &gamma, &bad, &g));
}

#[test]
fn last_chunks_case() {
    let g = Graph::complete(6);
    let s = MoveSequence::new(6, vec![3, 1, 5, 6, 3, 6, 5, 1, 3, 1, 5, 1, 3, 6, 5]).unwrap();
    let gamma = Configuration::from_signs(&[1, -1, 1, 1, 1, 1]).unwrap();
    assert!(extract(&s, &gamma, &g, ExtractOptions::default()).is_err());
    let ex = extract(&s, &gamma, &g, ExtractOptions { any_length: true }).unwrap();
    assert_eq!(ex.certificate.case, CaseTag::LastChunks);
    assert_eq!(ex.certificate.b, (1..=15).collect::<Vec<_>>());
    assert!(
        2 * ex.certificate.rank
            >= ex.certificate.q.iter().map(|a| a.node).collect::<std::collections::BTreeSet<_>>().len()
    );
}

#[test]
fn long_arc_outside_last_group() {
    // m = 24: lengths 13..16 are chunk 4, group 2 of 3, yet exceed m/2
    let mut rng = rng_from_seed(2);
    let g = Graph::complete(12);
    let s = periodic(12, 12, 24, &mut rng).unwrap();
    let gamma = Configuration::random(12, &mut rng);
    let ex = extract(&s, &gamma, &g, ExtractOptions { any_length: true }).unwrap();
    assert_eq!(ex.certificate.case, CaseTag::LongRadius);
    assert_eq!(ex.info.interval, Some(Interval::new(1, 24)));
}

#[test]
fn refusals() {
    let (g, s, gamma) = sample(8, 1);
    assert!(matches!(extract(&s, &gamma, &Graph::complete(9), ExtractOptions::default()), Err(Error::Validation(_))));
    let short = s.slice(1, 20);
    assert!(matches!(extract(&short, &gamma, &g, ExtractOptions::default()), Err(Error::Precondition(_))));
    assert!(extract(&s, &Configuration::empty(8), &g, ExtractOptions::default()).is_err());
    // arc (1,3) of node 1 around node 2, edge-free graph makes it trivial
    let empty = Graph::new(3, vec![]).unwrap();
    let t = MoveSequence::new(3, vec![1, 2, 1]).unwrap();
    let e = extract(&t, &Configuration::uniform(3, 1), &empty, ExtractOptions { any_length: true });
    assert!(matches!(e, Err(Error::Precondition(_))));
    let no_arcs = MoveSequence::new(3, vec![1, 2, 3]).unwrap();
    let e = extract(&no_arcs, &Configuration::uniform(3, 1), &Graph::complete(3), ExtractOptions { any_length: true });
    assert!(matches!(e, Err(Error::Precondition(_))));
}

#[test]
fn overlap_shapes() {
    let g = Graph::complete(4);
    let a = Arc { left: 1, right: 4, node: 1 };
    let interleaved = Arc { left: 2, right: 6, node: 2 };
    let nested = Arc { left: 2, right: 3, node: 2 };
    let disjoint = Arc { left: 5, right: 7, node: 2 };
    assert!(overlaps(&a, &interleaved, &g) && overlaps(&interleaved, &a, &g));
    assert!(!overlaps(&a, &nested, &g));
    assert!(!overlaps(&a, &disjoint, &g));
    let path = Graph::new(4, vec![(1, 2), (2, 3), (3, 4)]).unwrap();
    let far = Arc { left: 2, right: 6, node: 3 };
    assert!(!overlaps(&a, &far, &path));
    assert!(!overlaps(&a, &Arc { left: 2, right: 6, node: 1 }, &g));
}

#[test]
fn compute_overlap_splits_and_witnesses() {
    // 1 2 1 3 2 3 4 4? no repeats allowed next to each other, use 4 3 4
    let s = MoveSequence::new(4, vec![1, 2, 1, 3, 2, 3, 4, 3, 4]).unwrap();
    let g = Graph::complete(4);
    let c = vec![Arc { left: 1, right: 3, node: 1 }];
    let r = compute_overlap(&s, Interval::new(1, 9), &c, &g);
    // (2,5) interleaves (1,3); (4,6), (6,8), (7,9) do not
    assert_eq!(r.overlap, vec![(Arc { left: 2, right: 5, node: 2 }, c[0])]);
    assert_eq!(r.nonoverlap.len(), 3);
}

#[test]
fn certificate_json_round_trip() {
    let (g, s, gamma) = sample(16, 7);
    let cert = extract(&s, &gamma, &g, ExtractOptions::default()).unwrap().certificate;
    let back: Certificate = serde_json::from_str(&serde_json::to_string(&cert).unwrap()).unwrap();
    assert_eq!(back, cert);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn certificate_is_valid_and_consistent(seed in any::<u64>(), n in prop::sample::select(vec![8usize, 12, 16, 24])) {
        let (g, s, gamma) = sample(n, seed);
        let ex = extract(&s, &gamma, &g, ExtractOptions::default()).unwrap();
        let c = &ex.certificate;
        prop_assert!(check_certificate(&s, &gamma, c, &g));
        prop_assert!(c.q.len() >= c.rank);
        prop_assert!((c.ratio - c.rank as f64 / c.b.len() as f64).abs() < 1e-12);
    }
}
