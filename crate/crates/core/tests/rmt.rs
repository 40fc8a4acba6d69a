use lirf::rmt::{eig_sym, random_orthogonal, sample_goi, EnsembleSpec, Tag};
use lirf::rng::{Purpose, RngStream};
use lirf::stats::Welford;
use nalgebra::DMatrix;
use proptest::prelude::*;

/// Entries (i,j,k,l) of the covariance tensor compared under congruence.
const ENTRIES: [(usize, usize, usize, usize); 4] = [(0, 0, 0, 0), (0, 0, 1, 1), (0, 1, 0, 1), (1, 2, 1, 2)];

#[test]
fn goi_law_is_orthogonally_invariant() {
    let (n, c, draws) = (3, 0.5, 100_000);
    let mut stream = RngStream::for_purpose(11, Purpose::Ensemble, 0);
    let v = random_orthogonal(n, &mut stream);
    let mut plain: Vec<Welford> = ENTRIES.iter().map(|_| Welford::default()).collect();
    let mut turned: Vec<Welford> = ENTRIES.iter().map(|_| Welford::default()).collect();
    for _ in 0..draws {
        let m = sample_goi(n, c, &mut stream).unwrap();
        let w = &v * &m * v.transpose();
        for (e, &(i, j, k, l)) in ENTRIES.iter().enumerate() {
            plain[e].push(m[(i, j)] * m[(k, l)]);
            turned[e].push(w[(i, j)] * w[(k, l)]);
        }
    }
    for (e, entry) in ENTRIES.iter().enumerate() {
        let diff = plain[e].mean() - turned[e].mean();
        let se = plain[e].std_error().hypot(turned[e].std_error());
        assert!(diff.abs() < 5.0 * se, "{entry:?}: {} vs {}", plain[e].mean(), turned[e].mean());
    }
}

#[test]
fn spec_json_selects_the_ensemble() {
    let spec: EnsembleSpec = serde_json::from_str(r#"{"tag":"GOI","n":4,"c":-0.2}"#).unwrap();
    assert_eq!(spec.tag, Tag::Goi);
    let mut stream = RngStream::for_purpose(0, Purpose::Ensemble, 0);
    let m = spec.sample(&mut stream).unwrap();
    assert_eq!(m.shape(), (4, 4));
    assert_eq!(m, m.transpose());
    let bad: EnsembleSpec = serde_json::from_str(r#"{"tag":"GOI","n":4,"c":-0.25}"#).unwrap();
    assert!(bad.sample(&mut stream).is_err());
}

proptest! {
    #[test]
    fn eigenvalues_sum_to_trace(entries in proptest::collection::vec(-10.0f64..10.0, 36)) {
        let a = DMatrix::from_vec(6, 6, entries);
        let s = (&a + a.transpose()) * 0.5;
        let e = eig_sym(&s).unwrap();
        let sum: f64 = e.values.iter().sum();
        prop_assert!((sum - s.trace()).abs() < 1e-10 * (1.0 + s.norm()));
    }
}
