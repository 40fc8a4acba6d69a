use lirf::kacrice::ValueSet;
use lirf::oracle::{count_critical, mc_crt, shell_lattice, FieldSampler, Lattice, SimOptions, DEFAULT_H_PER_CORRELATION};
use lirf::rng::{Purpose, RngStream};
use lirf::stats::Welford;
use lirf::structure_fn::{catalog, lookup, StructureFunction};

fn corr(f: &StructureFunction) -> f64 {
    let (d1, d2) = f.origin().unwrap();
    (d1 / -d2).sqrt()
}

#[test]
fn kernel_factorizes_for_every_catalog_field() {
    for f in catalog() {
        // members of the one-dimensional class are only valid on the line
        let n = if ["ex2(0.125)", "f2", "f2-spectral"].contains(&f.name.as_str()) { 1 } else { 2 };
        let h = corr(&f) * DEFAULT_H_PER_CORRELATION;
        let lat = shell_lattice(n, 1.5 * corr(&f), h, 0.0).unwrap();
        let s = FieldSampler::new(&f, lat);
        assert!(s.is_ok(), "{}: {:?}", f.name, s.err());
    }
}

#[test]
fn increments_have_the_structure_function_as_variance() {
    let f = lookup("exp-mix").unwrap();
    let lat = Lattice::new(2, 1.2, corr(&f) / 8.0, 0.3).unwrap();
    let sampler = FieldSampler::new(&f, lat).unwrap();
    let mut pick = RngStream::for_purpose(3, Purpose::Verify, 0);
    let pairs: Vec<(usize, usize)> = (0..5)
        .map(|_| {
            let m = lat.len() as f64;
            ((pick.uniform() * m) as usize, (pick.uniform() * m) as usize)
        })
        .collect();
    let mut acc = vec![Welford::default(); pairs.len()];
    for rep in 0..2000 {
        let s = sampler.sample(&mut RngStream::for_purpose(3, Purpose::Field, rep));
        for (w, &(a, b)) in acc.iter_mut().zip(&pairs) {
            w.push((s.values[a] - s.values[b]).powi(2));
        }
    }
    for (w, &(a, b)) in acc.iter().zip(&pairs) {
        let (p, q) = (lat.physical(a), lat.physical(b));
        let want = f.eval((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2), 0).unwrap();
        assert!((w.mean() - want).abs() <= 5.0 * w.std_error(), "{p:?} {q:?}: {} vs {want}", w.mean());
    }
}

#[test]
fn counts_are_stable_under_grid_refinement() {
    let f = lookup("exp1").unwrap();
    let (r1, r2) = (0.3, 1.0);
    let fine = FieldSampler::new(&f, shell_lattice(2, r2, corr(&f) / 24.0, 0.0).unwrap()).unwrap();
    assert_eq!(fine.lattice.per_axis % 2, 1);
    let (mut n_fine, mut n_coarse) = (0usize, 0usize);
    for rep in 0..60 {
        let s = fine.sample(&mut RngStream::for_purpose(5, Purpose::Field, rep));
        n_fine += count_critical(&s, r1, r2).len();
        n_coarse += count_critical(&s.coarsen().unwrap(), r1, r2).len();
    }
    let rel = (n_fine as f64 - n_coarse as f64).abs() / n_fine as f64;
    assert!(n_fine > 50 && rel <= 0.02, "fine {n_fine}, coarse {n_coarse}");
}

#[test]
fn value_set_split_partitions_each_realization() {
    let f = lookup("exp1").unwrap();
    let opts = SimOptions { h: corr(&f) * DEFAULT_H_PER_CORRELATION, seed: 9, angle: 0.0 };
    let run = |e: ValueSet| mc_crt(&f, 2, 0.5, 1.5, &e, 40, &opts).unwrap();
    let all = run(ValueSet::real());
    let low = run(ValueSet::new(vec![(f64::NEG_INFINITY, 0.0)]).unwrap());
    let high = run(ValueSet::at_least(0.0));
    for ((a, l), h) in all.per_rep.iter().zip(&low.per_rep).zip(&high.per_rep) {
        let sum: Vec<usize> = l.iter().zip(h).map(|(x, y)| x + y).collect();
        assert_eq!(a, &sum);
    }
    assert_eq!(run(ValueSet::empty()).total_mean, 0.0);
}

#[test]
fn index_counts_do_not_depend_on_the_grid_frame() {
    let f = lookup("exp1").unwrap();
    let h = corr(&f) * DEFAULT_H_PER_CORRELATION;
    let a = mc_crt(&f, 2, 0.5, 1.5, &ValueSet::real(), 300, &SimOptions { h, seed: 1, angle: 0.0 }).unwrap();
    let b = mc_crt(&f, 2, 0.5, 1.5, &ValueSet::real(), 300, &SimOptions { h, seed: 2, angle: 0.4 }).unwrap();
    for k in 0..3 {
        let s = a.se_by_index[k].hypot(b.se_by_index[k]);
        let d = (a.mean_by_index[k] - b.mean_by_index[k]).abs();
        assert!(d <= 3.0 * s, "index {k}: {} vs {}", a.mean_by_index[k], b.mean_by_index[k]);
    }
}
