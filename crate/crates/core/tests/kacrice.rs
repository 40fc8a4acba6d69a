use lirf::kacrice::{count_all, shell_volume, Budget, Counts, CountRequest, Domain, FieldSpec, InnerMode, Method, ValueSet};
use lirf::structure_fn::Descriptor;
use proptest::prelude::*;

fn request(field: &str, n: usize, domain: Domain, e: ValueSet, method: Method) -> CountRequest {
    CountRequest {
        field: FieldSpec::Name(field.into()),
        n,
        domain,
        e,
        index: None,
        method,
        budget: Budget::default(),
    }
}

fn shell(r1: f64, r2: f64) -> Domain {
    Domain::Shell { r1, r2 }
}

/// Combined uncertainty including the inner quadrature bound.
fn spread(c: &Counts) -> f64 {
    c.total.sigma() + c.diagnostics.inner_error_bound
}

fn close(a: f64, b: f64, sigma: f64, rel: f64) -> bool {
    (a - b).abs() <= (3.0 * sigma).max(rel * a.abs().max(b.abs()))
}

#[test]
fn index_counts_partition_the_total() {
    for field in ["exp1", "exp-mix"] {
        for method in [Method::ShellGoi, Method::ShellGoe] {
            for e in [ValueSet::real(), ValueSet::at_least(0.0)] {
                let c = count_all(&request(field, 2, shell(0.5, 1.5), e.clone(), method)).unwrap();
                let sum: f64 = c.by_index.iter().map(|x| x.value).sum();
                let var: f64 = c.by_index.iter().map(|x| x.sigma().powi(2)).sum::<f64>() + spread(&c).powi(2);
                assert!(c.by_index.iter().all(|x| x.value >= 0.0));
                assert!(
                    close(sum, c.total.value, var.sqrt(), 1e-6),
                    "{field} {method:?} {e:?}: {sum} vs {}",
                    c.total.value
                );
            }
        }
    }
}

#[test]
fn shells_are_additive() {
    let e = ValueSet::at_least(-0.5);
    let part = |a, b| count_all(&request("exp-mix", 2, shell(a, b), e.clone(), Method::ShellGoi)).unwrap();
    let (inner, outer, whole) = (part(0.5, 1.0), part(1.0, 1.5), part(0.5, 1.5));
    let sigma = (spread(&inner).powi(2) + spread(&outer).powi(2) + spread(&whole).powi(2)).sqrt();
    let sum = inner.total.value + outer.total.value;
    assert!(close(sum, whole.total.value, sigma, 1e-6), "{sum} vs {}", whole.total.value);
}

#[test]
fn four_methods_agree_in_the_plane() {
    let (r1, r2) = (0.5, 1.5);
    let vol = Domain::Volume { volume: shell_volume(2, r1, r2) };
    let runs: Vec<Counts> = [
        (Method::ShellGoi, shell(r1, r2)),
        (Method::ShellGoe, shell(r1, r2)),
        (Method::Er, vol),
        (Method::ClosedFormN2, vol),
    ]
    .into_iter()
    .map(|(m, d)| count_all(&request("exp1", 2, d, ValueSet::real(), m)).unwrap())
    .collect();
    for a in &runs {
        for b in &runs {
            for k in 0..3 {
                let s = a.by_index[k].sigma().hypot(b.by_index[k].sigma());
                assert!(close(a.by_index[k].value, b.by_index[k].value, s, 0.01));
            }
        }
    }
}

#[test]
fn larger_value_sets_count_more() {
    let mut last = f64::INFINITY;
    for u0 in [-1.5, -0.5, 0.0, 0.5, 1.5] {
        let c = count_all(&request("exp1", 2, shell(0.5, 1.5), ValueSet::at_least(u0), Method::ShellGoi)).unwrap();
        assert!(c.total.value <= last + 3.0 * spread(&c), "u0 = {u0}");
        last = c.total.value;
    }
    let empty = count_all(&request("exp1", 2, shell(0.5, 1.5), ValueSet::empty(), Method::ShellGoi)).unwrap();
    assert_eq!(empty.total.value, 0.0);
}

#[test]
fn rescaling_the_structure_function_changes_nothing() {
    let base: Descriptor = serde_json::from_str(r#"{"kind":"bernstein","name":"s","atoms":[[1.0,1.0]]}"#).unwrap();
    let scaled: Descriptor = serde_json::from_str(r#"{"kind":"bernstein","name":"s","atoms":[[1.0,7.5]]}"#).unwrap();
    for (method, domain) in [(Method::Er, Domain::Volume { volume: 2.0 }), (Method::ShellGoi, shell(0.5, 1.5))] {
        let run = |d: &Descriptor| {
            let mut req = request("", 2, domain, ValueSet::real(), method);
            req.field = FieldSpec::Descriptor(d.clone());
            count_all(&req).unwrap().total
        };
        let (a, b) = (run(&base), run(&scaled));
        assert!((a.value - b.value).abs() <= 1e-6 * a.value, "{method:?}: {} vs {}", a.value, b.value);
    }
}

#[test]
fn monte_carlo_results_do_not_depend_on_worker_count() {
    let mut req = request("exp1", 3, Domain::Volume { volume: 1.0 }, ValueSet::real(), Method::Er);
    req.budget = Budget { inner: InnerMode::MonteCarlo, mc_samples: 4000, mc_max_samples: 4000, seed: 42, ..Budget::default() };
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| serde_json::to_string(&count_all(&req).unwrap()).unwrap())
    };
    let one = run(1);
    assert_eq!(one, run(3));
    assert_eq!(one, run(1));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn er_counts_are_nonnegative_and_linear_in_volume(field in 0usize..3, n in 1usize..3, vol in 0.1f64..10.0) {
        let name = ["exp1", "exp-mix", "power"][field];
        let run = |v: f64| count_all(&request(name, n, Domain::Volume { volume: v }, ValueSet::real(), Method::Er)).unwrap();
        let (a, b) = (run(vol), run(2.0 * vol));
        prop_assert!(a.by_index.iter().all(|x| x.value >= 0.0));
        prop_assert!((b.total.value - 2.0 * a.total.value).abs() <= 1e-12 * b.total.value);
    }
}
