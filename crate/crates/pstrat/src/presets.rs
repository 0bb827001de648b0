//! Built-in experiment plans. Each preset reproduces one study from the
//! methods literature this library follows, at a scale a desk machine clears
//! in minutes at the default 2000 replications.

use crate::config::{
    DesignConfig, ExperimentConfig, ExperimentPlan, FunctionSpec, MarginalSpec, MarginalsSpec,
    SobolConfig, SobolTargetConfig,
};
use pstrat_core::design_spec::Method;

/// Every preset name, in listing order.
pub const NAMES: [&str; 12] = [
    "fig3a",
    "fig3b",
    "fig4",
    "fig5",
    "poly_case1",
    "poly_case2",
    "poly_case3",
    "poly_case4",
    "table2_rosenbrock",
    "table2_schwefel_n01",
    "table2_schwefel_n11",
    "table4_plate",
];

const PRESET_SEED: u64 = 2026;
const C_SWEEP: [f64; 12] =
    [0.0625, 0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0];
const SQRT_3: f64 = 1.732_050_807_568_877_2;

pub fn describe(name: &str) -> Option<&'static str> {
    let text = match name {
        "fig3a" => "additive function, uniform(0,1) inputs: srs vs ss vs lhs at n=1024 across dimensions 2, 5, 10, 20",
        "fig3b" => "product function, zero-mean uniform inputs: srs vs ss vs lhs at n=1024 across dimensions 2, 5, 10, 20",
        "fig4" => "pair interaction index of the 2-D quadratic across coupling strengths, normal and uniform inputs",
        "fig5" => "ss vs lhs estimator variance across coupling strengths for the 2-D quadratic at n=16",
        "poly_case1" => "100-D degree-2 polynomial, squares and linear terms on: interaction-pair sweep under six designs at n=625",
        "poly_case2" => "100-D degree-2 polynomial, squares on, linear off: interaction-pair sweep under six designs at n=625",
        "poly_case3" => "100-D degree-2 polynomial, squares off, linear on: interaction-pair sweep under six designs at n=625",
        "poly_case4" => "100-D degree-2 polynomial, interaction pairs only: sweep under six designs at n=625",
        "table2_rosenbrock" => "100-D Rosenbrock, uniform(0,1) inputs, six designs at n=625",
        "table2_schwefel_n01" => "100-D Schwefel double-sum, normal(0,1) inputs, six designs at n=625",
        "table2_schwefel_n11" => "100-D Schwefel double-sum, normal(1,1) inputs, six designs at n=625",
        "table4_plate" => "plate buckling strength factor, canonical inputs, eight designs at n=625",
        _ => return None,
    };
    Some(text)
}

pub fn find(name: &str) -> Option<ExperimentPlan> {
    let plan = match name {
        "fig3a" => dimension_sweep("fig3a", FunctionKind::Additive, uniform01()),
        "fig3b" => dimension_sweep("fig3b", FunctionKind::Product, uniform_sym()),
        "fig4" => fig4(),
        "fig5" => fig5(),
        "poly_case1" => poly_case(1),
        "poly_case2" => poly_case(2),
        "poly_case3" => poly_case(3),
        "poly_case4" => poly_case(4),
        "table2_rosenbrock" => table2(
            "table2_rosenbrock",
            FunctionSpec::Rosenbrock { dim: 100 },
            uniform01(),
            "rosenbrock",
        ),
        "table2_schwefel_n01" => table2(
            "table2_schwefel_n01",
            FunctionSpec::Schwefel12 { dim: 100 },
            normal(0.0),
            "schwefel",
        ),
        "table2_schwefel_n11" => table2(
            "table2_schwefel_n11",
            FunctionSpec::Schwefel12 { dim: 100 },
            normal(1.0),
            "schwefel",
        ),
        "table4_plate" => table4_plate(),
        _ => return None,
    };
    Some(plan)
}

fn plan(name: &str, experiments: Vec<ExperimentConfig>) -> ExperimentPlan {
    ExperimentPlan { name: name.into(), seed: PRESET_SEED, estimates: false, experiments }
}

fn experiment(
    name: String,
    function: FunctionSpec,
    marginals: MarginalsSpec,
    design: DesignConfig,
    n: usize,
) -> ExperimentConfig {
    ExperimentConfig {
        name: Some(name),
        function,
        marginals: Some(marginals),
        design: Some(design),
        n: Some(n),
        replications: None,
        seed: None,
        estimator: None,
        sobol: None,
    }
}

fn uniform01() -> MarginalsSpec {
    MarginalsSpec::Iid(MarginalSpec::Uniform { lower: 0.0, upper: 1.0 })
}

fn uniform_sym() -> MarginalsSpec {
    MarginalsSpec::Iid(MarginalSpec::Uniform { lower: -SQRT_3, upper: SQRT_3 })
}

fn normal(mean: f64) -> MarginalsSpec {
    MarginalsSpec::Iid(MarginalSpec::Normal { mean, std_dev: 1.0 })
}

enum FunctionKind {
    Additive,
    Product,
}

/// srs / ss / lhs at n=1024 across growing dimension, with strata grids whose
/// product is 1024 in every dimension count.
fn dimension_sweep(name: &str, kind: FunctionKind, marginals: MarginalsSpec) -> ExperimentPlan {
    let n = 1024;
    let layouts: [(usize, Vec<usize>); 4] = [
        (2, vec![32, 32]),
        (5, vec![4, 4, 4, 4, 4]),
        (10, vec![2; 10]),
        (20, [vec![2; 10], vec![1; 10]].concat()),
    ];
    let mut experiments = Vec::new();
    for (dim, counts) in layouts {
        let function = match kind {
            FunctionKind::Additive => FunctionSpec::Additive { dim },
            FunctionKind::Product => FunctionSpec::Product { dim },
        };
        for (label, design) in [
            ("srs", DesignConfig::method(Method::Srs)),
            ("ss", DesignConfig::counts(Method::Ss, counts.clone())),
            ("lhs", DesignConfig::method(Method::Lhs)),
        ] {
            experiments.push(experiment(
                format!("dim{dim} {label}"),
                function.clone(),
                marginals.clone(),
                design,
                n,
            ));
        }
    }
    plan(name, experiments)
}

fn input_sweep() -> [(&'static str, MarginalsSpec); 2] {
    [("normal", normal(0.0)), ("uniform", uniform_sym())]
}

/// Pair interaction index of the 2-D quadratic as the coupling coefficient
/// sweeps three decades, for normal and zero-mean uniform inputs.
fn fig4() -> ExperimentPlan {
    let mut experiments = Vec::new();
    for (tag, marginals) in input_sweep() {
        for c in C_SWEEP {
            experiments.push(ExperimentConfig {
                name: Some(format!("c={c} {tag}")),
                function: FunctionSpec::QuadraticInteraction { c },
                marginals: Some(marginals.clone()),
                design: None,
                n: None,
                replications: None,
                seed: None,
                estimator: None,
                sobol: Some(SobolConfig {
                    target: SobolTargetConfig::Pair { i: 0, j: 1 },
                    budget: 100_000,
                }),
            });
        }
    }
    plan("fig4", experiments)
}

/// Estimator variance of ss and lhs on the 2-D quadratic across the same
/// coupling sweep; pairs with fig4 to plot variance against interaction
/// strength.
fn fig5() -> ExperimentPlan {
    let n = 16;
    let mut experiments = Vec::new();
    for (tag, marginals) in input_sweep() {
        for c in C_SWEEP {
            for (label, design) in [
                ("ss", DesignConfig::counts(Method::Ss, vec![4, 4])),
                ("lhs", DesignConfig::method(Method::Lhs)),
            ] {
                experiments.push(experiment(
                    format!("c={c} {tag} {label}"),
                    FunctionSpec::QuadraticInteraction { c },
                    marginals.clone(),
                    design,
                    n,
                ));
            }
        }
    }
    plan("fig5", experiments)
}

/// Interaction-pair sweep of the 100-D degree-2 polynomial: k interacting
/// pairs on the first 2k variables, fixed square/linear terms per case, under
/// six designs including pair-matched subspace layouts.
fn poly_case(case: u32) -> ExperimentPlan {
    let (squares, linear) = match case {
        1 => (100, 100),
        2 => (100, 0),
        3 => (0, 100),
        _ => (0, 0),
    };
    let n = 625;
    let mut experiments = Vec::new();
    for k in [0usize, 1, 2, 5, 10, 25, 50] {
        let function = FunctionSpec::Polynomial2 {
            dim: 100,
            alpha: None,
            beta: None,
            gamma: None,
            squares: Some(squares),
            pairs: Some(k),
            linear: Some(linear),
        };
        for (tag, marginals) in [("n01", normal(0.0)), ("n11", normal(1.0))] {
            let mut push = |label: String, design: DesignConfig| {
                experiments.push(experiment(
                    format!("k{k} {tag} {label}"),
                    function.clone(),
                    marginals.clone(),
                    design,
                    n,
                ));
            };
            push("srs".into(), DesignConfig::method(Method::Srs));
            push("lhs".into(), DesignConfig::method(Method::Lhs));
            push("pss 2^50".into(), DesignConfig::notation(Method::Pss, "2^50"));
            push("lpss 2^50".into(), DesignConfig::notation(Method::Lpss, "2^50"));
            // a layout that stratifies exactly the interacting pairs
            let matched = match k {
                0 => "1^100".to_string(),
                50 => continue, // identical to the fixed 2^50 rows above
                k => format!("2^{k} 1^{}", 100 - 2 * k),
            };
            push(format!("pss {matched}"), DesignConfig::notation(Method::Pss, &matched));
            push(format!("lpss {matched}"), DesignConfig::notation(Method::Lpss, &matched));
        }
    }
    plan(&format!("poly_case{case}"), experiments)
}

/// Six designs over one 100-D function at n=625.
fn table2(
    name: &str,
    function: FunctionSpec,
    marginals: MarginalsSpec,
    label: &str,
) -> ExperimentPlan {
    let n = 625;
    let designs = [
        ("srs".to_string(), DesignConfig::method(Method::Srs)),
        ("lhs".to_string(), DesignConfig::method(Method::Lhs)),
        ("pss 2^50".to_string(), DesignConfig::notation(Method::Pss, "2^50")),
        ("lpss 2^50".to_string(), DesignConfig::notation(Method::Lpss, "2^50")),
        ("pss 4^25".to_string(), DesignConfig::notation(Method::Pss, "4^25")),
        ("lpss 4^25".to_string(), DesignConfig::notation(Method::Lpss, "4^25")),
    ];
    let experiments = designs
        .into_iter()
        .map(|(d, design)| {
            experiment(format!("{label} {d}"), function.clone(), marginals.clone(), design, n)
        })
        .collect();
    plan(name, experiments)
}

/// Eight designs over the 6-D plate buckling factor at n=625. The subspace
/// layouts pair (b, t), (sigma0, E), (delta0, eta); marginals are the
/// function's canonical input set.
fn table4_plate() -> ExperimentPlan {
    let n = 625;
    let mut experiments = Vec::new();
    let mut push = |label: String, design: DesignConfig| {
        experiments.push(ExperimentConfig {
            name: Some(format!("plate {label}")),
            function: FunctionSpec::PlateBuckling,
            marginals: None,
            design: Some(design),
            n: Some(n),
            replications: None,
            seed: None,
            estimator: None,
            sobol: None,
        });
    };
    push("srs".into(), DesignConfig::method(Method::Srs));
    push("lhs".into(), DesignConfig::method(Method::Lhs));
    for notation in ["2^3", "2^2 1^2", "4 1^2"] {
        push(format!("pss {notation}"), DesignConfig::notation(Method::Pss, notation));
    }
    for notation in ["2^3", "2^2 1^2", "4 1^2"] {
        push(format!("lpss {notation}"), DesignConfig::notation(Method::Lpss, notation));
    }
    plan("table4_plate", experiments)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{Overrides, Task};

    #[test]
    fn every_preset_resolves() {
        for name in NAMES {
            let plan = find(name).unwrap_or_else(|| panic!("missing preset {name}"));
            assert_eq!(plan.name, name);
            assert!(describe(name).is_some(), "{name} has no description");
            let resolved = plan
                .resolve(&Overrides::default())
                .unwrap_or_else(|e| panic!("{name} does not resolve: {e}"));
            assert!(!resolved.is_empty(), "{name} is empty");
        }
        assert!(find("nope").is_none());
        assert!(describe("nope").is_none());
    }

    #[test]
    fn plans_round_trip_through_json() {
        for name in NAMES {
            let plan = find(name).unwrap();
            let json = serde_json::to_string(&plan).unwrap();
            let back = ExperimentPlan::parse(&json).unwrap();
            assert_eq!(plan, back, "{name} changed across serialize/parse");
        }
    }

    #[test]
    fn preset_shapes() {
        let fig3a = find("fig3a").unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(fig3a.len(), 12);
        let dims: Vec<usize> = fig3a.iter().map(|e| e.function.dim()).collect();
        assert_eq!(&dims[..3], &[2, 2, 2]);
        assert_eq!(&dims[9..], &[20, 20, 20]);

        let fig4 = find("fig4").unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(fig4.len(), 24);
        assert!(fig4.iter().all(|e| matches!(e.task, Task::Sobol { budget: 100_000, .. })));

        let fig5 = find("fig5").unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(fig5.len(), 48);

        // 7 pair counts x 2 input sets x 6 designs, minus the k=50 rows that
        // collapse onto the fixed 2^50 layout
        let poly = find("poly_case1").unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(poly.len(), 7 * 2 * 6 - 2 * 2);

        for name in ["table2_rosenbrock", "table2_schwefel_n01", "table2_schwefel_n11"] {
            let t2 = find(name).unwrap().resolve(&Overrides::default()).unwrap();
            assert_eq!(t2.len(), 6, "{name}");
        }

        let plate = find("table4_plate").unwrap().resolve(&Overrides::default()).unwrap();
        assert_eq!(plate.len(), 8);
        // canonical plate inputs fill in when marginals are omitted
        assert_eq!(plate[0].marginals, pstrat_core::testbed::plate_buckling_marginals());
    }

    #[test]
    fn overrides_replace_seed_and_replications() {
        let plan = find("fig5").unwrap();
        let resolved = plan
            .resolve(&Overrides { seed: Some(9), replications: Some(25) })
            .unwrap();
        for exp in &resolved {
            assert_eq!(exp.seed, 9);
            match &exp.task {
                Task::Replicate { spec, replications } => {
                    assert_eq!(*replications, 25);
                    assert_eq!(spec.seed, 9);
                }
                Task::Sobol { .. } => panic!("fig5 has no sobol tasks"),
            }
        }
    }
}
