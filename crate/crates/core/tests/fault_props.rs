use iscr_core::fault_sim::{
    inject_failures, replan, resilience_curve, CellState, FailureProcess, PanelGrid,
};
use iscr_core::llm_planner::{make_plan, LlmModelSpec};
use proptest::prelude::*;
use std::collections::HashSet;

fn heavy_setup() -> (LlmModelSpec, iscr_core::llm_planner::ParallelPlan, PanelGrid) {
    let model = LlmModelSpec::heavy();
    let plan = make_plan(&model, 512, 4).unwrap();
    let grid = PanelGrid::for_plan(&plan, 12, 0).unwrap();
    (model, plan, grid)
}

fn light_setup() -> (LlmModelSpec, iscr_core::llm_planner::ParallelPlan, PanelGrid) {
    let model = LlmModelSpec::light();
    let plan = make_plan(&model, 384, 4).unwrap();
    let grid = PanelGrid::for_plan(&plan, 12, 0).unwrap();
    (model, plan, grid)
}

fn fail(grid: &PanelGrid, cells: &[usize]) -> PanelGrid {
    let mut g = grid.clone();
    for &i in cells {
        g.set_state(i % g.len(), CellState::Failed);
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn adding_a_failure_never_raises_retention(
        cells in prop::collection::vec(0usize..10_000, 0..200),
        extra in 0usize..10_000,
        heavy in any::<bool>(),
    ) {
        let (model, plan, grid) = if heavy { heavy_setup() } else { light_setup() };
        let before = fail(&grid, &cells);
        let mut after = before.clone();
        after.set_state(extra % grid.len(), CellState::Failed);
        let r0 = replan(&model, &plan, &before).retained_rate_fraction;
        let r1 = replan(&model, &plan, &after).retained_rate_fraction;
        prop_assert!(r1 <= r0, "{r1} > {r0}");
        prop_assert!((0.0..=1.0).contains(&r1));
    }

    #[test]
    fn replan_never_uses_failed_panels(
        cells in prop::collection::vec(0usize..10_000, 0..400),
        heavy in any::<bool>(),
    ) {
        let (model, plan, grid) = if heavy { heavy_setup() } else { light_setup() };
        let g = fail(&grid, &cells);
        let out = replan(&model, &plan, &g);
        let mut seen = HashSet::new();
        let mut blocks = 0;
        for s in &out.stages {
            blocks += s.blocks;
            for &p in &s.panels {
                prop_assert!(g.state(p).is_healthy());
                prop_assert!(seen.insert(p), "panel {p} assigned twice");
            }
        }
        if out.retained_rate_fraction > 0.0 {
            prop_assert_eq!(blocks, model.num_blocks);
        }
    }

    #[test]
    fn injection_is_deterministic(seed in any::<u64>(), years in 0.0f64..10.0) {
        let grid = PanelGrid::new(8, 12);
        let process = FailureProcess { annual_failure_probability: 0.1, horizon_years: 10, seed };
        let a = inject_failures(&grid, &process, years).unwrap();
        let b = inject_failures(&grid, &process, years).unwrap();
        prop_assert_eq!(a, b);
    }
}

#[test]
fn curve_is_bit_identical_for_a_seed() {
    let (model, plan, grid) = heavy_setup();
    let a = resilience_curve(&model, &plan, &grid, 42, 8, 6).unwrap();
    let b = resilience_curve(&model, &plan, &grid, 42, 8, 6).unwrap();
    assert_eq!(a, b);
    let process = |seed| FailureProcess { annual_failure_probability: 0.05, horizon_years: 1, seed };
    let x = inject_failures(&grid, &process(42), 1.0).unwrap();
    assert_eq!(x, inject_failures(&grid, &process(42), 1.0).unwrap());
    assert_ne!(x, inject_failures(&grid, &process(43), 1.0).unwrap());
}

#[test]
fn curve_mean_is_non_increasing() {
    let (model, plan, grid) = light_setup();
    let curve = resilience_curve(&model, &plan, &grid, 5, 16, 21).unwrap();
    assert_eq!(curve.points[0].mean_retained, 1.0);
    assert_eq!(curve.points.last().unwrap().mean_retained, 0.0);
    for w in curve.points.windows(2) {
        assert!(w[1].mean_retained <= w[0].mean_retained);
    }
}

#[test]
fn trivial_failure_rates() {
    let grid = PanelGrid::new(4, 12);
    let none = FailureProcess { annual_failure_probability: 0.0, horizon_years: 5, seed: 1 };
    assert_eq!(inject_failures(&grid, &none, 5.0).unwrap(), grid);
    let all = FailureProcess { annual_failure_probability: 1.0, horizon_years: 1, seed: 1 };
    assert_eq!(inject_failures(&grid, &all, 1.0).unwrap().count(CellState::Failed), grid.len());
}

/// Failure counts over 1000 seeds against Binomial(512, 0.02).
#[test]
fn failure_counts_follow_the_binomial() {
    let grid = PanelGrid::new(512 / 16, 16);
    let (n, p): (f64, f64) = (512.0, 0.02);
    let (mean, sd) = (n * p, (n * p * (1.0 - p)).sqrt());
    let counts: Vec<f64> = (0..1000u64)
        .map(|seed| {
            let process = FailureProcess { annual_failure_probability: p, horizon_years: 1, seed };
            inject_failures(&grid, &process, 1.0).unwrap().count(CellState::Failed) as f64
        })
        .collect();
    let inside = counts.iter().filter(|&&c| (c - mean).abs() <= 3.0 * sd).count();
    assert!(inside >= 990, "{inside} of 1000 within 3 sigma");
    let sample_mean = counts.iter().sum::<f64>() / counts.len() as f64;
    assert!((sample_mean - mean).abs() <= 3.0 * sd / (counts.len() as f64).sqrt(), "mean {sample_mean}");
    let var = counts.iter().map(|c| (c - sample_mean).powi(2)).sum::<f64>() / (counts.len() - 1) as f64;
    assert!((var / (sd * sd) - 1.0).abs() < 0.15, "variance {var}");
}
