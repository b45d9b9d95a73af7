mod common;

use common::{exhaustive_retained, grid_with_failures, toy_model, worst_gap};
use iscr_core::fault_sim::{replan, resilience_curve, PanelGrid};
use iscr_core::llm_planner::make_plan;

#[test]
fn greedy_matches_exhaustive_on_grids_up_to_16_panels() {
    for blocks in [4, 8, 12, 96] {
        let worst = worst_gap(blocks).unwrap();
        println!("blocks {blocks}: worst greedy/optimal = {worst}");
        assert!(worst >= 0.9);
        // Measured: no gap at all on these grids.
        assert_eq!(worst, 1.0);
    }
}

#[test]
fn one_failure_in_one_quad_of_4x4() {
    let model = toy_model(96);
    let plan = make_plan(&model, 16, 4).unwrap();
    for cell in 0..16 {
        let g = grid_with_failures(4, 4, 1 << cell);
        let greedy = replan(&model, &plan, &g).retained_rate_fraction;
        assert_eq!(greedy, exhaustive_retained(&model, &plan, &g));
    }
}

/// Exact mean retention over all `C(16, k)` failure sets of size `k`.
fn exact_mean(k: u32) -> (f64, f64) {
    let model = toy_model(8);
    let plan = make_plan(&model, 16, 4).unwrap();
    let (mut sum, mut sq, mut count) = (0.0, 0.0, 0.0);
    for failed in 0u32..(1 << 16) {
        if failed.count_ones() == k {
            let r = exhaustive_retained(&model, &plan, &grid_with_failures(4, 4, failed));
            sum += r;
            sq += r * r;
            count += 1.0;
        }
    }
    let mean = sum / count;
    (mean, (sq / count - mean * mean).max(0.0).sqrt())
}

#[test]
fn small_grid_sweep_matches_exhaustive_means() {
    let model = toy_model(8);
    let plan = make_plan(&model, 16, 4).unwrap();
    let replicas = 4000;
    let curve = resilience_curve(&model, &plan, &PanelGrid::new(4, 4), 11, replicas, 17).unwrap();
    for p in &curve.points {
        let (mean, sd) = exact_mean(p.failed_count as u32);
        let tol = 4.0 * sd / (replicas as f64).sqrt() + 1e-12;
        assert!(
            (p.mean_retained - mean).abs() <= tol,
            "k={} sampled {} exact {mean} tol {tol}",
            p.failed_count,
            p.mean_retained
        );
    }
}
