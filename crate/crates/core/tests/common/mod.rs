//! Independent reference computations shared by the integration suites.
#![allow(dead_code)]

use iscr_core::fault_sim::{replan, PanelGrid};
use iscr_core::llm_planner::{make_plan, LlmModelSpec, ParallelPlan};

pub const SIGMA: f64 = 5.670374419e-8;

/// Radiative equilibrium temperature in kelvin, straight from the T⁴ law.
pub fn sb_temperature_k(load_w_m2: f64, emissivity: f64, sides: f64) -> f64 {
    (load_w_m2 / (emissivity * sides * SIGMA)).powf(0.25)
}

pub fn kelvin(t_c: f64) -> f64 {
    t_c + 273.15
}

/// Model with `blocks` blocks and unit block time, for small-grid sweeps.
pub fn toy_model(blocks: u64) -> LlmModelSpec {
    LlmModelSpec {
        name: format!("toy{blocks}"),
        context_length: 1,
        num_blocks: blocks,
        weights_total_bytes: 0.0,
        activation_bytes_per_token: 0.0,
        kv_per_block_per_session_bytes: 0.0,
        base_block_time_s: 1.0,
    }
}

/// Every 2×2 block position on the grid, as bit masks over cell indices.
fn block_masks(rows: usize, cols: usize) -> Vec<u32> {
    let mut out = Vec::new();
    for r in 0..rows.saturating_sub(1) {
        for c in 0..cols.saturating_sub(1) {
            let bit = |rr: usize, cc: usize| 1u32 << (rr * cols + cc);
            out.push(bit(r, c) | bit(r, c + 1) | bit(r + 1, c) | bit(r + 1, c + 1));
        }
    }
    out
}

/// Largest set of disjoint healthy 2×2 blocks anywhere on the grid.
fn max_quads(healthy: u32, masks: &[u32]) -> u32 {
    fn go(i: usize, used: u32, healthy: u32, masks: &[u32]) -> u32 {
        if i == masks.len() {
            return 0;
        }
        let skip = go(i + 1, used, healthy, masks);
        let m = masks[i];
        if m & healthy == m && m & used == 0 {
            skip.max(1 + go(i + 1, used | m, healthy, masks))
        } else {
            skip
        }
    }
    go(0, 0, healthy, masks)
}

/// Brute-force best retained fraction for a T=4 plan on a grid of at most
/// 32 cells, searching every placement of 2×2 stages at any offset.
pub fn exhaustive_retained(model: &LlmModelSpec, plan: &ParallelPlan, grid: &PanelGrid) -> f64 {
    assert_eq!(plan.tensor_width, 4);
    assert!(grid.len() <= 32);
    let healthy: u32 = (0..grid.len())
        .filter(|&i| grid.state(i).is_healthy())
        .fold(0, |acc, i| acc | (1 << i));
    let h = healthy.count_ones() as u64;
    let q = max_quads(healthy, &block_masks(grid.rows(), grid.cols())) as u64;
    let singles = h - 4 * q;
    let b = model.num_blocks;
    // More quads never lowers capacity, so the maximum packing is optimal.
    let capacity = |m: u64| q * m.min(b) + singles * (m / 4).min(b);
    let m_orig = plan.blocks_per_stage;
    (m_orig..=4 * b.max(m_orig))
        .find(|&m| capacity(m) >= b)
        .map_or(0.0, |m| m_orig as f64 / m as f64)
}

/// Decodes a failure bit mask onto a fresh grid.
pub fn grid_with_failures(rows: usize, cols: usize, failed: u32) -> PanelGrid {
    let mut g = PanelGrid::new(rows, cols);
    for i in 0..rows * cols {
        if failed & (1 << i) != 0 {
            g.set_state(i, iscr_core::fault_sim::CellState::Failed);
        }
    }
    g
}

/// Every grid shape up to 4×4 that holds at least one 2×2 stage's worth of panels.
pub fn small_shapes() -> Vec<(usize, usize)> {
    (1..=4)
        .flat_map(|r| (1..=4).map(move |c| (r, c)))
        .filter(|&(r, c)| r * c >= 4)
        .collect()
}

/// Smallest ratio of greedy to exhaustive-optimal retention over every
/// failure pattern on every small grid shape. Errors if greedy ever beats
/// the search, which would mean the oracle is wrong.
pub fn worst_gap(blocks: u64) -> Result<f64, String> {
    let model = toy_model(blocks);
    let mut worst = 1.0f64;
    for (rows, cols) in small_shapes() {
        let n = rows * cols;
        let panels = ((n as u64 / 4) * 4).min(blocks * 4);
        let plan = make_plan(&model, panels, 4).unwrap();
        for failed in 0u32..(1 << n) {
            let g = grid_with_failures(rows, cols, failed);
            let greedy = replan(&model, &plan, &g).retained_rate_fraction;
            let best = exhaustive_retained(&model, &plan, &g);
            if greedy > best + 1e-12 {
                return Err(format!("greedy beat the exhaustive search on {rows}x{cols} mask {failed:#b}"));
            }
            if best > 0.0 {
                worst = worst.min(greedy / best);
            }
        }
    }
    Ok(worst)
}
