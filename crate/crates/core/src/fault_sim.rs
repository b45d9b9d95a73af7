//! Seeded panel-failure injection and greedy pipeline re-placement.
//!
//! A plan is laid out on a `rows × cols` grid: tensor-parallel stages occupy
//! axis-aligned 2×2 quads, visited in serpentine order along the array. After
//! failures, a maximum packing of healthy 2×2 blocks (aligned quads preferred)
//! is reused first and the remaining panels become single-panel stages. Blocks are water-filled over the
//! available stages, never running a stage faster than the original plan, and
//! the retained fraction is the ratio of aggregate token throughput.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::llm_planner::{LlmModelSpec, ParallelPlan};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FaultError {
    #[error("failure probability must be in [0, 1], got {0}")]
    InvalidProbability(f64),
    #[error("elapsed time must be non-negative, got {0} years")]
    NegativeElapsed(f64),
    #[error("grid of {rows}x{cols} cannot hold the plan's {needed} panels")]
    GridTooSmall { rows: usize, cols: usize, needed: u64 },
    #[error("invalid sweep: {0}")]
    InvalidSweep(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellState {
    Alive,
    Failed,
    /// Healthy but unassigned. Spares are unpowered and do not age.
    Spare,
}

impl CellState {
    pub fn is_healthy(self) -> bool {
        self != CellState::Failed
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PanelGrid {
    rows: usize,
    cols: usize,
    cells: Vec<CellState>,
}

impl PanelGrid {
    pub fn new(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            cells: vec![CellState::Alive; rows * cols],
        }
    }

    /// Smallest grid `cols` wide holding the plan plus `spare_panels` spares.
    /// Panels the plan occupies are Alive, the next `spare_panels` in
    /// serpentine order Spare, and padding cells with no panel Failed.
    pub fn for_plan(plan: &ParallelPlan, cols: usize, spare_panels: u64) -> Result<Self, FaultError> {
        let needed = plan.panels + spare_panels;
        let mut rows = (needed as usize).div_ceil(cols.max(1));
        if plan.tensor_width == 4 {
            rows += rows % 2;
        }
        let mut grid = Self {
            rows,
            cols,
            cells: vec![CellState::Spare; rows * cols],
        };
        let units = grid.units(plan.tensor_width);
        let full: Vec<_> = units
            .iter()
            .filter(|u| u.width == plan.tensor_width)
            .take(plan.pipeline_stages as usize)
            .collect();
        if (full.len() as u64) < plan.pipeline_stages {
            return Err(FaultError::GridTooSmall {
                rows,
                cols,
                needed: plan.panels,
            });
        }
        let active: Vec<usize> = full.iter().flat_map(|u| u.panels.clone()).collect();
        for idx in active {
            grid.cells[idx] = CellState::Alive;
        }
        let mut spares = spare_panels;
        for idx in grid.serpentine_order() {
            if grid.cells[idx] == CellState::Spare {
                if spares > 0 {
                    spares -= 1;
                } else {
                    grid.cells[idx] = CellState::Failed;
                }
            }
        }
        Ok(grid)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.cols + col
    }

    pub fn state(&self, idx: usize) -> CellState {
        self.cells[idx]
    }

    pub fn set_state(&mut self, idx: usize, state: CellState) {
        self.cells[idx] = state;
    }

    pub fn count(&self, state: CellState) -> usize {
        self.cells.iter().filter(|&&c| c == state).count()
    }

    pub fn cells(&self) -> &[CellState] {
        &self.cells
    }

    /// Panel indices row by row, alternating direction.
    pub fn serpentine_order(&self) -> Vec<usize> {
        let mut order = Vec::with_capacity(self.cells.len());
        for r in 0..self.rows {
            if r % 2 == 0 {
                order.extend((0..self.cols).map(|c| self.index(r, c)));
            } else {
                order.extend((0..self.cols).rev().map(|c| self.index(r, c)));
            }
        }
        order
    }

    /// Stage candidates built from healthy panels: full-width groups first,
    /// then the leftover panels as singles in serpentine order. For width 4
    /// the quads are a maximum packing of healthy 2×2 blocks.
    pub fn units(&self, tensor_width: u64) -> Vec<StageUnit> {
        let mut wide = Vec::new();
        if tensor_width == 4 {
            wide = match self.max_quad_packing() {
                Some(packing) => packing,
                None => {
                    let mut best = Vec::new();
                    for (dr, dc) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
                        let packing = self.quad_packing(dr, dc);
                        if packing.len() > best.len() {
                            best = packing;
                        }
                    }
                    best
                }
            };
        } else if tensor_width > 1 {
            let order = self.serpentine_order();
            for chunk in order.chunks(tensor_width as usize) {
                if chunk.len() < tensor_width as usize {
                    break;
                }
                if chunk.iter().all(|&p| self.cells[p].is_healthy()) {
                    wide.push(StageUnit {
                        panels: chunk.to_vec(),
                        width: tensor_width,
                    });
                }
            }
        }
        let in_wide: std::collections::HashSet<usize> = wide.iter().flat_map(|u| u.panels.iter().copied()).collect();
        let singles = self
            .serpentine_order()
            .into_iter()
            .filter(|&p| self.cells[p].is_healthy() && !in_wide.contains(&p))
            .map(|p| StageUnit {
                panels: vec![p],
                width: 1,
            });
        wide.into_iter().chain(singles).collect()
    }

    /// Maximum set of disjoint healthy 2×2 blocks, preferring blocks on the
    /// aligned lattice among equally large packings. Row-by-row search over
    /// column masks; `None` when the grid is too wide for it.
    fn max_quad_packing(&self) -> Option<Vec<StageUnit>> {
        const MAX_COLS: usize = 20;
        if self.cols > MAX_COLS || self.rows < 2 || self.cols < 2 {
            return (self.cols <= MAX_COLS).then(Vec::new);
        }
        let healthy: Vec<u32> = (0..self.rows)
            .map(|r| {
                (0..self.cols)
                    .filter(|&c| self.cells[self.index(r, c)].is_healthy())
                    .fold(0u32, |m, c| m | (1 << c))
            })
            .collect();
        // Score counts quads first, aligned quads second.
        let weight = (self.len() as u64) + 1;
        // Per row, indexed by the covered mask of the next row:
        // (score, previous mask, block starts), with `u64::MAX` as unreachable.
        const NONE: (u64, u32, u32) = (u64::MAX, 0, 0);
        let width = 1usize << self.cols;
        let mut layers: Vec<Vec<(u64, u32, u32)>> = Vec::with_capacity(self.rows);
        let mut current = vec![NONE; width];
        current[0] = (0, 0, 0);
        let mut reached = vec![0u32];
        for r in 0..self.rows - 1 {
            let mut next = vec![NONE; width];
            let mut next_reached = Vec::new();
            let below = healthy[r + 1] & (healthy[r + 1] >> 1);
            for &covered in &reached {
                let score = current[covered as usize].0;
                let free = healthy[r] & !covered;
                let valid = free & (free >> 1) & below & ((1 << (self.cols - 1)) - 1);
                let mut stack = vec![(valid, 0u32)];
                while let Some((options, starts)) = stack.pop() {
                    if options == 0 {
                        let aligned = if r % 2 == 0 { (starts & 0x5555_5555).count_ones() } else { 0 };
                        let total = score + u64::from(starts.count_ones()) * weight + u64::from(aligned);
                        let cover = (starts | (starts << 1)) as usize;
                        let slot = &mut next[cover];
                        if slot.0 == u64::MAX {
                            next_reached.push(cover as u32);
                            *slot = (total, covered, starts);
                        } else if total > slot.0 {
                            *slot = (total, covered, starts);
                        }
                        continue;
                    }
                    let c = options.trailing_zeros();
                    let rest = options & !(1 << c);
                    stack.push((rest, starts));
                    stack.push((rest & !(1 << (c + 1)), starts | (1 << c)));
                }
            }
            layers.push(std::mem::replace(&mut current, next));
            reached = next_reached;
        }
        let mut state = *reached.iter().max_by_key(|&&m| (current[m as usize].0, std::cmp::Reverse(m)))?;
        let mut blocks = Vec::new();
        for r in (0..self.rows - 1).rev() {
            let (_, prev, starts) = if r == self.rows - 2 {
                current[state as usize]
            } else {
                layers[r + 1][state as usize]
            };
            for c in 0..self.cols - 1 {
                if starts & (1 << c) != 0 {
                    blocks.push((r, c));
                }
            }
            state = prev;
        }
        // Quad rows in serpentine order, as on the aligned lattice.
        blocks.sort_by_key(|&(r, c)| {
            let along = if (r / 2) % 2 == 0 { c } else { self.cols - c };
            (r / 2, along, r)
        });
        Some(
            blocks
                .into_iter()
                .map(|(r, c)| StageUnit {
                    panels: vec![
                        self.index(r, c),
                        self.index(r, c + 1),
                        self.index(r + 1, c),
                        self.index(r + 1, c + 1),
                    ],
                    width: 4,
                })
                .collect(),
        )
    }

    /// Healthy 2×2 blocks: a quad lattice offset by `(dr, dc)` in serpentine
    /// order, then any disjoint block left over, scanning row by row.
    fn quad_packing(&self, dr: usize, dc: usize) -> Vec<StageUnit> {
        let block = |r: usize, c: usize| {
            vec![
                self.index(r, c),
                self.index(r, c + 1),
                self.index(r + 1, c),
                self.index(r + 1, c + 1),
            ]
        };
        let mut used = vec![false; self.cells.len()];
        let mut out = Vec::new();
        let mut take = |panels: Vec<usize>, used: &mut Vec<bool>| {
            if panels.iter().all(|&p| self.cells[p].is_healthy() && !used[p]) {
                for &p in &panels {
                    used[p] = true;
                }
                out.push(StageUnit { panels, width: 4 });
            }
        };
        let qrows = self.rows.saturating_sub(dr) / 2;
        let qcols = self.cols.saturating_sub(dc) / 2;
        for qr in 0..qrows {
            for j in 0..qcols {
                let qc = if qr % 2 == 0 { j } else { qcols - 1 - j };
                take(block(dr + 2 * qr, dc + 2 * qc), &mut used);
            }
        }
        for r in 0..self.rows.saturating_sub(1) {
            for c in 0..self.cols.saturating_sub(1) {
                take(block(r, c), &mut used);
            }
        }
        out
    }
}

/// A group of healthy panels that can host one pipeline stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageUnit {
    pub panels: Vec<usize>,
    pub width: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FailureProcess {
    pub annual_failure_probability: f64,
    pub horizon_years: u32,
    pub seed: u64,
}

impl FailureProcess {
    pub fn validate(&self) -> Result<(), FaultError> {
        if !(0.0..=1.0).contains(&self.annual_failure_probability) {
            return Err(FaultError::InvalidProbability(self.annual_failure_probability));
        }
        Ok(())
    }

    /// Independent random stream for one replica.
    pub fn replica_rng(&self, replica: u64) -> ChaCha8Rng {
        replica_rng(self.seed, replica)
    }
}

fn replica_rng(seed: u64, replica: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(replica);
    rng
}

/// Probability that a panel fails within `elapsed_years`.
pub fn failure_probability(annual: f64, elapsed_years: f64) -> f64 {
    1.0 - (1.0 - annual).powf(elapsed_years)
}

/// Fails each Alive panel independently; the draw sequence is fixed by the seed.
pub fn inject_failures(grid: &PanelGrid, process: &FailureProcess, elapsed_years: f64) -> Result<PanelGrid, FaultError> {
    let mut rng = process.replica_rng(0);
    inject_failures_with(grid, process, elapsed_years, &mut rng)
}

pub fn inject_failures_with<R: Rng>(
    grid: &PanelGrid,
    process: &FailureProcess,
    elapsed_years: f64,
    rng: &mut R,
) -> Result<PanelGrid, FaultError> {
    process.validate()?;
    if !(elapsed_years >= 0.0) {
        return Err(FaultError::NegativeElapsed(elapsed_years));
    }
    let p = failure_probability(process.annual_failure_probability, elapsed_years);
    let mut out = grid.clone();
    for cell in out.cells.iter_mut() {
        if *cell == CellState::Alive && rng.gen::<f64>() < p {
            *cell = CellState::Failed;
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedStage {
    pub panels: Vec<usize>,
    pub width: u64,
    pub blocks: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconfigOutcome {
    /// Uniform-width plan after re-placement; `None` when stages have mixed
    /// widths or nothing could be placed.
    pub plan: Option<ParallelPlan>,
    pub stages: Vec<PlacedStage>,
    pub stage_time_s: f64,
    pub aggregate_rate: f64,
    pub rate_per_session: f64,
    pub retained_rate_fraction: f64,
    /// Original stages that no longer have a full-width group to run on.
    pub unplaced_stages: u64,
}

impl ReconfigOutcome {
    fn total_loss(plan: &ParallelPlan) -> Self {
        Self {
            plan: None,
            stages: Vec::new(),
            stage_time_s: f64::INFINITY,
            aggregate_rate: 0.0,
            rate_per_session: 0.0,
            retained_rate_fraction: 0.0,
            unplaced_stages: plan.pipeline_stages,
        }
    }
}

/// Blocks a unit of `width` can run within a stage time of `m·τ₁/T`.
fn unit_capacity(width: u64, tensor_width: u64, m: u64) -> u64 {
    width * m / tensor_width
}

/// Re-places the model on the surviving panels of `grid`.
pub fn replan(model: &LlmModelSpec, plan: &ParallelPlan, grid: &PanelGrid) -> ReconfigOutcome {
    let t = plan.tensor_width;
    let blocks = model.num_blocks;
    let units = grid.units(t);
    let full_units = units.iter().filter(|u| u.width == t).count() as u64;
    let total_capacity = |m: u64| -> u64 { units.iter().map(|u| unit_capacity(u.width, t, m).min(blocks)).sum() };

    // Stage time in units of τ₁/T; the original plan runs at blocks_per_stage.
    let m_orig = plan.blocks_per_stage;
    let m_max = blocks * t;
    if units.is_empty() || total_capacity(m_max.max(m_orig)) < blocks {
        return ReconfigOutcome::total_loss(plan);
    }
    let (mut lo, mut hi) = (m_orig, m_max.max(m_orig));
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if total_capacity(mid) >= blocks {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    let m = lo;

    let mut remaining = blocks;
    let mut stages = Vec::new();
    for u in &units {
        if remaining == 0 {
            break;
        }
        let k = unit_capacity(u.width, t, m).min(remaining);
        if k > 0 {
            stages.push(PlacedStage {
                panels: u.panels.clone(),
                width: u.width,
                blocks: k,
            });
            remaining -= k;
        }
    }

    let sessions_per_stage = plan.sessions_in_flight / plan.pipeline_stages.max(1);
    let stage_time_s = m as f64 * model.base_block_time_s / t as f64;
    let sessions = sessions_per_stage * stages.len() as u64;
    let uniform = stages.iter().all(|s| s.width == t);
    let new_plan = uniform.then(|| ParallelPlan {
        panels: stages.len() as u64 * t,
        pipeline_stages: stages.len() as u64,
        tensor_width: t,
        blocks_per_stage: stages.iter().map(|s| s.blocks).max().unwrap_or(0),
        sessions_in_flight: sessions,
        warnings: Vec::new(),
    });
    ReconfigOutcome {
        plan: new_plan,
        stage_time_s,
        aggregate_rate: 1.0 / stage_time_s,
        rate_per_session: 1.0 / (sessions as f64 * stage_time_s),
        retained_rate_fraction: m_orig as f64 / m as f64,
        unplaced_stages: plan.pipeline_stages.saturating_sub(full_units),
        stages,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResiliencePoint {
    pub failed_count: usize,
    pub failed_fraction: f64,
    pub mean_retained: f64,
    pub min_retained: f64,
    pub max_retained: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResilienceSample {
    pub replica: u64,
    pub failed_count: usize,
    pub retained: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResilienceCurve {
    pub points: Vec<ResiliencePoint>,
    pub samples: Vec<ResilienceSample>,
}

/// Sweeps the failed fraction of active panels from 0 to 1.
///
/// Each replica draws one random failure order and fails growing prefixes
/// of it, so every replica's curve is nested and non-increasing.
pub fn resilience_curve(
    model: &LlmModelSpec,
    plan: &ParallelPlan,
    grid: &PanelGrid,
    seed: u64,
    replicas: u64,
    sweep_points: usize,
) -> Result<ResilienceCurve, FaultError> {
    if replicas == 0 {
        return Err(FaultError::InvalidSweep("need at least one replica".into()));
    }
    if sweep_points < 2 {
        return Err(FaultError::InvalidSweep("need at least two sweep points".into()));
    }
    let active: Vec<usize> = (0..grid.len()).filter(|&i| grid.state(i) == CellState::Alive).collect();
    let n = active.len();
    let counts: Vec<usize> = (0..sweep_points)
        .map(|j| ((j * n) as f64 / (sweep_points - 1) as f64).round() as usize)
        .collect();

    let per_replica: Vec<Vec<f64>> = (0..replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = replica_rng(seed, replica);
            let mut order = active.clone();
            order.shuffle(&mut rng);
            counts
                .iter()
                .map(|&k| {
                    let mut g = grid.clone();
                    for &idx in &order[..k] {
                        g.set_state(idx, CellState::Failed);
                    }
                    replan(model, plan, &g).retained_rate_fraction
                })
                .collect()
        })
        .collect();

    let mut samples = Vec::with_capacity(replicas as usize * sweep_points);
    for (replica, row) in per_replica.iter().enumerate() {
        for (&k, &r) in counts.iter().zip(row) {
            samples.push(ResilienceSample {
                replica: replica as u64,
                failed_count: k,
                retained: r,
            });
        }
    }
    let points = counts
        .iter()
        .enumerate()
        .map(|(j, &k)| {
            let column = per_replica.iter().map(|row| row[j]);
            let (sum, min, max) = column.fold((0.0, f64::INFINITY, f64::NEG_INFINITY), |(s, lo, hi), r| {
                (s + r, lo.min(r), hi.max(r))
            });
            ResiliencePoint {
                failed_count: k,
                failed_fraction: if n == 0 { 0.0 } else { k as f64 / n as f64 },
                mean_retained: sum / replicas as f64,
                min_retained: min,
                max_retained: max,
            }
        })
        .collect();
    Ok(ResilienceCurve { points, samples })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HorizonPoint {
    pub year: u32,
    pub mean_failed_fraction: f64,
    pub mean_retained: f64,
}

/// Year-by-year failure injection over the process horizon, averaged over replicas.
pub fn simulate_horizon(
    model: &LlmModelSpec,
    plan: &ParallelPlan,
    grid: &PanelGrid,
    process: &FailureProcess,
    replicas: u64,
) -> Result<Vec<HorizonPoint>, FaultError> {
    process.validate()?;
    if replicas == 0 {
        return Err(FaultError::InvalidSweep("need at least one replica".into()));
    }
    let active = grid.count(CellState::Alive).max(1) as f64;
    let failed_at_start = grid.count(CellState::Failed);
    let runs: Vec<Vec<(f64, f64)>> = (0..replicas)
        .into_par_iter()
        .map(|replica| {
            let mut rng = process.replica_rng(replica);
            let mut g = grid.clone();
            let mut out = vec![(0.0, replan(model, plan, &g).retained_rate_fraction)];
            for _ in 0..process.horizon_years {
                g = inject_failures_with(&g, process, 1.0, &mut rng).expect("process validated");
                let failed = (g.count(CellState::Failed) - failed_at_start) as f64 / active;
                out.push((failed, replan(model, plan, &g).retained_rate_fraction));
            }
            out
        })
        .collect();
    Ok((0..=process.horizon_years)
        .map(|year| {
            let (f, r) = runs
                .iter()
                .map(|run| run[year as usize])
                .fold((0.0, 0.0), |(fs, rs), (f, r)| (fs + f, rs + r));
            HorizonPoint {
                year,
                mean_failed_fraction: f / replicas as f64,
                mean_retained: r / replicas as f64,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::llm_planner::make_plan;

    fn small_model(blocks: u64) -> LlmModelSpec {
        LlmModelSpec {
            name: "small".into(),
            num_blocks: blocks,
            ..LlmModelSpec::light()
        }
    }

    #[test]
    fn serpentine_walks_back_and_forth() {
        let g = PanelGrid::new(2, 3);
        assert_eq!(g.serpentine_order(), vec![0, 1, 2, 5, 4, 3]);
    }

    #[test]
    fn quad_units_cover_grid() {
        let g = PanelGrid::new(4, 4);
        let units = g.units(4);
        assert_eq!(units.len(), 4);
        assert!(units.iter().all(|u| u.width == 4));
        assert_eq!(units[0].panels, vec![0, 1, 4, 5]);
        // second quad row runs right to left
        assert_eq!(units[2].panels, vec![10, 11, 14, 15]);
    }

    #[test]
    fn broken_quad_yields_singles() {
        let mut g = PanelGrid::new(4, 4);
        g.set_state(0, CellState::Failed);
        let units = g.units(4);
        assert_eq!(units.iter().filter(|u| u.width == 4).count(), 3);
        assert_eq!(units.iter().filter(|u| u.width == 1).count(), 3);
    }

    #[test]
    fn for_plan_marks_spares() {
        let m = LlmModelSpec::heavy();
        let plan = make_plan(&m, 512, 4).unwrap();
        let g = PanelGrid::for_plan(&plan, 12, 0).unwrap();
        assert_eq!(g.cols(), 12);
        assert_eq!(g.rows() % 2, 0);
        assert_eq!(g.count(CellState::Alive), 512);
        assert_eq!(g.count(CellState::Spare), 0);
        assert_eq!(g.count(CellState::Failed), g.len() - 512);
        let g = PanelGrid::for_plan(&plan, 12, 20).unwrap();
        assert_eq!(g.count(CellState::Spare), 20);
        assert_eq!(g.count(CellState::Alive), 512);
    }

    #[test]
    fn zero_failures_is_identity() {
        let m = LlmModelSpec::heavy();
        let plan = make_plan(&m, 512, 4).unwrap();
        let g = PanelGrid::for_plan(&plan, 12, 0).unwrap();
        let out = replan(&m, &plan, &g);
        assert_eq!(out.retained_rate_fraction, 1.0);
        assert_eq!(out.unplaced_stages, 0);
        let p = out.plan.unwrap();
        assert_eq!(
            (p.pipeline_stages, p.tensor_width, p.blocks_per_stage, p.sessions_in_flight),
            (128, 4, 1, 256)
        );
    }

    #[test]
    fn all_failed_is_total_loss() {
        let m = small_model(4);
        let plan = make_plan(&m, 16, 4).unwrap();
        let mut g = PanelGrid::new(4, 4);
        for i in 0..16 {
            g.set_state(i, CellState::Failed);
        }
        let out = replan(&m, &plan, &g);
        assert_eq!(out.retained_rate_fraction, 0.0);
        assert!(out.stages.is_empty());
    }

    #[test]
    fn single_failure_in_quad() {
        let m = small_model(4);
        let plan = make_plan(&m, 16, 4).unwrap();
        let mut g = PanelGrid::new(4, 4);
        g.set_state(5, CellState::Failed);
        let out = replan(&m, &plan, &g);
        // Three quads carry four blocks: one of them takes two.
        assert_eq!(out.retained_rate_fraction, 0.5);
        assert_eq!(out.unplaced_stages, 1);
        assert!(out.stages.iter().all(|s| !s.panels.contains(&5)));
    }

    #[test]
    fn spares_absorb_failures() {
        let m = small_model(4);
        let plan = make_plan(&m, 16, 4).unwrap();
        let mut g = PanelGrid::for_plan(&plan, 4, 16).unwrap();
        assert_eq!(g.count(CellState::Spare), 16);
        g.set_state(0, CellState::Failed);
        assert_eq!(replan(&m, &plan, &g).retained_rate_fraction, 1.0);
    }

    #[test]
    fn extreme_probabilities() {
        let g = PanelGrid::new(4, 12);
        let never = FailureProcess {
            annual_failure_probability: 0.0,
            horizon_years: 5,
            seed: 7,
        };
        assert_eq!(inject_failures(&g, &never, 30.0).unwrap(), g);
        let always = FailureProcess {
            annual_failure_probability: 1.0,
            ..never
        };
        assert_eq!(inject_failures(&g, &always, 1.0).unwrap().count(CellState::Failed), 48);
        assert!(inject_failures(&g, &never, -1.0).is_err());
        let bad = FailureProcess {
            annual_failure_probability: 1.5,
            ..never
        };
        assert!(inject_failures(&g, &bad, 1.0).is_err());
    }

    #[test]
    fn spares_do_not_fail() {
        let mut g = PanelGrid::new(2, 2);
        g.set_state(3, CellState::Spare);
        let always = FailureProcess {
            annual_failure_probability: 1.0,
            horizon_years: 1,
            seed: 1,
        };
        let out = inject_failures(&g, &always, 1.0).unwrap();
        assert_eq!(out.state(3), CellState::Spare);
        assert_eq!(out.count(CellState::Failed), 3);
    }

    #[test]
    fn curve_end_points() {
        let m = small_model(8);
        let plan = make_plan(&m, 16, 4).unwrap();
        let g = PanelGrid::new(4, 4);
        let c = resilience_curve(&m, &plan, &g, 11, 8, 5).unwrap();
        assert_eq!(c.points.first().unwrap().mean_retained, 1.0);
        assert_eq!(c.points.last().unwrap().mean_retained, 0.0);
        assert_eq!(c.points.last().unwrap().failed_fraction, 1.0);
        assert_eq!(c.samples.len(), 40);
        assert!(resilience_curve(&m, &plan, &g, 11, 0, 5).is_err());
        assert!(resilience_curve(&m, &plan, &g, 11, 2, 1).is_err());
    }

    #[test]
    fn horizon_starts_intact() {
        let m = LlmModelSpec::heavy();
        let plan = make_plan(&m, 512, 4).unwrap();
        let g = PanelGrid::for_plan(&plan, 12, 0).unwrap();
        let p = FailureProcess {
            annual_failure_probability: 0.02,
            horizon_years: 3,
            seed: 3,
        };
        let h = simulate_horizon(&m, &plan, &g, &p, 4).unwrap();
        assert_eq!(h.len(), 4);
        assert_eq!(h[0].mean_retained, 1.0);
        assert!(h.windows(2).all(|w| w[1].mean_failed_fraction >= w[0].mean_failed_fraction));
    }
}
