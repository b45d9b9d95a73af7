//! Pipeline × tensor parallel placement of an inference LLM on the panel array.
//!
//! Steady-state model: each stage holds `⌈B/P⌉` attention blocks and needs
//! `blocks · τ₁ / T` per token. `S = 2P` sessions keep the pipeline full, so
//! the array emits one token per stage time and every session sees
//! `1 / (S · stage_time)` tokens per second.

use thiserror::Error;

pub const GB: f64 = 1e9;
pub const KB: f64 = 1e3;
pub const MB: f64 = 1e6;
pub const US: f64 = 1e-6;

/// Sessions in flight per pipeline stage (double buffering).
pub const DEFAULT_SESSIONS_PER_STAGE: u64 = 2;

/// Columns of the physical array.
pub const DEFAULT_GRID_COLS: u64 = 12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error("tensor width {tensor} does not divide {panels} panels")]
    IndivisiblePanels { panels: u64, tensor: u64 },
    #[error("{stages} pipeline stages exceed the model's {blocks} attention blocks")]
    TooManyStages { stages: u64, blocks: u64 },
    #[error("invalid plan input: {0}")]
    InvalidInput(String),
    #[error("invalid model `{name}`: {reason}")]
    InvalidModel { name: String, reason: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct LlmModelSpec {
    pub name: String,
    pub context_length: u64,
    pub num_blocks: u64,
    pub weights_total_bytes: f64,
    /// Activation payload handed between stages per token.
    pub activation_bytes_per_token: f64,
    pub kv_per_block_per_session_bytes: f64,
    /// Single-GPU time to push one token through one block (τ₁).
    pub base_block_time_s: f64,
}

impl LlmModelSpec {
    /// 96-block, 100k-context model with the committed calibration.
    pub fn light() -> Self {
        Self {
            name: "light".into(),
            context_length: 100_000,
            num_blocks: 96,
            weights_total_bytes: calibration::LIGHT_WEIGHTS_GB * GB,
            activation_bytes_per_token: calibration::ACTIVATION_KB * KB,
            kv_per_block_per_session_bytes: 0.0,
            base_block_time_s: calibration::LIGHT_BLOCK_TIME_US * US,
        }
    }

    /// 128-block, 500k-context model with the committed calibration.
    pub fn heavy() -> Self {
        Self {
            name: "heavy".into(),
            context_length: 500_000,
            num_blocks: 128,
            weights_total_bytes: calibration::HEAVY_WEIGHTS_GB * GB,
            activation_bytes_per_token: calibration::ACTIVATION_KB * KB,
            kv_per_block_per_session_bytes: 0.0,
            base_block_time_s: calibration::HEAVY_BLOCK_TIME_US * US,
        }
    }

    pub fn validate(&self) -> Result<(), PlanError> {
        let fail = |reason: &str| {
            Err(PlanError::InvalidModel {
                name: self.name.clone(),
                reason: reason.to_string(),
            })
        };
        if self.context_length < 1 || self.num_blocks < 1 {
            return fail("context length and block count must be at least 1");
        }
        if !(self.weights_total_bytes >= 0.0 && self.activation_bytes_per_token >= 0.0) {
            return fail("weights and activation size must be non-negative");
        }
        if !(self.kv_per_block_per_session_bytes >= 0.0) {
            return fail("KV cache size must be non-negative");
        }
        if !(self.base_block_time_s > 0.0) {
            return fail("block time must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelHardware {
    pub compute_power_w: f64,
    pub peak_compute_tflops: f64,
    pub memory_capacity_bytes: f64,
    /// Duplex bandwidth to each adjacent panel.
    pub link_bandwidth_bytes_s: f64,
}

impl Default for PanelHardware {
    fn default() -> Self {
        Self {
            compute_power_w: 1000.0,
            peak_compute_tflops: 1000.0,
            memory_capacity_bytes: 64.0 * GB,
            link_bandwidth_bytes_s: 100.0 * GB,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PlanWarning {
    /// Blocks do not divide evenly; the last stage runs light.
    LoadImbalance { blocks: u64, stages: u64 },
    /// Tensor width does not map onto 2×2 quads.
    NonQuadTensorWidth(u64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ParallelPlan {
    pub panels: u64,
    pub pipeline_stages: u64,
    pub tensor_width: u64,
    pub blocks_per_stage: u64,
    pub sessions_in_flight: u64,
    pub warnings: Vec<PlanWarning>,
}

pub fn make_plan(model: &LlmModelSpec, panels: u64, tensor_width: u64) -> Result<ParallelPlan, PlanError> {
    make_plan_with_sessions(model, panels, tensor_width, DEFAULT_SESSIONS_PER_STAGE)
}

pub fn make_plan_with_sessions(
    model: &LlmModelSpec,
    panels: u64,
    tensor_width: u64,
    sessions_per_stage: u64,
) -> Result<ParallelPlan, PlanError> {
    model.validate()?;
    if tensor_width == 0 || panels == 0 || sessions_per_stage == 0 {
        return Err(PlanError::InvalidInput(
            "panels, tensor width and sessions per stage must be positive".into(),
        ));
    }
    if !panels.is_multiple_of(tensor_width) {
        return Err(PlanError::IndivisiblePanels {
            panels,
            tensor: tensor_width,
        });
    }
    let stages = panels / tensor_width;
    if stages > model.num_blocks {
        return Err(PlanError::TooManyStages {
            stages,
            blocks: model.num_blocks,
        });
    }
    let mut warnings = Vec::new();
    if !model.num_blocks.is_multiple_of(stages) {
        warnings.push(PlanWarning::LoadImbalance {
            blocks: model.num_blocks,
            stages,
        });
    }
    if tensor_width != 1 && tensor_width != 4 {
        warnings.push(PlanWarning::NonQuadTensorWidth(tensor_width));
    }
    Ok(ParallelPlan {
        panels,
        pipeline_stages: stages,
        tensor_width,
        blocks_per_stage: model.num_blocks.div_ceil(stages),
        sessions_in_flight: sessions_per_stage * stages,
        warnings,
    })
}

/// Time for one stage to process one token, with linear tensor speedup.
pub fn stage_time(model: &LlmModelSpec, plan: &ParallelPlan) -> f64 {
    plan.blocks_per_stage as f64 * model.base_block_time_s / plan.tensor_width as f64
}

/// Tokens per second across all sessions.
pub fn aggregate_rate(model: &LlmModelSpec, plan: &ParallelPlan) -> f64 {
    1.0 / stage_time(model, plan)
}

pub fn rate_per_session(model: &LlmModelSpec, plan: &ParallelPlan) -> f64 {
    1.0 / (plan.sessions_in_flight as f64 * stage_time(model, plan))
}

/// Weights share plus the KV cache of every session for the stage's blocks.
pub fn memory_per_gpu(model: &LlmModelSpec, plan: &ParallelPlan) -> f64 {
    let gpus = (plan.pipeline_stages * plan.tensor_width) as f64;
    model.weights_total_bytes / gpus
        + plan.sessions_in_flight as f64 * plan.blocks_per_stage as f64 * model.kv_per_block_per_session_bytes
            / plan.tensor_width as f64
}

/// Duplex bytes/s per GPU: stage hand-off plus tensor all-reduce traffic.
pub fn bandwidth_per_gpu(model: &LlmModelSpec, plan: &ParallelPlan) -> f64 {
    aggregate_rate(model, plan) * model.activation_bytes_per_token * plan.tensor_width as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanMetrics {
    pub mem_per_gpu_bytes: f64,
    pub bw_per_gpu_bytes_s: f64,
    pub rate_per_session: f64,
    pub aggregate_rate: f64,
    pub stage_time_s: f64,
}

pub fn evaluate(model: &LlmModelSpec, plan: &ParallelPlan) -> PlanMetrics {
    PlanMetrics {
        mem_per_gpu_bytes: memory_per_gpu(model, plan),
        bw_per_gpu_bytes_s: bandwidth_per_gpu(model, plan),
        rate_per_session: rate_per_session(model, plan),
        aggregate_rate: aggregate_rate(model, plan),
        stage_time_s: stage_time(model, plan),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubarrayPacking {
    pub subarrays: u64,
    pub concurrent_sessions: u64,
}

/// How many copies of `plan` fit in `total_panels`.
pub fn subarray_packing(total_panels: u64, plan: &ParallelPlan) -> Result<SubarrayPacking, PlanError> {
    if plan.panels == 0 {
        return Err(PlanError::InvalidInput("subarray size must be positive".into()));
    }
    let subarrays = total_panels / plan.panels;
    Ok(SubarrayPacking {
        subarrays,
        concurrent_sessions: subarrays * plan.sessions_in_flight,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityCheck {
    pub name: &'static str,
    pub required: f64,
    pub limit: f64,
    pub passed: bool,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FeasibilityReport {
    pub checks: Vec<FeasibilityCheck>,
}

impl FeasibilityReport {
    pub fn feasible(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&FeasibilityCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn feasibility_check(
    model: &LlmModelSpec,
    plan: &ParallelPlan,
    hardware: &PanelHardware,
    grid_cols: u64,
) -> FeasibilityReport {
    let m = evaluate(model, plan);
    let quad_ok = match plan.tensor_width {
        1 => true,
        4 => grid_cols >= 2 && grid_cols.is_multiple_of(2),
        _ => false,
    };
    let quad_note = match plan.tensor_width {
        1 => "single-panel stages".to_string(),
        4 if quad_ok => format!("2x2 quads tile a {grid_cols}-panel-wide array"),
        4 => format!("2x2 quads do not tile a {grid_cols}-panel-wide array"),
        t => format!("tensor width {t} does not map onto 2x2 quads"),
    };
    let checks = vec![
        FeasibilityCheck {
            name: "bandwidth",
            required: m.bw_per_gpu_bytes_s,
            limit: hardware.link_bandwidth_bytes_s,
            passed: m.bw_per_gpu_bytes_s <= hardware.link_bandwidth_bytes_s,
            note: "duplex bytes/s per GPU vs per-link budget".into(),
        },
        FeasibilityCheck {
            name: "memory",
            required: m.mem_per_gpu_bytes,
            limit: hardware.memory_capacity_bytes,
            passed: m.mem_per_gpu_bytes <= hardware.memory_capacity_bytes,
            note: "bytes per GPU vs memory capacity".into(),
        },
        FeasibilityCheck {
            name: "stages",
            required: plan.pipeline_stages as f64,
            limit: model.num_blocks as f64,
            passed: plan.pipeline_stages <= model.num_blocks,
            note: "pipeline stages vs attention blocks".into(),
        },
        FeasibilityCheck {
            name: "quad layout",
            required: plan.tensor_width as f64,
            limit: 4.0,
            passed: quad_ok,
            note: quad_note,
        },
    ];
    FeasibilityReport { checks }
}

/// Least-squares recovery of the model constants behind published plan figures.
///
/// Each fit is linear in the unknown, so it reduces to `Σxy / Σx²`.
pub mod calibration {
    /// Committed fit results. `fit_*` below regenerates them.
    pub const LIGHT_WEIGHTS_GB: f64 = 743.2015;
    pub const HEAVY_WEIGHTS_GB: f64 = 3614.72;
    pub const LIGHT_BLOCK_TIME_US: f64 = 7.750496;
    pub const HEAVY_BLOCK_TIME_US: f64 = 28.254973;
    pub const ACTIVATION_KB: f64 = 25.59792;

    /// A published plan: `(panels, tensor width, blocks, mem GB, bw GB/s, rate tok/s)`.
    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct PublishedPlan {
        pub panels: u64,
        pub tensor_width: u64,
        pub blocks: u64,
        pub mem_per_gpu_gb: f64,
        pub bw_per_gpu_gb_s: f64,
        pub rate_per_session: Option<f64>,
    }

    fn ratio(pairs: impl Iterator<Item = (f64, f64)>) -> f64 {
        let (sxy, sxx) = pairs.fold((0.0, 0.0), |(sxy, sxx), (x, y)| (sxy + x * y, sxx + x * x));
        sxy / sxx
    }

    /// Total weights [GB] from `mem = W / N`.
    pub fn fit_weights_gb(plans: &[PublishedPlan]) -> f64 {
        ratio(plans.iter().map(|p| (1.0 / p.panels as f64, p.mem_per_gpu_gb)))
    }

    /// τ₁ [µs] from `rate = T / (2·B·τ₁)`, fitting `1/τ₁`.
    pub fn fit_block_time_us(plans: &[PublishedPlan]) -> f64 {
        let inv = ratio(plans.iter().filter_map(|p| {
            p.rate_per_session
                .map(|r| (p.tensor_width as f64 / (2.0 * p.blocks as f64), r))
        }));
        1e6 / inv
    }

    /// Activation size [KB] from `bw = aggregate · a · T`; `block_times_us` pairs with `plans`.
    pub fn fit_activation_kb(plans: &[PublishedPlan], block_times_us: &[f64]) -> f64 {
        let a = ratio(plans.iter().zip(block_times_us).map(|(p, tau_us)| {
            let stages = p.panels / p.tensor_width;
            let blocks_per_stage = p.blocks.div_ceil(stages);
            let stage_time_s = blocks_per_stage as f64 * tau_us * 1e-6 / p.tensor_width as f64;
            let x = p.tensor_width as f64 / stage_time_s;
            (x, p.bw_per_gpu_gb_s * 1e9)
        }));
        a / 1e3
    }

    pub fn light_plans() -> [PublishedPlan; 3] {
        [
            PublishedPlan {
                panels: 16,
                tensor_width: 1,
                blocks: 96,
                mem_per_gpu_gb: 46.45,
                bw_per_gpu_gb_s: 0.55,
                rate_per_session: Some(672.0),
            },
            PublishedPlan {
                panels: 16,
                tensor_width: 4,
                blocks: 96,
                mem_per_gpu_gb: 46.45,
                bw_per_gpu_gb_s: 2.2,
                rate_per_session: Some(2688.0),
            },
            PublishedPlan {
                panels: 384,
                tensor_width: 4,
                blocks: 96,
                mem_per_gpu_gb: 1.94,
                bw_per_gpu_gb_s: 52.84,
                rate_per_session: None,
            },
        ]
    }

    pub fn heavy_plans() -> [PublishedPlan; 1] {
        [PublishedPlan {
            panels: 512,
            tensor_width: 4,
            blocks: 128,
            mem_per_gpu_gb: 7.06,
            bw_per_gpu_gb_s: 14.51,
            rate_per_session: Some(553.0),
        }]
    }

    #[derive(Debug, Clone, Copy, PartialEq)]
    pub struct FittedParameters {
        pub light_weights_gb: f64,
        pub heavy_weights_gb: f64,
        pub light_block_time_us: f64,
        pub heavy_block_time_us: f64,
        pub activation_kb: f64,
    }

    pub fn fit_all() -> FittedParameters {
        let light = light_plans();
        let heavy = heavy_plans();
        let light_tau = fit_block_time_us(&light);
        let heavy_tau = fit_block_time_us(&heavy);
        let all: Vec<_> = light.iter().chain(heavy.iter()).copied().collect();
        let taus: Vec<_> = all
            .iter()
            .map(|p| if p.blocks == 96 { light_tau } else { heavy_tau })
            .collect();
        FittedParameters {
            light_weights_gb: fit_weights_gb(&light),
            heavy_weights_gb: fit_weights_gb(&heavy),
            light_block_time_us: light_tau,
            heavy_block_time_us: heavy_tau,
            activation_kb: fit_activation_kb(&all, &taus),
        }
    }
}
