//! One report builder per subcommand. Front ends only choose and print.

use thiserror::Error;

use crate::fault_sim::{resilience_curve, simulate_horizon, FaultError, PanelGrid};
use crate::llm_planner::{
    evaluate, feasibility_check, make_plan_with_sessions, subarray_packing, PlanError, GB, US,
};
use crate::panel_budget::{
    array_specific_power, group_mass_density, materials_to_csv, panel_mass_density, BudgetError, MaterialGroup,
};
use crate::reproduce::{reproduce, ReproError, Reproduction, Status, TableId};
use crate::report::{csv_writer, finish_csv, ReportBundle, RunMetadata};
use crate::scenario::{PlanSpec, Scenario};
use crate::silicon::{dynamic_energy, leakage_fraction, total_energy_per_token, SiliconError};
use crate::stowage::{fit_check, satellite_rollup, spiral_capacity, stow_limited_mass_t, StowageError};
use crate::thermal::{energy_closure_residual, solve_panel_equilibrium, ThermalError};
use crate::tradestudy::{compare, TradeError};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Silicon(#[from] SiliconError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Stowage(#[from] StowageError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error(transparent)]
    Trade(#[from] TradeError),
    #[error(transparent)]
    Fault(#[from] FaultError),
    #[error(transparent)]
    Repro(#[from] ReproError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unknown plan `{0}`")]
    UnknownPlan(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Analysis {
    Thermal,
    Energy { coolant_c: Option<f64> },
    Mass,
    Stow,
    PlanLlm { plan: Option<PlanSpec> },
    Trade,
    FaultSim,
    Reproduce { tables: Vec<TableId> },
}

impl Analysis {
    pub fn name(&self) -> &'static str {
        match self {
            Analysis::Thermal => "thermal",
            Analysis::Energy { .. } => "energy",
            Analysis::Mass => "mass",
            Analysis::Stow => "stow",
            Analysis::PlanLlm { .. } => "plan-llm",
            Analysis::Trade => "trade",
            Analysis::FaultSim => "faultsim",
            Analysis::Reproduce { .. } => "reproduce",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunOutcome {
    pub bundle: ReportBundle,
    /// A reproduced cell fell outside its tolerance.
    pub tolerance_breach: bool,
    /// A requested plan failed a feasibility check.
    pub infeasible: bool,
}

fn num(x: f64) -> String {
    format!("{x:.6}")
}

fn opt(x: Option<f64>) -> String {
    x.map_or_else(String::new, num)
}

pub fn run(analysis: &Analysis, sc: &Scenario, metadata: RunMetadata) -> Result<RunOutcome, RunError> {
    let mut out = RunOutcome {
        bundle: ReportBundle::new(metadata),
        tolerance_breach: false,
        infeasible: false,
    };
    match analysis {
        Analysis::Thermal => thermal(sc, &mut out)?,
        Analysis::Energy { coolant_c } => energy(sc, *coolant_c, &mut out)?,
        Analysis::Mass => mass(sc, &mut out)?,
        Analysis::Stow => stow(sc, &mut out)?,
        Analysis::PlanLlm { plan } => plan_llm(sc, plan.as_ref(), &mut out)?,
        Analysis::Trade => trade(sc, &mut out)?,
        Analysis::FaultSim => faultsim(sc, &mut out)?,
        Analysis::Reproduce { tables } => reproduce_tables(sc, tables, &mut out)?,
    }
    Ok(out)
}

fn thermal(sc: &Scenario, out: &mut RunOutcome) -> Result<(), RunError> {
    let mut w = csv_writer();
    w.write_record([
        "orbit",
        "altitude_km",
        "earth_ir_back_w_m2",
        "t_front_c",
        "t_back_c",
        "p_electric_w_m2",
        "front_radiated_w_m2",
        "back_radiated_w_m2",
        "closure_residual_w_m2",
    ])?;
    for env in &sc.orbits {
        let s = solve_panel_equilibrium(&sc.thermal, env)?;
        w.write_record([
            env.label.clone(),
            opt(env.altitude_km),
            num(env.earth_ir_back_w_m2),
            num(s.t_front_c()),
            num(s.t_back_c()),
            num(s.p_electric_w_m2),
            num(s.p_front_radiated_w_m2),
            num(s.p_back_radiated_w_m2),
            num(energy_closure_residual(&s, &sc.thermal, env)),
        ])?;
    }
    out.bundle.push("thermal", finish_csv(w)?, None);
    out.bundle.summary = format!("{} orbit(s) solved\n", sc.orbits.len());
    Ok(())
}

fn energy(sc: &Scenario, coolant: Option<f64>, out: &mut RunOutcome) -> Result<(), RunError> {
    let mut w = csv_writer();
    w.write_record([
        "coolant_c",
        "junction_c",
        "cooling",
        "flavor",
        "vdd_v",
        "clock_ghz",
        "e_dynamic_j",
        "e_dynamic_model_j",
        "e_static_j",
        "e_total_j",
        "leakage_fraction",
    ])?;
    for r in sc.silicon.rows() {
        w.write_record([
            num(r.coolant_temp_c),
            num(r.junction_temp_c),
            r.cooling.key().to_string(),
            r.flavor.key().to_string(),
            num(r.vdd_v),
            num(r.clock_ghz),
            num(r.e_dynamic_j),
            num(dynamic_energy(r.flavor, r.vdd_v)?),
            num(r.e_static_j),
            num(total_energy_per_token(r)),
            num(leakage_fraction(r)),
        ])?;
    }
    out.bundle.push("energy", finish_csv(w)?, None);
    if let Some(t) = coolant {
        let p = sc.silicon.select(t)?;
        out.bundle.summary = format!(
            "coolant {t} C -> {} row at {} C: clock {} GHz, {} J/token\n",
            p.flavor.key(),
            p.coolant_temp_c,
            p.clock_ghz,
            num(total_energy_per_token(&p))
        );
    }
    Ok(())
}

fn mass(sc: &Scenario, out: &mut RunOutcome) -> Result<(), RunError> {
    out.bundle.push("materials", materials_to_csv(&sc.panel)?, None);
    let mut w = csv_writer();
    w.write_record(["quantity", "value", "unit"])?;
    for g in MaterialGroup::ALL {
        w.write_record([format!("{} area density", g.key()), num(group_mass_density(sc.panel.group(g))), "kg/m2".into()])?;
    }
    let density = panel_mass_density(&sc.panel);
    w.write_record(["panel area density".into(), num(density), "kg/m2".into()])?;
    w.write_record([
        "array specific power".into(),
        num(array_specific_power(sc.panel.net_compute_flux_w_m2(), density)?),
        "W/kg".into(),
    ])?;
    let r = satellite_rollup(&sc.satellite)?;
    let rows = [
        ("rollup area density", sc.satellite.area_density_kg_m2(), "kg/m2"),
        ("array area", r.array_area_m2, "m2"),
        ("array length", r.array_length_m, "m"),
        ("array width", r.array_width_m, "m"),
        ("distributed mass", r.distributed_mass_t, "t"),
        ("total satellite mass", r.total_mass_t, "t"),
        ("compute power", r.compute_power_kw, "kW"),
        ("specific compute power", r.specific_power_kw_per_t, "kW/t"),
    ];
    for (q, v, u) in rows {
        w.write_record([q, &num(v), u])?;
    }
    out.bundle.push("mass", finish_csv(w)?, None);
    Ok(())
}

fn stow(sc: &Scenario, out: &mut RunOutcome) -> Result<(), RunError> {
    let cap = spiral_capacity(&sc.stowage)?;
    let mut w = csv_writer();
    w.write_record(["quantity", "value", "unit"])?;
    w.write_record(["spiral length", &num(cap.length_m), "m"])?;
    w.write_record(["spiral area", &num(cap.area_m2), "m2"])?;
    w.write_record([
        "stow-limited mass",
        &num(stow_limited_mass_t(&sc.stowage, sc.satellite.area_density_kg_m2())?),
        "t",
    ])?;
    out.bundle.push("stowage", finish_csv(w)?, None);
    let fit = fit_check(&sc.stowage, &sc.satellite)?;
    let mut w = csv_writer();
    w.write_record(["constraint", "required", "available", "unit", "margin_fraction", "satisfied"])?;
    for c in &fit.constraints {
        w.write_record([
            c.name.to_string(),
            num(c.required),
            num(c.available),
            c.unit.to_string(),
            num(c.margin_fraction()),
            c.satisfied.to_string(),
        ])?;
    }
    out.bundle.push("fit", finish_csv(w)?, None);
    out.bundle.summary = format!("fits: {}\n", fit.fits);
    Ok(())
}

fn plan_llm(sc: &Scenario, only: Option<&PlanSpec>, out: &mut RunOutcome) -> Result<(), RunError> {
    let specs: Vec<PlanSpec> = match only {
        Some(p) => vec![p.clone()],
        None => sc.plans.clone(),
    };
    let mut w = csv_writer();
    w.write_record([
        "plan",
        "model",
        "panels",
        "pipeline_stages",
        "tensor_width",
        "blocks_per_stage",
        "sessions_in_flight",
        "stage_time_us",
        "rate_per_session_tok_s",
        "aggregate_rate_tok_s",
        "mem_per_gpu_gb",
        "bw_per_gpu_gb_s",
        "subarrays",
        "concurrent_sessions",
        "feasible",
        "failed_checks",
    ])?;
    let mut summary = String::new();
    for spec in &specs {
        let model = sc
            .model(&spec.model)
            .ok_or_else(|| RunError::UnknownPlan(format!("{} (model `{}`)", spec.name, spec.model)))?;
        let plan = match make_plan_with_sessions(model, spec.panels, spec.tensor_width, spec.sessions_per_stage) {
            Ok(p) => p,
            Err(e) => {
                out.infeasible = true;
                summary.push_str(&format!("{}: infeasible: {e}\n", spec.name));
                continue;
            }
        };
        let m = evaluate(model, &plan);
        let report = feasibility_check(model, &plan, &sc.hardware, sc.grid_cols);
        let packing = subarray_packing(sc.satellite_panels, &plan)?;
        let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
        if !failed.is_empty() {
            out.infeasible = true;
        }
        w.write_record([
            spec.name.clone(),
            model.name.clone(),
            plan.panels.to_string(),
            plan.pipeline_stages.to_string(),
            plan.tensor_width.to_string(),
            plan.blocks_per_stage.to_string(),
            plan.sessions_in_flight.to_string(),
            num(m.stage_time_s / US),
            num(m.rate_per_session),
            num(m.aggregate_rate),
            num(m.mem_per_gpu_bytes / GB),
            num(m.bw_per_gpu_bytes_s / GB),
            packing.subarrays.to_string(),
            packing.concurrent_sessions.to_string(),
            report.feasible().to_string(),
            failed.join(";"),
        ])?;
        summary.push_str(&format!(
            "{}: {:.0} tok/s/session, {} sessions{}\n",
            spec.name,
            m.rate_per_session,
            plan.sessions_in_flight,
            if failed.is_empty() {
                String::new()
            } else {
                format!(", infeasible ({})", failed.join(", "))
            }
        ));
    }
    out.bundle.push("plans", finish_csv(w)?, None);
    out.bundle.summary = summary;
    Ok(())
}

fn trade(sc: &Scenario, out: &mut RunOutcome) -> Result<(), RunError> {
    let t = compare(&sc.designs, &sc.silicon)?;
    out.bundle.push("trade", t.to_csv()?, Some(t.to_markdown()));
    Ok(())
}

fn faultsim(sc: &Scenario, out: &mut RunOutcome) -> Result<(), RunError> {
    let f = &sc.faultsim;
    let spec = sc.plan(&f.plan).ok_or_else(|| RunError::UnknownPlan(f.plan.clone()))?;
    let (model, plan) = sc.build_plan(spec)?;
    let grid = PanelGrid::for_plan(&plan, f.grid_cols, f.spare_panels)?;
    let seed = out.bundle.metadata.seed;
    let curve = resilience_curve(&model, &plan, &grid, seed, f.replicas, f.sweep_points)?;
    let mut w = csv_writer();
    w.write_record(["failed_panels", "failed_fraction", "mean_retained", "min_retained", "max_retained"])?;
    for p in &curve.points {
        w.write_record([
            p.failed_count.to_string(),
            num(p.failed_fraction),
            num(p.mean_retained),
            num(p.min_retained),
            num(p.max_retained),
        ])?;
    }
    out.bundle.push("resilience", finish_csv(w)?, None);
    let horizon = simulate_horizon(&model, &plan, &grid, &f.process(seed), f.replicas)?;
    let mut w = csv_writer();
    w.write_record(["year", "mean_failed_fraction", "mean_retained"])?;
    for h in &horizon {
        w.write_record([h.year.to_string(), num(h.mean_failed_fraction), num(h.mean_retained)])?;
    }
    out.bundle.push("horizon", finish_csv(w)?, None);
    out.bundle.summary = format!(
        "plan {}: {} active panels, {} spares, {} replicas\n",
        spec.name,
        plan.panels,
        f.spare_panels,
        f.replicas
    );
    Ok(())
}

fn reproduce_tables(sc: &Scenario, tables: &[TableId], out: &mut RunOutcome) -> Result<(), RunError> {
    let inputs = sc.repro_inputs();
    let mut summary = String::new();
    for &t in tables {
        let r: Reproduction = reproduce(t, &inputs)?;
        if r.breached() {
            out.tolerance_breach = true;
        }
        summary.push_str(&format!(
            "table {t}: {} pass, {} flagged, {} fail\n",
            r.count(Status::Pass),
            r.count(Status::Flagged),
            r.count(Status::Fail)
        ));
        out.bundle.push(&format!("table_{t}"), r.to_csv()?, Some(r.to_markdown()));
    }
    out.bundle.summary = summary;
    Ok(())
}
