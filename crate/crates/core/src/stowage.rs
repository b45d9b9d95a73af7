//! Roll-up stowage geometry, payload fit and the satellite mass/power roll-up.

use std::f64::consts::PI;

use thiserror::Error;

use crate::panel_budget::{panel_mass_density, PanelDesign};

/// Specific power the source roll-up prints [kW/t]. Its own inputs give 107.1.
pub const QUOTED_SPECIFIC_POWER_KW_PER_T: f64 = 112.5;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StowageError {
    #[error("inner radius {inner} m exceeds outer radius {outer} m")]
    InvertedRadii { inner: f64, outer: f64 },
    #[error("invalid stowage configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid satellite design: {0}")]
    InvalidDesign(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StowageConfig {
    pub inner_radius_m: f64,
    pub outer_radius_m: f64,
    /// Radial advance per wrap, panel plus spacers.
    pub layer_pitch_m: f64,
    pub bay_diameter_m: f64,
    pub bay_length_m: f64,
    pub usable_roll_width_m: f64,
}

impl Default for StowageConfig {
    fn default() -> Self {
        Self {
            inner_radius_m: 2.5,
            outer_radius_m: 4.0,
            layer_pitch_m: 0.010,
            bay_diameter_m: 8.0,
            bay_length_m: 22.0,
            usable_roll_width_m: 20.4,
        }
    }
}

impl StowageConfig {
    pub fn validate(&self) -> Result<(), StowageError> {
        if self.inner_radius_m > self.outer_radius_m {
            return Err(StowageError::InvertedRadii {
                inner: self.inner_radius_m,
                outer: self.outer_radius_m,
            });
        }
        let bad = |m: String| Err(StowageError::InvalidConfig(m));
        if !(self.inner_radius_m > 0.0) {
            return bad(format!("inner radius must be positive, got {}", self.inner_radius_m));
        }
        if !(self.layer_pitch_m > 0.0) {
            return bad(format!("layer pitch must be positive, got {}", self.layer_pitch_m));
        }
        if self.outer_radius_m > self.bay_diameter_m / 2.0 {
            return bad(format!(
                "outer radius {} m exceeds the bay radius {} m",
                self.outer_radius_m,
                self.bay_diameter_m / 2.0
            ));
        }
        if !(self.usable_roll_width_m > 0.0) || self.usable_roll_width_m > self.bay_length_m {
            return bad(format!(
                "usable roll width {} m must be positive and fit the {} m bay",
                self.usable_roll_width_m, self.bay_length_m
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiralCapacity {
    pub length_m: f64,
    pub area_m2: f64,
}

/// Roll length that fits the annulus between the two radii, `π(R²−r²)/pitch`.
pub fn spiral_capacity(cfg: &StowageConfig) -> Result<SpiralCapacity, StowageError> {
    cfg.validate()?;
    let length_m = PI * (cfg.outer_radius_m.powi(2) - cfg.inner_radius_m.powi(2)) / cfg.layer_pitch_m;
    Ok(SpiralCapacity {
        length_m,
        area_m2: length_m * cfg.usable_roll_width_m,
    })
}

/// Arc length of an Archimedean spiral from `inner` to `outer`, numerically integrated.
pub fn spiral_arc_length(cfg: &StowageConfig) -> Result<f64, StowageError> {
    cfg.validate()?;
    let b = cfg.layer_pitch_m / (2.0 * PI);
    let theta0 = cfg.inner_radius_m / b;
    let theta1 = cfg.outer_radius_m / b;
    // r = bθ, ds = b·sqrt(1+θ²)dθ has a closed form antiderivative.
    let f = |t: f64| 0.5 * b * (t * (1.0 + t * t).sqrt() + t.asinh());
    Ok(f(theta1) - f(theta0))
}

/// Array mass in tonnes that the spiral can hold at the given area density.
pub fn stow_limited_mass_t(cfg: &StowageConfig, area_density_kg_m2: f64) -> Result<f64, StowageError> {
    Ok(spiral_capacity(cfg)?.area_m2 * area_density_kg_m2 / 1000.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SatelliteDesign {
    pub panel: PanelDesign,
    pub panel_count: u64,
    pub panels_per_row: u64,
    pub overhead_mass_fraction: f64,
    pub overhead_power_fraction: f64,
    pub mass_cap_t: f64,
    /// Array area used instead of `panel_count · panel.area` when set.
    pub array_area_override_m2: Option<f64>,
    /// Area density used instead of the material budget sum when set.
    pub area_density_override_kg_m2: Option<f64>,
}

impl Default for SatelliteDesign {
    fn default() -> Self {
        Self {
            panel: PanelDesign::baseline(),
            panel_count: 16_600,
            panels_per_row: 12,
            overhead_mass_fraction: 0.05,
            overhead_power_fraction: 0.04,
            mass_cap_t: 150.0,
            array_area_override_m2: None,
            area_density_override_kg_m2: None,
        }
    }
}

impl SatelliteDesign {
    /// Roll-up as printed: 45,000 m² of array at 0.52 + 0.23 + 2.40 kg/m².
    pub fn quoted_rollup() -> Self {
        Self {
            array_area_override_m2: Some(45_000.0),
            area_density_override_kg_m2: Some(0.52 + 0.23 + 2.40),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<(), StowageError> {
        let bad = |m: String| Err(StowageError::InvalidDesign(m));
        if self.panels_per_row == 0 {
            return bad("panels per row must be positive".into());
        }
        for (name, f) in [
            ("overhead mass fraction", self.overhead_mass_fraction),
            ("overhead power fraction", self.overhead_power_fraction),
        ] {
            if !(0.0..1.0).contains(&f) {
                return bad(format!("{name} must be in [0, 1), got {f}"));
            }
        }
        if !(self.mass_cap_t > 0.0) {
            return bad(format!("mass cap must be positive, got {}", self.mass_cap_t));
        }
        for (name, v) in [
            ("array area", self.array_area_override_m2),
            ("area density", self.area_density_override_kg_m2),
        ] {
            if let Some(v) = v {
                if !(v >= 0.0) {
                    return bad(format!("{name} must be non-negative, got {v}"));
                }
            }
        }
        Ok(())
    }

    pub fn area_density_kg_m2(&self) -> f64 {
        self.area_density_override_kg_m2
            .unwrap_or_else(|| panel_mass_density(&self.panel))
    }

    pub fn array_width_m(&self) -> f64 {
        self.panels_per_row as f64 * self.panel.side_m
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SatelliteRollup {
    pub array_area_m2: f64,
    pub array_length_m: f64,
    pub array_width_m: f64,
    pub distributed_mass_t: f64,
    pub total_mass_t: f64,
    /// Gross compute power of all panels.
    pub compute_power_kw: f64,
    pub specific_power_kw_per_t: f64,
}

pub fn satellite_rollup(design: &SatelliteDesign) -> Result<SatelliteRollup, StowageError> {
    design.validate()?;
    let width = design.array_width_m();
    let (area, length) = match design.array_area_override_m2 {
        Some(area) => (area, area / width),
        None => {
            let rows = design.panel_count.div_ceil(design.panels_per_row);
            (
                design.panel_count as f64 * design.panel.area_m2,
                rows as f64 * design.panel.side_m,
            )
        }
    };
    let distributed = area * design.area_density_kg_m2() / 1000.0;
    let total = distributed * (1.0 + design.overhead_mass_fraction);
    let power_kw = design.panel_count as f64 * design.panel.compute_power_w / 1000.0;
    let specific = if total > 0.0 {
        power_kw * (1.0 - design.overhead_power_fraction) / total
    } else {
        0.0
    };
    Ok(SatelliteRollup {
        array_area_m2: area,
        array_length_m: length,
        array_width_m: width,
        distributed_mass_t: distributed,
        total_mass_t: total,
        compute_power_kw: power_kw,
        specific_power_kw_per_t: specific,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintMargin {
    pub name: &'static str,
    pub unit: &'static str,
    pub required: f64,
    pub available: f64,
    pub satisfied: bool,
}

impl ConstraintMargin {
    fn new(name: &'static str, unit: &'static str, required: f64, available: f64) -> Self {
        Self {
            name,
            unit,
            required,
            available,
            satisfied: required <= available,
        }
    }

    /// `(available − required) / available`.
    pub fn margin_fraction(&self) -> f64 {
        if self.available == 0.0 {
            if self.required == 0.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        } else {
            (self.available - self.required) / self.available
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub fits: bool,
    pub constraints: Vec<ConstraintMargin>,
}

/// Checks roll length, coil radius, roll width and launch mass.
pub fn fit_check(cfg: &StowageConfig, design: &SatelliteDesign) -> Result<FitReport, StowageError> {
    let capacity = spiral_capacity(cfg)?;
    let rollup = satellite_rollup(design)?;
    let width_required = if design.panel_count == 0 { 0.0 } else { rollup.array_width_m };
    let constraints = vec![
        ConstraintMargin::new("roll length", "m", rollup.array_length_m, capacity.length_m),
        ConstraintMargin::new("roll width", "m", width_required, cfg.usable_roll_width_m),
        ConstraintMargin::new("outer coil radius", "m", cfg.outer_radius_m, cfg.bay_diameter_m / 2.0),
        ConstraintMargin::new("launch mass", "t", rollup.total_mass_t, design.mass_cap_t),
    ];
    Ok(FitReport {
        fits: constraints.iter().all(|c| c.satisfied),
        constraints,
    })
}
