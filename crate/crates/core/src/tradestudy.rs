//! Side-by-side comparison of cooling architectures.

use std::fmt::Write as _;

use thiserror::Error;

use crate::silicon::{
    total_energy_per_token, token_normalized_power, CoolingTechnology, OperatingPointTable, SiliconError,
    REFERENCE_ENERGY_J,
};
use crate::thermal::{
    celsius_to_kelvin, kelvin_to_celsius, radiated_flux, solve_front_face, CellTechnology, OrbitEnvironment,
    PanelThermalConfig, RadiatorSurface, SolarCellCurve, ThermalError, SOLAR_CONSTANT_W_M2,
};

pub const MAX_JUNCTION_TEMP_C: f64 = 105.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TradeError {
    #[error("design `{name}`: {reason}")]
    InvalidDesign { name: String, reason: String },
    #[error("radiated flux at {0} °C is zero")]
    ZeroFlux(f64),
    #[error("no designs to compare")]
    Empty,
    #[error(transparent)]
    Thermal(#[from] ThermalError),
    #[error(transparent)]
    Silicon(#[from] SiliconError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureDesign {
    pub name: String,
    pub cell_efficiency: f64,
    pub solar_absorption: f64,
    pub radiator_temp_c: f64,
    pub junction_temp_c: f64,
    pub radiator_sides: u8,
    pub emissivity: f64,
    pub earth_ir_w_m2: f64,
    pub gap_leak_w_m2: f64,
    pub cooling: CoolingTechnology,
    /// Coolant temperature used to pick the silicon operating point.
    pub silicon_coolant_temp_c: f64,
    /// Radiator is the back of the solar panel itself.
    pub integrated: bool,
    /// Cell temperature of a separate array; integrated designs compute it.
    pub solar_cell_temp_c: Option<f64>,
    pub solar_flux_w_m2: f64,
}

impl ArchitectureDesign {
    pub fn iscr() -> Self {
        Self {
            name: "ISCR".into(),
            cell_efficiency: 0.27,
            solar_absorption: 0.82,
            radiator_temp_c: 35.0,
            junction_temp_c: 41.0,
            radiator_sides: 1,
            emissivity: 0.90,
            earth_ir_w_m2: 12.0,
            gap_leak_w_m2: 80.0,
            cooling: CoolingTechnology::VaporChamber,
            silicon_coolant_temp_c: 35.0,
            integrated: true,
            solar_cell_temp_c: None,
            solar_flux_w_m2: SOLAR_CONSTANT_W_M2,
        }
    }

    fn separate(name: &str, radiator_c: f64, junction_c: f64, cooling: CoolingTechnology, coolant_c: f64) -> Self {
        Self {
            name: name.into(),
            cell_efficiency: 0.30,
            solar_absorption: 0.82,
            radiator_temp_c: radiator_c,
            junction_temp_c: junction_c,
            radiator_sides: 2,
            emissivity: 0.90,
            earth_ir_w_m2: 24.0,
            gap_leak_w_m2: 0.0,
            cooling,
            silicon_coolant_temp_c: coolant_c,
            integrated: false,
            solar_cell_temp_c: Some(27.0),
            solar_flux_w_m2: SOLAR_CONSTANT_W_M2,
        }
    }

    pub fn low_t() -> Self {
        Self::separate("Low T radiator", 45.0, 90.0, CoolingTechnology::Liquid, 45.0)
    }

    pub fn medium_t() -> Self {
        Self::separate("Medium T radiator", 60.0, 105.0, CoolingTechnology::Liquid, 60.0)
    }

    /// Hotter radiator, same silicon as Medium T.
    pub fn high_t() -> Self {
        Self::separate("High T radiator", 80.0, 105.0, CoolingTechnology::HighPerformance, 60.0)
    }

    pub fn baseline_set() -> Vec<Self> {
        vec![Self::iscr(), Self::low_t(), Self::medium_t(), Self::high_t()]
    }

    pub fn validate(&self) -> Result<(), TradeError> {
        let bad = |reason: String| {
            Err(TradeError::InvalidDesign {
                name: self.name.clone(),
                reason,
            })
        };
        for (label, v) in [
            ("cell efficiency", self.cell_efficiency),
            ("solar absorption", self.solar_absorption),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{label} must be in [0, 1], got {v}"));
            }
        }
        if !(self.emissivity > 0.0 && self.emissivity <= 1.0) {
            return bad(format!("emissivity must be in (0, 1], got {}", self.emissivity));
        }
        if !matches!(self.radiator_sides, 1 | 2) {
            return bad(format!("radiator sides must be 1 or 2, got {}", self.radiator_sides));
        }
        if self.junction_temp_c < self.radiator_temp_c {
            return bad(format!(
                "junction {} °C is below radiator {} °C",
                self.junction_temp_c, self.radiator_temp_c
            ));
        }
        if self.junction_temp_c > MAX_JUNCTION_TEMP_C {
            return bad(format!(
                "junction {} °C exceeds {MAX_JUNCTION_TEMP_C} °C",
                self.junction_temp_c
            ));
        }
        if self.earth_ir_w_m2 < 0.0 || self.gap_leak_w_m2 < 0.0 {
            return bad("Earth IR and gap leak must be non-negative".into());
        }
        if !(self.solar_flux_w_m2 > 0.0) {
            return bad(format!("solar flux must be positive, got {}", self.solar_flux_w_m2));
        }
        Ok(())
    }

    pub fn compute_power_w_m2(&self) -> f64 {
        self.cell_efficiency * self.solar_flux_w_m2
    }

    pub fn radiator_surface(&self) -> Result<RadiatorSurface, TradeError> {
        Ok(RadiatorSurface::new(self.emissivity, self.radiator_sides)?)
    }

    /// Heat the radiator must reject per square metre of solar array.
    pub fn radiator_load_w_m2(&self) -> f64 {
        self.compute_power_w_m2() + self.earth_ir_w_m2 + self.gap_leak_w_m2
    }
}

/// Radiator area needed per unit of solar-array area.
pub fn radiator_area_fraction(d: &ArchitectureDesign) -> Result<f64, TradeError> {
    d.validate()?;
    if d.integrated {
        return Ok(1.0);
    }
    let flux = radiated_flux(celsius_to_kelvin(d.radiator_temp_c), &d.radiator_surface()?)?;
    if !(flux > 0.0) {
        return Err(TradeError::ZeroFlux(d.radiator_temp_c));
    }
    Ok(d.radiator_load_w_m2() / flux)
}

/// Front temperature of an integrated panel running at constant efficiency.
fn integrated_cell_temp_c(d: &ArchitectureDesign) -> Result<f64, TradeError> {
    let config = PanelThermalConfig {
        absorptivity: d.solar_absorption,
        cell_curve: SolarCellCurve::constant(CellTechnology::PerovskiteSiTandem, d.cell_efficiency)?,
        front: RadiatorSurface::one_sided(d.emissivity)?,
        back: d.radiator_surface()?,
        gap_leak_w_m2: d.gap_leak_w_m2,
    };
    let env = OrbitEnvironment {
        label: d.name.clone(),
        solar_flux_w_m2: d.solar_flux_w_m2,
        earth_ir_back_w_m2: d.earth_ir_w_m2,
        earth_ir_front_w_m2: d.earth_ir_w_m2,
        altitude_km: (d.earth_ir_w_m2 > 0.0).then_some(1000.0),
    };
    Ok(kelvin_to_celsius(solve_front_face(&config, &env)?.t_front_k))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignMetrics {
    pub name: String,
    pub solar_absorption: f64,
    pub cell_efficiency: f64,
    pub compute_power_w_m2: f64,
    pub earth_ir_w_m2: f64,
    pub gap_leak_w_m2: f64,
    pub solar_cell_temp_c: Option<f64>,
    pub junction_temp_c: f64,
    pub radiator_temp_c: f64,
    pub radiated_flux_w_m2: f64,
    pub radiator_sides: u8,
    pub radiator_fraction: f64,
    pub cooling: CoolingTechnology,
    pub clock_ghz: f64,
    pub energy_per_token_j: f64,
    pub normalized_power_w_m2: f64,
    /// Normalized power relative to the first column.
    pub relative_normalized_power: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonTable {
    pub columns: Vec<DesignMetrics>,
}

pub fn evaluate_design(d: &ArchitectureDesign, silicon: &OperatingPointTable) -> Result<DesignMetrics, TradeError> {
    d.validate()?;
    let op = silicon.select(d.silicon_coolant_temp_c)?;
    let energy = total_energy_per_token(&op);
    let power = d.compute_power_w_m2();
    let solar_cell_temp_c = if d.integrated {
        Some(integrated_cell_temp_c(d)?)
    } else {
        d.solar_cell_temp_c
    };
    Ok(DesignMetrics {
        name: d.name.clone(),
        solar_absorption: d.solar_absorption,
        cell_efficiency: d.cell_efficiency,
        compute_power_w_m2: power,
        earth_ir_w_m2: d.earth_ir_w_m2,
        gap_leak_w_m2: d.gap_leak_w_m2,
        solar_cell_temp_c,
        junction_temp_c: d.junction_temp_c,
        radiator_temp_c: d.radiator_temp_c,
        radiated_flux_w_m2: radiated_flux(
            celsius_to_kelvin(d.radiator_temp_c),
            &RadiatorSurface::one_sided(d.emissivity)?,
        )?,
        radiator_sides: d.radiator_sides,
        radiator_fraction: radiator_area_fraction(d)?,
        cooling: d.cooling,
        clock_ghz: op.clock_ghz,
        energy_per_token_j: energy,
        normalized_power_w_m2: token_normalized_power(power, energy, REFERENCE_ENERGY_J)?,
        relative_normalized_power: None,
    })
}

/// Evaluates every design, preserving column order.
pub fn compare(designs: &[ArchitectureDesign], silicon: &OperatingPointTable) -> Result<ComparisonTable, TradeError> {
    if designs.is_empty() {
        return Err(TradeError::Empty);
    }
    let mut columns = designs
        .iter()
        .map(|d| evaluate_design(d, silicon))
        .collect::<Result<Vec<_>, _>>()?;
    if columns.len() > 1 {
        let base = columns[0].normalized_power_w_m2;
        for c in &mut columns {
            c.relative_normalized_power = Some(c.normalized_power_w_m2 / base);
        }
    }
    Ok(ComparisonTable { columns })
}

impl ComparisonTable {
    /// One labelled row per metric, one column per design.
    pub fn rows(&self) -> Vec<(&'static str, Vec<String>)> {
        let col = |f: &dyn Fn(&DesignMetrics) -> String| self.columns.iter().map(f).collect::<Vec<_>>();
        let opt = |v: Option<f64>, digits: usize| v.map_or_else(String::new, |x| format!("{x:.digits$}"));
        let mut rows = vec![
            ("Solar absorption", col(&|c| format!("{:.2}", c.solar_absorption))),
            ("cell efficiency", col(&|c| format!("{:.3}", c.cell_efficiency))),
            ("compute power, W/m2", col(&|c| format!("{:.1}", c.compute_power_w_m2))),
            ("Earth IR, W/m2", col(&|c| format!("{:.1}", c.earth_ir_w_m2))),
            ("solar cell transfer, W/m2", col(&|c| format!("{:.1}", c.gap_leak_w_m2))),
            ("solar cells, C", col(&|c| opt(c.solar_cell_temp_c, 1))),
            ("compute junctions, C", col(&|c| format!("{:.1}", c.junction_temp_c))),
            ("radiator, C", col(&|c| format!("{:.1}", c.radiator_temp_c))),
            ("radiated at T, W/m2", col(&|c| format!("{:.1}", c.radiated_flux_w_m2))),
            ("radiator sides", col(&|c| c.radiator_sides.to_string())),
            ("Radiator size (fraction of solar array)", col(&|c| format!("{:.3}", c.radiator_fraction))),
            ("cooling technology", col(&|c| c.cooling.label().to_string())),
            ("GPU clock rate, GHz", col(&|c| format!("{:.2}", c.clock_ghz))),
            ("energy per token, J", col(&|c| format!("{:.3}", c.energy_per_token_j))),
            ("token normalized compute power, W/m2", col(&|c| format!("{:.1}", c.normalized_power_w_m2))),
        ];
        if self.columns.len() > 1 {
            rows.push(("relative normalized power", col(&|c| opt(c.relative_normalized_power, 3))));
        }
        rows
    }

    pub fn to_markdown(&self) -> String {
        let mut out = String::from("| metric |");
        for c in &self.columns {
            let _ = write!(out, " {} |", c.name);
        }
        out.push_str("\n|---|");
        out.push_str(&"---|".repeat(self.columns.len()));
        out.push('\n');
        for (label, cells) in self.rows() {
            let _ = write!(out, "| {label} |");
            for cell in cells {
                let _ = write!(out, " {cell} |");
            }
            out.push('\n');
        }
        out
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let mut header = vec!["metric".to_string()];
        header.extend(self.columns.iter().map(|c| c.name.clone()));
        w.write_record(&header)?;
        for (label, cells) in self.rows() {
            let mut rec = vec![label.to_string()];
            rec.extend(cells);
            w.write_record(&rec)?;
        }
        let bytes = w.into_inner().map_err(|e| e.into_error())?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> ComparisonTable {
        compare(&ArchitectureDesign::baseline_set(), &OperatingPointTable::baseline()).unwrap()
    }

    #[test]
    fn radiator_fractions() {
        let f: Vec<f64> = ArchitectureDesign::baseline_set()
            .iter()
            .map(|d| radiator_area_fraction(d).unwrap())
            .collect();
        for (got, want) in f.iter().zip([1.0, 0.413, 0.344, 0.272]) {
            assert!((got - want).abs() < 0.001, "{got} vs {want}");
        }
    }

    #[test]
    fn trivial_fraction() {
        let mut d = ArchitectureDesign::low_t();
        d.radiator_sides = 1;
        let flux = radiated_flux(celsius_to_kelvin(d.radiator_temp_c), &d.radiator_surface().unwrap()).unwrap();
        d.earth_ir_w_m2 = 0.0;
        d.cell_efficiency = flux / d.solar_flux_w_m2;
        assert!((radiator_area_fraction(&d).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn silicon_columns() {
        let t = table();
        let clocks: Vec<f64> = t.columns.iter().map(|c| c.clock_ghz).collect();
        assert_eq!(clocks, vec![2.6, 2.38, 2.05, 2.05]);
        let norm: Vec<f64> = t.columns.iter().map(|c| c.normalized_power_w_m2).collect();
        for (got, want) in norm.iter().zip([384.0, 408.0, 317.0, 317.0]) {
            assert!((got - want).abs() <= 1.0, "{got} vs {want}");
        }
        assert!(norm[1] > norm[0] && norm[0] > norm[2]);
    }

    #[test]
    fn integrated_cell_temperature() {
        let t = table();
        let iscr = t.columns[0].solar_cell_temp_c.unwrap();
        assert!((iscr - 66.0).abs() < 1.5, "{iscr}");
        assert_eq!(t.columns[1].solar_cell_temp_c, Some(27.0));
    }

    #[test]
    fn single_column_has_no_relative() {
        let t = compare(&[ArchitectureDesign::medium_t()], &OperatingPointTable::baseline()).unwrap();
        assert_eq!(t.columns.len(), 1);
        assert!(t.columns[0].relative_normalized_power.is_none());
        assert!(compare(&[], &OperatingPointTable::baseline()).is_err());
    }

    #[test]
    fn invariants_rejected() {
        let mut d = ArchitectureDesign::high_t();
        d.junction_temp_c = 110.0;
        assert!(d.validate().is_err());
        let mut d = ArchitectureDesign::high_t();
        d.junction_temp_c = 70.0;
        assert!(d.validate().is_err());
    }

    #[test]
    fn outputs_keep_column_order() {
        let t = table();
        let md = t.to_markdown();
        assert!(md.starts_with("| metric | ISCR | Low T radiator |"));
        let csv = t.to_csv().unwrap();
        assert!(!csv.contains('\r'));
        assert_eq!(csv.lines().count(), t.rows().len() + 1);
    }
}
