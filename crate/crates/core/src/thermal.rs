//! Radiative equilibrium of the panel front (solar) and back (radiator) faces.
//!
//! The front face absorbs sunlight, converts part of it to electricity and
//! re-radiates the rest. All electrical power is dissipated by the compute
//! module and leaves through the back face together with the absorbed Earth IR
//! and whatever leaks across the insulating gap.

use thiserror::Error;

/// Stefan-Boltzmann constant [W/(m²·K⁴)].
pub const STEFAN_BOLTZMANN: f64 = 5.670374419e-8;

/// Solar constant at 1 AU [W/m²].
pub const SOLAR_CONSTANT_W_M2: f64 = 1361.0;

/// Offset between the Celsius and Kelvin scales.
pub const CELSIUS_OFFSET: f64 = 273.15;

/// Default front-face absorptivity. Fitted so the deep-space front face of an
/// insulated GaAs panel sits at 84.3 °C.
pub const DEFAULT_ABSORPTIVITY: f64 = 0.895;

/// Convergence tolerance of the front-face fixed point [K].
pub const FRONT_TOLERANCE_K: f64 = 0.01;
/// Iteration cap of the front-face fixed point.
pub const FRONT_MAX_ITERATIONS: usize = 1000;
/// Damping factor of the front-face fixed point.
pub const FRONT_DAMPING: f64 = 0.5;

/// Absorbed Earth IR versus altitude, `(altitude_km, load_w_m2)`, sorted by altitude.
const EARTH_IR_ANCHORS: [(f64, f64); 3] = [(600.0, 34.0), (1000.0, 24.0), (2000.0, 14.0)];

pub fn celsius_to_kelvin(t_c: f64) -> f64 {
    t_c + CELSIUS_OFFSET
}

pub fn kelvin_to_celsius(t_k: f64) -> f64 {
    t_k - CELSIUS_OFFSET
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ThermalError {
    #[error("temperature must be non-negative, got {0} K")]
    NegativeTemperature(f64),
    #[error("radiated load must be non-negative, got {0} W/m²")]
    NegativeLoad(f64),
    #[error("altitude must be positive, got {0} km")]
    InvalidAltitude(f64),
    #[error("emissivity must be in (0, 1], got {0}")]
    InvalidEmissivity(f64),
    #[error("radiator sides must be 1 or 2, got {0}")]
    InvalidSides(u8),
    #[error("invalid solar cell curve: {0}")]
    InvalidCurve(String),
    #[error("invalid thermal configuration: {0}")]
    InvalidConfig(String),
    #[error("front face did not converge after {iterations} iterations (last iterate {last_t_k:.3} K)")]
    NoConvergence { iterations: usize, last_t_k: f64 },
}

/// A radiating face: emissivity and the number of sides that see cold space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadiatorSurface {
    emissivity: f64,
    sides: u8,
}

impl RadiatorSurface {
    pub fn new(emissivity: f64, sides: u8) -> Result<Self, ThermalError> {
        if !(emissivity > 0.0 && emissivity <= 1.0) {
            return Err(ThermalError::InvalidEmissivity(emissivity));
        }
        if sides != 1 && sides != 2 {
            return Err(ThermalError::InvalidSides(sides));
        }
        Ok(Self { emissivity, sides })
    }

    pub fn one_sided(emissivity: f64) -> Result<Self, ThermalError> {
        Self::new(emissivity, 1)
    }

    pub fn emissivity(&self) -> f64 {
        self.emissivity
    }

    pub fn sides(&self) -> u8 {
        self.sides
    }
}

/// Emitted flux per unit panel area, `sides · ε · σ · T⁴`.
pub fn radiated_flux(t_k: f64, surface: &RadiatorSurface) -> Result<f64, ThermalError> {
    if t_k < 0.0 || t_k.is_nan() {
        return Err(ThermalError::NegativeTemperature(t_k));
    }
    Ok(f64::from(surface.sides) * surface.emissivity * STEFAN_BOLTZMANN * t_k.powi(4))
}

/// Temperature at which `surface` radiates exactly `load_w_m2`.
pub fn equilibrium_temperature(load_w_m2: f64, surface: &RadiatorSurface) -> Result<f64, ThermalError> {
    if load_w_m2 < 0.0 || load_w_m2.is_nan() {
        return Err(ThermalError::NegativeLoad(load_w_m2));
    }
    let denom = f64::from(surface.sides) * surface.emissivity * STEFAN_BOLTZMANN;
    Ok((load_w_m2 / denom).powf(0.25))
}

/// Earth IR absorbed per unit area at the given altitude. `None` is deep space.
///
/// Piecewise linear between the 600/1000/2000 km anchors and clamped outside.
pub fn earth_ir_back_load(altitude_km: Option<f64>) -> Result<f64, ThermalError> {
    let Some(alt) = altitude_km else {
        return Ok(0.0);
    };
    if !(alt > 0.0) {
        return Err(ThermalError::InvalidAltitude(alt));
    }
    let (first, last) = (EARTH_IR_ANCHORS[0], EARTH_IR_ANCHORS[EARTH_IR_ANCHORS.len() - 1]);
    if alt <= first.0 {
        return Ok(first.1);
    }
    if alt >= last.0 {
        return Ok(last.1);
    }
    let seg = EARTH_IR_ANCHORS
        .windows(2)
        .find(|w| alt <= w[1].0)
        .expect("altitude is inside the anchor range");
    let (x0, y0) = seg[0];
    let (x1, y1) = seg[1];
    Ok(y0 + (y1 - y0) * (alt - x0) / (x1 - x0))
}

/// Where the panel flies and how much sunlight and Earth IR it receives.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitEnvironment {
    pub label: String,
    pub solar_flux_w_m2: f64,
    pub earth_ir_back_w_m2: f64,
    /// Earth IR absorbed by the front face. In a dawn-dusk orbit the array is
    /// edge-on to Earth, so both faces see it alike.
    pub earth_ir_front_w_m2: f64,
    pub altitude_km: Option<f64>,
}

impl OrbitEnvironment {
    pub fn deep_space() -> Self {
        Self {
            label: "Deep space (L5)".to_string(),
            solar_flux_w_m2: SOLAR_CONSTANT_W_M2,
            earth_ir_back_w_m2: 0.0,
            earth_ir_front_w_m2: 0.0,
            altitude_km: None,
        }
    }

    /// Dawn-dusk SSO at `altitude_km`, both faces loaded with the calibrated IR.
    pub fn sso(altitude_km: f64) -> Result<Self, ThermalError> {
        let ir = earth_ir_back_load(Some(altitude_km))?;
        Ok(Self {
            label: format!("SSO ({altitude_km} km)"),
            solar_flux_w_m2: SOLAR_CONSTANT_W_M2,
            earth_ir_back_w_m2: ir,
            earth_ir_front_w_m2: ir,
            altitude_km: Some(altitude_km),
        })
    }

    pub fn from_altitude(altitude_km: Option<f64>) -> Result<Self, ThermalError> {
        match altitude_km {
            None => Ok(Self::deep_space()),
            Some(alt) => Self::sso(alt),
        }
    }

    pub fn validate(&self) -> Result<(), ThermalError> {
        if !(self.solar_flux_w_m2 > 0.0) {
            return Err(ThermalError::InvalidConfig(format!(
                "solar flux must be positive, got {}",
                self.solar_flux_w_m2
            )));
        }
        if self.earth_ir_back_w_m2 < 0.0 || self.earth_ir_front_w_m2 < 0.0 {
            return Err(ThermalError::InvalidConfig("Earth IR load must be non-negative".into()));
        }
        match self.altitude_km {
            None if self.earth_ir_back_w_m2 != 0.0 || self.earth_ir_front_w_m2 != 0.0 => Err(
                ThermalError::InvalidConfig("deep space has no Earth IR load".into()),
            ),
            Some(alt) if !(alt > 0.0) => Err(ThermalError::InvalidAltitude(alt)),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CellTechnology {
    PerovskiteSiTandem,
    CrystallineSi90um,
    ThinFilmASi,
    TripleJunctionGaAs,
}

impl CellTechnology {
    pub const ALL: [CellTechnology; 4] = [
        CellTechnology::PerovskiteSiTandem,
        CellTechnology::CrystallineSi90um,
        CellTechnology::ThinFilmASi,
        CellTechnology::TripleJunctionGaAs,
    ];

    pub fn key(self) -> &'static str {
        match self {
            CellTechnology::PerovskiteSiTandem => "perovskite_si_tandem",
            CellTechnology::CrystallineSi90um => "crystalline_si_90um",
            CellTechnology::ThinFilmASi => "thin_film_a_si",
            CellTechnology::TripleJunctionGaAs => "triple_junction_gaas",
        }
    }

    pub fn from_key(key: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|t| t.key() == key)
    }

    /// Reference efficiency points `(°C, fraction)` for the technology.
    fn reference_points(self) -> Vec<(f64, f64)> {
        match self {
            CellTechnology::PerovskiteSiTandem => vec![(25.0, 0.30), (85.0, 0.254)],
            CellTechnology::CrystallineSi90um => vec![(25.0, 0.20), (85.0, 0.155)],
            CellTechnology::ThinFilmASi => vec![(25.0, 0.14), (85.0, 0.119)],
            // iROSA cells: 30.7 % at 32 °C, about 27 % at 87 °C.
            CellTechnology::TripleJunctionGaAs => vec![(32.0, 0.307), (87.0, 0.27)],
        }
    }
}

/// Cell efficiency versus cell temperature, piecewise linear.
#[derive(Debug, Clone, PartialEq)]
pub struct SolarCellCurve {
    technology: CellTechnology,
    points: Vec<(f64, f64)>,
}

impl SolarCellCurve {
    pub fn new(technology: CellTechnology, points: Vec<(f64, f64)>) -> Result<Self, ThermalError> {
        if points.len() < 2 {
            return Err(ThermalError::InvalidCurve(format!(
                "need at least 2 reference points, got {}",
                points.len()
            )));
        }
        for &(t, eta) in &points {
            if !t.is_finite() || !(eta > 0.0 && eta < 1.0) {
                return Err(ThermalError::InvalidCurve(format!(
                    "efficiency {eta} at {t} °C is outside (0, 1)"
                )));
            }
        }
        for w in points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(ThermalError::InvalidCurve("temperatures must be strictly increasing".into()));
            }
            if w[1].1 > w[0].1 {
                return Err(ThermalError::InvalidCurve("efficiency must not rise with temperature".into()));
            }
        }
        Ok(Self { technology, points })
    }

    pub fn standard(technology: CellTechnology) -> Self {
        Self::new(technology, technology.reference_points()).expect("built-in curves are valid")
    }

    /// A flat curve, used where a fixed efficiency is assumed.
    pub fn constant(technology: CellTechnology, efficiency: f64) -> Result<Self, ThermalError> {
        Self::new(technology, vec![(25.0, efficiency), (85.0, efficiency)])
    }

    pub fn technology(&self) -> CellTechnology {
        self.technology
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }
}

/// Efficiency at `t_cell_c`, clamped to the end points outside the curve's range.
pub fn cell_efficiency(curve: &SolarCellCurve, t_cell_c: f64) -> Result<f64, ThermalError> {
    let pts = curve.points();
    let (Some(first), Some(last)) = (pts.first(), pts.last()) else {
        return Err(ThermalError::InvalidCurve("empty curve".into()));
    };
    if t_cell_c <= first.0 {
        return Ok(first.1);
    }
    if t_cell_c >= last.0 {
        return Ok(last.1);
    }
    let seg = pts.windows(2).find(|w| t_cell_c <= w[1].0).expect("inside the curve range");
    let (x0, y0) = seg[0];
    let (x1, y1) = seg[1];
    Ok(y0 + (y1 - y0) * (t_cell_c - x0) / (x1 - x0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct PanelThermalConfig {
    pub absorptivity: f64,
    pub cell_curve: SolarCellCurve,
    pub front: RadiatorSurface,
    pub back: RadiatorSurface,
    /// Heat conducted from the cells across the gap to the back face [W/m²].
    pub gap_leak_w_m2: f64,
}

impl PanelThermalConfig {
    pub fn validate(&self) -> Result<(), ThermalError> {
        if !(self.absorptivity > 0.0 && self.absorptivity <= 1.0) {
            return Err(ThermalError::InvalidConfig(format!(
                "absorptivity must be in (0, 1], got {}",
                self.absorptivity
            )));
        }
        if !(self.gap_leak_w_m2 >= 0.0) {
            return Err(ThermalError::InvalidConfig(format!(
                "gap leak must be non-negative, got {}",
                self.gap_leak_w_m2
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrontFace {
    pub t_front_k: f64,
    pub p_electric_w_m2: f64,
    pub iterations: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PanelThermalState {
    pub t_front_k: f64,
    pub t_back_k: f64,
    pub p_electric_w_m2: f64,
    pub p_front_radiated_w_m2: f64,
    pub p_back_radiated_w_m2: f64,
}

impl PanelThermalState {
    pub fn t_front_c(&self) -> f64 {
        kelvin_to_celsius(self.t_front_k)
    }

    pub fn t_back_c(&self) -> f64 {
        kelvin_to_celsius(self.t_back_k)
    }
}

/// Net load the front face must radiate when the cells run at `t_k`.
fn front_load(config: &PanelThermalConfig, env: &OrbitEnvironment, t_k: f64) -> Result<(f64, f64), ThermalError> {
    let s = env.solar_flux_w_m2;
    let eta = cell_efficiency(&config.cell_curve, kelvin_to_celsius(t_k))?;
    let p_electric = eta * s;
    let load = config.absorptivity * s - p_electric - config.gap_leak_w_m2 + env.earth_ir_front_w_m2;
    if load < -1e-9 {
        return Err(ThermalError::InvalidConfig(format!(
            "front face has a negative net load ({load:.3} W/m²): electrical output and gap leak exceed absorbed power"
        )));
    }
    Ok((load.max(0.0), p_electric))
}

/// Front-face temperature and electrical output, starting the iteration at 300 K.
pub fn solve_front_face(config: &PanelThermalConfig, env: &OrbitEnvironment) -> Result<FrontFace, ThermalError> {
    solve_front_face_from(config, env, 300.0)
}

/// Damped fixed point `T ← (1−λ)T + λ·T_implied(T)`, stopping once the implied
/// temperature is within tolerance of the current iterate.
pub fn solve_front_face_from(
    config: &PanelThermalConfig,
    env: &OrbitEnvironment,
    t_start_k: f64,
) -> Result<FrontFace, ThermalError> {
    config.validate()?;
    env.validate()?;
    let mut t = t_start_k.max(0.0);
    for iteration in 1..=FRONT_MAX_ITERATIONS {
        let (load, _) = front_load(config, env, t)?;
        let implied = equilibrium_temperature(load, &config.front)?;
        if (implied - t).abs() < FRONT_TOLERANCE_K {
            let (_, p_electric) = front_load(config, env, implied)?;
            return Ok(FrontFace {
                t_front_k: implied,
                p_electric_w_m2: p_electric,
                iterations: iteration,
            });
        }
        t = (1.0 - FRONT_DAMPING) * t + FRONT_DAMPING * implied;
    }
    Err(ThermalError::NoConvergence {
        iterations: FRONT_MAX_ITERATIONS,
        last_t_k: t,
    })
}

/// Solves both faces. The back face carries the full electrical output (the
/// compute load), the absorbed Earth IR and the gap leak.
pub fn solve_panel_equilibrium(
    config: &PanelThermalConfig,
    env: &OrbitEnvironment,
) -> Result<PanelThermalState, ThermalError> {
    let front = solve_front_face(config, env)?;
    let back_load = front.p_electric_w_m2 + env.earth_ir_back_w_m2 + config.gap_leak_w_m2;
    let t_back = equilibrium_temperature(back_load, &config.back)?;
    Ok(PanelThermalState {
        t_front_k: front.t_front_k,
        t_back_k: t_back,
        p_electric_w_m2: front.p_electric_w_m2,
        p_front_radiated_w_m2: radiated_flux(front.t_front_k, &config.front)?,
        p_back_radiated_w_m2: radiated_flux(t_back, &config.back)?,
    })
}

/// `radiated(front) + radiated(back) − (absorbed solar + Earth IR on both faces)`.
///
/// Electrical output does not appear: it is dissipated on the panel and leaves
/// through the back face.
pub fn energy_closure_residual(state: &PanelThermalState, config: &PanelThermalConfig, env: &OrbitEnvironment) -> f64 {
    let absorbed = config.absorptivity * env.solar_flux_w_m2 + env.earth_ir_front_w_m2 + env.earth_ir_back_w_m2;
    state.p_front_radiated_w_m2 + state.p_back_radiated_w_m2 - absorbed
}
