//! Junction temperature, supply voltage, clock and energy-per-token data for
//! the compute ICs, plus the token-normalized power figure of merit.
//!
//! The operating points are reference data extrapolated from a single 45 °C
//! liquid-cooled 3 nm GPU, not a physical model. Dynamic energy follows a
//! per-flavor effective capacitance, `E = C·V²`.

use thiserror::Error;

/// Reference energy per token used to normalize compute power (45 °C baseline).
pub const REFERENCE_ENERGY_J: f64 = 0.213;

/// Supply voltages accepted by [`dynamic_energy`].
const VDD_RANGE_V: (f64, f64) = (0.0, 1.0);
/// Supply voltages accepted for a full operating point, exclusive bounds.
const OPERATING_VDD_V: (f64, f64) = (0.5, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SiliconError {
    #[error("supply voltage {0} V is outside the valid range")]
    VddOutOfRange(f64),
    #[error("coolant temperature {0} °C is outside the table range [{1}, {2}] °C")]
    CoolantOutOfRange(f64, f64, f64),
    #[error("energy per token must be positive, got {0} J")]
    NonPositiveEnergy(f64),
    #[error("invalid operating point: {0}")]
    InvalidPoint(String),
    #[error("invalid operating point table: {0}")]
    InvalidTable(String),
    #[error("unknown transistor flavor `{0}`")]
    UnknownFlavor(String),
    #[error("unknown cooling technology `{0}`")]
    UnknownCooling(String),
}

/// N3P threshold-voltage flavor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum VthFlavor {
    Ulvt,
    Lvt,
    Svt,
    Hvt,
}

impl VthFlavor {
    pub const ALL: [VthFlavor; 4] = [VthFlavor::Ulvt, VthFlavor::Lvt, VthFlavor::Svt, VthFlavor::Hvt];

    /// The table row each flavor's capacitance is fitted to: `(vdd, dynamic energy)`.
    pub fn anchor(self) -> (f64, f64) {
        match self {
            VthFlavor::Ulvt => (0.64, 0.138),
            VthFlavor::Lvt => (0.74, 0.170),
            VthFlavor::Svt => (0.82, 0.195),
            VthFlavor::Hvt => (0.85, 0.209),
        }
    }

    /// Effective switched capacitance per token [J/V²].
    pub fn effective_capacitance(self) -> f64 {
        let (vdd, energy) = self.anchor();
        energy / (vdd * vdd)
    }

    pub fn key(self) -> &'static str {
        match self {
            VthFlavor::Ulvt => "ULVT",
            VthFlavor::Lvt => "LVT",
            VthFlavor::Svt => "SVT",
            VthFlavor::Hvt => "HVT",
        }
    }

    pub fn from_key(key: &str) -> Result<Self, SiliconError> {
        Self::ALL
            .into_iter()
            .find(|f| f.key().eq_ignore_ascii_case(key))
            .ok_or_else(|| SiliconError::UnknownFlavor(key.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CoolingTechnology {
    VaporChamber,
    Liquid,
    HighPerformance,
}

impl CoolingTechnology {
    pub fn key(self) -> &'static str {
        match self {
            CoolingTechnology::VaporChamber => "vapor_chamber",
            CoolingTechnology::Liquid => "liquid",
            CoolingTechnology::HighPerformance => "high_performance",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            CoolingTechnology::VaporChamber => "vapor chamber",
            CoolingTechnology::Liquid => "liquid",
            CoolingTechnology::HighPerformance => "high performance",
        }
    }

    pub fn from_key(key: &str) -> Result<Self, SiliconError> {
        [Self::VaporChamber, Self::Liquid, Self::HighPerformance]
            .into_iter()
            .find(|c| c.key() == key)
            .ok_or_else(|| SiliconError::UnknownCooling(key.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiliconOperatingPoint {
    pub coolant_temp_c: f64,
    pub junction_temp_c: f64,
    pub cooling: CoolingTechnology,
    pub flavor: VthFlavor,
    pub vdd_v: f64,
    pub clock_ghz: f64,
    pub e_dynamic_j: f64,
    pub e_static_j: f64,
}

impl SiliconOperatingPoint {
    pub fn validate(&self) -> Result<(), SiliconError> {
        let bad = |msg: String| Err(SiliconError::InvalidPoint(msg));
        if !(self.junction_temp_c > self.coolant_temp_c) {
            return bad(format!(
                "junction {} °C must be above coolant {} °C",
                self.junction_temp_c, self.coolant_temp_c
            ));
        }
        if !(self.e_dynamic_j > 0.0) {
            return bad(format!("dynamic energy must be positive, got {}", self.e_dynamic_j));
        }
        if !(self.e_static_j >= 0.0) {
            return bad(format!("static energy must be non-negative, got {}", self.e_static_j));
        }
        if !(self.vdd_v > OPERATING_VDD_V.0 && self.vdd_v < OPERATING_VDD_V.1) {
            return Err(SiliconError::VddOutOfRange(self.vdd_v));
        }
        if !(self.clock_ghz > 0.0) {
            return bad(format!("clock must be positive, got {}", self.clock_ghz));
        }
        Ok(())
    }
}

pub fn total_energy_per_token(p: &SiliconOperatingPoint) -> f64 {
    p.e_dynamic_j + p.e_static_j
}

/// `C(flavor)·V²`.
pub fn dynamic_energy(flavor: VthFlavor, vdd_v: f64) -> Result<f64, SiliconError> {
    if !(vdd_v >= VDD_RANGE_V.0 && vdd_v <= VDD_RANGE_V.1) {
        return Err(SiliconError::VddOutOfRange(vdd_v));
    }
    Ok(flavor.effective_capacitance() * vdd_v * vdd_v)
}

/// Compute power scaled to the energy efficiency of the reference point.
pub fn token_normalized_power(p_compute_w_m2: f64, energy_j: f64, reference_j: f64) -> Result<f64, SiliconError> {
    if !(energy_j > 0.0) {
        return Err(SiliconError::NonPositiveEnergy(energy_j));
    }
    if !(reference_j > 0.0) {
        return Err(SiliconError::NonPositiveEnergy(reference_j));
    }
    Ok(p_compute_w_m2 * reference_j / energy_j)
}

/// Static energy as a fraction of dynamic energy.
pub fn leakage_fraction(p: &SiliconOperatingPoint) -> f64 {
    p.e_static_j / p.e_dynamic_j
}

/// Operating points ordered by coolant temperature.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatingPointTable {
    rows: Vec<SiliconOperatingPoint>,
    /// At 25 °C both an ULVT and an LVT row exist; this picks ULVT.
    pub prefer_ulvt_at_25: bool,
}

impl Default for OperatingPointTable {
    fn default() -> Self {
        Self::baseline()
    }
}

impl OperatingPointTable {
    pub fn baseline() -> Self {
        use CoolingTechnology::*;
        use VthFlavor::*;
        let row = |coolant, junction, cooling, flavor, vdd, clock, dynamic, stat| SiliconOperatingPoint {
            coolant_temp_c: coolant,
            junction_temp_c: junction,
            cooling,
            flavor,
            vdd_v: vdd,
            clock_ghz: clock,
            e_dynamic_j: dynamic,
            e_static_j: stat,
        };
        Self {
            rows: vec![
                row(25.0, 31.0, VaporChamber, Ulvt, 0.64, 2.78, 0.138, 0.032),
                row(25.0, 31.0, VaporChamber, Lvt, 0.69, 2.72, 0.149, 0.022),
                row(35.0, 41.0, VaporChamber, Lvt, 0.74, 2.6, 0.170, 0.034),
                row(45.0, 87.5, Liquid, Svt, 0.82, 2.38, 0.195, 0.018),
                row(60.0, 104.0, Liquid, Hvt, 0.85, 2.05, 0.209, 0.065),
                row(85.0, 105.0, Liquid, Hvt, 0.88, 1.35, 0.224, 0.098),
            ],
            prefer_ulvt_at_25: true,
        }
    }

    /// Builds a table from arbitrary rows; rows are sorted by coolant temperature.
    pub fn from_rows(mut rows: Vec<SiliconOperatingPoint>) -> Result<Self, SiliconError> {
        rows.sort_by(|a, b| {
            a.coolant_temp_c
                .total_cmp(&b.coolant_temp_c)
                .then(a.vdd_v.total_cmp(&b.vdd_v))
        });
        let table = Self {
            rows,
            prefer_ulvt_at_25: true,
        };
        table.validate()?;
        Ok(table)
    }

    /// Replaces the row with the same coolant temperature and flavor, or inserts it.
    pub fn with_override(&self, row: SiliconOperatingPoint) -> Result<Self, SiliconError> {
        let mut rows: Vec<_> = self
            .rows
            .iter()
            .copied()
            .filter(|r| !(r.coolant_temp_c == row.coolant_temp_c && r.flavor == row.flavor))
            .collect();
        rows.push(row);
        let mut table = Self::from_rows(rows)?;
        table.prefer_ulvt_at_25 = self.prefer_ulvt_at_25;
        Ok(table)
    }

    pub fn rows(&self) -> &[SiliconOperatingPoint] {
        &self.rows
    }

    pub fn validate(&self) -> Result<(), SiliconError> {
        if self.rows.is_empty() {
            return Err(SiliconError::InvalidTable("table is empty".into()));
        }
        for r in &self.rows {
            r.validate()?;
        }
        for w in self.rows.windows(2) {
            if w[1].coolant_temp_c < w[0].coolant_temp_c {
                return Err(SiliconError::InvalidTable("rows must be sorted by coolant temperature".into()));
            }
            if w[1].clock_ghz > w[0].clock_ghz {
                return Err(SiliconError::InvalidTable(format!(
                    "clock rises from {} to {} GHz between {} and {} °C",
                    w[0].clock_ghz, w[1].clock_ghz, w[0].coolant_temp_c, w[1].coolant_temp_c
                )));
            }
        }
        Ok(())
    }

    pub fn range_c(&self) -> (f64, f64) {
        (self.rows[0].coolant_temp_c, self.rows[self.rows.len() - 1].coolant_temp_c)
    }

    /// Nearest row by coolant temperature; ties go to the cooler row.
    pub fn select(&self, coolant_temp_c: f64) -> Result<SiliconOperatingPoint, SiliconError> {
        let (lo, hi) = self.range_c();
        if !(coolant_temp_c >= lo && coolant_temp_c <= hi) {
            return Err(SiliconError::CoolantOutOfRange(coolant_temp_c, lo, hi));
        }
        let mut best: Option<(f64, f64)> = None;
        for r in &self.rows {
            let d = (r.coolant_temp_c - coolant_temp_c).abs();
            match best {
                Some((bd, _)) if d >= bd => {}
                _ => best = Some((d, r.coolant_temp_c)),
            }
        }
        let (_, temp) = best.expect("table is non-empty");
        let candidates: Vec<_> = self.rows.iter().filter(|r| r.coolant_temp_c == temp).collect();
        let pick = if candidates.len() > 1 {
            let want = if self.prefer_ulvt_at_25 { VthFlavor::Ulvt } else { VthFlavor::Lvt };
            candidates
                .iter()
                .find(|r| r.flavor == want)
                .copied()
                .unwrap_or(candidates[0])
        } else {
            candidates[0]
        };
        Ok(*pick)
    }
}

/// Nearest baseline row for `coolant_temp_c`.
pub fn select_operating_point(coolant_temp_c: f64) -> Result<SiliconOperatingPoint, SiliconError> {
    OperatingPointTable::baseline().select(coolant_temp_c)
}
