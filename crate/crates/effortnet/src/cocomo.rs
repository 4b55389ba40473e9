//! Intermediate COCOMO: development modes, the cost-driver multiplier table,
//! the effort adjustment factor, and the per-mode effort equations.
//!
//! Effort is `EAF * a * size^b` man-months, where `(a, b)` depend on the
//! development mode, `size` is in KDSI (thousand delivered source
//! instructions) and EAF is the product of the fifteen cost-driver
//! multipliers.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from the COCOMO effort model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum CocomoError {
    /// The multiplier table has no entry for this driver/level combination.
    #[error("no multiplier is defined for {driver} at level {level}")]
    UndefinedCell { driver: CostDriver, level: RatingLevel },
    #[error("project size must be positive, got {0}")]
    NonPositiveSize(f64),
    #[error("unknown development mode `{0}` (expected organic, semidetached or embedded)")]
    UnknownMode(String),
    #[error("unknown cost driver `{0}`")]
    UnknownDriver(String),
    #[error("unknown rating level `{0}`")]
    UnknownLevel(String),
    #[error("cost driver {0} was rated more than once")]
    DuplicateDriver(CostDriver),
}

/// COCOMO development mode, selecting the `(a, b)` pair of the effort
/// equation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DevelopmentMode {
    Organic,
    SemiDetached,
    Embedded,
}

impl DevelopmentMode {
    pub const ALL: [DevelopmentMode; 3] = [
        DevelopmentMode::Organic,
        DevelopmentMode::SemiDetached,
        DevelopmentMode::Embedded,
    ];

    /// The `(a, b)` coefficient/exponent pair of this mode's effort equation.
    pub fn coefficients(self) -> (f64, f64) {
        match self {
            DevelopmentMode::Organic => (3.2, 1.05),
            DevelopmentMode::SemiDetached => (3.0, 1.12),
            DevelopmentMode::Embedded => (2.8, 1.2),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            DevelopmentMode::Organic => "organic",
            DevelopmentMode::SemiDetached => "semidetached",
            DevelopmentMode::Embedded => "embedded",
        }
    }

    /// Case-insensitive parse; accepts `semi-detached` as well as
    /// `semidetached`.
    pub fn parse(text: &str) -> Result<Self, CocomoError> {
        match text.to_ascii_lowercase().as_str() {
            "organic" => Ok(DevelopmentMode::Organic),
            "semidetached" | "semi-detached" => Ok(DevelopmentMode::SemiDetached),
            "embedded" => Ok(DevelopmentMode::Embedded),
            _ => Err(CocomoError::UnknownMode(text.to_string())),
        }
    }
}

impl fmt::Display for DevelopmentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for DevelopmentMode {
    type Err = CocomoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        DevelopmentMode::parse(s)
    }
}

/// One of the fifteen cost drivers, in multiplier-table row order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CostDriver {
    Rely,
    Data,
    Cplx,
    Time,
    Stor,
    Virt,
    Turn,
    Acap,
    Aexp,
    Pcap,
    Vexp,
    Lexp,
    Modp,
    Tool,
    Sced,
}

impl CostDriver {
    pub const ALL: [CostDriver; 15] = [
        CostDriver::Rely,
        CostDriver::Data,
        CostDriver::Cplx,
        CostDriver::Time,
        CostDriver::Stor,
        CostDriver::Virt,
        CostDriver::Turn,
        CostDriver::Acap,
        CostDriver::Aexp,
        CostDriver::Pcap,
        CostDriver::Vexp,
        CostDriver::Lexp,
        CostDriver::Modp,
        CostDriver::Tool,
        CostDriver::Sced,
    ];

    /// Row index in the multiplier table.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn symbol(self) -> &'static str {
        match self {
            CostDriver::Rely => "RELY",
            CostDriver::Data => "DATA",
            CostDriver::Cplx => "CPLX",
            CostDriver::Time => "TIME",
            CostDriver::Stor => "STOR",
            CostDriver::Virt => "VIRT",
            CostDriver::Turn => "TURN",
            CostDriver::Acap => "ACAP",
            CostDriver::Aexp => "AEXP",
            CostDriver::Pcap => "PCAP",
            CostDriver::Vexp => "VEXP",
            CostDriver::Lexp => "LEXP",
            CostDriver::Modp => "MODP",
            CostDriver::Tool => "TOOL",
            CostDriver::Sced => "SCED",
        }
    }

    pub fn parse(text: &str) -> Result<Self, CocomoError> {
        let upper = text.to_ascii_uppercase();
        CostDriver::ALL
            .into_iter()
            .find(|d| d.symbol() == upper)
            .ok_or_else(|| CocomoError::UnknownDriver(text.to_string()))
    }
}

impl fmt::Display for CostDriver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.symbol())
    }
}

impl std::str::FromStr for CostDriver {
    type Err = CocomoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CostDriver::parse(s)
    }
}

/// Rating level of a cost driver.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RatingLevel {
    VeryLow,
    Low,
    Nominal,
    High,
    VeryHigh,
    ExtraHigh,
}

impl RatingLevel {
    pub const ALL: [RatingLevel; 6] = [
        RatingLevel::VeryLow,
        RatingLevel::Low,
        RatingLevel::Nominal,
        RatingLevel::High,
        RatingLevel::VeryHigh,
        RatingLevel::ExtraHigh,
    ];

    /// Column index in the multiplier table.
    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            RatingLevel::VeryLow => "very_low",
            RatingLevel::Low => "low",
            RatingLevel::Nominal => "nominal",
            RatingLevel::High => "high",
            RatingLevel::VeryHigh => "very_high",
            RatingLevel::ExtraHigh => "extra_high",
        }
    }

    /// Case-insensitive parse, ignoring `_`, `-` and spaces, so `VeryLow`,
    /// `very_low` and `very low` all work.
    pub fn parse(text: &str) -> Result<Self, CocomoError> {
        let squashed: String = text
            .chars()
            .filter(|c| !matches!(c, '_' | '-' | ' '))
            .collect::<String>()
            .to_ascii_lowercase();
        let level = match squashed.as_str() {
            "verylow" | "vl" => RatingLevel::VeryLow,
            "low" | "l" => RatingLevel::Low,
            "nominal" | "n" => RatingLevel::Nominal,
            "high" | "h" => RatingLevel::High,
            "veryhigh" | "vh" => RatingLevel::VeryHigh,
            "extrahigh" | "xh" => RatingLevel::ExtraHigh,
            _ => return Err(CocomoError::UnknownLevel(text.to_string())),
        };
        Ok(level)
    }
}

impl fmt::Display for RatingLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for RatingLevel {
    type Err = CocomoError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        RatingLevel::parse(s)
    }
}

/// The 15 x 6 multiplier table. `None` marks combinations the model does not
/// define; those are hard errors, never interpolated.
const MULTIPLIER_TABLE: [[Option<f64>; 6]; 15] = [
    // RELY
    [Some(0.75), Some(0.88), Some(1.00), Some(1.15), Some(1.40), None],
    // DATA
    [None, Some(0.94), Some(1.00), Some(1.08), Some(1.16), None],
    // CPLX
    [Some(0.70), Some(0.85), Some(1.00), Some(1.15), Some(1.30), Some(1.65)],
    // TIME
    [None, None, Some(1.00), Some(1.11), Some(1.30), Some(1.66)],
    // STOR
    [None, None, Some(1.00), Some(1.06), Some(1.21), Some(1.56)],
    // VIRT
    [None, Some(0.87), Some(1.00), Some(1.15), Some(1.30), None],
    // TURN
    [None, Some(0.87), Some(1.00), Some(1.07), Some(1.15), None],
    // ACAP
    [None, Some(0.87), Some(1.00), Some(1.07), Some(1.15), None],
    // AEXP
    [Some(1.29), Some(1.13), Some(1.00), Some(0.91), Some(0.82), None],
    // PCAP
    [Some(1.42), Some(1.17), Some(1.00), Some(0.86), Some(0.70), None],
    // VEXP
    [Some(1.21), Some(1.10), Some(1.00), Some(0.90), None, None],
    // LEXP
    [Some(1.14), Some(1.07), Some(1.00), Some(0.95), None, None],
    // MODP
    [Some(1.24), Some(1.10), Some(1.00), Some(0.91), Some(0.82), None],
    // TOOL
    [Some(1.24), Some(1.10), Some(1.00), Some(0.91), Some(0.83), None],
    // SCED
    [Some(1.23), Some(1.08), Some(1.00), Some(1.04), Some(1.10), None],
];

/// Look up the multiplier for a driver at a rating level.
///
/// Returns [`CocomoError::UndefinedCell`] where the table has no entry
/// (for example TIME at `very_low`).
pub fn lookup_multiplier(driver: CostDriver, level: RatingLevel) -> Result<f64, CocomoError> {
    MULTIPLIER_TABLE[driver.index()][level.index()]
        .ok_or(CocomoError::UndefinedCell { driver, level })
}

/// A complete assignment of a rating level to each of the fifteen drivers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatingSet {
    levels: [RatingLevel; 15],
}

impl RatingSet {
    /// Every driver at `nominal`; the resulting EAF is exactly 1.
    pub fn all_nominal() -> Self {
        RatingSet { levels: [RatingLevel::Nominal; 15] }
    }

    /// Start from all-nominal and apply the given `(driver, level)` pairs.
    /// Rating the same driver twice is an error.
    pub fn from_pairs(pairs: &[(CostDriver, RatingLevel)]) -> Result<Self, CocomoError> {
        let mut set = RatingSet::all_nominal();
        let mut seen = [false; 15];
        for &(driver, level) in pairs {
            if seen[driver.index()] {
                return Err(CocomoError::DuplicateDriver(driver));
            }
            seen[driver.index()] = true;
            set.levels[driver.index()] = level;
        }
        Ok(set)
    }

    pub fn level(&self, driver: CostDriver) -> RatingLevel {
        self.levels[driver.index()]
    }

    pub fn set(&mut self, driver: CostDriver, level: RatingLevel) {
        self.levels[driver.index()] = level;
    }
}

impl Default for RatingSet {
    fn default() -> Self {
        RatingSet::all_nominal()
    }
}

/// Effort adjustment factor: the product of the fifteen multipliers for a
/// complete rating assignment.
pub fn compute_eaf(ratings: &RatingSet) -> Result<f64, CocomoError> {
    let mut product = 1.0;
    for driver in CostDriver::ALL {
        product *= lookup_multiplier(driver, ratings.level(driver))?;
    }
    Ok(product)
}

/// EAF from direct numeric multipliers, as stored in most project data
/// files. Values need not appear in the symbolic table.
pub fn eaf_from_multipliers(multipliers: &[f64; 15]) -> f64 {
    multipliers.iter().product()
}

/// Driver information for one project: either symbolic ratings or the
/// numeric multipliers a data file carries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DriverValues {
    Ratings(RatingSet),
    Multipliers([f64; 15]),
}

impl DriverValues {
    pub fn eaf(&self) -> Result<f64, CocomoError> {
        match self {
            DriverValues::Ratings(r) => compute_eaf(r),
            DriverValues::Multipliers(m) => Ok(eaf_from_multipliers(m)),
        }
    }
}

/// Inputs to one Intermediate COCOMO estimate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CocomoInput {
    pub mode: DevelopmentMode,
    /// Project size in KDSI; must be positive.
    pub size: f64,
    pub drivers: DriverValues,
}

/// Effort in man-months for a known EAF: `eaf * a * size^b`.
pub fn effort_from_eaf(mode: DevelopmentMode, size: f64, eaf: f64) -> Result<f64, CocomoError> {
    if size <= 0.0 || size.is_nan() {
        return Err(CocomoError::NonPositiveSize(size));
    }
    let (a, b) = mode.coefficients();
    Ok(eaf * a * size.powf(b))
}

/// Intermediate COCOMO estimate for a full input description.
pub fn estimate_effort(input: &CocomoInput) -> Result<f64, CocomoError> {
    let eaf = input.drivers.eaf()?;
    effort_from_eaf(input.mode, input.size, eaf)
}
