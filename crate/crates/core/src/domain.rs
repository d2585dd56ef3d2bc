//! Operators, intervals, unit conventions and boundary conditions.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Configuration space of the particle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Interval {
    FullLine,
    /// `[a, +inf)`
    HalfLine { a: f64 },
    /// `[a, b]` with `a < b`
    Finite { a: f64, b: f64 },
}

impl Interval {
    pub fn finite(a: f64, b: f64) -> Result<Self> {
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "interval endpoints must be finite, got [{a}, {b}]"
            )));
        }
        if a >= b {
            return Err(Error::InvalidParameter(format!(
                "finite interval needs a < b, got [{a}, {b}]"
            )));
        }
        Ok(Interval::Finite { a, b })
    }

    pub fn half_line(a: f64) -> Result<Self> {
        if !a.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "half-line endpoint must be finite, got {a}"
            )));
        }
        Ok(Interval::HalfLine { a })
    }

    pub fn unit() -> Self {
        Interval::Finite { a: 0.0, b: 1.0 }
    }

    pub fn positive_half_line() -> Self {
        Interval::HalfLine { a: 0.0 }
    }

    /// Left endpoint, if there is one.
    pub fn start(&self) -> Option<f64> {
        match *self {
            Interval::FullLine => None,
            Interval::HalfLine { a } | Interval::Finite { a, .. } => Some(a),
        }
    }

    pub fn end(&self) -> Option<f64> {
        match *self {
            Interval::Finite { b, .. } => Some(b),
            _ => None,
        }
    }

    pub fn length(&self) -> Option<f64> {
        match *self {
            Interval::Finite { a, b } => Some(b - a),
            _ => None,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Interval::FullLine => "full_line",
            Interval::HalfLine { .. } => "half_line",
            Interval::Finite { .. } => "finite",
        }
    }
}

impl FromStr for Interval {
    type Err = Error;

    /// Accepts `a,b`, `a,inf` and `-inf,inf` (also `R`, `R+`).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "R" | "full" | "full_line" => return Ok(Interval::FullLine),
            "R+" | "half" | "half_line" => return Ok(Interval::positive_half_line()),
            _ => {}
        }
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        if parts.len() != 2 {
            return Err(Error::InvalidParameter(format!("cannot parse interval '{s}'")));
        }
        let parse = |p: &str| -> Result<f64> {
            match p {
                "inf" | "+inf" | "infinity" => Ok(f64::INFINITY),
                "-inf" | "-infinity" => Ok(f64::NEG_INFINITY),
                _ => p
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidParameter(format!("bad interval endpoint '{p}'"))),
            }
        };
        let (a, b) = (parse(parts[0])?, parse(parts[1])?);
        match (a.is_finite(), b.is_finite()) {
            (true, true) => Interval::finite(a, b),
            (true, false) if b > 0.0 => Interval::half_line(a),
            (false, false) if a < 0.0 && b > 0.0 => Ok(Interval::FullLine),
            _ => Err(Error::InvalidParameter(format!("unsupported interval '{s}'"))),
        }
    }
}

/// Physical units. The defaults `hbar = 1`, `2m = 1` make `H = -d^2/dx^2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UnitSystem {
    pub hbar: f64,
    pub two_m: f64,
}

impl Default for UnitSystem {
    fn default() -> Self {
        UnitSystem { hbar: 1.0, two_m: 1.0 }
    }
}

impl UnitSystem {
    pub fn new(hbar: f64, two_m: f64) -> Result<Self> {
        if !(hbar > 0.0 && hbar.is_finite()) || !(two_m > 0.0 && two_m.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "units need hbar > 0 and two_m > 0, got hbar={hbar}, two_m={two_m}"
            )));
        }
        Ok(UnitSystem { hbar, two_m })
    }

    /// Factor converting a natural-unit energy (`-d^2/dx^2` eigenvalue) to these units.
    pub fn energy_scale(&self) -> f64 {
        self.hbar * self.hbar / self.two_m
    }

    /// Factor converting a natural-unit momentum (`-i d/dx` eigenvalue) to these units.
    pub fn momentum_scale(&self) -> f64 {
        self.hbar
    }
}

impl FromStr for UnitSystem {
    type Err = Error;

    /// Parses `hbar=<v>,two_m=<v>`; missing keys keep their defaults.
    fn from_str(s: &str) -> Result<Self> {
        let mut units = UnitSystem::default();
        for item in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidParameter(format!("bad units item '{item}'")))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|_| Error::InvalidParameter(format!("bad units value '{value}'")))?;
            match key.trim() {
                "hbar" => units.hbar = value,
                "two_m" | "2m" => units.two_m = value,
                other => return Err(Error::InvalidParameter(format!("unknown units key '{other}'"))),
            }
        }
        UnitSystem::new(units.hbar, units.two_m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    /// `-i hbar d/dx`
    Momentum,
    /// `-(hbar^2/2m) d^2/dx^2`
    FreeHamiltonian,
    /// Time conjugate to energy, acting on functions of `E` on `[E0, inf)`.
    TimeOperator,
}

impl OperatorKind {
    pub fn name(&self) -> &'static str {
        match self {
            OperatorKind::Momentum => "momentum",
            OperatorKind::FreeHamiltonian => "free_hamiltonian",
            OperatorKind::TimeOperator => "time_operator",
        }
    }
}

impl FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "momentum" | "p" => Ok(OperatorKind::Momentum),
            "hamiltonian" | "free_hamiltonian" | "H" => Ok(OperatorKind::FreeHamiltonian),
            "time" | "time_operator" => Ok(OperatorKind::TimeOperator),
            other => Err(Error::UnsupportedOperator(format!("unknown operator '{other}'"))),
        }
    }
}

/// A catalog operator on a given interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatorSpec {
    pub kind: OperatorKind,
    pub interval: Interval,
    pub units: UnitSystem,
}

impl OperatorSpec {
    pub fn new(kind: OperatorKind, interval: Interval) -> Result<Self> {
        Self::with_units(kind, interval, UnitSystem::default())
    }

    pub fn with_units(kind: OperatorKind, interval: Interval, units: UnitSystem) -> Result<Self> {
        if kind == OperatorKind::TimeOperator && !matches!(interval, Interval::HalfLine { .. }) {
            return Err(Error::UnsupportedOperator(
                "the time operator lives on an energy half-line [E0, inf)".into(),
            ));
        }
        Ok(OperatorSpec { kind, interval, units })
    }

    pub fn momentum_unit_interval() -> Self {
        OperatorSpec {
            kind: OperatorKind::Momentum,
            interval: Interval::unit(),
            units: UnitSystem::default(),
        }
    }

    pub fn hamiltonian_half_line() -> Self {
        OperatorSpec {
            kind: OperatorKind::FreeHamiltonian,
            interval: Interval::positive_half_line(),
            units: UnitSystem::default(),
        }
    }
}

/// Robin parameter `alpha` in `psi'(0) = alpha psi(0)`; `Dirichlet` is the
/// `alpha -> inf` member, `psi(0) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobinParameter {
    Finite(f64),
    Dirichlet,
}

impl RobinParameter {
    pub fn finite(&self) -> Option<f64> {
        match *self {
            RobinParameter::Finite(a) => Some(a),
            RobinParameter::Dirichlet => None,
        }
    }
}

impl fmt::Display for RobinParameter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RobinParameter::Finite(a) => write!(f, "{a}"),
            RobinParameter::Dirichlet => write!(f, "inf"),
        }
    }
}

impl FromStr for RobinParameter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "+inf" | "-inf" | "infinity" | "dirichlet" => Ok(RobinParameter::Dirichlet),
            other => {
                let a: f64 = other
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad robin parameter '{other}'")))?;
                if a.is_infinite() {
                    Ok(RobinParameter::Dirichlet)
                } else if a.is_nan() {
                    Err(Error::InvalidParameter("robin parameter is NaN".into()))
                } else {
                    Ok(RobinParameter::Finite(a))
                }
            }
        }
    }
}

/// One concrete point of an extension family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "variant", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// The restrictive domain the operator starts from (all boundary data zero).
    RawRestrictive,
    /// `psi(b) = e^{i theta} psi(a)`; theta stored in `[0, 2pi)`.
    Phase { theta: f64 },
    Robin { alpha: RobinParameter },
    Dirichlet,
    None,
}

impl BoundaryCondition {
    pub fn phase(theta: f64) -> Self {
        BoundaryCondition::Phase { theta: reduce_angle(theta) }
    }

    pub fn robin(alpha: f64) -> Self {
        if alpha.is_infinite() {
            BoundaryCondition::Robin { alpha: RobinParameter::Dirichlet }
        } else {
            BoundaryCondition::Robin { alpha: RobinParameter::Finite(alpha) }
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            BoundaryCondition::RawRestrictive => "raw_restrictive",
            BoundaryCondition::Phase { .. } => "phase",
            BoundaryCondition::Robin { .. } => "robin",
            BoundaryCondition::Dirichlet => "dirichlet",
            BoundaryCondition::None => "none",
        }
    }

    /// Checks that this condition makes sense for `op`.
    pub fn check_admissible(&self, op: &OperatorSpec) -> Result<()> {
        match self {
            BoundaryCondition::Phase { .. } => {
                if op.kind != OperatorKind::Momentum || !matches!(op.interval, Interval::Finite { .. }) {
                    return Err(Error::UnsupportedBoundary(
                        "phase conditions apply to momentum on a finite interval only".into(),
                    ));
                }
            }
            BoundaryCondition::Robin { .. }
                if (op.kind != OperatorKind::FreeHamiltonian
                    || !matches!(op.interval, Interval::HalfLine { .. }))
                => {
                    return Err(Error::UnsupportedBoundary(
                        "robin conditions apply to the free Hamiltonian on a half-line only".into(),
                    ));
                }
            _ => {}
        }
        Ok(())
    }
}

/// Reduces an angle to `[0, 2pi)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can round up to exactly TAU for tiny negative inputs
    if r >= TAU {
        0.0
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_parsing() {
        assert_eq!("0,1".parse::<Interval>().unwrap(), Interval::Finite { a: 0.0, b: 1.0 });
        assert_eq!("0,inf".parse::<Interval>().unwrap(), Interval::HalfLine { a: 0.0 });
        assert_eq!("-inf,inf".parse::<Interval>().unwrap(), Interval::FullLine);
        assert!("1,0".parse::<Interval>().is_err());
        assert!("inf,0".parse::<Interval>().is_err());
    }

    #[test]
    fn units_parse_and_validate() {
        let u: UnitSystem = "hbar=2,two_m=0.5".parse().unwrap();
        assert_eq!(u.energy_scale(), 8.0);
        assert!("hbar=-1".parse::<UnitSystem>().is_err());
        assert!(UnitSystem::new(1.0, 0.0).is_err());
    }

    #[test]
    fn time_operator_needs_half_line() {
        assert!(OperatorSpec::new(OperatorKind::TimeOperator, Interval::unit()).is_err());
        assert!(OperatorSpec::new(OperatorKind::TimeOperator, Interval::HalfLine { a: -2.0 }).is_ok());
    }

    #[test]
    fn admissibility() {
        let p = OperatorSpec::momentum_unit_interval();
        let h = OperatorSpec::hamiltonian_half_line();
        assert!(BoundaryCondition::phase(1.0).check_admissible(&p).is_ok());
        assert!(BoundaryCondition::phase(1.0).check_admissible(&h).is_err());
        assert!(BoundaryCondition::robin(-1.0).check_admissible(&h).is_ok());
        assert!(BoundaryCondition::robin(-1.0).check_admissible(&p).is_err());
    }

    #[test]
    fn angle_reduction() {
        assert_eq!(reduce_angle(0.0), 0.0);
        assert!((reduce_angle(-1.0) - (TAU - 1.0)).abs() < 1e-15);
        assert!(reduce_angle(-1e-300) < TAU);
        assert!((reduce_angle(7.0) - (7.0 - TAU)).abs() < 1e-15);
    }
}
