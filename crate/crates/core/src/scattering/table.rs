//! Tabulated scan results with enough metadata to serialize without
//! guessing units or provenance.

use crate::error::{domain, Error};

/// What the value column of a table means, with its unit baked in.
/// Lengths are Bohr radii, so cross sections come out in squared Bohr
/// radii per steradian.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValueKind {
    /// Scattering events per steradian for one shot of the beam.
    EventsPerSr,
    /// Averaged differential cross section per steradian.
    DcsPerSr,
    /// Dimensionless ratio (overlap fractions, normalized profiles).
    Ratio,
    /// Azimuthal modulation contrast, signed, bounded by one.
    Asymmetry,
    /// Transverse probability density of the beam, per squared Bohr radius.
    Density,
    /// Angle-integrated cross section in squared Bohr radii.
    TotalCrossSection,
}

impl ValueKind {
    pub fn label(self) -> &'static str {
        match self {
            ValueKind::EventsPerSr => "events_per_sr",
            ValueKind::DcsPerSr => "dcs_a0sq_per_sr",
            ValueKind::Ratio => "ratio",
            ValueKind::Asymmetry => "asymmetry",
            ValueKind::Density => "density_per_a0sq",
            ValueKind::TotalCrossSection => "total_a0sq",
        }
    }

    /// Kinds whose values cannot legitimately go negative.
    pub fn nonnegative(self) -> bool {
        !matches!(self, ValueKind::Asymmetry)
    }
}

/// Abscissa of one scan point. Scans run over scattering angles, over
/// transverse radius, or over the offset of the target cloud; the
/// coordinate keeps track of which.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Coord {
    /// Polar and azimuthal scattering angles in radians.
    Angles { theta: f64, phi: f64 },
    /// Transverse radius in Bohr radii.
    Radius(f64),
    /// Target cloud offset in Bohr radii.
    Impact(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TablePoint {
    pub coord: Coord,
    pub value: f64,
    pub nodes_used: u64,
    pub converged: bool,
}

/// One scan: a value kind, a human-readable scenario descriptor, and the
/// points in evaluation order.
#[derive(Debug, Clone, PartialEq)]
pub struct AngularTable {
    pub scenario: String,
    pub value_kind: ValueKind,
    pub points: Vec<TablePoint>,
}

impl AngularTable {
    pub fn new(scenario: impl Into<String>, value_kind: ValueKind) -> Self {
        AngularTable {
            scenario: scenario.into(),
            value_kind,
            points: Vec::new(),
        }
    }

    pub fn push(&mut self, coord: Coord, value: f64, nodes_used: u64, converged: bool) {
        self.points.push(TablePoint {
            coord,
            value,
            nodes_used,
            converged,
        });
    }

    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }

    pub fn total_nodes(&self) -> u64 {
        self.points.iter().map(|p| p.nodes_used).sum()
    }

    /// Index of the largest value, if any point exists.
    pub fn peak_index(&self) -> Option<usize> {
        let mut best: Option<usize> = None;
        for (i, p) in self.points.iter().enumerate() {
            if best.is_none_or(|b| p.value > self.points[b].value) {
                best = Some(i);
            }
        }
        best
    }

    /// Checks that values are finite and respect the sign constraint of
    /// the kind. Writers call this before serializing.
    pub fn validate(&self) -> Result<(), Error> {
        for (i, p) in self.points.iter().enumerate() {
            if !p.value.is_finite() {
                return Err(domain(format!(
                    "table '{}' point {i} is not finite",
                    self.scenario
                )));
            }
            if self.value_kind.nonnegative() && p.value < 0.0 {
                return Err(domain(format!(
                    "table '{}' point {i} is negative ({}) for kind {}",
                    self.scenario,
                    p.value,
                    self.value_kind.label()
                )));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn peak_and_aggregates() {
        let mut t = AngularTable::new("scan", ValueKind::EventsPerSr);
        assert!(t.peak_index().is_none());
        assert!(t.all_converged());
        t.push(Coord::Radius(0.0), 1.0, 10, true);
        t.push(Coord::Radius(1.0), 3.0, 20, true);
        t.push(Coord::Radius(2.0), 2.0, 30, false);
        assert_eq!(t.peak_index(), Some(1));
        assert_eq!(t.total_nodes(), 60);
        assert!(!t.all_converged());
        assert!(t.validate().is_ok());
    }

    #[test]
    fn validation_rejects_negatives_only_for_signless_kinds() {
        let mut t = AngularTable::new("scan", ValueKind::DcsPerSr);
        t.push(Coord::Angles { theta: 0.1, phi: 0.0 }, -1e-3, 5, true);
        assert!(t.validate().is_err());
        let mut a = AngularTable::new("modulation", ValueKind::Asymmetry);
        a.push(Coord::Angles { theta: 0.1, phi: 0.0 }, -0.5, 5, true);
        assert!(a.validate().is_ok());
        let mut nan = AngularTable::new("bad", ValueKind::Ratio);
        nan.push(Coord::Impact(1.0), f64::NAN, 5, true);
        assert!(nan.validate().is_err());
    }
}
