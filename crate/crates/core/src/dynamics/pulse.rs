//! Pulse envelopes and sequences.

use std::collections::BTreeMap;

use statrs::function::erf::erf;

use crate::error::{Error, Result};
use crate::linalg::TWO_PI;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Shape {
    /// Gaussian centred in the window, lifted so it vanishes at the window
    /// edges.
    Gaussian { sigma: f64 },
    Rectangular,
    /// Rectangle with error-function edges of width `edge`.
    ErfSquare { edge: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PulseEnvelope {
    pub shape: Shape,
    /// Peak amplitude (MHz).
    pub amplitude: f64,
    /// Carrier frequency (GHz); 0 for baseband pulses.
    pub carrier: f64,
    /// Carrier phase (radians).
    pub phase: f64,
    /// Window start and length (ns).
    pub start: f64,
    pub duration: f64,
}

impl PulseEnvelope {
    pub fn new(shape: Shape, amplitude: f64, start: f64, duration: f64) -> Result<Self> {
        let p = Self {
            shape,
            amplitude,
            carrier: 0.0,
            phase: 0.0,
            start,
            duration,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn with_carrier(self, carrier: f64, phase: f64) -> Self {
        Self { carrier, phase, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration > 0.0) {
            return Err(Error::invariant("pulse duration > 0", format!("got {}", self.duration)));
        }
        match self.shape {
            Shape::Gaussian { sigma } | Shape::ErfSquare { edge: sigma } if !(sigma > 0.0) => Err(
                Error::invariant("pulse width parameter > 0", format!("got {sigma}")),
            ),
            _ => Ok(()),
        }
    }

    pub fn end(&self) -> f64 {
        self.start + self.duration
    }

    /// Time range outside which the envelope is exactly zero.
    pub fn support(&self) -> (f64, f64) {
        match self.shape {
            Shape::ErfSquare { edge } => (self.start - 5.0 * edge, self.end() + 5.0 * edge),
            _ => (self.start, self.end()),
        }
    }

    /// Dimensionless envelope `s(t)` with peak value 1.
    pub fn shape_at(&self, t: f64) -> f64 {
        let (lo, hi) = self.support();
        if t < lo || t > hi {
            return 0.0;
        }
        match self.shape {
            Shape::Rectangular => {
                if t < self.end() {
                    1.0
                } else {
                    0.0
                }
            }
            Shape::Gaussian { sigma } => {
                let c = self.start + 0.5 * self.duration;
                let g = |x: f64| (-(x - c).powi(2) / (2.0 * sigma * sigma)).exp();
                let floor = g(self.start);
                (g(t) - floor) / (1.0 - floor)
            }
            Shape::ErfSquare { edge } => {
                0.5 * (erf((t - self.start) / edge) - erf((t - self.end()) / edge))
            }
        }
    }

    /// Envelope value in MHz, carrier included when present.
    pub fn eval(&self, t: f64) -> f64 {
        let s = self.amplitude * self.shape_at(t);
        if self.carrier > 0.0 {
            s * (TWO_PI * self.carrier * t + self.phase).cos()
        } else {
            s
        }
    }

    /// `integral s(t) dt` over the support (ns), by composite Simpson.
    pub fn area(&self) -> f64 {
        let (lo, hi) = self.support();
        let n = 20_000;
        let h = (hi - lo) / n as f64;
        let mut acc = self.shape_at(lo) + self.shape_at(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.shape_at(lo + h * i as f64);
        }
        acc * h / 3.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Target {
    FluxoniumDrive,
    TransmonDrive,
    CouplerFlux,
    FluxoniumFlux,
    Readout,
}

impl Target {
    pub fn name(&self) -> &'static str {
        match self {
            Target::FluxoniumDrive => "fluxonium-drive",
            Target::TransmonDrive => "transmon-drive",
            Target::CouplerFlux => "coupler-flux",
            Target::FluxoniumFlux => "fluxonium-flux",
            Target::Readout => "readout",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Pulse {
    pub label: String,
    pub target: Target,
    pub envelope: PulseEnvelope,
}

/// Ordered list of pulses with free-form metadata.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    pub pulses: Vec<Pulse>,
    pub metadata: BTreeMap<String, String>,
}

impl PulseSequence {
    pub fn push(&mut self, label: &str, target: Target, envelope: PulseEnvelope) -> Result<()> {
        envelope.validate()?;
        self.pulses.push(Pulse {
            label: label.to_string(),
            target,
            envelope,
        });
        Ok(())
    }

    /// Latest end time over all pulses (ns).
    pub fn duration(&self) -> f64 {
        self.pulses
            .iter()
            .map(|p| p.envelope.support().1)
            .fold(0.0, f64::max)
    }

    /// Summed envelope of every pulse on `target` at time `t` (MHz).
    pub fn eval(&self, target: Target, t: f64) -> f64 {
        self.pulses
            .iter()
            .filter(|p| p.target == target)
            .map(|p| p.envelope.eval(t))
            .sum()
    }

    pub fn to_json(&self) -> serde_json::Value {
        let pulses: Vec<serde_json::Value> = self
            .pulses
            .iter()
            .map(|p| {
                let e = &p.envelope;
                let (kind, width) = match e.shape {
                    Shape::Gaussian { sigma } => ("gaussian", Some(sigma)),
                    Shape::Rectangular => ("rectangular", None),
                    Shape::ErfSquare { edge } => ("erf-square", Some(edge)),
                };
                serde_json::json!({
                    "label": p.label,
                    "target": p.target.name(),
                    "kind": kind,
                    "width_ns": width,
                    "amplitude_mhz": e.amplitude,
                    "carrier_ghz": e.carrier,
                    "phase_rad": e.phase,
                    "start_ns": e.start,
                    "duration_ns": e.duration,
                })
            })
            .collect();
        serde_json::json!({
            "pulses": pulses,
            "duration_ns": self.duration(),
            "metadata": self.metadata,
        })
    }
}
