//! SFRJ duct geometry: inlet channel, dump combustor, converging-diverging
//! exit nozzle, with the heated-wall span over the combustor.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("geometry override invalid: {0}")]
    Invalid(String),
}

/// Dimensional overrides for [`EngineGeometry::build`]. Defaults reproduce
/// the benchmark duct: 80 mm x 0.2 m inlet channel, 140 mm x 0.838 m
/// combustor, symmetric 140 mm nozzle with a 130 mm throat, heated wall over
/// the full combustor length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeometryConfig {
    pub inlet_diameter: f64,
    pub inlet_length: f64,
    pub combustor_diameter: f64,
    pub combustor_length: f64,
    pub nozzle_length: f64,
    pub throat_diameter: f64,
    pub exit_diameter: f64,
    /// Uniform scale factor applied to every length and diameter.
    pub scale: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        Self {
            inlet_diameter: 0.080,
            inlet_length: 0.2,
            combustor_diameter: 0.140,
            combustor_length: 0.838,
            nozzle_length: 0.140,
            throat_diameter: 0.130,
            exit_diameter: 0.140,
            scale: 1.0,
        }
    }
}

/// Axial duct geometry. All queries are in meters; areas in m^2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EngineGeometry {
    config: GeometryConfig,
    /// Start of the combustor (the dump plane with the area discontinuity).
    pub dump_plane: f64,
    /// Start of the converging nozzle section.
    pub nozzle_start: f64,
    /// Axial position of the throat (mid-nozzle).
    pub throat_position: f64,
    /// Total duct length.
    pub total_length: f64,
    /// Heated-wall span (x_start, x_end).
    pub heated_span: (f64, f64),
}

impl EngineGeometry {
    pub fn build(config: GeometryConfig) -> Result<Self, GeometryError> {
        let c = &config;
        for (name, v) in [
            ("inlet_diameter", c.inlet_diameter),
            ("inlet_length", c.inlet_length),
            ("combustor_diameter", c.combustor_diameter),
            ("combustor_length", c.combustor_length),
            ("nozzle_length", c.nozzle_length),
            ("throat_diameter", c.throat_diameter),
            ("exit_diameter", c.exit_diameter),
            ("scale", c.scale),
        ] {
            if !(v > 0.0) || !v.is_finite() {
                return Err(GeometryError::Invalid(format!("{name} = {v} must be positive")));
            }
        }
        if c.throat_diameter > c.combustor_diameter || c.throat_diameter > c.exit_diameter {
            return Err(GeometryError::Invalid(
                "throat must be the narrowest nozzle station".into(),
            ));
        }
        let s = c.scale;
        let dump_plane = s * c.inlet_length;
        let nozzle_start = s * (c.inlet_length + c.combustor_length);
        let total_length = s * (c.inlet_length + c.combustor_length + c.nozzle_length);
        Ok(Self {
            config,
            dump_plane,
            nozzle_start,
            throat_position: nozzle_start + 0.5 * s * c.nozzle_length,
            total_length,
            heated_span: (dump_plane, nozzle_start),
        })
    }

    pub fn default_engine() -> Self {
        Self::build(GeometryConfig::default()).expect("default geometry is valid")
    }

    pub fn config(&self) -> &GeometryConfig {
        &self.config
    }

    /// Raw duct diameter at axial position `x` (discontinuous at the dump).
    pub fn diameter(&self, x: f64) -> f64 {
        let s = self.config.scale;
        let x = x.clamp(0.0, self.total_length);
        if x < self.dump_plane {
            s * self.config.inlet_diameter
        } else if x < self.nozzle_start {
            s * self.config.combustor_diameter
        } else if x < self.throat_position {
            let f = (x - self.nozzle_start) / (self.throat_position - self.nozzle_start);
            s * (self.config.combustor_diameter
                + f * (self.config.throat_diameter - self.config.combustor_diameter))
        } else {
            let half = self.throat_position - self.nozzle_start;
            let f = ((x - self.throat_position) / half).min(1.0);
            s * (self.config.throat_diameter
                + f * (self.config.exit_diameter - self.config.throat_diameter))
        }
    }

    /// Diameter with the dump-plane discontinuity smeared linearly over a
    /// width `w`. Quasi-1D theory is ill-posed at a true area jump, so grids
    /// are always built from this profile.
    pub fn diameter_smeared(&self, x: f64, w: f64) -> f64 {
        let lo = self.dump_plane - 0.5 * w;
        let hi = self.dump_plane + 0.5 * w;
        if w <= 0.0 || x <= lo || x >= hi {
            return self.diameter(x);
        }
        let d_lo = self.diameter(lo);
        let d_hi = self.diameter(hi);
        d_lo + (x - lo) / w * (d_hi - d_lo)
    }

    pub fn area(&self, x: f64) -> f64 {
        let d = self.diameter(x);
        0.25 * PI * d * d
    }

    pub fn inlet_area(&self) -> f64 {
        let d = self.config.scale * self.config.inlet_diameter;
        0.25 * PI * d * d
    }

    pub fn combustor_area(&self) -> f64 {
        let d = self.config.scale * self.config.combustor_diameter;
        0.25 * PI * d * d
    }

    pub fn throat_area(&self) -> f64 {
        let d = self.config.scale * self.config.throat_diameter;
        0.25 * PI * d * d
    }

    pub fn exit_area(&self) -> f64 {
        let d = self.config.scale * self.config.exit_diameter;
        0.25 * PI * d * d
    }

    /// Heated wall length.
    pub fn heated_length(&self) -> f64 {
        self.heated_span.1 - self.heated_span.0
    }

    /// Analytic heated wall area: perimeter integral over the heated span
    /// (constant combustor diameter, so just pi d L).
    pub fn heated_wall_area(&self) -> f64 {
        PI * self.config.scale * self.config.combustor_diameter * self.heated_length()
    }
}
