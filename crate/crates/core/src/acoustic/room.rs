use std::sync::Arc;

use crate::error::{Error, Result};

pub type Point3 = [f64; 3];

/// Microphone height used when no array center is configured.
pub const DEFAULT_ARRAY_HEIGHT: f64 = 1.2;

/// A point source placed relative to the array center.
#[derive(Debug, Clone)]
pub struct SourceSpec {
    /// Degrees from broadside, positive towards the `+orientation` side.
    pub angle_deg: f64,
    /// Meters from the array center.
    pub distance: f64,
    pub signal: Arc<[f64]>,
    pub power_scale: f64,
}

impl SourceSpec {
    pub fn new(angle_deg: f64, distance: f64, signal: impl Into<Arc<[f64]>>) -> Self {
        Self {
            angle_deg,
            distance,
            signal: signal.into(),
            power_scale: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.distance > 0.0 && self.distance.is_finite()) {
            return Err(Error::Domain(format!(
                "source distance must be positive, got {}",
                self.distance
            )));
        }
        if self.signal.is_empty() {
            return Err(Error::Data("source signal is empty".into()));
        }
        if self.signal.iter().any(|x| !x.is_finite()) || !self.power_scale.is_finite() {
            return Err(Error::Data("source signal contains non-finite samples".into()));
        }
        Ok(())
    }
}

/// The simulated world: a rectangular room with uniform wall absorption.
#[derive(Debug, Clone)]
pub struct RoomScenario {
    /// Length, width and height in meters.
    pub dimensions: [f64; 3],
    /// Reverberation time in seconds; zero means anechoic.
    pub t60: f64,
    pub fs: f64,
    pub speed_of_sound: f64,
    pub sources: Vec<SourceSpec>,
}

impl RoomScenario {
    pub fn new(dimensions: [f64; 3], t60: f64, fs: f64) -> Self {
        Self {
            dimensions,
            t60,
            fs,
            speed_of_sound: 343.0,
            sources: Vec::new(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dimensions.iter().any(|&d| !(d > 0.0 && d.is_finite())) {
            return Err(Error::Domain(format!(
                "room dimensions must be positive, got {:?}",
                self.dimensions
            )));
        }
        if !(self.t60 >= 0.0) {
            return Err(Error::Domain(format!("t60 must be >= 0, got {}", self.t60)));
        }
        if !(self.fs > 0.0 && self.fs.is_finite()) {
            return Err(Error::Domain(format!("fs must be positive, got {}", self.fs)));
        }
        if !(self.speed_of_sound > 0.0 && self.speed_of_sound.is_finite()) {
            return Err(Error::Domain("speed of sound must be positive".into()));
        }
        for s in &self.sources {
            s.validate()?;
        }
        Ok(())
    }

    pub fn volume(&self) -> f64 {
        self.dimensions.iter().product()
    }

    pub fn surface_area(&self) -> f64 {
        let [lx, ly, lz] = self.dimensions;
        2.0 * (lx * ly + lx * lz + ly * lz)
    }

    /// Strict interior test.
    pub fn contains(&self, p: Point3) -> bool {
        p.iter()
            .zip(&self.dimensions)
            .all(|(&x, &l)| x > 0.0 && x < l)
    }

    pub(crate) fn check_inside(&self, p: Point3, what: &str) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} at {p:?} is outside the room {:?}",
                self.dimensions
            )))
        }
    }

    /// Impulse response length in samples: `ceil(1.25 * t60 * fs)`, at least 1024.
    pub fn rir_length(&self) -> usize {
        ((1.25 * self.t60 * self.fs).ceil() as usize).max(1024)
    }

    /// Wall pressure reflection coefficient used by the image method.
    ///
    /// Eyring's value assumes a diffuse field. A shoebox image lattice
    /// decays more slowly along its axial paths, so starting from Eyring the
    /// coefficient is corrected until the simulated energy decay of a
    /// reference source/microphone pair measures the target T60.
    pub fn reflection_coefficient(&self) -> Result<f64> {
        super::rir::calibrated_reflection_coefficient(self)
    }

    /// Uniform wall pressure reflection coefficient from Eyring's formula.
    pub fn eyring_reflection_coefficient(&self) -> Result<f64> {
        if self.t60 == 0.0 {
            return Ok(0.0);
        }
        // T60 = 24 ln(10) V / (-c S ln(1 - alpha)),  beta = sqrt(1 - alpha)
        let k = 24.0 * std::f64::consts::LN_10 * self.volume()
            / (self.speed_of_sound * self.surface_area() * self.t60);
        let beta = (-0.5 * k).exp();
        if !beta.is_finite() || beta >= 1.0 {
            return Err(Error::InfeasibleRoom(format!(
                "t60 = {} s needs wall reflection coefficient >= 1",
                self.t60
            )));
        }
        Ok(beta)
    }

    pub fn source_position(&self, source: &SourceSpec, geometry: &ArrayGeometry) -> Point3 {
        let theta = source.angle_deg.to_radians();
        let axis = geometry.unit_axis();
        let broadside = geometry.broadside();
        let c = geometry.center;
        let mut p = [0.0; 3];
        for i in 0..3 {
            p[i] = c[i] + source.distance * (theta.sin() * axis[i] + theta.cos() * broadside[i]);
        }
        p
    }
}

/// Three-sensor linear array: a fixed center microphone flanked by two
/// movable microphones at spacings `d1` and `d2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArrayGeometry {
    pub center: Point3,
    pub d1: f64,
    pub d2: f64,
    /// Array axis; normalized on use. Must not be vertical.
    pub orientation: Point3,
}

impl ArrayGeometry {
    /// Array in the middle of the room floor plan at the default height,
    /// oriented along the x axis.
    pub fn centered(dimensions: [f64; 3], d1: f64, d2: f64) -> Self {
        Self {
            center: [
                dimensions[0] / 2.0,
                dimensions[1] / 2.0,
                DEFAULT_ARRAY_HEIGHT,
            ],
            d1,
            d2,
            orientation: [1.0, 0.0, 0.0],
        }
    }

    pub fn with_spacings(&self, d1: f64, d2: f64) -> Self {
        Self { d1, d2, ..*self }
    }

    pub fn spacing(&self, sub_array: usize) -> f64 {
        if sub_array == 0 {
            self.d1
        } else {
            self.d2
        }
    }

    pub fn unit_axis(&self) -> Point3 {
        let [x, y, z] = self.orientation;
        let n = (x * x + y * y + z * z).sqrt();
        [x / n, y / n, z / n]
    }

    /// Horizontal direction perpendicular to the axis; angle zero points here.
    pub fn broadside(&self) -> Point3 {
        let [x, y, _] = self.unit_axis();
        let n = (x * x + y * y).sqrt();
        [-y / n, x / n, 0.0]
    }

    /// Microphones 1, 2 (center) and 3.
    pub fn mic_positions(&self) -> [Point3; 3] {
        let a = self.unit_axis();
        let c = self.center;
        let mut m1 = c;
        let mut m3 = c;
        for i in 0..3 {
            m1[i] -= self.d1 * a[i];
            m3[i] += self.d2 * a[i];
        }
        [m1, c, m3]
    }

    /// Microphone indices forming each two-channel sub-array.
    pub const SUB_ARRAY_MICS: [[usize; 2]; 2] = [[0, 1], [1, 2]];

    pub fn validate(&self, room: &RoomScenario) -> Result<()> {
        if !(self.d1 > 0.0 && self.d2 > 0.0) {
            return Err(Error::Domain(format!(
                "spacings must be positive, got d1={} d2={}",
                self.d1, self.d2
            )));
        }
        let [x, y, z] = self.orientation;
        if !(x * x + y * y > 0.0) || !(x.is_finite() && y.is_finite() && z.is_finite()) {
            return Err(Error::Domain("array orientation must have a horizontal component".into()));
        }
        for (i, m) in self.mic_positions().iter().enumerate() {
            room.check_inside(*m, &format!("microphone {}", i + 1))?;
        }
        Ok(())
    }
}
