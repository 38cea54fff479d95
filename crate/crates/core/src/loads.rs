use std::fmt;
use std::ops::{Add, AddAssign};

use nalgebra::Vector3;

/// Which component produced a set of loads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LoadSource {
    MainRotor,
    TailRotor,
    HorizontalTail,
    VerticalTail,
    Fuselage,
    Total,
}

impl LoadSource {
    pub const COMPONENTS: [LoadSource; 5] = [
        LoadSource::MainRotor,
        LoadSource::TailRotor,
        LoadSource::HorizontalTail,
        LoadSource::VerticalTail,
        LoadSource::Fuselage,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            LoadSource::MainRotor => "main_rotor",
            LoadSource::TailRotor => "tail_rotor",
            LoadSource::HorizontalTail => "horizontal_tail",
            LoadSource::VerticalTail => "vertical_tail",
            LoadSource::Fuselage => "fuselage",
            LoadSource::Total => "total",
        }
    }
}

impl fmt::Display for LoadSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Force (lbf) and moment about the centre of gravity (lbf*ft), body axes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Loads {
    pub force: Vector3<f64>,
    pub moment: Vector3<f64>,
    pub source: LoadSource,
}

impl Loads {
    pub fn zero(source: LoadSource) -> Self {
        Self {
            force: Vector3::zeros(),
            moment: Vector3::zeros(),
            source,
        }
    }

    pub fn new(force: Vector3<f64>, moment: Vector3<f64>, source: LoadSource) -> Self {
        Self {
            force,
            moment,
            source,
        }
    }

    /// A force applied at `point` (ft from the CG).
    pub fn from_force_at(force: Vector3<f64>, point: &Vector3<f64>, source: LoadSource) -> Self {
        Self {
            force,
            moment: point.cross(&force),
            source,
        }
    }

    pub fn x(&self) -> f64 {
        self.force.x
    }
    pub fn y(&self) -> f64 {
        self.force.y
    }
    pub fn z(&self) -> f64 {
        self.force.z
    }
    pub fn l(&self) -> f64 {
        self.moment.x
    }
    pub fn m(&self) -> f64 {
        self.moment.y
    }
    pub fn n(&self) -> f64 {
        self.moment.z
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.moment.iter()).all(|v| v.is_finite())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self {
            force: self.force * k,
            moment: self.moment * k,
            source: self.source,
        }
    }
}

impl Add for Loads {
    type Output = Loads;
    fn add(self, rhs: Loads) -> Loads {
        Loads {
            force: self.force + rhs.force,
            moment: self.moment + rhs.moment,
            source: LoadSource::Total,
        }
    }
}

impl AddAssign for Loads {
    fn add_assign(&mut self, rhs: Loads) {
        self.force += rhs.force;
        self.moment += rhs.moment;
    }
}
