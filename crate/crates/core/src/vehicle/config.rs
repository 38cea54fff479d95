//! Vehicle configuration file.
//!
//! The file is TOML with one table per component. Keys carry their units.
//! Anything omitted takes the UH-60A default below; `hinge_offset_ft`,
//! `blade_mass_slug_per_ft`, hub and tail positions, the fin and the rigging
//! ranges are estimates rather than published data.

use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::controls::{ChannelRange, Rigging};
use crate::empennage::{SurfaceKind, TailSurface};
use crate::error::{Error, Result};
use crate::frames::GRAVITY;
use crate::fuselage::MassProperties;
use crate::rotor::geometry::{RotorGeometry, DEFAULT_AZIMUTH_STEPS, DEFAULT_RADIAL_ELEMENTS};
use crate::tables::TableSet;
use crate::tail_rotor::TailRotorGeometry;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MainRotorSection {
    pub blade_count: usize,
    pub radius_ft: f64,
    pub chord_ft: f64,
    pub rotor_speed_rad_s: f64,
    pub tip_speed_ft_s: f64,
    pub mast_tilt_deg: f64,
    pub airfoil_section: String,
    pub first_airfoil_section_ft: f64,
    pub precone_deg: f64,
    pub linear_twist_deg: f64,
    pub solidity: f64,
    pub lock_number: f64,
    pub control_phase_deg: f64,
    pub hinge_offset_ft: f64,
    pub blade_mass_slug_per_ft: f64,
    pub lift_slope_per_rad: f64,
    pub hub_position_ft: [f64; 3],
    pub flap_spring_ftlb_per_rad: f64,
    pub flap_damper_ftlb_s_per_rad: f64,
    pub lag_spring_ftlb_per_rad: f64,
    pub lag_damper_ftlb_s_per_rad: f64,
    pub radial_elements: usize,
    pub azimuth_steps: usize,
}

impl Default for MainRotorSection {
    fn default() -> Self {
        Self {
            blade_count: 4,
            radius_ft: 26.83,
            chord_ft: 1.75,
            rotor_speed_rad_s: 27.0,
            tip_speed_ft_s: 724.41,
            mast_tilt_deg: -3.0,
            airfoil_section: "SC 1095".into(),
            first_airfoil_section_ft: 5.08,
            precone_deg: 0.0,
            linear_twist_deg: -18.0,
            solidity: 0.083,
            lock_number: 5.11,
            control_phase_deg: -9.7,
            hinge_offset_ft: 1.25,
            blade_mass_slug_per_ft: 0.433,
            lift_slope_per_rad: 5.73,
            hub_position_ft: [1.15, 0.0, -5.65],
            flap_spring_ftlb_per_rad: 0.0,
            flap_damper_ftlb_s_per_rad: 0.0,
            lag_spring_ftlb_per_rad: 0.0,
            lag_damper_ftlb_s_per_rad: 0.0,
            radial_elements: DEFAULT_RADIAL_ELEMENTS,
            azimuth_steps: DEFAULT_AZIMUTH_STEPS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TailRotorSection {
    pub blade_count: usize,
    pub radius_ft: f64,
    pub chord_ft: f64,
    pub rotor_speed_rad_s: f64,
    pub tip_speed_ft_s: f64,
    pub cant_deg: f64,
    pub linear_twist_deg: f64,
    pub lift_slope_per_rad: f64,
    pub profile_drag: f64,
    pub position_ft: [f64; 3],
}

impl Default for TailRotorSection {
    fn default() -> Self {
        Self {
            blade_count: 4,
            radius_ft: 5.5,
            chord_ft: 0.81,
            rotor_speed_rad_s: 124.62,
            tip_speed_ft_s: 685.41,
            cant_deg: 20.0,
            linear_twist_deg: -18.0,
            lift_slope_per_rad: 5.73,
            profile_drag: 0.008,
            position_ft: [-31.4, 1.17, -6.46],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FuselageSection {
    pub gross_weight_lb: f64,
    pub ixx_slug_ft2: f64,
    pub iyy_slug_ft2: f64,
    pub izz_slug_ft2: f64,
    pub ixz_slug_ft2: f64,
    pub ixy_slug_ft2: f64,
    pub iyz_slug_ft2: f64,
}

impl Default for FuselageSection {
    fn default() -> Self {
        Self {
            gross_weight_lb: 16000.0,
            ixx_slug_ft2: 4659.0,
            iyy_slug_ft2: 38512.0,
            izz_slug_ft2: 36796.0,
            ixz_slug_ft2: 1882.0,
            ixy_slug_ft2: 0.0,
            iyz_slug_ft2: 0.0,
        }
    }
}

macro_rules! surface_section {
    ($name:ident, $area:expr, $pos:expr, $inc:expr) => {
        #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            pub area_ft2: f64,
            pub position_ft: [f64; 3],
            pub incidence_deg: f64,
            pub dynamic_pressure_factor: f64,
        }

        impl Default for $name {
            fn default() -> Self {
                Self {
                    area_ft2: $area,
                    position_ft: $pos,
                    incidence_deg: $inc,
                    dynamic_pressure_factor: 0.9,
                }
            }
        }

        impl $name {
            fn surface(&self, kind: SurfaceKind) -> Result<TailSurface> {
                let ts = TailSurface {
                    kind,
                    position: vec3(self.position_ft),
                    area: self.area_ft2,
                    incidence: self.incidence_deg.to_radians(),
                    dynamic_pressure_factor: self.dynamic_pressure_factor,
                };
                ts.validate().map(|_| ts)
            }
        }
    };
}

// The horizontal tail incidence comes from the stabilator schedule; its
// `incidence_deg` is added on top as a rigging offset.
surface_section!(HorizontalTailSection, 45.0, [-28.75, 0.0, 0.27], 0.0);
surface_section!(VerticalTailSection, 32.3, [-28.33, 0.0, -2.15], -5.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RiggingSection {
    /// Angle at 0 % and 100 % input.
    pub collective_deg: [f64; 2],
    pub lateral_deg: [f64; 2],
    pub longitudinal_deg: [f64; 2],
    pub pedal_deg: [f64; 2],
}

impl Default for RiggingSection {
    fn default() -> Self {
        Self {
            collective_deg: [0.0, 26.0],
            lateral_deg: [-8.0, 8.0],
            longitudinal_deg: [-16.0, 16.0],
            pedal_deg: [-6.0, 30.0],
        }
    }
}

/// Table files. Relative paths resolve against the config file. Unset
/// entries use `TRAC_TABLES_DIR` when set, else the built-in defaults.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TablesSection {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rotor_airfoil: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_airfoil: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interference: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stabilator: Option<PathBuf>,
}

/// On-disk form of the vehicle configuration.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub main_rotor: MainRotorSection,
    pub tail_rotor: TailRotorSection,
    pub fuselage: FuselageSection,
    pub horizontal_tail: HorizontalTailSection,
    pub vertical_tail: VerticalTailSection,
    pub rigging: RiggingSection,
    pub tables: TablesSection,
}

/// Runtime vehicle parameters in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleConfig {
    pub main_rotor: RotorGeometry,
    pub main_rotor_lift_slope: f64,
    pub tail_rotor: TailRotorGeometry,
    pub gross_weight: f64,
    pub mass: MassProperties,
    pub horizontal_tail: TailSurface,
    pub vertical_tail: TailSurface,
    pub rigging: Rigging,
    pub tables: TableSet,
}

impl Default for VehicleConfig {
    fn default() -> Self {
        ConfigFile::default()
            .resolve_with_tables(TableSet::default())
            .expect("default configuration is valid")
    }
}

fn vec3(a: [f64; 3]) -> Vector3<f64> {
    Vector3::new(a[0], a[1], a[2])
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1e-12)
}

impl ConfigFile {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let value: toml::Value = text.parse().map_err(|e: toml::de::Error| Error::Config(e.to_string()))?;
        Self::from_value(value)
    }

    fn from_value(value: toml::Value) -> Result<Self> {
        value
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))
    }

    /// Reads a config file and applies `key=value` overrides, where `key` is
    /// a dotted path such as `main_rotor.radius_ft`.
    pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<Self> {
        let mut value = match path {
            Some(p) => {
                let text = std::fs::read_to_string(p).map_err(|source| Error::Io {
                    path: p.to_path_buf(),
                    source,
                })?;
                text.parse::<toml::Value>()
                    .map_err(|e| Error::Config(format!("{}: {e}", p.display())))?
            }
            None => toml::Value::try_from(ConfigFile::default())
                .map_err(|e| Error::Config(e.to_string()))?,
        };
        for o in overrides {
            apply_override(&mut value, o)?;
        }
        let mut file = Self::from_value(value)?;
        if let Some(dir) = path.and_then(Path::parent) {
            file.tables.make_relative_to(dir);
        }
        Ok(file)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serialises")
    }

    /// Converts to runtime units, loading tables.
    pub fn resolve(&self) -> Result<VehicleConfig> {
        self.resolve_with_tables(self.tables.load()?)
    }

    pub fn resolve_with_tables(&self, tables: TableSet) -> Result<VehicleConfig> {
        let m = &self.main_rotor;
        let t = &self.tail_rotor;
        let f = &self.fuselage;
        if m.precone_deg != 0.0 {
            return Err(Error::Config("main_rotor.precone_deg: only zero precone is modelled".into()));
        }
        if !close(m.tip_speed_ft_s, m.rotor_speed_rad_s * m.radius_ft, 1e-3) {
            return Err(Error::Config(format!(
                "main_rotor.tip_speed_ft_s {} disagrees with rotor speed x radius {}",
                m.tip_speed_ft_s,
                m.rotor_speed_rad_s * m.radius_ft
            )));
        }
        if !close(t.tip_speed_ft_s, t.rotor_speed_rad_s * t.radius_ft, 1e-3) {
            return Err(Error::Config("tail_rotor.tip_speed_ft_s disagrees with rotor speed x radius".into()));
        }
        let main_rotor = RotorGeometry {
            radius: m.radius_ft,
            chord: m.chord_ft,
            hinge_offset: m.hinge_offset_ft,
            blade_count: m.blade_count,
            omega: m.rotor_speed_rad_s,
            twist: m.linear_twist_deg.to_radians(),
            blade_mass_per_length: m.blade_mass_slug_per_ft,
            mast_tilt: m.mast_tilt_deg.to_radians(),
            control_phase: m.control_phase_deg.to_radians(),
            root_cutout: m.first_airfoil_section_ft,
            hub_position: vec3(m.hub_position_ft),
            flap_spring: m.flap_spring_ftlb_per_rad,
            flap_damper: m.flap_damper_ftlb_s_per_rad,
            lag_spring: m.lag_spring_ftlb_per_rad,
            lag_damper: m.lag_damper_ftlb_s_per_rad,
            radial_elements: m.radial_elements,
            azimuth_steps: m.azimuth_steps,
        };
        main_rotor.validate()?;
        if !close(main_rotor.solidity(), m.solidity, 0.01) {
            return Err(Error::Config(format!(
                "main_rotor.solidity {} disagrees with geometry {:.4}",
                m.solidity,
                main_rotor.solidity()
            )));
        }
        let lock = main_rotor.lock_number(m.lift_slope_per_rad, 0.0023769);
        if !close(lock, m.lock_number, 0.02) {
            return Err(Error::Config(format!(
                "main_rotor.lock_number {} disagrees with blade mass ({lock:.3} at sea level)",
                m.lock_number
            )));
        }
        let tail_rotor = TailRotorGeometry {
            radius: t.radius_ft,
            chord: t.chord_ft,
            omega: t.rotor_speed_rad_s,
            cant: t.cant_deg.to_radians(),
            blade_count: t.blade_count,
            position: vec3(t.position_ft),
            twist: t.linear_twist_deg.to_radians(),
            lift_slope: t.lift_slope_per_rad,
            profile_drag: t.profile_drag,
        };
        tail_rotor.validate()?;
        if !(f.gross_weight_lb > 0.0) {
            return Err(Error::Config("fuselage.gross_weight_lb must be positive".into()));
        }
        let mass = MassProperties::new(
            f.gross_weight_lb / GRAVITY,
            f.ixx_slug_ft2,
            f.iyy_slug_ft2,
            f.izz_slug_ft2,
            f.ixy_slug_ft2,
            f.ixz_slug_ft2,
            f.iyz_slug_ft2,
        )?;
        let r = &self.rigging;
        let range = |name: &'static str, d: [f64; 2]| ChannelRange::new(name, d[0].to_radians(), d[1].to_radians());
        let rigging = Rigging {
            collective: range("collective", r.collective_deg)?,
            lateral: range("lateral", r.lateral_deg)?,
            longitudinal: range("longitudinal", r.longitudinal_deg)?,
            pedal: range("pedal", r.pedal_deg)?,
        };
        Ok(VehicleConfig {
            main_rotor,
            main_rotor_lift_slope: m.lift_slope_per_rad,
            tail_rotor,
            gross_weight: f.gross_weight_lb,
            mass,
            horizontal_tail: self.horizontal_tail.surface(SurfaceKind::Horizontal)?,
            vertical_tail: self.vertical_tail.surface(SurfaceKind::Vertical)?,
            rigging,
            tables,
        })
    }
}

impl TablesSection {
    fn make_relative_to(&mut self, dir: &Path) {
        for p in [
            &mut self.directory,
            &mut self.rotor_airfoil,
            &mut self.tail_airfoil,
            &mut self.interference,
            &mut self.stabilator,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = dir.join(&*p);
            }
        }
    }

    pub fn load(&self) -> Result<TableSet> {
        use crate::tables::{AirfoilTable, InterferenceTable, StabilatorSchedule};
        let mut set = match &self.directory {
            Some(d) => TableSet::load_dir(d)?,
            None => TableSet::from_env()?,
        };
        let open = |p: &Path| {
            std::fs::File::open(p).map_err(|source| Error::Io {
                path: p.to_path_buf(),
                source,
            })
        };
        if let Some(p) = &self.rotor_airfoil {
            set.rotor_airfoil = AirfoilTable::read_csv(open(p)?)?;
        }
        if let Some(p) = &self.tail_airfoil {
            set.tail_airfoil = AirfoilTable::read_csv(open(p)?)?;
        }
        if let Some(p) = &self.interference {
            set.interference = InterferenceTable::read_csv(open(p)?)?;
        }
        if let Some(p) = &self.stabilator {
            set.stabilator = StabilatorSchedule::read_csv(open(p)?)?;
        }
        Ok(set)
    }
}

/// Sets a dotted key in a TOML tree. The value is parsed as TOML and falls
/// back to a plain string.
pub fn apply_override(root: &mut toml::Value, spec: &str) -> Result<()> {
    let (key, raw) = spec
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{spec}' is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = format!("v = {raw}")
        .parse::<toml::Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::Config(format!("bad override key '{key}'")));
    }
    let mut node = root;
    for part in &parts[..parts.len() - 1] {
        let table = node
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override '{key}': '{part}' is not a section")))?;
        node = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
    }
    let table = node
        .as_table_mut()
        .ok_or_else(|| Error::Config(format!("override '{key}' does not name a section key")))?;
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}
