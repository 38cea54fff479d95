//! Lookup tables: airfoil section coefficients, main-rotor wake interference
//! factors and the stabilator schedule.
//!
//! Every table has an in-code default and a CSV form. The CSV files in
//! `data/` are written from the defaults and reproduce them exactly.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Deserialize;

use crate::error::{Error, Result};

/// Bracketing index and fraction for `x` on a strictly increasing grid,
/// clamped to the ends.
fn locate(grid: &[f64], x: f64) -> (usize, f64) {
    let n = grid.len();
    if n == 1 || x <= grid[0] {
        return (0, 0.0);
    }
    if x >= grid[n - 1] {
        return (n - 2, 1.0);
    }
    let i = grid.partition_point(|&g| g <= x) - 1;
    let i = i.min(n - 2);
    (i, (x - grid[i]) / (grid[i + 1] - grid[i]))
}

fn check_increasing(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Table(format!("{what} grid is empty")));
    }
    if grid.iter().any(|v| !v.is_finite()) {
        return Err(Error::Table(format!("{what} grid has non-finite entries")));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Table(format!("{what} grid is not strictly increasing")));
    }
    Ok(())
}

/// Unique sorted values of a column, used when reading gridded CSV rows.
fn unique_sorted(values: impl Iterator<Item = f64>) -> Vec<f64> {
    let mut v: Vec<f64> = values.collect();
    v.sort_by(|a, b| a.total_cmp(b));
    v.dedup();
    v
}

fn grid_index(grid: &[f64], x: f64) -> usize {
    grid.partition_point(|&g| g < x)
}

fn open(path: &Path) -> Result<std::fs::File> {
    std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn csv_reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .has_headers(true)
        .from_reader(r)
}

fn csv_err(e: csv::Error) -> Error {
    Error::Table(e.to_string())
}

fn check_headers<R: Read>(rdr: &mut csv::Reader<R>, expected: &[&str]) -> Result<()> {
    let headers = rdr.headers().map_err(csv_err)?;
    let got: Vec<&str> = headers.iter().collect();
    if got != expected {
        return Err(Error::Table(format!(
            "expected header {:?}, found {:?}",
            expected.join(","),
            got.join(",")
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionCoefficients {
    pub cl: f64,
    pub cd: f64,
    pub cm: f64,
}

/// Section coefficients on an angle-of-attack by Mach grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AirfoilTable {
    alpha: Vec<f64>,
    mach: Vec<f64>,
    // row-major: alpha index major, mach minor
    cl: Vec<f64>,
    cd: Vec<f64>,
    cm: Vec<f64>,
    // uniform alpha spacing lets the hot path skip the binary search
    uniform: Option<(f64, f64)>,
}

#[derive(Deserialize)]
struct AirfoilRow {
    alpha_deg: f64,
    mach: f64,
    cl: f64,
    cd: f64,
    cm: f64,
}

impl AirfoilTable {
    /// `alpha` in radians. Value vectors are alpha-major.
    pub fn new(
        alpha: Vec<f64>,
        mach: Vec<f64>,
        cl: Vec<f64>,
        cd: Vec<f64>,
        cm: Vec<f64>,
    ) -> Result<Self> {
        check_increasing(&alpha, "alpha")?;
        check_increasing(&mach, "mach")?;
        if alpha.len() < 2 {
            return Err(Error::Table("alpha grid needs at least two nodes".into()));
        }
        if alpha[0] > -PI + 1e-9 || alpha[alpha.len() - 1] < PI - 1e-9 {
            return Err(Error::Table("alpha grid must cover [-180, 180] deg".into()));
        }
        if mach[0] > 0.3 || mach[mach.len() - 1] < 0.9 {
            return Err(Error::Table("mach grid must span at least [0.3, 0.9]".into()));
        }
        let n = alpha.len() * mach.len();
        if cl.len() != n || cd.len() != n || cm.len() != n {
            return Err(Error::Table(format!(
                "expected {n} coefficient nodes, got {}/{}/{}",
                cl.len(),
                cd.len(),
                cm.len()
            )));
        }
        if cl.iter().chain(&cd).chain(&cm).any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite coefficient".into()));
        }
        if cd.iter().any(|&v| v <= 0.0) {
            return Err(Error::Table("drag coefficient must be positive".into()));
        }
        let step = (alpha[alpha.len() - 1] - alpha[0]) / (alpha.len() - 1) as f64;
        let uniform = alpha
            .iter()
            .enumerate()
            .all(|(i, &a)| (a - (alpha[0] + i as f64 * step)).abs() <= 1e-9 * step)
            .then_some((alpha[0], 1.0 / step));
        Ok(Self {
            alpha,
            mach,
            cl,
            cd,
            cm,
            uniform,
        })
    }

    fn from_fn(
        alpha_deg: &[f64],
        mach: &[f64],
        f: impl Fn(f64, f64) -> (f64, f64, f64),
    ) -> Result<Self> {
        let alpha: Vec<f64> = alpha_deg.iter().map(|a| a.to_radians()).collect();
        let mut cl = Vec::with_capacity(alpha.len() * mach.len());
        let mut cd = Vec::with_capacity(cl.capacity());
        let mut cm = Vec::with_capacity(cl.capacity());
        for &a in &alpha {
            for &m in mach {
                let (l, d, c) = f(a, m);
                cl.push(l);
                cd.push(d);
                cm.push(c);
            }
        }
        Self::new(alpha, mach.to_vec(), cl, cd, cm)
    }

    /// Default main-rotor section: thin-airfoil lift with a stall break at
    /// +/-14 deg, flat-plate behaviour beyond it, compressibility scaling of
    /// the lift slope up to M = 0.75.
    pub fn default_rotor() -> Self {
        let mach = [0.0, 0.3, 0.4, 0.5, 0.6, 0.7, 0.75, 0.8, 0.9, 1.0];
        let stall = 14f64.to_radians();
        Self::from_fn(&default_alpha_deg(), &mach, |a, m| {
            if a.abs() <= stall {
                (TAU * a * compressibility(m), 0.008 + 1.25 * a * a, 0.0)
            } else {
                flat_plate(a, 0.008)
            }
        })
        .expect("default rotor table is well formed")
    }

    /// Default low-aspect-ratio tail surface section.
    pub fn default_tail() -> Self {
        let stall = 20f64.to_radians();
        Self::from_fn(&default_alpha_deg(), &[0.0, 1.0], |a, _| {
            if a.abs() <= stall {
                let cl = 3.5 * a;
                (cl, 0.01 + 0.07 * cl * cl, 0.0)
            } else {
                flat_plate(a, 0.01)
            }
        })
        .expect("default tail table is well formed")
    }

    pub fn alpha_grid(&self) -> &[f64] {
        &self.alpha
    }

    pub fn mach_grid(&self) -> &[f64] {
        &self.mach
    }

    /// Bilinear lookup. Alpha is wrapped into [-pi, pi]; Mach is clamped to
    /// the grid.
    pub fn lookup(&self, alpha: f64, mach: f64) -> SectionCoefficients {
        let (ia, ta, im, tm) = self.locate(alpha, mach);
        let nm = self.mach.len();
        let k00 = ia * nm + im;
        let k10 = k00 + nm;
        let (k01, k11) = if nm > 1 { (k00 + 1, k10 + 1) } else { (k00, k10) };
        let interp = |v: &[f64]| {
            let lo = v[k00] + tm * (v[k01] - v[k00]);
            let hi = v[k10] + tm * (v[k11] - v[k10]);
            lo + ta * (hi - lo)
        };
        SectionCoefficients {
            cl: interp(&self.cl),
            cd: interp(&self.cd),
            cm: interp(&self.cm),
        }
    }

    /// Lift and drag only; the rotor loop does not need the moment.
    #[inline]
    pub fn lift_drag(&self, alpha: f64, mach: f64) -> (f64, f64) {
        let (ia, ta, im, tm) = self.locate(alpha, mach);
        let nm = self.mach.len();
        let k00 = ia * nm + im;
        let k10 = k00 + nm;
        let (k01, k11) = if nm > 1 { (k00 + 1, k10 + 1) } else { (k00, k10) };
        let cl_lo = self.cl[k00] + tm * (self.cl[k01] - self.cl[k00]);
        let cl_hi = self.cl[k10] + tm * (self.cl[k11] - self.cl[k10]);
        let cd_lo = self.cd[k00] + tm * (self.cd[k01] - self.cd[k00]);
        let cd_hi = self.cd[k10] + tm * (self.cd[k11] - self.cd[k10]);
        (cl_lo + ta * (cl_hi - cl_lo), cd_lo + ta * (cd_hi - cd_lo))
    }

    #[inline]
    fn locate(&self, alpha: f64, mach: f64) -> (usize, f64, usize, f64) {
        let a = if (-PI..=PI).contains(&alpha) {
            alpha
        } else if alpha.is_finite() {
            alpha - TAU * (alpha / TAU).round()
        } else {
            0.0
        };
        let (ia, ta) = match self.uniform {
            Some((a0, inv)) => {
                let x = (a - a0) * inv;
                let i = (x.floor().max(0.0) as usize).min(self.alpha.len() - 2);
                (i, (x - i as f64).clamp(0.0, 1.0))
            }
            None => locate(&self.alpha, a),
        };
        let (im, tm) = if self.mach.len() == 1 {
            (0, 0.0)
        } else {
            locate(&self.mach, mach)
        };
        (ia, ta, im, tm)
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        check_headers(&mut rdr, &["alpha_deg", "mach", "cl", "cd", "cm"])?;
        let rows: Vec<AirfoilRow> = rdr
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(csv_err)?;
        if rows.is_empty() {
            return Err(Error::Table("airfoil table has no rows".into()));
        }
        let alpha_deg = unique_sorted(rows.iter().map(|r| r.alpha_deg));
        let mach = unique_sorted(rows.iter().map(|r| r.mach));
        let n = alpha_deg.len() * mach.len();
        if rows.len() != n {
            return Err(Error::Table(format!(
                "airfoil rows do not form a full grid ({} rows for {}x{})",
                rows.len(),
                alpha_deg.len(),
                mach.len()
            )));
        }
        let mut cl = vec![f64::NAN; n];
        let mut cd = vec![f64::NAN; n];
        let mut cm = vec![f64::NAN; n];
        for r in &rows {
            let k = grid_index(&alpha_deg, r.alpha_deg) * mach.len() + grid_index(&mach, r.mach);
            if !cl[k].is_nan() {
                return Err(Error::Table(format!(
                    "duplicate node alpha {} mach {}",
                    r.alpha_deg, r.mach
                )));
            }
            cl[k] = r.cl;
            cd[k] = r.cd;
            cm[k] = r.cm;
        }
        let alpha = alpha_deg.iter().map(|a| a.to_radians()).collect();
        Self::new(alpha, mach, cl, cd, cm)
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Table(e.to_string());
        w.write_record(["alpha_deg", "mach", "cl", "cd", "cm"]).map_err(io)?;
        for (ia, a) in self.alpha.iter().enumerate() {
            for (im, m) in self.mach.iter().enumerate() {
                let k = ia * self.mach.len() + im;
                w.write_record([
                    a.to_degrees().to_string(),
                    m.to_string(),
                    self.cl[k].to_string(),
                    self.cd[k].to_string(),
                    self.cm[k].to_string(),
                ])
                .map_err(io)?;
            }
        }
        w.flush().map_err(|e| Error::Table(e.to_string()))
    }
}

fn default_alpha_deg() -> Vec<f64> {
    (0..=720).map(|i| -180.0 + 0.5 * i as f64).collect()
}

/// Lift-slope multiplier, unity up to M = 0.3 and held constant above 0.75.
fn compressibility(mach: f64) -> f64 {
    if mach <= 0.3 {
        1.0
    } else {
        let m = mach.min(0.75);
        (1.0 - 0.09f64).sqrt() / (1.0 - m * m).sqrt()
    }
}

fn flat_plate(a: f64, cd0: f64) -> (f64, f64, f64) {
    let s = a.sin();
    ((2.0 * a).sin(), cd0 + 2.0 * s * s, -0.5 * s)
}

/// Surfaces that sit in the main-rotor wake.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WakeReceiver {
    TailRotor,
    HorizontalTail,
    VerticalTail,
}

impl WakeReceiver {
    pub const ALL: [WakeReceiver; 3] = [
        WakeReceiver::TailRotor,
        WakeReceiver::HorizontalTail,
        WakeReceiver::VerticalTail,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            WakeReceiver::TailRotor => "tail_rotor",
            WakeReceiver::HorizontalTail => "horizontal_tail",
            WakeReceiver::VerticalTail => "vertical_tail",
        }
    }

    fn index(&self) -> usize {
        *self as usize
    }
}

impl fmt::Display for WakeReceiver {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for WakeReceiver {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        WakeReceiver::ALL
            .into_iter()
            .find(|c| c.as_str() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown wake receiver '{s}'")))
    }
}

/// Nondimensional wake velocity factors (multiplied by the uniform inflow
/// velocity) on a wake-skew by longitudinal-flap grid.
#[derive(Debug, Clone, PartialEq)]
pub struct InterferenceTable {
    chi: Vec<f64>,
    beta1c: Vec<f64>,
    // [receiver][chi][beta1c]
    vx: [Vec<f64>; 3],
    vz: [Vec<f64>; 3],
}

#[derive(Deserialize)]
struct InterferenceRow {
    chi_deg: f64,
    beta1c_deg: f64,
    component: String,
    vx: f64,
    vz: f64,
}

impl InterferenceTable {
    pub fn new(chi: Vec<f64>, beta1c: Vec<f64>, vx: [Vec<f64>; 3], vz: [Vec<f64>; 3]) -> Result<Self> {
        check_increasing(&chi, "chi")?;
        check_increasing(&beta1c, "beta1c")?;
        if chi[0] > 1e-12 || chi[chi.len() - 1] < PI / 2.0 - 1e-9 {
            return Err(Error::Table("chi grid must cover [0, 90] deg".into()));
        }
        let n = chi.len() * beta1c.len();
        for v in vx.iter().chain(vz.iter()) {
            if v.len() != n {
                return Err(Error::Table(format!("expected {n} interference nodes")));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::Table("non-finite interference factor".into()));
            }
        }
        Ok(Self { chi, beta1c, vx, vz })
    }

    /// Downwash lobe peaked in hover and vanishing when the wake is swept
    /// fully aft.
    pub fn default_table() -> Self {
        let chi: Vec<f64> = (0..=18).map(|i| (5.0 * i as f64).to_radians()).collect();
        let beta1c: Vec<f64> = (-2..=2).map(|i| (5.0 * i as f64).to_radians()).collect();
        let peak = [0.4, 1.5, 0.8];
        let mut vz: [Vec<f64>; 3] = Default::default();
        for (k, a) in peak.iter().enumerate() {
            for &x in &chi {
                for &b in &beta1c {
                    let c = x.cos();
                    vz[k].push(a * c * c * (1.0 + 0.5 * b));
                }
            }
        }
        let n = chi.len() * beta1c.len();
        let vx = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
        Self::new(chi, beta1c, vx, vz).expect("default interference table is well formed")
    }

    pub fn chi_grid(&self) -> &[f64] {
        &self.chi
    }

    pub fn beta1c_grid(&self) -> &[f64] {
        &self.beta1c
    }

    /// Bilinear lookup with clamping at the grid edges. Returns (vx, vz).
    pub fn lookup(&self, chi: f64, beta1c: f64, receiver: WakeReceiver) -> (f64, f64) {
        let (i, t) = locate(&self.chi, chi);
        let (j, s) = locate(&self.beta1c, beta1c);
        let nb = self.beta1c.len();
        let j1 = (j + 1).min(nb - 1);
        let i1 = (i + 1).min(self.chi.len() - 1);
        let k = receiver.index();
        let interp = |v: &[f64]| {
            let lo = v[i * nb + j] + s * (v[i * nb + j1] - v[i * nb + j]);
            let hi = v[i1 * nb + j] + s * (v[i1 * nb + j1] - v[i1 * nb + j]);
            lo + t * (hi - lo)
        };
        (interp(&self.vx[k]), interp(&self.vz[k]))
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        check_headers(&mut rdr, &["chi_deg", "beta1c_deg", "component", "vx", "vz"])?;
        let rows: Vec<InterferenceRow> = rdr
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(csv_err)?;
        let chi_deg = unique_sorted(rows.iter().map(|r| r.chi_deg));
        let b_deg = unique_sorted(rows.iter().map(|r| r.beta1c_deg));
        let n = chi_deg.len() * b_deg.len();
        if rows.len() != 3 * n {
            return Err(Error::Table(format!(
                "interference rows do not form a full grid ({} rows for 3x{}x{})",
                rows.len(),
                chi_deg.len(),
                b_deg.len()
            )));
        }
        let mut vx: [Vec<f64>; 3] = [vec![f64::NAN; n], vec![f64::NAN; n], vec![f64::NAN; n]];
        let mut vz = vx.clone();
        for r in &rows {
            let c: WakeReceiver = r.component.parse()?;
            let k = grid_index(&chi_deg, r.chi_deg) * b_deg.len() + grid_index(&b_deg, r.beta1c_deg);
            if !vx[c.index()][k].is_nan() {
                return Err(Error::Table(format!(
                    "duplicate interference node chi {} beta1c {} {}",
                    r.chi_deg, r.beta1c_deg, c
                )));
            }
            vx[c.index()][k] = r.vx;
            vz[c.index()][k] = r.vz;
        }
        Self::new(
            chi_deg.iter().map(|a| a.to_radians()).collect(),
            b_deg.iter().map(|a| a.to_radians()).collect(),
            vx,
            vz,
        )
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Table(e.to_string());
        w.write_record(["chi_deg", "beta1c_deg", "component", "vx", "vz"]).map_err(io)?;
        for c in WakeReceiver::ALL {
            for (i, x) in self.chi.iter().enumerate() {
                for (j, b) in self.beta1c.iter().enumerate() {
                    let k = i * self.beta1c.len() + j;
                    w.write_record([
                        x.to_degrees().to_string(),
                        b.to_degrees().to_string(),
                        c.as_str().to_string(),
                        self.vx[c.index()][k].to_string(),
                        self.vz[c.index()][k].to_string(),
                    ])
                    .map_err(io)?;
                }
            }
        }
        w.flush().map_err(|e| Error::Table(e.to_string()))
    }
}

/// Piecewise-linear stabilator incidence against airspeed.
#[derive(Debug, Clone, PartialEq)]
pub struct StabilatorSchedule {
    speed_kts: Vec<f64>,
    incidence: Vec<f64>,
}

#[derive(Deserialize)]
struct StabilatorRow {
    speed_kts: f64,
    incidence_deg: f64,
}

impl StabilatorSchedule {
    /// `incidence` in radians.
    pub fn new(speed_kts: Vec<f64>, incidence: Vec<f64>) -> Result<Self> {
        check_increasing(&speed_kts, "stabilator speed")?;
        if speed_kts.len() != incidence.len() {
            return Err(Error::Table("stabilator speed/incidence length mismatch".into()));
        }
        if incidence.iter().any(|v| !v.is_finite()) {
            return Err(Error::Table("non-finite stabilator incidence".into()));
        }
        if incidence.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::Table("stabilator incidence must not increase with speed".into()));
        }
        Ok(Self {
            speed_kts,
            incidence,
        })
    }

    pub fn default_schedule() -> Self {
        Self::new(vec![0.0, 80.0], vec![40f64.to_radians(), 0.0])
            .expect("default schedule is well formed")
    }

    pub fn incidence(&self, airspeed_kts: f64) -> f64 {
        if self.speed_kts.len() == 1 {
            return self.incidence[0];
        }
        let (i, t) = locate(&self.speed_kts, airspeed_kts);
        self.incidence[i] + t * (self.incidence[i + 1] - self.incidence[i])
    }

    pub fn breakpoints(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.speed_kts.iter().copied().zip(self.incidence.iter().copied())
    }

    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv_reader(reader);
        check_headers(&mut rdr, &["speed_kts", "incidence_deg"])?;
        let rows: Vec<StabilatorRow> = rdr
            .deserialize()
            .collect::<std::result::Result<_, _>>()
            .map_err(csv_err)?;
        Self::new(
            rows.iter().map(|r| r.speed_kts).collect(),
            rows.iter().map(|r| r.incidence_deg.to_radians()).collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        let io = |e: csv::Error| Error::Table(e.to_string());
        w.write_record(["speed_kts", "incidence_deg"]).map_err(io)?;
        for (s, i) in self.breakpoints() {
            w.write_record([s.to_string(), i.to_degrees().to_string()]).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Table(e.to_string()))
    }
}

/// Free-function form of [`AirfoilTable::lookup`].
pub fn lookup_airfoil(table: &AirfoilTable, alpha: f64, mach: f64) -> Result<SectionCoefficients> {
    if mach < 0.0 || !mach.is_finite() || !alpha.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "airfoil lookup at alpha {alpha}, mach {mach}"
        )));
    }
    Ok(table.lookup(alpha, mach))
}

/// Free-function form of [`InterferenceTable::lookup`] taking a receiver name.
pub fn lookup_interference(
    table: &InterferenceTable,
    chi: f64,
    beta1c: f64,
    component: &str,
) -> Result<(f64, f64)> {
    Ok(table.lookup(chi, beta1c, component.parse()?))
}

pub fn stabilator_incidence(schedule: &StabilatorSchedule, airspeed_kts: f64) -> Result<f64> {
    if !(airspeed_kts >= 0.0) {
        return Err(Error::InvalidArgument(format!("airspeed {airspeed_kts} kts")));
    }
    Ok(schedule.incidence(airspeed_kts))
}

pub const ROTOR_AIRFOIL_FILE: &str = "rotor_airfoil.csv";
pub const TAIL_AIRFOIL_FILE: &str = "tail_airfoil.csv";
pub const INTERFERENCE_FILE: &str = "interference.csv";
pub const STABILATOR_FILE: &str = "stabilator.csv";

/// Environment variable naming a directory that replaces the default tables.
pub const TABLES_DIR_ENV: &str = "TRAC_TABLES_DIR";

/// All tables a vehicle needs.
#[derive(Debug, Clone, PartialEq)]
pub struct TableSet {
    pub rotor_airfoil: AirfoilTable,
    pub tail_airfoil: AirfoilTable,
    pub interference: InterferenceTable,
    pub stabilator: StabilatorSchedule,
}

impl Default for TableSet {
    fn default() -> Self {
        Self {
            rotor_airfoil: AirfoilTable::default_rotor(),
            tail_airfoil: AirfoilTable::default_tail(),
            interference: InterferenceTable::default_table(),
            stabilator: StabilatorSchedule::default_schedule(),
        }
    }
}

impl TableSet {
    /// Loads every table from `dir`. Missing files fall back to defaults.
    pub fn load_dir(dir: &Path) -> Result<Self> {
        let mut set = Self::default();
        let file = |name: &str| -> Option<PathBuf> {
            let p = dir.join(name);
            p.exists().then_some(p)
        };
        if let Some(p) = file(ROTOR_AIRFOIL_FILE) {
            set.rotor_airfoil = AirfoilTable::read_csv(open(&p)?).map_err(|e| in_file(&p, e))?;
        }
        if let Some(p) = file(TAIL_AIRFOIL_FILE) {
            set.tail_airfoil = AirfoilTable::read_csv(open(&p)?).map_err(|e| in_file(&p, e))?;
        }
        if let Some(p) = file(INTERFERENCE_FILE) {
            set.interference =
                InterferenceTable::read_csv(open(&p)?).map_err(|e| in_file(&p, e))?;
        }
        if let Some(p) = file(STABILATOR_FILE) {
            set.stabilator = StabilatorSchedule::read_csv(open(&p)?).map_err(|e| in_file(&p, e))?;
        }
        Ok(set)
    }

    /// Defaults, or the directory named by `TRAC_TABLES_DIR` when set.
    pub fn from_env() -> Result<Self> {
        match std::env::var_os(TABLES_DIR_ENV) {
            Some(dir) if !dir.is_empty() => {
                let dir = PathBuf::from(dir);
                if !dir.is_dir() {
                    return Err(Error::Config(format!(
                        "{TABLES_DIR_ENV}={} is not a directory",
                        dir.display()
                    )));
                }
                Self::load_dir(&dir)
            }
            _ => Ok(Self::default()),
        }
    }

    pub fn write_dir(&self, dir: &Path) -> Result<()> {
        let create = |name: &str| {
            let p = dir.join(name);
            std::fs::File::create(&p).map_err(|source| Error::Io { path: p, source })
        };
        self.rotor_airfoil.write_csv(create(ROTOR_AIRFOIL_FILE)?)?;
        self.tail_airfoil.write_csv(create(TAIL_AIRFOIL_FILE)?)?;
        self.interference.write_csv(create(INTERFERENCE_FILE)?)?;
        self.stabilator.write_csv(create(STABILATOR_FILE)?)
    }
}

fn in_file(path: &Path, e: Error) -> Error {
    match e {
        Error::Table(msg) => Error::Table(format!("{}: {msg}", path.display())),
        other => other,
    }
}

/// Directory of the CSV tables shipped with the crate.
pub fn bundled_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn symmetric_section_has_no_lift_at_zero() {
        let t = AirfoilTable::default_rotor();
        assert_eq!(t.lookup(0.0, 0.5).cl, 0.0);
    }

    #[test]
    fn thin_airfoil_lift() {
        let t = AirfoilTable::default_rotor();
        let c = t.lookup(0.05, 0.3);
        // 0.05 rad sits between two 0.5 deg nodes on a linear segment
        assert_abs_diff_eq!(c.cl, TAU * 0.05, epsilon = 1e-12);
        assert_abs_diff_eq!(c.cl, 0.3142, epsilon = 1e-4);
    }

    #[test]
    fn node_values_are_exact() {
        let t = AirfoilTable::default_rotor();
        let a = 10f64.to_radians();
        let c = t.lookup(a, 0.5);
        let expected = TAU * a * compressibility(0.5);
        assert_abs_diff_eq!(c.cl, expected, epsilon = 1e-14);
        assert!(t.lookup(3.0, 0.0).cd > 0.0);
    }

    #[test]
    fn alpha_wraps() {
        let t = AirfoilTable::default_rotor();
        let a = t.lookup(0.1, 0.4);
        let b = t.lookup(0.1 + TAU, 0.4);
        assert_abs_diff_eq!(a.cl, b.cl, epsilon = 1e-12);
    }

    #[test]
    fn interference_edges() {
        let t = InterferenceTable::default_table();
        let (_, vz) = t.lookup(PI / 2.0, 0.03, WakeReceiver::HorizontalTail);
        assert_abs_diff_eq!(vz, 0.0, epsilon = 1e-15);
        for r in [WakeReceiver::HorizontalTail, WakeReceiver::VerticalTail] {
            let hover = t.lookup(0.0, 0.0, r).1;
            for &c in t.chi_grid() {
                assert!(t.lookup(c, 0.0, r).1 <= hover);
            }
        }
        let node = t.lookup(t.chi_grid()[3], t.beta1c_grid()[1], WakeReceiver::TailRotor);
        let c = t.chi_grid()[3].cos();
        assert_abs_diff_eq!(node.1, 0.4 * c * c * (1.0 + 0.5 * t.beta1c_grid()[1]), epsilon = 1e-15);
        assert!(lookup_interference(&t, 0.0, 0.0, "main_rotor").is_err());
    }

    #[test]
    fn stabilator() {
        let s = StabilatorSchedule::default_schedule();
        assert_eq!(s.incidence(0.0), 40f64.to_radians());
        assert_eq!(s.incidence(200.0), 0.0);
        assert_abs_diff_eq!(s.incidence(40.0), 20f64.to_radians(), epsilon = 1e-15);
        assert!(StabilatorSchedule::new(vec![0.0, 10.0], vec![0.0, 0.1]).is_err());
    }

    // degree text round trips lose the last bit of the radian grids
    fn assert_close(a: &[f64], b: &[f64]) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert_abs_diff_eq!(x, y, epsilon = 1e-12 * (1.0 + x.abs()));
        }
    }

    fn assert_sets_close(a: &TableSet, b: &TableSet) {
        for (x, y) in [(&a.rotor_airfoil, &b.rotor_airfoil), (&a.tail_airfoil, &b.tail_airfoil)] {
            for (p, q) in [(&x.alpha, &y.alpha), (&x.mach, &y.mach), (&x.cl, &y.cl), (&x.cd, &y.cd), (&x.cm, &y.cm)] {
                assert_close(p, q);
            }
            assert_eq!(x.uniform.is_some(), y.uniform.is_some());
        }
        let (x, y) = (&a.interference, &b.interference);
        assert_close(&x.chi, &y.chi);
        assert_close(&x.beta1c, &y.beta1c);
        for k in 0..3 {
            assert_close(&x.vx[k], &y.vx[k]);
            assert_close(&x.vz[k], &y.vz[k]);
        }
        assert_close(&a.stabilator.speed_kts, &b.stabilator.speed_kts);
        assert_close(&a.stabilator.incidence, &b.stabilator.incidence);
    }

    #[test]
    fn csv_round_trip() {
        let set = TableSet::default();
        let dir = tempfile::tempdir().unwrap();
        set.write_dir(dir.path()).unwrap();
        let back = TableSet::load_dir(dir.path()).unwrap();
        assert_sets_close(&set, &back);
    }

    #[test]
    fn bundled_csv_matches_defaults() {
        let back = TableSet::load_dir(&bundled_dir()).unwrap();
        assert_sets_close(&back, &TableSet::default());
        for f in [ROTOR_AIRFOIL_FILE, TAIL_AIRFOIL_FILE, INTERFERENCE_FILE, STABILATOR_FILE] {
            assert!(bundled_dir().join(f).exists(), "{f} missing");
        }
    }

    #[test]
    fn malformed_csv() {
        let bad = "alpha_deg,mach,cl,cd\n0,0,0,0.01\n";
        assert!(matches!(AirfoilTable::read_csv(bad.as_bytes()), Err(Error::Table(_))));
        let sparse = "# comment\nalpha_deg,mach,cl,cd,cm\n-180,0,0,0.01,0\n180,0,0,0.01,0\n180,1,0,0.01,0\n";
        assert!(AirfoilTable::read_csv(sparse.as_bytes()).is_err());
        let stab = "# schedule\nspeed_kts,incidence_deg\n0,10\n50,0\n";
        let s = StabilatorSchedule::read_csv(stab.as_bytes()).unwrap();
        assert_abs_diff_eq!(s.incidence(25.0), 5f64.to_radians(), epsilon = 1e-15);
    }

    fn corners(t: &AirfoilTable, a: f64, m: f64) -> (f64, f64) {
        let (ia, _, im, _) = t.locate(a, m);
        let nm = t.mach.len();
        let im1 = (im + 1).min(nm - 1);
        let vals = [
            t.cl[ia * nm + im],
            t.cl[ia * nm + im1],
            t.cl[(ia + 1) * nm + im],
            t.cl[(ia + 1) * nm + im1],
        ];
        (
            vals.iter().cloned().fold(f64::INFINITY, f64::min),
            vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        )
    }

    proptest! {
        #[test]
        fn bilinear_is_bounded(a in -3.14..3.14f64, m in 0.0..1.2f64) {
            let t = AirfoilTable::default_rotor();
            let (lo, hi) = corners(&t, a, m);
            let c = t.lookup(a, m).cl;
            prop_assert!(c >= lo - 1e-12 && c <= hi + 1e-12);
            prop_assert!(t.lookup(a, m).cd > 0.0);
        }

        #[test]
        fn lookup_is_continuous(a in -3.0..3.0f64, m in 0.0..1.0f64) {
            let t = AirfoilTable::default_rotor();
            let x = t.lookup(a, m);
            let y = t.lookup(a + 1e-9, m + 1e-9);
            prop_assert!((x.cl - y.cl).abs() < 1e-6);
            prop_assert!((x.cd - y.cd).abs() < 1e-6);
        }

        #[test]
        fn interference_is_bounded(c in 0.0..1.6f64, b in -0.2..0.2f64) {
            let t = InterferenceTable::default_table();
            let (_, vz) = t.lookup(c, b, WakeReceiver::HorizontalTail);
            prop_assert!((0.0..=1.5 * 1.1).contains(&vz));
        }
    }
}
