//! Scenario description and its text format.
//!
//! Keys carry their units. Vehicle and gain sets come either from separate
//! files (`vehicle_file`, `gains_file`, resolved against the scenario's
//! directory) or inline under the `vehicle.` and `gains.` prefixes, with inline
//! keys overriding file values.

use std::path::{Path, PathBuf};

use super::config::{parse_f64, ConfigDoc, ConfigError, Reader};
use super::trajectory::{RouletteParams, SampledTrajectory, TanhAccel, Trajectory};
use crate::control::{AllocationSettings, FeedforwardSource, ModeFlags};
use crate::dynamics::{BatteryDrift, BodyAxis, DisturbanceModel, ForceKnot, NoiseConfig};
use crate::flatness::ReferenceSample;
use crate::{ControlGains, Mat3, ThrottleCurve, Vec3, VehicleParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    /// plant constants; the controller uses them too, with the inertia scaled by `delta`
    pub vehicle: VehicleParams,
    pub gains: ControlGains,
    /// ESC and controller throttle map; `None` uses the default fit
    pub throttle: Option<ThrottleCurve>,
    pub trajectory: Trajectory,
    pub disturbance: DisturbanceModel,
    pub flags: ModeFlags,
    /// controller inertia over true inertia
    pub delta: f64,
    /// s
    pub duration: f64,
    pub seed: u64,
    pub noise: NoiseConfig,
    pub battery: BatteryDrift,
    /// Hz
    pub physics_rate: f64,
    /// Hz
    pub control_rate: f64,
    /// rad/s
    pub filter_cutoff: f64,
    pub allocation: AllocationSettings,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            name: "scenario".into(),
            vehicle: VehicleParams::default(),
            gains: ControlGains::default(),
            throttle: None,
            trajectory: Trajectory::Hover { position: Vec3::zeros(), yaw: 0.0 },
            disturbance: DisturbanceModel::None,
            flags: ModeFlags::default(),
            delta: 1.0,
            duration: 10.0,
            seed: 0,
            noise: NoiseConfig::default(),
            battery: BatteryDrift::default(),
            physics_rate: 8000.0,
            control_rate: 2000.0,
            filter_cutoff: 188.5,
            allocation: AllocationSettings::default(),
        }
    }
}

impl Scenario {
    pub fn throttle_curve(&self) -> ThrottleCurve {
        self.throttle.unwrap_or_else(|| ThrottleCurve::default_for(&self.vehicle))
    }

    /// Physics substeps per control tick.
    pub fn substeps(&self) -> usize {
        (self.physics_rate / self.control_rate).round() as usize
    }

    pub fn tick_count(&self) -> usize {
        (self.duration * self.control_rate).round() as usize
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return bad("duration_s must be positive".into());
        }
        if !(self.control_rate > 0.0 && self.physics_rate >= self.control_rate && self.physics_rate.is_finite()) {
            return bad("rates must satisfy 0 < control_rate_hz <= physics_rate_hz".into());
        }
        let ratio = self.physics_rate / self.control_rate;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return bad("physics_rate_hz must be an integer multiple of control_rate_hz".into());
        }
        if !(self.filter_cutoff > 0.0 && self.filter_cutoff < std::f64::consts::PI * self.control_rate) {
            return bad("filter_cutoff_radps must lie between 0 and the Nyquist rate".into());
        }
        if !(self.delta > 0.0 && self.delta.is_finite()) {
            return bad("mode.delta must be positive".into());
        }
        self.vehicle.validate().map_err(|e| ConfigError::Invalid(format!("vehicle: {e}")))?;
        self.gains.validate().map_err(|e| ConfigError::Invalid(format!("gains: {e}")))?;
        if !self.throttle_curve().is_increasing_on(self.vehicle.omega_min, self.vehicle.omega_max) {
            return bad("throttle curve must be increasing on the motor speed range".into());
        }
        self.disturbance.validate().map_err(|e| ConfigError::Invalid(format!("disturbance: {e}")))?;
        let n = &self.noise;
        if [n.accel, n.gyro, n.motor_speed, n.position, n.velocity, n.attitude].iter().any(|s| !(*s >= 0.0)) {
            return bad("noise standard deviations must be non-negative".into());
        }
        if !(self.battery.final_factor > 0.0 && self.battery.duration >= 0.0) {
            return bad("battery.final_factor must be positive and drift duration non-negative".into());
        }
        let a = &self.allocation;
        if !(a.max_thrust_increase >= 0.0 && a.tolerance > 0.0 && a.max_iterations > 0) {
            return bad("allocation settings out of range".into());
        }
        if let Trajectory::Sampled(s) = &self.trajectory {
            if s.times.is_empty() {
                return bad("sampled trajectory is empty".into());
            }
        }
        Ok(())
    }

    /// Controller-side vehicle model.
    pub fn controller_params(&self) -> VehicleParams {
        let mut p = self.vehicle.clone();
        p.inertia *= self.delta;
        p
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = read_text(path)?;
        Self::parse(&text, path.parent())
    }

    /// Parses scenario text. File references resolve against `base`; without
    /// a base directory they are rejected.
    pub fn parse(text: &str, base: Option<&Path>) -> Result<Self, ConfigError> {
        let doc = ConfigDoc::parse(text)?;
        let mut r = doc.reader();
        let mut s = Scenario::default();

        if let Some(name) = r.string("name")? {
            s.name = name;
        }
        if let Some(file) = r.string("vehicle_file")? {
            let text = read_text(&resolve(base, &file)?)?;
            (s.vehicle, s.throttle) = parse_vehicle(&text).map_err(|e| nested(&file, e))?;
        }
        if let Some(file) = r.string("gains_file")? {
            let text = read_text(&resolve(base, &file)?)?;
            s.gains = parse_gains(&text).map_err(|e| nested(&file, e))?;
        }
        if let Some(c) = read_vehicle(&mut r, "vehicle.", &mut s.vehicle)? {
            s.throttle = Some(c);
        }
        read_gains(&mut r, "gains.", &mut s.gains)?;

        set(&mut s.duration, r.f64("duration_s")?);
        set(&mut s.seed, r.u64("seed")?);
        set(&mut s.physics_rate, r.f64("physics_rate_hz")?);
        set(&mut s.control_rate, r.f64("control_rate_hz")?);
        set(&mut s.filter_cutoff, r.f64("filter_cutoff_radps")?);

        s.trajectory = read_trajectory(&mut r, base)?;
        s.disturbance = read_disturbances(&mut r)?;

        set(&mut s.flags.feedforward, r.bool("mode.feedforward")?);
        set(&mut s.flags.non_incremental, r.bool("mode.non_incremental")?);
        set(&mut s.flags.linearized_allocation, r.bool("mode.linearized_allocation")?);
        if let Some(src) = r.parse_with("mode.feedforward_source", |v| match v {
            "reference" => Ok(FeedforwardSource::Reference),
            "measured" => Ok(FeedforwardSource::Measured),
            other => Err(format!("expected reference or measured, found `{other}`")),
        })? {
            s.flags.feedforward_source = src;
        }
        set(&mut s.delta, r.f64("mode.delta")?);
        set(&mut s.allocation.max_thrust_increase, r.f64("allocation.max_thrust_increase")?);

        set(&mut s.noise.accel, r.f64("noise.accel_mps2")?);
        set(&mut s.noise.gyro, r.f64("noise.gyro_radps")?);
        set(&mut s.noise.motor_speed, r.f64("noise.motor_radps")?);
        set(&mut s.noise.position, r.f64("noise.position_m")?);
        set(&mut s.noise.velocity, r.f64("noise.velocity_mps")?);
        set(&mut s.noise.attitude, r.f64("noise.attitude_rad")?);

        s.battery = BatteryDrift { final_factor: 1.0, duration: s.duration };
        set(&mut s.battery.final_factor, r.f64("battery.final_factor")?);
        set(&mut s.battery.duration, r.f64("battery.drift_duration_s")?);

        r.finish()?;
        s.validate()?;
        Ok(s)
    }
}

fn set<T>(slot: &mut T, v: Option<T>) {
    if let Some(v) = v {
        *slot = v;
    }
}

fn read_text(path: &Path) -> Result<String, ConfigError> {
    std::fs::read_to_string(path).map_err(|e| ConfigError::Io { path: path.display().to_string(), msg: e.to_string() })
}

fn resolve(base: Option<&Path>, file: &str) -> Result<PathBuf, ConfigError> {
    let p = Path::new(file);
    if p.is_absolute() {
        return Ok(p.to_path_buf());
    }
    match base {
        Some(b) => Ok(b.join(p)),
        None => Err(ConfigError::Io { path: file.into(), msg: "file references need a scenario directory".into() }),
    }
}

fn nested(file: &str, e: ConfigError) -> ConfigError {
    ConfigError::Io { path: file.into(), msg: e.to_string() }
}

/// Parses a standalone vehicle file; also returns the throttle map if given.
pub fn parse_vehicle(text: &str) -> Result<(VehicleParams, Option<ThrottleCurve>), ConfigError> {
    let doc = ConfigDoc::parse(text)?;
    let mut r = doc.reader();
    let mut p = VehicleParams::default();
    let curve = read_vehicle(&mut r, "", &mut p)?;
    r.finish()?;
    p.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok((p, curve))
}

/// Parses a standalone gains file.
pub fn parse_gains(text: &str) -> Result<ControlGains, ConfigError> {
    let doc = ConfigDoc::parse(text)?;
    let mut r = doc.reader();
    let mut g = ControlGains::default();
    read_gains(&mut r, "", &mut g)?;
    r.finish()?;
    g.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(g)
}

fn read_vehicle(r: &mut Reader<'_>, pre: &str, p: &mut VehicleParams) -> Result<Option<ThrottleCurve>, ConfigError> {
    let k = |name: &str| format!("{pre}{name}");
    set(&mut p.mass, r.f64(&k("mass_kg"))?);
    set(&mut p.gravity, r.f64(&k("gravity_mps2"))?);
    if let Some(j) = r.vec3(&k("inertia_kgm2"))? {
        p.inertia = Mat3::from_diagonal(&j);
    }
    set(&mut p.rotor_inertia, r.f64(&k("rotor_inertia_kgm2"))?);
    set(&mut p.k_tau, r.f64(&k("k_tau_n_per_radps2"))?);
    set(&mut p.k_mu_z, r.f64(&k("k_mu_z_nm_per_radps2"))?);
    set(&mut p.arm_x, r.f64(&k("arm_x_m"))?);
    set(&mut p.arm_y, r.f64(&k("arm_y_m"))?);
    set(&mut p.motor_time_constant, r.f64(&k("motor_time_constant_s"))?);
    set(&mut p.omega_min, r.f64(&k("omega_min_radps"))?);
    set(&mut p.omega_max, r.f64(&k("omega_max_radps"))?);
    let curve = r.parse_with(&k("throttle_coeffs"), |v| {
        let c = super::config::parse_list(v)?;
        match c[..] {
            [c0, c1, c2] => Ok(ThrottleCurve { c0, c1, c2 }),
            _ => Err(format!("expected c0, c1, c2, found {} numbers", c.len())),
        }
    })?;
    Ok(curve)
}

fn read_gains(r: &mut Reader<'_>, pre: &str, g: &mut ControlGains) -> Result<(), ConfigError> {
    let k = |name: &str| format!("{pre}{name}");
    set(&mut g.k_x, r.vec3(&k("k_x"))?);
    set(&mut g.k_v, r.vec3(&k("k_v"))?);
    set(&mut g.k_a, r.vec3(&k("k_a"))?);
    set(&mut g.k_xi, r.vec3(&k("k_xi"))?);
    set(&mut g.k_omega, r.vec3(&k("k_omega"))?);
    set(&mut g.k_motor_integral, r.vec4(&k("k_motor_integral"))?);
    Ok(())
}

fn read_trajectory(r: &mut Reader<'_>, base: Option<&Path>) -> Result<Trajectory, ConfigError> {
    let kind = r.string("trajectory")?.unwrap_or_else(|| "hover".into());
    match kind.as_str() {
        "hover" => Ok(Trajectory::Hover {
            position: r.vec3("hover.position_m")?.unwrap_or_else(Vec3::zeros),
            yaw: r.f64("hover.yaw_rad")?.unwrap_or(0.0),
        }),
        "roulette" => {
            let mut p = RouletteParams::default();
            set(&mut p.r1, r.f64("roulette.r1_m")?);
            set(&mut p.r2, r.f64("roulette.r2_m")?);
            set(&mut p.r3, r.f64("roulette.r3_m")?);
            set(&mut p.r4, r.f64("roulette.r4_m")?);
            set(&mut p.r5, r.f64("roulette.r5_m")?);
            set(&mut p.k1, r.f64("roulette.k1_radps")?);
            set(&mut p.k2, r.f64("roulette.k2_radps")?);
            set(&mut p.k3, r.f64("roulette.k3_radps")?);
            set(&mut p.rz, r.f64("roulette.rz_m")?);
            Ok(Trajectory::Roulette(p))
        }
        "tanh_accel" => {
            let t = TanhAccel {
                amplitude: r.f64("tanh.amplitude_mps2")?.unwrap_or(1.0),
                direction: r.vec3("tanh.direction")?.unwrap_or_else(Vec3::x),
                start: r.vec3("tanh.start_m")?.unwrap_or_else(Vec3::zeros),
                yaw: r.f64("tanh.yaw_rad")?.unwrap_or(0.0),
            };
            if !(t.direction.norm() > 0.0) {
                return Err(ConfigError::Invalid("tanh.direction must be non-zero".into()));
            }
            Ok(Trajectory::TanhAccel(t))
        }
        "sampled" => {
            let file = r.string("sampled.file")?.ok_or_else(|| ConfigError::Missing("sampled.file".into()))?;
            let text = read_text(&resolve(base, &file)?)?;
            let traj = parse_sampled_trajectory(&text).map_err(|e| nested(&file, e))?;
            Ok(Trajectory::Sampled(traj))
        }
        other => {
            let line = r.all("trajectory").first().map(|e| e.line).unwrap_or(0);
            Err(ConfigError::Value {
                line,
                key: "trajectory".into(),
                msg: format!("unknown trajectory `{other}` (hover, roulette, tanh_accel, sampled)"),
            })
        }
    }
}

fn read_disturbances(r: &mut Reader<'_>) -> Result<DisturbanceModel, ConfigError> {
    let mut ids: Vec<String> = r
        .keys_with_prefix("disturbance.")
        .into_iter()
        .filter(|k| k.matches('.').count() == 1)
        .collect();
    ids.sort_by_key(|k| k["disturbance.".len()..].parse::<u64>().unwrap_or(u64::MAX));
    let mut parts = Vec::new();
    for id in ids {
        let entry = r.all(&id);
        if entry.len() > 1 {
            return Err(ConfigError::Duplicate { line: entry[1].line, key: id.clone(), first: entry[0].line });
        }
        let entry = entry[0];
        let key = |f: &str| format!("{id}.{f}");
        let model = match entry.value.as_str() {
            "constant_force" => DisturbanceModel::ConstantForce {
                force: r.vec3(&key("force_n"))?.unwrap_or_else(Vec3::zeros),
                moment: r.vec3(&key("moment_nm"))?.unwrap_or_else(Vec3::zeros),
                t_on: r.f64(&key("t_on_s"))?.unwrap_or(0.0),
                t_off: r.f64(&key("t_off_s"))?.unwrap_or(f64::MAX),
            },
            "wire_pull" => {
                let mut knots = Vec::new();
                for e in r.all(&key("knot_t_s_f_n")) {
                    let v = super::config::parse_list(&e.value)
                        .map_err(|msg| ConfigError::Value { line: e.line, key: e.key.clone(), msg })?;
                    let [t, fx, fy, fz] = v[..] else {
                        return Err(ConfigError::Value {
                            line: e.line,
                            key: e.key.clone(),
                            msg: format!("expected t, fx, fy, fz, found {} numbers", v.len()),
                        });
                    };
                    knots.push(ForceKnot { time: t, force: Vec3::new(fx, fy, fz) });
                }
                DisturbanceModel::WirePull { knots }
            }
            "drag_plate" => DisturbanceModel::DragPlate {
                area: r.f64(&key("area_m2"))?.unwrap_or(0.0512),
                drag_coefficient: r.f64(&key("drag_coefficient"))?.unwrap_or(1.2),
                normal: r
                    .parse_with(&key("normal"), |v| match v {
                        "x" => Ok(BodyAxis::X),
                        "y" => Ok(BodyAxis::Y),
                        "z" => Ok(BodyAxis::Z),
                        other => Err(format!("expected x, y or z, found `{other}`")),
                    })?
                    .unwrap_or(BodyAxis::X),
                arm: r.vec3(&key("arm_m"))?.unwrap_or(Vec3::new(0.0, 0.0, 0.08)),
            },
            "body_drag" => DisturbanceModel::BodyDrag {
                c_lin: r.f64(&key("c_lin_ns_per_m"))?.unwrap_or(0.0),
                c_quad: r.f64(&key("c_quad_ns2_per_m2"))?.unwrap_or(0.0),
            },
            other => {
                return Err(ConfigError::Value {
                    line: entry.line,
                    key: id.clone(),
                    msg: format!("unknown disturbance `{other}` (constant_force, wire_pull, drag_plate, body_drag)"),
                })
            }
        };
        model.validate().map_err(|msg| ConfigError::Value { line: entry.line, key: id.clone(), msg })?;
        parts.push(model);
    }
    Ok(match parts.len() {
        0 => DisturbanceModel::None,
        1 => parts.pop().unwrap_or_default(),
        _ => DisturbanceModel::Composite(parts),
    })
}

/// Column names of a sampled trajectory file.
pub const SAMPLED_HEADER: [&str; 19] =
    ["t", "x", "y", "z", "vx", "vy", "vz", "ax", "ay", "az", "jx", "jy", "jz", "sx", "sy", "sz", "psi", "psid", "psidd"];

/// Reads a comma-separated sampled trajectory with the [`SAMPLED_HEADER`] header.
pub fn parse_sampled_trajectory(text: &str) -> Result<SampledTrajectory, ConfigError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let Some((hl, header)) = lines.next() else {
        return Err(ConfigError::Syntax { line: 1, msg: "empty trajectory file".into() });
    };
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != SAMPLED_HEADER {
        return Err(ConfigError::Syntax { line: hl + 1, msg: format!("header must be `{}`", SAMPLED_HEADER.join(",")) });
    }
    let mut times = Vec::new();
    let mut samples = Vec::new();
    for (i, l) in lines {
        let line = i + 1;
        let v: Vec<f64> = l
            .split(',')
            .map(parse_f64)
            .collect::<Result<_, _>>()
            .map_err(|msg| ConfigError::Syntax { line, msg })?;
        if v.len() != SAMPLED_HEADER.len() {
            return Err(ConfigError::Syntax { line, msg: format!("expected {} columns, found {}", SAMPLED_HEADER.len(), v.len()) });
        }
        if let Some(&last) = times.last() {
            if !(v[0] > last) {
                return Err(ConfigError::Syntax { line, msg: "time must be strictly increasing".into() });
            }
        }
        let v3 = |i: usize| Vec3::new(v[i], v[i + 1], v[i + 2]);
        times.push(v[0]);
        samples.push(ReferenceSample {
            position: v3(1),
            velocity: v3(4),
            acceleration: v3(7),
            jerk: v3(10),
            snap: v3(13),
            yaw: v[16],
            yaw_rate: v[17],
            yaw_accel: v[18],
        });
    }
    if times.is_empty() {
        return Err(ConfigError::Syntax { line: hl + 1, msg: "trajectory has no samples".into() });
    }
    Ok(SampledTrajectory { times, samples })
}
