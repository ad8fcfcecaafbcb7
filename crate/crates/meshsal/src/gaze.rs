//! Gaze log processing: rotation compensation for a spinning stimulus,
//! ray intersection of the log against the mesh, I-VT fixation
//! classification, and cone-based Gaussian smoothing into a per-face
//! saliency map. Also houses the synthetic gaze generator used in place
//! of a live VR session.

use std::f64::consts::PI;
use std::fs;
use std::path::Path;

use nalgebra::{Point3, Rotation3, Unit, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::mesh::TexturedMesh;
use crate::raycast::{Bvh, Hit, Ray};
use crate::saliency::SaliencyMap;

#[derive(Debug, Clone, Copy)]
pub struct GazeSample {
    /// Milliseconds since session start.
    pub timestamp: f64,
    pub gaze_origin: Point3<f64>,
    pub gaze_direction: Vector3<f64>,
    pub head_position: Point3<f64>,
    pub head_direction: Vector3<f64>,
}

/// Stimulus rotation: clockwise seen from above is the negative sign about
/// the world up axis.
#[derive(Debug, Clone, Copy)]
pub struct RotationSchedule {
    pub axis: Unit<Vector3<f64>>,
    /// Degrees per second.
    pub angular_speed: f64,
    pub sign: f64,
    /// Session start, ms.
    pub t0: f64,
}

impl Default for RotationSchedule {
    fn default() -> Self {
        RotationSchedule {
            axis: Vector3::y_axis(),
            angular_speed: 15.0,
            sign: -1.0,
            t0: 0.0,
        }
    }
}

impl RotationSchedule {
    /// Model-to-world rotation angle at time t (radians).
    pub fn angle_at(&self, t_ms: f64) -> f64 {
        self.sign * self.angular_speed * (t_ms - self.t0) / 1000.0 * PI / 180.0
    }

    pub fn model_to_world(&self, t_ms: f64) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&self.axis, self.angle_at(t_ms))
    }

    pub fn world_to_model(&self, t_ms: f64) -> Rotation3<f64> {
        Rotation3::from_axis_angle(&self.axis, -self.angle_at(t_ms))
    }
}

/// Rotate a world-frame gaze sample into the static model frame.
pub fn world_to_model(sample: &GazeSample, schedule: &RotationSchedule) -> Ray {
    let rot = schedule.world_to_model(sample.timestamp);
    Ray::new(rot * sample.gaze_origin, rot * sample.gaze_direction)
}

/// One gaze sample resolved against the mesh in the model frame.
#[derive(Debug, Clone, Copy)]
pub struct GazeIntersection {
    pub sample: GazeSample,
    /// The sample's ray in the model frame.
    pub model_ray: Ray,
    /// Front-facing closest hit, if any.
    pub hit: Option<Hit>,
}

/// Intersect every sample with the mesh. Back-facing hits
/// (normal . (origin - point) <= 0) are discarded.
pub fn intersect_log(
    log: &[GazeSample],
    mesh: &TexturedMesh,
    bvh: &Bvh,
    schedule: &RotationSchedule,
) -> Result<Vec<GazeIntersection>> {
    if log.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(log
        .par_iter()
        .map(|sample| {
            let model_ray = world_to_model(sample, schedule);
            let hit = bvh.closest_hit(mesh, &model_ray).filter(|h| {
                mesh.face_normal(h.face as usize)
                    .dot(&(model_ray.origin - h.point))
                    > 0.0
            });
            GazeIntersection {
                sample: *sample,
                model_ray,
                hit,
            }
        })
        .collect())
}

#[derive(Debug, Clone, Copy)]
pub struct IvtParams {
    /// Degrees per second; samples below are fixation candidates.
    pub velocity_threshold: f64,
    /// Minimum fixation duration, ms.
    pub min_fixation_duration: f64,
    /// Consecutive fixations closer than this (degrees, seen from the
    /// viewpoint) and with a small gap are merged.
    pub merge_angle: f64,
    /// Maximum gap for merging, ms.
    pub merge_gap: f64,
    /// Sample gaps larger than this multiple of the median dt split segments.
    pub gap_split_factor: f64,
}

impl Default for IvtParams {
    fn default() -> Self {
        IvtParams {
            velocity_threshold: 30.0,
            min_fixation_duration: 100.0,
            merge_angle: 0.5,
            merge_gap: 75.0,
            gap_split_factor: 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Fixation {
    /// Model-frame face the fixation is anchored to.
    pub face: u32,
    pub barycentric: [f64; 3],
    /// Model frame, on the surface of `face`.
    pub surface_point: Point3<f64>,
    /// Model-frame mean gaze origin over the fixation.
    pub viewpoint: Point3<f64>,
    pub start: f64,
    pub end: f64,
    pub duration: f64,
    pub mean_view_distance: f64,
}

/// Velocity-threshold (I-VT) fixation classification over an intersected log.
pub fn classify_fixations(
    intersections: &[GazeIntersection],
    mesh: &TexturedMesh,
    params: &IvtParams,
) -> Result<Vec<Fixation>> {
    if intersections.is_empty() {
        return Err(Error::EmptyLog);
    }
    let n = intersections.len();
    let mut dts: Vec<f64> = intersections
        .windows(2)
        .map(|w| w[1].sample.timestamp - w[0].sample.timestamp)
        .collect();
    let median_dt = if dts.is_empty() {
        0.0
    } else {
        let mut sorted = dts.clone();
        sorted.sort_by(f64::total_cmp);
        sorted[sorted.len() / 2]
    };
    if dts.is_empty() {
        return Ok(Vec::new());
    }
    dts.push(median_dt); // dwell weight for the final sample

    // Angular velocity per segment, assigned to the leading sample.
    let mut velocity = vec![0.0; n];
    for i in 0..n - 1 {
        let a = intersections[i].sample.gaze_direction;
        let b = intersections[i + 1].sample.gaze_direction;
        let angle = a.normalize().dot(&b.normalize()).clamp(-1.0, 1.0).acos() * 180.0 / PI;
        let dt_s = (dts[i] / 1000.0).max(1e-9);
        velocity[i] = angle / dt_s;
    }
    velocity[n - 1] = velocity[n - 2];

    let gap_limit = params.gap_split_factor * median_dt;
    let mut fixations = Vec::new();
    let mut group: Vec<usize> = Vec::new();
    for i in 0..n {
        let splits_segment = i > 0 && dts[i - 1] > gap_limit;
        let candidate = velocity[i] < params.velocity_threshold && intersections[i].hit.is_some();
        if splits_segment || !candidate {
            flush_group(&mut fixations, &group, intersections, &dts, mesh, params);
            group.clear();
        }
        if candidate {
            group.push(i);
        }
    }
    flush_group(&mut fixations, &group, intersections, &dts, mesh, params);

    Ok(merge_fixations(fixations, mesh, params))
}

fn flush_group(
    fixations: &mut Vec<Fixation>,
    group: &[usize],
    intersections: &[GazeIntersection],
    dts: &[f64],
    mesh: &TexturedMesh,
    params: &IvtParams,
) {
    if group.is_empty() {
        return;
    }
    let start = intersections[group[0]].sample.timestamp;
    let end = intersections[*group.last().unwrap()].sample.timestamp;
    if end - start < params.min_fixation_duration {
        return;
    }

    // Modal face by total dwell time.
    let mut face_dwell: std::collections::HashMap<u32, f64> = std::collections::HashMap::new();
    let mut point_sum = Vector3::zeros();
    let mut origin_sum = Vector3::zeros();
    let mut dist_sum = 0.0;
    let mut weight_sum = 0.0;
    for &i in group {
        let hit = intersections[i].hit.unwrap();
        let w = dts[i].max(1e-9);
        *face_dwell.entry(hit.face).or_insert(0.0) += w;
        point_sum += hit.point.coords * w;
        origin_sum += intersections[i].model_ray.origin.coords * w;
        dist_sum += (intersections[i].model_ray.origin - hit.point).norm() * w;
        weight_sum += w;
    }
    let modal_face = face_dwell
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(a.0)))
        .map(|(&f, _)| f)
        .unwrap();
    let mean_point = Point3::from(point_sum / weight_sum);
    let (surface_point, barycentric) = mesh.closest_point_on_face(modal_face as usize, &mean_point);

    fixations.push(Fixation {
        face: modal_face,
        barycentric,
        surface_point,
        viewpoint: Point3::from(origin_sum / weight_sum),
        start,
        end,
        duration: end - start,
        mean_view_distance: dist_sum / weight_sum,
    });
}

fn merge_fixations(fixations: Vec<Fixation>, mesh: &TexturedMesh, params: &IvtParams) -> Vec<Fixation> {
    let mut out: Vec<Fixation> = Vec::with_capacity(fixations.len());
    for fix in fixations {
        if let Some(prev) = out.last_mut() {
            let gap = fix.start - prev.end;
            let vp = Point3::from((prev.viewpoint.coords + fix.viewpoint.coords) / 2.0);
            let a = (prev.surface_point - vp).normalize();
            let b = (fix.surface_point - vp).normalize();
            let angle = a.dot(&b).clamp(-1.0, 1.0).acos() * 180.0 / PI;
            if gap < params.merge_gap && angle < params.merge_angle {
                let w1 = prev.duration.max(1e-9);
                let w2 = fix.duration.max(1e-9);
                let total = w1 + w2;
                let merged_point =
                    Point3::from((prev.surface_point.coords * w1 + fix.surface_point.coords * w2) / total);
                let face = if w1 >= w2 { prev.face } else { fix.face };
                let (surface_point, barycentric) =
                    mesh.closest_point_on_face(face as usize, &merged_point);
                prev.face = face;
                prev.surface_point = surface_point;
                prev.barycentric = barycentric;
                prev.viewpoint =
                    Point3::from((prev.viewpoint.coords * w1 + fix.viewpoint.coords * w2) / total);
                prev.mean_view_distance =
                    (prev.mean_view_distance * w1 + fix.mean_view_distance * w2) / total;
                prev.end = fix.end;
                prev.duration += fix.duration;
                continue;
            }
        }
        out.push(fix);
    }
    out
}

#[derive(Debug, Clone, Copy)]
pub struct KernelParams {
    /// Visual angle (degrees) converted to a spatial sigma via
    /// sigma = distance * tan(angle).
    pub sigma_angle: f64,
    /// Contributions beyond this many sigmas are truncated to zero.
    pub cutoff_sigmas: f64,
    pub normalize: bool,
}

impl Default for KernelParams {
    fn default() -> Self {
        KernelParams {
            sigma_angle: 1.0,
            cutoff_sigmas: 3.0,
            normalize: true,
        }
    }
}

/// Cone-based Gaussian smoothing of fixations into a per-face map. Each
/// fixation deposits duration-weighted Gaussian mass on front-facing faces
/// within the truncation radius.
pub fn smooth_fixations(
    fixations: &[Fixation],
    mesh: &TexturedMesh,
    params: &KernelParams,
) -> Result<SaliencyMap> {
    let sigma_rad = params.sigma_angle * PI / 180.0;
    let values: Vec<f64> = (0..mesh.face_count())
        .into_par_iter()
        .map(|f| {
            let center = mesh.face_center(f);
            let normal = mesh.face_normal(f);
            let mut acc = 0.0;
            for fix in fixations {
                if normal.dot(&(fix.viewpoint - center)) <= 0.0 {
                    continue;
                }
                let sigma = fix.mean_view_distance * sigma_rad.tan();
                if sigma <= 0.0 {
                    continue;
                }
                let r = (center - fix.surface_point).norm();
                if r > params.cutoff_sigmas * sigma {
                    continue;
                }
                acc += fix.duration * (-r * r / (2.0 * sigma * sigma)).exp();
            }
            acc
        })
        .collect();
    let map = SaliencyMap::new(values)?;
    if map.total() <= 0.0 {
        return Err(Error::ZeroSaliencyTotal);
    }
    if params.normalize {
        map.normalize()
    } else {
        Ok(map)
    }
}

// ---------------------------------------------------------------------------
// Synthetic gaze generation

/// One scripted dwell: look at `face` for `dwell_ms`, then saccade toward
/// the next target over `saccade_ms`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioEvent {
    pub face: u32,
    pub dwell_ms: f64,
    pub saccade_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GazeScenario {
    pub events: Vec<ScenarioEvent>,
    /// Fixed world-frame viewer position.
    pub viewer: Point3<f64>,
    /// Isotropic angular noise sigma, degrees.
    pub noise_sigma: f64,
    pub seed: u64,
}

/// Generate a synthetic gaze log aimed at the scripted faces of a
/// (possibly rotating) stimulus. The scenario itself is the ground truth.
pub fn synth_gaze(
    scenario: &GazeScenario,
    mesh: &TexturedMesh,
    schedule: &RotationSchedule,
    rate_hz: f64,
) -> Result<Vec<GazeSample>> {
    for ev in &scenario.events {
        if ev.face as usize >= mesh.face_count() {
            return Err(Error::FaceIndexOutOfRange {
                face: ev.face as usize,
                count: mesh.face_count(),
            });
        }
    }
    if scenario.events.is_empty() {
        return Err(Error::invalid("scenario has no events"));
    }
    let dt = 1000.0 / rate_hz;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.seed);
    let noise_rad = scenario.noise_sigma * PI / 180.0;

    // Ideal world-frame pointing direction toward a model-frame target at t.
    let aim = |target: Point3<f64>, t: f64| -> Vector3<f64> {
        let world_target = schedule.model_to_world(t) * target;
        (world_target - scenario.viewer).normalize()
    };

    let mut samples = Vec::new();
    let mut t = schedule.t0;
    for (k, ev) in scenario.events.iter().enumerate() {
        let target = mesh.face_center(ev.face as usize);
        let dwell_end = t + ev.dwell_ms;
        while t < dwell_end {
            samples.push(make_sample(t, scenario, aim(target, t), noise_rad, &mut rng));
            t += dt;
        }
        if let Some(next) = scenario.events.get(k + 1) {
            let next_target = mesh.face_center(next.face as usize);
            let saccade_end = t + ev.saccade_ms;
            while t < saccade_end {
                let s = ((t - (dwell_end)) / ev.saccade_ms).clamp(0.0, 1.0);
                let dir = (aim(target, t) * (1.0 - s) + aim(next_target, t) * s).normalize();
                samples.push(make_sample(t, scenario, dir, noise_rad, &mut rng));
                t += dt;
            }
        }
    }
    if samples.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(samples)
}

fn make_sample(
    t: f64,
    scenario: &GazeScenario,
    dir: Vector3<f64>,
    noise_rad: f64,
    rng: &mut ChaCha8Rng,
) -> GazeSample {
    let dir = if noise_rad > 0.0 {
        // Gaussian perturbation in the tangent plane; isotropic for small sigma.
        let e1 = pick_orthonormal(&dir);
        let e2 = dir.cross(&e1);
        let (g1, g2) = gaussian_pair(rng);
        (dir + e1 * (g1 * noise_rad) + e2 * (g2 * noise_rad)).normalize()
    } else {
        dir
    };
    GazeSample {
        timestamp: t,
        gaze_origin: scenario.viewer,
        gaze_direction: dir,
        head_position: scenario.viewer,
        head_direction: dir,
    }
}

fn pick_orthonormal(v: &Vector3<f64>) -> Vector3<f64> {
    let other = if v.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    v.cross(&other).normalize()
}

fn gaussian_pair(rng: &mut ChaCha8Rng) -> (f64, f64) {
    // Box-Muller.
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    (r * (2.0 * PI * u2).cos(), r * (2.0 * PI * u2).sin())
}

// ---------------------------------------------------------------------------
// File formats

/// Read a gaze log: comma-separated with a header line, columns
/// `t_ms,ox,oy,oz,dx,dy,dz,hx,hy,hz,hdx,hdy,hdz`. Directions are
/// normalized on ingest and rejected when their norm is below 1e-6.
pub fn read_gaze_log(path: impl AsRef<Path>) -> Result<Vec<GazeSample>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut samples: Vec<GazeSample> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        if lineno == 0 || line.trim().is_empty() {
            continue;
        }
        let cols: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::parse(path, lineno + 1, "bad number"))?;
        if cols.len() != 13 {
            return Err(Error::parse(
                path,
                lineno + 1,
                format!("expected 13 columns, got {}", cols.len()),
            ));
        }
        let dir = Vector3::new(cols[4], cols[5], cols[6]);
        let head_dir = Vector3::new(cols[10], cols[11], cols[12]);
        if dir.norm() < 1e-6 || head_dir.norm() < 1e-6 {
            return Err(Error::parse(path, lineno + 1, "direction norm below 1e-6"));
        }
        if let Some(prev) = samples.last() {
            if cols[0] <= prev.timestamp {
                return Err(Error::parse(
                    path,
                    lineno + 1,
                    "timestamps must be strictly increasing",
                ));
            }
        }
        samples.push(GazeSample {
            timestamp: cols[0],
            gaze_origin: Point3::new(cols[1], cols[2], cols[3]),
            gaze_direction: dir.normalize(),
            head_position: Point3::new(cols[7], cols[8], cols[9]),
            head_direction: head_dir.normalize(),
        });
    }
    if samples.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(samples)
}

pub fn write_gaze_log(samples: &[GazeSample], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("t_ms,ox,oy,oz,dx,dy,dz,hx,hy,hz,hdx,hdy,hdz\n");
    for s in samples {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            s.timestamp,
            s.gaze_origin.x,
            s.gaze_origin.y,
            s.gaze_origin.z,
            s.gaze_direction.x,
            s.gaze_direction.y,
            s.gaze_direction.z,
            s.head_position.x,
            s.head_position.y,
            s.head_position.z,
            s.head_direction.x,
            s.head_direction.y,
            s.head_direction.z
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

/// Fixation report: `face,w0,w1,w2,start_ms,end_ms,duration_ms`.
pub fn write_fixation_report(fixations: &[Fixation], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::from("face,w0,w1,w2,start_ms,end_ms,duration_ms\n");
    for f in fixations {
        out.push_str(&format!(
            "{},{:.8e},{:.8e},{:.8e},{},{},{}\n",
            f.face, f.barycentric[0], f.barycentric[1], f.barycentric[2], f.start, f.end, f.duration
        ));
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shapes;

    fn sample_at(t: f64, origin: Point3<f64>, dir: Vector3<f64>) -> GazeSample {
        GazeSample {
            timestamp: t,
            gaze_origin: origin,
            gaze_direction: dir.normalize(),
            head_position: origin,
            head_direction: dir.normalize(),
        }
    }

    #[test]
    fn zero_angle_leaves_ray_unchanged() {
        let schedule = RotationSchedule::default();
        let s = sample_at(0.0, Point3::new(0.0, 0.0, -5.0), Vector3::new(0.0, 0.0, 1.0));
        let ray = world_to_model(&s, &schedule);
        assert!((ray.origin - s.gaze_origin).norm() < 1e-12);
        assert!((ray.direction - s.gaze_direction).norm() < 1e-12);
    }

    #[test]
    fn full_turn_is_identity() {
        let schedule = RotationSchedule::default();
        let s = sample_at(
            24_000.0,
            Point3::new(1.0, 2.0, -5.0),
            Vector3::new(0.3, -0.2, 1.0),
        );
        let ray = world_to_model(&s, &schedule);
        assert!((ray.origin - s.gaze_origin).norm() < 1e-9);
        assert!((ray.direction - s.gaze_direction.normalize()).norm() < 1e-9);
    }

    #[test]
    fn six_seconds_rotates_ninety_degrees() {
        // sign -1, 15 deg/s, 6 s: model-to-world angle -90, inverse +90 about +Y.
        let schedule = RotationSchedule::default();
        let s = sample_at(6_000.0, Point3::new(0.0, 0.0, -5.0), Vector3::new(0.0, 0.0, 1.0));
        let ray = world_to_model(&s, &schedule);
        assert!(
            (ray.origin - Point3::new(-5.0, 0.0, 0.0)).norm() < 1e-9,
            "origin = {:?}",
            ray.origin
        );
    }

    #[test]
    fn rotation_round_trip_is_identity() {
        use rand::Rng;
        let schedule = RotationSchedule::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(0.0..60_000.0);
            let p = Point3::new(
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
                rng.gen_range(-5.0..5.0),
            );
            let back = schedule.world_to_model(t) * (schedule.model_to_world(t) * p);
            assert!((back - p).norm() < 1e-9);
        }
    }

    #[test]
    fn intersect_log_hits_and_misses() {
        let mesh = shapes::icosphere(1.0, 2);
        let bvh = Bvh::build(&mesh);
        let schedule = RotationSchedule {
            angular_speed: 0.0,
            ..Default::default()
        };
        let toward = sample_at(0.0, Point3::new(0.0, 0.0, 4.0), Vector3::new(0.0, 0.0, -1.0));
        let away = sample_at(1.0, Point3::new(0.0, 0.0, 4.0), Vector3::new(0.0, 0.0, 1.0));
        let out = intersect_log(&[toward, away], &mesh, &bvh, &schedule).unwrap();
        assert!(out[0].hit.is_some());
        assert!(out[1].hit.is_none());
        // Front-facing only.
        let hit = out[0].hit.unwrap();
        assert!(mesh
            .face_normal(hit.face as usize)
            .dot(&(out[0].model_ray.origin - hit.point))
            > 0.0);
    }

    #[test]
    fn rotating_cube_hit_faces_follow_schedule() {
        let mesh = shapes::cube(2.0);
        let bvh = Bvh::build(&mesh);
        let schedule = RotationSchedule::default();
        // Lock the world gaze at the +z face direction; as the cube turns the
        // model-frame hit face must change.
        let log: Vec<GazeSample> = (0..240)
            .map(|i| {
                sample_at(
                    i as f64 * 50.0,
                    Point3::new(0.0, 0.0, 5.0),
                    Vector3::new(0.0, 0.0, -1.0),
                )
            })
            .collect();
        let out = intersect_log(&log, &mesh, &bvh, &schedule).unwrap();
        let first = out.first().unwrap().hit.unwrap().face;
        // After a quarter turn (6 s = sample 120) a different cube side faces us.
        let quarter = out[120].hit.unwrap().face;
        assert_ne!(first, quarter);
        // After a full turn (12 s at 50 ms would be sample 240; use 24 s rate)
        let log2: Vec<GazeSample> = vec![
            sample_at(0.0, Point3::new(0.0, 0.0, 5.0), Vector3::new(0.0, 0.0, -1.0)),
            sample_at(24_000.0, Point3::new(0.0, 0.0, 5.0), Vector3::new(0.0, 0.0, -1.0)),
        ];
        let out2 = intersect_log(&log2, &mesh, &bvh, &schedule).unwrap();
        assert_eq!(out2[0].hit.unwrap().face, out2[1].hit.unwrap().face);
    }

    fn static_schedule() -> RotationSchedule {
        RotationSchedule {
            angular_speed: 0.0,
            ..Default::default()
        }
    }

    #[test]
    fn constant_gaze_yields_one_fixation() {
        let mesh = shapes::icosphere(1.0, 1);
        let bvh = Bvh::build(&mesh);
        let schedule = static_schedule();
        let dt = 1000.0 / 120.0;
        let log: Vec<GazeSample> = (0..37)
            .map(|i| {
                sample_at(
                    i as f64 * dt,
                    Point3::new(0.0, 0.0, 4.0),
                    Vector3::new(0.0, 0.0, -1.0),
                )
            })
            .collect();
        let out = intersect_log(&log, &mesh, &bvh, &schedule).unwrap();
        let fixations = classify_fixations(&out, &mesh, &IvtParams::default()).unwrap();
        assert_eq!(fixations.len(), 1);
        let f = &fixations[0];
        assert!((f.duration - 300.0).abs() <= dt + 1e-9);
        assert!((f.barycentric.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        // Anchored to the front of the sphere.
        assert!(f.surface_point.z > 0.9);
    }

    #[test]
    fn saccade_separates_two_fixations() {
        let mesh = shapes::icosphere(1.0, 2);
        let bvh = Bvh::build(&mesh);
        let schedule = static_schedule();
        let scenario = GazeScenario {
            events: vec![
                ScenarioEvent {
                    face: front_face(&mesh, Vector3::new(0.0, 0.0, 1.0)),
                    dwell_ms: 300.0,
                    saccade_ms: 50.0,
                },
                ScenarioEvent {
                    face: front_face(&mesh, Vector3::new(0.5, 0.3, 1.0)),
                    dwell_ms: 300.0,
                    saccade_ms: 0.0,
                },
            ],
            viewer: Point3::new(0.0, 0.0, 4.0),
            noise_sigma: 0.0,
            seed: 3,
        };
        let log = synth_gaze(&scenario, &mesh, &schedule, 120.0).unwrap();
        let out = intersect_log(&log, &mesh, &bvh, &schedule).unwrap();
        let fixations = classify_fixations(&out, &mesh, &IvtParams::default()).unwrap();
        assert_eq!(fixations.len(), 2);
        assert_eq!(fixations[0].face, scenario.events[0].face);
        assert_eq!(fixations[1].face, scenario.events[1].face);
    }

    #[test]
    fn smooth_sweep_produces_no_fixations() {
        let mesh = shapes::icosphere(1.0, 1);
        let bvh = Bvh::build(&mesh);
        let schedule = static_schedule();
        // 45 deg/s sweep across the sphere from 4 units away.
        let dt = 1000.0 / 120.0;
        let log: Vec<GazeSample> = (0..120)
            .map(|i| {
                let t = i as f64 * dt;
                let angle = 45.0 * (t / 1000.0) * PI / 180.0 - 0.2;
                sample_at(
                    t,
                    Point3::new(0.0, 0.0, 4.0),
                    Vector3::new(angle.sin(), 0.0, -angle.cos()),
                )
            })
            .collect();
        let out = intersect_log(&log, &mesh, &bvh, &schedule).unwrap();
        let fixations = classify_fixations(&out, &mesh, &IvtParams::default()).unwrap();
        assert!(fixations.is_empty());
    }

    /// Face of `mesh` whose center direction best matches `dir` (front side).
    fn front_face(mesh: &TexturedMesh, dir: Vector3<f64>) -> u32 {
        let dir = dir.normalize();
        (0..mesh.face_count())
            .max_by(|&a, &b| {
                let ca = mesh.face_center(a).coords.normalize().dot(&dir);
                let cb = mesh.face_center(b).coords.normalize().dot(&dir);
                ca.total_cmp(&cb)
            })
            .unwrap() as u32
    }

    #[test]
    fn kernel_peak_at_fixated_face() {
        let mesh = shapes::icosphere(1.0, 2);
        let face = front_face(&mesh, Vector3::new(0.0, 0.0, 1.0));
        let fix = Fixation {
            face,
            barycentric: [1.0 / 3.0; 3],
            surface_point: mesh.face_center(face as usize),
            viewpoint: Point3::new(0.0, 0.0, 4.0),
            start: 0.0,
            end: 300.0,
            duration: 300.0,
            mean_view_distance: 3.0,
        };
        let map = smooth_fixations(&[fix], &mesh, &KernelParams::default()).unwrap();
        let argmax = map
            .values
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .unwrap()
            .0;
        assert_eq!(argmax as u32, face);
        assert!((map.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn no_fixations_is_zero_total_error() {
        let mesh = shapes::icosphere(1.0, 1);
        assert!(matches!(
            smooth_fixations(&[], &mesh, &KernelParams::default()),
            Err(Error::ZeroSaliencyTotal)
        ));
    }

    #[test]
    fn symmetric_fixations_get_equal_mass() {
        let mesh = shapes::icosphere(1.0, 2);
        let fa = front_face(&mesh, Vector3::new(0.0, 0.0, 1.0));
        let fb = front_face(&mesh, Vector3::new(0.0, 0.0, -1.0));
        let mk = |face: u32, vz: f64| Fixation {
            face,
            barycentric: [1.0 / 3.0; 3],
            surface_point: mesh.face_center(face as usize),
            viewpoint: Point3::new(0.0, 0.0, vz),
            start: 0.0,
            end: 250.0,
            duration: 250.0,
            mean_view_distance: 3.0,
        };
        let map = smooth_fixations(
            &[mk(fa, 4.0), mk(fb, -4.0)],
            &mesh,
            &KernelParams::default(),
        )
        .unwrap();
        assert!((map.values[fa as usize] - map.values[fb as usize]).abs() < 1e-9);
        assert!((map.total() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn duration_scaling_leaves_normalized_map_unchanged() {
        let mesh = shapes::icosphere(1.0, 2);
        let fa = front_face(&mesh, Vector3::new(0.3, 0.3, 1.0));
        let fb = front_face(&mesh, Vector3::new(-0.5, 0.1, 1.0));
        let mk = |face: u32, dur: f64| Fixation {
            face,
            barycentric: [1.0 / 3.0; 3],
            surface_point: mesh.face_center(face as usize),
            viewpoint: Point3::new(0.0, 0.0, 4.0),
            start: 0.0,
            end: dur,
            duration: dur,
            mean_view_distance: 3.0,
        };
        let params = KernelParams::default();
        let base = smooth_fixations(&[mk(fa, 200.0), mk(fb, 350.0)], &mesh, &params).unwrap();
        let scaled = smooth_fixations(&[mk(fa, 600.0), mk(fb, 1050.0)], &mesh, &params).unwrap();
        for (a, b) in base.values.iter().zip(&scaled.values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn synth_static_zero_noise_hits_target_face() {
        let mesh = shapes::icosphere(1.0, 2);
        let bvh = Bvh::build(&mesh);
        let schedule = static_schedule();
        let face = front_face(&mesh, Vector3::new(0.0, 0.0, 1.0));
        let scenario = GazeScenario {
            events: vec![ScenarioEvent {
                face,
                dwell_ms: 500.0,
                saccade_ms: 0.0,
            }],
            viewer: Point3::new(0.0, 0.0, 4.0),
            noise_sigma: 0.0,
            seed: 0,
        };
        let log = synth_gaze(&scenario, &mesh, &schedule, 120.0).unwrap();
        let out = intersect_log(&log, &mesh, &bvh, &schedule).unwrap();
        for inter in &out {
            assert_eq!(inter.hit.unwrap().face, face);
        }
    }

    #[test]
    fn synth_rotating_target_tracked_in_model_frame() {
        let mesh = shapes::icosphere(1.0, 2);
        let bvh = Bvh::build(&mesh);
        let schedule = RotationSchedule::default();
        let face = front_face(&mesh, Vector3::new(0.0, 0.0, 1.0));
        let scenario = GazeScenario {
            events: vec![ScenarioEvent {
                face,
                dwell_ms: 400.0,
                saccade_ms: 0.0,
            }],
            viewer: Point3::new(0.0, 0.0, 4.0),
            noise_sigma: 0.0,
            seed: 0,
        };
        let log = synth_gaze(&scenario, &mesh, &schedule, 120.0).unwrap();
        let out = intersect_log(&log, &mesh, &bvh, &schedule).unwrap();
        for inter in &out {
            assert_eq!(inter.hit.unwrap().face, face);
        }
    }

    #[test]
    fn hit_rate_decreases_with_noise() {
        let mesh = shapes::icosphere(1.0, 3);
        let bvh = Bvh::build(&mesh);
        let schedule = static_schedule();
        let face = front_face(&mesh, Vector3::new(0.0, 0.0, 1.0));
        let rate_for = |sigma: f64| {
            let scenario = GazeScenario {
                events: vec![ScenarioEvent {
                    face,
                    dwell_ms: 2000.0,
                    saccade_ms: 0.0,
                }],
                viewer: Point3::new(0.0, 0.0, 4.0),
                noise_sigma: sigma,
                seed: 9,
            };
            let log = synth_gaze(&scenario, &mesh, &schedule, 120.0).unwrap();
            let out = intersect_log(&log, &mesh, &bvh, &schedule).unwrap();
            let hits = out
                .iter()
                .filter(|i| i.hit.map(|h| h.face == face).unwrap_or(false))
                .count();
            hits as f64 / out.len() as f64
        };
        let r0 = rate_for(0.0);
        let r2 = rate_for(2.0);
        let r5 = rate_for(5.0);
        assert_eq!(r0, 1.0);
        assert!(r2 > r5, "rate(2deg)={r2} rate(5deg)={r5}");
        assert!(r5 < 1.0);
    }

    #[test]
    fn gaze_log_round_trip_and_validation() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("log.csv");
        let samples = vec![
            sample_at(0.0, Point3::new(0.0, 1.0, 4.0), Vector3::new(0.1, 0.0, -1.0)),
            sample_at(8.0, Point3::new(0.0, 1.0, 4.0), Vector3::new(0.0, 0.1, -1.0)),
        ];
        write_gaze_log(&samples, &path).unwrap();
        let back = read_gaze_log(&path).unwrap();
        assert_eq!(back.len(), 2);
        assert!((back[0].gaze_direction.norm() - 1.0).abs() < 1e-12);

        std::fs::write(&path, "t_ms,ox,oy,oz,dx,dy,dz,hx,hy,hz,hdx,hdy,hdz\n0,0,0,0,0,0,0,0,0,0,0,0,1\n").unwrap();
        assert!(read_gaze_log(&path).is_err()); // zero gaze direction

        std::fs::write(&path, "t_ms,ox,oy,oz,dx,dy,dz,hx,hy,hz,hdx,hdy,hdz\n").unwrap();
        assert!(matches!(read_gaze_log(&path), Err(Error::EmptyLog)));
    }
}
