use anyhow::{bail, ensure, Result};
use serde::Serialize;
use tgeom::collinearity::cone_sample;
use tgeom::objects::{broadcast_resolution, grid_sample, EnvelopeKind, EnvelopeObject, GridBox};
use tgeom::reconstruct::menger_embed_test;
use tgeom::{
    classify_tube, reconstruct, Domain, EmbeddabilityReport64, Point64, SigmaSpace, Space64,
    Tabulated64, TubeClass,
};

use crate::config::{
    positive_tol, sample_points, ConeSampleConfig, EmbedTestConfig, ObjectSpec, PointSpec,
    ReconstructConfig, SampleObjectConfig, SamplingRecord, TubeClassifyConfig,
};
use crate::format::{csv_header, csv_row, json};

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 2;

/// Text produced by a command. `summary` is a secondary JSON document
/// (cone-sample only).
pub struct Outcome {
    pub exit: u8,
    pub body: String,
    pub summary: Option<String>,
}

impl Outcome {
    fn verdict(body: String, positive: bool) -> Self {
        Self {
            exit: if positive { EXIT_OK } else { EXIT_NEGATIVE },
            body,
            summary: None,
        }
    }
}

#[derive(Serialize)]
struct SampledReport<'a> {
    #[serde(flatten)]
    report: &'a EmbeddabilityReport64,
    #[serde(skip_serializing_if = "Option::is_none")]
    sampling: Option<SamplingRecord>,
}

pub fn reconstruct_cmd(cfg: ReconstructConfig) -> Result<Outcome> {
    let tol = positive_tol("tol", cfg.tol)?;
    let space = cfg.space.build()?;
    let (points, sampling) = sample_points(&space, &cfg.points, &cfg.sample)?;
    let (_, report) = reconstruct(&space, &points, tol)?;
    let body = json(&SampledReport {
        report: &report,
        sampling,
    })?;
    Ok(Outcome::verdict(body, report.embeddable))
}

pub fn embed_test_cmd(cfg: EmbedTestConfig) -> Result<Outcome> {
    let tol = positive_tol("tol", cfg.tol)?;
    ensure!(cfg.n_max >= 1, "n_max must be at least 1");
    let space = cfg.space.build()?;
    let (points, sampling) = sample_points(&space, &cfg.points, &cfg.sample)?;
    let table = Tabulated64::from_space(&space, &points)?;
    let report = menger_embed_test(&table, cfg.n_max, tol)?;
    let body = json(&SampledReport {
        report: &report,
        sampling,
    })?;
    Ok(Outcome::verdict(body, report.embeddable))
}

fn coordinate_dim(space: &Space64) -> Result<usize> {
    match space.domain() {
        Domain::Coordinates { dim } => Ok(dim),
        Domain::Table { .. } => bail!("sampling requires coordinates"),
    }
}

fn coords_point(space: &Space64, name: &str, c: &[f64]) -> Result<Point64> {
    let dim = coordinate_dim(space)?;
    ensure!(c.len() == dim, "{name} needs {dim} coordinates, got {}", c.len());
    Ok(Point64::Coords(c.to_vec()))
}

fn skeleton(space: &Space64, pts: &[PointSpec]) -> Result<Vec<Point64>> {
    pts.iter()
        .enumerate()
        .map(|(i, p)| match p {
            PointSpec::Coords(c) => coords_point(space, &format!("object.skeleton[{i}]"), c),
            PointSpec::Id(_) => bail!("object.skeleton[{i}]: sampling requires coordinates"),
        })
        .collect()
}

fn build_object(space: &Space64, spec: &ObjectSpec) -> Result<EnvelopeObject<f64>> {
    let (kind, pts) = match spec {
        ObjectSpec::Sphere { skeleton } => (EnvelopeKind::Sphere, skeleton),
        ObjectSpec::Ellipsoid { skeleton } => (EnvelopeKind::Ellipsoid, skeleton),
        ObjectSpec::Segment { skeleton } => (EnvelopeKind::Segment, skeleton),
        ObjectSpec::Ray { skeleton } => (EnvelopeKind::Ray, skeleton),
        ObjectSpec::Tube { skeleton } => (EnvelopeKind::Tube, skeleton),
        ObjectSpec::TubeSection { skeleton, anchor } => {
            let anchor = match anchor {
                PointSpec::Coords(c) => coords_point(space, "object.anchor", c)?,
                PointSpec::Id(_) => bail!("object.anchor: sampling requires coordinates"),
            };
            (EnvelopeKind::TubeSection { anchor }, skeleton)
        }
    };
    Ok(EnvelopeObject::new(kind, skeleton(space, pts)?)?)
}

pub fn sample_object_cmd(cfg: SampleObjectConfig) -> Result<Outcome> {
    let tol = positive_tol("tol", cfg.tol)?;
    let space = cfg.space.build()?;
    let dim = coordinate_dim(&space)?;
    let obj = build_object(&space, &cfg.object)?;
    let lo = cfg.grid.lo.expand(dim, "grid.lo")?;
    let hi = cfg.grid.hi.expand(dim, "grid.hi")?;
    let res = cfg.grid.resolution.expand(dim, "grid.resolution")?;
    ensure!(res.iter().all(|&r| r >= 2), "grid.resolution must be at least 2");
    let members = grid_sample(&space, &obj, &GridBox { lo, hi }, &res, tol)?;
    let mut out = csv_header(dim, "x", &["envelope_value"]);
    for m in &members {
        out.push_str(&csv_row(&m.point, &[m.value], &[]));
    }
    Ok(Outcome::verdict(out, true))
}

#[derive(Serialize)]
struct DimensionWitness {
    resolutions: [usize; 2],
    counts: [usize; 2],
    exponent: Option<f64>,
}

#[derive(Serialize)]
struct TubeReport {
    class: TubeClass,
    sigma: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    dimension_witness: Option<DimensionWitness>,
}

/// Slope of log(count) against log(resolution).
fn scaling_exponent(res: [usize; 2], counts: [usize; 2]) -> Option<f64> {
    if counts.contains(&0) || res[0] == res[1] {
        return None;
    }
    Some((counts[1] as f64 / counts[0] as f64).ln() / (res[1] as f64 / res[0] as f64).ln())
}

pub fn tube_classify_cmd(cfg: TubeClassifyConfig) -> Result<Outcome> {
    let tol = positive_tol("tol", cfg.tol)?;
    let space = cfg.space.build()?;
    ensure!(
        matches!(space.root(), Space64::Minkowski(_)),
        "tube-classify requires a minkowski space"
    );
    let dim = coordinate_dim(&space)?;
    let x = coords_point(&space, "x", &cfg.x)?;
    let x_prime = coords_point(&space, "x_prime", &cfg.x_prime)?;
    ensure!(cfg.lo < cfg.hi, "lo must be below hi");
    ensure!(cfg.resolutions.iter().all(|&r| r >= 2), "resolutions must be at least 2");
    let class = classify_tube(&space, &x, &x_prime)?;
    let sigma = space.sigma(&x, &x_prime)?;
    let dimension_witness = if class == TubeClass::Null {
        None
    } else {
        let tube = EnvelopeObject::tube(vec![x, x_prime])?;
        let region = GridBox::cube(dim, cfg.lo, cfg.hi);
        let mut counts = [0; 2];
        for (slot, &r) in cfg.resolutions.iter().enumerate() {
            let res = broadcast_resolution(&[r], dim);
            counts[slot] = grid_sample(&space, &tube, &region, &res, tol)?.len();
        }
        Some(DimensionWitness {
            resolutions: cfg.resolutions,
            counts,
            exponent: scaling_exponent(cfg.resolutions, counts),
        })
    };
    let body = json(&TubeReport {
        class,
        sigma,
        dimension_witness,
    })?;
    Ok(Outcome::verdict(body, true))
}

fn lexicographic(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(std::cmp::Ordering::Equal)
}

#[derive(Serialize)]
struct ConeSummary {
    accepted_count: usize,
    aperture_radians: f64,
    tested: usize,
}

pub fn cone_sample_cmd(cfg: ConeSampleConfig) -> Result<Outcome> {
    let tol = positive_tol("tol", cfg.tol)?;
    ensure!(cfg.directions >= 1, "directions must be positive");
    if let Some(r) = cfg.radius {
        positive_tol("radius", r)?;
    }
    let space = cfg.space.build()?;
    let dim = coordinate_dim(&space)?;
    let p0 = coords_point(&space, "p0", &cfg.p0)?;
    let p1 = coords_point(&space, "p1", &cfg.p1)?;
    let q0 = coords_point(&space, "q0", &cfg.q0)?;
    let sample = cone_sample(&space, &p0, &p1, &q0, cfg.directions, cfg.radius, tol)?;
    let mut rows: Vec<_> = sample.accepted.iter().collect();
    rows.sort_by(|a, b| lexicographic(&a.direction, &b.direction));
    let mut csv = csv_header(dim, "d", &["defect", "orientation"]);
    for d in rows {
        let orientation = serde_json::to_value(d.orientation)?;
        csv.push_str(&csv_row(
            &d.direction,
            &[d.defect],
            &[orientation.as_str().unwrap_or_default()],
        ));
    }
    let summary = json(&ConeSummary {
        accepted_count: sample.accepted_count(),
        aperture_radians: sample.aperture,
        tested: sample.tested,
    })?;
    Ok(Outcome {
        exit: EXIT_OK,
        body: csv,
        summary: Some(summary),
    })
}
