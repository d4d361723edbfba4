//! JSON run configurations.

use std::collections::BTreeSet;
use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tgeom::sampling::UniformStream;
use tgeom::{Distortion, Domain, Point64, Region64, SigmaSpace, Space64, PRNG_NAME};

pub fn load<C: DeserializeOwned>(path: &Path) -> Result<C> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("invalid config {}", path.display()))
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpaceSpec {
    Euclidean {
        dim: usize,
    },
    Minkowski {
        dim: usize,
    },
    Table {
        sigma: Vec<Vec<f64>>,
    },
    Restrict {
        base: Box<SpaceSpec>,
        region: RegionSpec,
    },
    Deformed {
        base: Box<SpaceSpec>,
        distortion: DistortionSpec,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum RegionSpec {
    Halfspace { normal: Vec<f64>, offset: f64 },
    BallComplement { center: Vec<f64>, radius: f64 },
    Ids { ids: BTreeSet<usize> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DistortionSpec {
    Scale { lambda: f64 },
    AffineCap { d: f64, sigma0: f64 },
    Quadratic { kappa: f64 },
}

impl SpaceSpec {
    pub fn build(&self) -> Result<Space64> {
        Ok(match self {
            SpaceSpec::Euclidean { dim } => Space64::euclidean(*dim)?,
            SpaceSpec::Minkowski { dim } => Space64::minkowski(*dim)?,
            SpaceSpec::Table { sigma } => Space64::table(sigma.clone())?,
            SpaceSpec::Restrict { base, region } => {
                let region = match region {
                    RegionSpec::Halfspace { normal, offset } => Region64::HalfSpace {
                        normal: normal.clone(),
                        offset: *offset,
                    },
                    RegionSpec::BallComplement { center, radius } => Region64::BallComplement {
                        center: center.clone(),
                        radius: *radius,
                    },
                    RegionSpec::Ids { ids } => Region64::Ids(ids.clone()),
                };
                base.build()?.restricted(region)?
            }
            SpaceSpec::Deformed { base, distortion } => {
                let d = match *distortion {
                    DistortionSpec::Scale { lambda } => Distortion::Scale { lambda },
                    DistortionSpec::AffineCap { d, sigma0 } => Distortion::AffineCap { d, sigma0 },
                    DistortionSpec::Quadratic { kappa } => Distortion::Quadratic { kappa },
                };
                base.build()?.deformed(d)?
            }
        })
    }
}

/// A point given either as coordinates or as a table id.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PointSpec {
    Id(usize),
    Coords(Vec<f64>),
}

impl PointSpec {
    pub fn to_point(&self) -> Point64 {
        match self {
            PointSpec::Id(i) => Point64::Id(*i),
            PointSpec::Coords(c) => Point64::Coords(c.clone()),
        }
    }
}

/// Uniform random points in [lo, hi)^dim, drawn until `count` of them lie in
/// the space's domain.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    pub count: usize,
    pub seed: u64,
    #[serde(default = "default_lo")]
    pub lo: f64,
    #[serde(default = "default_hi")]
    pub hi: f64,
}

fn default_lo() -> f64 {
    -1.0
}

fn default_hi() -> f64 {
    1.0
}

/// Provenance of sampled points, echoed in reports.
#[derive(Debug, Clone, Serialize)]
pub struct SamplingRecord {
    pub prng: &'static str,
    pub seed: u64,
    pub count: usize,
    pub lo: f64,
    pub hi: f64,
    pub draws: usize,
}

const MAX_DRAWS_PER_POINT: usize = 1000;

impl SampleSpec {
    pub fn draw(&self, space: &Space64) -> Result<(Vec<Point64>, SamplingRecord)> {
        let dim = match space.domain() {
            Domain::Coordinates { dim } => dim,
            Domain::Table { .. } => bail!("sample: random sampling requires coordinates"),
        };
        ensure!(self.count > 0, "sample.count must be positive");
        ensure!(
            self.lo < self.hi && self.lo.is_finite() && self.hi.is_finite(),
            "sample.lo must be below sample.hi"
        );
        let mut stream = UniformStream::new(self.seed);
        let mut points = Vec::with_capacity(self.count);
        let mut draws = 0;
        while points.len() < self.count {
            ensure!(
                draws < MAX_DRAWS_PER_POINT * self.count,
                "sample: domain too small, {draws} draws gave {} points",
                points.len()
            );
            draws += 1;
            let p = Point64::Coords((0..dim).map(|_| stream.next_in(self.lo, self.hi)).collect());
            if space.contains(&p) {
                points.push(p);
            }
        }
        let record = SamplingRecord {
            prng: PRNG_NAME,
            seed: self.seed,
            count: self.count,
            lo: self.lo,
            hi: self.hi,
            draws,
        };
        Ok((points, record))
    }
}

/// Sample points for the reconstruction commands: explicit `points`, a
/// random `sample`, or every point of a finite space.
pub fn sample_points(
    space: &Space64,
    points: &Option<Vec<PointSpec>>,
    sample: &Option<SampleSpec>,
) -> Result<(Vec<Point64>, Option<SamplingRecord>)> {
    match (points, sample) {
        (Some(_), Some(_)) => bail!("give either points or sample, not both"),
        (Some(pts), None) => {
            let pts: Vec<Point64> = pts.iter().map(PointSpec::to_point).collect();
            for (i, p) in pts.iter().enumerate() {
                space.check(p).with_context(|| format!("points[{i}]"))?;
            }
            Ok((pts, None))
        }
        (None, Some(s)) => {
            let (pts, rec) = s.draw(space)?;
            Ok((pts, Some(rec)))
        }
        (None, None) => match space.finite_points() {
            Some(pts) => Ok((pts, None)),
            None => bail!("missing field `points` or `sample` for a coordinate space"),
        },
    }
}

pub fn positive_tol(name: &str, value: f64) -> Result<f64> {
    ensure!(value > 0.0 && value.is_finite(), "{name} must be a positive number, got {value}");
    Ok(value)
}

/// Either one value for every axis or one per axis.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum PerAxis<T> {
    All(T),
    Each(Vec<T>),
}

impl<T: Clone> PerAxis<T> {
    pub fn expand(&self, dim: usize, name: &str) -> Result<Vec<T>> {
        match self {
            PerAxis::All(v) => Ok(vec![v.clone(); dim]),
            PerAxis::Each(v) => {
                ensure!(v.len() == dim, "{name} needs {dim} entries, got {}", v.len());
                Ok(v.clone())
            }
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReconstructConfig {
    pub space: SpaceSpec,
    pub points: Option<Vec<PointSpec>>,
    pub sample: Option<SampleSpec>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbedTestConfig {
    pub space: SpaceSpec,
    pub points: Option<Vec<PointSpec>>,
    pub sample: Option<SampleSpec>,
    #[serde(default = "default_n_max")]
    pub n_max: usize,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ObjectSpec {
    Sphere { skeleton: Vec<PointSpec> },
    Ellipsoid { skeleton: Vec<PointSpec> },
    Segment { skeleton: Vec<PointSpec> },
    Ray { skeleton: Vec<PointSpec> },
    Tube { skeleton: Vec<PointSpec> },
    TubeSection { skeleton: Vec<PointSpec>, anchor: PointSpec },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub lo: PerAxis<f64>,
    pub hi: PerAxis<f64>,
    pub resolution: PerAxis<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleObjectConfig {
    pub space: SpaceSpec,
    pub object: ObjectSpec,
    pub grid: GridSpec,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeClassifyConfig {
    pub space: SpaceSpec,
    pub x: Vec<f64>,
    pub x_prime: Vec<f64>,
    #[serde(default = "default_resolutions")]
    pub resolutions: [usize; 2],
    #[serde(default = "default_box_lo")]
    pub lo: f64,
    #[serde(default = "default_box_hi")]
    pub hi: f64,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConeSampleConfig {
    pub space: SpaceSpec,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub q0: Vec<f64>,
    #[serde(default = "default_directions")]
    pub directions: usize,
    pub radius: Option<f64>,
    #[serde(default = "default_cone_tol")]
    pub tol: f64,
}

fn default_tol() -> f64 {
    tgeom::DEFAULT_TOL
}

fn default_cone_tol() -> f64 {
    tgeom::DEFAULT_CONE_TOL
}

fn default_n_max() -> usize {
    tgeom::reconstruct::DEFAULT_MAX_DIM
}

fn default_resolutions() -> [usize; 2] {
    [41, 81]
}

fn default_box_lo() -> f64 {
    -2.0
}

fn default_box_hi() -> f64 {
    2.0
}

fn default_directions() -> usize {
    2000
}
