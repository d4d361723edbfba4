//! Skeleton–envelope geometric objects.
//!
//! An elementary object is the zero set of an envelope function of a running
//! point R, parameterized by a finite skeleton of points. The envelopes here:
//!
//! | kind       | skeleton    | envelope f(R)                                  |
//! |------------|-------------|------------------------------------------------|
//! | sphere     | P₀ P₁       | √2σ(P₀,P₁) − √2σ(P₀,R)                         |
//! | ellipsoid  | P₀ P₁ P₂    | √2σ(P₀,P₂) + √2σ(P₁,P₂) − √2σ(P₀,R) − √2σ(P₁,R) |
//! | segment    | P₀ P₁       | √2σ(P₀,P₁) − √2σ(P₀,R) − √2σ(P₁,R)             |
//! | ray        | P₀ P₁       | √2σ(P₀,R) − √2σ(P₀,P₁) − √2σ(P₁,R)             |
//! | tube       | P₀ … Pₙ     | Fₙ₊₁(P₀ … Pₙ, R)                               |
//! | section    | P₀ … Pₙ, P  | max_l \|σ(P_l,R) − σ(P_l,P)\|                  |

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::{Real, Scalar};
use crate::sigma::{gram_matrix, negligible, Domain, Point, SigmaSpace, SignedLength};

/// Highest tube order accepted; Gram determinants beyond this lose too much
/// precision in `f64`.
pub const MAX_TUBE_ORDER: usize = 10;

#[derive(Debug, Clone, PartialEq)]
pub enum EnvelopeKind<T> {
    Sphere,
    Ellipsoid,
    Segment,
    Ray,
    Tube,
    TubeSection { anchor: Point<T> },
}

impl<T> EnvelopeKind<T> {
    pub fn name(&self) -> &'static str {
        match self {
            EnvelopeKind::Sphere => "sphere",
            EnvelopeKind::Ellipsoid => "ellipsoid",
            EnvelopeKind::Segment => "segment",
            EnvelopeKind::Ray => "ray",
            EnvelopeKind::Tube => "tube",
            EnvelopeKind::TubeSection { .. } => "tube_section",
        }
    }
}

/// A skeleton together with the envelope kind built on it.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeObject<T> {
    skeleton: Vec<Point<T>>,
    kind: EnvelopeKind<T>,
}

impl<T> EnvelopeObject<T> {
    pub fn new(kind: EnvelopeKind<T>, skeleton: Vec<Point<T>>) -> Result<Self> {
        let arity_ok = match kind {
            EnvelopeKind::Sphere | EnvelopeKind::Segment | EnvelopeKind::Ray => skeleton.len() == 2,
            EnvelopeKind::Ellipsoid => skeleton.len() == 3,
            EnvelopeKind::Tube | EnvelopeKind::TubeSection { .. } => {
                (2..=MAX_TUBE_ORDER + 1).contains(&skeleton.len())
            }
        };
        if !arity_ok {
            return Err(GeomError::Contract(format!(
                "{} cannot be built on {} skeleton points",
                kind.name(),
                skeleton.len()
            )));
        }
        Ok(Self { skeleton, kind })
    }

    pub fn sphere(center: Point<T>, through: Point<T>) -> Self {
        Self {
            skeleton: vec![center, through],
            kind: EnvelopeKind::Sphere,
        }
    }

    pub fn ellipsoid(focus0: Point<T>, focus1: Point<T>, through: Point<T>) -> Self {
        Self {
            skeleton: vec![focus0, focus1, through],
            kind: EnvelopeKind::Ellipsoid,
        }
    }

    pub fn segment(p0: Point<T>, p1: Point<T>) -> Self {
        Self {
            skeleton: vec![p0, p1],
            kind: EnvelopeKind::Segment,
        }
    }

    pub fn ray(p0: Point<T>, p1: Point<T>) -> Self {
        Self {
            skeleton: vec![p0, p1],
            kind: EnvelopeKind::Ray,
        }
    }

    pub fn tube(skeleton: Vec<Point<T>>) -> Result<Self> {
        Self::new(EnvelopeKind::Tube, skeleton)
    }

    pub fn tube_section(skeleton: Vec<Point<T>>, anchor: Point<T>) -> Result<Self> {
        Self::new(EnvelopeKind::TubeSection { anchor }, skeleton)
    }

    pub fn skeleton(&self) -> &[Point<T>] {
        &self.skeleton
    }

    pub fn kind(&self) -> &EnvelopeKind<T> {
        &self.kind
    }
}

/// Value of an envelope function. Square roots of negative 2σ are imaginary;
/// a sum mixing nonzero real and imaginary terms has no real value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnvelopeValue<T> {
    Real(T),
    /// Coefficient of i.
    Imaginary(T),
    /// Mixed signature: never a member.
    Mixed,
}

impl<T: Copy> EnvelopeValue<T> {
    /// Real value or imaginary coefficient; `None` when mixed.
    pub fn magnitude_value(&self) -> Option<T> {
        match *self {
            EnvelopeValue::Real(v) | EnvelopeValue::Imaginary(v) => Some(v),
            EnvelopeValue::Mixed => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation<T> {
    pub value: EnvelopeValue<T>,
    pub threshold: T,
    pub member: bool,
}

fn tube_order<T>(skeleton: &[Point<T>]) -> usize {
    skeleton.len() - 1
}

/// Checks Fₙ(skeleton) ≠ 0 at the scale-aware tolerance.
pub fn require_tube_skeleton<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    skeleton: &[Point<T>],
    tol: T,
) -> Result<()> {
    if skeleton.len() < 2 {
        return Err(GeomError::Contract("tube skeleton needs at least two points".into()));
    }
    let g = gram_matrix(space, &skeleton[0], &skeleton[1..])?;
    if negligible(g.determinant(), g.max_abs(), tube_order(skeleton), tol) {
        return Err(GeomError::DegenerateSkeleton(format!(
            "F_{} of the tube skeleton vanishes",
            tube_order(skeleton)
        )));
    }
    Ok(())
}

/// Fₙ₊₁(skeleton, R) and the bordered Gram scale max|Γ|.
fn bordered_det<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    skeleton: &[Point<T>],
    r: &Point<T>,
) -> Result<(T, T)> {
    let mut others: Vec<Point<T>> = skeleton[1..].to_vec();
    others.push(r.clone());
    let g = gram_matrix(space, &skeleton[0], &others)?;
    Ok((g.determinant(), g.max_abs()))
}

fn tube_evaluation<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    skeleton: &[Point<T>],
    r: &Point<T>,
    tol: T,
) -> Result<Evaluation<T>> {
    let (f, s) = bordered_det(space, skeleton, r)?;
    let order = tube_order(skeleton) + 1;
    let mut threshold = tol;
    for _ in 0..order {
        threshold = threshold * s;
    }
    Ok(Evaluation {
        value: EnvelopeValue::Real(f),
        threshold,
        member: negligible(f, s, order, tol),
    })
}

/// R ∈ T(P⁰…Pⁿ) iff Fₙ₊₁(P⁰…Pⁿ, R) = 0, tested as
/// |Fₙ₊₁| ≤ tol · s^{n+1} with s the largest |Γ| of the bordered Gram matrix.
pub fn tube_member<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    skeleton: &[Point<T>],
    r: &Point<T>,
    tol: T,
) -> Result<bool> {
    require_tube_skeleton(space, skeleton, tol)?;
    Ok(tube_evaluation(space, skeleton, r, tol)?.member)
}

fn section_evaluation<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    skeleton: &[Point<T>],
    anchor: &Point<T>,
    r: &Point<T>,
    tol: T,
) -> Result<Evaluation<T>> {
    let mut worst = T::zero();
    let mut scale = T::zero();
    for pl in skeleton {
        let at_anchor = space.sigma(pl, anchor)?;
        let at_r = space.sigma(pl, r)?;
        worst = worst.max_of((at_r - at_anchor).abs());
        scale = scale.max_of(at_anchor.abs()).max_of(at_r.abs());
    }
    let threshold = tol * scale;
    Ok(Evaluation {
        value: EnvelopeValue::Real(worst),
        threshold,
        member: worst <= threshold,
    })
}

/// R ∈ S_{n;P}: σ(P_l, R) = σ(P_l, P) for every skeleton point, each within
/// tol · max|σ|. The anchor P must lie on the tube.
pub fn tube_section_member<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    skeleton: &[Point<T>],
    anchor: &Point<T>,
    r: &Point<T>,
    tol: T,
) -> Result<bool> {
    require_tube_skeleton(space, skeleton, tol)?;
    if !tube_evaluation(space, skeleton, anchor, tol)?.member {
        return Err(GeomError::AnchorNotOnTube);
    }
    Ok(section_evaluation(space, skeleton, anchor, r, tol)?.member)
}

/// Checks that make an object evaluable: nondegenerate tube skeletons and
/// section anchors on their tube.
pub fn prepare<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    obj: &EnvelopeObject<T>,
    tol: T,
) -> Result<()> {
    for p in &obj.skeleton {
        space.check(p)?;
    }
    match &obj.kind {
        EnvelopeKind::Tube => require_tube_skeleton(space, &obj.skeleton, tol),
        EnvelopeKind::TubeSection { anchor } => {
            require_tube_skeleton(space, &obj.skeleton, tol)?;
            if tube_evaluation(space, &obj.skeleton, anchor, tol)?.member {
                Ok(())
            } else {
                Err(GeomError::AnchorNotOnTube)
            }
        }
        _ => Ok(()),
    }
}

/// Signed sum of √(2σ) terms. Returns the value and Σ|term|.
fn length_sum<T: Real, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    terms: &[(bool, &Point<T>, &Point<T>)],
) -> Result<(EnvelopeValue<T>, T)> {
    let two = T::one() + T::one();
    let (mut real, mut imag, mut total) = (T::zero(), T::zero(), T::zero());
    let (mut has_real, mut has_imag) = (false, false);
    for &(positive, a, b) in terms {
        let len = SignedLength::from_squared(two * space.sigma(a, b)?);
        let v = if positive { len.magnitude } else { -len.magnitude };
        total = total + len.magnitude;
        if len.magnitude.is_zero() {
            continue;
        }
        if len.imaginary {
            has_imag = true;
            imag = imag + v;
        } else {
            has_real = true;
            real = real + v;
        }
    }
    let value = match (has_real, has_imag) {
        (true, true) => EnvelopeValue::Mixed,
        (false, true) => EnvelopeValue::Imaginary(imag),
        _ => EnvelopeValue::Real(real),
    };
    Ok((value, total))
}

fn evaluate_prepared<T: Real, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    obj: &EnvelopeObject<T>,
    r: &Point<T>,
    tol: T,
) -> Result<Evaluation<T>> {
    let sk = &obj.skeleton;
    let terms: Vec<(bool, &Point<T>, &Point<T>)> = match &obj.kind {
        EnvelopeKind::Tube => return tube_evaluation(space, sk, r, tol),
        EnvelopeKind::TubeSection { anchor } => {
            return section_evaluation(space, sk, anchor, r, tol)
        }
        EnvelopeKind::Sphere => vec![(true, &sk[0], &sk[1]), (false, &sk[0], r)],
        EnvelopeKind::Ellipsoid => vec![
            (true, &sk[0], &sk[2]),
            (true, &sk[1], &sk[2]),
            (false, &sk[0], r),
            (false, &sk[1], r),
        ],
        EnvelopeKind::Segment => vec![
            (true, &sk[0], &sk[1]),
            (false, &sk[0], r),
            (false, &sk[1], r),
        ],
        EnvelopeKind::Ray => vec![
            (true, &sk[0], r),
            (false, &sk[0], &sk[1]),
            (false, &sk[1], r),
        ],
    };
    let (value, total) = length_sum(space, &terms)?;
    let threshold = tol * total;
    let member = value
        .magnitude_value()
        .is_some_and(|v| v.abs() <= threshold);
    Ok(Evaluation {
        value,
        threshold,
        member,
    })
}

/// Envelope value f(R) of the object.
pub fn envelope_value<T: Real, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    obj: &EnvelopeObject<T>,
    r: &Point<T>,
) -> Result<EnvelopeValue<T>> {
    Ok(evaluate(space, obj, r, T::zero())?.value)
}

/// Envelope value plus membership at relative tolerance `tol`.
///
/// Tubes use |Fₙ₊₁| ≤ tol·s^{n+1}, sections |Δσ| ≤ tol·max|σ|, and the
/// √(2σ) envelopes |f| ≤ tol·Σ|√(2σ) terms|.
pub fn evaluate<T: Real, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    obj: &EnvelopeObject<T>,
    r: &Point<T>,
    tol: T,
) -> Result<Evaluation<T>> {
    prepare(space, obj, tol)?;
    evaluate_prepared(space, obj, r, tol)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TubeClass {
    Timelike,
    Spacelike,
    Null,
}

/// Sign classification of σ(x, x′): timelike when positive, spacelike when
/// negative, null when exactly zero. Null pairs do not define a tube.
pub fn classify_tube<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    x: &Point<T>,
    x_prime: &Point<T>,
) -> Result<TubeClass> {
    let s = space.sigma(x, x_prime)?;
    Ok(if s > T::zero() {
        TubeClass::Timelike
    } else if s < T::zero() {
        TubeClass::Spacelike
    } else {
        TubeClass::Null
    })
}

/// Axis-aligned sampling box.
#[derive(Debug, Clone, PartialEq)]
pub struct GridBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> GridBox<T> {
    pub fn cube(dim: usize, lo: T, hi: T) -> Self {
        Self {
            lo: vec![lo; dim],
            hi: vec![hi; dim],
        }
    }

    /// Coordinate of grid index `i` on `axis` with `res` nodes.
    pub fn node(&self, axis: usize, i: usize, res: usize) -> T {
        let (lo, hi) = (self.lo[axis], self.hi[axis]);
        lo + (hi - lo) * T::from_count(i) / T::from_count(res - 1)
    }

    /// Largest node spacing over all axes.
    pub fn cell(&self, resolution: &[usize]) -> T {
        (0..self.lo.len()).fold(T::zero(), |acc, a| {
            acc.max_of((self.hi[a] - self.lo[a]) / T::from_count(resolution[a] - 1))
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridMember<T> {
    pub point: Vec<T>,
    pub value: T,
}

/// Expands a single resolution to every axis.
pub fn broadcast_resolution(resolution: &[usize], dim: usize) -> Vec<usize> {
    if resolution.len() == 1 {
        vec![resolution[0]; dim]
    } else {
        resolution.to_vec()
    }
}

/// Scans a regular grid and returns the members of `obj` in lexicographic
/// coordinate order, each with its raw envelope value. Grid nodes outside the
/// space's domain (holes of a restriction) are skipped.
pub fn grid_sample<T: Real, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    obj: &EnvelopeObject<T>,
    region: &GridBox<T>,
    resolution: &[usize],
    tol: T,
) -> Result<Vec<GridMember<T>>> {
    let dim = match space.domain() {
        Domain::Coordinates { dim } => dim,
        Domain::Table { .. } => {
            return Err(GeomError::Unsupported("sampling requires coordinates".into()))
        }
    };
    if region.lo.len() != dim || region.hi.len() != dim {
        return Err(GeomError::Contract(format!(
            "sampling box must have dimension {dim}"
        )));
    }
    if region.lo.iter().zip(&region.hi).any(|(l, h)| !(l < h)) {
        return Err(GeomError::Contract("sampling box is degenerate".into()));
    }
    let res = broadcast_resolution(resolution, dim);
    if res.len() != dim {
        return Err(GeomError::Contract(format!(
            "expected 1 or {dim} resolutions, got {}",
            res.len()
        )));
    }
    if res.iter().any(|&r| r < 2) {
        return Err(GeomError::Contract("resolution must be at least 2 per axis".into()));
    }
    prepare(space, obj, tol)?;
    let total: usize = res.iter().product();
    let hits: Vec<Option<GridMember<T>>> = (0..total)
        .into_par_iter()
        .map(|flat| -> Result<Option<GridMember<T>>> {
            let mut rem = flat;
            let mut coords = vec![T::zero(); dim];
            for axis in (0..dim).rev() {
                coords[axis] = region.node(axis, rem % res[axis], res[axis]);
                rem /= res[axis];
            }
            let r = Point::Coords(coords);
            if !space.contains(&r) {
                return Ok(None);
            }
            let ev = evaluate_prepared(space, obj, &r, tol)?;
            Ok(match (ev.member, ev.value.magnitude_value()) {
                (true, Some(value)) => Some(GridMember {
                    point: match r {
                        Point::Coords(c) => c,
                        Point::Id(_) => unreachable!(),
                    },
                    value,
                }),
                _ => None,
            })
        })
        .collect::<Result<_>>()?;
    Ok(hits.into_iter().flatten().collect())
}
