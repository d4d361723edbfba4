//! Built-in world-function backends.
//!
//! * [`Euclidean`]: σ = ½ Σ (xᵢ − x′ᵢ)²
//! * [`Minkowski`]: index-1 pseudoeuclidean, signature diag{1, −1, …, −1}
//! * [`Tabulated`]: finite σ-space given by its full symmetric table
//! * [`Restricted`]: a subset of another space with the contracted σ
//! * [`Deformed`]: σ′ = D(σ) for a small set of named distortions
//!
//! [`Space`] is the closed enum over all of them, used where the backend is
//! only known at runtime.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use crate::error::{GeomError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::sigma::{Domain, Point, SigmaSpace};

fn coords_of<T>(p: &Point<T>, dim: usize) -> Option<&[T]> {
    p.coords().filter(|c| c.len() == dim)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Euclidean {
    dim: usize,
}

impl Euclidean {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::Contract("Euclidean dimension must be at least 1".into()));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric<T: Scalar>(&self) -> Matrix<T> {
        Matrix::identity(self.dim)
    }
}

impl<T: Scalar> SigmaSpace<T> for Euclidean {
    fn domain(&self) -> Domain {
        Domain::Coordinates { dim: self.dim }
    }

    fn contains(&self, p: &Point<T>) -> bool {
        coords_of(p, self.dim).is_some()
    }

    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        let (x, y) = (p.coords().unwrap(), q.coords().unwrap());
        let sum = x
            .iter()
            .zip(y)
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
        sum / (T::one() + T::one())
    }
}

/// Pseudoeuclidean space of index 1. Coordinate 0 is time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Minkowski {
    dim: usize,
}

impl Minkowski {
    pub fn new(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(GeomError::Contract("Minkowski dimension must be at least 2".into()));
        }
        Ok(Self { dim })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric<T: Scalar>(&self) -> Matrix<T> {
        let diag: Vec<T> = (0..self.dim)
            .map(|i| if i == 0 { T::one() } else { -T::one() })
            .collect();
        Matrix::diagonal(&diag)
    }
}

impl<T: Scalar> SigmaSpace<T> for Minkowski {
    fn domain(&self) -> Domain {
        Domain::Coordinates { dim: self.dim }
    }

    fn contains(&self, p: &Point<T>) -> bool {
        coords_of(p, self.dim).is_some()
    }

    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        let (x, y) = (p.coords().unwrap(), q.coords().unwrap());
        let dt = x[0] - y[0];
        let space = x[1..]
            .iter()
            .zip(&y[1..])
            .fold(T::zero(), |acc, (&a, &b)| acc + (a - b) * (a - b));
        (dt * dt - space) / (T::one() + T::one())
    }
}

/// Finite σ-space stored as a dense row-major N×N table.
#[derive(Debug, Clone, PartialEq)]
pub struct Tabulated<T> {
    count: usize,
    table: Vec<T>,
}

impl<T: Scalar> Tabulated<T> {
    /// Validates bit-exact symmetry and a zero diagonal.
    pub fn new(rows: Vec<Vec<T>>) -> Result<Self> {
        let count = rows.len();
        if count == 0 {
            return Err(GeomError::Contract("table must have at least one point".into()));
        }
        if let Some(bad) = rows.iter().position(|r| r.len() != count) {
            return Err(GeomError::Contract(format!(
                "table row {bad} has {} entries, expected {count}",
                rows[bad].len()
            )));
        }
        let mut asymmetric = Vec::new();
        let mut nonzero_diagonal = Vec::new();
        for i in 0..count {
            if rows[i][i] != T::zero() {
                nonzero_diagonal.push(i);
            }
            for k in (i + 1)..count {
                if rows[i][k] != rows[k][i] {
                    asymmetric.push((i, k));
                }
            }
        }
        if !asymmetric.is_empty() || !nonzero_diagonal.is_empty() {
            return Err(GeomError::InvalidTable {
                asymmetric,
                nonzero_diagonal,
            });
        }
        Ok(Self {
            count,
            table: rows.into_iter().flatten().collect(),
        })
    }

    /// Tabulates `space` on `points`; point i of the result is `points[i]`.
    pub fn from_space<S: SigmaSpace<T> + ?Sized>(space: &S, points: &[Point<T>]) -> Result<Self> {
        let n = points.len();
        let mut rows = vec![vec![T::zero(); n]; n];
        for i in 0..n {
            for k in (i + 1)..n {
                let v = space.sigma(&points[i], &points[k])?;
                rows[i][k] = v;
                rows[k][i] = v;
            }
        }
        Self::new(rows)
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn get(&self, i: usize, k: usize) -> T {
        self.table[i * self.count + k]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.table.chunks(self.count).map(<[T]>::to_vec).collect()
    }

    pub fn points(&self) -> Vec<Point<T>> {
        (0..self.count).map(Point::Id).collect()
    }
}

impl<T: Scalar> SigmaSpace<T> for Tabulated<T> {
    fn domain(&self) -> Domain {
        Domain::Table { count: self.count }
    }

    fn contains(&self, p: &Point<T>) -> bool {
        p.id().is_some_and(|i| i < self.count)
    }

    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        self.get(p.id().unwrap(), q.id().unwrap())
    }
}

pub type PointPredicate<T> = Arc<dyn Fn(&Point<T>) -> bool + Send + Sync>;

/// Subset of a space's domain kept by [`restrict`].
#[derive(Clone)]
pub enum Region<T> {
    /// Points with normal · x > offset.
    HalfSpace { normal: Vec<T>, offset: T },
    /// Everything strictly outside the closed ball.
    BallComplement { center: Vec<T>, radius: T },
    /// Explicit ids of a finite space.
    Ids(BTreeSet<usize>),
    Predicate(PointPredicate<T>),
}

impl<T: Scalar> Region<T> {
    pub fn contains(&self, p: &Point<T>) -> bool {
        match self {
            Region::HalfSpace { normal, offset } => p.coords().is_some_and(|x| {
                x.len() == normal.len()
                    && x.iter()
                        .zip(normal)
                        .fold(T::zero(), |acc, (&a, &n)| acc + a * n)
                        > *offset
            }),
            Region::BallComplement { center, radius } => p.coords().is_some_and(|x| {
                x.len() == center.len()
                    && x.iter()
                        .zip(center)
                        .fold(T::zero(), |acc, (&a, &c)| acc + (a - c) * (a - c))
                        > *radius * *radius
            }),
            Region::Ids(ids) => p.id().is_some_and(|i| ids.contains(&i)),
            Region::Predicate(f) => f(p),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for Region<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Region::HalfSpace { normal, offset } => f
                .debug_struct("HalfSpace")
                .field("normal", normal)
                .field("offset", offset)
                .finish(),
            Region::BallComplement { center, radius } => f
                .debug_struct("BallComplement")
                .field("center", center)
                .field("radius", radius)
                .finish(),
            Region::Ids(ids) => f.debug_tuple("Ids").field(ids).finish(),
            Region::Predicate(_) => f.write_str("Predicate(..)"),
        }
    }
}

/// σ-subspace: the base world function contracted onto a region.
#[derive(Debug, Clone)]
pub struct Restricted<T, S> {
    base: S,
    region: Region<T>,
}

impl<T, S> Restricted<T, S> {
    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn region(&self) -> &Region<T> {
        &self.region
    }
}

/// Restricts `space` to `region`. The result evaluates σ exactly as the base
/// does on retained points and rejects every other point.
pub fn restrict<T: Scalar, S: SigmaSpace<T>>(space: S, region: Region<T>) -> Result<Restricted<T, S>> {
    match (&region, space.domain()) {
        (Region::Ids(ids), Domain::Table { count }) => {
            if ids.is_empty() {
                return Err(GeomError::Contract("restriction to an empty id set".into()));
            }
            if let Some(&bad) = ids.iter().find(|&&i| i >= count) {
                return Err(GeomError::Contract(format!("id {bad} out of range 0..{count}")));
            }
        }
        (Region::Ids(_), Domain::Coordinates { .. }) => {
            return Err(GeomError::Contract("id restriction on a coordinate space".into()));
        }
        (Region::HalfSpace { normal: v, .. } | Region::BallComplement { center: v, .. }, domain) => {
            match domain {
                Domain::Coordinates { dim } if dim == v.len() => {}
                _ => {
                    return Err(GeomError::Contract(format!(
                        "region of dimension {} does not fit domain {domain:?}",
                        v.len()
                    )))
                }
            }
            if let Region::BallComplement { radius, .. } = &region {
                if *radius < T::zero() {
                    return Err(GeomError::Contract("negative hole radius".into()));
                }
            }
            if let Region::HalfSpace { normal, .. } = &region {
                if normal.iter().all(|c| c.is_zero()) {
                    return Err(GeomError::Contract("half-space normal is zero".into()));
                }
            }
        }
        (Region::Predicate(_), _) => {}
    }
    Ok(Restricted {
        base: space,
        region,
    })
}

impl<T: Scalar, S: SigmaSpace<T>> SigmaSpace<T> for Restricted<T, S> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn contains(&self, p: &Point<T>) -> bool {
        self.base.contains(p) && self.region.contains(p)
    }

    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        self.base.eval(p, q)
    }
}

/// Monotone map D with D(0) = 0 applied to σ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Distortion<T> {
    /// D(σ) = λσ
    Scale { lambda: T },
    /// D(σ) = σ + d·sign(σ)·min(|σ|, σ₀)
    AffineCap { d: T, sigma0: T },
    /// D(σ) = σ + κ·σ·|σ|; the only smooth non-linear primitive, used to
    /// exercise the finite-difference metric away from exact quadratics.
    Quadratic { kappa: T },
}

impl<T: Scalar> Distortion<T> {
    pub fn validate(&self) -> Result<()> {
        let ok = match *self {
            Distortion::Scale { lambda } => lambda > T::zero(),
            Distortion::AffineCap { d, sigma0 } => d > -T::one() && sigma0 >= T::zero(),
            Distortion::Quadratic { kappa } => kappa >= T::zero(),
        };
        if ok {
            Ok(())
        } else {
            Err(GeomError::Contract(format!("distortion {self:?} is not monotone increasing")))
        }
    }

    pub fn apply(&self, s: T) -> T {
        match *self {
            Distortion::Scale { lambda } => lambda * s,
            Distortion::AffineCap { d, sigma0 } => {
                let capped = if s.abs() < sigma0 { s.abs() } else { sigma0 };
                s + d * s.signum() * capped
            }
            Distortion::Quadratic { kappa } => s + kappa * s * s.abs(),
        }
    }

    /// D′(0), the factor the metric tensor picks up.
    pub fn slope_at_zero(&self) -> T {
        match *self {
            Distortion::Scale { lambda } => lambda,
            Distortion::AffineCap { d, sigma0 } => {
                if sigma0 > T::zero() {
                    T::one() + d
                } else {
                    T::one()
                }
            }
            Distortion::Quadratic { .. } => T::one(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Deformed<T, S> {
    base: S,
    distortion: Distortion<T>,
}

impl<T: Scalar, S: SigmaSpace<T>> Deformed<T, S> {
    pub fn new(base: S, distortion: Distortion<T>) -> Result<Self> {
        distortion.validate()?;
        Ok(Self { base, distortion })
    }

    pub fn base(&self) -> &S {
        &self.base
    }

    pub fn distortion(&self) -> &Distortion<T> {
        &self.distortion
    }
}

impl<T: Scalar, S: SigmaSpace<T>> SigmaSpace<T> for Deformed<T, S> {
    fn domain(&self) -> Domain {
        self.base.domain()
    }

    fn contains(&self, p: &Point<T>) -> bool {
        self.base.contains(p)
    }

    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        self.distortion.apply(self.base.eval(p, q))
    }
}

/// Runtime-composed backend.
#[derive(Debug, Clone)]
pub enum Space<T> {
    Euclidean(Euclidean),
    Minkowski(Minkowski),
    Table(Tabulated<T>),
    Restricted(Box<Restricted<T, Space<T>>>),
    Deformed(Box<Deformed<T, Space<T>>>),
}

impl<T: Scalar> Space<T> {
    pub fn euclidean(dim: usize) -> Result<Self> {
        Euclidean::new(dim).map(Space::Euclidean)
    }

    pub fn minkowski(dim: usize) -> Result<Self> {
        Minkowski::new(dim).map(Space::Minkowski)
    }

    pub fn table(rows: Vec<Vec<T>>) -> Result<Self> {
        Tabulated::new(rows).map(Space::Table)
    }

    pub fn restricted(self, region: Region<T>) -> Result<Self> {
        Ok(Space::Restricted(Box::new(restrict(self, region)?)))
    }

    pub fn deformed(self, distortion: Distortion<T>) -> Result<Self> {
        Ok(Space::Deformed(Box::new(Deformed::new(self, distortion)?)))
    }

    /// Innermost backend, seen through restrictions and deformations.
    pub fn root(&self) -> &Space<T> {
        match self {
            Space::Restricted(r) => r.base().root(),
            Space::Deformed(d) => d.base().root(),
            other => other,
        }
    }

    /// Constant metric tensor of flat coordinate backends, tracking scale
    /// factors from deformations. `None` for tables.
    pub fn metric(&self) -> Option<Matrix<T>> {
        match self {
            Space::Euclidean(e) => Some(e.metric()),
            Space::Minkowski(m) => Some(m.metric()),
            Space::Table(_) => None,
            Space::Restricted(r) => r.base().metric(),
            Space::Deformed(d) => d
                .base()
                .metric()
                .map(|g| g.scale(d.distortion().slope_at_zero())),
        }
    }
}

impl<T: Scalar> SigmaSpace<T> for Space<T> {
    fn domain(&self) -> Domain {
        match self {
            Space::Euclidean(s) => SigmaSpace::<T>::domain(s),
            Space::Minkowski(s) => SigmaSpace::<T>::domain(s),
            Space::Table(s) => s.domain(),
            Space::Restricted(s) => s.domain(),
            Space::Deformed(s) => s.domain(),
        }
    }

    fn contains(&self, p: &Point<T>) -> bool {
        match self {
            Space::Euclidean(s) => s.contains(p),
            Space::Minkowski(s) => s.contains(p),
            Space::Table(s) => s.contains(p),
            Space::Restricted(s) => s.contains(p),
            Space::Deformed(s) => s.contains(p),
        }
    }

    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        match self {
            Space::Euclidean(s) => s.eval(p, q),
            Space::Minkowski(s) => s.eval(p, q),
            Space::Table(s) => s.eval(p, q),
            Space::Restricted(s) => s.eval(p, q),
            Space::Deformed(s) => s.eval(p, q),
        }
    }
}

/// Metric tensor from second mixed derivatives of σ at coinciding points,
/// g_ik(x) = −∂²σ/∂xⁱ∂x′ᵏ |_{x′=x}, by the four-point cross stencil
///
/// g_ik ≈ −[σ(x+heᵢ, x+heₖ) − σ(x+heᵢ, x−heₖ) − σ(x−heᵢ, x+heₖ) + σ(x−heᵢ, x−heₖ)] / 4h²
///
/// which is second-order accurate in h.
pub fn metric_from_sigma_fd<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    x: &Point<T>,
    h: T,
) -> Result<Matrix<T>> {
    let dim = match space.domain() {
        Domain::Coordinates { dim } => dim,
        Domain::Table { .. } => {
            return Err(GeomError::Unsupported(
                "finite-difference metric requires a coordinate backend".into(),
            ))
        }
    };
    if h <= T::zero() {
        return Err(GeomError::Contract("finite-difference step must be positive".into()));
    }
    space.check(x)?;
    let base = x.coords().unwrap();
    let shifted = |axis: usize, step: T| {
        let mut c = base.to_vec();
        c[axis] = c[axis] + step;
        Point::Coords(c)
    };
    let four_h2 = (T::one() + T::one() + T::one() + T::one()) * h * h;
    let mut g = Matrix::zeros(dim, dim);
    for i in 0..dim {
        let (xi_p, xi_m) = (shifted(i, h), shifted(i, -h));
        for k in 0..dim {
            let (xk_p, xk_m) = (shifted(k, h), shifted(k, -h));
            let mixed = space.sigma(&xi_p, &xk_p)? - space.sigma(&xi_p, &xk_m)?
                - space.sigma(&xi_m, &xk_p)?
                + space.sigma(&xi_m, &xk_m)?;
            g[(i, k)] = -mixed / four_h2;
        }
    }
    Ok(g)
}
