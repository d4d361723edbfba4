//! σ-space algebra: world-function evaluation, Γ scalar products, Gram
//! matrices and determinants, multivector products and lengths.
//!
//! Every function here is σ-immanent: it only ever calls
//! [`SigmaSpace::sigma`], never looks at coordinates.

use std::sync::Arc;

use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::linalg::Matrix;
use crate::scalar::{Real, Scalar};

/// A point of a σ-space. Analytic backends address points by coordinates,
/// tabulated backends by row index.
///
/// Equality is exact: σ(P, Q) = 0 does not make P and Q the same point.
#[derive(Debug, Clone, PartialEq)]
pub enum Point<T> {
    Coords(Vec<T>),
    Id(usize),
}

impl<T> Point<T> {
    pub fn coords(&self) -> Option<&[T]> {
        match self {
            Point::Coords(c) => Some(c),
            Point::Id(_) => None,
        }
    }

    pub fn id(&self) -> Option<usize> {
        match self {
            Point::Id(i) => Some(*i),
            Point::Coords(_) => None,
        }
    }
}

impl<T> From<Vec<T>> for Point<T> {
    fn from(c: Vec<T>) -> Self {
        Point::Coords(c)
    }
}

impl<T: Copy, const N: usize> From<[T; N]> for Point<T> {
    fn from(c: [T; N]) -> Self {
        Point::Coords(c.to_vec())
    }
}

/// Shape of the point set a space is defined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Domain {
    /// ℝⁿ (possibly restricted), points are coordinate vectors.
    Coordinates { dim: usize },
    /// Finite table of `count` points, addressed by id.
    Table { count: usize },
}

/// A point domain together with a world function σ on it.
///
/// Implementors provide [`eval`](Self::eval) for points already known to be
/// in the domain; [`sigma`](Self::sigma) adds the domain check. σ must be
/// symmetric with zero diagonal and deterministic. It may be negative.
pub trait SigmaSpace<T: Scalar>: Send + Sync {
    fn domain(&self) -> Domain;

    fn contains(&self, p: &Point<T>) -> bool;

    /// World function without domain checks.
    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T;

    fn check(&self, p: &Point<T>) -> Result<()> {
        if self.contains(p) {
            Ok(())
        } else {
            Err(GeomError::Domain(format!("{p:?}")))
        }
    }

    fn sigma(&self, p: &Point<T>, q: &Point<T>) -> Result<T> {
        self.check(p)?;
        self.check(q)?;
        Ok(self.eval(p, q))
    }

    /// All points of a finite space, in id order; `None` for continuous ones.
    fn finite_points(&self) -> Option<Vec<Point<T>>> {
        match self.domain() {
            Domain::Table { count } => Some(
                (0..count)
                    .map(Point::Id)
                    .filter(|p| self.contains(p))
                    .collect(),
            ),
            Domain::Coordinates { .. } => None,
        }
    }
}

impl<T: Scalar, S: SigmaSpace<T> + ?Sized> SigmaSpace<T> for &S {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn contains(&self, p: &Point<T>) -> bool {
        (**self).contains(p)
    }
    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        (**self).eval(p, q)
    }
}

impl<T: Scalar, S: SigmaSpace<T> + ?Sized> SigmaSpace<T> for Arc<S> {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn contains(&self, p: &Point<T>) -> bool {
        (**self).contains(p)
    }
    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        (**self).eval(p, q)
    }
}

impl<T: Scalar, S: SigmaSpace<T> + ?Sized> SigmaSpace<T> for Box<S> {
    fn domain(&self) -> Domain {
        (**self).domain()
    }
    fn contains(&self, p: &Point<T>) -> bool {
        (**self).contains(p)
    }
    fn eval(&self, p: &Point<T>, q: &Point<T>) -> T {
        (**self).eval(p, q)
    }
}

/// Ordered list of n+1 points, the n-th order multivector P₀P₁…Pₙ.
/// Repeated points are allowed and give a null multivector.
#[derive(Debug, Clone, PartialEq)]
pub struct Multivector<T> {
    points: Vec<Point<T>>,
}

impl<T> Multivector<T> {
    pub fn new(points: Vec<Point<T>>) -> Result<Self> {
        if points.is_empty() {
            return Err(GeomError::Contract("multivector needs at least one point".into()));
        }
        Ok(Self { points })
    }

    /// Vector P₀P₁.
    pub fn vector(p0: Point<T>, p1: Point<T>) -> Self {
        Self {
            points: vec![p0, p1],
        }
    }

    pub fn order(&self) -> usize {
        self.points.len() - 1
    }

    pub fn origin(&self) -> &Point<T> {
        &self.points[0]
    }

    pub fn points(&self) -> &[Point<T>] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point<T>> {
        self.points
    }
}

/// Length of a multivector: real magnitude plus an imaginary flag, set when
/// the squared length is negative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignedLength<T> {
    pub squared: T,
    pub magnitude: T,
    pub imaginary: bool,
}

impl<T: Real> SignedLength<T> {
    pub fn from_squared(squared: T) -> Self {
        Self {
            squared,
            magnitude: squared.abs().sqrt(),
            imaginary: squared < T::zero(),
        }
    }
}

/// σ(P, Q) with domain checks.
pub fn sigma<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    p: &Point<T>,
    q: &Point<T>,
) -> Result<T> {
    space.sigma(p, q)
}

/// Γ(P₀,P₁,P₂) = σ(P₀,P₁) + σ(P₀,P₂) − σ(P₁,P₂), the scalar product
/// (P₀P₁ . P₀P₂).
pub fn gamma<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    p0: &Point<T>,
    p1: &Point<T>,
    p2: &Point<T>,
) -> Result<T> {
    Ok(space.sigma(p0, p1)? + space.sigma(p0, p2)? - space.sigma(p1, p2)?)
}

/// (P₀P₁ . Q₀Q₁) = σ(P₀,Q₁) + σ(Q₀,P₁) − σ(P₀,Q₀) − σ(P₁,Q₁) for vectors
/// with different origins.
pub fn two_point_scalar<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    p0: &Point<T>,
    p1: &Point<T>,
    q0: &Point<T>,
    q1: &Point<T>,
) -> Result<T> {
    Ok(space.sigma(p0, q1)? + space.sigma(q0, p1)?
        - space.sigma(p0, q0)?
        - space.sigma(p1, q1)?)
}

/// Gram matrix g_ik = Γ(P₀, Pᵢ, Pₖ) of the vectors P₀Pᵢ.
pub fn gram_matrix<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    base: &Point<T>,
    others: &[Point<T>],
) -> Result<Matrix<T>> {
    if others.is_empty() {
        return Err(GeomError::Contract("Gram matrix needs at least one vector".into()));
    }
    space.check(base)?;
    for p in others {
        space.check(p)?;
    }
    let from_base: Vec<T> = others.iter().map(|p| space.eval(base, p)).collect();
    let n = others.len();
    let mut g = Matrix::zeros(n, n);
    for i in 0..n {
        for k in i..n {
            let v = if i == k {
                // σ(P₀,Pᵢ) + σ(P₀,Pᵢ) − σ(Pᵢ,Pᵢ)
                from_base[i] + from_base[i] - space.eval(&others[i], &others[i])
            } else {
                from_base[i] + from_base[k] - space.eval(&others[i], &others[k])
            };
            g[(i, k)] = v;
            g[(k, i)] = v;
        }
    }
    Ok(g)
}

fn split_multivector<T>(mv: &Multivector<T>) -> Result<(&Point<T>, &[Point<T>])> {
    let (base, others) = mv.points().split_first().expect("non-empty");
    if others.is_empty() {
        return Err(GeomError::Contract("multivector order must be at least 1".into()));
    }
    Ok((base, others))
}

/// F_n(P⁰…Pⁿ): Gram determinant of the n vectors P₀Pᵢ.
pub fn gram_det<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    mv: &Multivector<T>,
) -> Result<T> {
    let (base, others) = split_multivector(mv)?;
    Ok(gram_matrix(space, base, others)?.determinant())
}

/// Squared length |M(Pⁿ)|² = (n! Sₙ)² = Fₙ(Pⁿ).
pub fn squared_length<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    mv: &Multivector<T>,
) -> Result<T> {
    gram_det(space, mv)
}

/// Matrix of two-point scalar products (P₀Pᵢ . Q₀Qₖ).
pub fn cross_gram<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    a: &Multivector<T>,
    b: &Multivector<T>,
) -> Result<Matrix<T>> {
    if a.order() != b.order() {
        return Err(GeomError::Contract(format!(
            "multivector orders differ: {} vs {}",
            a.order(),
            b.order()
        )));
    }
    let (p0, ps) = split_multivector(a)?;
    let (q0, qs) = split_multivector(b)?;
    let n = ps.len();
    let mut m = Matrix::zeros(n, n);
    for i in 0..n {
        for k in 0..n {
            m[(i, k)] = two_point_scalar(space, p0, &ps[i], q0, &qs[k])?;
        }
    }
    Ok(m)
}

/// Scalar σ-product (A . B) = det ‖(P₀Pᵢ . Q₀Qₖ)‖ of equal-order multivectors.
pub fn mv_scalar_product<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    a: &Multivector<T>,
    b: &Multivector<T>,
) -> Result<T> {
    Ok(cross_gram(space, a, b)?.determinant())
}

pub fn mv_length<T: Real, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    a: &Multivector<T>,
) -> Result<SignedLength<T>> {
    Ok(SignedLength::from_squared(mv_scalar_product(space, a, a)?))
}

/// Scale-aware zero test for a determinant of order `order` built from
/// entries of magnitude at most `scale`: |value| ≤ tol · scale^order.
pub fn negligible<T: Scalar>(value: T, scale: T, order: usize, tol: T) -> bool {
    let mut bound = tol;
    for _ in 0..order {
        bound = bound * scale;
    }
    value.abs() <= bound
}

/// Fₙ of a multivector together with its Gram scale max|Γ|.
pub fn gram_det_scaled<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    base: &Point<T>,
    others: &[Point<T>],
) -> Result<(T, T)> {
    let g = gram_matrix(space, base, others)?;
    Ok((g.determinant(), g.max_abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Euclidean, Minkowski};

    fn p(c: &[f64]) -> Point<f64> {
        Point::Coords(c.to_vec())
    }

    fn mv(pts: &[&[f64]]) -> Multivector<f64> {
        Multivector::new(pts.iter().map(|c| p(c)).collect()).unwrap()
    }

    #[test]
    fn sigma_examples() {
        let e2 = Euclidean::new(2).unwrap();
        assert_eq!(sigma(&e2, &p(&[0.0, 0.0]), &p(&[3.0, 4.0])).unwrap(), 12.5);
        assert_eq!(sigma(&e2, &p(&[1.5, -2.0]), &p(&[1.5, -2.0])).unwrap(), 0.0);
        let m2 = Minkowski::new(2).unwrap();
        assert_eq!(sigma(&m2, &p(&[0.0, 0.0]), &p(&[1.0, 1.0])).unwrap(), 0.0);
        assert!(matches!(
            sigma(&e2, &p(&[0.0]), &p(&[0.0, 0.0])),
            Err(GeomError::Domain(_))
        ));
    }

    #[test]
    fn gamma_examples() {
        let e2 = Euclidean::new(2).unwrap();
        let (o, x, y) = (p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.0, 1.0]));
        assert_eq!(gamma(&e2, &o, &x, &y).unwrap(), 0.0);
        let q = p(&[2.0, 3.0]);
        assert_eq!(
            gamma(&e2, &o, &q, &q).unwrap(),
            2.0 * sigma(&e2, &o, &q).unwrap()
        );
        assert_eq!(gamma(&e2, &o, &o, &q).unwrap(), 0.0);
    }

    #[test]
    fn two_point_scalar_examples() {
        let e2 = Euclidean::new(2).unwrap();
        let v = two_point_scalar(
            &e2,
            &p(&[0.0, 0.0]),
            &p(&[1.0, 0.0]),
            &p(&[5.0, 5.0]),
            &p(&[6.0, 5.0]),
        )
        .unwrap();
        assert_eq!(v, 1.0);
        let (p0, p1, p2) = (p(&[0.3, 1.0]), p(&[2.0, -1.0]), p(&[-0.5, 4.0]));
        assert_eq!(
            two_point_scalar(&e2, &p0, &p1, &p0, &p2).unwrap(),
            gamma(&e2, &p0, &p1, &p2).unwrap()
        );
        let m2 = Minkowski::new(2).unwrap();
        let o = p(&[0.0, 0.0]);
        assert_eq!(
            two_point_scalar(&m2, &o, &p(&[1.0, 0.0]), &o, &p(&[0.0, 1.0])).unwrap(),
            0.0
        );
    }

    #[test]
    fn gram_matrix_examples() {
        let e2 = Euclidean::new(2).unwrap();
        let o = p(&[0.0, 0.0]);
        let g = gram_matrix(&e2, &o, &[p(&[1.0, 0.0]), p(&[0.0, 1.0])]).unwrap();
        assert_eq!(g.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let m2 = Minkowski::new(2).unwrap();
        let g = gram_matrix(&m2, &o, &[p(&[1.0, 0.0]), p(&[0.0, 1.0])]).unwrap();
        assert_eq!(g.to_rows(), vec![vec![1.0, 0.0], vec![0.0, -1.0]]);
        let q = p(&[0.7, 0.2]);
        let g = gram_matrix(&e2, &o, &[q.clone(), q]).unwrap();
        assert_eq!(g.determinant(), 0.0);
        assert!(gram_matrix(&e2, &o, &[]).is_err());
    }

    #[test]
    fn gram_det_examples() {
        let e2 = Euclidean::new(2).unwrap();
        assert_eq!(gram_det(&e2, &mv(&[&[0.0, 0.0], &[1.0, 0.0]])).unwrap(), 1.0);
        let tri = mv(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(gram_det(&e2, &tri).unwrap(), 1.0);
        // area ½ = sqrt(F₂)/2!
        assert_eq!(squared_length(&e2, &tri).unwrap().sqrt() / 2.0, 0.5);
        let line = mv(&[&[0.0, 0.0], &[1.0, 0.0], &[2.0, 0.0]]);
        assert_eq!(gram_det(&e2, &line).unwrap(), 0.0);
        let m2 = Minkowski::new(2).unwrap();
        assert_eq!(
            squared_length(&m2, &mv(&[&[0.0, 0.0], &[2.0, 0.0]])).unwrap(),
            4.0
        );
        assert!(gram_det(&e2, &mv(&[&[0.0, 0.0]])).is_err());
    }

    #[test]
    fn scalar_product_examples() {
        let e2 = Euclidean::new(2).unwrap();
        let a = mv(&[&[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]]);
        let b = mv(&[&[0.0, 0.0], &[2.0, 0.0], &[0.0, 2.0]]);
        assert_eq!(mv_scalar_product(&e2, &a, &b).unwrap(), 4.0);
        assert_eq!(
            mv_scalar_product(&e2, &a, &a).unwrap(),
            gram_det(&e2, &a).unwrap()
        );
        let u = mv(&[&[0.0, 1.0], &[2.0, 3.0]]);
        let v = mv(&[&[-1.0, 0.5], &[4.0, 1.0]]);
        assert_eq!(
            mv_scalar_product(&e2, &u, &v).unwrap(),
            two_point_scalar(
                &e2,
                &u.points()[0],
                &u.points()[1],
                &v.points()[0],
                &v.points()[1]
            )
            .unwrap()
        );
        assert!(matches!(
            mv_scalar_product(&e2, &a, &u),
            Err(GeomError::Contract(_))
        ));
    }

    #[test]
    fn length_examples() {
        let e2 = Euclidean::new(2).unwrap();
        let l = mv_length(&e2, &mv(&[&[0.0, 0.0], &[3.0, 4.0]])).unwrap();
        assert_eq!((l.squared, l.magnitude, l.imaginary), (25.0, 5.0, false));
        let l = mv_length(&e2, &mv(&[&[1.0, 1.0], &[1.0, 1.0]])).unwrap();
        assert_eq!(l.magnitude, 0.0);
        let m2 = Minkowski::new(2).unwrap();
        let l = mv_length(&m2, &mv(&[&[0.0, 0.0], &[0.0, 1.0]])).unwrap();
        assert_eq!((l.squared, l.magnitude, l.imaginary), (-1.0, 1.0, true));
    }

    #[test]
    fn negligible_scales_with_order() {
        assert!(negligible(1e-10, 1.0, 2, 1e-9));
        assert!(!negligible(1e-8, 1.0, 2, 1e-9));
        // same relative size after rescaling lengths by 10 (σ by 100)
        assert!(negligible(1e-10 * 1e4, 100.0, 2, 1e-9));
    }
}
