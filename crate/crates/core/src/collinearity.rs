//! σ-immanent parallelism.
//!
//! Two equal-order multivectors A, B are collinear when
//! (A.B)² = |A|²·|B|², and similarly/oppositely oriented when
//! (A.B) = ±|A|·|B|. In proper Euclidean space the vectors at a point that
//! are collinear to a given vector form a line; in general they form a
//! collinearity cone, sampled numerically by [`cone_sample`].

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::scalar::{Real, Scalar};
use crate::sigma::{mv_scalar_product, Domain, Multivector, Point, SigmaSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Parallel,
    Antiparallel,
    Indeterminate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollinearityVerdict<T> {
    pub collinear: bool,
    pub orientation: Orientation,
    /// |(A.B)² − |A|²|B|²| / max(ε, |A|⁴ + |B|⁴)
    pub defect: T,
}

const DEFECT_EPS: f64 = 1e-30;

pub fn is_collinear<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    a: &Multivector<T>,
    b: &Multivector<T>,
    tol: T,
) -> Result<CollinearityVerdict<T>> {
    let ab = mv_scalar_product(space, a, b)?;
    let aa = mv_scalar_product(space, a, a)?;
    let bb = mv_scalar_product(space, b, b)?;
    Ok(verdict(ab, aa, bb, tol))
}

fn verdict<T: Scalar>(ab: T, aa: T, bb: T, tol: T) -> CollinearityVerdict<T> {
    let numerator = (ab * ab - aa * bb).abs();
    let denom = (aa * aa + bb * bb).max_of(T::from_f64_or_zero(DEFECT_EPS));
    let defect = if denom.is_zero() {
        numerator
    } else {
        numerator / denom
    };
    let collinear = defect <= tol;
    let zero = T::zero();
    // |A||B| is positive when both lengths are real, negative (i·i) when both
    // are imaginary, and not real at all otherwise.
    let orientation = if !collinear || aa.is_zero() || bb.is_zero() {
        Orientation::Indeterminate
    } else if aa > zero && bb > zero {
        if ab > zero {
            Orientation::Parallel
        } else {
            Orientation::Antiparallel
        }
    } else if aa < zero && bb < zero {
        if ab < zero {
            Orientation::Parallel
        } else {
            Orientation::Antiparallel
        }
    } else {
        Orientation::Indeterminate
    };
    CollinearityVerdict {
        collinear,
        orientation,
        defect,
    }
}

fn require_nondegenerate<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    p0: &Point<T>,
    p1: &Point<T>,
) -> Result<()> {
    if space.sigma(p0, p1)?.is_zero() {
        return Err(GeomError::DegenerateSkeleton(
            "σ(P0, P1) = 0, the vector P0P1 has zero length".into(),
        ));
    }
    Ok(())
}

/// R ∈ T(P₀,P₁;Q₀), the tube through Q₀ collinear to P₀P₁, iff P₀P₁ ∥ Q₀R.
///
/// A null Q₀R (including R = Q₀) makes the defect collapse to the raw
/// determinant (A.A)(B.B) − (A.B)² scaled by |A|⁴, so R = Q₀ is always a
/// member.
pub fn tube_through_point_member<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    p0: &Point<T>,
    p1: &Point<T>,
    q0: &Point<T>,
    r: &Point<T>,
    tol: T,
) -> Result<bool> {
    require_nondegenerate(space, p0, p1)?;
    let a = Multivector::vector(p0.clone(), p1.clone());
    let b = Multivector::vector(q0.clone(), r.clone());
    Ok(is_collinear(space, &a, &b, tol)?.collinear)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeDirection<T> {
    /// Unit coordinate direction from Q₀.
    pub direction: Vec<T>,
    pub defect: T,
    pub orientation: Orientation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConeSample<T> {
    pub accepted: Vec<ConeDirection<T>>,
    pub tested: usize,
    /// Largest angle between two accepted directions of the same orientation.
    pub aperture: T,
}

impl<T> ConeSample<T> {
    pub fn accepted_count(&self) -> usize {
        self.accepted.len()
    }
}

/// Deterministic set of `count` unit vectors that always contains the
/// normalized `axis` as its first entry.
///
/// Three dimensions use a pole-to-pole Fibonacci spiral around `axis`
/// (`-axis` is the last entry). Two dimensions use an evenly spaced circle
/// starting at `axis`, which contains `-axis` when `count` is even.
pub fn fibonacci_directions<T: Real>(axis: &[T], count: usize) -> Result<Vec<Vec<T>>> {
    let dim = axis.len();
    if count < 2 {
        return Err(GeomError::Contract("need at least two sphere samples".into()));
    }
    let norm = axis.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt();
    if norm.is_zero() {
        return Err(GeomError::Contract("direction axis is zero".into()));
    }
    let u: Vec<T> = axis.iter().map(|&v| v / norm).collect();
    let frame = orthonormal_complement(&u);
    let lerp = |a: &[T], b: &[T], wa: T, wb: T| -> Vec<T> {
        a.iter().zip(b).map(|(&x, &y)| wa * x + wb * y).collect()
    };
    let two = T::one() + T::one();
    match dim {
        2 => {
            let step = two * T::PI() / T::from_count(count);
            Ok((0..count)
                .map(|i| {
                    let phi = step * T::from_count(i);
                    lerp(&u, &frame[0], phi.cos(), phi.sin())
                })
                .collect())
        }
        3 => {
            let golden = T::PI() * (T::from_f64_or_zero(3.0) - T::from_f64_or_zero(5.0).sqrt());
            let last = T::from_count(count - 1);
            Ok((0..count)
                .map(|i| {
                    let z = T::one() - two * T::from_count(i) / last;
                    let r = (T::one() - z * z).max_of(T::zero()).sqrt();
                    let phi = golden * T::from_count(i);
                    let ring = lerp(&frame[0], &frame[1], phi.cos(), phi.sin());
                    lerp(&u, &ring, z, r)
                })
                .collect())
        }
        _ => Err(GeomError::Unsupported(format!(
            "direction sampling in dimension {dim} (only 2 and 3 are supported)"
        ))),
    }
}

/// Gram–Schmidt completion of a unit vector against the standard basis.
fn orthonormal_complement<T: Real>(u: &[T]) -> Vec<Vec<T>> {
    let dim = u.len();
    let mut basis: Vec<Vec<T>> = vec![u.to_vec()];
    for axis in 0..dim {
        let mut v = vec![T::zero(); dim];
        v[axis] = T::one();
        for b in &basis {
            let dot = v.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
            v.iter_mut().zip(b).for_each(|(x, &y)| *x = *x - dot * y);
        }
        let n = v.iter().fold(T::zero(), |acc, &x| acc + x * x).sqrt();
        if n > T::from_f64_or_zero(1e-6) {
            basis.push(v.into_iter().map(|x| x / n).collect());
        }
        if basis.len() == dim {
            break;
        }
    }
    basis.split_off(1)
}

fn angle<T: Real>(a: &[T], b: &[T]) -> T {
    let dot = a.iter().zip(b).fold(T::zero(), |acc, (&x, &y)| acc + x * y);
    dot.max_of(-T::one()).min(T::one()).acos()
}

/// Samples the collinearity cone C(P₀,P₁;Q₀): tests directions d on a
/// coordinate sphere of radius `radius` around Q₀ and keeps those with
/// Q₀(Q₀ + radius·d) ∥ P₀P₁ within `tol`.
///
/// `radius` defaults to the coordinate length of P₁ − P₀, which makes the
/// Euclidean defect of a direction at angle θ exactly ½ sin²θ.
pub fn cone_sample<T: Real, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    p0: &Point<T>,
    p1: &Point<T>,
    q0: &Point<T>,
    sphere_samples: usize,
    radius: Option<T>,
    tol: T,
) -> Result<ConeSample<T>> {
    let dim = match space.domain() {
        Domain::Coordinates { dim } => dim,
        Domain::Table { .. } => {
            return Err(GeomError::Unsupported(
                "cone sampling requires a coordinate backend".into(),
            ))
        }
    };
    require_nondegenerate(space, p0, p1)?;
    space.check(q0)?;
    let (c0, c1) = (p0.coords().unwrap(), p1.coords().unwrap());
    let axis: Vec<T> = c1.iter().zip(c0).map(|(&a, &b)| a - b).collect();
    debug_assert_eq!(axis.len(), dim);
    let radius = match radius {
        Some(r) => r,
        None => axis.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt(),
    };
    if radius <= T::zero() {
        return Err(GeomError::Contract("sphere radius must be positive".into()));
    }
    let dirs = fibonacci_directions(&axis, sphere_samples)?;
    let origin = q0.coords().unwrap();
    let a = Multivector::vector(p0.clone(), p1.clone());
    let results: Vec<Option<ConeDirection<T>>> = dirs
        .par_iter()
        .map(|d| -> Result<Option<ConeDirection<T>>> {
            let r: Vec<T> = origin.iter().zip(d).map(|(&o, &x)| o + radius * x).collect();
            let r = Point::Coords(r);
            if !space.contains(&r) {
                return Ok(None);
            }
            let b = Multivector::vector(q0.clone(), r);
            let v = is_collinear(space, &a, &b, tol)?;
            Ok(v.collinear.then(|| ConeDirection {
                direction: d.clone(),
                defect: v.defect,
                orientation: v.orientation,
            }))
        })
        .collect::<Result<_>>()?;
    let accepted: Vec<ConeDirection<T>> = results.into_iter().flatten().collect();
    let mut aperture = T::zero();
    for (i, x) in accepted.iter().enumerate() {
        for y in &accepted[i + 1..] {
            if x.orientation == y.orientation {
                aperture = aperture.max(angle(&x.direction, &y.direction));
            }
        }
    }
    Ok(ConeSample {
        accepted,
        tested: sphere_samples,
        aperture,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Euclidean, Minkowski};

    fn p(c: &[f64]) -> Point<f64> {
        Point::Coords(c.to_vec())
    }

    fn vec2(a: &[f64], b: &[f64]) -> Multivector<f64> {
        Multivector::vector(p(a), p(b))
    }

    #[test]
    fn euclidean_parallel_vectors() {
        let e2 = Euclidean::new(2).unwrap();
        let v = is_collinear(
            &e2,
            &vec2(&[0.0, 0.0], &[1.0, 0.0]),
            &vec2(&[5.0, 5.0], &[7.0, 5.0]),
            1e-12,
        )
        .unwrap();
        assert!(v.collinear);
        assert_eq!(v.orientation, Orientation::Parallel);
        let back = is_collinear(
            &e2,
            &vec2(&[0.0, 0.0], &[1.0, 0.0]),
            &vec2(&[5.0, 5.0], &[3.0, 5.0]),
            1e-12,
        )
        .unwrap();
        assert_eq!(back.orientation, Orientation::Antiparallel);
    }

    #[test]
    fn self_collinear_and_orthogonal() {
        let e2 = Euclidean::new(2).unwrap();
        let a = vec2(&[0.0, 0.0], &[1.0, 0.0]);
        let v = is_collinear(&e2, &a, &a, 0.0).unwrap();
        assert_eq!((v.collinear, v.orientation, v.defect), (true, Orientation::Parallel, 0.0));
        let v = is_collinear(&e2, &a, &vec2(&[0.0, 0.0], &[0.0, 1.0]), 1e-9).unwrap();
        assert!(!v.collinear);
        assert_eq!(v.orientation, Orientation::Indeterminate);
    }

    #[test]
    fn null_vectors_are_indeterminate() {
        let m2 = Minkowski::new(2).unwrap();
        let a = vec2(&[0.0, 0.0], &[1.0, 0.0]);
        // null vector along the light cone, orthogonality fails: (A.B) = 1
        let light = vec2(&[0.0, 0.0], &[1.0, 1.0]);
        let v = is_collinear(&m2, &a, &light, 1e-9).unwrap();
        assert!(!v.collinear);
        // zero vector
        let zero = vec2(&[3.0, 1.0], &[3.0, 1.0]);
        let v = is_collinear(&m2, &a, &zero, 1e-9).unwrap();
        assert!(v.collinear);
        assert_eq!(v.orientation, Orientation::Indeterminate);
    }

    #[test]
    fn imaginary_lengths_orient_through_sign() {
        let m2 = Minkowski::new(2).unwrap();
        let a = vec2(&[0.0, 0.0], &[0.0, 1.0]);
        let same = vec2(&[4.0, 2.0], &[4.0, 5.0]);
        let opposite = vec2(&[4.0, 2.0], &[4.0, -1.0]);
        assert_eq!(
            is_collinear(&m2, &a, &same, 1e-12).unwrap().orientation,
            Orientation::Parallel
        );
        assert_eq!(
            is_collinear(&m2, &a, &opposite, 1e-12).unwrap().orientation,
            Orientation::Antiparallel
        );
    }

    #[test]
    fn tube_through_point() {
        let e2 = Euclidean::new(2).unwrap();
        let (p0, p1, q0) = (p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.0, 5.0]));
        assert!(tube_through_point_member(&e2, &p0, &p1, &q0, &q0, 1e-9).unwrap());
        assert!(tube_through_point_member(&e2, &p0, &p1, &q0, &p(&[-3.0, 5.0]), 1e-9).unwrap());
        assert!(!tube_through_point_member(&e2, &p0, &p1, &q0, &p(&[1.0, 4.0]), 1e-9).unwrap());
        assert!(matches!(
            tube_through_point_member(&e2, &p0, &p0, &q0, &q0, 1e-9),
            Err(GeomError::DegenerateSkeleton(_))
        ));
    }

    #[test]
    fn direction_sets_contain_both_poles() {
        let dirs = fibonacci_directions(&[0.0, 2.0, 0.0], 50).unwrap();
        assert_eq!(dirs[0], vec![0.0, 1.0, 0.0]);
        assert_eq!(dirs[49], vec![0.0, -1.0, 0.0]);
        for d in &dirs {
            let n: f64 = d.iter().map(|x| x * x).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        let circle = fibonacci_directions(&[1.0f64, 1.0], 8).unwrap();
        assert!((circle[4][0] + circle[0][0]).abs() < 1e-12);
        assert!(fibonacci_directions(&[1.0, 0.0, 0.0, 0.0], 8).is_err());
    }

    #[test]
    fn euclidean_cone_is_a_line() {
        let e3 = Euclidean::new(3).unwrap();
        let cone = cone_sample(
            &e3,
            &p(&[0.0, 0.0, 0.0]),
            &p(&[1.0, 2.0, -1.0]),
            &p(&[3.0, 3.0, 3.0]),
            500,
            None,
            1e-4,
        )
        .unwrap();
        assert_eq!(cone.accepted_count(), 2);
        assert_eq!(cone.aperture, 0.0);
        assert_eq!(cone.accepted[0].orientation, Orientation::Parallel);
        assert_eq!(cone.accepted[1].orientation, Orientation::Antiparallel);
    }
}
