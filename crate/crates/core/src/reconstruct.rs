//! Euclidean reconstruction from σ alone.
//!
//! A basis P⁰…Pⁿ with Fₙ ≠ 0 gives the covariant metric g_ik = Γ(P₀,Pᵢ,Pₖ)
//! and covariant coordinates xᵢ(P) = Γ(P₀,Pᵢ,P). A sample is embeddable in
//! an n-dimensional flat space when every Fₙ₊₁(Pⁿ, P) vanishes and σ is
//! recovered by ½ g^{ik} Δxᵢ Δxₖ; proper Euclidean additionally needs all
//! eigenvalues of g_cov positive.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{GeomError, Result};
use crate::linalg::Matrix;
use crate::scalar::Scalar;
use crate::sigma::{gram_matrix, negligible, Point, SigmaSpace};

/// Default highest dimension tried by [`menger_embed_test`].
pub const DEFAULT_MAX_DIM: usize = 8;

/// Largest sample for which [`menger_embed_test`] enumerates every basis.
pub const EXHAUSTIVE_LIMIT: usize = 12;

/// Eigenvalue sign counts of the covariant metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl Signature {
    pub fn is_proper(&self) -> bool {
        self.negative == 0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionFrame<T> {
    pub basis: Vec<Point<T>>,
    pub g_cov: Matrix<T>,
    pub g_contra: Matrix<T>,
    pub dim: usize,
    pub signature: Signature,
}

impl<T: Scalar> ReconstructionFrame<T> {
    /// Frame on the basis P⁰…Pⁿ (P⁰ is the origin). Fails with
    /// [`GeomError::Singular`] when Fₙ(basis) = 0.
    pub fn new<S: SigmaSpace<T> + ?Sized>(space: &S, basis: Vec<Point<T>>) -> Result<Self> {
        if basis.len() < 2 {
            return Err(GeomError::Contract("basis needs at least two points".into()));
        }
        let g_cov = gram_matrix(space, &basis[0], &basis[1..])?;
        let g_contra = g_cov.inverse()?;
        let inertia = g_cov.inertia();
        if inertia.zero > 0 {
            return Err(GeomError::Singular);
        }
        Ok(Self {
            dim: basis.len() - 1,
            signature: Signature {
                positive: inertia.positive,
                negative: inertia.negative,
            },
            basis,
            g_cov,
            g_contra,
        })
    }

    /// Frame on the sample points at `indices`.
    pub fn from_sample<S: SigmaSpace<T> + ?Sized>(
        space: &S,
        sample: &[Point<T>],
        indices: &[usize],
    ) -> Result<Self> {
        let basis = indices
            .iter()
            .map(|&i| {
                sample
                    .get(i)
                    .cloned()
                    .ok_or_else(|| GeomError::Contract(format!("basis index {i} out of range")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(space, basis)
    }

    pub fn origin(&self) -> &Point<T> {
        &self.basis[0]
    }
}

/// Covariant coordinates xᵢ(P) = Γ(P₀, Pᵢ, P), i = 1…n.
pub fn coordinates<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    frame: &ReconstructionFrame<T>,
    p: &Point<T>,
) -> Result<Vec<T>> {
    let p0 = frame.origin();
    let to_p = space.sigma(p0, p)?;
    frame.basis[1..]
        .iter()
        .map(|pi| Ok(space.sigma(p0, pi)? + to_p - space.sigma(pi, p)?))
        .collect()
}

/// σ = ½ g^{ik} (xᵢ − x′ᵢ)(xₖ − x′ₖ).
pub fn sigma_from_coords<T: Scalar>(frame: &ReconstructionFrame<T>, x: &[T], y: &[T]) -> T {
    let d: Vec<T> = x.iter().zip(y).map(|(&a, &b)| a - b).collect();
    let mut acc = T::zero();
    for i in 0..frame.dim {
        for k in 0..frame.dim {
            acc = acc + frame.g_contra[(i, k)] * d[i] * d[k];
        }
    }
    acc / (T::one() + T::one())
}

/// Greedy basis chain: the pair with the largest |σ|, then repeatedly the
/// point maximizing |F_{k+1}|, stopping when every candidate gives a
/// negligible determinant or `max_order` is reached. Ties go to the first
/// index.
fn greedy_chain<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    sample: &[Point<T>],
    tol: T,
    max_order: usize,
) -> Result<Vec<usize>> {
    if sample.len() < 2 {
        return Err(GeomError::Contract("sample needs at least two points".into()));
    }
    let mut pair = (0, 1, T::zero());
    for i in 0..sample.len() {
        for k in (i + 1)..sample.len() {
            let s = space.sigma(&sample[i], &sample[k])?.abs();
            if s > pair.2 {
                pair = (i, k, s);
            }
        }
    }
    if pair.2.is_zero() {
        return Err(GeomError::NoBasis);
    }
    let mut chain = vec![pair.0, pair.1];
    while chain.len() <= max_order {
        let order = chain.len();
        let mut others: Vec<Point<T>> = chain[1..].iter().map(|&i| sample[i].clone()).collect();
        others.push(sample[0].clone());
        let mut best: Option<(usize, T)> = None;
        for c in 0..sample.len() {
            if chain.contains(&c) {
                continue;
            }
            others[order - 1] = sample[c].clone();
            let g = gram_matrix(space, &sample[chain[0]], &others)?;
            let det = g.determinant();
            if negligible(det, g.max_abs(), order, tol) {
                continue;
            }
            if best.is_none_or(|(_, b)| det.abs() > b) {
                best = Some((c, det.abs()));
            }
        }
        match best {
            Some((c, _)) => chain.push(c),
            None => break,
        }
    }
    Ok(chain)
}

/// Dimension n of the sample and the sample indices of a basis P⁰…Pⁿ,
/// grown greedily by largest |F_{k+1}|.
pub fn detect_dimension<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    sample: &[Point<T>],
    tol: T,
) -> Result<(usize, Vec<usize>)> {
    let chain = greedy_chain(space, sample, tol, usize::MAX)?;
    Ok((chain.len() - 1, chain))
}

/// Outcome of one reconstruction condition with its worst normalized residual.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionOutcome<T> {
    pub passed: bool,
    pub residual: T,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Conditions<T> {
    /// Fₙ ≠ 0 on the basis and Fₙ₊₁(basis, P) ≈ 0 for every sample point.
    pub dimension: ConditionOutcome<T>,
    /// σ reproduced from coordinates for every sample pair.
    pub scalar_product: ConditionOutcome<T>,
    /// Equal coordinates imply equal σ rows.
    pub injectivity: bool,
    pub continuity: &'static str,
}

impl<T> Conditions<T> {
    pub fn all_passed(&self) -> bool {
        self.dimension.passed && self.scalar_product.passed && self.injectivity
    }
}

pub const CONTINUITY_UNDECIDED: &str = "not decidable at sample scale";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisSearch {
    Exhaustive,
    Greedy,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EmbeddabilityReport<T> {
    pub embeddable: bool,
    pub dim: usize,
    pub signature: Signature,
    pub max_residual: T,
    /// Sample indices of a point set that fails the conditions; empty iff
    /// embeddable.
    pub witness: Vec<usize>,
    pub pseudoeuclidean: bool,
    pub conditions: Conditions<T>,
    pub basis: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub search: Option<BasisSearch>,
}

fn normalized<T: Scalar>(value: T, scale: T, order: usize) -> T {
    let mut denom = T::one();
    for _ in 0..order {
        denom = denom * scale;
    }
    if denom.is_zero() {
        T::zero()
    } else {
        value.abs() / denom
    }
}

fn sorted_union(base: &[usize], extra: &[usize]) -> Vec<usize> {
    let mut w: Vec<usize> = base.iter().chain(extra).copied().collect();
    w.sort_unstable();
    w.dedup();
    w
}

/// Checks conditions I, II and IIIa for `frame` over every sample point and
/// pair. Failures are report content, not errors; domain errors still
/// propagate.
pub fn verify_conditions<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    sample: &[Point<T>],
    frame: &ReconstructionFrame<T>,
    tol: T,
) -> Result<EmbeddabilityReport<T>> {
    let n = frame.dim;
    let m = sample.len();
    let basis_idx: Vec<usize> = frame
        .basis
        .iter()
        .filter_map(|b| sample.iter().position(|q| q == b))
        .collect();

    // condition I
    let basis_ok = !negligible(
        frame.g_cov.determinant(),
        frame.g_cov.max_abs(),
        n,
        tol,
    );
    let bordered: Vec<(bool, T)> = sample
        .par_iter()
        .map(|p| {
            let mut others = frame.basis[1..].to_vec();
            others.push(p.clone());
            let g = gram_matrix(space, frame.origin(), &others)?;
            let (det, s) = (g.determinant(), g.max_abs());
            Ok((negligible(det, s, n + 1, tol), normalized(det, s, n + 1)))
        })
        .collect::<Result<_>>()?;
    let dim_residual = bordered.iter().fold(T::zero(), |a, &(_, r)| a.max_of(r));
    let off_plane = bordered.iter().position(|&(ok, _)| !ok);

    // condition II
    let coords: Vec<Vec<T>> = sample
        .par_iter()
        .map(|p| coordinates(space, frame, p))
        .collect::<Result<_>>()?;
    let sigma_rows: Vec<Vec<T>> = (0..m)
        .into_par_iter()
        .map(|i| (0..m).map(|k| space.sigma(&sample[i], &sample[k])).collect())
        .collect::<Result<_>>()?;
    let scale = sigma_rows
        .iter()
        .flatten()
        .fold(T::one(), |a, &s| a.max_of(s.abs()));
    let row_worst: Vec<(T, Option<usize>)> = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut worst = T::zero();
            let mut first_bad = None;
            for k in (i + 1)..m {
                let r = (sigma_rows[i][k] - sigma_from_coords(frame, &coords[i], &coords[k])).abs()
                    / scale;
                worst = worst.max_of(r);
                if first_bad.is_none() && r > tol {
                    first_bad = Some(k);
                }
            }
            (worst, first_bad)
        })
        .collect();
    let sigma_residual = row_worst.iter().fold(T::zero(), |a, &(r, _)| a.max_of(r));
    let bad_pair = row_worst
        .iter()
        .enumerate()
        .find_map(|(i, &(_, k))| k.map(|k| (i, k)));

    // condition IIIa
    let bound = tol * scale;
    let collision = (0..m).find_map(|i| {
        ((i + 1)..m)
            .find(|&k| {
                coords[i]
                    .iter()
                    .zip(&coords[k])
                    .all(|(&a, &b)| (a - b).abs() <= bound)
                    && sigma_rows[i]
                        .iter()
                        .zip(&sigma_rows[k])
                        .any(|(&a, &b)| (a - b).abs() > bound)
            })
            .map(|k| (i, k))
    });

    let conditions = Conditions {
        dimension: ConditionOutcome {
            passed: basis_ok && off_plane.is_none(),
            residual: dim_residual,
        },
        scalar_product: ConditionOutcome {
            passed: bad_pair.is_none(),
            residual: sigma_residual,
        },
        injectivity: collision.is_none(),
        continuity: CONTINUITY_UNDECIDED,
    };
    let witness = if !basis_ok {
        basis_idx.clone()
    } else if let Some(p) = off_plane {
        sorted_union(&basis_idx, &[p])
    } else if let Some((i, k)) = bad_pair {
        sorted_union(&basis_idx, &[i, k])
    } else if let Some((i, k)) = collision {
        sorted_union(&basis_idx, &[i, k])
    } else if !frame.signature.is_proper() {
        sorted_union(&basis_idx, &[])
    } else {
        Vec::new()
    };
    let embeddable = conditions.all_passed() && frame.signature.is_proper();
    debug_assert_eq!(embeddable, witness.is_empty());
    Ok(EmbeddabilityReport {
        embeddable,
        dim: n,
        signature: frame.signature,
        max_residual: dim_residual.max_of(sigma_residual),
        witness,
        pseudoeuclidean: !frame.signature.is_proper(),
        conditions,
        basis: basis_idx,
        search: None,
    })
}

/// Detects the dimension greedily, builds the frame and verifies it.
pub fn reconstruct<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    sample: &[Point<T>],
    tol: T,
) -> Result<(ReconstructionFrame<T>, EmbeddabilityReport<T>)> {
    let (_, basis) = detect_dimension(space, sample, tol)?;
    let frame = ReconstructionFrame::from_sample(space, sample, &basis)?;
    let report = verify_conditions(space, sample, &frame, tol)?;
    Ok((frame, report))
}

/// Calls `visit` on every k-subset of 0..m in lexicographic order.
fn for_each_subset(m: usize, k: usize, mut visit: impl FnMut(&[usize]) -> Result<()>) -> Result<()> {
    if k > m {
        return Ok(());
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx)?;
        let Some(pos) = (0..k).rev().find(|&i| idx[i] != i + m - k) else {
            return Ok(());
        };
        idx[pos] += 1;
        for j in (pos + 1)..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Every (n+1)-subset of the sample with the largest |Fₙ|, in lexicographic
/// order. Empty when all are negligible.
pub fn max_volume_bases<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    sample: &[Point<T>],
    n: usize,
    tol: T,
) -> Result<Vec<Vec<usize>>> {
    let mut best = T::zero();
    let mut found: Vec<Vec<usize>> = Vec::new();
    for_each_subset(sample.len(), n + 1, |idx| {
        let others: Vec<Point<T>> = idx[1..].iter().map(|&i| sample[i].clone()).collect();
        let g = gram_matrix(space, &sample[idx[0]], &others)?;
        let det = g.determinant();
        if negligible(det, g.max_abs(), n, tol) {
            return Ok(());
        }
        let a = det.abs();
        if found.is_empty() || a > best {
            best = a;
            found = vec![idx.to_vec()];
        } else if a == best {
            found.push(idx.to_vec());
        }
        Ok(())
    })?;
    Ok(found)
}

/// Smallest n ≤ `n_max` for which conditions I, II and IIIa hold on a
/// finite space, using the basis of largest |Fₙ| (found exhaustively up to
/// [`EXHAUSTIVE_LIMIT`] points, greedily beyond). `embeddable` is true only
/// for a proper Euclidean signature. When no n passes, the report describes
/// the last order tried.
pub fn menger_embed_test<T: Scalar, S: SigmaSpace<T> + ?Sized>(
    space: &S,
    n_max: usize,
    tol: T,
) -> Result<EmbeddabilityReport<T>> {
    let sample = space
        .finite_points()
        .ok_or_else(|| GeomError::Unsupported("embedding test requires a finite space".into()))?;
    if sample.len() < 2 {
        return Err(GeomError::Contract("embedding test needs at least two points".into()));
    }
    if n_max == 0 {
        return Err(GeomError::Contract("n_max must be at least 1".into()));
    }
    let search = if sample.len() <= EXHAUSTIVE_LIMIT {
        BasisSearch::Exhaustive
    } else {
        BasisSearch::Greedy
    };
    let chain = greedy_chain(space, &sample, tol, n_max)?;
    let top = n_max.min(sample.len() - 1);
    let mut last: Option<EmbeddabilityReport<T>> = None;
    for n in 1..=top {
        let basis = match search {
            BasisSearch::Exhaustive => {
                match max_volume_bases(space, &sample, n, tol)?.into_iter().next() {
                    Some(b) => b,
                    None => break,
                }
            }
            BasisSearch::Greedy => {
                if chain.len() < n + 1 {
                    break;
                }
                chain[..=n].to_vec()
            }
        };
        let frame = ReconstructionFrame::from_sample(space, &sample, &basis)?;
        let mut report = verify_conditions(space, &sample, &frame, tol)?;
        report.search = Some(search);
        if report.conditions.all_passed() {
            return Ok(report);
        }
        last = Some(report);
    }
    match last {
        Some(r) => Ok(r),
        None => {
            let frame = ReconstructionFrame::from_sample(space, &sample, &chain)?;
            let mut report = verify_conditions(space, &sample, &frame, tol)?;
            report.search = Some(search);
            Ok(report)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::{Euclidean, Minkowski, Tabulated};
    use num_rational::Rational64;

    fn p(c: &[f64]) -> Point<f64> {
        Point::Coords(c.to_vec())
    }

    #[test]
    fn spec_coordinates() {
        let e2 = Euclidean::new(2).unwrap();
        let frame =
            ReconstructionFrame::new(&e2, vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.0, 1.0])])
                .unwrap();
        assert_eq!(coordinates(&e2, &frame, &p(&[3.0, 4.0])).unwrap(), vec![3.0, 4.0]);
        assert_eq!(coordinates(&e2, &frame, &p(&[0.0, 0.0])).unwrap(), vec![0.0, 0.0]);
        assert_eq!(sigma_from_coords(&frame, &[0.0, 0.0], &[3.0, 4.0]), 12.5);
        assert_eq!(sigma_from_coords(&frame, &[3.0, 4.0], &[3.0, 4.0]), 0.0);
        assert_eq!(frame.signature, Signature { positive: 2, negative: 0 });
    }

    #[test]
    fn basis_point_coordinates_are_metric_rows() {
        let e3 = Euclidean::new(3).unwrap();
        let basis = vec![
            p(&[0.5, 0.0, 1.0]),
            p(&[1.5, 2.0, 0.0]),
            p(&[0.0, 1.0, 3.0]),
            p(&[2.0, -1.0, 1.0]),
        ];
        let frame = ReconstructionFrame::new(&e3, basis.clone()).unwrap();
        for k in 1..4 {
            assert_eq!(coordinates(&e3, &frame, &basis[k]).unwrap(), frame.g_cov.row(k - 1));
        }
        let id = &frame.g_cov * &frame.g_contra;
        for i in 0..3 {
            for k in 0..3 {
                let want = if i == k { 1.0 } else { 0.0 };
                assert!((id[(i, k)] - want).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn minkowski_frame_null_separation() {
        let m2 = Minkowski::new(2).unwrap();
        let frame =
            ReconstructionFrame::new(&m2, vec![p(&[0.0, 0.0]), p(&[1.0, 0.0]), p(&[0.0, 1.0])])
                .unwrap();
        assert_eq!(frame.signature, Signature { positive: 1, negative: 1 });
        assert_eq!(sigma_from_coords(&frame, &[0.0, 0.0], &[1.0, 1.0]), 0.0);
    }

    #[test]
    fn dimension_of_small_samples() {
        let e3 = Euclidean::new(3).unwrap();
        let two = vec![p(&[0.0, 0.0, 0.0]), p(&[1.0, 2.0, 2.0])];
        assert_eq!(detect_dimension(&e3, &two, 1e-9).unwrap(), (1, vec![0, 1]));
        let same = vec![p(&[1.0, 1.0, 1.0]); 3];
        assert_eq!(detect_dimension(&e3, &same, 1e-9), Err(GeomError::NoBasis));
        let collinear: Vec<_> = (0..5).map(|i| p(&[f64::from(i), 2.0 * f64::from(i), 0.0])).collect();
        assert_eq!(detect_dimension(&e3, &collinear, 1e-9).unwrap(), (1, vec![0, 4]));
    }

    #[test]
    fn unit_square_is_planar() {
        let t = Tabulated::new(vec![
            vec![0.0, 0.5, 1.0, 0.5],
            vec![0.5, 0.0, 0.5, 1.0],
            vec![1.0, 0.5, 0.0, 0.5],
            vec![0.5, 1.0, 0.5, 0.0],
        ])
        .unwrap();
        let r = menger_embed_test(&t, DEFAULT_MAX_DIM, 1e-9).unwrap();
        assert!(r.embeddable);
        assert_eq!(r.dim, 2);
        assert_eq!(r.signature, Signature { positive: 2, negative: 0 });
        assert!(r.witness.is_empty());
        assert_eq!(r.search, Some(BasisSearch::Exhaustive));
    }

    #[test]
    fn two_point_tables() {
        let real = Tabulated::new(vec![vec![0.0, 0.7], vec![0.7, 0.0]]).unwrap();
        let r = menger_embed_test(&real, DEFAULT_MAX_DIM, 1e-9).unwrap();
        assert!(r.embeddable && r.dim == 1);
        let imaginary = Tabulated::new(vec![vec![0.0, -0.7], vec![-0.7, 0.0]]).unwrap();
        let r = menger_embed_test(&imaginary, DEFAULT_MAX_DIM, 1e-9).unwrap();
        assert_eq!(r.dim, 1);
        assert!(!r.embeddable && r.pseudoeuclidean);
        assert!(r.conditions.all_passed());
        assert_eq!(r.signature, Signature { positive: 0, negative: 1 });
        assert_eq!(r.witness, vec![0, 1]);
    }

    #[test]
    fn perturbed_square_is_not_planar() {
        // diagonal 0-2 lengthened by 10%: σ scales by 1.21
        let t = Tabulated::new(vec![
            vec![0.0, 0.5, 1.21, 0.5],
            vec![0.5, 0.0, 0.5, 1.0],
            vec![1.21, 0.5, 0.0, 0.5],
            vec![0.5, 1.0, 0.5, 0.0],
        ])
        .unwrap();
        let r = menger_embed_test(&t, 2, 1e-9).unwrap();
        assert!(!r.embeddable);
        assert_eq!(r.dim, 2);
        assert!(r.witness.contains(&0) && r.witness.contains(&2));
        let r3 = menger_embed_test(&t, 3, 1e-9).unwrap();
        assert_eq!(r3.dim, 3);
        assert!(r3.conditions.all_passed());
    }

    #[test]
    fn exact_rational_reconstruction() {
        let e3 = Euclidean::new(3).unwrap();
        let q = |a: i64, b: i64| Rational64::new(a, b);
        let sample: Vec<Point<Rational64>> = vec![
            Point::Coords(vec![q(0, 1), q(0, 1), q(0, 1)]),
            Point::Coords(vec![q(1, 2), q(3, 1), q(-1, 1)]),
            Point::Coords(vec![q(2, 1), q(-1, 2), q(1, 1)]),
            Point::Coords(vec![q(-3, 2), q(1, 1), q(2, 1)]),
            Point::Coords(vec![q(1, 1), q(2, 1), q(-5, 2)]),
            Point::Coords(vec![q(4, 1), q(1, 1), q(1, 2)]),
        ];
        let (frame, report) = reconstruct(&e3, &sample, Rational64::from_integer(0)).unwrap();
        assert_eq!(frame.dim, 3);
        assert!(report.embeddable);
        assert_eq!(report.max_residual, Rational64::from_integer(0));
        for a in &sample {
            for b in &sample {
                let xa = coordinates(&e3, &frame, a).unwrap();
                let xb = coordinates(&e3, &frame, b).unwrap();
                assert_eq!(sigma_from_coords(&frame, &xa, &xb), e3.eval(a, b));
            }
        }
    }

    #[test]
    fn subset_enumeration() {
        let mut seen = Vec::new();
        for_each_subset(4, 2, |s| {
            seen.push(s.to_vec());
            Ok(())
        })
        .unwrap();
        assert_eq!(
            seen,
            vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]
        );
    }
}
