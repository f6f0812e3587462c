//! Seeded exact random sampling. All generators draw from a ChaCha8 stream,
//! so a seed fixes every sample.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::catalog::Family;
use crate::curvature::{MetricFrame, Orientation};
use crate::error::Result;
use crate::hermitian::AlmostHermitianStructure;
use crate::lie::LieAlgebra;
use crate::linalg::{Matrix, Vector};
use crate::scalar::{Field, Q};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `p/q` with `|p| ≤ max` and `1 ≤ q ≤ max`.
pub fn rational(rng: &mut SampleRng, max: i64) -> Q {
    Q::ratio(rng.gen_range(-max..=max), rng.gen_range(1..=max))
}

pub fn positive_rational(rng: &mut SampleRng, max: i64) -> Q {
    Q::ratio(rng.gen_range(1..=max), rng.gen_range(1..=max))
}

pub fn nonzero_vector(rng: &mut SampleRng, n: usize, max: i64) -> Vector<Q> {
    loop {
        let v: Vector<Q> = (0..n).map(|_| rational(rng, max)).collect();
        if v.iter().any(|x| !x.is_zero()) {
            return v;
        }
    }
}

pub fn matrix(rng: &mut SampleRng, rows: usize, cols: usize, max: i64) -> Matrix<Q> {
    Matrix::from_fn(rows, cols, |_, _| rational(rng, max))
}

/// Lower-triangular coframe with positive diagonal.
pub fn coframe(rng: &mut SampleRng, n: usize, max: i64) -> Matrix<Q> {
    Matrix::from_fn(n, n, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Greater => rational(rng, max),
        std::cmp::Ordering::Equal => positive_rational(rng, max),
        std::cmp::Ordering::Less => Q::zero(),
    })
}

/// Lower-triangular coframe with integer diagonal in `1..=max`; keeps the
/// metric's condition number small enough for `f64` comparisons.
pub fn bounded_coframe(rng: &mut SampleRng, n: usize, max: i64) -> Matrix<Q> {
    Matrix::from_fn(n, n, |r, c| match r.cmp(&c) {
        std::cmp::Ordering::Greater => rational(rng, max),
        std::cmp::Ordering::Equal => Q::int(rng.gen_range(1..=max)),
        std::cmp::Ordering::Less => Q::zero(),
    })
}

/// Metric `LᵀL` for a random rational coframe `L`, random orientation.
pub fn metric(rng: &mut SampleRng, n: usize, max: i64) -> MetricFrame<Q> {
    let l = coframe(rng, n, max);
    let orientation = if rng.gen_bool(0.5) {
        Orientation::Positive
    } else {
        Orientation::Negative
    };
    MetricFrame::from_coframe(l, orientation).expect("positive diagonal coframe is invertible")
}

/// Cayley transform `(I − A)(I + A)⁻¹` of a random antisymmetric `A`.
pub fn orthogonal(rng: &mut SampleRng, n: usize, max: i64) -> Matrix<Q> {
    let mut upper = vec![Q::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            upper[i * n + j] = rational(rng, max);
        }
    }
    let a = Matrix::from_fn(n, n, |i, j| {
        if i < j {
            upper[i * n + j].clone()
        } else {
            upper[j * n + i].neg()
        }
    });
    let id = Matrix::identity(n);
    let plus = id.add(&a).expect("square");
    let minus = id.sub(&a).expect("square");
    minus
        .mul(&plus.inverse().expect("I + A is invertible for antisymmetric A"))
        .expect("square")
}

/// Standard complex structure `e₁ ↦ e₂, e₃ ↦ e₄` on an orthonormal frame.
pub fn standard_j() -> Matrix<Q> {
    let z = Q::zero;
    let o = Q::one;
    Matrix::from_rows(vec![
        vec![z(), o().neg(), z(), z()],
        vec![o(), z(), z(), z()],
        vec![z(), z(), z(), o().neg()],
        vec![z(), z(), o(), z()],
    ])
    .expect("4x4")
}

/// A random `J` compatible with `m` (both orientation classes occur).
pub fn compatible_structure(rng: &mut SampleRng, m: &MetricFrame<Q>, max: i64) -> Result<AlmostHermitianStructure<Q>> {
    let mut o = orthogonal(rng, 4, max);
    if rng.gen_bool(0.5) {
        o = o.mul(&Matrix::diagonal(&[Q::one(), Q::one(), Q::one(), Q::int(-1)]))?;
    }
    let jf = o.mul(&standard_j())?.mul(&o.transpose())?;
    let p = m.frame()?;
    let j = p.mul(&jf)?.mul(m.coframe()?)?;
    AlmostHermitianStructure::from_j(m, j)
}

/// Rational point `((1−t²)/(1+t²), 2t/(1+t²))` on the unit circle.
pub fn circle_point(t: &Q) -> (Q, Q) {
    let t2 = t.square();
    let den = Q::one().add(&t2);
    (
        Q::one().sub(&t2).div(&den).expect("1 + t² > 0"),
        t.mul(&Q::int(2)).div(&den).expect("1 + t² > 0"),
    )
}

/// A random catalog family, with `λ` drawn from `[0, max]` for dS.
pub fn catalog_algebra(rng: &mut SampleRng, max: i64) -> (Family, LieAlgebra<Q>) {
    let family = Family::ALL[rng.gen_range(0..Family::ALL.len())];
    let lambda = family
        .has_lambda()
        .then(|| Q::ratio(rng.gen_range(0..=max), rng.gen_range(1..=max)));
    let g = family.algebra(lambda.as_ref()).expect("admissible parameters");
    (family, g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_streams_repeat() {
        let a: Vec<Q> = (0..5).map(|_| rational(&mut rng(3), 10)).collect();
        let b: Vec<Q> = (0..5).map(|_| rational(&mut rng(3), 10)).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn cayley_is_orthogonal() {
        let mut r = rng(11);
        for _ in 0..10 {
            let o = orthogonal(&mut r, 4, 5);
            assert!(o.transpose().mul(&o).unwrap().is_identity());
        }
    }

    #[test]
    fn random_structures_are_compatible() {
        let mut r = rng(5);
        for _ in 0..10 {
            let m = metric(&mut r, 4, 5);
            let s = compatible_structure(&mut r, &m, 5).unwrap();
            assert!(s.invariants_hold());
        }
    }

    #[test]
    fn circle_points_are_unit() {
        for t in [Q::int(0), Q::ratio(1, 2), Q::int(3), Q::ratio(-2, 3)] {
            let (x, y) = circle_point(&t);
            assert!(x.square().add(&y.square()).is_one());
        }
        assert_eq!(circle_point(&Q::ratio(1, 2)), (Q::ratio(3, 5), Q::ratio(4, 5)));
    }
}
