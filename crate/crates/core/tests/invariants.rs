use proptest::prelude::*;

use lieherm::curvature::{
    curvature_blocks, levi_civita, ricci_scalar, riemann, weyl_tensor, CurvatureReport, FourTensor, MetricFrame,
    Orientation,
};
use lieherm::hermitian::{canonical_connection, AlmostHermitianStructure};
use lieherm::lie::LieAlgebra;
use lieherm::sampling;
use lieherm::{Field, Float, Q};

fn case(seed: u64) -> (LieAlgebra<Q>, MetricFrame<Q>, AlmostHermitianStructure<Q>) {
    let mut rng = sampling::rng(seed);
    let (_, g) = sampling::catalog_algebra(&mut rng, 5);
    let m = sampling::metric(&mut rng, 4, 5);
    let s = sampling::compatible_structure(&mut rng, &m, 4).unwrap();
    (g, m, s)
}

fn weyl_trace_is_zero(m: &MetricFrame<Q>, w: &FourTensor<Q>) -> bool {
    let gi = m.gram_inv();
    (0..4).all(|j| {
        (0..4).all(|l| {
            let mut t = Q::zero();
            for i in 0..4 {
                for k in 0..4 {
                    t = t.add(&gi[(i, k)].mul(w.get(i, j, k, l)));
                }
            }
            t.is_zero()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn riemann_symmetries_and_bianchi(seed in any::<u64>()) {
        let (g, m, _) = case(seed);
        let conn = levi_civita(&g, &m).unwrap();
        prop_assert!(conn.is_torsion_free(&g));
        prop_assert!(conn.is_metric(m.gram()));
        let r = riemann(&g, &m, &conn).unwrap();
        prop_assert!(r.has_curvature_symmetries());
        prop_assert!(r.satisfies_first_bianchi());
    }

    #[test]
    fn weyl_is_trace_free_and_conformally_covariant(seed in any::<u64>(), c in 1i64..6, d in 1i64..6) {
        let (g, m, _) = case(seed);
        let r = riemann(&g, &m, &levi_civita(&g, &m).unwrap()).unwrap();
        let w = weyl_tensor(&m, &r).unwrap();
        prop_assert!(weyl_trace_is_zero(&m, &w));
        // W of c²g is c²W as a (0,4)-tensor
        let scale = Q::ratio(c, d);
        let ms = m.scaled(&scale).unwrap();
        let rs = riemann(&g, &ms, &levi_civita(&g, &ms).unwrap()).unwrap();
        let ws = weyl_tensor(&ms, &rs).unwrap();
        prop_assert_eq!(ws, w.scale(&scale.square()));
    }

    #[test]
    fn operator_trace_is_half_the_scalar_curvature(seed in any::<u64>()) {
        let (g, m, _) = case(seed);
        let b = curvature_blocks(&g, &m).unwrap();
        prop_assert_eq!(b.operator.trace(), b.scalar.half());
        let r = riemann(&g, &m, &levi_civita(&g, &m).unwrap()).unwrap();
        prop_assert_eq!(ricci_scalar(&m, &r).1, b.scalar.clone());
        prop_assert!(b.wplus.trace().is_zero() && b.wminus.trace().is_zero());
    }

    #[test]
    fn canonical_connection_preserves_g_and_j(seed in any::<u64>()) {
        let (g, m, s) = case(seed);
        let conn = canonical_connection(&g, &m, &s).unwrap();
        prop_assert!(conn.is_metric(m.gram()));
        prop_assert!(conn.preserves(s.j()));
        prop_assert!(s.invariants_hold());
    }

    #[test]
    fn float_mode_agrees_with_exact_mode(seed in any::<u64>()) {
        let mut rng = sampling::rng(seed);
        let (_, g) = sampling::catalog_algebra(&mut rng, 5);
        let m = MetricFrame::from_coframe(sampling::bounded_coframe(&mut rng, 4, 3), Orientation::Positive).unwrap();
        let exact = CurvatureReport::compute(&g, &m).unwrap();
        let to_f = |x: &Q| Float::from_q_tol(x, Float::DEFAULT_TOL);
        let float = CurvatureReport::compute(&g.map(to_f), &m.map(to_f)).unwrap();
        // tolerance relative to the size of the curvature tensor
        let scale = exact.riemann.entries().iter().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
        let close = |x: &Q, y: &Float| (x.to_f64() - y.to_f64()).abs() <= 1e-9 * scale;
        prop_assert!(close(&exact.scalar, &float.scalar));
        for (x, y) in exact.riemann.entries().iter().zip(float.riemann.entries()) {
            prop_assert!(close(x, y));
        }
        for (x, y) in exact.weyl.entries().iter().zip(float.weyl.entries()) {
            prop_assert!(close(x, y));
        }
        prop_assert_eq!(exact.flags.conformally_flat, float.flags.conformally_flat);
    }
}
