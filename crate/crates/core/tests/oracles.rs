//! Library results against brute-force reimplementations that only read
//! structure constants and Gram entries.

use lieherm::catalog::{ds_gram, Family};
use lieherm::curvature::{
    curvature_blocks, hodge_star_2, levi_civita, ricci_scalar, riemann, MetricFrame, Orientation,
};
use lieherm::hermitian::{nijenhuis, omega_in_frame, wplus_j_blocks, AlmostHermitianStructure};
use lieherm::lie::LieAlgebra;
use lieherm::sampling;
use lieherm::{Field, Q};

type V = Vec<Q>;
type M = Vec<Vec<Q>>;

fn gram(m: &MetricFrame<Q>) -> M {
    let n = m.gram().rows();
    (0..n)
        .map(|i| (0..n).map(|j| m.gram()[(i, j)].clone()).collect())
        .collect()
}

fn inv(a: &M) -> M {
    // Gauss-Jordan on [A | I]
    let n = a.len();
    let mut w: M = a
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut row = r.clone();
            row.extend((0..n).map(|j| if i == j { Q::one() } else { Q::zero() }));
            row
        })
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !w[r][c].is_zero()).expect("invertible");
        w.swap(c, p);
        let piv = w[c][c].clone();
        for x in w[c].iter_mut() {
            *x = x.div(&piv).unwrap();
        }
        for r in 0..n {
            if r != c && !w[r][c].is_zero() {
                let f = w[r][c].clone();
                for k in 0..2 * n {
                    let v = w[c][k].mul(&f);
                    w[r][k] = w[r][k].sub(&v);
                }
            }
        }
    }
    w.into_iter().map(|r| r[n..].to_vec()).collect()
}

fn ip(g: &M, x: &V, y: &V) -> Q {
    let mut s = Q::zero();
    for i in 0..x.len() {
        for j in 0..y.len() {
            s = s.add(&g[i][j].mul(&x[i]).mul(&y[j]));
        }
    }
    s
}

fn e(n: usize, i: usize) -> V {
    (0..n).map(|k| if k == i { Q::one() } else { Q::zero() }).collect()
}

fn br(alg: &LieAlgebra<Q>, x: &V, y: &V) -> V {
    let n = x.len();
    (0..n)
        .map(|k| {
            let mut s = Q::zero();
            for i in 0..n {
                for j in 0..n {
                    s = s.add(&x[i].mul(&y[j]).mul(alg.structure_constant(i, j, k)));
                }
            }
            s
        })
        .collect()
}

/// `∇_{e_i} e_j` from `2g(∇_X Y, Z) = g([X,Y],Z) − g([Y,Z],X) + g([Z,X],Y)`.
fn koszul(alg: &LieAlgebra<Q>, g: &M) -> Vec<Vec<V>> {
    let n = g.len();
    let gi = inv(g);
    let half = Q::ratio(1, 2);
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let (x, y) = (e(n, i), e(n, j));
                    let rhs: V = (0..n)
                        .map(|l| {
                            let z = e(n, l);
                            ip(g, &br(alg, &x, &y), &z)
                                .sub(&ip(g, &br(alg, &y, &z), &x))
                                .add(&ip(g, &br(alg, &z, &x), &y))
                                .mul(&half)
                        })
                        .collect();
                    (0..n)
                        .map(|k| (0..n).fold(Q::zero(), |s, l| s.add(&gi[k][l].mul(&rhs[l]))))
                        .collect()
                })
                .collect()
        })
        .collect()
}

fn nabla(conn: &[Vec<V>], x: &V, y: &V) -> V {
    let n = x.len();
    let mut out = vec![Q::zero(); n];
    for i in 0..n {
        for j in 0..n {
            let c = x[i].mul(&y[j]);
            if c.is_zero() {
                continue;
            }
            for k in 0..n {
                out[k] = out[k].add(&c.mul(&conn[i][j][k]));
            }
        }
    }
    out
}

/// `R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]} Z`.
fn r_std(alg: &LieAlgebra<Q>, conn: &[Vec<V>], x: &V, y: &V, z: &V) -> V {
    let a = nabla(conn, x, &nabla(conn, y, z));
    let b = nabla(conn, y, &nabla(conn, x, z));
    let c = nabla(conn, &br(alg, x, y), z);
    (0..x.len()).map(|k| a[k].sub(&b[k]).sub(&c[k])).collect()
}

fn random_case(seed: u64) -> (LieAlgebra<Q>, MetricFrame<Q>) {
    let mut rng = sampling::rng(seed);
    let (_, alg) = sampling::catalog_algebra(&mut rng, 4);
    let m = sampling::metric(&mut rng, 4, 4);
    (alg, m)
}

#[test]
fn levi_civita_matches_koszul() {
    for seed in 0..15 {
        let (alg, m) = random_case(seed);
        let conn = levi_civita(&alg, &m).unwrap();
        let oracle = koszul(&alg, &gram(&m));
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    assert_eq!(conn.gamma(i, j, k), &oracle[i][j][k], "seed {seed} ({i},{j},{k})");
                }
            }
        }
    }
}

#[test]
fn riemann_matches_second_derivatives() {
    for seed in 0..10 {
        let (alg, m) = random_case(seed);
        let g = gram(&m);
        let conn = koszul(&alg, &g);
        let r = riemann(&alg, &m, &levi_civita(&alg, &m).unwrap()).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    for l in 0..4 {
                        let v = r_std(&alg, &conn, &e(4, i), &e(4, j), &e(4, l));
                        assert_eq!(r.get(i, j, k, l), &ip(&g, &v, &e(4, k)), "seed {seed}");
                    }
                }
            }
        }
    }
}

#[test]
fn ricci_is_a_trace() {
    for seed in 20..30 {
        let (alg, m) = random_case(seed);
        let g = gram(&m);
        let gi = inv(&g);
        let conn = koszul(&alg, &g);
        let r = riemann(&alg, &m, &levi_civita(&alg, &m).unwrap()).unwrap();
        let (ric, s) = ricci_scalar(&m, &r);
        let mut s_oracle = Q::zero();
        for y in 0..4 {
            for z in 0..4 {
                // Ric(Y,Z) = tr(X ↦ R(X,Y)Z)
                let tr = (0..4).fold(Q::zero(), |acc, x| {
                    acc.add(&r_std(&alg, &conn, &e(4, x), &e(4, y), &e(4, z))[x])
                });
                assert_eq!(ric[(y, z)], tr, "seed {seed}");
                s_oracle = s_oracle.add(&gi[y][z].mul(&tr));
            }
        }
        assert_eq!(s, s_oracle);
    }
}

#[test]
fn hyperbolic_space_has_curvature_minus_one() {
    // [e1, ej] = ej: real hyperbolic space
    let alg = LieAlgebra::from_brackets(4, &[(0, 1, 1, Q::one()), (0, 2, 2, Q::one()), (0, 3, 3, Q::one())]).unwrap();
    let m = MetricFrame::identity(4);
    let r = riemann(&alg, &m, &levi_civita(&alg, &m).unwrap()).unwrap();
    for a in 0..4 {
        for b in 0..4 {
            if a != b {
                assert_eq!(r.get(a, b, a, b), &Q::int(-1));
            }
        }
    }
    let blocks = curvature_blocks(&alg, &m).unwrap();
    assert!(blocks.wplus.is_zero() && blocks.wminus.is_zero());
    assert_eq!(blocks.scalar, Q::int(-12));
}

fn pairs() -> [(usize, usize); 6] {
    [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
}

/// Coefficient of `e¹²³⁴` in `α∧γ`.
fn top(a: &[Q], c: &[Q]) -> Q {
    a[0].mul(&c[5])
        .sub(&a[1].mul(&c[4]))
        .add(&a[2].mul(&c[3]))
        .add(&a[3].mul(&c[2]))
        .sub(&a[4].mul(&c[1]))
        .add(&a[5].mul(&c[0]))
}

#[test]
fn hodge_star_satisfies_its_defining_identity() {
    // α ∧ *β = ⟨α, β⟩ vol, vol = orientation · √det g · e¹²³⁴; diagonal squares keep √det rational
    let mut rng = sampling::rng(4);
    for trial in 0..12 {
        let d: Vec<Q> = (0..4)
            .map(|_| sampling::positive_rational(&mut rng, 6).square())
            .collect();
        let orient = if trial % 2 == 0 {
            Orientation::Positive
        } else {
            Orientation::Negative
        };
        let m = MetricFrame::new(lieherm::linalg::Matrix::diagonal(&d), orient).unwrap();
        let star = hodge_star_2(&m).unwrap();
        let gi = inv(&gram(&m));
        let sqrt_det = d.iter().fold(Q::one(), |acc, x| acc.mul(&x.sqrt().unwrap()));
        let vol = sqrt_det.mul(&Q::int(orient.sign() as i64));
        for (a, &(i, j)) in pairs().iter().enumerate() {
            for (b, &(k, l)) in pairs().iter().enumerate() {
                let alpha = e(6, a);
                let star_beta: V = (0..6).map(|r| star[(r, b)].clone()).collect();
                let inner = gi[i][k].mul(&gi[j][l]).sub(&gi[i][l].mul(&gi[j][k]));
                assert_eq!(top(&alpha, &star_beta), inner.mul(&vol), "trial {trial}");
            }
        }
    }
}

#[test]
fn nijenhuis_matches_the_bracket_formula() {
    let mut rng = sampling::rng(8);
    for _ in 0..10 {
        let (_, alg) = sampling::catalog_algebra(&mut rng, 4);
        let m = sampling::metric(&mut rng, 4, 4);
        let s = sampling::compatible_structure(&mut rng, &m, 4).unwrap();
        let n = nijenhuis(&alg, &s).unwrap();
        let j = |v: &V| -> V {
            (0..4)
                .map(|r| (0..4).fold(Q::zero(), |acc, c| acc.add(&s.j()[(r, c)].mul(&v[c]))))
                .collect()
        };
        for a in 0..4 {
            for b in 0..4 {
                let (x, y) = (e(4, a), e(4, b));
                let t1 = br(&alg, &j(&x), &j(&y));
                let t2 = j(&br(&alg, &j(&x), &y));
                let t3 = j(&br(&alg, &x, &j(&y)));
                let t4 = br(&alg, &x, &y);
                let expect: V = (0..4)
                    .map(|k| t1[k].sub(&t2[k]).sub(&t3[k]).sub(&t4[k]).mul(&Q::ratio(1, 4)))
                    .collect();
                assert_eq!(n.get(a, b), &expect);
            }
        }
    }
}

#[test]
fn j_blocks_agree_with_direct_projection() {
    let mut rng = sampling::rng(12);
    let mut done = 0;
    while done < 10 {
        let (_, alg) = sampling::catalog_algebra(&mut rng, 4);
        let m = sampling::metric(&mut rng, 4, 4);
        let s = sampling::compatible_structure(&mut rng, &m, 4).unwrap();
        let s = s.with_orientation(s.induced_orientation());
        let blocks = curvature_blocks(&alg, s.metric()).unwrap();
        let jb = wplus_j_blocks(&alg, &s).unwrap();
        // u: ω/|ω| in the unnormalized self-dual basis (|σ| = √2, |ω| = 2)
        let w = omega_in_frame(&s).unwrap();
        let eps = Q::int(blocks.frame_orientation as i64);
        let half = Q::ratio(1, 2);
        let u = [
            w[0].add(&eps.mul(&w[5])).mul(&half),
            w[1].sub(&eps.mul(&w[4])).mul(&half),
            w[2].add(&eps.mul(&w[3])).mul(&half),
        ];
        assert!(u.iter().fold(Q::zero(), |a, x| a.add(&x.square())).is_one());
        let wu: Vec<Q> = (0..3)
            .map(|r| (0..3).fold(Q::zero(), |a, c| a.add(&blocks.wplus[(r, c)].mul(&u[c]))))
            .collect();
        let t = (0..3).fold(Q::zero(), |a, r| a.add(&u[r].mul(&wu[r])));
        assert_eq!(jb.topleft, t);
        let wu_sq = wu.iter().fold(Q::zero(), |a, x| a.add(&x.square()));
        let womega_sq = jb.womega.iter().fold(Q::zero(), |a, x| a.add(&x.square()));
        assert_eq!(womega_sq, wu_sq.sub(&t.square()));
        assert_eq!(jb.reassemble(), blocks.wplus);
        done += 1;
    }
}

#[test]
fn ds_kahler_structure_is_the_expected_j() {
    let alg = Family::DeSmedtSalamon.algebra(Some(&Q::ratio(1, 2))).unwrap();
    let m = MetricFrame::new(ds_gram(&Q::int(2)), Orientation::Positive).unwrap();
    let omega = lieherm::lie::InvariantForm::new(
        4,
        2,
        vec![Q::zero(), Q::zero(), Q::int(-2), Q::one(), Q::zero(), Q::zero()],
    )
    .unwrap();
    let s = AlmostHermitianStructure::from_metric_and_omega(&alg, &m, &omega)
        .unwrap()
        .structure()
        .expect("compatible");
    // c = 1: J e1 = -2 e4, J e2 = e3
    assert_eq!(s.j().col(0), vec![Q::zero(), Q::zero(), Q::zero(), Q::int(-2)]);
    assert_eq!(s.j().col(1), vec![Q::zero(), Q::zero(), Q::one(), Q::zero()]);
}
