mod common;

use std::sync::Arc;

use common::{dihedral, oracle_nullity, oracle_rank, q};
use gdiff_core::diffops::{
    canonicalize, classical_solutions, compose, delta_a, embed_solutions, equation_of, ingest_classical, ker_mu_basis, mu,
    mu_matrix, ClassicalSystem, DiffOperator, RawOperator,
};
use gdiff_core::fixtures::random_gauge;
use gdiff_core::group::parse_cycles;
use gdiff_core::{ElementId, Equation, Function, HomogeneousSpace, Matrix, ModuleElement, Rational, Scalar, SkewOp};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn random_function(rng: &mut StdRng, n: usize) -> Function<Rational> {
    Function::new((0..n).map(|_| Rational::sample(rng)).collect())
}

fn random_operator(rng: &mut StdRng, e: &Equation<Rational>, f: &Equation<Rational>) -> RawOperator<Rational> {
    let (p, order) = (e.space().size(), e.space().group().order());
    let mut terms = Vec::new();
    for i in 0..e.rank() {
        for j in 0..f.rank() {
            for g in 0..order {
                if rng.gen_bool(0.3) {
                    terms.push((i, j, g, random_function(rng, p)));
                }
            }
        }
    }
    RawOperator::from_terms(e, f, terms).unwrap()
}

fn random_skew(rng: &mut StdRng, hs: &Arc<HomogeneousSpace>) -> SkewOp<Rational> {
    let mut terms: Vec<(ElementId, Function<Rational>)> = Vec::new();
    for g in hs.group().elements() {
        if rng.gen_bool(0.4) {
            terms.push((g, random_function(rng, hs.size())));
        }
    }
    SkewOp::from_terms(hs.clone(), terms)
}

fn equations(rng: &mut StdRng, hs: &Arc<HomogeneousSpace>) -> Vec<Equation<Rational>> {
    let one = Equation::trivial(hs.clone());
    let sign = Equation::sign(hs.clone()).unwrap();
    let sum = one.direct_sum(&sign).unwrap();
    let gauged = random_gauge(&sum, rng).unwrap();
    vec![one, sign, gauged]
}

#[test]
fn sign_weighted_sum_on_three_points() {
    let labels: Vec<String> = ["1", "2", "3"].iter().map(|s| s.to_string()).collect();
    let hs = Arc::new(
        HomogeneousSpace::from_cycle_notation(labels, &[("s".into(), "(1 2 3)".into()), ("t".into(), "(1 2)".into())]).unwrap(),
    );
    let g = hs.group();
    let element = |text: &str| g.find(&parse_cycles(hs.space(), text).unwrap()).unwrap();
    let signed = [("()", 1), ("(1 3 2)", 1), ("(1 2 3)", 1), ("(1 2)", -1), ("(2 3)", -1), ("(1 3)", -1)];
    let one = Equation::<Rational>::trivial(hs.clone());
    let terms: Vec<_> = signed.iter().map(|&(c, s)| (0, 0, element(c), Function::constant(3, q(s)))).collect();
    let theta = RawOperator::from_terms(&one, &one, terms).unwrap();
    assert!(mu(&theta).is_zero_within(0.0));

    // The element lies in the span of the computed kernel basis.
    let kernel = ker_mu_basis(&one, &one).unwrap();
    let mut rows: Vec<Vec<Rational>> = kernel.iter().map(RawOperator::to_vector).collect();
    let rank = oracle_rank(rows.clone());
    rows.push(theta.to_vector());
    assert_eq!(oracle_rank(rows), rank);
    let mu_rows = mu_matrix(&one, &one).unwrap().to_rows();
    assert_eq!(kernel.len(), oracle_nullity(mu_rows, 18));
}

#[test]
fn pentagon_operator_action() {
    let hs = dihedral(5);
    let g = hs.group();
    let s = g.eval_word("s").unwrap();
    let si = g.eval_word("s^-1").unwrap();
    let f = |v: [i64; 5]| Function::new(v.iter().map(|&x| q(x)).collect());
    let a = SkewOp::from_terms(hs.clone(), [(s, f([1, 2, 3, 4, 5])), (0, f([0, -1, 2, 0, 1])), (si, f([3, 3, -2, 1, 1]))]);
    let one = Equation::trivial(hs.clone());
    let delta = delta_a(&one, &a).unwrap();
    assert_eq!(delta.matrix(), &a.action_matrix());
    // Independent evaluation: (Δf)_i = a_i f(s⁻¹x_i) + b_i f_i + c_i f(s x_i).
    let x = f([1, -1, 0, 2, 7]);
    let out = delta.apply(&ModuleElement::new(vec![x.clone()]));
    for y in 0..5 {
        let expect = a.coefficient(s).at(y) * x.at(g.act_inv(s, y)) + a.coefficient(0).at(y) * x.at(y)
            + a.coefficient(si).at(y) * x.at(g.act_inv(si, y));
        assert_eq!(out.coords()[0].at(y), &expect);
    }
}

fn laplacian(hs: &Arc<HomogeneousSpace>) -> ClassicalSystem<Rational> {
    let g = hs.group();
    let n = hs.size();
    let s = g.eval_word("s").unwrap();
    let si = g.eval_word("s^-1").unwrap();
    ClassicalSystem::new(
        hs.clone(),
        1,
        vec![vec![(0, s, Function::one(n)), (0, 0, Function::constant(n, q(-2))), (0, si, Function::one(n))]],
    )
    .unwrap()
}

#[test]
fn periodic_laplacian() {
    let hs = dihedral(6);
    let delta = ingest_classical(&laplacian(&hs)).unwrap();
    let circulant: Vec<Vec<Rational>> = (0..6)
        .map(|i| (0..6).map(|j| if i == j { q(-2) } else if (i + 1) % 6 == j || (j + 1) % 6 == i { q(1) } else { q(0) }).collect())
        .collect();
    let oracle = oracle_nullity(circulant, 6);
    let sols = classical_solutions(&delta);
    assert_eq!(sols.len(), oracle);
    assert_eq!(oracle, 1);
    assert!(sols[0].coords()[0].is_constant(0.0));

    let eq = equation_of(&delta).unwrap();
    let m = delta.matrix();
    assert_eq!(eq.equation.rank(), m.cols() - oracle_rank(m.to_rows()));
    eq.equation.validate().unwrap();
    assert!(eq.precompose.is_valid() && eq.projection.is_valid());

    let report = embed_solutions(&delta).unwrap();
    assert!(report.injective);
    assert_eq!(report.classical_dim, 1);
    assert!(report.classical_dim <= report.hom_dim);
}

#[test]
fn zero_and_identity_operators() {
    let hs = dihedral(4);
    let one = Equation::<Rational>::trivial(hs.clone());
    let zero = DiffOperator::zero(&one, &one).unwrap();
    let report = embed_solutions(&zero).unwrap();
    assert_eq!(report.classical_dim, 4);
    assert!(report.injective);
    let id = DiffOperator::identity(&one).unwrap();
    let report = embed_solutions(&id).unwrap();
    assert_eq!((report.classical_dim, report.hom_dim), (0, 0));
    // An empty system constrains nothing.
    let empty = ingest_classical(&ClassicalSystem::<Rational>::new(hs.clone(), 2, vec![]).unwrap()).unwrap();
    assert_eq!(classical_solutions(&empty).len(), 8);
}

#[test]
fn random_first_order_system_matches_dense_solve() {
    let hs = dihedral(4);
    let g = hs.group();
    let s = g.eval_word("s").unwrap();
    let mut rng = StdRng::seed_from_u64(11);
    for _ in 0..5 {
        let sys = ClassicalSystem::new(
            hs.clone(),
            2,
            (0..2)
                .map(|_| (0..2).flat_map(|k| [(k, 0, random_function(&mut rng, 4)), (k, s, random_function(&mut rng, 4))]).collect())
                .collect(),
        )
        .unwrap();
        // Flattened system: row (j, y), column (k, z).
        let mut rows = vec![vec![q(0); 8]; 8];
        for (j, eq) in sys.equations().iter().enumerate() {
            for (k, h, c) in eq {
                for y in 0..4 {
                    rows[j * 4 + y][k * 4 + g.act_inv(*h, y)] += c.at(y).clone();
                }
            }
        }
        let delta = ingest_classical(&sys).unwrap();
        assert_eq!(delta.matrix(), &Matrix::from_rows(rows.clone()));
        assert_eq!(classical_solutions(&delta).len(), oracle_nullity(rows, 8));
        for (j, eq) in sys.equations().iter().enumerate() {
            for (k, h, c) in eq {
                assert_eq!(delta.representative().coefficient(*k, j, *h), c);
            }
        }
    }
}

#[test]
fn composition_is_matrix_product_and_associative() {
    let hs = dihedral(3);
    let mut rng = StdRng::seed_from_u64(12);
    let eqs = equations(&mut rng, &hs);
    for _ in 0..10 {
        let pick = |rng: &mut StdRng| eqs[rng.gen_range(0..eqs.len())].clone();
        let (e1, e2, e3, e4) = (pick(&mut rng), pick(&mut rng), pick(&mut rng), pick(&mut rng));
        let d1 = canonicalize(random_operator(&mut rng, &e1, &e2));
        let d2 = canonicalize(random_operator(&mut rng, &e2, &e3));
        let d3 = canonicalize(random_operator(&mut rng, &e3, &e4));
        let c21 = compose(&d2, &d1).unwrap();
        assert_eq!(c21.matrix(), &(d2.matrix() * d1.matrix()));
        let left = compose(&d3, &c21).unwrap();
        let right = compose(&compose(&d3, &d2).unwrap(), &d1).unwrap();
        assert_eq!(left, right);
    }
}

#[test]
fn left_multiplication_is_composition_with_delta_a() {
    let hs = dihedral(3);
    let mut rng = StdRng::seed_from_u64(13);
    let eqs = equations(&mut rng, &hs);
    let one = Equation::trivial(hs.clone());
    for k in 0..6 {
        let e = &eqs[k % eqs.len()];
        let delta = canonicalize(random_operator(&mut rng, e, &one));
        let a = random_skew(&mut rng, &hs);
        let left = delta.left_mul(&a).unwrap();
        assert_eq!(left, compose(&delta_a(&one, &a).unwrap(), &delta).unwrap());
        assert_eq!(left.matrix(), &(&a.action_matrix() * delta.matrix()));
    }
}

#[test]
fn action_map_is_equivariant() {
    let hs = dihedral(4);
    let mut rng = StdRng::seed_from_u64(14);
    let eqs = equations(&mut rng, &hs);
    for e in &eqs {
        for f in &eqs {
            let delta = canonicalize(random_operator(&mut rng, e, f));
            let v = ModuleElement::new((0..e.rank()).map(|_| random_function(&mut rng, 4)).collect());
            for g in hs.group().elements() {
                let moved = delta.left_mul(&SkewOp::element(hs.clone(), g)).unwrap();
                assert_eq!(moved.apply(&v), f.act(g, &delta.apply(&v)));
            }
        }
    }
}

#[test]
fn kernel_elements_do_not_change_the_operator() {
    let hs = dihedral(3);
    let mut rng = StdRng::seed_from_u64(15);
    let eqs = equations(&mut rng, &hs);
    let (e, f) = (&eqs[2], &eqs[1]);
    let theta = random_operator(&mut rng, e, f);
    for k in ker_mu_basis(e, f).unwrap().iter().take(5) {
        assert_eq!(canonicalize(theta.add(k).unwrap()), canonicalize(theta.clone()));
    }
}
