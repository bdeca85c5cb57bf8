//! Acceptance criteria 1–10, one pass/fail line each.
//!
//! Tolerances: exact checks compare rationals with `==`; the complex checks
//! use `EPS` both as the entrywise bound and as the rank threshold.

use std::sync::Arc;

use gdiff_core::diffops::{
    canonicalize, classical_solutions, compose, compose_raw, delta_a, embed_solutions, ingest_classical, ker_mu_basis, mu,
    ClassicalSystem, RawOperator,
};
use gdiff_core::equivalence::{builtin_irreps, explicit_roundtrip, grothendieck_check, induce, roundtrip_iso, transversal_independence};
use gdiff_core::fixtures::{random_gauge, random_induced2, random_module2, symplectic_equation};
use gdiff_core::invariants::{conserved_quantity_check, invariant_vectors, self_dual_check, PowerKind};
use gdiff_core::projection::{builtin_character, factoring_dimensions, frobenius_projection};
use gdiff_core::solver::{hom_space, is_isomorphism, SearchConfig};
use gdiff_core::{
    group::parse_cycles, Complex64, Equation, Error, Function, HomogeneousSpace, Matrix, ModuleElement, Rational, Scalar, SkewOp,
};
use nalgebra::DMatrix;
use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EPS: f64 = 1e-9;

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: Error) -> String {
    format!("{}: {e}", e.kind())
}

fn q(n: i64) -> Rational {
    Rational::from_i64(n)
}

fn dihedral(n: usize) -> Arc<HomogeneousSpace> {
    Arc::new(HomogeneousSpace::dihedral(n).unwrap())
}

/// Gauss–Jordan rank over the rationals.
fn oracle_rank(mut rows: Vec<Vec<Rational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else { continue };
        rows.swap(rank, p);
        let pivot_row = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[c].is_zero() {
                let f = row[c].clone() / pivot_row[c].clone();
                for (x, p) in row[c..].iter_mut().zip(&pivot_row[c..]) {
                    *x -= p.clone() * f.clone();
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Linear constraints `E^h(x₀) M = M F^h(x₀)` on `M`, one row per entry.
fn fiber_hom_rows<S: Scalar>(e: &Equation<S>, f: &Equation<S>) -> Vec<Vec<S>> {
    let (n, m) = (e.rank(), f.rank());
    let base = e.space().base_point();
    let mut rows = Vec::new();
    for &h in e.space().stabilizer().elements() {
        let (a, b) = (e.at(h, base), f.at(h, base));
        for i in 0..n {
            for k in 0..m {
                let mut row = vec![S::zero(); n * m];
                for l in 0..m {
                    row[i * m + l] = row[i * m + l].clone() + b[(l, k)].clone();
                }
                for j in 0..n {
                    row[j * m + k] = row[j * m + k].clone() - a[(i, j)].clone();
                }
                rows.push(row);
            }
        }
    }
    rows
}

/// Numerical rank from singular values, threshold `EPS` relative to the largest.
fn svd_rank(rows: &[Vec<Complex64>], cols: usize) -> usize {
    if rows.is_empty() || cols == 0 {
        return 0;
    }
    let m = DMatrix::from_fn(rows.len(), cols, |r, c| rows[r][c]);
    let sv = m.svd(false, false).singular_values;
    let top = sv.max();
    sv.iter().filter(|&&s| s > EPS * top.max(1.0)).count()
}

fn exact_cocycle(e: &Equation<Rational>) -> Result<(), String> {
    let space = e.space();
    let g = space.group();
    for a in g.elements() {
        for b in g.elements() {
            for y in 0..space.size() {
                let rhs = e.at(b, g.act_inv(a, y)) * e.at(a, y);
                ensure(e.at(g.mul(a, b), y) == &rhs, || format!("cocycle fails for ({a}, {b}) at {y}"))?;
            }
        }
        for y in 0..space.size() {
            let inv = e.at(a, y).inverse(0.0).ok_or("singular connection matrix")?;
            ensure(&inv == e.at(g.inv(a), g.act_inv(a, y)), || format!("inverse formula fails for {a} at {y}"))?;
        }
    }
    Ok(())
}

fn criterion1() -> Check {
    let hs = dihedral(3);
    let g = hs.group();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let one = Equation::<Rational>::trivial(hs.clone());
    let sign = Equation::sign(hs.clone()).map_err(err)?;
    let random = random_gauge(&one.direct_sum(&sign).map_err(err)?, &mut rng).map_err(err)?;
    let mut built = 0;
    for e in [&one, &sign, &random] {
        let gens = g.generator_ids().into_iter().map(|s| (s, (0..3).map(|y| e.at(s, y).clone()).collect())).collect();
        let rebuilt = Equation::complete_connection(hs.clone(), e.rank(), gens).map_err(err)?;
        ensure(&rebuilt == e, || "complete_connection does not reproduce the fixture".into())?;
        exact_cocycle(&rebuilt)?;
        built += 1;
    }
    let s = g.eval_word("s").map_err(err)?;
    let t = g.eval_word("t").map_err(err)?;
    let corrupted = Equation::from_constant_generators(hs.clone(), 1, vec![(s, Matrix::scalar(q(1))), (t, Matrix::scalar(q(2)))]);
    ensure(matches!(corrupted, Err(Error::InconsistentConnection(_))), || format!("t -> 2 not rejected: {corrupted:?}"))?;
    Ok(format!("{built} fixtures exact over {} x {} pairs; t -> 2 rejected", g.order(), g.order()))
}

fn c2_fixtures<S: Scalar>(n: usize) -> Result<Vec<Equation<S>>, String> {
    let hs = dihedral(n);
    let mut rng = ChaCha8Rng::seed_from_u64(20 + n as u64);
    let one = Equation::<S>::trivial(hs.clone());
    let sign = Equation::sign(hs.clone()).map_err(err)?;
    let sum = one.direct_sum(&sign).map_err(err)?;
    let induced = random_induced2(&hs, &mut rng).map_err(err)?;
    Ok(vec![one, sign, sum, induced])
}

fn criterion2() -> Check {
    let mut pairs = 0;
    for n in [3, 4] {
        let exact = c2_fixtures::<Rational>(n)?;
        for e in &exact {
            for f in &exact {
                let dim = hom_space(e, f).map_err(err)?.dim();
                let oracle = e.rank() * f.rank() - oracle_rank(fiber_hom_rows(e, f));
                ensure(dim == oracle, || format!("rational n={n}: hom dim {dim}, oracle {oracle}"))?;
                pairs += 1;
            }
        }
        let complex = c2_fixtures::<Complex64>(n)?;
        for e in &complex {
            for f in &complex {
                let dim = hom_space(e, f).map_err(err)?.dim();
                let cols = e.rank() * f.rank();
                let oracle = cols - svd_rank(&fiber_hom_rows(e, f), cols);
                ensure(dim == oracle, || format!("complex n={n}: hom dim {dim}, oracle {oracle}"))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs agree with the fiber oracle (rational exact, complex SVD at {EPS:e})"))
}

fn criterion3() -> Check {
    let mut fixtures = Vec::new();
    for n in [3, 4] {
        let hs = dihedral(n);
        let mut rng = ChaCha8Rng::seed_from_u64(30 + n as u64);
        let one = Equation::<Rational>::trivial(hs.clone());
        let sign = Equation::sign(hs.clone()).map_err(err)?;
        let sum = one.direct_sum(&sign).map_err(err)?;
        let gauged = random_gauge(&sum, &mut rng).map_err(err)?;
        let induced = random_induced2(&hs, &mut rng).map_err(err)?;
        fixtures.extend([one, sign, sum, gauged, induced]);
    }
    fixtures.push(symplectic_equation().map_err(err)?);
    for (i, e) in fixtures.iter().enumerate() {
        let found = roundtrip_iso(e, SearchConfig::default()).map_err(err)?;
        let explicit = explicit_roundtrip(e).map_err(err)?;
        for phi in [&found, &explicit] {
            ensure(phi.verify().is_ok() && is_isomorphism(phi), || format!("fixture {i}: round trip is not a verified iso"))?;
        }
    }
    let mut transversals = 0;
    for n in [3, 4] {
        let hs = dihedral(n);
        let mut rng = ChaCha8Rng::seed_from_u64(40 + n as u64);
        let (sigma, sigma2) = (hs.transversal().clone(), hs.alternate_transversal());
        ensure(sigma.as_slice() != sigma2.as_slice(), || "transversals coincide".into())?;
        let v = random_module2::<Rational, _>(&hs, &mut rng).map_err(err)?;
        let phi = transversal_independence(&v, &sigma, &sigma2).map_err(err)?;
        ensure(phi.verify().is_ok() && is_isomorphism(&phi), || format!("n={n}: transversal change is not an iso"))?;
        transversals += 1;
    }
    Ok(format!("{} round trips and {transversals} transversal changes verified", fixtures.len()))
}

fn criterion4() -> Check {
    let hs = dihedral(3);
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut modules: Vec<_> = builtin_irreps::<Rational>(&hs).map_err(err)?.into_iter().map(|(_, v)| v).collect();
    ensure(modules.len() == 2, || "expected two Z2 irreducibles".into())?;
    modules.push(random_module2(&hs, &mut rng).map_err(err)?);
    let mut isos = 0;
    for u in &modules {
        for v in &modules {
            for check in grothendieck_check(u, v, SearchConfig::default()).map_err(err)? {
                let phi = check.iso.map_err(|e| format!("{}: {}", check.name, err(e)))?;
                ensure(phi.verify().is_ok() && is_isomorphism(&phi), || format!("{} iso does not verify", check.name))?;
                isos += 1;
            }
        }
    }
    Ok(format!("{isos} isomorphisms exhibited and verified"))
}

fn max_defect(a: &[Matrix<Complex64>], b: &[Matrix<Complex64>]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
}

fn criterion5() -> Check {
    let mut worst = 0.0f64;
    for n in [3, 4, 6] {
        let hs = dihedral(n);
        let irreps: Vec<_> = builtin_irreps::<Complex64>(&hs).map_err(err)?.into_iter().map(|(_, v)| v).collect();
        let host = induce(&irreps[0].direct_sum(&irreps[1])).map_err(err)?;
        let pt = frobenius_projection(&host, &builtin_character(&hs, "trivial").map_err(err)?).map_err(err)?;
        let ps = frobenius_projection(&host, &builtin_character(&hs, "sign").map_err(err)?).map_err(err)?;
        let (a, b) = (pt.matrices(), ps.matrices());
        let sq = |m: &[Matrix<Complex64>]| m.iter().map(|x| x * x).collect::<Vec<_>>();
        let prod = |x: &[Matrix<Complex64>], y: &[Matrix<Complex64>]| x.iter().zip(y).map(|(p, r)| p * r).collect::<Vec<_>>();
        let zero: Vec<_> = a.iter().map(|m| Matrix::zeros(m.rows(), m.cols())).collect();
        let id: Vec<_> = a.iter().map(|m| Matrix::identity(m.rows())).collect();
        let sum: Vec<_> = a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect();
        let defects = [
            max_defect(&sq(a), a),
            max_defect(&sq(b), b),
            max_defect(&prod(a, b), &zero),
            max_defect(&prod(b, a), &zero),
            max_defect(&sum, &id),
        ];
        let d = defects.iter().copied().fold(0.0, f64::max);
        ensure(d <= EPS, || format!("n={n}: projection defect {d:e}"))?;
        worst = worst.max(d);
        for simple in irreps.iter().map(induce) {
            let (direct, via) = factoring_dimensions(&host, &simple.map_err(err)?).map_err(err)?;
            ensure(direct == via, || format!("n={n}: factoring {direct} != {via}"))?;
        }
    }
    Ok(format!("n in {{3, 4, 6}}: max defect {worst:.1e} <= {EPS:e}, factoring dimensions equal"))
}

fn criterion6() -> Check {
    let labels: Vec<String> = ["1", "2", "3"].iter().map(|s| s.to_string()).collect();
    let hs = Arc::new(
        HomogeneousSpace::from_cycle_notation(labels, &[("s".into(), "(1 2 3)".into()), ("t".into(), "(1 2)".into())]).map_err(err)?,
    );
    let g = hs.group();
    let signed = [("()", 1), ("(1 3 2)", 1), ("(1 2 3)", 1), ("(1 2)", -1), ("(2 3)", -1), ("(1 3)", -1)];
    let one = Equation::<Rational>::trivial(hs.clone());
    let mut terms = Vec::new();
    for (cycles, s) in signed {
        let el = g.find(&parse_cycles(hs.space(), cycles).map_err(err)?).ok_or("element not in group")?;
        terms.push((0, 0, el, Function::constant(3, q(s))));
    }
    let theta = RawOperator::from_terms(&one, &one, terms).map_err(err)?;
    ensure(mu(&theta).entries().iter().all(Zero::is_zero), || "mu is not zero".into())?;
    let kernel = ker_mu_basis(&one, &one).map_err(err)?;
    let mut rows: Vec<Vec<Rational>> = kernel.iter().map(RawOperator::to_vector).collect();
    let rank = oracle_rank(rows.clone());
    rows.push(theta.to_vector());
    ensure(oracle_rank(rows) == rank, || "element is outside the span of ker_mu_basis".into())?;
    Ok(format!("mu = 0 exactly; element lies in the {}-dimensional kernel", kernel.len()))
}

fn criterion7() -> Check {
    let hs = dihedral(6);
    let g = hs.group();
    let s = g.eval_word("s").map_err(err)?;
    let si = g.eval_word("s^-1").map_err(err)?;
    let sys = ClassicalSystem::new(
        hs.clone(),
        1,
        vec![vec![(0, s, Function::one(6)), (0, 0, Function::constant(6, q(-2))), (0, si, Function::one(6))]],
    )
    .map_err(err)?;
    let delta = ingest_classical(&sys).map_err(err)?;
    let circulant: Vec<Vec<Rational>> = (0..6)
        .map(|i| (0..6).map(|j| if i == j { q(-2) } else if (i + 1) % 6 == j || (j + 1) % 6 == i { q(1) } else { q(0) }).collect())
        .collect();
    let oracle = 6 - oracle_rank(circulant);
    let sols = classical_solutions(&delta);
    ensure(sols.len() == 1 && oracle == 1, || format!("dim C = {}, oracle {oracle}", sols.len()))?;
    ensure(sols[0].coords()[0].is_constant(0.0), || "solution is not constant".into())?;
    let report = embed_solutions(&delta).map_err(err)?;
    ensure(report.injective && report.classical_dim <= report.hom_dim, || format!("{report:?}"))?;
    Ok(format!("dim C = 1 = oracle, dim Hom(E_Δ, 𝟙) = {}, injective", report.hom_dim))
}

fn random_function(rng: &mut ChaCha8Rng, n: usize) -> Function<Rational> {
    Function::new((0..n).map(|_| Rational::sample(rng)).collect())
}

fn random_operator(rng: &mut ChaCha8Rng, e: &Equation<Rational>, f: &Equation<Rational>) -> Result<RawOperator<Rational>, String> {
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
    RawOperator::from_terms(e, f, terms).map_err(err)
}

fn criterion8() -> Check {
    let hs = dihedral(3);
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let one = Equation::<Rational>::trivial(hs.clone());
    let sign = Equation::sign(hs.clone()).map_err(err)?;
    let gauged = random_gauge(&one.direct_sum(&sign).map_err(err)?, &mut rng).map_err(err)?;
    let eqs = [one.clone(), sign, gauged];
    for k in 0..20 {
        let (e1, e2, e3) = (&eqs[k % 3], &eqs[(k / 3) % 3], &eqs[(k / 9 + k) % 3]);
        let t1 = random_operator(&mut rng, e1, e2)?;
        let t2 = random_operator(&mut rng, e2, e3)?;
        let tensor = mu(&compose_raw(&t2, &t1).map_err(err)?);
        let product = &canonicalize(t2).matrix().clone() * canonicalize(t1).matrix();
        ensure(tensor == product, || format!("pair {k}: tensor composition differs from the matrix product"))?;
    }
    for k in 0..10 {
        let delta = canonicalize(random_operator(&mut rng, &eqs[k % 3], &one)?);
        let mut terms = Vec::new();
        for g in hs.group().elements() {
            if rng.gen_bool(0.5) {
                terms.push((g, random_function(&mut rng, 3)));
            }
        }
        let a = SkewOp::from_terms(hs.clone(), terms);
        let left = delta.left_mul(&a).map_err(err)?;
        let via = compose(&delta_a(&one, &a).map_err(err)?, &delta).map_err(err)?;
        ensure(left.matrix() == via.matrix(), || format!("case {k}: a·Δ differs from Δ_a ∘ Δ"))?;
    }
    Ok("20 compositions and 10 left multiplications exact".into())
}

fn criterion9() -> Check {
    let hs = dihedral(3);
    let one = Equation::<Rational>::trivial(hs.clone());
    let sign = Equation::sign(hs.clone()).map_err(err)?;
    let sympl = symplectic_equation().map_err(err)?;
    for (name, e) in [("one", &one), ("sign", &sign), ("symplectic", &sympl)] {
        let sd = self_dual_check(e, SearchConfig::default()).map_err(err)?.ok_or_else(|| format!("{name}: no self-duality"))?;
        ensure(sd.iso.verify().is_ok() && is_isomorphism(&sd.iso), || format!("{name}: E -> E* does not verify"))?;
    }

    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let e = random_gauge(&one.direct_sum(&sign).map_err(err)?, &mut rng).map_err(err)?;
    let host = e.sym2().map_err(err)?;
    let alphas = invariant_vectors(&host).map_err(err)?;
    let sols = hom_space(&e, &one).map_err(err)?;
    let phi = sols.morphisms().first().ok_or("no solution to push forward along")?;
    for alpha in &alphas {
        let r = conserved_quantity_check(PowerKind::Sym2, alpha, phi).map_err(err)?;
        ensure(r.passed() && r.constant == Some(true), || "conserved quantity check failed".into())?;
    }
    let mut coords = alphas[0].coords().to_vec();
    let mut values = coords[0].values().to_vec();
    values[1] += Rational::one();
    coords[0] = Function::new(values);
    let control = conserved_quantity_check(PowerKind::Sym2, &ModuleElement::new(coords), phi);
    ensure(matches!(control, Err(Error::NotInvariant(_))), || "perturbed control was not rejected".into())?;
    Ok(format!("three self-dualities verified; {} sym2 invariants conserved; control rejected", alphas.len()))
}

fn corpus_reports() -> Result<String, String> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/problems");
    let mut paths: Vec<_> = std::fs::read_dir(dir).map_err(|e| e.to_string())?.map(|e| e.unwrap().path()).collect();
    paths.sort();
    let mut out = String::new();
    for path in paths {
        let file = gdiff_cli::read(path.to_str().unwrap()).map_err(|e| e.to_string())?;
        let report = gdiff_cli::run(&file, &gdiff_cli::Options::default()).map_err(|e| e.to_string())?;
        out += &gdiff_cli::render_structured(&report);
    }
    Ok(out)
}

fn criterion10() -> Check {
    let (a, b) = (corpus_reports()?, corpus_reports()?);
    ensure(a == b, || "reports differ between runs".into())?;
    Ok(format!("two corpus runs byte-identical ({} bytes)", a.len()))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("cocycle suite", criterion1),
        ("solution-space oracle", criterion2),
        ("equivalence round trip", criterion3),
        ("Grothendieck structure preservation", criterion4),
        ("Schur/projection suite", criterion5),
        ("trivial-operator example", criterion6),
        ("classical pipeline", criterion7),
        ("operator calculus", criterion8),
        ("invariants", criterion9),
        ("determinism", criterion10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        match check() {
            Ok(detail) => println!("criterion {:>2} pass  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{}/{} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
