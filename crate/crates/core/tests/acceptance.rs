//! Acceptance gate: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use oak_core::characters::{
    char_module_in, classify_flags, convolve, factorized_verma_char, finite_sp_char, generalized_verma_char,
    one_dim_char, simple_sp_char_one_dim, verify_generalized_verma_factorization, verify_verma_factorization, verma_char, Algebra, CharTable,
};
use oak_core::lie::RootKind;
use oak_core::morphisms::{
    phi_map, theta_generator, verify_lie_hom, verify_theta_conjugation, HomMap, TwistSpec,
};
use oak_core::parse::parse_scalar;
use oak_core::uea::{act_on_verma, normal_order, normal_order_by, normal_order_with, Strategy, UEAElement, VermaVector};
use oak_core::weyl::{apply, straighten_all, LaurentVector, ModuleDescriptor, WeylElement};
use oak_core::{BasisElement, LieElement, Scalar, SymplecticOscillator, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Check {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Debug>(e: E) -> String {
    format!("{e:?}")
}

/// Element of g_n as (matrix, vector, central coefficient).
#[derive(Clone, PartialEq, Debug)]
struct Realized {
    m: Vec<Vec<Scalar>>,
    v: Vec<Scalar>,
    c: Scalar,
}

impl Realized {
    fn zero(n: usize) -> Self {
        Realized {
            m: vec![vec![Scalar::zero(); 2 * n]; 2 * n],
            v: vec![Scalar::zero(); 2 * n],
            c: Scalar::zero(),
        }
    }

    fn axpy(&mut self, k: &Scalar, o: &Realized) {
        for (r, ro) in self.m.iter_mut().zip(&o.m) {
            for (x, y) in r.iter_mut().zip(ro) {
                *x = &*x + &(k * y);
            }
        }
        for (x, y) in self.v.iter_mut().zip(&o.v) {
            *x = &*x + &(k * y);
        }
        self.c = &self.c + &(k * &o.c);
    }

    fn of_basis(e: &BasisElement, n: usize) -> Self {
        let mut r = Realized::zero(n);
        let mut entries: Vec<(usize, usize, i64)> = Vec::new();
        match e {
            BasisElement::Central => r.c = Scalar::one(),
            BasisElement::Cartan(i) => entries = vec![(*i, *i, 1), (n + i, n + i, -1)],
            BasisElement::RootVector(root) => match root.kind().expect("root") {
                RootKind::Short(i) => r.v[i] = Scalar::one(),
                RootKind::NegShort(i) => r.v[n + i] = Scalar::one(),
                RootKind::Sum(i, j) => entries = vec![(i, n + j, 1), (j, n + i, 1)],
                RootKind::NegSum(i, j) => entries = vec![(n + i, j, 1), (n + j, i, 1)],
                RootKind::Difference(i, j) => entries = vec![(i, j, 1), (n + j, n + i, -1)],
            },
        }
        for (i, j, x) in entries {
            r.m[i][j] = &r.m[i][j] + &Scalar::from_int(x);
        }
        r
    }

    fn of_element(x: &LieElement) -> Self {
        let n = x.rank();
        let mut r = Realized::zero(n);
        for (e, c) in x.terms() {
            r.axpy(c, &Realized::of_basis(e, n));
        }
        r
    }

    fn bracket(&self, o: &Realized) -> Realized {
        let d = self.v.len();
        let n = d / 2;
        let mut r = Realized::zero(n);
        for i in 0..d {
            for j in 0..d {
                let mut s = Scalar::zero();
                for k in 0..d {
                    s = &s + &(&(&self.m[i][k] * &o.m[k][j]) - &(&o.m[i][k] * &self.m[k][j]));
                }
                r.m[i][j] = s;
            }
            let mut s = Scalar::zero();
            for k in 0..d {
                s = &s + &(&(&self.m[i][k] * &o.v[k]) - &(&o.m[i][k] * &self.v[k]));
            }
            r.v[i] = s;
        }
        let mut w = Scalar::zero();
        for i in 0..n {
            w = &w + &(&(&self.v[i] * &o.v[n + i]) - &(&self.v[n + i] * &o.v[i]));
        }
        r.c = w;
        r
    }
}

fn criterion_1() -> Check {
    for n in 1..=3 {
        let alg = SymplecticOscillator::rank(n).map_err(err)?;
        let basis = alg.basis().to_vec();
        let d = basis.len();
        let elems: Vec<LieElement> = basis.iter().map(|e| LieElement::basis(n, e.clone()).unwrap()).collect();
        let mut table = vec![vec![LieElement::zero(n); d]; d];
        for i in 0..d {
            for j in 0..d {
                table[i][j] = elems[i].bracket(&elems[j]).map_err(err)?;
            }
        }
        for i in 0..d {
            for j in 0..d {
                ensure(table[i][j].add(&table[j][i]).is_zero(), || {
                    format!("n={n}: [{}, {}] not antisymmetric", basis[i], basis[j])
                })?;
                let oracle = Realized::of_basis(&basis[i], n).bracket(&Realized::of_basis(&basis[j], n));
                ensure(Realized::of_element(&table[i][j]) == oracle, || {
                    format!("n={n}: [{}, {}] = {} disagrees with the matrix realization", basis[i], basis[j], table[i][j])
                })?;
            }
        }
        let apply_left = |x: &LieElement, k: usize| {
            let mut out = LieElement::zero(n);
            for (e, c) in x.terms() {
                let idx = alg.index_of(e).unwrap() as usize;
                out = out.add(&table[idx][k].scale(c));
            }
            out
        };
        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let s = apply_left(&table[i][j], k)
                        .add(&apply_left(&table[j][k], i))
                        .add(&apply_left(&table[k][i], j));
                    ensure(s.is_zero(), || format!("n={n}: Jacobi fails on {}, {}, {}", basis[i], basis[j], basis[k]))?;
                }
            }
        }
    }
    Ok(())
}

fn random_uea(rng: &mut ChaCha8Rng, n: usize, max_deg: usize) -> UEAElement {
    let alg = SymplecticOscillator::rank(n).unwrap();
    let basis = alg.basis();
    let mut u = UEAElement::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(0..=max_deg);
        let word: Vec<BasisElement> = (0..len).map(|_| basis[rng.gen_range(0..basis.len())].clone()).collect();
        let c = Scalar::from_int(rng.gen_range(1..=3) * if rng.gen_bool(0.5) { 1 } else { -1 });
        u = u.add(&normal_order(&word, n).unwrap().scale(&c));
    }
    u
}

fn criterion_2() -> Check {
    for n in 1..=3 {
        let r = verify_lie_hom(HomMap::F, n).map_err(err)?;
        ensure(r.ok(), || format!("n={n}: {} violations, first {:?}", r.violations.len(), r.violations.first()))?;
        if n == 3 {
            ensure(r.pairs_checked == 406, || format!("n=3 checked {} pairs", r.pairs_checked))?;
        }
    }
    let n = 2;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for k in 0..200 {
        let u = random_uea(&mut rng, n, 3);
        let v = random_uea(&mut rng, n, 3);
        let lhs = phi_map(&u.multiply(&v).map_err(err)?, n).map_err(err)?;
        let rhs = phi_map(&u, n).map_err(err)?.multiply(&phi_map(&v, n).map_err(err)?).map_err(err)?;
        ensure(lhs == rhs, || format!("pair {k}: phi(uv) != phi(u)phi(v) for u = {u}, v = {v}"))?;
    }
    Ok(())
}

fn random_rational(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::ratio(rng.gen_range(-20..=20), rng.gen_range(1..=7))
}

fn criterion_3() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for (n, depth) in [(1usize, 10i64), (2, 6)] {
        for _ in 0..5 {
            let lambda = Weight::new((0..n).map(|_| random_rational(&mut rng)).collect(), Scalar::s().pow(2));
            let r = verify_verma_factorization(&lambda, depth).map_err(err)?;
            ensure(r.ok(), || format!("n={n}, λ={lambda}: {:?}", r.mismatch))?;
            if n == 1 {
                let lhs = verma_char(&lambda, Algebra::G, depth).map_err(err)?;
                let rhs = factorized_verma_char(&lambda, depth).map_err(err)?;
                for k in 0..=depth {
                    let want = (k / 2 + 1) as u64;
                    ensure(lhs.mult(&[-k]) == want && rhs.mult(&[-k]) == want, || {
                        format!("λ={lambda}, k={k}: {} and {} instead of {want}", lhs.mult(&[-k]), rhs.mult(&[-k]))
                    })?;
                }
            }
        }
    }
    Ok(())
}

fn gen(n: usize, kind: RootKind) -> UEAElement {
    UEAElement::generator(n, &BasisElement::root(kind, n)).unwrap()
}

fn criterion_4() -> Check {
    for n in 1..=3 {
        for z in [Scalar::s().pow(2), Scalar::zero()] {
            let lambda = Weight::new((1..=n).map(|i| Scalar::symbol(&format!("l{i}"))).collect(), z.clone());
            let v = VermaVector::highest(lambda.clone()).map_err(err)?;
            for j in 0..n {
                for k in 0..n {
                    let u = gen(n, RootKind::Short(j)).multiply(&gen(n, RootKind::NegShort(k))).map_err(err)?;
                    let got = act_on_verma(&u, &v).map_err(err)?;
                    let want = if j == k { v.scale(&z) } else { VermaVector::zero(lambda.clone()) };
                    ensure(got == want, || format!("n={n}, ż={z}: X[e{}]X[-e{}]v = {got}", j + 1, k + 1))?;
                    if z.is_zero() {
                        ensure(got.is_zero(), || format!("n={n}: nonzero at ż = 0"))?;
                    }
                }
            }
            for i in 0..n {
                for j in i + 1..n {
                    for k in 0..n {
                        let u = gen(n, RootKind::Difference(i, j)).multiply(&gen(n, RootKind::NegShort(k))).map_err(err)?;
                        let got = act_on_verma(&u, &v).map_err(err)?;
                        let want = if i == k {
                            act_on_verma(&gen(n, RootKind::NegShort(j)), &v).map_err(err)?.scale(&Scalar::from_int(-1))
                        } else {
                            VermaVector::zero(lambda.clone())
                        };
                        ensure(got == want, || {
                            format!("n={n}: X[e{}-e{}]X[-e{}]v = {got}, expected {want}", i + 1, j + 1, k + 1)
                        })?;
                    }
                }
            }
        }
    }
    Ok(())
}

fn criterion_5() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for case in 0..100 {
        let n = rng.gen_range(1..=2);
        let k = rng.gen_range(1..=3);
        let module = ModuleDescriptor::ShaleWeil(n);
        let zero = vec![Scalar::zero(); n];
        let w: Vec<LaurentVector> = loop {
            let w: Vec<LaurentVector> = (0..k)
                .map(|_| {
                    let terms: Vec<(Vec<i64>, Scalar)> = (0..rng.gen_range(0..=3))
                        .map(|_| {
                            let m: Vec<i64> = (0..n).map(|_| rng.gen_range(-4..=-1)).collect();
                            (m, Scalar::from_int(rng.gen_range(-5..=5)))
                        })
                        .collect();
                    LaurentVector::from_terms(zero.clone(), terms).unwrap()
                })
                .collect();
            if w.iter().any(|c| !c.is_zero()) {
                break w;
            }
        };
        let out = straighten_all(&w, &module).map_err(err)?;
        for i in 0..n {
            let t = WeylElement::t(n, i);
            for c in &out {
                let r = apply(&t, c, &module).map_err(err)?;
                ensure(r.is_zero(), || format!("case {case}: t{} does not kill {c}", i + 1))?;
            }
        }
    }
    Ok(())
}

fn criterion_6() -> Check {
    let mut specs: Vec<(usize, TwistSpec)> = Vec::new();
    for b in 0..=3 {
        let bs = Scalar::from_int(b);
        specs.push((1, TwistSpec::new(vec![0], vec![bs.clone()]).unwrap()));
        specs.push((2, TwistSpec::new(vec![0], vec![bs.clone()]).unwrap()));
        specs.push((2, TwistSpec::new(vec![1], vec![bs.clone()]).unwrap()));
        specs.push((2, TwistSpec::new(vec![0, 1], vec![bs.clone(), Scalar::from_int(3 - b)]).unwrap()));
    }
    for (n, spec) in &specs {
        let a: Vec<Scalar> = (1..=*n).map(|i| Scalar::symbol(&format!("a{i}"))).collect();
        let r = verify_theta_conjugation(spec, &a, 4).map_err(err)?;
        ensure(r.ok(), || format!("n={n}, I={:?}, b={:?}: {:?}", r.indices, r.b, r.mismatches.first()))?;
    }
    let a = Scalar::symbol("a1");
    let spec = TwistSpec::new(vec![0], vec![Scalar::one()]).unwrap();
    let op = theta_generator(&BasisElement::root(RootKind::Sum(0, 0), 1), &spec, 1).map_err(err)?;
    let module = ModuleDescriptor::FullLaurent(vec![a.clone()]);
    let got = op.apply(&LaurentVector::basis(vec![a.clone()], vec![0]).unwrap(), &module).map_err(err)?;
    let coeff = parse_scalar("(a1+3)*(a1+4)/((a1+1)*(a1+2))", None).map_err(err)?;
    let want = LaurentVector::from_terms(vec![a], [(vec![2], coeff)]).unwrap();
    ensure(got == want, || format!("closed form: got {got}"))
}

fn criterion_7() -> Check {
    for n in 1..=2 {
        for c in [Scalar::zero(), Scalar::from_int(2), Scalar::ratio(-1, 3), Scalar::symbol("c")] {
            let r = verify_generalized_verma_factorization(&c, n, Scalar::s().pow(2), 5).map_err(err)?;
            ensure(r.ok(), || format!("n={n}, c={c}: {:?}", r.mismatch))?;
        }
    }
    Ok(())
}

fn set(xs: impl IntoIterator<Item = usize>) -> BTreeSet<usize> {
    xs.into_iter().collect()
}

/// `N ⊗ M` on the box `|ν_i| ≤ 2D`, building `M` on a box widened by the
/// extent of `N`.
fn tensor_with_module(nchar: &CharTable, module: &ModuleDescriptor, d: i64) -> Result<CharTable, String> {
    let n = module.rank();
    let r = nchar.lo().iter().chain(nchar.hi()).map(|x| x.abs()).max().unwrap_or(0);
    let m = char_module_in(module, &vec![-2 * d - r; n], &vec![2 * d + r; n]).map_err(err)?;
    convolve(nchar, &m).map_err(err)
}

fn criterion_8() -> Check {
    let d = 12;
    let z = Scalar::s().pow(2);
    for n in 1..=2 {
        let all = set(1..=n);
        let a: Vec<Scalar> = (0..n).map(|i| Scalar::ratio(2 * i as i64 + 1, 3)).collect();
        let f = ModuleDescriptor::FullLaurent(a.clone());
        let finite: Vec<CharTable> = [vec![0; n], vec![1; n], {
            let mut v = vec![0; n];
            v[0] = 2;
            v
        }]
        .iter()
        .map(|l| finite_sp_char(l, z.clone()).unwrap())
        .collect();
        for nchar in &finite {
            let t = tensor_with_module(nchar, &f, d)?;
            let flags = classify_flags(&t, d).map_err(err)?;
            ensure(flags.injective == all, || format!("N⊗F(a), n={n}: {flags:?}"))?;
        }
        let mut highest = vec![
            verma_char(&Weight::new(vec![Scalar::ratio(1, 2); n], z.clone()), Algebra::G, 2 * d).map_err(err)?,
            tensor_with_module(&finite[1], &ModuleDescriptor::ShaleWeil(n), d)?,
        ];
        for c in [Scalar::zero(), Scalar::symbol("c")] {
            let v = one_dim_char(&c, n, z.clone()).map_err(err)?;
            highest.push(generalized_verma_char(&v, Algebra::G, 2 * d).map_err(err)?);
        }
        for t in &highest {
            let flags = classify_flags(t, d).map_err(err)?;
            ensure(flags.injective.is_empty() && flags.finite_plus == all, || {
                format!("highest weight type, n={n}: {flags:?}")
            })?;
        }
    }
    let n = 2;
    for c in 0..=2 {
        let l = simple_sp_char_one_dim(&Scalar::from_int(c), n, z.clone()).map_err(err)?;
        for int in [set([]), set([0]), set([1]), set([0, 1])] {
            let a: Vec<Scalar> = (0..n)
                .map(|i| if int.contains(&i) { Scalar::zero() } else { Scalar::ratio(1, 4 + i as i64) })
                .collect();
            let g = ModuleDescriptor::quotient(a, int.clone()).map_err(err)?;
            let t = tensor_with_module(&l, &g, d)?;
            let flags = classify_flags(&t, d).map_err(err)?;
            let expected: BTreeSet<usize> = int.iter().map(|i| i + 1).collect();
            let complement: BTreeSet<usize> = set(1..=n).difference(&flags.injective).copied().collect();
            ensure(complement == expected, || format!("L(c={c})⊗G, Int={expected:?}: {flags:?}"))?;
        }
    }
    Ok(())
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for k in 0..500 {
        let n = rng.gen_range(1..=2);
        let alg = SymplecticOscillator::rank(n).unwrap();
        let basis = alg.basis();
        let len = rng.gen_range(0..=6);
        let word: Vec<BasisElement> = (0..len).map(|_| basis[rng.gen_range(0..basis.len())].clone()).collect();
        let right = normal_order_with(&word, n, Strategy::RightmostFirst).map_err(err)?;
        let left = normal_order_with(&word, n, Strategy::LeftmostFirst).map_err(err)?;
        let mut pick = ChaCha8Rng::seed_from_u64(1000 + k);
        let random = normal_order_by(&word, n, &mut |inv: &[usize]| pick.gen_range(0..inv.len())).map_err(err)?;
        ensure(right == left && left == random, || {
            let w: Vec<String> = word.iter().map(|e| e.to_string()).collect();
            format!("word {}: {right} / {left} / {random}", w.join(" "))
        })?;
    }
    Ok(())
}

type Criterion = (&'static str, fn() -> Check, Option<u64>);

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("Lie algebra soundness (antisymmetry, Jacobi, matrix realization), n = 1,2,3", criterion_1, Some(10)),
        ("differential-operator realization is a Lie homomorphism; phi is multiplicative", criterion_2, Some(30)),
        ("Verma character factorizes through sp Verma and S", criterion_3, Some(60)),
        ("Heisenberg identities on highest weight vectors", criterion_4, None),
        ("straightening yields vectors killed by every t_i", criterion_5, None),
        ("twist images agree with conjugation on F(a)", criterion_6, None),
        ("generalized Verma character factorization", criterion_7, None),
        ("support shapes of flag sets", criterion_8, None),
        ("normal forms agree across rewriting strategies", criterion_9, Some(60)),
    ];
    let mut failed = 0;
    for (k, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(()), Some(l)) if elapsed > Duration::from_secs(*l) => Err(format!("took {elapsed:.2?}, limit {l}s")),
            (o, _) => o,
        };
        match outcome {
            Ok(()) => println!("criterion {}: PASS  {name} ({elapsed:.2?})", k + 1),
            Err(e) => {
                failed += 1;
                println!("criterion {}: FAIL  {name} ({elapsed:.2?}): {e}", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
