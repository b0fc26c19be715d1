use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use oak_core::characters::{
    char_module_in, classify_flags, convolve, default_probe_depth, finite_sp_char, kostant_partition, positive_roots,
    verify_generalized_verma_factorization, verify_verma_factorization, verma_char, Algebra, CharTable,
};
use oak_core::morphisms::{
    phi_map, theta_generator, theta_generator_printed, verify_lie_hom, verify_theta_with, weyl_image, HomMap,
    TwistSpec,
};
use oak_core::parse::{parse_int_list, parse_scalar, parse_scalar_list, SymbolSet};
use oak_core::uea::{normal_order, UEAElement};
use oak_core::weyl::{apply, LaurentVector, ModuleDescriptor, WeylElement};
use oak_core::{BasisElement, Error, LieElement, Scalar, SymplecticOscillator, Weight};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "oak", version, about = "Exact computations in the symplectic oscillator algebra sp(2n) ⋉ H_n")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Seed for randomized sweeps.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgebraArg {
    G,
    Sp,
}

impl From<AlgebraArg> for Algebra {
    fn from(a: AlgebraArg) -> Self {
        match a {
            AlgebraArg::G => Algebra::G,
            AlgebraArg::Sp => Algebra::Sp,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum MapArg {
    F,
    Phi,
}

#[derive(Clone, Copy, ValueEnum)]
enum TwistForm {
    /// Images from the ad-series of conjugation.
    Series,
    /// The closed forms `X_ε + b X_{−ε} Y^{-1}`, `X_{2ε} + 2b(b−1−2h) Y^{-1}`.
    Printed,
}

#[derive(Subcommand)]
enum Command {
    /// Lie bracket of two elements of g_n.
    Bracket {
        #[arg(long)]
        rank: usize,
        #[arg(allow_hyphen_values = true)]
        x: String,
        #[arg(allow_hyphen_values = true)]
        y: String,
    },
    /// PBW normal form of a product (whitespace-separated factors).
    NormalOrder {
        #[arg(long)]
        rank: usize,
        #[arg(allow_hyphen_values = true, required = true)]
        word: Vec<String>,
    },
    /// Apply a Weyl-algebra element to a vector of F(a), G(a) or S.
    Act {
        #[arg(long)]
        rank: usize,
        /// `F a1,a2`, `G a1,0` or `S`.
        #[arg(long)]
        module: String,
        /// Weyl element such as `t1^2 d1`.
        #[arg(long, allow_hyphen_values = true)]
        element: String,
        /// `m1,m2:coef;...` with offsets from the module's base exponent.
        #[arg(long, allow_hyphen_values = true)]
        vector: String,
        /// Read `element` as an element of U(g_n) and act through f.
        #[arg(long)]
        via_f: bool,
    },
    /// Check that f or φ preserves brackets on every pair of basis elements.
    VerifyHom {
        #[arg(long)]
        rank: usize,
        #[arg(long, value_enum)]
        map: MapArg,
        /// Random pairs of degree ≤ 3 for the multiplicativity sweep of φ.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Compare θ_b on generators with conjugation by X_{-2ε_i}^{b_i} on F(a).
    VerifyTwist {
        #[arg(long)]
        rank: usize,
        /// One parameter per twisted index.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        /// One-based twisted indices; defaults to 1..k for k parameters.
        #[arg(long, allow_hyphen_values = true)]
        indices: Option<String>,
        #[arg(long, default_value_t = 4)]
        depth: i64,
        /// Base exponent of F(a); defaults to symbolic a1,..,an.
        #[arg(long, allow_hyphen_values = true)]
        base: Option<String>,
        #[arg(long, value_enum, default_value_t = TwistForm::Series)]
        form: TwistForm,
    },
    /// Verma multiplicities, or the full table when no offset is given.
    VermaMult {
        #[arg(long, value_enum)]
        algebra: AlgebraArg,
        #[arg(long)]
        rank: usize,
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
        #[arg(long, default_value_t = 6)]
        depth: i64,
        /// μ with the multiplicity of λ − μ requested.
        #[arg(long, allow_hyphen_values = true)]
        offset: Option<String>,
    },
    /// ch M(ż, λ) = ch M_sp(λ + ½Σε) · ch S on a box.
    VerifyProp4b {
        #[arg(long)]
        rank: usize,
        /// Comma-separated λ; random rational samples when omitted.
        #[arg(long, allow_hyphen_values = true)]
        lambda: Option<String>,
        #[arg(long, default_value_t = 5)]
        samples: usize,
        #[arg(long, default_value_t = 6)]
        depth: i64,
    },
    /// Generalized Verma factorization for V one-dimensional of weight c·Σε.
    VerifyProp8b {
        #[arg(long)]
        rank: usize,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        c: String,
        #[arg(long, default_value_t = 5)]
        depth: i64,
    },
    /// Flag sets I, F, F+, F- of a character table.
    Classify {
        #[arg(long)]
        support: PathBuf,
        /// Defaults to OAK_PROBE_DEPTH or 12.
        #[arg(long)]
        depth: Option<i64>,
    },
    /// Character table of a module, optionally tensored with L_sp(μ).
    Support {
        #[arg(long)]
        rank: usize,
        #[arg(long, conflicts_with = "verma", allow_hyphen_values = true)]
        module: Option<String>,
        /// Highest weight of a Verma module instead of a Weyl module.
        #[arg(long, allow_hyphen_values = true)]
        verma: Option<String>,
        #[arg(long, value_enum, default_value_t = AlgebraArg::G)]
        algebra: AlgebraArg,
        /// Dominant integral μ of a finite-dimensional L_sp(μ) factor.
        #[arg(long, allow_hyphen_values = true)]
        with_finite: Option<String>,
        /// Half-width of the exact box; defaults to twice the probe depth.
        #[arg(long)]
        radius: Option<i64>,
    },
}

struct Output {
    json: Value,
    text: String,
    ok: bool,
}

impl Output {
    fn new(json: Value, text: impl Into<String>) -> Self {
        Output {
            json,
            text: text.into(),
            ok: true,
        }
    }

    fn verdict(mut self, ok: bool) -> Self {
        self.ok = ok;
        self
    }
}

fn symbols(n: usize) -> SymbolSet {
    SymbolSet::standard(n).with("c")
}

fn lie_from_uea(u: &UEAElement) -> Result<LieElement, Error> {
    let n = u.rank();
    let alg = SymplecticOscillator::rank(n)?;
    let mut terms = Vec::new();
    for (m, c) in u.terms() {
        match m.letters() {
            [k] => terms.push((alg.element(*k).clone(), c.clone())),
            _ => return Err(Error::Unsupported(format!("`{u}` is not in g_{n}"))),
        }
    }
    LieElement::from_terms(n, terms)
}

fn pairs_json(pairs: Vec<(String, String)>, key: &str) -> Value {
    Value::Array(pairs.into_iter().map(|(m, c)| json!({ key: m, "coefficient": c })).collect())
}

fn vector_json(v: &LaurentVector) -> Value {
    Value::Array(
        v.to_pairs()
            .into_iter()
            .map(|(o, c)| json!({ "offset": o, "coefficient": c }))
            .collect(),
    )
}

fn weight(text: &str, n: usize) -> Result<Weight, Error> {
    let h = parse_scalar_list(text, Some(&symbols(n)))?;
    if h.len() != n {
        return Err(Error::RankMismatch {
            expected: n,
            found: h.len(),
        });
    }
    Ok(Weight::new(h, Scalar::s().pow(2)))
}

fn random_element(rng: &mut ChaCha8Rng, n: usize) -> Result<UEAElement, Error> {
    let alg = SymplecticOscillator::rank(n)?;
    let mut u = UEAElement::zero(n);
    for _ in 0..rng.gen_range(1..=3) {
        let len = rng.gen_range(0..=3);
        let word: Vec<BasisElement> = (0..len).map(|_| alg.basis()[rng.gen_range(0..alg.dim())].clone()).collect();
        let c = rng.gen_range(-3i64..=3);
        u = u.add(&normal_order(&word, n)?.scale(&Scalar::from_int(c)));
    }
    Ok(u)
}

fn run(cli: &Cli) -> Result<Output, Error> {
    match &cli.command {
        Command::Bracket { rank, x, y } => {
            let n = *rank;
            let sym = symbols(n);
            let x = lie_from_uea(&UEAElement::parse(x, n, &sym)?)?;
            let y = lie_from_uea(&UEAElement::parse(y, n, &sym)?)?;
            let r = x.bracket(&y)?;
            let terms: Vec<(String, String)> = r.terms().iter().map(|(e, c)| (e.to_string(), c.to_string())).collect();
            Ok(Output::new(
                json!({ "rank": n, "result": r.to_string(), "terms": pairs_json(terms, "element") }),
                r.to_string(),
            ))
        }
        Command::NormalOrder { rank, word } => {
            let n = *rank;
            let u = UEAElement::parse(&word.join(" "), n, &symbols(n))?;
            Ok(Output::new(
                json!({ "rank": n, "result": u.to_string(), "terms": pairs_json(u.to_pairs(), "monomial") }),
                u.to_string(),
            ))
        }
        Command::Act {
            rank,
            module,
            element,
            vector,
            via_f,
        } => {
            let n = *rank;
            let sym = symbols(n);
            let m = ModuleDescriptor::parse(module, n, &sym)?;
            let p = if *via_f {
                weyl_image(&UEAElement::parse(element, n, &sym)?)?
            } else {
                WeylElement::parse(element, n, &sym)?
            };
            let v = LaurentVector::parse(vector, m.base(), &sym)?;
            if v.terms().keys().any(|o| !m.contains(o)) {
                return Err(Error::InvalidVector(format!("{v} has offsets outside {m}")));
            }
            let r = apply(&p, &v, &m)?;
            Ok(Output::new(
                json!({ "module": m.to_string(), "element": p.to_string(), "result": vector_json(&r) }),
                r.to_string(),
            ))
        }
        Command::VerifyHom { rank, map, samples } => {
            let n = *rank;
            let map = match map {
                MapArg::F => HomMap::F,
                MapArg::Phi => HomMap::Phi,
            };
            let report = verify_lie_hom(map, n)?;
            let mut failures = Vec::new();
            if matches!(map, HomMap::Phi) {
                let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                for k in 0..*samples {
                    let u = random_element(&mut rng, n)?;
                    let v = random_element(&mut rng, n)?;
                    let lhs = phi_map(&u.multiply(&v)?, n)?;
                    let rhs = phi_map(&u, n)?.multiply(&phi_map(&v, n)?)?;
                    if lhs != rhs {
                        failures.push(json!({ "sample": k, "u": u.to_string(), "v": v.to_string() }));
                    }
                }
            }
            let ok = report.ok() && failures.is_empty();
            let text = format!(
                "{}: {} pairs, {} violations; {} multiplicativity samples, {} failures",
                if ok { "ok" } else { "FAILED" },
                report.pairs_checked,
                report.violations.len(),
                samples,
                failures.len()
            );
            let mut j = serde_json::to_value(&report).expect("serializable");
            j["multiplicativity"] = json!({ "samples": samples, "seed": cli.seed, "failures": failures });
            Ok(Output::new(j, text).verdict(ok))
        }
        Command::VerifyTwist {
            rank,
            b,
            indices,
            depth,
            base,
            form,
        } => {
            let n = *rank;
            let sym = symbols(n);
            let bs = parse_scalar_list(b, Some(&sym))?;
            let idx: Vec<usize> = match indices {
                Some(t) => parse_int_list(t)?
                    .into_iter()
                    .map(|i| {
                        if i >= 1 && (i as usize) <= n {
                            Ok(i as usize - 1)
                        } else {
                            Err(Error::InvalidTwist(format!("index {i} out of range for rank {n}")))
                        }
                    })
                    .collect::<Result<_, _>>()?,
                None => (0..bs.len()).collect(),
            };
            let spec = TwistSpec::new(idx, bs)?;
            let a = match base {
                Some(t) => parse_scalar_list(t, Some(&sym))?,
                None => (1..=n).map(|i| Scalar::symbol(&format!("a{i}"))).collect(),
            };
            if a.len() != n {
                return Err(Error::RankMismatch {
                    expected: n,
                    found: a.len(),
                });
            }
            let theta = match form {
                TwistForm::Series => theta_generator,
                TwistForm::Printed => theta_generator_printed,
            };
            if spec.params().iter().any(|x| x.as_i64().is_none_or(|k| k < 0)) {
                // no conjugation oracle: report the images themselves
                let mut images = Vec::new();
                for &i in spec.indices() {
                    for g in [format!("X[-e{}]", i + 1), format!("X[+e{}]", i + 1), format!("X[+2e{}]", i + 1)] {
                        let e = BasisElement::parse(&g, n)?;
                        images.push(json!({ "generator": g, "image": theta(&e, &spec, n)?.to_string() }));
                    }
                }
                let text = images
                    .iter()
                    .map(|v| format!("{} -> {}", v["generator"].as_str().unwrap(), v["image"].as_str().unwrap()))
                    .collect::<Vec<_>>()
                    .join("\n");
                return Ok(Output::new(json!({ "rank": n, "images": images }), text));
            }
            let report = verify_theta_with(&spec, &a, *depth, theta)?;
            let text = format!(
                "{}: {} checks, {} mismatches",
                if report.ok() { "ok" } else { "FAILED" },
                report.checks,
                report.mismatches.len()
            );
            let ok = report.ok();
            Ok(Output::new(serde_json::to_value(&report).expect("serializable"), text).verdict(ok))
        }
        Command::VermaMult {
            algebra,
            rank,
            lambda,
            depth,
            offset,
        } => {
            let n = *rank;
            let lam = weight(lambda, n)?;
            let algebra = Algebra::from(*algebra);
            match offset {
                Some(mu) => {
                    let mu = parse_int_list(mu)?;
                    if mu.len() != n {
                        return Err(Error::RankMismatch {
                            expected: n,
                            found: mu.len(),
                        });
                    }
                    let m = kostant_partition(&mu, &positive_roots(n, algebra)?)?;
                    let w = lam.shifted(&mu.iter().map(|x| -x).collect::<Vec<_>>());
                    Ok(Output::new(json!({ "weight": w, "mu": mu, "multiplicity": m }), m.to_string()))
                }
                None => {
                    let t = verma_char(&lam, algebra, *depth)?;
                    Ok(table_output(&t))
                }
            }
        }
        Command::VerifyProp4b {
            rank,
            lambda,
            samples,
            depth,
        } => {
            let n = *rank;
            let lambdas = match lambda {
                Some(t) => vec![weight(t, n)?],
                None => {
                    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
                    (0..*samples)
                        .map(|_| {
                            let h = (0..n)
                                .map(|_| Scalar::ratio(rng.gen_range(-20..=20), rng.gen_range(1..=7)))
                                .collect();
                            Weight::new(h, Scalar::s().pow(2))
                        })
                        .collect()
                }
            };
            let reports = lambdas
                .iter()
                .map(|l| verify_verma_factorization(l, *depth))
                .collect::<Result<Vec<_>, _>>()?;
            report_list(reports.iter().map(|r| (serde_json::to_value(r).expect("serializable"), r.ok())))
        }
        Command::VerifyProp8b { rank, c, depth } => {
            let n = *rank;
            let c = parse_scalar(c, Some(&symbols(n)))?;
            let r = verify_generalized_verma_factorization(&c, n, Scalar::s().pow(2), *depth)?;
            report_list([(serde_json::to_value(&r).expect("serializable"), r.ok())].into_iter())
        }
        Command::Classify { support, depth } => {
            let text = std::fs::read_to_string(support)
                .map_err(|e| Error::InvalidModule(format!("{}: {e}", support.display())))?;
            let v: Value =
                serde_json::from_str(&text).map_err(|e| Error::InvalidModule(format!("{}: {e}", support.display())))?;
            let t = CharTable::from_json(&v)?;
            let d = depth.unwrap_or_else(default_probe_depth);
            let flags = classify_flags(&t, d)?;
            let show = |s: &std::collections::BTreeSet<usize>| format!("{s:?}");
            let text = format!(
                "I = {}, F = {}, F+ = {}, F- = {}",
                show(&flags.injective),
                show(&flags.finite),
                show(&flags.finite_plus),
                show(&flags.finite_minus)
            );
            Ok(Output::new(serde_json::to_value(&flags).expect("serializable"), text))
        }
        Command::Support {
            rank,
            module,
            verma,
            algebra,
            with_finite,
            radius,
        } => {
            let n = *rank;
            let sym = symbols(n);
            let r = radius.unwrap_or_else(|| 2 * default_probe_depth());
            let finite = match with_finite {
                Some(t) => Some(finite_sp_char(&parse_int_list(t)?, Scalar::zero())?),
                None => None,
            };
            let reach = finite
                .as_ref()
                .map(|f| f.lo().iter().chain(f.hi()).map(|x| x.abs()).max().unwrap_or(0))
                .unwrap_or(0);
            let (lo, hi) = (vec![-r - reach; n], vec![r + reach; n]);
            let base = match (module, verma) {
                (Some(m), None) => char_module_in(&ModuleDescriptor::parse(m, n, &sym)?, &lo, &hi)?,
                (None, Some(l)) => verma_char(&weight(l, n)?, Algebra::from(*algebra), r + reach)?,
                _ => return Err(Error::Unsupported("give exactly one of --module and --verma".into())),
            };
            let t = match finite {
                Some(f) => {
                    let t = convolve(&f, &base)?;
                    t.restricted(&vec![-r; n], &vec![r; n])?
                }
                None => base,
            };
            Ok(table_output(&t))
        }
    }
}

fn table_output(t: &CharTable) -> Output {
    let text = t
        .entries()
        .iter()
        .map(|(o, m)| format!("{o:?} {m}"))
        .collect::<Vec<_>>()
        .join("\n");
    Output::new(t.to_json(true), text)
}

fn report_list(reports: impl Iterator<Item = (Value, bool)>) -> Result<Output, Error> {
    let (values, oks): (Vec<Value>, Vec<bool>) = reports.unzip();
    let ok = oks.iter().all(|&x| x);
    let text = format!(
        "{}: {} of {} factorizations agree",
        if ok { "ok" } else { "FAILED" },
        oks.iter().filter(|&&x| x).count(),
        oks.len()
    );
    Ok(Output::new(json!({ "reports": values, "ok": ok }), text).verdict(ok))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(out) => {
            match cli.format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&out.json).expect("serializable")),
                Format::Text => println!("{}", out.text),
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
