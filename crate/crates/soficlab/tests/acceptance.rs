mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num::{BigUint, One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use soficlab::cli::one_block_view;
use soficlab::lift::{Comparison, SplitWeights};
use soficlab::markov_decide::{order_bound, rank_criterion};
use soficlab::markov_measure::image_word_measures;
use soficlab::rational::{int, rat, to_f64};
use soficlab::shift_space::all_words;
use soficlab::thermo::{integral, log_potential};
use soficlab::*;

use common::{load, random_instance, random_irreducible, random_stochastic, FIXTURES};

type Outcome = std::result::Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn check<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn within(start: Instant, limit: Duration) -> std::result::Result<(), String> {
    let spent = start.elapsed();
    if spent > limit {
        Err(format!("took {spent:?}, limit {limit:?}"))
    } else {
        Ok(())
    }
}

fn sm(rows: Vec<Vec<Rational>>) -> StochasticMatrix {
    StochasticMatrix::new(Matrix::from_rows(rows)).unwrap()
}

fn blackwell_thirds() -> Outcome {
    let start = Instant::now();
    let model = load("figblack1_3");
    let (_, code) = check(model.code(None))?;
    let (_, mu) = check(model.measure(Some("mu")))?;
    let mu = &mu.measure;
    ensure!(
        mu.stationary() == [rat(2, 7), rat(4, 7), rat(1, 7)],
        "stationary vector {:?}",
        mu.stationary()
    );
    let ctx = check(DecisionContext::new(&code.code, mu))?;
    let module = check(ctx.reduced_module())?;
    for k in 1..=8 {
        let v = check(decide_kstep(&ctx, k))?;
        ensure!(!v.is_k_markov, "decide_kstep({k}) returned true");
        let w = v.witness.ok_or(format!("no witness at k = {k}"))?;
        let oracle = check(empirical_k_markov_check(
            &code.code,
            mu,
            k,
            w.history.len() + k + 1,
        ))?;
        ensure!(
            !oracle.consistent,
            "witness at k = {k} is not confirmed by brute force"
        );
        ensure!(
            !check(decide_kstep_kernel(&ctx, k))?.holds,
            "kernel method disagrees at k = {k}"
        );
        ensure!(
            !check(rank_criterion(&module, k, 100_000))?.is_k_markov,
            "rank method disagrees at k = {k}"
        );
    }
    within(start, Duration::from_secs(5))?;
    Ok(format!(
        "stationary (2/7, 4/7, 1/7); not k-step for k = 1..8 by all three methods in {:?}",
        start.elapsed()
    ))
}

fn blackwell_halves() -> Outcome {
    let start = Instant::now();
    let model = load("figblack1_2");
    let (_, code) = check(model.code(None))?;
    let mu = &check(model.measure(Some("mu")))?.1.measure;
    let nu = &check(model.measure(Some("nu")))?.1.measure;
    let ctx = check(DecisionContext::new(&code.code, mu))?;
    let v = check(decide_kstep(&ctx, 1))?;
    ensure!(v.is_k_markov, "decide_kstep(1) returned false");
    let want = Matrix::from_rows(vec![vec![int(0), int(1)], vec![rat(1, 2), rat(1, 2)]]);
    ensure!(v.transition == want, "Q = {:?}", v.transition.to_strings());
    let mut words = 0;
    for len in 0..=6 {
        for w in all_words(2, len) {
            let image = check(image_cylinder_measure(&code.code, mu, &w))?;
            ensure!(image == nu.cylinder(&w), "image and ν differ on {w:?}");
            words += 1;
        }
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "1-step with Q = [[0,1],[1/2,1/2]]; {words} image cylinders equal ν"
    ))
}

fn split_weights(a: &Rational, b: &Rational, c: &Rational) -> SplitWeights {
    let mut w = SplitWeights::new();
    for (i, x) in [a, b, c].into_iter().enumerate() {
        w.insert((i, 1), x.clone());
        w.insert((i, 2), int(1) - x);
    }
    w
}

fn closed_form(q: &[Rational; 4], a: &[Rational; 3]) -> Matrix {
    let [p, q, r, s] = q;
    Matrix::from_rows(vec![
        vec![p.clone(), &a[0] * q, (int(1) - &a[0]) * q],
        vec![r.clone(), &a[1] * s, (int(1) - &a[1]) * s],
        vec![r.clone(), &a[2] * s, (int(1) - &a[2]) * s],
    ])
}

fn lifting() -> Outcome {
    let model = load("exliftone");
    let (_, code) = check(model.code(None))?;
    let x = &model.spaces["X"];
    let y = &model.spaces["Y"];
    let cs = check(CodeStructure::new(&code.code, x, Some(y)))?;
    let p = model.measures["mu"].measure.transition().clone();
    let q = model.measures["nu"].measure.transition().clone();
    let base = [rat(1, 4), rat(1, 3), rat(1, 2)];
    let instances = [
        (
            [rat(1, 5), rat(4, 5), rat(2, 3), rat(1, 3)],
            [rat(1, 4), rat(1, 3), rat(1, 2)],
        ),
        (
            [rat(1, 2), rat(1, 2), rat(1, 7), rat(6, 7)],
            [rat(2, 3), rat(1, 5), rat(3, 4)],
        ),
        (
            [rat(9, 10), rat(1, 10), rat(3, 8), rat(5, 8)],
            [rat(1, 2), rat(1, 2), rat(1, 9)],
        ),
    ];
    for (qv, weights) in &instances {
        let target = sm(vec![
            vec![qv[0].clone(), qv[1].clone()],
            vec![qv[2].clone(), qv[3].clone()],
        ]);
        let w = split_weights(&weights[0], &weights[1], &weights[2]);
        let lift = check(e_resolving_lift(&cs, &target, Some(&w)))?;
        ensure!(
            lift.transition.matrix() == &closed_form(qv, weights),
            "split lift differs for {qv:?}"
        );
        let lift = check(markovian_lift(&cs, &p, &q, &target))?;
        ensure!(lift.exact, "Markovian lift was not exact");
        ensure!(
            lift.transition.matrix() == &closed_form(qv, &base),
            "Markovian lift differs for {qv:?}"
        );
        let mu = check(MarkovMeasure::new(x.clone(), 1, lift.transition.clone()))?;
        let nu = check(MarkovMeasure::new(y.clone(), 1, target))?;
        for len in 0..=6 {
            for w in all_words(2, len) {
                ensure!(
                    check(image_cylinder_measure(&code.code, &mu, &w))? == nu.cylinder(&w),
                    "image differs on {w:?}"
                );
            }
        }
    }
    Ok("split and Markovian lifts match the closed form for three instances; images exact to length 6".into())
}

fn preimages() -> Outcome {
    let start = Instant::now();
    let model = load("ex_nosofics");
    let (_, code) = check(model.code(None))?;
    let x = &model.spaces[&code.domain];
    for n in 0..=20 {
        let mut w = vec![1];
        w.extend(std::iter::repeat_n(0, n));
        w.push(1);
        let count = check(preimage_count(&code.code, x, &w))?;
        ensure!(
            count == BigUint::from(n + 1),
            "count over b a^{n} b is {count}"
        );
    }
    within(start, Duration::from_secs(1))?;
    Ok(format!(
        "|preimages of b a^n b| = n + 1 for n = 0..20 in {:?}",
        start.elapsed()
    ))
}

fn bounds() -> Outcome {
    for (k, want) in [(3, 1u32), (2, 3), (1, 27)] {
        let got = check(order_bound(k, 2, 3))?;
        ensure!(
            got == BigUint::from(want),
            "N({k},2,3) = {got}, expected {want}"
        );
    }
    let mut computed = 0;
    let mut refused = Vec::new();
    for n in 2..=6 {
        for m in 1..=4 {
            match order_bound(2, m, n) {
                Ok(b) => {
                    ensure!(b >= BigUint::one(), "N(2,{m},{n}) = 0");
                    computed += 1;
                }
                Err(e) => refused.push(e.to_string()),
            }
        }
    }
    ensure!(
        refused.is_empty(),
        "{computed} of 20 computed; refused {}",
        refused.join("; ")
    );
    Ok("N(3,2,3) = 1, N(2,2,3) = 3, N(1,2,3) = 27; all N(2,m,n) for n ≤ 6, m ≤ 4".into())
}

fn fixture_modules() -> std::result::Result<Vec<(String, StochasticModule)>, String> {
    let mut out = Vec::new();
    for name in FIXTURES {
        let model = load(name);
        for (mname, entry) in &model.measures {
            let one_step = entry.measure.as_chain();
            out.push((
                format!("{name}/{mname}"),
                check(LinearRepresentation::from_markov(&one_step))?.to_module(),
            ));
        }
        for (cname, code) in &model.codes {
            let Ok((_, entry)) = model.measure_on(&code.domain) else {
                continue;
            };
            let (code, mu) = check(one_block_view(&code.code, &entry.measure))?;
            let rep = check(LinearRepresentation::from_sofic_image(&code, &mu))?;
            out.push((format!("{name}/{cname}"), rep.to_module()));
        }
    }
    Ok(out)
}

fn module_invariance() -> Outcome {
    let modules = fixture_modules()?;
    for (name, module) in &modules {
        let red = check(module.reduce())?;
        let m = red.alphabet().len();
        let recoded = check(check(red.two_block_recoding())?.reduce())?;
        let first: Vec<usize> = (0..m * m).map(|s| s / m).collect();
        let back = check(recoded.push_forward(&first, red.alphabet().clone()))?;
        let eq = check(equivalent(&back, &red))?;
        ensure!(
            eq.equivalent,
            "{name}: recoding differs on {:?}",
            eq.witness
        );
        let (a, b) = (
            check(red.core_invariant())?,
            check(recoded.core_invariant())?,
        );
        ensure!(
            a.eventual_charpoly == b.eventual_charpoly,
            "{name}: eventual core polynomials {} and {}",
            a.eventual_charpoly,
            b.eventual_charpoly
        );
    }
    Ok(format!(
        "{} fixture modules agree with their 2-block recodings",
        modules.len()
    ))
}

fn round_trip() -> Outcome {
    let mut checked = 0;
    for name in ["figblack1_2", "figblack1_3"] {
        let model = load(name);
        let (_, code) = check(model.code(None))?;
        let mu = &check(model.measure(Some("mu")))?.1.measure;
        let rep = check(LinearRepresentation::from_sofic_image(&code.code, mu))?;
        let presentations = check(check(rep.canonicalize())?.to_sofic_presentation())?;
        let m = rep.alphabet().len();
        for len in 0..=6 {
            for w in all_words(m, len) {
                let mut total = Rational::zero();
                for wp in &presentations {
                    let p = &wp.presentation;
                    total += &wp.weight * check(image_cylinder_measure(&p.code, &p.measure, &w))?;
                }
                ensure!(
                    total == rep.evaluate(&w),
                    "{name}: presentation differs on {w:?}"
                );
                checked += 1;
            }
        }
    }
    Ok(format!(
        "{checked} cylinders reproduced by the recovered presentations"
    ))
}

fn random_potential(rng: &mut ChaCha8Rng) -> LocallyConstantPotential {
    let n = rng.gen_range(1..=4);
    let adj = common::random_adjacency(rng, n, 0.5);
    let x = build_sft(Alphabet::numbered(n), adj).unwrap();
    let span = rng.gen_range(1..=2);
    let values: Vec<f64> = (0..n.pow(span as u32))
        .map(|_| rng.gen_range(-12i64..=12) as f64 / rng.gen_range(1i64..=6) as f64)
        .collect();
    LocallyConstantPotential::from_fn(x, span, |b| values[b.iter().fold(0, |acc, &s| acc * n + s)])
        .unwrap()
}

fn thermodynamics() -> Outcome {
    let golden = build_sft(
        Alphabet::numbered(2),
        vec![vec![true, true], vec![true, false]],
    )
    .unwrap();
    let p0 = check(pressure(&check(LocallyConstantPotential::constant(
        golden, 0.0,
    ))?))?;
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    ensure!((p0 - phi.ln()).abs() < 1e-9, "golden mean pressure {p0}");
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    for i in 0..100 {
        let f = random_potential(&mut rng);
        let p = check(pressure(&f))?;
        let mu = check(equilibrium_markov(&f))?;
        let gap = (p - mu.entropy() - check(integral(&f, &mu))?).abs();
        ensure!(gap < 1e-8, "potential {i}: variational gap {gap:e}");
        worst = worst.max(gap);
    }
    let mut worst_entry: f64 = 0.0;
    for _ in 0..20 {
        let n = rng.gen_range(1..=4);
        let adj = common::random_adjacency(&mut rng, n, 0.5);
        let x = build_sft(Alphabet::numbered(n), adj.clone()).unwrap();
        let p = random_stochastic(&mut rng, &adj);
        let f = check(log_potential(&x, p.matrix()))?;
        let eq = check(equilibrium_markov(&f))?;
        for i in 0..n {
            for j in 0..n {
                let d = (to_f64(eq.transition().get(i, j)) - to_f64(p.get(i, j))).abs();
                ensure!(d < 1e-10, "equilibrium of log P differs by {d:e}");
                worst_entry = worst_entry.max(d);
            }
        }
    }
    Ok(format!("P(0) = log φ; worst variational gap {worst:.1e}; worst recovered entry error {worst_entry:.1e}"))
}

fn compensation() -> Vec<(String, Outcome)> {
    let model = load("figblack1_3");
    let (_, code) = model.code(None).unwrap();
    let cs = CodeStructure::new(&code.code, &model.spaces["X"], Some(&model.spaces["Y"])).unwrap();
    let g = &model.potentials["G"].potential;
    let zero = &model.potentials["zero"].potential;
    let bounded = (|| -> Outcome {
        let report = check(compensation_ratio_report(&cs, g, 12))?;
        let tol = 1e-12;
        ensure!(
            report.min >= 0.5 - tol && report.max <= 2.0 + tol,
            "ratios span [{}, {}]",
            report.min,
            report.max
        );
        Ok(format!(
            "ratios lie in [{}, {}] for ℓ ≤ 12",
            report.min, report.max
        ))
    })();
    let unbounded = (|| -> Outcome {
        let report = check(compensation_ratio_report(&cs, zero, 12))?;
        let short: Vec<String> = report
            .rows
            .iter()
            .filter(|r| r.max < 2f64.powi(r.length as i32 - 1))
            .map(|r| format!("ℓ={} max {}", r.length, r.max))
            .collect();
        ensure!(
            short.is_empty(),
            "max ratio grows like 2^⌈ℓ/2⌉ (at ℓ = 12 it is {}), below 2^(ℓ-1) at {}",
            report.rows[11].max,
            short.join(", ")
        );
        Ok("max ratio ≥ 2^(ℓ-1) for ℓ ≤ 12".into())
    })();
    vec![("9a".into(), bounded), ("9b".into(), unbounded)]
}

fn properties() -> Outcome {
    let start = Instant::now();
    let seeds = 0..60u64;
    let mut markov = 0;
    for seed in seeds.clone() {
        let inst = random_instance(seed);
        let m = inst.code.codomain().len();
        let nu = check(image_word_measures(&inst.code, &inst.mu, 6))?;
        let zero = Rational::zero();
        let get = |w: &[usize]| nu.get(w).unwrap_or(&zero).clone();
        for len in 0..6 {
            for w in all_words(m, len) {
                let right: Rational = (0..m).map(|b| get(&[w.as_slice(), &[b]].concat())).sum();
                let left: Rational = (0..m).map(|b| get(&[&[b], w.as_slice()].concat())).sum();
                ensure!(
                    right == get(&w) && left == get(&w),
                    "seed {seed}: Kolmogorov consistency fails at {w:?}"
                );
            }
        }
        let ctx = check(DecisionContext::new(&inst.code, &inst.mu))?;
        let index = ctx.stable_space().stabilization_index;
        ensure!(
            index + m <= inst.x.len(),
            "seed {seed}: stabilization index {index} > N - m"
        );
        let module = check(ctx.reduced_module())?;
        let mut previous = false;
        for k in 1..=3 {
            let v = check(decide_kstep(&ctx, k))?;
            ensure!(
                !previous || v.is_k_markov,
                "seed {seed}: k-step at k = {} but not at {k}",
                k - 1
            );
            previous = v.is_k_markov;
            ensure!(
                check(decide_kstep_kernel(&ctx, k))?.holds == v.is_k_markov
                    && check(rank_criterion(&module, k, 100_000))?.is_k_markov == v.is_k_markov,
                "seed {seed}: methods disagree at k = {k}"
            );
            let oracle = check(empirical_k_markov_check(&inst.code, &inst.mu, k, 8))?;
            match &v.witness {
                None => ensure!(
                    oracle.consistent,
                    "seed {seed}: brute force refutes k = {k}"
                ),
                Some(w) if w.history.len() + k < 8 => {
                    ensure!(
                        !oracle.consistent,
                        "seed {seed}: witness at k = {k} not seen by brute force"
                    )
                }
                Some(_) => {}
            }
            if v.is_k_markov {
                markov += 1;
            }
        }
        let weights = random_irreducible(seed);
        let once = check(stochasticize(&weights))?;
        let twice = check(stochasticize(once.matrix.matrix()))?;
        ensure!(
            twice.matrix == once.matrix,
            "seed {seed}: stochasticize is not idempotent"
        );
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!(
        "{} instances, {markov} k-step verdicts, in {:?}",
        seeds.count(),
        start.elapsed()
    ))
}

fn wps_contradiction() -> Outcome {
    let model = load("semigroup_wps");
    let (_, code) = check(model.code(None))?;
    let cs = check(CodeStructure::new(
        &code.code,
        &model.spaces["X"],
        Some(&model.spaces["Y"]),
    ))?;
    let mu = &model.measures["mu"].measure;
    let ctx = check(DecisionContext::new(&code.code, mu))?;
    let candidate = check(decide_kstep(&ctx, 1))?;
    let nu = check(candidate.candidate_measure(cs.y().alphabet()))?;
    let result = check(soficlab::wps_lift_check(
        &cs,
        mu,
        &nu,
        10,
        Comparison::Tolerance(1e-9),
    ))?;
    ensure!(
        !result.consistent,
        "no wps mismatch on {} cycles",
        result.cycles_checked
    );
    let cycle = result.witness.unwrap();
    Ok(format!(
        "wps mismatch on cycle {} after {} cycles",
        cs.x().alphabet().format_word(&cycle),
        result.cycles_checked
    ))
}

fn main() -> ExitCode {
    let mut results: Vec<(String, Outcome)> = vec![
        ("1".into(), blackwell_thirds()),
        ("2".into(), blackwell_halves()),
        ("3".into(), lifting()),
        ("4".into(), preimages()),
        ("5".into(), bounds()),
        ("6".into(), module_invariance()),
        ("7".into(), round_trip()),
        ("8".into(), thermodynamics()),
    ];
    results.extend(compensation());
    results.push(("10".into(), properties()));
    results.push(("11".into(), wps_contradiction()));
    let mut failed = 0;
    for (id, outcome) in &results {
        match outcome {
            Ok(detail) => println!("criterion {id:>3}: PASS  {detail}"),
            Err(detail) => {
                failed += 1;
                println!("criterion {id:>3}: FAIL  {detail}");
            }
        }
    }
    println!("{} passed, {failed} failed", results.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
