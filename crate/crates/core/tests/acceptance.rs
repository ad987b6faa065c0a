mod common;

use std::collections::BTreeMap;
use std::process::ExitCode;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use poisson_core::algebra::{rat, ratio, Rational};
use poisson_core::catalog::{build, Sign, StructureId, StructureSpec};
use poisson_core::cohomology::{Frame, WeightSector};
use poisson_core::exec::{map_ordered, ExecMode};
use poisson_core::harness::{run_check, run_specseq, run_verify, Target, VerifyReport};
use poisson_core::multivector::{
    euler_field, koszul, lichnerowicz, wedge, xu_decompose, Multivector,
};
use poisson_core::predict::{
    casimir_lambda4, casimir_lambda8, lemma1_check, package_pages, predict_pages_lambda4,
    standard_witness,
};
use poisson_core::specseq::FilteredSector;

const MODE: ExecMode = ExecMode::Parallel;

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn of(pass: bool, detail: impl Into<String>) -> Self {
        Outcome {
            pass,
            detail: detail.into(),
        }
    }
}

fn l4(a: i64, b: i64) -> StructureSpec {
    StructureSpec::lambda4(rat(a), rat(b))
}

fn l8(b: i64, c: i64, s: Sign) -> StructureSpec {
    StructureSpec::lambda8(rat(b), rat(c), s)
}

const L4_SET: [(i64, i64); 4] = [(1, 1), (1, 2), (2, -1), (1, -2)];

fn l8_set() -> [StructureSpec; 4] {
    [
        l8(1, 1, Sign::Plus),
        l8(1, 1, Sign::Minus),
        l8(-1, 4, Sign::Plus),
        l8(0, 1, Sign::Plus),
    ]
}

fn reports(specs: &[StructureSpec], f: impl Fn(&StructureSpec) -> VerifyReport) -> Outcome {
    let mut checks = 0;
    let mut bad = Vec::new();
    for s in specs {
        let r = f(s);
        checks += r.cells.len();
        if !r.passed() {
            let first = r
                .failures()
                .next()
                .map(|c| format!("{c:?}"))
                .unwrap_or_default();
            bad.push(format!(
                "{s}: {} failed, first {first}",
                r.failures().count()
            ));
        }
    }
    if bad.is_empty() {
        Outcome::of(true, format!("{} structures, {checks} cells", specs.len()))
    } else {
        Outcome::of(false, bad.join("; "))
    }
}

fn identity_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x1d);
    let mut specs = Vec::new();
    for (id, plus) in [
        (StructureId::Lambda4, true),
        (StructureId::Lambda8, true),
        (StructureId::Lambda8, false),
        (StructureId::Lambda11, true),
    ] {
        specs.extend((0..20).map(|_| common::draw_spec(&mut rng, id, plus)));
    }
    reports(&specs, |s| run_check(s, 12, MODE).expect("valid draw"))
}

fn curl_decomposition() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2d);
    let mut specs: Vec<StructureSpec> = (0..10)
        .map(|_| common::draw_spec(&mut rng, StructureId::Lambda4, true))
        .collect();
    specs.extend((0..10).map(|i| common::draw_spec(&mut rng, StructureId::Lambda8, i % 2 == 0)));
    let bad: Vec<String> = specs
        .iter()
        .filter(|s| {
            let l = build(s).expect("valid draw").lambda;
            !matches!(xu_decompose(&l), Ok((k, f)) if &wedge(&k, &euler_field()).scale(&ratio(1, 3)) + &koszul(&f) == l)
        })
        .map(|s| s.to_string())
        .collect();
    Outcome::of(
        bad.is_empty(),
        format!("{} draws; failures {bad:?}", specs.len()),
    )
}

fn e2_closed_form() -> Outcome {
    let specs: Vec<_> = L4_SET.iter().map(|&(a, b)| l4(a, b)).collect();
    reports(&specs, |s| {
        run_verify(s, Target::Prop2, 9, 0, MODE).unwrap()
    })
}

fn h_lambda4() -> Outcome {
    let specs: Vec<_> = L4_SET.iter().map(|&(a, b)| l4(a, b)).collect();
    reports(&specs, |s| {
        run_verify(s, Target::Thm2, 12, 0, MODE).unwrap()
    })
}

fn h_lambda8() -> Outcome {
    reports(&l8_set(), |s| {
        run_verify(s, Target::Thm3, 12, 0, MODE).unwrap()
    })
}

fn filtered(spec: &StructureSpec, t_max: u32) -> Vec<FilteredSector> {
    let st = build(spec).unwrap();
    let frame = Frame::new(&st);
    map_ordered(MODE, (0..=t_max).collect(), |t| {
        FilteredSector::new(WeightSector::build(&st, &frame, t).unwrap()).unwrap()
    })
}

fn page_cells(fss: &[FilteredSector], r: u32) -> BTreeMap<(u32, usize, u32), usize> {
    let mut out = BTreeMap::new();
    for fs in fss {
        for g in 0..4 {
            for p in fs.cell_ps(g) {
                let d = fs.cell(r, g, p).dim();
                if d > 0 {
                    out.insert((fs.t(), g, p), d);
                }
            }
        }
    }
    out
}

fn page_plateaus() -> Outcome {
    let mut notes = Vec::new();
    let mut pass = true;
    for (a, b) in [(1, 1), (2, -1)] {
        let fss = filtered(&l4(a, b), 9);
        let (a, b) = (rat(a), rat(b));
        for n in 1..=3 {
            let pred = predict_pages_lambda4(&a, &b, n, 9).unwrap().dims_by_cell();
            let pages = package_pages(&a, &b, n).unwrap();
            let first = page_cells(&fss, pages[0]);
            let flat = pages.iter().all(|&r| page_cells(&fss, r) == first);
            let matches = first == pred;
            pass &= flat && matches;
            notes.push(format!(
                "({a},{b}) n={n} pages {pages:?} flat={flat} predicted={matches}"
            ));
        }
    }
    Outcome::of(pass, notes.join(", "))
}

fn page_mechanics() -> Outcome {
    let specs = [
        l4(1, 1),
        l4(2, -1),
        l8(1, 1, Sign::Plus),
        StructureSpec::lambda11(rat(1), rat(1)),
    ];
    let mut pass = true;
    let mut compared = 0usize;
    let mut notes = Vec::new();
    for spec in &specs {
        let per = map_ordered(MODE, filtered(spec, 9), |fs| {
            let bound = fs.collapse_bound() + 2;
            let odd_ok = (1..=bound)
                .step_by(2)
                .all(|r| fs.page(r, false).dims() == fs.page(r + 1, false).dims());
            let mut agree = true;
            let mut n = 0usize;
            for r in 1..=bound.div_ceil(2) {
                let dr = fs.page_differential(2 * r);
                for g in 0..3 {
                    for p in fs.cell_ps(g) {
                        if let Some(m) = fs.d2r_via_triangular(r, g, p) {
                            n += 1;
                            agree &= dr[&(g, p)] == m;
                        }
                    }
                }
            }
            (odd_ok, agree, n)
        });
        let odd = per.iter().all(|x| x.0);
        let agree = per.iter().all(|x| x.1);
        let n: usize = per.iter().map(|x| x.2).sum();
        compared += n;
        pass &= odd && agree && n > 0;
        if !(odd && agree) {
            notes.push(format!("{spec}: odd pages {odd}, triangular route {agree}"));
        }
    }
    Outcome::of(
        pass,
        format!(
            "{} structures, {compared} cells via triangular route {notes:?}",
            specs.len()
        ),
    )
}

fn convergence() -> Outcome {
    let mut specs: Vec<_> = L4_SET.iter().map(|&(a, b)| l4(a, b)).collect();
    specs.extend(l8_set());
    specs.push(StructureSpec::lambda11(rat(1), rat(1)));
    specs.push(StructureSpec::lambda11(ratio(2, 3), rat(-1)));
    reports(&specs, |s| {
        run_specseq(s, 9, 0..=0, false, MODE).unwrap().comparison
    })
}

fn casimirs() -> Outcome {
    let mut count = 0;
    let mut bad = Vec::new();
    for (a, b) in [(1, 1), (1, 2)] {
        let st = build(&l4(a, b)).unwrap();
        for i in 0..=3 {
            let c = casimir_lambda4(&rat(a), &rat(b), i)
                .unwrap()
                .expect("positive ratio");
            count += 1;
            if !lichnerowicz(&st.lambda, &Multivector::function(c)).is_zero() {
                bad.push(format!("lambda4({a},{b}) i={i}"));
            }
        }
    }
    for spec in [
        l8(1, 1, Sign::Plus),
        l8(1, 1, Sign::Minus),
        l8(1, 2, Sign::Plus),
        l8(2, 1, Sign::Minus),
    ] {
        let st = build(&spec).unwrap();
        let StructureSpec::Lambda8 { b, c, sign } = &spec else {
            unreachable!()
        };
        for i in 0..=4 {
            if let Some(cas) = casimir_lambda8(b, c, *sign, i).unwrap() {
                count += 1;
                if !lichnerowicz(&st.lambda, &Multivector::function(cas)).is_zero() {
                    bad.push(format!("{spec} i={i}"));
                }
            }
        }
    }
    Outcome::of(
        bad.is_empty() && count > 8,
        format!("{count} Casimirs; failures {bad:?}"),
    )
}

fn coefficient_systems() -> Outcome {
    let (a, b) = (rat(1), rat(1));
    let seed: Vec<Rational> = [2, -1, 3, 5, 7].map(rat).to_vec();
    let mut pass = true;
    let mut notes = Vec::new();
    for i in 0..=3 {
        for c in 0..=2 {
            let w = standard_witness(&a, &b, i, c, &seed).unwrap();
            let good = lemma1_check(&a, &b, &w).unwrap();
            let mut bad = w.clone();
            let slot = match c {
                0 => &mut bad.a,
                1 => &mut bad.b,
                _ => &mut bad.e,
            };
            let broken = slot.len() > 1;
            if broken {
                slot[1] = &slot[1] + rat(1);
            }
            let off = lemma1_check(&a, &b, &bad).unwrap();
            let iff = !broken || (!off.system_holds() && !off.conditions_hold());
            let ok = good.passed() && good.terminal_matches && iff;
            if !ok {
                notes.push(format!("i={i} c={c}: {good:?} / {off:?}"));
            }
            pass &= ok;
        }
    }
    Outcome::of(
        pass,
        format!("12 witnesses and their perturbations {notes:?}"),
    )
}

type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "identity suite, 20 draws per structure, t <= 12",
            "exact zero",
            identity_suite,
        ),
        (
            "curl decomposition, 10 draws each of lambda4 and lambda8",
            "exact equality",
            curl_decomposition,
        ),
        (
            "E2 equals the closed form, t <= 9",
            "exact dims",
            e2_closed_form,
        ),
        (
            "H(lambda4) equals the closed form, t <= 12",
            "exact dims",
            h_lambda4,
        ),
        (
            "H(lambda8) equals the closed form, t <= 12",
            "exact dims",
            h_lambda8,
        ),
        (
            "page plateaus at (1,1) and (2,-1), n = 1..3, t <= 9",
            "exact dims",
            page_plateaus,
        ),
        (
            "odd pages and the triangular route for d_2r, t <= 9",
            "exact matrices",
            page_mechanics,
        ),
        (
            "E_inf = G(H) and sum E_inf = dim H, t <= 9",
            "exact dims",
            convergence,
        ),
        ("Casimir witnesses annihilated", "exact zero", casimirs),
        (
            "coefficient systems solve iff the conditions hold",
            "exact",
            coefficient_systems,
        ),
    ];
    let mut all = true;
    for (i, (name, tol, f)) in criteria.iter().enumerate() {
        let t0 = Instant::now();
        let o = f();
        all &= o.pass;
        println!(
            "{} criterion {:>2}: {name} [tolerance: {tol}] ({:.1}s) {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            t0.elapsed().as_secs_f64(),
            o.detail
        );
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
