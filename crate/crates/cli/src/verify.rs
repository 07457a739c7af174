//! Verification suites: reference counts, property checks and oracle agreement.

use crate::CliResult;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::collections::BTreeSet;
use titsweyl::oracle::family_for_model;
use titsweyl::{
    builtin_family, closure_check, compare_with_spectrum, enumerate_primes, enumerate_primes_brute, find_isomorphism,
    from_selector, hom_count, induced_weyl_law, model_rank_space, realizable_patterns_charts, sobriety_check, spectrum,
    symmetric_group, tits_points, verify_witnesses, Boolean, Entailment, GroupModel, Monomial, Naturals, OracleConfig,
    PrimePoint, Relation, Semiring, Tropical, ZMod,
};

/// One check with expected and actual values.
#[derive(Serialize, Debug)]
pub struct Check {
    pub name: String,
    pub expected: Value,
    pub actual: Value,
    pub pass: bool,
}

fn check<T: Serialize + PartialEq>(out: &mut Vec<Check>, name: impl Into<String>, expected: T, actual: T) {
    let pass = expected == actual;
    out.push(Check { name: name.into(), expected: json!(expected), actual: json!(actual), pass });
}

fn factorial(n: usize) -> usize {
    (1..=n).product()
}

fn model(sel: &str) -> CliResult<GroupModel> {
    Ok(from_selector(sel)?)
}

/// Golden counts of the catalog.
pub fn golden_counts(cap: usize, full: bool) -> CliResult<Vec<Check>> {
    let mut out = Vec::new();
    let g = model("sl:2")?;
    let s = spectrum(&g.presentation, cap)?;
    let labels: BTreeSet<String> = s.points.iter().map(|p| p.label(&g.presentation.names)).collect();
    let want: BTreeSet<String> =
        ["(∅)", "(T1)", "(T2)", "(T3)", "(T4)", "(T1,T4)", "(T2,T3)"].iter().map(|x| x.to_string()).collect();
    check(&mut out, "sl:2 spectrum", want, labels);
    for n in 2..=4 {
        let g = model(&format!("sl:{n}"))?;
        let rs = model_rank_space(&g, cap)?;
        check(&mut out, format!("sl:{n} rank"), n - 1, rs.rank());
        check(&mut out, format!("sl:{n} rank points"), factorial(n), rs.points.len());
        let w = induced_weyl_law(&g, &rs)?;
        check(&mut out, format!("sl:{n} weyl is a group"), true, w.is_group());
        check(&mut out, format!("sl:{n} weyl isomorphic to S_{n}"), true, find_isomorphism(&w.table, &symmetric_group(n).1).is_some());
        let t1 = tits_points(&g, &rs, &w, 1)?;
        check(&mut out, format!("sl:{n} tits points m=1"), factorial(n) / 2, t1.count());
        check(&mut out, format!("sl:{n} tits points m=1 closed"), true, t1.table.is_some());
        let t2 = tits_points(&g, &rs, &w, 2)?;
        check(&mut out, format!("sl:{n} tits points m=2"), (1 << (n - 1)) * factorial(n), t2.count());
    }
    for n in 2..=3 {
        let g = model(&format!("gl:{n}"))?;
        let rs = model_rank_space(&g, cap)?;
        let w = induced_weyl_law(&g, &rs)?;
        check(&mut out, format!("gl:{n} rank"), n, rs.rank());
        check(&mut out, format!("gl:{n} weyl order"), factorial(n), w.order());
        let t2 = tits_points(&g, &rs, &w, 2)?;
        check(&mut out, format!("gl:{n} tits points m=2"), (1 << n) * factorial(n), t2.count());
    }
    let mut classical = vec![("sp:4", 8usize), ("so:3", 2), ("so:4", 4), ("o:4", 8)];
    if full {
        classical.push(("so:5", 8));
    }
    for (sel, order) in classical {
        let g = model(sel)?;
        let rs = model_rank_space(&g, cap)?;
        let w = induced_weyl_law(&g, &rs)?;
        check(&mut out, format!("{sel} weyl order"), order, w.order());
        check(&mut out, format!("{sel} weyl is a group"), true, w.is_group());
    }
    for (sel, points) in [("psl2-conj", 7usize), ("psl2-adj", 13)] {
        let g = model(sel)?;
        let s = spectrum(&g.presentation, cap)?;
        check(&mut out, format!("{sel} points"), points, s.points.len());
        let rs = model_rank_space(&g, cap)?;
        check(&mut out, format!("{sel} rank points"), vec![1usize, 1], rs.points.iter().map(|p| p.rank).collect());
    }
    let g = model("nstorus")?;
    let s = spectrum(&g.presentation, cap)?;
    check(&mut out, "nstorus points", 2, s.points.len());
    let rs = model_rank_space(&g, cap)?;
    check(&mut out, "nstorus rank points", vec!["(∅)".to_string()], rs.labels());
    let g = model("unipotent:3:1,1,1")?;
    let rs = model_rank_space(&g, cap)?;
    check(&mut out, "unipotent:3:1,1,1 rank points", 1, rs.points.len());
    Ok(out)
}

/// Models of the property suite.
pub const PROPERTY_MODELS: &[&str] = &[
    "sl:2",
    "sl:3",
    "gl:2",
    "gl:3",
    "torus:2",
    "const:z2",
    "const:z3",
    "nstorus",
    "unipotent:3:1,1,1",
    "parabolic:3:2,1",
    "sp:2",
    "so:3",
    "psl2-conj",
    "psl2-adj",
];

fn closure<S: Semiring>(out: &mut Vec<Check>, g: &GroupModel, s: &S, seed: u64) -> CliResult<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = closure_check(g, s, 200, &mut rng)?;
    check(out, format!("{} closure over {}", g.name, s.name()), 0, r.failures);
    Ok(())
}

/// Property checks on a list of models.
pub fn properties(cap: usize, budget: usize, seed: u64, models: Option<&[String]>) -> CliResult<Vec<Check>> {
    let list: Vec<String> = match models {
        Some(m) => m.iter().filter(|s| !s.is_empty()).cloned().collect(),
        None => PROPERTY_MODELS.iter().map(|s| s.to_string()).collect(),
    };
    let mut out = Vec::new();
    for sel in &list {
        let g = model(sel)?;
        let b = &g.presentation;
        let s = spectrum(b, cap)?;
        if b.ngens() <= 16 {
            let fast: Vec<PrimePoint> = enumerate_primes(b, cap)?;
            let slow = enumerate_primes_brute(b);
            let key = |v: &[PrimePoint]| v.iter().map(|p| p.vars).collect::<BTreeSet<_>>();
            check(&mut out, format!("{sel} primes match subset scan"), key(&slow).len(), key(&fast).len());
            check(&mut out, format!("{sel} primes identical to subset scan"), true, key(&slow) == key(&fast));
        }
        let sober = if s.points.len() <= 2000 { sobriety_check(&s.space()) } else { s.is_sober() };
        check(&mut out, format!("{sel} sober"), true, sober);
        if sel == "sl:2" || sel == "sl:3" {
            closure(&mut out, &g, &Naturals, seed)?;
            closure(&mut out, &g, &Boolean, seed)?;
            closure(&mut out, &g, &Tropical, seed)?;
        }
        if sel == "sl:2" {
            check(&mut out, "sl:2 points over F2", 6, hom_count(&g, &ZMod(2), 1 << 20)?);
            let n = b.ngens();
            // T1*T4*T2 ≡ T2^2*T3 + T2
            let r = Relation::new(
                vec![Monomial::new(0, vec![1, 1, 0, 1])],
                vec![Monomial::new(0, vec![0, 2, 1, 0]), Monomial::var(n, 1)],
            );
            check(&mut out, "sl:2 entails T2·(relation)", "yes", entailment(b.relation_entailed(&r, budget.min(3))));
            let r = Relation::new(vec![Monomial::var(n, 0)], vec![Monomial::var(n, 1)]);
            check(&mut out, "sl:2 does not entail T1 ≡ T2", "unknown", entailment(b.relation_entailed(&r, budget)));
        }
    }
    Ok(out)
}

fn entailment(e: Entailment) -> &'static str {
    match e {
        Entailment::Yes => "yes",
        Entailment::Unknown => "unknown",
    }
}

/// Oracle patterns against spectra for the models with built-in families.
pub fn oracle(cap: usize, seed: u64, samples: Option<usize>) -> CliResult<Vec<Check>> {
    let mut cfg = OracleConfig { seed, ..OracleConfig::default() };
    if let Some(s) = samples {
        cfg.samples = s.max(1);
    }
    let mut out = Vec::new();
    for sel in ["sl:2", "psl2-conj", "psl2-adj"] {
        let g = model(sel)?;
        let charts = builtin_family(family_for_model(sel).expect("built-in")).expect("built-in");
        let r = realizable_patterns_charts(&charts, &cfg);
        let s = spectrum(&g.presentation, cap)?;
        let cmp = compare_with_spectrum(&g, &s, &r)?;
        check(&mut out, format!("{sel} witnesses re-evaluate"), true, verify_witnesses(&charts, &r));
        check(&mut out, format!("{sel} patterns"), s.points.len(), r.patterns.len());
        check(&mut out, format!("{sel} missing points"), Vec::<String>::new(), cmp.missing);
        check(&mut out, format!("{sel} extra patterns"), Vec::<String>::new(), cmp.extra);
        if sel == "psl2-adj" {
            let names = &g.presentation.names;
            let only2: BTreeSet<String> = r
                .patterns
                .iter()
                .filter(|(_, e)| e.characteristics.iter().all(|&c| c == 2))
                .map(|(&b, _)| PrimePoint { vars: titsweyl::oracle::pattern_generators(&g, b).expect("matrix model") }.label(names))
                .collect();
            let want: BTreeSet<String> = [
                "(T21,T23)",
                "(T11,T12,T21,T23)",
                "(T12,T13,T21,T23)",
                "(T21,T23,T31,T32)",
                "(T21,T23,T32,T33)",
            ]
            .iter()
            .map(|x| x.to_string())
            .collect();
            check(&mut out, "psl2-adj characteristic-2 points", want, only2);
        }
    }
    Ok(out)
}
