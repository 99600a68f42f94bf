//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each, and exits non-zero
//! if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::{Duration, Instant};

use heisenberg_packets::char_theory::{
    column_sums, decompose_on_lagrangian, gram_matrix, induce, inner_product, irreducible_characters,
    lagrangian_characters, regular_irreducible, restrict,
};
use heisenberg_packets::local::{everywhere_locally_distinguished, ps_distinction_check};
use heisenberg_packets::packets::{distinguished_packets, enumerate_packets, multiplicity, period_vanishing_table};
use heisenberg_packets::projective::{
    regular_representations, weakly_equivalent_by_polynomials, EquivalenceContext, MonomialRep,
};
use heisenberg_packets::types::{derivative_type, is_speh_type, type_of};
use heisenberg_packets::{
    CentralCharacter, ClassFunction, Cyclotomic, FactorIrrep, FiniteGroup, FormalGL, GroupInvolution,
    InvolutionKind, Lagrangian, LocalPlace, Modulus, PacketLabel, Subgroup,
};
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{brute_force_class_sizes, brute_force_ps, frobenius_induce, prime_root, random_ps_data, rational};

type Check = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn group(primes: &[u64]) -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_primes(primes).expect("valid primes"))
}

fn involution(g: &Arc<FiniteGroup>, kind: InvolutionKind) -> GroupInvolution {
    GroupInvolution::new(g, kind).expect("built-in involution")
}

fn label(primes: &[u64], e: &[u64]) -> PacketLabel {
    PacketLabel::new(CentralCharacter::new(primes, e).unwrap()).unwrap()
}

fn character_suite(p: u64) -> Check {
    let start = Instant::now();
    let g = group(&[p]);
    let classes = g.classes();
    let irr = irreducible_characters(&g).map_err(|e| e.to_string())?;
    let chars: Vec<ClassFunction> = irr.iter().map(|i| i.character.clone()).collect();
    let gram = gram_matrix(&chars).map_err(|e| e.to_string())?;
    let cols = column_sums(&chars).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();

    let expected_classes = (p * p + p - 1) as usize;
    ensure!(classes.len() == expected_classes, "H_{p}: {} classes", classes.len());
    let mut sizes = classes.sizes.clone();
    sizes.sort_unstable();
    ensure!(sizes == brute_force_class_sizes(&[p]), "H_{p}: class sizes differ from brute force");
    ensure!(irr.len() == expected_classes, "H_{p}: {} irreducibles", irr.len());

    let degrees: Vec<_> = chars.iter().map(|c| c.degree().to_rational().unwrap()).collect();
    let ones = degrees.iter().filter(|d| d.is_one()).count() as u64;
    let big = degrees.iter().filter(|d| **d == rational(p as i64)).count() as u64;
    ensure!(ones == p * p && big == p - 1, "H_{p}: degree multiset {ones} ones, {big} of degree {p}");
    let degree_sum: num_rational::BigRational = degrees.iter().map(|d| d * d).sum();
    ensure!(degree_sum == rational((p * p * p) as i64), "H_{p}: degree sum {degree_sum}");

    for (i, row) in gram.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            ensure!(*v == rational((i == j) as i64), "H_{p}: <chi_{i}, chi_{j}> = {v}");
        }
    }
    for r in 0..classes.len() {
        for s in 0..classes.len() {
            let expect = if r == s { (g.order() / classes.sizes[r]) as i64 } else { 0 };
            ensure!(cols[r][s].to_rational() == Some(rational(expect)), "H_{p}: column sum ({r},{s})");
        }
    }
    // row orthogonality again, summed element by element
    let modulus = chars[0].modulus().clone();
    for (i, a) in chars.iter().enumerate() {
        for (j, b) in chars.iter().enumerate() {
            let mut sum = Cyclotomic::zero(&modulus);
            for x in 0..g.order() {
                sum += &(a.value_at(x).unwrap() * &b.value_at(x).unwrap().conj());
            }
            ensure!(
                sum.to_rational() == Some(rational(if i == j { g.order() as i64 } else { 0 })),
                "H_{p}: elementwise orthogonality ({i},{j})"
            );
        }
    }
    // induced characters against the Frobenius formula summed over all of G
    for i in irr.iter() {
        let FactorIrrep::Regular { e } = i.label[0] else { continue };
        for &rep in &classes.reps {
            let t = g.triples(rep);
            let oracle = frobenius_induce(&g, |x| x[0].0 == 0, |x| prime_root(&modulus, p, e * x[0].2), (p * p) as usize, &t);
            ensure!(i.character.value_at(rep).unwrap() == &oracle, "H_{p}: induced value at {}", g.element(rep));
        }
    }
    ensure!(elapsed < Duration::from_secs(5), "H_{p}: {elapsed:?} exceeds 5 s");
    Ok(format!("H_{p}: {} classes, degrees 1^{ones} {p}^{big}, sum {degree_sum}, {elapsed:.2?}", classes.len()))
}

fn criterion_1() -> Check {
    let a = character_suite(3)?;
    let b = character_suite(5)?;
    Ok(format!("{a}; {b}"))
}

fn regular_models(g: &Arc<FiniteGroup>) -> Vec<MonomialRep> {
    regular_representations(g).unwrap().into_iter().map(|(_, r)| r).collect()
}

fn criterion_2() -> Check {
    let mut notes = Vec::new();
    for (primes, expected) in [(&[3u64][..], 2usize), (&[5], 4), (&[3, 3], 4), (&[3, 5], 8)] {
        let start = Instant::now();
        let g = group(primes);
        let reps = regular_models(&g);
        let count = EquivalenceContext::new(&g)
            .count_strong_classes_in_weak_class(&reps)
            .map_err(|e| e.to_string())?;
        let elapsed = start.elapsed();
        let formula: u64 = primes.iter().map(|p| p - 1).product();
        ensure!(count == expected && count as u64 == formula, "{}: counted {count}, formula {formula}", g.name());
        ensure!(multiplicity(&g) == formula, "{}: multiplicity() disagrees", g.name());
        ensure!(elapsed < Duration::from_secs(60), "{}: {elapsed:?} exceeds 60 s", g.name());
        notes.push(format!("{} -> {count} ({elapsed:.2?})", g.name()));
    }
    Ok(notes.join(", "))
}

fn criterion_3() -> Check {
    let mut pairs = 0;
    for p in [3u64, 5] {
        let g = group(&[p]);
        let ctx = EquivalenceContext::new(&g);
        let reps = regular_models(&g);
        ensure!(reps.len() as u64 == p - 1, "H_{p}: {} regular models", reps.len());
        for i in 0..reps.len() {
            for j in i + 1..reps.len() {
                let v = ctx.compare(&reps[i], &reps[j]).map_err(|e| e.to_string())?;
                ensure!(v.weak && !v.strong, "H_{p}: pair ({i},{j}) gave {v:?}");
                ensure!(
                    weakly_equivalent_by_polynomials(&reps[i], &reps[j]).unwrap(),
                    "H_{p}: characteristic polynomials of pair ({i},{j}) are not projectively equal"
                );
                pairs += 1;
            }
        }
    }
    Ok(format!("{pairs} pairs weakly equivalent and strongly inequivalent"))
}

fn criterion_4() -> Check {
    let g = group(&[3]);
    let d = distinguished_packets(&g, &involution(&g, InvolutionKind::InversionType)).map_err(|e| e.to_string())?;
    ensure!(d.len() == 2 && enumerate_packets(&g).len() == 2, "H_3 inversion: {} distinguished", d.len());
    for p in [3u64, 5, 7] {
        let g = group(&[p]);
        let d = distinguished_packets(&g, &involution(&g, InvolutionKind::CentralFixing)).map_err(|e| e.to_string())?;
        ensure!(d.is_empty(), "H_{p} central-fixing: {} distinguished", d.len());
    }
    let g = group(&[3, 3]);
    let d = distinguished_packets(&g, &involution(&g, InvolutionKind::Switching)).map_err(|e| e.to_string())?;
    let expected: Vec<PacketLabel> = enumerate_packets(&g)
        .into_iter()
        .filter(|l| (l.exponents()[0] + l.exponents()[1]) % 3 == 0)
        .collect();
    ensure!(d == expected && d.len() == 2, "H_3xH_3 switching: {:?}", d.iter().map(|l| l.to_string()).collect::<Vec<_>>());
    Ok(format!(
        "H_3 inversion 2/2, central-fixing 0 for p=3,5,7, switching {}",
        d.iter().map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
    ))
}

fn criterion_5() -> Check {
    let g = group(&[3, 3]);
    let s = involution(&g, InvolutionKind::Switching);
    let m = multiplicity(&g);
    let m3 = multiplicity(&group(&[3]));
    let sources = distinguished_packets(&g, &s).map_err(|e| e.to_string())?;
    ensure!(!sources.is_empty(), "no distinguished source");
    for source in &sources {
        let r = period_vanishing_table(source, &s).map_err(|e| e.to_string())?;
        ensure!(r.period_nonvanishing_copies.len() == 2, "source {source}: {} non-vanishing", r.period_nonvanishing_copies.len());
        ensure!(
            r.period_vanishing_copies.len() as u64 == m3 * m3 - m3,
            "source {source}: {} vanishing, expected {}",
            r.period_vanishing_copies.len(),
            m3 * m3 - m3
        );
        ensure!(
            (r.period_vanishing_copies.len() + r.period_nonvanishing_copies.len()) as u64 == m,
            "source {source}: copies do not add up to {m}"
        );
        ensure!(
            r.period_vanishing_copies == vec![label(&[3, 3], &[1, 1]), label(&[3, 3], &[2, 2])],
            "source {source}: wrong vanishing copies"
        );
        ensure!(r.period_nonvanishing_copies.contains(source), "source {source} is not among its own copies");
    }
    ensure!(
        period_vanishing_table(&label(&[3, 3], &[1, 1]), &s).is_err(),
        "a non-distinguished source was accepted"
    );
    Ok(format!("{} sources, 2 non-vanishing and {} vanishing each", sources.len(), m3 * m3 - m3))
}

fn criterion_6() -> Check {
    let mut checked = 0;
    for p in [3u64, 5] {
        let g = group(&[p]);
        let modulus = Modulus::new(g.modulus()).unwrap();
        for which in [Lagrangian::A0, Lagrangian::B0] {
            let lag = Arc::new(Subgroup::lagrangian(&g, which));
            for e in 1..p {
                let chi = CentralCharacter::new(&[p], &[e]).unwrap();
                let rho = regular_irreducible(&g, &chi).map_err(|e| e.to_string())?;
                let res = restrict(&rho, &lag).map_err(|e| e.to_string())?;
                // multiplicity of every character (line l, central c) of L, summed over L here
                for l in 0..p {
                    for c in 0..p {
                        let mut sum = Cyclotomic::zero(&modulus);
                        for &x in lag.members() {
                            let (a, b, z) = g.triples(x)[0];
                            let line = if which == Lagrangian::A0 { b } else { a };
                            let lambda = prime_root(&modulus, p, l * line + c * z);
                            sum += &(res.value_at(x).unwrap() * &lambda.conj());
                        }
                        let m = sum.to_rational().ok_or("non-rational multiplicity")? / rational((p * p) as i64);
                        let expect = rational((c == e) as i64);
                        ensure!(m == expect, "H_{p} {which:?} e={e}: multiplicity of ({l},{c}) is {m}");
                    }
                }
                let dec = decompose_on_lagrangian(&rho, &lag).map_err(|e| e.to_string())?;
                ensure!(dec.has_mackey_shape(), "H_{p} {which:?} e={e}: library decomposition lacks the shape");
                ensure!(dec.base.as_ref().map(|b| b.central.clone()) == Some(vec![e]), "H_{p} {which:?} e={e}: base");
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} restrictions equal chi~ times the p powers of mu~"))
}

fn criterion_7() -> Check {
    for p in [3u64, 5] {
        let g = group(&[p]);
        let s = involution(&g, InvolutionKind::CentralFixing);
        let places = LocalPlace::all();
        ensure!(places.len() == 5, "{} place types", places.len());
        for l in enumerate_packets(&g) {
            let local = everywhere_locally_distinguished(&l, &s, &places).map_err(|e| e.to_string())?;
            ensure!(local, "H_{p} label {l}: not everywhere locally distinguished");
        }
        let global = distinguished_packets(&g, &s).map_err(|e| e.to_string())?;
        ensure!(global.is_empty(), "H_{p}: {} distinguished packets", global.len());
    }
    Ok("H_3, H_5: every label locally distinguished at all 5 place types, none globally".into())
}

fn criterion_8() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0008);
    let mut positives = 0;
    for i in 0..1000 {
        let data = random_ps_data(&mut rng);
        let fast = ps_distinction_check(&data);
        let slow = brute_force_ps(&data);
        ensure!(fast == slow, "instance {i} {data:?}: matching {fast}, brute force {slow}");
        positives += fast as usize;
    }
    Ok(format!("1000 instances agree ({positives} distinguished)"))
}

fn criterion_9() -> Check {
    let start = Instant::now();
    let mut cases = 0;
    for r in 1..=24u64 {
        for d in 1..=24 / r {
            let mut splits = vec![vec![r], vec![1; r as usize]];
            if r > 1 {
                splits.push(vec![r - 1, 1]);
            }
            for sizes in splits {
                let x = FormalGL::speh_of_generic(d, &sizes).map_err(|e| e.to_string())?;
                let t = type_of(&x).map_err(|e| e.to_string())?;
                ensure!(t.parts() == vec![r; d as usize].as_slice(), "Sp({d}, tau of size {r}): type {t}");
                ensure!(is_speh_type(&t) == Some((r, d as usize)), "Sp({d}, tau of size {r}): not detected");
                ensure!(x.adduced_n(d as usize).is_none() && x.adduced_n(d as usize - 1).is_some(), "adduced chain length");
                cases += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0009);
    for _ in 0..500 {
        let n = rng.gen_range(1..=8);
        let text: Vec<String> = (0..n)
            .map(|i| {
                let d = rng.gen_range(1..=5);
                let r = rng.gen_range(1..=4);
                if rng.gen_bool(0.3) {
                    format!("Comp({d},c{i}:{r},a)")
                } else {
                    format!("Sp({d},s{i}:{r})")
                }
            })
            .collect();
        let x: FormalGL = text.join(" * ").parse().map_err(|e: heisenberg_packets::TypeError| e.to_string())?;
        let t = type_of(&x).map_err(|e| e.to_string())?;
        ensure!(t.size() == x.size(), "{x}: size bookkeeping");
        for k in 0..t.len() {
            let lhs = derivative_type(&t, k).map_err(|e| e.to_string())?;
            let rhs = type_of(&x.adduced_n(k).ok_or("adduced chain ended early")?).map_err(|e| e.to_string())?;
            ensure!(lhs == rhs, "{x}: derivative {k} is {lhs}, adduced type {rhs}");
        }
        ensure!(derivative_type(&t, t.len()).is_err(), "{x}: out-of-range derivative accepted");
        ensure!(is_speh_type(&t).is_some() == x.is_speh_power(), "{x}: Speh detection");
    }
    let elapsed = start.elapsed();
    ensure!(elapsed < Duration::from_secs(1), "type suite took {elapsed:?}");
    Ok(format!("{cases} Speh cases, 500 random products, {elapsed:.2?}"))
}

fn criterion_10() -> Check {
    let mut pairs = 0;
    for p in [3u64, 5] {
        let g = group(&[p]);
        let irr = irreducible_characters(&g).map_err(|e| e.to_string())?;
        for which in [Lagrangian::A0, Lagrangian::B0] {
            let lag = Arc::new(Subgroup::lagrangian(&g, which));
            let restricted: Vec<ClassFunction> = irr.iter().map(|i| restrict(&i.character, &lag).unwrap()).collect();
            for (_, chi) in lagrangian_characters(&lag).map_err(|e| e.to_string())? {
                let ind = induce(&lag, &chi).map_err(|e| e.to_string())?;
                for (psi, res) in irr.iter().zip(&restricted) {
                    let lhs = inner_product(&ind, &psi.character).map_err(|e| e.to_string())?;
                    let rhs = inner_product(&chi, res).map_err(|e| e.to_string())?;
                    ensure!(lhs == rhs, "H_{p} {which:?}: <Ind chi, psi> = {lhs} but <chi, Res psi> = {rhs}");
                    pairs += 1;
                }
            }
        }
    }
    Ok(format!("{pairs} pairs satisfy reciprocity exactly"))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Check); 10] = [
        ("character tables of H_3 and H_5", criterion_1),
        ("strong classes in the regular weak class", criterion_2),
        ("weak but not strong equivalence of regular irreducibles", criterion_3),
        ("distinction classification", criterion_4),
        ("period-vanishing table for switching on H_3xH_3", criterion_5),
        ("restriction of regular irreducibles to Lagrangians", criterion_6),
        ("local versus global distinction for central-fixing", criterion_7),
        ("matching criterion against brute-force involutions", criterion_8),
        ("type calculus", criterion_9),
        ("Frobenius reciprocity", criterion_10),
    ];
    let mut failed = BTreeSet::new();
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|panic| {
            let msg = panic
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let elapsed = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} [{elapsed:.2?}]: {detail}", i + 1),
            Err(reason) => {
                println!("criterion {:>2} FAIL  {name} [{elapsed:.2?}]: {reason}", i + 1);
                failed.insert(i + 1);
            }
        }
    }
    if failed.is_empty() {
        println!("acceptance: all {} criteria passed", criteria.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failed criteria {failed:?}");
        ExitCode::FAILURE
    }
}
