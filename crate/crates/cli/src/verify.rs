use std::sync::Arc;

use anyhow::Result;
use heisenberg_packets::char_theory::{induce, inner_product, irreducible_characters, lagrangian_characters, restrict};
use heisenberg_packets::local::ps_distinction_check;
use heisenberg_packets::packets::multiplicity;
use heisenberg_packets::projective::{regular_representations, EquivalenceContext};
use heisenberg_packets::{FiniteGroup, Lagrangian, PsData, SigmaAction, Subgroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub primes: Vec<u64>,
    pub checks: Vec<CheckResult>,
}

fn random_data(rng: &mut ChaCha8Rng) -> Result<PsData> {
    let p = [3u64, 5, 7][rng.gen_range(0..3)];
    let n = rng.gen_range(0..=7);
    let offsets = (0..n).map(|_| rng.gen_range(0..p)).collect();
    let action = if rng.gen_bool(0.5) {
        SigmaAction { scale: if rng.gen_bool(0.5) { 1 } else { p - 1 }, shift: 0 }
    } else {
        SigmaAction { scale: rng.gen_range(0..p), shift: rng.gen_range(0..p) }
    };
    let flags = (0..p).map(|_| rng.gen_bool(0.5)).collect();
    Ok(PsData::new(p, offsets, action, flags)?)
}

/// Tries every pairing of the indices.
fn search(data: &PsData, used: &mut [bool]) -> bool {
    let p = data.p;
    let f = |k: u64| (data.sigma_action.scale * k + data.sigma_action.shift) % p;
    let Some(i) = used.iter().position(|u| !u) else {
        return true;
    };
    used[i] = true;
    let k = data.offsets[i];
    if f(k) == k && data.restriction_trivial[k as usize] && search(data, used) {
        used[i] = false;
        return true;
    }
    for j in i + 1..used.len() {
        if !used[j] && data.offsets[j] == f(k) && f(data.offsets[j]) == k {
            used[j] = true;
            let ok = search(data, used);
            used[j] = false;
            if ok {
                used[i] = false;
                return true;
            }
        }
    }
    used[i] = false;
    false
}

fn ps_check(seed: u64, cases: usize) -> Result<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = 0;
    let mut positives = 0;
    for _ in 0..cases {
        let data = random_data(&mut rng)?;
        let fast = ps_distinction_check(&data);
        if fast != search(&data, &mut vec![false; data.offsets.len()]) {
            mismatches += 1;
        }
        positives += fast as usize;
    }
    Ok(CheckResult {
        name: "principal series matching vs exhaustive pairing".into(),
        passed: mismatches == 0,
        detail: format!("{cases} cases, {positives} distinguished, {mismatches} mismatches"),
    })
}

fn strong_classes(g: &Arc<FiniteGroup>) -> Result<CheckResult> {
    let reps: Vec<_> = regular_representations(g)?.into_iter().map(|(_, r)| r).collect();
    let ctx = EquivalenceContext::new(g);
    let count = ctx.count_strong_classes_in_weak_class(&reps)? as u64;
    let m = multiplicity(g);
    let mut weak = true;
    for a in &reps {
        for b in &reps {
            weak &= ctx.weakly_equivalent(a, b)?;
        }
    }
    Ok(CheckResult {
        name: format!("{}: strong classes in the regular weak class", g.name()),
        passed: count == m && weak,
        detail: format!("counted {count}, m(n)=∏(p_i−1)={m}, all weakly equivalent: {weak}"),
    })
}

fn reciprocity(g: &Arc<FiniteGroup>) -> Result<CheckResult> {
    let irr = irreducible_characters(g)?;
    let mut pairs = 0;
    let mut failures = 0;
    for which in [Lagrangian::A0, Lagrangian::B0] {
        let lag = Arc::new(Subgroup::lagrangian(g, which));
        let restricted = irr.iter().map(|i| restrict(&i.character, &lag)).collect::<Result<Vec<_>, _>>()?;
        for (_, chi) in lagrangian_characters(&lag)? {
            let ind = induce(&lag, &chi)?;
            for (psi, res) in irr.iter().zip(&restricted) {
                if inner_product(&ind, &psi.character)? != inner_product(&chi, res)? {
                    failures += 1;
                }
                pairs += 1;
            }
        }
    }
    Ok(CheckResult {
        name: format!("{}: Frobenius reciprocity on both Lagrangians", g.name()),
        passed: failures == 0,
        detail: format!("{pairs} pairs, {failures} failures"),
    })
}

pub fn run(primes: &[u64], seed: u64, cases: usize) -> Result<VerifyReport> {
    let mut checks = vec![ps_check(seed, cases)?];
    let mut singles: Vec<u64> = primes.to_vec();
    singles.sort_unstable();
    singles.dedup();
    for &p in &singles {
        let g = Arc::new(FiniteGroup::heisenberg(p)?);
        checks.push(strong_classes(&g)?);
        checks.push(reciprocity(&g)?);
    }
    if primes.len() > 1 {
        checks.push(strong_classes(&Arc::new(FiniteGroup::from_primes(primes)?))?);
    }
    Ok(VerifyReport { seed, primes: primes.to_vec(), checks })
}
