//! Independent oracles shared by the integration tests. Nothing here calls the library's group
//! law, class enumeration, induction or matching code; only decoding of element indices is used.

#![allow(dead_code)]

use std::collections::BTreeSet;

use heisenberg_packets::{Cyclotomic, FiniteGroup, Modulus, PsData};
use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;

pub type Triple = (u64, u64, u64);

/// Heisenberg product law on triples, written out directly.
pub fn mul(primes: &[u64], x: &[Triple], y: &[Triple]) -> Vec<Triple> {
    primes
        .iter()
        .zip(x.iter().zip(y))
        .map(|(&p, (&(a, b, c), &(a2, b2, c2)))| ((a + a2) % p, (b + b2) % p, (c + c2 + a * b2) % p))
        .collect()
}

pub fn inv(primes: &[u64], x: &[Triple]) -> Vec<Triple> {
    primes
        .iter()
        .zip(x)
        .map(|(&p, &(a, b, c))| ((p - a) % p, (p - b) % p, ((p - c) % p + a * b) % p))
        .collect()
}

pub fn all_elements(primes: &[u64]) -> Vec<Vec<Triple>> {
    let mut out: Vec<Vec<Triple>> = vec![vec![]];
    for &p in primes {
        let mut next = Vec::new();
        for prefix in &out {
            for a in 0..p {
                for b in 0..p {
                    for c in 0..p {
                        let mut v = prefix.clone();
                        v.push((a, b, c));
                        next.push(v);
                    }
                }
            }
        }
        out = next;
    }
    out
}

/// Sizes of the conjugacy classes, by conjugating every element by every element.
pub fn brute_force_class_sizes(primes: &[u64]) -> Vec<usize> {
    let elements = all_elements(primes);
    let mut seen: BTreeSet<Vec<Triple>> = BTreeSet::new();
    let mut sizes = Vec::new();
    for g in &elements {
        if seen.contains(g) {
            continue;
        }
        let class: BTreeSet<Vec<Triple>> = elements
            .iter()
            .map(|h| mul(primes, &mul(primes, h, g), &inv(primes, h)))
            .collect();
        sizes.push(class.len());
        seen.extend(class);
    }
    sizes.sort_unstable();
    sizes
}

pub fn rational(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// `z_N^{x N/p}`.
pub fn prime_root(modulus: &Modulus, p: u64, x: u64) -> Cyclotomic {
    let n = modulus.value();
    Cyclotomic::root(modulus, (x % p) * (n / p) % n)
}

/// `Ind_K^G(chi)(g) = |K|^-1 sum_{x in G, x^-1 g x in K} chi(x^-1 g x)` over all of `G`.
pub fn frobenius_induce(
    group: &FiniteGroup,
    in_k: impl Fn(&[Triple]) -> bool,
    chi: impl Fn(&[Triple]) -> Cyclotomic,
    k_order: usize,
    g: &[Triple],
) -> Cyclotomic {
    let primes = group.primes();
    let modulus = Modulus::new(group.modulus()).unwrap();
    let mut acc = Cyclotomic::zero(&modulus);
    for x in all_elements(primes) {
        let conj = mul(primes, &mul(primes, &inv(primes, &x), g), &x);
        if in_k(&conj) {
            acc += &chi(&conj);
        }
    }
    acc.scale(&BigRational::new(BigInt::from(1), BigInt::from(k_order as u64)))
}

/// All involutions of `{0, .., n-1}`, as images.
pub fn involutions(n: usize) -> Vec<Vec<usize>> {
    fn go(map: &mut Vec<Option<usize>>, out: &mut Vec<Vec<usize>>) {
        let Some(i) = map.iter().position(Option::is_none) else {
            out.push(map.iter().map(|x| x.unwrap()).collect());
            return;
        };
        map[i] = Some(i);
        go(map, out);
        for j in i + 1..map.len() {
            if map[j].is_none() {
                map[i] = Some(j);
                map[j] = Some(i);
                go(map, out);
                map[j] = None;
            }
        }
        map[i] = None;
    }
    let mut out = Vec::new();
    go(&mut vec![None; n], &mut out);
    out
}

/// Searches every involution `eps` of the index set for one with `k_{eps(i)} = f(k_i)` and
/// restriction-trivial `k_i` whenever `eps(i) = i`.
pub fn brute_force_ps(data: &PsData) -> bool {
    let p = data.p;
    let f = |k: u64| (data.sigma_action.scale * k + data.sigma_action.shift) % p;
    let ks = &data.offsets;
    involutions(ks.len()).iter().any(|eps| {
        (0..ks.len()).all(|i| {
            let j = eps[i];
            ks[j] == f(ks[i]) && (j != i || data.restriction_trivial[ks[i] as usize])
        })
    })
}

/// A random instance with at most 7 offsets. Half the time the offsets are drawn from a small
/// window and the action is a sign change, so that matchable instances are common.
pub fn random_ps_data(rng: &mut impl Rng) -> PsData {
    use heisenberg_packets::SigmaAction;
    let p = [3u64, 5, 7][rng.gen_range(0..3)];
    let n = rng.gen_range(0..=7);
    let structured = rng.gen_bool(0.5);
    let v = rng.gen_range(1..p);
    let window = [0, v, p - v];
    let offsets = (0..n)
        .map(|_| if structured { window[rng.gen_range(0..3)] } else { rng.gen_range(0..p) })
        .collect();
    let sigma_action = if structured {
        SigmaAction {
            scale: if rng.gen_bool(0.5) { 1 } else { p - 1 },
            shift: 0,
        }
    } else {
        SigmaAction {
            scale: rng.gen_range(0..p),
            shift: rng.gen_range(0..p),
        }
    };
    let restriction_trivial = (0..p).map(|_| rng.gen_bool(0.5)).collect();
    PsData::new(p, offsets, sigma_action, restriction_trivial).unwrap()
}
