use std::time::Instant;

use anyhow::bail;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::json;

use schur_cyclic::algebra::{ExtensionCtx, FieldCtx, FqElem, Poly};
use schur_cyclic::cyclic::{gcd_square_generator, subfield_subcode, Closure, CyclicCodeSpec};
use schur_cyclic::cyclotomic::all_coset_unions;
use schur_cyclic::linear::{DistanceBudget, GeneratorMatrix};
use schur_cyclic::restricted::{
    construct_restricted, special_low_weight_word, table, wqs, ParamTable, RwParams,
};

use crate::report::{CheckOutcome, RunReport};
use crate::Global;

const SUITES: [&str; 4] = ["theorem1", "srw", "tables", "distances"];

/// Reference rows for (s, m) = (3, 1) and (5, 2): (k, n, dim C, d(C) >=, dim C^2, d(C^2) >=).
const TABLE_1: [(u32, u64, u64, u64, u64, u64); 10] = [
    (3, 7, 4, 3, 7, 1),
    (4, 15, 5, 7, 11, 3),
    (5, 31, 6, 15, 16, 7),
    (6, 63, 10, 27, 37, 9),
    (7, 127, 15, 55, 71, 19),
    (8, 255, 21, 111, 123, 39),
    (9, 511, 31, 219, 232, 73),
    (10, 1023, 46, 439, 441, 147),
    (11, 2047, 67, 879, 804, 295),
    (12, 4095, 98, 1755, 1475, 585),
];

const TABLE_2: [(u32, u64, u64, u64, u64, u64); 8] = [
    (5, 31, 16, 7, 31, 1),
    (6, 63, 22, 15, 57, 3),
    (7, 127, 29, 31, 99, 7),
    (8, 255, 45, 63, 223, 9),
    (9, 511, 76, 119, 430, 19),
    (10, 1023, 126, 231, 863, 33),
    (11, 2047, 210, 463, 1695, 67),
    (12, 4095, 338, 927, 3293, 135),
];

const SAMPLED_PAIRS: u64 = 1_000_000;

pub fn run(
    argv: Vec<String>,
    g: &Global,
    suite: &str,
    n: Option<usize>,
    k: Option<u32>,
) -> anyhow::Result<RunReport> {
    let suites: Vec<&str> = match suite {
        "all" => SUITES.to_vec(),
        s if SUITES.contains(&s) => vec![s],
        other => bail!("unknown suite {other:?}; expected one of theorem1, srw, tables, distances, all"),
    };
    let mut report = RunReport::new(argv, json!({ "suite": suite, "n": n, "k": k, "global": g }));
    for name in suites {
        let t = Instant::now();
        let outcome = match name {
            "theorem1" => square_oracles(n)?,
            "srw" => srw(k, g, &mut report.seeds)?,
            "tables" => tables(g.exhaustive_cap)?,
            _ => distances(g.exhaustive_cap)?,
        };
        report.timings_us.push((name.into(), t.elapsed().as_micros() as u64));
        report.checks.extend(outcome);
    }
    Ok(report)
}

fn outcome(name: String, cases: u64, failure: Option<String>) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: failure.is_none(),
        cases,
        detail: failure,
    }
}

fn code_of_generator(g: &Poly, n: usize) -> anyhow::Result<GeneratorMatrix> {
    let Some(deg) = g.degree() else { bail!("zero generator") };
    let coeffs = g.to_vec(n);
    let rows = (0..n - deg).map(|i| {
        let mut r = vec![FqElem::ZERO; n];
        r[i..].copy_from_slice(&coeffs[..n - i]);
        r
    });
    Ok(GeneratorMatrix::from_rows(g.field().clone(), n, rows)?)
}

/// Schur-square rank, the subfield subcode of the negated sumset and the gcd
/// generator must all give the same code, for every coset union.
fn square_oracles(n: Option<usize>) -> anyhow::Result<Vec<CheckOutcome>> {
    let lengths = match n {
        Some(n) => vec![n],
        None => vec![7, 15, 31],
    };
    let gf2 = FieldCtx::prime(2)?;
    let mut out = Vec::new();
    for n in lengths {
        if n % 2 == 0 || n < 1 {
            bail!("theorem1 needs an odd length, got {n}");
        }
        let ext = ExtensionCtx::new(gf2.clone(), n)?;
        let cosets = schur_cyclic::cyclotomic::all_cosets(2, n).len();
        if cosets > 12 {
            bail!("n = {n} has {cosets} cosets; at most 12 (4096 unions) are supported");
        }
        let sets = all_coset_unions(2, n);
        // Results are indexed so the first counterexample is deterministic.
        let first_bad = sets
            .par_iter()
            .enumerate()
            .filter_map(|(i, set)| {
                let check = || -> anyhow::Result<bool> {
                    let c = CyclicCodeSpec::from_generating_set(ext.clone(), set, Closure::Require)?;
                    let schur = c.generator_matrix().schur_square();
                    let sum = set.sumset(set)?;
                    let subcode = subfield_subcode(&ext, &sum.negate())?;
                    let by_gcd = code_of_generator(&gcd_square_generator(&c), n)?;
                    Ok(schur == subcode && schur == by_gcd)
                };
                match check() {
                    Ok(true) => None,
                    Ok(false) => Some((i, format!("n = {n}, I = {:?}: oracles disagree", set.members()))),
                    Err(e) => Some((i, format!("n = {n}, I = {:?}: {e}", set.members()))),
                }
            })
            .min_by_key(|(i, _)| *i)
            .map(|(_, msg)| msg);
        out.push(outcome(format!("theorem1 n={n}"), sets.len() as u64, first_bad));
    }
    Ok(out)
}

/// Subadditivity of the restricted weight over Z/(2^k - 1), every window length.
fn srw(k: Option<u32>, g: &Global, seeds: &mut Vec<u64>) -> anyhow::Result<Vec<CheckOutcome>> {
    let ks: Vec<u32> = match k {
        Some(k) => vec![k],
        None => (1..=9).collect(),
    };
    let mut out = Vec::new();
    for k in ks {
        if !(1..=32).contains(&k) {
            bail!("srw needs 1 <= k <= 32, got {k}");
        }
        let n = (1u64 << k) - 1;
        let exhaustive = 2 * k <= g.exhaustive_cap;
        if !exhaustive && k > 24 {
            bail!("srw at k = {k} needs a weight table of 2^{k} entries; at most k = 24 is supported");
        }
        let mut cases = 0;
        let mut first_bad = None;
        for s in 1..=k {
            let w: Vec<u64> = (0..n).into_par_iter().map(|t| wqs(t, 2, k, s)).collect();
            let violates = |t: u64, u: u64| w[((t + u) % n) as usize] > w[t as usize] + w[u as usize];
            let bad = if exhaustive {
                cases += n * n;
                (0..n)
                    .into_par_iter()
                    .filter_map(|t| (0..n).find(|&u| violates(t, u)).map(|u| (t, u)))
                    .min()
            } else {
                let seed = g.seed ^ ((k as u64) << 8 | s as u64);
                seeds.push(seed);
                cases += SAMPLED_PAIRS;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..SAMPLED_PAIRS)
                    .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
                    .find(|&(t, u)| violates(t, u))
            };
            if let (Some((t, u)), None) = (bad, &first_bad) {
                first_bad = Some(format!(
                    "k = {k}, s = {s}: w({}) = {} > w({t}) + w({u}) = {}",
                    (t + u) % n,
                    w[((t + u) % n) as usize],
                    w[t as usize] + w[u as usize]
                ));
            }
        }
        let mode = if exhaustive { "exhaustive" } else { "sampled" };
        out.push(outcome(format!("srw k={k} ({mode})"), cases, first_bad));
    }
    Ok(out)
}

/// Both parameter tables against the reference rows, with dim C^2 re-derived
/// from the rank of the product rows.
fn tables(cap: u32) -> anyhow::Result<Vec<CheckOutcome>> {
    let mut out = Vec::new();
    for (which, reference) in [(ParamTable::T1, &TABLE_1[..]), (ParamTable::T2, &TABLE_2[..])] {
        let (s, m) = which.params();
        let kmax = reference.last().expect("nonempty").0;
        let rows = table(which, s..=kmax, cap)?;
        let mut first_bad = None;
        for (row, &(k, n, dc, d, dsq, dh)) in rows.iter().zip(reference) {
            let want = (n, dc, d, dsq, dh);
            if row.k != k || row.numbers() != want {
                first_bad.get_or_insert(format!("k = {k}: got {:?}, expected {want:?}", row.numbers()));
                continue;
            }
            let p = RwParams::new(2, k, s, m)?;
            let (spec, _) = construct_restricted(&p, false, cap)?;
            let rank = spec.generator_matrix().schur_square().dim() as u64;
            if rank != dsq {
                first_bad.get_or_insert(format!("k = {k}: square rank {rank}, expected {dsq}"));
            }
        }
        let name = format!("tables {}", if which == ParamTable::T1 { "t1" } else { "t2" });
        out.push(outcome(name, rows.len() as u64, first_bad));
    }
    Ok(out)
}

/// Exact distances of the smallest table codes, and the low-weight square
/// words that make the k = 6 and k = 10 square bounds tight.
fn distances(cap: u32) -> anyhow::Result<Vec<CheckOutcome>> {
    let budget = DistanceBudget {
        exhaustive_cap_bits: cap,
        ..DistanceBudget::default()
    };
    let mut cases = 0;
    let mut first_bad = None;
    let expected = [(3u32, Some(3usize), Some(1usize)), (4, Some(7), Some(3)), (5, Some(15), None)];
    for (k, d_c, d_csq) in expected {
        let p = RwParams::new(2, k, 3, 1)?;
        let (c, _) = construct_restricted(&p, false, cap)?;
        for (which, want, gm) in [
            ("d(C)", d_c, c.generator_matrix()),
            ("d(C^2)", d_csq, c.square().generator_matrix()),
        ] {
            let Some(want) = want else { continue };
            cases += 1;
            let d = gm.min_distance(&budget)?;
            if !d.exact || d.value != want {
                first_bad.get_or_insert(format!(
                    "k = {k}: {which} = {} (exact: {}), expected {want}",
                    d.value, d.exact
                ));
            }
        }
    }
    for (k, s, m) in [(6u32, 3u32, 1u32), (10, 5, 2)] {
        cases += 1;
        let p = RwParams::new(2, k, s, m)?;
        let (_, row) = construct_restricted(&p, false, cap)?;
        let w = special_low_weight_word(k, s)?;
        if !w.in_square || w.weight as u64 != row.d_csq_lower {
            first_bad.get_or_insert(format!(
                "k = {k}, s = {s}: witness of weight {} (in square: {}), bound {}",
                w.weight, w.in_square, row.d_csq_lower
            ));
        }
    }
    Ok(vec![outcome("distances".into(), cases, first_bad)])
}
