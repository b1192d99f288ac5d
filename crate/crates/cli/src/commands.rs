use std::time::Instant;

use anyhow::{bail, Context};
use serde_json::json;

use schur_cyclic::algebra::FieldCtx;
use schur_cyclic::cyclic::{generator_from_code, gcd_square_generator, Closure, CyclicCodeSpec};
use schur_cyclic::cyclotomic::IndexSet;
use schur_cyclic::linear::{DistanceBudget, DistanceMethod};
use schur_cyclic::restricted::{
    build_graph, construct_bch_t, construct_qweight, construct_restricted, table as build_table,
    ParamTable, RwParams, TableRow,
};
use schur_cyclic::Provenance;

use crate::report::{CheckOutcome, Item, RunReport};
use crate::{CodeArgs, Global, TableArg};

pub struct Built {
    pub label: String,
    pub spec: CyclicCodeSpec,
    pub row: Option<TableRow>,
}

/// Resolve the code-selection flags into a code.
pub fn build(code: &CodeArgs, cap: u32) -> anyhow::Result<Built> {
    let q = code.q;
    let built = match code {
        CodeArgs {
            n: Some(n),
            cosets: Some(reps),
            k: None,
            s: None,
            m: None,
            t: None,
            h: None,
            drop_zero: false,
            ..
        } => {
            let field = FieldCtx::of_order(q)?;
            let set = IndexSet::new(*n, q, reps.iter().copied())?;
            let spec = CyclicCodeSpec::over(&field, &set, Closure::Close)?;
            Built {
                label: format!("cosets{reps:?}"),
                spec,
                row: None,
            }
        }
        CodeArgs {
            k: Some(k),
            s: Some(s),
            m: Some(m),
            n: None,
            cosets: None,
            t: None,
            h: None,
            ..
        } => {
            let p = RwParams::new(q, *k, *s, *m)?;
            let (spec, row) = construct_restricted(&p, code.drop_zero, cap)?;
            let z = if code.drop_zero { ",no-0" } else { "" };
            Built {
                label: format!("W(k={k},s={s},m={m}{z})"),
                spec,
                row: Some(row),
            }
        }
        CodeArgs {
            n: Some(n),
            t: Some(t),
            cosets: None,
            k: None,
            s: None,
            m: None,
            h: None,
            drop_zero: false,
            ..
        } => {
            let (spec, row) = construct_bch_t(q, *n, *t)?;
            Built {
                label: format!("bch(n={n},t={t})"),
                spec,
                row: Some(row),
            }
        }
        CodeArgs {
            k: Some(k),
            h: Some(h),
            n: None,
            cosets: None,
            s: None,
            m: None,
            t: None,
            drop_zero: false,
            ..
        } => {
            let (spec, row) = construct_qweight(q, *k, *h, cap)?;
            Built {
                label: format!("qweight(k={k},h={h})"),
                spec,
                row: Some(row),
            }
        }
        _ => bail!(
            "choose one code family: --n --cosets, --k --s --m [--drop-zero], --n --t, or --k --h"
        ),
    };
    Ok(built)
}

fn code_item(label: &str, spec: &CyclicCodeSpec, provenance: Provenance) -> Item {
    Item::Code {
        label: label.into(),
        q: spec.field().size(),
        n: spec.n(),
        dim: spec.dim(),
        generating_set: spec.generating_set().members(),
        generator: spec.generator().to_string(),
        provenance,
    }
}

fn micros(t: Instant) -> u64 {
    t.elapsed().as_micros() as u64
}

/// Whether an exhaustive pass over `q^dim` codewords fits under the cap.
fn fits(q: u64, dim: usize, cap: u32) -> bool {
    (dim as f64) * (q as f64).log2() <= cap as f64
}

pub fn construct(argv: Vec<String>, g: &Global, code: &CodeArgs, verify: bool) -> anyhow::Result<RunReport> {
    let mut report = RunReport::new(argv, json!({ "code": code, "global": g, "verify": verify }));
    let t = Instant::now();
    let Built { label, spec, mut row } = build(code, g.exhaustive_cap)?;
    report.timings_us.push(("construct".into(), micros(t)));
    report.results.push(code_item(&label, &spec, Provenance::Enumeration));
    if spec.is_zero_code() {
        return Ok(report);
    }
    let bounds = spec.bounds()?;
    report.results.push(Item::Bounds {
        label: label.clone(),
        bounds: bounds.clone(),
        provenance: Provenance::BoundOnly,
    });

    if verify {
        let t = Instant::now();
        let gm = spec.generator_matrix();
        let sq = gm.schur_square();
        let agree = gm.dim() == spec.dim() && sq.dim() == bounds.dim_csq;
        report.checks.push(CheckOutcome {
            name: "rank-oracle".into(),
            passed: agree,
            cases: 2,
            detail: (!agree).then(|| {
                format!(
                    "rank {} / {} against |I| = {}, |I+I| = {}",
                    gm.dim(),
                    sq.dim(),
                    spec.dim(),
                    bounds.dim_csq
                )
            }),
        });
        if let Some(r) = row.as_mut() {
            if agree {
                r.dim_c_source = Provenance::RankOracle;
                r.dim_csq_source = Provenance::RankOracle;
            }
        }
        report.timings_us.push(("rank-oracle".into(), micros(t)));

        let q = spec.field().size();
        let budget = DistanceBudget {
            exhaustive_cap_bits: g.exhaustive_cap,
            seed: g.seed,
            ..DistanceBudget::default()
        };
        // The strongest proven bound: amplitude, or the family's own.
        let (row_c, row_sq) = row
            .as_ref()
            .map_or((0, 0), |r| (r.d_c_lower as usize, r.d_csq_lower as usize));
        let targets = [
            ("C", &gm, bounds.d_c_lower.max(row_c)),
            ("C^2", &sq, bounds.d_csq_lower.max(row_sq)),
        ];
        for (which, m, lower) in targets {
            if !fits(q, m.dim(), g.exhaustive_cap) {
                continue;
            }
            let t = Instant::now();
            let d = m.min_distance(&budget)?;
            report.timings_us.push((format!("distance {which}"), micros(t)));
            let ok = d.exact && d.value >= lower;
            report.checks.push(CheckOutcome {
                name: format!("bound {which}"),
                passed: ok,
                cases: 1,
                detail: (!ok).then(|| format!("d({which}) = {} below bound {lower}", d.value)),
            });
            if let Some(r) = row.as_mut() {
                let (bound, src) = if which == "C" {
                    (r.d_c_lower, &mut r.d_c_source)
                } else {
                    (r.d_csq_lower, &mut r.d_csq_source)
                };
                if d.exact && d.value as u64 == bound {
                    *src = Provenance::ExhaustiveDistance;
                }
            }
            report.results.push(Item::Distance {
                label: format!("{label} {which}"),
                result: d,
                provenance: Provenance::ExhaustiveDistance,
            });
        }
    }
    if let Some(row) = row {
        report.results.insert(0, Item::Row { row });
    }
    Ok(report)
}

pub fn square(argv: Vec<String>, g: &Global, code: &CodeArgs) -> anyhow::Result<RunReport> {
    let mut report = RunReport::new(argv, json!({ "code": code, "global": g }));
    let Built { label, spec, .. } = build(code, g.exhaustive_cap)?;
    let t = Instant::now();
    let sq = spec.square();
    report.results.push(code_item(&format!("{label}^2"), &sq, Provenance::Enumeration));
    if !sq.is_zero_code() {
        let b = sq.bounds()?;
        report.results.push(Item::Bounds {
            label: format!("{label}^2"),
            bounds: b,
            provenance: Provenance::BoundOnly,
        });
    }
    report.timings_us.push(("sumset".into(), micros(t)));

    let t = Instant::now();
    let by_gcd = gcd_square_generator(&spec).monic();
    let from_rank = generator_from_code(&spec.generator_matrix().schur_square()).monic();
    let from_set = sq.generator().monic();
    let agree = by_gcd == from_set && from_rank == from_set;
    report.checks.push(CheckOutcome {
        name: "square-generator".into(),
        passed: agree,
        cases: 3,
        detail: (!agree).then(|| format!("gcd {by_gcd}, rank {from_rank}, sumset {from_set}")),
    });
    report.timings_us.push(("oracles".into(), micros(t)));
    Ok(report)
}

pub fn table(
    argv: Vec<String>,
    g: &Global,
    which: TableArg,
    kmin: Option<u32>,
    kmax: u32,
    rank_oracle: bool,
) -> anyhow::Result<RunReport> {
    let family = match which {
        TableArg::T1 => ParamTable::T1,
        TableArg::T2 => ParamTable::T2,
    };
    let (s, m) = family.params();
    let kmin = kmin.unwrap_or(s);
    if kmin > kmax {
        bail!("empty range: kmin = {kmin} > kmax = {kmax}");
    }
    let mut report = RunReport::new(
        argv,
        json!({ "table": which, "kmin": kmin, "kmax": kmax, "rank_oracle": rank_oracle, "global": g }),
    );
    let t = Instant::now();
    let mut rows = build_table(family, kmin..=kmax, g.exhaustive_cap)?;
    report.timings_us.push(("rows".into(), micros(t)));

    if rank_oracle {
        let t = Instant::now();
        let mut bad = None;
        for row in &mut rows {
            let p = RwParams::new(2, row.k, s, m)?;
            let (spec, _) = construct_restricted(&p, false, g.exhaustive_cap)?;
            let rank = spec.generator_matrix().schur_square().dim() as u64;
            if rank == row.dim_csq {
                row.dim_csq_source = Provenance::RankOracle;
            } else if bad.is_none() {
                bad = Some(format!("k = {}: rank {rank}, |W+W| = {}", row.k, row.dim_csq));
            }
        }
        report.checks.push(CheckOutcome {
            name: "rank-oracle".into(),
            passed: bad.is_none(),
            cases: rows.len() as u64,
            detail: bad,
        });
        report.timings_us.push(("rank-oracle".into(), micros(t)));
    }
    report.results.extend(rows.into_iter().map(|row| Item::Row { row }));
    Ok(report)
}

pub fn distance(
    argv: Vec<String>,
    g: &Global,
    code: &CodeArgs,
    square: bool,
    samples: u64,
) -> anyhow::Result<RunReport> {
    let mut report = RunReport::new(
        argv,
        json!({ "code": code, "square": square, "samples": samples, "global": g }),
    );
    let Built { label, spec, .. } = build(code, g.exhaustive_cap)?;
    let (label, target) = if square {
        (format!("{label}^2"), spec.square())
    } else {
        (label, spec)
    };
    if target.is_zero_code() {
        bail!("the zero code has no minimum distance");
    }
    let bounds = target.bounds()?;
    let budget = DistanceBudget {
        exhaustive_cap_bits: g.exhaustive_cap,
        samples,
        seed: g.seed,
        lower_bound: Some(bounds.d_c_lower),
    };
    let t = Instant::now();
    let d = target
        .generator_matrix()
        .min_distance(&budget)
        .context("computing the minimum distance")?;
    report.timings_us.push(("distance".into(), micros(t)));
    if let Some(seed) = d.seed {
        report.seeds.push(seed);
    }
    let provenance = match d.method {
        DistanceMethod::Exhaustive => Provenance::ExhaustiveDistance,
        DistanceMethod::Witness if d.exact => Provenance::ExhaustiveDistance,
        _ => Provenance::BoundOnly,
    };
    let consistent = !d.exact || d.value >= bounds.d_c_lower;
    report.checks.push(CheckOutcome {
        name: "bound".into(),
        passed: consistent,
        cases: 1,
        detail: (!consistent).then(|| format!("d = {} below bound {}", d.value, bounds.d_c_lower)),
    });
    report.results.push(Item::Bounds {
        label: label.clone(),
        bounds,
        provenance: Provenance::BoundOnly,
    });
    report.results.push(Item::Distance {
        label,
        result: d,
        provenance,
    });
    Ok(report)
}

pub fn graph(argv: Vec<String>, g: &Global, q: u64, s: u32, m: u32, kmax: usize) -> anyhow::Result<RunReport> {
    let mut report = RunReport::new(argv, json!({ "q": q, "s": s, "m": m, "kmax": kmax, "global": g }));
    let t = Instant::now();
    let graph = build_graph(q, s, m)?;
    let counts = graph.n_counts(kmax);
    report.timings_us.push(("graph".into(), micros(t)));
    let digits = |v: &Vec<u64>| v.iter().map(u64::to_string).collect::<String>();
    report.results.push(Item::Graph {
        q,
        s,
        m,
        vertices: graph.vertices.iter().map(digits).collect(),
        charpoly: graph.charpoly.iter().map(ToString::to_string).collect(),
        counts: counts.iter().map(ToString::to_string).collect(),
        provenance: Provenance::Recurrence,
    });
    // Small sizes: the walk counts must match the restricted-weight sets.
    let t = Instant::now();
    let small = |k: usize| (k as f64) * (q as f64).log2() <= g.exhaustive_cap.min(20) as f64;
    let mut cases = 0;
    let mut bad = None;
    for k in (s as usize).max(1)..=kmax {
        if !small(k) {
            break;
        }
        let p = RwParams::new(q, k as u32, s, m)?;
        let w = schur_cyclic::restricted::w_set(&p, g.exhaustive_cap)?;
        cases += 1;
        if counts[k] != (w.len() as u64).into() && bad.is_none() {
            bad = Some(format!("k = {k}: walks {}, |W| = {}", counts[k], w.len()));
        }
    }
    report.checks.push(CheckOutcome {
        name: "walks-vs-enumeration".into(),
        passed: bad.is_none(),
        cases,
        detail: bad,
    });
    report.timings_us.push(("enumeration".into(), micros(t)));
    Ok(report)
}
