use crate::args::{Command, Flags};
use serde_json::{json, Value};
use wglab_core::analytic::{
    delta3_trend, g_r_ratio, major_arc_forms, minor_arc_scan, n_arcs, singular_integral, toy_params, ArcDissection,
    JMethod, JOptions, ScaleParams, SieveCoefficients,
};
use wglab_core::arith::ExactRational;
use wglab_core::enumeration::{
    enumerate_product_sets, find_representations_with, moment_count, moment_exponent, naive_representations,
    verify_range, Moment, ProductBounds, ProductKind, RangeMode, PRODUCT_NODE_BUDGET,
};
use wglab_core::local::{
    congruence_counts, local_factor, omega_density, sifting_product_v, singular_series, CountMethod, OmegaSource,
};
use wglab_core::sieve::{
    c_r_constant, c_r_table_grid, paper_bound, paper_constants, sandwich_report, sieve_sum, theorem_margin, CrConstant,
    CrMethod, SieveSign, DEFAULT_NODE_BUDGET, DEFAULT_SAMPLES, DEFAULT_STEP, OUTER_LIMIT,
};
use wglab_core::{Error, Result};

pub const DEFAULT_SEED: u64 = 1;

/// What a subcommand produced: the resolved inputs, one output per logical
/// result, and a property failure to report after writing them.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub inputs: Value,
    pub outputs: Vec<Value>,
    pub failure: Option<String>,
}

impl Outcome {
    fn one(inputs: Value, output: Value) -> Self {
        Outcome { inputs, outputs: vec![output], failure: None }
    }
}

fn need<T: Copy>(v: Option<T>, flag: &str, cmd: Command) -> Result<T> {
    v.ok_or_else(|| Error::Validation(format!("{} needs --{flag}", cmd.name())))
}

fn to_value<T: serde::Serialize>(v: &T) -> Result<Value> {
    serde_json::to_value(v).map_err(|e| Error::Consistency(format!("serialization: {e}")))
}

/// Desk parameters at `n` with the cutoff overrides applied. A new `D`
/// without a new `z` moves `z` to `D^{1/3}`.
fn scale(n: u64, f: &Flags) -> Result<ScaleParams> {
    let mut p = ScaleParams::desk(n);
    for (key, v) in [("q0", f.q0), ("q1", f.q1), ("q2", f.q2)] {
        if let Some(v) = v {
            p = p.with(key, v)?;
        }
    }
    if let Some(d) = f.d_level {
        p = p.with("D", d)?.with("z", d.cbrt())?;
    }
    if let Some(z) = f.z {
        p = p.with("z", z)?;
    }
    Ok(p)
}

fn mode(f: &Flags) -> Result<RangeMode> {
    match f.mode.as_deref().unwrap_or("unrestricted") {
        "unrestricted" => Ok(RangeMode::Unrestricted),
        "paper-range" => Ok(RangeMode::PaperRange),
        m => Err(Error::Validation(format!("unknown mode '{m}', expected unrestricted or paper-range"))),
    }
}

/// `lo, 10 lo, 100 lo, ...` up to `hi`.
fn decades(lo: u64, hi: u64) -> Result<Vec<u64>> {
    if lo == 0 || lo > hi {
        return Err(Error::Validation(format!("bad scale range [{lo}, {hi}]")));
    }
    let mut out = vec![];
    let mut x = lo;
    while x <= hi {
        out.push(x);
        match x.checked_mul(10) {
            Some(y) => x = y,
            None => break,
        }
    }
    Ok(out)
}

fn rat_pair(num: u128, den: u128) -> String {
    format!("{num}/{den}")
}

pub fn run(cmd: Command, f: &Flags) -> Result<Outcome> {
    match cmd {
        Command::Reps => reps(f),
        Command::VerifyRange => verify(f),
        Command::Local => local(f),
        Command::Sseries => sseries(f),
        Command::Omega => omega(f),
        Command::Crconst => crconst(f),
        Command::SieveCheck => sieve_check(f),
        Command::Margin => margin(f),
        Command::Moments => moments(f),
        Command::Jint => jint(f),
        Command::Arcs => arcs(f),
        Command::Residuals => residuals(f),
    }
}

fn reps(f: &Flags) -> Result<Outcome> {
    let n = need(f.n, "N", Command::Reps)?;
    let mode = mode(f)?;
    let engine = f.engine.as_deref().unwrap_or("mitm");
    let recs = match (engine, mode) {
        ("mitm", _) => find_representations_with(n, mode, f.r, &scale(n, f)?)?,
        ("naive", RangeMode::Unrestricted) => naive_representations(n, f.r)?,
        ("naive", _) => return Err(Error::Validation("the naive engine covers unrestricted mode only".into())),
        (e, _) => return Err(Error::Validation(format!("unknown engine '{e}', expected mitm or naive"))),
    };
    let ordered: u64 = recs.iter().map(|r| r.multiplicity()).sum();
    Ok(Outcome::one(
        json!({"N": n, "mode": mode, "max_omega": f.r, "engine": engine}),
        json!({"count": recs.len(), "ordered_count": ordered, "records": to_value(&recs)?}),
    ))
}

fn verify(f: &Flags) -> Result<Outcome> {
    let lo = need(f.lo, "lo", Command::VerifyRange)?;
    let hi = need(f.hi, "hi", Command::VerifyRange)?;
    let r = f.r.unwrap_or(6);
    let s = verify_range(lo, hi, r)?;
    Ok(Outcome::one(
        json!({"lo": lo, "hi": hi, "r": r}),
        json!({"checked": s.rows.len(), "failures": s.failures, "rows": to_value(&s.rows)?}),
    ))
}

fn local(f: &Flags) -> Result<Outcome> {
    let q = need(f.p.or(f.q), "p", Command::Local)?;
    let n = f.n.unwrap_or(0);
    let d = f.d.unwrap_or(1);
    let data = local_factor(q, n, d)?;
    let mut out = json!({
        "q": q,
        "N_mod_q": data.n_residue,
        "d": d,
        "K": data.k.map(|v| v.to_string()),
        "L": data.l.map(|v| v.to_string()),
        "B": data.b.to_string(),
        "A": data.a.to_string(),
        "A_value": data.a.to_f64(),
    });
    // ω at a prime, kept unreduced as p𝔎/𝔏 (9𝔎/𝔏 at 3)
    if wglab_core::arith::is_prime(q) {
        let m = if q == 3 { 9 } else { q };
        let c = congruence_counts(m, n, 1, CountMethod::Auto)?;
        let num = m as u128 * c.k;
        out["omega"] = json!(rat_pair(num, c.l));
        out["omega_reduced"] = json!(ExactRational::new(num as u64, c.l as u64).to_string());
        out["omega_value"] = json!(num as f64 / c.l as f64);
    }
    Ok(Outcome::one(json!({"p": q, "N": n, "d": d}), out))
}

fn sseries(f: &Flags) -> Result<Outcome> {
    let n = need(f.n, "N", Command::Sseries)?;
    let d = f.d.unwrap_or(1);
    let cutoff = f.cutoff.unwrap_or(1000);
    let s = singular_series(n, d, cutoff)?;
    Ok(Outcome::one(
        json!({"N": n, "d": d, "cutoff": cutoff}),
        json!({
            "value": s.value,
            "direct_value": s.direct_value,
            "relative_gap": s.relative_gap,
            "tail_estimate": s.tail_estimate,
            "pruned_bound": s.pruned_bound,
            "terms": s.terms,
        }),
    ))
}

fn omega(f: &Flags) -> Result<Outcome> {
    let d = need(f.d.or(f.p), "d", Command::Omega)?;
    let n = need(f.n, "N", Command::Omega)?;
    let w = omega_density(d, n)?;
    let mut out = json!({"omega": w.value.to_string(), "omega_value": w.value.to_f64()});
    if let Some(z) = f.z {
        out["v_z"] = json!(sifting_product_v(z, OmegaSource::Counts { n })?);
        out["v_z_unit"] = json!(sifting_product_v(z, OmegaSource::Unit)?);
    }
    Ok(Outcome::one(json!({"d": d, "N": n, "z": f.z}), out))
}

fn cr_method(f: &Flags) -> Result<CrMethod> {
    match f.method.as_deref().unwrap_or("grid") {
        "grid" => Ok(CrMethod::Grid),
        "mc" => Ok(CrMethod::MonteCarlo),
        m => Err(Error::Validation(format!("unknown method '{m}', expected grid or mc"))),
    }
}

fn cr_row(c: &CrConstant) -> Result<Value> {
    let mut v = to_value(c)?;
    let cap = paper_bound(c.r);
    v["paper_bound"] = json!(cap);
    v["within_bound"] = json!(c.value <= cap * 1.01);
    Ok(v)
}

fn crconst(f: &Flags) -> Result<Outcome> {
    let method = cr_method(f)?;
    let step = f.step.unwrap_or(DEFAULT_STEP);
    let samples = f.samples.unwrap_or(DEFAULT_SAMPLES as u64);
    let seed = f.seed.unwrap_or(DEFAULT_SEED);
    let param = match method {
        CrMethod::Grid => step,
        CrMethod::MonteCarlo => samples as f64,
    };
    let table = match (f.r, method) {
        (Some(r), _) => vec![c_r_constant(r, method, param, seed)?],
        (None, CrMethod::Grid) => c_r_table_grid(step, OUTER_LIMIT)?,
        (None, CrMethod::MonteCarlo) => (7..=36).map(|r| c_r_constant(r, method, param, seed)).collect::<Result<_>>()?,
    };
    let rows = table.iter().map(cr_row).collect::<Result<Vec<_>>>()?;
    let inputs = match method {
        CrMethod::Grid => json!({"method": method, "r": f.r, "step": step}),
        CrMethod::MonteCarlo => json!({"method": method, "r": f.r, "samples": samples}),
    };
    let failure = table
        .iter()
        .find(|c| c.value > paper_bound(c.r) * 1.01)
        .map(|c| format!("c_{} = {} exceeds its cap", c.r, c.value));
    Ok(Outcome { inputs, outputs: vec![json!({ "rows": rows })], failure })
}

fn sieve_check(f: &Flags) -> Result<Outcome> {
    let z = need(f.z, "z", Command::SieveCheck)?;
    let d = need(f.d_level, "D", Command::SieveCheck)?;
    let m_max = f.hi.unwrap_or(100_000);
    let source = match f.n {
        Some(n) => OmegaSource::Counts { n },
        None => OmegaSource::Unit,
    };
    let rep = sandwich_report(m_max, z, d)?;
    let lower = sieve_sum(SieveSign::Lower, d, z, source, DEFAULT_NODE_BUDGET)?;
    let upper = sieve_sum(SieveSign::Upper, d, z, source, DEFAULT_NODE_BUDGET)?;
    let failure = (!rep.violations.is_empty())
        .then(|| format!("{} sandwich violations, first at m = {}", rep.violations.len(), rep.violations[0]));
    Ok(Outcome {
        inputs: json!({"z": z, "D": d, "m_max": m_max, "N": f.n}),
        outputs: vec![json!({
            "checked": rep.checked,
            "violation_count": rep.violations.len(),
            "violations": rep.violations.iter().take(20).collect::<Vec<_>>(),
            "lower": to_value(&lower)?,
            "upper": to_value(&upper)?,
        })],
        failure,
    })
}

fn margin(f: &Flags) -> Result<Outcome> {
    let step = f.step.unwrap_or(DEFAULT_STEP);
    let (values, source) = if f.paper_constants {
        (paper_constants(), "printed")
    } else {
        (c_r_table_grid(step, OUTER_LIMIT)?.iter().map(|c| c.value).collect(), "grid")
    };
    let m = theorem_margin(&values)?;
    let failure = (m.raw_margin <= 0.0).then(|| format!("raw margin {} is not positive", m.raw_margin));
    let inputs = if f.paper_constants {
        json!({"source": source})
    } else {
        json!({"source": source, "step": step})
    };
    Ok(Outcome { inputs, outputs: vec![to_value(&m)?], failure })
}

fn moments(f: &Flags) -> Result<Outcome> {
    let which: Moment = f.which.as_deref().unwrap_or("i").parse()?;
    if let Some(x) = f.n {
        let c = moment_count(which, x)?;
        let failure = (c.count < c.diagonal * (1.0 - 1e-12)).then(|| "count below the diagonal count".to_string());
        return Ok(Outcome { inputs: json!({"which": which, "X": x}), outputs: vec![to_value(&c)?], failure });
    }
    let xs = decades(f.lo.unwrap_or(10_000), f.hi.unwrap_or(10_000_000))?;
    let fit = moment_exponent(which, &xs)?;
    let failure = (!fit.diagonal_ok).then(|| "count below the diagonal count".to_string());
    Ok(Outcome {
        inputs: json!({"which": which, "X": xs}),
        outputs: vec![json!({"exponent": fit.exponent, "rows": to_value(&fit.rows)?})],
        failure,
    })
}

fn jint(f: &Flags) -> Result<Outcome> {
    let n = need(f.n, "N", Command::Jint)?;
    let method = match f.method.as_deref().unwrap_or("grid") {
        "grid" => JMethod::Grid,
        "mc" => JMethod::MonteCarlo,
        "dual" => JMethod::Dual,
        m => return Err(Error::Validation(format!("unknown method '{m}', expected grid, mc or dual"))),
    };
    let mut opts = JOptions::default();
    if let Some(s) = f.samples {
        opts.samples = s as usize;
    }
    if let Some(s) = f.seed {
        opts.seed = s;
    }
    let v = singular_integral(n, method, &opts)?;
    let mut out = to_value(&v)?;
    out["ratio_to_n_19_18"] = json!(v.value / (n as f64).powf(19.0 / 18.0));
    Ok(Outcome::one(json!({"N": n, "method": method, "samples": opts.samples, "seed": opts.seed}), out))
}

fn arcs(f: &Flags) -> Result<Outcome> {
    let mut p = match f.n {
        Some(n) => scale(n, f)?,
        None => toy_params(),
    };
    if f.n.is_none() {
        for (key, v) in [("q0", f.q0), ("q1", f.q1), ("q2", f.q2)] {
            if let Some(v) = v {
                p = p.with(key, v)?;
            }
        }
    }
    let d = ArcDissection::build(&p)?;
    let mut failure = d.check_partition().err().map(|e| e.to_string());
    let total = d.total_measure();
    if total != ExactRational::one() {
        failure.get_or_insert(format!("total measure {total} is not 1"));
    }
    let by_label: serde_json::Map<String, Value> =
        d.measure_by_label().into_iter().map(|(l, m)| (l.name().to_string(), json!(m.to_string()))).collect();
    let mut out = json!({
        "pieces": d.arcs.len(),
        "major_arcs": d.arcs.iter().filter(|a| a.q > 0).count(),
        "measure_by_label": by_label,
        "total_measure": total.to_string(),
        "n_arcs": n_arcs(&p)?.len(),
    });
    if let Some(a) = &f.alpha {
        let alpha: ExactRational = a.parse().map_err(Error::Validation)?;
        let arc = d.locate(&alpha);
        let direct = d.locate_direct(&alpha);
        if direct != arc.label {
            failure.get_or_insert(format!("α = {alpha}: binary search says {}, direct scan {}", arc.label.name(), direct.name()));
        }
        out["located"] = json!({"alpha": alpha.to_string(), "label": arc.label.name(), "q": arc.q, "a": arc.a});
    }
    Ok(Outcome {
        inputs: json!({"N": f.n, "q0": p.q0, "q1": p.q1, "q2": p.q2, "alpha": f.alpha}),
        outputs: vec![out],
        failure,
    })
}

fn residuals(f: &Flags) -> Result<Outcome> {
    let which = f.which.as_deref().unwrap_or("delta3");
    let seed = f.seed.unwrap_or(DEFAULT_SEED);
    match which {
        "delta3" => {
            let ns = decades(f.lo.unwrap_or(1_000_000), f.hi.unwrap_or(100_000_000))?;
            let (q, a) = (f.q.unwrap_or(5), f.a.unwrap_or(1));
            let rows = delta3_trend(&ns, q, a)?;
            Ok(Outcome::one(json!({"which": which, "N": ns, "q": q, "a": a}), json!({"rows": to_value(&rows)?})))
        }
        "minor" => {
            let ns = decades(f.lo.unwrap_or(1_000_000), f.hi.unwrap_or(100_000_000))?;
            let samples = f.samples.unwrap_or(2000) as usize;
            let rows = minor_arc_scan(&ns, samples, seed)?;
            Ok(Outcome::one(
                json!({"which": which, "N": ns, "samples": samples, "seed": seed}),
                json!({"rows": to_value(&rows)?}),
            ))
        }
        "gr" => {
            let n = f.n.unwrap_or(1_000_000_000_000);
            let r = f.r.unwrap_or(7);
            let p = scale(n, f)?;
            let set = enumerate_product_sets(ProductKind::N, r, ProductBounds::from_params(&p), PRODUCT_NODE_BUDGET)?;
            let ells: Vec<u64> = set.members.iter().map(|m| m.value).collect();
            let c = c_r_constant(r, CrMethod::Grid, DEFAULT_STEP, seed)?.value;
            let ratio = if ells.is_empty() { None } else { Some(g_r_ratio(&ells, c, &p)?) };
            Ok(Outcome::one(
                json!({"which": which, "N": n, "r": r, "z": p.z}),
                json!({"members": ells.len(), "c_r": c, "ratio": ratio}),
            ))
        }
        "forms" => {
            let n = need(f.n, "N", Command::Residuals)?;
            let p = scale(n, f)?;
            let (q, a, beta) = (f.q.unwrap_or(1), f.a.unwrap_or(0), f.beta.unwrap_or(0.0));
            let (q, a) = if q == 1 { (1, 1) } else { (q, a) };
            let forms = major_arc_forms(q, a, beta, &p, &SieveCoefficients::unit(), None)?;
            Ok(Outcome::one(json!({"which": which, "N": n, "q": q, "a": a, "beta": beta}), to_value(&forms)?))
        }
        w => Err(Error::Validation(format!("unknown diagnostic '{w}', expected delta3, minor, gr or forms"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decade_grid() {
        assert_eq!(decades(10, 1000).unwrap(), vec![10, 100, 1000]);
        assert_eq!(decades(10, 999).unwrap(), vec![10, 100]);
        assert!(decades(0, 10).is_err());
        assert!(decades(100, 10).is_err());
    }

    #[test]
    fn overrides_move_z_with_d() {
        let f = Flags { d_level: Some(1000.0), ..Flags::default() };
        let p = scale(1_000_000, &f).unwrap();
        assert!((p.z - 10.0).abs() < 1e-9);
        let g = Flags { d_level: Some(1000.0), z: Some(7.0), ..Flags::default() };
        assert_eq!(scale(1_000_000, &g).unwrap().z, 7.0);
    }

    #[test]
    fn missing_flags_are_validation_errors() {
        let e = run(Command::Reps, &Flags::default()).unwrap_err();
        assert!(matches!(e, Error::Validation(_)));
        assert!(!e.is_check_failure());
    }
}
