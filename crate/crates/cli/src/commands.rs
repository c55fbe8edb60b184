use std::fs;
use std::path::{Path, PathBuf};

use pcpkit::abssep::{
    abs_ppt_check_with, certify_special_separable, default_orderings, enumerate_orderings, prepare_spectrum,
    OrderingTable, DEFAULT_SAMPLES, DEFAULT_SEED,
};
use pcpkit::cldui::{
    build_state, dense_report, extract_pair, is_diagonal_unitary_invariant, realignment_check, separability_verdict,
    Entanglement, Verdict,
};
use pcpkit::construct::{
    decompose_2x2, decompose_auto, decompose_comparison, decompose_diagonal_x, decompose_recursive, ConstructorOutcome,
    Method, Status, VERIFY_TOL,
};
use pcpkit::document::{parse_spectrum, CertificateDocument, PairDocument, StateInput};
use pcpkit::pairs::decomposition_residual;
use pcpkit::{check_necessary, Condition, PairXY};
use serde_json::{json, Value};

pub const EXIT_OK: u8 = 0;
pub const EXIT_IO: u8 = 1;
pub const EXIT_VIOLATED: u8 = 2;
pub const EXIT_NOT_APPLICABLE: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;

pub type Result<T> = std::result::Result<T, String>;

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn write(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn load_pair(path: &Path) -> Result<PairXY> {
    let text = read(path)?;
    PairDocument::parse(&text)
        .and_then(|doc| doc.to_pair())
        .map_err(|e| format!("{}: {e}", path.display()))
}

fn emit(json: bool, value: &Value, text: impl FnOnce() -> String) {
    if json {
        println!("{}", serde_json::to_string_pretty(value).expect("reports serialize"));
    } else {
        print!("{}", text());
    }
}

fn necessary_json(pair: &PairXY) -> (Value, String, bool) {
    let report = check_necessary(pair);
    let mut text = String::new();
    let mut conditions = Vec::new();
    for c in Condition::ALL {
        let holds = report.holds(c);
        let witness = report.witness(c);
        text.push_str(&format!(
            "{c} {:<4} {}\n",
            if holds { "ok" } else { "FAIL" },
            c.describe()
        ));
        if let Some(w) = witness {
            text.push_str(&format!("         {w}\n"));
        }
        conditions.push(json!({
            "condition": c.to_string(),
            "holds": holds,
            "description": c.describe(),
            "witness": witness,
        }));
    }
    text.push_str(&format!(
        "gaps: ||X||_1 - ||X||_tr = {:.9}, ||Y||_1 - ||Y||_tr = {:.9}\n",
        report.x_gap, report.y_gap
    ));
    let value = json!({
        "n": pair.n(),
        "all_hold": report.all_hold(),
        "conditions": conditions,
        "x_gap": report.x_gap,
        "y_gap": report.y_gap,
    });
    (value, text, report.all_hold())
}

pub fn check_pair(path: &Path, json: bool) -> Result<u8> {
    let pair = load_pair(path)?;
    let (value, mut text, ok) = necessary_json(&pair);
    text.push_str(if ok {
        "all necessary conditions hold\n"
    } else {
        "necessary conditions violated\n"
    });
    emit(json, &value, || text);
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATED })
}

fn run_method(pair: &PairXY, method: Method, perms: bool) -> ConstructorOutcome {
    match method {
        Method::DiagonalX => decompose_diagonal_x(pair),
        Method::TwoByTwo => decompose_2x2(pair),
        Method::Recursive => decompose_recursive(pair, perms),
        Method::Comparison => decompose_comparison(pair),
        Method::Auto | Method::Isotropic => decompose_auto(pair),
    }
}

fn status_code(status: Status) -> u8 {
    match status {
        Status::Decomposed => EXIT_OK,
        Status::NotApplicable => EXIT_NOT_APPLICABLE,
        Status::ConditionsViolated => EXIT_VIOLATED,
    }
}

fn outcome_json(outcome: &ConstructorOutcome) -> Value {
    json!({
        "status": outcome.status,
        "method": outcome.method,
        "permutation": outcome.permutation,
        "terms": outcome.decomposition.as_ref().map(|d| d.len()),
        "residual": outcome.residual,
        "failure": outcome.failure,
        "failure_message": outcome.failure.as_ref().map(ToString::to_string),
    })
}

fn outcome_text(outcome: &ConstructorOutcome) -> String {
    let mut text = format!("method: {}\n", outcome.method);
    match (&outcome.decomposition, &outcome.failure) {
        (Some(dec), _) => {
            text.push_str(&format!("decomposed into {} terms", dec.len()));
            if outcome.permutation.iter().enumerate().any(|(i, &p)| i != p) {
                let order: Vec<String> = outcome.permutation.iter().map(|p| (p + 1).to_string()).collect();
                text.push_str(&format!(" (index order {})", order.join(",")));
            }
            text.push('\n');
            if let Some(r) = outcome.residual {
                text.push_str(&format!("relative reconstruction residual: {r:.3e}\n"));
            }
        }
        (None, Some(failure)) => {
            let what = match outcome.status {
                Status::ConditionsViolated => "conditions violated",
                _ => "not applicable",
            };
            text.push_str(&format!("{what}: {failure}\n"));
        }
        (None, None) => text.push_str("no decomposition\n"),
    }
    text
}

fn write_certificate(path: &Path, outcome: &ConstructorOutcome) -> Result<bool> {
    match CertificateDocument::from_outcome(outcome) {
        Some(doc) => write(path, &doc.to_json()).map(|()| true),
        None => Ok(false),
    }
}

pub fn decompose(path: &Path, method: Method, perms: bool, out: Option<&Path>, json: bool) -> Result<u8> {
    let pair = load_pair(path)?;
    let outcome = run_method(&pair, method, perms);
    let mut text = outcome_text(&outcome);
    let failed: Vec<String> = if outcome.is_decomposed() {
        Vec::new()
    } else {
        let report = check_necessary(&pair);
        Condition::ALL
            .iter()
            .filter(|&&c| !report.holds(c))
            .map(ToString::to_string)
            .collect()
    };
    if outcome.status == Status::NotApplicable && !failed.is_empty() {
        text.push_str(&format!("not PCP: condition {} fails\n", failed.join(", ")));
    }
    let written = match out {
        Some(out) if write_certificate(out, &outcome)? => {
            text.push_str(&format!("certificate written to {}\n", out.display()));
            Some(out.display().to_string())
        }
        _ => None,
    };
    let mut value = outcome_json(&outcome);
    value["certificate"] = json!(written);
    value["failed_conditions"] = json!(failed);
    emit(json, &value, || text);
    Ok(status_code(outcome.status))
}

pub fn verify_certificate(path: &Path, cert: &Path, json: bool) -> Result<u8> {
    let pair = load_pair(path)?;
    let doc = CertificateDocument::parse(&read(cert)?).map_err(|e| format!("{}: {e}", cert.display()))?;
    let dec = doc.to_decomposition().map_err(|e| format!("{}: {e}", cert.display()))?;
    let residual = decomposition_residual(&dec, &pair).map_err(|e| format!("{}: {e}", cert.display()))?;
    let verified = residual <= VERIFY_TOL;
    let value = json!({
        "verified": verified,
        "terms": dec.len(),
        "method": doc.method,
        "residual": residual,
        "tolerance": VERIFY_TOL,
    });
    emit(json, &value, || {
        format!(
            "certificate {} ({} terms, method {}): relative residual {residual:.3e} (tolerance {VERIFY_TOL:e})\n",
            if verified { "verified" } else { "REJECTED" },
            dec.len(),
            doc.method
        )
    });
    Ok(if verified { EXIT_OK } else { EXIT_VIOLATED })
}

pub struct StateOptions {
    pub dense_crosscheck: bool,
    pub normalize: bool,
    pub out: Option<PathBuf>,
    pub samples: usize,
    pub seed: u64,
}

pub fn check_state(path: &Path, opts: &StateOptions, json: bool) -> Result<u8> {
    let text_in = read(path)?;
    let input = StateInput::parse(&text_in).map_err(|e| format!("{}: {e}", path.display()))?;
    let mut value = json!({});
    let mut text = String::new();
    let mut pair = match input {
        StateInput::Pair(doc) => doc.to_pair().map_err(|e| format!("{}: {e}", path.display()))?,
        StateInput::Dense(doc) => {
            let rho = doc.to_matrix().map_err(|e| format!("{}: {e}", path.display()))?;
            let pair = extract_pair(&rho, doc.n).map_err(|e| format!("{}: {e}", path.display()))?;
            let invariant = is_diagonal_unitary_invariant(&rho, doc.n, opts.samples, opts.seed)
                .map_err(|e| format!("{}: {e}", path.display()))?;
            text.push_str(&format!(
                "dense input: CLDUI pattern ok; invariant under {} random diagonal unitaries (seed {}): {}\n",
                opts.samples,
                opts.seed,
                if invariant { "yes" } else { "NO" }
            ));
            value["dense_input"] = json!({ "invariant": invariant, "samples": opts.samples, "seed": opts.seed });
            pair
        }
    };

    let report = check_necessary(&pair);
    if !report.holds_through(Condition::C) {
        let err = report.require_through(Condition::C).unwrap_err();
        value["state"] = json!(false);
        value["error"] = json!(err.to_string());
        text.push_str(&format!("not a CLDUI state: {err}\n"));
        emit(json, &value, || text);
        return Ok(EXIT_VIOLATED);
    }
    if opts.normalize {
        pair = build_state(&pair)
            .map_err(|e| e.to_string())?
            .normalized()
            .pair()
            .clone();
    }
    let state = build_state(&pair).map_err(|e| e.to_string())?;
    let realign = realignment_check(&pair).map_err(|e| e.to_string())?;
    let ppt = report.holds(Condition::D);
    text.push_str(&format!("n = {}, trace = {:.9}\n", pair.n(), state.trace()));
    text.push_str("PSD: yes\n");
    text.push_str(&format!("PPT: {}\n", if ppt { "yes" } else { "no" }));
    if let Some(w) = report.witness(Condition::D) {
        text.push_str(&format!("     {w}\n"));
    }
    text.push_str(&format!(
        "realignment: {} (||X||_1 - ||X||_tr = {:.9}, ||Y||_1 - ||Y||_tr = {:.9}, margin {:.3e})\n",
        if realign.passes { "passes" } else { "violated" },
        realign.lhs,
        realign.rhs,
        realign.rhs - realign.lhs
    ));
    value["state"] = json!(true);
    value["n"] = json!(pair.n());
    value["trace"] = json!(state.trace());
    value["psd"] = json!(true);
    value["ppt"] = json!(ppt);
    value["realignment"] = json!(realign);

    if opts.dense_crosscheck {
        let dense = dense_report(state.dense(), pair.n()).map_err(|e| e.to_string())?;
        let agrees = dense.psd && dense.ppt == ppt && dense.realignment_passes == realign.passes;
        text.push_str(&format!(
            "dense cross-check: PSD {}, trace {:.9}, PPT {}, realigned trace norm {:.9} ({}) -> {}\n",
            dense.psd,
            dense.trace,
            dense.ppt,
            dense.realigned_trace_norm,
            if dense.realignment_passes { "passes" } else { "violated" },
            if agrees { "agrees" } else { "DISAGREES" }
        ));
        value["dense"] = json!(dense);
        value["dense_agrees"] = json!(agrees);
    }

    let verdict = separability_verdict(&pair).map_err(|e| e.to_string())?;
    value["verdict"] = json!(verdict.label());
    let code = match &verdict {
        Verdict::Separable(outcome) => {
            text.push_str(&format!(
                "verdict: separable (certified by the {} constructor",
                outcome.method
            ));
            if let Some(dec) = &outcome.decomposition {
                text.push_str(&format!(", {} product terms", dec.len()));
            }
            if let Some(r) = outcome.residual {
                text.push_str(&format!(", residual {r:.3e}"));
            }
            text.push_str(")\n");
            value["certificate"] = match &opts.out {
                Some(out) => {
                    write_certificate(out, outcome)?;
                    text.push_str(&format!("certificate: {}\n", out.display()));
                    json!(out.display().to_string())
                }
                None => {
                    text.push_str("certificate: not written (pass --out to save it)\n");
                    Value::Null
                }
            };
            value["construction"] = outcome_json(outcome);
            EXIT_OK
        }
        Verdict::Entangled(why) => {
            let reason = match why {
                Entanglement::Ppt {
                    row,
                    col,
                    x_abs_sq,
                    y_product,
                } => format!(
                    "PPT fails at ({}, {}): |x|^2 = {x_abs_sq:.9} > {y_product:.9}",
                    row + 1,
                    col + 1
                ),
                Entanglement::Realignment { lhs, rhs } => {
                    format!("realignment fails: {lhs:.9} > {rhs:.9}")
                }
            };
            text.push_str(&format!("verdict: entangled ({reason})\n"));
            value["entanglement"] = json!(why);
            EXIT_VIOLATED
        }
        Verdict::Inconclusive(failure) => {
            text.push_str(&format!("verdict: inconclusive ({failure})\n"));
            value["failure"] = json!(failure);
            value["failure_message"] = json!(failure.to_string());
            EXIT_INCONCLUSIVE
        }
    };
    emit(json, &value, || text);
    Ok(code)
}

pub struct AbsPptOptions {
    pub n: usize,
    pub lambdas: String,
    pub certify: bool,
    pub out: PathBuf,
    pub samples: usize,
    pub seed: u64,
}

fn read_spectrum(arg: &str) -> Result<Vec<f64>> {
    let path = Path::new(arg);
    let text = if path.is_file() { read(path)? } else { arg.to_string() };
    parse_spectrum(&text).map_err(|e| e.to_string())
}

pub fn abs_ppt(opts: &AbsPptOptions, json: bool) -> Result<u8> {
    let lambdas = prepare_spectrum(&read_spectrum(&opts.lambdas)?).map_err(|e| e.to_string())?;
    let n = opts.n;
    let enumerated;
    let orderings: &[OrderingTable] = if opts.samples == DEFAULT_SAMPLES && opts.seed == DEFAULT_SEED {
        default_orderings(n).map_err(|e| e.to_string())?
    } else {
        enumerated = enumerate_orderings(n, opts.samples, opts.seed).map_err(|e| e.to_string())?;
        &enumerated
    };
    let report = abs_ppt_check_with(orderings, n, &lambdas).map_err(|e| e.to_string())?;

    let mut text = format!(
        "n = {n}, {} orderings (samples {}, seed {})\n",
        orderings.len(),
        opts.samples,
        opts.seed
    );
    let mut rows = Vec::new();
    for (j, (ord, min)) in orderings.iter().zip(&report.min_eigenvalues).enumerate() {
        text.push_str(&format!("ordering {}: min eigenvalue {min:.9e}  [{ord}]\n", j + 1));
        rows.push(json!({ "ordering": j + 1, "slots": ord.to_string(), "min_eigenvalue": min }));
    }
    match report.failing_ordering {
        None => text.push_str("absolutely PPT: yes\n"),
        Some(j) => text.push_str(&format!("absolutely PPT: no (ordering {} fails)\n", j + 1)),
    }
    let mut value = json!({
        "n": n,
        "passes": report.passes,
        "failing_ordering": report.failing_ordering.map(|j| j + 1),
        "orderings": rows,
    });

    if opts.certify && report.passes {
        fs::create_dir_all(&opts.out).map_err(|e| format!("cannot create {}: {e}", opts.out.display()))?;
        let mut written = Vec::new();
        for (j, ord) in orderings.iter().enumerate() {
            let cert = certify_special_separable(ord, &lambdas).map_err(|e| e.to_string())?;
            let Some(doc) = CertificateDocument::from_outcome(&cert.outcome) else {
                let why = cert.outcome.failure.map(|f| f.to_string()).unwrap_or_default();
                return Err(format!("ordering {} could not be certified: {why}", j + 1));
            };
            let pair_path = opts.out.join(format!("ordering-{}.pair.json", j + 1));
            let cert_path = opts.out.join(format!("ordering-{}.certificate.json", j + 1));
            let name = format!("partial transpose of the ordering-{} special state", j + 1);
            write(
                &pair_path,
                &PairDocument::from_pair(&cert.pair).with_name(name).to_json(),
            )?;
            write(&cert_path, &doc.to_json())?;
            text.push_str(&format!(
                "ordering {}: certificate {} ({} terms) for pair {}\n",
                j + 1,
                cert_path.display(),
                cert.outcome.decomposition.as_ref().map_or(0, |d| d.len()),
                pair_path.display()
            ));
            written.push(json!({
                "ordering": j + 1,
                "pair": pair_path.display().to_string(),
                "certificate": cert_path.display().to_string(),
            }));
        }
        value["certificates"] = json!(written);
    } else if opts.certify {
        text.push_str("no certificates: the spectrum is not absolutely PPT\n");
    }
    emit(json, &value, || text);
    Ok(if report.passes { EXIT_OK } else { EXIT_VIOLATED })
}
