//! Deterministic output assembly: grid tabulation of eigenvalues,
//! derivatives, and bounds; interval-scan tables; witness-trace dumps; and
//! the verification suite that re-checks every certified invariant on a
//! concrete problem.
//!
//! All numbers render at 17 significant digits so CSV output round-trips
//! exactly, and grid work is collected in grid order, so identical inputs
//! produce byte-identical output.

use rayon::prelude::*;

use crate::calculus::{
    bounds, chi_closed_form, chi_recursion, delta_minors, lambda_prime_all_at,
    lambda_prime_checked, BoundSet, SpectralPoint,
};
use crate::eigen::{default_tol, eigenvalues_bisect, sign_changes};
use crate::error::{Error, Result};
use crate::model::{
    assemble_s, assemble_s_walk, golub_kahan_reduce, rw_to_bd_hat, BirthDeathSpec, RandomWalkSpec,
    TriSym,
};
use crate::monotonicity::{
    classify, scan, Criterion, CriterionVerdict, Monitored, MonotoneInterval,
};
use crate::oracle::{fd_problem, FD_AGREEMENT_RTOL, FD_DEFAULT_H};
use crate::problem::ProblemSpec;

/// Render a float at 17 significant digits (exact round trip).
#[must_use]
pub fn fmt_num(x: f64) -> String {
    format!("{x:.16e}")
}

/// Interior midpoint grid over the problem domain: the endpoints themselves
/// are excluded because the domain is open.
pub fn grid_points(problem: &ProblemSpec, grid: usize) -> Result<Vec<f64>> {
    if grid < 2 {
        return Err(Error::Input(format!(
            "grid size must be at least 2, got {grid}"
        )));
    }
    let (lo, hi) = problem.domain();
    let step = (hi - lo) / grid as f64;
    Ok((0..grid).map(|i| lo + (i as f64 + 0.5) * step).collect())
}

// ---------------------------------------------------------------------------
// Analyze
// ---------------------------------------------------------------------------

/// One grid row of the analyze table.
#[derive(Debug, Clone)]
pub struct AnalyzeRow {
    pub t: f64,
    /// Ascending eigenvalues of the problem's own matrix (the walk matrix
    /// itself for walk problems).
    pub eigenvalues: Vec<f64>,
    /// Certified quadratic-form derivatives dλ_k/dt, ascending k.
    pub derivatives: Vec<f64>,
    pub m1: f64,
    pub m2: f64,
    pub mu: f64,
}

/// The analyze table: header names plus rows in grid order.
#[derive(Debug, Clone)]
pub struct AnalyzeTable {
    pub header: Vec<String>,
    pub rows: Vec<AnalyzeRow>,
}

fn analyze_row(spec: &BirthDeathSpec, t: f64, shift: f64) -> Result<AnalyzeRow> {
    let point = SpectralPoint::compute(spec, t)?;
    let size = spec.size();
    let mut derivatives = Vec::with_capacity(size);
    for k in 0..size {
        derivatives.push(lambda_prime_all_at(&point, t, k)?[0].total);
    }
    let eigenvalues = point
        .spectrum
        .values
        .iter()
        .map(|v| v + shift)
        .collect::<Vec<_>>();
    let BoundSet { m1, m2, mu, .. } = bounds(spec, t)?;
    Ok(AnalyzeRow {
        t,
        eigenvalues,
        derivatives,
        m1: m1 + shift,
        m2: m2 + shift,
        mu: mu + shift,
    })
}

/// Tabulate eigenvalues, certified derivatives, and bounds on the interior
/// grid. Walk problems are handled through the identity-shift companion:
/// eigenvalues and bounds shift down by one, derivatives transfer unchanged.
pub fn analyze(problem: &ProblemSpec, grid: usize) -> Result<AnalyzeTable> {
    let ts = grid_points(problem, grid)?;
    let (spec, shift) = match problem {
        ProblemSpec::BirthDeath(spec) => (spec.clone(), 0.0),
        ProblemSpec::RandomWalk(spec) => (rw_to_bd_hat(spec), -1.0),
    };
    let rows: Vec<AnalyzeRow> = ts
        .par_iter()
        .map(|&t| {
            // Validate walk probabilities on the original coefficients, so a
            // range error names c_j instead of the companion's b_j.
            if let ProblemSpec::RandomWalk(walk) = problem {
                walk.probabilities(t)?;
            }
            analyze_row(&spec, t, shift)
        })
        .collect::<Result<_>>()?;
    let size = problem.n() + 1;
    let mut header = vec!["t".to_string()];
    header.extend((0..size).map(|k| format!("lambda_{k}")));
    header.extend((0..size).map(|k| format!("dlambda_{k}")));
    header.extend(["m1".to_string(), "m2".to_string(), "mu".to_string()]);
    Ok(AnalyzeTable { header, rows })
}

/// Analyze table as CSV.
#[must_use]
pub fn render_analyze_csv(table: &AnalyzeTable) -> String {
    let mut out = String::new();
    out.push_str(&table.header.join(","));
    out.push('\n');
    for row in &table.rows {
        let mut fields = vec![fmt_num(row.t)];
        fields.extend(row.eigenvalues.iter().map(|&x| fmt_num(x)));
        fields.extend(row.derivatives.iter().map(|&x| fmt_num(x)));
        fields.push(fmt_num(row.m1));
        fields.push(fmt_num(row.m2));
        fields.push(fmt_num(row.mu));
        out.push_str(&fields.join(","));
        out.push('\n');
    }
    out
}

/// Analyze table as a line-per-point report.
#[must_use]
pub fn render_analyze_report(table: &AnalyzeTable) -> String {
    let mut out = String::new();
    for row in &table.rows {
        out.push_str(&format!("t = {}\n", fmt_num(row.t)));
        for (k, (l, d)) in row.eigenvalues.iter().zip(&row.derivatives).enumerate() {
            out.push_str(&format!(
                "  lambda_{k} = {}  dlambda_{k} = {}\n",
                fmt_num(*l),
                fmt_num(*d)
            ));
        }
        out.push_str(&format!(
            "  bounds: m1 = {}  m2 = {}  mu = {}\n",
            fmt_num(row.m1),
            fmt_num(row.m2),
            fmt_num(row.mu)
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Scan
// ---------------------------------------------------------------------------

/// Scan every requested criterion and concatenate the intervals in criterion
/// order.
pub fn scan_all(
    problem: &ProblemSpec,
    criteria: &[Criterion],
    grid: usize,
) -> Result<Vec<MonotoneInterval>> {
    let mut intervals = Vec::new();
    for &criterion in criteria {
        intervals.extend(scan(problem, criterion, grid)?);
    }
    Ok(intervals)
}

/// Scan table as CSV with columns `criterion,direction,lo,hi`.
#[must_use]
pub fn render_scan_csv(intervals: &[MonotoneInterval]) -> String {
    let mut out = String::from("criterion,direction,lo,hi\n");
    for iv in intervals {
        out.push_str(&format!(
            "{},{},{},{}\n",
            iv.criterion.tag(),
            iv.direction,
            fmt_num(iv.lo),
            fmt_num(iv.hi)
        ));
    }
    out
}

/// Scan table as a human-readable report.
#[must_use]
pub fn render_scan_report(intervals: &[MonotoneInterval]) -> String {
    if intervals.is_empty() {
        return String::from("no criterion holds on any non-degenerate subinterval\n");
    }
    let mut out = String::new();
    for iv in intervals {
        out.push_str(&format!(
            "{} ({}): ({:.6}, {:.6})\n",
            iv.criterion.tag(),
            iv.direction,
            iv.lo,
            iv.hi
        ));
    }
    out
}

// ---------------------------------------------------------------------------
// Trace
// ---------------------------------------------------------------------------

/// Membership verdicts with full witnesses for every requested criterion at
/// every grid point, ordered by criterion then by grid position.
pub fn trace(
    problem: &ProblemSpec,
    criteria: &[Criterion],
    grid: usize,
) -> Result<Vec<CriterionVerdict>> {
    let ts = grid_points(problem, grid)?;
    let mut verdicts = Vec::with_capacity(criteria.len() * ts.len());
    for &criterion in criteria {
        let batch: Vec<CriterionVerdict> = ts
            .par_iter()
            .map(|&t| classify(problem, criterion, t))
            .collect::<Result<_>>()?;
        verdicts.extend(batch);
    }
    Ok(verdicts)
}

/// Trace dump as flat CSV: one row per witnessed quantity, with empty `j`
/// and `disjunct` fields for index-independent quantities.
#[must_use]
pub fn render_trace_csv(verdicts: &[CriterionVerdict]) -> String {
    let mut out = String::from("criterion,t,member,nondegenerate,j,disjunct,quantity,value\n");
    for v in verdicts {
        let nondeg = match v.witness.nondegenerate {
            Some(true) => "true",
            Some(false) => "false",
            None => "",
        };
        let head = format!(
            "{},{},{},{nondeg}",
            v.criterion.tag(),
            fmt_num(v.t),
            v.member
        );
        for (name, value) in &v.witness.global {
            out.push_str(&format!("{head},,,{name},{}\n", fmt_num(*value)));
        }
        for tr in &v.witness.per_j {
            let disjunct = tr.disjunct.map_or(String::new(), |d| d.to_string());
            for (name, value) in &tr.quantities {
                out.push_str(&format!(
                    "{head},{},{disjunct},{name},{}\n",
                    tr.j,
                    fmt_num(*value)
                ));
            }
        }
    }
    out
}

/// Trace dump as an indented report.
#[must_use]
pub fn render_trace_report(verdicts: &[CriterionVerdict]) -> String {
    let mut out = String::new();
    for v in verdicts {
        out.push_str(&format!(
            "{} at t = {}: {}",
            v.criterion.tag(),
            fmt_num(v.t),
            if v.member { "member" } else { "not a member" }
        ));
        if let Some(nondeg) = v.witness.nondegenerate {
            out.push_str(&format!(" (nondegenerate: {nondeg})"));
        }
        out.push('\n');
        if !v.witness.global.is_empty() {
            let rendered: Vec<String> = v
                .witness
                .global
                .iter()
                .map(|(name, value)| format!("{name} = {}", fmt_num(*value)))
                .collect();
            out.push_str(&format!("  global: {}\n", rendered.join(", ")));
        }
        for tr in &v.witness.per_j {
            let disjunct = tr
                .disjunct
                .map_or_else(|| "none".to_string(), |d| d.to_string());
            let rendered: Vec<String> = tr
                .quantities
                .iter()
                .map(|(name, value)| format!("{name} = {}", fmt_num(*value)))
                .collect();
            out.push_str(&format!(
                "  j = {}: disjunct {disjunct}; {}\n",
                tr.j,
                rendered.join(", ")
            ));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Verify
// ---------------------------------------------------------------------------

/// One verified property: name, outcome, and the witnessing failures.
#[derive(Debug, Clone)]
pub struct PropertyCheck {
    pub name: String,
    pub pass: bool,
    /// Human-readable witnesses (t, k, values) for each failure, capped.
    pub failures: Vec<String>,
}

/// Outcome of the full verification suite.
#[derive(Debug, Clone)]
pub struct VerifyOutcome {
    pub checks: Vec<PropertyCheck>,
}

impl VerifyOutcome {
    /// True when every property passed.
    #[must_use]
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Cap on recorded failure witnesses per property.
const FAILURE_CAP: usize = 8;

/// Collects named failures across grid points, keeping at most
/// [`FAILURE_CAP`] witnesses per property.
struct Suite {
    names: Vec<String>,
    failures: Vec<Vec<String>>,
    totals: Vec<usize>,
}

impl Suite {
    fn new(names: &[&str]) -> Self {
        Suite {
            names: names.iter().map(|s| (*s).to_string()).collect(),
            failures: vec![Vec::new(); names.len()],
            totals: vec![0; names.len()],
        }
    }

    fn fail(&mut self, property: usize, witness: String) {
        self.totals[property] += 1;
        if self.failures[property].len() < FAILURE_CAP {
            self.failures[property].push(witness);
        }
    }

    fn merge(&mut self, other: Suite) {
        for (i, (mut failures, total)) in other.failures.into_iter().zip(other.totals).enumerate() {
            self.totals[i] += total;
            let room = FAILURE_CAP.saturating_sub(self.failures[i].len());
            failures.truncate(room);
            self.failures[i].extend(failures);
        }
    }

    fn outcome(mut self) -> VerifyOutcome {
        let checks = self
            .names
            .drain(..)
            .zip(self.failures)
            .zip(self.totals)
            .map(|((name, mut failures), total)| {
                if total > failures.len() {
                    failures.push(format!(
                        "... and {} more failing points",
                        total - failures.len()
                    ));
                }
                PropertyCheck {
                    name,
                    pass: total == 0,
                    failures,
                }
            })
            .collect();
        VerifyOutcome { checks }
    }
}

/// Evaluate the polynomial q-sequence at x = 0 via the symmetric three-term
/// recursion; used by the χ-consistency property.
fn q_at_zero(s: &TriSym) -> Vec<f64> {
    let size = s.size();
    let mut q = vec![1.0; size];
    if size > 1 {
        q[1] = -s.diag[0] / s.off[0];
    }
    for j in 1..size.saturating_sub(1) {
        q[j + 1] = (-s.diag[j] * q[j] - s.off[j - 1] * q[j - 1]) / s.off[j];
    }
    q
}

/// Slope sign plus finite-difference confirmation for one monitored
/// eigenvalue of a member point; returns a witness string on failure.
fn soundness_at(
    problem: &ProblemSpec,
    spec: &BirthDeathSpec,
    criterion: Criterion,
    t: f64,
    k: usize,
) -> Result<Option<String>> {
    let form = lambda_prime_checked(spec, t, k)?;
    let dir = criterion.sign();
    if form * dir <= 1e-12 * (1.0 + form.abs()) {
        return Ok(Some(format!(
            "{} member at t = {t} but dlambda_{k} = {form} lacks the claimed sign",
            criterion.tag()
        )));
    }
    let (lo, hi) = problem.domain();
    if t - FD_DEFAULT_H > lo && t + FD_DEFAULT_H < hi {
        let fd = fd_problem(problem, t, k, FD_DEFAULT_H)?;
        if (fd - form).abs() > FD_AGREEMENT_RTOL * (1.0 + form.abs()) {
            return Ok(Some(format!(
                "{} member at t = {t}: finite difference {fd} disagrees with form {form} at k = {k}",
                criterion.tag()
            )));
        }
    }
    Ok(None)
}

/// Eigenvalue indices monitored by a criterion for a spec of the given size.
fn monitored_indices(criterion: Criterion, size: usize) -> Vec<usize> {
    match criterion.monitored() {
        Monitored::Min => vec![0],
        Monitored::Max | Monitored::WalkMax => vec![size - 1],
        Monitored::All => (0..size).collect(),
    }
}

const BD_PROPERTIES: &[&str] = &[
    "derivative forms agree pairwise",
    "finite differences confirm the form derivative",
    "bounds sandwich the extreme eigenvalues",
    "leading principal sections interlace",
    "eigenvector sign changes count down from the top",
    "chi sequence and principal minors are consistent",
    "criterion members have the certified slope sign",
    "strict-slope sets sit inside the refined sets",
];

fn verify_bd_point(
    problem: &ProblemSpec,
    spec: &BirthDeathSpec,
    t: f64,
    suite: &mut Suite,
) -> Result<()> {
    let n = spec.n;
    let size = spec.size();
    let point = SpectralPoint::compute(spec, t)?;
    let values = &point.spectrum.values;
    let (lo, hi) = spec.domain;

    // 0: four-way form agreement (errors carry the mismatch witness).
    let mut totals = Vec::with_capacity(size);
    for k in 0..size {
        match lambda_prime_all_at(&point, t, k) {
            Ok(forms) => totals.push(forms[0].total),
            Err(e) => {
                suite.fail(0, format!("t = {t}, k = {k}: {e}"));
                totals.push(f64::NAN);
            }
        }
    }

    // 1: finite-difference confirmation (skipped where the stencil leaves
    // the open domain).
    if t - FD_DEFAULT_H > lo && t + FD_DEFAULT_H < hi {
        for (k, &form) in totals.iter().enumerate() {
            if form.is_nan() {
                continue;
            }
            let fd = fd_problem(problem, t, k, FD_DEFAULT_H)?;
            if (fd - form).abs() > FD_AGREEMENT_RTOL * (1.0 + form.abs()) {
                suite.fail(1, format!("t = {t}, k = {k}: fd {fd} vs form {form}"));
            }
        }
    }

    // 2: bound sandwich m1 < λ_max ≤ m2 and 0 < λ_min < μ (strict for
    // n ≥ 1; the 1×1 case collapses to equalities).
    let b = bounds(spec, t)?;
    let lambda_min = values[0];
    let lambda_max = values[size - 1];
    let slack = 1e-12 * (1.0 + lambda_max.abs());
    if n == 0 {
        if (lambda_max - b.m1).abs() > slack {
            suite.fail(
                2,
                format!("t = {t}: 1x1 eigenvalue {lambda_max} != m1 {}", b.m1),
            );
        }
    } else {
        if !(b.m1 < lambda_max && lambda_max <= b.m2 + slack) {
            suite.fail(
                2,
                format!(
                    "t = {t}: lambda_max {lambda_max} outside (m1, m2] = ({}, {}]",
                    b.m1, b.m2
                ),
            );
        }
        if !(0.0 < lambda_min && lambda_min < b.mu) {
            suite.fail(
                2,
                format!(
                    "t = {t}: lambda_min {lambda_min} outside (0, mu) = (0, {})",
                    b.mu
                ),
            );
        }
    }

    // 3: interlacing of leading sections.
    if !crate::eigen::interlacing_check(spec, t)? {
        suite.fail(3, format!("t = {t}: section eigenvalues fail to interlace"));
    }

    // 4: the eigenvector of λ_k flips sign exactly n − k times.
    for (k, q) in point.spectrum.qvecs.iter().enumerate() {
        let changes = sign_changes(q)?;
        if changes != n - k {
            suite.fail(
                4,
                format!(
                    "t = {t}, k = {k}: {changes} sign changes, expected {}",
                    n - k
                ),
            );
        }
    }

    // 5: χ by recursion vs closed form, q(0) = (−1)^j χ_j, positive minors.
    let co = spec.coefficients(t)?;
    let rec = chi_recursion(&co);
    let closed = chi_closed_form(&co);
    for (j, (r, c)) in rec.iter().zip(&closed).enumerate() {
        if (r - c).abs() > 1e-10 * (1.0 + r.abs()) {
            suite.fail(
                5,
                format!("t = {t}, j = {j}: chi recursion {r} vs closed {c}"),
            );
        }
    }
    let q0 = q_at_zero(&assemble_s(spec, t)?);
    for (j, (q, c)) in q0.iter().zip(&rec).enumerate() {
        let expected = if j % 2 == 0 { *c } else { -c };
        if (q - expected).abs() > 1e-9 * (1.0 + expected.abs()) {
            suite.fail(
                5,
                format!("t = {t}, j = {j}: q(0) = {q}, expected {expected}"),
            );
        }
    }
    for (k, d) in delta_minors(&co).iter().enumerate() {
        if *d <= 0.0 {
            suite.fail(
                5,
                format!("t = {t}: principal minor {k} is {d}, not positive"),
            );
        }
    }

    // 6: soundness of every member verdict at this point.
    for criterion in Criterion::for_kind(crate::monotonicity::ModelKind::BirthDeath) {
        if !classify(problem, criterion, t)?.member {
            continue;
        }
        for k in monitored_indices(criterion, size) {
            if let Some(witness) = soundness_at(problem, spec, criterion, t, k)? {
                suite.fail(6, witness);
            }
        }
    }

    // 7: containment of the strict-slope sets in the refined sets.
    for (inner, outer) in [
        (Criterion::IsmailMaxUp, Criterion::BMaxUp),
        (Criterion::IsmailMaxDown, Criterion::BMaxDown),
    ] {
        if classify(problem, inner, t)?.member && !classify(problem, outer, t)?.member {
            suite.fail(
                7,
                format!(
                    "t = {t}: {} holds but {} does not",
                    inner.tag(),
                    outer.tag()
                ),
            );
        }
    }
    Ok(())
}

const RW_PROPERTIES: &[&str] = &[
    "derivative forms agree pairwise",
    "finite differences confirm the form derivative",
    "walk spectrum is symmetric and inside (-1, 1)",
    "identity-shift companion reproduces the walk spectrum",
    "even-size square-root reduction matches the spectrum",
    "criterion members have the certified slope sign",
    "sticky-probability set sits inside the product-slope set",
];

fn verify_rw_point(
    problem: &ProblemSpec,
    spec: &RandomWalkSpec,
    t: f64,
    suite: &mut Suite,
) -> Result<()> {
    let size = spec.size();
    let hat = rw_to_bd_hat(spec);
    let point = SpectralPoint::compute(&hat, t)?;
    let (lo, hi) = spec.domain;

    // 0 and 1: derivative certification through the companion.
    let mut totals = Vec::with_capacity(size);
    for k in 0..size {
        match lambda_prime_all_at(&point, t, k) {
            Ok(forms) => totals.push(forms[0].total),
            Err(e) => {
                suite.fail(0, format!("t = {t}, k = {k}: {e}"));
                totals.push(f64::NAN);
            }
        }
    }
    if t - FD_DEFAULT_H > lo && t + FD_DEFAULT_H < hi {
        for (k, &form) in totals.iter().enumerate() {
            if form.is_nan() {
                continue;
            }
            let fd = fd_problem(problem, t, k, FD_DEFAULT_H)?;
            if (fd - form).abs() > FD_AGREEMENT_RTOL * (1.0 + form.abs()) {
                suite.fail(1, format!("t = {t}, k = {k}: fd {fd} vs form {form}"));
            }
        }
    }

    // 2: symmetry about zero, range, and the odd-size kernel eigenvalue.
    let s_w = assemble_s_walk(spec, t)?;
    let walk_values = eigenvalues_bisect(&s_w, default_tol(&s_w))?;
    let tol = 1e-10 * (1.0 + walk_values[size - 1].abs());
    for k in 0..size {
        let mirrored = -walk_values[size - 1 - k];
        if (walk_values[k] - mirrored).abs() > tol {
            suite.fail(
                2,
                format!(
                    "t = {t}: lambda_{k} = {} not mirrored by lambda_{} = {}",
                    walk_values[k],
                    size - 1 - k,
                    walk_values[size - 1 - k]
                ),
            );
        }
        if walk_values[k] <= -1.0 || walk_values[k] >= 1.0 {
            suite.fail(
                2,
                format!("t = {t}: lambda_{k} = {} outside (-1, 1)", walk_values[k]),
            );
        }
    }
    if !size.is_multiple_of(2) && walk_values[size / 2].abs() > tol {
        suite.fail(
            2,
            format!(
                "t = {t}: odd size lacks the zero eigenvalue (middle = {})",
                walk_values[size / 2]
            ),
        );
    }

    // 3: eig(B) = eig(companion) − 1.
    for (k, (w, h)) in walk_values.iter().zip(&point.spectrum.values).enumerate() {
        if (w - (h - 1.0)).abs() > tol {
            suite.fail(
                3,
                format!(
                    "t = {t}, k = {k}: walk {w} vs shifted companion {}",
                    h - 1.0
                ),
            );
        }
    }

    // 4: even sizes only — positive spectrum equals square roots of the
    // reduced matrix's spectrum.
    if size.is_multiple_of(2) {
        let reduced = golub_kahan_reduce(spec)?;
        let s_r = assemble_s(&reduced, t)?;
        let nu = eigenvalues_bisect(&s_r, default_tol(&s_r))?;
        let mut expected: Vec<f64> = nu.iter().map(|v| v.max(0.0).sqrt()).collect();
        expected.sort_by(f64::total_cmp);
        let positive = &walk_values[size / 2..];
        for (k, (w, e)) in positive.iter().zip(&expected).enumerate() {
            if (w - e).abs() > 1e-10 * (1.0 + e.abs()) {
                suite.fail(
                    4,
                    format!("t = {t}: positive eigenvalue {w} vs sqrt of reduced {e} (rank {k})"),
                );
            }
        }
    }

    // 5: soundness of member verdicts (walk criteria monitor the largest
    // eigenvalue; companion derivatives equal walk derivatives).
    for criterion in Criterion::for_kind(crate::monotonicity::ModelKind::RandomWalk) {
        if !classify(problem, criterion, t)?.member {
            continue;
        }
        for k in monitored_indices(criterion, size) {
            if let Some(witness) = soundness_at(problem, &hat, criterion, t, k)? {
                suite.fail(5, witness);
            }
        }
    }

    // 6: containment of the sticky-probability set in the product-slope set.
    for (inner, outer) in [
        (Criterion::IsmailCMaxUp, Criterion::DMaxUp),
        (Criterion::IsmailCMaxDown, Criterion::DMaxDown),
    ] {
        if classify(problem, inner, t)?.member && !classify(problem, outer, t)?.member {
            suite.fail(
                6,
                format!(
                    "t = {t}: {} holds but {} does not",
                    inner.tag(),
                    outer.tag()
                ),
            );
        }
    }
    Ok(())
}

/// Run the full invariant suite on the interior grid.
pub fn verify(problem: &ProblemSpec, grid: usize) -> Result<VerifyOutcome> {
    let ts = grid_points(problem, grid)?;
    let names = match problem {
        ProblemSpec::BirthDeath(_) => BD_PROPERTIES,
        ProblemSpec::RandomWalk(_) => RW_PROPERTIES,
    };
    let partials: Vec<Suite> = ts
        .par_iter()
        .map(|&t| {
            let mut local = Suite::new(names);
            match problem {
                ProblemSpec::BirthDeath(spec) => verify_bd_point(problem, spec, t, &mut local)?,
                ProblemSpec::RandomWalk(spec) => verify_rw_point(problem, spec, t, &mut local)?,
            }
            Ok(local)
        })
        .collect::<Result<_>>()?;
    let mut suite = Suite::new(names);
    for partial in partials {
        suite.merge(partial);
    }
    Ok(suite.outcome())
}

/// Verification outcome as pass/fail lines.
#[must_use]
pub fn render_verify_report(outcome: &VerifyOutcome) -> String {
    let mut out = String::new();
    for check in &outcome.checks {
        if check.pass {
            out.push_str(&format!("PASS {}\n", check.name));
        } else {
            out.push_str(&format!("FAIL {}\n", check.name));
            for witness in &check.failures {
                out.push_str(&format!("     {witness}\n"));
            }
        }
    }
    out.push_str(if outcome.all_pass() {
        "all properties hold\n"
    } else {
        "property failures detected\n"
    });
    out
}

/// Verification outcome as CSV: `property,pass,detail`.
#[must_use]
pub fn render_verify_csv(outcome: &VerifyOutcome) -> String {
    let mut out = String::from("property,pass,detail\n");
    for check in &outcome.checks {
        let detail = check.failures.join("; ").replace(',', ";");
        out.push_str(&format!("{},{},{detail}\n", check.name, check.pass));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::CoeffExpr;

    fn exprs(srcs: &[&str]) -> Vec<CoeffExpr> {
        srcs.iter().map(|s| CoeffExpr::parse(s).unwrap()).collect()
    }

    fn reciprocal_problem() -> ProblemSpec {
        ProblemSpec::BirthDeath(
            BirthDeathSpec::new(
                2,
                exprs(&["1/t", "1-t", "1/t"]),
                exprs(&["1/(1-t)", "t", "1/(1-t)"]),
                (0.0, 1.0),
            )
            .unwrap(),
        )
    }

    fn two_site_walk_problem() -> ProblemSpec {
        ProblemSpec::RandomWalk(
            RandomWalkSpec::new(1, exprs(&["1/(1+t)", "1/(1+2*t)"]), (0.0, 1.0)).unwrap(),
        )
    }

    #[test]
    fn analyze_has_documented_shape() {
        let table = analyze(&reciprocal_problem(), 5).unwrap();
        assert_eq!(
            table.header,
            vec![
                "t",
                "lambda_0",
                "lambda_1",
                "lambda_2",
                "dlambda_0",
                "dlambda_1",
                "dlambda_2",
                "m1",
                "m2",
                "mu"
            ]
        );
        assert_eq!(table.rows.len(), 5);
        let csv = render_analyze_csv(&table);
        assert_eq!(csv.lines().count(), 6);
        assert!(csv.starts_with("t,lambda_0"));
    }

    #[test]
    fn analyze_output_is_deterministic() {
        let a = render_analyze_csv(&analyze(&reciprocal_problem(), 20).unwrap());
        let b = render_analyze_csv(&analyze(&reciprocal_problem(), 20).unwrap());
        assert_eq!(a, b);
    }

    #[test]
    fn walk_rows_are_shifted_to_the_walk_spectrum() {
        let table = analyze(&two_site_walk_problem(), 4).unwrap();
        for row in &table.rows {
            // The walk spectrum is symmetric about zero.
            assert!((row.eigenvalues[0] + row.eigenvalues[1]).abs() < 1e-9);
            assert!(row.eigenvalues[1] > 0.0 && row.eigenvalues[1] < 1.0);
        }
    }

    #[test]
    fn scan_table_contains_the_split_interval() {
        let intervals = scan_all(&reciprocal_problem(), &[Criterion::BMaxUp], 200).unwrap();
        assert_eq!(intervals.len(), 1);
        let csv = render_scan_csv(&intervals);
        assert!(csv.starts_with("criterion,direction,lo,hi\n"));
        assert!(csv.contains("B_MAX↑,increasing"));
        assert!((intervals[0].lo - 0.5).abs() < 1e-2);
    }

    #[test]
    fn trace_dump_covers_grid_and_indices() {
        let verdicts = trace(&reciprocal_problem(), &[Criterion::BMaxUp], 3).unwrap();
        assert_eq!(verdicts.len(), 3);
        for v in &verdicts {
            assert_eq!(v.witness.per_j.len(), 3);
        }
        let report = render_trace_report(&verdicts);
        assert!(report.contains("B_MAX↑ at t ="));
        assert!(report.contains("j = 2"));
        let csv = render_trace_csv(&verdicts);
        assert!(csv.starts_with("criterion,t,member,nondegenerate,j,disjunct,quantity,value\n"));
        assert!(csv.contains(",m1,"));
    }

    #[test]
    fn verify_passes_on_the_reference_problems() {
        for problem in [reciprocal_problem(), two_site_walk_problem()] {
            let outcome = verify(&problem, 40).unwrap();
            assert!(
                outcome.all_pass(),
                "failures: {}",
                render_verify_report(&outcome)
            );
        }
    }

    #[test]
    fn verify_report_prints_a_line_per_property() {
        let outcome = verify(&reciprocal_problem(), 10).unwrap();
        let report = render_verify_report(&outcome);
        assert_eq!(
            report.lines().filter(|l| l.starts_with("PASS")).count(),
            BD_PROPERTIES.len()
        );
        assert!(report.ends_with("all properties hold\n"));
        let csv = render_verify_csv(&outcome);
        assert_eq!(csv.lines().count(), BD_PROPERTIES.len() + 1);
    }

    #[test]
    fn formatted_numbers_round_trip() {
        for &x in &[0.1, -128.0 / 9.0, 1e-300, std::f64::consts::PI] {
            let parsed: f64 = fmt_num(x).parse().unwrap();
            assert_eq!(parsed, x);
        }
    }

    #[test]
    fn degenerate_grid_is_rejected() {
        assert!(matches!(
            analyze(&reciprocal_problem(), 1),
            Err(Error::Input(_))
        ));
    }
}
