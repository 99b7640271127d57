use std::collections::BTreeMap;
use std::fmt::Write as _;

use isingrect::identities::{ResidualReport, Status};
use isingrect::partition::PartitionResult;
use isingrect::spectrum::Spectrum;
use serde::{Deserialize, Serialize};

/// Shortest round-trip form; exponent notation outside [1e-4, 1e15).
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-4..1e15).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn partition_csv(r: &PartitionResult) -> String {
    let mut s = String::from("route,logZ,rel_dev_to_reference,seconds,precision_bits,status\n");
    for (name, rec) in &r.routes {
        let status = match (&rec.skipped, &rec.error) {
            (Some(_), _) => "skipped",
            (_, Some(_)) => "error",
            _ => "ok",
        };
        let _ = writeln!(
            s,
            "{name},{},{},{},{},{status}",
            opt(rec.log_z),
            opt(rec.rel_dev_to_reference),
            num(rec.seconds),
            rec.precision_bits
        );
    }
    s
}

pub fn partition_text(r: &PartitionResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "L={} M={} K_h={} K_v={} k={}", r.l, r.m, r.k_h, r.k_v, r.k);
    if let Some(e) = r.eta_im_over_kprime {
        let _ = writeln!(s, "Im(eta)/K' = {e}");
    }
    for (name, rec) in &r.routes {
        let v = match (&rec.log_z, &rec.skipped, &rec.error) {
            (Some(z), _, _) => format!("{z:.15}  dev {:.2e}", rec.rel_dev_to_reference.unwrap_or(0.0)),
            (_, Some(w), _) => format!("skipped: {w}"),
            (_, _, Some(e)) => format!("error: {e}"),
            _ => String::new(),
        };
        let _ = writeln!(s, "{name:>15}  {v}");
    }
    if let Some(d) = r.checks.pf_eq_det {
        let _ = writeln!(s, "pf_eq_det {d:.3e}");
    }
    if let Some(d) = r.checks.swap_invariance {
        let _ = writeln!(s, "swap_invariance {d:.3e}");
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub result: PartitionResult,
    /// "a|b" → |Z_a/Z_b − 1|
    pub pairwise: BTreeMap<String, f64>,
    pub max_pairwise: f64,
}

impl CompareReport {
    pub fn new(result: PartitionResult) -> Self {
        let v: Vec<(&String, f64)> = result.routes.iter().filter_map(|(n, r)| r.log_z.map(|z| (n, z))).collect();
        let mut pairwise = BTreeMap::new();
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                pairwise.insert(format!("{}|{}", v[i].0, v[j].0), isingrect::partition::rel_dev(v[i].1, v[j].1));
            }
        }
        let max_pairwise = pairwise.values().fold(0.0f64, |m, &x| m.max(x));
        CompareReport { result, pairwise, max_pairwise }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub mu: usize,
    pub lambda: f64,
    pub gamma: f64,
    pub chi: f64,
    pub phi_re: f64,
    pub phi_im: f64,
    pub u_re: f64,
    pub u_im: f64,
    pub omega_re: f64,
    pub omega_im: f64,
    pub theta_re: f64,
    pub theta_im: f64,
    pub psi_re: f64,
    pub psi_im: f64,
    pub quantization_residual: f64,
}

pub fn spectrum_rows(s: &Spectrum<f64>) -> Vec<SpectrumRow> {
    s.points
        .iter()
        .map(|p| {
            let a = s.angles(p.mu);
            SpectrumRow {
                mu: p.mu,
                lambda: p.lambda,
                gamma: p.gamma,
                chi: p.chi,
                phi_re: a.phi.re,
                phi_im: a.phi.im,
                u_re: a.u.re,
                u_im: a.u.im,
                omega_re: a.omega.re,
                omega_im: a.omega.im,
                theta_re: a.theta.re,
                theta_im: a.theta.im,
                psi_re: a.psi.re,
                psi_im: a.psi.im,
                quantization_residual: a.quantization_residual,
            }
        })
        .collect()
}

const SPECTRUM_HEADER: &str =
    "mu,lambda,gamma,chi,phi_re,phi_im,u_re,u_im,omega_re,omega_im,theta_re,theta_im,psi_re,psi_im,quantization_residual";

pub fn spectrum_csv(rows: &[SpectrumRow]) -> String {
    let mut s = format!("{SPECTRUM_HEADER}\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            r.mu,
            num(r.lambda),
            num(r.gamma),
            num(r.chi),
            num(r.phi_re),
            num(r.phi_im),
            num(r.u_re),
            num(r.u_im),
            num(r.omega_re),
            num(r.omega_im),
            num(r.theta_re),
            num(r.theta_im),
            num(r.psi_re),
            num(r.psi_im),
            num(r.quantization_residual)
        );
    }
    s
}

pub fn spectrum_text(rows: &[SpectrumRow]) -> String {
    let mut s = String::from("  mu        lambda         gamma           chi        u (re, im)\n");
    for r in rows {
        let _ = writeln!(
            s,
            "{:>4} {:>13.6e} {:>13.6e} {:>13.6e}   ({:.6}, {:.6})",
            r.mu, r.lambda, r.gamma, r.chi, r.u_re, r.u_im
        );
    }
    s
}

fn status_word(s: &Status) -> &'static str {
    match s {
        Status::Pass => "pass",
        Status::Fail => "fail",
        Status::Skipped { .. } => "skipped",
        Status::Error { .. } => "error",
    }
}

pub fn identities_csv(r: &ResidualReport) -> String {
    let mut s = String::from("identity_id,equation_tag,gating,residual_kind,max_abs_residual,tolerance,status\n");
    for e in &r.entries {
        let kind = serde_json::to_value(e.residual_kind).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default();
        let _ = writeln!(
            s,
            "{},{},{},{kind},{},{},{}",
            e.identity_id,
            e.equation_tag,
            e.gating,
            opt(e.max_abs_residual),
            num(e.tolerance),
            status_word(&e.status)
        );
    }
    s
}

pub fn identities_text(r: &ResidualReport) -> String {
    let mut s = String::new();
    for e in &r.entries {
        let res = e.max_abs_residual.map(|x| format!("{x:.3e}")).unwrap_or_else(|| "-".into());
        let g = if e.gating { "gating" } else { "diag" };
        let _ = writeln!(s, "{:<30} {:>10} {:>9} {:<6} {}", e.identity_id, res, format!("{:.0e}", e.tolerance), g, status_word(&e.status));
    }
    let _ = writeln!(s, "{}", if r.passed { "PASSED" } else { "FAILED" });
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub k: f64,
    #[serde(rename = "K_h")]
    pub k_h: f64,
    #[serde(rename = "K_v")]
    pub k_v: f64,
    pub log_z: BTreeMap<String, Option<f64>>,
    pub max_deviation: f64,
}

pub fn scan_csv(rows: &[ScanRow], routes: &[String]) -> String {
    let mut s = String::from("k,K_h,K_v");
    for r in routes {
        let _ = write!(s, ",logZ_{r}");
    }
    s.push_str(",max_deviation\n");
    for row in rows {
        let _ = write!(s, "{},{},{}", num(row.k), num(row.k_h), num(row.k_v));
        for r in routes {
            let _ = write!(s, ",{}", opt(row.log_z.get(r).copied().flatten()));
        }
        let _ = writeln!(s, ",{}", num(row.max_deviation));
    }
    s
}
