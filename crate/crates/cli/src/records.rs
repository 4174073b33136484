//! Serializable output records. JSON keys equal the CSV column names.

use recoil_bec::branch::Mu1Bracket;
use recoil_bec::oracle::{FvCase, ScanRow};
use recoil_bec::{CriticalPoints64, GratingProfile64, LimitScan, Mu1Side, PhasePoint64};
use serde::{Deserialize, Serialize};

/// Column order of `point` and `sweep` CSV output.
pub const POINT_COLUMNS: [&str; 15] = [
    "mu", "branch", "delta", "rho", "pressure", "entropy", "energy", "n0", "nq", "nb", "corr_qb", "corr_0b", "corr_0q",
    "E_plus", "E_minus",
];

/// CSV float encoding: 17 significant digits, enough to round-trip.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub mu: f64,
    pub branch: String,
    pub delta: f64,
    pub rho: f64,
    pub pressure: f64,
    pub entropy: f64,
    pub energy: f64,
    pub n0: f64,
    pub nq: f64,
    pub nb: f64,
    pub corr_qb: f64,
    pub corr_0b: f64,
    pub corr_0q: f64,
    pub E_plus: f64,
    pub E_minus: f64,
}

impl From<&PhasePoint64> for PointRecord {
    fn from(p: &PhasePoint64) -> Self {
        Self {
            mu: p.mu,
            branch: p.branch.label().to_string(),
            delta: p.delta,
            rho: p.rho_total,
            pressure: p.pressure,
            entropy: p.entropy_density,
            energy: p.energy_density,
            n0: p.n0,
            nq: p.nq,
            nb: p.nb,
            corr_qb: p.corr_qb,
            corr_0b: p.corr_0b,
            corr_0q: p.corr_0q,
            E_plus: p.e_plus,
            E_minus: p.e_minus,
        }
    }
}

impl PointRecord {
    pub fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![fmt_f64(self.mu), self.branch.clone()];
        out.extend(
            [
                self.delta,
                self.rho,
                self.pressure,
                self.entropy,
                self.energy,
                self.n0,
                self.nq,
                self.nb,
                self.corr_qb,
                self.corr_0b,
                self.corr_0q,
                self.E_plus,
                self.E_minus,
            ]
            .map(fmt_f64),
        );
        out
    }
}

fn side_label(side: Option<Mu1Side>) -> String {
    side.map_or_else(|| "straddles_mu_c".to_string(), |s| s.to_string())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub model: u8,
    pub mu_c: f64,
    pub delta0: f64,
    pub mu0: f64,
    pub alpha: f64,
    pub mu1: f64,
    /// `|p3(mu1) - max(p1, p2)(mu1)|`.
    pub mu1_residual: f64,
    pub subcase: String,
    pub mu1_side: String,
    /// Grid intervals of the coarse bracket scan; the fine scan uses twice as many.
    pub scan_steps: usize,
    pub scan_side: String,
    pub scan_side_refined: String,
    /// Both scans agree with `mu1_side`.
    pub side_stable: bool,
}

pub const BOUNDARY_COLUMNS: [&str; 13] = [
    "model",
    "mu_c",
    "delta0",
    "mu0",
    "alpha",
    "mu1",
    "mu1_residual",
    "subcase",
    "mu1_side",
    "scan_steps",
    "scan_side",
    "scan_side_refined",
    "side_stable",
];

impl BoundaryRecord {
    pub fn new(model: u8, c: &CriticalPoints64, steps: usize, coarse: &Mu1Bracket<f64>, fine: &Mu1Bracket<f64>) -> Self {
        let stable = coarse.side == Some(c.mu1_side) && fine.side == Some(c.mu1_side);
        Self {
            model,
            mu_c: c.mu_c,
            delta0: c.delta0,
            mu0: c.mu0,
            alpha: c.alpha,
            mu1: c.mu1,
            mu1_residual: c.mu1_residual,
            subcase: c.subcase.to_string(),
            mu1_side: c.mu1_side.to_string(),
            scan_steps: steps,
            scan_side: side_label(coarse.side),
            scan_side_refined: side_label(fine.side),
            side_stable: stable,
        }
    }

    pub fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![self.model.to_string()];
        out.extend([self.mu_c, self.delta0, self.mu0, self.alpha, self.mu1, self.mu1_residual].map(fmt_f64));
        out.extend([
            self.subcase.clone(),
            self.mu1_side.clone(),
            self.scan_steps.to_string(),
            self.scan_side.clone(),
            self.scan_side_refined.clone(),
            self.side_stable.to_string(),
        ]);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GratingSample {
    pub x: f64,
    pub rho: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GratingRecord {
    pub mu: f64,
    pub branch: String,
    pub period: f64,
    pub mean_density: f64,
    pub amplitude: f64,
    pub phase: f64,
    pub samples: Vec<GratingSample>,
}

impl GratingRecord {
    pub fn new(point: &PhasePoint64, g: &GratingProfile64) -> Self {
        Self {
            mu: point.mu,
            branch: point.branch.label().to_string(),
            period: g.period,
            mean_density: g.mean_density,
            amplitude: g.amplitude,
            phase: g.phase,
            samples: g.samples.iter().map(|&(x, rho)| GratingSample { x, rho }).collect(),
        }
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvRow {
    pub L: f64,
    pub h: f64,
    pub cutoff: usize,
    pub eta2: f64,
    pub zeta: f64,
    pub rho: f64,
    pub delta_V: f64,
    pub n0: f64,
    pub nq: f64,
    pub nb: f64,
    pub E_minus: f64,
    pub V_E_minus: f64,
    pub discrepancy: f64,
    pub iterations: usize,
    pub monotone: bool,
}

pub const FV_COLUMNS: [&str; 15] = [
    "L",
    "h",
    "cutoff",
    "eta2",
    "zeta",
    "rho",
    "delta_V",
    "n0",
    "nq",
    "nb",
    "E_minus",
    "V_E_minus",
    "discrepancy",
    "iterations",
    "monotone",
];

impl From<&ScanRow<f64>> for FvRow {
    fn from(r: &ScanRow<f64>) -> Self {
        Self {
            L: r.box_side,
            h: r.h,
            cutoff: r.cutoff,
            eta2: r.eta2,
            zeta: r.zeta,
            rho: r.rho,
            delta_V: r.delta_v,
            n0: r.n0,
            nq: r.nq,
            nb: r.nb,
            E_minus: r.e_minus,
            V_E_minus: r.v_e_minus,
            discrepancy: r.discrepancy,
            iterations: r.iterations,
            monotone: r.monotone,
        }
    }
}

impl FvRow {
    pub fn csv_fields(&self) -> Vec<String> {
        let mut out = vec![fmt_f64(self.L), fmt_f64(self.h), self.cutoff.to_string()];
        out.extend(
            [
                self.eta2,
                self.zeta,
                self.rho,
                self.delta_V,
                self.n0,
                self.nq,
                self.nb,
                self.E_minus,
                self.V_E_minus,
                self.discrepancy,
            ]
            .map(fmt_f64),
        );
        out.extend([self.iterations.to_string(), self.monotone.to_string()]);
        out
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FvRecord {
    pub mu: f64,
    pub branch: String,
    /// `"A"`: gapped lower mode; `"B"`: gap closing like `1/V`.
    pub case: String,
    pub E_minus_slope: f64,
    pub predicted_V_E_minus: Option<f64>,
    pub final_error: f64,
    pub extrapolated_error: f64,
    pub rows: Vec<FvRow>,
}

impl From<&LimitScan<f64>> for FvRecord {
    fn from(s: &LimitScan<f64>) -> Self {
        Self {
            mu: s.mu,
            branch: s.analytic.branch.label().to_string(),
            case: match s.case {
                FvCase::A => "A",
                FvCase::B => "B",
            }
            .to_string(),
            E_minus_slope: s.e_minus_slope,
            predicted_V_E_minus: s.predicted_v_e_minus,
            final_error: s.final_error,
            extrapolated_error: s.extrapolated_error,
            rows: s.rows.iter().map(FvRow::from).collect(),
        }
    }
}
