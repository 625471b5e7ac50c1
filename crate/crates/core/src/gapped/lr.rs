use faer::{c64, Mat, MatRef};
use serde::Serialize;

use super::model::{LocalOperator, SpinChainModel};
use super::region::boundary_of;
use super::spectrum::SpectralData;
use crate::error::{Error, Result};
use crate::qlinalg::{dagger, matmul, op_norm};

/// A commutator norm above this marks the arrival of the signal.
pub const ARRIVAL_THRESHOLD: f64 = 0.1;

#[derive(Clone, Debug, Serialize)]
pub struct LrRow {
    pub distance: usize,
    pub t: f64,
    /// `‖[τ_t(A), B]‖`.
    pub norm: f64,
    /// `2‖A‖‖B‖|∂X| e^{-μ d} e^{v|t|}`.
    pub bound: f64,
    /// `|t| ≤ e^{-(1+μ)} d / v`.
    pub in_window: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LrSweep {
    pub rows: Vec<LrRow>,
    /// First grid time with norm above the threshold, per target site.
    pub arrivals: Vec<(usize, Option<f64>)>,
    /// Least-squares slope of distance against arrival time.
    pub velocity: Option<f64>,
    pub v_bound: f64,
    pub mu: f64,
}

impl LrSweep {
    /// Arrival times non-decreasing in distance (equal neighbours allowed).
    pub fn arrivals_monotone(&self) -> bool {
        let mut found: Vec<(usize, f64)> = self.arrivals.iter().filter_map(|&(d, t)| t.map(|t| (d, t))).collect();
        found.sort_by_key(|p| p.0);
        found.windows(2).all(|w| w[1].1 >= w[0].1)
    }

    /// Every row inside the validity window respects the bound.
    pub fn bound_holds(&self) -> bool {
        self.rows.iter().filter(|r| r.in_window).all(|r| r.norm <= r.bound + 1e-12)
    }
}

/// `±1` diagonal operators admit `‖[X, B]‖ = 2 ‖P_+ X P_-‖`.
fn sign_pattern(b: MatRef<'_, c64>) -> Option<Vec<bool>> {
    let n = b.nrows();
    let mut signs = Vec::with_capacity(n);
    for j in 0..n {
        for i in 0..n {
            let v = b[(i, j)];
            if i == j {
                if (v - c64::new(1.0, 0.0)).norm() < 1e-14 {
                    signs.push(true);
                } else if (v + c64::new(1.0, 0.0)).norm() < 1e-14 {
                    signs.push(false);
                } else {
                    return None;
                }
            } else if v.norm() > 0.0 {
                return None;
            }
        }
    }
    Some(signs)
}

fn commutator_norm_with(x: MatRef<'_, c64>, b: MatRef<'_, c64>, signs: Option<&[bool]>) -> Result<f64> {
    if let Some(signs) = signs {
        let plus: Vec<usize> = (0..signs.len()).filter(|&i| signs[i]).collect();
        let minus: Vec<usize> = (0..signs.len()).filter(|&i| !signs[i]).collect();
        if plus.is_empty() || minus.is_empty() {
            return Ok(0.0);
        }
        let block = Mat::from_fn(plus.len(), minus.len(), |i, j| x[(plus[i], minus[j])]);
        return Ok(2.0 * op_norm(block.as_ref())?);
    }
    let c = matmul(x, b) - matmul(b, x);
    op_norm(c.as_ref())
}

/// `‖[τ_t(A_x), B_y]‖` on a time grid for every target site in `ys`.
///
/// `a` and `b` are single-site operators; `b` is placed on each `y` in turn.
pub fn lr_probe(
    model: &SpinChainModel,
    spec: &SpectralData,
    a: &LocalOperator,
    b: MatRef<'_, c64>,
    ys: &[usize],
    t_grid: &[f64],
) -> Result<LrSweep> {
    let n = model.n_sites();
    if a.sites.len() != 1 {
        return Err(Error::InvalidParameter("A must act on a single site".into()));
    }
    let x = a.sites[0];
    if ys.iter().any(|&y| y == x || y >= n) {
        return Err(Error::InvalidRegion(format!("targets {ys:?} must differ from {x} and lie in the chain")));
    }
    let dims = model.local_dims();
    let all: Vec<usize> = (0..n).collect();
    let a_norm = op_norm(a.mat.as_ref())?;
    let b_norm = op_norm(b)?;
    let a_full = a.embed(dims, &all)?;
    let at = spec.to_eigenbasis(a_full.as_ref());
    drop(a_full);
    let bs: Vec<Mat<c64>> = ys
        .iter()
        .map(|&y| LocalOperator { sites: vec![y], mat: b.to_owned() }.embed(dims, &all))
        .collect::<Result<_>>()?;
    let signs: Vec<Option<Vec<bool>>> = bs.iter().map(|m| sign_pattern(m.as_ref())).collect();

    let v = 4.0 * model.j();
    let mu = super::LR_MU;
    let dx = boundary_of(&[x], n).len() as f64;
    let u = spec.vectors.as_ref();
    let ud = dagger(u);
    let dim = spec.dim();
    let mut rows = Vec::new();
    for &t in t_grid {
        let phased = Mat::from_fn(dim, dim, |i, j| at[(i, j)] * c64::cis((spec.energies[i] - spec.energies[j]) * t));
        let evolved = matmul(matmul(u, phased.as_ref()).as_ref(), ud.as_ref());
        for (k, &y) in ys.iter().enumerate() {
            let d = x.abs_diff(y);
            let norm = commutator_norm_with(evolved.as_ref(), bs[k].as_ref(), signs[k].as_deref())?;
            let bound = 2.0 * a_norm * b_norm * dx * (-mu * d as f64).exp() * (v * t.abs()).exp();
            let in_window = t.abs() <= (-(1.0 + mu)).exp() * d as f64 / v;
            rows.push(LrRow { distance: d, t, norm, bound, in_window });
        }
    }
    let arrivals: Vec<(usize, Option<f64>)> = ys
        .iter()
        .map(|&y| {
            let d = x.abs_diff(y);
            let t = rows.iter().find(|r| r.distance == d && r.norm > ARRIVAL_THRESHOLD).map(|r| r.t);
            (d, t)
        })
        .collect();
    let pts: Vec<(f64, f64)> = arrivals.iter().filter_map(|&(d, t)| t.map(|t| (t, d as f64))).collect();
    let velocity = if pts.len() >= 2 {
        let m = pts.len() as f64;
        let mt = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let md = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let stt: f64 = pts.iter().map(|p| (p.0 - mt).powi(2)).sum();
        let std: f64 = pts.iter().map(|p| (p.0 - mt) * (p.1 - md)).sum();
        (stt > 0.0).then(|| std / stt)
    } else {
        None
    };
    Ok(LrSweep { rows, arrivals, velocity, v_bound: v, mu })
}
