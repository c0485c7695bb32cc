//! Constrained Optimization BY Linear Approximation.
//!
//! Follows Powell's method: the objective and any inequality constraints
//! `c_k(θ) ≥ 0` are modelled by linear interpolation over a simplex of `d+1`
//! vertices. Each iteration solves the linear model inside a trust region of
//! radius ρ (first reducing the worst constraint violation, then the
//! objective), replaces a vertex, and keeps the simplex well shaped. ρ only
//! shrinks, from `rhobeg` down to `rhoend`.
//!
//! Simplex storage: `sim[d]` is the pole (best vertex) and `sim[j]`, `j < d`,
//! is the displacement of vertex `j` from the pole. `simi` is the inverse of
//! the displacement matrix, stored by rows.

#![allow(clippy::needless_range_loop)]

use serde::{Deserialize, Serialize};

use super::{checked, Objective, Observer, OptResult};
use crate::error::{Error, Result};

/// Simplex acceptability: vertex distance factor σ ≥ ALPHA·ρ.
const ALPHA: f64 = 0.25;
/// Simplex acceptability: edge length η ≤ BETA·ρ.
const BETA: f64 = 2.1;
/// Length factor of a geometry-improving step.
const GAMMA: f64 = 0.5;
/// Edge factor used when choosing the vertex to drop.
const DELTA: f64 = 1.1;
/// Constraint violation treated as feasible when ranking returned points.
const FEASIBILITY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CobylaConfig {
    pub rhobeg: f64,
    pub rhoend: f64,
    pub maxfun: usize,
}

impl Default for CobylaConfig {
    fn default() -> Self {
        CobylaConfig {
            rhobeg: 1.0,
            rhoend: 1e-4,
            maxfun: 1000,
        }
    }
}

impl CobylaConfig {
    pub fn validate(&self, dim: usize) -> Result<()> {
        if !(self.rhobeg > self.rhoend && self.rhoend > 0.0) {
            return Err(Error::validation(format!(
                "need rhobeg > rhoend > 0, got {} and {}",
                self.rhobeg, self.rhoend
            )));
        }
        if self.maxfun < dim + 2 {
            return Err(Error::validation(format!(
                "maxfun {} is below dimension + 2 = {}",
                self.maxfun,
                dim + 2
            )));
        }
        Ok(())
    }
}

/// Unconstrained COBYLA.
pub fn cobyla_minimize<O: Objective + ?Sized>(
    objective: &O,
    x0: &[f64],
    cfg: &CobylaConfig,
    observer: Option<Observer<'_>>,
) -> Result<OptResult> {
    cobyla_minimize_constrained(objective, &[], x0, cfg, observer)
}

type Constraint<'a> = &'a dyn Fn(&[f64]) -> f64;

/// COBYLA with inequality constraints `c(θ) ≥ 0`.
///
/// `history` holds every objective evaluation in order; `iterations` counts
/// the evaluations made after the initial simplex.
pub fn cobyla_minimize_constrained<O: Objective + ?Sized>(
    objective: &O,
    constraints: &[Constraint<'_>],
    x0: &[f64],
    cfg: &CobylaConfig,
    observer: Option<Observer<'_>>,
) -> Result<OptResult> {
    let n = x0.len();
    if n == 0 {
        return Err(Error::validation("empty starting point"));
    }
    cfg.validate(n)?;
    let mut run = Run {
        objective,
        constraints,
        observer,
        maxfun: cfg.maxfun,
        evals: 0,
        history: Vec::new(),
        best: None,
        stopped: false,
    };
    let converged = run.solve(x0, cfg)?;
    let n_initial = (n + 1).min(run.evals);
    let best = run.best.expect("at least one evaluation");
    Ok(OptResult {
        best_theta: best.x,
        best_value: best.f,
        evals: run.evals,
        grad_evals: 0,
        iterations: run.evals - n_initial,
        converged,
        history: run.history,
    })
}

struct Point {
    x: Vec<f64>,
    f: f64,
    resmax: f64,
}

impl Point {
    fn better_than(&self, other: &Point) -> bool {
        let (a, b) = (self.resmax <= FEASIBILITY_TOL, other.resmax <= FEASIBILITY_TOL);
        match (a, b) {
            (true, true) => self.f < other.f,
            (true, false) => true,
            (false, true) => false,
            (false, false) => self.resmax < other.resmax || (self.resmax == other.resmax && self.f < other.f),
        }
    }
}

struct Run<'a, 'o, O: ?Sized> {
    objective: &'a O,
    constraints: &'a [Constraint<'a>],
    observer: Option<Observer<'o>>,
    maxfun: usize,
    evals: usize,
    history: Vec<(usize, f64)>,
    best: Option<Point>,
    stopped: bool,
}

/// Signals that the evaluation budget (or the observer) ended the run.
struct Exhausted;

impl<O: Objective + ?Sized> Run<'_, '_, O> {
    /// Evaluates constraints, objective and max violation into `con`
    /// (layout `[c_0 … c_{m-1}, f, resmax]`).
    fn evaluate(&mut self, x: &[f64], con: &mut [f64]) -> Result<std::result::Result<(), Exhausted>> {
        if self.evals >= self.maxfun || self.stopped {
            return Ok(Err(Exhausted));
        }
        self.evals += 1;
        let it = self.evals;
        let m = self.constraints.len();
        let f = checked(
            self.objective.value(x).map_err(|e| e.at_iteration(it))?,
            it,
            "objective",
        )?;
        let mut resmax: f64 = 0.0;
        for (k, c) in self.constraints.iter().enumerate() {
            let v = checked(c(x), it, "constraint")?;
            con[k] = v;
            resmax = resmax.max(-v);
        }
        con[m] = f;
        con[m + 1] = resmax;
        self.history.push((it, f));
        let p = Point {
            x: x.to_vec(),
            f,
            resmax,
        };
        if self.best.as_ref().is_none_or(|b| p.better_than(b)) {
            self.best = Some(p);
        }
        if let Some(obs) = self.observer.as_mut() {
            if obs(it, x, f).map_err(|e| e.at_iteration(it))? {
                self.stopped = true;
            }
        }
        Ok(Ok(()))
    }

    /// Returns whether ρ reached `rhoend`.
    fn solve(&mut self, x0: &[f64], cfg: &CobylaConfig) -> Result<bool> {
        let n = x0.len();
        let m = self.constraints.len();
        let (mp, mpp) = (m, m + 1);
        let np = n;

        let mut rho = cfg.rhobeg;
        let mut parmu = 0.0;
        let mut x = x0.to_vec();
        let mut con = vec![0.0; m + 2];

        let mut sim: Vec<Vec<f64>> = (0..=n)
            .map(|j| {
                if j == np {
                    x0.to_vec()
                } else {
                    let mut col = vec![0.0; n];
                    col[j] = rho;
                    col
                }
            })
            .collect();
        let mut simi: Vec<Vec<f64>> = (0..n)
            .map(|j| {
                let mut row = vec![0.0; n];
                row[j] = 1.0 / rho;
                row
            })
            .collect();
        let mut datmat = vec![vec![0.0; m + 2]; n + 1];

        // Initial simplex: the start point, then one step of ρ along each axis.
        // A better new vertex is swapped into the pole as soon as it is found.
        if self.evaluate(&x, &mut con)?.is_err() {
            return Ok(false);
        }
        datmat[np].clone_from(&con);
        for j in 0..n {
            x[j] += rho;
            if self.evaluate(&x, &mut con)?.is_err() {
                return Ok(false);
            }
            datmat[j].clone_from(&con);
            if datmat[np][mp] <= con[mp] {
                x[j] = sim[np][j];
            } else {
                sim[np][j] = x[j];
                datmat.swap(j, np);
                datmat[np].clone_from(&con);
                for k in 0..=j {
                    sim[k][j] = -rho;
                    let temp: f64 = (k..=j).map(|i| simi[i][k]).sum();
                    simi[j][k] = -temp;
                }
            }
        }

        let mut ibrnch = true;
        let mut a = vec![vec![0.0; n]; m + 1];
        let mut vsig = vec![0.0; n];
        let mut veta = vec![0.0; n];

        loop {
            // Move the vertex with the least merit value into the pole.
            let merit = |col: &[f64], mu: f64| col[mp] + mu * col[mpp];
            let mut nbest = np;
            let mut phimin = merit(&datmat[np], parmu);
            for j in 0..n {
                let temp = merit(&datmat[j], parmu);
                if temp < phimin {
                    nbest = j;
                    phimin = temp;
                } else if temp == phimin && parmu == 0.0 && datmat[j][mpp] < datmat[nbest][mpp] {
                    nbest = j;
                }
            }
            if nbest < np {
                let (lo, hi) = datmat.split_at_mut(np);
                std::mem::swap(&mut lo[nbest], &mut hi[0]);
                for i in 0..n {
                    let temp = sim[nbest][i];
                    sim[nbest][i] = 0.0;
                    sim[np][i] += temp;
                    let mut tempa = 0.0;
                    for k in 0..n {
                        sim[k][i] -= temp;
                        tempa -= simi[k][i];
                    }
                    simi[nbest][i] = tempa;
                }
            }

            // Stop if simi has drifted too far from the inverse of sim.
            let mut error: f64 = 0.0;
            for i in 0..n {
                for j in 0..n {
                    let mut temp = if i == j { -1.0 } else { 0.0 };
                    for k in 0..n {
                        temp += simi[i][k] * sim[j][k];
                    }
                    error = error.max(temp.abs());
                }
            }
            if error > 0.1 {
                return Ok(false);
            }

            // Linear models: constraint gradients, then minus the objective gradient.
            for k in 0..=mp {
                con[k] = -datmat[np][k];
                let w: Vec<f64> = (0..n).map(|j| datmat[j][k] + con[k]).collect();
                for i in 0..n {
                    let mut temp: f64 = (0..n).map(|j| w[j] * simi[j][i]).sum();
                    if k == mp {
                        temp = -temp;
                    }
                    a[k][i] = temp;
                }
            }

            let parsig = ALPHA * rho;
            let pareta = BETA * rho;
            let mut acceptable = true;
            for j in 0..n {
                let wsig: f64 = simi[j].iter().map(|v| v * v).sum();
                let weta: f64 = sim[j].iter().map(|v| v * v).sum();
                vsig[j] = 1.0 / wsig.sqrt();
                veta[j] = weta.sqrt();
                if vsig[j] < parsig || veta[j] > pareta {
                    acceptable = false;
                }
            }

            if !ibrnch && !acceptable {
                // Geometry step: replace the worst-shaped vertex.
                let mut jdrop = None;
                let mut temp = pareta;
                for j in 0..n {
                    if veta[j] > temp {
                        jdrop = Some(j);
                        temp = veta[j];
                    }
                }
                if jdrop.is_none() {
                    for j in 0..n {
                        if vsig[j] < temp {
                            jdrop = Some(j);
                            temp = vsig[j];
                        }
                    }
                }
                let jdrop = jdrop.expect("unacceptable simplex has a vertex to drop");
                let scale = GAMMA * rho * vsig[jdrop];
                let mut dx: Vec<f64> = simi[jdrop].iter().map(|v| scale * v).collect();
                let (mut cvmaxp, mut cvmaxm): (f64, f64) = (0.0, 0.0);
                let mut sum = 0.0;
                for k in 0..=mp {
                    sum = dot(&a[k], &dx);
                    if k < mp {
                        let temp = datmat[np][k];
                        cvmaxp = cvmaxp.max(-sum - temp);
                        cvmaxm = cvmaxm.max(sum - temp);
                    }
                }
                if parmu * (cvmaxp - cvmaxm) > sum + sum {
                    dx.iter_mut().for_each(|v| *v = -*v);
                }
                replace_vertex(&mut sim, &mut simi, jdrop, &dx);
                for i in 0..n {
                    x[i] = sim[np][i] + dx[i];
                }
                if self.evaluate(&x, &mut con)?.is_err() {
                    return Ok(false);
                }
                datmat[jdrop].clone_from(&con);
                ibrnch = true;
                continue;
            }

            // Trust-region step from the pole.
            let (dx, ifull) = trstlp(n, m, &a, &con, rho);
            let mut reduce = false;
            if !ifull && dot(&dx, &dx) < 0.25 * rho * rho {
                ibrnch = true;
                reduce = true;
            }

            if !reduce {
                let mut resnew: f64 = 0.0;
                con[mp] = 0.0;
                let mut sum = 0.0;
                for k in 0..=mp {
                    sum = con[k] - dot(&a[k], &dx);
                    if k < mp {
                        resnew = resnew.max(sum);
                    }
                }
                let prerec = datmat[np][mpp] - resnew;
                let barmu = if prerec > 0.0 { sum / prerec } else { 0.0 };
                if parmu < 1.5 * barmu {
                    parmu = 2.0 * barmu;
                    let phi = merit(&datmat[np], parmu);
                    let pole_changes = (0..n).any(|j| {
                        let temp = merit(&datmat[j], parmu);
                        temp < phi || (temp == phi && parmu == 0.0 && datmat[j][mpp] < datmat[np][mpp])
                    });
                    if pole_changes {
                        continue;
                    }
                }
                let mut prerem = parmu * prerec - sum;

                for i in 0..n {
                    x[i] = sim[np][i] + dx[i];
                }
                ibrnch = true;
                if self.evaluate(&x, &mut con)?.is_err() {
                    return Ok(false);
                }
                let (f, resmax) = (con[mp], con[mpp]);

                let vmold = merit(&datmat[np], parmu);
                let vmnew = f + parmu * resmax;
                let mut trured = vmold - vmnew;
                if parmu == 0.0 && f == datmat[np][mp] {
                    prerem = prerec;
                    trured = datmat[np][mpp] - resmax;
                }

                // Choose the vertex that the trial point replaces; mandatory
                // when the merit function decreased.
                let mut ratio = if trured <= 0.0 { 1.0 } else { 0.0 };
                let mut jdrop = None;
                let mut sigbar = vec![0.0; n];
                for j in 0..n {
                    let temp = dot(&simi[j], &dx).abs();
                    if temp > ratio {
                        jdrop = Some(j);
                        ratio = temp;
                    }
                    sigbar[j] = temp * vsig[j];
                }
                let mut edgmax = DELTA * rho;
                let mut far = None;
                for j in 0..n {
                    if sigbar[j] >= parsig || sigbar[j] >= vsig[j] {
                        let mut temp = veta[j];
                        if trured > 0.0 {
                            temp = dx
                                .iter()
                                .zip(&sim[j])
                                .map(|(d, s)| (d - s) * (d - s))
                                .sum::<f64>()
                                .sqrt();
                        }
                        if temp > edgmax {
                            far = Some(j);
                            edgmax = temp;
                        }
                    }
                }
                if far.is_some() {
                    jdrop = far;
                }
                if let Some(jdrop) = jdrop {
                    replace_vertex(&mut sim, &mut simi, jdrop, &dx);
                    datmat[jdrop].clone_from(&con);
                    if trured > 0.0 && trured >= 0.1 * prerem {
                        continue;
                    }
                }
            }

            if !acceptable {
                ibrnch = false;
                continue;
            }
            if rho > cfg.rhoend {
                rho *= 0.5;
                if rho <= 1.5 * cfg.rhoend {
                    rho = cfg.rhoend;
                }
                if parmu > 0.0 {
                    let mut denom: f64 = 0.0;
                    let (mut cmin, mut cmax) = (0.0, 0.0);
                    for k in 0..=mp {
                        cmin = datmat[np][k];
                        cmax = cmin;
                        for col in datmat.iter().take(n) {
                            cmin = f64::min(cmin, col[k]);
                            cmax = f64::max(cmax, col[k]);
                        }
                        if k < m && cmin < 0.5 * cmax {
                            let temp = f64::max(cmax, 0.0) - cmin;
                            denom = if denom <= 0.0 { temp } else { denom.min(temp) };
                        }
                    }
                    if denom == 0.0 {
                        parmu = 0.0;
                    } else if cmax - cmin < parmu * denom {
                        parmu = (cmax - cmin) / denom;
                    }
                }
                continue;
            }
            return Ok(true);
        }
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Replaces vertex `jdrop` by `pole + dx` and updates the inverse by a rank-one correction.
fn replace_vertex(sim: &mut [Vec<f64>], simi: &mut [Vec<f64>], jdrop: usize, dx: &[f64]) {
    let n = dx.len();
    sim[jdrop].copy_from_slice(dx);
    let temp = dot(&simi[jdrop], dx);
    simi[jdrop].iter_mut().for_each(|v| *v /= temp);
    let pivot = simi[jdrop].clone();
    for (j, row) in simi.iter_mut().enumerate().take(n) {
        if j != jdrop {
            let temp = dot(row, dx);
            for (r, p) in row.iter_mut().zip(&pivot) {
                *r -= temp * p;
            }
        }
    }
}

/// True when `value` is negligible next to `scale`, i.e. adding a tenth of it
/// does not change `scale` in floating point.
fn negligible(scale: f64, value: f64) -> bool {
    let acca = scale + 0.1 * value.abs();
    let accb = scale + 0.2 * value.abs();
    scale >= acca || acca >= accb
}

fn rotate(z: &mut [Vec<f64>], keep: usize, other: usize, alpha: f64, beta: f64) {
    // z[keep] ← α·z[other] + β·z[keep];  z[other] ← α·z[keep] − β·z[other]
    for i in 0..z[keep].len() {
        let t = alpha * z[other][i] + beta * z[keep][i];
        z[other][i] = alpha * z[keep][i] - beta * z[other][i];
        z[keep][i] = t;
    }
}

/// Trust-region subproblem on the linear models.
///
/// `a[k]` is the gradient of constraint `k` for `k < m` and `a[m]` is minus
/// the objective gradient; `b[k]` is minus the constraint value at the pole.
/// Stage one minimizes the largest residual `b_k − a_k·dx` inside `‖dx‖ ≤ ρ`;
/// stage two then decreases the objective while holding the attained
/// residual. Returns the step and whether it reached the trust-region boundary.
fn trstlp(n: usize, m: usize, a: &[Vec<f64>], b: &[f64], rho: f64) -> (Vec<f64>, bool) {
    let mut z: Vec<Vec<f64>> = (0..n)
        .map(|k| {
            let mut col = vec![0.0; n];
            col[k] = 1.0;
            col
        })
        .collect();
    let mut zdota = vec![0.0; n];
    let mut dx = vec![0.0; n];
    let mut dxnew = vec![0.0; n];
    let mut sdirn = vec![0.0; n];
    let mut iact: Vec<usize> = (0..=m).collect();
    let mut vmultc = vec![0.0; m + 1];
    let mut vmultd = vec![0.0; m + 1];

    let mut mcon = m;
    let mut nact = 0usize;
    let mut resmax: f64 = 0.0;
    let mut icon = 0usize;
    for k in 0..m {
        if b[k] > resmax {
            resmax = b[k];
            icon = k;
        }
    }
    for k in 0..m {
        vmultc[k] = resmax - b[k];
    }

    #[derive(Clone, Copy)]
    enum At {
        Stage2,
        Restart,
        Iterate,
        Delete,
        Stage2Direction,
        Step,
        Finish,
    }
    let mut at = if resmax == 0.0 { At::Stage2 } else { At::Restart };

    let (mut optold, mut icount, mut nactx) = (0.0, 0u32, 0usize);
    let mut resold = 0.0;

    loop {
        match at {
            At::Stage2 => {
                mcon = m + 1;
                icon = m;
                iact[m] = m;
                vmultc[m] = 0.0;
                at = At::Restart;
            }
            At::Restart => {
                optold = 0.0;
                icount = 0;
                at = At::Iterate;
            }
            At::Iterate => {
                // Stop a stage after three iterations without progress in
                // either the best value or the size of the active set.
                let optnew = if mcon == m { resmax } else { -dot(&dx, &a[m]) };
                if icount == 0 || optnew < optold {
                    optold = optnew;
                    nactx = nact;
                    icount = 3;
                } else if nact > nactx {
                    nactx = nact;
                    icount = 3;
                } else {
                    icount -= 1;
                    if icount == 0 {
                        at = At::Finish;
                        continue;
                    }
                }

                if icon < nact {
                    at = At::Delete;
                    continue;
                }

                // Add constraint iact[icon]: rotate so the trailing columns
                // of z are orthogonal to its gradient.
                let kk = iact[icon];
                dxnew.copy_from_slice(&a[kk]);
                let mut tot = 0.0;
                for k in (nact..n).rev() {
                    let mut sp = 0.0;
                    let mut spabs = 0.0;
                    for i in 0..n {
                        let temp = z[k][i] * dxnew[i];
                        sp += temp;
                        spabs += temp.abs();
                    }
                    if negligible(spabs, sp) {
                        sp = 0.0;
                    }
                    if tot == 0.0 {
                        tot = sp;
                    } else {
                        let kp = k + 1;
                        let temp = (sp * sp + tot * tot).sqrt();
                        let alpha = sp / temp;
                        let beta = tot / temp;
                        tot = temp;
                        for i in 0..n {
                            let t = alpha * z[k][i] + beta * z[kp][i];
                            z[kp][i] = alpha * z[kp][i] - beta * z[k][i];
                            z[k][i] = t;
                        }
                    }
                }

                if tot != 0.0 {
                    nact += 1;
                    zdota[nact - 1] = tot;
                    vmultc[icon] = vmultc[nact - 1];
                    vmultc[nact - 1] = 0.0;
                } else {
                    // The new gradient depends on the active ones: one of
                    // them has to leave to make room.
                    let mut ratio = -1.0;
                    let mut iout = 0usize;
                    for k in (0..nact).rev() {
                        let mut zdotv = 0.0;
                        let mut zdvabs = 0.0;
                        for i in 0..n {
                            let temp = z[k][i] * dxnew[i];
                            zdotv += temp;
                            zdvabs += temp.abs();
                        }
                        if !negligible(zdvabs, zdotv) {
                            let temp = zdotv / zdota[k];
                            if temp > 0.0 && iact[k] < m {
                                let tempa = vmultc[k] / temp;
                                if ratio < 0.0 || tempa < ratio {
                                    ratio = tempa;
                                    iout = k;
                                }
                            }
                            if k >= 1 {
                                let kw = iact[k];
                                for i in 0..n {
                                    dxnew[i] -= temp * a[kw][i];
                                }
                            }
                            vmultd[k] = temp;
                        } else {
                            vmultd[k] = 0.0;
                        }
                    }
                    if ratio < 0.0 {
                        at = At::Finish;
                        continue;
                    }
                    for k in 0..nact {
                        vmultc[k] = (vmultc[k] - ratio * vmultd[k]).max(0.0);
                    }
                    if iout + 1 < nact {
                        let isave = iact[iout];
                        let vsave = vmultc[iout];
                        let mut k = iout;
                        while k + 1 < nact {
                            let kp = k + 1;
                            let kw = iact[kp];
                            let sp = dot(&z[k], &a[kw]);
                            let temp = (sp * sp + zdota[kp] * zdota[kp]).sqrt();
                            let alpha = zdota[kp] / temp;
                            let beta = sp / temp;
                            zdota[kp] = alpha * zdota[k];
                            zdota[k] = temp;
                            rotate(&mut z, k, kp, alpha, beta);
                            iact[k] = kw;
                            vmultc[k] = vmultc[kp];
                            k = kp;
                        }
                        iact[k] = isave;
                        vmultc[k] = vsave;
                    }
                    let temp = dot(&z[nact - 1], &a[kk]);
                    if temp == 0.0 {
                        at = At::Finish;
                        continue;
                    }
                    zdota[nact - 1] = temp;
                    vmultc[icon] = 0.0;
                    vmultc[nact - 1] = ratio;
                }

                iact[icon] = iact[nact - 1];
                iact[nact - 1] = kk;
                // In stage two the objective stays last in the active set.
                if mcon > m && kk != m {
                    let k = nact - 2;
                    let sp = dot(&z[k], &a[kk]);
                    let temp = (sp * sp + zdota[nact - 1] * zdota[nact - 1]).sqrt();
                    let alpha = zdota[nact - 1] / temp;
                    let beta = sp / temp;
                    zdota[nact - 1] = alpha * zdota[k];
                    zdota[k] = temp;
                    rotate(&mut z, k, nact - 1, alpha, beta);
                    iact[nact - 1] = iact[k];
                    iact[k] = kk;
                    vmultc.swap(k, nact - 1);
                }

                if mcon > m {
                    at = At::Stage2Direction;
                    continue;
                }
                let kk = iact[nact - 1];
                let temp = (dot(&sdirn, &a[kk]) - 1.0) / zdota[nact - 1];
                for i in 0..n {
                    sdirn[i] -= temp * z[nact - 1][i];
                }
                at = At::Step;
            }
            At::Delete => {
                if icon + 1 < nact {
                    let isave = iact[icon];
                    let vsave = vmultc[icon];
                    let mut k = icon;
                    while k + 1 < nact {
                        let kp = k + 1;
                        let kk = iact[kp];
                        let sp = dot(&z[k], &a[kk]);
                        let temp = (sp * sp + zdota[kp] * zdota[kp]).sqrt();
                        let alpha = zdota[kp] / temp;
                        let beta = sp / temp;
                        zdota[kp] = alpha * zdota[k];
                        zdota[k] = temp;
                        rotate(&mut z, k, kp, alpha, beta);
                        iact[k] = kk;
                        vmultc[k] = vmultc[kp];
                        k = kp;
                    }
                    iact[k] = isave;
                    vmultc[k] = vsave;
                }
                nact -= 1;
                if mcon > m {
                    at = At::Stage2Direction;
                    continue;
                }
                let temp = dot(&sdirn, &z[nact]);
                for i in 0..n {
                    sdirn[i] -= temp * z[nact][i];
                }
                at = At::Step;
            }
            At::Stage2Direction => {
                let temp = 1.0 / zdota[nact - 1];
                for i in 0..n {
                    sdirn[i] = temp * z[nact - 1][i];
                }
                at = At::Step;
            }
            At::Step => {
                // Step along sdirn to the trust-region boundary, or in stage
                // one just far enough to zero the residual.
                let mut dd = rho * rho;
                let mut sd = 0.0;
                let mut ss = 0.0;
                for i in 0..n {
                    if dx[i].abs() >= 1e-6 * rho {
                        dd -= dx[i] * dx[i];
                    }
                    sd += dx[i] * sdirn[i];
                    ss += sdirn[i] * sdirn[i];
                }
                if dd <= 0.0 {
                    at = At::Finish;
                    continue;
                }
                let mut temp = (ss * dd).sqrt();
                if sd.abs() >= 1e-6 * temp {
                    temp = (ss * dd + sd * sd).sqrt();
                }
                let stpful = dd / (temp + sd);
                let mut step = stpful;
                if mcon == m {
                    if negligible(step, resmax) {
                        at = At::Stage2;
                        continue;
                    }
                    step = step.min(resmax);
                }

                for i in 0..n {
                    dxnew[i] = dx[i] + step * sdirn[i];
                }
                if mcon == m {
                    resold = resmax;
                    resmax = 0.0;
                    for &kk in &iact[..nact] {
                        let temp = b[kk] - dot(&a[kk], &dxnew);
                        resmax = resmax.max(temp);
                    }
                }

                // Multipliers the active set would have at dxnew.
                for k in (0..nact).rev() {
                    let mut zdotw = 0.0;
                    let mut zdwabs = 0.0;
                    for i in 0..n {
                        let temp = z[k][i] * dxnew[i];
                        zdotw += temp;
                        zdwabs += temp.abs();
                    }
                    if negligible(zdwabs, zdotw) {
                        zdotw = 0.0;
                    }
                    vmultd[k] = zdotw / zdota[k];
                    if k >= 1 {
                        let kk = iact[k];
                        for i in 0..n {
                            dxnew[i] -= vmultd[k] * a[kk][i];
                        }
                    }
                }
                if mcon > m {
                    vmultd[nact - 1] = vmultd[nact - 1].max(0.0);
                }

                // Residual slack of the inactive constraints at dxnew.
                for i in 0..n {
                    dxnew[i] = dx[i] + step * sdirn[i];
                }
                for k in nact..mcon {
                    let kk = iact[k];
                    let mut sum = resmax - b[kk];
                    let mut sumabs = resmax + b[kk].abs();
                    for i in 0..n {
                        let temp = a[kk][i] * dxnew[i];
                        sum += temp;
                        sumabs += temp.abs();
                    }
                    if negligible(sumabs, sum) {
                        sum = 0.0;
                    }
                    vmultd[k] = sum;
                }

                // Take the largest fraction of the step that keeps every
                // multiplier and slack non-negative.
                let mut ratio = 1.0;
                let mut blocking = None;
                for k in 0..mcon {
                    if vmultd[k] < 0.0 {
                        let temp = vmultc[k] / (vmultc[k] - vmultd[k]);
                        if temp < ratio {
                            ratio = temp;
                            blocking = Some(k);
                        }
                    }
                }
                let temp = 1.0 - ratio;
                for i in 0..n {
                    dx[i] = temp * dx[i] + ratio * dxnew[i];
                }
                for k in 0..mcon {
                    vmultc[k] = (temp * vmultc[k] + ratio * vmultd[k]).max(0.0);
                }
                if mcon == m {
                    resmax = resold + ratio * (resmax - resold);
                }

                if let Some(k) = blocking {
                    icon = k;
                    at = At::Iterate;
                    continue;
                }
                if step == stpful {
                    return (dx, true);
                }
                at = At::Stage2;
            }
            At::Finish => {
                if mcon == m {
                    at = At::Stage2;
                    continue;
                }
                return (dx, false);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bowl(x: &[f64]) -> f64 {
        (x[0] - 1.0).powi(2) + (x[1] + 2.0).powi(2)
    }

    #[test]
    fn quadratic_bowl() {
        let r = cobyla_minimize(&bowl, &[0.0, 0.0], &CobylaConfig::default(), None).unwrap();
        assert!(r.converged);
        assert!((r.best_theta[0] - 1.0).abs() < 1e-4, "{:?}", r.best_theta);
        assert!((r.best_theta[1] + 2.0).abs() < 1e-4, "{:?}", r.best_theta);
        assert!(r.evals <= 1000);
    }

    #[test]
    fn tight_budget() {
        let cfg = CobylaConfig {
            maxfun: 4,
            ..CobylaConfig::default()
        };
        let r = cobyla_minimize(&bowl, &[0.0, 0.0], &cfg, None).unwrap();
        assert!(!r.converged);
        assert_eq!(r.evals, 4);
        let min_seen = r.history.iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
        assert_eq!(r.best_value, min_seen);
        let simplex_best = r.history[..3].iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
        assert!(r.best_value <= simplex_best);
    }

    #[test]
    fn best_value_matches_oracle() {
        let f = |x: &[f64]| (x[0] - 0.3).powi(2) + 3.0 * (x[1] - x[0]).powi(2) + x[2] * x[2];
        let r = cobyla_minimize(&f, &[1.0, -1.0, 0.5], &CobylaConfig::default(), None).unwrap();
        assert_eq!(r.best_value, f(&r.best_theta));
        assert!(r.best_value < 1e-6, "{}", r.best_value);
    }

    #[test]
    fn linear_inequality_constraint() {
        // minimize x + y on the unit disc: optimum at -(1,1)/√2
        let f = |x: &[f64]| x[0] + x[1];
        let disc = |x: &[f64]| 1.0 - x[0] * x[0] - x[1] * x[1];
        let cfg = CobylaConfig {
            rhobeg: 0.5,
            rhoend: 1e-6,
            maxfun: 2000,
        };
        let r = cobyla_minimize_constrained(&f, &[&disc], &[0.0, 0.0], &cfg, None).unwrap();
        let want = -std::f64::consts::FRAC_1_SQRT_2;
        assert!((r.best_theta[0] - want).abs() < 1e-4, "{:?}", r.best_theta);
        assert!((r.best_theta[1] - want).abs() < 1e-4, "{:?}", r.best_theta);
    }

    #[test]
    fn bound_constraints_are_active() {
        // minimize (x-3)² + (y-3)² with x ≤ 1, y ≤ 2
        let f = |x: &[f64]| (x[0] - 3.0).powi(2) + (x[1] - 3.0).powi(2);
        let c1 = |x: &[f64]| 1.0 - x[0];
        let c2 = |x: &[f64]| 2.0 - x[1];
        let cfg = CobylaConfig {
            rhobeg: 1.0,
            rhoend: 1e-7,
            maxfun: 500,
        };
        let r = cobyla_minimize_constrained(&f, &[&c1, &c2], &[0.0, 0.0], &cfg, None).unwrap();
        assert!((r.best_theta[0] - 1.0).abs() < 1e-6, "{:?}", r.best_theta);
        assert!((r.best_theta[1] - 2.0).abs() < 1e-6, "{:?}", r.best_theta);
    }

    #[test]
    fn non_finite_objective() {
        let f = |x: &[f64]| if x[0] > 0.5 { f64::INFINITY } else { x[0] };
        let r = cobyla_minimize(&f, &[0.0], &CobylaConfig::default(), None);
        assert!(matches!(r, Err(Error::Numeric { iteration: 2, .. })));
    }

    #[test]
    fn config_validation() {
        let cfg = CobylaConfig {
            maxfun: 3,
            ..CobylaConfig::default()
        };
        assert!(cobyla_minimize(&bowl, &[0.0, 0.0], &cfg, None).is_err());
        let cfg = CobylaConfig {
            rhobeg: 1e-5,
            ..CobylaConfig::default()
        };
        assert!(cfg.validate(2).is_err());
    }
}
