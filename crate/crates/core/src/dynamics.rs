//! Mass-action dynamics: right-hand side, analytic Jacobian, adaptive
//! embedded Runge-Kutta integration with dense output, Newton refinement of
//! equilibria restricted to the compatibility class, and conservation-drift
//! accounting.

use crate::exact::Rational;
use crate::model::MassActionSystem;
use crate::structure::{is_conserved_vector, monomial};
use num_traits::ToPrimitive;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DynamicsError {
    #[error("state has a negative component {component} = {value}")]
    NegativeState { component: usize, value: f64 },
    #[error("state must be strictly positive (component {component} is {value})")]
    NonpositiveState { component: usize, value: f64 },
    #[error("step limit {max_steps} exceeded at t = {t}")]
    StepLimitExceeded { t: f64, max_steps: usize },
    #[error("state left the nonnegative orthant beyond tolerance at t = {t}")]
    NegativeOvershoot { t: f64 },
    #[error("no convergence within {max_iter} iterations (residual {residual})")]
    MaxIterations { max_iter: usize, residual: f64 },
    #[error("singular projected Jacobian")]
    SingularJacobian,
    #[error("vector is not orthogonal to the stoichiometric subspace")]
    NotConserved,
    #[error("dimension mismatch")]
    DimensionMismatch,
}

/// Mass-action vector field. Empty-source reactions fire at constant rate
/// (the zero exponent of a zero concentration counts as 1).
pub fn rhs(sys: &MassActionSystem, x: &[f64]) -> Result<Vec<f64>, DynamicsError> {
    if let Some(i) = x.iter().position(|&v| v < 0.0) {
        return Err(DynamicsError::NegativeState {
            component: i,
            value: x[i],
        });
    }
    if x.len() != sys.network.num_species() {
        return Err(DynamicsError::DimensionMismatch);
    }
    Ok(rhs_unchecked(sys, x))
}

fn rhs_unchecked(sys: &MassActionSystem, x: &[f64]) -> Vec<f64> {
    let net = &sys.network;
    let mut out = vec![0.0; net.num_species()];
    for (e, r) in net.edges.iter().enumerate() {
        let src = &net.vertices[r.source].coeffs;
        let tgt = &net.vertices[r.target].coeffs;
        let flux = sys.rates.k[e] * monomial(x, src);
        for i in 0..out.len() {
            out[i] += flux * (tgt[i] as f64 - src[i] as f64);
        }
    }
    out
}

/// Analytic Jacobian of [`rhs`] at a strictly positive state.
pub fn jacobian(sys: &MassActionSystem, x: &[f64]) -> Result<Vec<Vec<f64>>, DynamicsError> {
    if let Some(i) = x.iter().position(|&v| v.is_nan() || v <= 0.0) {
        return Err(DynamicsError::NonpositiveState {
            component: i,
            value: x[i],
        });
    }
    if x.len() != sys.network.num_species() {
        return Err(DynamicsError::DimensionMismatch);
    }
    Ok(jacobian_unchecked(sys, x))
}

/// Jacobian via the product-rule monomial derivative; also valid on the
/// boundary of the nonnegative orthant.
fn jacobian_unchecked(sys: &MassActionSystem, x: &[f64]) -> Vec<Vec<f64>> {
    let net = &sys.network;
    let n = net.num_species();
    let mut jac = vec![vec![0.0; n]; n];
    for (e, r) in net.edges.iter().enumerate() {
        let src = &net.vertices[r.source].coeffs;
        let tgt = &net.vertices[r.target].coeffs;
        for j in 0..n {
            if src[j] == 0 {
                continue;
            }
            // d/dx_j of x^src = src_j * x_j^(src_j - 1) * prod_{l != j} x_l^src_l
            let mut dmono = src[j] as f64 * x[j].powi(src[j] as i32 - 1);
            for l in 0..n {
                if l != j {
                    dmono *= x[l].powi(src[l] as i32);
                }
            }
            let factor = sys.rates.k[e] * dmono;
            for i in 0..n {
                jac[i][j] += factor * (tgt[i] as f64 - src[i] as f64);
            }
        }
    }
    jac
}

/// Grid-sampled solution with step-control metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<Vec<f64>>,
    pub meta: StepStats,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    pub rtol: f64,
    pub atol: f64,
}

impl Trajectory {
    /// CSV with header `t,<species names...>`, full-precision decimals.
    pub fn to_csv(&self, species_names: &[&str]) -> String {
        let mut out = String::from("t");
        for name in species_names {
            out.push(',');
            out.push_str(name);
        }
        out.push('\n');
        for (t, state) in self.times.iter().zip(&self.states) {
            out.push_str(&format!("{t}"));
            for v in state {
                out.push_str(&format!(",{v}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IntegrateOptions {
    pub t_end: f64,
    pub rtol: f64,
    pub atol: f64,
    pub max_steps: usize,
    /// Spacing of the output grid; the end point is always included.
    pub dense_output_stride: f64,
}

impl IntegrateOptions {
    pub fn new(t_end: f64) -> Self {
        IntegrateOptions {
            t_end,
            rtol: 1e-8,
            atol: 1e-12,
            max_steps: 10_000_000,
            dense_output_stride: t_end / 1000.0,
        }
    }
}

// Dormand-Prince 5(4) tableau (stage times omitted: the field is autonomous).
const A: [[f64; 6]; 7] = [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
// Error weights: difference between the 5th- and 4th-order solutions.
const E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

/// Adaptive embedded Runge-Kutta 5(4) with PI step control and cubic Hermite
/// dense output on a fixed grid.
///
/// Accepted states are kept nonnegative: candidate steps with a component
/// below `-atol` are retried with a smaller step, and accepted values in
/// `(-atol, 0)` are clamped to zero.
#[allow(clippy::needless_range_loop)] // stage sums read clearest indexed
pub fn integrate(
    sys: &MassActionSystem,
    x0: &[f64],
    opts: &IntegrateOptions,
) -> Result<Trajectory, DynamicsError> {
    if let Some(i) = x0.iter().position(|&v| v < 0.0) {
        return Err(DynamicsError::NegativeState {
            component: i,
            value: x0[i],
        });
    }
    if x0.len() != sys.network.num_species() {
        return Err(DynamicsError::DimensionMismatch);
    }
    assert!(opts.t_end > 0.0 && opts.rtol > 0.0 && opts.atol > 0.0);

    let n = x0.len();
    let stride = if opts.dense_output_stride > 0.0 {
        opts.dense_output_stride
    } else {
        opts.t_end
    };

    let mut times = vec![0.0];
    let mut states = vec![x0.to_vec()];
    // Grid samples at integer multiples of the stride, stopping half a
    // stride short of the end; the exact endpoint is appended afterwards.
    let mut sample_idx = 1u64;
    let sample_cutoff = opts.t_end - 0.5 * stride;

    let mut t = 0.0;
    let mut y = x0.to_vec();
    let mut f = rhs_unchecked(sys, &y);
    let mut h = initial_step(&y, &f, opts);
    let mut err_prev: f64 = 1.0;
    let mut accepted = 0usize;
    let mut rejected = 0usize;

    while t < opts.t_end {
        if accepted + rejected >= opts.max_steps {
            return Err(DynamicsError::StepLimitExceeded {
                t,
                max_steps: opts.max_steps,
            });
        }
        h = h.min(opts.t_end - t);
        if h < 1e-14 * t.max(1.0) {
            return Err(DynamicsError::NegativeOvershoot { t });
        }

        // Stages.
        let mut k = vec![f.clone()];
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..n {
                        ys[i] += h * a * kj[i];
                    }
                }
            }
            k.push(rhs_unchecked(sys, &ys));
        }
        // 5th-order solution is the last stage state (FSAL layout).
        let mut y_new = y.clone();
        for (j, kj) in k.iter().enumerate().take(6) {
            let a = A[6][j];
            if a != 0.0 {
                for i in 0..n {
                    y_new[i] += h * a * kj[i];
                }
            }
        }

        let mut err: f64 = 0.0;
        for i in 0..n {
            let e_i: f64 = (0..7).map(|j| E[j] * k[j][i]).sum::<f64>() * h;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((e_i / sc).abs());
        }

        let went_negative = y_new.iter().any(|&v| v < -opts.atol);
        if err <= 1.0 && !went_negative {
            // Accept; clamp harmless dips onto the boundary.
            for v in &mut y_new {
                if *v < 0.0 {
                    *v = 0.0;
                }
            }
            let t_new = t + h;
            let f_new = rhs_unchecked(sys, &y_new);

            // Dense output via cubic Hermite on [t, t_new].
            loop {
                let next_sample = sample_idx as f64 * stride;
                if next_sample > t_new || next_sample > sample_cutoff {
                    break;
                }
                let theta = ((next_sample - t) / h).clamp(0.0, 1.0);
                let mut xs = hermite(&y, &f, &y_new, &f_new, h, theta);
                for (i, v) in xs.iter_mut().enumerate() {
                    if *v < 0.0 {
                        if *v < -opts.atol {
                            return Err(DynamicsError::NegativeOvershoot { t: next_sample });
                        }
                        *v = 0.0;
                    }
                    debug_assert!(v.is_finite(), "component {i} not finite");
                }
                times.push(next_sample);
                states.push(xs);
                sample_idx += 1;
            }

            t = t_new;
            y = y_new;
            f = f_new;
            accepted += 1;

            // PI controller (orders chosen for a 5th-order pair).
            let err_clamped = err.max(1e-10);
            let factor = 0.9 * err_clamped.powf(-0.7 / 5.0) * err_prev.powf(0.4 / 5.0);
            h *= factor.clamp(0.2, 5.0);
            err_prev = err_clamped;
        } else {
            rejected += 1;
            if went_negative && err <= 1.0 {
                h *= 0.5;
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
    }

    times.push(opts.t_end);
    states.push(y.clone());

    Ok(Trajectory {
        times,
        states,
        meta: StepStats {
            accepted,
            rejected,
            rtol: opts.rtol,
            atol: opts.atol,
        },
    })
}

fn initial_step(y: &[f64], f: &[f64], opts: &IntegrateOptions) -> f64 {
    let sc = |v: &[f64]| -> f64 {
        v.iter()
            .zip(y)
            .map(|(&vi, &yi)| (vi / (opts.atol + opts.rtol * yi.abs())).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let d0 = sc(y);
    let d1 = sc(f);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 {
        1e-6
    } else {
        0.01 * d0 / d1
    };
    h0.min(opts.t_end)
}

fn hermite(y0: &[f64], f0: &[f64], y1: &[f64], f1: &[f64], h: f64, theta: f64) -> Vec<f64> {
    let t2 = theta * theta;
    let t3 = t2 * theta;
    let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
    let h10 = t3 - 2.0 * t2 + theta;
    let h01 = -2.0 * t3 + 3.0 * t2;
    let h11 = t3 - t2;
    y0.iter()
        .zip(f0)
        .zip(y1.iter().zip(f1))
        .map(|((&y0i, &f0i), (&y1i, &f1i))| {
            h00 * y0i + h10 * h * f0i + h01 * y1i + h11 * h * f1i
        })
        .collect()
}

/// Damped Newton on the mass-action field with search directions confined to
/// the stoichiometric subspace, so the iterate stays in the compatibility
/// class of the seed.
pub fn refine_equilibrium(
    sys: &MassActionSystem,
    seed: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<Vec<f64>, DynamicsError> {
    if let Some(i) = seed.iter().position(|&v| v < 0.0) {
        return Err(DynamicsError::NegativeState {
            component: i,
            value: seed[i],
        });
    }
    if seed.len() != sys.network.num_species() {
        return Err(DynamicsError::DimensionMismatch);
    }

    let inf_norm = |v: &[f64]| v.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let mut x = seed.to_vec();
    let mut f = rhs_unchecked(sys, &x);
    if inf_norm(&f) < tol {
        return Ok(x);
    }

    // Orthonormal basis of the stoichiometric subspace.
    let q = orthonormal_basis(
        &sys.network
            .reaction_vectors()
            .iter()
            .map(|rv| rv.iter().map(|&v| v as f64).collect::<Vec<f64>>())
            .collect::<Vec<_>>(),
    );
    let s = q.len();
    if s == 0 {
        return Err(DynamicsError::MaxIterations {
            max_iter,
            residual: inf_norm(&f),
        });
    }

    for _ in 0..max_iter {
        let jac = jacobian_unchecked(sys, &x);
        // Reduced system: (Qᵀ J Q) dz = -Qᵀ f.
        let mut a = vec![vec![0.0; s]; s];
        let mut b = vec![0.0; s];
        for r in 0..s {
            for c in 0..s {
                let mut sum = 0.0;
                for i in 0..x.len() {
                    let mut jq = 0.0;
                    for j in 0..x.len() {
                        jq += jac[i][j] * q[c][j];
                    }
                    sum += q[r][i] * jq;
                }
                a[r][c] = sum;
            }
            b[r] = -q[r].iter().zip(&f).map(|(qi, fi)| qi * fi).sum::<f64>();
        }
        let dz = solve_dense(a, b).ok_or(DynamicsError::SingularJacobian)?;
        let mut dx = vec![0.0; x.len()];
        for (r, qr) in q.iter().enumerate() {
            for i in 0..x.len() {
                dx[i] += dz[r] * qr[i];
            }
        }

        // Backtracking: stay nonnegative and reduce the residual.
        let mut gamma = 1.0;
        let mut improved = false;
        for _ in 0..40 {
            let cand: Vec<f64> = x.iter().zip(&dx).map(|(xi, di)| xi + gamma * di).collect();
            if cand.iter().all(|&v| v >= 0.0) {
                let fc = rhs_unchecked(sys, &cand);
                if inf_norm(&fc) < inf_norm(&f) {
                    x = cand;
                    f = fc;
                    improved = true;
                    break;
                }
            }
            gamma *= 0.5;
        }
        if inf_norm(&f) < tol {
            return Ok(x);
        }
        if !improved {
            break;
        }
    }
    Err(DynamicsError::MaxIterations {
        max_iter,
        residual: inf_norm(&f),
    })
}

fn orthonormal_basis(vectors: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut u = v.clone();
        for b in &basis {
            let proj: f64 = u.iter().zip(b).map(|(a, c)| a * c).sum();
            for (ui, bi) in u.iter_mut().zip(b) {
                *ui -= proj * bi;
            }
        }
        let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-10 {
            for ui in &mut u {
                *ui /= norm;
            }
            basis.push(u);
        }
    }
    basis
}

#[allow(clippy::needless_range_loop)]
fn solve_dense(mut a: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    let scale = a
        .iter()
        .flatten()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap())
            .unwrap();
        if a[piv][col].abs() < 1e-13 * scale {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..n {
            let factor = a[r][col] / a[col][col];
            if factor != 0.0 {
                for c in col..n {
                    a[r][c] -= factor * a[col][c];
                }
                b[r] -= factor * b[col];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let mut sum = b[r];
        for c in r + 1..n {
            sum -= a[r][c] * x[c];
        }
        x[r] = sum / a[r][r];
    }
    Some(x)
}

/// Largest deviation of `c · x(t)` from its initial value along the
/// trajectory; `c` must be exactly orthogonal to every reaction vector.
pub fn conservation_drift(
    net: &crate::model::ReactionNetwork,
    traj: &Trajectory,
    c: &[Rational],
) -> Result<f64, DynamicsError> {
    if !is_conserved_vector(net, c) {
        return Err(DynamicsError::NotConserved);
    }
    let cf: Vec<f64> = c
        .iter()
        .map(|r| r.to_f64().expect("conservation vector fits in f64"))
        .collect();
    let value = |state: &[f64]| -> f64 { state.iter().zip(&cf).map(|(x, c)| x * c).sum() };
    let base = value(&traj.states[0]);
    Ok(traj
        .states
        .iter()
        .map(|s| (value(s) - base).abs())
        .fold(0.0, f64::max))
}
