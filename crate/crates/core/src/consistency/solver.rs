//! Multi-start projected Levenberg–Marquardt for box-constrained polynomial
//! systems. Each start is independent and seeded by `(seed, start index)`,
//! so results do not depend on scheduling.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::consistency::system::{ConstraintSystem, VarKind};

/// Solver budget and tolerance.
#[derive(Clone, Debug)]
pub struct SolveConfig {
    /// Number of random starts.
    pub starts: usize,
    /// Iterations per start.
    pub iters: usize,
    /// Accepted max-norm residual.
    pub tol: f64,
    /// Base seed; start `k` uses stream `k` of this seed.
    pub seed: u64,
    /// Starts run concurrently per batch; the search stops after the first
    /// batch that contains a solution.
    pub batch: usize,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig { starts: 64, iters: 400, tol: 1e-8, seed: 0, batch: 8 }
    }
}

/// Outcome of the numeric search.
#[derive(Clone, Debug)]
pub struct SolveOutcome {
    /// Best assignment found (lowest residual, ties by start index).
    pub x: Vec<f64>,
    pub residual: f64,
    /// Start index that produced `x`.
    pub start: usize,
    /// Starts actually run.
    pub starts_run: usize,
}

struct Compiled {
    eqs: Vec<Vec<(f64, Vec<usize>)>>,
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Compiled {
    fn new(cs: &ConstraintSystem) -> Compiled {
        let eqs = cs
            .equations
            .iter()
            .map(|(_, p)| p.terms.iter().map(|(m, c)| (crate::rational::to_f64(c), m.clone())).collect())
            .collect();
        let lo = cs.bounds.iter().map(|b| b.0).collect();
        let hi = cs.bounds.iter().map(|b| b.1.unwrap_or(f64::INFINITY)).collect();
        Compiled { eqs, lo, hi }
    }

    fn residuals(&self, x: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.eqs.len(),
            self.eqs.iter().map(|terms| terms.iter().map(|(c, m)| c * m.iter().map(|&v| x[v]).product::<f64>()).sum()),
        )
    }

    fn jacobian(&self, x: &[f64]) -> DMatrix<f64> {
        let mut j = DMatrix::zeros(self.eqs.len(), x.len());
        for (row, terms) in self.eqs.iter().enumerate() {
            for (c, m) in terms {
                for p in 0..m.len() {
                    let mut d = *c;
                    for (q, &v) in m.iter().enumerate() {
                        if q != p {
                            d *= x[v];
                        }
                    }
                    j[(row, m[p])] += d;
                }
            }
        }
        j
    }

    fn project(&self, x: &mut [f64]) {
        for (k, v) in x.iter_mut().enumerate() {
            *v = v.clamp(self.lo[k], self.hi[k]);
        }
    }
}

fn max_abs(r: &DVector<f64>) -> f64 {
    r.iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Random feasible-box starting point: uniform likelihoods, random
/// normalised role rows, unit slacks.
fn initial_point(cs: &ConstraintSystem, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut x: Vec<f64> = cs
        .vars
        .iter()
        .map(|k| match k {
            VarKind::Slack { .. } => 1.0,
            _ => rng.gen_range(0.0..1.0),
        })
        .collect();
    let mut sums: std::collections::BTreeMap<(String, usize), f64> = std::collections::BTreeMap::new();
    for (v, k) in cs.vars.iter().enumerate() {
        match k {
            VarKind::Role { role, from, .. } => *sums.entry((role.to_string(), *from)).or_default() += x[v],
            VarKind::Id { name, .. } => *sums.entry((format!("id:{name}"), 0)).or_default() += x[v],
            _ => {}
        }
    }
    for (v, k) in cs.vars.iter().enumerate() {
        let key = match k {
            VarKind::Role { role, from, .. } => (role.to_string(), *from),
            VarKind::Id { name, .. } => (format!("id:{name}"), 0),
            _ => continue,
        };
        let s = sums[&key];
        if s > 0.0 {
            x[v] /= s;
        }
    }
    x
}

/// One projected Levenberg–Marquardt run from `x`.
fn run(c: &Compiled, mut x: Vec<f64>, iters: usize, tol: f64) -> (Vec<f64>, f64) {
    c.project(&mut x);
    let n = x.len();
    let mut r = c.residuals(&x);
    let mut f = r.norm_squared();
    let mut lambda = 1e-3;
    let target = tol * 1e-3;
    for _ in 0..iters {
        if max_abs(&r) <= target {
            break;
        }
        let j = c.jacobian(&x);
        let g = j.transpose() * &r;
        let free: Vec<usize> = (0..n)
            .filter(|&k| {
                let at_lo = x[k] <= c.lo[k] + 1e-14 && g[k] > 0.0;
                let at_hi = x[k] >= c.hi[k] - 1e-14 && g[k] < 0.0;
                !(at_lo || at_hi)
            })
            .collect();
        if free.is_empty() {
            break;
        }
        let jf = j.select_columns(free.iter());
        let mut improved = false;
        for _ in 0..12 {
            let step = solve_step(&jf, &r, lambda);
            let Some(step) = step else {
                lambda *= 10.0;
                continue;
            };
            let mut xn = x.clone();
            for (p, &k) in free.iter().enumerate() {
                xn[k] += step[p];
            }
            c.project(&mut xn);
            let rn = c.residuals(&xn);
            let fnew = rn.norm_squared();
            if fnew < f {
                x = xn;
                r = rn;
                f = fnew;
                lambda = (lambda / 3.0).max(1e-15);
                improved = true;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    let res = max_abs(&r);
    (x, res)
}

/// Damped Gauss–Newton step on the free columns; uses the smaller of the
/// two normal-equation forms.
fn solve_step(j: &DMatrix<f64>, r: &DVector<f64>, lambda: f64) -> Option<DVector<f64>> {
    let (m, n) = j.shape();
    if m < n {
        let mut a = j * j.transpose();
        let scale = a.diagonal().iter().fold(0.0f64, |s, v| s.max(*v)).max(1.0);
        for k in 0..m {
            a[(k, k)] += lambda * scale;
        }
        let y = a.cholesky()?.solve(r);
        Some(-(j.transpose() * y))
    } else {
        let mut a = j.transpose() * j;
        for k in 0..n {
            let d = a[(k, k)];
            a[(k, k)] += lambda * (d + 1e-9);
        }
        let rhs = j.transpose() * r;
        Some(-a.cholesky()?.solve(&rhs))
    }
}

/// Runs the multi-start search and returns the best assignment.
pub fn solve_numeric(cs: &ConstraintSystem, cfg: &SolveConfig) -> SolveOutcome {
    let c = Compiled::new(cs);
    if cs.vars.is_empty() {
        let r = c.residuals(&[]);
        return SolveOutcome { x: Vec::new(), residual: max_abs(&r), start: 0, starts_run: 1 };
    }
    let batch = cfg.batch.max(1);
    let mut best: Option<(f64, usize, Vec<f64>)> = None;
    let mut run_count = 0;
    let mut start = 0;
    while start < cfg.starts.max(1) {
        let end = (start + batch).min(cfg.starts.max(1));
        let results: Vec<(f64, usize, Vec<f64>)> = (start..end)
            .into_par_iter()
            .map(|k| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(k as u64);
                let x0 = initial_point(cs, &mut rng);
                let (x, res) = run(&c, x0, cfg.iters, cfg.tol);
                (res, k, x)
            })
            .collect();
        run_count += results.len();
        for cand in results {
            let better = match &best {
                None => true,
                Some((br, bk, _)) => cand.0 < *br || (cand.0 == *br && cand.1 < *bk),
            };
            if better {
                best = Some(cand);
            }
        }
        if best.as_ref().is_some_and(|b| b.0 <= cfg.tol) {
            break;
        }
        start = end;
    }
    let (residual, start, x) = best.expect("at least one start");
    SolveOutcome { x, residual, start, starts_run: run_count }
}
