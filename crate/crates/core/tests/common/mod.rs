//! Independent reference implementations. Each one is written directly from
//! the defining formula with dense linear algebra and shares no code with the
//! library's solvers.
#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normals(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// OLS through the normal equations and an LU solve.
pub fn ols(x: &DMatrix<f64>, y: &DVector<f64>) -> (DVector<f64>, DVector<f64>, DMatrix<f64>) {
    let xtx = x.transpose() * x;
    let inv = xtx.clone().try_inverse().expect("invertible X'X");
    let b = xtx.lu().solve(&(x.transpose() * y)).expect("solvable");
    let e = y - x * &b;
    (b, e, inv)
}

/// Largest singular value of `(I − ΣA)⁻¹ − I` from the eigenvalues of `M'M`.
pub fn zeta_oracle(a: &[DMatrix<f64>]) -> f64 {
    let n = a[0].nrows();
    let mut s = DMatrix::<f64>::identity(n, n);
    for m in a {
        s -= m;
    }
    let m = s.try_inverse().expect("invertible") - DMatrix::<f64>::identity(n, n);
    let g = m.transpose() * &m;
    g.symmetric_eigen().eigenvalues.max().max(0.0).sqrt()
}

/// Closed form for 2×2: σ²_max = (‖M‖²_F + sqrt(‖M‖⁴_F − 4 det(M)²)) / 2.
pub fn zeta_2x2(a: [[f64; 2]; 2]) -> f64 {
    let (p, q, r, s) = (1.0 - a[0][0], -a[0][1], -a[1][0], 1.0 - a[1][1]);
    let det = p * s - q * r;
    let inv = [[s / det, -q / det], [-r / det, p / det]];
    let m = [[inv[0][0] - 1.0, inv[0][1]], [inv[1][0], inv[1][1] - 1.0]];
    let fro2 = m[0][0].powi(2) + m[0][1].powi(2) + m[1][0].powi(2) + m[1][1].powi(2);
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    ((fro2 + (fro2 * fro2 - 4.0 * d * d).max(0.0).sqrt()) / 2.0).sqrt()
}

/// TV-VAR by dense least squares on the augmented system
/// `[data rows; λ·difference rows] θ = [y; 0]`, `θ = (β_1, …, β_m, ν)`,
/// with regressors `z_t = (x'_{t-1}, …, x'_{t-q})`.
/// Returns `betas[i][t]` (equation i, period t) and `nu[i]`.
pub fn dense_tvvar(x: &DMatrix<f64>, q: usize, lambda: f64) -> (Vec<Vec<DVector<f64>>>, Vec<f64>) {
    let (t_len, n) = x.shape();
    let k = n * q;
    let m = t_len - q;
    let cols = m * k + 1;
    let rows = m + (m - 1) * k;
    let mut a = DMatrix::<f64>::zeros(rows, cols);
    for t in 0..m {
        for l in 1..=q {
            for j in 0..n {
                a[(t, t * k + (l - 1) * n + j)] = x[(t + q - l, j)];
            }
        }
        a[(t, cols - 1)] = 1.0;
    }
    for t in 1..m {
        for c in 0..k {
            let r = m + (t - 1) * k + c;
            a[(r, t * k + c)] = lambda;
            a[(r, (t - 1) * k + c)] = -lambda;
        }
    }
    let qr = a.qr();
    let qm = qr.q();
    let r = qr.r();
    let mut betas = Vec::with_capacity(n);
    let mut nus = Vec::with_capacity(n);
    for i in 0..n {
        let mut b = DVector::<f64>::zeros(rows);
        for t in 0..m {
            b[t] = x[(t + q, i)];
        }
        let qtb = qm.transpose() * b;
        let theta = r.solve_upper_triangular(&qtb).expect("full rank");
        betas.push((0..m).map(|t| theta.rows(t * k, k).into_owned()).collect());
        nus.push(theta[cols - 1]);
    }
    (betas, nus)
}

/// Bartlett-kernel HAC covariance `(X'X)⁻¹ S (X'X)⁻¹` with
/// `S = Σ_{|l|≤L} w_l Σ_t g_t g'_{t−l}`, summed over both signs explicitly.
pub fn newey_west_oracle(x: &DMatrix<f64>, e: &DVector<f64>, lags: usize) -> DMatrix<f64> {
    let (t, p) = x.shape();
    let g: Vec<DVector<f64>> = (0..t).map(|r| x.row(r).transpose() * e[r]).collect();
    let mut s = DMatrix::<f64>::zeros(p, p);
    for a in 0..t {
        for b in 0..t {
            let l = a.abs_diff(b);
            if l <= lags {
                let w = 1.0 - l as f64 / (lags as f64 + 1.0);
                s += w * &g[a] * g[b].transpose();
            }
        }
    }
    let inv = (x.transpose() * x).try_inverse().unwrap();
    &inv * s * &inv
}

/// `L_c = T⁻¹ Σ_t S'_t V⁻¹ S_t` with scores `(x_t e_{i,t}, e²_{i,t} − σ̂²_i)`
/// stacked over equations and `V = Σ_t f_t f'_t`.
pub fn hansen_oracle(x: &DMatrix<f64>, e: &DMatrix<f64>) -> f64 {
    let (t, p) = x.shape();
    let n = e.ncols();
    let m = p + 1;
    let sig: Vec<f64> = (0..n).map(|i| e.column(i).iter().map(|v| v * v).sum::<f64>() / t as f64).collect();
    let f: Vec<DVector<f64>> = (0..t)
        .map(|r| {
            DVector::from_fn(n * m, |idx, _| {
                let (i, c) = (idx / m, idx % m);
                if c < p {
                    x[(r, c)] * e[(r, i)]
                } else {
                    e[(r, i)] * e[(r, i)] - sig[i]
                }
            })
        })
        .collect();
    let mut v = DMatrix::<f64>::zeros(n * m, n * m);
    for ft in &f {
        v += ft * ft.transpose();
    }
    let vinv = v.try_inverse().unwrap();
    let mut s = DVector::<f64>::zeros(n * m);
    let mut total = 0.0;
    for ft in &f {
        s += ft;
        total += (s.transpose() * &vinv * &s)[(0, 0)];
    }
    total / t as f64
}

/// Quasi-difference GLS detrending, written out with explicit loops.
pub fn gls_detrend_oracle(y: &[f64], trend: bool, c_bar: f64) -> Vec<f64> {
    let t = y.len();
    let alpha = 1.0 + c_bar / t as f64;
    let d = if trend { 2 } else { 1 };
    let z = |i: usize, c: usize| if c == 0 { 1.0 } else { (i + 1) as f64 };
    let zq = DMatrix::from_fn(t, d, |i, c| if i == 0 { z(0, c) } else { z(i, c) - alpha * z(i - 1, c) });
    let yq = DVector::from_fn(t, |i, _| if i == 0 { y[0] } else { y[i] - alpha * y[i - 1] });
    let (b, _, _) = ols(&zq, &yq);
    (0..t).map(|i| y[i] - (0..d).map(|c| z(i, c) * b[c]).sum::<f64>()).collect()
}

fn adf_rows(ydt: &[f64], k: usize, first: usize) -> (DMatrix<f64>, DVector<f64>) {
    let rows: Vec<usize> = (first..ydt.len()).collect();
    let dy = |i: usize| ydt[i] - ydt[i - 1];
    let x = DMatrix::from_fn(rows.len(), k + 1, |r, c| {
        let t = rows[r];
        if c == 0 {
            ydt[t - 1]
        } else {
            dy(t - c)
        }
    });
    let y = DVector::from_fn(rows.len(), |r, _| dy(rows[r]));
    (x, y)
}

/// MIC(k) for k = 0..=k_max on the common sample; `c_t = None` uses ln(T − k_max).
pub fn mic_table_oracle(ydt: &[f64], k_max: usize, c_t: Option<f64>) -> Vec<f64> {
    let t = ydt.len();
    let denom = (t - k_max) as f64;
    let c_t = c_t.unwrap_or(denom.ln());
    (0..=k_max)
        .map(|k| {
            let (x, y) = adf_rows(ydt, k, k_max + 1);
            let (b, e, _) = ols(&x, &y);
            let s2 = e.norm_squared() / denom;
            let sum_sq: f64 = (k_max + 1..t).map(|i| ydt[i - 1].powi(2)).sum();
            let tau = b[0] * b[0] * sum_sq / s2;
            s2.ln() + c_t * (tau + k as f64) / denom
        })
        .collect()
}

pub fn first_argmin(v: &[f64]) -> usize {
    let mut best = 0;
    for i in 1..v.len() {
        if v[i] < v[best] {
            best = i;
        }
    }
    best
}

/// ADF-GLS t-ratio at a given lag on the full available sample.
pub fn adf_t_oracle(ydt: &[f64], k: usize) -> f64 {
    let (x, y) = adf_rows(ydt, k, k + 1);
    let (b, e, inv) = ols(&x, &y);
    let s2 = e.norm_squared() / (x.nrows() - x.ncols()) as f64;
    b[0] / (s2 * inv[(0, 0)]).sqrt()
}

/// SBIC for q = 1..=q_max, each VAR on the common sample t = q_max+1..T.
pub fn sbic_oracle(x: &DMatrix<f64>, q_max: usize) -> Vec<f64> {
    let (t, n) = x.shape();
    let ts = t - q_max;
    (1..=q_max)
        .map(|q| {
            let design = DMatrix::from_fn(ts, 1 + n * q, |r, c| {
                let row = r + q_max;
                if c == 0 {
                    1.0
                } else {
                    let (l, j) = ((c - 1) / n + 1, (c - 1) % n);
                    x[(row - l, j)]
                }
            });
            let mut resid = DMatrix::<f64>::zeros(ts, n);
            for i in 0..n {
                let y = DVector::from_fn(ts, |r, _| x[(r + q_max, i)]);
                let (_, e, _) = ols(&design, &y);
                resid.set_column(i, &e);
            }
            let sigma = resid.transpose() * &resid / ts as f64;
            sigma.determinant().ln() + (ts as f64).ln() / ts as f64 * (q * n * n) as f64
        })
        .collect()
}

/// Run-length merge by brute force: flip the shortest (then earliest) run
/// below `min_run` and re-encode from scratch until none is left.
pub fn segments_oracle(flags: &[bool], min_run: usize) -> Vec<(usize, usize, bool)> {
    let mut f = flags.to_vec();
    loop {
        let mut runs: Vec<(usize, usize, bool)> = Vec::new();
        for (i, &v) in f.iter().enumerate() {
            match runs.last_mut() {
                Some(r) if r.2 == v => r.1 = i,
                _ => runs.push((i, i, v)),
            }
        }
        if runs.len() <= 1 {
            return runs;
        }
        let target = runs
            .iter()
            .filter(|r| r.1 - r.0 + 1 < min_run)
            .min_by_key(|r| (r.1 - r.0 + 1, r.0))
            .copied();
        match target {
            None => return runs,
            Some((s, e, v)) => {
                for x in &mut f[s..=e] {
                    *x = !v;
                }
            }
        }
    }
}

/// Natural cubic spline by a dense solve of the second-derivative system.
pub fn spline_oracle(knots: &[(f64, f64)], at: f64) -> f64 {
    let k = knots.len();
    let mut a = DMatrix::<f64>::zeros(k, k);
    let mut b = DVector::<f64>::zeros(k);
    a[(0, 0)] = 1.0;
    a[(k - 1, k - 1)] = 1.0;
    for i in 1..k - 1 {
        let h0 = knots[i].0 - knots[i - 1].0;
        let h1 = knots[i + 1].0 - knots[i].0;
        a[(i, i - 1)] = h0 / 6.0;
        a[(i, i)] = (h0 + h1) / 3.0;
        a[(i, i + 1)] = h1 / 6.0;
        b[i] = (knots[i + 1].1 - knots[i].1) / h1 - (knots[i].1 - knots[i - 1].1) / h0;
    }
    let m = a.lu().solve(&b).unwrap();
    let i = (0..k - 1).find(|&i| at <= knots[i + 1].0).unwrap_or(k - 2);
    let (x0, y0, x1, y1) = (knots[i].0, knots[i].1, knots[i + 1].0, knots[i + 1].1);
    let h = x1 - x0;
    let (l, r) = (x1 - at, at - x0);
    m[i] * l.powi(3) / (6.0 * h) + m[i + 1] * r.powi(3) / (6.0 * h) + (y0 / h - m[i] * h / 6.0) * l
        + (y1 / h - m[i + 1] * h / 6.0) * r
}

pub fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let (ma, mb) = (a.iter().sum::<f64>() / n, b.iter().sum::<f64>() / n);
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma).powi(2);
        sbb += (y - mb).powi(2);
    }
    sab / (saa * sbb).sqrt()
}
