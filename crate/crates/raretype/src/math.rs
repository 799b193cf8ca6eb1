//! Small numeric helpers shared across modules.

/// log(sum(exp(xs))) computed with the usual max shift.
pub fn log_sum_exp(xs: &[f64]) -> f64 {
    let m = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !m.is_finite() {
        return m;
    }
    let s: f64 = xs.iter().map(|&x| (x - m).exp()).sum();
    m + s.ln()
}

/// Compensated (Kahan) summation; used where 1e-12-level mass accounting
/// over 1e5 terms matters.
pub fn kahan_sum(xs: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut c = 0.0;
    for x in xs {
        let y = x - c;
        let t = sum + y;
        c = (t - sum) - y;
        sum = t;
    }
    sum
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Sample variance (ddof = 1).
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Ordinary least squares slope of y against x.
pub fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (xi, yi) in x.iter().zip(y) {
        sxy += (xi - mx) * (yi - my);
        sxx += (xi - mx) * (xi - mx);
    }
    sxy / sxx
}

/// Symmetric 2x2 matrix helpers, enough for the Fisher-information plumbing.
pub mod mat2 {
    /// Determinant of [[a, b], [b, c]].
    pub fn det(m: [[f64; 2]; 2]) -> f64 {
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    /// Inverse; None if not invertible.
    pub fn inverse(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
        let d = det(m);
        if d == 0.0 || !d.is_finite() {
            return None;
        }
        Some([[m[1][1] / d, -m[0][1] / d], [-m[1][0] / d, m[0][0] / d]])
    }

    /// Lower Cholesky factor of a symmetric positive-definite matrix.
    pub fn cholesky(m: [[f64; 2]; 2]) -> Option<[[f64; 2]; 2]> {
        if m[0][0] <= 0.0 {
            return None;
        }
        let l00 = m[0][0].sqrt();
        let l10 = m[1][0] / l00;
        let rem = m[1][1] - l10 * l10;
        if rem <= 0.0 {
            return None;
        }
        Some([[l00, 0.0], [l10, rem.sqrt()]])
    }

    /// Quadratic form v' M v.
    pub fn quad_form(m: [[f64; 2]; 2], v: [f64; 2]) -> f64 {
        v[0] * (m[0][0] * v[0] + m[0][1] * v[1]) + v[1] * (m[1][0] * v[0] + m[1][1] * v[1])
    }

    /// A' M A for 2x2 A.
    pub fn congruence(a: [[f64; 2]; 2], m: [[f64; 2]; 2]) -> [[f64; 2]; 2] {
        let ma = [
            [
                m[0][0] * a[0][0] + m[0][1] * a[1][0],
                m[0][0] * a[0][1] + m[0][1] * a[1][1],
            ],
            [
                m[1][0] * a[0][0] + m[1][1] * a[1][0],
                m[1][0] * a[0][1] + m[1][1] * a[1][1],
            ],
        ];
        [
            [
                a[0][0] * ma[0][0] + a[1][0] * ma[1][0],
                a[0][0] * ma[0][1] + a[1][0] * ma[1][1],
            ],
            [
                a[0][1] * ma[0][0] + a[1][1] * ma[1][0],
                a[0][1] * ma[0][1] + a[1][1] * ma[1][1],
            ],
        ]
    }
}

/// Gauss-Legendre nodes and weights on [-1, 1].
///
/// Newton iteration on the Legendre recurrence; standard double-precision
/// construction, deterministic for a given `m`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(m >= 1);
    let mut nodes = vec![0.0; m];
    let mut weights = vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            // Legendre P_m(x) and derivative via the three-term recurrence.
            let mut p0 = 1.0;
            let mut p1 = x;
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            dp = m as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        nodes[i] = -x;
        nodes[m - 1 - i] = x;
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        weights[i] = w;
        weights[m - 1 - i] = w;
    }
    if m % 2 == 1 {
        nodes[m / 2] = 0.0;
    }
    (nodes, weights)
}
