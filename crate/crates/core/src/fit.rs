//! Small dense least-squares fits used by the tail, decay, and Coulomb
//! extraction routines. Normal equations are adequate at these sizes.

/// Result of a straight-line fit `y = intercept + slope * x`.
#[derive(Debug, Clone, Copy)]
pub struct LineFit {
    pub intercept: f64,
    pub slope: f64,
    pub slope_stderr: f64,
    pub intercept_stderr: f64,
    pub rms_residual: f64,
}

/// Ordinary least squares line through `(x, y)` with standard errors.
pub fn line(x: &[f64], y: &[f64]) -> LineFit {
    assert_eq!(x.len(), y.len());
    let n = x.len() as f64;
    assert!(x.len() >= 2, "line fit needs at least 2 points");
    let sx: f64 = x.iter().sum();
    let sy: f64 = y.iter().sum();
    let mx = sx / n;
    let my = sy / n;
    let sxx: f64 = x.iter().map(|&t| (t - mx) * (t - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(&t, &v)| (t - mx) * (v - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = x
        .iter()
        .zip(y)
        .map(|(&t, &v)| {
            let r = v - intercept - slope * t;
            r * r
        })
        .sum();
    let dof = (x.len().saturating_sub(2)).max(1) as f64;
    let var = ss_res / dof;
    LineFit {
        intercept,
        slope,
        slope_stderr: (var / sxx).sqrt(),
        intercept_stderr: (var * (1.0 / n + mx * mx / sxx)).sqrt(),
        rms_residual: (ss_res / n).sqrt(),
    }
}

/// Least-squares coefficients for `y ~ sum_k c_k * cols[k]`.
///
/// Solves the normal equations by Gaussian elimination with partial
/// pivoting; intended for a handful of basis columns.
pub fn linear_least_squares(cols: &[&[f64]], y: &[f64]) -> Vec<f64> {
    let p = cols.len();
    assert!(p > 0 && p <= 8);
    for c in cols {
        assert_eq!(c.len(), y.len());
    }
    let mut ata = vec![vec![0.0; p]; p];
    let mut aty = vec![0.0; p];
    for i in 0..p {
        for j in 0..p {
            ata[i][j] = cols[i].iter().zip(cols[j]).map(|(&a, &b)| a * b).sum();
        }
        aty[i] = cols[i].iter().zip(y).map(|(&a, &b)| a * b).sum();
    }
    // Gaussian elimination with partial pivoting.
    for k in 0..p {
        let pivot = (k..p)
            .max_by(|&a, &b| ata[a][k].abs().total_cmp(&ata[b][k].abs()))
            .unwrap();
        ata.swap(k, pivot);
        aty.swap(k, pivot);
        for i in k + 1..p {
            let f = ata[i][k] / ata[k][k];
            for j in k..p {
                ata[i][j] -= f * ata[k][j];
            }
            aty[i] -= f * aty[k];
        }
    }
    let mut c = vec![0.0; p];
    for k in (0..p).rev() {
        let mut s = aty[k];
        for j in k + 1..p {
            s -= ata[k][j] * c[j];
        }
        c[k] = s / ata[k][k];
    }
    c
}
