//! Finite-difference derivatives on strictly increasing, possibly nonuniform
//! node sets. Interior points use the three-point centred stencil, edges the
//! one-sided three-point stencil; both are second-order accurate.

/// Derivative of the quadratic through `(xs[0..3], fs[0..3])` evaluated at `t`.
fn quadratic_deriv(xs: [f64; 3], fs: [f64; 3], t: f64) -> f64 {
    let [a, b, c] = xs;
    let da = ((t - b) + (t - c)) / ((a - b) * (a - c));
    let db = ((t - a) + (t - c)) / ((b - a) * (b - c));
    let dc = ((t - a) + (t - b)) / ((c - a) * (c - b));
    da * fs[0] + db * fs[1] + dc * fs[2]
}

/// First derivative of sampled values `f` on nodes `x`.
///
/// Requires at least 3 nodes; callers gate that with their own mesh errors.
pub fn derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    assert!(x.len() >= 3, "derivative stencil needs at least 3 nodes");
    assert_eq!(x.len(), f.len());
    let n = x.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let j = i.clamp(1, n - 2);
        let xs = [x[j - 1], x[j], x[j + 1]];
        let fs = [f[j - 1], f[j], f[j + 1]];
        out.push(quadratic_deriv(xs, fs, x[i]));
    }
    out
}

/// Row-major grid of samples on an `(r, theta)` product mesh, r-outer.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid2 {
    pub n_r: usize,
    pub n_theta: usize,
    data: Vec<f64>,
}

impl Grid2 {
    pub fn zeros(n_r: usize, n_theta: usize) -> Self {
        Grid2 {
            n_r,
            n_theta,
            data: vec![0.0; n_r * n_theta],
        }
    }

    pub fn from_fn(r: &[f64], theta: &[f64], f: impl Fn(f64, f64) -> f64) -> Self {
        let mut g = Grid2::zeros(r.len(), theta.len());
        for (i, &ri) in r.iter().enumerate() {
            for (j, &tj) in theta.iter().enumerate() {
                g[(i, j)] = f(ri, tj);
            }
        }
        g
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_theta..(i + 1) * self.n_theta]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n_r).map(|i| self[(i, j)]).collect()
    }

    pub fn values(&self) -> &[f64] {
        &self.data
    }

    /// Pointwise map, preserving shape.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Grid2 {
        Grid2 {
            n_r: self.n_r,
            n_theta: self.n_theta,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    /// d/dr along each theta column.
    pub fn d_dr(&self, r: &[f64]) -> Grid2 {
        let mut out = Grid2::zeros(self.n_r, self.n_theta);
        for j in 0..self.n_theta {
            let col = self.column(j);
            let d = derivative(r, &col);
            for i in 0..self.n_r {
                out[(i, j)] = d[i];
            }
        }
        out
    }

    /// d/dtheta along each r row.
    pub fn d_dtheta(&self, theta: &[f64]) -> Grid2 {
        let mut out = Grid2::zeros(self.n_r, self.n_theta);
        for i in 0..self.n_r {
            let d = derivative(theta, self.row(i));
            out.data[i * self.n_theta..(i + 1) * self.n_theta].copy_from_slice(&d);
        }
        out
    }
}

impl std::ops::Index<(usize, usize)> for Grid2 {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n_theta + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Grid2 {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.n_theta + j]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_on_quadratics() {
        let x: Vec<f64> = (0..9).map(|i| 0.3 * (i as f64).exp().ln_1p()).collect();
        let f: Vec<f64> = x.iter().map(|&t| 2.0 * t * t - t + 1.0).collect();
        let d = derivative(&x, &f);
        for (i, &t) in x.iter().enumerate() {
            assert!((d[i] - (4.0 * t - 1.0)).abs() < 1e-11, "node {i}");
        }
    }

    #[test]
    fn second_order_on_sine() {
        let err = |n: usize| {
            let x: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
            let f: Vec<f64> = x.iter().map(|&t| t.sin()).collect();
            derivative(&x, &f)
                .iter()
                .zip(&x)
                .map(|(d, &t)| (d - t.cos()).abs())
                .fold(0.0, f64::max)
        };
        let (e1, e2) = (err(65), err(129));
        let slope = (e1 / e2).log2();
        assert!((1.7..2.3).contains(&slope), "slope {slope}");
    }

    #[test]
    fn grid_partials() {
        let r: Vec<f64> = (0..20).map(|i| 1.0 + 0.1 * i as f64).collect();
        let th: Vec<f64> = (1..30).map(|j| j as f64 * 0.1).collect();
        let g = Grid2::from_fn(&r, &th, |ri, tj| ri * ri * tj);
        let gr = g.d_dr(&r);
        let gt = g.d_dtheta(&th);
        assert!((gr[(5, 7)] - 2.0 * r[5] * th[7]).abs() < 1e-10);
        assert!((gt[(5, 7)] - r[5] * r[5]).abs() < 1e-10);
    }
}
