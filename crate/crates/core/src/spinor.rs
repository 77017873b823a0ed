//! Spinor parameterization of the static Maxwell-Dirac system.
//!
//! A static configuration is described pointwise by `(R, tau, chi, eta)`:
//! `R > 0` is the Dirac current magnitude, `tau` the polar angle of the
//! current direction field `V`, `chi` the phase between the two 2-spinor
//! halves, and `eta` the azimuthal dyad angle. The co-moving dyad
//! `(o_A, iota^A)` and the null tetrad `(l, n, m, mbar)` are derived from
//! the angles alone.
//!
//! Conventions fixed here and relied on throughout the crate:
//! `sigma^alpha = (identity, Pauli triplet) / sqrt(2)`, metric signature
//! `(+,-,-,-)`, spinor indices raised with `eps^{01} = 1`. With these the
//! static current is `j = (sqrt(2) R, 0, 0, 0)` and `j.j = 2 R^2`.

use num_complex::Complex64;
use thiserror::Error;

use crate::fd::Grid2;
use crate::geom::{FourVector, Vec3};

const SQRT_2: f64 = std::f64::consts::SQRT_2;

/// Tolerance for the dyad normalization check in [`null_tetrad`].
pub const NORMALIZATION_TOL: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum SpinorError {
    #[error("degenerate spinor data: R = {value} must be positive")]
    Degeneracy { value: f64 },
    #[error("dyad normalization violated: |iota^C o_C - 1| = {defect}")]
    Normalization { defect: f64 },
    #[error("mesh too coarse: {what}")]
    Mesh { what: String },
    #[error("grid is not stationary: |sin(eta - phi)| = {defect} exceeds tolerance")]
    NonStationary { defect: f64 },
    #[error("orientation sign of V against grad(chi) is not constant over the mesh")]
    OrientationNotConstant,
}

/// Physical constants of the coupled system, in units with `c = hbar = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    /// Fermion mass (inverse length).
    pub m: f64,
    /// Charge coupling.
    pub e: f64,
}

impl PhysicalConstants {
    pub fn new(m: f64, e: f64) -> Self {
        assert!(m > 0.0, "mass must be positive");
        assert!(e != 0.0, "charge coupling must be nonzero");
        PhysicalConstants { m, e }
    }
}

/// Pointwise spinor data `(R, tau, chi, eta)`.
///
/// `chi` is kept as an unbounded real so the branch decomposition
/// `chi = n*pi + mu` stays representable; `eta` is only meaningful mod 2*pi.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinorPoint {
    /// Current magnitude `R > 0`.
    pub magnitude: f64,
    /// Polar dyad angle in `[0, pi]`.
    pub tau: f64,
    /// Phase function.
    pub chi: f64,
    /// Azimuthal dyad angle.
    pub eta: f64,
}

/// Co-moving spinor dyad: `o_A` with lower index, `iota^A` with upper index,
/// normalized so `iota^C o_C = 1`.
#[derive(Debug, Clone, Copy)]
pub struct Dyad {
    pub o_lower: [Complex64; 2],
    pub iota_upper: [Complex64; 2],
}

impl Dyad {
    /// `iota^C o_C`, which is exactly 1 for dyads built from angles.
    pub fn contraction(&self) -> Complex64 {
        self.iota_upper[0] * self.o_lower[0] + self.iota_upper[1] * self.o_lower[1]
    }

    /// `o^A`, raised with `eps^{01} = 1`.
    pub fn o_upper(&self) -> [Complex64; 2] {
        [self.o_lower[1], -self.o_lower[0]]
    }
}

/// A complex 4-vector (used for the tetrad leg `m`).
#[derive(Debug, Clone, Copy)]
pub struct ComplexFourVector {
    pub t: Complex64,
    pub x: Complex64,
    pub y: Complex64,
    pub z: Complex64,
}

impl ComplexFourVector {
    pub fn conj(&self) -> ComplexFourVector {
        ComplexFourVector {
            t: self.t.conj(),
            x: self.x.conj(),
            y: self.y.conj(),
            z: self.z.conj(),
        }
    }

    /// Minkowski inner product in `(+,-,-,-)`, bilinear (no conjugation).
    pub fn minkowski_dot(&self, other: &ComplexFourVector) -> Complex64 {
        self.t * other.t - self.x * other.x - self.y * other.y - self.z * other.z
    }

    pub fn dot_real(&self, a: &FourVector) -> Complex64 {
        self.t * a.t - self.x * a.x - self.y * a.y - self.z * a.z
    }
}

/// Null tetrad derived from a dyad: `l, n` real, `m` complex, `mbar`
/// implicit as the conjugate of `m`.
#[derive(Debug, Clone, Copy)]
pub struct NullTetrad {
    pub l: FourVector,
    pub n: FourVector,
    pub m: ComplexFourVector,
}

/// Dyad of the static parameterization at angles `(tau, eta)`:
/// `o_A = (sin(tau/2) e^{-i eta/2}, -cos(tau/2) e^{i eta/2})` and the
/// matching `iota^A` with the phases reversed.
pub fn dyad_from_angles(tau: f64, eta: f64) -> Dyad {
    let (s, c) = ((0.5 * tau).sin(), (0.5 * tau).cos());
    let half_eta = Complex64::new(0.0, 0.5 * eta).exp();
    let half_eta_conj = half_eta.conj();
    Dyad {
        o_lower: [s * half_eta_conj, -c * half_eta],
        iota_upper: [s * half_eta, -c * half_eta_conj],
    }
}

fn sigma_project(a: &[Complex64; 2], b_conj_source: &[Complex64; 2]) -> ComplexFourVector {
    // sigma^alpha_{A Adot} a^A conj(b)^{Adot} with sigma = (1, pauli)/sqrt(2).
    let b = [b_conj_source[0].conj(), b_conj_source[1].conj()];
    let inv = 1.0 / SQRT_2;
    ComplexFourVector {
        t: inv * (a[0] * b[0] + a[1] * b[1]),
        x: inv * (a[0] * b[1] + a[1] * b[0]),
        y: inv * Complex64::new(0.0, 1.0) * (a[1] * b[0] - a[0] * b[1]),
        z: inv * (a[0] * b[0] - a[1] * b[1]),
    }
}

fn real_part(v: &ComplexFourVector) -> FourVector {
    FourVector::new(v.t.re, v.x.re, v.y.re, v.z.re)
}

/// Null tetrad `(l, n, m)` of a normalized dyad.
///
/// `l` and `n` are the rank-one null vectors of `o` and `iota`; `m` mixes
/// them and has vanishing time component for every static dyad.
pub fn null_tetrad(dyad: &Dyad) -> Result<NullTetrad, SpinorError> {
    let defect = (dyad.contraction() - 1.0).norm();
    if defect > NORMALIZATION_TOL {
        return Err(SpinorError::Normalization { defect });
    }
    let o_up = dyad.o_upper();
    let l = sigma_project(&o_up, &o_up);
    let n = sigma_project(&dyad.iota_upper, &dyad.iota_upper);
    let m = sigma_project(&o_up, &dyad.iota_upper);
    Ok(NullTetrad {
        l: real_part(&l),
        n: real_part(&n),
        m,
    })
}

/// Dirac current of a static point: `(sqrt(2) R, 0, 0, 0)`.
pub fn current(point: &SpinorPoint) -> Result<FourVector, SpinorError> {
    if point.magnitude <= 0.0 {
        return Err(SpinorError::Degeneracy {
            value: point.magnitude,
        });
    }
    Ok(FourVector::new(SQRT_2 * point.magnitude, 0.0, 0.0, 0.0))
}

/// Current direction field scaled by magnitude:
/// `V = R (sin tau cos eta, sin tau sin eta, cos tau)`.
pub fn v_field(point: &SpinorPoint) -> Result<Vec3, SpinorError> {
    if point.magnitude <= 0.0 {
        return Err(SpinorError::Degeneracy {
            value: point.magnitude,
        });
    }
    let (st, ct) = (point.tau.sin(), point.tau.cos());
    let (se, ce) = (point.eta.sin(), point.eta.cos());
    Ok(Vec3::new(st * ce, st * se, ct).scale(point.magnitude))
}

/// Tetrad components of a real potential `A`, by direct contraction.
#[derive(Debug, Clone, Copy)]
pub struct TetradPotential {
    pub a_l: f64,
    pub a_n: f64,
    pub a_m: Complex64,
}

impl TetradPotential {
    /// `A_mbar`, the conjugate of `A_m` for real `A`.
    pub fn a_mbar(&self) -> Complex64 {
        self.a_m.conj()
    }
}

/// Project a real potential onto the tetrad legs.
pub fn tetrad_potential_components(a: &FourVector, tetrad: &NullTetrad) -> TetradPotential {
    TetradPotential {
        a_l: tetrad.l.minkowski_dot(*a),
        a_n: tetrad.n.minkowski_dot(*a),
        a_m: tetrad.m.dot_real(a),
    }
}

/// Samples of `(R, tau, chi, eta)` on an axisymmetric `(r, theta)` mesh.
///
/// The stored `eta` is the azimuthal offset `eta - phi`; the stationary
/// configurations of interest have it equal to 0 mod pi everywhere, which
/// the differential operations require.
#[derive(Debug, Clone)]
pub struct StaticFieldGrid {
    r_nodes: Vec<f64>,
    theta_nodes: Vec<f64>,
    values: Vec<SpinorPoint>,
    pub constants: PhysicalConstants,
}

impl StaticFieldGrid {
    pub fn new(
        r_nodes: Vec<f64>,
        theta_nodes: Vec<f64>,
        values: Vec<SpinorPoint>,
        constants: PhysicalConstants,
    ) -> Result<Self, SpinorError> {
        if r_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpinorError::Mesh {
                what: "r nodes must be strictly increasing".into(),
            });
        }
        if theta_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(SpinorError::Mesh {
                what: "theta nodes must be strictly increasing".into(),
            });
        }
        if theta_nodes.first().is_some_and(|&t| t <= 0.0)
            || theta_nodes.last().is_some_and(|&t| t >= std::f64::consts::PI)
        {
            return Err(SpinorError::Mesh {
                what: "theta nodes must lie strictly inside (0, pi)".into(),
            });
        }
        if values.len() != r_nodes.len() * theta_nodes.len() {
            return Err(SpinorError::Mesh {
                what: format!(
                    "value count {} does not match {} x {} mesh",
                    values.len(),
                    r_nodes.len(),
                    theta_nodes.len()
                ),
            });
        }
        if let Some(p) = values.iter().find(|p| p.magnitude <= 0.0) {
            return Err(SpinorError::Degeneracy { value: p.magnitude });
        }
        Ok(StaticFieldGrid {
            r_nodes,
            theta_nodes,
            values,
            constants,
        })
    }

    /// Build from closures of `(r, theta)`, with `eta` offset fixed to 0.
    pub fn from_profiles(
        r_nodes: Vec<f64>,
        theta_nodes: Vec<f64>,
        constants: PhysicalConstants,
        magnitude: impl Fn(f64, f64) -> f64,
        tau: impl Fn(f64, f64) -> f64,
        chi: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, SpinorError> {
        let mut values = Vec::with_capacity(r_nodes.len() * theta_nodes.len());
        for &r in &r_nodes {
            for &t in &theta_nodes {
                values.push(SpinorPoint {
                    magnitude: magnitude(r, t),
                    tau: tau(r, t),
                    chi: chi(r, t),
                    eta: 0.0,
                });
            }
        }
        StaticFieldGrid::new(r_nodes, theta_nodes, values, constants)
    }

    pub fn r_nodes(&self) -> &[f64] {
        &self.r_nodes
    }

    pub fn theta_nodes(&self) -> &[f64] {
        &self.theta_nodes
    }

    pub fn point(&self, i_r: usize, i_theta: usize) -> &SpinorPoint {
        &self.values[i_r * self.theta_nodes.len() + i_theta]
    }

    pub fn points(&self) -> &[SpinorPoint] {
        &self.values
    }

    pub(crate) fn field(&self, f: impl Fn(&SpinorPoint) -> f64) -> Grid2 {
        let mut g = Grid2::zeros(self.r_nodes.len(), self.theta_nodes.len());
        for i in 0..self.r_nodes.len() {
            for j in 0..self.theta_nodes.len() {
                g[(i, j)] = f(self.point(i, j));
            }
        }
        g
    }

    fn check_stencil(&self) -> Result<(), SpinorError> {
        if self.r_nodes.len() < 3 || self.theta_nodes.len() < 3 {
            return Err(SpinorError::Mesh {
                what: "second-order stencils need at least 3 nodes per direction".into(),
            });
        }
        Ok(())
    }

    /// Effective polar angle: the stored `eta` offset must be 0 mod pi;
    /// an offset of pi is absorbed as `tau -> -tau`.
    pub(crate) fn tau_effective(&self) -> Result<Grid2, SpinorError> {
        let mut worst: f64 = 0.0;
        for p in &self.values {
            worst = worst.max(p.eta.sin().abs());
        }
        if worst > 1e-9 {
            return Err(SpinorError::NonStationary { defect: worst });
        }
        Ok(self.field(|p| if p.eta.cos() < 0.0 { -p.tau } else { p.tau }))
    }
}

/// Meridional components `(V_r, V_theta)` of the current direction field
/// on the grid, in the spherical basis.
fn v_meridional(grid: &StaticFieldGrid) -> Result<(Grid2, Grid2), SpinorError> {
    let tau_eff = grid.tau_effective()?;
    let mut vr = Grid2::zeros(grid.r_nodes.len(), grid.theta_nodes.len());
    let mut vt = Grid2::zeros(grid.r_nodes.len(), grid.theta_nodes.len());
    for i in 0..grid.r_nodes.len() {
        for j in 0..grid.theta_nodes.len() {
            let p = grid.point(i, j);
            let gap = tau_eff[(i, j)] - grid.theta_nodes[j];
            vr[(i, j)] = p.magnitude * gap.cos();
            vt[(i, j)] = p.magnitude * gap.sin();
        }
    }
    Ok((vr, vt))
}

/// Scalar and azimuthal vector potential of a stationary axisymmetric grid.
///
/// `A0 = (m/e) cos chi + (grad chi . V) / (2 e R)` and the vector potential
/// reduces to its azimuthal component
/// `A_phi = (1/2e) [ cos tau / (r sin theta)
///                   - (1/rR)(d_r(r R sin(tau-theta)) - d_theta(R cos(tau-theta))) ]`.
pub fn potential_static(grid: &StaticFieldGrid) -> Result<(Grid2, Grid2), SpinorError> {
    grid.check_stencil()?;
    let (m, e) = (grid.constants.m, grid.constants.e);
    let r = grid.r_nodes();
    let theta = grid.theta_nodes();
    let tau_eff = grid.tau_effective()?;
    let (vr, vt) = v_meridional(grid)?;
    let chi = grid.field(|p| p.chi);
    let big_r = grid.field(|p| p.magnitude);
    let chi_r = chi.d_dr(r);
    let chi_t = chi.d_dtheta(theta);

    let mut a0 = Grid2::zeros(r.len(), theta.len());
    for i in 0..r.len() {
        for j in 0..theta.len() {
            let rr = big_r[(i, j)];
            let grad_dot_v = chi_r[(i, j)] * vr[(i, j)] + chi_t[(i, j)] / r[i] * vt[(i, j)];
            a0[(i, j)] = m / e * chi[(i, j)].cos() + grad_dot_v / (2.0 * e * rr);
        }
    }

    // Azimuthal component: (1/2e)[cos tau/(r sin th) - (curl V)_phi / R].
    let mut r_vt = Grid2::zeros(r.len(), theta.len());
    let mut vr_grid = Grid2::zeros(r.len(), theta.len());
    for i in 0..r.len() {
        for j in 0..theta.len() {
            r_vt[(i, j)] = r[i] * vt[(i, j)];
            vr_grid[(i, j)] = vr[(i, j)];
        }
    }
    let d_r_rvt = r_vt.d_dr(r);
    let d_t_vr = vr_grid.d_dtheta(theta);
    let mut aphi = Grid2::zeros(r.len(), theta.len());
    for i in 0..r.len() {
        for j in 0..theta.len() {
            let rr = big_r[(i, j)];
            let bracket = (d_r_rvt[(i, j)] - d_t_vr[(i, j)]) / (r[i] * rr);
            aphi[(i, j)] =
                (tau_eff[(i, j)].cos() / (r[i] * theta[j].sin()) - bracket) / (2.0 * e);
        }
    }
    Ok((a0, aphi))
}

/// Pointwise and integrated reality-condition residuals.
#[derive(Debug, Clone, Copy)]
pub struct RealityResiduals {
    /// sup |div V + 2 m R sin chi|
    pub divergence_max: f64,
    /// volume-weighted L2 of the divergence residual
    pub divergence_l2: f64,
    /// sup |(grad chi x V)_phi|
    pub curl_max: f64,
    /// volume-weighted L2 of the curl residual
    pub curl_l2: f64,
}

fn volume_l2(r: &[f64], theta: &[f64], g: &Grid2) -> f64 {
    // 2*pi * int int f^2 r^2 sin(th) dr dth by trapezoid in both directions.
    let mut integral = 0.0;
    for i in 1..r.len() {
        let dr = r[i] - r[i - 1];
        for j in 1..theta.len() {
            let dth = theta[j] - theta[j - 1];
            let cell = 0.25
                * (g[(i, j)].powi(2) * r[i] * r[i] * theta[j].sin()
                    + g[(i - 1, j)].powi(2) * r[i - 1] * r[i - 1] * theta[j].sin()
                    + g[(i, j - 1)].powi(2) * r[i] * r[i] * theta[j - 1].sin()
                    + g[(i - 1, j - 1)].powi(2) * r[i - 1] * r[i - 1] * theta[j - 1].sin());
            integral += cell * dr * dth;
        }
    }
    (2.0 * std::f64::consts::PI * integral).sqrt()
}

/// Residuals of the two reality conditions on the grid:
/// `div V + 2 m R sin chi` and `(grad chi) x V`.
///
/// Both vanish identically on exact solutions; on sampled exact solutions
/// they decay at the stencil's second order under mesh refinement.
pub fn reality_residuals(grid: &StaticFieldGrid) -> Result<RealityResiduals, SpinorError> {
    grid.check_stencil()?;
    let m = grid.constants.m;
    let r = grid.r_nodes();
    let theta = grid.theta_nodes();
    let (vr, vt) = v_meridional(grid)?;
    let chi = grid.field(|p| p.chi);
    let big_r = grid.field(|p| p.magnitude);
    let chi_r = chi.d_dr(r);
    let chi_t = chi.d_dtheta(theta);

    // div V = (1/r^2) d_r(r^2 V_r) + (1/(r sin th)) d_th(sin th V_th)
    let mut r2vr = Grid2::zeros(r.len(), theta.len());
    let mut svt = Grid2::zeros(r.len(), theta.len());
    for i in 0..r.len() {
        for j in 0..theta.len() {
            r2vr[(i, j)] = r[i] * r[i] * vr[(i, j)];
            svt[(i, j)] = theta[j].sin() * vt[(i, j)];
        }
    }
    let d_r2vr = r2vr.d_dr(r);
    let d_svt = svt.d_dtheta(theta);

    let mut div_res = Grid2::zeros(r.len(), theta.len());
    let mut curl_res = Grid2::zeros(r.len(), theta.len());
    for i in 0..r.len() {
        for j in 0..theta.len() {
            let div_v = d_r2vr[(i, j)] / (r[i] * r[i]) + d_svt[(i, j)] / (r[i] * theta[j].sin());
            div_res[(i, j)] = div_v + 2.0 * m * big_r[(i, j)] * chi[(i, j)].sin();
            curl_res[(i, j)] = chi_r[(i, j)] * vt[(i, j)] - chi_t[(i, j)] / r[i] * vr[(i, j)];
        }
    }
    let max_abs = |g: &Grid2| g.values().iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    Ok(RealityResiduals {
        divergence_max: max_abs(&div_res),
        divergence_l2: volume_l2(r, theta, &div_res),
        curl_max: max_abs(&curl_res),
        curl_l2: volume_l2(r, theta, &curl_res),
    })
}

/// Orientation sign of `gamma` in `V = gamma grad(chi)`, estimated as the
/// sign of the mesh average of `V . grad(chi)`.
///
/// The sign must be constant wherever `|V . grad(chi)|` is resolved;
/// mixed signs are reported as an error.
pub fn orientation_sign(grid: &StaticFieldGrid) -> Result<i8, SpinorError> {
    grid.check_stencil()?;
    let r = grid.r_nodes();
    let theta = grid.theta_nodes();
    let (vr, vt) = v_meridional(grid)?;
    let chi = grid.field(|p| p.chi);
    let chi_r = chi.d_dr(r);
    let chi_t = chi.d_dtheta(theta);
    let mut sum = 0.0;
    let mut scale: f64 = 0.0;
    let mut samples = Vec::with_capacity(r.len() * theta.len());
    for i in 0..r.len() {
        for j in 0..theta.len() {
            let s = vr[(i, j)] * chi_r[(i, j)] + vt[(i, j)] * chi_t[(i, j)] / r[i];
            sum += s;
            scale = scale.max(s.abs());
            samples.push(s);
        }
    }
    let resolved_floor = 1e-10 * scale;
    let has_pos = samples.iter().any(|&s| s > resolved_floor);
    let has_neg = samples.iter().any(|&s| s < -resolved_floor);
    if has_pos && has_neg {
        return Err(SpinorError::OrientationNotConstant);
    }
    Ok(if sum >= 0.0 { 1 } else { -1 })
}
