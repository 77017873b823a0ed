//! Axisymmetric diagnostics: potential assembly, flux integrals, Coulomb
//! extraction, monopole quantization, and the multi-monopole sign ledger.
//!
//! Everything here works on `(r, theta)` product meshes with the polar
//! interval open at both ends; quantities at the poles are reached by
//! extrapolation in `u = cos(theta)`, in which smooth axisymmetric fields
//! are smooth through the axis.

use std::f64::consts::PI;

use thiserror::Error;

use crate::fd::{self, Grid2};
use crate::fit;
use crate::quad;
use crate::spinor::{PhysicalConstants, SpinorError, StaticFieldGrid};

#[derive(Debug, Error)]
pub enum AxisymError {
    #[error("degenerate field data: R = {value} must be positive")]
    Degeneracy { value: f64 },
    #[error("mesh unsuitable: {what}")]
    Mesh { what: String },
    #[error("pole extrapolation did not stabilize: linear/quadratic gap {gap}")]
    PoleExtrapolation { gap: f64 },
    #[error("charge series does not settle: max successive difference {spread}")]
    NonCauchy { spread: f64 },
    #[error("stationary point of chi at r = {r}, theta = {theta}")]
    StationaryPoint { r: f64, theta: f64 },
    #[error("fit rejected: {what}")]
    Fit { what: String },
    #[error(transparent)]
    Spinor(#[from] SpinorError),
}

/// Potential samples of a stationary axisymmetric configuration: the scalar
/// potential and the azimuthal vector-potential component, the only one that
/// survives the symmetry.
#[derive(Debug, Clone)]
pub struct AxiPotentialGrid {
    pub r_nodes: Vec<f64>,
    pub theta_nodes: Vec<f64>,
    pub a0: Grid2,
    pub aphi: Grid2,
    pub constants: PhysicalConstants,
}

impl AxiPotentialGrid {
    pub fn new(
        r_nodes: Vec<f64>,
        theta_nodes: Vec<f64>,
        a0: Grid2,
        aphi: Grid2,
        constants: PhysicalConstants,
    ) -> Result<Self, AxisymError> {
        if r_nodes.len() < 3 || r_nodes.windows(2).any(|w| w[1] <= w[0]) {
            return Err(AxisymError::Mesh {
                what: "need >= 3 strictly increasing radial nodes".into(),
            });
        }
        if theta_nodes.len() < 3
            || theta_nodes.windows(2).any(|w| w[1] <= w[0])
            || theta_nodes[0] <= 0.0
            || *theta_nodes.last().unwrap() >= PI
        {
            return Err(AxisymError::Mesh {
                what: "need >= 3 increasing polar nodes strictly inside (0, pi)".into(),
            });
        }
        for g in [&a0, &aphi] {
            if g.n_r != r_nodes.len() || g.n_theta != theta_nodes.len() {
                return Err(AxisymError::Mesh {
                    what: "potential sample shape does not match the mesh".into(),
                });
            }
        }
        Ok(AxiPotentialGrid {
            r_nodes,
            theta_nodes,
            a0,
            aphi,
            constants,
        })
    }

    pub fn from_fn(
        r_nodes: Vec<f64>,
        theta_nodes: Vec<f64>,
        constants: PhysicalConstants,
        a0: impl Fn(f64, f64) -> f64,
        aphi: impl Fn(f64, f64) -> f64,
    ) -> Result<Self, AxisymError> {
        let g0 = Grid2::from_fn(&r_nodes, &theta_nodes, a0);
        let g1 = Grid2::from_fn(&r_nodes, &theta_nodes, aphi);
        AxiPotentialGrid::new(r_nodes, theta_nodes, g0, g1, constants)
    }

    fn radius_index(&self, r: f64) -> Result<usize, AxisymError> {
        let n = self.r_nodes.len();
        if r < self.r_nodes[0] * (1.0 - 1e-12) || r > self.r_nodes[n - 1] * (1.0 + 1e-12) {
            return Err(AxisymError::Mesh {
                what: format!("radius {r} outside the sampled range"),
            });
        }
        Ok((0..n)
            .min_by(|&a, &b| {
                (self.r_nodes[a] - r)
                    .abs()
                    .total_cmp(&(self.r_nodes[b] - r).abs())
            })
            .unwrap())
    }
}

/// Assemble the potentials of a stationary field grid.
pub fn vector_potential_axisym(grid: &StaticFieldGrid) -> Result<AxiPotentialGrid, AxisymError> {
    let (a0, aphi) = crate::spinor::potential_static(grid)?;
    AxiPotentialGrid::new(
        grid.r_nodes().to_vec(),
        grid.theta_nodes().to_vec(),
        a0,
        aphi,
        grid.constants,
    )
}

/// Extrapolate polar samples to a pole, quadratically in `u = cos(theta)`.
///
/// Stabilization: the quadratic and linear extrapolants must agree to
/// 1e-6; fields that are smooth through the axis satisfy this easily.
fn pole_value(theta: &[f64], f: &[f64], north: bool) -> Result<f64, AxisymError> {
    let n = theta.len();
    let (idx, target): ([usize; 3], f64) = if north {
        ([0, 1, 2], 1.0)
    } else {
        ([n - 1, n - 2, n - 3], -1.0)
    };
    let u: Vec<f64> = idx.iter().map(|&i| theta[i].cos()).collect();
    let v: Vec<f64> = idx.iter().map(|&i| f[i]).collect();
    let mut quad_val = 0.0;
    for k in 0..3 {
        let mut l = 1.0;
        for j in 0..3 {
            if j != k {
                l *= (target - u[j]) / (u[k] - u[j]);
            }
        }
        quad_val += l * v[k];
    }
    let lin = v[0] + (v[1] - v[0]) * (target - u[0]) / (u[1] - u[0]);
    let gap = (quad_val - lin).abs();
    if gap > 1e-6 * (1.0 + quad_val.abs()) {
        return Err(AxisymError::PoleExtrapolation { gap });
    }
    Ok(quad_val)
}

/// Derivative of the global polynomial interpolant through `(x, f)`,
/// via barycentric weights in log scale. Spectrally accurate on
/// Gauss-Legendre nodes for smooth data.
fn spectral_derivative(x: &[f64], f: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut lw = vec![0.0f64; n];
    let mut sg = vec![1.0f64; n];
    for j in 0..n {
        for k in 0..n {
            if k != j {
                lw[j] += (x[j] - x[k]).abs().ln();
                sg[j] *= (x[j] - x[k]).signum();
            }
        }
    }
    let mut out = vec![0.0; n];
    for i in 0..n {
        let mut d = 0.0;
        for j in 0..n {
            if j != i {
                // w_j / w_i with w_j = sg_j * exp(-lw_j).
                let ratio = sg[j] * sg[i] * (lw[i] - lw[j]).exp();
                d += ratio / (x[i] - x[j]) * (f[j] - f[i]);
            }
        }
        out[i] = d;
    }
    out
}

/// Magnetic charge at one radius, by two independent routes.
#[derive(Debug, Clone, Copy)]
pub struct MagneticCharge {
    /// Endpoint evaluation `(1/2)[r sin(theta) A_phi]` between the poles.
    pub endpoint: f64,
    /// Polar quadrature of the derivative of the same flux function.
    pub quadrature: f64,
    /// Disagreement between the two routes.
    pub gap: f64,
}

impl MagneticCharge {
    pub fn value(&self) -> f64 {
        self.endpoint
    }
}

/// Sphere-averaged magnetic charge `b(r) = (1/2)[r sin(theta) A_phi]_0^pi`.
pub fn magnetic_charge(grid: &AxiPotentialGrid, r: f64) -> Result<MagneticCharge, AxisymError> {
    let i = grid.radius_index(r)?;
    let ri = grid.r_nodes[i];
    let theta = &grid.theta_nodes;
    let flux: Vec<f64> = theta
        .iter()
        .enumerate()
        .map(|(j, &t)| ri * t.sin() * grid.aphi[(i, j)])
        .collect();
    let f0 = pole_value(theta, &flux, true)?;
    let fpi = pole_value(theta, &flux, false)?;
    let endpoint = 0.5 * (fpi - f0);

    let quadrature = if quad::is_gauss_theta_mesh(theta) && theta.len() <= 200 {
        let df = spectral_derivative(theta, &flux);
        let (_, w) = quad::gauss_legendre_ab(theta.len(), 0.0, PI);
        0.5 * df.iter().zip(&w).map(|(&d, &wi)| d * wi).sum::<f64>()
    } else {
        // Interior trapezoid of the difference quotient plus the pole
        // slivers taken from the extrapolated flux values.
        let df = fd::derivative(theta, &flux);
        let interior = quad::trapezoid(theta, &df);
        0.5 * (interior + (flux[0] - f0) + (fpi - flux[flux.len() - 1]))
    };
    Ok(MagneticCharge {
        endpoint,
        quadrature,
        gap: (endpoint - quadrature).abs(),
    })
}

/// Sphere-averaged electric flux `Q(r) = (r^2/2) int d_r A0 sin(theta) d theta`.
///
/// Note the sign inherited from the flux definition: a Coulomb potential
/// `A0 = q/r` yields `Q = -q`; negate for the physical point charge.
pub fn electric_charge(grid: &AxiPotentialGrid, r: f64) -> Result<f64, AxisymError> {
    let i = grid.radius_index(r)?;
    let ri = grid.r_nodes[i];
    let da0 = grid.a0.d_dr(&grid.r_nodes);
    let integrand: Vec<f64> = grid
        .theta_nodes
        .iter()
        .enumerate()
        .map(|(j, &t)| da0[(i, j)] * t.sin())
        .collect();
    Ok(ri * ri / 2.0 * quad::integrate_theta(&grid.theta_nodes, &integrand))
}

/// Coulomb decomposition `A0 = q/r + h` on a ball of radius `rho`.
#[derive(Debug, Clone, Copy)]
pub struct CoulombFit {
    pub q: f64,
    /// Sup of the bounded remainder over the fitted shells.
    pub h_sup: f64,
    /// Root-mean-square misfit of the shell averages.
    pub rms: f64,
}

/// Extract the Coulomb coefficient by fitting angle-averaged shells
/// against `1/r` plus a constant, inside radius `rho`.
pub fn coulomb_extract(grid: &AxiPotentialGrid, rho: f64) -> Result<CoulombFit, AxisymError> {
    let shells: Vec<usize> = (0..grid.r_nodes.len())
        .filter(|&i| grid.r_nodes[i] <= rho * (1.0 + 1e-12))
        .collect();
    if shells.len() < 3 {
        return Err(AxisymError::Mesh {
            what: format!("need >= 3 shells inside rho = {rho}"),
        });
    }
    let theta = &grid.theta_nodes;
    // Normalize by the quadrature of sin(theta) itself so the shell average
    // is exact for angle-independent fields regardless of the mesh; otherwise
    // the quadrature bias leaks into `q` and mimics an unbounded remainder.
    let sines: Vec<f64> = theta.iter().map(|&t| t.sin()).collect();
    let denom = quad::integrate_theta(theta, &sines);
    let mut avg = Vec::with_capacity(shells.len());
    let mut radii = Vec::with_capacity(shells.len());
    for &i in &shells {
        let row: Vec<f64> = (0..theta.len())
            .map(|j| grid.a0[(i, j)] * sines[j])
            .collect();
        avg.push(quad::integrate_theta(theta, &row) / denom);
        radii.push(grid.r_nodes[i]);
    }
    let inv_r: Vec<f64> = radii.iter().map(|&r| r.recip()).collect();
    let ones = vec![1.0; radii.len()];
    let c = fit::linear_least_squares(&[&inv_r, &ones], &avg);
    let scale = grid
        .a0
        .values()
        .iter()
        .fold(0.0f64, |m, &v| m.max(v.abs()));
    let q = if c[0].abs() < 1e-8 * scale.max(1.0) {
        0.0
    } else {
        c[0]
    };

    let mut h_sup: f64 = 0.0;
    let mut shell_sup = vec![0.0f64; shells.len()];
    for (s, &i) in shells.iter().enumerate() {
        for j in 0..theta.len() {
            let h = (grid.a0[(i, j)] - q / grid.r_nodes[i]).abs();
            h_sup = h_sup.max(h);
            shell_sup[s] = shell_sup[s].max(h);
        }
    }
    // A remainder that grows like a power toward r = 0 is not "bounded":
    // reject when the shell sup trends upward going inward.
    if h_sup > 1e-10 * scale.max(1.0) {
        let lx: Vec<f64> = radii.iter().map(|&r| r.ln()).collect();
        let ly: Vec<f64> = shell_sup.iter().map(|&s| s.max(1e-300).ln()).collect();
        let trend = fit::line(&lx, &ly);
        if trend.slope < -0.5 {
            return Err(AxisymError::Fit {
                what: format!(
                    "remainder grows toward the origin (shell-sup slope {:.3})",
                    trend.slope
                ),
            });
        }
    }
    let rms = (avg
        .iter()
        .zip(&inv_r)
        .map(|(&a, &ir)| {
            let d = a - c[0] * ir - c[1];
            d * d
        })
        .sum::<f64>()
        / avg.len() as f64)
        .sqrt();
    Ok(CoulombFit { q, h_sup, rms })
}

/// Recover `tau - theta` from phase samples via the normalized gradient:
/// `cos(tau-theta) = eps d_r chi / |grad chi|`,
/// `sin(tau-theta) = eps d_theta chi / (r |grad chi|)`.
///
/// The two-argument arctangent of that pair keeps `cos^2 + sin^2 = 1`
/// identically. Nodes where the gradient underflows the mesh-local scale
/// are stationary points of the phase and have no well-defined angle.
pub fn tau_from_chi(
    chi: &Grid2,
    r_nodes: &[f64],
    theta_nodes: &[f64],
    epsilon: i8,
) -> Result<Grid2, AxisymError> {
    assert!(epsilon == 1 || epsilon == -1);
    if r_nodes.len() < 3 || theta_nodes.len() < 3 {
        return Err(AxisymError::Mesh {
            what: "gradient stencils need >= 3 nodes per direction".into(),
        });
    }
    let chi_r = chi.d_dr(r_nodes);
    let chi_t = chi.d_dtheta(theta_nodes);
    let scale = chi.values().iter().fold(0.0f64, |m, &v| m.max(v.abs()));
    let eps = epsilon as f64;
    let mut out = Grid2::zeros(chi.n_r, chi.n_theta);
    for i in 0..chi.n_r {
        for j in 0..chi.n_theta {
            let gr = chi_r[(i, j)];
            let gt = chi_t[(i, j)] / r_nodes[i];
            if gr.hypot(gt) < 1e-12 * scale.max(1.0) / r_nodes[i] {
                return Err(AxisymError::StationaryPoint {
                    r: r_nodes[i],
                    theta: theta_nodes[j],
                });
            }
            out[(i, j)] = (eps * gt).atan2(eps * gr);
        }
    }
    Ok(out)
}

/// Quantization verdict for an extrapolated magnetic charge.
#[derive(Debug, Clone, Copy)]
pub struct QuantizationVerdict {
    pub b0: f64,
    /// Nearer of the two quantized values `+-1/(2e)`.
    pub target: f64,
    pub distance: f64,
    pub pass: bool,
}

/// Small-`r` limit of the pole-difference magnetic charge.
#[derive(Debug, Clone)]
pub struct MonopoleLimit {
    pub radii: Vec<f64>,
    /// `b(r) = (cos tau(r, pi) - cos tau(r, 0)) / (4e)` per radius.
    pub b_series: Vec<f64>,
    pub verdict: QuantizationVerdict,
}

/// Extrapolate `b(r) -> b0` as `r -> 0` from polar-angle samples and test
/// it against the quantized values.
///
/// The series must be Cauchy over the smallest decade of radii (successive
/// differences below `tol`); `b0` is the intercept of a linear fit in `r`
/// over that decade.
pub fn monopole_limit(
    r_nodes: &[f64],
    theta_nodes: &[f64],
    tau: &Grid2,
    e: f64,
    tol: f64,
) -> Result<MonopoleLimit, AxisymError> {
    if r_nodes.len() < 3 || theta_nodes.len() < 3 {
        return Err(AxisymError::Mesh {
            what: "need >= 3 radii and polar nodes".into(),
        });
    }
    let mut b = Vec::with_capacity(r_nodes.len());
    for i in 0..r_nodes.len() {
        let cos_row: Vec<f64> = (0..theta_nodes.len()).map(|j| tau[(i, j)].cos()).collect();
        let c0 = pole_value(theta_nodes, &cos_row, true)?;
        let cpi = pole_value(theta_nodes, &cos_row, false)?;
        b.push((cpi - c0) / (4.0 * e));
    }
    let decade: Vec<usize> = (0..r_nodes.len())
        .filter(|&i| r_nodes[i] <= 10.0 * r_nodes[0])
        .collect();
    let spread = decade
        .windows(2)
        .map(|w| (b[w[1]] - b[w[0]]).abs())
        .fold(0.0, f64::max);
    if spread > tol {
        return Err(AxisymError::NonCauchy { spread });
    }
    let xs: Vec<f64> = decade.iter().map(|&i| r_nodes[i]).collect();
    let ys: Vec<f64> = decade.iter().map(|&i| b[i]).collect();
    let b0 = fit::line(&xs, &ys).intercept;
    let quantum = 1.0 / (2.0 * e);
    let target = if (b0 - quantum).abs() <= (b0 + quantum).abs() {
        quantum
    } else {
        -quantum
    };
    let distance = (b0 - target).abs();
    Ok(MonopoleLimit {
        radii: r_nodes.to_vec(),
        b_series: b,
        verdict: QuantizationVerdict {
            b0,
            target,
            distance,
            pass: distance < tol,
        },
    })
}

/// Sups certifying the boundedness hypothesis behind the quantization
/// argument.
#[derive(Debug, Clone, Copy)]
pub struct PBound {
    /// sup |(r d_r tau - d_theta R / R) cos(tau-theta)
    ///      - (d_theta tau - 2 + r d_r R / R) sin(tau-theta)|
    pub sup_p: f64,
    /// sup |r d_r tau - d_theta R / R| alone.
    pub sup_hypothesis: f64,
}

/// Evaluate the boundedness sups over the annulus `r in [annulus.0, annulus.1]`.
pub fn boundedness_check_p(
    grid: &StaticFieldGrid,
    annulus: (f64, f64),
) -> Result<PBound, AxisymError> {
    let r = grid.r_nodes();
    let theta = grid.theta_nodes();
    if r.len() < 3 || theta.len() < 3 {
        return Err(AxisymError::Mesh {
            what: "need >= 3 nodes per direction".into(),
        });
    }
    let tau = grid.tau_effective()?;
    let big_r = grid.field(|p| p.magnitude);
    let tau_r = tau.d_dr(r);
    let tau_t = tau.d_dtheta(theta);
    let rr_r = big_r.d_dr(r);
    let rr_t = big_r.d_dtheta(theta);
    let mut sup_p: f64 = 0.0;
    let mut sup_h: f64 = 0.0;
    let mut seen = false;
    for (i, &ri) in r.iter().enumerate() {
        if ri < annulus.0 || ri > annulus.1 {
            continue;
        }
        seen = true;
        for (j, &tj) in theta.iter().enumerate() {
            let gap = tau[(i, j)] - tj;
            let hyp = ri * tau_r[(i, j)] - rr_t[(i, j)] / big_r[(i, j)];
            let p = hyp * gap.cos()
                - (tau_t[(i, j)] - 2.0 + ri * rr_r[(i, j)] / big_r[(i, j)]) * gap.sin();
            sup_p = sup_p.max(p.abs());
            sup_h = sup_h.max(hyp.abs());
        }
    }
    if !seen {
        return Err(AxisymError::Mesh {
            what: "annulus contains no radial nodes".into(),
        });
    }
    Ok(PBound {
        sup_p,
        sup_hypothesis: sup_h,
    })
}

/// True when every `(phi, eta)` sample satisfies `eta - phi = 0 mod pi`
/// within `tol`, the stationarity criterion for axisymmetric gauges.
pub fn stationarity_check_axisym(samples: &[(f64, f64)], tol: f64) -> bool {
    samples.iter().all(|&(phi, eta)| {
        let d = (eta - phi) / PI;
        ((d - d.round()) * PI).abs() <= tol
    })
}

/// Signs of a system of point monopoles plus the global orientation.
#[derive(Debug, Clone)]
pub struct MonopoleLedger {
    pub eps_i: Vec<i8>,
    pub eps: i8,
}

impl MonopoleLedger {
    pub fn new(eps_i: Vec<i8>, eps: i8) -> Self {
        assert!(eps == 1 || eps == -1);
        assert!(eps_i.iter().all(|&s| s == 1 || s == -1));
        MonopoleLedger { eps_i, eps }
    }
}

/// Parity constraint forced on a feasible sign vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    /// Even count: feasibility forces the signs to cancel exactly.
    EvenForcesZero,
    /// Odd count: feasibility forces a single uncancelled sign.
    OddForcesUnit,
}

#[derive(Debug, Clone, Copy)]
pub struct LedgerReport {
    pub n: usize,
    pub sum: i64,
    /// Total magnetic charge `-(eps / 2e) sum eps_i`.
    pub b_total: f64,
    /// The sign bookkeeping only closes when `|sum| <= 1`.
    pub feasible: bool,
    pub parity: Parity,
}

/// Arithmetic of the multi-monopole charge total.
pub fn monopole_ledger(ledger: &MonopoleLedger, e: f64) -> LedgerReport {
    let sum: i64 = ledger.eps_i.iter().map(|&s| s as i64).sum();
    let n = ledger.eps_i.len();
    LedgerReport {
        n,
        sum,
        b_total: -(ledger.eps as f64) * sum as f64 / (2.0 * e),
        feasible: sum.abs() <= 1,
        parity: if n % 2 == 0 {
            Parity::EvenForcesZero
        } else {
            Parity::OddForcesUnit
        },
    }
}

/// Divergence of the vector potential (the static gauge residual).
///
/// For a purely azimuthal axisymmetric potential the divergence vanishes
/// identically, so any nonzero value flags foreign components; an injected
/// radial component `a_r` contributes `(1/r^2) d_r (r^2 a_r)`.
pub fn lorenz_gauge_residual(grid: &AxiPotentialGrid, a_r: Option<&Grid2>) -> f64 {
    match a_r {
        None => 0.0,
        Some(ar) => {
            let r = &grid.r_nodes;
            let scaled = Grid2::from_fn(r, &grid.theta_nodes, |_, _| 0.0);
            let mut g = scaled;
            for i in 0..g.n_r {
                for j in 0..g.n_theta {
                    g[(i, j)] = r[i] * r[i] * ar[(i, j)];
                }
            }
            let d = g.d_dr(r);
            let mut worst: f64 = 0.0;
            for i in 0..g.n_r {
                for j in 0..g.n_theta {
                    worst = worst.max((d[(i, j)] / (r[i] * r[i])).abs());
                }
            }
            worst
        }
    }
}

/// Residual of the first-order equation satisfied by the phase remainder
/// `zeta = chi - q ln r`:
/// `zeta_r^2 + (2q/r) zeta_r + zeta_theta^2/r^2 - (2q/r) g - g^2`
/// with `g = |grad chi| - q/r`. Identically zero for any smooth phase;
/// the numerical value measures stencil error.
pub fn log_phase_residual(chi: &Grid2, r_nodes: &[f64], theta_nodes: &[f64], q: f64) -> Grid2 {
    let mut zeta = Grid2::zeros(chi.n_r, chi.n_theta);
    for i in 0..chi.n_r {
        for j in 0..chi.n_theta {
            zeta[(i, j)] = chi[(i, j)] - q * r_nodes[i].ln();
        }
    }
    let zr = zeta.d_dr(r_nodes);
    let zt = zeta.d_dtheta(theta_nodes);
    let cr = chi.d_dr(r_nodes);
    let ct = chi.d_dtheta(theta_nodes);
    let mut out = Grid2::zeros(chi.n_r, chi.n_theta);
    for i in 0..chi.n_r {
        let ri = r_nodes[i];
        for j in 0..chi.n_theta {
            let g = cr[(i, j)].hypot(ct[(i, j)] / ri) - q / ri;
            let a = zr[(i, j)];
            let b = zt[(i, j)] / ri;
            out[(i, j)] = a * a + 2.0 * q / ri * a + b * b - 2.0 * q / ri * g - g * g;
        }
    }
    out
}

/// Combined diagnostics with a stable, diff-friendly rendering.
#[derive(Debug, Clone, Default)]
pub struct ChargeReport {
    /// `(r, Q(r))` electric flux series.
    pub electric: Vec<(f64, f64)>,
    /// `(r, b(r))` magnetic charge series.
    pub magnetic: Vec<(f64, f64)>,
    pub coulomb: Option<CoulombFit>,
    pub verdict: Option<QuantizationVerdict>,
    pub ledger_total: Option<f64>,
}

impl ChargeReport {
    /// `key=value` lines in fixed order.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let scalar = |v: Option<f64>| match v {
            Some(x) => format!("{x}"),
            None => "n/a".into(),
        };
        out.push_str(&format!(
            "electric_Q={}\n",
            scalar(self.electric.last().map(|&(_, q)| q))
        ));
        out.push_str(&format!(
            "magnetic_b={}\n",
            scalar(self.magnetic.last().map(|&(_, b)| b))
        ));
        out.push_str(&format!(
            "coulomb_q={}\n",
            scalar(self.coulomb.map(|c| c.q))
        ));
        match &self.verdict {
            Some(v) => out.push_str(&format!(
                "quantization_verdict={} b0={} distance={}\n",
                if v.pass { "PASS" } else { "FAIL" },
                v.b0,
                v.distance
            )),
            None => out.push_str("quantization_verdict=n/a\n"),
        }
        out.push_str(&format!("ledger_total={}\n", scalar(self.ledger_total)));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad::gauss_legendre_ab;

    fn unit() -> PhysicalConstants {
        PhysicalConstants::new(1.0, 1.0)
    }

    fn gauss_theta(n: usize) -> Vec<f64> {
        gauss_legendre_ab(n, 0.0, PI).0
    }

    fn radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        let step = (hi / lo).ln() / (n - 1) as f64;
        (0..n).map(|i| lo * (step * i as f64).exp()).collect()
    }

    #[test]
    fn monopole_magnetic_charge_exact() {
        // A_phi = cot(theta)/(2 e r): flux function cos(theta)/2, b = -1/2.
        let grid = AxiPotentialGrid::from_fn(
            radii(0.5, 5.0, 10),
            gauss_theta(64),
            unit(),
            |r, _| 1.0 / r,
            |r, t| (t.cos() / t.sin()) / (2.0 * r),
        )
        .unwrap();
        for &r in &grid.r_nodes.clone() {
            let b = magnetic_charge(&grid, r).unwrap();
            assert!((b.value() + 0.5).abs() < 1e-10, "b({r}) = {}", b.value());
            assert!(b.gap < 1e-10, "route gap {} at r = {r}", b.gap);
        }
    }

    #[test]
    fn regular_axis_field_carries_no_charge() {
        let grid = AxiPotentialGrid::from_fn(
            radii(0.5, 5.0, 10),
            gauss_theta(48),
            unit(),
            |_, _| 0.0,
            |r, t| t.sin() / r,
        )
        .unwrap();
        let b = magnetic_charge(&grid, 1.0).unwrap();
        assert!(b.value().abs() < 1e-12);
        assert!(b.quadrature.abs() < 1e-10);

        let zero = AxiPotentialGrid::from_fn(
            radii(0.5, 5.0, 10),
            gauss_theta(48),
            unit(),
            |_, _| 0.0,
            |_, _| 0.0,
        )
        .unwrap();
        assert_eq!(magnetic_charge(&zero, 1.0).unwrap().value(), 0.0);
    }

    #[test]
    fn electric_flux_examples() {
        let grid = AxiPotentialGrid::from_fn(
            radii(1.0, 2.0, 600),
            gauss_theta(32),
            unit(),
            |r, _| 1.0 / r,
            |_, _| 0.0,
        )
        .unwrap();
        for &r in &[1.1, 1.5, 1.9] {
            let q = electric_charge(&grid, r).unwrap();
            assert!((q + 1.0).abs() < 1e-5, "Q({r}) = {q}");
        }

        let constant = AxiPotentialGrid::from_fn(
            radii(1.0, 2.0, 50),
            gauss_theta(32),
            unit(),
            |_, _| 4.2,
            |_, _| 0.0,
        )
        .unwrap();
        assert_eq!(electric_charge(&constant, 1.5).unwrap(), 0.0);

        // Dipole term integrates away.
        let dipole = AxiPotentialGrid::from_fn(
            radii(1.0, 2.0, 600),
            gauss_theta(32),
            unit(),
            |r, t| 1.0 / r + t.cos() / (r * r),
            |_, _| 0.0,
        )
        .unwrap();
        let q = electric_charge(&dipole, 1.5).unwrap();
        assert!((q + 1.0).abs() < 1e-5, "Q = {q}");
    }

    #[test]
    fn constant_gauge_shift_is_exact() {
        let r = radii(1.0, 3.0, 40);
        let th = gauss_theta(24);
        let a = AxiPotentialGrid::from_fn(r.clone(), th.clone(), unit(), |r, t| {
            (t.cos() + 2.0) / r
        }, |_, _| 0.0)
        .unwrap();
        let b = AxiPotentialGrid::from_fn(r, th, unit(), |r, t| (t.cos() + 2.0) / r + 7.5, |_, _| {
            0.0
        })
        .unwrap();
        let qa = electric_charge(&a, 2.0).unwrap();
        let qb = electric_charge(&b, 2.0).unwrap();
        // The constant drops out of the stencil analytically; numerically
        // only rounding noise survives.
        assert!((qa - qb).abs() < 1e-12, "{qa} vs {qb}");
    }

    #[test]
    fn coulomb_extraction() {
        let grid = AxiPotentialGrid::from_fn(
            radii(0.2, 2.0, 80),
            gauss_theta(24),
            unit(),
            |r, _| 5.0 / r + 3.0,
            |_, _| 0.0,
        )
        .unwrap();
        let fit = coulomb_extract(&grid, 2.0).unwrap();
        assert!((fit.q - 5.0).abs() < 1e-9);
        assert!((fit.h_sup - 3.0).abs() < 1e-9);

        let dip = AxiPotentialGrid::from_fn(
            radii(0.2, 2.0, 80),
            gauss_theta(24),
            unit(),
            |r, t| 2.0 / r + t.cos(),
            |_, _| 0.0,
        )
        .unwrap();
        let fit = coulomb_extract(&dip, 2.0).unwrap();
        assert!((fit.q - 2.0).abs() < 1e-9);
        assert!(fit.h_sup <= 1.0 + 1e-9);

        let flat = AxiPotentialGrid::from_fn(
            radii(0.2, 2.0, 80),
            gauss_theta(24),
            unit(),
            |_, t| 3.0 + 0.1 * t.cos(),
            |_, _| 0.0,
        )
        .unwrap();
        assert_eq!(coulomb_extract(&flat, 2.0).unwrap().q, 0.0);

        // Remainder growing toward the origin is not a bounded h.
        let bad = AxiPotentialGrid::from_fn(
            radii(0.02, 2.0, 120),
            gauss_theta(24),
            unit(),
            |r, _| 5.0 / r + 0.3 / (r * r),
            |_, _| 0.0,
        )
        .unwrap();
        assert!(matches!(
            coulomb_extract(&bad, 2.0),
            Err(AxisymError::Fit { .. })
        ));
    }

    #[test]
    fn coulomb_random_family() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        let r = radii(0.2, 2.0, 80);
        let th = gauss_theta(24);
        for _ in 0..50 {
            let q: f64 = loop {
                let v: f64 = rng.gen_range(-5.0..5.0);
                if v.abs() > 0.2 {
                    break v;
                }
            };
            let (a, b, c): (f64, f64, f64) = (
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
                rng.gen_range(-2.0..2.0),
            );
            let grid = AxiPotentialGrid::from_fn(
                r.clone(),
                th.clone(),
                unit(),
                move |rr, t| q / rr + a + b * t.cos() + c * (3.0 * t).cos(),
                |_, _| 0.0,
            )
            .unwrap();
            let fit = coulomb_extract(&grid, 2.0).unwrap();
            assert!((fit.q - q).abs() < 1e-3 * q.abs(), "q = {q} got {}", fit.q);
        }
    }

    #[test]
    fn angle_recovery_from_phase() {
        let r = radii(1.0, 4.0, 60);
        let th = gauss_theta(40);

        // Radial log phase: gradient points along r, so tau = theta.
        let chi = Grid2::from_fn(&r, &th, |rr, _| 2.0 * rr.ln());
        let delta = tau_from_chi(&chi, &r, &th, 1).unwrap();
        for &v in delta.values() {
            assert!(v.abs() < 1e-10);
        }

        // Small polar admixture: sin(tau - theta) ~ eps * d / q.
        let d = 1e-3;
        let chi = Grid2::from_fn(&r, &th, |rr, t| 2.0 * rr.ln() + d * t);
        let delta = tau_from_chi(&chi, &r, &th, 1).unwrap();
        let mid = delta[(30, 20)];
        assert!((mid.sin() - d / 2.0).abs() < 1e-5, "got {}", mid.sin());

        // Identity on the normalized pair.
        for &v in delta.values() {
            assert!((v.sin().powi(2) + v.cos().powi(2) - 1.0).abs() < 1e-15);
        }

        let flat = Grid2::from_fn(&r, &th, |_, _| 1.0);
        assert!(matches!(
            tau_from_chi(&flat, &r, &th, 1),
            Err(AxisymError::StationaryPoint { .. })
        ));
    }

    #[test]
    fn monopole_limit_families() {
        let r = radii(0.01, 1.0, 60);
        let th = gauss_theta(48);

        // Exact monopole: b(r) = -1/2 at every radius.
        let tau = Grid2::from_fn(&r, &th, |_, t| t);
        let lim = monopole_limit(&r, &th, &tau, 1.0, 1e-3).unwrap();
        assert!(lim.verdict.pass);
        assert!((lim.verdict.b0 + 0.5).abs() < 1e-9);
        for &b in &lim.b_series {
            assert!((b + 0.5).abs() < 1e-9);
        }

        // Sign-flipped family.
        let tau = Grid2::from_fn(&r, &th, |_, t| PI - t);
        let lim = monopole_limit(&r, &th, &tau, 1.0, 1e-3).unwrap();
        assert!((lim.verdict.b0 - 0.5).abs() < 1e-9);
        assert!(lim.verdict.pass);

        // Perturbed family settling as r -> 0.
        let tau = Grid2::from_fn(&r, &th, |rr, t| t + 0.3 * rr * t.sin());
        let lim = monopole_limit(&r, &th, &tau, 1.0, 1e-3).unwrap();
        assert!(lim.verdict.pass, "b0 = {}", lim.verdict.b0);
        assert!((lim.verdict.b0 + 0.5).abs() < 1e-3);

        // Oscillating series never settles: cos(tau) = c(r) cos(theta) with
        // a wobbling amplitude keeps the pole rows smooth while b(r) rings.
        let tau = Grid2::from_fn(&r, &th, |rr, t| {
            let c = 1.0 - 0.2 * (1.0 + (6.0 * rr.ln()).sin());
            (c * t.cos()).acos()
        });
        assert!(matches!(
            monopole_limit(&r, &th, &tau, 1.0, 1e-3),
            Err(AxisymError::NonCauchy { .. })
        ));
    }

    #[test]
    fn boundedness_sups() {
        let r = radii(0.5, 2.0, 50);
        let th = gauss_theta(40);

        // tau = theta, R = R(r): every term in P vanishes.
        let grid = StaticFieldGrid::from_profiles(
            r.clone(),
            th.clone(),
            unit(),
            |rr, _| 1.0 / (rr * rr),
            |_, t| t,
            |_, _| PI,
        )
        .unwrap();
        let pb = boundedness_check_p(&grid, (0.5, 2.0)).unwrap();
        assert!(pb.sup_p < 1e-9);
        assert!(pb.sup_hypothesis < 1e-9);

        // Angular factor in R: hypothesis sup tracks |g'/g| of the factor.
        let th_fine = gauss_theta(160);
        let grid = StaticFieldGrid::from_profiles(
            r.clone(),
            th_fine.clone(),
            unit(),
            |rr, t| (2.0 + t.cos()) / (rr * rr),
            |_, t| t,
            |_, _| PI,
        )
        .unwrap();
        let pb = boundedness_check_p(&grid, (0.5, 2.0)).unwrap();
        let expect = th_fine
            .iter()
            .map(|&t| (t.sin() / (2.0 + t.cos())).abs())
            .fold(0.0, f64::max);
        assert!(
            (pb.sup_hypothesis - expect).abs() < 1e-3,
            "{} vs {expect}",
            pb.sup_hypothesis
        );
        assert!((pb.sup_p - expect).abs() < 1e-3);

        // R ~ 1/cos(theta): the hypothesis sup diverges under refinement.
        let sup_at = |n: usize| {
            let th = gauss_theta(n);
            let grid = StaticFieldGrid::from_profiles(
                r.clone(),
                th,
                unit(),
                |_, t| 1.0 / t.cos().abs().max(1e-12),
                |_, t| t,
                |_, _| PI,
            )
            .unwrap();
            boundedness_check_p(&grid, (0.5, 2.0))
                .unwrap()
                .sup_hypothesis
        };
        assert!(sup_at(160) > 2.0 * sup_at(40));
    }

    #[test]
    fn stationarity_samples() {
        let phis: Vec<f64> = (0..50).map(|i| i as f64 * 0.13).collect();
        let aligned: Vec<(f64, f64)> = phis.iter().map(|&p| (p, p)).collect();
        assert!(stationarity_check_axisym(&aligned, 1e-9));
        let shifted: Vec<(f64, f64)> = phis.iter().map(|&p| (p, p + PI)).collect();
        assert!(stationarity_check_axisym(&shifted, 1e-9));
        let doubled: Vec<(f64, f64)> = phis.iter().map(|&p| (p, 2.0 * p)).collect();
        assert!(!stationarity_check_axisym(&doubled, 1e-9));
    }

    #[test]
    fn ledger_cases() {
        let rep = monopole_ledger(&MonopoleLedger::new(vec![1, -1], 1), 1.0);
        assert!(rep.feasible);
        assert_eq!(rep.b_total, 0.0);
        assert_eq!(rep.parity, Parity::EvenForcesZero);

        let rep = monopole_ledger(&MonopoleLedger::new(vec![1, 1, -1], 1), 1.0);
        assert!(rep.feasible);
        assert!((rep.b_total + 0.5).abs() < 1e-15);
        assert_eq!(rep.parity, Parity::OddForcesUnit);

        let rep = monopole_ledger(&MonopoleLedger::new(vec![1, 1], 1), 1.0);
        assert!(!rep.feasible);
    }

    #[test]
    fn ledger_exhaustive() {
        for n in 1..=12usize {
            for mask in 0u32..(1 << n) {
                let signs: Vec<i8> = (0..n)
                    .map(|k| if mask >> k & 1 == 1 { 1 } else { -1 })
                    .collect();
                let sum: i64 = signs.iter().map(|&s| s as i64).sum();
                let rep = monopole_ledger(&MonopoleLedger::new(signs, 1), 1.0);
                assert_eq!(rep.feasible, sum.abs() <= 1);
                if rep.feasible {
                    assert!(
                        rep.b_total == 0.0 || rep.b_total.abs() == 0.5,
                        "b_total {}",
                        rep.b_total
                    );
                }
            }
        }
    }

    #[test]
    fn gauge_residual_and_injection() {
        let grid = AxiPotentialGrid::from_fn(
            radii(0.5, 5.0, 30),
            gauss_theta(24),
            unit(),
            |r, _| 1.0 / r,
            |r, t| (t.cos() / t.sin()) / (2.0 * r),
        )
        .unwrap();
        assert_eq!(lorenz_gauge_residual(&grid, None), 0.0);

        // a_r = 1/r^2 is divergence-free, so choose r^2 a_r quadratic in r:
        // the stencil is then exact and the residual is 2/r, largest at the
        // inner edge.
        let injected = Grid2::from_fn(&grid.r_nodes, &grid.theta_nodes, |_, _| 1.0);
        let res = lorenz_gauge_residual(&grid, Some(&injected));
        let expect = 2.0 / grid.r_nodes[0];
        assert!((res - expect).abs() < 1e-10, "residual {res}");
    }

    #[test]
    fn phase_residual_refines_away() {
        let worst = |n: usize| {
            let r = radii(1.0, 2.0, n);
            let th = gauss_theta(n);
            let chi = Grid2::from_fn(&r, &th, |rr, t| 1.5 * rr.ln() + 0.2 * (rr.ln()).sin() * t.cos());
            log_phase_residual(&chi, &r, &th, 1.5)
                .values()
                .iter()
                .fold(0.0f64, |m, &v| m.max(v.abs()))
        };
        let (e1, e2) = (worst(40), worst(80));
        let slope = (e1 / e2).log2();
        assert!(slope > 1.5, "refinement slope {slope} (e1={e1}, e2={e2})");
    }

    #[test]
    fn assembled_potentials_match_closed_form() {
        // tau = theta, radial R: the assembly must reproduce the monopole
        // A_phi and be insensitive to constant rescaling of R.
        let r = radii(0.5, 2.0, 60);
        let th = gauss_theta(48);
        let make = |scale: f64| {
            let grid = StaticFieldGrid::from_profiles(
                r.clone(),
                th.clone(),
                unit(),
                move |rr, _| scale / (rr * rr),
                |_, t| t,
                |_, _| PI,
            )
            .unwrap();
            vector_potential_axisym(&grid).unwrap()
        };
        let pot = make(1.0);
        for (i, &ri) in r.iter().enumerate() {
            for (j, &tj) in th.iter().enumerate() {
                let expect = (tj.cos() / tj.sin()) / (2.0 * ri);
                assert!(
                    (pot.aphi[(i, j)] - expect).abs() < 1e-8,
                    "A_phi({ri},{tj})"
                );
            }
        }
        let scaled = make(3.7);
        for (a, b) in pot.aphi.values().iter().zip(scaled.aphi.values()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn report_rendering_is_stable() {
        let rep = ChargeReport {
            electric: vec![(1.0, -1.0)],
            magnetic: vec![(1.0, -0.5)],
            coulomb: Some(CoulombFit {
                q: 1.0,
                h_sup: 0.0,
                rms: 0.0,
            }),
            verdict: Some(QuantizationVerdict {
                b0: -0.5,
                target: -0.5,
                distance: 0.0,
                pass: true,
            }),
            ledger_total: None,
        };
        let text = rep.render();
        let keys: Vec<&str> = text
            .lines()
            .map(|l| l.split('=').next().unwrap())
            .collect();
        assert_eq!(
            keys,
            [
                "electric_Q",
                "magnetic_b",
                "coulomb_q",
                "quantization_verdict",
                "ledger_total"
            ]
        );
        assert!(text.ends_with("ledger_total=n/a\n"));
    }
}
