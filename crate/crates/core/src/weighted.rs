//! Weighted Lebesgue and Sobolev norms on exterior domains `E_rho`, plus
//! decay-exponent estimation and empirical inequality checks.
//!
//! Norms follow `||f||_{p,delta} = (int |f|^p sigma^{-p delta - n} dx)^{1/p}`
//! with `n = 3`, and `||f||_{k,p,delta} = sum_j ||D^j f||_{p,delta-j}`.
//! Fields are sampled along rays; spherical symmetry makes the angular
//! integration a factor of `4 pi`, and the unbounded tail beyond the
//! truncation radius is estimated from a fitted power law.

use thiserror::Error;

use crate::fd;
use crate::fit;
use crate::quad;

const DIM: f64 = 3.0;

#[derive(Debug, Error)]
pub enum WeightedError {
    #[error("quadrature mesh too sparse: {nodes} nodes over {decades:.2} decades (need >= 4 per decade)")]
    Quadrature { nodes: usize, decades: f64 },
    #[error("samples do not cover the domain [{rho}, {r_max}]")]
    Coverage { rho: f64, r_max: f64 },
    #[error("decay fit is degenerate: field vanishes on the fit window")]
    DegenerateFit,
    #[error("decay fit needs >= {need} samples spanning >= 1.5 decades; got {got} over {decades:.2}")]
    TooFewSamples { need: usize, got: usize, decades: f64 },
    #[error("exponent arithmetic n - k*p = {value} matches neither Sobolev case")]
    Case { value: f64 },
    #[error("multiplication lemma hypotheses violated: {what}")]
    Hypothesis { what: String },
    #[error("operands sampled on different radial meshes")]
    MismatchedSamples,
    #[error("derivative order k = {k} exceeds the supported maximum 3")]
    OrderTooHigh { k: usize },
}

/// Weight function choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SigmaWeight {
    /// `sigma = r` (exterior domains excluding the origin). The default.
    Radius,
    /// `sigma = sqrt(1 + r^2)` (whole-space variant).
    SqrtOnePlusR2,
}

impl SigmaWeight {
    pub fn eval(self, r: f64) -> f64 {
        match self {
            SigmaWeight::Radius => r,
            SigmaWeight::SqrtOnePlusR2 => (1.0 + r * r).sqrt(),
        }
    }
}

/// Exterior domain `E_rho` truncated at `r_max` for quadrature.
#[derive(Debug, Clone, Copy)]
pub struct ExteriorDomain {
    pub rho: f64,
    pub r_max: f64,
}

impl ExteriorDomain {
    pub fn new(rho: f64, r_max: f64) -> Self {
        assert!(rho > 0.0 && rho < r_max, "need 0 < rho < r_max");
        ExteriorDomain { rho, r_max }
    }
}

/// Parameters of a weighted norm evaluation.
#[derive(Debug, Clone, Copy)]
pub struct WeightedNormSpec {
    /// Derivative order (0 for plain Lebesgue norms), at most 3.
    pub k: usize,
    /// Integrability exponent; `f64::INFINITY` selects the weighted sup.
    pub p: f64,
    /// Weight exponent.
    pub delta: f64,
    pub sigma: SigmaWeight,
}

impl WeightedNormSpec {
    pub fn lebesgue(p: f64, delta: f64) -> Self {
        WeightedNormSpec {
            k: 0,
            p,
            delta,
            sigma: SigmaWeight::Radius,
        }
    }

    pub fn sobolev(k: usize, p: f64, delta: f64) -> Self {
        WeightedNormSpec {
            k,
            p,
            delta,
            sigma: SigmaWeight::Radius,
        }
    }
}

/// A scalar field sampled along a ray (radial profile).
#[derive(Debug, Clone)]
pub struct RadialField {
    pub r: Vec<f64>,
    pub values: Vec<f64>,
}

impl RadialField {
    pub fn new(r: Vec<f64>, values: Vec<f64>) -> Self {
        assert_eq!(r.len(), values.len());
        assert!(r.windows(2).all(|w| w[1] > w[0]), "radii must increase");
        RadialField { r, values }
    }

    pub fn from_fn(r: Vec<f64>, f: impl Fn(f64) -> f64) -> Self {
        let values = r.iter().map(|&t| f(t)).collect();
        RadialField::new(r, values)
    }

    /// Geometric sample mesh, convenient for decade-spanning domains.
    pub fn geometric_mesh(lo: f64, hi: f64, n: usize) -> Vec<f64> {
        assert!(n >= 2 && lo > 0.0 && hi > lo);
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        (0..n).map(|i| lo * (ratio * i as f64).exp()).collect()
    }

    fn window(&self, domain: &ExteriorDomain) -> Vec<usize> {
        self.r
            .iter()
            .enumerate()
            .filter(|(_, &r)| r >= domain.rho * (1.0 - 1e-12) && r <= domain.r_max * (1.0 + 1e-12))
            .map(|(i, _)| i)
            .collect()
    }
}

/// Truncated-domain norm plus a principled tail estimate.
#[derive(Debug, Clone, Copy)]
pub struct NormValue {
    /// Norm of the truncated domain `[rho, r_max]`.
    pub truncated: f64,
    /// Estimated contribution beyond `r_max`, from the fitted decay rate.
    /// Infinite when the fitted decay is too slow for the weight.
    pub tail: f64,
    /// Combined value.
    pub total: f64,
}

fn check_mesh(field: &RadialField, domain: &ExteriorDomain) -> Result<Vec<usize>, WeightedError> {
    if field.r.first().is_none_or(|&r| r > domain.rho * (1.0 + 1e-9))
        || field.r.last().is_none_or(|&r| r < domain.r_max * (1.0 - 1e-9))
    {
        return Err(WeightedError::Coverage {
            rho: domain.rho,
            r_max: domain.r_max,
        });
    }
    let idx = field.window(domain);
    let decades = (domain.r_max / domain.rho).log10();
    if (idx.len() as f64) < 4.0 * decades.max(1.0) {
        return Err(WeightedError::Quadrature {
            nodes: idx.len(),
            decades,
        });
    }
    Ok(idx)
}

/// Fitted outer decay rate, or None when the field vanishes out there.
fn outer_decay(r: &[f64], v: &[f64]) -> Option<fit::LineFit> {
    let half = r.len() / 2;
    let mut lx = Vec::new();
    let mut ly = Vec::new();
    for i in half..r.len() {
        if v[i] != 0.0 {
            lx.push(r[i].ln());
            ly.push(v[i].abs().ln());
        }
    }
    if lx.len() < 2 {
        return None;
    }
    Some(fit::line(&lx, &ly))
}

/// Weighted Lebesgue norm `||f||_{p,delta}` of a radial field on `E_rho`.
pub fn weighted_lp_norm(
    field: &RadialField,
    domain: &ExteriorDomain,
    spec: &WeightedNormSpec,
) -> Result<NormValue, WeightedError> {
    let idx = check_mesh(field, domain)?;
    let r: Vec<f64> = idx.iter().map(|&i| field.r[i]).collect();
    let v: Vec<f64> = idx.iter().map(|&i| field.values[i]).collect();
    let decay = outer_decay(&r, &v);

    if spec.p.is_infinite() {
        let truncated = r
            .iter()
            .zip(&v)
            .map(|(&ri, &vi)| spec.sigma.eval(ri).powf(-spec.delta) * vi.abs())
            .fold(0.0, f64::max);
        // The weighted sup beyond r_max is unbounded only when the fitted
        // decay loses to the weight.
        let tail = match decay {
            Some(f) if f.slope - spec.delta > 1e-6 => f64::INFINITY,
            _ => 0.0,
        };
        return Ok(NormValue {
            truncated,
            tail,
            total: truncated + tail,
        });
    }

    let p = spec.p;
    assert!(p >= 1.0, "integrability exponent must be >= 1");
    let integrand: Vec<f64> = r
        .iter()
        .zip(&v)
        .map(|(&ri, &vi)| {
            vi.abs().powf(p) * spec.sigma.eval(ri).powf(-p * spec.delta - DIM) * ri * ri
        })
        .collect();
    let integral = 4.0 * std::f64::consts::PI * quad::trapezoid(&r, &integrand);

    // Tail: |f| ~ C r^s beyond r_max, integrated against sigma ~ r.
    let tail_integral = match decay {
        Some(f) => {
            let s = f.slope;
            let c = (f.intercept + s * domain.r_max.ln()).exp();
            let a = p * s - p * spec.delta - 1.0;
            if a + 1.0 < -1e-9 {
                -4.0 * std::f64::consts::PI * c.powf(p) * domain.r_max.powf(a + 1.0) / (a + 1.0)
            } else {
                f64::INFINITY
            }
        }
        None => 0.0,
    };
    let truncated = integral.powf(1.0 / p);
    let total = (integral + tail_integral).powf(1.0 / p);
    Ok(NormValue {
        truncated,
        tail: total - truncated,
        total,
    })
}

/// Weighted Sobolev norm: `sum_{j<=k} ||D^j f||_{p, delta - j}`, with `D`
/// the radial derivative approximated by second-order stencils.
pub fn weighted_sobolev_norm(
    field: &RadialField,
    domain: &ExteriorDomain,
    spec: &WeightedNormSpec,
) -> Result<NormValue, WeightedError> {
    if spec.k > 3 {
        return Err(WeightedError::OrderTooHigh { k: spec.k });
    }
    let mut current = field.values.clone();
    let mut truncated = 0.0;
    let mut tail = 0.0;
    let mut total = 0.0;
    for j in 0..=spec.k {
        if j > 0 {
            current = fd::derivative(&field.r, &current);
        }
        let term_spec = WeightedNormSpec {
            k: 0,
            p: spec.p,
            delta: spec.delta - j as f64,
            sigma: spec.sigma,
        };
        let term = weighted_lp_norm(
            &RadialField {
                r: field.r.clone(),
                values: current.clone(),
            },
            domain,
            &term_spec,
        )?;
        truncated += term.truncated;
        tail += term.tail;
        total += term.total;
    }
    Ok(NormValue {
        truncated,
        tail,
        total,
    })
}

/// Decay-exponent estimate with a confidence band.
#[derive(Debug, Clone, Copy)]
pub struct DecayFit {
    /// Least-squares slope of `log|f|` against `log r` over the outer half.
    pub exponent: f64,
    pub stderr: f64,
    /// `+- 2` standard errors.
    pub band: f64,
}

/// Fit the decay exponent of a sampled field along a ray.
pub fn decay_exponent_fit(field: &RadialField) -> Result<DecayFit, WeightedError> {
    let n = field.r.len();
    let decades = if n >= 2 {
        (field.r[n - 1] / field.r[0]).log10()
    } else {
        0.0
    };
    if n < 16 || decades < 1.5 {
        return Err(WeightedError::TooFewSamples {
            need: 16,
            got: n,
            decades,
        });
    }
    match outer_decay(&field.r, &field.values) {
        Some(f) => Ok(DecayFit {
            exponent: f.slope,
            stderr: f.slope_stderr,
            band: 2.0 * f.slope_stderr,
        }),
        None => Err(WeightedError::DegenerateFit),
    }
}

/// Worst empirical ratio for one of the two Sobolev inequality cases.
///
/// Case (i), `n - kp > 0`: compares `||f||_{np/(n-kp), delta}` against
/// `||f||_{k,p,delta}`. Case (ii), `n - kp < 0`: compares the weighted sup
/// `||f||_{inf, delta}` against `||f||_{k,p,delta}`.
pub fn sobolev_inequality_check(
    family: &[RadialField],
    domain: &ExteriorDomain,
    spec: &WeightedNormSpec,
) -> Result<f64, WeightedError> {
    let gap = DIM - spec.k as f64 * spec.p;
    if !spec.p.is_finite() || gap.abs() < 1e-12 {
        return Err(WeightedError::Case { value: gap });
    }
    let mut worst: f64 = 0.0;
    for f in family {
        let right = weighted_sobolev_norm(f, domain, spec)?.total;
        if right == 0.0 {
            continue;
        }
        let left_spec = if gap < 0.0 {
            WeightedNormSpec {
                k: 0,
                p: f64::INFINITY,
                delta: spec.delta,
                sigma: spec.sigma,
            }
        } else {
            WeightedNormSpec {
                k: 0,
                p: DIM * spec.p / gap,
                delta: spec.delta,
                sigma: spec.sigma,
            }
        };
        let left = weighted_lp_norm(f, domain, &left_spec)?.total;
        worst = worst.max(left / right);
    }
    Ok(worst)
}

/// Empirical constant for the multiplication bound
/// `||fg||_{k,2,delta} <= C ||f||_{k1,2,delta1} ||g||_{k2,2,delta2}`.
///
/// The hypotheses `k1, k2 >= k`, `k < k1 + k2 - 3/2`, `delta > delta1 +
/// delta2` are enforced up front.
pub fn multiplication_bound_check(
    f: &RadialField,
    g: &RadialField,
    domain: &ExteriorDomain,
    spec_f: (usize, f64),
    spec_g: (usize, f64),
    target: (usize, f64),
) -> Result<f64, WeightedError> {
    let (k1, d1) = spec_f;
    let (k2, d2) = spec_g;
    let (k, d) = target;
    if k1 < k || k2 < k {
        return Err(WeightedError::Hypothesis {
            what: format!("need k1, k2 >= k; got k1={k1}, k2={k2}, k={k}"),
        });
    }
    if (k as f64) >= (k1 + k2) as f64 - DIM / 2.0 {
        return Err(WeightedError::Hypothesis {
            what: format!("need k < k1 + k2 - 3/2; got k={k}, k1={k1}, k2={k2}"),
        });
    }
    if d <= d1 + d2 {
        return Err(WeightedError::Hypothesis {
            what: format!("need delta > delta1 + delta2; got {d} <= {d1} + {d2}"),
        });
    }
    if f.r.len() != g.r.len() || f.r.iter().zip(&g.r).any(|(&a, &b)| (a - b).abs() > 1e-12) {
        return Err(WeightedError::MismatchedSamples);
    }
    let product = RadialField {
        r: f.r.clone(),
        values: f
            .values
            .iter()
            .zip(&g.values)
            .map(|(&a, &b)| a * b)
            .collect(),
    };
    let nf = weighted_sobolev_norm(f, domain, &WeightedNormSpec::sobolev(k1, 2.0, d1))?.total;
    let ng = weighted_sobolev_norm(g, domain, &WeightedNormSpec::sobolev(k2, 2.0, d2))?.total;
    let np = weighted_sobolev_norm(&product, domain, &WeightedNormSpec::sobolev(k, 2.0, d))?.total;
    if nf == 0.0 || ng == 0.0 {
        return Ok(0.0);
    }
    Ok(np / (nf * ng))
}
