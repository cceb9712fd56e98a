//! Merton-Garman machinery: the two-factor f function over (price, variance)
//! and the Hamiltonian operator on a log-coordinate grid.

use alloc::boxed::Box;
use alloc::vec::Vec;

#[derive(Debug, Clone, PartialEq)]
pub enum MghError {
    /// Price or variance outside the positive domain.
    Domain { k_price: f64, v_var: f64 },
    /// Operator grid smaller than 3×3.
    GridTooSmall { na: usize, nb: usize },
    /// Grid value buffer does not match the declared shape.
    ShapeMismatch,
}

impl core::fmt::Display for MghError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            MghError::Domain { k_price, v_var } => {
                write!(f, "K and V must be positive (K = {k_price}, V = {v_var})")
            }
            MghError::GridTooSmall { na, nb } => {
                write!(f, "grid must be at least 3x3, got {na}x{nb}")
            }
            MghError::ShapeMismatch => write!(f, "grid values do not match declared shape"),
        }
    }
}

impl core::error::Error for MghError {}

/// Constant coefficients of the two-factor dynamics.
#[derive(Debug, Clone, Copy)]
pub struct MgParams {
    /// Expected return of the security.
    pub mu1: f64,
    /// Expected growth rate of the variance.
    pub mu2: f64,
    pub sigma1: f64,
    pub sigma2: f64,
    /// Correlation of the two drivers; enters the mixed term as K·ρ·σ₁³.
    pub rho: f64,
}

type Map3 = Box<dyn Fn(f64, f64, f64) -> f64 + Sync>;

/// Bivariate integrating factor g(s, K, V) with partials.
pub enum G2Derivatives {
    Analytic {
        d_s: Map3,
        d_k: Map3,
        d_v: Map3,
        d_kk: Map3,
        d_kv: Map3,
        d_vv: Map3,
    },
    FiniteDifference,
}

pub struct G2Function {
    pub value: Map3,
    pub mode: G2Derivatives,
}

impl G2Function {
    #[allow(clippy::too_many_arguments)]
    pub fn analytic(
        value: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        d_s: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        d_k: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        d_v: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        d_kk: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        d_kv: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
        d_vv: impl Fn(f64, f64, f64) -> f64 + Sync + 'static,
    ) -> Self {
        G2Function {
            value: Box::new(value),
            mode: G2Derivatives::Analytic {
                d_s: Box::new(d_s),
                d_k: Box::new(d_k),
                d_v: Box::new(d_v),
                d_kk: Box::new(d_kk),
                d_kv: Box::new(d_kv),
                d_vv: Box::new(d_vv),
            },
        }
    }

    pub fn finite_difference(value: impl Fn(f64, f64, f64) -> f64 + Sync + 'static) -> Self {
        G2Function {
            value: Box::new(value),
            mode: G2Derivatives::FiniteDifference,
        }
    }

    pub fn zero() -> Self {
        G2Function::analytic(
            |_, _, _| 0.0,
            |_, _, _| 0.0,
            |_, _, _| 0.0,
            |_, _, _| 0.0,
            |_, _, _| 0.0,
            |_, _, _| 0.0,
            |_, _, _| 0.0,
        )
    }

    fn step(v: f64) -> f64 {
        1e-5 * if crate::math::abs(v) > 1.0 {
            crate::math::abs(v)
        } else {
            1.0
        }
    }

    fn partials(&self, s: f64, k: f64, v: f64) -> [f64; 6] {
        match &self.mode {
            G2Derivatives::Analytic {
                d_s,
                d_k,
                d_v,
                d_kk,
                d_kv,
                d_vv,
            } => [
                d_s(s, k, v),
                d_k(s, k, v),
                d_v(s, k, v),
                d_kk(s, k, v),
                d_kv(s, k, v),
                d_vv(s, k, v),
            ],
            G2Derivatives::FiniteDifference => {
                let g = &self.value;
                let hs = Self::step(s);
                let hk = Self::step(k);
                let hv = Self::step(v);
                let g0 = g(s, k, v);
                [
                    (g(s + hs, k, v) - g(s - hs, k, v)) / (2.0 * hs),
                    (g(s, k + hk, v) - g(s, k - hk, v)) / (2.0 * hk),
                    (g(s, k, v + hv) - g(s, k, v - hv)) / (2.0 * hv),
                    (g(s, k + hk, v) - 2.0 * g0 + g(s, k - hk, v)) / (hk * hk),
                    (g(s, k + hk, v + hv) - g(s, k + hk, v - hv) - g(s, k - hk, v + hv)
                        + g(s, k - hk, v - hv))
                        / (4.0 * hk * hv),
                    (g(s, k, v + hv) - 2.0 * g0 + g(s, k, v - hv)) / (hv * hv),
                ]
            }
        }
    }
}

/// f(s, K, V, u) = π + g + g_s + Kμ₁g_K + Vμ₂g_V + ½K²σ₁²g_KK
///                 + Kρσ₁³g_KV + ½V²σ₂²g_VV.
pub fn mgh_f(
    s: f64,
    k_price: f64,
    v_var: f64,
    u: f64,
    profit: &dyn Fn(f64, f64, f64, f64) -> f64,
    params: &MgParams,
    g2: &G2Function,
) -> Result<f64, MghError> {
    if !(k_price > 0.0 && v_var > 0.0) {
        return Err(MghError::Domain { k_price, v_var });
    }
    let [g_s, g_k, g_v, g_kk, g_kv, g_vv] = g2.partials(s, k_price, v_var);
    let f = profit(s, k_price, v_var, u)
        + (g2.value)(s, k_price, v_var)
        + g_s
        + k_price * params.mu1 * g_k
        + v_var * params.mu2 * g_v
        + 0.5 * k_price * k_price * params.sigma1 * params.sigma1 * g_kk
        + k_price * params.rho * params.sigma1 * params.sigma1 * params.sigma1 * g_kv
        + 0.5 * v_var * v_var * params.sigma2 * params.sigma2 * g_vv;
    if !f.is_finite() {
        return Err(MghError::Domain { k_price, v_var });
    }
    Ok(f)
}

/// Uniform rectangular grid over log-price a and log-variance b.
#[derive(Debug, Clone)]
pub struct Grid2 {
    pub a0: f64,
    pub da: f64,
    pub na: usize,
    pub b0: f64,
    pub db: f64,
    pub nb: usize,
    /// Row-major values: index `ia * nb + ib`.
    pub values: Vec<f64>,
}

impl Grid2 {
    pub fn from_fn(
        a0: f64,
        da: f64,
        na: usize,
        b0: f64,
        db: f64,
        nb: usize,
        f: impl Fn(f64, f64) -> f64,
    ) -> Self {
        let mut values = Vec::with_capacity(na * nb);
        for ia in 0..na {
            for ib in 0..nb {
                values.push(f(a0 + da * ia as f64, b0 + db * ib as f64));
            }
        }
        Grid2 {
            a0,
            da,
            na,
            b0,
            db,
            nb,
            values,
        }
    }

    #[inline]
    pub fn at(&self, ia: usize, ib: usize) -> f64 {
        self.values[ia * self.nb + ib]
    }

    #[inline]
    pub fn a_at(&self, ia: usize) -> f64 {
        self.a0 + self.da * ia as f64
    }

    #[inline]
    pub fn b_at(&self, ib: usize) -> f64 {
        self.b0 + self.db * ib as f64
    }
}

/// Coefficients of the Hamiltonian operator in log coordinates.
#[derive(Debug, Clone, Copy)]
pub struct MgOperator {
    /// Spot interest rate.
    pub r: f64,
    pub mu2: f64,
    /// Market price of volatility risk.
    pub beta: f64,
    pub sigma2: f64,
    /// Correlation of the drivers.
    pub gamma: f64,
    /// Variance exponent in the volatility diffusion.
    pub alpha: f64,
}

impl MgOperator {
    /// Pointwise application to analytic partials; the grid version applies
    /// this to central differences.
    pub fn apply_analytic(
        &self,
        b: f64,
        c: f64,
        c_a: f64,
        c_b: f64,
        c_aa: f64,
        c_ab: f64,
        c_bb: f64,
    ) -> f64 {
        let eb = crate::math::exp(b);
        let drift_b = self.mu2
            - self.beta * crate::math::exp(-b)
            - 0.5 * self.sigma2 * self.sigma2 * crate::math::exp(2.0 * b * (self.alpha - 1.0));
        self.r * c
            - (self.r - 0.5 * eb) * c_a
            - drift_b * c_b
            - 0.5 * eb * c_aa
            - self.gamma * self.sigma2 * crate::math::exp(b * (self.alpha - 0.5)) * c_ab
            - self.sigma2 * self.sigma2 * crate::math::exp(2.0 * b * (self.alpha - 1.0)) * c_bb
    }
}

/// Applies the Hamiltonian to interior nodes by central differences; boundary
/// nodes are copied through unchanged.
pub fn mgh_operator_apply(c: &Grid2, op: &MgOperator) -> Result<Grid2, MghError> {
    if c.na < 3 || c.nb < 3 {
        return Err(MghError::GridTooSmall { na: c.na, nb: c.nb });
    }
    if c.values.len() != c.na * c.nb {
        return Err(MghError::ShapeMismatch);
    }
    let mut out = c.clone();
    let (da, db) = (c.da, c.db);
    for ia in 1..c.na - 1 {
        for ib in 1..c.nb - 1 {
            let b = c.b_at(ib);
            let v = c.at(ia, ib);
            let c_a = (c.at(ia + 1, ib) - c.at(ia - 1, ib)) / (2.0 * da);
            let c_b = (c.at(ia, ib + 1) - c.at(ia, ib - 1)) / (2.0 * db);
            let c_aa = (c.at(ia + 1, ib) - 2.0 * v + c.at(ia - 1, ib)) / (da * da);
            let c_bb = (c.at(ia, ib + 1) - 2.0 * v + c.at(ia, ib - 1)) / (db * db);
            let c_ab = (c.at(ia + 1, ib + 1) - c.at(ia + 1, ib - 1) - c.at(ia - 1, ib + 1)
                + c.at(ia - 1, ib - 1))
                / (4.0 * da * db);
            out.values[ia * c.nb + ib] = op.apply_analytic(b, v, c_a, c_b, c_aa, c_ab, c_bb);
        }
    }
    Ok(out)
}
