//! Zero-mean single- and two-mode Gaussian states.
//!
//! Quadratures follow `X_phi = (a^dag e^{i phi} + a e^{-i phi}) / 2` with
//! `q = sqrt(2) X_0` and `p = sqrt(2) X_{pi/2}`, so the vacuum covariance
//! matrix is `I/2` and every vacuum homodyne marginal has variance `1/4`.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, Matrix2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on symplectic eigenvalues when deciding physicality.
pub const PHYSICAL_TOL: f64 = 1e-10;
/// Squared anisotropy below which the squeezing angle is undefined.
pub const ANGLE_DEGENERACY_TOL: f64 = 1e-12;
/// Tolerance on the structural pattern of a two-mode squeezed thermal matrix.
pub const TMST_FORM_TOL: f64 = 1e-9;

/// Reduces an angle into `[0, period)`.
pub(crate) fn reduce_angle(angle: f64, period: f64) -> f64 {
    let a = angle.rem_euclid(period);
    if a >= period {
        0.0
    } else {
        a
    }
}

/// Wraps an angle difference into `(-period/2, period/2]`.
pub(crate) fn wrap_symmetric(delta: f64, period: f64) -> f64 {
    let half = period / 2.0;
    let mut d = delta.rem_euclid(period);
    if d > half {
        d -= period;
    }
    d
}

fn check_nonneg(name: &'static str, value: f64) -> Result<()> {
    if !(value.is_finite() && value >= 0.0) {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite and non-negative",
        });
    }
    Ok(())
}

fn check_finite(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() {
        return Err(Error::InvalidParameter {
            name,
            value,
            reason: "must be finite",
        });
    }
    Ok(())
}

/// Squeezed thermal state `S(r, phi) rho_th(nbar) S^dag(r, phi)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingleModeParams {
    pub nbar: f64,
    pub r: f64,
    /// Squeezing-axis angle in `[0, pi)`.
    #[serde(default)]
    pub phi: f64,
}

impl SingleModeParams {
    pub fn new(nbar: f64, r: f64, phi: f64) -> Result<Self> {
        check_nonneg("nbar", nbar)?;
        check_nonneg("r", r)?;
        check_finite("phi", phi)?;
        Ok(Self {
            nbar,
            r,
            phi: reduce_angle(phi, PI),
        })
    }

    pub fn vacuum() -> Self {
        Self {
            nbar: 0.0,
            r: 0.0,
            phi: 0.0,
        }
    }

    /// Same state with the squeezing axis rotated to `phi`.
    pub fn with_phi(self, phi: f64) -> Self {
        Self {
            phi: reduce_angle(phi, PI),
            ..self
        }
    }

    /// The `(2 nbar + 1) sinh 2r` combination that fixes the squeezing content.
    pub fn squeezing_weight(&self) -> f64 {
        (2.0 * self.nbar + 1.0) * (2.0 * self.r).sinh()
    }
}

/// Two-mode squeezed thermal state `S12(r, phi) [rho_th(n1) x rho_th(n2)] S12^dag`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwoModeParams {
    pub nbar1: f64,
    pub nbar2: f64,
    pub r: f64,
    /// Two-mode squeezing phase in `[0, 2 pi)`.
    #[serde(default)]
    pub phi: f64,
}

impl TwoModeParams {
    pub fn new(nbar1: f64, nbar2: f64, r: f64, phi: f64) -> Result<Self> {
        check_nonneg("nbar1", nbar1)?;
        check_nonneg("nbar2", nbar2)?;
        check_nonneg("r", r)?;
        check_finite("phi", phi)?;
        Ok(Self {
            nbar1,
            nbar2,
            r,
            phi: reduce_angle(phi, TAU),
        })
    }

    pub fn with_phi(self, phi: f64) -> Self {
        Self {
            phi: reduce_angle(phi, TAU),
            ..self
        }
    }

    /// Entries `(a, b, Re c, Im c)` of the covariance matrix.
    pub fn abc(&self) -> (f64, f64, f64, f64) {
        let (ch, sh) = (self.r.cosh(), self.r.sinh());
        let ch2 = (2.0 * self.r).cosh();
        let a = self.nbar1 * ch * ch + self.nbar2 * sh * sh + 0.5 * ch2;
        let b = self.nbar1 * sh * sh + self.nbar2 * ch * ch + 0.5 * ch2;
        let k = -0.5 * (self.nbar1 + self.nbar2 + 1.0) * (2.0 * self.r).sinh();
        (a, b, k * self.phi.cos(), k * self.phi.sin())
    }
}

/// Real symmetric covariance matrix of one or two modes, ordered `(q1, p1, q2, p2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovMatrix {
    m: DMatrix<f64>,
}

impl CovMatrix {
    /// Wraps a symmetric 2x2 or 4x4 matrix. The stored copy is exactly symmetrized.
    pub fn new(m: DMatrix<f64>) -> Result<Self> {
        let n = m.nrows();
        if m.ncols() != n || !(n == 2 || n == 4) {
            return Err(Error::DimensionMismatch {
                expected: if n <= 2 { 2 } else { 4 },
                got: n.max(m.ncols()),
            });
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "covariance",
                value: f64::NAN,
                reason: "entries must be finite",
            });
        }
        let asym = (&m - m.transpose()).amax();
        let scale = m.amax().max(1.0);
        if asym > 1e-12 * scale {
            return Err(Error::NotSymmetric(asym));
        }
        let m = (&m + m.transpose()) * 0.5;
        Ok(Self { m })
    }

    pub fn from_row_slice(dim: usize, entries: &[f64]) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    pub fn single(g11: f64, g22: f64, g12: f64) -> Self {
        Self {
            m: DMatrix::from_row_slice(2, 2, &[g11, g12, g12, g22]),
        }
    }

    /// `n` uncorrelated vacua.
    pub fn vacuum(modes: usize) -> Self {
        Self {
            m: DMatrix::identity(2 * modes, 2 * modes) * 0.5,
        }
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    pub fn modes(&self) -> usize {
        self.dim() / 2
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.m[(i, j)]
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn determinant(&self) -> f64 {
        self.m.determinant()
    }

    /// 2x2 block of mode `k` (zero-based).
    pub fn local_block(&self, k: usize) -> Matrix2<f64> {
        let o = 2 * k;
        Matrix2::new(
            self.m[(o, o)],
            self.m[(o, o + 1)],
            self.m[(o + 1, o)],
            self.m[(o + 1, o + 1)],
        )
    }

    /// Variance of `X_phi` on mode `k`: `u^T Gamma u / 2` with `u = (cos phi, sin phi)`.
    pub fn quadrature_variance(&self, k: usize, phi: f64) -> f64 {
        let (s, c) = phi.sin_cos();
        let o = 2 * k;
        0.5 * (self.m[(o, o)] * c * c
            + self.m[(o + 1, o + 1)] * s * s
            + 2.0 * self.m[(o, o + 1)] * s * c)
    }

    /// Covariance `<X_{1,phi1} X_{2,phi2}>` between the quadratures of modes 0 and 1.
    pub fn quadrature_covariance(&self, phi1: f64, phi2: f64) -> f64 {
        let (s1, c1) = phi1.sin_cos();
        let (s2, c2) = phi2.sin_cos();
        0.5 * (self.m[(0, 2)] * c1 * c2
            + self.m[(0, 3)] * c1 * s2
            + self.m[(1, 2)] * s1 * c2
            + self.m[(1, 3)] * s1 * s2)
    }

    /// Direct sum of two single-mode matrices.
    pub fn direct_sum(a: &CovMatrix, b: &CovMatrix) -> Result<Self> {
        if a.dim() != 2 || b.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: a.dim().max(b.dim()),
            });
        }
        let mut m = DMatrix::zeros(4, 4);
        m.view_mut((0, 0), (2, 2)).copy_from(&a.m);
        m.view_mut((2, 2), (2, 2)).copy_from(&b.m);
        Ok(Self { m })
    }

    pub(crate) fn from_matrix_unchecked(m: DMatrix<f64>) -> Self {
        Self { m }
    }
}

/// Block-diagonal symplectic form with `[[0, 1], [-1, 0]]` blocks.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    j: DMatrix<f64>,
}

impl SymplecticForm {
    pub fn new(modes: usize) -> Self {
        let n = 2 * modes;
        let mut j = DMatrix::zeros(n, n);
        for k in 0..modes {
            j[(2 * k, 2 * k + 1)] = 1.0;
            j[(2 * k + 1, 2 * k)] = -1.0;
        }
        Self { j }
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.j
    }
}

/// Symplectic eigenvalues in ascending order, one per mode.
///
/// Computed as the moduli of the eigenvalues of `J Gamma`, which come in
/// `+-i nu` pairs for a positive-definite `Gamma`.
pub fn symplectic_spectrum(g: &CovMatrix) -> Vec<f64> {
    let j = SymplecticForm::new(g.modes());
    let jg = j.matrix() * g.matrix();
    let mut moduli: Vec<f64> = jg.complex_eigenvalues().iter().map(|z| z.norm()).collect();
    moduli.sort_by(f64::total_cmp);
    moduli.iter().step_by(2).copied().collect()
}

/// Outcome of a physicality check.
#[derive(Debug, Clone, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub spectrum: Vec<f64>,
}

/// Robertson–Schrödinger check: positive definite with every symplectic eigenvalue `>= 1/2`.
pub fn is_physical(g: &CovMatrix) -> Physicality {
    let spectrum = symplectic_spectrum(g);
    let positive = g.matrix().clone().cholesky().is_some();
    let physical = positive && spectrum.iter().all(|&nu| nu >= 0.5 - PHYSICAL_TOL);
    Physicality { physical, spectrum }
}

/// Covariance matrix of a squeezed thermal state.
pub fn cov_from_params1(p: &SingleModeParams) -> CovMatrix {
    let s = p.nbar + 0.5;
    let (ch, sh) = ((2.0 * p.r).cosh(), (2.0 * p.r).sinh());
    let (sin2, cos2) = (2.0 * p.phi).sin_cos();
    CovMatrix::single(s * (ch - sh * cos2), s * (ch + sh * cos2), -s * sh * sin2)
}

/// Parameters recovered from a covariance matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Inversion<P> {
    pub params: P,
    /// The state is isotropic (no squeezing axis), and the angle was set to 0.
    pub degenerate_angle: bool,
}

/// Inverts [`cov_from_params1`].
///
/// The angle uses `2 phi = atan2(-2 G12, G22 - G11)`, which coincides with
/// the two-branch arcsine rule on `G11 <= G22` / `G11 > G22` but keeps full
/// precision near `2 phi = +-pi/2`.
pub fn params_from_cov1(g: &CovMatrix) -> Result<Inversion<SingleModeParams>> {
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.dim(),
        });
    }
    let (g11, g22, g12) = (g.get(0, 0), g.get(1, 1), g.get(0, 1));
    let det = g11 * g22 - g12 * g12;
    if !(det >= 0.25 - PHYSICAL_TOL) || g11 <= 0.0 {
        return Err(Error::NonPhysical {
            min_symplectic: det.max(0.0).sqrt(),
        });
    }
    let gamma = (g22 - g11).powi(2) + 4.0 * g12 * g12;
    let nbar = (det.sqrt() - 0.5).max(0.0);
    let r = 0.5 * (0.5 * (gamma / det).sqrt()).asinh();
    let degenerate = gamma < ANGLE_DEGENERACY_TOL;
    let phi = if degenerate {
        0.0
    } else {
        reduce_angle(0.5 * (-2.0 * g12).atan2(g22 - g11), PI)
    };
    Ok(Inversion {
        params: SingleModeParams { nbar, r, phi },
        degenerate_angle: degenerate,
    })
}

/// Covariance matrix of a two-mode squeezed thermal state.
pub fn cov_from_params2(p: &TwoModeParams) -> CovMatrix {
    let (a, b, cr, ci) = p.abc();
    tmst_matrix(a, b, cr, ci)
}

pub(crate) fn tmst_matrix(a: f64, b: f64, cr: f64, ci: f64) -> CovMatrix {
    #[rustfmt::skip]
    let m = DMatrix::from_row_slice(4, 4, &[
        a,   0.0, cr,  ci,
        0.0, a,   ci,  -cr,
        cr,  ci,  b,   0.0,
        ci,  -cr, 0.0, b,
    ]);
    CovMatrix::from_matrix_unchecked(m)
}

/// Distance of a 4x4 matrix from the two-mode squeezed thermal pattern.
pub fn tmst_residual(g: &CovMatrix) -> f64 {
    let m = g.matrix();
    [
        m[(0, 0)] - m[(1, 1)],
        m[(2, 2)] - m[(3, 3)],
        m[(0, 1)],
        m[(2, 3)],
        m[(0, 2)] + m[(1, 3)],
        m[(0, 3)] - m[(1, 2)],
    ]
    .iter()
    .fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Inverts [`cov_from_params2`].
///
/// The phase is `arg(-c)`, consistent with `c = -(n1 + n2 + 1) e^{i phi} sinh(2r) / 2`.
pub fn params_from_cov2(g: &CovMatrix) -> Result<Inversion<TwoModeParams>> {
    if g.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: g.dim(),
        });
    }
    let residual = tmst_residual(g);
    if residual > TMST_FORM_TOL * g.matrix().amax().max(1.0) {
        return Err(Error::NotTmstForm { residual });
    }
    let m = g.matrix();
    let a = 0.5 * (m[(0, 0)] + m[(1, 1)]);
    let b = 0.5 * (m[(2, 2)] + m[(3, 3)]);
    let cr = 0.5 * (m[(0, 2)] - m[(1, 3)]);
    let ci = 0.5 * (m[(0, 3)] + m[(1, 2)]);
    let c_abs = cr.hypot(ci);
    let gp = (a + b).powi(2) - 4.0 * c_abs * c_abs;
    if gp <= 0.0 {
        return Err(Error::NonPhysical {
            min_symplectic: 0.0,
        });
    }
    let sg = gp.sqrt();
    let n1 = 0.5 * ((a - b) - 1.0 + sg);
    let n2 = 0.5 * (-(a - b) - 1.0 + sg);
    if n1 < -PHYSICAL_TOL || n2 < -PHYSICAL_TOL {
        return Err(Error::NonPhysical {
            min_symplectic: 0.5 + n1.min(n2),
        });
    }
    let r = 0.5 * (2.0 * c_abs / sg).asinh();
    let degenerate = c_abs < ANGLE_DEGENERACY_TOL;
    let phi = if degenerate {
        0.0
    } else {
        reduce_angle((-ci).atan2(-cr), TAU)
    };
    Ok(Inversion {
        params: TwoModeParams {
            nbar1: n1.max(0.0),
            nbar2: n2.max(0.0),
            r,
            phi,
        },
        degenerate_angle: degenerate,
    })
}

/// Zero-mean homodyne marginal of a single quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianMarginal {
    pub mean: f64,
    pub variance: f64,
}

impl GaussianMarginal {
    pub fn new(mean: f64, variance: f64) -> Result<Self> {
        check_finite("mean", mean)?;
        if !(variance.is_finite() && variance > 0.0) {
            return Err(Error::InvalidParameter {
                name: "variance",
                value: variance,
                reason: "must be positive",
            });
        }
        Ok(Self { mean, variance })
    }

    pub fn centered(variance: f64) -> Result<Self> {
        Self::new(0.0, variance)
    }

    pub fn pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        (-d * d / (2.0 * self.variance)).exp() / (2.0 * PI * self.variance).sqrt()
    }

    pub fn ln_pdf(&self, x: f64) -> f64 {
        let d = x - self.mean;
        -0.5 * (2.0 * PI * self.variance).ln() - d * d / (2.0 * self.variance)
    }
}

/// Homodyne marginal of `X_phi_lo` for a squeezed thermal state:
/// `2 Delta^2 = (nbar + 1/2) [cosh 2r - sinh 2r cos(2 phi_lo - 2 phi)]`.
pub fn homodyne_marginal1(p: &SingleModeParams, phi_lo: f64) -> GaussianMarginal {
    let two_var = (p.nbar + 0.5)
        * ((2.0 * p.r).cosh() - (2.0 * p.r).sinh() * (2.0 * phi_lo - 2.0 * p.phi).cos());
    GaussianMarginal {
        mean: 0.0,
        variance: 0.5 * two_var,
    }
}

/// Zero-mean joint distribution of `(X_{1,phi1}, X_{2,phi2})`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BivariateMarginal {
    pub var1: f64,
    pub var2: f64,
    pub cov12: f64,
}

impl BivariateMarginal {
    pub fn new(var1: f64, var2: f64, cov12: f64) -> Result<Self> {
        let b = Self { var1, var2, cov12 };
        if !(var1 > 0.0 && var2 > 0.0 && b.determinant() > 0.0) {
            return Err(Error::InvalidParameter {
                name: "bivariate covariance",
                value: b.determinant(),
                reason: "must be positive definite",
            });
        }
        Ok(b)
    }

    pub fn determinant(&self) -> f64 {
        self.var1 * self.var2 - self.cov12 * self.cov12
    }

    pub fn correlation(&self) -> f64 {
        self.cov12 / (self.var1 * self.var2).sqrt()
    }

    pub fn marginal1(&self) -> GaussianMarginal {
        GaussianMarginal {
            mean: 0.0,
            variance: self.var1,
        }
    }

    pub fn marginal2(&self) -> GaussianMarginal {
        GaussianMarginal {
            mean: 0.0,
            variance: self.var2,
        }
    }

    pub fn pdf(&self, x1: f64, x2: f64) -> f64 {
        let det = self.determinant();
        let q = (self.var2 * x1 * x1 - 2.0 * self.cov12 * x1 * x2 + self.var1 * x2 * x2) / det;
        (-0.5 * q).exp() / (2.0 * PI * det.sqrt())
    }
}

/// Joint homodyne distribution of a two-mode squeezed thermal state, obtained by
/// projecting its covariance matrix onto the `(phi1, phi2)` quadrature pair.
pub fn homodyne_joint2(p: &TwoModeParams, phi1: f64, phi2: f64) -> BivariateMarginal {
    joint_from_cov(&cov_from_params2(p), phi1, phi2)
}

pub fn joint_from_cov(g: &CovMatrix, phi1: f64, phi2: f64) -> BivariateMarginal {
    BivariateMarginal {
        var1: g.quadrature_variance(0, phi1),
        var2: g.quadrature_variance(1, phi2),
        cov12: g.quadrature_covariance(phi1, phi2),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn single_mode_covariance_examples() {
        let vac = cov_from_params1(&SingleModeParams::vacuum());
        assert_eq!(vac, CovMatrix::single(0.5, 0.5, 0.0));

        let th = cov_from_params1(&SingleModeParams::new(1.0, 0.0, 0.0).unwrap());
        assert!(close(th.get(0, 0), 1.5, 1e-15) && close(th.get(1, 1), 1.5, 1e-15));

        let sq = cov_from_params1(&SingleModeParams::new(0.0, 1.0, 0.0).unwrap());
        assert!(close(sq.get(0, 0), 0.5 * (-2.0f64).exp(), 1e-14));
        assert!(close(sq.get(0, 0), 0.067668, 1e-6));
        assert!(close(sq.get(1, 1), 0.5 * 2.0f64.exp(), 1e-13));
        assert!(close(sq.get(0, 1), 0.0, 1e-15));
    }

    #[test]
    fn single_mode_inversion_examples() {
        let inv = params_from_cov1(&CovMatrix::vacuum(1)).unwrap();
        assert!(inv.degenerate_angle);
        assert_eq!(inv.params, SingleModeParams::vacuum());

        let p = SingleModeParams::new(0.0, 1.0, PI / 8.0).unwrap();
        let back = params_from_cov1(&cov_from_params1(&p)).unwrap().params;
        assert!(close(back.nbar, 0.0, 1e-10) && close(back.r, 1.0, 1e-10));
        assert!(close(back.phi, PI / 8.0, 1e-10));

        let g = CovMatrix::single(0.5 * (-2.0f64).exp(), 0.5 * 2.0f64.exp(), 0.0);
        let inv = params_from_cov1(&g).unwrap();
        assert!(!inv.degenerate_angle);
        assert!(close(inv.params.nbar, 0.0, 1e-12));
        assert!(close(inv.params.r, 1.0, 1e-12));
        assert!(close(inv.params.phi, 0.0, 1e-12));
    }

    #[test]
    fn atan2_angle_agrees_with_branch_rule() {
        for &phi in &[0.1, 0.3, 0.7, 1.0, 1.9, 2.5, 3.0] {
            let g = cov_from_params1(&SingleModeParams::new(0.4, 0.8, phi).unwrap());
            let (g11, g22, g12) = (g.get(0, 0), g.get(1, 1), g.get(0, 1));
            let gamma = (g22 - g11).powi(2) + 4.0 * g12 * g12;
            let two_phi = if g11 <= g22 {
                -(2.0 * g12 / gamma.sqrt()).asin()
            } else {
                PI + (2.0 * g12 / gamma.sqrt()).asin()
            };
            let branch = reduce_angle(two_phi / 2.0, PI);
            let ours = params_from_cov1(&g).unwrap().params.phi;
            assert!(close(branch, ours, 1e-7), "phi={phi}: {branch} vs {ours}");
        }
    }

    #[test]
    fn non_physical_single_mode_rejected() {
        let g = CovMatrix::single(0.25, 0.25, 0.0);
        assert!(matches!(
            params_from_cov1(&g),
            Err(Error::NonPhysical { .. })
        ));
        assert!(!is_physical(&g).physical);
    }

    #[test]
    fn two_mode_covariance_examples() {
        let vac = cov_from_params2(&TwoModeParams::new(0.0, 0.0, 0.0, 0.0).unwrap());
        assert_eq!(vac.matrix(), CovMatrix::vacuum(2).matrix());

        let r: f64 = 0.8;
        let (a, b, cr, ci) = TwoModeParams::new(0.0, 0.0, r, 0.0).unwrap().abc();
        assert!(close(a, 0.5 * (2.0 * r).cosh(), 1e-14));
        assert!(close(b, a, 1e-15));
        assert!(close(cr, -0.5 * (2.0 * r).sinh(), 1e-14));
        assert!(close(ci, 0.0, 1e-15));

        let (a, b, _, _) = TwoModeParams::new(1.0, 1.0, 1.0, 0.0).unwrap().abc();
        let expect = 1.0f64.cosh().powi(2) + 1.0f64.sinh().powi(2) + 0.5 * 2.0f64.cosh();
        assert!(close(a, expect, 1e-13));
        assert!(close(a, 1.5 * 2.0f64.cosh(), 1e-13));
        assert!(close(b, a, 1e-13));
    }

    #[test]
    fn two_mode_inversion_examples() {
        let inv = params_from_cov2(&CovMatrix::vacuum(2)).unwrap();
        assert!(inv.degenerate_angle);
        assert_eq!(inv.params.phi, 0.0);

        let p = TwoModeParams::new(0.0, 0.0, 1.0, PI / 3.0).unwrap();
        let back = params_from_cov2(&cov_from_params2(&p)).unwrap().params;
        assert!(close(back.r, 1.0, 1e-10) && close(back.phi, PI / 3.0, 1e-10));
        assert!(close(back.nbar1, 0.0, 1e-10) && close(back.nbar2, 0.0, 1e-10));

        // Negative real c is the phi = 0 state under c = -K e^{i phi}.
        let g = tmst_matrix(
            0.5 * 2.0f64.cosh(),
            0.5 * 2.0f64.cosh(),
            -0.5 * 2.0f64.sinh(),
            0.0,
        );
        let back = params_from_cov2(&g).unwrap().params;
        assert!(close(back.r, 1.0, 1e-12) && close(back.phi, 0.0, 1e-12));
        // Positive real c is phi = pi.
        let g = tmst_matrix(
            0.5 * 2.0f64.cosh(),
            0.5 * 2.0f64.cosh(),
            0.5 * 2.0f64.sinh(),
            0.0,
        );
        assert!(close(params_from_cov2(&g).unwrap().params.phi, PI, 1e-12));
    }

    #[test]
    fn non_tmst_matrix_rejected() {
        let mut m = CovMatrix::vacuum(2).matrix().clone();
        m[(0, 0)] = 0.7;
        let g = CovMatrix::new(m).unwrap();
        assert!(matches!(
            params_from_cov2(&g),
            Err(Error::NotTmstForm { .. })
        ));
    }

    #[test]
    fn marginal_examples() {
        let vac = SingleModeParams::vacuum();
        for &phi in &[0.0, 0.4, 1.3, 2.9] {
            assert!(close(homodyne_marginal1(&vac, phi).variance, 0.25, 1e-15));
        }
        let sq = SingleModeParams::new(0.0, 1.0, 0.0).unwrap();
        assert!(close(
            homodyne_marginal1(&sq, 0.0).variance,
            0.25 * (-2.0f64).exp(),
            1e-15
        ));
        assert!(close(
            homodyne_marginal1(&sq, PI / 4.0).variance,
            0.25 * 2.0f64.cosh(),
            1e-14
        ));
    }

    #[test]
    fn marginal_matches_projection() {
        let p = SingleModeParams::new(0.7, 0.9, 1.1).unwrap();
        let g = cov_from_params1(&p);
        for k in 0..20 {
            let phi = k as f64 * 0.3;
            assert!(close(
                homodyne_marginal1(&p, phi).variance,
                g.quadrature_variance(0, phi),
                1e-13
            ));
        }
    }

    #[test]
    fn joint_marginal_examples() {
        let vac = homodyne_joint2(&TwoModeParams::new(0.0, 0.0, 0.0, 0.0).unwrap(), 0.3, 1.2);
        assert!(close(vac.var1, 0.25, 1e-15) && close(vac.var2, 0.25, 1e-15));
        assert!(close(vac.cov12, 0.0, 1e-15));

        let r: f64 = 0.6;
        let j = homodyne_joint2(&TwoModeParams::new(0.0, 0.0, r, 0.0).unwrap(), 0.0, 0.0);
        assert!(close(j.correlation(), -(2.0 * r).tanh(), 1e-14));

        let p = TwoModeParams::new(0.3, 1.2, 0.7, 2.0).unwrap();
        let g = cov_from_params2(&p);
        let j = homodyne_joint2(&p, 0.4, 1.7);
        let (a, b, cr, ci) = p.abc();
        assert!(close(j.var1, a / 2.0, 1e-14) && close(j.var2, b / 2.0, 1e-14));
        assert!(close(j.var1, g.quadrature_variance(0, 0.4), 1e-14));
        // <X1 X2> = -|c| cos(phi1 + phi2 - phi) / 2
        let c_abs = cr.hypot(ci);
        assert!(close(
            j.cov12,
            -0.5 * c_abs * (0.4 + 1.7 - 2.0f64).cos(),
            1e-14
        ));
    }

    #[test]
    fn physicality_examples() {
        let vac = is_physical(&CovMatrix::vacuum(1));
        assert!(vac.physical);
        assert!(close(vac.spectrum[0], 0.5, 1e-14));

        assert!(!is_physical(&CovMatrix::single(0.25, 0.25, 0.0)).physical);
        assert!(!is_physical(&CovMatrix::single(-1.0, -1.0, 0.0)).physical);

        let g = cov_from_params2(&TwoModeParams::new(1.0, 1.0, 2.0, 0.0).unwrap());
        let rep = is_physical(&g);
        assert!(rep.physical);
        assert_eq!(rep.spectrum.len(), 2);
        // symplectic spectrum of a TMST is (n1 + 1/2, n2 + 1/2)
        assert!(close(rep.spectrum[0], 1.5, 1e-10) && close(rep.spectrum[1], 1.5, 1e-10));
    }

    #[test]
    fn asymmetric_matrix_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 0.2, 0.3, 1.0]);
        assert!(matches!(CovMatrix::new(m), Err(Error::NotSymmetric(_))));
        let m = DMatrix::from_row_slice(3, 3, &[1.0; 9]);
        assert!(CovMatrix::new(m).is_err());
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(SingleModeParams::new(-0.1, 0.0, 0.0).is_err());
        assert!(SingleModeParams::new(0.0, f64::NAN, 0.0).is_err());
        assert!(TwoModeParams::new(0.0, 0.0, -1.0, 0.0).is_err());
        let p = SingleModeParams::new(0.0, 1.0, PI + 0.25).unwrap();
        assert!(close(p.phi, 0.25, 1e-15));
    }
}
