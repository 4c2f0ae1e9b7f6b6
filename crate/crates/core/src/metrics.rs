//! Fidelity, nonclassical squeezing and logarithmic negativity.

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::gaussian::{
    is_physical, symplectic_spectrum, CovMatrix, SingleModeParams, SymplecticForm, TwoModeParams,
};

fn require_physical(g: &CovMatrix, dim: usize) -> Result<()> {
    if g.dim() != dim {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: g.dim(),
        });
    }
    let rep = is_physical(g);
    if !rep.physical {
        return Err(Error::NonPhysical {
            min_symplectic: rep.spectrum.first().copied().unwrap_or(f64::NAN),
        });
    }
    Ok(())
}

/// Fidelity between two zero-mean single-mode Gaussian states.
///
/// `F^2 = 1 / (sqrt(D + L) - sqrt(L))` with `D = det(G1 + G2)` and
/// `L = 4 det(G1 + iJ/2) det(G2 + iJ/2)`, where `det(G + iJ/2) = det G - 1/4`.
pub fn fidelity1(g1: &CovMatrix, g2: &CovMatrix) -> Result<f64> {
    require_physical(g1, 2)?;
    require_physical(g2, 2)?;
    let delta = (g1.matrix() + g2.matrix()).determinant();
    let lambda = (4.0 * (g1.determinant() - 0.25) * (g2.determinant() - 0.25)).max(0.0);
    let f2 = 1.0 / ((delta + lambda).sqrt() - lambda.sqrt());
    Ok(f2.sqrt().min(1.0))
}

/// Two-mode fidelity with a flag for a clamped inner radicand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fidelity2 {
    pub value: f64,
    /// The radicand `(sqrt S + sqrt L)^2 - D` came out negative from rounding and was set to 0.
    pub clamped: bool,
}

fn det_plus_half_j(g: &CovMatrix) -> f64 {
    let j = SymplecticForm::new(g.modes());
    let m: DMatrix<Complex<f64>> = DMatrix::from_fn(g.dim(), g.dim(), |r, c| {
        Complex::new(g.get(r, c), 0.5 * j.matrix()[(r, c)])
    });
    m.determinant().re
}

/// Fidelity between two zero-mean two-mode Gaussian states.
///
/// `F^2 = 1 / (sqrt S + sqrt L - sqrt((sqrt S + sqrt L)^2 - D))` with
/// `D = det(G1 + G2)`, `L = 16 det(G1 + iJ/2) det(G2 + iJ/2)` and
/// `S = 16 det[(J G1)(J G2) - I/4]`.
pub fn fidelity2(g1: &CovMatrix, g2: &CovMatrix) -> Result<Fidelity2> {
    require_physical(g1, 4)?;
    require_physical(g2, 4)?;
    let j = SymplecticForm::new(2);
    let delta = (g1.matrix() + g2.matrix()).determinant();
    let lambda = (16.0 * det_plus_half_j(g1) * det_plus_half_j(g2)).max(0.0);
    let prod =
        (j.matrix() * g1.matrix()) * (j.matrix() * g2.matrix()) - DMatrix::identity(4, 4) * 0.25;
    let sigma = (16.0 * prod.determinant()).max(0.0);
    let outer = sigma.sqrt() + lambda.sqrt();
    let radicand = outer * outer - delta;
    let clamped = radicand < 0.0;
    let f2 = 1.0 / (outer - radicand.max(0.0).sqrt());
    Ok(Fidelity2 {
        value: f2.sqrt().min(1.0),
        clamped,
    })
}

/// Threshold squeezing `r_c = ln(2 nbar + 1) / 2` above which a squeezed thermal state is nonclassical.
pub fn critical_squeezing(nbar: f64) -> f64 {
    0.5 * (2.0 * nbar + 1.0).ln()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Nonclassicality {
    /// `max(0, r - r_c)`.
    pub r_nc: f64,
    /// Entanglement potential `r_nc / ln 2`.
    pub p_ent: f64,
}

pub fn nonclassical_squeezing(p: &SingleModeParams) -> Nonclassicality {
    let r_nc = (p.r - critical_squeezing(p.nbar)).max(0.0);
    Nonclassicality {
        r_nc,
        p_ent: r_nc / std::f64::consts::LN_2,
    }
}

/// Smaller and larger symplectic eigenvalues of the partial transpose, from
/// the closed form `2 nu^2 = f -+ sqrt(f^2 - 4 g^2)` with
/// `f = a^2 + b^2 + 2|c|^2`, `g = ab - |c|^2`.
pub fn symplectic_eigs_pt_tmst(p: &TwoModeParams) -> (f64, f64) {
    let (a, b, cr, ci) = p.abc();
    let c2 = cr * cr + ci * ci;
    let f = a * a + b * b + 2.0 * c2;
    let g = a * b - c2;
    let root = (f * f - 4.0 * g * g).max(0.0).sqrt();
    // 2 nu_-^2 = 4 g^2 / (f + root) avoids cancellation for strong squeezing.
    let minus = (2.0 * g * g / (f + root)).sqrt();
    let plus = (0.5 * (f + root)).sqrt();
    (minus, plus)
}

/// Symplectic eigenvalues of the partially transposed matrix (momentum of
/// mode 2 sign-flipped), computed from a general eigen-solve.
pub fn symplectic_eigs_pt(g: &CovMatrix) -> Result<(f64, f64)> {
    if g.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: g.dim(),
        });
    }
    let flip = DMatrix::from_diagonal(&nalgebra::DVector::from_row_slice(&[1.0, 1.0, 1.0, -1.0]));
    let pt = CovMatrix::new(&flip * g.matrix() * &flip)?;
    let spec = symplectic_spectrum(&pt);
    Ok((spec[0], spec[1]))
}

fn log_neg_from(nu_minus: f64) -> f64 {
    (-(2.0 * nu_minus).log2()).max(0.0)
}

/// Logarithmic negativity `max(0, -log2(2 nu_-))` of a two-mode squeezed thermal state.
pub fn log_negativity(p: &TwoModeParams) -> f64 {
    log_neg_from(symplectic_eigs_pt_tmst(p).0)
}

/// Logarithmic negativity of an arbitrary two-mode covariance matrix.
pub fn log_negativity_cov(g: &CovMatrix) -> Result<f64> {
    Ok(log_neg_from(symplectic_eigs_pt(g)?.0))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{LN_2, PI};

    use super::*;
    use crate::gaussian::{cov_from_params1, cov_from_params2};

    #[test]
    fn identical_states_have_unit_fidelity() {
        let v = CovMatrix::vacuum(1);
        assert!((fidelity1(&v, &v).unwrap() - 1.0).abs() < 1e-14);
        let g = cov_from_params1(&SingleModeParams::new(0.7, 0.4, 1.0).unwrap());
        assert!((fidelity1(&g, &g).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vacuum_thermal_fidelity() {
        for nbar in [0.5, 1.0, 3.0] {
            let th = cov_from_params1(&SingleModeParams::new(nbar, 0.0, 0.0).unwrap());
            let f = fidelity1(&CovMatrix::vacuum(1), &th).unwrap();
            assert!((f * f - 1.0 / (nbar + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn fidelity_rejects_unphysical() {
        let bad = CovMatrix::single(0.2, 0.2, 0.0);
        assert!(fidelity1(&bad, &CovMatrix::vacuum(1)).is_err());
        assert!(fidelity1(&CovMatrix::vacuum(2), &CovMatrix::vacuum(1)).is_err());
    }

    #[test]
    fn pure_tmst_self_fidelity() {
        let g = cov_from_params2(&TwoModeParams::new(0.0, 0.0, 1.0, 0.4).unwrap());
        let f = fidelity2(&g, &g).unwrap();
        assert!((f.value - 1.0).abs() < 1e-6, "{f:?}");
    }

    #[test]
    fn product_states_multiply() {
        let a1 = cov_from_params1(&SingleModeParams::new(0.2, 0.5, 0.3).unwrap());
        let b1 = cov_from_params1(&SingleModeParams::new(1.0, 0.1, 2.0).unwrap());
        let a2 = cov_from_params1(&SingleModeParams::new(0.6, 0.7, 1.1).unwrap());
        let b2 = cov_from_params1(&SingleModeParams::new(0.0, 0.9, 0.2).unwrap());
        let g1 = CovMatrix::direct_sum(&a1, &b1).unwrap();
        let g2 = CovMatrix::direct_sum(&a2, &b2).unwrap();
        let prod = fidelity1(&a1, &a2).unwrap() * fidelity1(&b1, &b2).unwrap();
        let f = fidelity2(&g1, &g2).unwrap();
        assert!((f.value - prod).abs() < 1e-8, "{} vs {prod}", f.value);
    }

    #[test]
    fn critical_squeezing_values() {
        assert_eq!(critical_squeezing(0.0), 0.0);
        assert!((critical_squeezing(1.0) - 0.5 * 3f64.ln()).abs() < 1e-15);
        assert!((critical_squeezing(1.0) - 0.5493).abs() < 1e-4);
        assert!(critical_squeezing(2.0) > critical_squeezing(1.0));
    }

    #[test]
    fn nonclassical_squeezing_values() {
        let p = SingleModeParams::new(0.0, 1.0, 0.0).unwrap();
        assert_eq!(nonclassical_squeezing(&p).r_nc, 1.0);
        assert!((nonclassical_squeezing(&p).p_ent - 1.0 / LN_2).abs() < 1e-15);
        let p = SingleModeParams::new(1.0, 0.5, 0.0).unwrap();
        assert_eq!(nonclassical_squeezing(&p).r_nc, 0.0);
        let rc = critical_squeezing(1.0);
        let p = SingleModeParams::new(1.0, rc + 1e-9, 0.0).unwrap();
        assert!((nonclassical_squeezing(&p).r_nc - 1e-9).abs() < 1e-15);
    }

    #[test]
    fn log_negativity_pure_tmst() {
        for r in [0.5, 1.0, 2.0] {
            for k in 0..8 {
                let p = TwoModeParams::new(0.0, 0.0, r, k as f64 * PI / 4.0).unwrap();
                assert!((log_negativity(&p) - 2.0 * r / LN_2).abs() < 1e-9);
                let (nm, _) = symplectic_eigs_pt(&cov_from_params2(&p)).unwrap();
                assert!((nm - 0.5 * (-2.0 * r).exp()).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn separable_and_thermal_cases() {
        assert_eq!(
            log_negativity(&TwoModeParams::new(0.3, 0.8, 0.0, 0.0).unwrap()),
            0.0
        );
        let p = TwoModeParams::new(1.0, 1.0, 0.1, 0.0).unwrap();
        let (nm, _) = symplectic_eigs_pt_tmst(&p);
        assert!((nm - 1.5 * (-0.2f64).exp()).abs() < 1e-12);
        assert!((nm - 1.23).abs() < 0.01);
        assert_eq!(log_negativity(&p), 0.0);
    }

    #[test]
    fn two_vacua_partial_transpose() {
        let (a, b) = symplectic_eigs_pt(&CovMatrix::vacuum(2)).unwrap();
        assert!((a - 0.5).abs() < 1e-14 && (b - 0.5).abs() < 1e-14);
    }
}
