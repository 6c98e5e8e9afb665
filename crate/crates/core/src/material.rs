//! Material parameters, dimensionless groups and the coefficient ledger.

use crate::error::{Error, Positivity, Result};

/// Default tolerance on `|B4|` below which the prestress is treated as critical.
pub const CRITICAL_TOL: f64 = 1e-10;

/// Second-gradient and dissipation moduli, entered either physically or as
/// ready-made dimensionless groups.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SecondGradient {
    Physical {
        /// Solid second-gradient modulus (GPa m^2).
        k_ss: f64,
        /// Fluid second-gradient modulus (GPa m^2).
        m_sg: f64,
        /// Cocapillarity coefficient.
        k_sf: f64,
        /// Darcy dissipation coefficient.
        darcy_d: f64,
        /// Second-gradient dissipation coefficient.
        darcy_alpha: f64,
        /// Layer depth (m).
        depth_l: f64,
    },
    Direct {
        k1: f64,
        k2: f64,
        k3: f64,
        k4: f64,
    },
}

/// Physical description of the layer. Pressures in GPa.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MaterialParams {
    pub lambda_lame: f64,
    pub mu_lame: f64,
    pub biot_m: f64,
    pub biot_b: f64,
    pub second_gradient: SecondGradient,
    /// Reference apparent fluid density; drops out of the dimensionless problem.
    pub mf0: f64,
    pub p0_ext: f64,
    pub dp_ext: f64,
}

impl MaterialParams {
    /// Reference moduli with `k1 = k2 = k3 = k4 = 1e-2`, `b = 1`,
    /// prestress 4.9 GPa and a 1 MPa load step.
    pub fn reference() -> Self {
        MaterialParams {
            lambda_lame: 2.3,
            mu_lame: 1.5,
            biot_m: 5.0,
            biot_b: 1.0,
            second_gradient: SecondGradient::Direct {
                k1: 1e-2,
                k2: 1e-2,
                k3: 1e-2,
                k4: 1e-2,
            },
            mf0: 1.0,
            p0_ext: 4.9,
            dp_ext: 1e-3,
        }
    }

    /// `lambda + 2 mu`, the critical prestress.
    pub fn p_wave_modulus(&self) -> f64 {
        self.lambda_lame + 2.0 * self.mu_lame
    }

    pub fn with_prestress(mut self, p0_ext: f64) -> Self {
        self.p0_ext = p0_ext;
        self
    }

    pub fn with_load(mut self, dp_ext: f64) -> Self {
        self.dp_ext = dp_ext;
        self
    }

    /// Replace the second-gradient block by direct groups `k1 = k2 = k3 = k4 = s`.
    pub fn with_uniform_groups(mut self, s: f64) -> Self {
        self.second_gradient = SecondGradient::Direct {
            k1: s,
            k2: s,
            k3: s,
            k4: s,
        };
        self
    }

    /// Checks the energy-positivity conditions.
    pub fn validate(&self) -> Result<()> {
        let bad = |c| Err(Error::PositivityViolation(c));
        let mut all = vec![
            self.lambda_lame,
            self.mu_lame,
            self.biot_m,
            self.biot_b,
            self.mf0,
            self.p0_ext,
            self.dp_ext,
        ];
        match self.second_gradient {
            SecondGradient::Physical {
                k_ss,
                m_sg,
                k_sf,
                darcy_d,
                darcy_alpha,
                depth_l,
            } => all.extend([k_ss, m_sg, k_sf, darcy_d, darcy_alpha, depth_l]),
            SecondGradient::Direct { k1, k2, k3, k4 } => all.extend([k1, k2, k3, k4]),
        }
        if all.iter().any(|v| !v.is_finite()) {
            return bad(Positivity::NonFinite);
        }
        if self.p_wave_modulus() <= 0.0 {
            return bad(Positivity::PWaveModulus);
        }
        if self.biot_m <= 0.0 {
            return bad(Positivity::BiotModulus);
        }
        if self.mf0 <= 0.0 {
            return bad(Positivity::ReferenceDensity);
        }
        if self.biot_b == 0.0 && self.dp_ext != 0.0 {
            return bad(Positivity::BiotCoefficient);
        }
        match self.second_gradient {
            SecondGradient::Physical {
                k_ss,
                m_sg,
                darcy_d,
                darcy_alpha,
                depth_l,
                ..
            } => {
                if k_ss <= 0.0 {
                    return bad(Positivity::SolidSecondGradient);
                }
                if m_sg <= 0.0 {
                    return bad(Positivity::FluidSecondGradient);
                }
                if depth_l <= 0.0 {
                    return bad(Positivity::Depth);
                }
                if darcy_d <= 0.0 {
                    return bad(Positivity::Darcy);
                }
                if darcy_alpha < 0.0 {
                    return bad(Positivity::SecondGradientDarcy);
                }
            }
            SecondGradient::Direct { k1, k3, k4, .. } => {
                if k1 <= 0.0 {
                    return bad(Positivity::SolidSecondGradient);
                }
                if k3 <= 0.0 {
                    return bad(Positivity::FluidSecondGradient);
                }
                if k4 < 0.0 {
                    return bad(Positivity::SecondGradientDarcy);
                }
            }
        }
        Ok(())
    }

    /// Full coefficient ledger for these parameters.
    pub fn coefficients(&self) -> Result<PencilCoefficients> {
        let k = derive_dimensionless(self)?;
        let e = self.p_wave_modulus();
        let dp_over_bm = if self.dp_ext == 0.0 {
            0.0
        } else {
            self.dp_ext / (self.biot_b * self.biot_m)
        };
        Ok(compute_coefficients(k, self.p0_ext / e, dp_over_bm))
    }

    pub fn regime(&self) -> Result<Regime> {
        Ok(classify_regime(&self.coefficients()?, CRITICAL_TOL))
    }
}

/// The six dimensionless groups plus the Biot coefficient they were built with.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DimensionlessGroups {
    pub k1: f64,
    pub k2: f64,
    pub k3: f64,
    pub k4: f64,
    pub k5: f64,
    pub k6: f64,
    pub b: f64,
}

pub fn derive_dimensionless(params: &MaterialParams) -> Result<DimensionlessGroups> {
    params.validate()?;
    let e = params.p_wave_modulus();
    let m = params.biot_m;
    let (k1, k2, k3, k4) = match params.second_gradient {
        SecondGradient::Physical {
            k_ss,
            m_sg,
            k_sf,
            darcy_d,
            darcy_alpha,
            depth_l,
        } => {
            let l2 = depth_l * depth_l;
            (
                k_ss / (e * l2),
                k_sf,
                m_sg / (m * l2),
                darcy_alpha / (darcy_d * l2),
            )
        }
        SecondGradient::Direct { k1, k2, k3, k4 } => (k1, k2, k3, k4),
    };
    let k5 = m / e;
    let b = params.biot_b;
    Ok(DimensionlessGroups {
        k1,
        k2,
        k3,
        k4,
        k5,
        k6: b * b * k5,
        b,
    })
}

/// Bulk (`c*`) and boundary (`b*`) coefficients of the spectral pencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PencilCoefficients {
    pub groups: DimensionlessGroups,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c5: f64,
    pub c6: f64,
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub b4: f64,
    pub b5: f64,
    pub b6: f64,
}

pub fn compute_coefficients(
    k: DimensionlessGroups,
    p0_ratio: f64,
    dp_over_bm: f64,
) -> PencilCoefficients {
    let g = k.k1 + k.k3 * k.k5 * k.k2 * k.k2;
    let c4 = 1.0 - p0_ratio;
    let c1 = k.k1 * k.k3;
    let c2 = k.k1 + k.k3 * k.k5 * (k.k2 + k.b) * (k.k2 + k.b) + k.k3 * c4;
    let c3 = k.k4 * g;
    let c5 = k.k4 * (c4 + k.k6) + g;
    let c6 = c4 + k.k6;
    PencilCoefficients {
        groups: k,
        c1,
        c2,
        c3,
        c4,
        c5,
        c6,
        b1: c1,
        b2: c2,
        b3: c3,
        b4: c4,
        b5: k.k4 * (c4 + k.k6),
        b6: dp_over_bm,
    }
}

impl PencilCoefficients {
    /// `k1 + k3 k5 k2^2`, the coefficient of `V''` in the fluid density.
    pub fn g(&self) -> f64 {
        let k = &self.groups;
        k.k1 + k.k3 * k.k5 * k.k2 * k.k2
    }

    /// Bilinear-form weights under which the eigenfunctions are orthogonal.
    pub fn alpha(&self) -> [f64; 4] {
        crate::spectral::BilinearWeights::derived(self).alpha
    }

    /// Largest absolute coefficient of the characteristic polynomial at `lambda`.
    pub fn poly_scale(&self, lambda: f64) -> f64 {
        [
            self.c1,
            self.c2 + lambda * self.c3,
            self.c4 + lambda * self.c5,
            lambda * self.c6,
        ]
        .iter()
        .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RegimeKind {
    Stable,
    Critical,
    Unstable,
}

impl RegimeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            RegimeKind::Stable => "stable",
            RegimeKind::Critical => "critical",
            RegimeKind::Unstable => "unstable",
        }
    }
}

/// Prestress regime, decided by the sign of `B4 = 1 - p0/(lambda + 2 mu)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regime {
    pub kind: RegimeKind,
    pub b4: f64,
}

pub fn classify_regime(coeffs: &PencilCoefficients, tol: f64) -> Regime {
    let b4 = coeffs.b4;
    let kind = if b4.abs() <= tol {
        RegimeKind::Critical
    } else if b4 > 0.0 {
        RegimeKind::Stable
    } else {
        RegimeKind::Unstable
    };
    Regime { kind, b4 }
}
