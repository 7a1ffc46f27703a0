//! The check registry: stable names, the identity each one verifies, and what
//! it needs from the weight.

use crate::hyperweight::HypergeometricWeight;

/// What a check needs from the weight before it can run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Requirement {
    Any,
    /// No Toda deformation.
    Undeformed,
    /// Deformation with `|eta2|, |eta3| < 1`.
    Deformed,
    /// Undeformed with at least one valid single shift.
    SingleShift,
    /// Undeformed with at least two valid single shifts.
    ShiftPair,
}

impl Requirement {
    pub fn check(self, w: &HypergeometricWeight) -> Result<(), String> {
        let undeformed = || {
            if w.is_deformed() {
                Err("needs an undeformed weight".to_string())
            } else {
                Ok(())
            }
        };
        match self {
            Requirement::Any => Ok(()),
            Requirement::Undeformed => undeformed(),
            Requirement::Deformed => {
                let inside = |l| w.flow_parameter(l).abs() < 1;
                if w.is_deformed() && inside(2) && inside(3) {
                    Ok(())
                } else {
                    Err("needs a deformation with |eta2|, |eta3| < 1".to_string())
                }
            }
            Requirement::SingleShift | Requirement::ShiftPair => {
                undeformed()?;
                let need = if self == Requirement::SingleShift { 1 } else { 2 };
                if w.single_shifts().len() >= need {
                    Ok(())
                } else {
                    Err(format!("needs {need} valid parameter shift(s)"))
                }
            }
        }
    }
}

/// One registered check.
#[derive(Clone, Copy, Debug)]
pub struct Entry {
    pub name: &'static str,
    pub description: &'static str,
    pub requirement: Requirement,
    /// Moment depth beyond `2k` needed from the shared table.
    pub extra_depth: fn(&HypergeometricWeight) -> usize,
}

fn none(_: &HypergeometricWeight) -> usize {
    0
}

fn theta_degree(w: &HypergeometricWeight) -> usize {
    w.n() + 1
}

fn two(_: &HypergeometricWeight) -> usize {
    2
}

/// Every check, in report order.
pub const REGISTRY: &[Entry] = &[
    Entry {
        name: "gram_pearson",
        description: "moment matrix symmetry theta(Lambda) G = B sigma(Lambda) G B^T",
        requirement: Requirement::Undeformed,
        extra_depth: theta_degree,
    },
    Entry {
        name: "recurrence",
        description: "three-term recurrence z P_n = P_{n+1} + beta_n P_n + gamma_n P_{n-1} with discrete orthogonality",
        requirement: Requirement::Any,
        extra_depth: none,
    },
    Entry {
        name: "coefficient_sums",
        description: "subleading coefficients p^1, p^2, p^3 as sums over beta and gamma",
        requirement: Requirement::Any,
        extra_depth: none,
    },
    Entry {
        name: "pi_closed_forms",
        description: "closed-form diagonals of the dressed Pascal matrices Pi^{+-1} = S B^{+-1} S^{-1}",
        requirement: Requirement::Any,
        extra_depth: none,
    },
    Entry {
        name: "s_inverse",
        description: "subdiagonals of S^{-1} in terms of the coefficients p^d_n",
        requirement: Requirement::Any,
        extra_depth: none,
    },
    Entry {
        name: "pascal_shift",
        description: "polynomial shift R(J) Pi^{+-1} = Pi^{+-1} R(J +- I)",
        requirement: Requirement::Any,
        extra_depth: none,
    },
    Entry {
        name: "psi_routes",
        description: "Laguerre-Freud matrix Psi = sigma(J) H Pi^T agreeing over six product routes, banded",
        requirement: Requirement::Undeformed,
        extra_depth: none,
    },
    Entry {
        name: "psi_extreme",
        description: "extreme diagonals of Psi as H_n times products of gamma",
        requirement: Requirement::Undeformed,
        extra_depth: none,
    },
    Entry {
        name: "psi_shift",
        description: "polynomial shifts theta(z) P(z-1) = Psi H^{-1} P(z), sigma(z) P(z+1) = Psi^T H^{-1} P(z)",
        requirement: Requirement::Undeformed,
        extra_depth: none,
    },
    Entry {
        name: "psi_jacobi",
        description: "compatibility [Psi H^{-1}, J] = Psi H^{-1} with the products sigma(J) theta(J+I) = Psi H^{-1} Psi^T H^{-1}",
        requirement: Requirement::Undeformed,
        extra_depth: none,
    },
    Entry {
        name: "structure_cholesky",
        description: "factorizations Pi = Theta^{-1} Sigma and Psi = Sigma^{-1} h Theta^{-T}",
        requirement: Requirement::Undeformed,
        extra_depth: none,
    },
    Entry {
        name: "contiguous",
        description: "contiguous relations (Lambda + a_i) G = a_i (T_i G), (Lambda + b_j - 1) G = (b_j - 1)(T_j G), Lambda G = eta kappa B (T G) B^T",
        requirement: Requirement::Undeformed,
        extra_depth: none,
    },
    Entry {
        name: "omega",
        description: "connection matrices Omega = S (T S)^{-1} bidiagonal with Omega (T P) = P",
        requirement: Requirement::SingleShift,
        extra_depth: none,
    },
    Entry {
        name: "nijhoff_capel",
        description: "Nijhoff-Capel lattice equation for squared norms under two parameter shifts",
        requirement: Requirement::ShiftPair,
        extra_depth: none,
    },
    Entry {
        name: "uv_system",
        description: "u-v difference system with v_n = beta_{n-1} and the eta flow of u_{n+1}/hat u_n",
        requirement: Requirement::SingleShift,
        extra_depth: none,
    },
    Entry {
        name: "tau_routes",
        description: "tau function relations H_n = tau_{n+1}/tau_n and Hirota theta^2 log tau_n = tau_{n+1} tau_{n-1}/tau_n^2",
        requirement: Requirement::Any,
        extra_depth: none,
    },
    Entry {
        name: "toda",
        description: "Toda system theta beta_n = gamma_{n+1} - gamma_n, theta log gamma_n = beta_n - beta_{n-1}",
        requirement: Requirement::Any,
        extra_depth: none,
    },
    Entry {
        name: "sato_wilson",
        description: "Sato-Wilson Phi_l = -(J^l)_-, Lax theta_l J = [(J^l)_+, J] and Zakharov-Shabat for flows (1,2)",
        requirement: Requirement::Any,
        extra_depth: two,
    },
    Entry {
        name: "pearson_toda",
        description: "gauge-equivalent Pearson-Toda compatibility theta X = [Phi, X], theta Y = [J_+, Y]",
        requirement: Requirement::Undeformed,
        extra_depth: none,
    },
    Entry {
        name: "kp",
        description: "KP equation theta_1(4 theta_3 p + 6 (theta_1 p)^2 - theta_1^3 p) = 3 theta_2^2 p",
        requirement: Requirement::Deformed,
        extra_depth: none,
    },
];

pub fn entry(name: &str) -> Option<&'static Entry> {
    REGISTRY.iter().find(|e| e.name == name)
}

pub fn description(name: &str) -> Option<&'static str> {
    entry(name).map(|e| e.description)
}

/// Names of the checks that can run on `w`, in registry order.
pub fn applicable(w: &HypergeometricWeight) -> Vec<&'static str> {
    REGISTRY.iter().filter(|e| e.requirement.check(w).is_ok()).map(|e| e.name).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn names_are_unique() {
        let mut names: Vec<_> = REGISTRY.iter().map(|e| e.name).collect();
        names.sort_unstable();
        names.dedup();
        assert_eq!(names.len(), REGISTRY.len());
    }

    #[test]
    fn deformed_weight_selects_flow_checks_only() {
        let w = HypergeometricWeight::charlier(Rational::from((1, 2)))
            .with_deformation(Rational::from((9, 10)), Rational::from((9, 10)))
            .unwrap();
        let a = applicable(&w);
        assert!(a.contains(&"kp"));
        assert!(!a.contains(&"gram_pearson"));
        let c = applicable(&HypergeometricWeight::charlier(Rational::from((7, 10))));
        assert!(!c.contains(&"kp") && !c.contains(&"omega"));
    }
}
