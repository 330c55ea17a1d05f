//! Trigonometric polynomials on the torus,
//! `P(t, ω) = Σ_j c_j e^{-2πi⟨t, ℓ_j⟩} e^{-2πi⟨ω, m_j⟩}`.

use crate::error::{Error, Result};
use crate::phase::neg_phase;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coeff: Complex64,
    /// frequency paired with `t` (the modulation index)
    pub ell: Vec<i64>,
    /// frequency paired with `ω` (the translation index)
    pub m: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPoly {
    dim: usize,
    terms: Vec<TrigTerm>,
}

impl TrigPoly {
    pub fn new(terms: Vec<TrigTerm>) -> Result<Self> {
        let Some(first) = terms.first() else {
            return Err(Error::InvalidTrigPoly("at least one term is required".into()));
        };
        let dim = first.ell.len();
        if dim == 0 {
            return Err(Error::InvalidTrigPoly("zero-dimensional frequencies".into()));
        }
        for (j, term) in terms.iter().enumerate() {
            if term.ell.len() != dim || term.m.len() != dim {
                return Err(Error::InvalidTrigPoly(format!("term {j} has wrong dimension")));
            }
            if term.coeff == Complex64::new(0.0, 0.0) || !term.coeff.is_finite() {
                return Err(Error::InvalidTrigPoly(format!(
                    "coefficient {j} must be nonzero and finite"
                )));
            }
            if terms[..j].iter().any(|o| o.ell == term.ell && o.m == term.m) {
                return Err(Error::InvalidTrigPoly(format!("frequency pair {j} repeated")));
            }
        }
        Ok(Self { dim, terms })
    }

    /// Single-term polynomial, convenient in tests.
    pub fn monomial(coeff: Complex64, ell: Vec<i64>, m: Vec<i64>) -> Result<Self> {
        Self::new(vec![TrigTerm { coeff, ell, m }])
    }

    /// The constant polynomial 1 in dimension `n`.
    pub fn one(dim: usize) -> Self {
        Self::monomial(Complex64::new(1.0, 0.0), vec![0; dim], vec![0; dim]).expect("valid")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[TrigTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms concatenated; fails if a frequency pair appears in both.
    pub fn concat(&self, other: &TrigPoly) -> Result<TrigPoly> {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        TrigPoly::new(terms)
    }

    /// Every coefficient multiplied by `kappa`.
    pub fn scaled(&self, kappa: Complex64) -> Result<TrigPoly> {
        TrigPoly::new(
            self.terms
                .iter()
                .map(|t| TrigTerm {
                    coeff: t.coeff * kappa,
                    ..t.clone()
                })
                .collect(),
        )
    }

    /// `Σ |c_j|`, an upper bound on `|P|`.
    pub fn coeff_l1(&self) -> f64 {
        self.terms.iter().map(|t| t.coeff.norm()).sum()
    }

    /// Evaluate at `z = (t, ω)`.
    pub fn eval(&self, z: &[f64]) -> Complex64 {
        debug_assert_eq!(z.len(), 2 * self.dim);
        let (t, omega) = z.split_at(self.dim);
        self.terms
            .iter()
            .map(|term| {
                let arg: f64 = t
                    .iter()
                    .zip(&term.ell)
                    .chain(omega.iter().zip(&term.m))
                    .map(|(&a, &k)| a * k as f64)
                    .sum();
                term.coeff * neg_phase(arg)
            })
            .sum()
    }
}
