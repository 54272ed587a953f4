use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quantum::{HilbertSpace, Operator};

/// Real time-dependent prefactor of a Hamiltonian term.
pub type Coefficient = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `H(t) = H0 + sum_k f_k(t) O_k`, operators in angular units (rad/s).
///
/// `breakpoints` lists times where some `f_k` is discontinuous; the
/// integrator never steps across them.
#[derive(Clone)]
pub struct TimeDependentHamiltonian {
    constant: Operator,
    terms: Vec<(Coefficient, Operator)>,
    breakpoints: Vec<f64>,
}

impl TimeDependentHamiltonian {
    pub fn new(constant: Operator) -> Self {
        TimeDependentHamiltonian {
            constant,
            terms: Vec::new(),
            breakpoints: Vec::new(),
        }
    }

    pub fn constant(op: Operator) -> Self {
        Self::new(op)
    }

    pub fn zero(space: &HilbertSpace) -> Self {
        Self::new(Operator::zeros(space))
    }

    pub fn add_term(
        &mut self,
        coefficient: impl Fn(f64) -> f64 + Send + Sync + 'static,
        op: Operator,
    ) -> Result<()> {
        if op.space() != self.constant.space() {
            return Err(Error::SpaceMismatch);
        }
        self.terms.push((Arc::new(coefficient), op));
        Ok(())
    }

    pub fn add_static(&mut self, op: &Operator) -> Result<()> {
        self.constant = self.constant.try_add(op)?;
        Ok(())
    }

    pub fn add_breakpoints(&mut self, times: impl IntoIterator<Item = f64>) {
        self.breakpoints.extend(times.into_iter().filter(|t| t.is_finite()));
        self.breakpoints.sort_by(f64::total_cmp);
        self.breakpoints.dedup();
    }

    pub fn space(&self) -> &HilbertSpace {
        self.constant.space()
    }

    pub fn static_part(&self) -> &Operator {
        &self.constant
    }

    pub fn terms(&self) -> &[(Coefficient, Operator)] {
        &self.terms
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// Dense `H(t)`.
    pub fn at(&self, t: f64) -> Operator {
        let mut m = self.constant.matrix().clone();
        for (f, op) in &self.terms {
            let c = f(t);
            if c != 0.0 {
                m += op.matrix() * num_complex::Complex64::new(c, 0.0);
            }
        }
        Operator::new(self.space().clone(), m).expect("same space")
    }
}

impl fmt::Debug for TimeDependentHamiltonian {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeDependentHamiltonian")
            .field("space", self.space())
            .field("terms", &self.terms.len())
            .field("breakpoints", &self.breakpoints)
            .finish()
    }
}
