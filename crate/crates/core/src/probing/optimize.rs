// SPDX-License-Identifier: MIT OR Apache-2.0

//! Norm-budgeted steering-vector optimization.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CrhError, Result};
use crate::linalg::Matrix;
use crate::oracle::LossOracle;
use crate::Vec64;

/// Budgets `‖v‖ ≤ w ‖v_d‖` and the descent settings shared by all of them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BudgetSchedule {
    pub weights: Vec<f64>,
    pub iterations: usize,
    pub learning_rate: f64,
}

impl Default for BudgetSchedule {
    /// `w = 0.1, 0.2, …, 2.0`, 30 iterations at learning rate 0.1.
    fn default() -> Self {
        Self {
            weights: (1..=20).map(|k| k as f64 / 10.0).collect(),
            iterations: 30,
            learning_rate: 0.1,
        }
    }
}

impl BudgetSchedule {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(CrhError::Precondition("iterations must be >= 1".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(CrhError::InvalidArgument(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.weights.is_empty() {
            return Err(CrhError::InvalidArgument("no budget weights".into()));
        }
        if self.weights.iter().any(|w| !(*w > 0.0)) {
            return Err(CrhError::InvalidArgument("budget weights must be positive".into()));
        }
        if self.weights.windows(2).any(|p| p[1] <= p[0]) {
            return Err(CrhError::InvalidArgument(
                "budget weights must be strictly increasing".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimizedSet {
    pub weights: Vec<f64>,
    /// One best iterate per budget.
    pub vectors: Matrix<f64>,
    pub losses: Vec<f64>,
    pub initial_losses: Vec<f64>,
    /// Budgets whose run stopped early on a non-finite loss.
    pub aborted: Vec<bool>,
}

impl OptimizedSet {
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }
}

struct BudgetRun {
    best: Vec64,
    best_loss: f64,
    initial_loss: f64,
    aborted: bool,
}

fn project_to_ball(v: &mut Vec64, radius: f64) {
    let n = v.norm();
    if n > radius {
        *v = v.scaled(radius / n);
    }
}

fn run_budget<O: LossOracle + ?Sized>(oracle: &O, v_d: &Vec64, w: f64, schedule: &BudgetSchedule) -> Result<BudgetRun> {
    let radius = w * v_d.norm();
    let mut v = v_d.scaled(w);
    let (initial_loss, mut grad) = oracle.loss_and_grad(&v)?;
    if !initial_loss.is_finite() {
        return Err(CrhError::NonFinite(format!("initial loss at budget {w}")));
    }
    let mut run = BudgetRun {
        best: v.clone(),
        best_loss: initial_loss,
        initial_loss,
        aborted: false,
    };
    for _ in 0..schedule.iterations {
        v.axpy(-schedule.learning_rate, &grad);
        project_to_ball(&mut v, radius);
        let (loss, g) = match oracle.loss_and_grad(&v) {
            Ok(lg) if lg.0.is_finite() && lg.1.is_finite() => lg,
            Ok(_) | Err(CrhError::NonFinite(_)) => {
                log::warn!("budget {w}: non-finite loss, keeping best iterate");
                run.aborted = true;
                break;
            }
            Err(e) => return Err(e),
        };
        if loss < run.best_loss {
            run.best_loss = loss;
            run.best = v.clone();
        }
        grad = g;
    }
    Ok(run)
}

/// Projected gradient descent from `w·v_d` inside each budget ball, keeping
/// the best iterate. Budgets run in parallel; results are order-independent.
pub fn optimize_budgeted<O: LossOracle + ?Sized>(
    oracle: &O,
    v_d: &Vec64,
    schedule: &BudgetSchedule,
) -> Result<OptimizedSet> {
    schedule.validate()?;
    v_d.check_dim(oracle.dim())?;
    if !(v_d.norm() > 0.0) {
        return Err(CrhError::DegenerateAxis("difference vector is zero".into()));
    }
    let runs: Vec<BudgetRun> = schedule
        .weights
        .par_iter()
        .map(|&w| run_budget(oracle, v_d, w, schedule))
        .collect::<Result<_>>()?;
    let rows: Vec<Vec64> = runs.iter().map(|r| r.best.clone()).collect();
    Ok(OptimizedSet {
        weights: schedule.weights.clone(),
        vectors: Matrix::from_rows(&rows)?,
        losses: runs.iter().map(|r| r.best_loss).collect(),
        initial_losses: runs.iter().map(|r| r.initial_loss).collect(),
        aborted: runs.iter().map(|r| r.aborted).collect(),
    })
}
