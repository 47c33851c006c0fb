use std::sync::mpsc::Sender;

use serde::Serialize;

use crate::error::Result;
use crate::spectral::Field;

use super::config::{ConfigRecord, SolverConfig};
use super::conserved::{conserved, ConservedTriple};
use super::stepper::{check_finite, coeff_norm_sq, Stepper};

/// State at a scheduled output time.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub step: usize,
    pub t: f64,
    pub field: Field,
}

/// Outcome of a completed run.
#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: ConfigRecord,
    pub initial: ConservedTriple,
    pub last: ConservedTriple,
    pub final_state: Field,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConservationDrift {
    pub mass: f64,
    pub l2: f64,
    pub energy: f64,
    pub mean_mode: f64,
}

impl RunOutcome {
    /// Relative drift of each invariant; absolute where the initial value
    /// vanishes.
    pub fn drift(&self) -> ConservationDrift {
        let rel = |a: f64, b: f64| {
            let d = (b - a).abs();
            if a.abs() > 0.0 {
                d / a.abs()
            } else {
                d
            }
        };
        ConservationDrift {
            mass: rel(self.initial.mass, self.last.mass),
            l2: rel(self.initial.l2, self.last.l2),
            energy: rel(self.initial.energy, self.last.energy),
            mean_mode: (self.initial.mean_mode - self.last.mean_mode).abs(),
        }
    }
}

/// Evolves `u0`, calling `observe` at `t = 0`, every `snapshot_every` steps
/// and at the final step. The initial data is first restricted to the
/// de-aliased band.
pub fn run_with<F>(cfg: &SolverConfig, u0: &Field, mut observe: F) -> Result<RunOutcome>
where
    F: FnMut(&Snapshot) -> Result<()>,
{
    let stepper = Stepper::new(cfg);
    let grid = cfg.grid();
    let mut v = stepper.prepare(u0);
    let base = coeff_norm_sq(&v);
    let start = Field::from_spectrum(grid, v.clone())?;
    let sign = cfg.sign();
    let initial = conserved(&start, sign);
    observe(&Snapshot {
        step: 0,
        t: 0.0,
        field: start,
    })?;
    let every = cfg.snapshot_every();
    for step in 1..=cfg.steps() {
        let next = stepper.step(&v);
        check_finite(&next, (step - 1) as f64 * cfg.dt(), base)?;
        v = next;
        if step % every == 0 || step == cfg.steps() {
            observe(&Snapshot {
                step,
                t: step as f64 * cfg.dt(),
                field: Field::from_spectrum(grid, v.clone())?,
            })?;
        }
    }
    let final_state = Field::from_spectrum(grid, v)?;
    Ok(RunOutcome {
        config: cfg.record(),
        initial,
        last: conserved(&final_state, sign),
        final_state,
    })
}

/// Runs without observation.
pub fn run(cfg: &SolverConfig, u0: &Field) -> Result<RunOutcome> {
    run_with(cfg, u0, |_| Ok(()))
}

/// Runs and collects every snapshot.
pub fn run_collect(cfg: &SolverConfig, u0: &Field) -> Result<(RunOutcome, Vec<Snapshot>)> {
    let mut snaps = Vec::new();
    let out = run_with(cfg, u0, |s| {
        snaps.push(s.clone());
        Ok(())
    })?;
    Ok((out, snaps))
}

/// Hands snapshots to another thread through an unbounded channel, so a slow
/// consumer never stalls the time loop. A dropped receiver is ignored.
pub fn run_streaming(cfg: &SolverConfig, u0: &Field, tx: Sender<Snapshot>) -> Result<RunOutcome> {
    run_with(cfg, u0, |s| {
        let _ = tx.send(s.clone());
        Ok(())
    })
}
