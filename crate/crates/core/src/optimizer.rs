//! Derivative-free maximisation over one or two Bloch-sphere directions.
//!
//! A coarse (θ, φ) grid is scanned first, then the search window around the
//! incumbent is shrunk by a factor of four per refinement round. Candidate
//! points are evaluated in parallel but reduced in index order, so results do
//! not depend on the number of worker threads. Ties go to the
//! lexicographically smallest (θ, φ) tuple over all directions.

use std::cmp::Ordering;
use std::f64::consts::{PI, TAU};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measure::Direction;

/// Window half-width, in units of the refined step.
const LOCAL_HALF_WIDTH: i32 = 4;
const SHRINK: f64 = 4.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub grid_step: f64,
    pub refine_iters: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { grid_step: PI / 60.0, refine_iters: 6 }
    }
}

impl GridSpec {
    pub fn new(grid_step: f64, refine_iters: usize) -> Result<Self> {
        if !(grid_step > 0.0 && grid_step <= PI / 8.0 + 1e-15) {
            return Err(Error::invalid(format!("grid step {grid_step} outside (0, π/8]")));
        }
        Ok(Self { grid_step, refine_iters })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptResult {
    pub best_value: f64,
    pub best_directions: Vec<Direction>,
    pub evaluations: usize,
    /// Incumbent value after the coarse scan and after each refinement round.
    pub history: Vec<f64>,
}

type Angles = (f64, f64);

fn coarse_axis(step: f64) -> Vec<Angles> {
    let n_theta = (PI / step - 1e-9).ceil() as usize;
    let n_phi = (TAU / step - 1e-9).ceil() as usize;
    let mut out = vec![(0.0, 0.0)];
    for i in 1..n_theta {
        let theta = i as f64 * step;
        for j in 0..n_phi {
            out.push((theta, j as f64 * step));
        }
    }
    out.push((PI, 0.0));
    out
}

fn local_axis(center: Angles, step: f64) -> Vec<Angles> {
    let mut out = Vec::with_capacity(81);
    for i in -LOCAL_HALF_WIDTH..=LOCAL_HALF_WIDTH {
        let theta = (center.0 + i as f64 * step).clamp(0.0, PI);
        for j in -LOCAL_HALF_WIDTH..=LOCAL_HALF_WIDTH {
            let phi = if theta == 0.0 || theta == PI {
                0.0
            } else {
                (center.1 + j as f64 * step).rem_euclid(TAU)
            };
            out.push((theta, phi));
        }
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    out.dedup();
    out
}

fn cartesian(axes: &[Vec<Angles>]) -> Vec<Vec<Angles>> {
    axes.iter().fold(vec![Vec::new()], |acc, axis| {
        acc.iter()
            .flat_map(|prefix| {
                axis.iter().map(move |a| {
                    let mut v = prefix.clone();
                    v.push(*a);
                    v
                })
            })
            .collect()
    })
}

fn lexicographic(a: &[Angles], b: &[Angles]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = x.0.total_cmp(&y.0).then(x.1.total_cmp(&y.1));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Best candidate of `points`, or `None` when every point is infeasible.
fn scan<F>(objective: &F, points: &[Vec<Angles>]) -> Result<Option<(f64, Vec<Angles>)>>
where
    F: Fn(&[Direction]) -> Result<f64> + Sync,
{
    let values: Vec<Result<Option<f64>>> = points
        .par_iter()
        .map(|angles| {
            let dirs: Vec<Direction> = angles
                .iter()
                .map(|&(t, p)| Direction::new(t, p))
                .collect::<Result<_>>()?;
            match objective(&dirs) {
                Ok(v) if v.is_finite() => Ok(Some(v)),
                Ok(v) => Err(Error::NumericalFailure {
                    message: format!("objective returned {v}"),
                    angles: angles.clone(),
                }),
                Err(Error::DegenerateCondition { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        })
        .collect();

    let mut best: Option<(f64, &Vec<Angles>)> = None;
    for (angles, value) in points.iter().zip(values) {
        let Some(v) = value? else { continue };
        let better = match best {
            None => true,
            Some((bv, ba)) => v > bv || (v == bv && lexicographic(angles, ba) == Ordering::Less),
        };
        if better {
            best = Some((v, angles));
        }
    }
    Ok(best.map(|(v, a)| (v, a.clone())))
}

/// Maximise `objective` over `k` ∈ {1, 2} directions.
///
/// The objective may return [`Error::DegenerateCondition`] to mark a point as
/// infeasible; such points are skipped. Any other error is returned as is, and
/// a non-finite value becomes [`Error::NumericalFailure`] carrying the angles.
pub fn maximize_over_directions<F>(objective: F, k: usize, spec: GridSpec) -> Result<OptResult>
where
    F: Fn(&[Direction]) -> Result<f64> + Sync,
{
    if !(1..=2).contains(&k) {
        return Err(Error::invalid(format!("can optimise over 1 or 2 directions, not {k}")));
    }
    let spec = GridSpec::new(spec.grid_step, spec.refine_iters)?;

    let coarse = cartesian(&vec![coarse_axis(spec.grid_step); k]);
    let mut evaluations = coarse.len();
    let (mut best_value, mut best_angles) = scan(&objective, &coarse)?.ok_or_else(|| {
        Error::NumericalFailure { message: "no feasible point on the coarse grid".into(), angles: vec![] }
    })?;
    let mut history = vec![best_value];

    let mut step = spec.grid_step;
    for _ in 0..spec.refine_iters {
        step /= SHRINK;
        let axes: Vec<Vec<Angles>> = best_angles.iter().map(|&c| local_axis(c, step)).collect();
        let local = cartesian(&axes);
        evaluations += local.len();
        // the incumbent is part of the local grid, so this never decreases
        if let Some((v, a)) = scan(&objective, &local)? {
            if v > best_value || (v == best_value && lexicographic(&a, &best_angles) == Ordering::Less) {
                best_value = v;
                best_angles = a;
            }
        }
        history.push(best_value);
    }

    let best_directions = best_angles
        .iter()
        .map(|&(t, p)| Direction::new(t, p))
        .collect::<Result<_>>()?;
    Ok(OptResult { best_value, best_directions, evaluations, history })
}
