//! Nelder–Mead simplex minimization on the unit box [0, 1]^d. Trial points
//! are clamped into the box before evaluation.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::Result;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NelderMead {
    /// Edge length of the initial simplex.
    pub initial_step: f64,
    /// Stop when the spread of simplex values falls below this, relative to
    /// the best value.
    pub tolerance: f64,
    pub max_evaluations: usize,
}

impl Default for NelderMead {
    fn default() -> Self {
        Self {
            initial_step: 0.25,
            tolerance: 1e-6,
            max_evaluations: 200,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Minimum {
    pub point: Vec<f64>,
    pub value: f64,
    pub evaluations: usize,
    pub converged: bool,
}

fn clamp_unit(x: &mut [f64]) {
    for v in x.iter_mut() {
        *v = v.clamp(0.0, 1.0);
    }
}

impl NelderMead {
    /// Minimizes `f` from `start`. Errors returned by `f` abort the search.
    /// Non-finite values are treated as +∞.
    pub fn minimize<F>(&self, start: &[f64], mut f: F) -> Result<Minimum>
    where
        F: FnMut(&[f64]) -> Result<f64>,
    {
        let d = start.len();
        let mut evaluations = 0usize;
        let mut eval = |x: &[f64], count: &mut usize| -> Result<f64> {
            *count += 1;
            let v = f(x)?;
            Ok(if v.is_nan() { f64::INFINITY } else { v })
        };

        let mut x0 = start.to_vec();
        clamp_unit(&mut x0);
        let v0 = eval(&x0, &mut evaluations)?;
        if d == 0 || self.max_evaluations <= 1 {
            return Ok(Minimum {
                point: x0,
                value: v0,
                evaluations,
                converged: d == 0,
            });
        }

        let mut simplex: Vec<(Vec<f64>, f64)> = vec![(x0.clone(), v0)];
        for k in 0..d {
            if evaluations >= self.max_evaluations {
                break;
            }
            let mut x = x0.clone();
            // step away from the nearer face so the vertex stays distinct
            x[k] += if x[k] + self.initial_step <= 1.0 {
                self.initial_step
            } else {
                -self.initial_step
            };
            clamp_unit(&mut x);
            let v = eval(&x, &mut evaluations)?;
            simplex.push((x, v));
        }

        let mut converged = false;
        while evaluations < self.max_evaluations && simplex.len() == d + 1 {
            simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
            let best = simplex[0].1;
            let worst = simplex[d].1;
            if best.is_finite() && worst.is_finite() && (worst - best).abs() <= self.tolerance * best.abs().max(1e-300) {
                converged = true;
                break;
            }
            let diameter = simplex[1..]
                .iter()
                .map(|(x, _)| x.iter().zip(&simplex[0].0).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max))
                .fold(0.0, f64::max);
            if diameter < 1e-12 {
                converged = best.is_finite();
                break;
            }

            let mut centroid = vec![0.0; d];
            for (x, _) in &simplex[..d] {
                for (c, v) in centroid.iter_mut().zip(x) {
                    *c += v / d as f64;
                }
            }
            let along = |t: f64| -> Vec<f64> {
                let mut x: Vec<f64> = centroid
                    .iter()
                    .zip(&simplex[d].0)
                    .map(|(c, w)| c + t * (c - w))
                    .collect();
                clamp_unit(&mut x);
                x
            };

            let xr = along(1.0);
            let vr = eval(&xr, &mut evaluations)?;
            if vr < best {
                let xe = along(2.0);
                let ve = if evaluations < self.max_evaluations {
                    eval(&xe, &mut evaluations)?
                } else {
                    f64::INFINITY
                };
                simplex[d] = if ve < vr { (xe, ve) } else { (xr, vr) };
                continue;
            }
            if vr < simplex[d - 1].1 {
                simplex[d] = (xr, vr);
                continue;
            }
            if evaluations >= self.max_evaluations {
                break;
            }
            let (xc, vc) = if vr < worst {
                let x = along(0.5);
                let v = eval(&x, &mut evaluations)?;
                (x, v)
            } else {
                let x = along(-0.5);
                let v = eval(&x, &mut evaluations)?;
                (x, v)
            };
            if vc < worst.min(vr) {
                simplex[d] = (xc, vc);
                continue;
            }
            // shrink toward the best vertex
            let anchor = simplex[0].0.clone();
            for k in 1..=d {
                if evaluations >= self.max_evaluations {
                    break;
                }
                let x: Vec<f64> = anchor
                    .iter()
                    .zip(&simplex[k].0)
                    .map(|(a, b)| a + 0.5 * (b - a))
                    .collect();
                let v = eval(&x, &mut evaluations)?;
                simplex[k] = (x, v);
            }
        }

        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let (point, value) = simplex.swap_remove(0);
        Ok(Minimum {
            point,
            value,
            evaluations,
            converged,
        })
    }
}
