//! Two-phase optimiser. While some corner is inverted, a regularised
//! mean-ratio energy on unnormalised corner frames pulls the mesh out of
//! the tangle; afterwards a soft minimum of the scaled Jacobians is
//! maximised. Both phases use L-BFGS with backtracking, and the embedding
//! with the best true minimum seen is returned.

use std::collections::VecDeque;

use rayon::prelude::*;

use super::{corner_value, cross, dot, norm, sub, Embedding, GeometryError, PartialEmbedding, Point, CORNER_NEIGHBOURS};
use crate::hexmodel::HexComplex;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizeParams {
    /// Sharpness of the soft minimum.
    pub beta: f64,
    /// Budget shared by both phases.
    pub max_iterations: usize,
    /// A phase ends once its energy improves by less than this over
    /// `window` steps.
    pub tolerance: f64,
    pub window: usize,
    /// Stop as soon as the true minimum reaches this value.
    pub target_min: Option<f64>,
}

impl Default for OptimizeParams {
    fn default() -> Self {
        OptimizeParams { beta: 40.0, max_iterations: 10_000, tolerance: 1e-10, window: 10, target_min: None }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OptimizeStatus {
    /// Progress stopped with every corner positive, or the target was met.
    Converged,
    /// Progress stopped with some corner still non-positive.
    Stalled,
    MaxIterations,
    /// Nothing to move, or no descent step could be found at the start.
    NonImprovable,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub embedding: Embedding,
    pub min_scaled_jacobian: f64,
    pub iterations: usize,
    pub status: OptimizeStatus,
}

struct HexTerms {
    values: [f64; 8],
    grads: [[Point; 8]; 8],
}

/// Scaled Jacobians of one hex and their gradients.
fn hex_terms(pts: &[Point; 8]) -> Option<HexTerms> {
    let mut values = [0.0; 8];
    let mut grads = [[[0.0; 3]; 8]; 8];
    for k in 0..8 {
        let e = CORNER_NEIGHBOURS[k].map(|n| sub(pts[n], pts[k]));
        let len = e.map(norm);
        if len.contains(&0.0) {
            return None;
        }
        let u: [Point; 3] = std::array::from_fn(|i| e[i].map(|x| x / len[i]));
        values[k] = dot(u[0], cross(u[1], u[2]));
        for i in 0..3 {
            let g = cross(u[(i + 1) % 3], u[(i + 2) % 3]);
            let ug = dot(u[i], g);
            let d: Point = std::array::from_fn(|a| (g[a] - u[i][a] * ug) / len[i]);
            let n = CORNER_NEIGHBOURS[k][i];
            for a in 0..3 {
                grads[k][n][a] += d[a];
                grads[k][k][a] -= d[a];
            }
        }
    }
    Some(HexTerms { values, grads })
}

fn hex_points(c: &HexComplex, points: &[Point], h: usize) -> [Point; 8] {
    c.hexes()[h].corners().map(|v| points[v as usize])
}

fn scatter(c: &HexComplex, n: usize, per_hex: &[[Point; 8]]) -> Vec<Point> {
    let mut grad = vec![[0.0; 3]; n];
    for (h, g) in per_hex.iter().enumerate() {
        for (m, &v) in c.hexes()[h].corners().iter().enumerate() {
            for a in 0..3 {
                grad[v as usize][a] += g[m][a];
            }
        }
    }
    grad
}

/// Soft minimum energy `(1/β) ln Σ exp(-β s)` over all corners and its
/// gradient with respect to every vertex coordinate. Minimising the energy
/// raises the smallest scaled Jacobians. `None` on a zero-length edge.
pub fn softmin_energy(c: &HexComplex, e: &Embedding, beta: f64) -> Option<(f64, Vec<Point>)> {
    let points = e.points();
    let terms: Vec<Option<HexTerms>> =
        (0..c.len()).into_par_iter().map(|h| hex_terms(&hex_points(c, points, h))).collect();
    let terms: Vec<HexTerms> = terms.into_iter().collect::<Option<_>>()?;
    let smin = terms.iter().flat_map(|t| t.values).fold(f64::INFINITY, f64::min);
    let total: f64 = terms.iter().flat_map(|t| t.values).map(|s| (-beta * (s - smin)).exp()).sum();
    let energy = total.ln() / beta - smin;
    let per_hex: Vec<[Point; 8]> = terms
        .iter()
        .map(|t| {
            let mut g = [[0.0; 3]; 8];
            for k in 0..8 {
                let w = (-beta * (t.values[k] - smin)).exp() / total;
                for (gm, dm) in g.iter_mut().zip(&t.grads[k]) {
                    for (x, d) in gm.iter_mut().zip(dm) {
                        *x -= w * d;
                    }
                }
            }
            g
        })
        .collect();
    Some((energy, scatter(c, points.len(), &per_hex)))
}

/// Corner frame determinants `e1 · (e2 × e3)` of every hex.
fn corner_determinants(c: &HexComplex, points: &[Point]) -> Vec<f64> {
    (0..c.len())
        .flat_map(|h| {
            let pts = hex_points(c, points, h);
            (0..8).map(move |k| {
                let [a, b, d] = CORNER_NEIGHBOURS[k].map(|n| sub(pts[n], pts[k]));
                dot(a, cross(b, d))
            })
        })
        .collect()
}

/// Sum over corners of the regularised mean-ratio distortion
/// `|A|² / (3 h(σ)^(2/3))`, where `A` is the corner frame, `σ = det A` and
/// `h(σ) = (σ + √(σ² + 4δ²)) / 2`. Finite for inverted corners when
/// `δ > 0`, and equal to the number of corners for a mesh of cubes.
pub fn untangle_energy(c: &HexComplex, e: &Embedding, delta: f64) -> (f64, Vec<Point>) {
    let points = e.points();
    let terms: Vec<(f64, [Point; 8])> = (0..c.len())
        .into_par_iter()
        .map(|h| {
            let pts = hex_points(c, points, h);
            let mut energy = 0.0;
            let mut g = [[0.0; 3]; 8];
            for k in 0..8 {
                let e = CORNER_NEIGHBOURS[k].map(|n| sub(pts[n], pts[k]));
                let frob: f64 = e.iter().map(|v| dot(*v, *v)).sum();
                let sigma = dot(e[0], cross(e[1], e[2]));
                let root = (sigma * sigma + 4.0 * delta * delta).sqrt();
                let hs = (sigma + root) / 2.0;
                if hs <= 0.0 {
                    // Only reachable with delta = 0 on an inverted corner.
                    return (f64::INFINITY, g);
                }
                let dh = if root > 0.0 { (1.0 + sigma / root) / 2.0 } else { 0.5 };
                let h23 = hs.powf(2.0 / 3.0);
                energy += frob / (3.0 * h23);
                let coef_f = 2.0 / (3.0 * h23);
                let coef_s = -2.0 * frob * dh / (9.0 * h23 * hs);
                for i in 0..3 {
                    let ds = cross(e[(i + 1) % 3], e[(i + 2) % 3]);
                    let n = CORNER_NEIGHBOURS[k][i];
                    for a in 0..3 {
                        let d = coef_f * e[i][a] + coef_s * ds[a];
                        g[n][a] += d;
                        g[k][a] -= d;
                    }
                }
            }
            (energy, g)
        })
        .collect();
    let energy = terms.iter().map(|t| t.0).sum();
    let per_hex: Vec<[Point; 8]> = terms.into_iter().map(|t| t.1).collect();
    (energy, scatter(c, points.len(), &per_hex))
}

fn true_min(c: &HexComplex, points: &[Point]) -> Option<f64> {
    let mut m = f64::INFINITY;
    for h in 0..c.len() {
        let pts = hex_points(c, points, h);
        for k in 0..8 {
            m = m.min(corner_value(&pts, k)?);
        }
    }
    Some(m)
}

const LBFGS_MEMORY: usize = 8;

fn vdot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Two-loop recursion: approximate `-H g`.
fn lbfgs_direction(g: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q = g.to_vec();
    let mut alpha = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * vdot(s, &q);
        q.iter_mut().zip(y).for_each(|(qi, yi)| *qi -= a * yi);
        alpha.push(a);
    }
    if let Some((s, y, _)) = memory.back() {
        let gamma = vdot(s, y) / vdot(y, y);
        q.iter_mut().for_each(|qi| *qi *= gamma);
    }
    for ((s, y, rho), a) in memory.iter().zip(alpha.into_iter().rev()) {
        let b = rho * vdot(y, &q);
        q.iter_mut().zip(s).for_each(|(qi, si)| *qi += (a - b) * si);
    }
    q.iter().map(|x| -x).collect()
}

enum PhaseEnd {
    /// The step callback asked to stop.
    Stopped,
    /// Energy progress fell below tolerance.
    Flat,
    /// No descent step from the current point.
    Stuck,
    Budget,
}

/// L-BFGS over the free vertices. `on_step` sees every accepted point and
/// returns true to stop. Returns the final points and the steps taken.
fn lbfgs<E, S>(
    points: Vec<Point>,
    free: &[usize],
    energy_fn: E,
    budget: usize,
    params: &OptimizeParams,
    mut on_step: S,
) -> (Vec<Point>, usize, PhaseEnd)
where
    E: Fn(&[Point]) -> Option<(f64, Vec<Point>)>,
    S: FnMut(&[Point]) -> bool,
{
    let flat = |g: &[Point]| -> Vec<f64> { free.iter().flat_map(|&v| g[v]).collect() };
    let Some((mut energy, grad)) = energy_fn(&points) else {
        return (points, 0, PhaseEnd::Stuck);
    };
    let mut points = points;
    let mut x = flat(&points);
    let mut gx = flat(&grad);
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::new();
    let mut history = vec![energy];
    let mut steps = 0;
    while steps < budget {
        let mut d = lbfgs_direction(&gx, &memory);
        let mut slope = vdot(&d, &gx);
        if slope >= 0.0 {
            memory.clear();
            d = gx.iter().map(|g| -g).collect();
            slope = -vdot(&gx, &gx);
        }
        if slope == 0.0 || !slope.is_finite() {
            return (points, steps, PhaseEnd::Stuck);
        }
        let mut step = if memory.is_empty() { 1e-2 / vdot(&d, &d).sqrt().max(1e-2) } else { 1.0 };
        let mut accepted = None;
        while step > 1e-14 {
            let xt: Vec<f64> = x.iter().zip(&d).map(|(xi, di)| xi + step * di).collect();
            let mut trial = points.clone();
            for (i, &v) in free.iter().enumerate() {
                trial[v] = [xt[3 * i], xt[3 * i + 1], xt[3 * i + 2]];
            }
            if let Some((e, g)) = energy_fn(&trial) {
                if e <= energy + 1e-4 * step * slope {
                    accepted = Some((xt, trial, e, g));
                    break;
                }
            }
            step /= 2.0;
        }
        let Some((xt, trial, e, g)) = accepted else {
            if memory.is_empty() {
                return (points, steps, PhaseEnd::Stuck);
            }
            memory.clear();
            continue;
        };
        steps += 1;
        let gt = flat(&g);
        let s: Vec<f64> = xt.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gt.iter().zip(&gx).map(|(a, b)| a - b).collect();
        let sy = vdot(&s, &y);
        if sy > 1e-12 * vdot(&y, &y).sqrt() * vdot(&s, &s).sqrt() {
            if memory.len() == LBFGS_MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        x = xt;
        gx = gt;
        points = trial;
        energy = e;
        if on_step(&points) {
            return (points, steps, PhaseEnd::Stopped);
        }
        history.push(energy);
        if history.len() > params.window {
            let old = history[history.len() - 1 - params.window];
            if old - energy < params.tolerance * old.abs().max(1.0) {
                return (points, steps, PhaseEnd::Flat);
            }
        }
    }
    (points, steps, PhaseEnd::Budget)
}

/// Moves every vertex not in `fixed` to raise the minimum scaled Jacobian.
pub fn optimize_embedding(
    c: &HexComplex,
    start: &Embedding,
    fixed: &PartialEmbedding,
    params: &OptimizeParams,
) -> Result<OptimizeResult, GeometryError> {
    let mut points: Vec<Point> = start.points().to_vec();
    if points.len() < c.vertex_count() {
        return Err(GeometryError::MissingCoordinates(points.len() as u32));
    }
    for (&v, &p) in fixed {
        if let Some(slot) = points.get_mut(v as usize) {
            *slot = p;
        }
    }
    let free: Vec<usize> = (0..c.vertex_count()).filter(|v| !fixed.contains_key(&(*v as u32))).collect();

    let Some(start_min) = true_min(c, &points) else {
        let hex = (0..c.len()).find(|&h| hex_terms(&hex_points(c, &points, h)).is_none()).unwrap_or(0);
        let pts = hex_points(c, &points, hex);
        let corner = (0..8).find(|&k| corner_value(&pts, k).is_none()).unwrap_or(0);
        return Err(GeometryError::DegenerateEdge { hex, corner });
    };
    let target_met = |m: f64| params.target_min.is_some_and(|t| m >= t);
    if free.is_empty() || target_met(start_min) {
        let status = if free.is_empty() { OptimizeStatus::NonImprovable } else { OptimizeStatus::Converged };
        return Ok(OptimizeResult { embedding: Embedding::new(points), min_scaled_jacobian: start_min, iterations: 0, status });
    }

    let mut best = (start_min, points.clone());
    let mut used = 0;
    let record = |p: &[Point], best: &mut (f64, Vec<Point>)| {
        if let Some(m) = true_min(c, p) {
            if m > best.0 {
                *best = (m, p.to_vec());
            }
        }
    };

    // Untangling rounds. The regulariser shrinks as the worst corner
    // recovers, following sigma_min.
    let mut stuck_rounds = 0;
    while best.0 <= 0.0 && used < params.max_iterations && stuck_rounds < 3 {
        let dets = corner_determinants(c, &points);
        let scale = dets.iter().map(|d| d.abs()).sum::<f64>() / dets.len() as f64;
        let eps = 1e-3 * scale.max(f64::MIN_POSITIVE);
        let sigma_min = dets.iter().copied().fold(f64::INFINITY, f64::min);
        let delta = if sigma_min < eps { (eps * (eps - sigma_min)).sqrt() } else { 0.0 };
        let round_budget = (params.max_iterations - used).min(200);
        let (p, steps, end) = lbfgs(
            points,
            &free,
            |p| {
                let (e, g) = untangle_energy(c, &Embedding::new(p.to_vec()), delta);
                e.is_finite().then_some((e, g))
            },
            round_budget,
            params,
            |p| {
                record(p, &mut best);
                best.0 > 0.0
            },
        );
        points = p;
        used += steps;
        match end {
            PhaseEnd::Stuck | PhaseEnd::Flat if steps == 0 => stuck_rounds += 1,
            _ => stuck_rounds = 0,
        }
    }
    if target_met(best.0) {
        return Ok(finish(best, used, OptimizeStatus::Converged));
    }

    // Quality phase from the best point so far.
    let beta = params.beta;
    let (_, steps, end) = lbfgs(
        best.1.clone(),
        &free,
        |p| softmin_energy(c, &Embedding::new(p.to_vec()), beta),
        params.max_iterations - used,
        params,
        |p| {
            record(p, &mut best);
            target_met(best.0)
        },
    );
    used += steps;
    let status = match end {
        PhaseEnd::Stopped | PhaseEnd::Flat => OptimizeStatus::Converged,
        PhaseEnd::Budget => OptimizeStatus::MaxIterations,
        PhaseEnd::Stuck if used == 0 => OptimizeStatus::NonImprovable,
        PhaseEnd::Stuck => OptimizeStatus::Converged,
    };
    Ok(finish(best, used, status))
}

fn finish(best: (f64, Vec<Point>), iterations: usize, status: OptimizeStatus) -> OptimizeResult {
    let status = match status {
        OptimizeStatus::Converged if best.0 <= 0.0 => OptimizeStatus::Stalled,
        s => s,
    };
    OptimizeResult { embedding: Embedding::new(best.1), min_scaled_jacobian: best.0, iterations, status }
}
