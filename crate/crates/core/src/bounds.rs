//! Largest total variance `Σ_k (ΔM_k)²` of collective observables over
//! `d × d` pure states of bounded Schmidt rank.
//!
//! Values are reported in variance units; the QFI-unit bound is four times
//! larger. The optimizer is a local ascent, so every reported value is a
//! lower bound on the true maximum.

use itertools::Itertools;
use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{self, c, CMatrix, CVector};
use crate::random;
use crate::spin;
use crate::states::PureState;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimConfig {
    pub restarts: usize,
    pub max_iters: usize,
    /// Stop once accepted steps improve the objective by less than this.
    pub tol: f64,
    pub seed: u64,
    /// Restrict Schmidt vectors to computational basis states.
    pub aligned_only: bool,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self { restarts: 32, max_iters: 4000, tol: 1e-13, seed: 0x5eed, aligned_only: false }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.restarts == 0 {
            return Err(Error::InvalidArgument("restarts must be at least 1".into()));
        }
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidArgument(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidArgument("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Component {
    X,
    Y,
    Z,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    fn factor(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

/// Collective spin observables `J_k^± = j_k ⊗ 𝟙 ± 𝟙 ⊗ j_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpinTriple {
    pub j: f64,
    pub sign: Sign,
    pub components: Vec<Component>,
}

impl SpinTriple {
    pub fn new(j: f64, sign: Sign, components: Vec<Component>) -> Result<Self> {
        spin::spin_dimension(j)?;
        if components.is_empty() {
            return Err(Error::InvalidArgument("at least one spin component is required".into()));
        }
        if components.iter().duplicates().next().is_some() {
            return Err(Error::InvalidArgument("duplicate spin component".into()));
        }
        Ok(Self { j, sign, components })
    }

    pub fn dim(&self) -> usize {
        spin::spin_dimension(self.j).expect("validated on construction")
    }

    pub fn operators(&self) -> Vec<CMatrix> {
        let (x, y, z) = spin::spin_operators(self.j).expect("validated on construction");
        let d = x.nrows();
        let id = linalg::identity(d);
        self.components
            .iter()
            .map(|comp| {
                let o = match comp {
                    Component::X => &x,
                    Component::Y => &y,
                    Component::Z => &z,
                };
                linalg::kron(o, &id) + linalg::kron(&id, o).scale(self.sign.factor())
            })
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct BoundResult {
    pub r: usize,
    /// Best `Σ_k (ΔM_k)²` found.
    pub variance_sum: f64,
    /// `4 × variance_sum`.
    pub qfi_bound: f64,
    pub argmax: PureState,
    /// Whether the best restart stopped on the tolerance rather than the iteration cap.
    pub converged: bool,
}

/// `Σ_k (μ_max − μ_min)²/4`, the unconstrained ceiling on the total variance.
pub fn variance_ceiling(ops: &[CMatrix]) -> f64 {
    ops.iter()
        .map(|m| {
            let (lo, hi) = linalg::spectral_extremes(m);
            (hi - lo).powi(2) / 4.0
        })
        .sum()
}

/// Total variance of `ops` on `ψ`.
pub fn total_variance(psi: &CVector, ops: &[CMatrix]) -> f64 {
    ops.iter()
        .map(|m| {
            let mv = m * psi;
            let mean = psi.dotc(&mv).re;
            mv.norm_squared() - mean * mean
        })
        .sum()
}

fn check_problem(ops: &[CMatrix], r: usize, d: usize) -> Result<()> {
    if d == 0 {
        return Err(Error::InvalidDimension("d = 0".into()));
    }
    if r == 0 || r > d {
        return Err(Error::InvalidRank { rank: r, dim: d });
    }
    if ops.is_empty() {
        return Err(Error::InvalidArgument("no observables given".into()));
    }
    for m in ops {
        linalg::ensure_hermitian(m, 1e-10)?;
        if m.nrows() != d * d {
            return Err(Error::InvalidArgument(format!("observable of dimension {} for a {d}x{d} system", m.nrows())));
        }
    }
    Ok(())
}

/// Best value for every `r = 1..=r_max`, each level seeded with the previous optimum.
pub fn bound_table(ops: &[CMatrix], d: usize, r_max: usize, cfg: &OptimConfig) -> Result<Vec<BoundResult>> {
    check_problem(ops, r_max, d)?;
    cfg.validate()?;
    if cfg.aligned_only {
        return aligned_table(ops, d, r_max, cfg);
    }
    let mut table: Vec<BoundResult> = Vec::with_capacity(r_max);
    let mut previous: Option<Point> = None;
    for r in 1..=r_max {
        let runs: Vec<(f64, bool, Point)> = (0..cfg.restarts)
            .into_par_iter()
            .map(|restart| {
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(((r as u64) << 32) | restart as u64);
                let start = match (&previous, restart) {
                    (Some(p), 0) => p.extended(&mut rng),
                    _ => Point::random(d, r, &mut rng),
                };
                ascend(ops, d, start, cfg)
            })
            .collect();
        let (best_value, converged, best_point) = runs
            .into_iter()
            .reduce(|a, b| if b.0 > a.0 { b } else { a })
            .expect("restarts ≥ 1");
        let (value, converged, point) = match (&previous, table.last()) {
            (Some(p), Some(last)) if last.variance_sum > best_value => (last.variance_sum, last.converged, p.extended_zero()),
            _ => (best_value, converged, best_point),
        };
        let argmax = PureState::normalized(point.psi(), vec![d, d])?;
        table.push(BoundResult { r, variance_sum: value, qfi_bound: 4.0 * value, argmax, converged });
        previous = Some(point);
    }
    Ok(table)
}

/// Best value at Schmidt rank `r`.
pub fn bound_br(ops: &[CMatrix], r: usize, d: usize, cfg: &OptimConfig) -> Result<BoundResult> {
    Ok(bound_table(ops, d, r, cfg)?.pop().expect("r ≥ 1"))
}

pub fn spin_bound_table(triple: &SpinTriple, r_max: usize, cfg: &OptimConfig) -> Result<Vec<BoundResult>> {
    bound_table(&triple.operators(), triple.dim(), r_max, cfg)
}

/// `ψ = vec(U diag(s) Vᵀ)` with isometries `U, V` and `s ≥ 0`, `‖s‖ = 1`.
#[derive(Debug, Clone)]
struct Point {
    u: CMatrix,
    v: CMatrix,
    s: DVector<f64>,
}

impl Point {
    fn random(d: usize, r: usize, rng: &mut ChaCha8Rng) -> Self {
        let u = random::haar_unitary(d, rng).columns(0, r).into_owned();
        let v = random::haar_unitary(d, rng).columns(0, r).into_owned();
        let s = DVector::from_iterator(r, random::random_simplex(r, rng).into_iter().map(f64::sqrt));
        Self { u, v, s }
    }

    /// One more Schmidt term with zero weight; the new columns are random and orthogonal.
    fn extended(&self, rng: &mut ChaCha8Rng) -> Self {
        let d = self.u.nrows();
        let fresh = |m: &CMatrix, rng: &mut ChaCha8Rng| -> CMatrix {
            let cand = random::haar_unitary(d, rng).column(0).into_owned();
            let proj = &cand - m * (m.adjoint() * &cand);
            let col = if proj.norm() > 1e-8 { proj.normalize() } else { orthogonal_complement_vector(m) };
            let mut out = CMatrix::zeros(d, m.ncols() + 1);
            out.columns_mut(0, m.ncols()).copy_from(m);
            out.set_column(m.ncols(), &col);
            out
        };
        let u = fresh(&self.u, rng);
        let v = fresh(&self.v, rng);
        let mut s = DVector::zeros(self.s.len() + 1);
        s.rows_mut(0, self.s.len()).copy_from(&self.s);
        Self { u, v, s }
    }

    /// Same state embedded at one rank higher, deterministic.
    fn extended_zero(&self) -> Self {
        let col_u = orthogonal_complement_vector(&self.u);
        let col_v = orthogonal_complement_vector(&self.v);
        let (d, r) = self.u.shape();
        let mut u = CMatrix::zeros(d, r + 1);
        u.columns_mut(0, r).copy_from(&self.u);
        u.set_column(r, &col_u);
        let mut v = CMatrix::zeros(d, r + 1);
        v.columns_mut(0, r).copy_from(&self.v);
        v.set_column(r, &col_v);
        let mut s = DVector::zeros(r + 1);
        s.rows_mut(0, r).copy_from(&self.s);
        Self { u, v, s }
    }

    fn psi(&self) -> CVector {
        let d = self.u.nrows();
        let us = CMatrix::from_fn(d, self.s.len(), |i, k| self.u[(i, k)] * self.s[k]);
        let p = us * self.v.transpose();
        CVector::from_fn(d * d, |idx, _| p[(idx / d, idx % d)])
    }
}

fn orthogonal_complement_vector(m: &CMatrix) -> CVector {
    let d = m.nrows();
    (0..d)
        .map(|k| {
            let mut e = CVector::zeros(d);
            e[k] = c(1.0, 0.0);
            &e - m * (m.adjoint() * &e)
        })
        .max_by(|a, b| a.norm().total_cmp(&b.norm()))
        .expect("d ≥ 1")
        .normalize()
}

/// Objective and Wirtinger gradient `Σ_k (M_k² ψ − 2⟨M_k⟩ M_k ψ)` reshaped to `d × d`.
fn value_and_gradient(ops: &[CMatrix], d: usize, psi: &CVector) -> (f64, CMatrix) {
    let mut value = 0.0;
    let mut g = CVector::zeros(psi.len());
    for m in ops {
        let mv = m * psi;
        let mean = psi.dotc(&mv).re;
        value += mv.norm_squared() - mean * mean;
        let mmv = m * &mv;
        g += mmv - mv.scale(2.0 * mean);
    }
    (value, CMatrix::from_fn(d, d, |i, j| g[i * d + j]))
}

fn value_at(ops: &[CMatrix], p: &Point) -> f64 {
    total_variance(&p.psi(), ops)
}

fn ascend(ops: &[CMatrix], d: usize, mut point: Point, cfg: &OptimConfig) -> (f64, bool, Point) {
    let mut eta = 0.05;
    let mut stalls = 0;
    let (mut value, mut grad) = value_and_gradient(ops, d, &point.psi());
    for _ in 0..cfg.max_iters {
        let s_mat = CMatrix::from_diagonal(&point.s.map(|x| c(x, 0.0)));
        let gu = (&grad * point.v.map(|z| z.conj()) * &s_mat).scale(2.0);
        let gv = (grad.transpose() * point.u.map(|z| z.conj()) * &s_mat).scale(2.0);
        let gs_raw = DVector::from_fn(point.s.len(), |k, _| {
            let uk = point.u.column(k);
            let vk = point.v.column(k).map(|z| z.conj());
            2.0 * uk.dotc(&(&grad * vk)).re
        });
        let gs = &gs_raw - point.s.scale(point.s.dot(&gs_raw));

        let mut accepted = false;
        while eta > 1e-14 {
            let cand = retract(&point, &gu, &gv, &gs, eta);
            let cand = match cand {
                Some(c) => c,
                None => {
                    eta *= 0.5;
                    continue;
                }
            };
            let cand_value = value_at(ops, &cand);
            if cand_value > value {
                let gain = cand_value - value;
                point = cand;
                let (v, g) = value_and_gradient(ops, d, &point.psi());
                value = v;
                grad = g;
                eta *= 1.5;
                accepted = true;
                if gain < cfg.tol * (1.0 + value.abs()) {
                    stalls += 1;
                } else {
                    stalls = 0;
                }
                break;
            }
            eta *= 0.5;
        }
        if !accepted || stalls >= 25 {
            return (value, true, point);
        }
    }
    (value, false, point)
}

fn retract(p: &Point, gu: &CMatrix, gv: &CMatrix, gs: &DVector<f64>, eta: f64) -> Option<Point> {
    let u = linalg::polar_isometry(&(&p.u + gu.scale(eta))).ok()?;
    let v = linalg::polar_isometry(&(&p.v + gv.scale(eta))).ok()?;
    let s = (&p.s + gs.scale(eta)).map(|x| x.max(0.0));
    let n = s.norm();
    if n < 1e-12 {
        return None;
    }
    Some(Point { u, v, s: s.unscale(n) })
}

/// Pairings of computational levels used by the aligned ansatz.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Pairing {
    Identity,
    Reversed,
}

impl Pairing {
    fn partner(self, k: usize, d: usize) -> usize {
        match self {
            Pairing::Identity => k,
            Pairing::Reversed => d - 1 - k,
        }
    }
}

/// Best aligned value at support size `r`: Schmidt vectors `|k⟩|π(k)⟩` with
/// `π` the identity or the reversal and arbitrary complex amplitudes.
fn aligned_max(ops: &[CMatrix], d: usize, r: usize, seed: u64) -> (f64, CVector) {
    let squares: Vec<CMatrix> = ops.iter().map(|m| m * m).collect();
    let mut best = (f64::NEG_INFINITY, CVector::zeros(d * d));
    for pairing in [Pairing::Identity, Pairing::Reversed] {
        for (subset_index, subset) in (0..d).combinations(r).enumerate() {
            let idx: Vec<usize> = subset.iter().map(|&k| k * d + pairing.partner(k, d)).collect();
            let restrict = |m: &CMatrix| CMatrix::from_fn(r, r, |a, b| m[(idx[a], idx[b])]);
            let a: Vec<CMatrix> = squares.iter().map(restrict).collect();
            let b: Vec<CMatrix> = ops.iter().map(restrict).collect();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(((pairing as u64) << 40) | subset_index as u64);
            for start in 0..6 {
                let x0 = match start {
                    0 => CVector::from_element(r, c(1.0, 0.0)),
                    1 => CVector::from_fn(r, |k, _| c(if k % 2 == 0 { 1.0 } else { -1.0 }, 0.0)),
                    _ => random::haar_unitary(r, &mut rng).column(0).into_owned(),
                }
                .normalize();
                let (val, x) = ascend_sphere(&a, &b, x0);
                if val > best.0 + 1e-12 {
                    let mut psi = CVector::zeros(d * d);
                    for (k, &i) in idx.iter().enumerate() {
                        psi[i] = x[k];
                    }
                    best = (val, psi);
                }
            }
        }
    }
    best
}

fn sphere_value(a: &[CMatrix], b: &[CMatrix], x: &CVector) -> f64 {
    a.iter()
        .zip(b)
        .map(|(ak, bk)| x.dotc(&(ak * x)).re - x.dotc(&(bk * x)).re.powi(2))
        .sum()
}

fn ascend_sphere(a: &[CMatrix], b: &[CMatrix], mut x: CVector) -> (f64, CVector) {
    let mut value = sphere_value(a, b, &x);
    let mut eta = 0.1;
    let mut stalls = 0;
    for _ in 0..20_000 {
        let mut g = CVector::zeros(x.len());
        for (ak, bk) in a.iter().zip(b) {
            let bx = bk * &x;
            let mean = x.dotc(&bx).re;
            g += ak * &x - bx.scale(2.0 * mean);
        }
        let radial = x.dotc(&g);
        let g = &g - &x * radial;
        if g.norm() < 1e-13 {
            break;
        }
        let mut accepted = false;
        while eta > 1e-14 {
            let cand = (&x + g.scale(eta)).normalize();
            let v = sphere_value(a, b, &cand);
            if v > value {
                stalls = if v - value < 1e-15 * (1.0 + value.abs()) { stalls + 1 } else { 0 };
                x = cand;
                value = v;
                eta *= 1.5;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if !accepted || stalls >= 25 {
            break;
        }
    }
    (value, x)
}

fn aligned_table(ops: &[CMatrix], d: usize, r_max: usize, cfg: &OptimConfig) -> Result<Vec<BoundResult>> {
    let levels: Vec<(f64, CVector)> = (1..=r_max).into_par_iter().map(|r| aligned_max(ops, d, r, cfg.seed)).collect();
    let mut table: Vec<BoundResult> = Vec::with_capacity(r_max);
    for (i, (value, psi)) in levels.into_iter().enumerate() {
        let (value, psi) = match table.last() {
            Some(last) if last.variance_sum > value => (last.variance_sum, last.argmax.amplitudes().clone()),
            _ => (value, psi),
        };
        let argmax = PureState::normalized(psi, vec![d, d])?;
        table.push(BoundResult { r: i + 1, variance_sum: value, qfi_bound: 4.0 * value, argmax, converged: true });
    }
    Ok(table)
}

/// Aligned-ansatz maximum for collective spin observables, variance units.
pub fn spin_bound_aligned(j: f64, r: usize, components: &[Component], sign: Sign) -> Result<f64> {
    let triple = SpinTriple::new(j, sign, components.to_vec())?;
    let d = triple.dim();
    let ops = triple.operators();
    check_problem(&ops, r, d)?;
    Ok(aligned_max(&ops, d, r, OptimConfig::default().seed).0)
}

/// Closed form of the Schmidt-rank-2 maximum of `(ΔJ_x)² + (ΔJ_y)²`.
pub fn spin_bound_r2_analytic(j: f64) -> Result<f64> {
    let d = spin::spin_dimension(j)?;
    if d < 2 {
        return Err(Error::InvalidArgument("Schmidt rank 2 needs j ≥ 1/2".into()));
    }
    Ok(if (d - 1) % 2 == 0 {
        2.0 * j * j + 2.0 * j - 1.0 + (j.powi(4) + 2.0 * j.powi(3) + j * j + 1.0).sqrt()
    } else {
        -0.25 + 3.0 * j * (j + 1.0)
    })
}

/// `2j(2j + 1)`, the maximum of `(ΔJ_x)² + (ΔJ_y)²` over all states.
pub fn global_spin_bound(j: f64) -> Result<f64> {
    spin::spin_dimension(j)?;
    Ok(2.0 * j * (2.0 * j + 1.0))
}
