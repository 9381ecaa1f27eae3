//! Entanglement-dimensionality vectors of multipartite states.
//!
//! Every bipartition `j | j̄` gets the value
//! `h_j = tr|X_j|/4 − √((d_j − tr F_j/4)(d_j̄ − tr F_j̄/4))`, computed from the
//! QFIM over complete orthonormal operator bases of the two parties. A state
//! whose per-cut Schmidt numbers are bounded by `v` admits a mixture of rank
//! profiles `r⃗_k` (class-respecting permutations of `v`) with
//! `h_j ≤ Σ_k p_k ((r_j)_k − 2/(r_j)_k)` on every cut.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{self, BasisSet};
use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, RMatrix};
use crate::qfim;
use crate::states::{schmidt_decompose, Bipartition, DensityMatrix, PureState};

/// Largest particle count accepted by [`enumerate_bipartitions`].
pub const MAX_PARTICLES: usize = 12;
/// Largest total Hilbert-space dimension handled by the dense evaluation.
pub const DENSE_DIM_CAP: usize = 128;
/// Default cap on distinct rank profiles per size class for the LP route.
pub const PROFILE_CAP: u128 = 100_000;
/// Slack on `h_j` when testing the inequalities.
pub const H_TOL: f64 = 1e-8;

/// `r − 2/r`.
pub fn profile_value(r: usize) -> f64 {
    r as f64 - 2.0 / r as f64
}

/// All `2^(n−1) − 1` canonical cuts, ordered by index.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if !(2..=MAX_PARTICLES).contains(&n) {
        return Err(Error::UnsupportedSize(format!("bipartitions are enumerated for 2 ≤ n ≤ {MAX_PARTICLES}, got {n}")));
    }
    (1..(1usize << (n - 1))).map(|idx| Bipartition::from_index(n, idx)).collect()
}

/// Size classes `1..=n/2` with the cuts of each, in index order.
pub fn cuts_by_class(n: usize) -> Result<Vec<(usize, Vec<Bipartition>)>> {
    let mut classes: BTreeMap<usize, Vec<Bipartition>> = BTreeMap::new();
    for cut in enumerate_bipartitions(n)? {
        classes.entry(cut.size_class()).or_default().push(cut);
    }
    Ok(classes.into_iter().collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CutStatistics {
    pub cut: Bipartition,
    pub label: String,
    pub d_a: usize,
    pub d_b: usize,
    pub tr_fa: f64,
    pub tr_fb: f64,
    pub tr_norm_x: f64,
    pub h: f64,
}

fn h_from_traces(d_a: usize, d_b: usize, tr_fa: f64, tr_fb: f64, tr_norm_x: f64) -> f64 {
    let fa = (d_a as f64 - tr_fa / 4.0).max(0.0);
    let fb = (d_b as f64 - tr_fb / 4.0).max(0.0);
    tr_norm_x / 4.0 - (fa * fb).sqrt()
}

fn check_dense(rho: &DensityMatrix) -> Result<()> {
    if rho.num_particles() < 2 {
        return Err(Error::InvalidArgument("at least two particles are required".into()));
    }
    if rho.dim() > DENSE_DIM_CAP {
        return Err(Error::UnsupportedSize(format!(
            "state dimension {} exceeds the dense cap {DENSE_DIM_CAP}",
            rho.dim()
        )));
    }
    if rho.num_particles() > MAX_PARTICLES {
        return Err(Error::UnsupportedSize(format!("{} particles exceed the cap {MAX_PARTICLES}", rho.num_particles())));
    }
    Ok(())
}

/// `h_j` for every cut, index order.
///
/// Uses complete matrix-unit bases of each party. Any other complete
/// orthonormal Hermitian basis is related to it by an orthogonal matrix, which
/// leaves all traces and the trace norm unchanged.
pub fn h_vector(rho: &DensityMatrix) -> Result<Vec<CutStatistics>> {
    check_dense(rho)?;
    let cuts = enumerate_bipartitions(rho.num_particles())?;
    let (mut values, vectors) = linalg::eigh(rho.matrix());
    values.iter_mut().for_each(|v| *v = v.max(0.0));
    let eps = qfim::SUPPORT_CUTOFF * values.iter().sum::<f64>();
    let support: Vec<usize> = (0..values.len()).filter(|&l| values[l] > eps / 2.0).collect();
    let mut pairs = Vec::new();
    for &m in &support {
        for l in 0..values.len() {
            let (a, b) = (values[l], values[m]);
            if a + b <= eps {
                continue;
            }
            let w = 2.0 * (a - b).powi(2) / (a + b);
            let factor = if values[l] > eps / 2.0 { 1.0 } else { 2.0 };
            if w > 0.0 {
                pairs.push((l, m, (factor * w).sqrt()));
            }
        }
    }
    let dims = rho.dims().to_vec();
    cuts.par_iter().map(|cut| implicit_cut(&dims, &vectors, &pairs, cut)).collect()
}

const PAIR_CHUNK: usize = 512;

fn implicit_cut(dims: &[usize], vectors: &CMatrix, pairs: &[(usize, usize, f64)], cut: &Bipartition) -> Result<CutStatistics> {
    let (da, db) = cut.party_dims(dims);
    let map = linalg::permutation_map(dims, &cut.ordering());
    let n = vectors.nrows();
    let reshaped: Vec<CMatrix> = (0..n)
        .map(|l| {
            let mut m = CMatrix::zeros(da, db);
            for (old, &new) in map.iter().enumerate() {
                m[(new / db, new % db)] = vectors[(old, l)];
            }
            m
        })
        .collect();
    let (na, nb) = (da * da, db * db);
    let mut x = RMatrix::zeros(na, nb);
    let mut tr_fa = 0.0;
    let mut tr_fb = 0.0;
    for chunk in pairs.chunks(PAIR_CHUNK) {
        let rows = chunk.len();
        let mut a_re = RMatrix::zeros(rows, na);
        let mut a_im = RMatrix::zeros(rows, na);
        let mut b_re = RMatrix::zeros(rows, nb);
        let mut b_im = RMatrix::zeros(rows, nb);
        for (p, &(l, m, w)) in chunk.iter().enumerate() {
            let (vl, vm) = (&reshaped[l], &reshaped[m]);
            // ⟨l| A ⊗ 𝟙 |m⟩ = tr(A V_m V_l†)  and  ⟨m| 𝟙 ⊗ B |l⟩ = tr(B V_lᵀ V_m*)
            let r = vm * vl.adjoint();
            let s = vl.transpose() * vm.map(|z| z.conj());
            tr_fa += w * w * r.norm_squared();
            tr_fb += w * w * s.norm_squared();
            write_unit_coordinates(&r, w, p, &mut a_re, &mut a_im);
            write_unit_coordinates(&s, w, p, &mut b_re, &mut b_im);
        }
        x += a_re.transpose() * b_re - a_im.transpose() * b_im;
    }
    let tr_norm_x = qfim::trace_norm(&x);
    Ok(CutStatistics {
        label: cut.to_string(),
        cut: cut.clone(),
        d_a: da,
        d_b: db,
        tr_fa,
        tr_fb,
        tr_norm_x,
        h: h_from_traces(da, db, tr_fa, tr_fb, tr_norm_x),
    })
}

/// Coordinates `tr(g R)` in the matrix-unit basis, scaled by `w`, into row `row`.
fn write_unit_coordinates(r: &CMatrix, w: f64, row: usize, re: &mut RMatrix, im: &mut RMatrix) {
    let d = r.nrows();
    let s = w * std::f64::consts::FRAC_1_SQRT_2;
    let mut col = 0;
    for k in 0..d {
        let z = r[(k, k)] * w;
        re[(row, col)] = z.re;
        im[(row, col)] = z.im;
        col += 1;
    }
    for k in 0..d {
        for l in k + 1..d {
            let (rkl, rlk) = (r[(k, l)], r[(l, k)]);
            let sym = (rlk + rkl) * s;
            // (−i R_lk + i R_kl)/√2
            let anti = (rkl - rlk) * crate::linalg::I * s;
            re[(row, col)] = sym.re;
            im[(row, col)] = sym.im;
            re[(row, col + 1)] = anti.re;
            im[(row, col + 1)] = anti.im;
            col += 2;
        }
    }
}

/// `h_j` with party bases built as tensor products of the given single-particle bases.
///
/// Each basis is completed with `𝟙/√d` when it is traceless, so the party
/// bases are complete. Dense and slow; intended as a reference.
pub fn h_vector_with_bases(rho: &DensityMatrix, bases: &[BasisSet]) -> Result<Vec<CutStatistics>> {
    check_dense(rho)?;
    let dims = rho.dims();
    if bases.len() != dims.len() || bases.iter().zip(dims).any(|(b, &d)| b.dim() != d) {
        return Err(Error::InvalidArgument("one basis per particle with matching dimension is required".into()));
    }
    let completed: Vec<BasisSet> = bases.iter().map(basis::complete).collect::<Result<_>>()?;
    if completed.iter().any(|b| !b.is_complete()) {
        return Err(Error::InvalidArgument("single-particle bases must span all operators once completed".into()));
    }
    enumerate_bipartitions(rho.num_particles())?
        .par_iter()
        .map(|cut| {
            let party = |p: &[usize]| -> Result<BasisSet> {
                let refs: Vec<&BasisSet> = p.iter().map(|&i| &completed[i]).collect();
                basis::tensor_product_basis(&refs)
            };
            let ba = party(cut.party_a())?;
            let bb = party(cut.party_b())?;
            let (da, db) = cut.party_dims(dims);
            let permuted = linalg::permute_operator(rho.matrix(), dims, &cut.ordering());
            let bip = DensityMatrix::new(permuted, vec![da, db])?;
            let blocks = qfim::qfim_blocks(&bip, &ba, &bb)?;
            let (tr_fa, tr_fb, tr_norm_x) = (blocks.tr_fa(), blocks.tr_fb(), blocks.trace_norm_x());
            Ok(CutStatistics {
                label: cut.to_string(),
                cut: cut.clone(),
                d_a: da,
                d_b: db,
                tr_fa,
                tr_fb,
                tr_norm_x,
                h: h_from_traces(da, db, tr_fa, tr_fb, tr_norm_x),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Feasibility {
    Feasible,
    Infeasible,
    Undecided,
}

/// A candidate dimensionality vector, grouped by size class and sorted
/// non-increasingly within each class.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimVectorCandidate {
    pub n: usize,
    /// `(size class, values)` for classes `1..=n/2`.
    pub classes: Vec<(usize, Vec<usize>)>,
    pub feasible: Feasibility,
    /// Per-cut values when known (pure states), index order.
    pub assignment: Option<Vec<(Bipartition, usize)>>,
}

impl DimVectorCandidate {
    /// Validates the class sizes and the per-cut ranges for local dimensions `dims`.
    pub fn new(dims: &[usize], classes: Vec<Vec<usize>>) -> Result<Self> {
        let n = dims.len();
        let expected = cuts_by_class(n).map_err(|e| Error::InvalidVector(e.to_string()))?;
        if classes.len() != expected.len() {
            return Err(Error::InvalidVector(format!(
                "{} size classes given, {n} particles have {}",
                classes.len(),
                expected.len()
            )));
        }
        let mut grouped = Vec::with_capacity(classes.len());
        for ((size, cuts), mut values) in expected.into_iter().zip(classes) {
            if values.len() != cuts.len() {
                return Err(Error::InvalidVector(format!(
                    "size class {size} needs {} entries, got {}",
                    cuts.len(),
                    values.len()
                )));
            }
            let cap = cuts
                .iter()
                .map(|c| {
                    let (a, b) = c.party_dims(dims);
                    a.min(b)
                })
                .max()
                .unwrap_or(1);
            if let Some(&bad) = values.iter().find(|&&v| v == 0 || v > cap) {
                return Err(Error::InvalidVector(format!("entry {bad} in size class {size} is outside 1..={cap}")));
            }
            values.sort_unstable_by(|a, b| b.cmp(a));
            grouped.push((size, values));
        }
        Ok(Self { n, classes: grouped, feasible: Feasibility::Undecided, assignment: None })
    }

    pub fn len(&self) -> usize {
        self.classes.iter().map(|(_, v)| v.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Class-grouped flat vector.
    pub fn flat(&self) -> Vec<usize> {
        self.classes.iter().flat_map(|(_, v)| v.iter().copied()).collect()
    }

    /// Compact text form, e.g. `2x6,1;4x8,2x12,1`.
    pub fn compact(&self) -> String {
        self.classes
            .iter()
            .map(|(_, values)| {
                let mut parts = Vec::new();
                let mut i = 0;
                while i < values.len() {
                    let run = values[i..].iter().take_while(|&&v| v == values[i]).count();
                    parts.push(if run == 1 { values[i].to_string() } else { format!("{}x{}", values[i], run) });
                    i += run;
                }
                parts.join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }
}

/// Parses `a,b,c;…` where entries may carry a multiplicity as `vxk`.
pub fn parse_vector_spec(spec: &str) -> Result<Vec<Vec<usize>>> {
    spec.split(';')
        .map(|class| {
            let mut values = Vec::new();
            for token in class.split(',').map(str::trim).filter(|t| !t.is_empty()) {
                let (value, count) = match token.split_once(['x', '*']) {
                    Some((v, k)) => (v.trim(), k.trim()),
                    None => (token, "1"),
                };
                let value: usize = value
                    .parse()
                    .map_err(|_| Error::InvalidVector(format!("cannot parse entry '{token}'")))?;
                let count: usize = count
                    .parse()
                    .map_err(|_| Error::InvalidVector(format!("cannot parse multiplicity in '{token}'")))?;
                values.extend(std::iter::repeat_n(value, count));
            }
            Ok(values)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckOptions {
    pub profile_cap: u128,
    /// Past the cap, decide with the equivalent prefix-sum test instead of reporting undecided.
    pub exact_fallback: bool,
    pub tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self { profile_cap: PROFILE_CAP, exact_fallback: true, tol: H_TOL }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassMethod {
    /// Rejected by the per-cut bound with the class maximum.
    QuickReject,
    LinearProgram,
    PrefixSums,
    /// Profile count above the cap without fallback.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassOutcome {
    pub class: usize,
    pub method: ClassMethod,
    pub profiles: u128,
    pub feasible: Option<bool>,
}

/// A violated subset of inequalities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub class: usize,
    pub cuts: Vec<String>,
    pub h_sum: f64,
    pub bound_sum: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimVectorVerdict {
    pub candidate: DimVectorCandidate,
    pub feasibility: Feasibility,
    pub classes: Vec<ClassOutcome>,
    pub violations: Vec<Violation>,
    pub cut_statistics: Vec<CutStatistics>,
}

/// Number of distinct orderings of a multiset.
fn distinct_permutations(values: &[usize]) -> u128 {
    let mut counts: BTreeMap<usize, u128> = BTreeMap::new();
    values.iter().for_each(|&v| *counts.entry(v).or_default() += 1);
    let mut total: u128 = 1;
    let mut placed: u128 = 0;
    for &k in counts.values() {
        // multiply by C(placed + k, k) incrementally
        for i in 1..=k {
            placed += 1;
            total = match total.checked_mul(placed) {
                Some(t) => t / i,
                None => return u128::MAX,
            };
        }
    }
    total
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Feasibility of `h ≤ Σ_π p_π f(v_π)` over distinct permutations `π`.
fn class_lp(h: &[f64], values: &[usize], tol: f64) -> Result<bool> {
    use microlp::{ComparisonOp, OptimizationDirection, Problem};
    let mut profile: Vec<usize> = values.to_vec();
    profile.sort_unstable();
    let mut problem = Problem::new(OptimizationDirection::Minimize);
    let mut columns: Vec<(microlp::Variable, Vec<f64>)> = Vec::new();
    loop {
        let var = problem.add_var(0.0, (0.0, f64::INFINITY));
        columns.push((var, profile.iter().map(|&r| profile_value(r)).collect()));
        if !next_permutation(&mut profile) {
            break;
        }
    }
    let all: Vec<(microlp::Variable, f64)> = columns.iter().map(|(v, _)| (*v, 1.0)).collect();
    problem.add_constraint(&all, ComparisonOp::Eq, 1.0);
    for (i, &hi) in h.iter().enumerate() {
        let row: Vec<(microlp::Variable, f64)> = columns.iter().map(|(v, f)| (*v, f[i])).collect();
        problem.add_constraint(&row, ComparisonOp::Ge, hi - tol);
    }
    match problem.solve() {
        Ok(microlp::SolveOutcome::Solution(_)) => Ok(true),
        Ok(_) => Err(Error::Numerical("LP solve was interrupted".into())),
        Err(microlp::Error::Infeasible) => Ok(false),
        Err(e) => Err(Error::Numerical(format!("LP solver failed: {e}"))),
    }
}

/// Prefixes `k` where the `k` largest `h` exceed the `k` largest `f(v)`.
fn prefix_violations(h_sorted: &[(f64, String)], values: &[usize], tol: f64) -> Vec<(usize, f64, f64)> {
    let mut bound: Vec<f64> = values.iter().map(|&r| profile_value(r)).collect();
    bound.sort_by(|a, b| b.total_cmp(a));
    let mut out = Vec::new();
    let (mut sh, mut sb) = (0.0, 0.0);
    for k in 0..h_sorted.len() {
        sh += h_sorted[k].0;
        sb += bound[k];
        if sh > sb + tol * (k + 1) as f64 {
            out.push((k + 1, sh, sb));
        }
    }
    out
}

/// Decides whether `ρ` is compatible with the dimensionality vector `v`.
///
/// An infeasible verdict rules out `v` and every vector below it.
pub fn check_dim_vector(rho: &DensityMatrix, v: &DimVectorCandidate, opts: &CheckOptions) -> Result<DimVectorVerdict> {
    if v.n != rho.num_particles() {
        return Err(Error::InvalidVector(format!(
            "vector for {} particles, state has {}",
            v.n,
            rho.num_particles()
        )));
    }
    let stats = h_vector(rho)?;
    let mut classes = Vec::new();
    let mut violations = Vec::new();
    let mut overall = Feasibility::Feasible;
    for (size, values) in &v.classes {
        let members: Vec<&CutStatistics> = stats.iter().filter(|s| s.cut.size_class() == *size).collect();
        let top = profile_value(*values.iter().max().expect("class is nonempty"));
        let quick: Vec<&CutStatistics> = members.iter().copied().filter(|s| s.h > top + opts.tol).collect();
        let profiles = distinct_permutations(values);
        if !quick.is_empty() {
            violations.extend(quick.iter().map(|s| Violation {
                class: *size,
                cuts: vec![s.label.clone()],
                h_sum: s.h,
                bound_sum: top,
            }));
            classes.push(ClassOutcome { class: *size, method: ClassMethod::QuickReject, profiles, feasible: Some(false) });
            overall = Feasibility::Infeasible;
            continue;
        }
        let mut h_sorted: Vec<(f64, String)> = members.iter().map(|s| (s.h, s.label.clone())).collect();
        h_sorted.sort_by(|a, b| b.0.total_cmp(&a.0));
        let prefixes = prefix_violations(&h_sorted, values, opts.tol);
        let (method, feasible) = if profiles <= opts.profile_cap {
            let h: Vec<f64> = members.iter().map(|s| s.h).collect();
            (ClassMethod::LinearProgram, Some(class_lp(&h, values, opts.tol)?))
        } else if opts.exact_fallback {
            (ClassMethod::PrefixSums, Some(prefixes.is_empty()))
        } else {
            (ClassMethod::Skipped, None)
        };
        match feasible {
            Some(false) => {
                overall = Feasibility::Infeasible;
                if let Some(&(k, sh, sb)) = prefixes.first() {
                    violations.push(Violation {
                        class: *size,
                        cuts: h_sorted[..k].iter().map(|(_, l)| l.clone()).collect(),
                        h_sum: sh,
                        bound_sum: sb,
                    });
                }
            }
            None if overall == Feasibility::Feasible => overall = Feasibility::Undecided,
            _ => {}
        }
        classes.push(ClassOutcome { class: *size, method, profiles, feasible });
    }
    let mut candidate = v.clone();
    candidate.feasible = overall;
    Ok(DimVectorVerdict { candidate, feasibility: overall, classes, violations, cut_statistics: stats })
}

/// Exact per-cut Schmidt ranks of a pure state.
pub fn pure_state_dim_vector(psi: &PureState) -> Result<DimVectorCandidate> {
    let n = psi.num_particles();
    let cuts = enumerate_bipartitions(n)?;
    let assignment: Vec<(Bipartition, usize)> = cuts
        .into_par_iter()
        .map(|cut| schmidt_decompose(psi, &cut).map(|sd| (cut, sd.rank())))
        .collect::<Result<_>>()?;
    let mut by_class: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (cut, rank) in &assignment {
        by_class.entry(cut.size_class()).or_default().push(*rank);
    }
    let mut candidate = DimVectorCandidate::new(psi.dims(), by_class.into_values().collect())?;
    candidate.feasible = Feasibility::Feasible;
    candidate.assignment = Some(assignment);
    Ok(candidate)
}

/// Product structure read off the unit entries of a pure-state vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Structure {
    pub k_separability: usize,
    pub depth: usize,
    /// Zero-based particle indices of each party, ordered by first member.
    pub parties: Vec<Vec<usize>>,
}

impl fmt::Display for Structure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sep = if self.parties.iter().flatten().any(|&i| i >= 9) { "," } else { "" };
        let s: Vec<String> = self
            .parties
            .iter()
            .map(|p| p.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(sep))
            .collect();
        write!(f, "({})", s.join("|"))
    }
}

pub fn structure_from_vector(v: &DimVectorCandidate) -> Result<Structure> {
    let assignment = v
        .assignment
        .as_ref()
        .ok_or_else(|| Error::InvalidVector("vector carries no per-cut assignment".into()))?;
    let n = v.n;
    let unit: Vec<&Bipartition> = assignment.iter().filter(|(_, r)| *r == 1).map(|(c, _)| c).collect();
    // atoms: particles no unit cut separates
    let mut atom_of = vec![usize::MAX; n];
    let mut parties: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        if atom_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (i..n).filter(|&j| unit.iter().all(|c| c.same_side(i, j))).collect();
        for &j in &members {
            if atom_of[j] != usize::MAX {
                return Err(Error::InvalidVector("unit cuts do not induce a partition".into()));
            }
            atom_of[j] = parties.len();
        }
        parties.push(members);
    }
    // a cut has unit rank exactly when it never splits an atom
    for (cut, rank) in assignment {
        let splits = parties.iter().any(|p| p.iter().any(|&j| !cut.same_side(p[0], j)));
        if splits == (*rank == 1) {
            return Err(Error::InvalidVector(format!(
                "cut {cut} has value {rank}, inconsistent with the product structure"
            )));
        }
    }
    let depth = parties.iter().map(Vec::len).max().unwrap_or(0);
    Ok(Structure { k_separability: parties.len(), depth, parties })
}

/// Dense matrix of class sizes, handy for reports: `(class, count)`.
pub fn class_sizes(n: usize) -> Result<Vec<(usize, usize)>> {
    Ok(cuts_by_class(n)?.into_iter().map(|(s, c)| (s, c.len())).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::gellmann_basis;
    use crate::states::{ghz_state, mes_state, product_zero_state, seven_qubit_state};

    #[test]
    fn bipartition_counts() {
        assert_eq!(enumerate_bipartitions(2).unwrap().len(), 1);
        let three = enumerate_bipartitions(3).unwrap();
        let labels: Vec<String> = three.iter().map(|c| c.to_string()).collect();
        assert_eq!(labels, vec!["13|2", "12|3", "1|23"]);
        assert_eq!(enumerate_bipartitions(7).unwrap().len(), 63);
        assert!(matches!(enumerate_bipartitions(1), Err(Error::UnsupportedSize(_))));
        assert!(matches!(enumerate_bipartitions(13), Err(Error::UnsupportedSize(_))));
    }

    #[test]
    fn profile_value_increases() {
        for r in 1..16 {
            assert!(profile_value(r + 1) > profile_value(r));
        }
    }

    #[test]
    fn ghz_h_values() {
        for d in 2..=3 {
            let rho = ghz_state(3, d).unwrap().to_density();
            for s in h_vector(&rho).unwrap() {
                assert!((s.h - profile_value(d)).abs() < 1e-8, "d={d}: {}", s.h);
            }
        }
    }

    #[test]
    fn implicit_matches_tensor_bases() {
        let rho = ghz_state(3, 2).unwrap().to_density();
        let bases = vec![gellmann_basis(2, false).unwrap(); 3];
        let a = h_vector(&rho).unwrap();
        let b = h_vector_with_bases(&rho, &bases).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x.h - y.h).abs() < 1e-10);
            assert!((x.tr_fa - y.tr_fa).abs() < 1e-10);
            assert!((x.tr_norm_x - y.tr_norm_x).abs() < 1e-10);
        }
    }

    #[test]
    fn product_h_is_minus_one() {
        let rho = product_zero_state(4, 2).unwrap().to_density();
        for s in h_vector(&rho).unwrap() {
            assert!((s.h + 1.0).abs() < 1e-8);
        }
    }

    #[test]
    fn bell_vectors() {
        let rho = mes_state(2, 2).unwrap().to_density();
        let one = DimVectorCandidate::new(&[2, 2], vec![vec![1]]).unwrap();
        let two = DimVectorCandidate::new(&[2, 2], vec![vec![2]]).unwrap();
        let opts = CheckOptions::default();
        assert_eq!(check_dim_vector(&rho, &one, &opts).unwrap().feasibility, Feasibility::Infeasible);
        assert_eq!(check_dim_vector(&rho, &two, &opts).unwrap().feasibility, Feasibility::Feasible);
    }

    #[test]
    fn ghz_vectors() {
        let rho = ghz_state(3, 3).unwrap().to_density();
        let opts = CheckOptions::default();
        let full = DimVectorCandidate::new(&[3; 3], vec![vec![3, 3, 3]]).unwrap();
        let lowered = DimVectorCandidate::new(&[3; 3], vec![vec![3, 3, 2]]).unwrap();
        assert_eq!(check_dim_vector(&rho, &full, &opts).unwrap().feasibility, Feasibility::Feasible);
        let verdict = check_dim_vector(&rho, &lowered, &opts).unwrap();
        assert_eq!(verdict.feasibility, Feasibility::Infeasible);
        assert!(!verdict.violations.is_empty());
    }

    #[test]
    fn permutation_counting() {
        assert_eq!(distinct_permutations(&[1, 1, 2]), 3);
        assert_eq!(distinct_permutations(&[4; 5]), 1);
        assert_eq!(distinct_permutations(&[1, 2, 3, 4]), 24);
        let mut v = vec![1, 1, 2];
        let mut count = 1;
        while next_permutation(&mut v) {
            count += 1;
        }
        assert_eq!(count, 3);
    }

    #[test]
    fn vector_validation() {
        assert!(DimVectorCandidate::new(&[2; 3], vec![vec![2, 2]]).is_err());
        assert!(DimVectorCandidate::new(&[2; 3], vec![vec![2, 2, 3]]).is_err());
        assert!(DimVectorCandidate::new(&[2; 3], vec![vec![2, 0, 1]]).is_err());
        let v = DimVectorCandidate::new(&[2; 4], vec![vec![1, 2, 2, 2], vec![2, 2, 1]]).unwrap();
        assert_eq!(v.flat(), vec![2, 2, 2, 1, 2, 2, 1]);
        assert_eq!(v.compact(), "2x3,1;2x2,1");
        assert_eq!(parse_vector_spec("2x3,1;2x2,1").unwrap(), vec![vec![2, 2, 2, 1], vec![2, 2, 1]]);
        assert!(parse_vector_spec("2,a").is_err());
    }

    #[test]
    fn seven_qubit_structure() {
        let v = pure_state_dim_vector(&seven_qubit_state()).unwrap();
        assert_eq!(v.compact(), "2x6,1;4x8,2x12,1;4x20,2x14,1");
        let s = structure_from_vector(&v).unwrap();
        assert_eq!(s.to_string(), "(1|23|4567)");
        assert_eq!((s.k_separability, s.depth), (3, 4));
    }

    #[test]
    fn inconsistent_assignment_rejected() {
        let mut v = pure_state_dim_vector(&ghz_state(3, 2).unwrap()).unwrap();
        if let Some(a) = v.assignment.as_mut() {
            a[0].1 = 1;
            a[1].1 = 1;
        }
        assert!(matches!(structure_from_vector(&v), Err(Error::InvalidVector(_))));
    }
}
