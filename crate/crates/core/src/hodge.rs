//! Three-way Hodge splits of cochains, harmonicity diagnostics, the stream
//! function of a co-closed 1-cochain, and cutoff truncation.
//!
//! A k-cochain `α` is split as `α = dβ + δω + γ` with `β` a (k−1)-cochain and
//! `ω` a (k+1)-cochain, both vanishing on the collar. The potentials minimize
//! `‖α − dβ − δω‖` in the chosen inner product, so `γ` is the orthogonal
//! complement of the two ranges.

use std::collections::VecDeque;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::complex::{check_len, Cochain};
use crate::dec::{codifferential_matrix, gram_matrix, solve_spd, Dec, InnerProductSpace, SolveConfig, SparseMatrix};
use crate::error::{Error, Result};
use crate::geometry::cutoff_cochain;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitDiagnostics {
    /// `‖α − dβ − δω − γ‖ / ‖α‖` in the chosen space.
    pub reconstruction_residual: f64,
    /// `⟨dβ, δω⟩`, `⟨dβ, γ⟩`, `⟨δω, γ⟩` in the chosen space.
    pub inner_exact_coexact: f64,
    pub inner_exact_harmonic: f64,
    pub inner_coexact_harmonic: f64,
    pub norm_sq_input: f64,
    pub norm_sq_exact: f64,
    pub norm_sq_coexact: f64,
    pub norm_sq_harmonic: f64,
    /// `‖α‖² − ‖dβ‖² − ‖δω‖² − ‖γ‖²`.
    pub pythagoras_defect: f64,
    /// L² norms of `dγ` and `δγ`; absent when the degree has no such term.
    pub d_harmonic_l2: Option<f64>,
    pub delta_harmonic_l2: Option<f64>,
    pub iterations: usize,
    pub solver_residual: f64,
    /// Largest coupling entry between the exact and co-exact Gram blocks,
    /// relative to the largest Gram entry.
    pub cross_block: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub elapsed_ms: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HodgeSplit {
    pub space: InnerProductSpace,
    /// Exact potential; absent for 0-cochains.
    pub beta: Option<Cochain>,
    /// Co-exact potential; absent for 2-cochains.
    pub omega: Option<Cochain>,
    pub exact: Cochain,
    pub coexact: Cochain,
    pub gamma: Cochain,
    pub diagnostics: SplitDiagnostics,
}

#[derive(Serialize, Deserialize)]
struct SplitFile {
    mesh_checksum: String,
    #[serde(flatten)]
    split: HodgeSplit,
}

impl HodgeSplit {
    pub fn to_json(&self, mesh_checksum: &str) -> Result<String> {
        let file = SplitFile { mesh_checksum: mesh_checksum.to_owned(), split: self.clone() };
        Ok(serde_json::to_string_pretty(&file)?)
    }

    /// Parses a report and checks it was produced on the mesh with `mesh_checksum`.
    pub fn from_json(text: &str, mesh_checksum: &str) -> Result<Self> {
        let file: SplitFile = serde_json::from_str(text)?;
        if file.mesh_checksum != mesh_checksum {
            return Err(Error::ChecksumMismatch { expected: mesh_checksum.to_owned(), found: file.mesh_checksum });
        }
        Ok(file.split)
    }
}

/// Splits `alpha` into exact, co-exact and harmonic parts in `space`.
///
/// The two potential blocks are solved together from the Gram system of the
/// candidate ranges restricted to interior simplices, where it is positive
/// definite.
pub fn decompose(dec: &Dec, alpha: &Cochain, space: &InnerProductSpace, cfg: &SolveConfig) -> Result<HodgeSplit> {
    let start = Instant::now();
    let k = alpha.degree();
    if k != space.degree {
        return Err(Error::Degree(format!("decomposing a {k}-cochain in a space of {}-cochains", space.degree)));
    }
    let cx = &dec.complex;
    check_len(alpha, cx)?;

    // columns of B: d_{k−1} on interior (k−1)-simplices, then δ_{k+1} on interior (k+1)-simplices
    let exact_cols = if k > 0 { Some(interior_block(dec, k - 1, cx.d_matrix(k - 1)?.clone())?) } else { None };
    let coexact_cols =
        if k < 2 { Some(interior_block(dec, k + 1, codifferential_matrix(k + 1, cx, &dec.stars)?)?) } else { None };

    let blocks: Vec<&SparseMatrix> = exact_cols.iter().chain(coexact_cols.iter()).map(|(b, _)| b).collect();
    let basis = SparseMatrix::hstack(&blocks);
    let s = gram_matrix(space, cx, &dec.stars)?;
    let sb = s.matmul(&basis);
    let gram = basis.transpose().matmul(&sb);
    let rhs = sb.transpose_mul_vec(alpha.values());

    let n_exact = exact_cols.as_ref().map_or(0, |(b, _)| b.cols());
    let cross_block = cross_coupling(&gram, n_exact);

    let sol = solve_spd(&gram, &rhs, cfg)?;
    let (x_exact, x_coexact) = sol.x.split_at(n_exact);

    let zeros = || Cochain::zeros(k, alpha.len());
    let (beta, exact) = match &exact_cols {
        Some((b, interior)) => {
            let beta = scatter(k - 1, cx.count(k - 1), interior, x_exact);
            (Some(beta), Cochain::new(k, b.mul_vec(x_exact)))
        }
        None => (None, zeros()),
    };
    let (omega, coexact) = match &coexact_cols {
        Some((b, interior)) => {
            let omega = scatter(k + 1, cx.count(k + 1), interior, x_coexact);
            (Some(omega), Cochain::new(k, b.mul_vec(x_coexact)))
        }
        None => (None, zeros()),
    };
    let gamma = &(alpha - &exact) - &coexact;

    let ip = |u: &Cochain, v: &Cochain| dec.inner(u, v, space);
    let norm_sq_input = ip(alpha, alpha)?;
    let norm_sq_exact = ip(&exact, &exact)?;
    let norm_sq_coexact = ip(&coexact, &coexact)?;
    let norm_sq_harmonic = ip(&gamma, &gamma)?;
    let rebuilt = &(&exact + &coexact) + &gamma;
    let miss = alpha - &rebuilt;
    let reconstruction_residual =
        if norm_sq_input > 0.0 { (ip(&miss, &miss)?.max(0.0) / norm_sq_input).sqrt() } else { 0.0 };

    let diagnostics = SplitDiagnostics {
        reconstruction_residual,
        inner_exact_coexact: ip(&exact, &coexact)?,
        inner_exact_harmonic: ip(&exact, &gamma)?,
        inner_coexact_harmonic: ip(&coexact, &gamma)?,
        norm_sq_input,
        norm_sq_exact,
        norm_sq_coexact,
        norm_sq_harmonic,
        pythagoras_defect: norm_sq_input - norm_sq_exact - norm_sq_coexact - norm_sq_harmonic,
        d_harmonic_l2: if k < 2 { Some(dec.l2_norm(&dec.d(&gamma)?)) } else { None },
        delta_harmonic_l2: if k > 0 { Some(dec.l2_norm(&dec.codifferential(&gamma)?)) } else { None },
        iterations: sol.iterations,
        solver_residual: sol.residual,
        cross_block,
        elapsed_ms: (!cfg.deterministic).then(|| start.elapsed().as_secs_f64() * 1e3),
    };
    Ok(HodgeSplit { space: *space, beta, omega, exact, coexact, gamma, diagnostics })
}

/// `op` restricted to the interior `degree`-simplices, with their indices.
fn interior_block(dec: &Dec, degree: usize, op: SparseMatrix) -> Result<(SparseMatrix, Vec<usize>)> {
    let interior = dec.complex.interior_indices(degree);
    if interior.is_empty() {
        let what = ["vertices", "edges", "faces"][degree];
        return Err(Error::Topology(format!("degenerate mesh: no interior {what} to carry a potential")));
    }
    Ok((op.select_columns(&interior), interior))
}

fn scatter(degree: usize, len: usize, indices: &[usize], values: &[f64]) -> Cochain {
    let mut out = vec![0.0; len];
    for (&i, &v) in indices.iter().zip(values) {
        out[i] = v;
    }
    Cochain::new(degree, out)
}

fn cross_coupling(gram: &SparseMatrix, split: usize) -> f64 {
    let scale = gram.max_abs();
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst: f64 = 0.0;
    for r in 0..split {
        for (c, v) in gram.row(r) {
            if c >= split {
                worst = worst.max(v.abs());
            }
        }
    }
    worst / scale
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HarmonicReport {
    /// `‖dγ‖² + ‖δγ‖² + c‖γ‖²`, the discrete `‖∇γ‖²`.
    pub energy: f64,
    pub norm_sq: f64,
    pub constant: f64,
    /// `E / (2c‖γ‖²)`; absent when `c = 0` or `γ = 0`.
    pub bound_ratio: Option<f64>,
    /// `‖dγ‖ / ‖γ‖` and `‖δγ‖ / ‖γ‖`; absent for `γ = 0`.
    pub d_residual: Option<f64>,
    pub delta_residual: Option<f64>,
    pub degenerate: bool,
}

/// Energy and closedness of a 1-cochain. All norms are L².
pub fn harmonic_diagnostics(dec: &Dec, gamma: &Cochain, space: &InnerProductSpace) -> Result<HarmonicReport> {
    if gamma.degree() != 1 || space.degree != 1 {
        return Err(Error::Degree(format!("harmonic diagnostics take 1-cochains, got degree {}", gamma.degree())));
    }
    check_len(gamma, &dec.complex)?;
    let c = space.constant;
    let norm_sq = dec.l2_norm(gamma).powi(2);
    let d_sq = dec.l2_norm(&dec.d(gamma)?).powi(2);
    let delta_sq = dec.l2_norm(&dec.codifferential(gamma)?).powi(2);
    let energy = d_sq + delta_sq + c * norm_sq;
    if norm_sq == 0.0 {
        return Ok(HarmonicReport {
            energy,
            norm_sq,
            constant: c,
            bound_ratio: None,
            d_residual: None,
            delta_residual: None,
            degenerate: true,
        });
    }
    Ok(HarmonicReport {
        energy,
        norm_sq,
        constant: c,
        bound_ratio: (c > 0.0).then(|| energy / (2.0 * c * norm_sq)),
        d_residual: Some((d_sq / norm_sq).sqrt()),
        delta_residual: Some((delta_sq / norm_sq).sqrt()),
        degenerate: false,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StreamResult {
    /// Stream function, one value per face.
    pub f: Vec<f64>,
    /// `f · Vol`, so that `⋆₂ ω = f`.
    pub omega: Cochain,
    /// `‖δω − v‖ / ‖v‖` in L².
    pub residual: f64,
}

#[derive(Serialize, Deserialize)]
struct StreamFile {
    mesh_checksum: String,
    #[serde(flatten)]
    result: StreamResult,
}

impl StreamResult {
    pub fn to_json(&self, mesh_checksum: &str) -> Result<String> {
        let file = StreamFile { mesh_checksum: mesh_checksum.to_owned(), result: self.clone() };
        Ok(serde_json::to_string_pretty(&file)?)
    }
}

/// Finds the 2-cochain `ω`, zero on the collar, with `δω = v`.
///
/// The dual 1-cochain `⋆₁v` is integrated breadth-first over the face
/// adjacency graph starting from the lowest-index face touching the boundary.
pub fn stream_function(dec: &Dec, v: &Cochain, cfg: &SolveConfig) -> Result<StreamResult> {
    if v.degree() != 1 {
        return Err(Error::Degree(format!("stream function of a {}-cochain", v.degree())));
    }
    let cx = &dec.complex;
    check_len(v, cx)?;
    let tol = cfg.tolerance;
    let vals = v.values();
    let scale = v.max_abs();
    if scale == 0.0 {
        let nf = cx.num_faces();
        return Ok(StreamResult { f: vec![0.0; nf], omega: Cochain::zeros(2, nf), residual: 0.0 });
    }

    if let Some(e) = (0..cx.num_edges()).filter(|&e| cx.collar(1)[e] && vals[e] != 0.0).max_by(|&a, &b| {
        vals[a].abs().total_cmp(&vals[b].abs())
    }) {
        let [p, q] = cx.edges()[e];
        return Err(Error::Precondition(format!(
            "input is {:e} on collar edge {e} ({p}–{q}); it must vanish next to the boundary",
            vals[e]
        )));
    }

    // dual 1-cochain ⋆₁v, and its divergence at interior vertices
    let flux: Vec<f64> = vals.iter().zip(&dec.stars.star1).map(|(x, w)| x * w).collect();
    let div = cx.d0().transpose_mul_vec(&flux);
    let mut magnitude = vec![0.0; cx.num_vertices()];
    for (e, &[p, q]) in cx.edges().iter().enumerate() {
        magnitude[p] += flux[e].abs();
        magnitude[q] += flux[e].abs();
    }
    let flux_scale = magnitude.iter().cloned().fold(0.0, f64::max);
    if let Some((vtx, worst)) = (0..cx.num_vertices())
        .filter(|&i| !cx.boundary_vertices()[i])
        .map(|i| (i, div[i].abs()))
        .max_by(|a, b| a.1.total_cmp(&b.1))
    {
        if worst > tol * flux_scale {
            return Err(Error::Precondition(format!(
                "input is not co-closed: divergence {worst:e} at vertex {vtx} exceeds {:e}",
                tol * flux_scale
            )));
        }
    }

    let nf = cx.num_faces();
    let root = (0..nf).find(|&f| cx.collar(2)[f]).ok_or_else(|| Error::Topology("no face touches the boundary".into()))?;

    // f[f1] − f[f2] = ⋆₁v[e] across an interior edge with faces (f1, +), (f2, −)
    let mut f = vec![0.0; nf];
    let mut seen = vec![false; nf];
    let mut neighbours: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nf];
    for (e, faces) in cx.edge_faces().iter().enumerate() {
        if let [(a, sa), (b, _)] = faces[..] {
            // f[a]·sa + f[b]·sb = flux with sb = −sa
            let jump = sa * flux[e];
            neighbours[b].push((a, jump));
            neighbours[a].push((b, -jump));
        }
    }
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(x) = queue.pop_front() {
        for &(y, jump) in &neighbours[x] {
            if !seen[y] {
                seen[y] = true;
                f[y] = f[x] + jump;
                queue.push_back(y);
            }
        }
    }

    // every dual edge, tree or not, must agree with the accumulated values
    let mut worst: f64 = 0.0;
    for (x, list) in neighbours.iter().enumerate() {
        for &(y, jump) in list {
            worst = worst.max((f[y] - f[x] - jump).abs());
        }
    }
    let f_scale = f.iter().fold(flux_scale, |m, x| m.max(x.abs()));
    if worst > tol * f_scale.max(f64::MIN_POSITIVE) {
        return Err(Error::Consistency(format!("stream function is path dependent: mismatch {worst:e}")));
    }
    let offset = f[root];
    for (x, c) in f.iter_mut().zip(cx.collar(2)) {
        *x = if *c { 0.0 } else { *x - offset };
    }

    let areas = dec.stars.face_areas();
    let omega = Cochain::new(2, f.iter().zip(&areas).map(|(x, a)| x * a).collect());
    let back = dec.codifferential(&omega)?;
    let residual = dec.l2_norm(&(&back - v)) / dec.l2_norm(v);
    if residual > tol {
        return Err(Error::Consistency(format!("δω reproduces the input only to {residual:e}")));
    }
    Ok(StreamResult { f, omega, residual })
}

/// Distance in `space` between `γ` and its cutoff `φ_R γ`, where the cutoff is
/// averaged over the two endpoints of each edge.
pub fn truncation_distance(dec: &Dec, gamma: &Cochain, radius: f64, space: &InnerProductSpace) -> Result<f64> {
    if gamma.degree() != 1 {
        return Err(Error::Degree(format!("truncation of a {}-cochain", gamma.degree())));
    }
    check_len(gamma, &dec.complex)?;
    let extent = dec.mesh.provenance().map_or_else(|| dec.mesh.max_radius(), |p| p.radius);
    if !(2.0 * radius <= extent * (1.0 + 1e-12)) {
        return Err(Error::Domain(format!("cutoff radius {radius}: 2R exceeds the meshed radius {extent}")));
    }
    let phi = cutoff_cochain(&dec.mesh, radius)?;
    let cut: Vec<f64> = dec
        .complex
        .edges()
        .iter()
        .zip(gamma.values())
        .map(|(&[p, q], g)| 0.5 * (phi.values()[p] + phi.values()[q]) * g)
        .collect();
    let diff = &Cochain::new(1, cut) - gamma;
    dec.norm(&diff, space)
}
