//! Metric structure on cochains: diagonal Hodge stars, the codifferential,
//! the L² and H¹ inner products, and the Hodge and Bochner Laplacians.
//!
//! Each triangle is replaced by the Euclidean triangle with the same geodesic
//! edge lengths. Star weights then follow the usual cotangent / mixed-Voronoi
//! construction on those intrinsic triangles.
//!
//! The codifferential is `δ_k = ⋆_{k−1}⁻¹ d_{k−1}ᵀ ⋆_k`, evaluated only on
//! (k−1)-simplices off the boundary collar; collar entries are zero. With this
//! convention `(du, v) = (u, δv)` holds for every `u` that vanishes on the
//! collar, and the boundary layer of a truncated form does not enter `δ`.

mod solver;
mod sparse;

pub use solver::{solve_spd, SolveConfig, Solution};
pub use sparse::SparseMatrix;

use serde::{Deserialize, Serialize};

use crate::complex::{build_complex, check_len, Cochain, SimplicialComplex};
use crate::error::{Error, Result};
use crate::geometry::{heron, Curvature, TriMesh};

/// Diagonal Hodge stars for vertices, edges and faces.
#[derive(Clone, Debug)]
pub struct StarWeights {
    /// Mixed Voronoi dual areas.
    pub star0: Vec<f64>,
    /// Cotangent weights: dual edge length over primal edge length.
    pub star1: Vec<f64>,
    /// Reciprocal intrinsic face areas.
    pub star2: Vec<f64>,
    pub curvature: Curvature,
    /// Triangles whose Voronoi split needed the obtuse-angle fallback.
    pub obtuse_clamps: usize,
}

impl StarWeights {
    pub fn weights(&self, degree: usize) -> &[f64] {
        match degree {
            0 => &self.star0,
            1 => &self.star1,
            2 => &self.star2,
            k => panic!("no Hodge star on degree {k}"),
        }
    }

    /// Intrinsic face areas, `1 / star2`.
    pub fn face_areas(&self) -> Vec<f64> {
        self.star2.iter().map(|s| 1.0 / s).collect()
    }
}

pub fn assemble_stars(mesh: &TriMesh, complex: &SimplicialComplex) -> Result<StarWeights> {
    let mut star0 = vec![0.0; complex.num_vertices()];
    let mut star1 = vec![0.0; complex.num_edges()];
    let mut star2 = Vec::with_capacity(complex.num_faces());
    let mut obtuse_clamps = 0;

    let edge_len: Vec<f64> = complex.edges().iter().map(|&[u, v]| mesh.edge_length(u, v)).collect();

    for (f, tri) in complex.faces().iter().enumerate() {
        // face_edges[i] runs from tri[i] to tri[i+1], so it is opposite tri[i+2]
        let fe = complex.face_edges()[f];
        let mut opp_edge = [0usize; 3];
        let mut opp_len = [0.0; 3];
        for i in 0..3 {
            let e = fe[i].0;
            opp_edge[(i + 2) % 3] = e;
            opp_len[(i + 2) % 3] = edge_len[e];
        }
        let area = heron(opp_len[0], opp_len[1], opp_len[2]);
        if !(area > 0.0) {
            return Err(Error::MeshQuality(format!("face {f} {tri:?} is degenerate")));
        }
        star2.push(1.0 / area);

        let sq = opp_len.map(|l| l * l);
        let cot: [f64; 3] =
            std::array::from_fn(|i| (sq[(i + 1) % 3] + sq[(i + 2) % 3] - sq[i]) / (4.0 * area));
        for i in 0..3 {
            star1[opp_edge[i]] += 0.5 * cot[i];
        }

        if let Some(obtuse) = (0..3).find(|&i| cot[i] < 0.0) {
            obtuse_clamps += 1;
            for i in 0..3 {
                star0[tri[i]] += if i == obtuse { 0.5 * area } else { 0.25 * area };
            }
        } else {
            for i in 0..3 {
                let (j, k) = ((i + 1) % 3, (i + 2) % 3);
                // edge i–j is opposite k, edge i–k is opposite j
                star0[tri[i]] += 0.125 * (sq[k] * cot[k] + sq[j] * cot[j]);
            }
        }
    }

    if let Some(e) = star1.iter().position(|&w| !(w > 0.0)) {
        return Err(Error::MeshQuality(format!(
            "edge {:?} has non-positive cotangent weight {}",
            complex.edges()[e],
            star1[e]
        )));
    }
    if let Some(v) = star0.iter().position(|&w| !(w > 0.0)) {
        return Err(Error::MeshQuality(format!("vertex {v} has non-positive dual area")));
    }

    Ok(StarWeights { star0, star1, star2, curvature: mesh.curvature(), obtuse_clamps })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Space {
    L2,
    H1,
}

impl std::str::FromStr for Space {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "l2" => Ok(Space::L2),
            "h1" => Ok(Space::H1),
            other => Err(Error::Invalid(format!("unknown space `{other}`, expected l2 or h1"))),
        }
    }
}

/// An inner product on k-cochains.
///
/// `H1` is `(1 + c)(u, v) + (du, dv) + (δu, δv)` with `c = a² k (N − k)`,
/// `N = 2`: the polarization of `‖∇u‖² = ‖du‖² + ‖δu‖² + c‖u‖²`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InnerProductSpace {
    pub kind: Space,
    pub degree: usize,
    /// Weitzenböck constant `a² k (2 − k)`.
    pub constant: f64,
}

impl InnerProductSpace {
    pub fn new(kind: Space, degree: usize, curvature: Curvature) -> Result<Self> {
        if degree > 2 {
            return Err(Error::Degree(format!("no {degree}-forms on a surface")));
        }
        let a = curvature.a();
        let constant = a * a * (degree * (2 - degree)) as f64;
        Ok(Self { kind, degree, constant })
    }
}

/// Sign of the continuum codifferential `d* = (−1)^{Nk+N+1} ⋆ d ⋆` on k-forms in dimension N.
pub fn continuum_codifferential_sign(dim: usize, degree: usize) -> i32 {
    if (dim * degree + dim + 1) % 2 == 0 {
        1
    } else {
        -1
    }
}

/// `δ_k` as a matrix from degree `k` to `k − 1`, zero on collar rows.
pub fn codifferential_matrix(degree: usize, complex: &SimplicialComplex, stars: &StarWeights) -> Result<SparseMatrix> {
    if degree == 0 || degree > 2 {
        return Err(Error::Degree(format!("codifferential is defined on degrees 1 and 2, got {degree}")));
    }
    let d = complex.d_matrix(degree - 1)?;
    let lower = stars.weights(degree - 1);
    let collar = complex.collar(degree - 1);
    let row_scale: Vec<f64> = lower.iter().zip(collar).map(|(&w, &c)| if c { 0.0 } else { 1.0 / w }).collect();
    Ok(d.transpose().scale(Some(&row_scale), Some(stars.weights(degree))))
}

pub fn codifferential(c: &Cochain, complex: &SimplicialComplex, stars: &StarWeights) -> Result<Cochain> {
    if c.degree() == 0 {
        return Err(Error::Degree("codifferential of a 0-cochain: there are no (−1)-forms".into()));
    }
    check_len(c, complex)?;
    let k = c.degree();
    let d = complex.d_matrix(k - 1)?;
    let weighted: Vec<f64> = c.values().iter().zip(stars.weights(k)).map(|(v, w)| v * w).collect();
    let mut out = d.transpose_mul_vec(&weighted);
    for ((o, &w), &collar) in out.iter_mut().zip(stars.weights(k - 1)).zip(complex.collar(k - 1)) {
        *o = if collar { 0.0 } else { *o / w };
    }
    Ok(Cochain::new(k - 1, out))
}

/// Weighted L² pairing `Σ ⋆_k[σ] u[σ] v[σ]`.
pub fn l2_inner(u: &Cochain, v: &Cochain, stars: &StarWeights) -> f64 {
    u.values().iter().zip(v.values()).zip(stars.weights(u.degree())).map(|((a, b), w)| w * a * b).sum()
}

pub fn inner(
    u: &Cochain,
    v: &Cochain,
    space: &InnerProductSpace,
    complex: &SimplicialComplex,
    stars: &StarWeights,
) -> Result<f64> {
    if u.degree() != v.degree() {
        return Err(Error::Degree(format!("pairing a {}-cochain with a {}-cochain", u.degree(), v.degree())));
    }
    if u.degree() != space.degree {
        return Err(Error::Degree(format!(
            "inner product on {}-cochains applied to a {}-cochain",
            space.degree,
            u.degree()
        )));
    }
    check_len(u, complex)?;
    check_len(v, complex)?;
    let base = l2_inner(u, v, stars);
    if space.kind == Space::L2 {
        return Ok(base);
    }
    let mut total = (1.0 + space.constant) * base;
    let k = u.degree();
    if k < 2 {
        let du = crate::complex::apply_d(u, complex)?;
        let dv = crate::complex::apply_d(v, complex)?;
        total += l2_inner(&du, &dv, stars);
    }
    if k > 0 {
        let su = codifferential(u, complex, stars)?;
        let sv = codifferential(v, complex, stars)?;
        total += l2_inner(&su, &sv, stars);
    }
    Ok(total)
}

/// The Gram matrix `S` with `inner(u, v) = uᵀ S v`.
pub fn gram_matrix(space: &InnerProductSpace, complex: &SimplicialComplex, stars: &StarWeights) -> Result<SparseMatrix> {
    let k = space.degree;
    let mass = SparseMatrix::diagonal(stars.weights(k));
    if space.kind == Space::L2 {
        return Ok(mass);
    }
    let mut s = mass.scale(Some(&vec![1.0 + space.constant; complex.count(k)]), None);
    if k < 2 {
        let d = complex.d_matrix(k)?;
        let dtmd = d.transpose().matmul(&d.scale(Some(stars.weights(k + 1)), None));
        s = s.add_scaled(1.0, &dtmd, 1.0);
    }
    if k > 0 {
        let delta = codifferential_matrix(k, complex, stars)?;
        let ttmt = delta.transpose().matmul(&delta.scale(Some(stars.weights(k - 1)), None));
        s = s.add_scaled(1.0, &ttmt, 1.0);
    }
    Ok(s)
}

/// `−Δ = δd + dδ`, dropping the terms that leave the complex.
pub fn hodge_laplacian(c: &Cochain, complex: &SimplicialComplex, stars: &StarWeights) -> Result<Cochain> {
    check_len(c, complex)?;
    let k = c.degree();
    let mut out = Cochain::zeros(k, c.len());
    if k < 2 {
        let dc = crate::complex::apply_d(c, complex)?;
        out = &out + &codifferential(&dc, complex, stars)?;
    }
    if k > 0 {
        let sc = codifferential(c, complex, stars)?;
        out = &out + &crate::complex::apply_d(&sc, complex)?;
    }
    Ok(out)
}

/// `∇*∇ = −Δ + a² k (N − k)` on a space form.
pub fn bochner(
    c: &Cochain,
    space: &InnerProductSpace,
    complex: &SimplicialComplex,
    stars: &StarWeights,
) -> Result<Cochain> {
    if c.degree() != space.degree {
        return Err(Error::Degree(format!("Bochner operator for degree {} applied to degree {}", space.degree, c.degree())));
    }
    Ok(hodge_laplacian(c, complex, stars)?.axpy(space.constant, c))
}

/// A mesh together with its complex and star weights.
#[derive(Clone, Debug)]
pub struct Dec {
    pub mesh: TriMesh,
    pub complex: SimplicialComplex,
    pub stars: StarWeights,
}

impl Dec {
    pub fn new(mesh: TriMesh) -> Result<Self> {
        let complex = build_complex(&mesh)?;
        let stars = assemble_stars(&mesh, &complex)?;
        Ok(Self { mesh, complex, stars })
    }

    pub fn curvature(&self) -> Curvature {
        self.mesh.curvature()
    }

    pub fn space(&self, kind: Space, degree: usize) -> Result<InnerProductSpace> {
        InnerProductSpace::new(kind, degree, self.curvature())
    }

    pub fn d(&self, c: &Cochain) -> Result<Cochain> {
        crate::complex::apply_d(c, &self.complex)
    }

    pub fn codifferential(&self, c: &Cochain) -> Result<Cochain> {
        codifferential(c, &self.complex, &self.stars)
    }

    pub fn inner(&self, u: &Cochain, v: &Cochain, space: &InnerProductSpace) -> Result<f64> {
        inner(u, v, space, &self.complex, &self.stars)
    }

    pub fn norm(&self, u: &Cochain, space: &InnerProductSpace) -> Result<f64> {
        Ok(self.inner(u, u, space)?.max(0.0).sqrt())
    }

    pub fn l2_norm(&self, u: &Cochain) -> f64 {
        l2_inner(u, u, &self.stars).max(0.0).sqrt()
    }

    pub fn hodge_laplacian(&self, c: &Cochain) -> Result<Cochain> {
        hodge_laplacian(c, &self.complex, &self.stars)
    }

    pub fn bochner(&self, c: &Cochain, space: &InnerProductSpace) -> Result<Cochain> {
        bochner(c, space, &self.complex, &self.stars)
    }

    /// The vertex-sampled coordinate function `x`, integrated exactly over edges.
    pub fn sampled_dx(&self) -> Cochain {
        let x = Cochain::new(0, self.mesh.vertices().iter().map(|p| p.x).collect());
        self.d(&x).expect("0-cochain sized to the mesh")
    }
}
