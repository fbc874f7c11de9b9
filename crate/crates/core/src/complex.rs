//! Oriented simplices, signed incidence matrices and the boundary collar.
//!
//! Edges are oriented from the lower to the higher vertex index; faces keep the
//! counter-clockwise orientation of the mesh. A simplex belongs to the *collar*
//! when any of its vertices lies on the boundary cycle. Cochains that vanish on
//! the collar play the role of compactly supported forms.

use std::collections::HashMap;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::dec::SparseMatrix;
use crate::error::{Error, Result};
use crate::geometry::TriMesh;

/// One real value per oriented k-simplex.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cochain {
    degree: usize,
    values: Vec<f64>,
}

impl Cochain {
    pub fn new(degree: usize, values: Vec<f64>) -> Self {
        assert!(degree <= 2, "cochain degree {degree} exceeds surface dimension");
        Self { degree, values }
    }

    pub fn zeros(degree: usize, len: usize) -> Self {
        Self::new(degree, vec![0.0; len])
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    #[inline]
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Euclidean norm of the raw coefficient vector.
    pub fn coefficient_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// `self + s · other`.
    pub fn axpy(&self, s: f64, other: &Cochain) -> Cochain {
        self.check_same(other);
        Cochain::new(
            self.degree,
            self.values.iter().zip(&other.values).map(|(a, b)| a + s * b).collect(),
        )
    }

    fn check_same(&self, other: &Cochain) {
        assert_eq!(self.degree, other.degree, "cochain degree mismatch");
        assert_eq!(self.values.len(), other.values.len(), "cochain length mismatch");
    }
}

impl Add for &Cochain {
    type Output = Cochain;
    fn add(self, rhs: &Cochain) -> Cochain {
        self.axpy(1.0, rhs)
    }
}

impl Sub for &Cochain {
    type Output = Cochain;
    fn sub(self, rhs: &Cochain) -> Cochain {
        self.axpy(-1.0, rhs)
    }
}

impl Mul<f64> for &Cochain {
    type Output = Cochain;
    fn mul(self, s: f64) -> Cochain {
        Cochain::new(self.degree, self.values.iter().map(|v| s * v).collect())
    }
}

impl Neg for &Cochain {
    type Output = Cochain;
    fn neg(self) -> Cochain {
        self * -1.0
    }
}

/// Serialized cochain, tied to the mesh it was built on.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CochainFile {
    pub degree: usize,
    pub values: Vec<f64>,
    pub mesh_checksum: String,
}

impl CochainFile {
    pub fn new(cochain: &Cochain, mesh_checksum: impl Into<String>) -> Self {
        Self {
            degree: cochain.degree,
            values: cochain.values.clone(),
            mesh_checksum: mesh_checksum.into(),
        }
    }

    /// Recovers the cochain, refusing files built against another mesh or of the wrong size.
    pub fn into_cochain(self, mesh_checksum: &str, complex: &SimplicialComplex) -> Result<Cochain> {
        if self.mesh_checksum != mesh_checksum {
            return Err(Error::ChecksumMismatch {
                expected: mesh_checksum.to_string(),
                found: self.mesh_checksum,
            });
        }
        if self.degree > 2 {
            return Err(Error::Degree(format!("cochain file has degree {}", self.degree)));
        }
        let expected = complex.count(self.degree);
        if self.values.len() != expected {
            return Err(Error::Invalid(format!(
                "degree-{} cochain has {} values, the mesh has {expected} simplices",
                self.degree,
                self.values.len()
            )));
        }
        Ok(Cochain::new(self.degree, self.values))
    }
}

#[derive(Clone, Debug)]
pub struct SimplicialComplex {
    num_vertices: usize,
    edges: Vec<[usize; 2]>,
    faces: Vec<[usize; 3]>,
    /// for each face, its three edges with the induced sign
    face_edges: Vec<[(usize, f64); 3]>,
    /// for each edge, the incident faces with the induced sign
    edge_faces: Vec<Vec<(usize, f64)>>,
    d0: SparseMatrix,
    d1: SparseMatrix,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
    collar: [Vec<bool>; 3],
}

pub fn build_complex(mesh: &TriMesh) -> Result<SimplicialComplex> {
    let num_vertices = mesh.vertices().len();
    let faces: Vec<[usize; 3]> = mesh.triangles().to_vec();

    let mut edge_index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<[usize; 2]> = Vec::new();
    // enumerate in face order for a deterministic numbering
    for tri in &faces {
        for i in 0..3 {
            let (u, v) = (tri[i], tri[(i + 1) % 3]);
            let key = (u.min(v), u.max(v));
            edge_index.entry(key).or_insert_with(|| {
                edges.push([key.0, key.1]);
                edges.len() - 1
            });
        }
    }

    let mut face_edges = Vec::with_capacity(faces.len());
    let mut edge_faces: Vec<Vec<(usize, f64)>> = vec![Vec::new(); edges.len()];
    for (f, tri) in faces.iter().enumerate() {
        let mut fe = [(0usize, 0.0f64); 3];
        for i in 0..3 {
            let (u, v) = (tri[i], tri[(i + 1) % 3]);
            let e = edge_index[&(u.min(v), u.max(v))];
            let sign = if u < v { 1.0 } else { -1.0 };
            fe[i] = (e, sign);
            edge_faces[e].push((f, sign));
        }
        face_edges.push(fe);
    }

    for (e, inc) in edge_faces.iter().enumerate() {
        match inc.len() {
            1 => {}
            2 if inc[0].1 == -inc[1].1 => {}
            2 => {
                return Err(Error::Topology(format!(
                    "edge {:?} is traversed in the same direction by both faces",
                    edges[e]
                )))
            }
            n => {
                return Err(Error::Topology(format!(
                    "non-manifold edge {:?} borders {n} faces",
                    edges[e]
                )))
            }
        }
    }

    let boundary_edge: Vec<bool> = edge_faces.iter().map(|inc| inc.len() == 1).collect();
    let mut boundary_degree = vec![0usize; num_vertices];
    for (e, &[u, v]) in edges.iter().enumerate() {
        if boundary_edge[e] {
            boundary_degree[u] += 1;
            boundary_degree[v] += 1;
        }
    }
    let boundary_vertex: Vec<bool> = boundary_degree.iter().map(|&d| d > 0).collect();
    check_single_boundary_cycle(&edges, &boundary_edge, &boundary_degree)?;

    let vertex_collar = boundary_vertex.clone();
    let edge_collar: Vec<bool> = edges.iter().map(|&[u, v]| boundary_vertex[u] || boundary_vertex[v]).collect();
    let face_collar: Vec<bool> = faces.iter().map(|t| t.iter().any(|&v| boundary_vertex[v])).collect();

    let mut d0_trip = Vec::with_capacity(2 * edges.len());
    for (e, &[u, v]) in edges.iter().enumerate() {
        d0_trip.push((e, u, -1.0));
        d0_trip.push((e, v, 1.0));
    }
    let mut d1_trip = Vec::with_capacity(3 * faces.len());
    for (f, fe) in face_edges.iter().enumerate() {
        for &(e, s) in fe {
            d1_trip.push((f, e, s));
        }
    }
    let d0 = SparseMatrix::from_triplets(edges.len(), num_vertices, &d0_trip);
    let d1 = SparseMatrix::from_triplets(faces.len(), edges.len(), &d1_trip);

    Ok(SimplicialComplex {
        num_vertices,
        edges,
        faces,
        face_edges,
        edge_faces,
        d0,
        d1,
        boundary_vertex,
        boundary_edge,
        collar: [vertex_collar, edge_collar, face_collar],
    })
}

fn check_single_boundary_cycle(edges: &[[usize; 2]], boundary_edge: &[bool], degree: &[usize]) -> Result<()> {
    if let Some(v) = degree.iter().position(|&d| d != 0 && d != 2) {
        return Err(Error::Topology(format!("boundary vertex {v} has {} boundary edges", degree[v])));
    }
    let bedges: Vec<[usize; 2]> = edges.iter().zip(boundary_edge).filter(|(_, &b)| b).map(|(e, _)| *e).collect();
    if bedges.is_empty() {
        return Err(Error::Topology("mesh has no boundary".into()));
    }
    let mut adjacency: HashMap<usize, Vec<usize>> = HashMap::new();
    for &[u, v] in &bedges {
        adjacency.entry(u).or_default().push(v);
        adjacency.entry(v).or_default().push(u);
    }
    let start = bedges[0][0];
    let (mut prev, mut cur) = (start, bedges[0][1]);
    let mut steps = 1;
    while cur != start {
        let nbrs = &adjacency[&cur];
        let next = if nbrs[0] == prev { nbrs[1] } else { nbrs[0] };
        prev = cur;
        cur = next;
        steps += 1;
        if steps > bedges.len() {
            break;
        }
    }
    if steps != bedges.len() {
        return Err(Error::Topology(format!(
            "boundary splits into several cycles ({steps} of {} edges reached)",
            bedges.len()
        )));
    }
    Ok(())
}

impl SimplicialComplex {
    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_faces(&self) -> usize {
        self.faces.len()
    }

    /// Number of k-simplices.
    pub fn count(&self, degree: usize) -> usize {
        match degree {
            0 => self.num_vertices,
            1 => self.edges.len(),
            2 => self.faces.len(),
            _ => 0,
        }
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn face_edges(&self) -> &[[(usize, f64); 3]] {
        &self.face_edges
    }

    pub fn edge_faces(&self) -> &[Vec<(usize, f64)>] {
        &self.edge_faces
    }

    /// Signed incidence `E × V`.
    pub fn d0(&self) -> &SparseMatrix {
        &self.d0
    }

    /// Signed incidence `F × E`.
    pub fn d1(&self) -> &SparseMatrix {
        &self.d1
    }

    /// Exterior derivative as a matrix from degree `k` to `k + 1`.
    pub fn d_matrix(&self, degree: usize) -> Result<&SparseMatrix> {
        match degree {
            0 => Ok(&self.d0),
            1 => Ok(&self.d1),
            k => Err(Error::Degree(format!("no exterior derivative out of degree {k} on a surface"))),
        }
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn boundary_vertices(&self) -> &[bool] {
        &self.boundary_vertex
    }

    /// Edges on the boundary cycle (exactly one incident face).
    pub fn boundary_edges(&self) -> &[bool] {
        &self.boundary_edge
    }

    /// Collar flags for k-simplices: true when the simplex touches the boundary.
    pub fn collar(&self, degree: usize) -> &[bool] {
        &self.collar[degree]
    }

    /// Indices of k-simplices off the collar, ascending.
    pub fn interior_indices(&self, degree: usize) -> Vec<usize> {
        self.collar[degree].iter().enumerate().filter(|(_, &c)| !c).map(|(i, _)| i).collect()
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.num_vertices as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }

    /// `d1 · d0` computed in exact integer arithmetic; every entry must be zero.
    pub fn dd_integer(&self) -> Vec<(usize, usize, i64)> {
        let mut acc: HashMap<(usize, usize), i64> = HashMap::new();
        for (f, fe) in self.face_edges.iter().enumerate() {
            for &(e, s) in fe {
                let s = s as i64;
                let [u, v] = self.edges[e];
                *acc.entry((f, u)).or_default() -= s;
                *acc.entry((f, v)).or_default() += s;
            }
        }
        let mut nonzero: Vec<(usize, usize, i64)> =
            acc.into_iter().filter(|&(_, x)| x != 0).map(|((f, v), x)| (f, v, x)).collect();
        nonzero.sort_unstable();
        nonzero
    }
}

/// Exterior derivative `d₀` or `d₁` applied to a cochain.
pub fn apply_d(c: &Cochain, complex: &SimplicialComplex) -> Result<Cochain> {
    let d = complex.d_matrix(c.degree())?;
    check_len(c, complex)?;
    Ok(Cochain::new(c.degree() + 1, d.mul_vec(c.values())))
}

/// Zeroes the cochain on every simplex touching the boundary.
pub fn interior_restriction(c: &Cochain, complex: &SimplicialComplex) -> Cochain {
    let collar = complex.collar(c.degree());
    let values = c.values().iter().zip(collar).map(|(&v, &on)| if on { 0.0 } else { v }).collect();
    Cochain::new(c.degree(), values)
}

pub(crate) fn check_len(c: &Cochain, complex: &SimplicialComplex) -> Result<()> {
    let expected = complex.count(c.degree());
    if c.len() != expected {
        return Err(Error::Invalid(format!(
            "degree-{} cochain has {} values, complex has {expected} simplices",
            c.degree(),
            c.len()
        )));
    }
    Ok(())
}
