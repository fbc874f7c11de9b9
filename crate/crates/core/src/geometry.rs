//! The Poincaré disk model of the hyperbolic plane of curvature `−a²`, with the
//! flat plane as the separate `a = 0` branch.
//!
//! For `a > 0` the metric is `(2 / (a (1 − |x|²)))² δ` on the open unit disk.
//! Geodesic radius `ρ` from the origin and model radius `r` are related by
//! `r = tanh(a ρ / 2)`. At `a = 0` model coordinates are Euclidean lengths.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::complex::Cochain;
use crate::error::{Error, Result};

/// Sectional curvature parameter `a ≥ 0`; the curvature is `−a²`.
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct Curvature(f64);

impl Curvature {
    pub const FLAT: Curvature = Curvature(0.0);

    pub fn new(a: f64) -> Result<Self> {
        if a.is_finite() && a >= 0.0 {
            Ok(Self(a))
        } else {
            Err(Error::Domain(format!("curvature parameter a must be finite and ≥ 0, got {a}")))
        }
    }

    #[inline]
    pub fn a(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn is_flat(self) -> bool {
        self.0 == 0.0
    }

    /// Sectional curvature `K = −a²`.
    pub fn sectional(self) -> f64 {
        -self.0 * self.0
    }
}

impl TryFrom<f64> for Curvature {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        Self::new(a)
    }
}

impl From<Curvature> for f64 {
    fn from(c: Curvature) -> f64 {
        c.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(from = "[f64; 2]", into = "[f64; 2]")]
pub struct DiskPoint {
    pub x: f64,
    pub y: f64,
}

impl DiskPoint {
    pub const ORIGIN: DiskPoint = DiskPoint { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    #[inline]
    pub fn norm_sq(self) -> f64 {
        self.x * self.x + self.y * self.y
    }

    pub fn check(self, a: Curvature) -> Result<()> {
        if !(self.x.is_finite() && self.y.is_finite()) {
            return Err(Error::Domain(format!("non-finite point ({}, {})", self.x, self.y)));
        }
        if !a.is_flat() && self.norm_sq() >= 1.0 {
            return Err(Error::Domain(format!(
                "point ({}, {}) lies outside the open unit disk",
                self.x, self.y
            )));
        }
        Ok(())
    }

    /// Geodesic distance from the disk origin.
    pub fn geodesic_radius(self, a: Curvature) -> f64 {
        let r = self.norm_sq().sqrt();
        if a.is_flat() {
            r
        } else {
            2.0 * r.atanh() / a.a()
        }
    }

    /// The point at geodesic radius `rho` and polar angle `theta`.
    pub fn from_polar(rho: f64, theta: f64, a: Curvature) -> Self {
        let r = if a.is_flat() { rho } else { (0.5 * a.a() * rho).tanh() };
        Self { x: r * theta.cos(), y: r * theta.sin() }
    }
}

impl From<[f64; 2]> for DiskPoint {
    fn from(p: [f64; 2]) -> Self {
        Self { x: p[0], y: p[1] }
    }
}

impl From<DiskPoint> for [f64; 2] {
    fn from(p: DiskPoint) -> Self {
        [p.x, p.y]
    }
}

/// Geodesic distance between two points.
pub fn distance(p: DiskPoint, q: DiskPoint, a: Curvature) -> Result<f64> {
    p.check(a)?;
    q.check(a)?;
    let dx = p.x - q.x;
    let dy = p.y - q.y;
    let chord_sq = dx * dx + dy * dy;
    if a.is_flat() {
        return Ok(chord_sq.sqrt());
    }
    // cosh(a d) = 1 + 2δ, written through sinh(a d / 2) = √δ to keep short edges accurate
    let delta = chord_sq / ((1.0 - p.norm_sq()) * (1.0 - q.norm_sq()));
    Ok(2.0 * delta.sqrt().asinh() / a.a())
}

/// Interior angles opposite to `l1`, `l2`, `l3` of the triangle with those side lengths.
pub fn triangle_angles(l1: f64, l2: f64, l3: f64, a: Curvature) -> Result<[f64; 3]> {
    check_sides(l1, l2, l3)?;
    let s = 0.5 * (l1 + l2 + l3);
    let sides = [l1, l2, l3];
    let mut angles = [0.0; 3];
    for i in 0..3 {
        let (b, c) = (sides[(i + 1) % 3], sides[(i + 2) % 3]);
        let sin_half_sq = if a.is_flat() {
            ((s - b) * (s - c)) / (b * c)
        } else {
            let k = a.a();
            ((k * (s - b)).sinh() * (k * (s - c)).sinh()) / ((k * b).sinh() * (k * c).sinh())
        };
        angles[i] = 2.0 * sin_half_sq.clamp(0.0, 1.0).sqrt().asin();
    }
    Ok(angles)
}

/// Area of the geodesic triangle with the given side lengths.
///
/// Flat: Heron's formula in Kahan's stable ordering. Hyperbolic: the angle
/// defect `(π − α − β − γ) / a²`.
pub fn triangle_area(l1: f64, l2: f64, l3: f64, a: Curvature) -> Result<f64> {
    check_sides(l1, l2, l3)?;
    if a.is_flat() {
        return Ok(heron(l1, l2, l3));
    }
    let angles = triangle_angles(l1, l2, l3, a)?;
    let defect = PI - angles.iter().sum::<f64>();
    Ok(defect.max(0.0) / (a.a() * a.a()))
}

/// Heron's formula, stable for needle-shaped triangles.
pub fn heron(l1: f64, l2: f64, l3: f64) -> f64 {
    let mut s = [l1, l2, l3];
    s.sort_by(|x, y| y.total_cmp(x));
    let [a, b, c] = s;
    let prod = (a + (b + c)) * (c - (a - b)) * (c + (a - b)) * (a + (b - c));
    0.25 * prod.max(0.0).sqrt()
}

fn check_sides(l1: f64, l2: f64, l3: f64) -> Result<()> {
    let sides = [l1, l2, l3];
    if sides.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
        return Err(Error::Domain(format!("side lengths must be positive, got {sides:?}")));
    }
    let total = l1 + l2 + l3;
    for (i, &l) in sides.iter().enumerate() {
        let others = total - l;
        if l > others * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "side {i} of length {l} violates the triangle inequality (others sum to {others})"
            )));
        }
    }
    Ok(())
}

/// How a mesh was generated: target geodesic radius and target edge length.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub radius: f64,
    pub edge: f64,
}

/// A triangulated disk in model coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MeshFile", into = "MeshFile")]
pub struct TriMesh {
    curvature: Curvature,
    vertices: Vec<DiskPoint>,
    triangles: Vec<[usize; 3]>,
    provenance: Option<Provenance>,
}

/// On-disk layout of a mesh.
#[derive(Clone, Debug, Serialize, Deserialize)]
struct MeshFile {
    curvature: f64,
    vertices: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    #[serde(default)]
    provenance: Option<Provenance>,
}

impl TryFrom<MeshFile> for TriMesh {
    type Error = Error;
    fn try_from(f: MeshFile) -> Result<Self> {
        TriMesh::new(
            Curvature::new(f.curvature)?,
            f.vertices.into_iter().map(DiskPoint::from).collect(),
            f.triangles,
            f.provenance,
        )
    }
}

impl From<TriMesh> for MeshFile {
    fn from(m: TriMesh) -> Self {
        MeshFile {
            curvature: m.curvature.a(),
            vertices: m.vertices.into_iter().map(Into::into).collect(),
            triangles: m.triangles,
            provenance: m.provenance,
        }
    }
}

impl TriMesh {
    /// Validates and wraps a triangle list.
    ///
    /// Checks that every vertex is admissible for `curvature`, every triangle is
    /// counter-clockwise, the triangles form a topological disk (`V − E + F = 1`),
    /// and, when `provenance` is given, that every edge length lies in `[h/2, 2h]`.
    pub fn new(
        curvature: Curvature,
        vertices: Vec<DiskPoint>,
        triangles: Vec<[usize; 3]>,
        provenance: Option<Provenance>,
    ) -> Result<Self> {
        for p in &vertices {
            p.check(curvature)?;
        }
        if triangles.is_empty() {
            return Err(Error::Topology("mesh has no triangles".into()));
        }
        for (f, tri) in triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::Topology(format!("triangle {f} references a missing vertex")));
            }
            if tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2] {
                return Err(Error::Topology(format!("triangle {f} repeats a vertex")));
            }
            let [p, q, r] = tri.map(|v| vertices[v]);
            let orient = (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x);
            if orient <= 0.0 {
                return Err(Error::Topology(format!("triangle {f} is not counter-clockwise")));
            }
        }
        let mut edges: HashMap<(usize, usize), ()> = HashMap::new();
        for tri in &triangles {
            for i in 0..3 {
                let (u, v) = (tri[i], tri[(i + 1) % 3]);
                edges.insert((u.min(v), u.max(v)), ());
            }
        }
        let mut used = vec![false; vertices.len()];
        triangles.iter().flatten().for_each(|&v| used[v] = true);
        if let Some(v) = used.iter().position(|u| !u) {
            return Err(Error::Topology(format!("vertex {v} belongs to no triangle")));
        }
        let euler = vertices.len() as i64 - edges.len() as i64 + triangles.len() as i64;
        if euler != 1 {
            return Err(Error::Topology(format!("Euler characteristic is {euler}, expected 1 for a disk")));
        }

        let mesh = Self { curvature, vertices, triangles, provenance };
        if let Some(prov) = provenance {
            let (lo, hi) = mesh.edge_length_range(edges.keys().copied())?;
            if lo < 0.5 * prov.edge || hi > 2.0 * prov.edge {
                return Err(Error::MeshQuality(format!(
                    "edge lengths span [{lo:.4}, {hi:.4}], outside [{:.4}, {:.4}]",
                    0.5 * prov.edge,
                    2.0 * prov.edge
                )));
            }
        }
        Ok(mesh)
    }

    fn edge_length_range(&self, edges: impl Iterator<Item = (usize, usize)>) -> Result<(f64, f64)> {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for (u, v) in edges {
            let l = distance(self.vertices[u], self.vertices[v], self.curvature)?;
            lo = lo.min(l);
            hi = hi.max(l);
        }
        Ok((lo, hi))
    }

    #[inline]
    pub fn curvature(&self) -> Curvature {
        self.curvature
    }

    #[inline]
    pub fn vertices(&self) -> &[DiskPoint] {
        &self.vertices
    }

    #[inline]
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn provenance(&self) -> Option<Provenance> {
        self.provenance
    }

    /// Geodesic length of the segment between two vertices.
    pub fn edge_length(&self, u: usize, v: usize) -> f64 {
        distance(self.vertices[u], self.vertices[v], self.curvature)
            .expect("mesh vertices are validated at construction")
    }

    /// Geodesic distance of each vertex from the disk origin.
    pub fn vertex_radii(&self) -> Vec<f64> {
        self.vertices.iter().map(|p| p.geodesic_radius(self.curvature)).collect()
    }

    /// Largest geodesic vertex radius.
    pub fn max_radius(&self) -> f64 {
        self.vertex_radii().into_iter().fold(0.0, f64::max)
    }

    /// Sum of geodesic triangle areas.
    pub fn total_area(&self) -> f64 {
        self.triangles
            .iter()
            .map(|t| {
                let l = [
                    self.edge_length(t[1], t[2]),
                    self.edge_length(t[2], t[0]),
                    self.edge_length(t[0], t[1]),
                ];
                triangle_area(l[0], l[1], l[2], self.curvature).unwrap_or(0.0)
            })
            .sum()
    }

    /// SHA-256 over the exact bit patterns of curvature, coordinates and connectivity.
    pub fn checksum(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.curvature.a().to_bits().to_le_bytes());
        h.update((self.vertices.len() as u64).to_le_bytes());
        for p in &self.vertices {
            h.update(p.x.to_bits().to_le_bytes());
            h.update(p.y.to_bits().to_le_bytes());
        }
        h.update((self.triangles.len() as u64).to_le_bytes());
        for t in &self.triangles {
            for &v in t {
                h.update((v as u64).to_le_bytes());
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Triangulates the geodesic ball of radius `rho_max` about the origin with
/// concentric rings.
///
/// Ring `i` sits at geodesic radius `i·s`, `s = rho_max / round(rho_max / h)`,
/// and carries `round(2π sinh(a i s) / (a s))` vertices (`round(2π i)` when
/// flat). Odd rings are rotated by half a step. Neighbouring rings are
/// zipped together, each step closing the triangle with the shorter diagonal.
/// The interior is then relaxed (Delaunay flips and neighbour averaging with
/// the boundary ring held fixed) so that every cotangent weight is positive.
pub fn ball_mesh(a: Curvature, rho_max: f64, h: f64) -> Result<TriMesh> {
    if !(rho_max.is_finite() && rho_max > 0.0) {
        return Err(Error::Configuration(format!("radius must be positive, got {rho_max}")));
    }
    if !(h.is_finite() && h > 0.0 && h <= rho_max) {
        return Err(Error::Configuration(format!("edge length must lie in (0, radius], got {h}")));
    }
    let rings = (rho_max / h).round().max(1.0) as usize;
    let spacing = rho_max / rings as f64;

    let ring_size = |i: usize| -> usize {
        if i == 0 {
            return 1;
        }
        let rho = i as f64 * spacing;
        let circumference = if a.is_flat() {
            2.0 * PI * rho
        } else {
            2.0 * PI * (a.a() * rho).sinh() / a.a()
        };
        (circumference / spacing).round() as usize
    };

    let boundary = ring_size(rings);
    if boundary < 3 {
        return Err(Error::Configuration(format!(
            "radius {rho_max} with edge {h} gives {boundary} boundary vertices, need at least 3"
        )));
    }

    let mut vertices = vec![DiskPoint::ORIGIN];
    let mut ring_start = vec![0usize];
    let mut ring_angles: Vec<Vec<f64>> = vec![vec![0.0]];
    for i in 1..=rings {
        let m = ring_size(i);
        let offset = if i % 2 == 1 { 0.5 } else { 0.0 };
        let rho = i as f64 * spacing;
        ring_start.push(vertices.len());
        let angles: Vec<f64> = (0..m).map(|j| 2.0 * PI * (j as f64 + offset) / m as f64).collect();
        for &theta in &angles {
            let p = DiskPoint::from_polar(rho, theta, a);
            if !a.is_flat() && p.norm_sq() >= 1.0 {
                return Err(Error::Configuration(format!(
                    "ring at radius {rho} is not representable inside the unit disk"
                )));
            }
            vertices.push(p);
        }
        ring_angles.push(angles);
    }

    let mut triangles = Vec::new();
    let first = &ring_angles[1];
    for j in 0..first.len() {
        triangles.push([0, ring_start[1] + j, ring_start[1] + (j + 1) % first.len()]);
    }
    for i in 1..rings {
        zip_rings(
            &vertices,
            ring_start[i],
            ring_angles[i].len(),
            ring_start[i + 1],
            ring_angles[i + 1].len(),
            &mut triangles,
        );
    }

    let fixed: Vec<bool> = (0..vertices.len()).map(|v| v >= ring_start[rings]).collect();
    relax(a, &mut vertices, &mut triangles, &fixed, spacing);

    TriMesh::new(a, vertices, triangles, Some(Provenance { radius: rho_max, edge: h }))
}

const RELAXATION_ROUNDS: usize = 20;
const FLIP_TOLERANCE: f64 = 1e-9;

/// Alternates intrinsic Delaunay flips with neighbour-averaging of the free
/// vertices. Concentric rings of different sizes line up radially at some
/// angles, which leaves nearly cocircular quads with vanishing cotangent
/// weights; a few rounds of this remove them.
fn relax(a: Curvature, vertices: &mut [DiskPoint], triangles: &mut [[usize; 3]], fixed: &[bool], h: f64) {
    for _ in 0..RELAXATION_ROUNDS {
        delaunay_flips(a, vertices, triangles);
        smooth(a, vertices, triangles, fixed, h);
    }
    delaunay_flips(a, vertices, triangles);
}

fn model_orientation(p: DiskPoint, q: DiskPoint, r: DiskPoint) -> f64 {
    (q.x - p.x) * (r.y - p.y) - (q.y - p.y) * (r.x - p.x)
}

/// Cotangent of the angle at `apex` in the intrinsic triangle `(apex, u, v)`.
fn intrinsic_cot(a: Curvature, vertices: &[DiskPoint], apex: usize, u: usize, v: usize) -> f64 {
    let len = |i: usize, j: usize| distance(vertices[i], vertices[j], a).unwrap_or(f64::NAN);
    let (opp, b, c) = (len(u, v), len(apex, u), len(apex, v));
    let area = heron(opp, b, c);
    (b * b + c * c - opp * opp) / (4.0 * area)
}

fn delaunay_flips(a: Curvature, vertices: &[DiskPoint], triangles: &mut [[usize; 3]]) {
    for _pass in 0..64 {
        // directed edge (u, v) -> (face, opposite vertex)
        let mut half: HashMap<(usize, usize), (usize, usize)> = HashMap::with_capacity(3 * triangles.len());
        for (f, t) in triangles.iter().enumerate() {
            for i in 0..3 {
                half.insert((t[i], t[(i + 1) % 3]), (f, t[(i + 2) % 3]));
            }
        }
        let mut keys: Vec<(usize, usize)> = half.keys().copied().filter(|&(u, v)| u < v).collect();
        keys.sort_unstable();
        let mut dirty = vec![false; triangles.len()];
        let mut flips = 0;
        for (u, v) in keys {
            let (Some(&(f1, w)), Some(&(f2, z))) = (half.get(&(u, v)), half.get(&(v, u))) else {
                continue;
            };
            if dirty[f1] || dirty[f2] {
                continue;
            }
            let weight = intrinsic_cot(a, vertices, w, u, v) + intrinsic_cot(a, vertices, z, v, u);
            if !(weight < -FLIP_TOLERANCE) {
                continue;
            }
            let t1 = [u, z, w];
            let t2 = [z, v, w];
            let ccw = |t: [usize; 3]| model_orientation(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0;
            if !(ccw(t1) && ccw(t2)) {
                continue;
            }
            triangles[f1] = t1;
            triangles[f2] = t2;
            dirty[f1] = true;
            dirty[f2] = true;
            flips += 1;
        }
        if flips == 0 {
            return;
        }
    }
}

/// Moves every free vertex to the average of its neighbours. In the hyperbolic
/// case the average is taken after a disk isometry carries the vertex to the
/// origin, so the update does not depend on where the vertex sits in the model.
fn smooth(a: Curvature, vertices: &mut [DiskPoint], triangles: &[[usize; 3]], fixed: &[bool], h: f64) {
    let (shortest, longest) = (0.6 * h, 1.8 * h);
    let mut neighbours: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); vertices.len()];
    for (f, t) in triangles.iter().enumerate() {
        for i in 0..3 {
            incident[t[i]].push(f);
            let (u, v) = (t[i], t[(i + 1) % 3]);
            neighbours[u].push(v);
            neighbours[v].push(u);
        }
    }
    let old = vertices.to_vec();
    for (v, nbrs) in neighbours.iter_mut().enumerate() {
        if fixed[v] {
            continue;
        }
        nbrs.sort_unstable();
        nbrs.dedup();
        let p = old[v];
        let (mut sx, mut sy) = (0.0, 0.0);
        for &n in nbrs.iter() {
            let q = if a.is_flat() { old[n] } else { mobius_to_origin(p, old[n]) };
            sx += q.x;
            sy += q.y;
        }
        let k = nbrs.len() as f64;
        let mean = DiskPoint::new(sx / k, sy / k);
        let candidate = if a.is_flat() { mean } else { mobius_from_origin(p, mean) };
        // keep the move only if incident triangles stay counter-clockwise and
        // incident edges stay well inside the audited length range
        vertices[v] = candidate;
        let ok = incident[v].iter().all(|&f| {
            let t = triangles[f];
            model_orientation(vertices[t[0]], vertices[t[1]], vertices[t[2]]) > 0.0
        }) && nbrs.iter().all(|&n| {
            distance(vertices[v], vertices[n], a).is_ok_and(|l| (shortest..=longest).contains(&l))
        });
        if !ok {
            vertices[v] = p;
        }
    }
}

/// The disk isometry `z ↦ (z − p) / (1 − p̄ z)` applied to `z`.
fn mobius_to_origin(p: DiskPoint, z: DiskPoint) -> DiskPoint {
    let (p, z) = (Complex64::new(p.x, p.y), Complex64::new(z.x, z.y));
    let w = (z - p) / (1.0 - p.conj() * z);
    DiskPoint::new(w.re, w.im)
}

/// Inverse of [`mobius_to_origin`]: `w ↦ (w + p) / (1 + p̄ w)`.
fn mobius_from_origin(p: DiskPoint, w: DiskPoint) -> DiskPoint {
    let (p, w) = (Complex64::new(p.x, p.y), Complex64::new(w.x, w.y));
    let z = (w + p) / (1.0 + p.conj() * w);
    DiskPoint::new(z.re, z.im)
}

fn zip_rings(
    vertices: &[DiskPoint],
    inner_start: usize,
    m_in: usize,
    outer_start: usize,
    m_out: usize,
    triangles: &mut Vec<[usize; 3]>,
) {
    let inner = |j: usize| inner_start + j % m_in;
    let outer = |k: usize| outer_start + k % m_out;
    let len_sq = |u: usize, v: usize| {
        let (p, q) = (vertices[u], vertices[v]);
        (p.x - q.x).powi(2) + (p.y - q.y).powi(2)
    };
    let (mut j, mut k) = (0usize, 0usize);
    while j < m_in || k < m_out {
        // take the shorter of the two candidate diagonals
        let advance_inner = k == m_out
            || (j < m_in && len_sq(inner(j + 1), outer(k)) <= len_sq(inner(j), outer(k + 1)));
        if advance_inner {
            triangles.push([inner(j), outer(k), inner(j + 1)]);
            j += 1;
        } else {
            triangles.push([inner(j), outer(k), outer(k + 1)]);
            k += 1;
        }
    }
}

/// The radial cutoff profile: 1 on `[0, 1]`, 0 on `[2, ∞)`, and the cubic
/// smoothstep `1 − 3s² + 2s³` with `s = t − 1` in between. `sup |φ′| = 3/2`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CutoffProfile;

impl CutoffProfile {
    pub fn value(self, t: f64) -> f64 {
        if t <= 1.0 {
            1.0
        } else if t >= 2.0 {
            0.0
        } else {
            let s = t - 1.0;
            1.0 - 3.0 * s * s + 2.0 * s * s * s
        }
    }

    pub fn derivative(self, t: f64) -> f64 {
        if t <= 1.0 || t >= 2.0 {
            0.0
        } else {
            let s = t - 1.0;
            6.0 * s * (s - 1.0)
        }
    }

    pub const MAX_SLOPE: f64 = 1.5;
}

/// `φ_R(v) = φ(ρ(v) / R)` sampled at every vertex.
pub fn cutoff_cochain(mesh: &TriMesh, radius: f64) -> Result<Cochain> {
    if !(radius.is_finite() && radius > 1.0) {
        return Err(Error::Domain(format!("cutoff radius must exceed 1, got {radius}")));
    }
    let values = mesh.vertex_radii().into_iter().map(|rho| CutoffProfile.value(rho / radius)).collect();
    Ok(Cochain::new(0, values))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hyp(a: f64) -> Curvature {
        Curvature::new(a).unwrap()
    }

    #[test]
    fn distance_examples() {
        let o = DiskPoint::ORIGIN;
        assert_eq!(distance(o, o, hyp(1.0)).unwrap(), 0.0);
        let d = distance(o, DiskPoint::new(0.3, 0.4), Curvature::FLAT).unwrap();
        assert!((d - 0.5).abs() < 1e-15);
        // ∫₀^0.5 2/(1−s²) ds = 2 artanh(0.5) = ln 3
        let d = distance(o, DiskPoint::new(0.5, 0.0), hyp(1.0)).unwrap();
        assert!((d - 3f64.ln()).abs() < 1e-14);
    }

    #[test]
    fn distance_rejects_points_outside_disk() {
        let err = distance(DiskPoint::ORIGIN, DiskPoint::new(1.0, 0.0), hyp(1.0));
        assert!(matches!(err, Err(Error::Domain(_))));
        // the flat plane has no such restriction
        assert!(distance(DiskPoint::ORIGIN, DiskPoint::new(3.0, 0.0), Curvature::FLAT).is_ok());
    }

    #[test]
    fn curvature_must_be_nonnegative() {
        assert!(Curvature::new(-0.5).is_err());
        assert!(Curvature::new(f64::NAN).is_err());
    }

    #[test]
    fn area_examples() {
        let flat = triangle_area(1.0, 1.0, 1.0, Curvature::FLAT).unwrap();
        assert!((flat - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(triangle_area(1.0, 1.0, 2.0, Curvature::FLAT).unwrap(), 0.0);
        // frozen from quadrature of the area element 4/(1−r²)² over the model triangle
        let h = triangle_area(1.0, 1.0, 1.0, hyp(1.0)).unwrap();
        assert!((h - 0.385_199_037_055_711).abs() < 1e-12, "{h}");
    }

    #[test]
    fn area_rejects_impossible_sides() {
        assert!(matches!(triangle_area(1.0, 1.0, 3.0, Curvature::FLAT), Err(Error::Domain(_))));
        assert!(matches!(triangle_area(1.0, 0.0, 1.0, hyp(1.0)), Err(Error::Domain(_))));
    }

    #[test]
    fn small_hyperbolic_triangles_approach_heron() {
        for &(l1, l2, l3) in &[(1e-3, 1e-3, 1e-3), (8e-4, 6e-4, 1e-3), (5e-4, 9e-4, 7e-4)] {
            let e = triangle_area(l1, l2, l3, Curvature::FLAT).unwrap();
            let h = triangle_area(l1, l2, l3, hyp(1.0)).unwrap();
            assert!(((h - e) / e).abs() < 1e-5, "{h} vs {e}");
        }
    }

    #[test]
    fn smallest_flat_ball() {
        let m = ball_mesh(Curvature::FLAT, 0.1, 0.1).unwrap();
        assert_eq!(m.vertices().len(), 7);
        assert_eq!(m.triangles().len(), 6);
    }

    #[test]
    fn ball_mesh_rejects_bad_parameters() {
        assert!(matches!(ball_mesh(Curvature::FLAT, 0.0, 0.1), Err(Error::Configuration(_))));
        assert!(matches!(ball_mesh(Curvature::FLAT, 1.0, 2.0), Err(Error::Configuration(_))));
        assert!(matches!(ball_mesh(hyp(1.0), 1.0, -0.1), Err(Error::Configuration(_))));
    }

    #[test]
    fn ball_mesh_is_deterministic() {
        let a = ball_mesh(hyp(1.0), 1.0, 0.2).unwrap();
        let b = ball_mesh(hyp(1.0), 1.0, 0.2).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.checksum(), b.checksum());
    }

    #[test]
    fn hyperbolic_ball_area() {
        let m = ball_mesh(hyp(1.0), 3.0, 0.1).unwrap();
        let exact = 2.0 * PI * (3f64.cosh() - 1.0);
        let rel = (m.total_area() - exact).abs() / exact;
        assert!(rel < 0.02, "relative area error {rel}");
    }

    #[test]
    fn mesh_json_round_trip_preserves_checksum() {
        let m = ball_mesh(hyp(0.5), 1.0, 0.25).unwrap();
        let back = TriMesh::from_json(&m.to_json().unwrap()).unwrap();
        assert_eq!(back.checksum(), m.checksum());
    }

    #[test]
    fn mesh_validation_catches_clockwise_triangles() {
        let v = vec![DiskPoint::new(0.0, 0.0), DiskPoint::new(0.1, 0.0), DiskPoint::new(0.0, 0.1)];
        assert!(TriMesh::new(Curvature::FLAT, v.clone(), vec![[0, 1, 2]], None).is_ok());
        assert!(matches!(
            TriMesh::new(Curvature::FLAT, v, vec![[0, 2, 1]], None),
            Err(Error::Topology(_))
        ));
    }

    #[test]
    fn cutoff_examples() {
        let p = CutoffProfile;
        assert_eq!(p.value(0.5), 1.0);
        assert_eq!(p.value(2.5), 0.0);
        assert!((p.value(1.5) - 0.5).abs() < 1e-15);
        let max = (0..=1000).map(|i| p.derivative(1.0 + i as f64 / 1000.0).abs()).fold(0.0, f64::max);
        assert!((max - CutoffProfile::MAX_SLOPE).abs() < 1e-12);
    }

    #[test]
    fn cutoff_requires_radius_above_one() {
        let m = ball_mesh(Curvature::FLAT, 1.0, 0.25).unwrap();
        assert!(matches!(cutoff_cochain(&m, 1.0), Err(Error::Domain(_))));
        let phi = cutoff_cochain(&m, 1.5).unwrap();
        assert!(phi.values().iter().all(|&v| v == 1.0));
    }
}
