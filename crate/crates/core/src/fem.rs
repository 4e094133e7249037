//! P1 finite elements for the linear (p = 2) Robin, Neumann and Dirichlet
//! eigenproblems on triangle meshes.
//!
//! The weak form of −Δu = λu with |∇u|⁰·∂u/∂ν + αu = 0 is
//!
//! ```text
//! ∫_Ω ∇u·∇φ dx + α ∫_{∂Ω} u φ dσ = λ ∫_Ω u φ dx,
//! ```
//!
//! which discretizes to the symmetric pencil (K + αB)·v = λ·M·v. All三
//! element integrals are exact for P1 basis functions: per-triangle
//! stiffness from the constant gradients, mass = area/12·[[2,1,1],[1,2,1],
//! [1,1,2]], boundary mass per edge = length/6·[[2,1],[1,2]].
//!
//! α may be negative: the pencil stays symmetric, eigenvalues may go
//! negative, and the solver shifts by a rigorous bound derived from the
//! largest eigenvalue of (B, M) to keep the factorization positive
//! definite.

use crate::error::{Error, Result};
use crate::linalg::{pencil_max_eig, smallest_eigs, SparseSym};
use crate::mesh::Mesh;
use crate::spectrum::{ModeProvenance, Spectrum, SpectrumEntry};

/// Assembled FEM matrices for one mesh: stiffness K, mass M, boundary
/// mass B (α factored out), all node-indexed and symmetric.
#[derive(Debug, Clone)]
pub struct FemPencil {
    pub k: SparseSym,
    pub m: SparseSym,
    pub b: SparseSym,
    pub n_nodes: usize,
}

/// Assemble the P1 pencil. Fails on an invalid mesh or a degenerate
/// triangle.
pub fn assemble(mesh: &Mesh) -> Result<FemPencil> {
    mesh.validate()?;
    let n = mesh.nodes.len();
    let mut kt = Vec::with_capacity(9 * mesh.triangles.len());
    let mut mt = Vec::with_capacity(9 * mesh.triangles.len());
    for (t, tri) in mesh.triangles.iter().enumerate() {
        let p = [mesh.nodes[tri[0]], mesh.nodes[tri[1]], mesh.nodes[tri[2]]];
        let area = 0.5
            * ((p[1][0] - p[0][0]) * (p[2][1] - p[0][1])
                - (p[2][0] - p[0][0]) * (p[1][1] - p[0][1]));
        if !(area > 0.0) {
            return Err(Error::InvalidMesh(format!("triangle {t} has area {area}")));
        }
        // ∇φᵢ is constant: rotate the opposite edge by 90° and scale by 1/(2A)
        let grad = |i: usize| -> [f64; 2] {
            let a = p[(i + 1) % 3];
            let b = p[(i + 2) % 3];
            [(a[1] - b[1]) / (2.0 * area), (b[0] - a[0]) / (2.0 * area)]
        };
        let g = [grad(0), grad(1), grad(2)];
        for i in 0..3 {
            for j in 0..3 {
                let kij = area * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                kt.push((tri[i], tri[j], kij));
                let mij = area / 12.0 * if i == j { 2.0 } else { 1.0 };
                mt.push((tri[i], tri[j], mij));
            }
        }
    }
    let mut bt = Vec::with_capacity(4 * mesh.boundary_edges.len());
    for &[a, b] in &mesh.boundary_edges {
        let pa = mesh.nodes[a];
        let pb = mesh.nodes[b];
        let len = ((pa[0] - pb[0]).powi(2) + (pa[1] - pb[1]).powi(2)).sqrt();
        bt.push((a, a, len / 3.0));
        bt.push((b, b, len / 3.0));
        bt.push((a, b, len / 6.0));
        bt.push((b, a, len / 6.0));
    }
    // make sure B shares the full node set even if some nodes are interior
    bt.push((n - 1, n - 1, 0.0));
    bt.push((0, 0, 0.0));
    Ok(FemPencil {
        k: SparseSym::from_triplets(n, &kt),
        m: SparseSym::from_triplets(n, &mt),
        b: SparseSym::from_triplets(n, &bt),
        n_nodes: n,
    })
}

/// Reusable Robin solver for one mesh: keeps the assembled pencil, the
/// (B, M) spectral bound for negative-α shifts, and the last eigenbasis as
/// a warm start for the next α. Values are identical to fresh solves; only
/// the iteration count changes.
pub struct RobinSession {
    pub pencil: FemPencil,
    warm: Option<Vec<Vec<f64>>>,
    rho_max: Option<f64>,
}

impl RobinSession {
    pub fn new(mesh: &Mesh) -> Result<RobinSession> {
        Ok(RobinSession { pencil: assemble(mesh)?, warm: None, rho_max: None })
    }

    pub fn from_pencil(pencil: FemPencil) -> RobinSession {
        RobinSession { pencil, warm: None, rho_max: None }
    }

    /// k smallest eigenvalues of (K + αB)·v = λ·M·v, sorted by signed
    /// value, each with residual ≤ tol·‖Mv‖.
    pub fn eigs(&mut self, alpha: f64, k: usize, tol: f64) -> Result<Spectrum> {
        let (s, vecs) = self.eigenpairs(alpha, k, tol)?;
        self.warm = Some(vecs);
        Ok(s)
    }

    pub fn eigenpairs(
        &mut self,
        alpha: f64,
        k: usize,
        tol: f64,
    ) -> Result<(Spectrum, Vec<Vec<f64>>)> {
        let n = self.pencil.n_nodes;
        if k >= n {
            return Err(Error::InvalidDomain(format!(
                "k={k} eigenvalues requested from a mesh with only {n} nodes"
            )));
        }
        if !alpha.is_finite() {
            return Err(Error::InvalidDomain(format!("alpha must be finite, got {alpha}")));
        }
        let a = SparseSym::combine(&[(1.0, &self.pencil.k), (alpha, &self.pencil.b)]);
        let mut shift = if alpha >= 0.0 {
            1.0
        } else {
            let rho = match self.rho_max {
                Some(r) => r,
                None => {
                    let r = pencil_max_eig(&self.pencil.b, &self.pencil.m)?;
                    self.rho_max = Some(r);
                    r
                }
            };
            1.0 + 1.05 * alpha.abs() * rho
        };
        let mut last_err = None;
        for _try in 0..4 {
            match smallest_eigs(&a, &self.pencil.m, k, tol, shift, self.warm.as_deref()) {
                Ok(res) => {
                    let entries = res
                        .values
                        .iter()
                        .zip(&res.residuals)
                        .enumerate()
                        .map(|(i, (&v, &r))| SpectrumEntry {
                            value: v,
                            multiplicity: 1,
                            provenance: ModeProvenance {
                                component: 0,
                                mode: format!("#{}", i + 1),
                                solver: "fem2d".into(),
                                abs_error: r * v.abs().max(1.0),
                            },
                        })
                        .collect();
                    return Ok((Spectrum::from_entries(entries)?, res.vectors));
                }
                Err(e @ Error::NoConvergence(_)) => {
                    shift *= 4.0;
                    last_err = Some(e);
                }
                Err(e) => return Err(e),
            }
        }
        Err(last_err.unwrap())
    }
}

/// One-shot Robin eigenvalues (see [`RobinSession::eigs`]).
pub fn robin_eigs(mesh: &Mesh, alpha: f64, k: usize, tol: f64) -> Result<Spectrum> {
    RobinSession::new(mesh)?.eigs(alpha, k, tol)
}

/// Robin eigenvalues together with their nodal eigenvectors.
pub fn robin_eigenpairs(
    mesh: &Mesh,
    alpha: f64,
    k: usize,
    tol: f64,
) -> Result<(Spectrum, Vec<Vec<f64>>)> {
    RobinSession::new(mesh)?.eigenpairs(alpha, k, tol)
}

/// k smallest Dirichlet eigenvalues: boundary nodes are eliminated from
/// the pencil and the reduced problem solved.
pub fn dirichlet_eigs(mesh: &Mesh, k: usize, tol: f64) -> Result<Spectrum> {
    let pencil = assemble(mesh)?;
    let boundary = mesh.boundary_nodes();
    let mut on_boundary = vec![false; pencil.n_nodes];
    for &b in &boundary {
        on_boundary[b] = true;
    }
    let free: Vec<usize> = (0..pencil.n_nodes).filter(|&i| !on_boundary[i]).collect();
    if k >= free.len() {
        return Err(Error::InvalidDomain(format!(
            "k={k} Dirichlet eigenvalues requested but the mesh has only {} interior nodes",
            free.len()
        )));
    }
    let kr = pencil.k.restrict(&free);
    let mr = pencil.m.restrict(&free);
    let res = smallest_eigs(&kr, &mr, k, tol, 1.0, None)?;
    let entries = res
        .values
        .iter()
        .zip(&res.residuals)
        .enumerate()
        .map(|(i, (&v, &r))| SpectrumEntry {
            value: v,
            multiplicity: 1,
            provenance: ModeProvenance {
                component: 0,
                mode: format!("#{}", i + 1),
                solver: "fem2d".into(),
                abs_error: r * v.abs().max(1.0),
            },
        })
        .collect();
    Spectrum::from_entries(entries)
}

/// Discrete Rayleigh quotient (vᵀKv + α·vᵀBv) / (vᵀMv) on the mesh's P1
/// space.
pub fn rayleigh_quotient_p2(mesh: &Mesh, v: &[f64], alpha: f64) -> Result<f64> {
    let pencil = assemble(mesh)?;
    rayleigh_on_pencil(&pencil, v, alpha)
}

pub fn rayleigh_on_pencil(pencil: &FemPencil, v: &[f64], alpha: f64) -> Result<f64> {
    if v.len() != pencil.n_nodes {
        return Err(Error::InvalidDomain(format!(
            "vector length {} does not match node count {}",
            v.len(),
            pencil.n_nodes
        )));
    }
    let den = pencil.m.quad(v, v);
    if !(den > 0.0) {
        return Err(Error::InvalidDomain(
            "Rayleigh quotient needs a nonzero vector (vᵀMv = 0)".into(),
        ));
    }
    Ok((pencil.k.quad(v, v) + alpha * pencil.b.quad(v, v)) / den)
}

/// Richardson error estimate for the fine value given coarse/fine values
/// from meshes with spacing h and h/2 and a rate-2 method:
/// |fine − exact| ≈ |fine − coarse| / 3.
pub fn estimate_error(coarse: f64, fine: f64) -> f64 {
    (fine - coarse).abs() / 3.0
}

/// Rate-2 Richardson extrapolation of the coarse/fine pair.
pub fn richardson_extrapolate(coarse: f64, fine: f64) -> f64 {
    fine + (fine - coarse) / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_disk_mesh, generate_rect_mesh};
    use std::f64::consts::PI;

    #[test]
    fn unit_right_triangle_stiffness() {
        let mesh = Mesh {
            nodes: vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]],
            triangles: vec![[0, 1, 2]],
            boundary_edges: vec![[0, 1], [1, 2], [2, 0]],
            geometry: None,
        };
        let p = assemble(&mesh).unwrap();
        assert!((p.k.get(0, 0) - 1.0).abs() < 1e-14);
        assert!((p.k.get(1, 1) - 0.5).abs() < 1e-14);
        assert!((p.k.get(2, 2) - 0.5).abs() < 1e-14);
    }

    #[test]
    fn pencil_invariants() {
        for mesh in [generate_rect_mesh(2.0, 1.0, 6, 3), generate_disk_mesh(1.0, 3)] {
            let p = assemble(&mesh).unwrap();
            assert!(p.k.asymmetry() < 1e-12);
            assert!(p.m.asymmetry() < 1e-12);
            assert!(p.b.asymmetry() < 1e-12);
            // constants in the stiffness kernel
            let ones = vec![1.0; p.n_nodes];
            let mut y = vec![0.0; p.n_nodes];
            p.k.matvec(&ones, &mut y);
            let worst = y.iter().fold(0.0f64, |w, v| w.max(v.abs()));
            assert!(worst < 1e-12, "K·1 = {worst}");
            assert!((p.m.entry_sum() - mesh.total_area()).abs() < 1e-12);
            assert!((p.b.entry_sum() - mesh.boundary_length()).abs() < 1e-12);
        }
    }

    #[test]
    fn neumann_ground_state_is_constant_zero() {
        let mesh = generate_rect_mesh(1.0, 1.0, 4, 4);
        let (s, vecs) = robin_eigenpairs(&mesh, 0.0, 2, 1e-9).unwrap();
        let l1 = s.value(1).unwrap();
        assert!(l1.abs() < 1e-8, "lambda_1 = {l1}");
        let v = &vecs[0];
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let spread = v.iter().fold(0.0f64, |w, x| w.max((x - mean).abs()));
        assert!(spread < 1e-4 * mean.abs(), "ground state not constant");
        // second Neumann eigenvalue approximates π²
        let l2 = s.value(2).unwrap();
        assert!((l2 - PI * PI).abs() < 0.05 * PI * PI, "lambda_2 = {l2}");
    }

    #[test]
    fn robin_square_matches_tensor_sums() {
        let mesh = generate_rect_mesh(1.0, 1.0, 8, 8);
        let fem = robin_eigs(&mesh, 1.0, 3, 1e-8).unwrap();
        let exact = crate::analytic::rectangle_spectrum(1.0, 1.0, 1.0, 3).unwrap();
        for (f, e) in fem.flattened().iter().zip(exact.flattened()) {
            assert!((f - e).abs() < 0.01 * e, "fem {f} vs exact {e}");
        }
    }

    #[test]
    fn dirichlet_square_and_domination() {
        let mesh = generate_rect_mesh(1.0, 1.0, 16, 16);
        let mu = dirichlet_eigs(&mesh, 2, 1e-8).unwrap();
        let mu1 = mu.value(1).unwrap();
        assert!((mu1 - 2.0 * PI * PI).abs() < 0.01 * 2.0 * PI * PI, "mu_1 = {mu1}");
        // discrete domination: Robin below Dirichlet on the same mesh
        let rob = robin_eigs(&mesh, 7.0, 2, 1e-8).unwrap();
        assert!(rob.value(1).unwrap() < mu1);
        assert!(rob.value(2).unwrap() < mu.value(2).unwrap());
    }

    #[test]
    fn thin_rectangle_dirichlet_dominates_square() {
        let thin = dirichlet_eigs(&generate_rect_mesh(PI, 0.1 * PI, 20, 4), 1, 1e-8)
            .unwrap()
            .value(1)
            .unwrap();
        let square = dirichlet_eigs(&generate_rect_mesh(PI, PI, 12, 12), 1, 1e-8)
            .unwrap()
            .value(1)
            .unwrap();
        assert!(thin > square);
    }

    #[test]
    fn rayleigh_quotient_identities() {
        let mesh = generate_disk_mesh(1.0, 3);
        let ones = vec![1.0; mesh.nodes.len()];
        assert!(rayleigh_quotient_p2(&mesh, &ones, 0.0).unwrap().abs() < 1e-12);
        let q = rayleigh_quotient_p2(&mesh, &ones, 2.0).unwrap();
        let want = 2.0 * mesh.boundary_length() / mesh.total_area();
        assert!((q - want).abs() < 1e-10 * want);

        let (s, vecs) = robin_eigenpairs(&mesh, 2.0, 2, 1e-9).unwrap();
        let q = rayleigh_quotient_p2(&mesh, &vecs[1], 2.0).unwrap();
        assert!((q - s.value(2).unwrap()).abs() < 1e-7 * q.abs().max(1.0));

        let zeros = vec![0.0; mesh.nodes.len()];
        assert!(rayleigh_quotient_p2(&mesh, &zeros, 1.0).is_err());
    }

    #[test]
    fn negative_alpha_gives_negative_ground_state() {
        let mesh = generate_rect_mesh(1.0, 1.0, 8, 8);
        let s = robin_eigs(&mesh, -1.0, 2, 1e-8).unwrap();
        let l1 = s.value(1).unwrap();
        // Rayleigh quotient of the constant is α·|∂Ω|/|Ω| = −4
        assert!(l1 <= -4.0, "lambda_1 = {l1}");
        assert!(l1 > -40.0, "lambda_1 = {l1} implausibly low");
        // still sorted
        assert!(s.value(2).unwrap() >= l1);
    }

    #[test]
    fn alpha_monotonicity_on_fixed_mesh() {
        let mesh = generate_disk_mesh(1.0, 4);
        let mut session = RobinSession::new(&mesh).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for alpha in [-2.0, -0.5, 0.0, 0.5, 2.0, 8.0] {
            let l1 = session.eigs(alpha, 1, 1e-8).unwrap().value(1).unwrap();
            assert!(l1 >= prev, "alpha={alpha}: {l1} < {prev}");
            prev = l1;
        }
    }

    #[test]
    fn richardson_helpers() {
        assert!((estimate_error(1.0, 1.3) - 0.1).abs() < 1e-15);
        assert!((richardson_extrapolate(1.0, 1.3) - 1.4).abs() < 1e-15);
        // square Neumann lambda_2: extrapolated value beats both levels
        let coarse_mesh = generate_rect_mesh(1.0, 1.0, 4, 4);
        let fine_mesh = coarse_mesh.refine();
        let c = robin_eigs(&coarse_mesh, 0.0, 2, 1e-9).unwrap().value(2).unwrap();
        let f = robin_eigs(&fine_mesh, 0.0, 2, 1e-9).unwrap().value(2).unwrap();
        let x = richardson_extrapolate(c, f);
        let exact = PI * PI;
        assert!((x - exact).abs() < (f - exact).abs());
        assert!((f - exact).abs() < (c - exact).abs());
    }
}
