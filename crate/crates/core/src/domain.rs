//! Shape descriptions, volume/scaling arithmetic, and the canonical
//! competitor domains D_k (disjoint unions of k equal balls).
//!
//! A [`DomainSpec`] is a value: cloning, scaling and union-building never
//! share mutable state, so domains are safe to pass across threads.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::mesh::Mesh;

/// A computational domain Ω.
#[derive(Debug, Clone, PartialEq)]
pub enum DomainSpec {
    /// Interval (0, L).
    Interval { length: f64 },
    /// Axis-aligned rectangle (0,a) × (0,b).
    Rectangle { a: f64, b: f64 },
    /// Planar disk of the given radius.
    Disk { radius: f64 },
    /// Ball in R^dim. `Ball{dim:1}` is an interval of length 2R and
    /// `Ball{dim:2}` a disk; both are accepted and treated equivalently.
    Ball { dim: u32, radius: f64 },
    /// Triangulated planar domain. `source` names where the mesh came from
    /// (file path or generator tag) for report echoes.
    MeshDomain { mesh: Arc<Mesh>, source: String },
    /// Disjoint union of finitely many components (flat: no nested unions).
    Union(Vec<DomainSpec>),
}

/// Boundary condition selector together with the Rayleigh exponent p.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryParams {
    /// Exponent of the p-Laplacian, in (1, ∞).
    pub p: f64,
    pub condition: BoundaryCondition,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BoundaryCondition {
    /// |∇u|^{p-2} ∂u/∂ν + α |u|^{p-2} u = 0. α may be negative (FEM only).
    Robin(f64),
    /// u = 0 on the boundary; the α → ∞ limit, always solved directly.
    Dirichlet,
    /// Zero flux; identical to Robin(0).
    Neumann,
}

impl BoundaryParams {
    pub fn robin(p: f64, alpha: f64) -> Self {
        BoundaryParams { p, condition: BoundaryCondition::Robin(alpha) }
    }

    /// Robin condition for the linear Laplacian (p = 2).
    pub fn robin2(alpha: f64) -> Self {
        Self::robin(2.0, alpha)
    }

    pub fn dirichlet(p: f64) -> Self {
        BoundaryParams { p, condition: BoundaryCondition::Dirichlet }
    }

    pub fn neumann(p: f64) -> Self {
        BoundaryParams { p, condition: BoundaryCondition::Neumann }
    }

    /// The Robin parameter, with Neumann normalized to α = 0; None for
    /// Dirichlet.
    pub fn robin_alpha(&self) -> Option<f64> {
        match self.condition {
            BoundaryCondition::Robin(a) => Some(a),
            BoundaryCondition::Neumann => Some(0.0),
            BoundaryCondition::Dirichlet => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.p > 1.0 && self.p.is_finite()) {
            return Err(Error::InvalidDomain(format!(
                "exponent p must lie in (1, inf), got {}",
                self.p
            )));
        }
        if let BoundaryCondition::Robin(a) = self.condition {
            if !a.is_finite() {
                return Err(Error::InvalidDomain(format!("alpha must be finite, got {a}")));
            }
        }
        Ok(())
    }
}

/// Volume of the unit ball in R^n (ω_1 = 2, ω_2 = π, ω_n = 2π·ω_{n-2}/n).
pub fn unit_ball_volume(n: u32) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        2 => std::f64::consts::PI,
        _ => unit_ball_volume(n - 2) * 2.0 * std::f64::consts::PI / n as f64,
    }
}

/// Radius of the ball in R^n with the given volume.
pub fn ball_radius_for_volume(n: u32, vol: f64) -> f64 {
    (vol / unit_ball_volume(n)).powf(1.0 / n as f64)
}

impl DomainSpec {
    /// Build a flat union, flattening any nested unions and checking that
    /// all components share one dimension.
    pub fn union(parts: Vec<DomainSpec>) -> Result<DomainSpec> {
        let mut flat = Vec::new();
        for p in parts {
            match p {
                DomainSpec::Union(inner) => flat.extend(inner),
                other => flat.push(other),
            }
        }
        if flat.is_empty() {
            return Err(Error::InvalidDomain("union must have at least one component".into()));
        }
        let d = DomainSpec::Union(flat);
        d.validate()?;
        Ok(d)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            DomainSpec::Interval { length } => positive("interval length", *length),
            DomainSpec::Rectangle { a, b } => {
                positive("rectangle side a", *a)?;
                positive("rectangle side b", *b)
            }
            DomainSpec::Disk { radius } => positive("disk radius", *radius),
            DomainSpec::Ball { dim, radius } => {
                if *dim < 1 {
                    return Err(Error::InvalidDomain("ball dimension must be >= 1".into()));
                }
                positive("ball radius", *radius)
            }
            DomainSpec::MeshDomain { mesh, .. } => mesh.validate(),
            DomainSpec::Union(parts) => {
                if parts.is_empty() {
                    return Err(Error::InvalidDomain(
                        "union must have at least one component".into(),
                    ));
                }
                let mut dim = None;
                for (i, part) in parts.iter().enumerate() {
                    if matches!(part, DomainSpec::Union(_)) {
                        return Err(Error::InvalidDomain(format!(
                            "union component {i} is itself a union; unions must be flat"
                        )));
                    }
                    part.validate()?;
                    let d = part.dim();
                    if *dim.get_or_insert(d) != d {
                        return Err(Error::InvalidDomain(format!(
                            "union mixes dimensions {} and {}",
                            dim.unwrap(),
                            d
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// Spatial dimension of the domain.
    pub fn dim(&self) -> u32 {
        match self {
            DomainSpec::Interval { .. } => 1,
            DomainSpec::Rectangle { .. } | DomainSpec::Disk { .. } => 2,
            DomainSpec::MeshDomain { .. } => 2,
            DomainSpec::Ball { dim, .. } => *dim,
            DomainSpec::Union(parts) => parts.first().map_or(0, |p| p.dim()),
        }
    }

    /// Connected components: the component list for a union, `[self]`
    /// otherwise. (Rectangles, disks, meshes count as one component; meshes
    /// are not decomposed.)
    pub fn components(&self) -> Vec<&DomainSpec> {
        match self {
            DomainSpec::Union(parts) => parts.iter().collect(),
            other => vec![other],
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            DomainSpec::Interval { length } => *length,
            DomainSpec::Rectangle { a, b } => a * b,
            DomainSpec::Disk { radius } => std::f64::consts::PI * radius * radius,
            DomainSpec::Ball { dim, radius } => {
                unit_ball_volume(*dim) * radius.powi(*dim as i32)
            }
            DomainSpec::MeshDomain { mesh, .. } => mesh.total_area(),
            DomainSpec::Union(parts) => parts.iter().map(|p| p.volume()).sum(),
        }
    }

    /// Homothety x ↦ t·x: every length parameter is multiplied by t.
    pub fn scale(&self, t: f64) -> Result<DomainSpec> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::InvalidDomain(format!("scale factor must be > 0, got {t}")));
        }
        Ok(match self {
            DomainSpec::Interval { length } => DomainSpec::Interval { length: length * t },
            DomainSpec::Rectangle { a, b } => DomainSpec::Rectangle { a: a * t, b: b * t },
            DomainSpec::Disk { radius } => DomainSpec::Disk { radius: radius * t },
            DomainSpec::Ball { dim, radius } => {
                DomainSpec::Ball { dim: *dim, radius: radius * t }
            }
            DomainSpec::MeshDomain { mesh, source } => DomainSpec::MeshDomain {
                mesh: Arc::new(mesh.scaled(t)),
                source: format!("{source}*{t}"),
            },
            DomainSpec::Union(parts) => {
                let scaled: Result<Vec<_>> = parts.iter().map(|p| p.scale(t)).collect();
                DomainSpec::Union(scaled?)
            }
        })
    }

    /// Shape equality in the sense of sorted parameter lists: components are
    /// matched up to reordering and parameters compared with relative
    /// tolerance 1e-9. Rigid motions never change these parametric shapes,
    /// so this is congruence for everything except meshes, which must match
    /// node for node.
    pub fn congruent(&self, other: &DomainSpec) -> bool {
        let mut a = self.components().into_iter().map(component_key).collect::<Vec<_>>();
        let mut b = other.components().into_iter().map(component_key).collect::<Vec<_>>();
        if a.len() != b.len() {
            return false;
        }
        let cmp = |x: &(u8, Vec<f64>), y: &(u8, Vec<f64>)| {
            x.0.cmp(&y.0).then_with(|| x.1.partial_cmp(&y.1).unwrap_or(std::cmp::Ordering::Equal))
        };
        a.sort_by(cmp);
        b.sort_by(cmp);
        a.iter().zip(&b).all(|(x, y)| {
            x.0 == y.0
                && x.1.len() == y.1.len()
                && x.1.iter().zip(&y.1).all(|(u, v)| close_rel(*u, *v, 1e-9))
        })
    }
}

fn close_rel(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
}

/// Canonical (tag, parameters) key for congruence comparison. A 1-ball is
/// keyed as the interval of the same length; a 2-ball as the disk.
fn component_key(d: &DomainSpec) -> (u8, Vec<f64>) {
    match d {
        DomainSpec::Interval { length } => (0, vec![*length]),
        DomainSpec::Ball { dim: 1, radius } => (0, vec![2.0 * radius]),
        DomainSpec::Rectangle { a, b } => (1, vec![a.min(*b), a.max(*b)]),
        DomainSpec::Disk { radius } => (2, vec![*radius]),
        DomainSpec::Ball { dim: 2, radius } => (2, vec![*radius]),
        DomainSpec::Ball { dim, radius } => (3, vec![*dim as f64, *radius]),
        DomainSpec::MeshDomain { mesh, .. } => {
            let mut params = vec![mesh.nodes.len() as f64, mesh.triangles.len() as f64];
            for n in &mesh.nodes {
                params.push(n[0]);
                params.push(n[1]);
            }
            (4, params)
        }
        DomainSpec::Union(_) => (5, vec![]),
    }
}

impl fmt::Display for BoundaryParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.condition {
            BoundaryCondition::Robin(a) => write!(f, "p={}, alpha={a}", self.p),
            BoundaryCondition::Dirichlet => write!(f, "p={}, dirichlet", self.p),
            BoundaryCondition::Neumann => write!(f, "p={}, neumann", self.p),
        }
    }
}

impl fmt::Display for DomainSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainSpec::Interval { length } => write!(f, "interval:L={length}"),
            DomainSpec::Rectangle { a, b } => write!(f, "rect:a={a},b={b}"),
            DomainSpec::Disk { radius } => write!(f, "disk:R={radius}"),
            DomainSpec::Ball { dim, radius } => write!(f, "ball:N={dim},R={radius}"),
            DomainSpec::MeshDomain { source, .. } => write!(f, "mesh:{source}"),
            DomainSpec::Union(parts) => {
                write!(f, "union:[")?;
                for (i, p) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{p}")?;
                }
                write!(f, "]")
            }
        }
    }
}

fn positive(what: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidDomain(format!("{what} must be > 0, got {v}")))
    }
}

/// N-dimensional volume |Ω|, additive over unions.
pub fn volume(d: &DomainSpec) -> f64 {
    d.volume()
}

/// The canonical competitor D_k: a disjoint union of k equal balls of total
/// volume m (disks for N = 2, intervals for N = 1). k = 1 yields the single
/// ball itself.
pub fn make_dk(m: f64, k: usize, n: u32) -> Result<DomainSpec> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(Error::InvalidDomain(format!("total volume must be > 0, got {m}")));
    }
    if k < 1 {
        return Err(Error::InvalidDomain("component count k must be >= 1".into()));
    }
    if n < 1 {
        return Err(Error::InvalidDomain("dimension N must be >= 1".into()));
    }
    let each = m / k as f64;
    let ball = match n {
        1 => DomainSpec::Interval { length: each },
        2 => DomainSpec::Disk { radius: ball_radius_for_volume(2, each) },
        _ => DomainSpec::Ball { dim: n, radius: ball_radius_for_volume(n, each) },
    };
    if k == 1 {
        Ok(ball)
    } else {
        Ok(DomainSpec::Union(vec![ball; k]))
    }
}

/// Homothety x ↦ t·x applied to the whole domain.
pub fn scale_domain(d: &DomainSpec, t: f64) -> Result<DomainSpec> {
    d.scale(t)
}

/// Parse the domain DSL:
/// `interval:L=<f>`, `rect:a=<f>,b=<f>`, `disk:R=<f>`, `ball:N=<i>,R=<f>`,
/// `dk:M=<f>,k=<i>,N=<i>`, `mesh:<path>`, `union:[<spec>;<spec>;...]`.
///
/// `mesh:` specs read the referenced file immediately.
pub fn parse_domain(s: &str) -> Result<DomainSpec> {
    let s = s.trim();
    let (scheme, rest) = s
        .split_once(':')
        .ok_or_else(|| Error::InvalidDomain(format!("missing ':' in domain spec '{s}'")))?;
    let d = match scheme {
        "interval" => {
            let kv = parse_params(rest, &["L"])?;
            DomainSpec::Interval { length: kv[0] }
        }
        "rect" => {
            let kv = parse_params(rest, &["a", "b"])?;
            DomainSpec::Rectangle { a: kv[0], b: kv[1] }
        }
        "disk" => {
            let kv = parse_params(rest, &["R"])?;
            DomainSpec::Disk { radius: kv[0] }
        }
        "ball" => {
            let kv = parse_params(rest, &["N", "R"])?;
            DomainSpec::Ball { dim: as_count(kv[0], "N")? as u32, radius: kv[1] }
        }
        "dk" => {
            let kv = parse_params(rest, &["M", "k", "N"])?;
            return make_dk(kv[0], as_count(kv[1], "k")?, as_count(kv[2], "N")? as u32);
        }
        "mesh" => {
            let mesh = crate::mesh::load_mesh_file(rest)?;
            DomainSpec::MeshDomain { mesh: Arc::new(mesh), source: rest.to_string() }
        }
        "union" => {
            let inner = rest
                .strip_prefix('[')
                .and_then(|r| r.strip_suffix(']'))
                .ok_or_else(|| {
                    Error::InvalidDomain("union spec must be union:[...;...]".into())
                })?;
            let parts: Result<Vec<_>> =
                split_top_level(inner, ';').into_iter().map(|p| parse_domain(p)).collect();
            return DomainSpec::union(parts?);
        }
        other => {
            return Err(Error::InvalidDomain(format!("unknown domain kind '{other}'")));
        }
    };
    d.validate()?;
    Ok(d)
}

/// Split on `sep`, ignoring separators inside brackets (nested union specs).
fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (i, c) in s.char_indices() {
        match c {
            '[' => depth += 1,
            ']' => depth = depth.saturating_sub(1),
            c if c == sep && depth == 0 => {
                parts.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

/// Parse `key=value` pairs in the given order.
fn parse_params(rest: &str, keys: &[&str]) -> Result<Vec<f64>> {
    let fields: Vec<&str> = rest.split(',').collect();
    if fields.len() != keys.len() {
        return Err(Error::InvalidDomain(format!(
            "expected parameters {}, got '{rest}'",
            keys.join(",")
        )));
    }
    keys.iter()
        .zip(fields)
        .map(|(key, field)| {
            let (k, v) = field.split_once('=').ok_or_else(|| {
                Error::InvalidDomain(format!("expected {key}=<value>, got '{field}'"))
            })?;
            if k.trim() != *key {
                return Err(Error::InvalidDomain(format!(
                    "expected parameter '{key}', got '{k}'"
                )));
            }
            v.trim().parse::<f64>().map_err(|_| {
                Error::InvalidDomain(format!("cannot parse {key}='{}' as a number", v.trim()))
            })
        })
        .collect()
}

fn as_count(v: f64, what: &str) -> Result<usize> {
    if v.fract() == 0.0 && v >= 1.0 && v <= 1e9 {
        Ok(v as usize)
    } else {
        Err(Error::InvalidDomain(format!("{what} must be a positive integer, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn volumes_of_basic_shapes() {
        assert_eq!(volume(&DomainSpec::Interval { length: 2.0 }), 2.0);
        assert!((volume(&DomainSpec::Disk { radius: 1.0 }) - PI).abs() < 1e-15);
        let two_disks = DomainSpec::union(vec![
            DomainSpec::Disk { radius: 1.0 },
            DomainSpec::Disk { radius: 1.0 },
        ])
        .unwrap();
        assert!((volume(&two_disks) - 2.0 * PI).abs() < 1e-14);
        // ω_3 = 4π/3
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
    }

    #[test]
    fn make_dk_shapes_and_volumes() {
        let d = make_dk(2.0 * PI, 2, 2).unwrap();
        match &d {
            DomainSpec::Union(parts) => {
                assert_eq!(parts.len(), 2);
                for p in parts {
                    match p {
                        DomainSpec::Disk { radius } => assert!((radius - 1.0).abs() < 1e-12),
                        _ => panic!("expected disks"),
                    }
                }
            }
            _ => panic!("expected union"),
        }

        let d3 = make_dk(1.0, 3, 2).unwrap();
        let r_expect = (1.0 / (3.0 * PI)).sqrt();
        for p in d3.components() {
            match p {
                DomainSpec::Disk { radius } => assert!((radius - r_expect).abs() < 1e-14),
                _ => panic!("expected disks"),
            }
        }

        let b = make_dk(1.0, 1, 3).unwrap();
        match b {
            DomainSpec::Ball { dim: 3, radius } => {
                assert!((radius - (3.0 / (4.0 * PI)).powf(1.0 / 3.0)).abs() < 1e-12)
            }
            _ => panic!("expected a single 3-ball"),
        }

        for (m, k, n) in [(1.0, 3, 2), (2.5, 4, 3), (0.7, 2, 1), (5.0, 1, 2)] {
            let d = make_dk(m, k, n).unwrap();
            assert!((volume(&d) - m).abs() < 1e-12 * m);
        }
    }

    #[test]
    fn scaling_multiplies_lengths_and_volume() {
        let d = DomainSpec::Rectangle { a: 1.0, b: 2.0 };
        match scale_domain(&d, 0.5).unwrap() {
            DomainSpec::Rectangle { a, b } => {
                assert_eq!(a, 0.5);
                assert_eq!(b, 1.0);
            }
            _ => panic!(),
        }
        let u = DomainSpec::union(vec![
            DomainSpec::Disk { radius: 1.0 },
            DomainSpec::Disk { radius: 1.0 },
        ])
        .unwrap();
        let s = scale_domain(&u, 3.0).unwrap();
        assert!((volume(&s) - 9.0 * volume(&u)).abs() < 1e-12 * volume(&s));
    }

    #[test]
    fn dsl_round_trips() {
        for s in [
            "interval:L=2",
            "rect:a=1,b=2",
            "disk:R=1",
            "ball:N=3,R=0.5",
            "union:[disk:R=1;disk:R=2]",
        ] {
            let d = parse_domain(s).unwrap();
            let again = parse_domain(&d.to_string()).unwrap();
            assert_eq!(d, again, "{s}");
        }
    }

    #[test]
    fn dsl_dk_expands_to_union() {
        let d = parse_domain("dk:M=1,k=3,N=2").unwrap();
        assert_eq!(d.components().len(), 3);
        assert!((volume(&d) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn dsl_rejects_malformed_specs() {
        for s in [
            "interval",
            "interval:L=-1",
            "rect:a=1",
            "disk:R=zero",
            "ball:N=0,R=1",
            "pentagon:R=1",
            "union:[]",
            "dk:M=1,k=0,N=2",
        ] {
            assert!(parse_domain(s).is_err(), "expected error for '{s}'");
        }
    }

    #[test]
    fn unions_flatten_and_reject_mixed_dimension() {
        let nested = DomainSpec::union(vec![
            parse_domain("union:[disk:R=1;disk:R=2]").unwrap(),
            DomainSpec::Disk { radius: 3.0 },
        ])
        .unwrap();
        assert_eq!(nested.components().len(), 3);

        let mixed =
            DomainSpec::union(vec![DomainSpec::Disk { radius: 1.0 }, DomainSpec::Interval {
                length: 1.0,
            }]);
        assert!(mixed.is_err());
    }

    #[test]
    fn congruence_ignores_component_order() {
        let a = parse_domain("union:[disk:R=1;disk:R=2]").unwrap();
        let b = parse_domain("union:[disk:R=2;disk:R=1]").unwrap();
        assert!(a.congruent(&b));
        let c = parse_domain("union:[disk:R=1;disk:R=1]").unwrap();
        assert!(!a.congruent(&c));
        // D2 of area 1 vs the hand-built pair of equal disks
        let d2 = make_dk(1.0, 2, 2).unwrap();
        let r = (0.5 / PI).sqrt();
        let pair = DomainSpec::union(vec![
            DomainSpec::Disk { radius: r },
            DomainSpec::Disk { radius: r },
        ])
        .unwrap();
        assert!(d2.congruent(&pair));
    }

    #[test]
    fn boundary_params_validate() {
        assert!(BoundaryParams::robin(2.0, 1.0).validate().is_ok());
        assert!(BoundaryParams::robin(1.0, 1.0).validate().is_err());
        assert!(BoundaryParams::robin(2.0, f64::NAN).validate().is_err());
        assert_eq!(BoundaryParams::neumann(2.0).robin_alpha(), Some(0.0));
        assert_eq!(BoundaryParams::dirichlet(2.0).robin_alpha(), None);
    }
}
