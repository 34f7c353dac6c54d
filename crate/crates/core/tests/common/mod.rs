//! Independent reference solutions shared by the integration tests.

#![allow(dead_code)]

use hygroplate::geometry::QuadPoint;
use hygroplate::material::{LaminaProperties, LaminateStack, MaterialTable, PlyMaterial};
use nalgebra::{Matrix3, Point2, SymmetricEigen};

pub fn cross_ply(h: f64) -> LaminateStack {
    LaminateStack::uniform(
        &[0.0, 90.0, 90.0, 0.0],
        h,
        PlyMaterial::Table(MaterialTable::graphite_epoxy()),
    )
    .unwrap()
}

pub fn isotropic(h: f64, e: f64, nu: f64, rho: f64) -> LaminateStack {
    LaminateStack::uniform(&[0.0], h, PlyMaterial::Fixed(LaminaProperties::isotropic(e, nu, rho))).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Stiffness and inertia of the `(w, beta_x, beta_y)` amplitudes of the
/// simply supported `(m, n)` mode of an isotropic Mindlin plate.
fn navier_operators(e: f64, nu: f64, rho: f64, a: f64, b: f64, h: f64, m: usize, n: usize) -> (Matrix3<f64>, Matrix3<f64>) {
    let d = e * h.powi(3) / (12.0 * (1.0 - nu * nu));
    let ks = 5.0 / 6.0 * e / (2.0 * (1.0 + nu)) * h;
    let al = m as f64 * std::f64::consts::PI / a;
    let be = n as f64 * std::f64::consts::PI / b;
    let k = Matrix3::new(
        ks * (al * al + be * be),
        ks * al,
        ks * be,
        ks * al,
        d * (al * al + 0.5 * (1.0 - nu) * be * be) + ks,
        0.5 * d * (1.0 + nu) * al * be,
        ks * be,
        0.5 * d * (1.0 + nu) * al * be,
        d * (be * be + 0.5 * (1.0 - nu) * al * al) + ks,
    );
    let mass = Matrix3::from_diagonal(&nalgebra::Vector3::new(rho * h, rho * h.powi(3) / 12.0, rho * h.powi(3) / 12.0));
    (k, mass)
}

/// Lowest `count` flexural circular frequencies of a simply supported
/// isotropic Mindlin plate (shear factor 5/6, rotary inertia included).
pub fn navier_frequencies(e: f64, nu: f64, rho: f64, a: f64, b: f64, h: f64, count: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for m in 1..=8 {
        for n in 1..=8 {
            let (k, mass) = navier_operators(e, nu, rho, a, b, h, m, n);
            let s = Matrix3::from_diagonal(&mass.diagonal().map(|x| 1.0 / x.sqrt()));
            let eig = SymmetricEigen::new(s * k * s);
            out.push(eig.eigenvalues.min().sqrt());
        }
    }
    out.sort_by(f64::total_cmp);
    out.truncate(count);
    out
}

/// Critical uniaxial edge load `N_xx` of the same plate.
pub fn navier_buckling(e: f64, nu: f64, a: f64, b: f64, h: f64) -> f64 {
    let mut best = f64::INFINITY;
    for m in 1..=10 {
        for n in 1..=4 {
            let (k, _) = navier_operators(e, nu, 1.0, a, b, h, m, n);
            let rot = k.fixed_view::<2, 2>(1, 1).into_owned();
            let c = nalgebra::Vector2::new(k[(0, 1)], k[(0, 2)]);
            let schur = k[(0, 0)] - (c.transpose() * rot.try_inverse().unwrap() * c)[0];
            let al = m as f64 * std::f64::consts::PI / a;
            best = best.min(schur / (al * al));
        }
    }
    best
}

/// Parent-space material polygon of an element cut by one straight chord,
/// found by walking the element boundary. `None` unless exactly two edges
/// change sign.
pub fn material_polygon(phi: &[f64; 4]) -> Option<Vec<Point2<f64>>> {
    let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(x, y)| Point2::new(x, y));
    let mut poly = Vec::new();
    let mut crossings = 0;
    for k in 0..4 {
        let j = (k + 1) % 4;
        if phi[k] > 0.0 {
            poly.push(corners[k]);
        }
        if (phi[k] > 0.0) != (phi[j] > 0.0) {
            crossings += 1;
            let t = phi[k] / (phi[k] - phi[j]);
            poly.push(corners[k] + (corners[j] - corners[k]) * t);
        }
    }
    (crossings == 2).then_some(poly)
}

/// Signed side of `p` relative to the line through the two chord points of
/// the polygon, oriented positive towards the material corners.
fn chord_indicator(phi: &[f64; 4], poly: &[Point2<f64>], p: Point2<f64>) -> f64 {
    let corners = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)].map(|(x, y)| Point2::new(x, y));
    let on_edge = |q: &Point2<f64>| !corners.iter().any(|c| (c - q).norm() < 1e-15);
    let chord: Vec<&Point2<f64>> = poly.iter().filter(|q| on_edge(q)).collect();
    let (a, b) = (chord[0], chord[1]);
    let side = |q: Point2<f64>| (b.x - a.x) * (q.y - a.y) - (b.y - a.y) * (q.x - a.x);
    let k = (0..4).find(|&k| phi[k] > 0.0).unwrap();
    let s = side(corners[k]).signum();
    if side(p) * s >= 0.0 {
        1.0
    } else {
        0.0
    }
}

fn gauss_legendre_4() -> [(f64, f64); 4] {
    let a = (3.0 / 7.0 - 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
    let b = (3.0 / 7.0 + 2.0 / 7.0 * (6.0f64 / 5.0).sqrt()).sqrt();
    let wa = (18.0 + 30f64.sqrt()) / 36.0;
    let wb = (18.0 - 30f64.sqrt()) / 36.0;
    [(-b, wb), (-a, wa), (a, wa), (b, wb)]
}

/// Collapsed 4 x 4 Gauss rule on each fan triangle of the material polygon
/// (48 points for a pentagon), each point weighted by the chord indicator.
pub fn brute_force_points(phi: &[f64; 4]) -> Option<Vec<QuadPoint>> {
    let poly = material_polygon(phi)?;
    let g = gauss_legendre_4();
    let mut out = Vec::new();
    for k in 1..poly.len() - 1 {
        let (p0, p1, p2) = (poly[0], poly[k], poly[k + 1]);
        let jac = ((p1 - p0).x * (p2 - p0).y - (p1 - p0).y * (p2 - p0).x).abs();
        for &(s, ws) in &g {
            for &(t, wt) in &g {
                let u = 0.5 * (1.0 + s);
                let v = 0.5 * (1.0 + t) * (1.0 - u);
                let w = ws * wt * 0.25 * (1.0 - u) * jac;
                let p = p0 + (p1 - p0) * u + (p2 - p0) * v;
                out.push(QuadPoint::new(p.x, p.y, w * chord_indicator(phi, &poly, p)));
            }
        }
    }
    Some(out)
}

/// Largest absolute entry difference over the largest absolute entry.
pub fn matrix_rel_diff<const R: usize, const C: usize>(
    a: &nalgebra::SMatrix<f64, R, C>,
    b: &nalgebra::SMatrix<f64, R, C>,
) -> f64 {
    let scale = b.amax().max(a.amax());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).amax() / scale
    }
}
