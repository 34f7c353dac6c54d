use nalgebra::Point2;

use crate::error::{Error, Result};

/// Bilinear quadrilateral mesh. Element connectivity is counter-clockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub nodes: Vec<Point2<f64>>,
    pub elements: Vec<[usize; 4]>,
    /// Plate extent `[x_min, x_max] x [y_min, y_max]`.
    pub bounds: [f64; 4],
    /// Element counts for structured meshes, `None` otherwise.
    pub grid: Option<(usize, usize)>,
}

/// Uniform `nx x ny` grid over `[0, a] x [0, b]`, nodes numbered along x first.
pub fn build_mesh(a: f64, b: f64, nx: usize, ny: usize) -> Result<Mesh> {
    if !(a > 0.0 && b > 0.0) {
        return Err(Error::InvalidGeometry(format!(
            "plate sides must be positive, got {a} x {b}"
        )));
    }
    if nx == 0 || ny == 0 {
        return Err(Error::InvalidGeometry("mesh needs at least one element per side".into()));
    }
    let (dx, dy) = (a / nx as f64, b / ny as f64);
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            // Exact end coordinates keep edge detection free of round-off.
            let x = if i == nx { a } else { i as f64 * dx };
            let y = if j == ny { b } else { j as f64 * dy };
            nodes.push(Point2::new(x, y));
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    Ok(Mesh {
        nodes,
        elements,
        bounds: [0.0, a, 0.0, b],
        grid: Some((nx, ny)),
    })
}

impl Mesh {
    /// Arbitrary quadrilateral mesh; every element must have a positive Jacobian.
    pub fn from_parts(nodes: Vec<Point2<f64>>, elements: Vec<[usize; 4]>) -> Result<Self> {
        let xs = nodes.iter().map(|p| p.x);
        let ys = nodes.iter().map(|p| p.y);
        let bounds = [
            xs.clone().fold(f64::INFINITY, f64::min),
            xs.fold(f64::NEG_INFINITY, f64::max),
            ys.clone().fold(f64::INFINITY, f64::min),
            ys.fold(f64::NEG_INFINITY, f64::max),
        ];
        let mesh = Self {
            nodes,
            elements,
            bounds,
            grid: None,
        };
        for (e, conn) in mesh.elements.iter().enumerate() {
            if conn.iter().any(|&n| n >= mesh.nodes.len()) {
                return Err(Error::InvalidGeometry(format!("element {e} references a missing node")));
            }
            let c = mesh.element_coords(e);
            for (xi, eta) in [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)] {
                if crate::element::jacobian(&c, xi, eta).determinant() <= 0.0 {
                    return Err(Error::InvalidGeometry(format!(
                        "element {e} has a non-positive Jacobian"
                    )));
                }
            }
        }
        Ok(mesh)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn element_coords(&self, e: usize) -> [Point2<f64>; 4] {
        self.elements[e].map(|n| self.nodes[n])
    }

    pub fn width(&self) -> f64 {
        self.bounds[1] - self.bounds[0]
    }

    pub fn height(&self) -> f64 {
        self.bounds[3] - self.bounds[2]
    }

    /// Shortest element edge length.
    pub fn min_element_size(&self) -> f64 {
        let mut h = f64::INFINITY;
        for e in 0..self.element_count() {
            let c = self.element_coords(e);
            for k in 0..4 {
                h = h.min((c[(k + 1) % 4] - c[k]).norm());
            }
        }
        h
    }

    /// Shoelace area of element `e`.
    pub fn element_area(&self, e: usize) -> f64 {
        let c = self.element_coords(e);
        0.5 * (0..4)
            .map(|k| {
                let (p, q) = (c[k], c[(k + 1) % 4]);
                p.x * q.y - q.x * p.y
            })
            .sum::<f64>()
    }

    /// Elements incident to each node.
    pub fn node_elements(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.node_count()];
        for (e, conn) in self.elements.iter().enumerate() {
            for &n in conn {
                adj[n].push(e);
            }
        }
        adj
    }

    fn tol(&self) -> f64 {
        1e-9 * self.width().max(self.height())
    }

    pub fn on_x_edge(&self, n: usize) -> bool {
        let x = self.nodes[n].x;
        (x - self.bounds[0]).abs() <= self.tol() || (x - self.bounds[1]).abs() <= self.tol()
    }

    pub fn on_y_edge(&self, n: usize) -> bool {
        let y = self.nodes[n].y;
        (y - self.bounds[2]).abs() <= self.tol() || (y - self.bounds[3]).abs() <= self.tol()
    }

    /// Nodes on the edge `x = x_min` (`right = false`) or `x = x_max`.
    pub fn x_edge_nodes(&self, right: bool) -> Vec<usize> {
        let target = if right { self.bounds[1] } else { self.bounds[0] };
        (0..self.node_count())
            .filter(|&n| (self.nodes[n].x - target).abs() <= self.tol())
            .collect()
    }
}
