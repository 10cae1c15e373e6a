//! Deterministic built-in test meshes.

use std::collections::HashMap;
use std::f64::consts::{PI, TAU};

use super::SimplicialComplex;
use crate::error::{Error, Result};

pub fn single_triangle() -> SimplicialComplex {
    SimplicialComplex::new(
        vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![[0, 1, 2]],
    )
    .expect("valid triangle")
}

pub fn octahedron() -> SimplicialComplex {
    let v = vec![
        vec![1.0, 0.0, 0.0],
        vec![-1.0, 0.0, 0.0],
        vec![0.0, 1.0, 0.0],
        vec![0.0, -1.0, 0.0],
        vec![0.0, 0.0, 1.0],
        vec![0.0, 0.0, -1.0],
    ];
    let t = vec![
        [0, 2, 4],
        [2, 1, 4],
        [1, 3, 4],
        [3, 0, 4],
        [2, 0, 5],
        [1, 2, 5],
        [3, 1, 5],
        [0, 3, 5],
    ];
    SimplicialComplex::new(v, t).expect("valid octahedron")
}

/// Unit sphere from a subdivided icosahedron (`subdivisions` rounds of
/// 1-to-4 splitting).
pub fn icosphere(subdivisions: usize) -> Result<SimplicialComplex> {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let mut verts: Vec<[f64; 3]> = vec![
        [-1.0, p, 0.0],
        [1.0, p, 0.0],
        [-1.0, -p, 0.0],
        [1.0, -p, 0.0],
        [0.0, -1.0, p],
        [0.0, 1.0, p],
        [0.0, -1.0, -p],
        [0.0, 1.0, -p],
        [p, 0.0, -1.0],
        [p, 0.0, 1.0],
        [-p, 0.0, -1.0],
        [-p, 0.0, 1.0],
    ];
    let mut tris: Vec<[usize; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    for _ in 0..subdivisions {
        let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
        let mut next = Vec::with_capacity(tris.len() * 4);
        let mut midpoint = |a: usize, b: usize, verts: &mut Vec<[f64; 3]>| {
            let key = (a.min(b), a.max(b));
            *mid.entry(key).or_insert_with(|| {
                let (x, y) = (verts[a], verts[b]);
                verts.push([
                    (x[0] + y[0]) / 2.0,
                    (x[1] + y[1]) / 2.0,
                    (x[2] + y[2]) / 2.0,
                ]);
                verts.len() - 1
            })
        };
        for [a, b, c] in tris {
            let ab = midpoint(a, b, &mut verts);
            let bc = midpoint(b, c, &mut verts);
            let ca = midpoint(c, a, &mut verts);
            next.extend([[a, ab, ca], [b, bc, ab], [c, ca, bc], [ab, bc, ca]]);
        }
        tris = next;
    }
    let v = verts
        .iter()
        .map(|x| {
            let r = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
            vec![x[0] / r, x[1] / r, x[2] / r]
        })
        .collect();
    SimplicialComplex::new(v, tris)
}

fn grid_cells(nx: usize, ny: usize, wrap_x: bool, wrap_y: bool) -> Vec<[usize; 3]> {
    let (cx, cy) = (
        if wrap_x { nx } else { nx - 1 },
        if wrap_y { ny } else { ny - 1 },
    );
    let id = |i: usize, j: usize| (j % ny) * nx + (i % nx);
    let mut tris = Vec::with_capacity(2 * cx * cy);
    for j in 0..cy {
        for i in 0..cx {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            tris.push([a, b, c]);
            tris.push([a, c, d]);
        }
    }
    tris
}

/// Structured flat torus `[0, 2pi)^2` with `nx * ny` vertices.
pub fn flat_torus(nx: usize, ny: usize) -> Result<SimplicialComplex> {
    flat_torus_with_size(nx, ny, TAU, TAU)
}

pub fn flat_torus_with_size(nx: usize, ny: usize, lx: f64, ly: f64) -> Result<SimplicialComplex> {
    if nx < 3 || ny < 3 {
        return Err(Error::InvalidArgument(
            "flat torus needs at least 3x3 vertices".into(),
        ));
    }
    let verts = (0..ny)
        .flat_map(|j| (0..nx).map(move |i| [lx * i as f64 / nx as f64, ly * j as f64 / ny as f64]))
        .collect();
    SimplicialComplex::new_periodic(verts, grid_cells(nx, ny, true, true), [lx, ly])
}

/// Structured rectangle `[0, lx] x [0, ly]` with `cells_x * cells_y` cells.
pub fn rectangle(cells_x: usize, cells_y: usize, lx: f64, ly: f64) -> Result<SimplicialComplex> {
    if cells_x == 0 || cells_y == 0 {
        return Err(Error::InvalidArgument(
            "rectangle needs at least one cell".into(),
        ));
    }
    let (nx, ny) = (cells_x + 1, cells_y + 1);
    let verts = (0..ny)
        .flat_map(|j| {
            (0..nx).map(move |i| {
                vec![
                    lx * i as f64 / cells_x as f64,
                    ly * j as f64 / cells_y as f64,
                ]
            })
        })
        .collect();
    SimplicialComplex::new(verts, grid_cells(nx, ny, false, false))
}

/// Torus of revolution about the z axis; `nu` segments around the axis and
/// `nv` around the tube.
pub fn torus(nu: usize, nv: usize, major: f64, minor: f64) -> Result<SimplicialComplex> {
    if nu < 3 || nv < 3 || !(minor > 0.0 && major > minor) {
        return Err(Error::InvalidArgument(
            "torus needs nu, nv >= 3 and major > minor > 0".into(),
        ));
    }
    let verts = (0..nv)
        .flat_map(|j| {
            (0..nu).map(move |i| {
                let (u, w) = (TAU * i as f64 / nu as f64, TAU * j as f64 / nv as f64);
                let rho = major + minor * w.cos();
                vec![rho * u.cos(), rho * u.sin(), minor * w.sin()]
            })
        })
        .collect();
    SimplicialComplex::new(verts, grid_cells(nu, nv, true, true))
}

/// Polar disk of radius `radius`: a centre vertex and `rings` rings of
/// `sectors` vertices each.
pub fn disk(rings: usize, sectors: usize, radius: f64) -> Result<SimplicialComplex> {
    if rings == 0 || sectors < 3 {
        return Err(Error::InvalidArgument(
            "disk needs rings >= 1 and sectors >= 3".into(),
        ));
    }
    let mut verts = vec![vec![0.0, 0.0]];
    for r in 1..=rings {
        let rad = radius * r as f64 / rings as f64;
        for s in 0..sectors {
            // stagger alternate rings to avoid very thin triangles
            let th = TAU * (s as f64 + 0.5 * (r % 2) as f64) / sectors as f64;
            verts.push(vec![rad * th.cos(), rad * th.sin()]);
        }
    }
    let ring = |r: usize, s: usize| 1 + (r - 1) * sectors + s % sectors;
    let mut tris = Vec::new();
    for s in 0..sectors {
        tris.push([0, ring(1, s), ring(1, s + 1)]);
    }
    for r in 1..rings {
        ring_band(
            &mut tris,
            sectors,
            |s| ring(r, s),
            |s| ring(r + 1, s),
            r % 2 == 0,
        );
    }
    SimplicialComplex::new(verts, tris)
}

/// Polar annulus between `inner` and `outer` radii with `rings >= 2`
/// concentric rings of `sectors` vertices.
pub fn annulus(rings: usize, sectors: usize, inner: f64, outer: f64) -> Result<SimplicialComplex> {
    if rings < 2 || sectors < 3 || !(inner > 0.0 && outer > inner) {
        return Err(Error::InvalidArgument(
            "annulus needs rings >= 2, sectors >= 3 and outer > inner > 0".into(),
        ));
    }
    let mut verts = Vec::new();
    for r in 0..rings {
        let rad = inner + (outer - inner) * r as f64 / (rings - 1) as f64;
        for s in 0..sectors {
            let th = TAU * (s as f64 + 0.5 * (r % 2) as f64) / sectors as f64;
            verts.push(vec![rad * th.cos(), rad * th.sin()]);
        }
    }
    let ring = |r: usize, s: usize| r * sectors + s % sectors;
    let mut tris = Vec::new();
    for r in 0..rings - 1 {
        ring_band(
            &mut tris,
            sectors,
            |s| ring(r, s),
            |s| ring(r + 1, s),
            r % 2 == 0,
        );
    }
    SimplicialComplex::new(verts, tris)
}

// Triangulates the band between two rings; `outer_shifted` says the outer
// ring is rotated half a sector ahead of the inner one.
fn ring_band(
    tris: &mut Vec<[usize; 3]>,
    sectors: usize,
    inner: impl Fn(usize) -> usize,
    outer: impl Fn(usize) -> usize,
    outer_shifted: bool,
) {
    for s in 0..sectors {
        if outer_shifted {
            tris.push([inner(s), outer(s), inner(s + 1)]);
            tris.push([inner(s + 1), outer(s), outer(s + 1)]);
        } else {
            tris.push([inner(s), outer(s + 1), inner(s + 1)]);
            tris.push([inner(s), outer(s), outer(s + 1)]);
        }
    }
}

/// A Moebius strip; construction always fails with `NotOrientable`, which is
/// the point of this fixture.
pub fn mobius(segments: usize) -> Result<SimplicialComplex> {
    if segments < 3 {
        return Err(Error::InvalidArgument("mobius needs >= 3 segments".into()));
    }
    let mut verts = Vec::new();
    for i in 0..segments {
        let u = TAU * i as f64 / segments as f64;
        for w in [-0.3, 0.3] {
            let c = (u / 2.0).cos();
            let s = (u / 2.0).sin();
            verts.push(vec![
                (1.0 + w * c) * u.cos(),
                (1.0 + w * c) * u.sin(),
                w * s,
            ]);
        }
    }
    let mut tris = Vec::new();
    for i in 0..segments {
        let (a0, a1) = (2 * i, 2 * i + 1);
        let (b0, b1) = if i + 1 < segments {
            (2 * (i + 1), 2 * (i + 1) + 1)
        } else {
            (1, 0)
        };
        tris.push([a0, b0, b1]);
        tris.push([a0, b1, a1]);
    }
    SimplicialComplex::new(verts, tris)
}

/// Looks up a built-in mesh by name, e.g. `torus`, `flat-torus:16x16`,
/// `sphere:2`, `annulus:3x24`, `disk:3x16`, `triangle`, `octahedron`,
/// `rectangle:8x8`, `mobius`.
pub fn builtin(spec: &str) -> Result<SimplicialComplex> {
    let (name, args) = spec.split_once(':').unwrap_or((spec, ""));
    let nums: Vec<usize> = if args.is_empty() {
        Vec::new()
    } else {
        args.split('x')
            .map(|s| s.parse::<usize>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| Error::InvalidArgument(format!("bad builtin mesh arguments '{args}'")))?
    };
    let arg = |i: usize, default: usize| nums.get(i).copied().unwrap_or(default);
    match name {
        "triangle" => Ok(single_triangle()),
        "octahedron" => Ok(octahedron()),
        "sphere" => icosphere(arg(0, 1)),
        "torus" => torus(arg(0, 12), arg(1, 8), 2.0, 0.8),
        "flat-torus" => flat_torus(arg(0, 8), arg(1, arg(0, 8))),
        "disk" => disk(arg(0, 3), arg(1, 12), 1.0),
        "annulus" => annulus(arg(0, 3), arg(1, 16), 0.5, 1.0),
        "rectangle" => rectangle(arg(0, 8), arg(1, arg(0, 8)), PI, PI),
        "mobius" => mobius(arg(0, 12)),
        _ => Err(Error::InvalidArgument(format!(
            "unknown builtin mesh '{name}'"
        ))),
    }
}
