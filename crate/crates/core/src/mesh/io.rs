use std::fmt::Write as _;

use super::SimplicialComplex;
use crate::error::{Error, Result};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then(|| (i + 1, l.split_whitespace().collect()))
    })
}

fn float(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>()
        .map_err(|_| parse_err(line, format!("invalid number '{tok}'")))
}

/// Parses ASCII OFF with triangular faces.
pub fn parse_off(text: &str) -> Result<SimplicialComplex> {
    let mut lines = numbered_lines(text);
    let (hline, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    if header.first() != Some(&"OFF") {
        return Err(parse_err(hline, "missing OFF header"));
    }
    let counts: Vec<&str> = if header.len() > 1 {
        header[1..].to_vec()
    } else {
        lines
            .next()
            .ok_or_else(|| parse_err(hline, "missing counts line"))?
            .1
    };
    if counts.len() < 2 {
        return Err(parse_err(
            hline + 1,
            "counts line needs vertex and face counts",
        ));
    }
    let nv: usize = counts[0]
        .parse()
        .map_err(|_| parse_err(hline + 1, "bad vertex count"))?;
    let nf: usize = counts[1]
        .parse()
        .map_err(|_| parse_err(hline + 1, "bad face count"))?;

    let mut verts = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, toks) = lines
            .next()
            .ok_or_else(|| parse_err(0, "unexpected end of vertex list"))?;
        if toks.len() < 3 {
            return Err(parse_err(ln, "vertex needs 3 coordinates"));
        }
        verts.push(
            toks[..3]
                .iter()
                .map(|t| float(t, ln))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    let mut tris = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, toks) = lines
            .next()
            .ok_or_else(|| parse_err(0, "unexpected end of face list"))?;
        let arity: usize = toks[0]
            .parse()
            .map_err(|_| parse_err(ln, "bad face arity"))?;
        if arity != 3 {
            return Err(Error::UnsupportedFaceArity { arity, line: ln });
        }
        if toks.len() < 4 {
            return Err(parse_err(ln, "face lists fewer indices than its arity"));
        }
        let mut tri = [0usize; 3];
        for (r, tok) in toks[1..4].iter().enumerate() {
            let idx: usize = tok
                .parse()
                .map_err(|_| parse_err(ln, format!("bad index '{tok}'")))?;
            if idx >= nv {
                return Err(parse_err(ln, format!("vertex index {idx} out of range")));
            }
            tri[r] = idx;
        }
        tris.push(tri);
    }
    SimplicialComplex::new(verts, tris)
}

/// Parses the `v`/`f` subset of Wavefront OBJ; other records are ignored.
pub fn parse_obj(text: &str) -> Result<SimplicialComplex> {
    let mut verts: Vec<Vec<f64>> = Vec::new();
    let mut faces: Vec<(usize, Vec<i64>)> = Vec::new();
    for (ln, toks) in numbered_lines(text) {
        match toks[0] {
            "v" => {
                if toks.len() < 4 {
                    return Err(parse_err(ln, "vertex needs 3 coordinates"));
                }
                verts.push(
                    toks[1..4]
                        .iter()
                        .map(|t| float(t, ln))
                        .collect::<Result<_>>()?,
                );
            }
            "f" => {
                let idx = toks[1..]
                    .iter()
                    .map(|t| {
                        let head = t.split('/').next().unwrap_or("");
                        head.parse::<i64>()
                            .map_err(|_| parse_err(ln, format!("bad index '{t}'")))
                    })
                    .collect::<Result<Vec<_>>>()?;
                if idx.len() != 3 {
                    return Err(Error::UnsupportedFaceArity {
                        arity: idx.len(),
                        line: ln,
                    });
                }
                faces.push((ln, idx));
            }
            _ => {}
        }
    }
    let nv = verts.len() as i64;
    let mut tris = Vec::with_capacity(faces.len());
    for (ln, idx) in faces {
        let mut tri = [0usize; 3];
        for (r, &i) in idx.iter().enumerate() {
            let z = if i > 0 { i - 1 } else { nv + i };
            if i == 0 || z < 0 || z >= nv {
                return Err(parse_err(ln, format!("vertex index {i} out of range")));
            }
            tri[r] = z as usize;
        }
        tris.push(tri);
    }
    SimplicialComplex::new(verts, tris)
}

/// Writes ASCII OFF. Coordinates use shortest round-trip formatting so that
/// re-parsing reproduces the mesh exactly.
pub fn write_off(complex: &SimplicialComplex) -> String {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(
        s,
        "{} {} {}",
        complex.num_vertices(),
        complex.num_triangles(),
        complex.num_edges()
    )
    .unwrap();
    for p in complex.vertices() {
        writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]).unwrap();
    }
    for t in complex.triangles() {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    s
}

/// Data attached to a VTK export.
#[derive(Debug, Clone)]
pub enum VtkAttribute {
    PointScalars(String, Vec<f64>),
    CellScalars(String, Vec<f64>),
    CellVectors(String, Vec<[f64; 3]>),
}

/// Legacy ASCII VTK `POLYDATA` with optional point and cell data.
pub fn write_vtk(complex: &SimplicialComplex, attributes: &[VtkAttribute]) -> Result<String> {
    let mut s = String::new();
    writeln!(
        s,
        "# vtk DataFile Version 3.0\nvhodge export\nASCII\nDATASET POLYDATA"
    )
    .unwrap();
    writeln!(s, "POINTS {} double", complex.num_vertices()).unwrap();
    for p in complex.vertices() {
        writeln!(s, "{:?} {:?} {:?}", p[0], p[1], p[2]).unwrap();
    }
    let nt = complex.num_triangles();
    writeln!(s, "POLYGONS {} {}", nt, 4 * nt).unwrap();
    for t in complex.triangles() {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    let (cells, points): (Vec<_>, Vec<_>) = attributes
        .iter()
        .partition(|a| !matches!(a, VtkAttribute::PointScalars(..)));
    if !cells.is_empty() {
        writeln!(s, "CELL_DATA {nt}").unwrap();
        for a in cells {
            match a {
                VtkAttribute::CellScalars(name, vals) => {
                    check_len(name, vals.len(), nt)?;
                    writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
                    vals.iter().for_each(|v| writeln!(s, "{v:?}").unwrap());
                }
                VtkAttribute::CellVectors(name, vals) => {
                    check_len(name, vals.len(), nt)?;
                    writeln!(s, "VECTORS {name} double").unwrap();
                    vals.iter()
                        .for_each(|v| writeln!(s, "{:?} {:?} {:?}", v[0], v[1], v[2]).unwrap());
                }
                VtkAttribute::PointScalars(..) => unreachable!(),
            }
        }
    }
    if !points.is_empty() {
        writeln!(s, "POINT_DATA {}", complex.num_vertices()).unwrap();
        for a in points {
            if let VtkAttribute::PointScalars(name, vals) = a {
                check_len(name, vals.len(), complex.num_vertices())?;
                writeln!(s, "SCALARS {name} double 1\nLOOKUP_TABLE default").unwrap();
                vals.iter().for_each(|v| writeln!(s, "{v:?}").unwrap());
            }
        }
    }
    Ok(s)
}

fn check_len(_name: &str, got: usize, expected: usize) -> Result<()> {
    if got != expected {
        return Err(Error::SizeMismatch {
            what: "VTK attribute",
            expected,
            got,
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::generate;
    use super::*;

    const TRIANGLE: &str = "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";

    #[test]
    fn single_triangle_off() {
        let c = parse_off(TRIANGLE).unwrap();
        assert_eq!(
            (c.num_vertices(), c.num_edges(), c.num_triangles()),
            (3, 3, 1)
        );
        assert_eq!(c.euler_characteristic(), 1);
        assert_eq!(c.boundary_edges().len(), 3);
    }

    #[test]
    fn octahedron_round_trip() {
        let c = parse_off(&write_off(&generate::octahedron())).unwrap();
        assert_eq!(c.euler_characteristic(), 2);
        assert!(!c.has_boundary());
    }

    #[test]
    fn quad_face_rejected() {
        let err = parse_off("OFF\n4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n").unwrap_err();
        assert!(err.to_string().contains("unsupported face arity"));
        let err = parse_obj("v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nf 1 2 3 4\n").unwrap_err();
        assert!(err.to_string().contains("unsupported face arity"));
    }

    #[test]
    fn dangling_index_reports_line() {
        let err = parse_off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 7\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 6, .. }), "{err}");
        let err = parse_obj("v 0 0 0\nv 1 0 0\n# comment\nf 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 4, .. }), "{err}");
    }

    #[test]
    fn obj_with_slashes_and_negative_indices() {
        let c = parse_obj("o tri\nv 0 0 0\nv 1 0 0\nv 0 1 0\nvn 0 0 1\nf -3/1/1 -2/2/1 -1/3/1\n")
            .unwrap();
        assert_eq!(c.triangles(), &[[0, 1, 2]]);
    }

    #[test]
    fn reparse_reproduces_incidence() {
        let a = generate::torus(7, 5, 2.0, 0.6).unwrap();
        let b = parse_off(&write_off(&a)).unwrap();
        assert_eq!(a.incidence(0), b.incidence(0));
        assert_eq!(a.incidence(1), b.incidence(1));
        assert_eq!(a.vertices(), b.vertices());
    }

    #[test]
    fn vtk_export_has_sections() {
        let c = generate::single_triangle();
        let s = write_vtk(
            &c,
            &[
                VtkAttribute::CellVectors("v".into(), vec![[1.0, 0.0, 0.0]]),
                VtkAttribute::PointScalars("f".into(), vec![0.0, 1.0, 2.0]),
            ],
        )
        .unwrap();
        assert!(s.contains("POLYGONS 1 4"));
        assert!(s.contains("CELL_DATA 1\nVECTORS v double"));
        assert!(s.contains("POINT_DATA 3"));
        assert!(write_vtk(&c, &[VtkAttribute::CellScalars("x".into(), vec![])]).is_err());
    }
}
