//! Legacy ASCII VTK output for meshes and nodal scalar fields.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::HexMesh;

const VTK_HEXAHEDRON: u8 = 12;

/// Write an unstructured-grid file with optional point-data scalars.
/// Coordinates are in stretched y-units.
pub fn write_unstructured_grid(
    path: &Path,
    title: &str,
    mesh: &HexMesh,
    point_data: &[(&str, &[f64])],
) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path.display().to_string(), e);

    writeln!(w, "# vtk DataFile Version 3.0").map_err(io_err)?;
    writeln!(w, "{title}").map_err(io_err)?;
    writeln!(w, "ASCII").map_err(io_err)?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID").map_err(io_err)?;
    writeln!(w, "POINTS {} double", mesh.node_count()).map_err(io_err)?;
    for p in &mesh.nodes {
        writeln!(w, "{} {} {}", p[0], p[1], p[2]).map_err(io_err)?;
    }
    writeln!(w, "CELLS {} {}", mesh.cell_count(), mesh.cell_count() * 9).map_err(io_err)?;
    for c in &mesh.cells {
        writeln!(
            w,
            "8 {} {} {} {} {} {} {} {}",
            c[0], c[1], c[2], c[3], c[4], c[5], c[6], c[7]
        )
        .map_err(io_err)?;
    }
    writeln!(w, "CELL_TYPES {}", mesh.cell_count()).map_err(io_err)?;
    for _ in 0..mesh.cell_count() {
        writeln!(w, "{VTK_HEXAHEDRON}").map_err(io_err)?;
    }
    if !point_data.is_empty() {
        writeln!(w, "POINT_DATA {}", mesh.node_count()).map_err(io_err)?;
        for (name, values) in point_data {
            if values.len() != mesh.node_count() {
                return Err(Error::Logic(format!(
                    "point data '{name}' has {} values for {} nodes",
                    values.len(),
                    mesh.node_count()
                )));
            }
            writeln!(w, "SCALARS {name} double 1").map_err(io_err)?;
            writeln!(w, "LOOKUP_TABLE default").map_err(io_err)?;
            for v in *values {
                writeln!(w, "{v}").map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}
