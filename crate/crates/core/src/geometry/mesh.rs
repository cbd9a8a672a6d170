//! ASCII mesh loading.
//!
//! The mesh format is the position/face subset of Wavefront OBJ: `v x y z`
//! lines, `f i j k [l ...]` lines (1-based indices, polygons fan-
//! triangulated), and `g`/`o` lines naming face groups. Everything else is
//! ignored. A JSON sidecar binds group names to material names:
//! `{"ground": "concrete", "wall": "glass"}`.

use std::collections::BTreeMap;
use std::path::Path;

use crate::float::{real, Real};
use crate::materials::Material;

use super::{GeometryError, Scene, Triangle, Vec3};

const DEFAULT_GROUP: &str = "default";

/// A parsed face group: triangles as vertex-index triples.
#[derive(Clone, Debug, Default)]
pub struct MeshGroup {
    pub faces: Vec<[usize; 3]>,
}

/// Parsed mesh: shared vertex pool plus named face groups.
#[derive(Clone, Debug)]
pub struct ParsedMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub groups: BTreeMap<String, MeshGroup>,
}

/// Parses the OBJ subset. Fails with a line number on malformed input and
/// with [`GeometryError::NoGeometry`] when no faces survive.
pub fn parse_obj<T: Real>(text: &str) -> Result<ParsedMesh<T>, GeometryError> {
    let mut vertices: Vec<Vec3<T>> = Vec::new();
    let mut groups: BTreeMap<String, MeshGroup> = BTreeMap::new();
    let mut current = DEFAULT_GROUP.to_string();

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let mut parts = trimmed.split_whitespace();
        let keyword = parts.next().unwrap();
        match keyword {
            "v" => {
                let mut coord = |name: &str| -> Result<T, GeometryError> {
                    let tok = parts.next().ok_or_else(|| GeometryError::MeshParse {
                        line,
                        message: format!("vertex missing {name} coordinate"),
                    })?;
                    let value: f64 = tok.parse().map_err(|_| GeometryError::MeshParse {
                        line,
                        message: format!("bad {name} coordinate '{tok}'"),
                    })?;
                    if !value.is_finite() {
                        return Err(GeometryError::MeshParse {
                            line,
                            message: format!("non-finite {name} coordinate"),
                        });
                    }
                    Ok(real(value))
                };
                let x = coord("x")?;
                let y = coord("y")?;
                let z = coord("z")?;
                vertices.push(Vec3::new(x, y, z));
            }
            "f" => {
                let mut indices = Vec::new();
                for tok in parts {
                    // Accept `i`, `i/j`, `i/j/k`, `i//k`; only the position
                    // index matters here.
                    let first = tok.split('/').next().unwrap_or("");
                    let index: i64 = first.parse().map_err(|_| GeometryError::MeshParse {
                        line,
                        message: format!("bad face index '{tok}'"),
                    })?;
                    let resolved = if index > 0 {
                        (index - 1) as usize
                    } else if index < 0 {
                        // Negative indices count back from the current pool.
                        let back = (-index) as usize;
                        if back > vertices.len() {
                            return Err(GeometryError::MeshParse {
                                line,
                                message: format!("face index {index} out of range"),
                            });
                        }
                        vertices.len() - back
                    } else {
                        return Err(GeometryError::MeshParse {
                            line,
                            message: "face index 0 is invalid (indices are 1-based)".into(),
                        });
                    };
                    if resolved >= vertices.len() {
                        return Err(GeometryError::MeshParse {
                            line,
                            message: format!(
                                "face index {index} out of range ({} vertices so far)",
                                vertices.len()
                            ),
                        });
                    }
                    indices.push(resolved);
                }
                if indices.len() < 3 {
                    return Err(GeometryError::MeshParse {
                        line,
                        message: format!("face needs at least 3 vertices, got {}", indices.len()),
                    });
                }
                let group = groups.entry(current.clone()).or_default();
                for i in 1..indices.len() - 1 {
                    group.faces.push([indices[0], indices[i], indices[i + 1]]);
                }
            }
            "g" | "o" => {
                current = parts
                    .next()
                    .map(str::to_string)
                    .unwrap_or_else(|| DEFAULT_GROUP.to_string());
            }
            // Normals, texcoords, smoothing, material libs: not our problem.
            "vn" | "vt" | "vp" | "s" | "mtllib" | "usemtl" | "l" => {}
            other => {
                return Err(GeometryError::MeshParse {
                    line,
                    message: format!("unknown keyword '{other}'"),
                });
            }
        }
    }

    if groups.values().all(|g| g.faces.is_empty()) {
        return Err(GeometryError::NoGeometry);
    }
    Ok(ParsedMesh { vertices, groups })
}

/// Parses the `{"group": "material"}` sidecar.
pub fn parse_material_bindings(text: &str) -> Result<BTreeMap<String, String>, GeometryError> {
    Ok(serde_json::from_str(text)?)
}

/// Assembles a [`Scene`] from parsed mesh + bindings + a material table.
///
/// Materials are deduplicated into a compact per-scene table; every face
/// group must be bound and every bound name must exist in `library`.
pub fn scene_from_parts<T: Real>(
    mesh: &ParsedMesh<T>,
    bindings: &BTreeMap<String, String>,
    library: &[Material<T>],
) -> Result<Scene<T>, GeometryError> {
    let mut materials: Vec<Material<T>> = Vec::new();
    let mut material_ids: BTreeMap<String, usize> = BTreeMap::new();
    let mut triangles: Vec<Triangle<T>> = Vec::new();

    for (group_name, group) in &mesh.groups {
        if group.faces.is_empty() {
            continue;
        }
        let material_name =
            bindings
                .get(group_name)
                .ok_or_else(|| GeometryError::UnboundMaterial {
                    group: group_name.clone(),
                })?;
        let material_id = match material_ids.get(material_name.as_str()) {
            Some(&id) => id,
            None => {
                let mat = library
                    .iter()
                    .find(|m| &m.name == material_name)
                    .ok_or_else(|| GeometryError::UnknownMaterial {
                        name: material_name.clone(),
                    })?;
                materials.push(mat.clone());
                let id = materials.len() - 1;
                material_ids.insert(material_name.clone(), id);
                id
            }
        };
        for face in &group.faces {
            let index = triangles.len();
            let tri = Triangle::new(
                mesh.vertices[face[0]],
                mesh.vertices[face[1]],
                mesh.vertices[face[2]],
                material_id,
            )
            .ok_or(GeometryError::DegenerateTriangle { index })?;
            triangles.push(tri);
        }
    }

    if triangles.is_empty() {
        return Err(GeometryError::NoGeometry);
    }
    Scene::from_triangles(triangles, materials)
}

/// Loads a scene from a mesh file and its JSON material-binding sidecar.
pub fn load_mesh_scene<T: Real>(
    mesh_path: &Path,
    bindings_path: &Path,
    library: &[Material<T>],
) -> Result<Scene<T>, GeometryError> {
    let mesh_text = std::fs::read_to_string(mesh_path)?;
    let bindings_text = std::fs::read_to_string(bindings_path)?;
    let mesh = parse_obj(&mesh_text)?;
    let bindings = parse_material_bindings(&bindings_text)?;
    scene_from_parts(&mesh, &bindings, library)
}
