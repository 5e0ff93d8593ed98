//! Landmark CSV ingestion.
//!
//! Header `scene,landmark,x,y` (further coordinate columns are allowed for
//! higher-dimensional images). Rows may come in any order; scenes keep the
//! order of their first appearance and landmarks are sorted by label.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use opshape_core::LandmarkScene;
use sha2::{Digest, Sha256};

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct ParsedInput {
    pub scenes: Vec<LandmarkScene>,
    /// Hex SHA-256 of the raw file bytes.
    pub sha256: String,
    pub name: String,
}

pub fn parse_landmarks(path: &Path) -> Result<ParsedInput, CliError> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    let name = path.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
    let scenes = parse_landmarks_bytes(&bytes, &path.display().to_string())?;
    Ok(ParsedInput { scenes, sha256: sha256_hex(&bytes), name })
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Parses CSV text; `origin` only labels error messages.
pub fn parse_landmarks_bytes(bytes: &[u8], origin: &str) -> Result<Vec<LandmarkScene>, CliError> {
    let parse_err = |line: u64, message: String| CliError::Parse { path: origin.to_string(), line, message };
    let schema_err = |message: String| CliError::Schema { path: origin.to_string(), message };

    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let headers = rdr.headers().map_err(|e| parse_err(1, e.to_string()))?.clone();
    let names: Vec<&str> = headers.iter().collect();
    if names.len() < 3 || names[0] != "scene" || names[1] != "landmark" {
        return Err(parse_err(1, format!("expected header scene,landmark,x,y; found {}", names.join(","))));
    }
    let dim = names.len() - 2;

    let mut order: Vec<String> = Vec::new();
    // scene -> label -> (coordinates, line)
    let mut table: HashMap<String, BTreeMap<usize, (Vec<f64>, u64)>> = HashMap::new();
    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            parse_err(line, e.to_string())
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let scene = record[0].to_string();
        if scene.is_empty() {
            return Err(parse_err(line, "empty scene id".into()));
        }
        let label: usize = record[1].parse().ok().filter(|l| *l > 0).ok_or_else(|| {
            parse_err(line, format!("landmark label must be a positive integer, got {:?}", &record[1]))
        })?;
        let coords =
            (0..dim)
                .map(|j| {
                    let field = &record[j + 2];
                    field.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| {
                        parse_err(line, format!("{} must be a finite number, got {field:?}", names[j + 2]))
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
        let entry = table.entry(scene.clone()).or_insert_with(|| {
            order.push(scene.clone());
            BTreeMap::new()
        });
        if let Some((_, first)) = entry.get(&label) {
            return Err(parse_err(
                line,
                format!("duplicate (scene {scene}, landmark {label}); first given on line {first}"),
            ));
        }
        entry.insert(label, (coords, line));
    }
    if order.is_empty() {
        return Err(schema_err("no landmark rows".into()));
    }

    let reference: Vec<usize> = table[&order[0]].keys().copied().collect();
    if reference.iter().enumerate().any(|(i, l)| *l != i + 1) {
        return Err(schema_err(format!("scene {} has labels {reference:?}; expected 1..k without gaps", order[0])));
    }
    let mut scenes = Vec::with_capacity(order.len());
    for id in &order {
        let rows = &table[id];
        let labels: Vec<usize> = rows.keys().copied().collect();
        if labels != reference {
            return Err(schema_err(format!(
                "scene {id} has landmark labels {labels:?}, but scene {} has {reference:?}",
                order[0]
            )));
        }
        let points = rows.values().map(|(c, _)| c.clone()).collect();
        scenes.push(LandmarkScene::new(id.clone(), points).map_err(|e| schema_err(e.to_string()))?);
    }
    Ok(scenes)
}
