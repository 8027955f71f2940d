//! File formats. Everything is structured-object text (JSON):
//!
//! * map file: `{"darts": D, "sigma": [...], "alpha": [...], "genus": g}`
//! * diagram file: map file plus `"over": [...]` (one flag per crossing,
//!   minimum-dart order)
//! * tangle file: diagram file where `alpha[d] == d` marks boundary stubs,
//!   plus `"boundary": [[stub darts...], ...]`
//! * augmented diagram file: diagram file plus `"augmentations"`, each a
//!   list of `{face, entry?, exit?}` segments (free ends omitted)

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::augment::{Augmentation, AugmentedDiagram};
use crate::curve::{PathSegment, TransversePath};
use crate::diagram::LinkDiagram;
use crate::embroidery::Tangle;
use crate::map::{FaceId, SurfaceMap};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("semantic error: {0}")]
    Semantic(String),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MapFile {
    pub darts: usize,
    pub sigma: Vec<usize>,
    pub alpha: Vec<usize>,
    pub genus: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub over: Option<Vec<bool>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub boundary: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub augmentations: Option<Vec<AugmentationFile>>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AugmentationFile {
    pub path: Vec<SegmentFile>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SegmentFile {
    pub face: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub entry: Option<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exit: Option<[usize; 2]>,
}

/// Standalone augmentation file used by `check DIAGRAM AUGS`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AugsFile {
    pub augmentations: Vec<AugmentationFile>,
}

pub fn parse_map_file(text: &str) -> Result<MapFile, IoError> {
    let f: MapFile = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    if f.sigma.len() != f.darts || f.alpha.len() != f.darts {
        return Err(IoError::Semantic(format!(
            "darts field says {} but sigma/alpha have {}/{} entries",
            f.darts,
            f.sigma.len(),
            f.alpha.len()
        )));
    }
    Ok(f)
}

pub fn load_map(text: &str) -> Result<SurfaceMap, IoError> {
    let f = parse_map_file(text)?;
    SurfaceMap::build(f.sigma, f.alpha, f.genus).map_err(|e| IoError::Semantic(e.to_string()))
}

pub fn load_diagram(text: &str) -> Result<LinkDiagram, IoError> {
    let f = parse_map_file(text)?;
    let map = SurfaceMap::build(f.sigma, f.alpha, f.genus)
        .map_err(|e| IoError::Semantic(e.to_string()))?;
    let over = f.over.unwrap_or_default();
    LinkDiagram::new(map, over).map_err(|e| IoError::Semantic(e.to_string()))
}

pub fn load_tangle(text: &str) -> Result<Tangle, IoError> {
    let f = parse_map_file(text)?;
    let boundaries = f
        .boundary
        .ok_or_else(|| IoError::Semantic("tangle file needs a boundary field".into()))?;
    Ok(Tangle {
        sigma: f.sigma,
        alpha: f.alpha,
        over: f.over.unwrap_or_default(),
        boundaries,
    })
}

fn path_from_file(p: &AugmentationFile) -> TransversePath {
    TransversePath {
        segments: p
            .path
            .iter()
            .map(|s| PathSegment { face: FaceId(s.face), entry: s.entry, exit: s.exit })
            .collect(),
    }
}

fn path_to_file(p: &TransversePath) -> AugmentationFile {
    AugmentationFile {
        path: p
            .segments
            .iter()
            .map(|s| SegmentFile { face: s.face.0, entry: s.entry, exit: s.exit })
            .collect(),
    }
}

pub fn load_augmented(text: &str) -> Result<AugmentedDiagram, IoError> {
    let f = parse_map_file(text)?;
    let map = SurfaceMap::build(f.sigma.clone(), f.alpha.clone(), f.genus)
        .map_err(|e| IoError::Semantic(e.to_string()))?;
    let base = LinkDiagram::new(map, f.over.clone().unwrap_or_default())
        .map_err(|e| IoError::Semantic(e.to_string()))?;
    let augs = f
        .augmentations
        .unwrap_or_default()
        .iter()
        .map(|p| Augmentation { path: path_from_file(p) })
        .collect();
    Ok(AugmentedDiagram { base, augs })
}

pub fn attach_augs(base: LinkDiagram, text: &str) -> Result<AugmentedDiagram, IoError> {
    let f: AugsFile = serde_json::from_str(text).map_err(|e| IoError::Parse(e.to_string()))?;
    let augs = f
        .augmentations
        .iter()
        .map(|p| Augmentation { path: path_from_file(p) })
        .collect();
    Ok(AugmentedDiagram { base, augs })
}

pub fn map_to_json(map: &SurfaceMap) -> String {
    let f = MapFile {
        darts: map.dart_count(),
        sigma: map.sigma_perm().to_vec(),
        alpha: map.alpha_perm().to_vec(),
        genus: map.declared_genus(),
        over: None,
        boundary: None,
        augmentations: None,
    };
    serde_json::to_string_pretty(&f).unwrap()
}

pub fn diagram_to_json(d: &LinkDiagram) -> String {
    let f = MapFile {
        darts: d.map().dart_count(),
        sigma: d.map().sigma_perm().to_vec(),
        alpha: d.map().alpha_perm().to_vec(),
        genus: d.map().declared_genus(),
        over: Some(d.over_flags().to_vec()),
        boundary: None,
        augmentations: None,
    };
    serde_json::to_string_pretty(&f).unwrap()
}

pub fn augmented_to_json(a: &AugmentedDiagram) -> String {
    let f = MapFile {
        darts: a.base.map().dart_count(),
        sigma: a.base.map().sigma_perm().to_vec(),
        alpha: a.base.map().alpha_perm().to_vec(),
        genus: a.base.map().declared_genus(),
        over: Some(a.base.over_flags().to_vec()),
        boundary: None,
        augmentations: Some(a.augs.iter().map(|x| path_to_file(&x.path)).collect()),
    };
    serde_json::to_string_pretty(&f).unwrap()
}

pub fn tangle_to_json(t: &Tangle) -> String {
    let f = MapFile {
        darts: t.sigma.len(),
        sigma: t.sigma.clone(),
        alpha: t.alpha.clone(),
        genus: 0,
        over: Some(t.over.clone()),
        boundary: Some(t.boundaries.clone()),
        augmentations: None,
    };
    serde_json::to_string_pretty(&f).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn diagram_round_trip() {
        let d = corpus::figure_eight();
        let text = diagram_to_json(&d);
        let back = load_diagram(&text).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn augmented_round_trip() {
        let a = corpus::figure_eight_augmented();
        let text = augmented_to_json(&a);
        let back = load_augmented(&text).unwrap();
        assert_eq!(back.base, a.base);
        assert_eq!(back.augs.len(), 1);
        assert_eq!(back.augs[0].path, a.augs[0].path);
    }

    #[test]
    fn tangle_round_trip() {
        let t = corpus::example_tangle();
        let text = tangle_to_json(&t);
        let back = load_tangle(&text).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn bad_involution_is_semantic_error() {
        let text = r#"{"darts": 2, "sigma": [0, 1], "alpha": [0, 1], "genus": 0}"#;
        assert!(matches!(load_map(text), Err(IoError::Semantic(_))));
    }
}
