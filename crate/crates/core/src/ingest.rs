//! COCO-style annotation loading and per-dataset assignment statistics.

use std::collections::{BTreeMap, HashSet};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::assign::Strategy;
use crate::error::{Error, Result};
use crate::geometry::BBox;
use crate::priors::{generate_priors, PriorSet};
use crate::sim::{PriorLayout, ReportMeta, ReportSource, SimReport, SizeBins, Tally};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Image {
    pub id: u64,
    pub width: u32,
    pub height: u32,
    pub file_name: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Annotation {
    pub id: u64,
    pub image_id: u64,
    /// `[x, y, w, h]` in pixels.
    pub bbox: [f64; 4],
    pub category_id: u64,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub iscrowd: u8,
}

fn is_zero(v: &u8) -> bool {
    *v == 0
}

impl Annotation {
    pub fn to_box(&self) -> Result<BBox> {
        let [x, y, w, h] = self.bbox;
        BBox::from_xywh(x, y, w, h)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Category {
    pub id: u64,
    pub name: String,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Dataset {
    pub images: Vec<Image>,
    pub annotations: Vec<Annotation>,
    pub categories: Vec<Category>,
}

fn byte_offset(text: &str, line: usize, column: usize) -> usize {
    let before: usize = text
        .split_inclusive('\n')
        .take(line.saturating_sub(1))
        .map(str::len)
        .sum();
    before + column.saturating_sub(1)
}

impl Dataset {
    /// Parses and validates COCO JSON text. `origin` names the source in
    /// error messages.
    pub fn from_json(text: &str, origin: &Path) -> Result<Self> {
        let ds: Dataset = serde_json::from_str(text).map_err(|e| Error::Json {
            path: origin.to_path_buf(),
            offset: byte_offset(text, e.line(), e.column()),
            message: e.to_string(),
        })?;
        ds.validate()?;
        Ok(ds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("dataset is serializable")
    }

    pub fn validate(&self) -> Result<()> {
        let ids: HashSet<u64> = self.images.iter().map(|i| i.id).collect();
        let dangling: Vec<u64> = self
            .annotations
            .iter()
            .filter(|a| !ids.contains(&a.image_id))
            .map(|a| a.id)
            .collect();
        if !dangling.is_empty() {
            return Err(Error::DanglingAnnotations {
                annotation_ids: dangling,
            });
        }
        for a in &self.annotations {
            if a.bbox[2] < 0.0 || a.bbox[3] < 0.0 || a.to_box().is_err() {
                return Err(Error::Annotation {
                    annotation_id: a.id,
                    message: format!("bbox {:?} needs finite values and w, h >= 0", a.bbox),
                });
            }
        }
        Ok(())
    }

    /// Non-crowd GT boxes per image id, plus the number of crowd
    /// annotations left out.
    pub fn gt_boxes(&self) -> (BTreeMap<u64, Vec<BBox>>, u64) {
        let mut by_image: BTreeMap<u64, Vec<BBox>> =
            self.images.iter().map(|i| (i.id, Vec::new())).collect();
        let mut crowd = 0;
        for a in &self.annotations {
            if a.iscrowd != 0 {
                crowd += 1;
                continue;
            }
            if let (Some(boxes), Ok(b)) = (by_image.get_mut(&a.image_id), a.to_box()) {
                boxes.push(b);
            }
        }
        (by_image, crowd)
    }
}

pub fn load_coco(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Dataset::from_json(&text, path)
}

/// Assigns every image's GTs against priors tiled at that image's size and
/// bins positives exactly as the simulation does.
pub fn dataset_assignment_stats(
    ds: &Dataset,
    layout: &PriorLayout,
    strategies: &[Strategy],
) -> Result<SimReport> {
    ds.validate()?;
    let bins = SizeBins::default();
    let (gts, crowd) = ds.gt_boxes();
    if crowd > 0 {
        log::info!("excluded {crowd} crowd annotations from GT sets");
    }

    // Priors depend only on image size and assigner, so share them.
    let mut priors: BTreeMap<(usize, u32, u32), PriorSet> = BTreeMap::new();
    for img in &ds.images {
        for (k, s) in strategies.iter().enumerate() {
            let key = (k, img.height, img.width);
            if let std::collections::btree_map::Entry::Vacant(e) = priors.entry(key) {
                e.insert(generate_priors(
                    &layout.resolve(s.kind, img.height, img.width),
                )?);
            }
        }
    }

    let per_image: Vec<Vec<Tally>> = ds
        .images
        .par_iter()
        .map(|img| {
            let boxes = &gts[&img.id];
            strategies
                .iter()
                .enumerate()
                .map(|(k, s)| {
                    let mut tally = Tally::new(bins.len());
                    if !boxes.is_empty() {
                        let anchors = &priors[&(k, img.height, img.width)].boxes;
                        tally.record(&bins, boxes, &s.assign(boxes, anchors)?);
                    }
                    Ok(tally)
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;

    let assigners = strategies
        .iter()
        .enumerate()
        .map(|(k, s)| {
            let total = per_image
                .iter()
                .fold(Tally::new(bins.len()), |acc, img| acc.merge(&img[k]));
            total.finish(&bins, s, layout.describe(s.kind))
        })
        .collect();

    Ok(SimReport {
        meta: ReportMeta {
            source: ReportSource::Dataset,
            sim_config: None,
            seeds: Vec::new(),
            images: ds.images.len() as u64,
            gts: gts.values().map(|v| v.len() as u64).sum(),
            size_key: "sqrt_area".into(),
            priors_clipped: false,
            bins,
            excluded_crowd: crowd,
        },
        assigners,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Dataset> {
        Dataset::from_json(text, Path::new("test.json"))
    }

    const MINIMAL: &str = r#"{
        "images": [{"id": 1, "width": 64, "height": 48, "file_name": "a.jpg"}],
        "annotations": [{"id": 7, "image_id": 1, "bbox": [10, 10, 5, 5], "category_id": 3, "area": 25, "segmentation": []}],
        "categories": [{"id": 3, "name": "car"}]
    }"#;

    #[test]
    fn minimal_file() {
        let ds = parse(MINIMAL).unwrap();
        assert_eq!(ds.images.len(), 1);
        assert_eq!(
            ds.annotations[0].to_box().unwrap(),
            BBox {
                x1: 10.0,
                y1: 10.0,
                x2: 15.0,
                y2: 15.0
            }
        );
        let (gts, crowd) = ds.gt_boxes();
        assert_eq!(gts[&1].len(), 1);
        assert_eq!(crowd, 0);
    }

    #[test]
    fn empty_annotations() {
        let ds = parse(r#"{"images": [], "annotations": [], "categories": []}"#).unwrap();
        assert!(ds.annotations.is_empty());
    }

    #[test]
    fn dangling_image_reference() {
        let text = MINIMAL.replace("\"image_id\": 1", "\"image_id\": 9");
        match parse(&text) {
            Err(Error::DanglingAnnotations { annotation_ids }) => {
                assert_eq!(annotation_ids, vec![7])
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn negative_extent() {
        let text = MINIMAL.replace("[10, 10, 5, 5]", "[10, 10, -5, 5]");
        assert!(matches!(
            parse(&text),
            Err(Error::Annotation {
                annotation_id: 7,
                ..
            })
        ));
    }

    #[test]
    fn malformed_json_reports_offset() {
        let text = "{\"images\": [}";
        match parse(text) {
            Err(Error::Json { offset, .. }) => assert_eq!(offset, 12),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            parse(r#"{"images": []}"#),
            Err(Error::Json { .. })
        ));
    }

    #[test]
    fn crowd_annotations_are_excluded() {
        let text = MINIMAL.replace("\"category_id\": 3,", "\"category_id\": 3, \"iscrowd\": 1,");
        let ds = parse(&text).unwrap();
        let (gts, crowd) = ds.gt_boxes();
        assert!(gts[&1].is_empty());
        assert_eq!(crowd, 1);
    }

    #[test]
    fn json_round_trip_keeps_fields() {
        let ds = parse(MINIMAL).unwrap();
        assert_eq!(parse(&ds.to_json()).unwrap(), ds);
    }
}
