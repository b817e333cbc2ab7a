//! Box lists as CSV with an `x1,y1,x2,y2` header.

use std::path::Path;

use anyhow::{bail, Context};
use serde::Deserialize;
use sodkit::BBox;

#[derive(Deserialize)]
struct Row {
    x1: f64,
    y1: f64,
    x2: f64,
    y2: f64,
}

pub fn read_boxes(path: &Path) -> anyhow::Result<Vec<BBox>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("opening {}", path.display()))?;
    let headers = reader.headers()?.clone();
    let mut boxes = Vec::new();
    let mut record = csv::StringRecord::new();
    loop {
        let more = reader.read_record(&mut record).map_err(|e| {
            let line = e.position().map_or(0, |p| p.line());
            anyhow::anyhow!("{}: line {line}: {e}", path.display())
        })?;
        if !more {
            break;
        }
        let line = record.position().map_or(0, |p| p.line());
        let row: Row = record
            .deserialize(Some(&headers))
            .map_err(|e| anyhow::anyhow!("{}: line {line}: {e}", path.display()))?;
        let b = BBox::new(row.x1, row.y1, row.x2, row.y2)
            .with_context(|| format!("{}: line {line}", path.display()))?;
        boxes.push(b);
    }
    Ok(boxes)
}

pub fn read_nonempty(path: &Path, what: &str) -> anyhow::Result<Vec<BBox>> {
    let boxes = read_boxes(path)?;
    if boxes.is_empty() {
        bail!("{}: no {what} boxes", path.display());
    }
    Ok(boxes)
}
