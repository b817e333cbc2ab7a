//! Axis-aligned boxes, IoU, and the center/size decomposition used by the
//! assigners.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned rectangle in continuous pixel coordinates (corner form).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub x1: f64,
    pub y1: f64,
    pub x2: f64,
    pub y2: f64,
}

impl BBox {
    /// Builds a box, rejecting inverted or non-finite corners.
    pub fn new(x1: f64, y1: f64, x2: f64, y2: f64) -> Result<Self> {
        let b = BBox { x1, y1, x2, y2 };
        b.validate()?;
        Ok(b)
    }

    /// Builds a box from COCO-style `x, y, w, h`.
    pub fn from_xywh(x: f64, y: f64, w: f64, h: f64) -> Result<Self> {
        BBox::new(x, y, x + w, y + h)
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.x1, self.y1, self.x2, self.y2]
            .iter()
            .all(|v| v.is_finite());
        if !finite || self.x2 < self.x1 || self.y2 < self.y1 {
            return Err(Error::InvalidBox(*self));
        }
        Ok(())
    }

    #[inline]
    pub fn width(&self) -> f64 {
        self.x2 - self.x1
    }

    #[inline]
    pub fn height(&self) -> f64 {
        self.y2 - self.y1
    }

    #[inline]
    pub fn area(&self) -> f64 {
        self.width() * self.height()
    }

    pub fn center_size(&self) -> CenterSize {
        CenterSize {
            cx: (self.x1 + self.x2) / 2.0,
            cy: (self.y1 + self.y2) / 2.0,
            w: self.width(),
            h: self.height(),
        }
    }

    pub fn translate(&self, dx: f64, dy: f64) -> BBox {
        BBox {
            x1: self.x1 + dx,
            y1: self.y1 + dy,
            x2: self.x2 + dx,
            y2: self.y2 + dy,
        }
    }
}

/// Center/extent form of a box: `(cx, cy, w, h)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterSize {
    pub cx: f64,
    pub cy: f64,
    pub w: f64,
    pub h: f64,
}

impl CenterSize {
    pub fn to_box(&self) -> BBox {
        BBox {
            x1: self.cx - self.w / 2.0,
            y1: self.cy - self.h / 2.0,
            x2: self.cx + self.w / 2.0,
            y2: self.cy + self.h / 2.0,
        }
    }
}

impl From<BBox> for CenterSize {
    fn from(b: BBox) -> Self {
        b.center_size()
    }
}

/// A set of boxes laid out as rows of `(cx, cy, w, h)`.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoxMatrix {
    rows: Vec<CenterSize>,
}

impl BoxMatrix {
    pub fn from_boxes(boxes: &[BBox]) -> Self {
        BoxMatrix {
            rows: boxes.iter().map(BBox::center_size).collect(),
        }
    }

    pub fn rows(&self) -> &[CenterSize] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}

/// Intersection over union of two boxes.
///
/// Disjoint or touching boxes score 0, and so does any pair whose union has
/// zero area.
#[inline]
pub fn iou(a: &BBox, b: &BBox) -> f64 {
    let iw = a.x2.min(b.x2) - a.x1.max(b.x1);
    let ih = a.y2.min(b.y2) - a.y1.max(b.y1);
    if iw <= 0.0 || ih <= 0.0 {
        return 0.0;
    }
    let inter = iw * ih;
    let union = a.area() + b.area() - inter;
    if union <= 0.0 {
        return 0.0;
    }
    inter / union
}

/// IoU between two `n`×`n` squares offset by `d` pixels along the x axis.
pub fn iou_under_shift(n: f64, d: f64) -> f64 {
    let a = BBox {
        x1: 0.0,
        y1: 0.0,
        x2: n,
        y2: n,
    };
    iou(&a, &a.translate(d, 0.0))
}

/// IoU between an `n_p`-sided square centered inside an `n_g`-sided one.
pub fn iou_contained(n_p: f64, n_g: f64) -> f64 {
    let c = n_g / 2.0;
    let outer = CenterSize {
        cx: c,
        cy: c,
        w: n_g,
        h: n_g,
    }
    .to_box();
    let inner = CenterSize {
        cx: c,
        cy: c,
        w: n_p,
        h: n_p,
    }
    .to_box();
    iou(&inner, &outer)
}
