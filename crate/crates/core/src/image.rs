//! Embedded image enumeration and the size-bucket image block.

use crate::pdf::{Document, PdfValue};
use crate::text::{analyze_page, PageContent};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageInfo {
    pub width_px: u64,
    pub height_px: u64,
    pub area_px: u64,
    pub byte_offset: usize,
    /// The stream's declared `/Length` disagreed with its actual extent.
    pub length_mismatch: bool,
}

impl ImageInfo {
    pub fn new(width_px: u64, height_px: u64, byte_offset: usize) -> Self {
        Self {
            width_px,
            height_px,
            area_px: width_px.saturating_mul(height_px),
            byte_offset,
            length_mismatch: false,
        }
    }
}

/// Pixel-area bucket boundaries: 32², 128², 512² and 1024² pixels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ImageThresholds {
    pub xsmall: u64,
    pub small: u64,
    pub medium: u64,
    pub large: u64,
}

impl Default for ImageThresholds {
    fn default() -> Self {
        Self {
            xsmall: 1_024,
            small: 16_384,
            medium: 262_144,
            large: 1_048_576,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ImageBlock {
    pub count_image_xsmall: usize,
    pub count_image_small: usize,
    pub count_image_med: usize,
    pub count_image_large: usize,
    pub count_image_xlarge: usize,
    pub count_image_total: usize,
    pub image_totalpx: u64,
    pub ratio_imagepx_size: f64,
    pub pos_image_min: usize,
    pub pos_image_avg: f64,
    pub pos_image_max: usize,
    pub image_mismatch: bool,
}

impl ImageBlock {
    pub const LEN: usize = 12;

    pub fn to_values(&self) -> [f64; 12] {
        [
            self.count_image_xsmall as f64,
            self.count_image_small as f64,
            self.count_image_med as f64,
            self.count_image_large as f64,
            self.count_image_xlarge as f64,
            self.count_image_total as f64,
            self.image_totalpx as f64,
            self.ratio_imagepx_size,
            self.pos_image_min as f64,
            self.pos_image_avg,
            self.pos_image_max as f64,
            self.image_mismatch as u8 as f64,
        ]
    }
}

fn dimension(doc: &Document, dict: &crate::pdf::Dictionary, keys: &[&str]) -> u64 {
    for key in keys {
        if let Some(v) = doc.lookup(dict, key) {
            return match v.as_i64() {
                Some(n) if n >= 0 => n as u64,
                _ => {
                    doc.warn(format!("image /{key} is not a nonnegative number"));
                    0
                }
            };
        }
    }
    0
}

/// Image XObjects anywhere in the object table (referenced by a page or
/// not), in object order.
pub fn image_xobjects(doc: &Document) -> Vec<ImageInfo> {
    doc.objects()
        .values()
        .filter_map(|v| match v {
            PdfValue::Stream(s) => Some(s),
            _ => None,
        })
        .filter(|s| {
            s.dict
                .get("Subtype")
                .map(|v| doc.resolve(v))
                .and_then(PdfValue::as_name)
                == Some("Image")
        })
        .map(|s| {
            let mut info = ImageInfo::new(
                dimension(doc, &s.dict, &["Width", "W"]),
                dimension(doc, &s.dict, &["Height", "H"]),
                s.offset,
            );
            info.length_mismatch = s.length_repaired;
            info
        })
        .collect()
}

/// Image XObjects followed by inline images from already analysed pages.
/// Inline images are placed at the offset of their page's content stream.
pub fn images_with_inline(doc: &Document, pages: &[PageContent]) -> Vec<ImageInfo> {
    let mut out = image_xobjects(doc);
    for page in pages {
        let offset = page.stream_offset.unwrap_or(0);
        out.extend(
            page.inline_images
                .iter()
                .map(|img| ImageInfo::new(img.width, img.height, offset)),
        );
    }
    out
}

pub fn enumerate_images(doc: &Document) -> Vec<ImageInfo> {
    let pages: Vec<PageContent> = (0..doc.pages().len())
        .map(|i| analyze_page(doc, i))
        .collect();
    images_with_inline(doc, &pages)
}

pub fn image_block(
    images: &[ImageInfo],
    file_size: usize,
    thresholds: ImageThresholds,
) -> ImageBlock {
    let mut b = ImageBlock::default();
    for img in images {
        let a = img.area_px;
        if a < thresholds.xsmall {
            b.count_image_xsmall += 1;
        } else if a < thresholds.small {
            b.count_image_small += 1;
        } else if a < thresholds.medium {
            b.count_image_med += 1;
        } else if a < thresholds.large {
            b.count_image_large += 1;
        } else {
            b.count_image_xlarge += 1;
        }
        b.image_totalpx = b.image_totalpx.saturating_add(a);
    }
    b.count_image_total = images.len();
    if file_size > 0 {
        b.ratio_imagepx_size = b.image_totalpx as f64 / file_size as f64;
    }
    if !images.is_empty() {
        b.pos_image_min = images.iter().map(|i| i.byte_offset).min().unwrap_or(0);
        b.pos_image_max = images.iter().map(|i| i.byte_offset).max().unwrap_or(0);
        b.pos_image_avg =
            images.iter().map(|i| i.byte_offset as f64).sum::<f64>() / images.len() as f64;
    }
    b.image_mismatch = images.iter().any(|i| i.area_px == 0 || i.length_mismatch);
    b
}
