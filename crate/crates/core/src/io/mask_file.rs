//! Mask files: 8-bit single-channel images (nonzero is foreground) or RLE
//! JSON documents.

use std::io::Cursor;
use std::path::Path;

use image::{DynamicImage, GrayImage, ImageFormat, ImageReader, Limits};

use crate::error::{Error, Result};
use crate::io::rle::{decode_rle_json, rle_encode};
use crate::mask::{BinaryMask, Dims};

/// On-disk representation chosen from a file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskFormat {
    Png,
    RleJson,
}

impl MaskFormat {
    pub fn from_path(path: &Path) -> Result<Self> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        match ext.as_deref() {
            Some("png") => Ok(MaskFormat::Png),
            Some("json") => Ok(MaskFormat::RleJson),
            _ => Err(Error::UnsupportedImage(format!(
                "{}: masks are written as .png or .json",
                path.display()
            ))),
        }
    }
}

fn decode_limits() -> Limits {
    let mut limits = Limits::default();
    limits.max_image_width = Some(1 << 16);
    limits.max_image_height = Some(1 << 16);
    limits.max_alloc = Some(1 << 30);
    limits
}

fn looks_like_json(bytes: &[u8]) -> bool {
    bytes
        .iter()
        .find(|b| !b.is_ascii_whitespace())
        .is_some_and(|&b| b == b'{')
}

/// Decodes an image or RLE JSON document from memory.
pub fn decode_mask_bytes(bytes: &[u8]) -> Result<BinaryMask> {
    if looks_like_json(bytes) {
        return decode_rle_json(bytes);
    }
    let mut reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::UnsupportedImage(e.to_string()))?;
    reader.limits(decode_limits());
    let img = reader
        .decode()
        .map_err(|e| Error::UnsupportedImage(e.to_string()))?;
    gray_to_mask(img)
}

fn gray_to_mask(img: DynamicImage) -> Result<BinaryMask> {
    let gray = match img {
        DynamicImage::ImageLuma8(g) => g,
        other => {
            let color = other.color();
            return Err(Error::UnsupportedImage(format!(
                "expected an 8-bit single-channel image, found {color:?}"
            )));
        }
    };
    let dims = Dims::new(gray.width(), gray.height())?;
    let mut mask = BinaryMask::empty(dims);
    let raw = gray.as_raw();
    let mut i = 0;
    while i < raw.len() {
        if raw[i] == 0 {
            i += 1;
            continue;
        }
        let start = i;
        while i < raw.len() && raw[i] != 0 {
            i += 1;
        }
        mask.fill_range(start, i);
    }
    Ok(mask)
}

/// 8-bit grayscale image with foreground 255.
pub fn mask_to_gray(mask: &BinaryMask) -> GrayImage {
    let mut buf = vec![0u8; mask.dims().pixel_count()];
    for i in mask.indices() {
        buf[i] = 255;
    }
    GrayImage::from_raw(mask.width(), mask.height(), buf).expect("buffer matches dimensions")
}

pub fn encode_png(mask: &BinaryMask) -> Vec<u8> {
    let mut out = Cursor::new(Vec::new());
    mask_to_gray(mask)
        .write_to(&mut out, ImageFormat::Png)
        .expect("in-memory PNG encoding cannot fail");
    out.into_inner()
}

pub fn encode_mask(mask: &BinaryMask, format: MaskFormat) -> Vec<u8> {
    match format {
        MaskFormat::Png => encode_png(mask),
        MaskFormat::RleJson => {
            let mut s = rle_encode(mask).to_json();
            s.push('\n');
            s.into_bytes()
        }
    }
}

pub fn load_mask(path: impl AsRef<Path>) -> Result<BinaryMask> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_mask_bytes(&bytes).map_err(|e| e.at(path))
}

/// Writes `mask` as PNG or RLE JSON according to the file extension.
pub fn save_mask(mask: &BinaryMask, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes = encode_mask(mask, MaskFormat::from_path(path)?);
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
