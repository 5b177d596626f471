//! Image loading and normalization for the convolutional encoder.

use std::path::Path;

use image::imageops::{self, FilterType};
use image::{DynamicImage, Rgb32FImage};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const IMAGE_SIZE: usize = 224;
pub const IMAGENET_MEAN: [f32; 3] = [0.485, 0.456, 0.406];
pub const IMAGENET_STD: [f32; 3] = [0.229, 0.224, 0.225];

/// A normalized `3 x 224 x 224` image in channel-major order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImageTensor {
    data: Vec<f32>,
}

impl ImageTensor {
    pub const SHAPE: [usize; 3] = [3, IMAGE_SIZE, IMAGE_SIZE];

    pub fn from_chw(data: Vec<f32>) -> Result<Self> {
        if data.len() != 3 * IMAGE_SIZE * IMAGE_SIZE {
            return Err(Error::Data(format!("image tensor must hold 3x{IMAGE_SIZE}x{IMAGE_SIZE} values, got {}", data.len())));
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(Error::Data("image tensor contains non-finite values".into()));
        }
        Ok(ImageTensor { data })
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn at(&self, channel: usize, y: usize, x: usize) -> f32 {
        self.data[(channel * IMAGE_SIZE + y) * IMAGE_SIZE + x]
    }
}

/// Resizes (bilinear, aspect ratio not kept) and standardizes an image.
pub fn preprocess_dynamic(img: &DynamicImage) -> ImageTensor {
    let rgb: Rgb32FImage = img.to_rgb32f();
    let side = IMAGE_SIZE as u32;
    let rgb = if rgb.dimensions() == (side, side) { rgb } else { imageops::resize(&rgb, side, side, FilterType::Triangle) };
    let plane = IMAGE_SIZE * IMAGE_SIZE;
    let mut data = vec![0f32; 3 * plane];
    for (x, y, px) in rgb.enumerate_pixels() {
        let off = y as usize * IMAGE_SIZE + x as usize;
        for c in 0..3 {
            data[c * plane + off] = (px.0[c] - IMAGENET_MEAN[c]) / IMAGENET_STD[c];
        }
    }
    ImageTensor { data }
}

/// Decodes an image file (format sniffed from content) and preprocesses it.
pub fn preprocess_image(path: &Path, article_id: &str) -> Result<ImageTensor> {
    let err = |message: String| Error::Image { article_id: article_id.to_string(), message };
    let reader = image::ImageReader::open(path)
        .map_err(|e| err(format!("{}: {e}", path.display())))?
        .with_guessed_format()
        .map_err(|e| err(format!("{}: {e}", path.display())))?;
    let img = reader.decode().map_err(|e| err(format!("{}: {e}", path.display())))?;
    let t = preprocess_dynamic(&img);
    if t.data.iter().any(|v| !v.is_finite()) {
        return Err(err("non-finite pixel values".into()));
    }
    Ok(t)
}
