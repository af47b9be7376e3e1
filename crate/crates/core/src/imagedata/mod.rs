//! Pixel rasters, PNM file I/O, synthetic embedders and dataset manifests.

mod embed;
mod manifest;
mod pnm;
mod synth;

pub use embed::{embed_additive, embed_lsb_match, embed_lsb_replace};
pub use manifest::{DatasetManifest, ManifestEntry};
pub use pnm::{
    encode_pgm, encode_ppm, load_pgm, load_ppm, parse_pgm, parse_ppm, write_pgm, write_ppm,
};
pub use synth::synthetic_cover;
pub(crate) use embed::select_indices;

use crate::error::{Error, Result};

/// 8-bit grayscale raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero-sized image {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> u8) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels).expect("from_fn dimensions")
    }

    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self::from_fn(width, height, |_, _| value)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.pixels[y * self.width + x]
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [u8] {
        &mut self.pixels
    }

    /// Pixel values as a real-valued `height x width` plane.
    pub fn to_plane(&self) -> ndarray::Array2<f64> {
        ndarray::Array2::from_shape_fn((self.height, self.width), |(y, x)| {
            f64::from(self.get(x, y))
        })
    }

    /// Returns the `(width-dx) x (height-dy)` sub-image whose origin is `(dx, dy)`.
    pub fn crop(&self, dx: usize, dy: usize) -> Result<GrayImage> {
        if dx >= self.width || dy >= self.height {
            return Err(Error::OffsetOutOfRange {
                dx,
                dy,
                width: self.width,
                height: self.height,
            });
        }
        Ok(GrayImage::from_fn(
            self.width - dx,
            self.height - dy,
            |x, y| self.get(x + dx, y + dy),
        ))
    }

    /// Replicates the gray channel into three identical color channels.
    pub fn to_rgb(&self) -> RgbImage {
        let pixels = self.pixels.iter().map(|&p| [p, p, p]).collect();
        RgbImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// 8-bit RGB raster stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: usize,
    height: usize,
    pixels: Vec<[u8; 3]>,
}

impl RgbImage {
    pub fn new(width: usize, height: usize, pixels: Vec<[u8; 3]>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidImage(format!(
                "zero-sized image {width}x{height}"
            )));
        }
        if pixels.len() != width * height {
            return Err(Error::InvalidImage(format!(
                "{} pixels for a {width}x{height} image",
                pixels.len()
            )));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [u8; 3],
    ) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels).expect("from_fn dimensions")
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub fn get(&self, x: usize, y: usize) -> [u8; 3] {
        self.pixels[y * self.width + x]
    }

    pub fn channel(&self, c: usize) -> GrayImage {
        GrayImage::from_fn(self.width, self.height, |x, y| self.get(x, y)[c])
    }

    pub fn from_channels(r: &GrayImage, g: &GrayImage, b: &GrayImage) -> Result<RgbImage> {
        if (r.width, r.height) != (g.width, g.height) || (r.width, r.height) != (b.width, b.height)
        {
            return Err(Error::ShapeMismatch("channel dimensions differ".into()));
        }
        Ok(RgbImage::from_fn(r.width, r.height, |x, y| {
            [r.get(x, y), g.get(x, y), b.get(x, y)]
        }))
    }

    /// BT.601 luma, rounded half away from zero.
    pub fn to_gray(&self) -> GrayImage {
        let pixels = self
            .pixels
            .iter()
            .map(|&[r, g, b]| {
                let y = 0.299 * f64::from(r) + 0.587 * f64::from(g) + 0.114 * f64::from(b);
                y.round().clamp(0.0, 255.0) as u8
            })
            .collect();
        GrayImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Free-function form of [`RgbImage::to_gray`].
pub fn to_gray(img: &RgbImage) -> GrayImage {
    img.to_gray()
}

/// Free-function form of [`GrayImage::crop`].
pub fn crop(img: &GrayImage, dx: usize, dy: usize) -> Result<GrayImage> {
    img.crop(dx, dy)
}
