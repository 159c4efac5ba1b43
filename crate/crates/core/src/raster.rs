//! Grayscale rasters and PNG export.

use std::io::Write;
use std::path::Path;

use num_complex::Complex64;

use crate::dimension::PointCloud;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub width: usize,
    pub height: usize,
    /// Row-major, row 0 on top.
    pub pixels: Vec<u8>,
}

impl Raster {
    pub fn new(width: usize, height: usize) -> Self {
        Raster {
            width,
            height,
            pixels: vec![0; width * height],
        }
    }

    pub fn set(&mut self, col: usize, row: usize, value: u8) {
        self.pixels[row * self.width + col] = value;
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn count(&self, value: u8) -> usize {
        self.pixels.iter().filter(|&&p| p == value).count()
    }

    pub fn encode_png<W: Write>(&self, out: W) -> Result<(), png::EncodingError> {
        self.encode_png_with_text(out, &[])
    }

    /// PNG with `(keyword, text)` pairs stored as tEXt chunks.
    pub fn encode_png_with_text<W: Write>(
        &self,
        out: W,
        text: &[(String, String)],
    ) -> Result<(), png::EncodingError> {
        let mut encoder = png::Encoder::new(out, self.width as u32, self.height as u32);
        encoder.set_color(png::ColorType::Grayscale);
        encoder.set_depth(png::BitDepth::Eight);
        for (key, value) in text {
            encoder.add_text_chunk(key.clone(), value.clone())?;
        }
        let mut writer = encoder.write_header()?;
        writer.write_image_data(&self.pixels)
    }

    pub fn write_png(&self, path: &Path, text: &[(String, String)]) -> Result<(), png::EncodingError> {
        let file = std::fs::File::create(path)?;
        self.encode_png_with_text(std::io::BufWriter::new(file), text)
    }
}

/// Covered cells of side `eps` over the cloud's bounding box: 255 where a point falls, 0 elsewhere.
/// A 1-D cloud renders as a single row.
pub fn render_cloud(cloud: &PointCloud, eps: f64) -> Raster {
    let (lo, hi) = cloud.bounds();
    let span = hi - lo;
    let width = ((span.re / eps).floor() as usize + 1).max(1);
    let height = if cloud.dim == 1 {
        1
    } else {
        ((span.im / eps).floor() as usize + 1).max(1)
    };
    let mut raster = Raster::new(width, height);
    for p in &cloud.points {
        let q: Complex64 = (p - lo) / eps;
        let col = (q.re.floor() as usize).min(width - 1);
        let row = if cloud.dim == 1 {
            0
        } else {
            height - 1 - (q.im.floor() as usize).min(height - 1)
        };
        raster.set(col, row, 255);
    }
    raster
}
