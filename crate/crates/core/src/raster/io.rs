use std::path::{Path, PathBuf};

use thiserror::Error;

use super::ImageBuffer;
use crate::genome::{CanvasDims, Color};

#[derive(Debug, Error)]
pub enum ImageIoError {
    #[error("{path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{path}: image has an empty side")]
    Empty { path: PathBuf },
}

/// Loads any supported image as 8-bit RGB. Alpha is flattened over black.
pub fn load_png(path: &Path) -> Result<ImageBuffer, ImageIoError> {
    let img = image::open(path).map_err(|source| ImageIoError::Image {
        path: path.to_path_buf(),
        source,
    })?;
    let rgba = img.to_rgba8();
    let dims = CanvasDims::new(rgba.width(), rgba.height()).map_err(|_| ImageIoError::Empty {
        path: path.to_path_buf(),
    })?;
    let pixels = rgba
        .pixels()
        .map(|p| {
            let [r, g, b, a] = p.0;
            let over_black = |c: u8| (f64::from(c) * f64::from(a) / 255.0).round() as u8;
            Color::new(over_black(r), over_black(g), over_black(b))
        })
        .collect();
    Ok(ImageBuffer::from_pixels(dims, pixels).expect("decoder yields width * height pixels"))
}

pub fn save_png(buffer: &ImageBuffer, path: &Path) -> Result<(), ImageIoError> {
    let dims = buffer.dims();
    let raw: Vec<u8> = buffer.pixels().iter().flat_map(Color::channels).collect();
    let img = image::RgbImage::from_raw(dims.width, dims.height, raw)
        .expect("buffer holds width * height pixels");
    img.save_with_format(path, image::ImageFormat::Png)
        .map_err(|source| ImageIoError::Image {
            path: path.to_path_buf(),
            source,
        })
}
