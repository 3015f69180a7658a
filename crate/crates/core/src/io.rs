//! 8-bit PNG input and output.
//!
//! Grayscale files carry alpha mattes, trimaps and masks; RGB files carry
//! color images. RGBA files are split into color and alpha on read. 16-bit,
//! sub-byte and paletted files are rejected.

use std::fs::File;
use std::io::{BufReader, BufWriter, Cursor, Write};
use std::path::Path;

use png::{BitDepth, ColorType, Transformations};

use crate::connectivity::RegionSet;
use crate::error::{MatteError, Result};
use crate::image::{AlphaMatte, InverseAlpha, Mask, RgbImage};
use crate::trimap::Trimap;

/// Decoded contents of an accepted PNG file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PngImage {
    Gray(AlphaMatte),
    Rgb(RgbImage),
    Rgba(RgbImage, AlphaMatte),
}

impl PngImage {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            PngImage::Gray(a) => a.dims(),
            PngImage::Rgb(c) | PngImage::Rgba(c, _) => c.dims(),
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            PngImage::Gray(_) => "grayscale",
            PngImage::Rgb(_) => "RGB",
            PngImage::Rgba(..) => "RGBA",
        }
    }
}

pub fn decode_png(bytes: &[u8]) -> Result<PngImage> {
    decode_from(Cursor::new(bytes))
}

pub fn read_png(path: impl AsRef<Path>) -> Result<PngImage> {
    decode_from(BufReader::new(File::open(path)?))
}

fn decode_from<R: std::io::BufRead + std::io::Seek>(reader: R) -> Result<PngImage> {
    let mut decoder = png::Decoder::new(reader);
    decoder.set_transformations(Transformations::IDENTITY);
    let mut reader = decoder.read_info()?;
    let (color, depth) = {
        let info = reader.info();
        (info.color_type, info.bit_depth)
    };
    if depth != BitDepth::Eight {
        return Err(MatteError::Format(format!("{depth:?} bit depth, only 8-bit PNG is supported")));
    }
    let channels = match color {
        ColorType::Grayscale => 1,
        ColorType::Rgb => 3,
        ColorType::Rgba => 4,
        ColorType::Indexed => return Err(MatteError::Format("paletted PNG is not supported".into())),
        ColorType::GrayscaleAlpha => {
            return Err(MatteError::Format("grayscale+alpha PNG is not supported".into()))
        }
    };
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| MatteError::Format("image too large".into()))?;
    let mut buf = vec![0; size];
    let frame = reader.next_frame(&mut buf)?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let stride = frame.line_size;
    let mut packed = Vec::with_capacity(w * h * channels);
    for row in buf.chunks(stride).take(h) {
        packed.extend_from_slice(&row[..w * channels]);
    }
    Ok(match channels {
        1 => PngImage::Gray(AlphaMatte::new(w, h, packed)?),
        3 => PngImage::Rgb(RgbImage::from_interleaved(w, h, &packed)?),
        _ => {
            let mut rgb = Vec::with_capacity(w * h);
            let mut alpha = Vec::with_capacity(w * h);
            for px in packed.chunks_exact(4) {
                rgb.push([px[0], px[1], px[2]]);
                alpha.push(px[3]);
            }
            PngImage::Rgba(RgbImage::new(w, h, rgb)?, AlphaMatte::new(w, h, alpha)?)
        }
    })
}

/// Reads a grayscale PNG as an alpha matte.
pub fn read_alpha(path: impl AsRef<Path>) -> Result<AlphaMatte> {
    match read_png(path)? {
        PngImage::Gray(a) => Ok(a),
        other => Err(MatteError::Format(format!("expected grayscale PNG, found {}", other.kind()))),
    }
}

/// Reads an RGB PNG. RGBA input is accepted and its alpha channel dropped.
pub fn read_rgb(path: impl AsRef<Path>) -> Result<RgbImage> {
    match read_png(path)? {
        PngImage::Rgb(c) | PngImage::Rgba(c, _) => Ok(c),
        other => Err(MatteError::Format(format!("expected RGB PNG, found {}", other.kind()))),
    }
}

pub fn read_trimap(path: impl AsRef<Path>) -> Result<Trimap> {
    let alpha = read_alpha(path)?;
    let (w, h) = alpha.dims();
    Trimap::new(w, h, alpha.into_vec())
}

fn encode(
    out: impl Write,
    width: usize,
    height: usize,
    color: ColorType,
    depth: BitDepth,
    data: &[u8],
) -> Result<()> {
    let (w, h) = (dim_u32(width)?, dim_u32(height)?);
    let mut encoder = png::Encoder::new(out, w, h);
    encoder.set_color(color);
    encoder.set_depth(depth);
    let mut writer = encoder.write_header()?;
    writer.write_image_data(data)?;
    writer.finish()?;
    Ok(())
}

fn dim_u32(v: usize) -> Result<u32> {
    u32::try_from(v).map_err(|_| MatteError::Format(format!("dimension {v} exceeds PNG limits")))
}

fn write_file(
    path: &Path,
    width: usize,
    height: usize,
    color: ColorType,
    depth: BitDepth,
    data: &[u8],
) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    encode(&mut out, width, height, color, depth, data)?;
    out.flush()?;
    Ok(())
}

pub fn encode_gray(width: usize, height: usize, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    encode(&mut out, width, height, ColorType::Grayscale, BitDepth::Eight, data)?;
    Ok(out)
}

pub fn encode_rgb(image: &RgbImage) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let (w, h) = image.dims();
    encode(&mut out, w, h, ColorType::Rgb, BitDepth::Eight, &image.to_interleaved())?;
    Ok(out)
}

pub fn encode_rgba(color: &RgbImage, alpha: &AlphaMatte) -> Result<Vec<u8>> {
    crate::image::ensure_same(color.dims(), alpha.dims())?;
    let data: Vec<u8> = color
        .pixels()
        .iter()
        .zip(alpha.as_slice())
        .flat_map(|(c, &a)| [c[0], c[1], c[2], a])
        .collect();
    let mut out = Vec::new();
    let (w, h) = color.dims();
    encode(&mut out, w, h, ColorType::Rgba, BitDepth::Eight, &data)?;
    Ok(out)
}

pub fn write_alpha(path: impl AsRef<Path>, alpha: &AlphaMatte) -> Result<()> {
    let (w, h) = alpha.dims();
    write_file(path.as_ref(), w, h, ColorType::Grayscale, BitDepth::Eight, alpha.as_slice())
}

pub fn write_inverse(path: impl AsRef<Path>, inv: &InverseAlpha) -> Result<()> {
    let (w, h) = inv.dims();
    write_file(path.as_ref(), w, h, ColorType::Grayscale, BitDepth::Eight, &inv.to_gray())
}

pub fn write_mask(path: impl AsRef<Path>, mask: &Mask) -> Result<()> {
    let (w, h) = mask.dims();
    write_file(path.as_ref(), w, h, ColorType::Grayscale, BitDepth::Eight, &mask.to_gray())
}

pub fn write_rgb(path: impl AsRef<Path>, image: &RgbImage) -> Result<()> {
    let (w, h) = image.dims();
    write_file(path.as_ref(), w, h, ColorType::Rgb, BitDepth::Eight, &image.to_interleaved())
}

pub fn write_trimap(path: impl AsRef<Path>, trimap: &Trimap) -> Result<()> {
    let (w, h) = trimap.dims();
    write_file(path.as_ref(), w, h, ColorType::Grayscale, BitDepth::Eight, trimap.as_slice())
}

/// Writes region labels as 16-bit grayscale for inspection. Labels above
/// 65535 saturate.
pub fn write_label_map(path: impl AsRef<Path>, regions: &RegionSet) -> Result<()> {
    let (w, h) = regions.dims();
    let data: Vec<u8> = regions
        .label_map()
        .iter()
        .flat_map(|&l| (l.min(u32::from(u16::MAX)) as u16).to_be_bytes())
        .collect();
    write_file(path.as_ref(), w, h, ColorType::Grayscale, BitDepth::Sixteen, &data)
}
