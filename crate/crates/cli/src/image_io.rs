//! Grayscale image and overlay I/O.
//!
//! Inputs are binary PGM (P5) or grayscale PNG. Colour inputs are rejected
//! rather than converted.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use psls::{Mask, ScalarField};

use crate::error::{CliError, CliResult};

pub const GREEN: [u8; 3] = [0, 255, 0];
pub const RED: [u8; 3] = [255, 0, 0];

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

/// Loads a grayscale image as intensities in `[0, 255]`.
pub fn load_image(path: &Path) -> CliResult<ScalarField> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    if bytes.starts_with(b"P5") {
        parse_pgm(&bytes).map_err(|d| CliError::format(path, d))
    } else if bytes.starts_with(b"\x89PNG") {
        load_png(path)
    } else if bytes.len() >= 2 && bytes[0] == b'P' && bytes[1].is_ascii_digit() {
        Err(CliError::format(
            path,
            format!(
                "unsupported netpbm variant P{}; only binary grayscale P5 is accepted",
                bytes[1] as char
            ),
        ))
    } else {
        Err(CliError::format(
            path,
            "unrecognized format (expected PGM P5 or PNG)",
        ))
    }
}

/// Nonzero pixels are inside.
pub fn load_mask(path: &Path) -> CliResult<Mask> {
    let f = load_image(path)?;
    Ok(Mask::from_fn(f.width(), f.height(), |x, y| {
        f.get(x, y) > 0.0
    }))
}

struct Header<'a> {
    rest: &'a [u8],
}

impl<'a> Header<'a> {
    fn skip_space(&mut self) {
        loop {
            match self.rest.first() {
                Some(b) if b.is_ascii_whitespace() => self.rest = &self.rest[1..],
                Some(b'#') => {
                    let end = self
                        .rest
                        .iter()
                        .position(|&b| b == b'\n')
                        .map_or(self.rest.len(), |p| p + 1);
                    self.rest = &self.rest[end..];
                }
                _ => return,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, String> {
        self.skip_space();
        let len = self.rest.iter().take_while(|b| b.is_ascii_digit()).count();
        if len == 0 {
            return Err(if self.rest.is_empty() {
                format!("truncated header: missing {what}")
            } else {
                format!("corrupt header: {what} is not a number")
            });
        }
        let text = std::str::from_utf8(&self.rest[..len]).expect("ascii digits");
        self.rest = &self.rest[len..];
        text.parse()
            .map_err(|_| format!("corrupt header: {what} out of range"))
    }
}

fn parse_pgm(bytes: &[u8]) -> Result<ScalarField, String> {
    let mut h = Header { rest: &bytes[2..] };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(format!("corrupt header: empty image {width}x{height}"));
    }
    if maxval == 0 || maxval > 65535 {
        return Err(format!("bad maxval {maxval} (must be 1..=65535)"));
    }
    match h.rest.first() {
        Some(b) if b.is_ascii_whitespace() => h.rest = &h.rest[1..],
        Some(_) => return Err("corrupt header: no whitespace before raster".into()),
        None => return Err("truncated file: no raster data".into()),
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| "corrupt header: image too large".to_string())?;
    let sample_bytes = if maxval > 255 { 2 } else { 1 };
    let need = n * sample_bytes;
    if h.rest.len() < need {
        return Err(format!(
            "truncated file: raster has {} of {need} bytes",
            h.rest.len()
        ));
    }
    let values: Vec<f64> = if sample_bytes == 1 {
        h.rest[..need].iter().map(|&b| b as f64).collect()
    } else {
        h.rest[..need]
            .chunks_exact(2)
            .map(|c| u16::from_be_bytes([c[0], c[1]]) as f64)
            .collect()
    };
    let values = if maxval == 255 {
        values
    } else {
        values
            .into_iter()
            .map(|v| (v * 255.0 / maxval as f64).min(255.0))
            .collect()
    };
    ScalarField::new(width, height, values).map_err(|e| e.to_string())
}

fn load_png(path: &Path) -> CliResult<ScalarField> {
    let file = File::open(path).map_err(|e| CliError::io(path, e))?;
    let bad = |e: png::DecodingError| CliError::format(path, format!("corrupt PNG: {e}"));
    let mut decoder = png::Decoder::new(BufReader::new(file));
    decoder.set_transformations(png::Transformations::EXPAND);
    let mut reader = decoder.read_info().map_err(bad)?;
    let info = reader.info();
    match info.color_type {
        png::ColorType::Grayscale => {}
        png::ColorType::Indexed => {
            let palette = info.palette.as_deref().unwrap_or(&[]);
            if !palette
                .chunks_exact(3)
                .all(|c| c[0] == c[1] && c[1] == c[2])
            {
                return Err(CliError::format(path, "palette contains non-gray colours"));
            }
        }
        other => {
            return Err(CliError::format(
                path,
                format!("non-grayscale PNG ({other:?}); convert to 8-bit grayscale"),
            ))
        }
    }
    if info.bit_depth == png::BitDepth::Sixteen {
        return Err(CliError::format(path, "16-bit PNG is not supported"));
    }
    let size = reader
        .output_buffer_size()
        .ok_or_else(|| CliError::format(path, "PNG too large"))?;
    let mut buf = vec![0u8; size];
    let frame = reader.next_frame(&mut buf).map_err(bad)?;
    let (w, h) = (frame.width as usize, frame.height as usize);
    let channels = frame.color_type.samples();
    let values: Vec<f64> = (0..h)
        .flat_map(|y| {
            let row = &buf[y * frame.line_size..];
            (0..w).map(move |x| row[x * channels] as f64)
        })
        .collect();
    Ok(ScalarField::new(w, h, values)?)
}

fn to_byte(v: f64) -> u8 {
    v.round().clamp(0.0, 255.0) as u8
}

/// Writes `f` as 8-bit grayscale: PNG when the path ends in `.png`, P5 PGM otherwise.
pub fn save_gray(f: &ScalarField, path: &Path) -> CliResult<()> {
    let bytes: Vec<u8> = f.values().iter().map(|&v| to_byte(v)).collect();
    if has_extension(path, "png") {
        write_png(
            path,
            f.width(),
            f.height(),
            png::ColorType::Grayscale,
            &bytes,
        )
    } else {
        let mut out = format!("P5\n{} {}\n255\n", f.width(), f.height()).into_bytes();
        out.extend_from_slice(&bytes);
        std::fs::write(path, out).map_err(|e| CliError::io(path, e))
    }
}

/// Grayscale base with the initial boundary in green and the final boundary
/// in red on top.
pub fn render_overlay(image: &ScalarField, initial: &Mask, last: &Mask) -> CliResult<Vec<u8>> {
    for (m, what) in [(initial, "initial mask"), (last, "final mask")] {
        if m.width() != image.width() || m.height() != image.height() {
            return Err(psls::Error::Dimension(format!(
                "{what} is {}x{}, image is {}x{}",
                m.width(),
                m.height(),
                image.width(),
                image.height()
            ))
            .into());
        }
    }
    let mut rgb: Vec<u8> = image
        .values()
        .iter()
        .flat_map(|&v| [to_byte(v); 3])
        .collect();
    for (mask, colour) in [(initial, GREEN), (last, RED)] {
        for (i, _) in mask
            .boundary()
            .bits()
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
        {
            rgb[3 * i..3 * i + 3].copy_from_slice(&colour);
        }
    }
    Ok(rgb)
}

/// RGB overlay: binary P6 PPM when the path ends in `.ppm`, PNG otherwise.
pub fn save_overlay(
    image: &ScalarField,
    initial: &Mask,
    last: &Mask,
    path: &Path,
) -> CliResult<()> {
    let rgb = render_overlay(image, initial, last)?;
    let (w, h) = (image.width(), image.height());
    if has_extension(path, "ppm") {
        let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
        out.extend_from_slice(&rgb);
        std::fs::write(path, out).map_err(|e| CliError::io(path, e))
    } else {
        write_png(path, w, h, png::ColorType::Rgb, &rgb)
    }
}

fn write_png(
    path: &Path,
    w: usize,
    h: usize,
    colour: png::ColorType,
    data: &[u8],
) -> CliResult<()> {
    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
    let io_err = |e: png::EncodingError| match e {
        png::EncodingError::IoError(e) => CliError::io(path, e),
        other => CliError::format(path, other.to_string()),
    };
    let mut writer = BufWriter::new(file);
    {
        let mut enc = png::Encoder::new(&mut writer, w as u32, h as u32);
        enc.set_color(colour);
        enc.set_depth(png::BitDepth::Eight);
        let mut png_writer = enc.write_header().map_err(io_err)?;
        png_writer.write_image_data(data).map_err(io_err)?;
        png_writer.finish().map_err(io_err)?;
    }
    writer.flush().map_err(|e| CliError::io(path, e))
}
