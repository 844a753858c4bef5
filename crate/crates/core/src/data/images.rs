use std::fs;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::{Error, Matrix, Result};

/// Grayscale image with pixel values in [0, 1], stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    pub rows: usize,
    pub cols: usize,
    pub pixels: Vec<f64>,
}

impl GrayImage {
    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.pixels[r * self.cols + c]
    }

    /// Column-major vectorization: pixel `(r, c)` lands at `r + c·rows`.
    pub fn to_column(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(self.rows * self.cols);
        for c in 0..self.cols {
            for r in 0..self.rows {
                v.push(self.get(r, c));
            }
        }
        v
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }
}

/// Per-axis downsampling factor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum DownsampleRate {
    Full,
    Half,
    Quarter,
    Eighth,
    Third,
}

impl DownsampleRate {
    /// Block edge length `k` for a `1/k` rate.
    pub fn block(self) -> usize {
        match self {
            DownsampleRate::Full => 1,
            DownsampleRate::Half => 2,
            DownsampleRate::Quarter => 4,
            DownsampleRate::Eighth => 8,
            DownsampleRate::Third => 3,
        }
    }

    /// Output `(rows, cols)` for a source image; partial edge blocks are
    /// dropped.
    pub fn output_shape(self, rows: usize, cols: usize) -> (usize, usize) {
        (rows / self.block(), cols / self.block())
    }
}

impl FromStr for DownsampleRate {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "1" | "1/1" => Ok(DownsampleRate::Full),
            "1/2" => Ok(DownsampleRate::Half),
            "1/4" => Ok(DownsampleRate::Quarter),
            "1/8" => Ok(DownsampleRate::Eighth),
            "1/3" => Ok(DownsampleRate::Third),
            other => Err(Error::invalid(format!(
                "unsupported downsample rate '{other}' (use 1, 1/2, 1/4, 1/8 or 1/3)"
            ))),
        }
    }
}

impl std::fmt::Display for DownsampleRate {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.block() {
            1 => write!(f, "1"),
            k => write!(f, "1/{k}"),
        }
    }
}

impl TryFrom<String> for DownsampleRate {
    type Error = Error;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<DownsampleRate> for String {
    fn from(r: DownsampleRate) -> String {
        r.to_string()
    }
}

/// Averages non-overlapping `k × k` blocks.
pub fn downsample(img: &GrayImage, rate: DownsampleRate) -> GrayImage {
    let k = rate.block();
    if k == 1 {
        return img.clone();
    }
    let (rows, cols) = rate.output_shape(img.rows, img.cols);
    let area = (k * k) as f64;
    let mut pixels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        for c in 0..cols {
            let mut sum = 0.0;
            for dr in 0..k {
                for dc in 0..k {
                    sum += img.get(r * k + dr, c * k + dc);
                }
            }
            pixels.push(sum / area);
        }
    }
    GrayImage { rows, cols, pixels }
}

fn format_err(path: &Path, reason: impl std::fmt::Display) -> Error {
    Error::InvalidInput(format!("{}: {reason}", path.display()))
}

/// Parses an 8-bit binary PGM (`P5`) and scales pixels by `1/maxval`.
pub fn read_pgm(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes).map_err(|reason| format_err(path, reason))
}

fn parse_pgm(bytes: &[u8]) -> std::result::Result<GrayImage, String> {
    let mut pos = 0;
    let mut fields = [0usize; 3];
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err("not a binary PGM (missing P5 magic)".into());
    }
    pos += 2;
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(format!("malformed header at byte {pos}"));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .unwrap()
            .parse()
            .map_err(|_| format!("header value too large at byte {start}"))?;
    }
    let [cols, rows, maxval] = fields;
    if !bytes.get(pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(format!("expected whitespace after header at byte {pos}"));
    }
    pos += 1;
    if maxval == 0 || maxval > 255 {
        return Err(format!("only 8-bit PGM is supported (maxval {maxval})"));
    }
    if rows == 0 || cols == 0 {
        return Err("image has zero size".into());
    }
    let count = rows.checked_mul(cols).ok_or_else(|| "image dimensions overflow".to_string())?;
    let data = bytes
        .get(pos..pos + count)
        .ok_or_else(|| format!("truncated pixel data: need {count} bytes after byte {pos}"))?;
    let scale = maxval as f64;
    Ok(GrayImage { rows, cols, pixels: data.iter().map(|&b| (b as f64 / scale).min(1.0)).collect() })
}

/// Writes an 8-bit `P5` PGM; pixels are clamped to [0, 1] and rounded.
pub fn write_pgm(path: &Path, img: &GrayImage) -> Result<()> {
    let mut buf = format!("P5\n{} {}\n255\n", img.cols, img.rows).into_bytes();
    buf.extend(img.pixels.iter().map(|p| (p.clamp(0.0, 1.0) * 255.0).round() as u8));
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&buf).map_err(|e| Error::io(path, e))
}

fn sorted_entries(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        out.push(entry.map_err(|e| Error::io(dir, e))?.path());
    }
    out.sort();
    Ok(out)
}

/// Loads `<root>/<class>/<image>.pgm`, downsampling each image and
/// vectorizing it column-major into one column.
///
/// Classes are the subdirectory names in sorted order.
pub fn load_image_dir(root: &Path, rate: DownsampleRate) -> Result<Dataset> {
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut labels = Vec::new();
    let mut class_names = Vec::new();
    let mut source_shape: Option<(usize, usize, std::path::PathBuf)> = None;
    let mut out_shape = (0, 0);

    for class_dir in sorted_entries(root)? {
        if !class_dir.is_dir() {
            continue;
        }
        let class_idx = class_names.len();
        let mut any = false;
        for file in sorted_entries(&class_dir)? {
            let is_pgm = file.extension().is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
            if !is_pgm || !file.is_file() {
                continue;
            }
            let img = read_pgm(&file)?;
            match &source_shape {
                None => source_shape = Some((img.rows, img.cols, file.clone())),
                Some((r, c, first)) if (*r, *c) != (img.rows, img.cols) => {
                    return Err(Error::InvalidInput(format!(
                        "mixed image sizes: {} is {}x{} but {} is {r}x{c}",
                        file.display(),
                        img.rows,
                        img.cols,
                        first.display()
                    )));
                }
                _ => {}
            }
            let small = downsample(&img, rate);
            if small.pixels.is_empty() {
                return Err(Error::InvalidInput(format!(
                    "{} ({}x{}) is smaller than one {k}x{k} block",
                    file.display(),
                    img.rows,
                    img.cols,
                    k = rate.block()
                )));
            }
            out_shape = (small.rows, small.cols);
            columns.push(small.to_column());
            labels.push(class_idx);
            any = true;
        }
        if any {
            let name = class_dir.file_name().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            class_names.push(name);
        }
    }
    if columns.is_empty() {
        return Err(Error::InvalidInput(format!("no .pgm images found under {}", root.display())));
    }
    let dim = columns[0].len();
    let n = columns.len();
    let x = Matrix::from_iterator(dim, n, columns.into_iter().flatten());
    let (src_r, src_c, _) = source_shape.expect("at least one image");
    let mut ds = Dataset::new(
        x,
        labels,
        class_names,
        format!("images {} {src_r}x{src_c} rate {rate} -> {}x{}", root.display(), out_shape.0, out_shape.1),
    )?;
    ds.image_shape = Some(out_shape);
    Ok(ds)
}

/// Replaces a random square block in `⌈fraction · n⌉` randomly chosen image
/// columns with uniform noise in [0, 1]. The block edge is
/// `block_frac · min(rows, cols)`. Marks the touched columns in
/// `corrupted_mask`.
pub fn occlude_blocks(ds: &mut Dataset, block_frac: f64, fraction: f64, seed: u64) -> Result<()> {
    let (rows, cols) =
        ds.image_shape.ok_or_else(|| Error::invalid("occlusion needs image-shaped columns"))?;
    if !(0.0..=1.0).contains(&block_frac) || !(0.0..=1.0).contains(&fraction) {
        return Err(Error::invalid("block_frac and fraction must lie in [0, 1]"));
    }
    let edge = ((rows.min(cols) as f64) * block_frac).round() as usize;
    let n = ds.len();
    let count = ((fraction * n as f64) - 1e-9).ceil().max(0.0) as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mask = ds.corrupted_mask.clone().unwrap_or_else(|| vec![false; n]);
    let mut picked = sample(&mut rng, n, count).into_vec();
    picked.sort_unstable();
    for j in picked {
        let top = rng.random_range(0..=rows - edge);
        let left = rng.random_range(0..=cols - edge);
        for c in left..left + edge {
            for r in top..top + edge {
                ds.x[(r + c * rows, j)] = rng.random::<f64>();
            }
        }
        mask[j] = true;
    }
    ds.corrupted_mask = Some(mask);
    Ok(())
}
