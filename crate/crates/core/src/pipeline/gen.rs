use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::write_file;
use crate::error::{Error, Result};
use crate::features::{embed_jsteg, AnyImage};
use crate::imagedata::{
    embed_additive, embed_lsb_match, embed_lsb_replace, encode_pgm, encode_ppm, synthetic_cover,
    DatasetManifest, GrayImage, ManifestEntry, RgbImage,
};
use crate::rng::derive_seed;
use crate::transforms::{block_dct_quant, decode, QTable};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbedMethod {
    #[default]
    Lsbm,
    Lsbr,
    Additive,
    Jsteg,
}

impl EmbedMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            EmbedMethod::Lsbm => "lsbm",
            EmbedMethod::Lsbr => "lsbr",
            EmbedMethod::Additive => "additive",
            EmbedMethod::Jsteg => "jsteg",
        }
    }
}

impl fmt::Display for EmbedMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbedMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lsbm" => Ok(EmbedMethod::Lsbm),
            "lsbr" => Ok(EmbedMethod::Lsbr),
            "additive" => Ok(EmbedMethod::Additive),
            "jsteg" => Ok(EmbedMethod::Jsteg),
            other => Err(Error::InvalidParameter(format!(
                "unknown embedding method {other:?} (expected lsbm, lsbr, additive or jsteg)"
            ))),
        }
    }
}

/// Embedding method, its rate (bits per pixel or per usable coefficient;
/// noise strength for `additive`) and the master seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedSpec {
    pub method: EmbedMethod,
    pub rate: f64,
    pub seed: u64,
}

impl Default for EmbedSpec {
    fn default() -> Self {
        Self {
            method: EmbedMethod::Lsbm,
            rate: 0.5,
            seed: 0,
        }
    }
}

impl EmbedSpec {
    pub fn validate(&self) -> Result<()> {
        let ok = match self.method {
            EmbedMethod::Additive => self.rate >= 0.0 && self.rate.is_finite(),
            _ => (0.0..=1.0).contains(&self.rate),
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!(
                "rate {} out of range for {}",
                self.rate, self.method
            )))
        }
    }
}

/// PGM/PPM files in `dir`, sorted by file name.
pub fn list_covers(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let rd = std::fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut out = Vec::new();
    for entry in rd {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase);
        if path.is_file() && matches!(ext.as_deref(), Some("pgm" | "ppm")) {
            out.push(path);
        }
    }
    out.sort();
    Ok(out)
}

fn embed_gray(img: &GrayImage, spec: &EmbedSpec, seed: u64) -> Result<GrayImage> {
    match spec.method {
        EmbedMethod::Lsbm => embed_lsb_match(img, spec.rate, seed),
        EmbedMethod::Lsbr => embed_lsb_replace(img, spec.rate, seed),
        EmbedMethod::Additive => embed_additive(img, spec.rate, seed),
        EmbedMethod::Jsteg => unreachable!("jsteg is handled in the DCT domain"),
    }
}

fn embed_rgb(img: &RgbImage, spec: &EmbedSpec, seed: u64) -> Result<RgbImage> {
    let ch: Vec<GrayImage> = (0..3)
        .map(|c| embed_gray(&img.channel(c), spec, derive_seed(seed, c as u64)))
        .collect::<Result<_>>()?;
    RgbImage::from_channels(&ch[0], &ch[1], &ch[2])
}

/// Writes a clean and a stego file per cover into `out_dir`, plus
/// `manifest.csv` listing them (clean row first) with relative paths.
///
/// JSteg works on quantized DCT coefficients of the grayscale cover: the
/// clean row is the decoded quantized cover and the stego row the decoded
/// embedded coefficients.
pub fn cmd_gen(
    covers_dir: impl AsRef<Path>,
    spec: &EmbedSpec,
    qtable: &QTable,
    out_dir: impl AsRef<Path>,
) -> Result<DatasetManifest> {
    spec.validate()?;
    let out_dir = out_dir.as_ref();
    let covers = list_covers(&covers_dir)?;
    if covers.len() < 2 {
        return Err(Error::InvalidParameter(format!(
            "{} holds {} PGM/PPM covers, need at least 2",
            covers_dir.as_ref().display(),
            covers.len()
        )));
    }
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;

    let mut entries = Vec::with_capacity(2 * covers.len());
    for (k, cover_path) in covers.iter().enumerate() {
        let img = AnyImage::load(cover_path)?;
        let seed = derive_seed(spec.seed, k as u64);
        let stem = cover_path
            .file_stem()
            .and_then(|s| s.to_str())
            .unwrap_or("cover")
            .to_string();
        let (clean, stego, ext) = match (&img, spec.method) {
            (_, EmbedMethod::Jsteg) => {
                let j1 = block_dct_quant(&img.gray(), qtable)?;
                let j1s = embed_jsteg(&j1, spec.rate, seed)?;
                (encode_pgm(&decode(&j1)), encode_pgm(&decode(&j1s)), "pgm")
            }
            (AnyImage::Gray(g), _) => (encode_pgm(g), encode_pgm(&embed_gray(g, spec, seed)?), "pgm"),
            (AnyImage::Rgb(c), _) => (encode_ppm(c), encode_ppm(&embed_rgb(c, spec, seed)?), "ppm"),
        };
        let clean_name = format!("{stem}.clean.{ext}");
        let stego_name = format!("{stem}.{}.{ext}", spec.method);
        write_file(&out_dir.join(&clean_name), &clean)?;
        write_file(&out_dir.join(&stego_name), &stego)?;
        entries.push(ManifestEntry {
            path: clean_name.into(),
            label: 0,
            method: "clean".into(),
            rate: 0.0,
        });
        entries.push(ManifestEntry {
            path: stego_name.into(),
            label: 1,
            method: spec.method.as_str().into(),
            rate: spec.rate,
        });
    }
    let manifest = DatasetManifest::new(entries)?;
    manifest.write(out_dir.join("manifest.csv"))?;
    Ok(manifest)
}

/// Writes `count` seeded synthetic grayscale covers as `cover_NNNN.pgm`.
pub fn write_synthetic_covers(
    dir: impl AsRef<Path>,
    count: usize,
    width: usize,
    height: usize,
    seed: u64,
) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    (0..count)
        .map(|k| {
            let img = synthetic_cover(width, height, derive_seed(seed, k as u64));
            let path = dir.join(format!("cover_{k:04}.pgm"));
            write_file(&path, &encode_pgm(&img))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imagedata::{load_pgm, write_ppm};

    #[test]
    fn row_accounting_and_determinism() {
        let covers = tempfile::tempdir().unwrap();
        write_synthetic_covers(covers.path(), 10, 32, 32, 1).unwrap();
        let spec = EmbedSpec { method: EmbedMethod::Lsbm, rate: 0.5, seed: 9 };
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let m = cmd_gen(covers.path(), &spec, &QTable::default(), a.path()).unwrap();
        cmd_gen(covers.path(), &spec, &QTable::default(), b.path()).unwrap();
        assert_eq!(m.entries.len(), 20);
        assert_eq!(m.entries.iter().filter(|e| e.label == 1).count(), 10);
        assert!(m.entries.iter().filter(|e| e.label == 1).all(|e| e.rate == 0.5));
        for e in &m.entries {
            assert_eq!(
                std::fs::read(a.path().join(&e.path)).unwrap(),
                std::fs::read(b.path().join(&e.path)).unwrap()
            );
        }
        let text = std::fs::read_to_string(a.path().join("manifest.csv")).unwrap();
        assert!(text.starts_with("path,label,method,rate\ncover_0000.clean.pgm,0,clean,0.0\ncover_0000.lsbm.pgm,1,lsbm,0.5\n"));
    }

    #[test]
    fn jsteg_and_color_covers() {
        let covers = tempfile::tempdir().unwrap();
        write_synthetic_covers(covers.path(), 2, 32, 32, 2).unwrap();
        let rgb = RgbImage::from_fn(24, 24, |x, y| [(x * 9) as u8, (y * 7) as u8, 100]);
        write_ppm(&rgb, covers.path().join("z.ppm")).unwrap();
        let out = tempfile::tempdir().unwrap();
        let spec = EmbedSpec { method: EmbedMethod::Lsbr, rate: 1.0, seed: 3 };
        let m = cmd_gen(covers.path(), &spec, &QTable::default(), out.path()).unwrap();
        assert_eq!(m.entries.len(), 6);
        assert_eq!(m.entries[5].path, PathBuf::from("z.lsbr.ppm"));

        let out = tempfile::tempdir().unwrap();
        let spec = EmbedSpec { method: EmbedMethod::Jsteg, rate: 1.0, seed: 3 };
        let m = cmd_gen(covers.path(), &spec, &QTable::default(), out.path()).unwrap();
        let clean = load_pgm(out.path().join(&m.entries[0].path)).unwrap();
        let stego = load_pgm(out.path().join(&m.entries[1].path)).unwrap();
        assert_ne!(clean, stego);
        assert_eq!(m.entries[5].path, PathBuf::from("z.jsteg.pgm"));
    }

    #[test]
    fn too_few_covers() {
        let covers = tempfile::tempdir().unwrap();
        write_synthetic_covers(covers.path(), 1, 32, 32, 2).unwrap();
        let out = tempfile::tempdir().unwrap();
        assert!(cmd_gen(covers.path(), &EmbedSpec::default(), &QTable::default(), out.path()).is_err());
        assert!(matches!(
            cmd_gen(out.path().join("missing"), &EmbedSpec::default(), &QTable::default(), out.path()),
            Err(Error::NotFound(_))
        ));
    }
}
