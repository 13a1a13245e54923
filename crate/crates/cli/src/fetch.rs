//! Optional dataset download with checksum pinning.
//!
//! Archives land in a local cache keyed by file name; their SHA-256 is
//! either checked against `--sha256` or pinned on first use in
//! `<cache>/pins.json` and verified on every later fetch.

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};

use sha2::{Digest, Sha256};

use crate::failure::Failure;
use crate::main_args::FetchArgs;

pub struct Preset {
    pub name: &'static str,
    pub url: &'static str,
    /// CSV member inside the downloaded zip.
    pub member: &'static str,
    /// Header line to prepend when the member ships without one.
    pub header: Option<fn() -> String>,
}

fn msd_header() -> String {
    let mut cols: Vec<String> = vec!["year".to_owned()];
    cols.extend((1..=90).map(|i| format!("t{i:02}")));
    cols.join(",")
}

pub const PRESETS: &[Preset] = &[
    Preset {
        name: "superconductivity",
        url: "https://archive.ics.uci.edu/static/public/464/superconductivty+data.zip",
        member: "train.csv",
        header: None,
    },
    Preset {
        name: "yearpredictionmsd",
        url: "https://archive.ics.uci.edu/static/public/203/yearpredictionmsd.zip",
        member: "YearPredictionMSD.txt",
        header: Some(msd_header),
    },
];

fn pins_path(cache_dir: &Path) -> PathBuf {
    cache_dir.join("pins.json")
}

fn load_pins(cache_dir: &Path) -> BTreeMap<String, String> {
    std::fs::read_to_string(pins_path(cache_dir))
        .ok()
        .and_then(|text| serde_json::from_str(&text).ok())
        .unwrap_or_default()
}

fn save_pins(cache_dir: &Path, pins: &BTreeMap<String, String>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(pins)?;
    std::fs::write(pins_path(cache_dir), text + "\n")
        .map_err(|e| Failure::input(format!("writing pin file: {e}")))?;
    Ok(())
}

fn download(url: &str) -> Result<Vec<u8>, Failure> {
    let response = ureq::get(url)
        .call()
        .map_err(|e| Failure::input(format!("download failed for {url}: {e}")))?;
    let mut bytes = Vec::new();
    response
        .into_reader()
        .read_to_end(&mut bytes)
        .map_err(|e| Failure::input(format!("download failed for {url}: {e}")))?;
    Ok(bytes)
}

fn sha256_hex(bytes: &[u8]) -> String {
    let mut hasher = Sha256::new();
    hasher.update(bytes);
    format!("{:x}", hasher.finalize())
}

fn cached_name(url: &str) -> String {
    url.rsplit('/').next().unwrap_or("download").replace(['+', '%'], "_")
}

/// Fetches `url` through the cache, verifying or pinning its SHA-256.
/// Returns the archive bytes.
fn fetch_verified(
    url: &str,
    expected_sha: Option<&str>,
    cache_dir: &Path,
) -> Result<Vec<u8>, Failure> {
    std::fs::create_dir_all(cache_dir)
        .map_err(|e| Failure::input(format!("cache dir {}: {e}", cache_dir.display())))?;
    let cache_file = cache_dir.join(cached_name(url));

    let bytes = if cache_file.exists() {
        std::fs::read(&cache_file)
            .map_err(|e| Failure::input(format!("{}: {e}", cache_file.display())))?
    } else {
        let bytes = download(url)?;
        std::fs::write(&cache_file, &bytes)
            .map_err(|e| Failure::input(format!("{}: {e}", cache_file.display())))?;
        bytes
    };

    let actual = sha256_hex(&bytes);
    if let Some(expected) = expected_sha {
        if !expected.eq_ignore_ascii_case(&actual) {
            return Err(Failure::input(format!(
                "checksum mismatch for {url}: expected {expected}, got {actual}"
            )));
        }
    }
    let mut pins = load_pins(cache_dir);
    match pins.get(url) {
        Some(pinned) if !pinned.eq_ignore_ascii_case(&actual) => {
            return Err(Failure::input(format!(
                "checksum mismatch for {url}: pinned {pinned}, got {actual}"
            )));
        }
        Some(_) => {}
        None => {
            pins.insert(url.to_owned(), actual.clone());
            save_pins(cache_dir, &pins)?;
            eprintln!("pinned {url} at sha256 {actual}");
        }
    }
    Ok(bytes)
}

fn extract_member(bytes: &[u8], member: &str) -> Result<Vec<u8>, Failure> {
    let reader = std::io::Cursor::new(bytes);
    let mut archive = zip::ZipArchive::new(reader)
        .map_err(|e| Failure::input(format!("reading archive: {e}")))?;
    let mut file = archive
        .by_name(member)
        .map_err(|e| Failure::input(format!("archive member '{member}': {e}")))?;
    let mut out = Vec::new();
    file.read_to_end(&mut out)
        .map_err(|e| Failure::input(format!("archive member '{member}': {e}")))?;
    Ok(out)
}

pub fn run_fetch(args: &FetchArgs) -> Result<(), Failure> {
    match (&args.name, &args.url) {
        (Some(name), None) => {
            let preset = PRESETS
                .iter()
                .find(|p| p.name == name.as_str())
                .ok_or_else(|| {
                    let known: Vec<&str> = PRESETS.iter().map(|p| p.name).collect();
                    Failure::input(format!(
                        "unknown dataset '{name}'; known datasets: {}",
                        known.join(", ")
                    ))
                })?;
            let bytes = fetch_verified(preset.url, args.sha256.as_deref(), &args.cache_dir)?;
            let mut csv = extract_member(&bytes, preset.member)?;
            if let Some(header) = preset.header {
                let mut with_header = header().into_bytes();
                with_header.push(b'\n');
                with_header.extend_from_slice(&csv);
                csv = with_header;
            }
            std::fs::write(&args.out, csv)
                .map_err(|e| Failure::input(format!("{}: {e}", args.out.display())))?;
            eprintln!("wrote {}", args.out.display());
        }
        (None, Some(url)) => {
            let bytes = fetch_verified(url, args.sha256.as_deref(), &args.cache_dir)?;
            std::fs::write(&args.out, bytes)
                .map_err(|e| Failure::input(format!("{}: {e}", args.out.display())))?;
            eprintln!("wrote {}", args.out.display());
        }
        _ => {
            return Err(Failure::input("pass exactly one of --name or --url"));
        }
    }
    Ok(())
}
