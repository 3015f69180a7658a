//! Where derived files live, relative to the manifest directory.

use std::path::Path;

use mattekit_core::exec::with_workers;
use mattekit_core::Execution;

use crate::error::{PipelineError, Result};

pub const RGB_DIR: &str = "rgb";
pub const ALPHA_DIR: &str = "alpha";
pub const INVERSE_DIR: &str = "inverse";
pub const REFINED_DIR: &str = "refined";
pub const TRIMAP_DIR: &str = "trimap";
pub const COMPOSITE_DIR: &str = "composites";
pub const CHROMA_DIR: &str = "chroma";
pub const LABEL_DIR: &str = "labels";

pub fn sample_file(dir: &str, id: &str) -> String {
    format!("{dir}/{id}.png")
}

pub fn composite_file(id: &str, k: usize) -> String {
    format!("{COMPOSITE_DIR}/{id}_{k}.png")
}

pub fn chroma_files(id: &str) -> (String, String) {
    (format!("{CHROMA_DIR}/{id}_alpha.png"), format!("{CHROMA_DIR}/{id}_fg.png"))
}

/// Background, kept semi-transparent and foreground label maps.
pub fn label_map_files(id: &str) -> [String; 3] {
    ["background", "semi", "foreground"].map(|kind| format!("{LABEL_DIR}/{id}_{kind}.png"))
}

/// Sample ids become file names, so they are limited to a portable set.
pub fn valid_id(id: &str) -> bool {
    !id.is_empty()
        && !id.starts_with('.')
        && id.chars().all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

pub fn ensure_dir(root: &Path, dir: &str) -> Result<()> {
    let path = root.join(dir);
    std::fs::create_dir_all(&path).map_err(|e| PipelineError::io(path, e))
}

/// Maps `f` over `items` on a pool of `workers` threads (0 = all cores),
/// returning results in input order.
pub fn fan_out<T, R, F>(workers: usize, items: &[T], f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    let exec = if workers == 1 {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    with_workers(workers, || exec.map(items, f))
}

/// `*.png` files directly inside `dir`, sorted by file name.
pub fn png_files(dir: &Path) -> Result<Vec<std::path::PathBuf>> {
    let entries = std::fs::read_dir(dir).map_err(|e| PipelineError::io(dir, e))?;
    let mut files = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| PipelineError::io(dir, e))?.path();
        let is_png = path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"));
        if is_png && path.is_file() {
            files.push(path);
        }
    }
    files.sort();
    Ok(files)
}
