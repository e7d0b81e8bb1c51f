use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use crate::error::{CliError, Result};

/// Environment variable that redirects every output file into one directory.
pub const OUT_DIR_ENV: &str = "OPTWIN_OUT_DIR";

/// Final location of an output file, honouring [`OUT_DIR_ENV`].
pub fn resolve(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let name = path.file_name().map(PathBuf::from).unwrap_or_else(|| path.to_path_buf());
            PathBuf::from(dir).join(name)
        }
        _ => path.to_path_buf(),
    }
}

/// Write through a temporary file in the target directory and rename it into
/// place, so a failure never leaves a partial file behind.
pub fn write_atomic<F>(path: &Path, body: F) -> Result<()>
where
    F: FnOnce(&mut dyn Write) -> Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        body(&mut w)?;
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}
