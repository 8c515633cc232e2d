use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use tempfile::NamedTempFile;

/// Writes `name` inside `dir` through a temporary file that is renamed into
/// place only once `body` succeeds.
pub fn write_atomic<T>(
    dir: &Path,
    name: &str,
    body: impl FnOnce(&mut BufWriter<&mut NamedTempFile>) -> Result<T, crate::Failure>,
) -> Result<T, crate::Failure> {
    fs::create_dir_all(dir)?;
    let mut tmp = NamedTempFile::new_in(dir)?;
    let v = {
        let mut w = BufWriter::new(&mut tmp);
        let v = body(&mut w)?;
        w.flush()?;
        v
    };
    tmp.as_file().sync_all()?;
    tmp.persist(dir.join(name)).map_err(|e| e.error)?;
    Ok(v)
}

pub fn csv_line(w: &mut impl Write, cells: &[String]) -> io::Result<()> {
    writeln!(w, "{}", cells.join(","))
}
