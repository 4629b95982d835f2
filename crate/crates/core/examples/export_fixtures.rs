//! Writes the fixture files: `cargo run -p blocklat --example export_fixtures [DIR]`.

use std::path::PathBuf;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let root = std::env::args_os()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures"));
    let written = blocklat::fixtures::export(&root)?;
    println!("wrote {} files under {}", written.len(), root.display());
    Ok(())
}
