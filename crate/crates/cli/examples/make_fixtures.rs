//! Writes the bundled synthetic fixtures and their ground-truth masks as PGM.
//!
//! cargo run -p psls-cli --example make_fixtures -- [OUT_DIR]

use std::path::PathBuf;

use psls::{fixtures, ScalarField};
use psls_cli::image_io::save_gray;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "fixtures".into()));
    std::fs::create_dir_all(&dir)?;
    for fx in fixtures::bundled() {
        save_gray(&fx.image, &dir.join(format!("{}.pgm", fx.name)))?;
        let truth = ScalarField::from_fn(fx.truth.width(), fx.truth.height(), |x, y| {
            if fx.truth.get(x, y) {
                255.0
            } else {
                0.0
            }
        });
        save_gray(&truth, &dir.join(format!("{}_truth.pgm", fx.name)))?;
    }
    println!("wrote fixtures to {}", dir.display());
    Ok(())
}
