// SPDX-License-Identifier: Apache-2.0

//! Writes the built-in Raman cross-section table as CSV.
//!
//! `cargo run -p qkdwa-core --example export_raman -- data/raman_synthetic.csv`

use qkdwa::raman::RamanCrossSectionTable;

fn main() -> std::io::Result<()> {
    let csv = RamanCrossSectionTable::synthetic_default().to_csv();
    match std::env::args().nth(1) {
        Some(path) => std::fs::write(path, csv),
        None => {
            print!("{csv}");
            Ok(())
        }
    }
}
