//! Effective rank of feature matrices with controlled spectra.
//!
//! ```text
//! cargo run --release --example effective_rank
//! ```

use hr_lab::diagnostics::{effective_rank, DEFAULT_RANK_DELTA};
use hr_lab::numerics::{singular_values, Matrix, Rng};

fn gaussian(rows: usize, cols: usize, rng: &mut Rng) -> Matrix {
    Matrix::from_fn(rows, cols, |_, _| rng.standard_normal())
}

fn main() -> hr_lab::Result<()> {
    let mut rng = Rng::new(3);
    println!("identity 100x100: {}", effective_rank(&Matrix::identity(100), DEFAULT_RANK_DELTA)?);
    println!("all-ones 8x8:     {}", effective_rank(&Matrix::filled(8, 8, 1.0), DEFAULT_RANK_DELTA)?);

    for k in [1, 4, 16, 64] {
        let phi = gaussian(512, k, &mut rng).matmul(&gaussian(k, 128, &mut rng))?;
        let sv = singular_values(&phi)?;
        println!(
            "rank-{k:<3} 512x128: srank = {:>3}, sigma_1 = {:.1}, sigma_{k} = {:.1}",
            effective_rank(&phi, DEFAULT_RANK_DELTA)?,
            sv[0],
            sv[k - 1]
        );
    }
    let full = gaussian(512, 128, &mut rng);
    println!("full 512x128:     {}", effective_rank(&full, DEFAULT_RANK_DELTA)?);
    Ok(())
}
