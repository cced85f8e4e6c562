//! Seeded Monte-Carlo sweep over configurations of an open chain.
//!
//! Sample `i` draws its angles from a ChaCha8 stream selected by `i`, so the
//! output does not depend on how samples are split across threads.

use std::f64::consts::PI;
use std::io::Write;

use hingekit_core::analysis::{endpoint_singularity, frame_singularity};
use hingekit_core::chain::{Chain, Configuration};
use hingekit_core::Error;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub sample_index: u64,
    pub theta: Vec<f64>,
    pub rank: usize,
    pub sigma_min: f64,
    pub singular: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub samples: u64,
    pub seed: u64,
    pub full_rank: usize,
    pub singular_count: u64,
    pub sigma_min_min: f64,
    pub sigma_min_mean: f64,
    pub rows: Vec<SweepRow>,
}

#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub samples: u64,
    pub seed: u64,
    pub tol: f64,
    /// Worker threads; `None` uses the global pool.
    pub threads: Option<usize>,
}

/// The angles of sample `index`, uniform on `[-π, π)^(n-1)`.
pub fn sample_angles(seed: u64, index: u64, joints: usize) -> Configuration {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    Configuration::new((0..joints).map(|_| rng.random_range(-PI..PI)).collect())
}

fn one(c: &Chain, seed: u64, index: u64, tol: f64) -> Result<(SweepRow, usize), Error> {
    let theta = sample_angles(seed, index, c.joints());
    let v =
        if c.end_frame().k() == 0 { endpoint_singularity(c, &theta, tol)? } else { frame_singularity(c, &theta, tol)? };
    let row = SweepRow {
        sample_index: index,
        theta: theta.angles().to_vec(),
        rank: v.rank,
        sigma_min: v.certificate.sigma_min(),
        singular: v.singular,
    };
    Ok((row, v.full_rank))
}

pub fn sweep(c: &Chain, opts: &SweepOptions) -> Result<SweepReport, Error> {
    let run =
        || (0..opts.samples).into_par_iter().map(|i| one(c, opts.seed, i, opts.tol)).collect::<Result<Vec<_>, _>>();
    let results = match opts.threads {
        Some(t) => rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build()
            .map_err(|e| Error::InternalConsistency(format!("thread pool: {e}")))?
            .install(run)?,
        None => run()?,
    };
    let full_rank = results.first().map(|r| r.1).unwrap_or(0);
    let rows: Vec<SweepRow> = results.into_iter().map(|r| r.0).collect();
    let singular_count = rows.iter().filter(|r| r.singular).count() as u64;
    let sigma_min_min = rows.iter().map(|r| r.sigma_min).fold(f64::INFINITY, f64::min);
    let sigma_min_mean =
        if rows.is_empty() { f64::NAN } else { rows.iter().map(|r| r.sigma_min).sum::<f64>() / rows.len() as f64 };
    Ok(SweepReport {
        samples: opts.samples,
        seed: opts.seed,
        full_rank,
        singular_count,
        sigma_min_min,
        sigma_min_mean,
        rows,
    })
}

/// Writes the per-sample table as CSV.
pub fn write_csv<W: Write>(report: &SweepReport, joints: usize, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["sample_index".to_string()];
    header.extend((1..=joints).map(|j| format!("theta_{j}")));
    header.extend(["rank", "sigma_min", "singular"].map(String::from));
    w.write_record(&header)?;
    for r in &report.rows {
        let mut rec = vec![r.sample_index.to_string()];
        rec.extend(r.theta.iter().map(|t| t.to_string()));
        rec.push(r.rank.to_string());
        rec.push(format!("{:e}", r.sigma_min));
        rec.push(r.singular.to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
