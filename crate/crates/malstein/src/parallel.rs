//! Multi-threaded sampling on top of the chunked streams in
//! `malstein_core::montecarlo`. Chunks are dealt round-robin to workers and
//! reassembled in chunk order, so the summary equals the serial one.

use std::num::NonZeroUsize;
use std::thread;

use malstein_core::montecarlo::{chunk_count, sample_chunk, Sampler};
use malstein_core::SampleSummary;

pub fn default_workers() -> usize {
    thread::available_parallelism().map(NonZeroUsize::get).unwrap_or(1)
}

pub fn sample_parallel<S: Sampler + Sync + ?Sized>(
    sampler: &S,
    n_samples: usize,
    seed: u64,
    workers: usize,
) -> SampleSummary {
    let chunks = chunk_count(n_samples);
    let workers = workers.clamp(1, chunks.max(1));
    let mut by_chunk: Vec<Vec<f64>> = vec![Vec::new(); chunks];
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..chunks)
                        .step_by(workers)
                        .map(|j| (j, sample_chunk(sampler, seed, j, n_samples)))
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (j, values) in h.join().expect("sampling worker panicked") {
                by_chunk[j] = values;
            }
        }
    });
    SampleSummary::from_values(by_chunk.concat(), seed)
}
