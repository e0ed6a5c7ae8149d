//! Learning several conclusions on worker threads.

use std::time::{Duration, Instant};

use pld_core::learner::{assemble, learn_target};
use pld_core::{Dataset, Hyperparameters, LearnError, LevelReport, Model, PredicateId};

#[derive(Clone, Debug)]
pub struct TimedLevel {
    pub report: LevelReport,
    pub elapsed: Duration,
}

/// Per-conclusion level reports, in target order.
#[derive(Clone, Debug)]
pub struct LearnLog {
    pub targets: Vec<(PredicateId, Vec<TimedLevel>)>,
}

fn run_one(
    ds: &Dataset,
    target: PredicateId,
    hp: &Hyperparameters,
) -> (Result<pld_core::TargetOutcome, LearnError>, Vec<TimedLevel>) {
    let mut timed = Vec::new();
    let mut last = Instant::now();
    let outcome = learn_target(ds, target, hp, &mut |r| {
        let now = Instant::now();
        timed.push(TimedLevel {
            report: *r,
            elapsed: now - last,
        });
        last = now;
    });
    (outcome, timed)
}

/// Learns every target, spreading conclusions over up to `threads` workers.
/// The resulting model does not depend on the thread count.
pub fn learn_parallel(
    ds: &Dataset,
    targets: &[PredicateId],
    hp: &Hyperparameters,
    threads: usize,
) -> (Result<Model, LearnError>, LearnLog) {
    if targets.is_empty() {
        return (
            Err(LearnError::NoTargets),
            LearnLog {
                targets: Vec::new(),
            },
        );
    }
    let threads = threads.clamp(1, targets.len());
    let chunk = targets.len().div_ceil(threads);
    let results: Vec<_> = std::thread::scope(|s| {
        let handles: Vec<_> = targets
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || part.iter().map(|&t| run_one(ds, t, hp)).collect::<Vec<_>>())
            })
            .collect();
        handles
            .into_iter()
            .flat_map(|h| h.join().expect("learner thread panicked"))
            .collect()
    });

    let mut outcomes = Vec::with_capacity(results.len());
    let mut log = LearnLog {
        targets: Vec::new(),
    };
    let mut first_error = None;
    for (&t, (outcome, timed)) in targets.iter().zip(results) {
        log.targets.push((t, timed));
        match outcome {
            Ok(o) => outcomes.push(o),
            Err(e) => {
                first_error.get_or_insert(e);
            }
        }
    }
    let result = match first_error {
        Some(e) => Err(e),
        None => assemble(ds, hp, outcomes),
    };
    (result, log)
}

pub fn default_threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thread_count_does_not_change_model() {
        let rows: Vec<Vec<bool>> = (0u32..40)
            .map(|i| (0..5).map(|b| (i * 7 + b * 3) % (b + 2) == 0).collect())
            .collect();
        let ds = Dataset::from_rows(&["a", "b", "c", "d", "e"], &rows).unwrap();
        let targets: Vec<PredicateId> = (0..5).map(PredicateId).collect();
        let hp = Hyperparameters::default();
        let serial = pld_core::learn(&ds, &targets, &hp).unwrap();
        for threads in [1, 2, 3, 8] {
            let (m, log) = learn_parallel(&ds, &targets, &hp, threads);
            assert_eq!(m.unwrap(), serial);
            assert_eq!(log.targets.len(), 5);
        }
    }

    #[test]
    fn no_targets_is_an_error() {
        let ds = Dataset::from_rows(&["a"], &[vec![true]]).unwrap();
        let (m, _) = learn_parallel(&ds, &[], &Hyperparameters::default(), 4);
        assert!(matches!(m, Err(LearnError::NoTargets)));
    }
}
