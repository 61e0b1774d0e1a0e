use es_lab::arith::{ExactRational, Natural};
use es_lab::egyptian::class_index_for;
use es_lab::harness::{
    verify_range, verify_range_with, FirstOccurrence, HarnessError, RangeJob, RunOptions, SieveSkip,
    VerificationReport,
};
use es_lab::identities::Catalog;
use es_lab::sieve::SievePlan;

fn primes_job(lo: u64, hi: u64, cap: u32) -> RangeJob {
    RangeJob::new(lo, hi, true, cap)
}

fn opts(threads: usize) -> RunOptions<'static> {
    RunOptions {
        threads,
        ..RunOptions::default()
    }
}

#[test]
fn small_prime_firsts() {
    let r = verify_range(&primes_job(2, 200, 8)).unwrap();
    assert_eq!(
        r.first_occurrences,
        vec![FirstOccurrence { class: 1, n: 2 }, FirstOccurrence { class: 2, n: 73 }]
    );
    assert!(r.exceptions.is_empty());
}

#[test]
fn every_n_to_1000_is_solved() {
    let r = verify_range(&RangeJob::new(2, 1001, false, 16)).unwrap();
    assert!(r.exceptions.is_empty());
    assert_eq!(r.examined, 999);
    assert_eq!(r.counts.iter().map(|c| c.count).sum::<u64>(), 999);
}

#[test]
fn rows_are_exact_and_consistent() {
    let r = verify_range(&RangeJob::new(2, 3000, false, 64).with_chunk_size(257)).unwrap();
    assert_eq!(r.rows.len(), 2998);
    for row in &r.rows {
        let d: Vec<Natural> = row.denominators.iter().map(|s| s.parse().unwrap()).collect();
        let n = Natural::from(row.n);
        let mut sum = ExactRational::zero();
        for x in &d {
            sum = &sum + &ExactRational::unit(x).unwrap();
        }
        assert_eq!(sum, ExactRational::from_naturals(&Natural::from(4u32), &n).unwrap());
        assert_eq!(i64::from(class_index_for(&n, &d[0]).0), row.min_class);
    }
}

#[test]
fn deterministic_across_threads() {
    let job = primes_job(2, 60_000, 64).with_chunk_size(1000);
    let one = verify_range_with(&job, &opts(1)).unwrap();
    let four = verify_range_with(&job, &opts(4)).unwrap();
    assert_eq!(one.canonical_json(), four.canonical_json());
    assert_eq!(one.to_csv(), four.to_csv());
}

#[test]
fn interrupted_run_resumes_identically() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    let job = primes_job(2, 60_000, 64).with_chunk_size(1000);
    let stop = RunOptions {
        threads: 2,
        checkpoint: Some(cp.clone()),
        stop_after_chunks: Some(17),
        progress: None,
    };
    match verify_range_with(&job, &stop) {
        Err(HarnessError::Interrupted { chunks_done }) => assert_eq!(chunks_done, 17),
        other => panic!("expected interruption, got {other:?}"),
    }
    let resume = RunOptions {
        threads: 3,
        checkpoint: Some(cp.clone()),
        ..RunOptions::default()
    };
    let resumed = verify_range_with(&job, &resume).unwrap();
    let straight = verify_range(&job).unwrap();
    assert_eq!(resumed.canonical_json(), straight.canonical_json());
    assert_eq!(resumed.to_csv(), straight.to_csv());

    // The finished checkpoint belongs to this job only.
    let other = primes_job(2, 50_000, 64).with_chunk_size(1000);
    let err = verify_range_with(&other, &resume).unwrap_err();
    assert!(matches!(err, HarnessError::FingerprintMismatch { .. }), "{err}");
}

#[test]
fn corrupt_checkpoint_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let cp = dir.path().join("cp.json");
    std::fs::write(&cp, "{ not json").unwrap();
    let o = RunOptions {
        checkpoint: Some(cp),
        ..RunOptions::default()
    };
    assert!(matches!(verify_range_with(&primes_job(2, 100, 8), &o), Err(HarnessError::Checkpoint(_))));
}

#[test]
fn csv_and_json_outputs() {
    let r = verify_range(&primes_job(2, 100, 8)).unwrap();
    let csv = r.to_csv();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,is_prime,min_class,a,b,c"));
    assert_eq!(lines.count(), 25);
    assert!(csv.contains("\n73,true,2,20,292,730\n"));

    let back = VerificationReport::from_json(&r.to_json()).unwrap();
    assert_eq!(back.counts, r.counts);
    assert_eq!(back.first_occurrences, r.first_occurrences);
    assert_eq!(back.exceptions, r.exceptions);
    assert_eq!(back.job, r.job);

    let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    for key in ["job", "counts", "first_occurrences", "exceptions", "elapsed_ms", "chunks_done"] {
        assert!(v.get(key).is_some(), "{key}");
    }
    for key in ["lo", "hi", "primes_only", "cap", "plan"] {
        assert!(v["job"].get(key).is_some(), "job.{key}");
    }

    let dir = tempfile::tempdir().unwrap();
    r.write_csv(&dir.path().join("r.csv")).unwrap();
    r.write_json(&dir.path().join("r.json")).unwrap();
    assert!(r.write_json(&dir.path().join("missing/r.json")).is_err());
}

#[test]
fn exceptions_are_listed() {
    let r = verify_range(&primes_job(2, 3000, 2)).unwrap();
    assert!(r.exceptions.contains(&1129) && r.exceptions.contains(&2521));
    assert!(r.rows.iter().any(|row| row.n == 2521 && row.min_class == -1 && row.denominators.is_empty()));
    assert!(r.to_csv().contains("\n2521,true,-1,,,\n"));
}

#[test]
fn empty_range() {
    let r = verify_range(&RangeJob::new(5, 5, false, 8)).unwrap();
    assert_eq!((r.examined, r.counts.len(), r.exceptions.len()), (0, 0, 0));
    assert_eq!(r.to_csv(), "n,is_prime,min_class,a,b,c\n");
}

#[test]
fn sieve_skip_keeps_exceptions() {
    let skip = SieveSkip::from_plan(&SievePlan::builtin("mordell-840").unwrap(), &Catalog::builtin()).unwrap();
    for cap in [2, 64] {
        let plain = verify_range(&primes_job(2, 100_000, cap)).unwrap();
        let fast = verify_range(&primes_job(2, 100_000, cap).with_skip(skip.clone())).unwrap();
        assert_eq!(plain.exceptions, fast.exceptions, "cap {cap}");
        assert_eq!(plain.examined, fast.examined);
        let fp = fast.fast_path.as_ref().unwrap();
        assert_eq!(fp.class_bound, 2);
        let solved: u64 = fast.counts.iter().map(|c| c.count).sum();
        assert_eq!(solved + fp.count + fast.exceptions.len() as u64, fast.examined);
        // Every fast-pathed prime really is in C_2 or below.
        let low: u64 = plain.counts.iter().filter(|c| c.class <= 2).map(|c| c.count).sum();
        let low_fast: u64 = fast.counts.iter().filter(|c| c.class <= 2).map(|c| c.count).sum();
        assert_eq!(low, low_fast + fp.count);
    }
}
