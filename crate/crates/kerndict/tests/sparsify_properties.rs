//! Property tests for the streaming admission criteria: stream
//! partitioning, prefix guarantees, threshold monotonicity, and trace
//! determinism.

mod common;

use proptest::prelude::*;

use common::bandwidths;
use kerndict::{
    admit, run_stream, Criterion, CriterionKind, Dictionary, KernelSpec,
};

fn streams() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1usize..=3).prop_flat_map(|dim| {
        proptest::collection::vec(proptest::collection::vec(-3.0..3.0f64, dim), 1..=25)
    })
}

fn criteria() -> impl Strategy<Value = Criterion> {
    prop_oneof![
        (0.05..1.5f64).prop_map(|t| Criterion::new(CriterionKind::NoveltyDistance, t).unwrap()),
        (0.05..1.5f64).prop_map(|t| Criterion::new(CriterionKind::ApproximationAld, t).unwrap()),
        (0.0..0.99f64).prop_map(|t| Criterion::new(CriterionKind::Coherence, t).unwrap()),
        (0.0..3.0f64).prop_map(|t| Criterion::new(CriterionKind::Babel, t).unwrap()),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn admitted_and_rejected_partition_every_stream(
        stream in streams(),
        criterion in criteria(),
        sigma in bandwidths(),
    ) {
        let spec = KernelSpec::gaussian(sigma).unwrap();
        let trace = run_stream(&criterion, &stream, &spec, 0.0).unwrap();
        let mut indices: Vec<usize> = trace
            .admitted
            .iter()
            .copied()
            .chain(trace.rejected.iter().map(|r| r.index))
            .collect();
        indices.sort_unstable();
        prop_assert_eq!(indices, (0..stream.len()).collect::<Vec<_>>());
        prop_assert_eq!(trace.per_step_scores.len(), stream.len());
        prop_assert_eq!(trace.admitted.first().copied(), Some(0));
    }

    #[test]
    fn every_admitted_atom_replays_as_admitted_against_its_prefix(
        stream in streams(),
        criterion in criteria(),
        sigma in bandwidths(),
    ) {
        let spec = KernelSpec::gaussian(sigma).unwrap();
        let trace = run_stream(&criterion, &stream, &spec, 0.0).unwrap();
        for (pos, &index) in trace.admitted.iter().enumerate().skip(1) {
            let prefix: Vec<Vec<f64>> =
                trace.admitted[..pos].iter().map(|&i| stream[i].clone()).collect();
            let prefix_dict = Dictionary::new(prefix, spec.clone()).unwrap();
            let replay = admit(&criterion, Some(&prefix_dict), &stream[index], 0.0).unwrap();
            prop_assert!(
                replay.admitted,
                "{} admitted stream point {index} but the prefix replay rejects it \
                 with score {}",
                criterion.kind().name(),
                replay.score
            );
        }
    }

    #[test]
    fn final_coherence_respects_the_threshold(
        stream in streams(),
        threshold in 0.1..0.95f64,
        sigma in bandwidths(),
    ) {
        let criterion = Criterion::new(CriterionKind::Coherence, threshold).unwrap();
        let spec = KernelSpec::gaussian(sigma).unwrap();
        let trace = run_stream(&criterion, &stream, &spec, 0.0).unwrap();
        if let Some(report) = trace.final_report {
            prop_assert!(
                report.coherence_gamma <= threshold + 1e-9,
                "final coherence {} breaches gamma_0 = {threshold}",
                report.coherence_gamma
            );
        }
    }

    #[test]
    fn stricter_thresholds_never_admit_more(
        stream in streams(),
        sigma in bandwidths(),
        base in 0.1..0.5f64,
        step in 0.05..0.4f64,
    ) {
        let spec = KernelSpec::gaussian(sigma).unwrap();
        let loose = Criterion::new(CriterionKind::NoveltyDistance, base).unwrap();
        let strict = Criterion::new(CriterionKind::NoveltyDistance, base + step).unwrap();
        let loose_count = run_stream(&loose, &stream, &spec, 0.0).unwrap().admitted.len();
        let strict_count = run_stream(&strict, &stream, &spec, 0.0).unwrap().admitted.len();
        prop_assert!(
            strict_count <= loose_count,
            "raising the distance bar from {base} admitted more atoms"
        );

        let loose = Criterion::new(CriterionKind::Coherence, (base + step).min(0.99)).unwrap();
        let strict = Criterion::new(CriterionKind::Coherence, base).unwrap();
        let loose_count = run_stream(&loose, &stream, &spec, 0.0).unwrap().admitted.len();
        let strict_count = run_stream(&strict, &stream, &spec, 0.0).unwrap().admitted.len();
        prop_assert!(
            strict_count <= loose_count,
            "lowering the coherence cap to {base} admitted more atoms"
        );
    }

    #[test]
    fn traces_are_deterministic(
        stream in streams(),
        criterion in criteria(),
        sigma in bandwidths(),
    ) {
        let spec = KernelSpec::gaussian(sigma).unwrap();
        let a = run_stream(&criterion, &stream, &spec, 0.0).unwrap();
        let b = run_stream(&criterion, &stream, &spec, 0.0).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&a).unwrap(),
            serde_json::to_string(&b).unwrap()
        );
    }
}
