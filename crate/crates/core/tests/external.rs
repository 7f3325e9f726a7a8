//! External models driven through a shell/awk script speaking the
//! JSON-lines protocol.

use std::time::Duration;

use corrgsa::dist::{CorrelationMatrix, JointGaussian, Marginal};
use corrgsa::models::{external_eval, linear_model, ExternalModel, Model, ModelSpec};
use corrgsa::sampling::{normal_matrix, SampleMatrix, SampleSpace};
use corrgsa::sensitivity::{correlated_sweep, IndexKind, PceConfig, Provenance};
use corrgsa::Error;

/// Sums every number in the params object and replicates it `n` times.
fn sum_script(n: usize) -> Vec<String> {
    let awk = format!(
        r#"{{ line = $0; sub(/.*\{{/, "", line); sub(/\}}.*/, "", line); k = split(line, parts, ","); s = 0;
          for (i = 1; i <= k; i++) {{ split(parts[i], kv, ":"); s += kv[2] + 0 }}
          printf "{{\"outputs\": ["; for (j = 1; j <= {n}; j++) {{ printf "%s%.17g", (j > 1 ? ", " : ""), s }} print "]}}" }}"#
    );
    vec!["awk".into(), awk]
}

fn model(outputs: usize) -> ExternalModel {
    ExternalModel::new(
        sum_script(outputs),
        vec!["a".into(), "b".into()],
        (0..outputs).map(|k| k as f64).collect(),
        Duration::from_secs(20),
        4,
    )
}

#[test]
fn sum_model_matches_linear_model() {
    let m = model(3);
    let q = normal_matrix(10, 2, 5);
    let q = SampleMatrix::new(q.values().map(|v| 10.0 * v), SampleSpace::Physical);
    let y = external_eval(&m, &q).unwrap();
    for i in 0..10 {
        let expected = linear_model(&[1.0, 1.0], &q.row(i));
        for t in 0..3 {
            assert!((y[(i, t)] - expected).abs() < 1e-12 * expected.abs().max(1.0));
        }
    }
}

#[test]
fn batches_keep_sample_order() {
    let m = model(1);
    let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64, 0.5]).collect();
    let q = SampleMatrix::from_rows(&rows, SampleSpace::Physical).unwrap();
    let a = m.evaluate_batch(&q).unwrap();
    let b = m.evaluate_batch(&q).unwrap();
    assert_eq!(a, b);
    for i in 0..40 {
        assert_eq!(a[(i, 0)], i as f64 + 0.5);
    }
}

#[test]
fn failures_are_reported() {
    let failing = ExternalModel::new(
        vec![
            "sh".into(),
            "-c".into(),
            "cat > /dev/null; echo 'model blew up' >&2; exit 1".into(),
        ],
        vec!["a".into()],
        vec![0.0],
        Duration::from_secs(5),
        1,
    );
    match failing.evaluate(&[1.0]) {
        Err(Error::ProcessFailed { stderr, .. }) => assert!(stderr.contains("model blew up")),
        other => panic!("{other:?}"),
    }
    let short = ExternalModel::new(
        vec![
            "sh".into(),
            "-c".into(),
            r#"cat > /dev/null; echo '{"outputs": [1]}'"#.into(),
        ],
        vec!["a".into()],
        vec![0.0, 1.0],
        Duration::from_secs(5),
        1,
    );
    assert!(matches!(
        short.evaluate(&[1.0]),
        Err(Error::MalformedOutput(_))
    ));
}

#[test]
fn sensitivity_through_external_process() {
    let spec: ModelSpec = serde_json::from_value(serde_json::json!({
        "kind": "external",
        "command": sum_script(1),
        "outputs": 1,
        "timeout_s": 20,
        "workers": 2
    }))
    .unwrap();
    let names = vec!["a".to_string(), "b".to_string()];
    let m = spec.build(&names).unwrap();
    let joint = JointGaussian::new(
        vec![Marginal::standard(); 2],
        CorrelationMatrix::bivariate(0.4).unwrap(),
    )
    .unwrap();
    let r = correlated_sweep(m.as_ref(), &joint, 2, &PceConfig::default(), &names).unwrap();
    let full = r
        .value(0, 0, IndexKind::SobolFirst, Provenance::Full)
        .unwrap();
    assert!((full - 0.7).abs() < 1e-8);
}
