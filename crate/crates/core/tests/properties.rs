//! Property-based invariants across the toolkit.

use std::collections::BTreeSet;
use std::f64::consts::PI;

use proptest::prelude::*;
use vqc::circuit::{AnsatzSpec, Circuit, FeatureMapSpec};
use vqc::eval::{confusion, metrics, report_table, ConfusionMatrix, ReportRow};
use vqc::harness::{parse_dataset, split_indices, Review, SplitSpec};
use vqc::model::VqcModel;
use vqc::optim::{cobyla_minimize, CobylaConfig};
use vqc::qsim::Parity;
use vqc::textfeat::{collapse_to_column, MinMaxScaler, TfIdfModel};

fn angles(n: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0 * PI..2.0 * PI, n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn model_state_is_normalized(n in 2usize..=4, reps in 0usize..=2, seed in any::<u64>()) {
        let mut m = VqcModel::from_specs(FeatureMapSpec::new(n), AnsatzSpec { reps, ..AnsatzSpec::new(n) });
        m.init_theta(seed);
        let x: Vec<f64> = (0..n).map(|i| (i as f64 + 1.0) * 0.37 % PI).collect();
        let c = m.feature_map.build().unwrap().compose(&m.ansatz.build().unwrap()).unwrap();
        let psi = c.bind(&x, &m.theta).unwrap().simulate().unwrap();
        prop_assert!((psi.norm_sqr() - 1.0).abs() <= 1e-12);
        let total = psi.parity_probability(Parity::Even) + psi.parity_probability(Parity::Odd);
        prop_assert!((total - 1.0).abs() <= 1e-12);
        let p = m.forward(&x).unwrap();
        prop_assert!((0.0..=1.0).contains(&p));
    }

    #[test]
    fn ansatz_inverse_round_trip(n in 1usize..=4, reps in 0usize..=3, theta in angles(40)) {
        let spec = AnsatzSpec { reps, ..AnsatzSpec::new(n) };
        let c = spec.build().unwrap().bind(&[], &theta[..spec.num_parameters()]).unwrap();
        let mut psi = c.simulate().unwrap();
        c.inverse().apply_to(&mut psi).unwrap();
        prop_assert!((psi.amplitudes()[0].re - 1.0).abs() <= 1e-10);
        prop_assert!(psi.amplitudes()[0].im.abs() <= 1e-10);
    }

    #[test]
    fn circuit_text_round_trip(n in 2usize..=4, reps in 1usize..=3) {
        let c = FeatureMapSpec { reps, ..FeatureMapSpec::new(n) }.build().unwrap()
            .compose(&AnsatzSpec::new(n).build().unwrap()).unwrap();
        let back = Circuit::from_text(&c.to_text()).unwrap();
        prop_assert_eq!(back.to_text(), c.to_text());
        prop_assert_eq!(back.ops(), c.ops());
    }

    #[test]
    fn model_json_is_bit_exact(n in 1usize..=5, theta in angles(48), bias in -0.4f64..0.4) {
        let mut m = VqcModel::new(n);
        m.theta = theta[..m.ansatz.num_parameters()].to_vec();
        m.bias = bias;
        let back = VqcModel::from_json(&m.to_json().unwrap()).unwrap();
        prop_assert!(back.theta.iter().zip(&m.theta).all(|(a, b)| a.to_bits() == b.to_bits()));
        prop_assert_eq!(back.bias.to_bits(), m.bias.to_bits());
        prop_assert_eq!(back, m);
    }

    #[test]
    fn confusion_tallies_and_is_order_free(
        pairs in prop::collection::vec((0u8..=1, 0u8..=1), 1..200),
        rot in any::<prop::sample::Index>(),
    ) {
        let (t, p): (Vec<u8>, Vec<u8>) = pairs.iter().copied().unzip();
        let cm = confusion(&t, &p).unwrap();
        prop_assert_eq!(cm.total() as usize, pairs.len());
        let brute = |a: u8, b: u8| pairs.iter().filter(|&&(x, y)| x == a && y == b).count() as u64;
        prop_assert_eq!(cm, ConfusionMatrix::new(brute(1, 1), brute(1, 0), brute(0, 1), brute(0, 0)));
        let mut shuffled = pairs.clone();
        shuffled.rotate_left(rot.index(pairs.len()));
        shuffled.reverse();
        let (t2, p2): (Vec<u8>, Vec<u8>) = shuffled.into_iter().unzip();
        prop_assert_eq!(metrics(&confusion(&t2, &p2).unwrap()).unwrap(), metrics(&cm).unwrap());
    }

    #[test]
    fn metric_identities(tp in 0u64..200, fn_ in 0u64..200, fp in 0u64..200, tn in 0u64..200) {
        let cm = ConfusionMatrix::new(tp, fn_, fp, tn);
        prop_assume!(cm.total() > 0);
        prop_assert_eq!(cm.positives() + cm.negatives(), cm.predicted_positives() + cm.predicted_negatives());
        let m = metrics(&cm).unwrap();
        for v in m.as_array() {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        if cm.predicted_negatives() > 0 {
            let npv = tn as f64 / cm.predicted_negatives() as f64;
            let rebuilt = (m.precision * cm.predicted_positives() as f64 + npv * cm.predicted_negatives() as f64)
                / cm.total() as f64;
            prop_assert!((rebuilt - m.accuracy).abs() <= 1e-12);
        }
        if m.precision > 0.0 && m.recall > 0.0 {
            prop_assert!(m.fscore <= m.precision.max(m.recall) + 1e-15);
            prop_assert!(m.fscore >= m.precision.min(m.recall) - 1e-15);
        }
        let table = report_table(&[ReportRow::new("m", m)]);
        prop_assert_eq!(table.csv.lines().count(), 2);
    }

    #[test]
    fn split_sizes_and_disjointness(
        n in 3usize..400, a in 0.0f64..0.6, b in 0.0f64..0.2, seed in any::<u64>(), strat in any::<bool>(),
    ) {
        let labels: Vec<u8> = (0..n).map(|i| u8::from(i % 3 == 0)).collect();
        let train = (a * n as f64) as usize;
        let val = (b * n as f64) as usize;
        let test = (n - train - val) / 2;
        let spec = SplitSpec { stratified: strat, ..SplitSpec::new(train, val, test, seed) };
        let s = split_indices(&labels, &spec).unwrap();
        prop_assert_eq!((s.train.len(), s.val.len(), s.test.len()), (train, val, test));
        let all: BTreeSet<usize> = s.train.iter().chain(&s.val).chain(&s.test).copied().collect();
        prop_assert_eq!(all.len(), train + val + test);
        prop_assert!(all.iter().all(|&i| i < n));
        prop_assert_eq!(split_indices(&labels, &spec).unwrap(), s);
    }

    #[test]
    fn scaler_stays_in_range(rows in prop::collection::vec(prop::collection::vec(-1e3f64..1e3, 3), 2..30),
                             probe in prop::collection::vec(-1e4f64..1e4, 3)) {
        let s = MinMaxScaler::fit(&rows).unwrap();
        for r in s.transform(&rows).unwrap().iter().chain(std::iter::once(&s.transform_row(&probe).unwrap())) {
            prop_assert!(r.iter().all(|v| (0.0..=PI).contains(v)));
        }
    }

    #[test]
    fn tfidf_collapse_is_row_sum(docs in prop::collection::vec(prop::collection::vec("[a-e]", 0..8), 1..12),
                                 ngram in 1usize..=3) {
        let model = TfIdfModel::fit(&docs, ngram).unwrap();
        let dense = model.transform(&docs);
        prop_assert_eq!(model.transform_collapsed(&docs), collapse_to_column(&dense));
        prop_assert!(dense.iter().flatten().all(|v| *v >= 0.0));
    }

    #[test]
    fn tsv_round_trip(rows in prop::collection::vec(("[a-zA-Z !,.:)(]{1,40}", 0u8..=1), 1..20)) {
        let reviews: Vec<Review> = rows.iter().map(|(t, l)| Review::new(t.clone(), *l)).collect();
        let mut src = String::from("text\tlabel\n");
        for r in &reviews {
            src.push_str(&format!("{}\t{}\n", r.text, r.label));
        }
        let parsed = parse_dataset(&src, "mem").unwrap();
        prop_assert_eq!(parsed, reviews);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cobyla_reports_its_best_point(c in prop::collection::vec(-3.0f64..3.0, 2..5), maxfun in 6usize..80) {
        let f = |x: &[f64]| x.iter().zip(&c).map(|(v, ci)| (v - ci).powi(2) + 0.1 * v.powi(4)).sum::<f64>();
        let cfg = CobylaConfig { maxfun, ..CobylaConfig::default() };
        let r = cobyla_minimize(&f, &vec![0.0; c.len()], &cfg, None).unwrap();
        prop_assert!(r.evals <= maxfun);
        prop_assert!((f(&r.best_theta) - r.best_value).abs() <= 1e-12);
        let min_seen = r.history.iter().map(|h| h.1).fold(f64::INFINITY, f64::min);
        prop_assert!(r.best_value <= min_seen);
    }
}
