mod common;

use avfusion::data::Matrix;
use avfusion::features::NormalizationModel;
use avfusion::fusion::bn::fit_accuracy_cpt;
use avfusion::fusion::{
    bn_fusion_predict, bn_infer, build_joint_vector, fit_measurement_cpt, BnFusionModel, CptKind, FeatureFusionModel,
    JointVectorLayout, MeasurementModel, Prior,
};
use avfusion::learn::{svm_predict, svm_train, SvmOptions};
use avfusion::{Channel, EmotionLabel, Error, NUM_CLASSES};
use rand::seq::SliceRandom;
use rand::Rng;

fn l(i: usize) -> EmotionLabel {
    EmotionLabel::new(i).unwrap()
}

fn random_model(rng: &mut rand_chacha::ChaCha8Rng) -> BnFusionModel {
    let prior: [f64; NUM_CLASSES] = {
        let p: [f64; NUM_CLASSES] = std::array::from_fn(|_| rng.random_range(0.05..1.0));
        let s: f64 = p.iter().sum();
        p.map(|v| v / s)
    };
    let ms = Channel::MODALITIES
        .iter()
        .map(|c| MeasurementModel::new(*c, common::random_cpt(rng)).unwrap())
        .collect();
    BnFusionModel::new(prior, ms).unwrap()
}

#[test]
fn posterior_matches_joint_table_everywhere() {
    let mut rng = common::rng(30);
    for _ in 0..3 {
        let model = random_model(&mut rng);
        let cpts: Vec<_> = model.measurements().iter().map(|m| m.cpt).collect();
        let table = common::joint_table(&model.prior, &cpts);
        for cell in 0..NUM_CLASSES.pow(4) {
            let obs = [cell / 343, cell / 49 % 7, cell / 7 % 7, cell % 7];
            let observed: Vec<_> = Channel::MODALITIES.iter().zip(obs).map(|(c, o)| (*c, l(o))).collect();
            let (_, post) = bn_infer(&model, &observed).unwrap();
            let want = common::posterior_from_table(&table, 4, &obs);
            for e in 0..NUM_CLASSES {
                assert!((post[e] - want[e]).abs() < 1e-12);
            }
            assert!((post.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn observation_order_does_not_matter() {
    let mut rng = common::rng(31);
    let model = random_model(&mut rng);
    for _ in 0..200 {
        let mut observed: Vec<_> = Channel::MODALITIES.iter().map(|c| (*c, l(rng.random_range(0..7)))).collect();
        let base = bn_infer(&model, &observed).unwrap();
        observed.shuffle(&mut rng);
        assert_eq!(bn_infer(&model, &observed).unwrap(), base);
    }
}

#[test]
fn three_agreeing_perfect_channels_win() {
    let mut rng = common::rng(32);
    for _ in 0..50 {
        let ms = vec![
            MeasurementModel::identity(Channel::Audio),
            MeasurementModel::identity(Channel::LbpTop),
            MeasurementModel::identity(Channel::Cnn),
            MeasurementModel::new(Channel::Blstm, common::random_cpt(&mut rng)).unwrap(),
        ];
        let model = BnFusionModel::new(BnFusionModel::uniform_prior(), ms).unwrap();
        let e = rng.random_range(0..7);
        let other = rng.random_range(0..7);
        let obs = [(Channel::Audio, l(e)), (Channel::LbpTop, l(e)), (Channel::Cnn, l(e)), (Channel::Blstm, l(other))];
        assert_eq!(bn_infer(&model, &obs).unwrap().0, l(e));
    }
}

#[test]
fn missing_channels_are_marginalized() {
    let mut rng = common::rng(33);
    let model = random_model(&mut rng);
    let cpts: Vec<_> = model.measurements().iter().map(|m| m.cpt).collect();
    // oracle over the two observed channels only
    let table = common::joint_table(&model.prior, &cpts[1..3]);
    let decisions = [
        (Channel::Audio, None),
        (Channel::LbpTop, Some(l(2))),
        (Channel::Cnn, Some(l(5))),
        (Channel::Blstm, None),
    ];
    let want = common::posterior_from_table(&table, 2, &[2, 5]);
    let best = (0..7).fold(0, |b, e| if want[e] > want[b] { e } else { b });
    assert_eq!(bn_fusion_predict(&model, &decisions).unwrap(), l(best));
    assert!(matches!(
        bn_fusion_predict(&model, &[(Channel::Audio, None)]),
        Err(Error::NoObservations)
    ));
}

#[test]
fn inference_errors() {
    let model = BnFusionModel::new(BnFusionModel::uniform_prior(), vec![MeasurementModel::identity(Channel::Audio)]).unwrap();
    assert!(matches!(bn_infer(&model, &[(Channel::Cnn, l(0))]), Err(Error::UnknownChannel(_))));
    let zero = BnFusionModel::new(
        BnFusionModel::uniform_prior(),
        vec![MeasurementModel::identity(Channel::Audio), MeasurementModel::identity(Channel::Cnn)],
    )
    .unwrap();
    assert!(matches!(
        bn_infer(&zero, &[(Channel::Audio, l(0)), (Channel::Cnn, l(1))]),
        Err(Error::AllZeroPosterior)
    ));
}

#[test]
fn uniform_cpts_return_the_prior() {
    let prior = [0.1, 0.3, 0.05, 0.2, 0.15, 0.1, 0.1];
    let model = BnFusionModel::new(prior, vec![MeasurementModel::uniform(Channel::Blstm)]).unwrap();
    let (label, post) = bn_infer(&model, &[(Channel::Blstm, l(4))]).unwrap();
    assert_eq!(label, l(1));
    for e in 0..7 {
        assert!((post[e] - prior[e]).abs() < 1e-12);
    }
}

#[test]
fn cpt_estimation_counts_with_smoothing() {
    let truths = [l(0), l(0), l(0), l(1)];
    let preds = [l(0), l(0), l(2), l(1)];
    let m = fit_measurement_cpt(Channel::Audio, &preds, &truths, 1.0).unwrap();
    assert!((m.cpt[0][0] - 3.0 / 10.0).abs() < 1e-15);
    assert!((m.cpt[0][2] - 2.0 / 10.0).abs() < 1e-15);
    assert!((m.cpt[1][1] - 2.0 / 8.0).abs() < 1e-15);
    assert!((m.cpt[6][3] - 1.0 / 7.0).abs() < 1e-15);
    assert!(matches!(
        fit_measurement_cpt(Channel::Audio, &preds, &truths, 0.0),
        Err(Error::EmptyClassRow(_))
    ));
    let acc = fit_accuracy_cpt(Channel::Audio, &preds, &truths).unwrap();
    assert!((acc.cpt[3][3] - 0.75).abs() < 1e-12);
    assert!((acc.cpt[3][0] - 0.25 / 6.0).abs() < 1e-12);
}

#[test]
fn bn_model_round_trips() {
    let mut rng = common::rng(34);
    let truths: Vec<_> = (0..70).map(|i| l(i % 7)).collect();
    let decisions: Vec<_> = Channel::MODALITIES
        .iter()
        .map(|c| (*c, (0..70).map(|_| l(rng.random_range(0..7))).collect::<Vec<_>>()))
        .collect();
    let model = BnFusionModel::fit(&decisions, &truths, CptKind::Confusion, 1.0, Prior::LabelFrequency).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bn.json");
    model.save(&p).unwrap();
    assert_eq!(BnFusionModel::load(&p).unwrap(), model);
}

#[test]
fn joint_vector_layout() {
    let layout = JointVectorLayout::default();
    assert_eq!(layout.total(), 269);
    let v = build_joint_vector(&[1.0; 20], &[2.0; 150], &[3.0; 49], &[4.0; 50]).unwrap();
    assert_eq!(v.len(), 269);
    assert_eq!((v[19], v[20], v[169], v[170], v[218], v[219]), (1.0, 2.0, 2.0, 3.0, 3.0, 4.0));
    let err = build_joint_vector(&[1.0; 20], &[2.0; 150], &[3.0; 48], &[4.0; 50]).unwrap_err();
    assert!(err.to_string().contains("cnn"), "{err}");
}

fn fusion_data(n: usize, seed: u64) -> (Matrix, Vec<EmotionLabel>) {
    let mut rng = common::rng(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for i in 0..n {
        let c = i % 7;
        let audio: Vec<f64> = (0..20).map(|d| rng.random_range(-1.0..1.0) + if d == c { 6.0 } else { 0.0 }).collect();
        let lbp: Vec<f64> = (0..150).map(|_| rng.random_range(0.0..0.02)).collect();
        let cnn: Vec<f64> = (0..49).map(|d| if d % 7 == c { 0.7 } else { 0.05 }).collect();
        let blstm: Vec<f64> = (0..50).map(|_| rng.random_range(-3.0..3.0) * 100.0).collect();
        rows.push(build_joint_vector(&audio, &lbp, &cnn, &blstm).unwrap());
        labels.push(l(c));
    }
    (Matrix::from_rows(&rows).unwrap(), labels)
}

#[test]
fn feature_fusion_is_normalization_then_svm() {
    let (x, y) = fusion_data(140, 40);
    let opts = SvmOptions::default();
    let model = FeatureFusionModel::train(&x, &y, opts).unwrap();
    let norm = NormalizationModel::fit(&x).unwrap();
    let svm = svm_train(&norm.apply_rows(&x).unwrap(), &y, opts).unwrap();
    let (xt, _) = fusion_data(35, 41);
    for r in xt.iter_rows() {
        let want = svm_predict(&svm, &norm.apply(r).unwrap()).unwrap().0;
        assert_eq!(model.predict(r).unwrap().0, want);
    }
}

#[test]
fn feature_fusion_separates_held_out_clips() {
    let (x, y) = fusion_data(140, 42);
    let (xt, yt) = fusion_data(70, 43);
    let model = FeatureFusionModel::train(&x, &y, SvmOptions::default()).unwrap();
    assert_eq!(model.predict_rows(&xt).unwrap(), yt);
}

#[test]
fn feature_fusion_ignores_per_dimension_rescaling() {
    let (x, y) = fusion_data(140, 44);
    let (xt, _) = fusion_data(35, 45);
    let rescale = |m: &Matrix| {
        let rows: Vec<Vec<f64>> = m
            .iter_rows()
            .map(|r| r.iter().enumerate().map(|(d, v)| v * 2f64.powi((d % 5) as i32 - 2) + 3.0).collect())
            .collect();
        Matrix::from_rows(&rows).unwrap()
    };
    let a = FeatureFusionModel::train(&x, &y, SvmOptions::default()).unwrap();
    let b = FeatureFusionModel::train(&rescale(&x), &y, SvmOptions::default()).unwrap();
    let (pa, pb) = (a.predict_rows(&xt).unwrap(), b.predict_rows(&rescale(&xt)).unwrap());
    let agree = pa.iter().zip(&pb).filter(|(u, v)| u == v).count();
    assert!(agree as f64 >= 0.97 * pa.len() as f64, "{agree}/{}", pa.len());
}

#[test]
fn feature_fusion_round_trips() {
    let (x, y) = fusion_data(70, 46);
    let model = FeatureFusionModel::train(&x, &y, SvmOptions::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ff.json");
    model.save(&p).unwrap();
    let back = FeatureFusionModel::load(&p).unwrap();
    assert_eq!(back.predict_rows(&x).unwrap(), model.predict_rows(&x).unwrap());
}
