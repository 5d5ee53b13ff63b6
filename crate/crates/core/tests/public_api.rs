use proptest::prelude::*;
use thermofringe::{
    estimate_high_t, mean_m, resolution_closed_form, second_moment, validate, ExperimentSpec,
    MeasurementModel, Mirrors, ModelOptions, Observation, PhysicalConstants,
};

fn t_ref() -> f64 {
    1e-21 / PhysicalConstants::SI.boltzmann
}

#[test]
fn reference_setup_end_to_end() {
    let v = validate(&ExperimentSpec::reference()).unwrap();
    let t = t_ref();
    let stats = second_moment(
        &v,
        t,
        MeasurementModel::QuadraticHighT,
        &ModelOptions::default(),
    )
    .unwrap();
    let est = estimate_high_t(&v, Observation::from_stats(&stats)).unwrap();
    assert!(((est.t_hat - t) / t).abs() < 1e-12);
    let sec = stats.second.unwrap();
    assert!(sec.delta_m > 0.0);
    assert_eq!(sec.delta_m_photon_number, v.detected_photons());
    assert!(resolution_closed_form(&v).delta_t > 0.0);
}

#[test]
fn auto_model_follows_regime() {
    let v = validate(&ExperimentSpec::reference()).unwrap();
    for (ratio, model) in [
        (1e-5, MeasurementModel::QuadraticHighT),
        (1.0, MeasurementModel::ExactGaussian),
        (500.0, MeasurementModel::TwoLevelLowT),
    ] {
        let t = v.temperature_for_ratio(ratio);
        let tag = thermofringe::classify_regime(&v, t).unwrap().tag;
        assert_eq!(MeasurementModel::for_regime(tag), model);
    }
}

proptest! {
    #[test]
    fn mean_never_exceeds_photon_number(log_t in -3.0f64..6.0, two in any::<bool>()) {
        let mirrors = if two { Mirrors::TwoThermal } else { Mirrors::OneThermal };
        let v = validate(&ExperimentSpec::reference().with_mirrors(mirrors)).unwrap();
        let t = 10f64.powf(log_t);
        let s = mean_m(&v, t, MeasurementModel::ExactGaussian, &ModelOptions::default()).unwrap();
        prop_assert!(s.mean_m <= v.photon_number());
        prop_assert!(s.deficit >= 0.0);
    }

    #[test]
    fn two_mirrors_never_lose_less(log_t in -3.0f64..6.0) {
        let one = validate(&ExperimentSpec::reference()).unwrap();
        let two = one.with_mirrors(Mirrors::TwoThermal);
        let t = 10f64.powf(log_t);
        let opts = ModelOptions::default();
        let a = mean_m(&one, t, MeasurementModel::ExactGaussian, &opts).unwrap();
        let b = mean_m(&two, t, MeasurementModel::ExactGaussian, &opts).unwrap();
        prop_assert!(b.deficit >= a.deficit);
    }
}
