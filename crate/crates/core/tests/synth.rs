use std::f64::consts::PI;

use num_complex::Complex64;

use scattering::filterbank::{build_morlet_bank, FilterBank};
use scattering::normalization::{normalize, EpsilonPolicy};
use scattering::scattering::{scatter, wavelet_modulus, ScatterConfig};
use scattering::signal::{RealSignal, Spectrum};
use scattering::synth::{
    gen_source_filter, gen_two_tone, interior_frames, lemma_bound_probe, nearest_wavelet, predict_first_order,
    predict_interference, predict_second_order_am, second_order_profile, wavelet_l1, Envelope, Excitation,
    SourceFilterModel, StationaryProcess,
};

const RATE: f64 = 22050.0;

fn delta() -> RealSignal {
    RealSignal::new(vec![1.0], RATE).unwrap()
}

/// Frequency (Hz) of the strongest non-DC line in the middle of `v`,
/// refined by parabolic interpolation.
fn envelope_peak(v: &RealSignal) -> f64 {
    let s = v.samples();
    let mid = &s[s.len() / 4..3 * s.len() / 4];
    let mean = mid.iter().sum::<f64>() / mid.len() as f64;
    let n = mid.len();
    let mag = |k: usize| -> f64 {
        mid.iter()
            .enumerate()
            .map(|(i, x)| (x - mean) * Complex64::from_polar(1.0, -2.0 * PI * (k * i) as f64 / n as f64))
            .sum::<Complex64>()
            .norm()
    };
    let mags: Vec<f64> = (0..n / 2).map(mag).collect();
    let k = (1..n / 2 - 1).max_by(|&a, &b| mags[a].total_cmp(&mags[b])).unwrap();
    let (a, b, c) = (mags[k - 1], mags[k], mags[k + 1]);
    let shift = 0.5 * (a - c) / (a - 2.0 * b + c);
    (k as f64 + shift) * v.rate() / n as f64
}

#[test]
fn tremolo_shows_in_partial_envelopes() {
    let m = SourceFilterModel {
        excitation: Excitation::PulseTrain { pitch_hz: 220.0 },
        h: delta(),
        envelope: Envelope::Tremolo { mean: 1.0, depth: 0.5, freq_hz: 4.0 },
    };
    let x = gen_source_filter(&m, 3.0, RATE).unwrap();
    let bank = build_morlet_bank(8, 0.19, RATE, 1 << 17).unwrap();
    let (j, _) = nearest_wavelet(&bank, 2.0 * PI * 440.0).unwrap();
    let env = &wavelet_modulus(&x, &bank).unwrap().envelopes[j].1;
    let f = envelope_peak(env);
    assert!((f - 4.0).abs() < 0.25, "envelope line at {f} Hz");
}

#[test]
fn two_tones_beat_in_a_shared_band() {
    let x = gen_two_tone(600.0, 675.0, 1.0, 1.0, 2.0, RATE).unwrap();
    let bank = build_morlet_bank(8, 0.19, RATE, 1 << 16).unwrap();
    let (j, _) = nearest_wavelet(&bank, 2.0 * PI * 637.5).unwrap();
    let env = &wavelet_modulus(&x, &bank).unwrap().envelopes[j].1;
    let f = envelope_peak(env);
    assert!((f - 75.0).abs() < 1.0, "beat at {f} Hz");
}

fn second_order_near(x: &RealSignal, t: f64, hz: f64) -> Vec<(f64, f64)> {
    let cfg = ScatterConfig::new(t, 2);
    let banks = cfg.banks(RATE, x.len()).unwrap();
    let (j, _) = nearest_wavelet(&banks[0], 2.0 * PI * hz).unwrap();
    let st = scatter(x, &banks, 2, cfg.options).unwrap().0;
    let ns = normalize(&st, x, EpsilonPolicy::Auto, None).unwrap();
    second_order_profile(&ns, j, interior_frames(&ns.frame_times, t, x.duration()))
}

#[test]
fn single_tone_has_no_second_order() {
    let x = gen_two_tone(600.0, 675.0, 1.0, 0.0, 4.0, RATE).unwrap();
    let prof = second_order_near(&x, 0.512, 600.0);
    assert!(!prof.is_empty());
    for (l2, v) in prof {
        assert!(v <= 1e-3, "{v} at {} Hz", l2 / (2.0 * PI));
    }
}

#[test]
fn interference_prediction_fades_with_one_amplitude() {
    let cfg = ScatterConfig::new(0.512, 2);
    let banks = cfg.banks(RATE, 4 * RATE as usize).unwrap();
    let (_, w1) = nearest_wavelet(&banks[0], 2.0 * PI * 600.0).unwrap();
    let mut last = f64::INFINITY;
    for a2 in [1.0, 0.1, 0.01, 1e-4, 0.0] {
        let p = predict_interference(600.0, 675.0, 1.0, a2, w1.center, &banks[0], &banks[1]).unwrap();
        let (k, peak) = p.peak();
        assert!(peak <= last);
        if a2 == 1.0 {
            let beat = 2.0 * PI * 75.0;
            assert!((p.lambda2[k] - beat).abs() <= banks[1].wavelets()[k].bandwidth);
        }
        if a2 == 0.0 {
            assert_eq!(peak, 0.0);
        }
        last = peak;
    }
    assert!(predict_interference(600.0, 2000.0, 1.0, 1.0, w1.center, &banks[0], &banks[1]).is_err());
}

fn am_bank(len: usize) -> FilterBank {
    let cfg = ScatterConfig::new(0.37, 2);
    cfg.banks(RATE, len).unwrap().remove(1)
}

#[test]
fn constant_envelope_predicts_no_modulation() {
    let n = 4 * RATE as usize;
    let a = RealSignal::new(vec![1.0; n], RATE).unwrap();
    let bank = am_bank(n);
    let pred = predict_second_order_am(&a, &bank).unwrap();
    let frames = frames_of(&a, &bank);
    for (l2, v) in pred.lambda2.iter().zip(pred.mean_over(frames)) {
        assert!(v <= 1e-6, "{v} at {} Hz", l2 / (2.0 * PI));
    }
}

fn frames_of(a: &RealSignal, bank: &FilterBank) -> std::ops::Range<usize> {
    let st = scatter(a, std::slice::from_ref(bank), 1, Default::default()).unwrap().0;
    interior_frames(&st.frame_times, bank.duration(), a.duration())
}

#[test]
fn tremolo_envelope_predicts_a_peak_at_its_rate() {
    let n = 6 * RATE as usize;
    let env = Envelope::Tremolo { mean: 1.0, depth: 0.5, freq_hz: 4.0 };
    let a = RealSignal::new((0..n).map(|i| env.value(i as f64 / RATE, RATE)).collect(), RATE).unwrap();
    let bank = am_bank(n);
    let pred = predict_second_order_am(&a, &bank).unwrap();
    let frames = frames_of(&a, &bank);
    let mean = pred.mean_over(frames);
    let k = (0..mean.len()).max_by(|&p, &q| mean[p].total_cmp(&mean[q])).unwrap();
    let eta = 2.0 * PI * 4.0;
    assert!(
        (pred.lambda2[k] - eta).abs() <= bank.wavelets()[k].bandwidth,
        "peak at {} Hz",
        pred.lambda2[k] / (2.0 * PI)
    );
}

#[test]
fn voiced_prediction_vanishes_between_harmonics() {
    let bank = build_morlet_bank(16, 0.19, RATE, 1 << 16).unwrap();
    let (_, w) = nearest_wavelet(&bank, 2.0 * PI * 1000.0).unwrap();
    for k in [1.5, 2.5] {
        let m = SourceFilterModel {
            excitation: Excitation::PulseTrain { pitch_hz: w.center / (2.0 * PI) / k },
            h: delta(),
            envelope: Envelope::Constant(1.0),
        };
        let v = predict_first_order(&m, w.center, &bank).unwrap();
        assert!(v <= 1e-3 * w.response(w.center), "k {k}: {v}");
    }
    // On a harmonic with a unit impulse response the prediction is the peak.
    let m = SourceFilterModel {
        excitation: Excitation::PulseTrain { pitch_hz: w.center / (2.0 * PI) / 3.0 },
        h: delta(),
        envelope: Envelope::Constant(1.0),
    };
    let v = predict_first_order(&m, w.center, &bank).unwrap();
    assert!((v - w.response(w.center)).abs() <= 1e-12);
}

#[test]
fn silent_envelope_zeroes_both_sides_of_the_lemma() {
    let n = 1024;
    let a = RealSignal::new(vec![0.0; n], 8000.0).unwrap();
    let bank = build_morlet_bank(8, 0.032, 8000.0, n).unwrap();
    let phi: Vec<Complex64> = bank.lowpass().sample(n, 8000.0).into_iter().map(|v| Complex64::new(v, 0.0)).collect();
    let h = Spectrum::new(phi, 8000.0).unwrap();
    let p = lemma_bound_probe(&StationaryProcess::WhiteGaussian, &a, &h, 30, 4).unwrap();
    assert!(p.empirical.iter().all(|&v| v == 0.0));
    assert!(p.bound.iter().all(|&v| v == 0.0));
    assert!(lemma_bound_probe(&StationaryProcess::WhiteGaussian, &a, &h, 29, 4).is_err());
}

/// With white noise and a constant envelope, S̃2 is made only of the
/// Rayleigh fluctuation the bound controls.
#[test]
fn unmodulated_noise_second_order_stays_under_error_bound() {
    let t = 0.19;
    let dur = 4.0;
    let cfg = ScatterConfig::new(t, 2);
    let n = (dur * RATE) as usize;
    let banks = cfg.banks(RATE, n).unwrap();
    let (q1, q2) = (banks[0].q() as f64, banks[1].q() as f64);
    // ‖ψ‖₁² is the same for every constant-Q wavelet clear of Nyquist.
    let (_, mid) = nearest_wavelet(&banks[0], 2.0 * PI * 1000.0).unwrap();
    let c = wavelet_l1(mid, banks[0].size(), RATE).powi(2);
    let pairs = [(1000.0, 16.0), (2000.0, 32.0), (4000.0, 64.0)];
    let mut sums = vec![0.0; pairs.len()];
    let seeds = 5;
    for seed in 0..seeds {
        let m = SourceFilterModel {
            excitation: Excitation::WhiteNoise { seed },
            h: delta(),
            envelope: Envelope::Constant(1.0),
        };
        let x = gen_source_filter(&m, dur, RATE).unwrap();
        let st = scatter(&x, &banks, 2, cfg.options).unwrap().0;
        let ns = normalize(&st, &x, EpsilonPolicy::Auto, None).unwrap();
        let frames = interior_frames(&ns.frame_times, t, dur);
        for (s, &(l1, l2)) in sums.iter_mut().zip(&pairs) {
            let (j1, _) = nearest_wavelet(&banks[0], 2.0 * PI * l1).unwrap();
            let (j2, _) = nearest_wavelet(&banks[1], 2.0 * PI * l2).unwrap();
            let p = ns.find(&[j1, j2]).unwrap();
            *s += ns.coefficients[p][frames.clone()].iter().sum::<f64>() / frames.len() as f64;
        }
    }
    for (s, &(l1, l2)) in sums.iter().zip(&pairs) {
        let lambda1 = nearest_wavelet(&banks[0], 2.0 * PI * l1).unwrap().1.center;
        let lambda2 = nearest_wavelet(&banks[1], 2.0 * PI * l2).unwrap().1.center;
        let bound = c * (4.0 / PI - 1.0).sqrt() * (lambda2 * q1 / (lambda1 * q2)).sqrt();
        let mean = s / seeds as f64;
        assert!(mean <= bound, "({l1} Hz, {l2} Hz): {mean} vs bound {bound}");
    }
}
