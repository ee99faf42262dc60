use snnbench::metrics::{
    align_power, energy_per_synaptic_event, integrate_energy, read_power_csv, PowerTrace,
    DEVICE_DELAY_S,
};

#[test]
fn constant_trace_integrates_exactly() {
    let trace = PowerTrace::new(1_000.0, vec![300.0; 10]).unwrap();
    assert_eq!(
        integrate_energy(&trace, 1_000.0, 1_010.0, 200.0).unwrap(),
        1000.0
    );
    assert_eq!(
        integrate_energy(&trace, 1_000.0, 1_010.0, 0.0).unwrap(),
        3000.0
    );
    // a baseline above the readings contributes nothing
    assert_eq!(
        integrate_energy(&trace, 1_000.0, 1_010.0, 400.0).unwrap(),
        0.0
    );
}

#[test]
fn alignment_moves_attribution_by_one_sample() {
    // a load step: idle until second 5, loaded after, with readings lagging
    // one second behind
    let samples: Vec<f64> = (0..12).map(|i| if i < 6 { 200.0 } else { 500.0 }).collect();
    let trace = PowerTrace::new(0.0, samples.clone()).unwrap();
    let aligned = align_power(&trace, DEVICE_DELAY_S);
    for i in 0..10 {
        let t = 1.0 + i as f64;
        let raw = integrate_energy(&trace, t, t + 1.0, 0.0).unwrap();
        let moved = integrate_energy(&aligned, t, t + 1.0, 0.0).unwrap();
        assert_eq!(raw, samples[i + 1]);
        assert_eq!(moved, samples[i + 2]);
    }
    assert_eq!(align_power(&aligned, -DEVICE_DELAY_S), trace);
}

#[test]
fn per_event_energy_is_the_plain_quotient() {
    let cases = [(1000.0, 3_000_000_000u64), (0.0, 1), (1.234e5, 987_654_321)];
    for (e, n) in cases {
        let q = energy_per_synaptic_event(e, n).unwrap();
        let hand = e / n as f64;
        assert!((q - hand).abs() <= 1e-12 * hand.abs(), "{q} vs {hand}");
    }
    assert!(energy_per_synaptic_event(1.0, 0).is_err());
}

#[test]
fn power_log_files() {
    let doc = "time,watts\n100,300\n101,300\n102,300\n";
    let trace = read_power_csv(doc.as_bytes()).unwrap();
    assert_eq!(trace.start_time, 100.0);
    assert_eq!(trace.samples, vec![300.0; 3]);
    assert_eq!(
        integrate_energy(&trace, 100.0, 103.0, 200.0).unwrap(),
        300.0
    );
    assert!(read_power_csv("".as_bytes()).is_err());
    assert!(read_power_csv("100,300\n102,300\n".as_bytes()).is_err());
    assert!(read_power_csv("100,300\n101,-1\n".as_bytes()).is_err());
    assert!(integrate_energy(&trace, 99.0, 102.0, 0.0).is_err());
}
