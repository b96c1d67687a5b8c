//! Property tests over the invariants of the netlist, solver, adders and
//! analysis layers.

use mvl_core::adders::{build_cpa, build_full_adder, AdderPorts, AdderVariant, CpaConfig};
use mvl_core::analysis::{area, chain_delay, Bench, Design, TimingModel};
use mvl_core::gates::GateKind;
use mvl_core::logic::{CarrySwing, Radix};
use mvl_core::netlist::{parse, serialize, NetRole};
use mvl_core::solver::{solve_dc, stimulus_from_digits, NodeValue};
use proptest::prelude::*;

fn cell_configs() -> Vec<(AdderVariant, CarrySwing, f64)> {
    AdderVariant::ALL
        .iter()
        .flat_map(|&v| v.configurations().into_iter().map(move |(s, vdd)| (v, s, vdd)))
        .collect()
}

fn any_cell() -> impl Strategy<Value = (AdderVariant, CarrySwing, f64)> {
    prop::sample::select(cell_configs())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn text_round_trip_keeps_devices_and_area(cell in any_cell(), digits in 1usize..4) {
        let (v, s, vdd) = cell;
        let nl = build_cpa(&CpaConfig::new(v, digits).with_swing(s).with_vdd(vdd)).unwrap();
        let back = parse(&serialize(&nl)).unwrap();
        prop_assert_eq!(back.flat_device_count(), nl.flat_device_count());
        let (a, b): (f64, f64) = (area(&nl), area(&back));
        prop_assert!((a - b).abs() < 1e-9);
        prop_assert_eq!(serialize(&back), serialize(&nl));
    }

    #[test]
    fn cpa_area_is_additive(cell in any_cell(), digits in 1usize..6) {
        let (v, s, vdd) = cell;
        let one: f64 = area(&build_full_adder(v, s, vdd).unwrap());
        let cpa = build_cpa(&CpaConfig::new(v, digits).with_swing(s).with_vdd(vdd)).unwrap();
        let flat = cpa.flatten().unwrap();
        prop_assert!((area::<f64>(&flat) - digits as f64 * one).abs() < 1e-9);
        prop_assert_eq!(flat.ports().len(), cpa.ports().len());
        prop_assert!(flat.instances().is_empty());
    }

    #[test]
    fn supplies_hold_and_carries_stay_binary(cell in any_cell(), a in 0u32..4, b in 0u32..4, cin in 0u32..2) {
        let (v, s, vdd) = cell;
        let r = v.radix().get();
        let (a, b) = (a % r, b % r);
        let nl = build_full_adder(v, s, vdd).unwrap();
        let p = AdderPorts::find(&nl, 1).unwrap();
        let st = solve_dc(&nl, &stimulus_from_digits(&nl, [(p.a[0], a), (p.b[0], b), (p.cin, cin)]).unwrap()).unwrap();
        for (id, volts) in nl.supplies() {
            prop_assert_eq!(st.value(id), NodeValue::Driven(volts));
        }
        let swing = s.one_voltage(v.radix(), vdd);
        let cout = st.value(p.cout).driven().unwrap();
        prop_assert!(cout == 0.0 || (cout - swing).abs() < 1e-12, "cout {}", cout);
    }

    #[test]
    fn swing_does_not_change_tfa2_logic(a in 0u32..3, b in 0u32..3, cin in 0u32..2) {
        let digits = |swing| {
            let nl = build_full_adder(AdderVariant::Tfa2, swing, 0.9).unwrap();
            let p = AdderPorts::find(&nl, 1).unwrap();
            let st = solve_dc(&nl, &stimulus_from_digits(&nl, [(p.a[0], a), (p.b[0], b), (p.cin, cin)]).unwrap()).unwrap();
            let d = |id| nl.voltage_map(id).unwrap().decode(st.value(id).driven().unwrap()).unwrap();
            (d(p.sum[0]), d(p.cout))
        };
        prop_assert_eq!(digits(CarrySwing::Reduced), digits(CarrySwing::Full));
    }

    #[test]
    fn delay_scales_with_rho(s in 0.1f64..10.0, cl in 0.1f64..5.0) {
        let m = TimingModel::<f64>::default();
        let base = chain_delay(3, true, &m, cl).unwrap();
        let scaled = chain_delay(3, true, &m.with_rho_scaled(s), cl).unwrap();
        prop_assert!((scaled / base - s).abs() < 1e-9 * s);
    }

    #[test]
    fn delay_scales_with_all_capacitance(s in 0.1f64..10.0) {
        let m = TimingModel::<f64>::default();
        let base = chain_delay(4, false, &m, 1.0).unwrap();
        let scaled = chain_delay(4, false, &m.with_caps_scaled(s), s).unwrap();
        prop_assert!((scaled / base - s).abs() < 1e-9 * s);
    }
}

#[test]
fn gate_kinds_declare_their_ports() {
    for kind in GateKind::library() {
        let nl = kind.build().unwrap();
        assert!(nl.outputs().count() == 1, "{kind}");
        assert!(nl.inputs().all(|id| matches!(nl.net(id).role, NetRole::Input { .. })));
        assert!(nl.validate().is_ok(), "{kind}");
    }
}

#[test]
fn scale_laws_on_a_whole_cell() {
    let bench = Bench::new(Design::cell(AdderVariant::Tfa2, CarrySwing::Full, 0.9)).unwrap();
    let m = TimingModel::<f64>::default();
    let base = bench.worst_case_delays(&m, 2.0).unwrap();
    let slow = bench.worst_case_delays(&m.with_rho_scaled(3.0), 2.0).unwrap();
    for (b, s) in base.as_array().iter().zip(slow.as_array()) {
        assert!((s / b - 3.0).abs() < 1e-9);
    }
    let p = bench.power(&m, 2.0);
    assert!((bench.power(&m.with_rho_scaled(3.0), 2.0) - p).abs() < 1e-12 * p);
    let big = bench.power(&m.with_caps_scaled(2.0), 4.0);
    assert!((big / p - 2.0).abs() < 1e-9);
    let big_delays = bench.worst_case_delays(&m.with_caps_scaled(2.0), 4.0).unwrap();
    for (b, s) in base.as_array().iter().zip(big_delays.as_array()) {
        assert!((s / b - 2.0).abs() < 1e-9);
    }
}

#[test]
fn halving_the_supply_quarters_power_exactly() {
    let m = TimingModel::<f64>::default();
    for v in [AdderVariant::Bfa1, AdderVariant::Bfa2, AdderVariant::Bfa3] {
        let p = |vdd| {
            Bench::new(Design::cell(v, CarrySwing::Full, vdd))
                .unwrap()
                .power(&m, 2.0)
        };
        let ratio = p(0.45) / p(0.9);
        assert!((ratio - 0.25).abs() < 1e-12, "{v}: {ratio}");
    }
}

#[test]
fn f32_and_f64_models_agree() {
    let bench = Bench::new(Design::cell(AdderVariant::Qfa2, CarrySwing::Full, 0.9)).unwrap();
    let d64 = bench.worst_case_delays(&TimingModel::<f64>::default(), 2.0).unwrap();
    let d32 = bench.worst_case_delays(&TimingModel::<f32>::default(), 2.0f32).unwrap();
    for (a, b) in d64.as_array().iter().zip(d32.as_array()) {
        assert!((f64::from(b) - a).abs() / a < 1e-4);
    }
    assert!((f64::from(bench.area::<f32>()) - bench.area::<f64>()).abs() < 1e-3);
}

#[test]
fn restoration_wins_once_chains_grow() {
    let m = TimingModel::<f64>::default();
    let d = |k, r| chain_delay(k, r, &m, 2.0).unwrap();
    let first = (1..=12)
        .find(|&k| d(k, true) < d(k, false))
        .expect("restoration never wins");
    assert!((first..=12).all(|k| d(k, true) < d(k, false)));
    let steps: Vec<f64> = (1..12).map(|k| d(k + 1, true) - d(k, true)).collect();
    assert!(steps.iter().all(|s| (s - steps[2]).abs() < 1e-3 * steps[2]));
    assert!((2..12).all(|k| d(k + 1, false) - d(k, false) > d(k, false) - d(k - 1, false)));
}

#[test]
fn radix_of_every_variant() {
    let radix: Vec<u32> = AdderVariant::ALL.iter().map(|v| v.radix().get()).collect();
    assert_eq!(radix, vec![3, 3, 4, 4, 2, 2, 2]);
    assert_eq!(CpaConfig::standard_digits(Radix::TERNARY), 4);
}
