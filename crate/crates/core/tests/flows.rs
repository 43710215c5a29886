use fvmp::{ExperimentSpec, InitialCondition, LimiterKind, Scheme, Simulation, StreamCase};

fn rel_l2(stream: StreamCase, limiter: LimiterKind, n: usize) -> f64 {
    rel_l2_of(Scheme::Fv2, InitialCondition::CosBump, stream, limiter, n)
}

fn rel_l2_of(scheme: Scheme, ic: InitialCondition, stream: StreamCase, limiter: LimiterKind, n: usize) -> f64 {
    let spec = ExperimentSpec::new(scheme, limiter, stream, ic, n);
    let mut sim = Simulation::new(spec).unwrap();
    sim.run().unwrap();
    sim.report().unwrap().rel_l2
}

/// With a quarter-length reversal the sine deformation is resolved by
/// 128² and the limited scheme is second order.
#[test]
fn short_sine_reversal_converges_at_second_order() {
    let stream = StreamCase::Sin { period: 0.25 };
    for limiter in [LimiterKind::Unlimited, LimiterKind::Bj] {
        let order = (rel_l2(stream, limiter, 64) / rel_l2(stream, limiter, 128)).log2();
        assert!(order > 1.9, "{limiter}: {order}");
    }
}

#[test]
fn short_sine_reversal_is_high_order_with_fv4() {
    let e = |n| {
        rel_l2_of(
            Scheme::Fv4,
            InitialCondition::CosSqBump,
            StreamCase::Sin { period: 0.25 },
            LimiterKind::Unlimited,
            n,
        )
    };
    let order = (e(64) / e(128)).log2();
    assert!(order > 2.9, "{order}");
}

#[test]
fn reversing_flows_return_to_the_start() {
    for stream in [StreamCase::quad(), StreamCase::sin()] {
        assert!(rel_l2(stream, LimiterKind::N2n, 32) < 1.0);
    }
}
