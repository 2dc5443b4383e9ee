from fractions import Fraction as Q

import pytest

from netcalc import (
    DomainError,
    FlowClass,
    FlowMix,
    TSpec,
    aggregate_buffer,
    aggregate_eb,
    buffer_for_delay,
    constant_rate,
    delay_for_buffer,
    eb_subadditivity_gap,
    effective_bandwidth,
    equivalent_capacity,
    is_unbounded,
    sum_individual_eb,
    token_bucket,
    vertical_deviation,
)

from conftest import TYPE1, TYPE2, TYPE3, jump_threshold, random_mix, random_tspec, rng_for
from oracles import grid_eb, grid_ec


def random_curve(rng, aggregates=True, zero_rate=True):
    if aggregates and rng.random() < 0.4:
        return random_mix(rng, allow_zero_rate=zero_rate).aggregate_curve()
    return random_tspec(rng, allow_zero_rate=zero_rate).as_curve()


class TestEffectiveBandwidth:
    def test_type3_at_100ms(self):
        assert effective_bandwidth(TYPE3.as_curve(), Q(1, 10)) == 219_000

    def test_matches_candidate_formula(self):
        g = TYPE3.breakpoint
        d = Q(1, 10)
        expected = max(
            TYPE3.max_packet / d,
            TYPE3.as_curve().value(g) / (g + d),
            TYPE3.sustained_rate,
        )
        assert effective_bandwidth(TYPE3.as_curve(), d) == expected

    def test_constant_rate_curve(self):
        curve = token_bucket(12345, 0)
        for d in (Q(0), Q(1, 7), Q(5)):
            assert effective_bandwidth(curve, d) == 12345

    def test_flattens_at_sustained_rate(self):
        curve = TYPE1.as_curve()
        tau = TYPE1.burst / TYPE1.sustained_rate
        assert effective_bandwidth(curve, tau) == TYPE1.sustained_rate
        assert effective_bandwidth(curve, tau * 3) == TYPE1.sustained_rate
        assert effective_bandwidth(curve, tau * Q(99, 100)) > TYPE1.sustained_rate

    def test_zero_delay_with_jump_unbounded(self):
        assert is_unbounded(effective_bandwidth(TYPE1.as_curve(), 0))

    def test_negative_delay_rejected(self):
        with pytest.raises(DomainError):
            effective_bandwidth(TYPE1.as_curve(), -1)

    def test_monotone_in_delay(self):
        rng = rng_for("eb-monotone")
        for _ in range(1000):
            curve = random_curve(rng)
            d1 = Q(rng.randint(1, 400), 128)
            d2 = d1 + Q(rng.randint(0, 400), 128)
            assert effective_bandwidth(curve, d1) >= effective_bandwidth(curve, d2)

    def test_grid_oracle_random(self):
        rng = rng_for("eb-grid")
        for _ in range(60):
            spec = random_tspec(rng)
            d = Q(rng.randint(1, 64), 16)
            exact = effective_bandwidth(spec.as_curve(), d)
            smax = 10 * max(spec.breakpoint, spec.burst / max(spec.sustained_rate, Q(1, 4)), 1)
            oracle, slack = grid_eb(spec.as_curve(), d, smax)
            assert abs(float(exact) - oracle) <= slack


class TestEquivalentCapacity:
    def test_type2_at_full_burst(self):
        assert equivalent_capacity(TYPE2.as_curve(), 368_000) == 700_000

    def test_constant_rate_curve(self):
        curve = token_bucket(777, 0)
        for b in (Q(0), Q(5), Q(100)):
            assert equivalent_capacity(curve, b) == 777

    def test_buffer_below_packet_unbounded(self):
        assert is_unbounded(equivalent_capacity(TYPE3.as_curve(), TYPE3.max_packet - 1))

    def test_negative_buffer_rejected(self):
        with pytest.raises(DomainError):
            equivalent_capacity(TYPE1.as_curve(), -5)

    def test_grid_oracle_random(self):
        rng = rng_for("ec-grid")
        for _ in range(60):
            spec = random_tspec(rng)
            curve = spec.as_curve()
            b = spec.max_packet + Q(rng.randint(0, 500), 4)
            exact = equivalent_capacity(curve, b)
            smax = 10 * max(spec.breakpoint, spec.burst + 1, 1)
            oracle, slack = grid_ec(curve, b, smax)
            assert abs(float(exact) - oracle) <= slack


class TestDuality:
    def test_buffer_for_constant_rate_is_zero(self):
        assert buffer_for_delay(token_bucket(10, 0), Q(3)) == 0

    def test_type1_buffer_at_10ms(self):
        got = buffer_for_delay(TYPE1.as_curve(), Q(1, 100))
        assert got == Q(275325, 8)
        # the identity that buffer sizing exists for
        assert equivalent_capacity(TYPE1.as_curve(), got) == effective_bandwidth(
            TYPE1.as_curve(), Q(1, 100)
        )

    def test_unbounded_rate_has_no_buffer_statement(self):
        with pytest.raises(DomainError):
            buffer_for_delay(TYPE1.as_curve(), 0)

    def test_delay_for_constant_rate_is_zero(self):
        assert delay_for_buffer(token_bucket(10, 0), Q(50)) == 0

    def test_type2_delay_for_100kb(self):
        got = delay_for_buffer(TYPE2.as_curve(), 100_000)
        assert effective_bandwidth(TYPE2.as_curve(), got) == equivalent_capacity(
            TYPE2.as_curve(), 100_000
        )

    def test_large_buffer_flattening(self):
        # beyond the burst the binding rate is the sustained rate
        got = delay_for_buffer(TYPE1.as_curve(), TYPE1.burst * 2)
        assert equivalent_capacity(TYPE1.as_curve(), TYPE1.burst * 2) == TYPE1.sustained_rate
        assert got == TYPE1.burst / TYPE1.sustained_rate

    def test_buffer_below_jump_means_zero_delay(self):
        assert delay_for_buffer(TYPE3.as_curve(), TYPE3.max_packet - 1) == 0

    def test_zero_rate_flow_rejected(self):
        flat = token_bucket(0, 0)
        with pytest.raises(DomainError):
            delay_for_buffer(flat, 10)

    def test_round_trip_buffer_direction(self):
        # exact identity whenever the bandwidth sup is attained off the jump
        rng = rng_for("duality-h")
        for _ in range(1000):
            curve = random_curve(rng)
            if curve.first_slope() == 0:
                continue
            d = jump_threshold(curve) + Q(rng.randint(0, 200), 64)
            e = effective_bandwidth(curve, d)
            assert equivalent_capacity(curve, buffer_for_delay(curve, d)) == e

    def test_round_trip_delay_direction(self):
        rng = rng_for("duality-g")
        for _ in range(1000):
            curve = random_curve(rng, zero_rate=False)
            b = curve.value_right(0) + Q(rng.randint(0, 2000), 8)
            f = equivalent_capacity(curve, b)
            assert effective_bandwidth(curve, delay_for_buffer(curve, b)) == f

    def test_jump_regime_one_sided(self):
        # below the jump threshold the round trip only bounds from below
        rng = rng_for("duality-jump")
        for _ in range(300):
            spec = random_tspec(rng)
            if spec.max_packet == 0:
                continue
            curve = spec.as_curve()
            if curve.first_slope() == 0:
                continue
            thr = jump_threshold(curve)
            d = thr * Q(rng.randint(1, 63), 64)
            if d == 0:
                continue
            e = effective_bandwidth(curve, d)
            assert equivalent_capacity(curve, buffer_for_delay(curve, d)) <= e

    def test_jump_regime_strict_gap_example(self):
        curve = TYPE1.as_curve()
        d = Q(1, 100_000)  # well below max_packet / peak_rate
        e = effective_bandwidth(curve, d)
        back = equivalent_capacity(curve, buffer_for_delay(curve, d))
        assert e == Q(100_000_000)
        assert back == TYPE1.peak_rate < e


class TestFlowMix:
    def test_classes_sorted_by_breakpoint(self):
        mix = FlowMix((FlowClass(TYPE3, 1), FlowClass(TYPE1, 2), FlowClass(TYPE2, 1)), Q(1, 2))
        assert [fc.spec for fc in mix.classes] == [TYPE1, TYPE2, TYPE3]

    def test_aggregate_curve_piece_budget(self):
        rng = rng_for("mix-pieces")
        for _ in range(200):
            mix = random_mix(rng)
            active = sum(1 for fc in mix.classes if fc.count > 0)
            assert len(mix.aggregate_curve().pieces) <= active + 1

    def test_aggregate_curve_matches_sum(self):
        rng = rng_for("mix-sum")
        for _ in range(100):
            mix = random_mix(rng, max_classes=3, max_count=5)
            curve = mix.aggregate_curve()
            for _ in range(10):
                t = Q(rng.randint(0, 1000), 32)
                expected = sum(
                    fc.count * fc.spec.as_curve().value(t) for fc in mix.classes
                )
                assert curve.value(t) == expected

    def test_per_class_delays_take_min(self):
        mix = FlowMix.with_per_class_delays(
            (FlowClass(TYPE1, 1), FlowClass(TYPE2, 1)), (Q(1, 2), Q(1, 5))
        )
        assert mix.delay == Q(1, 5)

    def test_negative_count_rejected(self):
        with pytest.raises(DomainError):
            FlowClass(TYPE1, -1)


class TestAggregateEb:
    def mix111(self, d):
        return FlowMix((FlowClass(TYPE1, 1), FlowClass(TYPE2, 1), FlowClass(TYPE3, 1)), d)

    def test_matches_generic_curve_path(self):
        rng = rng_for("agg-cross")
        for _ in range(500):
            mix = random_mix(rng)
            profile = aggregate_eb(mix)
            assert profile.selected_eb == effective_bandwidth(mix.aggregate_curve(), mix.delay)

    def test_selected_is_max_candidate(self):
        rng = rng_for("agg-max")
        for _ in range(300):
            profile = aggregate_eb(random_mix(rng))
            assert profile.selected_eb == max(profile.candidates)

    def test_long_run_candidate_exact(self):
        rng = rng_for("agg-longrun")
        for _ in range(200):
            mix = random_mix(rng)
            profile = aggregate_eb(mix)
            assert profile.candidates[-1] == sum(
                fc.count * fc.spec.sustained_rate for fc in mix.classes
            )

    def test_thresholds_sorted(self):
        rng = rng_for("agg-tau")
        for _ in range(300):
            profile = aggregate_eb(random_mix(rng))
            finite = [t for t in profile.thresholds if not is_unbounded(t)]
            assert finite == sorted(finite)
            if any(is_unbounded(t) for t in profile.thresholds):
                first_inf = next(
                    i for i, t in enumerate(profile.thresholds) if is_unbounded(t)
                )
                assert all(is_unbounded(t) for t in profile.thresholds[first_inf:])

    def test_regime_candidate_binds(self):
        rng = rng_for("agg-regime")
        for _ in range(300):
            profile = aggregate_eb(random_mix(rng))
            assert profile.candidates[profile.regime_index] == profile.selected_eb

    def test_single_class_flattening(self):
        mix = FlowMix((FlowClass(TYPE2, 1),), TYPE2.burst / TYPE2.sustained_rate)
        assert aggregate_eb(mix).selected_eb == TYPE2.sustained_rate

    def test_table_mix_flattening_threshold(self):
        tau4 = Q(444_000, 1_430_000)
        assert tau4 == Q(222, 715)
        profile = aggregate_eb(self.mix111(tau4))
        assert profile.thresholds[-1] == tau4
        assert profile.selected_eb == Q(1_430_000)
        above = aggregate_eb(self.mix111(Q(1, 2)))
        assert above.selected_eb == Q(1_430_000)
        below = aggregate_eb(self.mix111(tau4 * Q(9, 10)))
        assert below.selected_eb > Q(1_430_000)

    def test_zero_delay_sentinel(self):
        mix = self.mix111(Q(0))
        assert is_unbounded(aggregate_eb(mix).selected_eb)

    def test_no_flows_rejected(self):
        with pytest.raises(DomainError):
            aggregate_eb(FlowMix((FlowClass(TYPE1, 0),), Q(1, 2)))

    def test_monotone_in_counts(self):
        rng = rng_for("agg-counts")
        for _ in range(200):
            mix = random_mix(rng, max_classes=4, max_count=10)
            profile = aggregate_eb(mix)
            k = rng.randrange(len(mix.classes))
            bumped = list(mix.classes)
            bumped[k] = FlowClass(bumped[k].spec, bumped[k].count + 1)
            assert aggregate_eb(FlowMix(tuple(bumped), mix.delay)).selected_eb >= profile.selected_eb

    def test_flattening_iff_threshold(self):
        rng = rng_for("agg-flat")
        for _ in range(300):
            mix = random_mix(rng)
            profile = aggregate_eb(mix)
            tau = profile.thresholds[-1]
            rate_sum = profile.candidates[-1]
            if is_unbounded(tau) or rate_sum == 0:
                continue
            assert aggregate_eb(FlowMix(mix.classes, tau)).selected_eb == rate_sum
            assert aggregate_eb(FlowMix(mix.classes, tau * 2)).selected_eb == rate_sum
            if tau > 0:
                below = aggregate_eb(FlowMix(mix.classes, tau * Q(7, 8))).selected_eb
                assert below > rate_sum


class TestAggregateBuffer:
    def test_pure_rate_class_needs_no_buffer(self):
        pure = TSpec(peak_rate=10, max_packet=0, sustained_rate=5, burst=0)
        mix = FlowMix((FlowClass(pure, 3),), Q(1, 2))
        assert aggregate_buffer(mix) == 0

    def test_matches_curve_path(self):
        rng = rng_for("buf-cross")
        for _ in range(300):
            mix = random_mix(rng)
            if is_unbounded(aggregate_eb(mix).selected_eb):
                continue
            assert aggregate_buffer(mix) == buffer_for_delay(mix.aggregate_curve(), mix.delay)

    def test_matches_vertical_deviation(self):
        mix = FlowMix(
            (FlowClass(TYPE1, 1), FlowClass(TYPE2, 1), FlowClass(TYPE3, 1)), Q(1, 5)
        )
        e = aggregate_eb(mix).selected_eb
        assert aggregate_buffer(mix) == vertical_deviation(
            mix.aggregate_curve(), constant_rate(e)
        )
        assert aggregate_buffer(mix) == Q(655_240_000, 1627)

    def test_flattened_regime_closed_form(self):
        rng = rng_for("buf-flat")
        for _ in range(100):
            mix = random_mix(rng)
            profile = aggregate_eb(mix)
            tau = profile.thresholds[-1]
            if is_unbounded(tau) or profile.candidates[-1] == 0:
                continue
            flat = FlowMix(mix.classes, tau * 2)
            curve = flat.aggregate_curve()
            rate_sum = profile.candidates[-1]
            corners = [Q(0)] + list(curve.breakpoints())
            expected = max(curve.value_right(s) - rate_sum * s for s in corners)
            assert aggregate_buffer(flat) == expected


class TestSubadditivity:
    def test_identical_token_buckets_equal(self):
        spec = TSpec(peak_rate=20, max_packet=2, sustained_rate=3, burst=40)
        mixes = [FlowMix((FlowClass(spec, 1),), Q(1, 2)) for _ in range(2)]
        combined, parts = eb_subadditivity_gap(mixes, Q(1, 2))
        assert combined == parts

    def test_table_types_1_2_strict_gap(self):
        m1 = FlowMix((FlowClass(TYPE1, 1),), Q(1, 10))
        m2 = FlowMix((FlowClass(TYPE2, 1),), Q(1, 10))
        combined, parts = eb_subadditivity_gap([m1, m2], Q(1, 10))
        assert combined == Q(3_071_600_000, 997)
        assert parts == Q(3_273_200_000, 997)
        assert combined < parts

    def test_single_mix_trivial(self):
        m = FlowMix((FlowClass(TYPE1, 2),), Q(1, 4))
        combined, parts = eb_subadditivity_gap([m], Q(1, 4))
        assert combined == parts

    def test_random_instances_hold(self):
        rng = rng_for("subadd")
        for _ in range(300):
            mixes = [random_mix(rng, max_classes=2, max_count=5) for _ in range(rng.randint(2, 4))]
            d = Q(rng.randint(1, 64), 32)
            combined, parts = eb_subadditivity_gap(mixes, d)
            assert combined <= parts

    def test_capacity_subadditivity_random(self):
        # pooled buffers never need more rate than dedicated ones
        rng = rng_for("ec-subadd")
        for _ in range(300):
            specs = [random_tspec(rng) for _ in range(rng.randint(2, 4))]
            buffers = [s.max_packet + Q(rng.randint(0, 200), 4) for s in specs]
            combined_curve = specs[0].as_curve()
            for s in specs[1:]:
                combined_curve = combined_curve + s.as_curve()
            lhs = equivalent_capacity(combined_curve, sum(buffers))
            rhs = sum(equivalent_capacity(s.as_curve(), b) for s, b in zip(specs, buffers))
            assert lhs <= rhs

    def test_sum_individual_eb_matches_gap_parts(self):
        mix = FlowMix((FlowClass(TYPE1, 2), FlowClass(TYPE3, 1)), Q(1, 10))
        singles = [FlowMix((FlowClass(fc.spec, fc.count),), mix.delay) for fc in mix.classes]
        _, parts = eb_subadditivity_gap(singles, mix.delay)
        assert sum_individual_eb(mix) == parts
