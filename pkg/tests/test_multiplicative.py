import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meanmult import multiplicative as mc
from meanmult import primes


def mobius_spec():
    return mc.MultSpec(prime_rule=lambda p: -1, completion=mc.ZERO_BEYOND_FIRST, exact=True, spec_id="mobius")


def one_spec():
    return mc.MultSpec(prime_rule=lambda p: 1, completion=mc.COMPLETELY_MULTIPLICATIVE, exact=True, spec_id="one")


class TestSieveValues:
    def test_constant_one(self):
        t = mc.sieve_values(one_spec(), 50)
        assert t.values[1:] == [1] * 50

    def test_mobius_first_ten(self):
        t = mc.sieve_values(mobius_spec(), 10)
        assert t.values[1:] == [1, -1, -1, 0, -1, 1, -1, 0, 0, 1]

    def test_hecke_composite_value(self):
        spec = mc.MultSpec(
            prime_rule={2: -24, 3: 252, 5: 4830, 7: -16744, 11: 534612},
            completion=mc.HECKE,
            weight=12,
            exact=True,
        )
        t = mc.sieve_values(spec, 12)
        # recurrence at 4, then multiplicativity at 12
        assert t.values[4] == (-24) ** 2 - 2**11 == -1472
        assert t.values[12] == -1472 * 252 == -370944

    def test_explicit_table_missing_entry_named(self):
        spec = mc.MultSpec(completion=mc.EXPLICIT, table={2: 1, 3: 1, 5: 1, 7: 1}, exact=True)
        with pytest.raises(mc.SpecError, match="4"):
            mc.sieve_values(spec, 10)

    def test_exponential_completion(self):
        spec = mc.MultSpec(prime_rule=lambda p: 2, completion=mc.EXPONENTIAL, exact=True)
        t = mc.sieve_values(spec, 16)
        assert t.values[8] == Fraction(2**3, math.factorial(3))
        assert t.values[16] == Fraction(2**4, math.factorial(4))

    def test_matches_naive_factorization_to_1e4(self):
        rng = random.Random(7)
        specs = [
            mobius_spec(),
            one_spec(),
            mc.MultSpec(prime_rule=lambda p: 2, completion=mc.HECKE, weight="normalized", exact=True, spec_id="divisor"),
            mc.MultSpec(prime_rule=lambda p: 0.5, completion=mc.EXPONENTIAL, spec_id="exp_half"),
        ]
        for spec in specs:
            t = mc.sieve_values(spec, 10**4)
            for n in rng.sample(range(1, 10**4 + 1), 250):
                expect = mc.naive_value(spec, n)
                if spec.exact:
                    assert t.values[n] == expect, (spec.spec_id, n)
                else:
                    assert t.values[n] == pytest.approx(expect, rel=1e-12), (spec.spec_id, n)

    def test_multiplicativity_on_random_coprime_pairs(self):
        rng = random.Random(123)
        prime_vals = {int(p): rng.uniform(0, 2) for p in primes.get_prime_set(10**4).primes}
        spec = mc.MultSpec(prime_rule=prime_vals, completion=mc.COMPLETELY_MULTIPLICATIVE)
        t = mc.sieve_values(spec, 10**4)
        checked = 0
        while checked < 10**4:
            m = rng.randint(2, 100)
            n = rng.randint(2, 10**4 // m)
            if math.gcd(m, n) != 1:
                continue
            assert t.values[m * n] == pytest.approx(t.values[m] * t.values[n], rel=1e-12)
            checked += 1


class TestDirichletConvolve:
    def test_divisor_count_at_six(self):
        one = mc.sieve_values(one_spec(), 10)
        d = mc.dirichlet_convolve(one, one)
        assert d.values[6] == 4
        assert d.values[1:] == [1, 2, 2, 3, 2, 4, 2, 4, 3, 4]

    def test_mobius_inversion_gives_unit(self):
        L = 200
        one = mc.sieve_values(one_spec(), L)
        mob = mc.sieve_values(mobius_spec(), L)
        eps = mc.dirichlet_convolve(mob, one)
        assert eps.values[1] == 1
        assert all(v == 0 for v in eps.values[2:])

    def test_unit_is_identity(self):
        mob = mc.sieve_values(mobius_spec(), 64)
        eps = mc.identity_table(64)
        assert mc.dirichlet_convolve(mob, eps).values == mob.values

    def test_limit_mismatch_rejected(self):
        with pytest.raises(ValueError):
            mc.dirichlet_convolve(mc.identity_table(5), mc.identity_table(6))

    @given(st.integers(min_value=2, max_value=40), st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=25, deadline=None)
    def test_commutative_and_associative(self, L, seed):
        rng = random.Random(seed)
        def rand_table():
            return mc.SieveTable(L, [0] + [rng.randint(-5, 5) for _ in range(L)], exact=True)
        f, g, h = rand_table(), rand_table(), rand_table()
        fg = mc.dirichlet_convolve(f, g)
        gf = mc.dirichlet_convolve(g, f)
        assert fg.values == gf.values
        lhs = mc.dirichlet_convolve(fg, h)
        rhs = mc.dirichlet_convolve(f, mc.dirichlet_convolve(g, h))
        assert lhs.values == rhs.values


class TestPartialSums:
    def test_counting(self):
        t = mc.sieve_values(one_spec(), 20)
        assert mc.mean_sum(t, 10.5) == 10

    def test_two_log_terms(self):
        t = mc.sieve_values(one_spec(), 5)
        assert mc.log_weighted_sum(t, 3) == pytest.approx(math.log(6), rel=1e-12)

    def test_mobius_mean(self):
        t = mc.sieve_values(mobius_spec(), 10)
        assert mc.mean_sum(t, 10) == -1

    def test_beyond_limit_rejected(self):
        t = mc.sieve_values(one_spec(), 10)
        with pytest.raises(ValueError):
            mc.mean_sum(t, 11)


class TestPartialSummationResidual:
    def test_single_term(self):
        t = mc.sieve_values(one_spec(), 5)
        assert abs(mc.partial_summation_residual(t, 2)) < 1e-12

    def test_constant_function_to_100(self):
        t = mc.sieve_values(one_spec(), 100)
        assert abs(mc.partial_summation_residual(t, 100)) < 1e-9

    def test_mobius_to_1000(self):
        t = mc.sieve_values(mobius_spec(), 1000)
        assert abs(mc.partial_summation_residual(t, 1000)) < 1e-9

    def test_noninteger_endpoint(self):
        t = mc.sieve_values(mobius_spec(), 1000)
        assert abs(mc.partial_summation_residual(t, 997.35)) < 1e-9

    def test_below_two_rejected(self):
        t = mc.sieve_values(one_spec(), 10)
        with pytest.raises(ValueError):
            mc.partial_summation_residual(t, 1.5)

    def test_bounded_tables_high_u(self):
        rng = random.Random(5)
        for completion in (mc.ZERO_BEYOND_FIRST, mc.COMPLETELY_MULTIPLICATIVE, mc.EXPONENTIAL):
            vals = {int(p): rng.uniform(0, 2) for p in primes.get_prime_set(10**5).primes}
            spec = mc.MultSpec(prime_rule=vals, completion=completion)
            t = mc.sieve_values(spec, 10**5)
            assert abs(mc.partial_summation_residual(t, 10**5)) < 1e-9


class TestMeanBound:
    def test_constant_function_at_100(self):
        t = mc.sieve_values(one_spec(), 100)
        res = mc.mean_bound_evaluate(t, 100)
        assert res.lhs == pytest.approx(99.0)
        assert res.rhs > 300
        assert res.holds

    def test_zero_on_primes(self):
        spec = mc.MultSpec(prime_rule=lambda p: 0, completion=mc.COMPLETELY_MULTIPLICATIVE, exact=True)
        t = mc.sieve_values(spec, 100)
        res = mc.mean_bound_evaluate(t, 100)
        assert res.lhs == 0.0
        assert res.rhs == 0.0
        assert res.holds

    def test_negative_table_rejected(self):
        t = mc.sieve_values(mobius_spec(), 100)
        with pytest.raises(ValueError):
            mc.mean_bound_evaluate(t, 100)

    def test_small_x_rejected(self):
        t = mc.sieve_values(one_spec(), 100)
        with pytest.raises(ValueError):
            mc.mean_bound_evaluate(t, 1.5)

    def test_random_nonnegative_specs_never_violate(self):
        rng = random.Random(20260809)
        ps = primes.get_prime_set(10**4)
        for trial in range(100):
            completion = (mc.ZERO_BEYOND_FIRST, mc.COMPLETELY_MULTIPLICATIVE, mc.EXPONENTIAL)[trial % 3]
            vals = {int(p): rng.uniform(0, 2) for p in ps.primes}
            spec = mc.MultSpec(prime_rule=vals, completion=completion)
            t = mc.sieve_values(spec, 10**4)
            res = mc.mean_bound_evaluate(t, 10**4)
            assert res.holds, f"trial {trial}"


class TestRatioMonitors:
    def test_constant_function_ratio_stable(self):
        t = mc.sieve_values(one_spec(), 10**4)
        r4 = mc.harmonic_product_ratio(t, 10**4)
        r3 = mc.harmonic_product_ratio(t, 10**3)
        assert 0.5 <= r4 <= 2.0
        assert abs(r4 / r3 - 1.0) < 0.05

    def test_trivial_beyond_one(self):
        spec = mc.MultSpec(prime_rule=lambda p: 0, completion=mc.COMPLETELY_MULTIPLICATIVE, exact=True)
        t = mc.sieve_values(spec, 100)
        assert mc.harmonic_product_ratio(t, 100) == pytest.approx(1.0)

    def test_half_density_ratio_stable(self):
        spec = mc.MultSpec(prime_rule=lambda p: 0.5, completion=mc.ZERO_BEYOND_FIRST, spec_id="half")
        t = mc.sieve_values(spec, 10**4)
        r4 = mc.harmonic_product_ratio(t, 10**4)
        r3 = mc.harmonic_product_ratio(t, 10**3)
        assert abs(r4 / r3 - 1.0) < 0.10

    def test_lower_bound_constant_function(self):
        t = mc.sieve_values(one_spec(), 10**4)
        res = mc.mean_lower_ratio(t, 10**4)
        assert res.ratio == pytest.approx(1.0, abs=1e-3)
        assert res.c_empirical == pytest.approx(1.0, abs=0.1)

    def test_lower_bound_residue_class_indicator(self):
        spec = mc.MultSpec(
            prime_rule=lambda p: 1 if p % 4 == 1 else 0,
            completion=mc.COMPLETELY_MULTIPLICATIVE,
            exact=True,
        )
        t = mc.sieve_values(spec, 10**5)
        r5 = mc.mean_lower_ratio(t, 10**5)
        r4 = mc.mean_lower_ratio(t, 10**4)
        assert r5.ratio > 0 and r4.ratio > 0
        assert abs(r5.ratio / r4.ratio - 1.0) < 0.2

    def test_lower_bound_three_quarters(self):
        spec = mc.MultSpec(prime_rule=lambda p: 0.75, completion=mc.COMPLETELY_MULTIPLICATIVE)
        t = mc.sieve_values(spec, 10**5)
        r5 = mc.mean_lower_ratio(t, 10**5)
        r4 = mc.mean_lower_ratio(t, 10**4)
        assert r5.ratio > 0
        assert abs(r5.ratio / r4.ratio - 1.0) < 0.2


class TestCsvRoundTrip:
    def test_exact_roundtrip(self, tmp_path):
        t = mc.sieve_values(mobius_spec(), 100)
        path = str(tmp_path / "mobius.csv")
        mc.save_table_csv(t, path)
        back = mc.load_table_csv(path)
        assert back.values == t.values
        assert back.spec_id == "mobius"
        assert back.exact

    def test_float_roundtrip(self, tmp_path):
        spec = mc.MultSpec(prime_rule=lambda p: 0.5, completion=mc.ZERO_BEYOND_FIRST, spec_id="half")
        t = mc.sieve_values(spec, 50)
        path = str(tmp_path / "half.csv")
        mc.save_table_csv(t, path)
        back = mc.load_table_csv(path)
        assert np.array_equal(back.as_float_array(), t.as_float_array())
        assert not back.exact

    def test_fraction_roundtrip(self, tmp_path):
        spec = mc.MultSpec(prime_rule=lambda p: 2, completion=mc.EXPONENTIAL, exact=True, spec_id="exp2")
        t = mc.sieve_values(spec, 30)
        path = str(tmp_path / "exp2.csv")
        mc.save_table_csv(t, path)
        back = mc.load_table_csv(path)
        assert back.values == t.values
