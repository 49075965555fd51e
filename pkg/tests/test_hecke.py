import math
import random
from fractions import Fraction

import numpy as np
import pytest

from meanmult import hecke
from meanmult import primes

# first discriminant-form coefficients, long since hand-checked in print
KNOWN = {1: 1, 2: -24, 3: 252, 4: -1472, 5: 4830, 6: -6048, 7: -16744, 8: 84480, 9: -113643, 10: -115920}


class TestEtaExpansion:
    def test_limit_one(self):
        t = hecke.eta24_expand(1)
        assert t.a[1] == 1

    def test_first_values(self):
        t = hecke.eta24_expand(10)
        for n, v in KNOWN.items():
            assert t.a[n] == v

    def test_congruence_against_divisor_sums(self, tau_1e4):
        s11 = hecke.sigma_power_mod(10**4, 11, 691)
        for n in range(1, 10**4 + 1):
            assert tau_1e4.a[n] % 691 == int(s11[n]), n

    def test_invalid_limit(self):
        with pytest.raises(ValueError):
            hecke.eta24_expand(0)


class TestHeckeExtend:
    def test_single_recurrence_step(self):
        t = hecke.hecke_extend({2: -24, 3: 252}, 12, 4)
        assert t.a[4] == (-24) ** 2 - 2**11 == -1472

    def test_multiplicativity_step(self):
        t = hecke.hecke_extend({2: -24, 3: 252, 5: 4830}, 12, 6)
        assert t.a[6] == -24 * 252 == -6048

    def test_chebyshev_boundary(self):
        # normalized a_p = 2: a(p^j) = j + 1
        pv = {int(p): 2 for p in primes.get_prime_set(64).primes}
        t = hecke.hecke_extend(pv, "normalized", 64)
        for j in range(1, 7):
            assert t.a[2**j] == j + 1

    def test_oracle_equivalence_at_1e4(self, tau_1e4):
        pv = hecke.prime_coefficients(tau_1e4)
        ext = hecke.hecke_extend(pv, 12, 10**4)
        assert ext.a == tau_1e4.a

    def test_missing_prime_named(self):
        with pytest.raises(ValueError, match="prime 5"):
            hecke.hecke_extend({2: 1, 3: 1}, "normalized", 10)

    def test_bad_weight_rejected(self):
        with pytest.raises(ValueError):
            hecke.hecke_extend({2: 1}, 11, 4)


class TestMultiplicativity:
    def test_random_coprime_pairs(self, tau_1e5):
        rng = random.Random(42)
        checked = 0
        while checked < 10**4:
            m = rng.randint(2, 316)
            n = rng.randint(2, 10**5 // m)
            if math.gcd(m, n) != 1:
                continue
            assert tau_1e5.a[m * n] == tau_1e5.a[m] * tau_1e5.a[n]
            checked += 1


class TestNormalize:
    def test_leading(self, tau_1e4):
        nc = hecke.normalize(tau_1e4)
        assert nc.ahat[1] == 1.0

    def test_second_value(self, tau_1e4):
        nc = hecke.normalize(tau_1e4)
        assert nc.ahat[2] == pytest.approx(-24 / 2**5.5, rel=1e-12)
        assert nc.ahat[2] == pytest.approx(-0.530330, abs=1e-6)

    def test_prime_values_within_two(self, tau_1e4):
        nc = hecke.normalize(tau_1e4)
        prs = primes.get_prime_set(10**4).primes
        assert float(np.max(np.abs(nc.ahat[prs]))) <= 2.0

    def test_sign_preserved(self, tau_1e4):
        nc = hecke.normalize(tau_1e4)
        for n in range(1, 10**4 + 1):
            assert np.sign(nc.ahat[n]) == np.sign(tau_1e4.a[n])

    def test_normalized_passthrough(self):
        t = hecke.hecke_extend({2: 2, 3: 2, 5: 2, 7: 2}, "normalized", 10)
        nc = hecke.normalize(t)
        assert nc.ahat[8] == 4.0


class TestSignAndIndicator:
    def test_known_signs(self, tau_1e4):
        s = hecke.sign_function(tau_1e4)
        assert s.values[2] == -1
        assert s.values[3] == 1

    def test_sign_times_abs_recovers(self, tau_1e4):
        s = hecke.sign_function(tau_1e4)
        for n in range(1, 10**4 + 1):
            assert int(s.values[n]) * abs(tau_1e4.a[n]) == tau_1e4.a[n]

    def test_all_positive_table(self):
        t = hecke.hecke_extend({2: 2, 3: 2, 5: 2, 7: 2}, "normalized", 10)
        s = hecke.sign_function(t)
        assert all(v == 1 for v in s.values[1:])

    def test_zero_propagation(self):
        # a_2 = 0 with the normalized recurrence: a_4 = -1, a_8 = 0 ...
        t = hecke.hecke_extend({2: 0, 3: 1, 5: 1, 7: 1}, "normalized", 10)
        ind = hecke.nonvanish_indicator(t)
        assert ind.values[2] == 0
        assert ind.values[4] == 1
        assert ind.values[6] == 0

    def test_indicator_all_ones_for_nonvanishing(self, tau_1e4):
        ind = hecke.nonvanish_indicator(tau_1e4)
        assert int(np.sum(ind.values[1:])) == 10**4


class TestCoeffFileIO:
    def test_roundtrip(self, tau_1e4, tmp_path):
        small = hecke.eta24_expand(100)
        path = str(tmp_path / "coeffs.csv")
        hecke.save_coeff_table(small, path)
        back = hecke.load_coeff_table(path, 12)
        assert back.a == small.a
        assert back.source_sha256 is not None

    def test_rejects_wrong_leading_value(self, tmp_path):
        path = str(tmp_path / "bad1.csv")
        with open(path, "w") as fh:
            fh.write("n,a_n\n1,2\n2,4\n")
        with pytest.raises(ValueError, match="a_1"):
            hecke.load_coeff_table(path, "normalized")

    def test_rejects_multiplicativity_violation(self, tmp_path):
        small = hecke.eta24_expand(100)
        rows = list(small.a)
        rows[6] = rows[6] + 1
        path = str(tmp_path / "bad2.csv")
        with open(path, "w") as fh:
            fh.write("n,a_n\n")
            for n in range(1, 101):
                fh.write(f"{n},{rows[n]}\n")
        with pytest.raises(ValueError, match=r"coprime pair \(\d+,\d+\)"):
            hecke.load_coeff_table(path, 12)

    def test_rejects_gap(self, tmp_path):
        path = str(tmp_path / "bad3.csv")
        with open(path, "w") as fh:
            fh.write("n,a_n\n1,1\n3,5\n")
        with pytest.raises(ValueError, match="line 3"):
            hecke.load_coeff_table(path, "normalized")

    def test_rejects_parse_error_with_line(self, tmp_path):
        path = str(tmp_path / "bad4.csv")
        with open(path, "w") as fh:
            fh.write("n,a_n\n1,1\n2,spam\n")
        with pytest.raises(ValueError, match="line 3"):
            hecke.load_coeff_table(path, "normalized")

    def test_rejects_wrong_declared_recurrence(self, tmp_path):
        # weight-12 data declared as normalized must fail the recurrence check
        small = hecke.eta24_expand(50)
        path = str(tmp_path / "bad5.csv")
        hecke.save_coeff_table(small, path)
        with pytest.raises(ValueError, match="recurrence"):
            hecke.load_coeff_table(path, "normalized")

    def test_rational_values(self, tmp_path):
        path = str(tmp_path / "rational.csv")
        with open(path, "w") as fh:
            fh.write("n,a_n\n1,1\n2,1/2\n3,1/3\n4,-3/4\n")
        t = hecke.load_coeff_table(path, "normalized")
        assert t.a[2] == Fraction(1, 2)
        assert t.a[4] == Fraction(-3, 4)


class TestMomentSum:
    def test_zero_coefficients(self):
        t = hecke.hecke_extend({2: 0, 3: 0, 5: 0, 7: 0}, "normalized", 10)
        nc = hecke.normalize(t)
        assert hecke.moment_sum(nc, 10, 2, "1/p") == 0.0

    def test_matches_direct_loop(self, tau_1e4):
        nc = hecke.normalize(tau_1e4)
        prs = primes.get_prime_set(10**4).primes_upto(10**3)
        expect = math.fsum(abs(float(nc.ahat[p])) ** 4 * math.log(int(p)) for p in prs)
        assert hecke.moment_sum(nc, 10**3, 4, "logp") == pytest.approx(expect, rel=1e-12)

    def test_validation(self, tau_1e4):
        nc = hecke.normalize(tau_1e4)
        with pytest.raises(ValueError):
            hecke.moment_sum(nc, 10, 3, "logp")
        with pytest.raises(ValueError):
            hecke.moment_sum(nc, 10, 2, "log")
        with pytest.raises(ValueError):
            hecke.moment_sum(nc, 10**5, 2, "logp")
