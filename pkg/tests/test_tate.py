import random
from fractions import Fraction

import pytest

from hahndisk.errors import (
    ConfigError,
    ExponentError,
    IndeterminateFromPrecisionError,
    UnresolvedError,
)
from hahndisk.series import TruncatedSeries
from hahndisk.tate import (
    SubstitutionMap,
    TateRing,
    disk_seminorm,
    finite_approx,
    is_integral,
    project,
    type_ii_lower_bound,
)


@pytest.fixture(scope="module")
def ring1(ground):
    return TateRing(ground, 1)


def rand_tate(rng, ring, max_terms=8, nonzero=True):
    """Random element with nonnegative variable exponents."""
    while True:
        terms = {}
        for _ in range(rng.randint(1, max_terms)):
            t_exp = Fraction(rng.randint(-10, 10), 3 ** rng.randint(0, 2))
            x_exps = tuple(
                Fraction(rng.randint(0, 9), 3 ** rng.randint(0, 2))
                for _ in range(ring.nvars)
            )
            terms[(t_exp,) + x_exps] = rng.randint(1, 2)
        prec = None if rng.random() < 0.5 else Fraction(rng.randint(6, 15))
        f = TruncatedSeries(ring.profile, terms, prec)
        if f.terms or not nonzero:
            return f


class TestRingConstraints:
    def test_negative_variable_exponent_rejected(self, ring1):
        with pytest.raises(ExponentError):
            ring1.monomial(1, 0, (Fraction(-1),))

    def test_integrality(self, ring1):
        assert is_integral(ring1.monomial(1, 0, (Fraction(1, 3),)))
        assert not is_integral(ring1.monomial(1, Fraction(-1, 3), (1,)))
        assert not is_integral(ring1.zero(precision=Fraction(-1)))

    def test_projection_drops_higher_variables(self, ground, ring3, ring1):
        f = ring3.monomial(1, 0, (1, 0, 0)) + ring3.monomial(1, 1, (0, 0, 2))
        g = project(f, ring1)
        assert g == ring1.monomial(1, 0, (1,))


class TestDiskSeminorm:
    def test_single_variable(self, ring1):
        f = ring1.var(1)
        assert disk_seminorm(f, (Fraction(1, 2),)) == Fraction(1, 2)

    def test_two_term_comparison(self, ring1):
        f = ring1.monomial(1, 1, (1,)) + ring1.monomial(1, 0, (2,))
        assert disk_seminorm(f, (Fraction(1, 2),)) == 1

    def test_constant_has_gauss_value_zero(self, ring1):
        assert disk_seminorm(ring1.one(), (Fraction(7, 9),)) == 0

    def test_indeterminate_when_floor_hides_minimum(self, ring1):
        # candidate value 2 + 1*2 = 4 is not below the precision floor 3
        f = ring1.monomial(1, 2, (1,), precision=3)
        with pytest.raises(IndeterminateFromPrecisionError):
            disk_seminorm(f, (Fraction(2),))
        with pytest.raises(IndeterminateFromPrecisionError):
            disk_seminorm(ring1.zero(precision=3), (Fraction(2),))

    def test_multiplicative_and_ultrametric(self, ring1):
        rng = random.Random(6)
        for _ in range(200):
            f = rand_tate(rng, ring1)
            g = rand_tate(rng, ring1)
            rho = (Fraction(rng.randint(0, 6), rng.randint(1, 6)),)
            try:
                sf = disk_seminorm(f, rho)
                sg = disk_seminorm(g, rho)
                sfg = disk_seminorm(f * g, rho)
                ssum = disk_seminorm(f + g, rho)
            except IndeterminateFromPrecisionError:
                continue
            assert sfg == sf + sg
            assert ssum >= min(sf, sg)


class TestFiniteApprox:
    def test_cutoff_below_everything(self, ring1):
        f = ring1.monomial(1, 2, (1,))
        assert finite_approx(f, 1).is_zero

    def test_cutoff_above_everything(self, ring1):
        f = ring1.monomial(1, 2, (1,)) + ring1.one()
        g = finite_approx(f, 5)
        assert g.terms == f.terms

    def test_mixed_split(self, ring1):
        f = ring1.monomial(1, 3, (1,)) + ring1.monomial(2, 1, (2,))
        g = finite_approx(f, 2)
        assert g == ring1.monomial(2, 1, (2,))

    def test_difference_guarantee(self, ring1):
        rng = random.Random(14)
        for _ in range(200):
            f = rand_tate(rng, ring1)
            if f.precision is not None:
                continue  # guarantee is stated for fully resolved inputs
            v_eps = Fraction(rng.randint(-4, 8), rng.randint(1, 4))
            g = finite_approx(f, v_eps)
            diff = f - g
            for rho in (Fraction(0), Fraction(1), Fraction(5, 9)):
                try:
                    val = disk_seminorm(diff, (rho,))
                except IndeterminateFromPrecisionError:
                    continue
                if val is None:
                    continue  # exact zero difference
                assert val > v_eps


class TestTypeIILowerBound:
    def test_plain_variable(self, ring1):
        f = ring1.var(1)
        assert type_ii_lower_bound(f, 1) == 1
        assert disk_seminorm(f, (Fraction(1),)) == 1

    def test_chooses_smaller_term(self, ring1):
        f = ring1.embed_ground(ring1.ground.uniformizer_power(1)) + ring1.var(1)
        assert type_ii_lower_bound(f, 2) == 1

    def test_fractional_exponent(self, ring1):
        f = ring1.monomial(1, 0, (Fraction(1, 3),)) + ring1.var(1)
        assert type_ii_lower_bound(f, 1) == Fraction(1, 3)

    def test_rejects_generic_radius(self, ring1):
        with pytest.raises(ConfigError):
            type_ii_lower_bound(ring1.var(1), Fraction(1, 2))

    def test_unresolved(self, ring1):
        with pytest.raises(UnresolvedError):
            type_ii_lower_bound(ring1.zero(precision=2), 1)


class TestSubstitution:
    def make_sub(self, plan, residue, ring3):
        from hahndisk.builder import standard_substitution

        return standard_substitution(plan, residue, ring3)

    def test_first_generator(self, plan, residue, ring3):
        sub = self.make_sub(plan, residue, ring3)
        assert sub.apply(ring3.var(1)) == residue.x_power(1)

    def test_product_relation_hits_constant(self, plan, residue, ring3):
        sub = self.make_sub(plan, residue, ring3)
        got = sub.apply(ring3.var(1) * ring3.var(2))
        assert got == residue.monomial(1, plan.v_c, 0)

    def test_fractional_power_via_root(self, plan, residue, ring3):
        sub = self.make_sub(plan, residue, ring3)
        f = ring3.monomial(1, 0, (Fraction(1, 3), 0, 0))
        assert sub.apply(f) == residue.x_power(Fraction(1, 3))

    def test_homomorphism_to_precision(self, plan, residue, ring3):
        rng = random.Random(9)
        sub = self.make_sub(plan, residue, ring3)
        wp = plan.config.work_prec
        for _ in range(40):
            f = rand_tate(rng, ring3, max_terms=4)
            g = rand_tate(rng, ring3, max_terms=4)
            lhs = sub.apply(f * g, wp)
            rhs = sub.apply(f, wp) * sub.apply(g, wp)
            diff = lhs - rhs
            assert not diff.terms

    def test_integral_maps_to_nonnegative_valuation(self, plan, residue, ring3):
        rng = random.Random(10)
        sub = self.make_sub(plan, residue, ring3)
        for _ in range(60):
            f = rand_tate(rng, ring3, max_terms=4)
            if not is_integral(f):
                continue
            val = sub.apply(f, plan.config.work_prec).val_lower()
            assert val is None or val >= 0

    def test_rejects_unbounded_images(self, residue, ring3):
        bad = residue.monomial(1, -1, 0)
        with pytest.raises(ConfigError):
            SubstitutionMap(ring3, residue, (bad, bad, bad))

    def test_file_round_trip(self, plan, residue, ring3, tmp_path):
        from hahndisk.tate import load_substitution, save_substitution

        sub = self.make_sub(plan, residue, ring3)
        paths = save_substitution(sub, tmp_path / "images")
        assert [p.name for p in paths] == ["image_1.txt", "image_2.txt", "image_3.txt"]
        back = load_substitution(ring3, residue, paths)
        assert back.images == sub.images
