from fractions import Fraction

import numpy as np
import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from paratwistor import tensor_core as tc
from paratwistor.base_curvature import build_space_form

small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


def exact_matrix(rows):
    return tc.as_array([[Fraction(v) for v in row] for row in rows])


@st.composite
def square_matrices(draw, dim=4):
    return [[draw(small) for _ in range(dim)] for _ in range(dim)]


class TestModes:
    def test_default_exact(self):
        assert tc.current_mode() == "exact"
        assert isinstance(tc.scalar("3/4"), type(mpq(1)))

    def test_float_rejected_in_exact(self):
        with pytest.raises(TypeError):
            tc.scalar(0.5)

    def test_float_mode(self, float_mode):
        assert tc.scalar("1/4") == 0.25
        assert tc.zeros((2, 2)).dtype == float

    def test_unknown_mode(self):
        with pytest.raises(ValueError):
            with tc.use_mode("double"):
                pass

    def test_tolerance_only_in_float(self, float_mode):
        assert tc.is_zero(1e-12)
        assert not tc.is_zero(1e-8)


class TestSpaces:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_neutral_signature(self, n):
        space = tc.make_neutral_space(n)
        assert space.dim == 4 * n
        assert space.signature == (2 * n, 2 * n)

    def test_rejects_zero(self):
        with pytest.raises(ValueError):
            tc.make_neutral_space(0)

    def test_inner(self):
        space = tc.make_neutral_space(1)
        assert space.inner([1, 0, 0, 0], [1, 0, 0, 0]) == -1
        assert space.inner([0, 0, 1, 1], [0, 0, 1, 1]) == 2

    def test_frame_signs_need_diagonal(self):
        space = tc.PseudoEuclideanSpace(exact_matrix([[0, 1], [1, 0]]))
        assert not space.is_diagonal
        with pytest.raises(ValueError):
            space.frame_signs


class TestLinearAlgebra:
    @given(square_matrices())
    @settings(max_examples=40, deadline=None)
    def test_exact_inverse(self, rows):
        m = exact_matrix(rows)
        try:
            inv = tc.exact_inverse(m)
        except ZeroDivisionError:
            det = np.linalg.det(np.array(rows, dtype=float))
            assert abs(det) < 1e-9
            return
        assert tc.all_zero(m @ inv - tc.identity(4))

    @given(square_matrices(), square_matrices(), st.integers(0, 3))
    @settings(max_examples=25, deadline=None)
    def test_apply_endomorphism_matches_loops(self, trows, srows, axis):
        # a random 4-tensor built from the matrix entries
        t = tc.as_array(
            [[[[trows[a][b] * trows[c][d] + a - d for d in range(4)] for c in range(4)] for b in range(4)] for a in range(4)]
        )
        s = exact_matrix(srows)
        got = tc.apply_endomorphism(t, s, axis)
        tn, sn = oracles.to_nested(t), oracles.to_nested(s)
        for idx in np.ndindex(4, 4, 4, 4):
            want = 0
            for a in range(4):
                moved = list(idx)
                moved[axis] = a
                want += sn[a][idx[axis]] * tn[moved[0]][moved[1]][moved[2]][moved[3]]
            assert oracles.frac(got[idx]) == want

    def test_block_sum(self):
        a = exact_matrix([[1]])
        b = exact_matrix([[2, 3], [4, 5]])
        out = tc.block_sum(a, b)
        assert oracles.to_nested(out) == [[1, 0, 0], [0, 2, 3], [0, 4, 5]]

    def test_worst_entry(self):
        where, value = tc.worst_entry(exact_matrix([[0, -3], [2, 3]]))
        assert where == (0, 1) and value == -3

    def test_proportionality(self):
        g = tc.make_neutral_space(1).metric
        assert tc.proportionality(3 * g, g) == 3
        bumped = 3 * g
        bumped[0, 1] = 1
        assert tc.proportionality(bumped, g) is None


class TestSymmetryValidator:
    def test_zero_tensor(self):
        assert tc.validate_curvature_symmetries(tc.zeros((4, 4, 4, 4))) == []

    def test_space_form(self):
        assert tc.validate_curvature_symmetries(build_space_form(2, 16).R) == []

    def test_single_entry_names_first_antisymmetry(self):
        r = tc.zeros((4, 4, 4, 4))
        r[0, 1, 2, 3] = 1
        names = [v.identity for v in tc.validate_curvature_symmetries(r)]
        assert names[0] == "R(a,b,c,d) = -R(b,a,c,d)"
        assert "R(a,b,c,d) = R(c,d,a,b)" in names

    def test_pair_symmetry_violation_with_witness(self):
        # antisymmetric in both pairs, but R(c,d,a,b) is zero
        r = tc.zeros((4, 4, 4, 4))
        r[0, 1, 2, 3] = r[1, 0, 3, 2] = 1
        r[1, 0, 2, 3] = r[0, 1, 3, 2] = -1
        report = tc.validate_curvature_symmetries(r)
        pair = [v for v in report if v.identity == "R(a,b,c,d) = R(c,d,a,b)"]
        assert [v.identity for v in report][0] == "R(a,b,c,d) = R(c,d,a,b)"
        assert pair[0].witness == (0, 1, 2, 3)
        assert pair[0].residual == 1
        assert pair[0].as_dict() == {"identity": "R(a,b,c,d) = R(c,d,a,b)", "witness": [0, 1, 2, 3], "residual": "1"}

    def test_bianchi_only_violation(self):
        # the totally antisymmetric tensor has all pair symmetries but fails Bianchi
        r = tc.zeros((4, 4, 4, 4))
        for perm in [(0, 1, 2, 3), (0, 2, 3, 1), (0, 3, 1, 2)]:
            for p, s in _signed_perms(perm):
                r[p] = s
        names = [v.identity for v in tc.validate_curvature_symmetries(r)]
        assert names == ["first Bianchi"]


def _signed_perms(base):
    """All 24 reorderings of ``base`` with the permutation sign."""
    import itertools

    out = []
    for perm in itertools.permutations(range(4)):
        inv = sum(1 for i in range(4) for j in range(i + 1, 4) if perm[i] > perm[j])
        out.append((tuple(base[k] for k in perm), (-1) ** inv))
    return out


class TestContractions:
    def test_zero_tensor(self):
        space = tc.make_neutral_space(2)
        z = tc.zeros((8, 8, 8, 8))
        assert tc.all_zero(tc.ricci_contract(z, space))
        assert tc.all_zero(tc.star_ricci_contract(z, tc.identity(8), space))

    def test_space_form_ricci_against_loop_oracle(self):
        model = build_space_form(2, 16)
        g = oracles.neutral_metric_diag(2)
        want = oracles.ricci(oracles.to_nested(model.R), g)
        assert oracles.to_nested(tc.ricci_contract(model.R, model.space)) == want
        assert want == [[2 * g[i] if i == j else 0 for j in range(8)] for i in range(8)]

    def test_star_ricci_against_loop_oracle(self):
        model = build_space_form(2, 16)
        g = oracles.neutral_metric_diag(2)
        for j in model.triple.J:
            got = tc.star_ricci_contract(model.R, j, model.space)
            assert oracles.to_nested(got) == oracles.star_ricci(oracles.to_nested(model.R), oracles.to_nested(j), g)

    def test_ricci_linear(self):
        model = build_space_form(2, 16)
        a = tc.ricci_contract(model.R, model.space)
        b = tc.ricci_contract(3 * model.R, model.space)
        assert tc.all_zero(b - 3 * a)

    @pytest.mark.parametrize("scale, expected", [(1, 8), (2, 16), (0, 0)])
    def test_scalar_curvature(self, scale, expected):
        space = tc.make_neutral_space(2)
        assert tc.scalar_curvature(scale * space.metric, space) == expected

    def test_dimension_mismatch(self):
        space = tc.make_neutral_space(1)
        with pytest.raises(ValueError):
            tc.ricci_contract(tc.zeros((8, 8, 8, 8)), space)
        with pytest.raises(ValueError):
            tc.star_ricci_contract(tc.zeros((4, 4, 4, 4)), tc.identity(8), space)
        with pytest.raises(ValueError):
            tc.scalar_curvature(tc.zeros((8, 8)), space)

    def test_ricci_sign_pinned(self):
        assert tc.RICCI_SIGN == -1

    def test_deterministic(self):
        r1 = build_space_form(3, -24).R
        r2 = build_space_form(3, -24).R
        assert [str(v) for v in r1.ravel()] == [str(v) for v in r2.ravel()]
