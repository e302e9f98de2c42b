from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ballspace import (
    PLUS_INFINITY,
    CkFunction,
    CkInfFunction,
    OtFunction,
    PreconditionError,
    StructureError,
    check_metric_axioms,
    check_ot_axioms,
    ck_to_ot,
    generate_ot,
    ot_elements,
    restrict_ckinf,
)
from ballspace.functions import LSC_NOTE, generate_instance, shortest_path_closure
from ballspace.instance import InstanceFile, serialize_instance


def subadditivity_oracle(m):
    n = len(m)
    bad = []
    for x, z, y in product(range(n), repeat=3):
        a, b = m[x][z], m[z][y]
        rhs = PLUS_INFINITY if PLUS_INFINITY in (a, b) else a + b
        if m[x][y] is PLUS_INFINITY and rhs is not PLUS_INFINITY:
            bad.append((x, z, y))
        elif m[x][y] is not PLUS_INFINITY and rhs is not PLUS_INFINITY and m[x][y] > rhs:
            bad.append((x, z, y))
    return bad


class TestCheckOtAxioms:
    def test_ck_embedding_is_clean(self, tri):
        space, _, phi = tri
        report = check_ot_axioms(phi, space)
        assert report.ok
        assert report.lsc == LSC_NOTE

    def test_zero_function(self, tri):
        space, _, _ = tri
        assert check_ot_axioms([[0] * 3] * 3, space).ok

    def test_truncated_counterexample_violates_c(self, truncated):
        space, phi = truncated
        report = check_ot_axioms(phi, space)
        # brute force over all 64 triples
        assert [v.witness for v in report.violations] == subadditivity_oracle(phi.values)
        assert report.violations[0].condition == "(c)"
        assert report.violations[0].witness == (0, 1, 2)
        assert "-1" in report.violations[0].detail

    def test_nonzero_diagonal(self, tri):
        space, _, _ = tri
        report = check_ot_axioms([[1, 0, 0], [0, 0, 0], [0, 0, 0]], space)
        assert ("(b)", (0,)) in [(v.condition, v.witness) for v in report.violations]

    def test_dimension_mismatch(self, tri):
        space, _, _ = tri
        with pytest.raises(StructureError):
            check_ot_axioms([[0, 0], [0, 0]], space)

    def test_infinite_entries(self, tri):
        space, _, _ = tri
        inf = PLUS_INFINITY
        report = check_ot_axioms([[0, inf, inf], [inf, 0, inf], [inf, inf, 0]], space)
        assert report.ok
        report = check_ot_axioms([[0, inf, 1], [0, 0, 0], [0, 0, 0]], space)
        assert [v.witness for v in report.violations] == subadditivity_oracle(
            OtFunction(((0, inf, 1), (0, 0, 0), (0, 0, 0))).values
        )

    @given(st.integers(1, 4).flatmap(lambda n: st.lists(
        st.lists(st.one_of(st.integers(-3, 3), st.just("inf")), min_size=n, max_size=n),
        min_size=n, max_size=n)))
    def test_agrees_with_oracle(self, rows):
        n = len(rows)
        for i in range(n):
            rows[i][i] = 0
        from ballspace import FiniteMetricSpace
        space = FiniteMetricSpace.on_line(range(n))
        phi = OtFunction(rows)
        assert [v.witness for v in check_ot_axioms(phi, space).violations] == subadditivity_oracle(phi.values)


class TestOtElements:
    def test_ck_embedding(self, tri):
        _, _, phi = tri
        elems = ot_elements(phi)
        assert set(elems) == {0, 1, 2}
        assert elems[0] == -3

    def test_zero_and_single(self):
        assert ot_elements(OtFunction([[0, 0], [0, 0]])) == {0: 0, 1: 0}
        assert ot_elements(OtFunction([[0]])) == {0: 0}


class TestCkToOt:
    def test_matrix(self, tri):
        _, ck, phi = tri
        assert phi.values == ((0, -2, -3), (2, 0, -1), (3, 1, 0))

    def test_constant_and_single(self):
        assert ck_to_ot(CkFunction((5, 5))).values == ((0, 0), (0, 0))
        assert ck_to_ot(CkFunction((Fraction(7, 3),))).values == ((0,),)

    def test_rejects_infinite_values(self):
        with pytest.raises(StructureError):
            CkFunction((1, "inf"))

    @given(st.lists(st.fractions(-20, 20, max_denominator=6), min_size=1, max_size=6))
    def test_antisymmetric_and_valid(self, vals):
        from ballspace import FiniteMetricSpace
        phi = ck_to_ot(CkFunction(tuple(vals)))
        n = len(vals)
        for x, y in product(range(n), repeat=2):
            assert phi(x, y) + phi(y, x) == 0
        assert check_ot_axioms(phi, FiniteMetricSpace.on_line(range(n))).ok


class TestRestrictCkinf:
    def test_example(self, tri):
        space, _, _ = tri
        members, restricted = restrict_ckinf(CkInfFunction(("inf", 1, 0)), 1, space)
        assert members == (1, 2)
        assert restricted.values == (1, 0)
        sub, _ = space.subspace(members)
        assert check_metric_axioms(sub.dist) == []

    def test_all_finite(self, tri):
        space, _, _ = tri
        members, restricted = restrict_ckinf(CkInfFunction((3, 1, 0)), 0, space)
        assert members == (0, 1, 2)
        assert restricted.values == (3, 1, 0)

    def test_singleton(self, tri):
        space, _, _ = tri
        assert restrict_ckinf(CkInfFunction((3, 1, 0)), 2, space) == ((2,), CkFunction((0,)))

    def test_not_ck_element(self, tri):
        space, _, _ = tri
        with pytest.raises(PreconditionError, match="not a CK element"):
            restrict_ckinf(CkInfFunction(("inf", 1, 0)), 0, space)

    def test_constant_infinity_rejected(self):
        with pytest.raises(StructureError):
            CkInfFunction(("inf", "inf"))


class TestGenerator:
    def test_single_point(self):
        space, phi = generate_ot(5, 1)
        assert len(space) == 1
        assert phi.values == ((0,),)

    @pytest.mark.parametrize("seed", range(1, 41))
    def test_outputs_pass_checkers(self, seed):
        n = 2 + seed % 11
        space, phi = generate_ot(seed, n)
        assert check_metric_axioms(space.dist) == []
        assert check_ot_axioms(phi, space).ok

    def test_deterministic_bytes(self):
        def dump(seed):
            space, phi = generate_ot(seed, 7)
            return serialize_instance(InstanceFile(space.labels, space.dist, ot=phi.values))

        assert dump(11) == dump(11)
        assert dump(11) != dump(12)

    def test_covers_non_ck_instances(self):
        # some generated OT functions are not antisymmetric, i.e. not CK embeddings
        found = False
        for seed in range(1, 20):
            _, phi = generate_ot(seed, 5)
            n = len(phi)
            if any(phi(x, y) != PLUS_INFINITY and phi(y, x) != PLUS_INFINITY and phi(x, y) + phi(y, x) != 0
                   for x in range(n) for y in range(n)):
                found = True
        assert found

    def test_bad_arguments(self):
        with pytest.raises(PreconditionError):
            generate_ot(1, 0)
        with pytest.raises(PreconditionError):
            generate_ot(1, 3, (0, 1))

    def test_instance_bundle(self):
        g = generate_instance(3, 6)
        assert len(g.space) == len(g.ot) == len(g.ck) == len(g.ckinf) == 6
        assert g.ckinf.ck_elements()

    def test_closure_detects_negative_cycle(self):
        closed = shortest_path_closure([[0, -1], [0, 0]])
        assert closed[0][0] < 0


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 8))
def test_generated_pairs_nonnegative(seed, n):
    space, phi = generate_ot(seed, n)
    for x, y in product(range(n), repeat=2):
        s = phi(x, y) + phi(y, x)
        assert s >= 0
