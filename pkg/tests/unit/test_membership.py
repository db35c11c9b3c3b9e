import numpy as np
import pytest

from tpgrass import membership
from tpgrass.exceptions import CertificationError, PreconditionViolationError
from tpgrass.exterior import plucker_vector
from tpgrass.flow import fixed_subspace_E1
from tpgrass.linalg import ScalarMode, rank
from tpgrass.membership import build_flags, classify, in_gr_prime, intersection_dim, is_generic, sign_classify
from tpgrass.models import Ambient, IndexSet, PluckerVector, Subspace
from tpgrass.samplers import random_rational_subspace

EXACT = ScalarMode.exact()


@pytest.fixture()
def crossing_plane() -> Subspace:
    """Plücker vector (1, 1, 0, 0, 1, 1): nonnegative with two vanishing coordinates."""
    return Subspace([[1, 0, 0, -1], [0, 1, 1, 0]])


def test_intersection_dim():
    E = Subspace([[1, 0, 0, 0], [0, 0, 1, 0]])
    assert intersection_dim(E, IndexSet((1, 2))) == 1
    assert intersection_dim(E, IndexSet((2, 4))) == 0
    assert intersection_dim(E, IndexSet((1, 3))) == 2


def test_vandermonde_is_in_gr_prime(vandermonde_24):
    assert in_gr_prime(vandermonde_24) == (True, None)
    assert intersection_dim(vandermonde_24, IndexSet((3, 4))) == 0


def test_coordinate_plane_is_not_in_gr_prime():
    E = Subspace([[1, 0, 0, 0], [0, 1, 0, 0]])
    inside, witness = in_gr_prime(E)
    assert not inside
    assert witness == IndexSet((1, 2))
    assert plucker_vector(E).is_zero_at(witness.complement(4))


def test_gr_prime_witness_pairs_with_vanishing_coordinate(crossing_plane):
    p = plucker_vector(crossing_plane)
    assert p.coords == (1, 1, 0, 0, 1, 1)
    inside, witness = in_gr_prime(crossing_plane)
    assert not inside
    assert witness == IndexSet((1, 4))
    assert p.coordinate(witness.complement(4)) == 0


def test_sign_classify_positive(vandermonde_24):
    signs = sign_classify(plucker_vector(vandermonde_24))
    assert signs.positive and signs.nonnegative and signs.all_nonzero
    assert signs.witness is None
    assert signs.margin == pytest.approx(1 / 7)


def test_sign_classify_nonnegative_with_zeros(crossing_plane):
    signs = sign_classify(plucker_vector(crossing_plane))
    assert signs.nonnegative
    assert not signs.positive and not signs.all_nonzero
    assert signs.witness == IndexSet((1, 4))


def test_sign_classify_mixed_signs():
    signs = sign_classify(PluckerVector(Ambient(3, 1), (1, -1, 1)))
    assert signs.all_nonzero
    assert not signs.positive and not signs.nonnegative
    assert signs.witness == IndexSet((2,))


def test_sign_classify_is_invariant_under_negation(vandermonde_24):
    p = plucker_vector(vandermonde_24)
    assert sign_classify(p.negated()) == sign_classify(p)


def test_sign_classify_respects_floating_tolerance():
    p = PluckerVector(Ambient(3, 1), (1.0, 1e-12, 1.0), ScalarMode.floating(1e-9))
    assert not sign_classify(p).all_nonzero
    strict = PluckerVector(Ambient(3, 1), (1.0, 1e-12, 1.0), ScalarMode.floating(0.0))
    assert sign_classify(strict).positive


def test_build_flags_for_vandermonde(vandermonde_24):
    flags = build_flags(vandermonde_24)
    assert [flags.e(i).k for i in range(1, 4)] == [1, 2, 3]
    assert [flags.e_prime(i).k for i in range(1, 4)] == [1, 2, 3]
    assert flags.e(2) is vandermonde_24
    row = flags.e_prime(1).rows[0]
    assert row[0] == 0
    assert row[2] / row[1] == 3 and row[3] / row[1] == 7


def test_build_flags_for_fixed_subspace():
    E1 = fixed_subspace_E1(3, 2).fixed_subspace
    flags = build_flags(E1)
    assert flags.e(1).k == 1 and flags.e_prime(1).k == 1
    assert flags.e(2) is E1


def test_flag_chains_are_nested(vandermonde_24):
    flags = build_flags(vandermonde_24)
    for chain in (flags.e_chain, flags.e_prime_chain):
        for smaller, larger in zip(chain, chain[1:]):
            stacked = rank(np.vstack([larger.rows, smaller.rows]), EXACT)
            assert stacked == larger.k


def test_build_flags_rejects_start_meeting_first_interval():
    with pytest.raises(PreconditionViolationError) as info:
        build_flags(Subspace([[1, 0, 0, 0], [0, 1, 0, 0]]))
    assert info.value.tag == "i"


def test_build_flags_rejects_start_meeting_last_interval():
    with pytest.raises(PreconditionViolationError) as info:
        build_flags(Subspace([[0, 0, 1, 0], [1, 1, 0, 1]]))
    assert info.value.tag == "ii"


def test_is_generic():
    assert is_generic(Subspace([[1, 0, 0, 0], [0, 1, 0, 0]])) == (False, "i")
    assert is_generic(Subspace([[1, -1, 1]])) == (True, None)


def test_is_generic_treats_degenerate_float_flags_as_failure(monkeypatch, vandermonde_24):
    def degenerate(E):
        raise CertificationError("E'_1 has dimension 0, expected 1")

    monkeypatch.setattr(membership, "build_flags", degenerate)
    assert is_generic(vandermonde_24.to_float()) == (False, "flags")
    with pytest.raises(CertificationError):
        is_generic(vandermonde_24)


def test_classify_vandermonde(vandermonde_24):
    result = classify(vandermonde_24)
    assert (result.positive, result.nonnegative, result.all_nonzero, result.generic) == (True, True, True, True)
    assert result.failed_condition is None


def test_classify_coordinate_plane():
    result = classify(Subspace([[1, 0, 0, 0], [0, 0, 1, 0]]))
    assert result.nonnegative
    assert not result.positive and not result.all_nonzero and not result.generic
    assert result.failed_condition == "i"


def test_classify_mixed_sign_line():
    result = classify(Subspace([[1, -1, 1]]))
    assert result.all_nonzero and result.generic
    assert not result.positive and not result.nonnegative


def test_classify_fixed_subspace_in_floating_mode():
    result = classify(fixed_subspace_E1(4, 2).fixed_subspace)
    assert result.positive and result.generic


@pytest.mark.parametrize("N,k", [(3, 1), (4, 2), (5, 2), (5, 3)])
def test_rank_and_minor_criteria_agree_on_random_samples(N, k):
    for index in range(20):
        E = random_rational_subspace(N, k, seed=11, index=index)
        inside, witness = in_gr_prime(E)
        result = classify(E)
        assert inside == result.all_nonzero
        if witness is not None:
            assert plucker_vector(E).is_zero_at(witness.complement(N))
        if result.all_nonzero:
            assert result.generic
