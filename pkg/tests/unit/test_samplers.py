from fractions import Fraction

import pytest
from pydantic import ValidationError

from tpgrass.exceptions import InvalidArgumentsError
from tpgrass.exterior import plucker_vector
from tpgrass.membership import classify, sign_classify
from tpgrass.models import IndexSet
from tpgrass.samplers import (
    SamplerKind,
    SamplerSpec,
    coordinate_subspace,
    flowed_coordinate_subspace,
    generate,
    mixed_sign_subspace,
    random_nodes,
    random_rational_subspace,
    sample_rng,
    vandermonde_subspace,
)


def test_vandermonde_subspace_rows():
    E = vandermonde_subspace(["1/2", 3], 3)
    assert E.rows.tolist() == [[1, Fraction(1, 2), Fraction(1, 4)], [1, 3, 9]]
    assert sign_classify(plucker_vector(E)).positive


@pytest.mark.parametrize("nodes", [[2, 1], [0, 1], [1, 1], ["-1", 2]])
def test_vandermonde_subspace_rejects_bad_nodes(nodes):
    with pytest.raises(InvalidArgumentsError):
        vandermonde_subspace(nodes, 4)


def test_random_nodes_are_increasing_and_positive():
    for index in range(20):
        nodes = random_nodes(3, sample_rng(5, index))
        assert len(nodes) == 3
        assert nodes[0] > 0
        assert all(a < b for a, b in zip(nodes, nodes[1:]))


def test_coordinate_subspace():
    E = coordinate_subspace(IndexSet((1, 3)), 4)
    assert E.rows.tolist() == [[1, 0, 0, 0], [0, 0, 1, 0]]
    assert not classify(E).all_nonzero


def test_random_rational_subspace_is_deterministic():
    first = random_rational_subspace(5, 2, seed=3, index=4)
    second = random_rational_subspace(5, 2, seed=3, index=4)
    other = random_rational_subspace(5, 2, seed=3, index=5)
    assert first.rows.tolist() == second.rows.tolist()
    assert first.rows.tolist() != other.rows.tolist()
    assert all(abs(x) <= 3 for x in first.rows.flat)


@pytest.mark.parametrize("index_set,N", [((1,), 3), ((1, 2), 4), ((2, 4), 5), ((1, 2, 3), 6)])
def test_flowed_coordinate_subspace_is_positive(index_set, N):
    E = flowed_coordinate_subspace(IndexSet(index_set), N, 0.1)
    assert sign_classify(plucker_vector(E)).positive


def test_flowed_coordinate_subspace_rejects_nonpositive_r():
    with pytest.raises(InvalidArgumentsError):
        flowed_coordinate_subspace(IndexSet((1,)), 3, 0.0)


@pytest.mark.parametrize("N,k", [(3, 1), (4, 2), (5, 2)])
def test_mixed_sign_subspace(N, k):
    E = mixed_sign_subspace(N, k, seed=2)
    result = classify(E)
    assert result.all_nonzero and result.generic
    assert not result.positive


def test_sampler_spec_validation():
    with pytest.raises(ValidationError):
        SamplerSpec(kind=SamplerKind.COORDINATE, N=4)
    with pytest.raises(ValidationError):
        SamplerSpec(kind=SamplerKind.VANDERMONDE, N=4, nodes=["2", "1"])
    with pytest.raises(ValidationError):
        SamplerSpec(kind=SamplerKind.RANDOM_RATIONAL, N=4, k=4)
    with pytest.raises(ValidationError):
        SamplerSpec(kind=SamplerKind.COORDINATE, N=3, index_set=[1, 4])


def test_sampler_spec_dimension():
    assert SamplerSpec(kind=SamplerKind.VANDERMONDE, N=5, nodes=[1, "3/2"]).dimension == 2
    assert SamplerSpec(kind=SamplerKind.COORDINATE, N=5, index_set=[2, 3, 5]).dimension == 3
    assert SamplerSpec(kind=SamplerKind.RANDOM_RATIONAL, N=5, k=2).dimension == 2


def test_generate_dispatches_on_kind():
    assert generate(SamplerSpec(kind=SamplerKind.VANDERMONDE, N=4, nodes=[1, 2])).rows.tolist() == [
        [1, 1, 1, 1],
        [1, 2, 4, 8],
    ]
    assert generate(SamplerSpec(kind=SamplerKind.COORDINATE, N=3, index_set=[2])).rows.tolist() == [[0, 1, 0]]
    flowed = generate(SamplerSpec(kind=SamplerKind.FLOWED_COORDINATE, N=4, index_set=[1, 2], r=0.5))
    assert not flowed.mode.is_exact
    assert generate(SamplerSpec(kind=SamplerKind.MIXED_SIGN, N=4, k=2, seed=9)).k == 2


def test_generate_is_reproducible():
    spec = SamplerSpec(kind=SamplerKind.VANDERMONDE, N=5, k=2, seed=7, index=3)
    assert generate(spec).rows.tolist() == generate(spec).rows.tolist()
