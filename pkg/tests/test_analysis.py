import math

import numpy as np
import pytest

from conftest import random_network
from nsfeed.analysis import (
    Outcome,
    conditional_map,
    enumerate_outcomes,
    failure_stats,
    find_record,
    ideal_recovery_bound,
    max_success_ceiling,
    probability_table,
    success_probability,
)
from nsfeed.fock import ConditionalMap, FockState, canonical_phase
from nsfeed.network import compose, ns_canonical

R2 = math.sqrt(2.0)
SYN00 = np.array([2**-0.25, 2**0.25 * (1 - R2), 2**-0.25 * math.sqrt(51 - 36 * R2)])
SYN01 = np.array([(1 - R2) / 2, (5 - 3 * R2) / 2, (15 - 11 * R2) / 2])


@pytest.fixture(scope="module")
def records():
    return enumerate_outcomes(ns_canonical(), (1, 0), (1, 0), 2)


def test_conditional_maps():
    ns = ns_canonical()
    s = conditional_map(ns, (1, 0), (1, 0), 2)
    assert s.delta == 0
    assert np.allclose(canonical_phase(s.amplitudes), [0.5, 0.5, -0.5], atol=1e-12)
    z = conditional_map(ns, (1, 0), (0, 0), 2)
    assert z.delta == 1
    assert np.allclose(canonical_phase(z.amplitudes), SYN00, atol=1e-12)
    assert np.allclose(np.abs(z.amplitudes), [0.8409, 0.4926, 0.2499], atol=1e-4)
    o = conditional_map(ns, (1, 0), (0, 1), 2)
    assert o.delta == 0
    assert np.allclose(canonical_phase(o.amplitudes), canonical_phase(SYN01), atol=1e-12)


def test_conditional_map_dims():
    with pytest.raises(ValueError):
        conditional_map(ns_canonical(), (1,), (1, 0))


def test_enumeration_classes(records):
    assert len(records) == 10
    irr = {r.pattern for r in records if r.classification is Outcome.IRRECOVERABLE}
    assert irr == {FockState(p) for p in [(1, 1), (2, 0), (0, 2), (2, 1), (1, 2), (3, 0), (0, 3)]}
    assert find_record(records, (1, 0)).classification is Outcome.SUCCESS
    assert find_record(records, (0, 1)).classification is Outcome.CORRECTABLE_PRESERVING
    assert find_record(records, (0, 0)).classification is Outcome.CORRECTABLE_ADDING
    assert [r.pattern for r in records] == sorted(r.pattern for r in records)


def test_completeness_canonical(records):
    c = np.ones(3) / math.sqrt(3)
    total = sum(float(np.dot(np.abs(c) ** 2, r.per_fock_probability)) for r in records)
    assert total == pytest.approx(1.0, abs=1e-10)
    # vacuum signal never triggers a photon-subtracting pattern
    for r in records:
        if r.classification is Outcome.IRRECOVERABLE:
            assert r.per_fock_probability[0] == 0


def test_completeness_random(rng):
    for _ in range(5):
        net = random_network(rng)
        table = probability_table(enumerate_outcomes(net, (1, 0), (1, 0), 2))
        assert np.allclose(table.sum(axis=0), 1.0, atol=1e-10)


def test_failure_stats(records):
    st = failure_stats(records)
    assert st.max_failure == pytest.approx(57 * R2 - 80, abs=1e-9)
    assert st.argmax_input == 2
    assert st.average_failure == pytest.approx(41 / R2 - 86 / 3, abs=1e-9)
    assert st.q_n[0] == pytest.approx(0.0, abs=1e-12)
    # bookkeeping closes for the worst input
    k = st.argmax_input
    rest = sum(r.per_fock_probability[k] for r in records if r.classification is not Outcome.IRRECOVERABLE)
    assert st.max_failure == pytest.approx(1 - rest, abs=1e-10)
    with pytest.raises(ValueError):
        failure_stats([])


def test_classification_phase_invariant(records):
    L = compose(ns_canonical()).matrix * np.exp(0.7j)
    again = enumerate_outcomes(L, (1, 0), (1, 0), 2)
    assert [r.classification for r in again] == [r.classification for r in records]


def test_recovery_bounds(records):
    z = find_record(records, (0, 0)).map
    o = find_record(records, (0, 1)).map
    assert ideal_recovery_bound(z) == pytest.approx(0.0625, abs=1e-4)
    assert ideal_recovery_bound(z) == pytest.approx((51 - 36 * R2) / R2, abs=1e-12)
    assert ideal_recovery_bound(o) == pytest.approx(((R2 - 1) / 2) ** 2, abs=1e-12)
    assert ideal_recovery_bound(ConditionalMap(0, [0.5, 0.5, -0.5])) == pytest.approx(0.25)
    assert ideal_recovery_bound(ConditionalMap(0, [0.5, 0.0, -0.5])) == 0.0


def test_ceilings(records):
    assert success_probability(records) == pytest.approx(0.25, abs=1e-12)
    assert max_success_ceiling(records) == pytest.approx(0.355, abs=1e-3)
    assert max_success_ceiling(records, patterns=[(0, 0)]) == pytest.approx(0.312, abs=1e-3)
    assert max_success_ceiling(records, patterns=[]) == pytest.approx(0.25, abs=1e-12)
