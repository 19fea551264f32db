import math

import numpy as np
import pytest

from pencillab.core import PoshPencil
from pencillab.errors import PreconditionError
from pencillab.localization import (
    eejjx_by_kronecker,
    eejjx_by_norms,
    eejjx_by_spectral,
    eejjx_falsify,
    eejjx_real_form,
    eejjx_value,
    lhp_certificate,
    regularity_conditions_report,
    sector_membership,
)
from pencillab.oracles import named_example, random_posh_pencil


def strongly_damped(n, scale=3.0):
    j = np.zeros((n, n))
    for k in range(n - 1):
        j[k, k + 1] = 1.0
        j[k + 1, k] = -1.0
    r = scale * np.eye(n)
    return PoshPencil(j, r, j.copy(), r.copy())


def test_eejjx_value_sign():
    # J's zero: condition value is -(x*R1x)(x*R2x) <= 0
    pp = PoshPencil(np.zeros((2, 2)), np.eye(2), np.zeros((2, 2)), np.eye(2))
    x = np.array([1.0, 2.0])
    assert eejjx_value(pp, x) < 0


def test_norms_prover_on_heavy_damping():
    pp = strongly_damped(3)
    assert eejjx_by_norms(pp)
    assert eejjx_by_kronecker(pp)
    assert eejjx_by_spectral(pp)


def test_provers_reject_unstable_example():
    pp = named_example("ex_unstable")
    assert not eejjx_by_norms(pp)
    assert not eejjx_by_kronecker(pp)
    witness = eejjx_falsify(pp, budget=2000, seed=0)
    assert witness is not None
    assert eejjx_value(pp, witness) > 0


def test_falsifier_never_contradicts_provers():
    rng = np.random.default_rng(31)
    for k in range(60):
        n = int(rng.integers(2, 5))
        pp = random_posh_pencil(rng, n)
        proved = (
            eejjx_by_norms(pp)
            or eejjx_by_kronecker(pp)
            or eejjx_by_spectral(pp)
        )
        if proved:
            witness = eejjx_falsify(pp, budget=1000, seed=k)
            assert witness is None, f"iteration {k}"


def test_real_form_falsifier_requires_real_data():
    pp = PoshPencil(
        np.array([[1j]]), np.zeros((1, 1)), np.array([[-1j]]), np.eye(1)
    )
    with pytest.raises(PreconditionError):
        eejjx_real_form(pp, budget=10, seed=0)


def test_real_form_witness_maps_to_complex_violation():
    pp = named_example("ex_unstable")
    witness = eejjx_real_form(pp, budget=4000, seed=2)
    assert witness is not None
    xi, eta = witness
    assert eejjx_value(pp, xi + 1j * eta) > 0


def test_certificate_routes_stable_case():
    pp = strongly_damped(4)
    cert = lhp_certificate(pp, seed=0)
    assert cert.eejjx_status.startswith("proved_by_")
    assert cert.conclusion in ("numrange_in_lhp", "eigenvalues_in_lhp")
    assert cert.evidence in ("exact", "sampled")


def test_certificate_falsified_on_unstable():
    pp = named_example("ex_unstable")
    cert = lhp_certificate(pp, seed=0)
    assert cert.eejjx_status == "falsified"
    assert cert.conclusion == "none"
    assert cert.witness is not None


def test_certificate_consistent_with_spectrum():
    # whenever the certificate concludes, eigenvalues must confirm it
    from pencillab.core import finite_eigenvalues

    rng = np.random.default_rng(17)
    concluded = 0
    for k in range(40):
        n = int(rng.integers(2, 5))
        pp = random_posh_pencil(rng, n, pd_sum=(k % 3 == 0))
        if k % 4 == 0:
            # push damping up so some instances are provable
            pp = PoshPencil(
                pp.j1,
                pp.r1 + 3.0 * np.eye(n),
                pp.j2,
                pp.r2 + 3.0 * np.eye(n),
            )
        cert = lhp_certificate(pp, sample_budget=400, falsify_budget=400, seed=k)
        if cert.conclusion == "none":
            continue
        concluded += 1
        for z in finite_eigenvalues(pp.pencil()):
            assert z.real <= 1e-8 * (1.0 + abs(z)), f"iteration {k}: {z}"
    assert concluded >= 5


def test_sector_membership_filters():
    pts = [1.0 + 0.01j, -1.0, 1j, 0.5 * math.e ** (1j * 0.1), 1e-12 + 0j]
    bad = sector_membership(pts, d=3)
    # pi/3 sector: 1+0.01j and the 0.1-radian point violate; origin exempt
    assert 1.0 + 0.01j in bad
    assert not any(abs(z + 1.0) < 1e-9 for z in bad)
    assert not any(abs(z - 1j) < 1e-9 for z in bad)
    assert len(bad) == 2
    with pytest.raises(PreconditionError):
        sector_membership(pts, d=0)


def test_regularity_report_on_definite_pencil():
    pp = strongly_damped(3)
    rep = regularity_conditions_report(pp)
    assert rep.p_regular
    assert rep.rr_regular
    assert len(rep.items) == 5
    for item in rep.items:
        if item.hypothesis and item.verified is not None:
            assert item.verified, item.label


def test_regularity_report_labels():
    rng = np.random.default_rng(5)
    pp = random_posh_pencil(rng, 3)
    rep = regularity_conditions_report(pp)
    labels = [item.label for item in rep.items]
    assert labels == ["i", "ii", "iii", "iv", "v"]
