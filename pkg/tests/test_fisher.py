"""Information functional, action evaluation, numerical functional derivatives."""

import numpy as np
import pytest

from dirachydro.errors import ContractError, StepSizeError
from dirachydro.fields import UniformField
from dirachydro.fisher import (
    CONTINUITY_FACTOR,
    QHJ_FACTOR,
    action_functional,
    fisher_information,
    functional_derivative,
    lagrangian_density,
    pauli_limit_density,
)
from dirachydro.grids import GridSpec
from dirachydro.hydro import second_order_residuals_expanded
from dirachydro.manufactured import (
    DEFAULT_BASE_PARAMS,
    perturbed_plane_wave_fields,
    seeded_manufactured_fields,
)


def _gaussian_spec(sigma, axis=1):
    half = 8.0 * sigma
    n = 1601
    origin = [0.0, 0.0, 0.0, 0.0]
    origin[axis] = -half
    return GridSpec(
        active_axes=(axis,),
        shape=(n,),
        spacing=(2.0 * half / (n - 1),),
        origin=tuple(origin),
    )


def test_gaussian_information_closed_form():
    """A normalized width-sigma Gaussian carries I = -1/(4 sigma^2).

    Negative because the profile is static: its gradients are all spatial
    and the contraction is Minkowski-signed.
    """
    for sigma in (1.0, 2.0):
        spec = _gaussian_spec(sigma)
        x = spec.axis_coordinates()[0]
        rho = np.exp(-0.5 * (x / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))
        value = fisher_information(spec, rho)
        np.testing.assert_allclose(value, -1.0 / (4.0 * sigma**2), atol=1e-8)


def test_time_axis_information_is_positive():
    # same profile along t flips the sign of the contraction
    spec = _gaussian_spec(1.0, axis=0)
    t = spec.axis_coordinates()[0]
    rho = np.exp(-0.5 * t**2) / np.sqrt(2.0 * np.pi)
    np.testing.assert_allclose(fisher_information(spec, rho), 0.25, atol=1e-8)


def test_information_contract_checks():
    spec = _gaussian_spec(1.0)
    with pytest.raises(ContractError):
        fisher_information(spec, np.ones(7))
    bad = np.ones(spec.shape)
    bad[800] = 0.0
    with pytest.raises(ContractError):
        fisher_information(spec, bad)


def test_functional_antisymmetry_is_exact():
    """Evaluating the antiparticle functional on the same data negates it."""
    spec = GridSpec(active_axes=(0, 1), shape=(17, 17), spacing=(0.02, 0.02))
    provider = UniformField(E0=np.array([0.0, 0.03, 0.0]), B0=np.array([0.0, 0.0, 0.1]))
    fields = seeded_manufactured_fields(spec, seed=2)
    p = action_functional(fields, provider, kind="particle")
    ap = action_functional(fields, provider, kind="antiparticle")
    assert ap.total == -p.total
    assert ap.fisher_term == -p.fisher_term
    assert ap.lagrangian_term == -p.lagrangian_term
    assert p.total == p.fisher_term + p.lagrangian_term
    assert p.volume_element == pytest.approx(0.02 * 0.02)
    with pytest.raises(ContractError):
        action_functional(fields, provider, kind="both")


def test_functional_derivatives_reproduce_residual_grids():
    """Sample-wise perturbation of the action lands on the residual fields.

    dA/dS is the continuity residual times the frozen factor -2, dA/drho0
    the quantum Hamilton-Jacobi residual times +1; the residual grids come
    from the independently coded expanded evaluator.
    """
    spec = GridSpec(active_axes=(0, 1), shape=(13, 13), spacing=(0.02, 0.02))
    provider = UniformField(E0=np.array([0.0, 0.03, 0.0]), B0=np.array([0.0, 0.0, 0.1]))
    fields = perturbed_plane_wave_fields(spec, seed=5, amplitude=1e-3)
    residuals = second_order_residuals_expanded(fields, provider)
    interior = spec.trusted_mask(depth=3)

    dS = functional_derivative(fields, provider, wrt="S")
    np.testing.assert_allclose(
        dS[interior], (CONTINUITY_FACTOR * residuals.continuity)[interior], atol=1e-6
    )
    drho = functional_derivative(fields, provider, wrt="rho0")
    np.testing.assert_allclose(
        drho[interior], (QHJ_FACTOR * residuals.qhj)[interior], atol=1e-6
    )


def test_functional_derivative_contract_checks():
    spec = GridSpec(active_axes=(0, 1), shape=(9, 9), spacing=(0.02, 0.02))
    provider = UniformField(B0=np.array([0.0, 0.0, 0.1]))
    fields = perturbed_plane_wave_fields(spec, seed=1)
    with pytest.raises(ContractError):
        functional_derivative(fields, provider, wrt="rho")
    # a sub-ulp step cannot move the functional and must be refused
    with pytest.raises(StepSizeError):
        functional_derivative(fields, provider, wrt="S", epsilon=1e-17)


def test_pauli_limit_tracks_full_density_at_small_boost():
    """At chi ~ 1e-3 the independent Pauli-limit density agrees to O(chi^2)."""
    spec = GridSpec(active_axes=(0, 1), shape=(17, 17), spacing=(0.01, 0.01))
    provider = UniformField(E0=np.array([0.01, 0.0, 0.02]), B0=np.array([0.0, 0.0, 0.3]))
    base = dict(DEFAULT_BASE_PARAMS, chi=1e-3, theta_u=np.pi / 2, phi=0.0)
    fields = seeded_manufactured_fields(spec, seed=3, base=base)
    full = lagrangian_density(fields, provider)
    limit = pauli_limit_density(fields, provider)
    assert np.max(np.abs(full - limit)) < 1e-5
