"""Fisher information and the variational form of the hydrodynamic system.

The action functional is

    A = integral rho0 [ L + (hbar^2/4) (d rho0)^2 / rho0^2 ] dOmega

with L the classical part of the lagrangian density (momentum bracket
squared minus mass squared, field coupling, and the parameter-gradient
quadratic form; exactly the expanded evaluator of :mod:`dirachydro.hydro`
with the density terms removed).  Varying A with respect to the phase
action reproduces the continuity residual; varying with respect to rho0
reproduces the quantum Hamilton-Jacobi residual including the density
terms that emerge from the Fisher piece by parts.  Both functional
derivatives here are numerical (perturb one sample, central difference):
the point is to check the variational claim against independently coded
residuals, so a symbolic derivation would share bugs with the thing under
test.

Sign conventions: gradients contract with the Minkowski metric, so the
Fisher information of a static profile is negative (the spatial axes carry
the metric's minus sign).  The signed value is reported as is.

The antiparticle functional is the negated particle functional evaluated
on the same fields; reports carry the sign on every term so that
``total = fisher_term + lagrangian_term`` holds for both kinds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import raise_index
from .errors import ContractError, StepSizeError
from .fields import ELECTRON, electric_field, magnetic_field, rest_frame_B
from .hydro import HydroFieldSet, _expanded_core, _sample_potential
from .spinors import rest_spin

__all__ = [
    "FunctionalReport",
    "fisher_information",
    "action_functional",
    "functional_derivative",
    "lagrangian_density",
    "pauli_limit_density",
    "CONTINUITY_FACTOR",
    "QHJ_FACTOR",
]

# Proportionality between the numerical functional derivatives and the
# expanded residual grids.  The values follow from the quadratic structure
# of the functional; they were measured on a reference perturbed plane
# wave, checked stable across seeds, and frozen here.
CONTINUITY_FACTOR = -2.0   # d A / d S = CONTINUITY_FACTOR * continuity residual
QHJ_FACTOR = 1.0           # d A / d rho0 = QHJ_FACTOR * qhj residual


@dataclass(frozen=True)
class FunctionalReport:
    """Evaluated action functional, split into its two integrand pieces."""

    fisher_term: float
    lagrangian_term: float
    total: float
    volume_element: float


def _metric_square(spec, field):
    g_lower = spec.gradient_lower(np.asarray(field, dtype=np.float64))
    return np.einsum("...m,...m->...", raise_index(g_lower), g_lower)


def fisher_information(spec, rho, depth=1):
    """I = (1/4) integral rho (d^mu rho d_mu rho) / rho^2 over the interior.

    The contraction is Minkowski-signed: time-axis gradients enter with a
    plus, spatial ones with a minus, so static profiles yield a negative
    number (a normalized 1D Gaussian of width sigma gives -1/(4 sigma^2)).
    """
    rho = np.asarray(rho, dtype=np.float64)
    if rho.shape != spec.shape:
        raise ContractError(f"rho must have grid shape {spec.shape}, got {rho.shape}")
    interior = tuple(slice(depth, n - depth) for n in spec.shape) if depth else ()
    if np.any(rho[interior] <= 0.0):
        raise ContractError("rho must be positive on the trusted interior")
    integrand = 0.25 * _metric_square(spec, rho) / rho
    return spec.integrate(integrand, depth=depth)


def lagrangian_density(fields, provider, particle=ELECTRON):
    """Classical lagrangian density L of the particle-form functional.

    Momentum bracket squared minus mass squared, plus the rest-frame field
    coupling and the parameter-gradient quadratic form; no density terms.
    The same frozen coefficients as the expanded residual evaluator.
    """
    core = _expanded_core(fields, provider, particle)
    return (
        core["bb"] - particle.mass**2 + core["coupling"] + core["shape_terms"]
    )


def pauli_limit_density(fields, provider, particle=ELECTRON):
    """Non-relativistic limit of the lagrangian density.

    Written independently of :func:`lagrangian_density` as a comparison
    target: the spin weight Sigma12 degenerates to -cos(theta), the
    (gamma + 1)/2 and (gamma - 1)/2 factors go to 1 and 0, and the phase
    weight becomes sin^2(theta/2).  At chi of order 1e-3 the two densities
    agree to the square of the boost parameter.
    """
    spec = fields.spec
    hbar = particle.hbar
    q = particle.charge
    params = fields.params

    A, A_lower, F = _sample_potential(provider, spec.points())
    theta = np.asarray(params.theta, dtype=np.float64)

    weight = np.sin(0.5 * theta) ** 2
    internal = (
        spec.gradient_lower(np.asarray(params.eta0, dtype=np.float64))
        + weight[..., np.newaxis]
        * spec.gradient_lower(np.asarray(params.phi, dtype=np.float64))
    )
    bracket_lower = spec.gradient_lower(fields.S) + q * A_lower + hbar * internal
    bb = np.einsum(
        "...m,...m->...", raise_index(bracket_lower), bracket_lower
    )

    beta = np.zeros(spec.shape + (3,))
    b_prime = rest_frame_B(electric_field(F), magnetic_field(F), beta)
    coupling = hbar * q * np.einsum("...i,...i->...", b_prime, rest_spin(params))

    shape_terms = hbar**2 * (
        0.25 * _metric_square(spec, theta)
        - 0.25 * _metric_square(spec, params.chi)
        + 0.25 * np.sin(theta) ** 2 * _metric_square(spec, params.phi)
    )
    return bb - particle.mass**2 + coupling + shape_terms


def action_functional(fields, provider, particle=ELECTRON, kind=None, depth=1):
    """Evaluate the functional; antiparticle kind negates every term.

    ``kind`` defaults to the field set's own kind; passing it explicitly
    evaluates the other species' functional on the same field data, which
    is how the antisymmetry A_ap = -A_p is exercised.
    """
    if kind is None:
        kind = fields.kind
    if kind not in ("particle", "antiparticle"):
        raise ContractError(f"kind must be particle or antiparticle, got {kind!r}")
    sign = 1.0 if kind == "particle" else -1.0

    spec = fields.spec
    rho0 = fields.rho0
    interior = tuple(slice(depth, n - depth) for n in spec.shape) if depth else ()
    if np.any(rho0[interior] <= 0.0):
        raise ContractError("rho0 must be positive on the trusted interior")

    hbar = particle.hbar
    fisher_integrand = 0.25 * hbar**2 * _metric_square(spec, rho0) / rho0
    lagr_integrand = rho0 * lagrangian_density(fields, provider, particle)

    fisher_term = sign * spec.integrate(fisher_integrand, depth=depth)
    lagrangian_term = sign * spec.integrate(lagr_integrand, depth=depth)
    volume = float(np.prod(spec.spacing))
    return FunctionalReport(
        fisher_term=fisher_term,
        lagrangian_term=lagrangian_term,
        total=fisher_term + lagrangian_term,
        volume_element=volume,
    )


def _probe_indices(spec, count):
    # deterministic spread of interior points for the step-size check
    depth = 3
    interior = [slice(depth, n - depth) for n in spec.shape]
    sizes = [s.stop - s.start for s in interior]
    if any(size <= 0 for size in sizes):
        depth = 1
        interior = [slice(depth, n - depth) for n in spec.shape]
        sizes = [s.stop - s.start for s in interior]
    total = int(np.prod(sizes))
    picks = np.linspace(0, total - 1, min(count, total)).astype(int)
    out = []
    for flat in picks:
        idx = np.unravel_index(flat, sizes)
        out.append(tuple(int(i) + depth for i in idx))
    return out


def functional_derivative(
    fields,
    provider,
    particle=ELECTRON,
    wrt="S",
    epsilon=1e-6,
    depth=1,
    probe_points=8,
):
    """Numerical dA/df(x) per grid point, f one of the phase action or rho0.

    Each sample is perturbed by +/- eps (eps = epsilon times the field's
    scale) and the central difference of the total functional is divided by
    eps times the volume element.  That normalization identifies the
    derivative with the residual density at points whose trapezoid weight
    is the plain volume element; the outermost samples carry edge weights
    and are reported as computed.

    A Richardson probe repeats the difference with eps/2 at a few interior
    points; disagreement beyond ten percent (relative, with an absolute
    floor) means the step is roundoff-dominated and raises StepSizeError.

    The derivative with respect to rho0 treats the rest density as the
    independent field at fixed spinor shape, matching the variational
    statement; the stored ``rho`` is gamma times rho0.
    """
    if wrt not in ("S", "rho0"):
        raise ContractError(f"wrt must be 'S' or 'rho0', got {wrt!r}")
    spec = fields.spec
    hbar = particle.hbar
    sign = 1.0 if fields.kind == "particle" else -1.0
    volume = float(np.prod(spec.spacing))

    core = _expanded_core(fields, provider, particle)
    rho0_base = fields.rho0
    rest_density = (
        core["coupling"] + core["shape_terms"] - particle.mass**2
    )

    if wrt == "S":
        base_lower = core["bracket_lower"] - spec.gradient_lower(fields.S)
        lagr_rest = rho0_base * rest_density
        fisher_integrand = 0.25 * hbar**2 * _metric_square(spec, rho0_base) / rho0_base

        def evaluate(field):
            bracket_lower = base_lower + spec.gradient_lower(field)
            bb = np.einsum(
                "...m,...m->...", raise_index(bracket_lower), bracket_lower
            )
            integrand = rho0_base * bb + lagr_rest + fisher_integrand
            return sign * spec.integrate(integrand, depth=depth)

        base_field = np.array(fields.S, copy=True)
    else:
        density = core["bb"] + rest_density  # independent of rho0

        def evaluate(field):
            if np.any(field[tuple(slice(depth, n - depth) for n in spec.shape)] <= 0.0):
                raise ContractError("rho0 perturbation crossed zero on the interior")
            integrand = field * density + 0.25 * hbar**2 * _metric_square(
                spec, field
            ) / field
            return sign * spec.integrate(integrand, depth=depth)

        base_field = np.array(rho0_base, copy=True)

    scale = max(1.0, float(np.max(np.abs(base_field))))
    eps = float(epsilon) * scale
    largest = float(np.max(np.abs(base_field)))
    if largest + eps == largest:
        raise StepSizeError(
            f"epsilon={epsilon:g} perturbs below float64 resolution of the "
            "field; the difference would be identically zero"
        )

    def central(index, step):
        saved = base_field[index]
        base_field[index] = saved + step
        plus = evaluate(base_field)
        base_field[index] = saved - step
        minus = evaluate(base_field)
        base_field[index] = saved
        return (plus - minus) / (2.0 * step * volume)

    out = np.zeros(spec.shape)
    for index in np.ndindex(*spec.shape):
        out[index] = central(index, eps)

    # Absolute floor keeps stationary configurations (derivative is pure
    # noise) and zero crossings from tripping the check; a genuinely
    # roundoff-dominated step produces large mutually inconsistent values
    # and is still caught by the relative comparison.
    floor = max(1e-7, 1e-6 * float(np.max(np.abs(out))))
    for index in _probe_indices(spec, probe_points):
        d1 = out[index]
        d2 = central(index, 0.5 * eps)
        denom = max(abs(d1), abs(d2), floor)
        if abs(d1 - d2) > 0.1 * denom:
            raise StepSizeError(
                f"functional derivative at {index} changes by "
                f"{abs(d1 - d2) / denom:.2%} under eps/2; epsilon={epsilon:g} "
                "is roundoff-dominated"
            )
    return out
