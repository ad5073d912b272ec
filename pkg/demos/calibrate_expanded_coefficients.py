"""Measure the expanded evaluator's coefficients against the bilinear one.

The closed-form quantum Hamilton-Jacobi density carries six coefficients
whose normalization differs between the two conventions in circulation:
a quarter-form and a unit-form for the four shape-gradient terms, a half
and a unit quantum-potential multiple, and a half or unit rest-frame
magnetic coupling of either sign.  Nothing here assumes any of them.  The
script evaluates the bilinear residual (every spinor structure obtained by
differencing the spinor field itself) on seeded smooth configurations,
subtracts the coefficient-free part of the closed form, and least-squares
fits the remainder against the candidate basis functions.  The magnetic
sign is additionally cross-checked against the directly discretized
second-order wave operator, which is independent of both formula
evaluators.

The resolved values are the constants frozen in the hydro module; running
this script regenerates demos/calibration_report.json, the committed
record of that measurement.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from dirachydro.fields import ELECTRON, UniformField, ZERO_FIELD, electric_field, magnetic_field, rest_frame_B
from dirachydro.grids import GridSpec
from dirachydro.hydro import (
    second_order_residuals_bilinear,
    squared_dirac_residual,
    quantum_potential,
)
from dirachydro.io import write_json_report
from dirachydro.clifford import raise_index
from dirachydro.manufactured import seeded_manufactured_fields
from dirachydro.spinors import four_velocity, rest_spin, sigma_component_table

# candidate normalizations the fit disambiguates (the two conventions in
# circulation differ by a factor of 4 for the shape terms and 2 elsewhere)
SHAPE_QUARTER = 0.25
SHAPE_UNIT = 1.0
QP_HALF = 1.0   # quantum_potential already carries the Madelung -hbar^2/2
QP_UNIT = 2.0
MAGNETIC_HALF = 0.5
MAGNETIC_UNIT = 1.0


def _grad_sq(spec, field):
    g = spec.gradient_lower(np.asarray(field, dtype=np.float64))
    return np.einsum("...m,...m->...", raise_index(g), g)


def _closed_form_base(fields, provider, particle):
    """bb - m^2 of the closed form: everything that needs no calibration."""
    spec = fields.spec
    params = fields.params
    sigma12 = sigma_component_table(params)[..., 1, 2]
    weight = 0.5 * (1.0 + sigma12)

    A, _ = provider.sample(spec.points())
    A_lower = A.copy()
    A_lower[..., 1:4] *= -1.0

    internal = spec.gradient_lower(np.asarray(params.eta0, dtype=np.float64))
    internal = internal + weight[..., np.newaxis] * spec.gradient_lower(
        np.asarray(params.phi, dtype=np.float64)
    )
    bracket_lower = (
        spec.gradient_lower(fields.S) + particle.charge * A_lower
        + particle.hbar * internal
    )
    bb = np.einsum(
        "...m,...m->...", raise_index(bracket_lower), bracket_lower
    )
    return bb - particle.mass**2, sigma12


def _shape_bases(fields, sigma12, particle):
    """The four candidate gradient-quadratic basis grids, coefficient-free."""
    spec = fields.spec
    params = fields.params
    gamma = np.asarray(fields.gamma, dtype=np.float64)
    h2 = particle.hbar**2
    return {
        "theta_gradient": h2 * 0.5 * (gamma + 1.0) * _grad_sq(spec, params.theta),
        "kappa_gradient": h2 * 0.5 * (gamma - 1.0) * _grad_sq(spec, params.kappa),
        "chi_gradient": h2 * _grad_sq(spec, params.chi),
        "phi_gradient": h2 * (1.0 - sigma12**2) * _grad_sq(spec, params.phi),
    }


def _magnetic_basis(fields, provider, particle):
    spec = fields.spec
    params = fields.params
    gamma = np.asarray(fields.gamma, dtype=np.float64)
    u = four_velocity(params)
    beta = u[..., 1:4] / gamma[..., np.newaxis]
    _, F = provider.sample(spec.points())
    b_prime = rest_frame_B(electric_field(F), magnetic_field(F), beta)
    return particle.hbar * particle.charge * np.einsum(
        "...i,...i->...", b_prime, rest_spin(params)
    )


def _make_grid(n, half_extent):
    h = 2.0 * half_extent / (n - 1)
    return GridSpec(
        active_axes=(0, 1),
        shape=(n, n),
        spacing=(h, h),
        origin=(-half_extent, -half_extent, 0.0, 0.0),
    )


def _joint_shape_fit(spec, seeds, amplitude, particle):
    """Least-squares fit of the four shape coefficients and the quantum
    potential multiple, jointly, in zero external field."""
    names = ["theta_gradient", "kappa_gradient", "chi_gradient", "phi_gradient"]
    columns = {name: [] for name in names + ["quantum_potential"]}
    targets = []
    mask = spec.trusted_mask(depth=3)

    for seed in seeds:
        fields = seeded_manufactured_fields(spec, seed, amplitude=amplitude,
                                            particle=particle)
        base, sigma12 = _closed_form_base(fields, ZERO_FIELD, particle)
        y = second_order_residuals_bilinear(fields, ZERO_FIELD, particle).qhj - base
        bases = _shape_bases(fields, sigma12, particle)
        bases["quantum_potential"] = np.ma.filled(
            quantum_potential(spec, fields.rho0, hbar=particle.hbar), 0.0
        )
        targets.append(y[mask])
        for name in columns:
            columns[name].append(bases[name][mask])

    design = np.stack([np.concatenate(columns[name]) for name in columns], axis=1)
    target = np.concatenate(targets)
    coeffs, _, _, _ = np.linalg.lstsq(design, target, rcond=None)
    fit_rms = float(np.sqrt(np.mean((target - design @ coeffs) ** 2)))
    scale_rms = float(np.sqrt(np.mean(target**2)))
    return dict(zip(columns, (float(c) for c in coeffs))), fit_rms / scale_rms


def _magnetic_fit(spec, seeds, amplitude, particle, resolved_shape, use_direct):
    """Single-coefficient fit of the rest-frame magnetic coupling.

    The shape and quantum-potential pieces enter at their already resolved
    values, so the only remaining discrepancy is the coupling.  With
    use_direct the target comes from the discretized second-order wave
    operator instead of the bilinear evaluator.
    """
    provider = UniformField(E0=np.array([0.02, 0.0, 0.01]),
                            B0=np.array([0.0, 0.0, 0.6]))
    mask = spec.trusted_mask(depth=3)
    num = 0.0
    den = 0.0
    for seed in seeds:
        fields = seeded_manufactured_fields(spec, seed, amplitude=amplitude,
                                            particle=particle)
        base, sigma12 = _closed_form_base(fields, provider, particle)
        bases = _shape_bases(fields, sigma12, particle)
        qp = np.ma.filled(quantum_potential(spec, fields.rho0, hbar=particle.hbar), 0.0)
        resolved = base + resolved_shape["quantum_potential"] * qp
        for name, basis in bases.items():
            resolved = resolved + resolved_shape[name] * basis
        if use_direct:
            op = squared_dirac_residual(fields, provider, particle)
            sign = 1.0 if fields.kind == "particle" else -1.0
            qhj = -np.real(op) / (sign * fields.rho0)
        else:
            qhj = second_order_residuals_bilinear(fields, provider, particle).qhj
        y = (qhj - resolved)[mask]
        b = _magnetic_basis(fields, provider, particle)[mask]
        num += float(np.dot(y, b))
        den += float(np.dot(b, b))
    return num / den


def calibrate(n=97, half_extent=0.6, amplitude=2e-4, n_seeds=12):
    spec = _make_grid(n, half_extent)
    fine = _make_grid(2 * n - 1, half_extent)
    seeds = list(range(100, 100 + n_seeds))
    particle = ELECTRON

    shape, rel_rms = _joint_shape_fit(spec, seeds, amplitude, particle)
    shape_fine, rel_rms_fine = _joint_shape_fit(fine, seeds[:4], amplitude, particle)
    magnetic = _magnetic_fit(spec, seeds[:4], amplitude, particle, shape, False)
    magnetic_direct = _magnetic_fit(spec, seeds[:4], amplitude, particle, shape, True)

    def shape_entry(name, frozen):
        resolved = shape[name]
        return {
            "basis": {
                "theta_gradient": "hbar^2 (gamma+1)/2 (d theta)^2",
                "kappa_gradient": "hbar^2 (gamma-1)/2 (d kappa)^2",
                "chi_gradient": "hbar^2 (d chi)^2",
                "phi_gradient": "hbar^2 (1 - Sigma12^2) (d phi)^2",
            }[name],
            "resolved": resolved,
            "frozen_in_module": frozen,
            "refinement_shift": shape_fine[name] - resolved,
            "ratio_to_quarter_form": resolved / (np.sign(frozen) * SHAPE_QUARTER),
            "ratio_to_unit_form": resolved / (np.sign(frozen) * SHAPE_UNIT),
        }

    report = {
        "method": {
            "target": "bilinear qhj residual minus the coefficient-free closed form",
            "fit": "joint linear least squares for the shape and quantum-potential "
                   "coefficients in zero field; single-coefficient projection for "
                   "the magnetic coupling in a uniform field",
            "grid": {"shape": list(spec.shape), "spacing": list(spec.spacing)},
            "refinement_grid_shape": list(fine.shape),
            "interior_depth": 3,
            "amplitude": amplitude,
            "seeds": seeds,
            "relative_fit_rms": rel_rms,
            "relative_fit_rms_refined": rel_rms_fine,
        },
        "shape_coefficients": {
            "theta_gradient": shape_entry("theta_gradient", 0.25),
            "kappa_gradient": shape_entry("kappa_gradient", -0.25),
            "chi_gradient": shape_entry("chi_gradient", -0.25),
            "phi_gradient": shape_entry("phi_gradient", 0.25),
        },
        "quantum_potential_multiple": {
            "basis": "madelung quantum potential -(hbar^2/2) box(sqrt rho0)/sqrt rho0",
            "resolved": shape["quantum_potential"],
            "frozen_in_module": 2.0,
            "refinement_shift": shape_fine["quantum_potential"] - shape["quantum_potential"],
            "ratio_to_half_form": shape["quantum_potential"] / QP_HALF,
            "ratio_to_unit_form": shape["quantum_potential"] / QP_UNIT,
        },
        "magnetic_coupling": {
            "basis": "hbar q B'.s' in the instantaneous rest frame",
            "resolved": magnetic,
            "frozen_in_module": 1.0,
            "direct_operator_cross_check": magnetic_direct,
            "ratio_to_half_form": magnetic / MAGNETIC_HALF,
            "ratio_to_unit_form": magnetic / MAGNETIC_UNIT,
            "sign_relative_to_reduced_bilinear_display": -1.0,
        },
    }
    return report


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--points", type=int, default=97,
                        help="grid points per axis (default 97)")
    parser.add_argument("--amplitude", type=float, default=2e-4,
                        help="manufactured perturbation amplitude (default 2e-4)")
    parser.add_argument("--seeds", type=int, default=12,
                        help="number of seeded configurations (default 12)")
    parser.add_argument("--out", default=str(Path(__file__).parent / "calibration_report.json"),
                        help="report path (default demos/calibration_report.json)")
    args = parser.parse_args(argv)

    report = calibrate(n=args.points, amplitude=args.amplitude, n_seeds=args.seeds)

    print("resolved coefficients (ratio to quarter/half form, to unit form):")
    for name, entry in report["shape_coefficients"].items():
        print(f"  {name:16s} {entry['resolved']:+.6f}"
              f"   {entry['ratio_to_quarter_form']:+.4f}  {entry['ratio_to_unit_form']:+.4f}")
    qp = report["quantum_potential_multiple"]
    print(f"  {'qp_multiple':16s} {qp['resolved']:+.6f}"
          f"   {qp['ratio_to_half_form']:+.4f}  {qp['ratio_to_unit_form']:+.4f}")
    mag = report["magnetic_coupling"]
    print(f"  {'magnetic':16s} {mag['resolved']:+.6f}"
          f"   {mag['ratio_to_half_form']:+.4f}  {mag['ratio_to_unit_form']:+.4f}")
    print(f"  magnetic via direct operator: {mag['direct_operator_cross_check']:+.6f}")
    print(f"  relative fit rms: {report['method']['relative_fit_rms']:.3e}")

    write_json_report(args.out, report)
    print(f"report: {args.out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
