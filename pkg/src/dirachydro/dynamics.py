"""Semi-classical point dynamics: Lorentz force plus rest-spin precession.

The state is (x, u, s_rest): lab position, four-velocity, and the spin unit
vector in the instantaneous rest frame, all evolved in proper time. The
spin precesses about -(q/m)[B - (gamma/(gamma+1)) beta x E], the rest-frame
form that needs no beta-hat rate estimate; the equivalent form with an
explicit Thomas term is checked diagnostically from stored trajectories.
With a gyromagnetic ratio of exactly two, spin and velocity precess at the
same proper-time rate in a pure magnetic field, so the angle between them
is an invariant of the motion.

The integrator is a fixed-step classical RK4, not an adaptive scheme:
acceptance runs need bitwise-reproducible trajectories and the systems
exercised are non-stiff. Spin is renormalized to unit length every step;
mass-shell drift is reported, with projection to the shell opt-in. For
position-independent providers the right-hand side is unrolled to scalar
arithmetic, which makes million-step drift studies affordable.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import sqrt

import numpy as np

from .errors import ContractError, FitError, InstabilityError
from .fields import ELECTRON, electric_field, magnetic_field

__all__ = [
    "DynState",
    "Trajectory",
    "PrecessionFit",
    "lorentz_force",
    "precession_rate",
    "state_derivative",
    "integrate",
    "fit_precession_frequency",
]

_BLOWUP_LIMIT = 1e12


@dataclass(frozen=True)
class DynState:
    """Instantaneous state: position, four-velocity, rest spin, proper time."""

    x: np.ndarray
    u: np.ndarray
    s_rest: np.ndarray
    s_proper: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.x, dtype=np.float64).reshape(4)
        u = np.asarray(self.u, dtype=np.float64).reshape(4)
        s_rest = np.asarray(self.s_rest, dtype=np.float64).reshape(3)
        if not (np.all(np.isfinite(x)) and np.all(np.isfinite(u)) and np.all(np.isfinite(s_rest))):
            raise ContractError("state must be finite")
        uu = u[0] ** 2 - np.dot(u[1:], u[1:])
        if abs(uu - 1.0) > 1e-8:
            raise ContractError(f"u is off the mass shell by {uu - 1.0:.3e}")
        norm = np.linalg.norm(s_rest)
        if abs(norm - 1.0) > 1e-8:
            raise ContractError("s_rest must be a unit vector")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "s_rest", s_rest / norm)
        object.__setattr__(self, "s_proper", float(self.s_proper))


def lorentz_force(u, F, particle=ELECTRON, charge_sign=1):
    """du/ds = (q/m) F^{mu nu} u_nu; charge_sign=-1 flips particle.charge."""
    u = np.asarray(u, dtype=np.float64)
    u_lower = u.copy()
    u_lower[..., 1:4] *= -1.0
    q = charge_sign * particle.charge
    return (q / particle.mass) * np.einsum(
        "...mn,...n->...m", np.asarray(F, dtype=np.float64), u_lower
    )


def precession_rate(u, F, particle=ELECTRON, charge_sign=1):
    """Rest-spin angular velocity for a gyromagnetic ratio of exactly two.

    Omega = -(q/m) [B - (gamma/(gamma+1)) beta x E]; ds'/ds = Omega x s'.
    """
    u = np.asarray(u, dtype=np.float64)
    E = electric_field(F)
    B = magnetic_field(F)
    gamma = u[..., 0]
    beta = u[..., 1:4] / gamma[..., np.newaxis]
    factor = (gamma / (gamma + 1.0))[..., np.newaxis]
    q = charge_sign * particle.charge
    return -(q / particle.mass) * (B - factor * np.cross(beta, E))


def state_derivative(state, provider, particle=ELECTRON, charge_sign=1):
    """Right-hand side (dx/ds, du/ds, ds'/ds) with fields sampled at x."""
    _, F = provider.sample(state.x)
    if not np.all(np.isfinite(F)):
        raise ContractError("field sample is not finite")
    du = lorentz_force(state.u, F, particle, charge_sign)
    ds_rest = np.cross(precession_rate(state.u, F, particle, charge_sign), state.s_rest)
    return state.u, du, ds_rest


@dataclass(frozen=True)
class Trajectory:
    """Sampled orbit: arrays share the leading axis, s counts proper time."""

    s: np.ndarray
    x: np.ndarray
    u: np.ndarray
    s_rest: np.ndarray

    def __len__(self):
        return self.s.shape[0]

    @property
    def gamma(self):
        return self.u[:, 0]

    @property
    def beta(self):
        return self.u[:, 1:4] / self.u[:, :1]

    def mass_shell_error(self):
        """Max deviation of u.u from 1 along the orbit, an integrator diagnostic."""
        uu = self.u[:, 0] ** 2 - np.sum(self.u[:, 1:4] ** 2, axis=1)
        return float(np.max(np.abs(uu - 1.0)))

    def state(self, index):
        return DynState(
            x=self.x[index],
            u=self.u[index],
            s_rest=self.s_rest[index],
            s_proper=float(self.s[index]),
        )


def _steps_from(ds, s_max, n_steps):
    ds = float(ds)
    if not (ds > 0.0 and np.isfinite(ds)):
        raise ContractError("ds must be positive and finite")
    if (s_max is None) == (n_steps is None):
        raise ContractError("give exactly one of s_max and n_steps")
    if n_steps is None:
        s_max = float(s_max)
        if s_max < ds:
            raise ContractError("s_max must be at least ds")
        n_steps = int(round(s_max / ds))
    n_steps = int(n_steps)
    if n_steps < 1:
        raise ContractError("n_steps must be at least 1")
    return ds, n_steps


def _integrate_generic(state, provider, ds, n_steps, particle, charge_sign,
                       renormalize_spin, project_mass_shell, out_x, out_u, out_s):
    x, u, sp = state.x.copy(), state.u.copy(), state.s_rest.copy()

    def rhs(xx, uu, ss):
        probe = DynState.__new__(DynState)  # skip validation inside stages
        object.__setattr__(probe, "x", xx)
        object.__setattr__(probe, "u", uu)
        object.__setattr__(probe, "s_rest", ss)
        object.__setattr__(probe, "s_proper", 0.0)
        return state_derivative(probe, provider, particle, charge_sign)

    for step in range(1, n_steps + 1):
        k1 = rhs(x, u, sp)
        k2 = rhs(x + 0.5 * ds * k1[0], u + 0.5 * ds * k1[1], sp + 0.5 * ds * k1[2])
        k3 = rhs(x + 0.5 * ds * k2[0], u + 0.5 * ds * k2[1], sp + 0.5 * ds * k2[2])
        k4 = rhs(x + ds * k3[0], u + ds * k3[1], sp + ds * k3[2])
        x = x + (ds / 6.0) * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        u = u + (ds / 6.0) * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        sp = sp + (ds / 6.0) * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])
        if renormalize_spin:
            norm = np.linalg.norm(sp)
            if norm > 1e-300:
                sp = sp / norm
        if project_mass_shell:
            uu = u[0] ** 2 - np.dot(u[1:], u[1:])
            if uu <= 0:
                raise InstabilityError(step)
            u = u / np.sqrt(uu)
        bad = not (np.all(np.isfinite(x)) and np.all(np.isfinite(u)) and np.all(np.isfinite(sp)))
        if bad or max(np.max(np.abs(x)), np.max(np.abs(u)), np.max(np.abs(sp))) > _BLOWUP_LIMIT:
            raise InstabilityError(step)
        out_x[step], out_u[step], out_s[step] = x, u, sp


def _integrate_constant_field(state, F, ds, n_steps, particle, charge_sign,
                              renormalize_spin, project_mass_shell, out_x, out_u, out_s):
    """Scalar-unrolled RK4 for a position-independent field tensor."""
    qm = charge_sign * particle.charge / particle.mass
    # du^mu/ds = M u with M = (q/m) F^{mu nu} g_nu
    M = qm * np.asarray(F, dtype=np.float64).copy()
    M[:, 1:4] *= -1.0
    (m00, m01, m02, m03), (m10, m11, m12, m13), (m20, m21, m22, m23), (m30, m31, m32, m33) = M
    E = electric_field(F)
    B = magnetic_field(F)
    ex, ey, ez = (qm * E).tolist()
    bx, by, bz = (qm * B).tolist()

    t, x, y, z = state.x.tolist()
    u0, u1, u2, u3 = state.u.tolist()
    sx, sy, sz = state.s_rest.tolist()

    def accel(a0, a1, a2, a3):
        return (
            m00 * a0 + m01 * a1 + m02 * a2 + m03 * a3,
            m10 * a0 + m11 * a1 + m12 * a2 + m13 * a3,
            m20 * a0 + m21 * a1 + m22 * a2 + m23 * a3,
            m30 * a0 + m31 * a1 + m32 * a2 + m33 * a3,
        )

    def spin_rate(a0, a1, a2, a3, px, py, pz):
        # Omega = -(q/m) [B - (gamma/(gamma+1)) beta x E], then Omega x s;
        # (gamma/(gamma+1)) beta x E written as (u x E)/(gamma+1)
        f = 1.0 / (a0 + 1.0)
        cbx = (a2 * ez - a3 * ey) * f
        cby = (a3 * ex - a1 * ez) * f
        cbz = (a1 * ey - a2 * ex) * f
        ox = cbx - bx
        oy = cby - by
        oz = cbz - bz
        return (oy * pz - oz * py, oz * px - ox * pz, ox * py - oy * px)

    half = 0.5 * ds
    sixth = ds / 6.0
    for step in range(1, n_steps + 1):
        a1_ = accel(u0, u1, u2, u3)
        s1_ = spin_rate(u0, u1, u2, u3, sx, sy, sz)

        v0, v1, v2, v3 = (u0 + half * a1_[0], u1 + half * a1_[1],
                          u2 + half * a1_[2], u3 + half * a1_[3])
        px, py, pz = sx + half * s1_[0], sy + half * s1_[1], sz + half * s1_[2]
        a2_ = accel(v0, v1, v2, v3)
        s2_ = spin_rate(v0, v1, v2, v3, px, py, pz)
        x2_ = (v0, v1, v2, v3)

        v0, v1, v2, v3 = (u0 + half * a2_[0], u1 + half * a2_[1],
                          u2 + half * a2_[2], u3 + half * a2_[3])
        px, py, pz = sx + half * s2_[0], sy + half * s2_[1], sz + half * s2_[2]
        a3_ = accel(v0, v1, v2, v3)
        s3_ = spin_rate(v0, v1, v2, v3, px, py, pz)
        x3_ = (v0, v1, v2, v3)

        v0, v1, v2, v3 = (u0 + ds * a3_[0], u1 + ds * a3_[1],
                          u2 + ds * a3_[2], u3 + ds * a3_[3])
        px, py, pz = sx + ds * s3_[0], sy + ds * s3_[1], sz + ds * s3_[2]
        a4_ = accel(v0, v1, v2, v3)
        s4_ = spin_rate(v0, v1, v2, v3, px, py, pz)

        t += sixth * (u0 + 2.0 * x2_[0] + 2.0 * x3_[0] + v0)
        x += sixth * (u1 + 2.0 * x2_[1] + 2.0 * x3_[1] + v1)
        y += sixth * (u2 + 2.0 * x2_[2] + 2.0 * x3_[2] + v2)
        z += sixth * (u3 + 2.0 * x2_[3] + 2.0 * x3_[3] + v3)
        u0 += sixth * (a1_[0] + 2.0 * a2_[0] + 2.0 * a3_[0] + a4_[0])
        u1 += sixth * (a1_[1] + 2.0 * a2_[1] + 2.0 * a3_[1] + a4_[1])
        u2 += sixth * (a1_[2] + 2.0 * a2_[2] + 2.0 * a3_[2] + a4_[2])
        u3 += sixth * (a1_[3] + 2.0 * a2_[3] + 2.0 * a3_[3] + a4_[3])
        sx += sixth * (s1_[0] + 2.0 * s2_[0] + 2.0 * s3_[0] + s4_[0])
        sy += sixth * (s1_[1] + 2.0 * s2_[1] + 2.0 * s3_[1] + s4_[1])
        sz += sixth * (s1_[2] + 2.0 * s2_[2] + 2.0 * s3_[2] + s4_[2])

        if renormalize_spin:
            norm = sqrt(sx * sx + sy * sy + sz * sz)
            if norm > 1e-300:
                sx /= norm
                sy /= norm
                sz /= norm
        if project_mass_shell:
            uu = u0 * u0 - u1 * u1 - u2 * u2 - u3 * u3
            if uu <= 0:
                raise InstabilityError(step)
            root = sqrt(uu)
            u0 /= root
            u1 /= root
            u2 /= root
            u3 /= root
        biggest = max(abs(t), abs(x), abs(y), abs(z), abs(u0), abs(u1), abs(u2), abs(u3))
        if not biggest < _BLOWUP_LIMIT:  # also catches nan
            raise InstabilityError(step)
        out_x[step] = (t, x, y, z)
        out_u[step] = (u0, u1, u2, u3)
        out_s[step] = (sx, sy, sz)


def integrate(
    initial,
    provider,
    ds,
    s_max=None,
    n_steps=None,
    particle=ELECTRON,
    charge_sign=1,
    renormalize_spin=True,
    project_mass_shell=False,
):
    """Fixed-step RK4 over proper time; give s_max or n_steps, not both.

    Returns a Trajectory including the initial sample. Any state component
    exceeding 1e12 in magnitude (or going non-finite) aborts with
    InstabilityError carrying the offending step index.
    """
    if not isinstance(initial, DynState):
        raise ContractError("initial must be a DynState")
    if charge_sign not in (1, -1):
        raise ContractError("charge_sign must be +1 or -1")
    ds, n_steps = _steps_from(ds, s_max, n_steps)

    out_x = np.empty((n_steps + 1, 4))
    out_u = np.empty((n_steps + 1, 4))
    out_s = np.empty((n_steps + 1, 3))
    out_x[0], out_u[0], out_s[0] = initial.x, initial.u, initial.s_rest

    if getattr(provider, "constant_field", False):
        _, F = provider.sample(initial.x)
        _integrate_constant_field(initial, F, ds, n_steps, particle, charge_sign,
                                  renormalize_spin, project_mass_shell, out_x, out_u, out_s)
    else:
        _integrate_generic(initial, provider, ds, n_steps, particle, charge_sign,
                           renormalize_spin, project_mass_shell, out_x, out_u, out_s)

    return Trajectory(
        s=initial.s_proper + ds * np.arange(n_steps + 1),
        x=out_x,
        u=out_u,
        s_rest=out_s,
    )


@dataclass(frozen=True)
class PrecessionFit:
    """Least-squares rotation rate of a vector series about a fixed axis."""

    omega: float
    axis: np.ndarray
    rms_residual: float
    total_angle: float


def fit_precession_frequency(trajectory_or_s, vectors=None, axis=None):
    """Fit the uniform rotation rate of a vector series about a fixed axis.

    Accepts either a Trajectory (fits the rest-spin series) or explicit
    (s, vectors) arrays. With axis=None the axis is estimated from
    consecutive cross products and the returned omega is nonnegative; with
    a given axis the sign follows the right-hand rule about it. The series
    must resolve the rotation (tens of samples per period; phases are
    unwrapped) and cover at least one full period, otherwise FitError.
    """
    if isinstance(trajectory_or_s, Trajectory):
        if vectors is not None:
            raise ContractError("pass either a Trajectory or (s, vectors), not both")
        s = trajectory_or_s.s
        vectors = trajectory_or_s.s_rest
    else:
        s = np.asarray(trajectory_or_s, dtype=np.float64)
    s = np.asarray(s, dtype=np.float64)
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2 or vectors.shape[1] != 3 or s.shape != (vectors.shape[0],):
        raise ContractError("expected s of shape (n,) and vectors of shape (n, 3)")
    n = s.shape[0]
    if n < 10:
        raise FitError(f"need at least 10 samples, got {n}")

    if axis is None:
        crosses = np.cross(vectors[:-1], vectors[1:])
        total = crosses.sum(axis=0)
        scale = np.sum(np.linalg.norm(vectors[:-1], axis=1) * np.linalg.norm(vectors[1:], axis=1))
        if np.linalg.norm(total) < 1e-12 * max(scale, 1e-300):
            raise FitError("no rotation detected; axis estimate degenerate")
        axis = total / np.linalg.norm(total)
    else:
        axis = np.asarray(axis, dtype=np.float64).reshape(3)
        norm = np.linalg.norm(axis)
        if norm < 1e-300:
            raise FitError("axis must be nonzero")
        axis = axis / norm

    in_plane = vectors[0] - np.dot(vectors[0], axis) * axis
    if np.linalg.norm(in_plane) < 1e-9 * max(np.linalg.norm(vectors[0]), 1e-300):
        raise FitError("first vector is parallel to the rotation axis")
    e1 = in_plane / np.linalg.norm(in_plane)
    e2 = np.cross(axis, e1)

    theta = np.unwrap(np.arctan2(vectors @ e2, vectors @ e1))
    total_angle = float(theta[-1] - theta[0])
    if abs(total_angle) < 2.0 * np.pi * (1.0 - 1e-9):
        raise FitError(f"series covers {abs(total_angle):.3f} rad, need a full period")

    design = np.column_stack([s, np.ones(n)])
    coeffs, _, _, _ = np.linalg.lstsq(design, theta, rcond=None)
    residual = theta - design @ coeffs
    return PrecessionFit(
        omega=float(coeffs[0]),
        axis=axis,
        rms_residual=float(np.sqrt(np.mean(residual**2))),
        total_angle=total_angle,
    )
