"""Time-independent (scattering) route to the weak measurement.

First-order transition amplitudes built from the windowed position
operator on the energy shell, the effective traversal time L m / |p_y|
that maps the scattering description onto the time-gated one, dual
evaluations of the windowed position matrix element, and an asymptotic
(wavepacket) check of the free-in/full-out factorization.

The on-shell kernel m/|p_y| is singular at p_y = 0; grid entries inside
a cutoff are excluded and the excluded packet mass is reported instead
of regularizing the divergence away.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import integrate, special

from .apparatus import CouplingTensor, Window, window_fourier
from .dynamics import SPATIAL, ExperimentConfig, free_evolve, split_step_propagate
from .errors import (
    AxisError,
    DivergentInteraction,
    GeometryError,
    QuadratureError,
)
from .grids import (
    AXIS_INDEX,
    MOMENTUM,
    GaussianSpec,
    GridSpec,
    WaveField,
    inner,
    make_gaussian,
    position_weight,
)
from .spin import SpinorState, weak_vector

__all__ = [
    "TransitionAmplitude",
    "EnergyShellKernel",
    "SliceDisplacements",
    "t_matrix_element_direct",
    "energy_shell_kernel",
    "effective_time",
    "transition_amplitude",
    "py_resolved_displacement",
    "moller_asymptotic_check",
    "default_p_cut",
]


def _boxcar_transform(q: float, extent: float, hbar: float) -> float:
    """sin(q L / 2 hbar) / (pi q), continuous at q = 0."""
    u = q * extent / (2.0 * hbar)
    return (extent / (2.0 * np.pi * hbar)) * float(np.sinc(u / np.pi))


def _boxcar_transform_deriv(q: float, extent: float, hbar: float) -> float:
    """d/dq of the boxcar transform, with a series branch near q = 0."""
    u = q * extent / (2.0 * hbar)
    scale = (extent / (2.0 * np.pi * hbar)) * (extent / (2.0 * hbar))
    if abs(u) < 1e-3:
        return scale * (-u / 3.0 + u**3 / 30.0 - u**5 / 840.0)
    return scale * (u * np.cos(u) - np.sin(u)) / u**2


def _quad_complex(f, lo: float, hi: float) -> complex:
    re, _ = integrate.quad(lambda y: f(y).real, lo, hi, limit=300)
    im, _ = integrate.quad(lambda y: f(y).imag, lo, hi, limit=300)
    return complex(re, im)


def t_matrix_element_direct(
    p_out,
    p_in,
    w: Window,
    tensor: Optional[CouplingTensor] = None,
    hbar: float = 1.0,
    rtol: float = 1e-8,
) -> np.ndarray:
    """Windowed position matrix element <p_out| g(R) R |p_in>, cross-checked.

    The element is evaluated over a separable boxcar support (extent of
    ``w`` on every axis, so all components stay finite) in two independent
    ways: direct numerical quadrature of the defining Fourier integral,
    and the analytic reduction -i hbar grad_p of the product of sinc
    transforms.  Disagreement beyond ``rtol`` raises QuadratureError.

    Returns the analytic vector, contracted with ``tensor`` when given.
    """
    if w.center != 0.0:
        raise ValueError("dual-route element is implemented for centered windows")
    q = np.asarray(p_out, dtype=float) - np.asarray(p_in, dtype=float)
    if q.shape != (3,):
        raise ValueError("momenta must be 3-vectors")
    half = 0.5 * w.extent
    pref = 1.0 / (2.0 * np.pi * hbar)

    q0 = np.empty(3, dtype=complex)
    q1 = np.empty(3, dtype=complex)
    for k in range(3):
        qk = q[k]
        q0[k] = pref * _quad_complex(
            lambda y: np.exp(-1j * qk * y / hbar), -half, half
        )
        q1[k] = pref * _quad_complex(
            lambda y: y * np.exp(-1j * qk * y / hbar), -half, half
        )

    direct = np.empty(3, dtype=complex)
    reduced = np.empty(3, dtype=complex)
    for k in range(3):
        others_num = np.prod([q0[j] for j in range(3) if j != k])
        others_ana = np.prod(
            [_boxcar_transform(q[j], w.extent, hbar) for j in range(3) if j != k]
        )
        direct[k] = q1[k] * others_num
        reduced[k] = 1j * hbar * _boxcar_transform_deriv(q[k], w.extent, hbar) * others_ana

    scale = hbar * (w.extent / (2.0 * np.pi * hbar)) ** 3 * w.extent
    denom = max(np.linalg.norm(direct), np.linalg.norm(reduced))
    if np.linalg.norm(direct - reduced) > max(rtol * denom, 1e-12 * scale):
        raise QuadratureError(
            f"quadrature {direct} vs analytic {reduced} disagree beyond rtol={rtol}"
        )
    return reduced @ tensor.matrix if tensor is not None else reduced


@dataclass(frozen=True)
class EnergyShellKernel:
    """On-shell decomposition of delta(p'^2/2m - p^2/2m) on a p_y grid.

    ``weight`` holds m/|p_y| (zero on excluded entries inside the cutoff),
    ``partner`` the index of the reflected momentum -p_y, and
    ``has_partner`` whether that reflection lies on the grid.
    """

    p_y: np.ndarray
    weight: np.ndarray
    included: np.ndarray
    partner: np.ndarray
    has_partner: np.ndarray
    p_cut: float
    mass: float


def default_p_cut(grid: GridSpec) -> float:
    """Four grid spacings along y, the default singularity exclusion."""
    return 4.0 * grid.axes[grid.axis_pos("y")].dp


def energy_shell_kernel(grid: GridSpec, mass: float, p_cut: float) -> EnergyShellKernel:
    """Build the transmission/reflection shell weights on the y axis."""
    if p_cut <= 0:
        raise ValueError("p_cut must be positive")
    iy = grid.axis_pos("y")
    p = grid.momentum_coords(iy)
    included = np.abs(p) >= p_cut
    weight = np.zeros_like(p)
    weight[included] = mass / np.abs(p[included])
    n = len(p)
    idx = np.arange(n)
    partner = (n - idx) % n
    has_partner = idx != 0  # -p_max has no mirror on [-p_max, p_max)
    return EnergyShellKernel(
        p_y=p,
        weight=weight,
        included=included,
        partner=partner,
        has_partner=has_partner,
        p_cut=p_cut,
        mass=mass,
    )


def effective_time(p_y: float, extent: float, mass: float, p_cut: float = 0.0) -> float:
    """Traversal time L m / |p_y| of an apparatus of length L."""
    if abs(p_y) <= p_cut or p_y == 0.0:
        raise DivergentInteraction(
            f"|p_y| = {abs(p_y):.3g} at or below the cutoff {p_cut:.3g}"
        )
    return extent * mass / abs(p_y)


@dataclass(frozen=True)
class TransitionAmplitude:
    """Zeroth- plus first-order transition amplitude between packet states."""

    zeroth: complex
    first: complex
    first_reflection: complex
    p_term_ratio: float
    excluded_mass: float

    @property
    def total(self) -> complex:
        return self.zeroth + self.first


def _excluded_mass(phi: WaveField, included: np.ndarray, iy: int) -> float:
    rho = phi.density()
    mask = phi.grid.broadcast(~included, iy, spinor=False)
    total = rho.sum()
    return float((rho * mask).sum() / total) if total > 0 else 0.0


def transition_amplitude(
    phi_i: WaveField,
    phi_f: WaveField,
    chi_i: SpinorState,
    chi_f: SpinorState,
    config: ExperimentConfig,
    include_reflection: bool = False,
    p_cut: Optional[float] = None,
) -> TransitionAmplitude:
    """First-order scattering amplitude for a spatial window along y.

    zeroth = <phi_f|phi_i><chi_f|chi_i>; the order-eta term contracts the
    windowed position operator on the transmission branch of the energy
    shell with H . sigma_w.  The reflection branch, suppressed by the
    window transform at momentum transfer 2 p_y, is off by default.
    """
    if phi_i.spinor or phi_f.spinor:
        raise ValueError("transition amplitude takes translational (scalar) states")
    if phi_i.rep != MOMENTUM or phi_f.rep != MOMENTUM:
        raise ValueError("packet states must be in the momentum representation")
    if phi_i.grid != phi_f.grid:
        raise ValueError("packet states must share a grid")
    grid = phi_i.grid
    iy = grid.axis_pos("y")
    kernel = energy_shell_kernel(
        grid, config.mass, default_p_cut(grid) if p_cut is None else p_cut
    )

    excl = max(
        _excluded_mass(phi_i, kernel.included, iy),
        _excluded_mass(phi_f, kernel.included, iy),
    )
    if excl > 1e-6:
        raise DivergentInteraction(
            f"packet mass {excl:.3e} sits inside the p_y cutoff"
        )

    sw = weak_vector(chi_i, chi_f)
    h_sw = config.tensor.matrix @ sw
    s_overlap = chi_f.overlap(chi_i)
    zeroth = s_overlap * inner(phi_f, phi_i)

    g0 = float(window_fourier(config.window, 0.0, config.hbar))
    wgt = grid.broadcast(kernel.weight, iy, spinor=False)

    t_dot = 0.0j
    refl_dot = 0.0j
    if include_reflection:
        g2 = np.asarray(window_fourier(config.window, 2.0 * kernel.p_y, config.hbar))
        g2 = g2 * kernel.has_partner  # drop the unpaired -p_max entry
        g2b = grid.broadcast(g2, iy, spinor=False)
    for name, k in AXIS_INDEX.items():
        if h_sw[k] == 0.0:
            continue
        if name not in grid.names:
            raise AxisError(f"coupling targets axis {name!r} missing from the grid")
        r_phi = position_weight(phi_i, name)
        t_dot += h_sw[k] * complex(
            np.sum(phi_f.data.conjugate() * wgt * r_phi.data) * grid.dvol_p
        ) * g0
        if include_reflection:
            b = np.take(g2b * wgt * r_phi.data, kernel.partner, axis=iy)
            refl_dot += h_sw[k] * complex(
                np.sum(phi_f.data.conjugate() * b) * grid.dvol_p
            )

    pref = 2j * np.pi * config.hbar * config.eta * s_overlap
    first_refl = pref * refl_dot if include_reflection else 0.0j

    # Measured size of the neglected momentum term: transverse over
    # longitudinal momentum scales on the actual incoming packet.
    rho = phi_i.density()
    p2 = {}
    for i in range(grid.ndim):
        c = grid.broadcast(grid.momentum_coords(i), i, spinor=False)
        p2[grid.axes[i].name] = float((rho * c**2).sum() * grid.dvol_p)
    transverse = sum(v for n, v in p2.items() if n != "y" and h_sw[AXIS_INDEX[n]] != 0.0)
    ratio = float(np.sqrt(transverse / p2["y"])) if p2.get("y") else float("nan")

    return TransitionAmplitude(
        zeroth=zeroth,
        first=pref * t_dot + first_refl,
        first_reflection=first_refl,
        p_term_ratio=ratio,
        excluded_mass=excl,
    )


@dataclass(frozen=True)
class SliceDisplacements:
    """Per-p_y first-order displacement map (the exact 1/|p_y| law)."""

    p_y: np.ndarray
    displacement: np.ndarray  # shape (n, 3), complex
    t_eff: np.ndarray
    excluded_mass: float


def py_resolved_displacement(
    packet: GaussianSpec,
    config: ExperimentConfig,
    p_cut: Optional[float] = None,
) -> SliceDisplacements:
    """Displacement hbar eta T_eff(p_y) H . sigma_w for every kept p_y slice.

    The product displacement * |p_y| is slice-independent by construction;
    packets with more than 1e-6 of their longitudinal mass inside the
    cutoff are rejected as divergent.
    """
    grid = config.grid
    iy = grid.axis_pos("y")
    cut = default_p_cut(grid) if p_cut is None else p_cut
    mu = packet.axis_center("y").real
    sigma = packet.axis_sigma("y")
    lo = (-cut - mu) / (np.sqrt(2.0) * sigma)
    hi = (cut - mu) / (np.sqrt(2.0) * sigma)
    mass_below = 0.5 * float(special.erf(hi) - special.erf(lo))
    if mass_below > 1e-6:
        raise DivergentInteraction(
            f"packet mass {mass_below:.3e} below the p_y cutoff {cut:.3g}"
        )

    kernel = energy_shell_kernel(grid, config.mass, cut)
    h_sw = config.tensor.matrix @ weak_vector(config.pre, config.post)
    p_kept = kernel.p_y[kernel.included]
    t_eff = config.window.extent * config.mass / np.abs(p_kept)
    disp = (config.hbar * config.eta * t_eff)[:, None] * h_sw[None, :]
    return SliceDisplacements(
        p_y=p_kept, displacement=disp, t_eff=t_eff, excluded_mass=mass_below
    )


def moller_asymptotic_check(
    config: ExperimentConfig,
    standoff: float,
    checkpoints: int = 8,
) -> float:
    """Max norm difference between free and full evolution while incoming.

    The packet starts centered at y = -standoff moving in +y; while its
    support stays outside the window, full evolution must match pure
    kinetic evolution, which is the wavepacket content of the free-to-
    scattering mapping.  The per-checkpoint difference is monotone in the
    tail overlap, so larger standoffs give smaller residuals.
    """
    if config.window_domain != "space":
        raise ValueError("the asymptotic check needs a spatial window")
    grid = config.grid
    iy = grid.axis_pos("y")
    sigma_py = config.packet.axis_sigma("y")
    sigma_ry = config.hbar / (2.0 * sigma_py)
    half_l = 0.5 * config.window.extent
    if standoff <= half_l + 5.0 * sigma_ry:
        raise GeometryError(
            f"standoff {standoff:.3g} too small; need > L/2 + 5 sigma_r = "
            f"{half_l + 5 * sigma_ry:.3g}"
        )
    p_y0 = config.packet.axis_center("y").real
    if p_y0 <= 0:
        raise GeometryError("packet must move in +y")
    drift = config.tau_i * p_y0 / config.mass
    if -standoff + drift > -half_l:
        raise GeometryError("approach segment would enter the window support")
    box_y = 2.0 * np.pi * config.hbar / grid.axes[iy].dp
    if standoff + 5.0 * sigma_ry > 0.5 * box_y:
        raise GeometryError("position box too small for the requested standoff")

    # Imaginary momentum center places the packet at y = -standoff.
    c = np.asarray(config.packet.center, dtype=complex)
    c[AXIS_INDEX["y"]] = p_y0 + 2j * sigma_py**2 * standoff / config.hbar
    spec = replace(config.packet, center=tuple(c), spin=config.pre)
    psi0 = make_gaussian(grid, spec)

    residual = 0.0
    dt_target = config.tau_i / config.steps
    for c_idx in range(1, checkpoints + 1):
        duration = config.tau_i * c_idx / checkpoints
        f_free = free_evolve(psi0, duration, config.mass)
        seg = replace(config, tau_i=duration / 2.0, tau_f=duration / 2.0)
        n_steps = max(1, round(duration / dt_target))
        f_full = split_step_propagate(psi0, seg, mode=SPATIAL, steps=n_steps)
        diff = np.sqrt(np.sum(np.abs(f_free.data - f_full.data) ** 2) * grid.dvol_p)
        residual = max(residual, float(diff))
    return residual
