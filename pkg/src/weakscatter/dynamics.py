"""Exact evolutions and first-order predictions.

Pure position-spin coupling applied as pointwise SU(2) rotations, full
split-step (Strang) propagation under kinetic plus Stern-Gerlach
Hamiltonian, spin post-selection, the first-order Dyson state, and the
analytic weak-displacement predictor for Gaussian packets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import integrate

from .apparatus import CouplingTensor, Window
from .errors import (
    AxisError,
    ContainmentError,
    NullPostSelection,
    RepresentationError,
    StabilityError,
)
from .grids import (
    MOMENTUM,
    POSITION,
    AXIS_INDEX,
    GaussianSpec,
    GridSpec,
    WaveField,
    edge_mass,
    make_gaussian,
    to_momentum,
    to_position,
)
from .spin import SpinorState, weak_vector

__all__ = [
    "ExperimentConfig",
    "PostSelectedResult",
    "WeakPrediction",
    "von_neumann_evolve",
    "post_select",
    "weak_displacement",
    "predict_post_selected",
    "split_step_propagate",
    "dyson_first_order",
    "free_evolve",
    "TEMPORAL",
    "SPATIAL",
]

TEMPORAL = "temporal-window"
SPATIAL = "spatial-window"

#: Above this value of hbar eta T max|H| / sigma_p a run is flagged as not weak.
WEAKNESS_THRESHOLD = 0.2

_USE_PRE = object()


@dataclass(frozen=True)
class ExperimentConfig:
    """All physical and numerical parameters of one run.

    ``window_domain`` selects whether the window gates the interaction in
    time (extent = duration T) or along the beam axis y (extent = length
    L).  For temporal windows the support must fall strictly inside the
    evolution horizon (-tau_i, tau_f).
    """

    eta: float
    window: Window
    tensor: CouplingTensor
    pre: SpinorState
    post: SpinorState
    grid: GridSpec
    packet: GaussianSpec
    hbar: float = 1.0
    mass: float = 1.0
    tau_i: float = 1.0
    tau_f: float = 1.0
    steps: int = 400
    window_domain: str = "time"

    def __post_init__(self):
        if self.eta < 0:
            raise ValueError("eta must be non-negative")
        if self.hbar <= 0 or self.mass <= 0:
            raise ValueError("hbar and mass must be positive")
        if self.tau_i <= 0 or self.tau_f <= 0 or self.steps < 1:
            raise ValueError("evolution horizon and step count must be positive")
        if self.grid.hbar != self.hbar:
            raise ValueError("grid.hbar must equal the configured hbar")
        if self.window_domain not in ("time", "space"):
            raise ValueError("window_domain must be 'time' or 'space'")
        if self.window_domain == "time":
            lo, hi = self.window.support
            if not (-self.tau_i < lo and hi < self.tau_f):
                raise ValueError(
                    "temporal window support must lie strictly inside (-tau_i, tau_f)"
                )
        else:
            self.grid.axis_pos("y")

    def coupling_time(self) -> float:
        """Duration of the coupling: the window integral, or the traversal
        time L m / |p_y| at the packet's central longitudinal momentum."""
        if self.window_domain == "time":
            return self.window.integral
        p_y = abs(self.packet.axis_center("y").real)
        if p_y == 0.0:
            raise ValueError("spatial window needs a nonzero central p_y")
        return self.window.extent * self.mass / p_y

    def weakness(self) -> float:
        """hbar eta T max|H| / sigma_p, the small parameter of the run."""
        cols = [
            name
            for name, k in AXIS_INDEX.items()
            if name in self.grid.names and np.any(self.tensor.matrix[:, k] != 0.0)
        ]
        sigma = min((self.packet.axis_sigma(n) for n in cols), default=min(self.packet.sigma))
        return self.hbar * self.eta * self.coupling_time() * self.tensor.max_entry / sigma

    @property
    def is_weak(self) -> bool:
        return self.weakness() <= WEAKNESS_THRESHOLD

    def make_packet(self, spin=_USE_PRE) -> WaveField:
        """Sample the configured packet; spin defaults to the pre-selection.

        Pass spin=None for a scalar (translational-only) field.
        """
        from dataclasses import replace

        chosen = self.pre if spin is _USE_PRE else spin
        return make_gaussian(self.grid, replace(self.packet, spin=chosen))


@dataclass(frozen=True)
class PostSelectedResult:
    """Normalized relative translational state after a spin post-selection."""

    field: WaveField
    success_amplitude: complex
    c: float

    @property
    def success_probability(self) -> float:
        return abs(self.success_amplitude) ** 2


@dataclass(frozen=True)
class WeakPrediction:
    """First-order post-selected packet plus a validity report."""

    field: WaveField
    displacement: np.ndarray
    weakness: float
    is_weak: bool
    selection_overlap: complex


def _coupling_vectors(grid: GridSpec, tensor: CouplingTensor) -> list[np.ndarray]:
    """Components of r . H on the position grid, broadcastable over it.

    Rows of H on axes missing from the grid must vanish, otherwise the
    interaction depends on an unrepresented coordinate.
    """
    active = set(grid.names)
    for name, k in AXIS_INDEX.items():
        if name not in active and np.any(tensor.matrix[k, :] != 0.0):
            raise AxisError(f"coupling needs coordinate {name!r} missing from the grid")
    comps = []
    for j in range(3):
        vj = 0.0
        for i, axis in enumerate(grid.axes):
            h = tensor.matrix[AXIS_INDEX[axis.name], j]
            if h != 0.0:
                r = grid.broadcast(grid.position_coords(i), i, spinor=False)
                vj = vj + h * r
        comps.append(vj if isinstance(vj, np.ndarray) else np.zeros((1,) * grid.ndim))
    return comps


def _su2_exp(data: np.ndarray, wx, wy, wz) -> np.ndarray:
    """Apply exp(i w . sigma) pointwise to the spinor field data."""
    theta = np.sqrt(wx**2 + wy**2 + wz**2)
    c = np.cos(theta)
    k = np.sinc(theta / np.pi)  # sin(theta)/theta, smooth at 0
    a = data[..., 0]
    b = data[..., 1]
    out = np.empty_like(data)
    out[..., 0] = (c + 1j * k * wz) * a + 1j * k * (wx - 1j * wy) * b
    out[..., 1] = 1j * k * (wx + 1j * wy) * a + (c - 1j * k * wz) * b
    return out


def _sigma_dot(data: np.ndarray, vx, vy, vz) -> np.ndarray:
    """Apply the linear operator v . sigma pointwise to the spinor field data."""
    a = data[..., 0]
    b = data[..., 1]
    out = np.empty_like(data)
    out[..., 0] = vz * a + (vx - 1j * vy) * b
    out[..., 1] = (vx + 1j * vy) * a - vz * b
    return out


def _kinetic_phase(grid: GridSpec, t: float, mass: float) -> np.ndarray:
    p2 = 0.0
    for i in range(grid.ndim):
        p = grid.broadcast(grid.momentum_coords(i), i, spinor=False)
        p2 = p2 + p**2
    return np.exp(-1j * p2 * t / (2.0 * mass * grid.hbar))


def free_evolve(f: WaveField, t: float, mass: float) -> WaveField:
    """Exact kinetic evolution by time t (a pure momentum-space phase)."""
    fp = f if f.rep == MOMENTUM else to_momentum(f)
    phase = _kinetic_phase(f.grid, t, mass)
    data = fp.data * (phase[..., None] if f.spinor else phase)
    out = WaveField(grid=f.grid, data=data, rep=MOMENTUM)
    return out if f.rep == MOMENTUM else to_position(out)


def von_neumann_evolve(
    psi: WaveField, eta: float, t_total: float, tensor: CouplingTensor
) -> WaveField:
    """Apply the interaction-only unitary exp(i eta T (R . H) . sigma).

    Exact (no time stepping): at every position the rotation has the
    closed form cos(theta) + i sin(theta) v_hat . sigma with v = r . H.
    Returns a field in the representation of the input.
    """
    if not psi.spinor:
        raise RepresentationError("von Neumann evolution needs a spinor field")
    fr = psi if psi.rep == POSITION else to_position(psi)
    vx, vy, vz = _coupling_vectors(psi.grid, tensor)
    s = eta * t_total
    data = _su2_exp(fr.data, s * vx, s * vy, s * vz)
    out = WaveField(grid=psi.grid, data=data, rep=POSITION)
    return out if psi.rep == POSITION else to_momentum(out)


def post_select(psi: WaveField, chi_f: SpinorState) -> PostSelectedResult:
    """Project onto a final spin state and renormalize the relative state."""
    if not psi.spinor:
        raise RepresentationError("post-selection needs a spinor field")
    overlap = np.tensordot(psi.data, chi_f.vec.conjugate(), axes=([-1], [0]))
    amp = float(np.sqrt(np.sum(np.abs(overlap) ** 2) * psi.dvol))
    if amp < 1e-12:
        raise NullPostSelection("post-selection overlap vanishes")
    rel = WaveField(grid=psi.grid, data=overlap / amp, rep=psi.rep)
    return PostSelectedResult(field=rel, success_amplitude=complex(amp), c=1.0 / amp)


def weak_displacement(
    chi_i: SpinorState,
    chi_f: SpinorState,
    eta: float,
    t_total: float,
    tensor: CouplingTensor,
    hbar: float = 1.0,
) -> np.ndarray:
    """First-order momentum displacement hbar eta T H . sigma_w (complex)."""
    return hbar * eta * t_total * (tensor.matrix @ weak_vector(chi_i, chi_f))


def predict_post_selected(config: ExperimentConfig) -> WeakPrediction:
    """Analytic first-order post-selected packet.

    The configured Gaussian, displaced by the complex weak displacement
    and carrying the free kinetic phase for tau_f.  The phase leaves the
    momentum density untouched (it only disperses the position profile).
    """
    from dataclasses import replace

    dp = weak_displacement(
        config.pre, config.post, config.eta, config.coupling_time(),
        config.tensor, hbar=config.hbar,
    )
    shifted = replace(config.packet, spin=None).displaced(dp)
    f = make_gaussian(config.grid, shifted)
    phase = _kinetic_phase(config.grid, config.tau_f, config.mass)
    f = WaveField(grid=config.grid, data=f.data * phase, rep=MOMENTUM)
    return WeakPrediction(
        field=f,
        displacement=dp,
        weakness=config.weakness(),
        is_weak=config.is_weak,
        selection_overlap=config.post.overlap(config.pre),
    )


def split_step_propagate(
    psi: WaveField,
    config: ExperimentConfig,
    mode: str = TEMPORAL,
    steps: Optional[int] = None,
    include_kinetic: bool = True,
) -> WaveField:
    """Strang-split propagation from -tau_i to tau_f (the brute-force oracle).

    Half-step kinetic phases in momentum space bracket a full interaction
    step applied as pointwise SU(2) rotations in position space, with the
    window evaluated at the step midpoint (temporal mode) or at the y
    coordinate (spatial mode).  Second-order accurate in the step size;
    norm-preserving by construction.  Returns a momentum-representation
    field.
    """
    if not psi.spinor:
        raise RepresentationError("propagation needs a spinor field")
    if mode not in (TEMPORAL, SPATIAL):
        raise ValueError(f"unknown mode {mode!r}")
    n_steps = config.steps if steps is None else steps
    dt = (config.tau_i + config.tau_f) / n_steps
    grid = psi.grid

    vx, vy, vz = _coupling_vectors(grid, config.tensor)
    vmax = float(np.sqrt(vx**2 + vy**2 + vz**2).max())
    if config.eta * dt * vmax >= 0.1:
        raise StabilityError(
            f"eta dt max|r.H| = {config.eta * dt * vmax:.3g} >= 0.1; increase steps"
        )

    if mode == SPATIAL:
        iy = grid.axis_pos("y")
        gy = grid.broadcast(
            config.window(grid.position_coords(iy)), iy, spinor=False
        )
        w = config.eta * dt * gy
        wx, wy, wz = w * vx, w * vy, w * vz
    else:
        s = config.eta * dt
        wx, wy, wz = s * vx, s * vy, s * vz

    # The whole run happens in unshifted FFT order; the per-axis ifftn/fftn
    # pair is exactly unitary, so the momentum-space scale cancels.
    axes = tuple(range(grid.ndim))

    def fft_order(a):
        a = np.broadcast_to(a, grid.shape).astype(a.dtype, copy=True)
        return np.fft.ifftshift(a, axes=axes)

    wx, wy, wz = fft_order(wx), fft_order(wy), fft_order(wz)
    k_half = (
        fft_order(_kinetic_phase(grid, 0.5 * dt, config.mass))[..., None]
        if include_kinetic
        else None
    )

    fp = psi if psi.rep == MOMENTUM else to_momentum(psi)
    data = np.fft.ifftshift(fp.data, axes=axes)

    for k in range(n_steps):
        if k_half is not None:
            data = data * k_half
        if mode == TEMPORAL:
            t_mid = -config.tau_i + (k + 0.5) * dt
            g = float(config.window(t_mid))
            active = config.eta != 0.0 and g != 0.0
        else:
            g = 1.0
            active = config.eta != 0.0
        if active:
            data = np.fft.ifftn(data, axes=axes)
            if g != 1.0:
                data = _su2_exp(data, g * wx, g * wy, g * wz)
            else:
                data = _su2_exp(data, wx, wy, wz)
            data = np.fft.fftn(data, axes=axes)
        if k_half is not None:
            data = data * k_half

    out = WaveField(grid=grid, data=np.fft.fftshift(data, axes=axes), rep=MOMENTUM)
    if edge_mass(out) > 1e-6 or edge_mass(to_position(out)) > 1e-6:
        raise ContainmentError("packet reached the grid boundary during the run")
    return out


def dyson_first_order(
    psi: WaveField, config: ExperimentConfig
) -> tuple[WaveField, float]:
    """First-order interaction-picture state for a temporal window.

    Input is the interaction-picture initial state (the physical packet
    free-counter-evolved to the t = 0 reference).  Returns the state

        psi + i eta [m0 (R . H . sigma) + (m1 / m)(P . H . sigma)] psi

    with m0, m1 the window's zeroth and first time moments evaluated by
    quadrature, plus the norm of the P-term contribution, which vanishes
    for a window symmetric about the origin.
    """
    if not psi.spinor:
        raise RepresentationError("first-order evolution needs a spinor field")
    if config.window_domain != "time":
        raise ValueError("first-order Dyson state is defined for temporal windows")
    lo, hi = config.window.support
    pts = [lo, hi]
    m0, _ = integrate.quad(config.window, -config.tau_i, config.tau_f, points=pts)
    m1, _ = integrate.quad(
        lambda t: t * config.window(t), -config.tau_i, config.tau_f, points=pts
    )

    fp = psi if psi.rep == MOMENTUM else to_momentum(psi)

    fr = to_position(fp)
    vx, vy, vz = _coupling_vectors(psi.grid, config.tensor)
    r_term = to_momentum(
        WaveField(grid=psi.grid, data=_sigma_dot(fr.data, vx, vy, vz), rep=POSITION)
    )

    ux, uy, uz = 0.0, 0.0, 0.0
    for i, axis in enumerate(psi.grid.axes):
        p = psi.grid.broadcast(psi.grid.momentum_coords(i), i, spinor=False)
        row = config.tensor.matrix[AXIS_INDEX[axis.name]]
        ux = ux + row[0] * p
        uy = uy + row[1] * p
        uz = uz + row[2] * p
    p_data = _sigma_dot(fp.data, ux, uy, uz)

    data = (
        fp.data
        + 1j * config.eta * m0 * r_term.data
        + 1j * config.eta * (m1 / config.mass) * p_data
    )
    p_mag = (
        config.eta
        * abs(m1)
        / config.mass
        * float(np.sqrt(np.sum(np.abs(p_data) ** 2) * psi.grid.dvol_p))
    )
    return WaveField(grid=psi.grid, data=data, rep=MOMENTUM), p_mag
