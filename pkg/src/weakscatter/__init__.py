"""Weak spin-1/2 measurements in a Stern-Gerlach beam.

Two independent routes to the post-selected displacement of a wave
packet: exact unitary propagation (split-step spectral oracle) and
first-order collision theory on the energy shell.  Both reduce to the
same weak-vector displacement, with the traversal time L m / |p_y|
playing the role of the interaction duration.
"""

from .apparatus import (
    CouplingTensor,
    FieldGradients,
    Window,
    backscatter_ratio,
    coupling_from_gradients,
    validate_maxwell,
    window_fourier,
)
from .collision import (
    EnergyShellKernel,
    SliceDisplacements,
    TransitionAmplitude,
    effective_time,
    energy_shell_kernel,
    moller_asymptotic_check,
    py_resolved_displacement,
    t_matrix_element_direct,
    transition_amplitude,
)
from .dynamics import (
    ExperimentConfig,
    PostSelectedResult,
    WeakPrediction,
    dyson_first_order,
    free_evolve,
    post_select,
    predict_post_selected,
    split_step_propagate,
    von_neumann_evolve,
    weak_displacement,
)
from .grids import (
    GaussianSpec,
    GridAxis,
    GridSpec,
    Moments,
    WaveField,
    displace,
    make_gaussian,
    moments,
    slice_heatmap,
    to_momentum,
    to_position,
)
from .spin import (
    SpinorState,
    UnitDirection,
    WeakTensor,
    eigenspinor,
    pauli_along,
    weak_tensor,
    weak_vector,
)

__version__ = "0.1.0"
