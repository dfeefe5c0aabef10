"""Noisy two-qubit echo simulation and single-qubit Bloch-map tomography."""

from .channels import (TwirlMode, build_channel, build_cnot_echo, build_random_echo,
                       build_twirled_cnot_echo, measure_polarization, simulate)
from .circuit import ChannelKind, Circuit
from .gates import GateKind, GateOp, RngStream, embed_single_qubit, gate_matrix, haar_su2, haar_u4
from .kak import KakDecomposition, euler_zyz, kak_decompose, kak_to_circuit
from .noise import (AttachMode, CoherentError, KrausSet, NoiseModel, NoiseModelError, apply_kraus,
                    depolarizing_kraus, load_noise_model, thermal_relaxation_kraus)
from .tomography import (AffineMap, EllipsoidReport, TomographyResult, ellipsoid_report, fidelity,
                         reconstruct_affine, run_tomography)

__version__ = "0.1.0"
