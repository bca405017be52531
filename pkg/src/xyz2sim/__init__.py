"""XYZ² hexagonal stabilizer code: construction, biased noise, ML decoding, thresholds."""

__version__ = "0.1.0"

from .pauli import BitMatrix, PauliOperator, commutes, gf2_nullspace, gf2_rank, gf2_solve, pauli_mul, weight
from .codes import (
    ParameterError,
    StabilizerCode,
    build_rotated_surface,
    build_xyz2,
    build_xzzx,
    code_from_text,
    code_to_text,
    double_qubits,
    hadamard_transform,
    relabel_letters,
    same_stabilizer_group,
)
from .validation import CapabilityError, ValidationReport, min_weight_logical, validate_code
from .noise import NoiseParams, chain_log_prob, make_noise, parse_noise, sample_chain
from .decoding import (
    DecodeResult,
    DecoderConfig,
    Syndrome,
    ewd_decode,
    exact_mld_decode,
    logical_class,
    make_decoder_config,
    pure_error,
    syndrome,
)
from .analytic import analytic_pf_pure, analytic_ps_pure
