"""Balanced-binary-tree polar codes: construction, encoding, SC/SCL/PSC decoding, FER bounds."""
from .bounds import fer_bounds, psi_func, q_func
from .channel import channel_llrs, sigma_from_ebn0
from .codec import CRC11, OpCounter, ca_scl_decode, encode, sc_decode, scl_decode
from .construction import RateProfile, construct, construct_ga, construct_mhw, construct_pw
from .psc import extract_subtree, llr_op_count, psc_decode, pscl_decode
from .sim import SimConfig, run_simulation
from .tree import build_coding_tree, combine, generator_matrix, split

__version__ = "0.1.0"

__all__ = [
    "CRC11",
    "OpCounter",
    "RateProfile",
    "SimConfig",
    "build_coding_tree",
    "ca_scl_decode",
    "channel_llrs",
    "combine",
    "construct",
    "construct_ga",
    "construct_mhw",
    "construct_pw",
    "encode",
    "extract_subtree",
    "fer_bounds",
    "generator_matrix",
    "llr_op_count",
    "psc_decode",
    "pscl_decode",
    "psi_func",
    "q_func",
    "run_simulation",
    "sc_decode",
    "scl_decode",
    "sigma_from_ebn0",
    "split",
]
