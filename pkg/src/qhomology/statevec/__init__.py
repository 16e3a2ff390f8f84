from .backend import available, get_backend, set_backend
from .circuit import (Circuit, CircuitError, Diag, Gate, H, Perm, Phase, Reflect, RY, SignFlip, U,
                      X, Z)
from .simulator import (GLOBAL_ORACLE_COUNTER, OracleCounter, StateVector, apply, apply_inplace,
                        controlled_apply, inverse_qft, measure_register, qft, register_distribution,
                        sample_register)
from .layout import RegisterLayout

__all__ = [
    "available", "get_backend", "set_backend",
    "Circuit", "CircuitError", "Diag", "Gate", "H", "Perm", "Phase", "Reflect", "RY", "SignFlip", "U", "X", "Z",
    "GLOBAL_ORACLE_COUNTER", "OracleCounter", "StateVector", "apply", "apply_inplace", "controlled_apply",
    "inverse_qft", "measure_register", "qft", "register_distribution", "sample_register",
    "RegisterLayout",
]
