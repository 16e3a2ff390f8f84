from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class RegisterLayout:
    """Qubit positions of ``(a, o, e, s, t, phase)``, anchor most significant."""

    edge_width: int
    status_width: int
    phase_bits: int = 0

    def __post_init__(self):
        if self.edge_width < 0 or self.status_width < 1 or self.phase_bits < 0:
            raise ValueError("invalid register widths")

    anchor = 0
    orientation = 1

    @property
    def edge(self) -> list[int]:
        return list(range(2, 2 + self.edge_width))

    @property
    def status(self) -> list[int]:
        s0 = 2 + self.edge_width
        return list(range(s0, s0 + self.status_width))

    @property
    def rotation(self) -> int:
        return 2 + self.edge_width + self.status_width

    @property
    def phase(self) -> list[int]:
        p0 = self.system_qubits
        return list(range(p0, p0 + self.phase_bits))

    @property
    def N(self) -> int:
        return 2 + self.status_width + self.edge_width

    @property
    def system_qubits(self) -> int:
        return self.N + 1

    @property
    def total_qubits(self) -> int:
        return self.system_qubits + self.phase_bits

    @property
    def oracle_register(self) -> list[int]:
        """Contiguous ``(o, e, s)`` run the oracle permutes."""
        return [self.orientation] + self.edge + self.status

    def with_phase_bits(self, p: int) -> "RegisterLayout":
        return RegisterLayout(self.edge_width, self.status_width, p)

    def to_json(self) -> dict:
        return {"a": self.anchor, "o": self.orientation, "e": self.edge, "s": self.status,
                "t": self.rotation, "phase": self.phase, "N": self.N}
