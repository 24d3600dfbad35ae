from __future__ import annotations

import numpy as np

from ..optics import Basis, OpticalSegment, project_onto_basis, sample_photocount


def eve_intercept(
    pulse: OpticalSegment,
    rng: np.random.Generator,
    efficiency: float = 1.0,
) -> tuple[Basis, int | None, bool]:
    """Eve measures Alice's pulse in a uniformly random basis.

    Returns ``(basis, bit, clicked)``; ``bit`` is None on vacuum. Draw order per slot is fixed: basis,
    photocount, bit.
    """
    basis = Basis.RECTILINEAR if rng.integers(2) == 0 else Basis.DIAGONAL
    if sample_photocount(pulse.power, efficiency, rng) == 0:
        return basis, None, False
    p_d0, _ = project_onto_basis(pulse, basis)
    share = p_d0 / pulse.power
    bit = 0 if rng.random() < share else 1
    return basis, bit, True
