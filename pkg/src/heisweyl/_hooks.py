"""Switches that deliberately break conventions, for mutation tests only."""

from contextlib import contextmanager

ENABLED = {"zeta_correction": True, "psi_phase": True}


@contextmanager
def mutate(*, zeta_correction=True, psi_phase=True):
    saved = dict(ENABLED)
    ENABLED.update(zeta_correction=zeta_correction, psi_phase=psi_phase)
    try:
        yield
    finally:
        ENABLED.update(saved)
