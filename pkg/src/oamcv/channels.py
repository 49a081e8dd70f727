"""Lossy and noisy single-mode channel acting on the probe half of a state.

The probe mode undergoes a -> sqrt(eta) a + sqrt(1 - eta)(eps + mu) with a
vacuum mode mu and a noise mode eps of variance delta, so the probe block
of the covariance matrix maps to eta*B + (1 - eta)(1 + delta)*I while the
conjugate block stays with Alice untouched.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import UnphysicalStateError
from .gaussian import (ChannelParams, CovarianceMatrix, ModePair, MultiplexedState,
                       as_cm, validate)


def apply_channel(cm, ch) -> CovarianceMatrix:
    """Distribute the probe mode through a channel with parameters (eta, delta).

    Cross correlations scale by sqrt(eta).  For a symmetric two-mode squeezed
    input this yields V_b = eta*(v + vp)/2 + (1 - eta)(1 + delta) and
    V_c = sqrt(eta)*(vp - v)/2 exactly, with V_a unchanged.
    """
    cm = as_cm(cm)
    if not isinstance(ch, ChannelParams):
        ch = ChannelParams(*ch)
    report = validate(cm)
    if not report.ok:
        raise UnphysicalStateError(
            f"input state is unphysical (min symplectic eigenvalue {report.min_symplectic:.6g})")
    root_eta = math.sqrt(ch.eta)
    added = (1.0 - ch.eta) * (1.0 + ch.delta)
    out = np.array(cm.entries)
    out[2:, 2:] = ch.eta * cm.entries[2:, 2:] + added * np.eye(2)
    out[:2, 2:] = root_eta * cm.entries[:2, 2:]
    out[2:, :2] = out[:2, 2:].T
    return CovarianceMatrix(out)


def apply_channel_multiplexed(ms: MultiplexedState, ch) -> MultiplexedState:
    """Apply the same channel independently to every charge of a multiplexed state.

    The transform does not depend on the charge label, so identical input
    states give identical outputs at every l; independence is preserved.
    """
    return MultiplexedState({l: ModePair(pair.spec, apply_channel(pair.cm, ch))
                             for l, pair in ms.items()})
