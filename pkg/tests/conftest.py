"""Shared construction helpers for the test suite."""

import numpy as np

from uwbrelay.rates import RelayChannelInstance


def make_instance(g_sd, g_sr, g_rd, n_dest=1.0, n_relay=1.0, noise_corr=None):
    """RelayChannelInstance with zero noise correlation by default."""
    g_sd = np.atleast_1d(np.asarray(g_sd, dtype=complex))
    if noise_corr is None:
        noise_corr = np.zeros(g_sd.size)
    return RelayChannelInstance(g_sd=g_sd, g_sr=g_sr, g_rd=g_rd,
                                n_dest=n_dest, n_relay=n_relay,
                                noise_corr=noise_corr)
