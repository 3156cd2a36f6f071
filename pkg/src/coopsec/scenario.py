"""Physical layout of the cooperative clusters and the eavesdropper ring,
path-loss profiles, and experiment configuration loading.

Distances are in meters.  All channel gains are normalized by the gain at
the corresponding reference distance (head-to-head distance for the main
channel, head-to-eavesdropper distance for the eavesdropping channels), so
the absolute path loss at unit distance never appears.
"""

import math
from dataclasses import dataclass

import numpy as np
import yaml

__all__ = [
    "Scenario",
    "NodeLayout",
    "BetaProfile",
    "EveGainProfile",
    "path_gain",
    "sample_layout",
    "gains_from_layout",
    "load_scenario",
]


@dataclass(frozen=True)
class Scenario:
    """Static experiment geometry and SNR parameters.

    ``gamma_b`` and ``gamma_e`` are the normalized SNRs P*g_B/N0 and
    P*g_E/N0 on a linear scale.
    """

    k_tx: int
    n_rx: int
    m_eve: int
    l_locs: int
    r_t: float
    r_r: float
    d_b: float
    d_e: float
    alpha: float
    gamma_b: float
    gamma_e: float
    seed: int = 0
    # Optional explicit coordinates; override the random/ring placement.
    tx_positions: tuple | None = None
    rx_positions: tuple | None = None
    eve_positions: tuple | None = None

    def __post_init__(self):
        for name in ("k_tx", "n_rx", "m_eve", "l_locs"):
            v = getattr(self, name)
            if not (isinstance(v, (int, np.integer)) and v >= 1):
                raise ValueError(f"{name} must be an integer >= 1, got {v!r}")
        for name in ("r_t", "r_r", "d_b", "d_e"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0, got {getattr(self, name)}")
        if self.alpha < 2:
            raise ValueError(f"alpha must be >= 2, got {self.alpha}")
        if self.gamma_b <= 0 or self.gamma_e <= 0:
            raise ValueError("gamma_b and gamma_e must be > 0")


@dataclass(frozen=True)
class NodeLayout:
    """Cartesian node positions.  Head nodes are row 0 of the transmit and
    receive arrays."""

    tx_positions: np.ndarray  # (K, 2)
    rx_positions: np.ndarray  # (N, 2)
    eve_positions: np.ndarray  # (L, 2)


@dataclass(frozen=True)
class BetaProfile:
    """Normalized average main-channel gains, (N, K)."""

    beta: np.ndarray

    def __post_init__(self):
        if np.any(self.beta <= 0):
            raise ValueError("beta entries must be positive")


@dataclass(frozen=True)
class EveGainProfile:
    """Normalized average transmit-to-eavesdropper gains, (L, K)."""

    sigma: np.ndarray

    def __post_init__(self):
        if np.any(self.sigma <= 0):
            raise ValueError("sigma entries must be positive")


def path_gain(d, d_ref, alpha):
    """Normalized path gain (d_ref / d)**alpha.

    The absolute path loss constant cancels in this ratio.
    """
    if d_ref <= 0:
        raise ValueError(f"reference distance must be > 0, got {d_ref}")
    if d <= 0:
        raise ValueError(f"distance must be > 0, got {d} (coincident nodes?)")
    return (d_ref / d) ** alpha


def sample_layout(scenario, rng):
    """Draw a node layout for ``scenario``.

    Heads sit at (0, 0) and (d_b, 0).  Assisting nodes are uniform over the
    disc of the cluster radius around their head (radius = r*sqrt(u)
    transform).  Eavesdropper candidates are equally spaced on the circle of
    radius d_e around the transmit head, first at angle 0, unless explicit
    coordinates are configured.
    """

    def disc_points(count, center, radius):
        pts = np.empty((count, 2))
        pts[0] = center
        if count > 1:
            r = radius * np.sqrt(rng.uniform(size=count - 1))
            th = rng.uniform(0.0, 2.0 * math.pi, size=count - 1)
            pts[1:, 0] = center[0] + r * np.cos(th)
            pts[1:, 1] = center[1] + r * np.sin(th)
        return pts

    if scenario.tx_positions is not None:
        tx = np.asarray(scenario.tx_positions, dtype=float)
    else:
        tx = disc_points(scenario.k_tx, np.array([0.0, 0.0]), scenario.r_t)
    if scenario.rx_positions is not None:
        rx = np.asarray(scenario.rx_positions, dtype=float)
    else:
        rx = disc_points(scenario.n_rx, np.array([scenario.d_b, 0.0]), scenario.r_r)
    if scenario.eve_positions is not None:
        eve = np.asarray(scenario.eve_positions, dtype=float)
    else:
        angles = 2.0 * math.pi * np.arange(scenario.l_locs) / scenario.l_locs
        eve = scenario.d_e * np.stack([np.cos(angles), np.sin(angles)], axis=1)
    if tx.shape != (scenario.k_tx, 2):
        raise ValueError(f"tx positions shape {tx.shape} != ({scenario.k_tx}, 2)")
    if rx.shape != (scenario.n_rx, 2):
        raise ValueError(f"rx positions shape {rx.shape} != ({scenario.n_rx}, 2)")
    if eve.shape != (scenario.l_locs, 2):
        raise ValueError(f"eve positions shape {eve.shape} != ({scenario.l_locs}, 2)")
    return NodeLayout(tx_positions=tx, rx_positions=rx, eve_positions=eve)


def gains_from_layout(layout, scenario):
    """Path-gain profiles (BetaProfile, EveGainProfile) from a layout."""
    tx = layout.tx_positions
    d_rx = np.linalg.norm(layout.rx_positions[:, None, :] - tx[None, :, :], axis=2)
    d_eve = np.linalg.norm(layout.eve_positions[:, None, :] - tx[None, :, :], axis=2)
    if np.any(d_rx <= 0) or np.any(d_eve <= 0):
        raise ValueError("coincident nodes in layout: zero distance encountered")
    beta = (scenario.d_b / d_rx) ** scenario.alpha
    sigma = (scenario.d_e / d_eve) ** scenario.alpha
    return BetaProfile(beta=beta), EveGainProfile(sigma=sigma)


_SCENARIO_KEYS = {
    "k_tx": int,
    "n_rx": int,
    "m_eve": int,
    "l_locs": int,
    "r_t": float,
    "r_r": float,
    "d_b": float,
    "d_e": float,
    "alpha": float,
    "gamma_b": float,
    "gamma_e": float,
    "seed": int,
}


def load_scenario(path):
    """Load a Scenario from a YAML key/value config file.

    Recognized keys are the Scenario fields; ``gamma_b`` / ``gamma_e`` may
    instead be given in dB via ``gamma_b_db`` / ``gamma_e_db``.  Optional
    keys ``tx_positions`` / ``rx_positions`` / ``eve_positions`` are lists
    of [x, y] coordinates (meters) overriding the random/ring placement.
    """
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh)
    if not isinstance(raw, dict):
        raise ValueError(f"config file {path} does not contain a key/value mapping")
    kwargs = {}
    for key, conv in _SCENARIO_KEYS.items():
        if key in raw:
            kwargs[key] = conv(raw[key])
    for key in ("gamma_b", "gamma_e"):
        db_key = key + "_db"
        if db_key in raw:
            if key in raw:
                raise ValueError(f"config gives both {key} and {db_key}")
            kwargs[key] = 10.0 ** (float(raw[db_key]) / 10.0)
    for key in ("tx_positions", "rx_positions", "eve_positions"):
        if key in raw and raw[key] is not None:
            kwargs[key] = tuple(tuple(float(c) for c in pt) for pt in raw[key])
    unknown = set(raw) - set(_SCENARIO_KEYS) - {
        "gamma_b_db", "gamma_e_db", "tx_positions", "rx_positions", "eve_positions",
    }
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return Scenario(**kwargs)
