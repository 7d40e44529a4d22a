"""Geometric cascade channels, beamspace images and phaseless measurements."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .arrays import (
    ArrayConfig,
    cascade_dictionary,
    dft_dictionary,
    ula_response,
    upa_response,
)
from .errors import InvalidDimensionError

# Angle sectors used when sampling path geometry: azimuth away from
# endfire, elevation away from the UPA poles.
AZIMUTH_SECTOR = (-np.pi / 3, np.pi / 3)
ELEVATION_SECTOR = (np.pi / 3, 2 * np.pi / 3)


@dataclass(frozen=True)
class PathSet:
    """Complex gains and angles of one link's propagation paths.

    For the BS-IRS link the IRS-side angles are AoAs and `bs_aod` holds the
    BS-side departure angles. For the IRS-user link the IRS-side angles are
    AoDs and `bs_aod` is None.
    """

    gains: np.ndarray
    azimuth: np.ndarray
    elevation: np.ndarray
    bs_aod: np.ndarray | None = None

    def __post_init__(self):
        n = len(self.gains)
        if len(self.azimuth) != n or len(self.elevation) != n:
            raise InvalidDimensionError("angle arrays must match gain count")
        if self.bs_aod is not None and len(self.bs_aod) != n:
            raise InvalidDimensionError("bs_aod must match gain count")

    @property
    def path_count(self) -> int:
        return len(self.gains)


@dataclass(frozen=True)
class CascadeChannel:
    """Cascade channel H = diag(h_r^H) G with its beamspace image.

    `lam` is the unitary beamspace transform of `h`; `strongest` is the
    0-based (row, col) index of the largest |lam| entry, ties broken by
    lowest row then lowest column.
    """

    h: np.ndarray
    lam: np.ndarray
    strongest: tuple[int, int]
    cfg: ArrayConfig = field(repr=False)


def _argmax_2d(a: np.ndarray) -> tuple[int, int]:
    # np.argmax scans C-order, which is exactly lowest-row-then-column.
    i, j = np.unravel_index(int(np.argmax(a)), a.shape)
    return int(i), int(j)


def sample_paths(
    path_count: int,
    rician_db: float,
    rng: np.random.Generator,
    with_bs_aod: bool = False,
) -> PathSet:
    """Draw Rician path gains and uniform off-grid angles.

    Total small-scale path power is 1: the LOS path carries kappa/(kappa+1)
    with a uniformly random phase; each of the path_count-1 NLOS gains is
    circular complex Gaussian with power (1/(kappa+1))/(path_count-1).
    """
    if path_count < 1:
        raise InvalidDimensionError("path_count must be >= 1")
    if not np.isfinite(rician_db):
        raise InvalidDimensionError("rician_db must be finite")
    kappa = 10.0 ** (rician_db / 10.0)
    gains = np.empty(path_count, dtype=complex)
    if path_count == 1:
        los_power = 1.0
    else:
        los_power = kappa / (kappa + 1.0)
        nlos_power = (1.0 / (kappa + 1.0)) / (path_count - 1)
        re, im = rng.standard_normal((2, path_count - 1))
        gains[1:] = np.sqrt(nlos_power / 2.0) * (re + 1j * im)
    gains[0] = np.sqrt(los_power) * np.exp(1j * rng.uniform(0, 2 * np.pi))
    az = rng.uniform(*AZIMUTH_SECTOR, size=path_count)
    el = rng.uniform(*ELEVATION_SECTOR, size=path_count)
    aod = rng.uniform(*AZIMUTH_SECTOR, size=path_count) if with_bs_aod else None
    return PathSet(gains=gains, azimuth=az, elevation=el, bs_aod=aod)


def assemble_channels(
    bs_irs: PathSet, irs_user: PathSet, cfg: ArrayConfig
) -> CascadeChannel:
    """Build G and h_r from their paths and form the cascade channel."""
    if bs_irs.bs_aod is None:
        raise InvalidDimensionError("BS-IRS path set needs BS departure angles")
    m, n_t = cfg.m, cfg.n_t
    p = bs_irs.path_count
    g = np.zeros((m, n_t), dtype=complex)
    for gain, az, el, aod in zip(
        bs_irs.gains, bs_irs.azimuth, bs_irs.elevation, bs_irs.bs_aod
    ):
        g += gain * np.outer(upa_response(az, el, cfg), np.conj(ula_response(aod, cfg)))
    g *= np.sqrt(n_t * m / p)

    pp = irs_user.path_count
    h_r = np.zeros(m, dtype=complex)
    for gain, az, el in zip(irs_user.gains, irs_user.azimuth, irs_user.elevation):
        h_r += gain * upa_response(az, el, cfg)
    h_r *= np.sqrt(m / pp)

    h = np.conj(h_r)[:, None] * g
    return channel_from_h(h, cfg)


def channel_from_h(h: np.ndarray, cfg: ArrayConfig) -> CascadeChannel:
    """Wrap an explicit M x N_t cascade matrix with its beamspace image."""
    if h.shape != (cfg.m, cfg.n_t):
        raise InvalidDimensionError(
            f"cascade matrix must be {cfg.m} x {cfg.n_t}, got {h.shape}"
        )
    lam = cascade_dictionary(cfg).conj().T @ h @ dft_dictionary(cfg.n_t)
    return CascadeChannel(h=h, lam=lam, strongest=_argmax_2d(np.abs(lam)), cfg=cfg)


def channel_from_lambda(lam: np.ndarray, cfg: ArrayConfig) -> CascadeChannel:
    """Wrap an explicit beamspace matrix (used for planted-support studies)."""
    if lam.shape != (cfg.m, cfg.n_t):
        raise InvalidDimensionError(
            f"beamspace matrix must be {cfg.m} x {cfg.n_t}, got {lam.shape}"
        )
    h = cascade_dictionary(cfg) @ lam @ dft_dictionary(cfg.n_t).conj().T
    return CascadeChannel(h=h, lam=lam, strongest=_argmax_2d(np.abs(lam)), cfg=cfg)


def measure(
    ch: CascadeChannel,
    v: np.ndarray,
    f: np.ndarray,
    sigma: float,
    rng: np.random.Generator,
) -> float:
    """Phaseless measurement |v^H H f + n|, n ~ CN(0, sigma^2)."""
    z = np.vdot(v, ch.h @ f)
    if not np.isfinite(z):
        raise FloatingPointError("non-finite measurement value")
    if sigma > 0:
        z += complex(*rng.standard_normal(2)) * sigma / np.sqrt(2.0)
    return float(np.abs(z))


def exhaustive_search(
    ch: CascadeChannel, sigma: float, rng: np.random.Generator
):
    """Scan every (IRS beam, BS beam) grid pair and return the argmax.

    With v = sqrt(M) * barD_R(:, i) and f = D_{N_t}(:, j) the noiseless
    measurement equals sqrt(M) * |lam(i, j)|, so the whole grid can be
    measured at once.
    """
    from .decoder import AlignmentEstimate  # local import to avoid a cycle

    z = np.sqrt(ch.cfg.m) * ch.lam
    if sigma > 0:
        noise = (
            rng.standard_normal(z.shape) + 1j * rng.standard_normal(z.shape)
        ) * sigma / np.sqrt(2.0)
        z = z + noise
    i, j = _argmax_2d(np.abs(z))
    return AlignmentEstimate(
        i_star=i, j_star=j, candidate_count=z.size, nm_rounds=None,
        detector_threshold=0.0,
    )
