"""Haar-random unitary eigenangles, wrapped angle sequences and sample caches."""

from __future__ import annotations

import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import NumericalError, ParseError

__all__ = [
    "EigenangleSample",
    "SampleBatch",
    "WrappedAngles",
    "haar_unitary",
    "sample_eigenangles",
    "sample_batch",
    "weyl_density",
    "wrap_angles",
    "write_sample_cache",
    "read_sample_cache",
    "cache_dir",
]

TWO_PI = 2.0 * np.pi
_HEADER = "NCORR-SAMPLES v1 N={N}"


@dataclass(frozen=True)
class EigenangleSample:
    """Sorted eigenangles in [0, 2 pi) of one Haar unitary, with its seed."""

    N: int
    angles: np.ndarray
    seed: int | None = None

    def __post_init__(self):
        a = np.asarray(self.angles, dtype=float)
        if a.shape != (self.N,):
            raise ValueError(f"expected {self.N} angles, got shape {a.shape}")
        if np.any(a < 0) or np.any(a >= TWO_PI) or np.any(np.diff(a) < 0):
            raise ValueError("angles must be sorted and lie in [0, 2 pi)")
        object.__setattr__(self, "angles", a)


@dataclass(frozen=True)
class SampleBatch:
    """Many samples of the same N: ``angles`` has shape (count, N)."""

    N: int
    angles: np.ndarray
    seeds: np.ndarray

    def __len__(self) -> int:
        return self.angles.shape[0]

    def __getitem__(self, i: int) -> EigenangleSample:
        return EigenangleSample(self.N, self.angles[i], int(self.seeds[i]))


@dataclass(frozen=True)
class WrappedAngles:
    """theta_{r + kN} = theta_r + 2 pi k for |k| <= k_range, sorted."""

    base: EigenangleSample
    k_range: int
    angles: np.ndarray


def _gaussian(rng: np.random.Generator, N: int) -> np.ndarray:
    z = rng.standard_normal((N, N, 2))
    return (z[..., 0] + 1j * z[..., 1]) / np.sqrt(2.0)


def _haar_from_gaussian(Z: np.ndarray) -> np.ndarray:
    """QR with the phases of diag(R) moved into Q (works on stacks)."""
    Q, R = np.linalg.qr(Z)
    d = np.diagonal(R, axis1=-2, axis2=-1)
    mod = np.abs(d)
    if np.any(mod < 1e-12):
        raise NumericalError("Gaussian matrix numerically singular; QR phase undefined")
    return Q * (d / mod)[..., None, :]


def haar_unitary(N: int, rng_seed: int | None = None) -> np.ndarray:
    """One Haar-distributed N x N unitary matrix."""
    rng = np.random.default_rng(rng_seed)
    U = _haar_from_gaussian(_gaussian(rng, N))
    err = np.max(np.abs(U.conj().T @ U - np.eye(N)))
    if err > 1e-10:
        raise NumericalError(f"orthonormalisation lost unitarity ({err:.1e})")
    return U


def _angles(U: np.ndarray) -> np.ndarray:
    ev = np.linalg.eigvals(U)
    a = np.mod(np.angle(ev), TWO_PI)
    a[a >= TWO_PI] = 0.0
    return np.sort(a, axis=-1)


def sample_eigenangles(N: int, rng_seed: int) -> EigenangleSample:
    """Eigenangles of one Haar unitary; deterministic given ``rng_seed``."""
    if N < 1:
        raise ValueError("N must be >= 1")
    return EigenangleSample(N, _angles(haar_unitary(N, rng_seed)), int(rng_seed))


def _child_seeds(seed: int, count: int) -> np.ndarray:
    return np.random.SeedSequence(seed).generate_state(count, dtype=np.uint64) >> np.uint64(1)


def sample_batch(N: int, count: int, seed: int = 0, chunk: int = 4096) -> SampleBatch:
    """``count`` independent samples.  Sample i uses its own child seed, so it
    equals ``sample_eigenangles(N, batch.seeds[i])`` exactly."""
    if N < 1 or count < 0:
        raise ValueError("need N >= 1 and count >= 0")
    seeds = _child_seeds(seed, count)
    out = np.empty((count, N))
    for start in range(0, count, chunk):
        stop = min(count, start + chunk)
        Z = np.stack([_gaussian(np.random.default_rng(int(s)), N) for s in seeds[start:stop]])
        out[start:stop] = _angles(_haar_from_gaussian(Z))
    return SampleBatch(N, out, seeds)


def weyl_density(angles, N: int | None = None) -> np.ndarray | float:
    """Unnormalised joint density prod_{j<k} |e^{i theta_j} - e^{i theta_k}|^2.

    ``angles`` may carry leading batch axes; the last axis has length N.
    The normalising constant is N! (2 pi)^N.
    """
    a = np.asarray(angles, dtype=float)
    if N is not None and a.shape[-1] != N:
        raise ValueError(f"expected {N} angles on the last axis")
    e = np.exp(1j * a)
    out = np.ones(a.shape[:-1])
    for j in range(a.shape[-1]):
        for k in range(j + 1, a.shape[-1]):
            out = out * np.abs(e[..., j] - e[..., k]) ** 2
    return out[()] if out.ndim == 0 else out


def wrap_angles(sample: EigenangleSample, k_range: int) -> WrappedAngles:
    """The (2 k_range + 1) N periodic copies theta_r + 2 pi k, sorted."""
    if k_range < 0:
        raise ValueError("k_range must be >= 0")
    k = np.arange(-k_range, k_range + 1)
    wrapped = (sample.angles[None, :] + TWO_PI * k[:, None]).ravel()
    return WrappedAngles(sample, k_range, wrapped)


def cache_dir() -> Path:
    """Sample cache root: $NCORR_CACHE_DIR or ~/.cache/ncorr."""
    root = os.environ.get("NCORR_CACHE_DIR")
    return Path(root) if root else Path.home() / ".cache" / "ncorr"


def write_sample_cache(path: str | os.PathLike, batch: SampleBatch) -> None:
    """Header line, then one record per sample: seed and N angles (17 sig. digits)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="ascii") as fh:
        fh.write(_HEADER.format(N=batch.N) + "\n")
        for seed, row in zip(batch.seeds, batch.angles):
            fh.write(str(int(seed)) + " " + " ".join(f"{a:.17g}" for a in row) + "\n")


def read_sample_cache(path: str | os.PathLike) -> SampleBatch:
    path = Path(path)
    with open(path, encoding="ascii") as fh:
        header = fh.readline().strip()
        parts = header.split()
        if len(parts) != 3 or parts[:2] != ["NCORR-SAMPLES", "v1"] or not parts[2].startswith("N="):
            raise ParseError(f"{path}:1: bad header {header!r}")
        N = int(parts[2][2:])
        seeds, rows = [], []
        for lineno, line in enumerate(fh, start=2):
            if not line.strip():
                continue
            fields = line.split()
            if len(fields) != N + 1:
                raise ParseError(f"{path}:{lineno}: expected {N + 1} fields, got {len(fields)}")
            try:
                seeds.append(int(fields[0]))
                rows.append([float(x) for x in fields[1:]])
            except ValueError as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
    return SampleBatch(N, np.array(rows, dtype=float).reshape(-1, N),
                       np.array(seeds, dtype=np.uint64))


def cached_batch(N: int, count: int, seed: int, root: Path | None = None) -> SampleBatch:
    """Load a batch from the cache directory, sampling and storing it if absent."""
    root = cache_dir() if root is None else Path(root)
    path = root / f"samples_N{N}_seed{seed}_count{count}.txt"
    if path.exists():
        batch = read_sample_cache(path)
        if batch.N == N and len(batch) == count:
            return batch
    batch = sample_batch(N, count, seed)
    write_sample_cache(path, batch)
    return batch
