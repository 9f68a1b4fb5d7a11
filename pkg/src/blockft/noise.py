"""Single-qubit Pauli channels and the effective channel of one extraction round."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .pauli import PauliOperator

# API order of probability vectors is [I, X, Y, Z]. Internally a Pauli is the
# 2-bit code x + 2z (I=0, X=1, Z=2, Y=3) so that products are XORs.
_API_TO_CODE = np.array([0, 1, 3, 2])
_CODE_TO_API = np.array([0, 1, 3, 2])


@dataclass(frozen=True)
class PauliChannel:
    p_i: float
    p_x: float
    p_y: float
    p_z: float

    def __post_init__(self) -> None:
        v = self.vector
        if (v < -1e-15).any():
            raise ValueError(f"negative probability in {v}")
        if abs(v.sum() - 1.0) > 1e-12:
            raise ValueError(f"probabilities sum to {v.sum()}, not 1")

    @classmethod
    def from_vector(cls, v) -> PauliChannel:
        a = np.asarray(v, dtype=float)
        return cls(float(a[0]), float(a[1]), float(a[2]), float(a[3]))

    @classmethod
    def identity(cls) -> PauliChannel:
        return cls(1.0, 0.0, 0.0, 0.0)

    @classmethod
    def depolarizing(cls, p: float) -> PauliChannel:
        return cls(1.0 - p, p / 3, p / 3, p / 3)

    @classmethod
    def flip(cls, kind: str, p: float) -> PauliChannel:
        v = [1.0 - p, 0.0, 0.0, 0.0]
        v["IXYZ".index(kind.upper())] += p
        return cls.from_vector(v)

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.p_i, self.p_x, self.p_y, self.p_z])

    @property
    def error_rate(self) -> float:
        return self.p_x + self.p_y + self.p_z

    def __matmul__(self, other: PauliChannel) -> PauliChannel:
        return compose(self, other)


def compose(a: PauliChannel, b: PauliChannel) -> PauliChannel:
    """Channel ``a ∘ b``. Pauli channels commute, so the order only matters for bookkeeping."""
    va = a.vector[_CODE_TO_API]
    vb = b.vector[_CODE_TO_API]
    out = np.zeros(4)
    for i in range(4):
        for j in range(4):
            out[i ^ j] += va[i] * vb[j]
    return PauliChannel.from_vector(out[_API_TO_CODE])


def compose_all(*chs: PauliChannel) -> PauliChannel:
    out = PauliChannel.identity()
    for ch in chs:
        out = compose(out, ch)
    return out


@dataclass(frozen=True)
class NoiseParams:
    eps: float  # memory error rate per time step
    r: float  # ancilla preparation error rate
    p_m: float  # measurement error rate
    p_g1: float  # single-qubit gate error rate (unused by the effective channel)
    p_g2: float  # two-qubit gate error rate

    def __post_init__(self) -> None:
        for name, v in asdict(self).items():
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} is not a probability")

    @classmethod
    def uniform(cls, p: float) -> NoiseParams:
        return cls(p, p, p, p, p)

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


def _cnot_depolarized(p_g2: float) -> PauliChannel:
    """Data-qubit share of a uniformly random two-qubit gate error: 4/15 per Pauli."""
    q = 4 * p_g2 / 15
    return PauliChannel(1 - 3 * q, q, q, q)


def final_factors(params: NoiseParams) -> list[PauliChannel]:
    """Factors of the channel after an ideal round, in the order they are written."""
    pm, pg, r = params.p_m, params.p_g2, params.r
    return [
        PauliChannel.flip("X", pm),
        PauliChannel.flip("Z", pm),
        PauliChannel.flip("X", 8 * pg / 15),
        _cnot_depolarized(pg),
        PauliChannel.flip("X", 2 * r / 3),
        PauliChannel.depolarizing(r),
    ]


def initial_factors(params: NoiseParams) -> list[PauliChannel]:
    """Factors of the channel before an ideal round."""
    pm, pg, r = params.p_m, params.p_g2, params.r
    return [
        PauliChannel.flip("X", pm),
        PauliChannel.flip("Z", pm),
        _cnot_depolarized(pg),
        PauliChannel.flip("Z", 8 * pg / 15),
        PauliChannel.depolarizing(r),
        PauliChannel.flip("Z", 2 * r / 3),
    ]


def effective_channel(params: NoiseParams) -> PauliChannel:
    """Exact composition E_i ∘ E_m ∘ E_f over one round."""
    e_i = compose_all(*initial_factors(params))
    e_m = PauliChannel.depolarizing(params.eps)
    e_f = compose_all(*final_factors(params))
    return compose(compose(e_i, e_m), e_f)


def first_order_channel(params: NoiseParams) -> PauliChannel:
    """Leading-order coefficients of :func:`effective_channel`."""
    e, r, pm, pg = params.eps, params.r, params.p_m, params.p_g2
    px = e / 3 + 4 * r / 3 + 2 * pm + 16 * pg / 15
    py = e / 3 + 2 * r / 3 + 8 * pg / 15
    return PauliChannel(1 - 2 * px - py, px, py, px)


P_EFF_FACTOR = 71 / 5


def p_eff(p: float) -> float:
    """Depolarizing rate matching the first-order total error of a uniform-p round."""
    if not 0.0 <= p <= 1 / P_EFF_FACTOR:
        raise ValueError(f"p={p} outside [0, 5/71]")
    return P_EFF_FACTOR * p


# --------------------------------------------------------------------------
# sampling


def sample_pauli_codes(ch: PauliChannel, shape, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. 2-bit Pauli codes (x + 2z) with the channel's probabilities."""
    cdf = np.cumsum(ch.vector)
    u = rng.random(shape)
    api = np.searchsorted(cdf, u, side="right")
    api = np.minimum(api, 3)
    return _API_TO_CODE[api].astype(np.uint8)


def sample_pauli(ch: PauliChannel, n: int, rng: np.random.Generator) -> PauliOperator:
    codes = sample_pauli_codes(ch, n, rng)
    x = z = 0
    for q in np.flatnonzero(codes).tolist():
        c = int(codes[q])
        if c & 1:
            x |= 1 << q
        if c & 2:
            z |= 1 << q
    return PauliOperator(n, x, z)


def sample_two_qubit_gate_error(p_g2: float, rng: np.random.Generator) -> PauliOperator:
    """Identity with probability 1 - p_g2, else one of the 15 non-identity pairs uniformly."""
    if rng.random() >= p_g2:
        return PauliOperator(2)
    c = int(rng.integers(1, 16))
    a, b = c & 3, c >> 2
    return PauliOperator(2, (a & 1) | ((b & 1) << 1), (a >> 1) | ((b >> 1) << 1))
