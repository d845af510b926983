"""Fixed operator instances and seeded random samples used by the batch
driver, the oracle cross-checks and the tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .functions import AnalyticFunction, Taylor, make_test_function
from .operators import HoloMap, OperatorSymbol
from .weights import RadialWeight


@dataclass(frozen=True)
class Instance:
    name: str
    phi: str | list
    u: str | list
    n: int
    compact: bool  # known answer for the unweighted A^2 -> A^2 case

    def symbol(self) -> OperatorSymbol:
        return OperatorSymbol.parse(self.phi, self.u, self.n)


# bounded on A^2 -> A^2 (alpha = 0) with n <= 1
CORPUS: tuple[Instance, ...] = (
    Instance("identity", "identity", "constant:1", 0, False),
    Instance("scaling_0.3_n0", "scaling:0.3", "constant:1", 0, True),
    Instance("scaling_0.5_n0", "scaling:0.5", "constant:1", 0, True),
    Instance("scaling_0.7_n0", "scaling:0.7", "constant:1", 0, True),
    Instance("scaling_0.3_n1", "scaling:0.3", "constant:1", 1, True),
    Instance("scaling_0.5_n1", "scaling:0.5", "constant:1", 1, True),
    Instance("scaling_0.7_n1", "scaling:0.7", "constant:1", 1, True),
    Instance("constant_0.3_n0", "constant:0.3", "constant:1", 0, True),
    Instance("constant_0.3_n1", "constant:0.3", "taylor:0,1", 1, True),
    Instance("square_n0", "power:2", "constant:1", 0, False),
    Instance("blaschke_0.5_n0", "blaschke:0.5", "constant:1", 0, False),
    Instance("quadratic_n1", "taylor:0.1,0.5,0.2", "taylor:1,0.5", 1, True),
)


def corpus_instance(name: str) -> Instance:
    for inst in CORPUS:
        if inst.name == name:
            return inst
    raise KeyError(name)


def random_polynomial(rng: np.random.Generator, degree: int) -> Taylor:
    c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    return Taylor(c / np.sqrt(2.0))


def random_symbol(rng: np.random.Generator) -> OperatorSymbol:
    kind = rng.integers(5)
    if kind == 0:
        phi = HoloMap.scaling(rng.uniform(0.2, 0.9) * np.exp(2j * np.pi * rng.uniform()))
    elif kind == 1:
        phi = HoloMap.constant(rng.uniform(0.0, 0.8) * np.exp(2j * np.pi * rng.uniform()))
    elif kind == 2:
        phi = HoloMap.power(int(rng.integers(2, 4)))
    elif kind == 3:
        phi = HoloMap.blaschke(rng.uniform(0.0, 0.7) * np.exp(2j * np.pi * rng.uniform()))
    else:
        c0, c1 = rng.uniform(0.0, 0.4, size=2)
        phi = HoloMap.taylor([c0 * np.exp(2j * np.pi * rng.uniform()), c1])
    uc = 0.5 * (rng.standard_normal(3) + 1j * rng.standard_normal(3))
    uc[0] += 1.0
    return OperatorSymbol(phi, HoloMap.taylor(uc), int(rng.integers(0, 3)))


def random_pairs(seed: int, count: int) -> list[tuple[OperatorSymbol, AnalyticFunction, RadialWeight, float]]:
    """``count`` seeded ``(symbol, f, nu, q)`` samples."""
    rng = np.random.default_rng(seed)
    out = []
    for _ in range(count):
        op = random_symbol(rng)
        nu = RadialWeight.standard(float(rng.integers(0, 3)))
        q = float(rng.choice([1.0, 2.0, 3.0]))
        if rng.uniform() < 0.5:
            f = random_polynomial(rng, int(rng.integers(1, 9)))
        else:
            a = rng.uniform(0.0, 0.9) * np.exp(2j * np.pi * rng.uniform())
            f = make_test_function(a, 3.0, RadialWeight.standard(0.0), 2.0)
        out.append((op, f, nu, q))
    return out
