import math
import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from seifert_wrt.seifert import SeifertData, parse  # noqa: E402

M_MINUS_1 = "o;0|-1;(2,1),(3,1),(7,1)"


def random_fiber(rng: random.Random, alpha_max: int, normalized: bool) -> tuple[int, int]:
    while True:
        a = rng.randint(2, alpha_max)
        b = rng.randint(1, a - 1) if normalized else rng.randint(-2 * a, 2 * a)
        if math.gcd(a, b) == 1:
            return a, b


def random_seifert(rng: random.Random, n: int | None = None, alpha_max: int = 7, normalized: bool | None = None,
                   base: str | None = None, genus: int | None = None) -> SeifertData:
    """A random presentation; genus and base kept small so sums stay cheap."""
    n = rng.randint(0, 4) if n is None else n
    normalized = rng.random() < 0.5 if normalized is None else normalized
    base = rng.choice("oon") if base is None else base
    if genus is None:
        genus = rng.randint(1, 2) if base == "n" else rng.randint(0, 1)
    fibers = tuple(random_fiber(rng, alpha_max, normalized) for _ in range(n))
    b = rng.randint(-2, 2) if normalized else None
    return SeifertData(base, genus, b, fibers)


def random_n3_sphere(rng: random.Random, alpha_max: int = 7, h_max: int = 60) -> SeifertData:
    """Genus-0 three-fiber manifold with E != 0 and |H| <= h_max."""
    while True:
        x = SeifertData("o", 0, rng.randint(-2, 0), tuple(random_fiber(rng, alpha_max, True) for _ in range(3)))
        E = x.euler
        if E != 0 and abs(E * math.prod(x.alphas)) <= h_max:
            return x


@pytest.fixture
def m_minus_1():
    return parse(M_MINUS_1)


ACCEPTANCE: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
