import random

import pytest

from weldkit.diagram import TAIL, HEAD, End, GaussDiagram


def random_diagram(rng: random.Random, n_max: int = 4, arrows_max: int = 12,
                   n_min: int = 1) -> GaussDiagram:
    n = rng.randint(n_min, n_max)
    m = rng.randint(0, arrows_max)
    signs = {}
    circles: list[list[End]] = [[] for _ in range(n)]
    for aid in range(1, m + 1):
        signs[aid] = rng.choice([1, -1])
        for role in (TAIL, HEAD):
            c = rng.randrange(n)
            pos = rng.randint(0, len(circles[c]))
            circles[c].insert(pos, End(aid, role))
    return GaussDiagram.build(signs, circles)


def random_word(rng: random.Random, n: int, max_len: int) -> tuple[int, ...]:
    letters = [g for i in range(1, n + 1) for g in (i, -i)]
    return tuple(rng.choice(letters) for _ in range(rng.randint(0, max_len)))


@pytest.fixture(scope="session")
def corpus200():
    rng = random.Random(20240817)
    return [random_diagram(rng) for _ in range(200)]
