"""Bundled example complexes, pairs and maps, plus a seeded generator of random attachments."""

from __future__ import annotations

import random

from .errors import AttachmentNotClosedError, HypothesisViolation, ValidationError
from .tcomplex import (
    AdmissibleComplex,
    AttachmentCochain,
    CochainMap,
    attach_free_cell,
    free_summand,
    identity_map,
    projection_map,
    sphere,
    wedge,
    xab,
)

FUZZ_SEED = 20240611
FUZZ_COUNT = 500
FUZZ_MAX_GENERATORS = 12


def trivial_attachment(ell: int, h: int) -> AdmissibleComplex:
    """S^{ell,h} wedge a free cell in degree ell + 2h, with nothing attached."""
    c = wedge(sphere(ell, h), free_summand(ell + 2 * h))
    return AdmissibleComplex.build(c.generators, c.diff, False, f"A({ell},{h})")


def constructor_corpus() -> list[AdmissibleComplex]:
    return [
        sphere(0, 0),
        sphere(0, 1),
        sphere(0, 2),
        sphere(1, 1),
        sphere(1, 2),
        sphere(2, 1),
        trivial_attachment(0, 1),
        trivial_attachment(1, 1),
        xab(0, 1, 2, 3),
        xab(0, 1, 2, 5),
        xab(0, 1, 3, 2),
        xab(0, 1, 0, 1),
        xab(0, 1, 1, 0),
        xab(0, 1, 6, 4),
        xab(1, 1, 2, 3),
        xab(0, 2, 3, 2),
        xab(2, 0, 5, 7),
    ]


def corpus_pairs() -> list[tuple]:
    return [
        (xab(0, 1, 2, 3), xab(0, 1, 2, 5)),
        (xab(0, 1, 2, 3), xab(0, 1, 2, 3)),
        (sphere(0, 1), xab(0, 1, 2, 3)),
        (sphere(1, 1), sphere(0, 2)),
        (xab(0, 1, 1, 0), xab(1, 1, 2, 3)),
    ]


def strict_pairs() -> list[tuple]:
    return [(xab(0, 1, 2, 3), xab(0, 1, 2, 5))]


def scaled_identity(c: AdmissibleComplex, k: int) -> CochainMap:
    return CochainMap.of(c, c, [(g.id, g.id, k) for g in c.generators])


def corpus_maps() -> list[CochainMap]:
    return [
        identity_map(xab(0, 1, 2, 3)),
        projection_map(sphere(0, 2), sphere(0, 1)),
        projection_map(xab(0, 1, 2, 3), trivial_attachment(0, 1)),
        projection_map(xab(0, 1, 1, 0), trivial_attachment(0, 1)),
        scaled_identity(xab(0, 1, 2, 3), 2),
        scaled_identity(sphere(1, 1), 0),
    ]


def _legal_targets(c: AdmissibleComplex, n: int) -> list[str]:
    # a new cell in degree n+1 may receive from generators of degree n, n+2, ...
    return [g.id for g in c.generators if g.degree >= n and (g.degree - n) % 2 == 0]


def random_complex(rng: random.Random, max_generators=FUZZ_MAX_GENERATORS) -> AdmissibleComplex:
    """One random admissible model built from a sphere, free summands and attachments."""
    while True:
        ell, h = rng.randint(0, 2), rng.randint(0, 2)
        c = sphere(ell, h)
        for _ in range(rng.randint(0, 2)):
            c = wedge(c, free_summand(rng.randint(max(ell, 1), ell + 2 * h + 1)))
        attached = 0
        for _ in range(rng.randint(1, 2)):
            if len(c.generators) + 2 > max_generators or c.d_max < 2:
                break
            n = rng.randint(2, c.d_max)
            targets = _legal_targets(c, n)
            if not targets:
                continue
            chosen = rng.sample(targets, rng.randint(1, min(3, len(targets))))
            cochain = AttachmentCochain.of(n, {g: rng.randint(-6, 6) for g in chosen})
            try:
                c = attach_free_cell(c, cochain)
                attached += 1
            except (AttachmentNotClosedError, ValidationError, HypothesisViolation):
                continue
        if attached and c.admissible and len(c.generators) <= max_generators:
            return c


def fuzz_corpus(count=FUZZ_COUNT, seed=FUZZ_SEED) -> list[AdmissibleComplex]:
    rng = random.Random(seed)
    out = []
    for i in range(count):
        c = random_complex(rng)
        out.append(AdmissibleComplex.build(c.generators, c.diff, False, f"fuzz[{i}]"))
    return out
