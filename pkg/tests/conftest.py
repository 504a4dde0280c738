"""Shared brute-force oracles, kept independent of the library's code paths."""

from itertools import permutations

import pytest


def brute_permanent(values, n):
    """Permanent of a row-major n x n matrix by summing over all permutations."""
    total = 0
    for perm in permutations(range(n)):
        term = 1
        for i, j in enumerate(perm):
            term *= values[i * n + j]
        total += term
    return total


def brute_hamiltonian_cycle(values, n):
    """Sum over successor permutations that form a single n-cycle."""
    total = 0
    for perm in permutations(range(n)):
        if not is_single_cycle(perm, n):
            continue
        term = 1
        for i, j in enumerate(perm):
            term *= values[i * n + j]
        total += term
    return total


def is_single_cycle(successor, n):
    at, steps = 0, 0
    while steps < n:
        at = successor[at]
        steps += 1
        if at == 0:
            break
    return at == 0 and steps == n


def lex_permutations(n):
    """All one-line permutations of range(n) in lexicographic order.

    Lexicographic order of one-line notation coincides with factorial-number-
    system order, so this doubles as an independent ranking oracle.
    """
    return list(permutations(range(n)))


def lex_cycles(n):
    """Successor maps of all n-cycles, ordered by their visit sequence after 0."""
    out = []
    for visits in permutations(range(1, n)):
        successor = [0] * n
        at = 0
        for v in visits:
            successor[at] = v
            at = v
        successor[at] = 0
        out.append(tuple(successor))
    return out


def permutation_mask(perm, n):
    mask = [0] * (n * n)
    for i, j in enumerate(perm):
        mask[i * n + j] = 1
    return tuple(mask)


@pytest.fixture
def rng_factory():
    from polysample import RandomSource

    return lambda seed=0, stream=0: RandomSource(seed, stream)
