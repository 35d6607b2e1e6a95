"""Shared randomized generators for the test suite.

Everything takes an explicit numpy Generator so individual tests stay
reproducible under the session seed from conftest.
"""

import numpy as np

from fockstate.word_algebra import AlgebraElement


def random_word(rng, n, max_len, min_len=0):
    length = int(rng.integers(min_len, max_len + 1))
    return tuple(int(x) for x in rng.integers(1, n + 1, size=length))


def random_monomial_element(rng, n, max_len):
    left = random_word(rng, n, max_len)
    right = random_word(rng, n, max_len)
    coeff = complex(rng.standard_normal(), rng.standard_normal())
    return AlgebraElement(n, {(left, right): coeff})


def random_element(rng, n, max_len, n_terms=4):
    acc = AlgebraElement.zero(n)
    for _ in range(n_terms):
        acc = acc + random_monomial_element(rng, n, max_len)
    return acc


def random_unit_vector(rng, n):
    v = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    return v / np.linalg.norm(v)


def random_unit_vectors(rng, n, count):
    return [random_unit_vector(rng, n) for _ in range(count)]


def random_sequence(rng, n, prefix_len, cycle_len):
    """Random eventually periodic sequence; its period is almost surely
    the full cycle length since distinct random vectors are never
    unimodular multiples of each other."""
    from fockstate.product_states import UnitVectorSequence

    return UnitVectorSequence(
        n,
        random_unit_vectors(rng, n, prefix_len),
        random_unit_vectors(rng, n, cycle_len),
    )
