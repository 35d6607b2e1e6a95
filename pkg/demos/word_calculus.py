"""Tour of the word algebra: monomials, reduction, parsing, expectations.

Run with ``python3 demos/word_calculus.py``.
"""

import numpy as np

from fockstate import (
    AlgebraElement,
    conditional_expectation,
    gauge_apply,
    parse_expression,
)


def main():
    n = 2

    # Monomials are pairs of words in the letters 1..n.  Products reduce by
    # cancelling inner letters: a starred generator kills a mismatched plain
    # one and cancels a matching one.
    x = parse_expression("v1 v2 v1*", n)
    y = parse_expression("v1 v2*", n)
    print("x          =", x)
    print("y          =", y)
    print("x y        =", x * y)
    print("x y*       =", x * y.adjoint())
    print("y* y       =", y.adjoint() * y)

    # v1* v2 reduces to zero: orthogonal ranges.
    print("v1* v2     =", parse_expression("v1* v2", n))

    # The parser accepts complex coefficients, bracketed words, and sums.
    z = parse_expression("(0.5+0.5i) v[1,2] v[2]* + 0.25 - v2 v2*", n)
    print("parsed sum =", z)

    # adjoint() is an involution and reverses products.
    w = x * z
    assert str(w.adjoint().adjoint()) == str(w)
    assert str((x * z).adjoint()) == str(z.adjoint() * x.adjoint())

    # The gauge action multiplies each generator by a unimodular scalar, so a
    # monomial with left length a and right length b picks up lam**(a-b).
    lam = np.exp(0.7j)
    print("gauge(x)   =", gauge_apply(x, lam))

    # The conditional expectation keeps only the balanced terms, the ones
    # with equal left and right length.  On our sum that drops nothing from
    # the scalar and the range projections but removes the skew term.
    print("E(z)       =", conditional_expectation(z))

    # One-dimensional sanity check: words over one letter commute, and the
    # balanced part of any element is its diagonal.
    u = parse_expression("v1 + v1*", 1)
    print("over n=1   =", u * u)


if __name__ == "__main__":
    main()
