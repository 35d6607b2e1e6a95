"""States as block matrices: positivity, trace profiles, convex splitting.

Run with ``python3 demos/states_and_decomposition.py``.
"""

import numpy as np

from fockstate import (
    BlockOperatorMatrix,
    CircleMeasure,
    FockContext,
    UnitVectorSequence,
    classify,
    decompose,
    extend,
    fock_vector_state,
    gram_positivity_check,
    parse_expression,
    rephase,
    state_eval,
    trace_profile_csv,
)


def vector_state_demo(ctx):
    # A finitely supported Fock vector gives a vector state.  Its trace
    # profile decays to zero: all mass eventually drains out of the tail.
    phi = [np.array([1.0]), np.array([0.5, 0.5j])]
    mat = fock_vector_state(ctx, phi)
    print("vector state profile :", [round(v, 6) for v in mat.trace_profile()])
    print("positivity           :", mat.is_positive().ok)
    print("domination           :", mat.is_decreasing().ok)
    print("label                :", classify(mat).label)
    value = state_eval(mat, parse_expression("v1 v1*", ctx.n))
    print("weight on range(v1)  :", round(value.real, 6))
    return mat


def extension_demo(ctx):
    # Extensions of periodic product data are the essential prototype: the
    # profile is flat and slicing leaves the matrix unchanged.
    base = np.array([1.0, 0.0]), np.array([0.6, 0.8])
    seq = rephase(UnitVectorSequence(ctx.n, [], [base[0], base[1]]))
    measure = CircleMeasure.from_atoms([(0.9, 0.5), (2.5, 0.5)])
    mat = extend(seq, measure, ctx.depth).matrix
    print("extension profile    :", [round(v, 6) for v in mat.trace_profile()])
    print("slice invariance gap :", mat.max_abs_diff(mat.sliced()))
    print("label                :", classify(mat).label)
    return mat


def main():
    ctx = FockContext(2, 5)
    singular = vector_state_demo(ctx)
    print()
    essential = extension_demo(ctx)
    print()

    # Convex mixtures split back into their parts.  The decomposition only
    # reads the matrix itself: it iterates the slice map until the picture
    # stabilizes, then subtracts.
    mix = 0.4 * essential + 0.6 * singular
    parts = decompose(mix)
    print("essential mass       :", round(parts.essential.trace(), 9))
    print("singular mass        :", round(parts.singular.trace(), 9))
    print("essential part gap   :", parts.essential.max_abs_diff(0.4 * essential))
    print("singular part gap    :", parts.singular.max_abs_diff(0.6 * singular))
    print("stabilized after     :", parts.stabilization_step, "slices")
    print()

    # Positivity of the state is equivalent to positivity of every Gram
    # matrix of algebra elements, and the checks agree on both honest and
    # broken data.
    probes = [[parse_expression("v1 + v2 v1*", 2),
               parse_expression("1 - v1 v1*", 2)]]
    print("gram check (mixture) :", gram_positivity_check(mix, probes).ok)
    broken = BlockOperatorMatrix(ctx, {(0, 0): np.array([[-1.0]])})
    print("gram check (broken)  :", gram_positivity_check(broken, probes).ok,
          "/ corner check:", broken.is_positive().ok)
    print()

    # The profile is also exportable as CSV for plotting.
    print(trace_profile_csv(mix).rstrip())


if __name__ == "__main__":
    main()
