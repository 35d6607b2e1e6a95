"""Extension family of a periodic product state: measures in, measures out.

Run with ``python3 demos/extension_family.py``.
"""

import numpy as np

from fockstate import (
    CircleMeasure,
    UnitVectorSequence,
    atomic_from_moments,
    extend,
    fourier,
    gauge_transform,
    herglotz_check,
    period,
    product_state,
    recover_measure_moments,
    rephase,
)


def main():
    # Eventually periodic unit-vector data: one burn-in vector, then a
    # two-cycle.  rephase() normalizes the phases along the cycle so that
    # consecutive same-slot overlaps are positive; the extension machinery
    # requires that normal form.
    rng = np.random.default_rng(11)
    pre = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    b = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    raw = UnitVectorSequence(2, [pre / np.linalg.norm(pre)],
                             [a / np.linalg.norm(a), b / np.linalg.norm(b)])
    p = period(raw)
    seq = rephase(raw, p)
    print("period             :", p)

    # Every probability measure on the circle yields one extension of the
    # same product data; the flat measure gives back the plain product
    # state, and atoms add off-diagonal blocks along the period lattice.
    depth = seq.prefix_len + 4 * p
    measure = CircleMeasure.from_atoms([(0.7, 0.55), (2.9, 0.45)])
    handle = extend(seq, measure, depth)
    flat = extend(seq, CircleMeasure.haar(), depth)
    print("atomic extension   :", handle.classification,
          "with", len(handle.matrix.blocks), "stored blocks")
    print("flat vs product    :",
          flat.matrix.max_abs_diff(product_state(seq, depth).matrix))

    # The input measure is recoverable from the state: pairing elementary
    # tensors across one period step reads off one Fourier coefficient.
    moments = recover_measure_moments(handle, seq, p, 4)
    worst = max(abs(moments.value(m) - fourier(measure, m))
                for m in range(-4, 5))
    print("moment gap         :", worst)
    print("herglotz screen    :", herglotz_check(moments).ok)

    # The recovered window even rebuilds the atoms themselves.
    rebuilt = atomic_from_moments(moments)
    print("rebuilt measure ok :", rebuilt.approx_eq(measure))

    # The gauge action rotates the family: transforming the state by a
    # unimodular lam is the same as rotating the measure by p times its
    # angle.  Here lam**p = -1 sends each atom halfway around.
    lam = np.exp(1j * np.pi / p)
    moved = gauge_transform(handle, lam)
    rotated = extend(seq, measure.rotated(np.pi), depth)
    print("gauge orbit gap    :", moved.matrix.max_abs_diff(rotated.matrix))

    # Point-mass extensions are the pure members of the family; their
    # moments lie on the unit circle.
    point = extend(seq, CircleMeasure.point_mass(1.2), depth)
    pure = recover_measure_moments(point, seq, p, 3)
    print("pure moment moduli :",
          [round(abs(pure.value(m)), 12) for m in range(4)])


if __name__ == "__main__":
    main()
