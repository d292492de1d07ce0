"""Recovering witnesses from tables of values on a finite window."""

import random

from infmat import (
    GF,
    QQ,
    FinitaryMatrix,
    IndexWindow,
    Involution,
    check_involution_scalar,
    classify_lie_automorphism,
    conjugation_table,
    decompose_anti_automorphism,
    inner_derivation_table,
    projective_scalar,
    recover_conjugator,
    recover_witness,
)

rng = random.Random(1)
w = IndexWindow.naturals(4)

# a derivation given by its values on all matrix units: y comes back up to a scalar
y = FinitaryMatrix(QQ, {(1, 1): 4, (1, 2): 2, (2, 2): 5, (3, 1): -1})
wit = recover_witness(inner_derivation_table(y, "full", w, 1))
print("derivation witness:", wit.matrix)
print("  differs from y by", (y - wit.matrix).probe(1, 1), "* Id;", wit.residual_report.summary())

# the same on the symplectic skew basis
k = FinitaryMatrix(QQ, {(1, 3): 1, (4, 2): -1})   # e13* = e42, so this is skew
wit = recover_witness(inner_derivation_table(k, "skew_s", w, 1))
print("skew witness:", wit.matrix)

# automorphisms: conjugators come back up to a nonzero scalar
f = GF(5)
x = FinitaryMatrix(f, {(i, j): rng.randrange(5) for i in w.indices for j in w.indices if i < j})
x = x + FinitaryMatrix.identity(w.indices, f) * 3     # upper triangular, invertible
c = recover_conjugator(conjugation_table(x, window=w))
print("\nconjugator recovered, lambda =", projective_scalar(c.x, x))

# Lie automorphisms: a -> -x^-1 a^t x is the second type
x = FinitaryMatrix(QQ, {(1, 2): 1, (2, 1): 1, (3, 3): 2, (4, 4): -1})
res = classify_lie_automorphism(conjugation_table(x, "lie", negate_transpose=True))
print("Lie verdict:", res.verdict)

# anti-automorphisms are a transpose followed by a conjugation
anti = decompose_anti_automorphism(conjugation_table(x, "anti"))
print("anti witness is a multiple of x:", projective_scalar(anti.x, x) is not None)

# a scaled signed permutation preserves the transpose form up to alpha
p = FinitaryMatrix(QQ, {(1, 2): 3, (2, 1): -3, (3, 4): 3, (4, 3): 3})
print("x x^t =", check_involution_scalar(p, Involution.transpose()).alpha, "* Id")
