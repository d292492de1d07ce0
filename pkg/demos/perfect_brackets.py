"""Pairwise brackets span the skew algebras but miss the identity in gl_n."""

from infmat import FinitaryMatrix, IndexWindow, Involution, bracket_span_decompose, skew_basis, unit_basis

for name, inv, n in (("o5", Involution.transpose(), 5), ("o6", Involution.transpose(), 6),
                     ("sp4", Involution.symplectic(), 4), ("sp6", Involution.symplectic(), 6)):
    basis = list(skew_basis(IndexWindow.naturals(n), inv).values())
    dec = bracket_span_decompose(basis, basis[-1])
    print(f"{name}: dim {len(basis)}, bracket span rank {dec.rank}, last element recovered: {dec.ok}")

for n in (2, 3, 4):
    basis = list(unit_basis(IndexWindow.naturals(n)).values())
    dec = bracket_span_decompose(basis, FinitaryMatrix.identity(range(1, n + 1)))
    print(f"gl{n}: bracket span rank {dec.rank} of {n * n}; identity inside: {dec.ok}")
