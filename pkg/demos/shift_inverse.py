"""Inverting ad(E) for the shift E = sum e_{i,i+1}.

Over the naturals every finitary a has a preimage a~ with [E, a~] = a,
stored as a core plus constant rays.  Over the integers the same works on
band matrices, certified entry by entry on a window.
"""

from infmat import QQ, ClassTag, FinitaryMatrix, IndexMode, IndexWindow, WindowedMatrix, tilde_n, tilde_z


def show(title, m, n=6, lo=1):
    print(title)
    for i in range(lo, lo + n):
        print("   ", " ".join(f"{str(m.probe(i, j)):>3}" for j in range(lo, lo + n)))


a = FinitaryMatrix(QQ, {(1, 2): 1, (2, 1): 3})
res = tilde_n(a)
print("rays (offset, start, value):", [(d, s, str(v)) for d, s, v in res.image.rays()])
show("a~ on [1,6]:", res.image)
print("[E, a~] = a verified on", len(res.verified_region), "positions:", res.report.full)

# blocks of size 2: the image moves whole blocks one block-row down
blocked = tilde_n(FinitaryMatrix(QQ, {(1, 1): 1, (1, 2): 2, (2, 2): 3}), 2)
show("\nblocked a~ (m = 2):", blocked.image)

# over Z the identity on [-6,6] has a~[i, i-1] = i - 1
w = IndexWindow(-6, 6, IndexMode.INTEGERS)
ident = WindowedMatrix(QQ, w, ClassTag.band(0), {(i, i): 1 for i in w.indices})
z = tilde_z(ident)
print("\nZ-mode tag:", z.image.tag, "| interior verified:", z.report.ok)
print("subdiagonal:", " ".join(str(z.image.probe(i, i - 1)) for i in range(-5, 7)))
