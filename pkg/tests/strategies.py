from fractions import Fraction

from hypothesis import strategies as st

from infmat import GF, QQ, FinitaryMatrix

FIELDS = [QQ, GF(5), GF(7)]


def rationals():
    return st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


def values(field):
    if field == QQ:
        return rationals()
    return st.integers(0, field.p - 1)


@st.composite
def finitary(draw, field=QQ, lo=1, hi=6, max_size=10):
    idx = st.integers(lo, hi)
    raw = draw(st.dictionaries(st.tuples(idx, idx), values(field), max_size=max_size))
    return FinitaryMatrix(field, raw)


@st.composite
def field_and_finitary(draw, lo=1, hi=6, max_size=10):
    f = draw(st.sampled_from(FIELDS))
    return f, draw(finitary(f, lo, hi, max_size))


# ---- plain random helpers shared with the acceptance run


def random_value(rng, field, nonzero=False):
    while True:
        if field == QQ:
            v = Fraction(rng.randint(-5, 5), rng.randint(1, 3))
        else:
            v = rng.randrange(field.p)
        if v or not nonzero:
            return field.coerce(v)


def random_matrix(rng, field, lo, hi, density=0.5):
    return FinitaryMatrix(field, {(i, j): random_value(rng, field)
                                  for i in range(lo, hi + 1) for j in range(lo, hi + 1)
                                  if rng.random() < density})


def random_invertible(rng, field, n, lo=1):
    """``L·U`` with ``L`` unit lower and ``U`` upper with nonzero diagonal."""
    idx = range(lo, lo + n)
    low = {(i, j): random_value(rng, field) for i in idx for j in idx if i > j}
    up = {(i, j): random_value(rng, field) for i in idx for j in idx if i < j}
    for i in idx:
        low[(i, i)] = field.one()
        up[(i, i)] = random_value(rng, field, nonzero=True)
    return FinitaryMatrix(field, low) @ FinitaryMatrix(field, up)


def random_signed_permutation(rng, field, n, lo=1):
    idx = list(range(lo, lo + n))
    perm = idx[:]
    rng.shuffle(perm)
    return FinitaryMatrix(field, {(i, p): field.coerce(rng.choice((1, -1)))
                                  for i, p in zip(idx, perm)})
