"""Truncated power-series arithmetic used for residue extraction.

Series are plain lists of coefficients (ascending, fixed truncation order);
they stay exact when fed GaussRational coefficients and degrade to complex
otherwise.
"""

from __future__ import annotations

from fractions import Fraction

from .scalars import GaussRational, is_exact


def _zero(exact: bool):
    return GaussRational(0) if exact else 0j


def _one(exact: bool):
    return GaussRational(1) if exact else 1 + 0j


def series_trim(a, order):
    a = list(a[: order + 1])
    exact = all(is_exact(c) for c in a)
    a += [_zero(exact)] * (order + 1 - len(a))
    return a


def series_mul(a, b, order):
    exact = all(is_exact(c) for c in a) and all(is_exact(c) for c in b)
    out = [_zero(exact)] * (order + 1)
    for i, ai in enumerate(a[: order + 1]):
        if _iszero(ai):
            continue
        for j in range(0, order + 1 - i):
            if j < len(b) and not _iszero(b[j]):
                out[i + j] = out[i + j] + ai * b[j]
    return out


def _iszero(c):
    if isinstance(c, GaussRational):
        return not bool(c)
    return c == 0


def series_exp(a, order):
    """exp of a series with zero constant term (required for exactness)."""
    if len(a) > 0 and not _iszero(a[0]):
        raise ValueError("series_exp requires zero constant term")
    a = series_trim(a, order)
    exact = all(is_exact(c) for c in a)
    e = [_zero(exact)] * (order + 1)
    e[0] = _one(exact)
    # e' = a' e  =>  j e_j = sum_{k=1..j} k a_k e_{j-k}
    for j in range(1, order + 1):
        s = _zero(exact)
        for k in range(1, j + 1):
            if not _iszero(a[k]):
                s = s + (k * a[k]) * e[j - k]
        if exact:
            e[j] = s / GaussRational(j)
        else:
            e[j] = s / j
    return e


def series_inv(a, order):
    """Reciprocal of a series with nonzero constant term."""
    a = series_trim(a, order)
    if _iszero(a[0]):
        raise ZeroDivisionError("series has zero constant term")
    exact = all(is_exact(c) for c in a)
    inv0 = (_one(exact) / a[0]) if exact else 1.0 / complex(a[0])
    out = [_zero(exact)] * (order + 1)
    out[0] = inv0
    for j in range(1, order + 1):
        s = _zero(exact)
        for k in range(1, j + 1):
            if not _iszero(a[k]):
                s = s + a[k] * out[j - k]
        out[j] = -inv0 * s
    return out


def series_div(a, b, order):
    return series_mul(series_trim(a, order), series_inv(b, order), order)


def series_binomial(e, u, order):
    """(1 + u)^e for a series u with zero constant term.

    The exponent may be any rational/complex scalar; binomial coefficients
    C(e, k) stay exact for exact ``e``.
    """
    u = series_trim(u, order)
    if not _iszero(u[0]):
        raise ValueError("series_binomial requires zero constant term")
    exact = all(is_exact(c) for c in u) and is_exact(e)
    if isinstance(e, int):
        e = GaussRational(e)
    out = [_one(exact)]
    # accumulate powers of u term by term via C(e,k) u^k
    uk = [_one(exact)] + [_zero(exact)] * order
    ck = _one(exact) if exact else 1 + 0j
    for k in range(1, order + 1):
        factor = (e - (k - 1))
        if exact:
            ck = ck * factor / GaussRational(k)
        else:
            ck = ck * complex(factor) / k
        uk = series_mul(uk, u, order)
        if len(out) <= order:
            out = series_trim(out, order)
        for j in range(order + 1):
            out[j] = out[j] + ck * uk[j]
    return series_trim(out, order)


def poly_series(p, center, order):
    """Taylor coefficients of a Poly about ``center``."""
    shifted = p.shift(center)
    return series_trim(list(shifted.coeffs), order)


def integer_value(x, tol=1e-8):
    """Return the integer x rounds to, or None.

    Exact scalars are decided exactly; floats use ``tol``.
    """
    if isinstance(x, GaussRational):
        return x.as_int() if x.is_integer else None
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else None
    z = complex(x)
    n = round(z.real)
    if abs(z - n) < tol:
        return int(n)
    return None
