"""Pure-Python truncated convolution kernels.

Two strategies, both exact over Python ints:

* ``convolve_sparse`` walks the nonzero entries of the sparser operand.  Theta
  leaves have O(sqrt(n)) nonzeros, so this is the natural kernel for them.
* ``convolve_kronecker`` packs each operand into one big integer (Kronecker
  substitution), multiplies once, and unpacks.  The digit width is chosen from
  an a-priori coefficient bound so no digit can carry into its neighbour.
"""

from __future__ import annotations

from typing import Sequence

# Below this many nonzeros in the sparser operand the direct loop wins.
SPARSE_CUTOFF = 48


def _trimmed(xs: Sequence[int], n: int) -> list[int]:
    xs = list(xs[:n])
    while xs and not xs[-1]:
        xs.pop()
    return xs


def convolve_schoolbook(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Reference O(n^2) convolution, truncated to ``n`` terms."""
    out = [0] * n
    for i in range(min(n, len(a))):
        ai = a[i]
        for j in range(min(n - i, len(b))):
            out[i + j] += ai * b[j]
    return out


def convolve_sparse(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    a = _trimmed(a, n)
    b = _trimmed(b, n)
    nza = [(i, x) for i, x in enumerate(a) if x]
    nzb = [(j, y) for j, y in enumerate(b) if y]
    if len(nzb) < len(nza):
        nza, nzb = nzb, nza
    out = [0] * n
    for i, x in nza:
        for j, y in nzb:
            k = i + j
            if k >= n:
                break
            out[k] += x * y
    return out


def _pack(xs: list[int], width: int) -> int:
    """Return sum(xs[i] * 2**(8*width*i)) for arbitrary-sign xs."""
    shift = max(0, -min(xs))
    if shift:
        xs = [x + shift for x in xs]
    packed = int.from_bytes(b"".join(x.to_bytes(width, "little") for x in xs), "little")
    if shift:
        packed -= shift * _ones(len(xs), width)
    return packed


def _ones(count: int, width: int) -> int:
    return int.from_bytes((b"\x01" + b"\x00" * (width - 1)) * count, "little")


def convolve_kronecker(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    a = _trimmed(a, n)
    b = _trimmed(b, n)
    if not a or not b:
        return [0] * n
    bound = max(map(abs, a)) * max(map(abs, b)) * min(len(a), len(b))
    # two spare bits: one for the sign offset, one for the shifted operands
    width = (bound.bit_length() + 2 + 7) // 8
    size = min(n, len(a) + len(b) - 1)
    product = _pack(a, width) * _pack(b, width)
    half = 1 << (8 * width - 1)
    # Lift every digit into [0, 2**bits) so the byte image has no borrows.
    product = (product + half * _ones(len(a) + len(b) - 1, width)) & ((1 << (8 * width * size)) - 1)
    raw = product.to_bytes(width * size, "little")
    from_bytes = int.from_bytes
    out = [from_bytes(raw[k:k + width], "little") - half for k in range(0, width * size, width)]
    out.extend([0] * (n - size))
    return out


def convolve(a: Sequence[int], b: Sequence[int], n: int) -> list[int]:
    """Truncated product of two coefficient lists, first ``n`` terms."""
    nnz = min(sum(1 for x in a[:n] if x), sum(1 for y in b[:n] if y))
    if nnz <= SPARSE_CUTOFF:
        return convolve_sparse(a, b, n)
    return convolve_kronecker(a, b, n)
