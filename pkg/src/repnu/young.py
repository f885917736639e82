"""Young diagram combinatorics.

Partitions are tuples of weakly decreasing positive integers. The
module owns the parameter-class structure on diagrams (the chains along
which interpolated objects degenerate at integer parameters), Pieri
sets, hook formulas and symmetric group characters.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator

Partition = tuple[int, ...]


def check_partition(lam) -> Partition:
    lam = tuple(int(x) for x in lam)
    while lam and lam[-1] == 0:
        lam = lam[:-1]
    if any(a <= 0 for a in lam):
        raise ValueError(f"negative part in {lam}")
    if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
        raise ValueError(f"parts not weakly decreasing: {lam}")
    return lam


def parse_partition(text: str) -> Partition:
    text = text.strip()
    if text in ("", "-"):
        return ()
    return check_partition(int(tok) for tok in text.split(","))


def format_partition(lam: Partition) -> str:
    return ",".join(str(a) for a in lam) if lam else "-"


def partitions_of(n: int, max_part: int | None = None) -> Iterator[Partition]:
    """All partitions of n, largest part first."""
    if n < 0:
        return
    if max_part is None:
        max_part = n
    if n == 0:
        yield ()
        return
    for first in range(min(n, max_part), 0, -1):
        for rest in partitions_of(n - first, first):
            yield (first,) + rest


def conjugate(lam: Partition) -> Partition:
    if not lam:
        return ()
    return tuple(
        sum(1 for a in lam if a >= j) for j in range(1, lam[0] + 1)
    )


def mu_sequence(lam: Partition, nu: Fraction, m: int) -> tuple[Fraction, ...]:
    """First m entries of the weight tail (nu - |lam|, lam_1 - 1, lam_2 - 2, ...)."""
    nu = Fraction(nu)
    lam = check_partition(lam)
    out = [nu - sum(lam)]
    for i in range(1, m):
        part = lam[i - 1] if i - 1 < len(lam) else 0
        out.append(Fraction(part - i))
    return tuple(out)


def tilde(lam: Partition, n: int) -> Partition | None:
    """Prepend the balancing first row n - |lam|, when that is a diagram."""
    lam = check_partition(lam)
    head = n - sum(lam)
    if head < (lam[0] if lam else 0):
        return None
    return check_partition((head,) + lam)


@dataclass(frozen=True)
class NuClass:
    """The degeneracy class of a diagram at a fixed parameter.

    A trivial class has the single member `base`. A nontrivial class is
    the infinite chain base = member(0) < member(1) < ..., each step
    adding one horizontal strip one row further down.
    """

    nu: Fraction
    trivial: bool
    base: Partition

    def member(self, i: int) -> Partition:
        if i < 0:
            raise IndexError("negative chain position")
        if self.trivial:
            if i == 0:
                return self.base
            raise IndexError("trivial class has a single member")
        if i == 0:
            return self.base
        b = self.base
        nu = int(self.nu)
        rows = [nu - sum(b) + 1]
        for s in range(2, i + 1):
            prev = b[s - 2] if s - 2 < len(b) else 0
            rows.append(prev + 1)
        rows.extend(b[i:])
        return check_partition(rows)

    def members(self, upto: int) -> list[Partition]:
        return [self.member(i) for i in range(upto + 1)]

    def position_of(self, lam: Partition) -> int:
        lam = check_partition(lam)
        i = 0
        while True:
            try:
                m = self.member(i)
            except IndexError:
                break
            if m == lam:
                return i
            if sum(m) > sum(lam):
                break
            i += 1
        raise ValueError(f"{lam} is not in this class")

    def contains(self, lam: Partition) -> bool:
        try:
            self.position_of(lam)
            return True
        except ValueError:
            return False


def nu_class(lam: Partition, nu) -> NuClass:
    """The class of lam at the parameter nu.

    The class is nontrivial exactly when nu is a nonnegative integer and
    some chain through lam exists; lam is itself the chain base iff
    nu >= |lam| + lam_1. Smaller members are recovered from the weight
    tail: guess which entry is the head nu - |c| and rebuild c from the
    rest.
    """
    nu = Fraction(nu)
    lam = check_partition(lam)
    if nu.denominator != 1 or nu < 0:
        return NuClass(nu, True, lam)
    lam1 = lam[0] if lam else 0
    if nu >= sum(lam) + lam1:
        cls = NuClass(nu, False, lam)
        assert cls.member(1) is not None
        return cls
    m = len(lam) + 2
    tail = mu_sequence(lam, nu, m)
    candidates: set[Partition] = set()
    for h in range(m):
        head = tail[h]
        size = nu - head
        if size.denominator != 1 or not (0 <= size < sum(lam)):
            continue
        rest = sorted((tail[j] for j in range(m) if j != h), reverse=True)
        rows = [int(rest[i - 1]) + i for i in range(1, m)]
        try:
            cand = check_partition(rows)
        except ValueError:
            continue
        if sum(cand) != size:
            continue
        if sorted(mu_sequence(cand, nu, m)) != sorted(tail):
            continue
        candidates.add(cand)
    if not candidates:
        return NuClass(nu, True, lam)
    base = min(candidates, key=lambda c: (sum(c), c))
    assert nu >= sum(base) + (base[0] if base else 0), "reconstructed base is not a base"
    cls = NuClass(nu, False, base)
    assert cls.contains(lam), "chain from reconstructed base misses the diagram"
    return cls


def k_lambda(cls: NuClass, big_n: int) -> int:
    """Number of chain members with at most big_n - 1 rows.

    For a trivial class this is 1 or 0. For a nontrivial class the
    chain adds a row each step once past the base length, so the scan
    terminates.
    """
    if cls.trivial:
        return 1 if len(cls.base) <= big_n - 1 else 0
    k = 0
    while True:
        if len(cls.member(k)) > big_n - 1:
            return k
        k += 1
        if k > big_n + len(cls.base) + 2:
            raise AssertionError("chain length scan failed to terminate")


# Pieri sets. These get hit heavily by character computations, so they
# are memoized, optionally through a JSON cache on disk.

_DISK_CACHE: dict[str, list[str]] | None = None


def _disk_cache_path() -> str | None:
    root = os.environ.get("REPNU_CACHE_DIR")
    if not root:
        return None
    return os.path.join(root, "pieri_cache.json")


def _disk_lookup(key: str):
    global _DISK_CACHE
    path = _disk_cache_path()
    if path is None:
        return None
    if _DISK_CACHE is None:
        try:
            with open(path) as fh:
                _DISK_CACHE = json.load(fh)
        except (OSError, ValueError):
            _DISK_CACHE = {}
    hit = _DISK_CACHE.get(key)
    if hit is None:
        return None
    return [parse_partition(s) for s in hit]


def _disk_store(key: str, value: list[Partition]) -> None:
    global _DISK_CACHE
    path = _disk_cache_path()
    if path is None:
        return
    if _DISK_CACHE is None:
        _DISK_CACHE = {}
    _DISK_CACHE[key] = [format_partition(p) for p in value]
    os.makedirs(os.path.dirname(path), exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path), suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(_DISK_CACHE, fh)
        os.replace(tmp, path)
    except OSError:
        try:
            os.unlink(tmp)
        except OSError:
            pass


@lru_cache(maxsize=None)
def pieri_plus(lam: Partition, m: int) -> tuple[Partition, ...]:
    """Diagrams obtained from lam by adding a horizontal strip of size m."""
    lam = check_partition(lam)
    key = f"plus:{format_partition(lam)}:{m}"
    hit = _disk_lookup(key)
    if hit is not None:
        return tuple(hit)
    out: list[Partition] = []
    n_rows = len(lam) + 1
    padded = list(lam) + [0]

    def rec(i: int, remaining: int, rows: list[int]):
        if i == n_rows:
            if remaining == 0:
                out.append(check_partition(rows))
            return
        lo = padded[i]
        hi = rows[i - 1] if i > 0 else padded[i] + remaining
        hi = min(hi, padded[i] + remaining)
        if i > 0:
            hi = min(hi, padded[i - 1])  # strip cells occupy distinct columns
        for val in range(lo, hi + 1):
            rows.append(val)
            rec(i + 1, remaining - (val - lo), rows)
            rows.pop()

    rec(0, m, [])
    out.sort()
    _disk_store(key, out)
    return tuple(out)


@lru_cache(maxsize=None)
def pieri_minus(lam: Partition, m: int) -> tuple[Partition, ...]:
    """Diagrams obtained from lam by removing a horizontal strip of size m."""
    lam = check_partition(lam)
    key = f"minus:{format_partition(lam)}:{m}"
    hit = _disk_lookup(key)
    if hit is not None:
        return tuple(hit)
    out = []
    padded = list(lam) + [0]

    def rec(i: int, remaining: int, rows: list[int]):
        if i == len(lam):
            if remaining == 0:
                out.append(check_partition(rows))
            return
        lo = padded[i + 1]
        hi = lam[i]
        for val in range(lo, hi + 1):
            if lam[i] - val > remaining:
                continue
            rows.append(val)
            rec(i + 1, remaining - (lam[i] - val), rows)
            rows.pop()

    rec(0, m, [])
    out.sort()
    _disk_store(key, out)
    return tuple(out)


@lru_cache(maxsize=None)
def pieri_plus_bounded(lam: Partition, cutoff: int) -> tuple[Partition, ...]:
    """All horizontal-strip extensions of lam of total size at most cutoff."""
    lam = check_partition(lam)
    out: list[Partition] = []
    for m in range(0, cutoff - sum(lam) + 1):
        out.extend(pieri_plus(lam, m))
    return tuple(sorted(out))


def is_strip_extension(lam: Partition, mu: Partition) -> bool:
    """Whether mu arises from lam by adding a horizontal strip, maybe empty.

    Row interlacing: each row of mu must hold the matching row of lam
    and fit under the row of lam above it.
    """
    lam = check_partition(lam)
    mu = check_partition(mu)
    for i in range(max(len(lam), len(mu))):
        m = mu[i] if i < len(mu) else 0
        if m < (lam[i] if i < len(lam) else 0):
            return False
        if i >= 1 and m > (lam[i - 1] if i - 1 < len(lam) else 0):
            return False
    return True


def hooks(lam: Partition) -> list[int]:
    lam = check_partition(lam)
    conj = conjugate(lam)
    out = []
    for i, row in enumerate(lam, start=1):
        for j in range(1, row + 1):
            out.append(row - j + conj[j - 1] - i + 1)
    return out


def hook_dim(lam: Partition) -> int:
    """Number of standard tableaux, by the hook length formula."""
    import math

    lam = check_partition(lam)
    n = sum(lam)
    val = Fraction(math.factorial(n))
    for h in hooks(lam):
        val /= h
    assert val.denominator == 1
    return int(val)


def schur_dim(lam: Partition, d: int) -> int:
    """Dimension of the Schur functor applied to a d-dimensional space."""
    lam = check_partition(lam)
    if len(lam) > d:
        return 0
    num = Fraction(1)
    for i, row in enumerate(lam, start=1):
        for j in range(1, row + 1):
            num *= d + j - i
    for h in hooks(lam):
        num /= h
    assert num.denominator == 1
    return int(num)


def _beta_set(lam: Partition, length: int) -> list[int]:
    padded = list(lam) + [0] * (length - len(lam))
    return [padded[i] + (length - 1 - i) for i in range(length)]


def _partition_from_beta(beta: list[int]) -> Partition:
    beta = sorted(beta, reverse=True)
    length = len(beta)
    rows = [beta[i] - (length - 1 - i) for i in range(length)]
    return check_partition(rows)


@lru_cache(maxsize=None)
def character_value(lam: Partition, cls: Partition) -> int:
    """Symmetric group character value by border-strip recursion."""
    lam = check_partition(lam)
    cls = check_partition(cls)
    if sum(lam) != sum(cls):
        raise ValueError("character argument sizes differ")
    if not cls:
        return 1
    t = cls[0]
    rest = cls[1:]
    length = max(len(lam), 1)
    beta = _beta_set(lam, length)
    bset = set(beta)
    total = 0
    for b in beta:
        if b < t or (b - t) in bset:
            continue
        crossed = sum(1 for c in beta if b - t < c < b)
        new = [c for c in beta if c != b] + [b - t]
        total += (-1) ** crossed * character_value(_partition_from_beta(new), rest)
    return total


def class_size(cls: Partition, n: int) -> int:
    """Size of the conjugacy class with the given cycle type in S_n."""
    import math
    from collections import Counter

    cls = check_partition(cls)
    if sum(cls) != n:
        raise ValueError("cycle type does not sum to n")
    z = 1
    for c, mult in Counter(cls).items():
        z *= c**mult * math.factorial(mult)
    return math.factorial(n) // z
