"""Permutations of seven points, the four index-7 homomorphisms PSL2(Z) -> S7, and subgroup tests.

Conventions: permutations compose right to left (``p * q`` applies ``q`` first), so a word
``[A, B]`` maps to ``h(A) * h(B)``.  The generators are S = (0 -1; 1 0), T = (1 1; 0 1) and
R = S T, hence h(T) = h(S) * h(R).  Matrix equality is taken in PSL2(Z), i.e. up to sign.
"""
from __future__ import annotations

import math
import re
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterable, Sequence

__all__ = [
    "Permutation7",
    "UnimodularMatrix",
    "GroupDescriptor",
    "S",
    "T",
    "R",
    "IDENTITY",
    "CANONICAL_IDS",
    "ALL_IDS",
    "get_group",
    "evaluate_word",
    "matrix_to_word",
    "is_member",
    "chi",
    "outer_automorphism_image",
    "reflection_offset",
]


# ---------------------------------------------------------------- permutations

class Permutation7:
    """A bijection of {1..7}, stored as its image tuple."""

    __slots__ = ("images",)

    def __init__(self, images: Sequence[int]):
        images = tuple(int(x) for x in images)
        if sorted(images) != list(range(1, 8)):
            raise ValueError(f"not a permutation of 1..7: {images}")
        self.images = images

    @classmethod
    def identity(cls) -> "Permutation7":
        return cls(range(1, 8))

    @classmethod
    def from_cycles(cls, text: str) -> "Permutation7":
        """Parse cycle notation such as "(12)(34)(56)" or "(2 3 5)"."""
        img = list(range(1, 8))
        for cyc in re.findall(r"\(([^)]*)\)", text):
            pts = [int(ch) for ch in re.findall(r"\d", cyc)]
            for i, p in enumerate(pts):
                img[p - 1] = pts[(i + 1) % len(pts)]
        return cls(img)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Permutation7") -> "Permutation7":
        return Permutation7(self.images[j - 1] for j in other.images)

    def inverse(self) -> "Permutation7":
        inv = [0] * 7
        for i, j in enumerate(self.images, 1):
            inv[j - 1] = i
        return Permutation7(inv)

    def __pow__(self, e: int) -> "Permutation7":
        if e < 0:
            return self.inverse() ** (-e)
        e %= self.order()
        result = Permutation7.identity()
        for _ in range(e):
            result = result * self
        return result

    def order(self) -> int:
        return math.lcm(*(len(c) for c in self.cycles(include_fixed=True)))

    def cycles(self, include_fixed: bool = False) -> list[tuple[int, ...]]:
        seen = set()
        out = []
        for i in range(1, 8):
            if i in seen:
                continue
            cyc = [i]
            seen.add(i)
            j = self(i)
            while j != i:
                cyc.append(j)
                seen.add(j)
                j = self(j)
            if len(cyc) > 1 or include_fixed:
                out.append(tuple(cyc))
        return out

    def cycle_of(self, i: int) -> tuple[int, ...]:
        for cyc in self.cycles(include_fixed=True):
            if i in cyc:
                return cyc
        raise AssertionError("unreachable")

    def is_identity(self) -> bool:
        return self.images == tuple(range(1, 8))

    def __eq__(self, other):
        return isinstance(other, Permutation7) and self.images == other.images

    def __hash__(self):
        return hash(self.images)

    def __str__(self):
        cyc = self.cycles()
        return "".join("(" + "".join(map(str, c)) + ")" for c in cyc) or "()"

    def __repr__(self):
        return f"Permutation7({str(self)!r})"


IDENTITY = Permutation7.identity()


def generated_group(gens: Iterable[Permutation7]) -> set[Permutation7]:
    gens = list(gens)
    seen = {IDENTITY}
    todo = deque([IDENTITY])
    while todo:
        p = todo.popleft()
        for g in gens:
            q = g * p
            if q not in seen:
                seen.add(q)
                todo.append(q)
    return seen


def is_transitive(gens: Iterable[Permutation7]) -> bool:
    gens = list(gens)
    orbit = {1}
    todo = [1]
    while todo:
        x = todo.pop()
        for g in gens:
            y = g(x)
            if y not in orbit:
                orbit.add(y)
                todo.append(y)
    return len(orbit) == 7


# ---------------------------------------------------------------- matrices

class UnimodularMatrix:
    """An integer matrix (a b; c d) of determinant 1, compared up to sign."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a: int, b: int, c: int, d: int):
        if a * d - b * c != 1:
            raise ValueError(f"determinant of ({a} {b}; {c} {d}) is not 1")
        self.a, self.b, self.c, self.d = int(a), int(b), int(c), int(d)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.a, self.b, self.c, self.d)

    def __mul__(self, o: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(self.a * o.a + self.b * o.c, self.a * o.b + self.b * o.d,
                                self.c * o.a + self.d * o.c, self.c * o.b + self.d * o.d)

    def __neg__(self):
        return UnimodularMatrix(-self.a, -self.b, -self.c, -self.d)

    def inverse(self) -> "UnimodularMatrix":
        return UnimodularMatrix(self.d, -self.b, -self.c, self.a)

    def __pow__(self, e: int) -> "UnimodularMatrix":
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        result = UnimodularMatrix(1, 0, 0, 1)
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def outer(self) -> "UnimodularMatrix":
        """Image under psi: (a b; c d) -> (a -b; -c d)."""
        return UnimodularMatrix(self.a, -self.b, -self.c, self.d)

    def _canonical(self) -> tuple[int, int, int, int]:
        e = self.entries
        first = next(x for x in e if x != 0)
        return e if first > 0 else tuple(-x for x in e)

    def __eq__(self, other):
        return isinstance(other, UnimodularMatrix) and self._canonical() == other._canonical()

    def __hash__(self):
        return hash(self._canonical())

    def is_identity(self) -> bool:
        return self._canonical() == (1, 0, 0, 1)

    def __repr__(self):
        return f"UnimodularMatrix({self.a}, {self.b}, {self.c}, {self.d})"


S = UnimodularMatrix(0, -1, 1, 0)
T = UnimodularMatrix(1, 1, 0, 1)
R = S * T
I2 = UnimodularMatrix(1, 0, 0, 1)

_LETTERS = {"S": S, "T": T, "R": R, "S^-1": S.inverse(), "T^-1": T.inverse(), "R^-1": R.inverse()}


def word_to_matrix(word: Sequence[str]) -> UnimodularMatrix:
    m = I2
    for tok in word:
        m = m * _LETTERS[tok]
    return m


def _syllables(M: UnimodularMatrix) -> list[tuple[str, int]]:
    """Decompose M as T^k0 S T^k1 S ... (letter, exponent) pairs, up to sign."""
    a, b, c, d = M.entries
    ops = []
    while c != 0:
        q = d // c
        if q:
            # right-multiply by T^-q: (c, d) -> (c, d - q c)
            a, b, c, d = a, b - q * a, c, d - q * c
            ops.append(("T", -q))
        # right-multiply by S: (a b; c d)(0 -1; 1 0) = (b -a; d -c)
        a, b, c, d = b, -a, d, -c
        ops.append(("S", 1))
    # now +-(1 x; 0 1) with a = d = +-1, i.e. T^(a b)
    word = []
    if a * b:
        word.append(("T", a * b))
    for letter, e in reversed(ops):
        word.append((letter, -e if letter == "T" else 1))
    return word


def matrix_to_word(M: UnimodularMatrix) -> list[str]:
    """A word over S, T, T^-1 whose product equals M in PSL2(Z)."""
    out = []
    for letter, e in _syllables(M):
        if letter == "S":
            out.append("S")
        else:
            out.extend(["T" if e > 0 else "T^-1"] * abs(e))
    return out


# ---------------------------------------------------------------- homomorphisms

_HOMS = {
    "G": ("(12)(34)(56)", "(235)(467)"),
    "H": ("(12)(34)(56)", "(235)(764)"),
    "U": ("(12)(34)(67)", "(235)(467)"),
    "V": ("(12)(34)(67)", "(253)(467)"),
}

_CANONICAL = {"G": (1, 3), "H": (1, 3), "U": (1, 6), "V": (1, 6)}

# Presentation generators of the groups fixing point 1, as (a, b, c, d).
_PRESENTATIONS = {
    "G1": [(1, 4, 0, 1), (4, -3, 3, -2), (-3, 1, -1, 0), (3, -5, 2, -3), (0, -1, 1, 1)],
    "H1": [(1, 5, 0, 1), (1, -2, 2, -3), (-4, 1, -1, 0), (2, -5, 1, -2), (0, -1, 1, 1)],
    "U1": [(1, 6, 0, 1), (-2, 9, -1, 4), (-5, 1, -1, 0), (1, -2, 1, -1), (0, -1, 1, 1)],
    "V1": [(1, 6, 0, 1), (-1, 4, -1, 3), (-5, 1, -1, 0), (4, -17, 1, -4), (0, -1, 1, 1)],
}

CANONICAL_IDS = ("G1", "G3", "H1", "H3", "U1", "U6", "V1", "V6")
ALL_IDS = tuple(f"{f}{b}" for f in "GHUV" for b in range(1, 8))


@dataclass(frozen=True)
class GroupDescriptor:
    """The stabiliser of `basepoint` under the homomorphism given by phi(S), phi(R)."""

    id: str
    phi_s: Permutation7
    phi_r: Permutation7
    basepoint: int
    generators: tuple[UnimodularMatrix, ...] = field(default=(), compare=False)

    @property
    def family(self) -> str:
        return self.id[0]

    @property
    def phi_t(self) -> Permutation7:
        return self.phi_s * self.phi_r

    @property
    def width(self) -> int:
        return len(self.phi_t.cycle_of(self.basepoint))

    cusp_width_infty = width

    @property
    def canonical(self) -> bool:
        return self.id in CANONICAL_IDS

    def t_orbit(self) -> tuple[int, ...]:
        """Points t^k(b) for k = 0..w-1."""
        t = self.phi_t
        out = [self.basepoint]
        for _ in range(self.width - 1):
            out.append(t(out[-1]))
        return tuple(out)

    def image(self, M: UnimodularMatrix) -> Permutation7:
        return evaluate_syllables(_syllables(M), self)

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "phiS": str(self.phi_s),
            "phiR": str(self.phi_r),
            "phiT": str(self.phi_t),
            "basepoint": self.basepoint,
            "cuspWidthInfty": self.width,
            "generators": [list(g.entries) for g in self.generators],
        }


def _schreier_generators(phi_s: Permutation7, phi_r: Permutation7, b: int) -> list[UnimodularMatrix]:
    images = {"S": (S, phi_s), "R": (R, phi_r)}
    tau = {b: I2}
    todo = deque([b])
    while todo:
        x = todo.popleft()
        for mat, perm in images.values():
            y = perm(x)
            if y not in tau:
                tau[y] = mat * tau[x]
                todo.append(y)
    gens = []
    for x, tx in tau.items():
        for mat, perm in images.values():
            g = tau[perm(x)].inverse() * mat * tx
            if not g.is_identity() and g not in gens:
                gens.append(g)
    return gens


@lru_cache(maxsize=None)
def get_group(group_id: str) -> GroupDescriptor:
    """Descriptor for any of the 28 subgroups G1..G7, H1..H7, U1..U7, V1..V7."""
    if group_id not in ALL_IDS:
        raise KeyError(f"unknown group id {group_id!r}")
    fam, b = group_id[0], int(group_id[1])
    phi_s = Permutation7.from_cycles(_HOMS[fam][0])
    phi_r = Permutation7.from_cycles(_HOMS[fam][1])
    if group_id in _PRESENTATIONS:
        gens = tuple(UnimodularMatrix(*e) for e in _PRESENTATIONS[group_id])
    elif group_id in CANONICAL_IDS:
        gens = tuple(_schreier_generators(phi_s, phi_r, b))
    else:
        # G_{t^k(c)} = T^k G_c T^-k for the canonical c in the same T-cycle
        t = phi_s * phi_r
        cyc = t.cycle_of(b)
        base = next(c for c in _CANONICAL[fam] if c in cyc)
        k = 0
        x = base
        while x != b:
            x = t(x)
            k += 1
        parent = get_group(f"{fam}{base}")
        Tk = T ** k
        gens = tuple(Tk * g * Tk.inverse() for g in parent.generators)
    return GroupDescriptor(group_id, phi_s, phi_r, b, gens)


# ---------------------------------------------------------------- operations

def _letter_perm(tok: str, g: GroupDescriptor) -> Permutation7:
    base = {"S": g.phi_s, "R": g.phi_r, "T": g.phi_t}[tok[0]]
    return base.inverse() if tok.endswith("^-1") else base


def evaluate_word(word: Sequence[str], hom: GroupDescriptor) -> Permutation7:
    """Image of a word over S, T, R (and inverses) under the homomorphism of `hom`."""
    p = IDENTITY
    for tok in word:
        p = p * _letter_perm(tok, hom)
    return p


def evaluate_syllables(syl: Sequence[tuple[str, int]], hom: GroupDescriptor) -> Permutation7:
    p = IDENTITY
    for letter, e in syl:
        p = p * (_letter_perm(letter, hom) ** e)
    return p


def is_member(M: UnimodularMatrix, g: GroupDescriptor) -> bool:
    return g.image(M)(g.basepoint) == g.basepoint


def _lift(c: int, d: int) -> UnimodularMatrix:
    # extended Euclid: a d - b c = 1
    g, x, y = _egcd(d, -c)
    if g < 0:
        g, x, y = -g, -x, -y
    return UnimodularMatrix(x, y, c, d)


def _egcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    return a, x0, y0


def chi(c: int, d: int, g: GroupDescriptor) -> int:
    """1 iff some matrix of g has bottom row +-(c, d); reference route via word evaluation."""
    if math.gcd(c, d) != 1:
        return 0
    M = _lift(c, d)
    x = g.image(M)(g.basepoint)
    return int(x in g.t_orbit())


def outer_automorphism_image(g: GroupDescriptor | str) -> str:
    """Id of psi(g) for psi(a b; c d) = (a -b; -c d)."""
    if isinstance(g, str):
        g = get_group(g)
    images = [m.outer() for m in g.generators]
    hits = [gid for gid in ALL_IDS if all(is_member(m, get_group(gid)) for m in images)]
    if len(hits) != 1:
        raise AssertionError(f"conjugated generators of {g.id} lie in {hits}, expected exactly one group")
    return hits[0]


def reflection_offset(g: GroupDescriptor | str) -> int | None:
    """The a with psi(G_b) = G_{t^a(b)}, or None when psi changes the homomorphism.

    When it exists, chi(c, d) = chi(c, a c - d) for all (c, d).
    """
    if isinstance(g, str):
        g = get_group(g)
    img = get_group(outer_automorphism_image(g))
    if img.family != g.family:
        return None
    orbit = g.t_orbit()
    if img.basepoint not in orbit:
        return None
    return orbit.index(img.basepoint)
