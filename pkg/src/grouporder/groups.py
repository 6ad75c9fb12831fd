"""Black-box groups with unique fixed-length encodings.

Every element travels as an ``ElementCode`` (``bytes`` of the handle's
``encoding_length``).  Algorithms elsewhere in the package only touch
elements through :meth:`GroupHandle.mul`, :meth:`GroupHandle.invmul` and
friends, so the two backends here are interchangeable.

Permutations compose left to right: ``mul(g, h)`` applies ``g`` first, then
``h``.  Permutation codes hold the 0-based image array, one fixed-width
big-endian integer per point.  Matrix codes hold the entries in row-major
order, each entry written as its little-endian coefficient vector over the
prime field.
"""

from __future__ import annotations

import math
import re
from functools import reduce

from .errors import InvalidCode, NotBijection, SingularGenerator, SpecParseError
from .field import FiniteField, ff_make

ElementCode = bytes


def _byte_width(max_value: int) -> int:
    return max(1, (max_value.bit_length() + 7) // 8)


class GroupHandle:
    """An ambient black-box group together with designated generators."""

    kind = "abstract"

    def __init__(self, generators, order_bound: int, encoding_length: int, identity: bytes):
        self.encoding_length = encoding_length
        self.identity = identity
        self.order_bound = order_bound
        if order_bound < 1:
            raise ValueError("order bound must be positive")
        if 8 * encoding_length < math.ceil(math.log2(order_bound)) if order_bound > 1 else False:
            raise ValueError("encoding too short for the declared order bound")
        gens = tuple(bytes(g) for g in generators)
        for g in gens:
            if not self.is_valid(g):
                raise InvalidCode(f"generator {g.hex()} is not a valid code")
        self.generators = gens
        # scratch memo for brute-force routines; keyed by frozen inputs only
        self.cache: dict = {}

    # backend hooks
    def is_valid(self, a: bytes) -> bool:
        raise NotImplementedError

    def _mul(self, a: bytes, b: bytes) -> bytes:
        raise NotImplementedError

    def _inv(self, a: bytes) -> bytes:
        raise NotImplementedError

    def describe(self, a: bytes) -> str:
        return a.hex()

    # oracles
    def check(self, a) -> bytes:
        if not isinstance(a, (bytes, bytearray)) or not self.is_valid(bytes(a)):
            raise InvalidCode(f"not a valid element code: {bytes(a).hex() if isinstance(a, (bytes, bytearray)) else a!r}")
        return bytes(a)

    def mul(self, a: bytes, b: bytes) -> bytes:
        return self._mul(self.check(a), self.check(b))

    def invmul(self, a: bytes, b: bytes) -> bytes:
        return self._mul(self._inv(self.check(a)), self.check(b))

    def inv(self, a: bytes) -> bytes:
        return self._inv(self.check(a))

    # conveniences built on the oracles
    def prod(self, *elems) -> bytes:
        return reduce(self.mul, elems, self.identity)

    def power(self, a: bytes, e: int) -> bytes:
        if e < 0:
            a, e = self.inv(a), -e
        acc = self.identity
        while e:
            if e & 1:
                acc = self.mul(acc, a)
            a = self.mul(a, a)
            e >>= 1
        return acc

    def conj(self, g: bytes, h: bytes) -> bytes:
        """``g h g^{-1}``."""
        return self.mul(self.mul(g, h), self.inv(g))

    def commutator(self, a: bytes, b: bytes) -> bytes:
        """``a^{-1} b^{-1} a b``."""
        return self.mul(self.invmul(a, self.inv(b)), self.mul(a, b))

    def element_order(self, a: bytes) -> int:
        n, x = 1, self.check(a)
        while x != self.identity:
            x = self._mul(x, a)
            n += 1
        return n

    def is_identity(self, a: bytes) -> bool:
        return self.check(a) == self.identity

    def __repr__(self):
        return f"<{type(self).__name__} n={self.encoding_length} gens={len(self.generators)}>"


class PermGroup(GroupHandle):
    kind = "perm"

    def __init__(self, degree: int, generators, order_bound: int | None = None):
        self.degree = degree
        self.width = _byte_width(max(degree - 1, 0))
        ident = b"".join(i.to_bytes(self.width, "big") for i in range(degree))
        if order_bound is None:
            order_bound = math.factorial(degree)
        super().__init__(generators, order_bound, degree * self.width, ident)
        self._pad = bytes(range(degree, 256)) if self.width == 1 else b""

    def images(self, a: bytes) -> list[int]:
        if self.width == 1:
            return list(a)
        w = self.width
        return [int.from_bytes(a[i : i + w], "big") for i in range(0, len(a), w)]

    def encode(self, images) -> bytes:
        if self.width == 1:
            return bytes(images)
        return b"".join(x.to_bytes(self.width, "big") for x in images)

    def is_valid(self, a: bytes) -> bool:
        if len(a) != self.encoding_length:
            return False
        imgs = a if self.width == 1 else self.images(a)
        return len(set(imgs)) == self.degree and (self.degree == 0 or max(imgs) < self.degree)

    def _mul(self, a, b):
        if self.width == 1:
            return a.translate(b + self._pad)
        bi = self.images(b)
        return self.encode([bi[x] for x in self.images(a)])

    def _inv(self, a):
        out = [0] * self.degree
        for i, x in enumerate(self.images(a)):
            out[x] = i
        return self.encode(out)

    def describe(self, a):
        return format_cycles(self.images(a))


class MatrixGroup(GroupHandle):
    kind = "matrix"

    def __init__(self, field: FiniteField, dim: int, generators, order_bound: int | None = None):
        self.field = field
        self.dim = dim
        self.cwidth = _byte_width(field.p - 1)
        ident = self.encode([[1 if i == j else 0 for j in range(dim)] for i in range(dim)])
        if order_bound is None:
            order_bound = gl_order(dim, field.q)
        self._decoded: dict = {}
        super().__init__(generators, order_bound, dim * dim * field.k * self.cwidth, ident)

    def encode(self, rows) -> bytes:
        F, w = self.field, self.cwidth
        out = bytearray()
        for row in rows:
            for x in row:
                for c in F.coeffs(x):
                    out += c.to_bytes(w, "little")
        return bytes(out)

    def decode(self, a: bytes):
        hit = self._decoded.get(a)
        if hit is not None:
            return hit
        F, w, d = self.field, self.cwidth, self.dim
        if len(a) != self.encoding_length:
            raise InvalidCode("wrong length")
        step = F.k * w
        entries = []
        for off in range(0, len(a), step):
            coeffs = [int.from_bytes(a[off + j * w : off + (j + 1) * w], "little") for j in range(F.k)]
            if any(c >= F.p for c in coeffs):
                raise InvalidCode("coefficient out of range")
            entries.append(F.from_coeffs(coeffs))
        rows = tuple(tuple(entries[i * d : (i + 1) * d]) for i in range(d))
        if len(self._decoded) < 500_000:
            self._decoded[a] = rows
        return rows

    def is_valid(self, a: bytes) -> bool:
        try:
            rows = self.decode(a)
        except InvalidCode:
            return False
        return mat_det(self.field, rows) != 0

    def _mul(self, a, b):
        return self.encode(mat_mul(self.field, self.decode(a), self.decode(b)))

    def _inv(self, a):
        return self.encode(mat_inv(self.field, self.decode(a)))

    def describe(self, a):
        return "[" + "; ".join(" ".join(str(x) for x in row) for row in self.decode(a)) + "]"


class ProductGroup(GroupHandle):
    """Direct product of two handles; codes are concatenations."""

    kind = "product"

    def __init__(self, left: GroupHandle, right: GroupHandle, generators=()):
        self.left, self.right = left, right
        self._split = left.encoding_length
        super().__init__(generators, left.order_bound * right.order_bound,
                         left.encoding_length + right.encoding_length, left.identity + right.identity)

    def pair(self, a: bytes, b: bytes) -> bytes:
        return self.left.check(a) + self.right.check(b)

    def parts(self, a: bytes):
        return a[: self._split], a[self._split :]

    def is_valid(self, a):
        if len(a) != self.encoding_length:
            return False
        x, y = self.parts(a)
        return self.left.is_valid(x) and self.right.is_valid(y)

    def _mul(self, a, b):
        (a1, a2), (b1, b2) = self.parts(a), self.parts(b)
        return self.left._mul(a1, b1) + self.right._mul(a2, b2)

    def _inv(self, a):
        a1, a2 = self.parts(a)
        return self.left._inv(a1) + self.right._inv(a2)

    def describe(self, a):
        a1, a2 = self.parts(a)
        return f"({self.left.describe(a1)}, {self.right.describe(a2)})"


# -- matrix arithmetic over a FiniteField (entries are field ints)

def mat_mul(F: FiniteField, A, B):
    n, m = len(A), len(B[0])
    if F.k == 1:
        p = F.p
        cols = list(zip(*B))
        return tuple(tuple(sum(x * y for x, y in zip(row, col)) % p for col in cols) for row in A)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = 0
            for t in range(len(B)):
                if A[i][t] and B[t][j]:
                    acc = F.add(acc, F.mul(A[i][t], B[t][j]))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def _row_reduce(F: FiniteField, A, augment):
    n = len(A)
    M = [list(A[i]) + list(augment[i]) for i in range(n)]
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if M[r][c]), None)
        if piv is None:
            return 0, None
        if piv != c:
            M[c], M[piv] = M[piv], M[c]
            det = F.neg(det)
        pv = M[c][c]
        det = F.mul(det, pv)
        inv_pv = F.inv(pv)
        M[c] = [F.mul(inv_pv, x) for x in M[c]]
        for r in range(n):
            if r != c and M[r][c]:
                f = M[r][c]
                M[r] = [F.sub(x, F.mul(f, y)) for x, y in zip(M[r], M[c])]
    return det, M


def mat_det(F: FiniteField, A) -> int:
    det, _ = _row_reduce(F, A, [[] for _ in A])
    return det


def mat_inv(F: FiniteField, A):
    n = len(A)
    eye = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    det, M = _row_reduce(F, A, eye)
    if not det:
        raise SingularGenerator("matrix is singular")
    return tuple(tuple(row[n:]) for row in M)


def mat_pow(F: FiniteField, A, e: int):
    n = len(A)
    acc = tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))
    while e:
        if e & 1:
            acc = mat_mul(F, acc, A)
        A = mat_mul(F, A, A)
        e >>= 1
    return acc


def gl_order(dim: int, q: int) -> int:
    out = 1
    for i in range(dim):
        out *= q**dim - q**i
    return out


# -- public constructors mirroring the oracle interface

def oracle_mul(G: GroupHandle, a: bytes, b: bytes) -> bytes:
    return G.mul(a, b)


def oracle_invmul(G: GroupHandle, a: bytes, b: bytes) -> bytes:
    return G.invmul(a, b)


def perm_code(degree: int, images, one_based: bool = True) -> bytes:
    """Encode a point-image array, checking that it is a bijection."""
    imgs = [x - 1 for x in images] if one_based else list(images)
    if len(imgs) != degree or sorted(imgs) != list(range(degree)):
        raise NotBijection(f"{list(images)} is not a bijection on {degree} points")
    w = _byte_width(max(degree - 1, 0))
    return b"".join(x.to_bytes(w, "big") for x in imgs)


def perm_group(degree: int, gens, order_bound: int | None = None) -> PermGroup:
    """Permutation group handle; ``gens`` are 1-based point-image arrays or cycle strings."""
    codes = []
    for g in gens:
        if isinstance(g, str):
            g = cycles_to_images(degree, g)
        codes.append(perm_code(degree, g))
    return PermGroup(degree, codes, order_bound)


def matrix_group(field: FiniteField, dim: int, gens, order_bound: int | None = None) -> MatrixGroup:
    rows_list = []
    for g in gens:
        rows = tuple(tuple(field.scalar(x) if field.k == 1 else x for x in row) for row in g)
        if len(rows) != dim or any(len(r) != dim for r in rows):
            raise ValueError("matrix has the wrong shape")
        if mat_det(field, rows) == 0:
            raise SingularGenerator(f"singular generator {rows}")
        rows_list.append(rows)
    shell = MatrixGroup(field, dim, [], order_bound)
    return MatrixGroup(field, dim, [shell.encode(r) for r in rows_list], order_bound)


def direct_product(left: GroupHandle, right: GroupHandle, pairs=()) -> ProductGroup:
    shell = ProductGroup(left, right)
    return ProductGroup(left, right, [shell.pair(a, b) for a, b in pairs])


def with_generators(G: GroupHandle, gens) -> GroupHandle:
    """Same ambient group and encoding, different designated generators."""
    if isinstance(G, PermGroup):
        return PermGroup(G.degree, gens, G.order_bound)
    if isinstance(G, MatrixGroup):
        return MatrixGroup(G.field, G.dim, gens, G.order_bound)
    if isinstance(G, ProductGroup):
        return ProductGroup(G.left, G.right, gens)
    raise TypeError(type(G))


# -- cycle notation

def cycles_to_images(degree: int, text: str) -> list[int]:
    """``"(1 2 3)(4 5)"`` -> 1-based image array.  Cycles compose left to right."""
    if re.fullmatch(r"\s*(\([^()]*\)\s*)+", text) is None:
        raise ValueError(f"malformed cycle notation {text!r}")
    imgs = list(range(1, degree + 1))
    for cyc in re.findall(r"\(([^()]*)\)", text):
        pts = [int(x) for x in cyc.replace(",", " ").split()]
        if len(set(pts)) != len(pts) or any(not 1 <= x <= degree for x in pts):
            raise ValueError(f"bad cycle ({cyc})")
        if len(pts) < 2:
            continue
        step = {pts[i]: pts[(i + 1) % len(pts)] for i in range(len(pts))}
        imgs = [step.get(x, x) for x in imgs]
    return imgs


def format_cycles(images0) -> str:
    seen, out = set(), []
    for i in range(len(images0)):
        if i in seen or images0[i] == i:
            continue
        cyc, j = [i], images0[i]
        seen.add(i)
        while j != i:
            seen.add(j)
            cyc.append(j)
            j = images0[j]
        out.append("(" + " ".join(str(x + 1) for x in cyc) + ")")
    return "".join(out) or "()"


# -- Ree generators

def ree_generators(a: int = 1, max_field_size: int = 2**20):
    """The three 7x7 generators of R(3^(2a+1)) as field-int matrices.

    Returns ``(field, (g1, g2, g3))``.  GF(27) uses x^3 + 2x + 1; larger
    fields use the first irreducible trinomial-free search over monic cubes.
    """
    if a < 1:
        raise ValueError("a must be >= 1")
    k = 2 * a + 1
    F = _ree_field(k, max_field_size)
    t = 3**a
    m1 = -1 % 3
    g1_int = [
        [1, 1, 0, 0, -1, -1, 1],
        [0, 1, 1, 1, -1, 0, -1],
        [0, 0, 1, 1, -1, 0, 1],
        [0, 0, 0, 1, 1, 0, 0],
        [0, 0, 0, 0, 1, -1, 1],
        [0, 0, 0, 0, 0, 1, -1],
        [0, 0, 0, 0, 0, 0, 1],
    ]
    g1 = tuple(tuple(F.scalar(x) for x in row) for row in g1_int)
    g2 = tuple(tuple(m1 if i + j == 6 else 0 for j in range(7)) for i in range(7))
    exps = [t, 1 - t, 2 * t - 1, 0, 1 - 2 * t, t - 1, -t]
    g3 = tuple(tuple(F.omega_pow(exps[i]) if i == j else 0 for j in range(7)) for i in range(7))
    return F, (g1, g2, g3)


def _ree_field(k: int, max_field_size: int) -> FiniteField:
    from .errors import FieldTooLarge
    from .field import is_irreducible

    if 3**k > max_field_size:
        raise FieldTooLarge(f"GF(3^{k}) exceeds the cap of {max_field_size}")
    if k == 3:
        return ff_make(3, 3, [1, 2, 0, 1], max_field_size)
    for n in range(3**k):
        coeffs = [(n // 3**i) % 3 for i in range(k)] + [1]
        if coeffs[0] and is_irreducible(coeffs, 3):
            return ff_make(3, k, coeffs, max_field_size)
    raise AssertionError("unreachable")


# -- group spec files

def parse_group_spec(text: str) -> GroupHandle:
    """Parse the one-directive-per-line group spec format.

    Directives: ``kind perm|matrix``, ``degree d`` or ``field p k c0 .. ck``
    with ``dim d``, ``order_bound N`` and repeated ``gen ...`` lines.  A
    permutation ``gen`` is either a 1-based image array or cycle notation; a
    matrix ``gen`` lists dim*dim field-element ints in row-major order.
    """
    kind = degree = dim = fld = bound = None
    raw_gens = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(" ")
        rest = rest.strip()
        try:
            if key == "kind":
                if rest not in ("perm", "matrix"):
                    raise SpecParseError(f"unknown kind {rest!r}", lineno)
                kind = rest
            elif key == "degree":
                degree = int(rest)
            elif key == "dim":
                dim = int(rest)
            elif key == "field":
                nums = [int(x) for x in rest.split()]
                if len(nums) < 2:
                    raise SpecParseError("field needs p and k", lineno)
                p, k, coeffs = nums[0], nums[1], nums[2:] or None
                fld = ff_make(p, k, coeffs)
            elif key == "order_bound":
                bound = int(rest)
            elif key == "gen":
                raw_gens.append((lineno, rest))
            else:
                raise SpecParseError(f"unknown directive {key!r}", lineno)
        except SpecParseError:
            raise
        except Exception as exc:
            raise SpecParseError(str(exc), lineno) from exc
    if kind is None:
        raise SpecParseError("missing 'kind' directive")
    gens = []
    if kind == "perm":
        if degree is None:
            raise SpecParseError("perm spec needs 'degree'")
        for lineno, rest in raw_gens:
            try:
                imgs = cycles_to_images(degree, rest) if "(" in rest else [int(x) for x in rest.split()]
                gens.append(perm_code(degree, imgs))
            except Exception as exc:
                raise SpecParseError(str(exc), lineno) from exc
        if not gens:
            gens = [perm_code(degree, range(1, degree + 1))]
        return PermGroup(degree, gens, bound)
    if fld is None or dim is None:
        raise SpecParseError("matrix spec needs 'field' and 'dim'")
    shell = MatrixGroup(fld, dim, [], bound)
    for lineno, rest in raw_gens:
        try:
            nums = [int(x) for x in rest.split()]
            if len(nums) != dim * dim:
                raise ValueError(f"expected {dim * dim} entries, got {len(nums)}")
            rows = tuple(tuple(nums[i * dim : (i + 1) * dim]) for i in range(dim))
            if mat_det(fld, rows) == 0:
                raise SingularGenerator("singular generator")
            gens.append(shell.encode(rows))
        except Exception as exc:
            raise SpecParseError(str(exc), lineno) from exc
    if not gens:
        gens = [shell.identity]
    return MatrixGroup(fld, dim, gens, bound)


def load_group_spec(path) -> GroupHandle:
    with open(path) as fh:
        return parse_group_spec(fh.read())


def format_group_spec(G: GroupHandle) -> str:
    lines = []
    if isinstance(G, PermGroup):
        lines += ["kind perm", f"degree {G.degree}", f"order_bound {G.order_bound}"]
        lines += ["gen " + " ".join(str(x + 1) for x in G.images(g)) for g in G.generators]
    elif isinstance(G, MatrixGroup):
        F = G.field
        lines += ["kind matrix", "field " + " ".join(str(x) for x in (F.p, F.k, *F.reduction)),
                  f"dim {G.dim}", f"order_bound {G.order_bound}"]
        lines += ["gen " + " ".join(str(x) for row in G.decode(g) for x in row) for g in G.generators]
    else:
        raise TypeError("only perm and matrix handles have a spec format")
    return "\n".join(lines) + "\n"
