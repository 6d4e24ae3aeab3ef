"""Graded-commutative functional algebra over exact rationals with hbar.

A :class:`GradedSpace` declares an ordered list of named generators with
integer degrees; parity is degree mod 2.  A :class:`Functional` is a
truncated polynomial in those generators with `fractions.Fraction`
coefficients, one coefficient per power of the formal variable hbar.
Monomials are stored in declaration order and signs follow the Koszul
rule: transposing two odd generators flips the sign, and an odd generator
squares to zero.

Contraction with a graded-symmetric :class:`Kernel` is the second-order
operator (1/2)·sum_ij K_ij ∂_i ∂_j built from left graded derivatives.
For odd kernels this is a BV Laplacian (it squares to zero), and its
failure to be a derivation defines the BV bracket.
"""

from __future__ import annotations

import json
from fractions import Fraction

from .errors import ConfigurationError, ConventionError, InputError

DEFAULT_HBAR_WINDOW = (-4, 2)


class GradedSpace:
    """An ordered, finite list of named generators with integer degrees."""

    def __init__(self, generators):
        gens = tuple((str(name), int(degree)) for name, degree in generators)
        names = [g[0] for g in gens]
        if len(set(names)) != len(names):
            raise InputError("generator names must be unique")
        self.generators = gens
        self._index = {name: i for i, (name, _) in enumerate(gens)}
        self.degrees = tuple(d for _, d in gens)
        self.parities = tuple(d % 2 for d in self.degrees)

    def __len__(self):
        return len(self.generators)

    def __eq__(self, other):
        return isinstance(other, GradedSpace) and self.generators == other.generators

    def __hash__(self):
        return hash(self.generators)

    def __repr__(self):
        return "GradedSpace(%s)" % (list(self.generators),)

    def index(self, name):
        try:
            return self._index[name]
        except KeyError:
            raise InputError("unknown generator %r" % (name,)) from None

    def name(self, i):
        return self.generators[i][0]

    def degree(self, i):
        return self.degrees[i]

    def parity(self, i):
        return self.parities[i]


def normalize_word(word, parities):
    """Sort a word of generator indices into declaration order.

    Returns ``(sign, tuple)`` with the Koszul sign of the sorting
    permutation, or ``(0, ())`` when an odd generator repeats.
    """
    w = list(word)
    sign = 1
    # insertion sort; each adjacent swap of two odd generators flips the sign
    for i in range(1, len(w)):
        j = i
        while j > 0 and w[j - 1] > w[j]:
            if parities[w[j - 1]] and parities[w[j]]:
                sign = -sign
            w[j - 1], w[j] = w[j], w[j - 1]
            j -= 1
    for i in range(1, len(w)):
        if w[i] == w[i - 1] and parities[w[i]]:
            return 0, ()
    return sign, tuple(w)


def _merge_sign(w1, w2, parities):
    """Koszul sign of sorting the concatenation of two sorted words."""
    sign = 1
    for x in w1:
        if not parities[x]:
            continue
        for y in w2:
            if y < x and parities[y]:
                sign = -sign
            elif y == x and parities[y]:
                return 0
    return sign


def word_degree(word, degrees):
    return sum(degrees[i] for i in word)


def word_parity(word, parities):
    return sum(parities[i] for i in word) % 2


class Functional:
    """Truncated graded polynomial with exact rational coefficients per hbar power.

    ``terms`` maps ``(word, hbar_power)`` to a nonzero Fraction, where
    ``word`` is a sorted tuple of generator indices of length <= ``trunc``.
    Instances are immutable; all operations return new objects.
    """

    __slots__ = ("space", "trunc", "hbar_window", "terms")

    def __init__(self, space, trunc, hbar_window=DEFAULT_HBAR_WINDOW, terms=None):
        self.space = space
        self.trunc = int(trunc)
        self.hbar_window = (int(hbar_window[0]), int(hbar_window[1]))
        if self.trunc < 1:
            raise InputError("truncation degree must be positive")
        clean = {}
        for (word, h), c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            if len(word) > self.trunc:
                continue
            if not (self.hbar_window[0] <= h <= self.hbar_window[1]):
                continue
            clean[(tuple(word), int(h))] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, space, trunc, hbar_window=DEFAULT_HBAR_WINDOW):
        return cls(space, trunc, hbar_window, {})

    @classmethod
    def constant(cls, space, trunc, value, hbar=0, hbar_window=DEFAULT_HBAR_WINDOW):
        return cls(space, trunc, hbar_window, {((), hbar): Fraction(value)})

    @classmethod
    def monomial(cls, space, trunc, names, coeff=1, hbar=0,
                 hbar_window=DEFAULT_HBAR_WINDOW):
        """Build coeff·hbar^h·(product of named generators), Koszul-normalized."""
        word = [space.index(n) for n in names]
        sign, sorted_word = normalize_word(word, space.parities)
        if sign == 0:
            return cls.zero(space, trunc, hbar_window)
        return cls(space, trunc, hbar_window,
                   {(sorted_word, hbar): sign * Fraction(coeff)})

    # -- bookkeeping ---------------------------------------------------

    def _check_compatible(self, other):
        if self.space != other.space:
            raise ConfigurationError("functionals live on different graded spaces")
        if self.trunc != other.trunc or self.hbar_window != other.hbar_window:
            raise ConfigurationError(
                "mixed truncation parameters: (%d, %s) vs (%d, %s)"
                % (self.trunc, self.hbar_window, other.trunc, other.hbar_window))

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, Functional) and self.space == other.space
                and self.terms == other.terms)

    def __hash__(self):
        raise TypeError("Functional is not hashable")

    def coefficient(self, names, hbar=0):
        """Coefficient of the (normalized) monomial in the given generators."""
        word = [self.space.index(n) for n in names]
        sign, sorted_word = normalize_word(word, self.space.parities)
        if sign == 0:
            return Fraction(0)
        return sign * self.terms.get((sorted_word, hbar), Fraction(0))

    def constant_part(self):
        """The field-independent terms, as a dict hbar power -> Fraction."""
        return {h: c for (w, h), c in self.terms.items() if not w}

    def max_word_length(self):
        return max((len(w) for (w, _) in self.terms), default=0)

    def homogeneous_parts(self):
        """Split by word parity.  Returns dict parity -> Functional."""
        parts = {0: {}, 1: {}}
        for (w, h), c in self.terms.items():
            parts[word_parity(w, self.space.parities)][(w, h)] = c
        return {p: Functional(self.space, self.trunc, self.hbar_window, t)
                for p, t in parts.items() if t}

    def hbar_components(self):
        """Split by hbar power.  Returns dict power -> Functional (hbar stripped)."""
        comps = {}
        for (w, h), c in self.terms.items():
            comps.setdefault(h, {})[(w, 0)] = c
        return {h: Functional(self.space, self.trunc, self.hbar_window, t)
                for h, t in comps.items()}

    def word_components(self):
        """Split by word length.  Returns dict length -> Functional."""
        comps = {}
        for (w, h), c in self.terms.items():
            comps.setdefault(len(w), {})[(w, h)] = c
        return {k: Functional(self.space, self.trunc, self.hbar_window, t)
                for k, t in comps.items()}

    # -- linear structure ----------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Functional.constant(self.space, self.trunc, other,
                                        hbar_window=self.hbar_window)
        self._check_compatible(other)
        terms = dict(self.terms)
        for k, c in other.terms.items():
            s = terms.get(k, Fraction(0)) + c
            if s:
                terms[k] = s
            else:
                terms.pop(k, None)
        return Functional(self.space, self.trunc, self.hbar_window, terms)

    __radd__ = __add__

    def __neg__(self):
        return Functional(self.space, self.trunc, self.hbar_window,
                          {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = Functional.constant(self.space, self.trunc, other,
                                        hbar_window=self.hbar_window)
        return self + (-other)

    def scale(self, value):
        value = Fraction(value)
        if value == 0:
            return Functional.zero(self.space, self.trunc, self.hbar_window)
        return Functional(self.space, self.trunc, self.hbar_window,
                          {k: value * c for k, c in self.terms.items()})

    def shift_hbar(self, k):
        """Multiply by hbar^k, truncating outside the window."""
        return Functional(self.space, self.trunc, self.hbar_window,
                          {(w, h + k): c for (w, h), c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return mul(self, other)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __repr__(self):
        if not self.terms:
            return "<Functional 0>"
        bits = []
        for (w, h) in sorted(self.terms, key=lambda k: (k[1], len(k[0]), k[0])):
            c = self.terms[(w, h)]
            mono = "*".join(self.space.name(i) for i in w) or "1"
            hb = "" if h == 0 else ("*h^%d" % h)
            bits.append("%s*%s%s" % (c, mono, hb))
        return "<Functional %s>" % " + ".join(bits[:12]) + ("..." if len(bits) > 12 else "")

    # -- serialization ---------------------------------------------------

    def to_json(self):
        entries = []
        for (w, h) in sorted(self.terms, key=lambda k: (k[1], len(k[0]), k[0])):
            entries.append({
                "monomial": [self.space.name(i) for i in w],
                "hbar": h,
                "coeff": str(self.terms[(w, h)]),
            })
        return {
            "space": {"generators": [{"name": n, "degree": d}
                                     for n, d in self.space.generators]},
            "D": self.trunc,
            "hbar_window": list(self.hbar_window),
            "terms": entries,
        }

    def dumps(self):
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data):
        space = GradedSpace([(g["name"], g["degree"])
                             for g in data["space"]["generators"]])
        out = cls.zero(space, data["D"], tuple(data["hbar_window"]))
        for entry in data["terms"]:
            out = out + cls.monomial(space, data["D"], entry["monomial"],
                                     Fraction(entry["coeff"]), entry["hbar"],
                                     tuple(data["hbar_window"]))
        return out

    @classmethod
    def loads(cls, text):
        return cls.from_json(json.loads(text))


class Kernel:
    """Graded-symmetric two-tensor with exact rational entries.

    ``entries`` maps ordered generator-index pairs (i, j) to Fractions and
    always stores both orientations, related by entry(a,b) =
    (-1)^{|a||b|} entry(b,a).  All nonzero entries must share the same
    total degree (homogeneity).
    """

    def __init__(self, space, entries, degree=None):
        self.space = space
        full = {}
        for (i, j), c in entries.items():
            c = Fraction(c)
            if c == 0:
                continue
            flip = -c if (space.parity(i) and space.parity(j)) else c
            if (i, j) in full and full[(i, j)] != c:
                raise InputError("conflicting kernel entries at %s" % ((i, j),))
            if (j, i) in full and full[(j, i)] != flip:
                raise InputError("kernel entries violate graded symmetry at %s" % ((i, j),))
            full[(i, j)] = c
            full[(j, i)] = flip
        degs = {space.degree(i) + space.degree(j) for (i, j) in full}
        if len(degs) > 1:
            raise InputError("kernel is not homogeneous: entry degrees %s" % sorted(degs))
        inferred = degs.pop() if degs else None
        if degree is None:
            degree = inferred if inferred is not None else 0
        elif inferred is not None and degree != inferred:
            raise InputError("declared kernel degree %d != entry degree %d"
                             % (degree, inferred))
        self.degree = degree
        self.entries = full

    @classmethod
    def from_pairs(cls, space, pairs):
        """Build from [(name_a, name_b, coeff), ...], symmetrizing automatically."""
        entries = {}
        for a, b, c in pairs:
            entries[(space.index(a), space.index(b))] = Fraction(c)
        return cls(space, entries)

    def is_zero(self):
        return not self.entries

    def scale(self, value):
        value = Fraction(value)
        return Kernel(self.space, {k: value * c for k, c in self.entries.items()},
                      self.degree if self.entries and value else None)

    def __add__(self, other):
        if self.space != other.space:
            raise ConfigurationError("kernels live on different graded spaces")
        entries = dict(self.entries)
        for k, c in other.entries.items():
            s = entries.get(k, Fraction(0)) + c
            if s:
                entries[k] = s
            else:
                entries.pop(k, None)
        return Kernel(self.space, entries)

    def __repr__(self):
        return "<Kernel deg=%s %d entries>" % (self.degree, len(self.entries))


class Derivation:
    """Degree-homogeneous derivation, stored by its images on generators."""

    def __init__(self, space, degree, images):
        self.space = space
        self.degree = int(degree)
        imgs = {}
        for key, f in images.items():
            i = space.index(key) if isinstance(key, str) else int(key)
            if f.space != space:
                raise ConfigurationError("derivation image lives on the wrong space")
            for (w, _h), _c in f.terms.items():
                if word_degree(w, space.degrees) != space.degree(i) + self.degree:
                    raise InputError(
                        "image of %s has a term of degree %d, expected %d"
                        % (space.name(i), word_degree(w, space.degrees),
                           space.degree(i) + self.degree))
            if not f.is_zero():
                imgs[i] = f
        self.images = imgs

    @property
    def parity(self):
        return self.degree % 2

    def image(self, i):
        return self.images.get(i)

    def __repr__(self):
        return "<Derivation deg=%d on %d generators>" % (self.degree, len(self.images))


# ---------------------------------------------------------------------------
# operations


def mul(f, g):
    """Graded-commutative product, truncated to the common degree and window."""
    f._check_compatible(g)
    parities = f.space.parities
    terms = {}
    for (w1, h1), c1 in f.terms.items():
        for (w2, h2), c2 in g.terms.items():
            if len(w1) + len(w2) > f.trunc:
                continue
            h = h1 + h2
            if not (f.hbar_window[0] <= h <= f.hbar_window[1]):
                continue
            sign = _merge_sign(w1, w2, parities)
            if sign == 0:
                continue
            _, word = normalize_word(w1 + w2, parities)
            key = (word, h)
            s = terms.get(key, Fraction(0)) + sign * c1 * c2
            if s:
                terms[key] = s
            else:
                del terms[key]
    return Functional(f.space, f.trunc, f.hbar_window, terms)


def left_partial(f, i):
    """Left graded partial derivative with respect to generator ``i``."""
    parities = f.space.parities
    odd_i = parities[i]
    terms = {}
    for (w, h), c in f.terms.items():
        prefix_parity = 0
        for pos, gen in enumerate(w):
            if gen == i:
                sign = -1 if (odd_i and prefix_parity) else 1
                new_word = w[:pos] + w[pos + 1:]
                key = (new_word, h)
                s = terms.get(key, Fraction(0)) + sign * c
                if s:
                    terms[key] = s
                else:
                    del terms[key]
            prefix_parity ^= parities[gen]
    return Functional(f.space, f.trunc, f.hbar_window, terms)


def deriv_at_zero(f, word):
    """Iterated left derivative along ``word`` (rightmost applied first), at 0.

    Returns dict hbar power -> Fraction.  This is the multilinear tensor
    component of ``f`` on the given generator tuple.
    """
    g = f
    for i in reversed(word):
        g = left_partial(g, i)
        if g.is_zero():
            return {}
    return g.constant_part()


def contract(f, k):
    """Second-order contraction (1/2)·sum_ij K_ij ∂_i ∂_j f."""
    if f.space != k.space:
        raise ConfigurationError("functional and kernel live on different spaces")
    out = Functional.zero(f.space, f.trunc, f.hbar_window)
    cache = {}
    for (i, j), c in k.entries.items():
        if j not in cache:
            cache[j] = left_partial(f, j)
        out = out + left_partial(cache[j], i).scale(Fraction(c, 2))
    return out


def bv_laplacian(f, k):
    """BV Laplacian: contraction with an odd kernel.  Squares to zero."""
    if k.degree % 2 == 0:
        raise ConventionError("BV kernel must have odd total degree, got %d" % k.degree)
    return contract(f, k)


def bv_bracket(f, g, k):
    """Scale-k BV bracket {f,g} = Δ(fg) − (Δf)g − (−1)^{|f|} f(Δg)."""
    if k.degree % 2 == 0:
        raise ConventionError("BV kernel must have odd total degree, got %d" % k.degree)
    out = Functional.zero(f.space, f.trunc, f.hbar_window)
    for par, fp in f.homogeneous_parts().items():
        sign = -1 if par else 1
        out = out + contract(mul(fp, g), k) - mul(contract(fp, k), g) \
            - mul(fp, contract(g, k)).scale(sign)
    return out


def apply_derivation(d, f):
    """Leibniz extension of ``d``: d(f) = sum_i d(g_i)·(∂_i f)."""
    if d.space != f.space:
        raise ConfigurationError("derivation and functional live on different spaces")
    out = Functional.zero(f.space, f.trunc, f.hbar_window)
    for i, img in d.images.items():
        part = left_partial(f, i)
        if part.is_zero():
            continue
        img_local = Functional(f.space, f.trunc, f.hbar_window, img.terms)
        out = out + mul(img_local, part)
    return out


def compose_derivations(d1, d2):
    """The derivation whose action is d1∘d2 minus nothing — i.e. images d1(d2(g)).

    Note d1∘d2 is not itself a derivation in general; this helper returns the
    functional images d1(d2(g_i)) used by square-zero checks.
    """
    return {i: apply_derivation(d1, img) for i, img in d2.images.items()}


def lagrangian_restrict(f, fermion_line, kill_set):
    """Coefficient of a product of distinct odd generators, after killing a set.

    ``fermion_line``: sequence of generator names (all odd, no repeats).
    ``kill_set``: generator names whose presence disqualifies a term.
    Returns dict hbar power -> Fraction.
    """
    space = f.space
    line = [space.index(n) for n in fermion_line]
    if len(set(line)) != len(line):
        raise InputError("fermion line repeats a generator")
    for i in line:
        if not space.parity(i):
            raise InputError("fermion line contains even generator %r" % space.name(i))
    kill = {space.index(n) for n in kill_set}
    sign, target = normalize_word(line, space.parities)
    out = {}
    for (w, h), c in f.terms.items():
        if any(i in kill for i in w):
            continue
        if w != target:
            continue
        out[h] = out.get(h, Fraction(0)) + sign * c
    return {h: c for h, c in out.items() if c}


def exp_functional(f):
    """exp(f) truncated by word length and the hbar window.

    Requires every term of ``f`` to either carry a positive word length or a
    nonzero hbar power, so that the series terminates under truncation.
    """
    for (w, h), _ in f.terms.items():
        if not w and h == 0:
            raise InputError("exp of a functional with an hbar^0 constant term")
    out = Functional.constant(f.space, f.trunc, 1, hbar_window=f.hbar_window)
    term = out
    n = 1
    while True:
        term = mul(term, f).scale(Fraction(1, n))
        if term.is_zero():
            break
        out = out + term
        n += 1
    return out
