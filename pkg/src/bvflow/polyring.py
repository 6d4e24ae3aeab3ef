"""Exact multivariate polynomial arithmetic and Groebner machinery.

Polynomials are maps exponent-vector -> Fraction over a fixed number of
variables.  The monomial order is graded reverse lexicographic throughout;
Buchberger's algorithm with the coprime-leading-term and chain criteria is
enough at desk scale (Milnor numbers up to a few hundred).

The text grammar accepted by :func:`parse_poly` covers terms like
``3/2*x^2*y - z`` with the variables declared in order, plus parenthesized
subexpressions and division by integer constants, e.g. ``(x^3+y^3)/3``.
"""

from __future__ import annotations

import itertools
import re
from fractions import Fraction

from .errors import InputError, NonIsolatedCriticalLocus, NotInIdeal


class MPoly:
    """Multivariate polynomial over the rationals.

    ``terms`` maps exponent tuples (length ``nvars``) to nonzero Fractions.
    """

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = int(nvars)
        clean = {}
        for exp, c in (terms or {}).items():
            c = Fraction(c)
            if c == 0:
                continue
            exp = tuple(int(e) for e in exp)
            if len(exp) != self.nvars or any(e < 0 for e in exp):
                raise InputError("bad exponent vector %r for %d variables"
                                 % (exp, self.nvars))
            clean[exp] = c
        self.terms = clean

    @classmethod
    def zero(cls, nvars):
        return cls(nvars, {})

    @classmethod
    def constant(cls, nvars, value):
        return cls(nvars, {(0,) * nvars: Fraction(value)})

    @classmethod
    def variable(cls, nvars, i):
        exp = [0] * nvars
        exp[i] = 1
        return cls(nvars, {tuple(exp): Fraction(1)})

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, MPoly) and self.nvars == other.nvars
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.nvars, frozenset(self.terms.items())))

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.nvars, other)
        if self.nvars != other.nvars:
            raise InputError("mixed variable counts")
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            s = terms.get(exp, Fraction(0)) + c
            if s:
                terms[exp] = s
            else:
                del terms[exp]
        return MPoly(self.nvars, terms)

    __radd__ = __add__

    def __neg__(self):
        return MPoly(self.nvars, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = MPoly.constant(self.nvars, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            c = Fraction(other)
            return MPoly(self.nvars, {e: c * v for e, v in self.terms.items()})
        if self.nvars != other.nvars:
            raise InputError("mixed variable counts")
        terms = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e, Fraction(0)) + c1 * c2
                if s:
                    terms[e] = s
                else:
                    del terms[e]
        return MPoly(self.nvars, terms)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            raise InputError("negative polynomial power")
        out = MPoly.constant(self.nvars, 1)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def evaluate(self, point):
        if len(point) != self.nvars:
            raise InputError("evaluation point has wrong length")
        total = Fraction(0)
        for exp, c in self.terms.items():
            v = c
            for x, e in zip(point, exp):
                v *= Fraction(x) ** e
            total += v
        return total

    def total_degree(self):
        return max((sum(e) for e in self.terms), default=-1)

    def leading_term(self):
        """(exponent, coefficient) maximal in grevlex order."""
        if not self.terms:
            raise InputError("leading term of the zero polynomial")
        exp = max(self.terms, key=_grevlex_key)
        return exp, self.terms[exp]

    def monic(self):
        if self.is_zero():
            return self
        _, c = self.leading_term()
        return self * (1 / c)

    def text(self, variables):
        if len(variables) != self.nvars:
            raise InputError("variable list has wrong length")
        if not self.terms:
            return "0"
        bits = []
        for exp in sorted(self.terms, key=_grevlex_key, reverse=True):
            c = self.terms[exp]
            factors = []
            for name, e in zip(variables, exp):
                if e == 1:
                    factors.append(name)
                elif e > 1:
                    factors.append("%s^%d" % (name, e))
            if not factors:
                bits.append(str(c))
            elif c == 1:
                bits.append("*".join(factors))
            elif c == -1:
                bits.append("-" + "*".join(factors))
            else:
                bits.append("%s*%s" % (c, "*".join(factors)))
        out = bits[0]
        for b in bits[1:]:
            out += " - " + b[1:] if b.startswith("-") else " + " + b
        return out

    def __repr__(self):
        return "<MPoly %s>" % self.text(["x%d" % i for i in range(self.nvars)])


def _grevlex_key(exp):
    # graded reverse lex: compare total degree, then the reversed exponent
    # vector with inverted sign (the smaller trailing entry wins)
    return (sum(exp), tuple(-e for e in reversed(exp)))


def _divides(e1, e2):
    return all(a <= b for a, b in zip(e1, e2))


def _exp_sub(e1, e2):
    return tuple(a - b for a, b in zip(e1, e2))


def _exp_lcm(e1, e2):
    return tuple(max(a, b) for a, b in zip(e1, e2))


def parse_poly(text, variables):
    """Parse the polynomial grammar into an MPoly.

    Grammar: expr := term (('+'|'-') term)*; term := factor (('*'|'/')
    factor)*; factor := rational | variable ['^' int] | '(' expr ')' ['^' int]
    with an optional leading sign.  Division is only by constants.
    """
    variables = list(variables)
    nvars = len(variables)
    var_index = {v: i for i, v in enumerate(variables)}
    tokens = re.findall(r"\d+|[A-Za-z_][A-Za-z_0-9]*|\^|\*|/|\+|-|\(|\)", text)
    if "".join(tokens).replace(" ", "") != text.replace(" ", ""):
        raise InputError("could not tokenize polynomial %r" % text)
    pos = [0]

    def peek():
        return tokens[pos[0]] if pos[0] < len(tokens) else None

    def take(tok=None):
        t = peek()
        if t is None or (tok is not None and t != tok):
            raise InputError("unexpected token %r in %r" % (t, text))
        pos[0] += 1
        return t

    def parse_expr():
        sign = 1
        while peek() in ("+", "-"):
            if take() == "-":
                sign = -sign
        out = parse_term() * sign
        while peek() in ("+", "-"):
            sign = 1 if take() == "+" else -1
            out = out + parse_term() * sign
        return out

    def parse_term():
        out = parse_factor()
        while peek() in ("*", "/"):
            op = take()
            rhs = parse_factor()
            if op == "*":
                out = out * rhs
            else:
                if rhs.total_degree() != 0:
                    raise InputError("division only by constants in %r" % text)
                out = out * (1 / rhs.terms[(0,) * nvars])
        return out

    def parse_factor():
        t = peek()
        if t is None:
            raise InputError("unexpected end of input in %r" % text)
        if t == "(":
            take("(")
            inner = parse_expr()
            take(")")
            return maybe_power(inner)
        if t.isdigit():
            take()
            return MPoly.constant(nvars, Fraction(t))
        if t in var_index:
            take()
            return maybe_power(MPoly.variable(nvars, var_index[t]))
        raise InputError("unknown symbol %r (variables are %s)" % (t, variables))

    def maybe_power(base):
        if peek() == "^":
            take("^")
            e = take()
            if not e.isdigit():
                raise InputError("bad exponent %r" % e)
            return base ** int(e)
        return base

    out = parse_expr()
    if pos[0] != len(tokens):
        raise InputError("trailing tokens in %r" % text)
    return out


def partials(w):
    """Formal partial derivatives, one MPoly per variable."""
    out = []
    for i in range(w.nvars):
        terms = {}
        for exp, c in w.terms.items():
            if exp[i] == 0:
                continue
            new = list(exp)
            new[i] -= 1
            terms[tuple(new)] = c * exp[i]
        out.append(MPoly(w.nvars, terms))
    return out


def normal_form(f, basis):
    """Remainder of multivariate division by ``basis`` in grevlex order."""
    return _divide(f, basis)[1]


def _divide(f, basis):
    """Division with cofactors: f = sum_i q_i basis_i + r."""
    nvars = f.nvars
    quotients = [MPoly.zero(nvars) for _ in basis]
    remainder = {}
    work = dict(f.terms)
    lts = [g.leading_term() for g in basis]
    while work:
        exp = max(work, key=_grevlex_key)
        coeff = work.pop(exp)
        for i, (lt_exp, lt_c) in enumerate(lts):
            if _divides(lt_exp, exp):
                factor_exp = _exp_sub(exp, lt_exp)
                factor_c = coeff / lt_c
                quotients[i] = quotients[i] + MPoly(nvars, {factor_exp: factor_c})
                for e2, c2 in basis[i].terms.items():
                    e = tuple(a + b for a, b in zip(factor_exp, e2))
                    s = work.get(e, Fraction(0)) - factor_c * c2
                    if s:
                        work[e] = s
                    else:
                        work.pop(e, None)
                break
        else:
            remainder[exp] = remainder.get(exp, Fraction(0)) + coeff
    return quotients, MPoly(nvars, remainder)


def s_polynomial(f, g):
    ef, cf = f.leading_term()
    eg, cg = g.leading_term()
    lcm = _exp_lcm(ef, eg)
    mf = MPoly(f.nvars, {_exp_sub(lcm, ef): 1 / cf})
    mg = MPoly(g.nvars, {_exp_sub(lcm, eg): 1 / cg})
    return mf * f - mg * g


def groebner(gens):
    """Reduced Groebner basis (monic, self-reduced) in grevlex order."""
    basis = [g.monic() for g in gens if not g.is_zero()]
    if not basis:
        raise InputError("no nonzero generators")
    pairs = {(i, j) for i in range(len(basis)) for j in range(i)}
    while pairs:
        i, j = min(pairs)  # deterministic selection
        pairs.discard((i, j))
        ei, _ = basis[i].leading_term()
        ej, _ = basis[j].leading_term()
        lcm = _exp_lcm(ei, ej)
        # first criterion: coprime leading terms
        if lcm == tuple(a + b for a, b in zip(ei, ej)):
            continue
        # chain criterion: some k with LT(k) | lcm and both pairs done
        skip = False
        for k in range(len(basis)):
            if k in (i, j):
                continue
            ek, _ = basis[k].leading_term()
            if _divides(ek, lcm) \
                    and (max(i, k), min(i, k)) not in pairs \
                    and (max(j, k), min(j, k)) not in pairs:
                skip = True
                break
        if skip:
            continue
        r = normal_form(s_polynomial(basis[i], basis[j]), basis)
        if r.is_zero():
            continue
        r = r.monic()
        basis.append(r)
        n = len(basis) - 1
        pairs.update((n, k) for k in range(n))
    # minimalize: drop elements whose leading term is divisible by another's
    lead = [g.leading_term()[0] for g in basis]
    keep = []
    for i, e in enumerate(lead):
        if not any(j != i and _divides(lead[j], e)
                   and (lead[j] != e or j < i) for j in range(len(basis))):
            keep.append(i)
    minimal = [basis[i] for i in keep]
    # reduce each element against the others
    reduced = []
    for i, g in enumerate(minimal):
        others = minimal[:i] + minimal[i + 1:]
        reduced.append(normal_form(g, others).monic() if others else g)
    reduced.sort(key=lambda g: _grevlex_key(g.leading_term()[0]))
    return reduced


class JacobianData:
    """Groebner basis of a Jacobian ideal with its quotient monomial basis."""

    def __init__(self, nvars, groebner_basis, quotient_monomials):
        self.nvars = nvars
        self.groebner_basis = list(groebner_basis)
        self.quotient_monomials = list(quotient_monomials)
        self.milnor = len(self.quotient_monomials)


def quotient_basis(basis):
    """Standard monomials of a zero-dimensional ideal, and the Milnor number.

    Raises :class:`NonIsolatedCriticalLocus` when the staircase is infinite,
    i.e. some variable has no pure power among the leading terms.
    """
    if not basis:
        raise InputError("empty basis")
    nvars = basis[0].nvars
    leads = [g.leading_term()[0] for g in basis]
    # pure-power bound per variable; absence in any variable => infinite
    bounds = []
    for i in range(nvars):
        pure = [e[i] for e in leads if all(e[j] == 0 for j in range(nvars) if j != i)]
        if not pure:
            raise NonIsolatedCriticalLocus(
                "no pure power of variable %d in the leading ideal" % i)
        bounds.append(min(pure))
    standard = []
    for exp in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(lt, exp) for lt in leads):
            standard.append(exp)
    standard.sort(key=_grevlex_key)
    return JacobianData(nvars, basis, standard)


def jacobian_data(w):
    """Groebner basis, quotient basis and Milnor number of the Jacobian ideal."""
    parts = partials(w)
    if all(p.is_zero() for p in parts):
        raise InputError("all partial derivatives vanish: W is constant")
    return quotient_basis(groebner([p for p in parts if not p.is_zero()]))


def membership_with_cofactors(f, gens):
    """Express f = sum_i a_i g_i over the original generators, or fail.

    The reduction runs against a Groebner basis of the ideal; the basis
    elements' own cofactor expressions over ``gens`` are tracked through
    Buchberger so the returned cofactors re-expand exactly to ``f``.
    Raises :class:`NotInIdeal` when the normal form is nonzero.
    """
    gens = [g for g in gens if not g.is_zero()]
    if not gens:
        raise InputError("no nonzero generators")
    nvars = gens[0].nvars
    # run Buchberger, tracking each basis element as a combination of gens
    basis = []
    combos = []
    for i, g in enumerate(gens):
        _, c = g.leading_term()
        basis.append(g.monic())
        row = [MPoly.zero(nvars) for _ in gens]
        row[i] = MPoly.constant(nvars, 1 / c)
        combos.append(row)
    pairs = {(i, j) for i in range(len(basis)) for j in range(i)}
    while pairs:
        i, j = min(pairs)
        pairs.discard((i, j))
        ei, ci = basis[i].leading_term()
        ej, cj = basis[j].leading_term()
        lcm = _exp_lcm(ei, ej)
        if lcm == tuple(a + b for a, b in zip(ei, ej)):
            continue
        mf = MPoly(nvars, {_exp_sub(lcm, ei): 1 / ci})
        mg = MPoly(nvars, {_exp_sub(lcm, ej): 1 / cj})
        s = mf * basis[i] - mg * basis[j]
        qs, r = _divide(s, basis)
        if r.is_zero():
            continue
        row = [mf * a - mg * b for a, b in zip(combos[i], combos[j])]
        for k, q in enumerate(qs):
            if q.is_zero():
                continue
            row = [a - q * b for a, b in zip(row, combos[k])]
        _, lc = r.leading_term()
        basis.append(r.monic())
        combos.append([a * (1 / lc) for a in row])
        n = len(basis) - 1
        pairs.update((n, k) for k in range(n))
    qs, r = _divide(f, basis)
    if not r.is_zero():
        raise NotInIdeal("normal form is nonzero: %r" % r)
    cof = [MPoly.zero(nvars) for _ in gens]
    for k, q in enumerate(qs):
        if q.is_zero():
            continue
        cof = [a + q * b for a, b in zip(cof, combos[k])]
    # re-expansion check is cheap; keep it as a guard
    check = MPoly.zero(nvars)
    for a, g in zip(cof, gens):
        check = check + a * g
    if check != f:
        raise AssertionError("cofactor re-expansion failed")
    return cof
