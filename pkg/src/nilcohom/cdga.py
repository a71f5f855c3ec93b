"""Differentials on free graded-commutative algebras.

A CDGA couples a signature with one differential value per generator,
homogeneous of degree +1 (or zero). Construction eagerly verifies d(d(g)) = 0
for every generator, which suffices by the derivation property; a validated
CDGA is therefore unforgeable and everything downstream may rely on it.
The checker reports the offending generator and the nonzero residue instead
of a bare boolean, because the obstruction solver needs the failure data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Optional

from .algebra import (
    Element,
    Monomial,
    Signature,
    SignatureMismatchError,
    basis_index,
    basis_of_degree,
    mono_mul,
)
from .linalg import SparseExactMatrix


@dataclass(frozen=True)
class DSquaredViolation:
    """First generator whose d(d(g)) is nonzero, with the residue element."""

    generator: str
    residue: Element

    def __str__(self) -> str:
        return f"d^2({self.generator}) = {self.residue!r} != 0"


class DifferentialError(ValueError):
    """Illegal differential: inhomogeneous value or d^2 != 0."""

    def __init__(self, message: str, violation: Optional[DSquaredViolation] = None):
        super().__init__(message)
        self.violation = violation


class TruncationError(ValueError):
    """Requested degree exceeds the truncation window."""


def default_truncation(sig: Signature) -> Optional[int]:
    """Sum of odd generator degrees plus twice the largest even degree.

    Large enough to contain the stabilization window used by the twisted
    model comparisons. None for purely odd signatures (no truncation needed).
    """
    if sig.is_purely_odd:
        return None
    odd_sum = sum(sig.generators[i].degree for i in sig.odd_indices)
    even_max = max(sig.generators[i].degree for i in sig.even_indices)
    return odd_sum + 2 * even_max


class CDGA:
    """Validated commutative differential graded algebra on a free signature."""

    __slots__ = ("signature", "name", "truncation", "_diff", "_matrix_cache", "_rank_cache")

    def __init__(
        self,
        signature: Signature,
        differentials: Mapping[str, Element],
        truncation: Optional[int] = None,
        name: str = "algebra",
    ):
        self.signature = signature
        self.name = name
        diffs = []
        for g in signature.generators:
            if g.name not in differentials:
                raise DifferentialError(f"no differential given for generator {g.name!r}")
            value = differentials[g.name]
            if value.signature != signature:
                raise DifferentialError(
                    f"differential of {g.name!r} lives over a different signature"
                )
            if not value.is_zero() and value.homogeneous_degree() != g.degree + 1:
                raise DifferentialError(
                    f"differential of {g.name!r} is not homogeneous of degree {g.degree + 1}"
                )
            diffs.append(value)
        self._diff = tuple(diffs)
        if truncation is None and not signature.is_purely_odd:
            truncation = default_truncation(signature)
        self.truncation = truncation
        self._matrix_cache: dict = {}
        self._rank_cache: dict = {}
        violation = self._d_squared_violation()
        if violation is not None:
            raise DifferentialError(f"d^2 != 0: {violation}", violation)

    def _d_squared_violation(self) -> Optional[DSquaredViolation]:
        for g in self.signature.generators:
            residue = self.apply_d(self._diff[g.index])
            if not residue.is_zero():
                return DSquaredViolation(g.name, residue)
        return None

    # ---- basic queries ---------------------------------------------------

    def d_of(self, name: str) -> Element:
        return self._diff[self.signature.generator(name).index]

    @property
    def differentials(self) -> dict:
        return {g.name: self._diff[g.index] for g in self.signature.generators}

    def top_degree(self) -> Optional[int]:
        return self.signature.top_degree()

    def __eq__(self, other) -> bool:
        if not isinstance(other, CDGA):
            return NotImplemented
        return (
            self.signature == other.signature
            and self._diff == other._diff
            and self.truncation == other.truncation
        )

    def __hash__(self) -> int:
        return hash((self.signature, self._diff, self.truncation))

    def __repr__(self) -> str:
        return f"CDGA({self.name}, {len(self.signature)} generators)"

    # ---- differential ------------------------------------------------------

    def _d_monomial(self, mono: Monomial) -> dict:
        """Graded Leibniz expansion of d on one monomial, as a term dict.

        For the factor at signature index i, the prefix sign is the parity of
        the number of odd factors before i; even factors never change parity.
        Every image monomial u of an odd generator has even degree, so moving
        u to the front is sign-free, and for even generators the two signs
        cancel, so each contribution is u * (mono / factor).
        """
        sig = self.signature
        acc: dict = {}
        mask = mono.odd_mask
        parity = 0
        mm = mask
        while mm:
            low = mm & -mm
            mm ^= low
            pos = low.bit_length() - 1
            dg = self._diff[sig.odd_indices[pos]]
            if dg.terms:
                sign = -1 if parity & 1 else 1
                rest = Monomial(sig, mask ^ low, mono.even_exps)
                for u, cu in dg.terms.items():
                    r = mono_mul(u, rest)
                    if r is None:
                        continue
                    s, prod = r
                    val = acc.get(prod, 0) + sign * s * cu
                    if val:
                        acc[prod] = val
                    else:
                        acc.pop(prod, None)
            parity += 1
        for q, e in enumerate(mono.even_exps):
            if not e:
                continue
            dg = self._diff[sig.even_indices[q]]
            if not dg.terms:
                continue
            evens = list(mono.even_exps)
            evens[q] = e - 1
            rest = Monomial(sig, mask, tuple(evens))
            for u, cu in dg.terms.items():
                r = mono_mul(u, rest)
                if r is None:
                    continue
                s, prod = r
                val = acc.get(prod, 0) + e * s * cu
                if val:
                    acc[prod] = val
                else:
                    acc.pop(prod, None)
        return acc

    def apply_d(self, elem: Element) -> Element:
        """Extend d to arbitrary elements as a degree +1 derivation."""
        if elem.signature != self.signature:
            raise SignatureMismatchError("element over a different signature")
        acc: dict = {}
        for mono, coeff in elem.terms.items():
            for prod, val in self._d_monomial(mono).items():
                s = acc.get(prod, 0) + coeff * val
                if s:
                    acc[prod] = s
                else:
                    acc.pop(prod, None)
        return Element(self.signature, acc)

    def differential_matrix(self, n: int) -> SparseExactMatrix:
        """Matrix of d from the degree-n basis to the degree-(n+1) basis.

        Column j holds the expansion of d applied to the j-th basis monomial;
        deterministic given the canonical basis order.
        """
        if n < 0:
            raise ValueError("degree must be >= 0")
        if self.truncation is not None and n + 1 > self.truncation:
            raise TruncationError(
                f"degree {n + 1} exceeds truncation {self.truncation}"
            )
        cached = self._matrix_cache.get(n)
        if cached is not None:
            return cached
        source = basis_of_degree(self.signature, n)
        target_index = basis_index(self.signature, n + 1)
        entries = {}
        for col, mono in enumerate(source):
            for prod, val in self._d_monomial(mono).items():
                entries[(target_index[prod], col)] = Fraction(val)
        matrix = SparseExactMatrix(len(target_index), len(source), entries)
        self._matrix_cache[n] = matrix
        return matrix


def check_d_squared(
    signature: Signature,
    differentials: Mapping[str, Element],
    truncation: Optional[int] = None,
    name: str = "algebra",
) -> CDGA:
    """Validate a candidate differential; returns the CDGA or raises.

    On failure the raised DifferentialError carries the violation report
    naming the first failing generator and its nonzero residue.
    """
    return CDGA(signature, differentials, truncation=truncation, name=name)
