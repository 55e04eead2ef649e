"""Combinatorial cameral covers and the local systems they induce.

A cover of a genus ``g`` curve branched at ``b`` points is recorded by
handle monodromies ``w_1..w_2g`` and branch roots ``alpha_1..alpha_b``,
subject to ``prod_j [w_j, w_{g+j}] * prod_i s_{alpha_i} = 1`` where
``[a, b] = a b a^-1 b^-1`` and products compose left to right.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Optional

from . import zlattice as zl
from .errors import CoverError, InfeasibleCover, RootDatumError, ValidationError
from .rootdata import (
    RootDatum, Root, WeylElement, build_root_datum, commutator, langlands_dual,
)
from .zlattice import IntMatrix


@dataclass(frozen=True)
class CoverDatum:
    datum: RootDatum
    genus: int
    handles: tuple  # 2g WeylElements
    branches: tuple  # b Roots

    def __post_init__(self):
        if self.genus < 1:
            raise CoverError("genus must be at least 1")
        if len(self.handles) != 2 * self.genus:
            raise CoverError(f"expected {2 * self.genus} handle monodromies, got {len(self.handles)}")
        N = self.datum.ambient_rank
        for h in self.handles:
            if h.matrix.shape != (N, N):
                raise CoverError("handle matrix has the wrong size")

    @property
    def b(self) -> int:
        return len(self.branches)

    def branch_reflections(self) -> list:
        return [self.datum.reflection(r) for r in self.branches]

    def relation_product(self) -> WeylElement:
        g = self.genus
        P = WeylElement.identity(self.datum.ambient_rank)
        for j in range(g):
            P = P * commutator(self.handles[j], self.handles[g + j])
        for s in self.branch_reflections():
            P = P * s
        return P

    def handles_trivial(self) -> bool:
        return all(h.is_identity() for h in self.handles)

    def conjugate(self, w: WeylElement) -> "CoverDatum":
        """Cover with all monodromies replaced by ``w x w^-1``."""
        wi = w.inverse()
        hs = tuple(w * h * wi for h in self.handles)
        brs = tuple(self.datum.root(wi_apply(w, r)) for r in self.branches)
        return CoverDatum(self.datum, self.genus, hs, brs)


def wi_apply(w: WeylElement, r: Root) -> tuple:
    """Functional of the root ``w(alpha)``."""
    return w.apply_functional(r.functional)


# --------------------------------------------------------------------------
# validation


@dataclass(frozen=True)
class CheckItem:
    name: str
    ok: bool
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    items: tuple
    notes: tuple = ()

    @property
    def valid(self) -> bool:
        return all(i.ok for i in self.items if i.name != "genericity")

    @property
    def generic(self) -> bool:
        return all(i.ok for i in self.items if i.name == "genericity")

    @property
    def ok(self) -> bool:
        return all(i.ok for i in self.items)

    def failures(self) -> list:
        return [i for i in self.items if not i.ok]

    def to_json(self) -> dict:
        return {
            "checks": [{"name": i.name, "pass": i.ok, "detail": i.detail} for i in self.items],
            "notes": list(self.notes),
            "valid": self.valid,
            "generic": self.generic,
        }


def validate_cover(cd: CoverDatum) -> ValidationReport:
    rd = cd.datum
    items = []
    notes = []
    P = cd.relation_product()
    items.append(CheckItem(
        "relation", P.is_identity(),
        "" if P.is_identity() else f"product of monodromies is {P.matrix.to_rows()}",
    ))
    # handles must lie in W: a reduced word must reproduce them
    bad = []
    for j, h in enumerate(cd.handles):
        try:
            rd.reduced_word(h)
        except Exception:
            bad.append(j + 1)
    items.append(CheckItem("handles_in_weyl", not bad,
                           "" if not bad else f"handles {bad} are not Weyl group elements"))
    if bad:
        items.append(CheckItem("surjectivity", False, "skipped: handles outside W"))
    else:
        gens = list(cd.handles) + cd.branch_reflections()
        surj = rd.generated_group_is_weyl(gens) if gens else rd.weyl_order() == 1
        items.append(CheckItem("surjectivity", surj,
                               "" if surj else "monodromy generates a proper subgroup of W"))
    present = {r.length_class for r in cd.branches}
    missing = sorted(rd.length_classes() - present)
    items.append(CheckItem(
        "genericity", not missing,
        "" if not missing else "unrepresented root classes: "
        + ", ".join(f"component {c} {l}" for c, l in missing),
    ))
    if cd.genus == 1 and cd.b > 0:
        notes.append("genus 1 with branch points: an L-valued cover with deg L > 0")
    counts = {}
    for r in cd.branches:
        counts[r.length_class] = counts.get(r.length_class, 0) + 1
    notes.append("branch counts per root class: " + ", ".join(
        f"{c}{l[0]}={n}" for (c, l), n in sorted(counts.items())))
    return ValidationReport(tuple(items), tuple(notes))


def require_valid(cd: CoverDatum, *, generic: bool = True) -> ValidationReport:
    rep = validate_cover(cd)
    if not rep.valid or (generic and not rep.generic):
        msg = "; ".join(f"{i.name}: {i.detail}" for i in rep.failures())
        raise ValidationError(f"invalid cover: {msg}", rep)
    return rep


# --------------------------------------------------------------------------
# local systems


@dataclass(frozen=True)
class LocalSystem:
    """Fiber ``Z^n`` with monodromies for ``delta_1..delta_2g, gamma_1..gamma_b``.

    ``branch_roots`` are the functionals ``alpha_i`` with
    ``rho_i = 1 - alpha_i^vee alpha_i``; ``branch_coroots`` the ``alpha_i^vee``.
    On the dual system the two swap.
    """

    fiber_rank: int
    genus: int
    matrices: tuple  # IntMatrix, 2g + b of them
    branch_roots: tuple
    branch_coroots: tuple
    epsilons: tuple      # eps_i of the side this system lives on
    epsilons_dual: tuple
    dual: bool = False

    @property
    def b(self) -> int:
        return len(self.branch_roots)

    @property
    def handle_matrices(self) -> tuple:
        return self.matrices[:2 * self.genus]

    @property
    def branch_matrices(self) -> tuple:
        return self.matrices[2 * self.genus:]

    def dualize(self) -> "LocalSystem":
        mats = tuple(zl.unimodular_inverse(M).T for M in self.matrices)
        return LocalSystem(self.fiber_rank, self.genus, mats, self.branch_coroots,
                           self.branch_roots, self.epsilons_dual, self.epsilons, not self.dual)

    def handles_trivial(self) -> bool:
        I = IntMatrix.identity(self.fiber_rank)
        return all(M == I for M in self.handle_matrices)


def local_system(cd: CoverDatum, *, check: bool = True) -> LocalSystem:
    if check:
        require_valid(cd, generic=False)
    rd = cd.datum
    mats = tuple(h.matrix for h in cd.handles) + tuple(s.matrix for s in cd.branch_reflections())
    return LocalSystem(
        rd.ambient_rank, cd.genus, mats,
        tuple(r.functional for r in cd.branches),
        tuple(r.coroot for r in cd.branches),
        tuple(rd.epsilon(r) for r in cd.branches),
        tuple(rd.epsilon_dual(r) for r in cd.branches),
    )


def dual_local_system(cd: CoverDatum, *, check: bool = True) -> LocalSystem:
    return local_system(cd, check=check).dualize()


def dual_cover(cd: CoverDatum) -> CoverDatum:
    """Same combinatorics on the Langlands dual datum: handles act contragrediently,
    branch roots are replaced by their coroots."""
    d = langlands_dual(cd.datum)
    hs = tuple(h.contragredient() for h in cd.handles)
    brs = tuple(d.root(r.coroot) for r in cd.branches)
    return CoverDatum(d, cd.genus, hs, brs)


# --------------------------------------------------------------------------
# JSON format


def _parse_word(rd: RootDatum, word) -> WeylElement:
    if not isinstance(word, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in word):
        raise CoverError(f"Weyl word must be a list of integers, got {word!r}")
    return rd.weyl_word(word)


def _parse_branch(rd: RootDatum, spec) -> Root:
    if not isinstance(spec, dict):
        raise CoverError(f"branch must be an object, got {spec!r}")
    if "root" in spec:
        return rd.root_from_coefficients(_int_list(spec["root"]))
    if "conjugate" in spec:
        c = spec["conjugate"]
        base = rd.root_from_coefficients(_int_list(c["base"]))
        w = _parse_word(rd, c.get("word", []))
        return rd.root(w.apply_functional(base.functional))
    raise CoverError("branch needs a 'root' or 'conjugate' field")


def _int_list(x):
    if not isinstance(x, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in x):
        raise CoverError(f"expected a list of integers, got {x!r}")
    return x


def group_from_json(g) -> RootDatum:
    if not isinstance(g, dict) or "type" not in g:
        raise CoverError("group must be an object with a 'type' field")
    t = str(g["type"]).strip()
    letter = t[0]
    rank = g.get("rank")
    if rank is None:
        if len(t) < 2:
            raise CoverError("group rank missing")
        rank = int(t[1:])
    iso = g.get("isogeny", "sc")
    if isinstance(iso, dict):  # {"coweights": [[...], ...]}
        iso = iso.get("coweights", [])
    elif isinstance(iso, str) and iso.lower().startswith("w="):
        iso = [[int(x) for x in part.split(",")] for part in iso[2:].split(";") if part.strip()]
    return build_root_datum(letter, int(rank), iso)


def cover_from_json(obj) -> CoverDatum:
    """Parse the cover file format; structural problems raise CoverError."""
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as e:
            raise CoverError(f"invalid JSON: {e}") from None
    if not isinstance(obj, dict):
        raise CoverError("cover must be a JSON object")
    for key in ("group", "genus", "handles", "branches"):
        if key not in obj:
            raise CoverError(f"missing field {key!r}")
    try:
        rd = group_from_json(obj["group"])
        genus = obj["genus"]
        if not isinstance(genus, int) or isinstance(genus, bool):
            raise CoverError("genus must be an integer")
        if not isinstance(obj["handles"], list) or not isinstance(obj["branches"], list):
            raise CoverError("handles and branches must be lists")
        hs = tuple(_parse_word(rd, w) for w in obj["handles"])
        brs = tuple(_parse_branch(rd, b) for b in obj["branches"])
    except RootDatumError as e:
        raise CoverError(str(e)) from None
    return CoverDatum(rd, genus, hs, brs)


def load_cover(path) -> CoverDatum:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return cover_from_json(text)


def cover_to_json(cd: CoverDatum) -> dict:
    rd = cd.datum
    if not rd.is_standard():
        raise CoverError("only data in standard numbering can be written as cover files")
    letter, rank, _ = rd.components[0]
    iso = rd.isogeny
    return {
        "group": {"type": letter, "rank": rank, "isogeny": iso},
        "genus": cd.genus,
        "handles": [rd.reduced_word(h) for h in cd.handles],
        "branches": [{"root": list(r.coefficients)} for r in cd.branches],
    }


# --------------------------------------------------------------------------
# random covers


def _simple_root_order(rd: RootDatum) -> list:
    """Simple roots short first, then by index."""
    k = rd.semisimple_rank
    roots = [rd.root(rd.simple_root(i)) for i in range(k)]
    return sorted(range(k), key=lambda i: (roots[i].is_long, i))


def canonical_cover(rd: RootDatum, genus: int, b: int) -> Optional[CoverDatum]:
    """Identity handles and ``b/2`` adjacent pairs of simple roots cycling
    through the simple roots short first. None when that is not valid."""
    if b % 2:
        return None
    order = _simple_root_order(rd)
    if not order:
        return None
    pairs = [order[i % len(order)] for i in range(b // 2)]
    brs = []
    for i in pairs:
        r = rd.root(rd.simple_root(i))
        brs += [r, r]
    hs = tuple(WeylElement.identity(rd.ambient_rank) for _ in range(2 * genus))
    cd = CoverDatum(rd, genus, hs, tuple(brs))
    rep = validate_cover(cd)
    return cd if rep.ok else None


def _random_weyl(rd: RootDatum, rng: random.Random, length: int) -> WeylElement:
    word = [rng.randrange(1, rd.semisimple_rank + 1) for _ in range(length)]
    return rd.weyl_word(word)


def random_cover(rd: RootDatum, genus: int, b: int, seed: int, *,
                 handle_mode: str = "mixed", max_attempts: int = 400) -> CoverDatum:
    """Deterministic valid, generic cover.

    Seed 0 returns :func:`canonical_cover` when that is valid. Otherwise the
    generator, seeded by ``(datum, genus, b, seed)``, repeatedly:

    1. draws handles: identity, a commuting pair ``(w, w^e)`` or a free pair;
    2. writes the inverse of the commutator product as a reduced word in
       simple reflections, which become the first branch roots;
    3. pads with adjacent equal pairs ``(beta, beta)`` of random roots;
    4. applies random Hurwitz moves and a global conjugation;

    and returns the first candidate passing :func:`validate_cover`.
    """
    if genus < 1:
        raise InfeasibleCover("genus must be at least 1")
    if b < 0:
        raise InfeasibleCover("number of branch points must be nonnegative")
    if b % 2:
        raise InfeasibleCover(
            "an odd number of reflections has determinant -1 and cannot cancel the commutators")
    if handle_mode not in ("mixed", "identity"):
        raise ValueError(f"unknown handle_mode {handle_mode!r}")
    if seed == 0:
        cd = canonical_cover(rd, genus, b)
        if cd is not None:
            return cd
    rng = random.Random(f"cover|{rd.name}|{rd.roots.entries}|{genus}|{b}|{seed}|{handle_mode}")
    N = rd.ambient_rank
    k = rd.semisimple_rank
    I = WeylElement.identity(N)
    all_roots = rd.all_roots()
    for _ in range(max_attempts):
        hs = [I] * (2 * genus)
        if handle_mode == "mixed":
            for j in range(genus):
                mode = rng.choice(("identity", "commuting", "free"))
                if mode == "identity":
                    continue
                a = _random_weyl(rd, rng, rng.randrange(1, 2 * k + 2))
                if mode == "commuting":
                    e = rng.choice((0, 1, 2, -1))
                    bb = I
                    for _ in range(abs(e)):
                        bb = bb * (a if e > 0 else a.inverse())
                    if rng.random() < 0.5:
                        a, bb = bb, a
                else:
                    bb = _random_weyl(rd, rng, rng.randrange(1, 2 * k + 2))
                hs[j], hs[genus + j] = a, bb
        c = I
        for j in range(genus):
            c = c * commutator(hs[j], hs[genus + j])
        word = rd.reduced_word(c.inverse())
        if len(word) > b:
            continue
        brs = [rd.root(rd.simple_root(i - 1)) for i in word]
        while len(brs) < b:
            beta = rng.choice(all_roots)
            pos = rng.randrange(len(brs) + 1)
            brs[pos:pos] = [beta, beta]
        for _ in range(rng.randrange(0, 3 * b + 1) if b >= 2 else 0):
            i = rng.randrange(b - 1)
            x, y = brs[i], brs[i + 1]
            if rng.random() < 0.5:
                # s_x s_y = s_y s_{s_y(x)}
                sy = rd.reflection(y)
                brs[i], brs[i + 1] = y, rd.root(sy.apply_functional(x.functional))
            else:
                # s_x s_y = s_{s_x(y)} s_x
                sx = rd.reflection(x)
                brs[i], brs[i + 1] = rd.root(sx.apply_functional(y.functional)), x
        cd = CoverDatum(rd, genus, tuple(hs), tuple(brs))
        if rng.random() < 0.5:
            cd = cd.conjugate(_random_weyl(rd, rng, rng.randrange(1, 2 * k + 2)))
        if validate_cover(cd).ok:
            return cd
    raise InfeasibleCover(
        f"no valid generic cover of {rd.name} with g={genus}, b={b} after {max_attempts} attempts")
