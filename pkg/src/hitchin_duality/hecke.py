"""Characteristic classes and component shifts of abelianized Hecke translations."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from . import zlattice as zl
from .errors import RootDatumError
from .rootdata import ORBIT_CAP, RootDatum, build_root_datum


@dataclass(frozen=True)
class HeckeClass:
    """A cocharacter ``lam`` at an opaque point label."""

    datum: RootDatum
    lam: tuple
    point: str = "x"

    def __post_init__(self):
        lam = tuple(self.lam)
        if len(lam) != self.datum.ambient_rank:
            raise RootDatumError(f"lambda needs {self.datum.ambient_rank} coordinates")
        if any(isinstance(x, bool) or int(x) != x for x in lam):
            raise RootDatumError("lambda must be an integer cocharacter")
        object.__setattr__(self, "lam", tuple(int(x) for x in lam))


@dataclass(frozen=True)
class CharacteristicClass:
    vector: tuple
    trivial: bool


def characteristic_class(hc: HeckeClass, cap: int = ORBIT_CAP) -> CharacteristicClass:
    """Class of ``sum_{w in W} w(lam)``; trivial iff it vanishes."""
    v = hc.datum.full_weyl_sum(hc.lam, cap)
    return CharacteristicClass(v, not any(v))


def component_shift(rd: RootDatum, lam: Sequence[int]) -> tuple:
    """Image of ``lam`` in ``pi_1 = Lambda / coroot`` (canonical coordinates)."""
    if len(lam) != rd.ambient_rank:
        raise RootDatumError(f"lambda needs {rd.ambient_rank} coordinates")
    return rd_pi1(rd).coordinates(list(lam))


def rd_pi1(rd: RootDatum) -> zl.FgAbGroup:
    if "pi1" not in rd._cache:
        rd._cache["pi1"] = rd.pi1()
    return rd._cache["pi1"]


def shift_transitivity(rd: RootDatum) -> bool:
    """Whether the shifts of a basis of Lambda generate ``pi_1``."""
    G = rd_pi1(rd)
    N = rd.ambient_rank
    imgs = [component_shift(rd, [int(i == j) for j in range(N)]) for i in range(N)]
    t = len(G.invariant_factors)
    # subgroup generated by the images, compared with G via a presentation
    rels = []
    for i, d in enumerate(G.invariant_factors):
        rels.append([d if k == i else 0 for k in range(len(imgs[0]) if imgs else t + G.rank)])
    width = t + G.rank
    if width == 0:
        return True
    cols = rels + [list(v) for v in imgs]
    quot = zl.cokernel(zl.IntMatrix.from_rows(cols, width).T)
    return quot.is_trivial


def fundamental_coweights(letter: str, rank: int):
    """Adjoint datum (Lambda = coweight lattice) and its basis ``omega_i^vee = e_i``."""
    rd = build_root_datum(letter, rank, "ad")
    return rd, [tuple(int(i == j) for j in range(rank)) for i in range(rank)]
