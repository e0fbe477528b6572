"""Role lattice, application flags and the ``Roles`` path function."""

from __future__ import annotations

import enum


class Role(enum.Enum):
    NOM = "nom"
    REP = "rep"

    def __str__(self) -> str:
        return self.value


# Position in the lattice; keep every comparison behind sub_role/min_role.
_RANK = {Role.NOM: 0, Role.REP: 1}


class Rel(enum.Enum):
    """Relevance of a binder."""

    REL = "+"
    IRR = "-"

    def __str__(self) -> str:
        return self.value


class Flag(enum.Enum):
    """Application flags. ``CO`` (the coercion slot) only occurs in case
    flag lists and patterns; applications to a coercion are ``CApp``."""

    NOM = "nom"
    REP = "rep"
    REL = "+"
    IRR = "-"
    CO = "o"

    def __str__(self) -> str:
        return self.value

    @property
    def role(self) -> Role | None:
        if self is Flag.NOM:
            return Role.NOM
        if self is Flag.REP:
            return Role.REP
        return None

    @classmethod
    def of_role(cls, r: Role) -> Flag:
        return cls.NOM if r is Role.NOM else cls.REP

    @classmethod
    def of_rel(cls, rho: Rel) -> Flag:
        return cls.REL if rho is Rel.REL else cls.IRR

    @property
    def is_term_flag(self) -> bool:
        return self is not Flag.CO


def parse_role(text: str) -> Role:
    try:
        return Role(text.lower())
    except ValueError:
        raise ValueError(f"unknown role {text!r} (expected 'nom' or 'rep')") from None


def sub_role(r1: Role, r2: Role) -> bool:
    return _RANK[r1] <= _RANK[r2]


def min_role(r1: Role, r2: Role) -> Role:
    return r1 if sub_role(r1, r2) else r2


def role_path(sig, a) -> list[Role] | None:
    """Roles still available for role-flagged arguments of the path ``a``.

    Role-flagged and ``+`` arguments consume one declared role each;
    irrelevant and coercion arguments consume none. Returns ``None`` when
    ``a`` is not headed by a declared constant or when the spine uses a
    role flag that disagrees with the declaration.
    """
    from .syntax import App, CApp, Const

    spine = []
    while True:
        if isinstance(a, App):
            spine.append(a.flag)
            a = a.fun
        elif isinstance(a, CApp):
            spine.append(Flag.CO)
            a = a.fun
        else:
            break
    if not isinstance(a, Const) or a.name not in sig:
        return None
    roles = list(sig[a.name].roles)
    for flag in reversed(spine):
        if flag in (Flag.IRR, Flag.CO):
            continue
        if not roles:
            return None
        if flag.role is not None and flag.role is not roles[0]:
            return None
        roles.pop(0)
    return roles
