"""Dependently typed core calculus with role-indexed equality."""

from .concrete import parse_signature, parse_term, show
from .equality import EqEnv, def_eq, def_eq_derivation, prop_eq
from .errors import DRError
from .reduce import par_step, reduce, step, whnf
from .rolecheck import role_check, role_checks
from .roles import Flag, Rel, Role, role_path
from .syntax import Signature, Term
from .typecheck import check, check_sig, infer

__all__ = [
    "DRError", "EqEnv", "Flag", "Rel", "Role", "Signature", "Term", "check", "check_sig", "def_eq",
    "def_eq_derivation", "infer", "par_step", "parse_signature", "parse_term", "prop_eq", "reduce",
    "role_check", "role_checks", "role_path", "show", "step", "whnf",
]
