"""
Identity verification tools.

This module contains the MCP tool that checks the q-combinatorial
identities behind the closed formulas: the subset-sum identity, the
translation lemma and the rank count of matrices over finite fields.
"""

import logging
from typing import List, Optional

from config import settings
from lib.enums import IdentityId
from lib.exceptions import InvalidArgs
from lib.qcomb import (
    OrderedSubset,
    brute_rank_count,
    ordered_subsets,
    rank_count,
    sv_random_trials,
    verify_sv_identity,
    verify_translation_lemma,
)

from .common import _failure, _safe_json, get_mcp

logger = logging.getLogger(__name__)

# Shared FastMCP instance provided by server
mcp = get_mcp()


@mcp.tool()
def verify_identity(
    identity: str,
    j: Optional[int] = None,
    a: Optional[int] = None,
    i: Optional[int] = None,
    subset: Optional[List[int]] = None,
    mode: str = "symbolic",
    trials: int = 20,
    seed: Optional[int] = None,
    p: int = 2,
) -> str:
    """
    Verify a q-combinatorial identity exactly.

    Args:
        identity: sv-1.5, translation or rank-count
        j: Size parameter (all identities)
        a: Shift for the translation lemma
        i: Number of rows for rank-count (i <= j)
        subset: Ordered subset I for the translation lemma (default: every subset)
        mode: symbolic or random (sv-1.5 only)
        trials: Random specializations for mode=random (default: 20)
        seed: Seed for mode=random (default: REPZETA_SEED)
        p: Prime for rank-count (default: 2)

    Returns:
        JSON string with verified true/false and the evidence
    """
    try:
        which = IdentityId(identity)
    except ValueError:
        return _safe_json({"success": False, "error": f"Identidad desconocida {identity!r}"})
    try:
        if j is None:
            raise InvalidArgs(f"{which.value} necesita j")
        payload = {"success": True, "identity": which.value, "j": j}
        if which is IdentityId.SV:
            if mode == "random":
                used_seed = settings.seed if seed is None else seed
                ok, triples = sv_random_trials(j, trials, used_seed)
                payload.update(seed=used_seed, points=[[str(v) for v in t] for t in triples])
            else:
                ok = verify_sv_identity(j, "symbolic", config=settings)
            payload.update(mode=mode, verified=ok)
        elif which is IdentityId.TRANSLATION:
            if a is None:
                raise InvalidArgs("translation necesita a")
            subsets = [OrderedSubset(tuple(subset), j)] if subset is not None else list(ordered_subsets(j))
            failures = [list(s) for s in subsets if not verify_translation_lemma(a, j, s)]
            payload.update(a=a, subsets=len(subsets), failures=failures, verified=not failures)
        else:
            if i is None:
                raise InvalidArgs("rank-count necesita i")
            table = [
                {"r": r, "formula": rank_count(i, j, r, p), "brute": brute_rank_count(i, j, r, p, settings)}
                for r in range(i + 1)
            ]
            ok = all(row["formula"] == row["brute"] for row in table)
            payload.update(i=i, p=p, ranks=table, verified=ok)
        logger.info(f"{which.value}: verified={payload['verified']}")
        return _safe_json(payload)
    except Exception as e:
        logger.error(f"Error verificando {identity}: {e}")
        return _failure(e)
