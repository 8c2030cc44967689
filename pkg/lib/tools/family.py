"""
Closed-form tools for the family G_mxn.

This module contains MCP tools for:
- Local zeta functions in additive, multiplicative, product and series form
- Euler products and Dirichlet coefficients of the global zeta function
- Topological zeta functions
- k-fold central products and their abscissae
"""

import logging
from fractions import Fraction
from typing import Optional

from config import settings
from lib.enums import LocalForm
from lib.exactalg import series_of_ratfn
from lib.exceptions import InvalidArgs
from lib.gzeta import (
    abscissa_from_factorization,
    central_product,
    functional_equation_holds,
    global_abscissa_from_factorization,
    global_dirichlet_coeffs,
    global_euler,
    local_additive,
    local_multiplicative,
    local_product_form,
    topo_of_factorization,
    topological,
)

from .common import _failure, _safe_json, get_mcp

logger = logging.getLogger(__name__)

# Shared FastMCP instance provided by server
mcp = get_mcp()


@mcp.tool()
def local_zeta(
    m: int,
    n: int,
    q: Optional[int] = None,
    form: str = "multiplicative",
    order: int = 6,
) -> str:
    """
    Local representation zeta function of G_mxn.

    Args:
        m: First parameter of the family
        n: Second parameter of the family
        q: Residue cardinality (default: symbolic q)
        form: additive, multiplicative, product or series
        order: Truncation order for the series form (default: 6)

    Returns:
        JSON string with the canonical text of the result
    """
    try:
        shape = LocalForm(form)
    except ValueError:
        return _safe_json({"success": False, "error": f"Forma desconocida {form!r}"})
    try:
        payload = {"success": True, "m": m, "n": n, "q": q, "form": shape.value}
        if shape is LocalForm.PRODUCT:
            if q is not None:
                raise InvalidArgs("La forma product es simbólica; no pases q")
            F = local_product_form(m, n)
            payload.update(value=str(F), expanded=str(F.to_ratfn()), factorization=F.as_dict())
        elif shape is LocalForm.SERIES:
            series = series_of_ratfn(local_multiplicative(m, n), order, q)
            payload.update(value=str(series), order=order)
        else:
            builder = local_additive if shape is LocalForm.ADDITIVE else local_multiplicative
            payload["value"] = str(builder(m, n, q))
        if q is None:
            payload["functional_equation"] = functional_equation_holds(m, n)
        return _safe_json(payload)
    except Exception as e:
        logger.error(f"Error en local_zeta({m}, {n}, {q}, {form}): {e}")
        return _failure(e)


@mcp.tool()
def global_zeta(
    m: int,
    n: int,
    eval_s: Optional[str] = None,
    places: int = 1000,
    coeffs: Optional[int] = None,
) -> str:
    """
    Global representation zeta function of G_mxn over Q.

    Args:
        m: First parameter of the family
        n: Second parameter of the family
        eval_s: Rational s (e.g. "3" or "7/2") where the Euler product is evaluated
        places: Primes below this bound enter the Euler product (default: 1000)
        coeffs: Number of Dirichlet coefficients to return instead of evaluating

    Returns:
        JSON string with the partial Euler product or the coefficients
    """
    if (eval_s is None) == (coeffs is None):
        return _safe_json({"success": False, "error": "Pasá exactamente uno de eval_s o coeffs"})
    try:
        if coeffs is not None:
            values = global_dirichlet_coeffs(m, n, coeffs)
            return _safe_json({"success": True, "m": m, "n": n, "coefficients": values})
        result = global_euler(m, n, Fraction(eval_s), limit=places, config=settings)
        return _safe_json({"success": True, **result.as_dict()})
    except ValueError as e:
        return _safe_json({"success": False, "error": f"eval_s inválido: {e}"})
    except Exception as e:
        logger.error(f"Error en global_zeta({m}, {n}): {e}")
        return _failure(e)


@mcp.tool()
def topological_zeta(m: int, n: int) -> str:
    """
    Topological zeta function of G_mxn.

    Args:
        m: First parameter of the family
        n: Second parameter of the family

    Returns:
        JSON string with the rational function in s
    """
    try:
        value = topological(m, n)
        derived = topo_of_factorization(local_product_form(m, n))
        return _safe_json({
            "success": True,
            "value": str(value),
            "matches_product_form": derived == value,
        })
    except Exception as e:
        logger.error(f"Error en topological_zeta({m}, {n}): {e}")
        return _failure(e)


@mcp.tool()
def central_product_zeta(m: int, n: int, k: int) -> str:
    """
    Zeta function of the k-fold central product of G_mxn.

    Args:
        m: First parameter of the family
        n: Second parameter of the family
        k: Number of central factors

    Returns:
        JSON string with the factorization and the local and global abscissae
    """
    try:
        F = central_product(local_product_form(m, n), k)
        return _safe_json({
            "success": True,
            "value": str(F),
            "factorization": F.as_dict(),
            "local_abscissa": str(abscissa_from_factorization(F)),
            "global_abscissa": str(global_abscissa_from_factorization(F)),
        })
    except Exception as e:
        logger.error(f"Error en central_product_zeta({m}, {n}, {k}): {e}")
        return _failure(e)
