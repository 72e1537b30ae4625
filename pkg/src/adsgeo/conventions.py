"""Sign conventions and default tolerances shared by every module.

Riemann: ``R^a_{bcd} = d_c G^a_{db} - d_d G^a_{cb} + G^a_{ce} G^e_{db} - G^a_{de} G^e_{cb}``,
``Ric_{bd} = R^a_{bad}``, so the unit round sphere has positive scalar
curvature.  Lorentzian metrics use signature (-, +, ..., +).  With
``Lambda = -n(n-1)/2`` a vacuum solution in n+1 dimensions has
``Ric = -n g``.  Forms are stored as fully antisymmetric tensors,
``alpha = (1/k!) alpha_{i1..ik} dx^i1 ^ ... ^ dx^ik``; the Hodge star uses
``sqrt|det g|`` with orientation given by coordinate order.
"""

CONVENTIONS = {
    "riemann": "R^a_bcd = d_c Gamma^a_db - d_d Gamma^a_cb + Gamma^a_ce Gamma^e_db - Gamma^a_de Gamma^e_cb",
    "ricci": "Ric_bd = R^a_bad",
    "sphere_scalar_curvature": "positive",
    "lorentzian_signature": "(-,+,...,+)",
    "vacuum_ricci": "Ric = -n g for Lambda = -n(n-1)/2",
    "forms": "antisymmetric tensor components, alpha = (1/k!) alpha_I dx^I",
    "hodge_orientation": "coordinate order, volume form sqrt|det g| dx^0 ^ ... ^ dx^(D-1)",
}

TOL_CURV = 1e-8
TOL_CURV3 = 1e-6
V_FLOOR = 1e-10
ODE_RTOL = 1e-10
ODE_ATOL = 1e-10
EVENT_XTOL = 1e-12


def cosmological_constant(n: int) -> float:
    """Lambda for an (n+1)-dimensional space-time."""
    return -0.5 * n * (n - 1)
