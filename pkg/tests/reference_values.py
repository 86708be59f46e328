"""Frozen reference values for the test suite.

DERIVED_* values were computed once at 40 digits with mpmath, without the
package: solve sin(n mu)/sin(mu) = n (type 1) or = -n (type 2) for complex
mu, map to rho with the sin/sin (type 1) or cos/cos (type 2) ratio, and
check with a 40-digit determinant that lambda = -n is a double root.

PRINTED_* values are quoted at their printed precision, with the
tolerances used by the acceptance suite.
"""

DERIVED_CUSP_5_TYPE1 = 2.0j
DERIVED_CUSP_7_TYPE1 = 0.77570198038492530898 - 1.4922176658829284376j
DERIVED_CUSPS_6_TYPE2 = (
    1.3095648281286795995 + 1.1220388925142645757j,
    1.3095648281286795995 - 1.1220388925142645757j,
    -0.50956482812867959951 + 1.7423102699642424898j,
    -0.50956482812867959951 - 1.7423102699642424898j,
)
DERIVED_CUSP_95_TYPE2 = 1.067988914426904789920446j

PRINTED_CUSP_5_TYPE1 = (2.0j, -2.0j)
PRINTED_CUSP_7_TYPE1 = 0.77570 - 1.49222j
PRINTED_CUSPS_6_TYPE2_A = (1.31 + 1.12j, 1.31 - 1.12j)
PRINTED_CUSPS_6_TYPE2_B = (0.51 + 1.74j, 0.51 - 1.74j)
PRINTED_CUSP_95_TYPE2 = 1.06795j

# rho = 15 + 12i, n = 6: the ordinary eigenvalue furthest from -1.
PRINTED_FAR_ORDINARY = -1.07 + 0.05j


def axis_values(n):
    """Real values of the two curves at u = 0 and u = pi: ((f1(0), f1(pi)), (f2(0), f2(pi)))."""
    x = (n + 1) / (n - 1)
    if n % 2 == 0:
        return (x, -1.0), (1.0, -x)
    return (x, -x), (1.0, -1.0)


def table_row(n, rho):
    """Extraordinary counts (type 1, type 2) for real rho, row by row."""
    x = (n + 1) / (n - 1)
    if rho < -x:
        return (1, 1)
    if rho < -1:
        return (1, 0) if n % 2 == 0 else (0, 1)
    if rho <= 1:
        return (0, 0)
    if rho <= x:
        return (0, 1)
    return (1, 1)
