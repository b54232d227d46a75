"""Reference values computed independently (mpmath at 50 digits, see
oracles/compute_oracles.py) and frozen here."""

MCKEAN_INTEGRAL_1_1 = 0.95563258209603668135
MCKEAN = {
    (1.0, 1.0): 0.075726752643569165169,
    (0.25, 1.0): 0.076291515222474578766,
    (0.5, 1.0): 0.099563124996703483198,
}
H3 = {
    (1.0, 0.0): 0.038510836890748943222,
    (1.0, 1.0): 0.019875748452065723239,
}
GRUET = {
    (4, 1.0, 1.0): 0.0043482872564762746737,
    (2, 0.25, 3.0): 5.1069918604862503665e-9,
    (5, 1.0, 3.0): 1.6675002908348775681e-6,
    (6, 0.1, 1.0): 0.014060820832085811834,
    (7, 0.05, 0.3): 18.760641366816844409,
    (4, 0.5, 0.0): 0.06122068587923542334,
}
HB3_1_1_1 = 0.20922354798137670115
BESSEL_I = {
    (0.0, 2.0): 2.2795853023360672674,
    (0.5, 1.0): 0.93767488824548764672,
    (1.5, 50.0): 2.8666537159314642411e20,
}
PHI = {
    1.0: -0.27593833903368953359,
    1e-3: -0.33333326666667724868,
    0.05: -0.33316673278109216939,
}
# Bessel(3) density from the origin at (t, r) = (1, 1), and x -> y at (t, x, y) = (1, 1, 1)
PB0_3_1_1 = 0.48394144903828666651
PB_3_1_1_1 = 0.34495131388824462599
SINH2_OVER_2 = 1.8134302039235093838
# half-space geodesic lengths: vertical (1, e) and the golden-section minimum
# over circle arcs for the horizontal pair of the model-point test
VERTICAL_GEODESIC = 1.0
HORIZONTAL_PAIR = 0.962423650119206895
# Euler-Maruyama simulation of the order-5 hyperbolic Bessel SDE, T = 0.5,
# x = 2, histogram density at y = 2 (half-width 0.02, 4e6 paths, dt = 1e-3)
EM_HB5 = (0.199075, 0.001111)
