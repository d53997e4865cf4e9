"""Finger-tensor reference: F = mu/(1-nu) * Re(E E^T), E = expm(t * G^(1/alpha)).

G is the velocity-gradient matrix G_ij = d v_i / d x_j.  scipy's
fractional_matrix_power (Schur-Pade, principal branch) and expm are used,
so this route shares nothing with the closed-form 2x2 code under test.
"""
import numpy as np
from scipy.linalg import expm, fractional_matrix_power

np.set_printoptions(precision=17)


def finger(g, alpha, mu, nu, t):
    p = fractional_matrix_power(np.array(g, dtype=complex), 1.0 / alpha)
    e = expm(t * p)
    f = mu / (1 - nu) * (e @ e.T)
    return f


cases = [
    ("traceless-rotational", [[0.1, 0.5], [-0.3, -0.1]], 2.0 / 3.0, 0.01, 0.3, 0.1),
    ("real-eigs-mixed-sign", [[0.2, 0.5], [0.1, -0.05]], 0.5, 0.01, 0.3, 0.7),
    ("real-eigs-mixed-sign-zimm", [[0.2, 0.5], [0.1, -0.05]], 2.0 / 3.0, 0.01, 0.6, 1.3),
    ("strain-dominated", [[0.4, 0.3], [0.2, 0.1]], 2.0 / 3.0, 0.02, 0.3, 2.0),
]
for name, g, a, mu, nu, t in cases:
    f = finger(g, a, mu, nu, t)
    print(name, "alpha", a, "t", t)
    print("  F11", repr(f[0, 0].real), "F12", repr(f[0, 1].real), "F21", repr(f[1, 0].real), "F22", repr(f[1, 1].real))
    print("  max |Im F| =", np.abs(f.imag).max())
