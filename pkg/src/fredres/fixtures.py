"""Small reference problems with known inverses.

F1  scalar ``A(z) = w``                         pole order 1
F2  ``diag(w, 1)``                              pole order 1
F3  ``w I + N`` with ``N = [[0, 1], [0, 0]]``   pole order 2, non-nested ranges
F4  AR ``1 - z``                                unit root, d = 1
F5  AR ``1 - 0.5 z - 0.5 z**2``                 roots {1, -2}, d = 1
F6  AR ``I - Phi z``, ``Phi = [[1, 0], [1, 1]]`` ``det = (1 - z)**2``, d = 2

``w = z - z0``.  Series fixtures are exact matrix polynomials.
"""
import numpy as np

from .series import TaylorSeries

NILPOTENT = np.array([[0, 1], [0, 0]], dtype=complex)
PHI_F6 = np.array([[1, 0], [1, 1]], dtype=complex)


def f1(center=0.0):
    return TaylorSeries(np.array([[[0]], [[1]]], dtype=complex), center=center, exact=True)


def f2(center=0.0):
    return TaylorSeries(np.array([np.diag([0, 1]), np.diag([1, 0])], dtype=complex),
                        center=center, exact=True)


def f3(center=0.0):
    return TaylorSeries(np.array([NILPOTENT, np.eye(2)]), center=center, exact=True)


def identity(n=2, center=0.0):
    return TaylorSeries(np.eye(n, dtype=complex)[None], center=center, exact=True)


def ar_f4():
    from .ar import ARModel

    return ARModel(np.array([[[1.0]], [[-1.0]]]))


def ar_f5():
    from .ar import ARModel

    return ARModel(np.array([[[1.0]], [[-0.5]], [[-0.5]]]))


def ar_f6():
    from .ar import ARModel

    return ARModel(np.array([np.eye(2), -PHI_F6]))


SERIES = {"F1": f1, "F2": f2, "F3": f3, "I": identity}
AR_MODELS = {"F4": ar_f4, "F5": ar_f5, "F6": ar_f6}
