"""Reference values for the frozen constants in the C++ tests.

Every quantity here is computed by a different route than the library uses:
SLD via a Sylvester solve instead of the eigen-sum, averaged maps via powers
of the lazy map (1 + M)/2 instead of null-space projections, and square roots
via scipy.linalg.sqrtm.  Run with `python3 tests/oracle/derive.py`.
"""
import numpy as np
from scipy import linalg

np.set_printoptions(precision=17)


def unit(d, i, j):
    m = np.zeros((d, d), complex)
    m[i, j] = 1
    return m


def dual(kraus, a):
    return sum(k.conj().T @ a @ k for k in kraus)


def apply(kraus, t):
    return sum(k @ t @ k.conj().T for k in kraus)


def opnorm(a):
    return np.linalg.norm(a, 2)


def sesq(kraus, a, b):
    return dual(kraus, a.conj().T @ b) - dual(kraus, a.conj().T) @ dual(kraus, b)


def show(name, value):
    if np.ndim(value) == 0:
        print(f"{name} = {float(np.real(value))!r}")
    else:
        print(f"{name} =")
        print(np.real_if_close(np.round(value, 15)))


# Qutrit channel, basis order |1>, |0>, |-1>.
r = 1 / np.sqrt(2)
qutrit = [unit(3, 0, 0), unit(3, 2, 2), r * unit(3, 0, 1), r * unit(3, 2, 1)]
N = np.diag([1.0, 0.0, -1.0]).astype(complex)
b = unit(3, 0, 1)
lhs = opnorm(dual(qutrit, N) @ dual(qutrit, b) - dual(qutrit, b) @ dual(qutrit, N) - dual(qutrit, N @ b - b @ N))
rhs = (np.sqrt(opnorm(sesq(qutrit, N, N))) * np.sqrt(opnorm(sesq(qutrit, b.conj().T, b.conj().T)))
       + np.sqrt(opnorm(sesq(qutrit, N.conj().T, N.conj().T))) * np.sqrt(opnorm(sesq(qutrit, b, b))))
show("qutrit_commutator_lhs", lhs)
show("qutrit_commutator_rhs", rhs)

# Squared-trace fidelity between two mixed qubit states.
rho = np.array([[0.7, 0.2 + 0.1j], [0.2 - 0.1j, 0.3]])
sigma = np.array([[0.4, -0.1], [-0.1, 0.6]], complex)
s = linalg.sqrtm(rho)
show("fidelity_mixed", np.trace(linalg.sqrtm(s @ sigma @ s)).real ** 2)

# QFI = tr[rho L^2], with L the SLD solving rho L + L rho = 2 i [rho, N].
def qfi(rho, n):
    c = 2j * (rho @ n - n @ rho)
    L = linalg.solve_sylvester(rho, rho, c)
    return np.trace(rho @ L @ L).real

show("qfi_qubit_diag_sx", qfi(np.diag([0.75, 0.25]).astype(complex), np.array([[0, 1], [1, 0]], complex)))
rho3 = np.array([[0.5, 0.1, 0.05j], [0.1, 0.3, 0.02], [-0.05j, 0.02, 0.2]])
n3 = np.array([[1, 0.5, 0], [0.5, 0, 0.25j], [0, -0.25j, -1]])
show("qfi_qutrit", qfi(rho3, n3))
show("variance_qutrit", (np.trace(n3 @ n3 @ rho3) - np.trace(n3 @ rho3) ** 2).real)

# Averaged dual of a qutrit channel mixing a 0<->1 swap with decay of level 2 into 0.
swap = np.array([[0, 1, 0], [1, 0, 0], [0, 0, 1]], complex)
g = 0.4
damp = [np.diag([1, 1, np.sqrt(1 - g)]).astype(complex), np.sqrt(g) * unit(3, 0, 2)]
mixed = [np.sqrt(0.5) * swap] + [np.sqrt(0.5) * k for k in damp]


def supermatrix(kraus):
    d = kraus[0].shape[0]
    cols = []
    for j in range(d):
        for i in range(d):
            cols.append(dual(kraus, unit(d, i, j)).reshape(-1, order="F"))
    return np.array(cols).T


M = supermatrix(mixed)
lazy = (np.eye(9) + M) / 2
avg = np.linalg.matrix_power(lazy, 1 << 12)
probe = np.array([[0.2, 0.7 + 1j, 0.3], [0.7 - 1j, -0.5, 0.1], [0.3, 0.1, 2.0]])
show("mixed_average_dual_probe", (avg @ probe.reshape(-1, order="F")).reshape(3, 3, order="F"))
show("mixed_fixed_dimension", np.linalg.matrix_rank(avg, tol=1e-8))
state = np.diag([0, 0, 1]).astype(complex)
avg_s = np.linalg.matrix_power((np.eye(9) + supermatrix([k.conj().T for k in mixed])) / 2, 1 << 12)
show("mixed_average_state", (avg_s @ state.reshape(-1, order="F")).reshape(3, 3, order="F"))

# Repeatability mismatch probability for the Lueders instrument of B_lambda, lambda = 1/2.
lam = 0.5
plus = np.array([1, 1]) / np.sqrt(2)
minus = np.array([1, -1]) / np.sqrt(2)
B = [lam * np.outer(v, v).astype(complex) + (1 - lam) / 2 * np.eye(2) for v in (plus, minus)]
roots = [linalg.sqrtm(e) for e in B]
show("blambda_repeat_mismatch", opnorm(sum(rt @ (np.eye(2) - e) @ rt for rt, e in zip(roots, B))))

# Disturbance of a tilted sharp observable by Lueders-B_lambda, lambda = 0.3.
lam = 0.3
B = [lam * np.outer(v, v).astype(complex) + (1 - lam) / 2 * np.eye(2) for v in (plus, minus)]
roots = [linalg.sqrtm(e) for e in B]
th = 0.4
u = np.array([np.cos(th), np.sin(th)])
F = [np.outer(u, u).astype(complex), np.eye(2) - np.outer(u, u)]
lueders = [rt for rt in roots]
show("tilted_disturbance", max(opnorm(dual(lueders, f) - f) for f in F))

# Sesquilinear defect of amplitude damping on sigma_x.
g = 0.36
ad = [np.diag([1, np.sqrt(1 - g)]).astype(complex), np.sqrt(g) * unit(2, 0, 1)]
sx = np.array([[0, 1], [1, 0]], complex)
show("damping_sesq_sx", opnorm(sesq(ad, sx, sx)))
