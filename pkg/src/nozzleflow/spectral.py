"""Cross-stream eigenbases and the 2D spectral field container.

The main family is the eigenbasis of -d^2/dx2^2 on (-1, 1) with zero-slope
walls: the constant 1/sqrt(2), cosines cos(k pi x2) and sines
sin((2k+1) pi x2 / 2), ordered by increasing eigenvalue so that mode j has
eigenvalue (j pi / 2)^2.  A wall-vanishing sine family is provided for the
sub-problems that need zero wall values instead of zero wall slope.

All cross-stream integrals use one composite Gauss-Legendre rule, sized so
that products of retained modes integrate to machine precision.
"""

from __future__ import annotations

import numpy as np

from .errors import DomainError


def composite_gauss_legendre(panels: int, points: int):
    """Nodes and weights on (-1, 1), `panels` equal panels of a
    `points`-point Gauss rule each."""
    base_x, base_w = np.polynomial.legendre.leggauss(points)
    edges = np.linspace(-1.0, 1.0, panels + 1)
    half = 0.5 * (edges[1:] - edges[:-1])
    mids = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mids[:, None] + half[:, None] * base_x[None, :]).ravel()
    weights = (half[:, None] * base_w[None, :]).ravel()
    return nodes, weights


class NeumannBasis:
    """Orthonormal zero-slope eigenbasis, modes ordered by eigenvalue."""

    def __init__(self, n_modes: int, panels: int = 64, points: int = 10):
        if n_modes < 1:
            raise DomainError("need at least one mode")
        self.n_modes = int(n_modes)
        self.freqs = 0.5 * np.pi * np.arange(self.n_modes)
        self.eigenvalues = self.freqs**2
        self.nodes, self.weights = composite_gauss_legendre(panels, points)
        self.phi = self.eval_modes(self.nodes)
        self.dphi = self.eval_dmodes(self.nodes)
        self._wphi = self.weights[:, None] * self.phi

    def mode_kind(self, j):
        if j == 0:
            return ("constant", 0)
        return ("sin", (j - 1) // 2) if j % 2 else ("cos", j // 2)

    def eval_modes(self, x):
        x = np.asarray(x, dtype=float)
        out = np.empty((x.size, self.n_modes))
        for j in range(self.n_modes):
            if j == 0:
                out[:, j] = 1.0 / np.sqrt(2.0)
            elif j % 2:
                out[:, j] = np.sin(self.freqs[j] * x)
            else:
                out[:, j] = np.cos(self.freqs[j] * x)
        return out

    def eval_dmodes(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros((x.size, self.n_modes))
        for j in range(1, self.n_modes):
            if j % 2:
                out[:, j] = self.freqs[j] * np.cos(self.freqs[j] * x)
            else:
                out[:, j] = -self.freqs[j] * np.sin(self.freqs[j] * x)
        return out

    def project_values(self, values):
        """Coefficients of nodal samples taken at the quadrature nodes."""
        return np.asarray(values) @ self._wphi

    def integrate(self, values):
        return np.asarray(values) @ self.weights


class DirichletSineBasis:
    """Orthonormal wall-vanishing family sin(k pi (x2+1)/2), k = 1..n."""

    def __init__(self, n_modes: int, panels: int = 64, points: int = 10):
        if n_modes < 1:
            raise DomainError("need at least one mode")
        self.n_modes = int(n_modes)
        self.freqs = 0.5 * np.pi * np.arange(1, self.n_modes + 1)
        self.eigenvalues = self.freqs**2
        self.nodes, self.weights = composite_gauss_legendre(panels, points)
        self.phi = self.eval_modes(self.nodes)
        self.dphi = self.eval_dmodes(self.nodes)
        self._wphi = self.weights[:, None] * self.phi

    def eval_modes(self, x):
        x = np.asarray(x, dtype=float)
        return np.sin(self.freqs[None, :] * (x[:, None] + 1.0))

    def eval_dmodes(self, x):
        x = np.asarray(x, dtype=float)
        return self.freqs[None, :] * np.cos(self.freqs[None, :] * (x[:, None] + 1.0))

    def project_values(self, values):
        return np.asarray(values) @ self._wphi


class SpectralField:
    """Coefficient curves A_j(x1) over a cross-stream basis.

    The nodal picture is psi(x1_i, x2_q) = sum_j A_j(x1_i) b_j(x2_q).
    """

    def __init__(self, basis, x1, coeffs):
        coeffs = np.asarray(coeffs, dtype=float)
        if coeffs.shape != (basis.n_modes, len(x1)):
            raise DomainError(
                f"coefficient array must be (n_modes, n_x1), got {coeffs.shape}"
            )
        self.basis = basis
        self.x1 = np.asarray(x1, dtype=float)
        self.coeffs = coeffs

    @classmethod
    def zeros(cls, basis, x1):
        return cls(basis, x1, np.zeros((basis.n_modes, len(x1))))

    def nodal(self, x2=None):
        phi = self.basis.phi if x2 is None else self.basis.eval_modes(x2)
        return self.coeffs.T @ phi.T

    def d2_nodal(self, x2=None):
        dphi = self.basis.dphi if x2 is None else self.basis.eval_dmodes(x2)
        return self.coeffs.T @ dphi.T

    def d1_coeffs(self, order=2):
        """x1-derivative of the coefficient curves by finite differences."""
        from .fd import d1 as _d1

        h = self.x1[1] - self.x1[0]
        return np.apply_along_axis(_d1, 1, self.coeffs, h, order)

    def l2_sq_slices(self):
        """Squared cross-stream norm at each x1 node (exact for the span)."""
        return np.sum(self.coeffs**2, axis=0)

    def _check_compatible(self, other):
        if self.basis is not other.basis or len(self.x1) != len(other.x1):
            raise DomainError("fields live on different discretizations")

    def __add__(self, other):
        self._check_compatible(other)
        return SpectralField(self.basis, self.x1, self.coeffs + other.coeffs)

    def __sub__(self, other):
        self._check_compatible(other)
        return SpectralField(self.basis, self.x1, self.coeffs - other.coeffs)

    def __mul__(self, scalar):
        return SpectralField(self.basis, self.x1, self.coeffs * float(scalar))

    __rmul__ = __mul__


def project(basis, x1, f) -> SpectralField:
    """Project a callable f(x1, x2) or nodal samples onto the basis."""
    x1 = np.asarray(x1, dtype=float)
    if callable(f):
        values = f(x1[:, None], basis.nodes[None, :])
        values = np.broadcast_to(values, (len(x1), len(basis.nodes)))
    else:
        values = np.asarray(f, dtype=float)
        if values.shape != (len(x1), len(basis.nodes)):
            raise DomainError("nodal samples must be (n_x1, n_quadrature)")
    return SpectralField(basis, x1, basis.project_values(values).T)


class X2Derivative:
    """Cross-stream derivative of a spectral field.

    Lives on the derivative family (sines for cosine modes and vice versa),
    so it is not itself expandable in the original basis; it supports nodal
    evaluation and the eigenvalue-weighted norm.
    """

    def __init__(self, field: SpectralField):
        self.basis = field.basis
        self.x1 = field.x1
        self.coeffs = field.coeffs

    def nodal(self, x2=None):
        dphi = self.basis.dphi if x2 is None else self.basis.eval_dmodes(x2)
        return self.coeffs.T @ dphi.T

    def l2_sq_slices(self):
        lam = self.basis.eigenvalues[:, None]
        return np.sum(lam * self.coeffs**2, axis=0)


def diff_x2(field: SpectralField) -> X2Derivative:
    return X2Derivative(field)
