"""Product quadrature on the upper unit hemisphere.

Gauss-Legendre in mu = cos(theta) on [0, 1] times the uniform trapezoid rule in
the azimuth. Nodes are stored relative to the reference axis e_3; the collision
kernels rotate them onto the relative velocity of each pair.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError


@dataclass(frozen=True, eq=False)
class HemisphereQuadrature:
    n_mu: int
    n_phi: int
    nodes: np.ndarray      # (K, 3) unit vectors with nodes[:, 2] >= 0
    weights: np.ndarray    # (K,) positive

    @property
    def mu(self) -> np.ndarray:
        return self.nodes[:, 2]

    @property
    def size(self) -> int:
        return self.weights.size

    @property
    def cos_weights(self) -> np.ndarray:
        """w_k * cos(theta_k), the weights seen by the kernel b(cos theta) = cos theta."""
        return self.weights * self.mu

    def integrate(self, func) -> float:
        """Integrate func(nodes) -> (K,) values over the hemisphere."""
        return float(np.dot(self.weights, func(self.nodes)))

    def __eq__(self, other):
        return isinstance(other, HemisphereQuadrature) and (self.n_mu, self.n_phi) == (other.n_mu, other.n_phi)

    def __hash__(self):
        return hash((self.n_mu, self.n_phi))


def build_hemisphere_quadrature(n_mu: int, n_phi: int) -> HemisphereQuadrature:
    if int(n_mu) != n_mu or n_mu < 2:
        raise ConfigurationError(f"polar order must be >= 2, got {n_mu}", "quadrature.n_mu")
    if int(n_phi) != n_phi or n_phi < 4:
        raise ConfigurationError(f"azimuthal order must be >= 4, got {n_phi}", "quadrature.n_phi")
    x, w = np.polynomial.legendre.leggauss(int(n_mu))
    mu = 0.5 * (x + 1.0)
    wmu = 0.5 * w
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    M, P = np.meshgrid(mu, phi, indexing="ij")
    st = np.sqrt((1.0 - M) * (1.0 + M))
    nodes = np.stack([st * np.cos(P), st * np.sin(P), M], axis=-1).reshape(-1, 3)
    weights = np.repeat(wmu, n_phi) * (2.0 * np.pi / n_phi)
    return HemisphereQuadrature(int(n_mu), int(n_phi), nodes, weights)


def rotation_to(u) -> np.ndarray:
    """Rotation matrix taking e_3 to the direction of u.

    Rodrigues rotation about e_3 x u; u = -e_3 uses the half turn about e_1.
    For c = u_3 < 0 the factor 1 + c is formed as (u_1^2 + u_2^2) / (1 - c),
    which avoids cancellation near the antipode. Matches the compiled kernels
    node for node.
    """
    u = np.asarray(u, dtype=float)
    nrm = np.linalg.norm(u)
    if nrm == 0:
        return np.eye(3)
    ux, uy, c = u / nrm
    s2 = ux * ux + uy * uy
    if s2 == 0.0 and c < 0:
        return np.diag([1.0, -1.0, -1.0])
    kx, ky = -uy, ux
    q = 1.0 / (1.0 + c) if c >= 0 else (1.0 - c) / s2
    return np.array([[c + kx * kx * q, kx * ky * q, ky],
                     [kx * ky * q, c + ky * ky * q, -kx],
                     [-ky, kx, c]])
