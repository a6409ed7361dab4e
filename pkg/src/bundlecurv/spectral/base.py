"""Common interface of the truncated eigenbases."""

from __future__ import annotations

import numpy as np

from ..errors import ProjectionResidualTooLarge

PROJECTION_RTOL = 1e-6


class SpectralBasis:
    """Truncated orthonormal eigenbasis of a self-adjoint operator on a grid.

    Subclasses set ``weights`` (quadrature weights of the L^2 measure on the
    grid), ``eigenvalues`` (aligned with the coefficient array returned by
    :meth:`analysis`) and implement :meth:`analysis` / :meth:`synthesis`.
    """

    fiber = ""
    weights = None
    eigenvalues = None

    def analysis(self, f):
        raise NotImplementedError

    def synthesis(self, c):
        raise NotImplementedError

    def inner(self, f, g):
        """``int f conj(g)`` by quadrature."""
        return complex(np.sum(self.weights * f * np.conj(g)))

    def norm(self, f):
        return float(np.sqrt(max(np.real(self.inner(f, f)), 0.0)))

    def project(self, f, rtol=PROJECTION_RTOL):
        """Coefficients of ``f`` and its relative projection residual.

        Raises
        ------
        ProjectionResidualTooLarge
            If ``|f - P f| > rtol |f|``.
        """
        f = np.asarray(f)
        c = self.analysis(f)
        nf = self.norm(f)
        res = self.norm(f - self.synthesis(c))
        rel = res / nf if nf > 0 else 0.0
        if rel > rtol:
            raise ProjectionResidualTooLarge(
                f"function is not representable in the truncated basis (residual {rel:.2e})")
        return c, rel

    def apply_function(self, f, fn):
        """``sum fn(lambda_m) <f, phi_m> phi_m``."""
        c, _ = self.project(f)
        out = self.synthesis(c * fn(self.eigenvalues))
        return out.real if np.isrealobj(f) else out


def resolvent_apply(basis, f):
    """``(1 + L)^{-1} f`` for the operator ``L`` diagonalised by ``basis``.

    Parameters
    ----------
    basis : SpectralBasis
    f : ndarray
        Values on the basis grid.

    Raises
    ------
    ProjectionResidualTooLarge
        If ``f`` is not band-limited to the truncation.
    """
    return basis.apply_function(f, lambda lam: 1.0 / (1.0 + lam))


def operator_apply(basis, f):
    """``L f`` computed spectrally."""
    return basis.apply_function(f, lambda lam: lam)
