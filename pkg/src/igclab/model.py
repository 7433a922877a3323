"""Hamiltonian builders for lattices whose only non-Hermiticity is onsite loss.

Two model families are covered:

* the dissipative two-chain ladder (an A chain without loss, a B chain with a
  per-cell loss rate gamma_x, and A-B couplings of range n), built either in
  real space under open or periodic boundaries or as a 2x2 Bloch matrix, and
* an arbitrary "dissipative graph" split into a lossless subsystem, a lossy
  subsystem, and the Hermitian coupling between them.

Conventions, fixed once and relied on by every downstream module:

* Unit cells are numbered x = 1..L.  Matrix rows interleave the sublattices,
  index(x, A) = 2(x-1) and index(x, B) = 2(x-1)+1, so the loss pattern on the
  diagonal reads {0, gamma_1, 0, gamma_2, ...}.
* The forward intra-chain hop x -> x+1 carries the phase factor e^{+i phi} on
  both chains, with an overall minus sign on chain B.  A plane wave on chain A
  with momentum k then has energy t_p cos(k - phi).  Only the chain-A/chain-B
  combination is gauge invariant; this particular split is a choice.
* A-B couplings: t_0 inside a cell plus t_m/2 between cells m apart (both
  directions), m = 1..n.
* In the Bloch matrix the A sublattice is the upper component and the B
  sublattice the lower one.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .densela import eigendecompose

OBC = "OBC"
PBC = "PBC"

_HERM_TOL = 1e-12


@dataclass(frozen=True)
class LadderParams:
    """Full parameterization of the dissipative ladder.

    Parameters
    ----------
    L : int
        Number of unit cells, at least 2.
    t : sequence of float
        A-B coupling amplitudes t_0..t_n.  The coupling range n = len(t)-1
        must satisfy n < L/2 so periodic wraps are unambiguous.
    t_p : float
        Intra-chain hopping amplitude (same magnitude on both chains).
    phi : float
        Peierls phase in radians attached to the intra-chain hops.
    gamma : float or sequence of float
        Loss rate of each cell's B site.  A scalar is broadcast to all cells.
    bc : str
        Boundary condition, "OBC" or "PBC".
    """

    L: int
    t: tuple
    t_p: float
    phi: float
    gamma: tuple
    bc: str = OBC

    def __post_init__(self):
        if not isinstance(self.L, (int, np.integer)) or self.L < 2:
            raise ValueError(f"L must be an integer >= 2, got {self.L}")
        t = tuple(float(v) for v in np.atleast_1d(self.t))
        if len(t) < 1 or not all(np.isfinite(t)):
            raise ValueError("t must be a non-empty list of finite reals")
        n = len(t) - 1
        if n >= self.L / 2:
            raise ValueError(f"coupling range n={n} must satisfy n < L/2 (L={self.L})")
        if not (np.isfinite(self.t_p) and np.isfinite(self.phi)):
            raise ValueError("t_p and phi must be finite")
        g = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if g.size == 1:
            g = np.full(self.L, g[0])
        if g.size != self.L:
            raise ValueError(f"gamma must have one entry per cell ({self.L}), got {g.size}")
        if not np.all(np.isfinite(g)) or np.any(g < 0):
            raise ValueError("loss rates gamma_x must be finite and >= 0")
        if self.bc not in (OBC, PBC):
            raise ValueError(f"bc must be '{OBC}' or '{PBC}', got {self.bc!r}")
        object.__setattr__(self, "L", int(self.L))
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "t_p", float(self.t_p))
        object.__setattr__(self, "phi", float(self.phi))
        object.__setattr__(self, "gamma", tuple(g))

    @property
    def n(self) -> int:
        """Coupling range (largest A-B hopping distance in cells)."""
        return len(self.t) - 1

    @property
    def dim(self) -> int:
        return 2 * self.L

    @property
    def uniform_gamma(self):
        """The common loss rate if the profile is uniform, else None."""
        g = np.asarray(self.gamma)
        if np.all(g == g[0]):
            return float(g[0])
        return None

    def replace(self, **kw) -> "LadderParams":
        d = dict(L=self.L, t=self.t, t_p=self.t_p, phi=self.phi,
                 gamma=self.gamma, bc=self.bc)
        d.update(kw)
        return LadderParams(**d)


def linear_gamma(L: int, slope: float, offset: float) -> np.ndarray:
    """Loss profile gamma_x = slope*x + offset for x = 1..L."""
    g = slope * np.arange(1, L + 1) + offset
    if np.any(g < 0):
        raise ValueError("linear profile produces negative loss rates")
    return g


def random_gamma(L: int, low: float = 0.4, high: float = 0.6, seed=None) -> np.ndarray:
    """Loss rates drawn uniformly from (low, high) with a seedable PCG64 stream."""
    if not 0 <= low < high:
        raise ValueError("need 0 <= low < high")
    return np.random.default_rng(seed).uniform(low, high, L)


def site_index(x: int, sub: str) -> int:
    """Row index of site (x, sub) in the interleaved ordering, x = 1-based."""
    if sub not in ("A", "B"):
        raise ValueError("sublattice must be 'A' or 'B'")
    return 2 * (x - 1) + (0 if sub == "A" else 1)


@dataclass(frozen=True)
class HamiltonianMatrix:
    """A dense complex Hamiltonian together with its site labeling."""

    dim: int
    matrix: np.ndarray
    site_index: dict = field(repr=False)

    def __post_init__(self):
        self.matrix.setflags(write=False)

    def loss_diagonal(self) -> np.ndarray:
        """Onsite loss rates: gamma_i = -Im H_ii (zero on lossless sites)."""
        return -np.imag(np.diagonal(self.matrix))


@dataclass(frozen=True)
class BlochMatrix:
    """The 2x2 momentum-space matrix of the uniform-loss ladder."""

    k: float
    matrix: np.ndarray

    def __post_init__(self):
        self.matrix.setflags(write=False)


def build_ladder(p: LadderParams) -> HamiltonianMatrix:
    """Assemble the dense 2L x 2L ladder Hamiltonian.

    Hops that would cross the boundary are present only under PBC, where they
    wrap modulo L.  The anti-Hermitian content is exactly the diagonal
    -i*gamma_x on the B sites.
    """
    L, t, t_p, phi, bc = p.L, p.t, p.t_p, p.phi, p.bc
    H = np.zeros((2 * L, 2 * L), dtype=complex)
    a = lambda x: 2 * (x % L)        # noqa: E731 (0-based cell here)
    b = lambda x: 2 * (x % L) + 1    # noqa: E731
    fwd = 0.5 * t_p * np.exp(1j * phi)
    for x in range(L):
        if t_p != 0.0 and (bc == PBC or x + 1 < L):
            H[a(x + 1), a(x)] += fwd
            H[a(x), a(x + 1)] += np.conj(fwd)
            H[b(x + 1), b(x)] += -fwd
            H[b(x), b(x + 1)] += -np.conj(fwd)
        H[b(x), a(x)] += t[0]
        H[a(x), b(x)] += t[0]
        for m in range(1, p.n + 1):
            if bc == PBC or x + m < L:
                H[b(x + m), a(x)] += 0.5 * t[m]
                H[a(x), b(x + m)] += 0.5 * t[m]
            if bc == PBC or x - m >= 0:
                H[b(x - m), a(x)] += 0.5 * t[m]
                H[a(x), b(x - m)] += 0.5 * t[m]
        H[b(x), b(x)] = -1j * p.gamma[x]
    idx = {}
    for x in range(1, L + 1):
        idx[(x, "A")] = site_index(x, "A")
        idx[(x, "B")] = site_index(x, "B")
    return HamiltonianMatrix(dim=2 * L, matrix=H, site_index=idx)


def h_x(t, k):
    """A-B coupling form factor sum_m t_m cos(m k)."""
    k = np.asarray(k, dtype=float)
    return sum(tm * np.cos(m * k) for m, tm in enumerate(t))


def h_y(t_p, phi, k):
    """Intra-chain dispersion t_p cos(k - phi)."""
    return t_p * np.cos(np.asarray(k, dtype=float) - phi)


def build_bloch(p: LadderParams, k: float) -> BlochMatrix:
    """Momentum-space 2x2 matrix of the ladder at momentum k.

    Requires a uniform loss profile; a site-dependent gamma_x breaks the
    discrete translational symmetry and has no Bloch form.
    """
    g = p.uniform_gamma
    if g is None:
        raise ValueError("Bloch form undefined: loss profile is not uniform")
    hx = float(h_x(p.t, k))
    hy = float(h_y(p.t_p, p.phi, k))
    m = np.array([[hy, hx],
                  [hx, -hy - 1j * g]], dtype=complex)
    return BlochMatrix(k=float(k), matrix=m)


def bloch_bands(p: LadderParams, ks) -> np.ndarray:
    """Closed-form eigenvalues of the Bloch matrix on a momentum grid.

    Returns an array of shape (2, len(ks)); rows are the +/- square-root
    branches (not globally continuous bands).
    """
    g = p.uniform_gamma
    if g is None:
        raise ValueError("Bloch form undefined: loss profile is not uniform")
    ks = np.atleast_1d(np.asarray(ks, dtype=float))
    hx = h_x(p.t, ks)
    hy = h_y(p.t_p, p.phi, ks)
    s = np.sqrt(hx**2 + (hy + 0.5j * g) ** 2)
    return np.array([-0.5j * g + s, -0.5j * g - s])


@dataclass(frozen=True)
class GeneralModel:
    """A lossy lattice split into lossless sites, lossy sites, and coupling.

    `A` acts within the lossless sites, `B_herm` within the lossy sites (its
    anti-Hermitian part, -i*diag(gamma), is added by the builder), and `C`
    maps lossless-site amplitudes onto lossy sites.
    """

    A: np.ndarray
    B_herm: np.ndarray
    C: np.ndarray
    gamma: tuple

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        B = np.asarray(self.B_herm, dtype=complex)
        C = np.asarray(self.C, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("A must be square")
        if B.ndim != 2 or B.shape[0] != B.shape[1]:
            raise ValueError("B_herm must be square")
        if C.shape != (B.shape[0], A.shape[0]):
            raise ValueError(f"C must be shaped (n_d, n_h) = {(B.shape[0], A.shape[0])}")
        if np.abs(A - A.conj().T).max(initial=0.0) > _HERM_TOL:
            raise ValueError("A is not Hermitian (elementwise tolerance 1e-12)")
        if np.abs(B - B.conj().T).max(initial=0.0) > _HERM_TOL:
            raise ValueError("B_herm is not Hermitian (elementwise tolerance 1e-12)")
        g = np.atleast_1d(np.asarray(self.gamma, dtype=float))
        if g.size != B.shape[0]:
            raise ValueError("gamma must list one loss rate per lossy site")
        if not np.all(np.isfinite(g)) or np.any(g <= 0):
            raise ValueError("lossy-site rates must be finite and > 0")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B_herm", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "gamma", tuple(g))

    @property
    def n_h(self) -> int:
        return self.A.shape[0]

    @property
    def n_d(self) -> int:
        return self.B_herm.shape[0]


def build_general(g: GeneralModel) -> HamiltonianMatrix:
    """Assemble the (n_h + n_d)-dimensional matrix of a general lossy graph.

    Ordering: lossless sites first, lossy sites after, so the blocks read

        [[A,        C^dagger],
         [C,  B_herm - i diag(gamma)]]
    """
    nh, nd = g.n_h, g.n_d
    H = np.zeros((nh + nd, nh + nd), dtype=complex)
    H[:nh, :nh] = g.A
    H[nh:, nh:] = g.B_herm - 1j * np.diag(g.gamma)
    H[nh:, :nh] = g.C
    H[:nh, nh:] = g.C.conj().T
    idx = {("h", i): i for i in range(nh)}
    idx.update({("nh", j): nh + j for j in range(nd)})
    return HamiltonianMatrix(dim=nh + nd, matrix=H, site_index=idx)


def ladder_to_general(p: LadderParams) -> GeneralModel:
    """Re-express a ladder (all gamma_x > 0) in the general split form."""
    if min(p.gamma) <= 0:
        raise ValueError("the split form puts every B site in the lossy block; "
                         "all gamma_x must be > 0")
    L = p.L
    A = np.zeros((L, L), dtype=complex)
    B = np.zeros((L, L), dtype=complex)
    fwd = 0.5 * p.t_p * np.exp(1j * p.phi)
    for x in range(L):
        if p.bc == PBC or x + 1 < L:
            A[(x + 1) % L, x] += fwd
            A[x, (x + 1) % L] += np.conj(fwd)
            B[(x + 1) % L, x] += -fwd
            B[x, (x + 1) % L] += -np.conj(fwd)
    C = np.zeros((L, L), dtype=complex)
    for x in range(L):
        C[x, x] += p.t[0]
        for m in range(1, p.n + 1):
            if p.bc == PBC or x + m < L:
                C[(x + m) % L, x] += 0.5 * p.t[m]
            if p.bc == PBC or x - m >= 0:
                C[(x - m) % L, x] += 0.5 * p.t[m]
    return GeneralModel(A=A, B_herm=B, C=C, gamma=p.gamma)


@dataclass
class DarkModeReport:
    """Outcome of checking near-real eigenmodes for dark-mode structure."""

    energies: list
    lossy_weights: list
    subsystem_residuals: list
    coupling_residuals: list
    passed: bool
    vacuous: bool
    condition_flag: bool


def verify_dark_modes(H: HamiltonianMatrix, tol: float = 1e-8) -> DarkModeReport:
    """Check that every near-real eigenmode lives on the lossless sites only.

    An eigenpair with |Im E| < tol is tested for (i) weight on lossy sites,
    (ii) the residual of the lossless-subsystem eigenproblem, and (iii) the
    residual of the coupling condition.  The report passes when both residuals
    stay below tol for every such pair (weights are reported alongside).
    A model with loss everywhere and no near-real eigenvalue passes vacuously.
    """
    spec = eigendecompose(H.matrix, want_vectors=True)
    if spec.condition_flag:
        warnings.warn("eigenbasis is ill-conditioned; dark-mode residuals may "
                      "be pessimistic", RuntimeWarning, stacklevel=2)
    rates = H.loss_diagonal()
    lossy = rates > 0.0
    lossless = ~lossy
    H0 = 0.5 * (H.matrix + H.matrix.conj().T)
    H_sub = H0[np.ix_(lossless, lossless)]
    H_coup = H0.copy()
    H_coup[np.ix_(lossless, lossless)] = 0.0
    H_coup[np.ix_(lossy, lossy)] = 0.0
    energies, weights, res_sub, res_coup = [], [], [], []
    for j, E in enumerate(spec.eigenvalues):
        if abs(E.imag) >= tol:
            continue
        v = spec.right_vectors[:, j]
        nrm = np.linalg.norm(v)
        energies.append(E)
        weights.append(float(np.linalg.norm(v[lossy]) ** 2 / nrm**2))
        res_sub.append(float(np.linalg.norm(H_sub @ v[lossless] - E * v[lossless]) / nrm))
        res_coup.append(float(np.linalg.norm(H_coup @ v) / nrm))
    passed = all(r < tol for r in res_sub) and all(r < tol for r in res_coup)
    return DarkModeReport(
        energies=energies,
        lossy_weights=weights,
        subsystem_residuals=res_sub,
        coupling_residuals=res_coup,
        passed=passed,
        vacuous=(len(energies) == 0),
        condition_flag=spec.condition_flag,
    )


def format_matrix(m: np.ndarray) -> str:
    """Debug text format: one row per line, entries as 're,im' pairs."""
    m = np.asarray(m, dtype=complex)
    lines = []
    for row in m:
        lines.append(" ".join(f"{z.real:.17g},{z.imag:.17g}" for z in row))
    return "\n".join(lines) + "\n"


def parse_matrix(text: str) -> np.ndarray:
    """Inverse of format_matrix."""
    rows = []
    for line in text.strip().splitlines():
        rows.append([complex(*map(float, tok.split(","))) for tok in line.split()])
    return np.array(rows, dtype=complex)


def dump_matrix(m: np.ndarray, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_matrix(m))
