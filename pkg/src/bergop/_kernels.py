"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``BERGOP_NO_NUMBA`` is unset (or ``0``).  Both paths are always
importable as ``<name>_numpy`` / ``<name>_numba`` so tests and the benchmark
can compare them directly; the unsuffixed names are the active dispatch.
"""

from __future__ import annotations

import os

import numpy as np

# Gauss-Kronrod (7, 15) on [-1, 1], ascending order.
_XGK_HALF = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK_HALF = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG_HALF = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

GK_NODES = np.concatenate([-_XGK_HALF[:-1], _XGK_HALF[::-1]])
GK_WEIGHTS = np.concatenate([_WGK_HALF[:-1], _WGK_HALF[::-1]])
# Gauss-7 weights scattered onto the 15 Kronrod nodes (zero at Kronrod-only nodes).
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[[1, 3, 5]] = _WG_HALF[:3]
G_WEIGHTS[7] = _WG_HALF[3]
G_WEIGHTS[[9, 11, 13]] = _WG_HALF[2::-1]
NQ = 15


def _env_disables_numba() -> bool:
    return os.environ.get("BERGOP_NO_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")


try:  # pragma: no cover - exercised implicitly depending on the environment
    import numba

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAVE_NUMBA = False

USE_NUMBA = HAVE_NUMBA and not _env_disables_numba()


def backend() -> str:
    """Name of the active kernel backend (``"numba"`` or ``"numpy"``)."""
    return "numba" if USE_NUMBA else "numpy"


# ---------------------------------------------------------------------------
# numpy implementations

def cell_points_numpy(cx, cy, r0, r1, t0, t1):
    """Tensor GK15 nodes for a batch of polar cells.

    Returns ``(x, y, jac)`` each of shape ``(ncell, 15, 15)``; axis 1 is the
    radial node, axis 2 the angular node.  ``jac`` already includes the
    ``1/pi`` of the normalized area measure and the cell half-widths.
    """
    hr = 0.5 * (r1 - r0)
    mr = r0 + hr
    ht = 0.5 * (t1 - t0)
    mt = t0 + ht
    r = mr[:, None] + hr[:, None] * GK_NODES[None, :]
    t = mt[:, None] + ht[:, None] * GK_NODES[None, :]
    x = cx + r[:, :, None] * np.cos(t)[:, None, :]
    y = cy + r[:, :, None] * np.sin(t)[:, None, :]
    jac = np.broadcast_to((r * (hr * ht / np.pi)[:, None])[:, :, None], x.shape)
    return x, y, np.ascontiguousarray(jac)


def cell_reduce_numpy(vals, jac):
    """Kronrod sum and three embedded lower-order sums per cell.

    Returns ``(kk, gg, gk, kg)``: Kronrod x Kronrod, Gauss x Gauss,
    Gauss(radial) x Kronrod(angular), Kronrod(radial) x Gauss(angular).
    """
    f = vals * jac
    kt = f @ GK_WEIGHTS  # contract angular axis
    gt = f @ G_WEIGHTS
    kk = kt @ GK_WEIGHTS
    gg = gt @ G_WEIGHTS
    gk = kt @ G_WEIGHTS
    kg = gt @ GK_WEIGHTS
    return kk, gg, gk, kg


def horner_numpy(coeffs, z):
    """Evaluate ``sum coeffs[k] z**k`` at every entry of ``z``."""
    z = np.asarray(z, dtype=complex)
    out = np.zeros(z.shape, dtype=complex)
    for c in coeffs[::-1]:
        out = out * z + c
    return out


def kernel_power_numpy(a, w, s):
    """``|1 - conj(a) w|**(-s)`` elementwise."""
    d = 1.0 - np.conj(a) * np.asarray(w, dtype=complex)
    return (d.real * d.real + d.imag * d.imag) ** (-0.5 * s)


def pseudo_disk_mask_numpy(w, center, r):
    """Indicator of ``rho(w, center) < r``."""
    d = np.abs((w - center) / (1.0 - np.conj(center) * w))
    return (d < r).astype(float)


def series_sum_numpy(x, coeffs):
    """``sum_k coeffs[k] x**k`` by Horner, real or complex ``x``."""
    x = np.asarray(x)
    out = np.zeros(x.shape, dtype=np.result_type(x, coeffs, float))
    for c in coeffs[::-1]:
        out = out * x + c
    return out


# ---------------------------------------------------------------------------
# numba implementations

if HAVE_NUMBA:
    _GKN = GK_NODES.copy()
    _GKW = GK_WEIGHTS.copy()
    _GW = G_WEIGHTS.copy()

    @numba.njit(cache=True)
    def _cell_points_nb(cx, cy, r0, r1, t0, t1, gkn):
        n = r0.shape[0]
        x = np.empty((n, 15, 15))
        y = np.empty((n, 15, 15))
        jac = np.empty((n, 15, 15))
        ct = np.empty(15)
        st = np.empty(15)
        for c in range(n):
            hr = 0.5 * (r1[c] - r0[c])
            mr = r0[c] + hr
            ht = 0.5 * (t1[c] - t0[c])
            mt = t0[c] + ht
            scale = hr * ht / np.pi
            for j in range(15):
                t = mt + ht * gkn[j]
                ct[j] = np.cos(t)
                st[j] = np.sin(t)
            for i in range(15):
                r = mr + hr * gkn[i]
                jr = r * scale
                for j in range(15):
                    x[c, i, j] = cx + r * ct[j]
                    y[c, i, j] = cy + r * st[j]
                    jac[c, i, j] = jr
        return x, y, jac

    @numba.njit(cache=True)
    def _cell_reduce_nb(vals, jac, gkw, gw):
        n = vals.shape[0]
        kk = np.zeros(n, dtype=vals.dtype)
        gg = np.zeros(n, dtype=vals.dtype)
        gk = np.zeros(n, dtype=vals.dtype)
        kg = np.zeros(n, dtype=vals.dtype)
        for c in range(n):
            for i in range(15):
                ksum = vals[c, i, 0] * 0.0
                gsum = vals[c, i, 0] * 0.0
                for j in range(15):
                    f = vals[c, i, j] * jac[c, i, j]
                    ksum += f * gkw[j]
                    gsum += f * gw[j]
                kk[c] += ksum * gkw[i]
                gg[c] += gsum * gw[i]
                gk[c] += ksum * gw[i]
                kg[c] += gsum * gkw[i]
        return kk, gg, gk, kg

    @numba.njit(cache=True)
    def _horner_nb(cre, cim, z):
        # coefficient loop outside so the point loop vectorizes in real arithmetic
        flat = z.ravel()
        n = flat.shape[0]
        xr = flat.real.copy()
        xi = flat.imag.copy()
        ar = np.zeros(n)
        ai = np.zeros(n)
        for k in range(cre.shape[0] - 1, -1, -1):
            ck = cre[k]
            dk = cim[k]
            for i in range(n):
                t = ar[i] * xr[i] - ai[i] * xi[i] + ck
                ai[i] = ar[i] * xi[i] + ai[i] * xr[i] + dk
                ar[i] = t
        out = np.empty(n, dtype=np.complex128)
        for i in range(n):
            out[i] = complex(ar[i], ai[i])
        return out.reshape(z.shape)

    @numba.njit(cache=True)
    def _kernel_power_nb(a, w, s):
        flat = w.ravel()
        out = np.empty(flat.shape[0])
        ar = a.real
        ai = -a.imag
        h = -0.5 * s
        for i in range(flat.shape[0]):
            wr = flat[i].real
            wi = flat[i].imag
            dr = 1.0 - (ar * wr - ai * wi)
            di = -(ar * wi + ai * wr)
            out[i] = (dr * dr + di * di) ** h
        return out.reshape(w.shape)

    @numba.njit(cache=True)
    def _pseudo_disk_mask_nb(w, center, r):
        flat = w.ravel()
        out = np.empty(flat.shape[0])
        cc = np.conj(center)
        for i in range(flat.shape[0]):
            d = np.abs((flat[i] - center) / (1.0 - cc * flat[i]))
            out[i] = 1.0 if d < r else 0.0
        return out.reshape(w.shape)

    @numba.njit(cache=True)
    def _series_sum_real_nb(x, coeffs):
        flat = x.ravel()
        n = flat.shape[0]
        acc = np.zeros(n)
        for k in range(coeffs.shape[0] - 1, -1, -1):
            ck = coeffs[k]
            for i in range(n):
                acc[i] = acc[i] * flat[i] + ck
        return acc.reshape(x.shape)

    def cell_points_numba(cx, cy, r0, r1, t0, t1):
        return _cell_points_nb(float(cx), float(cy), np.ascontiguousarray(r0, dtype=float),
                               np.ascontiguousarray(r1, dtype=float),
                               np.ascontiguousarray(t0, dtype=float),
                               np.ascontiguousarray(t1, dtype=float), _GKN)

    def cell_reduce_numba(vals, jac):
        vals = np.ascontiguousarray(vals)
        if np.iscomplexobj(vals):
            vals = vals.astype(np.complex128)
        else:
            vals = vals.astype(np.float64)
        return _cell_reduce_nb(vals, np.ascontiguousarray(jac, dtype=float), _GKW, _GW)

    def horner_numba(coeffs, z):
        z = np.ascontiguousarray(z, dtype=np.complex128)
        c = np.asarray(coeffs, dtype=np.complex128)
        return _horner_nb(np.ascontiguousarray(c.real), np.ascontiguousarray(c.imag), z)

    def kernel_power_numba(a, w, s):
        return _kernel_power_nb(complex(a), np.ascontiguousarray(w, dtype=np.complex128), float(s))

    def pseudo_disk_mask_numba(w, center, r):
        return _pseudo_disk_mask_nb(np.ascontiguousarray(w, dtype=np.complex128),
                                    complex(center), float(r))

    def series_sum_numba(x, coeffs):
        x = np.asarray(x)
        if np.iscomplexobj(x) or np.iscomplexobj(coeffs):
            return horner_numba(coeffs, x)
        return _series_sum_real_nb(np.ascontiguousarray(x, dtype=np.float64),
                                   np.ascontiguousarray(coeffs, dtype=np.float64))
else:  # pragma: no cover
    cell_points_numba = cell_points_numpy
    cell_reduce_numba = cell_reduce_numpy
    horner_numba = horner_numpy
    kernel_power_numba = kernel_power_numpy
    pseudo_disk_mask_numba = pseudo_disk_mask_numpy
    series_sum_numba = series_sum_numpy


KERNELS = ("cell_points", "cell_reduce", "horner", "kernel_power", "pseudo_disk_mask", "series_sum")


def use_backend(name: str) -> None:
    """Switch the active dispatch at runtime (``"numba"`` or ``"numpy"``)."""
    global USE_NUMBA
    if name not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {name!r}")
    USE_NUMBA = name == "numba" and HAVE_NUMBA
    g = globals()
    suffix = "_numba" if USE_NUMBA else "_numpy"
    for k in KERNELS:
        g[k] = g[k + suffix]


cell_points = cell_points_numpy
cell_reduce = cell_reduce_numpy
horner = horner_numpy
kernel_power = kernel_power_numpy
pseudo_disk_mask = pseudo_disk_mask_numpy
series_sum = series_sum_numpy
use_backend("numba" if USE_NUMBA else "numpy")
