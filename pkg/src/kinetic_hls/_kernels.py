"""Compiled inner loops for the collision and Radon operators.

Everything here works in *index units*: node ``i`` of an axis sits at index
coordinate ``i`` and physical quantities are restored by the callers. Output
nodes (or fixed source chunks for the deposit scheme) are distributed over
threads; every per-node sum runs in a fixed order and chunk buffers are
reduced in a fixed order, so results are bitwise independent of the thread
count.
"""
import numpy as np
import numba as nb

_OFF = 4096  # shift that makes float->int truncation act as floor


@nb.njit(cache=True, inline="always")
def _rotation(ux, uy, uz):
    """Rotation taking e_3 to the unit vector u (Rodrigues about e_3 x u).

    u = -e_3 uses the half turn about e_1; for uz < 0 the factor 1/(1 + uz) is
    formed as (1 - uz)/(ux^2 + uy^2) to avoid cancellation near the antipode.
    """
    c = uz
    s2 = ux * ux + uy * uy
    if s2 == 0.0 and c < 0.0:
        return 1.0, 0.0, 0.0, 0.0, -1.0, 0.0, 0.0, 0.0, -1.0
    kx = -uy
    ky = ux
    q = 1.0 / (1.0 + c) if c >= 0.0 else (1.0 - c) / s2
    return (c + kx * kx * q, kx * ky * q, ky,
            kx * ky * q, c + ky * ky * q, -kx,
            -ky, kx, c)


@nb.njit(cache=True, inline="always")
def _lerp3(f, n, tx, ty, tz):
    """Trilinear interpolation at index coordinates, zero outside the node hull."""
    fx = int(tx + _OFF) - _OFF
    fy = int(ty + _OFF) - _OFF
    fz = int(tz + _OFF) - _OFF
    ax = tx - fx
    ay = ty - fy
    az = tz - fz
    if fx >= 0 and fy >= 0 and fz >= 0 and fx < n - 1 and fy < n - 1 and fz < n - 1:
        bz = 1.0 - az
        c00 = f[fx, fy, fz] * bz + f[fx, fy, fz + 1] * az
        c01 = f[fx, fy + 1, fz] * bz + f[fx, fy + 1, fz + 1] * az
        c10 = f[fx + 1, fy, fz] * bz + f[fx + 1, fy, fz + 1] * az
        c11 = f[fx + 1, fy + 1, fz] * bz + f[fx + 1, fy + 1, fz + 1] * az
        by = 1.0 - ay
        return (c00 * by + c01 * ay) * (1.0 - ax) + (c10 * by + c11 * ay) * ax
    s = 0.0
    for dx in range(2):
        jx = fx + dx
        if jx < 0 or jx >= n:
            continue
        wx = ax if dx else 1.0 - ax
        for dy in range(2):
            jy = fy + dy
            if jy < 0 or jy >= n:
                continue
            wy = ay if dy else 1.0 - ay
            for dz in range(2):
                jz = fz + dz
                if jz < 0 or jz >= n:
                    continue
                wz = az if dz else 1.0 - az
                s += wx * wy * wz * f[jx, jy, jz]
    return s


@nb.njit(cache=True, inline="always")
def _deposit(buf, n, tx, ty, tz, w):
    fx = int(tx + _OFF) - _OFF
    fy = int(ty + _OFF) - _OFF
    fz = int(tz + _OFF) - _OFF
    ax = tx - fx
    ay = ty - fy
    az = tz - fz
    if fx >= 0 and fy >= 0 and fz >= 0 and fx < n - 1 and fy < n - 1 and fz < n - 1:
        bx = (1.0 - ax) * w
        ax = ax * w
        by = 1.0 - ay
        bz = 1.0 - az
        buf[fx, fy, fz] += bx * by * bz
        buf[fx, fy, fz + 1] += bx * by * az
        buf[fx, fy + 1, fz] += bx * ay * bz
        buf[fx, fy + 1, fz + 1] += bx * ay * az
        buf[fx + 1, fy, fz] += ax * by * bz
        buf[fx + 1, fy, fz + 1] += ax * by * az
        buf[fx + 1, fy + 1, fz] += ax * ay * bz
        buf[fx + 1, fy + 1, fz + 1] += ax * ay * az
        return
    for dx in range(2):
        jx = fx + dx
        if jx < 0 or jx >= n:
            continue
        wx = ax if dx else 1.0 - ax
        for dy in range(2):
            jy = fy + dy
            if jy < 0 or jy >= n:
                continue
            wy = ay if dy else 1.0 - ay
            for dz in range(2):
                jz = fz + dz
                if jz < 0 or jz >= n:
                    continue
                wz = az if dz else 1.0 - az
                buf[jx, jy, jz] += w * wx * wy * wz


@nb.njit(cache=True)
def kernel_table(n, gamma):
    """|u|^gamma in index units for all lattice offsets u in [-(n-1), n-1]^3.

    The zero offset carries 1 for gamma = 0 and 0 otherwise.
    """
    m = 2 * n - 1
    K = np.empty((m, m, m))
    for a in range(m):
        for b in range(m):
            for c in range(m):
                x = a - (n - 1.0)
                y = b - (n - 1.0)
                z = c - (n - 1.0)
                r2 = x * x + y * y + z * z
                if r2 == 0.0:
                    K[a, b, c] = 1.0 if gamma == 0.0 else 0.0
                elif gamma == 0.0:
                    K[a, b, c] = 1.0
                else:
                    K[a, b, c] = r2 ** (0.5 * gamma)
    return K


@nb.njit(cache=True, parallel=True)
def gain_deposit(f, g, om, wmu, ktab, stride):
    """Weak-form gain term: each pair (v_a, v_b) deposits f_a g_b B w_k at v'.

    ``ktab`` is :func:`kernel_table`; the caller multiplies the result by the
    physical factor h^(3+gamma). The coincident pair a = b (only weighted when
    gamma = 0) lands exactly on its node with the full angular weight.
    """
    n = f.shape[0]
    K = wmu.shape[0]
    csum = 0.0
    for k in range(K):
        csum += wmu[k]
    bufs = np.zeros((n, n, n, n))
    sw = float(stride * stride * stride)
    for a0 in nb.prange(n):
        buf = bufs[a0]
        for a1 in range(n):
            for a2 in range(n):
                fa = f[a0, a1, a2]
                if fa == 0.0:
                    continue
                for b0 in range(0, n, stride):
                    ux = float(a0 - b0)
                    for b1 in range(0, n, stride):
                        uy = float(a1 - b1)
                        for b2 in range(0, n, stride):
                            m = fa * g[b0, b1, b2]
                            if m == 0.0:
                                continue
                            uz = float(a2 - b2)
                            kv = ktab[a0 - b0 + n - 1, a1 - b1 + n - 1, a2 - b2 + n - 1]
                            if kv == 0.0:
                                continue
                            m *= kv * sw
                            un = np.sqrt(ux * ux + uy * uy + uz * uz)
                            if un == 0.0:
                                _deposit(buf, n, float(a0), float(a1), float(a2), m * csum)
                                continue
                            inv = 1.0 / un
                            r00, r01, r02, r10, r11, r12, r20, r21, r22 = _rotation(ux * inv, uy * inv, uz * inv)
                            for k in range(K):
                                ox = om[k, 0]
                                oy = om[k, 1]
                                oz = om[k, 2]
                                p = un * oz
                                tx = a0 - p * (r00 * ox + r01 * oy + r02 * oz)
                                ty = a1 - p * (r10 * ox + r11 * oy + r12 * oz)
                                tz = a2 - p * (r20 * ox + r21 * oy + r22 * oz)
                                _deposit(buf, n, tx, ty, tz, m * wmu[k])
    out = np.zeros((n, n, n))
    for a0 in range(n):
        out += bufs[a0]
    return out


@nb.njit(cache=True, parallel=True)
def gain_interp(f, g, om, wmu, ktab, stride):
    """Strong-form gain term with trilinear evaluation of f(v') and g(v'_*)."""
    n = f.shape[0]
    K = wmu.shape[0]
    csum = 0.0
    for k in range(K):
        csum += wmu[k]
    sw = float(stride * stride * stride)
    out = np.zeros((n, n, n))
    for i0 in nb.prange(n):
        for i1 in range(n):
            for i2 in range(n):
                acc = 0.0
                for j0 in range(0, n, stride):
                    ux = float(i0 - j0)
                    for j1 in range(0, n, stride):
                        uy = float(i1 - j1)
                        for j2 in range(0, n, stride):
                            kv = ktab[i0 - j0 + n - 1, i1 - j1 + n - 1, i2 - j2 + n - 1]
                            if kv == 0.0:
                                continue
                            uz = float(i2 - j2)
                            un = np.sqrt(ux * ux + uy * uy + uz * uz)
                            if un == 0.0:
                                acc += kv * csum * f[i0, i1, i2] * g[i0, i1, i2]
                                continue
                            inv = 1.0 / un
                            r00, r01, r02, r10, r11, r12, r20, r21, r22 = _rotation(ux * inv, uy * inv, uz * inv)
                            s = 0.0
                            for k in range(K):
                                ox = om[k, 0]
                                oy = om[k, 1]
                                oz = om[k, 2]
                                p = un * oz
                                dx = p * (r00 * ox + r01 * oy + r02 * oz)
                                dy = p * (r10 * ox + r11 * oy + r12 * oz)
                                dz = p * (r20 * ox + r21 * oy + r22 * oz)
                                vf = _lerp3(f, n, i0 - dx, i1 - dy, i2 - dz)
                                if vf == 0.0:
                                    continue
                                s += wmu[k] * vf * _lerp3(g, n, j0 + dx, j1 + dy, j2 + dz)
                            acc += kv * s
                out[i0, i1, i2] = acc * sw
    return out


@nb.njit(cache=True, parallel=True)
def loss_sum(g, ktab):
    """sum_j g_j |i-j|^gamma in index units (kernel from :func:`kernel_table`)."""
    n = g.shape[0]
    out = np.zeros((n, n, n))
    for i0 in nb.prange(n):
        for i1 in range(n):
            for i2 in range(n):
                acc = 0.0
                for j0 in range(n):
                    for j1 in range(n):
                        for j2 in range(n):
                            acc += g[j0, j1, j2] * ktab[i0 - j0 + n - 1, i1 - j1 + n - 1, i2 - j2 + n - 1]
                out[i0, i1, i2] = acc
    return out


@nb.njit(cache=True, parallel=True)
def radon_apply(hv, s0, s1, s2, om, wmu, gamma):
    """Hemisphere average of h(v - ((v-v_*).w)w) weighted by |v-v_*|^gamma cos(theta).

    ``(s0, s1, s2)`` is v_* in index coordinates; the result is in index units
    (the caller multiplies by h^gamma).
    """
    n = hv.shape[0]
    K = wmu.shape[0]
    csum = 0.0
    for k in range(K):
        csum += wmu[k]
    out = np.zeros((n, n, n))
    for i0 in nb.prange(n):
        for i1 in range(n):
            for i2 in range(n):
                ux = i0 - s0
                uy = i1 - s1
                uz = i2 - s2
                un = np.sqrt(ux * ux + uy * uy + uz * uz)
                if un == 0.0:
                    out[i0, i1, i2] = csum * hv[i0, i1, i2] if gamma == 0.0 else 0.0
                    continue
                inv = 1.0 / un
                r00, r01, r02, r10, r11, r12, r20, r21, r22 = _rotation(ux * inv, uy * inv, uz * inv)
                s = 0.0
                for k in range(K):
                    ox = om[k, 0]
                    oy = om[k, 1]
                    oz = om[k, 2]
                    p = un * oz
                    s += wmu[k] * _lerp3(hv, n,
                                         i0 - p * (r00 * ox + r01 * oy + r02 * oz),
                                         i1 - p * (r10 * ox + r11 * oy + r12 * oz),
                                         i2 - p * (r20 * ox + r21 * oy + r22 * oz))
                out[i0, i1, i2] = s * (un ** gamma if gamma != 0.0 else 1.0)
    return out
