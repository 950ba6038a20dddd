"""High-precision oracle for the generic-angle overlap integral test.

W: D2-symmetric, d = 1, N = 2, representative coefficients
    (0,0) = 0.5, (1,0) = 0.3, (1,1) = -0.2, (0,2) = 0.1
theta = 2*pi/5.

Value = integral over Omega_0 cap R_theta Omega_0 of w(y) * w(R_{-theta} y) dy,
computed by fan-triangulating the octagon and nesting mpmath.quad per triangle.
Also prints the octagon area for the unit coefficient case (w == 1).
"""
import math

from mpmath import mp, mpf, cos, sin, tan, pi, quad, mpc, exp

mp.dps = 40

d = mpf(1)
reps = {(0, 0): mpf("0.5"), (1, 0): mpf("0.3"), (1, 1): mpf("-0.2"), (0, 2): mpf("0.1")}

# D2 unfold: even in both indices
full = {}
for (a, b), c in reps.items():
    for s1 in ({1, -1} if a else {1}):
        for s2 in ({1, -1} if b else {1}):
            full[(s1 * a, s2 * b)] = c


def w(y1, y2):
    s = mpf(0)
    for (n1, n2), c in full.items():
        s += c * cos(pi * (n1 * y1 + n2 * y2) / d)  # 2*pi*(n/(2d)).y
    return s


theta = 2 * pi / 5
ct, st = cos(theta), sin(theta)


def g(y1, y2):
    # w(y) * w(R_{-theta} y)
    r1 = ct * y1 + st * y2
    r2 = -st * y1 + ct * y2
    return w(y1, y2) * w(r1, r2)


t = tan(theta / 2)
s = tan(pi / 4 - theta / 2)
verts = [
    (d, t * d), (s * d, d), (-t * d, d), (-d, s * d),
    (-d, -t * d), (-s * d, -d), (t * d, -d), (d, -s * d),
]

area = mpf(0)
for i in range(8):
    a = verts[i]
    b = verts[(i + 1) % 8]
    area += a[0] * b[1] - b[0] * a[1]
area /= 2

total = mpf(0)
for i in range(8):
    ax, ay = verts[i]
    bx, by = verts[(i + 1) % 8]
    e1x, e1y = bx - ax, by - ay  # fan from origin: A=(0,0)? no, fan from origin uses A=origin
    # triangle (0,0), (ax,ay), (bx,by); param y = s*A + t*B, s,t>=0, s+t<=1
    jac = abs(ax * by - bx * ay)

    def f(ss, tt, ax=ax, ay=ay, bx=bx, by=by):
        return g(ss * ax + tt * bx, ss * ay + tt * by)

    val = quad(lambda ss: quad(lambda tt: f(ss, tt), [0, 1 - ss]), [0, 1])
    total += val * jac


def brk(x, pad=1e-12):
    xf = float(x)
    lo = math.nextafter(xf - pad, -math.inf)
    hi = math.nextafter(xf + pad, math.inf)
    return f"[{lo.hex()}, {hi.hex()}]  ({mp.nstr(x, 25)})"


print("octagon area  :", brk(area))
print("overlap value :", brk(total))
