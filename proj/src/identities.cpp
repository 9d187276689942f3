#include "c2d4/identities.hpp"

#include "c2d4/richelot.hpp"

namespace c2d4 {

std::vector<IdentityCheck> discriminant_identities(const Curve& C)
{
    InvariantSet I = invariants(C);
    const Curve H = dual_curve(C).curve;
    const QuadExt l1 = C.t.b - C.s.b, l2 = C.r.b - C.t.b, l3 = C.r.b - C.s.b;
    const QuadExt c2 = QuadExt(C.c * C.c), D2 = QuadExt(I.Delta_sq);
    return {
        {"l1^2 disc(r^) = 4 Res(s,t)", l1 * l1 * H.r.disc() == 4 * resultant(C.s, C.t)},
        {"l2^2 disc(s^) = 4 Res(t,r)", l2 * l2 * H.s.disc() == 4 * resultant(C.t, C.r)},
        {"l3^2 disc(t^) = 4 Res(s,r)", l3 * l3 * H.t.disc() == 4 * resultant(C.s, C.r)},
        {"disc(r) = c^2 l2^2 l3^2 Res(s^,t^) / Delta^2", C.r.disc() * D2 == c2 * l2 * l2 * l3 * l3 * resultant(H.s, H.t)},
        {"disc(s) = c^2 l1^2 l3^2 Res(t^,r^) / Delta^2", C.s.disc() * D2 == c2 * l1 * l1 * l3 * l3 * resultant(H.t, H.r)},
        {"disc(t) = c^2 l1^2 l2^2 Res(r^,s^) / Delta^2", C.t.disc() * D2 == c2 * l1 * l1 * l2 * l2 * resultant(H.r, H.s)},
        {"Delta(C^) = -2 Delta(C) / c^2", invariants(H).Delta * c2 == -2 * I.Delta},
    };
}

std::vector<IdentityCheck> invariant_identities(const Rat& c, const std::array<Rat, 6>& roots)
{
    InvariantSet I = invariants(curve_from_roots(c, roots));
    Rat h = (roots[0] + roots[1]) / 2;
    std::array<Rat, 6> x;
    for (int i = 0; i < 6; ++i) x[i] = roots[i] - h;
    const Rat a1 = x[0], a2 = x[2], b2 = x[3], a3 = x[4], b3 = x[5];
    auto q = [](const QuadExt& v) { return v.to_rational(); };
    const Rat D = q(I.Delta), l1 = q(I.l1), e1 = I.eta1, e2 = q(I.eta2), e3 = q(I.eta3);
    const Rat d1 = I.delta1, d2 = q(I.d2), d3 = q(I.d3), h1 = I.dh1, h2 = q(I.dh2), h3 = q(I.dh3), xi = I.xi;
    const Rat z = (a2 - b2 - a3 + b3) * (a2 - b2 + a3 - b3) / (2 * l1);
    const Rat xp = 2 * (a2 + a1) * (b2 + a1) * (a3 + a1) * (b3 + a1);
    const Rat xm = 2 * (a2 - a1) * (b2 - a1) * (a3 - a1) * (b3 - a1);
    const Rat w = (xp - xm) / a1;
    const Rat u = (d2 * e2 - d3 * e3) / l1, v = (h2 * e3 - h3 * e2) / l1;
    const Rat s = (d2 + d3) / 2, k = a2 * b2 - a3 * b3;
    return {
        {"((d2+d3)/2)^2 = d2 d3 + l1^2 z^2", s * s == d2 * d3 + l1 * l1 * z * z},
        {"eta1^2 = 4 Delta^2 dh1 + d2 d3", e1 * e1 == 4 * D * D * h1 + d2 * d3},
        {"xi^2 = dh2 dh3 + d1 ((xi_p - xi_m)/a1)^2", xi * xi == h2 * h3 + d1 * w * w},
        {"eta2^2 = dh3 + d2 (a2+b2)^2", e2 * e2 == h3 + d2 * (a2 + b2) * (a2 + b2)},
        {"eta3^2 = dh2 + d3 (a3+b3)^2", e3 * e3 == h2 + d3 * (a3 + b3) * (a3 + b3)},
        {"(d2 eta2 + d3 eta3)^2 = 4 eta2 eta3 d2 d3 + l1^2 u^2", (d2 * e2 + d3 * e3) * (d2 * e2 + d3 * e3) == 4 * e2 * e3 * d2 * d3 + l1 * l1 * u * u},
        {"(dh2 eta3 + dh3 eta2)^2 = 4 eta2 eta3 dh2 dh3 + l1^2 v^2", (h2 * e3 + h3 * e2) * (h2 * e3 + h3 * e2) == 4 * e2 * e3 * h2 * h3 + l1 * l1 * v * v},
        {"-Delta l1 / c = Delta^2 dh1 + l1^2 d1 - (a2 b2 - a3 b3)^2", -D * l1 / c == D * D * h1 + l1 * l1 * d1 - k * k},
    };
}

bool hilbert_sum_identity(const Rat& A, const Rat& B, const Place& v)
{
    return hilbert_symbol(A + B, -A * B, v) == hilbert_symbol(A, B, v);
}

}  // namespace c2d4
