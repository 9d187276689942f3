#include "c2d4/richelot.hpp"

namespace c2d4 {

Quad wronskian(const Quad& f, const Quad& g)
{
    // Leading coefficient b_f - b_g; the caller divides it out.
    return {2 * (f.c - g.c), f.c * g.b - g.c * f.b};
}

namespace {

Quad monic(const Quad& f, const Quad& g, const QuadExt& lead)
{
    Quad w = wronskian(f, g);
    if (f.b - g.b != lead) throw InternalError("unexpected leading coefficient in dual quadratic");
    return {w.b / lead, w.c / lead};
}

}  // namespace

RichelotDual dual_curve(const Curve& C)
{
    InvariantSet I = invariants(C);
    if (I.Delta_zero) throw RichelotDegenerate("Delta = 0: Richelot dual undefined");
    const QuadExt l1 = C.t.b - C.s.b, l2 = C.r.b - C.t.b, l3 = C.r.b - C.s.b;
    if (l1.is_zero() || l2.is_zero() || l3.is_zero()) throw RichelotDegenerate("some l_i = 0: Richelot dual not supported");
    RichelotDual D;
    D.source = C;
    D.curve.m = C.m;
    D.curve.r = monic(C.t, C.s, l1);
    D.curve.s = monic(C.r, C.t, l2);
    D.curve.t = monic(C.r, C.s, l3);
    D.curve.c = (l1 * l2 * l3 * I.Delta).to_rational() / I.Delta_sq;
    D.curve.validate();
    return D;
}

DualRootData dual_root_differences(const Curve& C)
{
    RichelotDual D = dual_curve(C);
    const Curve& H = D.curve;
    DualRootData out;
    out.sq_diff = {H.r.disc(), H.s.disc(), H.t.disc()};
    out.cross = {resultant(H.s, H.t), resultant(H.r, H.t), resultant(H.r, H.s)};
    out.l = {C.t.b - C.s.b, C.r.b - C.t.b, C.r.b - C.s.b};
    out.Delta = invariants(C).Delta;
    return out;
}

}  // namespace c2d4
