#pragma once

#include "c2d4/model.hpp"

namespace c2d4 {

struct RichelotDegenerate : DegenerateError {
    using DegenerateError::DegenerateError;
};

struct RichelotDual {
    Curve curve;
    Curve source;
};

// f g' - g f' for monic quadratics.
Quad wronskian(const Quad& f, const Quad& g);

RichelotDual dual_curve(const Curve& C);

// Squared root differences of the dual quadratics and resultants of their pairs.
struct DualRootData {
    std::array<QuadExt, 3> sq_diff;  // (a_i - b_i)^2 for r^, s^, t^
    std::array<QuadExt, 3> cross;    // Res(s^,t^), Res(r^,t^), Res(r^,s^)
    std::array<QuadExt, 3> l;        // l1, l2, l3 of C
    QuadExt Delta;
};

DualRootData dual_root_differences(const Curve& C);

}  // namespace c2d4
