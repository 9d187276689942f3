#pragma once

#include "c2d4/model.hpp"

#include <array>
#include <string>
#include <vector>

namespace c2d4 {

struct IdentityCheck {
    std::string name;
    bool holds = false;
};

// Discriminants of C and of its Richelot dual against resultants of the other factors, and Delta of the dual.
std::vector<IdentityCheck> discriminant_identities(const Curve& C);

// Polynomial identities among the invariants for a curve with rational roots (a1 b1 a2 b2 a3 b3).
std::vector<IdentityCheck> invariant_identities(const Rat& c, const std::array<Rat, 6>& roots);

// (A + B, -AB) = (A, B) at v, for A, B, A + B nonzero.
bool hilbert_sum_identity(const Rat& A, const Rat& B, const Place& v);

}  // namespace c2d4
