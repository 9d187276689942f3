#pragma once

#include "c2d4/clusters.hpp"
#include "c2d4/model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace c2d4 {

struct LocalData {
    Place place;
    bool supported = false;
    std::string reason;       // why unsupported
    std::string description;  // reduction type, root arrangement or 2-adic certificate
    int lambda = 1, w = 1, E = 1;
    int mu = 1, muh = 1;
    std::optional<Int> cJ, cJh;  // Tamagawa numbers (odd p) or component counts n_J, n_Jh (real)
    std::optional<Int> kernel;   // |J(R)°[phi]| at the real place
    bool e_asserted = false;     // odd p: table E checked on a side-condition model
    int e_table = 1;
    std::vector<std::string> issues;  // internal inconsistencies

    bool verdict() const { return lambda * w == E; }
};

// Real roots in increasing order, labelled by root index (a1 b1 a2 b2 a3 b3).
struct RealArrangement {
    std::vector<int> order;
    std::vector<int> component;  // component index of each entry of order
    int components = 0;
    int sign_c = 1;
    std::array<bool, 3> conjugate_pair{};  // pair i is a complex-conjugate pair
    std::array<bool, 3> real_point{};      // [(a_i,0),(b_i,0)] is a real point
    std::array<bool, 3> identity_component{};
    std::string notation() const;
};

RealArrangement real_arrangement(const Curve& C);

LocalData local_real(const Curve& C);
LocalData local_odd(const Curve& C, const Int& p);

// 2-adic certification paths.
bool in_family_F(const Curve& C);
struct OrdinaryWitness {
    Curve model;
    std::string description;
    bool unit_conditions = false;  // the three normalised invariants are units, so E = 1 is expected
};
// Searches the shifted models for a good ordinary one, preferring unit invariants.
std::optional<OrdinaryWitness> detect_good_ordinary_2adic(const Curve& C);
LocalData local_2adic(const Curve& C);

LocalData local_data(const Curve& C, const Place& v);

}  // namespace c2d4
