#pragma once

#include "c2d4/model.hpp"
#include "c2d4/padic.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace c2d4 {

// Roots are indexed a1 b1 a2 b2 a3 b3; colour(i) = i / 2 (ruby, sapphire, turquoise).
inline int colour(int i) { return i / 2; }
std::string root_name(int i);

using Dist = std::array<std::array<Rat, 6>, 6>;
using Perm = std::array<int, 6>;

struct Cluster {
    unsigned mask = 0;
    Rat depth, rel_depth;
    int parent = -1;
    int size() const { return __builtin_popcount(mask); }
};

struct TwinSign {
    unsigned mask = 0;
    unsigned partner = 0;  // Frobenius image; equals mask when fixed
    int sign = 1;          // joint sign of the pair when swapped
};

struct ClusterPicture {
    Int p;
    Dist dist;
    std::vector<Cluster> clusters;  // size >= 2, largest first; clusters[0] is the whole root set
    Perm frob{};
    std::vector<Perm> inertia;
    long ram_index = 1;
    std::vector<TwinSign> signs;  // filled for semistable balanced pictures

    int find(unsigned mask) const;
    unsigned image(const Perm& g, unsigned mask) const;
    unsigned frob_image(unsigned mask) const { return image(frob, mask); }
    const Cluster& top() const { return clusters.front(); }
    std::string notation() const;
};

std::vector<Cluster> clusters_from(const Dist& d);
bool shape_balanced(const std::vector<Cluster>& cl);
bool is_balanced(const ClusterPicture& pic);

ClusterPicture cluster_picture(const Curve& C, const Int& p);

struct Semistability {
    bool ok = true;
    std::string diagnostic;
};

Semistability is_semistable(const Curve& C, const Int& p);
Semistability is_semistable(const ClusterPicture& pic, const Rat& c);

struct Rebalanced {
    Curve curve;  // centered, balanced
    Mat2 transform;
    ClusterPicture picture;
    int candidates_tried = 0;
};

// Throws UnsupportedError when the bounded search fails.
Rebalanced rebalance(const Curve& C, const Int& p);

struct UnsupportedError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<TwinSign> twin_signs(const Curve& balanced, const Int& p);
// Sign of a given twin (joint sign when Frobenius swaps it).
int twin_sign(const Curve& balanced, const Int& p, unsigned twin);

enum class Case { Two_a, Two_d, OxO_a, OxO_b, OxO_c, In, I2n, OxIn, Inm_a, InxIm, Inn_a, InxtIn, Inm_b, Inn_b, U, Unnl };

struct ReductionType {
    Case kind = Case::Two_a;
    char sub = 'a';        // (a)/(b) for In, (c)/(d) for I2n
    bool swapped = false;  // tilde variants of the product types
    int n = 0, m = 0, l = 0, t = 0, r = 0;
    int eps = 0, delta = 0;

    std::string label() const;
};

ReductionType classify_type(const ClusterPicture& pic, const InvariantSet& I, const Rat& c);

struct LocalTableRow {
    Int cJ, cJh;
    int mu = 1, muh = 1, lambda = 1, w = 1, E = 1;
};

LocalTableRow local_table_row(const ReductionType& T);
// Root number from the Frobenius eigenvalues on the toric part.
int root_number_from_eigenvalues(const ClusterPicture& pic, const Rat& c);
// Multiset of those eigenvalues, e.g. "", "+", "+-", "i-i".
std::string eigenvalue_class(const ClusterPicture& pic, const Rat& c);

enum class SideCondition { None, UnitsAll, UnitsL, L1EqualsT, TwinB };
SideCondition side_condition(const ReductionType& T);

struct OddClassification {
    Rebalanced balanced;
    ReductionType type;
    LocalTableRow row;
    int w_eigen = 1;
    std::string eigen_class;
    bool via_dual = false;  // type and row read from the dual curve
    bool e_asserted = false;
    int e_side = 1;         // E on the side-condition model when asserted
    std::string e_model;    // description of that model
};

OddClassification classify_at(const Curve& C, const Int& p);

// Valuation at p of an element of Q(sqrt m), using the embedding fixed by the curve's tower.
Rat valuation_at(const Curve& C, const Int& p, const QuadExt& x);

}  // namespace c2d4
