#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace c2d4 {

// Vectors over F_2 are bitmasks; bit i is coordinate i + 1.
using F2Vec = std::uint64_t;

// Square matrix over F_2 stored by rows.
struct F2Mat {
    int n = 0;
    std::vector<F2Vec> rows;

    static F2Mat identity(int n);
    F2Vec apply(F2Vec v) const;
    F2Mat operator*(const F2Mat& o) const;
    F2Mat transpose() const;
    bool operator==(const F2Mat& o) const { return n == o.n && rows == o.rows; }
    bool operator<(const F2Mat& o) const { return rows < o.rows; }
};

int rank(std::vector<F2Vec> vs);
bool in_span(const std::vector<F2Vec>& basis, F2Vec v);

struct SymplecticSpaceF2 {
    int dim = 0;  // 2n
    F2Mat gram;
    std::vector<F2Mat> gens;

    int pairing(F2Vec u, F2Vec v) const;
    // Checks the Gram matrix and that every generator preserves it.
    void validate() const;
};

struct PreconditionError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct ResourceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

constexpr std::size_t kClosureBound = std::size_t(1) << 20;

// Order of the generated group; throws ResourceError past the bound.
std::size_t group_order(const SymplecticSpaceF2& S, std::size_t bound = kClosureBound);

// Basis of an invariant Lagrangian subspace built one fixed vector at a time.
std::vector<F2Vec> invariant_lagrangian(const SymplecticSpaceF2& S);

F2Mat parse_f2_matrix(const std::string& text);
std::vector<F2Mat> parse_f2_matrices(const std::string& text);  // blank-line separated
std::string format_f2_vector(F2Vec v, int dim);

}  // namespace c2d4
