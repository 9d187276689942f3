#pragma once

#include "c2d4/arith.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace c2d4 {

// Monic quadratic x^2 + b x + c.
struct Quad {
    QuadExt b, c;

    QuadExt disc() const { return b * b - 4 * c; }
    QuadExt eval(const QuadExt& x) const { return x * x + b * x + c; }
    Quad conj() const { return {b.conj(), c.conj()}; }
    Quad shifted(const QuadExt& z) const;  // q(x + z)
    bool operator==(const Quad& o) const { return b == o.b && c == o.c; }
};

QuadExt resultant(const Quad& f, const Quad& g);

// y^2 = c r(x) s(x) t(x); s and t conjugate over Q(sqrt m) or both rational.
struct Curve {
    Rat c = 1;
    Int m = 1;
    Quad r, s, t;

    void validate() const;
    QuadExt leading() const { return c; }
};

struct DegenerateError : DomainError {
    using DomainError::DomainError;
};

Curve parse_curve(const std::string& text);
Curve read_curve_file(const std::string& path);
std::string format_curve(const Curve& C);

// Builds a curve from explicit rational roots (a1, b1, a2, b2, a3, b3).
Curve curve_from_roots(const Rat& c, const std::array<Rat, 6>& roots);

Curve center(const Curve& C);

struct InvariantSet {
    // Galois-invariant rationals.
    Rat delta1, xi, eta1, l1sq, l2l3, eta2eta3, d2d3, d2_plus_d3, d2e2_plus_d3e3, dh2e3_plus_dh3e2, dh2dh3, dh1, Delta_sq, l1_over_Delta,
        Delta_sq_dh1;
    bool Delta_zero = false;
    bool P_zero = false;
    std::vector<std::string> P_zero_factors;
    // Individual values on the centered model, in Q(sqrt m).
    QuadExt Delta, l1, l2, l3, eta2, eta3, d2, d3, dh2, dh3;

    bool degenerate() const { return Delta_zero || P_zero; }
};

InvariantSet invariants(const Curve& C);

struct Mat2 {
    Rat a = 1, b = 0, c = 0, d = 1;
    Mat2 operator*(const Mat2& o) const { return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d}; }
    Rat det() const { return a * d - b * c; }
};

// Model whose roots are m(root), with c_m = c * prod(c*root + d).
Curve mobius_transform(const Curve& C, const Mat2& M);
// The one-parameter family [[1, t*delta1], [t, 1]] on a centered curve.
Mat2 shift_matrix(const Curve& centered, const Rat& t);

// Product of the eleven Hilbert symbols; throws DegenerateError when undefined.
int error_term_E(const Curve& C, const Place& v);
int error_term_E(const InvariantSet& I, const Rat& c, const Place& v);

// The individual symbol arguments, in order, for reporting and bad-place search.
std::vector<std::pair<Rat, Rat>> error_term_arguments(const InvariantSet& I, const Rat& c);

}  // namespace c2d4
