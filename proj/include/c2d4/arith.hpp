#pragma once

#include <gmpxx.h>

#include <compare>
#include <stdexcept>
#include <string>
#include <vector>

namespace c2d4 {

using Int = mpz_class;
using Rat = mpq_class;

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// Raised when a bug-level consistency check fails.
struct InternalError : std::logic_error {
    using std::logic_error::logic_error;
};

Rat parse_rational(const std::string& text);
std::string str(const Rat& x);
std::string str(const Int& x);

// p-adic valuation of a nonzero integer or rational.
long vp(const Int& x, const Int& p);
long vp(const Rat& x, const Int& p);

bool is_prime(const Int& n);
bool is_squarefree(const Int& n);
bool is_square(const Rat& x);
// Distinct prime factors of |n|, sorted.
std::vector<Int> prime_factors(const Int& n);
int legendre(const Int& a, const Int& p);
Int sqrt_mod_prime(const Int& a, const Int& p);

struct Place {
    bool real = true;
    Int p = 0;

    static Place inf() { return {}; }
    static Place prime(const Int& q);
    std::string name() const;
    bool operator==(const Place& o) const { return real == o.real && p == o.p; }
    bool operator<(const Place& o) const;
};

int hilbert_symbol(const Rat& a, const Rat& b, const Place& v);
// Product of (a,b)_v over every place where it can be nontrivial.
int hilbert_product_check(const Rat& a, const Rat& b);

enum class SquareClass { Square, UnramifiedNonSquare, Uniformizer, OtherNonSquare };
std::string str(SquareClass c);
SquareClass square_class(const Rat& x, const Place& v);
inline bool is_local_square(const Rat& x, const Place& v) { return square_class(x, v) == SquareClass::Square; }

// a + b*sqrt(m) with m squarefree; m = 1 is the rational case and keeps b = 0.
struct QuadExt {
    Rat a = 0, b = 0;
    Int m = 1;

    QuadExt() = default;
    QuadExt(const Rat& x) : a(x) {}
    QuadExt(int x) : a(x) {}
    QuadExt(const Rat& x, const Rat& y, const Int& mm);

    bool is_rational() const { return b == 0; }
    bool is_zero() const { return a == 0 && b == 0; }
    QuadExt conj() const;
    Rat norm() const { return a * a - b * b * m; }
    Rat trace() const { return 2 * a; }
    Rat to_rational() const;  // throws InternalError unless rational

    QuadExt operator-() const;
    friend QuadExt operator+(const QuadExt& x, const QuadExt& y);
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y);
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y);
    friend QuadExt operator/(const QuadExt& x, const QuadExt& y);
    QuadExt& operator+=(const QuadExt& y) { return *this = *this + y; }
    QuadExt& operator-=(const QuadExt& y) { return *this = *this - y; }
    QuadExt& operator*=(const QuadExt& y) { return *this = *this * y; }
    bool operator==(const QuadExt& y) const;
    bool operator!=(const QuadExt& y) const { return !(*this == y); }
};

std::string str(const QuadExt& x);
Int common_m(const QuadExt& x, const QuadExt& y);
QuadExt pow(const QuadExt& x, unsigned k);
// Sign of the real number x under sqrt(m) > 0; requires m > 0 or b = 0.
int real_sign(const QuadExt& x);

}  // namespace c2d4
