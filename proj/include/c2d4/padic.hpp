#pragma once

#include "c2d4/arith.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace c2d4 {

// Requests a retry at higher working precision.
struct PrecisionError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// u * p^v known modulo p^prec; u == 0 means "zero to this precision".
struct Padic {
    Int u = 0;
    long v = 0;
    long prec = 0;
    bool zero() const { return u == 0; }
};

constexpr long kExact = 1L << 40;

// Q_p with a chain of adjoined square roots. Elements of the level-k field are
// vectors of 2^k base coordinates: x = x0 + x1*sqrt(theta_k), recursively.
class Tower {
public:
    using Elem = std::vector<Padic>;

    Tower(const Int& p, long precision);

    const Int& p() const { return p_; }
    long precision() const { return N_; }
    int levels() const { return static_cast<int>(levels_.size()); }
    size_t top_size() const { return size_t(1) << levels_.size(); }
    bool ramified(int j) const { return levels_[j - 1].ramified; }
    long ram_index(int k) const;
    long ram_index() const { return ram_index(levels()); }
    const Elem& theta(int j) const { return levels_[j - 1].theta; }

    Elem from_rat(const Rat& x) const;
    Elem zero() const { return Elem{zero_padic()}; }
    Elem one() const { return from_rat(1); }
    Elem gen(int j) const;
    Elem uniformizer(int k) const;
    Elem lift(const Elem& x, size_t size) const;
    Elem lift(const Elem& x) const { return lift(x, top_size()); }

    Elem add(const Elem& x, const Elem& y) const;
    Elem sub(const Elem& x, const Elem& y) const;
    Elem neg(const Elem& x) const;
    Elem mul(const Elem& x, const Elem& y) const;
    Elem inv(const Elem& x) const;
    Elem div(const Elem& x, const Elem& y) const { return mul(x, inv(y)); }
    Elem pow(const Elem& x, long k) const;
    Elem pow(const Elem& x, const Int& k) const;

    // Exact valuation, normalised so v(p) = 1.
    Rat val(const Elem& x) const;
    std::pair<Rat, bool> val_bound(const Elem& x) const;
    bool indistinguishable_from_zero(const Elem& x) const { return !val_bound(x).second; }

    bool is_square(const Elem& x) const;
    std::optional<Elem> sqrt(const Elem& x) const;
    // Square root in the top field, adjoining a new level when needed.
    Elem sqrt_or_adjoin(const Elem& x);

    Padic base(const Elem& x) const { return x[0]; }
    Padic padic(const Rat& x) const;
    // Truncation of a base element to a rational of the form a*p^v.
    Rat truncate(const Padic& x, long digits) const;
    int level_of(const Elem& x) const;

private:
    struct Level {
        Elem theta;
        bool ramified;
    };

    Int p_;
    long N_;
    std::vector<Level> levels_;
    mutable std::vector<Int> pw_;

    const Int& pw(long k) const;
    Padic zero_padic(long prec = kExact) const { return Padic{0, prec, prec}; }
    Padic norm(Int u, long v, long prec) const;
    Padic padd(const Padic& x, const Padic& y) const;
    Padic pneg(const Padic& x) const;
    Padic pmul(const Padic& x, const Padic& y) const;
    Padic pinv(const Padic& x) const;
    std::optional<Padic> psqrt_unit(const Padic& x) const;

    Elem mul_at(const Elem& x, const Elem& y, int k) const;
    Elem inv_at(const Elem& x, int k) const;
    Elem norm_at(const Elem& x, int k) const;
    std::pair<Rat, bool> val_at(const Elem& x, int k) const;
    bool unit_square_at(const Elem& u, int k) const;
    bool is_square_at(const Elem& x, int k) const;
    std::optional<Elem> sqrt_at(const Elem& x, int k) const;
    std::optional<Elem> sqrt_unit_at(const Elem& u, int k) const;
    Elem scale_by_uniformizer(const Elem& x, int k, long n) const;
    void canonicalize(Elem& x) const;
};

// Runs f(N) for N = start, 2*start, ... until it stops raising PrecisionError.
template <class F>
auto with_precision(long start, long cap, F&& f) -> decltype(f(start))
{
    for (long N = start;; N *= 2) {
        try {
            return f(N);
        } catch (const PrecisionError& e) {
            if (N * 2 > cap) throw PrecisionError(std::string("precision cap reached: ") + e.what());
        }
    }
}

long default_precision();
long precision_cap();
void set_default_precision(long n);

}  // namespace c2d4
