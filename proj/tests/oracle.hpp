#pragma once

// Brute-force reference computations, independent of the library's derivations.

#include "c2d4/model.hpp"

#include <array>
#include <map>
#include <random>
#include <tuple>
#include <vector>

namespace oracle {

using c2d4::Int;
using c2d4::Rat;

inline Rat R(long a, long b = 1)
{
    Rat x(a, b);
    x.canonicalize();
    return x;
}

// Invariants evaluated on the centered roots a1 b1 a2 b2 a3 b3.
struct RootInvariants {
    Rat Delta, l1, l2, l3, d1, d2, d3, e1, e2, e3, xi, dh1, dh2, dh3;
};

inline RootInvariants root_invariants(const Rat& c, std::array<Rat, 6> x)
{
    Rat z = (x[0] + x[1]) / 2;
    for (auto& r : x) r -= z;
    const Rat &a1 = x[0], &a2 = x[2], &b2 = x[3], &a3 = x[4], &b3 = x[5];
    RootInvariants I;
    I.Delta = c * (-a1 * a1 * (a2 + b2 - a3 - b3) + a2 * b2 * (a3 + b3) - a3 * b3 * (a2 + b2));
    I.l1 = a2 + b2 - a3 - b3;
    I.l2 = a3 + b3;
    I.l3 = a2 + b2;
    I.d1 = a1 * a1;
    I.d2 = (a2 - b2) * (a2 - b2);
    I.d3 = (a3 - b3) * (a3 - b3);
    I.e1 = (a2 - a3) * (b2 - b3) + (b2 - a3) * (a2 - b3);
    I.e2 = (a2 - a1) * (a2 + a1) + (b2 - a1) * (b2 + a1);
    I.e3 = (a3 - a1) * (a3 + a1) + (b3 - a1) * (b3 + a1);
    I.xi = 2 * ((a2 + a1) * (b2 + a1) * (a3 + a1) * (b3 + a1) + (a2 - a1) * (b2 - a1) * (a3 - a1) * (b3 - a1));
    if (I.Delta != 0) I.dh1 = (a2 - b3) * (a2 - a3) * (b2 - a3) * (b2 - b3) / (I.Delta * I.Delta);
    I.dh2 = 4 * (a3 + a1) * (a3 - a1) * (b3 + a1) * (b3 - a1);
    I.dh3 = 4 * (a2 + a1) * (a2 - a1) * (b2 + a1) * (b2 - a1);
    return I;
}

// ---- Hilbert symbol by searching for primitive solutions of z^2 = a x^2 + b y^2 ----

inline int real_hilbert(const Rat& a, const Rat& b) { return (a < 0 && b < 0) ? -1 : 1; }

// Strips even powers of p and reduces the unit part mod p^k.
inline long reduce(const Rat& x, long p, long k, long& pk)
{
    Int n = x.get_num() * x.get_den();
    long v = 0;
    while (n % p == 0) n /= p, ++v;
    pk = 1;
    for (long i = 0; i < k; ++i) pk *= p;
    Int r = n % pk;
    if (r < 0) r += pk;
    long u = r.get_si();
    return (v % 2 ? p * u : u) % pk;
}

// k = 3 suffices for odd p and k = 7 for p = 2 on square-class representatives.
inline int brute_hilbert(const Rat& A, const Rat& B, long p, long k = -1)
{
    if (k < 0) k = p == 2 ? 7 : 3;
    long q = 0;
    long a = reduce(A, p, k, q), b = reduce(B, p, k, q);
    static std::map<std::tuple<long, long, long, long>, int> cache;
    auto key = std::make_tuple(p, k, std::min(a, b), std::max(a, b));
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    std::vector<char> sq_any(q, 0), sq_unit(q, 0);
    for (long z = 0; z < q; ++z) {
        long s = z * z % q;
        sq_any[s] = 1;
        if (z % p) sq_unit[s] = 1;
    }
    int res = -1;
    for (long x = 0; x < q && res < 0; ++x)
        for (long y = 0; y < q; ++y) {
            long val = (a * (x * x % q) + b * (y * y % q)) % q;
            bool prim = x % p || y % p;
            if (prim ? sq_any[val] : sq_unit[val]) {
                res = 1;
                break;
            }
        }
    cache[key] = res;
    return res;
}

// ---- random curves ----

inline Rat rand_rat(std::mt19937_64& g, int num, int den)
{
    std::uniform_int_distribution<int> n(-num, num), d(1, den);
    return R(n(g), d(g));
}

// Random curve with six rational roots, returned with its roots; skips degenerate draws.
inline c2d4::Curve random_split_curve(std::mt19937_64& g, std::array<Rat, 6>& roots, int height = 12, int den = 3)
{
    std::uniform_int_distribution<int> cc(-8, 8);
    for (;;) {
        for (auto& x : roots) x = rand_rat(g, height, den);
        Rat c = cc(g);
        if (c == 0) continue;
        try {
            c2d4::Curve C = c2d4::curve_from_roots(c, roots);
            if (c2d4::invariants(C).degenerate()) continue;
            return C;
        } catch (const c2d4::DomainError&) {
        }
    }
}

// Random curve with r rational and s, t conjugate over Q(sqrt m), or all three rational when m = 1.
inline c2d4::Curve random_curve(std::mt19937_64& g, int height = 9)
{
    static const long ms[] = {1, -1, 2, -3, 5, 7, -2, 13};
    std::uniform_int_distribution<int> pick(0, 7), cc(-8, 8);
    for (;;) {
        long m = ms[pick(g)];
        c2d4::Curve C;
        C.c = cc(g);
        if (C.c == 0) continue;
        C.m = m;
        C.r = {rand_rat(g, height, 2), rand_rat(g, height, 2)};
        if (m == 1) {
            C.s = {rand_rat(g, height, 2), rand_rat(g, height, 2)};
            C.t = {rand_rat(g, height, 2), rand_rat(g, height, 2)};
        } else {
            c2d4::QuadExt b(rand_rat(g, height, 2), rand_rat(g, 3, 1), m), c(rand_rat(g, height, 2), rand_rat(g, 3, 1), m);
            if (b.is_rational() && c.is_rational()) continue;
            C.s = {b, c};
            C.t = C.s.conj();
        }
        try {
            C.validate();
            if (c2d4::invariants(C).degenerate()) continue;
            return C;
        } catch (const c2d4::DomainError&) {
        }
    }
}

// Three twins of 2-adic depth 2 whose centres a, a + b + w, a + b + w^2 are pairwise 2-adic units apart
// (w a primitive cube root of unity), with leading coefficient 1 mod 4: good ordinary reduction at 2.
inline c2d4::Curve good_ordinary_at_2(std::mt19937_64& g)
{
    std::uniform_int_distribution<int> n(-20, 20), odd(-10, 10), cs(-5, 5);
    for (;;) {
        Rat a = n(g), b = n(g), u1 = 2 * odd(g) + 1, u2 = 2 * odd(g) + 1;
        c2d4::QuadExt sigma(a + b - R(1, 2), R(1, 2), -3);
        c2d4::Curve C;
        C.c = 4 * cs(g) + 1;
        C.m = -3;
        C.r = {Rat(-(2 * a + 4 * u1)), Rat(a * (a + 4 * u1))};
        C.s = {-(sigma * 2 + c2d4::QuadExt(Rat(4 * u2))), sigma * (sigma + c2d4::QuadExt(Rat(4 * u2)))};
        C.t = C.s.conj();
        try {
            C.validate();
            if (c2d4::invariants(C).degenerate()) continue;
            return C;
        } catch (const c2d4::DomainError&) {
        }
    }
}

}  // namespace oracle
