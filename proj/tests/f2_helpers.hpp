#pragma once

// Brute-force helpers over F_2 shared by the isotropy tests and the acceptance run.

#include "c2d4/isotropy.hpp"

#include <algorithm>
#include <functional>
#include <random>
#include <set>
#include <vector>

namespace f2 {

using namespace c2d4;


// Standard form: e_i pairs with e_{n+i}.
inline F2Mat standard_gram(int n)
{
    F2Mat J{2 * n, std::vector<F2Vec>(2 * n, 0)};
    for (int i = 0; i < n; ++i) {
        J.rows[i] |= F2Vec(1) << (n + i);
        J.rows[n + i] |= F2Vec(1) << i;
    }
    return J;
}

// Symplectic transvection v -> v + <v, u> u.
inline F2Mat transvection(const F2Mat& J, F2Vec u)
{
    int d = J.n;
    auto pair = [&](F2Vec a, F2Vec b) { return __builtin_popcountll(J.apply(a) & b) & 1; };
    F2Mat M{d, std::vector<F2Vec>(d, 0)};
    for (int j = 0; j < d; ++j) {
        F2Vec e = F2Vec(1) << j;
        F2Vec img = e ^ (pair(e, u) ? u : 0);
        for (int i = 0; i < d; ++i)
            if (img >> i & 1) M.rows[i] |= F2Vec(1) << j;
    }
    return M;
}

// Every invariant isotropic subspace of dimension n, as a sorted element list.
inline std::set<std::vector<F2Vec>> all_isotropic_invariant(const SymplecticSpaceF2& S, int n)
{
    std::set<std::vector<F2Vec>> out;
    const F2Vec N = F2Vec(1) << S.dim;
    std::vector<F2Vec> cur;
    std::function<void(F2Vec)> rec = [&](F2Vec start) {
        if ((int)cur.size() == n) {
            std::vector<F2Vec> span{0};
            for (F2Vec b : cur) {
                size_t k = span.size();
                for (size_t i = 0; i < k; ++i) span.push_back(span[i] ^ b);
            }
            std::sort(span.begin(), span.end());
            for (const F2Mat& g : S.gens)
                for (F2Vec v : span)
                    if (!std::binary_search(span.begin(), span.end(), g.apply(v))) return;
            out.insert(span);
            return;
        }
        for (F2Vec v = start; v < N; ++v) {
            if (in_span(cur, v)) continue;
            bool iso = true;
            for (F2Vec b : cur) iso = iso && S.pairing(b, v) == 0;
            if (!iso) continue;
            cur.push_back(v);
            rec(v + 1);
            cur.pop_back();
        }
    };
    rec(1);
    return out;
}

inline std::vector<F2Vec> span_of(const std::vector<F2Vec>& basis)
{
    std::vector<F2Vec> span{0};
    for (F2Vec b : basis) {
        size_t k = span.size();
        for (size_t i = 0; i < k; ++i) span.push_back(span[i] ^ b);
    }
    std::sort(span.begin(), span.end());
    return span;
}

inline bool is_invariant_lagrangian(const SymplecticSpaceF2& S, const std::vector<F2Vec>& B)
{
    int n = S.dim / 2;
    if (int(B.size()) != n || rank(B) != n) return false;
    for (F2Vec a : B)
        for (F2Vec b : B)
            if (S.pairing(a, b)) return false;
    auto span = span_of(B);
    for (const F2Mat& g : S.gens)
        for (F2Vec v : span)
            if (!std::binary_search(span.begin(), span.end(), g.apply(v))) return false;
    return true;
}

// Symplectic matrices that are unitriangular for the basis e_1..e_n, e_2n..e_n+1: a Sylow 2-subgroup.
inline std::vector<F2Mat> unitriangular_group(const F2Mat& J)
{
    int d = J.n, n = d / 2;
    std::vector<int> order;
    for (int i = 0; i < n; ++i) order.push_back(i);
    for (int i = d - 1; i >= n; --i) order.push_back(i);
    std::vector<std::pair<int, int>> free;  // (k, j) with j < k: b_k may gain b_j
    for (int k = 0; k < d; ++k)
        for (int j = 0; j < k; ++j) free.emplace_back(k, j);
    SymplecticSpaceF2 S{d, J, {}};
    std::vector<F2Mat> out;
    for (std::uint64_t mask = 0; mask < (std::uint64_t(1) << free.size()); ++mask) {
        std::vector<F2Vec> img(d);
        for (int k = 0; k < d; ++k) img[order[k]] = F2Vec(1) << order[k];
        for (size_t f = 0; f < free.size(); ++f)
            if (mask >> f & 1) img[order[free[f].first]] ^= F2Vec(1) << order[free[f].second];
        bool ok = true;
        for (int a = 0; a < d && ok; ++a)
            for (int b = a + 1; b < d && ok; ++b)
                ok = S.pairing(img[a], img[b]) == S.pairing(F2Vec(1) << a, F2Vec(1) << b);
        if (!ok) continue;
        F2Mat M{d, std::vector<F2Vec>(d, 0)};
        for (int j = 0; j < d; ++j)
            for (int i = 0; i < d; ++i)
                if (img[j] >> i & 1) M.rows[i] |= F2Vec(1) << j;
        out.push_back(M);
    }
    return out;
}

// Random elements of a Sylow subgroup conjugated by a random product of transvections.
inline std::vector<F2Mat> random_two_group(std::mt19937_64& g, const F2Mat& J, const std::vector<F2Mat>& sylow, int count)
{
    int d = J.n;
    std::uniform_int_distribution<F2Vec> vec(1, (F2Vec(1) << d) - 1);
    F2Mat conj = F2Mat::identity(d);
    for (int k = 0; k < 6; ++k) conj = conj * transvection(J, vec(g));
    F2Mat inv = conj;
    while (!(inv * conj == F2Mat::identity(d))) inv = inv * conj;
    std::uniform_int_distribution<size_t> pick(0, sylow.size() - 1);
    std::vector<F2Mat> gens;
    for (int c = 0; c < count; ++c) gens.push_back(conj * sylow[pick(g)] * inv);
    return gens;
}

}  // namespace f2
