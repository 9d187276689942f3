#include "c2d4/isotropy.hpp"

#include <set>
#include <sstream>

namespace c2d4 {

namespace {

int parity(F2Vec v) { return __builtin_parityll(v); }

F2Vec full_mask(int n) { return n == 64 ? ~F2Vec(0) : (F2Vec(1) << n) - 1; }

// Echelon basis keyed by leading bit.
struct Echelon {
    std::vector<F2Vec> rows;

    F2Vec reduce(F2Vec v) const
    {
        for (F2Vec r : rows)
            if (v & (F2Vec(1) << (63 - __builtin_clzll(r)))) v ^= r;
        return v;
    }
    bool add(F2Vec v)
    {
        v = reduce(v);
        if (!v) return false;
        rows.push_back(v);
        return true;
    }
};

}  // namespace

F2Mat F2Mat::identity(int n)
{
    F2Mat M{n, std::vector<F2Vec>(n)};
    for (int i = 0; i < n; ++i) M.rows[i] = F2Vec(1) << i;
    return M;
}

F2Vec F2Mat::apply(F2Vec v) const
{
    F2Vec out = 0;
    for (int i = 0; i < n; ++i)
        if (parity(rows[i] & v)) out |= F2Vec(1) << i;
    return out;
}

F2Mat F2Mat::transpose() const
{
    F2Mat T{n, std::vector<F2Vec>(n, 0)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (rows[i] >> j & 1) T.rows[j] |= F2Vec(1) << i;
    return T;
}

F2Mat F2Mat::operator*(const F2Mat& o) const
{
    F2Mat T = o.transpose();
    F2Mat out{n, std::vector<F2Vec>(n, 0)};
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (parity(rows[i] & T.rows[j])) out.rows[i] |= F2Vec(1) << j;
    return out;
}

int rank(std::vector<F2Vec> vs)
{
    Echelon E;
    int r = 0;
    for (F2Vec v : vs) r += E.add(v);
    return r;
}

bool in_span(const std::vector<F2Vec>& basis, F2Vec v)
{
    Echelon E;
    for (F2Vec b : basis) E.add(b);
    return E.reduce(v) == 0;
}

int SymplecticSpaceF2::pairing(F2Vec u, F2Vec v) const { return parity(u & gram.apply(v)); }

void SymplecticSpaceF2::validate() const
{
    if (dim <= 0 || dim % 2 != 0 || dim > 64) throw PreconditionError("dimension must be even and at most 64");
    if (gram.n != dim) throw PreconditionError("Gram matrix has the wrong size");
    for (int i = 0; i < dim; ++i) {
        if (gram.rows[i] & ~full_mask(dim)) throw PreconditionError("Gram matrix has entries outside its columns");
        if (gram.rows[i] >> i & 1) throw PreconditionError("Gram matrix is not alternating (nonzero diagonal)");
    }
    if (!(gram == gram.transpose())) throw PreconditionError("Gram matrix is not symmetric");
    if (rank(gram.rows) != dim) throw PreconditionError("Gram matrix is singular");
    for (size_t k = 0; k < gens.size(); ++k) {
        const F2Mat& g = gens[k];
        if (g.n != dim) throw PreconditionError("generator " + std::to_string(k + 1) + " has the wrong size");
        if (!(g.transpose() * gram * g == gram))
            throw PreconditionError("generator " + std::to_string(k + 1) + " does not preserve the pairing");
    }
}

std::size_t group_order(const SymplecticSpaceF2& S, std::size_t bound)
{
    std::set<F2Mat> seen{F2Mat::identity(S.dim)};
    std::vector<F2Mat> frontier{F2Mat::identity(S.dim)};
    while (!frontier.empty()) {
        std::vector<F2Mat> next;
        for (const F2Mat& x : frontier)
            for (const F2Mat& g : S.gens) {
                F2Mat y = g * x;
                if (seen.insert(y).second) {
                    if (seen.size() > bound) throw ResourceError("group closure exceeds " + std::to_string(bound) + " elements");
                    next.push_back(std::move(y));
                }
            }
        frontier = std::move(next);
    }
    return seen.size();
}

std::vector<F2Vec> invariant_lagrangian(const SymplecticSpaceF2& S)
{
    S.validate();
    std::size_t order = group_order(S);
    if (order & (order - 1)) throw PreconditionError("generated group has order " + std::to_string(order) + ", not a power of 2");
    if (S.dim > 32) throw ResourceError("vector enumeration limited to dimension 32");

    std::vector<F2Vec> W;
    int n = S.dim / 2;
    F2Vec limit = F2Vec(1) << S.dim;
    while (int(W.size()) < n) {
        bool found = false;
        // Numeric order with coordinate 1 least significant is the lexicographic order used here.
        for (F2Vec v = 1; v < limit; ++v) {
            bool orth = true;
            for (F2Vec w : W)
                if (S.pairing(w, v)) {
                    orth = false;
                    break;
                }
            if (!orth || in_span(W, v)) continue;
            bool fixed = true;
            for (const F2Mat& g : S.gens)
                if (!in_span(W, g.apply(v) ^ v)) {
                    fixed = false;
                    break;
                }
            if (!fixed) continue;
            W.push_back(v);
            found = true;
            break;
        }
        if (!found) throw std::logic_error("no fixed vector in the quotient; the group is not a 2-group");
    }
    return W;
}

F2Mat parse_f2_matrix(const std::string& text)
{
    auto ms = parse_f2_matrices(text);
    if (ms.size() != 1) throw PreconditionError("expected exactly one matrix");
    return ms.front();
}

std::vector<F2Mat> parse_f2_matrices(const std::string& text)
{
    std::vector<F2Mat> out;
    std::vector<std::string> rows;
    auto flush = [&] {
        if (rows.empty()) return;
        int n = int(rows.size());
        if (n > 64) throw PreconditionError("matrix larger than 64x64");
        F2Mat M{n, std::vector<F2Vec>(n, 0)};
        for (int i = 0; i < n; ++i) {
            if (int(rows[i].size()) != n) throw PreconditionError("matrix is not square");
            for (int j = 0; j < n; ++j)
                if (rows[i][j] == '1') M.rows[i] |= F2Vec(1) << j;
        }
        out.push_back(M);
        rows.clear();
    };
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string row;
        for (char ch : line) {
            if (ch == '0' || ch == '1') row += ch;
            else if (!std::isspace(static_cast<unsigned char>(ch))) throw PreconditionError(std::string("unexpected character '") + ch + "' in matrix");
        }
        if (row.empty()) flush();
        else rows.push_back(row);
    }
    flush();
    return out;
}

std::string format_f2_vector(F2Vec v, int dim)
{
    std::string s;
    for (int i = 0; i < dim; ++i) s += (v >> i & 1) ? '1' : '0';
    return s;
}

}  // namespace c2d4
