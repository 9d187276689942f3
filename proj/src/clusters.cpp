#include "c2d4/clusters.hpp"
#include "c2d4/richelot.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>
#include <sstream>

namespace c2d4 {

namespace {

using Elem = Tower::Elem;

int sgn(long k) { return (k % 2 == 0) ? 1 : -1; }
long tilde(long x) { return x % 2 == 0 ? 2 : 1; }

bool is_int(const Rat& x) { return x.get_den() == 1; }

Rat frac(long a, long b)
{
    Rat r(a, b);
    r.canonicalize();
    return r;
}

long to_long(const Rat& x, const char* what)
{
    if (!is_int(x)) throw UnsupportedError(std::string(what) + " is not an integer: " + str(x));
    return x.get_num().get_si();
}

Rat floor_rat(const Rat& x)
{
    Int q;
    mpz_fdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rat(q);
}

Rat ceil_rat(const Rat& x)
{
    Int q;
    mpz_cdiv_q(q.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
    return Rat(q);
}

Rat ppow(const Int& p, long k)
{
    Int a;
    mpz_pow_ui(a.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(k < 0 ? -k : k));
    return k < 0 ? Rat(1) / Rat(a) : Rat(a);
}

// Rational congruent to x modulo p^A.
Rat truncate_abs(const Tower& T, const Padic& x, long A)
{
    if (x.zero()) {
        if (x.prec < A) throw PrecisionError("truncation beyond known digits");
        return 0;
    }
    if (x.v >= A) return 0;
    if (x.prec < A) throw PrecisionError("truncation beyond known digits");
    return T.truncate(x, A - x.v);
}

// Coefficient of p^j in the expansion of x.
long digit_at(const Tower& T, const Padic& x, long j)
{
    if (x.zero() || x.v > j) return 0;
    if (x.prec <= j) throw PrecisionError("digit beyond known precision");
    Int q, r;
    Int pk;
    mpz_pow_ui(pk.get_mpz_t(), T.p().get_mpz_t(), static_cast<unsigned long>(j - x.v));
    mpz_fdiv_q(q.get_mpz_t(), x.u.get_mpz_t(), pk.get_mpz_t());
    mpz_fdiv_r(r.get_mpz_t(), q.get_mpz_t(), T.p().get_mpz_t());
    return r.get_si();
}

struct Analysis {
    Tower T;
    bool has_sqm = false;
    Elem sqm;
    std::array<Elem, 6> roots;
    std::vector<std::vector<Elem>> auts;
    std::vector<Perm> perms;
    std::vector<bool> inertia;
    int frob = -1;

    Analysis(const Int& p, long N) : T(p, N) {}

    Elem embed(const QuadExt& x)
    {
        Elem r = T.from_rat(x.a);
        if (x.b == 0) return r;
        if (!has_sqm) {
            sqm = T.sqrt_or_adjoin(T.from_rat(Rat(x.m)));
            has_sqm = true;
        }
        return T.add(r, T.mul(T.from_rat(x.b), sqm));
    }

    Elem apply(const std::vector<Elem>& img, const Elem& x) const
    {
        int k = T.level_of(x);
        if (k == 0) return x;
        size_t h = x.size() / 2;
        Elem x0(x.begin(), x.begin() + h), x1(x.begin() + h, x.end());
        return T.add(apply(img, x0), T.mul(apply(img, x1), img[k - 1]));
    }
};

void find_roots(Analysis& A, const Curve& C)
{
    const Quad* q[3] = {&C.r, &C.s, &C.t};
    Elem B[3], Cc[3];
    for (int i = 0; i < 3; ++i) {
        B[i] = A.embed(q[i]->b);
        Cc[i] = A.embed(q[i]->c);
    }
    Elem half = A.T.from_rat(Rat(1, 2));
    for (int i = 0; i < 3; ++i) {
        Elem D = A.T.sub(A.T.mul(B[i], B[i]), A.T.mul(A.T.from_rat(4), Cc[i]));
        Elem sd = A.T.sqrt_or_adjoin(D);
        Elem nb = A.T.neg(B[i]);
        A.roots[2 * i] = A.T.mul(A.T.add(nb, sd), half);
        A.roots[2 * i + 1] = A.T.mul(A.T.sub(nb, sd), half);
    }
    for (auto& r : A.roots) r = A.T.lift(r);
}

void find_automorphisms(Analysis& A)
{
    const Tower& T = A.T;
    int L = T.levels();
    std::vector<Elem> img;
    std::function<void(int)> rec = [&](int j) {
        if (j > L) {
            A.auts.push_back(img);
            return;
        }
        Elem th = A.apply(img, T.theta(j));
        auto s = T.sqrt(T.lift(th));
        if (!s) return;
        img.push_back(*s);
        rec(j + 1);
        img.back() = T.neg(*s);
        rec(j + 1);
        img.pop_back();
    };
    rec(1);
    if (A.auts.size() != T.top_size()) throw PrecisionError("automorphism enumeration incomplete");

    for (const auto& g : A.auts) {
        Perm P{};
        for (int i = 0; i < 6; ++i) {
            Elem y = A.apply(g, A.roots[i]);
            int best = -1;
            Rat bv, second = -Rat(1000000);
            bool best_inexact = false;
            for (int j = 0; j < 6; ++j) {
                auto [v, exact] = T.val_bound(T.sub(y, A.roots[j]));
                if (!exact) {
                    if (best_inexact) throw PrecisionError("root image ambiguous");
                    if (best >= 0) second = std::max(second, bv);
                    best = j;
                    bv = v;
                    best_inexact = true;
                    continue;
                }
                if (best < 0) {
                    best = j;
                    bv = v;
                } else if (!best_inexact && v > bv) {
                    second = std::max(second, bv);
                    best = j;
                    bv = v;
                } else {
                    second = std::max(second, v);
                }
            }
            if (!best_inexact && second >= bv) throw PrecisionError("root image ambiguous");
            P[i] = best;
        }
        A.perms.push_back(P);

        bool in = true, fr = true;
        for (int j = 1; j <= L; ++j) {
            if (T.ramified(j)) continue;
            Elem gj = T.lift(T.gen(j));
            auto [vi, ei] = T.val_bound(T.sub(g[j - 1], gj));
            if (ei && vi <= 0) in = false;
            auto [vf, ef] = T.val_bound(T.sub(g[j - 1], T.pow(gj, T.p())));
            if (ef && vf <= 0) fr = false;
        }
        A.inertia.push_back(in);
        if (fr && A.frob < 0) A.frob = static_cast<int>(A.perms.size()) - 1;
    }
    if (A.frob < 0) throw PrecisionError("no Frobenius element identified");
}

Analysis analyze(const Curve& C, const Int& p, long N)
{
    if (p == 2) throw DomainError("cluster pictures at p = 2 are not supported");
    Analysis A(p, N);
    find_roots(A, C);
    find_automorphisms(A);
    return A;
}

Dist distances(const Analysis& A, const std::array<Elem, 6>& roots)
{
    Dist d;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) d[i][j] = d[j][i] = A.T.val(A.T.sub(roots[i], roots[j]));
    return d;
}

ClusterPicture make_picture(const Analysis& A)
{
    ClusterPicture pic;
    pic.p = A.T.p();
    pic.dist = distances(A, A.roots);
    pic.clusters = clusters_from(pic.dist);
    pic.frob = A.perms[A.frob];
    for (size_t k = 0; k < A.perms.size(); ++k)
        if (A.inertia[k]) pic.inertia.push_back(A.perms[k]);
    pic.ram_index = A.T.ram_index();
    return pic;
}

Elem theta_sq(const Analysis& A, const Rat& c, unsigned mask)
{
    const Tower& T = A.T;
    int i = __builtin_ctz(mask);
    int j = 31 - __builtin_clz(mask);
    Elem mid = T.mul(T.add(A.roots[i], A.roots[j]), T.from_rat(Rat(1, 2)));
    Elem x = T.lift(T.from_rat(c));
    for (int k = 0; k < 6; ++k)
        if (!(mask >> k & 1)) x = T.mul(x, T.sub(mid, A.roots[k]));
    return x;
}

int base_square_sign(const Tower& T, const Padic& x)
{
    if (x.zero()) throw PrecisionError("theta^2 indistinguishable from zero");
    if (x.v % 2 != 0) throw InternalError("theta^2 has odd valuation on a semistable curve");
    return legendre(x.u, T.p()) == 1 ? 1 : -1;
}

std::vector<TwinSign> compute_signs(const Analysis& A, const ClusterPicture& pic, const Rat& c)
{
    std::vector<unsigned> twins;
    for (const auto& cl : pic.clusters)
        if (cl.size() == 2) twins.push_back(cl.mask);
    std::vector<TwinSign> out;
    if (twins.size() == 3) {
        int s = is_local_square(c, Place::prime(pic.p)) ? 1 : -1;
        for (unsigned t : twins) out.push_back({t, pic.frob_image(t), s});
        return out;
    }
    for (unsigned t : twins) {
        unsigned f = pic.frob_image(t);
        Elem x = theta_sq(A, c, t);
        if (f != t) x = A.T.mul(x, theta_sq(A, c, f));
        out.push_back({t, f, base_square_sign(A.T, A.T.base(x))});
    }
    return out;
}

bool same_type(const ReductionType& a, const ReductionType& b)
{
    return a.kind == b.kind && a.sub == b.sub && a.swapped == b.swapped && a.n == b.n && a.m == b.m && a.l == b.l && a.t == b.t &&
           a.r == b.r && a.eps == b.eps && a.delta == b.delta;
}

struct Rebalance {
    Rebalanced result;
    Analysis analysis;
};

std::optional<Rebalance> try_candidate(const Curve& C, const Analysis& A, const ClusterPicture& pic, bool invert, const Rat& z, long N)
{
    const Tower& T = A.T;
    std::array<Elem, 6> rr = A.roots;
    Dist d = pic.dist;
    if (invert) {
        Elem ze = T.from_rat(z);
        std::array<Rat, 6> e;
        for (int i = 0; i < 6; ++i) {
            Elem diff = T.sub(A.roots[i], ze);
            auto [v, exact] = T.val_bound(diff);
            if (!exact) return std::nullopt;
            e[i] = v;
            rr[i] = T.inv(diff);
        }
        for (int i = 0; i < 6; ++i)
            for (int j = 0; j < 6; ++j)
                if (i != j) d[i][j] = pic.dist[i][j] - e[i] - e[j];
    }
    auto cl = clusters_from(d);
    if (!shape_balanced(cl)) return std::nullopt;
    Rat dR = cl.front().depth;
    if (!is_int(dR)) return std::nullopt;
    long dr = dR.get_num().get_si();

    std::set<int> orbit;
    for (const auto& P : A.perms) orbit.insert(P[0]);
    Elem sum = T.zero();
    for (int k : orbit) sum = T.add(sum, rr[k]);
    Elem avg = T.mul(sum, T.from_rat(Rat(1, static_cast<long>(orbit.size()))));
    Rat zc = truncate_abs(T, T.base(avg), dr);

    Mat2 aff{ppow(T.p(), -dr), -zc * ppow(T.p(), -dr), 0, 1};
    Mat2 M = invert ? aff * Mat2{0, 1, 1, -z} : aff;
    Curve D;
    try {
        D = center(mobius_transform(C, M));
    } catch (const DomainError&) {
        return std::nullopt;
    }
    Analysis B = analyze(D, T.p(), N);
    ClusterPicture pic2 = make_picture(B);
    if (!is_balanced(pic2)) return std::nullopt;
    return Rebalance{Rebalanced{D, M, pic2, 0}, std::move(B)};
}

Rebalance rebalance_impl(const Curve& C0, const Analysis& A0, const ClusterPicture& pic0, long N)
{
    Curve C = center(C0);
    const Tower& T = A0.T;
    int tried = 1;
    if (auto r = try_candidate(C, A0, pic0, false, 0, N)) {
        r->result.candidates_tried = tried;
        return std::move(*r);
    }

    const long U = T.p() > 13 ? 12 : T.p().get_si() - 1;
    std::set<Rat> seen;
    auto centers_for = [&](unsigned mask, const Rat& deep) {
        std::vector<Rat> out;
        int k = __builtin_ctz(mask);
        std::set<int> orbit;
        for (const auto& P : A0.perms) orbit.insert(P[k]);
        Elem sum = T.zero();
        for (int i : orbit) sum = T.add(sum, A0.roots[i]);
        Padic zs = T.base(T.mul(sum, T.from_rat(Rat(1, static_cast<long>(orbit.size())))));
        long lo = floor_rat(pic0.top().depth).get_num().get_si();
        long hi = ceil_rat(deep).get_num().get_si() + 1;
        for (long j = lo; j <= hi; ++j) {
            Rat base = truncate_abs(T, zs, j);
            long own = digit_at(T, zs, j);
            std::vector<long> us;
            for (long u = 0; u <= U; ++u) us.push_back(u);
            if (own > U) us.push_back(own);
            for (long u : us) {
                Rat z = base + Rat(u) * ppow(T.p(), j);
                if (seen.insert(z).second) out.push_back(z);
            }
        }
        return out;
    };

    std::vector<std::pair<unsigned, Rat>> sources;
    for (const auto& cl : pic0.clusters) sources.emplace_back(cl.mask, cl.depth);
    for (int i = 0; i < 6; ++i) {
        Rat deep = pic0.top().depth;
        for (int j = 0; j < 6; ++j)
            if (j != i) deep = std::max(deep, pic0.dist[i][j]);
        sources.emplace_back(1u << i, deep);
    }
    for (const auto& [mask, deep] : sources) {
        for (const Rat& z : centers_for(mask, deep)) {
            ++tried;
            if (auto r = try_candidate(C, A0, pic0, true, z, N)) {
                r->result.candidates_tried = tried;
                return std::move(*r);
            }
        }
    }
    throw UnsupportedError("rebalancing search exhausted after " + std::to_string(tried) + " candidates");
}

// Valuations of elements of Q(sqrt m) under the canonical embedding.
struct QuadValuer {
    Tower T;
    bool has = false;
    Elem sqm;
    QuadValuer(const Int& p, long N) : T(p, N) {}
    Rat operator()(const QuadExt& x)
    {
        Elem e = T.from_rat(x.a);
        if (x.b != 0) {
            if (!has) {
                sqm = T.sqrt_or_adjoin(T.from_rat(Rat(x.m)));
                has = true;
            }
            e = T.add(e, T.mul(T.from_rat(x.b), sqm));
        }
        return T.val(e);
    }
};

bool side_condition_holds(SideCondition sc, const ReductionType& ty, const InvariantSet& I, QuadValuer& val)
{
    if (I.eta1 == 0) return false;
    auto zero = [&](const QuadExt& x) { return !x.is_zero() && val(x) == 0; };
    switch (sc) {
    case SideCondition::None:
        return true;
    case SideCondition::UnitsAll:
        return zero(I.l1) && zero(I.l2) && zero(I.l3) && zero(I.eta2) && zero(I.eta3);
    case SideCondition::UnitsL:
        return zero(I.l1) && zero(I.l2) && zero(I.l3);
    case SideCondition::L1EqualsT:
        return !I.l1.is_zero() && val(I.l1) == ty.t;
    case SideCondition::TwinB:
        return !I.l1.is_zero() && val(I.l1) == frac(ty.n, 2) && zero(I.l2) && zero(I.l3) && zero(I.eta2) && zero(I.eta3);
    }
    return false;
}

ReductionType classify_balanced(const Curve& D, const Analysis& B, ClusterPicture& pic)
{
    pic.signs = compute_signs(B, pic, D.c);
    return classify_type(pic, invariants(D), D.c);
}

}  // namespace

std::string root_name(int i)
{
    static const char* names[6] = {"R1", "R2", "S1", "S2", "T1", "T2"};
    return names[i];
}

int ClusterPicture::find(unsigned mask) const
{
    for (size_t i = 0; i < clusters.size(); ++i)
        if (clusters[i].mask == mask) return static_cast<int>(i);
    return -1;
}

unsigned ClusterPicture::image(const Perm& g, unsigned mask) const
{
    unsigned r = 0;
    for (int i = 0; i < 6; ++i)
        if (mask >> i & 1) r |= 1u << g[i];
    return r;
}

std::string ClusterPicture::notation() const
{
    std::function<std::string(int)> rec = [&](int idx) {
        const Cluster& cl = clusters[idx];
        unsigned covered = 0;
        std::vector<std::pair<int, std::string>> parts;
        for (size_t k = 0; k < clusters.size(); ++k) {
            if (clusters[k].parent != idx) continue;
            covered |= clusters[k].mask;
            parts.emplace_back(__builtin_ctz(clusters[k].mask), rec(static_cast<int>(k)));
        }
        for (int i = 0; i < 6; ++i)
            if ((cl.mask >> i & 1) && !(covered >> i & 1)) parts.emplace_back(i, root_name(i));
        std::sort(parts.begin(), parts.end());
        std::string s = "(";
        for (size_t k = 0; k < parts.size(); ++k) s += (k ? " " : "") + parts[k].second;
        s += ")_" + str(idx == 0 ? cl.depth : cl.rel_depth);
        for (const auto& sg : signs)
            if (sg.mask == cl.mask) s += sg.sign > 0 ? "^+" : "^-";
        return s;
    };
    std::string out = rec(0);
    auto name = [](unsigned m) {
        std::string s = "{";
        for (int i = 0; i < 6; ++i)
            if (m >> i & 1) s += (s.size() > 1 ? " " : "") + root_name(i);
        return s + "}";
    };
    std::string arcs;
    for (const auto& cl : clusters) {
        unsigned f = frob_image(cl.mask);
        if (f != cl.mask && cl.mask < f) arcs += " " + name(cl.mask) + "<->" + name(f);
    }
    if (!arcs.empty()) out += " frob:" + arcs;
    return out;
}

std::vector<Cluster> clusters_from(const Dist& d)
{
    std::set<unsigned> masks{63u};
    for (int i = 0; i < 6; ++i)
        for (int j = 0; j < 6; ++j) {
            if (i == j) continue;
            unsigned m = 1u << i;
            for (int k = 0; k < 6; ++k)
                if (k != i && d[i][k] >= d[i][j]) m |= 1u << k;
            if (__builtin_popcount(m) >= 2) masks.insert(m);
        }
    std::vector<Cluster> out;
    for (unsigned m : masks) {
        Cluster c;
        c.mask = m;
        bool first = true;
        for (int i = 0; i < 6; ++i)
            for (int j = i + 1; j < 6; ++j)
                if ((m >> i & 1) && (m >> j & 1) && (first || d[i][j] < c.depth)) {
                    c.depth = d[i][j];
                    first = false;
                }
        out.push_back(c);
    }
    std::sort(out.begin(), out.end(), [](const Cluster& a, const Cluster& b) {
        if (a.size() != b.size()) return a.size() > b.size();
        return a.mask < b.mask;
    });
    for (size_t i = 0; i < out.size(); ++i) {
        int best = -1;
        for (size_t j = 0; j < out.size(); ++j) {
            if (j == i || (out[j].mask & out[i].mask) != out[i].mask || out[j].mask == out[i].mask) continue;
            if (best < 0 || out[j].size() < out[best].size()) best = static_cast<int>(j);
        }
        out[i].parent = best;
        out[i].rel_depth = best < 0 ? out[i].depth : out[i].depth - out[best].depth;
    }
    return out;
}

bool shape_balanced(const std::vector<Cluster>& cl)
{
    std::vector<Rat> triples;
    for (const auto& c : cl) {
        if (c.size() == 4 || c.size() == 5) return false;
        if (c.size() == 3) triples.push_back(c.depth);
    }
    if (triples.empty()) return true;
    return triples.size() == 2 && triples[0] == triples[1];
}

bool is_balanced(const ClusterPicture& pic) { return pic.top().depth == 0 && shape_balanced(pic.clusters); }

ClusterPicture cluster_picture(const Curve& C, const Int& p)
{
    return with_precision(default_precision(), precision_cap(), [&](long N) {
        Analysis A = analyze(C, p, N);
        ClusterPicture pic = make_picture(A);
        if (is_balanced(pic) && is_semistable(pic, C.c).ok) {
            try {
                pic.signs = compute_signs(A, pic, C.c);
            } catch (const InternalError&) {
                pic.signs.clear();
            }
        }
        return pic;
    });
}

Semistability is_semistable(const ClusterPicture& pic, const Rat& c)
{
    if (pic.ram_index > 2) return {false, "splitting field has ramification index " + std::to_string(pic.ram_index)};
    for (const auto& cl : pic.clusters)
        for (const auto& g : pic.inertia)
            if (pic.image(g, cl.mask) != cl.mask) return {false, "inertia moves a proper cluster"};
    long vc = vp(c, pic.p);
    for (size_t i = 0; i < pic.clusters.size(); ++i) {
        const Cluster& s = pic.clusters[i];
        if (s.size() < 3) continue;
        int big_child = 0, triple_children = 0;
        for (const auto& ch : pic.clusters) {
            if (ch.parent != static_cast<int>(i)) continue;
            if (ch.size() == 4) ++big_child;
            if (ch.size() == 3) ++triple_children;
        }
        if (big_child) continue;
        if (s.size() == 6 && triple_children == 2) continue;
        if (!is_int(s.depth)) return {false, "principal cluster of non-integral depth " + str(s.depth)};
        int k = __builtin_ctz(s.mask);
        Rat sum = Rat(vc) + Rat(s.size()) * s.depth;
        for (int r = 0; r < 6; ++r)
            if (!(s.mask >> r & 1)) sum += pic.dist[r][k];
        if (!is_int(sum) || sum.get_num() % 2 != 0) return {false, "parity condition fails for a principal cluster"};
    }
    return {true, "semistable"};
}

Semistability is_semistable(const Curve& C, const Int& p)
{
    return with_precision(default_precision(), precision_cap(), [&](long N) {
        Analysis A = analyze(C, p, N);
        return is_semistable(make_picture(A), C.c);
    });
}

Rebalanced rebalance(const Curve& C, const Int& p)
{
    return with_precision(default_precision(), precision_cap(), [&](long N) {
        Analysis A = analyze(center(C), p, N);
        ClusterPicture pic = make_picture(A);
        Rebalance r = rebalance_impl(C, A, pic, N);
        r.result.picture.signs = compute_signs(r.analysis, r.result.picture, r.result.curve.c);
        return r.result;
    });
}

std::vector<TwinSign> twin_signs(const Curve& balanced, const Int& p)
{
    return with_precision(default_precision(), precision_cap(), [&](long N) {
        Analysis A = analyze(balanced, p, N);
        return compute_signs(A, make_picture(A), balanced.c);
    });
}

int twin_sign(const Curve& balanced, const Int& p, unsigned twin)
{
    for (const auto& s : twin_signs(balanced, p))
        if (s.mask == twin || s.partner == twin) return s.sign;
    throw DomainError("not a twin of this curve");
}

std::string ReductionType::label() const
{
    std::ostringstream os;
    auto sg = [](int e) { return e > 0 ? "+" : "-"; };
    switch (kind) {
    case Case::Two_a: os << "2(a)"; break;
    case Case::Two_d: os << "2(d)"; break;
    case Case::OxO_a: os << (swapped ? "1x~1(a)" : "1x1(a)") << " t=" << t; break;
    case Case::OxO_b: os << (swapped ? "1x~1(b)" : "1x1(b)") << " t=" << t; break;
    case Case::OxO_c: os << (swapped ? "1x~1(c)" : "1x1(c)") << " t=" << t; break;
    case Case::In: os << "I_" << n << "^" << sg(eps) << "(" << sub << ")"; break;
    case Case::I2n: os << "I_2n^" << sg(eps) << "(" << sub << ") n=" << n; break;
    case Case::OxIn: os << "1xI_" << n << "^" << sg(eps) << "(a) t=" << t; break;
    case Case::Inm_a: os << "I_" << n << "," << m << "^" << sg(eps) << sg(delta) << "(a)"; break;
    case Case::InxIm: os << "I_" << n << "^" << sg(eps) << "xI_" << m << "^" << sg(delta) << "(a) t=" << t; break;
    case Case::Inn_a: os << "I_" << n << "~" << n << "^" << sg(eps) << "(a)"; break;
    case Case::InxtIn: os << "I_" << n << "^" << sg(eps) << "x~I_" << n << "(a) t=" << t; break;
    case Case::Inm_b: os << "I_" << n << "," << m << "^" << sg(eps) << sg(delta) << "(b)"; break;
    case Case::Inn_b: os << "I_" << n << "~" << n << "^" << sg(eps) << "(b)"; break;
    case Case::U: os << "U_" << n << "," << m << "," << l << "^" << sg(eps) << "(a)"; break;
    case Case::Unnl: os << "U_" << n << "~" << n << "," << l << "^" << sg(eps) << "(a)"; break;
    }
    os << " r=" << r;
    return os.str();
}

ReductionType classify_type(const ClusterPicture& pic, const InvariantSet& I, const Rat& c)
{
    if (!is_balanced(pic)) throw UnsupportedError("picture is not balanced");
    const Int& p = pic.p;
    ReductionType T;
    Rat vD = frac(vp(I.Delta_sq, p), 2) - Rat(vp(c, p));
    auto need_r = [&](const Rat& x) {
        long r = to_long(x, "r");
        if (r < 0) throw UnsupportedError("r is negative");
        return static_cast<int>(r);
    };
    auto sign_of = [&](unsigned mask) {
        for (const auto& s : pic.signs)
            if (s.mask == mask) return s.sign;
        throw InternalError("missing twin sign");
    };
    auto colours = [](unsigned mask) {
        std::array<int, 3> k{0, 0, 0};
        for (int i = 0; i < 6; ++i)
            if (mask >> i & 1) ++k[colour(i)];
        return k;
    };
    auto twin_n = [](const Cluster& cl) { return static_cast<int>(to_long(2 * cl.rel_depth, "twin depth")); };
    auto twin_half = [](const Cluster& cl) { return static_cast<int>(to_long(cl.rel_depth, "twin depth")); };
    bool dh1_square = is_local_square(I.dh1, Place::prime(p));

    std::vector<const Cluster*> twins, triples;
    for (const auto& cl : pic.clusters) {
        if (cl.size() == 2) twins.push_back(&cl);
        if (cl.size() == 3) triples.push_back(&cl);
    }
    using C3 = std::array<int, 3>;

    if (triples.size() == 2) {
        const Cluster &S1 = *triples[0], &S2 = *triples[1];
        T.t = static_cast<int>(to_long(S1.depth, "triple depth"));
        T.swapped = pic.frob_image(S1.mask) == S2.mask;
        C3 k1 = colours(S1.mask);
        if (twins.empty()) {
            if (k1 == C3{1, 1, 1}) {
                T.kind = dh1_square ? Case::OxO_b : Case::OxO_c;
                T.r = need_r(vD - 2 * T.t);
            } else if (k1 == C3{1, 2, 0} || k1 == C3{1, 0, 2}) {
                T.kind = Case::OxO_a;
            } else {
                throw UnsupportedError("unsupported colouring of two triples");
            }
            return T;
        }
        if (twins.size() == 1) {
            const Cluster& tw = *twins[0];
            if (colours(tw.mask) != C3{2, 0, 0}) throw UnsupportedError("unsupported twin inside a triple");
            T.kind = Case::OxIn;
            T.n = twin_n(tw);
            T.eps = sign_of(tw.mask);
            return T;
        }
        if (twins.size() == 2) {
            const Cluster *ts = nullptr, *tt = nullptr;
            for (auto* tw : twins) {
                C3 k = colours(tw->mask);
                C3 kp = colours(pic.clusters[tw->parent].mask);
                if (pic.clusters[tw->parent].size() != 3 || kp[0] != 1) throw UnsupportedError("unsupported twins inside triples");
                if (k == C3{0, 2, 0}) ts = tw;
                else if (k == C3{0, 0, 2}) tt = tw;
            }
            if (!ts || !tt) throw UnsupportedError("unsupported twins inside triples");
            if (T.swapped) {
                if (twin_n(*ts) != twin_n(*tt)) throw InternalError("swapped twins of different depth");
                T.kind = Case::InxtIn;
                T.n = twin_n(*ts);
                T.eps = sign_of(ts->mask);
            } else {
                T.kind = Case::InxIm;
                T.n = twin_n(*ts);
                T.m = twin_n(*tt);
                T.eps = sign_of(ts->mask);
                T.delta = sign_of(tt->mask);
            }
            return T;
        }
        throw UnsupportedError("unsupported picture with two triples");
    }
    if (!triples.empty()) throw UnsupportedError("unsupported picture");

    if (twins.empty()) {
        T.kind = dh1_square ? Case::Two_a : Case::Two_d;
        T.r = need_r(vD);
        return T;
    }
    if (twins.size() == 1) {
        const Cluster& tw = *twins[0];
        C3 k = colours(tw.mask);
        T.eps = sign_of(tw.mask);
        if (k == C3{2, 0, 0} || k == C3{0, 2, 0} || k == C3{0, 0, 2}) {
            T.kind = Case::In;
            T.sub = k[0] == 2 ? 'a' : 'b';
            T.n = twin_n(tw);
            T.r = need_r(vD);
        } else {
            T.kind = Case::I2n;
            T.sub = k[0] == 0 ? 'c' : 'd';
            T.n = twin_half(tw);
        }
        return T;
    }
    if (twins.size() == 2) {
        const Cluster &A = *twins[0], &B = *twins[1];
        C3 ka = colours(A.mask), kb = colours(B.mask);
        bool swapped = pic.frob_image(A.mask) == B.mask;
        T.swapped = swapped;
        if ((ka == C3{0, 2, 0} && kb == C3{0, 0, 2}) || (ka == C3{0, 0, 2} && kb == C3{0, 2, 0})) {
            const Cluster& ts = ka[1] == 2 ? A : B;
            const Cluster& tt = ka[1] == 2 ? B : A;
            T.r = need_r(vD);
            if (swapped) {
                if (twin_n(ts) != twin_n(tt)) throw InternalError("swapped twins of different depth");
                T.kind = Case::Inn_a;
                T.n = twin_n(ts);
                T.eps = sign_of(ts.mask);
            } else {
                T.kind = Case::Inm_a;
                T.n = twin_n(ts);
                T.m = twin_n(tt);
                T.eps = sign_of(ts.mask);
                T.delta = sign_of(tt.mask);
            }
            return T;
        }
        if (ka == C3{0, 1, 1} && kb == C3{0, 1, 1}) {
            if (swapped) {
                if (twin_n(A) != twin_n(B)) throw InternalError("swapped twins of different depth");
                T.kind = Case::Inn_b;
                T.n = twin_n(A);
                T.eps = sign_of(A.mask);
            } else {
                const Cluster& lo = A.rel_depth <= B.rel_depth ? A : B;
                const Cluster& hi = A.rel_depth <= B.rel_depth ? B : A;
                T.kind = Case::Inm_b;
                T.n = twin_n(lo);
                T.m = twin_n(hi);
                if ((T.m - T.n) % 2 != 0) throw UnsupportedError("twin depths of different parity");
                T.eps = sign_of(lo.mask);
                T.delta = sign_of(hi.mask);
            }
            T.r = need_r(vD - frac(T.n, 2));
            return T;
        }
        throw UnsupportedError("unsupported colouring of two twins");
    }
    if (twins.size() == 3) {
        const Cluster *tr = nullptr, *ts = nullptr, *tt = nullptr;
        for (auto* tw : twins) {
            C3 k = colours(tw->mask);
            if (k == C3{2, 0, 0}) tr = tw;
            else if (k == C3{0, 2, 0}) ts = tw;
            else if (k == C3{0, 0, 2}) tt = tw;
        }
        if (!tr || !ts || !tt) throw UnsupportedError("unsupported colouring of three twins");
        T.eps = sign_of(tr->mask);
        if (pic.frob_image(ts->mask) == tt->mask) {
            if (twin_n(*ts) != twin_n(*tt)) throw InternalError("swapped twins of different depth");
            T.kind = Case::Unnl;
            T.swapped = true;
            T.n = twin_n(*ts);
            T.l = twin_n(*tr);
        } else {
            T.kind = Case::U;
            T.n = twin_n(*ts);
            T.m = twin_n(*tt);
            T.l = twin_n(*tr);
        }
        return T;
    }
    throw UnsupportedError("unsupported picture");
}

LocalTableRow local_table_row(const ReductionType& T)
{
    const long n = T.n, m = T.m, l = T.l, t = T.t, r = T.r;
    const bool e = T.eps > 0, d = T.delta > 0;
    auto row = [](long cJ, int mu, long cJh, int muh, int lambda, int w, int E) {
        return LocalTableRow{Int(cJ), Int(cJh), mu, muh, lambda, w, E};
    };
    switch (T.kind) {
    case Case::Two_a:
        return row(1, 1, 1, 1, 1, 1, 1);
    case Case::Two_d:
        return row(1, 1, 1, sgn(r), sgn(r), 1, sgn(r));
    case Case::OxO_a:
        return T.swapped ? row(1, sgn(t), 1, sgn(t), 1, 1, 1) : row(1, 1, 1, 1, 1, 1, 1);
    case Case::OxO_b:
        return T.swapped ? row(1, sgn(t), 1, 1, sgn(t), 1, sgn(t)) : row(1, 1, 1, 1, 1, 1, 1);
    case Case::OxO_c:
        return T.swapped ? row(1, sgn(t), 1, sgn(r), sgn(t + r), 1, sgn(t + r)) : row(1, 1, 1, sgn(r), sgn(r), 1, sgn(r));
    case Case::In:
    case Case::OxIn:
        return e ? row(n, 1, 2 * n, 1, -1, -1, 1) : row(tilde(n), 1, 2, 1, sgn(n), 1, sgn(n));
    case Case::I2n:
        return e ? row(2 * n, 1, n, 1, -1, -1, 1) : row(2, 1, tilde(n), 1, sgn(n), 1, sgn(n));
    case Case::Inm_a:
    case Case::InxIm:
        if (e && d) return row(n * m, 1, 4 * n * m, 1, 1, 1, 1);
        if (!e && d) return row(tilde(n) * m, 1, 4 * m, 1, sgn(n + 1), -1, sgn(n));
        if (e && !d) return row(n * tilde(m), 1, 4 * n, 1, sgn(m + 1), -1, sgn(m));
        return row(tilde(n) * tilde(m), 1, 4, 1, sgn(n + m), 1, sgn(n + m));
    case Case::Inn_a:
        return e ? row(n, 1, 2 * n, sgn(r), sgn(r + 1), -1, sgn(r)) : row(tilde(n), 1, 2, sgn(r), sgn(n + r), 1, sgn(n + r));
    case Case::InxtIn:
        return e ? row(n, sgn(t), 2 * n, sgn(t), -1, -1, 1) : row(tilde(n), sgn(t), 2, sgn(t), sgn(n), 1, sgn(n));
    case Case::Inm_b: {
        if ((m - n) % 2) throw DomainError("I_{n,m}(b) needs n and m of equal parity");
        long h = (m - n) / 2;
        if (e && d) return row(n * m, 1, 4 * n * m, 1, 1, 1, 1);
        if (!e && d) return row(tilde(n) * m, 1, m, sgn(r), sgn(n + 1 + r), -1, sgn(n + r));
        if (e && !d) return row(n * tilde(m), 1, n, sgn(h + r), sgn((m + n) / 2 + r + 1), -1, sgn((n + m) / 2 + r));
        long D = std::gcd(n, h);
        return row(tilde(n) * tilde(m), 1, tilde(n * m / D) * tilde(D), sgn(n * h), sgn(h), 1, sgn(h));
    }
    case Case::Inn_b:
        return e ? row(n, 1, n * tilde(n), 1, sgn(n + 1), -1, sgn(n)) : row(tilde(n), 1, tilde(n), sgn(r), sgn(r), 1, sgn(r));
    case Case::U: {
        long N = n * m + n * l + m * l, M = std::gcd(n, std::gcd(m, l));
        return e ? row(N, 1, 4 * N, 1, 1, 1, 1) : row(tilde(N / M) * tilde(M), sgn(n * m * l), 4, 1, sgn(n + m + l), 1, sgn(n + m + l));
    }
    case Case::Unnl:
        return e ? row(n + 2 * l, 1, 2 * n + 4 * l, 1, -1, -1, 1) : row(n, sgn(l), 2 * n, 1, sgn(l + 1), -1, sgn(l));
    }
    throw InternalError("unknown reduction type");
}

std::string eigenvalue_class(const ClusterPicture& pic, const Rat& c)
{
    (void)c;
    std::vector<const TwinSign*> tw;
    for (const auto& s : pic.signs) tw.push_back(&s);
    int plus = 0, minus = 0, ipairs = 0;
    if (tw.size() == 3) {
        int eps = tw[0]->sign;
        int fixed = 0;
        for (auto* s : tw)
            if (s->partner == s->mask) ++fixed;
        if (fixed == 3) (eps > 0 ? plus : minus) += 2;
        else if (fixed == 1) ++plus, ++minus;
        else throw UnsupportedError("Frobenius permutes three twins cyclically");
    } else {
        std::set<unsigned> done;
        for (auto* s : tw) {
            if (done.count(s->mask)) continue;
            done.insert(s->mask);
            done.insert(s->partner);
            if (s->partner == s->mask) (s->sign > 0 ? plus : minus) += 1;
            else if (s->sign > 0) ++plus, ++minus;
            else ++ipairs;
        }
    }
    return std::string(plus, '+') + std::string(minus, '-') + std::string(ipairs, 'i');
}

int root_number_from_eigenvalues(const ClusterPicture& pic, const Rat& c)
{
    std::string cls = eigenvalue_class(pic, c);
    return sgn(static_cast<long>(std::count(cls.begin(), cls.end(), '+')));
}

SideCondition side_condition(const ReductionType& T)
{
    switch (T.kind) {
    case Case::In:
    case Case::I2n:
    case Case::OxIn:
        return SideCondition::UnitsAll;
    case Case::Inm_a:
    case Case::Inn_a:
        return SideCondition::UnitsL;
    case Case::OxO_b:
    case Case::OxO_c:
        return SideCondition::L1EqualsT;
    case Case::Inm_b:
    case Case::Inn_b:
        return SideCondition::TwinB;
    default:
        return SideCondition::None;
    }
}

Rat valuation_at(const Curve& C, const Int& p, const QuadExt& x)
{
    (void)C;
    if (x.is_zero()) throw DomainError("valuation of zero");
    return with_precision(default_precision(), precision_cap(), [&](long N) {
        QuadValuer v(p, N);
        return v(x);
    });
}

namespace {

OddClassification classify_direct(const Curve& C0, const Int& p, long N)
{
    Curve C = center(C0);
    Analysis A = analyze(C, p, N);
    ClusterPicture pic = make_picture(A);
    Semistability ss = is_semistable(pic, C.c);
    if (!ss.ok) throw UnsupportedError("not semistable: " + ss.diagnostic);

    Rebalance rb = rebalance_impl(C, A, pic, N);
    OddClassification out;
    out.balanced = rb.result;
    out.balanced.picture.signs = compute_signs(rb.analysis, out.balanced.picture, out.balanced.curve.c);
    out.eigen_class = eigenvalue_class(out.balanced.picture, out.balanced.curve.c);
    out.w_eigen = root_number_from_eigenvalues(out.balanced.picture, out.balanced.curve.c);
    out.type = classify_type(out.balanced.picture, invariants(out.balanced.curve), out.balanced.curve.c);
    out.row = local_table_row(out.type);
    return out;
}

}  // namespace

OddClassification classify_at(const Curve& C0, const Int& p)
{
    if (p == 2) throw DomainError("odd-place classification needs an odd prime");
    return with_precision(default_precision(), precision_cap(), [&](long N) {
        OddClassification out;
        try {
            out = classify_direct(C0, p, N);
        } catch (const UnsupportedError& e) {
            std::string why = e.what();
            if (why.rfind("not semistable", 0) == 0) throw;
            // The dual has the same lambda and w; its row gives ours with the two columns exchanged.
            OddClassification d;
            try {
                d = classify_direct(dual_curve(C0).curve, p, N);
            } catch (const UnsupportedError& e2) {
                throw UnsupportedError(why + "; dual: " + e2.what());
            } catch (const DegenerateError&) {
                throw UnsupportedError(why);
            }
            Curve C = center(C0);
            Analysis A = analyze(C, p, N);
            ClusterPicture pic = make_picture(A);
            Rebalance rb = rebalance_impl(C, A, pic, N);
            out.balanced = rb.result;
            out.balanced.picture.signs = compute_signs(rb.analysis, out.balanced.picture, out.balanced.curve.c);
            out.eigen_class = eigenvalue_class(out.balanced.picture, out.balanced.curve.c);
            out.w_eigen = root_number_from_eigenvalues(out.balanced.picture, out.balanced.curve.c);
            out.type = d.type;
            out.via_dual = true;
            out.row = d.row;
            std::swap(out.row.cJ, out.row.cJh);
            std::swap(out.row.mu, out.row.muh);
            return out;
        }

        SideCondition sc = side_condition(out.type);
        QuadValuer val(p, N);
        const Curve& B = out.balanced.curve;
        long tmax = p > 31 ? 30 : p.get_si() - 1;
        for (long t = 0; t <= tmax; ++t) {
            Curve D = B;
            if (t > 0) {
                try {
                    D = center(mobius_transform(B, shift_matrix(B, t)));
                } catch (const DomainError&) {
                    continue;
                }
            }
            InvariantSet I = invariants(D);
            if (I.degenerate()) continue;
            if (!side_condition_holds(sc, out.type, I, val)) continue;
            if (t > 0) {
                Analysis Ad = analyze(D, p, N);
                ClusterPicture pd = make_picture(Ad);
                if (!is_balanced(pd)) continue;
                ReductionType td;
                try {
                    td = classify_balanced(D, Ad, pd);
                } catch (const UnsupportedError&) {
                    continue;
                }
                if (!same_type(td, out.type)) continue;
            }
            out.e_asserted = true;
            out.e_side = error_term_E(I, D.c, Place::prime(p));
            out.e_model = t == 0 ? "balanced model" : "balanced model shifted by t=" + std::to_string(t);
            break;
        }
        return out;
    });
}

}  // namespace c2d4
