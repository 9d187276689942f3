#include "c2d4/localdata.hpp"

#include "c2d4/richelot.hpp"

#include <algorithm>
#include <sstream>

namespace c2d4 {

// ---------------------------------------------------------------- real place

namespace {

int sgn(const Rat& x) { return x > 0 ? 1 : (x < 0 ? -1 : 0); }

bool real_coefficients(const Quad& q, const Int& m) { return m > 0 || (q.b.is_rational() && q.c.is_rational()); }

int sign_at(const Quad& q, const Rat& x) { return real_sign(q.eval(QuadExt(x))); }

Rat abs_bound(const QuadExt& z, const Int& m)
{
    Rat b = abs(z.a);
    if (!z.is_rational()) {
        Int s;
        mpz_sqrt(s.get_mpz_t(), Int(abs(m)).get_mpz_t());
        b += abs(z.b) * (s + 1);
    }
    return b;
}

// Approximation of -B/2 where q is negative.
Rat negative_point(const Quad& q, const Int& m)
{
    for (unsigned k = 0;; ++k) {
        Rat s = 0;
        if (!q.b.is_rational()) {
            Int scaled = m << (2 * k), r;
            mpz_sqrt(r.get_mpz_t(), scaled.get_mpz_t());
            s = Rat(r) / Rat(Int(1) << k);
        }
        Rat v = -(q.b.a + q.b.b * s) / 2;
        v.canonicalize();
        if (sign_at(q, v) < 0) return v;
        if (k > 4096) throw InternalError("vertex approximation failed");
    }
}

struct Isolated {
    int idx;
    const Quad* q;
    Rat lo, hi;
    int slo;  // sign of q at lo; 0 when the root is exact

    bool exact() const { return slo == 0; }
    void bisect()
    {
        if (exact()) return;
        Rat mid = (lo + hi) / 2;
        mid.canonicalize();
        int s = sign_at(*q, mid);
        if (s == 0) {
            lo = hi = mid;
            slo = 0;
        } else if (s == slo) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
};

bool overlap(const Isolated& a, const Isolated& b) { return !(a.hi < b.lo || b.hi < a.lo); }

}  // namespace

RealArrangement real_arrangement(const Curve& C)
{
    RealArrangement A;
    A.sign_c = sgn(C.c);
    std::array<const Quad*, 3> qs{&C.r, &C.s, &C.t};
    std::vector<Isolated> roots;
    for (int i = 0; i < 3; ++i) {
        const Quad& q = *qs[i];
        if (!real_coefficients(q, C.m)) continue;
        if (real_sign(q.disc()) < 0) {
            A.conjugate_pair[i] = true;
            A.real_point[i] = A.identity_component[i] = true;
            continue;
        }
        A.real_point[i] = true;
        Rat R = 1 + abs_bound(q.b, C.m) + abs_bound(q.c, C.m);
        Rat v = negative_point(q, C.m);
        roots.push_back({2 * i, &q, -R, v, 1});
        roots.push_back({2 * i + 1, &q, v, R, -1});
    }
    for (bool again = true; again;) {
        again = false;
        for (size_t i = 0; i < roots.size(); ++i)
            for (size_t j = i + 1; j < roots.size(); ++j)
                while (overlap(roots[i], roots[j])) {
                    again = true;
                    roots[i].bisect();
                    roots[j].bisect();
                }
    }
    std::sort(roots.begin(), roots.end(), [](const Isolated& a, const Isolated& b) { return a.lo < b.lo; });

    size_t k = roots.size();
    for (size_t i = 0; i < k; ++i) {
        A.order.push_back(roots[i].idx);
        int comp;
        if (A.sign_c > 0)
            comp = (i == 0 || i + 1 == k) ? 0 : int((i + 1) / 2);
        else
            comp = int(i / 2);
        A.component.push_back(comp);
    }
    if (k == 0)
        A.components = A.sign_c > 0 ? 1 : 0;
    else
        A.components = int(k / 2);

    for (int i = 0; i < 3; ++i) {
        if (A.conjugate_pair[i] || !A.real_point[i]) continue;
        int ca = -1, cb = -1;
        for (size_t j = 0; j < k; ++j) {
            if (A.order[j] == 2 * i) ca = A.component[j];
            if (A.order[j] == 2 * i + 1) cb = A.component[j];
        }
        A.identity_component[i] = ca == cb;
    }
    return A;
}

std::string RealArrangement::notation() const
{
    std::ostringstream os;
    os << (sign_c > 0 ? "c>0" : "c<0") << " real roots:";
    if (order.empty()) os << " none";
    for (size_t i = 0; i < order.size(); ++i) {
        if (i == 0 || component[i] != component[i - 1]) os << (i ? " | " : " ");
        else os << ' ';
        os << root_name(order[i]);
    }
    os << "; conjugate pairs:";
    const char* names[] = {"R", "S", "T"};
    bool any = false;
    for (int i = 0; i < 3; ++i)
        if (conjugate_pair[i]) os << ' ' << names[i], any = true;
    if (!real_point[1]) os << " S<->T", any = true;
    if (!any) os << " none";
    os << "; components: " << components;
    return os.str();
}

namespace {

Int real_component_group(const RealArrangement& A) { return A.components == 0 ? Int(1) : Int(1) << (A.components - 1); }

}  // namespace

LocalData local_real(const Curve& C)
{
    LocalData out;
    out.place = Place::inf();
    InvariantSet I = invariants(C);
    out.E = error_term_E(I, C.c, out.place);
    RealArrangement A = real_arrangement(C);
    RealArrangement B = real_arrangement(dual_curve(C).curve);
    Int nJ = real_component_group(A), nJh = real_component_group(B);
    int ker = 1;
    for (int i = 0; i < 3; ++i)
        if (A.real_point[i] && A.identity_component[i]) ++ker;
    out.mu = A.components == 0 ? -1 : 1;
    out.muh = B.components == 0 ? -1 : 1;
    Rat ratio = Rat(ker * nJ) / Rat(nJh);
    ratio.canonicalize();
    out.lambda = out.mu * out.muh * (vp(ratio, Int(2)) % 2 == 0 ? 1 : -1);
    out.w = 1;
    out.cJ = nJ;
    out.cJh = nJh;
    out.kernel = ker;
    out.description = A.notation();
    out.supported = true;
    if (I.eta1 == 0) out.issues.push_back("eta1 = 0: outside the tabulated real cases");
    return out;
}

// ---------------------------------------------------------------- odd p

LocalData local_odd(const Curve& C, const Int& p)
{
    LocalData out;
    out.place = Place::prime(p);
    InvariantSet I = invariants(C);
    out.E = error_term_E(I, C.c, out.place);
    OddClassification cl;
    try {
        cl = classify_at(C, p);
    } catch (const UnsupportedError& e) {
        out.reason = e.what();
        return out;
    } catch (const PrecisionError& e) {
        out.reason = e.what();
        return out;
    }
    out.supported = true;
    out.description = cl.type.label() + (cl.via_dual ? " (type of the dual)" : "");
    out.lambda = cl.row.lambda;
    out.w = cl.row.w;
    out.mu = cl.row.mu;
    out.muh = cl.row.muh;
    out.cJ = cl.row.cJ;
    out.cJh = cl.row.cJh;
    out.e_table = cl.row.E;
    out.e_asserted = cl.e_asserted && !cl.via_dual;
    if (cl.w_eigen != cl.row.w) out.issues.push_back("root number from Frobenius eigenvalues disagrees with the table");
    if (out.e_asserted && cl.e_side != cl.row.E) out.issues.push_back("E on the side-condition model disagrees with the table");
    if (cl.e_asserted && cl.e_side != out.E) out.issues.push_back("E differs between models");
    return out;
}

// ---------------------------------------------------------------- 2-adic place

namespace {

// 2^e (a + b w) with w^2 + w + 1 = 0, coordinates modulo 2^kBits.
// Z_2[w] is the ring of integers of the unramified quadratic extension of Q_2.
constexpr unsigned kBits = 192;

struct Z4 {
    Int a = 0, b = 0;
    long e = 0;
    bool zero = true;
};

Int reduce(const Int& x, unsigned bits = kBits)
{
    Int r;
    mpz_fdiv_r_2exp(r.get_mpz_t(), x.get_mpz_t(), bits);
    return r;
}

Z4 make(Int a, Int b, long e)
{
    a = reduce(a);
    b = reduce(b);
    Z4 z;
    if (a == 0 && b == 0) return z;
    while (mpz_even_p(a.get_mpz_t()) && mpz_even_p(b.get_mpz_t())) {
        a >>= 1;
        b >>= 1;
        ++e;
    }
    return {a, b, e, false};
}

Z4 add(const Z4& x, const Z4& y)
{
    if (x.zero) return y;
    if (y.zero) return x;
    long e = std::min(x.e, y.e);
    return make((x.a << (x.e - e)) + (y.a << (y.e - e)), (x.b << (x.e - e)) + (y.b << (y.e - e)), e);
}

Z4 neg(const Z4& x) { return x.zero ? x : make(-x.a, -x.b, x.e); }
Z4 sub(const Z4& x, const Z4& y) { return add(x, neg(y)); }

Z4 mul(const Z4& x, const Z4& y)
{
    if (x.zero || y.zero) return {};
    return make(x.a * y.a - x.b * y.b, x.a * y.b + x.b * y.a - x.b * y.b, x.e + y.e);
}

Int inv_mod(const Int& u)
{
    Int r, mod = Int(1) << kBits;
    mpz_invert(r.get_mpz_t(), u.get_mpz_t(), mod.get_mpz_t());
    return r;
}

long val(const Z4& x) { return x.zero ? long(kBits) * 4 : x.e; }

Z4 from_rat(const Rat& q)
{
    if (q == 0) return {};
    Int num = q.get_num(), den = q.get_den();
    long vn = vp(num, Int(2)), vd = vp(den, Int(2));
    num >>= vn;
    den >>= vd;
    return make(num * inv_mod(reduce(den)), 0, vn - vd);
}

bool unit_square_mod(const Z4& w, const Z4& u, unsigned bits)
{
    Z4 d = sub(mul(w, w), u);
    return val(d) >= long(bits);
}

Z4 inv(const Z4& x)
{
    if (x.zero) throw DomainError("division by zero in Z_2[w]");
    Int n = inv_mod(reduce(x.a * x.a - x.a * x.b + x.b * x.b));
    return make((x.a - x.b) * n, -x.b * n, -x.e);
}

// Square root of a unit, or nothing when it is not a square in Q_2(w).
std::optional<Z4> unit_sqrt(const Z4& u)
{
    for (int b0 = 0; b0 < 8; ++b0)
        for (int a0 = 0; a0 < 8; ++a0) {
            Z4 w = make(a0, b0, 0);
            if (w.zero || w.e != 0 || !unit_square_mod(w, u, 3)) continue;
            // Newton steps; the error valuation k becomes 2k - 2.
            for (unsigned k = 3; k < kBits; k = 2 * k - 2) {
                Z4 d = sub(u, mul(w, w));
                if (d.zero) break;
                w = add(w, mul(d, inv(mul(from_rat(2), w))));
            }
            return w;
        }
    return std::nullopt;
}

std::optional<Z4> sqrt4(const Z4& x)
{
    if (x.zero) return x;
    if (x.e % 2 != 0) return std::nullopt;
    auto r = unit_sqrt(make(x.a, x.b, 0));
    if (!r) return std::nullopt;
    r->e += x.e / 2;
    return r;
}

// Image of sqrt(m) in Q_2(w); absent when Q_2(sqrt m) is ramified.
std::optional<Z4> sqrt_m(const Int& m)
{
    Int r = reduce(m, 3);
    if (r == 1) return sqrt4(from_rat(Rat(m)));
    if (r == 5) {
        Rat q = Rat(-m) / 3;
        auto s = sqrt4(from_rat(q));
        if (!s) throw InternalError("-m/3 is not a 2-adic square");
        return mul(make(1, 2, 0), *s);
    }
    return std::nullopt;
}

Z4 embed(const QuadExt& x, const std::optional<Z4>& sm)
{
    Z4 out = from_rat(x.a);
    if (!x.is_rational()) out = add(out, mul(from_rat(x.b), *sm));
    return out;
}

std::optional<std::array<Z4, 2>> quad_roots(const Quad& q, const std::optional<Z4>& sm)
{
    Z4 B = embed(q.b, sm), Cc = embed(q.c, sm);
    Z4 D = sub(mul(B, B), mul(from_rat(4), Cc));
    auto s = sqrt4(D);
    if (!s) return std::nullopt;
    Z4 half = from_rat(Rat(1, 2));
    return std::array<Z4, 2>{mul(add(neg(B), *s), half), mul(sub(neg(B), *s), half)};
}

std::optional<std::array<Z4, 6>> roots2(const Curve& C, const std::optional<Z4>& sm)
{
    std::array<Z4, 6> out;
    const Quad* qs[] = {&C.r, &C.s, &C.t};
    for (int i = 0; i < 3; ++i) {
        auto r = quad_roots(*qs[i], sm);
        if (!r) return std::nullopt;
        out[2 * i] = (*r)[0];
        out[2 * i + 1] = (*r)[1];
    }
    return out;
}

bool congruent(const Z4& x, long n, unsigned k) { return val(sub(x, from_rat(Rat(n)))) >= long(k); }

bool pair_matches(const Z4& x, const Z4& y, long A, long B)
{
    return (congruent(x, A, 8) && congruent(y, B, 8)) || (congruent(x, B, 8) && congruent(y, A, 8));
}

std::vector<std::optional<Z4>> embeddings(const Int& m)
{
    if (m == 1) return {std::nullopt};
    auto s = sqrt_m(m);
    if (!s) return {};
    return {s, neg(*s)};
}

bool in_Q2(const Z4& x) { return x.zero || val(make(x.b, 0, x.e)) >= long(kBits) / 2; }

}  // namespace

bool in_family_F(const Curve& C)
{
    if (vp(C.c, Int(2)) != 0) return false;
    if (reduce(C.c.get_num() * inv_mod(reduce(C.c.get_den())), 3) != 7) return false;
    if (C.m != 1 && reduce(C.m, 3) != 1) return false;
    for (const auto& sm : embeddings(C.m)) {
        auto R = roots2(C, sm);
        if (!R) continue;
        if (!std::all_of(R->begin(), R->end(), in_Q2)) continue;
        if (!pair_matches((*R)[0], (*R)[1], -5, 5)) continue;
        if (pair_matches((*R)[2], (*R)[3], -4, -12) && pair_matches((*R)[4], (*R)[5], 2, -6)) return true;
        if (C.m == 1 && pair_matches((*R)[2], (*R)[3], 2, -6) && pair_matches((*R)[4], (*R)[5], -4, -12)) return true;
    }
    return false;
}

namespace {

// Rational z with x - z integral, when one exists.
std::optional<Rat> integral_shift(const Z4& x)
{
    if (x.zero || x.e >= 0) return Rat(0);
    if (val(make(x.b, 0, x.e)) < 0) return std::nullopt;
    Int a = reduce(x.a, unsigned(-x.e));
    Rat z = Rat(a) / Rat(Int(1) << unsigned(-x.e));
    z.canonicalize();
    return z;
}

std::optional<OrdinaryWitness> witness_on(const Curve& D, const std::string& label)
{
    auto embs = embeddings(D.m);
    if (embs.empty()) return std::nullopt;
    auto R = roots2(D, embs.front());
    if (!R) return std::nullopt;
    const auto& x = *R;
    long d = -1;
    for (int i = 0; i < 6; ++i)
        for (int j = i + 1; j < 6; ++j) {
            if (colour(i) == colour(j)) continue;
            long v = val(sub(x[i], x[j]));
            if (d < 0) d = v;
            if (v != d) return std::nullopt;
        }
    for (int i = 0; i < 3; ++i)
        if (val(sub(x[2 * i], x[2 * i + 1])) != d + 2) return std::nullopt;
    Rat scale = d >= 0 ? Rat(1) / Rat(Int(1) << unsigned(d)) : Rat(Int(1) << unsigned(-d));
    Z4 a1 = mul(x[0], from_rat(scale));
    auto z = integral_shift(a1);
    if (!z) return std::nullopt;
    Mat2 M{scale, -*z, 0, 1};
    Curve N = mobius_transform(D, M);
    long vc = vp(N.c, Int(2));
    if (vc % 2 != 0) return std::nullopt;
    Rat u;
    if (vc >= 0) mpq_div_2exp(u.get_mpq_t(), N.c.get_mpq_t(), vc);
    else mpq_mul_2exp(u.get_mpq_t(), N.c.get_mpq_t(), -vc);
    if (reduce(u.get_num() * inv_mod(reduce(u.get_den())), 2) != 1) return std::nullopt;
    InvariantSet I = invariants(N);
    if (I.degenerate()) return std::nullopt;
    auto v2 = [](const Rat& q) { return q == 0 ? -1000L : vp(q, Int(2)); };
    bool units = v2(I.d2_plus_d3) == 4 && v2(I.d2e2_plus_d3e3) == 5 && v2(I.dh2e3_plus_dh3e2) == 3;
    std::ostringstream os;
    os << "good ordinary model (" << label << ", x -> " << str(scale) << "*x - " << str(*z) << ")"
       << (units ? " with unit invariants" : " without unit invariants");
    return OrdinaryWitness{N, os.str(), units};
}

}  // namespace

std::optional<OrdinaryWitness> detect_good_ordinary_2adic(const Curve& C)
{
    Curve C0 = center(C);
    std::optional<OrdinaryWitness> first;
    for (long t = 0; t <= 15; ++t) {
        Curve D = C0;
        if (t > 0) {
            try {
                D = mobius_transform(C0, shift_matrix(C0, t));
            } catch (const DomainError&) {
                continue;
            }
        }
        auto w = witness_on(D, t == 0 ? "centered model" : "centered model shifted by t=" + std::to_string(t));
        if (!w) continue;
        if (w->unit_conditions) return w;
        if (!first) first = w;
    }
    return first;
}

LocalData local_2adic(const Curve& C)
{
    LocalData out;
    out.place = Place::prime(2);
    InvariantSet I = invariants(C);
    out.E = error_term_E(I, C.c, out.place);
    bool fam = in_family_F(C);
    auto wit = detect_good_ordinary_2adic(C);
    if (!fam && !wit) {
        out.reason = "neither the family congruences nor a good ordinary model apply at 2";
        return out;
    }
    out.supported = true;
    out.lambda = 1;
    out.w = 1;
    out.cJ = 1;
    out.cJh = 1;
    std::string desc;
    if (fam) desc = "family F congruences mod 2^8";
    if (wit) desc += (fam ? "; " : "") + wit->description;
    out.description = desc;
    out.e_asserted = fam || wit->unit_conditions;
    if (out.e_asserted && out.E != 1) out.issues.push_back("E = -1 although the certificate predicts E = 1");
    return out;
}

LocalData local_data(const Curve& C, const Place& v)
{
    if (v.real) return local_real(C);
    if (v.p == 2) return local_2adic(C);
    return local_odd(C, v.p);
}

}  // namespace c2d4
