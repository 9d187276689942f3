#include "c2d4/padic.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>

namespace c2d4 {

namespace {

std::atomic<long> g_start{32};

long sat(long a, long b) { return std::min(a + b, kExact); }

}  // namespace

long default_precision() { return g_start.load(); }
void set_default_precision(long n) { g_start = std::max(2L, n); }

long precision_cap()
{
    if (const char* env = std::getenv("C2D4_PRECISION_CAP")) {
        long v = std::atol(env);
        if (v > 0) return v;
    }
    return 4096;
}

Tower::Tower(const Int& p, long precision) : p_(p), N_(precision) {}

const Int& Tower::pw(long k) const
{
    if (k < 0) throw InternalError("negative power of p");
    if (pw_.empty()) pw_.push_back(1);
    while (static_cast<long>(pw_.size()) <= k) pw_.push_back(pw_.back() * p_);
    return pw_[k];
}

long Tower::ram_index(int k) const
{
    long e = 1;
    for (int j = 0; j < k; ++j)
        if (levels_[j].ramified) e *= 2;
    return e;
}

Padic Tower::norm(Int u, long v, long prec) const
{
    prec = std::min(prec, kExact);
    if (u == 0 || v >= prec) return zero_padic(prec);
    v += static_cast<long>(mpz_remove(u.get_mpz_t(), u.get_mpz_t(), p_.get_mpz_t()));
    if (v >= prec) return zero_padic(prec);
    if (prec < kExact) {
        const Int& mod = pw(prec - v);
        u %= mod;
        if (u < 0) u += mod;
        if (u == 0) return zero_padic(prec);
    }
    return Padic{u, v, prec};
}

Padic Tower::padic(const Rat& x) const
{
    if (x == 0) return zero_padic();
    long v = vp(x, p_);
    Int num = x.get_num(), den = x.get_den();
    mpz_remove(num.get_mpz_t(), num.get_mpz_t(), p_.get_mpz_t());
    mpz_remove(den.get_mpz_t(), den.get_mpz_t(), p_.get_mpz_t());
    const Int& mod = pw(N_);
    Int inv;
    mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t());
    return norm(num * inv, v, v + N_);
}

Rat Tower::truncate(const Padic& x, long digits) const
{
    if (x.zero()) return 0;
    Int u = x.u % pw(std::max(1L, digits));
    Rat r(u);
    if (x.v >= 0) r *= pw(x.v);
    else r /= pw(-x.v);
    return r;
}

Padic Tower::padd(const Padic& x, const Padic& y) const
{
    long prec = std::min(x.prec, y.prec);
    if (x.zero() && y.zero()) return zero_padic(prec);
    if (x.zero()) return norm(y.u, y.v, prec);
    if (y.zero()) return norm(x.u, x.v, prec);
    long v = std::min(x.v, y.v);
    if (v >= prec) return zero_padic(prec);
    Int u = x.u * pw(x.v - v) + y.u * pw(y.v - v);
    return norm(u, v, prec);
}

Padic Tower::pneg(const Padic& x) const
{
    if (x.zero()) return x;
    return norm(-x.u, x.v, x.prec);
}

Padic Tower::pmul(const Padic& x, const Padic& y) const
{
    long vx = x.zero() ? x.prec : x.v, vy = y.zero() ? y.prec : y.v;
    long prec = std::min(sat(x.prec, vy), sat(y.prec, vx));
    if (x.zero() || y.zero()) return zero_padic(std::min(prec, sat(vx, vy)));
    return norm(x.u * y.u, x.v + y.v, prec);
}

Padic Tower::pinv(const Padic& x) const
{
    if (x.zero()) throw PrecisionError("inverting a value indistinguishable from zero");
    if (x.prec >= kExact) {
        if (x.u != 1) throw InternalError("exact non-unit coordinate");
        return Padic{1, -x.v, kExact};
    }
    long rel = x.prec - x.v;
    Int inv;
    mpz_invert(inv.get_mpz_t(), x.u.get_mpz_t(), pw(rel).get_mpz_t());
    return norm(inv, -x.v, -x.v + rel);
}

std::optional<Padic> Tower::psqrt_unit(const Padic& x) const
{
    if (x.zero() || x.v != 0) throw InternalError("square root of a non-unit coordinate");
    long rel = std::min(x.prec, N_ + 8);
    if (p_ == 2) {
        if (rel < 3) throw PrecisionError("2-adic unit known to fewer than 3 bits");
        if (Int(x.u % 8) != 1) return std::nullopt;
        Int w = 1;
        for (long i = 3; i < rel; ++i) {
            Int d = w * w - x.u;
            if (Int(d % pw(i + 1)) != 0) w += pw(i - 1);
        }
        Int mod = pw(rel - 1);
        w %= mod;
        if (Int(w % 4) == 3) w = mod - w;
        return norm(w, 0, rel - 1);
    }
    if (legendre(x.u, p_) != 1) return std::nullopt;
    Int w = sqrt_mod_prime(x.u, p_);
    long have = 1;
    while (have < rel) {
        have = std::min(2 * have, rel);
        const Int& mod = pw(have);
        Int inv, two_w = 2 * w;
        mpz_invert(inv.get_mpz_t(), two_w.get_mpz_t(), mod.get_mpz_t());
        w = (w - (w * w - x.u) * inv) % mod;
        if (w < 0) w += mod;
    }
    return norm(w, 0, rel);
}

int Tower::level_of(const Elem& x) const
{
    int k = 0;
    while ((size_t(1) << k) < x.size()) ++k;
    return k;
}

Tower::Elem Tower::from_rat(const Rat& x) const { return Elem{padic(x)}; }

Tower::Elem Tower::lift(const Elem& x, size_t size) const
{
    if (x.size() >= size) return x;
    Elem r = x;
    r.resize(size, zero_padic());
    return r;
}

Tower::Elem Tower::gen(int j) const
{
    Elem g(size_t(1) << j, zero_padic());
    g[size_t(1) << (j - 1)] = padic(1);
    return g;
}

Tower::Elem Tower::uniformizer(int k) const
{
    for (int j = k; j >= 1; --j)
        if (levels_[j - 1].ramified) return gen(j);
    return from_rat(Rat(p_));
}

Tower::Elem Tower::add(const Elem& x, const Elem& y) const
{
    size_t n = std::max(x.size(), y.size());
    Elem a = lift(x, n), b = lift(y, n);
    for (size_t i = 0; i < n; ++i) a[i] = padd(a[i], b[i]);
    return a;
}

Tower::Elem Tower::neg(const Elem& x) const
{
    Elem r = x;
    for (auto& c : r) c = pneg(c);
    return r;
}

Tower::Elem Tower::sub(const Elem& x, const Elem& y) const { return add(x, neg(y)); }

Tower::Elem Tower::mul_at(const Elem& x, const Elem& y, int k) const
{
    if (k == 0) return Elem{pmul(x[0], y[0])};
    size_t h = size_t(1) << (k - 1);
    Elem x0(x.begin(), x.begin() + h), x1(x.begin() + h, x.end());
    Elem y0(y.begin(), y.begin() + h), y1(y.begin() + h, y.end());
    Elem a = mul_at(x0, y0, k - 1);
    Elem b = mul_at(mul_at(x1, y1, k - 1), levels_[k - 1].theta.size() == h ? levels_[k - 1].theta : lift(levels_[k - 1].theta, h), k - 1);
    Elem c = add(mul_at(x0, y1, k - 1), mul_at(x1, y0, k - 1));
    Elem r = add(a, b);
    r.insert(r.end(), c.begin(), c.end());
    return r;
}

Tower::Elem Tower::mul(const Elem& x, const Elem& y) const
{
    size_t n = std::max(x.size(), y.size());
    Elem a = lift(x, n), b = lift(y, n);
    if (y.size() == 1) {
        for (auto& c : a) c = pmul(c, y[0]);
        return a;
    }
    if (x.size() == 1) {
        for (auto& c : b) c = pmul(c, x[0]);
        return b;
    }
    return mul_at(a, b, level_of(a));
}

Tower::Elem Tower::norm_at(const Elem& x, int k) const
{
    size_t h = size_t(1) << (k - 1);
    Elem x0(x.begin(), x.begin() + h), x1(x.begin() + h, x.end());
    Elem t = lift(levels_[k - 1].theta, h);
    return sub(mul_at(x0, x0, k - 1), mul_at(mul_at(x1, x1, k - 1), t, k - 1));
}

Tower::Elem Tower::inv_at(const Elem& x, int k) const
{
    if (k == 0) return Elem{pinv(x[0])};
    size_t h = size_t(1) << (k - 1);
    Elem ni = inv_at(norm_at(x, k), k - 1);
    Elem x0(x.begin(), x.begin() + h), x1(x.begin() + h, x.end());
    Elem a = mul_at(x0, ni, k - 1), b = neg(mul_at(x1, ni, k - 1));
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

Tower::Elem Tower::inv(const Elem& x) const { return inv_at(x, level_of(x)); }

Tower::Elem Tower::pow(const Elem& x, long k) const
{
    if (k < 0) return pow(inv(x), -k);
    return pow(x, Int(k));
}

Tower::Elem Tower::pow(const Elem& x, const Int& k) const
{
    Elem r = lift(one(), x.size()), b = x;
    size_t bits = mpz_sizeinbase(k.get_mpz_t(), 2);
    for (size_t i = 0; i < bits; ++i) {
        if (mpz_tstbit(k.get_mpz_t(), i)) r = mul(r, b);
        if (i + 1 < bits) b = mul(b, b);
    }
    return r;
}

std::pair<Rat, bool> Tower::val_at(const Elem& x, int k) const
{
    if (k == 0) {
        if (x[0].zero()) return {Rat(x[0].prec), false};
        return {Rat(x[0].v), true};
    }
    size_t h = size_t(1) << (k - 1);
    Elem x0(x.begin(), x.begin() + h), x1(x.begin() + h, x.end());
    auto [a, ea] = val_at(x0, k - 1);
    auto [b, eb] = val_at(x1, k - 1);
    if (levels_[k - 1].ramified) b += Rat(1, 2 * ram_index(k - 1));
    if (ea && eb) return {std::min(a, b), true};
    if (ea && a < b) return {a, true};
    if (eb && b < a) return {b, true};
    return {std::min(a, b), false};
}

std::pair<Rat, bool> Tower::val_bound(const Elem& x) const { return val_at(x, level_of(x)); }

Rat Tower::val(const Elem& x) const
{
    auto [v, exact] = val_bound(x);
    if (!exact) throw PrecisionError("value indistinguishable from zero");
    return v;
}

Tower::Elem Tower::scale_by_uniformizer(const Elem& x, int k, long n) const
{
    if (n == 0) return x;
    Elem pi = uniformizer(k);
    bool ram = ram_index(k) > 1;
    if (!ram) {
        Elem r = x;
        for (auto& c : r)
            if (!c.zero() || c.prec < kExact) c = Padic{c.u, c.v + n, c.prec >= kExact ? kExact : c.prec + n};
        return r;
    }
    return mul(x, pow(pi, n));
}

bool Tower::unit_square_at(const Elem& u, int k) const
{
    if (k == 0) {
        if (u[0].zero() || u[0].v != 0) throw InternalError("expected a unit");
        if (p_ == 2) {
            if (u[0].prec < 3) throw PrecisionError("2-adic unit known to fewer than 3 bits");
            return Int(u[0].u % 8) == 1;
        }
        return legendre(u[0].u, p_) == 1;
    }
    if (levels_[k - 1].ramified) return unit_square_at(Elem(u.begin(), u.begin() + (u.size() / 2)), k - 1);
    return unit_square_at(norm_at(u, k), k - 1);
}

bool Tower::is_square_at(const Elem& x0, int k) const
{
    Elem x = lift(x0, size_t(1) << k);
    Rat v = val_at(x, k).second ? val_at(x, k).first : throw PrecisionError("square test of zero");
    Rat ne = v * ram_index(k);
    if (ne.get_den() != 1) throw InternalError("valuation outside the value group");
    long n = ne.get_num().get_si();
    if (n % 2 != 0) return false;
    if (p_ == 2 && k > 0) throw DomainError("2-adic towers are not supported");
    return unit_square_at(scale_by_uniformizer(x, k, -n), k);
}

bool Tower::is_square(const Elem& x) const { return is_square_at(x, levels()); }

std::optional<Tower::Elem> Tower::sqrt_unit_at(const Elem& u, int k) const
{
    if (k == 0) {
        auto s = psqrt_unit(u[0]);
        if (!s) return std::nullopt;
        return Elem{*s};
    }
    size_t h = size_t(1) << (k - 1);
    Elem a(u.begin(), u.begin() + h), b(u.begin() + h, u.end());
    Elem th = lift(levels_[k - 1].theta, h);
    Elem nn = sub(mul_at(a, a, k - 1), mul_at(mul_at(b, b, k - 1), th, k - 1));
    auto n = sqrt_at(nn, k - 1);
    if (!n) return std::nullopt;
    Elem half = lift(from_rat(Rat(1, 2)), h);
    Elem zp = mul_at(add(a, *n), half, k - 1), zm = mul_at(sub(a, *n), half, k - 1);
    auto vp_ = val_at(zp, k - 1), vm_ = val_at(zm, k - 1);
    Elem big;
    if (vp_.second && (!vm_.second || vp_.first <= vm_.first)) big = zp;
    else if (vm_.second) big = zm;
    else throw PrecisionError("square root cancellation");
    std::vector<Elem> cands{big};
    if (!indistinguishable_from_zero(b)) {
        Elem small = mul_at(mul_at(mul_at(b, b, k - 1), th, k - 1), inv_at(mul_at(big, lift(from_rat(4), h), k - 1), k - 1), k - 1);
        if (!indistinguishable_from_zero(small)) cands.push_back(small);
    }
    for (const Elem& z : cands) {
        auto c = sqrt_at(z, k - 1);
        if (!c) continue;
        Elem d = mul_at(b, inv_at(mul_at(*c, lift(from_rat(2), h), k - 1), k - 1), k - 1);
        Elem r = *c;
        r.insert(r.end(), d.begin(), d.end());
        return r;
    }
    if (indistinguishable_from_zero(b)) {
        auto d = sqrt_at(mul_at(a, inv_at(th, k - 1), k - 1), k - 1);
        if (d) {
            Elem r(h, zero_padic());
            r.insert(r.end(), d->begin(), d->end());
            return r;
        }
    }
    return std::nullopt;
}

std::optional<Tower::Elem> Tower::sqrt_at(const Elem& x0, int k) const
{
    Elem x = lift(x0, size_t(1) << k);
    auto [v, exact] = val_at(x, k);
    if (!exact) throw PrecisionError("square root of a value indistinguishable from zero");
    Rat ne = v * ram_index(k);
    if (ne.get_den() != 1) throw InternalError("valuation outside the value group");
    long n = ne.get_num().get_si();
    if (n % 2 != 0) return std::nullopt;
    if (p_ == 2 && k > 0) throw DomainError("2-adic towers are not supported");
    auto s = sqrt_unit_at(scale_by_uniformizer(x, k, -n), k);
    if (!s) return std::nullopt;
    Elem r = scale_by_uniformizer(*s, k, n / 2);
    canonicalize(r);
    return r;
}

std::optional<Tower::Elem> Tower::sqrt(const Elem& x) const { return sqrt_at(x, levels()); }

void Tower::canonicalize(Elem& x) const
{
    for (const auto& c : x) {
        if (c.zero()) continue;
        Int r = c.u % (p_ == 2 ? Int(4) : p_);
        bool flip = p_ == 2 ? r == 3 : 2 * r > p_;
        if (flip) x = neg(x);
        return;
    }
}

Tower::Elem Tower::sqrt_or_adjoin(const Elem& x)
{
    if (auto s = sqrt(x)) return *s;
    if (p_ == 2) throw DomainError("2-adic towers are not supported");
    int K = levels();
    Elem xl = lift(x);
    Rat ne = val(xl) * ram_index(K);
    long n = ne.get_num().get_si();
    long q = (n >= 0) ? n / 2 : -((-n + 1) / 2);
    long rho = n - 2 * q;
    Elem theta = scale_by_uniformizer(xl, K, -2 * q);
    Elem pi = uniformizer(K);
    levels_.push_back(Level{theta, rho == 1});
    Elem root = gen(K + 1);
    if (q != 0) root = mul(root, lift(pow(pi, q), top_size()));
    return root;
}

}  // namespace c2d4
