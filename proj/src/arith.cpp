#include "c2d4/arith.hpp"

#include <algorithm>
#include <cctype>

namespace c2d4 {

namespace {

// Rational unit at p mapped to Z/p^k.
Int unit_mod(const Rat& u, const Int& modulus)
{
    Int inv;
    Int den = u.get_den();
    if (mpz_invert(inv.get_mpz_t(), den.get_mpz_t(), modulus.get_mpz_t()) == 0)
        throw DomainError("denominator not invertible");
    Int r = Int(u.get_num() * inv) % modulus;
    if (r < 0) r += modulus;
    return r;
}

Rat strip(const Rat& x, const Int& p, long& v)
{
    Int num = x.get_num(), den = x.get_den();
    v = 0;
    v += mpz_remove(num.get_mpz_t(), num.get_mpz_t(), p.get_mpz_t());
    v -= mpz_remove(den.get_mpz_t(), den.get_mpz_t(), p.get_mpz_t());
    return Rat(num, den);
}

Int pollard_brent(const Int& n, unsigned long seed)
{
    if (n % 2 == 0) return 2;
    Int y = seed % n, c = (seed * 7 + 1) % n, m = 128, g = 1, r = 1, q = 1, x, ys;
    auto f = [&](const Int& z) { return Int((z * z + c) % n); };
    while (g == 1) {
        x = y;
        for (Int i = 0; i < r; ++i) y = f(y);
        Int k = 0;
        while (k < r && g == 1) {
            ys = y;
            for (Int i = 0; i < m && i < r - k; ++i) {
                y = f(y);
                q = q * abs(x - y) % n;
            }
            mpz_gcd(g.get_mpz_t(), q.get_mpz_t(), n.get_mpz_t());
            k += m;
        }
        r *= 2;
    }
    if (g == n) {
        do {
            ys = f(ys);
            Int d = abs(x - ys);
            mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
        } while (g == 1);
    }
    return g;
}

void factor_into(Int n, std::vector<Int>& out)
{
    if (n == 1) return;
    if (is_prime(n)) {
        out.push_back(n);
        return;
    }
    for (unsigned long seed = 2;; ++seed) {
        Int d = pollard_brent(n, seed);
        if (d != n && d != 1) {
            factor_into(d, out);
            factor_into(n / d, out);
            return;
        }
    }
}

int eps2(const Int& u) { return Int((u - 1) / 2 % 2) == 0 ? 0 : 1; }
int omega2(const Int& u) { return Int((u * u - 1) / 8 % 2) == 0 ? 0 : 1; }

}  // namespace

Rat parse_rational(const std::string& text)
{
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch))) s += ch;
    auto bad = [&] { return DomainError("malformed rational '" + text + "'"); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto valid_int = [](const std::string& t, bool allow_sign) {
        size_t i = 0;
        if (allow_sign && !t.empty() && (t[0] == '-' || t[0] == '+')) i = 1;
        if (i >= t.size()) return false;
        return std::all_of(t.begin() + i, t.end(), [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); });
    };
    std::string num = s.substr(0, slash), den = slash == std::string::npos ? "1" : s.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false)) throw bad();
    if (num[0] == '+') num = num.substr(1);
    Int d(den);
    if (d == 0) throw DomainError("zero denominator in '" + text + "'");
    Rat x(Int(num), d);
    x.canonicalize();
    return x;
}

std::string str(const Rat& x) { return x.get_str(); }
std::string str(const Int& x) { return x.get_str(); }

long vp(const Int& x, const Int& p)
{
    if (x == 0) throw DomainError("valuation of zero");
    Int t = x;
    return static_cast<long>(mpz_remove(t.get_mpz_t(), t.get_mpz_t(), p.get_mpz_t()));
}

long vp(const Rat& x, const Int& p)
{
    if (x == 0) throw DomainError("valuation of zero");
    return vp(x.get_num(), p) - vp(x.get_den(), p);
}

bool is_prime(const Int& n) { return n >= 2 && mpz_probab_prime_p(n.get_mpz_t(), 40) > 0; }

std::vector<Int> prime_factors(const Int& n0)
{
    Int n = abs(n0);
    std::vector<Int> out;
    if (n == 0) throw DomainError("factoring zero");
    for (unsigned long q = 2; q < 20000 && n > 1; ++q) {
        if (Int(n % q) == 0) {
            out.push_back(q);
            while (Int(n % q) == 0) n /= q;
        }
    }
    factor_into(n, out);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool is_squarefree(const Int& n)
{
    if (n == 0) return false;
    for (const Int& q : prime_factors(n))
        if (Int(n % (q * q)) == 0) return false;
    return true;
}

bool is_square(const Rat& x)
{
    return x >= 0 && mpz_perfect_square_p(x.get_num().get_mpz_t()) && mpz_perfect_square_p(x.get_den().get_mpz_t());
}

int legendre(const Int& a, const Int& p)
{
    Int r = a % p;
    if (r < 0) r += p;
    return mpz_legendre(r.get_mpz_t(), p.get_mpz_t());
}

Int sqrt_mod_prime(const Int& a0, const Int& p)
{
    Int a = a0 % p;
    if (a < 0) a += p;
    if (a == 0 || p == 2) return a;
    if (legendre(a, p) != 1) throw DomainError("not a quadratic residue");
    Int q = p - 1;
    unsigned long s = mpz_remove(q.get_mpz_t(), q.get_mpz_t(), Int(2).get_mpz_t());
    Int z = 2;
    while (legendre(z, p) != -1) ++z;
    Int c, r, t, e;
    mpz_powm(c.get_mpz_t(), z.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    e = (q + 1) / 2;
    mpz_powm(r.get_mpz_t(), a.get_mpz_t(), e.get_mpz_t(), p.get_mpz_t());
    mpz_powm(t.get_mpz_t(), a.get_mpz_t(), q.get_mpz_t(), p.get_mpz_t());
    unsigned long mexp = s;
    while (t != 1) {
        unsigned long i = 0;
        Int tt = t;
        while (tt != 1) {
            tt = tt * tt % p;
            ++i;
        }
        Int b = c;
        for (unsigned long j = 0; j + i + 1 < mexp; ++j) b = b * b % p;
        r = r * b % p;
        c = b * b % p;
        t = t * c % p;
        mexp = i;
    }
    return std::min(r, Int(p - r));
}

Place Place::prime(const Int& q)
{
    if (!is_prime(q)) throw DomainError("place must be a prime, got " + q.get_str());
    Place v;
    v.real = false;
    v.p = q;
    return v;
}

std::string Place::name() const { return real ? "real" : p.get_str(); }

bool Place::operator<(const Place& o) const
{
    if (real != o.real) return real;
    return p < o.p;
}

int hilbert_symbol(const Rat& a, const Rat& b, const Place& v)
{
    if (a == 0 || b == 0) throw DomainError("Hilbert symbol of zero");
    if (v.real) return (a < 0 && b < 0) ? -1 : 1;
    const Int& p = v.p;
    long al, be;
    Rat u = strip(a, p, al), w = strip(b, p, be);
    if (p == 2) {
        Int uu = unit_mod(u, 8), ww = unit_mod(w, 8);
        int e = eps2(uu) * eps2(ww) + (al & 1) * omega2(ww) + (be & 1) * omega2(uu);
        return e % 2 ? -1 : 1;
    }
    int s = 1;
    if ((al & 1) && (be & 1) && Int(p % 4) == 3) s = -s;
    if (be & 1) s *= legendre(unit_mod(u, p), p);
    if (al & 1) s *= legendre(unit_mod(w, p), p);
    return s;
}

int hilbert_product_check(const Rat& a, const Rat& b)
{
    if (a == 0 || b == 0) throw DomainError("Hilbert symbol of zero");
    int s = hilbert_symbol(a, b, Place::inf());
    Int prod = 2 * a.get_num() * a.get_den() * b.get_num() * b.get_den();
    for (const Int& q : prime_factors(prod)) s *= hilbert_symbol(a, b, Place::prime(q));
    return s;
}

std::string str(SquareClass c)
{
    switch (c) {
    case SquareClass::Square: return "square";
    case SquareClass::UnramifiedNonSquare: return "unramified non-square";
    case SquareClass::Uniformizer: return "uniformizer class";
    default: return "ramified non-square";
    }
}

SquareClass square_class(const Rat& x, const Place& v)
{
    if (x == 0) throw DomainError("square class of zero");
    if (v.real) return x > 0 ? SquareClass::Square : SquareClass::OtherNonSquare;
    long k;
    Rat u = strip(x, v.p, k);
    if (k & 1) return SquareClass::Uniformizer;
    if (v.p == 2) {
        Int r = unit_mod(u, 8);
        if (r == 1) return SquareClass::Square;
        if (r == 5) return SquareClass::UnramifiedNonSquare;
        return SquareClass::OtherNonSquare;
    }
    return legendre(unit_mod(u, v.p), v.p) == 1 ? SquareClass::Square : SquareClass::UnramifiedNonSquare;
}

QuadExt::QuadExt(const Rat& x, const Rat& y, const Int& mm) : a(x), b(y), m(mm)
{
    if (m == 1) {
        a += b;
        b = 0;
    }
}

QuadExt QuadExt::conj() const { return QuadExt(a, -b, m); }

Rat QuadExt::to_rational() const
{
    if (b != 0) throw InternalError("expected a rational value, got " + str(*this));
    return a;
}

Int common_m(const QuadExt& x, const QuadExt& y)
{
    if (x.b == 0) return y.m;
    if (y.b == 0) return x.m;
    if (x.m != y.m) throw DomainError("mixing different quadratic fields");
    return x.m;
}

QuadExt QuadExt::operator-() const { return QuadExt(-a, -b, m); }
QuadExt operator+(const QuadExt& x, const QuadExt& y) { return QuadExt(x.a + y.a, x.b + y.b, common_m(x, y)); }
QuadExt operator-(const QuadExt& x, const QuadExt& y) { return QuadExt(x.a - y.a, x.b - y.b, common_m(x, y)); }

QuadExt operator*(const QuadExt& x, const QuadExt& y)
{
    Int m = common_m(x, y);
    return QuadExt(x.a * y.a + x.b * y.b * m, x.a * y.b + x.b * y.a, m);
}

QuadExt operator/(const QuadExt& x, const QuadExt& y)
{
    if (y.is_zero()) throw DomainError("division by zero");
    Rat n = y.norm();
    QuadExt q = x * y.conj();
    return QuadExt(q.a / n, q.b / n, common_m(x, y));
}

bool QuadExt::operator==(const QuadExt& y) const
{
    if (b == 0 && y.b == 0) return a == y.a;
    return a == y.a && b == y.b && m == y.m;
}

std::string str(const QuadExt& x)
{
    if (x.b == 0) return str(x.a);
    return "(" + str(x.a) + ")+(" + str(x.b) + ")*sqrt(" + x.m.get_str() + ")";
}

QuadExt pow(const QuadExt& x, unsigned k)
{
    QuadExt r(1);
    for (unsigned i = 0; i < k; ++i) r *= x;
    return r;
}

int real_sign(const QuadExt& x)
{
    int sa = sgn(x.a), sb = sgn(x.b);
    if (sb == 0) return sa;
    if (x.m < 0) throw DomainError("complex value has no sign");
    if (sa == 0) return sb;
    if (sa == sb) return sa;
    Rat d = x.a * x.a - x.b * x.b * x.m;
    return sgn(d) * sa;
}

}  // namespace c2d4
