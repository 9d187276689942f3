#include "c2d4/model.hpp"

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

namespace c2d4 {

Quad Quad::shifted(const QuadExt& z) const { return {2 * z + b, z * z + b * z + c}; }

QuadExt resultant(const Quad& f, const Quad& g)
{
    QuadExt dc = f.c - g.c, db = f.b - g.b;
    return dc * dc - db * (g.b * f.c - f.b * g.c);
}

void Curve::validate() const
{
    if (c == 0) throw DomainError("leading coefficient is zero");
    if (m == 0 || !is_squarefree(m)) throw DomainError("m must be a nonzero squarefree integer");
    if (!r.b.is_rational() || !r.c.is_rational()) throw DomainError("r must have rational coefficients");
    for (const QuadExt* x : {&s.b, &s.c, &t.b, &t.c})
        if (!x->is_rational() && x->m != m) throw DomainError("coefficient lies outside Q(sqrt m)");
    bool rational = s.b.is_rational() && s.c.is_rational() && t.b.is_rational() && t.c.is_rational();
    if (!rational && !(t == s.conj())) throw DomainError("s and t are not Galois conjugate (sextic not rational)");
    if (r.disc().is_zero() || s.disc().is_zero() || t.disc().is_zero()) throw DomainError("repeated root inside a quadratic factor");
    if (resultant(r, s).is_zero() || resultant(r, t).is_zero() || resultant(s, t).is_zero())
        throw DomainError("quadratic factors share a root (zero resultant)");
}

namespace {

class Parser {
public:
    explicit Parser(const std::string& text)
    {
        std::istringstream in(text);
        std::string line;
        while (std::getline(in, line)) {
            auto hash = line.find('#');
            if (hash != std::string::npos) line.resize(hash);
            for (char ch : line)
                if (!std::isspace(static_cast<unsigned char>(ch))) s_ += ch;
        }
    }

    std::map<std::string, std::string> statements()
    {
        std::map<std::string, std::string> out;
        while (i_ < s_.size()) {
            std::string key;
            while (i_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[i_]))) key += s_[i_++];
            if (key.empty()) fail("expected a key");
            if (i_ >= s_.size() || (s_[i_] != '=' && s_[i_] != ':')) fail("expected '=' after " + key);
            ++i_;
            size_t start = i_;
            skip_value();
            if (out.count(key)) fail("duplicate key " + key);
            out[key] = s_.substr(start, i_ - start);
            if (i_ < s_.size() && (s_[i_] == ';' || s_[i_] == ',')) ++i_;
        }
        return out;
    }

private:
    std::string s_;
    size_t i_ = 0;

    [[noreturn]] void fail(const std::string& msg) const { throw DomainError("curve spec: " + msg); }

    void skip_value()
    {
        if (i_ < s_.size() && s_[i_] == '[') {
            int depth = 0;
            do {
                if (s_[i_] == '[') ++depth;
                if (s_[i_] == ']') --depth;
                ++i_;
            } while (i_ < s_.size() && depth > 0);
            if (depth != 0) fail("unbalanced brackets");
            return;
        }
        size_t start = i_;
        while (i_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[i_])) || s_[i_] == '/' || ((s_[i_] == '-' || s_[i_] == '+') && i_ == start)))
            ++i_;
        if (i_ == start) fail("expected a value");
    }
};

// Splits "[x,y]" at its top-level comma.
std::pair<std::string, std::string> split_pair(const std::string& v)
{
    if (v.size() < 2 || v.front() != '[' || v.back() != ']') throw DomainError("curve spec: expected [x, y], got " + v);
    std::string in = v.substr(1, v.size() - 2);
    int depth = 0;
    for (size_t i = 0; i < in.size(); ++i) {
        if (in[i] == '[') ++depth;
        if (in[i] == ']') --depth;
        if (in[i] == ',' && depth == 0) return {in.substr(0, i), in.substr(i + 1)};
    }
    throw DomainError("curve spec: expected two entries in " + v);
}

QuadExt parse_entry(const std::string& v, const Int& m)
{
    if (!v.empty() && v.front() == '[') {
        auto [a, b] = split_pair(v);
        return QuadExt(parse_rational(a), parse_rational(b), m);
    }
    return QuadExt(parse_rational(v));
}

Quad parse_quad(const std::string& v, const Int& m)
{
    auto [b, c] = split_pair(v);
    return {parse_entry(b, m), parse_entry(c, m)};
}

std::string fmt_entry(const QuadExt& x, bool pair)
{
    if (!pair) return str(x.a);
    return "[" + str(x.a) + ", " + str(x.b) + "]";
}

}  // namespace

Curve parse_curve(const std::string& text)
{
    auto st = Parser(text).statements();
    for (const char* k : {"c", "r", "s", "t"})
        if (!st.count(k)) throw DomainError(std::string("curve spec: missing key ") + k);
    for (const auto& [k, v] : st)
        if (k != "c" && k != "m" && k != "r" && k != "s" && k != "t") throw DomainError("curve spec: unknown key " + k);
    Curve C;
    C.c = parse_rational(st["c"]);
    if (st.count("m")) {
        Rat m = parse_rational(st["m"]);
        if (m.get_den() != 1) throw DomainError("curve spec: m must be an integer");
        C.m = m.get_num();
    }
    if (C.m == 0 || !is_squarefree(C.m)) throw DomainError("m must be a nonzero squarefree integer");
    C.r = parse_quad(st["r"], 1);
    if (!C.r.b.is_rational() || !C.r.c.is_rational()) throw DomainError("r must have rational coefficients");
    C.s = parse_quad(st["s"], C.m);
    C.t = parse_quad(st["t"], C.m);
    C.validate();
    return C;
}

Curve read_curve_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_curve(ss.str());
}

std::string format_curve(const Curve& C)
{
    bool pair = C.m != 1;
    std::ostringstream o;
    o << "c = " << str(C.c) << "\n";
    o << "m = " << C.m.get_str() << "\n";
    o << "r = [" << str(C.r.b.a) << ", " << str(C.r.c.a) << "]\n";
    o << "s = [" << fmt_entry(C.s.b, pair) << ", " << fmt_entry(C.s.c, pair) << "]\n";
    o << "t = [" << fmt_entry(C.t.b, pair) << ", " << fmt_entry(C.t.c, pair) << "]\n";
    return o.str();
}

Curve curve_from_roots(const Rat& c, const std::array<Rat, 6>& x)
{
    Curve C;
    C.c = c;
    auto q = [](const Rat& a, const Rat& b) { return Quad{QuadExt(-(a + b)), QuadExt(a * b)}; };
    C.r = q(x[0], x[1]);
    C.s = q(x[2], x[3]);
    C.t = q(x[4], x[5]);
    C.validate();
    return C;
}

Curve center(const Curve& C)
{
    QuadExt z = C.r.b * Rat(-1, 2);
    if (z.is_zero()) return C;
    Curve D = C;
    D.r = C.r.shifted(z);
    D.s = C.s.shifted(z);
    D.t = C.t.shifted(z);
    return D;
}

InvariantSet invariants(const Curve& C0)
{
    Curve C = center(C0);
    InvariantSet I;
    const QuadExt d1 = -C.r.c;
    const QuadExt b2 = C.s.b, c2 = C.s.c, b3 = C.t.b, c3 = C.t.c;
    const QuadExt sg2 = -b2, sg3 = -b3;
    auto rat = [](const QuadExt& x) { return x.to_rational(); };

    I.delta1 = rat(d1);
    I.Delta = QuadExt(C.c) * (-d1 * (sg2 - sg3) + c2 * sg3 - c3 * sg2);
    I.xi = rat(4 * (d1 * d1 + (c2 + c3 + b2 * b3) * d1 + c2 * c3));
    I.eta1 = rat(2 * c2 + 2 * c3 - sg2 * sg3);
    I.l1 = sg2 - sg3;
    I.l2 = sg3;
    I.l3 = sg2;
    I.eta2 = sg2 * sg2 - 2 * c2 - 2 * d1;
    I.eta3 = sg3 * sg3 - 2 * c3 - 2 * d1;
    I.d2 = C.s.disc();
    I.d3 = C.t.disc();
    I.dh2 = 4 * resultant(C.r, C.t);
    I.dh3 = 4 * resultant(C.r, C.s);

    I.l1sq = rat(I.l1 * I.l1);
    I.l2l3 = rat(I.l2 * I.l3);
    I.eta2eta3 = rat(I.eta2 * I.eta3);
    I.d2d3 = rat(I.d2 * I.d3);
    I.d2_plus_d3 = rat(I.d2 + I.d3);
    I.d2e2_plus_d3e3 = rat(I.d2 * I.eta2 + I.d3 * I.eta3);
    I.dh2e3_plus_dh3e2 = rat(I.dh2 * I.eta3 + I.dh3 * I.eta2);
    I.dh2dh3 = rat(I.dh2 * I.dh3);
    I.Delta_sq = rat(I.Delta * I.Delta);
    I.Delta_sq_dh1 = rat(resultant(C.s, C.t));
    I.Delta_zero = I.Delta_sq == 0;
    if (!I.Delta_zero) {
        I.dh1 = I.Delta_sq_dh1 / I.Delta_sq;
        I.l1_over_Delta = rat(I.l1 * I.Delta) / I.Delta_sq;
    }
    const std::pair<const char*, bool> factors[] = {
        {"l1", I.l1.is_zero()},
        {"l2", I.l2.is_zero()},
        {"l3", I.l3.is_zero()},
        {"eta2", I.eta2.is_zero()},
        {"eta3", I.eta3.is_zero()},
        {"xi", I.xi == 0},
        {"d2+d3", I.d2_plus_d3 == 0},
        {"d2*eta2+d3*eta3", I.d2e2_plus_d3e3 == 0},
        {"dh2*eta3+dh3*eta2", I.dh2e3_plus_dh3e2 == 0},
    };
    for (const auto& [name, zero] : factors)
        if (zero) I.P_zero_factors.push_back(name);
    I.P_zero = !I.P_zero_factors.empty();
    return I;
}

namespace {

Quad transform_quad(const Quad& q, const Mat2& M, QuadExt& den)
{
    const QuadExt A = M.a, B = M.b, Cc = M.c, D = M.d;
    den = Cc * Cc * q.c - Cc * D * q.b + D * D;
    if (den.is_zero()) throw DomainError("mobius transform sends a root to infinity");
    QuadExt sum = (2 * A * Cc * q.c - (A * D + B * Cc) * q.b + 2 * B * D) / den;
    QuadExt prod = (A * A * q.c - A * B * q.b + B * B) / den;
    return {-sum, prod};
}

}  // namespace

Curve mobius_transform(const Curve& C, const Mat2& M)
{
    if (M.det() == 0) throw DomainError("singular mobius matrix");
    Curve D = C;
    QuadExt dr, ds, dt;
    D.r = transform_quad(C.r, M, dr);
    D.s = transform_quad(C.s, M, ds);
    D.t = transform_quad(C.t, M, dt);
    D.c = (QuadExt(C.c) * dr * ds * dt).to_rational();
    D.validate();
    return D;
}

Mat2 shift_matrix(const Curve& centered, const Rat& t)
{
    if (centered.r.b != QuadExt(0)) throw DomainError("shift family needs a centered curve");
    Rat d1 = -centered.r.c.to_rational();
    return {1, t * d1, t, 1};
}

std::vector<std::pair<Rat, Rat>> error_term_arguments(const InvariantSet& I, const Rat& c)
{
    if (I.Delta_zero) throw DegenerateError("Delta = 0: error term undefined");
    if (I.P_zero) throw DegenerateError("P = 0: error term undefined");
    std::vector<std::pair<Rat, Rat>> a;
    a.emplace_back(I.d2_plus_d3, -I.l1sq * I.d2d3);
    a.emplace_back(I.d2e2_plus_d3e3, -I.l1sq * I.eta2eta3 * I.d2d3);
    a.emplace_back(I.dh2e3_plus_dh3e2, -I.l1sq * I.eta2eta3 * I.dh2dh3);
    a.emplace_back(I.xi, -I.delta1 * I.dh2dh3);
    a.emplace_back(I.eta2eta3, -I.d2d3 * I.dh2dh3);
    a.emplace_back(c, I.delta1 * I.d2d3 * I.dh2dh3);
    if (I.eta1 != 0) a.emplace_back(I.eta1, -I.d2d3 * I.Delta_sq_dh1);
    a.emplace_back(I.dh1, -I.l1_over_Delta);
    a.emplace_back(I.l1sq, -I.l2l3);
    a.emplace_back(Rat(2), -I.l1sq);
    a.emplace_back(I.dh2dh3, Rat(-2));
    return a;
}

int error_term_E(const InvariantSet& I, const Rat& c, const Place& v)
{
    int e = 1;
    for (const auto& [x, y] : error_term_arguments(I, c)) e *= hilbert_symbol(x, y, v);
    return e;
}

int error_term_E(const Curve& C, const Place& v) { return error_term_E(invariants(C), C.c, v); }

}  // namespace c2d4
