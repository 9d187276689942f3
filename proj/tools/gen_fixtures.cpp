// Searches structured random curves for representatives of every table row and writes fixtures.
#include "c2d4/clusters.hpp"
#include "c2d4/localdata.hpp"
#include "table_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>

using namespace c2d4;
namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

const char* pmch(int e) { return e > 0 ? "p" : "m"; }

std::string row_slug(const ReductionType& T)
{
    std::string s;
    switch (T.kind) {
    case Case::Two_a: return "2a";
    case Case::Two_d: return "2d";
    case Case::OxO_a: return T.swapped ? "1xt1_a" : "1x1_a";
    case Case::OxO_b: return T.swapped ? "1xt1_b" : "1x1_b";
    case Case::OxO_c: return T.swapped ? "1xt1_c" : "1x1_c";
    case Case::In: return std::string("In_") + pmch(T.eps) + "_" + T.sub;
    case Case::I2n: return std::string("I2n_") + pmch(T.eps) + "_" + T.sub;
    case Case::OxIn: return std::string("1xIn_") + pmch(T.eps);
    case Case::Inm_a: return std::string("Inm_") + pmch(T.eps) + pmch(T.delta) + "_a";
    case Case::InxIm: return std::string("InxIm_") + pmch(T.eps) + pmch(T.delta);
    case Case::Inn_a: return std::string("Inn_") + pmch(T.eps) + "_a";
    case Case::InxtIn: return std::string("InxtIn_") + pmch(T.eps);
    case Case::Inm_b: return std::string("Inm_") + pmch(T.eps) + pmch(T.delta) + "_b";
    case Case::Inn_b: return std::string("Inn_") + pmch(T.eps) + "_b";
    case Case::U: return std::string("U_") + pmch(T.eps);
    case Case::Unnl: return std::string("Unnl_") + pmch(T.eps);
    }
    return s;
}

// Relevant parameters, or nothing when one lies outside the swept range.
std::optional<std::map<std::string, int>> params(const ReductionType& T, bool uses_r)
{
    std::map<std::string, int> out;
    auto put = [&](const char* k, int v) { out[k] = v; };
    switch (T.kind) {
    case Case::Two_a:
    case Case::Two_d: break;
    case Case::OxO_a:
    case Case::OxO_b:
    case Case::OxO_c: put("t", T.t); break;
    case Case::In:
    case Case::I2n: put("n", T.n); break;
    case Case::OxIn:
    case Case::InxtIn: put("n", T.n), put("t", T.t); break;
    case Case::Inm_a:
    case Case::Inm_b: put("n", T.n), put("m", T.m); break;
    case Case::InxIm: put("n", T.n), put("m", T.m), put("t", T.t); break;
    case Case::Inn_a:
    case Case::Inn_b: put("n", T.n); break;
    case Case::U: put("n", T.n), put("m", T.m), put("l", T.l); break;
    case Case::Unnl: put("n", T.n), put("l", T.l); break;
    }
    for (auto& [k, v] : out)
        if (v < 1 || v > 2) return std::nullopt;
    if (uses_r) {
        if (T.r < 0 || T.r > 1) return std::nullopt;
        out["r"] = T.r;
    }
    return out;
}

struct Gen {
    std::mt19937_64 rng;
    Int p;
    int depth = 3;

    long uni(long a, long b) { return std::uniform_int_distribution<long>(a, b)(rng); }

    // p-adic digit expansion with a small alphabet so roots collide at several depths.
    Rat digits()
    {
        Rat x = uni(0, 2);
        Int q = 1;
        for (int j = 1; j <= depth; ++j) {
            q *= p;
            if (uni(0, 2) == 0) x += Rat(q * Int(uni(1, 2)));
        }
        return x;
    }

    // Monic quadratic over Q(sqrt m); split from two expansions or with ramified/unramified discriminant.
    Quad quad(const Int& m, bool irrational)
    {
        auto value = [&]() {
            QuadExt v(digits());
            if (irrational) v = v + QuadExt(0, digits() + (uni(0, 1) ? 1 : 0), m);
            return v;
        };
        QuadExt z = value();
        if (uni(0, 2) == 0) {
            Int pk = 1;
            long k = uni(0, 4);
            for (long j = 0; j < k; ++j) pk *= p;
            QuadExt D(Rat(pk * Int(uni(1, 2 * p.get_si()))));
            if (uni(0, 1)) D = -D;
            return {-2 * z, z * z - D};
        }
        QuadExt w = value();
        return {-(z + w), z * w};
    }

    std::optional<Curve> curve()
    {
        Curve C;
        long cu = uni(1, 2 * p.get_si());
        C.c = Rat(uni(0, 1) ? cu : -cu) * (uni(0, 3) == 0 ? Rat(p) : Rat(1));
        if (uni(0, 1)) {
            C.m = 1;
            C.r = quad(1, false);
            C.s = quad(1, false);
            C.t = quad(1, false);
        } else {
            // A non-residue makes Frobenius swap the conjugate factors.
            long mm;
            do mm = uni(-12, 12);
            while (mm == 0 || mm == 1 || !is_squarefree(Int(mm)) || Int(mm) % p == 0);
            C.m = mm;
            C.r = quad(1, false);
            C.s = quad(C.m, true);
            C.t = C.s.conj();
            if (C.s == C.t) return std::nullopt;
        }
        try {
            C.validate();
            if (invariants(C).degenerate()) return std::nullopt;
        } catch (const std::exception&) {
            return std::nullopt;
        }
        return C;
    }
};

size_t height(const Curve& C) { return format_curve(C).size(); }

void write(const fs::path& path, const std::string& text)
{
    fs::create_directories(path.parent_path());
    std::ofstream(path) << text;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"fixture generator"};
    std::string out = "tests/fixtures";
    long iters = 20000;
    unsigned long seed = 1;
    app.add_option("--out", out);
    app.add_option("--iterations", iters, "attempts per prime");
    app.add_option("--seed", seed);
    int depth = 3;
    app.add_option("--depth", depth, "p-adic digits in generated roots");
    CLI11_PARSE(app, argc, argv);

    struct Found {
        Curve C;
        ReductionType T;
        OddClassification cl;
        int E;
        std::string name;
    };
    std::map<std::string, Found> best;  // key: row slug / params name
    for (int p : {3, 5, 7}) {
        Gen g{std::mt19937_64(seed * 1000 + p), Int(p), depth};
        for (long it = 0; it < iters; ++it) {
            auto C = g.curve();
            if (!C) continue;
            OddClassification cl;
            try {
                cl = classify_at(*C, p);
            } catch (const std::exception&) {
                continue;
            }
            if (cl.via_dual) continue;
            oracle::Row o = oracle::row(cl.type);
            auto ps = params(cl.type, o.uses_r);
            if (!ps) continue;
            std::string name;
            for (auto& [k, v] : *ps) name += k + std::to_string(v) + "_";
            name += "p" + std::to_string(p);
            std::string key = row_slug(cl.type) + "/" + name;
            auto itb = best.find(key);
            if (itb != best.end() && height(itb->second.C) <= height(*C)) continue;
            int E = error_term_E(*C, Place::prime(p));
            if (o.lambda * o.w != E) std::cerr << "lambda*w != E for " << key << "\n";
            best[key] = {*C, cl.type, cl, E, name};
        }
        std::cerr << "p=" << p << " done, " << best.size() << " fixtures so far\n";
    }

    for (auto& [key, f] : best) {
        oracle::Row o = oracle::row(f.T);
        fs::path base = fs::path(out) / "odd" / row_slug(f.T) / f.name;
        write(base.string() + ".curve", "# " + f.T.label() + "\n" + format_curve(f.C));
        ordered_json j;
        j["place"] = std::stoi(f.name.substr(f.name.rfind('p') + 1));
        j["label"] = f.T.label();
        j["row"] = row_slug(f.T);
        j["cJ"] = o.cJ;
        j["cJh"] = o.cJh;
        j["mu"] = o.mu;
        j["muh"] = o.muh;
        j["lambda"] = o.lambda;
        j["w"] = o.w;
        j["E_table"] = o.E;
        j["E_side_condition"] = f.cl.e_asserted;
        j["E"] = f.E;
        write(base.string() + ".json", j.dump(2) + "\n");
    }
    std::cout << best.size() << " odd-place fixtures\n";
    for (auto& [key, f] : best) std::cout << key << "  " << f.T.label() << "\n";
}
