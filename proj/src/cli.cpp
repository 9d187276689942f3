#include "c2d4/cli.hpp"

#include "c2d4/isotropy.hpp"
#include "c2d4/padic.hpp"
#include "c2d4/richelot.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#ifndef C2D4_FIXTURE_DIR
#define C2D4_FIXTURE_DIR "tests/fixtures"
#endif

namespace c2d4 {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

std::string read_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

json opt_int(const std::optional<Int>& x) { return x ? json(x->get_str()) : json(nullptr); }
json opt_sign(const std::optional<int>& x) { return x ? json(*x) : json(nullptr); }
std::string sign(int s) { return s > 0 ? "+1" : "-1"; }

std::vector<std::pair<std::string, std::string>> invariant_rows(const InvariantSet& I)
{
    if (I.Delta_zero) return {{"Delta", "0"}};
    return {{"Delta", str(I.Delta)},
            {"l1", str(I.l1)},
            {"l2", str(I.l2)},
            {"l3", str(I.l3)},
            {"delta1", str(I.delta1)},
            {"delta2", str(I.d2)},
            {"delta3", str(I.d3)},
            {"eta1", str(I.eta1)},
            {"eta2", str(I.eta2)},
            {"eta3", str(I.eta3)},
            {"xi", str(I.xi)},
            {"dhat1", str(I.dh1)},
            {"dhat2", str(I.dh2)},
            {"dhat3", str(I.dh3)},
            {"l1^2", str(I.l1sq)},
            {"l2 l3", str(I.l2l3)},
            {"delta2 delta3", str(I.d2d3)},
            {"delta2 + delta3", str(I.d2_plus_d3)},
            {"eta2 eta3", str(I.eta2eta3)},
            {"delta2 eta2 + delta3 eta3", str(I.d2e2_plus_d3e3)},
            {"dhat2 eta3 + dhat3 eta2", str(I.dh2e3_plus_dh3e2)},
            {"dhat2 dhat3", str(I.dh2dh3)},
            {"Delta^2", str(I.Delta_sq)},
            {"l1 / Delta", str(I.l1_over_Delta)},
            {"Delta^2 dhat1", str(I.Delta_sq_dh1)}};
}

json local_json(const LocalData& L)
{
    json j;
    j["place"] = L.place.name();
    j["supported"] = L.supported;
    j["reason"] = L.supported ? json(nullptr) : json(L.reason);
    j["description"] = L.description;
    j["lambda"] = L.lambda;
    j["w"] = L.w;
    j["E"] = L.E;
    j["mu"] = L.mu;
    j["muh"] = L.muh;
    j["cJ"] = opt_int(L.cJ);
    j["cJh"] = opt_int(L.cJh);
    j["kernel"] = opt_int(L.kernel);
    j["e_asserted"] = L.e_asserted;
    j["e_table"] = L.e_table;
    j["verdict"] = L.supported ? json(L.verdict()) : json(nullptr);
    j["issues"] = L.issues;
    return j;
}

void local_text(std::ostream& os, const LocalData& L)
{
    os << "place " << L.place.name() << ": ";
    if (!L.supported) {
        os << "unsupported (" << L.reason << "); E = " << sign(L.E) << "\n";
        return;
    }
    os << L.description << "\n";
    const char* a = L.place.real ? "n_J" : "c_J";
    const char* b = L.place.real ? "n_Jh" : "c_Jh";
    os << "  ";
    if (L.cJ) os << a << " = " << L.cJ->get_str() << ", ";
    if (L.cJh) os << b << " = " << L.cJh->get_str() << ", ";
    if (L.kernel) os << "kernel = " << L.kernel->get_str() << ", ";
    os << "mu = " << sign(L.mu) << ", muh = " << sign(L.muh) << "\n";
    os << "  lambda = " << sign(L.lambda) << ", w = " << sign(L.w) << ", E = " << sign(L.E)
       << ", w = lambda E: " << (L.verdict() ? "true" : "false") << "\n";
    for (const auto& s : L.issues) os << "  issue: " << s << "\n";
}

std::string status(const GlobalReport& R)
{
    if (R.has_issues() || !R.local_verdicts() || !R.global_consistent()) return "inconsistent";
    return R.complete ? "complete" : "partial";
}

int report_code(const GlobalReport& R)
{
    std::string s = status(R);
    return s == "inconsistent" ? kInconsistent : s == "partial" ? kPartial : kOk;
}

Place parse_place(const std::string& s)
{
    if (s == "real" || s == "inf" || s == "infinity") return Place::inf();
    Int q;
    if (s.empty() || q.set_str(s, 10) != 0 || q < 2) throw DomainError("bad place: " + s);
    return Place::prime(q);
}

}  // namespace

std::string render_invariants(const Curve& C, bool as_json)
{
    InvariantSet I = invariants(C);
    auto rows = invariant_rows(I);
    std::ostringstream os;
    if (as_json) {
        json j;
        for (auto& [k, v] : rows) j[k] = v;
        j["degenerate"] = I.degenerate();
        j["P_zero_factors"] = I.P_zero_factors;
        os << j.dump(2) << "\n";
        return os.str();
    }
    for (auto& [k, v] : rows) os << k << " = " << v << "\n";
    if (I.P_zero) {
        os << "P = 0:";
        for (auto& f : I.P_zero_factors) os << " " << f;
        os << "\n";
    }
    return os.str();
}

std::string render_local(const LocalData& L, bool as_json)
{
    if (as_json) return local_json(L).dump(2) + "\n";
    std::ostringstream os;
    local_text(os, L);
    return os.str();
}

std::string render_report(const GlobalReport& R, bool as_json)
{
    if (as_json) {
        json j;
        j["curve"] = format_curve(R.curve);
        std::vector<std::string> names;
        for (const Place& v : R.places) names.push_back(v.name());
        j["places"] = names;
        j["local"] = json::array();
        for (const LocalData& L : R.local) j["local"].push_back(local_json(L));
        j["complete"] = R.complete;
        j["parity_prediction"] = opt_sign(R.parity);
        j["root_number"] = opt_sign(R.root_number);
        j["lambda_supported"] = R.lambda_supported;
        j["w_supported"] = R.w_supported;
        j["E_product"] = R.E_product;
        j["gaps"] = R.gaps;
        j["local_verdicts"] = R.local_verdicts();
        j["global_consistent"] = R.global_consistent();
        j["status"] = status(R);
        return j.dump(2) + "\n";
    }
    std::ostringstream os;
    os << format_curve(R.curve);
    os << "bad places:";
    for (const Place& v : R.places) os << " " << v.name();
    os << "\n";
    for (const LocalData& L : R.local) local_text(os, L);
    if (R.complete) {
        os << "parity prediction (prod lambda) = " << sign(*R.parity) << "\n";
        os << "root number (prod w) = " << sign(*R.root_number) << "\n";
    } else {
        os << "partial: prod lambda over supported places = " << sign(R.lambda_supported)
           << ", prod w = " << sign(R.w_supported) << "\n";
        for (const auto& g : R.gaps) os << "  gap " << g << "\n";
    }
    os << "prod E = " << sign(R.E_product) << "\n";
    os << "status: " << status(R) << "\n";
    return os.str();
}

// ---- fixtures ----

namespace {

std::vector<fs::path> sorted_files(const fs::path& dir, const std::string& ext)
{
    std::vector<fs::path> out;
    if (!fs::exists(dir)) return out;
    for (auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ext) out.push_back(e.path());
    std::sort(out.begin(), out.end());
    return out;
}

struct Mismatch {
    std::string text;
    void expect(const std::string& what, const json& want, const json& got)
    {
        if (text.empty() && want != got) text = what + ": expected " + want.dump() + ", got " + got.dump();
    }
};

json opt_num(const std::optional<Int>& x) { return x ? json(x->get_si()) : json(nullptr); }

FixtureResult fixture_case(const std::string& group, const fs::path& curve_path, const fs::path& root)
{
    FixtureResult res{group, fs::relative(curve_path, root).replace_extension().string(), false, ""};
    try {
        Curve C = read_curve_file(curve_path.string());
        fs::path jp = curve_path;
        jp.replace_extension(".json");
        json want = json::parse(read_file(jp.string()));
        Mismatch mm;
        if (group == "real") {
            LocalData L = local_real(C);
            mm.expect("supported", true, L.supported);
            mm.expect("nJ", want["nJ"], opt_num(L.cJ));
            mm.expect("nJh", want["nJh"], opt_num(L.cJh));
            mm.expect("kernel", want["kernel"], opt_num(L.kernel));
            for (const char* k : {"mu", "muh", "lambda", "w", "E"}) {
                int got = std::string(k) == "mu" ? L.mu : std::string(k) == "muh" ? L.muh : std::string(k) == "lambda" ? L.lambda
                          : std::string(k) == "w" ? L.w : L.E;
                mm.expect(k, want[k], got);
            }
            mm.expect("verdict", true, L.verdict());
        } else if (group == "odd") {
            Int p = want["place"].get<long>();
            LocalData L = local_odd(C, p);
            mm.expect("supported", true, L.supported);
            mm.expect("label", want["label"], L.description);
            mm.expect("cJ", want["cJ"], opt_num(L.cJ));
            mm.expect("cJh", want["cJh"], opt_num(L.cJh));
            mm.expect("mu", want["mu"], L.mu);
            mm.expect("muh", want["muh"], L.muh);
            mm.expect("lambda", want["lambda"], L.lambda);
            mm.expect("w", want["w"], L.w);
            mm.expect("E", want["E"], L.E);
            if (want["E_side_condition"].get<bool>()) {
                mm.expect("E asserted", true, L.e_asserted);
                mm.expect("E_table", want["E_table"], L.e_table);
            }
            mm.expect("verdict", true, L.verdict());
            if (!L.issues.empty()) mm.expect("issues", json::array(), L.issues);
        } else if (group == "global") {
            GlobalReport G = check_conjecture(C);
            std::vector<std::string> names;
            for (const Place& v : G.places) names.push_back(v.name());
            mm.expect("places", want["places"], names);
            mm.expect("complete", want["complete"], G.complete);
            mm.expect("parity", want["parity"], opt_sign(G.parity));
            mm.expect("root_number", want["root_number"], opt_sign(G.root_number));
            mm.expect("E_product", want["E_product"], G.E_product);
            mm.expect("local verdicts", true, G.local_verdicts());
            mm.expect("global consistency", true, G.global_consistent());
        } else {
            LocalData L = local_data(C, parse_place(want["place"].is_string() ? want["place"].get<std::string>()
                                                                                : std::to_string(want["place"].get<long>())));
            mm.expect("supported", true, L.supported);
            mm.expect("lambda", want["lambda"], L.lambda);
            mm.expect("w", want["w"], L.w);
            mm.expect("E", want["E"], L.E);
            mm.expect("verdict", true, L.verdict());
        }
        res.pass = mm.text.empty();
        res.detail = mm.text;
    } catch (const std::exception& e) {
        res.detail = std::string("exception: ") + e.what();
    }
    return res;
}

Curve random_root_curve(std::mt19937_64& rng, std::array<Rat, 6>& roots)
{
    std::uniform_int_distribution<int> num(-12, 12), den(1, 3), cc(-6, 6);
    for (;;) {
        for (auto& x : roots) x = Rat(num(rng), den(rng)), x.canonicalize();
        Rat c = cc(rng);
        if (c == 0) continue;
        try {
            Curve C = curve_from_roots(c, roots);
            InvariantSet I = invariants(C);
            if (I.degenerate()) continue;
            return C;
        } catch (const DomainError&) {
        }
    }
}

}  // namespace

std::vector<FixtureResult> run_fixtures(const std::string& dir, unsigned seed, int identity_curves)
{
    std::vector<FixtureResult> out;
    fs::path root(dir);
    for (const char* g : {"real", "odd", "family_f", "global"})
        for (const auto& f : sorted_files(root / g, ".curve")) out.push_back(fixture_case(g, f, root));

    std::mt19937_64 rng(seed);
    std::map<std::string, std::pair<int, int>> tally;  // identity name -> (holds, total)
    for (int i = 0; i < identity_curves; ++i) {
        std::array<Rat, 6> roots;
        Curve C = random_root_curve(rng, roots);
        auto checks = discriminant_identities(C);
        auto more = invariant_identities(C.c, roots);
        checks.insert(checks.end(), more.begin(), more.end());
        for (const auto& chk : checks) {
            auto& t = tally[chk.name];
            t.first += chk.holds;
            ++t.second;
        }
    }
    std::uniform_int_distribution<int> small(-60, 60);
    const Place classes[] = {Place::inf(), Place::prime(2), Place::prime(3), Place::prime(5), Place::prime(7)};
    for (const Place& v : classes) {
        auto& t = tally["(A + B, -AB) = (A, B) at " + v.name()];
        for (int i = 0; i < 1000;) {
            Rat A(small(rng), 1 + std::abs(small(rng)) % 8), B(small(rng), 1 + std::abs(small(rng)) % 8);
            A.canonicalize();
            B.canonicalize();
            if (A == 0 || B == 0 || A + B == 0) continue;
            ++i;
            t.first += hilbert_sum_identity(A, B, v);
            ++t.second;
        }
    }
    for (auto& [name, t] : tally)
        out.push_back({"identity", name, t.first == t.second,
                       t.first == t.second ? "" : std::to_string(t.second - t.first) + " of " + std::to_string(t.second) + " fail"});
    return out;
}

std::string render_fixture_matrix(const std::vector<FixtureResult>& results)
{
    std::map<std::string, std::pair<int, int>> groups;
    std::ostringstream os;
    for (const auto& r : results) {
        auto& g = groups[r.group];
        g.first += r.pass;
        ++g.second;
        if (!r.pass) os << "FAIL " << r.group << " " << r.name << ": " << r.detail << "\n";
    }
    for (auto& [name, g] : groups)
        os << (g.first == g.second ? "PASS " : "FAIL ") << name << " " << g.first << "/" << g.second << "\n";
    return os.str();
}

// ---- command line ----

int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Local and global invariants of C2D4 genus 2 curves and their Richelot isogenies"};
    app.require_subcommand(1);
    std::string format = "text";
    long precision = 0;
    app.add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
    app.add_option("--precision", precision, "Starting p-adic precision")->check(CLI::PositiveNumber);

    std::string file, place_s, gram_file, gens_file, dir = C2D4_FIXTURE_DIR;
    long p = 0;
    unsigned seed = 1;
    auto curve_cmd = [&](const char* name, const char* help) {
        auto* c = app.add_subcommand(name, help);
        c->add_option("file", file, "Curve spec file")->required();
        return c;
    };
    auto* c_inv = curve_cmd("invariants", "Print the invariant set");
    auto* c_dual = curve_cmd("dual", "Print the Richelot dual curve");
    auto* c_cl = curve_cmd("clusters", "Cluster picture and reduction type at an odd prime");
    c_cl->add_option("--p", p, "Odd prime")->required();
    auto* c_loc = curve_cmd("local", "Local data at one place");
    auto* place_opt = c_loc->add_option("--place", place_s, "real or a prime");
    auto* p_opt = c_loc->add_option("--p", p, "Prime");
    place_opt->excludes(p_opt);
    auto* c_rep = curve_cmd("report", "Global report over all bad places");
    auto* c_chk = curve_cmd("check", "Per-place and global conjecture verdicts");
    auto* c_lag = app.add_subcommand("lagrangian", "Invariant Lagrangian subspace over F_2");
    c_lag->add_option("--gram", gram_file, "Gram matrix file")->required();
    c_lag->add_option("--gens", gens_file, "Generator matrices, blank-line separated")->required();
    auto* c_fix = app.add_subcommand("fixtures", "Run the committed fixture suite");
    c_fix->add_option("--dir", dir, "Fixture root");
    c_fix->add_option("--seed", seed, "Seed for random identity checks");
    for (auto* c : {c_inv, c_dual, c_cl, c_loc, c_rep, c_chk, c_lag, c_fix}) {
        c->add_option("--format", format, "Output format")->check(CLI::IsMember({"text", "json"}));
        c->add_option("--precision", precision, "Starting p-adic precision")->check(CLI::PositiveNumber);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o, eo;
        int rc = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return rc == 0 ? kOk : kUsage;
    }
    if (precision > 0) set_default_precision(precision);
    const bool as_json = format == "json";

    try {
        if (c_lag->parsed()) {
            SymplecticSpaceF2 S;
            S.gram = parse_f2_matrix(read_file(gram_file));
            S.dim = S.gram.n;
            S.gens = parse_f2_matrices(read_file(gens_file));
            S.validate();
            auto basis = invariant_lagrangian(S);
            std::size_t order = group_order(S);
            if (as_json) {
                json j;
                j["dim"] = S.dim;
                j["group_order"] = order;
                j["basis"] = json::array();
                for (F2Vec v : basis) j["basis"].push_back(format_f2_vector(v, S.dim));
                out << j.dump(2) << "\n";
            } else {
                out << "group order " << order << "\n";
                for (F2Vec v : basis) out << format_f2_vector(v, S.dim) << "\n";
            }
            return kOk;
        }
        if (c_fix->parsed()) {
            auto res = run_fixtures(dir, seed);
            bool all = std::all_of(res.begin(), res.end(), [](const FixtureResult& r) { return r.pass; });
            if (as_json) {
                json j = json::array();
                for (auto& r : res) j.push_back({{"group", r.group}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}});
                out << j.dump(2) << "\n";
            } else {
                out << render_fixture_matrix(res);
            }
            return all ? kOk : kInconsistent;
        }

        Curve C = read_curve_file(file);
        if (c_inv->parsed()) {
            out << render_invariants(C, as_json);
            if (invariants(C).degenerate()) {
                err << "degenerate invariants\n";
                return kDegenerate;
            }
            return kOk;
        }
        if (c_dual->parsed()) {
            Curve D = dual_curve(C).curve;
            if (as_json)
                out << json{{"curve", format_curve(D)}}.dump(2) << "\n";
            else
                out << format_curve(D);
            return kOk;
        }
        if (c_cl->parsed()) {
            Int q = p;
            if (q == 2 || !is_prime(q)) throw DomainError("--p must be an odd prime");
            ClusterPicture pic = cluster_picture(C, q);
            Semistability ss = is_semistable(pic, C.c);
            json j;
            j["p"] = q.get_str();
            j["picture"] = pic.notation();
            j["balanced"] = is_balanced(pic);
            j["semistable"] = ss.ok;
            if (!ss.ok) j["diagnostic"] = ss.diagnostic;
            int rc = kOk;
            try {
                OddClassification cl = classify_at(C, q);
                j["balanced_model"] = format_curve(cl.balanced.curve);
                j["balanced_picture"] = cl.balanced.picture.notation();
                j["type"] = cl.type.label();
                j["via_dual"] = cl.via_dual;
                j["frobenius_eigenvalues"] = cl.eigen_class;
            } catch (const UnsupportedError& e) {
                j["type"] = nullptr;
                j["unsupported"] = e.what();
                rc = kPartial;
            } catch (const PrecisionError& e) {
                j["type"] = nullptr;
                j["unsupported"] = e.what();
                rc = kPartial;
            }
            if (as_json) {
                out << j.dump(2) << "\n";
            } else {
                for (auto& [k, v] : j.items()) out << k << ": " << (v.is_string() ? v.get<std::string>() : v.dump()) << "\n";
            }
            return rc;
        }
        if (c_loc->parsed()) {
            Place v = p_opt->count() ? Place::prime(Int(p)) : place_s.empty() ? Place::inf() : parse_place(place_s);
            LocalData L = local_data(C, v);
            out << render_local(L, as_json);
            if (!L.issues.empty() || (L.supported && !L.verdict())) return kInconsistent;
            return L.supported ? kOk : kPartial;
        }
        if (c_rep->parsed() || c_chk->parsed()) {
            GlobalReport R = check_conjecture(C);
            if (c_rep->parsed() || as_json) {
                out << render_report(R, as_json);
            } else {
                for (const LocalData& L : R.local)
                    out << L.place.name() << ": "
                        << (L.supported ? (L.verdict() ? "true" : "false") : "unsupported (" + L.reason + ")") << "\n";
                out << "prod E = 1: " << (R.E_product == 1 ? "true" : "false") << "\n";
                if (R.complete)
                    out << "prod w = prod lambda * prod E: " << (*R.root_number == *R.parity * R.E_product ? "true" : "false")
                        << "\n";
                out << "status: " << status(R) << "\n";
            }
            return report_code(R);
        }
    } catch (const DegenerateError& e) {
        err << "degenerate: " << e.what() << "\n";
        return kDegenerate;
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << "\n";
        return kUsage;
    } catch (const ResourceError& e) {
        err << "resource: " << e.what() << "\n";
        return kPartial;
    } catch (const DomainError& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::exception& e) {
        err << "internal: " << e.what() << "\n";
        return kInconsistent;
    }
    return kUsage;
}

}  // namespace c2d4
