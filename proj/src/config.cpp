#include "fracdecay/config.hpp"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace fd {

namespace {

namespace pt = boost::property_tree;

struct KeyDoc {
    const char* key;
    const char* def;
    const char* doc;
};

const std::vector<KeyDoc>& key_docs() {
    static const std::vector<KeyDoc> docs = {
        {"seed", "1", "seed for randomized directions (selftest gradient check)"},
        {"params.N", "1", "dimension"},
        {"params.s", "2/5", "fractional order, rational or decimal"},
        {"params.p", "3", "exponent of the nonlinearity"},
        {"params.eps", "0.1", "eps for single solves and sweeps without an eps list"},
        {"potential.kind", "constant", "constant | power-decay | logarithmic-decay | compact-support | tabulated-radial"},
        {"potential.omega", "0", "decay rate (power-decay; tail of tabulated-radial)"},
        {"potential.delta", "0.5", "well depth factor"},
        {"potential.well_radius", "1", "radius R of the well ball"},
        {"potential.v0", "1", "overall scale"},
        {"potential.r_cut", "0", "compact-support radius; 0 means 4 R"},
        {"potential.table", "", "two-column file (r, V) for tabulated-radial"},
        {"solver.M", "512", "grid intervals"},
        {"solver.q", "2", "grading exponent, r_j = R_max (j/M)^q"},
        {"solver.R_max", "1000", "truncation radius"},
        {"solver.tol", "1e-6", "residual target relative to sup u"},
        {"solver.max_iter", "400", "fixed-point sweeps"},
        {"solver.newton_max", "30", "Newton steps per tail round"},
        {"solver.refit_every", "25", "tail re-fit period of the fixed-point sweeps"},
        {"solver.outer_max", "8", "tail re-fit rounds after Newton"},
        {"solver.eps_min", "0.002", "smallest eps of the scan"},
        {"solver.eps_max", "0.4", "largest eps of the scan"},
        {"solver.eps_scan", "4", "geometric scan points"},
        {"solver.bisect_steps", "3", "bisection steps after the scan"},
        {"solver.self_test", "true", "run the operator self-test before solving"},
        {"solver.self_test_tol", "1e-3", "self-test relative tolerance"},
        {"solver.force_plan", "false", "use the forced plan at or below the threshold"},
        {"solver.jobs", "0", "assembly threads; 0 means hardware concurrency"},
        {"sweep.p", "", "list a,b,c or range lo:hi:count"},
        {"sweep.omega", "", "list or range; power-decay and tabulated-radial only"},
        {"sweep.eps", "", "list or range"},
        {"fraclap.mu", "1", "weight exponents for amu / fraclap-eval"},
        {"fraclap.radii", "0,1,10,100", "radii for fraclap-eval"},
        {"fraclap.lambda", "1", "dilation of w_mu for fraclap-eval"},
        {"output.dir", "out", "output directory"},
        {"output.csv", "true", "write CSV rows"},
        {"output.plot", "false", "write a gnuplot script next to the data"},
    };
    return docs;
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + v + "'");
}

template <class T>
T parse_num(const std::string& key, const std::string& v) {
    try {
        size_t pos = 0;
        T out;
        if constexpr (std::is_same_v<T, int>)
            out = std::stoi(v, &pos);
        else if constexpr (std::is_same_v<T, std::uint64_t>)
            out = std::stoull(v, &pos);
        else
            out = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return out;
    } catch (const std::exception&) {
        throw ConfigError(key + ": not a number: '" + v + "'");
    }
}

Rational parse_rat(const std::string& key, const std::string& v) {
    try {
        return parse_rational(v);
    } catch (const std::exception& e) {
        throw ConfigError(key + ": " + e.what());
    }
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(text);
    while (std::getline(is, cur, sep)) {
        auto a = cur.find_first_not_of(" \t");
        auto b = cur.find_last_not_of(" \t");
        out.push_back(a == std::string::npos ? "" : cur.substr(a, b - a + 1));
    }
    return out;
}

void read_table(const std::string& path, PotentialSpec& pot) {
    std::ifstream in(path);
    if (!in) throw ConfigError("potential.table: cannot open '" + path + "'");
    std::string line;
    while (std::getline(in, line)) {
        auto h = line.find('#');
        if (h != std::string::npos) line.resize(h);
        std::istringstream ls(line);
        double r, v;
        if (!(ls >> r)) continue;
        if (!(ls >> v)) throw ConfigError("potential.table: row without a value in '" + path + "'");
        pot.table_r.push_back(r);
        pot.table_v.push_back(v);
    }
    if (pot.table_r.size() < 2) throw ConfigError("potential.table: needs at least two rows");
}

}  // namespace

std::vector<Rational> parse_rational_list(const std::string& text) {
    std::vector<Rational> out;
    if (text.find(':') != std::string::npos) {
        auto parts = split(text, ':');
        if (parts.size() != 3) throw ConfigError("range must be lo:hi:count, got '" + text + "'");
        Rational lo = parse_rat("range", parts[0]), hi = parse_rat("range", parts[1]);
        int n = parse_num<int>("range count", parts[2]);
        if (n < 1) throw ConfigError("range count must be >= 1");
        for (int i = 0; i < n; ++i) out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
        return out;
    }
    for (const auto& part : split(text, ',')) {
        if (part.empty()) continue;
        out.push_back(parse_rat("list", part));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    for (const auto& q : parse_rational_list(text)) out.push_back(to_double(q));
    return out;
}

ProblemParams ExperimentConfig::params() const { return {N, to_double(s), to_double(p), eps}; }

DecayClass ExperimentConfig::decay_class() const {
    switch (potential.kind) {
        case PotentialKind::constant: return DecayClass::slow(0);
        case PotentialKind::logarithmic_decay: return DecayClass::log();
        case PotentialKind::compact_support: return DecayClass::fast();
        case PotentialKind::power_decay:
        case PotentialKind::tabulated_radial: {
            Rational w = omega ? *omega : rational_from_decimal(potential.omega);
            return w <= 2 * s ? DecayClass::slow(w) : DecayClass::upper_slow(w);
        }
    }
    return DecayClass::fast();
}

PotentialSpec ExperimentConfig::potential_with_omega(const Rational& w) const {
    PotentialSpec pot = potential;
    if (pot.kind == PotentialKind::power_decay || pot.kind == PotentialKind::tabulated_radial)
        pot.omega = to_double(w);
    return pot;
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
    pt::ptree tree;
    try {
        std::istringstream is(text);
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config syntax: ") + e.what());
    }
    std::map<std::string, std::string> kv;
    for (const auto& [name, node] : tree) {
        if (node.empty()) {
            kv[name] = node.data();
            continue;
        }
        for (const auto& [key, leaf] : node) kv[name + "." + key] = leaf.data();
    }
    std::set<std::string> known;
    for (const auto& d : key_docs()) known.insert(d.key);
    for (const auto& [k, v] : kv)
        if (!known.count(k)) throw ConfigError("unknown key '" + k + "'");

    ExperimentConfig c;
    auto get = [&](const std::string& k) -> const std::string* {
        auto it = kv.find(k);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto v = get("seed")) c.seed = parse_num<std::uint64_t>("seed", *v);
    if (auto v = get("params.N")) c.N = parse_num<int>("params.N", *v);
    if (auto v = get("params.s")) c.s = parse_rat("params.s", *v);
    if (auto v = get("params.p")) c.p = parse_rat("params.p", *v);
    if (auto v = get("params.eps")) c.eps = to_double(parse_rat("params.eps", *v));

    PotentialKind kind = PotentialKind::constant;
    if (auto v = get("potential.kind")) {
        try {
            kind = parse_potential_kind(*v);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("potential.kind: ") + e.what());
        }
    }
    auto& pot = c.potential;
    pot.kind = kind;
    pot.omega = kind == PotentialKind::compact_support ? std::numeric_limits<double>::infinity() : 0.0;
    if (auto v = get("potential.omega")) {
        c.omega = parse_rat("potential.omega", *v);
        if (*c.omega < 0) throw ConfigError("potential.omega must be >= 0");
        pot.omega = to_double(*c.omega);
    }
    if (auto v = get("potential.delta")) pot.delta = parse_num<double>("potential.delta", *v);
    if (auto v = get("potential.well_radius")) pot.well_radius = parse_num<double>("potential.well_radius", *v);
    if (auto v = get("potential.v0")) pot.v0 = parse_num<double>("potential.v0", *v);
    if (auto v = get("potential.r_cut")) pot.r_cut = parse_num<double>("potential.r_cut", *v);
    if (auto v = get("potential.table")) {
        std::filesystem::path path(*v);
        if (path.is_relative()) path = std::filesystem::path(base_dir) / path;
        c.table_path = path.string();
        read_table(c.table_path, pot);
    }
    if (kind == PotentialKind::tabulated_radial && c.table_path.empty())
        throw ConfigError("potential.table is required for tabulated-radial");

    auto& st = c.solver;
    if (auto v = get("solver.M")) st.M = parse_num<int>("solver.M", *v);
    if (auto v = get("solver.q")) st.q = parse_num<double>("solver.q", *v);
    if (auto v = get("solver.R_max")) st.R_max = parse_num<double>("solver.R_max", *v);
    if (auto v = get("solver.tol")) st.tol = parse_num<double>("solver.tol", *v);
    if (auto v = get("solver.max_iter")) st.max_iter = parse_num<int>("solver.max_iter", *v);
    if (auto v = get("solver.newton_max")) st.newton_max = parse_num<int>("solver.newton_max", *v);
    if (auto v = get("solver.refit_every")) st.refit_every = parse_num<int>("solver.refit_every", *v);
    if (auto v = get("solver.outer_max")) st.outer_max = parse_num<int>("solver.outer_max", *v);
    if (auto v = get("solver.eps_min")) st.eps_min = parse_num<double>("solver.eps_min", *v);
    if (auto v = get("solver.eps_max")) st.eps_max = parse_num<double>("solver.eps_max", *v);
    if (auto v = get("solver.eps_scan")) st.eps_scan = parse_num<int>("solver.eps_scan", *v);
    if (auto v = get("solver.bisect_steps")) st.bisect_steps = parse_num<int>("solver.bisect_steps", *v);
    if (auto v = get("solver.self_test")) st.self_test = parse_bool("solver.self_test", *v);
    if (auto v = get("solver.self_test_tol")) st.self_test_tol = parse_num<double>("solver.self_test_tol", *v);
    if (auto v = get("solver.force_plan")) st.force_plan = parse_bool("solver.force_plan", *v);
    if (auto v = get("solver.jobs")) st.jobs = parse_num<int>("solver.jobs", *v);

    if (auto v = get("sweep.p")) c.sweep_p = parse_rational_list(*v);
    if (auto v = get("sweep.omega")) c.sweep_omega = parse_rational_list(*v);
    if (auto v = get("sweep.eps")) c.sweep_eps = parse_double_list(*v);
    if (auto v = get("fraclap.mu")) c.mu = parse_double_list(*v);
    if (auto v = get("fraclap.radii")) c.radii = parse_double_list(*v);
    if (auto v = get("fraclap.lambda")) c.lambda = parse_num<double>("fraclap.lambda", *v);

    if (auto v = get("output.dir")) c.out_dir = *v;
    if (auto v = get("output.csv")) c.csv = parse_bool("output.csv", *v);
    if (auto v = get("output.plot")) c.plot = parse_bool("output.plot", *v);

    // invariants
    if (c.N < 1) throw ConfigError("params.N must be >= 1");
    if (!(c.s > 0 && c.s < 1)) throw ConfigError("params.s must lie in (0,1)");
    if (!(c.eps > 0.0)) throw ConfigError("params.eps must be > 0");
    if (!(st.tol > 0.0) || !(st.self_test_tol > 0.0)) throw ConfigError("tolerances must be positive");
    if (st.M < 8) throw ConfigError("solver.M must be >= 8");
    if (!(st.q >= 1.0)) throw ConfigError("solver.q must be >= 1");
    if (!(st.R_max > 0.0)) throw ConfigError("solver.R_max must be > 0");
    if (!(st.eps_min > 0.0 && st.eps_max >= st.eps_min)) throw ConfigError("need 0 < eps_min <= eps_max");
    if (st.eps_scan < 1 || st.bisect_steps < 0 || st.max_iter < 1 || st.refit_every < 1)
        throw ConfigError("iteration counts must be positive");
    if ((get("sweep.p") && c.sweep_p.empty()) || (get("sweep.omega") && c.sweep_omega.empty()) ||
        (get("sweep.eps") && c.sweep_eps.empty()))
        throw ConfigError("empty sweep range");
    if (c.mu.empty() || c.radii.empty()) throw ConfigError("fraclap lists must be nonempty");
    if (!c.sweep_omega.empty() && kind != PotentialKind::power_decay && kind != PotentialKind::tabulated_radial)
        throw ConfigError("sweep.omega needs potential.kind = power-decay or tabulated-radial");
    return c;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    auto dir = std::filesystem::path(path).parent_path().string();
    return parse_config(ss.str(), dir.empty() ? "." : dir);
}

std::string config_reference() {
    std::ostringstream os;
    std::string section;
    for (const auto& d : key_docs()) {
        std::string key = d.key;
        auto dot = key.find('.');
        std::string sec = dot == std::string::npos ? "" : key.substr(0, dot);
        std::string name = dot == std::string::npos ? key : key.substr(dot + 1);
        if (sec != section) {
            os << "\n[" << sec << "]\n";
            section = sec;
        }
        os << name << " = " << d.def << "    ; " << d.doc << "\n";
    }
    return os.str();
}

}  // namespace fd
