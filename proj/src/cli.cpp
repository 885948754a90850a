#include "dpp/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>
#include <variant>

#include "dpp/configspace.hpp"
#include "dpp/error.hpp"
#include "dpp/extended_kernels.hpp"
#include "dpp/fredholm.hpp"
#include "dpp/noneq_kernels.hpp"
#include "dpp/parallel.hpp"
#include "dpp/rng.hpp"
#include "dpp/sampling.hpp"
#include "dpp/sde.hpp"
#include "dpp/static_kernels.hpp"
#include "dpp/suites.hpp"
#include "dpp/validate.hpp"

namespace dpp {

namespace {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

// shortest decimal string that parses back to the same double
std::string fmt_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::string csv_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    std::istringstream in(s);
    while (std::getline(in, cur, sep)) out.push_back(trim(cur));
    if (!s.empty() && s.back() == sep) out.emplace_back();
    return out;
}

double to_double(const std::string& s, const std::string& what) {
    double v = 0.0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    require_domain(r.ec == std::errc() && r.ptr == s.data() + s.size(), what + ": '" + s + "' is not a number");
    return v;
}

std::vector<double> parse_list(const std::string& s, const std::string& what) {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    for (const auto& tok : split(s, ',')) out.push_back(to_double(tok, what));
    return out;
}

struct Param {
    std::string key;
    std::variant<double*, int*, std::uint64_t*, std::string*, bool*> target;

    std::string value() const {
        return std::visit(
            [](auto* p) -> std::string {
                using T = std::remove_pointer_t<decltype(p)>;
                if constexpr (std::is_same_v<T, double>)
                    return fmt_double(*p);
                else if constexpr (std::is_same_v<T, std::string>)
                    return *p;
                else if constexpr (std::is_same_v<T, bool>)
                    return *p ? "true" : "false";
                else
                    return std::to_string(*p);
            },
            target);
    }
};

struct Result {
    std::string text;
    std::string extension;  // json or csv
};

struct Command {
    std::string name;  // words separated by one space
    CLI::App* app = nullptr;
    std::vector<Param> params;
    std::function<Result()> run;
};

// Every option value lives here so that the manifest can echo it.
struct Values {
    std::uint64_t seed = 7;
    std::string out, config;
    int threads = 0;

    std::string family = "sine", kind = "static", system = "dyson_ou", init = "auto", convention = "kernel";
    std::string points, points_file, times = "0", functions = "zero", input, suite;
    int n = 0, nodes = 16, max_nodes = 512, record_every = 1, circle_nodes = 64, paths = 1, count = 1000, l0 = 1,
        m0 = 1;
    std::uint64_t samples = 0;
    std::string sample_family = "gue_scaled";
    int sample_n = 8, sim_n = 4;
    double validate_dt = 0.0;
    double nu = 0.0, scale = 0.0, x = 0.0, y = 0.0, s = 0.0, t = 0.0, a = 0.0, b = 0.1, tol = 1e-8, dt = 1e-3,
           horizon = 1.0, epsilon = 0.5, kappa = 0.5, lmax = 64.0, step = 1.0 / 64;
    bool extended = false, crosscheck = false;
};

StaticKernel static_kernel(const Values& v) {
    StaticKernel k;
    if (v.family == "sine")
        k = StaticKernel::sine();
    else if (v.family == "airy")
        k = StaticKernel::airy();
    else if (v.family == "bessel")
        k = StaticKernel::bessel(v.nu);
    else if (v.family == "hermite")
        k = StaticKernel::hermite(v.n);
    else if (v.family == "laguerre")
        k = StaticKernel::laguerre(v.n, v.nu, v.scale);
    else
        throw DomainError("unknown kernel family '" + v.family + "' (sine, airy, bessel, hermite, laguerre)");
    k.validate();
    return k;
}

ExtendedKernel extended_kernel(const Values& v) {
    if (v.family == "sine") return ExtendedKernel::sine();
    if (v.family == "airy") return ExtendedKernel::airy();
    if (v.family == "bessel") {
        require_domain(v.nu > -1.0, "bessel: nu must exceed -1");
        return ExtendedKernel::bessel(v.nu);
    }
    throw DomainError("unknown extended kernel family '" + v.family + "' (sine, airy, bessel)");
}

std::vector<std::vector<std::string>> read_csv(const std::string& path, std::vector<std::string>& header) {
    std::ifstream in(path);
    require_domain(static_cast<bool>(in), "cannot read '" + path + "'");
    std::string line;
    std::vector<std::vector<std::string>> rows;
    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        auto cells = split(line, ',');
        if (header.empty())
            header = std::move(cells);
        else
            rows.push_back(std::move(cells));
    }
    require_domain(!header.empty(), path + ": empty file");
    return rows;
}

long column(const std::vector<std::string>& header, const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    return it == header.end() ? -1 : it - header.begin();
}

// configurations keyed by sample_id (0 when the column is absent)
std::map<long, std::vector<Configuration::Atom>> read_configurations(const std::string& path) {
    std::vector<std::string> header;
    const auto rows = read_csv(path, header);
    const long pos = column(header, "position"), mult = column(header, "multiplicity"), id = column(header, "sample_id");
    require_domain(pos >= 0, path + ": needs a 'position' column");
    std::map<long, std::vector<Configuration::Atom>> out;
    for (const auto& r : rows) {
        require_domain(r.size() == header.size(), path + ": ragged row");
        const double x = to_double(r[pos], "position");
        int m = 1;
        if (mult >= 0) {
            const double mv = to_double(r[mult], "multiplicity");
            require_domain(mv >= 1 && mv == std::floor(mv), "multiplicity must be a positive integer");
            m = static_cast<int>(mv);
        }
        const long key = id >= 0 ? std::lround(to_double(r[id], "sample_id")) : 0;
        out[key].push_back({x, m});
    }
    return out;
}

Configuration base_configuration(const Values& v) {
    require_domain(v.points.empty() || v.points_file.empty(), "give --points or --points-file, not both");
    if (!v.points_file.empty()) {
        const auto all = read_configurations(v.points_file);
        require_domain(all.size() <= 1, v.points_file + ": expected a single configuration");
        return all.empty() ? Configuration() : Configuration::from_atoms(all.begin()->second);
    }
    return Configuration::from_points(parse_list(v.points, "--points"));
}

NonEqKernelSpec noneq_kernel(const Values& v) {
    NonEqKernelSpec spec;
    if (v.family == "sine")
        spec = NonEqKernelSpec::sine(base_configuration(v));
    else if (v.family == "airy_prelimit")
        spec = NonEqKernelSpec::airy_prelimit(base_configuration(v), v.n);
    else if (v.family == "bessel")
        spec = NonEqKernelSpec::bessel(base_configuration(v), v.nu);
    else
        throw DomainError("unknown nonequilibrium family '" + v.family + "' (sine, airy_prelimit, bessel)");
    spec.validate();
    return spec;
}

// zero | indicator:a:b:z | loglinear:a:b:c0:c1 | sampled:a:b:v0:v1:...
TestFunction parse_function(const std::string& text) {
    const auto parts = split(text, ':');
    const std::string& kind = parts.empty() ? text : parts[0];
    auto num = [&](std::size_t i) { return to_double(parts.at(i), "test function '" + text + "'"); };
    if (kind == "zero" && parts.size() == 1) return TestFunction::zero();
    if (kind == "indicator" && parts.size() == 4) return TestFunction::indicator(num(1), num(2), num(3));
    if (kind == "loglinear" && parts.size() == 5) return TestFunction::log_linear(num(1), num(2), num(3), num(4));
    if (kind == "sampled" && parts.size() >= 4) {
        std::vector<double> values;
        for (std::size_t i = 3; i < parts.size(); ++i) values.push_back(num(i));
        return TestFunction::sampled(num(1), num(2), std::move(values));
    }
    throw DomainError("malformed test function '" + text +
                      "' (zero, indicator:a:b:z, loglinear:a:b:c0:c1, sampled:a:b:v0:v1:...)");
}

Result json_result(const json& j) { return {j.dump(2) + "\n", "json"}; }

Result kernel_eval(const Values& v) {
    json j;
    if (v.extended) {
        const auto k = extended_kernel(v);
        const auto r = eval_extended_detailed(k, v.s, v.x, v.t, v.y);
        j["kernel"] = k.name();
        j["s"] = v.s;
        j["x"] = v.x;
        j["t"] = v.t;
        j["y"] = v.y;
        j["value"] = r.value;
        j["abs_error"] = r.abs_error;
        j["truncation"] = r.truncation;
        j["branch"] = r.branch;
    } else {
        const auto k = static_kernel(v);
        j["kernel"] = k.name();
        j["x"] = v.x;
        j["y"] = v.y;
        j["value"] = eval_static(k, v.x, v.y);
    }
    return json_result(j);
}

Result kernel_noneq(const Values& v) {
    const auto spec = noneq_kernel(v);
    const auto r = eval_noneq_detailed(spec, v.s, v.x, v.t, v.y);
    json j;
    j["kernel"] = spec.name();
    j["points"] = spec.base.points();
    j["value"] = r.value;
    j["imag"] = r.imag;
    j["truncation"] = r.truncation;
    j["nodes"] = r.nodes;
    if (v.crosscheck) {
        const auto c = contour_crosscheck(spec, v.s, v.x, v.t, v.y, v.circle_nodes);
        j["residue_value"] = c.residue_value;
        j["contour_value"] = c.contour_value;
        j["crosscheck_difference"] = std::abs(c.residue_value - c.contour_value);
    }
    return json_result(j);
}

std::vector<double> lattice(const SdeSystem& sys, int n) {
    std::vector<double> x(n);
    for (int j = 0; j < n; ++j) x[j] = sys.half_line() ? j + 1.0 : j - (n - 1) / 2.0;
    return x;
}

bool has_stationary_law(const SdeSystem& sys) {
    return sys.kind == SdeKind::dyson_ou || sys.kind == SdeKind::sqbessel_ou || sys.kind == SdeKind::bessel_ou ||
           sys.kind == SdeKind::airy_ou;
}

Result simulate(const Values& v) {
    require_domain(v.sim_n >= 1, "simulate: --n must be >= 1");
    require_domain(v.paths >= 1, "simulate: --paths must be >= 1");
    require_domain(v.record_every >= 0, "simulate: --record-every must be >= 0");
    const auto sys = SdeSystem::parse(v.system, v.sim_n, v.nu);
    std::string init = v.init;
    if (init == "auto") init = has_stationary_law(sys) ? "stationary" : "lattice";
    std::vector<double> fixed;
    if (init == "lattice") {
        fixed = lattice(sys, v.sim_n);
    } else if (init != "stationary") {
        fixed = parse_list(init, "--init");
        require_domain(static_cast<int>(fixed.size()) == v.sim_n,
                       "simulate: --init lists " + std::to_string(fixed.size()) + " positions for --n " +
                           std::to_string(v.sim_n));
    }
    const std::uint64_t dyn_seed = derive_seed(v.seed, 1);
    std::vector<std::string> blocks(v.paths);
    parallel_for(static_cast<std::size_t>(v.paths), [&](std::size_t p) {
        const auto x0 = init == "stationary" ? stationary_initial(sys, v.seed, p) : fixed;
        IntegrateOptions opt;
        opt.path_index = p;
        opt.record_every = v.record_every;
        const auto path = integrate(sys, x0, v.horizon, v.dt, dyn_seed, opt);
        std::string b;
        for (std::size_t k = 0; k < path.times.size(); ++k)
            for (std::size_t j = 0; j < path.states[k].size(); ++j)
                b += std::to_string(p) + "," + csv_double(path.times[k]) + "," + std::to_string(j) + "," +
                     csv_double(path.states[k][j]) + "\n";
        blocks[p] = std::move(b);
    });
    std::string text = "path_id,time,particle_index,position\n";
    for (const auto& b : blocks) text += b;
    return {text, "csv"};
}

Result sample_cmd(const Values& v) {
    require_domain(v.count >= 1, "sample: --count must be >= 1");
    const auto spec = EnsembleSpec::parse(v.sample_family, v.sample_n, v.nu, v.convention);
    const auto s = sample(spec, static_cast<std::size_t>(v.count), v.seed);
    std::string text = "sample_id,particle_index,position\n";
    for (std::size_t i = 0; i < s.configurations.size(); ++i)
        for (std::size_t j = 0; j < s.configurations[i].size(); ++j)
            text += std::to_string(i) + "," + std::to_string(j) + "," + csv_double(s.configurations[i][j]) + "\n";
    return {text, "csv"};
}

json fredholm_json(const FredholmResult& r) {
    json j;
    j["value"] = r.value;
    j["nodes_used"] = r.nodes_used;
    j["cauchy_gap"] = r.cauchy_gap;
    return j;
}

Result fredholm_gap(const Values& v) {
    return json_result(fredholm_json(gap_probability_detailed(static_kernel(v), v.a, v.b, v.nodes, v.tol)));
}

Result fredholm_mgf(const Values& v) {
    FredholmProblem p;
    if (v.kind == "static")
        p.kernel = static_kernel(v);
    else if (v.kind == "extended")
        p.kernel = extended_kernel(v);
    else if (v.kind == "noneq")
        p.kernel = noneq_kernel(v);
    else
        throw DomainError("unknown --kind '" + v.kind + "' (static, extended, noneq)");
    p.times = parse_list(v.times, "--times");
    for (const auto& f : split(v.functions, ';')) p.functions.push_back(parse_function(f));
    p.nodes = v.nodes;
    p.max_nodes = v.max_nodes;
    p.cauchy_tol = v.tol;
    return json_result(fredholm_json(mgf_detailed(p)));
}

Result config_check(const Values& v) {
    require_domain(!v.input.empty(), "config check: --input is required");
    SpaceParams params;
    if (v.family == "sine")
        params = SpaceParams::sine(v.epsilon, v.kappa, v.l0, v.m0);
    else if (v.family == "airy")
        params = SpaceParams::airy(v.epsilon, v.kappa, v.l0, v.m0);
    else if (v.family == "bessel")
        params = SpaceParams::bessel(v.nu, v.epsilon, v.kappa, v.l0, v.m0);
    else if (v.family == "empty")
        params = SpaceParams::empty(v.epsilon, v.kappa, v.l0, v.m0);
    else
        throw DomainError("unknown density family '" + v.family + "' (sine, airy, bessel, empty)");
    json results = json::array();
    for (const auto& [id, atoms] : read_configurations(v.input)) {
        const auto xi = Configuration::from_atoms(atoms);
        const auto m = membership(xi, params, v.lmax, v.step);
        json j;
        j["sample_id"] = id;
        j["points"] = xi.total();
        j["member"] = m.member;
        j["violation"] = violation_name(m.violation);
        j["witness_L"] = m.witness_L;
        j["witness_k"] = m.witness_k;
        j["lhs"] = m.lhs;
        j["rhs"] = m.rhs;
        j["simple"] = xi.simple();
        j["nonnegative"] = xi.nonnegative();
        results.push_back(j);
    }
    json j;
    j["family"] = v.family;
    j["L_max"] = v.lmax;
    j["results"] = results;
    return json_result(j);
}

// key = value lines; '#' starts a comment line
std::vector<std::pair<std::string, std::string>> read_config_file(const std::string& path) {
    std::ifstream in(path);
    require_domain(static_cast<bool>(in), "cannot read config file '" + path + "'");
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        require_domain(eq != std::string::npos, path + ":" + std::to_string(lineno) + ": expected key = value");
        const auto key = trim(t.substr(0, eq));
        for (const auto& kv : out) require_domain(kv.first != key, path + ": duplicate key '" + key + "'");
        out.emplace_back(key, trim(t.substr(eq + 1)));
    }
    return out;
}

class Cli {
public:
    Cli() : app_("Determinantal processes: kernels, dynamics, Fredholm determinants and validation suites", "dpp") {
        app_.set_version_flag("--version", kVersion);
        app_.fallthrough();
        app_.require_subcommand(1);
        app_.add_option("--config", v_.config, "key = value file; flags given on the command line take precedence");
        app_.add_option("--seed", v_.seed, "64-bit seed")->capture_default_str();
        app_.add_option("--out", v_.out, "output directory (result and manifest.cfg); stdout when absent");
        app_.add_option("--threads", v_.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);

        auto* kernel = group("kernel", "kernel evaluation");
        auto* eval = add(kernel, "eval", "static or extended kernel value", kernel_eval);
        opt(eval, "family", v_.family, "sine, airy, bessel, hermite, laguerre");
        kernel_params(eval);
        opt(eval, "x", v_.x, "first point");
        opt(eval, "y", v_.y, "second point");
        opt(eval, "s", v_.s, "first time (extended)");
        opt(eval, "t", v_.t, "second time (extended)");
        flag(eval, "extended", v_.extended, "evaluate the space-time kernel K(s,x;t,y)");

        auto* noneq = add(kernel, "noneq", "nonequilibrium kernel of a finite configuration", kernel_noneq);
        opt(noneq, "family", v_.family, "sine, airy_prelimit, bessel");
        opt(noneq, "nu", v_.nu, "Bessel index");
        opt(noneq, "n", v_.n, "N of the airy_prelimit density (0: number of points)");
        config_params(noneq);
        opt(noneq, "s", v_.s, "first time");
        opt(noneq, "x", v_.x, "first point");
        opt(noneq, "t", v_.t, "second time");
        opt(noneq, "y", v_.y, "second point");
        flag(noneq, "crosscheck", v_.crosscheck, "also evaluate the contour-integral form");
        opt(noneq, "circle-nodes", v_.circle_nodes, "trapezoid nodes per circle for --crosscheck");

        auto* sim = add(nullptr, "simulate", "noncolliding diffusion paths as CSV", simulate);
        opt(sim, "system", v_.system, "dyson, sqbessel, dyson_ou, airy_drift, airy_ou, sqbessel_ou, bessel_ou");
        opt(sim, "n", v_.sim_n, "particles");
        opt(sim, "nu", v_.nu, "Bessel index");
        opt(sim, "t", v_.horizon, "time horizon");
        opt(sim, "dt", v_.dt, "grid step");
        opt(sim, "paths", v_.paths, "number of paths");
        opt(sim, "init", v_.init, "auto, stationary, lattice, or comma-separated positions");
        opt(sim, "record-every", v_.record_every, "store every k-th grid state (0: first and last)");

        auto* smp = add(nullptr, "sample", "random-matrix ensemble draws as CSV", sample_cmd);
        opt(smp, "family", v_.sample_family, "gue_scaled, gue_shifted, laguerre");
        opt(smp, "n", v_.sample_n, "matrix size");
        opt(smp, "nu", v_.nu, "Laguerre index");
        opt(smp, "convention", v_.convention, "Laguerre weight: kernel (x^nu e^(-x/2N)) or half_shift (x^(nu+1/2) e^(-x/2))");
        opt(smp, "count", v_.count, "number of draws");

        auto* fred = group("fredholm", "Fredholm determinants");
        auto* gap = add(fred, "gap", "gap probability det(I - K) on [a, b]", fredholm_gap);
        opt(gap, "family", v_.family, "sine, airy, bessel, hermite, laguerre");
        kernel_params(gap);
        opt(gap, "a", v_.a, "left end");
        opt(gap, "b", v_.b, "right end");
        opt(gap, "nodes", v_.nodes, "starting quadrature order");
        opt(gap, "tol", v_.tol, "node-doubling tolerance");

        auto* mgf = add(fred, "mgf", "multitime generating functional det(1 + K chi)", fredholm_mgf);
        opt(mgf, "kind", v_.kind, "static, extended, noneq");
        opt(mgf, "family", v_.family, "kernel family");
        kernel_params(mgf);
        config_params(mgf);
        opt(mgf, "times", v_.times, "comma-separated increasing times");
        opt(mgf, "f", v_.functions,
            "';'-separated test functions: zero, indicator:a:b:z, loglinear:a:b:c0:c1, sampled:a:b:v0:v1:...");
        opt(mgf, "nodes", v_.nodes, "starting quadrature order per panel");
        opt(mgf, "max-nodes", v_.max_nodes, "largest order per panel");
        opt(mgf, "tol", v_.tol, "node-doubling tolerance");

        auto* cfg = group("config", "configuration space");
        auto* chk = add(cfg, "check", "membership of configurations read from CSV", config_check);
        opt(chk, "input", v_.input, "CSV with a position column; optional multiplicity and sample_id");
        opt(chk, "family", v_.family, "reference density: sine, airy, bessel, empty");
        opt(chk, "nu", v_.nu, "Bessel index");
        opt(chk, "epsilon", v_.epsilon, "window exponent");
        opt(chk, "kappa", v_.kappa, "cell exponent");
        opt(chk, "l0", v_.l0, "smallest window");
        opt(chk, "m0", v_.m0, "cell bound");
        opt(chk, "lmax", v_.lmax, "largest window");
        opt(chk, "step", v_.step, "window grid spacing");

        auto* val = add(nullptr, "validate", "Monte Carlo validation suite as JSON", [](const Values& v) {
            SuiteOptions o;
            o.seed = v.seed;
            o.samples = v.samples;
            o.dt = v.validate_dt;
            const auto r = run_suite(v.suite, o);
            json j;
            j["suite"] = r.suite;
            j["pass"] = r.pass();
            json names = json::array(), verdicts = json::array(), estimates = json::array(), se = json::array(),
                 criteria = json::array();
            for (const auto& e : r.entries) {
                names.push_back(e.name);
                verdicts.push_back(e.informational ? "informational" : e.pass ? "pass" : "fail");
                estimates.push_back(e.estimate);
                se.push_back(e.se);
                criteria.push_back(e.criterion);
            }
            j["names"] = names;
            j["verdicts"] = verdicts;
            j["estimates"] = estimates;
            j["se"] = se;
            j["criteria"] = criteria;
            j["seed"] = r.seed;
            return json_result(j);
        });
        val->add_option("suite", v_.suite, "rho, moments, displacement, reversibility, multitime, scaling-limits")
            ->required()
            ->check(CLI::IsMember(suite_names()));
        commands_.back().params.push_back({"suite", &v_.suite});
        opt(val, "samples", v_.samples, "draws or paths (0: acceptance size)");
        opt(val, "dt", v_.validate_dt, "time step for path suites (0: acceptance size)");
    }

    int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
        try {
            std::vector<std::string> args(argv + 1, argv + argc);
            apply_config_file(args);
            std::reverse(args.begin(), args.end());
            app_.parse(args);
            const Command* cmd = nullptr;
            for (const auto& c : commands_)
                if (c.app->parsed()) cmd = &c;
            require_domain(cmd != nullptr, "no command given");
            if (v_.threads > 0) setenv("DPP_THREADS", std::to_string(v_.threads).c_str(), 1);
            const auto result = cmd->run();
            emit(*cmd, result, out, err);
            return 0;
        } catch (const CLI::CallForHelp&) {
            out << app_.help();
            return 0;
        } catch (const CLI::CallForAllHelp&) {
            out << app_.help("", CLI::AppFormatMode::All);
            return 0;
        } catch (const CLI::CallForVersion&) {
            out << kVersion << "\n";
            return 0;
        } catch (const CLI::ParseError& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        } catch (const DomainError& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        } catch (const ConvergenceError& e) {
            err << "numerical failure: " << e.what() << "\n";
            return 2;
        } catch (const NumericalError& e) {
            err << "numerical failure: " << e.what() << "\n";
            return 2;
        } catch (const fs::filesystem_error& e) {
            err << "error: " << e.what() << "\n";
            return 1;
        } catch (const std::exception& e) {
            err << "internal error: " << e.what() << "\n";
            return 2;
        }
    }

private:
    CLI::App* group(const std::string& name, const std::string& help) {
        auto* g = app_.add_subcommand(name, help);
        g->require_subcommand(1);
        g->fallthrough();
        return g;
    }

    CLI::App* add(CLI::App* parent, const std::string& name, const std::string& help, std::function<Result(const Values&)> fn) {
        auto* sub = (parent ? parent : &app_)->add_subcommand(name, help);
        sub->fallthrough();
        Command c;
        c.name = parent ? parent->get_name() + " " + name : name;
        c.app = sub;
        c.run = [this, fn] { return fn(v_); };
        commands_.push_back(std::move(c));
        return sub;
    }

    template <class T>
    void opt(CLI::App* sub, const std::string& key, T& target, const std::string& help) {
        sub->add_option("--" + key, target, help)->capture_default_str();
        commands_.back().params.push_back({key, &target});
    }

    void flag(CLI::App* sub, const std::string& key, bool& target, const std::string& help) {
        sub->add_flag("--" + key, target, help);
        commands_.back().params.push_back({key, &target});
    }

    void kernel_params(CLI::App* sub) {
        opt(sub, "n", v_.n, "N of the finite-N kernels");
        opt(sub, "nu", v_.nu, "Bessel or Laguerre index");
        opt(sub, "scale", v_.scale, "Laguerre scale c (0: 2N)");
    }

    void config_params(CLI::App* sub) {
        opt(sub, "points", v_.points, "comma-separated configuration points (use --points=...)");
        opt(sub, "points-file", v_.points_file, "CSV with a position column and optional multiplicity");
    }

    const Command* find_command(const std::string& name) const {
        for (const auto& c : commands_)
            if (c.name == name) return &c;
        return nullptr;
    }

    // Merges a --config file into the argument list. Command words and file
    // keys are appended only where the command line does not already supply them.
    void apply_config_file(std::vector<std::string>& args) const {
        std::string path;
        std::vector<std::string> positional;
        for (std::size_t i = 0; i < args.size(); ++i) {
            const auto& a = args[i];
            if (a.rfind("--config=", 0) == 0) path = a.substr(9);
            if (a == "--config" && i + 1 < args.size()) path = args[i + 1];
            if (a.size() > 1 && a[0] == '-') {
                const bool takes_value = a.find('=') == std::string::npos && a != "--extended" && a != "--crosscheck" &&
                                         a != "--help" && a != "-h" && a != "--version";
                if (takes_value) ++i;
                continue;
            }
            positional.push_back(a);
        }
        if (path.empty()) return;
        const auto entries = read_config_file(path);
        std::string command, suite;
        for (const auto& [k, val] : entries) {
            if (k == "command") command = val;
            if (k == "suite") suite = val;
        }
        // the longest run of leading positional words that names a command
        std::string given;
        std::size_t words = 0;
        for (std::size_t w = 1; w <= positional.size(); ++w) {
            std::string candidate;
            for (std::size_t i = 0; i < w; ++i) candidate += (i ? " " : "") + positional[i];
            if (find_command(candidate)) {
                given = candidate;
                words = w;
            }
        }
        if (given.empty() && !positional.empty()) given = positional[0];
        if (!given.empty() && !command.empty())
            require_domain(given == command, path + ": command '" + command + "' conflicts with '" + given + "'");
        if (command.empty()) command = given;
        const Command* cmd = find_command(command);
        require_domain(cmd != nullptr, path + ": unknown or missing command '" + command + "'");

        std::vector<std::string> extra;
        if (given.empty())
            for (const auto& w : split(command, ' '))
                if (!w.empty()) extra.push_back(w);
        if (cmd->name == "validate" && !suite.empty() && positional.size() <= words) extra.push_back(suite);
        auto on_command_line = [&](const std::string& key) {
            return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
                return a == "--" + key || a.rfind("--" + key + "=", 0) == 0;
            });
        };
        for (const auto& [k, val] : entries) {
            if (k == "command" || k == "version" || k == "suite") continue;
            require_domain(k != "config", path + ": 'config' cannot be set from a config file");
            const bool global = k == "seed" || k == "out" || k == "threads";
            const bool known = global || std::any_of(cmd->params.begin(), cmd->params.end(),
                                                     [&](const Param& p) { return p.key == k; });
            require_domain(known, path + ": unknown key '" + k + "' for command '" + command + "'");
            if (!on_command_line(k)) extra.push_back("--" + k + "=" + val);
        }
        if (given.empty())
            args.insert(args.begin(), extra.begin(), extra.end());
        else
            args.insert(args.end(), extra.begin(), extra.end());
    }

    std::string manifest(const Command& cmd) const {
        std::string m = "# dpp run manifest; rerun with: dpp --config manifest.cfg\n";
        m += "version = " + std::string(kVersion) + "\n";
        m += "command = " + cmd.name + "\n";
        m += "seed = " + std::to_string(v_.seed) + "\n";
        for (const auto& p : cmd.params) m += p.key + " = " + p.value() + "\n";
        return m;
    }

    void emit(const Command& cmd, Result result, std::ostream& out, std::ostream& err) const {
        const auto m = manifest(cmd);
        if (result.extension == "json") {
            // echo the resolved configuration inside the report
            auto j = json::parse(result.text);
            json echo;
            echo["command"] = cmd.name;
            echo["seed"] = v_.seed;
            for (const auto& p : cmd.params) echo[p.key] = p.value();
            j["config_echo"] = echo;
            j["version"] = kVersion;
            result.text = j.dump(2) + "\n";
        }
        if (v_.out.empty()) {
            out << result.text;
            err << m;
            return;
        }
        fs::create_directories(v_.out);
        std::ofstream(fs::path(v_.out) / ("result." + result.extension), std::ios::binary) << result.text;
        std::ofstream(fs::path(v_.out) / "manifest.cfg", std::ios::binary) << m;
    }

    CLI::App app_;
    Values v_;
    std::vector<Command> commands_;
};

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    Cli cli;
    return cli.run(argc, argv, out, err);
}

}  // namespace dpp
