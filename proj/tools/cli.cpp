#include "cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "graphwave/evolution.hpp"
#include "graphwave/functionals.hpp"
#include "graphwave/spectra.hpp"

namespace graphwave::cli {

namespace {

using nlohmann::json;

const std::vector<std::string> kCommands = {"profile", "actions", "morse",      "modes", "kernel",
                                            "slope",   "thresholds", "evolve", "rank"};

constexpr const char* kUsage =
    "usage: graphwave <command> [flags]\n"
    "       graphwave --sweep FILE [--outdir DIR]\n"
    "commands: profile actions morse modes kernel slope thresholds evolve rank\n"
    "common flags: --p --omega --beta --N [--M] [--kind symmetric|asymmetric --k K] [--out PATH]\n"
    "              [--config JSON]\n"
    "run `graphwave <command> --help` for the full list\n";

std::string num(double v) {
    if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// null stands for whatever non-finite value the field holds when unset
double number_or(const json& j, const char* key, double fallback, double if_null) {
    if (!j.contains(key)) return fallback;
    if (j[key].is_null()) return if_null;
    return j[key].get<double>();
}

void dump_into(const json& j, std::string& s) {
    switch (j.type()) {
        case json::value_t::object: {
            s += '{';
            bool first = true;
            for (auto it = j.begin(); it != j.end(); ++it) {
                if (!first) s += ',';
                first = false;
                s += json(it.key()).dump();
                s += ':';
                dump_into(it.value(), s);
            }
            s += '}';
            break;
        }
        case json::value_t::array: {
            s += '[';
            for (std::size_t i = 0; i < j.size(); ++i) {
                if (i) s += ',';
                dump_into(j[i], s);
            }
            s += ']';
            break;
        }
        case json::value_t::number_float: {
            const double v = j.get<double>();
            if (!std::isfinite(v)) {
                s += "null";
            } else {
                std::string t = num(v);
                // keep the float type on reparse
                if (t.find_first_of(".eE") == std::string::npos) t += ".0";
                s += t;
            }
            break;
        }
        default:
            s += j.dump();
    }
}

ModelParams model(const RunConfig& c) { return ModelParams::make(c.p, c.omega, c.beta, c.N); }

ProfileKind profile_kind(const RunConfig& c) {
    if (c.kind == "symmetric") return ProfileKind::Symmetric();
    if (c.kind == "asymmetric") return ProfileKind::Asymmetric(c.k);
    throw PreconditionError("unknown kind " + c.kind);
}

int points(const RunConfig& c) { return c.M > 0 ? c.M : default_points(c.command); }

void validate(const RunConfig& c) {
    if (std::find(kCommands.begin(), kCommands.end(), c.command) == kCommands.end()) {
        throw PreconditionError("unknown command " + c.command);
    }
    if (std::isnan(c.p) || std::isnan(c.omega) || std::isnan(c.beta) || c.N == 0) {
        throw PreconditionError("--p, --omega, --beta and --N are required");
    }
    (void)model(c);
    const ProfileKind kind = profile_kind(c);
    if (!kind.symmetric && (kind.k < 1 || kind.k >= c.N)) {
        throw PreconditionError("asymmetric profiles need 1 <= k <= N-1");
    }
    if (c.M < 0) throw PreconditionError("--M must be positive");
    if (c.command == "evolve") {
        if (!(c.dt > 0.0) || !(c.T > 0.0) || c.sample_every < 1) {
            throw PreconditionError("evolve needs dt > 0, T > 0 and sample-every >= 1");
        }
        if (c.base != "sampled" && c.base != "discrete") throw PreconditionError("--base is sampled or discrete");
        if (!(c.escape > 0.0) || !(c.wall_tol > 0.0)) throw PreconditionError("--escape and --wall-tol must be positive");
    }
}

json spectral_json(const SpectralReport& r) {
    auto opt = [](const std::optional<int>& v) { return v ? json(*v) : json(nullptr); };
    return {{"method", r.method}, {"n1", r.n1}, {"n2", r.n2}, {"ker1_dim", opt(r.ker1_dim)},
            {"ker2_dim", opt(r.ker2_dim)}, {"eigen1", r.eigen1}, {"eigen2", r.eigen2}};
}

json functional_json(const FunctionalReport& r) {
    return {{"S", r.S}, {"I", r.I}, {"E", r.E}, {"Q", r.Q}, {"P", r.P}, {"F", r.F}, {"grad_sq", r.grad_sq},
            {"power", r.power}};
}

void emit(const RunConfig& c, const std::string& text, std::ostream& out) {
    if (c.out.empty()) {
        out << text;
        return;
    }
    std::ofstream f(c.out, std::ios::binary);
    if (!f) throw PreconditionError("cannot open " + c.out);
    f << text;
}

std::string json_text(const RunConfig& c, json body) {
    json doc = {{"config", to_json(c)}};
    doc.update(body);
    return dump(doc) + "\n";
}

std::string cmd_profile(const RunConfig& c) {
    const CriticalPoint cp = build_critical_point(model(c), profile_kind(c), points(c));
    const StationarityReport s = stationarity_check(cp.field, cp.spec.params);
    std::ostringstream os;
    os << "# kind=" << to_string(cp.spec.kind) << " t1=" << num(cp.spec.t1) << " tN=" << num(cp.spec.tN)
       << " a1=" << num(cp.spec.a1) << " aN=" << num(cp.spec.aN) << "\n";
    os << "# interior=" << num(s.interior) << " slope_mismatch=" << num(s.slope_mismatch)
       << " vertex_balance=" << num(s.vertex_balance) << "\n";
    os << "edge,x,phi\n";
    const Grid& g = cp.field.grid();
    for (int j = 0; j < g.N(); ++j) {
        for (int i = 0; i < g.M(); ++i) os << j << ',' << num(g.x(i)) << ',' << num(cp.field(j, i).real()) << '\n';
    }
    return os.str();
}

std::string cmd_actions(const RunConfig& c) {
    const CriticalPoint cp = build_critical_point(model(c), profile_kind(c), points(c));
    return json_text(c, {{"report", functional_json(evaluate(cp.field, cp.spec.params))}});
}

std::string cmd_morse(const RunConfig& c) {
    const ProfileSpec spec = make_profile_spec(model(c), profile_kind(c));
    const SpectralReport s = morse_by_shooting(spec);
    const SpectralReport r = morse_by_inertia(spec, points(c));
    return json_text(c, {{"shooting", spectral_json(s)},
                         {"inertia", spectral_json(r)},
                         {"agreement", s.n1 == r.n1 && s.n2 == r.n2}});
}

std::string cmd_modes(const RunConfig& c) {
    const ProfileSpec spec = make_profile_spec(model(c), profile_kind(c));
    const int M = points(c);
    const auto modes = unstable_modes(spec, M);
    const double tau = kernel_tolerance(make_grid(spec.params, M));
    json list = json::array();
    for (const auto& m : modes) {
        list.push_back({{"re", m.lambda.real()}, {"im", m.lambda.imag()}, {"multiplicity", m.multiplicity}});
    }
    return json_text(c, {{"modes", list},
                         {"tolerance", tau},
                         {"count", count_modes(modes)},
                         {"count_above_10tol", count_modes(modes, 10 * tau)},
                         {"grillakis_lower_bound", grillakis_lower_bound(spec, std::max(M, 512))}});
}

std::string cmd_kernel(const RunConfig& c) {
    const ProfileSpec spec = make_profile_spec(model(c), profile_kind(c));
    const KernelReport r = kernel_report(spec, points(c));
    return json_text(c, {{"ker1_dim", r.ker1_dim},
                         {"ker2_dim", r.ker2_dim},
                         {"overlap2", r.overlap2},
                         {"smallest1", r.smallest1},
                         {"smallest2", r.smallest2},
                         {"tolerance", r.tolerance}});
}

std::string cmd_slope(const RunConfig& c) {
    const SlopeReport r = mass_slope(model(c));
    return json_text(c, {{"J", r.J},
                         {"J1", r.J1},
                         {"omega_star", r.omega_star ? json(*r.omega_star) : json(nullptr)},
                         {"in_proposition", r.in_proposition}});
}

std::string cmd_thresholds(const RunConfig& c) {
    const ModelParams m = model(c);
    json body = {{"omega_floor", m.omega_floor()},
                 {"omega_star", m.omega_star()},
                 {"beta_star", compute_beta_star(m.p(), m.omega(), m.N())},
                 {"xi", nullptr},
                 {"omega3", nullptr}};
    if (m.p() > 5.0 && m.beta() < 0.0) {
        const Omega3 o = omega3(m.p(), m.N(), m.beta());
        body["xi"] = o.xi;
        body["omega3"] = o.omega3;
    }
    return json_text(c, body);
}

std::string cmd_rank(const RunConfig& c) {
    const auto entries = rank_critical_points(model(c), points(c));
    std::ostringstream os;
    os << "rank,kind,k,S\n";
    for (std::size_t i = 0; i < entries.size(); ++i) {
        const auto& e = entries[i];
        os << i + 1 << ',' << (e.kind.symmetric ? "symmetric" : "asymmetric") << ',' << e.kind.k << ','
           << num(e.S) << '\n';
    }
    return os.str();
}

std::string cmd_evolve(const RunConfig& c, std::ostream& err) {
    const ModelParams m = model(c);
    const ProfileSpec spec = make_profile_spec(m, profile_kind(c));
    const Grid g = make_grid(m, points(c));
    const GraphField phi = c.base == "discrete" ? discrete_profile(spec, g) : sample_profile(spec, g);
    GraphField u0 = phi;
    u0 *= Complex(c.scale);
    if (c.perturb > 0.0) u0 += smooth_bump(g, c.perturb, c.seed, c.zero_sum);
    EvolveOptions o;
    o.dt = c.dt;
    o.T = c.T;
    o.sample_every = c.sample_every;
    o.nonlinear = !c.linear;
    o.reference = phi;
    o.escape = c.escape;
    o.wall_tolerance = c.wall_tol;
    const TrajectoryLog log = evolve(u0, m, o);
    std::ostringstream os;
    write_csv(log, os);
    err << "status=" << to_string(log.outcome.status) << " time=" << num(log.outcome.time)
        << " wall_peak=" << num(log.wall_peak) << (log.hit_dt_floor ? " dt_floor" : "") << "\n";
    if (!log.warning.empty()) err << "warning: " << log.warning << "\n";
    return os.str();
}

void add_model_options(CLI::App* sub, RunConfig& c, std::string& config_path) {
    sub->add_option("--p", c.p, "nonlinearity exponent");
    sub->add_option("--omega", c.omega, "frequency");
    sub->add_option("--beta", c.beta, "coupling intensity");
    sub->add_option("--N", c.N, "number of edges");
    sub->add_option("--M", c.M, "points per edge");
    sub->add_option("--kind", c.kind, "symmetric or asymmetric")->check(CLI::IsMember({"symmetric", "asymmetric"}));
    sub->add_option("--k", c.k, "edges on t1 for asymmetric profiles");
    sub->add_option("--out", c.out, "output file (default stdout)");
    sub->add_option("--config", config_path, "JSON config or a previous JSON output");
}

void add_evolve_options(CLI::App* sub, RunConfig& c) {
    sub->add_option("--dt", c.dt, "time step");
    sub->add_option("--T", c.T, "final time");
    sub->add_option("--sample-every", c.sample_every, "steps between samples");
    sub->add_option("--base", c.base, "sampled or discrete stationary state")
        ->check(CLI::IsMember({"sampled", "discrete"}));
    sub->add_option("--scale", c.scale, "multiplies the base profile");
    sub->add_option("--perturb", c.perturb, "amplitude of the smooth bump");
    sub->add_option("--seed", c.seed, "bump seed");
    sub->add_flag("--zero-sum", c.zero_sum, "bump with zero edge average");
    sub->add_flag("--linear", c.linear, "drop the nonlinearity");
    sub->add_option("--escape", c.escape, "orbit distance that ends the run");
    sub->add_option("--wall-tol", c.wall_tol, "wall monitor threshold");
}

// pulls --config out before CLI11 sees the rest, so flags override the file
std::optional<RunConfig> preload(const std::vector<std::string>& args) {
    for (std::size_t i = 1; i + 1 < args.size(); ++i) {
        if (args[i] != "--config") continue;
        std::ifstream f(args[i + 1]);
        if (!f) throw PreconditionError("cannot read " + args[i + 1]);
        json j;
        try {
            j = json::parse(f);
        } catch (const json::exception& e) {
            throw PreconditionError(std::string("bad config: ") + e.what());
        }
        return config_from_json(j);
    }
    return std::nullopt;
}

int guarded(std::ostream& err, const std::function<int()>& body) {
    try {
        return body();
    } catch (const PreconditionError& e) {
        err << "precondition: " << e.what() << "\n";
        return 2;
    } catch (const NoRootError& e) {
        err << "no root: " << e.what() << "\n";
        return 3;
    } catch (const UnresolvedError& e) {
        err << "unresolved: " << e.what() << "\n";
        return 3;
    }
}

std::vector<std::string> split_words(const std::string& line) {
    std::istringstream is(line);
    std::vector<std::string> words;
    for (std::string w; is >> w;) words.push_back(w);
    return words;
}

int run_sweep(const std::string& path, const std::string& outdir, std::ostream& out, std::ostream& err) {
    std::ifstream f(path);
    if (!f) {
        err << "cannot read " << path << "\n";
        return 2;
    }
    std::vector<std::vector<std::string>> cases;
    for (std::string line; std::getline(f, line);) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto words = split_words(line);
        if (!words.empty()) cases.push_back(std::move(words));
    }
    std::filesystem::create_directories(outdir);
    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto& w = cases[i];
        if (w[0] == "--sweep") {
            err << "nested --sweep on line " << i + 1 << "\n";
            return 2;
        }
        auto it = std::find(w.begin(), w.end(), "--out");
        std::ostringstream name;
        if (it == w.end() || it + 1 == w.end()) {
            const bool csv = w[0] == "profile" || w[0] == "evolve" || w[0] == "rank";
            name << "case_" << std::setw(3) << std::setfill('0') << i << (csv ? ".csv" : ".json");
            if (it != w.end()) w.pop_back();
            w.push_back("--out");
            w.push_back((std::filesystem::path(outdir) / name.str()).string());
        } else {
            *(it + 1) = (std::filesystem::path(outdir) / *(it + 1)).string();
        }
    }

    std::vector<int> codes(cases.size(), 0);
    std::vector<std::string> logs(cases.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i; (i = next.fetch_add(1)) < cases.size();) {
            std::ostringstream o, e;
            codes[i] = run(cases[i], o, e);
            logs[i] = e.str();
        }
    };
    const unsigned n = std::min<unsigned>(sweep_threads(), std::max<std::size_t>(cases.size(), 1));
    {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    }
    out << "case,exit,output\n";
    int worst = 0;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        const auto it = std::find(cases[i].begin(), cases[i].end(), "--out");
        out << i << ',' << codes[i] << ',' << *(it + 1) << '\n';
        if (!logs[i].empty()) err << "case " << i << ": " << logs[i];
        worst = std::max(worst, codes[i]);
    }
    return worst;
}

}  // namespace

int default_points(const std::string& command) {
    if (command == "morse" || command == "kernel") return 512;
    if (command == "modes") return 256;
    if (command == "evolve") return 1024;
    return 2048;
}

nlohmann::json to_json(const RunConfig& c) {
    return {{"command", c.command},
            {"p", c.p},
            {"omega", c.omega},
            {"beta", c.beta},
            {"N", c.N},
            {"M", c.M > 0 ? c.M : default_points(c.command)},
            {"kind", c.kind},
            {"k", c.k},
            {"dt", c.dt},
            {"T", c.T},
            {"sample_every", c.sample_every},
            {"base", c.base},
            {"scale", c.scale},
            {"perturb", c.perturb},
            {"seed", c.seed},
            {"zero_sum", c.zero_sum},
            {"linear", c.linear},
            {"escape", finite_or_null(c.escape)},
            {"wall_tol", finite_or_null(c.wall_tol)},
            {"out", c.out}};
}

RunConfig config_from_json(const nlohmann::json& in) {
    const json& j = in.contains("config") ? in.at("config") : in;
    if (!j.is_object()) throw PreconditionError("config must be a JSON object");
    RunConfig c;
    try {
        c.command = j.value("command", c.command);
        c.p = number_or(j, "p", c.p, std::numeric_limits<double>::quiet_NaN());
        c.omega = number_or(j, "omega", c.omega, std::numeric_limits<double>::quiet_NaN());
        c.beta = number_or(j, "beta", c.beta, std::numeric_limits<double>::quiet_NaN());
        c.N = j.value("N", c.N);
        c.M = j.value("M", c.M);
        c.kind = j.value("kind", c.kind);
        c.k = j.value("k", c.k);
        c.dt = j.value("dt", c.dt);
        c.T = j.value("T", c.T);
        c.sample_every = j.value("sample_every", c.sample_every);
        c.base = j.value("base", c.base);
        c.scale = j.value("scale", c.scale);
        c.perturb = j.value("perturb", c.perturb);
        c.seed = j.value("seed", c.seed);
        c.zero_sum = j.value("zero_sum", c.zero_sum);
        c.linear = j.value("linear", c.linear);
        c.escape = number_or(j, "escape", c.escape, std::numeric_limits<double>::infinity());
        c.wall_tol = number_or(j, "wall_tol", c.wall_tol, std::numeric_limits<double>::infinity());
        c.out = j.value("out", c.out);
    } catch (const json::exception& e) {
        throw PreconditionError(std::string("bad config field: ") + e.what());
    }
    return c;
}

std::string dump(const nlohmann::json& j) {
    std::string s;
    dump_into(j, s);
    return s;
}

unsigned sweep_threads() {
    if (const char* env = std::getenv("GRAPHWAVE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

int execute(const RunConfig& c, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        validate(c);
        std::string text;
        if (c.command == "profile") text = cmd_profile(c);
        else if (c.command == "actions") text = cmd_actions(c);
        else if (c.command == "morse") text = cmd_morse(c);
        else if (c.command == "modes") text = cmd_modes(c);
        else if (c.command == "kernel") text = cmd_kernel(c);
        else if (c.command == "slope") text = cmd_slope(c);
        else if (c.command == "thresholds") text = cmd_thresholds(c);
        else if (c.command == "rank") text = cmd_rank(c);
        else text = cmd_evolve(c, err);
        emit(c, text, out);
        return 0;
    });
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        err << kUsage;
        return 1;
    }
    if (args[0] == "--help" || args[0] == "-h") {
        out << kUsage;
        return 0;
    }
    if (args[0] == "--sweep") {
        std::string file, outdir = ".";
        for (std::size_t i = 1; i < args.size(); ++i) {
            if (i == 1) file = args[i];
            else if (args[i] == "--outdir" && i + 1 < args.size()) outdir = args[++i];
            else {
                err << kUsage;
                return 2;
            }
        }
        if (file.empty()) {
            err << kUsage;
            return 2;
        }
        return run_sweep(file, outdir, out, err);
    }
    if (std::find(kCommands.begin(), kCommands.end(), args[0]) == kCommands.end()) {
        err << "unknown command: " << args[0] << "\n" << kUsage;
        return 1;
    }

    RunConfig c;
    const int loaded = guarded(err, [&] {
        if (auto pre = preload(args)) c = *pre;
        return 0;
    });
    if (loaded != 0) return loaded;
    c.command = args[0];

    CLI::App app{"graphwave " + args[0]};
    app.name("graphwave " + args[0]);
    std::string config_path;
    add_model_options(&app, c, config_path);
    if (c.command == "evolve") add_evolve_options(&app, c);
    std::vector<std::string> rest(args.rbegin(), args.rend() - 1);  // CLI11 pops from the back
    try {
        app.parse(rest);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << e.what() << "\n";
        return 2;
    }
    return execute(c, out, err);
}

}  // namespace graphwave::cli
