#include "latkpp/cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "latkpp/barriers.hpp"
#include "latkpp/continuum.hpp"
#include "latkpp/dispersion.hpp"
#include "latkpp/error.hpp"
#include "latkpp/fronts.hpp"
#include "latkpp/green.hpp"
#include "latkpp/lattice.hpp"
#include "latkpp/reaction.hpp"

namespace latkpp::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct UsageError : Error {
    using Error::Error;
};

struct Context {
    std::string output_dir = "latkpp_out";
    std::uint64_t seed = 0;
    std::string subcommand;
    json config = json::object();
    std::ostream* out = nullptr;
};

/// Collects named checks with their measured value and tolerance.
class Checks {
public:
    void add(const std::string& name, double value, const std::string& rule, bool pass) {
        items_[name] = {{"value", value}, {"rule", rule}, {"pass", pass}};
        all_ = all_ && pass;
    }
    bool all() const noexcept { return all_; }
    const json& items() const noexcept { return items_; }

private:
    json items_ = json::object();
    bool all_ = true;
};

std::string num(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec || !fs::is_directory(dir)) throw UsageError("output_dir '" + dir + "' is not writable");
}

std::ofstream open_out(const Context& ctx, const std::string& name) {
    std::ofstream f(fs::path(ctx.output_dir) / name);
    if (!f) throw UsageError("cannot write " + name + " in " + ctx.output_dir);
    f << std::setprecision(17);
    return f;
}

void write_json(const Context& ctx, const std::string& name, const json& j) {
    auto f = open_out(ctx, name);
    f << j.dump(2) << '\n';
}

json envelope(const Context& ctx) {
    return {{"version", kVersion}, {"subcommand", ctx.subcommand}, {"seed", ctx.seed}, {"config", ctx.config}};
}

int finish(const Context& ctx, json summary, const Checks& checks) {
    summary["checks"] = checks.items();
    summary["pass"] = checks.all();
    write_json(ctx, "summary.json", summary);
    *ctx.out << summary.dump(2) << '\n';
    return checks.all() ? kExitOk : kExitFailed;
}

void require(bool ok, const std::string& msg) {
    if (!ok) throw UsageError(msg);
}

// ---------------------------------------------------------------- dispersion

struct DispersionArgs {
    double fprime0 = 1.0;
    double tol = kDefaultDispersionTol;
};

int cmd_dispersion(const Context& ctx, const DispersionArgs& a) {
    require(a.fprime0 > 0.0 && a.tol > 0.0, "dispersion: --fprime0 and --tol must be positive");
    const auto d = solve_dispersion(a.fprime0, a.tol);
    json s = envelope(ctx);
    s.update({{"fprime0", d.fprime0},
              {"c_star", d.c_star},
              {"lambda_star", d.lambda_star},
              {"Lambda_star", d.Lambda_star},
              {"bramson_coeff", d.bramson_coeff},
              {"residual1", d.residual_speed()},
              {"residual2", d.residual_sinh()}});
    Checks c;
    c.add("residuals", std::max(d.residual_speed(), d.residual_sinh()), "<= tol", std::max(d.residual_speed(), d.residual_sinh()) <= a.tol);
    return finish(ctx, s, c);
}

// -------------------------------------------------------------- green-verify

struct GreenArgs {
    double fprime0 = 1.0;
    long L = 1000;
    double dt = 0.01;
    double tmax = 400.0;
    long stride = 100;
    double xi_window = 2.0;
};

int cmd_green(const Context& ctx, const GreenArgs& a) {
    require(a.fprime0 > 0.0, "green-verify: --fprime0 must be positive");
    require(a.L >= 100, "green-verify: --L must be at least 100");
    require(a.dt > 0.0 && a.tmax >= 10.0, "green-verify: need --dt > 0 and --tmax >= 10");
    require(a.stride >= 1, "green-verify: --stride must be >= 1");
    require(a.xi_window > 0.0 && a.xi_window <= 3.0, "green-verify: --xi-window must lie in (0, 3]");
    const auto d = solve_dispersion(a.fprime0);

    std::vector<double> doubling;
    for (double t = 10.0; t < a.tmax - 1e-9; t *= 2.0) doubling.push_back(t);
    doubling.push_back(a.tmax);
    std::vector<double> times = doubling;
    const double every = static_cast<double>(a.stride) * a.dt;
    for (long k = 1; static_cast<double>(k) * every <= a.tmax + 1e-9; ++k) times.push_back(static_cast<double>(k) * every);

    const auto snaps = temporal_green(d, a.L, a.dt, times, ContaminationPolicy::Flag);
    auto is_doubling = [&](double t) {
        return std::any_of(doubling.begin(), doubling.end(), [&](double s) { return std::abs(s - t) < 0.5 * a.dt; });
    };

    std::vector<std::pair<double, double>> dense, sparse;
    double mass_err = 0.0, pos_min = INFINITY, bdry_max = 0.0;
    std::size_t contaminated = 0;
    auto esup = open_out(ctx, "e_sup.csv");
    esup << "t,E_sup,contaminated\n";
    for (const auto& s : snaps) {
        const auto dec = decompose(s, d);
        esup << s.t << ',' << dec.E_sup << ',' << (s.contaminated ? 1 : 0) << '\n';
        if (s.t >= 10.0 - 1e-9) dense.emplace_back(s.t, dec.E_sup);
        bdry_max = std::max(bdry_max, s.boundary_magnitude);
        if (s.contaminated) {
            ++contaminated;
        } else {
            mass_err = std::max(mass_err, std::abs(s.mass() - 1.0));
            pos_min = std::min(pos_min, s.min_value());
        }
        if (is_doubling(s.t)) {
            sparse.emplace_back(s.t, dec.E_sup);
            auto f = open_out(ctx, "green_t" + num(s.t) + ".csv");
            f << "t,j,G,H,R\n";
            for (std::size_t i = 0; i < dec.G.size(); ++i)
                f << s.t << ',' << s.j_min + static_cast<long>(i) << ',' << dec.G[i] << ',' << dec.H[i] << ','
                  << dec.R[i] << '\n';
        }
    }
    const auto fit = slope_fit(sparse, 10.0);
    const auto fit_dense = slope_fit(dense, 10.0);

    const auto pts = extract_P(snaps.back(), d, a.xi_window);
    double p_err = 0.0;
    auto pf = open_out(ctx, "p_tilde.csv");
    pf << "xi,P_tilde,P\n";
    for (const auto& p : pts) {
        pf << p.xi << ',' << p.p_tilde << ',' << p.p_exact << '\n';
        p_err = std::max(p_err, std::abs(p.p_tilde - p.p_exact));
    }

    json s = envelope(ctx);
    s.update({{"slope", fit.slope},
              {"intercept", fit.intercept},
              {"r2", fit.r2},
              {"fit_times", [&] {
                   json t = json::array();
                   for (const auto& [tt, e] : sparse) t.push_back(tt);
                   return t;
               }()},
              {"slope_dense", fit_dense.slope},
              {"r2_dense", fit_dense.r2},
              {"mass_error_max", mass_err},
              {"positivity_min", pos_min},
              {"boundary_magnitude_max", bdry_max},
              {"contaminated_snapshots", contaminated},
              {"p_tilde_sup_error", p_err},
              {"c_star", d.c_star},
              {"lambda_star", d.lambda_star}});
    Checks c;
    c.add("slope", fit.slope, "in [-1.55, -1.45]", fit.slope >= -1.55 && fit.slope <= -1.45);
    c.add("r2", fit.r2, ">= 0.999", fit.r2 >= 0.999);
    c.add("mass_error_max", mass_err, "<= 1e-8 before contamination", mass_err <= 1e-8);
    c.add("positivity_min", pos_min, ">= -1e-12 before contamination", pos_min >= -1e-12);
    c.add("p_tilde_sup_error", p_err, "<= 0.1", p_err <= 0.1);
    return finish(ctx, s, c);
}

// ------------------------------------------------------------------- bramson

struct BramsonArgs {
    double fprime0 = 1.0;
    long L = 1200;
    double dt = 0.01;
    double T = 400.0;
    std::vector<double> levels{0.1, 0.5, 0.9};
    double sample_every = 1.0;
    double t_min = 50.0;
    double t_max = -1.0;
};

int cmd_bramson(const Context& ctx, const BramsonArgs& a) {
    require(a.fprime0 > 0.0 && a.dt > 0.0 && a.T > 0.0, "bramson: --fprime0, --dt, --T must be positive");
    require(!a.levels.empty(), "bramson: --levels must not be empty");
    for (double m : a.levels) require(m > 0.0 && m < 1.0, "bramson: levels must lie in (0, 1)");
    require(a.sample_every >= a.dt, "bramson: --sample-every must be at least --dt");
    const auto reaction = make_logistic(a.fprime0);
    const auto d = solve_dispersion(a.fprime0);
    require(static_cast<double>(a.L) >= d.c_star * a.T + 10.0 * std::sqrt(a.T), "bramson: --L must be at least c* T + 10 sqrt(T)");
    const double t_max = a.t_max > 0.0 ? a.t_max : a.T;

    const auto stride = static_cast<std::size_t>(std::llround(a.sample_every / a.dt));
    const auto traces = trace_levels(reaction, a.L, a.dt, a.T, a.levels, stride);

    auto tf = open_out(ctx, "trace.csv");
    tf << "m,t,j_m,x_m\n";
    for (const auto& tr : traces)
        for (const auto& s : tr.samples) tf << tr.m << ',' << s.t << ',' << s.j_m << ',' << s.x_m << '\n';

    json fits = json::array();
    double lo = INFINITY, hi = -INFINITY, sum = 0.0;
    Checks c;
    for (const auto& tr : traces) {
        const auto f = bramson_fit(tr, d, a.t_min, t_max);
        const double osc = delay_oscillation(tr, d, 100.0, t_max);
        fits.push_back({{"m", f.m},
                        {"a_hat", f.a_hat},
                        {"b_hat", f.b_hat},
                        {"r2", f.r2},
                        {"slope_stderr", f.slope_stderr},
                        {"oscillation_100_tmax", osc},
                        {"bramson_coeff_theory", f.theory}});
        lo = std::min(lo, f.a_hat);
        hi = std::max(hi, f.a_hat);
        sum += f.a_hat;
        if (std::abs(f.m - 0.5) < 1e-12) {
            const double rel = std::abs(f.a_hat / f.theory - 1.0);
            c.add("a_hat_m0.5_rel_error", rel, "<= 0.10", rel <= 0.10);
            c.add("oscillation_m0.5", osc, "<= 2", osc <= 2.0);
        }
    }
    const double spread = (hi - lo) / (sum / static_cast<double>(traces.size()));
    if (traces.size() > 1) c.add("level_spread", spread, "<= 0.02 of the mean a_hat", spread <= 0.02);
    write_json(ctx, "fit.json", fits);

    json s = envelope(ctx);
    s.update({{"fits", fits}, {"level_spread", spread}, {"c_star", d.c_star}, {"bramson_coeff_theory", d.bramson_coeff}});
    return finish(ctx, s, c);
}

// --------------------------------------------------------------------- front

struct FrontArgs {
    bool collapse = false;
    double fprime0 = 1.0;
    long L = 1200;
    double dt = 0.01;
    double t1 = 200.0;
    double t2 = 400.0;
    long half_width = 20;
};

int cmd_front(const Context& ctx, const FrontArgs& a) {
    require(a.collapse, "front: --collapse is the only supported mode");
    require(a.fprime0 > 0.0 && a.dt > 0.0, "front: --fprime0 and --dt must be positive");
    require(a.t1 > 0.0 && a.t2 > a.t1, "front: need 0 < --t1 < --t2");
    require(a.half_width >= 1, "front: --half-width must be >= 1");
    const auto reaction = make_logistic(a.fprime0);
    const auto d = solve_dispersion(a.fprime0);
    require(static_cast<double>(a.L) >= d.c_star * a.t2 + 10.0 * std::sqrt(a.t2), "front: --L must be at least c* t2 + 10 sqrt(t2)");

    const auto s1 = static_cast<std::size_t>(std::llround(a.t1 / a.dt));
    LatticeField at1;
    const Observer obs{s1, [&](std::size_t k, const LatticeField& f) {
                           if (k == s1) at1 = f;
                       }};
    const auto at2 = simulate_step(reaction, a.L, a.dt, a.t2, std::span(&obs, 1));

    const auto p1 = extract_profile(at1, 0.5, a.half_width);
    const auto p2 = extract_profile(at2, 0.5, a.half_width);
    const double dist = collapse_distance(p1, p2);
    for (const auto* p : {&p1, &p2}) {
        auto f = open_out(ctx, "profile_t" + num(p->t) + ".csv");
        f << "t,k,u\n";
        for (std::size_t i = 0; i < p->offsets.size(); ++i) f << p->t << ',' << p->offsets[i] << ',' << p->values[i] << '\n';
    }
    const auto sp = spreading_check(at1, d, 0.9 * d.c_star, 1.1 * d.c_star);

    json s = envelope(ctx);
    s.update({{"distance", dist},
              {"anchor_t1", p1.anchor},
              {"anchor_t2", p2.anchor},
              {"spreading_t1", {{"t", sp.t}, {"min_behind", sp.min_behind}, {"max_ahead", sp.max_ahead}}}});
    Checks c;
    c.add("collapse_distance", dist, "<= 0.01", dist <= 0.01);
    c.add("spreading_min_behind", sp.min_behind, ">= 0.99", sp.min_behind >= 0.99);
    c.add("spreading_max_ahead", sp.max_ahead, "<= 1e-3", sp.max_ahead <= 1e-3);
    return finish(ctx, s, c);
}

// ------------------------------------------------------------- barrier-check

struct BarrierArgs {
    std::vector<double> t{2000.0};
    std::string params = "default";
    double fprime0 = 1.0;
    double dt = 0.05;
};

BarrierParams load_params(const std::string& spec, const Dispersion& d) {
    auto p = BarrierParams::defaults(d);
    if (spec == "default") return p;
    std::ifstream f(spec);
    if (!f) throw UsageError("barrier-check: cannot read params file '" + spec + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw UsageError(std::string("barrier-check: bad params JSON: ") + e.what());
    }
    for (auto [key, field] : {std::pair{"delta", &p.delta}, {"beta", &p.beta}, {"alpha", &p.alpha}, {"eta", &p.eta},
                              {"eta1", &p.eta1}, {"eta2", &p.eta2}, {"a", &p.a}, {"A", &p.A},
                              {"xi0_lower", &p.xi0_lower}, {"CM", &p.CM}})
        if (j.contains(key)) *field = j.at(key).get<double>();
    if (j.contains("w0")) {
        long J = 0;
        for (const auto& [k, v] : j.at("w0").items()) J = std::max(J, std::abs(std::stol(k)));
        p.w0 = LatticeField::filled(-J, J, 0.0);
        for (const auto& [k, v] : j.at("w0").items()) p.w0[std::stol(k)] = v.get<double>();
    }
    return p;
}

int cmd_barrier(const Context& ctx, const BarrierArgs& a) {
    require(!a.t.empty(), "barrier-check: --t must not be empty");
    for (double t : a.t) require(t > 0.0, "barrier-check: times must be positive");
    require(a.dt > 0.0 && a.fprime0 > 0.0, "barrier-check: --dt and --fprime0 must be positive");
    const auto d = solve_dispersion(a.fprime0);
    const auto p = load_params(a.params, d);
    const auto chk = validate_params(p);
    require(chk.pass, "barrier-check: parameters violate " + chk.first_violation);
    const auto rep = barrier_check(d, make_logistic(a.fprime0), p, a.t, a.dt);

    json s = envelope(ctx);
    s["params"] = p.to_json();
    s["report"] = rep.to_json();
    json regions = json::array();
    Checks c;
    for (const auto& tr : rep.times)
        for (const auto& r : tr.regions) {
            regions.push_back({{"t", tr.t},
                               {"region", r.barrier + "_" + r.region},
                               {"min_residual", r.min_residual},
                               {"max_residual", r.max_residual},
                               {"pass", r.pass}});
            const double v = r.barrier == "upper" ? r.min_residual : r.max_residual;
            c.add(r.barrier + "_" + r.region + "_t" + num(tr.t), v, r.barrier == "upper" ? ">= 0" : "<= 0", r.pass);
        }
    s["regions"] = regions;
    return finish(ctx, s, c);
}

// ----------------------------------------------------------------- continuum

struct ContinuumArgs {
    bool bramson = false;
    bool heat_ratio = false;
    double fprime0 = 1.0;
    double dx = 0.05;
    double dt = -1.0;
    double T = 300.0;
    double X = -1.0;
    double m = 0.5;
    double t = 1000.0;
    std::vector<double> y{2.0, 5.0, 10.0};
    double Z = 1.0;
};

int cmd_continuum(const Context& ctx, const ContinuumArgs& a) {
    require(a.bramson != a.heat_ratio, "continuum: pass exactly one of --bramson, --heat-ratio");
    json s = envelope(ctx);
    Checks c;
    if (a.bramson) {
        require(a.fprime0 > 0.0 && a.dx > 0.0 && a.dx <= 0.1 && a.T > 0.0, "continuum: need --fprime0 > 0, 0 < --dx <= 0.1, --T > 0");
        const double cs = 2.0 * std::sqrt(a.fprime0);
        const double X = a.X > 0.0 ? a.X : cs * a.T + 10.0 * std::sqrt(a.T) + 100.0;
        const double dt = a.dt > 0.0 ? a.dt : 0.25 * a.dx * a.dx;
        require(dt <= 0.5 * a.dx * a.dx, "continuum: --dt must be at most dx^2 / 2");
        require(X >= cs * a.T + 10.0 * std::sqrt(a.T), "continuum: --X must be at least c* T + 10 sqrt(T)");
        const auto r = continuous_bramson(a.fprime0, a.dx, X, dt, a.T, a.m);
        auto f = open_out(ctx, "trace.csv");
        f << "m,t,x_m\n";
        for (const auto& [t, x] : r.trace) f << r.m << ',' << t << ',' << x << '\n';
        const double rel = std::abs(r.a_hat / r.theory - 1.0);
        s.update({{"m", r.m},
                  {"a_hat", r.a_hat},
                  {"b_hat", r.b_hat},
                  {"r2", r.r2},
                  {"slope_stderr", r.slope_stderr},
                  {"bramson_coeff_theory", r.theory},
                  {"c_star", r.c_star},
                  {"min_value", r.min_value},
                  {"max_value", r.max_value},
                  {"monotone", r.monotone}});
        c.add("a_hat_rel_error", rel, "<= 0.10", rel <= 0.10);
    } else {
        require(a.t > 0.0 && a.Z > 0.0, "continuum: --t and --Z must be positive");
        const auto data = OddData::indicator(a.Z);
        const double k = asymptotic_constant(data);
        auto f = open_out(ctx, "heat_ratio.csv");
        f << "t,y,ratio\n";
        json rows = json::array();
        double worst = 0.0;
        for (double y : a.y) {
            require(y != 0.0 && std::abs(y) <= std::sqrt(a.t), "continuum: need 0 < |y| <= sqrt(t)");
            const double r = asymptotic_ratio(a.t, y, data);
            f << a.t << ',' << y << ',' << r << '\n';
            rows.push_back({{"y", y}, {"ratio", r}});
            worst = std::max(worst, std::abs(r / k - 1.0));
        }
        s.update({{"t", a.t}, {"moment1", data.moment1}, {"predicted", k}, {"ratios", rows}, {"max_rel_dev", worst}});
        c.add("heat_ratio_rel_dev", worst, "<= 0.02", worst <= 0.02);
    }
    return finish(ctx, s, c);
}

// ------------------------------------------------------------------ odd-data

struct OddArgs {
    double fprime0 = 1.0;
    double t = 400.0;
    double dt = 0.01;
};

int cmd_odd(const Context& ctx, const OddArgs& a) {
    require(a.fprime0 > 0.0 && a.dt > 0.0 && a.t >= 100.0, "odd-data: need --fprime0 > 0, --dt > 0, --t >= 100");
    const auto d = solve_dispersion(a.fprime0);
    auto w0 = LatticeField::filled(-1, 1, 0.0);
    w0[1] = 1.0;
    w0[-1] = -1.0;
    const auto r = odd_data_asymptotics(w0, d, a.t, a.dt);
    auto f = open_out(ctx, "odd_ratio.csv");
    f << "t,j,x,w,ratio\n";
    for (const auto& p : r.points) f << r.t << ',' << p.j << ',' << p.x << ',' << p.w << ',' << p.ratio << '\n';
    json s = envelope(ctx);
    s.update({{"t", r.t},
              {"predicted", r.predicted},
              {"min_ratio", r.min_ratio},
              {"max_ratio", r.max_ratio},
              {"max_rel_dev", r.max_rel_dev},
              {"all_positive", r.all_positive}});
    Checks c;
    c.add("ratio_rel_dev", r.max_rel_dev, "<= 0.05", r.max_rel_dev <= 0.05);
    c.add("positivity", r.all_positive ? 1.0 : 0.0, "w > 0 on the window", r.all_positive);
    return finish(ctx, s, c);
}

// -------------------------------------------------------------------- driver

std::vector<std::string> args_from_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw UsageError("cannot read config '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw UsageError(std::string("bad config JSON: ") + e.what());
    }
    if (!j.is_object() || !j.contains("subcommand") || !j.at("subcommand").is_string())
        throw UsageError("config must be an object with a 'subcommand' string");
    std::vector<std::string> args;
    if (j.contains("seed")) args.insert(args.end(), {"--seed", j.at("seed").dump()});
    if (j.contains("output_dir")) args.insert(args.end(), {"--output-dir", j.at("output_dir").get<std::string>()});
    args.push_back(j.at("subcommand").get<std::string>());
    if (j.contains("parameters")) {
        for (const auto& [k, v] : j.at("parameters").items()) {
            const std::string flag = "--" + k;
            if (v.is_boolean()) {
                if (v.get<bool>()) args.push_back(flag);
            } else if (v.is_array()) {
                std::string joined;
                for (const auto& e : v) joined += (joined.empty() ? "" : ",") + (e.is_string() ? e.get<std::string>() : e.dump());
                args.insert(args.end(), {flag, joined});
            } else {
                args.insert(args.end(), {flag, v.is_string() ? v.get<std::string>() : v.dump()});
            }
        }
    }
    return args;
}

std::string join_results(const std::vector<std::string>& parts) {
    std::string out;
    for (const auto& p : parts) out += (out.empty() ? "" : ",") + p;
    return out;
}

/// Numbers become JSON numbers, comma lists become arrays, anything else stays a string.
json typed_value(const std::string& text) {
    auto scalar = [](const std::string& s) -> json {
        std::size_t used = 0;
        try {
            const double v = std::stod(s, &used);
            if (used == s.size()) return v;
        } catch (const std::exception&) {
        }
        return s;
    };
    std::string body = text;
    const bool bracketed = body.size() >= 2 && body.front() == '[' && body.back() == ']';
    if (bracketed) body = body.substr(1, body.size() - 2);
    if (!bracketed && body.find(',') == std::string::npos) return scalar(body);
    json arr = json::array();
    std::stringstream ss(body);
    for (std::string item; std::getline(ss, item, ',');) arr.push_back(scalar(item));
    return arr;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Lattice Fisher-KPP front and Green's function experiments"};
    app.set_version_flag("--version", kVersion);
    app.option_defaults()->always_capture_default();
    app.fallthrough();
    app.require_subcommand(0, 1);

    Context ctx;
    ctx.out = &out;
    std::string config_path;
    app.add_option("--config", config_path, "JSON run configuration");
    auto* seed_opt = app.add_option("--seed", ctx.seed, "Seed recorded in every summary");
    auto* dir_opt = app.add_option("--output-dir,--output_dir", ctx.output_dir, "Directory for CSV and JSON artifacts");

    DispersionArgs da;
    auto* sd = app.add_subcommand("dispersion", "Minimal speed and decay rate");
    sd->add_option("--fprime0", da.fprime0);
    sd->add_option("--tol", da.tol);

    GreenArgs ga;
    auto* sg = app.add_subcommand("green-verify", "Temporal Green's function against its refined expansion");
    sg->add_option("--fprime0", ga.fprime0);
    sg->add_option("--L", ga.L);
    sg->add_option("--dt", ga.dt);
    sg->add_option("--tmax", ga.tmax);
    sg->add_option("--stride", ga.stride, "Steps between remainder samples");
    sg->add_option("--xi-window,--xi_window", ga.xi_window);

    BramsonArgs ba;
    auto* sb = app.add_subcommand("bramson", "Logarithmic delay of level sets from step data");
    sb->add_option("--fprime0", ba.fprime0);
    sb->add_option("--L", ba.L);
    sb->add_option("--dt", ba.dt);
    sb->add_option("--T", ba.T);
    sb->add_option("--levels", ba.levels)->delimiter(',');
    sb->add_option("--sample-every,--sample_every", ba.sample_every);
    sb->add_option("--t-min,--t_min", ba.t_min);
    sb->add_option("--t-max,--t_max", ba.t_max);

    FrontArgs fa;
    auto* sf = app.add_subcommand("front", "Profile collapse and spreading");
    sf->add_flag("--collapse", fa.collapse);
    sf->add_option("--fprime0", fa.fprime0);
    sf->add_option("--L", fa.L);
    sf->add_option("--dt", fa.dt);
    sf->add_option("--t1", fa.t1);
    sf->add_option("--t2", fa.t2);
    sf->add_option("--half-width,--half_width", fa.half_width);

    BarrierArgs rb;
    auto* sr = app.add_subcommand("barrier-check", "Sampled certification of the explicit barriers");
    sr->add_option("--t", rb.t)->delimiter(',');
    sr->add_option("--params", rb.params, "'default' or a JSON file of overrides");
    sr->add_option("--fprime0", rb.fprime0);
    sr->add_option("--dt", rb.dt);

    ContinuumArgs ca;
    auto* sc = app.add_subcommand("continuum", "Continuous companion: Bramson fit or heat-kernel ratio");
    sc->add_flag("--bramson", ca.bramson);
    sc->add_flag("--heat-ratio,--heat_ratio", ca.heat_ratio);
    sc->add_option("--fprime0", ca.fprime0);
    sc->add_option("--dx", ca.dx);
    sc->add_option("--dt", ca.dt);
    sc->add_option("--T", ca.T);
    sc->add_option("--X", ca.X);
    sc->add_option("--m", ca.m);
    sc->add_option("--t", ca.t);
    sc->add_option("--y", ca.y)->delimiter(',');
    sc->add_option("--Z", ca.Z);

    OddArgs oa;
    auto* so = app.add_subcommand("odd-data", "Large-time ratio for odd initial data");
    so->add_option("--fprime0", oa.fprime0);
    so->add_option("--t", oa.t);
    so->add_option("--dt", oa.dt);

    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (!config_path.empty()) {
        if (app.get_subcommands().size() > 0) {
            err << "--config replaces the subcommand; pass one or the other\n";
            return kExitUsage;
        }
        try {
            auto from_cfg = args_from_config(config_path);
            if (std::find(from_cfg.begin(), from_cfg.end(), "--config") != from_cfg.end())
                throw UsageError("config may not reference another config");
            // Globals given next to --config win over the file.
            std::vector<std::string> merged;
            if (seed_opt->count() > 0) merged.insert(merged.end(), {"--seed", std::to_string(ctx.seed)});
            if (dir_opt->count() > 0) merged.insert(merged.end(), {"--output-dir", ctx.output_dir});
            for (std::size_t i = 0; i < from_cfg.size(); ++i) {
                const bool global = from_cfg[i] == "--seed" || from_cfg[i] == "--output-dir";
                if (global && ((from_cfg[i] == "--seed" && seed_opt->count() > 0) ||
                               (from_cfg[i] == "--output-dir" && dir_opt->count() > 0))) {
                    ++i;
                    continue;
                }
                merged.push_back(from_cfg[i]);
            }
            return run(merged, out, err);
        } catch (const UsageError& e) {
            err << "usage error: " << e.what() << '\n';
            return kExitUsage;
        }
    }
    if (app.get_subcommands().empty()) {
        err << app.help();
        return kExitUsage;
    }

    auto* sub = app.get_subcommands().front();
    ctx.subcommand = sub->get_name();
    json params = json::object();
    for (const auto* opt : sub->get_options()) {
        if (opt->get_name() == "--help") continue;
        std::string key = opt->get_name();
        key.erase(0, key.find_first_not_of('-'));
        if (opt->get_type_size() == 0) {
            params[key] = opt->count() > 0;
            continue;
        }
        const std::string text = opt->count() > 0 ? join_results(opt->results()) : opt->get_default_str();
        params[key] = typed_value(text);
    }
    ctx.config = {{"subcommand", ctx.subcommand}, {"seed", ctx.seed}, {"output_dir", ctx.output_dir},
                  {"parameters", params}};

    try {
        ensure_dir(ctx.output_dir);
        write_json(ctx, "config.json", ctx.config);
        if (sub == sd) return cmd_dispersion(ctx, da);
        if (sub == sg) return cmd_green(ctx, ga);
        if (sub == sb) return cmd_bramson(ctx, ba);
        if (sub == sf) return cmd_front(ctx, fa);
        if (sub == sr) return cmd_barrier(ctx, rb);
        if (sub == sc) return cmd_continuum(ctx, ca);
        if (sub == so) return cmd_odd(ctx, oa);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError& e) {
        err << "invalid parameters: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        const json diag = {{"version", kVersion}, {"error", e.what()}, {"config", ctx.config}};
        try {
            write_json(ctx, "error.json", diag);
        } catch (...) {
        }
        err << diag.dump(2) << '\n';
        return kExitFailed;
    }
    return kExitUsage;
}

}  // namespace latkpp::cli
