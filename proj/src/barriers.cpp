#include "latkpp/barriers.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "latkpp/error.hpp"

namespace latkpp {

namespace {

constexpr double kPi = std::numbers::pi;

double w0_sup(const LatticeField& w0) {
    double s = 0.0;
    for (double v : w0.values) s = std::max(s, std::abs(v));
    return s;
}

long w0_radius(const LatticeField& w0) {
    long J = 0;
    for (long j = w0.j_min; j <= w0.j_max(); ++j)
        if (w0.at(j) != 0.0) J = std::max(J, std::abs(j));
    return J;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

BarrierParams BarrierParams::defaults(const Dispersion& d) {
    BarrierParams p;
    p.eta1 = 3.0 * d.cosh_lambda * p.a;
    p.eta2 = 8.0 * d.cosh_lambda * p.A * 2.0;
    p.w0 = LatticeField::filled(-1, 1, 0.0);
    p.w0[1] = 100.0;
    p.w0[-1] = -100.0;
    return p;
}

nlohmann::json BarrierParams::to_json() const {
    nlohmann::json w = nlohmann::json::object();
    for (long j = w0.j_min; j <= w0.j_max(); ++j)
        if (w0.at(j) != 0.0) w[std::to_string(j)] = w0.at(j);
    return {{"delta", delta}, {"beta", beta}, {"alpha", alpha}, {"eta", eta}, {"eta1", eta1}, {"eta2", eta2},
            {"a", a},         {"A", A},       {"w0", w},         {"xi0_lower", xi0_lower}, {"CM", CM}};
}

ParamCheck validate_params(const BarrierParams& p) {
    ParamCheck r;
    auto need = [&r](bool ok, const std::string& what) {
        if (r.pass && !ok) {
            r.pass = false;
            r.first_violation = what;
        }
    };
    const double cap = std::min(p.alpha - p.delta, (3.0 * p.alpha - 1.0) / 2.0);
    need(0.0 < p.delta, "0 < delta");
    need(p.delta < p.beta, "delta < beta");
    need(p.beta < p.alpha - p.delta, "beta < alpha - delta = " + fmt(p.alpha - p.delta));
    need(p.beta < (3.0 * p.alpha - 1.0) / 2.0, "beta < (3 alpha - 1)/2 = " + fmt((3.0 * p.alpha - 1.0) / 2.0));
    need(cap < p.alpha, "min(alpha - delta, (3 alpha - 1)/2) < alpha");
    need(p.alpha < 0.5, "alpha < 1/2");
    need(p.beta < p.eta, "beta < eta");
    need(p.eta < p.alpha, "eta < alpha");
    need(0.0 < p.eta1, "0 < eta1");
    need(p.eta1 < p.eta2, "eta1 < eta2");
    need(p.a > 1.0, "a > 1");
    need(p.xi0_lower > 0.0, "xi0_lower > 0");
    need(p.CM >= 0.0, "CM >= 0");
    bool odd = !p.w0.values.empty() && p.w0.left_clamp == 0.0 && p.w0.right_clamp == 0.0;
    for (long j = 0; odd && j <= w0_radius(p.w0); ++j)
        odd = p.w0.at(j) == -p.w0.at(-j) && p.w0.at(j) >= 0.0;
    need(odd, "w0 odd and nonnegative for j >= 0");
    return r;
}

double cosine_term(double j, double t, const BarrierParams& p, const Dispersion& d) {
    if (!(t > 0.0)) throw DomainError("cosine_term: t must be positive");
    const double x = j - d.c_star * t;
    return std::pow(1.0 + t, -(1.5 - p.beta)) * std::cos(x / std::pow(1.0 + t, p.alpha));
}

double cosine_rate(double j, double t, const BarrierParams& p, const Dispersion& d) {
    if (!(t > 0.0)) throw DomainError("cosine_rate: t must be positive");
    const double x = j - d.c_star * t;
    const double amp = std::pow(1.0 + t, -(1.5 - p.beta));
    const double sa = std::pow(1.0 + t, p.alpha);
    const double th = x / sa;
    // d/dt of theta = -c / (1+t)^alpha - alpha x / (1+t)^{alpha+1}
    return amp * (-(1.5 - p.beta) / (1.0 + t) * std::cos(th) +
                  std::sin(th) * (d.c_star / sa + p.alpha * x / (sa * (1.0 + t))));
}

CutoffValue cutoff_Gamma(double x, double eta1, double eta2) {
    if (!(eta1 < eta2)) throw DomainError("cutoff_Gamma: need eta1 < eta2");
    const double w = eta2 - eta1;
    const double s = (x - eta1) / w;
    if (s <= 0.0) return {0.0, 0.0, 0.0};
    if (s >= 1.0) return {1.0, 0.0, 0.0};
    const double s2 = s * s;
    return {s2 * s * (10.0 - 15.0 * s + 6.0 * s2), 30.0 * s2 * (1.0 - s) * (1.0 - s) / w,
            60.0 * s * (1.0 - s) * (1.0 - 2.0 * s) / (w * w)};
}

CutoffBounds cutoff_bounds(double eta1, double eta2, int n_samples) {
    if (n_samples < 2) throw DomainError("cutoff_bounds: need at least 2 samples");
    CutoffBounds b;
    const double w = eta2 - eta1;
    b.bound_d1 = kCutoffC1 / w;
    b.bound_d2 = kCutoffC2 / (w * w);
    for (int k = 0; k < n_samples; ++k) {
        const double x = eta1 + w * static_cast<double>(k) / (n_samples - 1);
        const auto g = cutoff_Gamma(x, eta1, eta2);
        b.sup_d1 = std::max(b.sup_d1, std::abs(g.d1));
        b.sup_d2 = std::max(b.sup_d2, std::abs(g.d2));
    }
    b.within = b.sup_d1 <= b.bound_d1 * (1.0 + 1e-12) && b.sup_d2 <= b.bound_d2 * (1.0 + 1e-12);
    return b;
}

double xi_upper(double t, const BarrierParams& p) {
    return 1.0 - std::pow(1.0 + t, -(3.0 * p.alpha - 2.0 * p.beta - 1.0));
}

double xi_upper_rate(double t, const BarrierParams& p) {
    const double k = 3.0 * p.alpha - 2.0 * p.beta - 1.0;
    return k * std::pow(1.0 + t, -(k + 1.0));
}

double xi_lower(double t, const BarrierParams& p, double CM) {
    return p.xi0_lower / (1.0 + p.xi0_lower * CM * t / (1.0 + t));
}

double xi_lower_rate(double t, const BarrierParams& p, double CM) {
    const double x = xi_lower(t, p, CM);
    return -CM * x * x / ((1.0 + t) * (1.0 + t));
}

double nonlinear_R(double j, double t, double s, const ReactionSpec& f, const Dispersion& d) {
    const double x = j - d.c_star * t;
    const double u = std::exp(-d.lambda_star * x) * s;
    // s (f'(0) - f(u)/u) avoids the overflowing factor e^{l x}.
    if (u == 0.0) return 0.0;
    if (!std::isfinite(u)) return s * (f.fprime0() - f.fprime1());
    return s * (f.fprime0() - f(u) / u);
}

double reaction_M(const ReactionSpec& f, int n_samples) {
    if (n_samples < 10) throw DomainError("reaction_M: need at least 10 samples");
    double M = 0.0;
    for (int k = 1; k <= n_samples; ++k) {
        const double s = static_cast<double>(k) / n_samples;
        M = std::max(M, (f.fprime0() * s - f(s)) / (s * s));
    }
    return M;
}

BarrierFrame::BarrierFrame(const BarrierParams& p, const Dispersion& d, const LatticeField& w, double CM)
    : p_(p), d_(d), w_(w), t_(w.t), CM_(CM), el_(std::exp(d.lambda_star)), eml_(std::exp(-d.lambda_star)),
      chi_(1.0), w0_norm_(w0_sup(p.w0)) {
    if (!(t_ > 0.0)) throw DomainError("BarrierFrame: snapshot time must be positive");
    long j = static_cast<long>(std::ceil(d_.c_star * t_ + 1.0));
    if (w.at(j) > 0.0) {
        while (j + 1 <= w.j_max() && w.at(j + 1) > 0.0) ++j;
        chi_ = x_of(j);
    }
}

double BarrierFrame::Lw(long j) const { return el_ * w(j - 1) - 2.0 * d_.cosh_lambda * w(j) + eml_ * w(j + 1); }

bool BarrierFrame::in_upper_window(long j) const {
    const double x = x_of(j);
    return x >= -std::pow(t_, p_.delta) - 1.0 && x <= 1.5 * kPi * std::pow(1.0 + t_, p_.alpha);
}

bool BarrierFrame::in_lower_window(long j) const {
    const double x = x_of(j);
    return x >= std::pow(t_, p_.delta) - 1.0 && x <= 1.5 * kPi * std::pow(1.0 + t_, p_.alpha);
}

bool BarrierFrame::in_chi(long j) const {
    const double x = x_of(j);
    return x >= 1.0 && x <= chi_;
}

double BarrierFrame::cutoff_part(long j) const {
    const double eta = x_of(j) / std::sqrt(1.0 + t_);
    if (eta <= p_.eta1) return 0.0;
    return 2.0 * w0_norm_ * cutoff_Gamma(eta, p_.eta1, p_.eta2).value * std::exp(-p_.a * (eta - p_.eta2));
}

double BarrierFrame::cutoff_rate(long j) const {
    const double s = std::sqrt(1.0 + t_);
    const double eta = x_of(j) / s;
    if (eta <= p_.eta1) return 0.0;
    const auto g = cutoff_Gamma(eta, p_.eta1, p_.eta2);
    const double deta = -d_.c_star / s - eta / (2.0 * (1.0 + t_));
    return 2.0 * w0_norm_ * (g.d1 - p_.a * g.value) * std::exp(-p_.a * (eta - p_.eta2)) * deta;
}

double BarrierFrame::upper(long j) const {
    const double q = in_upper_window(j) ? cosine_term(static_cast<double>(j), t_, p_, d_) : 0.0;
    return xi_upper(t_, p_) * w(j) + q + cutoff_part(j);
}

double BarrierFrame::residual_upper(long j) const {
    auto q = [&](long k) { return in_upper_window(k) ? cosine_term(static_cast<double>(k), t_, p_, d_) : 0.0; };
    auto L = [&](auto&& fn) { return el_ * fn(j - 1) - 2.0 * d_.cosh_lambda * fn(j) + eml_ * fn(j + 1); };
    // xi(t) w is handled exactly: d/dt(xi w) - L(xi w) = xi' w since w solves w' = L w.
    const double dq = in_upper_window(j) ? cosine_rate(static_cast<double>(j), t_, p_, d_) : 0.0;
    return xi_upper_rate(t_, p_) * w(j) + (dq - L(q)) +
           (cutoff_rate(j) - L([&](long k) { return cutoff_part(k); }));
}

double BarrierFrame::w_tilde(long j) const { return in_chi(j) ? w(j) : 0.0; }

double BarrierFrame::lower(long j) const {
    const double q = in_lower_window(j) ? cosine_term(static_cast<double>(j), t_, p_, d_) : 0.0;
    return xi_lower(t_, p_, CM_) * w_tilde(j) - q;
}

double BarrierFrame::residual_lower(long j) const {
    auto q = [&](long k) { return in_lower_window(k) ? cosine_term(static_cast<double>(k), t_, p_, d_) : 0.0; };
    const double Lq = el_ * q(j - 1) - 2.0 * d_.cosh_lambda * q(j) + eml_ * q(j + 1);
    const double dq = in_lower_window(j) ? cosine_rate(static_cast<double>(j), t_, p_, d_) : 0.0;
    // 1_j (L w)_j - (L w~)_j, written without cancelling terms.
    double jump;
    if (in_chi(j))
        jump = el_ * (w(j - 1) - w_tilde(j - 1)) + eml_ * (w(j + 1) - w_tilde(j + 1));
    else
        jump = -(el_ * w_tilde(j - 1) + eml_ * w_tilde(j + 1));
    return xi_lower_rate(t_, p_, CM_) * w_tilde(j) + xi_lower(t_, p_, CM_) * jump - (dq - Lq);
}

namespace {

std::vector<long> region_grid(double ct, double lo, double hi, bool open_lo) {
    long j_lo = static_cast<long>(std::ceil(ct + lo));
    if (open_lo && static_cast<double>(j_lo) - ct <= lo) ++j_lo;
    const long j_hi = static_cast<long>(std::floor(ct + hi));
    std::vector<long> js;
    if (j_hi < j_lo) return js;
    const auto count = static_cast<std::size_t>(j_hi - j_lo + 1);
    if (count <= kRegionGridPoints) {
        for (long j = j_lo; j <= j_hi; ++j) js.push_back(j);
        return js;
    }
    for (std::size_t k = 0; k < kRegionGridPoints; ++k)
        js.push_back(j_lo + std::lround(static_cast<double>(k) * static_cast<double>(count - 1) /
                                        static_cast<double>(kRegionGridPoints - 1)));
    return js;
}

template <class Eval>
RegionReport certify(const std::string& barrier, const std::string& name, double ct, double lo, double hi,
                     bool open_lo, bool want_nonneg, Eval eval) {
    RegionReport r{barrier, name, lo, hi};
    const auto js = region_grid(ct, lo, hi, open_lo);
    r.n_points = js.size();
    r.pass = true;
    if (js.empty()) return r;
    r.min_residual = INFINITY;
    r.max_residual = -INFINITY;
    for (long j : js) {
        const double v = eval(j);
        if (v < r.min_residual) {
            r.min_residual = v;
            if (want_nonneg) r.worst_j = j;
        }
        if (v > r.max_residual) {
            r.max_residual = v;
            if (!want_nonneg) r.worst_j = j;
        }
    }
    r.pass = want_nonneg ? r.min_residual >= 0.0 : r.max_residual <= 0.0;
    return r;
}

}  // namespace

std::vector<RegionReport> certify_upper(const BarrierFrame& f, const Dispersion& d, const BarrierParams& p) {
    const double t = f.t(), ct = d.c_star * t;
    const double sa = std::pow(1.0 + t, p.alpha), sq = std::sqrt(1.0 + t);
    const double b[] = {-std::pow(t, p.delta), 1.0, 0.25 * kPi * sa, 1.5 * kPi * sa, p.eta1 * sq,
                        (p.eta2 + 20.0 / p.a) * sq};
    std::vector<RegionReport> out;
    for (int k = 0; k < 5; ++k)
        out.push_back(certify("upper", "R" + std::to_string(k + 1), ct, b[k], b[k + 1], false, true,
                              [&](long j) { return f.residual_upper(j); }));
    return out;
}

std::vector<RegionReport> certify_lower(const BarrierFrame& f, const Dispersion& d, const BarrierParams& p,
                                        const ReactionSpec& reaction) {
    const double t = f.t(), ct = d.c_star * t;
    const double sa = std::pow(1.0 + t, p.alpha);
    auto total = [&](long j) {
        return f.residual_lower(j) + nonlinear_R(static_cast<double>(j), t, f.lower(j), reaction, d);
    };
    return {
        certify("lower", "R1", ct, 1.5 * kPi * sa, f.chi(), false, false, total),
        certify("lower", "R2", ct, f.chi(), f.chi() + 200.0, true, false, total),
        certify("lower", "R3", ct, std::pow(t, p.delta), std::pow(1.0 + t, p.beta), false, false, total),
        certify("lower", "R4", ct, std::pow(1.0 + t, p.beta), 1.5 * kPi * sa, false, false, total),
    };
}

nlohmann::json BarrierCheckReport::to_json() const {
    nlohmann::json ts = nlohmann::json::array();
    for (const auto& tr : times) {
        nlohmann::json regs = nlohmann::json::array();
        for (const auto& r : tr.regions)
            regs.push_back({{"barrier", r.barrier},
                            {"region", r.region},
                            {"x_lo", r.lo},
                            {"x_hi", r.hi},
                            {"n_points", r.n_points},
                            {"min_residual", r.min_residual},
                            {"max_residual", r.max_residual},
                            {"worst_j", r.worst_j},
                            {"pass", r.pass}});
        ts.push_back({{"t", tr.t},
                      {"chi", tr.chi},
                      {"xi_upper", tr.xi_upper},
                      {"xi_lower", tr.xi_lower},
                      {"residual_scale", tr.scale},
                      {"upper_min_value", tr.upper_min_value},
                      {"regions", regs}});
    }
    return {{"C", C}, {"M", M}, {"CM", CM}, {"CM_measured", CM_measured}, {"times", ts}, {"all_pass", all_pass}};
}

BarrierCheckReport barrier_check(const Dispersion& d, const ReactionSpec& reaction, const BarrierParams& p,
                                 std::span<const double> times, double dt, double cm_t_min) {
    const auto chk = validate_params(p);
    if (!chk.pass) throw DomainError("barrier parameters violate " + chk.first_violation);
    if (times.empty()) throw DomainError("barrier_check: no times");
    if (!(dt > 0.0)) throw DomainError("barrier_check: dt must be positive");
    std::vector<double> ts(times.begin(), times.end());
    std::sort(ts.begin(), ts.end());
    if (!(ts.front() > 0.0)) throw DomainError("barrier_check: times must be positive");
    const double T = ts.back();

    const long J = std::max(1L, w0_radius(p.w0));
    const long hi = static_cast<long>(std::ceil(d.c_star * T + (p.eta2 + 25.0 / p.a) * std::sqrt(1.0 + T))) + 5;
    auto w = LatticeField::filled(-J - 5, hi, 0.0);
    for (long j = p.w0.j_min; j <= p.w0.j_max(); ++j)
        if (w.contains(j)) w[j] = p.w0.at(j);

    BarrierCheckReport rep;
    const bool measure = !(p.CM > 0.0);
    rep.CM_measured = measure;
    const auto cm_stride = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(10.0 / dt)));
    const double t_meas = std::min(cm_t_min, T);
    auto measure_C = [&](const LatticeField& f) {
        const double td = std::pow(f.t, p.delta);
        const double pref = std::exp(-d.lambda_star * td) * (1.0 + f.t) * (1.0 + f.t);
        const auto j0 = static_cast<long>(std::ceil(d.c_star * f.t + td));
        for (long j = std::max(j0, f.j_min); j <= f.j_max(); ++j) rep.C = std::max(rep.C, pref * f.at(j));
    };

    std::vector<LatticeField> snaps;
    Rk4Stepper stepper(MovingFrame{d});
    std::size_t done = 0;
    for (double t : ts) {
        const auto target = static_cast<std::size_t>(std::llround(t / dt));
        while (done < target) {
            stepper.step(w, dt);
            ++done;
            w.t = static_cast<double>(done) * dt;
            if (measure && done % cm_stride == 0 && w.t >= t_meas - 1e-9) measure_C(w);
        }
        if (!std::isfinite(w.sum())) throw BlowupError(done, w.j_min);
        if (measure) measure_C(w);
        snaps.push_back(w);
    }

    rep.M = reaction_M(reaction);
    rep.CM = measure ? rep.C * rep.M : p.CM;
    if (!measure) rep.C = rep.M > 0.0 ? p.CM / rep.M : 0.0;

    for (const auto& s : snaps) {
        BarrierFrame f(p, d, s, rep.CM);
        BarrierTimeReport tr;
        tr.t = s.t;
        tr.chi = f.chi();
        tr.xi_upper = xi_upper(s.t, p);
        tr.xi_lower = xi_lower(s.t, p, rep.CM);
        tr.scale = std::pow(1.0 + s.t, -(1.5 - p.beta + 2.0 * p.alpha));
        tr.regions = certify_upper(f, d, p);
        const auto lower = certify_lower(f, d, p, reaction);
        tr.regions.insert(tr.regions.end(), lower.begin(), lower.end());

        const double ct = d.c_star * s.t;
        tr.upper_min_value = INFINITY;
        const auto j_lo = static_cast<long>(std::ceil(ct - std::pow(s.t, p.delta)));
        const auto j_hi = static_cast<long>(std::floor(ct + (p.eta2 + 20.0 / p.a) * std::sqrt(1.0 + s.t)));
        for (long j = j_lo; j <= j_hi; ++j) tr.upper_min_value = std::min(tr.upper_min_value, f.upper(j));

        for (const auto& r : tr.regions) rep.all_pass = rep.all_pass && r.pass;
        rep.times.push_back(std::move(tr));
    }
    return rep;
}

}  // namespace latkpp
