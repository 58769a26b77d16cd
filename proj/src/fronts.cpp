#include "latkpp/fronts.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "latkpp/error.hpp"
#include "latkpp/green.hpp"

namespace latkpp {

LevelCrossing level_set(const LatticeField& field, double m) {
    if (field.values.empty()) throw NotFoundError("level_set: empty field");
    const auto& v = field.values;
    LevelCrossing c;
    for (std::size_t i = 1; i < v.size() && c.monotone; ++i)
        if (v[i] > v[i - 1]) c.monotone = false;

    std::size_t i = v.size();
    while (i > 0 && v[i - 1] < m) --i;
    if (i == 0) throw NotFoundError("level_set: no entry reaches the level");
    const std::size_t k = i - 1;
    const double hi = v[k];
    const double lo = k + 1 < v.size() ? v[k + 1] : field.right_clamp;
    if (lo >= m) throw NotFoundError("level_set: level not bracketed inside the window");
    c.j_m = field.j_min + static_cast<long>(k);
    c.x_m = static_cast<double>(c.j_m) + (hi - m) / (hi - lo);
    return c;
}

LatticeField simulate_step(const ReactionSpec& reaction, long L, double dt, double T,
                           std::span<const Observer> observers) {
    if (!(dt > 0.0) || !(T >= 0.0)) throw DomainError("simulate_step: need dt > 0 and T >= 0");
    const Dispersion d = solve_dispersion(reaction.fprime0());
    if (static_cast<double>(L) < d.c_star * T + 10.0 * std::sqrt(T))
        throw DomainError("simulate_step: L must be at least c* T + 10 sqrt(T)");

    auto leak = [](const LatticeField& f) {
        if (std::abs(f.values.back() - f.right_clamp) > kContaminationThreshold)
            throw ContaminationError(f.t, std::abs(f.values.back()));
    };
    std::vector<Observer> all(observers.begin(), observers.end());
    all.push_back({1, [&](std::size_t, const LatticeField& f) { leak(f); }});
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    return integrate(LatticeField::step(-L, L), NonlinearKpp{reaction}, dt, n, all);
}

std::vector<LevelSetTrace> trace_levels(const ReactionSpec& reaction, long L, double dt, double T,
                                        std::span<const double> levels, std::size_t sample_stride) {
    std::vector<LevelSetTrace> traces;
    for (double m : levels) {
        if (!(m > 0.0 && m < 1.0)) throw DomainError("trace_levels: levels must lie in (0, 1)");
        traces.push_back({m, {}});
    }
    const Observer obs{sample_stride, [&](std::size_t, const LatticeField& f) {
                           for (auto& tr : traces) {
                               const auto c = level_set(f, tr.m);
                               tr.samples.push_back({f.t, c.j_m, c.x_m});
                           }
                       }};
    simulate_step(reaction, L, dt, T, std::span(&obs, 1));
    return traces;
}

BramsonFit bramson_fit(const LevelSetTrace& trace, const Dispersion& d, double t_min, double t_max) {
    std::vector<double> x, y;
    for (const auto& s : trace.samples) {
        if (s.t < t_min || s.t > t_max || !(s.t > 0.0)) continue;
        x.push_back(std::log(s.t));
        y.push_back(d.c_star * s.t - s.x_m);
    }
    if (x.size() < 20) throw InsufficientDataError("bramson_fit: fewer than 20 samples in the window");
    const auto f = least_squares(x, y);
    return {trace.m, f.slope, f.intercept, f.r2, f.slope_stderr, f.n, d.bramson_coeff};
}

double delay_oscillation(const LevelSetTrace& trace, const Dispersion& d, double t_lo, double t_hi) {
    double lo = INFINITY, hi = -INFINITY;
    for (const auto& s : trace.samples) {
        if (s.t < t_lo || s.t > t_hi) continue;
        const double r = s.x_m - d.c_star * s.t + d.bramson_coeff * std::log(s.t);
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (lo > hi) throw InsufficientDataError("delay_oscillation: no samples in the window");
    return hi - lo;
}

SpreadingReport spreading_check(const LatticeField& field, const Dispersion& d, double c_below, double c_above) {
    if (!(c_below < d.c_star && d.c_star < c_above))
        throw DomainError("spreading_check: need c_below < c* < c_above");
    SpreadingReport r;
    r.t = field.t;
    bool seen_behind = false;
    for (long j = field.j_min; j <= field.j_max(); ++j) {
        const double u = field.at(j);
        const double jd = static_cast<double>(j);
        if (j >= 0 && jd <= c_below * field.t) {
            r.min_behind = seen_behind ? std::min(r.min_behind, u) : u;
            seen_behind = true;
        }
        if (jd > c_above * field.t) r.max_ahead = std::max(r.max_ahead, u);
    }
    if (!seen_behind) throw DomainError("spreading_check: j = 0 lies outside the window");
    return r;
}

FrontProfile extract_profile(const LatticeField& field, double m, long half_width) {
    if (half_width < 0) throw DomainError("extract_profile: negative half width");
    const double anchor = level_set(field, m).x_m;
    if (anchor - static_cast<double>(half_width) < static_cast<double>(field.j_min) ||
        anchor + static_cast<double>(half_width) + 1.0 > static_cast<double>(field.j_max()))
        throw DomainError("extract_profile: profile window exceeds the field");
    FrontProfile p;
    p.t = field.t;
    p.anchor = anchor;
    for (long k = -half_width; k <= half_width; ++k) {
        const double pos = anchor + static_cast<double>(k);
        const long i = static_cast<long>(std::floor(pos));
        const double frac = pos - static_cast<double>(i);
        p.offsets.push_back(k);
        p.values.push_back(field.at(i) + frac * (field.at(i + 1) - field.at(i)));
    }
    return p;
}

double collapse_distance(const FrontProfile& p1, const FrontProfile& p2) {
    double dist = 0.0;
    bool any = false;
    for (std::size_t a = 0; a < p1.offsets.size(); ++a) {
        const auto it = std::find(p2.offsets.begin(), p2.offsets.end(), p1.offsets[a]);
        if (it == p2.offsets.end()) continue;
        any = true;
        dist = std::max(dist, std::abs(p1.values[a] - p2.values[static_cast<std::size_t>(it - p2.offsets.begin())]));
    }
    if (!any) throw DomainError("collapse_distance: profiles share no offsets");
    return dist;
}

namespace {

long support_radius(const LatticeField& w0) {
    long J = 0;
    for (long j = w0.j_min; j <= w0.j_max(); ++j)
        if (w0.at(j) != 0.0) J = std::max(J, std::abs(j));
    return J;
}

double sup_norm(const LatticeField& f) {
    double s = 0.0;
    for (double v : f.values) s = std::max(s, std::abs(v));
    return s;
}

LatticeField embed(const LatticeField& w0, long j_min, long j_max) {
    auto f = LatticeField::filled(j_min, j_max, 0.0);
    for (long j = w0.j_min; j <= w0.j_max(); ++j)
        if (f.contains(j)) f[j] = w0.at(j);
    return f;
}

}  // namespace

void check_odd_data(const LatticeField& w0) {
    if (w0.left_clamp != 0.0 || w0.right_clamp != 0.0) throw DomainError("odd data must have zero clamps");
    const double scale = sup_norm(w0);
    if (scale == 0.0) throw DomainError("odd data must be nontrivial");
    const long J = support_radius(w0);
    for (long j = 0; j <= J; ++j) {
        if (std::abs(w0.at(j) + w0.at(-j)) > 1e-14 * scale) throw DomainError("initial data is not odd");
        if (w0.at(j) < 0.0) throw DomainError("odd data must be nonnegative for j >= 0");
    }
}

OddAsymptoticsReport odd_data_asymptotics(const LatticeField& w0, const Dispersion& d, double t_check, double dt) {
    check_odd_data(w0);
    if (t_check < 100.0) throw DomainError("odd_data_asymptotics: t_check must be at least 100");
    const long J = support_radius(w0);
    const long hi = static_cast<long>(std::ceil(d.c_star * t_check + 12.0 * d.spread(t_check))) + J + 10;
    auto field = embed(w0, -J - 50, hi);
    const auto n = static_cast<std::size_t>(std::llround(t_check / dt));
    field = integrate(std::move(field), MovingFrame{d}, dt, n);

    OddAsymptoticsReport r;
    r.t = field.t;
    for (long l = 1; l <= J; ++l) r.moment += static_cast<double>(l) * w0.at(l);
    r.predicted = r.moment / (std::pow(d.cosh_lambda, 1.5) * std::sqrt(4.0 * std::numbers::pi));
    r.min_ratio = INFINITY;
    r.max_ratio = -INFINITY;
    const double ct = d.c_star * r.t;
    for (long j = field.j_min; j <= field.j_max(); ++j) {
        const double x = static_cast<double>(j) - ct;
        if (x < 1.0 || x > std::sqrt(r.t)) continue;
        const double w = field.at(j);
        OddRatioPoint p{j, x, w, w * std::pow(r.t, 1.5) / x};
        r.all_positive = r.all_positive && w > 0.0;
        r.min_ratio = std::min(r.min_ratio, p.ratio);
        r.max_ratio = std::max(r.max_ratio, p.ratio);
        r.max_rel_dev = std::max(r.max_rel_dev, std::abs(p.ratio / r.predicted - 1.0));
        r.points.push_back(p);
    }
    return r;
}

double eta_envelope(double A, const Dispersion& d) { return 4.0 * d.cosh_lambda * A; }

DecayReport superdiffusive_decay_check(const LatticeField& w0, double A, const Dispersion& d,
                                       std::span<const double> times, double dt) {
    check_odd_data(w0);
    if (!(A > 1.0)) throw DomainError("superdiffusive_decay_check: A must exceed 1");
    if (times.empty()) throw DomainError("superdiffusive_decay_check: no times");
    std::vector<double> ts(times.begin(), times.end());
    std::sort(ts.begin(), ts.end());
    if (!(ts.front() > 0.0)) throw DomainError("superdiffusive_decay_check: times must be positive");

    DecayReport r;
    r.A = A;
    r.eta_A = eta_envelope(A, d);
    const long J = support_radius(w0);
    const double norm = sup_norm(w0);
    const double T = ts.back();
    const long hi =
        static_cast<long>(std::ceil(d.c_star * T + static_cast<double>(J) + (r.eta_A + 40.0 / A) * std::sqrt(T + 1.0)));
    auto field = embed(w0, -J - 50, hi);

    std::size_t done = 0;
    Rk4Stepper stepper(MovingFrame{d});
    for (double t : ts) {
        const auto target = static_cast<std::size_t>(std::llround(t / dt));
        for (; done < target; ++done) stepper.step(field, dt);
        field.t = static_cast<double>(target) * dt;
        const double s = std::sqrt(field.t + 1.0);
        for (long j = field.j_min; j <= field.j_max(); ++j) {
            const double eta = (static_cast<double>(j - J) - d.c_star * field.t) / s;
            if (eta < r.eta_A) continue;
            const double bound = norm * std::exp(-A * (eta - r.eta_A));
            const double ratio = std::abs(field.at(j)) / bound;
            ++r.checked;
            r.worst_ratio = std::max(r.worst_ratio, ratio);
            if (ratio > 1.0) ++r.violations;
        }
    }
    return r;
}

}  // namespace latkpp
