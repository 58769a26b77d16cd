#include "latkpp/reaction.hpp"

#include <cmath>
#include <sstream>

#include "latkpp/error.hpp"

namespace latkpp {

namespace {
constexpr double kFdStep = 1e-6;
}

ReactionSpec::ReactionSpec(std::string label, std::function<double(double)> core, double fprime0,
                           std::optional<double> fprime1)
    : label_(std::move(label)), core_(std::move(core)), fprime0_(fprime0), params_(nlohmann::json::object()) {
    if (!core_) throw DomainError("ReactionSpec: empty core function");
    if (!(fprime0_ > 0.0) || !std::isfinite(fprime0_)) throw DomainError("ReactionSpec: fprime0 must be positive");
    fprime1_ = fprime1 ? *fprime1 : (core_(1.0 + kFdStep) - core_(1.0 - kFdStep)) / (2.0 * kFdStep);
}

double ReactionSpec::operator()(double u) const {
    if (u < 0.0) return fprime0_ * u;
    if (u > 1.0) return fprime1_ * (u - 1.0);
    return core_(u);
}

ReactionSpec& ReactionSpec::with_params(nlohmann::json p) {
    params_ = std::move(p);
    return *this;
}

ReactionSpec make_logistic(double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw DomainError("make_logistic: r must be positive");
    ReactionSpec spec("logistic", [r](double u) { return r * u * (1.0 - u); }, r, -r);
    spec.with_params({{"reaction", "logistic"}, {"r", r}});
    return spec;
}

ReactionSpec make_reaction(const nlohmann::json& config) {
    const std::string name = config.value("reaction", std::string("logistic"));
    if (name == "logistic") {
        const auto& r = config.contains("r") ? config.at("r") : nlohmann::json(1.0);
        if (!r.is_number()) throw DomainError("reaction: 'r' must be a number");
        return make_logistic(r.get<double>());
    }
    throw DomainError("unknown reaction '" + name + "'");
}

KppReport validate_kpp(const ReactionSpec& spec, int n_samples) {
    if (n_samples < 10) throw DomainError("validate_kpp: need at least 10 samples");
    KppReport rep;
    auto fail = [&rep](const std::string& msg) {
        if (rep.pass) {
            rep.pass = false;
            rep.first_violation = msg;
        }
    };

    if (spec(0.0) != 0.0) fail("f(0) != 0");
    if (std::abs(spec(1.0)) > 1e-14) fail("f(1) != 0");

    const double fp0 = spec.fprime0();
    for (int k = 1; k <= n_samples; ++k) {
        const double u = static_cast<double>(k) / (n_samples + 1);
        const double f = spec(u);
        if (!(f > 0.0) || f > fp0 * u * (1.0 + 1e-12)) {
            std::ostringstream os;
            os.precision(6);
            os << "f(" << u << ") = " << f << " outside (0, " << fp0 * u << "]";
            fail(os.str());
            break;
        }
    }

    // One-sided so that the declared left extension does not leak into the estimate.
    rep.fprime0_estimate = (spec.core(kFdStep) - spec.core(0.0)) / kFdStep;
    rep.fprime0_error = std::abs(rep.fprime0_estimate - fp0);
    if (rep.fprime0_error > 1e-4) fail("finite-difference f'(0) disagrees with declared value");
    return rep;
}

}  // namespace latkpp
