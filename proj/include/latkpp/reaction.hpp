#pragma once

#include <functional>
#include <optional>
#include <string>

#include <json.hpp>

namespace latkpp {

/// KPP nonlinearity. `core` is only consulted on [0, 1]; outside that
/// interval f is continued linearly with slope f'(0) on the left and f'(1)
/// on the right.
class ReactionSpec {
public:
    ReactionSpec(std::string label, std::function<double(double)> core, double fprime0,
                 std::optional<double> fprime1 = std::nullopt);

    double operator()(double u) const;
    double eval(double u) const { return (*this)(u); }
    double core(double u) const { return core_(u); }

    double fprime0() const noexcept { return fprime0_; }
    double fprime1() const noexcept { return fprime1_; }
    const std::string& label() const noexcept { return label_; }
    const nlohmann::json& params() const noexcept { return params_; }
    ReactionSpec& with_params(nlohmann::json p);

private:
    std::string label_;
    std::function<double(double)> core_;
    double fprime0_;
    double fprime1_;
    nlohmann::json params_;
};

/// r u (1 - u)
ReactionSpec make_logistic(double r);

/// Build from config, e.g. {"reaction": "logistic", "r": 1.0}.
ReactionSpec make_reaction(const nlohmann::json& config);

struct KppReport {
    bool pass = true;
    std::string first_violation;  // empty on pass
    double fprime0_estimate = 0.0;
    double fprime0_error = 0.0;
};

/// Samples (0,1) on n_samples interior grid points and checks
/// 0 < f(u) <= f'(0) u, f(0) = f(1) = 0 and the declared f'(0).
KppReport validate_kpp(const ReactionSpec& spec, int n_samples);

}  // namespace latkpp
