#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "optstop/errors.hpp"

namespace optstop {

/// Scaling laws of the optimal total cost with problem size: exponential in
/// sqrt(N) or N below the second-energy line, polynomial above it.
enum class ScalingModel { exp_sqrt, quadratic, exp_linear, quadratic_2d };

std::string to_string(ScalingModel m);
ScalingModel scaling_model_from_string(const std::string& s);

struct ScalingFit {
    ScalingModel model = ScalingModel::exp_sqrt;
    /// exp models: {alpha, beta}; quadratic: {gamma, delta, omega};
    /// quadratic_2d: {gamma, omega}.
    std::vector<double> params;
    /// L2 norm of the residuals in the original value space.
    double residual_norm = 0.0;
};

/// Least-squares fit of (size, value) points. Exponential models are fit
/// linearly in log space and require positive values.
ScalingFit fit_scaling(std::span<const std::pair<double, double>> points, ScalingModel model);

double scaling_predict(const ScalingFit& fit, double size);

/// Size at which the exponential branch reaches the gap to the second-lowest
/// energy: log^2(gap/alpha)/beta^2 for exp-sqrt, log(gap/alpha)/beta for
/// exp-linear.
double giveup_size(const ScalingFit& fit, double e1_gap);

}  // namespace optstop
