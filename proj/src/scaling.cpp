#include "optstop/scaling.hpp"

#include <array>
#include <cmath>

namespace optstop {

namespace {

/// Least-squares solve of (X^T X) params = X^T y for a small design matrix,
/// by Gaussian elimination with partial pivoting in long double.
template <std::size_t P>
std::array<double, P> normal_equations(std::span<const std::array<double, P>> rows,
                                       std::span<const double> y) {
    long double a[P][P + 1] = {};
    for (std::size_t r = 0; r < rows.size(); ++r) {
        for (std::size_t i = 0; i < P; ++i) {
            for (std::size_t j = 0; j < P; ++j) a[i][j] += (long double)rows[r][i] * rows[r][j];
            a[i][P] += (long double)rows[r][i] * y[r];
        }
    }
    for (std::size_t col = 0; col < P; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < P; ++r)
            if (std::abs((double)a[r][col]) > std::abs((double)a[pivot][col])) pivot = r;
        std::swap(a[col], a[pivot]);
        if (a[col][col] == 0.0L) throw InsufficientPoints("fit_scaling: singular design matrix");
        for (std::size_t r = 0; r < P; ++r) {
            if (r == col) continue;
            const long double f = a[r][col] / a[col][col];
            for (std::size_t j = col; j <= P; ++j) a[r][j] -= f * a[col][j];
        }
    }
    std::array<double, P> out{};
    for (std::size_t i = 0; i < P; ++i) out[i] = (double)(a[i][P] / a[i][i]);
    return out;
}

double residual_norm(std::span<const std::pair<double, double>> points, const ScalingFit& fit) {
    double acc = 0.0;
    for (const auto& [n, y] : points) {
        const double r = y - scaling_predict(fit, n);
        acc += r * r;
    }
    return std::sqrt(acc);
}

}  // namespace

std::string to_string(ScalingModel m) {
    switch (m) {
        case ScalingModel::exp_sqrt: return "exp-sqrt";
        case ScalingModel::quadratic: return "quadratic";
        case ScalingModel::exp_linear: return "exp-linear";
        case ScalingModel::quadratic_2d: return "quadratic-2d";
    }
    return "?";
}

ScalingModel scaling_model_from_string(const std::string& s) {
    if (s == "exp-sqrt") return ScalingModel::exp_sqrt;
    if (s == "quadratic") return ScalingModel::quadratic;
    if (s == "exp-linear") return ScalingModel::exp_linear;
    if (s == "quadratic-2d") return ScalingModel::quadratic_2d;
    throw ConfigError("unknown scaling model: " + s);
}

ScalingFit fit_scaling(std::span<const std::pair<double, double>> points, ScalingModel model) {
    const bool exponential = model == ScalingModel::exp_sqrt || model == ScalingModel::exp_linear;
    const std::size_t min_points = model == ScalingModel::quadratic ? 4 : 3;
    if (points.size() < min_points)
        throw InsufficientPoints("fit_scaling: too few points for this model");

    ScalingFit fit;
    fit.model = model;
    if (exponential) {
        std::vector<std::array<double, 2>> rows;
        std::vector<double> ys;
        for (const auto& [n, y] : points) {
            if (!(y > 0.0))
                throw NonPositiveValue("fit_scaling: exponential models need positive values");
            const double x = model == ScalingModel::exp_sqrt ? std::sqrt(n) : n;
            rows.push_back({1.0, x});
            ys.push_back(std::log(y));
        }
        const auto p = normal_equations<2>(rows, ys);
        fit.params = {std::exp(p[0]), p[1]};  // alpha, beta
    } else if (model == ScalingModel::quadratic) {
        std::vector<std::array<double, 3>> rows;
        std::vector<double> ys;
        for (const auto& [n, y] : points) {
            rows.push_back({n * n, n, 1.0});
            ys.push_back(y);
        }
        const auto p = normal_equations<3>(rows, ys);
        fit.params = {p[0], p[1], p[2]};  // gamma, delta, omega
    } else {
        std::vector<std::array<double, 2>> rows;
        std::vector<double> ys;
        for (const auto& [n, y] : points) {
            rows.push_back({n * n, 1.0});
            ys.push_back(y);
        }
        const auto p = normal_equations<2>(rows, ys);
        fit.params = {p[0], p[1]};  // gamma, omega
    }
    fit.residual_norm = residual_norm(points, fit);
    return fit;
}

double scaling_predict(const ScalingFit& fit, double size) {
    switch (fit.model) {
        case ScalingModel::exp_sqrt:
            return fit.params[0] * std::exp(fit.params[1] * std::sqrt(size));
        case ScalingModel::exp_linear:
            return fit.params[0] * std::exp(fit.params[1] * size);
        case ScalingModel::quadratic:
            return fit.params[0] * size * size + fit.params[1] * size + fit.params[2];
        case ScalingModel::quadratic_2d:
            return fit.params[0] * size * size + fit.params[1];
    }
    return 0.0;
}

double giveup_size(const ScalingFit& fit, double e1_gap) {
    if (fit.model != ScalingModel::exp_sqrt && fit.model != ScalingModel::exp_linear)
        throw DomainError("giveup_size: defined for the exponential models only");
    const double alpha = fit.params[0];
    const double beta = fit.params[1];
    if (!(alpha > 0.0) || !(beta > 0.0))
        throw DomainError("giveup_size: needs positive alpha and beta");
    if (!(e1_gap > alpha)) throw DomainError("giveup_size: gap must exceed alpha");
    const double l = std::log(e1_gap / alpha);
    return fit.model == ScalingModel::exp_sqrt ? l * l / (beta * beta) : l / beta;
}

}  // namespace optstop
