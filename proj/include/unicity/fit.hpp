// Copyright 2026 The Unicity Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "unicity/core.hpp"

// Least-squares fits of unicity-vs-population curves to the four
// candidate forms, used for extrapolating beyond the observed sizes:
//
//   power law       a * x^gamma + b
//   stretched exp   a * exp(x^gamma) + b
//   exponential     a * exp(gamma * x) + b
//   linear          a * x + b
//
// a and b enter linearly in every form, so each Levenberg-Marquardt start
// profiles them out in closed form given gamma; a small deterministic grid
// of gamma initializations makes the fit reproducible.

namespace unicity {

enum class FitForm { kPowerLaw, kStretchedExp, kExponential, kLinear };

inline const char* fit_form_name(FitForm f) {
    switch (f) {
        case FitForm::kPowerLaw: return "power_law";
        case FitForm::kStretchedExp: return "stretched_exp";
        case FitForm::kExponential: return "exponential";
        case FitForm::kLinear: return "linear";
    }
    return "?";
}

inline FitForm parse_fit_form(const std::string& name) {
    if (name == "power_law") return FitForm::kPowerLaw;
    if (name == "stretched_exp") return FitForm::kStretchedExp;
    if (name == "exponential") return FitForm::kExponential;
    if (name == "linear") return FitForm::kLinear;
    throw UsageError("unknown fit form '" + name +
                     "' (expected power_law|stretched_exp|exponential|linear)");
}

/// x is measured in millions of users throughout; the unit is carried in
/// the result because parameter magnitudes are meaningless without it.
struct FitResult {
    FitForm form = FitForm::kLinear;
    double a = 0.0;
    double b = 0.0;
    double gamma = 0.0;  // unused for linear
    double pseudo_r2 = 0.0;
    double sse = 0.0;
    std::uint32_t iterations = 0;
    bool converged = false;
    bool degenerate_variance = false;  // SS_tot was 0 and SS_res was not
    std::string x_unit = "millions_of_users";

    double evaluate(double x) const {
        switch (form) {
            case FitForm::kPowerLaw: return a * std::pow(x, gamma) + b;
            case FitForm::kStretchedExp: return a * std::exp(std::pow(x, gamma)) + b;
            case FitForm::kExponential: return a * std::exp(gamma * x) + b;
            case FitForm::kLinear: return a * x + b;
        }
        return 0.0;
    }
};

/// Non-convergence, carrying the best parameters reached and their
/// residual.
class FitError : public NumericalError {
  public:
    FitError(const std::string& what, FitResult best)
        : NumericalError(what), best_so_far(std::move(best)) {}
    FitResult best_so_far;
};

struct FitOptions {
    // iterations are O(#points); the gamma->0 ridge of the power forms can
    // take thousands of cheap steps on nearly-logarithmic data
    std::uint32_t max_iterations = 20000;
    bool inverse_variance_weights = false;  // weight points by 1/std^2
    std::vector<double> stddevs;            // required when weighted
};

namespace detail {

struct Basis {
    double value = 0.0;  // f(x; gamma)
    double dgamma = 0.0; // df/dgamma
};

inline Basis eval_basis(FitForm form, double x, double gamma) {
    switch (form) {
        case FitForm::kPowerLaw: {
            const double xg = std::pow(x, gamma);
            return {xg, xg * std::log(x)};
        }
        case FitForm::kStretchedExp: {
            const double xg = std::pow(x, gamma);
            const double e = std::exp(xg);
            return {e, e * xg * std::log(x)};
        }
        case FitForm::kExponential: {
            const double e = std::exp(gamma * x);
            return {e, x * e};
        }
        case FitForm::kLinear:
            return {x, 0.0};
    }
    return {};
}

/// Closed-form (a, b) for fixed gamma: weighted linear LS on [f, 1].
inline bool solve_ab(std::span<const double> f, std::span<const double> y,
                     std::span<const double> w, double& a, double& b) {
    double sw = 0, sf = 0, sy = 0, sff = 0, sfy = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        sw += w[i];
        sf += w[i] * f[i];
        sy += w[i] * y[i];
        sff += w[i] * f[i] * f[i];
        sfy += w[i] * f[i] * y[i];
    }
    const double det = sw * sff - sf * sf;
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
    a = (sw * sfy - sf * sy) / det;
    b = (sff * sy - sf * sfy) / det;
    return std::isfinite(a) && std::isfinite(b);
}

inline double weighted_sse(FitForm form, std::span<const double> x, std::span<const double> y,
                           std::span<const double> w, double a, double b, double gamma) {
    double sse = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = a * eval_basis(form, x[i], gamma).value + b - y[i];
        sse += w[i] * r * r;
    }
    return sse;
}

/// Solve the 3x3 system (JtJ + lambda*diag(JtJ)) step = -Jtr by Cramer.
inline bool lm_step(const double jtj[3][3], const double jtr[3], double lambda, double step[3]) {
    double m[3][3];
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m[i][j] = jtj[i][j];
    for (int i = 0; i < 3; ++i) m[i][i] += lambda * std::max(jtj[i][i], 1e-12);
    const double det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    if (!std::isfinite(det) || std::abs(det) < 1e-300) return false;
    const double rhs[3] = {-jtr[0], -jtr[1], -jtr[2]};
    const auto solve_col = [&](int col) {
        double t[3][3];
        for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) t[i][j] = j == col ? rhs[i] : m[i][j];
        return (t[0][0] * (t[1][1] * t[2][2] - t[1][2] * t[2][1]) -
                t[0][1] * (t[1][0] * t[2][2] - t[1][2] * t[2][0]) +
                t[0][2] * (t[1][0] * t[2][1] - t[1][1] * t[2][0])) /
               det;
    };
    for (int col = 0; col < 3; ++col) step[col] = solve_col(col);
    return std::isfinite(step[0]) && std::isfinite(step[1]) && std::isfinite(step[2]);
}

}  // namespace detail

/// Least-squares fit of y(x) to the given form. Throws FitError when no
/// start converges within options.max_iterations; the error carries the
/// best parameters found.
inline FitResult fit_curve(std::span<const double> x, std::span<const double> y, FitForm form,
                           const FitOptions& options = {}) {
    if (x.size() != y.size()) throw UsageError("fit: x and y length mismatch");
    std::vector<double> xs(x.begin(), x.end());
    std::sort(xs.begin(), xs.end());
    const std::size_t distinct = static_cast<std::size_t>(
        std::unique(xs.begin(), xs.end()) - xs.begin());
    const std::size_t needed = form == FitForm::kLinear ? 3 : 4;
    if (distinct < needed)
        throw UsageError(std::string("fit: ") + fit_form_name(form) + " needs at least " +
                         std::to_string(needed) + " distinct x values, got " +
                         std::to_string(distinct));
    if (form == FitForm::kPowerLaw || form == FitForm::kStretchedExp)
        for (const double v : x)
            if (!(v > 0.0)) throw DataError("fit: power-law forms require x > 0");

    std::vector<double> w(x.size(), 1.0);
    if (options.inverse_variance_weights) {
        if (options.stddevs.size() != x.size())
            throw UsageError("fit: weighted fit needs one std per point");
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double s = std::max(options.stddevs[i], 1e-9);
            w[i] = 1.0 / (s * s);
        }
    }

    FitResult result;
    result.form = form;

    double mean_y = 0.0, sw = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        mean_y += w[i] * y[i];
        sw += w[i];
    }
    mean_y /= sw;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i)
        ss_tot += w[i] * (y[i] - mean_y) * (y[i] - mean_y);

    const auto finish = [&](FitResult r) {
        if (ss_tot > 0.0) {
            r.pseudo_r2 = 1.0 - r.sse / ss_tot;
        } else if (r.sse <= 1e-18) {
            r.pseudo_r2 = 1.0;
        } else {
            r.pseudo_r2 = -std::numeric_limits<double>::infinity();
            r.degenerate_variance = true;
        }
        return r;
    };

    if (form == FitForm::kLinear) {
        std::vector<double> f(x.begin(), x.end());
        double a = 0, b = 0;
        if (!detail::solve_ab(f, y, w, a, b)) throw NumericalError("fit: singular linear system");
        result.a = a;
        result.b = b;
        result.converged = true;
        result.sse = detail::weighted_sse(form, x, y, w, a, b, 0.0);
        return finish(result);
    }

    std::vector<double> grid{0.25, 0.5, 1.0, 2.0};
    if (form == FitForm::kExponential) grid = {-2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0};

    FitResult best;           // best among converged starts
    FitResult best_any;       // best regardless of convergence
    best.form = best_any.form = form;
    best.sse = best_any.sse = std::numeric_limits<double>::infinity();
    std::vector<double> f(x.size());

    for (const double gamma0 : grid) {
        double gamma = gamma0, a = 0, b = 0;
        for (std::size_t i = 0; i < x.size(); ++i)
            f[i] = detail::eval_basis(form, x[i], gamma).value;
        if (!detail::solve_ab(f, y, w, a, b)) continue;
        double sse = detail::weighted_sse(form, x, y, w, a, b, gamma);
        double lambda = 1e-3;
        bool converged = false;
        std::uint32_t iter = 0;

        for (; iter < options.max_iterations; ++iter) {
            // build normal equations for parameters (a, b, gamma)
            double jtj[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
            double jtr[3] = {0, 0, 0};
            for (std::size_t i = 0; i < x.size(); ++i) {
                const auto basis = detail::eval_basis(form, x[i], gamma);
                const double r = a * basis.value + b - y[i];
                const double j[3] = {basis.value, 1.0, a * basis.dgamma};
                for (int p = 0; p < 3; ++p) {
                    jtr[p] += w[i] * j[p] * r;
                    for (int q = p; q < 3; ++q) jtj[p][q] += w[i] * j[p] * j[q];
                }
            }
            jtj[1][0] = jtj[0][1];
            jtj[2][0] = jtj[0][2];
            jtj[2][1] = jtj[1][2];

            const double grad_norm = std::sqrt(jtr[0] * jtr[0] + jtr[1] * jtr[1] +
                                               jtr[2] * jtr[2]);
            if (grad_norm < 1e-12 * (1.0 + sse)) {
                converged = true;
                break;
            }

            bool stepped = false;
            for (int attempt = 0; attempt < 40; ++attempt) {
                double step[3];
                if (!detail::lm_step(jtj, jtr, lambda, step)) {
                    lambda *= 10;
                    continue;
                }
                const double na = a + step[0], nb = b + step[1], ng = gamma + step[2];
                const double nsse = detail::weighted_sse(form, x, y, w, na, nb, ng);
                if (std::isfinite(nsse) && nsse <= sse) {
                    const double improvement = sse - nsse;
                    const double step_norm = std::sqrt(step[0] * step[0] + step[1] * step[1] +
                                                       step[2] * step[2]);
                    a = na;
                    b = nb;
                    gamma = ng;
                    sse = nsse;
                    lambda = std::max(lambda * 0.3, 1e-12);
                    stepped = true;
                    if (step_norm < 1e-11 * (1.0 + std::abs(a) + std::abs(b) + std::abs(gamma)) ||
                        improvement < 1e-13 * (1.0 + sse))
                        converged = true;
                    break;
                }
                lambda *= 10;
            }
            if (!stepped || converged) {
                converged = converged || !stepped;  // stalled = local optimum reached
                break;
            }
        }

        if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(gamma)) continue;
        if (sse < best_any.sse) {
            best_any.a = a;
            best_any.b = b;
            best_any.gamma = gamma;
            best_any.sse = sse;
            best_any.iterations = iter;
            best_any.converged = converged;
        }
        if (converged && sse < best.sse) {
            best.a = a;
            best.b = b;
            best.gamma = gamma;
            best.sse = sse;
            best.iterations = iter;
            best.converged = true;
        }
    }

    if (!std::isfinite(best_any.sse))
        throw NumericalError("fit: all initializations failed");
    if (!best.converged) {
        throw FitError("fit: no convergence within " + std::to_string(options.max_iterations) +
                           " iterations (best residual " + std::to_string(best_any.sse) + ")",
                       finish(best_any));
    }
    return finish(best);
}

struct Extrapolation {
    double x = 0.0;
    double value = 0.0;   // clamped to [0, 1]
    double raw = 0.0;     // unclamped model value
    bool clamped = false;
};

/// Evaluate the fitted form at x; unicity is a fraction, so out-of-range
/// values are clamped and flagged.
inline Extrapolation extrapolate(const FitResult& fit, double x) {
    Extrapolation e;
    e.x = x;
    e.raw = fit.evaluate(x);
    e.value = std::clamp(e.raw, 0.0, 1.0);
    e.clamped = e.value != e.raw;
    return e;
}

}  // namespace unicity
