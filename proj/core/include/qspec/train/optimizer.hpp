#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

namespace qspec::train {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;

    bool operator==(const AdamConfig &) const = default;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::int64_t step = 0;

    [[nodiscard]] static AdamState zeros(std::size_t n) { return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0), 0}; }
};

/// One bias-corrected Adam update in place. Throws NumericError for a
/// non-finite gradient (parameters and state are left untouched).
void adam_step(std::span<double> parameters, std::span<const double> gradient, AdamState &state,
               const AdamConfig &config);

/// f(x) with its gradient written to g (resized by the callee if needed).
using Objective = std::function<double(std::span<const double> x, std::vector<double> &g)>;

struct LbfgsConfig {
    int history = 10;
    double c1 = 1e-4; ///< sufficient decrease
    double c2 = 0.9;  ///< curvature
    int max_line_search = 25;

    bool operator==(const LbfgsConfig &) const = default;
};

/**
 * @brief Limited-memory BFGS with a strong-Wolfe line search.
 *
 * history = 0 gives steepest descent with the same line search. When the
 * line search fails the history is cleared and a steepest-descent step is
 * taken instead; line_search_failures counts these.
 */
class Lbfgs {
  public:
    Lbfgs(LbfgsConfig config, Objective objective);

    /// Advances x by one iteration and returns f(x) after the step.
    double step(std::vector<double> &x);

    [[nodiscard]] double value() const noexcept { return f_; }
    [[nodiscard]] const std::vector<double> &gradient() const noexcept { return g_; }
    [[nodiscard]] int line_search_failures() const noexcept { return failures_; }

  private:
    LbfgsConfig config_;
    Objective objective_;
    std::vector<std::vector<double>> s_, y_;
    std::vector<double> rho_;
    std::vector<double> g_;
    double f_ = 0.0;
    bool started_ = false;
    int failures_ = 0;

    [[nodiscard]] std::vector<double> direction() const;
    /// Returns the accepted step length, or 0 on failure.
    double line_search(const std::vector<double> &x, const std::vector<double> &d, double f0,
                       double dg0, double alpha, std::vector<double> &x_out, double &f_out,
                       std::vector<double> &g_out);
};

} // namespace qspec::train
