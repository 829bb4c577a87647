#include "qspec/train/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "qspec/errors.hpp"

namespace qspec::train {

namespace {

double dot(const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

void axpy(std::vector<double> &out, const std::vector<double> &x, double alpha,
          const std::vector<double> &d) {
    out.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        out[i] = x[i] + alpha * d[i];
    }
}

// Minimizer of the cubic through (a, fa, da) and (b, fb, db), kept inside
// the bracket; falls back to bisection when the fit is unusable.
double cubic_min(double a, double fa, double da, double b, double fb, double db) {
    const double d1 = da + db - 3 * (fa - fb) / (a - b);
    const double rad = d1 * d1 - da * db;
    const double lo = std::min(a, b), hi = std::max(a, b);
    if (rad >= 0) {
        const double d2 = std::copysign(std::sqrt(rad), b - a);
        const double t = b - (b - a) * (db + d2 - d1) / (db - da + 2 * d2);
        const double margin = 0.1 * (hi - lo);
        if (std::isfinite(t) && t > lo + margin && t < hi - margin) {
            return t;
        }
    }
    return 0.5 * (a + b);
}

} // namespace

void adam_step(std::span<double> parameters, std::span<const double> gradient, AdamState &state,
               const AdamConfig &config) {
    if (gradient.size() != parameters.size()) {
        throw ContractViolation("adam_step: gradient has " + std::to_string(gradient.size()) +
                                " entries for " + std::to_string(parameters.size()) +
                                " parameters");
    }
    for (std::size_t i = 0; i < gradient.size(); ++i) {
        if (!std::isfinite(gradient[i])) {
            throw NumericError("adam_step: non-finite gradient at index " + std::to_string(i));
        }
    }
    if (state.m.size() != parameters.size()) {
        state = AdamState::zeros(parameters.size());
    }
    ++state.step;
    const double c1 = 1.0 - std::pow(config.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(config.beta2, static_cast<double>(state.step));
    for (std::size_t i = 0; i < parameters.size(); ++i) {
        const double g = gradient[i];
        state.m[i] = config.beta1 * state.m[i] + (1 - config.beta1) * g;
        state.v[i] = config.beta2 * state.v[i] + (1 - config.beta2) * g * g;
        const double mh = state.m[i] / c1;
        const double vh = state.v[i] / c2;
        parameters[i] -= config.learning_rate * mh / (std::sqrt(vh) + config.epsilon);
    }
}

Lbfgs::Lbfgs(LbfgsConfig config, Objective objective)
    : config_(config), objective_(std::move(objective)) {
    if (config_.history < 0) {
        throw ConfigError("lbfgs history must be non-negative");
    }
}

std::vector<double> Lbfgs::direction() const {
    std::vector<double> q = g_;
    const std::size_t k = s_.size();
    std::vector<double> alpha(k);
    for (std::size_t j = k; j-- > 0;) {
        alpha[j] = rho_[j] * dot(s_[j], q);
        for (std::size_t i = 0; i < q.size(); ++i) {
            q[i] -= alpha[j] * y_[j][i];
        }
    }
    if (k > 0) {
        const double gamma = dot(s_.back(), y_.back()) / dot(y_.back(), y_.back());
        for (auto &v : q) {
            v *= gamma;
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        const double beta = rho_[j] * dot(y_[j], q);
        for (std::size_t i = 0; i < q.size(); ++i) {
            q[i] += s_[j][i] * (alpha[j] - beta);
        }
    }
    for (auto &v : q) {
        v = -v;
    }
    return q;
}

double Lbfgs::line_search(const std::vector<double> &x, const std::vector<double> &d, double f0,
                          double dg0, double alpha, std::vector<double> &x_out, double &f_out,
                          std::vector<double> &g_out) {
    double a_prev = 0.0, f_prev = f0, dg_prev = dg0;
    int evals = 0;
    auto eval = [&](double a, double &f, double &dg) {
        axpy(x_out, x, a, d);
        f = objective_(x_out, g_out);
        dg = dot(g_out, d);
        ++evals;
    };
    auto zoom = [&](double lo, double flo, double dglo, double hi, double fhi, double dghi) {
        while (evals < config_.max_line_search) {
            const double a = cubic_min(lo, flo, dglo, hi, fhi, dghi);
            double f = 0.0, dg = 0.0;
            eval(a, f, dg);
            if (!std::isfinite(f)) {
                hi = a;
                fhi = f0 + 1e300;
                dghi = 0.0;
                continue;
            }
            if (f > f0 + config_.c1 * a * dg0 || f >= flo) {
                hi = a, fhi = f, dghi = dg;
            } else {
                if (std::abs(dg) <= -config_.c2 * dg0) {
                    f_out = f;
                    return a;
                }
                if (dg * (hi - lo) >= 0) {
                    hi = lo, fhi = flo, dghi = dglo;
                }
                lo = a, flo = f, dglo = dg;
            }
            if (std::abs(hi - lo) < 1e-16 * std::max(1.0, std::abs(lo))) {
                break;
            }
        }
        return 0.0;
    };

    for (int i = 0; evals < config_.max_line_search; ++i) {
        double f = 0.0, dg = 0.0;
        eval(alpha, f, dg);
        if (!std::isfinite(f) || f > f0 + config_.c1 * alpha * dg0 || (i > 0 && f >= f_prev)) {
            if (!std::isfinite(f)) {
                f = f0 + 1e300;
                dg = 0.0;
            }
            return zoom(a_prev, f_prev, dg_prev, alpha, f, dg);
        }
        if (std::abs(dg) <= -config_.c2 * dg0) {
            f_out = f;
            return alpha;
        }
        if (dg >= 0) {
            return zoom(alpha, f, dg, a_prev, f_prev, dg_prev);
        }
        a_prev = alpha, f_prev = f, dg_prev = dg;
        alpha *= 2;
    }
    return 0.0;
}

double Lbfgs::step(std::vector<double> &x) {
    if (!started_) {
        f_ = objective_(x, g_);
        started_ = true;
    }
    const double gnorm = std::sqrt(dot(g_, g_));
    if (gnorm == 0.0 || !std::isfinite(f_)) {
        return f_;
    }
    std::vector<double> d = direction();
    double dg0 = dot(g_, d);
    if (!(dg0 < 0)) {
        s_.clear(), y_.clear(), rho_.clear();
        d = direction();
        dg0 = dot(g_, d);
    }
    double alpha0 = s_.empty() ? std::min(1.0, 1.0 / gnorm) : 1.0;

    std::vector<double> x_new, g_new;
    double f_new = f_;
    double a = line_search(x, d, f_, dg0, alpha0, x_new, f_new, g_new);
    if (a == 0.0) {
        // Steepest descent with backtracking on sufficient decrease only.
        ++failures_;
        s_.clear(), y_.clear(), rho_.clear();
        d = g_;
        for (auto &v : d) {
            v = -v;
        }
        dg0 = -gnorm * gnorm;
        a = std::min(1.0, 1.0 / gnorm);
        for (int i = 0; i < 60; ++i, a *= 0.5) {
            axpy(x_new, x, a, d);
            f_new = objective_(x_new, g_new);
            if (std::isfinite(f_new) && f_new <= f_ + config_.c1 * a * dg0) {
                break;
            }
        }
        if (!(std::isfinite(f_new) && f_new <= f_)) {
            return f_;
        }
    }
    if (config_.history > 0) {
        std::vector<double> s(x.size()), y(x.size());
        for (std::size_t i = 0; i < x.size(); ++i) {
            s[i] = x_new[i] - x[i];
            y[i] = g_new[i] - g_[i];
        }
        const double sy = dot(s, y);
        if (sy > 1e-12 * std::sqrt(dot(s, s) * dot(y, y))) {
            if (static_cast<int>(s_.size()) == config_.history) {
                s_.erase(s_.begin());
                y_.erase(y_.begin());
                rho_.erase(rho_.begin());
            }
            s_.push_back(std::move(s));
            y_.push_back(std::move(y));
            rho_.push_back(1.0 / sy);
        }
    }
    x = std::move(x_new);
    g_ = std::move(g_new);
    f_ = f_new;
    return f_;
}

} // namespace qspec::train
