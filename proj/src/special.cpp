#include "qrng/special.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace qrng {

namespace {

constexpr int MAX_ITER = 2000;
constexpr double EPS = 1e-15;
constexpr double FPMIN = 1e-300;

// Lower regularized P(a,x) by power series.
double gamma_p_series(double a, double x) {
    double ap = a;
    double term = 1.0 / a;
    double sum = term;
    for (int n = 0; n < MAX_ITER; ++n) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * EPS)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("igamc: series did not converge");
}

// Upper regularized Q(a,x) by continued fraction (modified Lentz).
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / FPMIN;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < MAX_ITER; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < FPMIN) d = FPMIN;
        c = b + an / c;
        if (std::fabs(c) < FPMIN) c = FPMIN;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < EPS)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("igamc: continued fraction did not converge");
}

} // namespace

double igamc(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw std::invalid_argument("igamc: a > 0 and x >= 0 required");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::sqrt(2.0));
}

double chi_square_pvalue(double chi2, double dof) {
    return igamc(dof / 2.0, chi2 / 2.0);
}

double ks_uniform_statistic(const double* p, std::size_t n) {
    std::vector<double> v(p, p + n);
    std::sort(v.begin(), v.end());
    double d = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double cdf = std::clamp(v[i], 0.0, 1.0);
        const double lo = static_cast<double>(i) / static_cast<double>(n);
        const double hi = static_cast<double>(i + 1) / static_cast<double>(n);
        d = std::max(d, std::max(cdf - lo, hi - cdf));
    }
    return d;
}

double ks_critical_value(double alpha, std::size_t n) {
    return std::sqrt(std::log(2.0 / alpha) / 2.0) / std::sqrt(static_cast<double>(n));
}

} // namespace qrng
