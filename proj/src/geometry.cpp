#include "aniso/geometry.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace aniso {

Anisotropy::Anisotropy(std::vector<double> exponents) : a(std::move(exponents)) {
    if (a.empty()) throw std::invalid_argument("anisotropy: empty exponent vector");
    for (double ai : a) {
        if (!(ai > 0.0) || !std::isfinite(ai))
            throw std::invalid_argument("anisotropy: exponents must be positive and finite");
        trace_ += ai;
        max_ = std::max(max_, ai);
    }
}

Anisotropy Anisotropy::isotropic(std::size_t dim) {
    return Anisotropy(std::vector<double>(dim, 1.0));
}

Parallelepiped::Parallelepiped(std::vector<double> c, double scale, const Anisotropy& a)
    : center(std::move(c)), t(scale), exponents(a.a) {
    if (center.size() != a.dim())
        throw std::invalid_argument("parallelepiped: center/anisotropy dimension mismatch");
    if (!(t > 0.0) || !std::isfinite(t))
        throw std::invalid_argument("parallelepiped: scale must be positive and finite");
    half_widths.reserve(center.size());
    for (double ai : exponents) half_widths.push_back(std::pow(t, ai));
}

bool Parallelepiped::contains(std::span<const double> x) const {
    for (std::size_t i = 0; i < center.size(); ++i)
        if (std::fabs(x[i] - center[i]) > half_widths[i]) return false;
    return true;
}

double box_quasi_norm(std::span<const double> x, std::span<const double> exponents) {
    if (x.size() != exponents.size())
        throw std::invalid_argument("box_quasi_norm: dimension mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        m = std::max(m, std::pow(std::fabs(x[i]), 1.0 / exponents[i]));
    return m;
}

double box_quasi_norm(std::span<const double> x, const Anisotropy& a) {
    return box_quasi_norm(x, std::span<const double>(a.a));
}

double rho_residual(std::span<const double> x, std::span<const double> exponents, double t) {
    double s = -1.0;
    for (std::size_t i = 0; i < x.size(); ++i)
        s += x[i] * x[i] * std::pow(t, -2.0 * exponents[i]);
    return s;
}

double rho_residual(std::span<const double> x, const Anisotropy& a, double t) {
    return rho_residual(x, std::span<const double>(a.a), t);
}

double rho_quasi_norm(std::span<const double> x, std::span<const double> exponents,
                      double tol, int max_iter) {
    if (x.size() != exponents.size())
        throw std::invalid_argument("rho_quasi_norm: dimension mismatch");
    bool all_zero = true;
    for (double xi : x) {
        if (!std::isfinite(xi)) throw std::invalid_argument("rho_quasi_norm: non-finite input");
        if (xi != 0.0) all_zero = false;
    }
    if (all_zero) return 0.0;  // continuous extension

    // The residual is strictly decreasing in t, nonnegative at t0 = |x|_a
    // (the maximal term alone contributes 1 there), and tends to -1 at
    // infinity, so a root lies in [t0, inf).
    const double t0 = box_quasi_norm(x, exponents);
    if (!std::isfinite(t0) || t0 == 0.0)
        throw std::runtime_error("rho_quasi_norm: |x|_a overflowed or underflowed, cannot bracket");

    double lo = t0, hi = t0;
    double r_hi = rho_residual(x, exponents, hi);
    int iter = 0;
    while (r_hi > 0.0) {
        hi *= 2.0;
        r_hi = rho_residual(x, exponents, hi);
        if (++iter > max_iter || !std::isfinite(hi))
            throw std::runtime_error("rho_quasi_norm: bracketing failed within iteration cap");
    }

    double mid = hi;
    for (iter = 0; iter < max_iter; ++iter) {
        mid = 0.5 * (lo + hi);
        const double r = rho_residual(x, exponents, mid);
        if (std::fabs(r) <= tol) return mid;
        if (r > 0.0)
            lo = mid;
        else
            hi = mid;
        if (hi - lo <= std::numeric_limits<double>::epsilon() * mid) return mid;
    }
    throw std::runtime_error("rho_quasi_norm: bisection did not reach tolerance " +
                             std::to_string(tol));
}

double rho_quasi_norm(std::span<const double> x, const Anisotropy& a,
                      double tol, int max_iter) {
    return rho_quasi_norm(x, std::span<const double>(a.a), tol, max_iter);
}

std::vector<double> dilate_point(std::span<const double> x, const Anisotropy& a, double t) {
    if (x.size() != a.dim())
        throw std::invalid_argument("dilate_point: dimension mismatch");
    if (!(t > 0.0)) throw std::invalid_argument("dilate_point: scale must be positive");
    std::vector<double> y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::pow(t, a.a[i]) * x[i];
    return y;
}

Parallelepiped scale_parallelepiped(const Parallelepiped& e, double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("scale_parallelepiped: lambda must be positive");
    Parallelepiped out = e;
    out.t = lambda * e.t;
    for (std::size_t i = 0; i < out.half_widths.size(); ++i)
        out.half_widths[i] = std::pow(out.t, out.exponents[i]);
    return out;
}

double lebesgue_measure(const Parallelepiped& e) {
    double trace = 0.0;
    for (double ai : e.exponents) trace += ai;
    return std::pow(2.0, static_cast<double>(e.dim())) * std::pow(e.t, trace);
}

}  // namespace aniso
