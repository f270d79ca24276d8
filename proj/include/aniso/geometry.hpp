#pragma once

#include <span>
#include <vector>

namespace aniso {

// Anisotropy vector a = (a_1, ..., a_n), all entries positive. The dilation
// group acts on points as x -> (t^{a_1} x_1, ..., t^{a_n} x_n).
struct Anisotropy {
    std::vector<double> a;

    explicit Anisotropy(std::vector<double> exponents);
    static Anisotropy isotropic(std::size_t dim);

    std::size_t dim() const { return a.size(); }
    double trace() const { return trace_; }  // |a| = sum of exponents
    double max() const { return max_; }

  private:
    double trace_ = 0.0;
    double max_ = 0.0;
};

// Axis-aligned parallelepiped E(x, t) = { y : |y_i - x_i| <= t^{a_i} }.
// Stores a copy of the exponents so it can be rescaled on its own.
struct Parallelepiped {
    std::vector<double> center;
    double t = 0.0;
    std::vector<double> half_widths;  // t^{a_i}
    std::vector<double> exponents;    // a_i

    Parallelepiped(std::vector<double> center, double t, const Anisotropy& a);

    std::size_t dim() const { return center.size(); }
    double lo(std::size_t axis) const { return center[axis] - half_widths[axis]; }
    double hi(std::size_t axis) const { return center[axis] + half_widths[axis]; }
    bool contains(std::span<const double> x) const;
};

// Box quasi-norm |x|_a = max_i |x_i|^{1/a_i}. Vanishes only at 0 and is
// exactly 1-homogeneous under the anisotropic dilation. The span overloads
// take the raw exponent vector and skip the Anisotropy wrapper.
double box_quasi_norm(std::span<const double> x, std::span<const double> exponents);
double box_quasi_norm(std::span<const double> x, const Anisotropy& a);

// Smooth companion quasi-norm [x]_a: the unique t > 0 solving
//   sum_i x_i^2 t^{-2 a_i} = 1,
// found by bisection from a bracket around |x|_a. [0]_a = 0.
// Throws if the inputs overflow the bracketing search.
double rho_quasi_norm(std::span<const double> x, std::span<const double> exponents,
                      double tol = 1e-12, int max_iter = 200);
double rho_quasi_norm(std::span<const double> x, const Anisotropy& a,
                      double tol = 1e-12, int max_iter = 200);

// Residual sum_i x_i^2 t^{-2 a_i} - 1 of the defining equation; exposed so
// callers can verify solver output independently.
double rho_residual(std::span<const double> x, std::span<const double> exponents, double t);
double rho_residual(std::span<const double> x, const Anisotropy& a, double t);

// t^a x, the anisotropic dilation of a point.
std::vector<double> dilate_point(std::span<const double> x, const Anisotropy& a, double t);

// lambda^a E: same center, scale lambda * t.
Parallelepiped scale_parallelepiped(const Parallelepiped& e, double lambda);

// |E(x, t)| = 2^n t^{|a|}.
double lebesgue_measure(const Parallelepiped& e);

}  // namespace aniso
