#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"

namespace aniso {

// Exact integral of |x|^alpha over [lo, hi]; splits at 0 and throws when the
// interval touches 0 with alpha <= -1 (non-integrable).
double power_interval_integral(double lo, double hi, double alpha);

enum class WeightKind { Constant, PowerRho, PowerAbs, Grid };

// A positive weight: analytic (constant, power of a quasi-norm, power of one
// coordinate) or grid-sampled. Analytic kinds have closed-form integrals over
// parallelepipeds in the cases listed at exact_measure.
struct Weight {
    WeightKind kind = WeightKind::Constant;
    double c = 1.0;                      // Constant value
    double alpha = 0.0;                  // PowerRho / PowerAbs exponent
    int axis = 0;                        // PowerAbs coordinate
    std::vector<double> rho_exponents;   // PowerRho anisotropy
    std::shared_ptr<const GridFunction> grid;  // Grid samples

    double eval(std::span<const double> x) const;

    // True when exact_measure is available at this dimension: Constant and
    // PowerAbs always, PowerRho only in 1-D (where it reduces to |x|^{alpha/a1}).
    bool has_exact_measure(std::size_t dim) const;

    // Closed-form integral of w over e, NOT clipped to any domain: this is the
    // measure of the mathematical parallelepiped, so dilation identities like
    // w(2^aE)/w(E) come out exact for boxes near the window edge.
    double exact_measure(const Parallelepiped& e) const;
    // Same, restricted to e intersected with clip (empty intersection -> 0).
    double exact_measure(const Parallelepiped& e, const Box& clip) const;

    // The dual weight w^{1-p'} (p > 1): closed form for the analytic kinds,
    // pointwise-transformed samples for Grid.
    Weight dual(double p) const;

    // Expression for sampling analytic kinds onto grids (throws for Grid).
    Expr expr() const;

    static Weight constant(double c);
    static Weight power_rho(double alpha, const Anisotropy& a);
    static Weight power_abs(double alpha, int axis = 0);
    static Weight from_grid(GridFunction g);

    // CLI spec strings: const:<c> | powrho:<alpha> | powabs:<alpha> | grid:<path>
    static Weight parse(const std::string& spec, const Anisotropy& a);
    std::string spec() const;  // inverse of parse (grid kind echoes "grid:<cells>")
};

// Samples of the weight at the cell centers of (domain, shape); validates
// positivity. Grid weights must already live on the same geometry.
GridFunction weight_samples(const Weight& w, const Box& domain,
                            std::vector<std::size_t> shape);

// Snap-rule quadrature of w over e (clipped to the sample domain). For
// PowerRho in n >= 2 the cells whose closure contains the origin are refined
// by 3^n subdivision to `origin_depth` levels (the plain center sample badly
// represents an integrable singularity).
double quad_weight_measure(const Weight& w, const GridFunction& w_samples,
                           const SummedTable& w_table, const Parallelepiped& e,
                           int origin_depth = 6);

// ---------------------------------------------------------------------------
// Box families
// ---------------------------------------------------------------------------

// Finite family of parallelepipeds discretizing "sup over all E": a stride
// sub-lattice of cell centers crossed with a geometric scale ladder.
struct BoxFamily {
    Anisotropy a;
    std::size_t stride = 4;
    double q = 2.0;
    double t_min = 0.0;
    int num_scales = 0;
    std::vector<std::vector<double>> center_coords;  // per axis, ascending

    explicit BoxFamily(Anisotropy a_) : a(std::move(a_)) {}

    double scale(int k) const;
    std::size_t center_count() const;
    std::size_t size() const { return center_count() * static_cast<std::size_t>(num_scales); }

    // Scale-major, then row-major over the center lattice.
    std::vector<Parallelepiped> boxes() const;

    // t_min resolves the stride neighborhood ((stride+1)/2 cells per side),
    // scales step by q until one box covers the whole domain from any center.
    static BoxFamily make_default(const GridFunction& g, const Anisotropy& a,
                                  std::size_t stride = 4, double q = 2.0);
};

// ---------------------------------------------------------------------------
// Muckenhoupt characteristics and doubling constants
// ---------------------------------------------------------------------------

struct ApReport {
    double characteristic = 0.0;
    std::size_t argmax = 0;                  // index into the box enumeration
    std::optional<Parallelepiped> worst;
    std::vector<double> per_box;
};

// Grid backend: per-box value (avg_E w)(avg_E w^{1-p'})^{p-1} with both
// factors averaged over the identical snap cell set; >= 1 by discrete Jensen.
ApReport ap_characteristic(const GridFunction& w_samples, double p, const BoxFamily& f);

// A_1, grid backend: max over boxes of (avg_E w) / (min over cells in E of w).
ApReport a1_characteristic(const GridFunction& w_samples, const BoxFamily& f);

// Exact backend over explicit boxes (1-D power weights and constants).
double ap_local_exact(const Weight& w, double p, const Parallelepiped& e);
ApReport ap_characteristic_exact(const Weight& w, double p,
                                 const std::vector<Parallelepiped>& boxes);
// (exact average over e) / (essential infimum of w on e); +inf when the
// infimum vanishes (alpha > 0 with the origin inside e).
double a1_local_exact(const Weight& w, const Parallelepiped& e);

struct DoublingReport {
    double d = 0.0;        // max of w(2^aE)/w(E)
    double d1 = 0.0;       // min of the same ratio
    std::size_t tested = 0;
    std::size_t skipped = 0;
    std::optional<Parallelepiped> argmax, argmin;
};

// Grid backend: ratios over snap sums; pairs where 2^aE is not contained in
// the sample domain are skipped (the window cannot see the rest of the box).
// Throws when more than half the family is skipped.
DoublingReport doubling_constants(const GridFunction& w_samples, const BoxFamily& f);
DoublingReport doubling_constants(const GridFunction& w_samples,
                                  const std::vector<Parallelepiped>& boxes);
// Exact backend: unclipped closed-form measures, nothing is skipped.
DoublingReport doubling_constants_exact(const Weight& w,
                                        const std::vector<Parallelepiped>& boxes);

// rho^alpha in A_p iff -|a| < alpha < |a|(p-1); for p = 1 iff -|a| < alpha <= 0.
bool power_ap_predicate(double alpha, const Anisotropy& a, double p);

}  // namespace aniso
