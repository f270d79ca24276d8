#pragma once

#include <optional>
#include <span>
#include <vector>

#include "aniso/grid.hpp"
#include "aniso/weights.hpp"

namespace aniso {

// Parameters of the weighted Morrey scale: 1 <= p < inf, 0 <= kappa < 1.
struct MorreyParams {
    double p = 1.0;
    double kappa = 0.0;

    MorreyParams(double p_, double kappa_);
};

// (sum |f|^p w * cellvol)^{1/p} over the whole domain; p = infinity gives
// max over centers of |f| * w.
double lp_norm(const GridFunction& f, const GridFunction& w_samples, double p);
double lp_norm(const GridFunction& f, const Weight& w, double p);

// sup_{t>0} t * w({|f| > t})^{1/p}. The default evaluates the discrete
// supremum exactly: as t sweeps an interval between consecutive distinct
// sample magnitudes the level mass is constant, so the sup sits at the upper
// endpoint; max over distinct values v of v * w({|f| >= v})^{1/p}.
double weak_lp_norm(const GridFunction& f, const GridFunction& w_samples, double p);
// Explicit-ladder variant (profiling / cross-checks).
double weak_lp_norm(const GridFunction& f, const GridFunction& w_samples, double p,
                    std::span<const double> t_ladder);
double weak_lp_norm(const GridFunction& f, const Weight& w, double p);

struct MorreyResult {
    double value = 0.0;
    std::size_t argmax = 0;
    std::optional<Parallelepiped> box;
    std::vector<double> per_box;
};

// max over E in the family of (w(E)^{-kappa} * sum_E |f|^p w * cellvol)^{1/p},
// numerator and w(E) over the identical snap cell set; reports the argmax box.
MorreyResult morrey_norm(const GridFunction& f, const GridFunction& w_samples, MorreyParams mp,
                         const BoxFamily& fam);
MorreyResult morrey_norm(const GridFunction& f, const Weight& w, MorreyParams mp,
                         const BoxFamily& fam);

// Same quantity on one explicit box (used for anchored-interval studies).
double morrey_local(const GridFunction& f, const GridFunction& w_samples, MorreyParams mp,
                    const Parallelepiped& e);

}  // namespace aniso
