#pragma once

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"
#include "aniso/weights.hpp"

namespace aniso {

// Geometric scale set t_min * q^k, k = 0..num_scales-1, standing in for the
// continuum "sup over t > 0" of the centered maximal operator.
struct ScaleLadder {
    double t_min = 0.0;
    double q = 2.0;
    int num_scales = 0;

    double scale(int k) const;
    double t_max() const { return scale(num_scales - 1); }

    // Smallest scale still sees the center cell on its own; largest spans the
    // domain from any center.
    static ScaleLadder make_default(const GridFunction& g, const Anisotropy& a, double q = 2.0);
};

// Centered maximal function: out[x] = max over ladder scales of the average
// of |f| over the cells of E(x, t) (snap rule, clamped to the domain).
GridFunction maximal(const GridFunction& f, const Anisotropy& a, const ScaleLadder& ladder);

// (M |f|^r)^{1/r}; r = 1 is exactly `maximal`.
GridFunction maximal_r(const GridFunction& f, double r, const Anisotropy& a,
                       const ScaleLadder& ladder);

// Deviation center used by the sharp maximal function: Mean subtracts the
// signed cell average; Literal subtracts the average of |f| (which makes
// f-sharp of a negative constant nonzero -- kept for comparison runs).
enum class SharpMode { Mean, Literal };

// out[x] = max over scales of avg over E(x,t) of |f - c_E|.
GridFunction sharp_maximal(const GridFunction& f, const Anisotropy& a, const ScaleLadder& ladder,
                           SharpMode mode = SharpMode::Mean);

// Uncentered maximal over the family: out[x] = max over {E in F : cell x
// included in E} of the cell average of |f| over E. Throws if some grid
// center lies in no family box.
GridFunction family_maximal(const GridFunction& f, const BoxFamily& f_boxes);

// Weighted analogue: out[x] = max over {E : x in E} of (sum_E |f| w)/(sum_E w),
// both sums over the identical snap cell set.
GridFunction weighted_maximal(const GridFunction& f, const GridFunction& w_samples,
                              const BoxFamily& f_boxes);
GridFunction weighted_maximal(const GridFunction& f, const Weight& w, const BoxFamily& f_boxes);

// Literal reading of "sup over E" without requiring x in E: the result is the
// constant field max over ALL boxes. Kept so the two readings can be compared.
GridFunction weighted_maximal_all_boxes(const GridFunction& f, const GridFunction& w_samples,
                                        const BoxFamily& f_boxes);

}  // namespace aniso
