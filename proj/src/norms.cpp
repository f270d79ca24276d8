#include "aniso/norms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "aniso/parallel.hpp"

namespace aniso {

MorreyParams::MorreyParams(double p_, double kappa_) : p(p_), kappa(kappa_) {
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("Morrey parameters: require 1 <= p < infinity");
    if (!(kappa >= 0.0 && kappa < 1.0))
        throw std::invalid_argument("Morrey parameters: require 0 <= kappa < 1");
}

namespace {

void check_same_geometry(const GridFunction& f, const GridFunction& w) {
    if (w.shape != f.shape || w.domain.lo != f.domain.lo || w.domain.hi != f.domain.hi)
        throw std::invalid_argument("norm: weight samples on different geometry than f");
}

}  // namespace

double lp_norm(const GridFunction& f, const GridFunction& w_samples, double p) {
    check_same_geometry(f, w_samples);
    if (std::isinf(p)) {
        double best = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i)
            best = std::max(best, std::fabs(f.values[i]) * w_samples.values[i]);
        return best;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: require p >= 1 or infinity");
    long double acc = 0.0L;
    for (std::size_t i = 0; i < f.size(); ++i)
        acc += static_cast<long double>(std::pow(std::fabs(f.values[i]), p)) *
               w_samples.values[i];
    acc *= f.cell_volume();
    return static_cast<double>(std::pow(acc, static_cast<long double>(1.0 / p)));
}

double lp_norm(const GridFunction& f, const Weight& w, double p) {
    return lp_norm(f, weight_samples(w, f.domain, f.shape), p);
}

double weak_lp_norm(const GridFunction& f, const GridFunction& w_samples, double p) {
    check_same_geometry(f, w_samples);
    if (!(p >= 1.0) || !std::isfinite(p))
        throw std::invalid_argument("weak_lp_norm: require 1 <= p < infinity");
    // order cells by |f| descending; the discrete sup over t is attained just
    // below a distinct magnitude v, with level mass = total w-mass at >= v
    std::vector<std::size_t> order(f.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return std::fabs(f.values[a]) > std::fabs(f.values[b]);
    });
    double best = 0.0;
    long double mass = 0.0L;
    const double vol = f.cell_volume();
    for (std::size_t k = 0; k < order.size();) {
        const double v = std::fabs(f.values[order[k]]);
        if (v == 0.0) break;
        while (k < order.size() && std::fabs(f.values[order[k]]) == v) {
            mass += static_cast<long double>(w_samples.values[order[k]]) * vol;
            ++k;
        }
        best = std::max(best, v * static_cast<double>(
                                      std::pow(mass, static_cast<long double>(1.0 / p))));
    }
    return best;
}

double weak_lp_norm(const GridFunction& f, const GridFunction& w_samples, double p,
                    std::span<const double> t_ladder) {
    check_same_geometry(f, w_samples);
    if (t_ladder.empty()) throw std::invalid_argument("weak_lp_norm: empty level ladder");
    const double vol = f.cell_volume();
    double best = 0.0;
    for (double t : t_ladder) {
        if (!(t > 0.0)) throw std::invalid_argument("weak_lp_norm: levels must be positive");
        long double mass = 0.0L;
        for (std::size_t i = 0; i < f.size(); ++i)
            if (std::fabs(f.values[i]) > t) mass += w_samples.values[i];
        mass *= vol;
        best = std::max(best,
                        t * static_cast<double>(std::pow(mass, static_cast<long double>(1.0 / p))));
    }
    return best;
}

double weak_lp_norm(const GridFunction& f, const Weight& w, double p) {
    return weak_lp_norm(f, weight_samples(w, f.domain, f.shape), p);
}

MorreyResult morrey_norm(const GridFunction& f, const GridFunction& w_samples, MorreyParams mp,
                         const BoxFamily& fam) {
    check_same_geometry(f, w_samples);
    if (f.dim() != fam.a.dim())
        throw std::invalid_argument("morrey_norm: grid/family dimension mismatch");
    const SummedTable tw = SummedTable::build(w_samples);
    const SummedTable tfw = SummedTable::build(
        combine(f, w_samples,
                [p = mp.p](double a, double b) { return std::pow(std::fabs(a), p) * b; }));
    const auto boxes = fam.boxes();
    const double vol = f.cell_volume();
    MorreyResult r;
    r.per_box.resize(boxes.size());
    parallel_for(boxes.size(), [&](std::size_t i) {
        const auto ranges = ranges_in(f, boxes[i]);
        const double we = tw.cell_sum(ranges) * vol;
        const double num = tfw.cell_sum(ranges) * vol;
        r.per_box[i] = std::pow(num / std::pow(we, mp.kappa), 1.0 / mp.p);
    });
    r.value = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < r.per_box.size(); ++i) {
        if (r.per_box[i] > r.value) {
            r.value = r.per_box[i];
            r.argmax = i;
        }
    }
    if (!boxes.empty()) r.box = boxes[r.argmax];
    return r;
}

MorreyResult morrey_norm(const GridFunction& f, const Weight& w, MorreyParams mp,
                         const BoxFamily& fam) {
    return morrey_norm(f, weight_samples(w, f.domain, f.shape), mp, fam);
}

double morrey_local(const GridFunction& f, const GridFunction& w_samples, MorreyParams mp,
                    const Parallelepiped& e) {
    check_same_geometry(f, w_samples);
    const auto ranges = ranges_in(f, e);
    const double vol = f.cell_volume();
    long double we = 0.0L, num = 0.0L;
    visit_cells(f, ranges, [&](std::size_t j) {
        we += w_samples.values[j];
        num += static_cast<long double>(std::pow(std::fabs(f.values[j]), mp.p)) *
               w_samples.values[j];
    });
    if (we <= 0.0L) throw std::runtime_error("morrey_local: box has no weight mass");
    const double wev = static_cast<double>(we) * vol;
    const double numv = static_cast<double>(num) * vol;
    return std::pow(numv / std::pow(wev, mp.kappa), 1.0 / mp.p);
}

}  // namespace aniso
