#include "aniso/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "aniso/parallel.hpp"

namespace aniso {

double ScaleLadder::scale(int k) const { return t_min * std::pow(q, k); }

ScaleLadder ScaleLadder::make_default(const GridFunction& g, const Anisotropy& a, double q) {
    if (g.dim() != a.dim())
        throw std::invalid_argument("scale ladder: grid/anisotropy dimension mismatch");
    if (!(q > 1.0)) throw std::invalid_argument("scale ladder: require q > 1");
    double t_min = std::numeric_limits<double>::infinity();
    double t_cover = 0.0;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        t_min = std::min(t_min, std::pow(g.cell_size(i) / 2.0, 1.0 / a.a[i]));
        t_cover = std::max(t_cover, std::pow(g.domain.length(i), 1.0 / a.a[i]));
    }
    ScaleLadder l;
    l.t_min = t_min;
    l.q = q;
    const int k = t_min >= t_cover
                      ? 0
                      : static_cast<int>(std::ceil(std::log(t_cover / t_min) / std::log(q)));
    l.num_scales = k + 1;
    return l;
}

namespace {

// half-widths t^{a_i} for every ladder scale, precomputed once
std::vector<std::vector<double>> ladder_half_widths(const Anisotropy& a, const ScaleLadder& l) {
    std::vector<std::vector<double>> hw(static_cast<std::size_t>(l.num_scales));
    for (int k = 0; k < l.num_scales; ++k) {
        const double t = l.scale(k);
        hw[k].resize(a.dim());
        for (std::size_t i = 0; i < a.dim(); ++i) hw[k][i] = std::pow(t, a.a[i]);
    }
    return hw;
}

GridFunction centered_sweep(const GridFunction& f, const Anisotropy& a, const ScaleLadder& l,
                            const SummedTable& table) {
    if (f.dim() != a.dim())
        throw std::invalid_argument("maximal: grid/anisotropy dimension mismatch");
    if (l.num_scales <= 0) throw std::invalid_argument("maximal: empty scale ladder");
    const auto hw = ladder_half_widths(a, l);
    GridFunction out(f.domain, f.shape);
    const std::size_t n = f.dim();
    parallel_for(f.size(), [&](std::size_t flat) {
        const std::vector<double> c = f.center(flat);
        std::vector<IndexRange> ranges(n);
        double best = 0.0;
        for (const auto& h : hw) {
            std::size_t m = 1;
            for (std::size_t i = 0; i < n; ++i) {
                ranges[i] = cells_in(f, i, c[i] - h[i], c[i] + h[i]);
                m *= ranges[i].count();
            }
            best = std::max(best, table.cell_sum(ranges) / static_cast<double>(m));
        }
        out.values[flat] = best;
    });
    return out;
}

}  // namespace

GridFunction maximal(const GridFunction& f, const Anisotropy& a, const ScaleLadder& ladder) {
    const SummedTable table =
        SummedTable::build(f, [](double v) { return std::fabs(v); });
    return centered_sweep(f, a, ladder, table);
}

GridFunction maximal_r(const GridFunction& f, double r, const Anisotropy& a,
                       const ScaleLadder& ladder) {
    if (!(r > 0.0)) throw std::invalid_argument("maximal_r: require r > 0");
    if (r == 1.0) return maximal(f, a, ladder);
    const SummedTable table =
        SummedTable::build(f, [r](double v) { return std::pow(std::fabs(v), r); });
    GridFunction out = centered_sweep(f, a, ladder, table);
    for (double& v : out.values) v = std::pow(v, 1.0 / r);
    return out;
}

GridFunction sharp_maximal(const GridFunction& f, const Anisotropy& a, const ScaleLadder& ladder,
                           SharpMode mode) {
    if (f.dim() != a.dim())
        throw std::invalid_argument("sharp_maximal: grid/anisotropy dimension mismatch");
    if (ladder.num_scales <= 0) throw std::invalid_argument("sharp_maximal: empty scale ladder");
    const SummedTable mean_table =
        mode == SharpMode::Mean
            ? SummedTable::build(f)
            : SummedTable::build(f, [](double v) { return std::fabs(v); });
    const auto hw = ladder_half_widths(a, ladder);
    GridFunction out(f.domain, f.shape);
    const std::size_t n = f.dim();
    parallel_for(f.size(), [&](std::size_t flat) {
        const std::vector<double> c = f.center(flat);
        std::vector<IndexRange> ranges(n);
        double best = 0.0;
        for (const auto& h : hw) {
            std::size_t m = 1;
            for (std::size_t i = 0; i < n; ++i) {
                ranges[i] = cells_in(f, i, c[i] - h[i], c[i] + h[i]);
                m *= ranges[i].count();
            }
            const double mean = mean_table.cell_sum(ranges) / static_cast<double>(m);
            double dev = 0.0;
            visit_cells(f, ranges,
                        [&](std::size_t j) { dev += std::fabs(f.values[j] - mean); });
            best = std::max(best, dev / static_cast<double>(m));
        }
        out.values[flat] = best;
    });
    return out;
}

namespace {

// shared family sweep: per-box weighted averages in parallel, then a serial
// pass writing the running max into every covered cell
GridFunction family_sweep(const GridFunction& f, const GridFunction* w_samples,
                          const BoxFamily& fam) {
    if (f.dim() != fam.a.dim())
        throw std::invalid_argument("family maximal: grid/family dimension mismatch");
    if (w_samples &&
        (w_samples->shape != f.shape || w_samples->domain.lo != f.domain.lo ||
         w_samples->domain.hi != f.domain.hi))
        throw std::invalid_argument("family maximal: weight samples on different geometry");

    const SummedTable num_table =
        w_samples ? SummedTable::build(combine(
                        f, *w_samples, [](double a, double b) { return std::fabs(a) * b; }))
                  : SummedTable::build(f, [](double v) { return std::fabs(v); });
    std::optional<SummedTable> den_table;
    if (w_samples) den_table.emplace(SummedTable::build(*w_samples));

    const auto boxes = fam.boxes();
    std::vector<double> vals(boxes.size());
    parallel_for(boxes.size(), [&](std::size_t i) {
        const auto ranges = ranges_in(f, boxes[i]);
        const double num = num_table.cell_sum(ranges);
        const double den = den_table ? den_table->cell_sum(ranges)
                                     : static_cast<double>(range_cell_count(ranges));
        vals[i] = num / den;
    });

    GridFunction out(f.domain, f.shape);
    std::fill(out.values.begin(), out.values.end(), -1.0);
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        const auto ranges = ranges_in(f, boxes[i]);
        const double v = vals[i];
        visit_cells(f, ranges, [&](std::size_t j) {
            if (out.values[j] < v) out.values[j] = v;
        });
    }
    for (double v : out.values)
        if (v < 0.0)
            throw std::runtime_error(
                "family maximal: some grid center lies in no family box (family too sparse)");
    return out;
}

}  // namespace

GridFunction family_maximal(const GridFunction& f, const BoxFamily& f_boxes) {
    return family_sweep(f, nullptr, f_boxes);
}

GridFunction weighted_maximal(const GridFunction& f, const GridFunction& w_samples,
                              const BoxFamily& f_boxes) {
    return family_sweep(f, &w_samples, f_boxes);
}

GridFunction weighted_maximal(const GridFunction& f, const Weight& w, const BoxFamily& f_boxes) {
    return weighted_maximal(f, weight_samples(w, f.domain, f.shape), f_boxes);
}

GridFunction weighted_maximal_all_boxes(const GridFunction& f, const GridFunction& w_samples,
                                        const BoxFamily& f_boxes) {
    const SummedTable num_table = SummedTable::build(
        combine(f, w_samples, [](double a, double b) { return std::fabs(a) * b; }));
    const SummedTable den_table = SummedTable::build(w_samples);
    const auto boxes = f_boxes.boxes();
    std::vector<double> vals(boxes.size());
    parallel_for(boxes.size(), [&](std::size_t i) {
        const auto ranges = ranges_in(f, boxes[i]);
        vals[i] = num_table.cell_sum(ranges) / den_table.cell_sum(ranges);
    });
    double best = 0.0;
    for (double v : vals) best = std::max(best, v);
    GridFunction out(f.domain, f.shape);
    std::fill(out.values.begin(), out.values.end(), best);
    return out;
}

}  // namespace aniso
