#include "aniso/weights.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "aniso/parallel.hpp"

namespace aniso {

namespace {

// integral of x^alpha over [l, u] with 0 <= l <= u (l > 0 unless alpha > -1)
double positive_piece(double l, double u, double alpha) {
    if (l == u) return 0.0;
    if (l == 0.0) {
        if (alpha <= -1.0)
            throw std::domain_error("power weight: alpha <= -1 is not integrable at 0");
        return std::pow(u, alpha + 1.0) / (alpha + 1.0);
    }
    if (alpha == -1.0) return std::log(u / l);
    return (std::pow(u, alpha + 1.0) - std::pow(l, alpha + 1.0)) / (alpha + 1.0);
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

double power_interval_integral(double lo, double hi, double alpha) {
    if (!(lo <= hi)) throw std::invalid_argument("power_interval_integral: lo > hi");
    if (lo >= 0.0) return positive_piece(lo, hi, alpha);
    if (hi <= 0.0) return positive_piece(-hi, -lo, alpha);
    return positive_piece(0.0, -lo, alpha) + positive_piece(0.0, hi, alpha);
}

// ---------------------------------------------------------------------------
// Weight
// ---------------------------------------------------------------------------

double Weight::eval(std::span<const double> x) const {
    switch (kind) {
        case WeightKind::Constant:
            return c;
        case WeightKind::PowerAbs:
            return std::pow(std::fabs(x[axis]), alpha);
        case WeightKind::PowerRho:
            return std::pow(rho_quasi_norm(x, std::span<const double>(rho_exponents)), alpha);
        case WeightKind::Grid: {
            const GridFunction& g = *grid;
            std::size_t flat = 0;
            for (std::size_t i = 0; i < g.dim(); ++i) {
                const double rel = (x[i] - g.domain.lo[i]) / g.cell_size(i);
                auto j = static_cast<std::ptrdiff_t>(std::floor(rel));
                j = std::clamp<std::ptrdiff_t>(j, 0, static_cast<std::ptrdiff_t>(g.shape[i]) - 1);
                flat += static_cast<std::size_t>(j) * g.stride(i);
            }
            return g.values[flat];
        }
    }
    throw std::logic_error("weight: unknown kind");
}

bool Weight::has_exact_measure(std::size_t dim) const {
    switch (kind) {
        case WeightKind::Constant:
        case WeightKind::PowerAbs:
            return true;
        case WeightKind::PowerRho:
            return dim == 1;
        case WeightKind::Grid:
            return false;
    }
    return false;
}

namespace {

double exact_measure_over(const Weight& w, std::span<const double> lo, std::span<const double> hi) {
    const std::size_t n = lo.size();
    auto side_product_except = [&](std::size_t skip) {
        double v = 1.0;
        for (std::size_t i = 0; i < n; ++i)
            if (i != skip) v *= hi[i] - lo[i];
        return v;
    };
    switch (w.kind) {
        case WeightKind::Constant:
            return w.c * side_product_except(n);  // product over all axes
        case WeightKind::PowerAbs:
            return power_interval_integral(lo[w.axis], hi[w.axis], w.alpha) *
                   side_product_except(static_cast<std::size_t>(w.axis));
        case WeightKind::PowerRho:
            if (n != 1)
                throw std::logic_error("weight: no closed form for powrho above one dimension");
            // [x]_a = |x|^{1/a_1} in 1-D, so rho^alpha = |x|^{alpha/a_1}
            return power_interval_integral(lo[0], hi[0], w.alpha / w.rho_exponents[0]);
        case WeightKind::Grid:
            throw std::logic_error("weight: grid weights have no closed-form measure");
    }
    throw std::logic_error("weight: unknown kind");
}

}  // namespace

double Weight::exact_measure(const Parallelepiped& e) const {
    std::vector<double> lo(e.dim()), hi(e.dim());
    for (std::size_t i = 0; i < e.dim(); ++i) {
        lo[i] = e.lo(i);
        hi[i] = e.hi(i);
    }
    return exact_measure_over(*this, lo, hi);
}

double Weight::exact_measure(const Parallelepiped& e, const Box& clip) const {
    std::vector<double> lo(e.dim()), hi(e.dim());
    for (std::size_t i = 0; i < e.dim(); ++i) {
        lo[i] = std::max(e.lo(i), clip.lo[i]);
        hi[i] = std::min(e.hi(i), clip.hi[i]);
        if (!(lo[i] < hi[i])) return 0.0;
    }
    return exact_measure_over(*this, lo, hi);
}

Weight Weight::dual(double p) const {
    if (!(p > 1.0)) throw std::invalid_argument("weight dual: requires p > 1");
    const double e = 1.0 - p / (p - 1.0);  // 1 - p'
    Weight d = *this;
    switch (kind) {
        case WeightKind::Constant:
            d.c = std::pow(c, e);
            return d;
        case WeightKind::PowerAbs:
        case WeightKind::PowerRho:
            d.alpha = alpha * e;
            return d;
        case WeightKind::Grid: {
            d.grid = std::make_shared<GridFunction>(
                grid->transformed([e](double v) { return std::pow(v, e); }));
            return d;
        }
    }
    throw std::logic_error("weight: unknown kind");
}

Expr Weight::expr() const {
    switch (kind) {
        case WeightKind::Constant:
            return Expr::constant(c);
        case WeightKind::PowerAbs:
            return Expr::pow_abs(alpha, axis);
        case WeightKind::PowerRho:
            return Expr::pow_rho(alpha, Anisotropy(rho_exponents));
        case WeightKind::Grid:
            throw std::logic_error("weight: grid weights are not expressions");
    }
    throw std::logic_error("weight: unknown kind");
}

Weight Weight::constant(double c) {
    if (!(c > 0.0)) throw std::invalid_argument("weight: constant must be positive");
    Weight w;
    w.kind = WeightKind::Constant;
    w.c = c;
    return w;
}

Weight Weight::power_rho(double alpha, const Anisotropy& a) {
    Weight w;
    w.kind = WeightKind::PowerRho;
    w.alpha = alpha;
    w.rho_exponents = a.a;
    return w;
}

Weight Weight::power_abs(double alpha, int axis) {
    Weight w;
    w.kind = WeightKind::PowerAbs;
    w.alpha = alpha;
    w.axis = axis;
    return w;
}

Weight Weight::from_grid(GridFunction g) {
    for (double v : g.values)
        if (!(v > 0.0) || !std::isfinite(v))
            throw std::invalid_argument("weight: grid samples must be positive and finite");
    Weight w;
    w.kind = WeightKind::Grid;
    w.grid = std::make_shared<GridFunction>(std::move(g));
    return w;
}

Weight Weight::parse(const std::string& spec, const Anisotropy& a) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos)
        throw std::invalid_argument("weight spec must look like kind:value, got '" + spec + "'");
    const std::string head = spec.substr(0, colon);
    const std::string tail = spec.substr(colon + 1);
    if (head == "const") return constant(std::stod(tail));
    if (head == "powrho") return power_rho(std::stod(tail), a);
    if (head == "powabs") return power_abs(std::stod(tail));
    if (head == "grid") {
        const bool csv = tail.size() >= 4 && tail.substr(tail.size() - 4) == ".csv";
        return from_grid(csv ? read_grid_csv(tail) : read_grid_json(tail));
    }
    throw std::invalid_argument("unknown weight kind '" + head + "'");
}

std::string Weight::spec() const {
    switch (kind) {
        case WeightKind::Constant:
            return "const:" + format_double(c);
        case WeightKind::PowerAbs:
            return "powabs:" + format_double(alpha);
        case WeightKind::PowerRho:
            return "powrho:" + format_double(alpha);
        case WeightKind::Grid:
            return "grid:" + std::to_string(grid->size());
    }
    return "?";
}

GridFunction weight_samples(const Weight& w, const Box& domain, std::vector<std::size_t> shape) {
    if (w.kind == WeightKind::Grid) {
        const GridFunction& g = *w.grid;
        if (g.shape != shape || g.domain.lo != domain.lo || g.domain.hi != domain.hi)
            throw std::invalid_argument("grid weight does not share the target domain/shape");
        return g;
    }
    GridFunction s = sample(w.expr(), domain, std::move(shape));
    for (double v : s.values)
        if (!(v > 0.0))
            throw std::domain_error("weight is not strictly positive at every cell center");
    return s;
}

// ---------------------------------------------------------------------------
// Quadrature measure with origin refinement
// ---------------------------------------------------------------------------

namespace {

bool closure_contains_origin(std::span<const double> lo, std::span<const double> hi) {
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (lo[i] > 0.0 || hi[i] < 0.0) return false;
    return true;
}

double refine_origin_box(const Weight& w, std::vector<double>& lo, std::vector<double>& hi,
                         int depth) {
    const std::size_t n = lo.size();
    double vol = 1.0;
    for (std::size_t i = 0; i < n; ++i) vol *= hi[i] - lo[i];
    if (depth == 0) {
        std::vector<double> x(n);
        bool at_origin = true;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = 0.5 * (lo[i] + hi[i]);
            if (x[i] != 0.0) at_origin = false;
        }
        if (at_origin)
            for (std::size_t i = 0; i < n; ++i) x[i] = lo[i] + 0.75 * (hi[i] - lo[i]);
        return w.eval(x) * vol;
    }
    // split each axis in thirds; only subboxes touching the origin recurse
    double total = 0.0;
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> slo(n), shi(n), x(n);
    for (;;) {
        for (std::size_t i = 0; i < n; ++i) {
            const double step = (hi[i] - lo[i]) / 3.0;
            slo[i] = lo[i] + static_cast<double>(idx[i]) * step;
            shi[i] = (idx[i] == 2) ? hi[i] : slo[i] + step;
        }
        if (closure_contains_origin(slo, shi)) {
            total += refine_origin_box(w, slo, shi, depth - 1);
        } else {
            double svol = 1.0;
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = 0.5 * (slo[i] + shi[i]);
                svol *= shi[i] - slo[i];
            }
            total += w.eval(x) * svol;
        }
        std::size_t axis = n;
        bool done = true;
        while (axis-- > 0) {
            if (++idx[axis] < 3) {
                done = false;
                break;
            }
            idx[axis] = 0;
        }
        if (done) return total;
    }
}

}  // namespace

double quad_weight_measure(const Weight& w, const GridFunction& w_samples,
                           const SummedTable& w_table, const Parallelepiped& e,
                           int origin_depth) {
    double plain = box_sum(w_table, w_samples, e);
    if (w.kind != WeightKind::PowerRho || w_samples.dim() < 2 || origin_depth <= 0)
        return plain;

    // all grid cells whose closure contains the origin and that the snap rule
    // includes in e
    const auto ranges = ranges_in(w_samples, e);
    std::vector<std::vector<std::size_t>> cand(w_samples.dim());
    for (std::size_t i = 0; i < w_samples.dim(); ++i) {
        const double h = w_samples.cell_size(i);
        const double rel = (0.0 - w_samples.domain.lo[i]) / h;
        for (std::ptrdiff_t j :
             {static_cast<std::ptrdiff_t>(std::floor(rel)) - 1,
              static_cast<std::ptrdiff_t>(std::floor(rel)),
              static_cast<std::ptrdiff_t>(std::floor(rel)) + 1}) {
            if (j < ranges[i].lo || j > ranges[i].hi) continue;
            const double lo = w_samples.domain.lo[i] + static_cast<double>(j) * h;
            if (lo <= 0.0 && 0.0 <= lo + h) cand[i].push_back(static_cast<std::size_t>(j));
        }
        if (cand[i].empty()) return plain;
    }

    std::vector<std::size_t> pick(w_samples.dim(), 0);
    for (;;) {
        std::vector<double> lo(w_samples.dim()), hi(w_samples.dim());
        std::size_t flat = 0;
        for (std::size_t i = 0; i < w_samples.dim(); ++i) {
            const std::size_t j = cand[i][pick[i]];
            lo[i] = w_samples.domain.lo[i] + static_cast<double>(j) * w_samples.cell_size(i);
            hi[i] = lo[i] + w_samples.cell_size(i);
            flat += j * w_samples.stride(i);
        }
        plain += refine_origin_box(w, lo, hi, origin_depth) -
                 w_samples.values[flat] * w_samples.cell_volume();
        std::size_t axis = w_samples.dim();
        bool done = true;
        while (axis-- > 0) {
            if (++pick[axis] < cand[axis].size()) {
                done = false;
                break;
            }
            pick[axis] = 0;
        }
        if (done) return plain;
    }
}

// ---------------------------------------------------------------------------
// BoxFamily
// ---------------------------------------------------------------------------

double BoxFamily::scale(int k) const { return t_min * std::pow(q, k); }

std::size_t BoxFamily::center_count() const {
    std::size_t m = 1;
    for (const auto& axis : center_coords) m *= axis.size();
    return m;
}

std::vector<Parallelepiped> BoxFamily::boxes() const {
    std::vector<Parallelepiped> out;
    out.reserve(size());
    const std::size_t n = center_coords.size();
    for (int k = 0; k < num_scales; ++k) {
        const double t = scale(k);
        std::vector<std::size_t> idx(n, 0);
        for (;;) {
            std::vector<double> c(n);
            for (std::size_t i = 0; i < n; ++i) c[i] = center_coords[i][idx[i]];
            out.emplace_back(std::move(c), t, a);
            std::size_t axis = n;
            bool done = true;
            while (axis-- > 0) {
                if (++idx[axis] < center_coords[axis].size()) {
                    done = false;
                    break;
                }
                idx[axis] = 0;
            }
            if (done) break;
        }
    }
    return out;
}

BoxFamily BoxFamily::make_default(const GridFunction& g, const Anisotropy& a,
                                  std::size_t stride, double q) {
    if (g.dim() != a.dim())
        throw std::invalid_argument("box family: grid/anisotropy dimension mismatch");
    if (stride == 0 || !(q > 1.0))
        throw std::invalid_argument("box family: require stride >= 1 and q > 1");
    BoxFamily f(a);
    f.stride = stride;
    f.q = q;
    f.center_coords.resize(g.dim());
    double t_min = 0.0, t_cover = 0.0;
    for (std::size_t i = 0; i < g.dim(); ++i) {
        for (std::size_t j = stride / 2; j < g.shape[i]; j += stride)
            f.center_coords[i].push_back(g.center(i, j));
        t_min = std::max(t_min, std::pow(static_cast<double>(stride + 1) * g.cell_size(i) / 2.0,
                                         1.0 / a.a[i]));
        t_cover = std::max(t_cover, std::pow(g.domain.length(i), 1.0 / a.a[i]));
    }
    f.t_min = t_min;
    const int k = t_min >= t_cover
                      ? 0
                      : static_cast<int>(std::ceil(std::log(t_cover / t_min) / std::log(q)));
    f.num_scales = k + 1;
    return f;
}

// ---------------------------------------------------------------------------
// Characteristics
// ---------------------------------------------------------------------------

namespace {

ApReport reduce_max(std::vector<double> per_box, const std::vector<Parallelepiped>& boxes) {
    ApReport r;
    r.per_box = std::move(per_box);
    for (std::size_t i = 0; i < r.per_box.size(); ++i) {
        if (r.per_box[i] > r.characteristic) {
            r.characteristic = r.per_box[i];
            r.argmax = i;
        }
    }
    if (!boxes.empty()) r.worst = boxes[r.argmax];
    return r;
}

}  // namespace

ApReport ap_characteristic(const GridFunction& w_samples, double p, const BoxFamily& f) {
    if (!(p > 1.0)) throw std::invalid_argument("ap_characteristic: requires p > 1 (use a1 for p = 1)");
    const double dual_e = 1.0 - p / (p - 1.0);
    const SummedTable tw = SummedTable::build(w_samples);
    const SummedTable td =
        SummedTable::build(w_samples, [dual_e](double v) { return std::pow(v, dual_e); });
    const auto boxes = f.boxes();
    std::vector<double> vals(boxes.size());
    parallel_for(boxes.size(), [&](std::size_t i) {
        const auto ranges = ranges_in(w_samples, boxes[i]);
        const auto m = static_cast<double>(range_cell_count(ranges));
        const double aw = tw.cell_sum(ranges) / m;
        const double ad = td.cell_sum(ranges) / m;
        vals[i] = aw * std::pow(ad, p - 1.0);
    });
    return reduce_max(std::move(vals), boxes);
}

ApReport a1_characteristic(const GridFunction& w_samples, const BoxFamily& f) {
    const SummedTable tw = SummedTable::build(w_samples);
    const auto boxes = f.boxes();
    std::vector<double> vals(boxes.size());
    parallel_for(boxes.size(), [&](std::size_t i) {
        const auto ranges = ranges_in(w_samples, boxes[i]);
        const auto m = static_cast<double>(range_cell_count(ranges));
        const double aw = tw.cell_sum(ranges) / m;
        double wmin = std::numeric_limits<double>::infinity();
        visit_cells(w_samples, ranges,
                    [&](std::size_t flat) { wmin = std::min(wmin, w_samples.values[flat]); });
        vals[i] = aw / wmin;
    });
    return reduce_max(std::move(vals), boxes);
}

double ap_local_exact(const Weight& w, double p, const Parallelepiped& e) {
    if (!(p > 1.0)) throw std::invalid_argument("ap_local_exact: requires p > 1");
    const double vol = lebesgue_measure(e);
    const double aw = w.exact_measure(e) / vol;
    const double ad = w.dual(p).exact_measure(e) / vol;
    return aw * std::pow(ad, p - 1.0);
}

ApReport ap_characteristic_exact(const Weight& w, double p,
                                 const std::vector<Parallelepiped>& boxes) {
    std::vector<double> vals(boxes.size());
    for (std::size_t i = 0; i < boxes.size(); ++i) vals[i] = ap_local_exact(w, p, boxes[i]);
    return reduce_max(std::move(vals), boxes);
}

namespace {

// inf/sup of |coordinate| over an interval
double near_abs(double lo, double hi) { return (lo <= 0.0 && 0.0 <= hi) ? 0.0 : std::min(std::fabs(lo), std::fabs(hi)); }
double far_abs(double lo, double hi) { return std::max(std::fabs(lo), std::fabs(hi)); }

}  // namespace

double a1_local_exact(const Weight& w, const Parallelepiped& e) {
    const double avg = w.exact_measure(e) / lebesgue_measure(e);
    double inf_w = 0.0;
    switch (w.kind) {
        case WeightKind::Constant:
            inf_w = w.c;
            break;
        case WeightKind::PowerAbs: {
            const double base = w.alpha >= 0.0 ? near_abs(e.lo(w.axis), e.hi(w.axis))
                                               : far_abs(e.lo(w.axis), e.hi(w.axis));
            inf_w = std::pow(base, w.alpha);
            if (w.alpha == 0.0) inf_w = 1.0;
            break;
        }
        case WeightKind::PowerRho: {
            // rho is increasing in each |x_i|, so its extremes over a box sit
            // at the per-axis nearest/farthest coordinates
            std::vector<double> pt(e.dim());
            for (std::size_t i = 0; i < e.dim(); ++i)
                pt[i] = w.alpha >= 0.0 ? near_abs(e.lo(i), e.hi(i)) : far_abs(e.lo(i), e.hi(i));
            const double r = rho_quasi_norm(pt, std::span<const double>(w.rho_exponents));
            inf_w = w.alpha == 0.0 ? 1.0 : std::pow(r, w.alpha);
            break;
        }
        case WeightKind::Grid:
            throw std::logic_error("a1_local_exact: grid weights use the grid backend");
    }
    if (inf_w == 0.0) return std::numeric_limits<double>::infinity();
    return avg / inf_w;
}

// ---------------------------------------------------------------------------
// Doubling
// ---------------------------------------------------------------------------

DoublingReport doubling_constants(const GridFunction& w_samples, const BoxFamily& f) {
    return doubling_constants(w_samples, f.boxes());
}

DoublingReport doubling_constants(const GridFunction& w_samples,
                                  const std::vector<Parallelepiped>& boxes) {
    const SummedTable tw = SummedTable::build(w_samples);
    DoublingReport r;
    r.d = 0.0;
    r.d1 = std::numeric_limits<double>::infinity();
    for (const auto& e : boxes) {
        const Parallelepiped e2 = scale_parallelepiped(e, 2.0);
        bool inside = true;
        for (std::size_t i = 0; i < e2.dim(); ++i)
            if (e2.lo(i) < w_samples.domain.lo[i] || e2.hi(i) > w_samples.domain.hi[i])
                inside = false;
        if (!inside) {
            ++r.skipped;
            continue;
        }
        const double we = tw.cell_sum(ranges_in(w_samples, e));
        const double we2 = tw.cell_sum(ranges_in(w_samples, e2));
        const double ratio = we2 / we;
        ++r.tested;
        if (ratio > r.d) {
            r.d = ratio;
            r.argmax = e;
        }
        if (ratio < r.d1) {
            r.d1 = ratio;
            r.argmin = e;
        }
    }
    if (r.tested == 0 || r.skipped > boxes.size() / 2)
        throw std::runtime_error("doubling_constants: family too coarse for the domain (" +
                                 std::to_string(r.skipped) + "/" + std::to_string(boxes.size()) +
                                 " boxes skipped)");
    return r;
}

DoublingReport doubling_constants_exact(const Weight& w,
                                        const std::vector<Parallelepiped>& boxes) {
    DoublingReport r;
    r.d = 0.0;
    r.d1 = std::numeric_limits<double>::infinity();
    for (const auto& e : boxes) {
        const double ratio = w.exact_measure(scale_parallelepiped(e, 2.0)) / w.exact_measure(e);
        ++r.tested;
        if (ratio > r.d) {
            r.d = ratio;
            r.argmax = e;
        }
        if (ratio < r.d1) {
            r.d1 = ratio;
            r.argmin = e;
        }
    }
    if (r.tested == 0) throw std::runtime_error("doubling_constants_exact: empty family");
    return r;
}

bool power_ap_predicate(double alpha, const Anisotropy& a, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("power_ap_predicate: requires p >= 1");
    if (p == 1.0) return -a.trace() < alpha && alpha <= 0.0;
    return -a.trace() < alpha && alpha < a.trace() * (p - 1.0);
}

}  // namespace aniso
