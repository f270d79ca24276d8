#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"

#include <json.hpp>

namespace aniso {

// Axis-aligned box given by per-axis bounds, used for domains and indicator
// supports. Closed on both ends.
struct Box {
    std::vector<double> lo, hi;

    Box() = default;
    Box(std::vector<double> lo, std::vector<double> hi);
    static Box interval(double lo, double hi) { return Box({lo}, {hi}); }

    std::size_t dim() const { return lo.size(); }
    double length(std::size_t axis) const { return hi[axis] - lo[axis]; }
    double volume() const;
    bool contains(std::span<const double> x) const;
};

// ---------------------------------------------------------------------------
// Term language for test functions and weights
// ---------------------------------------------------------------------------

enum class ExprKind { Const, PowAbs, PowRho, Indicator, Sum, Product, Scale };

// Small immutable expression tree: constants, |x_axis|^alpha, [x]_a^alpha,
// box indicators, sums, products, and scalar multiples.
struct Expr {
    ExprKind kind = ExprKind::Const;
    double value = 0.0;           // Const c, Scale c, PowAbs/PowRho alpha
    int axis = 0;                 // PowAbs
    Box box;                      // Indicator
    std::vector<double> rho_exponents;  // PowRho anisotropy
    std::vector<Expr> kids;       // Sum, Product, Scale (single child)

    double eval(std::span<const double> x) const;

    static Expr constant(double c);
    static Expr pow_abs(double alpha, int axis = 0);
    static Expr pow_rho(double alpha, const Anisotropy& a);
    static Expr indicator(Box b);
    static Expr sum(std::vector<Expr> kids);
    static Expr product(std::vector<Expr> kids);
    static Expr scaled(double c, Expr kid);
};

// Parses the CLI mini-language, e.g. "ind(0:1)*powabs(-0.5) + const(2)".
// Atoms: const(c), powabs(alpha[,axis]), powrho(alpha), ind(lo:hi[,lo:hi...]),
// scale(c); combined with '*' and '+'. PowRho terms take their exponents from
// the supplied anisotropy.
Expr parse_expr(const std::string& text, const Anisotropy& a);

// Piecewise-constant field with `pieces` uniform steps along axis 0, values
// drawn uniformly from [0, 1) by a fixed-seed generator. Deterministic and
// resolution-independent, which makes it suitable for refinement studies.
Expr random_step_field(const Box& domain, std::size_t pieces, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Grid functions
// ---------------------------------------------------------------------------

// Uniform cell-centered grid sampling of a scalar function on a box domain.
// Sample i along an axis sits at lo + (i + 1/2) * cell_size; values are stored
// row-major with the last axis fastest.
struct GridFunction {
    Box domain;
    std::vector<std::size_t> shape;
    std::vector<double> values;

    GridFunction() = default;
    GridFunction(Box domain, std::vector<std::size_t> shape);  // zero-filled

    std::size_t dim() const { return shape.size(); }
    std::size_t size() const { return values.size(); }
    double cell_size(std::size_t axis) const { return cell_size_[axis]; }
    double cell_volume() const { return cell_volume_; }
    std::size_t stride(std::size_t axis) const { return strides_[axis]; }

    double center(std::size_t axis, std::size_t i) const {
        return domain.lo[axis] + (static_cast<double>(i) + 0.5) * cell_size_[axis];
    }
    std::vector<double> center(std::size_t flat) const;
    std::size_t flat_index(std::span<const std::size_t> idx) const;
    std::vector<std::size_t> multi_index(std::size_t flat) const;

    GridFunction transformed(const std::function<double(double)>& fn) const;

  private:
    std::vector<double> cell_size_;
    double cell_volume_ = 0.0;
    std::vector<std::size_t> strides_;
    friend GridFunction combine(const GridFunction&, const GridFunction&,
                                const std::function<double(double, double)>&);
};

// Pointwise sampling of an expression; throws on non-finite samples, naming
// the offending point (this is what rejects grids with a cell center on a
// singularity).
GridFunction sample(const Expr& e, const Box& domain, std::vector<std::size_t> shape);

// Pointwise combination of two grid functions on identical geometry.
GridFunction combine(const GridFunction& f, const GridFunction& g,
                     const std::function<double(double, double)>& fn);

// Inclusive index range along one axis; empty when hi < lo.
struct IndexRange {
    std::ptrdiff_t lo = 0;
    std::ptrdiff_t hi = -1;
    bool empty() const { return hi < lo; }
    std::size_t count() const { return empty() ? 0 : static_cast<std::size_t>(hi - lo + 1); }
};

// Snap-to-center rule: the cells whose centers lie in [edge_lo, edge_hi],
// clamped to the domain. Every box computation in the project goes through
// this one function so that discrete identities hold exactly.
IndexRange cells_in(const GridFunction& g, std::size_t axis, double edge_lo, double edge_hi);

// Per-axis snap ranges of a parallelepiped (intersected with the domain).
std::vector<IndexRange> ranges_in(const GridFunction& g, const Parallelepiped& e);

std::size_t range_cell_count(std::span<const IndexRange> ranges);

// ---------------------------------------------------------------------------
// Summed tables (n-dimensional prefix sums)
// ---------------------------------------------------------------------------

// Inclusion-exclusion table over the padded index lattice. Accumulation is in
// long double so that large grids keep box sums accurate to ~1e-15 relative.
// Lookup counting is exposed so tests can assert the O(1)-per-query property
// structurally.
class SummedTable {
  public:
    static SummedTable build(const GridFunction& g);
    static SummedTable build(const GridFunction& g, const std::function<double(double)>& fn);

    // Raw sum of (transformed) samples with multi-index in `ranges`
    // (not scaled by cell volume).
    double cell_sum(std::span<const IndexRange> ranges) const;

    std::uint64_t lookup_count() const { return lookups_.load(std::memory_order_relaxed); }
    void reset_lookup_count() const { lookups_.store(0, std::memory_order_relaxed); }

    SummedTable(SummedTable&& other) noexcept;
    SummedTable& operator=(SummedTable&& other) noexcept;
    SummedTable(const SummedTable&) = delete;
    SummedTable& operator=(const SummedTable&) = delete;

  private:
    SummedTable() = default;
    std::vector<std::size_t> padded_shape_;
    std::vector<std::size_t> strides_;
    std::vector<long double> table_;
    mutable std::atomic<std::uint64_t> lookups_{0};
};

// Calls fn(flat_index) for every cell whose multi-index lies in `ranges`
// (no-op when any range is empty). Row-major order, last axis fastest.
template <class Fn>
void visit_cells(const GridFunction& g, std::span<const IndexRange> ranges, Fn&& fn) {
    const std::size_t n = g.dim();
    for (const IndexRange& r : ranges)
        if (r.empty()) return;
    std::vector<std::size_t> idx(n);
    std::size_t flat = 0;
    for (std::size_t axis = 0; axis < n; ++axis) {
        idx[axis] = static_cast<std::size_t>(ranges[axis].lo);
        flat += idx[axis] * g.stride(axis);
    }
    for (;;) {
        fn(flat);
        std::size_t axis = n;
        while (axis-- > 0) {
            if (idx[axis] < static_cast<std::size_t>(ranges[axis].hi)) {
                ++idx[axis];
                flat += g.stride(axis);
                break;
            }
            flat -= (idx[axis] - static_cast<std::size_t>(ranges[axis].lo)) * g.stride(axis);
            idx[axis] = static_cast<std::size_t>(ranges[axis].lo);
            if (axis == 0) return;
        }
    }
}

// Integral of the tabulated samples over E (sum of included samples times the
// cell volume). Throws when E misses every cell center.
double box_sum(const SummedTable& t, const GridFunction& g, const Parallelepiped& e);

// Mean of the tabulated samples over the cells included in E.
double box_average(const SummedTable& t, const GridFunction& g, const Parallelepiped& e);

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

// CSV: a '#' header carrying domain and shape, then one value per line in
// row-major order, printed with enough digits to round-trip bit-exactly.
void write_grid_csv(const std::filesystem::path& path, const GridFunction& g);
GridFunction read_grid_csv(const std::filesystem::path& path);

nlohmann::json grid_to_json(const GridFunction& g);
GridFunction grid_from_json(const nlohmann::json& j);
void write_grid_json(const std::filesystem::path& path, const GridFunction& g);
GridFunction read_grid_json(const std::filesystem::path& path);

// Write-then-rename so partial output never lands at the target path.
void atomic_write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace aniso
