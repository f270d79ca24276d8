#include "aniso/grid.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace aniso {

namespace {

// Shortest-exact formatting for doubles so text round-trips are bit-identical.
std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& s) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::invalid_argument("could not parse number: '" + s + "'");
    }
    if (pos != s.size()) throw std::invalid_argument("trailing characters in number: '" + s + "'");
    return v;
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string point_to_string(std::span<const double> x) {
    std::string s = "(";
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (i) s += ", ";
        s += format_double(x[i]);
    }
    return s + ")";
}

}  // namespace

// ---------------------------------------------------------------------------
// Box
// ---------------------------------------------------------------------------

Box::Box(std::vector<double> lo_, std::vector<double> hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
    if (lo.empty() || lo.size() != hi.size())
        throw std::invalid_argument("box: bounds must be nonempty and of equal dimension");
    for (std::size_t i = 0; i < lo.size(); ++i) {
        if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i]))
            throw std::invalid_argument("box: require finite lo < hi on every axis");
    }
}

double Box::volume() const {
    double v = 1.0;
    for (std::size_t i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
    return v;
}

bool Box::contains(std::span<const double> x) const {
    if (x.size() != lo.size()) throw std::invalid_argument("box: point dimension mismatch");
    for (std::size_t i = 0; i < lo.size(); ++i)
        if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Expr
// ---------------------------------------------------------------------------

double Expr::eval(std::span<const double> x) const {
    switch (kind) {
        case ExprKind::Const:
            return value;
        case ExprKind::PowAbs:
            if (static_cast<std::size_t>(axis) >= x.size())
                throw std::invalid_argument("powabs: axis out of range");
            return std::pow(std::fabs(x[axis]), value);
        case ExprKind::PowRho:
            return std::pow(rho_quasi_norm(x, std::span<const double>(rho_exponents)), value);
        case ExprKind::Indicator:
            return box.contains(x) ? 1.0 : 0.0;
        case ExprKind::Sum: {
            double s = 0.0;
            for (const Expr& k : kids) s += k.eval(x);
            return s;
        }
        case ExprKind::Product: {
            double p = 1.0;
            for (const Expr& k : kids) p *= k.eval(x);
            return p;
        }
        case ExprKind::Scale:
            return value * kids[0].eval(x);
    }
    throw std::logic_error("expr: unknown kind");
}

Expr Expr::constant(double c) {
    Expr e;
    e.kind = ExprKind::Const;
    e.value = c;
    return e;
}

Expr Expr::pow_abs(double alpha, int axis) {
    Expr e;
    e.kind = ExprKind::PowAbs;
    e.value = alpha;
    e.axis = axis;
    return e;
}

Expr Expr::pow_rho(double alpha, const Anisotropy& a) {
    Expr e;
    e.kind = ExprKind::PowRho;
    e.value = alpha;
    e.rho_exponents = a.a;
    return e;
}

Expr Expr::indicator(Box b) {
    Expr e;
    e.kind = ExprKind::Indicator;
    e.box = std::move(b);
    return e;
}

Expr Expr::sum(std::vector<Expr> kids) {
    Expr e;
    e.kind = ExprKind::Sum;
    e.kids = std::move(kids);
    return e;
}

Expr Expr::product(std::vector<Expr> kids) {
    Expr e;
    e.kind = ExprKind::Product;
    e.kids = std::move(kids);
    return e;
}

Expr Expr::scaled(double c, Expr kid) {
    Expr e;
    e.kind = ExprKind::Scale;
    e.value = c;
    e.kids.push_back(std::move(kid));
    return e;
}

namespace {

// Recursive-descent parser for the function mini-language. Grammar:
//   sum     := product ('+' product)*
//   product := atom ('*' atom)*
//   atom    := name '(' arg (',' arg)* ')'
struct ExprParser {
    const std::string& text;
    const Anisotropy& a;
    std::size_t pos = 0;

    void skip_ws() {
        while (pos < text.size() && std::isspace(static_cast<unsigned char>(text[pos]))) ++pos;
    }

    bool eat(char c) {
        skip_ws();
        if (pos < text.size() && text[pos] == c) {
            ++pos;
            return true;
        }
        return false;
    }

    [[noreturn]] void fail(const std::string& what) {
        throw std::invalid_argument("function spec: " + what + " at position " +
                                    std::to_string(pos) + " in '" + text + "'");
    }

    Expr parse_sum() {
        std::vector<Expr> terms;
        terms.push_back(parse_product());
        while (eat('+')) terms.push_back(parse_product());
        if (terms.size() == 1) return std::move(terms[0]);
        return Expr::sum(std::move(terms));
    }

    Expr parse_product() {
        std::vector<Expr> factors;
        factors.push_back(parse_atom());
        while (eat('*')) factors.push_back(parse_atom());
        if (factors.size() == 1) return std::move(factors[0]);
        return Expr::product(std::move(factors));
    }

    Expr parse_atom() {
        skip_ws();
        std::size_t start = pos;
        while (pos < text.size() && (std::isalnum(static_cast<unsigned char>(text[pos])) || text[pos] == '_'))
            ++pos;
        const std::string name = text.substr(start, pos - start);
        if (name.empty()) fail("expected an atom name");
        if (!eat('(')) fail("expected '(' after '" + name + "'");
        std::vector<std::string> args;
        std::string cur;
        int depth = 1;
        while (pos < text.size() && depth > 0) {
            char c = text[pos++];
            if (c == '(') ++depth;
            if (c == ')') {
                --depth;
                if (depth == 0) break;
            }
            if (c == ',' && depth == 1) {
                args.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        if (depth != 0) fail("unbalanced parentheses");
        args.push_back(cur);
        return make_atom(name, args);
    }

    Expr make_atom(const std::string& name, const std::vector<std::string>& args) {
        auto strip = [](std::string s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
            return s;
        };
        if (name == "const" || name == "scale") {
            // scale(c) as an atom is just a constant factor in its product.
            if (args.size() != 1) fail(name + " takes one argument");
            return Expr::constant(parse_double(strip(args[0])));
        }
        if (name == "powabs") {
            if (args.size() != 1 && args.size() != 2) fail("powabs takes alpha[, axis]");
            double alpha = parse_double(strip(args[0]));
            int axis = args.size() == 2 ? static_cast<int>(parse_double(strip(args[1]))) : 0;
            return Expr::pow_abs(alpha, axis);
        }
        if (name == "powrho") {
            if (args.size() != 1) fail("powrho takes one argument");
            return Expr::pow_rho(parse_double(strip(args[0])), a);
        }
        if (name == "ind") {
            // Either per-axis "lo:hi" tokens, or a flat even-length list of
            // numbers pairing up as lo,hi per axis.
            std::vector<double> lo, hi;
            bool colon = false;
            for (const auto& arg : args)
                if (arg.find(':') != std::string::npos) colon = true;
            if (colon) {
                for (const auto& arg : args) {
                    auto parts = split(strip(arg), ':');
                    if (parts.size() != 2) fail("ind interval must be lo:hi");
                    lo.push_back(parse_double(strip(parts[0])));
                    hi.push_back(parse_double(strip(parts[1])));
                }
            } else {
                if (args.size() % 2 != 0) fail("ind needs an even count of bounds");
                for (std::size_t i = 0; i < args.size(); i += 2) {
                    lo.push_back(parse_double(strip(args[i])));
                    hi.push_back(parse_double(strip(args[i + 1])));
                }
            }
            return Expr::indicator(Box(std::move(lo), std::move(hi)));
        }
        fail("unknown atom '" + name + "'");
    }
};

}  // namespace

Expr parse_expr(const std::string& text, const Anisotropy& a) {
    ExprParser p{text, a};
    Expr e = p.parse_sum();
    p.skip_ws();
    if (p.pos != text.size()) p.fail("unexpected trailing input");
    return e;
}

Expr random_step_field(const Box& domain, std::size_t pieces, std::uint64_t seed) {
    if (pieces == 0) throw std::invalid_argument("random_step_field: pieces must be positive");
    std::mt19937_64 gen(seed);
    // Explicit 53-bit mapping rather than std::uniform_real_distribution so the
    // values are pinned by the seed alone, independent of the standard library.
    auto uniform = [&gen]() {
        return static_cast<double>(gen() >> 11) * 0x1.0p-53;
    };
    const double len = domain.length(0) / static_cast<double>(pieces);
    std::vector<Expr> steps;
    steps.reserve(pieces);
    for (std::size_t k = 0; k < pieces; ++k) {
        Box piece = domain;
        piece.lo[0] = domain.lo[0] + static_cast<double>(k) * len;
        piece.hi[0] = (k + 1 == pieces) ? domain.hi[0] : domain.lo[0] + static_cast<double>(k + 1) * len;
        steps.push_back(Expr::scaled(uniform(), Expr::indicator(std::move(piece))));
    }
    return Expr::sum(std::move(steps));
}

// ---------------------------------------------------------------------------
// GridFunction
// ---------------------------------------------------------------------------

GridFunction::GridFunction(Box dom, std::vector<std::size_t> shp)
    : domain(std::move(dom)), shape(std::move(shp)) {
    if (shape.empty() || shape.size() != domain.dim())
        throw std::invalid_argument("grid: shape/domain dimension mismatch");
    std::size_t total = 1;
    for (std::size_t n : shape) {
        if (n == 0) throw std::invalid_argument("grid: zero-length axis");
        if (total > (std::size_t{1} << 28) / n)
            throw std::invalid_argument("grid: too many cells");
        total *= n;
    }
    cell_size_.resize(shape.size());
    cell_volume_ = 1.0;
    for (std::size_t i = 0; i < shape.size(); ++i) {
        cell_size_[i] = domain.length(i) / static_cast<double>(shape[i]);
        cell_volume_ *= cell_size_[i];
    }
    strides_.assign(shape.size(), 1);
    for (std::size_t i = shape.size(); i-- > 1;)
        strides_[i - 1] = strides_[i] * shape[i];
    values.assign(total, 0.0);
}

std::vector<double> GridFunction::center(std::size_t flat) const {
    std::vector<double> x(dim());
    for (std::size_t axis = 0; axis < dim(); ++axis) {
        const std::size_t idx = (flat / strides_[axis]) % shape[axis];
        x[axis] = center(axis, idx);
    }
    return x;
}

std::size_t GridFunction::flat_index(std::span<const std::size_t> idx) const {
    std::size_t f = 0;
    for (std::size_t axis = 0; axis < dim(); ++axis) {
        if (idx[axis] >= shape[axis]) throw std::out_of_range("grid: index out of range");
        f += idx[axis] * strides_[axis];
    }
    return f;
}

std::vector<std::size_t> GridFunction::multi_index(std::size_t flat) const {
    std::vector<std::size_t> idx(dim());
    for (std::size_t axis = 0; axis < dim(); ++axis)
        idx[axis] = (flat / strides_[axis]) % shape[axis];
    return idx;
}

GridFunction GridFunction::transformed(const std::function<double(double)>& fn) const {
    GridFunction out = *this;
    for (double& v : out.values) v = fn(v);
    return out;
}

GridFunction sample(const Expr& e, const Box& domain, std::vector<std::size_t> shape) {
    GridFunction g(domain, std::move(shape));
    const std::size_t n = g.dim();
    std::vector<std::size_t> idx(n, 0);
    std::vector<double> x(n);
    for (std::size_t axis = 0; axis < n; ++axis) x[axis] = g.center(axis, 0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        const double v = e.eval(x);
        if (!std::isfinite(v))
            throw std::domain_error("sample: non-finite value at cell center " + point_to_string(x) +
                                    " (singularity on the grid?)");
        g.values[flat] = v;
        // odometer increment, last axis fastest
        for (std::size_t axis = n; axis-- > 0;) {
            if (++idx[axis] < g.shape[axis]) {
                x[axis] = g.center(axis, idx[axis]);
                break;
            }
            idx[axis] = 0;
            x[axis] = g.center(axis, 0);
        }
    }
    return g;
}

GridFunction combine(const GridFunction& f, const GridFunction& g,
                     const std::function<double(double, double)>& fn) {
    if (f.shape != g.shape || f.domain.lo != g.domain.lo || f.domain.hi != g.domain.hi)
        throw std::invalid_argument("combine: grids must share domain and shape");
    GridFunction out = f;
    for (std::size_t i = 0; i < out.values.size(); ++i)
        out.values[i] = fn(f.values[i], g.values[i]);
    return out;
}

// ---------------------------------------------------------------------------
// Snap rule
// ---------------------------------------------------------------------------

IndexRange cells_in(const GridFunction& g, std::size_t axis, double edge_lo, double edge_hi) {
    const auto n = static_cast<std::ptrdiff_t>(g.shape[axis]);
    const double h = g.cell_size(axis);
    const double lo0 = g.domain.lo[axis];

    // First guess from the affine map, then settle ties against the exact
    // center formula so that this matches any direct |c - x| <= hw loop.
    auto center = [&](std::ptrdiff_t j) {
        return lo0 + (static_cast<double>(j) + 0.5) * h;
    };
    std::ptrdiff_t jl = static_cast<std::ptrdiff_t>(std::ceil((edge_lo - lo0) / h - 0.5));
    jl = std::max<std::ptrdiff_t>(0, std::min(jl, n));
    while (jl > 0 && center(jl - 1) >= edge_lo) --jl;
    while (jl < n && center(jl) < edge_lo) ++jl;

    std::ptrdiff_t jh = static_cast<std::ptrdiff_t>(std::floor((edge_hi - lo0) / h - 0.5));
    jh = std::max<std::ptrdiff_t>(-1, std::min(jh, n - 1));
    while (jh + 1 < n && center(jh + 1) <= edge_hi) ++jh;
    while (jh >= 0 && center(jh) > edge_hi) --jh;

    return IndexRange{jl, jh};
}

std::vector<IndexRange> ranges_in(const GridFunction& g, const Parallelepiped& e) {
    if (e.dim() != g.dim())
        throw std::invalid_argument("ranges_in: box/grid dimension mismatch");
    std::vector<IndexRange> r(g.dim());
    for (std::size_t axis = 0; axis < g.dim(); ++axis)
        r[axis] = cells_in(g, axis, e.lo(axis), e.hi(axis));
    return r;
}

std::size_t range_cell_count(std::span<const IndexRange> ranges) {
    std::size_t m = 1;
    for (const IndexRange& r : ranges) {
        if (r.empty()) return 0;
        m *= r.count();
    }
    return m;
}

// ---------------------------------------------------------------------------
// SummedTable
// ---------------------------------------------------------------------------

SummedTable SummedTable::build(const GridFunction& g) {
    return build(g, [](double v) { return v; });
}

SummedTable SummedTable::build(const GridFunction& g, const std::function<double(double)>& fn) {
    SummedTable t;
    t.padded_shape_.resize(g.dim());
    for (std::size_t i = 0; i < g.dim(); ++i) t.padded_shape_[i] = g.shape[i] + 1;
    t.strides_.assign(g.dim(), 1);
    for (std::size_t i = g.dim(); i-- > 1;)
        t.strides_[i - 1] = t.strides_[i] * t.padded_shape_[i];
    std::size_t total = t.strides_[0] * t.padded_shape_[0];
    t.table_.assign(total, 0.0L);

    // Scatter samples to padded offsets (index + 1 on every axis).
    std::vector<std::size_t> idx(g.dim(), 0);
    for (std::size_t flat = 0; flat < g.size(); ++flat) {
        std::size_t off = 0;
        for (std::size_t axis = 0; axis < g.dim(); ++axis)
            off += (idx[axis] + 1) * t.strides_[axis];
        t.table_[off] = fn(g.values[flat]);
        for (std::size_t axis = g.dim(); axis-- > 0;) {
            if (++idx[axis] < g.shape[axis]) break;
            idx[axis] = 0;
        }
    }

    // Running sums along each axis in turn turn the scatter into prefix sums.
    for (std::size_t axis = 0; axis < g.dim(); ++axis) {
        const std::size_t stride = t.strides_[axis];
        for (std::size_t j = 0; j < total; ++j) {
            const std::size_t k = (j / stride) % t.padded_shape_[axis];
            if (k >= 1) t.table_[j] += t.table_[j - stride];
        }
    }
    return t;
}

SummedTable::SummedTable(SummedTable&& other) noexcept
    : padded_shape_(std::move(other.padded_shape_)),
      strides_(std::move(other.strides_)),
      table_(std::move(other.table_)),
      lookups_(other.lookups_.load(std::memory_order_relaxed)) {}

SummedTable& SummedTable::operator=(SummedTable&& other) noexcept {
    padded_shape_ = std::move(other.padded_shape_);
    strides_ = std::move(other.strides_);
    table_ = std::move(other.table_);
    lookups_.store(other.lookups_.load(std::memory_order_relaxed), std::memory_order_relaxed);
    return *this;
}

double SummedTable::cell_sum(std::span<const IndexRange> ranges) const {
    const std::size_t n = padded_shape_.size();
    if (ranges.size() != n) throw std::invalid_argument("cell_sum: dimension mismatch");
    for (const IndexRange& r : ranges)
        if (r.empty()) return 0.0;
    // Inclusion-exclusion over the 2^n corners of the padded table.
    long double acc = 0.0L;
    const auto corners = std::size_t{1} << n;
    for (std::size_t mask = 0; mask < corners; ++mask) {
        std::size_t off = 0;
        int sign = 1;
        for (std::size_t axis = 0; axis < n; ++axis) {
            if (mask & (std::size_t{1} << axis)) {
                off += static_cast<std::size_t>(ranges[axis].lo) * strides_[axis];
                sign = -sign;
            } else {
                off += static_cast<std::size_t>(ranges[axis].hi + 1) * strides_[axis];
            }
        }
        acc += sign > 0 ? table_[off] : -table_[off];
    }
    lookups_.fetch_add(corners, std::memory_order_relaxed);
    return static_cast<double>(acc);
}

double box_sum(const SummedTable& t, const GridFunction& g, const Parallelepiped& e) {
    const auto ranges = ranges_in(g, e);
    if (range_cell_count(ranges) == 0)
        throw std::runtime_error("box_sum: box contains no cell centers");
    return t.cell_sum(ranges) * g.cell_volume();
}

double box_average(const SummedTable& t, const GridFunction& g, const Parallelepiped& e) {
    const auto ranges = ranges_in(g, e);
    const std::size_t m = range_cell_count(ranges);
    if (m == 0) throw std::runtime_error("box_average: box contains no cell centers");
    return t.cell_sum(ranges) / static_cast<double>(m);
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << text;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

void write_grid_csv(const std::filesystem::path& path, const GridFunction& g) {
    std::ostringstream out;
    out << "# domain=";
    for (std::size_t i = 0; i < g.dim(); ++i) {
        if (i) out << ',';
        out << format_double(g.domain.lo[i]) << ':' << format_double(g.domain.hi[i]);
    }
    out << " shape=";
    for (std::size_t i = 0; i < g.dim(); ++i) {
        if (i) out << ',';
        out << g.shape[i];
    }
    out << '\n';
    for (double v : g.values) out << format_double(v) << '\n';
    atomic_write_text(path, out.str());
}

GridFunction read_grid_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string header;
    std::getline(in, header);
    if (header.rfind("#", 0) != 0)
        throw std::runtime_error(path.string() + ": missing '#' header line");

    auto field = [&header, &path](const std::string& key) {
        const auto at = header.find(key + "=");
        if (at == std::string::npos)
            throw std::runtime_error(path.string() + ": header lacks '" + key + "='");
        auto end = header.find(' ', at);
        if (end == std::string::npos) end = header.size();
        return header.substr(at + key.size() + 1, end - at - key.size() - 1);
    };

    std::vector<double> lo, hi;
    for (const std::string& tok : split(field("domain"), ',')) {
        auto parts = split(tok, ':');
        if (parts.size() != 2) throw std::runtime_error(path.string() + ": bad domain token " + tok);
        lo.push_back(parse_double(parts[0]));
        hi.push_back(parse_double(parts[1]));
    }
    std::vector<std::size_t> shape;
    for (const std::string& tok : split(field("shape"), ','))
        shape.push_back(static_cast<std::size_t>(std::stoull(tok)));

    GridFunction g(Box(std::move(lo), std::move(hi)), std::move(shape));
    for (std::size_t i = 0; i < g.size(); ++i) {
        if (!(in >> g.values[i]))
            throw std::runtime_error(path.string() + ": expected " + std::to_string(g.size()) +
                                     " values, got " + std::to_string(i));
    }
    double extra;
    if (in >> extra) throw std::runtime_error(path.string() + ": more values than shape implies");
    return g;
}

nlohmann::json grid_to_json(const GridFunction& g) {
    nlohmann::json j;
    auto& dom = j["domain"] = nlohmann::json::array();
    for (std::size_t i = 0; i < g.dim(); ++i)
        dom.push_back({g.domain.lo[i], g.domain.hi[i]});
    j["shape"] = g.shape;
    j["values"] = g.values;
    return j;
}

GridFunction grid_from_json(const nlohmann::json& j) {
    std::vector<double> lo, hi;
    for (const auto& pair : j.at("domain")) {
        lo.push_back(pair.at(0).get<double>());
        hi.push_back(pair.at(1).get<double>());
    }
    GridFunction g(Box(std::move(lo), std::move(hi)), j.at("shape").get<std::vector<std::size_t>>());
    auto vals = j.at("values").get<std::vector<double>>();
    if (vals.size() != g.size())
        throw std::runtime_error("grid json: values length does not match shape");
    g.values = std::move(vals);
    return g;
}

void write_grid_json(const std::filesystem::path& path, const GridFunction& g) {
    atomic_write_text(path, grid_to_json(g).dump(2) + "\n");
}

GridFunction read_grid_json(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    return grid_from_json(j);
}

}  // namespace aniso
