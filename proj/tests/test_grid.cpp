#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <random>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"

using namespace aniso;

namespace {

GridFunction random_grid(Box domain, std::vector<std::size_t> shape, std::uint64_t seed) {
    GridFunction g(std::move(domain), std::move(shape));
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (double& v : g.values) v = u(rng);
    return g;
}

}  // namespace

TEST_CASE("box construction and volume") {
    const Box b({-1.0, 0.0}, {1.0, 3.0});
    CHECK(b.dim() == 2);
    CHECK(b.length(1) == doctest::Approx(3.0));
    CHECK(b.volume() == doctest::Approx(6.0));
    CHECK_THROWS_AS(Box({0.0}, {0.0}), std::invalid_argument);  // empty extent
    const double in[2] = {0.0, 1.5}, out[2] = {0.0, 3.5};
    CHECK(b.contains(in));
    CHECK(!b.contains(out));
}

TEST_CASE("grid geometry: centers, strides, indexing") {
    const GridFunction g(Box({0.0, -1.0}, {1.0, 1.0}), {4, 8});
    CHECK(g.size() == 32);
    CHECK(g.cell_size(0) == doctest::Approx(0.25));
    CHECK(g.cell_size(1) == doctest::Approx(0.25));
    CHECK(g.cell_volume() == doctest::Approx(0.0625));
    CHECK(g.center(0, 0) == doctest::Approx(0.125));
    CHECK(g.center(1, 7) == doctest::Approx(0.875));
    // last axis fastest
    CHECK(g.stride(1) == 1);
    CHECK(g.stride(0) == 8);
    const std::size_t idx[2] = {2, 3};
    CHECK(g.flat_index(idx) == 19);
    const auto mi = g.multi_index(19);
    CHECK(mi[0] == 2);
    CHECK(mi[1] == 3);
    const auto c = g.center(19);
    CHECK(c[0] == doctest::Approx(g.center(0, 2)));
    CHECK(c[1] == doctest::Approx(g.center(1, 3)));
}

TEST_CASE("snap rule: centers in the closed slab, clamped to the domain") {
    const GridFunction g(Box({0.0}, {1.0}), {8});  // centers 0.0625, 0.1875, ..., 0.9375
    const IndexRange r = cells_in(g, 0, 0.24, 0.76);
    CHECK(r.lo == 2);
    CHECK(r.hi == 5);
    // boundary-inclusive on both sides
    const IndexRange re = cells_in(g, 0, 0.0625, 0.9375);
    CHECK(re.lo == 0);
    CHECK(re.hi == 7);
    // clamped
    const IndexRange rc = cells_in(g, 0, -5.0, 5.0);
    CHECK(rc.lo == 0);
    CHECK(rc.hi == 7);
    // between two adjacent centers: empty
    CHECK(cells_in(g, 0, 0.26, 0.30).empty());
    CHECK(cells_in(g, 0, 0.9, 0.2).empty());
    CHECK(range_cell_count(std::vector<IndexRange>{r}) == 4);
}

TEST_CASE("ranges_in intersects a parallelepiped with the lattice") {
    const Anisotropy a({1.0, 2.0});
    const GridFunction g(Box({-1.0, -1.0}, {1.0, 1.0}), {8, 8});
    const Parallelepiped e({0.0, 0.0}, 0.5, a);  // half widths 0.5 and 0.25
    const auto rs = ranges_in(g, e);
    // centers: -0.875 + 0.25k; |x| <= 0.5 keeps k = 2..5, |y| <= 0.25 keeps 3..4
    CHECK(rs[0].lo == 2);
    CHECK(rs[0].hi == 5);
    CHECK(rs[1].lo == 3);
    CHECK(rs[1].hi == 4);
    CHECK(range_cell_count(rs) == 8);
}

TEST_CASE("summed table equals naive sums and costs 2^n lookups per query") {
    const GridFunction g = random_grid(Box({0.0, 0.0, 0.0}, {1.0, 2.0, 3.0}), {7, 6, 5}, 99);
    const SummedTable t = SummedTable::build(g);
    std::mt19937_64 rng(4);
    std::uniform_int_distribution<int> u0(0, 6), u1(0, 5), u2(0, 4);
    t.reset_lookup_count();
    std::uint64_t queries = 0;
    for (int it = 0; it < 100; ++it) {
        const auto draw = [&](auto& u) {
            const int x = u(rng), y = u(rng);
            return IndexRange{std::min(x, y), std::max(x, y)};
        };
        IndexRange r0 = draw(u0);
        IndexRange r1 = draw(u1);
        IndexRange r2 = draw(u2);
        const std::vector<IndexRange> rs{r0, r1, r2};
        double naive = 0.0;
        visit_cells(g, rs, [&](std::size_t j) { naive += g.values[j]; });
        CHECK(t.cell_sum(rs) == doctest::Approx(naive).epsilon(1e-12));
        ++queries;
        CHECK(t.lookup_count() == queries * 8);  // 2^3 corners, independent of box size
    }
}

TEST_CASE("summed table with a transform") {
    const GridFunction g = random_grid(Box({0.0}, {1.0}), {64}, 123);
    const SummedTable t = SummedTable::build(g, [](double v) { return v * v; });
    const std::vector<IndexRange> rs{IndexRange{10, 20}};
    double naive = 0.0;
    for (std::size_t j = 10; j <= 20; ++j) naive += g.values[j] * g.values[j];
    CHECK(t.cell_sum(rs) == doctest::Approx(naive).epsilon(1e-13));
}

TEST_CASE("visit_cells enumerates row-major and skips empty ranges") {
    const GridFunction g(Box({0.0, 0.0}, {1.0, 1.0}), {4, 4});
    std::vector<std::size_t> seen;
    const std::vector<IndexRange> rs{IndexRange{1, 2}, IndexRange{0, 1}};
    visit_cells(g, rs, [&](std::size_t j) { seen.push_back(j); });
    CHECK(seen == std::vector<std::size_t>{4, 5, 8, 9});
    seen.clear();
    const std::vector<IndexRange> empty{IndexRange{1, 2}, IndexRange{3, 2}};
    visit_cells(g, empty, [&](std::size_t j) { seen.push_back(j); });
    CHECK(seen.empty());
}

TEST_CASE("box averages through the snap rule") {
    const Anisotropy a({1.0});
    GridFunction g(Box({0.0}, {1.0}), {8});
    for (std::size_t i = 0; i < 8; ++i) g.values[i] = g.center(0, i);
    const SummedTable t = SummedTable::build(g);
    // symmetric window around 0.5 averages to exactly 0.5
    CHECK(box_average(t, g, Parallelepiped({0.5}, 0.3, a)) ==
          doctest::Approx(0.5).epsilon(1e-15));
    CHECK(box_sum(t, g, Parallelepiped({0.5}, 10.0, a)) ==
          doctest::Approx(0.5).epsilon(1e-15));  // whole-domain integral of x
    // a box that misses every center throws
    CHECK_THROWS_AS(box_average(t, g, Parallelepiped({0.26}, 0.03, a)), std::runtime_error);
}

TEST_CASE("expression parsing and evaluation") {
    const Anisotropy a({1.0, 2.0});
    const Expr e = parse_expr("const(2) + ind(0:1, -1:1) * powabs(-0.5)", a);
    const double x_in[2] = {0.25, 0.0};
    CHECK(e.eval(x_in) == doctest::Approx(2.0 + 2.0).epsilon(1e-14));  // 2 + 0.25^{-1/2}
    const double x_out[2] = {1.5, 0.0};
    CHECK(e.eval(x_out) == doctest::Approx(2.0).epsilon(1e-14));

    // flat lo,hi pairs are accepted too
    const Anisotropy a1({1.0});
    const Expr e2 = parse_expr("ind(0,1)*powabs(-0.5)", a1);
    const double p25[1] = {0.25};
    CHECK(e2.eval(p25) == doctest::Approx(2.0).epsilon(1e-14));

    // powrho matches the solver
    const Expr e3 = parse_expr("powrho(2)", a);
    const double pt[2] = {0.7, -1.1};
    CHECK(e3.eval(pt) ==
          doctest::Approx(std::pow(rho_quasi_norm(pt, a), 2.0)).epsilon(1e-12));

    CHECK_THROWS_AS(parse_expr("nope(1)", a), std::invalid_argument);
    CHECK_THROWS_AS(parse_expr("const(1) trailing", a), std::invalid_argument);
    // axis bounds are enforced at evaluation
    CHECK_THROWS_AS(parse_expr("powabs(-0.5, 7)", a).eval(pt), std::invalid_argument);
}

TEST_CASE("random step fields are pinned by the seed") {
    const Box domain = Box::interval(-2.0, 2.0);
    const Expr f1 = random_step_field(domain, 16, 42);
    const Expr f2 = random_step_field(domain, 16, 42);
    const Expr f3 = random_step_field(domain, 16, 43);
    const GridFunction g1 = sample(f1, domain, {256});
    const GridFunction g2 = sample(f2, domain, {256});
    const GridFunction g3 = sample(f3, domain, {256});
    CHECK(g1.values == g2.values);
    CHECK(g1.values != g3.values);
    for (double v : g1.values) {
        CHECK(v >= 0.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("sampling rejects cell centers on a singularity") {
    const Anisotropy a({1.0});
    const Expr f = parse_expr("powabs(-0.5)", a);
    // odd cell count puts a center exactly at 0
    CHECK_THROWS_AS(sample(f, Box::interval(-1.0, 1.0), {3}), std::domain_error);
    CHECK_NOTHROW(sample(f, Box::interval(-1.0, 1.0), {4}));
}

TEST_CASE("transform and combine") {
    const GridFunction g = random_grid(Box({0.0}, {1.0}), {32}, 8);
    const GridFunction h = g.transformed([](double v) { return 2.0 * v; });
    for (std::size_t i = 0; i < g.size(); ++i)
        CHECK(h.values[i] == doctest::Approx(2.0 * g.values[i]));
    const GridFunction s = combine(g, h, [](double x, double y) { return x + y; });
    CHECK(s.values[5] == doctest::Approx(3.0 * g.values[5]));
    const GridFunction other(Box({0.0}, {1.0}), {16});
    CHECK_THROWS_AS(combine(g, other, [](double x, double) { return x; }),
                    std::invalid_argument);
}

TEST_CASE("grid round-trips are bit exact") {
    const auto dir = std::filesystem::temp_directory_path() / "aniso_grid_io";
    std::filesystem::create_directories(dir);
    const GridFunction g =
        random_grid(Box({-1.0, 0.0}, {1.0, 0.125}), {6, 10}, 2024);
    write_grid_csv(dir / "g.csv", g);
    const GridFunction rc = read_grid_csv(dir / "g.csv");
    CHECK(rc.shape == g.shape);
    CHECK(rc.domain.lo == g.domain.lo);
    CHECK(rc.domain.hi == g.domain.hi);
    CHECK(rc.values == g.values);  // exact doubles
    write_grid_json(dir / "g.json", g);
    const GridFunction rj = read_grid_json(dir / "g.json");
    CHECK(rj.values == g.values);
    CHECK(rj.domain.lo == g.domain.lo);
    std::filesystem::remove_all(dir);
}
