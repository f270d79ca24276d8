// Batch front-end for the anisotropic Morrey toolkit: grid transforms, norms,
// weight characteristics, verification checks, and SVG line plots.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "aniso/geometry.hpp"
#include "aniso/grid.hpp"
#include "aniso/norms.hpp"
#include "aniso/operators.hpp"
#include "aniso/svg.hpp"
#include "aniso/verify.hpp"
#include "aniso/weights.hpp"

using namespace aniso;

namespace {

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos <= csv.size()) {
        const std::size_t next = csv.find(',', pos);
        const std::string tok = csv.substr(pos, next == std::string::npos ? next : next - pos);
        if (tok.empty()) throw CLI::ValidationError("empty entry in list '" + csv + "'");
        std::size_t used = 0;
        out.push_back(std::stod(tok, &used));
        if (used != tok.size()) throw CLI::ValidationError("bad number '" + tok + "'");
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return out;
}

std::vector<std::size_t> parse_shape(const std::string& csv) {
    std::vector<std::size_t> out;
    for (double v : parse_doubles(csv)) {
        if (v < 1 || v != std::floor(v))
            throw CLI::ValidationError("shape entries must be positive integers");
        out.push_back(static_cast<std::size_t>(v));
    }
    return out;
}

// "lo:hi,lo:hi,..."
Box parse_domain(const std::string& text) {
    std::vector<double> lo, hi;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t next = text.find(',', pos);
        const std::string tok =
            text.substr(pos, next == std::string::npos ? next : next - pos);
        const std::size_t colon = tok.find(':');
        if (colon == std::string::npos)
            throw CLI::ValidationError("domain axis must be lo:hi, got '" + tok + "'");
        lo.push_back(std::stod(tok.substr(0, colon)));
        hi.push_back(std::stod(tok.substr(colon + 1)));
        if (next == std::string::npos) break;
        pos = next + 1;
    }
    return Box(std::move(lo), std::move(hi));
}

// shared grid-building flags
struct GridArgs {
    std::string a_csv = "1";
    std::string domain_text;
    std::string shape_text;

    Anisotropy anisotropy() const { return Anisotropy(parse_doubles(a_csv)); }
    Box domain() const { return parse_domain(domain_text); }
    std::vector<std::size_t> shape() const { return parse_shape(shape_text); }

    void attach(CLI::App* cmd) {
        cmd->add_option("--a", a_csv, "anisotropy vector, e.g. 1,2")->capture_default_str();
        cmd->add_option("--domain", domain_text, "axis ranges lo:hi[,lo:hi...]")->required();
        cmd->add_option("--shape", shape_text, "cells per axis, e.g. 4096 or 64,64")->required();
    }

    nlohmann::json echo() const {
        return {{"a", a_csv}, {"domain", domain_text}, {"shape", shape_text}};
    }
};

void write_grid(const std::filesystem::path& path, const GridFunction& g) {
    if (path.extension() == ".json")
        write_grid_json(path, g);
    else
        write_grid_csv(path, g);
}

GridFunction read_grid(const std::filesystem::path& path) {
    return path.extension() == ".json" ? read_grid_json(path) : read_grid_csv(path);
}

int cmd_maximal(const GridArgs& ga, const std::string& fn, const std::string& wspec,
                const std::string& op, double r, const std::string& sharp_mode,
                double ladder_q, std::size_t stride, double family_q,
                const std::string& out) {
    const Anisotropy a = ga.anisotropy();
    const Box domain = ga.domain();
    const GridFunction fs = sample(parse_expr(fn, a), domain, ga.shape());
    GridFunction result;
    if (op == "centered" || op == "r") {
        const ScaleLadder ladder = ScaleLadder::make_default(fs, a, ladder_q);
        result = op == "r" ? maximal_r(fs, r, a, ladder) : maximal(fs, a, ladder);
    } else if (op == "sharp") {
        const ScaleLadder ladder = ScaleLadder::make_default(fs, a, ladder_q);
        result = sharp_maximal(fs, a, ladder,
                               sharp_mode == "literal" ? SharpMode::Literal : SharpMode::Mean);
    } else if (op == "weighted") {
        const Weight w = Weight::parse(wspec, a);
        const GridFunction ws = weight_samples(w, domain, fs.shape);
        result = weighted_maximal(fs, ws, BoxFamily::make_default(ws, a, stride, family_q));
    } else if (op == "family") {
        result = family_maximal(fs, BoxFamily::make_default(fs, a, stride, family_q));
    } else {
        throw CLI::ValidationError("--op must be centered|r|sharp|weighted|family");
    }
    write_grid(out, result);
    double mx = 0.0;
    for (double v : result.values) mx = std::max(mx, v);
    std::printf("%s: wrote %zu cells to %s, max %.17g\n", op.c_str(), result.size(),
                out.c_str(), mx);
    return 0;
}

int cmd_norm(const GridArgs& ga, const std::string& type, double p, double kappa,
             const std::string& fn, const std::string& wspec, std::size_t stride,
             double family_q, bool as_json) {
    const Anisotropy a = ga.anisotropy();
    const Box domain = ga.domain();
    const GridFunction fs = sample(parse_expr(fn, a), domain, ga.shape());
    const Weight w = Weight::parse(wspec, a);
    const GridFunction ws = weight_samples(w, domain, fs.shape);
    nlohmann::json j;
    j["config"] = ga.echo();
    j["config"]["type"] = type;
    j["config"]["p"] = p;
    j["config"]["kappa"] = kappa;
    j["config"]["fn"] = fn;
    j["config"]["weight"] = w.spec();
    double value = 0.0;
    if (type == "lp") {
        value = lp_norm(fs, ws, p);
    } else if (type == "weak") {
        value = weak_lp_norm(fs, ws, p);
    } else if (type == "morrey") {
        const MorreyResult res =
            morrey_norm(fs, ws, MorreyParams(p, kappa),
                        BoxFamily::make_default(ws, a, stride, family_q));
        value = res.value;
        if (res.box) j["argmax_box"] = box_json(*res.box);
    } else {
        throw CLI::ValidationError("--type must be lp|weak|morrey");
    }
    j["value"] = value;
    if (as_json) {
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("%.17g\n", value);
        if (j.contains("argmax_box"))
            std::printf("argmax box: %s\n", j["argmax_box"].dump().c_str());
    }
    return 0;
}

int cmd_apconst(const GridArgs& ga, const std::string& wspec, double p, std::size_t stride,
                double family_q, bool as_json) {
    const Anisotropy a = ga.anisotropy();
    const Weight w = Weight::parse(wspec, a);
    const GridFunction ws = weight_samples(w, ga.domain(), ga.shape());
    const BoxFamily fam = BoxFamily::make_default(ws, a, stride, family_q);
    const double ap = (p > 1.0 ? ap_characteristic(ws, p, fam)
                               : a1_characteristic(ws, fam))
                          .characteristic;
    const double a1 = a1_characteristic(ws, fam).characteristic;
    const DoublingReport dr = doubling_constants(ws, fam);
    if (as_json) {
        nlohmann::json j;
        j["config"] = ga.echo();
        j["config"]["weight"] = w.spec();
        j["config"]["p"] = p;
        j["ap"] = ap;
        j["a1"] = a1;
        j["d"] = dr.d;
        j["d1"] = dr.d1;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("ap %.17g\na1 %.17g\nd %.17g\nd1 %.17g\n", ap, a1, dr.d, dr.d1);
    }
    return 0;
}

int cmd_verify(const std::string& check, std::uint64_t seed, const std::string& out) {
    const CheckReport r = run_check(check, seed);
    const nlohmann::json j = r.to_json();
    if (!out.empty())
        atomic_write_text(out, j.dump(2) + "\n");
    else
        std::cout << j.dump(2) << "\n";
    std::fprintf(stderr, "%s: %s (constant %.17g)\n", r.name.c_str(), r.status.c_str(),
                 r.constant);
    if (!r.passed()) {
        std::fprintf(stderr, "witness: %s\n", r.witness.dump().c_str());
        return 1;
    }
    return 0;
}

int cmd_suite(std::uint64_t seed, const std::string& out_dir) {
    const SuiteResult res = run_suite(seed, out_dir);
    for (const CheckReport& r : res.reports) {
        std::printf("%-28s %-10s %.17g\n", r.name.c_str(), r.status.c_str(), r.constant);
        if (!r.passed()) std::printf("  witness: %s\n", r.witness.dump().c_str());
    }
    std::printf("reports: %s/reports.json, %s/summary.csv\n", out_dir.c_str(), out_dir.c_str());
    return res.all_passed ? 0 : 1;
}

int cmd_plot(const std::vector<std::string>& grids, const std::string& history,
             const std::string& check, const std::string& key, const std::string& out,
             bool log_y, const std::string& title) {
    std::vector<PlotSeries> series;
    PlotOptions opt;
    opt.title = title;
    opt.log_y = log_y;
    if (!history.empty()) {
        if (check.empty())
            throw CLI::ValidationError("--history needs --check <name> to pick a report");
        std::ifstream in(history);
        if (!in) throw CLI::ValidationError("cannot open " + history);
        const nlohmann::json arr = nlohmann::json::parse(in);
        PlotSeries s;
        s.label = check + " " + key;
        for (const auto& rep : arr) {
            if (rep.value("name", "") != check) continue;
            double level = 0.0;
            for (const auto& h : rep["history"]) {
                if (!h.contains(key) || !h[key].is_number()) continue;
                s.x.push_back(level++);
                s.y.push_back(h[key].get<double>());
            }
        }
        if (s.x.empty())
            throw CLI::ValidationError("no history rows with numeric field '" + key +
                                       "' for '" + check + "' in " + history);
        opt.x_label = "refinement level";
        opt.y_label = key;
        series.push_back(std::move(s));
    }
    for (const std::string& path : grids) {
        const GridFunction g = read_grid(path);
        if (g.dim() != 1)
            throw CLI::ValidationError("plot --grid needs 1-D grids, got dim " +
                                       std::to_string(g.dim()));
        PlotSeries s;
        s.label = std::filesystem::path(path).stem().string();
        s.x.reserve(g.size());
        s.y = g.values;
        for (std::size_t i = 0; i < g.size(); ++i) s.x.push_back(g.center(0, i));
        opt.x_label = "x";
        series.push_back(std::move(s));
    }
    if (series.empty())
        throw CLI::ValidationError("plot needs --grid and/or --history inputs");
    write_svg(out, series, opt);
    std::printf("wrote %s (%zu series)\n", out.c_str(), series.size());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"anisotropic Morrey space toolkit"};
    app.require_subcommand(1);

    // --- maximal -----------------------------------------------------------
    auto* m = app.add_subcommand("maximal", "apply a maximal operator and write the grid");
    m->set_config("--config");
    GridArgs m_ga;
    m_ga.attach(m);
    std::string m_fn, m_w = "const:1", m_op = "centered", m_sharp = "mean", m_out;
    double m_r = 1.0, m_lq = 2.0, m_fq = 2.0;
    std::size_t m_stride = 4;
    m->add_option("--fn", m_fn, "function spec, e.g. 'ind(-1:1)*powabs(-0.25)'")->required();
    m->add_option("--weight", m_w, "weight spec (op=weighted)")->capture_default_str();
    m->add_option("--op", m_op, "centered|r|sharp|weighted|family")->capture_default_str();
    m->add_option("--r", m_r, "exponent for --op r")->capture_default_str();
    m->add_option("--sharp-mode", m_sharp, "mean|literal")->capture_default_str();
    m->add_option("--ladder-q", m_lq, "scale ladder ratio")->capture_default_str();
    m->add_option("--stride", m_stride, "family center stride in cells")->capture_default_str();
    m->add_option("--family-q", m_fq, "family scale ratio")->capture_default_str();
    m->add_option("--out", m_out, "output grid path (.csv or .json)")->required();

    // --- norm ---------------------------------------------------------------
    auto* nm = app.add_subcommand("norm", "evaluate a norm of a sampled function");
    nm->set_config("--config");
    GridArgs n_ga;
    n_ga.attach(nm);
    std::string n_type, n_fn, n_w = "const:1";
    double n_p = 2.0, n_kappa = 0.0, n_fq = 2.0;
    std::size_t n_stride = 4;
    bool n_json = false;
    nm->add_option("--type", n_type, "lp|weak|morrey")->required();
    nm->add_option("--p", n_p, "integrability exponent")->capture_default_str();
    nm->add_option("--kappa", n_kappa, "Morrey exponent in [0,1)")->capture_default_str();
    nm->add_option("--fn", n_fn, "function spec")->required();
    nm->add_option("--weight", n_w, "weight spec")->capture_default_str();
    nm->add_option("--stride", n_stride, "family center stride")->capture_default_str();
    nm->add_option("--family-q", n_fq, "family scale ratio")->capture_default_str();
    nm->add_flag("--json", n_json, "print a JSON object instead of plain lines");

    // --- apconst -------------------------------------------------------------
    auto* ap = app.add_subcommand("apconst", "weight characteristics over the default family");
    ap->set_config("--config");
    GridArgs a_ga;
    a_ga.attach(ap);
    std::string a_w;
    double a_p = 2.0, a_fq = 2.0;
    std::size_t a_stride = 4;
    bool a_json = false;
    ap->add_option("--weight", a_w, "weight spec")->required();
    ap->add_option("--p", a_p, "exponent (p = 1 reports the A_1 value)")->capture_default_str();
    ap->add_option("--stride", a_stride, "family center stride")->capture_default_str();
    ap->add_option("--family-q", a_fq, "family scale ratio")->capture_default_str();
    ap->add_flag("--json", a_json, "print a JSON object");

    // --- verify ---------------------------------------------------------------
    auto* vf = app.add_subcommand("verify", "run one named check");
    vf->set_config("--config");
    std::string v_check, v_out;
    std::uint64_t v_seed = 7;
    vf->add_option("check", v_check, "check name (see 'suite' for the list)")->required();
    vf->add_option("--seed", v_seed, "RNG seed")->capture_default_str();
    vf->add_option("--out", v_out, "write the JSON report here (default: stdout)");

    // --- suite ------------------------------------------------------------------
    auto* su = app.add_subcommand("suite", "run every check, write reports.json + summary.csv");
    su->set_config("--config");
    std::string s_dir = "reports";
    std::uint64_t s_seed = 7;
    su->add_option("--seed", s_seed, "RNG seed")->capture_default_str();
    su->add_option("--out-dir", s_dir, "output directory")->capture_default_str();

    // --- plot ----------------------------------------------------------------
    auto* pl = app.add_subcommand("plot", "render 1-D grids / refinement histories to SVG");
    pl->set_config("--config");
    std::vector<std::string> p_grids;
    std::string p_history, p_check, p_key = "c_star", p_out, p_title;
    bool p_logy = false;
    pl->add_option("--grid", p_grids, "1-D grid file (.csv/.json); repeatable");
    pl->add_option("--history", p_history, "reports.json to pull a refinement history from");
    pl->add_option("--check", p_check, "check name inside --history");
    pl->add_option("--key", p_key, "numeric history field to plot")->capture_default_str();
    pl->add_option("--out", p_out, "output SVG path")->required();
    pl->add_flag("--log-y", p_logy, "logarithmic y axis");
    pl->add_option("--title", p_title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (m->parsed())
            return cmd_maximal(m_ga, m_fn, m_w, m_op, m_r, m_sharp, m_lq, m_stride, m_fq, m_out);
        if (nm->parsed())
            return cmd_norm(n_ga, n_type, n_p, n_kappa, n_fn, n_w, n_stride, n_fq, n_json);
        if (ap->parsed()) return cmd_apconst(a_ga, a_w, a_p, a_stride, a_fq, a_json);
        if (vf->parsed()) return cmd_verify(v_check, v_seed, v_out);
        if (su->parsed()) return cmd_suite(s_seed, s_dir);
        if (pl->parsed())
            return cmd_plot(p_grids, p_history, p_check, p_key, p_out, p_logy, p_title);
    } catch (const CLI::ValidationError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    }
    return 2;
}
