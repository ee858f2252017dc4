// gcs_cli: solve, table, scaling and diagnose verbs for the coherent-state
// least-squares Helmholtz solver.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "gcs/experiments.hpp"

namespace {

struct Flags {
    std::string config;
    std::string kind;
    std::vector<double> k;
    std::vector<double> delta;
    std::vector<double> window;
    double target = 0.0;
    double cutoff = 0.0;
    int quad_density = 0;
    std::string out;
    std::string format;
    bool no_timing = false;
};

void add_common(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config, "flat JSON config; flags override its values");
    sub->add_option("--case", f.kind, "homogeneous | heterogeneous");
    sub->add_option("--k", f.k, "wavenumber(s)")->delimiter(',');
    sub->add_option("--delta", f.delta, "symbol threshold(s)")->delimiter(',');
    sub->add_option("--window", f.window, "error window lo,hi")->delimiter(',')->expected(2);
    sub->add_option("--cutoff", f.cutoff, "relative singular value cutoff");
    sub->add_option("--quad-density", f.quad_density, "quadrature nodes per wavelength");
    sub->add_option("--out", f.out, "output file (default stdout)");
    sub->add_option("--format", f.format, "csv | json");
    sub->add_flag("--no-timing", f.no_timing, "write zero timings for byte-stable output");
}

gcs::ExperimentConfig resolve(const Flags& f) {
    gcs::ExperimentConfig cfg;
    if (!f.config.empty()) cfg = gcs::load_config(f.config);
    if (!f.kind.empty()) cfg.kind = gcs::parse_case_kind(f.kind);
    if (!f.k.empty()) {
        cfg.ks = f.k;
        cfg.cells.clear();
    }
    if (!f.delta.empty()) {
        cfg.deltas = f.delta;
        cfg.cells.clear();
    }
    if (f.window.size() == 2) cfg.window = {f.window[0], f.window[1]};
    if (f.target > 0.0) cfg.target_accuracy = f.target;
    if (f.cutoff > 0.0) cfg.cutoff = f.cutoff;
    if (f.quad_density > 0) cfg.quad_density = f.quad_density;
    if (!f.out.empty()) cfg.out = f.out;
    if (!f.format.empty()) cfg.format = f.format;
    if (f.no_timing) cfg.timing = false;
    cfg.validate();
    return cfg;
}

void write_records(const gcs::ExperimentConfig& cfg, const std::vector<gcs::ExperimentRecord>& recs) {
    if (cfg.out.empty())
        gcs::emit(recs, cfg.format, std::cout);
    else
        gcs::emit(recs, cfg.format, cfg.out);
}

int run_scaling(const gcs::ExperimentConfig& cfg) {
    const auto res = gcs::scaling_study(cfg);
    write_records(cfg, res.selected);
    nlohmann::ordered_json s;
    s["target"] = *cfg.target_accuracy;
    s["delta_slope"] = res.delta_slope;
    s["ndofs_slope"] = res.ndofs_slope;
    s["dropped_k"] = res.dropped_k;
    std::cerr << s.dump() << '\n';
    return 0;
}

struct DiagnoseFlags {
    std::string probe = "frame";
    double hbar = 0.01;
    long box = 15;
    double k = 100.0;
    double epsilon = 0.3;
    double delta = 1.0;
    std::string kind = "homogeneous";
    std::string out;
};

int run_diagnose(const DiagnoseFlags& d) {
    std::ofstream file;
    if (!d.out.empty()) {
        file.open(d.out, std::ios::binary);
        if (!file) throw std::runtime_error("cannot open '" + d.out + "' for writing");
    }
    std::ostream& out = d.out.empty() ? std::cout : file;
    const gcs::LatticeSpec spec(d.hbar);
    nlohmann::ordered_json j;
    if (d.probe == "frame") {
        const auto fb = gcs::frame_bounds(spec, d.box);
        j["hbar"] = d.hbar;
        j["box"] = d.box;
        j["alpha"] = fb.alpha;
        j["beta"] = fb.beta;
        j["ratio"] = fb.ratio();
        out << j.dump(2) << '\n';
    } else if (d.probe == "decay") {
        const auto res = gcs::dual_frame_coefficients(spec, {0, 0}, d.box);
        const auto fit = gcs::fit_dual_decay(res);
        gcs::write_decay_csv(out, fit);
        j["slope"] = fit.slope;
        j["r_squared"] = fit.r_squared;
        j["iterations"] = res.iterations;
        std::cerr << j.dump() << '\n';
    } else if (d.probe == "quasi-orthogonality") {
        const auto prof = gcs::quasi_orthogonality_profile(d.hbar, {2, 4, 8, 16});
        out << "distance,max_abs\n";
        for (std::size_t i = 0; i < prof.distances.size(); ++i) {
            char buf[80];
            std::snprintf(buf, sizeof buf, "%ld,%.6e\n", prof.distances[i], prof.max_values[i]);
            out << buf;
        }
    } else if (d.probe == "planewave") {
        const auto p = gcs::planewave_coefficient_probe(gcs::make_case(gcs::CaseKind::Homogeneous, d.k), d.epsilon);
        j["k"] = p.k;
        j["epsilon"] = p.epsilon;
        j["inside_count"] = p.inside_count;
        j["outside_count"] = p.outside_count;
        j["max_inside"] = p.max_inside;
        j["max_outside"] = p.max_outside;
        j["ratio"] = p.ratio();
        out << j.dump(2) << '\n';
    } else if (d.probe == "index-set") {
        const auto pc = gcs::make_case(gcs::parse_case_kind(d.kind), d.k);
        const auto sym = gcs::phase_symbol(pc);
        gcs::write_index_set_csv(out, gcs::build_symbol_set(gcs::LatticeSpec::for_wavenumber(d.k), sym, d.delta), sym);
    } else if (d.probe == "gram") {
        const auto pc = gcs::make_case(gcs::parse_case_kind(d.kind), d.k);
        const auto set = gcs::build_symbol_set(gcs::LatticeSpec::for_wavenumber(d.k), gcs::phase_symbol(pc), d.delta);
        gcs::write_gram_modulus_csv(out, gcs::assemble(set, pc, gcs::assembly_rule(set, d.k)), 1e-14);
    } else if (d.probe == "fem") {
        gcs::write_fem_nodal_csv(out, gcs::fem_solve(gcs::make_case(gcs::parse_case_kind(d.kind), d.k)));
    } else {
        throw std::invalid_argument("unknown probe '" + d.probe + "'");
    }
    if (!out) throw std::runtime_error("write failed");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Coherent-state least-squares Helmholtz solver"};
    app.require_subcommand(1);

    Flags f;
    auto* solve = app.add_subcommand("solve", "single (k, delta) run");
    add_common(solve, f);
    auto* table = app.add_subcommand("table", "grid of (k, delta) runs");
    add_common(table, f);
    auto* scaling = app.add_subcommand("scaling", "smallest delta reaching a target error, per k");
    add_common(scaling, f);
    scaling->add_option("--target", f.target, "target relative H1_k error");

    DiagnoseFlags d;
    auto* diag = app.add_subcommand("diagnose", "frame and decay probes");
    diag->add_option("--probe", d.probe, "frame | decay | quasi-orthogonality | planewave | index-set | gram | fem")
        ->capture_default_str();
    diag->add_option("--hbar", d.hbar, "semiclassical parameter")->capture_default_str();
    diag->add_option("--box", d.box, "lattice box half-width")->capture_default_str();
    diag->add_option("--k", d.k, "wavenumber")->capture_default_str();
    diag->add_option("--epsilon", d.epsilon, "plane-wave band exponent")->capture_default_str();
    diag->add_option("--delta", d.delta, "symbol threshold")->capture_default_str();
    diag->add_option("--case", d.kind, "homogeneous | heterogeneous")->capture_default_str();
    diag->add_option("--out", d.out, "output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "error: kind=usage message=\"" << e.what() << "\"\n";
        return 2;
    }

    try {
        if (*diag) return run_diagnose(d);
        const auto cfg = resolve(f);
        if (*scaling) return run_scaling(cfg);
        if (*solve && cfg.runs().size() != 1)
            throw std::invalid_argument("solve expects exactly one (k, delta); use table for grids");
        write_records(cfg, gcs::run_case(cfg));
        return 0;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: kind=invalid_argument message=\"" << e.what() << "\"\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: kind=runtime message=\"" << e.what() << "\"\n";
        return 1;
    }
}
