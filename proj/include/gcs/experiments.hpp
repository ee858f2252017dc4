#pragma once

// End-to-end experiment driver: configuration, per-(k, delta) runs, the
// fixed-accuracy scaling study and record output.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "gcs/analysis.hpp"
#include "gcs/fem.hpp"
#include "gcs/least_squares.hpp"
#include "gcs/phase_space.hpp"
#include "gcs/problem.hpp"

namespace gcs {

struct ExperimentConfig {
    CaseKind kind = CaseKind::Homogeneous;
    std::vector<double> ks;
    std::vector<double> deltas;                     ///< grid over ks x deltas
    std::vector<std::pair<double, double>> cells;   ///< explicit (k, delta) pairs, run after the grid
    std::optional<double> target_accuracy;
    int quad_density = 20;                          ///< nodes per wavelength
    double cutoff = 1e-12;
    Interval window{-1.0, 1.0};
    double fem_x_end = kDefaultFemXEnd;
    std::string out;
    std::string format = "csv";
    bool timing = true;                             ///< false writes zero timings (byte-stable output)
    // delta grid of the scaling study: delta_min * ratio^i up to delta_max
    double scan_delta_min = 0.1;
    double scan_delta_ratio = 1.15;
    double scan_delta_max = 30.0;

    /// (k, delta) runs in execution order.
    std::vector<std::pair<double, double>> runs() const {
        std::vector<std::pair<double, double>> r;
        for (double k : ks)
            for (double d : deltas) r.emplace_back(k, d);
        r.insert(r.end(), cells.begin(), cells.end());
        return r;
    }

    std::vector<double> scan_grid() const {
        std::vector<double> g;
        for (double d = scan_delta_min; d <= scan_delta_max * (1.0 + 1e-12); d *= scan_delta_ratio) g.push_back(d);
        return g;
    }

    void validate() const {
        auto bad = [](const std::string& m) { throw std::invalid_argument("config: " + m); };
        for (double k : ks)
            if (!(k >= 20.0)) bad("k must be >= 20");
        for (double d : deltas)
            if (!(d > 0.0)) bad("delta must be positive");
        for (const auto& [k, d] : cells)
            if (!(k >= 20.0) || !(d > 0.0)) bad("cells need k >= 20 and delta > 0");
        if (target_accuracy && !(*target_accuracy > 0.0)) bad("target must be positive");
        if (quad_density < 10) bad("quad_density must be >= 10");
        if (!(cutoff > 0.0 && cutoff < 1.0)) bad("cutoff must lie in (0, 1)");
        if (!(window.hi > window.lo)) bad("window is empty");
        if (!(fem_x_end > 1.0)) bad("fem_x_end must exceed 1");
        if (format != "csv" && format != "json") bad("format must be csv or json");
        if (!(scan_delta_min > 0.0 && scan_delta_ratio > 1.0 && scan_delta_max >= scan_delta_min))
            bad("invalid scan grid");
    }
};

/// Flat JSON keys: case, k, delta, cells, target, quad_density, cutoff, window,
/// fem_x_end, out, format, timing, scan_delta_min, scan_delta_ratio, scan_delta_max.
inline void apply_json(ExperimentConfig& cfg, const nlohmann::json& j) {
    static const char* known[] = {"case",      "k",           "delta",  "cells",  "target",
                                  "quad_density", "cutoff",   "window", "fem_x_end", "out",
                                  "format",    "timing",      "scan_delta_min", "scan_delta_ratio", "scan_delta_max"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (std::find(std::begin(known), std::end(known), it.key()) == std::end(known))
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    auto list = [](const nlohmann::json& v) {
        return v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
    };
    if (j.contains("case")) cfg.kind = parse_case_kind(j["case"].get<std::string>());
    if (j.contains("k")) cfg.ks = list(j["k"]);
    if (j.contains("delta")) cfg.deltas = list(j["delta"]);
    if (j.contains("cells")) {
        cfg.cells.clear();
        for (const auto& c : j["cells"]) cfg.cells.emplace_back(c.at(0).get<double>(), c.at(1).get<double>());
    }
    if (j.contains("target")) cfg.target_accuracy = j["target"].get<double>();
    if (j.contains("quad_density")) cfg.quad_density = j["quad_density"].get<int>();
    if (j.contains("cutoff")) cfg.cutoff = j["cutoff"].get<double>();
    if (j.contains("window")) cfg.window = {j["window"].at(0).get<double>(), j["window"].at(1).get<double>()};
    if (j.contains("fem_x_end")) cfg.fem_x_end = j["fem_x_end"].get<double>();
    if (j.contains("out")) cfg.out = j["out"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("timing")) cfg.timing = j["timing"].get<bool>();
    if (j.contains("scan_delta_min")) cfg.scan_delta_min = j["scan_delta_min"].get<double>();
    if (j.contains("scan_delta_ratio")) cfg.scan_delta_ratio = j["scan_delta_ratio"].get<double>();
    if (j.contains("scan_delta_max")) cfg.scan_delta_max = j["scan_delta_max"].get<double>();
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config '" + path + "'");
    ExperimentConfig cfg;
    apply_json(cfg, nlohmann::json::parse(in));
    return cfg;
}

struct ExperimentRecord {
    double k = 0.0;
    double delta = 0.0;
    std::size_t ndofs = 0;
    double rel_h1k_error = 0.0;
    double assembly_s = 0.0;
    double solve_s = 0.0;
    long rank = 0;

    friend bool operator==(const ExperimentRecord&, const ExperimentRecord&) = default;
};

/// Reference fields on the error window: the exact solution (homogeneous) or a
/// finite element solution computed once per k (heterogeneous).
class ReferenceCache {
public:
    explicit ReferenceCache(double fem_x_end = kDefaultFemXEnd) : x_end_(fem_x_end) {}

    FieldFn get(const ProblemCase& pc) {
        if (pc.exact) {
            const auto ex = *pc.exact;
            return [ex](double x) { return std::pair{ex.value(x), ex.derivative(x)}; };
        }
        auto it = fem_.find(pc.k);
        if (it == fem_.end()) it = fem_.emplace(pc.k, std::make_shared<FemSolution>(fem_solve(pc, x_end_))).first;
        const auto sol = it->second;
        return [sol](double x) { return std::pair{fem_eval(*sol, x, 0), fem_eval(*sol, x, 1)}; };
    }

private:
    double x_end_;
    std::map<double, std::shared_ptr<const FemSolution>> fem_;
};

/// Build the symbol set, assemble, solve and measure the relative H^1_k error.
inline ExperimentRecord run_single(const ExperimentConfig& cfg, double k, double delta, ReferenceCache& refs) {
    using clock = std::chrono::steady_clock;
    try {
        const auto pc = make_case(cfg.kind, k);
        const auto t0 = clock::now();
        const auto set = build_symbol_set(LatticeSpec::for_wavenumber(k), phase_symbol(pc), delta);
        if (set.empty()) throw std::runtime_error("empty index set");
        const auto sys = assemble(set, pc, assembly_rule(set, k, cfg.quad_density));
        const auto t1 = clock::now();
        const auto rep = solve(sys, cfg.cutoff);
        const auto t2 = clock::now();
        const Expansion ex(rep.coefficients, set);
        const auto ref = refs.get(pc);
        const double k_eff = k * std::max(1.0, set.max_abs_xi());
        const auto err = h1k_error([&](double x) { return ex.eval(x); }, ref, k,
                                   build_rule(cfg.window, k_eff, std::max(40, cfg.quad_density)));
        ExperimentRecord r;
        r.k = k;
        r.delta = delta;
        r.ndofs = set.size();
        r.rel_h1k_error = err.relative;
        r.assembly_s = cfg.timing ? std::chrono::duration<double>(t1 - t0).count() : 0.0;
        r.solve_s = cfg.timing ? std::chrono::duration<double>(t2 - t1).count() : 0.0;
        r.rank = static_cast<long>(rep.numerical_rank);
        return r;
    } catch (const std::exception& e) {
        char ctx[80];
        std::snprintf(ctx, sizeof ctx, "k=%g delta=%g: ", k, delta);
        throw std::runtime_error(ctx + std::string(e.what()));
    }
}

inline std::vector<ExperimentRecord> run_case(const ExperimentConfig& cfg) {
    cfg.validate();
    const auto runs = cfg.runs();
    if (runs.empty()) throw std::invalid_argument("config: no (k, delta) runs requested");
    ReferenceCache refs(cfg.fem_x_end);
    std::vector<ExperimentRecord> out;
    for (const auto& [k, d] : runs) out.push_back(run_single(cfg, k, d, refs));
    return out;
}

struct ScalingResult {
    std::vector<ExperimentRecord> selected;  ///< smallest delta reaching the target, per retained k
    std::vector<ExperimentRecord> scanned;   ///< every run of the scan
    std::vector<double> dropped_k;           ///< k where the target was not reached
    double delta_slope = 0.0;
    double ndofs_slope = 0.0;
};

/// For each k, scan the delta grid upward and keep the first delta whose error
/// meets the target; fit log delta and log N_dofs against log k.
inline ScalingResult scaling_study(const ExperimentConfig& cfg) {
    cfg.validate();
    if (!cfg.target_accuracy) throw std::invalid_argument("scaling_study: target accuracy not set");
    if (cfg.ks.size() < 4) throw std::invalid_argument("scaling_study: needs at least 4 values of k");
    ReferenceCache refs(cfg.fem_x_end);
    ScalingResult res;
    const auto grid = cfg.scan_grid();
    for (double k : cfg.ks) {
        bool hit = false;
        const auto pc = make_case(cfg.kind, k);
        const auto spec = LatticeSpec::for_wavenumber(k);
        for (double d : grid) {
            if (build_symbol_set(spec, phase_symbol(pc), d).empty()) continue;
            const auto rec = run_single(cfg, k, d, refs);
            res.scanned.push_back(rec);
            if (rec.rel_h1k_error <= *cfg.target_accuracy) {
                res.selected.push_back(rec);
                hit = true;
                break;
            }
        }
        if (!hit) res.dropped_k.push_back(k);
    }
    if (res.selected.size() < 2) throw std::runtime_error("scaling_study: target reached for fewer than 2 values of k");
    std::vector<double> lk, ld, ln;
    for (const auto& r : res.selected) {
        lk.push_back(std::log(r.k));
        ld.push_back(std::log(r.delta));
        ln.push_back(std::log(static_cast<double>(r.ndofs)));
    }
    res.delta_slope = linear_fit(lk, ld).first;
    res.ndofs_slope = linear_fit(lk, ln).first;
    return res;
}

// ---------------------------------------------------------------------------
// Output

inline constexpr const char* kRecordHeader = "k,delta,ndofs,rel_h1k_error,assembly_s,solve_s,rank";

inline void emit(const std::vector<ExperimentRecord>& records, const std::string& format, std::ostream& out) {
    if (records.empty()) throw std::invalid_argument("emit: no records");
    if (format == "csv") {
        out << kRecordHeader << '\n';
        char buf[256];
        for (const auto& r : records) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%zu,%.6e,%.6e,%.6e,%ld\n", r.k, r.delta, r.ndofs, r.rel_h1k_error,
                          r.assembly_s, r.solve_s, r.rank);
            out << buf;
        }
    } else if (format == "json") {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& r : records) {
            nlohmann::ordered_json o;
            o["k"] = r.k;
            o["delta"] = r.delta;
            o["ndofs"] = r.ndofs;
            o["rel_h1k_error"] = r.rel_h1k_error;
            o["assembly_s"] = r.assembly_s;
            o["solve_s"] = r.solve_s;
            o["rank"] = r.rank;
            arr.push_back(std::move(o));
        }
        out << arr.dump(2) << '\n';
    } else {
        throw std::invalid_argument("emit: unknown format '" + format + "'");
    }
    if (!out) throw std::runtime_error("emit: write failed");
}

inline void emit(const std::vector<ExperimentRecord>& records, const std::string& format, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit: cannot open '" + path + "' for writing");
    emit(records, format, f);
}

inline std::vector<ExperimentRecord> parse_records_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != kRecordHeader) throw std::runtime_error("parse_records_csv: bad header");
    std::vector<ExperimentRecord> out;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ExperimentRecord r;
        if (std::sscanf(line.c_str(), "%lf,%lf,%zu,%lf,%lf,%lf,%ld", &r.k, &r.delta, &r.ndofs, &r.rel_h1k_error,
                        &r.assembly_s, &r.solve_s, &r.rank) != 7)
            throw std::runtime_error("parse_records_csv: malformed line '" + line + "'");
        out.push_back(r);
    }
    return out;
}

inline std::vector<ExperimentRecord> parse_records_json(std::istream& in) {
    const auto j = nlohmann::json::parse(in);
    std::vector<ExperimentRecord> out;
    for (const auto& o : j)
        out.push_back({o.at("k").get<double>(), o.at("delta").get<double>(), o.at("ndofs").get<std::size_t>(),
                       o.at("rel_h1k_error").get<double>(), o.at("assembly_s").get<double>(),
                       o.at("solve_s").get<double>(), o.at("rank").get<long>()});
    return out;
}

}  // namespace gcs
