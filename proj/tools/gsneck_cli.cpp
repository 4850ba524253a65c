// gsneck — enhanced-neck dataflow tool: describe / forward / gradcheck / erf /
// calibrate / bench over .gsnt tensor files and a JSON run configuration.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"

#include "gsneck/analysis.hpp"
#include "gsneck/io.hpp"

namespace fs = std::filesystem;
using namespace gsneck;
using ojson = nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitVerifyFail = 2;

RunConfig load_config(const std::string& path, bool verbose) {
    std::ifstream f(path);
    if (!f) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    RunConfig cfg = parse_config(ss.str());
    if (verbose)
        for (const auto& d : cfg.applied_defaults)
            std::cerr << "default applied: " << d << "\n";
    return cfg;
}

std::string level_path(const std::string& stem, int level) {
    const std::string suffix = "_L" + std::to_string(level) + ".gsnt";
    if (stem.size() > 5 && stem.ends_with(".gsnt"))
        return stem.substr(0, stem.size() - 5) + suffix;
    return stem + suffix;
}

std::string fmt_g(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- describe --------------------------------------------------------------

int cmd_describe(const RunConfig& cfg, const std::string& format) {
    const GraphDesc graph = enhanced_neck_graph(cfg.neck);
    const CostReport rep = cost_report(graph, cfg.analysis.flop_per_mac);
    const CostReport base = cost_report(baseline_fpn_graph(cfg.neck), cfg.analysis.flop_per_mac);
    const auto& py = cfg.neck.pyramid;

    if (format == "json") {
        ojson j;
        j["input_hw"] = {py.base_h, py.base_w};
        j["levels"] = py.levels;
        j["flop_per_mac"] = rep.flop_per_mac;
        j["note"] = "conv layers only; elementwise adds, ReLU and upsampling excluded";
        j["layers"] = ojson::array();
        for (const auto& r : rep.rows)
            j["layers"].push_back({{"name", r.name}, {"params", r.params}, {"macs", r.macs}});
        j["total_params"] = rep.total_params;
        j["total_macs"] = rep.total_macs;
        j["total_flops"] = rep.total_flops();
        j["baseline_fpn"] = {{"total_params", base.total_params},
                             {"total_macs", base.total_macs},
                             {"total_flops", base.total_flops()}};
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }
    std::printf("enhanced neck at %dx%d, %d levels (finest stride %d)\n", py.base_h, py.base_w,
                py.levels, py.finest_stride);
    std::printf("counts cover conv layers only; adds, ReLU and upsampling excluded\n\n");
    std::printf("%-28s %14s %16s\n", "layer", "params", "MACs");
    for (const auto& r : rep.rows)
        std::printf("%-28s %14lld %16lld\n", r.name.c_str(), (long long)r.params, (long long)r.macs);
    std::printf("%-28s %14lld %16lld\n", "TOTAL", (long long)rep.total_params,
                (long long)rep.total_macs);
    std::printf("total FLOPs (mac=%d): %lld\n", rep.flop_per_mac, (long long)rep.total_flops());
    std::printf("baseline FPN: params %lld, MACs %lld\n", (long long)base.total_params,
                (long long)base.total_macs);
    return kExitOk;
}

// ---- synth / forward -------------------------------------------------------

template <class T>
void write_pyramid(const PyramidFeatures<T>& feats, const std::string& stem, int only_level) {
    for (size_t i = 0; i < feats.levels.size(); ++i) {
        if (only_level >= 0 && static_cast<int>(i) != only_level) continue;
        write_tensor(level_path(stem, static_cast<int>(i)), feats.levels[i]);
    }
}

template <class T>
int run_forward(const RunConfig& cfg, const std::string& input, const std::string& out,
                int level, bool zero_init, const std::string& fill) {
    const NeckConfig& neck = cfg.neck;
    PyramidFeatures<T> feats;
    if (input.empty()) {
        FillKind f = FillKind::Uniform;
        if (fill == "impulse") f = FillKind::Impulse;
        else if (fill == "ramp") f = FillKind::Ramp;
        else if (fill != "uniform") throw ConfigError("fill must be uniform|impulse|ramp");
        feats = synth_backbone<T>(neck.pyramid, cfg.seed, f);
    } else {
        for (int i = 0; i < neck.pyramid.levels; ++i) {
            feats.levels.push_back(read_tensor_as<T>(level_path(input, i)));
            feats.strides.push_back(neck.pyramid.stride_at(i));
        }
    }
    NeckParams<T> params =
        zero_init ? neck_zero_params<T>(neck) : neck_init<T>(neck, cfg.seed);
    PyramidFeatures<T> zs = enhanced_neck_forward(feats, neck, params);
    write_pyramid(zs, out, level);
    for (size_t i = 0; i < zs.levels.size(); ++i) {
        if (level >= 0 && static_cast<int>(i) != level) continue;
        std::printf("L%zu -> %s %s\n", i, level_path(out, static_cast<int>(i)).c_str(),
                    zs.levels[i].shape().str().c_str());
    }
    return kExitOk;
}

template <class T>
int run_synth(const RunConfig& cfg, const std::string& out, const std::string& fill) {
    FillKind f = FillKind::Uniform;
    if (fill == "impulse") f = FillKind::Impulse;
    else if (fill == "ramp") f = FillKind::Ramp;
    else if (fill != "uniform") throw ConfigError("fill must be uniform|impulse|ramp");
    PyramidFeatures<T> feats = synth_backbone<T>(cfg.neck.pyramid, cfg.seed, f);
    write_pyramid(feats, out, -1);
    for (size_t i = 0; i < feats.levels.size(); ++i)
        std::printf("L%zu -> %s %s\n", i, level_path(out, static_cast<int>(i)).c_str(),
                    feats.levels[i].shape().str().c_str());
    return kExitOk;
}

// ---- gradcheck -------------------------------------------------------------

int cmd_gradcheck(const RunConfig& cfg, double tol, const std::string& format) {
    NeckParams<double> params = neck_init<double>(cfg.neck, cfg.seed);
    PyramidFeatures<double> feats =
        synth_backbone<double>(cfg.neck.pyramid, mix_seed(cfg.seed, 9), FillKind::Uniform);
    NeckGradcheckProblem prob = neck_gradcheck_problem(cfg.neck, params, feats);
    GradcheckOptions opt;
    opt.eps = cfg.analysis.gradcheck_eps;
    opt.tol = tol > 0 ? tol : cfg.analysis.gradcheck_tol;
    opt.seed = cfg.seed;
    opt.max_coords = cfg.analysis.gradcheck_max_coords;
    GradcheckReport rep = gradcheck(prob.build, prob.leaves, opt);

    if (format == "json") {
        ojson j;
        j["eps"] = rep.eps;
        j["tol"] = rep.tol;
        j["dtype"] = "f64";
        j["pass"] = rep.pass;
        j["max_rel_err"] = rep.max_rel_err();
        j["groups"] = ojson::array();
        for (const auto& g : rep.groups)
            j["groups"].push_back({{"name", g.name},
                                   {"max_rel_err", g.max_rel_err},
                                   {"checked", g.checked},
                                   {"skipped", g.skipped}});
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("gradcheck f64, eps=%s, tol=%s\n", fmt_g(rep.eps).c_str(),
                    fmt_g(rep.tol).c_str());
        for (const auto& g : rep.groups)
            std::printf("  %-24s max_rel_err=%s checked=%d skipped=%d\n", g.name.c_str(),
                        fmt_g(g.max_rel_err).c_str(), g.checked, g.skipped);
        std::printf("%s max_rel_err=%s\n", rep.pass ? "PASS" : "FAIL",
                    fmt_g(rep.max_rel_err()).c_str());
    }
    return rep.pass ? kExitOk : kExitVerifyFail;
}

// ---- erf -------------------------------------------------------------------

int cmd_erf(const RunConfig& cfg, int level, const std::string& coord, const std::string& out,
            bool exact_zero, const std::string& format) {
    int y = 0, x = 0;
    if (std::sscanf(coord.c_str(), "%d,%d", &y, &x) != 2)
        throw ConfigError("--coord must be 'y,x'");
    NeckParams<double> params = neck_init<double>(cfg.neck, cfg.seed);
    PyramidFeatures<double> feats =
        synth_backbone<double>(cfg.neck.pyramid, mix_seed(cfg.seed, 9), FillKind::Uniform);
    ErfReport rep = erf_map_neck(cfg.neck, params, feats, level, y, x, exact_zero);
    write_tensor(out, rep.grad_map);

    if (format == "json") {
        ojson j;
        j["level"] = rep.level;
        j["coord"] = {rep.coord_y, rep.coord_x};
        j["support_box"] = {rep.box_y0, rep.box_x0, rep.box_y1, rep.box_x1};
        j["support_cardinality"] = rep.support_cardinality;
        j["threshold"] = rep.threshold;
        j["map_file"] = out;
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("erf level=%d coord=(%d,%d)\n", rep.level, rep.coord_y, rep.coord_x);
        std::printf("support box [y0,x0,y1,x1] = [%d,%d,%d,%d], cardinality %lld, threshold %s\n",
                    rep.box_y0, rep.box_x0, rep.box_y1, rep.box_x1,
                    (long long)rep.support_cardinality, fmt_g(rep.threshold).c_str());
        std::printf("gradient map -> %s\n", out.c_str());
    }
    return kExitOk;
}

// ---- calibrate -------------------------------------------------------------

int cmd_calibrate(const RunConfig& cfg, const std::string& targets, const std::string& format) {
    const CalibrationReport rep = calibrate_search(cfg.calibration, table1_targets(targets));
    auto cand_json = [](const CalibrationCandidate& c) {
        return ojson{{"config", c.desc}, {"params", c.params},     {"macs", c.macs},
                     {"param_err", c.param_err}, {"mac_err", c.mac_err}, {"score", c.score}};
    };
    if (format == "json") {
        ojson j = ojson::array();
        for (const auto& t : rep.targets) {
            ojson tj;
            tj["target"] = t.target.name;
            tj["param_delta"] = t.target.param_delta;
            tj["mac_delta"] = t.target.mac_delta;
            tj["levels"] = t.target.levels;
            tj["finest_stride"] = t.target.finest_stride;
            tj["evaluated"] = t.evaluated;
            tj["within_10pct"] = t.within_10pct;
            tj["within_10pct_params"] = t.within_10pct_params;
            tj["best"] = cand_json(t.best);
            tj["best_by_params"] = cand_json(t.best_by_params);
            tj["top"] = ojson::array();
            for (const auto& c : t.top) tj["top"].push_back(cand_json(c));
            j.push_back(std::move(tj));
        }
        std::cout << j.dump(2) << "\n";
        return kExitOk;
    }
    for (const auto& t : rep.targets) {
        std::printf("== %s: target +%s params, +%s MACs (L=%d, stride %d, %dx%d input)\n",
                    t.target.name.c_str(), fmt_g(t.target.param_delta).c_str(),
                    fmt_g(t.target.mac_delta).c_str(), t.target.levels, t.target.finest_stride,
                    t.target.input_hw, t.target.input_hw);
        std::printf("   evaluated %zu configs; %zu within 10%% by score, %zu by params alone\n",
                    t.evaluated, t.within_10pct, t.within_10pct_params);
        for (const auto& c : t.top)
            std::printf("   score=%-8s params=%-9lld (err %s) macs=%-12lld (err %s)  %s\n",
                        fmt_g(c.score).c_str(), (long long)c.params, fmt_g(c.param_err).c_str(),
                        (long long)c.macs, fmt_g(c.mac_err).c_str(), c.desc.c_str());
        std::printf("   best by params: err=%s  %s\n", fmt_g(t.best_by_params.param_err).c_str(),
                    t.best_by_params.desc.c_str());
    }
    return kExitOk;
}

// ---- bench -----------------------------------------------------------------

template <class T>
int run_bench(const RunConfig& cfg, int iters, int warmup) {
    PyramidFeatures<T> feats = synth_backbone<T>(cfg.neck.pyramid, cfg.seed, FillKind::Uniform);
    NeckParams<T> params = neck_init<T>(cfg.neck, cfg.seed);
    const BenchReport rep = bench_forward(
        [&] { enhanced_neck_forward(feats, cfg.neck, params); }, warmup, iters);
    std::printf("bench enhanced neck, input %dx%d, %d levels, dtype %s, threads 1\n",
                cfg.neck.pyramid.base_h, cfg.neck.pyramid.base_w, cfg.neck.pyramid.levels,
                cfg.dtype == DType::F32 ? "f32" : "f64");
    std::printf("iters=%d warmup=%d mean=%.3f ms p50=%.3f ms p95=%.3f ms items/s=%.3f\n",
                rep.iters, rep.warmup, rep.mean_ms, rep.p50_ms, rep.p95_ms, rep.items_per_s);
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"GSNet/FRM enhanced-neck analysis tool"};
    app.require_subcommand(1);

    std::string config_path, format = "text";
    bool verbose = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration (JSON)")->required();
        sub->add_option("--format", format, "text|json")->check(CLI::IsMember({"text", "json"}));
        sub->add_flag("--verbose", verbose, "echo applied config defaults");
    };

    auto* describe = app.add_subcommand("describe", "layer table with parameter and MAC counts");
    add_common(describe);

    std::string in_path, out_path, fill = "uniform";
    int level = -1;
    bool zero_init = false;
    auto* synth = app.add_subcommand("synth", "write synthetic backbone pyramid tensors");
    add_common(synth);
    synth->add_option("--out", out_path, "output stem (per-level .gsnt files)")->required();
    synth->add_option("--fill", fill, "uniform|impulse|ramp");

    auto* forward = app.add_subcommand("forward", "run the enhanced neck, write per-level outputs");
    add_common(forward);
    forward->add_option("--input", in_path, "input stem; omitted = synthesize from seed");
    forward->add_option("--out", out_path, "output stem")->required();
    forward->add_option("--level", level, "write only this output level");
    forward->add_flag("--zero-init", zero_init, "all parameters zero");
    forward->add_option("--fill", fill, "synthetic fill when --input is omitted");

    double tol = -1;
    auto* gradcheck_cmd = app.add_subcommand("gradcheck", "finite-difference gradient check (f64)");
    add_common(gradcheck_cmd);
    gradcheck_cmd->add_option("--tol", tol, "override tolerance");

    std::string coord = "0,0";
    bool exact_zero = false;
    auto* erf = app.add_subcommand("erf", "effective-receptive-field gradient map");
    add_common(erf);
    erf->add_option("--level", level, "pyramid level")->required();
    erf->add_option("--coord", coord, "output coordinate y,x")->required();
    erf->add_option("--out", out_path, "gradient map .gsnt file")->required();
    erf->add_flag("--exact-zero", exact_zero, "support at exact zero threshold");

    std::string targets = "both";
    auto* calibrate = app.add_subcommand("calibrate", "search configs against published deltas");
    add_common(calibrate);
    calibrate->add_option("--targets", targets, "faster-rcnn|retinanet|both")
        ->check(CLI::IsMember({"faster-rcnn", "retinanet", "both"}));

    int iters = -1, warmup = -1;
    auto* bench = app.add_subcommand("bench", "forward-pass wall-clock timing");
    add_common(bench);
    bench->add_option("--iters", iters, "timed iterations");
    bench->add_option("--warmup", warmup, "warmup iterations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUserError;
    }

    try {
        const RunConfig cfg = load_config(config_path, verbose);
        const bool f64 = cfg.dtype == DType::F64;
        if (describe->parsed()) return cmd_describe(cfg, format);
        if (synth->parsed())
            return f64 ? run_synth<double>(cfg, out_path, fill) : run_synth<float>(cfg, out_path, fill);
        if (forward->parsed())
            return f64 ? run_forward<double>(cfg, in_path, out_path, level, zero_init, fill)
                       : run_forward<float>(cfg, in_path, out_path, level, zero_init, fill);
        if (gradcheck_cmd->parsed()) return cmd_gradcheck(cfg, tol, format);
        if (erf->parsed()) return cmd_erf(cfg, level, coord, out_path, exact_zero, format);
        if (calibrate->parsed()) return cmd_calibrate(cfg, targets, format);
        if (bench->parsed())
            return f64 ? run_bench<double>(cfg, iters > 0 ? iters : cfg.bench.iters,
                                           warmup >= 0 ? warmup : cfg.bench.warmup)
                       : run_bench<float>(cfg, iters > 0 ? iters : cfg.bench.iters,
                                          warmup >= 0 ? warmup : cfg.bench.warmup);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUserError;
    }
    return kExitUserError;
}
