#pragma once

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <set>
#include <string>
#include <vector>

#include "gsneck/neck.hpp"
#include "gsneck/tape.hpp"

namespace gsneck {

// ---------------------------------------------------------------------------
// parameter / MAC accounting
//
// Counts cover convolution layers only; elementwise adds, ReLU and upsampling
// are excluded (the usual convention of conv-dominated counters).
// ---------------------------------------------------------------------------

struct ConvLayerDesc {
    std::string name;
    ConvSpec spec;
    int in_h = 0, in_w = 0;
};

using GraphDesc = std::vector<ConvLayerDesc>;

struct LayerCost {
    std::string name;
    int64_t params = 0;
    int64_t macs = 0;
};

struct CostReport {
    std::vector<LayerCost> rows;
    int64_t total_params = 0;
    int64_t total_macs = 0;
    int flop_per_mac = 1; // 1 or 2; never changes the stored MAC counts

    int64_t total_flops() const { return total_macs * flop_per_mac; }
};

inline CostReport cost_report(const GraphDesc& graph, int flop_per_mac = 1) {
    if (flop_per_mac != 1 && flop_per_mac != 2)
        throw ConfigError("flop convention must be mac=1 or mac=2");
    CostReport r;
    r.flop_per_mac = flop_per_mac;
    for (const auto& layer : graph) {
        layer.spec.validate();
        LayerCost row{layer.name, layer.spec.param_count(),
                      layer.spec.mac_count(layer.in_h, layer.in_w)};
        r.total_params += row.params;
        r.total_macs += row.macs;
        r.rows.push_back(std::move(row));
    }
    return r;
}

inline CostReport count_params(const GraphDesc& graph) { return cost_report(graph); }
inline CostReport count_macs(const GraphDesc& graph, int flop_per_mac = 1) {
    return cost_report(graph, flop_per_mac);
}

inline GraphDesc gsnet_graph(const GsnetConfig& cfg, const std::string& prefix, int h, int w) {
    cfg.validate();
    return {{prefix + "branchA.1xk", cfg.row_spec(), h, w},
            {prefix + "branchA.kx1", cfg.col_spec(), h, w},
            {prefix + "branchB.kx1", cfg.col_spec(), h, w},
            {prefix + "branchB.1xk", cfg.row_spec(), h, w},
            {prefix + "residual.conv1", cfg.res1_spec(), h, w},
            {prefix + "residual.conv2", cfg.res2_spec(), h, w}};
}

inline GraphDesc frm_graph(const FrmConfig& cfg, const std::string& prefix, int h, int w) {
    cfg.validate();
    GraphDesc g;
    const auto specs = cfg.layer_specs();
    static const char* names[5] = {"conv1_1x1", "conv2_3x3", "conv3_1x1", "conv4_3x3", "conv5_1x1"};
    for (size_t i = 0; i < specs.size(); ++i)
        g.push_back({prefix + names[i], specs[i], h, w});
    return g;
}

inline GraphDesc enhanced_neck_graph(const NeckConfig& cfg) {
    cfg.validate();
    GraphDesc g;
    const int L = cfg.pyramid.levels;
    for (int i = 0; i < L; ++i) {
        GraphDesc part = gsnet_graph(cfg.gsnet_at(i), "L" + std::to_string(i) + ".gsnet.",
                                     cfg.pyramid.h_at(i), cfg.pyramid.w_at(i));
        g.insert(g.end(), part.begin(), part.end());
    }
    for (int i = 0; i + 1 < L; ++i) {
        GraphDesc part = frm_graph(cfg.frm_at(i), "L" + std::to_string(i) + ".frm.",
                                   cfg.pyramid.h_at(i), cfg.pyramid.w_at(i));
        g.insert(g.end(), part.begin(), part.end());
    }
    if (cfg.top_level_policy == TopLevelPolicy::Project1x1)
        g.push_back({"top.project_1x1", cfg.top_proj_spec(), cfg.pyramid.h_at(L - 1),
                     cfg.pyramid.w_at(L - 1)});
    return g;
}

inline GraphDesc baseline_fpn_graph(const NeckConfig& cfg) {
    cfg.validate();
    GraphDesc g;
    for (int i = 0; i < cfg.pyramid.levels; ++i) {
        const std::string p = "L" + std::to_string(i) + ".fpn.";
        g.push_back({p + "lateral_1x1",
                     ConvSpec::same(cfg.pyramid.channel_at(i), cfg.lateral_channels, 1, 1),
                     cfg.pyramid.h_at(i), cfg.pyramid.w_at(i)});
        g.push_back({p + "smooth_3x3",
                     ConvSpec::same(cfg.lateral_channels, cfg.lateral_channels, 3, 3),
                     cfg.pyramid.h_at(i), cfg.pyramid.w_at(i)});
    }
    return g;
}

// ---------------------------------------------------------------------------
// effective receptive field
// ---------------------------------------------------------------------------

struct ErfReport {
    int level = 0;
    int coord_y = 0, coord_x = 0;
    Tensor<double> grad_map;
    int box_y0 = 0, box_x0 = 0, box_y1 = -1, box_x1 = -1; // inclusive; empty if y1 < y0
    int64_t support_cardinality = 0;                      // spatial positions
    double threshold = 0;
};

// Support of a gradient map: exact zero for synthetic positive-weight setups,
// relative 1e-12 otherwise.
inline ErfReport erf_from_grad(const Tensor<double>& grad, bool exact_zero) {
    ErfReport r;
    r.grad_map = grad;
    double maxabs = 0;
    for (int64_t i = 0; i < grad.numel(); ++i) maxabs = std::max(maxabs, std::abs(grad[i]));
    r.threshold = exact_zero ? 0.0 : 1e-12 * maxabs;
    const Shape4 s = grad.shape();
    r.box_y0 = static_cast<int>(s.h);
    r.box_x0 = static_cast<int>(s.w);
    for (int64_t y = 0; y < s.h; ++y)
        for (int64_t x = 0; x < s.w; ++x) {
            bool hit = false;
            for (int64_t n = 0; n < s.n && !hit; ++n)
                for (int64_t c = 0; c < s.c && !hit; ++c)
                    hit = std::abs(grad.at(n, c, y, x)) > r.threshold;
            if (!hit) continue;
            ++r.support_cardinality;
            r.box_y0 = std::min<int>(r.box_y0, static_cast<int>(y));
            r.box_x0 = std::min<int>(r.box_x0, static_cast<int>(x));
            r.box_y1 = std::max<int>(r.box_y1, static_cast<int>(y));
            r.box_x1 = std::max<int>(r.box_x1, static_cast<int>(x));
        }
    if (r.support_cardinality == 0) { r.box_y0 = r.box_x0 = 0; r.box_y1 = r.box_x1 = -1; }
    return r;
}

// Gradient of one output unit (channel 0 at coord) of the enhanced neck w.r.t.
// the same level's input.
inline ErfReport erf_map_neck(const NeckConfig& cfg, const NeckParams<double>& params,
                              const PyramidFeatures<double>& feats, int level, int y, int x,
                              bool exact_zero = false) {
    cfg.validate();
    if (level < 0 || level >= cfg.pyramid.levels) throw LookupError("erf level out of range");
    Tape<double> tape;
    std::vector<ValueId> in;
    for (const auto& t : feats.levels) in.push_back(tape.leaf(t));
    NeckTapeIds ids = enhanced_neck_nodes(tape, in, cfg, params);
    const Tensor<double>& out = tape.value(ids.outputs[static_cast<size_t>(level)]);
    if (y < 0 || y >= out.shape().h || x < 0 || x >= out.shape().w)
        throw LookupError("erf coordinate out of range for level output " + out.shape().str());
    Tensor<double> seed = Tensor<double>::zeros(out.shape());
    seed.at(0, 0, y, x) = 1.0;
    GradientSet<double> grads = tape.backward(ids.outputs[static_cast<size_t>(level)], seed);
    ErfReport r = erf_from_grad(grads.grad(in[static_cast<size_t>(level)]), exact_zero);
    r.level = level;
    r.coord_y = y;
    r.coord_x = x;
    return r;
}

// ---------------------------------------------------------------------------
// gradient checking (f64, central differences)
// ---------------------------------------------------------------------------

struct GradcheckOptions {
    double eps = 1e-5;
    double tol = 1e-6;
    uint64_t seed = 0;
    int max_coords = 64;         // sampled coordinates per leaf group
    double selftest_grad_scale = 1.0; // != 1 corrupts analytic grads; negative-control fixture
};

struct GradcheckReport {
    struct Group {
        std::string name;
        double max_rel_err = 0;
        int checked = 0;
        int skipped = 0; // coordinates excluded for crossing a ReLU kink
    };
    std::vector<Group> groups;
    double eps = 0, tol = 0;
    bool pass = false;

    double max_rel_err() const {
        double m = 0;
        for (const auto& g : groups) m = std::max(m, g.max_rel_err);
        return m;
    }
};

using NamedLeaves = std::vector<std::pair<std::string, Tensor<double>>>;
// builds the graph over the given leaf ids; every returned output enters the
// scalar test loss with its own random contraction
using GraphBuilder =
    std::function<std::vector<ValueId>(Tape<double>&, const std::vector<ValueId>&)>;

inline GradcheckReport gradcheck(const GraphBuilder& build, const NamedLeaves& leaves,
                                 GradcheckOptions opt = {}) {
    // extended-precision accumulation keeps central-difference roundoff well
    // below the 1e-6 tolerance
    auto contract = [](const Tape<double>& t, const std::vector<ValueId>& outs,
                       const std::vector<Tensor<double>>& seeds) {
        long double l = 0;
        for (size_t o = 0; o < outs.size(); ++o) {
            const Tensor<double>& v = t.value(outs[o]);
            for (int64_t i = 0; i < v.numel(); ++i)
                l += static_cast<long double>(seeds[o][i]) * v[i];
        }
        return l;
    };
    auto run = [&](const std::vector<Tensor<double>>& vals, const std::vector<Tensor<double>>& seeds,
                   long double* loss, std::vector<uint8_t>* pattern) {
        Tape<double> tape;
        std::vector<ValueId> ids;
        for (const auto& v : vals) ids.push_back(tape.leaf(v));
        std::vector<ValueId> outs = build(tape, ids);
        if (loss) *loss = contract(tape, outs, seeds);
        if (pattern) *pattern = tape.relu_sign_pattern();
    };

    std::vector<Tensor<double>> base;
    for (const auto& [name, t] : leaves) base.push_back(t);

    // base pass: output shapes, analytic gradients, reference relu pattern
    Tape<double> tape;
    std::vector<ValueId> ids;
    for (const auto& v : base) ids.push_back(tape.leaf(v));
    std::vector<ValueId> outs = build(tape, ids);
    if (outs.empty()) throw ConfigError("gradcheck graph has no outputs");
    const std::vector<uint8_t> base_pattern = tape.relu_sign_pattern();
    std::vector<Tensor<double>> loss_seed;
    for (size_t o = 0; o < outs.size(); ++o)
        loss_seed.push_back(Tensor<double>::uniform(tape.value(outs[o]).shape(),
                                                    mix_seed(opt.seed, 77 + o), 0.5, 1.5));
    // accumulate d(loss)/d(leaf) over all outputs
    std::vector<Tensor<double>> analytic;
    for (size_t g = 0; g < leaves.size(); ++g)
        analytic.push_back(Tensor<double>::zeros(base[g].shape()));
    for (size_t o = 0; o < outs.size(); ++o) {
        GradientSet<double> gs = tape.backward(outs[o], loss_seed[o]);
        for (size_t g = 0; g < leaves.size(); ++g)
            analytic[g] = elementwise_add(analytic[g], gs.grad(ids[g]));
    }

    GradcheckReport report;
    report.eps = opt.eps;
    report.tol = opt.tol;
    for (size_t g = 0; g < leaves.size(); ++g) {
        GradcheckReport::Group group;
        group.name = leaves[g].first;
        const Tensor<double>& agrad = analytic[g];
        const int64_t n = base[g].numel();

        std::vector<int64_t> coords;
        if (n <= opt.max_coords) {
            for (int64_t i = 0; i < n; ++i) coords.push_back(i);
        } else {
            uint64_t state = mix_seed(opt.seed, 1000 + g);
            std::set<int64_t> seen;
            while (static_cast<int>(seen.size()) < opt.max_coords)
                seen.insert(static_cast<int64_t>(splitmix64_next(state) % static_cast<uint64_t>(n)));
            coords.assign(seen.begin(), seen.end());
        }

        for (int64_t i : coords) {
            std::vector<Tensor<double>> vals = base;
            vals[g][i] = base[g][i] + opt.eps;
            long double lp = 0;
            std::vector<uint8_t> pp;
            run(vals, loss_seed, &lp, &pp);
            vals[g][i] = base[g][i] - opt.eps;
            long double lm = 0;
            std::vector<uint8_t> pm;
            run(vals, loss_seed, &lm, &pm);
            // skip coordinates whose perturbation crosses a ReLU kink; probing
            // the half steps too catches inputs that dip across zero and back
            // inside the interval (they are only piecewise linear in the step)
            bool kink = pp != pm || pp != base_pattern;
            for (double h : {0.5 * opt.eps, -0.5 * opt.eps}) {
                if (kink) break;
                vals[g][i] = base[g][i] + h;
                std::vector<uint8_t> ph;
                run(vals, loss_seed, nullptr, &ph);
                kink = ph != base_pattern;
            }
            if (kink) {
                ++group.skipped;
                continue;
            }
            const double fd = static_cast<double>((lp - lm) / (2 * opt.eps));
            const double a = agrad[i] * opt.selftest_grad_scale;
            const double rel = std::abs(a - fd) / std::max({1e-8, std::abs(a), std::abs(fd)});
            group.max_rel_err = std::max(group.max_rel_err, rel);
            ++group.checked;
        }
        report.groups.push_back(std::move(group));
    }
    report.pass = true;
    for (const auto& g : report.groups)
        if (g.max_rel_err >= opt.tol) report.pass = false;
    return report;
}

// Flattens the enhanced neck (inputs + every parameter tensor) into a leaf
// list with a builder that rewires it, so the whole neck can be gradchecked.
struct NeckGradcheckProblem {
    NamedLeaves leaves;
    GraphBuilder build;
};

inline NeckGradcheckProblem neck_gradcheck_problem(const NeckConfig& cfg,
                                                   const NeckParams<double>& params,
                                                   const PyramidFeatures<double>& feats) {
    cfg.validate();
    NeckGradcheckProblem prob;
    const int L = cfg.pyramid.levels;

    auto push_layer = [&](const std::string& name, const ConvLayer<double>& l) {
        prob.leaves.emplace_back(name + ".w", l.w);
        if (l.b) prob.leaves.emplace_back(name + ".b", *l.b);
    };
    for (int i = 0; i < L; ++i)
        prob.leaves.emplace_back("input.L" + std::to_string(i), feats.levels[static_cast<size_t>(i)]);
    for (int i = 0; i < L; ++i) {
        const std::string p = "L" + std::to_string(i) + ".gsnet.";
        const GsnetParams<double>& g = params.gsnet[static_cast<size_t>(i)];
        push_layer(p + "a1", g.a1);
        push_layer(p + "a2", g.a2);
        push_layer(p + "b1", g.b1);
        push_layer(p + "b2", g.b2);
        push_layer(p + "r1", g.r1);
        push_layer(p + "r2", g.r2);
    }
    for (int i = 0; i + 1 < L; ++i) {
        const std::string p = "L" + std::to_string(i) + ".frm.conv";
        for (size_t j = 0; j < 5; ++j)
            push_layer(p + std::to_string(j + 1), params.frm[static_cast<size_t>(i)].layers[j]);
    }
    if (cfg.top_level_policy == TopLevelPolicy::Project1x1) push_layer("top", *params.top_proj);

    const bool gsnet_bias_a = cfg.gsnet.bias_asym;
    const bool gsnet_bias_r = cfg.gsnet.bias_residual;
    const bool frm_bias = cfg.frm.has_bias;
    prob.build = [cfg, L, gsnet_bias_a, gsnet_bias_r, frm_bias](
                     Tape<double>& tape, const std::vector<ValueId>& ids) {
        size_t idx = 0;
        auto next = [&]() { return ids.at(idx++); };
        auto next_layer = [&](bool bias) {
            ConvLayerIds l;
            l.w = next();
            if (bias) l.b = next();
            return l;
        };
        std::vector<ValueId> inputs;
        for (int i = 0; i < L; ++i) inputs.push_back(next());
        std::vector<GsnetParamIds> gids;
        for (int i = 0; i < L; ++i) {
            GsnetParamIds g;
            g.a1 = next_layer(gsnet_bias_a);
            g.a2 = next_layer(gsnet_bias_a);
            g.b1 = next_layer(gsnet_bias_a);
            g.b2 = next_layer(gsnet_bias_a);
            g.r1 = next_layer(gsnet_bias_r);
            g.r2 = next_layer(gsnet_bias_r);
            gids.push_back(g);
        }
        std::vector<FrmParamIds> fids;
        for (int i = 0; i + 1 < L; ++i) {
            FrmParamIds f;
            for (auto& l : f.layers) l = next_layer(frm_bias);
            fids.push_back(f);
        }
        ConvLayerIds tids;
        if (cfg.top_level_policy == TopLevelPolicy::Project1x1) tids = next_layer(frm_bias);
        NeckTapeIds wired =
            enhanced_neck_wire(tape, inputs, cfg, std::move(gids), std::move(fids), tids);
        return wired.outputs;
    };
    return prob;
}

// ---------------------------------------------------------------------------
// calibration against the published complexity deltas
// ---------------------------------------------------------------------------

struct CalibrationTarget {
    enum class Module { Gsnet, Frm, Both };
    std::string name;
    Module module = Module::Gsnet;
    double param_delta = 0; // weight elements
    double mac_delta = 0;   // MACs under the mac=1 convention
    int levels = 4;
    int finest_stride = 4;
    int input_hw = 1024;
};

// The six published neck deltas (row differences of the ablation table) at
// 1024x1024 input. Faster R-CNN fuses a 4-level stride-4 pyramid; RetinaNet a
// 5-level stride-8 pyramid.
inline std::vector<CalibrationTarget> table1_targets(const std::string& which) {
    using M = CalibrationTarget::Module;
    std::vector<CalibrationTarget> frcnn = {
        {"faster-rcnn/gsnet", M::Gsnet, 0.49e6, 4.79e9, 4, 4, 1024},
        {"faster-rcnn/frm", M::Frm, 2.33e6, 36.47e9, 4, 4, 1024},
        {"faster-rcnn/both", M::Both, 3.79e6, 48.95e9, 4, 4, 1024},
    };
    std::vector<CalibrationTarget> retina = {
        {"retinanet/gsnet", M::Gsnet, 1.35e6, 5.62e9, 5, 8, 1024},
        {"retinanet/frm", M::Frm, 1.92e6, 10.11e9, 5, 8, 1024},
        {"retinanet/both", M::Both, 3.27e6, 15.74e9, 5, 8, 1024},
    };
    if (which == "faster-rcnn") return frcnn;
    if (which == "retinanet") return retina;
    if (which == "both") {
        frcnn.insert(frcnn.end(), retina.begin(), retina.end());
        return frcnn;
    }
    throw ConfigError("unknown calibration target set '" + which + "'");
}

struct CalibrationSpace {
    std::vector<int> channels{256};
    std::vector<int> ks;                // odd kernel extents
    std::vector<int> depthwise{1, 0};
    std::vector<int> residual_kernels{1, 3};
    std::vector<int> residual_channels; // gsnet hidden widths
    std::vector<int> mid_chs;           // frm widths
    std::vector<int> has_bias{1, 0};
    std::vector<int> top_project{0, 1}; // 0 passthrough, 1 project_1x1

    static CalibrationSpace defaults() {
        CalibrationSpace s;
        for (int k = 3; k <= 31; k += 2) s.ks.push_back(k);
        for (int c = 16; c <= 256; c += 16) {
            s.residual_channels.push_back(c);
            s.mid_chs.push_back(c);
        }
        return s;
    }

    void validate() const {
        for (const auto* v : {&channels, &ks, &depthwise, &residual_kernels, &residual_channels,
                              &mid_chs, &has_bias, &top_project})
            if (v->empty()) throw ConfigError("empty calibration search space");
    }
};

struct CalibrationCandidate {
    std::string desc;
    int64_t params = 0;
    int64_t macs = 0;
    double param_err = 0; // relative to the target delta
    double mac_err = 0;
    double score = 0; // max of the two relative errors
};

struct CalibrationTargetReport {
    CalibrationTarget target;
    std::vector<CalibrationCandidate> top; // best-first, capped
    CalibrationCandidate best;
    CalibrationCandidate best_by_params;
    size_t within_10pct = 0; // by score
    size_t within_10pct_params = 0;
    size_t evaluated = 0;
};

struct CalibrationReport {
    std::vector<CalibrationTargetReport> targets;
    static constexpr size_t kTopN = 10;
};

namespace detail {

inline void calib_tally(CalibrationTargetReport& r, CalibrationCandidate cand) {
    ++r.evaluated;
    if (cand.score <= 0.10) ++r.within_10pct;
    if (cand.param_err <= 0.10) ++r.within_10pct_params;
    if (r.evaluated == 1 || cand.score < r.best.score) r.best = cand;
    if (r.evaluated == 1 || cand.param_err < r.best_by_params.param_err) r.best_by_params = cand;
    auto pos = std::upper_bound(r.top.begin(), r.top.end(), cand,
                                [](const CalibrationCandidate& a, const CalibrationCandidate& b) {
                                    return a.score < b.score;
                                });
    r.top.insert(pos, std::move(cand));
    if (r.top.size() > CalibrationReport::kTopN) r.top.pop_back();
}

inline std::pair<int64_t, int64_t> graph_cost(const GraphDesc& g) {
    const CostReport r = cost_report(g);
    return {r.total_params, r.total_macs};
}

} // namespace detail

inline CalibrationReport calibrate_search(const CalibrationSpace& space,
                                          const std::vector<CalibrationTarget>& targets) {
    space.validate();
    if (targets.empty()) throw ConfigError("no calibration targets");
    using M = CalibrationTarget::Module;
    CalibrationReport report;

    for (const CalibrationTarget& t : targets) {
        if (!(t.param_delta > 0) || !(t.mac_delta > 0))
            throw ConfigError("calibration deltas must be positive");
        CalibrationTargetReport tr;
        tr.target = t;

        auto level_hw = [&](int i) { return t.input_hw / t.finest_stride >> i; };

        auto eval = [&](int64_t params, int64_t macs, const std::string& desc) {
            CalibrationCandidate c;
            c.desc = desc;
            c.params = params;
            c.macs = macs;
            c.param_err = std::abs(static_cast<double>(params) - t.param_delta) / t.param_delta;
            c.mac_err = std::abs(static_cast<double>(macs) - t.mac_delta) / t.mac_delta;
            c.score = std::max(c.param_err, c.mac_err);
            detail::calib_tally(tr, std::move(c));
        };

        // closed-form costs of every candidate module stack over the target pyramid
        auto gsnet_cost = [&](const GsnetConfig& g) {
            int64_t p = 0, m = 0;
            for (int i = 0; i < t.levels; ++i) {
                auto [lp, lm] = detail::graph_cost(gsnet_graph(g, "", level_hw(i), level_hw(i)));
                p += lp;
                m += lm;
            }
            return std::pair{p, m};
        };
        auto frm_cost = [&](const FrmConfig& f, bool project_top) {
            int64_t p = 0, m = 0;
            for (int i = 0; i + 1 < t.levels; ++i) {
                auto [lp, lm] = detail::graph_cost(frm_graph(f, "", level_hw(i), level_hw(i)));
                p += lp;
                m += lm;
            }
            if (project_top) {
                const ConvSpec proj = ConvSpec::same(f.in_ch_x, f.out_ch, 1, 1, 1, f.has_bias);
                p += proj.param_count();
                m += proj.mac_count(level_hw(t.levels - 1), level_hw(t.levels - 1));
            }
            return std::pair{p, m};
        };

        char buf[160];
        for (int ch : space.channels) {
            if (t.module == M::Gsnet || t.module == M::Both) {
                for (int k : space.ks)
                    for (int dw : space.depthwise)
                        for (int rk : space.residual_kernels)
                            for (int rc : space.residual_channels)
                                for (int gb : space.has_bias) {
                                    GsnetConfig g;
                                    g.channels = ch;
                                    g.k = k;
                                    g.depthwise = dw != 0;
                                    g.residual_kernel = rk;
                                    g.residual_channels = rc;
                                    g.bias_asym = g.bias_residual = gb != 0;
                                    auto [gp, gm] = gsnet_cost(g);
                                    if (t.module == M::Gsnet) {
                                        std::snprintf(buf, sizeof buf,
                                                      "gsnet{C=%d k=%d dw=%d rk=%d rc=%d bias=%d}",
                                                      ch, k, dw, rk, rc, gb);
                                        eval(gp, gm, buf);
                                        continue;
                                    }
                                    for (int mid : space.mid_chs)
                                        for (int fb : space.has_bias)
                                            for (int tp : space.top_project) {
                                                FrmConfig f;
                                                f.in_ch_x = f.in_ch_y = ch;
                                                f.mid_ch = mid;
                                                f.out_ch = ch;
                                                f.has_bias = fb != 0;
                                                auto [fp, fm] = frm_cost(f, tp != 0);
                                                std::snprintf(
                                                    buf, sizeof buf,
                                                    "gsnet{C=%d k=%d dw=%d rk=%d rc=%d bias=%d} + "
                                                    "frm{mid=%d bias=%d top=%s}",
                                                    ch, k, dw, rk, rc, gb, mid, fb,
                                                    tp ? "project" : "pass");
                                                eval(gp + fp, gm + fm, buf);
                                            }
                                }
            } else { // Frm
                for (int mid : space.mid_chs)
                    for (int fb : space.has_bias)
                        for (int tp : space.top_project) {
                            FrmConfig f;
                            f.in_ch_x = f.in_ch_y = ch;
                            f.mid_ch = mid;
                            f.out_ch = ch;
                            f.has_bias = fb != 0;
                            auto [fp, fm] = frm_cost(f, tp != 0);
                            std::snprintf(buf, sizeof buf, "frm{C=%d mid=%d bias=%d top=%s}", ch,
                                          mid, fb, tp ? "project" : "pass");
                            eval(fp, fm, buf);
                        }
            }
        }
        report.targets.push_back(std::move(tr));
    }
    return report;
}

// ---------------------------------------------------------------------------
// throughput smoke benchmarking (wall clock; no absolute claims)
// ---------------------------------------------------------------------------

struct BenchReport {
    double mean_ms = 0, p50_ms = 0, p95_ms = 0;
    double items_per_s = 0;
    int iters = 0, warmup = 0;
};

template <class Fn>
BenchReport bench_forward(Fn&& fn, int warmup, int iters) {
    if (iters < 1) throw ConfigError("bench iters must be >= 1");
    if (warmup < 0) throw ConfigError("bench warmup must be >= 0");
    for (int i = 0; i < warmup; ++i) fn();
    std::vector<double> ms;
    ms.reserve(static_cast<size_t>(iters));
    for (int i = 0; i < iters; ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        fn();
        const auto t1 = std::chrono::steady_clock::now();
        ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    std::vector<double> sorted = ms;
    std::sort(sorted.begin(), sorted.end());
    BenchReport r;
    r.iters = iters;
    r.warmup = warmup;
    for (double v : ms) r.mean_ms += v;
    r.mean_ms /= iters;
    r.p50_ms = sorted[static_cast<size_t>((iters - 1) / 2)];
    r.p95_ms = sorted[static_cast<size_t>(std::min<int>(iters - 1, (95 * iters + 99) / 100 - 1))];
    r.items_per_s = r.mean_ms > 0 ? 1000.0 / r.mean_ms : 0;
    return r;
}

} // namespace gsneck
