#pragma once

#include <bit>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <variant>

#include "json.hpp"

#include "gsneck/analysis.hpp"
#include "gsneck/neck.hpp"

namespace gsneck {

static_assert(std::endian::native == std::endian::little,
              "the .gsnt format is little-endian; big-endian hosts are unsupported");

// ---------------------------------------------------------------------------
// .gsnt binary tensor files
//
//   "GSNT" | u32 version=1 | u32 dtype (1=f32, 2=f64) | u32 rank=4
//   | 4 x u64 dims | row-major payload, little-endian
// ---------------------------------------------------------------------------

inline constexpr char kTensorMagic[4] = {'G', 'S', 'N', 'T'};
inline constexpr uint32_t kTensorVersion = 1;

template <class T>
void write_tensor(const std::string& path, const Tensor<T>& t) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw FormatError("cannot open '" + tmp + "' for writing");
        f.write(kTensorMagic, 4);
        const uint32_t header32[3] = {kTensorVersion, static_cast<uint32_t>(dtype_of<T>()), 4};
        f.write(reinterpret_cast<const char*>(header32), sizeof header32);
        const Shape4 s = t.shape();
        const uint64_t dims[4] = {static_cast<uint64_t>(s.n), static_cast<uint64_t>(s.c),
                                  static_cast<uint64_t>(s.h), static_cast<uint64_t>(s.w)};
        f.write(reinterpret_cast<const char*>(dims), sizeof dims);
        f.write(reinterpret_cast<const char*>(t.data()),
                static_cast<std::streamsize>(t.numel() * static_cast<int64_t>(sizeof(T))));
        if (!f) throw FormatError("short write to '" + tmp + "'");
    }
    std::filesystem::rename(tmp, path);
}

using AnyTensor = std::variant<Tensor<float>, Tensor<double>>;

inline AnyTensor read_tensor(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw FormatError("cannot open '" + path + "'");
    auto fail = [&](const std::string& what, int64_t offset) {
        throw FormatError(path + ": " + what + " at byte offset " + std::to_string(offset));
    };

    char magic[4];
    f.read(magic, 4);
    if (!f || std::memcmp(magic, kTensorMagic, 4) != 0) fail("bad magic", 0);
    uint32_t header32[3];
    f.read(reinterpret_cast<char*>(header32), sizeof header32);
    if (!f) fail("truncated header", 4);
    if (header32[0] != kTensorVersion) fail("unsupported version " + std::to_string(header32[0]), 4);
    if (header32[1] != 1 && header32[1] != 2) fail("unknown dtype code " + std::to_string(header32[1]), 8);
    if (header32[2] != 4) fail("rank must be 4, got " + std::to_string(header32[2]), 12);
    uint64_t dims[4];
    f.read(reinterpret_cast<char*>(dims), sizeof dims);
    if (!f) fail("truncated dims", 16);
    for (uint64_t d : dims)
        if (d > (uint64_t(1) << 48)) fail("implausible dimension", 16);
    const Shape4 shape{static_cast<int64_t>(dims[0]), static_cast<int64_t>(dims[1]),
                       static_cast<int64_t>(dims[2]), static_cast<int64_t>(dims[3])};
    const size_t elem = header32[1] == 1 ? 4 : 8;
    const int64_t payload_off = 48;

    // validate payload length against the header before allocating
    f.seekg(0, std::ios::end);
    const int64_t file_size = static_cast<int64_t>(f.tellg());
    const int64_t expect = payload_off + shape.numel() * static_cast<int64_t>(elem);
    if (file_size != expect)
        fail("payload length " + std::to_string(file_size - payload_off) + " does not match dims " +
                 shape.str(),
             payload_off);
    f.seekg(payload_off);

    if (header32[1] == 1) {
        Tensor<float> t(shape);
        f.read(reinterpret_cast<char*>(t.data()), expect - payload_off);
        if (!f) fail("truncated payload", payload_off);
        return t;
    }
    Tensor<double> t(shape);
    f.read(reinterpret_cast<char*>(t.data()), expect - payload_off);
    if (!f) fail("truncated payload", payload_off);
    return t;
}

template <class T>
Tensor<T> read_tensor_as(const std::string& path) {
    AnyTensor any = read_tensor(path);
    if (auto* t = std::get_if<Tensor<T>>(&any)) return std::move(*t);
    throw FormatError(path + ": tensor dtype does not match the configured dtype");
}

// ---------------------------------------------------------------------------
// run configuration (JSON, strict keys)
// ---------------------------------------------------------------------------

struct AnalysisOptions {
    int flop_per_mac = 1;
    double gradcheck_eps = 1e-5;
    double gradcheck_tol = 1e-6;
    int gradcheck_max_coords = 64;
};

struct BenchOptions {
    int iters = 10;
    int warmup = 2;
};

struct RunConfig {
    NeckConfig neck{};
    uint64_t seed = 0;
    DType dtype = DType::F32;
    AnalysisOptions analysis{};
    BenchOptions bench{};
    CalibrationSpace calibration = CalibrationSpace::defaults();
    std::vector<std::string> applied_defaults; // echoed under --verbose
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown(const json& obj, const char* section,
                           std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed)
            if (it.key() == k) { known = true; break; }
        if (!known)
            throw ConfigError(std::string("unknown key '") + it.key() + "' in " + section);
    }
}

template <class T>
T take(const json& obj, const char* section, const char* key, T fallback,
       std::vector<std::string>& defaults) {
    if (!obj.contains(key)) {
        defaults.push_back(std::string(section) + "." + key);
        return fallback;
    }
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("bad value for '") + section + "." + key + "': " + e.what());
    }
}

} // namespace detail

inline RunConfig parse_config(const std::string& text) {
    using detail::json;
    using detail::reject_unknown;
    using detail::take;

    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw FormatError(std::string("config syntax: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config root must be an object");

    RunConfig cfg;
    auto& defs = cfg.applied_defaults;
    reject_unknown(doc, "config",
                   {"pyramid", "gsnet", "frm", "top_level_policy", "gsnet_global_kernel",
                    "lateral_channels", "seed", "dtype", "analysis", "bench", "calibration"});

    {
        const json p = doc.value("pyramid", json::object());
        reject_unknown(p, "pyramid", {"levels", "base_h", "base_w", "channels", "finest_stride"});
        auto& py = cfg.neck.pyramid;
        py.levels = take(p, "pyramid", "levels", 4, defs);
        py.base_h = take(p, "pyramid", "base_h", 64, defs);
        py.base_w = take(p, "pyramid", "base_w", 64, defs);
        py.finest_stride = take(p, "pyramid", "finest_stride", 4, defs);
        if (p.contains("channels") && p.at("channels").is_array())
            py.channels = p.at("channels").get<std::vector<int>>();
        else
            py.channels = {take(p, "pyramid", "channels", 256, defs)};
    }
    {
        const json g = doc.value("gsnet", json::object());
        reject_unknown(g, "gsnet",
                       {"k", "depthwise", "residual_kernel", "residual_channels", "bias_asym",
                        "bias_residual", "share_branch_weights"});
        auto& gs = cfg.neck.gsnet;
        gs.k = take(g, "gsnet", "k", 15, defs);
        gs.depthwise = take(g, "gsnet", "depthwise", true, defs);
        gs.residual_kernel = take(g, "gsnet", "residual_kernel", 1, defs);
        gs.residual_channels = take(g, "gsnet", "residual_channels", 256, defs);
        gs.bias_asym = take(g, "gsnet", "bias_asym", true, defs);
        gs.bias_residual = take(g, "gsnet", "bias_residual", true, defs);
        gs.share_branch_weights = take(g, "gsnet", "share_branch_weights", false, defs);
        gs.channels = cfg.neck.pyramid.channel_at(0);
    }
    {
        const json f = doc.value("frm", json::object());
        reject_unknown(f, "frm", {"mid_ch", "out_ch", "upsample", "bias", "literal_eq4"});
        auto& fr = cfg.neck.frm;
        fr.mid_ch = take(f, "frm", "mid_ch", 256, defs);
        fr.out_ch = take(f, "frm", "out_ch", 256, defs);
        fr.has_bias = take(f, "frm", "bias", true, defs);
        fr.literal_eq4 = take(f, "frm", "literal_eq4", false, defs);
        const std::string up = take<std::string>(f, "frm", "upsample", "bilinear", defs);
        if (up == "bilinear")
            fr.upsample.mode = UpsampleMode::Bilinear;
        else if (up == "nearest")
            fr.upsample.mode = UpsampleMode::Nearest;
        else
            throw ConfigError("frm.upsample must be 'bilinear' or 'nearest'");
        fr.upsample.factor = 2;
        fr.in_ch_x = fr.in_ch_y = cfg.neck.pyramid.channel_at(0);
    }
    {
        const std::string tp =
            take<std::string>(doc, "config", "top_level_policy", "passthrough", defs);
        if (tp == "passthrough")
            cfg.neck.top_level_policy = TopLevelPolicy::Passthrough;
        else if (tp == "project_1x1")
            cfg.neck.top_level_policy = TopLevelPolicy::Project1x1;
        else
            throw ConfigError("top_level_policy must be 'passthrough' or 'project_1x1'");
        cfg.neck.gsnet_global_kernel = take(doc, "config", "gsnet_global_kernel", false, defs);
        cfg.neck.lateral_channels = take(doc, "config", "lateral_channels", 256, defs);
        cfg.seed = take<uint64_t>(doc, "config", "seed", 0, defs);
        const std::string dt = take<std::string>(doc, "config", "dtype", "f32", defs);
        if (dt == "f32")
            cfg.dtype = DType::F32;
        else if (dt == "f64")
            cfg.dtype = DType::F64;
        else
            throw ConfigError("dtype must be 'f32' or 'f64'");
    }
    {
        const json a = doc.value("analysis", json::object());
        reject_unknown(a, "analysis",
                       {"flop_convention", "gradcheck_eps", "gradcheck_tol", "gradcheck_max_coords"});
        const std::string conv = take<std::string>(a, "analysis", "flop_convention", "mac1", defs);
        if (conv == "mac1")
            cfg.analysis.flop_per_mac = 1;
        else if (conv == "mac2")
            cfg.analysis.flop_per_mac = 2;
        else
            throw ConfigError("analysis.flop_convention must be 'mac1' or 'mac2'");
        cfg.analysis.gradcheck_eps = take(a, "analysis", "gradcheck_eps", 1e-5, defs);
        cfg.analysis.gradcheck_tol = take(a, "analysis", "gradcheck_tol", 1e-6, defs);
        cfg.analysis.gradcheck_max_coords = take(a, "analysis", "gradcheck_max_coords", 64, defs);
    }
    {
        const json b = doc.value("bench", json::object());
        reject_unknown(b, "bench", {"iters", "warmup"});
        cfg.bench.iters = take(b, "bench", "iters", 10, defs);
        cfg.bench.warmup = take(b, "bench", "warmup", 2, defs);
    }
    if (doc.contains("calibration")) {
        const json c = doc.at("calibration");
        reject_unknown(c, "calibration",
                       {"channels", "k", "depthwise", "residual_kernel", "residual_channels",
                        "mid_ch", "has_bias", "top_project"});
        auto take_list = [&](const char* key, std::vector<int>& dst) {
            if (c.contains(key)) dst = c.at(key).get<std::vector<int>>();
        };
        take_list("channels", cfg.calibration.channels);
        take_list("k", cfg.calibration.ks);
        take_list("depthwise", cfg.calibration.depthwise);
        take_list("residual_kernel", cfg.calibration.residual_kernels);
        take_list("residual_channels", cfg.calibration.residual_channels);
        take_list("mid_ch", cfg.calibration.mid_chs);
        take_list("has_bias", cfg.calibration.has_bias);
        take_list("top_project", cfg.calibration.top_project);
        cfg.calibration.validate();
    }

    // semantic validation with key-specific messages before the block-level checks
    if (cfg.neck.gsnet.k % 2 == 0)
        throw ConfigError("gsnet.k must be odd (combined convolutions use same padding), got " +
                          std::to_string(cfg.neck.gsnet.k));
    cfg.neck.validate();
    return cfg;
}

} // namespace gsneck
