#include "evmag/config_json.hpp"

#include <cmath>
#include <fstream>

#include "evmag/error.hpp"

namespace evmag {

namespace {

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

void require_object(const Json& j, const std::string& path) {
    if (!j.is_object()) throw ConfigError(path + ": expected an object");
}

double read_number(const Json& j, const std::string& key, double fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number()) throw ConfigError(join(path, key) + ": expected a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) throw ConfigError(join(path, key) + ": must be finite");
    return d;
}

long long read_int(const Json& j, const std::string& key, long long fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number_integer()) throw ConfigError(join(path, key) + ": expected an integer");
    return v.get<long long>();
}

bool read_bool(const Json& j, const std::string& key, bool fallback, const std::string& path) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_boolean()) throw ConfigError(join(path, key) + ": expected true or false");
    return j.at(key).get<bool>();
}

void check(bool ok, const std::string& path, const std::string& key, const std::string& msg) {
    if (!ok) throw ConfigError(join(path, key) + ": " + msg);
}

void reject_unknown(const Json& j, std::initializer_list<const char*> known, const std::string& path) {
    for (const auto& [k, _] : j.items()) {
        bool found = false;
        for (const char* name : known) found = found || k == name;
        if (!found) throw ConfigError(join(path, k) + ": unknown field");
    }
}

}  // namespace

Json to_json(const SimConfig& c) {
    return {{"c", c.c}, {"log_floor", c.log_floor}, {"noise_rate", c.noise_rate}, {"seed", c.seed}};
}

Json to_json(const SolverConfig& c) {
    return {{"window", c.window},
            {"reg_lambda", c.reg_lambda},
            {"min_eig", c.min_eig},
            {"intensity_floor", c.intensity_floor}};
}

Json to_json(const FilterSpec& c) { return {{"fps", c.fps}, {"f_lo", c.f_lo}, {"f_hi", c.f_hi}}; }

std::string trajectory_kind_name(Trajectory::Kind k) {
    return k == Trajectory::Kind::Sinusoid ? "sinusoid" : "spline";
}

Json to_json(const Trajectory& t) {
    return {{"kind", trajectory_kind_name(t.kind)},
            {"amplitude_px", t.amplitude_px},
            {"freq_hz", t.freq_hz},
            {"phase", t.phase},
            {"direction", {t.direction.x, t.direction.y}},
            {"n_frames", t.n_frames},
            {"fps", t.fps},
            {"seed", t.seed},
            {"spline_spacing", t.spline_spacing}};
}

Json to_json(const DatasetConfig& c) {
    Json j = {{"n_scenes", c.n_scenes},
              {"seed", c.seed},
              {"out_width", c.out_width},
              {"out_height", c.out_height},
              {"supersample", c.supersample},
              {"n_frames", c.n_frames},
              {"fps", c.fps},
              {"alpha_min", c.alpha_min},
              {"alpha_max", c.alpha_max},
              {"amplitude_min", c.amplitude_min},
              {"amplitude_max", c.amplitude_max},
              {"freq_min", c.freq_min},
              {"freq_max", c.freq_max},
              {"spline_fraction", c.spline_fraction},
              {"write_16bit", c.write_16bit},
              {"sim", to_json(c.sim)}};
    j["background_dir"] = c.background_dir ? Json(c.background_dir->string()) : Json(nullptr);
    j["foreground_dir"] = c.foreground_dir ? Json(c.foreground_dir->string()) : Json(nullptr);
    return j;
}

Json to_json(const Manifest& m) {
    Json scenes = Json::array();
    for (const SceneRecord& s : m.scenes) {
        scenes.push_back({{"index", s.index},
                          {"dir", s.dir},
                          {"seed", s.seed},
                          {"alpha_mag", s.alpha_mag},
                          {"trajectory", to_json(s.trajectory)},
                          {"n_events", s.n_events},
                          {"files",
                           {{"small", s.dir + "/small"},
                            {"magnified", s.dir + "/magnified"},
                            {"events", s.dir + "/events.evmg"},
                            {"gt_motion", s.dir + "/gt_motion.csv"},
                            {"scene", s.dir + "/scene.json"}}}});
    }
    return {{"format", "evmag-dataset/1"}, {"config", to_json(m.config)}, {"scenes", scenes}};
}

SimConfig sim_config_from_json(const Json& j, SimConfig c, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"c", "log_floor", "noise_rate", "seed"}, path);
    c.c = read_number(j, "c", c.c, path);
    check(c.c > 0.0, path, "c", "must be > 0");
    c.log_floor = read_number(j, "log_floor", c.log_floor, path);
    check(c.log_floor > 0.0, path, "log_floor", "must be > 0");
    c.noise_rate = read_number(j, "noise_rate", c.noise_rate, path);
    check(c.noise_rate >= 0.0, path, "noise_rate", "must be >= 0");
    const long long seed = read_int(j, "seed", static_cast<long long>(c.seed), path);
    check(seed >= 0, path, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    return c;
}

SolverConfig solver_config_from_json(const Json& j, SolverConfig c, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"window", "reg_lambda", "min_eig", "intensity_floor"}, path);
    const long long w = read_int(j, "window", c.window, path);
    check(w >= 1 && w % 2 == 1 && w < 10000, path, "window", "must be an odd integer >= 1");
    c.window = static_cast<int>(w);
    c.reg_lambda = read_number(j, "reg_lambda", c.reg_lambda, path);
    check(c.reg_lambda >= 0.0, path, "reg_lambda", "must be >= 0");
    c.min_eig = read_number(j, "min_eig", c.min_eig, path);
    check(c.min_eig >= 0.0, path, "min_eig", "must be >= 0");
    c.intensity_floor = read_number(j, "intensity_floor", c.intensity_floor, path);
    check(c.intensity_floor > 0.0, path, "intensity_floor", "must be > 0");
    return c;
}

FilterSpec filter_spec_from_json(const Json& j, FilterSpec c, const std::string& path) {
    require_object(j, path);
    reject_unknown(j, {"fps", "f_lo", "f_hi"}, path);
    c.fps = read_number(j, "fps", c.fps, path);
    c.f_lo = read_number(j, "f_lo", c.f_lo, path);
    c.f_hi = read_number(j, "f_hi", c.f_hi, path);
    check(c.f_lo >= 0.0, path, "f_lo", "must be >= 0");
    check(c.f_hi > c.f_lo, path, "f_hi", "must exceed f_lo");
    // fps <= 0 means "derive from the output frame rate"
    if (c.fps > 0.0) check(c.f_hi <= c.fps / 2.0, path, "f_hi", "must not exceed fps/2");
    return c;
}

Trajectory trajectory_from_json(const Json& j, Trajectory t, const std::string& path) {
    require_object(j, path);
    reject_unknown(j,
                   {"kind", "amplitude_px", "freq_hz", "phase", "direction", "n_frames", "fps", "seed",
                    "spline_spacing"},
                   path);
    if (j.contains("kind")) {
        const Json& k = j.at("kind");
        check(k.is_string(), path, "kind", "expected \"sinusoid\" or \"spline\"");
        const auto s = k.get<std::string>();
        check(s == "sinusoid" || s == "spline", path, "kind", "expected \"sinusoid\" or \"spline\"");
        t.kind = s == "sinusoid" ? Trajectory::Kind::Sinusoid : Trajectory::Kind::Spline;
    }
    t.amplitude_px = read_number(j, "amplitude_px", t.amplitude_px, path);
    t.freq_hz = read_number(j, "freq_hz", t.freq_hz, path);
    t.phase = read_number(j, "phase", t.phase, path);
    if (j.contains("direction")) {
        const Json& d = j.at("direction");
        check(d.is_array() && d.size() == 2 && d[0].is_number() && d[1].is_number(), path, "direction",
              "expected [x, y]");
        t.direction = {d[0].get<double>(), d[1].get<double>()};
    }
    t.n_frames = static_cast<int>(read_int(j, "n_frames", t.n_frames, path));
    t.fps = read_number(j, "fps", t.fps, path);
    const long long seed = read_int(j, "seed", static_cast<long long>(t.seed), path);
    check(seed >= 0, path, "seed", "must be >= 0");
    t.seed = static_cast<std::uint64_t>(seed);
    t.spline_spacing = static_cast<int>(read_int(j, "spline_spacing", t.spline_spacing, path));
    try {
        t.validate();
    } catch (const InvalidArgument& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return t;
}

DatasetConfig dataset_config_from_json(const Json& j, DatasetConfig c, const std::string& path) {
    require_object(j, path);
    reject_unknown(j,
                   {"n_scenes", "seed", "out_width", "out_height", "supersample", "n_frames", "fps", "alpha_min",
                    "alpha_max", "amplitude_min", "amplitude_max", "freq_min", "freq_max", "spline_fraction",
                    "write_16bit", "sim", "background_dir", "foreground_dir"},
                   path);
    c.n_scenes = static_cast<int>(read_int(j, "n_scenes", c.n_scenes, path));
    check(c.n_scenes >= 1, path, "n_scenes", "must be >= 1");
    const long long seed = read_int(j, "seed", static_cast<long long>(c.seed), path);
    check(seed >= 0, path, "seed", "must be >= 0");
    c.seed = static_cast<std::uint64_t>(seed);
    c.out_width = static_cast<int>(read_int(j, "out_width", c.out_width, path));
    check(c.out_width >= 16, path, "out_width", "must be >= 16");
    c.out_height = static_cast<int>(read_int(j, "out_height", c.out_height, path));
    check(c.out_height >= 16, path, "out_height", "must be >= 16");
    c.supersample = static_cast<int>(read_int(j, "supersample", c.supersample, path));
    check(c.supersample >= 1, path, "supersample", "must be >= 1");
    c.n_frames = static_cast<int>(read_int(j, "n_frames", c.n_frames, path));
    check(c.n_frames >= 2, path, "n_frames", "must be >= 2");
    c.fps = read_number(j, "fps", c.fps, path);
    check(c.fps > 0.0, path, "fps", "must be > 0");
    c.alpha_min = read_number(j, "alpha_min", c.alpha_min, path);
    c.alpha_max = read_number(j, "alpha_max", c.alpha_max, path);
    check(c.alpha_min >= 0.0, path, "alpha_min", "must be >= 0");
    check(c.alpha_max >= c.alpha_min, path, "alpha_max", "must be >= alpha_min");
    c.amplitude_min = read_number(j, "amplitude_min", c.amplitude_min, path);
    c.amplitude_max = read_number(j, "amplitude_max", c.amplitude_max, path);
    check(c.amplitude_min > 0.0, path, "amplitude_min", "must be > 0");
    check(c.amplitude_max >= c.amplitude_min, path, "amplitude_max", "must be >= amplitude_min");
    c.freq_min = read_number(j, "freq_min", c.freq_min, path);
    c.freq_max = read_number(j, "freq_max", c.freq_max, path);
    check(c.freq_min > 0.0, path, "freq_min", "must be > 0");
    check(c.freq_max >= c.freq_min, path, "freq_max", "must be >= freq_min");
    check(c.freq_max < c.fps / 2.0, path, "freq_max", "must be below fps/2");
    c.spline_fraction = read_number(j, "spline_fraction", c.spline_fraction, path);
    check(c.spline_fraction >= 0.0 && c.spline_fraction <= 1.0, path, "spline_fraction", "must be within [0, 1]");
    c.write_16bit = read_bool(j, "write_16bit", c.write_16bit, path);
    if (j.contains("sim")) c.sim = sim_config_from_json(j.at("sim"), c.sim, join(path, "sim"));
    for (const char* key : {"background_dir", "foreground_dir"}) {
        if (!j.contains(key) || j.at(key).is_null()) continue;
        check(j.at(key).is_string(), path, key, "expected a path string");
        auto& dst = std::string(key) == "background_dir" ? c.background_dir : c.foreground_dir;
        dst = j.at(key).get<std::string>();
    }
    return c;
}

Json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path);
    try {
        return Json::parse(in);
    } catch (const Json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

void save_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path);
    out << j.dump(2) << '\n';
    if (!out) throw IoError("short write to " + path);
}

}  // namespace evmag
