#include "vemeta/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include <json.hpp>

#include "vemeta/errors.hpp"

namespace vemeta {

using nlohmann::json;

namespace {

// Uniform in [0, 1) built from the top 53 bits, identical on every platform.
double canonical(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Squared magnitude of a unit-power circularly symmetric complex Gaussian.
double draw_fading(std::mt19937_64& rng) {
    double u1 = 1.0 - canonical(rng);
    double u2 = canonical(rng);
    double r = std::sqrt(-2.0 * std::log(u1));
    double re = r * std::cos(2.0 * std::numbers::pi * u2);
    double im = r * std::sin(2.0 * std::numbers::pi * u2);
    return 0.5 * (re * re + im * im);
}

VehicleProfile base_profile(const FleetDefaults& d) {
    VehicleProfile v;
    v.kappa = d.kappa;
    v.zeta = d.zeta;
    v.workload_C = d.workload_C;
    v.bandwidth_B = d.B;
    v.cycles_per_bit_c = d.c;
    v.rho = d.rho;
    v.beta = d.beta;
    v.gamma = d.gamma;
    v.delta = d.delta;
    v.p_max = d.p_max;
    v.f_min = d.f_min;
    v.f_max = d.f_max;
    return v;
}

void apply_override(VehicleProfile& v, const VehicleOverride& o) {
    if (o.kappa) v.kappa = *o.kappa;
    if (o.zeta) v.zeta = *o.zeta;
    if (o.workload_C) v.workload_C = *o.workload_C;
    if (o.B) v.bandwidth_B = *o.B;
    if (o.channel_h) v.channel_h = *o.channel_h;
    if (o.c) v.cycles_per_bit_c = *o.c;
    if (o.rho) v.rho = *o.rho;
    if (o.beta) v.beta = *o.beta;
    if (o.gamma) v.gamma = *o.gamma;
    if (o.delta) v.delta = *o.delta;
    if (o.p_max) v.p_max = *o.p_max;
    if (o.f_min) v.f_min = *o.f_min;
    if (o.f_max) v.f_max = *o.f_max;
}

}  // namespace

double channel_gain(double theta_db, double exponent, double distance, double fading) {
    return std::pow(10.0, theta_db / 10.0) * std::pow(distance, -exponent) * fading;
}

std::vector<double> make_size_grid(double s_min, double s_max, double step) {
    if (!(s_min > 0.0) || !(step > 0.0) || s_max < s_min)
        throw ConfigError("invalid size grid bounds");
    std::vector<double> grid;
    for (std::size_t k = 0;; ++k) {
        double g = s_min + static_cast<double>(k) * step;
        if (g > s_max * (1.0 + 1e-12)) break;
        grid.push_back(std::min(g, s_max));
    }
    if (grid.back() < s_max * (1.0 - 1e-12)) grid.push_back(s_max);
    return grid;
}

bool admits_initial_allocation(const ScenarioConfig& cfg) {
    double total = 0.0;
    for (const auto& v : cfg.vehicles) {
        double lower = std::max(cfg.s_min(), min_size_for_accuracy(v.delta, cfg.acc_a, cfg.acc_b));
        auto it = std::find_if(cfg.size_grid.begin(), cfg.size_grid.end(),
                               [&](double g) { return g >= lower * (1.0 - kFeasTol); });
        if (it == cfg.size_grid.end()) return false;
        double x = cfg.phi * (*it) * (*it);
        double window = cfg.T - v.workload_C / v.f_max - x / transmit_rate(v.p_max, v, cfg.sigma2);
        if (!(window > 0.0)) return false;
        total += x * v.cycles_per_bit_c / window;
    }
    return leq_tol(total, cfg.F);
}

GeneratedScenario generate_scenario(const ScenarioSpec& spec, std::uint64_t seed,
                                    std::size_t max_redraws) {
    const FleetDefaults& d = spec.defaults;
    if (d.n_vehicles < 1) throw ConfigError("n_vehicles must be at least 1");
    if (spec.vehicles.size() > d.n_vehicles)
        throw ConfigError("more vehicle overrides than vehicles");

    GeneratedScenario gen;
    ScenarioConfig& cfg = gen.cfg;
    cfg.T = spec.global.T;
    cfg.F = spec.global.F;
    cfg.sigma2 = spec.global.sigma2;
    cfg.phi = spec.global.phi;
    cfg.kappa_ser = spec.global.kappa_ser;
    cfg.acc_a = spec.global.acc_a;
    cfg.acc_b = spec.global.acc_b;
    cfg.rng_seed = seed;
    cfg.size_grid = spec.size_grid.empty() ? make_size_grid(d.s_min, d.s_max, d.s_step)
                                           : spec.size_grid;

    const std::size_t N = d.n_vehicles;
    std::mt19937_64 rng(seed);
    gen.distance.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
        double x = d.area * canonical(rng);
        double y = d.area * canonical(rng);
        double dist = std::hypot(x - 0.5 * d.area, y - 0.5 * d.area);
        gen.distance[n] = std::max(dist, d.d_min);
    }

    cfg.vehicles.assign(N, base_profile(d));
    gen.fading.resize(N);
    for (std::size_t attempt = 0;; ++attempt) {
        for (std::size_t n = 0; n < N; ++n) {
            gen.fading[n] = draw_fading(rng);
            cfg.vehicles[n].channel_h =
                channel_gain(d.theta_db, d.path_loss_exp, gen.distance[n], gen.fading[n]);
        }
        for (std::size_t n = 0; n < spec.vehicles.size(); ++n)
            apply_override(cfg.vehicles[n], spec.vehicles[n]);
        validate(cfg);
        gen.feasible_at_init = admits_initial_allocation(cfg);
        if (gen.feasible_at_init || attempt == max_redraws) break;
        ++gen.rejections;
    }
    return gen;
}

bool is_sweep_axis(std::string_view axis) {
    return std::find(std::begin(kSweepAxes), std::end(kSweepAxes), axis) != std::end(kSweepAxes);
}

void apply_axis(ScenarioConfig& cfg, const FleetDefaults& defaults, std::string_view axis,
                double value) {
    auto for_each_vehicle = [&](auto fn) {
        for (auto& v : cfg.vehicles) fn(v);
    };
    if (axis == "B") {
        for_each_vehicle([&](VehicleProfile& v) { v.bandwidth_B = value; });
    } else if (axis == "f_min") {
        for_each_vehicle([&](VehicleProfile& v) { v.f_min = value; });
    } else if (axis == "delta") {
        for_each_vehicle([&](VehicleProfile& v) { v.delta = value; });
    } else if (axis == "F") {
        cfg.F = value;
    } else if (axis == "T") {
        cfg.T = value;
    } else if (axis == "s_min") {
        cfg.size_grid = make_size_grid(value, cfg.s_max(), defaults.s_step);
    } else if (axis == "s_max") {
        cfg.size_grid = make_size_grid(cfg.s_min(), value, defaults.s_step);
    } else {
        throw ConfigError("unknown sweep axis '" + std::string(axis) + "'");
    }
    validate(cfg);
}

namespace {

class Reader {
public:
    Reader(const json& node, std::string path) : node_(node), path_(std::move(path)) {}

    void require_object() const {
        if (!node_.is_object()) fail("expected an object");
    }

    void allow_only(std::initializer_list<std::string_view> keys) const {
        require_object();
        for (auto it = node_.begin(); it != node_.end(); ++it) {
            if (std::find(keys.begin(), keys.end(), it.key()) == keys.end())
                throw ConfigError(join(it.key()) + ": unknown key");
        }
    }

    std::optional<double> number(std::string_view key) const {
        auto it = node_.find(std::string(key));
        if (it == node_.end()) return std::nullopt;
        if (!it->is_number()) throw ConfigError(join(key) + ": expected a number");
        double x = it->get<double>();
        if (!std::isfinite(x)) throw ConfigError(join(key) + ": expected a finite number");
        return x;
    }

    void positive(std::string_view key, double& out) const {
        if (auto x = number(key)) {
            if (!(*x > 0.0)) throw ConfigError(join(key) + ": must be positive");
            out = *x;
        }
    }

    void positive(std::string_view key, std::optional<double>& out) const {
        if (auto x = number(key)) {
            if (!(*x > 0.0)) throw ConfigError(join(key) + ": must be positive");
            out = x;
        }
    }

    void fraction(std::string_view key, double& out) const {
        if (auto x = number(key)) {
            if (!(*x >= 0.0 && *x < 1.0)) throw ConfigError(join(key) + ": must lie in [0, 1)");
            out = *x;
        }
    }

    void fraction(std::string_view key, std::optional<double>& out) const {
        double tmp = 0.0;
        if (node_.contains(std::string(key))) {
            fraction(key, tmp);
            out = tmp;
        }
    }

    std::string join(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError((path_.empty() ? std::string("<root>") : path_) + ": " + msg);
    }

private:
    const json& node_;
    std::string path_;
};

std::uint64_t read_seed(const json& j, const std::string& path) {
    if (!j.is_number_integer()) throw ConfigError(path + ": expected a nonnegative integer");
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    auto v = j.get<std::int64_t>();
    if (v < 0) throw ConfigError(path + ": expected a nonnegative integer");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

ScenarioSpec parse_config_text(std::string_view text, const std::string& source) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(source + ": " + e.what());
    }

    ScenarioSpec spec;
    Reader top(root, "");
    top.allow_only({"global", "defaults", "vehicles", "size_grid", "sweep", "seed", "scheme"});

    if (root.contains("global")) {
        Reader g(root["global"], "global");
        g.allow_only({"T", "F", "sigma2", "phi", "kappa_ser", "acc_a", "acc_b"});
        g.positive("T", spec.global.T);
        if (auto F = g.number("F")) {
            if (*F < 0.0) throw ConfigError("global.F: must be nonnegative");
            spec.global.F = *F;
        }
        g.positive("sigma2", spec.global.sigma2);
        g.positive("phi", spec.global.phi);
        g.positive("kappa_ser", spec.global.kappa_ser);
        g.positive("acc_a", spec.global.acc_a);
        g.positive("acc_b", spec.global.acc_b);
    }

    if (root.contains("defaults")) {
        const json& dj = root["defaults"];
        Reader d(dj, "defaults");
        d.allow_only({"n_vehicles", "B", "f_min", "f_max", "c", "p_max", "delta", "kappa", "zeta",
                      "workload_C", "rho", "beta", "gamma", "s_min", "s_max", "s_step", "area",
                      "theta_db", "path_loss_exp", "d_min"});
        auto& fd = spec.defaults;
        if (dj.contains("n_vehicles")) {
            const json& nv = dj["n_vehicles"];
            if (!nv.is_number_integer() || nv.get<std::int64_t>() < 1)
                throw ConfigError("defaults.n_vehicles: expected a positive integer");
            fd.n_vehicles = nv.get<std::size_t>();
        }
        d.positive("B", fd.B);
        d.positive("f_min", fd.f_min);
        d.positive("f_max", fd.f_max);
        d.positive("c", fd.c);
        d.positive("p_max", fd.p_max);
        d.fraction("delta", fd.delta);
        d.positive("kappa", fd.kappa);
        d.positive("zeta", fd.zeta);
        d.positive("workload_C", fd.workload_C);
        d.positive("rho", fd.rho);
        d.positive("beta", fd.beta);
        d.positive("gamma", fd.gamma);
        d.positive("s_min", fd.s_min);
        d.positive("s_max", fd.s_max);
        d.positive("s_step", fd.s_step);
        d.positive("area", fd.area);
        if (auto th = d.number("theta_db")) fd.theta_db = *th;
        d.positive("path_loss_exp", fd.path_loss_exp);
        d.positive("d_min", fd.d_min);
        if (fd.f_min > fd.f_max) throw ConfigError("defaults.f_min: exceeds defaults.f_max");
        if (fd.s_min > fd.s_max) throw ConfigError("defaults.s_min: exceeds defaults.s_max");
    }

    if (root.contains("vehicles")) {
        const json& vj = root["vehicles"];
        if (!vj.is_array()) throw ConfigError("vehicles: expected an array");
        for (std::size_t i = 0; i < vj.size(); ++i) {
            Reader r(vj[i], "vehicles[" + std::to_string(i) + "]");
            r.allow_only({"kappa", "zeta", "workload_C", "B", "channel_h", "c", "rho", "beta",
                          "gamma", "delta", "p_max", "f_min", "f_max"});
            VehicleOverride o;
            r.positive("kappa", o.kappa);
            r.positive("zeta", o.zeta);
            r.positive("workload_C", o.workload_C);
            r.positive("B", o.B);
            r.positive("channel_h", o.channel_h);
            r.positive("c", o.c);
            r.positive("rho", o.rho);
            r.positive("beta", o.beta);
            r.positive("gamma", o.gamma);
            r.fraction("delta", o.delta);
            r.positive("p_max", o.p_max);
            r.positive("f_min", o.f_min);
            r.positive("f_max", o.f_max);
            spec.vehicles.push_back(o);
        }
        if (spec.vehicles.size() > spec.defaults.n_vehicles)
            throw ConfigError("vehicles: more entries than defaults.n_vehicles");
    }

    if (root.contains("size_grid")) {
        const json& gj = root["size_grid"];
        if (!gj.is_array() || gj.empty()) throw ConfigError("size_grid: expected a nonempty array");
        for (std::size_t i = 0; i < gj.size(); ++i) {
            std::string p = "size_grid[" + std::to_string(i) + "]";
            if (!gj[i].is_number()) throw ConfigError(p + ": expected a number");
            double g = gj[i].get<double>();
            if (!(g > 0.0)) throw ConfigError(p + ": must be positive");
            if (!spec.size_grid.empty() && !(g > spec.size_grid.back()))
                throw ConfigError(p + ": grid must be strictly ascending");
            spec.size_grid.push_back(g);
        }
    }

    if (root.contains("sweep")) {
        const json& sj = root["sweep"];
        Reader r(sj, "sweep");
        r.allow_only({"axis", "values"});
        SweepPlan plan;
        if (!sj.contains("axis") || !sj["axis"].is_string())
            throw ConfigError("sweep.axis: expected a string");
        plan.axis = sj["axis"].get<std::string>();
        if (!is_sweep_axis(plan.axis))
            throw ConfigError("sweep.axis: unknown axis '" + plan.axis + "'");
        if (!sj.contains("values") || !sj["values"].is_array() || sj["values"].empty())
            throw ConfigError("sweep.values: expected a nonempty array");
        for (std::size_t i = 0; i < sj["values"].size(); ++i) {
            const json& x = sj["values"][i];
            if (!x.is_number())
                throw ConfigError("sweep.values[" + std::to_string(i) + "]: expected a number");
            plan.values.push_back(x.get<double>());
        }
        spec.sweep = std::move(plan);
    }

    if (root.contains("seed")) spec.seed = read_seed(root["seed"], "seed");

    if (root.contains("scheme")) {
        const json& s = root["scheme"];
        if (!s.is_string()) throw ConfigError("scheme: expected a string");
        spec.scheme = s.get<std::string>();
        static constexpr std::string_view names[] = {"Proposed", "FCMS", "FSCP", "FARC"};
        if (std::find(std::begin(names), std::end(names), spec.scheme) == std::end(names))
            throw ConfigError("scheme: unknown scheme '" + spec.scheme + "'");
    }
    return spec;
}

ScenarioSpec parse_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str(), path);
}

}  // namespace vemeta
