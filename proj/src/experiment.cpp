#include "vemeta/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ostream>
#include <random>
#include <thread>

#include "vemeta/errors.hpp"

namespace vemeta {

using nlohmann::json;

unsigned thread_cap() {
    if (const char* env = std::getenv("VEMETA_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

namespace {

ExperimentRecord run_one(const SweepRequest& req, double value, SchemeId scheme,
                         std::uint64_t seed) {
    ExperimentRecord rec;
    rec.axis = req.axis;
    rec.value = value;
    rec.scheme = scheme;
    rec.seed = seed;
    auto start = std::chrono::steady_clock::now();
    GeneratedScenario gen = generate_scenario(req.spec, seed);
    apply_axis(gen.cfg, req.spec.defaults, req.axis, value);
    SolveReport rep = solve_scheme(gen.cfg, scheme, req.options);
    auto stop = std::chrono::steady_clock::now();
    rec.feasible = rep.feasible;
    rec.converged = rep.converged;
    rec.outer_iters = rep.outer_iters;
    if (rep.feasible) {
        rec.utility = rep.utility_trace.back();
        rec.e_cv = rep.breakdown.e_cv;
        rec.e_com = rep.breakdown.e_com;
        rec.e_ser = rep.breakdown.e_ser;
    }
    if (req.measure_wall_time)
        rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
    return rec;
}

}  // namespace

std::vector<ExperimentRecord> run_sweep(const SweepRequest& req) {
    if (!is_sweep_axis(req.axis)) throw ConfigError("unknown sweep axis '" + req.axis + "'");
    const std::size_t S = req.schemes.size();
    const std::size_t D = req.seeds.size();
    const std::size_t total = req.values.size() * S * D;
    std::vector<ExperimentRecord> rows(total);

    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto worker = [&]() {
        for (std::size_t i = next++; i < total && !failed; i = next++) {
            std::size_t vi = i / (S * D);
            std::size_t si = (i / D) % S;
            std::size_t di = i % D;
            try {
                rows[i] = run_one(req, req.values[vi], req.schemes[si], req.seeds[di]);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };

    unsigned threads = req.threads == 0 ? thread_cap() : req.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(total, 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (error) std::rethrow_exception(error);
    return rows;
}

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\r\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

void write_sweep_csv(std::ostream& out, const std::vector<ExperimentRecord>& rows) {
    out << "axis,value,scheme,seed,utility,e_cv,e_com,e_ser,outer_iters,wall_ms\n";
    const double nan = std::nan("");
    for (const auto& r : rows) {
        out << csv_escape(r.axis) << ',' << format_number(r.value) << ','
            << csv_escape(std::string(scheme_name(r.scheme))) << ',' << r.seed << ','
            << format_number(r.feasible ? r.utility : nan) << ','
            << format_number(r.feasible ? r.e_cv : nan) << ','
            << format_number(r.feasible ? r.e_com : nan) << ','
            << format_number(r.feasible ? r.e_ser : nan) << ',' << r.outer_iters << ','
            << format_number(r.wall_ms) << '\n';
    }
}

namespace {

json allocation_json(const Allocation& a) {
    return json{{"f", a.f}, {"P", a.P}, {"s", a.s}, {"fs", a.fs}};
}

json scenario_json(const ScenarioConfig& cfg) {
    json vehicles = json::array();
    for (const auto& v : cfg.vehicles) {
        vehicles.push_back({{"kappa", v.kappa},
                            {"zeta", v.zeta},
                            {"workload_C", v.workload_C},
                            {"B", v.bandwidth_B},
                            {"channel_h", v.channel_h},
                            {"c", v.cycles_per_bit_c},
                            {"rho", v.rho},
                            {"beta", v.beta},
                            {"gamma", v.gamma},
                            {"delta", v.delta},
                            {"p_max", v.p_max},
                            {"f_min", v.f_min},
                            {"f_max", v.f_max}});
    }
    return json{{"T", cfg.T},
                {"F", cfg.F},
                {"sigma2", cfg.sigma2},
                {"phi", cfg.phi},
                {"kappa_ser", cfg.kappa_ser},
                {"acc_a", cfg.acc_a},
                {"acc_b", cfg.acc_b},
                {"size_grid", cfg.size_grid},
                {"seed", cfg.rng_seed},
                {"vehicles", vehicles}};
}

json audit_json(const ConstraintAudit& audit) {
    static constexpr const char* names[] = {"C1", "C2", "C3", "C4", "C5", "C6", "C7"};
    json slack = json::object();
    for (std::size_t c = 0; c < kConstraintCount; ++c)
        slack[names[c]] = std::isfinite(audit.worst_slack[c]) ? json(audit.worst_slack[c]) : json();
    json failing = json::array();
    for (std::size_t n = 0; n < audit.vehicles.size(); ++n)
        if (!audit.vehicles[n].passed()) failing.push_back(n);
    return json{{"passed", audit.passed()}, {"C3", audit.c3}, {"worst_slack", slack},
                {"failing_vehicles", failing}};
}

}  // namespace

json report_to_json(const SolveReport& rep, const ScenarioConfig& cfg, SchemeId scheme,
                    const GeneratedScenario* gen) {
    json diagnostics = json::array();
    for (const auto& d : rep.diagnostics)
        diagnostics.push_back({{"power_iters_max", d.power_iters_max},
                               {"power_converged", d.power_converged},
                               {"dual_iters", d.dual_iters},
                               {"dual_converged", d.dual_converged}});
    json j{{"scheme", std::string(scheme_name(scheme))},
           {"converged", rep.converged},
           {"feasible", rep.feasible},
           {"outer_iters", rep.outer_iters},
           {"utility_trace", rep.utility_trace},
           {"diagnostics", diagnostics},
           {"audit", audit_json(rep.audit)},
           {"scenario", scenario_json(cfg)}};
    if (!rep.failure.empty()) j["failure"] = rep.failure;
    if (!rep.allocations.empty()) {
        j["allocation"] = allocation_json(rep.final_allocation());
        j["energy"] = {{"profit", rep.breakdown.profit},
                       {"e_cv", rep.breakdown.e_cv},
                       {"e_com", rep.breakdown.e_com},
                       {"e_ser", rep.breakdown.e_ser}};
    }
    if (gen)
        j["generator"] = {{"version", kGeneratorVersion},
                          {"rejections", gen->rejections},
                          {"feasible_at_init", gen->feasible_at_init}};
    return j;
}

namespace {

double max_abs_change(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

void write_trace_csv(std::ostream& out, const SolveReport& rep) {
    out << "iter,utility,ds,dP,df,dfs\n";
    for (std::size_t l = 0; l < rep.utility_trace.size(); ++l) {
        double ds = 0, dP = 0, df = 0, dfs = 0;
        if (l > 0) {
            const Allocation& a = rep.allocations[l];
            const Allocation& b = rep.allocations[l - 1];
            ds = max_abs_change(a.s, b.s);
            dP = max_abs_change(a.P, b.P);
            df = max_abs_change(a.f, b.f);
            dfs = max_abs_change(a.fs, b.fs);
        }
        out << l << ',' << format_number(rep.utility_trace[l]) << ',' << format_number(ds) << ','
            << format_number(dP) << ',' << format_number(df) << ',' << format_number(dfs) << '\n';
    }
}

void write_power_trace(std::ostream& out, const PowerResult& res) {
    out << "iter,t_lower,t_upper\n";
    for (const auto& st : res.trace)
        out << st.iter << ',' << format_number(st.t_lower) << ',' << format_number(st.t_upper)
            << '\n';
}

void write_dual_trace(std::ostream& out, const DualResult& res,
                      const std::vector<std::size_t>& vehicles) {
    out << "iter,nu";
    for (std::size_t k = 0; k < vehicles.size(); ++k) out << ",mu_" << vehicles[k];
    out << '\n';
    for (const auto& p : res.trace) {
        out << p.iter << ',' << format_number(p.nu);
        for (std::size_t k : vehicles) out << ',' << format_number(p.mu[k]);
        out << '\n';
    }
}

void write_utility_trace(std::ostream& out, const SolveReport& rep) {
    out << "iter,utility\n";
    for (std::size_t l = 0; l < rep.utility_trace.size(); ++l)
        out << l << ',' << format_number(rep.utility_trace[l]) << '\n';
}

std::vector<std::size_t> sample_vehicles(std::size_t n_vehicles, std::size_t count,
                                         std::uint64_t seed) {
    std::vector<std::size_t> idx(n_vehicles);
    for (std::size_t i = 0; i < n_vehicles; ++i) idx[i] = i;
    std::mt19937_64 rng(seed);
    count = std::min(count, n_vehicles);
    // Partial Fisher-Yates with a portable bounded draw.
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t span = n_vehicles - i;
        std::size_t j = i + static_cast<std::size_t>(rng() % span);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace vemeta
