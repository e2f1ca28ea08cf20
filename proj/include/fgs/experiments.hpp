#pragma once

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>

#include "fgs/reconstruction.hpp"
#include "fgs/scenarios.hpp"

namespace fgs {

struct SweepConfig {
    std::string scenario;
    std::vector<double> k_list;
    std::vector<std::size_t> m_list;
    int repetitions = 30;
    std::size_t m0 = 0;  // reference sample size per branch
    std::uint64_t seed_base = 0;
    double cutoff = default_cutoff;

    void validate() const {
        if (k_list.empty() || m_list.empty()) throw ConfigError("sweep needs k and M lists");
        if (repetitions < 2) throw ConfigError("sweep needs repetitions >= 2");
        const std::size_t mmax = *std::max_element(m_list.begin(), m_list.end());
        if (m0 < 10 * mmax) throw ConfigError("sweep needs M0 >= 10 * max(M)");
    }
};

struct ErrorSweepRecord {
    std::string scenario;
    double k;
    std::size_t M;
    int repetition;
    double e_s;  // energy-norm distance to the reference field
    double t_sample = 0.0, t_evolve = 0.0, t_reconstruct = 0.0;
};

struct SweepCell {
    double k;
    std::size_t M;
    int repetitions;
    double rms_es;  // sqrt(mean of e_s^2), the tabulated quantity
};

struct SweepResult {
    std::vector<ErrorSweepRecord> records;
    std::vector<SweepCell> summary;
    nlohmann::json manifest;
};

/// Seed discipline: trial (k, M, j) seeds and the per-k reference seed come
/// from disjoint hash streams of (base, scenario, ...).
inline std::uint64_t trial_seed(std::uint64_t base, const std::string& scenario, double k,
                                std::size_t M, int rep) {
    std::uint64_t s = hash_combine(base, std::hash<std::string>{}(scenario));
    s = hash_combine(s, static_cast<std::uint64_t>(k));
    s = hash_combine(s, static_cast<std::uint64_t>(M));
    return hash_combine(s, static_cast<std::uint64_t>(rep) + 1);
}

inline std::uint64_t reference_seed(std::uint64_t base, const std::string& scenario, double k) {
    std::uint64_t s = hash_combine(base, std::hash<std::string>{}(scenario));
    s = hash_combine(s, static_cast<std::uint64_t>(k));
    return hash_combine(s, 0x7265666572656e63ULL);  // disjoint from every trial stream
}

namespace detail {

struct StageTimes {
    double sample = 0.0, evolve = 0.0, reconstruct = 0.0;
};

using Clock = std::chrono::steady_clock;

inline double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <int D>
inline WaveField<D> staged_fgs_field(const SimConfig<D>& cfg, std::size_t M, std::uint64_t seed,
                                     double cutoff, StageTimes& times) {
    auto t0 = Clock::now();
    const SampleBatch<D> bp = draw_batch<D>(cfg.data, M, seed, cfg.cdf_grid_size);
    const SampleBatch<D> bm =
        draw_batch<D>(cfg.data, M, hash_combine(seed, 0x6d696e7573ULL), cfg.cdf_grid_size);
    times.sample = seconds_since(t0);

    t0 = Clock::now();
    std::array<BranchEnsemble<D>, 2> ens{
        make_ensemble<D>(cfg.data, cfg.velocity, bp, Branch::plus, cfg.t_final, cfg.dt),
        make_ensemble<D>(cfg.data, cfg.velocity, bm, Branch::minus, cfg.t_final, cfg.dt),
    };
    times.evolve = seconds_since(t0);

    t0 = Clock::now();
    WaveField<D> f =
        reconstruct<D>(cfg.k, cfg.grid, std::span<const BranchEnsemble<D>>(ens), cutoff);
    times.reconstruct = seconds_since(t0);
    f.t = cfg.t_final;
    f.M = M;
    f.seed = seed;
    return f;
}

} // namespace detail

/// Run the published error-sweep protocol for one scenario: one reference
/// field per k (seeded off the trial streams), then `repetitions` independent
/// FGS fields per (k, M) cell, each scored by the energy-norm distance to the
/// reference. Cells run sequentially; the heavy inner loops are parallel.
template <int D>
inline SweepResult run_sweep(const SweepConfig& cfg,
                             const std::function<void(const std::string&)>& progress = nullptr) {
    cfg.validate();
    const ScenarioInfo& info = find_scenario(cfg.scenario);
    if (info.dim != D) throw ConfigError("run_sweep dimension mismatch");

    SweepResult result;
    nlohmann::json cells = nlohmann::json::array();

    for (const double k : cfg.k_list) {
        const SimConfig<D> sim = scenario_config<D>(cfg.scenario, k);
        detail::StageTimes ref_times;
        const std::uint64_t ref_seed = reference_seed(cfg.seed_base, cfg.scenario, k);
        if (progress) progress("reference k=" + std::to_string(k) + " M0=" + std::to_string(cfg.m0));
        const WaveField<D> ref =
            detail::staged_fgs_field<D>(sim, cfg.m0, ref_seed, cfg.cutoff, ref_times);
        cells.push_back({{"k", k},
                         {"reference_seed", ref_seed},
                         {"reference_times",
                          {{"sample", ref_times.sample},
                           {"evolve", ref_times.evolve},
                           {"reconstruct", ref_times.reconstruct}}}});

        for (const std::size_t M : cfg.m_list) {
            double sum_sq = 0.0;
            for (int rep = 0; rep < cfg.repetitions; ++rep) {
                detail::StageTimes times;
                const std::uint64_t seed = trial_seed(cfg.seed_base, cfg.scenario, k, M, rep);
                const WaveField<D> trial =
                    detail::staged_fgs_field<D>(sim, M, seed, cfg.cutoff, times);
                ErrorSweepRecord rec;
                rec.scenario = cfg.scenario;
                rec.k = k;
                rec.M = M;
                rec.repetition = rep;
                try {
                    rec.e_s = energy_norm_diff<D>(trial, ref).value();
                } catch (const Error& e) {
                    throw Error("sweep cell (k=" + std::to_string(k) + ", M=" + std::to_string(M) +
                                ", rep=" + std::to_string(rep) + "): " + e.what());
                }
                if (!(rec.e_s >= 0.0) || !std::isfinite(rec.e_s))
                    throw Error("non-finite sampling error in sweep cell");
                rec.t_sample = times.sample;
                rec.t_evolve = times.evolve;
                rec.t_reconstruct = times.reconstruct;
                sum_sq += rec.e_s * rec.e_s;
                result.records.push_back(std::move(rec));
            }
            result.summary.push_back(
                {k, M, cfg.repetitions, std::sqrt(sum_sq / cfg.repetitions)});
            if (progress)
                progress("cell k=" + std::to_string(k) + " M=" + std::to_string(M) +
                         " rms=" + std::to_string(result.summary.back().rms_es));
        }
    }

    result.manifest["scenario"] = cfg.scenario;
    result.manifest["dimension"] = D;
    result.manifest["k_list"] = cfg.k_list;
    result.manifest["M_list"] = cfg.m_list;
    result.manifest["repetitions"] = cfg.repetitions;
    result.manifest["M0"] = cfg.m0;
    result.manifest["seed_base"] = cfg.seed_base;
    result.manifest["cutoff"] = cfg.cutoff;
    result.manifest["t_final"] = info.t_final;
    result.manifest["dt"] = info.dt;
    result.manifest["references"] = cells;
    return result;
}

struct FitResult {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
    std::vector<double> axis_values;
    std::vector<double> compensated;  // k-axis fits: rms / k^{d/4}
};

enum class SweepAxis { M, k };

/// Least-squares fit of log(rms E_S) against log(axis), the other variable
/// held fixed (the summary must contain a single value of it).
inline FitResult fit_scaling(const std::vector<SweepCell>& summary, SweepAxis axis, int dim = 1) {
    std::vector<double> xs, ys;
    double other = 0.0;
    bool have_other = false;
    for (const auto& c : summary) {
        const double ax = axis == SweepAxis::M ? static_cast<double>(c.M) : c.k;
        const double ot = axis == SweepAxis::M ? c.k : static_cast<double>(c.M);
        if (!have_other) {
            other = ot;
            have_other = true;
        } else if (ot != other) {
            throw InsufficientData("fit_scaling: the non-axis variable must be held fixed");
        }
        xs.push_back(std::log(ax));
        ys.push_back(std::log(c.rms_es));
    }
    std::vector<double> uniq = xs;
    std::sort(uniq.begin(), uniq.end());
    uniq.erase(std::unique(uniq.begin(), uniq.end()), uniq.end());
    if (uniq.size() < 3) throw InsufficientData("fit_scaling needs >= 3 distinct axis values");

    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
        syy += ys[i] * ys[i];
    }
    FitResult fit;
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;
    const double num = n * sxy - sx * sy;
    const double den = std::sqrt((n * sxx - sx * sx) * (n * syy - sy * sy));
    fit.r_squared = den > 0 ? (num / den) * (num / den) : 1.0;

    for (const auto& c : summary) {
        const double ax = axis == SweepAxis::M ? static_cast<double>(c.M) : c.k;
        fit.axis_values.push_back(ax);
        if (axis == SweepAxis::k)
            fit.compensated.push_back(c.rms_es / std::pow(c.k, dim / 4.0));
    }
    return fit;
}

/// records.csv + timings.csv + summary.csv + manifest.json in `out_dir`.
/// records.csv holds only the deterministic columns, in deterministic order
/// and full precision, so reruns from the same manifest are byte-identical;
/// the wall-clock components live in timings.csv.
inline void emit_outputs(const SweepResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error("cannot create output directory " + out_dir + ": " + ec.message());

    {
        std::ofstream out(out_dir + "/records.csv");
        if (!out) throw Error("cannot write " + out_dir + "/records.csv");
        out << "scenario,k,M,repetition,e_s\n";
        char buf[256];
        for (const auto& r : result.records) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%zu,%d,%.17g\n", r.scenario.c_str(), r.k,
                          r.M, r.repetition, r.e_s);
            out << buf;
        }
    }
    {
        std::ofstream out(out_dir + "/timings.csv");
        out << "scenario,k,M,repetition,t_sample,t_evolve,t_reconstruct\n";
        char buf[256];
        for (const auto& r : result.records) {
            std::snprintf(buf, sizeof buf, "%s,%.17g,%zu,%d,%.6f,%.6f,%.6f\n", r.scenario.c_str(),
                          r.k, r.M, r.repetition, r.t_sample, r.t_evolve, r.t_reconstruct);
            out << buf;
        }
    }
    {
        std::ofstream out(out_dir + "/summary.csv");
        if (!out) throw Error("cannot write " + out_dir + "/summary.csv");
        out << "k,M,repetitions,sqrt_mean_es2\n";
        char buf[128];
        for (const auto& c : result.summary) {
            std::snprintf(buf, sizeof buf, "%.17g,%zu,%d,%.17g\n", c.k, c.M, c.repetitions,
                          c.rms_es);
            out << buf;
        }
    }
    {
        std::ofstream out(out_dir + "/manifest.json");
        out << result.manifest.dump(2) << "\n";
    }
}

} // namespace fgs
