// fgs-wave: frozen Gaussian sampling for high-frequency scalar wave equations.
//
// Subcommands: sample | traj | reconstruct | reference | sweep | compare
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <cstdio>
#include <iostream>

#include <CLI11.hpp>

#include "fgs/config.hpp"
#include "fgs/experiments.hpp"
#include "fgs/psi.hpp"
#include "fgs/reconstruction.hpp"
#include "fgs/spectral.hpp"

namespace {

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerical = 3;

struct SampleArgs {
    std::string config;
    std::string out = "-";
};

struct TrajArgs {
    std::string config;
    std::vector<double> q, p;
    std::string branch = "plus";
    int stride = 100;
    std::string out = "-";
};

struct FieldArgs {
    std::string config;
    std::string out_base;
};

struct SweepArgs {
    std::string config;
    std::string scenario;
    std::string out = "sweep-out";
    int threads = 0;
    int reps = 0;
    std::size_t m0 = 0;
};

struct CompareArgs {
    std::string fgs_base;
    std::string ref_base;
};

std::FILE* open_out(const std::string& path) {
    if (path == "-") return stdout;
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw fgs::ConfigError("cannot open output file " + path);
    return f;
}

template <int D> void run_sample(const fgs::SimConfig<D>& cfg, const SampleArgs& args) {
    const fgs::SampleBatch<D> batch =
        fgs::draw_batch<D>(cfg.data, cfg.M, cfg.seed, cfg.cdf_grid_size);
    std::FILE* f = open_out(args.out);
    for (int j = 0; j < D; ++j) std::fprintf(f, "q_%d,", j + 1);
    for (int j = 0; j < D; ++j) std::fprintf(f, "p_%d,", j + 1);
    std::fprintf(f, "pi\n");
    for (std::size_t i = 0; i < batch.size(); ++i) {
        for (int j = 0; j < D; ++j) std::fprintf(f, "%.17g,", batch.points[i].q[j]);
        for (int j = 0; j < D; ++j) std::fprintf(f, "%.17g,", batch.points[i].p[j]);
        std::fprintf(f, "%.17g\n", batch.pi_values[i]);
    }
    if (f != stdout) std::fclose(f);
}

template <int D> void run_traj(const fgs::SimConfig<D>& cfg, const TrajArgs& args) {
    if (args.q.size() != D || args.p.size() != D)
        throw fgs::ConfigError("--q and --p need " + std::to_string(D) + " components");
    fgs::PhasePoint<D> z0;
    for (int j = 0; j < D; ++j) {
        z0.q[j] = args.q[j];
        z0.p[j] = args.p[j];
    }
    const fgs::Branch branch = args.branch == "minus" ? fgs::Branch::minus : fgs::Branch::plus;
    const auto rows =
        fgs::trace_trajectory<D>(z0, branch, cfg.velocity, cfg.t_final, cfg.dt, args.stride);
    std::FILE* f = open_out(args.out);
    std::fprintf(f, "t");
    for (int j = 0; j < D; ++j) std::fprintf(f, ",Q_%d", j + 1);
    for (int j = 0; j < D; ++j) std::fprintf(f, ",P_%d", j + 1);
    std::fprintf(f, ",re_a,im_a,re_detZ,im_detZ\n");
    for (const auto& r : rows) {
        std::fprintf(f, "%.10g", r.t);
        for (int j = 0; j < D; ++j) std::fprintf(f, ",%.17g", r.Q[j]);
        for (int j = 0; j < D; ++j) std::fprintf(f, ",%.17g", r.P[j]);
        std::fprintf(f, ",%.17g,%.17g,%.17g,%.17g\n", r.a.real(), r.a.imag(), r.detZ.real(),
                     r.detZ.imag());
    }
    if (f != stdout) std::fclose(f);
}

template <int D> void run_reconstruct(const fgs::SimConfig<D>& cfg, const FieldArgs& args) {
    const fgs::WaveField<D> f =
        fgs::fgs_field<D>(cfg.data, cfg.velocity, cfg.grid, cfg.M, cfg.seed, cfg.t_final, cfg.dt);
    fgs::save_wave_field<D>(args.out_base, f);
    std::printf("wrote %s.{u,du_dt}.{f64,json}  (grid %lld points)\n", args.out_base.c_str(),
                static_cast<long long>(f.grid.size()));
}

template <int D> void run_reference(const fgs::SimConfig<D>& cfg, const FieldArgs& args) {
    if constexpr (D > 2) {
        throw fgs::ConfigError("the spectral reference solver supports d = 1, 2");
    } else {
        const fgs::WaveField<D> f =
            fgs::solve_reference<D>(cfg.data, cfg.velocity, cfg.grid, cfg.t_final);
        fgs::save_wave_field<D>(args.out_base, f);
        std::printf("wrote %s.{u,du_dt}.{f64,json}\n", args.out_base.c_str());
    }
}

void run_sweep_cmd(const SweepArgs& args) {
    fgs::SweepConfig cfg;
    if (!args.config.empty()) {
        std::ifstream in(args.config);
        if (!in) throw fgs::ConfigError("cannot open sweep config " + args.config);
        nlohmann::json j;
        in >> j;
        cfg.scenario = j.value("scenario", std::string{});
        cfg.k_list = j.value("k_list", std::vector<double>{});
        cfg.m_list = j.value("M_list", std::vector<std::size_t>{});
        cfg.repetitions = j.value("repetitions", 30);
        cfg.m0 = j.value("M0", 0ULL);
        cfg.seed_base = j.value("seed_base", 0ULL);
    }
    if (!args.scenario.empty()) cfg.scenario = args.scenario;
    if (cfg.scenario.empty()) throw fgs::ConfigError("sweep needs --scenario or a config file");
    const fgs::ScenarioInfo& info = fgs::find_scenario(cfg.scenario);
    if (cfg.k_list.empty()) cfg.k_list = info.k_list;
    if (cfg.m_list.empty()) cfg.m_list = info.m_list;
    if (cfg.m0 == 0) cfg.m0 = info.m0;
    if (args.reps > 0) cfg.repetitions = args.reps;
    if (args.m0 > 0) cfg.m0 = args.m0;
    if (args.threads > 0) fgs::set_threads(args.threads);

    auto progress = [](const std::string& msg) { std::fprintf(stderr, "[sweep] %s\n", msg.c_str()); };
    fgs::SweepResult result;
    switch (info.dim) {
        case 1: result = fgs::run_sweep<1>(cfg, progress); break;
        case 2: result = fgs::run_sweep<2>(cfg, progress); break;
        default: result = fgs::run_sweep<3>(cfg, progress); break;
    }
    fgs::emit_outputs(result, args.out);
    std::printf("k,M,sqrt_mean_es2\n");
    for (const auto& c : result.summary)
        std::printf("%g,%zu,%.6e\n", c.k, c.M, c.rms_es);
    std::printf("outputs in %s\n", args.out.c_str());
}

template <int D> double compare_dims(const CompareArgs& args) {
    fgs::WaveField<D> a = fgs::load_wave_field<D>(args.fgs_base);
    fgs::WaveField<D> b = fgs::load_wave_field<D>(args.ref_base);
    if constexpr (D > 2) {
        throw fgs::ConfigError("compare supports d = 1, 2 dumps");
    } else {
        if (!a.has_grad()) fgs::spectral_gradient<D>(a);
        if (!b.has_grad()) fgs::spectral_gradient<D>(b);
        return fgs::energy_norm_diff<D>(a, b).value();
    }
}

int dump_dimension(const std::string& base) {
    std::ifstream side(base + ".u.json");
    if (!side) throw fgs::ConfigError("cannot open sidecar " + base + ".u.json");
    nlohmann::json j;
    side >> j;
    return static_cast<int>(j["grid"]["shape"].size());
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frozen Gaussian sampling for high-frequency scalar wave equations"};
    app.require_subcommand(1);

    SampleArgs sample_args;
    auto* sample = app.add_subcommand("sample", "draw a phase-space batch and emit it as CSV");
    sample->add_option("--config", sample_args.config, "simulation config (JSON)")->required();
    sample->add_option("--out", sample_args.out, "output CSV path or '-'");

    TrajArgs traj_args;
    auto* traj = app.add_subcommand("traj", "dump one trajectory (t, Q, P, a, det Z) as CSV");
    traj->add_option("--config", traj_args.config, "simulation config (JSON)")->required();
    traj->add_option("--q", traj_args.q, "initial position components")->required();
    traj->add_option("--p", traj_args.p, "initial momentum components")->required();
    traj->add_option("--branch", traj_args.branch, "plus | minus");
    traj->add_option("--stride", traj_args.stride, "output every N-th step");
    traj->add_option("--out", traj_args.out, "output CSV path or '-'");

    FieldArgs recon_args;
    auto* recon = app.add_subcommand("reconstruct", "sampling -> evolution -> reconstruction");
    recon->add_option("--config", recon_args.config, "simulation config (JSON)")->required();
    recon->add_option("--out", recon_args.out_base, "output dump basename")->required();

    FieldArgs ref_args;
    auto* ref = app.add_subcommand("reference", "pseudospectral reference field");
    ref->add_option("--config", ref_args.config, "simulation config (JSON)")->required();
    ref->add_option("--out", ref_args.out_base, "output dump basename")->required();

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "run the (k, M) error-sweep protocol");
    sweep->add_option("--config", sweep_args.config, "sweep config (JSON)");
    sweep->add_option("--scenario", sweep_args.scenario, "built-in scenario id");
    sweep->add_option("--out", sweep_args.out, "output directory");
    sweep->add_option("--threads", sweep_args.threads, "worker threads");
    sweep->add_option("--reps", sweep_args.reps, "repetitions per cell");
    sweep->add_option("--m0", sweep_args.m0, "reference sample size");

    CompareArgs cmp_args;
    auto* cmp = app.add_subcommand("compare", "energy-norm difference of two field dumps");
    cmp->add_option("--fgs", cmp_args.fgs_base, "first dump basename")->required();
    cmp->add_option("--ref", cmp_args.ref_base, "second dump basename")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? exit_ok : exit_config;
    }

    try {
        if (*sample) {
            std::visit([&](const auto& cfg) { run_sample(cfg, sample_args); },
                       fgs::load_config(sample_args.config));
        } else if (*traj) {
            std::visit([&](const auto& cfg) { run_traj(cfg, traj_args); },
                       fgs::load_config(traj_args.config));
        } else if (*recon) {
            std::visit([&](const auto& cfg) { run_reconstruct(cfg, recon_args); },
                       fgs::load_config(recon_args.config));
        } else if (*ref) {
            std::visit([&](const auto& cfg) { run_reference(cfg, ref_args); },
                       fgs::load_config(ref_args.config));
        } else if (*sweep) {
            run_sweep_cmd(sweep_args);
        } else if (*cmp) {
            const int dim = dump_dimension(cmp_args.fgs_base);
            double diff = 0.0;
            if (dim == 1) diff = compare_dims<1>(cmp_args);
            else if (dim == 2) diff = compare_dims<2>(cmp_args);
            else throw fgs::ConfigError("compare supports d = 1, 2 dumps");
            std::printf("energy_norm_diff = %.10e\n", diff);
        }
    } catch (const fgs::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return exit_config;
    } catch (const fgs::Error& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return exit_numerical;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return exit_numerical;
    }
    return exit_ok;
}
