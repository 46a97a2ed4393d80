#include "acidinv/experiments.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <string>

namespace acidinv {

std::uint64_t Rng::next_u64() {
    // splitmix64 (Steele, Lea, Flood 2014).
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

double Rng::uniform01() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
}

double Rng::gaussian(double sigma) {
    if (has_spare_) {
        has_spare_ = false;
        return sigma * spare_;
    }
    // Box-Muller; u1 shifted away from zero for the logarithm.
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return sigma * r * std::cos(a);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t k) {
    Rng r(seed + 0x9E3779B97F4A7C15ull * (k + 1));
    return r.next_u64();
}

void ExperimentConfig::validate() const {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (nod < 3) throw std::invalid_argument("nod must be >= 3");
    if (!(tau > 0.0 && T > 0.0))
        throw std::invalid_argument("tau and T must be positive");
    for (double s : sigmas)
        if (s < 0.0) throw std::invalid_argument("sigma must be >= 0");
    if (!(lo < hi)) throw std::invalid_argument("bounds: lo must be < hi");
    if (!(rho2 > 0.0 && D2 > 0.0 && delta3 > 0.0))
        throw std::invalid_argument("model parameters must be positive");
}

SolverContext ExperimentConfig::make_context() const {
    SolverContext ctx;
    ctx.mesh = Mesh1D::uniform(nod);
    ctx.tg = TimeGrid::make(tau, T);
    ctx.ic = default_initial_condition(ctx.mesh, ic_front_width);
    ctx.base = NondimParams{delta1_hat, rho2, D2, delta3};
    return ctx;
}

OptimOptions ExperimentConfig::make_optim_options() const {
    OptimOptions o;
    o.lo = lo;
    o.hi = hi;
    return o;
}

ObservationSet generate_synthetic(const ExperimentConfig& cfg, double sigma,
                                  std::uint64_t noise_seed) {
    cfg.validate();
    const SolverContext ctx = cfg.make_context();
    const StateTrajectory traj = solve_forward(
        ctx.with_delta1(cfg.delta1_hat), ctx.ic, ctx.mesh, ctx.tg);

    ObservationSet obs;
    obs.nod = ctx.mesh.nod;
    obs.nt = ctx.tg.nt;
    obs.uhat3 = traj.u[2];
    if (sigma > 0.0) {
        Rng rng(noise_seed);
        for (int n = 0; n <= obs.nt; ++n)
            for (int j = 0; j < obs.nod - 1; ++j)
                obs.uhat3[n][j] += rng.gaussian(sigma);
        obs.noise = ObservationSet::NoiseMeta{sigma, noise_seed};
    }
    return obs;
}

namespace {

struct SampleStats {
    double mean = 0.0;
    double stddev = 0.0;
};

SampleStats sample_stats(const std::vector<double>& v) {
    SampleStats s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ssq = 0.0;
        for (double x : v) ssq += (x - s.mean) * (x - s.mean);
        s.stddev = std::sqrt(ssq / static_cast<double>(v.size() - 1));
    }
    return s;
}

}  // namespace

std::vector<RecoveryRow> run_recovery_study(
    const ExperimentConfig& cfg, const std::vector<double>& delta1_hats) {
    cfg.validate();
    std::vector<RecoveryRow> rows;
    const OptimOptions opts = cfg.make_optim_options();
    for (std::size_t row = 0; row < delta1_hats.size(); ++row) {
        ExperimentConfig c = cfg;
        c.delta1_hat = delta1_hats[row];
        const SolverContext ctx = c.make_context();
        const ObservationSet obs = generate_synthetic(c, 0.0, 0);

        std::vector<double> recovered;
        int failures = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            const std::uint64_t sub =
                trial_seed(cfg.seed, row * static_cast<std::uint64_t>(
                                               cfg.trials) + t);
            Rng rng(sub);
            const double x0 = cfg.random_init ? rng.uniform(cfg.lo, cfg.hi)
                                              : cfg.delta1_init;
            try {
                recovered.push_back(fit(obs, x0, opts, ctx).delta1_star);
            } catch (const std::exception&) {
                ++failures;
            }
        }
        const SampleStats st = sample_stats(recovered);
        rows.push_back({delta1_hats[row], st.mean, st.stddev, failures});
    }
    return rows;
}

std::vector<StudyRow> run_noise_study(const ExperimentConfig& cfg) {
    cfg.validate();
    std::vector<StudyRow> rows;
    const SolverContext ctx = cfg.make_context();
    const OptimOptions opts = cfg.make_optim_options();
    for (std::size_t row = 0; row < cfg.sigmas.size(); ++row) {
        const double sigma = cfg.sigmas[row];
        std::vector<double> recovered;
        int failures = 0;
        for (int t = 0; t < cfg.trials; ++t) {
            const std::uint64_t sub =
                trial_seed(cfg.seed, row * static_cast<std::uint64_t>(
                                               cfg.trials) + t);
            const ObservationSet obs = generate_synthetic(cfg, sigma, sub);
            Rng rng(trial_seed(sub, 0));
            const double x0 = cfg.random_init ? rng.uniform(cfg.lo, cfg.hi)
                                              : cfg.delta1_init;
            try {
                recovered.push_back(fit(obs, x0, opts, ctx).delta1_star);
            } catch (const std::exception&) {
                ++failures;
            }
        }
        const SampleStats st = sample_stats(recovered);
        const double e = std::fabs(cfg.delta1_hat - st.mean) / cfg.delta1_hat;
        rows.push_back({sigma, st.mean, st.stddev, e, failures});
    }
    return rows;
}

std::vector<SweepPoint> run_functional_sweep(const ExperimentConfig& cfg,
                                             double lo, double hi,
                                             int samples) {
    cfg.validate();
    if (samples < 2) throw std::invalid_argument("samples must be >= 2");
    const SolverContext ctx = cfg.make_context();
    const ObservationSet obs = generate_synthetic(cfg, 0.0, 0);
    std::vector<SweepPoint> pts;
    pts.reserve(samples);
    for (int k = 0; k < samples; ++k) {
        const double d =
            lo + (hi - lo) * static_cast<double>(k) / (samples - 1);
        pts.push_back({d, reduced_objective(d, ctx, obs)});
    }
    return pts;
}

namespace {

void put(std::ostream& os, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    os << buf;
}

void metadata_line(std::ostream& os, const ExperimentConfig& cfg) {
    os << "# seed=" << cfg.seed << " nod=" << cfg.nod << " tau=";
    put(os, cfg.tau);
    os << " T=";
    put(os, cfg.T);
    os << " rho2=";
    put(os, cfg.rho2);
    os << " d2=";
    put(os, cfg.D2);
    os << " delta3=";
    put(os, cfg.delta3);
    os << " delta1_hat=";
    put(os, cfg.delta1_hat);
    os << " trials=" << cfg.trials << " delta1_init=";
    if (cfg.random_init)
        os << "random";
    else
        put(os, cfg.delta1_init);
    os << " bounds=[";
    put(os, cfg.lo);
    os << ',';
    put(os, cfg.hi);
    os << "]\n";
}

}  // namespace

void write_observation_csv(const ObservationSet& obs, const Mesh1D& mesh,
                           const TimeGrid& tg, std::ostream& os) {
    os << "x,t,u3hat\n";
    for (int n = 0; n <= obs.nt; ++n) {
        for (int j = 0; j < obs.nod; ++j) {
            put(os, mesh.node(j));
            os << ',';
            put(os, tg.time(n));
            os << ',';
            put(os, obs.uhat3[n][j]);
            os << '\n';
        }
    }
}

ObservationSet read_observation_csv(std::istream& is, const Mesh1D& mesh,
                                    const TimeGrid& tg) {
    std::string line;
    if (!std::getline(is, line) || line.rfind("x,t,u3hat", 0) != 0) {
        throw std::runtime_error("observation file: missing x,t,u3hat header");
    }
    ObservationSet obs;
    obs.nod = mesh.nod;
    obs.nt = tg.nt;
    const double nan = std::nan("");
    obs.uhat3.assign(tg.nt + 1, GridFunction(mesh.nod, nan));
    std::size_t lineno = 1;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        double x, t, v;
        char c1, c2;
        std::istringstream ss(line);
        if (!(ss >> x >> c1 >> t >> c2 >> v) || c1 != ',' || c2 != ',') {
            throw std::runtime_error("observation file: bad row at line " +
                                     std::to_string(lineno));
        }
        const int j = static_cast<int>(std::lround(x / mesh.h));
        const int n = static_cast<int>(std::lround(t / tg.tau));
        if (j < 0 || j >= mesh.nod || std::fabs(mesh.node(j) - x) > 1e-9 ||
            n < 0 || n > tg.nt || std::fabs(tg.time(n) - t) > 1e-9) {
            throw std::runtime_error(
                "observation file: point off the solver grid at line " +
                std::to_string(lineno));
        }
        obs.uhat3[n][j] = v;
    }
    for (int n = 0; n <= tg.nt; ++n)
        for (int j = 0; j < mesh.nod; ++j)
            if (std::isnan(obs.uhat3[n][j]))
                throw std::runtime_error(
                    "observation file: incomplete grid coverage");
    return obs;
}

void write_noise_study_csv(const std::vector<StudyRow>& rows,
                           const ExperimentConfig& cfg, std::ostream& os) {
    metadata_line(os, cfg);
    for (const StudyRow& r : rows) {
        if (r.failures * 10 > cfg.trials) {
            os << "# warning: sigma=";
            put(os, r.sigma);
            os << " had " << r.failures << "/" << cfg.trials
               << " failed fits\n";
        }
    }
    os << "sigma,mean,std,rel_error\n";
    for (const StudyRow& r : rows) {
        put(os, r.sigma);
        os << ',';
        put(os, r.mean);
        os << ',';
        put(os, r.stddev);
        os << ',';
        put(os, r.rel_error);
        os << '\n';
    }
}

void write_recovery_csv(const std::vector<RecoveryRow>& rows,
                        const ExperimentConfig& cfg, std::ostream& os) {
    metadata_line(os, cfg);
    os << "delta1_hat,mean,std\n";
    for (const RecoveryRow& r : rows) {
        put(os, r.delta1_hat);
        os << ',';
        put(os, r.mean);
        os << ',';
        put(os, r.stddev);
        os << '\n';
    }
}

void write_sweep_csv(const std::vector<SweepPoint>& points, std::ostream& os) {
    os << "delta1,J\n";
    for (const SweepPoint& p : points) {
        put(os, p.delta1);
        os << ',';
        put(os, p.J);
        os << '\n';
    }
}

}  // namespace acidinv
