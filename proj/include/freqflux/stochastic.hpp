/*
   Copyright 2026 The freqflux Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

// Stochastic injections and their propagation into CoI frequency increments.
//
// Every noisy injection is an OU process sampled by Euler-Maruyama on a
// uniform grid. Increments are dx_k = x_{k+1} - x_k and feed the linear map
//   d_omega_k = sum_i w_p,i dp_i,k + w_q,i dq_i,k
// directly; nothing in here differentiates a series.

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <boost/math/distributions/normal.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/random/normal_distribution.hpp>
#include <json.hpp>

#include "freqflux/case_io.hpp"
#include "freqflux/coi.hpp"
#include "freqflux/errors.hpp"
#include "freqflux/linalg.hpp"
#include "freqflux/moments.hpp"
#include "freqflux/netmodel.hpp"
#include "freqflux/powerflow.hpp"
#include "freqflux/rng.hpp"
#include "freqflux/sensitivity.hpp"

namespace freqflux {

enum class NoiseTarget { p, q, both };
enum class NoiseKind { ou_gaussian, ou_weibull_mapped };

struct NoiseModel {
    std::size_t bus = 0;
    NoiseTarget target = NoiseTarget::p;
    NoiseKind kind = NoiseKind::ou_gaussian;
    double lambda = 1.0;  ///< 1/s
    double sigma = 0.01;  ///< pu/sqrt(s); the Weibull kind uses a unit driver instead
    double mean = 0.0;    ///< pu, Gaussian kind
    double weibull_shape = 2.0;
    double weibull_scale = 0.05;  ///< pu
    bool mirror = false;
};

inline void validate_noise(const NoiseModel& m, std::size_t n_bus) {
    if (m.bus >= n_bus) throw Error(ErrorKind::invalid_argument, "noise bus does not exist");
    if (!(m.lambda > 0.0) || !std::isfinite(m.lambda)) {
        throw Error(ErrorKind::invalid_argument, "noise lambda must be > 0");
    }
    if (!(m.sigma >= 0.0) || !std::isfinite(m.sigma)) {
        throw Error(ErrorKind::invalid_argument, "noise sigma must be >= 0");
    }
    if (m.kind == NoiseKind::ou_weibull_mapped &&
        (!(m.weibull_shape > 0.0) || !(m.weibull_scale > 0.0))) {
        throw Error(ErrorKind::invalid_argument, "Weibull shape and scale must be > 0");
    }
}

inline double weibull_mean(double k, double w) { return w * boost::math::tgamma(1.0 + 1.0 / k); }

inline double weibull_variance(double k, double w) {
    const double g1 = boost::math::tgamma(1.0 + 1.0 / k);
    const double g2 = boost::math::tgamma(1.0 + 2.0 / k);
    return w * w * (g2 - g1 * g1);
}

inline double weibull_skewness(double k) {
    const double g1 = boost::math::tgamma(1.0 + 1.0 / k);
    const double g2 = boost::math::tgamma(1.0 + 2.0 / k);
    const double g3 = boost::math::tgamma(1.0 + 3.0 / k);
    return (g3 - 3.0 * g1 * g2 + 2.0 * g1 * g1 * g1) / std::pow(g2 - g1 * g1, 1.5);
}

/// Level series has n_steps + 1 samples, increments n_steps.
struct OuSeries {
    Vec level;
    Vec increment;
};

struct OuOptions {
    /// Start value; by default a draw from the discrete stationary law.
    std::optional<double> x0;
};

inline void check_step(double lambda, double dt) {
    if (!(dt > 0.0)) throw Error(ErrorKind::invalid_argument, "dt must be positive");
    if (lambda * dt >= 0.1) {
        throw Error(ErrorKind::unstable_step,
                    "lambda*dt = " + std::to_string(lambda * dt) + " must stay below 0.1");
    }
}

/// x_{k+1} = x_k - lambda (x_k - mu) dt + sigma sqrt(dt) N(0,1).
inline OuSeries euler_maruyama_ou(double lambda, double sigma, double mu, double dt,
                                  std::size_t n_steps, Philox4x32& rng, const OuOptions& opt = {}) {
    check_step(lambda, dt);
    boost::random::normal_distribution<double> normal(0.0, 1.0);
    OuSeries out;
    const auto n = static_cast<Eigen::Index>(n_steps);
    out.level.resize(n + 1);
    out.increment.resize(n);
    const double decay = 1.0 - lambda * dt;
    // Exact stationary variance of the discrete recursion.
    const double stat_sd = sigma * std::sqrt(dt / (1.0 - decay * decay));
    double x = opt.x0 ? *opt.x0 : mu + stat_sd * normal(rng);
    const double kick = sigma * std::sqrt(dt);
    out.level(0) = x;
    for (Eigen::Index k = 0; k < n; ++k) {
        const double next = x - lambda * (x - mu) * dt + kick * normal(rng);
        out.increment(k) = next - x;
        out.level(k + 1) = next;
        x = next;
    }
    return out;
}

inline OuSeries euler_maruyama_ou(const NoiseModel& m, double dt, std::size_t n_steps,
                                  Philox4x32& rng, const OuOptions& opt = {}) {
    return euler_maruyama_ou(m.lambda, m.sigma, m.mean, dt, n_steps, rng, opt);
}

/// Weibull(k, w) quantile of Phi(z), computed from the upper tail so large z
/// keeps full precision.
inline double weibull_from_gaussian(double z, double k, double w) {
    static const boost::math::normal_distribution<double> std_normal(0.0, 1.0);
    double tail_log;
    if (z < 0.0) {
        tail_log = -std::log1p(-boost::math::cdf(std_normal, z));
    } else {
        tail_log = -std::log(boost::math::cdf(boost::math::complement(std_normal, z)));
    }
    return w * std::pow(tail_log, 1.0 / k);
}

/// Gaussian-copula construction: a unit-variance OU driver with rate lambda is
/// mapped pointwise onto the Weibull marginal. Mirroring reflects the series
/// about the Weibull mean.
inline OuSeries skewed_noise(const NoiseModel& m, double dt, std::size_t n_steps, Philox4x32& rng) {
    check_step(m.lambda, dt);
    const double decay = 1.0 - m.lambda * dt;
    const double unit_sigma = std::sqrt((1.0 - decay * decay) / dt);
    const OuSeries driver = euler_maruyama_ou(m.lambda, unit_sigma, 0.0, dt, n_steps, rng);
    const double mu = weibull_mean(m.weibull_shape, m.weibull_scale);
    OuSeries out;
    out.level.resize(driver.level.size());
    for (Eigen::Index k = 0; k < driver.level.size(); ++k) {
        const double x = weibull_from_gaussian(driver.level(k), m.weibull_shape, m.weibull_scale);
        out.level(k) = m.mirror ? 2.0 * mu - x : x;
    }
    out.increment = out.level.tail(out.level.size() - 1) - out.level.head(out.level.size() - 1);
    return out;
}

inline OuSeries generate_noise(const NoiseModel& m, double dt, std::size_t n_steps, Philox4x32& rng) {
    return m.kind == NoiseKind::ou_gaussian ? euler_maruyama_ou(m, dt, n_steps, rng)
                                            : skewed_noise(m, dt, n_steps, rng);
}

enum class PropagationMode { full, simplified };

/// d_omega = w_p^T dp + w_q^T dq in pu, with w_p = H^T c / omega_base and
/// w_q = K^T c / omega_base (or -B_bus^-T c / omega_base and 0).
struct PropagationMap {
    PropagationMode mode = PropagationMode::full;
    Vec w_p;
    Vec w_q;
    double alpha = 0.0;
};

inline PropagationMap make_propagation_map(const SensitivitySet& s, const CoIWeights& w) {
    if (w.c.size() != s.size()) throw Error(ErrorKind::dimension_mismatch, "c and H differ in size");
    return {PropagationMode::full, s.H.transpose() * w.c / s.omega_base,
            s.K.transpose() * w.c / s.omega_base, w.alpha};
}

inline PropagationMap make_propagation_map(const SimplifiedSensitivity& s, const CoIWeights& w) {
    if (w.c.size() != s.B_inv.rows()) {
        throw Error(ErrorKind::dimension_mismatch, "c and B_bus differ in size");
    }
    return {PropagationMode::simplified, -s.B_inv.transpose() * w.c / s.omega_base,
            Vec::Zero(w.c.size()), w.alpha};
}

/// Solves the power flow and builds the map frozen at that point.
inline PropagationMap make_propagation_map(const Network& net, PropagationMode mode) {
    const auto weights = coi_weights(build_divider(net), net.machines);
    if (mode == PropagationMode::simplified) {
        return make_propagation_map(simplified_weights(net), weights);
    }
    const auto pf = solve_power_flow(net);
    return make_propagation_map(build_sensitivities(net, pf.point), weights);
}

/// Sample-major increment matrices (rows = steps, columns = buses).
inline Vec propagate_increments(const PropagationMap& map, const Mat& dp, const Mat& dq) {
    const Eigen::Index n = map.w_p.size();
    if (dp.cols() != n || dq.cols() != n || dp.rows() != dq.rows()) {
        throw Error(ErrorKind::dimension_mismatch,
                    "increment series must be aligned and have one column per bus");
    }
    return dp * map.w_p + dq * map.w_q;
}

struct SourceSeries {
    std::size_t bus = 0;
    bool reactive = false;
    OuSeries series;
};

struct SamplePath {
    std::uint64_t seed = 0;
    std::size_t path = 0;
    double dt = 0.0;
    std::vector<SourceSeries> sources;
    Vec d_omega;    ///< pu per step
    Vec omega_coi;  ///< pu deviation, running sum of d_omega starting at 0

    Vec t() const {
        return Vec::LinSpaced(omega_coi.size(), 0.0, dt * static_cast<double>(omega_coi.size() - 1));
    }
};

/// RNG stream of one (model, component) pair.
inline std::uint32_t stream_id(std::size_t model_index, bool reactive) {
    return static_cast<std::uint32_t>(2 * model_index + (reactive ? 1 : 0));
}

inline SamplePath run_path(std::span<const NoiseModel> noise, const PropagationMap& map, double dt,
                           std::size_t n_steps, std::uint64_t seed, std::size_t path,
                           bool keep_sources = true) {
    SamplePath out;
    out.seed = seed;
    out.path = path;
    out.dt = dt;
    const auto n = static_cast<Eigen::Index>(n_steps);
    out.d_omega = Vec::Zero(n);
    for (std::size_t i = 0; i < noise.size(); ++i) {
        const NoiseModel& m = noise[i];
        validate_noise(m, static_cast<std::size_t>(map.w_p.size()));
        for (bool reactive : {false, true}) {
            if (reactive && m.target == NoiseTarget::p) continue;
            if (!reactive && m.target == NoiseTarget::q) continue;
            Philox4x32 rng(seed, static_cast<std::uint32_t>(path), stream_id(i, reactive));
            OuSeries s = generate_noise(m, dt, n_steps, rng);
            const auto b = static_cast<Eigen::Index>(m.bus);
            const double w = reactive ? map.w_q(b) : map.w_p(b);
            out.d_omega += w * s.increment;
            if (keep_sources) out.sources.push_back({m.bus, reactive, std::move(s)});
        }
    }
    out.omega_coi.resize(n + 1);
    out.omega_coi(0) = 0.0;
    for (Eigen::Index k = 0; k < n; ++k) out.omega_coi(k + 1) = out.omega_coi(k) + out.d_omega(k);
    return out;
}

struct PathSummary {
    std::size_t path = 0;
    MomentAccumulator increments;
    MomentAccumulator levels;  ///< omega_coi samples 1..n centred on the path mean
    double final_omega_coi = 0.0;
};

struct Ensemble {
    std::vector<PathSummary> paths;
    MomentAccumulator increments;
    MomentAccumulator levels;
    std::vector<double> pooled_increments;
    std::vector<double> pooled_levels;
    std::optional<SamplePath> first_path;
};

struct MonteCarloOptions {
    std::size_t n_paths = 1;
    std::uint64_t base_seed = 1;
    unsigned threads = 0;  ///< 0 = hardware concurrency
    bool pool_samples = true;
    bool keep_first_path = false;
};

/// Runs independent paths, possibly concurrently. Path i always draws from
/// streams (base_seed, i, *), per-path moments are merged by a pairwise tree in
/// path order and pooled samples are concatenated in path order, so results do
/// not depend on the thread count.
inline Ensemble monte_carlo(std::span<const NoiseModel> noise, const PropagationMap& map, double dt,
                            std::size_t n_steps, const MonteCarloOptions& opt) {
    if (opt.n_paths < 1) throw Error(ErrorKind::invalid_argument, "n_paths must be >= 1");
    for (const auto& m : noise) {
        validate_noise(m, static_cast<std::size_t>(map.w_p.size()));
        check_step(m.lambda, dt);
    }
    struct Slot {
        PathSummary summary;
        std::vector<double> inc, lev;
        std::optional<SamplePath> path;
    };
    std::vector<Slot> slots(opt.n_paths);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= opt.n_paths || failed.load()) return;
            try {
                const bool keep = opt.keep_first_path && i == 0;
                SamplePath sp = run_path(noise, map, dt, n_steps, opt.base_seed, i, keep);
                Slot& slot = slots[i];
                slot.summary.path = i;
                slot.summary.final_omega_coi = sp.omega_coi(sp.omega_coi.size() - 1);
                slot.summary.increments.add(std::span<const double>(sp.d_omega.data(),
                                                                    static_cast<std::size_t>(sp.d_omega.size())));
                const Vec lev = sp.omega_coi.tail(sp.omega_coi.size() - 1);
                const double centre = lev.size() > 0 ? lev.mean() : 0.0;
                for (Eigen::Index k = 0; k < lev.size(); ++k) slot.summary.levels.add(lev(k) - centre);
                if (opt.pool_samples) {
                    slot.inc.assign(sp.d_omega.data(), sp.d_omega.data() + sp.d_omega.size());
                    slot.lev.resize(static_cast<std::size_t>(lev.size()));
                    for (Eigen::Index k = 0; k < lev.size(); ++k) {
                        slot.lev[static_cast<std::size_t>(k)] = lev(k) - centre;
                    }
                }
                if (keep) slot.path = std::move(sp);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
                return;
            }
        }
    };

    unsigned threads = opt.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : opt.threads;
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, opt.n_paths));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    Ensemble ens;
    std::vector<MomentAccumulator> inc_parts, lev_parts;
    for (auto& slot : slots) {
        inc_parts.push_back(slot.summary.increments);
        lev_parts.push_back(slot.summary.levels);
        ens.pooled_increments.insert(ens.pooled_increments.end(), slot.inc.begin(), slot.inc.end());
        ens.pooled_levels.insert(ens.pooled_levels.end(), slot.lev.begin(), slot.lev.end());
        ens.paths.push_back(slot.summary);
        if (slot.path) ens.first_path = std::move(slot.path);
    }
    ens.increments = pairwise_merge(std::move(inc_parts));
    ens.levels = pairwise_merge(std::move(lev_parts));
    return ens;
}

// ---------------------------------------------------------------------------
// Scenario files

struct Scenario {
    std::filesystem::path case_path;
    std::vector<NoiseModel> noise;
    double dt = 0.01;
    double t_end = 600.0;
    std::size_t n_paths = 4;
    std::uint64_t base_seed = 1;
    PropagationMode mode = PropagationMode::full;
    nlohmann::json subnet;  ///< optional aggregation settings, null when absent

    std::size_t steps() const { return static_cast<std::size_t>(std::llround(t_end / dt)); }
};

namespace detail {

inline NoiseTarget parse_target(const std::string& s) {
    if (s == "p") return NoiseTarget::p;
    if (s == "q") return NoiseTarget::q;
    if (s == "both") return NoiseTarget::both;
    throw Error(ErrorKind::invalid_argument, "noise target must be p, q or both, got '" + s + "'");
}

inline NoiseKind parse_kind(const std::string& s) {
    if (s == "ou_gaussian") return NoiseKind::ou_gaussian;
    if (s == "ou_weibull_mapped") return NoiseKind::ou_weibull_mapped;
    throw Error(ErrorKind::invalid_argument, "unknown noise kind '" + s + "'");
}

inline PropagationMode parse_mode(const std::string& s) {
    if (s == "full") return PropagationMode::full;
    if (s == "simplified") return PropagationMode::simplified;
    throw Error(ErrorKind::invalid_argument, "propagation must be full or simplified, got '" + s + "'");
}

}  // namespace detail

inline NoiseModel noise_from_json(const nlohmann::json& j) {
    NoiseModel m;
    m.bus = detail::external_id(j, "bus");
    m.target = detail::parse_target(j.value("target", std::string("p")));
    m.kind = detail::parse_kind(j.value("kind", std::string("ou_gaussian")));
    m.lambda = j.value("lambda", m.lambda);
    m.sigma = j.value("sigma", m.sigma);
    m.mean = j.value("mean", m.mean);
    m.weibull_shape = j.value("weibull_shape", m.weibull_shape);
    m.weibull_scale = j.value("weibull_scale", m.weibull_scale);
    m.mirror = j.value("mirror", false);
    return m;
}

/// Relative case paths resolve against the scenario file's directory.
inline Scenario scenario_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
    Scenario sc;
    try {
        std::filesystem::path cp = j.at("case").get<std::string>();
        sc.case_path = cp.is_absolute() ? cp : base_dir / cp;
        if (j.contains("noise")) {
            for (const auto& jn : j.at("noise")) sc.noise.push_back(noise_from_json(jn));
        }
        sc.dt = j.value("dt", sc.dt);
        sc.t_end = j.value("t_end", sc.t_end);
        sc.n_paths = j.value("n_paths", sc.n_paths);
        if (!j.contains("base_seed")) {
            throw Error(ErrorKind::invalid_argument, "scenario needs a base_seed");
        }
        sc.base_seed = j.at("base_seed").get<std::uint64_t>();
        sc.mode = detail::parse_mode(j.value("propagation", std::string("full")));
        if (j.contains("subnet")) sc.subnet = j.at("subnet");
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorKind::invalid_argument, std::string("malformed scenario: ") + e.what());
    }
    if (!(sc.dt > 0.0) || !(sc.t_end > sc.dt)) {
        throw Error(ErrorKind::invalid_argument, "scenario needs 0 < dt < t_end");
    }
    if (sc.n_paths < 1) throw Error(ErrorKind::invalid_argument, "n_paths must be >= 1");
    if (!std::filesystem::exists(sc.case_path)) {
        throw Error(ErrorKind::invalid_argument, "case file '" + sc.case_path.string() + "' not found");
    }
    return sc;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return scenario_from_json(read_json_file(path), path.parent_path());
}

}  // namespace freqflux
